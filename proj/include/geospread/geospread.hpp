#pragma once

// Umbrella header.

#include "geospread/acceptance.hpp"
#include "geospread/compare.hpp"
#include "geospread/config.hpp"
#include "geospread/csv.hpp"
#include "geospread/experiment.hpp"
#include "geospread/geodesic.hpp"
#include "geospread/integrate.hpp"
#include "geospread/svg.hpp"
#include "geospread/system.hpp"
#include "geospread/tangent.hpp"
