#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace geospread {

/// Invalid configuration, dimension mismatch or violated precondition.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical failure (blowup, non-finite values, iteration not converging).
/// Carries the simulation time of the failure when one is known.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what,
                            double t = std::numeric_limits<double>::quiet_NaN())
        : std::runtime_error(what), t_(t) {}

    double at_time() const { return t_; }

private:
    double t_;
};

/// Filesystem failure (unwritable directory, missing file).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace geospread
