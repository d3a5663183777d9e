// Experiment runner: integrates Hamiltonian trajectories together with
// tangent-dynamics and geodesic-spread variational flows, certifies the
// relation between the two divergence measures, and emits CSV/SVG artifacts.
//
// Exit codes: 0 success, 1 validation error, 2 numerical failure, 3 I/O error.

#include <atomic>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "geospread/geospread.hpp"

namespace {

int run_command(const std::string& config_path) {
    const auto spec = geospread::parse_config_file(config_path);
    const auto art = geospread::run_experiment(spec);
    std::cout << "kind=" << geospread::to_string(spec.kind) << " output="
              << spec.output_dir.string() << " pass=" << (art.thresholds_pass ? "yes" : "no");
    if (art.singular) std::cout << " singular_flag=1";
    std::cout << "\n";
    return 0;
}

int plot_command(const std::string& csv, const std::string& x, const std::string& y_joined,
                 std::string out) {
    std::vector<std::string> ys;
    std::string cur;
    for (char ch : y_joined) {
        if (ch == ',') {
            if (!cur.empty()) ys.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!cur.empty()) ys.push_back(cur);
    if (out.empty()) out = std::filesystem::path(csv).replace_extension(".svg").string();
    geospread::emit_svg(csv, x, ys, out);
    std::cout << "wrote " << out << "\n";
    return 0;
}

int accept_command(unsigned workers, const std::string& out_dir) {
    auto suite = geospread::acceptance_suite();
    std::vector<geospread::CriterionResult> results(suite.size());
    std::atomic<std::size_t> next{0};
    if (workers == 0) workers = 1;
    workers = std::min<unsigned>(workers, static_cast<unsigned>(suite.size()));

    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&]() {
            for (;;) {
                const std::size_t k = next.fetch_add(1);
                if (k >= suite.size()) return;
                results[k] = geospread::run_criterion(suite[k]);
            }
        });
    for (auto& t : pool) t.join();

    bool all_pass = true;
    for (const auto& r : results) {
        std::cout << r.id << " " << (r.pass ? "PASS" : "FAIL") << " " << r.title << " ["
                  << geospread::detail::fmt_num(r.seconds) << "s] " << r.details << "\n";
        all_pass = all_pass && r.pass;
    }
    std::cout << (all_pass ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL") << " (" << results.size()
              << " criteria)\n";

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        nlohmann::json doc;
        doc["pass"] = all_pass;
        doc["criteria"] = nlohmann::json::array();
        for (const auto& r : results)
            doc["criteria"].push_back({{"id", r.id},
                                       {"title", r.title},
                                       {"pass", r.pass},
                                       {"seconds", r.seconds},
                                       {"details", r.details}});
        std::ofstream out(std::filesystem::path(out_dir) / "acceptance.json");
        if (!out) throw geospread::IoError("cannot write acceptance.json in " + out_dir);
        out << doc.dump(2) << "\n";
    }
    return all_pass ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"geospread: divergence measures for Hamiltonian trajectories under "
                 "time and arc-length parameterizations"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run = app.add_subcommand("run", "run one experiment from a JSON config");
    run->add_option("config", config_path, "experiment config file")->required();

    std::string csv, x_col, y_cols, svg_out;
    auto* plot = app.add_subcommand("plot", "render CSV columns as an SVG line chart");
    plot->add_option("csv", csv, "input CSV file")->required();
    plot->add_option("--x", x_col, "x column name")->required();
    plot->add_option("--y", y_cols, "comma-separated y column names")->required();
    plot->add_option("-o,--out", svg_out, "output SVG path (default: csv with .svg)");

    unsigned workers = 2;
    std::string accept_out;
    auto* accept = app.add_subcommand("accept", "run the full acceptance suite");
    accept->add_option("--workers", workers, "concurrent criteria (default 2)");
    accept->add_option("--out", accept_out, "directory for acceptance.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (run->parsed()) return run_command(config_path);
        if (plot->parsed()) return plot_command(csv, x_col, y_cols, svg_out);
        if (accept->parsed()) return accept_command(workers, accept_out);
    } catch (const geospread::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const geospread::NumericalError& e) {
        std::cerr << "numerical error: " << e.what();
        if (std::isfinite(e.at_time())) std::cerr << " (t = " << e.at_time() << ")";
        std::cerr << "\n";
        return 2;
    } catch (const geospread::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
