// topocount: run, sweep and plot source-count experiments.
//
// Exit codes: 0 success (whatever the estimate), 1 config or input error,
// 2 runtime or numerical error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "topocount/topocount.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

bool is_config_error(topocount::Errc code) {
    using topocount::Errc;
    return code == Errc::ConfigError || code == Errc::ParseError || code == Errc::UnknownAxis;
}

std::vector<double> parse_values(const std::string& list) {
    std::vector<double> values;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) {
            continue;
        }
        values.push_back(topocount::detail::parse_double(item, 1));
    }
    return values;
}

int cmd_run(const std::string& config_path) {
    const auto config = topocount::load_config(config_path);
    const auto report = topocount::run_experiment(config);
    const auto& est = report.result.topological.estimate;
    std::cout << "topological: " << topocount::to_string(est.status);
    if (est.n) {
        std::cout << " n=" << *est.n;
    }
    std::cout << "  betti=" << topocount::json(est.betti_observed.betti).dump() << "\n";
    std::cout << "mdl: " << report.result.mdl << "  aic: " << report.result.aic << "\n";
    std::cout << "full column rank: " << (report.result.independence.full_column_rank ? "yes" : "no") << "\n";
    std::cout << "report: " << report.report_path.string() << "\n";
    return kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::string& axis, const std::string& values,
              std::size_t reps) {
    const auto config = topocount::load_config(config_path);
    const auto cells = topocount::sweep(config, axis, parse_values(values), reps);
    const auto csv = topocount::sweep_to_csv(axis, cells);
    const auto dir = topocount::resolve_output_dir(config);
    std::filesystem::create_directories(dir);
    const auto path = dir / ("sweep_" + axis + ".csv");
    topocount::detail::write_text(path, csv);
    std::cout << csv;
    std::cerr << "wrote " << path.string() << "\n";
    return kExitOk;
}

int cmd_plot(const std::string& csv_path, const std::string& output, double fraction) {
    std::optional<std::filesystem::path> target;
    if (!output.empty()) {
        target = output;
    }
    std::cout << topocount::plot_barcode(csv_path, target, fraction).string() << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Topological source-count estimation for monocomponent mixtures"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run = app.add_subcommand("run", "Run one experiment and write report.json, barcode.csv and barcode.svg");
    run->add_option("config", config_path, "Experiment config (JSON)")->required();

    std::string axis;
    std::string values;
    std::size_t reps = 1;
    auto* sw = app.add_subcommand("sweep", "Repeat an experiment over values of one numeric config field");
    sw->add_option("config", config_path, "Experiment config (JSON)")->required();
    sw->add_option("--axis", axis, "Config field to vary")->required();
    sw->add_option("--values", values, "Comma-separated values (may be empty)")->required();
    sw->add_option("--reps", reps, "Repetitions per value")->check(CLI::NonNegativeNumber);

    std::string csv_path;
    std::string output;
    double fraction = 0.5;
    auto* plot = app.add_subcommand("plot", "Render a barcode CSV as SVG");
    plot->add_option("barcode", csv_path, "Barcode CSV")->required();
    plot->add_option("-o,--output", output, "SVG path (default: next to the CSV)");
    plot->add_option("--fraction", fraction, "Persistence fraction marker")->check(CLI::Range(0.0, 1.0));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*run) {
            return cmd_run(config_path);
        }
        if (*sw) {
            return cmd_sweep(config_path, axis, values, reps);
        }
        return cmd_plot(csv_path, output, fraction);
    } catch (const topocount::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return is_config_error(e.code()) ? kExitConfig : kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
