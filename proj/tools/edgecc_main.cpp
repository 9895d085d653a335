#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "edgecc/config.hpp"
#include "edgecc/csv.hpp"
#include "edgecc/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidationFailed = 1;
constexpr int kExitUsage = 2;

struct CommonOptions {
    std::string config_path;
    std::string out_path; ///< empty = stdout
    std::optional<std::uint64_t> seed;
    std::optional<int> replications;
    bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--config", opts.config_path, "scenario config file")->required();
    cmd->add_option("--out", opts.out_path, "output CSV path (default: stdout)");
    cmd->add_option("--seed", opts.seed, "override sim.seed");
    cmd->add_option("--replications", opts.replications, "override sim.replications");
    cmd->add_flag("--quiet", opts.quiet, "suppress the stderr summary line");
}

/// Loads and validates the config, applying command-line overrides with the
/// same constraints the file parser enforces.
int load_config(const CommonOptions& opts, edgecc::config::ScenarioConfig& cfg) {
    auto result = edgecc::config::load_config(opts.config_path);
    if (!result.ok()) {
        for (const auto& error : result.errors) {
            std::cerr << opts.config_path << ": " << error.to_string() << "\n";
        }
        return kExitUsage;
    }
    cfg = *result.config;
    if (opts.seed.has_value()) cfg.seed = *opts.seed;
    if (opts.replications.has_value()) {
        if (*opts.replications < 1) {
            std::cerr << "--replications must be >= 1\n";
            return kExitUsage;
        }
        cfg.replications = *opts.replications;
    }
    return kExitOk;
}

class OutputSink {
public:
    explicit OutputSink(const std::string& path) : path_(path) {
        if (!path_.empty()) {
            file_.open(path_, std::ios::binary);
        }
    }

    bool ok() const { return path_.empty() || file_.is_open(); }
    std::ostream& stream() { return path_.empty() ? std::cout : file_; }
    std::string name() const { return path_.empty() ? "<stdout>" : path_; }

private:
    std::string path_;
    std::ofstream file_;
};

std::string summary_path(const std::string& out_path) {
    const std::size_t dot = out_path.rfind('.');
    const std::size_t slash = out_path.find_last_of("/\\");
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
        return out_path + "_summary.csv";
    }
    return out_path.substr(0, dot) + "_summary" + out_path.substr(dot);
}

int run_analytic(const CommonOptions& opts) {
    edgecc::config::ScenarioConfig cfg;
    if (const int rc = load_config(opts, cfg); rc != kExitOk) return rc;
    const auto rows = edgecc::harness::sweep_from_config(cfg);
    OutputSink sink(opts.out_path);
    if (!sink.ok()) {
        std::cerr << "cannot open " << opts.out_path << " for writing\n";
        return kExitUsage;
    }
    edgecc::analytic::write_sweep_csv(rows, sink.stream());
    if (!opts.quiet) {
        std::cerr << "analytic: " << rows.size() << " rows -> " << sink.name() << "\n";
    }
    return kExitOk;
}

int run_simulate(const CommonOptions& opts) {
    edgecc::config::ScenarioConfig cfg;
    if (const int rc = load_config(opts, cfg); rc != kExitOk) return rc;

    std::ofstream trace_file;
    std::ostream* trace = nullptr;
    if (cfg.trace_out.has_value()) {
        trace_file.open(*cfg.trace_out, std::ios::binary);
        if (!trace_file.is_open()) {
            std::cerr << "cannot open trace file " << *cfg.trace_out << "\n";
            return kExitUsage;
        }
        trace = &trace_file;
    }

    const auto rows = edgecc::harness::simulate_from_config(cfg, trace);
    OutputSink sink(opts.out_path);
    if (!sink.ok()) {
        std::cerr << "cannot open " << opts.out_path << " for writing\n";
        return kExitUsage;
    }
    edgecc::harness::write_simulation_csv(cfg, rows, sink.stream());
    if (!opts.quiet) {
        std::cerr << "simulate: " << rows.size() << " cells, " << *cfg.replications
                  << " replications each -> " << sink.name() << "\n";
    }
    return kExitOk;
}

int run_cce(const CommonOptions& opts) {
    edgecc::config::ScenarioConfig cfg;
    if (const int rc = load_config(opts, cfg); rc != kExitOk) return rc;

    const auto profile = edgecc::config::profile_from_config(cfg);
    edgecc::cce::ClassPolicy policy;
    policy.ttl_s[edgecc::cce::TrafficClass::delay_tolerant] = cfg.dt_ttl_s;
    const auto metrics =
        edgecc::cce::run_scenario(profile, edgecc::config::cce_config_from(cfg), policy);

    OutputSink sink(opts.out_path);
    if (!sink.ok()) {
        std::cerr << "cannot open " << opts.out_path << " for writing\n";
        return kExitUsage;
    }
    edgecc::cce::write_timeseries_csv(metrics, sink.stream());
    if (opts.out_path.empty()) {
        sink.stream() << "\n";
        edgecc::cce::write_summary_csv(metrics, sink.stream());
    } else {
        std::ofstream summary(summary_path(opts.out_path), std::ios::binary);
        if (!summary.is_open()) {
            std::cerr << "cannot open " << summary_path(opts.out_path) << " for writing\n";
            return kExitUsage;
        }
        edgecc::cce::write_summary_csv(metrics, summary);
    }
    if (!opts.quiet) {
        std::cerr << "cce: peak util " << edgecc::csv::format_double(metrics.peak_cce_util)
                  << " vs baseline " << edgecc::csv::format_double(metrics.peak_baseline_util)
                  << ", " << metrics.deadline_miss_count << " deadline misses -> " << sink.name()
                  << "\n";
    }
    return kExitOk;
}

int run_validate(const CommonOptions& opts) {
    edgecc::config::ScenarioConfig cfg;
    if (const int rc = load_config(opts, cfg); rc != kExitOk) return rc;

    const auto report = edgecc::harness::validate(cfg);
    OutputSink sink(opts.out_path);
    if (!sink.ok()) {
        std::cerr << "cannot open " << opts.out_path << " for writing\n";
        return kExitUsage;
    }
    edgecc::harness::write_validation_csv(report, sink.stream());
    if (!opts.quiet) {
        long failed = 0;
        for (const auto& cell : report.cells) {
            if (!cell.degenerate && !cell.pass) ++failed;
        }
        std::cerr << "validate: " << report.cells.size() << " cells, " << failed
                  << " failing -> " << sink.name() << "\n";
    }
    return report.all_pass ? kExitOk : kExitValidationFailed;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"edge-assisted congestion control toolkit"};
    app.require_subcommand(1);

    CommonOptions analytic_opts;
    CommonOptions simulate_opts;
    CommonOptions cce_opts;
    CommonOptions validate_opts;

    add_common(app.add_subcommand("analytic", "closed-form dissemination sweep"), analytic_opts);
    add_common(app.add_subcommand("simulate", "Monte-Carlo meeting-process estimates"),
               simulate_opts);
    add_common(app.add_subcommand("cce", "congestion-control scenario run"), cce_opts);
    add_common(app.add_subcommand("validate", "simulator-versus-closed-form report"),
               validate_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << "\n";
        return kExitUsage;
    }

    try {
        if (app.got_subcommand("analytic")) return run_analytic(analytic_opts);
        if (app.got_subcommand("simulate")) return run_simulate(simulate_opts);
        if (app.got_subcommand("cce")) return run_cce(cce_opts);
        return run_validate(validate_opts);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}
