#include "edgecc/harness.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "edgecc/csv.hpp"
#include "edgecc/errors.hpp"
#include "edgecc/rng.hpp"

namespace edgecc::harness {

namespace {

std::vector<double> time_grid(const config::ScenarioConfig& cfg) {
    std::vector<double> grid;
    const long steps = std::lround(cfg.t_max_s / cfg.t_step_s);
    grid.reserve(static_cast<std::size_t>(steps) + 1);
    for (long i = 0; i <= steps; ++i) {
        const double t = static_cast<double>(i) * cfg.t_step_s;
        if (t > cfg.t_max_s) break;
        grid.push_back(t);
    }
    if (grid.empty() || grid.back() < cfg.t_max_s) grid.push_back(cfg.t_max_s);
    return grid;
}

int as_count(double value, const char* what) {
    const double rounded = std::nearbyint(value);
    if (!std::isfinite(value) || value < 0.0 || rounded != value ||
        value > static_cast<double>(std::numeric_limits<int>::max())) {
        throw InvalidParams(std::string("the simulator needs an integer ") + what + ", got " +
                            csv::format_double(value));
    }
    return static_cast<int>(rounded);
}

meetsim::MeetingModel model_for(const config::ScenarioConfig& cfg, double h0,
                                meetsim::Mode mode) {
    meetsim::MeetingModel model;
    model.n_requesters = as_count(cfg.r0, "r0");
    model.n_holders = as_count(h0, "h0");
    model.rate_dist = cfg.rate_dist;
    model.gamma_shape = cfg.gamma_shape.value_or(1.0);
    model.m_lambda = cfg.m_lambda;
    model.mode = mode;
    return model;
}

std::uint64_t require_seed(const config::ScenarioConfig& cfg) {
    if (!cfg.seed.has_value()) {
        throw InvalidParams("this workflow needs sim.seed (or --seed)");
    }
    return *cfg.seed;
}

int require_replications(const config::ScenarioConfig& cfg, int minimum) {
    if (!cfg.replications.has_value()) {
        throw InvalidParams("this workflow needs sim.replications (or --replications)");
    }
    if (*cfg.replications < minimum) {
        throw InvalidParams("need at least " + std::to_string(minimum) +
                            " replications, got " + std::to_string(*cfg.replications));
    }
    return *cfg.replications;
}

std::string opt_cell(const std::optional<double>& v) {
    return v.has_value() ? csv::format_double(*v) : std::string();
}

const char* mode_name(meetsim::Mode mode) {
    return mode == meetsim::Mode::epidemic ? "epidemic" : "fixed-holders";
}

const char* dist_name(meetsim::RateDist dist) {
    switch (dist) {
    case meetsim::RateDist::deterministic: return "deterministic";
    case meetsim::RateDist::exponential: return "exponential";
    case meetsim::RateDist::gamma: return "gamma";
    }
    return "deterministic";
}

} // namespace

std::vector<analytic::SweepRow> sweep_from_config(const config::ScenarioConfig& cfg) {
    std::vector<analytic::FluidParams> params_grid;
    params_grid.reserve(cfg.h0_values.size());
    for (double h0 : cfg.h0_values) {
        params_grid.push_back(analytic::FluidParams{cfg.r0, h0, cfg.m_lambda});
    }
    return analytic::sweep(params_grid, time_grid(cfg));
}

Fig2Table reproduce_fig2(const config::ScenarioConfig& cfg) {
    const std::uint64_t seed = require_seed(cfg);
    const int replications = require_replications(cfg, 1);

    Fig2Table table;
    std::uint64_t cell = 0;
    for (double h0 : cfg.h0_values) {
        const analytic::FluidParams params{cfg.r0, h0, cfg.m_lambda};
        for (double t : time_grid(cfg)) {
            table.rows.push_back(Fig2Row{h0, t, analytic::delivery_probability(params, t),
                                         std::nullopt, std::nullopt});
        }
        for (double ttl : cfg.ttls_s) {
            const auto model = model_for(cfg, h0, cfg.mode);
            const auto est = meetsim::estimate_delivery_probability(
                model, analytic::Deadline{ttl}, replications,
                derive_replication_seed(seed, cell++));
            Fig2Row row;
            row.h0 = h0;
            row.ttl_s = ttl;
            row.p_dlv = analytic::delivery_probability(params, ttl);
            row.sim_estimate = est.value;
            row.sim_se = est.std_error;
            table.rows.push_back(row);
        }
    }
    return table;
}

void write_fig2_csv(const Fig2Table& table, std::ostream& out) {
    out << "h0,ttl_s,p_dlv,sim_estimate,sim_se\n";
    for (const Fig2Row& row : table.rows) {
        out << csv::format_double(row.h0) << ',' << csv::format_double(row.ttl_s) << ','
            << csv::format_double(row.p_dlv) << ',' << opt_cell(row.sim_estimate) << ','
            << opt_cell(row.sim_se) << '\n';
    }
}

Fig3Table reproduce_fig3(const config::ScenarioConfig& cfg) {
    const std::uint64_t seed = require_seed(cfg);
    const int replications = require_replications(cfg, 1);
    const double nan = std::numeric_limits<double>::quiet_NaN();

    Fig3Table table;
    std::uint64_t cell = 0;
    for (double h0 : cfg.h0_values) {
        const analytic::FluidParams params{cfg.r0, h0, cfg.m_lambda};
        const bool degenerate = h0 == 0.0;
        for (double t : time_grid(cfg)) {
            Fig3Row row;
            row.h0 = h0;
            row.ttl_s = t;
            row.degenerate = degenerate;
            row.e_delay_s =
                degenerate ? nan : analytic::expected_delay(params, analytic::Deadline{t});
            table.rows.push_back(row);
        }
        for (double ttl : cfg.ttls_s) {
            Fig3Row row;
            row.h0 = h0;
            row.ttl_s = ttl;
            row.degenerate = degenerate;
            if (degenerate) {
                row.e_delay_s = nan;
            } else {
                row.e_delay_s = analytic::expected_delay(params, analytic::Deadline{ttl});
                const auto model = model_for(cfg, h0, meetsim::Mode::fixed_holders);
                const auto est = meetsim::estimate_expected_delay(
                    model, analytic::Deadline{ttl}, replications,
                    derive_replication_seed(seed, cell++));
                row.sim_estimate_s = est.value;
                row.sim_se_s = est.std_error;
            }
            table.rows.push_back(row);
        }
    }
    return table;
}

void write_fig3_csv(const Fig3Table& table, std::ostream& out) {
    out << "h0,ttl_s,e_delay_s,sim_estimate_s,sim_se_s\n";
    for (const Fig3Row& row : table.rows) {
        out << csv::format_double(row.h0) << ',' << csv::format_double(row.ttl_s) << ','
            << csv::format_double(row.e_delay_s) << ',' << opt_cell(row.sim_estimate_s) << ','
            << opt_cell(row.sim_se_s) << '\n';
    }
}

ValidationReport validate(const config::ScenarioConfig& cfg) {
    const std::uint64_t seed = require_seed(cfg);
    const int replications = require_replications(cfg, 100);

    ValidationReport report;
    report.all_pass = true;
    std::uint64_t cell_index = 0;

    for (double h0 : cfg.h0_values) {
        const analytic::FluidParams params{cfg.r0, h0, cfg.m_lambda};
        for (double ttl : cfg.ttls_s) {
            // Epidemic delivery probability against the fluid limit. The
            // tolerance floor absorbs the finite-population bias; the bias
            // column reports what was actually measured.
            {
                ValidationCell cell;
                cell.metric = "p_dlv";
                cell.mode = meetsim::Mode::epidemic;
                cell.h0 = h0;
                cell.ttl_s = ttl;
                cell.analytic = analytic::delivery_probability(params, ttl);
                const auto est = meetsim::estimate_delivery_probability(
                    model_for(cfg, h0, meetsim::Mode::epidemic), analytic::Deadline{ttl},
                    replications, derive_replication_seed(seed, cell_index++));
                cell.estimate = est.value;
                cell.std_error = est.std_error;
                cell.bias = cell.estimate - cell.analytic;
                cell.tolerance = std::max(0.05, 3.0 * cell.std_error);
                cell.pass = std::fabs(cell.bias) <= cell.tolerance;
                if (!cell.pass) report.all_pass = false;
                report.cells.push_back(cell);
            }
            // Fixed-holders expected delay against the closed form, which
            // the simulator should reproduce exactly in distribution.
            {
                ValidationCell cell;
                cell.metric = "e_delay_s";
                cell.mode = meetsim::Mode::fixed_holders;
                cell.h0 = h0;
                cell.ttl_s = ttl;
                if (h0 == 0.0) {
                    cell.degenerate = true;
                    cell.analytic = std::numeric_limits<double>::quiet_NaN();
                } else {
                    cell.analytic = analytic::expected_delay(params, analytic::Deadline{ttl});
                    const auto est = meetsim::estimate_expected_delay(
                        model_for(cfg, h0, meetsim::Mode::fixed_holders), analytic::Deadline{ttl},
                        replications, derive_replication_seed(seed, cell_index++));
                    cell.estimate = est.value;
                    cell.std_error = est.std_error;
                    cell.bias = cell.estimate - cell.analytic;
                    cell.tolerance = 0.02 * cell.analytic;
                    cell.pass = std::fabs(cell.bias) <= cell.tolerance;
                    if (!cell.pass) report.all_pass = false;
                }
                report.cells.push_back(cell);
            }
        }
    }
    return report;
}

void write_validation_csv(const ValidationReport& report, std::ostream& out) {
    out << "metric,mode,h0,ttl_s,analytic,estimate,std_error,bias,tolerance,status\n";
    for (const ValidationCell& cell : report.cells) {
        out << cell.metric << ',' << mode_name(cell.mode) << ',' << csv::format_double(cell.h0)
            << ',' << csv::format_double(cell.ttl_s) << ',' << csv::format_double(cell.analytic)
            << ',' << csv::format_double(cell.estimate) << ','
            << csv::format_double(cell.std_error) << ',' << csv::format_double(cell.bias) << ','
            << csv::format_double(cell.tolerance) << ','
            << (cell.degenerate ? "degenerate" : (cell.pass ? "pass" : "fail")) << '\n';
    }
}

void write_trace_csv(int replication, const std::vector<meetsim::DeliveryRecord>& records,
                     std::ostream& out, bool with_header) {
    if (with_header) out << "replication,requester_id,delivery_time_s,via\n";
    for (const auto& rec : records) {
        out << replication << ',' << rec.requester_id << ','
            << csv::format_double(rec.delivery_time_s) << ','
            << (rec.via == meetsim::Via::edge_meeting ? "edge-meeting" : "forced-at-deadline")
            << '\n';
    }
}

std::vector<SimulationRow> simulate_from_config(const config::ScenarioConfig& cfg,
                                                std::ostream* trace_out) {
    const std::uint64_t seed = require_seed(cfg);
    const int replications = require_replications(cfg, 1);

    std::vector<SimulationRow> rows;
    std::uint64_t cell = 0;
    bool first_trace = true;
    for (double h0 : cfg.h0_values) {
        const auto model = model_for(cfg, h0, cfg.mode);
        for (double ttl : cfg.ttls_s) {
            const std::uint64_t cell_seed = derive_replication_seed(seed, cell++);
            SimulationRow row;
            row.h0 = h0;
            row.ttl_s = ttl;
            row.p_dlv = meetsim::estimate_delivery_probability(model, analytic::Deadline{ttl},
                                                               replications, cell_seed);
            row.delay_s = meetsim::estimate_expected_delay(model, analytic::Deadline{ttl},
                                                           replications, cell_seed);
            rows.push_back(row);
            if (trace_out != nullptr) {
                for (int k = 0; k < replications; ++k) {
                    const auto records = meetsim::run_replication(
                        model, analytic::Deadline{ttl},
                        derive_replication_seed(cell_seed, static_cast<std::uint64_t>(k)));
                    write_trace_csv(k, records, *trace_out, first_trace);
                    first_trace = false;
                }
            }
        }
    }
    return rows;
}

void write_simulation_csv(const config::ScenarioConfig& cfg,
                          const std::vector<SimulationRow>& rows, std::ostream& out) {
    out << "h0,ttl_s,mode,rate_dist,replications,p_dlv,p_dlv_se,delay_s,delay_se_s\n";
    for (const SimulationRow& row : rows) {
        out << csv::format_double(row.h0) << ',' << csv::format_double(row.ttl_s) << ','
            << mode_name(cfg.mode) << ',' << dist_name(cfg.rate_dist) << ','
            << cfg.replications.value_or(0) << ',' << csv::format_double(row.p_dlv.value) << ','
            << csv::format_double(row.p_dlv.std_error) << ','
            << csv::format_double(row.delay_s.value) << ','
            << csv::format_double(row.delay_s.std_error) << '\n';
    }
}

} // namespace edgecc::harness
