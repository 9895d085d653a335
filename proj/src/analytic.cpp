#include "edgecc/analytic.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "edgecc/csv.hpp"
#include "edgecc/errors.hpp"

namespace edgecc::analytic {

namespace {

void check_time(double t) {
    if (!std::isfinite(t) || t < 0.0) {
        throw InvalidTime("time must be finite and >= 0, got " + csv::format_double(t));
    }
}

} // namespace

void FluidParams::validate() const {
    if (!std::isfinite(r0) || r0 <= 0.0) {
        throw InvalidParams("r0 must be finite and > 0, got " + csv::format_double(r0));
    }
    if (!std::isfinite(h0) || h0 < 0.0) {
        throw InvalidParams("h0 must be finite and >= 0, got " + csv::format_double(h0));
    }
    if (!std::isfinite(m_lambda) || m_lambda <= 0.0) {
        throw InvalidParams("m_lambda must be finite and > 0, got " +
                            csv::format_double(m_lambda));
    }
}

double holders_at(const FluidParams& params, double t) {
    params.validate();
    check_time(t);
    if (params.h0 == 0.0) return 0.0; // no seed holders, nothing ever spreads
    const double total = params.r0 + params.h0;
    const double u = std::exp(-params.m_lambda * total * t);
    return params.h0 * total / (params.r0 * u + params.h0);
}

double requesters_at(const FluidParams& params, double t) {
    params.validate();
    check_time(t);
    if (params.h0 == 0.0) return params.r0;
    const double total = params.r0 + params.h0;
    const double u = std::exp(-params.m_lambda * total * t);
    return params.r0 * total * u / (params.r0 * u + params.h0);
}

double delivery_probability(const FluidParams& params, double t) {
    params.validate();
    check_time(t);
    if (params.h0 == 0.0) return 0.0;
    const double total = params.r0 + params.h0;
    const double u = std::exp(-params.m_lambda * total * t);
    return 1.0 - total * u / (params.r0 * u + params.h0);
}

double expected_delay(const FluidParams& params, Deadline deadline) {
    params.validate();
    if (params.h0 == 0.0) {
        throw DegenerateModel(
            "expected_delay is undefined for h0 = 0: the aggregate meeting rate "
            "m_lambda * h0 vanishes and no content is ever delivered");
    }
    if (!std::isfinite(deadline.ttl_s) || deadline.ttl_s < 0.0) {
        throw InvalidTime("deadline ttl must be finite and >= 0, got " +
                          csv::format_double(deadline.ttl_s));
    }
    const double rate = params.m_lambda * params.h0;
    return -std::expm1(-rate * deadline.ttl_s) / rate;
}

std::vector<PopulationState> ode_oracle(const FluidParams& params, double t_end, double step) {
    params.validate();
    check_time(t_end);
    if (!std::isfinite(step) || step <= 0.0) {
        throw InvalidParams("integration step must be finite and > 0, got " +
                            csv::format_double(step));
    }
    if (t_end > 0.0 && step > t_end) {
        throw InvalidParams("integration step " + csv::format_double(step) +
                            " exceeds t_end " + csv::format_double(t_end));
    }

    const double m = params.m_lambda;
    const auto flow = [m](double h, double r) { return m * h * r; };

    std::vector<PopulationState> trajectory;
    trajectory.reserve(static_cast<std::size_t>(t_end / step) + 2);
    double t = 0.0;
    double h = params.h0;
    double r = params.r0;
    trajectory.push_back({t, h, r});

    while (t < t_end) {
        const double dt = std::min(step, t_end - t);
        const double k1 = flow(h, r);
        const double k2 = flow(h + 0.5 * dt * k1, r - 0.5 * dt * k1);
        const double k3 = flow(h + 0.5 * dt * k2, r - 0.5 * dt * k2);
        const double k4 = flow(h + dt * k3, r - dt * k3);
        const double delta = dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        h += delta;
        r -= delta;
        t = (dt == step) ? t + step : t_end;
        trajectory.push_back({t, h, r});
    }
    return trajectory;
}

std::vector<SweepRow> sweep(const std::vector<FluidParams>& params_grid,
                            const std::vector<double>& time_grid) {
    if (params_grid.empty()) throw InvalidParams("empty parameter grid");
    if (time_grid.empty()) throw InvalidParams("empty time grid");

    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<SweepRow> rows;
    rows.reserve(params_grid.size() * time_grid.size());

    for (const FluidParams& params : params_grid) {
        for (double t : time_grid) {
            SweepRow row;
            row.params = params;
            row.t = t;
            try {
                row.holders = holders_at(params, t);
                row.requesters = requesters_at(params, t);
                row.p_dlv = delivery_probability(params, t);
            } catch (const std::exception& e) {
                row.holders = row.requesters = row.p_dlv = row.e_delay_s = nan;
                row.error = e.what();
                rows.push_back(row);
                continue;
            }
            try {
                row.e_delay_s = expected_delay(params, Deadline{t});
            } catch (const DegenerateModel& e) {
                row.e_delay_s = nan;
                row.error = e.what();
            }
            rows.push_back(row);
        }
    }
    return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
    out << "r0,h0,m_lambda,t_s,holders,requesters,p_dlv,e_delay_s\n";
    for (const SweepRow& row : rows) {
        out << csv::format_double(row.params.r0) << ',' << csv::format_double(row.params.h0)
            << ',' << csv::format_double(row.params.m_lambda) << ',' << csv::format_double(row.t)
            << ',' << csv::format_double(row.holders) << ',' << csv::format_double(row.requesters)
            << ',' << csv::format_double(row.p_dlv) << ',' << csv::format_double(row.e_delay_s)
            << '\n';
    }
}

} // namespace edgecc::analytic
