#ifndef EDGECC_ANALYTIC_HPP
#define EDGECC_ANALYTIC_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace edgecc::analytic {

/// Parameters of the fluid-limit dissemination model. The model is
/// continuous, so non-integer populations are accepted here; the stochastic
/// simulator is the one that insists on integer counts.
struct FluidParams {
    double r0 = 0.0;       ///< initial requesters, > 0
    double h0 = 0.0;       ///< initial holders, >= 0
    double m_lambda = 0.0; ///< mean pairwise meeting rate, 1/s, > 0

    /// Throws InvalidParams if any field is out of range or non-finite.
    void validate() const;
};

/// Expected holder/requester counts at one time instant.
struct PopulationState {
    double t = 0.0;
    double h = 0.0;
    double r = 0.0;
};

/// Time-to-live assigned to a delay-tolerant content.
struct Deadline {
    double ttl_s = 0.0;
};

/// Expected number of holders h(t):
///
///   h(t) = h0 * (r0 + h0) * e^x / (r0 + h0 * e^x),   x = m_lambda * (r0 + h0) * t
///
/// Evaluated as h0 * (r0 + h0) / (r0 * e^-x + h0), which stays bounded for
/// any x >= 0, so long horizons cannot overflow.
double holders_at(const FluidParams& params, double t);

/// Expected number of requesters r(t) = r0 * (r0 + h0) / (r0 + h0 * e^x);
/// same overflow-safe evaluation as holders_at. h(t) + r(t) = r0 + h0 holds
/// to a few ulps for all inputs.
double requesters_at(const FluidParams& params, double t);

/// Probability that a random initial requester has received the content by
/// time t:
///
///   P_dlv(t) = 1 - (r0 + h0) / (r0 + h0 * e^x) = 1 - r(t) / r0
///
/// Non-decreasing in t, h0 and m_lambda. Saturates to exactly 1.0 once the
/// exponential underflows (x beyond roughly 745).
double delivery_probability(const FluidParams& params, double t);

/// Expected delivery delay under a deadline, assuming a fixed holder set:
///
///   E[Td | TTL] = (1 - e^(-m_lambda * h0 * TTL)) / (m_lambda * h0)
///
/// Equals E[min(T, TTL)] for T ~ Exponential(m_lambda * h0). Throws
/// DegenerateModel when h0 == 0 (the meeting rate vanishes and the formula
/// has no meaning; callers must not read a silent infinity).
double expected_delay(const FluidParams& params, Deadline deadline);

/// Numerically integrates the mean-field system
///
///   dh/dt = m_lambda * h * r,   dr/dt = -m_lambda * h * r
///
/// with classic fixed-step RK4 from (h0, r0). Returns the trajectory on the
/// grid {0, step, 2*step, ..., t_end} (a shortened final step lands exactly
/// on t_end when it is not a multiple of step). This is the verification
/// oracle for the closed forms above and shares no code with them.
std::vector<PopulationState> ode_oracle(const FluidParams& params, double t_end,
                                        double step = 1.0);

/// One evaluated cell of a parameter sweep. `error` is empty for clean
/// cells; failed cells carry a short reason and NaN in the affected fields
/// (a degenerate expected-delay cell still has valid h/r/p_dlv values).
struct SweepRow {
    FluidParams params;
    double t = 0.0;
    double holders = 0.0;
    double requesters = 0.0;
    double p_dlv = 0.0;
    double e_delay_s = 0.0; ///< t interpreted as the TTL for this column
    std::string error;

    bool ok() const { return error.empty(); }
};

/// Evaluates every (params, t) cell of the grid in row-major order
/// (params outer, times inner). Per-cell failures become flagged rows; the
/// sweep itself never aborts. Empty grids are an error.
std::vector<SweepRow> sweep(const std::vector<FluidParams>& params_grid,
                            const std::vector<double>& time_grid);

/// CSV with header `r0,h0,m_lambda,t_s,holders,requesters,p_dlv,e_delay_s`,
/// one row per cell, '.' decimal separator, '\n' terminated. NaN cells of
/// flagged rows are written as "nan".
void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);

} // namespace edgecc::analytic

#endif // EDGECC_ANALYTIC_HPP
