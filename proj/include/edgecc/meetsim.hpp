#ifndef EDGECC_MEETSIM_HPP
#define EDGECC_MEETSIM_HPP

#include <cstdint>
#include <vector>

#include "edgecc/analytic.hpp"

namespace edgecc::meetsim {

/// Distribution the per-pair meeting rates are drawn from. Every choice has
/// mean m_lambda; `deterministic` sets every pair to exactly m_lambda.
enum class RateDist { deterministic, exponential, gamma };

/// epidemic: a requester that receives the content starts serving it (the
/// population conserves requesters + holders, matching the fluid model).
/// fixed_holders: the holder set never grows (the assumption behind the
/// expected-delay formula).
enum class Mode { epidemic, fixed_holders };

struct MeetingModel {
    int n_requesters = 0; ///< >= 1
    int n_holders = 0;    ///< >= 0
    RateDist rate_dist = RateDist::deterministic;
    double gamma_shape = 1.0; ///< shape k when rate_dist == gamma, > 0
    double m_lambda = 0.0;    ///< mean per-pair meeting rate, 1/s, > 0
    Mode mode = Mode::epidemic;

    void validate() const;
};

enum class Via { edge_meeting, forced_at_deadline };

struct DeliveryRecord {
    int requester_id = 0;
    double delivery_time_s = 0.0;
    Via via = Via::edge_meeting;
};

/// Node ids: requesters are 0..n_requesters-1, the initial holders follow as
/// n_requesters..n_requesters+n_holders-1. A converted requester keeps its
/// id when it starts holding.
struct SimEvent {
    enum class Kind { meeting, deadline_expiry };
    double time_s = 0.0;
    Kind kind = Kind::meeting;
    int requester_id = 0;
    int holder_node = -1; ///< meeting partner; -1 for deadline_expiry
};

struct ReplicationTrace {
    std::vector<DeliveryRecord> records;
    std::vector<SimEvent> events;
};

/// Runs one exact stochastic replication of the meeting process
/// (Gillespie-style: the next meeting fires after an exponential wait with
/// rate equal to the sum of all active requester-holder pair rates, and the
/// pair is chosen proportionally to its rate). Heterogeneous rates are drawn
/// first, then the event dynamics consume the same stream; draw order is
/// fixed (see sample_requester_rate_sums), so identical (model, ttl, seed)
/// give bit-identical results.
///
/// Returns exactly n_requesters records, indexed by requester id: the first
/// meeting with any holder delivers, anyone left at the deadline is forced
/// with delivery_time == ttl.
std::vector<DeliveryRecord> run_replication(const MeetingModel& model, analytic::Deadline ttl,
                                            std::uint64_t seed);

/// Same simulation, additionally recording the event sequence.
ReplicationTrace run_replication_traced(const MeetingModel& model, analytic::Deadline ttl,
                                        std::uint64_t seed);

/// Reproduces the rate draws of run_replication(model, ., seed) and returns,
/// per requester, the sum of its pair rates over the *initial* holders.
/// Draw order: fixed_holders samples requester-major over holders; epidemic
/// samples the full symmetric table in lexicographic (a, b) order, a < b.
std::vector<double> sample_requester_rate_sums(const MeetingModel& model, std::uint64_t seed);

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
};

/// Mean over replications of the edge-delivered fraction, with the standard
/// error of that mean taken across replications. Replication k runs with
/// derive_replication_seed(seed, k); accumulation is in replication-index
/// order, so the result does not depend on how the work is scheduled.
Estimate estimate_delivery_probability(const MeetingModel& model, analytic::Deadline ttl,
                                       int n_replications, std::uint64_t seed);

/// Mean over replications of the per-replication mean delivery delay
/// min(first meeting, ttl); forced deliveries enter at exactly ttl.
Estimate estimate_expected_delay(const MeetingModel& model, analytic::Deadline ttl,
                                 int n_replications, std::uint64_t seed);

} // namespace edgecc::meetsim

#endif // EDGECC_MEETSIM_HPP
