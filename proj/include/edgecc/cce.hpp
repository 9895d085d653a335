#ifndef EDGECC_CCE_HPP
#define EDGECC_CCE_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

namespace edgecc::cce {

enum class TrafficClass { delay_tolerant, delay_sensitive };

enum class ItemStatus { pending, buffered, delivered_edge, delivered_forced };

struct ContentItem {
    std::uint64_t id = 0;
    double size_bits = 0.0;
    TrafficClass traffic_class = TrafficClass::delay_tolerant;
    double created_at_s = 0.0;
    double deadline_at_s = 0.0; ///< absolute; set by classify
    ItemStatus status = ItemStatus::pending;
};

/// Static class -> TTL map standing in for packet inspection: traffic
/// arrives pre-labeled and delay-tolerant items draw their deadline from
/// here. Delay-sensitive items always get deadline == creation time.
struct ClassPolicy {
    std::map<TrafficClass, double> ttl_s;
};

/// Stamps deadline_at_s on a pending item. Throws UnknownClass when a
/// delay-tolerant item has no TTL entry in the policy.
ContentItem classify(ContentItem item, const ClassPolicy& policy);

/// RAN condition with hysteresis. The congested flag flips on only when
/// utilization exceeds theta_high and off only when it drops below
/// theta_low; inside the band the previous state sticks.
struct RanState {
    double capacity_bps = 0.0;
    double offered_load_bps = 0.0;
    bool congested = false;
    double theta_high = 0.9;
    double theta_low = 0.7;

    void validate() const;
};

/// Pure hysteresis update: returns the state with offered_load_bps recorded
/// and the congested flag re-evaluated. Utilization above 1 is just another
/// value above theta_high; negative loads clamp to zero.
RanState detect_congestion(RanState ran, double offered_load_bps);

/// Piecewise-constant delay-sensitive arrival rate plus the schedule of
/// delay-tolerant content arrivals. Segments must be contiguous, span
/// [0, horizon], and carry non-negative rates.
struct LoadSegment {
    double t_start_s = 0.0;
    double t_end_s = 0.0;
    double rate_bps = 0.0;

    bool operator==(const LoadSegment&) const = default;
};

struct LoadProfile {
    std::vector<LoadSegment> ds_segments;
    std::vector<ContentItem> dt_arrivals; ///< pending items, sorted by created_at_s
    double horizon_s = 0.0;

    void validate() const;
};

/// Canned profiles, parameterized by link capacity so the shapes stay put
/// when capacity changes. peak_hour: a busy plateau with a higher crest and
/// steady DT arrivals, sized so redirected content is forced into a lower
/// load window than it would have hit untouched. zero_dt: the same
/// delay-sensitive shape with no DT at all. all_dt: no delay-sensitive
/// floor, DT bursts alone drive the congestion.
LoadProfile make_peak_hour_profile(double capacity_bps);
LoadProfile make_zero_dt_profile(double capacity_bps);
LoadProfile make_all_dt_profile(double capacity_bps);

struct CceAction {
    enum class Kind {
        pass_ran,             ///< item transmitted directly (not congested, or delay-sensitive)
        buffer,               ///< delay-tolerant item redirected to the edge buffer
        overflow_passthrough, ///< buffer full; item sent to the RAN instead
        deliver_edge,         ///< buffered item drained after congestion relief
        deliver_forced        ///< buffered item pushed out at its deadline
    };
    Kind kind = Kind::pass_ran;
    std::uint64_t item_id = 0;
    double time_s = 0.0;
    bool congested = false; ///< flag state at the moment of the action
};

struct CceEvent {
    enum class Kind { load_change, arrival, clock_tick };
    Kind kind = Kind::clock_tick;
    double time_s = 0.0;
    double ds_rate_bps = 0.0; ///< load_change only
    ContentItem item;         ///< arrival only; must already be classified
};

/// Buffered content, earliest deadline first, ties by id. Draining may span
/// ticks, so the head item tracks how many bits are still untransmitted;
/// occupancy counts remaining bits only.
struct BufferedItem {
    ContentItem item;
    double remaining_bits = 0.0;
};

struct EdgeBuffer {
    double capacity_bits = 0.0; ///< <= 0 means unbounded
    std::map<std::pair<double, std::uint64_t>, BufferedItem> contents; ///< key (deadline, id)
    double occupancy_bits = 0.0;
};

/// Full engine state. Tick accounting:
///
///  - The congested flag for tick [t, t+tick) is set at t from the previous
///    tick's offered demand (delay-sensitive rate plus every DT arrival,
///    i.e. what the RAN would carry with no engine), so monitoring lags
///    reality by one tick, as a measurement loop does.
///  - Arrivals are routed at their exact time using the current flag.
///  - A buffered item still in the buffer at deadline_at_s - guard_s is
///    transmitted in full at that instant (deliver_forced).
///  - When a tick closes with the flag off and the buffer non-empty, the
///    buffer drains earliest-deadline-first at
///        drain_headroom * max(0, theta_high * capacity - tick demand)
///    bits per tick, attributed to the closing tick; the cap keeps drain
///    ticks at or below the congestion threshold. Partial transmissions
///    carry over.
struct CceConfig {
    double capacity_bps = 1e7;
    double theta_high = 0.9;
    double theta_low = 0.7;
    double drain_headroom = 0.8;
    double guard_s = 0.0;
    double buffer_bits = 0.0; ///< <= 0 means unbounded
    double tick_s = 1.0;

    void validate() const;
};

struct CceState {
    CceConfig config;
    RanState ran;
    EdgeBuffer buffer;
    double now_s = 0.0;
    double ds_rate_bps = 0.0;
    double tick_start_s = 0.0;
    double tick_load_bits = 0.0;   ///< bits actually offered to the RAN this tick
    double tick_demand_bits = 0.0; ///< bits the baseline would have offered
    // Cumulative counters.
    long buffered_count = 0;
    long forced_count = 0;
    long edge_count = 0;
    long overflow_count = 0;
    long miss_count = 0;
    double total_buffered_bits = 0.0;
    // Utilization of the most recently closed tick, for metrics readers.
    bool has_closed_tick = false;
    double last_tick_start_s = 0.0;
    double last_baseline_util = 0.0;
    double last_cce_util = 0.0;
};

CceState make_state(const CceConfig& config);

/// Applies one event and returns the actions it produced, in order. Buffered
/// deadlines falling before the event fire first, at their exact times.
/// Throws ClockRegression if the event time precedes the engine clock.
/// Single writer: one owner applies events in time order.
std::vector<CceAction> step(CceState& state, const CceEvent& event);

struct TickRow {
    double t_s = 0.0; ///< tick start
    double baseline_util = 0.0;
    double cce_util = 0.0;
    double buffer_occupancy_bits = 0.0;
    long forced_count_cum = 0;
    long edge_count_cum = 0;
};

struct ScenarioMetrics {
    std::vector<TickRow> series;
    std::vector<CceAction> actions;
    double peak_baseline_util = 0.0;
    double peak_cce_util = 0.0;
    double total_buffered_bits = 0.0;
    long buffered_count = 0;
    long forced_count = 0;
    long edge_count = 0;
    long overflow_count = 0;
    long deadline_miss_count = 0;
    long buffered_at_end = 0; ///< items whose deadline lies beyond the horizon
};

/// Simulates [0, horizon] on the configured tick, classifying DT arrivals
/// with `policy` and feeding the engine; the pass-through baseline trace is
/// the demand series of the same run, so both columns come from one pass.
ScenarioMetrics run_scenario(const LoadProfile& profile, const CceConfig& config,
                             const ClassPolicy& policy);

/// CSV: `t_s,baseline_util,cce_util,buffer_occupancy_bits,forced_count_cum,edge_count_cum`.
void write_timeseries_csv(const ScenarioMetrics& metrics, std::ostream& out);

/// Single-row CSV with peak utilizations, total buffered bytes and counters.
void write_summary_csv(const ScenarioMetrics& metrics, std::ostream& out);

} // namespace edgecc::cce

#endif // EDGECC_CCE_HPP
