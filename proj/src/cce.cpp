#include "edgecc/cce.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "edgecc/csv.hpp"
#include "edgecc/errors.hpp"

namespace edgecc::cce {

namespace {

void check_finite_nonneg(double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0) {
        throw InvalidParams(std::string(name) + " must be finite and >= 0, got " +
                            csv::format_double(v));
    }
}

void check_thresholds(double theta_low, double theta_high) {
    if (!std::isfinite(theta_low) || !std::isfinite(theta_high) || theta_low <= 0.0 ||
        theta_high > 1.0 || theta_low > theta_high) {
        throw InvalidParams("hysteresis thresholds must satisfy 0 < theta_low <= theta_high <= 1, "
                            "got theta_low=" +
                            csv::format_double(theta_low) +
                            " theta_high=" + csv::format_double(theta_high));
    }
}

double forced_time(const BufferedItem& buffered, double guard_s) {
    return buffered.item.deadline_at_s - guard_s;
}

/// Transmits all still-buffered items whose forced-delivery time has been
/// reached, at their exact times, earliest deadline first.
void flush_forced(CceState& state, double limit_s, bool inclusive,
                  std::vector<CceAction>& actions) {
    auto& contents = state.buffer.contents;
    while (!contents.empty()) {
        auto head = contents.begin();
        const double at = forced_time(head->second, state.config.guard_s);
        if (inclusive ? (at > limit_s) : (at >= limit_s)) break;
        const double when = std::max(at, state.now_s);
        state.tick_load_bits += head->second.remaining_bits;
        state.buffer.occupancy_bits -= head->second.remaining_bits;
        state.forced_count += 1;
        if (when > head->second.item.deadline_at_s + 1e-9) state.miss_count += 1;
        actions.push_back(CceAction{CceAction::Kind::deliver_forced, head->second.item.id, when,
                                    state.ran.congested});
        contents.erase(head);
    }
    if (contents.empty()) state.buffer.occupancy_bits = 0.0;
}

/// Advances the delay-sensitive integration up to `t`.
void integrate_ds(CceState& state, double t) {
    if (t <= state.now_s) return;
    const double bits = state.ds_rate_bps * (t - state.now_s);
    state.tick_load_bits += bits;
    state.tick_demand_bits += bits;
    state.now_s = t;
}

void close_tick(CceState& state, double t, std::vector<CceAction>& actions) {
    const double window_s = t - state.tick_start_s;
    if (window_s <= 0.0) return;

    const double capacity = state.config.capacity_bps;

    // Drain earliest-deadline-first while the window ran uncongested, capped
    // so the drained tick stays at or below the congestion threshold.
    if (!state.ran.congested && !state.buffer.contents.empty()) {
        double budget = state.config.drain_headroom *
                        std::max(0.0, state.config.theta_high * capacity * window_s -
                                          state.tick_demand_bits);
        auto& contents = state.buffer.contents;
        while (budget > 0.0 && !contents.empty()) {
            auto head = contents.begin();
            const double tx = std::min(budget, head->second.remaining_bits);
            head->second.remaining_bits -= tx;
            state.buffer.occupancy_bits -= tx;
            state.tick_load_bits += tx;
            budget -= tx;
            if (head->second.remaining_bits > 0.0) break; // budget exhausted mid-item
            state.edge_count += 1;
            actions.push_back(
                CceAction{CceAction::Kind::deliver_edge, head->second.item.id, t, false});
            contents.erase(head);
        }
        if (contents.empty()) state.buffer.occupancy_bits = 0.0;
    }

    state.last_tick_start_s = state.tick_start_s;
    state.last_baseline_util = state.tick_demand_bits / (capacity * window_s);
    state.last_cce_util = state.tick_load_bits / (capacity * window_s);
    state.has_closed_tick = true;

    state.ran = detect_congestion(state.ran, state.tick_demand_bits / window_s);

    state.tick_start_s = t;
    state.tick_load_bits = 0.0;
    state.tick_demand_bits = 0.0;
}

void route_arrival(CceState& state, const ContentItem& item, std::vector<CceAction>& actions) {
    if (item.status != ItemStatus::pending) {
        throw InvalidParams("arriving item " + std::to_string(item.id) + " is not pending");
    }
    if (!std::isfinite(item.size_bits) || item.size_bits < 0.0) {
        throw InvalidParams("arriving item " + std::to_string(item.id) + " has invalid size");
    }
    const double t = state.now_s;

    if (item.traffic_class == TrafficClass::delay_sensitive) {
        state.tick_load_bits += item.size_bits;
        state.tick_demand_bits += item.size_bits;
        actions.push_back(CceAction{CceAction::Kind::pass_ran, item.id, t, state.ran.congested});
        return;
    }

    // Delay-tolerant: always part of the baseline demand, redirected only
    // while the RAN is congested.
    state.tick_demand_bits += item.size_bits;
    if (!state.ran.congested) {
        state.tick_load_bits += item.size_bits;
        state.edge_count += 1;
        actions.push_back(CceAction{CceAction::Kind::pass_ran, item.id, t, false});
        return;
    }

    const double cap = state.buffer.capacity_bits;
    if (cap > 0.0 && state.buffer.occupancy_bits + item.size_bits > cap) {
        state.tick_load_bits += item.size_bits;
        state.overflow_count += 1;
        state.edge_count += 1;
        actions.push_back(
            CceAction{CceAction::Kind::overflow_passthrough, item.id, t, true});
        return;
    }

    BufferedItem buffered;
    buffered.item = item;
    buffered.item.status = ItemStatus::buffered;
    buffered.remaining_bits = item.size_bits;
    state.buffer.contents.emplace(std::make_pair(item.deadline_at_s, item.id), buffered);
    state.buffer.occupancy_bits += item.size_bits;
    state.buffered_count += 1;
    state.total_buffered_bits += item.size_bits;
    actions.push_back(CceAction{CceAction::Kind::buffer, item.id, t, true});

    // A deadline already due (e.g. zero TTL) fires on the spot.
    flush_forced(state, t, true, actions);
}

} // namespace

ContentItem classify(ContentItem item, const ClassPolicy& policy) {
    if (item.status != ItemStatus::pending) {
        throw InvalidParams("classify requires a pending item");
    }
    if (item.traffic_class == TrafficClass::delay_sensitive) {
        item.deadline_at_s = item.created_at_s; // no tolerance by definition
        return item;
    }
    const auto it = policy.ttl_s.find(item.traffic_class);
    if (it == policy.ttl_s.end()) {
        throw UnknownClass("no TTL policy entry for the item's traffic class");
    }
    if (!std::isfinite(it->second) || it->second < 0.0) {
        throw InvalidParams("policy TTL must be finite and >= 0");
    }
    item.deadline_at_s = item.created_at_s + it->second;
    return item;
}

void RanState::validate() const {
    if (!std::isfinite(capacity_bps) || capacity_bps <= 0.0) {
        throw InvalidParams("RAN capacity must be finite and > 0");
    }
    check_thresholds(theta_low, theta_high);
}

RanState detect_congestion(RanState ran, double offered_load_bps) {
    ran.validate();
    ran.offered_load_bps = std::max(0.0, offered_load_bps);
    const double util = ran.offered_load_bps / ran.capacity_bps;
    if (!ran.congested && util > ran.theta_high) {
        ran.congested = true;
    } else if (ran.congested && util < ran.theta_low) {
        ran.congested = false;
    }
    return ran;
}

void LoadProfile::validate() const {
    if (!std::isfinite(horizon_s) || horizon_s <= 0.0) {
        throw InvalidParams("profile horizon must be finite and > 0");
    }
    if (ds_segments.empty()) {
        throw InvalidParams("profile needs at least one load segment");
    }
    double cursor = 0.0;
    for (const LoadSegment& seg : ds_segments) {
        if (seg.t_start_s != cursor) {
            throw InvalidParams("load segments must tile [0, horizon] without gaps; segment "
                                "starting at " +
                                csv::format_double(seg.t_start_s) + " expected to start at " +
                                csv::format_double(cursor));
        }
        if (!(seg.t_end_s > seg.t_start_s)) {
            throw InvalidParams("load segment must have positive length");
        }
        check_finite_nonneg(seg.rate_bps, "segment rate");
        cursor = seg.t_end_s;
    }
    if (cursor != horizon_s) {
        throw InvalidParams("load segments end at " + csv::format_double(cursor) +
                            " but the horizon is " + csv::format_double(horizon_s));
    }
    double last_arrival = 0.0;
    for (const ContentItem& item : dt_arrivals) {
        if (item.traffic_class != TrafficClass::delay_tolerant) {
            throw InvalidParams("profile arrival schedule may only carry delay-tolerant items");
        }
        if (!std::isfinite(item.created_at_s) || item.created_at_s < 0.0 ||
            item.created_at_s > horizon_s) {
            throw InvalidParams("arrival time outside [0, horizon]");
        }
        if (item.created_at_s < last_arrival) {
            throw InvalidParams("arrival schedule must be sorted by creation time");
        }
        if (!std::isfinite(item.size_bits) || item.size_bits <= 0.0) {
            throw InvalidParams("arrival size must be finite and > 0");
        }
        last_arrival = item.created_at_s;
    }
}

void CceConfig::validate() const {
    if (!std::isfinite(capacity_bps) || capacity_bps <= 0.0) {
        throw InvalidParams("capacity_bps must be finite and > 0");
    }
    check_thresholds(theta_low, theta_high);
    if (!std::isfinite(drain_headroom) || drain_headroom <= 0.0 || drain_headroom > 1.0) {
        throw InvalidParams("drain_headroom must be in (0, 1]");
    }
    check_finite_nonneg(guard_s, "guard_s");
    if (!std::isfinite(tick_s) || tick_s <= 0.0) {
        throw InvalidParams("tick_s must be finite and > 0");
    }
}

CceState make_state(const CceConfig& config) {
    config.validate();
    CceState state;
    state.config = config;
    state.ran.capacity_bps = config.capacity_bps;
    state.ran.theta_high = config.theta_high;
    state.ran.theta_low = config.theta_low;
    state.buffer.capacity_bits = config.buffer_bits;
    return state;
}

std::vector<CceAction> step(CceState& state, const CceEvent& event) {
    if (event.time_s < state.now_s) {
        throw ClockRegression("event at t=" + csv::format_double(event.time_s) +
                              " precedes the engine clock t=" +
                              csv::format_double(state.now_s));
    }
    std::vector<CceAction> actions;

    // Deadlines inside (now, event time) fire first, at their exact times.
    flush_forced(state, event.time_s, false, actions);
    integrate_ds(state, event.time_s);

    switch (event.kind) {
    case CceEvent::Kind::load_change:
        check_finite_nonneg(event.ds_rate_bps, "ds_rate_bps");
        state.ds_rate_bps = event.ds_rate_bps;
        break;
    case CceEvent::Kind::arrival:
        route_arrival(state, event.item, actions);
        break;
    case CceEvent::Kind::clock_tick:
        close_tick(state, event.time_s, actions);
        // A deadline exactly on the boundary belongs to the fresh window.
        flush_forced(state, event.time_s, true, actions);
        break;
    }
    return actions;
}

LoadProfile make_peak_hour_profile(double capacity_bps) {
    LoadProfile profile;
    profile.horizon_s = 1800.0;
    profile.ds_segments = {
        {0.0, 300.0, 0.50 * capacity_bps},    // quiet morning floor
        {300.0, 330.0, 0.92 * capacity_bps},  // rising edge crosses theta_high
        {330.0, 700.0, 0.97 * capacity_bps},  // crest
        {700.0, 1200.0, 0.93 * capacity_bps}, // busy shoulder
        {1200.0, 1800.0, 0.40 * capacity_bps} // relief
    };
    // One 0.02-capacity-second item every 10 s across the whole busy period.
    // With a ~400 s TTL the crest arrivals are forced inside the shoulder,
    // i.e. into a strictly lower load window than they left.
    std::uint64_t id = 1;
    for (double t = 5.0; t < 1200.0; t += 10.0) {
        ContentItem item;
        item.id = id++;
        item.size_bits = 0.02 * capacity_bps;
        item.traffic_class = TrafficClass::delay_tolerant;
        item.created_at_s = t;
        profile.dt_arrivals.push_back(item);
    }
    return profile;
}

LoadProfile make_zero_dt_profile(double capacity_bps) {
    LoadProfile profile = make_peak_hour_profile(capacity_bps);
    profile.dt_arrivals.clear();
    return profile;
}

LoadProfile make_all_dt_profile(double capacity_bps) {
    LoadProfile profile;
    profile.horizon_s = 3000.0;
    profile.ds_segments = {{0.0, 3000.0, 0.0}};
    // Large DT bursts with no delay-sensitive floor; pairs with a TTL of
    // ~1200 s so the backlog drains well before any deadline.
    std::uint64_t id = 1;
    for (double t = 0.5; t < 600.0; t += 1.0) {
        ContentItem item;
        item.id = id++;
        item.size_bits = 0.92 * capacity_bps;
        item.traffic_class = TrafficClass::delay_tolerant;
        item.created_at_s = t;
        profile.dt_arrivals.push_back(item);
    }
    return profile;
}

ScenarioMetrics run_scenario(const LoadProfile& profile, const CceConfig& config,
                             const ClassPolicy& policy) {
    profile.validate();
    CceState state = make_state(config);

    // Merge load changes, classified arrivals and tick closes into one
    // time-ordered list. At equal times: ticks close the elapsed window
    // first, then rates change, then arrivals land in the new window.
    enum { order_tick = 0, order_load = 1, order_arrival = 2 };
    struct Pending {
        double t;
        int order;
        std::size_t index;
        CceEvent event;
    };
    std::vector<Pending> events;
    events.reserve(profile.ds_segments.size() + profile.dt_arrivals.size() +
                   static_cast<std::size_t>(profile.horizon_s / config.tick_s) + 2);

    std::size_t index = 0;
    for (const LoadSegment& seg : profile.ds_segments) {
        CceEvent ev;
        ev.kind = CceEvent::Kind::load_change;
        ev.time_s = seg.t_start_s;
        ev.ds_rate_bps = seg.rate_bps;
        events.push_back({ev.time_s, order_load, index++, ev});
    }
    for (const ContentItem& item : profile.dt_arrivals) {
        CceEvent ev;
        ev.kind = CceEvent::Kind::arrival;
        ev.time_s = item.created_at_s;
        ev.item = classify(item, policy);
        events.push_back({ev.time_s, order_arrival, index++, ev});
    }
    for (double t = config.tick_s; t < profile.horizon_s; t += config.tick_s) {
        CceEvent ev;
        ev.kind = CceEvent::Kind::clock_tick;
        ev.time_s = t;
        events.push_back({t, order_tick, index++, ev});
    }
    {
        CceEvent ev;
        ev.kind = CceEvent::Kind::clock_tick;
        ev.time_s = profile.horizon_s;
        events.push_back({profile.horizon_s, order_tick, index++, ev});
    }
    std::stable_sort(events.begin(), events.end(), [](const Pending& a, const Pending& b) {
        if (a.t != b.t) return a.t < b.t;
        return a.order < b.order;
    });

    ScenarioMetrics metrics;
    for (const Pending& pending : events) {
        auto actions = step(state, pending.event);
        for (auto& action : actions) metrics.actions.push_back(action);
        if (pending.event.kind == CceEvent::Kind::clock_tick && state.has_closed_tick) {
            TickRow row;
            row.t_s = state.last_tick_start_s;
            row.baseline_util = state.last_baseline_util;
            row.cce_util = state.last_cce_util;
            row.buffer_occupancy_bits = state.buffer.occupancy_bits;
            row.forced_count_cum = state.forced_count;
            row.edge_count_cum = state.edge_count;
            metrics.series.push_back(row);
            metrics.peak_baseline_util = std::max(metrics.peak_baseline_util, row.baseline_util);
            metrics.peak_cce_util = std::max(metrics.peak_cce_util, row.cce_util);
            state.has_closed_tick = false;
        }
    }

    // Anything still buffered must be due after the horizon; an earlier
    // deadline would have been forced above.
    for (const auto& entry : state.buffer.contents) {
        if (entry.second.item.deadline_at_s <= profile.horizon_s) state.miss_count += 1;
    }

    metrics.buffered_at_end = static_cast<long>(state.buffer.contents.size());
    metrics.buffered_count = state.buffered_count;
    metrics.forced_count = state.forced_count;
    metrics.edge_count = state.edge_count;
    metrics.overflow_count = state.overflow_count;
    metrics.deadline_miss_count = state.miss_count;
    metrics.total_buffered_bits = state.total_buffered_bits;
    return metrics;
}

void write_timeseries_csv(const ScenarioMetrics& metrics, std::ostream& out) {
    out << "t_s,baseline_util,cce_util,buffer_occupancy_bits,forced_count_cum,edge_count_cum\n";
    for (const TickRow& row : metrics.series) {
        out << csv::format_double(row.t_s) << ',' << csv::format_double(row.baseline_util) << ','
            << csv::format_double(row.cce_util) << ','
            << csv::format_double(row.buffer_occupancy_bits) << ',' << row.forced_count_cum << ','
            << row.edge_count_cum << '\n';
    }
}

void write_summary_csv(const ScenarioMetrics& metrics, std::ostream& out) {
    out << "peak_baseline_util,peak_cce_util,total_buffered_bytes,buffered_count,forced_count,"
           "edge_count,overflow_count,deadline_miss_count\n";
    out << csv::format_double(metrics.peak_baseline_util) << ','
        << csv::format_double(metrics.peak_cce_util) << ','
        << csv::format_double(metrics.total_buffered_bits / 8.0) << ',' << metrics.buffered_count
        << ',' << metrics.forced_count << ',' << metrics.edge_count << ','
        << metrics.overflow_count << ',' << metrics.deadline_miss_count << '\n';
}

} // namespace edgecc::cce
