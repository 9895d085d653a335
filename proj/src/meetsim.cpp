#include "edgecc/meetsim.hpp"

#include <cmath>
#include <cstddef>
#include <string>

#include "edgecc/errors.hpp"
#include "edgecc/rng.hpp"

namespace edgecc::meetsim {

namespace {

/// Fenwick tree over non-negative weights; supports point updates, prefix
/// totals and inverse-CDF lookup, all O(log n). Used to pick the meeting
/// requester proportionally to its aggregate rate when rates are
/// heterogeneous.
class WeightTree {
public:
    explicit WeightTree(const std::vector<double>& weights)
        : n_(static_cast<int>(weights.size())), tree_(weights.size() + 1, 0.0),
          weights_(weights) {
        for (int i = 1; i <= n_; ++i) {
            tree_[i] += weights_[static_cast<std::size_t>(i) - 1];
            const int parent = i + (i & -i);
            if (parent <= n_) tree_[parent] += tree_[i];
        }
        top_bit_ = 1;
        while (top_bit_ * 2 <= n_) top_bit_ *= 2;
    }

    double weight(int i) const { return weights_[static_cast<std::size_t>(i)]; }

    void set(int i, double w) {
        const double delta = w - weights_[static_cast<std::size_t>(i)];
        weights_[static_cast<std::size_t>(i)] = w;
        for (int j = i + 1; j <= n_; j += j & -j) tree_[j] += delta;
    }

    void add(int i, double delta) { set(i, weights_[static_cast<std::size_t>(i)] + delta); }

    double total() const {
        double sum = 0.0;
        for (int j = n_; j > 0; j -= j & -j) sum += tree_[j];
        return sum;
    }

    /// Index of the element containing `target` in the cumulative-weight
    /// line, target in [0, total()). Zero-weight elements are skipped except
    /// under floating-point drift at the extreme right edge, which the
    /// walk-back guards against.
    int find(double target) const {
        int pos = 0;
        for (int mask = top_bit_; mask > 0; mask >>= 1) {
            const int next = pos + mask;
            if (next <= n_ && tree_[next] <= target) {
                pos = next;
                target -= tree_[next];
            }
        }
        if (pos >= n_) pos = n_ - 1;
        while (pos > 0 && weights_[static_cast<std::size_t>(pos)] <= 0.0) --pos;
        return pos;
    }

private:
    int n_;
    int top_bit_ = 1;
    std::vector<double> tree_;
    std::vector<double> weights_;
};

double draw_rate(const MeetingModel& model, Rng& rng) {
    switch (model.rate_dist) {
    case RateDist::deterministic: return model.m_lambda;
    case RateDist::exponential: return rng.exponential(1.0 / model.m_lambda);
    case RateDist::gamma:
        return rng.gamma(model.gamma_shape, model.m_lambda / model.gamma_shape);
    }
    return model.m_lambda;
}

/// Per-pair rates for one replication. Deterministic rates are implicit;
/// fixed-holders mode stores only the requester x initial-holder block;
/// epidemic mode stores the full symmetric node x node table because any
/// requester may later serve as a holder.
class PairRates {
public:
    PairRates(const MeetingModel& model, Rng& rng) : model_(model) {
        if (model.rate_dist == RateDist::deterministic) return;
        const std::size_t n_req = static_cast<std::size_t>(model.n_requesters);
        const std::size_t n_hold = static_cast<std::size_t>(model.n_holders);
        if (model.mode == Mode::fixed_holders) {
            block_.resize(n_req * n_hold);
            for (std::size_t i = 0; i < n_req; ++i) {
                for (std::size_t j = 0; j < n_hold; ++j) {
                    block_[i * n_hold + j] = draw_rate(model, rng);
                }
            }
        } else {
            const std::size_t n = n_req + n_hold;
            full_.assign(n * n, 0.0);
            for (std::size_t a = 0; a < n; ++a) {
                for (std::size_t b = a + 1; b < n; ++b) {
                    const double rate = draw_rate(model, rng);
                    full_[a * n + b] = rate;
                    full_[b * n + a] = rate;
                }
            }
        }
    }

    /// Rate between requester node `req` and node `node`.
    double between(int req, int node) const {
        if (model_.rate_dist == RateDist::deterministic) return model_.m_lambda;
        if (model_.mode == Mode::fixed_holders) {
            const std::size_t j = static_cast<std::size_t>(node - model_.n_requesters);
            return block_[static_cast<std::size_t>(req) * model_.n_holders + j];
        }
        const std::size_t n =
            static_cast<std::size_t>(model_.n_requesters + model_.n_holders);
        return full_[static_cast<std::size_t>(req) * n + static_cast<std::size_t>(node)];
    }

private:
    const MeetingModel& model_;
    std::vector<double> block_;
    std::vector<double> full_;
};

struct ReplicationSink {
    std::vector<DeliveryRecord>* records = nullptr;
    std::vector<SimEvent>* events = nullptr;
};

void simulate(const MeetingModel& model, analytic::Deadline ttl, std::uint64_t seed,
              const ReplicationSink& sink) {
    model.validate();
    if (!std::isfinite(ttl.ttl_s) || ttl.ttl_s < 0.0) {
        throw InvalidTime("ttl must be finite and >= 0");
    }

    const int n_req = model.n_requesters;
    Rng rng(seed);
    const PairRates rates(model, rng);

    auto& records = *sink.records;
    records.assign(static_cast<std::size_t>(n_req), DeliveryRecord{});
    std::vector<bool> delivered(static_cast<std::size_t>(n_req), false);

    // Holder node list; grows in epidemic mode.
    std::vector<int> holders;
    holders.reserve(static_cast<std::size_t>(model.n_holders) +
                    (model.mode == Mode::epidemic ? static_cast<std::size_t>(n_req) : 0));
    for (int j = 0; j < model.n_holders; ++j) holders.push_back(n_req + j);

    const bool uniform_rates = model.rate_dist == RateDist::deterministic;

    // Active requesters. The uniform-rate path keeps a swap-removable index
    // list; the heterogeneous path keeps per-requester aggregate rates in a
    // weight tree.
    std::vector<int> active;
    std::vector<int> active_slot(static_cast<std::size_t>(n_req));
    active.reserve(static_cast<std::size_t>(n_req));
    for (int i = 0; i < n_req; ++i) {
        active.push_back(i);
        active_slot[static_cast<std::size_t>(i)] = i;
    }

    std::vector<double> row_sums;
    if (!uniform_rates) {
        row_sums.assign(static_cast<std::size_t>(n_req), 0.0);
        for (int i = 0; i < n_req; ++i) {
            double sum = 0.0;
            for (int node : holders) sum += rates.between(i, node);
            row_sums[static_cast<std::size_t>(i)] = sum;
        }
    }
    WeightTree tree(uniform_rates ? std::vector<double>{} : row_sums);

    double now = 0.0;
    std::size_t n_active = active.size();

    while (n_active > 0) {
        const double total_rate =
            uniform_rates
                ? model.m_lambda * static_cast<double>(n_active) *
                      static_cast<double>(holders.size())
                : tree.total();
        if (!(total_rate > 0.0)) break; // no holders or all pair rates zero

        now += rng.exponential(total_rate);
        if (now > ttl.ttl_s) break;

        // Pick the meeting (requester, holder) pair proportionally to rate.
        int requester;
        int holder_node;
        if (uniform_rates) {
            const std::size_t a = std::min(
                static_cast<std::size_t>(rng.uniform() * static_cast<double>(n_active)),
                n_active - 1);
            requester = active[a];
            const std::size_t b = std::min(
                static_cast<std::size_t>(rng.uniform() * static_cast<double>(holders.size())),
                holders.size() - 1);
            holder_node = holders[b];
        } else {
            requester = tree.find(rng.uniform() * total_rate);
            const double row = tree.weight(requester);
            double target = rng.uniform() * row;
            holder_node = holders.back();
            for (int node : holders) {
                target -= rates.between(requester, node);
                if (target < 0.0) {
                    holder_node = node;
                    break;
                }
            }
        }

        records[static_cast<std::size_t>(requester)] =
            DeliveryRecord{requester, now, Via::edge_meeting};
        delivered[static_cast<std::size_t>(requester)] = true;
        if (sink.events) {
            sink.events->push_back(SimEvent{now, SimEvent::Kind::meeting, requester, holder_node});
        }

        // Retire the requester.
        if (uniform_rates) {
            const int slot = active_slot[static_cast<std::size_t>(requester)];
            active[static_cast<std::size_t>(slot)] = active[n_active - 1];
            active_slot[static_cast<std::size_t>(active[static_cast<std::size_t>(slot)])] = slot;
        } else {
            tree.set(requester, 0.0);
        }
        --n_active;

        if (model.mode == Mode::epidemic) {
            holders.push_back(requester);
            if (!uniform_rates) {
                // New holder: every waiting requester gains one pair.
                for (int i = 0; i < n_req; ++i) {
                    if (delivered[static_cast<std::size_t>(i)]) continue;
                    tree.add(i, rates.between(i, requester));
                }
            }
        }
    }

    for (int i = 0; i < n_req; ++i) {
        if (delivered[static_cast<std::size_t>(i)]) continue;
        records[static_cast<std::size_t>(i)] =
            DeliveryRecord{i, ttl.ttl_s, Via::forced_at_deadline};
        if (sink.events) {
            sink.events->push_back(SimEvent{ttl.ttl_s, SimEvent::Kind::deadline_expiry, i, -1});
        }
    }
}

Estimate reduce(double sum, double sum_sq, int n) {
    const double mean = sum / n;
    if (n < 2) return Estimate{mean, 0.0};
    const double var = std::max(0.0, (sum_sq - static_cast<double>(n) * mean * mean) /
                                         (static_cast<double>(n) - 1.0));
    return Estimate{mean, std::sqrt(var / static_cast<double>(n))};
}

void check_replications(int n_replications) {
    if (n_replications < 1) {
        throw InvalidParams("n_replications must be >= 1, got " +
                            std::to_string(n_replications));
    }
}

} // namespace

void MeetingModel::validate() const {
    if (n_requesters < 1) {
        throw InvalidParams("n_requesters must be an integer >= 1, got " +
                            std::to_string(n_requesters));
    }
    if (n_holders < 0) {
        throw InvalidParams("n_holders must be an integer >= 0, got " +
                            std::to_string(n_holders));
    }
    if (!std::isfinite(m_lambda) || m_lambda <= 0.0) {
        throw InvalidParams("m_lambda must be finite and > 0");
    }
    if (rate_dist == RateDist::gamma && (!std::isfinite(gamma_shape) || gamma_shape <= 0.0)) {
        throw InvalidParams("gamma_shape must be finite and > 0");
    }
}

std::vector<DeliveryRecord> run_replication(const MeetingModel& model, analytic::Deadline ttl,
                                            std::uint64_t seed) {
    std::vector<DeliveryRecord> records;
    ReplicationSink sink;
    sink.records = &records;
    simulate(model, ttl, seed, sink);
    return records;
}

ReplicationTrace run_replication_traced(const MeetingModel& model, analytic::Deadline ttl,
                                        std::uint64_t seed) {
    ReplicationTrace trace;
    ReplicationSink sink;
    sink.records = &trace.records;
    sink.events = &trace.events;
    simulate(model, ttl, seed, sink);
    return trace;
}

std::vector<double> sample_requester_rate_sums(const MeetingModel& model, std::uint64_t seed) {
    model.validate();
    Rng rng(seed);
    const PairRates rates(model, rng);
    std::vector<double> sums(static_cast<std::size_t>(model.n_requesters), 0.0);
    for (int i = 0; i < model.n_requesters; ++i) {
        double sum = 0.0;
        for (int j = 0; j < model.n_holders; ++j) sum += rates.between(i, model.n_requesters + j);
        sums[static_cast<std::size_t>(i)] = sum;
    }
    return sums;
}

Estimate estimate_delivery_probability(const MeetingModel& model, analytic::Deadline ttl,
                                       int n_replications, std::uint64_t seed) {
    check_replications(n_replications);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int k = 0; k < n_replications; ++k) {
        const auto records =
            run_replication(model, ttl, derive_replication_seed(seed, static_cast<std::uint64_t>(k)));
        int delivered = 0;
        for (const auto& rec : records) {
            if (rec.via == Via::edge_meeting) ++delivered;
        }
        const double frac = static_cast<double>(delivered) / static_cast<double>(records.size());
        sum += frac;
        sum_sq += frac * frac;
    }
    return reduce(sum, sum_sq, n_replications);
}

Estimate estimate_expected_delay(const MeetingModel& model, analytic::Deadline ttl,
                                 int n_replications, std::uint64_t seed) {
    check_replications(n_replications);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int k = 0; k < n_replications; ++k) {
        const auto records =
            run_replication(model, ttl, derive_replication_seed(seed, static_cast<std::uint64_t>(k)));
        double delay = 0.0;
        for (const auto& rec : records) delay += rec.delivery_time_s;
        delay /= static_cast<double>(records.size());
        sum += delay;
        sum_sq += delay * delay;
    }
    return reduce(sum, sum_sq, n_replications);
}

} // namespace edgecc::meetsim
