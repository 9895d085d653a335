#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "edgecc/analytic.hpp"
#include "edgecc/errors.hpp"
#include "edgecc/meetsim.hpp"
#include "edgecc/rng.hpp"
#include "test_support.hpp"

using namespace edgecc;
using analytic::Deadline;
using meetsim::MeetingModel;
using meetsim::Mode;
using meetsim::RateDist;
using meetsim::Via;

namespace {

MeetingModel base_model(int requesters, int holders, Mode mode) {
    MeetingModel model;
    model.n_requesters = requesters;
    model.n_holders = holders;
    model.m_lambda = 3.3e-5;
    model.mode = mode;
    return model;
}

} // namespace

TEST_CASE("identical model, ttl and seed give bit-identical records") {
    for (RateDist dist : {RateDist::deterministic, RateDist::exponential, RateDist::gamma}) {
        MeetingModel model = base_model(50, 10, Mode::epidemic);
        model.rate_dist = dist;
        model.gamma_shape = 2.0;
        const auto a = meetsim::run_replication(model, Deadline{600.0}, 12345);
        const auto b = meetsim::run_replication(model, Deadline{600.0}, 12345);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].requester_id == b[i].requester_id);
            CHECK(a[i].delivery_time_s == b[i].delivery_time_s);
            CHECK(a[i].via == b[i].via);
        }
        const auto traced = meetsim::run_replication_traced(model, Deadline{600.0}, 12345);
        REQUIRE(traced.records.size() == a.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(traced.records[i].delivery_time_s == a[i].delivery_time_s);
        }
    }
}

TEST_CASE("every requester gets exactly one record and none exceeds the ttl") {
    const MeetingModel model = base_model(50, 10, Mode::epidemic);
    const auto records = meetsim::run_replication(model, Deadline{600.0}, 7);
    REQUIRE(records.size() == 50);
    std::set<int> ids;
    for (const auto& rec : records) {
        ids.insert(rec.requester_id);
        CHECK(rec.delivery_time_s <= 600.0);
        if (rec.via == Via::forced_at_deadline) CHECK(rec.delivery_time_s == 600.0);
    }
    CHECK(ids.size() == 50);
}

TEST_CASE("no holders means every delivery is forced at the deadline") {
    const MeetingModel model = base_model(5, 0, Mode::epidemic);
    const auto records = meetsim::run_replication(model, Deadline{123.0}, 99);
    for (const auto& rec : records) {
        CHECK(rec.via == Via::forced_at_deadline);
        CHECK(rec.delivery_time_s == 123.0);
    }
    const auto est = meetsim::estimate_delivery_probability(model, Deadline{123.0}, 10, 1);
    CHECK(est.value == 0.0);
    CHECK(est.std_error == 0.0);
}

TEST_CASE("zero ttl forces everyone at time zero") {
    const MeetingModel model = base_model(10, 5, Mode::epidemic);
    for (const auto& rec : meetsim::run_replication(model, Deadline{0.0}, 4)) {
        CHECK(rec.via == Via::forced_at_deadline);
        CHECK(rec.delivery_time_s == 0.0);
    }
}

TEST_CASE("a very long ttl delivers everyone through meetings") {
    const MeetingModel model = base_model(20, 3, Mode::epidemic);
    const auto est = meetsim::estimate_delivery_probability(model, Deadline{1e7}, 20, 11);
    CHECK(est.value == 1.0);
    CHECK(est.std_error == 0.0);
}

TEST_CASE("epidemic mode conserves requesters plus holders at every event") {
    MeetingModel model = base_model(40, 8, Mode::epidemic);
    model.rate_dist = RateDist::exponential;
    const auto trace = meetsim::run_replication_traced(model, Deadline{3600.0}, 2718);
    int waiting = 40;
    int holding = 8;
    double last_time = 0.0;
    for (const auto& event : trace.events) {
        CHECK(event.time_s >= last_time);
        last_time = event.time_s;
        if (event.kind == meetsim::SimEvent::Kind::meeting) {
            CHECK(event.requester_id < 40);
            CHECK(event.holder_node >= 0);
            waiting -= 1;
            holding += 1; // the requester converts
        }
        CHECK(waiting + holding == 48);
    }
}

TEST_CASE("fixed-holders mode never grows the holder set") {
    const MeetingModel model = base_model(30, 6, Mode::fixed_holders);
    const auto trace = meetsim::run_replication_traced(model, Deadline{36000.0}, 5);
    for (const auto& event : trace.events) {
        if (event.kind == meetsim::SimEvent::Kind::meeting) {
            // Meeting partners are always original holder nodes.
            CHECK(event.holder_node >= 30);
            CHECK(event.holder_node < 36);
        }
    }
}

TEST_CASE("sampled rates have the configured mean") {
    for (auto [dist, shape] : {std::pair{RateDist::exponential, 1.0},
                               {RateDist::gamma, 2.5},
                               {RateDist::gamma, 0.7}}) {
        MeetingModel model = base_model(10000, 10, Mode::fixed_holders);
        model.rate_dist = dist;
        model.gamma_shape = shape;
        const auto sums = meetsim::sample_requester_rate_sums(model, 31337);
        double total = 0.0;
        for (double s : sums) {
            CHECK(s >= 0.0);
            total += s;
        }
        const double mean = total / (10000.0 * 10.0);
        CHECK(std::fabs(mean - model.m_lambda) / model.m_lambda < 0.02);
    }
}

TEST_CASE("deterministic rate sums are exact") {
    const MeetingModel model = base_model(4, 7, Mode::fixed_holders);
    for (double s : meetsim::sample_requester_rate_sums(model, 1)) {
        CHECK(s == doctest::Approx(7 * 3.3e-5).epsilon(1e-12));
    }
}

TEST_CASE("fixed-holders delivery times follow the truncated exponential") {
    const MeetingModel model = base_model(1000, 10, Mode::fixed_holders);
    const double ttl = 3600.0;
    const double mu = 10 * 3.3e-5;

    std::vector<double> samples;
    double delay_sum = 0.0;
    long count = 0;
    for (int k = 0; k < 100; ++k) {
        const auto records =
            meetsim::run_replication(model, Deadline{ttl}, derive_replication_seed(42, k));
        for (const auto& rec : records) {
            delay_sum += rec.delivery_time_s;
            ++count;
            if (rec.via == Via::edge_meeting) samples.push_back(rec.delivery_time_s);
        }
    }
    REQUIRE(count == 100000);

    const double analytic_mean =
        analytic::expected_delay(analytic::FluidParams{50.0, 10.0, 3.3e-5}, Deadline{ttl});
    CHECK(std::fabs(delay_sum / count - analytic_mean) / analytic_mean <= 0.02);

    const double f_ttl = 1.0 - std::exp(-mu * ttl);
    const double ks = test_support::ks_distance(std::move(samples), [&](double t) {
        return (1.0 - std::exp(-mu * t)) / f_ttl;
    });
    CHECK(ks < 0.01);
}

TEST_CASE("first-meeting time is exponential with the aggregate pair rate") {
    // Probability integral transform per replication: with the replication's
    // own rate sum known, F(T) must be uniform whatever the rates were.
    MeetingModel model = base_model(1, 7, Mode::fixed_holders);
    model.rate_dist = RateDist::exponential;

    std::vector<double> pit;
    for (int k = 0; k < 4000; ++k) {
        const std::uint64_t seed = derive_replication_seed(271828, k);
        const double rate_sum = meetsim::sample_requester_rate_sums(model, seed)[0];
        const auto records = meetsim::run_replication(model, Deadline{1e9}, seed);
        REQUIRE(records.size() == 1);
        REQUIRE(records[0].via == Via::edge_meeting);
        pit.push_back(-std::expm1(-rate_sum * records[0].delivery_time_s));
    }
    const double ks = test_support::ks_distance(std::move(pit), [](double u) { return u; });
    CHECK(ks < 0.03);
}

TEST_CASE("epidemic delivery fraction approaches the fluid limit") {
    const MeetingModel model = base_model(50, 10, Mode::epidemic);
    const auto est = meetsim::estimate_delivery_probability(model, Deadline{600.0}, 400, 42);
    const double analytic_p = analytic::delivery_probability(
        analytic::FluidParams{50.0, 10.0, 3.3e-5}, 600.0);
    CHECK(std::fabs(est.value - analytic_p) <= 0.05);
    CHECK(est.std_error > 0.0);
}

TEST_CASE("estimators are deterministic in the seed") {
    const MeetingModel model = base_model(50, 10, Mode::epidemic);
    const auto a = meetsim::estimate_delivery_probability(model, Deadline{600.0}, 50, 9);
    const auto b = meetsim::estimate_delivery_probability(model, Deadline{600.0}, 50, 9);
    CHECK(a.value == b.value);
    CHECK(a.std_error == b.std_error);
    const auto c = meetsim::estimate_expected_delay(model, Deadline{600.0}, 50, 9);
    const auto d = meetsim::estimate_expected_delay(model, Deadline{600.0}, 50, 9);
    CHECK(c.value == d.value);
    CHECK(c.std_error == d.std_error);
}

TEST_CASE("expected-delay estimate includes forced deliveries at the ttl") {
    const MeetingModel model = base_model(10, 0, Mode::fixed_holders);
    const auto est = meetsim::estimate_expected_delay(model, Deadline{600.0}, 5, 3);
    CHECK(est.value == 600.0);
    CHECK(est.std_error == 0.0);
    const auto zero = meetsim::estimate_expected_delay(base_model(10, 5, Mode::epidemic),
                                                       Deadline{0.0}, 5, 3);
    CHECK(zero.value == 0.0);
}

TEST_CASE("model validation rejects bad populations and parameters") {
    CHECK_THROWS_AS(meetsim::run_replication(base_model(0, 10, Mode::epidemic), Deadline{1.0}, 1),
                    InvalidParams);
    CHECK_THROWS_AS(meetsim::run_replication(base_model(5, -1, Mode::epidemic), Deadline{1.0}, 1),
                    InvalidParams);
    MeetingModel bad_rate = base_model(5, 5, Mode::epidemic);
    bad_rate.m_lambda = 0.0;
    CHECK_THROWS_AS(meetsim::run_replication(bad_rate, Deadline{1.0}, 1), InvalidParams);
    MeetingModel bad_shape = base_model(5, 5, Mode::epidemic);
    bad_shape.rate_dist = RateDist::gamma;
    bad_shape.gamma_shape = 0.0;
    CHECK_THROWS_AS(meetsim::run_replication(bad_shape, Deadline{1.0}, 1), InvalidParams);
    CHECK_THROWS_AS(
        meetsim::run_replication(base_model(5, 5, Mode::epidemic), Deadline{-1.0}, 1),
        InvalidTime);
    CHECK_THROWS_AS(
        meetsim::estimate_delivery_probability(base_model(5, 5, Mode::epidemic), Deadline{1.0},
                                               0, 1),
        InvalidParams);
}
