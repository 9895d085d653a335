#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "edgecc/analytic.hpp"
#include "edgecc/errors.hpp"
#include "edgecc/rng.hpp"
#include "test_support.hpp"

using namespace edgecc;
using analytic::Deadline;
using analytic::FluidParams;

namespace {

const FluidParams kH10{50.0, 10.0, 3.3e-5};
const FluidParams kH20{50.0, 20.0, 3.3e-5};
const FluidParams kH30{50.0, 30.0, 3.3e-5};

} // namespace

TEST_CASE("boundary values at t = 0") {
    CHECK(analytic::holders_at(kH10, 0.0) == 10.0);
    CHECK(analytic::requesters_at(kH10, 0.0) == 50.0);
    CHECK(analytic::delivery_probability(kH10, 0.0) == 0.0);
    CHECK(analytic::expected_delay(kH10, Deadline{0.0}) == 0.0);
}

TEST_CASE("no seed holders is an absorbing state") {
    const FluidParams p{50.0, 0.0, 3.3e-5};
    for (double t : {0.0, 1.0, 600.0, 1e6}) {
        CHECK(analytic::holders_at(p, t) == 0.0);
        CHECK(analytic::requesters_at(p, t) == 50.0);
        CHECK(analytic::delivery_probability(p, t) == 0.0);
    }
    CHECK_THROWS_AS(analytic::expected_delay(p, Deadline{600.0}), DegenerateModel);
}

TEST_CASE("closed forms match the RK4 oracle along the whole trajectory") {
    for (const FluidParams& p : {kH10, kH20, kH30}) {
        const auto trajectory = analytic::ode_oracle(p, 3600.0, 1.0);
        REQUIRE(trajectory.size() == 3601);
        double max_dev = 0.0;
        for (const auto& state : trajectory) {
            max_dev = std::max(max_dev,
                               std::fabs(state.h - analytic::holders_at(p, state.t)));
            max_dev = std::max(max_dev,
                               std::fabs(state.r - analytic::requesters_at(p, state.t)));
        }
        CHECK(max_dev <= 1e-6);
    }
}

// Values below were produced by the RK4 oracle at step 0.01 s and frozen.
TEST_CASE("oracle-derived population values at t = 600") {
    CHECK(analytic::holders_at(kH10, 600.0) == doctest::Approx(23.770363294).epsilon(1e-9));
    CHECK(analytic::requesters_at(kH10, 600.0) == doctest::Approx(36.229636706).epsilon(1e-9));
}

TEST_CASE("oracle-derived delivery probabilities at t = 600") {
    CHECK(analytic::delivery_probability(kH10, 600.0) ==
          doctest::Approx(0.275407265884).epsilon(1e-9));
    CHECK(analytic::delivery_probability(kH20, 600.0) ==
          doctest::Approx(0.461440918447).epsilon(1e-9));
    CHECK(analytic::delivery_probability(kH30, 600.0) ==
          doctest::Approx(0.592320200876).epsilon(1e-9));
}

TEST_CASE("expected delay matches an independent Monte-Carlo oracle") {
    struct Case {
        double h0;
        double ttl;
        double frozen; // printed by the Monte-Carlo oracle run, then pinned
    };
    for (const Case& c : {Case{10.0, 3600.0, 2106.574802}, Case{30.0, 600.0, 452.409693},
                          Case{10.0, 600.0, 544.333778}, Case{30.0, 3600.0, 981.489599}}) {
        const FluidParams p{50.0, c.h0, 3.3e-5};
        const double analytic_value = analytic::expected_delay(p, Deadline{c.ttl});
        CHECK(analytic_value == doctest::Approx(c.frozen).epsilon(1e-8));
        const auto mc = test_support::mc_truncated_exponential_mean(3.3e-5 * c.h0, c.ttl,
                                                                    1'000'000, 777);
        CHECK(std::fabs(mc.mean - analytic_value) <= 4.0 * mc.std_error);
    }
}

TEST_CASE("conservation holds over random parameter draws") {
    Rng rng(2024);
    for (int i = 0; i < 1000; ++i) {
        const FluidParams p{1.0 + 99.0 * rng.uniform(), 50.0 * rng.uniform(),
                            1e-6 + (1e-3 - 1e-6) * rng.uniform()};
        const double t = 1e4 * rng.uniform();
        const double total = p.r0 + p.h0;
        const double sum = analytic::holders_at(p, t) + analytic::requesters_at(p, t);
        CHECK(std::fabs(sum - total) / total <= 1e-9);
    }
}

TEST_CASE("monotonicity in t, h0, m_lambda and ttl") {
    Rng rng(99);
    for (int i = 0; i < 300; ++i) {
        const FluidParams p{1.0 + 99.0 * rng.uniform(), 0.5 + 49.0 * rng.uniform(),
                            1e-6 + 1e-3 * rng.uniform()};
        double t1 = 5e3 * rng.uniform();
        double t2 = 5e3 * rng.uniform();
        if (t1 > t2) std::swap(t1, t2);

        CHECK(analytic::holders_at(p, t2) >= analytic::holders_at(p, t1) - 1e-9);
        CHECK(analytic::requesters_at(p, t2) <= analytic::requesters_at(p, t1) + 1e-9);
        CHECK(analytic::delivery_probability(p, t2) >=
              analytic::delivery_probability(p, t1) - 1e-12);

        FluidParams more_holders = p;
        more_holders.h0 += 1.0 + 10.0 * rng.uniform();
        CHECK(analytic::delivery_probability(more_holders, t2) >=
              analytic::delivery_probability(p, t2) - 1e-12);

        FluidParams faster = p;
        faster.m_lambda *= 1.5;
        CHECK(analytic::delivery_probability(faster, t2) >=
              analytic::delivery_probability(p, t2) - 1e-12);

        CHECK(analytic::expected_delay(p, Deadline{t2}) >=
              analytic::expected_delay(p, Deadline{t1}) - 1e-9);
        CHECK(analytic::expected_delay(more_holders, Deadline{t2}) <=
              analytic::expected_delay(p, Deadline{t2}) + 1e-9);
        CHECK(analytic::expected_delay(faster, Deadline{t2}) <=
              analytic::expected_delay(p, Deadline{t2}) + 1e-9);
    }
}

TEST_CASE("expected delay saturates at 1 / (m_lambda * h0)") {
    for (const FluidParams& p : {kH10, kH30}) {
        const double limit = 1.0 / (p.m_lambda * p.h0);
        const double at_long_ttl = analytic::expected_delay(p, Deadline{100.0 * limit});
        CHECK(std::fabs(at_long_ttl - limit) / limit < 1e-6);
    }
}

TEST_CASE("delivery probability equals 1 - r(t)/r0 to 1e-12") {
    Rng rng(7);
    for (int i = 0; i < 500; ++i) {
        const FluidParams p{1.0 + 99.0 * rng.uniform(), 50.0 * rng.uniform(),
                            1e-6 + 1e-3 * rng.uniform()};
        const double t = 1e4 * rng.uniform();
        const double via_requesters = 1.0 - analytic::requesters_at(p, t) / p.r0;
        CHECK(std::fabs(analytic::delivery_probability(p, t) - via_requesters) <= 1e-12);
    }
}

TEST_CASE("long horizons stay finite instead of overflowing") {
    const FluidParams p{50.0, 10.0, 1e-3};
    for (double t : {1e6, 1e9, 1e12}) {
        const double h = analytic::holders_at(p, t);
        const double r = analytic::requesters_at(p, t);
        CHECK(std::isfinite(h));
        CHECK(std::isfinite(r));
        CHECK(h == doctest::Approx(60.0));
        CHECK(r == doctest::Approx(0.0));
        CHECK(analytic::delivery_probability(p, t) <= 1.0);
    }
}

TEST_CASE("parameter and time validation") {
    CHECK_THROWS_AS(analytic::holders_at(FluidParams{0.0, 10.0, 1e-5}, 1.0), InvalidParams);
    CHECK_THROWS_AS(analytic::holders_at(FluidParams{-5.0, 10.0, 1e-5}, 1.0), InvalidParams);
    CHECK_THROWS_AS(analytic::holders_at(FluidParams{50.0, -1.0, 1e-5}, 1.0), InvalidParams);
    CHECK_THROWS_AS(analytic::holders_at(FluidParams{50.0, 10.0, 0.0}, 1.0), InvalidParams);
    CHECK_THROWS_AS(analytic::holders_at(FluidParams{50.0, 10.0, NAN}, 1.0), InvalidParams);
    CHECK_THROWS_AS(analytic::holders_at(kH10, -1.0), InvalidTime);
    CHECK_THROWS_AS(analytic::requesters_at(kH10, INFINITY), InvalidTime);
    CHECK_THROWS_AS(analytic::expected_delay(kH10, Deadline{-1.0}), InvalidTime);
}

TEST_CASE("oracle grid handling and step validation") {
    const auto single = analytic::ode_oracle(kH10, 0.0, 1.0);
    REQUIRE(single.size() == 1);
    CHECK(single[0].t == 0.0);
    CHECK(single[0].h == 10.0);
    CHECK(single[0].r == 50.0);

    const auto constant = analytic::ode_oracle(FluidParams{50.0, 0.0, 3.3e-5}, 100.0, 1.0);
    for (const auto& state : constant) {
        CHECK(state.h == 0.0);
        CHECK(state.r == 50.0);
    }

    const auto traj = analytic::ode_oracle(kH10, 600.0, 1.0);
    for (const auto& state : traj) {
        CHECK(std::fabs(state.h + state.r - 60.0) / 60.0 <= 1e-9);
    }

    // A non-multiple t_end lands exactly on the end point.
    const auto ragged = analytic::ode_oracle(kH10, 10.5, 1.0);
    CHECK(ragged.back().t == 10.5);

    CHECK_THROWS_AS(analytic::ode_oracle(kH10, 100.0, 0.0), InvalidParams);
    CHECK_THROWS_AS(analytic::ode_oracle(kH10, 100.0, -1.0), InvalidParams);
    CHECK_THROWS_AS(analytic::ode_oracle(kH10, 100.0, 200.0), InvalidParams);
}

TEST_CASE("sweep evaluates the full grid and flags degenerate cells") {
    const std::vector<FluidParams> grid{kH10, kH20, kH30};
    const std::vector<double> times{600.0, 1800.0, 3600.0};
    const auto rows = analytic::sweep(grid, times);
    REQUIRE(rows.size() == 9);
    CHECK(rows[0].p_dlv == doctest::Approx(0.275407265884).epsilon(1e-9));
    for (const auto& row : rows) CHECK(row.ok());

    const auto degenerate = analytic::sweep({FluidParams{50.0, 0.0, 3.3e-5}}, {600.0});
    REQUIRE(degenerate.size() == 1);
    CHECK_FALSE(degenerate[0].ok());
    CHECK(degenerate[0].holders == 0.0);
    CHECK(degenerate[0].requesters == 50.0);
    CHECK(degenerate[0].p_dlv == 0.0);
    CHECK(std::isnan(degenerate[0].e_delay_s));

    CHECK_THROWS_AS(analytic::sweep({}, times), InvalidParams);
    CHECK_THROWS_AS(analytic::sweep(grid, {}), InvalidParams);
}

TEST_CASE("sweep CSV is deterministic and carries the documented header") {
    const auto rows = analytic::sweep({kH10}, {0.0, 600.0});
    std::ostringstream first;
    std::ostringstream second;
    analytic::write_sweep_csv(rows, first);
    analytic::write_sweep_csv(rows, second);
    CHECK(first.str() == second.str());
    CHECK(first.str().rfind("r0,h0,m_lambda,t_s,holders,requesters,p_dlv,e_delay_s\n", 0) == 0);
    CHECK(first.str().back() == '\n');
}
