#include <algorithm>
#include <cmath>
#include <vector>

#include "catch_amalgamated.hpp"
#include "remlab/spectral.hpp"
#include "remlab/trajectories.hpp"

using namespace remlab;
using Catch::Approx;

namespace {

// Midpoint rule on a uniform grid, state located by scanning the jump list.
double grid_integral(const Trajectory& traj, const EnergyTable& table, double dt)
{
    const auto steps = static_cast<std::uint64_t>(std::llround(traj.t_final / dt));
    double acc = 0.0;
    std::uint64_t state = traj.initial;
    std::size_t next = 0;
    for (std::uint64_t k = 0; k < steps; ++k) {
        const double time = (static_cast<double>(k) + 0.5) * dt;
        while (next < traj.jump_count() && traj.jump_times[next] <= time) {
            state ^= std::uint64_t{1} << traj.flips[next];
            ++next;
        }
        acc += table[state] * dt;
    }
    return acc;
}

}  // namespace

TEST_CASE("trajectory structure")
{
    rng::Stream stream(1, 0);
    for (int k = 0; k < 2000; ++k) {
        const auto tr = sample_trajectory(7, 1.5, stream);
        CHECK(tr.initial < 128);
        CHECK(tr.flips.size() == tr.jump_count());
        CHECK(std::is_sorted(tr.jump_times.begin(), tr.jump_times.end()));
        CHECK(std::adjacent_find(tr.jump_times.begin(), tr.jump_times.end()) == tr.jump_times.end());
        for (double s : tr.jump_times) {
            CHECK(s > 0.0);
            CHECK(s <= 1.5);
        }
        for (int f : tr.flips) {
            CHECK(f >= 0);
            CHECK(f < 7);
        }
    }
    CHECK_THROWS_AS(sample_trajectory(7, 0.0, stream), std::invalid_argument);
    CHECK_THROWS_AS(sample_trajectory(0, 1.0, stream), std::invalid_argument);
}

TEST_CASE("mean jump count is n t")
{
    double sum = 0.0;
    const int samples = 100000;
    for (int i = 0; i < samples; ++i) {
        rng::Stream stream(9, static_cast<std::uint64_t>(i));
        sum += static_cast<double>(sample_trajectory(8, 1.0, stream).jump_count());
    }
    CHECK(std::abs(sum / samples - 8.0) <= 4.0 * std::sqrt(8.0 / samples));
}

TEST_CASE("same stream gives the same trajectory")
{
    rng::Stream a(42, 3);
    rng::Stream b(42, 3);
    rng::Stream c(42, 4);
    const auto ta = sample_trajectory(10, 2.0, a);
    const auto tb = sample_trajectory(10, 2.0, b);
    const auto tc = sample_trajectory(10, 2.0, c);
    CHECK(ta.initial == tb.initial);
    CHECK(ta.jump_times == tb.jump_times);
    CHECK(ta.flips == tb.flips);
    CHECK((ta.jump_times != tc.jump_times || ta.initial != tc.initial));
}

TEST_CASE("energy integral")
{
    SECTION("constant landscape")
    {
        const auto field = RemField::synthetic(6, 0.0, 1.75);
        rng::Stream stream(2, 0);
        for (int k = 0; k < 100; ++k) {
            const auto tr = sample_trajectory(6, 1.3, stream);
            CHECK(integrate_energy(tr, field) == 1.75 * 1.3);
        }
    }
    SECTION("no jumps")
    {
        const RemField field(3, 6);
        Trajectory tr;
        tr.n = 6;
        tr.t_final = 0.8;
        tr.initial = 13;
        CHECK(integrate_energy(tr, field) == field(13) * 0.8);
    }
    SECTION("hand-built path")
    {
        const EnergyTable table(2, {1.0, 2.0, 3.0, 4.0});
        Trajectory tr;
        tr.n = 2;
        tr.t_final = 1.0;
        tr.initial = 0;
        tr.jump_times = {0.25, 0.5};
        tr.flips = {0, 1};
        CHECK(tr.final_state() == 3);
        CHECK(integrate_energy(tr, table) == Approx(0.25 * 1 + 0.25 * 2 + 0.5 * 4).epsilon(1e-15));
    }
    SECTION("fine-grid quadrature")
    {
        const EnergyTable table{RemField(5, 6)};
        rng::Stream stream(5, 1);
        for (int k = 0; k < 20; ++k) {
            const auto tr = sample_trajectory(6, 1.0, stream);
            const double exact = integrate_energy(tr, table);
            // Midpoint error of a step function: at most dt/2 times each jump height.
            double jumps = 0.0;
            std::uint64_t state = tr.initial;
            for (int f : tr.flips) {
                const std::uint64_t next = state ^ (std::uint64_t{1} << f);
                jumps += std::abs(table[next] - table[state]);
                state = next;
            }
            const double tol = std::max(1e-3 * std::abs(exact), 0.5e-4 * jumps) + 1e-6;
            CHECK(std::abs(exact - grid_integral(tr, table, 1e-4)) <= tol);
        }
    }
    SECTION("reversal")
    {
        const EnergyTable table{RemField(6, 9)};
        rng::Stream stream(6, 0);
        for (int k = 0; k < 500; ++k) {
            const auto tr = sample_trajectory(9, 2.0, stream);
            const auto back = reversed(tr);
            CHECK(back.initial == tr.final_state());
            CHECK(back.final_state() == tr.initial);
            const double a = integrate_energy(tr, table);
            const double b = integrate_energy(back, table);
            CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
        }
    }
    SECTION("dimension mismatch")
    {
        rng::Stream stream(1, 1);
        const auto tr = sample_trajectory(5, 1.0, stream);
        CHECK_THROWS_AS(integrate_energy(tr, RemField(1, 6)), std::invalid_argument);
    }
}

TEST_CASE("moment generating function")
{
    const RemField field(11, 8);
    const EnergyTable table(field);

    SECTION("lambda = 0")
    {
        const auto est = mgf_estimate(8, 1.0, 0.0, 1000, 3, table);
        CHECK(est.mean == 1.0);
        CHECK(est.std_error == 0.0);
    }
    SECTION("Feynman-Kac identity")
    {
        const auto est = mgf_estimate(8, 1.0, 1.0, 100000, 4, table, true);
        REQUIRE(est.exact.has_value());
        const double dense = std::exp(scgf_finite(1.0, 1.0, 0.0, field, ScgfMethod::Dense).log_z);
        CHECK(*est.exact == Approx(dense).epsilon(1e-12));
        CHECK(std::abs(est.mean - *est.exact) <= 3.0 * est.std_error);
        CHECK(est.log_mean == Approx(std::log(est.mean)).epsilon(1e-12));
    }
    SECTION("standard error scales as the inverse square root")
    {
        const auto a = mgf_estimate(8, 1.0, 0.5, 20000, 5, table);
        const auto b = mgf_estimate(8, 1.0, 0.5, 80000, 6, table);
        CHECK(a.std_error / b.std_error == Approx(2.0).epsilon(0.25));
    }
    SECTION("convergence toward the dense value")
    {
        const double exact = std::exp(scgf_finite(1.0, 0.7, 0.0, field, ScgfMethod::Dense).log_z);
        for (std::uint64_t samples : {10000u, 100000u, 1000000u}) {
            const auto est = mgf_estimate(8, 1.0, 0.7, samples, 7, table);
            CHECK(std::abs(est.mean - exact) <= 4.0 * est.std_error);
            CHECK(est.std_error * std::sqrt(static_cast<double>(samples))
                  == Approx(std::sqrt(10000.0) * mgf_estimate(8, 1.0, 0.7, 10000, 7, table).std_error)
                         .epsilon(0.3));
        }
    }
    SECTION("reproducible")
    {
        const auto a = mgf_estimate(8, 1.0, 1.0, 5000, 8, table);
        const auto b = mgf_estimate(8, 1.0, 1.0, 5000, 8, table);
        CHECK(a.mean == b.mean);
        CHECK(a.std_error == b.std_error);
    }
    SECTION("errors")
    {
        CHECK_THROWS_AS(mgf_estimate(8, 1.0, 1.0, 99, 1, table), std::invalid_argument);
        CHECK_THROWS_AS(mgf_estimate(7, 1.0, 1.0, 1000, 1, table), std::invalid_argument);
        CHECK_THROWS_AS(mgf_estimate(13, 1.0, 1.0, 1000, 1, RemField(1, 13), true), std::length_error);
    }
}

TEST_CASE("activity")
{
    SECTION("untilted activity is one")
    {
        const EnergyTable table{RemField(2, 8)};
        const auto a = activity_estimate(8, 1.0, 0.0, 50000, 1, table);
        CHECK(std::abs(a.untilted - 1.0) <= 4.0 * a.untilted_std_error);
        CHECK(a.tilted == Approx(a.untilted).epsilon(1e-12));
        REQUIRE(a.oracle.has_value());
        CHECK(*a.oracle == Approx(1.0).epsilon(1e-6));
    }
    SECTION("tilted activity against the dense oracle")
    {
        const EnergyTable table{RemField(11, 8)};
        const auto a = activity_estimate(8, 1.0, 1.0, 100000, 2, table);
        REQUIRE(a.oracle.has_value());
        CHECK_FALSE(a.degenerate);
        CHECK(a.effective_sample_size >= 30.0);
        CHECK(std::abs(a.tilted - *a.oracle) <= 3.0 * a.tilted_std_error);
    }
    SECTION("deep glass lowers the activity")
    {
        const EnergyTable table{RemField(3, 10)};
        const double oracle = dense_activity(table, 2.0, 2.0, 1e-4);
        CHECK(oracle < 1.0);
        const auto a = activity_estimate(10, 2.0, 2.0, 50000, 3, table);
        if (a.degenerate) {
            WARN("deep-glass tilted estimate degenerate (ESS " << a.effective_sample_size << ")");
        } else {
            CHECK(a.tilted < a.untilted);
        }
    }
    SECTION("errors")
    {
        const EnergyTable table{RemField(2, 6)};
        ActivityOptions opts;
        opts.jackknife_blocks = 1;
        CHECK_THROWS_AS(activity_estimate(6, 1.0, 1.0, 1000, 1, table, opts), std::invalid_argument);
        CHECK_THROWS_AS(dense_activity(table, 1.0, 1.0, 0.0), std::invalid_argument);
    }
}

TEST_CASE("stationarity of spin occupation")
{
    const int samples = 20000;
    for (int spin : {0, 3, 7}) {
        double sum = 0.0;
        double sq = 0.0;
        for (int i = 0; i < samples; ++i) {
            rng::Stream stream(77, static_cast<std::uint64_t>(i));
            const double f = up_fraction(sample_trajectory(8, 1.0, stream), spin);
            sum += f;
            sq += f * f;
        }
        const double mean = sum / samples;
        const double se = std::sqrt((sq / samples - mean * mean) / samples);
        CHECK(std::abs(mean - 0.5) <= 4.0 * se);
    }
    rng::Stream stream(1, 0);
    CHECK_THROWS_AS(up_fraction(sample_trajectory(4, 1.0, stream), 4), std::out_of_range);
}
