#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

#include "catch_amalgamated.hpp"
#include "remlab/analytic.hpp"
#include "remlab/remfield.hpp"

using namespace remlab;
using Catch::Approx;

namespace {

// Standard normal CDF.
double Phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    return v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
}

}  // namespace

TEST_CASE("energies are bit-reproducible")
{
    const RemField f(17, 12);
    const auto a = f.table();
    const auto b = RemField(17, 12).table();
    REQUIRE(a.size() == 4096);
    CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
    for (std::uint64_t s = 0; s < 64; ++s) {
        CHECK(f.energy(s) == f.energy(s));
        CHECK(f(s) == a[s]);
    }
}

TEST_CASE("different seeds give different landscapes")
{
    const RemField a(1, 10);
    const RemField b(2, 10);
    int same = 0;
    for (std::uint64_t s = 0; s < a.size(); ++s) {
        same += a(s) == b(s) ? 1 : 0;
    }
    CHECK(same == 0);
}

TEST_CASE("sample variance at n = 12")
{
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const EnergyTable t{RemField(seed, 12)};
        const double mean = mean_energy(t);
        double var = 0.0;
        for (double u : t.values()) {
            var += (u - mean) * (u - mean);
        }
        var /= static_cast<double>(t.size() - 1);
        CHECK(var >= 0.85 * 12);
        CHECK(var <= 1.15 * 12);
    }
}

TEST_CASE("empirical mean is near zero")
{
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const RemField f(seed, 14);
        const double window = 5.0 * std::sqrt(14.0 / f.size());
        const double m = mean_energy(f);
        if (std::abs(m) > window) {
            WARN("seed " << seed << " mean " << m << " outside " << window);
        }
        CHECK(std::abs(m) < 2.0 * window);
    }
}

TEST_CASE("energy rejects out-of-range configurations and spin counts")
{
    const RemField f(1, 4);
    CHECK_THROWS_AS(f.energy(16), std::out_of_range);
    CHECK_NOTHROW(f.energy(15));
    CHECK_THROWS_AS(RemField(1, 0), std::invalid_argument);
    CHECK_THROWS_AS(RemField(1, 31), std::invalid_argument);
    CHECK_THROWS_AS(RemField(1, 27).table(), std::length_error);
    CHECK_THROWS_AS(EnergyTable(3, std::vector<double>(7, 0.0)), std::invalid_argument);
}

TEST_CASE("extreme sets")
{
    const RemField f(3, 12);
    CHECK(extreme_set(f, 10.0).count == 0);
    CHECK_THROWS_AS(extreme_set(f, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(extreme_set(f, -1.0), std::invalid_argument);

    const auto s = extreme_set(f, 0.5, 10);
    CHECK(s.members.size() == std::min<std::uint64_t>(10, s.count));
    CHECK(std::is_sorted(s.members.begin(), s.members.end()));
    for (auto m : extreme_set(f, 0.5).members) {
        CHECK(f(m) < -0.5 * 12);
    }
    CHECK(s.n == 12);
    CHECK(s.seed == 3);
}

TEST_CASE("extreme set counts match the Gaussian tail")
{
    const double expected = 4096.0 * Phi(-0.5 * std::sqrt(12.0));
    CHECK(expected == Approx(170.5257).epsilon(1e-5));
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto c = static_cast<double>(extreme_set(RemField(seed, 12), 0.5).count);
        CHECK(std::abs(c - expected) <= 4.0 * std::sqrt(expected));
    }
}

TEST_CASE("extreme set above beta_c is usually empty")
{
    int empty = 0;
    const double delta = analytic::Constants::beta_c() * 1.05;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        empty += extreme_set(RemField(seed, 12), delta).count == 0 ? 1 : 0;
    }
    CHECK(empty >= 11);
}

TEST_CASE("extreme set counts are monotone in delta")
{
    const EnergyTable t{RemField(9, 11)};
    std::uint64_t last = ~std::uint64_t{0};
    for (double d = 0.05; d < 2.0; d += 0.05) {
        const auto c = extreme_set(t, d).count;
        CHECK(c <= last);
        last = c;
    }
}

TEST_CASE("empirical pressure")
{
    const RemField f(4, 12);
    CHECK(empirical_pressure(f, 0.0) == 0.0);

    std::vector<double> values;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        values.push_back(empirical_pressure(RemField(seed, 14), 0.5));
    }
    CHECK(std::abs(median(values) - analytic::p_rem(0.5)) < 0.1);

    const EnergyTable t(f);
    const double mean = mean_energy(t);
    for (double b = -2.0; b <= 2.0; b += 0.25) {
        CHECK(empirical_pressure(t, b) >= b * mean / 12 - 1e-12);
        const double h = 0.1;
        CHECK(empirical_pressure(t, b)
              <= 0.5 * (empirical_pressure(t, b - h) + empirical_pressure(t, b + h)) + 1e-12);
    }
    CHECK(empirical_pressure(f, 0.7) == Approx(empirical_pressure(t, 0.7)).epsilon(1e-15));
}

TEST_CASE("empirical pressure is stable at large beta")
{
    const EnergyTable t{RemField(5, 10)};
    const double p = empirical_pressure(t, 400.0);
    const double lead = (400.0 * t.max() - 10 * std::log(2.0)) / 10;
    CHECK(std::isfinite(p));
    CHECK(p >= lead - 1e-9);
    CHECK(p <= lead + std::log(1024.0) / 10 + 1e-9);
}

TEST_CASE("pressure is symmetric in beta over the ensemble")
{
    std::vector<double> plus;
    std::vector<double> minus;
    for (std::uint64_t seed = 1; seed <= 21; ++seed) {
        const EnergyTable t{RemField(seed, 10)};
        plus.push_back(empirical_pressure(t, 0.8));
        minus.push_back(empirical_pressure(t, -0.8));
    }
    CHECK(std::abs(median(plus) - median(minus)) < 0.05);
}

TEST_CASE("minimum energy")
{
    const auto base = RemField::synthetic(10, std::sqrt(10.0), 0.0, 6);
    const auto shifted = RemField::synthetic(10, std::sqrt(10.0), 2.5, 6);
    const auto m0 = min_energy(base);
    const auto m1 = min_energy(shifted);
    CHECK(m1.value == Approx(m0.value + 2.5).epsilon(1e-14));
    CHECK(m1.argmin == m0.argmin);
    CHECK(min_energy(EnergyTable(base)).value == m0.value);

    const double bc = analytic::Constants::beta_c();
    CHECK(m0.asymptote == Approx(-bc * 10 + std::log(10 * std::log(2.0)) / (2 * bc)).epsilon(1e-14));

    int inside = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const RemField f(seed, 12);
        const auto m = min_energy(f);
        inside += std::abs(m.value + bc * 12) <= 3 * std::sqrt(12.0) ? 1 : 0;
        const double delta = -m.value / 12 - 1e-9;
        const auto set = extreme_set(f, delta);
        CHECK(std::find(set.members.begin(), set.members.end(), m.argmin) != set.members.end());
    }
    CHECK(inside >= 18);
}

TEST_CASE("constant landscapes")
{
    const auto f = RemField::synthetic(6, 0.0, -1.25);
    for (std::uint64_t s = 0; s < f.size(); ++s) {
        CHECK(f(s) == -1.25);
    }
    CHECK(mean_energy(f) == -1.25);
}
