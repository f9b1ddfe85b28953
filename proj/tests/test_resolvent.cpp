#include <algorithm>
#include <bit>
#include <cmath>
#include <vector>

#include "catch_amalgamated.hpp"
#include "remlab/resolvent.hpp"
#include "remlab/rng.hpp"

using namespace remlab;
using Catch::Approx;

namespace {

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    return v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
}

StateVector random_state(int n, std::uint64_t seed)
{
    StateVector v = StateVector::zeros(n);
    const auto key = rng::derive_key(seed, 5);
    for (std::uint64_t i = 0; i < v.entries.size(); ++i) {
        v.entries[i] = rng::standard_normal(key, i);
    }
    return v;
}

// Literal double loop over sigma and its neighbors.
double brute_gamma_n(const EnergyTable& table, double lambda, double E)
{
    const int n = table.n();
    double best = 0.0;
    for (std::uint64_t s = 0; s < table.size(); ++s) {
        double acc = 0.0;
        for (std::uint64_t t = 0; t < table.size(); ++t) {
            if (std::popcount(s ^ t) == 1) {
                const double neg = -lambda * table[t] > 0.0 ? -lambda * table[t] : 0.0;
                acc += neg / (E - neg);
            }
        }
        best = std::max(best, acc / n);
    }
    return best;
}

double admissible_energy(const EnergyTable& table, double gamma, double lambda, double top)
{
    const int n = table.n();
    const double umax = std::max(std::abs(table.min()), std::abs(table.max()));
    return 1.5 * std::max({gamma * n, lambda * umax, top + spectral_margin(n)});
}

}  // namespace

TEST_CASE("diagonal resolvent is exact")
{
    const RemField field(3, 9);
    const EnergyTable table(field);
    const double E = 1.2 * 9 * 3;
    const auto rhs = random_state(9, 1);
    const auto r = solve_resolvent(GeneratorSpec::qrem(9, 0.0, 1.0), field, E, rhs);
    for (std::uint64_t s = 0; s < table.size(); ++s) {
        CHECK(r.x.entries[s] == Approx(rhs.entries[s] / (E + table[s])).epsilon(1e-14));
    }
}

TEST_CASE("conjugate-gradient residual")
{
    const RemField field(4, 10);
    const HypercubeOperator op(GeneratorSpec::qrem(10, 0.3, 1.0), field);
    const double top = spectrum_top(op);
    const double E = top + 2.0;
    const auto rhs = random_state(10, 2);
    SolveOptions opts;
    opts.tol = 1e-11;
    const auto r = solve_resolvent(op, E, rhs, opts);
    std::vector<double> y(rhs.entries.size());
    op.apply(r.x.entries, y);
    double res = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = E * r.x.entries[i] - y[i] - rhs.entries[i];
        res += d * d;
    }
    CHECK(std::sqrt(res) <= opts.tol * norm2(rhs.entries) * 1.01);
    CHECK(r.relative_residual <= opts.tol);
    CHECK(r.top_eigenvalue == Approx(top));
}

TEST_CASE("CG matches the dense solve")
{
    const RemField field(5, 8);
    const EnergyTable table(field);
    const auto spec = GeneratorSpec::qrem(8, 0.4, 1.0);
    const double E = spectrum_top(HypercubeOperator(spec, field)) + 1.0;
    const auto rhs = random_state(8, 3);
    SolveOptions dense;
    dense.method = SolveMethod::Dense;
    const auto a = solve_resolvent(spec, field, E, rhs);
    const auto b = solve_resolvent(spec, field, E, rhs, dense);
    const Eigen::MatrixXd r = dense_resolvent(table, 0.4, 1.0, E);
    const Eigen::VectorXd ref = r * Eigen::Map<const Eigen::VectorXd>(rhs.entries.data(), 256);
    for (std::size_t i = 0; i < 256; ++i) {
        CHECK(std::abs(a.x.entries[i] - ref(static_cast<Eigen::Index>(i))) < 1e-9);
        CHECK(std::abs(b.x.entries[i] - ref(static_cast<Eigen::Index>(i))) < 1e-9);
    }
}

TEST_CASE("energies inside or near the spectrum are rejected")
{
    const RemField field(6, 8);
    const HypercubeOperator op(GeneratorSpec::qrem(8, 0.4, 1.0), field);
    const double top = spectrum_top(op);
    const auto rhs = flat_vector(8);
    CHECK_THROWS_AS(solve_resolvent(op, top - 0.5, rhs), std::domain_error);
    CHECK_THROWS_WITH(solve_resolvent(op, top + 1e-9, rhs),
                      Catch::Matchers::ContainsSubstring("top"));
    CHECK_THROWS_AS(solve_resolvent(op, top + 1, flat_vector(7)), std::invalid_argument);
    CHECK_THROWS_AS(dense_resolvent(EnergyTable(field), 0.4, 1.0, top - 0.5), std::domain_error);
}

TEST_CASE("gamma_n")
{
    SECTION("zero landscape")
    {
        const auto table = EnergyTable(RemField::synthetic(8, 0.0, 0.0));
        CHECK(gamma_n(table, 1.0, 3.0) == 0.0);
        CHECK(gamma_n(RemField(1, 8), 0.0, 3.0) == 0.0);
    }
    SECTION("matches a brute-force sum")
    {
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            const EnergyTable table{RemField(seed, 7)};
            for (double lambda : {0.5, 1.0}) {
                const double E = 2.0 * 7;
                CHECK(gamma_n(table, lambda, E) == Approx(brute_gamma_n(table, lambda, E)).epsilon(1e-13));
            }
        }
    }
    SECTION("monotone in E")
    {
        const EnergyTable table{RemField(2, 10)};
        double last = gamma_n(table, 1.0, 15.0);
        for (double E = 16.0; E < 60.0; E += 3.0) {
            const double g = gamma_n(table, 1.0, E);
            CHECK(g <= last);
            last = g;
        }
    }
    SECTION("truncation only removes weight")
    {
        const EnergyTable table{RemField(3, 10)};
        for (double eta : {0.2, 0.5, 1.0}) {
            CHECK(gamma_n(table, 1.0, 20.0, eta) <= gamma_n(table, 1.0, 20.0));
        }
        CHECK_THROWS_AS(gamma_n(table, 1.0, 20.0, 0.0), std::invalid_argument);
    }
    SECTION("small at E = 2n")
    {
        std::vector<double> values;
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            values.push_back(gamma_n(RemField(seed, 12), 1.0, 24.0));
        }
        const double med = median(values);
        CHECK(med < 0.25);
        const double worst = *std::max_element(values.begin(), values.end());
        if (worst >= 0.25) {
            WARN("largest gamma_n over 20 seeds: " << worst);
        }
    }
    SECTION("singular summands are reported")
    {
        const EnergyTable table(2, {0.0, -3.0, 1.0, 2.0});
        CHECK_THROWS_WITH(gamma_n(table, 1.0, 3.0), Catch::Matchers::ContainsSubstring("tau = 1"));
        CHECK_NOTHROW(gamma_n(table, 1.0, 3.5));
    }
}

TEST_CASE("l1 bound report")
{
    SECTION("gamma = 0 is the equality case")
    {
        const EnergyTable table{RemField(8, 9)};
        const double E = 30.0;
        const auto rep = l1_bound_report(table, 0.0, 1.0, E);
        CHECK(rep.condition_ok);
        CHECK(rep.all_pass);
        for (std::uint64_t s = 0; s < table.size(); ++s) {
            const double exact = 1.0 / (E + table[s]);
            CHECK(rep.per_sigma[s].lhs == Approx(exact).epsilon(1e-12));
            CHECK(rep.per_sigma[s].rhs == Approx(exact).epsilon(1e-14));
        }
    }
    SECTION("bound holds at n = 10")
    {
        for (std::uint64_t seed = 1; seed <= 4; ++seed) {
            const EnergyTable table{RemField(seed, 10)};
            const double top = spectrum_top(HypercubeOperator(GeneratorSpec::qrem(10, 0.2, 1.0),
                                                              std::make_shared<const EnergyTable>(table)));
            const double E = admissible_energy(table, 0.2, 1.0, top);
            const auto rep = l1_bound_report(table, 0.2, 1.0, E);
            REQUIRE(rep.condition_ok);
            CHECK(rep.all_pass);
            CHECK(rep.min_lhs >= -1e-12);
            double max_rhs = 0.0;
            for (const auto& b : rep.per_sigma) {
                CHECK(b.lhs <= b.rhs + 1e-10);
                max_rhs = std::max(max_rhs, b.rhs);
            }
            CHECK(rep.l1_norm <= max_rhs);
            CHECK(rep.gamma_n_value == Approx(gamma_n(table, 1.0, E)).epsilon(1e-15));
            CHECK(rep.solver_residual <= 1e-12);
        }
    }
    SECTION("lhs matches dense resolvent row sums")
    {
        const EnergyTable table{RemField(12, 8)};
        const double E = 20.0;
        const auto rep = l1_bound_report(table, 0.3, 1.0, E);
        const Eigen::MatrixXd r = dense_resolvent(table, 0.3, 1.0, E);
        for (std::uint64_t s = 0; s < table.size(); ++s) {
            CHECK(rep.per_sigma[s].lhs == Approx(r.col(static_cast<Eigen::Index>(s)).sum()).epsilon(1e-9));
        }
    }
    SECTION("precondition failures are named")
    {
        const EnergyTable table{RemField(12, 8)};
        CHECK_THROWS_WITH(l1_bound_report(table, 1.0, 1.0, 7.0),
                          Catch::Matchers::ContainsSubstring("gamma n"));
        CHECK_THROWS_AS(l1_bound_report(table, -1.0, 1.0, 40.0), std::invalid_argument);
    }
}

TEST_CASE("dense resolvent facts")
{
    for (std::uint64_t k = 0; k < 3; ++k) {
        const EnergyTable table{RemField(40 + k, 8)};
        rng::Stream stream(0x4a15e, k);
        std::vector<double> raise(table.size());
        for (double& r : raise) {
            r = std::sqrt(8.0) * stream.uniform();
        }
        const double E = 25.0;
        const auto f = dense_resolvent_facts(table, 0.3, 1.0, E, raise);
        CHECK(f.min_entry >= -1e-12);
        CHECK(f.max_monotonicity_violation <= 1e-12);
        CHECK(std::abs(f.l1_norm - f.linf_norm) <= 1e-10);
    }
    const EnergyTable table{RemField(1, 6)};
    CHECK_THROWS_AS(dense_resolvent_facts(table, 0.3, 1.0, 20.0, std::vector<double>(3)),
                    std::invalid_argument);
    CHECK_THROWS_AS(dense_resolvent_facts(table, 0.3, 1.0, 20.0, std::vector<double>(64, -1.0)),
                    std::invalid_argument);
}
