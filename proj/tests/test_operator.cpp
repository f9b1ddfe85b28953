#include <algorithm>
#include <bit>
#include <cmath>
#include <vector>

#include "catch_amalgamated.hpp"
#include "remlab/dense.hpp"
#include "remlab/operator.hpp"
#include "remlab/parallel.hpp"
#include "remlab/rng.hpp"

using namespace remlab;
using Catch::Approx;

namespace {

std::vector<double> random_vector(int n, std::uint64_t seed)
{
    std::vector<double> v(std::uint64_t{1} << n);
    const auto key = rng::derive_key(seed, 77);
    for (std::uint64_t i = 0; i < v.size(); ++i) {
        v[i] = rng::standard_normal(key, i);
    }
    return v;
}

std::vector<double> product(const HypercubeOperator& op, const std::vector<double>& x)
{
    std::vector<double> y(x.size());
    op.apply(x, y);
    return y;
}

double max_abs_diff(const std::vector<double>& a, const Eigen::VectorXd& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a[i] - b(static_cast<Eigen::Index>(i))));
    }
    return m;
}

Eigen::VectorXd as_eigen(const std::vector<double>& v)
{
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

TEST_CASE("generator coefficients")
{
    const auto w = GeneratorSpec::tilted(5, 0.7, 0.4);
    CHECK(w.hopping() == std::exp(-0.4));
    CHECK(w.coupling() == 0.7);
    CHECK(w.shift() == -5.0);
    CHECK_FALSE(w.is_qrem());

    const auto h = GeneratorSpec::qrem(5, 0.3, 1.1);
    CHECK(h.hopping() == 0.3);
    CHECK(h.coupling() == -1.1);
    CHECK(h.shift() == 0.0);
    CHECK(h.is_qrem());

    CHECK_THROWS_AS(GeneratorSpec::qrem(0, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(GeneratorSpec::qrem(31, 1, 1), std::invalid_argument);
    auto mask = std::make_shared<const ConfigurationMask>(4, std::vector<std::uint64_t>{1});
    CHECK_THROWS_AS(h.with_mask(mask), std::invalid_argument);
}

TEST_CASE("configuration masks")
{
    const ConfigurationMask m(3, {5, 1});
    CHECK(m.count() == 2);
    CHECK(m.contains(1));
    CHECK(m.contains(5));
    CHECK_FALSE(m.contains(0));
    CHECK_THROWS_AS(ConfigurationMask(3, {8}), std::out_of_range);
}

TEST_CASE("state vectors")
{
    const auto f = flat_vector(1);
    REQUIRE(f.entries.size() == 2);
    CHECK(f.entries[0] == Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(f.entries[1] == f.entries[0]);
    CHECK(f.log_scale == 0.0);
    for (int n : {1, 5, 12, 20}) {
        CHECK(std::abs(norm2(flat_vector(n).entries) - 1.0) < 1e-14);
    }
    CHECK_THROWS_AS(StateVector(3, std::vector<double>(7)), std::invalid_argument);
    CHECK_THROWS_AS(StateVector(3, std::vector<double>(8), INFINITY), std::invalid_argument);
    CHECK_THROWS_AS(flat_vector(0), std::invalid_argument);
    CHECK(StateVector::basis(3, 6).entries[6] == 1.0);
    CHECK_THROWS_AS(dot(std::vector<double>(2), std::vector<double>(3)), std::invalid_argument);
}

TEST_CASE("flat vector is an eigenvector of the adjacency")
{
    for (int n : {3, 8, 14}) {
        const auto field = RemField::synthetic(n, 0.0, 0.0);
        const auto v = flat_vector(n);
        const auto tv = remlab::apply(GeneratorSpec::qrem(n, 1.0, 0.0), field, v);
        CHECK(dot(v.entries, tv.entries) == Approx(static_cast<double>(n)).epsilon(1e-13));
    }
}

TEST_CASE("hand-computed generator at n = 2")
{
    const auto field = RemField::synthetic(2, 0.0, 0.0);
    const auto out = remlab::apply(GeneratorSpec::tilted(2, 0.0, 0.0), field, StateVector::basis(2, 0));
    CHECK(out.entries == std::vector<double>{-2.0, 1.0, 1.0, 0.0});

    // With energies (1, 2, 3, 4), lambda = 0.5, s = ln 2 the full matrix is
    //   [-1.5  .5  .5   0 ]
    //   [ .5  -1   0   .5 ]
    //   [ .5   0  -.5  .5 ]
    //   [ 0   .5  .5   0  ]
    auto table = std::make_shared<const EnergyTable>(2, std::vector<double>{1, 2, 3, 4});
    const HypercubeOperator op(GeneratorSpec::tilted(2, 0.5, std::log(2.0)), table);
    Eigen::MatrixXd expected(4, 4);
    expected << -1.5, .5, .5, 0, .5, -1, 0, .5, .5, 0, -.5, .5, 0, .5, .5, 0;
    CHECK((materialize_dense(op) - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("generator symmetry and conservation")
{
    const RemField field(3, 6);
    const HypercubeOperator w(GeneratorSpec::tilted(6, 0.9, 0.2), field);
    rng::Stream pick(5, 0);
    for (int k = 0; k < 50; ++k) {
        const auto a = pick.below(64);
        const auto b = pick.below(64);
        std::vector<double> ea(64, 0.0);
        std::vector<double> eb(64, 0.0);
        ea[a] = 1.0;
        eb[b] = 1.0;
        CHECK(product(w, ea)[b] == product(w, eb)[a]);
    }

    const HypercubeOperator markov(GeneratorSpec::tilted(6, 0.0, 0.0), field);
    for (std::uint64_t col = 0; col < 64; ++col) {
        std::vector<double> e(64, 0.0);
        e[col] = 1.0;
        const auto y = product(markov, e);
        double sum = 0.0;
        for (double x : y) {
            sum += x;
        }
        CHECK(sum == 0.0);
    }
}

TEST_CASE("apply is linear")
{
    const RemField field(8, 10);
    for (const auto& spec : {GeneratorSpec::tilted(10, 1.3, -0.2), GeneratorSpec::qrem(10, 0.4, 1.0)}) {
        const HypercubeOperator op(spec, field);
        const auto u = random_vector(10, 1);
        const auto v = random_vector(10, 2);
        const double a = 0.37;
        const double b = -2.1;
        std::vector<double> mix(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) {
            mix[i] = a * u[i] + b * v[i];
        }
        const auto lhs = product(op, mix);
        const auto au = product(op, u);
        const auto av = product(op, v);
        double dev = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            dev = std::max(dev, std::abs(lhs[i] - (a * au[i] + b * av[i])));
        }
        CHECK(dev < 1e-12);
    }
}

TEST_CASE("dimension mismatches are rejected")
{
    const RemField field(1, 4);
    CHECK_THROWS_AS(remlab::apply(GeneratorSpec::qrem(5, 1, 1), field, flat_vector(5)),
                    std::invalid_argument);
    CHECK_THROWS_AS(remlab::apply(GeneratorSpec::qrem(4, 1, 1), field, flat_vector(3)),
                    std::invalid_argument);
    const HypercubeOperator op(GeneratorSpec::qrem(4, 1, 1), field);
    std::vector<double> small(8);
    std::vector<double> out(16);
    CHECK_THROWS_AS(op.apply(small, out), std::invalid_argument);
    CHECK_THROWS_AS(HypercubeOperator(GeneratorSpec::qrem(5, 1, 1), field), std::invalid_argument);
}

TEST_CASE("dense materialization agrees with the matrix-free product")
{
    for (int n : {8, 10}) {
        const RemField field(21, n);
        for (const auto& spec : {GeneratorSpec::tilted(n, -0.8, 0.5), GeneratorSpec::qrem(n, 0.6, 1.2)}) {
            const HypercubeOperator op(spec, field);
            const Eigen::MatrixXd m = materialize_dense(op);
            CHECK(m == m.transpose());
            for (std::uint64_t k = 0; k < 10; ++k) {
                const auto x = random_vector(n, 100 + k);
                const auto y = product(op, x);
                const Eigen::VectorXd ref = m * as_eigen(x);
                CHECK(max_abs_diff(y, ref) < 1e-13 * std::max(1.0, ref.cwiseAbs().maxCoeff()));
            }
        }
    }
    CHECK_THROWS_AS(materialize_dense(GeneratorSpec::qrem(13, 1, 1), RemField(1, 13)),
                    std::length_error);
}

TEST_CASE("spectrum of the free generator")
{
    const auto field = RemField::synthetic(6, 0.0, 0.0);
    const auto values = dense::eigenvalues(materialize_dense(GeneratorSpec::tilted(6, 0.0, 0.0), field));
    CHECK(std::abs(values(values.size() - 1)) < 1e-12);
    // Eigenvalues of T - n are -2m with multiplicity C(6, m).
    const int mult[] = {1, 6, 15, 20, 15, 6, 1};
    Eigen::Index idx = 0;
    for (int m = 6; m >= 0; --m) {
        for (int r = 0; r < mult[m]; ++r) {
            CHECK(values(idx++) == Approx(-2.0 * m).margin(1e-12));
        }
    }
}

TEST_CASE("QREM at lambda = 0 has top eigenvalue gamma n")
{
    for (int n : {4, 9}) {
        const RemField field(2, n);
        const auto v = flat_vector(n);
        const auto hv = remlab::apply(GeneratorSpec::qrem(n, 0.75, 0.0), field, v);
        for (std::size_t i = 0; i < v.entries.size(); ++i) {
            CHECK(hv.entries[i] == Approx(0.75 * n * v.entries[i]).epsilon(1e-15));
        }
        const auto values = dense::eigenvalues(materialize_dense(GeneratorSpec::qrem(n, 0.75, 0.0), field));
        CHECK(values(values.size() - 1) == Approx(0.75 * n).epsilon(1e-13));
    }
}

TEST_CASE("masked operators act on the complement")
{
    const int n = 6;
    const RemField field(4, n);
    auto mask = std::make_shared<const ConfigurationMask>(n, std::vector<std::uint64_t>{0, 7, 33});
    const HypercubeOperator op(GeneratorSpec::qrem(n, 0.5, 1.0).with_mask(mask), field);
    const Eigen::MatrixXd m = materialize_dense(op);
    for (auto s : mask->members()) {
        CHECK(m.row(static_cast<Eigen::Index>(s)).cwiseAbs().maxCoeff() == 0.0);
        CHECK(m.col(static_cast<Eigen::Index>(s)).cwiseAbs().maxCoeff() == 0.0);
    }
    const auto x = random_vector(n, 9);
    const auto y = product(op, x);
    CHECK(max_abs_diff(y, m * as_eigen(x)) < 1e-14);
    for (auto s : mask->members()) {
        CHECK(y[s] == 0.0);
    }
}

TEST_CASE("restriction to the complement of an extreme set")
{
    const int n = 8;
    const RemField field(12, n);
    const auto h = GeneratorSpec::qrem(n, 0.4, 1.0);

    SECTION("huge eta leaves the operator unchanged")
    {
        const auto r = restrict_complement(h, field, 50.0);
        REQUIRE(r.restricted.mask());
        CHECK(r.restricted.mask()->count() == 0);
        CHECK(materialize_dense(r.restricted, field) == materialize_dense(h, field));
    }

    SECTION("mask is the full extreme set")
    {
        const auto r = restrict_complement(h, field, 0.6);
        CHECK(r.restricted.mask()->members() == extreme_set(field, 0.6).members);
        CHECK(r.eta == 0.6);
        CHECK(r.coupling.gamma() == 0.4);
    }

    SECTION("gamma = 0 gives a zero coupling")
    {
        const auto r = restrict_complement(GeneratorSpec::qrem(n, 0.0, 1.0), field, 0.5);
        const auto x = random_vector(n, 3);
        std::vector<double> y(x.size(), 1.0);
        r.coupling.apply(x, y);
        CHECK(std::all_of(y.begin(), y.end(), [](double v) { return v == 0.0; }));
        r.coupling.apply_adjoint(x, y);
        CHECK(std::all_of(y.begin(), y.end(), [](double v) { return v == 0.0; }));
    }

    SECTION("coupling sums over unmasked neighbors")
    {
        const auto r = restrict_complement(h, field, 0.5);
        const auto& mask = r.coupling.mask();
        REQUIRE(mask.count() > 0);
        const auto s = mask.members().front();
        std::vector<double> e(std::uint64_t{1} << n, 0.0);
        e[s] = 1.0;
        std::vector<double> y(e.size());
        r.coupling.apply(e, y);
        for (std::uint64_t t = 0; t < y.size(); ++t) {
            const bool neighbor = std::popcount(t ^ s) == 1;
            CHECK(y[t] == (neighbor && !mask.contains(t) ? 0.4 : 0.0));
        }
    }

    SECTION("coupling and its adjoint are transposes")
    {
        const auto r = restrict_complement(h, field, 0.4);
        const auto& mask = r.coupling.mask();
        auto v = random_vector(n, 5);
        auto w = random_vector(n, 6);
        for (std::uint64_t s = 0; s < v.size(); ++s) {
            (mask.contains(s) ? w[s] : v[s]) = 0.0;
        }
        std::vector<double> av(v.size());
        std::vector<double> aw(v.size());
        r.coupling.apply(v, av);
        r.coupling.apply_adjoint(w, aw);
        CHECK(dot(w, av) == Approx(dot(aw, v)).epsilon(1e-13));
    }

    SECTION("restricted top eigenvalue does not exceed the full one")
    {
        for (double eta : {0.3, 0.6, 0.9}) {
            const auto r = restrict_complement(h, field, eta);
            const auto full = dense::eigenvalues(materialize_dense(h, field));
            const auto part = dense::eigenvalues(materialize_dense(r.restricted, field));
            CHECK(part(part.size() - 1) <= full(full.size() - 1) + 1e-12);
        }
    }

    SECTION("errors")
    {
        CHECK_THROWS_AS(restrict_complement(GeneratorSpec::tilted(n, 1, 0), field, 0.5),
                        std::invalid_argument);
        CHECK_THROWS_AS(restrict_complement(h, field, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(restrict_complement(h, RemField(1, 7), 0.5), std::invalid_argument);
        CHECK_THROWS_AS(BoundaryCoupling(1.0, nullptr), std::invalid_argument);
    }
}

TEST_CASE("matrix-free product is independent of the worker count")
{
    const RemField field(30, 16);
    const HypercubeOperator op(GeneratorSpec::tilted(16, 1.0, 0.1), field);
    const auto x = random_vector(16, 4);
    parallel::set_workers(1);
    const auto a = product(op, x);
    parallel::set_workers(3);
    const auto b = product(op, x);
    parallel::set_workers(0);
    CHECK(a == b);
}
