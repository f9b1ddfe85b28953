#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "remlab/parallel.hpp"
#include "remlab/rng.hpp"
#include "remlab/spectral.hpp"

namespace remlab {

namespace {

constexpr std::uint64_t kBasisBudgetBytes = std::uint64_t{1} << 31;

int basis_cap(std::uint64_t dim, int requested)
{
    const std::uint64_t fit = kBasisBudgetBytes / (sizeof(double) * dim);
    return static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(requested), fit));
}

void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y)
{
    const double* px = x.data();
    double* py = y.data();
    parallel::for_each_index(y.size(), [=](std::uint64_t i) { py[i] += alpha * px[i]; });
}

void scale(double alpha, std::vector<double>& x)
{
    double* p = x.data();
    parallel::for_each_index(x.size(), [=](std::uint64_t i) { p[i] *= alpha; });
}

// Two passes of classical Gram-Schmidt against the whole basis.
void reorthogonalize(const std::vector<std::vector<double>>& basis, std::vector<double>& w)
{
    for (int pass = 0; pass < 2; ++pass) {
        for (const auto& q : basis) {
            axpy(-dot(q, w), q, w);
        }
    }
}

struct Tridiagonal
{
    std::vector<double> alpha;
    std::vector<double> beta;  // beta[j] couples basis j and j + 1

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solve(int size) const
    {
        Eigen::VectorXd diag(size);
        Eigen::VectorXd sub(std::max(size - 1, 0));
        for (int i = 0; i < size; ++i) {
            diag(i) = alpha[static_cast<std::size_t>(i)];
        }
        for (int i = 0; i + 1 < size; ++i) {
            sub(i) = beta[static_cast<std::size_t>(i)];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
        es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
        return es;
    }
};

std::vector<double> start_vector(const HypercubeOperator& op)
{
    const std::uint64_t key = rng::derive_key(0x6c616e637a6f73ull, 0);
    std::vector<double> v(op.dim());
    for (std::uint64_t s = 0; s < op.dim(); ++s) {
        v[s] = op.excluded(s) ? 0.0 : rng::standard_normal(key, s);
    }
    return v;
}

}  // namespace

EigenResult extreme_eigs(const HypercubeOperator& op, int k, const EigenOptions& options)
{
    if (k < 1) {
        throw std::invalid_argument("extreme_eigs: k must be at least 1");
    }
    if (!(options.tol > 0.0) || options.max_iterations < 1) {
        throw std::invalid_argument("extreme_eigs: tol and max_iterations must be positive");
    }
    const std::uint64_t active =
        op.dim() - (op.spec().mask() ? op.spec().mask()->count() : 0);
    if (active == 0) {
        throw std::invalid_argument("extreme_eigs: every configuration is masked");
    }
    const int cap = static_cast<int>(std::min<std::uint64_t>(
        active, static_cast<std::uint64_t>(basis_cap(op.dim(), options.max_iterations))));
    k = static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(k), active));

    std::vector<std::vector<double>> basis;
    Tridiagonal tri;
    std::vector<double> v = start_vector(op);
    scale(1.0 / norm2(v), v);
    std::vector<double> w(op.dim());

    EigenResult result;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small;
    int size = 0;
    bool exhausted = false;
    while (size < cap) {
        basis.push_back(v);
        ++size;
        op.apply(basis.back(), w);
        const double a = dot(basis.back(), w);
        tri.alpha.push_back(a);
        reorthogonalize(basis, w);
        const double b = norm2(w);
        tri.beta.push_back(b);

        const bool check = size >= k && (size % 4 == 0 || size == cap);
        const double norm_scale = std::max(1.0, std::abs(a));
        exhausted = b <= 1e-12 * norm_scale;
        if (check || exhausted) {
            small = tri.solve(size);
            bool done = size >= k;
            for (int i = 0; i < k && i < size && done; ++i) {
                const int col = size - 1 - i;
                const double theta = small.eigenvalues()(col);
                const double res = b * std::abs(small.eigenvectors()(size - 1, col));
                done = res <= options.tol * std::max(1.0, std::abs(theta));
            }
            if (done || exhausted) {
                result.converged = true;
                break;
            }
        }
        if (exhausted) {
            break;
        }
        v = w;
        scale(1.0 / b, v);
    }
    if (small.eigenvalues().size() != size) {
        small = tri.solve(size);
    }
    result.iterations = size;
    const double b = tri.beta.back();
    const int found = std::min(k, size);
    for (int i = 0; i < found; ++i) {
        const int col = size - 1 - i;
        result.values.push_back(small.eigenvalues()(col));
        result.residuals.push_back(b * std::abs(small.eigenvectors()(size - 1, col)));
        if (options.want_vectors) {
            std::vector<double> x(op.dim(), 0.0);
            for (int j = 0; j < size; ++j) {
                axpy(small.eigenvectors()(j, col), basis[static_cast<std::size_t>(j)], x);
            }
            result.vectors.push_back(std::move(x));
        }
    }
    return result;
}

EigenResult extreme_eigs(const GeneratorSpec& spec, const RemField& field, int k,
                         const EigenOptions& options)
{
    if (spec.n() != field.n()) {
        throw std::invalid_argument("extreme_eigs: spec and field disagree on n");
    }
    return extreme_eigs(HypercubeOperator(spec, field), k, options);
}

ExpmResult expm_action(const HypercubeOperator& op, double t, const StateVector& v,
                       const ExpmOptions& options)
{
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw std::invalid_argument("expm_action: t must be finite and nonnegative");
    }
    if (v.n != op.n()) {
        throw std::invalid_argument("expm_action: vector and operator disagree on n");
    }
    if (!(options.tol > 0.0) || options.max_krylov < 2) {
        throw std::invalid_argument("expm_action: tol must be positive and max_krylov >= 2");
    }
    ExpmResult result;
    result.state = v;
    if (t == 0.0) {
        return result;
    }
    const double beta0 = norm2(v.entries);
    if (beta0 == 0.0) {
        return result;
    }
    const int cap = std::min<int>(basis_cap(op.dim(), options.max_krylov),
                                  static_cast<int>(std::min<std::uint64_t>(op.dim(), 1u << 30)));
    if (cap < 2) {
        throw std::length_error("expm_action: Krylov basis does not fit the memory budget");
    }

    std::vector<double> x = v.entries;
    scale(1.0 / beta0, x);
    double log_scale = v.log_scale + std::log(beta0);
    double remaining = t;
    double h = t;
    std::vector<double> w(op.dim());

    while (remaining > 0.0) {
        h = std::min(h, remaining);
        std::vector<std::vector<double>> basis;
        Tridiagonal tri;
        basis.push_back(x);

        // Small exponential exp(h T_m) e_1, shifted by the top Ritz value.
        Eigen::VectorXd y;
        double shift = 0.0;
        auto small_exp = [&](int size, double step) {
            const auto es = tri.solve(size);
            shift = es.eigenvalues().maxCoeff();
            Eigen::VectorXd c = es.eigenvectors().row(0).transpose();
            for (int i = 0; i < size; ++i) {
                c(i) *= std::exp(step * (es.eigenvalues()(i) - shift));
            }
            y = es.eigenvectors() * c;
        };

        int size = 0;
        double err = std::numeric_limits<double>::infinity();
        bool accepted = false;
        bool breakdown = false;
        while (size < cap) {
            op.apply(basis.back(), w);
            ++size;
            const double a = dot(basis.back(), w);
            tri.alpha.push_back(a);
            reorthogonalize(basis, w);
            const double b = norm2(w);
            tri.beta.push_back(b);
            breakdown = b <= 1e-13 * std::max(1.0, std::abs(a));
            small_exp(size, h);
            err = breakdown ? 0.0 : b * std::abs(y(size - 1)) / y.norm();
            if (err <= options.tol * h / t) {
                accepted = true;
                break;
            }
            if (size == cap) {
                break;
            }
            basis.push_back(w);
            scale(1.0 / b, basis.back());
        }
        const double b_last = tri.beta.back();
        while (!accepted) {
            h *= 0.5;
            if (h < t * 0x1.0p-60) {
                std::ostringstream msg;
                msg << "expm_action: step size underflow at t = " << t
                    << ", remaining = " << remaining << ", estimate = " << err;
                throw std::runtime_error(msg.str());
            }
            small_exp(size, h);
            err = b_last * std::abs(y(size - 1)) / y.norm();
            accepted = err <= options.tol * h / t;
        }

        std::vector<double> next(op.dim(), 0.0);
        for (int j = 0; j < size; ++j) {
            axpy(y(j), basis[static_cast<std::size_t>(j)], next);
        }
        const double nrm = norm2(next);
        if (!(nrm > 0.0) || !std::isfinite(nrm)) {
            throw std::runtime_error("expm_action: Krylov update lost all mass");
        }
        scale(1.0 / nrm, next);
        x = std::move(next);
        log_scale += h * shift + std::log(nrm);
        remaining = h >= remaining ? 0.0 : remaining - h;

        ++result.substeps;
        result.krylov_dim = std::max(result.krylov_dim, size);
        result.residual_estimate += err;
        if (result.substeps > options.max_substeps) {
            std::ostringstream msg;
            msg << "expm_action: more than " << options.max_substeps
                << " substeps (t = " << t << ", remaining = " << remaining << ", h = " << h
                << ", krylov = " << size << ")";
            throw std::runtime_error(msg.str());
        }
        if (size < cap / 2 && !breakdown) {
            h *= 2.0;
        }
        if (breakdown) {
            h = remaining;
        }
    }
    result.state = StateVector(op.n(), std::move(x), log_scale);
    return result;
}

ExpmResult expm_action(const GeneratorSpec& spec, const RemField& field, double t,
                       const StateVector& v, const ExpmOptions& options)
{
    if (spec.n() != field.n()) {
        throw std::invalid_argument("expm_action: spec and field disagree on n");
    }
    return expm_action(HypercubeOperator(spec, field), t, v, options);
}

}  // namespace remlab
