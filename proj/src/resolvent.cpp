#include "remlab/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "remlab/parallel.hpp"
#include "remlab/spectral.hpp"

namespace remlab {

namespace {

std::vector<double> shifted_apply(const HypercubeOperator& op, double E,
                                  const std::vector<double>& x)
{
    std::vector<double> y(x.size());
    op.apply(x, y);
    for (std::uint64_t i = 0; i < y.size(); ++i) {
        y[i] = op.excluded(i) ? E * x[i] : E * x[i] - y[i];
    }
    return y;
}

SolveResult conjugate_gradient(const HypercubeOperator& op, double E, const StateVector& rhs,
                               const SolveOptions& options)
{
    const std::uint64_t dim = op.dim();
    const double rhs_norm = norm2(rhs.entries);
    SolveResult out;
    out.x = StateVector::zeros(op.n());
    out.x.log_scale = rhs.log_scale;
    if (rhs_norm == 0.0) {
        return out;
    }
    std::vector<double>& x = out.x.entries;
    std::vector<double> r = rhs.entries;
    std::vector<double> p = r;
    double rr = dot(r, r);
    const double target = options.tol * rhs_norm;
    int it = 0;
    while (std::sqrt(rr) > target && it < options.max_iterations) {
        const std::vector<double> ap = shifted_apply(op, E, p);
        const double pap = dot(p, ap);
        if (!(pap > 0.0)) {
            throw std::domain_error("solve_resolvent: E - Op is not positive definite");
        }
        const double alpha = rr / pap;
        for (std::uint64_t i = 0; i < dim; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        const double rr_next = dot(r, r);
        const double beta = rr_next / rr;
        rr = rr_next;
        for (std::uint64_t i = 0; i < dim; ++i) {
            p[i] = r[i] + beta * p[i];
        }
        ++it;
    }
    // True residual rather than the recursively updated one.
    const std::vector<double> ax = shifted_apply(op, E, x);
    double res = 0.0;
    for (std::uint64_t i = 0; i < dim; ++i) {
        res += (ax[i] - rhs.entries[i]) * (ax[i] - rhs.entries[i]);
    }
    out.iterations = it;
    out.relative_residual = std::sqrt(res) / rhs_norm;
    if (it >= options.max_iterations && out.relative_residual > options.tol) {
        std::ostringstream msg;
        msg << "solve_resolvent: no convergence after " << it
            << " iterations (relative residual " << out.relative_residual << ")";
        throw std::runtime_error(msg.str());
    }
    return out;
}

SolveResult diagonal_solve(const HypercubeOperator& op, double E, const StateVector& rhs)
{
    SolveResult out;
    out.x = StateVector(op.n(), std::vector<double>(rhs.entries.size()), rhs.log_scale);
    for (std::uint64_t i = 0; i < op.dim(); ++i) {
        out.x.entries[i] = rhs.entries[i] / (E - op.diagonal(i));
    }
    return out;
}

SolveResult dense_solve(const HypercubeOperator& op, double E, const StateVector& rhs)
{
    const Eigen::MatrixXd m = materialize_dense(op);
    const auto dim = m.rows();
    Eigen::MatrixXd a = E * Eigen::MatrixXd::Identity(dim, dim) - m;
    const Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) {
        throw std::domain_error("solve_resolvent: E - Op is not positive definite");
    }
    const Eigen::Map<const Eigen::VectorXd> b(rhs.entries.data(), dim);
    const Eigen::VectorXd x = llt.solve(b);
    SolveResult out;
    out.x = StateVector(op.n(), std::vector<double>(x.data(), x.data() + dim), rhs.log_scale);
    const double bn = b.norm();
    out.relative_residual = bn > 0.0 ? (a * x - b).norm() / bn : 0.0;
    return out;
}

}  // namespace

double spectrum_top(const HypercubeOperator& op)
{
    EigenOptions eo;
    eo.tol = 1e-10;
    const EigenResult top = extreme_eigs(op, 1, eo);
    return top.values.front() + top.residuals.front();
}

SolveResult solve_resolvent_above(const HypercubeOperator& op, double E, double top,
                                  const StateVector& rhs, const SolveOptions& options)
{
    if (rhs.n != op.n()) {
        throw std::invalid_argument("solve_resolvent: rhs and operator disagree on n");
    }
    if (!(options.tol > 0.0)) {
        throw std::invalid_argument("solve_resolvent: tol must be positive");
    }
    if (!(E >= top + spectral_margin(op.n()))) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "solve_resolvent: E = " << E << " is not above the spectrum (top eigenvalue "
            << top << ", required margin " << spectral_margin(op.n()) << ")";
        throw std::domain_error(msg.str());
    }
    SolveResult out;
    if (op.spec().hopping() == 0.0) {
        out = diagonal_solve(op, E, rhs);
    } else if (options.method == SolveMethod::Dense) {
        out = dense_solve(op, E, rhs);
    } else {
        out = conjugate_gradient(op, E, rhs, options);
    }
    out.top_eigenvalue = top;
    return out;
}

SolveResult solve_resolvent(const HypercubeOperator& op, double E, const StateVector& rhs,
                            const SolveOptions& options)
{
    return solve_resolvent_above(op, E, spectrum_top(op), rhs, options);
}

SolveResult solve_resolvent(const GeneratorSpec& spec, const RemField& field, double E,
                            const StateVector& rhs, const SolveOptions& options)
{
    if (spec.n() != field.n()) {
        throw std::invalid_argument("solve_resolvent: spec and field disagree on n");
    }
    return solve_resolvent(HypercubeOperator(spec, field), E, rhs, options);
}

double gamma_n(const EnergyTable& table, double lambda, double E, std::optional<double> eta)
{
    const int n = table.n();
    const std::uint64_t dim = table.size();
    if (eta && !(*eta > 0.0)) {
        throw std::invalid_argument("gamma_n: truncation level must be positive");
    }
    std::vector<double> weight(dim);
    for (std::uint64_t tau = 0; tau < dim; ++tau) {
        const double u = table[tau];
        double neg = std::max(-lambda * u, 0.0);
        if (eta && !(u > -*eta * n && u <= 0.0)) {
            neg = 0.0;
        }
        if (!(E - neg > 0.0)) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "gamma_n: singular summand at tau = " << tau << " (E = " << E
                << ", U_-(tau) = " << neg << ")";
            throw std::domain_error(msg.str());
        }
        weight[tau] = neg / (E - neg);
    }
    return parallel::chunked_reduce(
        dim, 0.0,
        [&](std::uint64_t begin, std::uint64_t end) {
            double best = 0.0;
            for (std::uint64_t s = begin; s < end; ++s) {
                double acc = 0.0;
                for (int j = 0; j < n; ++j) {
                    acc += weight[s ^ (std::uint64_t{1} << j)];
                }
                best = std::max(best, acc / n);
            }
            return best;
        },
        [](double a, double b) { return std::max(a, b); });
}

double gamma_n(const RemField& field, double lambda, double E, std::optional<double> eta)
{
    return gamma_n(EnergyTable(field), lambda, E, eta);
}

ResolventReport l1_bound_report(const EnergyTable& table, double gamma, double lambda,
                                double E, const SolveOptions& options)
{
    if (gamma < 0.0 || lambda < 0.0) {
        throw std::invalid_argument("l1_bound_report: gamma and lambda must be nonnegative");
    }
    const int n = table.n();
    const auto energies = std::make_shared<const EnergyTable>(table);
    const HypercubeOperator op(GeneratorSpec::qrem(n, gamma, lambda), energies);

    ResolventReport rep;
    rep.n = n;
    rep.gamma = gamma;
    rep.lambda = lambda;
    rep.E = E;
    rep.top_eigenvalue = spectrum_top(op);

    std::ostringstream failures;
    failures.precision(17);
    if (!(E >= rep.top_eigenvalue + spectral_margin(n))) {
        failures << " E <= top of spectrum (" << rep.top_eigenvalue << ");";
    }
    if (!(E > gamma * n)) {
        failures << " E <= gamma n (" << gamma * n << ");";
    }
    if (!(E > -lambda * table.min())) {
        failures << " E <= -lambda min U (" << -lambda * table.min() << ");";
    }
    if (!failures.str().empty()) {
        throw std::domain_error("l1_bound_report: E = " + std::to_string(E)
                                + " violates" + failures.str());
    }

    rep.gamma_n_value = gamma_n(table, lambda, E);
    rep.condition_ok = gamma == 0.0 || rep.gamma_n_value < (E - gamma * n) / (gamma * n);
    const double denom = E - gamma * n * (1.0 + rep.gamma_n_value);

    const StateVector ones(n, std::vector<double>(table.size(), 1.0));
    const SolveResult sol = solve_resolvent_above(op, E, rep.top_eigenvalue, ones, options);
    rep.solver_residual = sol.relative_residual;

    rep.per_sigma.resize(table.size());
    rep.all_pass = rep.condition_ok;
    rep.min_lhs = std::numeric_limits<double>::infinity();
    for (std::uint64_t s = 0; s < table.size(); ++s) {
        SigmaBound& b = rep.per_sigma[s];
        b.lhs = sol.x.entries[s];
        b.rhs = rep.condition_ok ? (1.0 / denom) * (E / (E + lambda * table[s]))
                                 : std::numeric_limits<double>::infinity();
        rep.l1_norm = std::max(rep.l1_norm, b.lhs);
        rep.min_lhs = std::min(rep.min_lhs, b.lhs);
        if (!(b.lhs <= b.rhs + 1e-10)) {
            rep.all_pass = false;
        }
    }
    return rep;
}

ResolventReport l1_bound_report(const RemField& field, double gamma, double lambda, double E,
                                const SolveOptions& options)
{
    ResolventReport rep = l1_bound_report(EnergyTable(field), gamma, lambda, E, options);
    rep.seed = field.seed();
    return rep;
}

Eigen::MatrixXd dense_resolvent(const EnergyTable& table, double gamma, double lambda, double E)
{
    const HypercubeOperator op(GeneratorSpec::qrem(table.n(), gamma, lambda),
                               std::make_shared<const EnergyTable>(table));
    const Eigen::MatrixXd m = materialize_dense(op);
    const auto dim = m.rows();
    const Eigen::MatrixXd a = E * Eigen::MatrixXd::Identity(dim, dim) - m;
    const Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) {
        throw std::domain_error("dense_resolvent: E is not above the spectrum");
    }
    return llt.solve(Eigen::MatrixXd::Identity(dim, dim));
}

DenseResolventFacts dense_resolvent_facts(const EnergyTable& table, double gamma, double lambda,
                                          double E, const std::vector<double>& raise)
{
    if (raise.size() != table.size()) {
        throw std::invalid_argument("dense_resolvent_facts: raise must hold 2^n values");
    }
    std::vector<double> raised = table.values();
    for (std::size_t i = 0; i < raised.size(); ++i) {
        if (raise[i] < 0.0) {
            throw std::invalid_argument("dense_resolvent_facts: raise must be nonnegative");
        }
        raised[i] += raise[i];
    }
    const Eigen::MatrixXd r = dense_resolvent(table, gamma, lambda, E);
    const Eigen::MatrixXd r_raised =
        dense_resolvent(EnergyTable(table.n(), std::move(raised)), gamma, lambda, E);
    DenseResolventFacts facts;
    facts.min_entry = r.minCoeff();
    facts.max_monotonicity_violation = (r_raised - r).maxCoeff();
    facts.l1_norm = r.cwiseAbs().colwise().sum().maxCoeff();
    facts.linf_norm = r.cwiseAbs().rowwise().sum().maxCoeff();
    return facts;
}

}  // namespace remlab
