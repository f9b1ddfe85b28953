#pragma once

/**
 * @file resolvent.hpp
 * @brief Resolvent R(E) = (E - Op)^{-1} above the spectrum, the weight
 *        gamma_n(E) and the l^1 bound on sqrt(2^n) <-|R(E)|sigma>.
 *
 * The QREM here is gamma T - lambda U, so the negative part entering
 * gamma_n is U_-(tau) = max{-lambda U(tau), 0}.
 */

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "remlab/operator.hpp"
#include "remlab/remfield.hpp"

namespace remlab {

enum class SolveMethod { ConjugateGradient, Dense };

struct SolveOptions
{
    double tol = 1e-12;
    int max_iterations = 20000;
    SolveMethod method = SolveMethod::ConjugateGradient;
};

struct SolveResult
{
    StateVector x;
    int iterations = 0;
    /// ||(E - Op) x - rhs|| / ||rhs||.
    double relative_residual = 0.0;
    /// Top of the spectrum used for the admissibility check.
    double top_eigenvalue = 0.0;
};

/// E must exceed the top of the spectrum by spectral_margin(n).
inline double spectral_margin(int n) noexcept { return 1e-6 * n; }

/// Upper estimate of the top of the spectrum (Lanczos Ritz value plus its
/// residual).
double spectrum_top(const HypercubeOperator& op);

/// Solves (E - Op) x = rhs. Throws std::domain_error carrying the measured top
/// eigenvalue when E is not admissible.
SolveResult solve_resolvent(const HypercubeOperator& op, double E, const StateVector& rhs,
                            const SolveOptions& options = {});
SolveResult solve_resolvent(const GeneratorSpec& spec, const RemField& field, double E,
                            const StateVector& rhs, const SolveOptions& options = {});

/// Same as solve_resolvent but trusts a caller-supplied spectrum top.
SolveResult solve_resolvent_above(const HypercubeOperator& op, double E, double top,
                                  const StateVector& rhs, const SolveOptions& options = {});

/// sup_sigma (1/n) sum_{tau ~ sigma} U_-(tau) / (E - U_-(tau)). With `eta`,
/// U_-(tau) = -lambda U(tau) 1[-eta n < U(tau) <= 0]. Throws std::domain_error
/// naming tau when some E - U_-(tau) <= 0.
double gamma_n(const EnergyTable& table, double lambda, double E,
               std::optional<double> eta = std::nullopt);
double gamma_n(const RemField& field, double lambda, double E,
               std::optional<double> eta = std::nullopt);

struct SigmaBound
{
    /// sqrt(2^n) <-|R(E)|sigma>.
    double lhs = 0.0;
    /// (1 / (E - gamma n (1 + gamma_n))) * E / (E + lambda U(sigma)).
    double rhs = 0.0;
};

struct ResolventReport
{
    int n = 0;
    std::uint64_t seed = 0;
    double gamma = 0.0;
    double lambda = 0.0;
    double E = 0.0;
    double top_eigenvalue = 0.0;
    double gamma_n_value = 0.0;
    /// gamma_n(E) < (E - gamma n) / (gamma n).
    bool condition_ok = false;
    std::vector<SigmaBound> per_sigma;
    bool all_pass = false;
    /// sup_sigma lhs.
    double l1_norm = 0.0;
    double min_lhs = 0.0;
    double solver_residual = 0.0;
};

/// Requires E > max{top of spectrum, gamma n, -lambda min U}; each violated
/// condition is named in the std::domain_error message.
ResolventReport l1_bound_report(const EnergyTable& table, double gamma, double lambda,
                                double E, const SolveOptions& options = {});
ResolventReport l1_bound_report(const RemField& field, double gamma, double lambda, double E,
                                const SolveOptions& options = {});

/// Dense (E - gamma T + lambda U)^{-1} for n <= kDenseCap.
Eigen::MatrixXd dense_resolvent(const EnergyTable& table, double gamma, double lambda,
                                double E);

struct DenseResolventFacts
{
    double min_entry = 0.0;
    /// max over entries of R'(tau, sigma) - R(tau, sigma) for the raised potential.
    double max_monotonicity_violation = 0.0;
    /// Max column sum and max row sum of |R|.
    double l1_norm = 0.0;
    double linf_norm = 0.0;
};

/// Non-negativity, monotonicity under U -> U + raise (raise >= 0) and l^1 /
/// l^inf duality of the dense resolvent.
DenseResolventFacts dense_resolvent_facts(const EnergyTable& table, double gamma, double lambda,
                                          double E, const std::vector<double>& raise);

}  // namespace remlab
