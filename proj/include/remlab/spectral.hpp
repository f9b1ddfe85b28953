#pragma once

/**
 * @file spectral.hpp
 * @brief Lanczos eigenvalues, Krylov exponentials, the finite-n SCGF and the
 *        projector / shift / boundary-vector statistics of the QREM.
 *
 * The finite-n SCGF is
 *
 *     theta_n(t, lambda, s) = (1 / (n t)) ln <-| exp(t W_{lambda,s}) |->,
 *
 * evaluated either by a Krylov exponential on the flat vector (any n up to the
 * memory budget) or by a dense eigendecomposition (n <= kDenseCap).
 */

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "remlab/operator.hpp"
#include "remlab/remfield.hpp"

namespace remlab {

// ---------------------------------------------------------------- Lanczos

struct EigenOptions
{
    double tol = 1e-10;
    int max_iterations = 400;
    bool want_vectors = false;
};

struct EigenResult
{
    /// Descending.
    std::vector<double> values;
    /// Ritz vectors matching `values` (only with want_vectors).
    std::vector<std::vector<double>> vectors;
    /// ||Op x - theta x|| per Ritz pair.
    std::vector<double> residuals;
    int iterations = 0;
    bool converged = false;
};

/// Top-k eigenvalues by Lanczos with full reorthogonalization. Masked
/// configurations are excluded from the start vector, so a masked operator
/// yields the spectrum of its restriction. Non-convergence is reported via
/// `converged` with the best estimate.
EigenResult extreme_eigs(const HypercubeOperator& op, int k, const EigenOptions& options = {});
EigenResult extreme_eigs(const GeneratorSpec& spec, const RemField& field, int k,
                         const EigenOptions& options = {});

struct ExpmOptions
{
    double tol = 1e-11;
    int max_krylov = 80;
    std::uint64_t max_substeps = std::uint64_t{1} << 20;
};

struct ExpmResult
{
    /// exp(t Op) v = exp(state.log_scale) * state.entries, entries of unit norm.
    StateVector state;
    int krylov_dim = 0;
    std::uint64_t substeps = 0;
    double residual_estimate = 0.0;
};

/// Action of exp(t Op) on v by adaptive Lanczos substeps. Throws
/// std::runtime_error with diagnostics when the tolerance is unreachable.
ExpmResult expm_action(const HypercubeOperator& op, double t, const StateVector& v,
                       const ExpmOptions& options = {});
ExpmResult expm_action(const GeneratorSpec& spec, const RemField& field, double t,
                       const StateVector& v, const ExpmOptions& options = {});

// ---------------------------------------------------------------- SCGF

enum class ScgfMethod { Krylov, Dense };

std::string_view to_string(ScgfMethod method) noexcept;
/// "krylov" or "dense"; throws std::invalid_argument otherwise.
ScgfMethod parse_scgf_method(std::string_view name);

struct ScgfRecord
{
    int n = 0;
    double t = 0.0;
    double lambda = 0.0;
    double s = 0.0;
    std::uint64_t seed = 0;
    /// ln <-| exp(t W) |->.
    double log_z = 0.0;
    double theta_n = 0.0;
    double theta_limit = 0.0;
    ScgfMethod method = ScgfMethod::Krylov;
    int krylov_dim = 0;
    std::uint64_t substeps = 0;
    double residual_estimate = 0.0;
};

ScgfRecord scgf_finite(double t, double lambda, double s, const RemField& field,
                       ScgfMethod method, const ExpmOptions& options = {});
ScgfRecord scgf_finite(double t, double lambda, double s,
                       std::shared_ptr<const EnergyTable> table, ScgfMethod method,
                       const ExpmOptions& options = {}, std::uint64_t seed = 0);

// ---------------------------------------------------------------- projector

struct SpectralSummary
{
    int n = 0;
    double gamma = 0.0;
    double lambda = 0.0;
    double delta = 0.0;
    std::uint64_t seed = 0;
    /// delta * lambda * n.
    double threshold = 0.0;
    /// Eigenvalues above the threshold, descending.
    std::vector<double> eigenvalues_above;
    /// |<-|psi_j>|^2 for each entry of eigenvalues_above.
    std::vector<double> flat_overlaps;
    std::uint64_t trace_above = 0;
    /// <-| Q_{delta lambda} |-> = sum of flat_overlaps.
    double projection = 0.0;
    /// Sum of the overlaps over the whole spectrum (full_spectrum only).
    std::optional<double> total_overlap;
    double shift_sup = 0.0;
};

struct ProjectorOptions
{
    /// Decompose the whole spectrum (slower) to report total_overlap.
    bool full_spectrum = false;
};

/// Dense spectral projection of gamma T - lambda U onto (delta lambda n, inf).
SpectralSummary projector_overlap(const RemField& field, double gamma, double lambda,
                                  double delta, const ProjectorOptions& options = {});
SpectralSummary projector_overlap(const EnergyTable& table, double gamma, double lambda,
                                  double delta, const ProjectorOptions& options = {});

struct ShiftStatistic
{
    double shift_sup = 0.0;
    /// shift_sup / sqrt(n).
    double ratio = 0.0;
    /// E_j + lambda U(sigma_j) for each eigenvalue above the threshold.
    std::vector<double> shifts;
    /// sigma_j paired with the j-th largest eigenvalue.
    std::vector<std::uint64_t> paired;
};

/// Pairs the j-th largest eigenvalue with the j-th lowest classical energy
/// (ties broken by configuration index). `eigenvalues_desc` may be truncated;
/// only its entries above `threshold` enter the supremum.
ShiftStatistic pair_shifts(const EnergyTable& table, double lambda,
                           const std::vector<double>& eigenvalues_desc, double threshold);

/// Requires lambda * delta > gamma.
ShiftStatistic shift_statistic(const RemField& field, double gamma, double lambda, double delta);
ShiftStatistic shift_statistic(const EnergyTable& table, double gamma, double lambda,
                               double delta);

// ---------------------------------------------------------------- phi(E)

struct PhiParameters
{
    double gamma = 0.0;
    double lambda = 0.0;
    double delta = 0.0;
    double eps = 0.0;
    double energy = 0.0;
    int k_max = 2;
    double solver_tol = 1e-12;
};

struct PhiOrderReport
{
    int k = 0;
    /// max over sigma in L_eta of |phi^{(k)}(E)(sigma)|.
    double max_abs = 0.0;
    double bound = 0.0;
    bool pass = false;
};

struct PhiReport
{
    int n = 0;
    std::uint64_t seed = 0;
    double eta = 0.0;
    double energy = 0.0;
    /// Top of the spectrum of the restricted operator.
    double restricted_top = 0.0;
    std::vector<std::uint64_t> members;
    /// phi(E)(sigma) for sigma in members.
    std::vector<double> phi;
    /// orders[0] is phi itself (k = 0), orders[k] is phi^{(k)}.
    std::vector<PhiOrderReport> orders;
    bool vacuous = false;
    bool all_pass = false;
};

/// Bound for |phi(E)|: 1 + 2 gamma delta / ((lambda delta - gamma) eps).
double phi_bound(const PhiParameters& p);
/// Bound for |phi^{(k)}(E)|, k >= 1:
/// (gamma / n^k) (2 delta / ((lambda delta - gamma) eps))^{k+1}.
double phi_order_bound(const PhiParameters& p, int n, int k);

PhiReport phi_vector_check(const RemField& field, const PhiParameters& params);
PhiReport phi_vector_check(const EnergyTable& table, const PhiParameters& params);

}  // namespace remlab
