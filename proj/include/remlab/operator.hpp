#pragma once

/**
 * @file operator.hpp
 * @brief Matrix-free operators on l^2 of the Hamming cube.
 *
 * Every operator here has the form
 *
 *     Op = hopping * T + coupling * diag(U) + shift,
 *
 * where T is the cube adjacency (neighbor of sigma along spin j is
 * sigma ^ (1 << j)). Two parametrizations are exposed:
 *
 *  - TiltedMarkov(lambda, s):  e^{-s} T - n + lambda U   (tilted generator)
 *  - Qrem(gamma, lambda):      gamma T - lambda U         (QREM Hamiltonian)
 *
 * The tilted generator carries +lambda U. The Feynman-Kac moment generating
 * function E[exp(-lambda U_t)] therefore corresponds to the generator at
 * -lambda; both agree in law over the REM ensemble.
 *
 * An optional exclusion mask confines the operator to the complement of a
 * configuration set: masked rows and columns act as zero.
 */

#include <cstdint>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "remlab/remfield.hpp"

namespace remlab {

struct TiltedMarkov
{
    double lambda = 0.0;
    double s = 0.0;
};

struct Qrem
{
    double gamma = 0.0;
    double lambda = 0.0;
};

/// Set of excluded configurations, kept both as a sorted list and as a flag
/// per configuration.
class ConfigurationMask
{
  public:
    ConfigurationMask(int n, std::vector<std::uint64_t> members);

    int n() const noexcept { return n_; }
    bool contains(std::uint64_t sigma) const noexcept { return flags_[sigma] != 0; }
    const std::vector<std::uint64_t>& members() const noexcept { return members_; }
    std::uint64_t count() const noexcept { return members_.size(); }

  private:
    int n_;
    std::vector<std::uint64_t> members_;
    std::vector<std::uint8_t> flags_;
};

class GeneratorSpec
{
  public:
    using Kind = std::variant<TiltedMarkov, Qrem>;

    GeneratorSpec(int n, Kind kind, std::shared_ptr<const ConfigurationMask> mask = nullptr);

    static GeneratorSpec tilted(int n, double lambda, double s)
    {
        return GeneratorSpec(n, TiltedMarkov{lambda, s});
    }
    static GeneratorSpec qrem(int n, double gamma, double lambda)
    {
        return GeneratorSpec(n, Qrem{gamma, lambda});
    }

    int n() const noexcept { return n_; }
    const Kind& kind() const noexcept { return kind_; }
    bool is_qrem() const noexcept { return std::holds_alternative<Qrem>(kind_); }
    const std::shared_ptr<const ConfigurationMask>& mask() const noexcept { return mask_; }

    GeneratorSpec with_mask(std::shared_ptr<const ConfigurationMask> mask) const;

    double hopping() const noexcept;
    double coupling() const noexcept;
    double shift() const noexcept;

  private:
    int n_;
    Kind kind_;
    std::shared_ptr<const ConfigurationMask> mask_;
};

/// Amplitudes with an accumulated logarithmic normalization: the represented
/// vector is exp(log_scale) * entries.
struct StateVector
{
    int n = 0;
    std::vector<double> entries;
    double log_scale = 0.0;

    StateVector() = default;
    StateVector(int n, std::vector<double> entries, double log_scale = 0.0);

    static StateVector zeros(int n);
    static StateVector basis(int n, std::uint64_t sigma);
};

/// Normalized flat vector 2^{-n/2} (1, ..., 1).
StateVector flat_vector(int n);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

/// Operator bound to a landscape.
class HypercubeOperator
{
  public:
    HypercubeOperator(GeneratorSpec spec, std::shared_ptr<const EnergyTable> energies);
    HypercubeOperator(GeneratorSpec spec, const RemField& field);

    const GeneratorSpec& spec() const noexcept { return spec_; }
    const EnergyTable& energies() const noexcept { return *energies_; }
    const std::shared_ptr<const EnergyTable>& energies_ptr() const noexcept { return energies_; }
    int n() const noexcept { return spec_.n(); }
    std::uint64_t dim() const noexcept { return std::uint64_t{1} << spec_.n(); }

    /// Diagonal entry at sigma (zero on masked configurations).
    double diagonal(std::uint64_t sigma) const noexcept;

    bool excluded(std::uint64_t sigma) const noexcept
    {
        return spec_.mask() && spec_.mask()->contains(sigma);
    }

    /// out = Op * in.
    void apply(std::span<const double> in, std::span<double> out) const;
    StateVector apply(const StateVector& v) const;

  private:
    GeneratorSpec spec_;
    std::shared_ptr<const EnergyTable> energies_;
};

StateVector apply(const GeneratorSpec& spec, const RemField& field, const StateVector& v);

inline constexpr int kDenseCap = 12;

/// Explicit 2^n x 2^n matrix (n <= kDenseCap).
Eigen::MatrixXd materialize_dense(const HypercubeOperator& op);
Eigen::MatrixXd materialize_dense(const GeneratorSpec& spec, const RemField& field);

/// A = 1^> gamma T 1^<: couples amplitudes on the excluded set L to its
/// complement.
class BoundaryCoupling
{
  public:
    BoundaryCoupling(double gamma, std::shared_ptr<const ConfigurationMask> mask);

    double gamma() const noexcept { return gamma_; }
    const ConfigurationMask& mask() const noexcept { return *mask_; }

    /// (A v)(tau) = gamma * sum of v over neighbors of tau inside L, tau outside L.
    void apply(std::span<const double> in, std::span<double> out) const;
    /// (A* w)(sigma) = gamma * sum of w over neighbors of sigma outside L, sigma in L.
    void apply_adjoint(std::span<const double> in, std::span<double> out) const;

  private:
    double gamma_;
    std::shared_ptr<const ConfigurationMask> mask_;
};

struct Restriction
{
    /// H^>: the QREM confined to the complement of L_eta.
    GeneratorSpec restricted;
    BoundaryCoupling coupling;
    double eta = 0.0;
};

/// Restriction of a QREM spec to the complement of L_eta. Throws for the
/// tilted Markov kind.
Restriction restrict_complement(const GeneratorSpec& spec, const RemField& field, double eta);
Restriction restrict_complement(const GeneratorSpec& spec, const EnergyTable& table, double eta);

}  // namespace remlab
