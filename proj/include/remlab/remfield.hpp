#pragma once

/**
 * @file remfield.hpp
 * @brief Seed-keyed Random Energy Model landscapes on the Hamming cube.
 *
 * A configuration sigma in {0, ..., 2^n - 1} encodes the spins bitwise,
 * sigma_j = 1 - 2 * bit_j. The energy U(sigma) = shift + scale * z(seed, sigma)
 * with z a counter-based standard normal, so a landscape costs O(1) memory
 * and any value can be regenerated bit-identically on demand. The REM proper
 * has scale sqrt(n) and shift 0.
 */

#include <cstdint>
#include <limits>
#include <vector>

namespace remlab {

inline constexpr int kMaxSpins = 30;
/// Largest n for which a full energy table is materialized in memory.
inline constexpr int kMaxTableSpins = 26;

class RemField
{
  public:
    /// The REM: iid N(0, n) energies. Requires 1 <= n <= 30.
    RemField(std::uint64_t seed, int n);

    /// Energies shift + scale * z. scale = 0 gives a constant landscape.
    static RemField synthetic(int n, double scale, double shift, std::uint64_t seed = 0);

    int n() const noexcept { return n_; }
    std::uint64_t seed() const noexcept { return seed_; }
    double scale() const noexcept { return scale_; }
    double shift() const noexcept { return shift_; }
    std::uint64_t size() const noexcept { return std::uint64_t{1} << n_; }

    /// Checked access; throws std::out_of_range for sigma >= 2^n.
    double energy(std::uint64_t sigma) const;

    /// Unchecked access.
    double operator()(std::uint64_t sigma) const noexcept;

    /// Full table of 2^n energies (n <= 26).
    std::vector<double> table() const;

  private:
    RemField(std::uint64_t seed, int n, double scale, double shift);

    std::uint64_t seed_;
    int n_;
    double scale_;
    double shift_;
    std::uint64_t key_;
};

/// Materialized landscape consumed by the operators. Values may come from a
/// RemField or be arbitrary (perturbed or hand-built potentials).
class EnergyTable
{
  public:
    explicit EnergyTable(const RemField& field);
    EnergyTable(int n, std::vector<double> values);

    int n() const noexcept { return n_; }
    std::uint64_t size() const noexcept { return values_.size(); }
    const std::vector<double>& values() const noexcept { return values_; }
    double operator[](std::uint64_t sigma) const noexcept { return values_[sigma]; }
    double operator()(std::uint64_t sigma) const noexcept { return values_[sigma]; }
    double min() const noexcept { return min_; }
    double max() const noexcept { return max_; }

  private:
    int n_;
    std::vector<double> values_;
    double min_;
    double max_;
};

struct ExtremeSet
{
    double delta = 0.0;
    std::uint64_t count = 0;
    /// Members in increasing configuration order, truncated to the cap.
    std::vector<std::uint64_t> members;
    int n = 0;
    std::uint64_t seed = 0;
};

inline constexpr std::uint64_t kNoCap = std::numeric_limits<std::uint64_t>::max();

/// L_delta = { sigma : U(sigma) < -delta n } by full scan.
ExtremeSet extreme_set(const RemField& field, double delta, std::uint64_t member_cap = kNoCap);
ExtremeSet extreme_set(const EnergyTable& table, double delta, std::uint64_t member_cap = kNoCap);

/// (1/n) ln( 2^{-n} sum_sigma e^{beta U(sigma)} ), log-sum-exp stabilized.
double empirical_pressure(const RemField& field, double beta);
double empirical_pressure(const EnergyTable& table, double beta);

struct MinEnergy
{
    double value = 0.0;
    std::uint64_t argmin = 0;
    /// -beta_c n + ln(n ln 2) / (2 beta_c).
    double asymptote = 0.0;
};

MinEnergy min_energy(const RemField& field);
MinEnergy min_energy(const EnergyTable& table);

/// Mean energy 2^{-n} sum_sigma U(sigma), fixed-order summation.
double mean_energy(const RemField& field);
double mean_energy(const EnergyTable& table);

}  // namespace remlab
