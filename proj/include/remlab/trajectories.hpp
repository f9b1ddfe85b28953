#pragma once

/**
 * @file trajectories.hpp
 * @brief Continuous-time simple random walk on the Hamming cube and
 *        Feynman-Kac estimators for the time-integrated energy.
 *
 * Every spin flips at rate 1 (total escape rate n), the initial state is
 * uniform. Sample i of an estimator uses rng::Stream(master_seed, i), so the
 * estimates are reproducible and independent of the worker count.
 *
 * The estimators target E[exp(lambda U_t)] = <-| exp(t (T - n + lambda U)) |->,
 * the tilted generator at s = 0 with the canonical +lambda U sign.
 */

#include <cstdint>
#include <optional>
#include <vector>

#include "remlab/remfield.hpp"
#include "remlab/rng.hpp"

namespace remlab {

struct Trajectory
{
    int n = 0;
    double t_final = 0.0;
    std::uint64_t initial = 0;
    /// Strictly increasing, in (0, t_final].
    std::vector<double> jump_times;
    /// Spin flipped at each jump, in [0, n).
    std::vector<int> flips;

    std::size_t jump_count() const noexcept { return jump_times.size(); }
    std::uint64_t final_state() const noexcept;
};

Trajectory sample_trajectory(int n, double t, rng::Stream& stream);

/// Time reversal s -> t_final - s of the path.
Trajectory reversed(const Trajectory& traj);

/// U_t = int_0^t U(omega(s)) ds over the holding intervals.
double integrate_energy(const Trajectory& traj, const EnergyTable& table);
double integrate_energy(const Trajectory& traj, const RemField& field);

/// Fraction of [0, t_final] during which `spin` is up (bit clear).
double up_fraction(const Trajectory& traj, int spin);

struct MgfEstimate
{
    int n = 0;
    double t = 0.0;
    double lambda = 0.0;
    std::uint64_t samples = 0;
    double mean = 0.0;
    double std_error = 0.0;
    /// ln(mean), finite even when mean itself overflows.
    double log_mean = 0.0;
    std::optional<double> exact;
};

/// Monte Carlo estimate of E[exp(lambda U_t)]; requires samples >= 100.
/// With `exact`, adds the dense semigroup value (n <= 12).
MgfEstimate mgf_estimate(int n, double t, double lambda, std::uint64_t samples,
                         std::uint64_t master_seed, const EnergyTable& table, bool exact = false);
MgfEstimate mgf_estimate(int n, double t, double lambda, std::uint64_t samples,
                         std::uint64_t master_seed, const RemField& field, bool exact = false);

struct ActivityOptions
{
    int jackknife_blocks = 100;
    /// Minimum effective sample size before the tilted interval is flagged.
    double min_ess = 30.0;
    /// Finite-difference step of the dense oracle; <= 0 disables it.
    double oracle_step = 1e-4;
};

struct ActivityEstimate
{
    std::uint64_t samples = 0;
    /// mean K / (n t) under the untilted walk.
    double untilted = 0.0;
    double untilted_std_error = 0.0;
    /// E[K exp(lambda U_t)] / (n t E[exp(lambda U_t)]).
    double tilted = 0.0;
    double tilted_std_error = 0.0;
    double effective_sample_size = 0.0;
    bool degenerate = false;
    /// -(theta_n(s = h) - theta_n(s = -h)) / (2h) from the dense backend.
    std::optional<double> oracle;
};

ActivityEstimate activity_estimate(int n, double t, double lambda, std::uint64_t samples,
                                   std::uint64_t master_seed, const EnergyTable& table,
                                   const ActivityOptions& options = {});
ActivityEstimate activity_estimate(int n, double t, double lambda, std::uint64_t samples,
                                   std::uint64_t master_seed, const RemField& field,
                                   const ActivityOptions& options = {});

/// Dense central difference -d theta_n / ds at s = 0 (n <= 12).
double dense_activity(const EnergyTable& table, double t, double lambda, double h);

}  // namespace remlab
