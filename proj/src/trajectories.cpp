#include "remlab/trajectories.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "remlab/operator.hpp"
#include "remlab/parallel.hpp"
#include "remlab/spectral.hpp"

namespace remlab {

std::uint64_t Trajectory::final_state() const noexcept
{
    std::uint64_t s = initial;
    for (int j : flips) {
        s ^= std::uint64_t{1} << j;
    }
    return s;
}

Trajectory sample_trajectory(int n, double t, rng::Stream& stream)
{
    if (n < 1 || n > kMaxSpins) {
        throw std::invalid_argument("sample_trajectory: n out of range");
    }
    if (!(t > 0.0) || !std::isfinite(t)) {
        throw std::invalid_argument("sample_trajectory: t must be positive");
    }
    Trajectory traj;
    traj.n = n;
    traj.t_final = t;
    traj.initial = stream.bits(n);
    double clock = 0.0;
    for (;;) {
        clock += stream.exponential(static_cast<double>(n));
        if (clock > t) {
            break;
        }
        traj.jump_times.push_back(clock);
        traj.flips.push_back(static_cast<int>(stream.below(static_cast<std::uint64_t>(n))));
    }
    return traj;
}

Trajectory reversed(const Trajectory& traj)
{
    Trajectory r;
    r.n = traj.n;
    r.t_final = traj.t_final;
    r.initial = traj.final_state();
    const std::size_t k = traj.jump_count();
    r.jump_times.reserve(k);
    r.flips.reserve(k);
    for (std::size_t i = k; i-- > 0;) {
        r.jump_times.push_back(traj.t_final - traj.jump_times[i]);
        r.flips.push_back(traj.flips[i]);
    }
    return r;
}

namespace {

// Summation by parts: U(final) t - sum_i tau_i (U(after jump i) - U(before)).
// A constant landscape therefore integrates to exactly c t.
template <class Energy>
double integrate(const Trajectory& traj, const Energy& energy)
{
    std::uint64_t state = traj.initial;
    double prev = energy(state);
    double acc = 0.0;
    for (std::size_t i = 0; i < traj.jump_count(); ++i) {
        state ^= std::uint64_t{1} << traj.flips[i];
        const double next = energy(state);
        acc += traj.jump_times[i] * (next - prev);
        prev = next;
    }
    return prev * traj.t_final - acc;
}

}  // namespace

double integrate_energy(const Trajectory& traj, const EnergyTable& table)
{
    if (traj.n != table.n()) {
        throw std::invalid_argument("integrate_energy: trajectory and landscape disagree on n");
    }
    return integrate(traj, table);
}

double integrate_energy(const Trajectory& traj, const RemField& field)
{
    if (traj.n != field.n()) {
        throw std::invalid_argument("integrate_energy: trajectory and landscape disagree on n");
    }
    return integrate(traj, field);
}

double up_fraction(const Trajectory& traj, int spin)
{
    if (spin < 0 || spin >= traj.n) {
        throw std::out_of_range("up_fraction: spin index out of range");
    }
    const std::uint64_t bit = std::uint64_t{1} << spin;
    bool up = (traj.initial & bit) == 0;
    double last = 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < traj.jump_count(); ++i) {
        if (traj.flips[i] == spin) {
            if (up) {
                acc += traj.jump_times[i] - last;
            }
            last = traj.jump_times[i];
            up = !up;
        }
    }
    if (up) {
        acc += traj.t_final - last;
    }
    return acc / traj.t_final;
}

namespace {

struct Draws
{
    std::vector<double> log_weight;  // lambda U_t
    std::vector<double> jumps;
};

Draws draw(int n, double t, double lambda, std::uint64_t samples, std::uint64_t master_seed,
           const EnergyTable& table)
{
    if (table.n() != n) {
        throw std::invalid_argument("estimator: n and landscape disagree");
    }
    if (samples < 100) {
        throw std::invalid_argument("estimator: at least 100 samples are required");
    }
    Draws d;
    d.log_weight.resize(samples);
    d.jumps.resize(samples);
    parallel::for_each_index(samples, [&](std::uint64_t i) {
        rng::Stream stream(master_seed, i);
        const Trajectory traj = sample_trajectory(n, t, stream);
        d.log_weight[i] = lambda * integrate_energy(traj, table);
        d.jumps[i] = static_cast<double>(traj.jump_count());
    });
    return d;
}

struct Moments
{
    double s0 = 0.0;
    double s1 = 0.0;
    double s2 = 0.0;
};

// Fixed-order sums of f(i)^0..2 over [0, size).
template <class F>
Moments moments(std::uint64_t size, F&& f)
{
    return parallel::chunked_reduce(
        size, Moments{},
        [&](std::uint64_t begin, std::uint64_t end) {
            Moments m;
            for (std::uint64_t i = begin; i < end; ++i) {
                const double v = f(i);
                m.s0 += 1.0;
                m.s1 += v;
                m.s2 += v * v;
            }
            return m;
        },
        [](Moments a, const Moments& b) {
            a.s0 += b.s0;
            a.s1 += b.s1;
            a.s2 += b.s2;
            return a;
        });
}

double standard_error(const Moments& m)
{
    const double mean = m.s1 / m.s0;
    const double var = std::max(0.0, (m.s2 - m.s0 * mean * mean) / (m.s0 - 1.0));
    return std::sqrt(var / m.s0);
}

}  // namespace

MgfEstimate mgf_estimate(int n, double t, double lambda, std::uint64_t samples,
                         std::uint64_t master_seed, const EnergyTable& table, bool exact)
{
    MgfEstimate est;
    est.n = n;
    est.t = t;
    est.lambda = lambda;
    est.samples = samples;
    if (exact) {
        if (n > kDenseCap) {
            throw std::length_error("mgf_estimate: exact reference limited to n <= 12");
        }
        const ScgfRecord rec = scgf_finite(t, lambda, 0.0, std::make_shared<const EnergyTable>(table),
                                           ScgfMethod::Dense);
        est.exact = std::exp(rec.log_z);
    }
    if (lambda == 0.0) {
        if (table.n() != n || samples < 100) {
            throw std::invalid_argument("mgf_estimate: bad n or fewer than 100 samples");
        }
        est.mean = 1.0;
        est.std_error = 0.0;
        est.log_mean = 0.0;
        return est;
    }
    const Draws d = draw(n, t, lambda, samples, master_seed, table);
    const double top = *std::max_element(d.log_weight.begin(), d.log_weight.end());
    const Moments m = moments(samples, [&](std::uint64_t i) { return std::exp(d.log_weight[i] - top); });
    est.log_mean = top + std::log(m.s1 / m.s0);
    est.mean = std::exp(est.log_mean);
    est.std_error = standard_error(m) * std::exp(top);
    return est;
}

MgfEstimate mgf_estimate(int n, double t, double lambda, std::uint64_t samples,
                         std::uint64_t master_seed, const RemField& field, bool exact)
{
    return mgf_estimate(n, t, lambda, samples, master_seed, EnergyTable(field), exact);
}

double dense_activity(const EnergyTable& table, double t, double lambda, double h)
{
    if (!(h > 0.0)) {
        throw std::invalid_argument("dense_activity: step must be positive");
    }
    const auto shared = std::make_shared<const EnergyTable>(table);
    const double up = scgf_finite(t, lambda, h, shared, ScgfMethod::Dense).theta_n;
    const double down = scgf_finite(t, lambda, -h, shared, ScgfMethod::Dense).theta_n;
    return -(up - down) / (2.0 * h);
}

ActivityEstimate activity_estimate(int n, double t, double lambda, std::uint64_t samples,
                                   std::uint64_t master_seed, const EnergyTable& table,
                                   const ActivityOptions& options)
{
    if (options.jackknife_blocks < 2
        || samples < static_cast<std::uint64_t>(options.jackknife_blocks)) {
        throw std::invalid_argument("activity_estimate: need at least two jackknife blocks "
                                    "and one sample per block");
    }
    const Draws d = draw(n, t, lambda, samples, master_seed, table);
    const double scale = 1.0 / (n * t);

    ActivityEstimate est;
    est.samples = samples;
    const Moments k = moments(samples, [&](std::uint64_t i) { return d.jumps[i] * scale; });
    est.untilted = k.s1 / k.s0;
    est.untilted_std_error = standard_error(k);

    const double top = *std::max_element(d.log_weight.begin(), d.log_weight.end());
    const auto blocks = static_cast<std::uint64_t>(options.jackknife_blocks);
    std::vector<double> num(blocks, 0.0);
    std::vector<double> den(blocks, 0.0);
    double w1 = 0.0;
    double w2 = 0.0;
    for (std::uint64_t i = 0; i < samples; ++i) {
        const double w = std::exp(d.log_weight[i] - top);
        const std::uint64_t b = i * blocks / samples;
        num[b] += w * d.jumps[i] * scale;
        den[b] += w;
        w1 += w;
        w2 += w * w;
    }
    double num_total = 0.0;
    double den_total = 0.0;
    for (std::uint64_t b = 0; b < blocks; ++b) {
        num_total += num[b];
        den_total += den[b];
    }
    est.tilted = num_total / den_total;
    std::vector<double> leave_out(blocks);
    double lo_mean = 0.0;
    for (std::uint64_t b = 0; b < blocks; ++b) {
        leave_out[b] = (num_total - num[b]) / (den_total - den[b]);
        lo_mean += leave_out[b];
    }
    lo_mean /= static_cast<double>(blocks);
    double spread = 0.0;
    for (double v : leave_out) {
        spread += (v - lo_mean) * (v - lo_mean);
    }
    const auto nb = static_cast<double>(blocks);
    est.tilted_std_error = std::sqrt((nb - 1.0) / nb * spread);
    est.effective_sample_size = w1 * w1 / w2;
    est.degenerate = est.effective_sample_size < options.min_ess;
    if (options.oracle_step > 0.0 && n <= kDenseCap) {
        est.oracle = dense_activity(table, t, lambda, options.oracle_step);
    }
    return est;
}

ActivityEstimate activity_estimate(int n, double t, double lambda, std::uint64_t samples,
                                   std::uint64_t master_seed, const RemField& field,
                                   const ActivityOptions& options)
{
    return activity_estimate(n, t, lambda, samples, master_seed, EnergyTable(field), options);
}

}  // namespace remlab
