#include "remlab/remfield.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

#include "remlab/analytic.hpp"
#include "remlab/parallel.hpp"
#include "remlab/rng.hpp"

namespace remlab {

namespace {

constexpr std::uint64_t kLandscapeDomain = 0x52454d;  // "REM"

void check_spins(int n)
{
    if (n < 1 || n > kMaxSpins) {
        throw std::invalid_argument("spin count must lie in [1, " + std::to_string(kMaxSpins)
                                    + "], got " + std::to_string(n));
    }
}

struct MaxSum
{
    double max = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
};

MaxSum merge(const MaxSum& a, const MaxSum& b)
{
    if (b.max == -std::numeric_limits<double>::infinity()) {
        return a;
    }
    if (a.max == -std::numeric_limits<double>::infinity()) {
        return b;
    }
    if (a.max >= b.max) {
        return {a.max, a.sum + b.sum * std::exp(b.max - a.max)};
    }
    return {b.max, b.sum + a.sum * std::exp(a.max - b.max)};
}

template <class Energy>
ExtremeSet extreme_set_impl(int n, std::uint64_t seed, Energy&& energy, double delta,
                            std::uint64_t member_cap)
{
    if (!(delta > 0.0)) {
        throw std::invalid_argument("extreme_set: delta must be positive");
    }
    check_spins(n);
    const std::uint64_t size = std::uint64_t{1} << n;
    const double level = -delta * n;
    using Members = std::vector<std::uint64_t>;
    Members all = parallel::chunked_reduce(
        size, Members{},
        [&](std::uint64_t begin, std::uint64_t end) {
            Members part;
            for (std::uint64_t s = begin; s < end; ++s) {
                if (energy(s) < level) {
                    part.push_back(s);
                }
            }
            return part;
        },
        [](Members acc, const Members& part) {
            acc.insert(acc.end(), part.begin(), part.end());
            return acc;
        });
    ExtremeSet out;
    out.delta = delta;
    out.n = n;
    out.seed = seed;
    out.count = all.size();
    if (all.size() > member_cap) {
        all.resize(member_cap);
    }
    out.members = std::move(all);
    return out;
}

template <class Energy>
double empirical_pressure_impl(int n, Energy&& energy, double beta)
{
    const std::uint64_t size = std::uint64_t{1} << n;
    if (beta == 0.0) {
        return 0.0;
    }
    const MaxSum total = parallel::chunked_reduce(
        size, MaxSum{},
        [&](std::uint64_t begin, std::uint64_t end) {
            double m = -std::numeric_limits<double>::infinity();
            for (std::uint64_t s = begin; s < end; ++s) {
                m = std::max(m, beta * energy(s));
            }
            double acc = 0.0;
            for (std::uint64_t s = begin; s < end; ++s) {
                acc += std::exp(beta * energy(s) - m);
            }
            return MaxSum{m, acc};
        },
        merge);
    return (total.max + std::log(total.sum) - n * std::numbers::ln2) / n;
}

template <class Energy>
MinEnergy min_energy_impl(int n, Energy&& energy)
{
    const std::uint64_t size = std::uint64_t{1} << n;
    using Best = std::pair<double, std::uint64_t>;
    const Best best = parallel::chunked_reduce(
        size, Best{std::numeric_limits<double>::infinity(), 0},
        [&](std::uint64_t begin, std::uint64_t end) {
            Best b{std::numeric_limits<double>::infinity(), begin};
            for (std::uint64_t s = begin; s < end; ++s) {
                const double e = energy(s);
                if (e < b.first) {
                    b = {e, s};
                }
            }
            return b;
        },
        [](const Best& a, const Best& b) { return b.first < a.first ? b : a; });
    const double bc = analytic::Constants::beta_c();
    MinEnergy out;
    out.value = best.first;
    out.argmin = best.second;
    out.asymptote = -bc * n + std::log(n * std::numbers::ln2) / (2.0 * bc);
    return out;
}

template <class Energy>
double mean_energy_impl(int n, Energy&& energy)
{
    const std::uint64_t size = std::uint64_t{1} << n;
    const double sum = parallel::chunked_reduce(
        size, 0.0,
        [&](std::uint64_t begin, std::uint64_t end) {
            double acc = 0.0;
            for (std::uint64_t s = begin; s < end; ++s) {
                acc += energy(s);
            }
            return acc;
        },
        [](double a, double b) { return a + b; });
    return sum / static_cast<double>(size);
}

}  // namespace

RemField::RemField(std::uint64_t seed, int n)
    : RemField(seed, n, n >= 1 ? std::sqrt(static_cast<double>(n)) : 0.0, 0.0)
{
}

RemField::RemField(std::uint64_t seed, int n, double scale, double shift)
    : seed_(seed), n_(n), scale_(scale), shift_(shift),
      key_(rng::derive_key(seed, kLandscapeDomain))
{
    check_spins(n);
}

RemField RemField::synthetic(int n, double scale, double shift, std::uint64_t seed)
{
    return RemField(seed, n, scale, shift);
}

double RemField::energy(std::uint64_t sigma) const
{
    if (sigma >= size()) {
        throw std::out_of_range("configuration index " + std::to_string(sigma)
                                + " outside [0, 2^" + std::to_string(n_) + ")");
    }
    return (*this)(sigma);
}

double RemField::operator()(std::uint64_t sigma) const noexcept
{
    if (scale_ == 0.0) {
        return shift_;
    }
    return shift_ + scale_ * rng::standard_normal(key_, sigma);
}

std::vector<double> RemField::table() const
{
    if (n_ > kMaxTableSpins) {
        throw std::length_error("energy table limited to n <= " + std::to_string(kMaxTableSpins));
    }
    std::vector<double> values(size());
    parallel::for_each_index(size(), [&](std::uint64_t s) { values[s] = (*this)(s); });
    return values;
}

EnergyTable::EnergyTable(const RemField& field) : EnergyTable(field.n(), field.table()) {}

EnergyTable::EnergyTable(int n, std::vector<double> values) : n_(n), values_(std::move(values))
{
    check_spins(n);
    if (values_.size() != (std::uint64_t{1} << n)) {
        throw std::invalid_argument("energy table must hold exactly 2^n values");
    }
    const auto [lo, hi] = std::minmax_element(values_.begin(), values_.end());
    min_ = *lo;
    max_ = *hi;
}

ExtremeSet extreme_set(const RemField& field, double delta, std::uint64_t member_cap)
{
    return extreme_set_impl(field.n(), field.seed(), field, delta, member_cap);
}

ExtremeSet extreme_set(const EnergyTable& table, double delta, std::uint64_t member_cap)
{
    return extreme_set_impl(table.n(), 0, table, delta, member_cap);
}

double empirical_pressure(const RemField& field, double beta)
{
    return empirical_pressure_impl(field.n(), field, beta);
}

double empirical_pressure(const EnergyTable& table, double beta)
{
    return empirical_pressure_impl(table.n(), table, beta);
}

MinEnergy min_energy(const RemField& field) { return min_energy_impl(field.n(), field); }
MinEnergy min_energy(const EnergyTable& table) { return min_energy_impl(table.n(), table); }

double mean_energy(const RemField& field) { return mean_energy_impl(field.n(), field); }
double mean_energy(const EnergyTable& table) { return mean_energy_impl(table.n(), table); }

}  // namespace remlab
