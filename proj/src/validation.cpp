#include "remlab/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <memory>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "remlab/analytic.hpp"
#include "remlab/operator.hpp"
#include "remlab/remfield.hpp"
#include "remlab/resolvent.hpp"
#include "remlab/rng.hpp"
#include "remlab/spectral.hpp"
#include "remlab/trajectories.hpp"

namespace remlab::validation {

namespace {

using analytic::Constants;

// High-precision reference values (50-digit arithmetic, rounded).
constexpr double kLn2 = 0.69314718055994530942;
constexpr double kBetaC = 1.1774100225154746910;
constexpr double kLambda2 = 1.6986436005760381;
constexpr double kArcosh2 = 1.3169578969248167086;
constexpr double kQremLambda2 = 0.89403771013849761;
constexpr double kGlassTheta = 1.0082464547509767;

double median(std::vector<double> v)
{
    if (v.empty()) {
        throw std::invalid_argument("median of an empty sample");
    }
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::string fmt(double x, int digits = 6)
{
    std::ostringstream os;
    os.precision(digits);
    os << x;
    return os.str();
}

class Checker
{
  public:
    explicit Checker(CriterionResult& r) : r_(r) {}

    void expect(bool ok, const std::string& what)
    {
        if (!ok) {
            r_.pass = false;
            if (++failed_ <= kShown) {
                failures_ << (failures_.tellp() > 0 ? "; " : "") << what;
            }
        }
    }

    void note(const std::string& what) { notes_ << (notes_.tellp() > 0 ? "; " : "") << what; }

    void finish()
    {
        r_.detail = r_.pass ? notes_.str() : failures_.str();
        if (failed_ > kShown) {
            r_.detail += "; ... " + std::to_string(failed_ - kShown) + " more failures";
        }
    }

  private:
    static constexpr int kShown = 5;

    CriterionResult& r_;
    int failed_ = 0;
    std::ostringstream failures_;
    std::ostringstream notes_;
};

// ---------------------------------------------------------------- 1

void closed_forms(CriterionResult& r, Level)
{
    Checker c(r);
    const double tol = 1e-12;
    auto close = [&](double got, double want, const char* what) {
        c.expect(std::abs(got - want) <= tol,
                 std::string(what) + " = " + fmt(got, 17) + ", expected " + fmt(want, 17));
    };
    close(analytic::p_rem(Constants::beta_c()), kLn2, "p_rem(beta_c)");
    close(Constants::beta_c(), kBetaC, "beta_c");
    close(Constants::beta_c() * Constants::beta_c(), 2.0 * kLn2, "beta_c^2");
    close(Constants::lambda_2(), kLambda2, "lambda_2");
    close(Constants::t_c(), kLn2, "t_c");
    close(Constants::qrem_T_c(), kArcosh2, "qrem_T_c");
    close(Constants::qrem_lambda_2(), kQremLambda2, "qrem_lambda_2");
    close(analytic::theta_limit(kLn2, kLambda2, 0.0), 0.0, "theta at the triple point");

    const auto p = analytic::classify_phase(Constants::t_c(), Constants::lambda_2());
    c.expect(p.label == analytic::PhaseLabel::boundary(analytic::BoundaryKind::Triple),
             "triple point classified as " + analytic::to_string(p.label));
    const auto bc = analytic::boundary_curves(Constants::lambda_2());
    c.expect(bc.critical.size() == 1, "boundary_curves(lambda_2) returned "
                                          + std::to_string(bc.critical.size()) + " points");
    if (bc.critical.size() == 1) {
        close(bc.critical[0].inverse_time, 1.0 / kLn2, "triple inverse time");
    }
    c.note("all constants within 1e-12");
    c.finish();
}

// ---------------------------------------------------------------- 2

void legendre(CriterionResult& r, Level level)
{
    Checker c(r);
    const int grid = level == Level::Full ? 20 : 10;
    double worst = 0.0;
    for (int i = 0; i < grid; ++i) {
        const double t = 0.1 + 2.9 * i / (grid - 1);
        for (int j = 0; j < grid; ++j) {
            const double u = Constants::beta_c() * (-1.0 + (2.0 * j + 1.0) / grid);
            const auto closed = analytic::rate_function(t, u, 0.0);
            const auto numeric = analytic::rate_function_numeric(t, u, 0.0);
            if (closed.infinite || numeric.infinite) {
                c.expect(false, "infinite rate inside |u| < beta_c at t = " + fmt(t));
                continue;
            }
            const double d = std::abs(closed.value - numeric.value);
            worst = std::max(worst, d);
            if (d > 1e-6) {
                c.expect(false, "t = " + fmt(t) + ", u = " + fmt(u) + ": closed "
                                    + fmt(closed.value, 10) + " vs numeric "
                                    + fmt(numeric.value, 10));
            }
        }
    }
    c.note(std::to_string(grid * grid) + " points, max deviation " + fmt(worst, 3));
    c.finish();
}

// ---------------------------------------------------------------- 3 and 4

struct SemigroupPoint
{
    int n;
    double t;
    double lambda;
    double s;
    std::uint64_t seed;
};

std::vector<SemigroupPoint> semigroup_points(const std::vector<int>& sizes, int per_size)
{
    std::vector<SemigroupPoint> pts;
    for (int n : sizes) {
        rng::Stream stream(0x5e3147u, static_cast<std::uint64_t>(n));
        for (int i = 0; i < per_size; ++i) {
            SemigroupPoint p;
            p.n = n;
            p.t = 0.1 + 2.9 * stream.uniform();
            p.lambda = 2.0 * stream.uniform();
            p.s = -0.5 + stream.uniform();
            p.seed = 1000 + 100 * static_cast<std::uint64_t>(n) + static_cast<std::uint64_t>(i);
            pts.push_back(p);
        }
    }
    return pts;
}

std::vector<int> oracle_sizes(Level level)
{
    return level == Level::Full ? std::vector<int>{6, 8, 10} : std::vector<int>{6, 8};
}

int oracle_points(Level level) { return level == Level::Full ? 10 : 5; }

void semigroup_oracle(CriterionResult& r, Level level)
{
    Checker c(r);
    double worst = 0.0;
    const auto pts = semigroup_points(oracle_sizes(level), oracle_points(level));
    for (const auto& p : pts) {
        const auto table = std::make_shared<const EnergyTable>(RemField(p.seed, p.n));
        const auto kry = scgf_finite(p.t, p.lambda, p.s, table, ScgfMethod::Krylov);
        const auto den = scgf_finite(p.t, p.lambda, p.s, table, ScgfMethod::Dense);
        const double rel = std::abs(std::expm1(kry.log_z - den.log_z));
        worst = std::max(worst, rel);
        c.expect(rel < 1e-8, "n = " + std::to_string(p.n) + ", t = " + fmt(p.t) + ", lambda = "
                                 + fmt(p.lambda) + ", s = " + fmt(p.s) + ": relative error "
                                 + fmt(rel, 3));
    }
    c.note(std::to_string(pts.size()) + " points, max relative error " + fmt(worst, 3));
    c.finish();
}

void jensen_bounds(CriterionResult& r, Level level)
{
    Checker c(r);
    auto pts = semigroup_points(oracle_sizes(level), oracle_points(level));
    const auto extra = semigroup_points({level == Level::Full ? 12 : 10}, oracle_points(level));
    pts.insert(pts.end(), extra.begin(), extra.end());
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& p : pts) {
        const auto table = std::make_shared<const EnergyTable>(RemField(p.seed, p.n));
        const auto rec = scgf_finite(p.t, p.lambda, p.s, table, ScgfMethod::Krylov);
        const double n = p.n;
        const double slack_allowed = -1e-9 * n * p.t;
        const double first =
            p.t * n * (std::exp(-p.s) - 1.0) + p.t * p.lambda * mean_energy(*table);
        const double second = -p.t * n + n * empirical_pressure(*table, p.t * p.lambda);
        const double slack = std::min(rec.log_z - first, rec.log_z - second);
        worst = std::min(worst, slack / (n * p.t));
        c.expect(rec.log_z - first >= slack_allowed,
                 "mean-energy bound violated at n = " + std::to_string(p.n) + ", t = " + fmt(p.t)
                     + " by " + fmt(first - rec.log_z, 3));
        c.expect(rec.log_z - second >= slack_allowed,
                 "diagonal bound violated at n = " + std::to_string(p.n) + ", t = " + fmt(p.t)
                     + " by " + fmt(second - rec.log_z, 3));
    }
    c.note(std::to_string(pts.size()) + " points, smallest slack per n t " + fmt(worst, 3));
    c.finish();
}

// ---------------------------------------------------------------- 5

bool nonincreasing_strict(const std::vector<double>& v)
{
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (!(v[i] < v[i - 1])) {
            return false;
        }
    }
    return true;
}

std::string join(const std::vector<int>& ns, const std::vector<double>& v)
{
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) {
        os << (i ? ", " : "") << "n=" << ns[i] << ": " << fmt(v[i], 4);
    }
    return os.str();
}

void scgf_trend(CriterionResult& r, Level level)
{
    Checker c(r);
    const bool full = level == Level::Full;
    const std::vector<int> active_ns = full ? std::vector<int>{8, 12, 16, 20}
                                            : std::vector<int>{8, 12, 16};
    const std::vector<int> glass_ns{8, 12, 16};
    const int seeds = 5;

    auto medians = [&](const std::vector<int>& ns, double t, double lambda, double limit) {
        std::vector<double> out;
        for (int n : ns) {
            std::vector<double> gaps;
            for (int k = 0; k < seeds; ++k) {
                const RemField field(static_cast<std::uint64_t>(k + 1), n);
                gaps.push_back(
                    std::abs(scgf_finite(t, lambda, 0.0, field, ScgfMethod::Krylov).theta_n - limit));
            }
            out.push_back(median(std::move(gaps)));
        }
        return out;
    };
    const auto active = medians(active_ns, 1.0, 0.5, 0.0);
    const auto glass = medians(glass_ns, 2.0, 2.0, kGlassTheta);
    c.expect(nonincreasing_strict(active), "active gaps not decreasing: " + join(active_ns, active));
    c.expect(nonincreasing_strict(glass), "glass gaps not decreasing: " + join(glass_ns, glass));
    c.note("active " + join(active_ns, active) + "; glass " + join(glass_ns, glass));
    c.finish();
}

// ---------------------------------------------------------------- 6

void feynman_kac(CriterionResult& r, Level level)
{
    Checker c(r);
    const std::uint64_t samples = level == Level::Full ? 100000 : 20000;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const RemField field(seed, 8);
        const auto est = mgf_estimate(8, 1.0, 1.0, samples, seed, field, true);
        const double z = (est.mean - *est.exact) / est.std_error;
        c.expect(std::abs(z) <= 3.0, "seed " + std::to_string(seed) + ": MC " + fmt(est.mean)
                                         + " vs exact " + fmt(*est.exact) + " (" + fmt(z, 3)
                                         + " standard errors)");
        c.note("seed " + std::to_string(seed) + ": z = " + fmt(z, 3));
    }
    c.finish();
}

// ---------------------------------------------------------------- 7

void resolvent_bound(CriterionResult& r, Level level)
{
    Checker c(r);
    const double gamma = 0.2;
    const double lambda = 1.0;
    const int seeds = level == Level::Full ? 10 : 4;
    double worst_ratio = 0.0;
    for (int n : {8, 10}) {
        for (int k = 0; k < seeds; ++k) {
            const EnergyTable table(RemField(static_cast<std::uint64_t>(100 + k), n));
            const HypercubeOperator op(GeneratorSpec::qrem(n, gamma, lambda),
                                       std::make_shared<const EnergyTable>(table));
            const double max_abs = std::max(std::abs(table.min()), std::abs(table.max()));
            const double E = 1.5 * std::max({gamma * n, lambda * max_abs,
                                             spectrum_top(op) + spectral_margin(n)});
            const auto rep = l1_bound_report(table, gamma, lambda, E);
            for (const auto& b : rep.per_sigma) {
                worst_ratio = std::max(worst_ratio, b.lhs / b.rhs);
            }
            c.expect(rep.all_pass, "l1 bound fails at n = " + std::to_string(n) + ", seed "
                                       + std::to_string(100 + k));
            c.expect(rep.min_lhs >= -1e-12, "negative resolvent row sum at n = "
                                                + std::to_string(n));
        }
    }
    for (int k = 0; k < seeds; ++k) {
        const int n = 8;
        const EnergyTable table(RemField(static_cast<std::uint64_t>(100 + k), n));
        rng::Stream stream(0x4a15eu, static_cast<std::uint64_t>(k));
        std::vector<double> raise(table.size());
        for (auto& x : raise) {
            x = std::sqrt(static_cast<double>(n)) * stream.uniform();
        }
        const HypercubeOperator op(GeneratorSpec::qrem(n, gamma, lambda),
                                   std::make_shared<const EnergyTable>(table));
        const double max_abs = std::max(std::abs(table.min()), std::abs(table.max()));
        const double E = 1.5 * std::max({gamma * n, lambda * max_abs,
                                         spectrum_top(op) + spectral_margin(n)});
        const auto facts = dense_resolvent_facts(table, gamma, lambda, E, raise);
        c.expect(facts.min_entry >= -1e-12, "negative dense resolvent entry " + fmt(facts.min_entry));
        c.expect(facts.max_monotonicity_violation <= 1e-12,
                 "resolvent grew under a raised potential by " + fmt(facts.max_monotonicity_violation));
        c.expect(std::abs(facts.l1_norm - facts.linf_norm) <= 1e-10 * facts.l1_norm,
                 "l1 and linf norms differ");
    }
    c.note("max lhs / rhs " + fmt(worst_ratio, 4));
    c.finish();
}

// ---------------------------------------------------------------- 8

std::uint64_t count_below(const EnergyTable& table, double level)
{
    return static_cast<std::uint64_t>(std::count_if(
        table.values().begin(), table.values().end(), [&](double u) { return u < level; }));
}

void projector_stats(CriterionResult& r, Level level)
{
    Checker c(r);
    const bool full = level == Level::Full;
    const double gamma = 0.3;
    const double lambda = 1.0;
    const double delta = 0.6;
    const int top_n = 12;

    // (a) diagonal control.
    {
        const EnergyTable table(RemField(7, top_n));
        const auto sum = projector_overlap(table, 0.0, lambda, delta);
        const auto count = extreme_set(table, delta).count;
        c.expect(sum.projection
                     == static_cast<double>(count) / static_cast<double>(table.size()),
                 "gamma = 0 projection " + fmt(sum.projection, 17) + " != |L|/2^n");
        c.expect(sum.shift_sup == 0.0, "gamma = 0 shift_sup " + fmt(sum.shift_sup));
    }

    // (b) exponential decay rate of the flat projection.
    const std::vector<int> ns{8, 10, 12};
    const int trend_seeds = 5;
    const int window_seeds = full ? 20 : 5;
    std::vector<double> dist;
    std::vector<SpectralSummary> top_summaries;
    for (int n : ns) {
        std::vector<double> rates;
        const int seeds = n == top_n ? std::max(trend_seeds, window_seeds) : trend_seeds;
        for (int k = 0; k < seeds; ++k) {
            const EnergyTable table(RemField(static_cast<std::uint64_t>(200 + k), n));
            auto sum = projector_overlap(table, gamma, lambda, delta);
            if (k < trend_seeds) {
                const double rate = sum.projection > 0.0
                                        ? -std::log(sum.projection) / n
                                        : std::numeric_limits<double>::infinity();
                c.expect(rate >= 0.0, "negative decay rate at n = " + std::to_string(n));
                rates.push_back(rate);
            }
            if (n == top_n) {
                top_summaries.push_back(std::move(sum));
            }
        }
        dist.push_back(std::abs(median(rates) - 0.5 * delta * delta));
    }
    bool moving = true;
    for (std::size_t i = 1; i < dist.size(); ++i) {
        moving = moving && dist[i] <= dist[i - 1];
    }
    c.expect(moving, "distance to delta^2/2 not nonincreasing: " + join(ns, dist));
    c.note("distance to delta^2/2 " + join(ns, dist));

    // (c) trace versus classical count inside the shift window.
    const double K = 5.0;
    int inside = 0;
    for (std::size_t k = 0; k < top_summaries.size(); ++k) {
        const auto& sum = top_summaries[k];
        const EnergyTable table(RemField(static_cast<std::uint64_t>(200 + k), top_n));
        const double w = sum.shift_sup / (lambda * top_n);
        const auto lo = count_below(table, -(delta + w) * top_n);
        const auto hi = count_below(table, -(delta - w) * top_n);
        const bool ok = sum.shift_sup <= K * std::sqrt(static_cast<double>(top_n))
                        && lo <= sum.trace_above && sum.trace_above <= hi;
        if (ok) {
            ++inside;
        } else {
            r.warnings.push_back("seed " + std::to_string(200 + k) + ": trace "
                                 + std::to_string(sum.trace_above) + " outside ["
                                 + std::to_string(lo) + ", " + std::to_string(hi)
                                 + "] or shift_sup " + fmt(sum.shift_sup));
        }
    }
    const int needed = static_cast<int>(std::ceil(0.9 * top_summaries.size()));
    c.expect(inside >= needed, "trace inside the window for " + std::to_string(inside) + " of "
                                   + std::to_string(top_summaries.size()) + " seeds");
    c.note("trace inside window for " + std::to_string(inside) + "/"
           + std::to_string(top_summaries.size()) + " seeds");
    c.finish();
}

// ---------------------------------------------------------------- 9

void phi_bounds(CriterionResult& r, Level level)
{
    Checker c(r);
    const int n = 10;
    PhiParameters p;
    p.gamma = 0.2;
    p.lambda = 1.0;
    p.delta = 0.8;
    p.eps = 0.2;
    p.energy = 1.05 * p.lambda * p.delta * n;
    p.k_max = 2;
    const int seeds = level == Level::Full ? 10 : 4;
    double margin = std::numeric_limits<double>::infinity();
    int vacuous = 0;
    for (int k = 0; k < seeds; ++k) {
        const RemField field(static_cast<std::uint64_t>(300 + k), n);
        const auto rep = phi_vector_check(field, p);
        vacuous += rep.vacuous ? 1 : 0;
        for (const auto& o : rep.orders) {
            margin = std::min(margin, o.bound / std::max(o.max_abs, 1e-300));
            c.expect(o.pass, "seed " + std::to_string(300 + k) + ", k = " + std::to_string(o.k)
                                 + ": " + fmt(o.max_abs) + " > " + fmt(o.bound));
        }
    }
    if (vacuous > 0) {
        r.warnings.push_back(std::to_string(vacuous) + " seeds with empty L_eta");
    }
    c.note("smallest bound / value " + fmt(margin, 4));
    c.finish();
}

// ---------------------------------------------------------------- 10

void activity(CriterionResult& r, Level level)
{
    Checker c(r);
    const std::uint64_t samples = level == Level::Full ? 100000 : 20000;
    const RemField field(11, 8);
    const auto est = activity_estimate(8, 1.0, 1.0, samples, 11, field);
    const double zu = (est.untilted - 1.0) / est.untilted_std_error;
    c.expect(std::abs(zu) <= 4.0, "untilted activity " + fmt(est.untilted) + " is " + fmt(zu, 3)
                                      + " standard errors from 1");
    const double zt = (est.tilted - *est.oracle) / est.tilted_std_error;
    c.expect(std::abs(zt) <= 3.0, "tilted activity " + fmt(est.tilted) + " vs oracle "
                                      + fmt(*est.oracle) + " (" + fmt(zt, 3) + " jackknife SE)");
    if (est.degenerate) {
        r.warnings.push_back("effective sample size " + fmt(est.effective_sample_size));
    }
    c.note("untilted z = " + fmt(zu, 3) + ", tilted " + fmt(est.tilted) + " vs oracle "
           + fmt(*est.oracle) + " (z = " + fmt(zt, 3) + ")");
    c.finish();
}

struct Entry
{
    const char* name;
    void (*run)(CriterionResult&, Level);
};

constexpr Entry kCriteria[kCriterionCount] = {
    {"closed forms", closed_forms},
    {"Legendre consistency", legendre},
    {"semigroup oracle equivalence", semigroup_oracle},
    {"finite-n lower bounds", jensen_bounds},
    {"SCGF convergence trend", scgf_trend},
    {"Feynman-Kac Monte Carlo", feynman_kac},
    {"resolvent l1 bound", resolvent_bound},
    {"projector statistics", projector_stats},
    {"boundary-vector bounds", phi_bounds},
    {"activity", activity},
};

}  // namespace

std::string_view to_string(Level level) noexcept
{
    return level == Level::Full ? "full" : "quick";
}

Level parse_level(std::string_view name)
{
    if (name == "quick") {
        return Level::Quick;
    }
    if (name == "full") {
        return Level::Full;
    }
    throw std::invalid_argument("unknown level '" + std::string(name)
                                + "' (expected quick or full)");
}

bool Report::all_pass() const noexcept
{
    return std::all_of(criteria.begin(), criteria.end(),
                       [](const CriterionResult& c) { return c.pass; });
}

CriterionResult run_criterion(int id, Level level)
{
    if (id < 1 || id > kCriterionCount) {
        throw std::out_of_range("criterion id must lie in [1, 10]");
    }
    const Entry& e = kCriteria[id - 1];
    CriterionResult r;
    r.id = id;
    r.name = e.name;
    r.pass = true;
    const auto start = std::chrono::steady_clock::now();
    try {
        e.run(r, level);
    } catch (const std::exception& ex) {
        r.pass = false;
        r.detail = std::string("exception: ") + ex.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

Report run(Level level, const std::vector<int>& ids,
           const std::function<void(const CriterionResult&)>& on_result)
{
    Report rep;
    rep.level = level;
    std::vector<int> which = ids;
    if (which.empty()) {
        for (int i = 1; i <= kCriterionCount; ++i) {
            which.push_back(i);
        }
    }
    const auto start = std::chrono::steady_clock::now();
    for (int id : which) {
        rep.criteria.push_back(run_criterion(id, level));
        if (on_result) {
            on_result(rep.criteria.back());
        }
    }
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

}  // namespace remlab::validation
