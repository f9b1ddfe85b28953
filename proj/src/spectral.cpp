#include "remlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>

#include "remlab/analytic.hpp"
#include "remlab/dense.hpp"
#include "remlab/resolvent.hpp"

namespace remlab {

std::string_view to_string(ScgfMethod method) noexcept
{
    return method == ScgfMethod::Dense ? "dense" : "krylov";
}

ScgfMethod parse_scgf_method(std::string_view name)
{
    if (name == "krylov") {
        return ScgfMethod::Krylov;
    }
    if (name == "dense") {
        return ScgfMethod::Dense;
    }
    throw std::invalid_argument("unknown method '" + std::string(name)
                                + "' (expected krylov or dense)");
}

ScgfRecord scgf_finite(double t, double lambda, double s, std::shared_ptr<const EnergyTable> table,
                       ScgfMethod method, const ExpmOptions& options, std::uint64_t seed)
{
    if (!(t > 0.0) || !std::isfinite(t)) {
        throw std::invalid_argument("scgf_finite: t must be positive");
    }
    if (!table) {
        throw std::invalid_argument("scgf_finite: missing landscape");
    }
    const int n = table->n();
    ScgfRecord rec;
    rec.n = n;
    rec.t = t;
    rec.lambda = lambda;
    rec.s = s;
    rec.seed = seed;
    rec.method = method;
    rec.theta_limit = analytic::theta_limit(t, lambda, s);

    const HypercubeOperator op(GeneratorSpec::tilted(n, lambda, s), std::move(table));
    if (method == ScgfMethod::Dense) {
        if (n > kDenseCap) {
            throw std::length_error("scgf_finite: dense method limited to n <= "
                                    + std::to_string(kDenseCap));
        }
        const dense::Eigensystem es = dense::eigensystem(materialize_dense(op));
        rec.log_z = dense::log_moment(es, t, dense::flat(es.values.size()));
    } else {
        const StateVector flat = flat_vector(n);
        const ExpmResult r = expm_action(op, t, flat, options);
        const double overlap = dot(flat.entries, r.state.entries);
        if (!(overlap > 0.0)) {
            std::ostringstream msg;
            msg << "scgf_finite: nonpositive flat overlap " << overlap
                << " (numerical failure of the Krylov exponential)";
            throw std::runtime_error(msg.str());
        }
        rec.log_z = r.state.log_scale + std::log(overlap);
        rec.krylov_dim = r.krylov_dim;
        rec.substeps = r.substeps;
        rec.residual_estimate = r.residual_estimate;
    }
    rec.theta_n = rec.log_z / (n * t);
    return rec;
}

ScgfRecord scgf_finite(double t, double lambda, double s, const RemField& field,
                       ScgfMethod method, const ExpmOptions& options)
{
    return scgf_finite(t, lambda, s, std::make_shared<const EnergyTable>(field), method, options,
                       field.seed());
}

ShiftStatistic pair_shifts(const EnergyTable& table, double lambda,
                           const std::vector<double>& eigenvalues_desc, double threshold)
{
    std::size_t above = 0;
    while (above < eigenvalues_desc.size() && eigenvalues_desc[above] > threshold) {
        ++above;
    }
    if (above > table.size()) {
        throw std::invalid_argument("pair_shifts: more eigenvalues than configurations");
    }
    std::vector<std::uint64_t> order(table.size());
    std::iota(order.begin(), order.end(), std::uint64_t{0});
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(above),
                      order.end(), [&](std::uint64_t a, std::uint64_t b) {
                          return table[a] < table[b] || (table[a] == table[b] && a < b);
                      });
    ShiftStatistic st;
    for (std::size_t j = 0; j < above; ++j) {
        const double shift = eigenvalues_desc[j] + lambda * table[order[j]];
        st.shifts.push_back(shift);
        st.paired.push_back(order[j]);
        st.shift_sup = std::max(st.shift_sup, std::abs(shift));
    }
    st.ratio = st.shift_sup / std::sqrt(static_cast<double>(table.n()));
    return st;
}

namespace {

void require_dense(int n, const char* what)
{
    if (n > kDenseCap) {
        throw std::length_error(std::string(what) + ": dense backend limited to n <= "
                                + std::to_string(kDenseCap));
    }
}

struct AboveSpectrum
{
    std::vector<double> values;    // descending
    std::vector<double> overlaps;  // matching values
    std::optional<double> total;
};

AboveSpectrum spectrum_above(const EnergyTable& table, double gamma, double lambda,
                             double threshold, bool vectors, bool full)
{
    AboveSpectrum out;
    const std::uint64_t dim = table.size();
    if (gamma == 0.0) {
        // Diagonal operator: basis states, each with flat overlap 2^{-n}.
        const double weight = 1.0 / static_cast<double>(dim);
        for (std::uint64_t s = 0; s < dim; ++s) {
            const double e = -lambda * table[s];
            if (e > threshold) {
                out.values.push_back(e);
            }
        }
        std::sort(out.values.begin(), out.values.end(), std::greater<>());
        if (vectors) {
            out.overlaps.assign(out.values.size(), weight);
        }
        if (full) {
            out.total = 1.0;
        }
        return out;
    }
    const HypercubeOperator op(GeneratorSpec::qrem(table.n(), gamma, lambda),
                               std::make_shared<const EnergyTable>(table));
    const Eigen::MatrixXd m = materialize_dense(op);
    const Eigen::VectorXd flat = dense::flat(m.rows());
    dense::Eigensystem es;
    if (full) {
        es = dense::eigensystem(m);
    } else {
        es = dense::eigensystem_above(m, threshold, vectors);
    }
    double total = 0.0;
    for (Eigen::Index k = es.values.size() - 1; k >= 0; --k) {
        const double ov = (vectors || full) ? std::pow(es.vectors.col(k).dot(flat), 2) : 0.0;
        total += ov;
        if (es.values(k) > threshold) {
            out.values.push_back(es.values(k));
            if (vectors) {
                out.overlaps.push_back(ov);
            }
        }
    }
    if (full) {
        out.total = total;
    }
    return out;
}

}  // namespace

SpectralSummary projector_overlap(const EnergyTable& table, double gamma, double lambda,
                                  double delta, const ProjectorOptions& options)
{
    require_dense(table.n(), "projector_overlap");
    if (gamma < 0.0 || lambda < 0.0) {
        throw std::invalid_argument("projector_overlap: gamma and lambda must be nonnegative");
    }
    SpectralSummary sum;
    sum.n = table.n();
    sum.gamma = gamma;
    sum.lambda = lambda;
    sum.delta = delta;
    sum.threshold = delta * lambda * table.n();
    AboveSpectrum sp = spectrum_above(table, gamma, lambda, sum.threshold, true,
                                      options.full_spectrum);
    sum.eigenvalues_above = std::move(sp.values);
    sum.flat_overlaps = std::move(sp.overlaps);
    sum.trace_above = sum.eigenvalues_above.size();
    if (gamma == 0.0) {
        sum.projection =
            static_cast<double>(sum.trace_above) / static_cast<double>(table.size());
    } else {
        for (double ov : sum.flat_overlaps) {
            sum.projection += ov;
        }
    }
    sum.total_overlap = sp.total;
    sum.shift_sup = pair_shifts(table, lambda, sum.eigenvalues_above, sum.threshold).shift_sup;
    return sum;
}

SpectralSummary projector_overlap(const RemField& field, double gamma, double lambda,
                                  double delta, const ProjectorOptions& options)
{
    SpectralSummary sum = projector_overlap(EnergyTable(field), gamma, lambda, delta, options);
    sum.seed = field.seed();
    return sum;
}

ShiftStatistic shift_statistic(const EnergyTable& table, double gamma, double lambda,
                               double delta)
{
    require_dense(table.n(), "shift_statistic");
    if (gamma < 0.0) {
        throw std::invalid_argument("shift_statistic: gamma must be nonnegative");
    }
    if (!(lambda * delta > gamma)) {
        std::ostringstream msg;
        msg << "shift_statistic: requires lambda * delta > gamma (got lambda * delta = "
            << lambda * delta << ", gamma = " << gamma
            << "); below that the hopping can lift bulk levels over the threshold";
        throw std::invalid_argument(msg.str());
    }
    const double threshold = delta * lambda * table.n();
    const AboveSpectrum sp = spectrum_above(table, gamma, lambda, threshold, false, false);
    return pair_shifts(table, lambda, sp.values, threshold);
}

ShiftStatistic shift_statistic(const RemField& field, double gamma, double lambda, double delta)
{
    return shift_statistic(EnergyTable(field), gamma, lambda, delta);
}

double phi_bound(const PhiParameters& p)
{
    return 1.0 + 2.0 * p.gamma * p.delta / ((p.lambda * p.delta - p.gamma) * p.eps);
}

double phi_order_bound(const PhiParameters& p, int n, int k)
{
    const double base = 2.0 * p.delta / ((p.lambda * p.delta - p.gamma) * p.eps);
    return p.gamma / std::pow(static_cast<double>(n), k) * std::pow(base, k + 1);
}

PhiReport phi_vector_check(const EnergyTable& table, const PhiParameters& p)
{
    const int n = table.n();
    if (p.gamma < 0.0 || !(p.lambda > 0.0)) {
        throw std::invalid_argument("phi_vector_check: need gamma >= 0 and lambda > 0");
    }
    if (!(p.lambda * p.delta > p.gamma)) {
        throw std::invalid_argument("phi_vector_check: requires lambda * delta > gamma");
    }
    if (!(p.eps > 0.0 && p.eps < p.delta - p.gamma / p.lambda)) {
        throw std::invalid_argument(
            "phi_vector_check: eps must lie in (0, delta - gamma / lambda)");
    }
    if (!(p.energy > p.lambda * p.delta * n)) {
        throw std::invalid_argument("phi_vector_check: E must exceed lambda * delta * n");
    }
    if (p.k_max < 0) {
        throw std::invalid_argument("phi_vector_check: k_max must be nonnegative");
    }

    PhiReport rep;
    rep.n = n;
    rep.eta = p.delta - p.eps;
    rep.energy = p.energy;

    const GeneratorSpec spec = GeneratorSpec::qrem(n, p.gamma, p.lambda);
    const Restriction restriction = restrict_complement(spec, table, rep.eta);
    rep.members = restriction.coupling.mask().members();

    auto make_orders = [&](double fill) {
        rep.orders.clear();
        for (int k = 0; k <= p.k_max; ++k) {
            PhiOrderReport o;
            o.k = k;
            o.bound = k == 0 ? phi_bound(p) : phi_order_bound(p, n, k);
            o.max_abs = fill;
            rep.orders.push_back(o);
        }
    };

    if (rep.members.empty()) {
        rep.vacuous = true;
        rep.all_pass = true;
        make_orders(0.0);
        for (auto& o : rep.orders) {
            o.pass = true;
        }
        return rep;
    }

    const HypercubeOperator restricted(restriction.restricted,
                                       std::make_shared<const EnergyTable>(table));
    rep.restricted_top = spectrum_top(restricted);
    if (!(p.energy >= rep.restricted_top + spectral_margin(n))) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "phi_vector_check: E = " << p.energy
            << " lies inside the spectrum of the restricted operator (top "
            << rep.restricted_top << ")";
        throw std::domain_error(msg.str());
    }

    std::vector<double> ones(table.size(), 1.0);
    for (std::uint64_t s : rep.members) {
        ones[s] = 0.0;
    }
    StateVector x(n, std::move(ones));
    SolveOptions so;
    so.tol = p.solver_tol;
    make_orders(0.0);
    std::vector<double> boundary(table.size());
    rep.all_pass = true;
    for (int k = 0; k <= p.k_max; ++k) {
        x = solve_resolvent_above(restricted, p.energy, rep.restricted_top, x, so).x;
        restriction.coupling.apply_adjoint(x.entries, boundary);
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        PhiOrderReport& o = rep.orders[static_cast<std::size_t>(k)];
        for (std::uint64_t s : rep.members) {
            double value = sign * boundary[s];
            if (k == 0) {
                value += 1.0;
                rep.phi.push_back(value);
            }
            o.max_abs = std::max(o.max_abs, std::abs(value));
        }
        o.pass = o.max_abs <= o.bound;
        rep.all_pass = rep.all_pass && o.pass;
    }
    return rep;
}

PhiReport phi_vector_check(const RemField& field, const PhiParameters& params)
{
    PhiReport rep = phi_vector_check(EnergyTable(field), params);
    rep.seed = field.seed();
    return rep;
}

}  // namespace remlab
