#include "remlab/operator.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "remlab/parallel.hpp"

namespace remlab {

namespace {

void check_dimension(int n, std::size_t size, const char* what)
{
    if (size != (std::uint64_t{1} << n)) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch (expected 2^"
                                    + std::to_string(n) + " entries, got " + std::to_string(size)
                                    + ")");
    }
}

}  // namespace

ConfigurationMask::ConfigurationMask(int n, std::vector<std::uint64_t> members)
    : n_(n), members_(std::move(members)), flags_(std::uint64_t{1} << n, 0)
{
    for (std::uint64_t s : members_) {
        if (s >= flags_.size()) {
            throw std::out_of_range("mask member outside the configuration space");
        }
        flags_[s] = 1;
    }
}

GeneratorSpec::GeneratorSpec(int n, Kind kind, std::shared_ptr<const ConfigurationMask> mask)
    : n_(n), kind_(kind), mask_(std::move(mask))
{
    if (n < 1 || n > kMaxSpins) {
        throw std::invalid_argument("GeneratorSpec: n out of range");
    }
    if (mask_ && mask_->n() != n) {
        throw std::invalid_argument("GeneratorSpec: mask built for a different n");
    }
}

GeneratorSpec GeneratorSpec::with_mask(std::shared_ptr<const ConfigurationMask> mask) const
{
    return GeneratorSpec(n_, kind_, std::move(mask));
}

double GeneratorSpec::hopping() const noexcept
{
    if (const auto* m = std::get_if<TiltedMarkov>(&kind_)) {
        return std::exp(-m->s);
    }
    return std::get<Qrem>(kind_).gamma;
}

double GeneratorSpec::coupling() const noexcept
{
    if (const auto* m = std::get_if<TiltedMarkov>(&kind_)) {
        return m->lambda;
    }
    return -std::get<Qrem>(kind_).lambda;
}

double GeneratorSpec::shift() const noexcept
{
    return std::holds_alternative<TiltedMarkov>(kind_) ? -static_cast<double>(n_) : 0.0;
}

StateVector::StateVector(int n_spins, std::vector<double> values, double scale)
    : n(n_spins), entries(std::move(values)), log_scale(scale)
{
    check_dimension(n, entries.size(), "StateVector");
    if (!std::isfinite(log_scale)) {
        throw std::invalid_argument("StateVector: log_scale must be finite");
    }
}

StateVector StateVector::zeros(int n)
{
    return StateVector(n, std::vector<double>(std::uint64_t{1} << n, 0.0));
}

StateVector StateVector::basis(int n, std::uint64_t sigma)
{
    StateVector v = zeros(n);
    v.entries.at(sigma) = 1.0;
    return v;
}

StateVector flat_vector(int n)
{
    if (n < 1 || n > kMaxTableSpins) {
        throw std::invalid_argument("flat_vector: n out of range");
    }
    const double amplitude = std::exp2(-0.5 * n);
    return StateVector(n, std::vector<double>(std::uint64_t{1} << n, amplitude));
}

double dot(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size()) {
        throw std::invalid_argument("dot: size mismatch");
    }
    return parallel::chunked_reduce(
        a.size(), 0.0,
        [&](std::uint64_t begin, std::uint64_t end) {
            double acc = 0.0;
            for (std::uint64_t i = begin; i < end; ++i) {
                acc += a[i] * b[i];
            }
            return acc;
        },
        [](double x, double y) { return x + y; });
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

HypercubeOperator::HypercubeOperator(GeneratorSpec spec, std::shared_ptr<const EnergyTable> energies)
    : spec_(std::move(spec)), energies_(std::move(energies))
{
    if (!energies_ || energies_->n() != spec_.n()) {
        throw std::invalid_argument("HypercubeOperator: landscape and spec disagree on n");
    }
}

HypercubeOperator::HypercubeOperator(GeneratorSpec spec, const RemField& field)
    : HypercubeOperator(std::move(spec), std::make_shared<const EnergyTable>(field))
{
}

double HypercubeOperator::diagonal(std::uint64_t sigma) const noexcept
{
    if (excluded(sigma)) {
        return 0.0;
    }
    return spec_.coupling() * (*energies_)[sigma] + spec_.shift();
}

void HypercubeOperator::apply(std::span<const double> in, std::span<double> out) const
{
    check_dimension(n(), in.size(), "apply");
    check_dimension(n(), out.size(), "apply");
    const int spins = n();
    const double hop = spec_.hopping();
    const double coupling = spec_.coupling();
    const double shift = spec_.shift();
    const double* u = energies_->values().data();
    const double* x = in.data();
    double* y = out.data();

    if (!spec_.mask()) {
        parallel::for_each_index(dim(), [=](std::uint64_t s) {
            double acc = 0.0;
            for (int j = 0; j < spins; ++j) {
                acc += x[s ^ (std::uint64_t{1} << j)];
            }
            y[s] = hop * acc + (coupling * u[s] + shift) * x[s];
        });
        return;
    }
    const ConfigurationMask& mask = *spec_.mask();
    parallel::for_each_index(dim(), [&, x, y, u](std::uint64_t s) {
        if (mask.contains(s)) {
            y[s] = 0.0;
            return;
        }
        double acc = 0.0;
        for (int j = 0; j < spins; ++j) {
            const std::uint64_t t = s ^ (std::uint64_t{1} << j);
            if (!mask.contains(t)) {
                acc += x[t];
            }
        }
        y[s] = hop * acc + (coupling * u[s] + shift) * x[s];
    });
}

StateVector HypercubeOperator::apply(const StateVector& v) const
{
    if (v.n != n()) {
        throw std::invalid_argument("apply: vector and operator disagree on n");
    }
    StateVector out = StateVector::zeros(n());
    apply(v.entries, out.entries);
    out.log_scale = v.log_scale;
    return out;
}

StateVector apply(const GeneratorSpec& spec, const RemField& field, const StateVector& v)
{
    if (spec.n() != field.n() || v.n != spec.n()) {
        throw std::invalid_argument("apply: spec, field and vector disagree on n");
    }
    return HypercubeOperator(spec, field).apply(v);
}

Eigen::MatrixXd materialize_dense(const HypercubeOperator& op)
{
    if (op.n() > kDenseCap) {
        throw std::length_error("materialize_dense: n exceeds the dense cap of "
                                + std::to_string(kDenseCap));
    }
    const auto dim = static_cast<Eigen::Index>(op.dim());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
    const double hop = op.spec().hopping();
    for (Eigen::Index s = 0; s < dim; ++s) {
        const auto sigma = static_cast<std::uint64_t>(s);
        if (op.excluded(sigma)) {
            continue;
        }
        m(s, s) = op.diagonal(sigma);
        for (int j = 0; j < op.n(); ++j) {
            const std::uint64_t t = sigma ^ (std::uint64_t{1} << j);
            if (!op.excluded(t)) {
                m(static_cast<Eigen::Index>(t), s) = hop;
            }
        }
    }
    return m;
}

Eigen::MatrixXd materialize_dense(const GeneratorSpec& spec, const RemField& field)
{
    return materialize_dense(HypercubeOperator(spec, field));
}

BoundaryCoupling::BoundaryCoupling(double gamma, std::shared_ptr<const ConfigurationMask> mask)
    : gamma_(gamma), mask_(std::move(mask))
{
    if (!mask_) {
        throw std::invalid_argument("BoundaryCoupling requires a mask");
    }
}

void BoundaryCoupling::apply(std::span<const double> in, std::span<double> out) const
{
    const int n = mask_->n();
    check_dimension(n, in.size(), "BoundaryCoupling::apply");
    check_dimension(n, out.size(), "BoundaryCoupling::apply");
    std::fill(out.begin(), out.end(), 0.0);
    if (gamma_ == 0.0) {
        return;
    }
    for (std::uint64_t s : mask_->members()) {
        for (int j = 0; j < n; ++j) {
            const std::uint64_t t = s ^ (std::uint64_t{1} << j);
            if (!mask_->contains(t)) {
                out[t] += gamma_ * in[s];
            }
        }
    }
}

void BoundaryCoupling::apply_adjoint(std::span<const double> in, std::span<double> out) const
{
    const int n = mask_->n();
    check_dimension(n, in.size(), "BoundaryCoupling::apply_adjoint");
    check_dimension(n, out.size(), "BoundaryCoupling::apply_adjoint");
    std::fill(out.begin(), out.end(), 0.0);
    if (gamma_ == 0.0) {
        return;
    }
    for (std::uint64_t s : mask_->members()) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) {
            const std::uint64_t t = s ^ (std::uint64_t{1} << j);
            if (!mask_->contains(t)) {
                acc += in[t];
            }
        }
        out[s] = gamma_ * acc;
    }
}

Restriction restrict_complement(const GeneratorSpec& spec, const EnergyTable& table, double eta)
{
    const auto* qrem = std::get_if<Qrem>(&spec.kind());
    if (qrem == nullptr) {
        throw std::invalid_argument("restrict_complement: only defined for the QREM kind");
    }
    if (!(eta > 0.0)) {
        throw std::invalid_argument("restrict_complement: eta must be positive");
    }
    if (table.n() != spec.n()) {
        throw std::invalid_argument("restrict_complement: landscape and spec disagree on n");
    }
    auto members = extreme_set(table, eta).members;
    auto mask = std::make_shared<const ConfigurationMask>(spec.n(), std::move(members));
    return Restriction{spec.with_mask(mask), BoundaryCoupling(qrem->gamma, mask), eta};
}

Restriction restrict_complement(const GeneratorSpec& spec, const RemField& field, double eta)
{
    return restrict_complement(spec, EnergyTable(field), eta);
}

}  // namespace remlab
