#include "remlab/dense.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <lapacke.h>

namespace remlab::dense {

namespace {

void require_square(const Eigen::MatrixXd& m)
{
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw std::invalid_argument("dense: matrix must be square and nonempty");
    }
}

void check_info(lapack_int info, const char* routine)
{
    if (info != 0) {
        throw std::runtime_error(std::string(routine) + " failed with info = "
                                 + std::to_string(info));
    }
}

}  // namespace

Eigensystem eigensystem(const Eigen::MatrixXd& m)
{
    require_square(m);
    const auto n = static_cast<lapack_int>(m.rows());
    Eigensystem es;
    es.vectors = m;
    es.values.resize(n);
    check_info(LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, es.vectors.data(), n,
                              es.values.data()),
               "dsyevd");
    return es;
}

Eigen::VectorXd eigenvalues(const Eigen::MatrixXd& m)
{
    require_square(m);
    const auto n = static_cast<lapack_int>(m.rows());
    Eigen::MatrixXd work = m;
    Eigen::VectorXd values(n);
    check_info(LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'U', n, work.data(), n, values.data()),
               "dsyevd");
    return values;
}

Eigensystem eigensystem_above(const Eigen::MatrixXd& m, double lower, bool with_vectors)
{
    require_square(m);
    const auto n = static_cast<lapack_int>(m.rows());
    // Gershgorin bound closes the half-open interval.
    const double upper = m.cwiseAbs().rowwise().sum().maxCoeff() + 1.0;
    Eigensystem es;
    if (lower >= upper) {
        return es;
    }
    Eigen::MatrixXd work = m;
    Eigen::VectorXd values(n);
    Eigen::MatrixXd vectors;
    if (with_vectors) {
        vectors.resize(n, n);
    }
    std::vector<lapack_int> support(2 * static_cast<std::size_t>(n));
    lapack_int found = 0;
    double dummy = 0.0;
    check_info(LAPACKE_dsyevr(LAPACK_COL_MAJOR, with_vectors ? 'V' : 'N', 'V', 'U', n,
                              work.data(), n, lower, upper, 0, 0, 0.0, &found, values.data(),
                              with_vectors ? vectors.data() : &dummy, with_vectors ? n : 1,
                              support.data()),
               "dsyevr");
    es.values = values.head(found);
    if (with_vectors) {
        es.vectors = vectors.leftCols(found);
    }
    return es;
}

double log_moment(const Eigensystem& es, double t, const Eigen::VectorXd& v)
{
    if (es.vectors.cols() != es.values.size() || es.vectors.rows() != v.size()) {
        throw std::invalid_argument("log_moment: needs a full eigensystem matching v");
    }
    const Eigen::VectorXd c = es.vectors.transpose() * v;
    double top = -std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < c.size(); ++k) {
        if (c(k) != 0.0) {
            top = std::max(top, t * es.values(k));
        }
    }
    double acc = 0.0;
    for (Eigen::Index k = 0; k < c.size(); ++k) {
        acc += c(k) * c(k) * std::exp(t * es.values(k) - top);
    }
    if (!(acc > 0.0)) {
        throw std::domain_error("log_moment: nonpositive quadratic form");
    }
    return top + std::log(acc);
}

Eigen::VectorXd expm_action(const Eigensystem& es, double t, const Eigen::VectorXd& v,
                            double& log_scale)
{
    if (es.vectors.cols() != es.values.size() || es.vectors.rows() != v.size()) {
        throw std::invalid_argument("expm_action: needs a full eigensystem matching v");
    }
    const double top = t >= 0.0 ? t * es.values.maxCoeff() : t * es.values.minCoeff();
    Eigen::VectorXd c = es.vectors.transpose() * v;
    for (Eigen::Index k = 0; k < c.size(); ++k) {
        c(k) *= std::exp(t * es.values(k) - top);
    }
    Eigen::VectorXd w = es.vectors * c;
    const double peak = w.cwiseAbs().maxCoeff();
    log_scale = top;
    if (peak > 0.0) {
        w /= peak;
        log_scale += std::log(peak);
    }
    return w;
}

Eigen::VectorXd flat(Eigen::Index dim)
{
    return Eigen::VectorXd::Constant(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
}

}  // namespace remlab::dense
