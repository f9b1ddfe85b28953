#pragma once

// Dense symmetric eigensolvers (LAPACK) and the exponential / overlap
// oracles built on them. Intended for n <= kDenseCap.

#include <vector>

#include <Eigen/Dense>

namespace remlab::dense {

/// Eigenvalues in ascending order; columns of `vectors` are the matching
/// orthonormal eigenvectors (empty when only values were requested).
struct Eigensystem
{
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
};

/// Full decomposition (divide and conquer).
Eigensystem eigensystem(const Eigen::MatrixXd& m);

/// All eigenvalues, ascending.
Eigen::VectorXd eigenvalues(const Eigen::MatrixXd& m);

/// Eigenpairs with eigenvalue in (lower, +inf), ascending (MRRR).
Eigensystem eigensystem_above(const Eigen::MatrixXd& m, double lower, bool with_vectors);

/// ln <v| e^{t M} |v> from a full eigensystem; the argument of the
/// logarithm must be positive.
double log_moment(const Eigensystem& es, double t, const Eigen::VectorXd& v);

/// e^{t M} v written as exp(log_scale) * result with max |result| = 1.
Eigen::VectorXd expm_action(const Eigensystem& es, double t, const Eigen::VectorXd& v,
                            double& log_scale);

/// Normalized flat vector of dimension `dim`.
Eigen::VectorXd flat(Eigen::Index dim);

}  // namespace remlab::dense
