#pragma once

#include <Eigen/Dense>

namespace bfe {

struct Orthonormalized {
  Eigen::MatrixXd z;  // n x p with z'z = I
  Eigen::MatrixXd q;  // p x p upper triangular, z = x q
};

// Modified Gram-Schmidt with a second orthogonalisation pass. Throws
// RankDeficient (with the estimated rank) when a column's remaining norm falls
// below 1e-10 of its original norm.
Orthonormalized orthonormalize(const Eigen::MatrixXd& x);

// Orthogonal projection of y onto the column space of an orthonormal z.
inline Eigen::VectorXd project(const Eigen::MatrixXd& z, const Eigen::VectorXd& y) { return z * (z.transpose() * y); }

// Hat matrix X (X'X)^{-1} X' via the normal equations (used only in checks).
Eigen::MatrixXd hat_matrix(const Eigen::MatrixXd& x);

// Columns of x2 with the projection onto span(x1) removed.
Eigen::MatrixXd residualize(const Eigen::MatrixXd& x1, const Eigen::MatrixXd& x2);

// Haar-distributed random orthogonal matrix from a seeded stream.
class RngStream;
Eigen::MatrixXd random_orthogonal(int p, RngStream& rng);

}  // namespace bfe
