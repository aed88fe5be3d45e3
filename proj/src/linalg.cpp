#include "bfequiv/linalg.hpp"

#include <cmath>
#include <string>

#include "bfequiv/error.hpp"
#include "bfequiv/rng.hpp"

namespace bfe {

Orthonormalized orthonormalize(const Eigen::MatrixXd& x) {
  const Eigen::Index n = x.rows(), p = x.cols();
  require(p >= 1 && n >= p, ErrorCode::RankDeficient,
          "design with " + std::to_string(n) + " rows cannot have full column rank " + std::to_string(p));
  Eigen::MatrixXd z = x;
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(p, p);
  Eigen::Index rank = 0;
  for (Eigen::Index j = 0; j < p; ++j) {
    const double original = x.col(j).norm();
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index k = 0; k < j; ++k) {
        const double c = z.col(k).dot(z.col(j));
        r(k, j) += c;
        z.col(j) -= c * z.col(k);
      }
    }
    const double remaining = z.col(j).norm();
    if (!(original > 0.0) || remaining < 1e-10 * original) continue;
    r(j, j) = remaining;
    z.col(j) /= remaining;
    ++rank;
  }
  if (rank < p) {
    fail(ErrorCode::RankDeficient, "design matrix is rank deficient: estimated rank " + std::to_string(rank) +
                                       " of " + std::to_string(p) + " columns");
  }
  // x = z r, so q = r^{-1}
  Eigen::MatrixXd q = r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
  return {std::move(z), std::move(q)};
}

Eigen::MatrixXd hat_matrix(const Eigen::MatrixXd& x) {
  const Eigen::MatrixXd gram = x.transpose() * x;
  return x * gram.ldlt().solve(x.transpose());
}

Eigen::MatrixXd residualize(const Eigen::MatrixXd& x1, const Eigen::MatrixXd& x2) {
  const Orthonormalized o = orthonormalize(x1);
  return x2 - o.z * (o.z.transpose() * x2);
}

Eigen::MatrixXd random_orthogonal(int p, RngStream& rng) {
  Eigen::MatrixXd g(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < p; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  return q;
}

}  // namespace bfe
