#include "knotnet/linalg.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace knotnet::linalg {

namespace {

Eigen::MatrixXd to_eigen(const Rows& A, int cols) {
  Eigen::MatrixXd M(static_cast<Eigen::Index>(A.size()), cols);
  for (std::size_t i = 0; i < A.size(); ++i)
    for (int j = 0; j < cols; ++j) M(i, j) = A[i][j];
  return M;
}

double rank_threshold(const Eigen::MatrixXd& M) {
  double scale = M.size() == 0 ? 0.0 : M.cwiseAbs().maxCoeff();
  return 1e-10 * std::max(1.0, scale);
}

}  // namespace

Solve min_norm(const Rows& A, const Vec& rhs, int cols) {
  Solve out;
  out.x.assign(cols, 0.0);
  if (A.empty() || cols == 0) {
    out.residual = max_abs(rhs);
    return out;
  }
  Eigen::MatrixXd M = to_eigen(A, cols);
  Eigen::VectorXd r = Eigen::Map<const Eigen::VectorXd>(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
  cod.setThreshold(1e-10);
  cod.compute(M);
  Eigen::VectorXd x = cod.solve(r);
  out.rank = static_cast<int>(cod.rank());
  for (int j = 0; j < cols; ++j) out.x[j] = x(j);
  out.residual = (M * x - r).cwiseAbs().maxCoeff();
  return out;
}

int rank(const Rows& A, int cols) {
  if (A.empty() || cols == 0) return 0;
  Eigen::MatrixXd M = to_eigen(A, cols);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const auto& s = svd.singularValues();
  double tol = rank_threshold(M);
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol) ++r;
  return r;
}

std::vector<Vec> null_space(const Rows& A, int cols) {
  std::vector<Vec> basis;
  if (A.empty()) {
    for (int j = 0; j < cols; ++j) {
      Vec e(cols, 0.0);
      e[j] = 1.0;
      basis.push_back(e);
    }
    return basis;
  }
  Eigen::MatrixXd M = to_eigen(A, cols);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  double tol = rank_threshold(M);
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol) ++r;
  const Eigen::MatrixXd& V = svd.matrixV();
  for (int k = r; k < cols; ++k) {
    Vec v(cols);
    for (int j = 0; j < cols; ++j) v[j] = V(j, k);
    basis.push_back(v);
  }
  return basis;
}

double determinant(const Rows& A) {
  int n = static_cast<int>(A.size());
  return to_eigen(A, n).determinant();
}

}  // namespace knotnet::linalg
