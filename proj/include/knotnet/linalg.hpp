#pragma once

#include <vector>

#include "knotnet/types.hpp"

// Thin dense linear algebra over std::vector, backed by Eigen in the .cpp.
namespace knotnet::linalg {

// Matrix given as a list of rows.
using Rows = std::vector<Vec>;

struct Solve {
  Vec x;
  int rank = 0;
  double residual = 0.0;  // max |A x - rhs|
};

// Minimum-norm least-squares solution of A x = rhs (complete orthogonal decomposition).
Solve min_norm(const Rows& A, const Vec& rhs, int cols);

int rank(const Rows& A, int cols);

// Orthonormal basis of {x : A x = 0}, as a list of vectors of length `cols`.
std::vector<Vec> null_space(const Rows& A, int cols);

double determinant(const Rows& A);

}  // namespace knotnet::linalg
