#pragma once

#include <vector>

#include "knotnet/types.hpp"

// Dense two-phase simplex for the small programs behind region feasibility.
namespace knotnet::lp {

enum class Status { Optimal, Infeasible, Unbounded };

struct Result {
  Status status = Status::Infeasible;
  double value = 0.0;
  Vec x;
};

// maximize c^T x  subject to  A x <= b,  x >= 0
Result maximize(const std::vector<Vec>& A, const Vec& b, const Vec& c);

}  // namespace knotnet::lp
