#pragma once

#include <string>
#include <vector>

#include "knotnet/types.hpp"

namespace knotnet {

// 16 * sum x_i^3 + 3
double poly16(const Vec& x);
// sin(3 (sum x_i + 1)) + 3
double sinsum(const Vec& x);
// (x_1 - 0.6)^2 + sum_{i>1} (x_i - 0.3)^2
double quad(const Vec& x);

ScalarFn builtin_function(const std::string& name);

// sum_k coef_k * prod_i x_i^powers_k[i]
struct PolyTerm {
  double coef = 0.0;
  std::vector<int> powers;
};
ScalarFn polynomial(std::vector<PolyTerm> terms, int n);

}  // namespace knotnet
