#include "knotnet/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "knotnet/errors.hpp"

namespace knotnet {

double relative_error(const Vec& targets, const Vec& predictions) {
  if (targets.empty() || targets.size() != predictions.size())
    throw ValidationError("relative error needs equal, non-empty target and prediction lists");
  auto [lo, hi] = std::minmax_element(targets.begin(), targets.end());
  if (!(*hi > *lo)) throw ConstantTargets();
  double ss = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    double d = targets[i] - predictions[i];
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(targets.size())) / (*hi - *lo);
}

FitReport fit_report(const Vec& targets, const Vec& predictions) {
  FitReport r;
  r.epsilon = relative_error(targets, predictions);
  auto [lo, hi] = std::minmax_element(targets.begin(), targets.end());
  r.z_min = *lo;
  r.z_max = *hi;
  r.samples = static_cast<int>(targets.size());
  return r;
}

}  // namespace knotnet
