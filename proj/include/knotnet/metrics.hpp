#pragma once

#include <vector>

#include "knotnet/types.hpp"

namespace knotnet {

struct FitReport {
  double epsilon = 0.0;
  double z_max = 0.0;
  double z_min = 0.0;
  int samples = 0;
  Vec loss_curve;  // decimated per-step loss; empty for constructed networks
};

// Range-normalized RMSE: sqrt(mean((z - zhat)^2)) / (z_max - z_min). Throws ConstantTargets.
double relative_error(const Vec& targets, const Vec& predictions);

FitReport fit_report(const Vec& targets, const Vec& predictions);

}  // namespace knotnet
