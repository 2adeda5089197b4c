#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "knotnet/errors.hpp"
#include "knotnet/metrics.hpp"
#include "knotnet/network.hpp"

namespace knotnet {

struct TrainConfig {
  int units = 9;
  double lr = 0.002;
  int steps = 10000;
  std::uint64_t seed = 0;
  double init_low = -1.0;
  double init_high = 1.0;
  bool output_bias = false;  // trained only when enabled; starts at 0
  int curve_points = 200;    // loss-curve decimation target

  void validate() const;
};

struct Dataset {
  int n = 1;
  std::vector<Vec> inputs;
  Vec targets;

  std::size_t size() const { return targets.size(); }
  void validate() const;
};

class TrainDiverged : public NumericError {
 public:
  TrainDiverged(int step, FitReport partial)
      : NumericError("training diverged at step " + std::to_string(step)), step_(step), partial_(std::move(partial)) {}
  int step() const { return step_; }
  const FitReport& partial() const { return partial_; }

 private:
  int step_;
  FitReport partial_;
};

// Parameters drawn i.i.d. uniform in the order unit 0 (w..., b, lambda), unit 1, ...
ReluNetwork init_network(int n, const TrainConfig& cfg);

// 0.5 * mean((yhat - y)^2)
double mse_loss(const ReluNetwork& net, const Dataset& data);

// Flattened in the init order, output bias last when `with_bias`.
Vec flatten(const ReluNetwork& net, bool with_bias);
ReluNetwork unflatten(const Vec& params, int n, int units, bool with_bias);
Vec loss_gradient(const ReluNetwork& net, const Dataset& data, bool with_bias);

std::pair<ReluNetwork, FitReport> train(const Dataset& data, const TrainConfig& cfg);

// Lattice of [0,1]^n with spacing `step` (first axis fastest).
Dataset make_dataset(const ScalarFn& f, int n, double step);
Dataset make_dataset(const std::string& builtin, int n, double step);

}  // namespace knotnet
