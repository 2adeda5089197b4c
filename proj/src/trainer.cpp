#include "knotnet/trainer.hpp"

#include <algorithm>
#include <cmath>

#include "knotnet/functions.hpp"
#include "knotnet/rng.hpp"

namespace knotnet {

void TrainConfig::validate() const {
  if (units < 1) throw ValidationError("units must be positive");
  if (!(lr > 0.0)) throw ValidationError("learning rate must be positive");
  if (steps < 1) throw ValidationError("steps must be positive");
  if (!(init_low < init_high)) throw ValidationError("init_low must be below init_high");
}

void Dataset::validate() const {
  if (targets.empty()) throw ValidationError("dataset is empty");
  if (inputs.size() != targets.size()) throw ValidationError("dataset inputs and targets differ in length");
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (static_cast<int>(inputs[i].size()) != n) throw DimensionMismatch("dataset point has the wrong dimension");
    for (double v : inputs[i])
      if (!std::isfinite(v)) throw ValidationError("dataset contains a non-finite input");
    if (!std::isfinite(targets[i])) throw ValidationError("dataset contains a non-finite target");
  }
}

ReluNetwork init_network(int n, const TrainConfig& cfg) {
  SplitMix64 rng(cfg.seed);
  ReluNetwork net;
  net.n = n;
  for (int u = 0; u < cfg.units; ++u) {
    ReluUnit unit;
    unit.w.resize(n);
    for (double& v : unit.w) v = rng.uniform(cfg.init_low, cfg.init_high);
    unit.b = rng.uniform(cfg.init_low, cfg.init_high);
    unit.lambda = rng.uniform(cfg.init_low, cfg.init_high);
    net.units.push_back(unit);
  }
  return net;
}

double mse_loss(const ReluNetwork& net, const Dataset& data) {
  double s = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    double e = eval(net, data.inputs[i]) - data.targets[i];
    s += e * e;
  }
  return 0.5 * s / static_cast<double>(data.size());
}

Vec flatten(const ReluNetwork& net, bool with_bias) {
  Vec p;
  for (const auto& u : net.units) {
    p.insert(p.end(), u.w.begin(), u.w.end());
    p.push_back(u.b);
    p.push_back(u.lambda);
  }
  if (with_bias) p.push_back(net.output_bias);
  return p;
}

ReluNetwork unflatten(const Vec& params, int n, int units, bool with_bias) {
  const std::size_t want = static_cast<std::size_t>(units) * (n + 2) + (with_bias ? 1 : 0);
  if (params.size() != want) throw DimensionMismatch("parameter vector has the wrong length");
  ReluNetwork net;
  net.n = n;
  std::size_t k = 0;
  for (int u = 0; u < units; ++u) {
    ReluUnit unit;
    unit.w.assign(params.begin() + k, params.begin() + k + n);
    k += n;
    unit.b = params[k++];
    unit.lambda = params[k++];
    net.units.push_back(unit);
  }
  if (with_bias) net.output_bias = params[k];
  return net;
}

Vec loss_gradient(const ReluNetwork& net, const Dataset& data, bool with_bias) {
  const int n = net.n;
  const int U = net.theta();
  const std::size_t stride = n + 2;
  Vec g(U * stride + (with_bias ? 1 : 0), 0.0);
  Vec z(U);
  const double inv = 1.0 / static_cast<double>(data.size());
  for (std::size_t s = 0; s < data.size(); ++s) {
    const Vec& x = data.inputs[s];
    double y = net.output_bias;
    for (int u = 0; u < U; ++u) {
      z[u] = dot(net.units[u].w, x) + net.units[u].b;
      if (z[u] > 0.0) y += net.units[u].lambda * z[u];
    }
    const double e = (y - data.targets[s]) * inv;
    for (int u = 0; u < U; ++u) {
      if (!(z[u] > 0.0)) continue;  // sigma'(0) = 0
      double* gu = &g[u * stride];
      const double c = e * net.units[u].lambda;
      for (int j = 0; j < n; ++j) gu[j] += c * x[j];
      gu[n] += c;
      gu[n + 1] += e * z[u];
    }
    if (with_bias) g.back() += e;
  }
  return g;
}

namespace {

FitReport report_on(const ReluNetwork& net, const Dataset& data) {
  Vec pred;
  pred.reserve(data.size());
  for (const auto& x : data.inputs) pred.push_back(eval(net, x));
  return fit_report(data.targets, pred);
}

}  // namespace

std::pair<ReluNetwork, FitReport> train(const Dataset& data, const TrainConfig& cfg) {
  data.validate();
  cfg.validate();
  ReluNetwork net = init_network(data.n, cfg);
  Vec params = flatten(net, cfg.output_bias);
  const int points = std::max(1, cfg.curve_points);
  const int every = std::max(1, (cfg.steps + points - 1) / points);
  Vec curve;
  // a step that multiplies the loss by this much has left the basin; dead units would hide it otherwise
  constexpr double kBlowup = 100.0;
  const double initial = mse_loss(net, data);
  for (int step = 0; step < cfg.steps; ++step) {
    Vec g = loss_gradient(net, data, cfg.output_bias);
    for (std::size_t k = 0; k < params.size(); ++k) params[k] -= cfg.lr * g[k];
    net = unflatten(params, data.n, cfg.units, cfg.output_bias);
    bool finite = true;
    for (double v : params) finite = finite && std::isfinite(v);
    double loss = finite ? mse_loss(net, data) : NAN;
    if (!std::isfinite(loss) || (initial > 0.0 && loss > kBlowup * initial)) {
      FitReport partial;
      partial.loss_curve = curve;
      partial.loss_curve.push_back(loss);
      partial.samples = static_cast<int>(data.size());
      throw TrainDiverged(step + 1, partial);
    }
    if (step % every == 0 || step + 1 == cfg.steps) curve.push_back(loss);
  }
  FitReport r = report_on(net, data);
  r.loss_curve = std::move(curve);
  return {net, r};
}

Dataset make_dataset(const ScalarFn& f, int n, double step) {
  if (n < 1) throw ValidationError("dimension must be positive");
  if (!(step > 0.0 && step <= 1.0)) throw ValidationError("step must lie in (0, 1]");
  const long m = std::lround(1.0 / step);
  if (std::fabs(m * step - 1.0) > 1e-9) throw ValidationError("step must divide 1 evenly");
  const long per = m + 1;
  long total = 1;
  for (int i = 0; i < n; ++i) total *= per;
  Dataset d;
  d.n = n;
  for (long idx = 0; idx < total; ++idx) {
    Vec x(n);
    long r = idx;
    for (int i = 0; i < n; ++i) {
      x[i] = static_cast<double>(r % per) / m;
      r /= per;
    }
    d.targets.push_back(f(x));
    d.inputs.push_back(std::move(x));
  }
  return d;
}

Dataset make_dataset(const std::string& builtin, int n, double step) {
  return make_dataset(builtin_function(builtin), n, step);
}

}  // namespace knotnet
