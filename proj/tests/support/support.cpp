#include "support.hpp"

#include <algorithm>
#include <cmath>

namespace knotnet::testing {

Spline1D random_spline(SplitMix64& rng, int max_pieces) {
  int zeta = 1 + static_cast<int>(rng.next() % static_cast<std::uint64_t>(max_pieces));
  Vec knots;
  while (static_cast<int>(knots.size()) < zeta - 1) {
    double x = rng.uniform(0.02, 0.98);
    bool far = std::all_of(knots.begin(), knots.end(), [&](double k) { return std::fabs(k - x) > 0.01; });
    if (far) knots.push_back(x);
  }
  std::sort(knots.begin(), knots.end());
  Vec slopes(zeta);
  for (double& s : slopes) s = rng.uniform(-5.0, 5.0);
  return make_spline(knots, slopes, rng.uniform(-2.0, 2.0));
}

AffinePiece random_affine(SplitMix64& rng, int n, double scale) {
  AffinePiece p(Vec(n), rng.uniform(-scale, scale));
  for (double& v : p.w) v = rng.uniform(-scale, scale);
  return p;
}

std::vector<AffinePiece> network_pieces(const Arrangement& a, const AffinePiece& base, const std::vector<Hyperplane>& hs,
                                        const Vec& lambdas) {
  std::vector<AffinePiece> out;
  for (const auto& r : a.regions) {
    AffinePiece p = base;
    for (std::size_t k = 0; k < hs.size(); ++k)
      if (hs[k].value(r.witness) > 0.0) p.add_scaled(hs[k].w, hs[k].b, lambdas[k]);
    out.push_back(p);
  }
  return out;
}

std::vector<AffinePiece> random_target(SplitMix64& rng, const Arrangement& a) {
  Vec lam(a.hyperplanes.size());
  for (double& l : lam) l = rng.uniform(-3.0, 3.0);
  return network_pieces(a, random_affine(rng, a.n, 2.0), a.hyperplanes, lam);
}

std::pair<Arrangement, StrictPartialOrder> random_chain(SplitMix64& rng, int n, int zeta) {
  for (;;) {
    Vec d(n);
    for (double& v : d) v = rng.uniform(-1.0, 1.0);
    double nd = norm2(d);
    if (nd < 0.3) continue;
    for (double& v : d) v /= nd;
    double lo = 0.0, hi = 0.0;
    for (double v : d) (v < 0 ? lo : hi) += v;
    const double span = hi - lo;
    Vec off(zeta);
    for (int i = 0; i < zeta; ++i) off[i] = lo + span * (0.1 + 0.8 * (i + rng.uniform(0.2, 0.8)) / zeta);
    int orientation = rng.next() % 2 ? 1 : -1;
    try {
      return generate_translated_order(n, d, off, orientation);
    } catch (const std::exception&) {
      continue;  // slab too thin after clipping; draw again
    }
  }
}

OrderPlan chain_plan(const Arrangement& a, const StrictPartialOrder& o) {
  OrderPlan plan;
  plan.orders = {o};
  plan.sequence = {0};
  plan.hub_region = o.initial_region;
  plan.universal_globals = default_globals(a.n, a.n + 1);
  return plan;
}

std::vector<Vec> points_in(const Arrangement& a, const std::vector<int>& regions, int count, SplitMix64& rng) {
  std::vector<bool> want(a.regions.size(), regions.empty());
  for (int r : regions) want[r] = true;
  std::vector<Vec> pts;
  for (int tries = 0; static_cast<int>(pts.size()) < count && tries < 200 * count; ++tries) {
    Vec x(a.n);
    for (double& v : x) v = rng.uniform();
    int r = a.locate(x);
    if (r >= 0 && want[r]) pts.push_back(x);
  }
  for (int r : regions) pts.push_back(a.regions[r].witness);
  return pts;
}

double max_error(const ReluNetwork& net, const Arrangement& a, const std::vector<AffinePiece>& target,
                 const std::vector<Vec>& pts) {
  double m = 0.0;
  for (const auto& x : pts) {
    int r = a.locate(x);
    if (r < 0) continue;
    m = std::fmax(m, std::fabs(eval(net, x) - target[r](x)));
  }
  return m;
}

namespace {

int region_with(const Arrangement& a, const Vec& x) {
  int r = a.locate(x);
  if (r < 0) throw std::logic_error("probe point on a knot");
  return r;
}

}  // namespace

ThreeOrders make_three_orders(SplitMix64& rng) {
  std::vector<Hyperplane> hs{
      Hyperplane({1.0, 0.0}, -0.2, 5), Hyperplane({1.0, 0.0}, -0.4, 6), Hyperplane({1.0, 0.0}, -0.6, 7),
      Hyperplane({1.0, 0.0}, -0.8, 8), Hyperplane({1.0, 1.0}, -1.5, 9), Hyperplane({1.0, 1.0}, -1.7, 10),
      Hyperplane({2.0, 1.0}, -2.8, 4)};
  ThreeOrders f;
  f.a = build_arrangement(2, hs);
  auto at = [&](double x, double y) { return region_with(f.a, {x, y}); };
  StrictPartialOrder p1{{5, 6, 7, 8}, {at(0.3, 0.1), at(0.5, 0.1), at(0.7, 0.1), at(0.9, 0.1)}, at(0.1, 0.1)};
  StrictPartialOrder p2{{9, 10}, {at(0.7, 0.9), at(0.75, 0.99)}, at(0.7, 0.1)};
  StrictPartialOrder p3{{4}, {at(0.98, 0.98)}, at(0.85, 0.98)};
  f.plan.orders = {p1, p2, p3};
  f.plan.sequence = {0, 1, 2};
  f.plan.hub_region = at(0.1, 0.1);
  f.plan.universal_globals = default_globals(2, 3);
  f.uncovered = {at(0.55, 0.98), at(0.85, 0.8), at(0.85, 0.98)};
  std::sort(f.uncovered.begin(), f.uncovered.end());
  f.target = random_target(rng, f.a);
  return f;
}

TwoOrders make_two_orders(SplitMix64& rng) {
  std::vector<Hyperplane> hs{Hyperplane({1.0, 0.0}, -0.6, 0), Hyperplane({1.0, 0.0}, -0.8, 1),
                             Hyperplane({-1.0, 0.0}, 0.4, 2), Hyperplane({-1.0, 0.0}, 0.2, 3)};
  TwoOrders t;
  t.a = build_arrangement(2, hs);
  auto at = [&](double x) { return region_with(t.a, {x, 0.5}); };
  StrictPartialOrder right{{0, 1}, {at(0.7), at(0.9)}, at(0.5)};
  StrictPartialOrder left{{2, 3}, {at(0.3), at(0.1)}, at(0.5)};
  t.plan.orders = {right, left};
  t.plan.sequence = {0, 1};
  t.plan.hub_region = at(0.5);
  t.plan.universal_globals = default_globals(2, 3);
  t.target = random_target(rng, t.a);
  return t;
}

}  // namespace knotnet::testing
