#pragma once

#include <vector>

#include "knotnet/construct.hpp"
#include "knotnet/rng.hpp"
#include "knotnet/spline1d.hpp"

namespace knotnet::testing {

Spline1D random_spline(SplitMix64& rng, int max_pieces);
AffinePiece random_affine(SplitMix64& rng, int n, double scale = 1.0);

// Pieces of base + sum_k lambda_k * relu(h_k) on each region of `a` (signs taken at the witness).
std::vector<AffinePiece> network_pieces(const Arrangement& a, const AffinePiece& base, const std::vector<Hyperplane>& hs,
                                        const Vec& lambdas);
// A continuous target over `a`: random affine part plus random weights on every hyperplane of `a`.
std::vector<AffinePiece> random_target(SplitMix64& rng, const Arrangement& a);

// Random translated chain in n dimensions with `zeta` hyperplanes.
std::pair<Arrangement, StrictPartialOrder> random_chain(SplitMix64& rng, int n, int zeta);

// Single-order plan with the initial slab as hub and n+1 default universal globals.
OrderPlan chain_plan(const Arrangement& a, const StrictPartialOrder& o);

// Uniform points of [0,1]^n that fall in `regions` (all regions when empty).
std::vector<Vec> points_in(const Arrangement& a, const std::vector<int>& regions, int count, SplitMix64& rng);

// max |net(x) - target piece(x)| over `pts`
double max_error(const ReluNetwork& net, const Arrangement& a, const std::vector<AffinePiece>& target,
                 const std::vector<Vec>& pts);

// Three orders around a hub: vertical lines x = 0.2..0.8 (ids 5..8), diagonals x+y = 1.5, 1.7 (ids 9, 10)
// and the corner cut 2x+y = 2.8 (id 4). Three regions are left to continuity.
struct ThreeOrders {
  Arrangement a;
  OrderPlan plan;
  std::vector<AffinePiece> target;
  std::vector<int> uncovered;  // expected
};
ThreeOrders make_three_orders(SplitMix64& rng);

// Two independent orders that share the middle strip as hub: x = 0.6, 0.8 (+x) and x = 0.4, 0.2 (-x).
struct TwoOrders {
  Arrangement a;
  OrderPlan plan;
  std::vector<AffinePiece> target;
};
TwoOrders make_two_orders(SplitMix64& rng);

}  // namespace knotnet::testing
