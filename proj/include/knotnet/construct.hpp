#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "knotnet/geometry.hpp"
#include "knotnet/metrics.hpp"
#include "knotnet/network.hpp"

namespace knotnet {

// Columns [w_i; b_i] of the units active on one region.
struct LinearOutputSystem {
  std::vector<Hyperplane> columns;
  std::optional<Polytope> region;  // when set, every column must keep it on its positive side
};

// Output weights so that sum_i lambda_i (w_i, b_i) equals the target piece; minimum norm among solutions.
// `fixed` pins selected columns. Throws RankDeficient when the free columns have rank < n+1.
Vec solve_linear_output(const LinearOutputSystem& sys, const AffinePiece& target,
                        const std::map<int, double>& fixed = {});

// Makes n+1 hyperplanes linearly independent as (n+1)-vectors, leaving the first unchanged.
std::vector<Hyperplane> perturb_to_nonsingular(const std::vector<Hyperplane>& hs, const Polytope& region,
                                               double eps = 1e-6);

// Weight of a unit on `knot` carrying s_prev (on knot's zero side) into s_next (on its positive side).
double adjacent_lambda(const AffinePiece& s_prev, const AffinePiece& s_next, const Hyperplane& knot);

// Hyperplanes with U strictly on their positive side. count = n for a single order, n+1 for a hub.
std::vector<Hyperplane> default_globals(int n, int count);

// Globals first, then l_1 ... l_zeta. `target` is indexed by region of `a`.
ReluNetwork realize_single_order(const Arrangement& a, const StrictPartialOrder& o,
                                 const std::vector<AffinePiece>& target, std::vector<Hyperplane> globals = {});

struct OrderPlan {
  std::vector<StrictPartialOrder> orders;
  std::vector<int> sequence;  // execution order of `orders`
  std::vector<Hyperplane> universal_globals;
  int hub_region = -1;
  std::optional<std::vector<int>> uncovered;  // checked against the derived set when given
};

enum class UnitForm { Positive, Negative, Both };
enum class NegativeMode { Substitute, Add };

// Everything needed to re-derive a multi-order network after orientation changes.
struct Realization {
  Arrangement arrangement;
  OrderPlan plan;
  std::vector<AffinePiece> target;
  std::map<int, UnitForm> forms;  // per chain hyperplane id; absent means Positive
  double free_weight = 1.0;       // lambda of the negative unit at a bidirectional knot

  ReluNetwork network;
  std::vector<int> unit_hyperplane;  // chain hyperplane id per unit, -1 for universal globals
  std::vector<int> uncovered;
};

Realization realize_plan(const Arrangement& a, const OrderPlan& plan, const std::vector<AffinePiece>& target);
ReluNetwork realize_multi_order(const Arrangement& a, const OrderPlan& plan, const std::vector<AffinePiece>& target);

// Substitute toggles a chain unit to its negative form; Add puts a negative unit next to it.
Realization apply_negative_forms(const Realization& state, const std::vector<int>& flips,
                                 NegativeMode mode = NegativeMode::Substitute);

// Realized piece of `net` on a region (sum over units active there).
AffinePiece realized_piece(const ReluNetwork& net, const Arrangement& a, int region);

// ---------------------------------------------------------------- grids

struct GridSpec {
  int n = 1;
  std::vector<int> per_axis;

  int cells() const;
  std::vector<Hyperplane> hyperplanes() const;  // axis-major, ids 0.. in that order
  int region_of_cell(const std::vector<int>& k) const;
  std::vector<int> cell_of_region(int r) const;
  int knot_id(int axis, int j) const;  // hyperplane x_axis = j / M_axis, j = 1..M-1
};

GridSpec make_grid(int n, std::vector<int> per_axis);  // a single M is repeated n times
// Cells indexed with the first axis fastest; regions match `cell_of_region`.
Arrangement grid_arrangement(const GridSpec& g);
std::vector<int> boundary_set(const GridSpec& g);

// Affine s agreeing with sa on ha and with sb on hb (ha, hb not parallel).
AffinePiece complete_four(const AffinePiece& sa, const Hyperplane& ha, const AffinePiece& sb, const Hyperplane& hb);

PiecewiseLinear propagate_boundary(const GridSpec& g, const std::map<int, AffinePiece>& boundary);
ReluNetwork realize_grid(const GridSpec& g, const PiecewiseLinear& target);
OrderPlan grid_plan(const GridSpec& g);

// Boundary pieces interpolate f at cell vertices, the rest is forced by continuity.
PiecewiseLinear interpolate_boundary(const ScalarFn& f, const GridSpec& g);
std::pair<ReluNetwork, FitReport> approximate_c1(const ScalarFn& f, const GridSpec& g, int samples_per_axis = 0);

// Error of a network against f on a uniform lattice with `per_axis` points per axis.
FitReport lattice_report(const ReluNetwork& net, const ScalarFn& f, int per_axis);

}  // namespace knotnet
