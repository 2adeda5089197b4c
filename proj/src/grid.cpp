#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "knotnet/construct.hpp"
#include "knotnet/errors.hpp"
#include "knotnet/linalg.hpp"

namespace knotnet {

int GridSpec::cells() const {
  int c = 1;
  for (int m : per_axis) c *= m;
  return c;
}

std::vector<Hyperplane> GridSpec::hyperplanes() const {
  std::vector<Hyperplane> hs;
  int id = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 1; j < per_axis[i]; ++j) {
      Vec w(n, 0.0);
      w[i] = 1.0;
      hs.emplace_back(w, -static_cast<double>(j) / per_axis[i], id++);
    }
  }
  return hs;
}

int GridSpec::region_of_cell(const std::vector<int>& k) const {
  int r = 0;
  for (int i = n - 1; i >= 0; --i) r = r * per_axis[i] + k[i];
  return r;
}

std::vector<int> GridSpec::cell_of_region(int r) const {
  std::vector<int> k(n);
  for (int i = 0; i < n; ++i) {
    k[i] = r % per_axis[i];
    r /= per_axis[i];
  }
  return k;
}

int GridSpec::knot_id(int axis, int j) const {
  if (j < 1 || j >= per_axis[axis]) throw ValidationError("grid knot index out of range");
  int id = 0;
  for (int i = 0; i < axis; ++i) id += per_axis[i] - 1;
  return id + j - 1;
}

GridSpec make_grid(int n, std::vector<int> per_axis) {
  if (n < 1) throw ValidationError("grid dimension must be positive");
  if (per_axis.size() == 1) per_axis.assign(n, per_axis[0]);
  if (static_cast<int>(per_axis.size()) != n) throw DimensionMismatch("need one cell count per axis");
  for (int m : per_axis)
    if (m < 2) throw ValidationError("each axis needs at least two cells");
  return GridSpec{n, per_axis};
}

namespace {

Vec cell_center(const GridSpec& g, const std::vector<int>& k) {
  Vec c(g.n);
  for (int i = 0; i < g.n; ++i) c[i] = (k[i] + 0.5) / g.per_axis[i];
  return c;
}

// s1 and s2 agree on the hyperplane h, checked at n affinely independent points of it
bool agree_on(const AffinePiece& s1, const AffinePiece& s2, const Hyperplane& h) {
  const int n = h.dim();
  double nw2 = dot(h.w, h.w);
  Vec p0(n);
  for (int j = 0; j < n; ++j) p0[j] = -h.b * h.w[j] / nw2;
  double tol = 1e-8 * std::fmax(1.0, std::fmax(s1.scale(), s2.scale()));
  AffinePiece d = s1 - s2;
  if (std::fabs(d(p0)) > tol) return false;
  for (const Vec& e : linalg::null_space({h.w}, n)) {
    Vec p = p0;
    for (int j = 0; j < n; ++j) p[j] += e[j];
    if (std::fabs(d(p)) > tol) return false;
  }
  return true;
}

int nonzero_axes(const std::vector<int>& k) {
  return static_cast<int>(std::count_if(k.begin(), k.end(), [](int v) { return v != 0; }));
}

}  // namespace

Arrangement grid_arrangement(const GridSpec& g) {
  Arrangement a;
  a.n = g.n;
  a.hyperplanes = g.hyperplanes();
  double hmin = 1.0;
  for (int m : g.per_axis) hmin = std::fmin(hmin, 1.0 / m);
  const int C = g.cells();
  for (int r = 0; r < C; ++r) {
    auto k = g.cell_of_region(r);
    Region reg;
    for (int i = 0; i < g.n; ++i)
      for (int j = 1; j < g.per_axis[i]; ++j) reg.signs.push_back(k[i] >= j ? 1 : -1);
    reg.witness = cell_center(g, k);
    reg.radius = 0.5 * hmin;
    a.regions.push_back(reg);
  }
  for (int r = 0; r < C; ++r) {
    auto k = g.cell_of_region(r);
    for (int i = 0; i < g.n; ++i) {
      if (k[i] + 1 >= g.per_axis[i]) continue;
      auto k2 = k;
      ++k2[i];
      Adjacency adj;
      adj.r1 = r;
      adj.r2 = g.region_of_cell(k2);
      adj.hyperplane = g.knot_id(i, k[i] + 1);
      adj.facet_center = cell_center(g, k);
      adj.facet_center[i] = static_cast<double>(k[i] + 1) / g.per_axis[i];
      double fr = g.n == 1 ? 0.0 : 1.0;
      for (int a2 = 0; a2 < g.n; ++a2)
        if (a2 != i) fr = std::fmin(fr, 0.5 / g.per_axis[a2]);
      adj.facet_radius = fr;
      a.adjacency.push_back(adj);
    }
  }
  a.compute_groups();
  a.rebuild_index();
  return a;
}

std::vector<int> boundary_set(const GridSpec& g) {
  std::vector<int> out;
  for (int r = 0; r < g.cells(); ++r)
    if (nonzero_axes(g.cell_of_region(r)) <= 1) out.push_back(r);
  return out;
}

AffinePiece complete_four(const AffinePiece& sa, const Hyperplane& ha, const AffinePiece& sb, const Hyperplane& hb) {
  const int n = ha.dim();
  if (n < 2) throw ValidationError("four-region completion needs n >= 2");
  // probe on hb where ha = 1
  linalg::Rows A{hb.w, ha.w};
  if (linalg::rank(A, n) < 2) throw ValidationError("four-region completion needs crossing hyperplanes");
  auto sol = linalg::min_norm(A, {-hb.b, 1.0 - ha.b}, n);
  double alpha = sb(sol.x) - sa(sol.x);
  AffinePiece s = sa;
  s.add_scaled(ha.w, ha.b, alpha);
  if (!agree_on(s, sb, hb)) throw InconsistentBoundary("neighbouring pieces disagree where their knots cross");
  return s;
}

PiecewiseLinear propagate_boundary(const GridSpec& g, const std::map<int, AffinePiece>& boundary) {
  auto bset = boundary_set(g);
  if (boundary.size() != bset.size()) throw InconsistentBoundary("boundary map does not cover exactly the boundary regions");
  for (int r : bset)
    if (!boundary.count(r)) throw InconsistentBoundary("missing boundary region " + std::to_string(r));
  for (const auto& [r, p] : boundary)
    if (p.dim() != g.n) throw DimensionMismatch("boundary piece dimension differs from grid");

  PiecewiseLinear pl;
  pl.arrangement = grid_arrangement(g);
  const auto& hs = pl.arrangement.hyperplanes;
  const int C = g.cells();
  std::vector<std::optional<AffinePiece>> fill(C);
  for (const auto& [r, p] : boundary) fill[r] = p;

  // adjacent boundary cells must already be continuous
  for (int i = 0; i < g.n; ++i) {
    std::vector<int> k(g.n, 0);
    for (int t = 1; t < g.per_axis[i]; ++t) {
      int prev = g.region_of_cell(k);
      k[i] = t;
      int cur = g.region_of_cell(k);
      if (!agree_on(*fill[prev], *fill[cur], hs[g.knot_id(i, t)]))
        throw InconsistentBoundary("boundary pieces of regions " + std::to_string(prev) + " and " + std::to_string(cur) +
                                   " are not continuous");
    }
  }

  // first-axis-fastest order puts both lower neighbours before each cell
  for (int r = 0; r < C; ++r) {
    if (fill[r]) continue;
    auto k = g.cell_of_region(r);
    int a = -1, b = -1;
    for (int i = 0; i < g.n; ++i) {
      if (k[i] == 0) continue;
      if (a < 0) a = i;
      else if (b < 0) b = i;
    }
    auto ka = k, kb = k;
    --ka[a];
    --kb[b];
    fill[r] = complete_four(*fill[g.region_of_cell(ka)], hs[g.knot_id(a, k[a])], *fill[g.region_of_cell(kb)],
                            hs[g.knot_id(b, k[b])]);
  }
  for (auto& p : fill) pl.pieces.push_back(*p);
  return pl;
}

OrderPlan grid_plan(const GridSpec& g) {
  OrderPlan plan;
  plan.hub_region = 0;
  for (int i = 0; i < g.n; ++i) {
    StrictPartialOrder o;
    o.initial_region = 0;
    std::vector<int> k(g.n, 0);
    for (int t = 1; t < g.per_axis[i]; ++t) {
      k[i] = t;
      o.chain.push_back(g.knot_id(i, t));
      o.ordered_regions.push_back(g.region_of_cell(k));
    }
    plan.orders.push_back(o);
    plan.sequence.push_back(i);
  }
  plan.universal_globals = default_globals(g.n, g.n + 1);
  return plan;
}

ReluNetwork realize_grid(const GridSpec& g, const PiecewiseLinear& target) {
  const Arrangement& ta = target.arrangement;
  if (ta.n != g.n) throw DimensionMismatch("target dimension differs from grid");
  if (static_cast<int>(ta.regions.size()) != g.cells() || target.pieces.size() != ta.regions.size())
    throw ValidationError("target is not defined on the grid regions");
  auto hs = g.hyperplanes();
  if (ta.hyperplanes.size() != hs.size()) throw ValidationError("target arrangement is not the grid");
  for (std::size_t k = 0; k < hs.size(); ++k) {
    AffinePiece x(ta.hyperplanes[k].w, ta.hyperplanes[k].b), y(hs[k].w, hs[k].b);
    if (x.distance(y) > 1e-12) throw ValidationError("target arrangement is not the grid");
  }
  Arrangement ga = grid_arrangement(g);
  std::vector<AffinePiece> tg(g.cells());
  for (int r = 0; r < g.cells(); ++r) {
    int tr = ta.locate(ga.regions[r].witness);
    if (tr < 0) throw ValidationError("target arrangement is missing a grid cell");
    tg[r] = target.pieces[tr];
  }
  std::map<int, AffinePiece> boundary;
  for (int r : boundary_set(g)) boundary[r] = tg[r];
  auto filled = propagate_boundary(g, boundary);
  for (int r = 0; r < g.cells(); ++r) {
    if (filled.pieces[r].distance(tg[r]) > 1e-8 * std::fmax(1.0, tg[r].scale()))
      throw TargetNotRealizable("piece on region " + std::to_string(r) + " contradicts the boundary fill");
  }
  return realize_plan(ga, grid_plan(g), tg).network;
}

PiecewiseLinear interpolate_boundary(const ScalarFn& f, const GridSpec& g) {
  const int n = g.n;
  Vec h(n);
  for (int i = 0; i < n; ++i) h[i] = 1.0 / g.per_axis[i];
  Vec origin(n, 0.0);
  const double f0 = f(origin);
  AffinePiece corner(Vec(n, 0.0), f0);
  for (int i = 0; i < n; ++i) {
    Vec v = origin;
    v[i] = h[i];
    corner.w[i] = (f(v) - f0) / h[i];
  }
  std::map<int, AffinePiece> boundary;
  boundary[0] = corner;
  for (int i = 0; i < n; ++i) {
    AffinePiece s = corner;
    std::vector<int> k(n, 0);
    for (int t = 1; t < g.per_axis[i]; ++t) {
      // keep the shared facet x_i = t h_i and match f at the next vertex on the axis
      Vec v = origin;
      v[i] = (t + 1) * h[i];
      double alpha = (f(v) - s(v)) / h[i];
      Vec w(n, 0.0);
      w[i] = 1.0;
      s.add_scaled(w, -t * h[i], alpha);
      k[i] = t;
      boundary[g.region_of_cell(k)] = s;
    }
  }
  return propagate_boundary(g, boundary);
}

FitReport lattice_report(const ReluNetwork& net, const ScalarFn& f, int per_axis) {
  if (per_axis < 2) throw ValidationError("lattice needs at least two points per axis");
  const int n = net.n;
  long total = 1;
  for (int i = 0; i < n; ++i) total *= per_axis;
  Vec z, zhat;
  z.reserve(total);
  zhat.reserve(total);
  Vec x(n);
  for (long idx = 0; idx < total; ++idx) {
    long r = idx;
    for (int i = 0; i < n; ++i) {
      x[i] = static_cast<double>(r % per_axis) / (per_axis - 1);
      r /= per_axis;
    }
    z.push_back(f(x));
    zhat.push_back(eval(net, x));
  }
  return fit_report(z, zhat);
}

std::pair<ReluNetwork, FitReport> approximate_c1(const ScalarFn& f, const GridSpec& g, int samples_per_axis) {
  auto pl = interpolate_boundary(f, g);
  ReluNetwork net = realize_grid(g, pl);
  if (samples_per_axis <= 0) samples_per_axis = g.n <= 2 ? 101 : 21;
  return {net, lattice_report(net, f, samples_per_axis)};
}

}  // namespace knotnet
