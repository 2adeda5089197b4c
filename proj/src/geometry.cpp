#include "knotnet/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "knotnet/errors.hpp"
#include "knotnet/linalg.hpp"
#include "knotnet/lp.hpp"

namespace knotnet {

Hyperplane::Hyperplane(Vec w_, double b_, int id_) : w(std::move(w_)), b(b_), id(id_) {
  if (w.empty() || !(norm2(w) > 0.0)) throw ValidationError("hyperplane with zero normal (id " + std::to_string(id) + ")");
}

Vec Hyperplane::scaled(double c) const {
  Vec r = w;
  for (double& v : r) v *= c;
  return r;
}

Side side_of(const Hyperplane& h, const Vec& x) {
  if (static_cast<int>(x.size()) != h.dim()) throw DimensionMismatch("point dimension does not match hyperplane");
  double v = h.value(x) / h.norm();
  if (v > kSideTol) return Side::Positive;
  if (v < -kSideTol) return Side::Negative;
  return Side::Zero;
}

std::string sign_string(const SignVector& s) {
  std::string out;
  out.reserve(s.size());
  for (signed char c : s) out.push_back(c > 0 ? '+' : (c < 0 ? '-' : '0'));
  return out;
}

namespace {

std::vector<HalfSpace> box_rows(int n) {
  std::vector<HalfSpace> rows;
  for (int j = 0; j < n; ++j) {
    Vec up(n, 0.0), lo(n, 0.0);
    up[j] = 1.0;
    lo[j] = -1.0;
    rows.push_back({up, 1.0});
    rows.push_back({lo, 0.0});
  }
  return rows;
}

// side * (w^T x + b) >= 0 with w normalized
HalfSpace side_row(const Hyperplane& h, int side) {
  double nw = h.norm();
  HalfSpace r;
  r.a.resize(h.w.size());
  for (std::size_t j = 0; j < h.w.size(); ++j) r.a[j] = -side * h.w[j] / nw;
  r.c = side * h.b / nw;
  return r;
}

// equality w^T x + b = 0 with w normalized
HalfSpace equality_row(const Hyperplane& h) {
  double nw = h.norm();
  HalfSpace r;
  r.a.resize(h.w.size());
  for (std::size_t j = 0; j < h.w.size(); ++j) r.a[j] = h.w[j] / nw;
  r.c = -h.b / nw;
  return r;
}

struct SubspaceCheb {
  bool feasible = false;
  Vec x0;
  std::vector<Vec> basis;
  Vec center;
  double radius = -1.0;
};

Vec lift(const Vec& x0, const std::vector<Vec>& basis, const Vec& y) {
  Vec x = x0;
  for (std::size_t k = 0; k < basis.size(); ++k)
    for (std::size_t j = 0; j < x.size(); ++j) x[j] += basis[k][j] * y[k];
  return x;
}

// Restricts a half-space to the affine subspace x0 + span(basis).
// Returns false when the row is constant on the subspace; `violated` then reports infeasibility.
bool restrict_row(const HalfSpace& h, const Vec& x0, const std::vector<Vec>& basis, Vec& g, double& slack,
                  bool& violated) {
  std::size_t d = basis.size();
  g.assign(d, 0.0);
  for (std::size_t k = 0; k < d; ++k) g[k] = dot(basis[k], h.a);
  slack = h.c - dot(h.a, x0);
  violated = false;
  if (norm2(g) < 1e-12) {
    violated = slack < -kSideTol;
    return false;
  }
  return true;
}

bool setup_subspace(const Polytope& p, const std::vector<HalfSpace>& eq, SubspaceCheb& out) {
  int n = p.n;
  if (eq.empty()) {
    out.x0.assign(n, 0.0);
    out.basis = linalg::null_space({}, n);
    return true;
  }
  linalg::Rows E;
  Vec c;
  for (const auto& e : eq) {
    E.push_back(e.a);
    c.push_back(e.c);
  }
  auto sol = linalg::min_norm(E, c, n);
  if (sol.residual > kSideTol) return false;
  out.x0 = sol.x;
  out.basis = linalg::null_space(E, n);
  return true;
}

std::vector<HalfSpace> all_rows(const Polytope& p) {
  std::vector<HalfSpace> rows = p.halfspaces;
  auto box = box_rows(p.n);
  rows.insert(rows.end(), box.begin(), box.end());
  return rows;
}

SubspaceCheb subspace_chebyshev(const Polytope& p, const std::vector<HalfSpace>& eq) {
  SubspaceCheb out;
  if (!setup_subspace(p, eq, out)) return out;
  const std::size_t d = out.basis.size();
  auto rows = all_rows(p);
  if (d == 0) {
    for (const auto& h : rows)
      if (h.c - dot(h.a, out.x0) < -kSideTol) return out;
    out.feasible = true;
    out.center = out.x0;
    out.radius = 0.0;
    return out;
  }
  std::vector<Vec> A;
  Vec b;
  for (const auto& h : rows) {
    Vec g;
    double slack;
    bool violated;
    if (!restrict_row(h, out.x0, out.basis, g, slack, violated)) {
      if (violated) return out;
      continue;
    }
    Vec row(2 * d + 1, 0.0);
    for (std::size_t k = 0; k < d; ++k) {
      row[k] = g[k];
      row[d + k] = -g[k];
    }
    row[2 * d] = norm2(g);
    A.push_back(row);
    b.push_back(slack);
  }
  Vec rmax(2 * d + 1, 0.0);
  rmax[2 * d] = 1.0;
  A.push_back(rmax);
  b.push_back(1.0);
  Vec cost(2 * d + 1, 0.0);
  cost[2 * d] = 1.0;
  auto res = lp::maximize(A, b, cost);
  if (res.status != lp::Status::Optimal) return out;
  Vec y(d);
  for (std::size_t k = 0; k < d; ++k) y[k] = res.x[k] - res.x[d + k];
  out.feasible = true;
  out.center = lift(out.x0, out.basis, y);
  out.radius = res.x[2 * d];
  return out;
}

// Largest slack of `target` over the polytope restricted to the subspace of `sc`.
double max_slack(const Polytope& p, const SubspaceCheb& sc, const HalfSpace& target) {
  const std::size_t d = sc.basis.size();
  auto rows = all_rows(p);
  std::vector<Vec> A;
  Vec b;
  for (const auto& h : rows) {
    Vec g;
    double slack;
    bool violated;
    if (!restrict_row(h, sc.x0, sc.basis, g, slack, violated)) continue;
    Vec row(2 * d, 0.0);
    for (std::size_t k = 0; k < d; ++k) {
      row[k] = g[k];
      row[d + k] = -g[k];
    }
    A.push_back(row);
    b.push_back(slack);
  }
  Vec g;
  double slack0;
  bool violated;
  restrict_row(target, sc.x0, sc.basis, g, slack0, violated);
  Vec cost(2 * d, 0.0);
  for (std::size_t k = 0; k < d; ++k) {
    cost[k] = -g[k];
    cost[d + k] = g[k];
  }
  auto res = lp::maximize(A, b, cost);
  if (res.status == lp::Status::Unbounded) return std::numeric_limits<double>::infinity();
  if (res.status != lp::Status::Optimal) return -std::numeric_limits<double>::infinity();
  return slack0 + res.value;
}

}  // namespace

Chebyshev chebyshev_center(const Polytope& p) {
  const int n = p.n;
  std::vector<Vec> A;
  Vec b;
  for (const auto& h : p.halfspaces) {
    Vec row(h.a);
    row.push_back(norm2(h.a));
    A.push_back(row);
    b.push_back(h.c);
  }
  for (int j = 0; j < n; ++j) {
    Vec up(n + 1, 0.0), lo(n + 1, 0.0);
    up[j] = 1.0;
    up[n] = 1.0;
    lo[j] = -1.0;
    lo[n] = 1.0;
    A.push_back(up);
    b.push_back(1.0);
    A.push_back(lo);
    b.push_back(0.0);
  }
  Vec cost(n + 1, 0.0);
  cost[n] = 1.0;
  auto res = lp::maximize(A, b, cost);
  Chebyshev out;
  if (res.status != lp::Status::Optimal) return out;
  out.feasible = true;
  out.center.assign(res.x.begin(), res.x.begin() + n);
  out.radius = res.x[n];
  return out;
}

double min_over(const Polytope& p, const Vec& w, double b) {
  const int n = p.n;
  std::vector<Vec> A;
  Vec rhs;
  for (const auto& h : p.halfspaces) {
    A.push_back(h.a);
    rhs.push_back(h.c);
  }
  for (int j = 0; j < n; ++j) {
    Vec up(n, 0.0);
    up[j] = 1.0;
    A.push_back(up);
    rhs.push_back(1.0);
  }
  Vec cost(n);
  for (int j = 0; j < n; ++j) cost[j] = -w[j];
  auto res = lp::maximize(A, rhs, cost);
  if (res.status != lp::Status::Optimal) return std::numeric_limits<double>::infinity();
  return -res.value + b;
}

int polytope_dimension(const Polytope& p, const std::vector<HalfSpace>& equalities) {
  std::vector<HalfSpace> eq = equalities;
  auto rows = all_rows(p);
  std::vector<bool> used(rows.size(), false);
  for (;;) {
    SubspaceCheb sc = subspace_chebyshev(p, eq);
    if (!sc.feasible) return -1;
    const int d = static_cast<int>(sc.basis.size());
    if (d == 0) return 0;
    if (sc.radius >= kRadiusTol) return d;
    bool found = false;
    for (std::size_t i = 0; i < rows.size() && !found; ++i) {
      if (used[i]) continue;
      Vec g;
      double slack;
      bool violated;
      if (!restrict_row(rows[i], sc.x0, sc.basis, g, slack, violated)) continue;
      if (max_slack(p, sc, rows[i]) < kRadiusTol * norm2(g)) {
        used[i] = true;
        eq.push_back(rows[i]);
        found = true;
      }
    }
    if (!found) return d;
  }
}

// ---------------------------------------------------------------------------

int Arrangement::find_region(const SignVector& s) const {
  auto it = lookup_.find(s);
  return it == lookup_.end() ? -1 : it->second;
}

SignVector Arrangement::signs_at(const Vec& x) const {
  SignVector s(hyperplanes.size());
  for (std::size_t k = 0; k < hyperplanes.size(); ++k) s[k] = static_cast<signed char>(side_of(hyperplanes[k], x));
  return s;
}

int Arrangement::locate(const Vec& x) const {
  SignVector s = signs_at(x);
  for (signed char c : s)
    if (c == 0) return -1;
  return find_region(s);
}

int Arrangement::index_of(int id) const {
  auto it = id_index_.find(id);
  if (it == id_index_.end()) throw ValidationError("no hyperplane with id " + std::to_string(id));
  return it->second;
}

Polytope Arrangement::polytope(int region) const {
  Polytope p;
  p.n = n;
  const auto& s = regions.at(region).signs;
  for (std::size_t k = 0; k < hyperplanes.size(); ++k) p.halfspaces.push_back(side_row(hyperplanes[k], s[k]));
  return p;
}

std::vector<int> Arrangement::adjacent_entries(int region) const {
  if (region < 0 || region >= static_cast<int>(incident_.size())) return {};
  return incident_[region];
}

void Arrangement::rebuild_index() {
  lookup_.clear();
  id_index_.clear();
  for (std::size_t i = 0; i < regions.size(); ++i) lookup_[regions[i].signs] = static_cast<int>(i);
  for (std::size_t k = 0; k < hyperplanes.size(); ++k) {
    if (!id_index_.emplace(hyperplanes[k].id, static_cast<int>(k)).second)
      throw ValidationError("duplicate hyperplane id " + std::to_string(hyperplanes[k].id));
  }
  incident_.assign(regions.size(), {});
  for (std::size_t e = 0; e < adjacency.size(); ++e) {
    incident_[adjacency[e].r1].push_back(static_cast<int>(e));
    incident_[adjacency[e].r2].push_back(static_cast<int>(e));
  }
}

void Arrangement::compute_groups() {
  const std::size_t H = hyperplanes.size();
  group.assign(H, 0);
  std::vector<Vec> unit(H);
  for (std::size_t k = 0; k < H; ++k) {
    double nw = hyperplanes[k].norm();
    unit[k] = hyperplanes[k].w;
    for (double& v : unit[k]) v /= nw;
    unit[k].push_back(hyperplanes[k].b / nw);
  }
  for (std::size_t k = 0; k < H; ++k) {
    group[k] = static_cast<int>(k);
    for (std::size_t j = 0; j < k; ++j) {
      if (group[j] != static_cast<int>(j)) continue;
      double dp = 0.0, dm = 0.0;
      for (std::size_t c = 0; c < unit[k].size(); ++c) {
        dp = std::fmax(dp, std::fabs(unit[k][c] - unit[j][c]));
        dm = std::fmax(dm, std::fabs(unit[k][c] + unit[j][c]));
      }
      if (std::fmin(dp, dm) <= kSideTol) {
        group[k] = static_cast<int>(j);
        break;
      }
    }
  }
}

void Arrangement::compute_adjacency() {
  adjacency.clear();
  const std::size_t H = hyperplanes.size();
  std::vector<std::vector<int>> members(H);
  for (std::size_t k = 0; k < H; ++k) members[group[k]].push_back(static_cast<int>(k));
  lookup_.clear();
  for (std::size_t i = 0; i < regions.size(); ++i) lookup_[regions[i].signs] = static_cast<int>(i);

  for (std::size_t i = 0; i < regions.size(); ++i) {
    for (std::size_t g = 0; g < H; ++g) {
      if (members[g].empty()) continue;
      SignVector flipped = regions[i].signs;
      for (int k : members[g]) flipped[k] = static_cast<signed char>(-flipped[k]);
      int j = find_region(flipped);
      if (j <= static_cast<int>(i)) continue;
      Polytope common;
      common.n = n;
      std::vector<bool> in_group(H, false);
      for (int k : members[g]) in_group[k] = true;
      for (std::size_t k = 0; k < H; ++k)
        if (!in_group[k]) common.halfspaces.push_back(side_row(hyperplanes[k], regions[i].signs[k]));
      std::vector<HalfSpace> eq{equality_row(hyperplanes[g])};
      SubspaceCheb sc = subspace_chebyshev(common, eq);
      if (!sc.feasible) continue;
      if (sc.radius < kRadiusTol && polytope_dimension(common, eq) != n - 1) continue;
      Adjacency adj;
      adj.r1 = static_cast<int>(i);
      adj.r2 = j;
      adj.hyperplane = static_cast<int>(g);
      adj.facet_center = sc.center;
      adj.facet_radius = sc.radius;
      adjacency.push_back(adj);
    }
  }
  rebuild_index();
}

Arrangement build_arrangement(int n, const std::vector<Hyperplane>& hs) {
  if (n < 1) throw ValidationError("dimension must be positive");
  for (const auto& h : hs)
    if (h.dim() != n) throw DimensionMismatch("hyperplane dimension does not match n");
  Arrangement a;
  a.n = n;
  a.hyperplanes = hs;

  Region root;
  root.witness.assign(n, 0.5);
  root.radius = 0.5;
  std::vector<Region> regions{root};

  for (std::size_t k = 0; k < hs.size(); ++k) {
    const Hyperplane& h = hs[k];
    std::vector<Region> next;
    next.reserve(regions.size() * 2);
    for (const Region& r : regions) {
      Polytope p;
      p.n = n;
      for (std::size_t j = 0; j < k; ++j) p.halfspaces.push_back(side_row(hs[j], r.signs[j]));
      double d = h.value(r.witness) / h.norm();

      Region child[2];  // [0] negative side, [1] positive side
      bool ok[2] = {false, false};
      for (int s = 0; s < 2; ++s) {
        int side = s == 0 ? -1 : 1;
        if (side * d >= r.radius) {
          child[s] = r;
          ok[s] = true;
        } else {
          Polytope q = p;
          q.halfspaces.push_back(side_row(h, side));
          Chebyshev c = chebyshev_center(q);
          if (c.feasible && c.radius >= kRadiusTol) {
            child[s].signs = r.signs;
            child[s].witness = c.center;
            child[s].radius = c.radius;
            ok[s] = true;
          }
        }
        child[s].signs = r.signs;
        child[s].signs.push_back(static_cast<signed char>(side));
      }
      if (!ok[0] && !ok[1]) {
        int s = d >= 0.0 ? 1 : 0;
        child[s].witness = r.witness;
        child[s].radius = r.radius;
        ok[s] = true;
      }
      for (int s = 0; s < 2; ++s)
        if (ok[s]) next.push_back(child[s]);
    }
    regions.swap(next);
  }
  a.regions = std::move(regions);
  a.compute_groups();
  a.rebuild_index();
  a.compute_adjacency();
  return a;
}

int facet_dimension(const Arrangement& a, int r1, int r2) {
  const int R = static_cast<int>(a.regions.size());
  if (r1 < 0 || r2 < 0 || r1 >= R || r2 >= R) throw ValidationError("region index out of range");
  if (r1 == r2) return a.n;
  Polytope common;
  common.n = a.n;
  std::vector<HalfSpace> eq;
  const auto& s1 = a.regions[r1].signs;
  const auto& s2 = a.regions[r2].signs;
  for (std::size_t k = 0; k < a.hyperplanes.size(); ++k) {
    if (s1[k] == s2[k])
      common.halfspaces.push_back(side_row(a.hyperplanes[k], s1[k]));
    else
      eq.push_back(equality_row(a.hyperplanes[k]));
  }
  return polytope_dimension(common, eq);
}

namespace {

bool differ_only_in_group(const Arrangement& a, int r1, int r2, int hidx) {
  const auto& s1 = a.regions[r1].signs;
  const auto& s2 = a.regions[r2].signs;
  int g = a.group[hidx];
  bool any = false;
  for (std::size_t k = 0; k < s1.size(); ++k) {
    if (s1[k] == s2[k]) continue;
    if (a.group[k] != g) return false;
    any = true;
  }
  return any;
}

}  // namespace

OrderVerdict verify_order(const Arrangement& a, const StrictPartialOrder& o) {
  const int R = static_cast<int>(a.regions.size());
  const std::size_t z = o.chain.size();
  if (z == 0) throw ValidationError("empty chain");
  if (o.ordered_regions.size() != z) throw ValidationError("chain and ordered regions differ in length");
  std::vector<int> hi(z);
  for (std::size_t i = 0; i < z; ++i) hi[i] = a.index_of(o.chain[i]);
  for (int r : o.ordered_regions)
    if (r < 0 || r >= R) throw ValidationError("ordered region index out of range");
  if (o.initial_region >= R) throw ValidationError("initial region index out of range");

  auto sign = [&](int region, std::size_t chain_pos) { return a.regions[region].signs[hi[chain_pos]]; };
  auto fail = [](const char* cond, int idx) {
    OrderVerdict v;
    v.holds = false;
    v.condition = cond;
    v.index = idx;
    return v;
  };

  std::set<int> seen(o.ordered_regions.begin(), o.ordered_regions.end());
  if (seen.size() != z) return fail("distinct ordered regions", -1);

  for (std::size_t i = 0; i < z; ++i)
    for (std::size_t mu = 0; mu <= i; ++mu)
      if (sign(o.ordered_regions[i], mu) <= 0) return fail("R_i in intersection of l_mu+", static_cast<int>(i + 1));

  for (std::size_t nu = 1; nu < z; ++nu)
    for (std::size_t j = 0; j < nu; ++j)
      if (sign(o.ordered_regions[j], nu) >= 0) return fail("earlier regions in l_nu0", static_cast<int>(nu + 1));

  for (std::size_t nu = 1; nu < z; ++nu) {
    int cur = o.ordered_regions[nu], prev = o.ordered_regions[nu - 1];
    if (!differ_only_in_group(a, cur, prev, hi[nu]) || facet_dimension(a, cur, prev) != a.n - 1)
      return fail("facet q_nu on l_nu with dimension n-1", static_cast<int>(nu + 1));
  }

  if (o.initial_region >= 0) {
    int r0 = o.initial_region, r1 = o.ordered_regions[0];
    if (seen.count(r0)) return fail("initial region distinct", 0);
    if (sign(r0, 0) >= 0) return fail("initial region in l_1 0", 0);
    if (!differ_only_in_group(a, r0, r1, hi[0]) || facet_dimension(a, r0, r1) != a.n - 1)
      return fail("initial facet on l_1 with dimension n-1", 0);
  }
  return {};
}

std::pair<Arrangement, StrictPartialOrder> generate_translated_order(int n, const Vec& direction,
                                                                     const Vec& offsets, int orientation) {
  if (static_cast<int>(direction.size()) != n) throw DimensionMismatch("direction has wrong dimension");
  if (offsets.empty()) throw ValidationError("no offsets");
  if (orientation != 1 && orientation != -1) throw ValidationError("orientation must be +1 or -1");
  double nd = norm2(direction);
  if (!(nd > 0.0)) throw ValidationError("zero direction");
  Vec d = direction;
  for (double& v : d) v /= nd;
  double lo = 0.0, hi = 0.0;
  for (double v : d) (v < 0 ? lo : hi) += v;
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    if (i > 0 && !(offsets[i] > offsets[i - 1])) throw ValidationError("offsets must be strictly increasing");
    if (!(offsets[i] > lo && offsets[i] < hi)) throw ValidationError("offset outside the range of the box");
  }
  const std::size_t z = offsets.size();
  std::vector<Hyperplane> hs;
  for (std::size_t k = 0; k < z; ++k) {
    double off = orientation > 0 ? offsets[k] : offsets[z - 1 - k];
    Vec w = d;
    for (double& v : w) v *= orientation;
    hs.emplace_back(w, -orientation * off, static_cast<int>(k));
  }
  Arrangement a = build_arrangement(n, hs);
  StrictPartialOrder o;
  for (std::size_t k = 0; k < z; ++k) o.chain.push_back(static_cast<int>(k));
  for (std::size_t i = 0; i <= z; ++i) {
    SignVector s(z);
    for (std::size_t k = 0; k < z; ++k) s[k] = k < i ? 1 : -1;
    int r = a.find_region(s);
    if (r < 0) throw ValidationError("translated slab too thin to form a region");
    if (i == 0)
      o.initial_region = r;
    else
      o.ordered_regions.push_back(r);
  }
  return {std::move(a), std::move(o)};
}

std::vector<Vec> facet_points(const Arrangement& a, const Adjacency& adj) {
  std::vector<Vec> pts{adj.facet_center};
  if (a.n == 1) return pts;
  const Hyperplane& h = a.hyperplanes[adj.hyperplane];
  linalg::Rows W{h.w};
  auto dirs = linalg::null_space(W, a.n);
  double step = 0.5 * adj.facet_radius;
  for (const Vec& e : dirs) {
    Vec p = adj.facet_center;
    for (int j = 0; j < a.n; ++j) p[j] += step * e[j];
    pts.push_back(p);
  }
  Vec p = adj.facet_center;
  for (int j = 0; j < a.n; ++j) p[j] -= step * dirs[0][j];
  pts.push_back(p);
  return pts;
}

}  // namespace knotnet
