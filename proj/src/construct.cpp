#include "knotnet/construct.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "knotnet/errors.hpp"
#include "knotnet/linalg.hpp"

namespace knotnet {

namespace {

Vec column(const Hyperplane& h) {
  Vec c = h.w;
  c.push_back(h.b);
  return c;
}

linalg::Rows columns_as_rows(const std::vector<Vec>& cols, int n) {
  linalg::Rows A(n + 1, Vec(cols.size(), 0.0));
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (int i = 0; i <= n; ++i) A[i][j] = cols[j][i];
  return A;
}

double box_min(const Hyperplane& h) {
  double m = h.b;
  for (double v : h.w) m += std::fmin(0.0, v);
  return m;
}

}  // namespace

Vec solve_linear_output(const LinearOutputSystem& sys, const AffinePiece& target, const std::map<int, double>& fixed) {
  const int m = static_cast<int>(sys.columns.size());
  const int n = target.dim();
  for (const auto& h : sys.columns)
    if (h.dim() != n) throw DimensionMismatch("column dimension differs from target");
  if (sys.region) {
    for (const auto& h : sys.columns)
      if (min_over(*sys.region, h.w, h.b) < -kSideTol * h.norm())
        throw ValidationError("region is not on the positive side of column " + std::to_string(h.id));
  }
  Vec rhs = target.w;
  rhs.push_back(target.b);
  Vec lambda(m, 0.0);
  std::vector<Vec> free_cols;
  std::vector<int> free_idx;
  for (int j = 0; j < m; ++j) {
    Vec c = column(sys.columns[j]);
    auto it = fixed.find(j);
    if (it != fixed.end()) {
      lambda[j] = it->second;
      for (int i = 0; i <= n; ++i) rhs[i] -= it->second * c[i];
    } else {
      free_cols.push_back(c);
      free_idx.push_back(j);
    }
  }
  auto A = columns_as_rows(free_cols, n);
  const int cols = static_cast<int>(free_cols.size());
  int r = linalg::rank(A, cols);
  if (r < n + 1) throw RankDeficient(r, n + 1);
  auto sol = linalg::min_norm(A, rhs, cols);
  double scale = std::fmax(1.0, max_abs(rhs));
  if (sol.residual > 1e-10 * scale) throw NumericError("linear-output residual too large");
  for (int k = 0; k < cols; ++k) lambda[free_idx[k]] = sol.x[k];
  return lambda;
}

std::vector<Hyperplane> perturb_to_nonsingular(const std::vector<Hyperplane>& hs, const Polytope& region, double eps) {
  if (hs.empty()) throw ValidationError("no hyperplanes to perturb");
  const int n = hs.front().dim();
  if (static_cast<int>(hs.size()) != n + 1) throw ValidationError("perturbation needs exactly n+1 hyperplanes");
  std::vector<Vec> cols;
  for (const auto& h : hs) cols.push_back(column(h));
  if (linalg::rank(columns_as_rows(cols, n), n + 1) == n + 1) return hs;

  std::vector<Hyperplane> out = hs;
  std::vector<Vec> q;  // orthonormal basis of the span so far
  auto project_out = [&](Vec v) {
    for (const Vec& e : q) {
      double c = dot(v, e);
      for (int i = 0; i <= n; ++i) v[i] -= c * e[i];
    }
    return v;
  };
  auto push_unit = [&](Vec v) {
    double nv = norm2(v);
    for (double& x : v) x /= nv;
    q.push_back(v);
  };
  push_unit(cols[0]);
  for (int k = 1; k <= n; ++k) {
    Vec res = project_out(cols[k]);
    if (norm2(res) > 1e-9 * std::fmax(1.0, norm2(cols[k]))) {
      push_unit(res);
      continue;
    }
    // direction orthogonal to the current span: the most independent coordinate axis
    Vec best;
    double best_norm = -1.0;
    for (int j = 0; j <= n; ++j) {
      Vec e(n + 1, 0.0);
      e[j] = 1.0;
      Vec r = project_out(e);
      if (norm2(r) > best_norm + 1e-12) {
        best_norm = norm2(r);
        best = r;
      }
    }
    for (double& x : best) x /= best_norm;
    Vec c = cols[k];
    for (int i = 0; i <= n; ++i) c[i] += eps * best[i];
    Vec w(c.begin(), c.begin() + n);
    if (!(norm2(w) > 0.0)) throw PerturbationBreaksRegion("perturbation produced a zero normal");
    out[k] = Hyperplane(w, c[n], hs[k].id);
    push_unit(best);
  }
  for (int k = 1; k <= n; ++k) {
    if (min_over(region, out[k].w, out[k].b) < -kSideTol * out[k].norm())
      throw PerturbationBreaksRegion("perturbed hyperplane " + std::to_string(out[k].id) +
                                     " no longer has the region on its positive side");
  }
  return out;
}

double adjacent_lambda(const AffinePiece& s_prev, const AffinePiece& s_next, const Hyperplane& knot) {
  const int n = knot.dim();
  if (s_prev.dim() != n || s_next.dim() != n) throw DimensionMismatch("piece dimension differs from knot");
  AffinePiece diff = s_next - s_prev;
  double nw2 = dot(knot.w, knot.w);
  Vec p0(n), probe(n);
  for (int j = 0; j < n; ++j) {
    p0[j] = -knot.b * knot.w[j] / nw2;
    probe[j] = p0[j] + knot.w[j] / nw2;  // knot value 1 here
  }
  double tol = 1e-8 * std::fmax(1.0, std::fmax(s_prev.scale(), s_next.scale()));
  std::vector<Vec> pts{p0};
  for (const Vec& e : linalg::null_space({knot.w}, n)) {
    Vec p = p0;
    for (int j = 0; j < n; ++j) p[j] += e[j];
    pts.push_back(p);
  }
  for (const Vec& p : pts)
    if (std::fabs(diff(p)) > tol)
      throw NotContinuous("pieces disagree on knot " + std::to_string(knot.id) + " by " + std::to_string(diff(p)));
  return diff(probe);
}

std::vector<Hyperplane> default_globals(int n, int count) {
  if (count < n || count > n + 1) throw ValidationError("default globals come in sets of n or n+1");
  std::vector<Hyperplane> gs;
  for (int k = 0; k < n; ++k) {
    Vec w(n, 0.0);
    w[k] = 1.0;
    gs.emplace_back(w, 0.1, -(k + 1));
  }
  if (count == n + 1) gs.emplace_back(Vec(n, 1.0), 0.25, -(n + 1));
  return gs;
}

AffinePiece realized_piece(const ReluNetwork& net, const Arrangement& a, int region) {
  const Vec& x = a.regions.at(region).witness;
  AffinePiece p(Vec(net.n, 0.0), net.output_bias);
  for (const auto& u : net.units) {
    if (u.degenerate()) {
      p.b += u.lambda * std::fmax(0.0, u.b);
    } else if (dot(u.w, x) + u.b > 0.0) {
      p.add_scaled(u.w, u.b, u.lambda);
    }
  }
  return p;
}

ReluNetwork realize_single_order(const Arrangement& a, const StrictPartialOrder& o, const std::vector<AffinePiece>& target,
                                 std::vector<Hyperplane> globals) {
  const int n = a.n;
  if (target.size() != a.regions.size()) throw ValidationError("target needs one piece per region");
  auto verdict = verify_order(a, o);
  if (!verdict.holds) throw PlanInvalid("order", verdict.condition + " at " + std::to_string(verdict.index));
  if (globals.empty()) globals = default_globals(n, n);
  if (static_cast<int>(globals.size()) < n) throw ValidationError("need at least n global hyperplanes");

  auto positive_on_order = [&](const Hyperplane& g) {
    for (int r : o.ordered_regions)
      if (min_over(a.polytope(r), g.w, g.b) < -kSideTol * g.norm()) return false;
    return true;
  };
  for (const auto& g : globals)
    if (!positive_on_order(g)) throw ValidationError("global hyperplane " + std::to_string(g.id) + " cuts an ordered region");

  const Hyperplane& l1 = a.hyperplanes[a.index_of(o.chain[0])];
  std::vector<Hyperplane> cols{l1};
  cols.insert(cols.end(), globals.begin(), globals.end());
  std::vector<Vec> cv;
  for (const auto& h : cols) cv.push_back(column(h));
  if (linalg::rank(columns_as_rows(cv, n), static_cast<int>(cv.size())) < n + 1) {
    std::vector<Hyperplane> head(cols.begin(), cols.begin() + n + 1);
    Polytope r1 = a.polytope(o.ordered_regions[0]);
    double eps = 1e-6;
    bool done = false;
    for (int attempt = 0; attempt <= 6 && !done; ++attempt, eps *= 0.5) {
      try {
        auto pert = perturb_to_nonsingular(head, r1, eps);
        bool ok = true;
        for (int k = 1; k <= n && ok; ++k) ok = positive_on_order(pert[k]);
        if (!ok) continue;
        std::copy(pert.begin(), pert.end(), cols.begin());
        done = true;
      } catch (const PerturbationBreaksRegion&) {
      }
    }
    if (!done) throw PerturbationBreaksRegion("no admissible perturbation of the global hyperplanes");
  }

  LinearOutputSystem sys{cols, std::nullopt};
  Vec lam = solve_linear_output(sys, target[o.ordered_regions[0]]);

  ReluNetwork net;
  net.n = n;
  for (std::size_t j = 1; j < cols.size(); ++j) net.units.push_back({cols[j].w, cols[j].b, lam[j]});
  net.units.push_back({l1.w, l1.b, lam[0]});
  for (std::size_t nu = 1; nu < o.chain.size(); ++nu) {
    const Hyperplane& h = a.hyperplanes[a.index_of(o.chain[nu])];
    double l = adjacent_lambda(target[o.ordered_regions[nu - 1]], target[o.ordered_regions[nu]], h);
    net.units.push_back({h.w, h.b, l});
  }
  return net;
}

// ---------------------------------------------------------------- multi-order plans

namespace {

std::vector<int> validate_plan(const Arrangement& a, const OrderPlan& plan) {
  const int R = static_cast<int>(a.regions.size());
  const int n = a.n;
  const std::size_t P = plan.orders.size();
  if (P == 0) throw PlanInvalid("I", "no orders");
  {
    std::vector<int> seq = plan.sequence;
    std::sort(seq.begin(), seq.end());
    for (std::size_t i = 0; i < P; ++i)
      if (seq.size() != P || seq[i] != static_cast<int>(i)) throw PlanInvalid("sequence", "not a permutation of the orders");
  }
  if (static_cast<int>(plan.universal_globals.size()) < n + 1)
    throw PlanInvalid("globals", "need at least n+1 universal global hyperplanes");
  for (const auto& g : plan.universal_globals) {
    if (g.dim() != n) throw DimensionMismatch("global hyperplane dimension differs");
    if (!(box_min(g) > 0.0)) throw PlanInvalid("globals", "hyperplane " + std::to_string(g.id) + " does not contain U on its positive side");
  }
  if (plan.hub_region < 0 || plan.hub_region >= R) throw PlanInvalid("I", "hub region out of range");

  std::vector<int> owner(R, -1);  // order owning each ordered region
  std::set<int> hyper_used;
  for (std::size_t i = 0; i < P; ++i) {
    const auto& o = plan.orders[i];
    auto v = verify_order(a, o);
    if (!v.holds) throw PlanInvalid("order", "order " + std::to_string(i) + ": " + v.condition);
    if (o.initial_region < 0) throw PlanInvalid("IV", "order " + std::to_string(i) + " has no initial region");
    for (int id : o.chain)
      if (!hyper_used.insert(a.group[a.index_of(id)]).second)
        throw PlanInvalid("I", "hyperplane " + std::to_string(id) + " appears in two orders");
    for (int r : o.ordered_regions) {
      if (r == plan.hub_region) throw PlanInvalid("I", "hub is an ordered region");
      if (owner[r] >= 0) throw PlanInvalid("I", "region " + std::to_string(r) + " ordered twice");
      owner[r] = static_cast<int>(i);
    }
  }
  for (std::size_t k = 0; k < a.hyperplanes.size(); ++k) {
    bool pos = false, neg = false;
    for (const auto& reg : a.regions) (reg.signs[k] > 0 ? pos : neg) = true;
    if (pos && neg && !hyper_used.count(a.group[k]))
      throw PlanInvalid("I", "hyperplane " + std::to_string(a.hyperplanes[k].id) + " belongs to no order");
  }
  std::vector<int> uncovered;
  for (int r = 0; r < R; ++r)
    if (r != plan.hub_region && owner[r] < 0) uncovered.push_back(r);
  if (plan.uncovered) {
    std::vector<int> given = *plan.uncovered;
    std::sort(given.begin(), given.end());
    if (given != uncovered) throw PlanInvalid("I", "declared uncovered regions differ from the derived set");
  }

  auto sign = [&](int region, int id) { return a.regions[region].signs[a.index_of(id)]; };
  // II: hub and regions of earlier orders lie on the zero side of later orders' hyperplanes
  std::vector<int> done{plan.hub_region};
  for (std::size_t p = 0; p < P; ++p) {
    if (p > 0) {
      const auto& prev = plan.orders[plan.sequence[p - 1]];
      done.insert(done.end(), prev.ordered_regions.begin(), prev.ordered_regions.end());
    }
    for (std::size_t q = p; q < P; ++q)
      for (int id : plan.orders[plan.sequence[q]].chain)
        for (int r : done)
          if (sign(r, id) > 0)
            throw PlanInvalid("II", "region " + std::to_string(r) + " lies on the positive side of later hyperplane " +
                                        std::to_string(id));
  }
  // III: hyperplanes whose positive side holds R_0 also hold every ordered region of that order
  for (std::size_t i = 0; i < P; ++i) {
    const auto& o = plan.orders[i];
    for (std::size_t k = 0; k < a.hyperplanes.size(); ++k) {
      if (a.regions[o.initial_region].signs[k] <= 0) continue;
      for (int r : o.ordered_regions)
        if (a.regions[r].signs[k] <= 0)
          throw PlanInvalid("III", "order " + std::to_string(i) + " leaves the positive side of hyperplane " +
                                       std::to_string(a.hyperplanes[k].id));
    }
  }
  // IV: initial regions come from the hub, an earlier order, or an uncovered region (checked on use)
  std::vector<int> position(P);
  for (std::size_t p = 0; p < P; ++p) position[plan.sequence[p]] = static_cast<int>(p);
  for (std::size_t i = 0; i < P; ++i) {
    int r0 = plan.orders[i].initial_region;
    if (r0 == plan.hub_region) continue;
    if (owner[r0] >= 0 && position[owner[r0]] >= position[i])
      throw PlanInvalid("IV", "initial region of order " + std::to_string(i) + " belongs to an order executed later");
  }
  return uncovered;
}

bool active_on(const ReluUnit& u, const Arrangement& a, int region) {
  return dot(u.w, a.regions[region].witness) + u.b > 0.0;
}

void build_network(Realization& st) {
  const Arrangement& a = st.arrangement;
  const OrderPlan& plan = st.plan;
  const auto& target = st.target;
  const int n = a.n;

  std::vector<ReluUnit> units;
  std::vector<bool> known;
  std::vector<int> unit_h;
  for (const auto& g : plan.universal_globals) {
    units.push_back({g.w, g.b, 0.0});
    known.push_back(false);
    unit_h.push_back(-1);
  }
  struct Slots {
    int pos = -1;
    int neg = -1;
  };
  std::map<int, Slots> slots;
  auto form_of = [&](int id) {
    auto it = st.forms.find(id);
    return it == st.forms.end() ? UnitForm::Positive : it->second;
  };
  for (int idx : plan.sequence) {
    for (int id : plan.orders[idx].chain) {
      const Hyperplane& h = a.hyperplanes[a.index_of(id)];
      UnitForm f = form_of(id);
      Slots s;
      if (f != UnitForm::Negative) {
        s.pos = static_cast<int>(units.size());
        units.push_back({h.w, h.b, 0.0});
        known.push_back(false);
        unit_h.push_back(id);
      }
      if (f != UnitForm::Positive) {
        s.neg = static_cast<int>(units.size());
        Vec w = h.w;
        for (double& v : w) v = -v;
        units.push_back({w, -h.b, 0.0});
        known.push_back(false);
        unit_h.push_back(id);
      }
      slots[id] = s;
    }
  }

  auto prev_region = [](const StrictPartialOrder& o, std::size_t nu) {
    return nu == 0 ? o.initial_region : o.ordered_regions[nu - 1];
  };
  // negative units are active before their knot is reached, so their weights are fixed up front
  for (int idx : plan.sequence) {
    const auto& o = plan.orders[idx];
    for (std::size_t nu = 0; nu < o.chain.size(); ++nu) {
      int id = o.chain[nu];
      UnitForm f = form_of(id);
      if (f == UnitForm::Negative) {
        const Hyperplane& h = a.hyperplanes[a.index_of(id)];
        units[slots[id].neg].lambda = adjacent_lambda(target[prev_region(o, nu)], target[o.ordered_regions[nu]], h);
        known[slots[id].neg] = true;
      } else if (f == UnitForm::Both) {
        units[slots[id].neg].lambda = st.free_weight;
        known[slots[id].neg] = true;
      }
    }
  }

  const int G = static_cast<int>(plan.universal_globals.size());
  auto piece_from_known = [&](int region, const char* cond, bool skip_globals = false) {
    AffinePiece p = AffinePiece::zero(n);
    for (std::size_t u = skip_globals ? G : 0; u < units.size(); ++u) {
      if (!active_on(units[u], a, region)) continue;
      if (!known[u]) throw PlanInvalid(cond, "unit on hyperplane " + std::to_string(unit_h[u]) +
                                                 " is active on region " + std::to_string(region) + " before it is built");
      p.add_scaled(units[u].w, units[u].b, units[u].lambda);
    }
    return p;
  };

  // hub: the universal globals absorb whatever the known units leave over
  AffinePiece fixed = piece_from_known(plan.hub_region, "II", true);
  for (int g = 0; g < G; ++g) {
    if (!active_on(units[g], a, plan.hub_region)) throw PlanInvalid("globals", "global inactive on the hub");
  }
  std::vector<Hyperplane> gh = plan.universal_globals;
  std::vector<Vec> gc;
  for (const auto& h : gh) gc.push_back(column(h));
  if (linalg::rank(columns_as_rows(gc, n), G) < n + 1) {
    std::vector<Hyperplane> head(gh.begin(), gh.begin() + n + 1);
    Polytope hub = a.polytope(plan.hub_region);
    double eps = 1e-6;
    bool done = false;
    for (int attempt = 0; attempt <= 6 && !done; ++attempt, eps *= 0.5) {
      try {
        auto pert = perturb_to_nonsingular(head, hub, eps);
        bool ok = true;
        for (const auto& h : pert) ok = ok && box_min(h) > 0.0;
        if (!ok) continue;
        std::copy(pert.begin(), pert.end(), gh.begin());
        done = true;
      } catch (const PerturbationBreaksRegion&) {
      }
    }
    if (!done) throw PerturbationBreaksRegion("no admissible perturbation of the universal globals");
    for (int g = 0; g < G; ++g) {
      units[g].w = gh[g].w;
      units[g].b = gh[g].b;
    }
    st.plan.universal_globals = gh;
  }
  Vec lam = solve_linear_output({gh, std::nullopt}, target[plan.hub_region] - fixed);
  for (int g = 0; g < G; ++g) {
    units[g].lambda = lam[g];
    known[g] = true;
  }

  std::set<int> uncovered(st.uncovered.begin(), st.uncovered.end());
  for (int idx : plan.sequence) {
    const auto& o = plan.orders[idx];
    for (std::size_t nu = 0; nu < o.chain.size(); ++nu) {
      int id = o.chain[nu];
      const Hyperplane& h = a.hyperplanes[a.index_of(id)];
      int prev = prev_region(o, nu);
      AffinePiece realized_prev = piece_from_known(prev, "II");
      double total;
      try {
        total = adjacent_lambda(realized_prev, target[o.ordered_regions[nu]], h);
      } catch (const NotContinuous& e) {
        if (nu == 0 && uncovered.count(prev))
          throw PlanInvalid("IV", std::string("initial piece on an uncovered region is not continuous with the order: ") + e.what());
        throw;
      }
      UnitForm f = form_of(id);
      if (f == UnitForm::Positive) {
        units[slots[id].pos].lambda = total;
        known[slots[id].pos] = true;
      } else if (f == UnitForm::Both) {
        units[slots[id].pos].lambda = total - units[slots[id].neg].lambda;
        known[slots[id].pos] = true;
      }
    }
  }

  st.network = ReluNetwork{};
  st.network.n = n;
  st.network.units = units;
  st.unit_hyperplane = unit_h;

  std::vector<int> designed{plan.hub_region};
  for (const auto& o : plan.orders) designed.insert(designed.end(), o.ordered_regions.begin(), o.ordered_regions.end());
  for (int r : designed) {
    AffinePiece got = realized_piece(st.network, a, r);
    if (got.distance(target[r]) > 1e-7 * std::fmax(1.0, target[r].scale()))
      throw NumericError("realized piece on region " + std::to_string(r) + " misses the target");
  }
}

}  // namespace

Realization realize_plan(const Arrangement& a, const OrderPlan& plan, const std::vector<AffinePiece>& target) {
  if (target.size() != a.regions.size()) throw ValidationError("target needs one piece per region");
  for (const auto& p : target)
    if (p.dim() != a.n) throw DimensionMismatch("target piece dimension differs");
  Realization st;
  st.arrangement = a;
  st.plan = plan;
  st.target = target;
  st.uncovered = validate_plan(a, plan);
  build_network(st);
  return st;
}

ReluNetwork realize_multi_order(const Arrangement& a, const OrderPlan& plan, const std::vector<AffinePiece>& target) {
  return realize_plan(a, plan, target).network;
}

Realization apply_negative_forms(const Realization& state, const std::vector<int>& flips, NegativeMode mode) {
  if (flips.empty()) return state;
  std::set<int> chain_ids;
  for (const auto& o : state.plan.orders) chain_ids.insert(o.chain.begin(), o.chain.end());
  for (int id : flips)
    if (!chain_ids.count(id)) throw FlipOutsideOrderTree("hyperplane " + std::to_string(id) + " is not a knot of the order tree");
  if (!state.uncovered.empty())
    throw FlipOutsideOrderTree("negative forms need every region to be the hub or an ordered region");

  Realization next = state;
  for (int id : flips) {
    UnitForm cur = UnitForm::Positive;
    if (auto it = next.forms.find(id); it != next.forms.end()) cur = it->second;
    if (mode == NegativeMode::Substitute) {
      if (cur == UnitForm::Both) throw ValidationError("cannot substitute a bidirectional knot");
      next.forms[id] = cur == UnitForm::Positive ? UnitForm::Negative : UnitForm::Positive;
    } else {
      next.forms[id] = UnitForm::Both;
    }
  }
  build_network(next);
  return next;
}

}  // namespace knotnet
