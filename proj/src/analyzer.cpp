#include "knotnet/analyzer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "knotnet/errors.hpp"
#include "knotnet/linalg.hpp"
#include "knotnet/rng.hpp"

namespace knotnet {

const char* to_string(UnitClass c) {
  switch (c) {
    case UnitClass::Inactivated: return "inactivated";
    case UnitClass::UniversalGlobal: return "universal-global";
    case UnitClass::GlobalForOrder: return "global";
    case UnitClass::LocalPositive: return "local-positive";
    case UnitClass::LocalNegative: return "local-negative";
    case UnitClass::Degenerate: return "degenerate";
  }
  return "?";
}

namespace {

Vec normalized(const ReluUnit& u) {
  double nw = norm2(u.w);
  Vec v = u.w;
  v.push_back(u.b);
  for (double& x : v) x /= nw;
  return v;
}

double coeff_distance(const Vec& a, const Vec& b, double sign) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::fmax(d, std::fabs(a[i] - sign * b[i]));
  return d;
}

bool is_local(const UnitLabel& l) {
  return l.cls == UnitClass::LocalPositive || l.cls == UnitClass::LocalNegative || l.cls == UnitClass::GlobalForOrder;
}

// Volume classes, equivalence groups, partners and redundancy; local units are provisional.
std::vector<UnitLabel> base_labels(const ReluNetwork& net, const AnalyzerConfig& cfg) {
  net.validate();
  const int U = net.theta();
  const int n = net.n;
  std::vector<Vec> samples(cfg.mc_samples, Vec(n));
  SplitMix64 rng(cfg.seed);
  for (auto& x : samples)
    for (double& v : x) v = rng.uniform();

  std::vector<UnitLabel> labels(U);
  std::vector<Vec> nv(U);
  for (int i = 0; i < U; ++i) {
    const auto& u = net.units[i];
    UnitLabel& l = labels[i];
    l.unit = i;
    if (u.degenerate()) {
      l.cls = UnitClass::Degenerate;
      l.positive_fraction = u.b > 0.0 ? 1.0 : 0.0;
      continue;
    }
    nv[i] = normalized(u);
    int pos = 0;
    for (const auto& x : samples) pos += dot(u.w, x) + u.b > 0.0;
    l.positive_fraction = static_cast<double>(pos) / cfg.mc_samples;
    if (l.positive_fraction <= cfg.tau_dead)
      l.cls = UnitClass::Inactivated;
    else if (1.0 - l.positive_fraction <= cfg.tau_global)
      l.cls = UnitClass::UniversalGlobal;
    else
      l.cls = UnitClass::LocalPositive;
  }
  for (int i = 0; i < U; ++i) {
    if (labels[i].cls == UnitClass::Degenerate) continue;
    for (int j = 0; j < U; ++j) {
      if (j == i || labels[j].cls == UnitClass::Degenerate) continue;
      if (!labels[i].equivalence_group && coeff_distance(nv[i], nv[j], 1.0) <= cfg.match_tol)
        labels[i].equivalence_group = std::min(i, j);
      if (!labels[i].bidirectional_partner && coeff_distance(nv[i], nv[j], -1.0) <= cfg.match_tol)
        labels[i].bidirectional_partner = j;
    }
  }
  // universal globals outside a greedy rank-(n+1) basis carry no extra freedom
  linalg::Rows cols(n + 1);
  int rank = 0;
  for (int i = 0; i < U; ++i) {
    if (labels[i].cls != UnitClass::UniversalGlobal) continue;
    if (rank == n + 1) {
      labels[i].redundant = true;
      continue;
    }
    for (int r = 0; r < n; ++r) cols[r].push_back(net.units[i].w[r]);
    cols[n].push_back(net.units[i].b);
    int nr = linalg::rank(cols, static_cast<int>(cols[0].size()));
    if (nr > rank) {
      rank = nr;
    } else {
      labels[i].redundant = true;
      for (auto& row : cols) row.pop_back();
    }
  }
  return labels;
}

struct ChainSearch {
  const Arrangement& a;
  const std::vector<UnitLabel>& labels;
  std::vector<bool> group_ok;  // every member is a local unit and not yet used

  ChainSearch(const Arrangement& arr, const std::vector<UnitLabel>& ls) : a(arr), labels(ls) {
    const std::size_t H = a.hyperplanes.size();
    group_ok.assign(H, false);
    std::vector<bool> all_local(H, true), any(H, false);
    for (std::size_t k = 0; k < H; ++k) {
      int g = a.group[k];
      any[g] = true;
      if (!is_local(labels[a.hyperplanes[k].id])) all_local[g] = false;
    }
    for (std::size_t g = 0; g < H; ++g) group_ok[g] = any[g] && all_local[g];
  }

  // lowest unit in group g whose zero side holds r0 and positive side holds r1; -1 if none
  int crossing_unit(int r0, int r1, int g) const {
    int best = -1;
    for (std::size_t k = 0; k < a.hyperplanes.size(); ++k) {
      if (a.group[k] != g) continue;
      if (a.regions[r0].signs[k] < 0 && a.regions[r1].signs[k] > 0) {
        int id = a.hyperplanes[k].id;
        if (best < 0 || id < best) best = id;
      }
    }
    return best;
  }

  std::vector<int> separating(int r0, int r1) const {
    std::vector<int> s;
    for (std::size_t k = 0; k < a.hyperplanes.size(); ++k)
      if (a.group[k] == static_cast<int>(k) && a.regions[r0].signs[k] != a.regions[r1].signs[k])
        s.push_back(static_cast<int>(k));
    return s;
  }

  std::optional<StrictPartialOrder> walk(int r0, int r1, const std::vector<int>& groups) const {
    std::map<int, int> unit_of;
    for (int g : groups) {
      int u = crossing_unit(r0, r1, g);
      if (u < 0) return std::nullopt;
      unit_of[g] = u;
    }
    StrictPartialOrder o;
    o.initial_region = r0;
    std::set<int> remaining(groups.begin(), groups.end());
    int cur = r0;
    while (!remaining.empty()) {
      int best_e = -1, best_u = -1;
      for (int e : a.adjacent_entries(cur)) {
        const auto& adj = a.adjacency[e];
        if (!remaining.count(adj.hyperplane)) continue;
        int u = unit_of[adj.hyperplane];
        if (best_u < 0 || u < best_u) {
          best_u = u;
          best_e = e;
        }
      }
      if (best_e < 0) return std::nullopt;
      const auto& adj = a.adjacency[best_e];
      remaining.erase(adj.hyperplane);
      cur = adj.r1 == cur ? adj.r2 : adj.r1;
      o.chain.push_back(best_u);
      o.ordered_regions.push_back(cur);
    }
    if (cur != r1) return std::nullopt;
    if (!verify_order(a, o).holds) return std::nullopt;
    return o;
  }

  std::optional<StrictPartialOrder> next_chain() const {
    const int R = static_cast<int>(a.regions.size());
    std::map<int, std::vector<std::pair<int, int>>, std::greater<>> by_len;
    for (int r0 = 0; r0 < R; ++r0) {
      for (int r1 = 0; r1 < R; ++r1) {
        if (r0 == r1) continue;
        auto s = separating(r0, r1);
        bool ok = !s.empty();
        for (int g : s) ok = ok && group_ok[g] && crossing_unit(r0, r1, g) >= 0;
        if (ok) by_len[static_cast<int>(s.size())].push_back({r0, r1});
      }
    }
    for (const auto& [len, pairs] : by_len) {
      std::optional<StrictPartialOrder> best;
      std::vector<int> best_key;
      for (auto [r0, r1] : pairs) {
        auto o = walk(r0, r1, separating(r0, r1));
        if (!o) continue;
        std::vector<int> key = o->chain;
        std::sort(key.begin(), key.end());
        key.push_back(r0);
        if (!best || key < best_key) {
          best = o;
          best_key = key;
        }
      }
      if (best) return best;
    }
    return std::nullopt;
  }

  void consume(const StrictPartialOrder& o) {
    for (int id : o.chain) group_ok[a.group[a.index_of(id)]] = false;
  }
};

int find_root(std::vector<int>& p, int x) {
  while (p[x] != x) x = p[x] = p[p[x]];
  return x;
}

OrderForest forest_on(const PiecewiseLinear& pl, const std::vector<UnitLabel>& labels) {
  const Arrangement& a = pl.arrangement;
  OrderForest f;
  const int R = static_cast<int>(a.regions.size());
  ChainSearch cs(a, labels);
  while (auto o = cs.next_chain()) {
    cs.consume(*o);
    f.orders.push_back(*o);
  }
  // hub: the initial region that seeds the most chains, then fewest active local units
  std::vector<int> seeded(R, 0), active(R, 0);
  for (const auto& o : f.orders)
    if (o.initial_region >= 0) ++seeded[o.initial_region];
  for (int r = 0; r < R; ++r)
    for (std::size_t k = 0; k < a.hyperplanes.size(); ++k)
      active[r] += a.regions[r].signs[k] > 0 && is_local(labels[a.hyperplanes[k].id]);
  for (int r = 0; r < R; ++r)
    if (f.hub < 0 || seeded[r] > seeded[f.hub] || (seeded[r] == seeded[f.hub] && active[r] < active[f.hub])) f.hub = r;
  const int P = static_cast<int>(f.orders.size());
  std::vector<int> parent(P + 1);
  std::iota(parent.begin(), parent.end(), 0);
  for (int i = 0; i < P; ++i) {
    int r0 = f.orders[i].initial_region;
    if (r0 == f.hub) parent[find_root(parent, i)] = find_root(parent, P);
    for (int j = 0; j < P; ++j) {
      if (j == i) continue;
      const auto& reg = f.orders[j].ordered_regions;
      if (std::find(reg.begin(), reg.end(), r0) != reg.end()) parent[find_root(parent, i)] = find_root(parent, j);
    }
  }
  std::map<int, std::vector<int>> comps;
  for (int i = 0; i < P; ++i) comps[find_root(parent, i)].push_back(i);
  for (auto& [root, members] : comps) f.trees.push_back(members);
  std::sort(f.trees.begin(), f.trees.end());

  std::vector<bool> covered(R, false);
  covered[f.hub] = true;
  for (const auto& o : f.orders)
    for (int r : o.ordered_regions) covered[r] = true;
  for (int r = 0; r < R; ++r)
    if (!covered[r]) f.uncovered.push_back(r);
  return f;
}

void finalize(std::vector<UnitLabel>& labels, const PiecewiseLinear& pl, const OrderForest& f, int n) {
  const Arrangement& a = pl.arrangement;
  std::set<int> in_chain;
  for (const auto& o : f.orders) in_chain.insert(o.chain.begin(), o.chain.end());
  for (auto& l : labels) {
    if (!is_local(l)) continue;
    if (in_chain.count(l.unit)) {
      l.cls = UnitClass::LocalPositive;
      continue;
    }
    // same group as a chain unit: equivalent if co-oriented, its partner otherwise
    bool partner_in_chain = false, equivalent_in_chain = false;
    const int gl = a.group[a.index_of(l.unit)];
    for (int c : in_chain) {
      if (a.group[a.index_of(c)] != gl) continue;
      if (dot(a.hyperplanes[a.index_of(c)].w, a.hyperplanes[a.index_of(l.unit)].w) < 0.0)
        partner_in_chain = true;
      else
        equivalent_in_chain = true;
    }
    if (equivalent_in_chain) {
      l.cls = UnitClass::LocalPositive;
      continue;
    }
    if (partner_in_chain) {
      l.cls = UnitClass::LocalNegative;
      continue;
    }
    bool global = false;
    const int k = a.index_of(l.unit);
    for (const auto& o : f.orders) {
      bool all = a.regions[o.initial_region].signs[k] > 0;
      for (int r : o.ordered_regions) all = all && a.regions[r].signs[k] > 0;
      global = global || all;
    }
    l.cls = global ? UnitClass::GlobalForOrder : UnitClass::LocalPositive;
  }
  if (n == 1) {
    for (auto& l : labels) {
      if (l.cls != UnitClass::LocalPositive && l.cls != UnitClass::LocalNegative) continue;
      l.cls = pl.arrangement.hyperplanes[a.index_of(l.unit)].w[0] < 0.0 ? UnitClass::LocalNegative
                                                                           : UnitClass::LocalPositive;
    }
  }
}

bool parallel(const Hyperplane& h1, const Hyperplane& h2) {
  double c = dot(h1.w, h2.w) / (h1.norm() * h2.norm());
  return std::fabs(c) > 1.0 - 1e-9;
}

CoverageReport coverage_on(const PiecewiseLinear& pl, const OrderForest& f) {
  std::vector<int> seeds;
  if (f.hub >= 0) seeds.push_back(f.hub);
  for (const auto& o : f.orders) seeds.insert(seeds.end(), o.ordered_regions.begin(), o.ordered_regions.end());
  return continuity_fixpoint(pl.arrangement, seeds);
}

}  // namespace

CoverageReport continuity_fixpoint(const Arrangement& a, const std::vector<int>& seeds) {
  const int R = static_cast<int>(a.regions.size());
  CoverageReport rep;
  rep.determined.assign(R, false);
  for (int s : seeds) rep.determined.at(s) = true;
  bool changed = true;
  while (changed) {
    changed = false;
    ++rep.rounds;
    // a group is pinned once one of its facets has both sides determined
    std::vector<bool> pinned(a.hyperplanes.size(), false);
    for (const auto& adj : a.adjacency)
      if (rep.determined[adj.r1] && rep.determined[adj.r2]) pinned[adj.hyperplane] = true;
    std::vector<bool> next = rep.determined;
    for (int r = 0; r < R; ++r) {
      if (rep.determined[r]) continue;
      std::vector<int> walls;
      bool done = false;
      for (int e : a.adjacent_entries(r)) {
        const auto& adj = a.adjacency[e];
        int other = adj.r1 == r ? adj.r2 : adj.r1;
        if (!rep.determined[other]) continue;
        if (pinned[adj.hyperplane]) done = true;
        for (int w : walls)
          if (!parallel(a.hyperplanes[w], a.hyperplanes[adj.hyperplane])) done = true;
        walls.push_back(adj.hyperplane);
      }
      if (done) {
        next[r] = true;
        changed = true;
      }
    }
    rep.determined = next;
  }
  int count = static_cast<int>(std::count(rep.determined.begin(), rep.determined.end(), true));
  rep.coverage = R == 0 ? 1.0 : static_cast<double>(count) / R;
  return rep;
}

std::vector<UnitLabel> classify_units(const ReluNetwork& net, const AnalyzerConfig& cfg) {
  auto labels = base_labels(net, cfg);
  auto pl = extract_pieces(net);
  auto f = forest_on(pl, labels);
  finalize(labels, pl, f, net.n);
  return labels;
}

OrderForest detect_orders(const ReluNetwork& net, const AnalyzerConfig& cfg) {
  auto labels = base_labels(net, cfg);
  return forest_on(extract_pieces(net), labels);
}

OrderForest detect_orders(const ReluNetwork&, const PiecewiseLinear& pl, const std::vector<UnitLabel>& labels) {
  return forest_on(pl, labels);
}

CoverageReport coverage_by_continuity(const ReluNetwork& net, const OrderForest& forest) {
  return coverage_on(extract_pieces(net), forest);
}

AnalysisReport analyze(const ReluNetwork& net, const AnalyzerConfig& cfg) {
  AnalysisReport rep;
  rep.labels = base_labels(net, cfg);
  rep.pieces = extract_pieces(net);
  rep.forest = forest_on(rep.pieces, rep.labels);
  finalize(rep.labels, rep.pieces, rep.forest, net.n);
  rep.coverage = coverage_on(rep.pieces, rep.forest);
  rep.continuity = check_continuity(rep.pieces);
  for (const auto& l : rep.labels) {
    const auto& u = net.units[l.unit];
    bool dead = l.cls == UnitClass::Inactivated || (l.cls == UnitClass::Degenerate && u.b <= 0.0);
    if (!dead) ++rep.effective_units;
    if (l.bidirectional_partner) rep.bidirectional_knots.push_back(l.unit);
  }
  return rep;
}

}  // namespace knotnet
