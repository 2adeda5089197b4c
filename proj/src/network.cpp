#include "knotnet/network.hpp"

#include <cmath>

#include "knotnet/errors.hpp"

namespace knotnet {

void ReluNetwork::validate() const {
  if (n < 1) throw ValidationError("network dimension must be positive");
  for (const auto& u : units)
    if (static_cast<int>(u.w.size()) != n) throw DimensionMismatch("unit weight length differs from network dimension");
}

double eval(const ReluNetwork& net, const Vec& x) {
  if (static_cast<int>(x.size()) != net.n) throw DimensionMismatch("point dimension does not match network");
  double y = net.output_bias;
  for (const auto& u : net.units) y += u.lambda * u.activation(x);
  return y;
}

int PiecewiseLinear::region_of(const Vec& x) const {
  int r = arrangement.locate(x);
  if (r >= 0) return r;
  SignVector s = arrangement.signs_at(x);
  for (std::size_t i = 0; i < arrangement.regions.size(); ++i) {
    const auto& rs = arrangement.regions[i].signs;
    bool ok = true;
    for (std::size_t k = 0; k < s.size() && ok; ++k) ok = s[k] == 0 || s[k] == rs[k];
    if (ok) return static_cast<int>(i);
  }
  return -1;
}

double PiecewiseLinear::operator()(const Vec& x) const {
  int r = region_of(x);
  if (r < 0) throw ValidationError("point lies in no region of the partition");
  return pieces[r](x);
}

PiecewiseLinear extract_pieces(const ReluNetwork& net) {
  net.validate();
  std::vector<Hyperplane> hs;
  std::vector<int> unit_of;
  double constant = net.output_bias;
  for (std::size_t i = 0; i < net.units.size(); ++i) {
    const auto& u = net.units[i];
    if (u.degenerate()) {
      constant += u.lambda * std::fmax(0.0, u.b);
      continue;
    }
    hs.emplace_back(u.w, u.b, static_cast<int>(i));
    unit_of.push_back(static_cast<int>(i));
  }
  PiecewiseLinear pl;
  pl.arrangement = build_arrangement(net.n, hs);
  for (const auto& region : pl.arrangement.regions) {
    AffinePiece p(Vec(net.n, 0.0), constant);
    for (std::size_t k = 0; k < hs.size(); ++k) {
      if (region.signs[k] > 0) {
        const auto& u = net.units[unit_of[k]];
        p.add_scaled(u.w, u.b, u.lambda);
      }
    }
    pl.pieces.push_back(p);
  }
  return pl;
}

ContinuityReport check_continuity(const PiecewiseLinear& pl, double tol) {
  ContinuityReport rep;
  const auto& a = pl.arrangement;
  for (const auto& adj : a.adjacency) {
    double jump = 0.0;
    for (const Vec& p : facet_points(a, adj))
      jump = std::fmax(jump, std::fabs(pl.pieces[adj.r1](p) - pl.pieces[adj.r2](p)));
    ++rep.pairs;
    rep.max_jump = std::fmax(rep.max_jump, jump);
    if (jump > tol) rep.violations.push_back({adj.r1, adj.r2, a.hyperplanes[adj.hyperplane].id, jump});
  }
  return rep;
}

RepresentationReport check_multiple_representations(const ReluNetwork& net, const PiecewiseLinear& pl, double tol) {
  RepresentationReport rep;
  const auto& a = pl.arrangement;
  const int U = net.theta();
  for (const auto& h : a.hyperplanes)
    if (h.id < 0 || h.id >= U) throw ValidationError("partition hyperplane ids do not name network units");
  for (const auto& adj : a.adjacency) {
    AffinePiece diff = pl.pieces[adj.r2] - pl.pieces[adj.r1];
    AffinePiece expected = AffinePiece::zero(a.n);
    const auto& s1 = a.regions[adj.r1].signs;
    const auto& s2 = a.regions[adj.r2].signs;
    const int g = a.group[adj.hyperplane];
    for (std::size_t k = 0; k < a.hyperplanes.size(); ++k) {
      if (a.group[k] != g) continue;
      const auto& u = net.units[a.hyperplanes[k].id];
      double c = (s2[k] > 0 ? 1.0 : 0.0) - (s1[k] > 0 ? 1.0 : 0.0);
      expected.add_scaled(u.w, u.b, c * u.lambda);
    }
    double res = diff.distance(expected);
    ++rep.pairs;
    rep.max_residual = std::fmax(rep.max_residual, res);
    if (res > tol) rep.failures.push_back({adj.r1, adj.r2, a.hyperplanes[adj.hyperplane].id, res});
  }
  return rep;
}

}  // namespace knotnet
