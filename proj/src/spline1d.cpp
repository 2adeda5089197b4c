#include "knotnet/spline1d.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "knotnet/errors.hpp"
#include "knotnet/linalg.hpp"

namespace knotnet {

double Spline1D::operator()(double x) const {
  auto it = std::upper_bound(knots.begin(), knots.end(), x);
  const Piece1D& p = pieces[static_cast<std::size_t>(it - knots.begin())];
  return p.a * x + p.b;
}

void Spline1D::validate() const {
  if (pieces.size() != knots.size() + 1) throw ValidationError("spline needs exactly one more piece than knots");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (!(knots[i] > 0.0 && knots[i] < 1.0)) throw ValidationError("spline knot outside (0,1)");
    if (i > 0 && !(knots[i] > knots[i - 1])) throw ValidationError("spline knots must be strictly increasing");
    double l = pieces[i].a * knots[i] + pieces[i].b;
    double r = pieces[i + 1].a * knots[i] + pieces[i + 1].b;
    if (std::fabs(l - r) > 1e-12 * (1.0 + std::fabs(l))) throw ValidationError("spline is discontinuous at a knot");
  }
}

Spline1D make_spline(const Vec& knots, const Vec& slopes, double b1) {
  if (slopes.size() != knots.size() + 1) throw ValidationError("need one more slope than knots");
  Spline1D s;
  s.knots = knots;
  s.pieces.push_back({slopes[0], b1});
  for (std::size_t i = 0; i < knots.size(); ++i) {
    const Piece1D& p = s.pieces.back();
    s.pieces.push_back({slopes[i + 1], p.b + (p.a - slopes[i + 1]) * knots[i]});
  }
  s.validate();
  return s;
}

const char* to_string(BasisKind k) {
  switch (k) {
    case BasisKind::OneSided: return "one-sided";
    case BasisKind::TwoSidedAdded: return "added";
    case BasisKind::TwoSidedSubstituted: return "substituted";
    case BasisKind::TwoSidedCompound: return "compound";
  }
  return "?";
}

BasisKind basis_kind_from_string(const std::string& s) {
  if (s == "one-sided") return BasisKind::OneSided;
  if (s == "added") return BasisKind::TwoSidedAdded;
  if (s == "substituted") return BasisKind::TwoSidedSubstituted;
  if (s == "compound") return BasisKind::TwoSidedCompound;
  throw ValidationError("unknown basis kind '" + s + "'");
}

namespace {

ReluUnit positive_unit(double knot, double lambda) { return {{1.0}, -knot, lambda}; }
ReluUnit negative_unit(double knot, double lambda) { return {{-1.0}, knot, lambda}; }

void check_anchors(std::pair<double, double> anchors) {
  if (!(anchors.first < anchors.second && anchors.second <= 0.0))
    throw ValidationError("anchors must satisfy x_-1 < x_0 <= 0");
}

void check_plan(const Spline1D& s, const BasisPlan& plan) {
  const int nk = static_cast<int>(s.knots.size());
  std::set<int> f(plan.flipped_knots.begin(), plan.flipped_knots.end());
  std::set<int> bd(plan.bidirectional_knots.begin(), plan.bidirectional_knots.end());
  if (f.size() != plan.flipped_knots.size() || bd.size() != plan.bidirectional_knots.size())
    throw ValidationError("repeated knot index in plan");
  for (int k : f)
    if (k < 1 || k > nk) throw ValidationError("flipped knot index out of range");
  for (int k : bd) {
    if (k < 1 || k > nk) throw ValidationError("bidirectional knot index out of range");
    if (f.count(k)) throw ValidationError("knot both flipped and bidirectional");
  }
  switch (plan.kind) {
    case BasisKind::OneSided:
      if (!f.empty() || !bd.empty()) throw ValidationError("one-sided plan cannot flip knots");
      break;
    case BasisKind::TwoSidedSubstituted:
      if (!bd.empty()) throw ValidationError("substituted plan cannot carry bidirectional knots");
      if (f.empty()) throw ValidationError("substituted plan needs at least one flipped knot");
      break;
    case BasisKind::TwoSidedAdded:
      if (!f.empty()) throw ValidationError("added plan cannot flip knots");
      if (bd.empty()) throw ValidationError("added plan needs at least one bidirectional knot");
      break;
    case BasisKind::TwoSidedCompound:
      if (f.empty() || bd.empty()) throw ValidationError("compound plan needs flipped and bidirectional knots");
      break;
  }
  if (plan.anchor_knots) check_anchors(*plan.anchor_knots);
}

}  // namespace

ReluNetwork compile_one_sided(const Spline1D& s, std::pair<double, double> anchors) {
  s.validate();
  check_anchors(anchors);
  const double xm = anchors.first, x0 = anchors.second;
  const Piece1D& p1 = s.pieces.front();
  ReluNetwork net;
  net.n = 1;
  net.units.push_back(positive_unit(xm, (p1.a * x0 + p1.b) / (x0 - xm)));
  net.units.push_back(positive_unit(x0, (p1.a * xm + p1.b) / (xm - x0)));
  for (std::size_t k = 0; k < s.knots.size(); ++k)
    net.units.push_back(positive_unit(s.knots[k], s.pieces[k + 1].a - s.pieces[k].a));
  return net;
}

ReluNetwork compile_two_sided(const Spline1D& s, const BasisPlan& plan) {
  s.validate();
  check_plan(s, plan);
  if (plan.kind == BasisKind::OneSided) {
    if (!plan.anchor_knots) throw ValidationError("one-sided plan needs anchors");
    return compile_one_sided(s, *plan.anchor_knots);
  }
  const int nk = static_cast<int>(s.knots.size());
  std::set<int> flipped(plan.flipped_knots.begin(), plan.flipped_knots.end());
  std::set<int> bidir(plan.bidirectional_knots.begin(), plan.bidirectional_knots.end());

  auto jump = [&](int k) { return s.pieces[k].a - s.pieces[k - 1].a; };

  // Initial piece on [0, x_1]: anchors and every negative unit are active there.
  // Columns are [slope; intercept] of each unit's affine form on that interval.
  double fixed_a = 0.0, fixed_b = 0.0;
  for (int k : flipped) {
    double lam = jump(k);
    fixed_a += -lam;
    fixed_b += lam * s.knots[k - 1];
  }
  std::vector<double> free_lambda;  // anchors first, then bidirectional negatives when they solve
  linalg::Rows A(2);
  std::vector<int> bidir_solving;
  if (plan.anchor_knots) {
    for (double xa : {plan.anchor_knots->first, plan.anchor_knots->second}) {
      A[0].push_back(1.0);
      A[1].push_back(-xa);
    }
    for (int k : bidir) {
      fixed_a += -plan.free_weight;
      fixed_b += plan.free_weight * s.knots[k - 1];
    }
  } else {
    for (int k : bidir) {
      A[0].push_back(-1.0);
      A[1].push_back(s.knots[k - 1]);
      bidir_solving.push_back(k);
    }
  }
  const int cols = static_cast<int>(A[0].size());
  if (linalg::rank(A, cols) < 2)
    throw ValidationError("initial piece unsolvable: plan leaves fewer than two independent units active on the first interval");
  const Piece1D& p1 = s.pieces.front();
  auto sol = linalg::min_norm(A, {p1.a - fixed_a, p1.b - fixed_b}, cols);

  std::vector<double> neg_lambda(nk + 1, 0.0);
  for (int k : bidir) neg_lambda[k] = plan.free_weight;
  for (std::size_t i = 0; i < bidir_solving.size(); ++i) neg_lambda[bidir_solving[i]] = sol.x[i];

  ReluNetwork net;
  net.n = 1;
  if (plan.anchor_knots) {
    net.units.push_back(positive_unit(plan.anchor_knots->first, sol.x[0]));
    net.units.push_back(positive_unit(plan.anchor_knots->second, sol.x[1]));
  }
  for (int k = 1; k <= nk; ++k) {
    double xk = s.knots[k - 1];
    if (flipped.count(k)) {
      net.units.push_back(negative_unit(xk, jump(k)));
    } else if (bidir.count(k)) {
      net.units.push_back(positive_unit(xk, jump(k) - neg_lambda[k]));
      net.units.push_back(negative_unit(xk, neg_lambda[k]));
    } else {
      net.units.push_back(positive_unit(xk, jump(k)));
    }
  }
  return net;
}

Spline1D decompile(const ReluNetwork& net) {
  net.validate();
  if (net.n != 1) throw DimensionMismatch("decompile needs a one-dimensional network");
  Vec raw;
  for (const auto& u : net.units) {
    if (u.degenerate()) continue;
    double x = -u.b / u.w[0];
    if (x > kKnotMergeTol && x < 1.0 - kKnotMergeTol) raw.push_back(x);
  }
  std::sort(raw.begin(), raw.end());
  Spline1D s;
  for (double x : raw)
    if (s.knots.empty() || x - s.knots.back() > kKnotMergeTol) s.knots.push_back(x);

  Vec edges{0.0};
  edges.insert(edges.end(), s.knots.begin(), s.knots.end());
  edges.push_back(1.0);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    double mid = 0.5 * (edges[i] + edges[i + 1]);
    Piece1D p{0.0, net.output_bias};
    for (const auto& u : net.units) {
      if (u.degenerate()) {
        p.b += u.lambda * std::fmax(0.0, u.b);
      } else if (u.w[0] * mid + u.b > 0.0) {
        p.a += u.lambda * u.w[0];
        p.b += u.lambda * u.b;
      }
    }
    s.pieces.push_back(p);
  }
  return s;
}

}  // namespace knotnet
