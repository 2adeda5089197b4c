#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>

#include "knotnet/analyzer.hpp"
#include "knotnet/errors.hpp"

namespace knotnet {

namespace {

constexpr double kSize = 400.0;
constexpr double kPad = 40.0;

const char* colour(UnitClass c) {
  switch (c) {
    case UnitClass::LocalNegative: return "#c0392b";
    case UnitClass::LocalPositive: return "#2463b0";
    case UnitClass::UniversalGlobal:
    case UnitClass::GlobalForOrder: return "#000000";
    default: return "#aaaaaa";
  }
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

double px(double x) { return kPad + x * kSize; }
double py(double y) { return kPad + (1.0 - y) * kSize; }

// Segment of w.x + b = 0 inside the unit square, if any.
bool clip(const ReluUnit& u, Vec& p, Vec& q) {
  std::vector<Vec> pts;
  const double w0 = u.w[0], w1 = u.w[1], b = u.b;
  auto push = [&](double x, double y) {
    if (x < -1e-12 || x > 1 + 1e-12 || y < -1e-12 || y > 1 + 1e-12) return;
    for (const auto& e : pts)
      if (std::fabs(e[0] - x) < 1e-9 && std::fabs(e[1] - y) < 1e-9) return;
    pts.push_back({x, y});
  };
  if (std::fabs(w1) > 1e-15) {
    push(0.0, -b / w1);
    push(1.0, -(b + w0) / w1);
  }
  if (std::fabs(w0) > 1e-15) {
    push(-b / w0, 0.0);
    push(-(b + w1) / w0, 1.0);
  }
  if (pts.size() < 2) return false;
  p = pts[0];
  q = pts[1];
  return true;
}

std::string svg_1d(const ReluNetwork& net, const AnalysisReport& rep) {
  std::ostringstream os;
  const int N = 400;
  Vec ys(N + 1);
  double lo = 1e300, hi = -1e300;
  for (int i = 0; i <= N; ++i) {
    ys[i] = eval(net, {static_cast<double>(i) / N});
    lo = std::fmin(lo, ys[i]);
    hi = std::fmax(hi, ys[i]);
  }
  if (hi - lo < 1e-12) hi = lo + 1.0;
  auto ny = [&](double y) { return (y - lo) / (hi - lo); };
  os << "<polyline fill=\"none\" stroke=\"#333\" stroke-width=\"2\" points=\"";
  for (int i = 0; i <= N; ++i) os << num(px(static_cast<double>(i) / N)) << ',' << num(py(ny(ys[i]))) << ' ';
  os << "\"/>\n";
  for (const auto& l : rep.labels) {
    const auto& u = net.units[l.unit];
    if (u.degenerate()) continue;
    double x = -u.b / u.w[0];
    if (x <= 0.0 || x >= 1.0) continue;
    os << "<line x1=\"" << num(px(x)) << "\" y1=\"" << num(py(0)) << "\" x2=\"" << num(px(x)) << "\" y2=\"" << num(py(1))
       << "\" stroke=\"" << colour(l.cls) << "\" stroke-dasharray=\"4 3\"/>\n";
    // arrow toward the active side
    double dir = u.w[0] > 0 ? 1.0 : -1.0;
    os << "<line x1=\"" << num(px(x)) << "\" y1=\"" << num(py(0) + 12) << "\" x2=\"" << num(px(x) + 14 * dir)
       << "\" y2=\"" << num(py(0) + 12) << "\" stroke=\"" << colour(l.cls) << "\" stroke-width=\"2\"/>\n";
  }
  return os.str();
}

std::string svg_2d(const ReluNetwork& net, const AnalysisReport& rep) {
  std::ostringstream os;
  for (const auto& l : rep.labels) {
    const auto& u = net.units[l.unit];
    if (u.degenerate()) continue;
    Vec p, q;
    if (!clip(u, p, q)) continue;
    os << "<line x1=\"" << num(px(p[0])) << "\" y1=\"" << num(py(p[1])) << "\" x2=\"" << num(px(q[0])) << "\" y2=\""
       << num(py(q[1])) << "\" stroke=\"" << colour(l.cls) << "\" stroke-width=\"1.5\"/>\n";
    double nw = norm2(u.w);
    double mx = 0.5 * (p[0] + q[0]), my = 0.5 * (p[1] + q[1]);
    double ox = 0.03 * u.w[0] / nw, oy = 0.03 * u.w[1] / nw;
    os << "<text x=\"" << num(px(mx + ox)) << "\" y=\"" << num(py(my + oy)) << "\" font-size=\"11\" fill=\""
       << colour(l.cls) << "\">+</text>\n";
    os << "<text x=\"" << num(px(mx - ox)) << "\" y=\"" << num(py(my - oy)) << "\" font-size=\"11\" fill=\""
       << colour(l.cls) << "\">0</text>\n";
    os << "<text x=\"" << num(px(mx) + 4) << "\" y=\"" << num(py(my) - 4) << "\" font-size=\"9\" fill=\"#555\">l"
       << l.unit << "</text>\n";
  }
  return os.str();
}

}  // namespace

std::string render_svg(const ReluNetwork& net, const AnalysisReport& report) {
  if (net.n > 2) throw ValidationError("diagrams are drawn for n <= 2 only");
  std::ostringstream os;
  const double full = kSize + 2 * kPad;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << full << "\" height=\"" << full << "\" viewBox=\"0 0 "
     << full << ' ' << full << "\">\n";
  os << "<rect x=\"" << kPad << "\" y=\"" << kPad << "\" width=\"" << kSize << "\" height=\"" << kSize
     << "\" fill=\"white\" stroke=\"#888\"/>\n";
  os << (net.n == 1 ? svg_1d(net, report) : svg_2d(net, report));
  os << "</svg>\n";
  return os.str();
}

}  // namespace knotnet
