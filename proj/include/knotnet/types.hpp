#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace knotnet {

using Vec = std::vector<double>;

// Scalar field on [0,1]^n.
using ScalarFn = std::function<double(const std::vector<double>&)>;

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

inline double max_abs(const Vec& a) {
  double m = 0.0;
  for (double v : a) m = std::fmax(m, std::fabs(v));
  return m;
}

// s(x) = w^T x + b
struct AffinePiece {
  Vec w;
  double b = 0.0;

  AffinePiece() = default;
  AffinePiece(Vec w_, double b_) : w(std::move(w_)), b(b_) {}
  static AffinePiece zero(int n) { return AffinePiece(Vec(n, 0.0), 0.0); }

  double operator()(const Vec& x) const { return dot(w, x) + b; }
  int dim() const { return static_cast<int>(w.size()); }

  AffinePiece& add_scaled(const Vec& w2, double b2, double c) {
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += c * w2[i];
    b += c * b2;
    return *this;
  }
  // largest coefficient difference, used as the piece-equality metric
  double distance(const AffinePiece& o) const {
    double d = std::fabs(b - o.b);
    for (std::size_t i = 0; i < w.size(); ++i) d = std::fmax(d, std::fabs(w[i] - o.w[i]));
    return d;
  }
  double scale() const { return std::fmax(std::fabs(b), max_abs(w)); }
};

inline AffinePiece operator-(const AffinePiece& a, const AffinePiece& c) {
  AffinePiece r = a;
  return r.add_scaled(c.w, c.b, -1.0);
}
inline AffinePiece operator+(const AffinePiece& a, const AffinePiece& c) {
  AffinePiece r = a;
  return r.add_scaled(c.w, c.b, 1.0);
}

}  // namespace knotnet
