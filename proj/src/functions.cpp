#include "knotnet/functions.hpp"

#include <cmath>

#include "knotnet/errors.hpp"

namespace knotnet {

double poly16(const Vec& x) {
  double s = 0.0;
  for (double v : x) s += v * v * v;
  return 16.0 * s + 3.0;
}

double sinsum(const Vec& x) {
  double s = 1.0;
  for (double v : x) s += v;
  return std::sin(3.0 * s) + 3.0;
}

double quad(const Vec& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double d = x[i] - (i == 0 ? 0.6 : 0.3);
    s += d * d;
  }
  return s;
}

ScalarFn builtin_function(const std::string& name) {
  if (name == "poly16" || name == "poly") return poly16;
  if (name == "sinsum") return sinsum;
  if (name == "quad") return quad;
  throw ValidationError("unknown builtin function '" + name + "'");
}

ScalarFn polynomial(std::vector<PolyTerm> terms, int n) {
  for (const auto& t : terms) {
    if (static_cast<int>(t.powers.size()) != n) throw DimensionMismatch("polynomial term has the wrong number of powers");
    for (int p : t.powers)
      if (p < 0) throw ValidationError("polynomial powers must be non-negative");
  }
  return [terms = std::move(terms)](const Vec& x) {
    double s = 0.0;
    for (const auto& t : terms) {
      double m = t.coef;
      for (std::size_t i = 0; i < x.size(); ++i) m *= std::pow(x[i], t.powers[i]);
      s += m;
    }
    return s;
  };
}

}  // namespace knotnet
