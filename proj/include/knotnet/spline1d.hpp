#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "knotnet/network.hpp"

namespace knotnet {

struct Piece1D {
  double a = 0.0;  // slope
  double b = 0.0;  // intercept
};

// Continuous linear spline on [0,1]. Piece k (0-based) lives between knots[k-1] and knots[k].
struct Spline1D {
  Vec knots;
  std::vector<Piece1D> pieces;

  int zeta() const { return static_cast<int>(pieces.size()); }
  double operator()(double x) const;
  void validate() const;  // throws ValidationError
};

// Builds a continuous spline from knots, slopes and the first intercept.
Spline1D make_spline(const Vec& knots, const Vec& slopes, double b1);

enum class BasisKind { OneSided, TwoSidedAdded, TwoSidedSubstituted, TwoSidedCompound };

const char* to_string(BasisKind k);
BasisKind basis_kind_from_string(const std::string& s);

// Knot indices are 1-based: knot k sits between pieces k and k+1.
struct BasisPlan {
  BasisKind kind = BasisKind::OneSided;
  std::optional<std::pair<double, double>> anchor_knots = std::make_pair(-1.0, -0.5);
  std::vector<int> flipped_knots;
  std::vector<int> bidirectional_knots;
  double free_weight = 1.0;
};

ReluNetwork compile_one_sided(const Spline1D& s, std::pair<double, double> anchors = {-1.0, -0.5});
ReluNetwork compile_two_sided(const Spline1D& s, const BasisPlan& plan);

inline constexpr double kKnotMergeTol = 1e-9;
Spline1D decompile(const ReluNetwork& net);

}  // namespace knotnet
