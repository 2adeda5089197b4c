#pragma once

#include <vector>

#include "knotnet/geometry.hpp"
#include "knotnet/types.hpp"

namespace knotnet {

inline constexpr double kDegenerateTol = 1e-12;

struct ReluUnit {
  Vec w;
  double b = 0.0;
  double lambda = 0.0;

  bool degenerate() const { return norm2(w) <= kDegenerateTol; }
  double activation(const Vec& x) const {
    double z = dot(w, x) + b;
    return z > 0.0 ? z : 0.0;
  }
};

// y = sum_i lambda_i * max(0, w_i^T x + b_i) + output_bias
struct ReluNetwork {
  int n = 1;
  std::vector<ReluUnit> units;
  double output_bias = 0.0;

  int theta() const { return static_cast<int>(units.size()); }
  void validate() const;  // throws DimensionMismatch
};

double eval(const ReluNetwork& net, const Vec& x);

struct PiecewiseLinear {
  Arrangement arrangement;
  std::vector<AffinePiece> pieces;  // one per region

  // Region containing x, falling back to any region whose closure holds x.
  int region_of(const Vec& x) const;
  double operator()(const Vec& x) const;
};

// Hyperplane ids of the resulting arrangement are unit indices; degenerate units fold into constants.
PiecewiseLinear extract_pieces(const ReluNetwork& net);

struct ContinuityViolation {
  int r1 = 0;
  int r2 = 0;
  int hyperplane_id = 0;
  double jump = 0.0;
};

struct ContinuityReport {
  double max_jump = 0.0;
  int pairs = 0;
  std::vector<ContinuityViolation> violations;
};

ContinuityReport check_continuity(const PiecewiseLinear& pl, double tol = 1e-6);

struct RepresentationFailure {
  int r1 = 0;
  int r2 = 0;
  int hyperplane_id = 0;
  double residual = 0.0;
};

struct RepresentationReport {
  double max_residual = 0.0;
  int pairs = 0;
  std::vector<RepresentationFailure> failures;
};

// Piece differences across each facet against the summed contributions of the co-located units.
RepresentationReport check_multiple_representations(const ReluNetwork& net, const PiecewiseLinear& pl,
                                                    double tol = 1e-8);

}  // namespace knotnet
