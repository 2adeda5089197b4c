#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "knotnet/types.hpp"

namespace knotnet {

inline constexpr double kSideTol = 1e-9;
inline constexpr double kRadiusTol = 1e-7;

enum class Side : int { Negative = -1, Zero = 0, Positive = 1 };

// Oriented knot w^T x + b. (w, b) and (-w, -b) are different values.
struct Hyperplane {
  Vec w;
  double b = 0.0;
  int id = 0;

  Hyperplane() = default;
  Hyperplane(Vec w_, double b_, int id_);

  int dim() const { return static_cast<int>(w.size()); }
  double value(const Vec& x) const { return dot(w, x) + b; }
  double norm() const { return norm2(w); }
  Hyperplane negative() const { return Hyperplane(scaled(-1.0), -b, id); }

 private:
  Vec scaled(double c) const;
};

Side side_of(const Hyperplane& h, const Vec& x);

// One entry per hyperplane: +1 (l+), -1 (l0), 0 only for points on a knot.
using SignVector = std::vector<signed char>;

std::string sign_string(const SignVector& s);

struct Region {
  SignVector signs;
  Vec witness;
  double radius = 0.0;
};

struct Adjacency {
  int r1 = 0;
  int r2 = 0;
  int hyperplane = 0;  // index of the representative hyperplane of the separating group
  Vec facet_center;
  double facet_radius = 0.0;
};

// Half-space a^T x <= c.
struct HalfSpace {
  Vec a;
  double c = 0.0;
};

struct Polytope {
  int n = 0;
  std::vector<HalfSpace> halfspaces;  // intersected with the box [0,1]^n
};

struct Chebyshev {
  bool feasible = false;
  Vec center;
  double radius = -1.0;
};

Chebyshev chebyshev_center(const Polytope& p);
// min over the polytope of w^T x + b; +inf when empty.
double min_over(const Polytope& p, const Vec& w, double b);

// Dimension of {x in box : halfspaces, equalities (a^T x = c)}; -1 if empty.
int polytope_dimension(const Polytope& p, const std::vector<HalfSpace>& equalities);

class Arrangement {
 public:
  int n = 0;
  std::vector<Hyperplane> hyperplanes;
  std::vector<Region> regions;
  std::vector<Adjacency> adjacency;
  // group[k]: index of the first hyperplane geometrically identical to k (either orientation)
  std::vector<int> group;

  int find_region(const SignVector& s) const;
  int locate(const Vec& x) const;  // -1 when x sits on a knot or in no listed region
  int index_of(int id) const;      // hyperplane index for an id; throws if absent
  Polytope polytope(int region) const;
  SignVector signs_at(const Vec& x) const;
  // adjacency entries touching `region`
  std::vector<int> adjacent_entries(int region) const;

  void rebuild_index();
  void compute_groups();
  void compute_adjacency();

 private:
  std::map<SignVector, int> lookup_;
  std::map<int, int> id_index_;
  std::vector<std::vector<int>> incident_;
};

Arrangement build_arrangement(int n, const std::vector<Hyperplane>& hs);

int facet_dimension(const Arrangement& a, int r1, int r2);

struct StrictPartialOrder {
  std::vector<int> chain;            // hyperplane ids l_1 ... l_zeta
  std::vector<int> ordered_regions;  // R_1 ... R_zeta
  int initial_region = -1;           // R_0, or -1 when l_1 does not cut the box
};

struct OrderVerdict {
  bool holds = true;
  std::string condition;
  int index = -1;
};

OrderVerdict verify_order(const Arrangement& a, const StrictPartialOrder& o);

std::pair<Arrangement, StrictPartialOrder> generate_translated_order(int n, const Vec& direction,
                                                                     const Vec& offsets, int orientation);

// Facet points that pin down an affine function on the shared facet of an adjacent pair.
std::vector<Vec> facet_points(const Arrangement& a, const Adjacency& adj);

}  // namespace knotnet
