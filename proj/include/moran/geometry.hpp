#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "moran/rational.hpp"

namespace moran {

// Axis-aligned box with exact rational corners. lo[t] <= hi[t] per axis;
// degenerate boxes (lo == hi on some axis) are legal as query regions, while
// base boxes of a construction must have positive extent on every axis.
struct BoxRegion {
  std::vector<Rational> lo, hi;

  int dim() const { return static_cast<int>(lo.size()); }
  bool degenerate() const;

  bool contains(const BoxRegion& inner) const;         // closed containment
  bool intersects(const BoxRegion& other) const;       // closed sets
  bool interiors_overlap(const BoxRegion& other) const;

  // Overlap box if the closed intersection is nonempty.
  std::optional<BoxRegion> intersection(const BoxRegion& other) const;

  Rational extent(int axis) const { return hi[axis] - lo[axis]; }
  Rational diameter_sq() const;  // squared Euclidean diameter
  std::vector<Rational> barycenter() const;
};

// Squared Euclidean distance between two closed boxes (0 if they meet).
Rational box_distance_sq(const BoxRegion& a, const BoxRegion& b);

// Exact contraction x -> scale*x + offset with scale > 0.
struct HomothetyMap {
  Rational scale;
  std::vector<Rational> offset;

  std::vector<Rational> apply(const std::vector<Rational>& x) const;
  BoxRegion apply_box(const BoxRegion& b) const;
  // Composition: (this o inner)(x) = this(inner(x)).
  HomothetyMap compose(const HomothetyMap& inner) const;
  static HomothetyMap identity(int dim);
};

// Floating-point similitude x -> scale*Q*x + t with Q orthogonal (row-major).
// Used by the approximate pipeline only.
struct AffineMapF {
  double scale = 1.0;
  std::vector<double> rot;    // d*d, row-major
  std::vector<double> trans;  // d

  int dim() const { return static_cast<int>(trans.size()); }
  std::vector<double> apply(const std::vector<double>& x) const;
  AffineMapF compose(const AffineMapF& inner) const;
  static AffineMapF identity(int dim);
};

// Image of a box under a float similitude, kept as its corner polytope
// (interval in d=1, quad in d=2) for distance tests.
struct PolyShape {
  int dim = 1;
  std::vector<double> pts;  // d=1: {lo,hi}; d=2: 4 corners (x,y) in ring order
  std::vector<double> aabb_lo, aabb_hi;
};

PolyShape map_box_f(const AffineMapF& m, const BoxRegion& base);
double poly_distance(const PolyShape& a, const PolyShape& b);

// One child placement of a level rule: exact offset (homothety mode) or a
// float orthogonal map (general mode).
struct GeneralPlacement {
  std::vector<double> rot;
  std::vector<double> trans;
};
struct Similitude {
  Rational ratio;  // in (0,1)
  std::variant<std::vector<Rational>, GeneralPlacement> placement;

  bool homothety() const { return placement.index() == 0; }
  const std::vector<Rational>& offset() const { return std::get<0>(placement); }
  const GeneralPlacement& general() const { return std::get<1>(placement); }
  HomothetyMap exact_map() const;  // homothety mode only
  AffineMapF float_map() const;
};

}  // namespace moran
