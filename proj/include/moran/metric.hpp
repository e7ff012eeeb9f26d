#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "moran/tree.hpp"

namespace moran {

// Gromov products and the hyperbolicity defect are half-integers; twice the
// value is stored so comparisons stay exact.
struct HalfInt {
  int twice = 0;
  double value() const { return twice / 2.0; }
  auto operator<=>(const HalfInt&) const = default;
};

// BFS shortest-path length between two vertices, searching levels
// <= max(level(x), level(y)) + descent_slack. The slack exists so tests can
// confirm that allowing deeper detours never shortens a path.
int graph_distance(const AugTree& tree, VertexRef x, VertexRef y, int descent_slack = 0);

// Shortest path using horizontal edges of one level only; -1 when the two
// vertices sit in different components.
int horizontal_distance(const AugTree& tree, int level, int32_t u, int32_t v);

// Shortest path length over vertical-horizontal-vertical candidates: ascend
// both arguments to a common level, cross horizontally, descend. Independent
// of graph_distance; the two are compared exhaustively in tests.
int canonical_distance(const AugTree& tree, VertexRef x, VertexRef y);

struct CanonicalGeodesic {
  std::vector<VertexRef> path;  // from x to y inclusive; {x} when x == y
  int length = 0;               // edge count, equals the graph distance
  int level = 0;                // level of the horizontal part
  int hlen = 0;                 // edge count of the horizontal part
};

// A shortest path in V-H-V form whose horizontal part sits on the smallest
// possible level; ties broken by the lexicographically smallest vertex
// sequence.
CanonicalGeodesic canonical_geodesic(const AugTree& tree, VertexRef x, VertexRef y);

// (|x| + |y| - d(x, y)) / 2 with d from BFS.
HalfInt gromov_product(const AugTree& tree, VertexRef x, VertexRef y);
// Same quantity with d from canonical_distance; the fast route for deep scans.
HalfInt gromov_product_canonical(const AugTree& tree, VertexRef x, VertexRef y);

// exp(-a * gromov product), 0 when x == y. Throws ConfigError for a <= 0.
double rho_a(const AugTree& tree, VertexRef x, VertexRef y, double a);

// exp(delta * a) - 1 < sqrt(2) - 1, the usability bound for rho_a.
bool smallness_ok(double a, HalfInt delta);

// Largest usable a scaled by 0.9; falls back to log(1/r_inf) when the
// measured defect is zero and the bound is vacuous.
double default_a(HalfInt delta, const Rational& r_inf);

// Exact maximum length of horizontal paths that are geodesics, over levels
// <= up_to_level. This is the boundedness diagnostic for hyperbolicity.
int max_horizontal_geodesic_length(const AugTree& tree, int up_to_level);

struct TripleSample {
  int up_to_level = 4;
  long long samples = 0;  // 0: exhaustive over all vertex triples
  std::uint64_t seed = 0;
};

// Smallest half-integer delta with
//   product(x,y) >= min(product(x,z), product(z,y)) - delta
// over the scanned triples.
HalfInt delta_estimate(const AugTree& tree, const TripleSample& sample);

struct ConditionH {
  bool finite = false;    // false: no qualifying pair anywhere
  bool exact = true;      // false in float mode
  bool squared = false;   // d >= 2 reports squared normalized distances
  Rational value;         // min over levels of the per-level minimum
  std::vector<std::pair<int, Rational>> per_level;  // levels with a qualifying pair
  bool decreasing_trend = false;  // strict decrease over the last three entries
};

// Minimum of dist(J_u, J_v) / r_inf^n over non-adjacent same-level pairs,
// n <= up_to_level (squared in both numerator and denominator for d >= 2).
ConditionH condition_h_estimate(const AugTree& tree, int up_to_level);

struct DiagnoseOptions {
  int up_to_level = 0;          // 0: use the tree's built depth
  long long delta_samples = 0;  // extra sampled triples past the exhaustive window
  std::uint64_t seed = 0;
  std::optional<double> a;      // user override for the report
};

struct DiagnoseReport {
  int levels_scanned = 0;
  int k = 0;
  int delta_levels = 0;  // exhaustive-window depth used for delta
  HalfInt delta;
  ConditionH cond_h;
  DegreeStats degrees;
  double a_default = 0;
  double a_used = 0;
  bool a_ok = true;  // a_used passes the smallness bound
};

DiagnoseReport diagnose(const AugTree& tree, const DiagnoseOptions& opts);

}  // namespace moran
