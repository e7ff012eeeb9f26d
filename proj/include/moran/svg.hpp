#pragma once

#include <string>

#include "moran/tree.hpp"

namespace moran {

// Deterministic SVG 1.1 picture of the built tree, dimensions 1 and 2 only
// (ConfigError otherwise). d = 1: one row of interval bars per level with
// horizontal edges as arcs above each row. d = 2: nested outlines in a single
// panel, edges as chords on the deepest level. The base set J is the one
// element with class "base"; every basic set is a "cell"; edges are "arc".
// All coordinates are printed with fixed precision, so equal inputs give
// byte-equal output.
struct SvgStats {
  int cells = 0;
  int arcs = 0;
  int width = 0;
  int height = 0;
};

std::string render_svg(const AugTree& tree, SvgStats* stats = nullptr);

}  // namespace moran
