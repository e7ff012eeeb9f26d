#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "moran/spec.hpp"

namespace moran {

struct VertexRef {
  int level = 0;
  int32_t idx = 0;
  auto operator<=>(const VertexRef&) const = default;
};

// Maximal horizontally connected vertex set within one level. The id is the
// smallest member index, which makes component lists canonical.
struct Component {
  int level = 0;
  int32_t id = 0;
  std::vector<int32_t> members;  // sorted
};

// One level cut of the augmented tree. Vertices are lexicographic by word;
// children of one parent occupy a contiguous index range on the next level.
struct TreeLevel {
  int n = 0;      // level index
  int depth = 0;  // word depth of this cut
  std::vector<Word> words;
  std::vector<int32_t> parent;      // index into the previous level (-1 for the root)
  std::vector<int32_t> child_off;   // size() + 1 offsets into the next level
  Rational scale;                   // accumulated contraction of this depth
  std::vector<Rational> offset;     // dim per vertex: S_w(x) = scale*x + offset
  std::vector<Rational> box_lo, box_hi;  // dim per vertex
  std::vector<std::vector<int32_t>> adj;  // horizontal neighbours, sorted

  // Float-mode geometry (approximate trees only).
  std::vector<AffineMapF> fmaps;
  std::vector<PolyShape> fshapes;

  std::size_t size() const { return words.size(); }

  mutable std::once_flag comp_once;
  mutable std::vector<int32_t> comp_id;
  mutable std::vector<Component> comps;
};

struct AugTree {
  std::shared_ptr<const MoranSpec> spec;
  int max_level = 0;
  bool approximate = false;
  std::vector<std::unique_ptr<TreeLevel>> levels;  // [0..max_level]

  const TreeLevel& level(int n) const { return *levels.at(n); }
  std::size_t vertex_count() const;
  std::size_t edge_count() const;

  const Word& word_of(VertexRef v) const { return level(v.level).words[v.idx]; }
  BoxRegion box_of(VertexRef v) const;
  std::optional<VertexRef> find_on_level(int n, const Word& w) const;
  VertexRef parent_of(VertexRef v) const;
  // Children of v on the next level as [first, last).
  std::pair<int32_t, int32_t> children_of(VertexRef v) const;
};

struct BuildOptions {
  int max_level = 0;
  bool use_spatial_hash = true;   // false: brute-force reference builder
  bool parallel = true;
  std::size_t max_vertices = 2'000'000;
  bool validate = true;
};

// Builds levels 0..max_level with horizontal edges from exact basic-set
// intersection (epsilon-distance in float mode). Validates the spec to the
// covering word depth first and throws ValidationError on any violation.
AugTree build_tree(const MoranSpec& spec, const BuildOptions& opts);

// Serial all-pairs edge scan over one level's geometry; the reference the
// spatial hash is checked against. Pairs (u, v) with u < v, sorted.
std::vector<std::pair<int32_t, int32_t>> level_edges_brute(const AugTree& tree, int n);

// Same edge set as `tree.level(n).adj` in the same pair form.
std::vector<std::pair<int32_t, int32_t>> level_edge_pairs(const AugTree& tree, int n);

// Horizontal component partition of one level (computed once, cached).
const std::vector<Component>& horizontal_components(const AugTree& tree, int n);
// Component id (smallest member index) for each vertex of level n.
const std::vector<int32_t>& component_ids(const AugTree& tree, int n);

struct AugmentedCheck {
  bool ok = true;
  std::optional<std::pair<VertexRef, VertexRef>> witness;  // offending edge
};

// Every horizontal edge must connect vertices whose level-ancestors are equal
// or horizontally adjacent.
AugmentedCheck verify_augmented_property(const AugTree& tree);

// Exact number of level-n basic sets meeting the closed region V
// (V may be degenerate).
long long count_intersecting(const AugTree& tree, int n, const BoxRegion& V);

struct DegreeStats {
  int max_horizontal_degree = 0;
  int max_total_degree = 0;
  std::vector<std::pair<int, int>> per_level;  // (max horizontal, max total)
};

DegreeStats degree_stats(const AugTree& tree);

}  // namespace moran
