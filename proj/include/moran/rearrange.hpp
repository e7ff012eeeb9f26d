#pragma once

#include <optional>
#include <string>
#include <vector>

#include "moran/tree.hpp"

namespace moran {

// Grouping of offspring components into equal-total groups: groups[s] lists
// indices into `sizes`, every group sums to m, and there are exactly b groups.
struct PartitionWitness {
  std::vector<int> sizes;
  std::vector<std::vector<int>> groups;
  int b = 0;
  int m = 0;
};

// Exhaustive backtracking solver. Components are branched largest-first
// (ties by index) and placed first-fit, so the first solution found is
// deterministic. Throws PreconditionError when sum(sizes) != b*m, which is a
// caller bug rather than infeasibility; returns nullopt only after the search
// space is exhausted.
std::optional<PartitionWitness> partition_components(const std::vector<int>& sizes, int b, int m);

// Horizontal components of level n+1 lying over the members of T (level n).
// Requires a constant-ratio spec. Components can never straddle the offspring
// set of a maximal component; this is verified and violations throw
// MismatchError.
std::vector<Component> offspring_components(const AugTree& tree, const Component& T);

// Everything needed to extend a bijection one level below component T.
struct ComponentPlan {
  Component T;
  std::vector<Component> offspring;
  PartitionWitness witness;
};

enum class Rearrangeable { Yes, No, Undetermined };

struct RearrangeVerdict {
  Rearrangeable verdict = Rearrangeable::Undetermined;
  int levels_checked = 0;         // component levels scanned: 0..levels_checked
  int max_component_size = 0;
  bool pattern_periodic = false;  // per-level structure repeats with the rule period
  std::string reason;             // set for No / Undetermined
  std::optional<int> fail_level;
  std::optional<Component> fail_component;
  std::vector<int> fail_sizes;
  // Plans for levels 0..levels_checked-1, keyed by component order within the
  // level; present only for a Yes verdict.
  std::vector<std::vector<ComponentPlan>> plans;
};

// Decides the equal-total grouping property for every component at every
// level <= up_to_level. Components larger than size_threshold produce a
// "component growth" rejection, mirroring the bounded-size requirement.
RearrangeVerdict is_rearrangeable(const AugTree& tree, int up_to_level, int size_threshold = 64);

// Level-preserving bijections X_n -> X_n, indices in word order.
struct SigmaMap {
  int levels = 0;                         // maps exist for 0..levels
  std::vector<std::vector<int32_t>> fwd;  // fwd[n][i] = image index on level n
  std::vector<std::vector<int32_t>> inv;
};

// Builds the near-isometry from a Yes verdict: identity on the root and on
// X_1, then level by level each component's witness groups are matched to the
// child blocks of the images of its members, lexicographically within groups.
// Members of one horizontal component always land in one child block.
SigmaMap build_sigma(const AugTree& tree, const RearrangeVerdict& verdict, int up_to_level);

// True when every horizontal component at levels <= sigma.levels maps into a
// single child block (the shared-parent law the construction promises).
bool sigma_component_law_holds(const AugTree& tree, const SigmaMap& sigma);

struct DeviationStats {
  int max_deviation = 0;
  int bound = 0;  // k + 2
  long long pairs = 0;
};

// Exhaustive audit over all vertex pairs at levels <= up_to_level:
// |(plain-tree distance of images) - (augmented distance)|, against the
// bound k + 2 from the measured horizontal-geodesic constant k.
DeviationStats near_isometry_deviation(const AugTree& tree, const SigmaMap& sigma,
                                       int up_to_level, int k);

}  // namespace moran
