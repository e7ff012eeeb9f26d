#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "moran/geometry.hpp"
#include "moran/word.hpp"

namespace moran {

enum class PlacementMode { Uniform, PerWord, Seeded, General };

// Rule for one construction depth: branch count n_k, contraction ratio r_k,
// and where the n_k children of every depth-(k-1) parent go.
struct LevelRule {
  int branch = 0;   // n_k >= 2
  Rational ratio;   // r_k in (0,1)
  PlacementMode mode = PlacementMode::Uniform;

  // Resolved child maps, shared by all parents at this depth (Uniform, General,
  // and Seeded after resolution).
  std::vector<Similitude> uniform;
  // PerWord: child maps keyed by parent word.
  std::map<Word, std::vector<Similitude>> per_word;

  // Seeded parameters, kept so the rule can be re-resolved with another seed.
  Rational seeded_gap;
  std::uint64_t seeded_seed = 0;

  double epsilon = 0.0;  // intersection tolerance, General mode only
};

// A declarative Moran construction: base box J, one rule per depth, optionally
// repeating from some rule index onward.
struct MoranSpec {
  std::string name;
  int dim = 1;
  BoxRegion base;
  std::vector<LevelRule> levels;
  std::optional<int> repeat_from;  // 0-based index into levels

  Rational r_inf;           // min of the rule ratios (> 0)
  bool approximate = false; // any General rule makes the whole spec float-mode
  bool constant_ratio = false;

  // Rule for word depth k >= 1. Throws ConfigError past the configured depth
  // when there is no repeat marker.
  const LevelRule& rule_at_depth(int k) const;
  int period() const;  // repeating block length (0 when finite)

  // r_1 * ... * r_k (1 for k = 0).
  Rational prefix_product(int k) const;

  // Word depth k(n) of level-cut n: the unique k with
  // prefix_product(k) <= r_inf^n < prefix_product(k-1).
  int cut_depth(int n) const;

  // Number of words at depth k.
  BigInt words_at_depth(int k) const;

  // Child maps for the children of `parent` (depth(parent)+1 is the rule depth).
  const std::vector<Similitude>& placements_for(const Word& parent) const;

  // True when both specs generate the same level structure (same branch counts
  // per depth and same ratio schedule).
  bool same_vertical_structure(const MoranSpec& other) const;
};

// One level cut X_n, words in lexicographic order.
struct LevelSet {
  int n = 0;
  int depth = 0;
  std::vector<Word> words;
};

struct Violation {
  enum class Kind { Containment, Overlap, Ratio };
  Kind kind;
  Word parent;
  int child_a = 0, child_b = 0;  // 1-based child indices (child_b unused for Containment/Ratio)
  std::string detail;
};

struct ValidationReport {
  bool valid = true;
  long long words_checked = 0;
  bool approximate = false;
  std::vector<Violation> violations;
  std::vector<std::string> warnings;
};

// Parse + semantic checks (ranges, counts, n*r <= 1 in d=1, placement shape).
// Seeded rules are resolved here, deterministically from their own seeds.
MoranSpec parse_spec(const std::string& json_text);
MoranSpec parse_spec_file(const std::string& path);

// Canonical serialization; equal specs produce identical bytes.
std::string spec_to_json(const MoranSpec& spec);

// FNV-1a over the canonical serialization.
std::string spec_hash(const MoranSpec& spec);

// Re-resolves every seeded rule of `tmpl` with the given seed. Deterministic;
// the result carries concrete uniform placements and passes validation.
MoranSpec random_spec(const MoranSpec& tmpl, std::uint64_t seed);

// Exhaustive geometric verification of all words up to `word_depth`:
// children inside their parent, sibling interiors disjoint, diameters scaled
// by exactly r_k (up to epsilon in float mode).
ValidationReport validate_spec(const MoranSpec& spec, int word_depth);

// Words of X_n. `max_words` guards runaway cuts.
LevelSet level_cut(const MoranSpec& spec, int n, std::int64_t max_words = 2'000'000);

// The unique prefix of w (a member of some X_n, n >= 1) lying in X_(n-1).
// Uniqueness is checked by exhaustion over all prefixes.
Word level_ancestor(const MoranSpec& spec, const Word& w);

// Index of the level cut containing w, if any.
std::optional<int> level_of_word(const MoranSpec& spec, const Word& w);

}  // namespace moran
