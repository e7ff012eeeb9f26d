#pragma once

#include <string>
#include <vector>

#include "moran/spec.hpp"
#include "moran/tree.hpp"

namespace th {

inline std::string spec_path(const std::string& name) {
  return std::string(MORAN_SPEC_DIR) + "/" + name + ".json";
}

inline std::string fixture_path(const std::string& name) {
  return std::string(MORAN_FIXTURE_DIR) + "/" + name + ".json";
}

inline moran::MoranSpec load_spec(const std::string& name) {
  return moran::parse_spec_file(spec_path(name));
}

inline moran::AugTree load_tree(const std::string& name, int depth, bool hashed = true) {
  moran::MoranSpec s = load_spec(name);
  moran::BuildOptions o;
  o.max_level = depth;
  o.use_spatial_hash = hashed;
  return moran::build_tree(s, o);
}

// The six official corpus specs; the exactness-sensitive tests skip none of
// these (rotated-2d is the single float-mode fixture and is handled apart).
inline const std::vector<std::string> kBundled = {"cantor-3",  "dyadic-chain", "ends-packed",
                                                  "seeded-a",  "seeded-b",     "seeded-c"};

inline const std::vector<std::string> kAllSpecs = {"cantor-3", "dyadic-chain", "ends-packed",
                                                   "seeded-a", "seeded-b",     "seeded-c",
                                                   "corner-l", "tight-gaps",   "rotated-2d"};

}  // namespace th
