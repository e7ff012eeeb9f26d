#include <algorithm>
#include <random>

#include "moran/errors.hpp"
#include "moran/spec.hpp"

namespace moran {

namespace {

constexpr std::uint64_t kMix = 0x9e3779b97f4a7c15ull;

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebull;
  x ^= x >> 31;
  return x;
}

// Uniform draw in [0, bound]; plain modulo keeps this portable and the slight
// bias is irrelevant for placement sampling.
std::uint64_t draw(std::mt19937_64& rng, std::uint64_t bound) { return rng() % (bound + 1); }

// Offsets are sampled on a fixed rational grid so results serialize exactly.
constexpr std::int64_t kGrid = 2520;

std::vector<Similitude> resolve_rule(const LevelRule& rule, const BoxRegion& base, int dim,
                                     std::uint64_t seed, int rule_index) {
  std::mt19937_64 rng(mix64(seed ^ mix64(rule.seeded_seed + kMix * (rule_index + 1))));
  Rational free_frac = 1 - rule.ratio;  // offset fraction range per axis
  std::int64_t m_max = rational_floor(free_frac * kGrid).convert_to<std::int64_t>();
  if (m_max < 0)
    throw ConfigError("seeded rule " + std::to_string(rule_index) + ": children do not fit");

  const int kRestarts = 64, kDrawsPerChild = 256;
  for (int attempt = 0; attempt < kRestarts; ++attempt) {
    // Each entry is a child's lower corner in absolute base coordinates.
    std::vector<std::vector<Rational>> corners;
    bool ok = true;
    for (int j = 0; j < rule.branch && ok; ++j) {
      bool placed = false;
      for (int t = 0; t < kDrawsPerChild && !placed; ++t) {
        std::vector<Rational> lo(dim);
        for (int a = 0; a < dim; ++a) {
          Rational frac(draw(rng, static_cast<std::uint64_t>(m_max)), kGrid);
          lo[a] = base.lo[a] + frac * base.extent(a);
        }
        bool clash = false;
        for (const auto& prev : corners) {
          // Require a gap of at least gap*extent on some axis; gap 0 still
          // forbids interior overlap (touching is fine).
          bool separated = false;
          for (int a = 0; a < dim; ++a) {
            Rational child_ext = rule.ratio * base.extent(a);
            Rational need = rule.seeded_gap * base.extent(a);
            if (lo[a] - (prev[a] + child_ext) >= need ||
                prev[a] - (lo[a] + child_ext) >= need) {
              separated = true;
              break;
            }
          }
          if (!separated) {
            clash = true;
            break;
          }
        }
        if (!clash) {
          corners.push_back(lo);
          placed = true;
        }
      }
      if (!placed) ok = false;
    }
    if (ok) {
      std::sort(corners.begin(), corners.end());
      std::vector<Similitude> maps;
      for (auto& lo : corners) {
        Similitude s;
        s.ratio = rule.ratio;
        // x -> r*x + b places the child's lower corner at lo: b = lo - r*base.lo.
        std::vector<Rational> b(dim);
        for (int a = 0; a < dim; ++a) b[a] = lo[a] - rule.ratio * base.lo[a];
        s.placement = std::move(b);
        maps.push_back(std::move(s));
      }
      return maps;
    }
  }
  throw ConfigError("seeded rule " + std::to_string(rule_index) +
                    ": no feasible placement within the retry budget (gap too large?)");
}

}  // namespace

MoranSpec random_spec(const MoranSpec& tmpl, std::uint64_t seed) {
  MoranSpec out = tmpl;
  for (std::size_t i = 0; i < out.levels.size(); ++i) {
    if (out.levels[i].mode != PlacementMode::Seeded) continue;
    out.levels[i].uniform =
        resolve_rule(out.levels[i], out.base, out.dim, seed, static_cast<int>(i));
  }
  return out;
}

}  // namespace moran
