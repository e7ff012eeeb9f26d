#include "moran/tree.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "moran/errors.hpp"

namespace moran {

std::size_t AugTree::vertex_count() const {
  std::size_t c = 0;
  for (const auto& l : levels) c += l->size();
  return c;
}

std::size_t AugTree::edge_count() const {
  std::size_t c = 0;
  for (const auto& l : levels)
    for (const auto& a : l->adj) c += a.size();
  return c / 2;
}

BoxRegion AugTree::box_of(VertexRef v) const {
  if (approximate)
    throw PreconditionError("basic sets of a general-mode construction are not boxes");
  const TreeLevel& l = level(v.level);
  int d = spec->dim;
  BoxRegion b;
  b.lo.assign(l.box_lo.begin() + std::size_t(v.idx) * d,
              l.box_lo.begin() + std::size_t(v.idx + 1) * d);
  b.hi.assign(l.box_hi.begin() + std::size_t(v.idx) * d,
              l.box_hi.begin() + std::size_t(v.idx + 1) * d);
  return b;
}

std::optional<VertexRef> AugTree::find_on_level(int n, const Word& w) const {
  if (n < 0 || n > max_level) return std::nullopt;
  const auto& words = level(n).words;
  auto it = std::lower_bound(words.begin(), words.end(), w);
  if (it == words.end() || !(*it == w)) return std::nullopt;
  return VertexRef{n, static_cast<int32_t>(it - words.begin())};
}

VertexRef AugTree::parent_of(VertexRef v) const {
  if (v.level == 0) throw PreconditionError("the root has no ancestor");
  return VertexRef{v.level - 1, level(v.level).parent[v.idx]};
}

std::pair<int32_t, int32_t> AugTree::children_of(VertexRef v) const {
  const TreeLevel& l = level(v.level);
  return {l.child_off[v.idx], l.child_off[v.idx + 1]};
}

namespace {

// Bucket key: one cell index per axis, packed for hashing.
struct CellKey {
  std::vector<std::int64_t> c;
  bool operator==(const CellKey&) const = default;
};
struct CellKeyHash {
  std::size_t operator()(const CellKey& k) const {
    std::size_t h = 1469598103934665603ull;
    for (auto v : k.c) {
      h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

bool boxes_touch(const TreeLevel& l, int d, int32_t a, int32_t b) {
  for (int t = 0; t < d; ++t) {
    const Rational& alo = l.box_lo[std::size_t(a) * d + t];
    const Rational& ahi = l.box_hi[std::size_t(a) * d + t];
    const Rational& blo = l.box_lo[std::size_t(b) * d + t];
    const Rational& bhi = l.box_hi[std::size_t(b) * d + t];
    if (alo > bhi || blo > ahi) return false;
  }
  return true;
}

bool shapes_touch(const TreeLevel& l, double eps, int32_t a, int32_t b) {
  return poly_distance(l.fshapes[a], l.fshapes[b]) <= eps;
}

double level_epsilon(const MoranSpec& spec, int depth) {
  double eps = 0;
  for (int k = 1; k <= depth; ++k) eps = std::max(eps, spec.rule_at_depth(k).epsilon);
  return eps > 0 ? eps : 1e-12;
}

// Fills l.adj with all intersecting pairs. Exact mode hashes each box by the
// cell of its lower corner (cell size == box extent per axis), so any pair of
// touching boxes sits in neighbouring cells. Float mode widens the search ring
// to absorb rotated bounding boxes and the epsilon slack.
void build_edges_hashed(const MoranSpec& spec, TreeLevel& l, bool parallel) {
  int d = spec.dim;
  std::int64_t count = static_cast<std::int64_t>(l.size());
  std::unordered_map<CellKey, std::vector<int32_t>, CellKeyHash> buckets;
  buckets.reserve(l.size() * 2);
  int ring = 1;
  double feps = 0;
  std::vector<double> fcell(d);
  std::vector<Rational> cell(d);
  if (!l.fshapes.empty()) {
    feps = level_epsilon(spec, l.depth);
    // Rotation can stretch an AABB up to the full diagonal, so every axis uses
    // the diagonal as its cell size; touching shapes then differ by <= 2 cells.
    double diag = std::sqrt(rational_double(spec.base.diameter_sq()));
    for (int t = 0; t < d; ++t)
      fcell[t] = std::max(rational_double(l.scale) * diag + feps, 1e-300);
    ring = 2;
    for (int32_t v = 0; v < count; ++v) {
      CellKey key;
      key.c.resize(d);
      for (int t = 0; t < d; ++t)
        key.c[t] = static_cast<std::int64_t>(std::floor(l.fshapes[v].aabb_lo[t] / fcell[t]));
      buckets[key].push_back(v);
    }
  } else {
    for (int t = 0; t < d; ++t) cell[t] = l.scale * spec.base.extent(t);
    for (int32_t v = 0; v < count; ++v) {
      CellKey key;
      key.c.resize(d);
      for (int t = 0; t < d; ++t)
        key.c[t] = rational_floor((l.box_lo[std::size_t(v) * d + t] - spec.base.lo[t]) / cell[t])
                       .convert_to<std::int64_t>();
      buckets[key].push_back(v);
    }
  }

  std::vector<std::vector<int32_t>> higher(l.size());  // neighbours with larger index
  auto scan_vertex = [&](int32_t v) {
    CellKey key;
    key.c.resize(d);
    if (!l.fshapes.empty()) {
      for (int t = 0; t < d; ++t)
        key.c[t] = static_cast<std::int64_t>(std::floor(l.fshapes[v].aabb_lo[t] / fcell[t]));
    } else {
      for (int t = 0; t < d; ++t)
        key.c[t] = rational_floor((l.box_lo[std::size_t(v) * d + t] - spec.base.lo[t]) / cell[t])
                       .convert_to<std::int64_t>();
    }
    CellKey probe = key;
    std::vector<int> off(d, -ring);
    while (true) {
      for (int t = 0; t < d; ++t) probe.c[t] = key.c[t] + off[t];
      auto it = buckets.find(probe);
      if (it != buckets.end()) {
        for (int32_t u : it->second) {
          if (u <= v) continue;
          bool hit = l.fshapes.empty() ? boxes_touch(l, d, v, u) : shapes_touch(l, feps, v, u);
          if (hit) higher[v].push_back(u);
        }
      }
      int t = 0;
      while (t < d && off[t] == ring) {
        off[t] = -ring;
        ++t;
      }
      if (t == d) break;
      ++off[t];
    }
    std::sort(higher[v].begin(), higher[v].end());
  };

#ifdef _OPENMP
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 256)
    for (std::int64_t v = 0; v < count; ++v) scan_vertex(static_cast<int32_t>(v));
  } else {
    for (std::int64_t v = 0; v < count; ++v) scan_vertex(static_cast<int32_t>(v));
  }
#else
  (void)parallel;
  for (std::int64_t v = 0; v < count; ++v) scan_vertex(static_cast<int32_t>(v));
#endif

  l.adj.assign(l.size(), {});
  for (int32_t v = 0; v < count; ++v)
    for (int32_t u : higher[v]) {
      l.adj[v].push_back(u);
      l.adj[u].push_back(v);
    }
  for (auto& a : l.adj) std::sort(a.begin(), a.end());
}

void build_edges_brute(const MoranSpec& spec, TreeLevel& l) {
  int d = spec.dim;
  double feps = l.fshapes.empty() ? 0 : level_epsilon(spec, l.depth);
  std::int64_t count = static_cast<std::int64_t>(l.size());
  l.adj.assign(l.size(), {});
  for (int32_t v = 0; v < count; ++v)
    for (int32_t u = v + 1; u < count; ++u) {
      bool hit = l.fshapes.empty() ? boxes_touch(l, d, v, u) : shapes_touch(l, feps, v, u);
      if (hit) {
        l.adj[v].push_back(u);
        l.adj[u].push_back(v);
      }
    }
  for (auto& a : l.adj) std::sort(a.begin(), a.end());
}

}  // namespace

AugTree build_tree(const MoranSpec& spec, const BuildOptions& opts) {
  if (opts.max_level < 0) throw ConfigError("max_level must be >= 0");
  int deepest = spec.cut_depth(opts.max_level);
  if (opts.validate) {
    if (deepest >= 1) {
      ValidationReport rep = validate_spec(spec, deepest);
      if (!rep.valid) {
        const Violation& v = rep.violations.front();
        throw ValidationError("spec fails validation at parent '" + v.parent.key() +
                              "': " + v.detail);
      }
    }
  }

  AugTree tree;
  tree.spec = std::make_shared<MoranSpec>(spec);
  tree.max_level = opts.max_level;
  tree.approximate = spec.approximate;
  int d = spec.dim;

  // Budget check across all levels before any allocation.
  BigInt total(0);
  for (int n = 0; n <= opts.max_level; ++n) total += spec.words_at_depth(spec.cut_depth(n));
  if (total > opts.max_vertices)
    throw ConfigError("construction needs " + total.str() + " vertices, budget is " +
                      std::to_string(opts.max_vertices) +
                      " (raise MORAN_MAX_VERTICES or the --budget flag)");

  // Root level.
  {
    auto root = std::make_unique<TreeLevel>();
    root->n = 0;
    root->depth = 0;
    root->words.push_back(Word{});
    root->parent.push_back(-1);
    root->scale = Rational(1);
    root->offset.assign(d, Rational(0));
    root->box_lo = spec.base.lo;
    root->box_hi = spec.base.hi;
    root->adj.assign(1, {});
    if (tree.approximate) {
      root->fmaps.push_back(AffineMapF::identity(d));
      root->fshapes.push_back(map_box_f(root->fmaps[0], spec.base));
    }
    tree.levels.push_back(std::move(root));
  }

  for (int n = 1; n <= opts.max_level; ++n) {
    TreeLevel& prev = *tree.levels.back();
    auto cur = std::make_unique<TreeLevel>();
    cur->n = n;
    cur->depth = spec.cut_depth(n);
    cur->scale = spec.prefix_product(cur->depth);
    prev.child_off.assign(prev.size() + 1, 0);

    std::size_t expect =
        spec.words_at_depth(cur->depth).convert_to<std::size_t>();
    cur->words.reserve(expect);
    cur->parent.reserve(expect);
    cur->offset.reserve(expect * d);
    cur->box_lo.reserve(expect * d);
    cur->box_hi.reserve(expect * d);

    // Extend each parent word from the previous cut depth to this one.
    for (int32_t ip = 0; ip < static_cast<int32_t>(prev.size()); ++ip) {
      prev.child_off[ip] = static_cast<int32_t>(cur->size());
      struct Frame {
        Word w;
        HomothetyMap map;
        AffineMapF fmap;
      };
      // Iterative DFS keeping lexicographic order.
      std::vector<Frame> stack;
      Frame start;
      start.w = prev.words[ip];
      if (!tree.approximate) {
        start.map.scale = prev.scale;
        start.map.offset.assign(prev.offset.begin() + std::size_t(ip) * d,
                                prev.offset.begin() + std::size_t(ip + 1) * d);
      } else {
        start.fmap = prev.fmaps[ip];
      }
      stack.push_back(std::move(start));
      while (!stack.empty()) {
        Frame f = std::move(stack.back());
        stack.pop_back();
        if (f.w.depth() == cur->depth) {
          cur->words.push_back(f.w);
          cur->parent.push_back(ip);
          if (!tree.approximate) {
            for (int t = 0; t < d; ++t) cur->offset.push_back(f.map.offset[t]);
            BoxRegion b = f.map.apply_box(spec.base);
            for (int t = 0; t < d; ++t) cur->box_lo.push_back(b.lo[t]);
            for (int t = 0; t < d; ++t) cur->box_hi.push_back(b.hi[t]);
          } else {
            cur->fmaps.push_back(f.fmap);
            cur->fshapes.push_back(map_box_f(f.fmap, spec.base));
          }
          continue;
        }
        const auto& maps = spec.placements_for(f.w);
        // Push children in reverse so the stack pops them lexicographically.
        for (int j = static_cast<int>(maps.size()); j >= 1; --j) {
          Frame g;
          g.w = f.w.child(j);
          if (!tree.approximate)
            g.map = f.map.compose(maps[j - 1].exact_map());
          else
            g.fmap = f.fmap.compose(maps[j - 1].float_map());
          stack.push_back(std::move(g));
        }
      }
    }
    prev.child_off[prev.size()] = static_cast<int32_t>(cur->size());

    if (opts.use_spatial_hash)
      build_edges_hashed(spec, *cur, opts.parallel);
    else
      build_edges_brute(spec, *cur);
    tree.levels.push_back(std::move(cur));
  }
  tree.levels.back()->child_off.assign(tree.levels.back()->size() + 1,
                                       static_cast<int32_t>(0));
  return tree;
}

std::vector<std::pair<int32_t, int32_t>> level_edges_brute(const AugTree& tree, int n) {
  const TreeLevel& l = tree.level(n);
  int d = tree.spec->dim;
  double feps = l.fshapes.empty() ? 0 : level_epsilon(*tree.spec, l.depth);
  std::vector<std::pair<int32_t, int32_t>> out;
  for (int32_t v = 0; v < static_cast<int32_t>(l.size()); ++v)
    for (int32_t u = v + 1; u < static_cast<int32_t>(l.size()); ++u) {
      bool hit = l.fshapes.empty() ? boxes_touch(l, d, v, u) : shapes_touch(l, feps, v, u);
      if (hit) out.emplace_back(v, u);
    }
  return out;
}

std::vector<std::pair<int32_t, int32_t>> level_edge_pairs(const AugTree& tree, int n) {
  const TreeLevel& l = tree.level(n);
  std::vector<std::pair<int32_t, int32_t>> out;
  for (int32_t v = 0; v < static_cast<int32_t>(l.size()); ++v)
    for (int32_t u : l.adj[v])
      if (u > v) out.emplace_back(v, u);
  return out;
}

namespace {

void compute_components(const TreeLevel& l) {
  l.comp_id.assign(l.size(), -1);
  for (int32_t v = 0; v < static_cast<int32_t>(l.size()); ++v) {
    if (l.comp_id[v] != -1) continue;
    // BFS from the smallest unvisited vertex; v is the component id.
    std::vector<int32_t> queue{v};
    l.comp_id[v] = v;
    Component comp;
    comp.level = l.n;
    comp.id = v;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      int32_t x = queue[qi];
      comp.members.push_back(x);
      for (int32_t u : l.adj[x])
        if (l.comp_id[u] == -1) {
          l.comp_id[u] = v;
          queue.push_back(u);
        }
    }
    std::sort(comp.members.begin(), comp.members.end());
    l.comps.push_back(std::move(comp));
  }
}

}  // namespace

const std::vector<Component>& horizontal_components(const AugTree& tree, int n) {
  const TreeLevel& l = tree.level(n);
  std::call_once(l.comp_once, [&] { compute_components(l); });
  return l.comps;
}

const std::vector<int32_t>& component_ids(const AugTree& tree, int n) {
  const TreeLevel& l = tree.level(n);
  std::call_once(l.comp_once, [&] { compute_components(l); });
  return l.comp_id;
}

AugmentedCheck verify_augmented_property(const AugTree& tree) {
  for (int n = 2; n <= tree.max_level; ++n) {
    const TreeLevel& l = tree.level(n);
    const TreeLevel& up = tree.level(n - 1);
    for (int32_t v = 0; v < static_cast<int32_t>(l.size()); ++v)
      for (int32_t u : l.adj[v]) {
        if (u < v) continue;
        int32_t pv = l.parent[v], pu = l.parent[u];
        if (pv == pu) continue;
        if (!std::binary_search(up.adj[pv].begin(), up.adj[pv].end(), pu))
          return {false, std::make_pair(VertexRef{n, v}, VertexRef{n, u})};
      }
  }
  return {true, std::nullopt};
}

long long count_intersecting(const AugTree& tree, int n, const BoxRegion& V) {
  if (V.dim() != tree.spec->dim) throw ConfigError("query region has the wrong dimension");
  const TreeLevel& l = tree.level(n);
  int d = tree.spec->dim;
  long long count = 0;
  if (!tree.approximate) {
    for (int32_t v = 0; v < static_cast<int32_t>(l.size()); ++v) {
      bool hit = true;
      for (int t = 0; t < d && hit; ++t) {
        if (l.box_lo[std::size_t(v) * d + t] > V.hi[t] ||
            V.lo[t] > l.box_hi[std::size_t(v) * d + t])
          hit = false;
      }
      if (hit) ++count;
    }
  } else {
    double feps = level_epsilon(*tree.spec, l.depth);
    PolyShape q;
    q.dim = d;
    if (d == 1)
      q.pts = {rational_double(V.lo[0]), rational_double(V.hi[0])};
    else
      q = map_box_f(AffineMapF::identity(d), V);
    for (int32_t v = 0; v < static_cast<int32_t>(l.size()); ++v)
      if (poly_distance(l.fshapes[v], q) <= feps) ++count;
  }
  return count;
}

DegreeStats degree_stats(const AugTree& tree) {
  DegreeStats s;
  for (int n = 0; n <= tree.max_level; ++n) {
    const TreeLevel& l = tree.level(n);
    int maxh = 0, maxt = 0;
    for (int32_t v = 0; v < static_cast<int32_t>(l.size()); ++v) {
      int h = static_cast<int>(l.adj[v].size());
      int t = h + (n > 0 ? 1 : 0);
      if (n < tree.max_level) t += l.child_off[v + 1] - l.child_off[v];
      maxh = std::max(maxh, h);
      maxt = std::max(maxt, t);
    }
    s.per_level.emplace_back(maxh, maxt);
    s.max_horizontal_degree = std::max(s.max_horizontal_degree, maxh);
    s.max_total_degree = std::max(s.max_total_degree, maxt);
  }
  return s;
}

}  // namespace moran
