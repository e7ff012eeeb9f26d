#include "moran/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "moran/errors.hpp"

namespace moran {

namespace {

constexpr int kInf = std::numeric_limits<int>::max() / 4;

// Flat vertex ids over levels 0..cap for BFS over the whole graph.
struct Flat {
  std::vector<int> base;
  int total = 0;

  Flat(const AugTree& t, int cap) {
    base.assign(cap + 2, 0);
    for (int l = 0; l <= cap; ++l)
      base[l + 1] = base[l] + static_cast<int>(t.level(l).size());
    total = base[cap + 1];
  }
  int id(VertexRef v) const { return base[v.level] + v.idx; }
};

void check_vertex(const AugTree& tree, VertexRef v) {
  if (v.level < 0 || v.level > tree.max_level ||
      v.idx < 0 || v.idx >= static_cast<int32_t>(tree.level(v.level).size()))
    throw PreconditionError("vertex outside the built tree");
}

// Ancestor index chain of v: entry [l] for levels 0..v.level.
std::vector<int32_t> ancestor_chain(const AugTree& tree, VertexRef v) {
  std::vector<int32_t> anc(v.level + 1);
  int32_t cur = v.idx;
  for (int l = v.level; l >= 0; --l) {
    anc[l] = cur;
    if (l > 0) cur = tree.level(l).parent[cur];
  }
  return anc;
}

}  // namespace

int graph_distance(const AugTree& tree, VertexRef x, VertexRef y, int descent_slack) {
  check_vertex(tree, x);
  check_vertex(tree, y);
  if (x == y) return 0;
  int cap = std::min(tree.max_level, std::max(x.level, y.level) + descent_slack);
  Flat flat(tree, cap);
  std::vector<int32_t> dist(flat.total, -1);
  std::vector<int> queue;
  queue.reserve(flat.total);
  int sx = flat.id(x), sy = flat.id(y);
  dist[sx] = 0;
  queue.push_back(sx);
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    int f = queue[qi];
    if (f == sy) return dist[f];
    // Decode the level by scanning base offsets (short vector).
    int l = static_cast<int>(std::upper_bound(flat.base.begin(), flat.base.end(), f) -
                             flat.base.begin()) - 1;
    int32_t i = f - flat.base[l];
    const TreeLevel& lev = tree.level(l);
    auto visit = [&](int nf) {
      if (dist[nf] == -1) {
        dist[nf] = dist[f] + 1;
        queue.push_back(nf);
      }
    };
    if (l > 0) visit(flat.base[l - 1] + lev.parent[i]);
    if (l < cap)
      for (int32_t c = lev.child_off[i]; c < lev.child_off[i + 1]; ++c)
        visit(flat.base[l + 1] + c);
    for (int32_t u : lev.adj[i]) visit(flat.base[l] + u);
  }
  return dist[sy];  // unreachable in a connected tree; -1 would signal a bug
}

int horizontal_distance(const AugTree& tree, int level, int32_t u, int32_t v) {
  if (u == v) return 0;
  const TreeLevel& lev = tree.level(level);
  std::vector<int32_t> dist(lev.size(), -1);
  std::vector<int32_t> queue;
  dist[u] = 0;
  queue.push_back(u);
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    int32_t c = queue[qi];
    if (c == v) return dist[c];
    for (int32_t w : lev.adj[c])
      if (dist[w] == -1) {
        dist[w] = dist[c] + 1;
        queue.push_back(w);
      }
  }
  return -1;
}

namespace {

// Costs of the V-H-V candidates for every crossing level l:
// (|x| - l) + (|y| - l) + horizontal distance between the level-l ancestors.
std::vector<int> sweep_costs(const AugTree& tree, VertexRef x, VertexRef y) {
  auto ax = ancestor_chain(tree, x);
  auto ay = ancestor_chain(tree, y);
  int top = std::min(x.level, y.level);
  std::vector<int> cost(top + 1, kInf);
  for (int l = top; l >= 0; --l) {
    int h = ax[l] == ay[l] ? 0 : horizontal_distance(tree, l, ax[l], ay[l]);
    if (h >= 0) cost[l] = (x.level - l) + (y.level - l) + h;
  }
  return cost;
}

}  // namespace

int canonical_distance(const AugTree& tree, VertexRef x, VertexRef y) {
  check_vertex(tree, x);
  check_vertex(tree, y);
  if (x == y) return 0;
  auto cost = sweep_costs(tree, x, y);
  return *std::min_element(cost.begin(), cost.end());
}

CanonicalGeodesic canonical_geodesic(const AugTree& tree, VertexRef x, VertexRef y) {
  check_vertex(tree, x);
  check_vertex(tree, y);
  CanonicalGeodesic g;
  if (x == y) {
    g.path = {x};
    g.level = x.level;
    return g;
  }
  auto cost = sweep_costs(tree, x, y);
  int d = *std::min_element(cost.begin(), cost.end());
  int lstar = static_cast<int>(std::min_element(cost.begin(), cost.end()) - cost.begin());
  // min_element returns the first (smallest l) minimizer, which is the
  // highest-level horizontal part.
  g.length = d;
  g.level = lstar;
  g.hlen = d - (x.level - lstar) - (y.level - lstar);

  auto ax = ancestor_chain(tree, x);
  auto ay = ancestor_chain(tree, y);
  for (int l = x.level; l >= lstar; --l) g.path.push_back({l, ax[l]});

  if (g.hlen > 0) {
    // Lexicographically smallest shortest horizontal path from ax to ay:
    // BFS from the endpoint, then walk greedily to the smallest neighbour
    // that still decreases the remaining distance.
    const TreeLevel& lev = tree.level(lstar);
    std::vector<int32_t> dist(lev.size(), -1);
    std::vector<int32_t> queue;
    dist[ay[lstar]] = 0;
    queue.push_back(ay[lstar]);
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      int32_t c = queue[qi];
      for (int32_t w : lev.adj[c])
        if (dist[w] == -1) {
          dist[w] = dist[c] + 1;
          queue.push_back(w);
        }
    }
    int32_t cur = ax[lstar];
    while (cur != ay[lstar]) {
      for (int32_t w : lev.adj[cur])
        if (dist[w] == dist[cur] - 1) {
          g.path.push_back({lstar, w});
          cur = w;
          break;
        }
    }
  }
  for (int l = lstar + 1; l <= y.level; ++l) g.path.push_back({l, ay[l]});
  return g;
}

HalfInt gromov_product(const AugTree& tree, VertexRef x, VertexRef y) {
  return HalfInt{x.level + y.level - graph_distance(tree, x, y)};
}

HalfInt gromov_product_canonical(const AugTree& tree, VertexRef x, VertexRef y) {
  return HalfInt{x.level + y.level - canonical_distance(tree, x, y)};
}

double rho_a(const AugTree& tree, VertexRef x, VertexRef y, double a) {
  if (!(a > 0)) throw ConfigError("the visual parameter a must be positive");
  if (x == y) return 0.0;
  return std::exp(-a * gromov_product(tree, x, y).value());
}

bool smallness_ok(double a, HalfInt delta) {
  if (delta.twice == 0) return true;
  return std::exp(a * delta.value()) - 1.0 < std::sqrt(2.0) - 1.0;
}

double default_a(HalfInt delta, const Rational& r_inf) {
  if (delta.twice == 0) return std::log(1.0 / rational_double(r_inf));
  return 0.9 * (0.5 * std::log(2.0)) / delta.value();
}

namespace {

constexpr std::size_t kLevelBudget = 4000;  // widest level any quadratic scan accepts

// All-pairs horizontal distances of one level (kInf when disconnected).
std::vector<int32_t> horizontal_matrix(const AugTree& tree, int level) {
  const TreeLevel& lev = tree.level(level);
  std::size_t n = lev.size();
  if (n > kLevelBudget)
    throw ConfigError("level " + std::to_string(level) + " is too wide (" + std::to_string(n) +
                      " vertices) for an all-pairs horizontal scan");
  std::vector<int32_t> H(n * n, kInf);
  std::int64_t count = static_cast<std::int64_t>(n);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16)
#endif
  for (std::int64_t s = 0; s < count; ++s) {
    int32_t* row = H.data() + s * n;
    row[s] = 0;
    std::vector<int32_t> queue{static_cast<int32_t>(s)};
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      int32_t c = queue[qi];
      for (int32_t w : lev.adj[c])
        if (row[w] == kInf) {
          row[w] = row[c] + 1;
          queue.push_back(w);
        }
    }
  }
  return H;
}

}  // namespace

int max_horizontal_geodesic_length(const AugTree& tree, int up_to_level) {
  int L = std::min(up_to_level, tree.max_level);
  std::vector<std::vector<int32_t>> H(L + 1);
  for (int l = 0; l <= L; ++l) H[l] = horizontal_matrix(tree, l);

  int k = 0;
  for (int n = 1; n <= L; ++n) {
    const std::vector<int32_t>& Hn = H[n];
    std::size_t sz = tree.level(n).size();
    std::int64_t count = static_cast<std::int64_t>(sz);
    int level_best = 0;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16) reduction(max : level_best)
#endif
    for (std::int64_t u = 0; u < count; ++u) {
      for (int32_t v = static_cast<int32_t>(u) + 1; v < count; ++v) {
        int h = Hn[u * sz + v];
        if (h <= level_best || h >= kInf) continue;
        // h is a geodesic length iff no higher crossing level beats it.
        int32_t au = static_cast<int32_t>(u), av = v;
        int best = h;
        for (int l = n - 1; l >= 0 && 2 * (n - l) < best; --l) {
          au = tree.level(l + 1).parent[au];
          av = tree.level(l + 1).parent[av];
          int hh = au == av ? 0 : H[l][au * tree.level(l).size() + av];
          if (hh < kInf) best = std::min(best, 2 * (n - l) + hh);
        }
        if (best == h) level_best = std::max(level_best, h);
      }
    }
    k = std::max(k, level_best);
  }
  return k;
}

HalfInt delta_estimate(const AugTree& tree, const TripleSample& sample) {
  int L = std::min(sample.up_to_level, tree.max_level);
  Flat flat(tree, L);
  int V = flat.total;
  std::vector<int> level_of(V);
  for (int l = 0; l <= L; ++l)
    for (int f = flat.base[l]; f < flat.base[l + 1]; ++f) level_of[f] = l;

  int worst = 0;  // max over triples of 2*(min(pxz, pzy) - pxy)

  if (sample.samples == 0) {
    if (V > 700)
      throw ConfigError("exhaustive triple scan over " + std::to_string(V) +
                        " vertices exceeds the budget; use sampling");
    // Twice-products for all pairs via the canonical sweep.
    std::vector<std::vector<int32_t>> P(V, std::vector<int32_t>(V, 0));
    for (int i = 0; i < V; ++i) {
      VertexRef x{level_of[i], i - flat.base[level_of[i]]};
      for (int j = i + 1; j < V; ++j) {
        VertexRef y{level_of[j], j - flat.base[level_of[j]]};
        P[i][j] = P[j][i] =
            static_cast<int32_t>(x.level + y.level - canonical_distance(tree, x, y));
      }
      P[i][i] = 2 * level_of[i];
    }
    std::int64_t count = V;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 4) reduction(max : worst)
#endif
    for (std::int64_t x = 0; x < count; ++x)
      for (int y = static_cast<int>(x); y < V; ++y) {
        int pxy = P[x][y];
        for (int z = 0; z < V; ++z) {
          int m = std::min(P[x][z], P[z][y]);
          worst = std::max(worst, m - pxy);
        }
      }
  } else {
    std::mt19937_64 rng(sample.seed);
    auto draw = [&] {
      int f = static_cast<int>(rng() % static_cast<std::uint64_t>(V));
      return VertexRef{level_of[f], f - flat.base[level_of[f]]};
    };
    for (long long s = 0; s < sample.samples; ++s) {
      VertexRef x = draw(), y = draw(), z = draw();
      int pxy = x.level + y.level - canonical_distance(tree, x, y);
      int pxz = x.level + z.level - canonical_distance(tree, x, z);
      int pzy = z.level + y.level - canonical_distance(tree, z, y);
      worst = std::max(worst, std::min(pxz, pzy) - pxy);
    }
  }
  return HalfInt{std::max(worst, 0)};
}

ConditionH condition_h_estimate(const AugTree& tree, int up_to_level) {
  const MoranSpec& spec = *tree.spec;
  int d = spec.dim;
  ConditionH out;
  out.squared = !tree.approximate && d >= 2;
  out.exact = !tree.approximate;
  int L = std::min(up_to_level, tree.max_level);

  for (int n = 1; n <= L; ++n) {
    const TreeLevel& lev = tree.level(n);
    std::size_t sz = lev.size();
    if (sz < 2 || sz > kLevelBudget) continue;
    Rational rn = rational_pow(spec.r_inf, static_cast<unsigned>(n));
    bool have = false;
    Rational level_min;
    std::int64_t count = static_cast<std::int64_t>(sz);
#ifdef _OPENMP
#pragma omp parallel
#endif
    {
      bool thave = false;
      Rational tmin;
#ifdef _OPENMP
#pragma omp for schedule(dynamic, 16) nowait
#endif
      for (std::int64_t u = 0; u < count; ++u) {
        for (int32_t v = static_cast<int32_t>(u) + 1; v < count; ++v) {
          if (std::binary_search(lev.adj[u].begin(), lev.adj[u].end(), v)) continue;
          Rational norm;
          if (!tree.approximate) {
            BoxRegion bu = tree.box_of({n, static_cast<int32_t>(u)});
            BoxRegion bv = tree.box_of({n, v});
            if (d == 1) {
              Rational gap = bu.hi[0] < bv.lo[0] ? bv.lo[0] - bu.hi[0] : bu.lo[0] - bv.hi[0];
              norm = gap / rn;
            } else {
              norm = box_distance_sq(bu, bv) / (rn * rn);
            }
          } else {
            double dist = poly_distance(lev.fshapes[u], lev.fshapes[v]);
            norm = Rational(dist / rational_double(rn));
          }
          if (!thave || norm < tmin) {
            tmin = norm;
            thave = true;
          }
        }
      }
      if (thave) {
#ifdef _OPENMP
#pragma omp critical
#endif
        {
          if (!have || tmin < level_min) {
            level_min = tmin;
            have = true;
          }
        }
      }
    }
    if (have) {
      out.per_level.emplace_back(n, level_min);
      if (!out.finite || level_min < out.value) {
        out.value = level_min;
        out.finite = true;
      }
    }
  }

  std::size_t m = out.per_level.size();
  out.decreasing_trend = m >= 3 && out.per_level[m - 3].second > out.per_level[m - 2].second &&
                         out.per_level[m - 2].second > out.per_level[m - 1].second;
  return out;
}

DiagnoseReport diagnose(const AugTree& tree, const DiagnoseOptions& opts) {
  DiagnoseReport rep;
  int L = opts.up_to_level > 0 ? std::min(opts.up_to_level, tree.max_level) : tree.max_level;
  // Quadratic scans stop before any level wider than the budget.
  int feasible = 0;
  for (int l = 1; l <= L && tree.level(l).size() <= kLevelBudget; ++l) feasible = l;
  L = std::min(L, feasible == 0 ? L : feasible);
  rep.levels_scanned = L;
  rep.k = max_horizontal_geodesic_length(tree, L);
  rep.delta_levels = std::min(4, L);
  // Shrink the exhaustive window until the triple scan fits its budget.
  while (rep.delta_levels > 1) {
    Flat probe(tree, rep.delta_levels);
    if (probe.total <= 700 || opts.delta_samples > 0) break;
    --rep.delta_levels;
  }
  rep.delta = delta_estimate(tree, {rep.delta_levels, opts.delta_samples, opts.seed});
  rep.cond_h = condition_h_estimate(tree, L);
  rep.degrees = degree_stats(tree);
  rep.a_default = default_a(rep.delta, tree.spec->r_inf);
  rep.a_used = opts.a.value_or(rep.a_default);
  rep.a_ok = smallness_ok(rep.a_used, rep.delta);
  return rep;
}

}  // namespace moran
