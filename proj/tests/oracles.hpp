#pragma once

// Reference implementations used only by the tests. Each one recomputes a
// quantity the library also computes, by a deliberately different route:
// an explicit flat graph with a textbook BFS, an exhaustive grouping
// enumeration, and the four-point condition evaluated straight from a
// distance matrix. Keep these dumb; their value is independence.

#include <map>
#include <queue>
#include <utility>
#include <vector>

#include "moran/metric.hpp"
#include "moran/tree.hpp"

namespace oracle {

struct FlatGraph {
  std::vector<std::vector<int>> adj;
  std::vector<moran::VertexRef> ref;
  std::map<std::pair<int, int>, int> id;

  int of(moran::VertexRef v) const { return id.at({v.level, v.idx}); }
};

// All vertices of levels 0..L with parent/child and horizontal edges.
inline FlatGraph explode(const moran::AugTree& t, int L) {
  FlatGraph g;
  for (int n = 0; n <= L; ++n)
    for (int32_t i = 0; i < static_cast<int32_t>(t.levels[n]->words.size()); ++i) {
      g.id[{n, i}] = static_cast<int>(g.ref.size());
      g.ref.push_back({n, i});
    }
  g.adj.resize(g.ref.size());
  auto link = [&](int a, int b) {
    g.adj[a].push_back(b);
    g.adj[b].push_back(a);
  };
  for (int n = 1; n <= L; ++n)
    for (int32_t i = 0; i < static_cast<int32_t>(t.levels[n]->words.size()); ++i)
      link(g.id[{n, i}], g.id[{n - 1, t.levels[n]->parent[i]}]);
  for (int n = 1; n <= L; ++n)
    for (int32_t u = 0; u < static_cast<int32_t>(t.levels[n]->adj.size()); ++u)
      for (int32_t v : t.levels[n]->adj[u])
        if (u < v) link(g.id[{n, u}], g.id[{n, v}]);
  return g;
}

inline std::vector<int> bfs_all(const FlatGraph& g, int src) {
  std::vector<int> dist(g.adj.size(), -1);
  std::queue<int> q;
  dist[src] = 0;
  q.push(src);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v : g.adj[u])
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        q.push(v);
      }
  }
  return dist;
}

// Does an assignment of the components into b groups, each summing to m,
// exist? Canonical enumeration: element i may open at most one new group.
inline bool grouping_exists_rec(const std::vector<int>& sizes, std::vector<int>& room, int used,
                                int b, std::size_t i) {
  if (i == sizes.size()) {
    for (int g = 0; g < used; ++g)
      if (room[g] != 0) return false;
    return used == b;
  }
  for (int g = 0; g < used && g < b; ++g) {
    if (room[g] < sizes[i]) continue;
    room[g] -= sizes[i];
    if (grouping_exists_rec(sizes, room, used, b, i + 1)) return true;
    room[g] += sizes[i];
  }
  if (used < b) {
    room[used] -= sizes[i];
    if (grouping_exists_rec(sizes, room, used + 1, b, i + 1)) return true;
    room[used] += sizes[i];
  }
  return false;
}

inline bool grouping_exists(const std::vector<int>& sizes, int b, int m) {
  long long total = 0;
  for (int s : sizes) total += s;
  if (total != static_cast<long long>(b) * m) return false;
  std::vector<int> room(b, m);
  return grouping_exists_rec(sizes, room, 0, b, 0);
}

// Twice the Gromov product (x|y) at the root, from a distance matrix.
inline int product2(const std::vector<std::vector<int>>& d, int root, int x, int y) {
  return d[root][x] + d[root][y] - d[x][y];
}

// Twice the four-point defect sup over all triples seen from the root.
inline int delta2(const std::vector<std::vector<int>>& d, int root) {
  int n = static_cast<int>(d.size());
  int worst = 0;
  for (int x = 0; x < n; ++x)
    for (int y = x; y < n; ++y)
      for (int z = 0; z < n; ++z) {
        int lhs = product2(d, root, x, y);
        int rhs = std::min(product2(d, root, x, z), product2(d, root, z, y));
        worst = std::max(worst, rhs - lhs);
      }
  return worst;
}

// Max length of a within-level path that is also a shortest path in the
// whole graph, recomputed from explicit BFS runs.
inline int k_oracle(const moran::AugTree& t, int L) {
  FlatGraph g = explode(t, L);
  int best = 0;
  for (int n = 1; n <= L; ++n) {
    const auto& lv = *t.levels[n];
    int count = static_cast<int>(lv.words.size());
    // Horizontal-only distances within the level.
    for (int32_t s = 0; s < count; ++s) {
      std::vector<int> hd(count, -1);
      std::queue<int32_t> q;
      hd[s] = 0;
      q.push(s);
      while (!q.empty()) {
        int32_t u = q.front();
        q.pop();
        for (int32_t v : lv.adj[u])
          if (hd[v] < 0) {
            hd[v] = hd[u] + 1;
            q.push(v);
          }
      }
      std::vector<int> full = bfs_all(g, g.id.at({n, s}));
      for (int32_t v = 0; v < count; ++v)
        if (hd[v] > best && hd[v] == full[g.id.at({n, v})]) best = hd[v];
    }
  }
  return best;
}

}  // namespace oracle
