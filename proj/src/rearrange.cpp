#include "moran/rearrange.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "moran/errors.hpp"
#include "moran/metric.hpp"

namespace moran {

namespace {

constexpr long long kSolverBudget = 50'000'000;  // backtracking nodes

struct Solver {
  const std::vector<int>& sizes;
  std::vector<int> order;  // component indices, largest first
  std::vector<int> room;   // remaining capacity per group
  std::vector<std::vector<int>> groups;
  long long nodes = 0;

  explicit Solver(const std::vector<int>& s, int b, int m) : sizes(s) {
    order.resize(s.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int c) { return s[a] > s[c]; });
    room.assign(b, m);
    groups.resize(b);
  }

  bool place(std::size_t step) {
    if (++nodes > kSolverBudget)
      throw ConfigError("partition search exceeded its node budget");
    if (step == order.size()) return true;
    int c = order[step];
    for (std::size_t g = 0; g < room.size(); ++g) {
      if (room[g] < sizes[c]) continue;
      // Equal-capacity groups are interchangeable; trying the first is enough.
      bool dup = false;
      for (std::size_t h = 0; h < g; ++h)
        if (room[h] == room[g]) {
          dup = true;
          break;
        }
      if (dup) continue;
      room[g] -= sizes[c];
      groups[g].push_back(c);
      if (place(step + 1)) return true;
      groups[g].pop_back();
      room[g] += sizes[c];
    }
    return false;
  }
};

}  // namespace

std::optional<PartitionWitness> partition_components(const std::vector<int>& sizes, int b, int m) {
  if (b < 1 || m < 1) throw PreconditionError("group count and group total must be positive");
  long long total = std::accumulate(sizes.begin(), sizes.end(), 0ll);
  if (total != static_cast<long long>(b) * m)
    throw PreconditionError("component sizes sum to " + std::to_string(total) +
                            ", expected " + std::to_string(b) + "*" + std::to_string(m));
  Solver solver(sizes, b, m);
  if (!solver.place(0)) return std::nullopt;
  PartitionWitness w;
  w.sizes = sizes;
  w.b = b;
  w.m = m;
  w.groups = std::move(solver.groups);
  for (auto& g : w.groups) std::sort(g.begin(), g.end());
  return w;
}

std::vector<Component> offspring_components(const AugTree& tree, const Component& T) {
  if (!tree.spec->constant_ratio)
    throw PreconditionError("offspring grouping requires a constant-ratio construction");
  if (T.level >= tree.max_level)
    throw PreconditionError("component sits on the deepest built level");
  const TreeLevel& lev = tree.level(T.level);
  std::vector<char> mask(tree.level(T.level + 1).size(), 0);
  for (int32_t u : T.members)
    for (int32_t c = lev.child_off[u]; c < lev.child_off[u + 1]; ++c) mask[c] = 1;

  std::vector<Component> out;
  for (const Component& C : horizontal_components(tree, T.level + 1)) {
    bool any = false, all = true;
    for (int32_t v : C.members) {
      if (mask[v])
        any = true;
      else
        all = false;
    }
    if (!any) continue;
    if (!all)
      throw MismatchError("horizontal component at level " + std::to_string(T.level + 1) +
                          " straddles the offspring of component " + std::to_string(T.id));
    out.push_back(C);
  }
  return out;
}

namespace {

std::string plan_signature(const ComponentPlan& p) {
  std::ostringstream os;
  os << p.T.members.size() << ":";
  for (const auto& c : p.offspring) os << c.members.size() << ",";
  os << "|";
  for (const auto& g : p.witness.groups) {
    for (int i : g) os << i << ",";
    os << ";";
  }
  return os.str();
}

}  // namespace

RearrangeVerdict is_rearrangeable(const AugTree& tree, int up_to_level, int size_threshold) {
  if (!tree.spec->constant_ratio)
    throw PreconditionError("rearrangeability is defined for constant-ratio constructions only");
  RearrangeVerdict v;
  int L = std::min(up_to_level, tree.max_level);
  v.levels_checked = L;

  for (int n = 0; n <= L; ++n)
    for (const Component& T : horizontal_components(tree, n))
      v.max_component_size =
          std::max(v.max_component_size, static_cast<int>(T.members.size()));

  std::vector<std::set<std::string>> sigs(L);
  for (int n = 0; n < L; ++n) {
    std::vector<ComponentPlan> level_plans;
    for (const Component& T : horizontal_components(tree, n)) {
      if (static_cast<int>(T.members.size()) > size_threshold) {
        v.verdict = Rearrangeable::No;
        v.reason = "component growth: size " + std::to_string(T.members.size()) +
                   " exceeds the threshold " + std::to_string(size_threshold);
        v.fail_level = n;
        v.fail_component = T;
        v.plans.clear();
        return v;
      }
      ComponentPlan plan;
      plan.T = T;
      plan.offspring = offspring_components(tree, T);
      std::vector<int> sizes;
      sizes.reserve(plan.offspring.size());
      for (const auto& c : plan.offspring) sizes.push_back(static_cast<int>(c.members.size()));
      int b = static_cast<int>(T.members.size());
      int m = tree.spec->rule_at_depth(n + 1).branch;
      std::optional<PartitionWitness> w;
      try {
        w = partition_components(sizes, b, m);
      } catch (const ConfigError& e) {
        v.verdict = Rearrangeable::Undetermined;
        v.reason = e.what();
        v.fail_level = n;
        v.fail_component = T;
        v.fail_sizes = sizes;
        v.plans.clear();
        return v;
      }
      if (!w) {
        v.verdict = Rearrangeable::No;
        v.reason = "offspring components admit no equal-total grouping";
        v.fail_level = n;
        v.fail_component = T;
        v.fail_sizes = sizes;
        v.plans.clear();
        return v;
      }
      plan.witness = std::move(*w);
      sigs[n].insert(plan_signature(plan));
      level_plans.push_back(std::move(plan));
    }
    v.plans.push_back(std::move(level_plans));
  }

  v.verdict = Rearrangeable::Yes;
  int p = tree.spec->period();
  if (p > 0 && L - 1 >= 2 * p) {
    bool periodic = true;
    for (int n = L - p; n < L; ++n)
      if (sigs[n] != sigs[n - p]) periodic = false;
    v.pattern_periodic = periodic;
  }
  return v;
}

SigmaMap build_sigma(const AugTree& tree, const RearrangeVerdict& verdict, int up_to_level) {
  if (verdict.verdict != Rearrangeable::Yes)
    throw PreconditionError("sigma requires a yes verdict");
  int L = std::min(up_to_level, verdict.levels_checked);
  SigmaMap s;
  s.levels = L;
  s.fwd.resize(L + 1);
  s.inv.resize(L + 1);
  s.fwd[0] = {0};
  s.inv[0] = {0};

  for (int n = 0; n < L; ++n) {
    const TreeLevel& lev = tree.level(n);
    std::size_t below = tree.level(n + 1).size();
    s.fwd[n + 1].assign(below, -1);
    s.inv[n + 1].assign(below, -1);
    for (const ComponentPlan& plan : verdict.plans[n]) {
      // Component members in index order (== word order); their images under
      // the current level's map give the target child blocks.
      const auto& members = plan.T.members;
      for (std::size_t si = 0; si < members.size(); ++si) {
        int32_t target = s.fwd[n][members[si]];
        int32_t block = lev.child_off[target];
        std::vector<int32_t> sources;
        for (int ci : plan.witness.groups[si])
          for (int32_t v : plan.offspring[ci].members) sources.push_back(v);
        std::sort(sources.begin(), sources.end());
        for (std::size_t j = 0; j < sources.size(); ++j) {
          s.fwd[n + 1][sources[j]] = block + static_cast<int32_t>(j);
          s.inv[n + 1][block + static_cast<int32_t>(j)] = sources[j];
        }
      }
    }
    for (std::size_t i = 0; i < below; ++i)
      if (s.fwd[n + 1][i] < 0 || s.inv[n + 1][i] < 0)
        throw MismatchError("sigma construction left level " + std::to_string(n + 1) +
                            " incomplete at index " + std::to_string(i));
  }
  return s;
}

bool sigma_component_law_holds(const AugTree& tree, const SigmaMap& sigma) {
  for (int n = 1; n <= sigma.levels; ++n) {
    const TreeLevel& lev = tree.level(n);
    for (const Component& C : horizontal_components(tree, n)) {
      int32_t parent = -1;
      for (int32_t v : C.members) {
        int32_t p = lev.parent[sigma.fwd[n][v]];
        if (parent == -1) parent = p;
        if (p != parent) return false;
      }
    }
  }
  return true;
}

DeviationStats near_isometry_deviation(const AugTree& tree, const SigmaMap& sigma,
                                       int up_to_level, int k) {
  DeviationStats st;
  st.bound = k + 2;
  int L = std::min(up_to_level, sigma.levels);
  // Flat list of (level, index) pairs up to L.
  std::vector<VertexRef> verts;
  for (int n = 0; n <= L; ++n)
    for (int32_t i = 0; i < static_cast<int32_t>(tree.level(n).size()); ++i)
      verts.push_back({n, i});
  std::int64_t count = static_cast<std::int64_t>(verts.size());
  int worst = 0;
  long long pairs = 0;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 8) reduction(max : worst) reduction(+ : pairs)
#endif
  for (std::int64_t a = 0; a < count; ++a) {
    for (std::int64_t b = a + 1; b < count; ++b) {
      VertexRef x = verts[a], y = verts[b];
      int aug = canonical_distance(tree, x, y);
      const Word& wx = tree.word_of({x.level, sigma.fwd[x.level][x.idx]});
      const Word& wy = tree.word_of({y.level, sigma.fwd[y.level][y.idx]});
      int c = wx.common_prefix(wy);
      int treed = x.level + y.level - 2 * c;
      worst = std::max(worst, std::abs(treed - aug));
      ++pairs;
    }
  }
  st.max_deviation = worst;
  st.pairs = pairs;
  return st;
}

}  // namespace moran
