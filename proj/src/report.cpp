#include "moran/report.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "moran/errors.hpp"

namespace moran {

using nlohmann::json;

std::string file_fingerprint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::uint64_t h = 14695981039346656037ull;
  char buf[4096];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

std::string dump_report(const json& j) { return j.dump(2) + "\n"; }

json half_int_json(const HalfInt& h) {
  return json{{"twice", h.twice}, {"value", h.value()}};
}

static json rational_json(const Rational& q) { return rational_str(q); }

json validate_report(const ValidationReport& rep, int depth) {
  json out;
  out["valid"] = rep.valid;
  out["checked_depth"] = depth;
  out["words_checked"] = rep.words_checked;
  out["approximate"] = rep.approximate;
  json viols = json::array();
  for (const Violation& v : rep.violations) {
    const char* kind = v.kind == Violation::Kind::Containment ? "containment"
                       : v.kind == Violation::Kind::Overlap   ? "overlap"
                                                              : "ratio";
    json jv{{"kind", kind}, {"parent", v.parent.key()}, {"child_a", v.child_a},
            {"detail", v.detail}};
    if (v.kind == Violation::Kind::Overlap) jv["child_b"] = v.child_b;
    viols.push_back(std::move(jv));
  }
  out["violations"] = std::move(viols);
  out["warnings"] = rep.warnings;
  return out;
}

json build_report(const AugTree& tree) {
  json out;
  out["dimension"] = tree.spec->dim;
  out["mode"] = tree.approximate ? "approximate" : "exact";
  out["levels_built"] = tree.max_level;
  out["vertex_count"] = tree.vertex_count();
  out["edge_count"] = tree.edge_count();
  json levels = json::array();
  for (int n = 0; n <= tree.max_level; ++n) {
    const TreeLevel& lv = *tree.levels[n];
    long long edges = 0;
    for (const auto& nb : lv.adj) edges += static_cast<long long>(nb.size());
    levels.push_back(json{{"level", n},
                          {"word_depth", tree.spec->cut_depth(n)},
                          {"vertices", lv.words.size()},
                          {"edges", edges / 2},
                          {"components", horizontal_components(tree, n).size()}});
  }
  out["levels"] = std::move(levels);
  DegreeStats deg = degree_stats(tree);
  out["degree"] = json{{"max_horizontal", deg.max_horizontal_degree},
                       {"max_total", deg.max_total_degree},
                       {"per_level", deg.per_level}};
  return out;
}

json components_report(const AugTree& tree, bool members) {
  json out;
  json levels = json::array();
  for (int n = 0; n <= tree.max_level; ++n) {
    const auto& comps = horizontal_components(tree, n);
    json jl;
    jl["level"] = n;
    jl["count"] = comps.size();
    json list = json::array();
    for (const Component& c : comps) {
      json jc{{"id", tree.levels[n]->words[c.members.front()].key()},
              {"size", c.members.size()}};
      if (members) {
        json mem = json::array();
        for (int32_t m : c.members) mem.push_back(tree.levels[n]->words[m].key());
        jc["members"] = std::move(mem);
      }
      list.push_back(std::move(jc));
    }
    jl["components"] = std::move(list);
    levels.push_back(std::move(jl));
  }
  out["levels"] = std::move(levels);
  return out;
}

json geodesic_report(const AugTree& tree, VertexRef x, VertexRef y, std::optional<double> a) {
  json out;
  out["from"] = tree.levels[x.level]->words[x.idx].key();
  out["to"] = tree.levels[y.level]->words[y.idx].key();
  CanonicalGeodesic g = canonical_geodesic(tree, x, y);
  out["distance"] = g.length;
  out["crossing_level"] = g.level;
  out["horizontal_length"] = g.hlen;
  json path = json::array();
  for (const VertexRef& v : g.path) path.push_back(tree.levels[v.level]->words[v.idx].key());
  out["path"] = std::move(path);
  HalfInt p = gromov_product_canonical(tree, x, y);
  out["gromov_product"] = half_int_json(p);
  if (a) {
    out["a"] = *a;
    out["rho_a"] = rho_a(tree, x, y, *a);
  }
  return out;
}

json diagnose_report(const DiagnoseReport& rep) {
  json out;
  out["levels_scanned"] = rep.levels_scanned;
  out["k"] = rep.k;
  json d = half_int_json(rep.delta);
  d["window_levels"] = rep.delta_levels;
  out["delta_estimate"] = std::move(d);
  json ch;
  ch["finite"] = rep.cond_h.finite;
  ch["exact"] = rep.cond_h.exact;
  ch["squared"] = rep.cond_h.squared;
  ch["value"] = rational_json(rep.cond_h.value);
  json per = json::array();
  for (const auto& [n, q] : rep.cond_h.per_level)
    per.push_back(json{{"level", n}, {"value", rational_json(q)}});
  ch["per_level"] = std::move(per);
  ch["decreasing_trend"] = rep.cond_h.decreasing_trend;
  out["condition_h"] = std::move(ch);
  out["degree"] = json{{"max_horizontal", rep.degrees.max_horizontal_degree},
                       {"max_total", rep.degrees.max_total_degree},
                       {"per_level", rep.degrees.per_level}};
  out["a_default"] = rep.a_default;
  out["a_used"] = rep.a_used;
  out["a_smallness_ok"] = rep.a_ok;
  return out;
}

static const char* verdict_str(Rearrangeable v) {
  switch (v) {
    case Rearrangeable::Yes: return "yes-at-depth";
    case Rearrangeable::No: return "no";
    default: return "undetermined";
  }
}

json rearrange_report(const AugTree& tree, const RearrangeVerdict& v, int plan_levels) {
  json out;
  out["verdict"] = verdict_str(v.verdict);
  out["levels_checked"] = v.levels_checked;
  out["max_component_size"] = v.max_component_size;
  out["pattern_periodic"] = v.pattern_periodic;
  out["note"] = "verdict is depth-bounded; the infinite-level claim is not decided here";
  if (!v.reason.empty()) out["reason"] = v.reason;
  if (v.fail_level) {
    json w;
    w["level"] = *v.fail_level;
    if (v.fail_component)
      w["component"] = tree.levels[*v.fail_level]->words[v.fail_component->members.front()].key();
    w["offspring_sizes"] = v.fail_sizes;
    out["witness"] = std::move(w);
  }
  if (!v.plans.empty()) {
    json levels = json::array();
    int top = std::min<int>(plan_levels, static_cast<int>(v.plans.size()) - 1);
    for (int n = 0; n <= top; ++n) {
      json jl;
      jl["level"] = n;
      json comps = json::array();
      for (const ComponentPlan& p : v.plans[n]) {
        json jc;
        jc["id"] = tree.levels[n]->words[p.T.members.front()].key();
        jc["size"] = p.T.members.size();
        jc["group_total"] = p.witness.m;
        json off = json::array();
        for (const Component& c : p.offspring)
          off.push_back(json{{"id", tree.levels[n + 1]->words[c.members.front()].key()},
                             {"size", c.members.size()}});
        jc["offspring"] = std::move(off);
        json groups = json::array();
        for (const auto& g : p.witness.groups) {
          json jg = json::array();
          for (int idx : g)
            jg.push_back(tree.levels[n + 1]->words[p.offspring[idx].members.front()].key());
          groups.push_back(std::move(jg));
        }
        jc["groups"] = std::move(groups);
        comps.push_back(std::move(jc));
      }
      jl["components"] = std::move(comps);
      levels.push_back(std::move(jl));
    }
    out["plans"] = std::move(levels);
    out["plan_levels_listed"] = top;
  }
  return out;
}

json sigma_report(const AugTree& tree, const SigmaMap& sigma, const DeviationStats& dev,
                  bool full_map) {
  json out;
  out["levels"] = sigma.levels;
  json sizes = json::array();
  for (const auto& f : sigma.fwd) sizes.push_back(f.size());
  out["level_sizes"] = std::move(sizes);
  out["component_law_ok"] = sigma_component_law_holds(tree, sigma);
  out["deviation"] =
      json{{"max", dev.max_deviation}, {"bound", dev.bound}, {"pairs", dev.pairs}};
  if (full_map) {
    json map = json::array();
    for (int n = 0; n <= sigma.levels; ++n) {
      json images = json::array();
      for (int32_t i = 0; i < static_cast<int32_t>(sigma.fwd[n].size()); ++i)
        images.push_back(tree.levels[n]->words[sigma.fwd[n][i]].key());
      map.push_back(json{{"level", n}, {"images", std::move(images)}});
    }
    out["map"] = std::move(map);
  }
  return out;
}

json map_report(const Ray& ray, const BoundaryPointApprox& pt) {
  json out;
  out["ray"] = ray.word.key();
  out["truncation"] = ray.truncation;
  json coords = json::array(), floats = json::array();
  for (const Rational& c : pt.point) {
    coords.push_back(rational_json(c));
    floats.push_back(c.convert_to<double>());
  }
  out["point"] = std::move(coords);
  out["point_float"] = std::move(floats);
  out["error_bound_sq"] = rational_json(pt.error_bound_sq);
  out["error_bound"] = pt.error_bound();
  return out;
}

json distortion_json(const DistortionStats& st) {
  json out;
  out["depth"] = st.depth;
  if (st.a != 0) {
    out["a"] = st.a;
    out["alpha"] = st.alpha;
  }
  out["pairs_used"] = st.pairs_used;
  out["pairs_excluded"] = st.pairs_excluded;
  out["min_ratio"] = st.min_ratio;
  out["max_ratio"] = st.max_ratio;
  return out;
}

}  // namespace moran
