// moran: build and inspect Moran-set augmented trees from JSON constructions.
//
// JSON reports go to stdout, one human-readable summary line to stderr.
// Exit codes: 0 success, 1 domain failure (validation found violations),
// 2 input error, 3 rearrangeability precondition failed, 4 the two
// constructions are structurally incompatible.

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <string>

#include "moran/boundary.hpp"
#include "moran/errors.hpp"
#include "moran/metric.hpp"
#include "moran/rearrange.hpp"
#include "moran/report.hpp"
#include "moran/spec.hpp"
#include "moran/svg.hpp"
#include "moran/tree.hpp"

using namespace moran;
using nlohmann::json;

namespace {

struct Clock {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  long long ms() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - t0)
        .count();
  }
};

void emit(const std::string& cmd, const json& manifest, json payload) {
  payload["schema_version"] = kSchemaVersion;
  payload["command"] = cmd;
  payload["manifest"] = manifest;
  std::fputs(dump_report(payload).c_str(), stdout);
}

int fail(const std::string& cmd, const json& manifest, int code, const std::string& message,
         json witness = json()) {
  json err{{"code", code}, {"message", message}};
  if (!witness.is_null()) err["witness"] = std::move(witness);
  emit(cmd, manifest, json{{"error", std::move(err)}});
  std::fprintf(stderr, "moran %s: error: %s\n", cmd.c_str(), message.c_str());
  return code;
}

std::size_t vertex_budget(std::size_t flag_value) {
  if (const char* env = std::getenv("MORAN_MAX_VERTICES")) {
    char* end = nullptr;
    long long v = std::strtoll(env, &end, 10);
    if (end == env || *end != '\0' || v <= 0)
      throw ConfigError("MORAN_MAX_VERTICES must be a positive integer");
    return static_cast<std::size_t>(v);
  }
  return flag_value;
}

AugTree build(const MoranSpec& spec, int depth, bool brute, std::size_t budget) {
  BuildOptions o;
  o.max_level = depth;
  o.use_spatial_hash = !brute;
  o.max_vertices = vertex_budget(budget);
  return build_tree(spec, o);
}

VertexRef locate(const AugTree& t, const std::string& key) {
  Word w = Word::from_key(key);
  for (int n = 0; n <= t.max_level; ++n) {
    if (t.spec->cut_depth(n) != w.depth()) continue;
    if (auto v = t.find_on_level(n, w)) return *v;
    throw ConfigError("word '" + key + "' is not in the level-" + std::to_string(n) + " cut");
  }
  throw ConfigError("word '" + key + "' has no level cut within depth " +
                    std::to_string(t.max_level));
}

json rearrange_witness(const AugTree& tree, const RearrangeVerdict& v) {
  json w{{"verdict", v.verdict == Rearrangeable::No ? "no" : "undetermined"},
         {"reason", v.reason}};
  if (v.fail_level) {
    w["level"] = *v.fail_level;
    if (v.fail_component)
      w["component"] = tree.levels[*v.fail_level]->words[v.fail_component->members.front()].key();
    w["offspring_sizes"] = v.fail_sizes;
  }
  return w;
}

// Verdict + sigma for one side of the comparison pipeline; throws nothing,
// reports failure through the optional.
struct SigmaSide {
  AugTree tree;
  RearrangeVerdict verdict;
  SigmaMap sigma;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moran-set constructions: augmented trees, hyperbolicity, rearrangement"};
  app.require_subcommand(1);

  std::string spec_path, other_path, out_path, from_key, to_key, ray_key, word_key;
  std::string floor_mult = "2";
  int depth = 4, depth2 = 0, plan_levels = 3, threshold = 64;
  long long samples = 0, pairs = 1000;
  std::uint64_t seed = 1;
  std::size_t budget = 2'000'000;
  double a_flag = 0;
  bool brute = false, members = false, full = false;

  auto add_spec = [&](CLI::App* c) {
    c->add_option("spec", spec_path, "construction JSON file")->required();
  };
  auto add_depth = [&](CLI::App* c, const char* what) {
    c->add_option("--depth", depth, what);
  };
  auto add_budget = [&](CLI::App* c) {
    c->add_option("--budget", budget, "vertex budget (env MORAN_MAX_VERTICES overrides)");
  };

  CLI::App* c_validate = app.add_subcommand("validate", "check nesting, disjointness, ratios");
  add_spec(c_validate);
  add_depth(c_validate, "word depth to verify (default 4)");

  CLI::App* c_build = app.add_subcommand("build", "build the augmented tree, report per level");
  add_spec(c_build);
  add_depth(c_build, "deepest level cut (default 4)");
  add_budget(c_build);
  c_build->add_flag("--brute", brute, "all-pairs edge scan instead of the spatial hash");

  CLI::App* c_comp = app.add_subcommand("components", "horizontal components per level");
  add_spec(c_comp);
  add_depth(c_comp, "deepest level cut (default 4)");
  add_budget(c_comp);
  c_comp->add_flag("--members", members, "list member words, not just sizes");

  CLI::App* c_geo = app.add_subcommand("geodesic", "canonical geodesic between two words");
  add_spec(c_geo);
  add_depth(c_geo, "deepest level cut (default 4)");
  add_budget(c_geo);
  c_geo->add_option("--from", from_key, "word key, e.g. 1.2.1")->required();
  c_geo->add_option("--to", to_key, "word key")->required();
  c_geo->add_option("-a", a_flag, "visual parameter for rho_a (omit to skip)");

  CLI::App* c_diag = app.add_subcommand("diagnose", "horizontal bound k, delta, condition (H)");
  add_spec(c_diag);
  add_depth(c_diag, "deepest level cut (default 4)");
  add_budget(c_diag);
  c_diag->add_option("--samples", samples, "triples for the delta estimate (0: exhaustive window)");
  c_diag->add_option("--seed", seed, "sampling seed");
  c_diag->add_option("-a", a_flag, "check this visual parameter instead of the default");

  CLI::App* c_re = app.add_subcommand("rearrange", "equal-total offspring grouping verdict");
  add_spec(c_re);
  add_depth(c_re, "deepest level cut (default 4)");
  add_budget(c_re);
  c_re->add_option("--plan-levels", plan_levels, "levels of grouping plans to list (default 3)");
  c_re->add_option("--threshold", threshold, "reject components larger than this (default 64)");

  CLI::App* c_sig = app.add_subcommand("sigma", "build the near-isometry and audit it");
  add_spec(c_sig);
  add_depth(c_sig, "deepest level cut (default 4)");
  add_budget(c_sig);
  c_sig->add_flag("--full", full, "emit the complete per-level image table");
  c_sig->add_option("--word", word_key, "report the image of this word");
  c_sig->add_option("--threshold", threshold, "component size limit (default 64)");

  CLI::App* c_map = app.add_subcommand("map", "boundary point of a truncated ray");
  add_spec(c_map);
  add_depth(c_map, "truncation level (default 4)");
  add_budget(c_map);
  c_map->add_option("--ray", ray_key, "deepest word of the ray")->required();

  CLI::App* c_lip = app.add_subcommand("lipschitz",
                                       "distortion of the boundary map between two constructions");
  c_lip->add_option("source", spec_path, "source construction JSON")->required();
  c_lip->add_option("target", other_path, "target construction JSON")->required();
  add_depth(c_lip, "truncation level (default 4)");
  add_budget(c_lip);
  c_lip->add_option("--samples", pairs, "ray pairs to draw (default 1000)");
  c_lip->add_option("--seed", seed, "sampling seed");
  c_lip->add_option("-a", a_flag, "also report the source Holder band at this parameter");
  c_lip->add_option("--depth2", depth2, "second truncation level for a stability comparison");
  c_lip->add_option("--floor-mult", floor_mult,
                    "noise floor multiplier as a rational (default 2)");

  CLI::App* c_render = app.add_subcommand("render", "SVG picture of the levels and edges");
  add_spec(c_render);
  add_depth(c_render, "deepest level cut (default 4)");
  add_budget(c_render);
  c_render->add_option("--out", out_path, "output SVG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string cmd = sub->get_name();
  Clock clock;
  json manifest{{"tool_version", kToolVersion}};

  try {
    manifest["spec_path"] = spec_path;
    manifest["spec_fingerprint"] = file_fingerprint(spec_path);
    manifest["depth"] = depth;
    if (sub == c_lip) {
      manifest["target_path"] = other_path;
      manifest["target_fingerprint"] = file_fingerprint(other_path);
      manifest["samples"] = pairs;
      manifest["seed"] = seed;
      if (depth2 > 0) manifest["depth2"] = depth2;
    }
    if (sub == c_diag) {
      manifest["samples"] = samples;
      manifest["seed"] = seed;
    }

    MoranSpec spec = parse_spec_file(spec_path);

    if (sub == c_validate) {
      ValidationReport rep = validate_spec(spec, depth);
      emit(cmd, manifest, validate_report(rep, depth));
      std::fprintf(stderr, "moran validate: %s, %lld words checked in %lld ms\n",
                   rep.valid ? "valid" : "INVALID", rep.words_checked, clock.ms());
      return rep.valid ? 0 : 1;
    }

    if (sub == c_build) {
      AugTree t = build(spec, depth, brute, budget);
      emit(cmd, manifest, build_report(t));
      std::fprintf(stderr, "moran build: %zu vertices, %zu edges, levels 0..%d in %lld ms\n",
                   static_cast<std::size_t>(t.vertex_count()),
                   static_cast<std::size_t>(t.edge_count()), t.max_level, clock.ms());
      return 0;
    }

    if (sub == c_comp) {
      AugTree t = build(spec, depth, false, budget);
      emit(cmd, manifest, components_report(t, members));
      std::fprintf(stderr, "moran components: levels 0..%d in %lld ms\n", t.max_level, clock.ms());
      return 0;
    }

    if (sub == c_geo) {
      AugTree t = build(spec, depth, false, budget);
      VertexRef x = locate(t, from_key), y = locate(t, to_key);
      std::optional<double> a;
      if (c_geo->count("-a")) a = a_flag;
      emit(cmd, manifest, geodesic_report(t, x, y, a));
      std::fprintf(stderr, "moran geodesic: %s -> %s in %lld ms\n", from_key.c_str(),
                   to_key.c_str(), clock.ms());
      return 0;
    }

    if (sub == c_diag) {
      AugTree t = build(spec, depth, false, budget);
      DiagnoseOptions o;
      o.delta_samples = samples;
      o.seed = seed;
      if (c_diag->count("-a")) o.a = a_flag;
      DiagnoseReport rep = diagnose(t, o);
      emit(cmd, manifest, diagnose_report(rep));
      std::fprintf(stderr, "moran diagnose: k=%d delta=%g in %lld ms\n", rep.k,
                   rep.delta.value(), clock.ms());
      return 0;
    }

    if (sub == c_re) {
      AugTree t = build(spec, depth, false, budget);
      RearrangeVerdict v = is_rearrangeable(t, depth, threshold);
      emit(cmd, manifest, rearrange_report(t, v, plan_levels));
      const char* verdict = v.verdict == Rearrangeable::Yes  ? "yes-at-depth"
                            : v.verdict == Rearrangeable::No ? "no"
                                                             : "undetermined";
      std::fprintf(stderr, "moran rearrange: %s (levels 0..%d) in %lld ms\n", verdict,
                   v.levels_checked, clock.ms());
      return 0;
    }

    if (sub == c_sig) {
      AugTree t = build(spec, depth, false, budget);
      RearrangeVerdict v = is_rearrangeable(t, depth, threshold);
      if (v.verdict != Rearrangeable::Yes)
        return fail(cmd, manifest, 3, "not rearrangeable at depth " + std::to_string(depth),
                    rearrange_witness(t, v));
      SigmaMap s = build_sigma(t, v, depth);
      int dev_levels = std::min(depth, 5);
      int k = max_horizontal_geodesic_length(t, std::min(depth, 6));
      DeviationStats dev = near_isometry_deviation(t, s, dev_levels, k);
      json rep = sigma_report(t, s, dev, full);
      if (!word_key.empty()) {
        VertexRef x = locate(t, word_key);
        rep["word"] = word_key;
        rep["image"] = t.levels[x.level]->words[s.fwd[x.level][x.idx]].key();
      }
      emit(cmd, manifest, rep);
      std::fprintf(stderr, "moran sigma: levels 0..%d, deviation %d <= %d in %lld ms\n", s.levels,
                   dev.max_deviation, dev.bound, clock.ms());
      return 0;
    }

    if (sub == c_map) {
      if (spec.approximate)
        return fail(cmd, manifest, 2, "boundary points need exact arithmetic; "
                                      "this construction uses float mode");
      Word w = Word::from_key(ray_key);
      if (w.depth() != spec.cut_depth(depth))
        return fail(cmd, manifest, 2,
                    "ray word depth " + std::to_string(w.depth()) + " does not match the level-" +
                        std::to_string(depth) + " cut depth " +
                        std::to_string(spec.cut_depth(depth)));
      Ray ray{w, depth};
      BoundaryPointApprox pt = phi(spec, ray);
      emit(cmd, manifest, map_report(ray, pt));
      std::fprintf(stderr, "moran map: ray %s at level %d in %lld ms\n", ray_key.c_str(), depth,
                   clock.ms());
      return 0;
    }

    if (sub == c_lip) {
      MoranSpec other = parse_spec_file(other_path);
      if (spec.approximate || other.approximate)
        return fail(cmd, manifest, 2, "boundary comparison needs exact arithmetic");
      int top = std::max(depth, depth2);
      AugTree E = build(spec, top, false, budget);
      AugTree F = build(other, top, false, budget);
      // Identify levels by word order; possible only when the counts agree.
      // Ratio-schedule differences surface later, when the boundary map is
      // asked to respect the metric.
      for (int n = 0; n <= top; ++n)
        if (E.levels[n]->words.size() != F.levels[n]->words.size())
          return fail(cmd, manifest, 4,
                      "level " + std::to_string(n) + " has " +
                          std::to_string(E.levels[n]->words.size()) + " vertices in the source, " +
                          std::to_string(F.levels[n]->words.size()) + " in the target");
      RearrangeVerdict vE = is_rearrangeable(E, top, threshold);
      if (vE.verdict != Rearrangeable::Yes)
        return fail(cmd, manifest, 3,
                    "source not rearrangeable at depth " + std::to_string(top),
                    rearrange_witness(E, vE));
      RearrangeVerdict vF = is_rearrangeable(F, top, threshold);
      if (vF.verdict != Rearrangeable::Yes)
        return fail(cmd, manifest, 3,
                    "target not rearrangeable at depth " + std::to_string(top),
                    rearrange_witness(F, vF));
      SigmaMap sE = build_sigma(E, vE, top), sF = build_sigma(F, vF, top);
      Rational fm = parse_rational(floor_mult);
      auto run_depth = [&](int N) {
        auto ps = sample_ray_pairs(spec, N, pairs, seed);
        return lipschitz_distortion(E, F, sE, sF, ps, fm);
      };
      DistortionStats st = run_depth(depth);
      json rep;
      rep["stats"] = distortion_json(st);
      rep["floor_mult"] = floor_mult;
      if (depth2 > 0) {
        DistortionStats st2 = run_depth(depth2);
        rep["stats2"] = distortion_json(st2);
        rep["max_ratio_change"] =
            st.max_ratio > 0 ? std::abs(st2.max_ratio - st.max_ratio) / st.max_ratio : 0.0;
      }
      if (c_lip->count("-a")) {
        auto rays = sample_rays(spec, depth, pairs, seed);
        rep["holder_source"] = distortion_json(holder_ratio_stats(E, rays, a_flag));
      }
      emit(cmd, manifest, rep);
      std::fprintf(stderr, "moran lipschitz: ratios [%g, %g] over %lld pairs in %lld ms\n",
                   st.min_ratio, st.max_ratio, st.pairs_used, clock.ms());
      return 0;
    }

    if (sub == c_render) {
      AugTree t = build(spec, depth, false, budget);
      SvgStats svg_stats;
      std::string svg = render_svg(t, &svg_stats);
      std::ofstream out(out_path, std::ios::binary);
      if (!out) throw ConfigError("cannot write " + out_path);
      out << svg;
      out.close();
      json rep{{"out", out_path},
               {"cells", svg_stats.cells},
               {"arcs", svg_stats.arcs},
               {"width", svg_stats.width},
               {"height", svg_stats.height},
               {"svg_fingerprint", file_fingerprint(out_path)}};
      emit(cmd, manifest, rep);
      std::fprintf(stderr, "moran render: %d cells, %d arcs -> %s in %lld ms\n", svg_stats.cells,
                   svg_stats.arcs, out_path.c_str(), clock.ms());
      return 0;
    }
  } catch (const ValidationError& e) {
    return fail(cmd, manifest, 1, e.what());
  } catch (const MismatchError& e) {
    return fail(cmd, manifest, 4, e.what());
  } catch (const PreconditionError& e) {
    return fail(cmd, manifest, 3, e.what());
  } catch (const ConfigError& e) {
    return fail(cmd, manifest, 2, e.what());
  } catch (const std::exception& e) {
    return fail(cmd, manifest, 1, e.what());
  }
  return 2;
}
