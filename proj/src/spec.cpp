#include "moran/spec.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "moran/errors.hpp"

namespace moran {

using nlohmann::json;

namespace {

Rational json_rational(const json& v, const std::string& where) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<long long>());
  if (v.is_number_unsigned()) return Rational(v.get<unsigned long long>());
  throw ConfigError(where + ": rationals must be \"p/q\" strings or integers");
}

std::vector<Rational> json_rational_vec(const json& v, int dim, const std::string& where) {
  if (!v.is_array() || static_cast<int>(v.size()) != dim)
    throw ConfigError(where + ": expected an array of " + std::to_string(dim) + " rationals");
  std::vector<Rational> out;
  out.reserve(dim);
  for (const auto& e : v) out.push_back(json_rational(e, where));
  return out;
}

std::vector<Similitude> parse_offsets(const json& arr, const LevelRule& rule, int dim,
                                      const std::string& where) {
  if (!arr.is_array() || static_cast<int>(arr.size()) != rule.branch)
    throw ConfigError(where + ": expected " + std::to_string(rule.branch) + " offset vectors");
  std::vector<Similitude> maps;
  maps.reserve(rule.branch);
  for (std::size_t j = 0; j < arr.size(); ++j) {
    Similitude s;
    s.ratio = rule.ratio;
    s.placement = json_rational_vec(arr[j], dim, where + "[" + std::to_string(j) + "]");
    maps.push_back(std::move(s));
  }
  return maps;
}

void check_orthogonal(const std::vector<double>& rot, int d, const std::string& where) {
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double dot = 0;
      for (int k = 0; k < d; ++k) dot += rot[k * d + i] * rot[k * d + j];
      double want = i == j ? 1.0 : 0.0;
      if (std::abs(dot - want) > 1e-9)
        throw ConfigError(where + ": matrix is not orthogonal");
    }
}

std::vector<Similitude> parse_general_maps(const json& arr, const LevelRule& rule, int dim,
                                           const std::string& where) {
  if (dim > 2) throw ConfigError(where + ": general mode supports dimensions 1 and 2 only");
  if (!arr.is_array() || static_cast<int>(arr.size()) != rule.branch)
    throw ConfigError(where + ": expected " + std::to_string(rule.branch) + " maps");
  std::vector<Similitude> maps;
  for (std::size_t j = 0; j < arr.size(); ++j) {
    const auto& m = arr[j];
    std::string mw = where + "[" + std::to_string(j) + "]";
    if (!m.is_object() || !m.contains("rot") || !m.contains("trans"))
      throw ConfigError(mw + ": each map needs 'rot' and 'trans'");
    GeneralPlacement g;
    const auto& rot = m["rot"];
    if (!rot.is_array() || static_cast<int>(rot.size()) != dim)
      throw ConfigError(mw + ".rot: expected " + std::to_string(dim) + " rows");
    for (const auto& row : rot) {
      if (!row.is_array() || static_cast<int>(row.size()) != dim)
        throw ConfigError(mw + ".rot: rows must have " + std::to_string(dim) + " entries");
      for (const auto& e : row) g.rot.push_back(e.get<double>());
    }
    check_orthogonal(g.rot, dim, mw + ".rot");
    const auto& tr = m["trans"];
    if (!tr.is_array() || static_cast<int>(tr.size()) != dim)
      throw ConfigError(mw + ".trans: expected " + std::to_string(dim) + " entries");
    for (const auto& e : tr) g.trans.push_back(e.get<double>());
    Similitude s;
    s.ratio = rule.ratio;
    s.placement = std::move(g);
    maps.push_back(std::move(s));
  }
  return maps;
}

}  // namespace

const LevelRule& MoranSpec::rule_at_depth(int k) const {
  if (k < 1) throw ConfigError("rule depth must be >= 1");
  int s = static_cast<int>(levels.size());
  if (k <= s) return levels[k - 1];
  if (!repeat_from)
    throw ConfigError("depth " + std::to_string(k) + " exceeds the configured " +
                      std::to_string(s) + " levels and there is no repeat_from");
  int rf = *repeat_from;
  int p = s - rf;
  return levels[rf + (k - 1 - rf) % p];
}

int MoranSpec::period() const {
  return repeat_from ? static_cast<int>(levels.size()) - *repeat_from : 0;
}

Rational MoranSpec::prefix_product(int k) const {
  Rational p(1);
  for (int j = 1; j <= k; ++j) p *= rule_at_depth(j).ratio;
  return p;
}

int MoranSpec::cut_depth(int n) const {
  if (n < 0) throw ConfigError("level index must be >= 0");
  if (n == 0) return 0;
  Rational target = rational_pow(r_inf, static_cast<unsigned>(n));
  Rational p(1);
  int k = 0;
  while (p > target) {
    ++k;
    if (k > 100000) throw ConfigError("level cut did not terminate");
    p *= rule_at_depth(k).ratio;
  }
  return k;
}

BigInt MoranSpec::words_at_depth(int k) const {
  BigInt c(1);
  for (int j = 1; j <= k; ++j) c *= rule_at_depth(j).branch;
  return c;
}

const std::vector<Similitude>& MoranSpec::placements_for(const Word& parent) const {
  const LevelRule& rule = rule_at_depth(parent.depth() + 1);
  if (rule.mode == PlacementMode::PerWord) {
    auto it = rule.per_word.find(parent);
    if (it == rule.per_word.end())
      throw ConfigError("per-word table has no entry for parent '" + parent.key() + "'");
    return it->second;
  }
  return rule.uniform;
}

bool MoranSpec::same_vertical_structure(const MoranSpec& other) const {
  bool inf_a = repeat_from.has_value(), inf_b = other.repeat_from.has_value();
  if (inf_a != inf_b) return false;
  int sa = static_cast<int>(levels.size()), sb = static_cast<int>(other.levels.size());
  int horizon;
  if (inf_a) {
    int pa = period(), pb = other.period();
    horizon = std::max(sa, sb) + 2 * std::lcm(pa, pb);
  } else {
    if (sa != sb) return false;
    horizon = sa;
  }
  for (int k = 1; k <= horizon; ++k) {
    const LevelRule& a = rule_at_depth(k);
    const LevelRule& b = other.rule_at_depth(k);
    if (a.branch != b.branch || a.ratio != b.ratio) return false;
  }
  return true;
}

MoranSpec parse_spec(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("JSON parse error: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("top-level config must be an object");
  if (root.contains("schema_version") && root["schema_version"].get<int>() != 1)
    throw ConfigError("unsupported schema_version");

  MoranSpec spec;
  if (!root.contains("name") || !root["name"].is_string())
    throw ConfigError("name: required string");
  spec.name = root["name"].get<std::string>();

  if (!root.contains("dimension") || !root["dimension"].is_number_integer())
    throw ConfigError("dimension: required integer");
  spec.dim = root["dimension"].get<int>();
  if (spec.dim < 1 || spec.dim > 8) throw ConfigError("dimension: must be in [1, 8]");

  if (!root.contains("base") || !root["base"].is_object())
    throw ConfigError("base: required object with lo/hi");
  spec.base.lo = json_rational_vec(root["base"]["lo"], spec.dim, "base.lo");
  spec.base.hi = json_rational_vec(root["base"]["hi"], spec.dim, "base.hi");
  for (int t = 0; t < spec.dim; ++t)
    if (!(spec.base.lo[t] < spec.base.hi[t]))
      throw ConfigError("base: lo < hi required on every axis (the base box needs interior)");

  if (!root.contains("levels") || !root["levels"].is_array() || root["levels"].empty())
    throw ConfigError("levels: required non-empty array");

  if (root.contains("repeat_from")) {
    int rf = root["repeat_from"].get<int>();
    if (rf < 0 || rf >= static_cast<int>(root["levels"].size()))
      throw ConfigError("repeat_from: out of range");
    spec.repeat_from = rf;
  }

  int idx = 0;
  for (const auto& lv : root["levels"]) {
    std::string where = "levels[" + std::to_string(idx) + "]";
    LevelRule rule;
    if (!lv.is_object() || !lv.contains("n") || !lv.contains("r"))
      throw ConfigError(where + ": each level needs 'n' and 'r'");
    rule.branch = lv["n"].get<int>();
    if (rule.branch < 2) throw ConfigError(where + ".n: branch count must be >= 2");
    rule.ratio = json_rational(lv["r"], where + ".r");
    if (!(rule.ratio > 0 && rule.ratio < 1))
      throw ConfigError(where + ".r: ratio must lie in (0,1)");
    if (spec.dim == 1 && Rational(rule.branch) * rule.ratio > 1)
      throw ConfigError(where + ": n*r = " + rational_str(Rational(rule.branch) * rule.ratio) +
                        " > 1 is impossible in dimension 1");

    if (!lv.contains("placements") || !lv["placements"].is_object())
      throw ConfigError(where + ".placements: required object");
    const auto& pl = lv["placements"];
    std::string mode = pl.value("mode", "");
    if (mode == "uniform") {
      rule.mode = PlacementMode::Uniform;
      rule.uniform = parse_offsets(pl["offsets"], rule, spec.dim, where + ".placements.offsets");
    } else if (mode == "per_word") {
      rule.mode = PlacementMode::PerWord;
      if (!pl.contains("table") || !pl["table"].is_object())
        throw ConfigError(where + ".placements.table: required object");
      bool in_repeat = spec.repeat_from && idx >= *spec.repeat_from;
      if (in_repeat)
        throw ConfigError(where + ": per-word tables cannot sit inside the repeating block");
      for (const auto& [key, val] : pl["table"].items()) {
        Word parent = Word::from_key(key);
        rule.per_word[parent] =
            parse_offsets(val, rule, spec.dim, where + ".placements.table['" + key + "']");
      }
    } else if (mode == "seeded") {
      rule.mode = PlacementMode::Seeded;
      rule.seeded_gap = json_rational(pl["gap"], where + ".placements.gap");
      if (rule.seeded_gap < 0) throw ConfigError(where + ".placements.gap: must be >= 0");
      rule.seeded_seed = pl["seed"].get<std::uint64_t>();
    } else if (mode == "general") {
      rule.mode = PlacementMode::General;
      rule.epsilon = pl.value("epsilon", 0.0);
      if (!(rule.epsilon > 0))
        throw ConfigError(where + ".placements.epsilon: general mode needs epsilon > 0");
      rule.uniform = parse_general_maps(pl["maps"], rule, spec.dim, where + ".placements.maps");
      spec.approximate = true;
    } else {
      throw ConfigError(where + ".placements.mode: expected uniform | per_word | seeded | general");
    }
    spec.levels.push_back(std::move(rule));
    ++idx;
  }

  // Per-word tables must cover exactly the parents at their depth.
  for (std::size_t i = 0; i < spec.levels.size(); ++i) {
    if (spec.levels[i].mode != PlacementMode::PerWord) continue;
    BigInt parents = spec.words_at_depth(static_cast<int>(i));
    if (BigInt(spec.levels[i].per_word.size()) != parents)
      throw ConfigError("levels[" + std::to_string(i) + "].placements.table: expected " +
                        parents.str() + " parent entries, got " +
                        std::to_string(spec.levels[i].per_word.size()));
    for (const auto& [parent, maps] : spec.levels[i].per_word) {
      (void)maps;
      if (parent.depth() != static_cast<int>(i))
        throw ConfigError("levels[" + std::to_string(i) + "].placements.table: key '" +
                          parent.key() + "' is not a depth-" + std::to_string(i) + " word");
      for (int j = 0; j < parent.depth(); ++j)
        if (parent.digits[j] < 1 || parent.digits[j] > spec.levels[j].branch)
          throw ConfigError("levels[" + std::to_string(i) + "].placements.table: key '" +
                            parent.key() + "' has out-of-range digits");
    }
  }

  spec.r_inf = spec.levels[0].ratio;
  for (const auto& r : spec.levels) spec.r_inf = std::min(spec.r_inf, r.ratio);
  spec.constant_ratio = std::all_of(spec.levels.begin(), spec.levels.end(),
                                    [&](const LevelRule& r) { return r.ratio == spec.r_inf; });

  // Resolve seeded rules deterministically from their configured seeds.
  bool any_seeded = std::any_of(spec.levels.begin(), spec.levels.end(),
                                [](const LevelRule& r) { return r.mode == PlacementMode::Seeded; });
  if (any_seeded) {
    MoranSpec resolved = random_spec(spec, 0);  // 0 = keep per-rule seeds
    return resolved;
  }
  return spec;
}

MoranSpec parse_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open spec file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str());
}

namespace {

json rational_json(const Rational& q) { return rational_str(q); }

json rational_vec_json(const std::vector<Rational>& v) {
  json arr = json::array();
  for (const auto& q : v) arr.push_back(rational_json(q));
  return arr;
}

}  // namespace

std::string spec_to_json(const MoranSpec& spec) {
  json root;
  root["schema_version"] = 1;
  root["name"] = spec.name;
  root["dimension"] = spec.dim;
  root["base"]["lo"] = rational_vec_json(spec.base.lo);
  root["base"]["hi"] = rational_vec_json(spec.base.hi);
  if (spec.repeat_from) root["repeat_from"] = *spec.repeat_from;
  json levels = json::array();
  for (const auto& rule : spec.levels) {
    json lv;
    lv["n"] = rule.branch;
    lv["r"] = rational_json(rule.ratio);
    json pl;
    switch (rule.mode) {
      case PlacementMode::Uniform:
      case PlacementMode::Seeded: {
        // Seeded rules serialize in resolved form.
        pl["mode"] = "uniform";
        json offs = json::array();
        for (const auto& s : rule.uniform) offs.push_back(rational_vec_json(s.offset()));
        pl["offsets"] = offs;
        break;
      }
      case PlacementMode::PerWord: {
        pl["mode"] = "per_word";
        json table = json::object();
        for (const auto& [parent, maps] : rule.per_word) {
          json offs = json::array();
          for (const auto& s : maps) offs.push_back(rational_vec_json(s.offset()));
          table[parent.key()] = offs;
        }
        pl["table"] = table;
        break;
      }
      case PlacementMode::General: {
        pl["mode"] = "general";
        pl["epsilon"] = rule.epsilon;
        json maps = json::array();
        for (const auto& s : rule.uniform) {
          const auto& g = s.general();
          json rows = json::array();
          int d = spec.dim;
          for (int i = 0; i < d; ++i) {
            json row = json::array();
            for (int j = 0; j < d; ++j) row.push_back(g.rot[i * d + j]);
            rows.push_back(row);
          }
          maps.push_back(json{{"rot", rows}, {"trans", g.trans}});
        }
        pl["maps"] = maps;
        break;
      }
    }
    lv["placements"] = pl;
    levels.push_back(lv);
  }
  root["levels"] = levels;
  return root.dump(2) + "\n";
}

std::string spec_hash(const MoranSpec& spec) {
  std::string bytes = spec_to_json(spec);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string("fnv1a:") + buf;
}

LevelSet level_cut(const MoranSpec& spec, int n, std::int64_t max_words) {
  LevelSet out;
  out.n = n;
  out.depth = spec.cut_depth(n);
  if (spec.words_at_depth(out.depth) > max_words)
    throw ConfigError("level cut " + std::to_string(n) + " exceeds the word budget");
  out.words.reserve(spec.words_at_depth(out.depth).convert_to<std::size_t>());
  Word w;
  if (out.depth == 0) {
    out.words.push_back(w);
    return out;
  }
  // Depth-first lexicographic enumeration of all depth-k words.
  w.digits.assign(1, 1);
  while (true) {
    if (w.depth() == out.depth) {
      out.words.push_back(w);
      while (!w.digits.empty() &&
             w.digits.back() == spec.rule_at_depth(w.depth()).branch)
        w.digits.pop_back();
      if (w.digits.empty()) break;
      ++w.digits.back();
    } else {
      w.digits.push_back(1);
    }
  }
  return out;
}

std::optional<int> level_of_word(const MoranSpec& spec, const Word& w) {
  int k = w.depth();
  for (int j = 1; j <= k; ++j)
    if (w.digits[j - 1] < 1 || w.digits[j - 1] > spec.rule_at_depth(j).branch)
      throw ConfigError("word '" + w.key() + "' is not valid for this spec");
  if (k == 0) return 0;
  Rational pk = spec.prefix_product(k);
  Rational pk1 = spec.prefix_product(k - 1);
  // Find n with pk <= r^n < pk1.
  Rational rn(1);
  int n = 0;
  while (rn >= pk) {
    Rational next = rn * spec.r_inf;
    if (rn < pk1 && rn >= pk) return n;
    rn = next;
    ++n;
    if (n > 1000000) throw ConfigError("level search did not terminate");
  }
  return std::nullopt;
}

Word level_ancestor(const MoranSpec& spec, const Word& w) {
  auto n = level_of_word(spec, w);
  if (!n || *n < 1)
    throw ConfigError("word '" + w.key() + "' does not lie on a level cut with index >= 1");
  // Uniqueness: exactly one proper prefix must land on cut n-1.
  std::optional<Word> found;
  for (int len = 0; len < w.depth(); ++len) {
    Word p = w.prefix(len);
    auto m = level_of_word(spec, p);
    if (m && *m == *n - 1) {
      if (found)
        throw ConfigError("ancestor of '" + w.key() + "' on the previous cut is not unique");
      found = p;
    }
  }
  if (!found)
    throw ConfigError("word '" + w.key() + "' has no prefix on the previous cut");
  return *found;
}

}  // namespace moran
