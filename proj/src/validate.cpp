#include <cmath>
#include <functional>

#include "moran/errors.hpp"
#include "moran/spec.hpp"

namespace moran {

namespace {

std::string interval_text(const BoxRegion& b) {
  std::string s;
  for (int t = 0; t < b.dim(); ++t) {
    if (t) s += " x ";
    s += "(" + rational_str(b.lo[t]) + ", " + rational_str(b.hi[t]) + ")";
  }
  return s;
}

double poly_diam(const PolyShape& p) {
  if (p.dim == 1) return p.pts[1] - p.pts[0];
  double best = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      double dx = p.pts[2 * i] - p.pts[2 * j], dy = p.pts[2 * i + 1] - p.pts[2 * j + 1];
      best = std::max(best, std::hypot(dx, dy));
    }
  return best;
}

}  // namespace

ValidationReport validate_spec(const MoranSpec& spec, int word_depth) {
  if (word_depth < 1) throw ConfigError("validation depth must be >= 1");
  if (spec.words_at_depth(word_depth) > 5'000'000)
    throw ConfigError("validation depth exceeds the word budget");

  ValidationReport report;
  report.approximate = spec.approximate;
  for (std::size_t i = 0; i < spec.levels.size(); ++i) {
    const LevelRule& rule = spec.levels[i];
    Rational vol = rational_pow(rule.ratio, static_cast<unsigned>(spec.dim)) * rule.branch;
    if (vol > 1)
      report.warnings.push_back("levels[" + std::to_string(i) + "]: n*r^d = " +
                                rational_str(vol) + " > 1, children cannot tile the parent");
  }
  const std::size_t kMaxViolations = 100;

  if (!spec.approximate) {
    // Walk parents depth-first carrying the exact accumulated map.
    std::function<void(const Word&, const HomothetyMap&, int)> walk =
        [&](const Word& parent, const HomothetyMap& acc, int depth_left) {
          if (depth_left == 0) return;
          BoxRegion pbox = acc.apply_box(spec.base);
          const auto& maps = spec.placements_for(parent);
          std::vector<HomothetyMap> child_maps;
          std::vector<BoxRegion> child_boxes;
          Rational r = spec.rule_at_depth(parent.depth() + 1).ratio;
          for (const auto& s : maps) {
            HomothetyMap cm = acc.compose(s.exact_map());
            child_maps.push_back(cm);
            child_boxes.push_back(cm.apply_box(spec.base));
          }
          for (std::size_t j = 0; j < child_boxes.size(); ++j) {
            ++report.words_checked;
            if (!pbox.contains(child_boxes[j]) && report.violations.size() < kMaxViolations)
              report.violations.push_back({Violation::Kind::Containment, parent,
                                           static_cast<int>(j + 1), 0,
                                           "child box " + interval_text(child_boxes[j]) +
                                               " leaves parent " + interval_text(pbox)});
            if (child_boxes[j].diameter_sq() != r * r * pbox.diameter_sq() &&
                report.violations.size() < kMaxViolations)
              report.violations.push_back({Violation::Kind::Ratio, parent,
                                           static_cast<int>(j + 1), 0,
                                           "child diameter is not the parent's scaled by " +
                                               rational_str(r)});
            for (std::size_t l = j + 1; l < child_boxes.size(); ++l) {
              if (child_boxes[j].interiors_overlap(child_boxes[l]) &&
                  report.violations.size() < kMaxViolations) {
                auto inter = child_boxes[j].intersection(child_boxes[l]);
                report.violations.push_back({Violation::Kind::Overlap, parent,
                                             static_cast<int>(j + 1), static_cast<int>(l + 1),
                                             "overlap interval " + interval_text(*inter)});
              }
            }
          }
          for (std::size_t j = 0; j < child_maps.size(); ++j)
            walk(parent.child(static_cast<int32_t>(j + 1)), child_maps[j], depth_left - 1);
        };
    walk(Word{}, HomothetyMap::identity(spec.dim), word_depth);
  } else {
    std::function<void(const Word&, const AffineMapF&, int)> walk =
        [&](const Word& parent, const AffineMapF& acc, int depth_left) {
          if (depth_left == 0) return;
          PolyShape pshape = map_box_f(acc, spec.base);
          double eps = spec.rule_at_depth(parent.depth() + 1).epsilon;
          if (eps <= 0) eps = 1e-12;
          const auto& maps = spec.placements_for(parent);
          double r = rational_double(spec.rule_at_depth(parent.depth() + 1).ratio);
          std::vector<AffineMapF> child_maps;
          std::vector<PolyShape> child_shapes;
          for (const auto& s : maps) {
            AffineMapF cm = acc.compose(s.float_map());
            child_maps.push_back(cm);
            child_shapes.push_back(map_box_f(cm, spec.base));
          }
          for (std::size_t j = 0; j < child_shapes.size(); ++j) {
            ++report.words_checked;
            bool inside = true;
            for (int t = 0; t < spec.dim; ++t)
              inside = inside && child_shapes[j].aabb_lo[t] >= pshape.aabb_lo[t] - eps &&
                       child_shapes[j].aabb_hi[t] <= pshape.aabb_hi[t] + eps;
            if (!inside && report.violations.size() < kMaxViolations)
              report.violations.push_back({Violation::Kind::Containment, parent,
                                           static_cast<int>(j + 1), 0,
                                           "child leaves parent (beyond epsilon)"});
            double want = r * poly_diam(pshape);
            if (std::abs(poly_diam(child_shapes[j]) - want) > eps + 1e-9 * want &&
                report.violations.size() < kMaxViolations)
              report.violations.push_back({Violation::Kind::Ratio, parent,
                                           static_cast<int>(j + 1), 0,
                                           "child diameter off by more than epsilon"});
            for (std::size_t l = j + 1; l < child_shapes.size(); ++l) {
              // Overlap deeper than epsilon: shrink test via AABB penetration.
              bool deep = true;
              for (int t = 0; t < spec.dim; ++t) {
                double pen = std::min(child_shapes[j].aabb_hi[t], child_shapes[l].aabb_hi[t]) -
                             std::max(child_shapes[j].aabb_lo[t], child_shapes[l].aabb_lo[t]);
                if (pen <= eps) deep = false;
              }
              if (deep && poly_distance(child_shapes[j], child_shapes[l]) == 0 &&
                  report.violations.size() < kMaxViolations)
                report.violations.push_back({Violation::Kind::Overlap, parent,
                                             static_cast<int>(j + 1), static_cast<int>(l + 1),
                                             "children overlap beyond epsilon"});
            }
          }
          for (std::size_t j = 0; j < child_maps.size(); ++j)
            walk(parent.child(static_cast<int32_t>(j + 1)), child_maps[j], depth_left - 1);
        };
    walk(Word{}, AffineMapF::identity(spec.dim), word_depth);
  }

  report.valid = report.violations.empty();
  return report;
}

}  // namespace moran
