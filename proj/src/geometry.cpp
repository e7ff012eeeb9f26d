#include "moran/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "moran/errors.hpp"

namespace moran {

bool BoxRegion::degenerate() const {
  for (int t = 0; t < dim(); ++t)
    if (lo[t] == hi[t]) return true;
  return false;
}

bool BoxRegion::contains(const BoxRegion& inner) const {
  for (int t = 0; t < dim(); ++t)
    if (inner.lo[t] < lo[t] || inner.hi[t] > hi[t]) return false;
  return true;
}

bool BoxRegion::intersects(const BoxRegion& other) const {
  for (int t = 0; t < dim(); ++t)
    if (lo[t] > other.hi[t] || other.lo[t] > hi[t]) return false;
  return true;
}

bool BoxRegion::interiors_overlap(const BoxRegion& other) const {
  for (int t = 0; t < dim(); ++t) {
    Rational l = std::max(lo[t], other.lo[t]);
    Rational h = std::min(hi[t], other.hi[t]);
    if (!(l < h)) return false;
  }
  return true;
}

std::optional<BoxRegion> BoxRegion::intersection(const BoxRegion& other) const {
  BoxRegion out;
  out.lo.resize(dim());
  out.hi.resize(dim());
  for (int t = 0; t < dim(); ++t) {
    out.lo[t] = std::max(lo[t], other.lo[t]);
    out.hi[t] = std::min(hi[t], other.hi[t]);
    if (out.lo[t] > out.hi[t]) return std::nullopt;
  }
  return out;
}

Rational BoxRegion::diameter_sq() const {
  Rational s(0);
  for (int t = 0; t < dim(); ++t) {
    Rational e = extent(t);
    s += e * e;
  }
  return s;
}

std::vector<Rational> BoxRegion::barycenter() const {
  std::vector<Rational> c(dim());
  for (int t = 0; t < dim(); ++t) c[t] = (lo[t] + hi[t]) / 2;
  return c;
}

Rational box_distance_sq(const BoxRegion& a, const BoxRegion& b) {
  Rational s(0);
  for (int t = 0; t < a.dim(); ++t) {
    Rational gap(0);
    if (a.hi[t] < b.lo[t])
      gap = b.lo[t] - a.hi[t];
    else if (b.hi[t] < a.lo[t])
      gap = a.lo[t] - b.hi[t];
    s += gap * gap;
  }
  return s;
}

std::vector<Rational> HomothetyMap::apply(const std::vector<Rational>& x) const {
  std::vector<Rational> y(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) y[t] = scale * x[t] + offset[t];
  return y;
}

BoxRegion HomothetyMap::apply_box(const BoxRegion& b) const {
  BoxRegion out;
  out.lo = apply(b.lo);
  out.hi = apply(b.hi);
  return out;
}

HomothetyMap HomothetyMap::compose(const HomothetyMap& inner) const {
  HomothetyMap out;
  out.scale = scale * inner.scale;
  out.offset.resize(offset.size());
  for (std::size_t t = 0; t < offset.size(); ++t)
    out.offset[t] = scale * inner.offset[t] + offset[t];
  return out;
}

HomothetyMap HomothetyMap::identity(int dim) {
  return HomothetyMap{Rational(1), std::vector<Rational>(dim, Rational(0))};
}

std::vector<double> AffineMapF::apply(const std::vector<double>& x) const {
  int d = dim();
  std::vector<double> y(d, 0.0);
  for (int i = 0; i < d; ++i) {
    double acc = 0;
    for (int j = 0; j < d; ++j) acc += rot[i * d + j] * x[j];
    y[i] = scale * acc + trans[i];
  }
  return y;
}

AffineMapF AffineMapF::compose(const AffineMapF& inner) const {
  int d = dim();
  AffineMapF out;
  out.scale = scale * inner.scale;
  out.rot.assign(d * d, 0.0);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double acc = 0;
      for (int k = 0; k < d; ++k) acc += rot[i * d + k] * inner.rot[k * d + j];
      out.rot[i * d + j] = acc;
    }
  out.trans = apply(inner.trans);
  return out;
}

AffineMapF AffineMapF::identity(int dim) {
  AffineMapF m;
  m.scale = 1.0;
  m.rot.assign(dim * dim, 0.0);
  for (int i = 0; i < dim; ++i) m.rot[i * dim + i] = 1.0;
  m.trans.assign(dim, 0.0);
  return m;
}

PolyShape map_box_f(const AffineMapF& m, const BoxRegion& base) {
  PolyShape p;
  p.dim = base.dim();
  if (p.dim == 1) {
    double a = m.scale * m.rot[0] * rational_double(base.lo[0]) + m.trans[0];
    double b = m.scale * m.rot[0] * rational_double(base.hi[0]) + m.trans[0];
    p.pts = {std::min(a, b), std::max(a, b)};
    p.aabb_lo = {p.pts[0]};
    p.aabb_hi = {p.pts[1]};
    return p;
  }
  if (p.dim != 2) throw ConfigError("general-mode geometry supports d <= 2");
  double xs[2] = {rational_double(base.lo[0]), rational_double(base.hi[0])};
  double ys[2] = {rational_double(base.lo[1]), rational_double(base.hi[1])};
  // Ring order: (lo,lo) (hi,lo) (hi,hi) (lo,hi).
  int order[4][2] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  p.aabb_lo = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  p.aabb_hi = {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (auto& o : order) {
    auto q = m.apply({xs[o[0]], ys[o[1]]});
    p.pts.push_back(q[0]);
    p.pts.push_back(q[1]);
    for (int t = 0; t < 2; ++t) {
      p.aabb_lo[t] = std::min(p.aabb_lo[t], q[t]);
      p.aabb_hi[t] = std::max(p.aabb_hi[t], q[t]);
    }
  }
  return p;
}

namespace {

double seg_point_dist2(double ax, double ay, double bx, double by, double px, double py) {
  double dx = bx - ax, dy = by - ay;
  double len2 = dx * dx + dy * dy;
  double t = len2 > 0 ? ((px - ax) * dx + (py - ay) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  double cx = ax + t * dx - px, cy = ay + t * dy - py;
  return cx * cx + cy * cy;
}

bool quad_contains(const std::vector<double>& q, double px, double py) {
  // Convex ring; point is inside iff on the same side of every edge.
  int sign = 0;
  for (int i = 0; i < 4; ++i) {
    int j = (i + 1) % 4;
    double cross = (q[2 * j] - q[2 * i]) * (py - q[2 * i + 1]) -
                   (q[2 * j + 1] - q[2 * i + 1]) * (px - q[2 * i]);
    if (cross != 0) {
      int s = cross > 0 ? 1 : -1;
      if (sign == 0)
        sign = s;
      else if (s != sign)
        return false;
    }
  }
  return true;
}

}  // namespace

double poly_distance(const PolyShape& a, const PolyShape& b) {
  if (a.dim == 1) {
    double gap = std::max(b.pts[0] - a.pts[1], a.pts[0] - b.pts[1]);
    return std::max(gap, 0.0);
  }
  if (quad_contains(a.pts, b.pts[0], b.pts[1]) || quad_contains(b.pts, a.pts[0], a.pts[1]))
    return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i) {
    int j = (i + 1) % 4;
    for (int v = 0; v < 4; ++v) {
      best = std::min(best, seg_point_dist2(a.pts[2 * i], a.pts[2 * i + 1], a.pts[2 * j],
                                            a.pts[2 * j + 1], b.pts[2 * v], b.pts[2 * v + 1]));
      best = std::min(best, seg_point_dist2(b.pts[2 * i], b.pts[2 * i + 1], b.pts[2 * j],
                                            b.pts[2 * j + 1], a.pts[2 * v], a.pts[2 * v + 1]));
    }
  }
  return std::sqrt(best);
}

HomothetyMap Similitude::exact_map() const {
  if (!homothety()) throw PreconditionError("exact map requested for a general-mode similitude");
  return HomothetyMap{ratio, offset()};
}

AffineMapF Similitude::float_map() const {
  AffineMapF m;
  if (homothety()) {
    int d = static_cast<int>(offset().size());
    m = AffineMapF::identity(d);
    m.scale = rational_double(ratio);
    for (int t = 0; t < d; ++t) m.trans[t] = rational_double(offset()[t]);
    return m;
  }
  const auto& g = general();
  m.scale = rational_double(ratio);
  m.rot = g.rot;
  m.trans = g.trans;
  return m;
}

}  // namespace moran
