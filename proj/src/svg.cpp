#include "moran/svg.hpp"
#include <algorithm>

#include <cstdarg>
#include <cstdio>
#include <vector>

#include "moran/errors.hpp"

namespace moran {

namespace {

void appendf(std::string& out, const char* fmt, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  out += buf;
}

double qd(const Rational& q) { return q.convert_to<double>(); }

// Screen-space interval of a vertex along one axis, both geometry modes.
void axis_range(const AugTree& tree, int level, int32_t v, int axis, double& lo, double& hi) {
  const TreeLevel& lv = *tree.levels[level];
  if (tree.approximate) {
    lo = lv.fshapes[v].aabb_lo[axis];
    hi = lv.fshapes[v].aabb_hi[axis];
  } else {
    lo = qd(lv.box_lo[static_cast<size_t>(v) * tree.spec->dim + axis]);
    hi = qd(lv.box_hi[static_cast<size_t>(v) * tree.spec->dim + axis]);
  }
}

const char* kPalette[6] = {"#7a7a7a", "#4a7ab5", "#4aa57a", "#b5884a", "#9a5ab5", "#b54a5a"};

}  // namespace

std::string render_svg(const AugTree& tree, SvgStats* stats) {
  int d = tree.spec->dim;
  if (d != 1 && d != 2) throw ConfigError("rendering supports dimensions 1 and 2 only");

  SvgStats st;
  std::string out;
  const double margin = 30.0;
  int L = tree.max_level;

  if (d == 1) {
    const double W = 840.0, bar = 24.0, stride = 44.0;
    st.width = static_cast<int>(W + 2 * margin);
    st.height = static_cast<int>(2 * margin + L * stride + bar);
    double wlo, whi;
    axis_range(tree, 0, 0, 0, wlo, whi);
    double scale = W / (whi - wlo);
    auto sx = [&](double t) { return margin + (t - wlo) * scale; };

    appendf(out,
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"%d\" "
            "height=\"%d\" viewBox=\"0 0 %d %d\">\n",
            st.width, st.height, st.width, st.height);
    for (int n = 0; n <= L; ++n) {
      double y = margin + n * stride;
      appendf(out, "<text x=\"4.0000\" y=\"%.4f\" font-size=\"12\" fill=\"#444444\">%d</text>\n",
              y + 16.0, n);
      const TreeLevel& lv = *tree.levels[n];
      for (int32_t v = 0; v < static_cast<int32_t>(lv.words.size()); ++v) {
        double lo, hi;
        axis_range(tree, n, v, 0, lo, hi);
        const char* cls = n == 0 ? "base" : "cell";
        const char* fill = n == 0 ? "#e8e8e8" : "#6c9ecf";
        const char* stroke = n == 0 ? "#666666" : "#24405e";
        appendf(out,
                "<rect class=\"%s\" x=\"%.4f\" y=\"%.4f\" width=\"%.4f\" height=\"%.4f\" "
                "fill=\"%s\" stroke=\"%s\" stroke-width=\"0.6\"/>\n",
                cls, sx(lo), y, (hi - lo) * scale, bar, fill, stroke);
        if (n > 0) ++st.cells;
      }
      for (int32_t u = 0; u < static_cast<int32_t>(lv.adj.size()); ++u)
        for (int32_t v : lv.adj[u]) {
          if (v <= u) continue;
          double alo, ahi, blo, bhi;
          axis_range(tree, n, u, 0, alo, ahi);
          axis_range(tree, n, v, 0, blo, bhi);
          double cu = sx((alo + ahi) / 2), cv = sx((blo + bhi) / 2);
          appendf(out,
                  "<path class=\"arc\" d=\"M %.4f %.4f Q %.4f %.4f %.4f %.4f\" fill=\"none\" "
                  "stroke=\"#cc3333\" stroke-width=\"0.8\"/>\n",
                  cu, y, (cu + cv) / 2, y - 14.0, cv, y);
          ++st.arcs;
        }
    }
    out += "</svg>\n";
  } else {
    const double W = 720.0;
    st.width = st.height = static_cast<int>(W + 2 * margin);
    double wx0, wx1, wy0, wy1;
    axis_range(tree, 0, 0, 0, wx0, wx1);
    axis_range(tree, 0, 0, 1, wy0, wy1);
    double scale = W / std::max(wx1 - wx0, wy1 - wy0);
    double padx = (W - (wx1 - wx0) * scale) / 2, pady = (W - (wy1 - wy0) * scale) / 2;
    auto sx = [&](double t) { return margin + padx + (t - wx0) * scale; };
    auto sy = [&](double t) { return margin + pady + (wy1 - t) * scale; };

    appendf(out,
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"%d\" "
            "height=\"%d\" viewBox=\"0 0 %d %d\">\n",
            st.width, st.height, st.width, st.height);
    for (int n = 0; n <= L; ++n) {
      const TreeLevel& lv = *tree.levels[n];
      for (int32_t v = 0; v < static_cast<int32_t>(lv.words.size()); ++v) {
        const char* cls = n == 0 ? "base" : "cell";
        std::string style;
        if (n == 0)
          style = "fill=\"#f4f4f4\" stroke=\"#666666\" stroke-width=\"1.0\"";
        else if (n == L)
          style = "fill=\"#6c9ecf\" fill-opacity=\"0.35\" stroke=\"#24405e\" stroke-width=\"0.7\"";
        else
          style = std::string("fill=\"none\" stroke=\"") + kPalette[n % 6] +
                  "\" stroke-width=\"0.7\"";
        if (tree.approximate) {
          const PolyShape& p = lv.fshapes[v];
          appendf(out, "<polygon class=\"%s\" points=\"", cls);
          for (size_t i = 0; i + 1 < p.pts.size(); i += 2)
            appendf(out, "%s%.4f,%.4f", i ? " " : "", sx(p.pts[i]), sy(p.pts[i + 1]));
          appendf(out, "\" %s/>\n", style.c_str());
        } else {
          double lox, hix, loy, hiy;
          axis_range(tree, n, v, 0, lox, hix);
          axis_range(tree, n, v, 1, loy, hiy);
          appendf(out,
                  "<rect class=\"%s\" x=\"%.4f\" y=\"%.4f\" width=\"%.4f\" height=\"%.4f\" %s/>\n",
                  cls, sx(lox), sy(hiy), (hix - lox) * scale, (hiy - loy) * scale, style.c_str());
        }
        if (n > 0) ++st.cells;
      }
    }
    const TreeLevel& deep = *tree.levels[L];
    for (int32_t u = 0; u < static_cast<int32_t>(deep.adj.size()); ++u)
      for (int32_t v : deep.adj[u]) {
        if (v <= u) continue;
        double ux0, ux1, uy0, uy1, vx0, vx1, vy0, vy1;
        axis_range(tree, L, u, 0, ux0, ux1);
        axis_range(tree, L, u, 1, uy0, uy1);
        axis_range(tree, L, v, 0, vx0, vx1);
        axis_range(tree, L, v, 1, vy0, vy1);
        appendf(out,
                "<line class=\"arc\" x1=\"%.4f\" y1=\"%.4f\" x2=\"%.4f\" y2=\"%.4f\" "
                "stroke=\"#cc3333\" stroke-width=\"0.8\"/>\n",
                sx((ux0 + ux1) / 2), sy((uy0 + uy1) / 2), sx((vx0 + vx1) / 2),
                sy((vy0 + vy1) / 2));
        ++st.arcs;
      }
    out += "</svg>\n";
  }

  if (stats) *stats = st;
  return out;
}

}  // namespace moran
