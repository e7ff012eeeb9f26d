#include "moran/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "moran/errors.hpp"
#include "moran/metric.hpp"

namespace moran {

namespace {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

Ray draw_ray(const MoranSpec& spec, int N, std::uint64_t stream) {
  std::mt19937_64 rng(stream);
  Ray r;
  r.truncation = N;
  int depth = spec.cut_depth(N);
  r.word.digits.reserve(depth);
  for (int k = 1; k <= depth; ++k) {
    int branch = spec.rule_at_depth(k).branch;
    r.word.digits.push_back(static_cast<int32_t>(rng() % static_cast<std::uint64_t>(branch)) + 1);
  }
  return r;
}

}  // namespace

std::vector<Ray> sample_rays(const MoranSpec& spec, int N, long long count, std::uint64_t seed) {
  std::vector<Ray> out;
  out.reserve(count > 0 ? count : 0);
  for (long long i = 0; i < count; ++i)
    out.push_back(draw_ray(spec, N, mix64(seed ^ mix64(static_cast<std::uint64_t>(i) + 1))));
  return out;
}

std::vector<Ray> all_rays(const MoranSpec& spec, int N) {
  LevelSet cut = level_cut(spec, N);
  std::vector<Ray> out;
  out.reserve(cut.words.size());
  for (auto& w : cut.words) out.push_back(Ray{std::move(w), N});
  return out;
}

std::vector<std::pair<Ray, Ray>> sample_ray_pairs(const MoranSpec& spec, int N, long long count,
                                                  std::uint64_t seed) {
  std::vector<std::pair<Ray, Ray>> out;
  out.reserve(count > 0 ? count : 0);
  for (long long i = 0; i < count; ++i) {
    Ray a = draw_ray(spec, N, mix64(seed ^ mix64(static_cast<std::uint64_t>(2 * i) + 1)));
    Ray b = draw_ray(spec, N, mix64(seed ^ mix64(static_cast<std::uint64_t>(2 * i + 1) + 1)));
    out.emplace_back(std::move(a), std::move(b));
  }
  return out;
}

double BoundaryPointApprox::error_bound() const {
  return std::sqrt(rational_double(error_bound_sq));
}

BoundaryPointApprox phi(const MoranSpec& spec, const Ray& ray) {
  return phi(spec, ray, spec.base.barycenter());
}

BoundaryPointApprox phi(const MoranSpec& spec, const Ray& ray, const std::vector<Rational>& x0) {
  if (spec.approximate)
    throw PreconditionError("boundary points need exact homothety-mode geometry");
  if (static_cast<int>(x0.size()) != spec.dim)
    throw ConfigError("base point has the wrong dimension");
  HomothetyMap acc = HomothetyMap::identity(spec.dim);
  Word w;
  for (int32_t digit : ray.word.digits) {
    const auto& maps = spec.placements_for(w);
    if (digit < 1 || digit > static_cast<int32_t>(maps.size()))
      throw PreconditionError("ray digit out of range at depth " + std::to_string(w.depth() + 1));
    acc = acc.compose(maps[digit - 1].exact_map());
    w = w.child(digit);
  }
  BoundaryPointApprox out;
  out.point = acc.apply(x0);
  Rational rn = rational_pow(spec.r_inf, static_cast<unsigned>(ray.truncation));
  out.error_bound_sq = rn * rn * spec.base.diameter_sq();
  return out;
}

namespace {

Rational dist_sq(const std::vector<Rational>& p, const std::vector<Rational>& q) {
  Rational s(0);
  for (std::size_t t = 0; t < p.size(); ++t) {
    Rational d = p[t] - q[t];
    s += d * d;
  }
  return s;
}

}  // namespace

DistortionStats holder_ratio_stats(const AugTree& tree, const std::vector<Ray>& rays, double a,
                                   int k) {
  if (!(a > 0)) throw ConfigError("the visual parameter a must be positive");
  const MoranSpec& spec = *tree.spec;
  if (k < 0) k = max_horizontal_geodesic_length(tree, std::min(tree.max_level, 6));

  DistortionStats st;
  st.a = a;
  st.alpha = -std::log(rational_double(spec.r_inf)) / a;
  int N = rays.empty() ? tree.max_level : rays.front().truncation;
  st.depth = N;

  // Leaf vertices and boundary points, computed once per ray.
  std::vector<int32_t> leaf(rays.size());
  std::vector<std::vector<Rational>> pts(rays.size());
  for (std::size_t i = 0; i < rays.size(); ++i) {
    if (rays[i].truncation != N) throw PreconditionError("rays disagree on the truncation level");
    auto v = tree.find_on_level(N, rays[i].word);
    if (!v) throw PreconditionError("ray word is not a vertex of the built tree");
    leaf[i] = v->idx;
    pts[i] = phi(spec, rays[i]).point;
  }

  double lo = 0, hi = 0;
  bool have = false;
  long long used = 0, excluded = 0;
  std::int64_t count = static_cast<std::int64_t>(rays.size());
#ifdef _OPENMP
#pragma omp parallel
#endif
  {
    double tlo = 0, thi = 0;
    bool thave = false;
    long long tused = 0, texcl = 0;
#ifdef _OPENMP
#pragma omp for schedule(dynamic, 4) nowait
#endif
    for (std::int64_t i = 0; i < count; ++i) {
      for (std::int64_t j = i + 1; j < count; ++j) {
        HalfInt p = gromov_product_canonical(tree, {N, leaf[i]}, {N, leaf[j]});
        Rational d2 = dist_sq(pts[i], pts[j]);
        if (d2 == 0 || p.value() >= static_cast<double>(N - k)) {
          ++texcl;
          continue;
        }
        double rho = std::exp(-a * p.value());
        double ratio = std::pow(rho, st.alpha) / std::sqrt(rational_double(d2));
        if (!thave) {
          tlo = thi = ratio;
          thave = true;
        } else {
          tlo = std::min(tlo, ratio);
          thi = std::max(thi, ratio);
        }
        ++tused;
      }
    }
#ifdef _OPENMP
#pragma omp critical
#endif
    {
      used += tused;
      excluded += texcl;
      if (thave) {
        if (!have) {
          lo = tlo;
          hi = thi;
          have = true;
        } else {
          lo = std::min(lo, tlo);
          hi = std::max(hi, thi);
        }
      }
    }
  }
  st.pairs_used = used;
  st.pairs_excluded = excluded;
  st.min_ratio = lo;
  st.max_ratio = hi;
  return st;
}

Word tau_word(const AugTree& E, const AugTree& F, const SigmaMap& sE, const SigmaMap& sF,
              const Ray& ray) {
  if (!E.spec->same_vertical_structure(*F.spec))
    throw MismatchError("the two constructions have different vertical trees");
  int N = ray.truncation;
  if (N > sE.levels || N > sF.levels)
    throw PreconditionError("sigma maps are shallower than the ray");
  auto v = E.find_on_level(N, ray.word);
  if (!v) throw PreconditionError("ray word is not a vertex of the built tree");
  int32_t plain = sE.fwd[N][v->idx];
  int32_t target = sF.inv[N][plain];
  return F.word_of({N, target});
}

BoundaryPointApprox tau(const AugTree& E, const AugTree& F, const SigmaMap& sE, const SigmaMap& sF,
                        const Ray& ray) {
  return phi(*F.spec, Ray{tau_word(E, F, sE, sF, ray), ray.truncation});
}

int sigma_ray_lag(const AugTree& tree, const SigmaMap& sigma, const Ray& ray) {
  int N = ray.truncation;
  if (N > sigma.levels) throw PreconditionError("sigma maps are shallower than the ray");
  auto deep = tree.find_on_level(N, ray.word);
  if (!deep) throw PreconditionError("ray word is not a vertex of the built tree");
  const Word& wN = tree.word_of({N, sigma.fwd[N][deep->idx]});
  int lag = 0;
  for (int n = 1; n < N; ++n) {
    auto v = tree.find_on_level(n, ray.word.prefix(n));
    const Word& wn = tree.word_of({n, sigma.fwd[n][v->idx]});
    lag = std::max(lag, n - wn.common_prefix(wN));
  }
  return lag;
}

DistortionStats lipschitz_distortion(const AugTree& E, const AugTree& F, const SigmaMap& sE,
                                     const SigmaMap& sF,
                                     const std::vector<std::pair<Ray, Ray>>& pairs,
                                     const Rational& floor_mult) {
  DistortionStats st;
  if (pairs.empty()) return st;
  int N = pairs.front().first.truncation;
  st.depth = N;
  Rational rn = rational_pow(E.spec->r_inf, static_cast<unsigned>(N));
  Rational floor_sq = floor_mult * floor_mult * rn * rn * E.spec->base.diameter_sq();

  double lo = 0, hi = 0;
  bool have = false;
  for (const auto& [ra, rb] : pairs) {
    if (ra.truncation != N || rb.truncation != N)
      throw PreconditionError("rays disagree on the truncation level");
    Rational dE = dist_sq(phi(*E.spec, ra).point, phi(*E.spec, rb).point);
    if (dE <= floor_sq) {
      ++st.pairs_excluded;
      continue;
    }
    Rational dF = dist_sq(tau(E, F, sE, sF, ra).point, tau(E, F, sE, sF, rb).point);
    double ratio = std::sqrt(rational_double(dF) / rational_double(dE));
    if (!have) {
      lo = hi = ratio;
      have = true;
    } else {
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    ++st.pairs_used;
  }
  st.min_ratio = lo;
  st.max_ratio = hi;
  return st;
}

}  // namespace moran
