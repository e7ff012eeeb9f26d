#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "moran/rearrange.hpp"
#include "moran/spec.hpp"
#include "moran/tree.hpp"

namespace moran {

// A truncated geodesic ray: the index word of its deepest level cut. Prefixes
// of the word give the vertex at every shallower cut.
struct Ray {
  Word word;
  int truncation = 0;  // level N; word depth is the cut depth of N
};

// `count` rays with digits drawn uniformly per step. Each ray uses its own
// substream of the seed, so deepening N extends every ray instead of
// reshuffling the list.
std::vector<Ray> sample_rays(const MoranSpec& spec, int N, long long count, std::uint64_t seed);

// Every ray of the level-N cut, in word order.
std::vector<Ray> all_rays(const MoranSpec& spec, int N);

// `count` ray pairs; pair i draws from substreams 2i and 2i+1.
std::vector<std::pair<Ray, Ray>> sample_ray_pairs(const MoranSpec& spec, int N, long long count,
                                                  std::uint64_t seed);

struct BoundaryPointApprox {
  std::vector<Rational> point;
  Rational error_bound_sq;  // squared radius r^(2N) * diam(J)^2, exact
  double error_bound() const;
};

// S_w(x0) for the ray's word, with the telescoping error bound. x0 defaults
// to the barycenter of the base box. Homothety mode only.
BoundaryPointApprox phi(const MoranSpec& spec, const Ray& ray);
BoundaryPointApprox phi(const MoranSpec& spec, const Ray& ray, const std::vector<Rational>& x0);

struct DistortionStats {
  int depth = 0;
  double a = 0;
  double alpha = 0;
  long long pairs_used = 0;
  long long pairs_excluded = 0;
  double min_ratio = 0;
  double max_ratio = 0;
};

// Band statistics of rho_a(xi, eta)^alpha / |phi(xi) - phi(eta)| over ray
// pairs. Pairs with equal images are excluded, as are pairs whose Gromov
// product is >= N - k where truncation no longer pins the product
// (k: measured horizontal bound; pass -1 to measure it here).
DistortionStats holder_ratio_stats(const AugTree& tree, const std::vector<Ray>& rays, double a,
                                   int k = -1);

// sigma_F^{-1}(sigma_E(deepest word)), the image vertex word in F.
Word tau_word(const AugTree& E, const AugTree& F, const SigmaMap& sE, const SigmaMap& sF,
              const Ray& ray);

// Boundary image under tau = phi_F o sigma_F^{-1} o sigma_E, evaluated at the
// truncation depth.
BoundaryPointApprox tau(const AugTree& E, const AugTree& F, const SigmaMap& sE, const SigmaMap& sF,
                        const Ray& ray);

// How far the levelwise sigma images of the ray's prefixes drift from being
// prefixes of the deepest image: max over n of n - |common prefix of
// image(u_n) and image(u_N)|. Bounded by the near-isometry constant; the
// images are generally not literal prefixes of one another.
int sigma_ray_lag(const AugTree& tree, const SigmaMap& sigma, const Ray& ray);

// |tau(xi) - tau(eta)| / |phi_E(xi) - phi_E(eta)| over the given pairs.
// Pairs with E-distance inside the truncation noise floor
// floor_mult * r^N * diam(J) are excluded.
DistortionStats lipschitz_distortion(const AugTree& E, const AugTree& F, const SigmaMap& sE,
                                     const SigmaMap& sF,
                                     const std::vector<std::pair<Ray, Ray>>& pairs,
                                     const Rational& floor_mult = Rational(2));

}  // namespace moran
