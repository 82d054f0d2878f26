#pragma once

#include <vector>

#include "warpcert/errors.hpp"
#include "warpcert/types.hpp"

namespace warpcert::warp {

/// Quintic smoothstep sigma(x) = 6x^5 - 15x^4 + 10x^3 on [0,1].
/// sigma(0)=0, sigma(1)=1 and the first two derivatives vanish at both ends.
template <typename Scalar>
Scalar smoothstep(Scalar x) {
  return x * x * x * (Scalar(10) + x * (Scalar(-15) + Scalar(6) * x));
}

/// d sigma / dx = 30 x^2 (1-x)^2; maximum 15/8 at x = 1/2.
template <typename Scalar>
Scalar smoothstep_deriv(Scalar x) {
  const Scalar y = x * (Scalar(1) - x);
  return Scalar(30) * y * y;
}

/// Antiderivative with S(0) = 0: S(x) = x^6 - 3x^5 + 2.5x^4; S(1) = 1/2.
template <typename Scalar>
Scalar smoothstep_integral(Scalar x) {
  const Scalar x2 = x * x;
  return x2 * x2 * (x2 - Scalar(3) * x + Scalar(2.5));
}

/// Family of level warping factors h_i(r) = exp(-u_i(r)), i = 1..degree.
///
/// The log-slope u_i' ramps from the common cap a = degree (for r <= -rho)
/// down to the level exponent alpha_i = i (for r >= rho) through a quintic
/// smoothstep, so each h_i is convex decreasing, C^3 across the gluing
/// radii, exactly exponential outside [-rho, rho], and the log-curvature
/// obeys |u_i''| <= 2 * degree * epsilon.
struct WarpProfile {
  int degree = 1;        ///< nilpotency degree k; also the slope cap a = k
  double epsilon = 0.25; ///< pinching slack
  double rho = 2.0;      ///< ramp half-width, max(2, 15/(32 epsilon))

  double slope_cap() const { return static_cast<double>(degree); }
  double exponent(int level) const { return static_cast<double>(level); }
};

/// Builds the profile for nilpotency degree k >= 1 and epsilon > 0.
WarpProfile build_profile(int degree, double epsilon);

/// u_i = -ln h_i with first and second radial derivatives.
template <typename Scalar>
struct LogWarp {
  Scalar u, du, ddu;
};

template <typename Scalar>
LogWarp<Scalar> eval_log(const WarpProfile& p, int level, Scalar r) {
  const Scalar a(p.slope_cap());
  const Scalar alpha(p.exponent(level));
  const Scalar rho(p.rho);
  if (r >= rho) return {alpha * r, alpha, Scalar(0)};
  if (r <= -rho) return {a * r, a, Scalar(0)};
  const Scalar width = Scalar(2) * rho;
  const Scalar x = (r + rho) / width;
  const Scalar gap = alpha - a;
  return {a * r + gap * width * smoothstep_integral(x),
          a + gap * smoothstep(x), gap * smoothstep_deriv(x) / width};
}

/// h, h' and h'' at radius r: h = e^{-u}, h' = -u' h, h'' = (u'^2 - u'') h.
struct WarpValues {
  double h, dh, ddh;
};

WarpValues eval_h(const WarpProfile& p, int level, double r);

/// Margins observed when verifying the profile over a radius grid.
struct ProfileReport {
  double min_slope = 0.0;      ///< min over levels/grid of u_i'
  double max_slope = 0.0;      ///< max over levels/grid of u_i'
  double max_log_curv = 0.0;   ///< max |u_i''| observed
  double log_curv_bound = 0.0; ///< permitted bound 2 k epsilon
  double max_sum_ratio = 0.0;  ///< max of sum_{m>=i+j} h_m / (k h_i h_j), r >= rho
  bool pass = false;
};

/// Checks h' < 0 < h'', alpha_i <= u_i' <= a, |u_i''| <= 2 k epsilon, and
/// the tail summation estimate sum_{m >= i+j} h_m <= k h_i h_j at grid
/// points r >= rho. The grid must reach past both gluing radii by 2.
/// Throws ProfileViolation on failure.
ProfileReport profile_check(const WarpProfile& p, const std::vector<double>& grid);

/// Symmetric grid over [-rho - tail, rho + tail]: `interior_step` spacing
/// inside the ramp, `tail_step` outside, gluing radii always included.
std::vector<double> default_grid(const WarpProfile& p, double tail = 4.0,
                                 double interior_step = 0.05,
                                 double tail_step = 0.25);

}  // namespace warpcert::warp
