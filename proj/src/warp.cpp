#include "warpcert/warp.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace warpcert::warp {

WarpProfile build_profile(int degree, double epsilon) {
  if (degree < 1) throw ProfileViolation("nilpotency degree must be >= 1");
  if (!(epsilon > 0.0)) throw ProfileViolation("epsilon must be positive");
  WarpProfile p;
  p.degree = degree;
  p.epsilon = epsilon;
  p.rho = std::max(2.0, 15.0 / (32.0 * epsilon));
  return p;
}

WarpValues eval_h(const WarpProfile& p, int level, double r) {
  if (level < 1 || level > p.degree)
    throw IndexError("warp level out of range");
  const LogWarp<double> lw = eval_log(p, level, r);
  const double h = std::exp(-lw.u);
  return {h, -lw.du * h, (lw.du * lw.du - lw.ddu) * h};
}

ProfileReport profile_check(const WarpProfile& p, const std::vector<double>& grid) {
  if (grid.size() < 2) throw ProfileViolation("profile grid too small");
  const double lo = *std::min_element(grid.begin(), grid.end());
  const double hi = *std::max_element(grid.begin(), grid.end());
  if (lo > -p.rho - 2.0 + 1e-12 || hi < p.rho + 2.0 - 1e-12)
    throw ProfileViolation("profile grid must extend 2 past both gluing radii");

  ProfileReport rep;
  rep.min_slope = p.slope_cap();
  rep.max_slope = 1.0;
  rep.log_curv_bound = 2.0 * p.degree * p.epsilon;

  std::ostringstream why;
  for (int i = 1; i <= p.degree; ++i) {
    const double alpha = p.exponent(i);
    for (double r : grid) {
      const LogWarp<double> lw = eval_log(p, i, r);
      const WarpValues hv = eval_h(p, i, r);
      if (!(hv.h > 0.0)) why << "h_" << i << "(" << r << ") not positive; ";
      if (!(hv.dh < 0.0)) why << "h_" << i << "'(" << r << ") not negative; ";
      if (!(hv.ddh > 0.0)) why << "h_" << i << "''(" << r << ") not positive; ";
      if (lw.du < alpha - 1e-12 || lw.du > p.slope_cap() + 1e-12)
        why << "u_" << i << "'(" << r << ") outside [alpha_i, a]; ";
      rep.min_slope = std::min(rep.min_slope, lw.du);
      rep.max_slope = std::max(rep.max_slope, lw.du);
      rep.max_log_curv = std::max(rep.max_log_curv, std::abs(lw.ddu));
    }
  }
  if (rep.max_log_curv > rep.log_curv_bound + 1e-12)
    why << "|u''| exceeds 2 k epsilon; ";

  // Tail estimate: for r >= rho every level ratio h_m / (h_i h_j) with
  // m >= i + j equals exp(-(m - i - j) r) <= 1, so the sum over the at
  // most k admissible levels is bounded by k h_i h_j.
  for (double r : grid) {
    if (r < p.rho - 1e-12) continue;
    for (int i = 1; i <= p.degree; ++i) {
      for (int j = 1; j <= p.degree; ++j) {
        double sum = 0.0;
        for (int m = i + j; m <= p.degree; ++m) sum += eval_h(p, m, r).h;
        const double bound =
            p.degree * eval_h(p, i, r).h * eval_h(p, j, r).h;
        if (bound > 0.0)
          rep.max_sum_ratio = std::max(rep.max_sum_ratio, sum / bound);
        if (sum > bound * (1.0 + 1e-12))
          why << "summation estimate fails at r=" << r << " (i=" << i
              << ", j=" << j << "); ";
      }
    }
  }

  const std::string msg = why.str();
  if (!msg.empty()) throw ProfileViolation("profile check failed: " + msg);
  rep.pass = true;
  return rep;
}

std::vector<double> default_grid(const WarpProfile& p, double tail,
                                 double interior_step, double tail_step) {
  // Mirror-symmetric mesh: an integer number of equal cells on [0, rho] and
  // on [rho, rho + tail], reflected through 0, so +-rho and the endpoints
  // land exactly on grid points and spacing never exceeds the requested steps.
  const double rho = p.rho;
  const long m = static_cast<long>(std::ceil(rho / interior_step - 1e-12));
  const long t = static_cast<long>(std::ceil(tail / tail_step - 1e-12));
  const double hi = rho / static_cast<double>(m);
  const double ht = tail / static_cast<double>(t);
  std::vector<double> half;
  for (long j = 1; j <= m; ++j) half.push_back(static_cast<double>(j) * hi);
  half.back() = rho;
  for (long j = 1; j <= t; ++j) half.push_back(rho + static_cast<double>(j) * ht);
  half.back() = rho + tail;
  std::vector<double> grid;
  grid.reserve(2 * half.size() + 1);
  for (auto it = half.rbegin(); it != half.rend(); ++it) grid.push_back(-*it);
  grid.push_back(0.0);
  grid.insert(grid.end(), half.begin(), half.end());
  return grid;
}

}  // namespace warpcert::warp
