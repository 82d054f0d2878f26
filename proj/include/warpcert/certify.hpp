#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "warpcert/curvature.hpp"
#include "warpcert/errors.hpp"
#include "warpcert/types.hpp"

namespace warpcert::certify {

/// Symmetric curvature operator on bivectors: pairs (a < b) in lexicographic
/// order, entries M[(ab),(cd)] = R_{abdc}, signed so that diagonal entries
/// are the sectional curvatures of coordinate planes and, for orthonormal
/// U, V, sec(U, V) = omega^T M omega with omega_(ab) = U_a V_b - U_b V_a.
Matrix curvature_operator(const curvature::CurvatureTensor& R);

/// Extreme eigenvalues (min, max) of the curvature operator; these bound
/// every sectional curvature. Throws EigenFailure if the solver fails.
std::pair<double, double> operator_envelope(const curvature::CurvatureTensor& R);

/// An orthonormal 2-plane together with its sectional curvature.
struct PlaneExtreme {
  double value = 0.0;
  Vector u, v;
};

struct SectionalRange {
  double lambda_min = 0.0, lambda_max = 0.0;  ///< operator envelope
  double sec_min = 0.0, sec_max = 0.0;        ///< sampled plane extremes
  PlaneExtreme argmin, argmax;
};

/// Envelope plus multi-start extremization of sec over orthonormal pairs:
/// projected gradient on the Stiefel set with polar retraction and Armijo
/// backtracking, `restarts` seeded starts (ascent and descent share each
/// start), convergence at projected-gradient norm < 1e-10. The RNG stream
/// of restart t is derive_stream(seed, stream, t), so results do not depend
/// on evaluation order.
SectionalRange sectional_range(const curvature::CurvatureTensor& R,
                               std::uint64_t seed = 0, std::uint64_t stream = 0,
                               int restarts = 32);

struct CertRow {
  double r = 0.0;
  double lambda_min = 0.0, lambda_max = 0.0;
  double sec_min = 0.0, sec_max = 0.0;
};

/// Behaviour of max |R - limit| over the outermost four grid points of one
/// side: deviations[0] is the innermost of the four, deviations[3] the
/// outermost; `monotone` is the componentwise non-increase toward the end.
struct TailSide {
  bool monotone = false;
  std::vector<double> deviations;
};

struct TailReport {
  TailSide left, right;
  double limit_min = 0.0, limit_max = 0.0;  ///< limit-tensor envelope at the ends
  bool limit_within = false;
  bool monotone() const { return left.monotone && right.monotone; }
};

struct PinchCertificate {
  std::string algebra;
  int k = 1;
  double epsilon = 0.0, rho = 0.0, s = 1.0, tol = 0.0;
  std::uint64_t seed = 0;
  double target_min = 0.0, target_max = 0.0;  ///< -(k+eps)^2 - tol, -1 + tol
  std::vector<CertRow> rows;
  TailReport tails;
  double global_min = 0.0, global_max = 0.0;
  double ratio = 0.0;                    ///< global_min / global_max
  double theoretical_lower_bound = 1.0;  ///< k^2, the floor the ratio respects
  bool verdict = false;
  std::string blocking;  ///< first violated bound, empty when passing
};

/// Certifies sec within [-(k+eps)^2 - tol, -1 + tol] over the grid via the
/// eigen envelope (optimizer extremes are reported as evidence), and closes
/// the tails by monotone approach to the limit tensor. The grid must be
/// strictly increasing, span [-(rho+4), rho+4], keep spacing <= 0.1 inside
/// the ramp and <= 0.5 on the tails. Throws ParseError on a bad grid,
/// TailNotMonotone when the rows pass but the tail approach is not settled
/// (verdict withheld), EigenFailure from the envelope.
PinchCertificate certify_pinching(const curvature::FramedMetric& metric,
                                  const std::vector<double>& r_grid, double tol,
                                  std::uint64_t seed = 0, int threads = 1);

struct ScaleSearch {
  double s = 1.0;
  PinchCertificate certificate;
  std::vector<double> scanned;  ///< scales tried, in order, last one passing
};

/// Doubles s from 1 until certify_pinching passes, using a fail-fast
/// envelope-only scan at intermediate scales (blocks of 64 rows, so the
/// outcome is independent of thread count). Throws ScaleExhausted with the
/// last blocking bound when s_max is exceeded.
ScaleSearch find_s(const algebra::GradedFrame& frame,
                   const warp::WarpProfile& profile,
                   const std::vector<double>& r_grid, double tol,
                   double s_max = 1048576.0, std::uint64_t seed = 0,
                   int threads = 1);

struct SweepRow {
  double epsilon = 0.0, s = 1.0, ratio = 0.0, k_squared = 1.0;
  bool pass = false;
};

struct SweepTable {
  int k = 1;
  std::vector<SweepRow> rows;
  std::vector<PinchCertificate> certificates;
};

/// For each epsilon (positive, strictly descending) builds a profile, runs
/// find_s, and records the achieved ratio; a row passes when the
/// certificate passes and the ratio lies in [k^2 - tol, (k+eps)^2 + tol].
/// ScaleExhausted propagates from the failing row.
SweepTable epsilon_sweep(const algebra::GradedFrame& frame,
                         const std::vector<double>& eps_list, double tol,
                         double s_max = 1048576.0, std::uint64_t seed = 0,
                         int threads = 1);

struct DecayFit {
  double slope = 0.0;
  double max_residual = 0.0;  ///< max |log gap - fit| over the points
  std::vector<std::pair<double, double>> points;  ///< (s, off-pattern max)
};

/// Least-squares slope of log(off-pattern max |R|) against log s at fixed
/// r >= rho; s_list must be geometric with at least five entries. Throws
/// DegenerateFit when every gap is below 1e-14 (exact-zero case, e.g.
/// abelian algebras).
DecayFit s_decay_check(const algebra::GradedFrame& frame,
                       const warp::WarpProfile& profile,
                       const std::vector<double>& s_list, double r);

}  // namespace warpcert::certify
