#include "warpcert/certify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <functional>
#include <sstream>
#include <thread>
#include <utility>

#include "warpcert/rng.hpp"

namespace warpcert::certify {

using rng::derive_stream;
using rng::SplitMix64;

namespace {

std::vector<std::pair<Index, Index>> plane_pairs(Index N) {
  std::vector<std::pair<Index, Index>> pairs;
  pairs.reserve(static_cast<size_t>(N * (N - 1) / 2));
  for (Index a = 0; a < N; ++a)
    for (Index b = a + 1; b < N; ++b) pairs.emplace_back(a, b);
  return pairs;
}

/// Runs fn(0..count-1) on up to `threads` workers with a fixed cyclic
/// assignment. Worker exceptions are collected per index and the one with
/// the lowest index is rethrown, so failures are schedule-independent.
void parallel_rows(Index count, int threads,
                   const std::function<void(Index)>& fn) {
  if (threads < 2 || count < 2) {
    for (Index i = 0; i < count; ++i) fn(i);
    return;
  }
  const Index workers = std::min<Index>(threads, count);
  std::vector<std::exception_ptr> errors(static_cast<size_t>(count));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (Index t = 0; t < workers; ++t)
    pool.emplace_back([&, t] {
      for (Index i = t; i < count; i += workers) {
        try {
          fn(i);
        } catch (...) {
          errors[static_cast<size_t>(i)] = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

struct PlaneObjective {
  const Matrix& M;
  const std::vector<std::pair<Index, Index>>& pairs;
  Index N;

  Vector bivector(const Vector& u, const Vector& v) const {
    Vector omega(static_cast<Index>(pairs.size()));
    for (size_t p = 0; p < pairs.size(); ++p)
      omega[static_cast<Index>(p)] =
          u[pairs[p].first] * v[pairs[p].second] -
          u[pairs[p].second] * v[pairs[p].first];
    return omega;
  }

  double value(const Vector& u, const Vector& v) const {
    const Vector omega = bivector(u, v);
    return omega.dot(M * omega);
  }

  double value_grad(const Vector& u, const Vector& v, Vector& gu,
                    Vector& gv) const {
    const Vector omega = bivector(u, v);
    const Vector y = 2.0 * (M * omega);
    gu = Vector::Zero(N);
    gv = Vector::Zero(N);
    for (size_t p = 0; p < pairs.size(); ++p) {
      const Index a = pairs[p].first, b = pairs[p].second;
      const double yp = y[static_cast<Index>(p)];
      gu[a] += yp * v[b];
      gu[b] -= yp * v[a];
      gv[b] += yp * u[a];
      gv[a] -= yp * u[b];
    }
    return 0.5 * omega.dot(y);
  }
};

/// Nearest orthonormal pair to [u v] (polar factor).
void polar_retract(Vector& u, Vector& v) {
  Eigen::Matrix2d b;
  b << u.dot(u), u.dot(v), u.dot(v), v.dot(v);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(b);
  const Eigen::Matrix2d ih =
      es.eigenvectors() *
      es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
      es.eigenvectors().transpose();
  const Vector nu = u * ih(0, 0) + v * ih(1, 0);
  const Vector nv = u * ih(0, 1) + v * ih(1, 1);
  u = nu;
  v = nv;
}

/// Projected-gradient ascent of sign * sec(U, V) on the Stiefel set with
/// polar retraction and Armijo backtracking.
PlaneExtreme optimize_plane(const PlaneObjective& obj, double sign, Vector u,
                            Vector v) {
  double eta = 1.0;
  Vector gu, gv;
  for (int iter = 0; iter < 2000; ++iter) {
    const double f = sign * obj.value_grad(u, v, gu, gv);
    if (sign < 0) {
      gu = -gu;
      gv = -gv;
    }
    const double a11 = u.dot(gu), a22 = v.dot(gv);
    const double s12 = 0.5 * (u.dot(gv) + v.dot(gu));
    const Vector ru = gu - (u * a11 + v * s12);
    const Vector rv = gv - (u * s12 + v * a22);
    const double gn2 = ru.squaredNorm() + rv.squaredNorm();
    if (std::sqrt(gn2) < 1e-10) break;
    bool accepted = false;
    for (double step = eta; step >= 1e-16; step *= 0.5) {
      Vector nu = u + step * ru;
      Vector nv = v + step * rv;
      polar_retract(nu, nv);
      const double fn = sign * obj.value(nu, nv);
      if (fn >= f + 1e-4 * step * gn2) {
        u = std::move(nu);
        v = std::move(nv);
        eta = std::min(step * 2.0, 1e6);
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  PlaneExtreme out;
  out.value = obj.value(u, v);
  out.u = std::move(u);
  out.v = std::move(v);
  return out;
}

void validate_grid(const warp::WarpProfile& profile,
                   const std::vector<double>& grid) {
  if (grid.size() < 9)
    throw ParseError("certification grid needs at least 9 points");
  const double rho = profile.rho;
  for (size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw ParseError("certification grid must be strictly increasing");
  if (grid.front() > -(rho + 4.0) + 1e-9 || grid.back() < (rho + 4.0) - 1e-9)
    throw ParseError("certification grid must span [-(rho+4), rho+4]");
  for (size_t i = 1; i < grid.size(); ++i) {
    const double step = grid[i] - grid[i - 1];
    if (step > 0.5 + 1e-12)
      throw ParseError("certification grid spacing must be <= 0.5");
    const bool interior =
        grid[i - 1] >= -rho - 1e-12 && grid[i] <= rho + 1e-12;
    if (interior && step > 0.1 + 1e-12)
      throw ParseError("grid spacing inside the ramp must be <= 0.1");
  }
}

TailReport tail_report(const curvature::FramedMetric& metric,
                       const std::vector<double>& grid, double lower,
                       double upper) {
  const size_t m = grid.size();
  TailReport rep;

  const auto side = [&](const std::array<size_t, 4>& idx /*inner->outer*/) {
    TailSide ts;
    std::vector<curvature::CurvatureTensor> full, lim;
    for (size_t j : idx) {
      full.push_back(curvature::full_curvature(metric, grid[j]));
      lim.push_back(curvature::limit_curvature(metric, grid[j]));
    }
    const Index N = full.front().frame_dim();
    ts.monotone = true;
    ts.deviations.assign(4, 0.0);
    for (Index a = 0; a < N; ++a)
      for (Index b = 0; b < N; ++b)
        for (Index c = 0; c < N; ++c)
          for (Index d = 0; d < N; ++d) {
            std::array<double, 4> dev;
            for (int j = 0; j < 4; ++j)
              dev[static_cast<size_t>(j)] = std::abs(
                  full[static_cast<size_t>(j)].at(a, b, c, d) -
                  lim[static_cast<size_t>(j)].at(a, b, c, d));
            for (int j = 0; j < 4; ++j)
              ts.deviations[static_cast<size_t>(j)] =
                  std::max(ts.deviations[static_cast<size_t>(j)],
                           dev[static_cast<size_t>(j)]);
            for (int j = 0; j + 1 < 4; ++j)
              if (dev[static_cast<size_t>(j + 1)] >
                  dev[static_cast<size_t>(j)] * (1.0 + 1e-9) + 1e-12)
                ts.monotone = false;
          }
    return ts;
  };

  rep.left = side({3, 2, 1, 0});
  rep.right = side({m - 4, m - 3, m - 2, m - 1});

  const auto env_lo =
      operator_envelope(curvature::limit_curvature(metric, grid.front()));
  const auto env_hi =
      operator_envelope(curvature::limit_curvature(metric, grid.back()));
  rep.limit_min = std::min(env_lo.first, env_hi.first);
  rep.limit_max = std::max(env_lo.second, env_hi.second);
  rep.limit_within = rep.limit_min >= lower && rep.limit_max <= upper;
  return rep;
}

}  // namespace

Matrix curvature_operator(const curvature::CurvatureTensor& R) {
  const Index N = R.frame_dim();
  const auto pairs = plane_pairs(N);
  const Index P = static_cast<Index>(pairs.size());
  Matrix M(P, P);
  for (Index p = 0; p < P; ++p)
    for (Index q = 0; q < P; ++q)
      M(p, q) = R.at(pairs[static_cast<size_t>(p)].first,
                     pairs[static_cast<size_t>(p)].second,
                     pairs[static_cast<size_t>(q)].second,
                     pairs[static_cast<size_t>(q)].first);
  return M;
}

std::pair<double, double> operator_envelope(
    const curvature::CurvatureTensor& R) {
  const Matrix M = curvature_operator(R);
  Eigen::SelfAdjointEigenSolver<Matrix> es(M, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw EigenFailure("curvature operator eigenvalue computation failed");
  return {es.eigenvalues()(0), es.eigenvalues()(M.rows() - 1)};
}

SectionalRange sectional_range(const curvature::CurvatureTensor& R,
                               std::uint64_t seed, std::uint64_t stream,
                               int restarts) {
  const Index N = R.frame_dim();
  const Matrix M = curvature_operator(R);
  Eigen::SelfAdjointEigenSolver<Matrix> es(M, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw EigenFailure("curvature operator eigenvalue computation failed");

  const auto pairs = plane_pairs(N);
  const PlaneObjective obj{M, pairs, N};

  SectionalRange out;
  out.lambda_min = es.eigenvalues()(0);
  out.lambda_max = es.eigenvalues()(M.rows() - 1);

  for (int t = 0; t < restarts; ++t) {
    SplitMix64 rng(derive_stream(seed, stream, static_cast<std::uint64_t>(t)));
    Vector u, v;
    while (true) {
      u = rng.gaussian_vector(N);
      if (u.norm() < 1e-8) continue;
      u.normalize();
      v = rng.gaussian_vector(N);
      v -= u.dot(v) * u;
      if (v.norm() >= 1e-8) {
        v.normalize();
        break;
      }
    }
    const PlaneExtreme mx = optimize_plane(obj, +1.0, u, v);
    const PlaneExtreme mn = optimize_plane(obj, -1.0, u, v);
    if (t == 0 || mx.value > out.sec_max) {
      out.sec_max = mx.value;
      out.argmax = mx;
    }
    if (t == 0 || mn.value < out.sec_min) {
      out.sec_min = mn.value;
      out.argmin = mn;
    }
  }
  return out;
}

PinchCertificate certify_pinching(const curvature::FramedMetric& metric,
                                  const std::vector<double>& r_grid,
                                  double tol, std::uint64_t seed,
                                  int threads) {
  if (tol < 0.0) throw ParseError("tolerance must be nonnegative");
  validate_grid(metric.profile, r_grid);

  const int k = metric.profile.degree;
  const double eps = metric.profile.epsilon;

  PinchCertificate cert;
  cert.algebra = metric.frame.name;
  cert.k = k;
  cert.epsilon = eps;
  cert.rho = metric.profile.rho;
  cert.s = metric.scale;
  cert.tol = tol;
  cert.seed = seed;
  cert.target_min = -(k + eps) * (k + eps) - tol;
  cert.target_max = -1.0 + tol;
  cert.theoretical_lower_bound = static_cast<double>(k) * k;

  const Index rows_n = static_cast<Index>(r_grid.size());
  cert.rows.resize(static_cast<size_t>(rows_n));
  parallel_rows(rows_n, threads, [&](Index i) {
    const auto R =
        curvature::full_curvature(metric, r_grid[static_cast<size_t>(i)]);
    const auto sr =
        sectional_range(R, seed, static_cast<std::uint64_t>(i), 32);
    cert.rows[static_cast<size_t>(i)] = {r_grid[static_cast<size_t>(i)],
                                         sr.lambda_min, sr.lambda_max,
                                         sr.sec_min, sr.sec_max};
  });

  bool rows_pass = true;
  std::ostringstream blocking;
  for (const CertRow& row : cert.rows) {
    if (row.lambda_min < cert.target_min) {
      rows_pass = false;
      blocking << "lambda_min " << row.lambda_min << " below target "
               << cert.target_min << " at r = " << row.r;
      break;
    }
    if (row.lambda_max > cert.target_max) {
      rows_pass = false;
      blocking << "lambda_max " << row.lambda_max << " above target "
               << cert.target_max << " at r = " << row.r;
      break;
    }
  }

  cert.tails = tail_report(metric, r_grid, cert.target_min, cert.target_max);
  if (rows_pass && !cert.tails.monotone())
    throw TailNotMonotone(
        "deviation from the limit tensor does not settle over the outermost "
        "grid points; extend the grid tails");

  cert.global_min = cert.rows.front().lambda_min;
  cert.global_max = cert.rows.front().lambda_max;
  for (const CertRow& row : cert.rows) {
    cert.global_min = std::min(cert.global_min, row.lambda_min);
    cert.global_max = std::max(cert.global_max, row.lambda_max);
  }
  cert.ratio = cert.global_min / cert.global_max;
  cert.verdict = rows_pass && cert.tails.limit_within;
  if (!rows_pass)
    cert.blocking = blocking.str();
  else if (!cert.tails.limit_within)
    cert.blocking = "limit-tensor envelope outside targets on the tails";
  return cert;
}

ScaleSearch find_s(const algebra::GradedFrame& frame,
                   const warp::WarpProfile& profile,
                   const std::vector<double>& r_grid, double tol, double s_max,
                   std::uint64_t seed, int threads) {
  if (!(s_max >= 1.0) || s_max > 1048576.5)
    throw ParseError("s_max must lie in [1, 2^20]");
  validate_grid(profile, r_grid);

  const int k = profile.degree;
  const double lower = -(k + profile.epsilon) * (k + profile.epsilon) - tol;
  const double upper = -1.0 + tol;

  ScaleSearch out;
  std::string last_block = "no scale attempted";
  for (double s = 1.0; s <= s_max * (1.0 + 1e-9); s *= 2.0) {
    out.scanned.push_back(s);
    const auto metric = curvature::make_metric(frame, profile, s);

    // Envelope-only scan, fail-fast over fixed 64-row blocks so the early
    // exit point cannot depend on the number of workers.
    bool scan_ok = true;
    const Index rows_n = static_cast<Index>(r_grid.size());
    for (Index base = 0; base < rows_n && scan_ok; base += 64) {
      const Index count = std::min<Index>(64, rows_n - base);
      std::vector<std::pair<double, double>> env(static_cast<size_t>(count));
      parallel_rows(count, threads, [&](Index j) {
        env[static_cast<size_t>(j)] = operator_envelope(curvature::full_curvature(
            metric, r_grid[static_cast<size_t>(base + j)]));
      });
      for (Index j = 0; j < count; ++j) {
        const auto& e = env[static_cast<size_t>(j)];
        std::ostringstream msg;
        if (e.first < lower) {
          msg << "lambda_min " << e.first << " below target " << lower
              << " at r = " << r_grid[static_cast<size_t>(base + j)]
              << ", s = " << s;
        } else if (e.second > upper) {
          msg << "lambda_max " << e.second << " above target " << upper
              << " at r = " << r_grid[static_cast<size_t>(base + j)]
              << ", s = " << s;
        } else {
          continue;
        }
        scan_ok = false;
        last_block = msg.str();
        break;
      }
    }
    if (!scan_ok) continue;

    PinchCertificate cert = certify_pinching(metric, r_grid, tol, seed, threads);
    if (cert.verdict) {
      out.s = s;
      out.certificate = std::move(cert);
      return out;
    }
    last_block = cert.blocking;
  }
  std::ostringstream msg;
  msg << "no scale up to " << s_max
      << " produced a passing certificate; last blocking bound: "
      << last_block;
  throw ScaleExhausted(msg.str());
}

SweepTable epsilon_sweep(const algebra::GradedFrame& frame,
                         const std::vector<double>& eps_list, double tol,
                         double s_max, std::uint64_t seed, int threads) {
  if (eps_list.empty()) throw ParseError("epsilon list is empty");
  for (double e : eps_list)
    if (!(e > 0.0)) throw ParseError("epsilons must be positive");
  for (size_t i = 1; i < eps_list.size(); ++i)
    if (!(eps_list[i] < eps_list[i - 1]))
      throw ParseError("epsilons must be strictly descending");

  SweepTable table;
  table.k = frame.degree();
  const double k2 = static_cast<double>(table.k) * table.k;
  for (double eps : eps_list) {
    const warp::WarpProfile profile = warp::build_profile(table.k, eps);
    const std::vector<double> grid = warp::default_grid(profile);
    ScaleSearch found =
        find_s(frame, profile, grid, tol, s_max, seed, threads);
    SweepRow row;
    row.epsilon = eps;
    row.s = found.s;
    row.ratio = found.certificate.ratio;
    row.k_squared = k2;
    const double cap = (table.k + eps) * (table.k + eps) + tol;
    row.pass = found.certificate.verdict && row.ratio >= k2 - tol &&
               row.ratio <= cap;
    table.rows.push_back(row);
    table.certificates.push_back(std::move(found.certificate));
  }
  return table;
}

DecayFit s_decay_check(const algebra::GradedFrame& frame,
                       const warp::WarpProfile& profile,
                       const std::vector<double>& s_list, double r) {
  if (s_list.size() < 5)
    throw ParseError("scale list needs at least five entries");
  for (size_t i = 1; i < s_list.size(); ++i)
    if (!(s_list[i] > s_list[i - 1]))
      throw ParseError("scale list must be strictly increasing");
  const double ratio0 = s_list[1] / s_list[0];
  for (size_t i = 1; i < s_list.size(); ++i) {
    const double q = s_list[i] / s_list[i - 1];
    if (std::abs(q - ratio0) > 1e-9 * ratio0)
      throw ParseError("scale list must be geometric");
  }
  if (r < profile.rho - 1e-12)
    throw ParseError("decay check radius must satisfy r >= rho");

  DecayFit fit;
  for (double s : s_list) {
    const auto metric = curvature::make_metric(frame, profile, s);
    fit.points.emplace_back(
        s, curvature::off_pattern_max(curvature::full_curvature(metric, r)));
  }
  double biggest = 0.0;
  for (const auto& p : fit.points) biggest = std::max(biggest, p.second);
  if (biggest < 1e-14)
    throw DegenerateFit(
        "all off-pattern components are below 1e-14 (exact-zero case)");

  double sx = 0, sy = 0;
  const double n = static_cast<double>(fit.points.size());
  for (const auto& p : fit.points) {
    sx += std::log(p.first);
    sy += std::log(p.second);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (const auto& p : fit.points) {
    const double dx = std::log(p.first) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(p.second) - my);
  }
  fit.slope = sxy / sxx;
  for (const auto& p : fit.points) {
    const double predicted = my + fit.slope * (std::log(p.first) - mx);
    fit.max_residual =
        std::max(fit.max_residual, std::abs(std::log(p.second) - predicted));
  }
  return fit;
}

}  // namespace warpcert::certify
