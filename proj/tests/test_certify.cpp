#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "warpcert/algebra.hpp"
#include "warpcert/certify.hpp"
#include "warpcert/curvature.hpp"
#include "warpcert/errors.hpp"
#include "warpcert/rng.hpp"
#include "warpcert/warp.hpp"

#include "support/helpers.hpp"

using namespace warpcert;
using namespace warpcert::certify;
using algebra::builtin;
using algebra::graded_frame;
using algebra::validate;
using curvature::full_curvature;
using curvature::FramedMetric;
using curvature::limit_curvature;
using curvature::make_metric;
using warp::build_profile;
using warp::default_grid;

namespace {

FramedMetric metric_for(const char* name, double epsilon, double s) {
  auto frame = graded_frame(validate(builtin(name)));
  return make_metric(frame, build_profile(frame.degree(), epsilon), s);
}

// sec(U, V) by direct tensor contraction R(U, V, V, U).
double plane_sec(const curvature::CurvatureTensor& R, const Vector& u,
                 const Vector& v) {
  const Index N = R.frame_dim();
  double out = 0.0;
  for (Index a = 0; a < N; ++a)
    for (Index b = 0; b < N; ++b)
      for (Index c = 0; c < N; ++c)
        for (Index d = 0; d < N; ++d)
          out += R.at(a, b, c, d) * u(a) * v(b) * v(c) * u(d);
  return out;
}

// Orthonormal random pair.
void random_plane(rng::SplitMix64& gen, Index n, Vector& u, Vector& v) {
  u = gen.gaussian_vector(n);
  u /= u.norm();
  v = gen.gaussian_vector(n);
  v -= u.dot(v) * u;
  v /= v.norm();
}

}  // namespace

TEST_CASE("bivector operator reproduces plane curvatures") {
  auto m = metric_for("heis3", 0.25, 4.0);
  auto R = full_curvature(m, 0.8);
  Matrix M = curvature_operator(R);
  const Index N = m.frame_dim();
  REQUIRE(M.rows() == N * (N - 1) / 2);
  CHECK((M - M.transpose()).cwiseAbs().maxCoeff() < 1e-12);

  // Diagonal entries are the coordinate-plane curvatures.
  Index p = 0;
  for (Index a = 0; a < N; ++a)
    for (Index b = a + 1; b < N; ++b, ++p)
      CHECK(M(p, p) == doctest::Approx(R.at(a, b, b, a)).epsilon(1e-12));

  rng::SplitMix64 gen(rng::derive_stream(9, 0));
  for (int t = 0; t < 50; ++t) {
    Vector u, v;
    random_plane(gen, N, u, v);
    Vector omega(M.rows());
    Index q = 0;
    for (Index a = 0; a < N; ++a)
      for (Index b = a + 1; b < N; ++b, ++q) omega(q) = u(a) * v(b) - u(b) * v(a);
    CHECK(omega.dot(M * omega) ==
          doctest::Approx(plane_sec(R, u, v)).epsilon(1e-10));
  }
}

TEST_CASE("eigen envelope bounds every sampled plane") {
  auto m = metric_for("free2step:3", 0.25, 8.0);
  auto R = full_curvature(m, -1.1);
  auto [lo, hi] = operator_envelope(R);
  REQUIRE(lo < hi);
  rng::SplitMix64 gen(rng::derive_stream(10, 3));
  for (int t = 0; t < 200; ++t) {
    Vector u, v;
    random_plane(gen, m.frame_dim(), u, v);
    const double sec = plane_sec(R, u, v);
    CHECK(sec >= lo - 1e-9);
    CHECK(sec <= hi + 1e-9);
  }

  auto range = sectional_range(R, 0, 0, 16);
  CHECK(range.lambda_min == doctest::Approx(lo));
  CHECK(range.lambda_max == doctest::Approx(hi));
  CHECK(range.sec_min >= lo - 1e-9);
  CHECK(range.sec_max <= hi + 1e-9);
  CHECK(range.sec_min <= range.sec_max);
  // The reported extremal planes are orthonormal and reproduce their values.
  CHECK(range.argmin.u.norm() == doctest::Approx(1.0));
  CHECK(range.argmin.v.norm() == doctest::Approx(1.0));
  CHECK(std::abs(range.argmin.u.dot(range.argmin.v)) < 1e-9);
  CHECK(plane_sec(R, range.argmin.u, range.argmin.v) ==
        doctest::Approx(range.sec_min).epsilon(1e-9));
  CHECK(plane_sec(R, range.argmax.u, range.argmax.v) ==
        doctest::Approx(range.sec_max).epsilon(1e-9));
}

TEST_CASE("optimizer extremes are stable under extra restarts") {
  auto m = metric_for("heis3", 0.25, 32.0);
  for (double r : {-2.5, 0.0, 1.4, 3.0}) {
    auto R = full_curvature(m, r);
    auto a = sectional_range(R, 0, 0, 16);
    auto b = sectional_range(R, 0, 0, 32);
    CHECK(a.sec_min == doctest::Approx(b.sec_min).epsilon(1e-6));
    CHECK(a.sec_max == doctest::Approx(b.sec_max).epsilon(1e-6));
    // On a plane-complete sweep the optimizer should essentially reach the
    // envelope from inside.
    CHECK(b.sec_min >= b.lambda_min - 1e-9);
    CHECK(b.sec_max <= b.lambda_max + 1e-9);
  }
}

TEST_CASE("limit operator envelope of the Heisenberg tail") {
  auto m = metric_for("heis3", 0.25, 64.0);
  auto L = limit_curvature(m, m.profile.rho + 3.0);
  auto [lo, hi] = operator_envelope(L);
  CHECK(lo == doctest::Approx(-4.0));
  CHECK(hi == doctest::Approx(-1.0));
}

TEST_CASE("abelian certificate is exactly pinched at one") {
  auto m = metric_for("abelian:2", 0.25, 1.0);
  auto cert = certify_pinching(m, default_grid(m.profile), 1e-6);
  CHECK(cert.verdict);
  CHECK(cert.ratio == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(cert.global_min == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(cert.global_max == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(cert.theoretical_lower_bound == doctest::Approx(1.0));
  CHECK(cert.tails.monotone());
  CHECK(cert.tails.limit_within);
  CHECK(cert.blocking.empty());
  for (const auto& row : cert.rows) {
    CHECK(row.lambda_min == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(row.lambda_max == doctest::Approx(-1.0).epsilon(1e-9));
  }
}

TEST_CASE("Heisenberg certification fails at unit scale and passes at 2^10") {
  auto frame = graded_frame(validate(builtin("heis3")));
  auto profile = build_profile(2, 0.25);
  auto grid = default_grid(profile);

  auto bad = certify_pinching(make_metric(frame, profile, 1.0), grid, 1e-6);
  CHECK_FALSE(bad.verdict);
  CHECK_FALSE(bad.blocking.empty());

  auto good = certify_pinching(make_metric(frame, profile, 1024.0), grid, 1e-6);
  CHECK(good.verdict);
  CHECK(good.ratio >= 4.0 - 1e-6);
  CHECK(good.ratio <= 2.25 * 2.25 + 1e-6);
  CHECK(good.tails.monotone());
}

TEST_CASE("scale search returns the first passing power of two") {
  auto frame = graded_frame(validate(builtin("heis3")));
  auto profile = build_profile(2, 0.25);
  auto grid = default_grid(profile);
  auto found = find_s(frame, profile, grid, 1e-6);
  CHECK(found.s == doctest::Approx(512.0));
  CHECK(found.certificate.verdict);
  REQUIRE(found.scanned.size() == 10);
  CHECK(found.scanned.front() == doctest::Approx(1.0));
  CHECK(found.scanned.back() == doctest::Approx(512.0));

  auto ab_frame = graded_frame(validate(builtin("abelian:3")));
  auto ab_profile = build_profile(1, 0.25);
  auto ab = find_s(ab_frame, ab_profile, default_grid(ab_profile), 1e-6);
  CHECK(ab.s == doctest::Approx(1.0));

  CHECK_THROWS_AS(find_s(frame, profile, grid, 1e-6, 4.0), ScaleExhausted);
  CHECK_THROWS_AS(find_s(frame, profile, grid, 1e-6, 0.5), ParseError);
  CHECK_THROWS_AS(find_s(frame, profile, grid, 1e-6, 3e6), ParseError);
}

TEST_CASE("certification is independent of the thread count") {
  auto m = metric_for("heis3", 0.25, 512.0);
  auto grid = default_grid(m.profile);
  auto one = certify_pinching(m, grid, 1e-6, 0, 1);
  auto three = certify_pinching(m, grid, 1e-6, 0, 3);
  REQUIRE(one.rows.size() == three.rows.size());
  for (size_t i = 0; i < one.rows.size(); ++i) {
    CHECK(one.rows[i].r == three.rows[i].r);
    CHECK(one.rows[i].lambda_min == three.rows[i].lambda_min);
    CHECK(one.rows[i].lambda_max == three.rows[i].lambda_max);
    CHECK(one.rows[i].sec_min == three.rows[i].sec_min);
    CHECK(one.rows[i].sec_max == three.rows[i].sec_max);
  }
  CHECK(one.ratio == three.ratio);
  CHECK(one.global_min == three.global_min);
  CHECK(one.global_max == three.global_max);
  CHECK(one.verdict == three.verdict);
}

TEST_CASE("grid validation rejects malformed grids") {
  auto m = metric_for("heis3", 0.25, 512.0);
  const double rho = m.profile.rho;

  std::vector<double> few = {-rho - 4.0, 0.0, rho + 4.0};
  CHECK_THROWS_AS(certify_pinching(m, few, 1e-6), ParseError);

  auto grid = default_grid(m.profile);
  auto shuffled = grid;
  std::swap(shuffled[3], shuffled[4]);
  CHECK_THROWS_AS(certify_pinching(m, shuffled, 1e-6), ParseError);

  std::vector<double> narrow;
  for (double r = -rho - 2.0; r <= rho + 2.0; r += 0.05) narrow.push_back(r);
  CHECK_THROWS_AS(certify_pinching(m, narrow, 1e-6), ParseError);

  // Interior spacing above 0.1 is rejected even when the span is right.
  std::vector<double> coarse;
  for (double r = -rho - 4.0; r <= rho + 4.0 + 1e-9; r += 0.4)
    coarse.push_back(r);
  CHECK_THROWS_AS(certify_pinching(m, coarse, 1e-6), ParseError);

  CHECK_THROWS_AS(certify_pinching(m, grid, -1.0), ParseError);
}

TEST_CASE("epsilon sweep tabulates passing ratios") {
  auto frame = graded_frame(validate(builtin("heis3")));
  auto table = epsilon_sweep(frame, {0.5, 0.25}, 1e-6);
  REQUIRE(table.rows.size() == 2);
  CHECK(table.k == 2);
  for (const auto& row : table.rows) {
    CHECK(row.pass);
    CHECK(row.k_squared == doctest::Approx(4.0));
    CHECK(row.ratio >= 4.0 - 1e-6);
    CHECK(row.ratio <= (2.0 + row.epsilon) * (2.0 + row.epsilon) + 1e-6);
    CHECK(row.s == doctest::Approx(512.0));
  }
  REQUIRE(table.certificates.size() == 2);
  CHECK(table.certificates[0].epsilon == doctest::Approx(0.5));

  CHECK_THROWS_AS(epsilon_sweep(frame, {0.25, 0.5}, 1e-6), ParseError);
  CHECK_THROWS_AS(epsilon_sweep(frame, {0.5, -0.1}, 1e-6), ParseError);
  CHECK_THROWS_AS(epsilon_sweep(frame, {}, 1e-6), ParseError);
}

TEST_CASE("decay fit finds slope minus one for the mixed block") {
  auto frame = graded_frame(validate(builtin("heis3")));
  auto profile = build_profile(2, 0.25);
  std::vector<double> s_list = {16.0, 32.0, 64.0, 128.0, 256.0, 512.0};
  auto fit = s_decay_check(frame, profile, s_list, profile.rho + 1.0);
  CHECK(fit.slope == doctest::Approx(-1.0).epsilon(0.1));
  CHECK(fit.max_residual < 1e-10);
  REQUIRE(fit.points.size() == s_list.size());
  CHECK(fit.points.front().first == doctest::Approx(16.0));

  auto ab = graded_frame(validate(builtin("abelian:3")));
  auto ab_profile = build_profile(1, 0.25);
  CHECK_THROWS_AS(s_decay_check(ab, ab_profile, s_list, ab_profile.rho + 1.0),
                  DegenerateFit);

  CHECK_THROWS_AS(s_decay_check(frame, profile, {16.0, 32.0, 64.0}, 3.0),
                  ParseError);
  CHECK_THROWS_AS(
      s_decay_check(frame, profile, {16.0, 32.0, 48.0, 96.0, 192.0}, 3.0),
      ParseError);
  CHECK_THROWS_AS(s_decay_check(frame, profile, s_list, 0.5), ParseError);
}
