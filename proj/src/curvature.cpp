#include "warpcert/curvature.hpp"

#include <algorithm>
#include <cmath>

namespace warpcert::curvature {

FramedMetric make_metric(algebra::GradedFrame frame, warp::WarpProfile profile,
                         double s) {
  if (frame.degree() != profile.degree)
    throw IndexError("profile degree does not match the algebra grading");
  if (!(s > 0.0)) throw IndexError("scale s must be positive");
  return {std::move(frame), profile, s};
}

const char* source_name(Source s) {
  switch (s) {
    case Source::oracle: return "oracle";
    case Source::closed_form: return "closed_form";
    case Source::limit: return "limit";
    case Source::intrinsic: return "intrinsic";
  }
  return "?";
}

ComponentClass classify(Index a, Index b, Index c, Index d) {
  const int zeros = (a == 0) + (b == 0) + (c == 0) + (d == 0);
  if (zeros == 0) {
    const bool same_pair = (a == c && b == d) || (a == d && b == c);
    return same_pair ? ComponentClass::g_diagonal : ComponentClass::g_offpair;
  }
  if (zeros == 1) return ComponentClass::mixed;
  if (zeros == 2) {
    Index first = 0, second = 0;
    for (Index x : {a, b, c, d}) {
      if (x == 0) continue;
      if (first == 0)
        first = x;
      else
        second = x;
    }
    return first == second ? ComponentClass::radial_diagonal
                           : ComponentClass::radial_offpair;
  }
  return ComponentClass::radial_offpair;
}

const char* class_name(ComponentClass c) {
  switch (c) {
    case ComponentClass::g_diagonal: return "g_diagonal";
    case ComponentClass::g_offpair: return "g_offpair";
    case ComponentClass::mixed: return "mixed";
    case ComponentClass::radial_diagonal: return "radial_diagonal";
    case ComponentClass::radial_offpair: return "radial_offpair";
  }
  return "?";
}

CurvatureTensor::CurvatureTensor(Index frame_dim, Source source, double r,
                                 double scale)
    : source(source),
      r(r),
      scale(scale),
      N_(frame_dim),
      data_(static_cast<size_t>(frame_dim * frame_dim * frame_dim * frame_dim),
            0.0) {}

double CurvatureTensor::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double CurvatureTensor::symmetry_residual() const {
  double worst = 0.0;
  for (Index a = 0; a < N_; ++a)
    for (Index b = 0; b < N_; ++b)
      for (Index c = 0; c < N_; ++c)
        for (Index d = 0; d < N_; ++d) {
          const double v = at(a, b, c, d);
          worst = std::max(worst, std::abs(v + at(b, a, c, d)));
          worst = std::max(worst, std::abs(v + at(a, b, d, c)));
          worst = std::max(worst, std::abs(v - at(c, d, a, b)));
        }
  return worst;
}

double CurvatureTensor::bianchi_residual() const {
  double worst = 0.0;
  for (Index a = 0; a < N_; ++a)
    for (Index b = 0; b < N_; ++b)
      for (Index c = 0; c < N_; ++c)
        for (Index d = 0; d < N_; ++d)
          worst = std::max(std::abs(at(a, b, c, d) + at(b, c, a, d) +
                                    at(c, a, b, d)),
                           worst);
  return worst;
}

namespace {

struct LevelData {
  Vector u, du, ddu;  // per algebra index (adapted order)
};

LevelData level_data(const FramedMetric& m, double r) {
  const Index n = m.dim();
  LevelData out{Vector(n), Vector(n), Vector(n)};
  for (Index i = 0; i < n; ++i) {
    const auto lw =
        warp::eval_log(m.profile, m.frame.lvl[static_cast<size_t>(i)], r);
    out.u[i] = lw.u;
    out.du[i] = lw.du;
    out.ddu[i] = lw.ddu;
  }
  return out;
}

/// Connection coefficients Gamma_{abc} = <nabla_{E_a} E_b, E_c> from a full
/// bracket table g(e, a, b) (coefficient of E_e in [E_a, E_b]) via the
/// orthonormal-frame Koszul formula. Antisymmetry in (b, c) is exact by
/// construction.
std::vector<double> koszul(const std::vector<double>& g, Index N) {
  const auto at = [&](Index e, Index a, Index b) {
    return g[static_cast<size_t>((e * N + a) * N + b)];
  };
  std::vector<double> gamma(static_cast<size_t>(N * N * N), 0.0);
  for (Index a = 0; a < N; ++a)
    for (Index b = 0; b < N; ++b)
      for (Index c = b + 1; c < N; ++c) {
        const double v = 0.5 * (at(c, a, b) - at(a, b, c) + at(b, c, a));
        gamma[static_cast<size_t>((a * N + b) * N + c)] = v;
        gamma[static_cast<size_t>((a * N + c) * N + b)] = -v;
      }
  return gamma;
}

/// R_{abcd} from connection coefficients, their radial derivatives (only
/// E_0 differentiates; all coefficients depend on r alone) and the bracket
/// table: R_{abcd} = d_a Gamma_{bcd} - d_b Gamma_{acd}
///                  + sum_e (Gamma_{bce} Gamma_{aed} - Gamma_{ace} Gamma_{bed}
///                           - g(e,a,b) Gamma_{ecd}).
void assemble(CurvatureTensor& R, const std::vector<double>& g,
              const std::vector<double>& gamma,
              const std::vector<double>& dgamma, bool radial_derivatives) {
  const Index N = R.frame_dim();
  const auto G = [&](Index a, Index b, Index c) {
    return gamma[static_cast<size_t>((a * N + b) * N + c)];
  };
  const auto dG = [&](Index a, Index b, Index c) {
    return dgamma[static_cast<size_t>((a * N + b) * N + c)];
  };
  const auto bk = [&](Index e, Index a, Index b) {
    return g[static_cast<size_t>((e * N + a) * N + b)];
  };
  for (Index a = 0; a < N; ++a)
    for (Index b = 0; b < N; ++b)
      for (Index c = 0; c < N; ++c)
        for (Index d = 0; d < N; ++d) {
          double v = 0.0;
          if (radial_derivatives) {
            if (a == 0) v += dG(b, c, d);
            if (b == 0) v -= dG(a, c, d);
          }
          for (Index e = 0; e < N; ++e)
            v += G(b, c, e) * G(a, e, d) - G(a, c, e) * G(b, e, d) -
                 bk(e, a, b) * G(e, c, d);
          R.at(a, b, c, d) = v;
        }
}

}  // namespace

StructureTable structure_functions(const FramedMetric& m, double r) {
  const Index n = m.dim();
  const LevelData ld = level_data(m, r);
  StructureTable t;
  t.du = ld.du;
  t.ddu = ld.ddu;
  t.gamma.assign(static_cast<size_t>(n), Matrix::Zero(n, n));
  t.dgamma.assign(static_cast<size_t>(n), Matrix::Zero(n, n));
  for (Index mm = 0; mm < n; ++mm) {
    const Matrix& form = m.frame.adapted_forms[static_cast<size_t>(mm)];
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) {
        const double c = form(i, j);
        if (c == 0.0) continue;
        // c * h_m / (s h_i h_j), evaluated in log space to keep the
        // exponential regions overflow-free.
        const double v = c * std::exp(ld.u[i] + ld.u[j] - ld.u[mm]) / m.scale;
        t.gamma[static_cast<size_t>(mm)](i, j) = v;
        t.dgamma[static_cast<size_t>(mm)](i, j) =
            v * (ld.du[i] + ld.du[j] - ld.du[mm]);
      }
  }
  return t;
}

CurvatureTensor full_curvature(const FramedMetric& m, double r) {
  const Index n = m.dim();
  const Index N = n + 1;
  const StructureTable t = structure_functions(m, r);

  std::vector<double> g(static_cast<size_t>(N * N * N), 0.0);
  std::vector<double> dg(static_cast<size_t>(N * N * N), 0.0);
  const auto put = [&](std::vector<double>& v, Index e, Index a, Index b,
                       double val) {
    v[static_cast<size_t>((e * N + a) * N + b)] = val;
  };
  for (Index i = 0; i < n; ++i) {
    put(g, i + 1, 0, i + 1, t.du[i]);
    put(g, i + 1, i + 1, 0, -t.du[i]);
    put(dg, i + 1, 0, i + 1, t.ddu[i]);
    put(dg, i + 1, i + 1, 0, -t.ddu[i]);
    for (Index j = 0; j < n; ++j)
      for (Index mm = 0; mm < n; ++mm) {
        const double v = t.gamma[static_cast<size_t>(mm)](i, j);
        if (v != 0.0) put(g, mm + 1, i + 1, j + 1, v);
        const double w = t.dgamma[static_cast<size_t>(mm)](i, j);
        if (w != 0.0) put(dg, mm + 1, i + 1, j + 1, w);
      }
  }

  const std::vector<double> gamma = koszul(g, N);
  const std::vector<double> dgamma = koszul(dg, N);
  CurvatureTensor R(N, Source::oracle, r, m.scale);
  assemble(R, g, gamma, dgamma, true);
  return R;
}

CurvatureTensor fiber_curvature(const FramedMetric& m, double r) {
  const Index n = m.dim();
  const LevelData ld = level_data(m, r);

  std::vector<double> g(static_cast<size_t>(n * n * n), 0.0);
  for (Index mm = 0; mm < n; ++mm) {
    const Matrix& form = m.frame.adapted_forms[static_cast<size_t>(mm)];
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) {
        const double c = form(i, j);
        if (c != 0.0)
          g[static_cast<size_t>((mm * n + i) * n + j)] =
              c * std::exp(ld.u[i] + ld.u[j] - ld.u[mm]);
      }
  }
  const std::vector<double> gamma = koszul(g, n);
  const std::vector<double> none(g.size(), 0.0);
  CurvatureTensor R(n, Source::intrinsic, r, 1.0);
  assemble(R, g, gamma, none, false);
  return R;
}

CurvatureTensor closed_form_curvature(const FramedMetric& m, double r) {
  const Index n = m.dim();
  const Index N = n + 1;
  const LevelData ld = level_data(m, r);
  const CurvatureTensor fiber = fiber_curvature(m, r);
  const StructureTable t = structure_functions(m, r);
  const double inv_s2 = 1.0 / (m.scale * m.scale);

  CurvatureTensor R(N, Source::closed_form, r, m.scale);
  // G block: scaled fiber curvature plus the warped-product term.
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b)
      for (Index c = 0; c < n; ++c)
        for (Index d = 0; d < n; ++d) {
          double v = inv_s2 * fiber.at(a, b, c, d);
          if (a == d && b == c && a != b) v -= ld.du[a] * ld.du[b];
          if (a == c && b == d && a != b) v += ld.du[a] * ld.du[b];
          R.at(a + 1, b + 1, c + 1, d + 1) = v;
        }
  // Radial block: planes through d/dr see -h_i''/h_i; off-pair terms zero.
  for (Index i = 0; i < n; ++i) {
    const double q = ld.du[i] * ld.du[i] - ld.ddu[i];  // h''/h
    R.at(i + 1, 0, 0, i + 1) = -q;
    R.at(0, i + 1, i + 1, 0) = -q;
    R.at(i + 1, 0, i + 1, 0) = q;
    R.at(0, i + 1, 0, i + 1) = q;
  }
  // Mixed block from the displayed formula; untrusted, reported only.
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      for (Index l = 0; l < n; ++l) {
        const auto ga = [&](Index top, Index x, Index y) {
          return t.gamma[static_cast<size_t>(top)](x, y);
        };
        const double v = -0.5 * (t.du[j] + t.du[l]) *
                         (ga(l, j, i) + ga(j, i, l) + ga(i, j, l));
        R.at(0, i + 1, j + 1, l + 1) = v;
        R.at(i + 1, 0, j + 1, l + 1) = -v;
        R.at(j + 1, l + 1, 0, i + 1) = v;
        R.at(j + 1, l + 1, i + 1, 0) = -v;
      }
  return R;
}

CurvatureTensor limit_curvature(const FramedMetric& m, double r) {
  const Index n = m.dim();
  const Index N = n + 1;
  const LevelData ld = level_data(m, r);
  CurvatureTensor R(N, Source::limit, r, m.scale);
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b) {
      if (a == b) continue;
      const double w = ld.du[a] * ld.du[b];
      R.at(a + 1, b + 1, b + 1, a + 1) = -w;
      R.at(a + 1, b + 1, a + 1, b + 1) = w;
    }
  for (Index i = 0; i < n; ++i) {
    const double q = ld.du[i] * ld.du[i] - ld.ddu[i];
    R.at(i + 1, 0, 0, i + 1) = -q;
    R.at(0, i + 1, i + 1, 0) = -q;
    R.at(i + 1, 0, i + 1, 0) = q;
    R.at(0, i + 1, 0, i + 1) = q;
  }
  return R;
}

double off_pattern_max(const CurvatureTensor& R) {
  const Index N = R.frame_dim();
  double worst = 0.0;
  for (Index a = 0; a < N; ++a)
    for (Index b = 0; b < N; ++b)
      for (Index c = 0; c < N; ++c)
        for (Index d = 0; d < N; ++d) {
          const ComponentClass cls = classify(a, b, c, d);
          if (cls == ComponentClass::g_offpair ||
              cls == ComponentClass::mixed ||
              cls == ComponentClass::radial_offpair)
            worst = std::max(worst, std::abs(R.at(a, b, c, d)));
        }
  return worst;
}

DiscrepancyReport compare_sources(const algebra::GradedFrame& frame,
                                  const warp::WarpProfile& profile,
                                  const std::vector<double>& r_grid,
                                  const std::vector<double>& s_list) {
  DiscrepancyReport rep;
  for (int c = 0; c < kComponentClassCount; ++c) {
    DiscrepancyReport::ClassRow row;
    row.cls = static_cast<ComponentClass>(c);
    row.trusted = row.cls != ComponentClass::mixed;
    rep.classes.push_back(row);
  }
  for (double s : s_list) {
    const FramedMetric metric = make_metric(frame, profile, s);
    const Index N = metric.frame_dim();
    double limit_gap = 0.0;
    for (double r : r_grid) {
      const CurvatureTensor oracle = full_curvature(metric, r);
      const CurvatureTensor closed = closed_form_curvature(metric, r);
      const CurvatureTensor limit = limit_curvature(metric, r);
      rep.max_symmetry_residual =
          std::max(rep.max_symmetry_residual, oracle.symmetry_residual());
      rep.max_bianchi_residual =
          std::max(rep.max_bianchi_residual, oracle.bianchi_residual());
      for (Index a = 0; a < N; ++a)
        for (Index b = 0; b < N; ++b)
          for (Index c = 0; c < N; ++c)
            for (Index d = 0; d < N; ++d) {
              const double dv =
                  std::abs(oracle.at(a, b, c, d) - closed.at(a, b, c, d));
              auto& row =
                  rep.classes[static_cast<size_t>(classify(a, b, c, d))];
              row.max_abs_diff = std::max(row.max_abs_diff, dv);
              limit_gap = std::max(
                  limit_gap,
                  std::abs(oracle.at(a, b, c, d) - limit.at(a, b, c, d)));
            }
    }
    rep.limit_gap_by_scale.emplace_back(s, limit_gap);
  }
  return rep;
}

}  // namespace warpcert::curvature
