#pragma once

#include <string>
#include <vector>

#include "warpcert/algebra.hpp"
#include "warpcert/errors.hpp"
#include "warpcert/types.hpp"
#include "warpcert/warp.hpp"

namespace warpcert::curvature {

/// The warped metric s^2 g_r + dr^2 on G x R, carried by the g-orthonormal
/// frame E_0 = d/dr, E_m = X_m / (s h_{lvl(m)}(r)) over the adapted basis.
struct FramedMetric {
  algebra::GradedFrame frame;
  warp::WarpProfile profile;
  double scale = 1.0;  ///< the constant s > 0

  Index dim() const { return frame.dim(); }        ///< algebra dimension n
  Index frame_dim() const { return dim() + 1; }    ///< N = n + 1, index 0 radial
};

/// Validates degree agreement between frame and profile and s > 0.
FramedMetric make_metric(algebra::GradedFrame frame, warp::WarpProfile profile,
                         double s);

/// How a tensor was produced.
enum class Source {
  oracle,       ///< first-principles frame computation (certification source)
  closed_form,  ///< assembled from the blockwise component formulas
  limit,        ///< large-s limit tensor
  intrinsic,    ///< curvature of the fiber metric g_r alone (no radial index)
};

const char* source_name(Source s);

/// Placement of a component R_{abcd} relative to the block structure.
/// Counting radial (index 0) slots: none -> G block, split by whether the
/// index pairs coincide as sets; one -> mixed; two -> radial, split by
/// whether the algebra indices agree. Three or more radial slots vanish
/// identically and are grouped with radial_offpair.
enum class ComponentClass {
  g_diagonal,
  g_offpair,
  mixed,
  radial_diagonal,
  radial_offpair,
};

ComponentClass classify(Index a, Index b, Index c, Index d);
const char* class_name(ComponentClass c);
constexpr int kComponentClassCount = 5;

/// Dense curvature components R_{abcd} = <R(E_a, E_b) E_c, E_d> at fixed
/// (r, s) in the orthonormal frame. For source intrinsic the indices run
/// over the algebra only; otherwise index 0 is the radial direction.
class CurvatureTensor {
 public:
  CurvatureTensor(Index frame_dim, Source source, double r, double scale);

  Index frame_dim() const { return N_; }
  double& at(Index a, Index b, Index c, Index d) {
    return data_[static_cast<size_t>(((a * N_ + b) * N_ + c) * N_ + d)];
  }
  double at(Index a, Index b, Index c, Index d) const {
    return data_[static_cast<size_t>(((a * N_ + b) * N_ + c) * N_ + d)];
  }
  const std::vector<double>& data() const { return data_; }

  double max_abs() const;
  /// Worst violation of the antisymmetries in (a,b) and (c,d) and of the
  /// pair symmetry R_{abcd} = R_{cdab}.
  double symmetry_residual() const;
  /// Worst violation of the first Bianchi identity.
  double bianchi_residual() const;

  Source source;
  double r = 0.0;
  double scale = 1.0;

 private:
  Index N_;
  std::vector<double> data_;
};

/// Frame structure functions at radius r: [E_i, E_j] = sum_m gamma[m](i,j) E_m
/// over algebra indices (0-based within the algebra), plus the radial
/// log-slopes: [E_0, E_m] = du[m] E_m. `dgamma` and `ddu` are the analytic
/// r-derivatives.
struct StructureTable {
  std::vector<Matrix> gamma;
  std::vector<Matrix> dgamma;
  Vector du, ddu;
};

StructureTable structure_functions(const FramedMetric& m, double r);

/// Full curvature of g from the orthonormal-frame connection: the Koszul
/// coefficients of the bracket table and their analytic r-derivatives.
/// This is the certification source; it assumes nothing about the block
/// structure of the result.
CurvatureTensor full_curvature(const FramedMetric& m, double r);

/// Curvature of the fiber metric g_r on G alone at fixed r (frame X_m / h_m,
/// no radial direction, no r-derivative terms).
CurvatureTensor fiber_curvature(const FramedMetric& m, double r);

/// Blockwise closed forms: G block (1/s^2) R_{g_r} plus the warped term
/// -u_a' u_b' (delta_ad delta_bc - delta_ac delta_bd); radial diagonal
/// -h_i''/h_i with radial off-pair zero; and the mixed block from the
/// displayed mixed-component formula, which is NOT trusted (see
/// compare_sources) and never feeds certification.
CurvatureTensor closed_form_curvature(const FramedMetric& m, double r);

/// Large-s limit: the warped G-block term and the radial diagonal only.
CurvatureTensor limit_curvature(const FramedMetric& m, double r);

/// Componentwise comparison of the oracle against the closed forms and the
/// limit tensor over a grid of radii and scales.
struct DiscrepancyReport {
  struct ClassRow {
    ComponentClass cls;
    double max_abs_diff = 0.0;  ///< max |oracle - closed_form| over the grid
    bool trusted = false;       ///< mixed block is reported untrusted
  };
  std::vector<ClassRow> classes;
  /// Per scale: max over the r-grid of max |oracle - limit| off nothing,
  /// i.e. over all components.
  std::vector<std::pair<double, double>> limit_gap_by_scale;
  double max_symmetry_residual = 0.0;
  double max_bianchi_residual = 0.0;
};

DiscrepancyReport compare_sources(const algebra::GradedFrame& frame,
                                  const warp::WarpProfile& profile,
                                  const std::vector<double>& r_grid,
                                  const std::vector<double>& s_list);

/// Max |R_{abcd}| over components outside the limit-tensor pattern
/// (classes g_offpair, mixed, radial_offpair); the quantity whose 1/s
/// decay is checked.
double off_pattern_max(const CurvatureTensor& R);

}  // namespace warpcert::curvature
