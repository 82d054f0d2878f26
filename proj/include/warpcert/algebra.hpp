#pragma once

#include <string>
#include <vector>

#include "warpcert/errors.hpp"
#include "warpcert/types.hpp"

namespace warpcert::algebra {

/// One structure-constant entry [X_i, X_j] += value * X_m (0-based indices).
struct BracketEntry {
  int i = 0, j = 0, m = 0;
  double value = 0.0;
};

/// Raw description of a finite-dimensional Lie algebra: dimension, sparse
/// bracket entries over a nominal basis, and a base inner product (identity
/// when left empty). Entries may be given in either orientation; the
/// antisymmetric completion is performed by validate().
struct LieAlgebraSpec {
  Index dim = 0;
  std::vector<BracketEntry> brackets;
  Matrix inner0;  // n x n SPD; empty means identity
  std::string name;
};

/// A spec whose brackets passed index, antisymmetry, inner-product and
/// Jacobi checks. Brackets are stored densely: adj(m) is the antisymmetric
/// matrix with [x, y]_m = x^T adj(m) y.
class ValidatedAlgebra {
 public:
  ValidatedAlgebra(LieAlgebraSpec spec, std::vector<Matrix> component_forms,
                   double jacobi_residual);

  Index dim() const { return spec_.dim; }
  const std::string& name() const { return spec_.name; }
  const LieAlgebraSpec& spec() const { return spec_; }
  const Matrix& inner0() const { return spec_.inner0; }
  const Matrix& adj(Index m) const { return component_forms_[m]; }
  double jacobi_residual() const { return jacobi_residual_; }
  double max_structure_constant() const;

  Vector bracket(const Vector& x, const Vector& y) const;

 private:
  LieAlgebraSpec spec_;
  std::vector<Matrix> component_forms_;
  double jacobi_residual_;
};

/// Checks indices, completes antisymmetry, verifies inner0 is SPD and the
/// Jacobi identity holds with residual below 1e-10 * (1 + max |c|)^2.
/// Throws IndexError, BracketConflict, BadInnerProduct or JacobiViolation.
ValidatedAlgebra validate(const LieAlgebraSpec& spec);

/// Descending chain L_1 = L, L_{i+1} = [L_1, L_i] down to zero.
struct LowerCentralSeries {
  /// Orthonormal (w.r.t. inner0) column bases for L_1, ..., L_{degree+1};
  /// the last entry has zero columns.
  std::vector<Matrix> subspaces;
  int degree = 0;  ///< nilpotency degree k: smallest k with L_{k+1} = 0
  std::vector<int> dims() const;
};

/// Computes the series; throws NotNilpotent if the chain stabilises
/// at a nonzero subalgebra.
LowerCentralSeries lower_central_series(const ValidatedAlgebra& alg);

/// Orthonormal basis adapted to the grading L = F_1 + ... + F_k where F_i
/// is the inner0-orthogonal complement of L_{i+1} inside L_i. Basis columns
/// are grouped by level in ascending order; lvl[m] gives the level of
/// column m. Structure constants are re-expressed in the adapted basis.
struct GradedFrame {
  Matrix basis;                     ///< n x n, inner0-orthonormal columns
  std::vector<int> lvl;             ///< level of each adapted basis vector
  std::vector<Matrix> complements;  ///< F_1, ..., F_k in original coordinates
  LowerCentralSeries series;
  std::vector<Matrix> adapted_forms;  ///< adj matrices in the adapted basis
  std::string name;
  double max_structure_constant = 0.0;

  Index dim() const { return basis.rows(); }
  int degree() const { return series.degree; }
  int level_dim(int i) const {
    return static_cast<int>(complements[static_cast<size_t>(i - 1)].cols());
  }
  /// Bracket in adapted coordinates.
  Vector bracket(const Vector& x, const Vector& y) const;
};

GradedFrame graded_frame(const ValidatedAlgebra& alg);

/// Deepest certified level for the bracket of one level pair.
struct ContainmentEntry {
  int i = 0, j = 0;
  int depth = 0;        ///< largest d with [F_i, F_j] inside L_d (k+1 = zero)
  bool standard_ok = false;    ///< depth >= min(i + j, k + 1)
  bool stronger_holds = false; ///< depth >= min(i + j + 1, k + 1)
};

struct ContainmentReport {
  std::vector<ContainmentEntry> pairs;
  bool all_standard = false;
  bool all_stronger = false;  ///< reported, never asserted
};

/// Verifies [F_i, F_j] lands in L_{i+j} for every level pair and records
/// whether the stronger containment in L_{i+j+1} happens to hold as well.
/// Throws ContainmentViolation if the standard containment fails.
ContainmentReport bracket_level_check(const GradedFrame& frame,
                                      double tol = 1e-9);

/// Nested depth-k bracket [Z_1, [Z_2, [..., Z_k]...]] of adapted basis
/// vectors with nonzero value, found by spanning-set search.
struct BracketWitness {
  std::vector<int> indices;  ///< adapted basis indices, outermost first
  Vector value;              ///< adapted coordinates of the nested bracket
  double norm = 0.0;
};

/// Throws WitnessNotFound if no tuple reaches norm > 1e-9 (cannot happen
/// for a frame produced by graded_frame).
BracketWitness kfold_bracket_witness(const GradedFrame& frame);

/// Upper bound for the bilinear bracket operator norm: the largest spectral
/// norm over level pairs of the unfolded map F_i x F_j -> L, so that
/// |[z, w]|_0 <= C |z|_0 |w|_0 for z, w in any pair of graded pieces.
double bracket_norm_constant(const GradedFrame& frame);

/// Builtin catalog: "abelian:n", "heis3", "heis5", "filiform:n" (n >= 3),
/// "free2step:k" (1 <= k <= 5, free 2-generator nilpotent of step k on a
/// Hall basis). Throws UnknownBuiltin for anything else.
LieAlgebraSpec builtin(const std::string& name);

}  // namespace warpcert::algebra
