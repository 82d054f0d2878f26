#include "warpcert/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <tuple>
#include <utility>

namespace warpcert::algebra {

namespace {

// Columns of an inner0-orthonormal basis for the span of M, obtained by
// modified Gram-Schmidt in column order. `chol_u` is the upper Cholesky
// factor U of inner0 (inner products become Euclidean after y = U x).
// Columns whose residual falls below `tol` times the largest input column
// norm are dropped. `scale_floor` guards the degenerate case where every
// candidate is rounding noise: without it the largest noise column would set
// the scale and survive its own threshold.
Matrix orthonormal_span(const Matrix& M, const Matrix& chol_u,
                        double tol = 1e-10, double scale_floor = 0.0) {
  if (M.cols() == 0) return Matrix(M.rows(), 0);
  Matrix Y = chol_u * M;
  double scale = scale_floor;
  for (Index c = 0; c < Y.cols(); ++c) scale = std::max(scale, Y.col(c).norm());
  if (scale == 0.0) return Matrix(M.rows(), 0);

  std::vector<Vector> kept;
  for (Index c = 0; c < Y.cols(); ++c) {
    Vector v = Y.col(c);
    for (int pass = 0; pass < 2; ++pass)
      for (const Vector& q : kept) v -= q.dot(v) * q;
    if (v.norm() > tol * scale) kept.push_back(v / v.norm());
  }
  Matrix Q(M.rows(), static_cast<Index>(kept.size()));
  for (size_t c = 0; c < kept.size(); ++c) Q.col(static_cast<Index>(c)) = kept[c];
  return chol_u.triangularView<Eigen::Upper>().solve(Q);
}

Matrix cholesky_upper(const Matrix& inner0) {
  Eigen::LLT<Matrix> llt(inner0);
  if (llt.info() != Eigen::Success)
    throw BadInnerProduct("inner product is not positive definite");
  return Matrix(llt.matrixU());
}

}  // namespace

ValidatedAlgebra::ValidatedAlgebra(LieAlgebraSpec spec,
                                   std::vector<Matrix> component_forms,
                                   double jacobi_residual)
    : spec_(std::move(spec)),
      component_forms_(std::move(component_forms)),
      jacobi_residual_(jacobi_residual) {}

double ValidatedAlgebra::max_structure_constant() const {
  double m = 0.0;
  for (const Matrix& c : component_forms_)
    m = std::max(m, c.cwiseAbs().maxCoeff());
  return m;
}

Vector ValidatedAlgebra::bracket(const Vector& x, const Vector& y) const {
  Vector out(dim());
  for (Index m = 0; m < dim(); ++m) out[m] = x.dot(component_forms_[m] * y);
  return out;
}

ValidatedAlgebra validate(const LieAlgebraSpec& spec) {
  const Index n = spec.dim;
  if (n < 1) throw IndexError("algebra dimension must be >= 1");

  LieAlgebraSpec completed = spec;
  if (completed.inner0.size() == 0)
    completed.inner0 = Matrix::Identity(n, n);
  if (completed.inner0.rows() != n || completed.inner0.cols() != n)
    throw BadInnerProduct("inner product has wrong shape");
  if ((completed.inner0 - completed.inner0.transpose()).cwiseAbs().maxCoeff() >
      1e-12 * (1.0 + completed.inner0.cwiseAbs().maxCoeff()))
    throw BadInnerProduct("inner product is not symmetric");
  cholesky_upper(completed.inner0);  // throws if not positive definite

  std::map<std::tuple<int, int, int>, double> slots;
  for (const BracketEntry& e : spec.brackets) {
    if (e.i < 0 || e.i >= n || e.j < 0 || e.j >= n || e.m < 0 || e.m >= n)
      throw IndexError("bracket entry index out of range");
    if (e.i == e.j && e.value != 0.0)
      throw IndexError("nonzero self bracket [X_i, X_i]");
    if (e.i == e.j) continue;
    const auto key = std::make_tuple(e.i, e.j, e.m);
    if (slots.count(key))
      throw BracketConflict("bracket slot given twice");
    slots[key] = e.value;
  }
  for (const auto& [key, value] : slots) {
    const auto& [i, j, m] = key;
    const auto mirror = slots.find(std::make_tuple(j, i, m));
    if (mirror != slots.end() && std::abs(mirror->second + value) >
        1e-12 * (1.0 + std::abs(value)))
      throw BracketConflict("bracket entries violate antisymmetry");
  }

  std::vector<Matrix> forms(static_cast<size_t>(n), Matrix::Zero(n, n));
  for (const auto& [key, value] : slots) {
    const auto& [i, j, m] = key;
    forms[static_cast<size_t>(m)](i, j) = value;
    forms[static_cast<size_t>(m)](j, i) = -value;
  }

  double maxc = 0.0;
  for (const Matrix& c : forms) maxc = std::max(maxc, c.cwiseAbs().maxCoeff());

  ValidatedAlgebra probe(completed, forms, 0.0);
  double residual = 0.0;
  for (Index a = 0; a < n; ++a) {
    const Vector ea = Vector::Unit(n, a);
    for (Index b = a + 1; b < n; ++b) {
      const Vector eb = Vector::Unit(n, b);
      const Vector ab = probe.bracket(ea, eb);
      for (Index c = b + 1; c < n; ++c) {
        const Vector ec = Vector::Unit(n, c);
        const Vector jac = probe.bracket(ab, ec) +
                           probe.bracket(probe.bracket(eb, ec), ea) +
                           probe.bracket(probe.bracket(ec, ea), eb);
        residual = std::max(residual, jac.cwiseAbs().maxCoeff());
      }
    }
  }
  if (residual >= 1e-10 * (1.0 + maxc) * (1.0 + maxc)) {
    std::ostringstream msg;
    msg << "Jacobi identity fails with residual " << residual;
    throw JacobiViolation(msg.str());
  }
  return ValidatedAlgebra(std::move(completed), std::move(forms), residual);
}

std::vector<int> LowerCentralSeries::dims() const {
  std::vector<int> d;
  d.reserve(subspaces.size());
  for (const Matrix& s : subspaces) d.push_back(static_cast<int>(s.cols()));
  return d;
}

LowerCentralSeries lower_central_series(const ValidatedAlgebra& alg) {
  const Index n = alg.dim();
  const Matrix chol_u = cholesky_upper(alg.inner0());

  LowerCentralSeries out;
  out.subspaces.push_back(orthonormal_span(Matrix::Identity(n, n), chol_u));
  while (true) {
    const Matrix& cur = out.subspaces.back();
    if (cur.cols() == 0) break;
    Matrix prods(n, n * cur.cols());
    Index col = 0;
    for (Index a = 0; a < n; ++a) {
      const Vector ea = Vector::Unit(n, a);
      for (Index c = 0; c < cur.cols(); ++c)
        prods.col(col++) = alg.bracket(ea, cur.col(c));
    }
    // Bracket columns of unit vectors scale with the structure constants, so
    // anchor the rank decision there rather than on the candidates alone.
    Matrix next = orthonormal_span(prods, chol_u, 1e-10,
                                   1.0 + alg.max_structure_constant());
    if (next.cols() >= cur.cols())
      throw NotNilpotent("lower central series stabilises at dimension " +
                         std::to_string(cur.cols()));
    out.subspaces.push_back(std::move(next));
  }
  out.degree = static_cast<int>(out.subspaces.size()) - 1;
  return out;
}

Vector GradedFrame::bracket(const Vector& x, const Vector& y) const {
  Vector out(dim());
  for (Index m = 0; m < dim(); ++m) out[m] = x.dot(adapted_forms[m] * y);
  return out;
}

GradedFrame graded_frame(const ValidatedAlgebra& alg) {
  const Index n = alg.dim();
  const Matrix chol_u = cholesky_upper(alg.inner0());

  GradedFrame frame;
  frame.series = lower_central_series(alg);
  frame.name = alg.name();
  const int k = frame.series.degree;

  frame.basis.resize(n, n);
  Index col = 0;
  for (int i = 1; i <= k; ++i) {
    const Matrix& li = frame.series.subspaces[static_cast<size_t>(i - 1)];
    const Matrix& lnext = frame.series.subspaces[static_cast<size_t>(i)];
    // Project away L_{i+1}, then orthonormalise what is left of L_i.
    Matrix yi = chol_u * li;
    if (lnext.cols() > 0) {
      const Matrix ynext = chol_u * lnext;
      yi -= ynext * (ynext.transpose() * yi);
    }
    const Matrix fi =
        orthonormal_span(chol_u.triangularView<Eigen::Upper>().solve(yi),
                         chol_u);
    if (fi.cols() != li.cols() - lnext.cols())
      throw Error("graded complement has unexpected dimension");
    frame.complements.push_back(fi);
    for (Index c = 0; c < fi.cols(); ++c) {
      frame.basis.col(col++) = fi.col(c);
      frame.lvl.push_back(i);
    }
  }
  if (col != n) throw Error("graded pieces do not fill the algebra");

  // Adapted coordinates: basis columns are inner0-orthonormal, so the dual
  // change of coordinates is basis^T inner0.
  const Matrix dual = frame.basis.transpose() * alg.inner0();
  frame.adapted_forms.assign(static_cast<size_t>(n), Matrix::Zero(n, n));
  for (Index a = 0; a < n; ++a) {
    for (Index b = a + 1; b < n; ++b) {
      const Vector v = dual * alg.bracket(frame.basis.col(a), frame.basis.col(b));
      for (Index m = 0; m < n; ++m) {
        frame.adapted_forms[static_cast<size_t>(m)](a, b) = v[m];
        frame.adapted_forms[static_cast<size_t>(m)](b, a) = -v[m];
      }
    }
  }
  for (const Matrix& c : frame.adapted_forms)
    frame.max_structure_constant =
        std::max(frame.max_structure_constant, c.cwiseAbs().maxCoeff());
  return frame;
}

ContainmentReport bracket_level_check(const GradedFrame& frame, double tol) {
  const Index n = frame.dim();
  const int k = frame.degree();
  const double eff = tol * (1.0 + frame.max_structure_constant);

  ContainmentReport rep;
  rep.all_standard = true;
  rep.all_stronger = true;
  std::ostringstream why;
  for (int i = 1; i <= k; ++i) {
    for (int j = i; j <= k; ++j) {
      int depth = k + 1;
      for (Index a = 0; a < n; ++a) {
        if (frame.lvl[static_cast<size_t>(a)] != i) continue;
        for (Index b = 0; b < n; ++b) {
          if (frame.lvl[static_cast<size_t>(b)] != j) continue;
          const Vector v = frame.bracket(Vector::Unit(n, a), Vector::Unit(n, b));
          for (Index m = 0; m < n; ++m)
            if (std::abs(v[m]) > eff)
              depth = std::min(depth, frame.lvl[static_cast<size_t>(m)]);
        }
      }
      ContainmentEntry e;
      e.i = i;
      e.j = j;
      e.depth = depth;
      e.standard_ok = depth >= std::min(i + j, k + 1);
      e.stronger_holds = depth >= std::min(i + j + 1, k + 1);
      rep.all_standard = rep.all_standard && e.standard_ok;
      rep.all_stronger = rep.all_stronger && e.stronger_holds;
      if (!e.standard_ok)
        why << "[F_" << i << ", F_" << j << "] only reaches level " << depth
            << "; ";
      rep.pairs.push_back(e);
    }
  }
  if (!rep.all_standard)
    throw ContainmentViolation("graded bracket containment fails: " + why.str());
  return rep;
}

BracketWitness kfold_bracket_witness(const GradedFrame& frame) {
  const Index n = frame.dim();
  const int k = frame.degree();

  struct Node {
    Vector value;
    std::vector<int> tuple;
  };
  std::vector<Node> layer;
  for (Index m = 0; m < n; ++m)
    layer.push_back({Vector::Unit(n, m), {static_cast<int>(m)}});

  for (int depth = 2; depth <= k; ++depth) {
    std::vector<Node> next;
    std::vector<Vector> span;
    for (Index a = 0; a < n; ++a) {
      for (const Node& node : layer) {
        Vector w = frame.bracket(Vector::Unit(n, a), node.value);
        Vector resid = w;
        for (int pass = 0; pass < 2; ++pass)
          for (const Vector& q : span) resid -= q.dot(resid) * q;
        if (resid.norm() > 1e-9) {
          span.push_back(resid / resid.norm());
          std::vector<int> tuple;
          tuple.push_back(static_cast<int>(a));
          tuple.insert(tuple.end(), node.tuple.begin(), node.tuple.end());
          next.push_back({std::move(w), std::move(tuple)});
        }
      }
    }
    layer = std::move(next);
  }

  const Node* best = nullptr;
  for (const Node& node : layer)
    if (!best || node.value.norm() > best->value.norm()) best = &node;
  if (!best || best->value.norm() <= 1e-9)
    throw WitnessNotFound("no nonzero depth-k nested bracket found");
  return {best->tuple, best->value, best->value.norm()};
}

double bracket_norm_constant(const GradedFrame& frame) {
  const Index n = frame.dim();
  const int k = frame.degree();
  double best = 0.0;
  for (int i = 1; i <= k; ++i) {
    for (int j = i; j <= k; ++j) {
      std::vector<Index> ai, bj;
      for (Index m = 0; m < n; ++m) {
        if (frame.lvl[static_cast<size_t>(m)] == i) ai.push_back(m);
        if (frame.lvl[static_cast<size_t>(m)] == j) bj.push_back(m);
      }
      if (ai.empty() || bj.empty()) continue;
      Matrix unfolded(n, static_cast<Index>(ai.size() * bj.size()));
      Index col = 0;
      for (Index a : ai)
        for (Index b : bj)
          unfolded.col(col++) =
              frame.bracket(Vector::Unit(n, a), Vector::Unit(n, b));
      if (unfolded.cols() > 0 && unfolded.cwiseAbs().maxCoeff() > 0.0) {
        Eigen::JacobiSVD<Matrix> svd(unfolded);
        best = std::max(best, svd.singularValues()[0]);
      }
    }
  }
  return best;
}

// --- builtin catalog -------------------------------------------------------

namespace {

// Free 2-generator nilpotent algebra of step k on a Hall basis. Hall trees
// are built with the classical recursive condition ([u, v] is basic iff
// u > v and, when u = [u1, u2], u2 <= v), ordered by degree then creation.
// Structure constants are obtained by expanding each basic bracket inside
// the truncated free associative algebra (elements indexed by words over
// two letters) and solving for the integer coordinates in the Hall basis
// of the matching degree; the expansion is exact in double precision.
struct HallElem {
  int left = -1, right = -1;  // child ids, or -1 for a generator
  int letter = -1;            // generator letter when left < 0
  int degree = 1;
};

std::vector<HallElem> hall_trees(int k) {
  std::vector<HallElem> elems;
  elems.push_back({-1, -1, 0, 1});
  elems.push_back({-1, -1, 1, 1});
  for (int d = 2; d <= k; ++d) {
    const int count = static_cast<int>(elems.size());
    for (int v = 0; v < count; ++v) {
      if (elems[v].degree >= d) continue;
      for (int u = v + 1; u < count; ++u) {
        if (elems[u].degree != d - elems[v].degree) continue;
        if (elems[u].left >= 0 && elems[u].right > v) continue;
        elems.push_back({u, v, -1, d});
      }
    }
  }
  return elems;
}

// Homogeneous degree-d element of the free associative algebra as a
// coefficient vector over the 2^d words of length d.
Vector word_concat(const Vector& a, int da, const Vector& b, int db) {
  Vector out = Vector::Zero(static_cast<Index>(1) << (da + db));
  for (Index wa = 0; wa < a.size(); ++wa) {
    if (a[wa] == 0.0) continue;
    for (Index wb = 0; wb < b.size(); ++wb)
      out[(wa << db) + wb] += a[wa] * b[wb];
  }
  return out;
}

Vector word_bracket(const Vector& a, int da, const Vector& b, int db) {
  return word_concat(a, da, b, db) - word_concat(b, db, a, da);
}

LieAlgebraSpec free_nilpotent_two(int k) {
  if (k < 1 || k > 5)
    throw UnknownBuiltin("free2step step must be between 1 and 5");
  const std::vector<HallElem> elems = hall_trees(k);
  const int n = static_cast<int>(elems.size());

  std::vector<Vector> words(static_cast<size_t>(n));
  for (int t = 0; t < n; ++t) {
    const HallElem& e = elems[static_cast<size_t>(t)];
    if (e.left < 0) {
      words[static_cast<size_t>(t)] = Vector::Unit(2, e.letter);
    } else {
      words[static_cast<size_t>(t)] = word_bracket(
          words[static_cast<size_t>(e.left)], elems[static_cast<size_t>(e.left)].degree,
          words[static_cast<size_t>(e.right)], elems[static_cast<size_t>(e.right)].degree);
    }
  }

  LieAlgebraSpec spec;
  spec.dim = n;
  spec.name = "free2step:" + std::to_string(k);
  for (int p = 0; p < n; ++p) {
    for (int q = p + 1; q < n; ++q) {
      const int d = elems[static_cast<size_t>(p)].degree +
                    elems[static_cast<size_t>(q)].degree;
      if (d > k) continue;
      const Vector v = word_bracket(words[static_cast<size_t>(p)],
                                    elems[static_cast<size_t>(p)].degree,
                                    words[static_cast<size_t>(q)],
                                    elems[static_cast<size_t>(q)].degree);
      std::vector<int> same_degree;
      for (int m = 0; m < n; ++m)
        if (elems[static_cast<size_t>(m)].degree == d) same_degree.push_back(m);
      Matrix basis(v.size(), static_cast<Index>(same_degree.size()));
      for (size_t c = 0; c < same_degree.size(); ++c)
        basis.col(static_cast<Index>(c)) =
            words[static_cast<size_t>(same_degree[c])];
      const Vector coef = basis.colPivHouseholderQr().solve(v);
      Vector rounded = coef;
      for (Index c = 0; c < rounded.size(); ++c)
        rounded[c] = std::round(rounded[c]);
      if ((basis * rounded - v).cwiseAbs().maxCoeff() > 1e-6)
        throw Error("Hall coordinates of a basic bracket are not integers");
      for (Index c = 0; c < rounded.size(); ++c)
        if (rounded[c] != 0.0)
          spec.brackets.push_back(
              {p, q, same_degree[static_cast<size_t>(c)], rounded[c]});
    }
  }
  return spec;
}

}  // namespace

LieAlgebraSpec builtin(const std::string& name) {
  const auto parse_param = [&](const std::string& prefix) -> int {
    const std::string tail = name.substr(prefix.size());
    if (tail.empty() || tail.find_first_not_of("0123456789") != std::string::npos)
      throw UnknownBuiltin("bad builtin parameter in '" + name + "'");
    return std::stoi(tail);
  };

  LieAlgebraSpec spec;
  spec.name = name;
  if (name == "heis3") {
    spec.dim = 3;
    spec.brackets.push_back({0, 1, 2, 1.0});
    return spec;
  }
  if (name == "heis5") {
    spec.dim = 5;
    spec.brackets.push_back({0, 1, 4, 1.0});
    spec.brackets.push_back({2, 3, 4, 1.0});
    return spec;
  }
  if (name.rfind("abelian:", 0) == 0) {
    const int n = parse_param("abelian:");
    if (n < 1 || n > 64) throw UnknownBuiltin("abelian dimension out of range");
    spec.dim = n;
    return spec;
  }
  if (name.rfind("filiform:", 0) == 0) {
    const int n = parse_param("filiform:");
    if (n < 3 || n > 32) throw UnknownBuiltin("filiform dimension out of range");
    spec.dim = n;
    for (int i = 1; i + 1 < n; ++i)
      spec.brackets.push_back({0, i, i + 1, 1.0});
    return spec;
  }
  if (name.rfind("free2step:", 0) == 0)
    return free_nilpotent_two(parse_param("free2step:"));
  throw UnknownBuiltin("unknown builtin algebra '" + name + "'");
}

}  // namespace warpcert::algebra
