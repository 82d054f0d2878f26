#pragma once

// Shared test utilities: finite differences and a generator of random valid
// nilpotent algebras (known families composed, rotated and re-metrized, so
// Jacobi holds to rounding and the nilpotency degree is known in advance).

#include <cmath>
#include <string>
#include <vector>

#include "warpcert/algebra.hpp"
#include "warpcert/rng.hpp"
#include "warpcert/types.hpp"

namespace testsupport {

using warpcert::Index;
using warpcert::Matrix;
using warpcert::Vector;

// Central difference of a scalar callable.
template <typename F>
double central_diff(F&& f, double x, double delta) {
  return (f(x + delta) - f(x - delta)) / (2.0 * delta);
}

// Dense structure tensor of a spec: c[m](i, j).
inline std::vector<Matrix> dense_forms(const warpcert::algebra::LieAlgebraSpec& spec) {
  std::vector<Matrix> c(static_cast<size_t>(spec.dim),
                        Matrix::Zero(spec.dim, spec.dim));
  for (const auto& e : spec.brackets) {
    c[static_cast<size_t>(e.m)](e.i, e.j) += e.value;
    c[static_cast<size_t>(e.m)](e.j, e.i) -= e.value;
  }
  return c;
}

// Direct sum of two specs (block diagonal brackets, identity inner0).
inline warpcert::algebra::LieAlgebraSpec direct_sum(
    const warpcert::algebra::LieAlgebraSpec& a,
    const warpcert::algebra::LieAlgebraSpec& b) {
  warpcert::algebra::LieAlgebraSpec out;
  out.dim = a.dim + b.dim;
  out.brackets = a.brackets;
  const int off = static_cast<int>(a.dim);
  for (auto e : b.brackets) {
    e.i += off;
    e.j += off;
    e.m += off;
    out.brackets.push_back(e);
  }
  out.name = a.name + "+" + b.name;
  return out;
}

// Random special-orthogonal matrix (QR of a Gaussian sample, det-corrected).
inline Matrix random_rotation(Index n, warpcert::rng::SplitMix64& rng) {
  Matrix g(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) g(i, j) = rng.gaussian();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  if (q.determinant() < 0) q.col(0) = -q.col(0);
  return q;
}

// Conjugates the spec by an orthogonal basis change: the new basis vectors
// are the columns of q expressed in the old basis. Jacobi is preserved up to
// rounding, and the lower central series dimensions are invariant.
inline warpcert::algebra::LieAlgebraSpec rotate_spec(
    const warpcert::algebra::LieAlgebraSpec& spec, const Matrix& q) {
  const Index n = spec.dim;
  auto c = dense_forms(spec);
  warpcert::algebra::LieAlgebraSpec out;
  out.dim = n;
  out.name = spec.name + "~";
  for (Index a = 0; a < n; ++a) {
    for (Index b = a + 1; b < n; ++b) {
      // [q a, q b] in old coordinates, then back through q^T.
      Vector w = Vector::Zero(n);
      for (Index m = 0; m < n; ++m)
        w(m) = q.col(a).transpose() * c[static_cast<size_t>(m)] * q.col(b);
      Vector v = q.transpose() * w;
      for (Index m = 0; m < n; ++m) {
        if (std::abs(v(m)) > 1e-13) {
          out.brackets.push_back({static_cast<int>(a), static_cast<int>(b),
                                  static_cast<int>(m), v(m)});
        }
      }
    }
  }
  return out;
}

struct RandomAlgebra {
  warpcert::algebra::LieAlgebraSpec spec;
  int degree = 1;  // known nilpotency degree
};

// A random valid nilpotent algebra: a known family (possibly a direct sum
// with an abelian factor), rotated by a random orthogonal matrix, sometimes
// with a random SPD inner product.
inline RandomAlgebra random_nilpotent(warpcert::rng::SplitMix64& rng) {
  namespace al = warpcert::algebra;
  RandomAlgebra out;
  switch (rng.uniform_int(0, 5)) {
    case 0: {
      out.spec = al::builtin("abelian:" +
                             std::to_string(rng.uniform_int(1, 6)));
      out.degree = 1;
      break;
    }
    case 1: {
      out.spec = al::builtin("heis3");
      out.degree = 2;
      break;
    }
    case 2: {
      out.spec = al::builtin("heis5");
      out.degree = 2;
      break;
    }
    case 3: {
      const int n = static_cast<int>(rng.uniform_int(3, 6));
      out.spec = al::builtin("filiform:" + std::to_string(n));
      out.degree = n - 1;
      break;
    }
    case 4: {
      const int k = static_cast<int>(rng.uniform_int(2, 4));
      out.spec = al::builtin("free2step:" + std::to_string(k));
      out.degree = k;
      break;
    }
    default: {
      out.spec = direct_sum(al::builtin("heis3"),
                            al::builtin("abelian:" +
                                        std::to_string(rng.uniform_int(1, 3))));
      out.degree = 2;
      break;
    }
  }
  if (rng.uniform() < 0.75) {
    Matrix q = random_rotation(out.spec.dim, rng);
    out.spec = rotate_spec(out.spec, q);
  }
  if (rng.uniform() < 0.5) {
    const Index n = out.spec.dim;
    Matrix a(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) a(i, j) = 0.25 * rng.gaussian();
    out.spec.inner0 = Matrix::Identity(n, n) + a.transpose() * a;
  }
  return out;
}

}  // namespace testsupport
