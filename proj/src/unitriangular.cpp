#include "warpcert/unitriangular.hpp"

#include <limits>
#include <set>

#include "warpcert/rng.hpp"

namespace warpcert::unitriangular {

using rng::derive_stream;
using rng::SplitMix64;

bool is_unitriangular(const IntMatrix& a) {
  if (a.rows() != a.cols()) return false;
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j <= i; ++j)
      if (a(i, j) != (i == j ? 1 : 0)) return false;
  return true;
}

IntMatrix mul(const IntMatrix& a, const IntMatrix& b) {
  const Index n = a.rows();
  IntMatrix out(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      __int128 acc = 0;
      for (Index l = 0; l < n; ++l)
        acc += static_cast<__int128>(a(i, l)) * static_cast<__int128>(b(l, j));
      if (acc > std::numeric_limits<std::int64_t>::max() ||
          acc < std::numeric_limits<std::int64_t>::min())
        throw Error("integer overflow in unitriangular product");
      out(i, j) = static_cast<std::int64_t>(acc);
    }
  }
  return out;
}

IntMatrix inverse(const IntMatrix& a) {
  const Index n = a.rows();
  const IntMatrix id = IntMatrix::Identity(n, n);
  const IntMatrix nil = a - id;
  IntMatrix out = id;
  IntMatrix power = id;
  for (Index step = 1; step < n; ++step) {
    power = mul(power, nil);
    if (power.cwiseAbs().maxCoeff() == 0) break;
    out += (step % 2 == 1) ? IntMatrix(-power) : power;
  }
  return out;
}

IntMatrix commutator(const IntMatrix& a, const IntMatrix& b) {
  return mul(mul(a, b), mul(inverse(a), inverse(b)));
}

namespace {

IntMatrix random_element(Index m, SplitMix64& rng) {
  IntMatrix out = IntMatrix::Identity(m, m);
  for (Index i = 0; i < m; ++i)
    for (Index j = i + 1; j < m; ++j)
      out(i, j) = rng.uniform_int(-3, 3);
  return out;
}

std::vector<std::int64_t> key_of(const IntMatrix& a) {
  return {a.data(), a.data() + a.size()};
}

bool same(const IntMatrix& a, const IntMatrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         (a.size() == 0 || (a - b).cwiseAbs().maxCoeff() == 0);
}

}  // namespace

CommutatorReport commutator_check(int m, long trials, std::uint64_t seed) {
  if (m < 2) throw IndexError("unitriangular group needs m >= 2");
  if (m > 12) throw IndexError("unitriangular check supports m <= 12");
  const Index n = m;
  const IntMatrix id = IntMatrix::Identity(n, n);

  CommutatorReport rep;
  rep.m = m;
  rep.trials = trials;

  SplitMix64 rng(derive_stream(seed, 0x7a1));
  rep.triples_ok = true;
  for (long t = 0; t < trials; ++t) {
    const IntMatrix a = random_element(n, rng);
    const IntMatrix b = random_element(n, rng);
    const IntMatrix c = random_element(n, rng);
    if (!same(mul(a, inverse(a)), id) || !is_unitriangular(mul(a, b))) {
      rep.triples_ok = false;
      break;
    }
    const IntMatrix lhs = commutator(a, mul(b, c));
    const IntMatrix rhs =
        mul(mul(commutator(a, b), commutator(b, commutator(a, c))),
            commutator(a, c));
    if (!same(lhs, rhs)) {
      rep.triples_ok = false;
      break;
    }
  }

  std::vector<IntMatrix> gens;
  for (Index i = 0; i + 1 < n; ++i) {
    IntMatrix g = id;
    g(i, i + 1) = 1;
    gens.push_back(g);
  }

  IntMatrix nested = gens.back();
  for (Index i = n - 3; i >= 0; --i) nested = commutator(gens[i], nested);
  rep.nested_witness = nested;
  rep.corner = nested(0, n - 1);
  IntMatrix expected = id;
  expected(0, n - 1) = 1;
  rep.witness_nontrivial = same(nested, expected) && !same(nested, id);

  // Level sets of right-nested generator commutators, deduplicated; the
  // chain must collapse to {identity} at depth m.
  std::vector<IntMatrix> level = gens;
  for (int depth = 2; depth <= m; ++depth) {
    std::set<std::vector<std::int64_t>> seen;
    std::vector<IntMatrix> next;
    for (const IntMatrix& g : gens) {
      for (const IntMatrix& s : level) {
        IntMatrix c = commutator(g, s);
        if (seen.insert(key_of(c)).second) next.push_back(std::move(c));
      }
    }
    level = std::move(next);
  }
  rep.depth_m_count = static_cast<int>(level.size());
  rep.all_mfold_trivial = level.size() == 1 && same(level.front(), id);
  return rep;
}

}  // namespace warpcert::unitriangular
