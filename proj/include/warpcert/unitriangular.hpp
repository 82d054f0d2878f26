#pragma once

#include <cstdint>
#include <vector>

#include "warpcert/errors.hpp"
#include "warpcert/types.hpp"

namespace warpcert::unitriangular {

/// Upper triangular integer matrix with unit diagonal. All arithmetic is
/// exact; products are accumulated in 128 bits and range-checked.
using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

bool is_unitriangular(const IntMatrix& a);

/// Exact product; throws Error if an entry leaves the int64 range.
IntMatrix mul(const IntMatrix& a, const IntMatrix& b);

/// Exact inverse of I + N via the terminating geometric series
/// I - N + N^2 - ... (N is strictly upper triangular, hence nilpotent).
IntMatrix inverse(const IntMatrix& a);

/// Group commutator a b a^{-1} b^{-1}.
IntMatrix commutator(const IntMatrix& a, const IntMatrix& b);

/// Nilpotency evidence for the unitriangular group U(m).
struct CommutatorReport {
  int m = 0;
  /// (m-1)-fold right-nested commutator of the elementary generators
  /// I + E_{i,i+1}; equals I + E_{1,m}, so its top-right entry is 1.
  IntMatrix nested_witness;
  std::int64_t corner = 0;
  bool witness_nontrivial = false;
  /// Every m-fold right-nested commutator of generators collapses to the
  /// identity (checked on deduplicated nesting levels).
  bool all_mfold_trivial = false;
  int depth_m_count = 0;  ///< distinct depth-m values (1 when trivial)
  long trials = 0;        ///< random triples checked against [a,bc] expansion
  bool triples_ok = false;
};

/// Verifies, for the group U(m) with integer entries:
///  - inverse and product round trips on random elements,
///  - the identity [a, bc] = [a,b] [b,[a,c]] [a,c] on `trials` random triples,
///  - the nested generator commutator witness of depth m-1 is I + E_{1,m},
///  - all depth-m nested commutators of generators are trivial.
/// Random entries are drawn uniformly from [-3, 3].
CommutatorReport commutator_check(int m, long trials = 1000,
                                  std::uint64_t seed = 0);

}  // namespace warpcert::unitriangular
