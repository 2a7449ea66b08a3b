#pragma once

#include <gmpxx.h>

#include <vector>

namespace bfv {

using ZVec = std::vector<mpz_class>;
using ZMat = std::vector<ZVec>;  // row-major

/// Canonical (row-style) Hermite normal form of the lattice spanned by the
/// rows of A: echelon rows with positive pivots, entries above each pivot
/// reduced into [0, pivot); zero rows dropped.  Two row sets span the same
/// lattice iff their HNFs are identical.
ZMat hnf_rows(ZMat a);

/// Basis of the integer kernel { v : A v = 0 } of an m x n matrix, as rows.
ZMat kernel_basis(const ZMat& a, int n);

/// Membership of v in the lattice spanned by the rows of an HNF basis.
bool lattice_contains(const ZMat& hnf, ZVec v);

}  // namespace bfv
