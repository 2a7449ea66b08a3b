#pragma once

#include <memory>
#include <string>
#include <vector>

#include "bfv/rational.hpp"

namespace bfv {

/// A finite-dimensional tracial *-algebra: a direct sum of matrix blocks
/// with a weighted trace tau(x) = sum_i w_i * (normalized trace of block i).
struct MultiMatrixAlgebra {
    std::vector<int> sizes;        // block sizes n_i >= 1
    std::vector<Rational> weights; // positive, summing to 1

    std::string descriptor() const;
    bool same_as(const MultiMatrixAlgebra& o) const {
        return sizes == o.sizes && weights == o.weights;
    }
    /// Real dimension of the underlying complex vector space (2 per entry).
    int real_dim() const;
};

using MMPtr = std::shared_ptr<const MultiMatrixAlgebra>;

MMPtr make_mm(std::vector<int> sizes, std::vector<Rational> weights);
/// Descriptor syntax: mm(2:1/2, 1:1/2)  (block size : weight).
MMPtr parse_mm(const std::string& text);

using GMatrix = std::vector<std::vector<GaussScalar>>;

struct MatElement {
    MMPtr alg;
    std::vector<GMatrix> blocks;

    std::string str() const;
    bool operator==(const MatElement& o) const { return blocks == o.blocks; }
};

MatElement mat_zero(MMPtr a);
MatElement mat_one(MMPtr a);
/// Matrix unit e_{rc} in one block, zero elsewhere.
MatElement mat_unit(MMPtr a, int block, int row, int col);

MatElement mat_add(const MatElement& x, const MatElement& y);
MatElement mat_sub(const MatElement& x, const MatElement& y);
MatElement mat_scale(const GaussScalar& c, const MatElement& x);
MatElement mat_mul(const MatElement& x, const MatElement& y);
MatElement mat_adjoint(const MatElement& x);
GaussScalar mat_trace(const MatElement& x);
bool mat_is_zero(const MatElement& x);

/// ||x||_2^2 = tau(x* x), exact.
Rational mat_l2_sq(const MatElement& x);

/// Operator norm (largest block singular value) by power iteration.
double mat_norm(const MatElement& x, double tol = 1e-12);

}  // namespace bfv
