#pragma once

#include <map>
#include <string>
#include <vector>

#include "bfv/algebra.hpp"
#include "bfv/groups.hpp"
#include "bfv/matalg.hpp"

namespace bfv {

/// An element of M^{tensor F} for a finite leg set F of group elements,
/// stored as a sum of elementary tensors.  Legs absent from the list carry
/// the identity of M.
struct TensorElement {
    GroupPtr group;          // finite-table group the leg labels live in
    MMPtr coeff;             // the leg algebra M
    std::vector<Word> legs;  // distinct, sorted
    struct Term {
        GaussScalar c;
        std::vector<MatElement> mats;  // one per leg
    };
    std::vector<Term> terms;

    std::string str() const;
};

inline constexpr size_t kTensorTermCap = 1000000;

/// Scalar multiple of the tensor unit (empty leg set).
TensorElement tensor_scalar(GroupPtr g, MMPtr m, GaussScalar c);
/// Elementary tensor with the given per-leg entries; legs must be distinct.
TensorElement tensor_embed(GroupPtr g, MMPtr m,
                           const std::vector<std::pair<Word, MatElement>>& entries);

TensorElement tensor_add(const TensorElement& x, const TensorElement& y);
TensorElement tensor_scale(const GaussScalar& c, const TensorElement& x);
TensorElement tensor_mul(const TensorElement& x, const TensorElement& y,
                         size_t cap = kTensorTermCap);
TensorElement tensor_adjoint(const TensorElement& x);
GaussScalar tensor_trace(const TensorElement& x);
/// Exact equality via faithfulness: x == y iff tau((x-y)*(x-y)) == 0.
bool tensor_equal(const TensorElement& x, const TensorElement& y);
bool tensor_is_zero(const TensorElement& x);

/// Bernoulli action (sigma_g(x))_h = x_{gh}: leg labeled l moves to g^{-1} l.
TensorElement bernoulli_apply(const Word& g, const TensorElement& t);

/// Relabels legs along the positional bijection gs[i] -> hs[i]; requires
/// legs within the entries of gs and a well-defined, injective induced map.
TensorElement transport_coeffs(const std::vector<Word>& gs, GroupPtr h,
                               const std::vector<Word>& hs, const TensorElement& t);

/// The twisted algebra M[G]: finitely supported sums of b_g u_g with
/// (b1 u_g)(b2 u_h) = b1 sigma_g(b2) u_{gh} and (b u_g)* = sigma_{g^-1}(b*) u_{g^-1}.
struct TwistedElement {
    GroupPtr group;
    MMPtr coeff;
    std::map<Word, TensorElement> support;

    std::string str() const;
};

TwistedElement twisted_zero(GroupPtr g, MMPtr m);
TwistedElement twisted_term(const TensorElement& b, const Word& g);
TwistedElement twisted_add(const TwistedElement& x, const TwistedElement& y);
TwistedElement twisted_scale(const GaussScalar& c, const TwistedElement& x);
TwistedElement twisted_mul(const TwistedElement& x, const TwistedElement& y,
                           size_t cap = kTensorTermCap);
TwistedElement twisted_adjoint(const TwistedElement& x);
GaussScalar twisted_trace(const TwistedElement& x);
bool twisted_equal(const TwistedElement& x, const TwistedElement& y);

TwistedElement eval_star_poly_twisted(const StarPolynomial& p,
                                      const std::vector<TwistedElement>& xs,
                                      size_t cap = kTensorTermCap);
/// Exact moments tau((x* x)^k), k = 1..K, in the twisted algebra.
std::vector<Rational> twisted_moments(const TwistedElement& x, int K,
                                      size_t cap = kTensorTermCap);

/// One term of a Lemma 6.1 variable: b u_{w(gs)} with b a tensor coefficient
/// over legs drawn from the tuple entries.
struct CrossedTerm {
    TensorElement b;           // over the left group's legs
    std::vector<int> letters;  // word in tuple letters, +k / -k
};
using CrossedScheme = std::vector<std::vector<CrossedTerm>>;

/// y_l in M^{tensor G}[G] from the scheme; the right-side variables use
/// transported coefficients and the corresponding hs letter words.
std::vector<TwistedElement> crossed_scheme_elements(GroupPtr g, const std::vector<Word>& gs,
                                                    const CrossedScheme& scheme);
std::vector<TwistedElement> crossed_scheme_elements_transported(
    const std::vector<Word>& gs, GroupPtr h, const std::vector<Word>& hs,
    const CrossedScheme& scheme);

struct CrossedComparison {
    int poly_index = 0;
    GaussScalar trace_left;
    GaussScalar trace_right;
    bool trace_equal = false;
    std::vector<Rational> moments_left;
    std::vector<Rational> moments_right;
    bool moments_equal = false;
};

struct CrossedReport {
    bool ran = false;
    bool warned_unknown = false;
    bool all_equal = false;
    std::string note;
    std::vector<CrossedComparison> rows;
};

/// Lemma 6.1 / 6.3 verifier: exact trace equality and exact moment equality
/// up to K for every polynomial, with transported coefficients.
CrossedReport verify_crossed_trace_equality(const GroupPtr& g, const std::vector<Word>& gs,
                                            const GroupPtr& h, const std::vector<Word>& hs,
                                            const TupleMatchResult& match,
                                            const CrossedScheme& scheme,
                                            const std::vector<StarPolynomial>& polys, int K);

}  // namespace bfv
