#pragma once

#include <map>
#include <string>
#include <vector>

#include "bfv/groups.hpp"
#include "bfv/rational.hpp"

namespace bfv {

/// A finitely supported element of the group algebra C[G] with exact
/// Gaussian-rational coefficients: x = sum c_g u_g.  Zero coefficients are
/// pruned so equality is structural.
struct AlgebraElement {
    GroupPtr group;
    std::map<Word, GaussScalar> support;

    bool is_zero() const { return support.empty(); }
    std::string str() const;
};

/// Finite-support vectors of l2(G) share the representation.
using L2Vector = AlgebraElement;

AlgebraElement zero_elt(GroupPtr g);
AlgebraElement unitary(GroupPtr g, const Word& w, GaussScalar c = GaussScalar(1));

AlgebraElement add(const AlgebraElement& x, const AlgebraElement& y);
AlgebraElement sub(const AlgebraElement& x, const AlgebraElement& y);
AlgebraElement scale(const GaussScalar& c, const AlgebraElement& x);
AlgebraElement conv_mul(const AlgebraElement& x, const AlgebraElement& y);
AlgebraElement adjoint(const AlgebraElement& x);
bool elt_equal(const AlgebraElement& x, const AlgebraElement& y);

/// tr(x) = c_e.
GaussScalar trace(const AlgebraElement& x);

/// l2 data: ||x||_2^2 = sum |c_g|^2 (exact) and the l1 norm (float).
Rational l2_norm_sq(const AlgebraElement& x);
double l1_norm(const AlgebraElement& x);

/// A *-polynomial in m variables; negative exponents are adjoint powers
/// (x^-k means (x*)^k).
struct StarPolynomial {
    struct Monomial {
        GaussScalar coeff;
        std::vector<std::pair<int, long long>> factors;  // (variable 1..m, nonzero exponent)
    };
    int arity = 0;
    std::vector<Monomial> monomials;

    std::string str() const;
};

/// Default abort threshold for convolution support blow-up.
inline constexpr size_t kSupportCap = 1000000;

AlgebraElement eval_star_poly(const StarPolynomial& p, const std::vector<AlgebraElement>& xs,
                              size_t support_cap = kSupportCap);

/// One linear-combination term of a Lemma 3.2 variable: b * u_{w(g)} where
/// w is a word in the tuple letters (+k / -k conventions as in
/// TupleMatchResult).
struct CoeffTerm {
    GaussScalar b;
    std::vector<int> letters;
};
/// One entry per polynomial variable.
using CoeffScheme = std::vector<std::vector<CoeffTerm>>;

/// y_l = sum_s b_{s,l} u_{w_{s,l}(gs)}, assembled in C[G].
std::vector<AlgebraElement> scheme_elements(GroupPtr g, const std::vector<Word>& gs,
                                            const CoeffScheme& scheme);

/// tr p(y) computed by direct expansion over index assignments, without
/// convolution: for each monomial, sums products of coefficients over all
/// choices of one term per unitary factor whose group product is the
/// identity.
GaussScalar trace_oracle_expand(const StarPolynomial& p, GroupPtr g, const std::vector<Word>& gs,
                                const CoeffScheme& scheme, size_t expansion_cap = kSupportCap);

/// Exact moments tr((y* y)^k) for k = 1..K.
std::vector<Rational> moments(const AlgebraElement& y, int K, size_t support_cap = kSupportCap);

/// Left regular representation on finite-support vectors.
L2Vector apply_regular(const AlgebraElement& y, const L2Vector& v);

struct NormBounds {
    double lower = 0;
    double upper = 0;
    double moment_lower = 0;    // best moment root
    double rayleigh_lower = 0;  // best Rayleigh quotient
};

/// lower <= ||y|| <= upper: moment roots tr((y*y)^k)^(1/2k) and truncated
/// power iteration on a ball of radius R versus the l1 upper bound.
NormBounds norm_bounds(const AlgebraElement& y, int K, int R, size_t support_cap = kSupportCap);

/// Operator norm for finite-table groups: top singular value of the
/// |G| x |G| regular-representation matrix, by power iteration.
double norm_exact_finite(const AlgebraElement& y, double tol = 1e-12);

// --- Lemma 3.2 / 3.3 / 3.4 verifiers -------------------------------------

struct TraceComparison {
    int poly_index = 0;
    GaussScalar left;
    GaussScalar right;
    bool equal = false;
};

struct TraceReport {
    bool ran = false;         // false when the match verdict forbade the run
    bool warned_unknown = false;
    bool all_equal = false;
    std::string note;
    std::vector<TraceComparison> rows;
};

TraceReport verify_trace_equality(const GroupPtr& g, const std::vector<Word>& gs,
                                  const GroupPtr& h, const std::vector<Word>& hs,
                                  const TupleMatchResult& match, const CoeffScheme& scheme,
                                  const std::vector<StarPolynomial>& polys);

struct MomentComparison {
    int poly_index = 0;
    std::vector<Rational> left;
    std::vector<Rational> right;
    bool equal = false;
    bool norm_checked = false;  // finite-group dense check performed
    double norm_left = 0;
    double norm_right = 0;
};

struct NormReport {
    bool ran = false;
    bool warned_unknown = false;
    bool all_equal = false;
    std::string note;
    std::vector<MomentComparison> rows;
};

NormReport verify_norm_equality(const GroupPtr& g, const std::vector<Word>& gs, const GroupPtr& h,
                                const std::vector<Word>& hs, const TupleMatchResult& match,
                                const CoeffScheme& scheme,
                                const std::vector<StarPolynomial>& polys, int K);

// --- parsing ---------------------------------------------------------------

/// Scalar literal: rational real/imaginary parts, e.g. "1", "-1/3", "2i",
/// "1+2i", "(1-i)".
GaussScalar parse_scalar(const std::string& text);

/// Algebra element literal, e.g. "(1+2i)*u[a*b] + (-1/3)*u[e]".
AlgebraElement parse_algebra_literal(GroupPtr g, const std::string& text);

/// *-polynomial literal, e.g. "x1^2*x2^-1 - x2*x1".
StarPolynomial parse_star_poly(const std::string& text);

}  // namespace bfv
