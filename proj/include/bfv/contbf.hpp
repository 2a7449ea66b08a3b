#pragma once
// Moduli, weak moduli, the basic-formula family for tracial algebras, and
// certified lower bounds on the back-and-forth pseudo-distances r_alpha.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "bfv/algebra.hpp"
#include "bfv/matalg.hpp"

namespace bfv {

// ---------------------------------------------------------------------------
// Moduli
// ---------------------------------------------------------------------------

// A modulus of arity n: nondecreasing, subadditive, vanishing at zero.
struct Modulus {
    std::string name;
    int arity = 1;
    std::function<double(const std::vector<double>&)> eval;

    double operator()(const std::vector<double>& deltas) const { return eval(deltas); }
};

// The default atomic modulus delta1 + delta2 (the metric d on a sort).
Modulus metric_modulus();
// A 1-Lipschitz modulus of the given arity: sup of the entries.
Modulus lipschitz_modulus(int arity);

// omega_L(deltas) = sup_i delta_i (0 for the empty list).
double omega_L(const std::vector<double>& deltas);

// Truncated universal modulus: sum_{i=1}^{n} i * sup_{k <= i} Delta_{phi_k}(delta_i,...,delta_i),
// where (phi_k) is the supplied enumeration of atomic moduli (entries beyond n are 0).
double omega_U_trunc(int n, const std::vector<double>& deltas, const std::vector<Modulus>& atoms);

struct WeakModulus {
    enum class Kind { Lipschitz, Universal, CustomTruncations };
    Kind kind = Kind::Lipschitz;
    std::vector<Modulus> atoms;        // Universal: the enumeration of atomic moduli.
    std::vector<Modulus> truncations;  // CustomTruncations: truncations[n-1] is the n-ary one.
    std::string name = "Omega_L";

    // Truncation accessor Omega|_n; deltas must have length n.
    double trunc(int n, const std::vector<double>& deltas) const;

    static WeakModulus lipschitz();
    static WeakModulus universal(std::vector<Modulus> atoms);
    static WeakModulus custom(std::vector<Modulus> truncations, std::string name = "custom");
};

// ---------------------------------------------------------------------------
// Tracial tuples: a tuple of elements drawn from one finite-dimensional
// tracial algebra (group algebra of a finite group, or multi-matrix algebra).
// ---------------------------------------------------------------------------

struct TracialTuple {
    enum class Kind { GroupAlgebra, MultiMatrix };
    Kind kind = Kind::GroupAlgebra;
    GroupPtr group;                  // GroupAlgebra: must be a finite group.
    MMPtr mm;                        // MultiMatrix.
    std::vector<AlgebraElement> ga;  // GroupAlgebra entries.
    std::vector<MatElement> me;      // MultiMatrix entries.

    int size() const { return kind == Kind::GroupAlgebra ? (int)ga.size() : (int)me.size(); }
    std::string algebra_name() const;
};

TracialTuple group_tuple(GroupPtr g, std::vector<AlgebraElement> xs);
TracialTuple group_tuple_words(GroupPtr g, const std::vector<Word>& ws);
TracialTuple mm_tuple(MMPtr a, std::vector<MatElement> xs);

// ---------------------------------------------------------------------------
// Basic formulas: normalized real/imaginary parts of monomial traces.
// ---------------------------------------------------------------------------

// letters[i] = +k means the k-th tuple variable (1-based), -k its adjoint.
struct BasicFormula {
    std::vector<int> letters;
    bool imag_part = false;

    int degree() const { return (int)letters.size(); }
    std::string str() const;
};

// Exact evaluation: (Re or Im of the trace of the monomial) / degree.
Rational eval_basic_formula(const BasicFormula& f, const TracialTuple& t);

// All basic formulas in n variables of degree 1..D (both parts).
std::vector<BasicFormula> basic_formula_family(int n, int D);

// ---------------------------------------------------------------------------
// r_alpha lower bounds
// ---------------------------------------------------------------------------

struct RBound {
    int alpha = 0;
    double value = 0.0;
    bool exact_zero = false;
    Rational exact_value = 0;  // meaningful when alpha == 0 (exact max over the family)
    std::string best_formula;  // witnessing formula for the r0 max, if any
    std::string resolution;    // pools / mesh / corrections applied
};

// Certified lower bound on r_0(a, b): exact max over the degree-<=D basic-formula
// family of |phi(a) - phi(b)|. Tuples must have equal length.
RBound r0_lower(const TracialTuple& a, const TracialTuple& b, int D);

// One pooled Spoiler move: a tuple of elements from one of the two algebras.
// side == 0 extends the first tuple (Duplicator answers in the second algebra);
// side == 1 extends the second tuple.
struct PoolMove {
    int side = 0;
    TracialTuple tuple;  // entries only; kind/algebra must match the chosen side
};

// Certified lower bound on r_alpha(a, b): max over pooled Spoiler moves of
// (min over an eps-net of Duplicator responses of the level-(alpha-1) bound)
// minus the Omega-truncation correction for the net mesh; clamped at 0.
RBound r_alpha_lower(const TracialTuple& a, const TracialTuple& b, int alpha,
                     const std::vector<PoolMove>& pools, const Rational& eps,
                     const WeakModulus& omega, int D, size_t net_cap = 2000000);

// Axis-aligned rational grid covering the operator-norm unit ball of the algebra
// within l2 (trace-norm) covering radius eps; throws if the net exceeds net_cap.
std::vector<AlgebraElement> group_ball_net(GroupPtr g, const Rational& eps, size_t net_cap);
std::vector<MatElement> mm_ball_net(MMPtr a, const Rational& eps, size_t net_cap);

}  // namespace bfv
