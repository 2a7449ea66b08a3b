#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "bfv/structures.hpp"

namespace bfv {

/// First-order terms over a signature: variables x1, x2, ..., declared
/// constants, and function applications.
struct Term {
    enum class Kind { Var, Const, App } kind;
    int index = 0;                // variable number (1-based) or constant/function index
    std::vector<Term> args;

    static Term var(int i) { return {Kind::Var, i, {}}; }
    static Term cst(int ci) { return {Kind::Const, ci, {}}; }
    static Term app(int fi, std::vector<Term> as) { return {Kind::App, fi, std::move(as)}; }
};

/// Finitary formulas in negation-friendly form.  Complexity classes
/// Sigma_n / Pi_n are computed, with negations pushed to atoms for the
/// normal-form invariant.
struct Formula {
    enum class Kind { AtomRel, AtomEq, Not, And, Or, Exists, Forall } kind;
    int index = 0;                  // relation index for AtomRel
    std::vector<Term> terms;        // atom arguments (two for AtomEq)
    std::vector<Formula> subs;      // for Not/And/Or (Not has one)
    std::vector<int> bound_vars;    // for quantifiers (tuple quantification)

    static Formula rel(int ri, std::vector<Term> ts) {
        Formula f;
        f.kind = Kind::AtomRel;
        f.index = ri;
        f.terms = std::move(ts);
        return f;
    }
    static Formula eq(Term a, Term b) {
        Formula f;
        f.kind = Kind::AtomEq;
        f.terms = {std::move(a), std::move(b)};
        return f;
    }
    static Formula lnot(Formula g) {
        Formula f;
        f.kind = Kind::Not;
        f.subs.push_back(std::move(g));
        return f;
    }
    static Formula conj(std::vector<Formula> gs) {
        Formula f;
        f.kind = Kind::And;
        f.subs = std::move(gs);
        return f;
    }
    static Formula disj(std::vector<Formula> gs) {
        Formula f;
        f.kind = Kind::Or;
        f.subs = std::move(gs);
        return f;
    }
    static Formula exists(std::vector<int> vs, Formula g) {
        Formula f;
        f.kind = Kind::Exists;
        f.bound_vars = std::move(vs);
        f.subs.push_back(std::move(g));
        return f;
    }
    static Formula forall(std::vector<int> vs, Formula g) {
        Formula f;
        f.kind = Kind::Forall;
        f.bound_vars = std::move(vs);
        f.subs.push_back(std::move(g));
        return f;
    }

    int max_var() const;
};

/// Minimal n with the formula in Sigma_n (resp. Pi_n).
struct Complexity {
    int sigma;
    int pi;
};
Complexity formula_complexity(const Formula& f);

/// A formula annotated with a declared class tag from a pool file,
/// e.g. "sigma1".
struct TaggedFormula {
    Formula formula;
    bool is_sigma = true;
    int rank = 0;
};

/// Parses one prefix-notation line, e.g.
///   sigma1 (exists (y1) (atom R x1 y1))
/// Connectives: atom, =, not, and, or, exists, forall.  Bound variables
/// are written y1, y2, ... and are renumbered past the free x-variables.
TaggedFormula parse_pool_line(const std::string& line, const Signature& sig, int lineno = 0);

std::vector<TaggedFormula> parse_pool(const std::string& text, const Signature& sig);

/// Standard satisfaction; tuple quantifiers range over all finite tuples
/// of carrier elements.  t binds x1..xn positionally.
bool eval_formula(const FinStructure& s, const Formula& phi, const SortedTuple& t);

/// Infers variable sorts from relation/function profiles; variables the
/// formula does not constrain are left unset (callers default them to 0).
void infer_var_sorts(const Formula& f, const Signature& sig, std::map<int, int>& sorts);

std::string format_formula(const Formula& f, const Signature& sig);

}  // namespace bfv
