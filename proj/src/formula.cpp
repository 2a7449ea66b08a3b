#include "bfv/formula.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

namespace bfv {

int Formula::max_var() const {
    int m = 0;
    std::function<void(const Term&)> tv = [&](const Term& t) {
        if (t.kind == Term::Kind::Var) m = std::max(m, t.index);
        for (const auto& a : t.args) tv(a);
    };
    std::function<void(const Formula&)> fv = [&](const Formula& f) {
        for (const auto& t : f.terms) tv(t);
        for (const auto& s : f.subs) fv(s);
    };
    fv(*this);
    return m;
}

Complexity formula_complexity(const Formula& f) {
    switch (f.kind) {
        case Formula::Kind::AtomRel:
        case Formula::Kind::AtomEq:
            return {0, 0};
        case Formula::Kind::Not: {
            auto c = formula_complexity(f.subs[0]);
            return {c.pi, c.sigma};
        }
        case Formula::Kind::And:
        case Formula::Kind::Or: {
            int ms = 0, mp = 0;
            for (const auto& g : f.subs) {
                auto c = formula_complexity(g);
                ms = std::max(ms, c.sigma);
                mp = std::max(mp, c.pi);
            }
            if (ms == 0 && mp == 0) return {0, 0};
            // finite boolean combinations keep level for ranks >= 1, except the
            // connective's own side needs at least rank 1
            if (f.kind == Formula::Kind::And) return {std::max(1, ms), std::max(1, mp)};
            return {std::max(1, ms), std::max(1, mp)};
        }
        case Formula::Kind::Exists: {
            auto c = formula_complexity(f.subs[0]);
            int sigma = std::min(c.pi + 1, std::max(1, c.sigma));
            return {sigma, sigma + 1};
        }
        case Formula::Kind::Forall: {
            auto c = formula_complexity(f.subs[0]);
            int pi = std::min(c.sigma + 1, std::max(1, c.pi));
            return {pi + 1, pi};
        }
    }
    return {0, 0};
}

// ---------------------------------------------------------------------------
// Sort inference: unify variable sorts from relation/function profiles.
// Unconstrained variables default to sort 0.
// ---------------------------------------------------------------------------

namespace {

void infer_term(const Term& t, const Signature& sig, int want, std::map<int, int>& sorts) {
    switch (t.kind) {
        case Term::Kind::Var:
            if (want >= 0) sorts.emplace(t.index, want);
            break;
        case Term::Kind::Const:
            break;
        case Term::Kind::App: {
            const auto& fn = sig.functions[t.index];
            for (size_t i = 0; i < t.args.size(); ++i) infer_term(t.args[i], sig, fn.args[i], sorts);
            break;
        }
    }
}

int term_sort(const Term& t, const Signature& sig, const std::map<int, int>& sorts) {
    switch (t.kind) {
        case Term::Kind::Var: {
            auto it = sorts.find(t.index);
            return it == sorts.end() ? 0 : it->second;
        }
        case Term::Kind::Const:
            return sig.constants[t.index].sort;
        case Term::Kind::App:
            return sig.functions[t.index].result;
    }
    return 0;
}

void infer_formula(const Formula& f, const Signature& sig, std::map<int, int>& sorts) {
    switch (f.kind) {
        case Formula::Kind::AtomRel: {
            const auto& rel = sig.relations[f.index];
            for (size_t i = 0; i < f.terms.size(); ++i) infer_term(f.terms[i], sig, rel.profile[i], sorts);
            break;
        }
        case Formula::Kind::AtomEq: {
            infer_term(f.terms[0], sig, -1, sorts);
            infer_term(f.terms[1], sig, -1, sorts);
            int s0 = term_sort(f.terms[0], sig, sorts);
            infer_term(f.terms[1], sig, s0, sorts);
            int s1 = term_sort(f.terms[1], sig, sorts);
            infer_term(f.terms[0], sig, s1, sorts);
            break;
        }
        default:
            for (const auto& g : f.subs) infer_formula(g, sig, sorts);
    }
}

int eval_term(const Term& t, const FinStructure& s, const std::map<int, SortedElem>& env) {
    switch (t.kind) {
        case Term::Kind::Var:
            return env.at(t.index).second;
        case Term::Kind::Const:
            return s.const_vals[t.index];
        case Term::Kind::App: {
            std::vector<int> args;
            args.reserve(t.args.size());
            for (const auto& a : t.args) args.push_back(eval_term(a, s, env));
            return s.apply(t.index, args);
        }
    }
    return -1;
}

bool eval_rec(const FinStructure& s, const Formula& f, std::map<int, SortedElem>& env,
              const std::map<int, int>& sorts) {
    switch (f.kind) {
        case Formula::Kind::AtomRel: {
            std::vector<int> args;
            for (const auto& t : f.terms) args.push_back(eval_term(t, s, env));
            return s.holds(f.index, args);
        }
        case Formula::Kind::AtomEq: {
            int a = eval_term(f.terms[0], s, env);
            int b = eval_term(f.terms[1], s, env);
            return a == b && term_sort(f.terms[0], s.sig, sorts) == term_sort(f.terms[1], s.sig, sorts);
        }
        case Formula::Kind::Not:
            return !eval_rec(s, f.subs[0], env, sorts);
        case Formula::Kind::And:
            for (const auto& g : f.subs)
                if (!eval_rec(s, g, env, sorts)) return false;
            return true;
        case Formula::Kind::Or:
            for (const auto& g : f.subs)
                if (eval_rec(s, g, env, sorts)) return true;
            return false;
        case Formula::Kind::Exists:
        case Formula::Kind::Forall: {
            bool want_exists = f.kind == Formula::Kind::Exists;
            std::function<bool(size_t)> rec = [&](size_t i) -> bool {
                if (i == f.bound_vars.size()) return eval_rec(s, f.subs[0], env, sorts);
                int v = f.bound_vars[i];
                int so = sorts.count(v) ? sorts.at(v) : 0;
                for (int e = 0; e < s.carrier_size(so); ++e) {
                    env[v] = {so, e};
                    bool sat = rec(i + 1);
                    env.erase(v);
                    if (want_exists && sat) return true;
                    if (!want_exists && !sat) return false;
                }
                return !want_exists;
            };
            return rec(0);
        }
    }
    return false;
}

}  // namespace

void infer_var_sorts(const Formula& f, const Signature& sig, std::map<int, int>& sorts) {
    infer_formula(f, sig, sorts);
}

bool eval_formula(const FinStructure& s, const Formula& phi, const SortedTuple& t) {
    std::map<int, int> sorts;
    infer_formula(phi, s.sig, sorts);
    std::map<int, SortedElem> env;
    for (size_t i = 0; i < t.size(); ++i) {
        int var = (int)i + 1;
        auto it = sorts.find(var);
        if (it != sorts.end() && it->second != t.entries[i].first)
            throw std::invalid_argument("eval_formula: tuple sort does not match variable use");
        env[var] = t.entries[i];
    }
    int mv = phi.max_var();
    // bound variables (numbered past the free prefix) are supplied by quantifiers
    for (int v = 1; v <= mv; ++v)
        if (!env.count(v) && v <= (int)t.size())
            throw std::invalid_argument("eval_formula: free variable without assignment");
    return eval_rec(s, phi, env, sorts);
}

// ---------------------------------------------------------------------------
// S-expression pool parser.
// ---------------------------------------------------------------------------

namespace {

struct Sexp {
    std::string atom;          // empty means list
    std::vector<Sexp> items;
};

Sexp parse_sexp(const std::string& src, size_t& p, int ln) {
    auto skip = [&] { while (p < src.size() && isspace((unsigned char)src[p])) ++p; };
    skip();
    if (p >= src.size()) throw ParseError(ln, "unexpected end of formula");
    if (src[p] == '(') {
        ++p;
        Sexp s;
        skip();
        while (p < src.size() && src[p] != ')') {
            s.items.push_back(parse_sexp(src, p, ln));
            skip();
        }
        if (p >= src.size()) throw ParseError(ln, "missing ')'");
        ++p;
        return s;
    }
    Sexp s;
    while (p < src.size() && !isspace((unsigned char)src[p]) && src[p] != '(' && src[p] != ')')
        s.atom += src[p++];
    return s;
}

struct FormulaBuilder {
    const Signature& sig;
    int lineno;
    std::map<std::string, int> bound;  // bound variable symbol -> variable number
    int next_bound;

    Term term(const Sexp& s) {
        if (!s.atom.empty()) {
            if (s.atom.size() >= 2 && s.atom[0] == 'x') {
                try {
                    return Term::var(std::stoi(s.atom.substr(1)));
                } catch (...) {
                }
            }
            auto it = bound.find(s.atom);
            if (it != bound.end()) return Term::var(it->second);
            int ci = sig.constant_index(s.atom);
            if (ci >= 0) return Term::cst(ci);
            throw ParseError(lineno, "unknown term symbol " + s.atom);
        }
        if (s.items.empty() || s.items[0].atom.empty())
            throw ParseError(lineno, "bad term application");
        int fi = sig.function_index(s.items[0].atom);
        if (fi < 0) throw ParseError(lineno, "unknown function " + s.items[0].atom);
        if ((int)s.items.size() - 1 != (int)sig.functions[fi].args.size())
            throw ParseError(lineno, "function arity mismatch for " + s.items[0].atom);
        std::vector<Term> args;
        for (size_t i = 1; i < s.items.size(); ++i) args.push_back(term(s.items[i]));
        return Term::app(fi, std::move(args));
    }

    Formula formula(const Sexp& s) {
        if (s.atom.size()) throw ParseError(lineno, "formula must be a list");
        if (s.items.empty() || s.items[0].atom.empty()) throw ParseError(lineno, "empty formula");
        const std::string& head = s.items[0].atom;
        if (head == "atom") {
            if (s.items.size() < 2) throw ParseError(lineno, "atom needs a relation");
            int ri = sig.relation_index(s.items[1].atom);
            if (ri < 0) throw ParseError(lineno, "unknown relation " + s.items[1].atom);
            if ((int)s.items.size() - 2 != (int)sig.relations[ri].profile.size())
                throw ParseError(lineno, "relation arity mismatch for " + s.items[1].atom);
            std::vector<Term> ts;
            for (size_t i = 2; i < s.items.size(); ++i) ts.push_back(term(s.items[i]));
            return Formula::rel(ri, std::move(ts));
        }
        if (head == "=") {
            if (s.items.size() != 3) throw ParseError(lineno, "= takes two terms");
            return Formula::eq(term(s.items[1]), term(s.items[2]));
        }
        if (head == "not") {
            if (s.items.size() != 2) throw ParseError(lineno, "not takes one formula");
            return Formula::lnot(formula(s.items[1]));
        }
        if (head == "and" || head == "or") {
            std::vector<Formula> gs;
            for (size_t i = 1; i < s.items.size(); ++i) gs.push_back(formula(s.items[i]));
            return head == "and" ? Formula::conj(std::move(gs)) : Formula::disj(std::move(gs));
        }
        if (head == "exists" || head == "forall") {
            if (s.items.size() != 3 || !s.items[1].atom.empty())
                throw ParseError(lineno, head + " takes a variable list and a body");
            std::vector<int> vars;
            std::vector<std::string> names;
            for (const auto& v : s.items[1].items) {
                if (v.atom.empty()) throw ParseError(lineno, "bad bound variable");
                bound[v.atom] = next_bound;
                names.push_back(v.atom);
                vars.push_back(next_bound++);
            }
            Formula body = formula(s.items[2]);
            for (const auto& n : names) bound.erase(n);
            return head == "exists" ? Formula::exists(std::move(vars), std::move(body))
                                    : Formula::forall(std::move(vars), std::move(body));
        }
        throw ParseError(lineno, "unknown connective " + head);
    }
};

}  // namespace

TaggedFormula parse_pool_line(const std::string& line, const Signature& sig, int lineno) {
    size_t p = 0;
    while (p < line.size() && isspace((unsigned char)line[p])) ++p;
    std::string tag;
    while (p < line.size() && !isspace((unsigned char)line[p])) tag += line[p++];
    bool is_sigma;
    int rank;
    if (tag.rfind("sigma", 0) == 0) {
        is_sigma = true;
        rank = std::stoi(tag.substr(5));
    } else if (tag.rfind("pi", 0) == 0) {
        is_sigma = false;
        rank = std::stoi(tag.substr(2));
    } else {
        throw ParseError(lineno, "expected sigma<k> or pi<k> tag, got " + tag);
    }
    FormulaBuilder fb{sig, lineno, {}, 101};  // bound variables start past the free prefix
    Sexp s = parse_sexp(line, p, lineno);
    TaggedFormula tf;
    tf.formula = fb.formula(s);
    tf.is_sigma = is_sigma;
    tf.rank = rank;
    auto c = formula_complexity(tf.formula);
    int actual = is_sigma ? c.sigma : c.pi;
    if (actual > rank)
        throw ParseError(lineno, "declared class " + tag + " below computed complexity " +
                                     std::to_string(actual));
    return tf;
}

std::vector<TaggedFormula> parse_pool(const std::string& text, const Signature& sig) {
    std::vector<TaggedFormula> pool;
    std::istringstream in(text);
    std::string line;
    int ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        bool blank = true;
        for (char c : line)
            if (!isspace((unsigned char)c)) blank = false;
        if (blank) continue;
        pool.push_back(parse_pool_line(line, sig, ln));
    }
    return pool;
}

std::string format_formula(const Formula& f, const Signature& sig) {
    std::ostringstream out;
    std::function<void(const Term&)> pt = [&](const Term& t) {
        switch (t.kind) {
            case Term::Kind::Var:
                out << "x" << t.index;
                break;
            case Term::Kind::Const:
                out << sig.constants[t.index].name;
                break;
            case Term::Kind::App:
                out << "(" << sig.functions[t.index].name;
                for (const auto& a : t.args) {
                    out << " ";
                    pt(a);
                }
                out << ")";
                break;
        }
    };
    std::function<void(const Formula&)> pf = [&](const Formula& g) {
        switch (g.kind) {
            case Formula::Kind::AtomRel:
                out << "(atom " << sig.relations[g.index].name;
                for (const auto& t : g.terms) {
                    out << " ";
                    pt(t);
                }
                out << ")";
                break;
            case Formula::Kind::AtomEq:
                out << "(= ";
                pt(g.terms[0]);
                out << " ";
                pt(g.terms[1]);
                out << ")";
                break;
            case Formula::Kind::Not:
                out << "(not ";
                pf(g.subs[0]);
                out << ")";
                break;
            case Formula::Kind::And:
            case Formula::Kind::Or:
                out << (g.kind == Formula::Kind::And ? "(and" : "(or");
                for (const auto& s : g.subs) {
                    out << " ";
                    pf(s);
                }
                out << ")";
                break;
            case Formula::Kind::Exists:
            case Formula::Kind::Forall:
                out << (g.kind == Formula::Kind::Exists ? "(exists (" : "(forall (");
                for (size_t i = 0; i < g.bound_vars.size(); ++i)
                    out << (i ? " x" : "x") << g.bound_vars[i];
                out << ") ";
                pf(g.subs[0]);
                out << ")";
                break;
        }
    };
    pf(f);
    return out.str();
}

}  // namespace bfv
