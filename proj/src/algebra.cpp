#include "bfv/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace bfv {

namespace {

void require_same_group(const AlgebraElement& x, const AlgebraElement& y) {
    // handles are shared, so pointer identity or identical description both do
    if (x.group != y.group && x.group->describe() != y.group->describe())
        throw std::invalid_argument("algebra: group mismatch");
}

void prune(AlgebraElement& x) {
    for (auto it = x.support.begin(); it != x.support.end();)
        it = it->second.is_zero() ? x.support.erase(it) : std::next(it);
}

}  // namespace

std::string AlgebraElement::str() const {
    if (support.empty()) return "0";
    std::string s;
    for (auto& [w, c] : support) {
        if (!s.empty()) s += " + ";
        s += "(" + c.str() + ")*u[" + word_str(*group, w) + "]";
    }
    return s;
}

AlgebraElement zero_elt(GroupPtr g) {
    AlgebraElement x;
    x.group = std::move(g);
    return x;
}

AlgebraElement unitary(GroupPtr g, const Word& w, GaussScalar c) {
    AlgebraElement x;
    x.group = std::move(g);
    if (!c.is_zero()) x.support[w] = std::move(c);
    return x;
}

AlgebraElement add(const AlgebraElement& x, const AlgebraElement& y) {
    require_same_group(x, y);
    AlgebraElement r = x;
    for (auto& [w, c] : y.support) r.support[w] += c;
    prune(r);
    return r;
}

AlgebraElement sub(const AlgebraElement& x, const AlgebraElement& y) {
    require_same_group(x, y);
    AlgebraElement r = x;
    for (auto& [w, c] : y.support) r.support[w] -= c;
    prune(r);
    return r;
}

AlgebraElement scale(const GaussScalar& c, const AlgebraElement& x) {
    AlgebraElement r = zero_elt(x.group);
    if (c.is_zero()) return r;
    for (auto& [w, v] : x.support) r.support[w] = c * v;
    return r;
}

AlgebraElement conv_mul(const AlgebraElement& x, const AlgebraElement& y) {
    require_same_group(x, y);
    AlgebraElement r = zero_elt(x.group);
    for (auto& [wx, cx] : x.support)
        for (auto& [wy, cy] : y.support) r.support[mul(*x.group, wx, wy)] += cx * cy;
    prune(r);
    return r;
}

AlgebraElement adjoint(const AlgebraElement& x) {
    AlgebraElement r = zero_elt(x.group);
    for (auto& [w, c] : x.support) r.support[inv(*x.group, w)] = c.conj();
    return r;
}

bool elt_equal(const AlgebraElement& x, const AlgebraElement& y) {
    return x.support == y.support;
}

GaussScalar trace(const AlgebraElement& x) {
    auto it = x.support.find(identity(*x.group));
    return it == x.support.end() ? GaussScalar() : it->second;
}

Rational l2_norm_sq(const AlgebraElement& x) {
    Rational s = 0;
    for (auto& [w, c] : x.support) s += c.abs2();
    return s;
}

double l1_norm(const AlgebraElement& x) {
    double s = 0;
    for (auto& [w, c] : x.support) s += std::sqrt(to_double(c.abs2()));
    return s;
}

// ---------------------------------------------------------------------------
// *-polynomials
// ---------------------------------------------------------------------------

std::string StarPolynomial::str() const {
    if (monomials.empty()) return "0";
    std::string s;
    for (auto& m : monomials) {
        if (!s.empty()) s += " + ";
        s += "(" + m.coeff.str() + ")";
        for (auto& [v, e] : m.factors) {
            s += "*x" + std::to_string(v);
            if (e != 1) s += "^" + std::to_string(e);
        }
    }
    return s;
}

namespace {

void check_cap(const AlgebraElement& x, size_t cap, const char* what) {
    if (x.support.size() > cap)
        throw std::runtime_error(std::string(what) + ": support cap of " + std::to_string(cap) +
                                 " exceeded (" + std::to_string(x.support.size()) + " terms)");
}

}  // namespace

AlgebraElement eval_star_poly(const StarPolynomial& p, const std::vector<AlgebraElement>& xs,
                              size_t support_cap) {
    if ((int)xs.size() < p.arity)
        throw std::invalid_argument("eval_star_poly: arity exceeds the variable count");
    GroupPtr g = xs.empty() ? nullptr : xs[0].group;
    for (auto& x : xs) require_same_group(xs[0], x);
    if (!g) throw std::invalid_argument("eval_star_poly: needs at least one variable");
    AlgebraElement total = zero_elt(g);
    for (auto& m : p.monomials) {
        AlgebraElement acc = unitary(g, identity(*g), m.coeff);
        for (auto& [v, e] : m.factors) {
            if (v < 1 || v > p.arity)
                throw std::invalid_argument("eval_star_poly: variable out of range");
            if (e == 0) throw std::invalid_argument("eval_star_poly: zero exponent");
            AlgebraElement base = e > 0 ? xs[v - 1] : adjoint(xs[v - 1]);
            for (long long k = 0; k < std::llabs(e); ++k) {
                acc = conv_mul(acc, base);
                check_cap(acc, support_cap, "eval_star_poly");
            }
        }
        total = add(total, acc);
        check_cap(total, support_cap, "eval_star_poly");
    }
    return total;
}

std::vector<AlgebraElement> scheme_elements(GroupPtr g, const std::vector<Word>& gs,
                                            const CoeffScheme& scheme) {
    std::vector<AlgebraElement> out;
    for (auto& var : scheme) {
        AlgebraElement y = zero_elt(g);
        for (auto& term : var)
            y = add(y, unitary(g, eval_letter_word(*g, gs, term.letters), term.b));
        out.push_back(std::move(y));
    }
    return out;
}

GaussScalar trace_oracle_expand(const StarPolynomial& p, GroupPtr g, const std::vector<Word>& gs,
                                const CoeffScheme& scheme, size_t expansion_cap) {
    // per variable: the list of (coefficient, group value) pairs and its
    // adjoint counterpart
    std::vector<std::vector<std::pair<GaussScalar, Word>>> plain(scheme.size()),
        starred(scheme.size());
    for (size_t v = 0; v < scheme.size(); ++v)
        for (auto& term : scheme[v]) {
            Word w = eval_letter_word(*g, gs, term.letters);
            plain[v].push_back({term.b, w});
            starred[v].push_back({term.b.conj(), inv(*g, w)});
        }
    GaussScalar total;
    for (auto& m : p.monomials) {
        // sequence of sums, one per unitary factor
        std::vector<const std::vector<std::pair<GaussScalar, Word>>*> seq;
        for (auto& [v, e] : m.factors) {
            if (v < 1 || v > (int)scheme.size())
                throw std::invalid_argument("trace_oracle_expand: variable out of range");
            for (long long k = 0; k < std::llabs(e); ++k)
                seq.push_back(e > 0 ? &plain[v - 1] : &starred[v - 1]);
        }
        double count = 1;
        for (auto* s : seq) count *= (double)s->size();
        if (count > (double)expansion_cap)
            throw std::runtime_error("trace_oracle_expand: expansion cap exceeded");
        // assignments whose group product is the identity contribute the
        // product of their coefficients
        GaussScalar mono_sum;
        std::function<void(size_t, const GaussScalar&, const Word&)> rec =
            [&](size_t i, const GaussScalar& coeff, const Word& prod) {
                if (coeff.is_zero()) return;
                if (i == seq.size()) {
                    if (is_identity(*g, prod)) mono_sum += coeff;
                    return;
                }
                for (auto& [b, w] : *seq[i]) rec(i + 1, coeff * b, mul(*g, prod, w));
            };
        rec(0, GaussScalar(1), identity(*g));
        total += m.coeff * mono_sum;
    }
    return total;
}

std::vector<Rational> moments(const AlgebraElement& y, int K, size_t support_cap) {
    if (K < 1) throw std::invalid_argument("moments: K must be >= 1");
    AlgebraElement m = conv_mul(adjoint(y), y);
    check_cap(m, support_cap, "moments");
    std::vector<Rational> out;
    AlgebraElement p = m;
    for (int k = 1; k <= K; ++k) {
        GaussScalar t = trace(p);
        if (t.im != 0) throw std::logic_error("moments: nonreal trace of a positive element");
        out.push_back(t.re);
        if (k < K) {
            p = conv_mul(p, m);
            check_cap(p, support_cap, "moments");
        }
    }
    return out;
}

L2Vector apply_regular(const AlgebraElement& y, const L2Vector& v) {
    require_same_group(y, v);
    L2Vector r = zero_elt(y.group);
    for (auto& [g, b] : y.support)
        for (auto& [t, c] : v.support) r.support[mul(*y.group, g, t)] += b * c;
    prune(r);
    return r;
}

// ---------------------------------------------------------------------------
// Norm bounds
// ---------------------------------------------------------------------------

namespace {

using CVec = std::map<Word, std::complex<double>>;

CVec apply_approx(const AlgebraElement& y, const CVec& v) {
    CVec r;
    for (auto& [g, b] : y.support) {
        std::complex<double> bc(to_double(b.re), to_double(b.im));
        for (auto& [t, c] : v) r[mul(*y.group, g, t)] += bc * c;
    }
    return r;
}

double norm2(const CVec& v) {
    double s = 0;
    for (auto& [w, c] : v) s += std::norm(c);
    return std::sqrt(s);
}

}  // namespace

NormBounds norm_bounds(const AlgebraElement& y, int K, int R, size_t support_cap) {
    if (K < 1 || R < 0) throw std::invalid_argument("norm_bounds: need K >= 1, R >= 0");
    NormBounds nb;
    nb.upper = l1_norm(y);
    if (y.support.empty()) {
        nb.lower = 0;
        nb.upper = 0;
        return nb;
    }
    auto ms = moments(y, K, support_cap);
    for (int k = 1; k <= K; ++k) {
        double root = std::pow(to_double(ms[k - 1]), 1.0 / (2.0 * k));
        nb.moment_lower = std::max(nb.moment_lower, root);
    }
    // truncated power iteration: iterate v <- P_ball(y* y v); every Rayleigh
    // quotient ||y v|| / ||v|| is a valid lower bound
    std::vector<Word> supp;
    for (auto& [w, c] : y.support) supp.push_back(w);
    std::vector<Word> bal = ball(*y.group, supp, R, support_cap);
    std::set<Word> bset(bal.begin(), bal.end());
    AlgebraElement ystar = adjoint(y);
    CVec v = {{identity(*y.group), 1.0}};
    double last = -1;
    for (int it = 0; it < 200; ++it) {
        double nv = norm2(v);
        if (nv == 0) break;
        CVec yv = apply_approx(y, v);
        double q = norm2(yv) / nv;
        nb.rayleigh_lower = std::max(nb.rayleigh_lower, q);
        if (std::abs(q - last) < 1e-12) break;
        last = q;
        CVec next = apply_approx(ystar, yv);
        CVec proj;
        for (auto& [w, c] : next)
            if (bset.count(w)) proj[w] = c / (nv * nv);
        if (proj.empty()) break;
        v = std::move(proj);
    }
    nb.lower = std::max(nb.moment_lower, nb.rayleigh_lower);
    // guard against floating-point overshoot past the upper bound
    nb.lower = std::min(nb.lower, nb.upper);
    return nb;
}

double norm_exact_finite(const AlgebraElement& y, double tol) {
    if (y.group->variant != Group::Variant::FiniteTable)
        throw std::invalid_argument("norm_exact_finite: finite-table groups only");
    if (tol <= 0) throw std::invalid_argument("norm_exact_finite: tol must be positive");
    if (y.support.empty()) return 0.0;
    int n = (int)y.group->table.size();
    // regular representation: column h of the matrix is y * delta_h
    std::vector<std::pair<int, std::complex<double>>> terms;
    for (auto& [w, c] : y.support)
        terms.push_back({w.idx, {to_double(c.re), to_double(c.im)}});
    auto apply = [&](const std::vector<std::complex<double>>& v, bool star) {
        std::vector<std::complex<double>> r(n, 0.0);
        for (auto& [g, c] : terms) {
            int gg = star ? y.group->fin_inv[g] : g;
            std::complex<double> cc = star ? std::conj(c) : c;
            for (int h = 0; h < n; ++h) r[y.group->table[gg][h]] += cc * v[h];
        }
        return r;
    };
    auto iterate = [&](std::vector<std::complex<double>> v) {
        double last = -1;
        for (int it = 0; it < 10000; ++it) {
            double nv = 0;
            for (auto& c : v) nv += std::norm(c);
            nv = std::sqrt(nv);
            if (nv == 0) return 0.0;
            for (auto& c : v) c /= nv;
            auto yv = apply(v, false);
            double q = 0;
            for (auto& c : yv) q += std::norm(c);
            q = std::sqrt(q);
            if (last >= 0 && std::abs(q - last) <= tol * std::max(1.0, q)) return q;
            last = q;
            v = apply(yv, true);
        }
        return last;
    };
    std::vector<std::complex<double>> seed(n, 0.0);
    seed[y.group->fin_identity] = 1.0;
    double a = iterate(seed);
    // perturbed restart guards against a seed orthogonal to the top space
    for (int i = 0; i < n; ++i) seed[i] += (1.0 + i % 7) * 1e-3;
    double b = iterate(seed);
    return std::max(a, b);
}

// ---------------------------------------------------------------------------
// Verifiers
// ---------------------------------------------------------------------------

TraceReport verify_trace_equality(const GroupPtr& g, const std::vector<Word>& gs,
                                  const GroupPtr& h, const std::vector<Word>& hs,
                                  const TupleMatchResult& match, const CoeffScheme& scheme,
                                  const std::vector<StarPolynomial>& polys) {
    TraceReport rep;
    if (match.verdict == TupleMatchResult::Verdict::NotEqual) {
        rep.note = "refused: tuples have different quantifier-free types (witness " +
                   match.witness_str() + ")";
        return rep;
    }
    rep.ran = true;
    if (match.verdict == TupleMatchResult::Verdict::UnknownUpTo) {
        rep.warned_unknown = true;
        rep.note = "warning: qf-equality only verified up to word length " +
                   std::to_string(match.bound);
    }
    auto ys = scheme_elements(g, gs, scheme);
    auto zs = scheme_elements(h, hs, scheme);
    rep.all_equal = true;
    for (size_t i = 0; i < polys.size(); ++i) {
        TraceComparison row;
        row.poly_index = (int)i;
        row.left = trace(eval_star_poly(polys[i], ys));
        row.right = trace(eval_star_poly(polys[i], zs));
        row.equal = row.left == row.right;
        if (!row.equal) rep.all_equal = false;
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

NormReport verify_norm_equality(const GroupPtr& g, const std::vector<Word>& gs, const GroupPtr& h,
                                const std::vector<Word>& hs, const TupleMatchResult& match,
                                const CoeffScheme& scheme,
                                const std::vector<StarPolynomial>& polys, int K) {
    NormReport rep;
    if (match.verdict == TupleMatchResult::Verdict::NotEqual) {
        rep.note = "refused: tuples have different quantifier-free types (witness " +
                   match.witness_str() + ")";
        return rep;
    }
    rep.ran = true;
    if (match.verdict == TupleMatchResult::Verdict::UnknownUpTo) {
        rep.warned_unknown = true;
        rep.note = "warning: qf-equality only verified up to word length " +
                   std::to_string(match.bound);
    }
    auto ys = scheme_elements(g, gs, scheme);
    auto zs = scheme_elements(h, hs, scheme);
    bool finite = g->variant == Group::Variant::FiniteTable &&
                  h->variant == Group::Variant::FiniteTable;
    rep.all_equal = true;
    for (size_t i = 0; i < polys.size(); ++i) {
        MomentComparison row;
        row.poly_index = (int)i;
        AlgebraElement yp = eval_star_poly(polys[i], ys);
        AlgebraElement zp = eval_star_poly(polys[i], zs);
        row.left = moments(yp, K);
        row.right = moments(zp, K);
        row.equal = row.left == row.right;
        if (finite) {
            row.norm_checked = true;
            row.norm_left = norm_exact_finite(yp);
            row.norm_right = norm_exact_finite(zp);
            double scale = std::max({1.0, row.norm_left, row.norm_right});
            if (std::abs(row.norm_left - row.norm_right) > 1e-9 * scale) row.equal = false;
        }
        if (!row.equal) rep.all_equal = false;
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace {

std::string strip_ws(const std::string& s) {
    std::string r;
    for (char c : s)
        if (!isspace((unsigned char)c)) r += c;
    return r;
}

// splits a sum into signed terms at top level; '-' after '^' or '*' or '('
// binds to the following literal instead
std::vector<std::pair<int, std::string>> split_terms(const std::string& s) {
    std::vector<std::pair<int, std::string>> out;
    int depth = 0, sign = 1;
    std::string cur;
    for (size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (c == '(' || c == '[' || c == '<') ++depth;
        if (c == ')' || c == ']' || c == '>') --depth;
        bool at_top = depth == 0;
        bool operand_pos = cur.empty() || cur.back() == '^' || cur.back() == '*' ||
                           cur.back() == '(' || cur.back() == '/' || cur.back() == '+' ||
                           cur.back() == '-';
        if (at_top && (c == '+' || c == '-') && !operand_pos) {
            out.push_back({sign, cur});
            cur.clear();
            sign = c == '-' ? -1 : 1;
        } else if (at_top && (c == '+' || c == '-') && cur.empty()) {
            sign *= c == '-' ? -1 : 1;
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back({sign, cur});
    return out;
}

Rational parse_rational(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty rational literal");
    Rational r;
    if (r.set_str(s, 10) != 0) throw std::invalid_argument("bad rational literal: " + s);
    r.canonicalize();
    return r;
}

}  // namespace

GaussScalar parse_scalar(const std::string& text) {
    std::string s = strip_ws(text);
    while (s.size() >= 2 && s.front() == '(' && s.back() == ')') {
        // only strip if the parens match each other
        int depth = 0;
        bool wraps = true;
        for (size_t i = 0; i + 1 < s.size(); ++i) {
            if (s[i] == '(') ++depth;
            if (s[i] == ')') --depth;
            if (depth == 0) {
                wraps = false;
                break;
            }
        }
        if (!wraps) break;
        s = s.substr(1, s.size() - 2);
    }
    GaussScalar z;
    for (auto& [sign, term] : split_terms(s)) {
        if (term.empty()) throw std::invalid_argument("bad scalar literal: " + text);
        if (term.back() == 'i') {
            std::string mag = term.substr(0, term.size() - 1);
            if (!mag.empty() && mag.back() == '*') mag.pop_back();
            Rational m = mag.empty() ? Rational(1) : parse_rational(mag);
            z.im += sign * m;
        } else {
            z.re += sign * parse_rational(term);
        }
    }
    return z;
}

AlgebraElement parse_algebra_literal(GroupPtr g, const std::string& text) {
    std::string s = strip_ws(text);
    AlgebraElement out = zero_elt(g);
    for (auto& [sign, term] : split_terms(s)) {
        GaussScalar coeff(sign);
        Word w = identity(*g);
        // split the term on top-level '*' and classify the pieces
        int depth = 0;
        std::vector<std::string> pieces;
        std::string cur;
        for (char c : term) {
            if (c == '(' || c == '[' || c == '<') ++depth;
            if (c == ')' || c == ']' || c == '>') --depth;
            if (c == '*' && depth == 0) {
                pieces.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        pieces.push_back(cur);
        for (auto& p : pieces) {
            if (p.empty()) throw std::invalid_argument("bad algebra term: " + term);
            if (p.rfind("u[", 0) == 0 && p.back() == ']') {
                w = mul(*g, w, parse_word(*g, p.substr(2, p.size() - 3)));
            } else {
                coeff *= parse_scalar(p);
            }
        }
        out = add(out, unitary(g, w, coeff));
    }
    return out;
}

StarPolynomial parse_star_poly(const std::string& text) {
    std::string s = strip_ws(text);
    StarPolynomial p;
    for (auto& [sign, term] : split_terms(s)) {
        StarPolynomial::Monomial m;
        m.coeff = GaussScalar(sign);
        int depth = 0;
        std::vector<std::string> pieces;
        std::string cur;
        for (char c : term) {
            if (c == '(') ++depth;
            if (c == ')') --depth;
            if (c == '*' && depth == 0) {
                pieces.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        pieces.push_back(cur);
        for (auto& piece : pieces) {
            if (piece.empty()) throw std::invalid_argument("bad polynomial term: " + term);
            if (piece[0] == 'x') {
                auto caret = piece.find('^');
                int var = std::stoi(piece.substr(1, caret == std::string::npos
                                                        ? std::string::npos
                                                        : caret - 1));
                long long e = caret == std::string::npos ? 1 : std::stoll(piece.substr(caret + 1));
                if (var < 1) throw std::invalid_argument("bad variable: " + piece);
                if (e == 0) throw std::invalid_argument("zero exponent: " + piece);
                m.factors.push_back({var, e});
                p.arity = std::max(p.arity, var);
            } else {
                m.coeff *= parse_scalar(piece);
            }
        }
        p.monomials.push_back(std::move(m));
    }
    return p;
}

}  // namespace bfv
