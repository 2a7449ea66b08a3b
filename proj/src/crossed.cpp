#include "bfv/crossed.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <stdexcept>

namespace bfv {

namespace {

void require_compatible(const TensorElement& x, const TensorElement& y) {
    if (!x.coeff->same_as(*y.coeff)) throw std::invalid_argument("tensor: leg algebra mismatch");
    if (x.group->describe() != y.group->describe() && x.group != y.group)
        throw std::invalid_argument("tensor: group mismatch");
}

/// Re-expresses t over a (sorted) superset of its legs, padding identities.
TensorElement align_legs(const TensorElement& t, const std::vector<Word>& legs) {
    TensorElement r;
    r.group = t.group;
    r.coeff = t.coeff;
    r.legs = legs;
    for (auto& term : t.terms) {
        TensorElement::Term nt;
        nt.c = term.c;
        size_t src = 0;
        for (auto& leg : legs) {
            if (src < t.legs.size() && t.legs[src] == leg)
                nt.mats.push_back(term.mats[src++]);
            else
                nt.mats.push_back(mat_one(t.coeff));
        }
        if (src != t.legs.size()) throw std::logic_error("align_legs: target is not a superset");
        r.terms.push_back(std::move(nt));
    }
    return r;
}

std::vector<Word> merge_legs(const TensorElement& x, const TensorElement& y) {
    std::vector<Word> legs = x.legs;
    legs.insert(legs.end(), y.legs.begin(), y.legs.end());
    std::sort(legs.begin(), legs.end(), Word::key_less);
    legs.erase(std::unique(legs.begin(), legs.end()), legs.end());
    return legs;
}

/// Rewrites t over the elementary-tensor basis (one matrix unit per leg) and
/// combines coefficients.  This bounds the term count by
/// (sum_b n_b^2)^{#legs} no matter how many terms arithmetic produced.
void condense(TensorElement& t) {
    if (t.terms.size() <= 16) return;
    const auto& sizes = t.coeff->sizes;
    // key: per leg, (block, row, col) of the matrix unit
    std::map<std::vector<int>, GaussScalar> combined;
    std::vector<int> key(t.legs.size() * 3);
    for (const auto& term : t.terms) {
        // DFS over one nonzero entry per leg
        std::function<void(size_t, GaussScalar)> rec = [&](size_t leg, GaussScalar c) {
            if (leg == t.legs.size()) {
                combined[key] += c;
                return;
            }
            const MatElement& m = term.mats[leg];
            for (size_t b = 0; b < sizes.size(); ++b)
                for (int r = 0; r < sizes[b]; ++r)
                    for (int col = 0; col < sizes[b]; ++col) {
                        const GaussScalar& e = m.blocks[b][r][col];
                        if (e.is_zero()) continue;
                        key[3 * leg] = (int)b;
                        key[3 * leg + 1] = r;
                        key[3 * leg + 2] = col;
                        rec(leg + 1, c * e);
                    }
        };
        rec(0, term.c);
    }
    t.terms.clear();
    for (auto& [k, c] : combined) {
        if (c.is_zero()) continue;
        TensorElement::Term nt;
        nt.c = c;
        for (size_t leg = 0; leg < t.legs.size(); ++leg)
            nt.mats.push_back(mat_unit(t.coeff, k[3 * leg], k[3 * leg + 1], k[3 * leg + 2]));
        t.terms.push_back(std::move(nt));
    }
}

void drop_zero_terms(TensorElement& t) {
    std::vector<TensorElement::Term> keep;
    for (auto& term : t.terms) {
        if (term.c.is_zero()) continue;
        bool zero = false;
        for (auto& m : term.mats)
            if (mat_is_zero(m)) zero = true;
        if (!zero) keep.push_back(std::move(term));
    }
    t.terms = std::move(keep);
}

}  // namespace

std::string TensorElement::str() const {
    if (terms.empty()) return "0";
    std::string s;
    for (auto& term : terms) {
        if (!s.empty()) s += " + ";
        s += "(" + term.c.str() + ")";
        for (size_t i = 0; i < legs.size(); ++i)
            s += " (x)_{" + word_str(*group, legs[i]) + "} " + term.mats[i].str();
    }
    return s;
}

TensorElement tensor_scalar(GroupPtr g, MMPtr m, GaussScalar c) {
    TensorElement t;
    t.group = std::move(g);
    t.coeff = std::move(m);
    if (!c.is_zero()) t.terms.push_back({c, {}});
    return t;
}

TensorElement tensor_embed(GroupPtr g, MMPtr m,
                           const std::vector<std::pair<Word, MatElement>>& entries) {
    TensorElement t;
    t.group = std::move(g);
    t.coeff = std::move(m);
    std::vector<std::pair<Word, MatElement>> sorted = entries;
    std::sort(sorted.begin(), sorted.end(),
              [](auto& a, auto& b) { return Word::key_less(a.first, b.first); });
    TensorElement::Term term;
    term.c = GaussScalar(1);
    for (size_t i = 0; i < sorted.size(); ++i) {
        if (i && sorted[i].first == sorted[i - 1].first)
            throw std::invalid_argument("tensor_embed: duplicate leg");
        if (!sorted[i].second.alg->same_as(*t.coeff))
            throw std::invalid_argument("tensor_embed: entry algebra mismatch");
        t.legs.push_back(sorted[i].first);
        term.mats.push_back(sorted[i].second);
    }
    t.terms.push_back(std::move(term));
    drop_zero_terms(t);
    return t;
}

TensorElement tensor_add(const TensorElement& x, const TensorElement& y) {
    require_compatible(x, y);
    std::vector<Word> legs = merge_legs(x, y);
    TensorElement a = align_legs(x, legs);
    TensorElement b = align_legs(y, legs);
    for (auto& t : b.terms) a.terms.push_back(std::move(t));
    condense(a);
    drop_zero_terms(a);
    return a;
}

TensorElement tensor_scale(const GaussScalar& c, const TensorElement& x) {
    TensorElement r = x;
    for (auto& t : r.terms) t.c *= c;
    drop_zero_terms(r);
    return r;
}

namespace {

// (block, row, col) per leg when every leg matrix is a scaled matrix unit;
// the scales are folded into c.
struct UnitTerm {
    GaussScalar c;
    std::vector<std::array<int, 3>> units;
};

bool as_unit_terms(const TensorElement& t, std::vector<UnitTerm>& out) {
    const auto& sizes = t.coeff->sizes;
    for (const auto& term : t.terms) {
        UnitTerm ut;
        ut.c = term.c;
        for (const auto& m : term.mats) {
            int found = 0;
            std::array<int, 3> where{0, 0, 0};
            for (size_t b = 0; b < sizes.size() && found < 2; ++b)
                for (int r = 0; r < sizes[b] && found < 2; ++r)
                    for (int c = 0; c < sizes[b]; ++c) {
                        if (m.blocks[b][r][c].is_zero()) continue;
                        if (++found > 1) break;
                        where = {(int)b, r, c};
                        ut.c *= m.blocks[b][r][c];
                    }
            if (found != 1) return false;
            ut.units.push_back(where);
        }
        out.push_back(std::move(ut));
    }
    return true;
}

}  // namespace

TensorElement tensor_mul(const TensorElement& x, const TensorElement& y, size_t cap) {
    require_compatible(x, y);
    std::vector<Word> legs = merge_legs(x, y);
    TensorElement a = align_legs(x, legs);
    TensorElement b = align_legs(y, legs);
    if (a.terms.size() * std::max<size_t>(b.terms.size(), 1) > cap)
        throw std::runtime_error("tensor_mul: term cap exceeded");
    TensorElement r;
    r.group = x.group;
    r.coeff = x.coeff;
    r.legs = legs;
    // fast path: condensed operands are in matrix-unit form, where per-leg
    // products are index matches e_{rc} e_{r'c'} = [c == r'] e_{rc'}
    std::vector<UnitTerm> ua, ub;
    if (a.terms.size() > 4 && as_unit_terms(a, ua) && as_unit_terms(b, ub)) {
        std::map<std::vector<std::array<int, 3>>, GaussScalar> combined;
        std::vector<std::array<int, 3>> key(legs.size());
        for (const auto& ta : ua)
            for (const auto& tb : ub) {
                bool zero = false;
                for (size_t i = 0; i < legs.size() && !zero; ++i) {
                    const auto& u = ta.units[i];
                    const auto& v = tb.units[i];
                    if (u[0] != v[0] || u[2] != v[1]) {
                        zero = true;
                        break;
                    }
                    key[i] = {u[0], u[1], v[2]};
                }
                if (!zero) combined[key] += ta.c * tb.c;
            }
        for (auto& [k, c] : combined) {
            if (c.is_zero()) continue;
            TensorElement::Term t;
            t.c = c;
            for (auto& u : k) t.mats.push_back(mat_unit(r.coeff, u[0], u[1], u[2]));
            r.terms.push_back(std::move(t));
        }
        drop_zero_terms(r);
        return r;
    }
    for (auto& ta : a.terms)
        for (auto& tb : b.terms) {
            TensorElement::Term t;
            t.c = ta.c * tb.c;
            for (size_t i = 0; i < legs.size(); ++i)
                t.mats.push_back(mat_mul(ta.mats[i], tb.mats[i]));
            r.terms.push_back(std::move(t));
        }
    condense(r);
    drop_zero_terms(r);
    return r;
}

TensorElement tensor_adjoint(const TensorElement& x) {
    TensorElement r = x;
    for (auto& t : r.terms) {
        t.c = t.c.conj();
        for (auto& m : t.mats) m = mat_adjoint(m);
    }
    return r;
}

GaussScalar tensor_trace(const TensorElement& x) {
    GaussScalar total;
    for (auto& t : x.terms) {
        GaussScalar prod = t.c;
        for (auto& m : t.mats) prod *= mat_trace(m);
        total += prod;
    }
    return total;
}

bool tensor_is_zero(const TensorElement& x) {
    if (x.terms.empty()) return true;
    // faithfulness of the product trace: x = 0 iff tau(x* x) = 0 exactly
    GaussScalar q = tensor_trace(tensor_mul(tensor_adjoint(x), x));
    return q.is_zero();
}

bool tensor_equal(const TensorElement& x, const TensorElement& y) {
    return tensor_is_zero(tensor_add(x, tensor_scale(GaussScalar(-1), y)));
}

TensorElement bernoulli_apply(const Word& g, const TensorElement& t) {
    if (t.group->variant != Group::Variant::FiniteTable)
        throw std::invalid_argument("bernoulli_apply: finite-table groups only");
    Word ginv = inv(*t.group, g);
    TensorElement r;
    r.group = t.group;
    r.coeff = t.coeff;
    // leg l of the input shows up at g^{-1} l; re-sort and permute entries
    std::vector<std::pair<Word, size_t>> relabeled;
    for (size_t i = 0; i < t.legs.size(); ++i)
        relabeled.push_back({mul(*t.group, ginv, t.legs[i]), i});
    std::sort(relabeled.begin(), relabeled.end(),
              [](auto& a, auto& b) { return Word::key_less(a.first, b.first); });
    for (auto& [leg, i] : relabeled) r.legs.push_back(leg);
    for (auto& term : t.terms) {
        TensorElement::Term nt;
        nt.c = term.c;
        for (auto& [leg, i] : relabeled) nt.mats.push_back(term.mats[i]);
        r.terms.push_back(std::move(nt));
    }
    return r;
}

TensorElement transport_coeffs(const std::vector<Word>& gs, GroupPtr h,
                               const std::vector<Word>& hs, const TensorElement& t) {
    if (gs.size() != hs.size()) throw std::invalid_argument("transport: tuple length mismatch");
    TensorElement r;
    r.group = std::move(h);
    r.coeff = t.coeff;
    std::vector<std::pair<Word, size_t>> relabeled;
    for (size_t i = 0; i < t.legs.size(); ++i) {
        const Word& leg = t.legs[i];
        bool found = false;
        Word target;
        for (size_t k = 0; k < gs.size(); ++k) {
            if (!(gs[k] == leg)) continue;
            if (found && !(hs[k] == target))
                throw std::invalid_argument(
                    "transport: collision pattern mismatch (broken certificate)");
            target = hs[k];
            found = true;
        }
        if (!found)
            throw std::invalid_argument("transport: leg outside the tuple entries");
        relabeled.push_back({target, i});
    }
    std::sort(relabeled.begin(), relabeled.end(),
              [](auto& a, auto& b) { return Word::key_less(a.first, b.first); });
    for (size_t i = 1; i < relabeled.size(); ++i)
        if (relabeled[i].first == relabeled[i - 1].first)
            throw std::invalid_argument(
                "transport: induced leg map not injective (broken certificate)");
    for (auto& [leg, i] : relabeled) r.legs.push_back(leg);
    for (auto& term : t.terms) {
        TensorElement::Term nt;
        nt.c = term.c;
        for (auto& [leg, i] : relabeled) nt.mats.push_back(term.mats[i]);
        r.terms.push_back(std::move(nt));
    }
    return r;
}

// ---------------------------------------------------------------------------
// Twisted algebra
// ---------------------------------------------------------------------------

std::string TwistedElement::str() const {
    if (support.empty()) return "0";
    std::string s;
    for (auto& [g, b] : support) {
        if (!s.empty()) s += " + ";
        s += "[" + b.str() + " @ " + word_str(*group, g) + "]";
    }
    return s;
}

TwistedElement twisted_zero(GroupPtr g, MMPtr m) {
    TwistedElement x;
    x.group = std::move(g);
    x.coeff = std::move(m);
    return x;
}

TwistedElement twisted_term(const TensorElement& b, const Word& g) {
    TwistedElement x = twisted_zero(b.group, b.coeff);
    if (!tensor_is_zero(b)) x.support[g] = b;
    return x;
}

namespace {

void twisted_prune(TwistedElement& x) {
    for (auto it = x.support.begin(); it != x.support.end();)
        it = tensor_is_zero(it->second) ? x.support.erase(it) : std::next(it);
}

}  // namespace

TwistedElement twisted_add(const TwistedElement& x, const TwistedElement& y) {
    TwistedElement r = x;
    for (auto& [g, b] : y.support) {
        auto it = r.support.find(g);
        if (it == r.support.end())
            r.support[g] = b;
        else
            it->second = tensor_add(it->second, b);
    }
    twisted_prune(r);
    return r;
}

TwistedElement twisted_scale(const GaussScalar& c, const TwistedElement& x) {
    TwistedElement r = x;
    for (auto& [g, b] : r.support) b = tensor_scale(c, b);
    twisted_prune(r);
    return r;
}

TwistedElement twisted_mul(const TwistedElement& x, const TwistedElement& y, size_t cap) {
    TwistedElement r = twisted_zero(x.group, x.coeff);
    for (auto& [g, b1] : x.support)
        for (auto& [h, b2] : y.support) {
            // (b1 u_g)(b2 u_h) = b1 sigma_g(b2) u_{gh}
            TensorElement prod = tensor_mul(b1, bernoulli_apply(g, b2), cap);
            Word gh = mul(*x.group, g, h);
            auto it = r.support.find(gh);
            if (it == r.support.end())
                r.support[gh] = std::move(prod);
            else
                it->second = tensor_add(it->second, prod);
        }
    twisted_prune(r);
    return r;
}

TwistedElement twisted_adjoint(const TwistedElement& x) {
    TwistedElement r = twisted_zero(x.group, x.coeff);
    for (auto& [g, b] : x.support) {
        // (b u_g)* = sigma_{g^-1}(b*) u_{g^-1}
        Word gi = inv(*x.group, g);
        TensorElement coeff = bernoulli_apply(gi, tensor_adjoint(b));
        auto it = r.support.find(gi);
        if (it == r.support.end())
            r.support[gi] = std::move(coeff);
        else
            it->second = tensor_add(it->second, coeff);
    }
    return r;
}

GaussScalar twisted_trace(const TwistedElement& x) {
    auto it = x.support.find(identity(*x.group));
    return it == x.support.end() ? GaussScalar() : tensor_trace(it->second);
}

bool twisted_equal(const TwistedElement& x, const TwistedElement& y) {
    TwistedElement d = twisted_add(x, twisted_scale(GaussScalar(-1), y));
    GaussScalar q = twisted_trace(twisted_mul(twisted_adjoint(d), d));
    return q.is_zero();
}

TwistedElement eval_star_poly_twisted(const StarPolynomial& p,
                                      const std::vector<TwistedElement>& xs, size_t cap) {
    if ((int)xs.size() < p.arity)
        throw std::invalid_argument("eval_star_poly_twisted: arity exceeds the variable count");
    if (xs.empty()) throw std::invalid_argument("eval_star_poly_twisted: no variables");
    GroupPtr g = xs[0].group;
    MMPtr m = xs[0].coeff;
    TwistedElement total = twisted_zero(g, m);
    for (auto& mono : p.monomials) {
        TwistedElement acc =
            twisted_term(tensor_scalar(g, m, mono.coeff), identity(*g));
        for (auto& [v, e] : mono.factors) {
            TwistedElement base = e > 0 ? xs[v - 1] : twisted_adjoint(xs[v - 1]);
            for (long long k = 0; k < std::llabs(e); ++k) acc = twisted_mul(acc, base, cap);
        }
        total = twisted_add(total, acc);
    }
    return total;
}

std::vector<Rational> twisted_moments(const TwistedElement& x, int K, size_t cap) {
    if (K < 1) throw std::invalid_argument("twisted_moments: K must be >= 1");
    TwistedElement m = twisted_mul(twisted_adjoint(x), x, cap);
    std::vector<Rational> out;
    TwistedElement p = m;
    for (int k = 1; k <= K; ++k) {
        GaussScalar t = twisted_trace(p);
        if (t.im != 0)
            throw std::logic_error("twisted_moments: nonreal trace of a positive element");
        out.push_back(t.re);
        if (k < K) p = twisted_mul(p, m, cap);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Lemma 6.1 verifier
// ---------------------------------------------------------------------------

std::vector<TwistedElement> crossed_scheme_elements(GroupPtr g, const std::vector<Word>& gs,
                                                    const CrossedScheme& scheme) {
    std::vector<TwistedElement> out;
    for (auto& var : scheme) {
        TwistedElement y = twisted_zero(g, var.empty() ? nullptr : var[0].b.coeff);
        for (auto& term : var) {
            if (!y.coeff) y.coeff = term.b.coeff;
            Word w = eval_letter_word(*g, gs, term.letters);
            y = twisted_add(y, twisted_term(term.b, w));
        }
        out.push_back(std::move(y));
    }
    return out;
}

std::vector<TwistedElement> crossed_scheme_elements_transported(
    const std::vector<Word>& gs, GroupPtr h, const std::vector<Word>& hs,
    const CrossedScheme& scheme) {
    std::vector<TwistedElement> out;
    for (auto& var : scheme) {
        TwistedElement z = twisted_zero(h, var.empty() ? nullptr : var[0].b.coeff);
        for (auto& term : var) {
            if (!z.coeff) z.coeff = term.b.coeff;
            TensorElement b = transport_coeffs(gs, h, hs, term.b);
            Word w = eval_letter_word(*h, hs, term.letters);
            z = twisted_add(z, twisted_term(b, w));
        }
        out.push_back(std::move(z));
    }
    return out;
}

CrossedReport verify_crossed_trace_equality(const GroupPtr& g, const std::vector<Word>& gs,
                                            const GroupPtr& h, const std::vector<Word>& hs,
                                            const TupleMatchResult& match,
                                            const CrossedScheme& scheme,
                                            const std::vector<StarPolynomial>& polys, int K) {
    CrossedReport rep;
    if (match.verdict == TupleMatchResult::Verdict::NotEqual) {
        rep.note = "refused: tuples have different quantifier-free types (witness " +
                   match.witness_str() + ")";
        return rep;
    }
    if (g->variant != Group::Variant::FiniteTable || h->variant != Group::Variant::FiniteTable) {
        rep.note = "refused: full crossed-product verification needs finite-table groups";
        return rep;
    }
    rep.ran = true;
    if (match.verdict == TupleMatchResult::Verdict::UnknownUpTo) {
        rep.warned_unknown = true;
        rep.note = "warning: qf-equality only verified up to word length " +
                   std::to_string(match.bound);
    }
    auto ys = crossed_scheme_elements(g, gs, scheme);
    auto zs = crossed_scheme_elements_transported(gs, h, hs, scheme);
    rep.all_equal = true;
    for (size_t i = 0; i < polys.size(); ++i) {
        CrossedComparison row;
        row.poly_index = (int)i;
        TwistedElement yp = eval_star_poly_twisted(polys[i], ys);
        TwistedElement zp = eval_star_poly_twisted(polys[i], zs);
        row.trace_left = twisted_trace(yp);
        row.trace_right = twisted_trace(zp);
        row.trace_equal = row.trace_left == row.trace_right;
        if (K >= 1) {
            row.moments_left = twisted_moments(yp, K);
            row.moments_right = twisted_moments(zp, K);
            row.moments_equal = row.moments_left == row.moments_right;
        } else {
            row.moments_equal = true;
        }
        if (!row.trace_equal || !row.moments_equal) rep.all_equal = false;
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

}  // namespace bfv
