#include "bfv/contbf.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace bfv {

// ---------------------------------------------------------------------------
// Moduli
// ---------------------------------------------------------------------------

Modulus metric_modulus() {
    Modulus m;
    m.name = "metric";
    m.arity = 2;
    m.eval = [](const std::vector<double>& d) {
        double s = 0.0;
        for (double x : d) s += x;
        return s;
    };
    return m;
}

Modulus lipschitz_modulus(int arity) {
    Modulus m;
    m.name = "lipschitz";
    m.arity = arity;
    m.eval = [](const std::vector<double>& d) {
        double s = 0.0;
        for (double x : d) s = std::max(s, x);
        return s;
    };
    return m;
}

double omega_L(const std::vector<double>& deltas) {
    double s = 0.0;
    for (double d : deltas) s = std::max(s, d);
    return s;
}

double omega_U_trunc(int n, const std::vector<double>& deltas, const std::vector<Modulus>& atoms) {
    if ((int)deltas.size() != n) throw std::invalid_argument("omega_U_trunc: deltas must have length n");
    if (atoms.empty()) throw std::invalid_argument("omega_U_trunc: atomic moduli must be nonempty");
    double total = 0.0;
    for (int i = 1; i <= n; ++i) {
        double best = 0.0;
        int kmax = std::min<int>(i, (int)atoms.size());
        for (int k = 1; k <= kmax; ++k) {
            const Modulus& phi = atoms[k - 1];
            std::vector<double> arg((size_t)phi.arity, deltas[i - 1]);
            best = std::max(best, phi.eval(arg));
        }
        total += (double)i * best;
    }
    return total;
}

double WeakModulus::trunc(int n, const std::vector<double>& deltas) const {
    if ((int)deltas.size() != n) throw std::invalid_argument("WeakModulus::trunc: deltas must have length n");
    switch (kind) {
        case Kind::Lipschitz:
            return omega_L(deltas);
        case Kind::Universal:
            return omega_U_trunc(n, deltas, atoms);
        case Kind::CustomTruncations: {
            if (truncations.empty()) throw std::invalid_argument("WeakModulus::trunc: no truncations");
            const Modulus& f = truncations[(size_t)std::min<int>(n, (int)truncations.size()) - 1];
            std::vector<double> arg = deltas;
            arg.resize((size_t)f.arity, 0.0);
            return f.eval(arg);
        }
    }
    return 0.0;
}

WeakModulus WeakModulus::lipschitz() {
    WeakModulus w;
    w.kind = Kind::Lipschitz;
    w.name = "Omega_L";
    return w;
}

WeakModulus WeakModulus::universal(std::vector<Modulus> atoms) {
    WeakModulus w;
    w.kind = Kind::Universal;
    w.atoms = std::move(atoms);
    if (w.atoms.empty()) w.atoms.push_back(metric_modulus());
    w.name = "Omega_U";
    return w;
}

WeakModulus WeakModulus::custom(std::vector<Modulus> truncations, std::string name) {
    WeakModulus w;
    w.kind = Kind::CustomTruncations;
    w.truncations = std::move(truncations);
    w.name = std::move(name);
    return w;
}

// ---------------------------------------------------------------------------
// Tracial tuples
// ---------------------------------------------------------------------------

std::string TracialTuple::algebra_name() const {
    return kind == Kind::GroupAlgebra ? "C[" + group->describe() + "]" : mm->descriptor();
}

TracialTuple group_tuple(GroupPtr g, std::vector<AlgebraElement> xs) {
    if (!g->is_finite()) throw std::invalid_argument("group_tuple: finite groups only");
    TracialTuple t;
    t.kind = TracialTuple::Kind::GroupAlgebra;
    t.group = std::move(g);
    t.ga = std::move(xs);
    for (const auto& x : t.ga)
        if (x.group.get() != t.group.get()) throw std::invalid_argument("group_tuple: mixed groups");
    return t;
}

TracialTuple group_tuple_words(GroupPtr g, const std::vector<Word>& ws) {
    std::vector<AlgebraElement> xs;
    xs.reserve(ws.size());
    for (const Word& w : ws) xs.push_back(unitary(g, w));
    return group_tuple(std::move(g), std::move(xs));
}

TracialTuple mm_tuple(MMPtr a, std::vector<MatElement> xs) {
    TracialTuple t;
    t.kind = TracialTuple::Kind::MultiMatrix;
    t.mm = std::move(a);
    t.me = std::move(xs);
    for (const auto& x : t.me)
        if (!x.alg->same_as(*t.mm)) throw std::invalid_argument("mm_tuple: mixed algebras");
    return t;
}

// ---------------------------------------------------------------------------
// Basic formulas
// ---------------------------------------------------------------------------

std::string BasicFormula::str() const {
    std::ostringstream os;
    os << (imag_part ? "Im" : "Re") << " tr(";
    for (size_t i = 0; i < letters.size(); ++i) {
        if (i) os << " ";
        int v = letters[i];
        os << "x" << std::abs(v) << (v < 0 ? "*" : "");
    }
    os << ")/" << degree();
    return os.str();
}

Rational eval_basic_formula(const BasicFormula& f, const TracialTuple& t) {
    if (f.letters.empty()) throw std::invalid_argument("eval_basic_formula: empty monomial");
    for (int v : f.letters)
        if (v == 0 || std::abs(v) > t.size())
            throw std::invalid_argument("eval_basic_formula: variable index out of range");
    GaussScalar tr;
    if (t.kind == TracialTuple::Kind::GroupAlgebra) {
        AlgebraElement acc;
        bool first = true;
        for (int v : f.letters) {
            AlgebraElement x = v > 0 ? t.ga[(size_t)v - 1] : adjoint(t.ga[(size_t)(-v) - 1]);
            acc = first ? x : conv_mul(acc, x);
            first = false;
        }
        tr = trace(acc);
    } else {
        MatElement acc;
        bool first = true;
        for (int v : f.letters) {
            MatElement x = v > 0 ? t.me[(size_t)v - 1] : mat_adjoint(t.me[(size_t)(-v) - 1]);
            acc = first ? x : mat_mul(acc, x);
            first = false;
        }
        tr = mat_trace(acc);
    }
    Rational part = f.imag_part ? tr.im : tr.re;
    return part / Rational(f.degree());
}

std::vector<BasicFormula> basic_formula_family(int n, int D) {
    if (n < 1 || D < 1) throw std::invalid_argument("basic_formula_family: need n >= 1, D >= 1");
    // family size: 2 * sum_{L=1..D} (2n)^L
    double est = 0.0;
    double pw = 1.0;
    for (int L = 1; L <= D; ++L) {
        pw *= 2.0 * n;
        est += pw;
    }
    if (2.0 * est > 2e6) throw std::invalid_argument("basic_formula_family: degree cap exceeded");
    std::vector<BasicFormula> out;
    std::vector<int> cur;
    std::function<void()> rec = [&]() {
        if (!cur.empty()) {
            BasicFormula f;
            f.letters = cur;
            f.imag_part = false;
            out.push_back(f);
            f.imag_part = true;
            out.push_back(std::move(f));
        }
        if ((int)cur.size() == D) return;
        for (int v = 1; v <= n; ++v) {
            for (int s : {v, -v}) {
                cur.push_back(s);
                rec();
                cur.pop_back();
            }
        }
    };
    rec();
    return out;
}

namespace {

// Values of every basic formula of degree <= D on the tuple, in the same
// order as basic_formula_family(t.size(), D), computed with shared monomial
// prefix products.
std::vector<Rational> formula_trace_values(const TracialTuple& t, int D) {
    int n = t.size();
    std::vector<Rational> out;
    bool grp = t.kind == TracialTuple::Kind::GroupAlgebra;
    std::vector<AlgebraElement> gstack;
    std::vector<MatElement> mstack;
    std::function<void(int)> rec = [&](int depth) {
        if (depth > 0) {
            GaussScalar tr = grp ? trace(gstack.back()) : mat_trace(mstack.back());
            out.push_back(tr.re / Rational(depth));
            out.push_back(tr.im / Rational(depth));
        }
        if (depth == D) return;
        for (int v = 1; v <= n; ++v) {
            for (int s : {1, -1}) {
                if (grp) {
                    AlgebraElement x = s > 0 ? t.ga[(size_t)v - 1] : adjoint(t.ga[(size_t)v - 1]);
                    gstack.push_back(depth == 0 ? x : conv_mul(gstack.back(), x));
                } else {
                    MatElement x = s > 0 ? t.me[(size_t)v - 1] : mat_adjoint(t.me[(size_t)v - 1]);
                    mstack.push_back(depth == 0 ? x : mat_mul(mstack.back(), x));
                }
                rec(depth + 1);
                if (grp)
                    gstack.pop_back();
                else
                    mstack.pop_back();
            }
        }
    };
    rec(0);
    return out;
}

// max_i |va_i - vb_i|, exactly.
Rational max_abs_diff(const std::vector<Rational>& va, const std::vector<Rational>& vb, size_t* argmax) {
    Rational best = 0;
    for (size_t i = 0; i < va.size(); ++i) {
        Rational d = abs(va[i] - vb[i]);
        if (d > best) {
            best = d;
            if (argmax) *argmax = i;
        }
    }
    return best;
}

}  // namespace

// ---------------------------------------------------------------------------
// r0
// ---------------------------------------------------------------------------

RBound r0_lower(const TracialTuple& a, const TracialTuple& b, int D) {
    if (a.size() != b.size()) throw std::invalid_argument("r0_lower: tuples must have equal length");
    RBound r;
    r.alpha = 0;
    r.exact_value = 0;
    if (a.size() == 0) {
        r.exact_zero = true;
        r.resolution = "family=monomial-traces;D=" + std::to_string(D) + ";count=0";
        return r;
    }
    auto family = basic_formula_family(a.size(), D);
    auto va = formula_trace_values(a, D);
    auto vb = formula_trace_values(b, D);
    size_t argmax = 0;
    r.exact_value = max_abs_diff(va, vb, &argmax);
    if (r.exact_value > 0) r.best_formula = family[argmax].str();
    r.value = to_double(r.exact_value);
    r.exact_zero = (r.exact_value == 0);
    r.resolution =
        "family=monomial-traces;D=" + std::to_string(D) + ";count=" + std::to_string(family.size());
    return r;
}

// ---------------------------------------------------------------------------
// eps-nets
// ---------------------------------------------------------------------------

namespace {

// Enumerates k-vectors in [-m, m]^dim with sum_j w_j * (k_j/m)^2 <= (1+eps)^2,
// invoking sink on each.  w_j is the squared trace-l2 norm of the j-th real
// coordinate direction; grid step 1/m has l2 covering radius
// (1/2m)*sqrt(sum w_j) <= eps by choice of m.
void grid_enumerate(const std::vector<Rational>& w, long m, const Rational& eps, size_t cap,
                    const std::function<void(const std::vector<long>&)>& sink) {
    size_t dim = w.size();
    Rational bound = (Rational(1) + eps) * (Rational(1) + eps);
    std::vector<long> k(dim, 0);
    size_t emitted = 0;
    std::function<void(size_t, Rational)> rec = [&](size_t j, Rational acc) {
        if (j == dim) {
            if (++emitted > cap) throw std::runtime_error("ball net: net size cap exceeded");
            sink(k);
            return;
        }
        for (long v = -m; v <= m; ++v) {
            Rational term = w[j] * Rational(v) * Rational(v) / (Rational(m) * Rational(m));
            Rational nacc = acc + term;
            if (nacc > bound) continue;
            k[j] = v;
            rec(j + 1, nacc);
        }
        k[j] = 0;
    };
    rec(0, Rational(0));
}

// For abelian groups of exponent <= 2 the character table is rational (all
// values +-1); returns the characters as sign vectors, or empty if the group
// is not of that form (or too large to enumerate).
std::vector<std::vector<int>> exponent2_characters(const Group& g) {
    long n = g.order();
    if (n > 16) return {};
    for (int x = 0; x < n; ++x) {
        if (g.table[(size_t)x][(size_t)x] != g.fin_identity) return {};
        for (int y = 0; y < n; ++y)
            if (g.table[(size_t)x][(size_t)y] != g.table[(size_t)y][(size_t)x]) return {};
    }
    std::vector<std::vector<int>> chars;
    for (long mask = 0; mask < (1L << n); ++mask) {
        std::vector<int> chi((size_t)n);
        for (long i = 0; i < n; ++i) chi[(size_t)i] = (mask >> i) & 1 ? -1 : 1;
        if (chi[(size_t)g.fin_identity] != 1) continue;
        bool ok = true;
        for (int x = 0; x < n && ok; ++x)
            for (int y = 0; y < n && ok; ++y)
                if (chi[(size_t)g.table[(size_t)x][(size_t)y]] != chi[(size_t)x] * chi[(size_t)y])
                    ok = false;
        if (ok) chars.push_back(std::move(chi));
    }
    return chars;
}

// In-ball net for C[G] with G abelian of exponent <= 2: a grid over the
// eigenvalue (character) coordinates, kept exactly inside the operator-norm
// unit ball {|lambda_chi| <= 1}.  Rounding each eigenvalue toward zero onto
// the grid stays in the ball and moves it by at most h*sqrt(2), which equals
// the l2 covering radius by Plancherel; h = 1/m <= eps/sqrt(2).
std::vector<AlgebraElement> exponent2_ball_net(GroupPtr g, const std::vector<std::vector<int>>& chars,
                                               const Rational& eps, size_t net_cap) {
    long n = g->order();
    long m = 1;
    while (Rational(m) * Rational(m) * eps * eps < 2) {
        ++m;
        if (m > 1000000) throw std::runtime_error("ball net: mesh too fine");
    }
    // complex grid points inside the closed unit disc
    std::vector<std::pair<long, long>> disc;
    for (long a = -m; a <= m; ++a)
        for (long b = -m; b <= m; ++b)
            if (a * a + b * b <= m * m) disc.emplace_back(a, b);
    std::vector<AlgebraElement> net;
    std::vector<size_t> pick((size_t)n, 0);
    size_t emitted = 0;
    std::function<void(size_t)> rec = [&](size_t j) {
        if (j == (size_t)n) {
            if (++emitted > net_cap) throw std::runtime_error("ball net: net size cap exceeded");
            AlgebraElement x;
            x.group = g;
            for (long i = 0; i < n; ++i) {
                // c_g = (1/n) sum_chi lambda_chi chi(g)
                Rational re = 0, im = 0;
                for (size_t c = 0; c < (size_t)n; ++c) {
                    Rational lre = Rational(disc[pick[c]].first) / Rational(m);
                    Rational lim = Rational(disc[pick[c]].second) / Rational(m);
                    int s = chars[c][(size_t)i];
                    re += Rational(s) * lre;
                    im += Rational(s) * lim;
                }
                re /= Rational(n);
                im /= Rational(n);
                if (re == 0 && im == 0) continue;
                Word wd;
                wd.idx = (int)i;
                x.support[wd] = GaussScalar(re, im);
            }
            net.push_back(std::move(x));
            return;
        }
        for (size_t k = 0; k < disc.size(); ++k) {
            pick[j] = k;
            rec(j + 1);
        }
    };
    rec(0);
    return net;
}

// Smallest m with (2*m*eps)^2 >= S, so the grid step 1/m covers within eps.
long mesh_for(const Rational& S, const Rational& eps) {
    if (eps <= 0) throw std::invalid_argument("ball net: eps must be positive");
    long m = 1;
    while (Rational(4) * Rational(m) * Rational(m) * eps * eps < S) {
        ++m;
        if (m > 1000000) throw std::runtime_error("ball net: mesh too fine");
    }
    return m;
}

}  // namespace

std::vector<AlgebraElement> group_ball_net(GroupPtr g, const Rational& eps, size_t net_cap) {
    if (g->variant != Group::Variant::FiniteTable)
        throw std::invalid_argument("group_ball_net: finite table groups only (materialize first)");
    long n = g->order();
    auto chars = exponent2_characters(*g);
    if ((long)chars.size() == n) return exponent2_ball_net(g, chars, eps, net_cap);
    // real coordinates: Re c_g, Im c_g per element; each direction has l2 norm 1
    std::vector<Rational> w((size_t)(2 * n), Rational(1));
    long m = mesh_for(Rational(2 * n), eps);
    std::vector<AlgebraElement> net;
    grid_enumerate(w, m, eps, net_cap, [&](const std::vector<long>& k) {
        AlgebraElement x;
        x.group = g;
        for (long i = 0; i < n; ++i) {
            Rational re = Rational(k[(size_t)(2 * i)]) / Rational(m);
            Rational im = Rational(k[(size_t)(2 * i + 1)]) / Rational(m);
            if (re == 0 && im == 0) continue;
            Word wd;
            wd.idx = (int)i;
            x.support[wd] = GaussScalar(re, im);
        }
        net.push_back(std::move(x));
    });
    return net;
}

std::vector<MatElement> mm_ball_net(MMPtr a, const Rational& eps, size_t net_cap) {
    std::vector<Rational> w;
    Rational S = 0;
    for (size_t b = 0; b < a->sizes.size(); ++b) {
        Rational wn = a->weights[b] / Rational(a->sizes[b]);
        for (int i = 0; i < a->sizes[b] * a->sizes[b]; ++i) {
            w.push_back(wn);  // real part
            w.push_back(wn);  // imaginary part
            S += 2 * wn;
        }
    }
    long m = mesh_for(S, eps);
    std::vector<MatElement> net;
    grid_enumerate(w, m, eps, net_cap, [&](const std::vector<long>& k) {
        MatElement x = mat_zero(a);
        size_t j = 0;
        for (size_t b = 0; b < a->sizes.size(); ++b) {
            int n = a->sizes[b];
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) {
                    Rational re = Rational(k[j++]) / Rational(m);
                    Rational im = Rational(k[j++]) / Rational(m);
                    x.blocks[b][(size_t)r][(size_t)c] = GaussScalar(re, im);
                }
        }
        net.push_back(std::move(x));
    });
    return net;
}

// ---------------------------------------------------------------------------
// r_alpha
// ---------------------------------------------------------------------------

namespace {

TracialTuple extend_group(const TracialTuple& t, const std::vector<AlgebraElement>& xs) {
    TracialTuple out = t;
    out.ga.insert(out.ga.end(), xs.begin(), xs.end());
    return out;
}

TracialTuple extend_mm(const TracialTuple& t, const std::vector<MatElement>& xs) {
    TracialTuple out = t;
    out.me.insert(out.me.end(), xs.begin(), xs.end());
    return out;
}

TracialTuple extend_any(const TracialTuple& t, const TracialTuple& more) {
    if (more.kind != t.kind) throw std::invalid_argument("r_alpha_lower: pool tuple kind mismatch");
    if (t.kind == TracialTuple::Kind::GroupAlgebra) {
        if (more.group.get() != t.group.get())
            throw std::invalid_argument("r_alpha_lower: pool tuple from wrong group algebra");
        return extend_group(t, more.ga);
    }
    if (!more.mm->same_as(*t.mm))
        throw std::invalid_argument("r_alpha_lower: pool tuple from wrong matrix algebra");
    return extend_mm(t, more.me);
}

}  // namespace

RBound r_alpha_lower(const TracialTuple& a, const TracialTuple& b, int alpha,
                     const std::vector<PoolMove>& pools, const Rational& eps,
                     const WeakModulus& omega, int D, size_t net_cap) {
    if (alpha < 1) throw std::invalid_argument("r_alpha_lower: alpha must be >= 1");
    if (a.size() != b.size()) throw std::invalid_argument("r_alpha_lower: tuples must have equal length");
    RBound r;
    r.alpha = alpha;
    if (pools.empty()) {
        r.value = 0.0;
        r.exact_zero = true;
        r.resolution = "pools=0 (vacuous sup)";
        return r;
    }

    double best = 0.0;
    std::ostringstream res;
    res << "alpha=" << alpha << ";omega=" << omega.name << ";eps=" << to_double(eps)
        << ";pools=" << pools.size();
    for (size_t pi = 0; pi < pools.size(); ++pi) {
        const PoolMove& mv = pools[pi];
        const TracialTuple& spoiler_side = mv.side == 0 ? a : b;
        const TracialTuple& dup_side = mv.side == 0 ? b : a;
        int L = mv.tuple.size();
        if (L == 0) continue;
        TracialTuple extended_sp = extend_any(spoiler_side, mv.tuple);

        // Duplicator responses: a net of the dup-side operator-norm unit ball
        // with covering radius eps/2 (hence an eps-net), one factor per new
        // coordinate; the correction below uses the certified radius eps/2.
        Rational rho = eps / Rational(2);
        std::vector<AlgebraElement> gnet;
        std::vector<MatElement> mnet;
        size_t net_size;
        if (dup_side.kind == TracialTuple::Kind::GroupAlgebra) {
            gnet = group_ball_net(dup_side.group, rho, net_cap);
            net_size = gnet.size();
        } else {
            mnet = mm_ball_net(dup_side.mm, rho, net_cap);
            net_size = mnet.size();
        }
        std::vector<Rational> vsp;
        if (alpha == 1) vsp = formula_trace_values(extended_sp, D);
        double total = 1.0;
        for (int i = 0; i < L; ++i) total *= (double)net_size;
        if (total > (double)net_cap) throw std::runtime_error("r_alpha_lower: net size cap exceeded");

        double worst = std::numeric_limits<double>::infinity();
        std::vector<size_t> idx((size_t)L, 0);
        bool done = net_size == 0;
        while (!done) {
            TracialTuple extended_dup = dup_side;
            if (dup_side.kind == TracialTuple::Kind::GroupAlgebra) {
                std::vector<AlgebraElement> resp;
                for (int i = 0; i < L; ++i) resp.push_back(gnet[idx[(size_t)i]]);
                extended_dup = extend_group(dup_side, resp);
            } else {
                std::vector<MatElement> resp;
                for (int i = 0; i < L; ++i) resp.push_back(mnet[idx[(size_t)i]]);
                extended_dup = extend_mm(dup_side, resp);
            }
            const TracialTuple& na = mv.side == 0 ? extended_sp : extended_dup;
            const TracialTuple& nb = mv.side == 0 ? extended_dup : extended_sp;
            double v;
            if (alpha == 1) {
                auto vdup = formula_trace_values(extended_dup, D);
                v = to_double(max_abs_diff(vsp, vdup, nullptr));
            } else {
                v = r_alpha_lower(na, nb, alpha - 1, pools, eps, omega, D, net_cap).value;
            }
            worst = std::min(worst, v);
            if (worst <= 0.0) break;  // this move cannot beat the clamp
            // advance the response index vector
            int p = L - 1;
            while (p >= 0) {
                if (++idx[(size_t)p] < net_size) break;
                idx[(size_t)p] = 0;
                --p;
            }
            if (p < 0) done = true;
        }
        if (net_size == 0) worst = 0.0;

        // r_{alpha-1} obeys Omega|_n on each side, so replacing the true
        // optimal response by its nearest net point moves the value by at most
        // Omega|_n(0,...,0,eps,...,eps) with eps in the L new coordinates.
        int n_new = a.size() + L;
        std::vector<double> deltas((size_t)n_new, 0.0);
        for (int i = 0; i < L; ++i) deltas[(size_t)(a.size() + i)] = to_double(rho);
        double corr = omega.trunc(n_new, deltas);
        double candidate = worst - corr;
        res << ";move" << pi << "(side=" << mv.side << ",len=" << L << ",net=" << net_size
            << ",covering=" << to_double(rho) << ",min=" << worst << ",corr=" << corr << ")";
        best = std::max(best, candidate);
    }
    r.value = std::max(best, 0.0);
    r.exact_zero = false;
    r.resolution = res.str();
    return r;
}

}  // namespace bfv
