#include "bfv/groups.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "bfv/lattice.hpp"

namespace bfv {

// ---------------------------------------------------------------------------
// Word comparison
// ---------------------------------------------------------------------------

namespace {

int word_cmp(const Word& a, const Word& b);

int syll_cmp(const Word::Syllable& a, const Word::Syllable& b) {
    if (a.factor != b.factor) return a.factor < b.factor ? -1 : 1;
    return word_cmp(*a.w, *b.w);
}

template <class T, class Cmp>
int vec_cmp(const std::vector<T>& a, const std::vector<T>& b, Cmp cmp) {
    size_t n = std::min(a.size(), b.size());
    for (size_t i = 0; i < n; ++i) {
        int c = cmp(a[i], b[i]);
        if (c) return c;
    }
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    return 0;
}

int word_cmp(const Word& a, const Word& b) {
    if (a.idx != b.idx) return a.idx < b.idx ? -1 : 1;
    if (int c = vec_cmp(a.letters, b.letters,
                        [](auto& x, auto& y) {
                            if (x != y) return x < y ? -1 : 1;
                            return 0;
                        }))
        return c;
    if (int c = vec_cmp(a.coords, b.coords,
                        [](auto& x, auto& y) {
                            if (x != y) return x < y ? -1 : 1;
                            return 0;
                        }))
        return c;
    if (int c = vec_cmp(a.comps, b.comps, word_cmp)) return c;
    return vec_cmp(a.sylls, b.sylls, syll_cmp);
}

}  // namespace

bool Word::operator==(const Word& o) const { return word_cmp(*this, o) == 0; }
bool Word::key_less(const Word& a, const Word& b) { return word_cmp(a, b) < 0; }

// ---------------------------------------------------------------------------
// Factories
// ---------------------------------------------------------------------------

namespace {

GroupPtr finish(Group g) { return std::make_shared<const Group>(std::move(g)); }

}  // namespace

GroupPtr make_finite_table(std::vector<std::vector<int>> table, std::vector<std::string> names) {
    int n = (int)table.size();
    if (n == 0) throw std::invalid_argument("finite table: empty");
    if (names.empty())
        for (int i = 0; i < n; ++i) names.push_back("g" + std::to_string(i));
    if ((int)names.size() != n) throw std::invalid_argument("finite table: name count mismatch");
    for (auto& row : table) {
        if ((int)row.size() != n) throw std::invalid_argument("finite table: not square");
        for (int v : row)
            if (v < 0 || v >= n) throw std::invalid_argument("finite table: entry out of range");
    }
    // identity
    int e = -1;
    for (int i = 0; i < n; ++i) {
        bool ok = true;
        for (int j = 0; j < n; ++j)
            if (table[i][j] != j || table[j][i] != j) ok = false;
        if (ok) {
            e = i;
            break;
        }
    }
    if (e < 0) throw std::invalid_argument("finite table: no identity element");
    // inverses
    std::vector<int> invs(n, -1);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j)
            if (table[i][j] == e && table[j][i] == e) invs[i] = j;
        if (invs[i] < 0) throw std::invalid_argument("finite table: missing inverse");
    }
    // associativity
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                if (table[table[a][b]][c] != table[a][table[b][c]])
                    throw std::invalid_argument("finite table: not associative");
    Group g;
    g.variant = Group::Variant::FiniteTable;
    g.table = std::move(table);
    g.elem_names = std::move(names);
    g.fin_identity = e;
    g.fin_inv = std::move(invs);
    return finish(std::move(g));
}

GroupPtr make_free(int rank) {
    if (rank < 0) throw std::invalid_argument("free group: negative rank");
    Group g;
    g.variant = Group::Variant::Free;
    g.rank = rank;
    return finish(std::move(g));
}

GroupPtr make_fg_abelian(std::vector<long long> moduli) {
    for (long long m : moduli)
        if (m < 0) throw std::invalid_argument("fg abelian: negative modulus");
    Group g;
    g.variant = Group::Variant::FgAbelian;
    g.moduli = std::move(moduli);
    return finish(std::move(g));
}

GroupPtr make_direct_product(std::vector<GroupPtr> factors) {
    if (factors.empty()) throw std::invalid_argument("direct product: no factors");
    Group g;
    g.variant = Group::Variant::DirectProduct;
    g.factors = std::move(factors);
    return finish(std::move(g));
}

GroupPtr make_free_product(GroupPtr a, GroupPtr b) {
    Group g;
    g.variant = Group::Variant::FreeProduct;
    g.factors = {std::move(a), std::move(b)};
    return finish(std::move(g));
}

GroupPtr make_graph_product(std::vector<std::vector<bool>> adj, std::vector<GroupPtr> vertices) {
    size_t n = vertices.size();
    if (adj.size() != n) throw std::invalid_argument("graph product: adjacency size mismatch");
    for (size_t i = 0; i < n; ++i) {
        if (adj[i].size() != n) throw std::invalid_argument("graph product: adjacency not square");
        if (adj[i][i]) throw std::invalid_argument("graph product: self-loop");
        for (size_t j = 0; j < n; ++j)
            if (adj[i][j] != adj[j][i])
                throw std::invalid_argument("graph product: adjacency not symmetric");
    }
    Group g;
    g.variant = Group::Variant::GraphProduct;
    g.adj = std::move(adj);
    g.factors = std::move(vertices);
    return finish(std::move(g));
}

bool Group::is_finite() const {
    switch (variant) {
        case Variant::FiniteTable:
            return true;
        case Variant::Free:
            return rank == 0;
        case Variant::FgAbelian:
            for (long long m : moduli)
                if (m == 0) return false;
            return true;
        case Variant::DirectProduct:
            for (auto& f : factors)
                if (!f->is_finite()) return false;
            return true;
        case Variant::FreeProduct: {
            int nontrivial = 0;
            for (auto& f : factors)
                if (!(f->is_finite() && f->order() == 1)) ++nontrivial;
            if (nontrivial == 0) return true;
            if (nontrivial >= 2) return false;
            for (auto& f : factors)
                if (!f->is_finite()) return false;
            return true;
        }
        case Variant::GraphProduct: {
            for (auto& f : factors)
                if (!f->is_finite()) return false;
            // finite iff every pair of nontrivial vertices commutes
            for (size_t i = 0; i < factors.size(); ++i)
                for (size_t j = i + 1; j < factors.size(); ++j)
                    if (!adj[i][j] && factors[i]->order() > 1 && factors[j]->order() > 1)
                        return false;
            return true;
        }
    }
    return false;
}

long long Group::order() const {
    if (!is_finite()) throw std::invalid_argument("order: infinite group");
    switch (variant) {
        case Variant::FiniteTable:
            return (long long)table.size();
        case Variant::Free:
            return 1;
        case Variant::FgAbelian: {
            long long p = 1;
            for (long long m : moduli) p *= m;
            return p;
        }
        default: {
            long long p = 1;
            for (auto& f : factors) p *= f->order();
            return p;
        }
    }
}

std::string Group::describe() const {
    switch (variant) {
        case Variant::FiniteTable:
            return "table[" + std::to_string(table.size()) + "]";
        case Variant::Free:
            return "free(" + std::to_string(rank) + ")";
        case Variant::FgAbelian: {
            std::string s = "abelian(";
            for (size_t i = 0; i < moduli.size(); ++i)
                s += (i ? "," : "") + (moduli[i] ? std::to_string(moduli[i]) : std::string("Z"));
            return s + ")";
        }
        case Variant::DirectProduct: {
            std::string s = "prod(";
            for (size_t i = 0; i < factors.size(); ++i) s += (i ? "," : "") + factors[i]->describe();
            return s + ")";
        }
        case Variant::FreeProduct:
            return "freeprod(" + factors[0]->describe() + "," + factors[1]->describe() + ")";
        case Variant::GraphProduct: {
            std::string s = "graphprod[" + std::to_string(factors.size()) + "](";
            for (size_t i = 0; i < factors.size(); ++i) s += (i ? "," : "") + factors[i]->describe();
            return s + ")";
        }
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Word problem
// ---------------------------------------------------------------------------

Word identity(const Group& g) {
    Word w;
    switch (g.variant) {
        case Group::Variant::FiniteTable:
            w.idx = g.fin_identity;
            break;
        case Group::Variant::FgAbelian:
            w.coords.assign(g.moduli.size(), 0);
            break;
        case Group::Variant::DirectProduct:
            for (auto& f : g.factors) w.comps.push_back(identity(*f));
            break;
        default:
            break;  // Free / FreeProduct / GraphProduct: empty sequence
    }
    return w;
}

bool is_identity(const Group& g, const Word& x) { return x == identity(g); }
bool word_equal(const Group& g, const Word& x, const Word& y) { return x == y; }

namespace {

long long mod_reduce(long long c, long long m) {
    if (m == 0) return c;
    long long r = c % m;
    return r < 0 ? r + m : r;
}

// append (gen, exp) to a reduced letter sequence, keeping it reduced
void push_letter(std::vector<std::pair<int, long long>>& out, int gen, long long exp) {
    if (exp == 0) return;
    if (!out.empty() && out.back().first == gen) {
        out.back().second += exp;
        if (out.back().second == 0) out.pop_back();
    } else {
        out.push_back({gen, exp});
    }
}

Word free_mul(const Word& x, const Word& y) {
    Word r;
    r.letters = x.letters;
    for (auto& [gen, exp] : y.letters) push_letter(r.letters, gen, exp);
    return r;
}

// graph-product normal form: greedy leftmost insertion with merges
// (lexicographic normal form of the syllable trace; same-vertex syllables
// merge when a commuting corridor connects them)
std::vector<Word::Syllable> graph_normalize(const Group& g,
                                            const std::vector<Word::Syllable>& input);

void graph_push(const Group& g, std::vector<Word::Syllable>& nf, const Word::Syllable& s,
                bool& merged_flag) {
    const Group& vg = *g.factors[s.factor];
    if (is_identity(vg, *s.w)) return;
    // largest suffix of nf whose vertices all commute with s.factor
    size_t p = nf.size();
    while (p > 0 && g.adj[nf[p - 1].factor][s.factor]) --p;
    if (p > 0 && nf[p - 1].factor == s.factor) {
        Word m = mul(vg, *nf[p - 1].w, *s.w);
        nf.erase(nf.begin() + (p - 1));
        merged_flag = true;
        if (!is_identity(vg, m)) {
            Word::Syllable t{s.factor, std::make_shared<Word>(std::move(m))};
            nf.insert(nf.begin() + (p - 1), t);
        }
        return;
    }
    // insert before the first strictly larger vertex in the movable suffix
    size_t pos = nf.size();
    for (size_t i = p; i < nf.size(); ++i)
        if (nf[i].factor > s.factor) {
            pos = i;
            break;
        }
    nf.insert(nf.begin() + pos, s);
}

std::vector<Word::Syllable> graph_normalize(const Group& g,
                                            const std::vector<Word::Syllable>& input) {
    std::vector<Word::Syllable> nf;
    bool merged = false;
    for (const auto& s : input) graph_push(g, nf, s, merged);
    // a merge can open further merges/cancellations; re-normalize until stable
    while (merged) {
        merged = false;
        std::vector<Word::Syllable> again;
        for (const auto& s : nf) graph_push(g, again, s, merged);
        nf = std::move(again);
    }
    return nf;
}

std::vector<Word::Syllable> freeprod_normalize(const Group& g,
                                               std::vector<Word::Syllable> in) {
    std::vector<Word::Syllable> nf;
    for (auto& s : in) {
        const Group& fg = *g.factors[s.factor];
        if (is_identity(fg, *s.w)) continue;
        if (!nf.empty() && nf.back().factor == s.factor) {
            Word m = mul(fg, *nf.back().w, *s.w);
            nf.pop_back();
            if (!is_identity(fg, m))
                nf.push_back({s.factor, std::make_shared<Word>(std::move(m))});
        } else {
            nf.push_back(std::move(s));
        }
    }
    return nf;
}

}  // namespace

Word mul(const Group& g, const Word& x, const Word& y) {
    Word r;
    switch (g.variant) {
        case Group::Variant::FiniteTable:
            r.idx = g.table[x.idx][y.idx];
            return r;
        case Group::Variant::Free:
            return free_mul(x, y);
        case Group::Variant::FgAbelian: {
            r.coords.resize(g.moduli.size());
            for (size_t i = 0; i < g.moduli.size(); ++i)
                r.coords[i] = mod_reduce(x.coords[i] + y.coords[i], g.moduli[i]);
            return r;
        }
        case Group::Variant::DirectProduct:
            for (size_t i = 0; i < g.factors.size(); ++i)
                r.comps.push_back(mul(*g.factors[i], x.comps[i], y.comps[i]));
            return r;
        case Group::Variant::FreeProduct: {
            std::vector<Word::Syllable> cat = x.sylls;
            cat.insert(cat.end(), y.sylls.begin(), y.sylls.end());
            r.sylls = freeprod_normalize(g, std::move(cat));
            return r;
        }
        case Group::Variant::GraphProduct: {
            std::vector<Word::Syllable> cat = x.sylls;
            cat.insert(cat.end(), y.sylls.begin(), y.sylls.end());
            r.sylls = graph_normalize(g, cat);
            return r;
        }
    }
    return r;
}

Word inv(const Group& g, const Word& x) {
    Word r;
    switch (g.variant) {
        case Group::Variant::FiniteTable:
            r.idx = g.fin_inv[x.idx];
            return r;
        case Group::Variant::Free:
            for (auto it = x.letters.rbegin(); it != x.letters.rend(); ++it)
                r.letters.push_back({it->first, -it->second});
            return r;
        case Group::Variant::FgAbelian:
            r.coords.resize(g.moduli.size());
            for (size_t i = 0; i < g.moduli.size(); ++i)
                r.coords[i] = mod_reduce(-x.coords[i], g.moduli[i]);
            return r;
        case Group::Variant::DirectProduct:
            for (size_t i = 0; i < g.factors.size(); ++i)
                r.comps.push_back(inv(*g.factors[i], x.comps[i]));
            return r;
        case Group::Variant::FreeProduct:
        case Group::Variant::GraphProduct: {
            std::vector<Word::Syllable> rev;
            for (auto it = x.sylls.rbegin(); it != x.sylls.rend(); ++it)
                rev.push_back({it->factor,
                               std::make_shared<Word>(inv(*g.factors[it->factor], *it->w))});
            if (g.variant == Group::Variant::FreeProduct)
                r.sylls = freeprod_normalize(g, std::move(rev));
            else
                r.sylls = graph_normalize(g, rev);
            return r;
        }
    }
    return r;
}

namespace {

std::string free_gen_name(int i) {
    if (i < 26) return std::string(1, (char)('a' + i));
    return "g" + std::to_string(i + 1);
}

}  // namespace

std::string word_str(const Group& g, const Word& x) {
    switch (g.variant) {
        case Group::Variant::FiniteTable:
            return g.elem_names[x.idx];
        case Group::Variant::Free: {
            if (x.letters.empty()) return "e";
            std::string s;
            for (size_t i = 0; i < x.letters.size(); ++i) {
                if (i) s += "*";
                s += free_gen_name(x.letters[i].first);
                if (x.letters[i].second != 1) s += "^" + std::to_string(x.letters[i].second);
            }
            return s;
        }
        case Group::Variant::FgAbelian: {
            if (g.moduli.size() == 1) return std::to_string(x.coords[0]);
            std::string s = "(";
            for (size_t i = 0; i < x.coords.size(); ++i)
                s += (i ? "," : "") + std::to_string(x.coords[i]);
            return s + ")";
        }
        case Group::Variant::DirectProduct: {
            std::string s = "<";
            for (size_t i = 0; i < x.comps.size(); ++i)
                s += (i ? "; " : "") + word_str(*g.factors[i], x.comps[i]);
            return s + ">";
        }
        case Group::Variant::FreeProduct:
        case Group::Variant::GraphProduct: {
            if (x.sylls.empty()) return "e";
            std::string s;
            for (size_t i = 0; i < x.sylls.size(); ++i) {
                if (i) s += "*";
                std::string ws = word_str(*g.factors[x.sylls[i].factor], *x.sylls[i].w);
                if (ws.find('*') != std::string::npos) ws = "(" + ws + ")";
                s += std::to_string(x.sylls[i].factor) + ":" + ws;
            }
            return s;
        }
    }
    return "?";
}

// ---------------------------------------------------------------------------
// ⊞ decomposition
// ---------------------------------------------------------------------------

std::pair<std::vector<Word>, std::vector<Word>> boxplus_decompose(const Group& g, const Word& x) {
    if (g.variant != Group::Variant::FreeProduct)
        throw std::invalid_argument("boxplus_decompose: free products only");
    Word e0 = identity(*g.factors[0]);
    Word e1 = identity(*g.factors[1]);
    std::vector<Word> gs, hs;
    // alternating pattern g1 h1 g2 h2 ... gn hn; only g1 and hn may be identity
    size_t i = 0;
    if (x.sylls.empty()) return {{e0}, {e1}};
    while (i < x.sylls.size()) {
        if (x.sylls[i].factor == 0) {
            gs.push_back(*x.sylls[i].w);
            ++i;
        } else {
            gs.push_back(e0);  // only allowed at the front; normal form guarantees it
        }
        if (i < x.sylls.size() && x.sylls[i].factor == 1) {
            hs.push_back(*x.sylls[i].w);
            ++i;
        } else {
            hs.push_back(e1);  // only reached at the tail
        }
    }
    return {gs, hs};
}

Word boxplus_compose(const Group& g, const std::vector<Word>& gs, const std::vector<Word>& hs) {
    if (g.variant != Group::Variant::FreeProduct)
        throw std::invalid_argument("boxplus_compose: free products only");
    if (gs.size() != hs.size()) throw std::invalid_argument("boxplus_compose: length mismatch");
    Word acc = identity(g);
    for (size_t i = 0; i < gs.size(); ++i) {
        Word a, b;
        a.sylls = {{0, std::make_shared<Word>(gs[i])}};
        b.sylls = {{1, std::make_shared<Word>(hs[i])}};
        acc = mul(g, acc, mul(g, a, b));
    }
    return acc;
}

// ---------------------------------------------------------------------------
// qf-type comparison
// ---------------------------------------------------------------------------

std::string TupleMatchResult::witness_str() const {
    std::string s;
    for (size_t i = 0; i < witness.size(); ++i) {
        if (i) s += "*";
        int k = witness[i];
        s += "x" + std::to_string(std::abs(k)) + (k < 0 ? "^-1" : "");
    }
    return s.empty() ? "e" : s;
}

Word eval_letter_word(const Group& g, const std::vector<Word>& gs, const std::vector<int>& w) {
    Word acc = identity(g);
    for (int k : w) {
        if (k == 0 || std::abs(k) > (int)gs.size())
            throw std::invalid_argument("letter word refers to a missing tuple position");
        acc = mul(g, acc, k > 0 ? gs[k - 1] : inv(g, gs[-k - 1]));
    }
    return acc;
}

namespace {

std::vector<int> inverse_letters(const std::vector<int>& w) {
    std::vector<int> r;
    for (auto it = w.rbegin(); it != w.rend(); ++it) r.push_back(-*it);
    return r;
}

std::optional<TupleMatchResult> decide_finite(const Group& g, const std::vector<Word>& gs,
                                              const Group& h, const std::vector<Word>& hs) {
    // BFS the generated subgroups in parallel, tracking a witness word per
    // discovered element; any collision yields a relation holding on one
    // side only
    int n = (int)gs.size();
    std::map<int, std::pair<int, std::vector<int>>> fwd;  // G elem -> (H elem, word)
    std::map<int, int> bwd;                               // H elem -> G elem
    std::map<int, std::vector<int>> hword;
    std::deque<int> work;
    auto discover = [&](int x, int y, const std::vector<int>& w)
        -> std::optional<TupleMatchResult> {
        auto it = fwd.find(x);
        if (it != fwd.end()) {
            if (it->second.first == y) return std::nullopt;
            // w and the stored word agree in G, disagree in H
            std::vector<int> wit = w;
            auto back = inverse_letters(it->second.second);
            wit.insert(wit.end(), back.begin(), back.end());
            TupleMatchResult r;
            r.verdict = TupleMatchResult::Verdict::NotEqual;
            r.witness = wit;
            return r;
        }
        auto jt = bwd.find(y);
        if (jt != bwd.end()) {
            // two G elements share an H image: relation holds in H only
            std::vector<int> wit = w;
            auto back = inverse_letters(fwd[jt->second].second);
            wit.insert(wit.end(), back.begin(), back.end());
            TupleMatchResult r;
            r.verdict = TupleMatchResult::Verdict::NotEqual;
            r.witness = wit;
            return r;
        }
        fwd[x] = {y, w};
        bwd[y] = x;
        work.push_back(x);
        return std::nullopt;
    };
    if (auto r = discover(identity(g).idx, identity(h).idx, {})) return r;
    while (!work.empty()) {
        int x = work.front();
        work.pop_front();
        auto [y, w] = fwd[x];
        for (int k = 1; k <= n; ++k) {
            for (int sgn : {1, -1}) {
                Word xe, ye;
                xe.idx = x;
                ye.idx = y;
                Word gx = sgn > 0 ? gs[k - 1] : inv(g, gs[k - 1]);
                Word hy = sgn > 0 ? hs[k - 1] : inv(h, hs[k - 1]);
                std::vector<int> w2 = w;
                w2.push_back(sgn * k);
                if (auto r = discover(mul(g, xe, gx).idx, mul(h, ye, hy).idx, w2)) return *r;
            }
        }
    }
    TupleMatchResult r;
    r.verdict = TupleMatchResult::Verdict::Equal;
    r.certificate = "finite-subgroup-iso";
    return r;
}

ZMat abelian_kernel(const Group& g, const std::vector<Word>& gs) {
    int n = (int)gs.size();
    int k = (int)g.moduli.size();
    std::vector<int> torsion;  // coordinate indices with modulus > 0
    for (int j = 0; j < k; ++j)
        if (g.moduli[j] > 0) torsion.push_back(j);
    int t = (int)torsion.size();
    // rows: one per coordinate; columns: n tuple letters + t modulus columns
    ZMat a(k, ZVec(n + t, 0));
    for (int j = 0; j < k; ++j)
        for (int i = 0; i < n; ++i) a[j][i] = (long)gs[i].coords[j];
    for (int c = 0; c < t; ++c) a[torsion[c]][n + c] = (long)g.moduli[torsion[c]];
    ZMat ker = kernel_basis(a, n + t);
    ZMat proj;
    for (auto& row : ker) {
        ZVec v(row.begin(), row.begin() + n);
        bool nz = false;
        for (auto& x : v)
            if (x != 0) nz = true;
        if (nz) proj.push_back(std::move(v));
    }
    return hnf_rows(std::move(proj));
}

std::vector<int> vector_to_letters(const ZVec& v) {
    std::vector<int> w;
    for (size_t i = 0; i < v.size(); ++i) {
        long cnt = labs(v[i].get_si());
        int letter = (v[i] > 0 ? 1 : -1) * (int)(i + 1);
        for (long c = 0; c < cnt; ++c) w.push_back(letter);
    }
    return w;
}

std::optional<TupleMatchResult> decide_abelian(const Group& g, const std::vector<Word>& gs,
                                               const Group& h, const std::vector<Word>& hs) {
    ZMat kg = abelian_kernel(g, gs);
    ZMat kh = abelian_kernel(h, hs);
    TupleMatchResult r;
    if (kg == kh) {
        r.verdict = TupleMatchResult::Verdict::Equal;
        r.certificate = "abelian-lattice";
        return r;
    }
    r.verdict = TupleMatchResult::Verdict::NotEqual;
    for (auto& v : kg)
        if (!lattice_contains(kh, v)) {
            r.witness = vector_to_letters(v);
            return r;
        }
    for (auto& v : kh)
        if (!lattice_contains(kg, v)) {
            r.witness = vector_to_letters(v);
            return r;
        }
    throw std::logic_error("abelian decider: unequal lattices without a separating vector");
}

// single letter with exponent ±1, or identity
std::optional<std::pair<int, int>> basis_letter(const Word& w) {
    if (w.letters.empty()) return std::make_pair(-1, 0);  // identity marker
    if (w.letters.size() != 1) return std::nullopt;
    auto [gen, exp] = w.letters[0];
    if (exp != 1 && exp != -1) return std::nullopt;
    return std::make_pair(gen, (int)exp);
}

std::optional<TupleMatchResult> decide_free_basis(const std::vector<Word>& gs,
                                                  const std::vector<Word>& hs) {
    std::map<int, int> gen_map, gen_rmap;
    for (size_t i = 0; i < gs.size(); ++i) {
        auto a = basis_letter(gs[i]);
        auto b = basis_letter(hs[i]);
        if (!a || !b) return std::nullopt;
        bool aid = a->first < 0, bid = b->first < 0;
        if (aid != bid) {
            TupleMatchResult r;  // identity on exactly one side
            r.verdict = TupleMatchResult::Verdict::NotEqual;
            r.witness = {(int)i + 1};
            return r;
        }
        if (aid) continue;
        if (a->second != b->second) return std::nullopt;  // mixed signs: leave to fallback
        auto it = gen_map.find(a->first);
        auto jt = gen_rmap.find(b->first);
        if ((it != gen_map.end() && it->second != b->first) ||
            (jt != gen_rmap.end() && jt->second != a->first))
            return std::nullopt;  // repeated or clashing letters: not a basis pattern
        gen_map[a->first] = b->first;
        gen_rmap[b->first] = a->first;
    }
    TupleMatchResult r;
    r.verdict = TupleMatchResult::Verdict::Equal;
    r.certificate = "free-basis";
    return r;
}

TupleMatchResult bounded_search(const Group& g, const std::vector<Word>& gs, const Group& h,
                                const std::vector<Word>& hs, int L) {
    int n = (int)gs.size();
    std::vector<int> path;
    TupleMatchResult found;
    bool done = false;
    std::function<void(const Word&, const Word&, int)> dfs = [&](const Word& x, const Word& y,
                                                                 int depth) {
        if (done) return;
        if (!path.empty() && is_identity(g, x) != is_identity(h, y)) {
            found.verdict = TupleMatchResult::Verdict::NotEqual;
            found.witness = path;
            done = true;
            return;
        }
        if (depth == L) return;
        for (int k = 1; k <= n && !done; ++k) {
            for (int sgn : {1, -1}) {
                if (!path.empty() && path.back() == -sgn * k) continue;  // freely reduced
                path.push_back(sgn * k);
                Word nx = mul(g, x, sgn > 0 ? gs[k - 1] : inv(g, gs[k - 1]));
                Word ny = mul(h, y, sgn > 0 ? hs[k - 1] : inv(h, hs[k - 1]));
                dfs(nx, ny, depth + 1);
                path.pop_back();
                if (done) break;
            }
        }
    };
    dfs(identity(g), identity(h), 0);
    if (done) return found;
    TupleMatchResult r;
    r.verdict = TupleMatchResult::Verdict::UnknownUpTo;
    r.bound = L;
    return r;
}

// entry as a single syllable of a free/graph product, or identity (-1)
std::optional<int> syllable_vertex(const Word& w) {
    if (w.sylls.empty()) return -1;
    if (w.sylls.size() != 1) return std::nullopt;
    return w.sylls[0].factor;
}

}  // namespace

TupleMatchResult qf_equal_tuples(const Group& g, const std::vector<Word>& gs, const Group& h,
                                 const std::vector<Word>& hs, int L) {
    if (gs.size() != hs.size())
        throw std::invalid_argument("qf_equal_tuples: tuple length mismatch");
    using V = Group::Variant;
    if (g.variant == V::FiniteTable && h.variant == V::FiniteTable)
        if (auto r = decide_finite(g, gs, h, hs)) return *r;
    if (g.variant == V::FgAbelian && h.variant == V::FgAbelian)
        if (auto r = decide_abelian(g, gs, h, hs)) return *r;
    if (g.variant == V::Free && h.variant == V::Free)
        if (auto r = decide_free_basis(gs, hs)) return *r;
    if (g.variant == V::DirectProduct && h.variant == V::DirectProduct &&
        g.factors.size() == h.factors.size()) {
        // a word is trivial iff trivial in every component, so matched
        // component types certify a matched product type
        bool all = true;
        std::string cert = "direct-componentwise(";
        for (size_t f = 0; f < g.factors.size() && all; ++f) {
            std::vector<Word> pg, ph;
            for (auto& w : gs) pg.push_back(w.comps[f]);
            for (auto& w : hs) ph.push_back(w.comps[f]);
            auto r = qf_equal_tuples(*g.factors[f], pg, *h.factors[f], ph, L);
            if (r.verdict != TupleMatchResult::Verdict::Equal)
                all = false;
            else
                cert += (f ? ";" : "") + r.certificate;
        }
        if (all) {
            TupleMatchResult r;
            r.verdict = TupleMatchResult::Verdict::Equal;
            r.certificate = cert + ")";
            return r;
        }
    }
    if ((g.variant == V::FreeProduct && h.variant == V::FreeProduct) ||
        (g.variant == V::GraphProduct && h.variant == V::GraphProduct)) {
        // one-syllable entries: normal-form reduction of a word in the tuple
        // letters only ever queries per-vertex subword identities, so matched
        // per-vertex types (plus a vertex pattern preserving adjacency)
        // certify a matched type
        bool applicable = true;
        std::map<int, int> vmap, vrmap;
        std::map<int, std::pair<std::vector<Word>, std::vector<Word>>> per_vertex;
        for (size_t i = 0; i < gs.size() && applicable; ++i) {
            auto a = syllable_vertex(gs[i]);
            auto b = syllable_vertex(hs[i]);
            if (!a || !b) {
                applicable = false;
                break;
            }
            if ((*a < 0) != (*b < 0)) {
                TupleMatchResult r;
                r.verdict = TupleMatchResult::Verdict::NotEqual;
                r.witness = {(int)i + 1};
                return r;
            }
            if (*a < 0) continue;
            auto it = vmap.find(*a);
            auto jt = vrmap.find(*b);
            if ((it != vmap.end() && it->second != *b) ||
                (jt != vrmap.end() && jt->second != *a)) {
                applicable = false;
                break;
            }
            vmap[*a] = *b;
            vrmap[*b] = *a;
            per_vertex[*a].first.push_back(*gs[i].sylls[0].w);
            per_vertex[*a].second.push_back(*hs[i].sylls[0].w);
        }
        if (applicable && g.variant == V::GraphProduct) {
            for (auto& [u, u2] : vmap)
                for (auto& [v, v2] : vmap)
                    if (u != v && g.adj[u][v] != h.adj[u2][v2]) applicable = false;
        }
        if (applicable) {
            bool all = true;
            std::string cert =
                (g.variant == V::FreeProduct ? "freeprod" : "graphprod") +
                std::string("-componentwise(");
            bool first = true;
            for (auto& [v, pair] : per_vertex) {
                auto r = qf_equal_tuples(*g.factors[v], pair.first, *h.factors[vmap[v]],
                                         pair.second, L);
                if (r.verdict != TupleMatchResult::Verdict::Equal) {
                    all = false;
                    break;
                }
                cert += (first ? "" : ";") + r.certificate;
                first = false;
            }
            if (all) {
                TupleMatchResult r;
                r.verdict = TupleMatchResult::Verdict::Equal;
                r.certificate = cert + ")";
                return r;
            }
        }
    }
    return bounded_search(g, gs, h, hs, L);
}

// ---------------------------------------------------------------------------
// Recipes
// ---------------------------------------------------------------------------

namespace {

int param_int(const std::map<std::string, std::string>& p, const std::string& k, int dflt) {
    auto it = p.find(k);
    if (it == p.end()) return dflt;
    return std::stoi(it->second);
}

Word free_gen(int i) {
    Word w;
    w.letters = {{i, 1}};
    return w;
}

Word ab_basis(int k, int i) {
    Word w;
    w.coords.assign(k, 0);
    w.coords[i] = 1;
    return w;
}

Word syll(int factor, Word w) {
    Word r;
    r.sylls = {{factor, std::make_shared<Word>(std::move(w))}};
    return r;
}

}  // namespace

std::vector<std::string> recipe_catalog() {
    return {"free-embed",     "abelian-ambient", "freeprod-mixed",
            "finite-relabel", "direct-mixed",    "graphprod-matched"};
}

RecipeResult recipe_build(const std::string& name,
                          const std::map<std::string, std::string>& params) {
    // accepted aliases for catalog entries
    std::string resolved = name;
    if (name == "direct-product") resolved = "direct-mixed";
    if (name == "graph-product") resolved = "graphprod-matched";
    if (resolved != name) return recipe_build(resolved, params);
    RecipeResult out;
    out.name = name;
    if (name == "free-embed") {
        int r1 = param_int(params, "rank1", 2);
        int r2 = param_int(params, "rank2", 3);
        int k = param_int(params, "k", std::min(r1, r2));
        if (k > std::min(r1, r2)) throw std::invalid_argument("free-embed: k exceeds rank");
        out.g = make_free(r1);
        out.h = make_free(r2);
        for (int i = 0; i < k; ++i) {
            out.gs.push_back(free_gen(i));
            out.hs.push_back(free_gen(i));
        }
        return out;
    }
    if (name == "abelian-ambient") {
        int n = param_int(params, "n", 2);
        int m = param_int(params, "m", 3);
        int k = param_int(params, "k", std::min(n, m));
        if (k > std::min(n, m)) throw std::invalid_argument("abelian-ambient: k exceeds rank");
        out.g = make_fg_abelian(std::vector<long long>(n, 0));
        out.h = make_fg_abelian(std::vector<long long>(m, 0));
        for (int i = 0; i < k; ++i) {
            out.gs.push_back(ab_basis(n, i));
            out.hs.push_back(ab_basis(m, i));
        }
        return out;
    }
    if (name == "freeprod-mixed") {
        GroupPtr c2 = cyclic_group(2);
        out.g = make_free_product(make_free(1), c2);
        out.h = make_free_product(make_free(2), c2);
        Word t;
        t.idx = 1;
        out.gs = {syll(0, free_gen(0)), syll(1, t)};
        out.hs = {syll(0, free_gen(0)), syll(1, t)};
        return out;
    }
    if (name == "finite-relabel") {
        int n = param_int(params, "n", 6);
        GroupPtr g = cyclic_group(n);
        // same multiplication law on relabeled carriers: x -> (n - x) mod n
        std::vector<int> perm(n);
        for (int i = 0; i < n; ++i) perm[i] = (n - i) % n;
        std::vector<std::vector<int>> table(n, std::vector<int>(n));
        std::vector<std::string> names(n);
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y) table[perm[x]][perm[y]] = perm[g->table[x][y]];
        for (int i = 0; i < n; ++i) names[i] = "h" + std::to_string(i);
        out.g = g;
        out.h = make_finite_table(table, names);
        Word a, b;
        a.idx = 1;
        b.idx = perm[1];
        out.gs = {a};
        out.hs = {b};
        return out;
    }
    if (name == "direct-mixed") {
        out.g = make_direct_product({make_free(2), make_fg_abelian({0})});
        out.h = make_direct_product({make_free(3), make_fg_abelian({0, 0})});
        Word z1;
        z1.coords = {1};
        Word z2;
        z2.coords = {1, 0};
        Word ga, ha;
        ga.comps = {free_gen(0), identity(*out.g->factors[1])};
        ha.comps = {free_gen(0), identity(*out.h->factors[1])};
        Word gz, hz;
        gz.comps = {identity(*out.g->factors[0]), z1};
        hz.comps = {identity(*out.h->factors[0]), z2};
        out.gs = {ga, gz};
        out.hs = {ha, hz};
        return out;
    }
    if (name == "graphprod-matched") {
        std::vector<std::vector<bool>> adj = {{false, true}, {true, false}};
        GroupPtr c2 = cyclic_group(2);
        out.g = make_graph_product(adj, {c2, make_free(1)});
        out.h = make_graph_product(adj, {c2, make_free(2)});
        Word t;
        t.idx = 1;
        out.gs = {syll(0, t), syll(1, free_gen(0))};
        out.hs = {syll(0, t), syll(1, free_gen(0))};
        return out;
    }
    throw std::invalid_argument("unknown recipe: " + name);
}

// ---------------------------------------------------------------------------
// Balls, finite materialization, structure bridge
// ---------------------------------------------------------------------------

std::vector<Word> ball(const Group& g, const std::vector<Word>& generators, int R, size_t cap) {
    if (R < 0) throw std::invalid_argument("ball: negative radius");
    std::vector<Word> step = generators;
    for (auto& w : generators) step.push_back(inv(g, w));
    std::map<std::string, Word> seen;
    Word e = identity(g);
    seen[word_str(g, e)] = e;
    std::vector<Word> frontier = {e};
    for (int r = 0; r < R; ++r) {
        std::vector<Word> next;
        for (auto& x : frontier)
            for (auto& s : step) {
                Word y = mul(g, x, s);
                std::string key = word_str(g, y);
                if (seen.count(key)) continue;
                if (seen.size() >= cap) throw std::runtime_error("ball: element cap exceeded");
                seen[key] = y;
                next.push_back(std::move(y));
            }
        frontier = std::move(next);
    }
    std::vector<Word> out;
    for (auto& [k, w] : seen) out.push_back(w);
    return out;
}

GroupPtr materialize_finite(const GroupPtr& g) {
    if (g->variant == Group::Variant::FiniteTable) return g;
    if (!g->is_finite()) throw std::invalid_argument("materialize_finite: infinite group");
    // enumerate all elements per variant
    std::vector<Word> elems;
    switch (g->variant) {
        case Group::Variant::Free:
            elems = {identity(*g)};
            break;
        case Group::Variant::FgAbelian: {
            elems = {identity(*g)};
            for (size_t j = 0; j < g->moduli.size(); ++j) {
                std::vector<Word> next;
                for (auto& w : elems)
                    for (long long c = 0; c < g->moduli[j]; ++c) {
                        Word v = w;
                        v.coords[j] = c;
                        next.push_back(v);
                    }
                elems = std::move(next);
            }
            break;
        }
        case Group::Variant::DirectProduct: {
            // materialize the factors and take the product of their tables
            std::vector<GroupPtr> mats;
            for (auto& f : g->factors) mats.push_back(materialize_finite(f));
            long long total = 1;
            for (auto& m : mats) total *= m->order();
            int n = (int)total;
            auto decode = [&](int code) {
                std::vector<int> idxs(mats.size());
                for (int j = (int)mats.size() - 1; j >= 0; --j) {
                    int sz = (int)mats[j]->order();
                    idxs[j] = code % sz;
                    code /= sz;
                }
                return idxs;
            };
            auto encode = [&](const std::vector<int>& idxs) {
                int code = 0;
                for (size_t j = 0; j < mats.size(); ++j)
                    code = code * (int)mats[j]->order() + idxs[j];
                return code;
            };
            std::vector<std::vector<int>> table(n, std::vector<int>(n));
            std::vector<std::string> names(n);
            for (int x = 0; x < n; ++x) {
                auto xi = decode(x);
                std::string nm = "<";
                for (size_t j = 0; j < mats.size(); ++j)
                    nm += (j ? ";" : "") + mats[j]->elem_names[xi[j]];
                names[x] = nm + ">";
                for (int y = 0; y < n; ++y) {
                    auto yi = decode(y);
                    std::vector<int> zi(mats.size());
                    for (size_t j = 0; j < mats.size(); ++j) zi[j] = mats[j]->table[xi[j]][yi[j]];
                    table[x][y] = encode(zi);
                }
            }
            return make_finite_table(table, names);
        }
        default:
            break;
    }
    if (g->variant == Group::Variant::FreeProduct || g->variant == Group::Variant::GraphProduct) {
        // finite cases only (verified above); enumerate by closing under
        // products of all vertex elements
        std::vector<Word> gens;
        for (size_t v = 0; v < g->factors.size(); ++v) {
            if (g->factors[v]->variant != Group::Variant::FiniteTable)
                throw std::invalid_argument(
                    "materialize_finite: graph/free product factors must be tables");
            for (int i = 0; i < (int)g->factors[v]->order(); ++i) {
                if (i == g->factors[v]->fin_identity) continue;
                Word w;
                w.idx = i;
                Word s;
                s.sylls = {{(int)v, std::make_shared<Word>(std::move(w))}};
                gens.push_back(std::move(s));
            }
        }
        elems = ball(*g, gens, (int)g->order() + 1);
    }
    if (elems.empty()) throw std::invalid_argument("materialize_finite: unsupported variant");
    std::sort(elems.begin(), elems.end(), Word::key_less);
    std::map<std::string, int> index;
    std::vector<std::string> names;
    for (auto& w : elems) {
        index[word_str(*g, w)] = (int)names.size();
        names.push_back(word_str(*g, w));
    }
    int n = (int)elems.size();
    std::vector<std::vector<int>> table(n, std::vector<int>(n));
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            table[x][y] = index.at(word_str(*g, mul(*g, elems[x], elems[y])));
    return make_finite_table(table, names);
}

FinStructure to_fin_structure(const Group& g, const std::string& name) {
    if (g.variant != Group::Variant::FiniteTable)
        throw std::invalid_argument("to_fin_structure: finite tables only");
    FinStructure s;
    s.name = name;
    s.sig.sorts = {"g"};
    s.sig.functions.push_back({"mul", {0, 0}, 0});
    s.sig.functions.push_back({"inv", {0}, 0});
    s.sig.constants.push_back({"e", 0});
    s.carriers = {g.elem_names};
    int n = (int)g.table.size();
    std::map<std::vector<int>, int> mul_table, inv_table;
    for (int x = 0; x < n; ++x) {
        inv_table[{x}] = g.fin_inv[x];
        for (int y = 0; y < n; ++y) mul_table[{x, y}] = g.table[x][y];
    }
    s.fun_tables = {mul_table, inv_table};
    s.const_vals = {g.fin_identity};
    s.validate();
    return s;
}

// ---------------------------------------------------------------------------
// Finite catalog
// ---------------------------------------------------------------------------

GroupPtr cyclic_group(int n) {
    if (n <= 0) throw std::invalid_argument("cyclic: n must be positive");
    std::vector<std::vector<int>> t(n, std::vector<int>(n));
    std::vector<std::string> names(n);
    for (int i = 0; i < n; ++i) {
        names[i] = "g" + std::to_string(i);
        for (int j = 0; j < n; ++j) t[i][j] = (i + j) % n;
    }
    return make_finite_table(t, names);
}

namespace {

GroupPtr perm_group(std::vector<std::vector<int>> gens, const std::string& prefix) {
    size_t pts = gens[0].size();
    std::vector<int> id(pts);
    for (size_t i = 0; i < pts; ++i) id[i] = (int)i;
    std::vector<std::vector<int>> elems = {id};
    std::map<std::vector<int>, int> index = {{id, 0}};
    for (size_t i = 0; i < elems.size(); ++i)
        for (auto& s : gens) {
            std::vector<int> c(pts);
            for (size_t p = 0; p < pts; ++p) c[p] = s[elems[i][p]];
            if (!index.count(c)) {
                index[c] = (int)elems.size();
                elems.push_back(c);
            }
        }
    int n = (int)elems.size();
    std::vector<std::vector<int>> table(n, std::vector<int>(n));
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            std::vector<int> c(pts);
            for (size_t p = 0; p < pts; ++p) c[p] = elems[x][elems[y][p]];
            table[x][y] = index.at(c);
        }
    std::vector<std::string> names(n);
    for (int i = 0; i < n; ++i) names[i] = prefix + std::to_string(i);
    return make_finite_table(table, names);
}

GroupPtr quaternion8() {
    // elements 2*a + 4*s with a in {e,i,j,k} encoded 0..3 ... simpler: code
    // s*4 + a with a in {0:e,1:i,2:j,3:k}, s in {0:+,1:-}
    auto unit_mul = [](int a, int b, int& sign) {
        // returns axis of a*b and accumulates sign; 0 = e
        if (a == 0) return b;
        if (b == 0) return a;
        if (a == b) {
            sign ^= 1;
            return 0;
        }
        // i*j=k, j*k=i, k*i=j; reversed order flips the sign
        static const int nxt[4] = {0, 2, 3, 1};
        if (nxt[a] == b) return 6 - a - b;  // {1,2}->3, {2,3}->1, {3,1}->2
        sign ^= 1;
        return 6 - a - b;
    };
    std::vector<std::vector<int>> t(8, std::vector<int>(8));
    for (int x = 0; x < 8; ++x)
        for (int y = 0; y < 8; ++y) {
            int sign = ((x >> 2) ^ (y >> 2)) & 1;
            int axis = unit_mul(x & 3, y & 3, sign);
            t[x][y] = (sign << 2) | axis;
        }
    static const char* nm[8] = {"1", "i", "j", "k", "-1", "-i", "-j", "-k"};
    return make_finite_table(t, std::vector<std::string>(nm, nm + 8));
}

}  // namespace

GroupPtr symmetric3_group() { return perm_group({{1, 0, 2}, {1, 2, 0}}, "s"); }

std::vector<GroupPtr> all_group_tables_up_to(int n) {
    std::vector<GroupPtr> out;
    for (int k = 1; k <= n; ++k) out.push_back(cyclic_group(k));
    if (n >= 4) out.push_back(materialize_finite(make_direct_product({cyclic_group(2), cyclic_group(2)})));
    if (n >= 6) out.push_back(symmetric3_group());
    if (n >= 8) {
        out.push_back(
            materialize_finite(make_direct_product({cyclic_group(4), cyclic_group(2)})));
        out.push_back(materialize_finite(
            make_direct_product({cyclic_group(2), cyclic_group(2), cyclic_group(2)})));
        out.push_back(perm_group({{1, 2, 3, 0}, {3, 2, 1, 0}}, "d"));  // dihedral of order 8
        out.push_back(quaternion8());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Parsers
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_top(const std::string& s, char sep) {
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    for (char c : s) {
        if (c == '(' || c == '<' || c == '[') ++depth;
        if (c == ')' || c == '>' || c == ']') --depth;
        if (c == sep && depth == 0) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

GroupPtr table_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("table file not readable: " + path);
    std::vector<std::string> names;
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        auto h = line.find('#');
        if (h != std::string::npos) line = line.substr(0, h);
        line = trim(line);
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::vector<std::string> toks;
        std::string t;
        while (ls >> t) toks.push_back(t);
        if (names.empty())
            names = toks;
        else
            rows.push_back(toks);
    }
    size_t n = names.size();
    if (rows.size() != n) throw std::invalid_argument("table file: expected " +
                                                      std::to_string(n) + " rows");
    std::map<std::string, int> idx;
    for (size_t i = 0; i < n; ++i) idx[names[i]] = (int)i;
    std::vector<std::vector<int>> table(n, std::vector<int>(n));
    for (size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n) throw std::invalid_argument("table file: ragged row");
        for (size_t j = 0; j < n; ++j) {
            auto it = idx.find(rows[i][j]);
            if (it == idx.end())
                throw std::invalid_argument("table file: unknown element " + rows[i][j]);
            table[i][j] = it->second;
        }
    }
    return make_finite_table(table, names);
}

std::vector<std::vector<bool>> graph_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("graph file not readable: " + path);
    int n = -1;
    std::vector<std::vector<bool>> adj;
    std::string line;
    while (std::getline(in, line)) {
        auto h = line.find('#');
        if (h != std::string::npos) line = line.substr(0, h);
        line = trim(line);
        if (line.empty()) continue;
        std::istringstream ls(line);
        if (n < 0) {
            ls >> n;
            if (n <= 0) throw std::invalid_argument("graph file: bad vertex count");
            adj.assign(n, std::vector<bool>(n, false));
            continue;
        }
        int i, j;
        if (!(ls >> i >> j) || i < 0 || j < 0 || i >= n || j >= n || i == j)
            throw std::invalid_argument("graph file: bad edge line: " + line);
        adj[i][j] = adj[j][i] = true;
    }
    if (n < 0) throw std::invalid_argument("graph file: empty");
    return adj;
}

}  // namespace

GroupPtr parse_group_expr(const std::string& raw) {
    std::string s = trim(raw);
    if (s.empty()) throw std::invalid_argument("empty group expression");
    if (s == "Z") return make_fg_abelian({0});
    if (s == "s3" || s == "S3") return symmetric3_group();
    if (s == "trivial") return make_free(0);
    if (s.rfind("Z^", 0) == 0) {
        int k = std::stoi(s.substr(2));
        if (k <= 0) throw std::invalid_argument("Z^k: k must be positive");
        return make_fg_abelian(std::vector<long long>(k, 0));
    }
    if (s.rfind("Z/", 0) == 0) {
        int k = std::stoi(s.substr(2));
        return make_fg_abelian({(long long)k});
    }
    auto paren = s.find('(');
    if (paren == std::string::npos || s.back() != ')')
        throw std::invalid_argument("bad group expression: " + s);
    std::string head = trim(s.substr(0, paren));
    std::string body = s.substr(paren + 1, s.size() - paren - 2);
    auto args = split_top(body, ',');
    if (head == "free") return make_free(std::stoi(trim(args[0])));
    if (head == "cyclic") return cyclic_group(std::stoi(trim(args[0])));
    if (head == "table") return table_from_file(trim(args[0]));
    if (head == "prod") {
        std::vector<GroupPtr> fs;
        for (auto& a : args) fs.push_back(parse_group_expr(a));
        return make_direct_product(fs);
    }
    if (head == "freeprod") {
        if (args.size() != 2) throw std::invalid_argument("freeprod takes two factors");
        return make_free_product(parse_group_expr(args[0]), parse_group_expr(args[1]));
    }
    if (head == "graphprod") {
        if (args.size() < 2) throw std::invalid_argument("graphprod(<graph file>, A, B, ...)");
        auto adj = graph_from_file(trim(args[0]));
        std::vector<GroupPtr> vs;
        for (size_t i = 1; i < args.size(); ++i) vs.push_back(parse_group_expr(args[i]));
        if (vs.size() != adj.size())
            throw std::invalid_argument("graphprod: vertex count does not match graph");
        return make_graph_product(adj, vs);
    }
    throw std::invalid_argument("unknown group constructor: " + head);
}

namespace {

Word word_pow(const Group& g, const Word& w, long long e) {
    Word base = e < 0 ? inv(g, w) : w;
    long long k = e < 0 ? -e : e;
    Word acc = identity(g);
    for (long long i = 0; i < k; ++i) acc = mul(g, acc, base);
    return acc;
}

Word parse_atom(const Group& g, const std::string& atom);

Word parse_product(const Group& g, const std::string& text) {
    Word acc = identity(g);
    for (auto& piece : split_top(text, '*')) {
        std::string p = trim(piece);
        if (p.empty()) throw std::invalid_argument("empty word factor");
        long long e = 1;
        auto caret = p.rfind('^');
        // '^' inside parens/brackets belongs to a nested literal
        if (caret != std::string::npos) {
            int depth = 0;
            for (size_t i = 0; i < caret; ++i) {
                char c = p[i];
                if (c == '(' || c == '<' || c == '[') ++depth;
                if (c == ')' || c == '>' || c == ']') --depth;
            }
            if (depth == 0) {
                e = std::stoll(p.substr(caret + 1));
                p = trim(p.substr(0, caret));
            }
        }
        Word w = parse_atom(g, p);
        acc = mul(g, acc, e == 1 ? w : word_pow(g, w, e));
    }
    return acc;
}

Word parse_atom(const Group& g, const std::string& atom) {
    if (atom == "e") return identity(g);
    switch (g.variant) {
        case Group::Variant::FiniteTable: {
            for (size_t i = 0; i < g.elem_names.size(); ++i)
                if (g.elem_names[i] == atom) {
                    Word w;
                    w.idx = (int)i;
                    return w;
                }
            throw std::invalid_argument("unknown table element: " + atom);
        }
        case Group::Variant::Free: {
            if (atom.size() == 1 && atom[0] >= 'a' && atom[0] <= 'z') {
                int i = atom[0] - 'a';
                if (i >= g.rank) throw std::invalid_argument("generator beyond rank: " + atom);
                Word w;
                w.letters = {{i, 1}};
                return w;
            }
            throw std::invalid_argument("bad free-group atom: " + atom);
        }
        case Group::Variant::FgAbelian: {
            Word w;
            w.coords.assign(g.moduli.size(), 0);
            if (atom.size() >= 2 && atom[0] == 'e' && isdigit((unsigned char)atom[1])) {
                int i = std::stoi(atom.substr(1)) - 1;
                if (i < 0 || i >= (int)g.moduli.size())
                    throw std::invalid_argument("basis vector out of range: " + atom);
                w.coords[i] = mod_reduce(1, g.moduli[i]);
                return w;
            }
            if (atom.front() == '(') {
                if (atom.back() != ')') throw std::invalid_argument("bad vector: " + atom);
                auto parts = split_top(atom.substr(1, atom.size() - 2), ',');
                if (parts.size() != g.moduli.size())
                    throw std::invalid_argument("vector arity mismatch: " + atom);
                for (size_t i = 0; i < parts.size(); ++i)
                    w.coords[i] = mod_reduce(std::stoll(trim(parts[i])), g.moduli[i]);
                return w;
            }
            if (g.moduli.size() != 1)
                throw std::invalid_argument("scalar literal needs rank 1: " + atom);
            w.coords[0] = mod_reduce(std::stoll(atom), g.moduli[0]);
            return w;
        }
        case Group::Variant::DirectProduct: {
            if (atom.front() != '<' || atom.back() != '>')
                throw std::invalid_argument("direct-product literal needs <...;...>: " + atom);
            auto parts = split_top(atom.substr(1, atom.size() - 2), ';');
            if (parts.size() != g.factors.size())
                throw std::invalid_argument("component count mismatch: " + atom);
            Word w;
            for (size_t i = 0; i < parts.size(); ++i)
                w.comps.push_back(parse_product(*g.factors[i], trim(parts[i])));
            return w;
        }
        case Group::Variant::FreeProduct:
        case Group::Variant::GraphProduct: {
            std::string body = atom;
            int forced = -1;
            auto colon = atom.find(':');
            if (colon != std::string::npos && colon > 0 &&
                atom.find_first_not_of("0123456789", 0) == colon) {
                forced = std::stoi(atom.substr(0, colon));
                if (forced < 0 || forced >= (int)g.factors.size())
                    throw std::invalid_argument("factor index out of range: " + atom);
                body = atom.substr(colon + 1);
            }
            if (!body.empty() && body.front() == '(' && body.back() == ')')
                body = body.substr(1, body.size() - 2);
            std::vector<std::pair<int, Word>> hits;
            for (size_t f = 0; f < g.factors.size(); ++f) {
                if (forced >= 0 && (int)f != (size_t)forced) continue;
                try {
                    hits.push_back({(int)f, parse_product(*g.factors[f], body)});
                } catch (const std::exception&) {
                }
            }
            if (hits.empty()) throw std::invalid_argument("atom fits no factor: " + atom);
            if (hits.size() > 1) {
                // identity parses everywhere and is unambiguous as an element
                bool all_id = true;
                for (auto& [f, w] : hits)
                    if (!is_identity(*g.factors[f], w)) all_id = false;
                if (!all_id)
                    throw std::invalid_argument("ambiguous atom (prefix with <factor>:): " + atom);
                return identity(g);
            }
            auto [f, w] = hits[0];
            Word r;
            if (!is_identity(*g.factors[f], w))
                r.sylls = {{f, std::make_shared<Word>(std::move(w))}};
            return r;
        }
    }
    throw std::invalid_argument("bad atom: " + atom);
}

}  // namespace

Word parse_word(const Group& g, const std::string& text) {
    std::string t = trim(text);
    if (t.empty()) throw std::invalid_argument("empty word literal");
    return parse_product(g, t);
}

std::vector<Word> parse_word_tuple(const Group& g, const std::string& text) {
    std::vector<Word> out;
    for (auto& piece : split_top(text, ',')) out.push_back(parse_word(g, piece));
    return out;
}

}  // namespace bfv
