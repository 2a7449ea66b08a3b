#include "bfv/structures.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace bfv {

int Signature::sort_index(const std::string& n) const {
    for (size_t i = 0; i < sorts.size(); ++i)
        if (sorts[i] == n) return (int)i;
    return -1;
}
int Signature::relation_index(const std::string& n) const {
    for (size_t i = 0; i < relations.size(); ++i)
        if (relations[i].name == n) return (int)i;
    return -1;
}
int Signature::function_index(const std::string& n) const {
    for (size_t i = 0; i < functions.size(); ++i)
        if (functions[i].name == n) return (int)i;
    return -1;
}
int Signature::constant_index(const std::string& n) const {
    for (size_t i = 0; i < constants.size(); ++i)
        if (constants[i].name == n) return (int)i;
    return -1;
}

bool Signature::same_as(const Signature& o) const {
    if (sorts != o.sorts) return false;
    if (relations.size() != o.relations.size() || functions.size() != o.functions.size() ||
        constants.size() != o.constants.size())
        return false;
    for (size_t i = 0; i < relations.size(); ++i)
        if (relations[i].name != o.relations[i].name || relations[i].profile != o.relations[i].profile)
            return false;
    for (size_t i = 0; i < functions.size(); ++i)
        if (functions[i].name != o.functions[i].name || functions[i].args != o.functions[i].args ||
            functions[i].result != o.functions[i].result)
            return false;
    for (size_t i = 0; i < constants.size(); ++i)
        if (constants[i].name != o.constants[i].name || constants[i].sort != o.constants[i].sort)
            return false;
    return true;
}

int FinStructure::total_size() const {
    int n = 0;
    for (auto& c : carriers) n += (int)c.size();
    return n;
}

int FinStructure::elem_index(int sort, const std::string& e) const {
    const auto& c = carriers[sort];
    for (size_t i = 0; i < c.size(); ++i)
        if (c[i] == e) return (int)i;
    return -1;
}

void FinStructure::validate() const {
    for (size_t r = 0; r < sig.relations.size(); ++r) {
        const auto& prof = sig.relations[r].profile;
        for (const auto& tup : rel_tables[r]) {
            if (tup.size() != prof.size()) throw std::invalid_argument("relation arity mismatch");
            for (size_t i = 0; i < tup.size(); ++i)
                if (tup[i] < 0 || tup[i] >= carrier_size(prof[i]))
                    throw std::invalid_argument("relation tuple outside carrier");
        }
    }
    for (size_t f = 0; f < sig.functions.size(); ++f) {
        const auto& fn = sig.functions[f];
        // totality: every argument combination must be present
        size_t expect = 1;
        for (int s : fn.args) expect *= (size_t)carrier_size(s);
        if (fun_tables[f].size() != expect)
            throw std::invalid_argument("function table for " + fn.name + " not total");
        for (const auto& [args, val] : fun_tables[f]) {
            if (args.size() != fn.args.size()) throw std::invalid_argument("function arity mismatch");
            for (size_t i = 0; i < args.size(); ++i)
                if (args[i] < 0 || args[i] >= carrier_size(fn.args[i]))
                    throw std::invalid_argument("function argument outside carrier");
            if (val < 0 || val >= carrier_size(fn.result))
                throw std::invalid_argument("function value outside carrier");
        }
    }
    for (size_t c = 0; c < sig.constants.size(); ++c)
        if (const_vals[c] < 0 || const_vals[c] >= carrier_size(sig.constants[c].sort))
            throw std::invalid_argument("constant outside carrier");
}

SortedTuple FinStructure::full_enumeration() const {
    SortedTuple t;
    for (size_t s = 0; s < carriers.size(); ++s)
        for (size_t i = 0; i < carriers[s].size(); ++i) t.entries.push_back({(int)s, (int)i});
    return t;
}

// ---------------------------------------------------------------------------
// Parsing.  Line-oriented format:
//   structure <name>
//   sort <S> = e1 e2 ...
//   rel <R>/<k> : <S1> ... <Sk> = (x1 ... xk) (y1 ... yk) ...
//   fun <f>/<k> : <S1> ... <Sk> -> <S> = x1 ... xk -> y ; ...
//   const <c> : <S> = e
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> toks;
    std::string cur;
    for (char ch : line) {
        if (ch == '#') break;
        if (isspace((unsigned char)ch)) {
            if (!cur.empty()) toks.push_back(cur), cur.clear();
        } else if (ch == '(' || ch == ')') {
            if (!cur.empty()) toks.push_back(cur), cur.clear();
            toks.push_back(std::string(1, ch));
        } else {
            cur += ch;
        }
    }
    if (!cur.empty()) toks.push_back(cur);
    return toks;
}

// splits "name/arity"
std::pair<std::string, int> split_arity(const std::string& tok, int ln) {
    auto slash = tok.find('/');
    if (slash == std::string::npos) throw ParseError(ln, "expected <name>/<arity>, got " + tok);
    int k = 0;
    try {
        k = std::stoi(tok.substr(slash + 1));
    } catch (...) {
        throw ParseError(ln, "bad arity in " + tok);
    }
    return {tok.substr(0, slash), k};
}

}  // namespace

FinStructure parse_structure(const std::string& text) {
    FinStructure st;
    std::istringstream in(text);
    std::string line;
    int ln = 0;
    bool seen_header = false;
    // deferred bodies so declarations can precede carriers in any order per kind
    struct RelDecl { int idx; std::vector<std::string> toks; int ln; };
    struct FunDecl { int idx; std::vector<std::string> toks; int ln; };
    struct ConstDecl { int idx; std::string elem; int ln; };
    std::vector<RelDecl> rel_bodies;
    std::vector<FunDecl> fun_bodies;
    std::vector<ConstDecl> const_bodies;

    while (std::getline(in, line)) {
        ++ln;
        auto toks = tokenize(line);
        if (toks.empty()) continue;
        const std::string& kw = toks[0];
        if (kw == "structure") {
            if (toks.size() != 2) throw ParseError(ln, "structure takes exactly one name");
            st.name = toks[1];
            seen_header = true;
        } else if (kw == "sort") {
            if (toks.size() < 3 || toks[2] != "=") throw ParseError(ln, "expected: sort <S> = e1 ...");
            if (st.sig.sort_index(toks[1]) >= 0) throw ParseError(ln, "duplicate sort " + toks[1]);
            st.sig.sorts.push_back(toks[1]);
            std::vector<std::string> elems(toks.begin() + 3, toks.end());
            if (elems.empty()) throw ParseError(ln, "sort " + toks[1] + " has empty carrier");
            for (size_t i = 0; i < elems.size(); ++i)
                for (size_t j = i + 1; j < elems.size(); ++j)
                    if (elems[i] == elems[j]) throw ParseError(ln, "duplicate element " + elems[i]);
            st.carriers.push_back(std::move(elems));
        } else if (kw == "rel") {
            auto [name, k] = split_arity(toks.at(1), ln);
            if (st.sig.relation_index(name) >= 0) throw ParseError(ln, "duplicate relation " + name);
            size_t p = 2;
            if (p >= toks.size() || toks[p] != ":") throw ParseError(ln, "expected ':'");
            ++p;
            Signature::Rel rel{name, {}};
            for (int i = 0; i < k; ++i, ++p) {
                if (p >= toks.size()) throw ParseError(ln, "incomplete sort profile");
                int s = st.sig.sort_index(toks[p]);
                if (s < 0) throw ParseError(ln, "unknown sort " + toks[p]);
                rel.profile.push_back(s);
            }
            if (p >= toks.size() || toks[p] != "=") throw ParseError(ln, "expected '='");
            ++p;
            st.sig.relations.push_back(rel);
            rel_bodies.push_back({(int)st.sig.relations.size() - 1,
                                  std::vector<std::string>(toks.begin() + p, toks.end()), ln});
        } else if (kw == "fun") {
            auto [name, k] = split_arity(toks.at(1), ln);
            if (st.sig.function_index(name) >= 0) throw ParseError(ln, "duplicate function " + name);
            size_t p = 2;
            if (p >= toks.size() || toks[p] != ":") throw ParseError(ln, "expected ':'");
            ++p;
            Signature::Fun fn{name, {}, 0};
            for (int i = 0; i < k; ++i, ++p) {
                if (p >= toks.size()) throw ParseError(ln, "incomplete sort profile");
                int s = st.sig.sort_index(toks[p]);
                if (s < 0) throw ParseError(ln, "unknown sort " + toks[p]);
                fn.args.push_back(s);
            }
            if (p >= toks.size() || toks[p] != "->") throw ParseError(ln, "expected '->'");
            ++p;
            if (p >= toks.size()) throw ParseError(ln, "missing result sort");
            fn.result = st.sig.sort_index(toks[p]);
            if (fn.result < 0) throw ParseError(ln, "unknown sort " + toks[p]);
            ++p;
            if (p >= toks.size() || toks[p] != "=") throw ParseError(ln, "expected '='");
            ++p;
            st.sig.functions.push_back(fn);
            fun_bodies.push_back({(int)st.sig.functions.size() - 1,
                                  std::vector<std::string>(toks.begin() + p, toks.end()), ln});
        } else if (kw == "const") {
            if (toks.size() != 6 || toks[2] != ":" || toks[4] != "=")
                throw ParseError(ln, "expected: const <c> : <S> = e");
            if (st.sig.constant_index(toks[1]) >= 0) throw ParseError(ln, "duplicate constant " + toks[1]);
            int s = st.sig.sort_index(toks[3]);
            if (s < 0) throw ParseError(ln, "unknown sort " + toks[3]);
            st.sig.constants.push_back({toks[1], s});
            const_bodies.push_back({(int)st.sig.constants.size() - 1, toks[5], ln});
        } else {
            throw ParseError(ln, "unknown keyword " + kw);
        }
    }
    if (!seen_header) throw ParseError(1, "missing 'structure <name>' header");

    st.rel_tables.resize(st.sig.relations.size());
    st.fun_tables.resize(st.sig.functions.size());
    st.const_vals.resize(st.sig.constants.size());

    for (const auto& rb : rel_bodies) {
        const auto& prof = st.sig.relations[rb.idx].profile;
        size_t p = 0;
        while (p < rb.toks.size()) {
            if (rb.toks[p] != "(") throw ParseError(rb.ln, "expected '(' in relation table");
            ++p;
            std::vector<int> tup;
            for (size_t i = 0; i < prof.size(); ++i, ++p) {
                if (p >= rb.toks.size() || rb.toks[p] == ")")
                    throw ParseError(rb.ln, "relation tuple too short");
                int e = st.elem_index(prof[i], rb.toks[p]);
                if (e < 0)
                    throw ParseError(rb.ln, "element " + rb.toks[p] + " not in sort " +
                                                st.sig.sorts[prof[i]]);
                tup.push_back(e);
            }
            if (p >= rb.toks.size() || rb.toks[p] != ")")
                throw ParseError(rb.ln, "relation tuple too long");
            ++p;
            st.rel_tables[rb.idx].insert(tup);
        }
    }
    for (const auto& fb : fun_bodies) {
        const auto& fn = st.sig.functions[fb.idx];
        // entries separated by ';': x1 ... xk -> y
        std::vector<std::vector<std::string>> entries(1);
        for (const auto& t : fb.toks) {
            if (t == ";")
                entries.emplace_back();
            else
                entries.back().push_back(t);
        }
        for (const auto& ent : entries) {
            if (ent.empty()) continue;
            if (ent.size() != fn.args.size() + 2 || ent[fn.args.size()] != "->")
                throw ParseError(fb.ln, "expected: x1 ... xk -> y");
            std::vector<int> args;
            for (size_t i = 0; i < fn.args.size(); ++i) {
                int e = st.elem_index(fn.args[i], ent[i]);
                if (e < 0)
                    throw ParseError(fb.ln,
                                     "element " + ent[i] + " not in sort " + st.sig.sorts[fn.args[i]]);
                args.push_back(e);
            }
            int val = st.elem_index(fn.result, ent.back());
            if (val < 0)
                throw ParseError(fb.ln, "function value " + ent.back() + " not in sort " +
                                            st.sig.sorts[fn.result]);
            auto [it, fresh] = st.fun_tables[fb.idx].insert({args, val});
            if (!fresh && it->second != val) throw ParseError(fb.ln, "conflicting function entries");
        }
        // totality check with a parse-level error (position-reporting)
        size_t expect = 1;
        for (int s : fn.args) expect *= (size_t)st.carrier_size(s);
        if (st.fun_tables[fb.idx].size() != expect)
            throw ParseError(fb.ln, "function table for " + fn.name + " not total");
    }
    for (const auto& cb : const_bodies) {
        int s = st.sig.constants[cb.idx].sort;
        int e = st.elem_index(s, cb.elem);
        if (e < 0) throw ParseError(cb.ln, "constant value " + cb.elem + " not in its sort");
        st.const_vals[cb.idx] = e;
    }
    st.validate();
    return st;
}

std::string serialize_structure(const FinStructure& st) {
    std::ostringstream out;
    out << "structure " << (st.name.empty() ? "unnamed" : st.name) << "\n";
    for (size_t s = 0; s < st.sig.sorts.size(); ++s) {
        out << "sort " << st.sig.sorts[s] << " =";
        for (const auto& e : st.carriers[s]) out << " " << e;
        out << "\n";
    }
    for (size_t r = 0; r < st.sig.relations.size(); ++r) {
        const auto& rel = st.sig.relations[r];
        out << "rel " << rel.name << "/" << rel.profile.size() << " :";
        for (int s : rel.profile) out << " " << st.sig.sorts[s];
        out << " =";
        for (const auto& tup : st.rel_tables[r]) {
            out << " (";
            for (size_t i = 0; i < tup.size(); ++i)
                out << (i ? " " : "") << st.carriers[rel.profile[i]][tup[i]];
            out << ")";
        }
        out << "\n";
    }
    for (size_t f = 0; f < st.sig.functions.size(); ++f) {
        const auto& fn = st.sig.functions[f];
        out << "fun " << fn.name << "/" << fn.args.size() << " :";
        for (int s : fn.args) out << " " << st.sig.sorts[s];
        out << " -> " << st.sig.sorts[fn.result] << " =";
        bool first = true;
        for (const auto& [args, val] : st.fun_tables[f]) {
            if (!first) out << " ;";
            first = false;
            for (size_t i = 0; i < args.size(); ++i) out << " " << st.carriers[fn.args[i]][args[i]];
            out << " -> " << st.carriers[fn.result][val];
        }
        out << "\n";
    }
    for (size_t c = 0; c < st.sig.constants.size(); ++c)
        out << "const " << st.sig.constants[c].name << " : " << st.sig.sorts[st.sig.constants[c].sort]
            << " = " << st.carriers[st.sig.constants[c].sort][st.const_vals[c]] << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Generated substructures and quantifier-free type equality.
// ---------------------------------------------------------------------------

namespace {

// Closure of a set of sorted elements plus constants under all functions.
std::vector<SortedElem> closure(const FinStructure& s, const SortedTuple& t) {
    std::set<SortedElem> seen(t.entries.begin(), t.entries.end());
    for (size_t c = 0; c < s.sig.constants.size(); ++c)
        seen.insert({s.sig.constants[c].sort, s.const_vals[c]});
    bool grew = true;
    while (grew) {
        grew = false;
        for (size_t f = 0; f < s.sig.functions.size(); ++f) {
            const auto& fn = s.sig.functions[f];
            // all argument tuples drawn from 'seen' with the right sorts
            std::vector<std::vector<int>> pools(fn.args.size());
            for (size_t i = 0; i < fn.args.size(); ++i)
                for (const auto& [so, el] : seen)
                    if (so == fn.args[i]) pools[i].push_back(el);
            std::vector<int> args(fn.args.size());
            std::function<void(size_t)> rec = [&](size_t i) {
                if (i == pools.size()) {
                    int v = s.apply((int)f, args);
                    if (seen.insert({fn.result, v}).second) grew = true;
                    return;
                }
                for (int e : pools[i]) {
                    args[i] = e;
                    rec(i + 1);
                }
            };
            if (!pools.empty() || fn.args.empty()) rec(0);
        }
    }
    return {seen.begin(), seen.end()};
}

}  // namespace

QfType generated_substructure(const FinStructure& s, const SortedTuple& t) {
    QfType q;
    q.parent = &s;
    q.generators = t;
    q.elements = closure(s, t);
    return q;
}

bool qf_equal(const FinStructure& S, const SortedTuple& a, const FinStructure& T,
              const SortedTuple& b, QfMismatch* why) {
    auto fail = [&](const std::string& r) {
        if (why) why->reason = r;
        return false;
    };
    if (!S.sig.same_as(T.sig)) return fail("signature mismatch");
    if (a.size() != b.size()) throw std::invalid_argument("qf_equal: tuple length mismatch");
    for (size_t i = 0; i < a.size(); ++i)
        if (a.entries[i].first != b.entries[i].first)
            throw std::invalid_argument("qf_equal: sort profile mismatch");

    // partial map (sort, S-elem) -> T-elem, seeded by tuple entries and constants
    std::map<SortedElem, int> fwd;
    std::map<SortedElem, int> bwd;
    auto bind = [&](SortedElem x, int y) -> bool {
        auto it = fwd.find(x);
        if (it != fwd.end()) return it->second == y;
        SortedElem ty{x.first, y};
        auto jt = bwd.find(ty);
        if (jt != bwd.end()) return false;  // injectivity
        fwd[x] = y;
        bwd[ty] = x.second;
        return true;
    };
    for (size_t i = 0; i < a.size(); ++i)
        if (!bind(a.entries[i], b.entries[i].second))
            return fail("equality pattern mismatch at position " + std::to_string(i + 1));
    for (size_t c = 0; c < S.sig.constants.size(); ++c)
        if (!bind({S.sig.constants[c].sort, S.const_vals[c]}, T.const_vals[c]))
            return fail("constant " + S.sig.constants[c].name + " breaks the map");

    // close under function symbols, extending the map as we go
    bool grew = true;
    while (grew) {
        grew = false;
        for (size_t f = 0; f < S.sig.functions.size(); ++f) {
            const auto& fn = S.sig.functions[f];
            std::vector<std::vector<int>> pools(fn.args.size());
            for (size_t i = 0; i < fn.args.size(); ++i)
                for (const auto& [key, val] : fwd)
                    if (key.first == fn.args[i]) pools[i].push_back(key.second);
            std::vector<int> argsS(fn.args.size());
            bool bad = false;
            std::string badwhy;
            std::function<void(size_t)> rec = [&](size_t i) {
                if (bad) return;
                if (i == pools.size()) {
                    int vS = S.apply((int)f, argsS);
                    std::vector<int> argsT(argsS.size());
                    for (size_t k = 0; k < argsS.size(); ++k)
                        argsT[k] = fwd.at({fn.args[k], argsS[k]});
                    int vT = T.apply((int)f, argsT);
                    bool fresh = fwd.find({fn.result, vS}) == fwd.end();
                    if (!bind({fn.result, vS}, vT)) {
                        bad = true;
                        badwhy = "function " + fn.name + " disagrees on generated elements";
                        return;
                    }
                    if (fresh) grew = true;
                    return;
                }
                for (int e : pools[i]) {
                    argsS[i] = e;
                    rec(i + 1);
                    if (bad) return;
                }
            };
            rec(0);
            if (bad) return fail(badwhy);
        }
    }

    // relations must agree on the whole generated domain, both ways
    for (size_t r = 0; r < S.sig.relations.size(); ++r) {
        const auto& rel = S.sig.relations[r];
        std::vector<std::vector<int>> pools(rel.profile.size());
        for (size_t i = 0; i < rel.profile.size(); ++i)
            for (const auto& [key, val] : fwd)
                if (key.first == rel.profile[i]) pools[i].push_back(key.second);
        std::vector<int> argsS(rel.profile.size());
        bool bad = false;
        std::function<void(size_t)> rec = [&](size_t i) {
            if (bad) return;
            if (i == pools.size()) {
                std::vector<int> argsT(argsS.size());
                for (size_t k = 0; k < argsS.size(); ++k) argsT[k] = fwd.at({rel.profile[k], argsS[k]});
                if (S.holds((int)r, argsS) != T.holds((int)r, argsT)) bad = true;
                return;
            }
            for (int e : pools[i]) {
                argsS[i] = e;
                rec(i + 1);
                if (bad) return;
            }
        };
        rec(0);
        if (bad) return fail("relation " + rel.name + " disagrees on generated elements");
    }
    return true;
}

// ---------------------------------------------------------------------------
// Backtracking isomorphism search.
// ---------------------------------------------------------------------------

namespace {

struct IsoSearcher {
    const FinStructure& S;
    const FinStructure& T;
    std::vector<std::vector<int>> map;   // per sort: S index -> T index or -1
    std::vector<std::vector<bool>> used; // per sort: T index used

    IsoSearcher(const FinStructure& s, const FinStructure& t) : S(s), T(t) {
        for (size_t so = 0; so < s.carriers.size(); ++so) {
            map.emplace_back(s.carriers[so].size(), -1);
            used.emplace_back(t.carriers[so].size(), false);
        }
    }

    bool all_mapped(const std::vector<int>& sorts, const std::vector<int>& elems) const {
        for (size_t i = 0; i < sorts.size(); ++i)
            if (map[sorts[i]][elems[i]] < 0) return false;
        return true;
    }

    // checks every constraint whose participants are all currently mapped
    bool consistent() const {
        for (size_t c = 0; c < S.sig.constants.size(); ++c) {
            int so = S.sig.constants[c].sort;
            int m = map[so][S.const_vals[c]];
            if (m >= 0 && m != T.const_vals[c]) return false;
        }
        for (size_t f = 0; f < S.sig.functions.size(); ++f) {
            const auto& fn = S.sig.functions[f];
            for (const auto& [args, val] : S.fun_tables[f]) {
                bool ready = true;
                std::vector<int> argsT(args.size());
                for (size_t i = 0; i < args.size(); ++i) {
                    int m = map[fn.args[i]][args[i]];
                    if (m < 0) {
                        ready = false;
                        break;
                    }
                    argsT[i] = m;
                }
                if (!ready) continue;
                int mval = map[fn.result][val];
                int tval = T.apply((int)f, argsT);
                if (mval >= 0 && mval != tval) return false;
                if (mval < 0 && used[fn.result][tval]) return false;
            }
        }
        for (size_t r = 0; r < S.sig.relations.size(); ++r) {
            const auto& rel = S.sig.relations[r];
            std::vector<std::vector<int>> pools(rel.profile.size());
            for (size_t i = 0; i < rel.profile.size(); ++i)
                for (size_t e = 0; e < map[rel.profile[i]].size(); ++e)
                    if (map[rel.profile[i]][e] >= 0) pools[i].push_back((int)e);
            std::vector<int> argsS(rel.profile.size());
            bool bad = false;
            std::function<void(size_t)> rec = [&](size_t i) {
                if (bad) return;
                if (i == pools.size()) {
                    std::vector<int> argsT(argsS.size());
                    for (size_t k = 0; k < argsS.size(); ++k)
                        argsT[k] = map[rel.profile[k]][argsS[k]];
                    if (S.holds((int)r, argsS) != T.holds((int)r, argsT)) bad = true;
                    return;
                }
                for (int e : pools[i]) {
                    argsS[i] = e;
                    rec(i + 1);
                    if (bad) return;
                }
            };
            rec(0);
            if (bad) return false;
        }
        return true;
    }

    bool extend(size_t sort, size_t idx) {
        if (sort == map.size()) return true;
        if (idx == map[sort].size()) return extend(sort + 1, 0);
        for (size_t t = 0; t < used[sort].size(); ++t) {
            if (used[sort][t]) continue;
            map[sort][idx] = (int)t;
            used[sort][t] = true;
            if (consistent() && extend(sort, idx + 1)) return true;
            map[sort][idx] = -1;
            used[sort][t] = false;
        }
        return false;
    }
};

}  // namespace

std::optional<std::vector<std::vector<int>>> iso_search(const FinStructure& s,
                                                        const FinStructure& t) {
    if (!s.sig.same_as(t.sig)) return std::nullopt;
    for (size_t so = 0; so < s.carriers.size(); ++so)
        if (s.carriers[so].size() != t.carriers[so].size()) return std::nullopt;
    IsoSearcher search(s, t);
    if (search.extend(0, 0)) return search.map;
    return std::nullopt;
}

}  // namespace bfv
