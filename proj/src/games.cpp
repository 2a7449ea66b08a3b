#include "bfv/games.hpp"

#include <functional>
#include <sstream>
#include <stdexcept>

namespace bfv {

namespace {

std::string format_tuple(const FinStructure& s, const SortedTuple& t) {
    std::ostringstream out;
    out << "(";
    for (size_t i = 0; i < t.size(); ++i) {
        if (i) out << " ";
        auto [so, el] = t.entries[i];
        if (s.carriers.size() > 1) out << s.sig.sorts[so] << ":";
        out << s.carriers[so][el];
    }
    out << ")";
    return out.str();
}

}  // namespace

std::string Transcript::str() const {
    std::ostringstream out;
    for (size_t i = 0; i < moves.size(); ++i) {
        for (size_t k = 0; k <= i; ++k) out << "  ";
        out << "spoiler plays " << moves[i].played << " on " << moves[i].side << ", duplicator: "
            << moves[i].response << " [rank " << moves[i].rank_consumed << "]\n";
    }
    for (size_t k = 0; k <= moves.size(); ++k) out << "  ";
    out << verdict;
    if (!discrepancy.empty()) out << " (" << discrepancy << ")";
    out << "\n";
    return out.str();
}

GameSolver::GameSolver(const FinStructure& left, const FinStructure& right)
    : left_(&left), right_(&right) {
    if (!left.sig.same_as(right.sig))
        throw std::invalid_argument("game requires a common signature");
}

GameSolver::Pairing GameSolver::pairing(const SortedTuple& a, const SortedTuple& b) {
    std::set<std::tuple<int, int, int>> p;
    for (size_t i = 0; i < a.size(); ++i)
        p.insert({a.entries[i].first, a.entries[i].second, b.entries[i].second});
    return {p.begin(), p.end()};
}

// Enumerates duplicator responses to `move` (played on the spoiler side),
// in lexicographic carrier order, pruning by pairing consistency (the
// combined pairing must be a partial bijection per sort).  `accept` is
// called with the candidate response; returns true once accepted.
namespace {

bool search_responses(const FinStructure& resp_side, const SortedTuple& base_spoiler,
                      const SortedTuple& base_resp, const SortedTuple& move,
                      const std::function<bool(const SortedTuple&)>& accept) {
    // existing pairing: spoiler-side elem -> response-side elem, per sort
    std::map<SortedElem, int> fwd;
    std::map<SortedElem, int> bwd;
    for (size_t i = 0; i < base_spoiler.size(); ++i) {
        SortedElem x = base_spoiler.entries[i];
        int y = base_resp.entries[i].second;
        auto it = fwd.find(x);
        if (it != fwd.end() && it->second != y) return false;  // dead position
        auto jt = bwd.find({x.first, y});
        if (jt != bwd.end() && jt->second != x.second) return false;
        fwd[x] = y;
        bwd[{x.first, y}] = x.second;
    }
    std::vector<SortedElem> resp(move.size(), {0, 0});
    std::function<bool(size_t)> rec = [&](size_t i) -> bool {
        if (i == move.size()) return accept(SortedTuple(std::vector<SortedElem>(resp)));
        SortedElem x = move.entries[i];
        int sort = x.first;
        auto it = fwd.find(x);
        if (it != fwd.end()) {
            resp[i] = {sort, it->second};
            return rec(i + 1);
        }
        for (int y = 0; y < resp_side.carrier_size(sort); ++y) {
            if (bwd.count({sort, y})) continue;
            fwd[x] = y;
            bwd[{sort, y}] = x.second;
            resp[i] = {sort, y};
            bool ok = rec(i + 1);
            fwd.erase(x);
            bwd.erase({sort, y});
            if (ok) return true;
        }
        return false;
    };
    return rec(0);
}

}  // namespace

bool GameSolver::respond_exists(bool spoiler_left, const SortedTuple& a, const SortedTuple& b,
                                const SortedTuple& move, int beta, bool symmetric, Transcript* tr) {
    // a lives in left_, b in right_; `move` is on the spoiler side.
    const FinStructure& resp_side = spoiler_left ? *right_ : *left_;
    const SortedTuple& base_spoiler = spoiler_left ? a : b;
    const SortedTuple& base_resp = spoiler_left ? b : a;
    return search_responses(resp_side, base_spoiler, base_resp, move,
                            [&](const SortedTuple& resp) {
                                SortedTuple na = a.concat(spoiler_left ? move : resp);
                                SortedTuple nb = b.concat(spoiler_left ? resp : move);
                                if (symmetric) return sym_rec(na, nb, beta, nullptr);
                                // asymmetric recursion handled by caller
                                return true;
                            });
}

bool GameSolver::sym_rec(const SortedTuple& a, const SortedTuple& b, int alpha, Transcript* tr) {
    QfMismatch why;
    if (!qf_equal(*left_, a, *right_, b, &why)) {
        // monotonicity: failing at 0 fails at every level
        if (tr) {
            tr->verdict = "quantifier-free types differ";
            tr->discrepancy = why.reason;
        }
        return false;
    }
    if (alpha == 0) {
        if (tr) tr->verdict = "equivalent at level 0";
        return true;
    }
    auto key = std::make_pair(pairing(a, b), alpha);
    auto it = memo_sym_.find(key);
    if (it != memo_sym_.end() && !tr) return it->second;

    bool ok = true;
    // spoiler side order: left first (deterministic transcripts)
    for (bool spoiler_left : {true, false}) {
        const FinStructure& sp = spoiler_left ? *left_ : *right_;
        SortedTuple move = sp.full_enumeration();
        bool answered =
            respond_exists(spoiler_left, a, b, move, alpha - 1, /*symmetric=*/true, nullptr);
        if (!answered) {
            ok = false;
            if (tr) {
                tr->moves.push_back({spoiler_left ? "left" : "right", format_tuple(sp, move),
                                     "(none)", alpha});
                // surface the base-level discrepancy of the first dead response
                tr->verdict = "spoiler wins: no duplicator response at rank " +
                              std::to_string(alpha - 1);
            }
            break;
        }
    }
    if (ok && tr) tr->verdict = "equivalent at level " + std::to_string(alpha);
    memo_sym_[key] = ok;
    return ok;
}

bool GameSolver::bf_sym(const SortedTuple& a, const SortedTuple& b, int alpha, Transcript* tr) {
    if (a.size() != b.size()) throw std::invalid_argument("bf_sym: tuple length mismatch");
    for (size_t i = 0; i < a.size(); ++i)
        if (a.entries[i].first != b.entries[i].first)
            throw std::invalid_argument("bf_sym: sort profile mismatch");
    if (alpha < 0) throw std::invalid_argument("bf_sym: alpha must be >= 0");
    return sym_rec(a, b, alpha, tr);
}

bool GameSolver::asym_rec(bool src_is_left, const SortedTuple& a, const SortedTuple& b,
                          int alpha) {
    // holds iff (src, src tuple) <=_alpha (other, other tuple); a on left_, b on right_.
    if (!qf_equal(*left_, a, *right_, b, nullptr)) return false;
    auto key = std::make_tuple(pairing(a, b), alpha, src_is_left);
    auto it = memo_asym_.find(key);
    if (it != memo_asym_.end()) return it->second;

    // spoiler enumerates the target (non-source) side; duplicator answers in
    // the source; roles swap one level down
    bool spoiler_left = !src_is_left;
    const FinStructure& sp = spoiler_left ? *left_ : *right_;
    SortedTuple move = sp.full_enumeration();
    const FinStructure& resp_side = spoiler_left ? *right_ : *left_;
    const SortedTuple& base_spoiler = spoiler_left ? a : b;
    const SortedTuple& base_resp = spoiler_left ? b : a;
    bool ok = search_responses(resp_side, base_spoiler, base_resp, move,
                               [&](const SortedTuple& resp) {
                                   SortedTuple na = a.concat(spoiler_left ? move : resp);
                                   SortedTuple nb = b.concat(spoiler_left ? resp : move);
                                   if (alpha == 1) return qf_equal(*left_, na, *right_, nb, nullptr);
                                   return asym_rec(!src_is_left, na, nb, alpha - 1);
                               });
    memo_asym_[key] = ok;
    return ok;
}

bool GameSolver::bf_asym(const SortedTuple& a, const SortedTuple& b, int alpha) {
    if (alpha < 1) throw std::invalid_argument("bf_asym: the relation starts at level 1");
    if (a.size() != b.size()) throw std::invalid_argument("bf_asym: tuple length mismatch");
    return asym_rec(/*src_is_left=*/true, a, b, alpha);
}

// ---------------------------------------------------------------------------
// Naive tuple-move oracle (no full-enumeration reduction).
// ---------------------------------------------------------------------------

namespace {

// all tuples with repetition of length 1..max_len over the carriers
std::vector<SortedTuple> all_tuples(const FinStructure& s, int max_len) {
    std::vector<SortedElem> elems;
    for (size_t so = 0; so < s.carriers.size(); ++so)
        for (size_t e = 0; e < s.carriers[so].size(); ++e) elems.push_back({(int)so, (int)e});
    std::vector<SortedTuple> out;
    std::vector<SortedElem> cur;
    std::function<void(int)> rec = [&](int remaining) {
        if (!cur.empty()) out.push_back(SortedTuple(cur));
        if (remaining == 0) return;
        for (auto e : elems) {
            cur.push_back(e);
            rec(remaining - 1);
            cur.pop_back();
        }
    };
    rec(max_len);
    return out;
}

std::vector<SortedTuple> all_responses(const FinStructure& s, const SortedTuple& profile) {
    std::vector<SortedTuple> out;
    std::vector<SortedElem> cur;
    std::function<void(size_t)> rec = [&](size_t i) {
        if (i == profile.size()) {
            out.push_back(SortedTuple(cur));
            return;
        }
        int so = profile.entries[i].first;
        for (int e = 0; e < s.carrier_size(so); ++e) {
            cur.push_back({so, e});
            rec(i + 1);
            cur.pop_back();
        }
    };
    rec(0);
    return out;
}

}  // namespace

bool GameSolver::bf_sym_naive(const SortedTuple& a, const SortedTuple& b, int alpha,
                              int max_move_len) {
    if (!qf_equal(*left_, a, *right_, b, nullptr)) return false;
    if (alpha == 0) return true;
    auto key = std::make_tuple(pairing(a, b), alpha, max_move_len);
    if (auto it = memo_naive_.find(key); it != memo_naive_.end()) return it->second;
    for (bool spoiler_left : {true, false}) {
        const FinStructure& sp = spoiler_left ? *left_ : *right_;
        const FinStructure& re = spoiler_left ? *right_ : *left_;
        for (const auto& move : all_tuples(sp, max_move_len)) {
            bool answered = false;
            for (const auto& resp : all_responses(re, move)) {
                SortedTuple na = a.concat(spoiler_left ? move : resp);
                SortedTuple nb = b.concat(spoiler_left ? resp : move);
                if (bf_sym_naive(na, nb, alpha - 1, max_move_len)) {
                    answered = true;
                    break;
                }
            }
            if (!answered) return memo_naive_[key] = false;
        }
    }
    return memo_naive_[key] = true;
}

// ---------------------------------------------------------------------------

Rank bf_rank(const FinStructure& s, const FinStructure& t, int cap) {
    GameSolver solver(s, t);
    SortedTuple empty;
    int stab_bound = s.total_size() + t.total_size() + 1;
    for (int alpha = 0; alpha <= cap; ++alpha)
        if (!solver.bf_sym(empty, empty, alpha)) return Rank::finite(alpha - 1);
    if (iso_search(s, t)) return Rank::stable();
    // holds at cap but not isomorphic: on finite structures the relation
    // stabilizes, so keep probing up to the size bound
    for (int alpha = cap + 1; alpha <= stab_bound; ++alpha)
        if (!solver.bf_sym(empty, empty, alpha)) return Rank::finite(alpha - 1);
    throw std::logic_error(
        "bf_rank: relation holds at the stabilization bound but iso_search fails (engine bug)");
}

// ---------------------------------------------------------------------------
// EF game by backward induction.
// ---------------------------------------------------------------------------

namespace {

struct EfSolver {
    const FinStructure& S;
    const FinStructure& T;
    const std::vector<Formula>& phi;
    int n;
    std::vector<int> var_sorts;  // sort of x_i (1-based index i)
    std::map<std::pair<std::vector<int>, std::vector<int>>, bool> memo;

    bool condition(const SortedTuple& a, const SortedTuple& b) {
        for (const auto& f : phi)
            if (eval_formula(S, f, a) != eval_formula(T, f, b)) return false;
        return true;
    }

    // true iff duplicator wins from this position
    bool dup_wins(const SortedTuple& a, const SortedTuple& b, Transcript* tr) {
        int round = (int)a.size();
        if (round == n) {
            bool w = condition(a, b);
            if (tr && !w) tr->discrepancy = "winning condition violated on a listed formula";
            return w;
        }
        std::vector<int> ka, kb;
        for (auto [so, e] : a.entries) ka.push_back(e);
        for (auto [so, e] : b.entries) kb.push_back(e);
        auto key = std::make_pair(ka, kb);
        auto it = memo.find(key);
        if (it != memo.end() && !tr) return it->second;

        int sort = var_sorts[round];
        bool dup = true;
        for (bool in_S : {true, false}) {
            const FinStructure& sp = in_S ? S : T;
            const FinStructure& re = in_S ? T : S;
            for (int x = 0; x < sp.carrier_size(sort) && dup; ++x) {
                bool answered = false;
                int chosen = -1;
                for (int y = 0; y < re.carrier_size(sort); ++y) {
                    SortedTuple na = a, nb = b;
                    (in_S ? na : nb).entries.push_back({sort, x});
                    (in_S ? nb : na).entries.push_back({sort, y});
                    if (dup_wins(na, nb, nullptr)) {
                        answered = true;
                        chosen = y;
                        break;
                    }
                }
                if (!answered) {
                    dup = false;
                    if (tr) {
                        tr->moves.push_back({in_S ? "left" : "right",
                                             "(" + sp.carriers[sort][x] + ")", "(none)",
                                             n - round});
                    }
                }
            }
            if (!dup) break;
        }
        memo[key] = dup;
        return dup;
    }
};

}  // namespace

Winner ef_winner(const FinStructure& s, const FinStructure& t, const std::vector<Formula>& phi,
                 int rounds, Transcript* tr) {
    std::map<int, int> sorts;
    for (const auto& f : phi) {
        if (f.max_var() > rounds)
            throw std::invalid_argument("ef_winner: formula mentions variables beyond x_n");
        infer_var_sorts(f, s.sig, sorts);
    }
    EfSolver solver{s, t, phi, rounds, {}, {}};
    solver.var_sorts.resize(rounds);
    for (int i = 0; i < rounds; ++i)
        solver.var_sorts[i] = sorts.count(i + 1) ? sorts[i + 1] : 0;
    bool dup = solver.dup_wins(SortedTuple{}, SortedTuple{}, tr);
    if (tr) tr->verdict = dup ? "duplicator wins" : "spoiler wins";
    return dup ? Winner::Duplicator : Winner::Spoiler;
}

// ---------------------------------------------------------------------------

std::vector<Violation> karp_check(const FinStructure& s, const SortedTuple& a,
                                  const FinStructure& t, const SortedTuple& b, int alpha,
                                  const std::vector<TaggedFormula>& pool) {
    std::vector<Violation> out;
    GameSolver solver(s, t);
    bool asym_st = alpha >= 1 && solver.bf_asym(a, b, alpha);  // (s,a) <=_alpha (t,b)
    bool sym = solver.bf_sym(a, b, alpha);
    GameSolver rev(t, s);
    bool asym_ts = alpha >= 1 && rev.bf_asym(b, a, alpha);
    for (size_t i = 0; i < pool.size(); ++i) {
        const auto& tf = pool[i];
        if (tf.rank > alpha) continue;
        bool inS = eval_formula(s, tf.formula, a);
        bool inT = eval_formula(t, tf.formula, b);
        auto violate = [&](const std::string& why) {
            out.push_back({"pool[" + std::to_string(i) + "]: " + why});
        };
        if (asym_st) {
            // Sigma_alpha truths transfer from (t,b) to (s,a); Pi the other way
            if (tf.is_sigma && inT && !inS) violate("sigma transfer (right->left) failed");
            if (!tf.is_sigma && inS && !inT) violate("pi transfer (left->right) failed");
        }
        if (asym_ts) {
            if (tf.is_sigma && inS && !inT) violate("sigma transfer (left->right) failed");
            if (!tf.is_sigma && inT && !inS) violate("pi transfer (right->left) failed");
        }
        if (sym && inS != inT) violate("two-way transfer under the symmetric relation failed");
    }
    return out;
}

std::vector<Violation> relation_consistency(const FinStructure& s, const FinStructure& t,
                                            int cap) {
    std::vector<Violation> out;
    GameSolver fwd(s, t);
    GameSolver rev(t, s);
    SortedTuple empty;
    for (int alpha = 0; alpha <= cap; ++alpha) {
        bool sym = fwd.bf_sym(empty, empty, alpha);
        if (alpha >= 1) {
            bool a_st = fwd.bf_asym(empty, empty, alpha);
            bool a_ts = rev.bf_asym(empty, empty, alpha);
            if (sym && !(a_st && a_ts))
                out.push_back({"sym(" + std::to_string(alpha) + ") without asym both ways"});
        }
        int deep = 1 + 2 * alpha;
        if (fwd.bf_asym(empty, empty, deep) && !sym)
            out.push_back({"asym(1+2*" + std::to_string(alpha) + ") left->right without sym"});
        if (rev.bf_asym(empty, empty, deep) && !sym)
            out.push_back({"asym(1+2*" + std::to_string(alpha) + ") right->left without sym"});
    }
    return out;
}

}  // namespace bfv
