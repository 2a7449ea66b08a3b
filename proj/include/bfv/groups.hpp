#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bfv/structures.hpp"

namespace bfv {

struct Group;
using GroupPtr = std::shared_ptr<const Group>;

/// One group element in variant-specific canonical form.  Two Words of the
/// same group are equal as elements iff they are structurally identical.
struct Word {
    // FiniteTable: element index
    int idx = 0;
    // Free: reduced sequence of (generator, nonzero exponent), no adjacent
    // equal generators
    std::vector<std::pair<int, long long>> letters;
    // FgAbelian: coordinate vector (torsion coordinates reduced mod modulus)
    std::vector<long long> coords;
    // DirectProduct: one component Word per factor
    std::vector<Word> comps;
    // FreeProduct / GraphProduct: sequence of nonidentity syllables
    struct Syllable {
        int factor = 0;  // factor index (free product) or vertex (graph product)
        std::shared_ptr<Word> w;
    };
    std::vector<Syllable> sylls;

    bool operator==(const Word& o) const;
    bool operator<(const Word& o) const { return key_less(*this, o); }
    static bool key_less(const Word& a, const Word& b);
};

/// A computable group.  Immutable; build via the factory functions below.
struct Group {
    enum class Variant { FiniteTable, Free, FgAbelian, DirectProduct, FreeProduct, GraphProduct };
    Variant variant;

    // FiniteTable
    std::vector<std::vector<int>> table;  // table[x][y] = x*y
    std::vector<std::string> elem_names;
    int fin_identity = 0;
    std::vector<int> fin_inv;

    // Free
    int rank = 0;

    // FgAbelian: moduli per coordinate; 0 = infinite cyclic factor
    std::vector<long long> moduli;

    // DirectProduct / FreeProduct (two factors) / GraphProduct (per vertex)
    std::vector<GroupPtr> factors;

    // GraphProduct adjacency (no self-loops)
    std::vector<std::vector<bool>> adj;

    std::string describe() const;
    bool is_finite() const;
    long long order() const;  // finite variants only
};

GroupPtr make_finite_table(std::vector<std::vector<int>> table, std::vector<std::string> names);
GroupPtr make_free(int rank);
GroupPtr make_fg_abelian(std::vector<long long> moduli);  // 0 entries are Z factors
GroupPtr make_direct_product(std::vector<GroupPtr> factors);
GroupPtr make_free_product(GroupPtr a, GroupPtr b);
GroupPtr make_graph_product(std::vector<std::vector<bool>> adj, std::vector<GroupPtr> vertices);

// small finite tables used throughout
GroupPtr cyclic_group(int n);
GroupPtr symmetric3_group();
/// Finite variants (FiniteTable, finite FgAbelian, products of finite)
/// re-expressed as one multiplication table.
GroupPtr materialize_finite(const GroupPtr& g);
/// All isomorphism types of groups of order <= n (n <= 8), as tables.
std::vector<GroupPtr> all_group_tables_up_to(int n);

// word problem per variant; outputs canonical
Word mul(const Group& g, const Word& x, const Word& y);
Word inv(const Group& g, const Word& x);
Word identity(const Group& g);
bool is_identity(const Group& g, const Word& x);
bool word_equal(const Group& g, const Word& x, const Word& y);
/// Canonical serialization; doubles as the ordering key for word sets.
std::string word_str(const Group& g, const Word& x);

/// Free-product decomposition x = g(1) ⊞ g(2): equal-length tuples over the
/// two factors with only the first entry of the first tuple and the last
/// entry of the second allowed to be the identity.
std::pair<std::vector<Word>, std::vector<Word>> boxplus_decompose(const Group& g, const Word& x);
/// Recomposition g1 h1 g2 h2 ... gn hn.
Word boxplus_compose(const Group& g, const std::vector<Word>& gs, const std::vector<Word>& hs);

struct TupleMatchResult {
    enum class Verdict { Equal, NotEqual, UnknownUpTo } verdict;
    std::string certificate;    // Equal: decision procedure tag or recipe name
    std::vector<int> witness;   // NotEqual: letters, +k = x_k, -k = x_k^{-1}
    int bound = 0;              // UnknownUpTo: the exhausted word length

    std::string witness_str() const;
};

/// Decides (exactly where a procedure exists, else by exhausting words of
/// length <= L) whether the quantifier-free types of gs in G and hs in H
/// coincide, i.e. the same words in the tuple letters evaluate to identity.
TupleMatchResult qf_equal_tuples(const Group& g, const std::vector<Word>& gs, const Group& h,
                                 const std::vector<Word>& hs, int L);

/// Evaluates a word in tuple letters (+k / -k as in TupleMatchResult).
Word eval_letter_word(const Group& g, const std::vector<Word>& gs, const std::vector<int>& w);

struct RecipeResult {
    std::string name;
    GroupPtr g;
    std::vector<Word> gs;
    GroupPtr h;
    std::vector<Word> hs;
};

/// Named constructions of qf-matched tuple pairs over non-identical ambient
/// groups.  Catalog: free-embed, abelian-ambient, freeprod-mixed,
/// finite-relabel, direct-mixed, graphprod-matched.
RecipeResult recipe_build(const std::string& name,
                          const std::map<std::string, std::string>& params = {});
std::vector<std::string> recipe_catalog();

/// Canonical words reachable by products of <= R generators and inverses.
std::vector<Word> ball(const Group& g, const std::vector<Word>& generators, int R,
                       size_t cap = 1000000);

/// One-sorted structure with binary ·, unary inverse and constant e.
FinStructure to_fin_structure(const Group& g, const std::string& name = "G");

/// Group expression mini-language: free(2), Z, Z^3, cyclic(4), Z/4, s3,
/// table(<file>), prod(A,B,...), freeprod(A,B), graphprod(<graph file>, A, B, ...).
GroupPtr parse_group_expr(const std::string& expr);

/// Word literal relative to a group, e.g. "a*b^-1", "e", "(1,0)", "t".
Word parse_word(const Group& g, const std::string& text);
/// Comma-separated word tuple (top-level commas only).
std::vector<Word> parse_word_tuple(const Group& g, const std::string& text);

}  // namespace bfv
