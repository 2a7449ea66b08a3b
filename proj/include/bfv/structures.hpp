#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace bfv {

/// Error with a position in a structure/pool file.
struct ParseError : std::runtime_error {
    int line;
    ParseError(int ln, const std::string& msg)
        : std::runtime_error("line " + std::to_string(ln) + ": " + msg), line(ln) {}
};

/// A finite multi-sorted first-order signature.
struct Signature {
    struct Rel {
        std::string name;
        std::vector<int> profile;  // sort indices
    };
    struct Fun {
        std::string name;
        std::vector<int> args;  // argument sort indices
        int result = 0;
    };
    struct Const {
        std::string name;
        int sort = 0;
    };

    std::vector<std::string> sorts;
    std::vector<Rel> relations;
    std::vector<Fun> functions;
    std::vector<Const> constants;

    int sort_index(const std::string& name) const;
    int relation_index(const std::string& name) const;
    int function_index(const std::string& name) const;
    int constant_index(const std::string& name) const;

    bool same_as(const Signature& o) const;
};

/// An entry of a sorted tuple: (sort index, element index within that sort's carrier).
using SortedElem = std::pair<int, int>;

struct SortedTuple {
    std::vector<SortedElem> entries;

    SortedTuple() = default;
    explicit SortedTuple(std::vector<SortedElem> e) : entries(std::move(e)) {}
    size_t size() const { return entries.size(); }
    SortedTuple concat(const SortedTuple& o) const {
        SortedTuple r = *this;
        r.entries.insert(r.entries.end(), o.entries.begin(), o.entries.end());
        return r;
    }
};

/// A finite multi-sorted structure. Carrier elements are opaque strings;
/// internally everything works on per-sort indices.
struct FinStructure {
    std::string name;
    Signature sig;
    std::vector<std::vector<std::string>> carriers;          // per sort
    std::vector<std::set<std::vector<int>>> rel_tables;      // per relation, tuples of indices
    std::vector<std::map<std::vector<int>, int>> fun_tables; // per function, total maps
    std::vector<int> const_vals;                             // per constant

    int carrier_size(int sort) const { return (int)carriers[sort].size(); }
    int total_size() const;
    int elem_index(int sort, const std::string& e) const;

    bool holds(int rel, const std::vector<int>& tuple) const {
        return rel_tables[rel].count(tuple) > 0;
    }
    int apply(int fun, const std::vector<int>& args) const {
        return fun_tables[fun].at(args);
    }

    /// Checks the structure invariants (totality, profile membership);
    /// throws std::invalid_argument on violation.
    void validate() const;

    /// Full-carrier enumeration as a sorted tuple (all sorts, carrier order).
    SortedTuple full_enumeration() const;
};

/// Quantifier-free type of a tuple, represented by the generated
/// substructure together with the generator labeling.
struct QfType {
    const FinStructure* parent = nullptr;
    std::vector<SortedElem> elements;  // closure of tuple entries + constants
    SortedTuple generators;
};

FinStructure parse_structure(const std::string& text);
std::string serialize_structure(const FinStructure& s);

QfType generated_substructure(const FinStructure& s, const SortedTuple& t);

/// Detail of a quantifier-free type mismatch, for transcripts.
struct QfMismatch {
    std::string reason;
};

/// True iff a_i -> b_i (plus constants to constants) extends to an
/// isomorphism of generated substructures.
bool qf_equal(const FinStructure& s, const SortedTuple& a, const FinStructure& t,
              const SortedTuple& b, QfMismatch* why = nullptr);

/// Complete brute-force isomorphism search; if present, the result is a
/// per-sort bijection (S index -> T index).
std::optional<std::vector<std::vector<int>>> iso_search(const FinStructure& s,
                                                        const FinStructure& t);

}  // namespace bfv
