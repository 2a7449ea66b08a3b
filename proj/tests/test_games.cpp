#include "doctest.h"

#include "bfv/games.hpp"
#include "bfv/groups.hpp"
#include "bfv/suites.hpp"

using namespace bfv;

TEST_CASE("C4 vs C2xC2 fails symmetric equivalence at alpha = 1") {
    FinStructure c4 = to_fin_structure(*cyclic_group(4), "C4");
    FinStructure v4 =
        to_fin_structure(*materialize_finite(make_direct_product({cyclic_group(2), cyclic_group(2)})),
                         "C2xC2");
    GameSolver solver(c4, v4);
    SortedTuple empty;
    Transcript tr;
    CHECK_FALSE(solver.bf_sym(empty, empty, 1, &tr));
    CHECK_FALSE(tr.verdict.empty());
    CHECK(solver.bf_sym(empty, empty, 0));  // same order, same qf type of ()
}

TEST_CASE("same structure twice has stabilized rank") {
    FinStructure c3 = to_fin_structure(*cyclic_group(3), "C3");
    Rank r = bf_rank(c3, c3, 4);
    CHECK(r.stabilized);
}

TEST_CASE("bf_rank on distinguishable pair is finite") {
    FinStructure c4 = to_fin_structure(*cyclic_group(4), "C4");
    FinStructure v4 =
        to_fin_structure(*materialize_finite(make_direct_product({cyclic_group(2), cyclic_group(2)})),
                         "C2xC2");
    Rank r = bf_rank(c4, v4, 4);
    CHECK_FALSE(r.stabilized);
}

TEST_CASE("reduction engine equals naive oracle on a sampled slice (size <= 2)") {
    auto all = binary_structures(2);
    SortedTuple empty;
    for (size_t i = 0; i < all.size(); i += 3)
        for (size_t j = i; j < all.size(); j += 5) {
            GameSolver solver(all[i], all[j]);
            CHECK(solver.bf_sym(empty, empty, 2) == solver.bf_sym_naive(empty, empty, 2, 3));
        }
}

TEST_CASE("relation consistency holds on a small sample") {
    auto all = binary_structures(2);
    for (size_t i = 0; i < all.size(); i += 4)
        CHECK(relation_consistency(all[i], all[(i * 7 + 3) % all.size()], 2).empty());
}

TEST_CASE("ef game: duplicator wins on isomorphic structures") {
    auto all = binary_structures(2);
    int R = all[0].sig.relation_index("R");
    std::vector<Formula> phi = {Formula::rel(R, {Term::var(1), Term::var(2)}),
                                Formula::eq(Term::var(1), Term::var(2))};
    Winner w = ef_winner(all[3], all[3], phi, 2);
    CHECK(w == Winner::Duplicator);
}
