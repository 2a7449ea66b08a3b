#pragma once
// Randomized and exhaustive verification suites shared by the CLI and the
// acceptance tests.  Every suite is deterministic for a fixed seed.

#include <cstdint>
#include <string>
#include <vector>

#include "bfv/algebra.hpp"
#include "bfv/contbf.hpp"
#include "bfv/crossed.hpp"
#include "bfv/formula.hpp"
#include "bfv/games.hpp"
#include "bfv/report.hpp"
#include "bfv/rng.hpp"

namespace bfv {

// --- seeded random test-input generators ------------------------------------

/// Random *-polynomial: <= max_vars variables, total degree <= max_degree,
/// <= max_monomials monomials, coefficients from a small Gaussian palette.
StarPolynomial random_star_poly(SplitMix64& rng, int max_vars, int max_degree, int max_monomials);

/// Random coefficient scheme for `arity` polynomial variables over a tuple of
/// `tuple_len` group letters: <= max_terms terms per variable, letter words of
/// length <= max_wordlen.
CoeffScheme random_coeff_scheme(SplitMix64& rng, int arity, int tuple_len, int max_terms,
                                int max_wordlen);

/// Random short word in a group (any variant).
Word random_word(const Group& g, SplitMix64& rng);

// --- corpora ----------------------------------------------------------------

/// All structures with carrier size n over the one-binary-relation signature.
std::vector<FinStructure> binary_structures(int n);

/// Pool of >= 50 Sigma_1/Sigma_2 (and dual Pi) sentences over that signature.
std::vector<TaggedFormula> karp_pool(const Signature& sig);

/// Recipe list for the lemma suites (criterion names, aliases included).
std::vector<std::string> default_recipes();

// --- suites -------------------------------------------------------------

Report suite_lemma32(uint64_t seed, const std::vector<std::string>& recipes, int polys_per_recipe,
                     int max_degree, int max_vars, int max_terms);
Report suite_lemma33(uint64_t seed, const std::vector<std::string>& recipes, int polys_per_recipe,
                     int K);
Report suite_oracle(uint64_t seed, int count);
Report suite_scott(int alpha);
Report suite_intersim(int cap);
Report suite_karp(int alpha_cap);
Report suite_reduction(int alpha, int max_move_len, int max_size);
Report suite_normbounds();
Report suite_crossed(uint64_t seed, int count, int K);
Report suite_r0(int D);
Report suite_selftest(uint64_t seed);

}  // namespace bfv
