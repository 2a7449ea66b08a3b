#include "doctest.h"

#include "bfv/crossed.hpp"
#include "bfv/matalg.hpp"
#include "bfv/rng.hpp"
#include "bfv/suites.hpp"

using namespace bfv;

TEST_CASE("multi-matrix *-algebra axioms and trace normalization") {
    MMPtr m = make_mm({2, 1}, {Rational(1, 2), Rational(1, 2)});
    CHECK(mat_trace(mat_one(m)) == GaussScalar(Rational(1)));
    MatElement a = mat_unit(m, 0, 0, 1);
    MatElement b = mat_unit(m, 0, 1, 0);
    // e01 * e10 = e00; tau(e00) = w0/n0 = 1/4
    CHECK(mat_trace(mat_mul(a, b)) == GaussScalar(Rational(1, 4)));
    CHECK(mat_adjoint(a) == b);
}

TEST_CASE("bernoulli action axioms on seeded tensors") {
    GroupPtr v4 = materialize_finite(make_direct_product({cyclic_group(2), cyclic_group(2)}));
    MMPtr m = make_mm({2}, {Rational(1)});
    SplitMix64 rng(1234);
    for (int rep = 0; rep < 5; ++rep) {
        Word g, h;
        g.idx = (int)rng.below(4);
        h.idx = (int)rng.below(4);
        std::vector<std::pair<Word, MatElement>> entries;
        Word leg;
        leg.idx = (int)rng.below(4);
        entries.push_back({leg, mat_unit(m, 0, (int)rng.below(2), (int)rng.below(2))});
        TensorElement t = tensor_embed(v4, m, entries);
        CHECK(tensor_equal(bernoulli_apply(identity(*v4), t), t));
        CHECK(tensor_equal(bernoulli_apply(g, bernoulli_apply(h, t)),
                           bernoulli_apply(mul(*v4, g, h), t)));
        CHECK(tensor_trace(bernoulli_apply(g, t)) == tensor_trace(t));
    }
}

TEST_CASE("twisted covariance relation u_g b u_g^* = sigma_g(b)") {
    GroupPtr c3 = cyclic_group(3);
    MMPtr m = make_mm({2}, {Rational(1)});
    Word g;
    g.idx = 1;
    Word leg;
    leg.idx = 2;
    TensorElement b = tensor_embed(c3, m, {{leg, mat_unit(m, 0, 0, 1)}});
    TwistedElement ug = twisted_term(tensor_scalar(c3, m, GaussScalar(Rational(1))), g);
    TwistedElement be = twisted_term(b, identity(*c3));
    TwistedElement lhs = twisted_mul(twisted_mul(ug, be), twisted_adjoint(ug));
    TwistedElement rhs = twisted_term(bernoulli_apply(g, b), identity(*c3));
    CHECK(twisted_equal(lhs, rhs));
}

TEST_CASE("tensor_mul fast path agrees with generic path on dense operands") {
    GroupPtr c2 = cyclic_group(2);
    MMPtr m = make_mm({2}, {Rational(1)});
    SplitMix64 rng(77);
    Word e = identity(*c2), g;
    g.idx = 1;
    auto dense = [&](uint64_t salt) {
        MatElement x = mat_zero(m);
        SplitMix64 r = SplitMix64::derive(77, salt);
        for (auto& row : x.blocks[0])
            for (auto& c : row) c = GaussScalar(Rational((long)r.range(-2, 2)));
        return tensor_embed(c2, m, {{e, x}});
    };
    // dense single-term operands take the generic path; condensing them first
    // must not change the product
    TensorElement a = tensor_add(dense(1), tensor_scale(GaussScalar(Rational(2)), dense(2)));
    TensorElement b = dense(3);
    TensorElement ab = tensor_mul(a, b);
    CHECK(tensor_trace(ab) == tensor_trace(tensor_mul(a, b, 1000)));
    CHECK(tensor_trace(tensor_mul(a, b)) ==
          tensor_trace(tensor_adjoint(tensor_mul(tensor_adjoint(b), tensor_adjoint(a)))));
}

TEST_CASE("crossed suite: scalars instances reduce to the algebra-module verifier") {
    Report r = suite_crossed(5, 12, 2);
    CHECK(r.fail == 0);
}
