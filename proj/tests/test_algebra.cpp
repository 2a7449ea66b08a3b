#include "doctest.h"

#include "bfv/algebra.hpp"
#include "bfv/groups.hpp"
#include "bfv/rng.hpp"
#include "bfv/suites.hpp"

using namespace bfv;

namespace {

AlgebraElement rand_elem(GroupPtr g, SplitMix64& rng) {
    AlgebraElement x = zero_elt(g);
    int n = 1 + (int)rng.below(3);
    for (int i = 0; i < n; ++i) {
        GaussScalar c(Rational((long)rng.range(-2, 2)), Rational((long)rng.range(-1, 1)));
        x = add(x, scale(c, unitary(g, random_word(*g, rng))));
    }
    return x;
}

}  // namespace

TEST_CASE("*-algebra axioms on random group-algebra elements") {
    SplitMix64 rng(99);
    for (GroupPtr g : {cyclic_group(4), symmetric3_group(), make_free(2)}) {
        for (int rep = 0; rep < 10; ++rep) {
            AlgebraElement x = rand_elem(g, rng), y = rand_elem(g, rng), z = rand_elem(g, rng);
            CHECK(elt_equal(conv_mul(conv_mul(x, y), z), conv_mul(x, conv_mul(y, z))));
            CHECK(elt_equal(conv_mul(add(x, y), z), add(conv_mul(x, z), conv_mul(y, z))));
            CHECK(elt_equal(adjoint(adjoint(x)), x));
            CHECK(elt_equal(adjoint(conv_mul(x, y)), conv_mul(adjoint(y), adjoint(x))));
            CHECK(trace(conv_mul(x, y)) == trace(conv_mul(y, x)));
            GaussScalar q = trace(conv_mul(adjoint(x), x));
            CHECK(q.im == 0);
            CHECK(q.re >= 0);
            CHECK((q.re == 0) == elt_equal(x, zero_elt(g)));
        }
    }
}

TEST_CASE("trace picks the identity coefficient") {
    GroupPtr c3 = cyclic_group(3);
    Word g;
    g.idx = 1;
    CHECK(trace(unitary(c3, identity(*c3))) == GaussScalar(Rational(1)));
    CHECK(trace(unitary(c3, g)) == GaussScalar());
    // u_g * u_{g^2} = u_e
    Word g2;
    g2.idx = 2;
    CHECK(trace(conv_mul(unitary(c3, g), unitary(c3, g2))) == GaussScalar(Rational(1)));
}

TEST_CASE("parse_star_poly and eval round: x1 * x1^-1 traces to 1") {
    StarPolynomial p = parse_star_poly("x1*x1^-1");
    GroupPtr f2 = make_free(2);
    AlgebraElement u = unitary(f2, parse_word(*f2, "a*b"));
    CHECK(trace(eval_star_poly(p, {u})) == GaussScalar(Rational(1)));
}

TEST_CASE("parse_algebra_literal matches hand-built element") {
    GroupPtr c2 = cyclic_group(2);
    AlgebraElement x = parse_algebra_literal(c2, "(1+2i)*u[g1] + (-1/3)*u[g0]");
    Word a;
    a.idx = 1;
    AlgebraElement y = add(scale(GaussScalar(Rational(1), Rational(2)), unitary(c2, a)),
                           scale(GaussScalar(Rational(-1, 3)), unitary(c2, identity(*c2))));
    CHECK(elt_equal(x, y));
}

TEST_CASE("moments of u + u^-1 in Z are central binomial coefficients") {
    GroupPtr z = make_fg_abelian({0});
    Word plus;
    plus.coords = {1};
    AlgebraElement y = add(unitary(z, plus), unitary(z, inv(*z, plus)));
    auto ms = moments(y, 3);
    REQUIRE(ms.size() == 3);
    CHECK(ms[0] == Rational(2));
    CHECK(ms[1] == Rational(6));
    CHECK(ms[2] == Rational(20));
}

TEST_CASE("norm_exact_finite: unitaries have norm 1") {
    GroupPtr c4 = cyclic_group(4);
    Word g;
    g.idx = 1;
    CHECK(norm_exact_finite(unitary(c4, g)) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("norm bounds bracket the exact finite norm") {
    GroupPtr c4 = cyclic_group(4);
    Word g;
    g.idx = 1;
    AlgebraElement y = add(unitary(c4, g), unitary(c4, identity(*c4)));
    double exact = norm_exact_finite(y);
    NormBounds nb = norm_bounds(y, 8, 4);
    CHECK(nb.lower <= exact + 1e-9);
    CHECK(nb.upper >= exact - 1e-9);
}

TEST_CASE("verify_trace_equality refuses NotEqual certificates") {
    RecipeResult rec = recipe_build("free-embed");
    TupleMatchResult bad;
    bad.verdict = TupleMatchResult::Verdict::NotEqual;
    StarPolynomial p = parse_star_poly("x1");
    CoeffScheme scheme(1);
    scheme[0].push_back({GaussScalar(Rational(1)), {1}});
    TraceReport tr = verify_trace_equality(rec.g, rec.gs, rec.h, rec.hs, bad, scheme, {p});
    CHECK_FALSE(tr.ran);
    CHECK(tr.note.find("refused") != std::string::npos);
}
