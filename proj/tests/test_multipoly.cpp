#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hyperaz/multipoly.hpp"
#include "hyperaz/primefield.hpp"
#include "hyperaz/ratfunc.hpp"

using namespace hyperaz;

namespace {

MultiPoly X(const std::string& v) { return MultiPoly::var(v); }
MultiPoly C(long c) { return MultiPoly(c); }

// small deterministic generator for property tests
struct Rng {
    std::uint64_t state;
    std::uint64_t next() { return state = hash_mix(state); }
    long range(long lo, long hi) {
        return lo + static_cast<long>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }
};

MultiPoly random_poly(Rng& rng, const std::vector<std::string>& vars, int maxdeg,
                      int nterms) {
    MultiPoly p;
    for (int t = 0; t < nterms; ++t) {
        MultiPoly m = C(rng.range(-9, 9));
        for (auto& v : vars)
            m = m * MultiPoly::var(v, static_cast<unsigned>(rng.range(0, maxdeg)));
        p += m;
    }
    return p;
}

}  // namespace

TEST_CASE("polynomial arithmetic basics") {
    MultiPoly x = X("x");
    CHECK((x + C(1)) * (x - C(1)) == x * x - C(1));
    CHECK((x * x - C(1)).str() == "x^2 - 1");
    CHECK(MultiPoly::gcd(x * x - C(1), x * x - C(2) * x + C(1)) == x - C(1));
    CHECK(MultiPoly::exact_div(x * x - C(1), x - C(1)) == x + C(1));
    CHECK_THROWS_AS(MultiPoly::exact_div(x * x - C(1), x - C(2)), Error);
    try {
        MultiPoly::exact_div(x * x - C(1), x - C(2));
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InexactDivision);
    }
}

TEST_CASE("zero polynomial conventions") {
    MultiPoly z;
    CHECK(z.is_zero());
    CHECK(z.degree("x") == kDegNegInf);
    CHECK(z.total_degree() == kDegNegInf);
    CHECK(z.content() == 0);
    CHECK(MultiPoly::gcd(z, z).is_zero());
    CHECK(MultiPoly::gcd(z, X("x")) == X("x"));
}

TEST_CASE("canonical form is order independent") {
    MultiPoly a = X("x") * X("y") + C(3) * X("y") + C(1);
    MultiPoly b = C(1) + C(3) * X("y") + X("y") * X("x");
    CHECK(a == b);
    CHECK(a.hash() == b.hash());
    CHECK(a.str() == b.str());
    // pruning: variables that cancel out disappear
    MultiPoly c = a + X("z") - X("z");
    CHECK(c.vars() == std::vector<std::string>{"x", "y"});
}

TEST_CASE("differentiate") {
    MultiPoly x = X("x");
    CHECK((x * x).derivative("x") == C(2) * x);
    RatFunc f(C(1), C(1) - x);
    RatFunc df = f.derivative("x");
    CHECK(df == RatFunc(C(1), (C(1) - x) * (C(1) - x)));
    // d/dh ((h-1)^2 h^2) = 2h(h-1)(2h-1)
    MultiPoly h = X("h");
    MultiPoly g = (h - C(1)) * (h - C(1)) * h * h;
    CHECK(g.derivative("h") == C(2) * h * (h - C(1)) * (C(2) * h - C(1)));
    // constants differentiate to zero
    CHECK(C(5).derivative("x").is_zero());
}

TEST_CASE("shift") {
    MultiPoly n = X("n");
    CHECK((n * n).shifted("n", 1) == n * n + C(2) * n + C(1));
    CHECK((X("x") + n).shifted("n", 2) == X("x") + n + C(2));
    CHECK((n * (n - C(1))).shifted("n", 1) == n * n + n);
}

TEST_CASE("eval_mod") {
    MultiPoly x = X("x");
    Fp p101{101};
    RatFunc f(x + C(1), x - C(1));
    CHECK(f.eval_mod({{"x", 3}}, p101) == 2);
    Fp p7{7};
    CHECK((x * x).eval_mod({{"x", 10}}, p7) == 2);
    Fp p13{13};
    RatFunc g(C(1), x - C(5));
    CHECK_THROWS_AS(g.eval_mod({{"x", 5}}, p13), Error);
    try {
        g.eval_mod({{"x", 5}}, p13);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BadEvaluationPoint);
    }
}

TEST_CASE("content and primitive part") {
    MultiPoly p = C(4) * X("x") + C(6);
    CHECK(p.content() == 2);
    CHECK(p.primitive_part() == C(2) * X("x") + C(3));
    MultiPoly q = C(-4) * X("x") - C(6);
    CHECK(q.content() == -2);  // content carries the leading sign
    CHECK(q.primitive_part() == C(2) * X("x") + C(3));
    MultiPoly r = MultiPoly(Rational(1, 2)) * X("x") + MultiPoly(Rational(3, 4));
    CHECK(r.content() == Rational(1, 4));
}

TEST_CASE("coeffs_in roundtrip") {
    MultiPoly p = X("x") * X("x") * X("y") + C(3) * X("x") + X("y") + C(7);
    auto cs = p.coeffs_in("x");
    REQUIRE(cs.size() == 3);
    CHECK(cs[0] == X("y") + C(7));
    CHECK(cs[1] == C(3));
    CHECK(cs[2] == X("y"));
    CHECK(MultiPoly::from_coeffs_in("x", cs) == p);
}

TEST_CASE("substitution") {
    MultiPoly p = X("x") * X("x") + X("y");
    CHECK(p.substituted("x", Rational(3)) == C(9) + X("y"));
    CHECK(p.substituted("x", X("y")) == X("y") * X("y") + X("y"));
    CHECK(p.substituted("x", C(1) - X("y")) ==
          X("y") * X("y") - X("y") + C(1));
}

TEST_CASE("ratfunc reduction invariants") {
    MultiPoly x = X("x");
    RatFunc f((x * x - C(1)) * C(2), (x - C(1)) * C(4));
    CHECK(f.num() == MultiPoly(Rational(1, 2)) * (x + C(1)));
    CHECK(f.den() == C(1));
    // denominator positive leading coefficient
    RatFunc g(x, C(-2) * x + C(2));
    CHECK(g.den().leading_coeff() > 0);
    CHECK(g == RatFunc(-x, C(2) * x - C(2)));
    CHECK((f - f).is_zero());
    CHECK((f / f) == RatFunc(Rational(1)));
}

TEST_CASE("product rule and linearity on random inputs") {
    Rng rng{20260825};
    for (int iter = 0; iter < 50; ++iter) {
        MultiPoly f = random_poly(rng, {"x", "y"}, 3, 4);
        MultiPoly g = random_poly(rng, {"x", "y"}, 3, 4);
        CHECK(((f * g).derivative("x") - f * g.derivative("x") -
               g * f.derivative("x"))
                  .is_zero());
        CHECK(((f + g).derivative("y") - f.derivative("y") - g.derivative("y"))
                  .is_zero());
    }
}

TEST_CASE("gcd on random products") {
    Rng rng{99};
    for (int iter = 0; iter < 25; ++iter) {
        MultiPoly a = random_poly(rng, {"x", "y"}, 2, 3);
        MultiPoly b = random_poly(rng, {"x", "y"}, 2, 3);
        MultiPoly c = random_poly(rng, {"x", "y"}, 2, 3);
        if (a.is_zero() || b.is_zero() || c.is_zero()) continue;
        MultiPoly g = MultiPoly::gcd(a * c, b * c);
        // c divides the gcd of a*c and b*c
        MultiPoly q;
        CHECK(MultiPoly::try_div(g, c.primitive_part(), &q));
        // and the gcd divides both products
        CHECK(MultiPoly::try_div(a * c, g, &q));
        CHECK(MultiPoly::try_div(b * c, g, &q));
    }
}

TEST_CASE("rational parsing helpers") {
    CHECK(rational_from_string("-3/4") == Rational(-3, 4));
    CHECK(rational_from_string("10") == Rational(10));
    CHECK(rational_str(Rational(-3, 4)) == "-3/4");
    CHECK(rational_str(Rational(5)) == "5");
}
