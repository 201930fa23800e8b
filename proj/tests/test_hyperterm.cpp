#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hyperaz/hyperterm.hpp"

using namespace hyperaz;

namespace {

MultiPoly X(const std::string& v) { return MultiPoly::var(v); }
MultiPoly C(long c) { return MultiPoly(c); }

// F = e^{-x t^2} on t in (0, inf), continuous parameter x
HyperTerm exp_xt2() {
    HyperTerm f;
    f.mode = Mode::kContinuous;
    f.param = "x";
    f.a = -(X("x") * X("t") * X("t"));
    f.intvars = {{"t", Bound::finite(0), Bound::pos_inf()}};
    return validate(f);
}

// F = x^n on x in (0,1), discrete parameter n
HyperTerm x_pow_n() {
    HyperTerm f;
    f.mode = Mode::kDiscrete;
    f.param = "n";
    f.s = X("x");
    f.intvars = {{"x", Bound::finite(0), Bound::finite(1)}};
    return validate(f);
}

}  // namespace

TEST_CASE("validate accepts and normalizes") {
    HyperTerm f = exp_xt2();
    CHECK(f.b.is_one());
    CHECK(f.powers.empty());
    CHECK(f.P.is_one());
    // idempotent
    HyperTerm g = validate(f);
    CHECK(g.a == f.a);
    CHECK(g.str() == f.str());
}

TEST_CASE("validate rejects degenerate terms") {
    HyperTerm f;
    f.mode = Mode::kContinuous;
    f.param = "x";
    f.a = X("t");
    f.b = MultiPoly();  // b = 0
    f.intvars = {{"t", Bound::finite(0), Bound::finite(1)}};
    CHECK_THROWS_AS(validate(f), Error);
    try {
        validate(f);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateTerm);
    }

    HyperTerm g;
    g.mode = Mode::kContinuous;
    g.param = "x";
    try {
        validate(g);  // no integration variables
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NoIntegrationVariables);
    }

    // n-dependent exponent in continuous mode
    HyperTerm h;
    h.mode = Mode::kContinuous;
    h.param = "x";
    h.powers = {{C(1) - X("t"), Exponent{0, 0, 1}}};
    h.intvars = {{"t", Bound::finite(0), Bound::finite(1)}};
    try {
        validate(h);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateTerm);
    }
}

TEST_CASE("validate folds integer n-exponents into s/t") {
    // (1-x)^(n) * x^(ep - 2n) -> s = 1-x, t = x^2, residual power x^ep
    HyperTerm f;
    f.mode = Mode::kDiscrete;
    f.param = "n";
    f.powers = {{C(1) - X("x"), Exponent{0, 0, 1}},
                {X("x"), Exponent{0, 1, -2}}};
    f.intvars = {{"x", Bound::finite(0), Bound::finite(1)}};
    f = validate(f);
    CHECK(f.s == C(1) - X("x"));
    CHECK(f.t == X("x") * X("x"));
    REQUIRE(f.powers.size() == 1);
    CHECK(f.powers[0].first == X("x"));
    CHECK(f.powers[0].second == Exponent{0, 1, 0});

    // non-integer n-multiple rejected
    HyperTerm g = f;
    g.powers.push_back({C(1) + X("x"), Exponent{0, 0, Rational(1, 2)}});
    try {
        validate(g);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateTerm);
    }
}

TEST_CASE("log_derivative examples") {
    // e^{-x t^2}: q/r = -2xt for any L
    for (long L : {0L, 1L, 3L}) {
        LogDeriv ld = log_derivative(exp_xt2(), L, "t");
        CHECK(RatFunc(ld.q, ld.r) ==
              RatFunc(C(-2) * X("x") * X("t")));
    }

    // (s/t)^n with s=x, t=1-x, v=x, L=0: q/r = n/(x - x^2)
    HyperTerm f;
    f.mode = Mode::kDiscrete;
    f.param = "n";
    f.s = X("x");
    f.t = C(1) - X("x");
    f.intvars = {{"x", Bound::finite(0), Bound::finite(1)}};
    f = validate(f);
    LogDeriv ld = log_derivative(f, 0, "x");
    CHECK(ld.rat() == RatFunc(X("n"), X("x") - X("x") * X("x")));

    // S^alpha with S = 1-h*u, alpha = -1/2, v=u: q/r = h/(2(1-hu))
    HyperTerm g;
    g.mode = Mode::kContinuous;
    g.param = "h";
    g.powers = {{C(1) - X("h") * X("u"), Exponent{Rational(-1, 2), 0, 0}}};
    g.intvars = {{"u", Bound::finite(0), Bound::finite(1)}};
    g = validate(g);
    LogDeriv ld2 = log_derivative(g, 0, "u");
    CHECK(ld2.rat() ==
          RatFunc(X("h"), C(2) * (C(1) - X("h") * X("u"))));
}

TEST_CASE("hbar_parts discrete") {
    // F = x^n (P=1, s=x, t=1), L=1: i=0 -> 1, i=1 -> x
    HyperTerm f = x_pow_n();
    CHECK(hbar_parts(f, 1, 0).is_one());
    CHECK(hbar_parts(f, 1, 1) == X("x"));
    try {
        hbar_parts(f, 1, 2);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::IndexError);
    }
}

TEST_CASE("hbar_parts continuous") {
    // F = e^{-x t^2}, L=1: c_0 = 1, c_1 = -t^2
    HyperTerm f = exp_xt2();
    CHECK(hbar_parts(f, 1, 0).is_one());
    CHECK(hbar_parts(f, 1, 1) == -(X("t") * X("t")));

    // F = (1-hu)^{-1/2}, L=1, i=1 -> c_1 = u/2
    HyperTerm g;
    g.mode = Mode::kContinuous;
    g.param = "h";
    g.powers = {{C(1) - X("h") * X("u"), Exponent{Rational(-1, 2), 0, 0}}};
    g.intvars = {{"u", Bound::finite(0), Bound::finite(1)}};
    g = validate(g);
    CHECK(hbar_parts(g, 1, 1) == MultiPoly(Rational(1, 2)) * X("u"));
}

TEST_CASE("continuous hbar_parts reconstruct the derivatives of F") {
    // Invariant: f_i = c_i / (b^{2L} prod S^L) equals the i-fold logarithmic
    // derivative recursion of F, checked exactly as rational functions.
    HyperTerm g;
    g.mode = Mode::kContinuous;
    g.param = "x";
    g.P = C(1) + X("t");
    g.a = -(X("x") * X("t"));
    g.b = C(1) + X("t");
    g.powers = {{C(1) - X("t"), Exponent{Rational(1, 2), Rational(1, 2), 0}}};
    g.intvars = {{"t", Bound::finite(0), Bound::finite(1)}};
    g = validate(g);
    const long L = 3;
    MultiPoly norm = g.b.pow(2 * L);
    for (auto& [S, alpha] : g.powers) norm *= S.pow(L);
    // independent route: with H = F/P the hyper part, D_x^i F = f_i * H where
    // f_0 = P and f_{i+1} = D f_i + f_i * (D_x H / H)
    RatFunc lam_h =
        integrand_logderiv(g, "x") - RatFunc(g.P.derivative("x"), g.P);
    RatFunc fi{g.P};
    for (long i = 0; i <= L; ++i) {
        CHECK(RatFunc(hbar_parts(g, L, i)) == fi * RatFunc(norm));
        fi = fi.derivative("x") + fi * lam_h;
    }
}

TEST_CASE("log_derivative matches assembled piecewise derivative") {
    // property: q/r equals the sum-rule assembly over random-ish terms
    HyperTerm f;
    f.mode = Mode::kDiscrete;
    f.param = "n";
    f.P = X("n") + X("x");
    f.a = X("x") * X("x");
    f.s = X("x");
    f.t = C(1) + X("x");
    f.powers = {{C(2) - X("x"), Exponent{Rational(1, 3), 1, 0}}};
    f.intvars = {{"x", Bound::finite(0), Bound::finite(1)}};
    f = validate(f);
    for (long L : {0L, 2L}) {
        LogDeriv ld = log_derivative(f, L, "x");
        RatFunc expect = RatFunc(f.a, f.b).derivative("x");
        expect += RatFunc(f.powers[0].second.poly("n")) *
                  RatFunc(f.powers[0].first.derivative("x"), f.powers[0].first);
        expect += RatFunc(X("n")) * RatFunc(f.s.derivative("x"), f.s);
        expect -= RatFunc(X("n") + MultiPoly(L)) *
                  RatFunc(f.t.derivative("x"), f.t);
        CHECK(ld.rat() == expect);
    }
}

TEST_CASE("integrand_logderiv basic") {
    HyperTerm f = exp_xt2();
    CHECK(integrand_logderiv(f, "t") == RatFunc(C(-2) * X("x") * X("t")));
    CHECK(integrand_logderiv(f, "x") == RatFunc(-(X("t") * X("t"))));
    HyperTerm g = x_pow_n();
    CHECK(integrand_logderiv(g, "x") == RatFunc(X("n"), X("x")));
}
