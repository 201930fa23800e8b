#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hyperaz/epsexpand.hpp"

using namespace hyperaz;

namespace {

MultiPoly X(const std::string& v) { return MultiPoly::var(v); }
MultiPoly C(long c) { return MultiPoly(c); }

Rational Q(long n, long d) { return Rational(n, d); }

}  // namespace

TEST_CASE("series_solve: f' = f") {
    // coefficients a0 = -1, a1 = 1; init f(0) = 1
    auto s = series_solve({C(-1), C(1)}, "x", {}, {0, {1}}, 4);
    REQUIRE(s.start == 0);
    REQUIRE(s.coeffs.size() == 5);
    CHECK(s.coeffs == std::vector<Rational>{1, 1, Q(1, 2), Q(1, 6), Q(1, 24)});
}

TEST_CASE("series_solve: x f' + 2 f = 0 forces the zero series") {
    auto s = series_solve({C(2), X("x")}, "x", {}, {0, {0, 0, 0}}, 6);
    CHECK(s.is_zero());
}

TEST_CASE("series_solve: 2x f' + f = 0 rejects a nonzero value at 0") {
    // indicial polynomial 2m + 1 has no integer root; c_0 is forced to 0
    try {
        series_solve({C(1), C(2) * X("x")}, "x", {}, {0, {1}}, 4);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SingularObstruction);
    }
}

TEST_CASE("series_solve: free coefficient above the init window") {
    // f' = 0 with nothing prescribed: c_0 is free
    try {
        series_solve({C(0), C(1)}, "x", {}, {}, 3);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnderdeterminedInit);
    }
}

TEST_CASE("series_solve: inhomogeneous x f = rhs") {
    // x I = x - x^2/2 + x^3/6  =>  I = 1 - x/2 + x^2/6, no init needed
    SeriesInX rhs{1, {1, Q(-1, 2), Q(1, 6)}};
    auto s = series_solve({X("x")}, "x", rhs, {}, 2);
    CHECK(s.start == 0);
    CHECK(s.coeffs == std::vector<Rational>{1, Q(-1, 2), Q(1, 6)});
}

TEST_CASE("eps_constraints: (1 + ep) f' = 0") {
    ParamODE ode;
    ode.param = "x";
    ode.order = 1;
    ode.coeffs = {C(0), C(1) + X("ep")};
    auto c = eps_constraints(ode, 0, {}, 4);
    REQUIRE(c.coeffs.size() == 2);
    CHECK(c.coeffs[0].is_zero());
    CHECK(c.coeffs[1] == C(1));
    CHECK(c.rhs.is_zero());
}

TEST_CASE("eps_constraints: f' - ep f = 0 feeds the lower order back") {
    ParamODE ode;
    ode.param = "x";
    ode.order = 1;
    ode.coeffs = {-X("ep"), C(1)};
    // order 0: f0' = 0
    auto c0 = eps_constraints(ode, 0, {}, 4);
    CHECK(c0.coeffs[0].is_zero());
    CHECK(c0.rhs.is_zero());
    auto f0 = series_solve(c0.coeffs, "x", c0.rhs, {0, {1}}, 4);
    CHECK(f0.at(0) == 1);
    CHECK(f0.at(1) == 0);
    CHECK(f0.at(4) == 0);
    // order 1: f1' = f0
    auto c1 = eps_constraints(ode, 0, {f0}, 4);
    CHECK(c1.rhs.at(0) == 1);
    auto f1 = series_solve(c1.coeffs, "x", c1.rhs, {0, {0}}, 4);
    CHECK(f1.normalized().start == 1);
    CHECK(f1.at(1) == 1);
}

TEST_CASE("eps_constraints: all coefficients vanish at ep = 0") {
    ParamODE ode;
    ode.param = "x";
    ode.order = 1;
    ode.coeffs = {X("ep"), X("ep") * X("x")};
    try {
        eps_constraints(ode, 0, {}, 4);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::RescaleRequired);
    }
}

TEST_CASE("expand_closed_form: exp(-2x) / x^2") {
    HyperTerm f;
    f.mode = Mode::kContinuous;
    f.param = "x";
    f.a = C(-2) * X("x");
    f.powers = {{X("x"), Exponent{-2, 0, 0}}};
    auto e = expand_closed_form(f, 0, 0, 3);
    REQUIRE(e.entries.size() == 1);
    const SeriesInX& s = e.entries[0];
    CHECK(s.start == -2);
    CHECK(s.at(-2) == 1);
    CHECK(s.at(-1) == -2);
    CHECK(s.at(0) == 2);
    CHECK(s.at(1) == Q(-4, 3));
}

TEST_CASE("expand_closed_form: (1 - x)^ep expands through log(1 - x)") {
    HyperTerm f;
    f.mode = Mode::kContinuous;
    f.param = "x";
    f.powers = {{C(1) - X("x"), Exponent{0, 1, 0}}};
    auto e = expand_closed_form(f, 0, 1, 3);
    REQUIRE(e.entries.size() == 2);
    CHECK(e.entries[0].at(0) == 1);
    for (long k = 1; k <= e.entries[0].M(); ++k)
        CHECK(e.entries[0].at(k) == 0);
    // ep coefficient is log(1 - x) = -x - x^2/2 - x^3/3 - ...
    CHECK(e.entries[1].at(1) == -1);
    CHECK(e.entries[1].at(2) == Q(-1, 2));
    CHECK(e.entries[1].at(3) == Q(-1, 3));
}

TEST_CASE("expand_closed_form: fractional power with exact root") {
    // (4 + 4x)^(1/2) = 2 (1 + x)^(1/2) = 2 + x - x^2/4 + ...
    HyperTerm f;
    f.mode = Mode::kContinuous;
    f.param = "x";
    f.powers = {{C(4) + C(4) * X("x"), Exponent{Q(1, 2), 0, 0}}};
    auto e = expand_closed_form(f, 0, 0, 2);
    const SeriesInX& s = e.entries[0];
    CHECK(s.at(0) == 2);
    CHECK(s.at(1) == 1);
    CHECK(s.at(2) == Q(-1, 4));
}

TEST_CASE("expand_closed_form: irrational root is rejected") {
    HyperTerm f;
    f.mode = Mode::kContinuous;
    f.param = "x";
    f.powers = {{C(2) + X("x"), Exponent{Q(1, 2), 0, 0}}};
    try {
        expand_closed_form(f, 0, 0, 2);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ExpansionUnsupported);
    }
}

TEST_CASE("expand_closed_form: discrete value table for 1/(n+1+ep)") {
    HyperTerm f;
    f.mode = Mode::kDiscrete;
    f.param = "n";
    f.powers = {{X("n") + C(1) + X("ep"), Exponent{-1, 0, 0}}};
    auto e = expand_closed_form(f, 0, 1, 5);
    REQUIRE(e.tables.size() == 2);
    REQUIRE(e.tables[0].size() == 6);
    for (long n = 0; n <= 5; ++n) {
        CHECK(e.tables[0][static_cast<std::size_t>(n)] == Q(1, n + 1));
        CHECK(e.tables[1][static_cast<std::size_t>(n)] ==
              -Q(1, (n + 1) * (n + 1)));
    }
}

TEST_CASE("expand_integral: direct expansion of int_0^1 e^{-x t} dt") {
    // I(x) = (1 - e^{-x})/x = sum (-1)^k x^k / (k+1)!
    HyperTerm f;
    f.mode = Mode::kContinuous;
    f.param = "x";
    f.a = -(X("x") * X("t"));
    f.intvars = {{"t", Bound::finite(0), Bound::finite(1)}};
    ExpandOptions opt;
    opt.t = 0;
    opt.u = 0;
    opt.M = 6;
    opt.strategy = ExpandStrategy::kDirect;
    auto e = expand_integral(f, opt, {SeriesInX{0, {1}}});
    REQUIRE(e.entries.size() == 1);
    const SeriesInX& s = e.entries[0];
    Rational fact = 1;
    for (long k = 0; k <= 6; ++k) {
        fact *= Rational(k + 1);
        CHECK(s.at(k) == Rational((k % 2) ? -1 : 1) / fact);
    }
}

TEST_CASE("expand_integral: recursive expansion agrees with direct") {
    HyperTerm f;
    f.mode = Mode::kContinuous;
    f.param = "x";
    f.a = -(X("x") * X("t"));
    f.intvars = {{"t", Bound::finite(0), Bound::finite(1)}};
    ExpandOptions opt;
    opt.t = 0;
    opt.u = 0;
    opt.M = 6;
    opt.strategy = ExpandStrategy::kRecursive;
    auto e = expand_integral(f, opt, {SeriesInX{0, {1}}});
    REQUIRE(e.entries.size() == 1);
    for (long k = 0; k <= 6; ++k) {
        Rational fact = 1;
        for (long i = 2; i <= k + 1; ++i) fact *= Rational(i);
        CHECK(e.entries[0].at(k) == Rational((k % 2) ? -1 : 1) / fact);
    }
}

TEST_CASE("expand_integral: discrete table for int_0^1 x^{n+ep} dx") {
    HyperTerm f;
    f.mode = Mode::kDiscrete;
    f.param = "n";
    f.s = X("x");
    f.powers = {{X("x"), Exponent{0, 1, 0}}};
    f.intvars = {{"x", Bound::finite(0), Bound::finite(1)}};
    ExpandOptions opt;
    opt.t = 0;
    opt.u = 1;
    opt.table_length = 6;
    opt.strategy = ExpandStrategy::kRecursive;
    auto e = expand_integral(f, opt, {});
    REQUIRE(e.tables.size() == 2);
    for (long n = 0; n <= 5; ++n) {
        CHECK(e.tables[0][static_cast<std::size_t>(n)] == Q(1, n + 1));
        CHECK(e.tables[1][static_cast<std::size_t>(n)] ==
              -Q(1, (n + 1) * (n + 1)));
    }
}

TEST_CASE("expand_integral: window below the actual valuation is rejected") {
    // 1/ep cannot be represented starting at ep^0
    HyperTerm f;
    f.mode = Mode::kContinuous;
    f.param = "x";
    f.powers = {{X("ep"), Exponent{-1, 0, 0}}};
    try {
        expand_closed_form(f, 0, 0, 2);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ExpansionUnsupported);
    }
}
