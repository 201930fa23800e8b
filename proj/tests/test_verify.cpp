#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hyperaz/verify.hpp"

using namespace hyperaz;

namespace {

MultiPoly X(const std::string& v) { return MultiPoly::var(v); }
MultiPoly C(long c) { return MultiPoly(c); }

}  // namespace

TEST_CASE("numeric_integrate: int_0^1 x^2 dx") {
    HyperTerm f;
    f.mode = Mode::kContinuous;
    f.param = "p";
    f.P = X("x") * X("x");
    f.intvars = {{"x", Bound::finite(0), Bound::finite(1)}};
    auto q = numeric_integrate(f, {});
    CHECK(std::abs(q.value - 1.0 / 3.0) < 1e-10);
}

TEST_CASE("numeric_integrate: Gamma(4) over (0, inf)") {
    HyperTerm f;
    f.mode = Mode::kContinuous;
    f.param = "p";
    f.P = X("t") * X("t") * X("t");
    f.a = -X("t");
    f.intvars = {{"t", Bound::finite(0), Bound::pos_inf()}};
    auto q = numeric_integrate(f, {});
    CHECK(std::abs(q.value - 6.0) < 1e-8);
}

TEST_CASE("numeric_integrate: 1/x diverges") {
    HyperTerm f;
    f.mode = Mode::kContinuous;
    f.param = "p";
    f.powers = {{X("x"), Exponent{-1, 0, 0}}};
    f.intvars = {{"x", Bound::finite(0), Bound::finite(1)}};
    try {
        numeric_integrate(f, {});
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DivergentIntegral);
    }
}

TEST_CASE("numeric_integrate: integrable endpoint singularity") {
    // int_0^1 x^{-1/2} dx = 2
    HyperTerm f;
    f.mode = Mode::kContinuous;
    f.param = "p";
    f.powers = {{X("x"), Exponent{Rational(-1, 2), 0, 0}}};
    f.intvars = {{"x", Bound::finite(0), Bound::finite(1)}};
    auto q = numeric_integrate(f, {});
    CHECK(std::abs(q.value - 2.0) < 1e-8);
}

TEST_CASE("check_annihilator_numeric: x^n telescoper") {
    HyperTerm f;
    f.mode = Mode::kDiscrete;
    f.param = "n";
    f.s = X("x");
    f.intvars = {{"x", Bound::finite(0), Bound::finite(1)}};
    f = validate(f);
    Annihilator ann;
    ann.mode = Mode::kDiscrete;
    ann.param = "n";
    ann.L = 1;
    ann.e = {X("n") + C(1), -(X("n") + C(2))};
    ann.certificate = {RatFunc(X("x") - X("x") * X("x"))};
    std::vector<std::map<std::string, Rational>> pts = {
        {{"n", 1}}, {{"n", 3}}, {{"n", 7}}};
    CHECK(check_annihilator_numeric(f, ann, pts) < 1e-10);

    // falsification control: corrupt e_0 by +1
    Annihilator bad = ann;
    bad.e[0] += C(1);
    CHECK(check_annihilator_numeric(f, bad, pts) > 1e-2);
}

TEST_CASE("check_annihilator_numeric: continuous first-order ODE") {
    // I(x) = int_0^1 e^{-x t} dt satisfies x I'' + (x + 2) I' + I = 0
    HyperTerm f;
    f.mode = Mode::kContinuous;
    f.param = "x";
    f.a = -(X("x") * X("t"));
    f.intvars = {{"t", Bound::finite(0), Bound::finite(1)}};
    f = validate(f);
    AnsatzConfig cfg;
    cfg.ansatz = Ansatz::kBoundaryVanishing;
    auto out = find_telescoper(f, cfg);
    REQUIRE(out.annihilator.has_value());
    std::vector<std::map<std::string, Rational>> pts = {
        {{"x", Rational(1, 2)}}, {{"x", 1}}, {{"x", 2}}};
    double r = check_annihilator_numeric(f, *out.annihilator, pts);
    CHECK(r < 1e-4);
    Annihilator bad = *out.annihilator;
    bad.e[0] += C(1);
    CHECK(check_annihilator_numeric(f, bad, pts) > 1e-2);
}
