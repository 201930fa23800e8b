#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>

#include "hyperaz/parse.hpp"

using namespace hyperaz;

namespace {

MultiPoly X(const std::string& v) { return MultiPoly::var(v); }
MultiPoly C(long c) { return MultiPoly(c); }

std::vector<IntVar> unit_box(std::initializer_list<std::string> names) {
    std::vector<IntVar> vs;
    for (auto& n : names)
        vs.push_back({n, Bound::finite(0), Bound::finite(1)});
    return vs;
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::Internal;  // "no error raised"
}

}  // namespace

TEST_CASE("exp factor decomposition") {
    auto f = parse_integrand("exp(-x*t^2)", Mode::kContinuous, "x",
                             unit_box({"t"}));
    CHECK(f.a == -(X("x") * X("t") * X("t")));
    CHECK(f.b.is_one());
    CHECK(f.P.is_one());
    CHECK(f.powers.empty());
}

TEST_CASE("power tower decomposition") {
    auto f = parse_integrand("(x/(1-x))^n * (1-x)^(ep/2)", Mode::kDiscrete,
                             "n", unit_box({"x"}));
    // validate() normalizes t to a positive leading coefficient
    CHECK(f.s == -X("x"));
    CHECK(f.t == X("x") - C(1));
    REQUIRE(f.powers.size() == 1);
    CHECK(f.powers[0].first == C(1) - X("x"));
    CHECK(f.powers[0].second == Exponent{0, Rational(1, 2), 0});
}

TEST_CASE("rational prefactors and integer powers") {
    auto f = parse_integrand("3*t^2/(1+t)", Mode::kContinuous, "x",
                             unit_box({"t"}));
    CHECK(f.P == C(3) * X("t") * X("t"));
    REQUIRE(f.powers.size() == 1);
    CHECK(f.powers[0].first == X("t") + C(1));
    CHECK(f.powers[0].second == Exponent{-1, 0, 0});
}

TEST_CASE("sums of rational pieces") {
    auto f = parse_integrand("(1-t)*(1+t) - 1 + t^2 + 1/2", Mode::kContinuous,
                             "x", unit_box({"t"}));
    CHECK(f.P == MultiPoly(Rational(1, 2)));
}

TEST_CASE("negative and rational literal exponents") {
    auto f = parse_integrand("t^-2 * t^(1/2)", Mode::kContinuous, "x",
                             unit_box({"t"}));
    REQUIRE(f.powers.size() == 2);
    CHECK(f.powers[0].first == X("t"));
    CHECK(f.powers[0].second == Exponent{Rational(1, 2), 0, 0});
    CHECK(f.powers[1].first == X("t") * X("t"));
    CHECK(f.powers[1].second == Exponent{-1, 0, 0});
}

TEST_CASE("bare-identifier exponent") {
    auto f =
        parse_integrand("x^n", Mode::kDiscrete, "n", unit_box({"x"}));
    CHECK(f.s == X("x"));
    CHECK(f.t.is_one());
    CHECK(f.powers.empty());
}

TEST_CASE("rejections") {
    auto box = unit_box({"x"});
    CHECK(code_of([&] {
              parse_integrand("log(x)^n", Mode::kDiscrete, "n", box);
          }) == ErrorCode::NonHyperexponential);
    CHECK(code_of([&] {
              parse_integrand("exp(exp(x))", Mode::kContinuous, "w", box);
          }) == ErrorCode::NonHyperexponential);
    CHECK(code_of([&] {
              parse_integrand("x^n + x", Mode::kDiscrete, "n", box);
          }) == ErrorCode::NonHyperexponential);
    CHECK(code_of([&] {
              parse_integrand("x^(n^2)", Mode::kDiscrete, "n", box);
          }) == ErrorCode::NonHyperexponential);
    CHECK(code_of([&] {
              parse_integrand("x^w", Mode::kContinuous, "w", box);
          }) == ErrorCode::NonHyperexponential);
    CHECK(code_of([&] {
              parse_integrand("(1+x", Mode::kContinuous, "w", box);
          }) == ErrorCode::ParseError);
    CHECK(code_of([&] {
              parse_integrand("x + + 1", Mode::kContinuous, "w", box);
          }) == ErrorCode::ParseError);
    CHECK(code_of([&] {
              parse_integrand("1/0", Mode::kContinuous, "w", box);
          }) == ErrorCode::ParseError);
    CHECK(code_of([&] {
              parse_integrand("foo(x)", Mode::kContinuous, "w", box);
          }) == ErrorCode::ParseError);
}

TEST_CASE("parse error carries a position") {
    try {
        parse_integrand("1 + $", Mode::kContinuous, "w", unit_box({"x"}));
        CHECK(false);
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("position 4") != std::string::npos);
    }
}

TEST_CASE("parse_polynomial") {
    CHECK(parse_polynomial("(1-x)*(1+x)") == C(1) - X("x") * X("x"));
    CHECK(code_of([] { parse_polynomial("1/(1-x)"); }) ==
          ErrorCode::ParseError);
}

TEST_CASE("operator pretty printing") {
    Annihilator ann;
    ann.mode = Mode::kDiscrete;
    ann.param = "n";
    ann.L = 1;
    ann.e = {X("n") + C(1), -(X("n") + C(2))};
    CHECK(operator_str(ann) == "(n + 1) - (n + 2)*N");

    Annihilator ode;
    ode.mode = Mode::kContinuous;
    ode.param = "x";
    ode.L = 2;
    ode.e = {C(2), X("x"), C(1) - X("x")};
    CHECK(operator_str(ode) == "2 + x*D_x - (x - 1)*D_x^2");
}
