#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hyperaz/boundary.hpp"

using namespace hyperaz;

namespace {

MultiPoly X(const std::string& v) { return MultiPoly::var(v); }
MultiPoly C(long c) { return MultiPoly(c); }

HyperTerm x_pow_n() {
    HyperTerm f;
    f.mode = Mode::kDiscrete;
    f.param = "n";
    f.s = X("x");
    f.intvars = {{"x", Bound::finite(0), Bound::finite(1)}};
    return validate(f);
}

HyperTerm gamma_term() {  // x1^n e^{-x1} on (0, inf)
    HyperTerm f;
    f.mode = Mode::kDiscrete;
    f.param = "n";
    f.a = -X("x1");
    f.s = X("x1");
    f.intvars = {{"x1", Bound::finite(0), Bound::pos_inf()}};
    return validate(f);
}

HyperTerm dim4_term() {  // e^{-x(w1 w2 + w3 w4)} on (-1,1)^4
    HyperTerm f;
    f.mode = Mode::kContinuous;
    f.param = "x";
    f.a = -(X("x") * (X("w1") * X("w2") + X("w3") * X("w4")));
    f.intvars = {{"w1", Bound::finite(-1), Bound::finite(1)},
                 {"w2", Bound::finite(-1), Bound::finite(1)},
                 {"w3", Bound::finite(-1), Bound::finite(1)},
                 {"w4", Bound::finite(-1), Bound::finite(1)}};
    return validate(f);
}

}  // namespace

TEST_CASE("boundary_terms: vanishing certificate gives empty rhs") {
    // x^n with G = x^{n+1}(1-x): zero at both ends
    Annihilator ann;
    ann.mode = Mode::kDiscrete;
    ann.param = "n";
    ann.L = 1;
    ann.e = {X("n") + C(1), -(X("n") + C(2))};
    ann.certificate = {RatFunc(X("x") - X("x") * X("x"))};
    CHECK(boundary_terms(x_pow_n(), ann).empty());
}

TEST_CASE("boundary_terms: exponential dominance at infinity") {
    // G = -x1^{n+1} e^{-x1}: zero at 0 (positive n-exponent), decays at inf
    AnsatzConfig cfg;
    auto out = find_telescoper(gamma_term(), cfg);
    REQUIRE(out.annihilator.has_value());
    CHECK(boundary_terms(gamma_term(), *out.annihilator).empty());
}

TEST_CASE("boundary_terms: pole at a finite end") {
    Annihilator ann;
    ann.mode = Mode::kDiscrete;
    ann.param = "n";
    ann.L = 0;
    ann.e = {C(1)};
    ann.certificate = {RatFunc(C(1), C(1) - X("x"))};
    CHECK_THROWS_AS(boundary_terms(x_pow_n(), ann), Error);
    try {
        boundary_terms(x_pow_n(), ann);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnboundedBoundaryTerm);
    }
}

TEST_CASE("boundary_terms: growing exponential rejected at infinity") {
    HyperTerm f;
    f.mode = Mode::kContinuous;
    f.param = "x";
    f.a = X("t");
    f.intvars = {{"t", Bound::finite(0), Bound::pos_inf()}};
    f = validate(f);
    Annihilator ann;
    ann.mode = Mode::kContinuous;
    ann.param = "x";
    ann.L = 0;
    ann.e = {C(1)};
    ann.certificate = {RatFunc(C(1))};
    try {
        boundary_terms(f, ann);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnboundedBoundaryTerm);
    }
}

TEST_CASE("boundary_terms: ep exponent vanishes at 0, finite value at 1") {
    // x^{n+ep} with telescoper 1 and certificate x/(n+1+ep):
    // G = x^{n+1+ep}/(n+1+ep) vanishes at 0 and is 1/(n+1+ep) at 1
    HyperTerm f;
    f.mode = Mode::kDiscrete;
    f.param = "n";
    f.s = X("x");
    f.powers = {{X("x"), Exponent{0, 1, 0}}};
    f.intvars = {{"x", Bound::finite(0), Bound::finite(1)}};
    f = validate(f);
    Annihilator ann;
    ann.mode = Mode::kDiscrete;
    ann.param = "n";
    ann.L = 0;
    ann.e = {C(1)};
    ann.certificate = {RatFunc(X("x"), X("n") + C(1) + X("ep"))};
    auto rhs = boundary_terms(f, ann);
    REQUIRE(rhs.size() == 1);
    CHECK(rhs[0].sign == 1);
    CHECK(rhs[0].at_upper);
    CHECK(rhs[0].var_index == 0);
    CHECK(rhs[0].term.intvars.empty());
    // value is 1/(n+1+ep), stored as (n+1+ep)^(-1)
    REQUIRE(rhs[0].term.powers.size() == 1);
    CHECK(rhs[0].term.powers[0].first == X("ep") + X("n") + C(1));
    CHECK(rhs[0].term.P == C(1));
}

TEST_CASE("divide_and_conquer: homogeneous single node") {
    AnsatzConfig cfg;
    cfg.ansatz = Ansatz::kBoundaryVanishing;
    auto node = divide_and_conquer(x_pow_n(), cfg, 2);
    REQUIRE(node.annihilator.has_value());
    CHECK(node.rhs.empty());
    CHECK(node.children.empty());
    CHECK(!node.base_value.has_value());
}

TEST_CASE("divide_and_conquer: 1-dim exponential down to base values") {
    // F = e^{-x t} on t in (0,1): x I(x) = 1 - e^{-x}
    HyperTerm f;
    f.mode = Mode::kContinuous;
    f.param = "x";
    f.a = -(X("x") * X("t"));
    f.intvars = {{"t", Bound::finite(0), Bound::finite(1)}};
    f = validate(f);
    AnsatzConfig cfg;
    auto node = divide_and_conquer(f, cfg, 1);
    REQUIRE(node.annihilator.has_value());
    REQUIRE(node.rhs.size() == 2);
    CHECK(node.rhs[0].sign == -1);   // lower end t = 0
    CHECK(!node.rhs[0].at_upper);
    CHECK(node.rhs[1].sign == 1);    // upper end t = 1
    CHECK(node.rhs[1].at_upper);
    REQUIRE(node.children.size() == 2);
    for (auto& c : node.children) {
        CHECK(c.integral.intvars.empty());
        CHECK(c.base_value.has_value());
        CHECK(c.children.empty());
    }
    // the t = 1 value carries the e^{-x} factor, the t = 0 value does not
    CHECK(node.rhs[1].term.a == -X("x"));
    CHECK(node.rhs[0].term.a.is_zero());
}

TEST_CASE("divide_and_conquer: 4-dim first step matches the order-1 ODE") {
    AnsatzConfig cfg;
    cfg.L_max = 3;
    cfg.degree_max = 6;
    auto f = dim4_term();
    auto out = find_telescoper(f, cfg);
    REQUIRE(out.annihilator.has_value());
    const Annihilator& ann = *out.annihilator;
    CHECK(ann.L == 1);
    // proportional to 2 f + x D_x f
    CHECK(ann.e[0] * X("x") == ann.e[1] * C(2));
    auto rhs = boundary_terms(f, ann);
    CHECK(rhs.size() <= 8);
    for (auto& b : rhs) CHECK(b.term.intvars.size() == 3);
}
