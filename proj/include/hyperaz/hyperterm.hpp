#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hyperaz/ratfunc.hpp"

namespace hyperaz {

// Exponent affine in ep and n: value = c0 + c_eps*ep + c_n*n.
struct Exponent {
    Rational c0 = 0, c_eps = 0, c_n = 0;

    bool is_zero() const { return c0 == 0 && c_eps == 0 && c_n == 0; }
    bool depends_on_n() const { return c_n != 0; }
    // As a polynomial in ep (and the discrete parameter).
    MultiPoly poly(const std::string& n_name) const;
    Exponent operator+(const Exponent& o) const {
        return {Rational(c0 + o.c0), Rational(c_eps + o.c_eps), Rational(c_n + o.c_n)};
    }
    Exponent operator*(long k) const {
        return {Rational(c0 * k), Rational(c_eps * k), Rational(c_n * k)};
    }
    bool operator==(const Exponent& o) const {
        return c0 == o.c0 && c_eps == o.c_eps && c_n == o.c_n;
    }
    std::string str() const;
};

struct Bound {
    enum Kind { kFinite, kNegInf, kPosInf };
    Kind kind = kFinite;
    Rational value = 0;  // meaningful for kFinite only

    static Bound finite(const Rational& v) { return {kFinite, v}; }
    static Bound neg_inf() { return {kNegInf, 0}; }
    static Bound pos_inf() { return {kPosInf, 0}; }
    bool is_finite() const { return kind == kFinite; }
    bool operator==(const Bound& o) const {
        return kind == o.kind && (kind != kFinite || value == o.value);
    }
    std::string str() const;
};

struct IntVar {
    std::string name;
    Bound lower, upper;
};

enum class Mode { kDiscrete, kContinuous };

// Hyperexponential integrand P * e^{a/b} * prod S_p^{alpha_p} * (s/t)^n over
// a box of integration variables.  In continuous mode the s/t factor is absent
// (s = t = 1) and no exponent depends on n.
struct HyperTerm {
    Mode mode = Mode::kContinuous;
    std::string param;  // n (discrete) or x (continuous)
    MultiPoly P{Rational(1)};
    MultiPoly a;  // zero means no exponential part
    MultiPoly b{Rational(1)};
    std::vector<std::pair<MultiPoly, Exponent>> powers;
    MultiPoly s{Rational(1)};
    MultiPoly t{Rational(1)};
    std::vector<IntVar> intvars;

    std::size_t dim() const { return intvars.size(); }
    const IntVar* find_var(const std::string& name) const;
    bool is_zero() const { return P.is_zero(); }
    std::string str() const;
};

// Checks all invariants and normalizes: a/b and s/t reduced, powers with
// integer multiples of n folded into s/t, trivial factors dropped.
// Idempotent.
HyperTerm validate(HyperTerm term);

// True unless the term is discrete and carries a parameter-dependent
// exponential or power factor: such prefactors are valid integrand pieces
// (boundary values produce them) but have no rational shift quotient, so the
// telescoping machinery rejects the term.
bool shift_compatible(const HyperTerm& term);

// Logarithmic derivative q/r = D_v Hbar / Hbar, reduced.
struct LogDeriv {
    MultiPoly q, r;
    RatFunc rat() const { return RatFunc(q, r); }
};

// Hbar for ansatz order L:
//   discrete:   e^{a/b} * prod S_p^{alpha_p} * s^n / t^{n+L}
//   continuous: e^{a/b} * b^{-2L} * prod S_p^{alpha_p - L}
// The continuous S_p^{-L} shift makes every RHS numerator polynomial: each
// D_param lowers an S_p exponent by at most one and the b exponent by at
// most two.
LogDeriv log_derivative(const HyperTerm& term, long L, const std::string& v);

// RHS building block for telescoper order i at ansatz order L:
//   discrete:   P(n+i) * s^i * t^{L-i}
//   continuous: c_i with D_param^i F = c_i * Hbar
MultiPoly hbar_parts(const HyperTerm& term, long L, long i);

// Logarithmic derivative of the full integrand F (including P) with respect
// to any variable.  Independent of the Hbar machinery; used by the exact
// certificate check.
RatFunc integrand_logderiv(const HyperTerm& term, const std::string& v);

}  // namespace hyperaz
