#pragma once

#include <map>
#include <string>

#include "hyperaz/multipoly.hpp"
#include "hyperaz/primefield.hpp"

namespace hyperaz {

// Reduced rational function num/den.  Invariants: den != 0, gcd(num,den) = 1
// including rational content, den has integer coprime coefficients with
// positive graded-lex leading coefficient.
class RatFunc {
public:
    RatFunc() : num_(), den_(Rational(1)) {}
    RatFunc(MultiPoly num, MultiPoly den);
    /*implicit*/ RatFunc(const MultiPoly& p) : num_(p), den_(Rational(1)) { reduce(); }
    explicit RatFunc(const Rational& c) : num_(c), den_(Rational(1)) {}

    const MultiPoly& num() const { return num_; }
    const MultiPoly& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_polynomial() const { return den_.is_one(); }

    RatFunc operator-() const;
    RatFunc operator+(const RatFunc& o) const;
    RatFunc operator-(const RatFunc& o) const;
    RatFunc operator*(const RatFunc& o) const;
    RatFunc operator/(const RatFunc& o) const;  // throws on division by zero
    RatFunc& operator+=(const RatFunc& o) { return *this = *this + o; }
    RatFunc& operator-=(const RatFunc& o) { return *this = *this - o; }
    RatFunc& operator*=(const RatFunc& o) { return *this = *this * o; }
    bool operator==(const RatFunc& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const RatFunc& o) const { return !(*this == o); }

    RatFunc inverse() const;
    RatFunc pow(long k) const;

    // Exact quotient-rule derivative; throws UnknownVariable for names that
    // were never declared anywhere (constants differentiate to zero).
    RatFunc derivative(const std::string& v) const;
    RatFunc substituted(const std::string& v, const Rational& value) const;
    RatFunc substituted(const std::string& v, const MultiPoly& value) const;
    RatFunc shifted(const std::string& v, const Rational& k) const;

    bool depends_on(const std::string& v) const {
        return num_.depends_on(v) || den_.depends_on(v);
    }

    // Throws BadEvaluationPoint when the denominator vanishes mod p.
    std::uint64_t eval_mod(const std::map<std::string, std::uint64_t>& assign,
                           const Fp& fp) const;
    double eval_double(const std::map<std::string, double>& assign) const;
    Rational eval_rational(const std::map<std::string, Rational>& assign) const;

    std::string str() const;

private:
    MultiPoly num_, den_;
    void reduce();
};

inline RatFunc operator*(const Rational& c, const RatFunc& f) {
    return RatFunc(Rational(c)) * f;
}

}  // namespace hyperaz
