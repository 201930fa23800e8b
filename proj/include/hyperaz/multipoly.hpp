#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "hyperaz/errors.hpp"

namespace hyperaz {

using Rational = mpq_class;

Rational rational_from_string(const std::string& s);
std::string rational_str(const Rational& r);

// Degree of the zero polynomial.
inline constexpr long kDegNegInf = std::numeric_limits<long>::min();

struct Fp;  // primefield.hpp

// Sparse multivariate polynomial over Q.  The variable list is kept sorted by
// name and pruned to the variables that actually occur, so structurally equal
// polynomials compare equal regardless of how they were built.  Terms are in
// descending graded-lexicographic order.
class MultiPoly {
public:
    struct Term {
        std::vector<unsigned> exps;  // aligned with vars_
        Rational coeff;
    };

    MultiPoly() = default;  // zero
    explicit MultiPoly(const Rational& c);
    explicit MultiPoly(long c);
    static MultiPoly var(const std::string& name, unsigned power = 1);
    static MultiPoly monomial(const std::vector<std::string>& vars,
                              const std::vector<unsigned>& exps,
                              const Rational& coeff);

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const { return vars_.empty(); }
    bool is_one() const;
    Rational constant_value() const;  // requires is_constant()
    std::size_t term_count() const { return terms_.size(); }
    const std::vector<std::string>& vars() const { return vars_; }
    const std::vector<Term>& terms() const { return terms_; }

    bool depends_on(const std::string& v) const;
    long degree(const std::string& v) const;
    long total_degree() const;
    Rational leading_coeff() const;  // of graded-lex leading term; 0 for zero
    Rational coeff_of(const std::vector<std::string>& vars,
                      const std::vector<unsigned>& exps) const;

    MultiPoly operator-() const;
    MultiPoly operator+(const MultiPoly& o) const;
    MultiPoly operator-(const MultiPoly& o) const;
    MultiPoly operator*(const MultiPoly& o) const;
    MultiPoly operator*(const Rational& c) const;
    MultiPoly& operator+=(const MultiPoly& o) { return *this = *this + o; }
    MultiPoly& operator-=(const MultiPoly& o) { return *this = *this - o; }
    MultiPoly& operator*=(const MultiPoly& o) { return *this = *this * o; }
    bool operator==(const MultiPoly& o) const;
    bool operator!=(const MultiPoly& o) const { return !(*this == o); }

    MultiPoly pow(unsigned k) const;

    // Throws InexactDivision unless b divides a exactly.
    static MultiPoly exact_div(const MultiPoly& a, const MultiPoly& b);
    // True and sets q when b divides a.
    static bool try_div(const MultiPoly& a, const MultiPoly& b, MultiPoly* q);
    // Primitive gcd with positive leading coefficient; gcd(0,0) = 0.
    static MultiPoly gcd(const MultiPoly& a, const MultiPoly& b);

    MultiPoly derivative(const std::string& v) const;
    MultiPoly shifted(const std::string& v, const Rational& k) const;
    MultiPoly substituted(const std::string& v, const Rational& value) const;
    MultiPoly substituted(const std::string& v, const MultiPoly& value) const;

    // Rational content (gcd of coefficient numerators / lcm of denominators,
    // carrying the sign of the leading coefficient); content of 0 is 0.
    Rational content() const;
    MultiPoly primitive_part() const;

    // Coefficients c_0..c_deg of v^i, each free of v.
    std::vector<MultiPoly> coeffs_in(const std::string& v) const;
    static MultiPoly from_coeffs_in(const std::string& v,
                                    const std::vector<MultiPoly>& cs);

    std::uint64_t eval_mod(const std::map<std::string, std::uint64_t>& assign,
                           const Fp& fp) const;
    double eval_double(const std::map<std::string, double>& assign) const;
    Rational eval_rational(const std::map<std::string, Rational>& assign) const;

    // Canonical expanded text form, e.g. "3*n^2*x - 1/2*x + 1".
    std::string str() const;

    std::size_t hash() const;

private:
    std::vector<std::string> vars_;
    std::vector<Term> terms_;

    void normalize();
    MultiPoly aligned_to(const std::vector<std::string>& universe) const;
    friend MultiPoly merge_add(const MultiPoly& a, const MultiPoly& b, bool sub);
};

inline MultiPoly operator*(const Rational& c, const MultiPoly& p) { return p * c; }

}  // namespace hyperaz
