#include "hyperaz/ratfunc.hpp"

#include <sstream>

namespace hyperaz {

RatFunc::RatFunc(MultiPoly num, MultiPoly den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero())
        raise(ErrorCode::InexactDivision, "zero denominator in rational function");
    reduce();
}

void RatFunc::reduce() {
    if (den_.is_zero())
        raise(ErrorCode::InexactDivision, "zero denominator in rational function");
    if (num_.is_zero()) {
        den_ = MultiPoly(Rational(1));
        return;
    }
    if (!den_.is_constant()) {
        MultiPoly g = MultiPoly::gcd(num_, den_);
        if (!g.is_one()) {
            num_ = MultiPoly::exact_div(num_, g);
            den_ = MultiPoly::exact_div(den_, g);
        }
    }
    // scale so den has integer coprime coefficients, positive leading coeff
    Rational c = den_.content();
    num_ = num_ * (Rational(1) / c);
    den_ = den_ * (Rational(1) / c);
}

RatFunc RatFunc::operator-() const {
    RatFunc r = *this;
    r.num_ = -r.num_;
    return r;
}

RatFunc RatFunc::operator+(const RatFunc& o) const {
    if (den_ == o.den_) return RatFunc(num_ + o.num_, den_);
    return RatFunc(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}

RatFunc RatFunc::operator-(const RatFunc& o) const {
    if (den_ == o.den_) return RatFunc(num_ - o.num_, den_);
    return RatFunc(num_ * o.den_ - o.num_ * den_, den_ * o.den_);
}

RatFunc RatFunc::operator*(const RatFunc& o) const {
    if (is_zero() || o.is_zero()) return RatFunc();
    // cross-reduce before multiplying to limit blowup
    MultiPoly g1 = MultiPoly::gcd(num_, o.den_);
    MultiPoly g2 = MultiPoly::gcd(o.num_, den_);
    MultiPoly n1 = g1.is_one() ? num_ : MultiPoly::exact_div(num_, g1);
    MultiPoly d2 = g1.is_one() ? o.den_ : MultiPoly::exact_div(o.den_, g1);
    MultiPoly n2 = g2.is_one() ? o.num_ : MultiPoly::exact_div(o.num_, g2);
    MultiPoly d1 = g2.is_one() ? den_ : MultiPoly::exact_div(den_, g2);
    return RatFunc(n1 * n2, d1 * d2);
}

RatFunc RatFunc::inverse() const {
    if (is_zero())
        raise(ErrorCode::InexactDivision, "inverse of zero rational function");
    return RatFunc(den_, num_);
}

RatFunc RatFunc::operator/(const RatFunc& o) const { return *this * o.inverse(); }

RatFunc RatFunc::pow(long k) const {
    if (k < 0) return inverse().pow(-k);
    RatFunc r(Rational(1));
    RatFunc b = *this;
    auto e = static_cast<unsigned long>(k);
    while (e) {
        if (e & 1) r = r * b;
        e >>= 1;
        if (e) b = b * b;
    }
    return r;
}

RatFunc RatFunc::derivative(const std::string& v) const {
    MultiPoly dn = num_.derivative(v);
    MultiPoly dd = den_.derivative(v);
    if (dd.is_zero()) return RatFunc(dn, den_);
    // with g = gcd(den, den') and den = g*d1 the derivative is
    // (num'*d1 - num*(den'/g)) / (den*d1), avoiding the den^2 blowup
    MultiPoly g = MultiPoly::gcd(den_, dd);
    if (g.is_constant()) return RatFunc(dn * den_ - num_ * dd, den_ * den_);
    MultiPoly d1 = MultiPoly::exact_div(den_, g);
    return RatFunc(dn * d1 - num_ * MultiPoly::exact_div(dd, g), den_ * d1);
}

RatFunc RatFunc::substituted(const std::string& v, const Rational& value) const {
    return RatFunc(num_.substituted(v, value), den_.substituted(v, value));
}

RatFunc RatFunc::substituted(const std::string& v, const MultiPoly& value) const {
    return RatFunc(num_.substituted(v, value), den_.substituted(v, value));
}

RatFunc RatFunc::shifted(const std::string& v, const Rational& k) const {
    return RatFunc(num_.shifted(v, k), den_.shifted(v, k));
}

std::uint64_t RatFunc::eval_mod(const std::map<std::string, std::uint64_t>& assign,
                                const Fp& fp) const {
    std::uint64_t d = den_.eval_mod(assign, fp);
    if (d == 0)
        raise(ErrorCode::BadEvaluationPoint, "denominator vanishes mod p");
    return fp.mul(num_.eval_mod(assign, fp), fp.inv(d));
}

double RatFunc::eval_double(const std::map<std::string, double>& assign) const {
    return num_.eval_double(assign) / den_.eval_double(assign);
}

Rational RatFunc::eval_rational(const std::map<std::string, Rational>& assign) const {
    Rational d = den_.eval_rational(assign);
    if (d == 0)
        raise(ErrorCode::BadEvaluationPoint, "denominator vanishes at point");
    return num_.eval_rational(assign) / d;
}

std::string RatFunc::str() const {
    if (is_polynomial()) return num_.str();
    std::ostringstream os;
    os << "(" << num_.str() << ")/(" << den_.str() << ")";
    return os.str();
}

}  // namespace hyperaz
