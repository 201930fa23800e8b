#include "hyperaz/multipoly.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

#include "hyperaz/primefield.hpp"

namespace hyperaz {

Rational rational_from_string(const std::string& s) {
    try {
        Rational r(s);
        r.canonicalize();
        return r;
    } catch (const std::invalid_argument&) {
        raise(ErrorCode::ParseError, "bad rational literal: " + s);
    }
}

std::string rational_str(const Rational& r) {
    return r.get_str();
}

namespace {

// Descending graded-lex: larger total degree first, ties broken
// lexicographically on the exponent vector.
bool term_less(const std::vector<unsigned>& a, const std::vector<unsigned>& b) {
    unsigned da = 0, db = 0;
    for (unsigned e : a) da += e;
    for (unsigned e : b) db += e;
    if (da != db) return da < db;
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

std::vector<std::string> var_union(const std::vector<std::string>& a,
                                   const std::vector<std::string>& b) {
    std::vector<std::string> u;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(u));
    return u;
}

}  // namespace

MultiPoly::MultiPoly(const Rational& c) {
    if (c != 0) terms_.push_back({{}, c});
}

MultiPoly::MultiPoly(long c) : MultiPoly(Rational(c)) {}

MultiPoly MultiPoly::var(const std::string& name, unsigned power) {
    MultiPoly p;
    if (power == 0) return MultiPoly(Rational(1));
    p.vars_ = {name};
    p.terms_.push_back({{power}, Rational(1)});
    return p;
}

MultiPoly MultiPoly::monomial(const std::vector<std::string>& vars,
                              const std::vector<unsigned>& exps,
                              const Rational& coeff) {
    MultiPoly p;
    p.vars_ = vars;
    p.terms_.push_back({exps, coeff});
    p.normalize();
    return p;
}

bool MultiPoly::is_one() const {
    return terms_.size() == 1 && terms_[0].exps.empty() && terms_[0].coeff == 1;
}

Rational MultiPoly::constant_value() const {
    if (is_zero()) return Rational(0);
    assert(is_constant());
    return terms_[0].coeff;
}

void MultiPoly::normalize() {
    // Sort variables, remap exponents, combine terms, drop zero coefficients
    // and unused variables.
    std::vector<std::string> sorted_vars = vars_;
    std::sort(sorted_vars.begin(), sorted_vars.end());
    sorted_vars.erase(std::unique(sorted_vars.begin(), sorted_vars.end()),
                      sorted_vars.end());

    std::map<std::vector<unsigned>, Rational> acc;
    for (auto& t : terms_) {
        std::vector<unsigned> e(sorted_vars.size(), 0);
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            if (i < t.exps.size() && t.exps[i] != 0) {
                auto it = std::lower_bound(sorted_vars.begin(), sorted_vars.end(),
                                           vars_[i]);
                e[static_cast<std::size_t>(it - sorted_vars.begin())] += t.exps[i];
            }
        }
        acc[e] += t.coeff;
    }
    // prune unused variables
    std::vector<bool> used(sorted_vars.size(), false);
    for (auto& [e, c] : acc)
        if (c != 0)
            for (std::size_t i = 0; i < e.size(); ++i)
                if (e[i]) used[i] = true;
    std::vector<std::string> final_vars;
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < sorted_vars.size(); ++i)
        if (used[i]) {
            keep.push_back(i);
            final_vars.push_back(sorted_vars[i]);
        }
    std::vector<Term> final_terms;
    for (auto& [e, c] : acc) {
        if (c == 0) continue;
        std::vector<unsigned> e2(keep.size());
        for (std::size_t i = 0; i < keep.size(); ++i) e2[i] = e[keep[i]];
        final_terms.push_back({std::move(e2), c});
    }
    std::sort(final_terms.begin(), final_terms.end(),
              [](const Term& a, const Term& b) { return term_less(b.exps, a.exps); });
    vars_ = std::move(final_vars);
    terms_ = std::move(final_terms);
}

MultiPoly MultiPoly::aligned_to(const std::vector<std::string>& universe) const {
    MultiPoly r;
    r.vars_ = universe;
    for (auto& t : terms_) {
        std::vector<unsigned> e(universe.size(), 0);
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            auto it = std::lower_bound(universe.begin(), universe.end(), vars_[i]);
            e[static_cast<std::size_t>(it - universe.begin())] = t.exps[i];
        }
        r.terms_.push_back({std::move(e), t.coeff});
    }
    std::sort(r.terms_.begin(), r.terms_.end(), [](const Term& a, const Term& b) {
        return term_less(b.exps, a.exps);
    });
    return r;
}

MultiPoly merge_add(const MultiPoly& a, const MultiPoly& b, bool sub) {
    auto u = [&] {
        std::vector<std::string> ua = a.vars_, ub = b.vars_;
        std::vector<std::string> r;
        std::set_union(ua.begin(), ua.end(), ub.begin(), ub.end(),
                       std::back_inserter(r));
        return r;
    }();
    MultiPoly aa = a.aligned_to(u), bb = b.aligned_to(u);
    MultiPoly r;
    r.vars_ = u;
    std::size_t i = 0, j = 0;
    while (i < aa.terms_.size() || j < bb.terms_.size()) {
        if (j == bb.terms_.size() ||
            (i < aa.terms_.size() &&
             term_less(bb.terms_[j].exps, aa.terms_[i].exps))) {
            r.terms_.push_back(aa.terms_[i++]);
        } else if (i == aa.terms_.size() ||
                   term_less(aa.terms_[i].exps, bb.terms_[j].exps)) {
            auto t = bb.terms_[j++];
            if (sub) t.coeff = -t.coeff;
            r.terms_.push_back(std::move(t));
        } else {
            Rational c = sub ? Rational(aa.terms_[i].coeff - bb.terms_[j].coeff)
                             : Rational(aa.terms_[i].coeff + bb.terms_[j].coeff);
            if (c != 0) r.terms_.push_back({aa.terms_[i].exps, c});
            ++i;
            ++j;
        }
    }
    r.normalize();
    return r;
}

MultiPoly MultiPoly::operator+(const MultiPoly& o) const { return merge_add(*this, o, false); }
MultiPoly MultiPoly::operator-(const MultiPoly& o) const { return merge_add(*this, o, true); }

MultiPoly MultiPoly::operator-() const {
    MultiPoly r = *this;
    for (auto& t : r.terms_) t.coeff = -t.coeff;
    return r;
}

MultiPoly MultiPoly::operator*(const Rational& c) const {
    if (c == 0) return MultiPoly();
    MultiPoly r = *this;
    for (auto& t : r.terms_) t.coeff *= c;
    return r;
}

MultiPoly MultiPoly::operator*(const MultiPoly& o) const {
    if (is_zero() || o.is_zero()) return MultiPoly();
    auto u = var_union(vars_, o.vars_);
    MultiPoly aa = aligned_to(u), bb = o.aligned_to(u);
    std::map<std::vector<unsigned>, Rational> acc;
    std::vector<unsigned> e(u.size());
    for (auto& ta : aa.terms_)
        for (auto& tb : bb.terms_) {
            for (std::size_t k = 0; k < u.size(); ++k)
                e[k] = ta.exps[k] + tb.exps[k];
            acc[e] += ta.coeff * tb.coeff;
        }
    MultiPoly r;
    r.vars_ = u;
    for (auto& [ex, c] : acc)
        if (c != 0) r.terms_.push_back({ex, c});
    r.normalize();
    return r;
}

bool MultiPoly::operator==(const MultiPoly& o) const {
    if (vars_ != o.vars_ || terms_.size() != o.terms_.size()) return false;
    for (std::size_t i = 0; i < terms_.size(); ++i)
        if (terms_[i].exps != o.terms_[i].exps || terms_[i].coeff != o.terms_[i].coeff)
            return false;
    return true;
}

MultiPoly MultiPoly::pow(unsigned k) const {
    MultiPoly r{Rational(1)};
    MultiPoly base = *this;
    while (k) {
        if (k & 1) r = r * base;
        base = (k >>= 1) ? base * base : base;
    }
    return r;
}

bool MultiPoly::depends_on(const std::string& v) const {
    return std::binary_search(vars_.begin(), vars_.end(), v);
}

long MultiPoly::degree(const std::string& v) const {
    if (is_zero()) return kDegNegInf;
    auto it = std::lower_bound(vars_.begin(), vars_.end(), v);
    if (it == vars_.end() || *it != v) return 0;
    std::size_t idx = static_cast<std::size_t>(it - vars_.begin());
    long d = 0;
    for (auto& t : terms_) d = std::max(d, static_cast<long>(t.exps[idx]));
    return d;
}

long MultiPoly::total_degree() const {
    if (is_zero()) return kDegNegInf;
    long d = 0;
    for (auto& e : terms_[0].exps) d += e;  // leading term has max total degree
    return d;
}

Rational MultiPoly::leading_coeff() const {
    return is_zero() ? Rational(0) : terms_[0].coeff;
}

Rational MultiPoly::coeff_of(const std::vector<std::string>& vars,
                             const std::vector<unsigned>& exps) const {
    std::map<std::string, unsigned> want;
    for (std::size_t i = 0; i < vars.size(); ++i)
        if (exps[i]) want[vars[i]] = exps[i];
    for (auto& t : terms_) {
        std::map<std::string, unsigned> have;
        for (std::size_t i = 0; i < vars_.size(); ++i)
            if (t.exps[i]) have[vars_[i]] = t.exps[i];
        if (have == want) return t.coeff;
    }
    return Rational(0);
}

bool MultiPoly::try_div(const MultiPoly& a, const MultiPoly& b, MultiPoly* q) {
    if (b.is_zero()) return false;
    if (a.is_zero()) {
        *q = MultiPoly();
        return true;
    }
    if (b.is_constant()) {
        *q = a * (Rational(1) / b.constant_value());
        return true;
    }
    auto u = var_union(a.vars_, b.vars_);
    MultiPoly r = a.aligned_to(u);
    MultiPoly bb = b.aligned_to(u);
    const auto& lb = bb.terms_[0];
    MultiPoly quot;
    quot.vars_ = u;
    while (!r.terms_.empty()) {
        const auto& lr = r.terms_[0];
        std::vector<unsigned> e(u.size());
        for (std::size_t k = 0; k < u.size(); ++k) {
            if (lr.exps[k] < lb.exps[k]) return false;
            e[k] = lr.exps[k] - lb.exps[k];
        }
        Rational c = lr.coeff / lb.coeff;
        MultiPoly t;
        t.vars_ = u;
        t.terms_.push_back({e, c});
        quot.terms_.push_back({e, c});
        r = r - t * bb;
        if (!r.is_zero()) r = r.aligned_to(u);
    }
    quot.normalize();
    *q = std::move(quot);
    return true;
}

MultiPoly MultiPoly::exact_div(const MultiPoly& a, const MultiPoly& b) {
    MultiPoly q;
    if (!try_div(a, b, &q))
        raise(ErrorCode::InexactDivision,
              "polynomial division with nonzero remainder");
    return q;
}

Rational MultiPoly::content() const {
    if (is_zero()) return Rational(0);
    mpz_class num_gcd = 0, den_lcm = 1;
    for (auto& t : terms_) {
        mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(),
                t.coeff.get_num().get_mpz_t());
        mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(),
                t.coeff.get_den().get_mpz_t());
    }
    Rational c(num_gcd, den_lcm);
    c.canonicalize();
    if (terms_[0].coeff < 0) c = -c;
    return c;
}

MultiPoly MultiPoly::primitive_part() const {
    if (is_zero()) return *this;
    return *this * (Rational(1) / content());
}

std::vector<MultiPoly> MultiPoly::coeffs_in(const std::string& v) const {
    long d = std::max(degree(v), 0L);
    std::vector<MultiPoly> cs(static_cast<std::size_t>(d) + 1);
    auto it = std::lower_bound(vars_.begin(), vars_.end(), v);
    bool has = it != vars_.end() && *it == v;
    std::size_t idx = has ? static_cast<std::size_t>(it - vars_.begin()) : 0;
    for (auto& t : terms_) {
        unsigned e = has ? t.exps[idx] : 0;
        MultiPoly m;
        m.vars_ = vars_;
        auto te = t.exps;
        if (has) te[idx] = 0;
        m.terms_.push_back({te, t.coeff});
        m.normalize();
        cs[e] += m;
    }
    return cs;
}

MultiPoly MultiPoly::from_coeffs_in(const std::string& v,
                                    const std::vector<MultiPoly>& cs) {
    MultiPoly r;
    MultiPoly x = MultiPoly::var(v);
    for (std::size_t i = cs.size(); i-- > 0;) r = r * x + cs[i];
    return r;
}

MultiPoly MultiPoly::derivative(const std::string& v) const {
    auto it = std::lower_bound(vars_.begin(), vars_.end(), v);
    if (it == vars_.end() || *it != v) return MultiPoly();
    std::size_t idx = static_cast<std::size_t>(it - vars_.begin());
    MultiPoly r;
    r.vars_ = vars_;
    for (auto& t : terms_) {
        if (t.exps[idx] == 0) continue;
        auto e = t.exps;
        Rational c = t.coeff * Rational(static_cast<long>(e[idx]));
        e[idx]--;
        r.terms_.push_back({std::move(e), c});
    }
    r.normalize();
    return r;
}

MultiPoly MultiPoly::substituted(const std::string& v, const MultiPoly& value) const {
    if (!depends_on(v)) return *this;
    auto cs = coeffs_in(v);
    MultiPoly r;
    for (std::size_t i = cs.size(); i-- > 0;) r = r * value + cs[i];
    return r;
}

MultiPoly MultiPoly::substituted(const std::string& v, const Rational& value) const {
    return substituted(v, MultiPoly(value));
}

MultiPoly MultiPoly::shifted(const std::string& v, const Rational& k) const {
    return substituted(v, MultiPoly::var(v) + MultiPoly(k));
}

std::uint64_t MultiPoly::eval_mod(const std::map<std::string, std::uint64_t>& assign,
                                  const Fp& fp) const {
    std::vector<std::uint64_t> vals(vars_.size());
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        auto it = assign.find(vars_[i]);
        if (it == assign.end())
            raise(ErrorCode::UnknownVariable, "no value for " + vars_[i]);
        vals[i] = it->second % fp.p;
    }
    std::uint64_t acc = 0;
    for (auto& t : terms_) {
        std::uint64_t m = fp.from_rational(t.coeff);
        for (std::size_t i = 0; i < vars_.size(); ++i)
            if (t.exps[i]) m = fp.mul(m, fp.pow(vals[i], t.exps[i]));
        acc = fp.add(acc, m);
    }
    return acc;
}

double MultiPoly::eval_double(const std::map<std::string, double>& assign) const {
    std::vector<double> vals(vars_.size());
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        auto it = assign.find(vars_[i]);
        if (it == assign.end())
            raise(ErrorCode::UnknownVariable, "no value for " + vars_[i]);
        vals[i] = it->second;
    }
    double acc = 0;
    for (auto& t : terms_) {
        double m = t.coeff.get_d();
        for (std::size_t i = 0; i < vars_.size(); ++i)
            for (unsigned k = 0; k < t.exps[i]; ++k) m *= vals[i];
        acc += m;
    }
    return acc;
}

Rational MultiPoly::eval_rational(const std::map<std::string, Rational>& assign) const {
    Rational acc = 0;
    for (auto& t : terms_) {
        Rational m = t.coeff;
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            if (!t.exps[i]) continue;
            auto it = assign.find(vars_[i]);
            if (it == assign.end())
                raise(ErrorCode::UnknownVariable, "no value for " + vars_[i]);
            for (unsigned k = 0; k < t.exps[i]; ++k) m *= it->second;
        }
        acc += m;
    }
    return acc;
}

// ---- subresultant gcd ----------------------------------------------------

namespace {

std::uint64_t name_hash(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

// Univariate image of p in v mod fp.p with every other variable evaluated at
// a point derived from its name and salt.  Coefficients ascending in v.
// Throws BadEvaluationPoint when a coefficient denominator vanishes mod p.
std::vector<std::uint64_t> univariate_image(const MultiPoly& p,
                                            const std::string& v, const Fp& fp,
                                            std::uint64_t salt) {
    const auto& vars = p.vars();
    std::vector<std::uint64_t> vals(vars.size(), 0);
    long vi = -1;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        if (vars[i] == v)
            vi = static_cast<long>(i);
        else
            vals[i] = 17 + hash_mix(salt ^ name_hash(vars[i])) % ((1u << 20) - 17);
    }
    long dv = vi >= 0 ? p.degree(v) : 0;
    std::vector<std::uint64_t> out(static_cast<std::size_t>(dv + 1), 0);
    for (const auto& t : p.terms()) {
        std::uint64_t c = fp.from_rational(t.coeff);
        for (std::size_t i = 0; i < vars.size(); ++i)
            if (static_cast<long>(i) != vi)
                c = fp.mul(c, fp.pow(vals[i], t.exps[i]));
        std::size_t e = vi >= 0 ? t.exps[static_cast<std::size_t>(vi)] : 0;
        out[e] = fp.add(out[e], c);
    }
    while (out.size() > 1 && out.back() == 0) out.pop_back();
    return out;
}

std::vector<std::uint64_t> uni_gcd_mod(std::vector<std::uint64_t> a,
                                       std::vector<std::uint64_t> b,
                                       const Fp& fp) {
    auto trim = [](std::vector<std::uint64_t>& x) {
        while (!x.empty() && x.back() == 0) x.pop_back();
    };
    trim(a);
    trim(b);
    while (!b.empty()) {
        std::uint64_t inv = fp.inv(b.back());
        while (a.size() >= b.size()) {
            std::uint64_t f = fp.mul(a.back(), inv);
            std::size_t off = a.size() - b.size();
            for (std::size_t i = 0; i < b.size(); ++i)
                a[off + i] = fp.sub(a[off + i], fp.mul(f, b[i]));
            trim(a);
            if (a.empty()) break;
        }
        std::swap(a, b);
    }
    return a;
}

// True when gcd(a, b) is provably constant: for every variable v, a modular
// univariate gcd (in v, other variables at generic points) of degree zero
// proves the true gcd free of v, since the evaluation homomorphism maps the
// gcd to a divisor of the image gcd.
bool provably_coprime(const MultiPoly& a, const MultiPoly& b) {
    const Fp fp{modular_primes()[0]};
    std::vector<std::string> vars = a.vars();
    for (auto& v : b.vars())
        if (std::find(vars.begin(), vars.end(), v) == vars.end())
            vars.push_back(v);
    for (const auto& v : vars) {
        bool settled = false;
        for (std::uint64_t attempt = 0; attempt < 2 && !settled; ++attempt) {
            try {
                auto ia = univariate_image(a, v, fp, 0x9e37u + attempt);
                auto ib = univariate_image(b, v, fp, 0x9e37u + attempt);
                auto g = uni_gcd_mod(std::move(ia), std::move(ib), fp);
                if (g.size() == 1) settled = true;
            } catch (const Error&) {
                // bad evaluation point; retry once
            }
        }
        if (!settled) return false;
    }
    return true;
}

// leading coefficient of p viewed as univariate in v
MultiPoly lc_in(const MultiPoly& p, const std::string& v) {
    auto cs = p.coeffs_in(v);
    return cs.back();
}

// pseudo-remainder of a by b w.r.t. v
MultiPoly prem(MultiPoly a, const MultiPoly& b, const std::string& v) {
    long db = b.degree(v);
    MultiPoly lb = lc_in(b, v);
    long e = a.degree(v) - db + 1;
    while (!a.is_zero() && a.degree(v) >= db) {
        MultiPoly la = lc_in(a, v);
        MultiPoly shift = MultiPoly::var(v, static_cast<unsigned>(a.degree(v) - db));
        a = lb * a - la * shift * b;
        --e;
    }
    for (; e > 0; --e) a = a * lb;
    return a;
}

}  // namespace

MultiPoly MultiPoly::gcd(const MultiPoly& a, const MultiPoly& b) {
    if (a.is_zero()) return b.is_zero() ? b : b.primitive_part();
    if (b.is_zero()) return a.primitive_part();
    if (a.is_constant() || b.is_constant()) return MultiPoly(Rational(1));

    if (a.term_count() + b.term_count() > 8 && provably_coprime(a, b))
        return MultiPoly(Rational(1));

    std::string v = var_union(a.vars_, b.vars_).front();
    if (!a.depends_on(v)) {
        // gcd divides the v-content of b
        auto cs = b.coeffs_in(v);
        MultiPoly cb;
        for (auto& c : cs) cb = gcd(cb, c);
        return gcd(a, cb);
    }
    if (!b.depends_on(v)) return gcd(b, a);

    auto content_in = [&](const MultiPoly& p) {
        MultiPoly c;
        for (auto& q : p.coeffs_in(v)) c = gcd(c, q);
        return c;
    };
    MultiPoly ca = content_in(a), cb = content_in(b);
    MultiPoly A = exact_div(a, ca), B = exact_div(b, cb);
    if (A.degree(v) < B.degree(v)) std::swap(A, B);

    MultiPoly g{Rational(1)}, h{Rational(1)};
    MultiPoly prim;  // primitive-part gcd w.r.t. v
    while (true) {
        long d = A.degree(v) - B.degree(v);
        MultiPoly R = prem(A, B, v);
        if (R.is_zero()) {
            prim = exact_div(B, content_in(B));
            break;
        }
        if (R.degree(v) == 0) {
            prim = MultiPoly(Rational(1));
            break;
        }
        A = B;
        MultiPoly divisor = g;
        for (long k = 0; k < d; ++k) divisor = divisor * h;
        B = exact_div(R, divisor);
        g = lc_in(A, v);
        if (d == 1)
            h = g;
        else if (d > 1)
            h = exact_div(g.pow(static_cast<unsigned>(d)),
                          h.pow(static_cast<unsigned>(d - 1)));
    }
    return (gcd(ca, cb) * prim).primitive_part();
}

// ---- printing ------------------------------------------------------------

std::string MultiPoly::str() const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& t : terms_) {
        Rational c = t.coeff;
        bool neg = c < 0;
        if (first) {
            if (neg) os << "-";
        } else {
            os << (neg ? " - " : " + ");
        }
        if (neg) c = -c;
        bool has_vars = false;
        for (auto e : t.exps)
            if (e) has_vars = true;
        if (!has_vars || c != 1) {
            os << c.get_str();
            if (has_vars) os << "*";
        }
        bool first_var = true;
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            if (!t.exps[i]) continue;
            if (!first_var) os << "*";
            os << vars_[i];
            if (t.exps[i] > 1) os << "^" << t.exps[i];
            first_var = false;
        }
        first = false;
    }
    return os.str();
}

std::size_t MultiPoly::hash() const {
    std::size_t h = 1469598103934665603ull;
    auto mix = [&h](std::size_t x) {
        h ^= x;
        h *= 1099511628211ull;
    };
    for (auto& v : vars_) mix(std::hash<std::string>{}(v));
    for (auto& t : terms_) {
        for (auto e : t.exps) mix(e);
        mix(std::hash<std::string>{}(t.coeff.get_str()));
    }
    return h;
}

}  // namespace hyperaz
