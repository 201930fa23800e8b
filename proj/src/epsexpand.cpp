#include "hyperaz/epsexpand.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <sstream>
#include <utility>

namespace hyperaz {

// ---------------------------------------------------------------------------
// SeriesInX
// ---------------------------------------------------------------------------

bool SeriesInX::is_zero() const {
    for (auto& c : coeffs)
        if (c != 0) return false;
    return true;
}

Rational SeriesInX::at(long k) const {
    if (k < start) return 0;
    long i = k - start;
    if (i >= static_cast<long>(coeffs.size()))
        raise(ErrorCode::IndexError, "series coefficient beyond the window");
    return coeffs[static_cast<std::size_t>(i)];
}

SeriesInX SeriesInX::normalized() const {
    SeriesInX r = *this;
    std::size_t lead = 0;
    while (lead < r.coeffs.size() && r.coeffs[lead] == 0) ++lead;
    if (lead == r.coeffs.size()) {
        r.start = 0;
        return r;
    }
    r.coeffs.erase(r.coeffs.begin(),
                   r.coeffs.begin() + static_cast<std::ptrdiff_t>(lead));
    r.start += static_cast<long>(lead);
    return r;
}

std::string SeriesInX::str(const std::string& var) const {
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        if (coeffs[i] == 0) continue;
        Rational c = coeffs[i];
        if (first) {
            if (c < 0) os << "-";
        } else {
            os << (c < 0 ? " - " : " + ");
        }
        first = false;
        Rational a = abs(c);
        long k = start + static_cast<long>(i);
        if (a != 1 || k == 0) os << rational_str(a);
        if (k != 0) {
            if (a != 1) os << "*";
            os << var;
            if (k != 1) os << "^" << k;
        }
    }
    if (first) os << "0";
    os << " + O(" << var << "^" << start + static_cast<long>(coeffs.size())
       << ")";
    return os.str();
}

// ---------------------------------------------------------------------------
// internal windowed power series in one variable
// ---------------------------------------------------------------------------

namespace {

constexpr long kInf = std::numeric_limits<long>::max() / 4;

// f = sum c[i] x^(lo+i) + O(x^(lo+size)); no terms below x^lo.  `exact`
// means there is nothing above the stored coefficients either.
struct S {
    long lo = 0;
    std::vector<Rational> c;
    bool exact = true;  // default: exact zero

    long kend() const {
        return exact ? kInf : lo + static_cast<long>(c.size()) - 1;
    }
    bool known_zero() const {
        for (auto& x : c)
            if (x != 0) return false;
        return true;
    }
};

S snorm(S a) {
    std::size_t i = 0;
    while (i < a.c.size() && a.c[i] == 0) ++i;
    a.c.erase(a.c.begin(), a.c.begin() + static_cast<std::ptrdiff_t>(i));
    a.lo += static_cast<long>(i);
    if (a.exact)
        while (!a.c.empty() && a.c.back() == 0) a.c.pop_back();
    if (a.c.empty() && a.exact) a.lo = 0;
    return a;
}

Rational s_at(const S& a, long k) {
    long i = k - a.lo;
    if (i < 0 || i >= static_cast<long>(a.c.size())) return 0;
    return a.c[static_cast<std::size_t>(i)];
}

bool s_is_exact_zero(const S& a) { return a.exact && a.known_zero(); }

S s_add(const S& a, const S& b) {
    if (s_is_exact_zero(a)) return b;
    if (s_is_exact_zero(b)) return a;
    S r;
    r.exact = a.exact && b.exact;
    r.lo = std::min(a.lo, b.lo);
    long ke = std::min(a.kend(), b.kend());
    if (ke >= kInf)
        ke = std::max(a.lo + static_cast<long>(a.c.size()),
                      b.lo + static_cast<long>(b.c.size())) -
             1;
    if (ke < r.lo) return S{r.lo, {}, false};
    r.c.resize(static_cast<std::size_t>(ke - r.lo + 1));
    for (long k = r.lo; k <= ke; ++k)
        r.c[static_cast<std::size_t>(k - r.lo)] = s_at(a, k) + s_at(b, k);
    return snorm(r);
}

S s_neg(S a) {
    for (auto& x : a.c) x = -x;
    return a;
}

S s_sub(const S& a, const S& b) { return s_add(a, s_neg(b)); }

S s_mul(const S& a, const S& b) {
    if (s_is_exact_zero(a) || s_is_exact_zero(b)) return S{};
    S r;
    r.exact = a.exact && b.exact;
    r.lo = a.lo + b.lo;
    long ke;
    if (r.exact)
        ke = a.lo + static_cast<long>(a.c.size()) + b.lo +
             static_cast<long>(b.c.size()) - 2;
    else
        ke = std::min(a.kend() + b.lo, b.kend() + a.lo);
    if (ke < r.lo) return S{r.lo, {}, false};
    r.c.assign(static_cast<std::size_t>(ke - r.lo + 1), Rational(0));
    for (std::size_t i = 0; i < a.c.size(); ++i) {
        if (a.c[i] == 0) continue;
        for (std::size_t j = 0; j < b.c.size(); ++j) {
            std::size_t k = i + j;
            if (k >= r.c.size()) break;
            r.c[k] += a.c[i] * b.c[j];
        }
    }
    return snorm(r);
}

S s_scale(S a, const Rational& c) {
    if (c == 0) return S{};
    for (auto& x : a.c) x *= c;
    return a;
}

S s_const(const Rational& c) {
    if (c == 0) return S{};
    return S{0, {c}, true};
}

S s_dx(const S& a) {
    S r;
    r.exact = a.exact;
    r.lo = a.lo - 1;
    r.c.resize(a.c.size());
    for (std::size_t i = 0; i < a.c.size(); ++i)
        r.c[i] = a.c[i] * Rational(a.lo + static_cast<long>(i));
    return snorm(r);
}

S s_cap(S a, long ke) {
    if (a.kend() <= ke) return a;
    a.exact = false;
    a.c.resize(static_cast<std::size_t>(std::max(0L, ke - a.lo + 1)));
    return a;
}

// 1/a to absolute order <= ke (and no further than a's relative precision)
S s_inverse(const S& a, long ke) {
    S an = snorm(a);
    if (an.c.empty())
        raise(ErrorCode::ExpansionUnsupported, "inverse of a zero series");
    long n = ke + an.lo + 1;  // result orders -an.lo .. ke
    if (!an.exact) n = std::min(n, static_cast<long>(an.c.size()));
    if (n <= 0) return S{-an.lo, {}, false};
    S r;
    r.exact = false;
    r.lo = -an.lo;
    r.c.resize(static_cast<std::size_t>(n));
    r.c[0] = Rational(1) / an.c[0];
    for (long k = 1; k < n; ++k) {
        Rational acc = 0;
        for (long i = 1; i <= k && i < static_cast<long>(an.c.size()); ++i)
            acc += an.c[static_cast<std::size_t>(i)] *
                   r.c[static_cast<std::size_t>(k - i)];
        r.c[static_cast<std::size_t>(k)] = -acc / an.c[0];
    }
    return r;
}

// ---------------------------------------------------------------------------
// Laurent-in-ep series whose coefficients are S
// ---------------------------------------------------------------------------

struct EXS {
    long lo = 0;
    std::vector<S> comp;  // ep^(lo+i); nothing below ep^lo
    bool exact = true;    // default: exact zero

    long kend() const {
        return exact ? kInf : lo + static_cast<long>(comp.size()) - 1;
    }
};

EXS enorm(EXS a) {
    std::size_t i = 0;
    while (i < a.comp.size() && s_is_exact_zero(a.comp[i])) ++i;
    a.comp.erase(a.comp.begin(), a.comp.begin() + static_cast<std::ptrdiff_t>(i));
    a.lo += static_cast<long>(i);
    if (a.exact)
        while (!a.comp.empty() && s_is_exact_zero(a.comp.back()))
            a.comp.pop_back();
    if (a.comp.empty() && a.exact) a.lo = 0;
    return a;
}

S e_at(const EXS& a, long j) {
    long i = j - a.lo;
    if (i < 0 || i >= static_cast<long>(a.comp.size())) return S{};
    return a.comp[static_cast<std::size_t>(i)];
}

bool e_is_exact_zero(const EXS& a) {
    if (!a.exact) return false;
    for (auto& s : a.comp)
        if (!s_is_exact_zero(s)) return false;
    return true;
}

bool e_known_zero(const EXS& a) {
    for (auto& s : a.comp)
        if (!s.known_zero()) return false;
    return true;
}

EXS e_add(const EXS& a, const EXS& b) {
    if (e_is_exact_zero(a)) return b;
    if (e_is_exact_zero(b)) return a;
    EXS r;
    r.exact = a.exact && b.exact;
    r.lo = std::min(a.lo, b.lo);
    long ke = std::min(a.kend(), b.kend());
    if (ke >= kInf)
        ke = std::max(a.lo + static_cast<long>(a.comp.size()),
                      b.lo + static_cast<long>(b.comp.size())) -
             1;
    if (ke < r.lo) return EXS{r.lo, {}, false};
    r.comp.resize(static_cast<std::size_t>(ke - r.lo + 1));
    for (long j = r.lo; j <= ke; ++j)
        r.comp[static_cast<std::size_t>(j - r.lo)] =
            s_add(e_at(a, j), e_at(b, j));
    return enorm(r);
}

EXS e_neg(EXS a) {
    for (auto& s : a.comp) s = s_neg(std::move(s));
    return a;
}

EXS e_sub(const EXS& a, const EXS& b) { return e_add(a, e_neg(b)); }

EXS e_mul(const EXS& a, const EXS& b) {
    if (e_is_exact_zero(a) || e_is_exact_zero(b)) return EXS{};
    EXS r;
    r.exact = a.exact && b.exact;
    r.lo = a.lo + b.lo;
    long ke;
    if (r.exact)
        ke = a.lo + static_cast<long>(a.comp.size()) + b.lo +
             static_cast<long>(b.comp.size()) - 2;
    else
        ke = std::min(a.kend() + b.lo, b.kend() + a.lo);
    if (ke < r.lo) return EXS{r.lo, {}, false};
    r.comp.resize(static_cast<std::size_t>(ke - r.lo + 1));
    for (std::size_t i = 0; i < a.comp.size(); ++i)
        for (std::size_t j = 0; j < b.comp.size(); ++j) {
            std::size_t k = i + j;
            if (k >= r.comp.size()) break;
            r.comp[k] = s_add(r.comp[k], s_mul(a.comp[i], b.comp[j]));
        }
    return enorm(r);
}

EXS e_scale(EXS a, const Rational& c) {
    if (c == 0) return EXS{};
    for (auto& s : a.comp) s = s_scale(std::move(s), c);
    return a;
}

EXS e_from_s(S s) {
    EXS r;
    r.comp.push_back(std::move(s));
    return enorm(r);
}

// truncation context: ep orders above ehi and x orders above xcap are never
// needed downstream
struct Ctx {
    long ehi = 0;
    long xcap = 0;
};

EXS e_cap(EXS a, const Ctx& ctx) {
    if (a.kend() > ctx.ehi) {
        a.exact = false;
        a.comp.resize(
            static_cast<std::size_t>(std::max(0L, ctx.ehi - a.lo + 1)));
    }
    for (auto& s : a.comp) s = s_cap(std::move(s), ctx.xcap);
    return a;
}

// polynomial in {param, ep} -> exact EXS; any other variable is an error
EXS e_from_poly(const MultiPoly& p, const std::string& param) {
    for (auto& v : p.vars())
        if (v != param && v != "ep")
            raise(ErrorCode::ExpansionUnsupported,
                  "expression contains the unexpanded variable " + v);
    EXS r;
    auto eps_coeffs = p.coeffs_in("ep");
    for (auto& q : eps_coeffs) {
        S s;
        if (!q.is_zero()) {
            auto xs = q.coeffs_in(param);
            s.exact = true;
            s.lo = 0;
            for (auto& c : xs) {
                if (!c.is_constant())
                    raise(ErrorCode::Internal, "non-constant series coefficient");
                s.c.push_back(c.is_zero() ? Rational(0) : c.constant_value());
            }
            s = snorm(s);
        }
        r.comp.push_back(std::move(s));
    }
    r.exact = true;
    return enorm(r);
}

EXS e_inverse(const EXS& a, const Ctx& ctx) {
    EXS an = enorm(e_cap(a, Ctx{ctx.ehi + std::max(0L, -a.lo) + 1, ctx.xcap}));
    if (an.comp.empty())
        raise(ErrorCode::ExpansionUnsupported, "inverse of a zero expansion");
    long n = ctx.ehi + an.lo + 1;  // result orders -an.lo .. ehi
    if (!an.exact) n = std::min(n, static_cast<long>(an.comp.size()));
    EXS r;
    r.exact = false;
    r.lo = -an.lo;
    if (n <= 0) return r;
    S a0inv = s_inverse(an.comp[0], ctx.xcap);
    r.comp.resize(static_cast<std::size_t>(n));
    r.comp[0] = a0inv;
    for (long k = 1; k < n; ++k) {
        S acc{};
        for (long i = 1; i <= k && i < static_cast<long>(an.comp.size()); ++i)
            acc = s_add(acc, s_mul(an.comp[static_cast<std::size_t>(i)],
                                   r.comp[static_cast<std::size_t>(k - i)]));
        r.comp[static_cast<std::size_t>(k)] =
            s_cap(s_neg(s_mul(a0inv, acc)), ctx.xcap);
    }
    return r;
}

// exp of an expansion with no constant term: requires lo >= 0 and, in the
// ep^0 component, x-valuation >= 1
EXS e_exp(const EXS& z0, const Ctx& ctx) {
    EXS z = enorm(e_cap(z0, ctx));
    if (e_is_exact_zero(z)) return e_from_s(s_const(1));
    if (z.lo < 0)
        raise(ErrorCode::ExpansionUnsupported,
              "exponential of a pole in ep");
    if (z.lo == 0) {
        S c0 = snorm(z.comp[0]);
        if (!c0.c.empty() && c0.lo <= 0)
            raise(ErrorCode::ExpansionUnsupported,
                  "exponential with nonvanishing constant part");
    }
    EXS res = e_from_s(s_const(1));
    EXS term = res;
    for (long k = 1; k <= 4096; ++k) {
        term = e_cap(e_mul(term, z), ctx);
        term = e_scale(std::move(term), Rational(1, k));
        if (e_known_zero(term)) return res;
        res = e_add(res, term);
    }
    raise(ErrorCode::Internal, "exponential series did not terminate");
}

// log(1 + u) with u as in e_exp
EXS e_log1p(const EXS& u0, const Ctx& ctx) {
    EXS u = enorm(e_cap(u0, ctx));
    if (e_is_exact_zero(u)) return EXS{};
    if (u.lo < 0 ||
        (u.lo == 0 && !snorm(u.comp[0]).c.empty() && snorm(u.comp[0]).lo <= 0))
        raise(ErrorCode::ExpansionUnsupported,
              "logarithm away from the base point");
    EXS res{};
    EXS pw = e_from_s(s_const(1));
    for (long k = 1; k <= 4096; ++k) {
        pw = e_cap(e_mul(pw, u), ctx);
        if (e_known_zero(pw)) return res;
        Rational c = Rational((k % 2) ? 1 : -1, k);
        res = e_add(res, e_scale(pw, c));
    }
    raise(ErrorCode::Internal, "logarithm series did not terminate");
}

EXS e_ipow(const EXS& a, long k, const Ctx& ctx) {
    if (k < 0) return e_ipow(e_inverse(a, ctx), -k, ctx);
    EXS r = e_from_s(s_const(1));
    EXS base = a;
    while (k > 0) {
        if (k & 1) r = e_cap(e_mul(r, base), ctx);
        k >>= 1;
        if (k) base = e_cap(e_mul(base, base), ctx);
    }
    return r;
}

// exact rational q-th root, if it exists
std::optional<Rational> exact_root(const Rational& v, unsigned long q) {
    if (q == 1) return v;
    if (v == 0) return Rational(0);
    bool neg = v < 0;
    if (neg && q % 2 == 0) return std::nullopt;
    mpz_class num = abs(v.get_num()), den = v.get_den();
    mpz_class rn, rd;
    if (!mpz_root(rn.get_mpz_t(), num.get_mpz_t(), q)) return std::nullopt;
    if (!mpz_root(rd.get_mpz_t(), den.get_mpz_t(), q)) return std::nullopt;
    Rational r(rn, rd);
    r.canonicalize();
    return neg ? Rational(-r) : r;
}

std::optional<Rational> exact_pow(const Rational& v, const Rational& e) {
    long num = static_cast<long>(e.get_num().get_si());
    unsigned long den = e.get_den().get_ui();
    auto root = exact_root(v, den);
    if (!root) return std::nullopt;
    if (*root == 0 && num < 0) return std::nullopt;
    Rational r = 1;
    for (long i = 0; i < std::abs(num); ++i) r *= *root;
    if (num < 0) r = 1 / r;
    return r;
}

bool is_integer(const Rational& v) { return v.get_den() == 1; }

// base^(c0 + c_eps*ep) for a base given as an exact EXS
EXS e_pow_exponent(const EXS& base, const Exponent& alpha,
                   const std::string& what, const Ctx& ctx) {
    EXS result = e_from_s(s_const(1));
    Rational c0 = alpha.c0;
    if (is_integer(c0) && alpha.c_eps == 0)
        return e_ipow(base, static_cast<long>(c0.get_num().get_si()), ctx);

    // factor out the leading monomial x^xv * ep^ev * s0
    EXS bn = enorm(base);
    if (bn.comp.empty())
        raise(ErrorCode::ExpansionUnsupported, "power of a zero base");
    long ev = bn.lo;
    S lead = snorm(bn.comp[0]);
    if (lead.c.empty())
        raise(ErrorCode::ExpansionUnsupported, "power of a degenerate base");
    long xv = lead.lo;
    Rational s0 = lead.c[0];
    if (ev != 0 || xv != 0) {
        // non-unit leading monomial under a fractional or ep exponent
        Rational xe = c0 * xv, ee = c0 * ev;
        if (alpha.c_eps != 0 || !is_integer(xe) || !is_integer(ee))
            raise(ErrorCode::ExpansionUnsupported,
                  "non-integer or ep-dependent power of a vanishing " + what);
        EXS mono;
        mono.exact = true;
        mono.lo = static_cast<long>(ee.get_num().get_si());
        mono.comp.push_back(
            S{static_cast<long>(xe.get_num().get_si()), {Rational(1)}, true});
        result = e_mul(result, mono);
    }
    auto f = exact_pow(s0, c0);
    if (!f)
        raise(ErrorCode::ExpansionUnsupported,
              "irrational constant from " + what + "^(" + rational_str(c0) + ")");
    if (alpha.c_eps != 0 && s0 != 1)
        raise(ErrorCode::ExpansionUnsupported,
              "ep-dependent power of " + what + " with base value != 1");
    result = e_scale(std::move(result), *f);
    // (1 + u)^alpha with u = base/(s0 x^xv ep^ev) - 1
    EXS unit = bn;
    unit.lo -= ev;
    for (auto& s : unit.comp) s.lo -= xv;
    unit = e_scale(std::move(unit), Rational(1) / s0);
    EXS u = e_sub(unit, e_from_s(s_const(1)));
    if (e_is_exact_zero(u)) return result;
    EXS ae;  // alpha as an expansion
    ae = e_from_s(s_const(c0));
    if (alpha.c_eps != 0) {
        EXS eps;
        eps.exact = true;
        eps.lo = 1;
        eps.comp.push_back(s_const(alpha.c_eps));
        ae = e_add(ae, eps);
    }
    return e_mul(result, e_exp(e_mul(ae, e_log1p(u, ctx)), ctx));
}

// ---------------------------------------------------------------------------
// closed-form (0-dimensional) expansion
// ---------------------------------------------------------------------------

// continuous leaf, or a discrete leaf with the parameter already substituted
EXS closed_form_exs(const HyperTerm& term, const std::string& param,
                    const Ctx& ctx) {
    EXS E = e_from_poly(term.P, param);
    if (!term.a.is_zero()) {
        EXS r = e_cap(e_mul(e_from_poly(term.a, param),
                            e_inverse(e_from_poly(term.b, param), ctx)),
                      ctx);
        E = e_mul(E, e_exp(r, ctx));
    }
    for (auto& [Sp, alpha] : term.powers)
        E = e_cap(
            e_mul(E, e_pow_exponent(e_from_poly(Sp, param), alpha,
                                    "(" + Sp.str() + ")", ctx)),
            ctx);
    return e_cap(E, ctx);
}

// discrete leaf value at param = n as a Laurent series in ep
EXS discrete_leaf_value(const HyperTerm& term, long n, const Ctx& ctx) {
    auto at_n = [&](const MultiPoly& p) {
        return p.substituted(term.param, Rational(n));
    };
    HyperTerm sub;
    sub.mode = Mode::kContinuous;  // no (s/t)^n handling in closed_form_exs
    sub.param = term.param;        // unused after substitution
    sub.P = at_n(term.P);
    sub.a = at_n(term.a);
    sub.b = at_n(term.b);
    if (sub.b.is_zero())
        raise(ErrorCode::ExpansionUnsupported,
              "exponential denominator vanishes at " + term.param + " = " +
                  std::to_string(n));
    for (auto& [Sp, alpha] : term.powers) sub.powers.emplace_back(at_n(Sp), alpha);
    EXS E = closed_form_exs(sub, term.param, ctx);
    if (!(term.s.is_one() && term.t.is_one())) {
        EXS sv = e_from_poly(at_n(term.s), term.param);
        EXS tv = e_from_poly(at_n(term.t), term.param);
        E = e_cap(e_mul(E, e_ipow(sv, n, ctx)), ctx);
        E = e_cap(e_mul(E, e_ipow(tv, -n, ctx)), ctx);
    }
    return E;
}

// ---------------------------------------------------------------------------
// indicial series solving
// ---------------------------------------------------------------------------

std::vector<Rational> poly_mul_linear(const std::vector<Rational>& p, long root) {
    // p(m) * (m - root)
    std::vector<Rational> r(p.size() + 1, Rational(0));
    for (std::size_t i = 0; i < p.size(); ++i) {
        r[i + 1] += p[i];
        r[i] -= p[i] * Rational(root);
    }
    return r;
}

Rational poly_eval(const std::vector<Rational>& p, long m) {
    Rational r = 0;
    for (std::size_t i = p.size(); i-- > 0;) r = r * Rational(m) + p[i];
    return r;
}

bool poly_is_zero(const std::vector<Rational>& p) {
    for (auto& c : p)
        if (c != 0) return false;
    return true;
}

// Core series solver over internal windows.  `coeffs` are free of ep.
S series_solve_core(const std::vector<MultiPoly>& coeffs,
                    const std::string& param, const S& rhs,
                    const SeriesInX& init, long M,
                    ErrorCode on_init_conflict) {
    // A_mu(m) = sum_k b_{k,k+mu} m(m-1)...(m-k+1), one polynomial in m per
    // column shift mu of the coefficient recurrence
    std::map<long, std::vector<Rational>> A;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        if (coeffs[k].is_zero()) continue;
        std::vector<Rational> fall{Rational(1)};  // m(m-1)...(m-k+1)
        for (std::size_t i = 0; i < k; ++i)
            fall = poly_mul_linear(fall, static_cast<long>(i));
        auto cs = coeffs[k].coeffs_in(param);
        for (std::size_t l = 0; l < cs.size(); ++l) {
            if (cs[l].is_zero()) continue;
            if (!cs[l].is_constant())
                raise(ErrorCode::Internal, "constraint coefficient not in " + param);
            Rational c = cs[l].constant_value();
            long mu = static_cast<long>(l) - static_cast<long>(k);
            auto& acc = A[mu];
            if (acc.size() < fall.size()) acc.resize(fall.size(), Rational(0));
            for (std::size_t i = 0; i < fall.size(); ++i) acc[i] += c * fall[i];
        }
    }
    for (auto it = A.begin(); it != A.end();)
        it = poly_is_zero(it->second) ? A.erase(it) : std::next(it);
    if (A.empty())
        raise(ErrorCode::RescaleRequired, "all constraint coefficients vanish");
    const long mu0 = A.begin()->first;
    const auto& indicial = A.begin()->second;

    bool rhs_zero = s_is_exact_zero(rhs) || rhs.known_zero();
    bool have_init = !init.coeffs.empty();
    long init_lo = have_init ? init.start : 0;
    long init_hi = have_init ? init.start + init.M() : init_lo - 1;
    long m_lo = 0;
    if (have_init) m_lo = std::min(m_lo, init_lo);
    if (!rhs_zero) m_lo = std::min(m_lo, snorm(rhs).lo - mu0);

    S out;
    out.exact = false;
    out.lo = m_lo;
    out.c.assign(static_cast<std::size_t>(M + 1), Rational(0));
    for (long idx = 0; idx <= M; ++idx) {
        long m = m_lo + idx;
        long p = m + mu0;
        if (!rhs_zero && !rhs.exact && p > rhs.kend())
            raise(ErrorCode::ExpansionUnsupported,
                  "right-hand side known to insufficient order");
        Rational r = s_at(rhs, p);
        for (auto it = std::next(A.begin()); it != A.end(); ++it) {
            long mp = p - it->first;
            if (mp < m_lo || mp >= m) continue;
            r -= poly_eval(it->second, mp) *
                 out.c[static_cast<std::size_t>(mp - m_lo)];
        }
        Rational a = poly_eval(indicial, m);
        bool prescribed = have_init && m >= init_lo && m <= init_hi;
        if (a != 0) {
            Rational v = r / a;
            if (prescribed && init.at(m) != v)
                raise(on_init_conflict,
                      "initial coefficient at order " + std::to_string(m) +
                          " conflicts with the equation");
            out.c[static_cast<std::size_t>(idx)] = v;
        } else {
            if (r != 0)
                raise(ErrorCode::SingularObstruction,
                      "inconsistent equation at the indicial root " +
                          std::to_string(m));
            if (prescribed)
                out.c[static_cast<std::size_t>(idx)] = init.at(m);
            else if (m >= init_lo)
                raise(ErrorCode::UnderdeterminedInit,
                      "free series coefficient at order " + std::to_string(m) +
                          " not covered by the initial data");
            // below the initial window: the coefficient is zero
        }
    }
    return out;
}

S public_to_s(const SeriesInX& s) {
    return S{s.start, s.coeffs, false};
}

SeriesInX s_to_public(const S& s, long M) {
    SeriesInX r;
    S n = snorm(s);
    r.start = n.c.empty() ? 0 : n.lo;
    long avail = n.exact ? kInf : static_cast<long>(n.c.size());
    long len = std::min(M + 1, std::max(avail, 0L));
    r.coeffs.resize(static_cast<std::size_t>(std::max(len, 0L)), Rational(0));
    for (long i = 0; i < len; ++i) r.coeffs[static_cast<std::size_t>(i)] = s_at(n, r.start + i);
    return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// public operations
// ---------------------------------------------------------------------------

EpsConstraint eps_constraints(const ParamODE& ode, long t,
                              const std::vector<SeriesInX>& solved_below,
                              long M) {
    if (ode.coeffs.size() != static_cast<std::size_t>(ode.order + 1))
        raise(ErrorCode::IndexError, "equation order does not match coefficients");
    if (ode.coeffs.back().is_zero())
        raise(ErrorCode::DegenerateTerm, "vanishing leading coefficient");
    EpsConstraint out;
    bool all_zero = true;
    for (auto& a : ode.coeffs) {
        out.coeffs.push_back(a.substituted("ep", Rational(0)));
        if (!out.coeffs.back().is_zero()) all_zero = false;
    }
    if (all_zero)
        raise(ErrorCode::RescaleRequired,
              "every coefficient vanishes at ep = 0; divide by the maximal "
              "power of ep first");
    long j = t + static_cast<long>(solved_below.size());
    S acc{};
    for (auto& [k, h] : ode.rhs)
        if (k == j) acc = public_to_s(h);
    for (std::size_t i = 0; i < solved_below.size(); ++i) {
        long oi = t + static_cast<long>(i);
        for (std::size_t k = 0; k < ode.coeffs.size(); ++k) {
            auto ec = ode.coeffs[k].coeffs_in("ep");
            long need = j - oi;
            if (need < 0 || need >= static_cast<long>(ec.size())) continue;
            if (ec[static_cast<std::size_t>(need)].is_zero()) continue;
            S term = public_to_s(solved_below[i]);
            for (std::size_t dk = 0; dk < k; ++dk) term = s_dx(term);
            S a = [&] {
                S p;
                auto xs = ec[static_cast<std::size_t>(need)].coeffs_in(ode.param);
                p.exact = true;
                for (auto& c : xs)
                    p.c.push_back(c.is_zero() ? Rational(0) : c.constant_value());
                return snorm(p);
            }();
            acc = s_sub(acc, s_mul(a, term));
        }
    }
    out.rhs = s_to_public(acc, M);
    return out;
}

SeriesInX series_solve(const std::vector<MultiPoly>& coeffs,
                       const std::string& param, const SeriesInX& rhs,
                       const SeriesInX& init, long M,
                       ErrorCode on_init_conflict) {
    for (auto& a : coeffs)
        if (a.depends_on("ep"))
            raise(ErrorCode::RescaleRequired,
                  "constraint coefficients must be free of ep");
    S r = rhs.is_zero() ? S{} : public_to_s(rhs);
    S sol = series_solve_core(coeffs, param, r, init, M, on_init_conflict);
    return s_to_public(sol, M).normalized();
}

// ---------------------------------------------------------------------------
// expand_integral
// ---------------------------------------------------------------------------

namespace {

long eps_valuation(const MultiPoly& p) {
    if (p.is_zero()) return kInf;
    auto ec = p.coeffs_in("ep");
    for (std::size_t i = 0; i < ec.size(); ++i)
        if (!ec[i].is_zero()) return static_cast<long>(i);
    return kInf;
}

MultiPoly eps_shift_down(const MultiPoly& p, long v) {
    if (v == 0 || p.is_zero()) return p;
    auto ec = p.coeffs_in("ep");
    if (v >= static_cast<long>(ec.size())) return MultiPoly();
    std::vector<MultiPoly> shifted(ec.begin() + v, ec.end());
    return MultiPoly::from_coeffs_in("ep", shifted);
}

// Solve sum_k a_k(ep,x) D^k I = h for the ep window [t, u], series windows
// to internal length Mi.  `init` may be empty (no prescriptions) or have one
// entry per ep order.
std::vector<S> solve_ode_orders(const std::vector<MultiPoly>& a_in,
                                const std::string& param, const EXS& h, long t,
                                long u, const std::vector<SeriesInX>& init,
                                long Mi, ErrorCode on_init_conflict) {
    long v = kInf;
    for (auto& a : a_in) v = std::min(v, eps_valuation(a));
    if (v >= kInf)
        raise(ErrorCode::DegenerateTerm, "zero equation");
    std::vector<MultiPoly> a;
    for (auto& p : a_in) a.push_back(eps_shift_down(p, v));
    std::vector<MultiPoly> a0;
    for (auto& p : a) a0.push_back(p.substituted("ep", Rational(0)));

    std::vector<S> solved;
    for (long j = t; j <= u; ++j) {
        // rhs at this order: [ep^(j+v)] h minus the lower-order feedback
        S r = e_at(h, j + v);
        if (!h.exact && j + v > h.kend())
            raise(ErrorCode::ExpansionUnsupported,
                  "right-hand side expansion known to insufficient ep order");
        for (std::size_t i = 0; i < solved.size(); ++i) {
            long oi = t + static_cast<long>(i);
            for (std::size_t k = 0; k < a.size(); ++k) {
                auto ec = a[k].coeffs_in("ep");
                long need = j - oi;
                if (need <= 0 || need >= static_cast<long>(ec.size())) continue;
                const MultiPoly& am = ec[static_cast<std::size_t>(need)];
                if (am.is_zero()) continue;
                S term = solved[i];
                for (std::size_t dk = 0; dk < k; ++dk) term = s_dx(term);
                S ap;
                ap.exact = true;
                for (auto& c : am.coeffs_in(param))
                    ap.c.push_back(c.is_zero() ? Rational(0)
                                               : c.constant_value());
                r = s_sub(r, s_mul(snorm(ap), term));
            }
        }
        SeriesInX ij;
        if (!init.empty()) {
            std::size_t idx = static_cast<std::size_t>(j - t);
            if (idx >= init.size())
                raise(ErrorCode::UnderdeterminedInit,
                      "initial data missing for ep order " + std::to_string(j));
            ij = init[idx];
        }
        solved.push_back(
            series_solve_core(a0, param, r, ij, Mi, on_init_conflict));
    }
    return solved;
}

EXS exs_from_orders(const std::vector<S>& comps, long t) {
    EXS r;
    r.exact = false;
    r.lo = t;
    r.comp = comps;
    return enorm(r);
}

// leaf expansion restricted to the window [t, u]; orders below t must vanish
EXS leaf_window(const HyperTerm& term, const std::string& param, long t,
                const Ctx& ctx) {
    EXS e = closed_form_exs(term, param, ctx);
    EXS en = enorm(e);
    if (!en.comp.empty() && en.lo < t)
        raise(ErrorCode::ExpansionUnsupported,
              "closed form has ep order " + std::to_string(en.lo) +
                  " below the requested window");
    return en;
}

std::vector<S> expand_node_continuous(const RecursionNode& node, long t, long u,
                                      long Mi,
                                      const std::vector<SeriesInX>& init,
                                      const Ctx& ctx,
                                      ErrorCode on_init_conflict) {
    const std::string& param = node.integral.param;
    if (node.base_value) {
        EXS e = leaf_window(node.integral, param, t, ctx);
        std::vector<S> out;
        for (long j = t; j <= u; ++j) {
            if (!e.exact && j > e.kend())
                raise(ErrorCode::ExpansionUnsupported,
                      "closed-form expansion known to insufficient ep order");
            out.push_back(e_at(e, j));
        }
        return out;
    }
    const Annihilator& ann = *node.annihilator;
    long v = kInf;
    for (auto& e : ann.e) v = std::min(v, eps_valuation(e));
    EXS h{};
    for (std::size_t i = 0; i < node.rhs.size(); ++i) {
        auto child = expand_node_continuous(node.children[i], t + v, u + v,
                                            Mi + ann.L + 2, {}, ctx,
                                            on_init_conflict);
        EXS ce = exs_from_orders(child, t + v);
        h = e_add(h, node.rhs[i].sign > 0 ? ce : e_neg(ce));
    }
    return solve_ode_orders(ann.e, param, h, t, u, init, Mi,
                            on_init_conflict);
}

// ---- discrete: Laurent value tables -----------------------------------

std::vector<EXS> expand_node_discrete(const RecursionNode& node, long t, long u,
                                      long N,
                                      const std::vector<SeriesInX>& init,
                                      const Ctx& ctx) {
    const std::string& param = node.integral.param;
    std::vector<EXS> vals(static_cast<std::size_t>(N));
    if (node.base_value) {
        for (long n = 0; n < N; ++n)
            vals[static_cast<std::size_t>(n)] =
                discrete_leaf_value(node.integral, n, ctx);
        return vals;
    }
    const Annihilator& ann = *node.annihilator;
    long d = ann.L;
    std::vector<std::vector<EXS>> children;
    for (std::size_t i = 0; i < node.rhs.size(); ++i)
        children.push_back(
            expand_node_discrete(node.children[i], t, u, N, {}, ctx));
    auto rhs_at = [&](long n) {
        EXS h{};
        for (std::size_t i = 0; i < children.size(); ++i) {
            const EXS& cv = children[i][static_cast<std::size_t>(n)];
            h = e_add(h, node.rhs[i].sign > 0 ? cv : e_neg(cv));
        }
        return h;
    };
    auto coeff_at = [&](std::size_t l, long n) {
        return e_from_poly(ann.e[l].substituted(param, Rational(n)), param);
    };
    if (d == 0) {
        for (long n = 0; n < N; ++n) {
            EXS e0 = coeff_at(0, n);
            if (e_is_exact_zero(e0))
                raise(ErrorCode::SingularObstruction,
                      "telescoper coefficient vanishes at " + param + " = " +
                          std::to_string(n));
            vals[static_cast<std::size_t>(n)] =
                e_cap(e_mul(rhs_at(n), e_inverse(e0, ctx)), ctx);
        }
    } else {
        // seed values from the caller, then unroll the recurrence
        if (static_cast<long>(init.size()) < u - t + 1 && !init.empty())
            raise(ErrorCode::UnderdeterminedInit,
                  "initial data does not cover the requested ep window");
        for (long n = 0; n < std::min(d, N); ++n) {
            EXS val{};
            if (init.empty())
                raise(ErrorCode::UnderdeterminedInit,
                      "recurrence of order " + std::to_string(d) +
                          " requires initial values");
            for (long j = t; j <= u; ++j) {
                const SeriesInX& row = init[static_cast<std::size_t>(j - t)];
                if (row.coeffs.empty()) continue;
                if (row.start != 0)
                    raise(ErrorCode::InconsistentInit,
                          "discrete initial values must start at " + param +
                              " = 0");
                if (n > row.M())
                    raise(ErrorCode::UnderdeterminedInit,
                          "initial values must cover " + param + " = 0.." +
                              std::to_string(d - 1));
                Rational c = row.at(n);
                if (c != 0) {
                    EXS mono;
                    mono.exact = true;
                    mono.lo = j;
                    mono.comp.push_back(s_const(c));
                    val = e_add(val, mono);
                }
            }
            vals[static_cast<std::size_t>(n)] = val;
        }
        for (long n = 0; n + d < N; ++n) {
            EXS acc = rhs_at(n);
            for (long l = 0; l < d; ++l)
                acc = e_sub(acc,
                            e_mul(coeff_at(static_cast<std::size_t>(l), n),
                                  vals[static_cast<std::size_t>(n + l)]));
            EXS ed = coeff_at(static_cast<std::size_t>(d), n);
            if (e_is_exact_zero(ed))
                raise(ErrorCode::SingularObstruction,
                      "leading recurrence coefficient vanishes at " + param +
                          " = " + std::to_string(n));
            vals[static_cast<std::size_t>(n + d)] =
                e_cap(e_mul(acc, e_inverse(ed, ctx)), ctx);
        }
    }
    return vals;
}

EpsExpansion finalize_continuous(const std::vector<S>& orders, long t, long M) {
    EpsExpansion out;
    out.mode = Mode::kContinuous;
    out.t = t;
    for (auto& s : orders) out.entries.push_back(s_to_public(s, M).normalized());
    return out;
}

EpsExpansion finalize_discrete(const std::vector<EXS>& vals, long t, long u) {
    EpsExpansion out;
    out.mode = Mode::kDiscrete;
    out.t = t;
    for (auto& v : vals) {
        EXS n = enorm(v);
        if (!n.comp.empty() && n.lo < t)
            raise(ErrorCode::ExpansionUnsupported,
                  "value has ep order " + std::to_string(n.lo) +
                      " below the requested window");
    }
    out.tables.assign(static_cast<std::size_t>(u - t + 1), {});
    for (long j = t; j <= u; ++j) {
        auto& row = out.tables[static_cast<std::size_t>(j - t)];
        for (auto& v : vals) {
            S s = e_at(v, j);
            row.push_back(s.c.empty() ? Rational(0) : s_at(s, 0));
        }
    }
    return out;
}

}  // namespace

EpsExpansion expand_closed_form(const HyperTerm& term, long t, long u, long M) {
    if (!term.intvars.empty())
        raise(ErrorCode::DegenerateTerm,
              "closed-form expansion requires a 0-dimensional term");
    if (u < t) raise(ErrorCode::IndexError, "empty ep window");
    Ctx ctx{u + 1, M + 8};
    if (term.mode == Mode::kContinuous) {
        EXS e = leaf_window(term, term.param, t, ctx);
        std::vector<S> orders;
        for (long j = t; j <= u; ++j) orders.push_back(e_at(e, j));
        return finalize_continuous(orders, t, M);
    }
    std::vector<EXS> vals;
    for (long n = 0; n < M + 1; ++n)
        vals.push_back(discrete_leaf_value(term, n, ctx));
    return finalize_discrete(vals, t, u);
}

EpsExpansion expand_integral(const HyperTerm& term, const ExpandOptions& opt,
                             const std::vector<SeriesInX>& init) {
    HyperTerm f = validate(term);
    if (opt.u < opt.t) raise(ErrorCode::IndexError, "empty ep window");
    const long span = opt.u - opt.t + 1;
    if (!init.empty() && static_cast<long>(init.size()) != span)
        raise(ErrorCode::InconsistentInit,
              "initial data must have one entry per ep order");

    if (f.mode == Mode::kContinuous) {
        long Mi = opt.M + 8;
        Ctx ctx{opt.u + 8, opt.M + 48};
        std::vector<S> orders;
        if (opt.strategy == ExpandStrategy::kDirect) {
            AnsatzConfig cfg = opt.ansatz;
            cfg.ansatz = Ansatz::kBoundaryVanishing;
            auto out = find_telescoper(f, cfg);
            if (!out.annihilator)
                raise(ErrorCode::NotFound,
                      "no homogeneous equation within the search bounds");
            auto bts = boundary_terms(f, *out.annihilator);
            EXS h{};
            long v = kInf;
            for (auto& e : out.annihilator->e)
                v = std::min(v, eps_valuation(e));
            for (auto& bt : bts) {
                if (!bt.term.intvars.empty())
                    raise(ErrorCode::ExpansionUnsupported,
                          "nonvanishing boundary term of positive dimension "
                          "in the direct strategy");
                EXS ce = leaf_window(bt.term, f.param, opt.t + v, ctx);
                h = e_add(h, bt.sign > 0 ? ce : e_neg(ce));
            }
            orders = solve_ode_orders(out.annihilator->e, f.param, h, opt.t,
                                      opt.u, init, Mi,
                                      ErrorCode::InconsistentInit);
        } else {
            auto tree = divide_and_conquer(f, opt.ansatz,
                                           static_cast<long>(f.dim()));
            orders = expand_node_continuous(tree, opt.t, opt.u, Mi, init, ctx,
                                            ErrorCode::InconsistentInit);
        }
        return finalize_continuous(orders, opt.t, opt.M);
    }

    // discrete: value tables
    Ctx ctx{opt.u + 2 * opt.table_length + 4, 4};
    std::vector<EXS> vals;
    if (opt.strategy == ExpandStrategy::kDirect) {
        AnsatzConfig cfg = opt.ansatz;
        cfg.ansatz = Ansatz::kBoundaryVanishing;
        auto out = find_telescoper(f, cfg);
        if (!out.annihilator)
            raise(ErrorCode::NotFound,
                  "no homogeneous recurrence within the search bounds");
        RecursionNode node;
        node.integral = f;
        node.annihilator = *out.annihilator;
        node.rhs = boundary_terms(f, *out.annihilator);
        for (auto& bt : node.rhs) {
            if (!bt.term.intvars.empty())
                raise(ErrorCode::ExpansionUnsupported,
                      "nonvanishing boundary term of positive dimension in "
                      "the direct strategy");
            RecursionNode leaf;
            leaf.integral = bt.term;
            leaf.base_value = bt.term.str();
            node.children.push_back(std::move(leaf));
        }
        vals = expand_node_discrete(node, opt.t, opt.u, opt.table_length, init,
                                    ctx);
    } else {
        auto tree =
            divide_and_conquer(f, opt.ansatz, static_cast<long>(f.dim()));
        vals = expand_node_discrete(tree, opt.t, opt.u, opt.table_length, init,
                                    ctx);
    }
    return finalize_discrete(vals, opt.t, opt.u);
}

}  // namespace hyperaz
