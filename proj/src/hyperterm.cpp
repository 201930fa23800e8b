#include "hyperaz/hyperterm.hpp"

#include <algorithm>
#include <sstream>

namespace hyperaz {

MultiPoly Exponent::poly(const std::string& n_name) const {
    MultiPoly p(c0);
    if (c_eps != 0) p += MultiPoly::var("ep") * c_eps;
    if (c_n != 0) p += MultiPoly::var(n_name) * c_n;
    return p;
}

std::string Exponent::str() const { return poly("n").str(); }

std::string Bound::str() const {
    switch (kind) {
        case kNegInf: return "-inf";
        case kPosInf: return "inf";
        default: return rational_str(value);
    }
}

const IntVar* HyperTerm::find_var(const std::string& name) const {
    for (auto& v : intvars)
        if (v.name == name) return &v;
    return nullptr;
}

std::string HyperTerm::str() const {
    std::vector<std::string> parts;
    if (!P.is_one() || (a.is_zero() && powers.empty() && s.is_one() && t.is_one()))
        parts.push_back("(" + P.str() + ")");
    if (!a.is_zero()) {
        if (b.is_one())
            parts.push_back("exp(" + a.str() + ")");
        else
            parts.push_back("exp((" + a.str() + ")/(" + b.str() + "))");
    }
    for (auto& [S, alpha] : powers)
        parts.push_back("(" + S.str() + ")^(" + alpha.str() + ")");
    if (mode == Mode::kDiscrete && !(s.is_one() && t.is_one()))
        parts.push_back("((" + s.str() + ")/(" + t.str() + "))^" + param);
    std::ostringstream os;
    for (std::size_t i = 0; i < parts.size(); ++i)
        os << (i ? " * " : "") << parts[i];
    return os.str();
}

HyperTerm validate(HyperTerm term) {
    if (term.param.empty() || term.param == "ep")
        raise(ErrorCode::DegenerateTerm, "invalid parameter name");
    if (term.intvars.empty())
        raise(ErrorCode::NoIntegrationVariables, "no integration variables");
    for (std::size_t i = 0; i < term.intvars.size(); ++i) {
        const auto& v = term.intvars[i];
        if (v.name == term.param || v.name == "ep")
            raise(ErrorCode::DegenerateTerm,
                  "integration variable clashes with reserved name " + v.name);
        for (std::size_t j = i + 1; j < term.intvars.size(); ++j)
            if (term.intvars[j].name == v.name)
                raise(ErrorCode::DegenerateTerm,
                      "duplicate integration variable " + v.name);
        if (v.lower.is_finite() && v.upper.is_finite() &&
            v.lower.value >= v.upper.value)
            raise(ErrorCode::DegenerateTerm, "empty integration range for " + v.name);
    }
    if (term.b.is_zero())
        raise(ErrorCode::DegenerateTerm, "zero denominator in exponential part");
    if (term.t.is_zero())
        raise(ErrorCode::DegenerateTerm, "zero denominator in (s/t)^n factor");
    if (term.s.is_zero())
        raise(ErrorCode::DegenerateTerm, "zero base in (s/t)^n factor");

    // reduce the exponential argument
    if (term.a.is_zero()) {
        term.b = MultiPoly(Rational(1));
    } else {
        RatFunc e(term.a, term.b);
        term.a = e.num();
        term.b = e.den();
    }

    // fold integer n-multiples of power exponents into s/t, merge duplicates
    std::vector<std::pair<MultiPoly, Exponent>> powers;
    for (auto& [S0, alpha0] : term.powers) {
        MultiPoly S = S0;
        Exponent alpha = alpha0;
        if (S.is_zero())
            raise(ErrorCode::DegenerateTerm, "zero base in power factor");
        if (alpha.depends_on_n()) {
            if (term.mode == Mode::kContinuous)
                raise(ErrorCode::DegenerateTerm,
                      "n-dependent exponent in continuous mode");
            if (alpha.c_n.get_den() != 1)
                raise(ErrorCode::DegenerateTerm,
                      "non-integer multiple of n in exponent");
            long k = static_cast<long>(alpha.c_n.get_num().get_si());
            if (k > 0)
                term.s *= S.pow(static_cast<unsigned>(k));
            else
                term.t *= S.pow(static_cast<unsigned>(-k));
            alpha.c_n = 0;
        }
        if (alpha.is_zero()) continue;
        if (S.is_constant()) {
            Rational v = S.constant_value();
            if (v == 1) continue;
            if (alpha.c_eps == 0 && alpha.c0.get_den() == 1) {
                long k = static_cast<long>(alpha.c0.get_num().get_si());
                Rational f = 1;
                for (long j = 0; j < std::abs(k); ++j) f *= v;
                if (k < 0) f = 1 / f;
                term.P *= MultiPoly(f);
                continue;
            }
        }
        bool merged = false;
        for (auto& [T, beta] : powers)
            if (T == S) {
                beta = beta + alpha;
                merged = true;
                break;
            }
        if (!merged) powers.emplace_back(std::move(S), alpha);
    }
    // cancel the numerator against negative powers: for c0 <= -1 and
    // g = gcd(P, S) nonconstant, P * S^alpha = (P/g) * g^(alpha+1) * (S/g)^alpha.
    // Boundary evaluation and certificate denominators produce such pairs, and
    // leaving them in place manufactures spurious poles that poison every
    // later ansatz.  deg(P) drops each round, so the loop terminates.
    for (bool changed = true; changed;) {
        changed = false;
        std::vector<std::pair<MultiPoly, Exponent>> next;
        for (auto& [S, alpha] : powers) {
            if (changed || S.is_constant() || alpha.c_n != 0 ||
                alpha.c0 > -1) {
                next.emplace_back(std::move(S), alpha);
                continue;
            }
            MultiPoly g = MultiPoly::gcd(term.P, S);
            if (g.is_constant()) {
                next.emplace_back(std::move(S), alpha);
                continue;
            }
            changed = true;
            term.P = MultiPoly::exact_div(term.P, g);
            MultiPoly rem = MultiPoly::exact_div(S, g);
            Exponent up = alpha;
            up.c0 += 1;
            if (!up.is_zero()) next.emplace_back(std::move(g), up);
            if (rem.is_constant()) {
                if (alpha.c_eps == 0 && alpha.c0.get_den() == 1) {
                    Rational v = rem.constant_value(), f = 1;
                    long k = static_cast<long>(alpha.c0.get_num().get_si());
                    for (long j = 0; j < -k; ++j) f *= v;
                    term.P *= MultiPoly(Rational(1) / f);
                } else if (rem.constant_value() != 1) {
                    next.emplace_back(std::move(rem), alpha);
                }
            } else {
                next.emplace_back(std::move(rem), alpha);
            }
        }
        powers = std::move(next);
        if (changed) {
            // re-merge duplicates introduced by the split
            std::vector<std::pair<MultiPoly, Exponent>> merged;
            for (auto& [S, alpha] : powers) {
                bool hit = false;
                for (auto& [T, beta] : merged)
                    if (T == S) {
                        beta = beta + alpha;
                        hit = true;
                        break;
                    }
                if (!hit) merged.emplace_back(std::move(S), alpha);
            }
            powers = std::move(merged);
        }
    }
    powers.erase(std::remove_if(powers.begin(), powers.end(),
                                [](auto& p) { return p.second.is_zero(); }),
                 powers.end());
    std::sort(powers.begin(), powers.end(),
              [](auto& x, auto& y) { return x.first.str() < y.first.str(); });
    term.powers = std::move(powers);

    if (term.mode == Mode::kContinuous) {
        if (!term.s.is_one() || !term.t.is_one())
            raise(ErrorCode::DegenerateTerm, "(s/t)^n factor in continuous mode");
    } else {
        RatFunc st(term.s, term.t);
        term.s = st.num();
        term.t = st.den();
        // factors mixing the discrete parameter with integration variables
        // break the shift structure; parameter-only factors are legal
        // prefactors (they arise as boundary values) but are rejected later
        // by the telescoping machinery, see shift_compatible()
        auto touches_intvar = [&](const MultiPoly& p) {
            for (auto& v : term.intvars)
                if (p.depends_on(v.name)) return true;
            return false;
        };
        for (const MultiPoly* p : {&term.a, &term.b, &term.s, &term.t})
            if (p->depends_on(term.param) && touches_intvar(*p))
                raise(ErrorCode::DegenerateTerm,
                      "exponential or power base mixes the discrete parameter "
                      "with integration variables");
        for (auto& [S, alpha] : term.powers)
            if (S.depends_on(term.param) && touches_intvar(S))
                raise(ErrorCode::DegenerateTerm,
                      "power base mixes the discrete parameter with "
                      "integration variables");
    }
    return term;
}

bool shift_compatible(const HyperTerm& term) {
    if (term.mode == Mode::kContinuous) return true;
    for (const MultiPoly* p : {&term.a, &term.b, &term.s, &term.t})
        if (p->depends_on(term.param)) return false;
    for (auto& [S, alpha] : term.powers)
        if (S.depends_on(term.param)) return false;
    return true;
}

LogDeriv log_derivative(const HyperTerm& term, long L, const std::string& v) {
    if (!term.find_var(v))
        raise(ErrorCode::UnknownVariable, "not an integration variable: " + v);

    // assemble over an explicit common denominator; a full polynomial gcd on
    // the combined fraction is much more expensive than trial division by the
    // known denominator factors afterwards
    std::vector<std::pair<MultiPoly, MultiPoly>> pieces;  // (numerator, denominator)
    if (term.mode == Mode::kDiscrete) {
        if (!term.a.is_zero() &&
            (term.a.depends_on(v) || term.b.depends_on(v)))
            pieces.emplace_back(
                term.a.derivative(v) * term.b - term.a * term.b.derivative(v),
                term.b * term.b);
        for (auto& [S, alpha] : term.powers)
            if (S.depends_on(v))
                pieces.emplace_back(alpha.poly(term.param) * S.derivative(v), S);
        MultiPoly n = MultiPoly::var(term.param);
        if (term.s.depends_on(v))
            pieces.emplace_back(n * term.s.derivative(v), term.s);
        if (term.t.depends_on(v))
            pieces.emplace_back(-(n + MultiPoly(L)) * term.t.derivative(v),
                                term.t);
    } else {
        // d(a/b) - 2L b'/b over the common denominator b^2
        if (term.a.depends_on(v) || term.b.depends_on(v)) {
            MultiPoly db = term.b.derivative(v);
            MultiPoly numab = term.a.derivative(v) * term.b -
                              term.a * db - MultiPoly(2 * L) * db * term.b;
            if (!numab.is_zero())
                pieces.emplace_back(std::move(numab), term.b * term.b);
        }
        for (auto& [S, alpha] : term.powers)
            if (S.depends_on(v))
                pieces.emplace_back(
                    (alpha.poly(term.param) - MultiPoly(L)) * S.derivative(v),
                    S);
    }
    pieces.erase(std::remove_if(pieces.begin(), pieces.end(),
                                [](auto& p) { return p.first.is_zero(); }),
                 pieces.end());
    if (pieces.empty()) return {MultiPoly(), MultiPoly(Rational(1))};

    MultiPoly den{Rational(1)};
    for (auto& p : pieces) den *= p.second;
    MultiPoly num;
    for (std::size_t j = 0; j < pieces.size(); ++j) {
        MultiPoly part = pieces[j].first;
        for (std::size_t k = 0; k < pieces.size(); ++k)
            if (k != j) part *= pieces[k].second;
        num += part;
    }

    // strip shared base factors by trial division
    std::vector<MultiPoly> bases{term.b};
    for (auto& [S, alpha] : term.powers) bases.push_back(S);
    bases.push_back(term.s);
    bases.push_back(term.t);
    for (auto& f : bases) {
        if (f.is_constant()) continue;
        MultiPoly qn, qd;
        while (MultiPoly::try_div(num, f, &qn) &&
               MultiPoly::try_div(den, f, &qd)) {
            num = qn;
            den = qd;
        }
    }
    RatFunc ld(num, den);
    return {ld.num(), ld.den()};
}

MultiPoly hbar_parts(const HyperTerm& term, long L, long i) {
    if (i < 0 || i > L)
        raise(ErrorCode::IndexError, "hbar part index out of range");
    if (term.mode == Mode::kDiscrete)
        return term.P.shifted(term.param, i) *
               term.s.pow(static_cast<unsigned>(i)) *
               term.t.pow(static_cast<unsigned>(L - i));

    // continuous: D_param^i F = N_i / (b^{2i} PS^i) * H with H = e^{a/b}
    // prod S^alpha and PS = prod S.  A polynomial recursion avoids rational
    // arithmetic entirely:
    //   N_{k+1} = b*(D(N_k)*b*PS - N_k*(2k*D(b)*PS + k*b*PSd))
    //             + N_k*((D(a)*b - a*D(b))*PS + b^2*AS)
    // where PSd = D(PS) and AS = sum alpha_p D(S_p) prod_{q!=p} S_q; the RHS
    // part is then c_i = N_i * b^{2(L-i)} * PS^{L-i}.
    const std::string& x = term.param;
    MultiPoly PS{Rational(1)};
    for (auto& [S, alpha] : term.powers) PS *= S;
    MultiPoly PSd, AS;
    for (std::size_t p = 0; p < term.powers.size(); ++p) {
        MultiPoly dS = term.powers[p].first.derivative(x);
        if (dS.is_zero()) continue;
        MultiPoly rest{Rational(1)};
        for (std::size_t q = 0; q < term.powers.size(); ++q)
            if (q != p) rest *= term.powers[q].first;
        PSd += dS * rest;
        AS += term.powers[p].second.poly(x) * dS * rest;
    }
    MultiPoly db = term.b.derivative(x);
    MultiPoly abterm =
        (term.a.derivative(x) * term.b - term.a * db) * PS +
        term.b * term.b * AS;
    MultiPoly N = term.P;
    for (long k = 0; k < i; ++k) {
        MultiPoly corr =
            MultiPoly(2 * k) * db * PS + MultiPoly(k) * term.b * PSd;
        N = term.b * (N.derivative(x) * term.b * PS - N * corr) + N * abterm;
    }
    return N * term.b.pow(static_cast<unsigned>(2 * (L - i))) *
           PS.pow(static_cast<unsigned>(L - i));
}

RatFunc integrand_logderiv(const HyperTerm& term, const std::string& v) {
    if (term.P.is_zero())
        raise(ErrorCode::DegenerateTerm, "zero integrand");
    RatFunc ld;
    if (term.P.depends_on(v)) ld += RatFunc(term.P.derivative(v), term.P);
    if (!term.a.is_zero()) ld += RatFunc(term.a, term.b).derivative(v);
    for (auto& [S, alpha] : term.powers)
        if (S.depends_on(v))
            ld += RatFunc(alpha.poly(term.param)) * RatFunc(S.derivative(v), S);
    if (term.mode == Mode::kDiscrete) {
        MultiPoly n = MultiPoly::var(term.param);
        if (term.s.depends_on(v))
            ld += RatFunc(n) * RatFunc(term.s.derivative(v), term.s);
        if (term.t.depends_on(v))
            ld -= RatFunc(n) * RatFunc(term.t.derivative(v), term.t);
    }
    return ld;
}

}  // namespace hyperaz
