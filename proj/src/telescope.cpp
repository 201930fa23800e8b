#include "hyperaz/telescope.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>

#include "hyperaz/boundary.hpp"

namespace hyperaz {

namespace {

// HYPERAZ_TRACE=1 prints per-candidate search progress to stderr.
bool trace_enabled() {
    static const bool on = std::getenv("HYPERAZ_TRACE") != nullptr;
    return on;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

// Exponent vectors over d variables with total degree <= delta, in a fixed
// deterministic order (position-wise recursive, ascending).
void enum_exps(std::size_t pos, std::size_t d, long remaining,
               std::vector<unsigned>& cur,
               std::vector<std::vector<unsigned>>& out) {
    if (pos == d) {
        out.push_back(cur);
        return;
    }
    for (long e = 0; e <= remaining; ++e) {
        cur[pos] = static_cast<unsigned>(e);
        enum_exps(pos + 1, d, remaining - e, cur, out);
    }
    cur[pos] = 0;
}

std::vector<std::vector<unsigned>> monomial_exps(std::size_t d, long delta) {
    std::vector<std::vector<unsigned>> out;
    std::vector<unsigned> cur(d, 0);
    enum_exps(0, d, delta, cur, out);
    return out;
}

// Decompose p into sum over monomials in the integration variables with
// coefficients free of them.
std::map<std::vector<unsigned>, MultiPoly> split_by(
    const MultiPoly& p, const std::vector<std::string>& ivs) {
    std::map<std::vector<unsigned>, MultiPoly> out;
    const auto& vars = p.vars();
    std::vector<long> iv_index(vars.size(), -1);  // var -> position in ivs
    std::vector<std::string> rest_vars;
    std::vector<std::size_t> rest_pos;
    for (std::size_t k = 0; k < vars.size(); ++k) {
        bool found = false;
        for (std::size_t j = 0; j < ivs.size(); ++j)
            if (vars[k] == ivs[j]) {
                iv_index[k] = static_cast<long>(j);
                found = true;
                break;
            }
        if (!found) {
            rest_vars.push_back(vars[k]);
            rest_pos.push_back(k);
        }
    }
    for (const auto& t : p.terms()) {
        std::vector<unsigned> key(ivs.size(), 0);
        for (std::size_t k = 0; k < vars.size(); ++k)
            if (iv_index[k] >= 0)
                key[static_cast<std::size_t>(iv_index[k])] = t.exps[k];
        std::vector<unsigned> rest_exps;
        rest_exps.reserve(rest_pos.size());
        for (std::size_t k : rest_pos) rest_exps.push_back(t.exps[k]);
        out[key] += MultiPoly::monomial(rest_vars, rest_exps, t.coeff);
    }
    return out;
}

struct VarAnsatz {
    std::string name;
    MultiPoly q, r;  // log derivative of Hbar
    MultiPoly A;     // add factor
    MultiPoly B;     // boundary-vanishing factor
};

struct SystemParts {
    std::vector<std::string> ivs;
    std::vector<VarAnsatz> per;
    MultiPoly R{Rational(1)};  // lcm of the r_i (boundary_vanishing mode)
    std::vector<std::vector<unsigned>> mus;
    LinearSystem sys;
};

SystemParts build_parts(const HyperTerm& term, long L, long delta,
                        const AnsatzConfig& cfg) {
    if (L < 0 || delta < 0)
        raise(ErrorCode::IndexError, "negative ansatz order or degree bound");
    const std::size_t d = term.dim();
    if (!cfg.add_factors.empty() && cfg.add_factors.size() != d)
        raise(ErrorCode::DegenerateTerm,
              "add_factors must list one polynomial per integration variable");

    SystemParts parts;
    for (auto& v : term.intvars) parts.ivs.push_back(v.name);
    const bool vanish = cfg.ansatz == Ansatz::kBoundaryVanishing;

    for (std::size_t i = 0; i < d; ++i) {
        VarAnsatz va;
        va.name = parts.ivs[i];
        LogDeriv ld = log_derivative(term, L, va.name);
        va.q = ld.q;
        va.r = ld.r;
        va.A = cfg.add_factors.empty() ? MultiPoly(Rational(1))
                                       : cfg.add_factors[i];
        va.B = MultiPoly(Rational(1));
        if (vanish) {
            const IntVar& iv = term.intvars[i];
            MultiPoly x = MultiPoly::var(va.name);
            // Hbar may carry negative powers of a boundary factor (its
            // normalization divides by S_p^L etc.); raise the factor's
            // multiplicity in the ansatz until G = Hbar*A*B*X provably
            // vanishes at the end.
            auto mult_of = [](MultiPoly p, const MultiPoly& ell) {
                long m = 0;
                MultiPoly q;
                while (!p.is_zero() && MultiPoly::try_div(p, ell, &q)) {
                    p = std::move(q);
                    ++m;
                }
                return m;
            };
            auto end_factor = [&](const Rational& e) {
                MultiPoly ell = x - MultiPoly(e);
                Exponent E{0, 0, 0};
                for (const auto& [S, alpha] : term.powers) {
                    long k = mult_of(S, ell);
                    if (k == 0) continue;
                    E = E + alpha * k;
                    if (term.mode == Mode::kContinuous)
                        E.c0 -= Rational(L) * k;
                }
                if (term.mode == Mode::kContinuous) {
                    E.c0 -= Rational(2 * L) * mult_of(term.b, ell);
                } else {
                    E.c_n += Rational(mult_of(term.s, ell));
                    Rational kt{mult_of(term.t, ell)};
                    E.c_n -= kt;
                    E.c0 -= Rational(L) * kt;
                }
                long m = 1;
                if (E.c_n == 0) {
                    // smallest m with c0 + m > 0, or = 0 when the ep part
                    // saves it (x^ep -> 0 as ep -> 0+)
                    Rational need = -E.c0;
                    mpz_class q;
                    if (E.c_eps > 0)
                        mpz_cdiv_q(q.get_mpz_t(), need.get_num().get_mpz_t(),
                                   need.get_den().get_mpz_t());
                    else
                        mpz_fdiv_q(q.get_mpz_t(),
                                   need.get_num().get_mpz_t(),
                                   need.get_den().get_mpz_t()),
                            q += 1;
                    m = std::max(1L, q.get_si());
                }
                return ell.pow(static_cast<unsigned>(m));
            };
            if (iv.lower.is_finite()) va.B *= end_factor(iv.lower.value);
            if (iv.upper.is_finite()) va.B *= end_factor(iv.upper.value);
            MultiPoly g = MultiPoly::gcd(parts.R, va.r);
            parts.R *= MultiPoly::exact_div(va.r, g);
        }
        parts.per.push_back(std::move(va));
    }
    parts.mus = monomial_exps(d, delta);

    LinearSystem& sys = parts.sys;
    for (long l = 0; l <= L; ++l) {
        sys.unknowns.push_back("e" + std::to_string(l));
        sys.primary.push_back(1);
    }
    for (std::size_t i = 0; i < d; ++i)
        for (auto& mu : parts.mus) {
            std::ostringstream os;
            os << "X" << i + 1 << "_";
            for (std::size_t k = 0; k < mu.size(); ++k)
                os << (k ? "," : "") << mu[k];
            sys.unknowns.push_back(os.str());
            sys.primary.push_back(0);
        }

    std::map<std::vector<unsigned>, LinearSystem::Row> rows;
    auto add = [&](int col, const MultiPoly& poly, bool negate) {
        for (auto& [key, cp] : split_by(poly, parts.ivs))
            if (!cp.is_zero()) rows[key].emplace_back(col, negate ? -cp : cp);
    };
    for (long l = 0; l <= L; ++l) {
        MultiPoly rhs = hbar_parts(term, L, l);
        if (vanish) rhs = parts.R * rhs;
        add(static_cast<int>(l), rhs, false);
    }
    int col = static_cast<int>(L + 1);
    for (std::size_t i = 0; i < d; ++i) {
        const VarAnsatz& va = parts.per[i];
        MultiPoly scale =
            vanish ? MultiPoly::exact_div(parts.R, va.r) : MultiPoly(Rational(1));
        for (auto& mu : parts.mus) {
            MultiPoly xmu = MultiPoly::monomial(parts.ivs, mu, Rational(1));
            MultiPoly E;
            if (vanish) {
                MultiPoly ABx = va.A * va.B * xmu;
                E = scale * (va.q * ABx + va.r * ABx.derivative(va.name));
            } else {
                MultiPoly rAx = va.r * va.A * xmu;
                E = va.q * va.A * xmu + rAx.derivative(va.name);
            }
            add(col, E, true);
            ++col;
        }
    }
    for (auto& [key, row] : rows) sys.rows.push_back(std::move(row));
    return parts;
}

// F / Hbar at ansatz order L.
MultiPoly hbar_ratio(const HyperTerm& term, long L) {
    MultiPoly ratio = term.P;
    if (term.mode == Mode::kDiscrete) {
        ratio *= term.t.pow(static_cast<unsigned>(L));
    } else {
        ratio *= term.b.pow(static_cast<unsigned>(2 * L));
        for (auto& [S, alpha] : term.powers)
            ratio *= S.pow(static_cast<unsigned>(L));
    }
    return ratio;
}

std::optional<Annihilator> solve_parts(const HyperTerm& term, long L,
                                       const AnsatzConfig& cfg,
                                       const SystemParts& parts) {
    // tie-break: minimize (degree in param of e_L, then total size over the
    // first L+1 coordinates, which are the telescoper coefficients)
    auto key = [&](const std::vector<RatFunc>& v) {
        long deg = v[static_cast<std::size_t>(L)].num().degree(term.param);
        std::size_t size = 0;
        for (long l = 0; l <= L; ++l)
            size += v[static_cast<std::size_t>(l)].num().term_count();
        return std::pair<long, std::size_t>(deg, size);
    };

    std::vector<RatFunc> full;
    // large systems whose entries involve only the parameter: reconstruct the
    // solution from modular images instead of exact fraction-free elimination
    if (parts.sys.cols() >= 40 &&
        parts.sys.entry_vars() == std::vector<std::string>{term.param}) {
        if (auto rec =
                reconstruct_nullspace(parts.sys, term.param, cfg.seed)) {
            if (rec->empty()) return std::nullopt;
            std::size_t best = 0;
            for (std::size_t i = 1; i < rec->size(); ++i)
                if (key((*rec)[i]) < key((*rec)[best])) best = i;
            full = std::move((*rec)[best]);
        }
    }
    if (full.empty()) {
        ProjectedSolver solver(parts.sys);
        const auto& basis = solver.primary_basis();
        if (basis.empty()) return std::nullopt;
        std::size_t best = 0;
        for (std::size_t i = 1; i < basis.size(); ++i)
            if (key(basis[i]) < key(basis[best])) best = i;
        full = solver.lift(basis[best]);
    }

    Annihilator ann;
    ann.mode = term.mode;
    ann.ansatz = cfg.ansatz;
    ann.param = term.param;
    ann.L = L;
    for (long l = 0; l <= L; ++l)
        ann.e.push_back(full[static_cast<std::size_t>(l)].num());

    // sign: leading coefficient of the lowest nonzero e_i positive
    Rational sign(1);
    for (long l = 0; l <= L; ++l)
        if (!ann.e[static_cast<std::size_t>(l)].is_zero()) {
            if (ann.e[static_cast<std::size_t>(l)].leading_coeff() < 0) sign = -1;
            break;
        }
    if (sign < 0)
        for (auto& e : ann.e) e = -e;

    const bool vanish = cfg.ansatz == Ansatz::kBoundaryVanishing;
    std::size_t col = static_cast<std::size_t>(L + 1);
    for (std::size_t i = 0; i < term.dim(); ++i) {
        // X_i over an explicit common denominator: the coefficient
        // denominators are polynomials in the parameter only, so the lcm is a
        // cheap univariate computation
        MultiPoly xden{Rational(1)};
        for (std::size_t k = 0; k < parts.mus.size(); ++k) {
            const RatFunc& v = full[col + k];
            if (v.is_zero() || v.den().is_constant()) continue;
            MultiPoly g = MultiPoly::gcd(xden, v.den());
            xden *= MultiPoly::exact_div(v.den(), g);
        }
        MultiPoly xnum;
        for (auto& mu : parts.mus) {
            const RatFunc& v = full[col++];
            if (v.is_zero()) continue;
            xnum += v.num() * MultiPoly::exact_div(xden, v.den()) *
                    MultiPoly::monomial(parts.ivs, mu, Rational(1));
        }

        const VarAnsatz& va = parts.per[i];
        MultiPoly num =
            (vanish ? va.A * va.B : va.r * va.A) * xnum * sign;

        // divide by F/Hbar in factored form via trial division, so the final
        // canonicalization only has to confirm coprimality
        std::vector<std::pair<MultiPoly, long>> denfac;
        denfac.emplace_back(xden, 1);
        denfac.emplace_back(term.P, 1);
        if (term.mode == Mode::kDiscrete) {
            denfac.emplace_back(term.t, L);
        } else {
            denfac.emplace_back(term.b, 2 * L);
            for (auto& [S, alpha] : term.powers) denfac.emplace_back(S, L);
        }
        MultiPoly den{Rational(1)};
        for (auto& [f, mult] : denfac) {
            if (f.is_constant()) {
                den *= f.pow(static_cast<unsigned>(mult));
                continue;
            }
            MultiPoly q;
            while (mult > 0 && MultiPoly::try_div(num, f, &q)) {
                num = q;
                --mult;
            }
            if (mult > 0) den *= f.pow(static_cast<unsigned>(mult));
        }
        ann.certificate.push_back(RatFunc(num, den));
    }
    return ann;
}

}  // namespace

LinearSystem build_system(const HyperTerm& term, long L, long delta,
                          const AnsatzConfig& cfg) {
    if (!shift_compatible(term))
        raise(ErrorCode::DegenerateTerm,
              "exponential or power factor depends on the discrete parameter");
    return build_parts(term, L, delta, cfg).sys;
}

TelescopeOutcome find_telescoper(const HyperTerm& term, const AnsatzConfig& cfg) {
    if (!shift_compatible(term))
        raise(ErrorCode::DegenerateTerm,
              "exponential or power factor depends on the discrete parameter");
    TelescopeOutcome out;
    out.L_max = cfg.L_max;
    out.degree_max = cfg.degree_max;
    for (long L = 0; L <= cfg.L_max; ++L) {
        for (long delta = 0; delta <= cfg.degree_max; ++delta) {
            auto t0 = std::chrono::steady_clock::now();
            SystemParts parts = build_parts(term, L, delta, cfg);
            out.stats.tried++;
            std::uint64_t seed = hash_mix(
                cfg.seed ^ hash_mix(static_cast<std::uint64_t>(L) * 8191u +
                                    static_cast<std::uint64_t>(delta)));
            SplitRankInfo sr = modular_split_rank(parts.sys, seed);
            if (sr.rank_extra >= L + 1) {
                if (trace_enabled())
                    std::fprintf(stderr,
                                 "[hyperaz]   L=%ld d=%ld build+pre %.2fs "
                                 "(%zu cols)\n",
                                 L, delta, seconds_since(t0),
                                 parts.sys.cols());
                continue;  // no e-solution mod p
            }
            out.stats.precheck_pass++;
            out.stats.exact_solves++;
            auto ann = solve_parts(term, L, cfg, parts);
            if (trace_enabled())
                std::fprintf(stderr,
                             "[hyperaz]   L=%ld d=%ld solve %.2fs (%zu cols) "
                             "%s\n",
                             L, delta, seconds_since(t0), parts.sys.cols(),
                             ann ? "hit" : "miss");
            if (ann) {
                if (cfg.ansatz == Ansatz::kBoundaryVanishing) {
                    // enforce the mode's contract: every G_i vanishes at the
                    // bounds (infinite ends can defeat the ansatz factors)
                    bool ok = false;
                    try {
                        ok = boundary_terms(term, *ann).empty();
                    } catch (const Error& err) {
                        if (err.code() != ErrorCode::UnboundedBoundaryTerm)
                            throw;
                    }
                    if (!ok) continue;
                }
                out.annihilator = std::move(ann);
                return out;
            }
        }
    }
    return out;
}

bool verify_certificate(const HyperTerm& term, const Annihilator& ann) {
    if (ann.e.size() != static_cast<std::size_t>(ann.L + 1)) return false;
    if (ann.certificate.size() != term.dim()) return false;
    if (ann.mode != term.mode || ann.param != term.param) return false;
    if (!shift_compatible(term)) return false;
    const long L = ann.L;
    const bool discrete = term.mode == Mode::kDiscrete;

    // everything is checked after dividing out Hbar; all arithmetic stays in
    // explicit numerator/denominator pairs with trial division by the known
    // base factors, which avoids expensive multivariate gcds

    // LHS / Hbar is the polynomial sum of e_l * hbar part l
    MultiPoly lhs;
    for (long l = 0; l <= L; ++l) {
        const MultiPoly& e = ann.e[static_cast<std::size_t>(l)];
        if (!e.is_zero()) lhs += e * hbar_parts(term, L, l);
    }

    MultiPoly PS{Rational(1)};
    for (auto& [S, alpha] : term.powers) PS *= S;
    // F / Hbar in factored form, so multiplications can cancel against
    // denominator factors instead of expanding the full product
    std::vector<std::pair<MultiPoly, long>> phifac;
    phifac.emplace_back(term.P, 1);
    if (discrete) {
        phifac.emplace_back(term.t, L);
    } else {
        phifac.emplace_back(term.b, 2 * L);
        for (auto& [S, alpha] : term.powers) phifac.emplace_back(S, L);
    }
    auto mul_phi = [&](MultiPoly& num, MultiPoly& den) {
        for (auto& [g, mult] : phifac) {
            if (g.is_constant()) {
                num *= g.pow(static_cast<unsigned>(mult));
                continue;
            }
            for (long k = 0; k < mult; ++k) {
                MultiPoly q;
                if (MultiPoly::try_div(den, g, &q))
                    den = q;
                else
                    num *= g;
            }
        }
    };

    std::vector<MultiPoly> bases{term.P, term.b, term.s, term.t};
    for (auto& [S, alpha] : term.powers) bases.push_back(S);
    for (auto& Ri : ann.certificate)
        if (!Ri.is_zero()) bases.push_back(Ri.den());
    auto shrink = [&](MultiPoly& num, MultiPoly& den) {
        for (auto& f : bases) {
            if (f.is_constant()) continue;
            MultiPoly qn, qd;
            while (MultiPoly::try_div(num, f, &qn) &&
                   MultiPoly::try_div(den, f, &qd)) {
                num = qn;
                den = qd;
            }
        }
    };

    // difference as a fraction, starting from LHS/Hbar
    MultiPoly num = lhs, den{Rational(1)};
    for (std::size_t i = 0; i < term.dim(); ++i) {
        const RatFunc& Ri = ann.certificate[i];
        if (Ri.is_zero()) continue;
        const std::string& v = term.intvars[i].name;
        const MultiPoly& rn = Ri.num();
        const MultiPoly& rd = Ri.den();

        // D_v log F = X / Dl with an explicit common denominator
        MultiPoly st = term.s * term.t;
        MultiPoly b2 = term.b * term.b;
        MultiPoly Dl = term.P * b2 * PS;
        if (discrete) Dl *= st;
        MultiPoly AS;  // sum alpha_p S_p'(v) prod_{q != p} S_q
        for (std::size_t p = 0; p < term.powers.size(); ++p) {
            MultiPoly dS = term.powers[p].first.derivative(v);
            if (dS.is_zero()) continue;
            MultiPoly rest{Rational(1)};
            for (std::size_t q = 0; q < term.powers.size(); ++q)
                if (q != p) rest *= term.powers[q].first;
            AS += term.powers[p].second.poly(term.param) * dS * rest;
        }
        MultiPoly X =
            term.P.derivative(v) * b2 * PS +
            term.P * (term.a.derivative(v) * term.b -
                      term.a * term.b.derivative(v)) *
                PS +
            term.P * b2 * AS;
        if (discrete) {
            X = X * st + term.P * b2 * PS * MultiPoly::var(term.param) *
                             (term.s.derivative(v) * term.t -
                              term.t.derivative(v) * term.s);
        }

        // D_v(R_i F)/Hbar = R'*Phi + R*(X/Dl)*Phi as two fractions, each
        // multiplied by the factored Phi with cancellation
        MultiPoly num1 = rn.derivative(v) * rd - rn * rd.derivative(v);
        MultiPoly den1 = rd * rd;
        shrink(num1, den1);
        mul_phi(num1, den1);

        MultiPoly num2 = rn * X;
        MultiPoly den2 = rd * Dl;
        shrink(num2, den2);
        mul_phi(num2, den2);

        MultiPoly tn = num1 * den2 + num2 * den1;
        MultiPoly td = den1 * den2;
        shrink(tn, td);

        // num/den -= tn/td
        num = num * td - tn * den;
        den = den * td;
        shrink(num, den);
        if (num.is_zero()) den = MultiPoly(Rational(1));
    }
    return num.is_zero();
}

}  // namespace hyperaz
