#include "hyperaz/verify.hpp"

#include <cmath>
#include <random>

namespace hyperaz {

namespace {

bool exponent_is_integer(double e) {
    return std::abs(e - std::round(e)) < 1e-12;
}

// F at a full double assignment (integration variables + parameter + ep)
double eval_integrand(const HyperTerm& term,
                      const std::map<std::string, double>& a) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    double v = term.P.eval_double(a);
    double den = term.b.eval_double(a);
    if (den == 0.0) return nan;  // isolated; skipped by the quadrature
    v *= std::exp(term.a.eval_double(a) / den);
    double ep = 0.0, n = 0.0;
    if (auto it = a.find("ep"); it != a.end()) ep = it->second;
    if (auto it = a.find(term.param); it != a.end()) n = it->second;
    for (const auto& [S, alpha] : term.powers) {
        double base = S.eval_double(a);
        double e = alpha.c0.get_d() + alpha.c_eps.get_d() * ep +
                   alpha.c_n.get_d() * n;
        if (base > 0.0) {
            v *= std::pow(base, e);
        } else if (base == 0.0) {
            if (e <= 0.0) return nan;
            v = 0.0;
        } else {
            if (!exponent_is_integer(e)) return nan;
            v *= std::pow(base, e);
        }
    }
    if (term.mode == Mode::kDiscrete) {
        double s = term.s.eval_double(a), t = term.t.eval_double(a);
        if (t == 0.0) return nan;
        v *= std::pow(s / t, n);
    }
    return v;
}

// Double-exponential abscissas: finite (lo,hi) via tanh-sinh, half-infinite
// via exp-sinh, doubly infinite via sinh-sinh.  Returns node and weight for
// trapezoid parameter u.
struct DEMap {
    Bound lo, hi;
    void node(double u, double* x, double* w) const {
        const double c = 1.5707963267948966;  // pi/2
        double sh = std::sinh(u);
        if (lo.is_finite() && hi.is_finite()) {
            double a = lo.value.get_d(), b = hi.value.get_d();
            // keep the offset from the nearer endpoint accurate far below
            // double epsilon: 1 +- tanh(y) = 2 / (1 + exp(-+2y))
            double y = c * sh;
            if (y <= 0.0)
                *x = a + (b - a) / (1.0 + std::exp(-2.0 * y));
            else
                *x = b - (b - a) / (1.0 + std::exp(2.0 * y));
            double ch = std::cosh(y);
            *w = 0.5 * (b - a) * c * std::cosh(u) / (ch * ch);
        } else if (lo.is_finite()) {  // (a, +inf)
            double a = lo.value.get_d();
            double t = std::exp(c * sh);
            *x = a + t;
            *w = c * std::cosh(u) * t;
        } else if (hi.is_finite()) {  // (-inf, b)
            double b = hi.value.get_d();
            double t = std::exp(c * sh);
            *x = b - t;
            *w = c * std::cosh(u) * t;
        } else {  // (-inf, inf)
            *x = std::sinh(c * sh);
            *w = c * std::cosh(u) * std::cosh(c * sh);
        }
    }
};

struct QuadCtx {
    const HyperTerm* term;
    std::map<std::string, double> point;
    std::vector<DEMap> maps;
    int level = 6;
    long evals = 0;
};

// trapezoid sum over the double-exponential grid for dimension i
double integrate_dim(QuadCtx& ctx, std::size_t i) {
    if (i == ctx.term->intvars.size()) {
        ++ctx.evals;
        double v = eval_integrand(*ctx.term, ctx.point);
        return std::isfinite(v) ? v : 0.0;
    }
    const double h = 1.0 / static_cast<double>(1 << (ctx.level - 3));
    // widen the window as the grid refines: near a non-integrable endpoint
    // singularity the transformed integrand stays O(1) out to the cutoff, so
    // the estimate keeps growing level over level and divergence is detected
    const double umax = 2.2 + 0.35 * static_cast<double>(ctx.level);
    double sum = 0.0;
    auto& slot = ctx.point[ctx.term->intvars[i].name];
    for (double u = -umax; u <= umax; u += h) {
        double x, w;
        ctx.maps[i].node(u, &x, &w);
        if (!std::isfinite(x) || !std::isfinite(w) || w == 0.0) continue;
        slot = x;
        double f = integrate_dim(ctx, i + 1);
        double c = w * f;
        if (std::isfinite(c)) sum += c;
    }
    return sum * h;
}

}  // namespace

QuadratureResult numeric_integrate(const HyperTerm& term,
                                   const std::map<std::string, Rational>& assign,
                                   double target_rel_err) {
    QuadratureResult res;
    std::map<std::string, double> fixed;
    for (auto& [k, v] : assign) fixed[k] = v.get_d();

    if (term.dim() >= 4) {
        // fixed-seed Monte Carlo; finite boxes only
        res.method = QuadratureResult::kMonteCarlo;
        std::mt19937_64 rng(0x5eedf00dULL);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        const long N = 1'000'000;
        double vol = 1.0;
        for (auto& iv : term.intvars) {
            if (!iv.lower.is_finite() || !iv.upper.is_finite())
                raise(ErrorCode::NumericFailure,
                      "Monte Carlo requires finite bounds");
            vol *= iv.upper.value.get_d() - iv.lower.value.get_d();
        }
        double sum = 0.0, sum2 = 0.0;
        std::map<std::string, double> pt = fixed;
        for (long k = 0; k < N; ++k) {
            for (auto& iv : term.intvars) {
                double lo = iv.lower.value.get_d(), hi = iv.upper.value.get_d();
                pt[iv.name] = lo + (hi - lo) * uni(rng);
            }
            double f = eval_integrand(term, pt);
            if (!std::isfinite(f)) continue;
            sum += f;
            sum2 += f * f;
        }
        res.evaluations = N;
        res.value = vol * sum / static_cast<double>(N);
        double var = sum2 / N - (sum / N) * (sum / N);
        res.abs_error_estimate =
            vol * std::sqrt(std::max(var, 0.0) / static_cast<double>(N));
        return res;
    }

    QuadCtx ctx;
    ctx.term = &term;
    ctx.point = fixed;
    for (auto& iv : term.intvars) ctx.maps.push_back({iv.lower, iv.upper});

    double prev = 0.0;
    bool have_prev = false;
    int grow_streak = 0;
    int max_level = term.dim() >= 3 ? 8 : 10;
    for (int level = 4; level <= max_level; ++level) {
        ctx.level = level;
        double cur = integrate_dim(ctx, 0);
        if (!std::isfinite(cur))
            raise(ErrorCode::DivergentIntegral,
                  "quadrature produced a non-finite value");
        if (have_prev) {
            double err = std::abs(cur - prev);
            res.value = cur;
            res.abs_error_estimate = err;
            double scale = std::max(std::abs(cur), 1e-300);
            if (err <= target_rel_err * scale) {
                res.evaluations = ctx.evals;
                return res;
            }
            if (std::abs(cur) > 1.2 * std::abs(prev) && std::abs(cur) > 1.0)
                ++grow_streak;
            else
                grow_streak = 0;
            if (grow_streak >= 3)
                raise(ErrorCode::DivergentIntegral,
                      "refinement keeps growing; integral appears divergent");
        }
        prev = cur;
        have_prev = true;
    }
    res.value = prev;
    res.evaluations = ctx.evals;
    if (res.abs_error_estimate >
        1e-2 * std::max(std::abs(prev), 1e-300))
        raise(ErrorCode::DivergentIntegral,
              "quadrature failed to converge on refinement");
    return res;
}

double check_annihilator_numeric(
    const HyperTerm& term, const Annihilator& ann,
    const std::vector<std::map<std::string, Rational>>& points) {
    double worst = 0.0;
    const long L = ann.L;
    for (const auto& pt : points) {
        std::map<std::string, double> dpt;
        for (auto& [k, v] : pt) dpt[k] = v.get_d();
        if (!dpt.count("ep")) dpt["ep"] = 0.0;

        double quaderr = 1e-12;
        auto I_at = [&](const Rational& pval) {
            auto a = pt;
            a[term.param] = pval;
            auto q = numeric_integrate(term, a);
            quaderr = std::max(quaderr, q.abs_error_estimate);
            return q.value;
        };

        auto pit = pt.find(term.param);
        if (pit == pt.end())
            raise(ErrorCode::IndexError,
                  "point does not assign the parameter " + term.param);
        Rational p0 = pit->second;

        double num = 0.0, scale = 0.0;
        if (term.mode == Mode::kDiscrete) {
            for (long i = 0; i <= L; ++i) {
                double ei =
                    ann.e[static_cast<std::size_t>(i)].eval_double(dpt);
                double c = ei * I_at(p0 + Rational(i));
                num += c;
                scale = std::max(scale, std::abs(c));
            }
        } else {
            // central differences; step from the quadrature error estimate
            std::map<Rational, double> cache;
            auto I_cached = [&](const Rational& x) {
                auto it = cache.find(x);
                if (it != cache.end()) return it->second;
                double v = I_at(x);
                cache.emplace(x, v);
                return v;
            };
            // probe once to learn the error scale, then pick h
            I_cached(p0);
            double h = std::pow(std::max(quaderr, 1e-14),
                                1.0 / static_cast<double>(L + 1));
            Rational hr(std::lround(h * 1e6), 1000000);
            if (hr == 0) hr = Rational(1, 1000000);
            for (long k = 0; k <= L; ++k) {
                // k-th central difference with binomial weights on a
                // half-step grid
                double d = 0.0;
                for (long i = 0; i <= k; ++i) {
                    double binom = 1.0;
                    for (long j = 0; j < i; ++j)
                        binom = binom * static_cast<double>(k - j) /
                                static_cast<double>(j + 1);
                    Rational off = Rational(k, 2) - Rational(i);
                    d += ((i % 2) ? -1.0 : 1.0) * binom *
                         I_cached(p0 + off * hr);
                }
                d /= std::pow(hr.get_d(), static_cast<double>(k));
                double ek =
                    ann.e[static_cast<std::size_t>(k)].eval_double(dpt);
                double c = ek * d;
                num += c;
                scale = std::max(scale, std::abs(c));
            }
        }
        if (scale == 0.0) scale = 1.0;
        worst = std::max(worst, std::abs(num) / scale);
    }
    return worst;
}

}  // namespace hyperaz
