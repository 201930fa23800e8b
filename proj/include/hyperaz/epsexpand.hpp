#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hyperaz/boundary.hpp"

namespace hyperaz {

// Truncated integer-power series: coefficients of x^start .. x^(start+M)
// with M = coeffs.size() - 1.  No terms exist below x^start; everything
// above the window is O(x^(start+M+1)).
struct SeriesInX {
    long start = 0;
    std::vector<Rational> coeffs;

    long M() const { return static_cast<long>(coeffs.size()) - 1; }
    bool is_zero() const;
    Rational at(long k) const;  // coefficient of x^k inside/below the window
    // Leading zeros folded into start; zero series becomes start = 0.
    SeriesInX normalized() const;
    std::string str(const std::string& var = "x") const;
};

// Laurent expansion of an integral in ep: entries for ep^t .. ep^u.
// Continuous mode fills `entries` (series in the parameter); discrete mode
// fills `tables` (values at param = n0, n0+1, ...).
struct EpsExpansion {
    Mode mode = Mode::kContinuous;
    long t = 0;
    std::vector<SeriesInX> entries;
    std::vector<std::vector<Rational>> tables;
    // validity metadata; callers may overwrite (no procedure computes these)
    long n0 = 0;
    Rational x_alpha = 0, x_beta = 0;

    long u() const {
        long cnt = static_cast<long>(mode == Mode::kContinuous
                                         ? entries.size()
                                         : tables.size());
        return t + cnt - 1;
    }
};

// Parameterized equation sum_k a_k(ep, x) D_x^k I = sum_j h_j(x) ep^j
// (continuous) with truncated-series right-hand side.
struct ParamODE {
    std::string param;
    long order = 0;
    std::vector<MultiPoly> coeffs;                // a_0 .. a_order in (ep, param)
    std::vector<std::pair<long, SeriesInX>> rhs;  // (ep order, series)
};

// One ep-order constraint: sum_k coeffs[k](x) D^k I_j = rhs.
struct EpsConstraint {
    std::vector<MultiPoly> coeffs;  // a_k(0, x), free of ep
    SeriesInX rhs;
};

// Constraint for order j = t + solved_below.size(), where solved_below holds
// the already-computed entries for ep^t .. ep^(j-1).  The right-hand side is
// h_j minus the ep^j coefficient of the operator applied to the lower
// orders, computed to window length M.  Raises RescaleRequired when every
// a_k(0, x) vanishes (divide the equation by the maximal ep power first).
EpsConstraint eps_constraints(const ParamODE& ode, long t,
                              const std::vector<SeriesInX>& solved_below,
                              long M);

// Truncated integer-power series solution of
//   sum_k coeffs[k](param) D^k I = rhs,
// computed coefficient-by-coefficient from the indicial recurrence.  `init`
// prescribes the coefficients in its window: values at free positions
// (indicial roots) are taken from it, free positions below its window are
// zero, free positions above it raise UnderdeterminedInit.  A prescribed
// value conflicting with a forced one raises `on_init_conflict`; an
// inconsistent equation at a vanishing leading factor raises
// SingularObstruction.  Pass an empty-coefficient init to prescribe nothing.
SeriesInX series_solve(const std::vector<MultiPoly>& coeffs,
                       const std::string& param, const SeriesInX& rhs,
                       const SeriesInX& init, long M,
                       ErrorCode on_init_conflict = ErrorCode::SingularObstruction);

enum class ExpandStrategy { kDirect, kRecursive };

struct ExpandOptions {
    long t = 0, u = 0;  // ep range, inclusive
    long M = 20;        // series truncation order (continuous)
    long table_length = 8;  // values per ep order (discrete)
    ExpandStrategy strategy = ExpandStrategy::kDirect;
    AnsatzConfig ansatz;
};

// ep-expansion of the integral of `term`:
//  - direct: homogeneous equation via the boundary-vanishing ansatz, then
//    order-by-order series solving (continuous) or recurrence unrolling
//    (discrete) from the caller's initial data;
//  - recursive: divide_and_conquer tree, leaves expanded in closed form,
//    interior nodes solved bottom-up (init applies to the root; interior
//    free coefficients raise UnderdeterminedInit).
// init[j] belongs to ep^(t+j): a series in the parameter (continuous) or
// the values I(n0), I(n0+1), ... as coeffs with start = n0 (discrete).
EpsExpansion expand_integral(const HyperTerm& term, const ExpandOptions& opt,
                             const std::vector<SeriesInX>& init);

// Exact expansion of a 0-dimensional (closed-form) term in ep and the
// parameter; used for recursion leaves and exposed for direct use.
EpsExpansion expand_closed_form(const HyperTerm& term, long t, long u, long M);

}  // namespace hyperaz
