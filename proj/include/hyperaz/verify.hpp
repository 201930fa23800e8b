#pragma once

#include <map>
#include <string>
#include <vector>

#include "hyperaz/telescope.hpp"

namespace hyperaz {

struct QuadratureResult {
    double value = 0.0;
    double abs_error_estimate = 0.0;
    enum Method { kAdaptive, kMonteCarlo } method = kAdaptive;
    long evaluations = 0;
};

// Numeric value of the integral of `term` over its box at the given
// assignment of the parameter and ep (and, for discrete mode, an integer
// value of the parameter).  Dimensions up to 3 use nested double-exponential
// quadrature, which absorbs integrable endpoint singularities and infinite
// ends; higher dimensions use fixed-seed Monte Carlo with at least 10^6
// samples.  Divergent integrands are detected by non-converging refinement
// and raise DivergentIntegral.
QuadratureResult numeric_integrate(const HyperTerm& term,
                                   const std::map<std::string, Rational>& assign,
                                   double target_rel_err = 1e-10);

// Maximum relative residual of the homogeneous equation over the points:
// discrete |sum e_i(n) I(n+i)| / max_i |e_i I(n+i)|; continuous the same with
// numeric central-difference derivatives, step (quadrature error)^(1/(L+1)).
double check_annihilator_numeric(
    const HyperTerm& term, const Annihilator& ann,
    const std::vector<std::map<std::string, Rational>>& points);

}  // namespace hyperaz
