#pragma once

#include <optional>

#include "hyperaz/hyperterm.hpp"
#include "hyperaz/linsys.hpp"

namespace hyperaz {

enum class Ansatz { kPlain, kBoundaryVanishing };

struct AnsatzConfig {
    Ansatz ansatz = Ansatz::kPlain;
    long L_max = 8;
    long degree_max = 12;
    // Optional extra numerator factors, one per integration variable, that
    // multiply r_i in the certificate ansatz.
    std::vector<MultiPoly> add_factors;
    std::uint64_t seed = 0;
};

// Telescoper sum_l e_l N^l (discrete) or sum_l e_l D_param^l (continuous)
// together with the certificate G_i = R_i * F satisfying
//   sum_l e_l F(n+l) = sum_i D_{x_i} G_i   (discrete)
//   sum_l e_l D_x^l F = sum_i D_{x_i} G_i  (continuous)
struct Annihilator {
    Mode mode = Mode::kContinuous;
    Ansatz ansatz = Ansatz::kPlain;
    std::string param;
    long L = 0;
    std::vector<MultiPoly> e;          // L+1 polynomials in (param, ep)
    std::vector<RatFunc> certificate;  // one R_i per integration variable
};

struct TelescopeStats {
    long tried = 0;          // (L, delta) pairs examined
    long precheck_pass = 0;  // modular prechecks reporting a possible solution
    long exact_solves = 0;
};

struct TelescopeOutcome {
    std::optional<Annihilator> annihilator;  // empty: sweep exhausted
    long L_max = 0;
    long degree_max = 0;
    TelescopeStats stats;
};

// Coefficient-comparison system for ansatz order L and X-degree bound delta.
// Unknowns: e_0..e_L (primary) then the coefficients of each X_i (total
// degree <= delta in the integration variables).
LinearSystem build_system(const HyperTerm& term, long L, long delta,
                          const AnsatzConfig& cfg);

// Iterative-deepening search: L outer 0..L_max, delta inner 0..degree_max,
// modular precheck before each exact solve.  Deterministic for a fixed seed.
TelescopeOutcome find_telescoper(const HyperTerm& term, const AnsatzConfig& cfg);

// Exact check of the telescoper identity via the full-integrand logarithmic
// derivatives; independent of the Hbar machinery used in the search.
bool verify_certificate(const HyperTerm& term, const Annihilator& ann);

}  // namespace hyperaz
