#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hyperaz/telescope.hpp"

namespace hyperaz {

// One boundary contribution G_i evaluated at an end of the i-th integration
// variable, packaged as a hyperexponential term in the remaining variables.
// Upper ends enter the inhomogeneous right-hand side with sign +1, lower
// ends with -1.
struct BoundaryIntegral {
    int sign = 1;
    HyperTerm term;  // d-1 integration variables
    std::size_t var_index = 0;
    bool at_upper = true;

    std::string str() const;
};

// Node of the divide-and-conquer tree.  Interior nodes carry an annihilator
// for their integral and one child per boundary integral on the right-hand
// side; 0-dimensional leaves carry the closed-form integrand token instead.
struct RecursionNode {
    HyperTerm integral;
    std::optional<Annihilator> annihilator;  // absent at 0-dim leaves
    std::vector<BoundaryIntegral> rhs;       // size <= 2*dim
    std::vector<RecursionNode> children;     // aligned 1:1 with rhs
    std::optional<std::string> base_value;   // 0-dim integrand expression
};

// Evaluates every certificate component G_i = R_i * F at both ends of its
// integration variable.  Entries that vanish identically (exact zero, or a
// proven-dominant exponential decay at an infinite end) are dropped; a term
// that cannot be proven bounded raises UnboundedBoundaryTerm.
std::vector<BoundaryIntegral> boundary_terms(const HyperTerm& term,
                                             const Annihilator& ann);

// Recursively annihilates `term` and all boundary integrals that appear,
// down to 0-dimensional base values.  Each node tries the plain ansatz
// first; when the caller requested boundary-vanishing output (homogeneous
// equations) or the plain certificate is unbounded at an end, the node falls
// back to the boundary-vanishing ansatz.  Search failures and unbounded
// boundary terms are reported with the node path.
RecursionNode divide_and_conquer(const HyperTerm& term, const AnsatzConfig& cfg,
                                 long depth_limit);

}  // namespace hyperaz
