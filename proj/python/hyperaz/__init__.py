"""Telescoper search and epsilon-expansion for hyperexponential
multi-integrals.

The heavy lifting happens in the compiled extension; everything crosses the
boundary as canonical strings (polynomials, rational numbers) or plain
dicts/lists (trees, expansions).
"""

from ._core import (
    Annihilator,
    HyperazError,
    HyperTerm,
    boundary_terms,
    check_annihilator_numeric,
    expand,
    expand_closed_form,
    integrate_tree,
    numeric_integrate,
    operator_str,
    parse,
    telescope,
    verify_certificate,
)

__all__ = [
    "Annihilator",
    "HyperazError",
    "HyperTerm",
    "boundary_terms",
    "check_annihilator_numeric",
    "expand",
    "expand_closed_form",
    "integrate_tree",
    "numeric_integrate",
    "operator_str",
    "parse",
    "telescope",
    "verify_certificate",
]
