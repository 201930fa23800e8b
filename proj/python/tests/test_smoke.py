"""Smoke tests for the Python bindings: one pass through every exposed
operation on small, exactly-known inputs."""

from fractions import Fraction

import pytest

import hyperaz


def frac(s):
    return Fraction(s)


def test_parse_and_str():
    t = hyperaz.parse("x^n", "discrete", "n", [("x", "0", "1")])
    assert t.mode == "discrete"
    assert t.param == "n"
    assert t.dim == 1
    assert t.variables == ["x"]


def test_parse_rejects_non_hyperexponential():
    with pytest.raises(hyperaz.HyperazError, match="NonHyperexponential"):
        hyperaz.parse("log(x)^n", "discrete", "n", [("x", "0", "1")])


def test_telescope_and_verify():
    t = hyperaz.parse("x^n", "discrete", "n", [("x", "0", "1")])
    ann = hyperaz.telescope(t, ansatz="vanish")
    assert ann is not None
    assert ann.order == 1
    assert str(ann) == "(n + 1) - (n + 2)*N"
    assert hyperaz.verify_certificate(t, ann)
    assert hyperaz.boundary_terms(t, ann) == []


def test_plain_telescope_has_boundary_terms():
    t = hyperaz.parse("x^n", "discrete", "n", [("x", "0", "1")])
    ann = hyperaz.telescope(t)  # plain
    rhs = hyperaz.boundary_terms(t, ann)
    assert len(rhs) >= 1
    assert all(b["end"] in ("upper", "lower") for b in rhs)


def test_integrate_tree():
    t = hyperaz.parse("exp(-x*t)", "continuous", "x", [("t", "0", "1")])
    tree = hyperaz.integrate_tree(t)
    assert "annihilator" in tree
    assert len(tree["children"]) == len(tree["rhs"])
    for child in tree["children"]:
        assert "base_value" in child


def test_expand_direct():
    # int_0^1 e^{-x t} dt = (1 - e^{-x})/x = sum (-1)^k x^k/(k+1)!
    t = hyperaz.parse("exp(-x*t)", "continuous", "x", [("t", "0", "1")])
    ex = hyperaz.expand(t, 0, 0, order=6, strategy="direct",
                        init=[(0, 0, ["1"])])
    (entry,) = ex["entries"]
    assert entry["eps_order"] == 0
    coeffs = [frac(c) for c in entry["coeffs"]]
    fact = 1
    for k in range(7):
        fact *= k + 1
        assert coeffs[k - entry["start"]] == Fraction((-1) ** k, fact)


def test_expand_recursive_agrees():
    t = hyperaz.parse("exp(-x*t)", "continuous", "x", [("t", "0", "1")])
    direct = hyperaz.expand(t, 0, 0, order=6, strategy="direct",
                            init=[(0, 0, ["1"])])
    recursive = hyperaz.expand(t, 0, 0, order=6, strategy="recursive",
                               init=[(0, 0, ["1"])])
    d, r = direct["entries"][0], recursive["entries"][0]
    for k in range(7):
        assert frac(d["coeffs"][k]) == frac(r["coeffs"][k])


def test_expand_discrete_tables():
    # int_0^1 x^{n+ep} dx = 1/(n+1+ep) = 1/(n+1) - ep/(n+1)^2 + ...
    t = hyperaz.parse("x^(n+ep)", "discrete", "n", [("x", "0", "1")])
    ex = hyperaz.expand(t, 0, 1, table_length=5, strategy="recursive")
    ord0, ord1 = ex["entries"]
    for n in range(5):
        assert frac(ord0["values"][n]) == Fraction(1, n + 1)
        assert frac(ord1["values"][n]) == Fraction(-1, (n + 1) ** 2)


def test_numeric_integrate():
    t = hyperaz.parse("t^2", "continuous", "x", [("t", "0", "1")])
    q = hyperaz.numeric_integrate(t)
    assert abs(q["value"] - 1 / 3) < 1e-10


def test_check_annihilator_numeric():
    t = hyperaz.parse("exp(-x*t)", "continuous", "x", [("t", "0", "1")])
    ann = hyperaz.telescope(t, ansatz="vanish")
    res = hyperaz.check_annihilator_numeric(
        t, ann, [{"x": "1/2"}, {"x": "1"}])
    assert res < 1e-4


def test_expand_closed_form():
    t = hyperaz.parse("exp(-2*x)", "continuous", "x", [])
    ex = hyperaz.expand_closed_form(t, 0, 0, order=3)
    (entry,) = ex["entries"]
    coeffs = [frac(c) for c in entry["coeffs"]]
    assert coeffs[:4] == [Fraction(1), Fraction(-2), Fraction(2),
                          Fraction(-4, 3)]
