from fractions import Fraction

import pytest
import sympy
from hypothesis import settings, strategies as st

from todatype.exactalg import Poly, VarSet

settings.register_profile("repo", deadline=None, max_examples=60)
settings.load_profile("repo")

XYZ = VarSet(["x", "y", "z"])
SYMS = sympy.symbols("x y z")

coeffs = st.one_of(st.integers(-5, 5),
                   st.fractions(min_value=-3, max_value=3, max_denominator=6))
monos = st.tuples(*[st.integers(0, 3)] * 3)


@st.composite
def polys(draw, max_terms=5):
    terms = draw(st.dictionaries(monos, coeffs, max_size=max_terms))
    return Poly(XYZ, terms)


def to_sympy(p: Poly):
    expr = sympy.Integer(0)
    for mono, c in p.terms.items():
        term = sympy.Rational(Fraction(c).numerator, Fraction(c).denominator)
        for s, e in zip(SYMS, mono):
            term *= s ** e
        expr += term
    return sympy.expand(expr)


def from_sympy_poly(expr, varset=XYZ) -> Poly:
    syms = sympy.symbols(" ".join(varset.names))
    sp = sympy.Poly(sympy.expand(expr), *syms)
    return Poly(varset, {m: Fraction(int(c.p), int(c.q)) for m, c in sp.terms()})


@pytest.fixture
def xyz():
    return XYZ


_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        _ACCEPTANCE[report.nodeid.split("::")[-1]] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in sorted(_ACCEPTANCE.items(), key=lambda kv: int(kv[0].split("_")[1])):
        terminalreporter.write_line(f"{name}: {'PASS' if outcome == 'passed' else 'FAIL'}")
