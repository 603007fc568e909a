"""Catalog of lattice systems with their Lax pairs, brackets and integrals."""
from __future__ import annotations

import functools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .exactalg import Poly, PolyMap, PolyMatrix, VarSet, format_poly, parse_poly
from .poisson import PoissonStruct, Report, VectorField
from .rootsys import PhiSubset, build_B, build_L

half = Fraction(1, 2)


@dataclass
class LaxPair:
    L: PolyMatrix
    B: PolyMatrix

    def __post_init__(self):
        if self.L.varset != self.B.varset or self.L.shape != self.B.shape:
            raise ValueError("L and B must share shape and VarSet")
        if not self.L.is_symmetric():
            raise ValueError("L must be symmetric")
        if not self.B.is_antisymmetric():
            raise ValueError("B must be antisymmetric")

    @property
    def dim(self) -> int:
        return self.L.shape[0]


@dataclass
class SystemSpec:
    """A polynomial dynamical system and the structures attached to it.

    ``pairings`` lists ``(bracket, hamiltonian)`` names whose Hamiltonian
    vector field is claimed to be ``field``.  ``casimirs`` holds
    ``(bracket, label, poly)`` triples.  ``related`` carries companion
    systems and maps (e.g. the a-form of the KM lattice).
    """

    name: str
    n: int
    varset: VarSet
    field: VectorField
    lax: Optional[LaxPair] = None
    brackets: dict = field(default_factory=dict)
    hamiltonians: dict = field(default_factory=dict)
    casimirs: list = field(default_factory=list)
    pairings: list = field(default_factory=list)
    related: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.field.varset != self.varset:
            raise ValueError("field over a different VarSet")
        if self.lax is not None and self.lax.L.varset != self.varset:
            raise ValueError("Lax pair over a different VarSet")
        for pi in self.brackets.values():
            if pi.varset != self.varset:
                raise ValueError(f"bracket {pi.name!r} over a different VarSet")
        for h in self.hamiltonians.values():
            if h.varset != self.varset:
                raise ValueError("Hamiltonian over a different VarSet")

    @property
    def id(self) -> str:
        return f"{self.name}:{self.n}"

    @property
    def lax_system(self) -> Optional["SystemSpec"]:
        """The system carrying the Lax pair (self, or the a-form companion)."""
        if self.lax is not None:
            return self
        return self.related.get("a_form")

    def var(self, name: str) -> Poly:
        return self.varset.var(name)

    def describe(self) -> dict:
        out = {
            "id": self.id,
            "variables": list(self.varset.names),
            "field": self.field.as_dict(),
            "brackets": {k: pi.relations() for k, pi in self.brackets.items()},
            "hamiltonians": {k: format_poly(h) for k, h in self.hamiltonians.items()},
            "casimirs": [{"bracket": b, "name": lab, "poly": format_poly(c)}
                         for b, lab, c in self.casimirs],
            "pairings": [list(p) for p in self.pairings],
        }
        if self.lax is not None:
            out["L"] = self.lax.L.to_text()
            out["B"] = self.lax.B.to_text()
        return out


def _field(varset: VarSet, comps: dict) -> VectorField:
    return VectorField.from_dict(varset, comps)


# -- classical Toda -------------------------------------------------------------

def toda_varset(n: int, a_count: Optional[int] = None) -> VarSet:
    a_count = n - 1 if a_count is None else a_count
    return VarSet([f"b{i}" for i in range(1, n + 1)] + [f"a{i}" for i in range(1, a_count + 1)])


def make_toda(n: int) -> SystemSpec:
    if n < 2:
        raise ValueError("Toda lattice needs n >= 2")
    vs = toda_varset(n)
    b = {i: vs.var(f"b{i}") for i in range(1, n + 1)}
    a = {i: vs.var(f"a{i}") for i in range(1, n)}
    z = vs.zero()
    A = lambda i: a.get(i, z)  # noqa: E731  a_0 = a_n = 0

    comps = {f"b{i}": 2 * (A(i) ** 2 - A(i - 1) ** 2) for i in range(1, n + 1)}
    comps.update({f"a{i}": a[i] * (b[i + 1] - b[i]) for i in range(1, n)})
    fld = _field(vs, comps)

    Lrows = [[z] * n for _ in range(n)]
    Brows = [[z] * n for _ in range(n)]
    for i in range(1, n + 1):
        Lrows[i - 1][i - 1] = b[i]
    for i in range(1, n):
        Lrows[i - 1][i] = Lrows[i][i - 1] = a[i]
        Brows[i - 1][i] = a[i]
        Brows[i][i - 1] = -a[i]
    lax = LaxPair(PolyMatrix(vs, Lrows), PolyMatrix(vs, Brows))

    lin, quad = {}, {}
    for i in range(1, n):
        lin[(f"a{i}", f"b{i}")] = -a[i]
        lin[(f"a{i}", f"b{i + 1}")] = a[i]
        quad[(f"a{i}", f"b{i}")] = -a[i] * b[i]
        quad[(f"a{i}", f"b{i + 1}")] = a[i] * b[i + 1]
        quad[(f"b{i}", f"b{i + 1}")] = 2 * a[i] ** 2
    for i in range(1, n - 1):
        quad[(f"a{i}", f"a{i + 1}")] = half * a[i] * a[i + 1]
    pi1 = PoissonStruct.from_relations(vs, lin, "pi1")
    pi2 = PoissonStruct.from_relations(vs, quad, "pi2")

    H1 = sum(b.values(), z)
    H2 = lax.L.power(2).trace() * half
    return SystemSpec(
        "toda", n, vs, fld, lax,
        brackets={"pi1": pi1, "pi2": pi2},
        hamiltonians={"H1": H1, "H2": H2},
        casimirs=[("pi1", "H1", H1), ("pi2", "detL", lax.L.det())],
        pairings=[("pi1", "H2"), ("pi2", "H1")],
    )


# -- Kac-van Moerbeke (Volterra) lattice ---------------------------------------

def km_a_form(n: int) -> SystemSpec:
    """Symmetric Moser Lax pair on a_1..a_n, built from the simple roots of A_n."""
    phi = PhiSubset.preset(n, "simple")
    vs = VarSet(f"a{i}" for i in range(1, n + 1))
    a = {i: vs.var(f"a{i}") for i in range(1, n + 1)}
    z = vs.zero()
    A = lambda i: a.get(i, z)  # noqa: E731
    comps = {f"a{i}": a[i] * (A(i + 1) ** 2 - A(i - 1) ** 2) for i in range(1, n + 1)}
    lax = LaxPair(build_L(phi, vs), build_B(phi, vs))
    return SystemSpec("km_a", n, vs, _field(vs, comps), lax,
                      related={"phi": phi})


def _halve_squares(p: Poly, target: VarSet, factor) -> Poly:
    """Rewrite a polynomial in a_i^2 as one in x_i, using a_i^2 = x_i * factor."""
    terms = {}
    for m, c in p.terms.items():
        if any(e % 2 for e in m):
            raise ValueError(f"{p} is not a polynomial in the squares")
        half_m = tuple(e // 2 for e in m)
        terms[half_m] = c * Fraction(factor) ** sum(half_m)
    return Poly(target, terms)


def make_km(n: int) -> SystemSpec:
    """x_i' = x_i (x_{i+1} - x_{i-1}), x_0 = x_{n+1} = 0.

    The Lax pair lives on the a-form companion (``related['a_form']``),
    linked by x_i = 2 a_i^2 (``related['lift']``, a map a -> x).
    """
    if n < 2:
        raise ValueError("KM lattice needs n >= 2")
    vs = VarSet(f"x{i}" for i in range(1, n + 1))
    x = {i: vs.var(f"x{i}") for i in range(1, n + 1)}
    z = vs.zero()
    X = lambda i: x.get(i, z)  # noqa: E731
    fld = _field(vs, {f"x{i}": x[i] * (X(i + 1) - X(i - 1)) for i in range(1, n + 1)})
    pi = PoissonStruct.from_relations(
        vs, {(f"x{i}", f"x{i + 1}"): x[i] * x[i + 1] for i in range(1, n)}, "pi")
    H = sum(x.values(), z)

    a_form = km_a_form(n)
    lift = PolyMap(a_form.varset, vs, [2 * a_form.var(f"a{i}") ** 2 for i in range(1, n + 1)])
    return SystemSpec(
        "km", n, vs, fld, None,
        brackets={"pi": pi},
        hamiltonians={"H1": H},
        pairings=[("pi", "H1")],
        related={"a_form": a_form, "lift": lift},
    )


def km_trace_powers(sys: SystemSpec, kmax: int) -> list[Poly]:
    """tr L^k of the a-form rewritten in the x variables (odd k vanish)."""
    a_form = sys.related["a_form"]
    return [_halve_squares(t, sys.varset, half) for t in trace_powers(a_form, kmax)]


# -- generalized Lotka-Volterra system ------------------------------------------

def glv_phi(n: int) -> PhiSubset:
    """Simple roots of A_{n-1} plus the two roots of length n-2."""
    return PhiSubset.preset(n - 1, f"simple+length({n - 2})")


def make_glv(n: int) -> SystemSpec:
    """Cubic system on a_1..a_{n+1} with an n x n Lax matrix."""
    if n < 5:
        raise ValueError("glv system needs n >= 5")
    vs = VarSet(f"a{i}" for i in range(1, n + 2))
    a = {i: vs.var(f"a{i}") for i in range(1, n + 2)}
    comps = {
        "a1": a[1] * a[2] ** 2 + a[1] * a[n + 1] ** 2 - a[1] * a[n] ** 2,
        "a2": a[2] * a[3] ** 2 - a[1] ** 2 * a[2] - a[2] * a[n + 1] ** 2,
    }
    for i in range(3, n - 2):
        comps[f"a{i}"] = a[i] * a[i + 1] ** 2 - a[i - 1] ** 2 * a[i]
    comps[f"a{n - 2}"] = (a[n - 2] * a[n] ** 2 - a[n - 3] ** 2 * a[n - 2]
                          + a[n - 2] * a[n - 1] ** 2)
    comps[f"a{n - 1}"] = (a[n - 1] * a[n + 1] ** 2 - a[n - 2] ** 2 * a[n - 1]
                          - a[n - 1] * a[n] ** 2)
    comps[f"a{n}"] = (a[1] ** 2 * a[n] + a[n - 1] ** 2 * a[n] - a[n - 2] ** 2 * a[n]
                      + 2 * a[1] * a[n - 1] * a[n + 1])
    comps[f"a{n + 1}"] = (a[2] ** 2 * a[n + 1] - a[1] ** 2 * a[n + 1]
                          - a[n + 1] * a[n - 1] ** 2 - 2 * a[1] * a[n - 1] * a[n])
    fld = _field(vs, comps)

    phi = glv_phi(n)
    lax = LaxPair(build_L(phi, vs), build_B(phi, vs))

    rel = {}
    for i in range(1, n - 1):
        rel[(f"a{i}", f"a{i + 1}")] = a[i] * a[i + 1]
    rel[("a1", f"a{n}")] = -a[1] * a[n]
    rel[("a1", f"a{n + 1}")] = a[1] * a[n + 1]
    rel[("a2", f"a{n + 1}")] = -a[2] * a[n + 1]
    rel[(f"a{n - 2}", f"a{n}")] = a[n - 2] * a[n]
    rel[(f"a{n - 1}", f"a{n}")] = -a[n - 1] * a[n]
    rel[(f"a{n - 1}", f"a{n + 1}")] = a[n - 1] * a[n + 1]
    rel[(f"a{n}", f"a{n + 1}")] = 2 * a[1] * a[n - 1]
    pi = PoissonStruct.from_relations(vs, rel, "pi")

    z = vs.zero()
    H = sum((a[i] ** 2 for i in range(1, n + 2)), z) * half
    H_printed = sum((a[i] ** 2 for i in range(1, n + 1)), z)
    return SystemSpec(
        "glv", n, vs, fld, lax,
        brackets={"pi": pi},
        hamiltonians={"H": H, "H_printed": H_printed},
        pairings=[("pi", "H")],
        related={"phi": phi},
    )


# -- Toda-type family -------------------------------------------------------------

def make_toda_type(n: int) -> SystemSpec:
    """The (2n+2)-variable Toda-type lattice on b_1..b_n, a_1..a_{n+2}."""
    if n < 5:
        raise ValueError("Toda-type system is defined for n >= 5")
    vs = toda_varset(n, n + 2)
    b = {i: vs.var(f"b{i}") for i in range(1, n + 1)}
    a = {i: vs.var(f"a{i}") for i in range(1, n + 3)}
    z = vs.zero()

    comps = {
        "b1": 2 * a[1] ** 2 - 2 * a[n] ** 2 + 2 * a[n + 2] ** 2,
        "b2": 2 * a[2] ** 2 - 2 * a[1] ** 2 - 2 * a[n + 1] ** 2,
    }
    for i in range(3, n - 1):
        comps[f"b{i}"] = 2 * a[i] ** 2 - 2 * a[i - 1] ** 2
    comps[f"b{n - 1}"] = 2 * a[n - 1] ** 2 - 2 * a[n - 2] ** 2 + 2 * a[n] ** 2
    comps[f"b{n}"] = 2 * a[n + 1] ** 2 - 2 * a[n - 1] ** 2 - 2 * a[n + 2] ** 2
    for i in range(1, n):
        comps[f"a{i}"] = a[i] * (b[i + 1] - b[i])
    comps[f"a{n}"] = a[n] * (b[1] - b[n - 1]) + 2 * a[n - 1] * a[n + 2]
    comps[f"a{n + 1}"] = a[n + 1] * (b[2] - b[n]) - 2 * a[1] * a[n + 2]
    comps[f"a{n + 2}"] = a[n + 2] * (b[n] - b[1]) + 2 * a[1] * a[n + 1] - 2 * a[n - 1] * a[n]
    fld = _field(vs, comps)

    Lrows = [[z] * n for _ in range(n)]
    Brows = [[z] * n for _ in range(n)]

    def put(i, j, lval, bval):
        Lrows[i - 1][j - 1] = Lrows[j - 1][i - 1] = lval
        Brows[i - 1][j - 1] = bval
        Brows[j - 1][i - 1] = -bval

    for i in range(1, n + 1):
        Lrows[i - 1][i - 1] = b[i]
    for i in range(1, n):
        put(i, i + 1, a[i], a[i])
    put(1, n - 1, a[n], -a[n])
    put(2, n, a[n + 1], -a[n + 1])
    put(1, n, a[n + 2], a[n + 2])
    lax = LaxPair(PolyMatrix(vs, Lrows), PolyMatrix(vs, Brows))

    pi2 = PoissonStruct.from_relations(vs, toda_type_linear_relations(n, b, a), "pi2")
    pi1 = PoissonStruct.from_relations(vs, toda_type_quadratic_relations(n, b, a), "pi1")

    H1 = sum(b.values(), z)
    H2 = sum((b[i] ** 2 for i in b), z) * half + sum((a[i] ** 2 for i in a), z)
    C = a[1] * a[n] + a[n - 1] * a[n + 1]
    for i in range(2, n - 1):
        C = C * a[i]
    return SystemSpec(
        "toda_type", n, vs, fld, lax,
        brackets={"pi1": pi1, "pi2": pi2},
        hamiltonians={"H1": H1, "H2": H2},
        casimirs=[("pi2", "H1", H1), ("pi2", "C", C), ("pi1", "detL", lax.L.det())],
        pairings=[("pi2", "H2"), ("pi1", "H1")],
    )


def toda_type_linear_relations(n, b, a) -> dict:
    """Linear bracket: blocks B (b-a brackets) and C (a-a brackets)."""
    rel = {}
    rel[("b1", "a1")] = a[1]
    rel[("b1", f"a{n}")] = -a[n]
    rel[("b1", f"a{n + 2}")] = a[n + 2]
    rel[("b2", "a1")] = -a[1]
    rel[("b2", "a2")] = a[2]
    rel[("b2", f"a{n + 1}")] = -a[n + 1]
    for i in range(3, n - 1):
        rel[(f"b{i}", f"a{i - 1}")] = -a[i - 1]
        rel[(f"b{i}", f"a{i}")] = a[i]
    rel[(f"b{n - 1}", f"a{n - 2}")] = -a[n - 2]
    rel[(f"b{n - 1}", f"a{n - 1}")] = a[n - 1]
    rel[(f"b{n - 1}", f"a{n}")] = a[n]
    rel[(f"b{n}", f"a{n - 1}")] = -a[n - 1]
    rel[(f"b{n}", f"a{n + 1}")] = a[n + 1]
    rel[(f"b{n}", f"a{n + 2}")] = -a[n + 2]
    rel[(f"a{n}", f"a{n + 2}")] = a[n - 1]
    rel[(f"a{n + 1}", f"a{n + 2}")] = -a[1]
    return rel


def toda_type_quadratic_relations(n, b, a) -> dict:
    """Quadratic bracket.

    At n = 5 this agrees with the explicit 12 x 12 matrix except for the
    entries {a5,a6}, {a5,a7}, {a6,a7}, where the explicit matrix halves the
    terms a1*a4, a4*b1, a1*b5 and stops being Poisson.
    """
    rel = {}
    for i in range(1, n):
        rel[(f"b{i}", f"b{i + 1}")] = 2 * a[i] ** 2
    rel[("b1", f"b{n}")] = 2 * a[n + 2] ** 2
    rel[("b1", f"b{n - 1}")] = -2 * a[n] ** 2
    rel[("b2", f"b{n}")] = -2 * a[n + 1] ** 2

    plus = [(i, i) for i in range(1, n)] + [(1, n + 2), (n - 1, n), (n, n + 1)]
    minus = [(i + 1, i) for i in range(1, n)] + [(1, n), (2, n + 1), (n, n + 2)]
    for i, j in plus:
        rel[(f"b{i}", f"a{j}")] = b[i] * a[j]
    for i, j in minus:
        rel[(f"b{i}", f"a{j}")] = -b[i] * a[j]
    rel[("b1", f"a{n + 1}")] = 2 * a[1] * a[n + 2]
    rel[(f"b{n - 1}", f"a{n + 2}")] = 2 * a[n - 1] * a[n]
    rel[("b2", f"a{n + 2}")] = -2 * a[1] * a[n + 1]
    rel[(f"b{n}", f"a{n}")] = -2 * a[n - 1] * a[n + 2]

    pos = [(i, i + 1) for i in range(1, n - 1)] + [(1, n + 1), (n - 1, n + 1),
                                                   (n - 1, n + 2), (n - 2, n)]
    neg = [(1, n), (1, n + 2), (2, n + 1), (n - 1, n)]
    for i, j in pos:
        rel[(f"a{i}", f"a{j}")] = half * a[i] * a[j]
    for i, j in neg:
        rel[(f"a{i}", f"a{j}")] = -half * a[i] * a[j]
    rel[(f"a{n}", f"a{n + 1}")] = a[1] * a[n - 1]
    rel[(f"a{n}", f"a{n + 2}")] = half * a[n] * a[n + 2] + b[1] * a[n - 1]
    rel[(f"a{n + 1}", f"a{n + 2}")] = -half * a[n + 1] * a[n + 2] - a[1] * b[n]
    return rel


# Explicit n = 5 matrices, transcribed entry by entry (rows b1..b5 / a1..a7).
_A1_TEXT = [
    ["0", "2*a1^2", "0", "-2*a5^2", "2*a7^2"],
    ["-2*a1^2", "0", "2*a2^2", "0", "-2*a6^2"],
    ["0", "-2*a2^2", "0", "2*a3^2", "0"],
    ["2*a5^2", "0", "-2*a3^2", "0", "2*a4^2"],
    ["-2*a7^2", "2*a6^2", "0", "-2*a4^2", "0"],
]
_B1_TEXT = [
    ["b1*a1", "0", "0", "0", "-b1*a5", "2*a1*a7", "b1*a7"],
    ["-b2*a1", "b2*a2", "0", "0", "0", "-b2*a6", "-2*a1*a6"],
    ["0", "-b3*a2", "b3*a3", "0", "0", "0", "0"],
    ["0", "0", "-b4*a3", "b4*a4", "b4*a5", "0", "2*a5*a4"],
    ["0", "0", "0", "-b5*a4", "-2*a7*a4", "b5*a6", "-b5*a7"],
]
_C1_INNER_TEXT = [  # C1 = -1/2 * this
    ["0", "-a1*a2", "0", "0", "a1*a5", "-a1*a6", "a1*a7"],
    ["a1*a2", "0", "-a2*a3", "0", "0", "a2*a6", "0"],
    ["0", "a2*a3", "0", "-a3*a4", "-a5*a3", "0", "0"],
    ["0", "0", "a3*a4", "0", "a5*a4", "-a6*a4", "-a7*a4"],
    ["-a1*a5", "0", "a5*a3", "-a5*a4", "0", "-a1*a4", "-a5*a7-a4*b1"],
    ["a1*a6", "-a2*a6", "0", "a6*a4", "a1*a4", "0", "a7*a6+a1*b5"],
    ["-a1*a7", "0", "0", "a7*a4", "a5*a7+a4*b1", "-a7*a6-a1*b5", "0"],
]
_B2_TEXT = [
    ["-a1", "0", "0", "0", "a5", "0", "-a7"],
    ["a1", "-a2", "0", "0", "0", "a6", "0"],
    ["0", "a2", "-a3", "0", "0", "0", "0"],
    ["0", "0", "a3", "-a4", "-a5", "0", "0"],
    ["0", "0", "0", "a4", "0", "-a6", "a7"],
]
_C2_TEXT = [
    ["0"] * 7, ["0"] * 7, ["0"] * 7, ["0"] * 7,
    ["0", "0", "0", "0", "0", "0", "-a4"],
    ["0", "0", "0", "0", "0", "0", "a1"],
    ["0", "0", "0", "0", "a4", "-a1", "0"],
]


def _block_matrix(vs: VarSet, A, Bblk, C) -> PolyMatrix:
    P = lambda t: parse_poly(t, vs)  # noqa: E731
    top = [[P(x) for x in ra] + [P(x) for x in rb] for ra, rb in zip(A, Bblk)]
    Bt = list(zip(*Bblk))
    bottom = [[-P(x) for x in rb] + [P(x) for x in rc] for rb, rc in zip(Bt, C)]
    return PolyMatrix(vs, top + bottom)


def printed_toda_type5() -> dict[str, PoissonStruct]:
    """The two n = 5 Poisson matrices exactly as displayed."""
    vs = toda_varset(5, 7)
    pi1 = _block_matrix(vs, _A1_TEXT, _B1_TEXT, _C1_INNER_TEXT)
    # C1 carries an overall -1/2; rebuild its block with the factor applied
    rows = [list(r) for r in pi1.rows]
    for i in range(5, 12):
        for j in range(5, 12):
            rows[i][j] = rows[i][j] * Fraction(-1, 2)
    pi1 = PolyMatrix(vs, rows)
    pi2 = _block_matrix(vs, [["0"] * 5 for _ in range(5)], _B2_TEXT, _C2_TEXT)
    return {"pi1": PoissonStruct(vs, pi1, "pi1_printed"),
            "pi2": PoissonStruct(vs, pi2, "pi2_printed")}


# -- generic checks -----------------------------------------------------------------

def verify_lax(sys: SystemSpec) -> Report:
    """Entrywise: d/dt L_rc along the field equals [B, L]_rc."""
    if sys.lax is None:
        raise ValueError(f"{sys.id} has no Lax pair")
    L, B = sys.lax.L, sys.lax.B
    C = B.commutator(L)
    failures = []
    d = L.shape[0]
    for r in range(d):
        for c in range(r, d):
            diff = sys.field.apply(L[r, c]) - C[r, c]
            if diff.terms:
                failures.append({"indices": [r + 1, c + 1], "residual": format_poly(diff)})
    return Report("lax", not failures, sys.name, sys.n, failures)


def trace_powers(sys: SystemSpec, kmax: int) -> list[Poly]:
    if sys.lax is None:
        raise ValueError(f"{sys.id} has no Lax pair")
    if kmax < 1:
        raise ValueError("kmax must be at least 1")
    L = sys.lax.L
    out = []
    P = L
    for k in range(1, kmax + 1):
        if k > 1:
            P = P @ L
        out.append(P.trace())
    return out


def conservation_report(sys: SystemSpec, kmax: Optional[int] = None) -> Report:
    """field . grad(tr L^k) == 0 for k = 1..kmax (default: dimension of L)."""
    lax_sys = sys.lax_system
    if lax_sys is None:
        raise ValueError(f"{sys.id} has no Lax pair")
    kmax = kmax or lax_sys.lax.dim
    if lax_sys is sys:
        traces = trace_powers(sys, kmax)
    else:
        traces = km_trace_powers(sys, kmax)
    failures = []
    for k, t in enumerate(traces, start=1):
        d = sys.field.apply(t)
        if d.terms:
            failures.append({"indices": [k], "residual": format_poly(d)})
    return Report("conservation", not failures, sys.name, sys.n, failures, {"kmax": kmax})


def degeneration_field(sys: SystemSpec) -> VectorField:
    """Toda-type field with a_n = a_{n+1} = a_{n+2} = 0, on Toda variables."""
    if sys.name != "toda_type":
        raise ValueError("degeneration is defined for the Toda-type family")
    n = sys.n
    target = toda_varset(n)
    images = {}
    for name in sys.varset.names:
        if name in target:
            images[name] = target.var(name)
        else:
            images[name] = target.zero()
    comps = [sys.field[name].subst(images, target=target) for name in target.names]
    return VectorField(target, comps)


def degeneration_report(sys: SystemSpec) -> Report:
    got = degeneration_field(sys)
    want = make_toda(sys.n).field
    dropped = [f"a{i}" for i in (sys.n, sys.n + 1, sys.n + 2)]
    leftovers = [sys.field[v].subst(
        {name: (sys.varset.var(name) if name not in dropped else sys.varset.zero())
         for name in sys.varset.names}, target=sys.varset) for v in dropped]
    failures = [{"indices": [name], "residual": format_poly(got[name] - want[name])}
                for name in want.varset.names if got[name] != want[name]]
    failures += [{"indices": [v], "residual": format_poly(p)}
                 for v, p in zip(dropped, leftovers) if p.terms]
    return Report("degeneration", not failures, sys.name, sys.n, failures)


# -- registry ---------------------------------------------------------------------------

BUILDERS = {
    "toda": make_toda,
    "km": make_km,
    "glv": make_glv,
    "toda_type": make_toda_type,
}

_ID_RE = re.compile(r"([a-z_]+):(\d+)")


def parse_system_id(text: str) -> tuple[str, int]:
    m = _ID_RE.fullmatch(text.strip())
    if not m or m.group(1) not in BUILDERS:
        raise ValueError(f"unknown system id {text!r}; expected one of "
                         f"{', '.join(k + ':<n>' for k in BUILDERS)}")
    return m.group(1), int(m.group(2))


@functools.lru_cache(maxsize=64)
def get_system(system_id: str) -> SystemSpec:
    name, n = parse_system_id(system_id)
    return BUILDERS[name](n)
