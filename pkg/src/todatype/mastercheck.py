"""Master symmetry of the n = 5 Toda-type lattice, checked by exact sampling."""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .exactalg import Poly, RatFunc, VarSet, as_rat, parse_poly
from .poisson import Report, random_point
from .systems import get_system, trace_powers

# (numerator, denominator) per component, b1..b5 then a1..a7, as printed.
_COMPONENTS = [
    ("a1^2*a6*a2 + 2*a1^2*a3*a4 - 2*a1*a3*a5*a6 + a5^2*a6*a2 + a7^2*a6*a2"
     " + b1^2*a6*a2", "a2*a6"),
    ("a1^2*a6*a2 - 2*a1^2*a3*a4 + 2*a1*a3*a5*a6 + 3*a2^3*a6 + 2*a2^2*a3*a4"
     " + a6^3*a2 + b2^2*a6*a2", "a2*a6"),
    ("-(a2^2*a6 + 2*a2*a3*a4 - a3^2*a6 - b3^2*a6)", "a6"),
    ("a3^2 + a4^2 + a5^2 + b4^2", "1"),
    ("a4^2 + a6^2 + a7^2 + b5^2", "1"),
    ("a1*a2*a5^2*a6 + b1*a1*a6*a2*b2 - b1*a1*a6*a2*b4 + a1*b2^2*a6*a2"
     " - a1*b2*a6*a2*b4 - a1*a3*a4*a5^2 - a1*a3*a4*b1*b2 + a1*a3*a4*b1*b4"
     " + a1*a3*a4*b2^2 - a1*a3*a4*b2*b4 + 2*a2^2*a3*a5*a6 + a2*a3^2*a4*a5"
     " + a2*a4*a5*a6^2 + a7*a6^2*a2*b2 - a7*a6^2*a2*b4 + a3*a5^3*a6"
     " + a3*a5*a6*b1*b2 - a3*a5*a6*b1*b4 - a3*a5*a6*b2^2 + a3*a5*a6*b2*b4",
     "a2*a6*(b2 - b4)"),
    ("a1*a2*a3*a5*a6 - a1*a3^2*a4*a5 + 2*a2^2*a3^2*a6 + 2*a2^2*b3*a6*b2"
     " - 2*a2^2*b3*a6*b4 + a2*a3^3*a4 + a2*a3*a4*a6^2 - a2*a3*a4*b2^2"
     " + a2*a3*a4*b2*b3 + a2*a3*a4*b2*b4 - a2*a3*a4*b3*b4 + a3^2*a5^2*a6",
     "a2*a6*(b2 - b4)"),
    ("-(a1*a2*a5*a6 - a1*a3*a4*a5 + 2*a2^2*a3*a6 + a2*a3^2*a4 + a2*a4*a6^2"
     " + a3*a5^2*a6 - b3*a3*a6*b2 - a3*b4*a6*b2 + b3*a3*a6*b4 + a3*b4^2*a6)",
     "a6*(b2 - b4)"),
    ("-(a1*a2*a5*a6 - a1*a3*a4*a5 + 2*a2^2*a3*a6 + a2*a3^2*a4 + a2*a4*a6^2"
     " - b4*a4*a2*b2 - a4*b5*a2*b2 + b4^2*a4*a2 + a4*b5*a2*b4 - a5*a7*a2*b2"
     " + a5*a7*a2*b4 + a3*a5^2*a6)",
     "a2*(b2 - b4)"),
    ("-(a1^2*a2*a5*a6 - a1^2*a3*a4*a5 + 2*a1*a2^2*a3*a6 + a1*a2*a3^2*a4"
     " + a1*a2*a4*a6^2 + a1*a3*a5^2*a6 - a7*a4*a6*a2*b2 + a7*a4*a6*a2*b4"
     " - b1*a5*a6*a2*b2 + b1*a5*a6*a2*b4 - a5*b4*a6*a2*b2 + a5*b4^2*a6*a2)",
     "a2*a6*(b2 - b4)"),
    ("a1*a2*a4*a5*a6 + a1*a7*a6*a2*b2 - a1*a7*a6*a2*b4 - a1*a3*a4^2*a5"
     " - a1*a3*a4*a7*b2 + a1*a3*a4*a7*b4 + 2*a2^2*a3*a4*a6 + a2*a3^2*a4^2"
     " + a2*a4^2*a6^2 + b2^2*a6^2*a2 - b2*a6^2*a2*b4 + a6^2*b5*a2*b2"
     " - a6^2*b5*a2*b4 + a3*a4*a5^2*a6 + a3*a5*a6*a7*b2 - a3*a5*a6*a7*b4",
     "a2*a6*(b2 - b4)"),
    ("a1*a6*a2 + a1*a3*a4 + a5*a4*a2 + b1*a7*a2 + a7*b5*a2 - a5*a3*a6", "a2"),
]


@dataclass
class MasterField:
    varset: VarSet
    components: tuple[RatFunc, ...]

    def __getitem__(self, name: str) -> RatFunc:
        return self.components[self.varset.index(name)]

    def pole_factor(self) -> Poly:
        return parse_poly("a2*a6*(b2 - b4)", self.varset)

    def apply_at(self, H: Poly, point: Sequence) -> Fraction:
        """X(H) at ``point``: sum_v X_v(p) * dH/dv(p)."""
        total = Fraction(0)
        for i, comp in enumerate(self.components):
            d = H.diff(i)
            if d.terms:
                total += comp.eval(point) * d.eval(point)
        return total


def build_master_n5() -> MasterField:
    vs = get_system("toda_type:5").varset
    comps = tuple(RatFunc(parse_poly(num, vs), parse_poly(den, vs))
                  for num, den in _COMPONENTS)
    return MasterField(vs, comps)


def apply_master(X: MasterField, H: Poly, points: Sequence[Sequence],
                 candidate: Optional[Poly] = None) -> list[tuple]:
    """Exact values of X(H), paired with ``candidate`` at the same points."""
    out = []
    for p in points:
        p = [as_rat(v) for v in p]
        val = X.apply_at(H, p)
        out.append((val, candidate.eval(p) if candidate is not None else None))
    return out


def admissible_points(X: MasterField, count: int, seed: int = 0) -> list[list[int]]:
    rng = random.Random(seed)
    pole = X.pole_factor()
    pts = []
    while len(pts) < count:
        p = random_point(rng, len(X.varset))
        if pole.eval(p) != 0:
            pts.append(p)
    return pts


def classify(pairs: Sequence[tuple], points: Sequence) -> dict:
    """Verdict for pairs (X(H)(p), H_next(p)) decided in exact arithmetic."""
    if all(x == y for x, y in pairs):
        return {"verdict": "exact-equality"}
    ratio = None
    for (x, y), p in zip(pairs, points):
        if y == 0:
            if x != 0:
                return {"verdict": "mismatch", "witness": [str(v) for v in p]}
            continue
        r = Fraction(x) / y
        if ratio is None:
            ratio = r
        elif r != ratio:
            return {"verdict": "mismatch", "witness": [str(v) for v in p],
                    "ratios": [str(ratio), str(r)]}
    return {"verdict": "exact-proportionality", "constant": str(ratio)}


def master_report(samples: int = 100, seed: int = 0) -> Report:
    """X(H_i) against H_{i+1} for i = 1..5 with H_i = tr L^i.

    The normalised convention tr L^i / i is evaluated alongside and recorded.
    """
    X = build_master_n5()
    sys = get_system("toda_type:5")
    traces = trace_powers(sys, 6)
    points = admissible_points(X, samples, seed)
    rows = []
    ok = True
    failures = []
    for i in range(1, 6):
        row = {"i": i}
        for label, H, Hn in (
            ("trace", traces[i - 1], traces[i]),
            ("normalized", traces[i - 1] / i, traces[i] / (i + 1)),
        ):
            row[label] = classify(apply_master(X, H, points, Hn), points)
        rows.append(row)
        if row["trace"]["verdict"] == "mismatch":
            ok = False
            failures.append({"indices": [i], "residual": row["trace"].get("witness")})
    return Report("master", ok, "toda_type", 5, failures,
                  {"samples": samples, "seed": seed, "table": rows})
