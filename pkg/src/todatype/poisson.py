"""Poisson brackets given as antisymmetric matrices of polynomials."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence, Union

from .exactalg import Poly, PolyMap, PolyMatrix, Rat, VarSet, as_rat, format_poly

SCHEMA_VERSION = 1


@dataclass
class Report:
    """Outcome of one verification.

    ``failures`` holds dicts with an ``indices`` entry and a ``residual``
    rendered as polynomial text; ``info`` carries check-specific extras
    (ranks, seeds, verdicts) and must stay JSON-serialisable.
    """

    check: str
    ok: bool
    system: str = ""
    n: Optional[int] = None
    failures: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "system": self.system,
            "n": self.n,
            "ok": self.ok,
            "failures": self.failures,
            **({"info": self.info} if self.info else {}),
        }

    def __bool__(self) -> bool:
        return self.ok


class VectorField:
    """Polynomial vector field: one component per variable."""

    __slots__ = ("varset", "components")

    def __init__(self, varset: VarSet, components: Sequence[Poly]):
        components = tuple(
            c if isinstance(c, Poly) else Poly.constant(varset, c) for c in components
        )
        if len(components) != len(varset):
            raise ValueError(
                f"{len(components)} components for {len(varset)} variables"
            )
        for c in components:
            if c.varset != varset:
                raise ValueError("component over a different VarSet")
        self.varset = varset
        self.components = components

    @classmethod
    def from_dict(cls, varset: VarSet, comps: Mapping[str, Poly]) -> "VectorField":
        z = varset.zero()
        return cls(varset, [comps.get(name, z) for name in varset.names])

    def __getitem__(self, var: Union[str, int]) -> Poly:
        return self.components[self.varset.index(var)]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, VectorField)
            and self.varset == other.varset
            and self.components == other.components
        )

    __hash__ = None

    def __sub__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.varset, [a - b for a, b in zip(self.components, other.components)])

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.varset, [a + b for a, b in zip(self.components, other.components)])

    def scale(self, c) -> "VectorField":
        return VectorField(self.varset, [a * c for a in self.components])

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def apply(self, f: Poly) -> Poly:
        """Derivative of ``f`` along the field: sum_v X_v * df/dv."""
        acc = self.varset.zero()
        for i, comp in enumerate(self.components):
            if comp.terms:
                d = f.diff(i)
                if d.terms:
                    acc = acc + comp * d
        return acc

    def subst(self, images, target: VarSet) -> "VectorField":
        return VectorField(target, [c.subst(images, target=target) for c in self.components])

    def as_dict(self) -> dict[str, str]:
        return {n: format_poly(c) for n, c in zip(self.varset.names, self.components)}

    def __repr__(self) -> str:
        return f"VectorField({self.as_dict()})"


class PoissonStruct:
    """Antisymmetric matrix ``pi[i][j] = {x_i, x_j}`` over a VarSet."""

    __slots__ = ("varset", "matrix", "name")

    def __init__(self, varset: VarSet, matrix: PolyMatrix, name: str = "pi"):
        n = len(varset)
        if matrix.shape != (n, n):
            raise ValueError(f"matrix shape {matrix.shape} does not match {n} variables")
        if matrix.varset != varset:
            raise ValueError("matrix entries over a different VarSet")
        if not matrix.is_antisymmetric():
            raise ValueError(f"Poisson matrix {name!r} is not antisymmetric")
        self.varset = varset
        self.matrix = matrix
        self.name = name

    @classmethod
    def from_relations(cls, varset: VarSet,
                       relations: Mapping[tuple[str, str], Poly],
                       name: str = "pi") -> "PoissonStruct":
        """Build from ``{(x, y): {x, y}}``; the transposed entries are implied.

        A pair given twice (in either orientation) must agree.
        """
        n = len(varset)
        z = varset.zero()
        rows = [[z] * n for _ in range(n)]
        seen = {}
        for (x, y), val in relations.items():
            i, j = varset.index(x), varset.index(y)
            if i == j:
                raise ValueError(f"diagonal relation {{{x},{y}}}")
            if not isinstance(val, Poly):
                val = Poly.constant(varset, val)
            key = (min(i, j), max(i, j))
            oriented = val if i < j else -val
            if key in seen and seen[key] != oriented:
                raise ValueError(f"conflicting relations for {{{x},{y}}}")
            seen[key] = oriented
            rows[i][j] = val
            rows[j][i] = -val
        return cls(varset, PolyMatrix(varset, rows), name)

    def __getitem__(self, idx) -> Poly:
        return self.matrix[idx]

    def __add__(self, other: "PoissonStruct") -> "PoissonStruct":
        if other.varset != self.varset:
            raise ValueError("Poisson structures over different VarSets")
        return PoissonStruct(self.varset, self.matrix + other.matrix,
                             f"{self.name}+{other.name}")

    def __neg__(self) -> "PoissonStruct":
        return PoissonStruct(self.varset, -self.matrix, f"-{self.name}")

    def scale(self, c) -> "PoissonStruct":
        return PoissonStruct(self.varset, self.matrix.scale(c), f"{c}*{self.name}")

    def __eq__(self, other) -> bool:
        return isinstance(other, PoissonStruct) and self.matrix == other.matrix

    __hash__ = None

    def relations(self) -> dict[str, str]:
        """Nonzero upper-triangular entries as ``{"{x,y}": text}``."""
        out = {}
        names = self.varset.names
        for i, j in itertools.combinations(range(len(names)), 2):
            e = self.matrix[i, j]
            if e.terms:
                out[f"{{{names[i]},{names[j]}}}"] = format_poly(e)
        return out

    def __repr__(self) -> str:
        return f"PoissonStruct({self.name!r}, {self.relations()})"


def _check_varset(pi: PoissonStruct, *polys: Poly):
    for p in polys:
        if p.varset != pi.varset:
            raise ValueError("polynomial and Poisson structure over different VarSets")


def bracket(pi: PoissonStruct, f: Poly, g: Poly) -> Poly:
    """{f, g} = sum_ij df/dx_i * pi_ij * dg/dx_j."""
    _check_varset(pi, f, g)
    n = len(pi.varset)
    df = [(i, d) for i in range(n) if (d := f.diff(i)).terms]
    dg = [(j, d) for j in range(n) if (d := g.diff(j)).terms]
    acc = pi.varset.zero()
    for i, fi in df:
        row = pi.matrix.rows[i]
        inner = pi.varset.zero()
        for j, gj in dg:
            if row[j].terms:
                inner = inner + row[j] * gj
        if inner.terms:
            acc = acc + fi * inner
    return acc


def _pi_derivs(pi: PoissonStruct) -> list[list[list[Poly]]]:
    # d[l][j][k] = d pi_jk / d x_l, computed once per structure
    n = len(pi.varset)
    return [[[pi.matrix.rows[j][k].diff(l) for k in range(n)] for j in range(n)]
            for l in range(n)]


def jacobi_residual(pi: PoissonStruct, i: int, j: int, k: int, _derivs=None) -> Poly:
    """Cyclic sum  sum_l pi_il d_l pi_jk + pi_jl d_l pi_ki + pi_kl d_l pi_ij."""
    n = len(pi.varset)
    for x in (i, j, k):
        if not 0 <= x < n:
            raise IndexError(f"index {x} out of range for {n} variables")
    d = _derivs if _derivs is not None else _pi_derivs(pi)
    rows = pi.matrix.rows
    acc = pi.varset.zero()
    for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
        for l in range(n):
            p = rows[a][l]
            if p.terms:
                q = d[l][b][c]
                if q.terms:
                    acc = acc + p * q
    return acc


def is_poisson(pi: PoissonStruct, system: str = "", n: Optional[int] = None) -> Report:
    """Check the Jacobi identity on every triple i < j < k of coordinates."""
    derivs = _pi_derivs(pi)
    names = pi.varset.names
    failures = []
    count = 0
    for i, j, k in itertools.combinations(range(len(names)), 3):
        count += 1
        r = jacobi_residual(pi, i, j, k, derivs)
        if r.terms:
            failures.append({
                "indices": [i + 1, j + 1, k + 1],
                "variables": [names[i], names[j], names[k]],
                "residual": format_poly(r),
            })
    return Report("jacobi", not failures, system, n, failures,
                  {"bracket": pi.name, "triples": count})


def compatible(pi1: PoissonStruct, pi2: PoissonStruct,
               system: str = "", n: Optional[int] = None) -> Report:
    """pi1 + pi2 is Poisson (mixed Schouten terms vanish when both are)."""
    if pi1.varset != pi2.varset:
        raise ValueError("Poisson structures over different VarSets")
    rep = is_poisson(pi1 + pi2, system, n)
    rep.check = "compat"
    rep.info["brackets"] = [pi1.name, pi2.name]
    return rep


def ham_field(pi: PoissonStruct, H: Poly) -> VectorField:
    _check_varset(pi, H)
    grad = H.gradient()
    comps = []
    for row in pi.matrix.rows:
        acc = pi.varset.zero()
        for p, g in zip(row, grad):
            if p.terms and g.terms:
                acc = acc + p * g
        comps.append(acc)
    return VectorField(pi.varset, comps)


def is_casimir(pi: PoissonStruct, C: Poly) -> bool:
    return ham_field(pi, C).is_zero()


def involution_table(pi: PoissonStruct, fns: Sequence[Poly]) -> list[list[Poly]]:
    k = len(fns)
    z = pi.varset.zero()
    table = [[z] * k for _ in range(k)]
    for a, b in itertools.combinations(range(k), 2):
        v = bracket(pi, fns[a], fns[b])
        table[a][b] = v
        table[b][a] = -v
    return table


# -- exact linear algebra on evaluated matrices --------------------------------

def bareiss_rank(rows: Sequence[Sequence[Rat]]) -> int:
    """Rank by fraction-free elimination (entries scaled to integers first)."""
    mat = []
    for r in rows:
        r = [Fraction(x) for x in r]
        lcm = 1
        for x in r:
            d = x.denominator
            lcm = lcm * d // _gcd(lcm, d)
        mat.append([int(x * lcm) for x in r])
    if not mat:
        return 0
    nrows, ncols = len(mat), len(mat[0])
    rank = 0
    prev = 1
    for col in range(ncols):
        piv = next((r for r in range(rank, nrows) if mat[r][col] != 0), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        p = mat[rank][col]
        for r in range(rank + 1, nrows):
            f = mat[r][col]
            row_r, row_p = mat[r], mat[rank]
            for c in range(col, ncols):
                # exact: Sylvester's identity guarantees divisibility
                row_r[c] = (p * row_r[c] - f * row_p[c]) // prev
        prev = p
        rank += 1
        if rank == nrows:
            break
    return rank


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def nullspace(rows: Sequence[Sequence[Rat]]) -> list[list[Fraction]]:
    """Exact basis of the right kernel via reduced row echelon form."""
    mat = [[Fraction(x) for x in r] for r in rows]
    nrows = len(mat)
    ncols = len(mat[0]) if mat else 0
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if mat[i][c] != 0), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = 1 / mat[r][c]
        mat[r] = [x * inv for x in mat[r]]
        for i in range(nrows):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -mat[i][fc]
        basis.append(v)
    return basis


def rank_at(pi: PoissonStruct, point: Sequence) -> int:
    return bareiss_rank(pi.matrix.eval([as_rat(x) for x in point]))


def random_point(rng: random.Random, dim: int, lo: int = -9, hi: int = 9) -> list[int]:
    """Nonzero small integers, the default sampling for generic-point checks."""
    choices = [v for v in range(lo, hi + 1) if v != 0]
    return [rng.choice(choices) for _ in range(dim)]


def generic_rank(pi: PoissonStruct, samples: int = 5, seed: int = 0) -> dict:
    """Maximum rank over seeded random rational points."""
    rng = random.Random(seed)
    ranks = [rank_at(pi, random_point(rng, len(pi.varset))) for _ in range(samples)]
    return {"max_rank": max(ranks), "ranks": ranks, "samples": samples, "seed": seed}


def kernel_at(pi: PoissonStruct, point: Sequence) -> list[dict[str, str]]:
    """Kernel directions of the evaluated matrix, keyed by variable name."""
    names = pi.varset.names
    vecs = nullspace(pi.matrix.eval([as_rat(x) for x in point]))
    return [{names[i]: str(c) for i, c in enumerate(v) if c != 0} for v in vecs]


def verify_pushforward(pmap: PolyMap, pi_src: PoissonStruct, pi_dst: PoissonStruct,
                       scale=1, system: str = "", n: Optional[int] = None) -> Report:
    """Check {y_i, y_j}_src = scale * (pi_dst_ij o map) for every target pair."""
    if pmap.source != pi_src.varset or pmap.target != pi_dst.varset:
        raise ValueError("map does not connect the given Poisson structures")
    scale = as_rat(scale)
    images = pmap.images
    names = pmap.target.names
    failures = []
    for i, j in itertools.combinations(range(len(names)), 2):
        lhs = bracket(pi_src, images[i], images[j])
        rhs = pmap.pullback(pi_dst.matrix[i, j]) * scale
        diff = lhs - rhs
        if diff.terms:
            failures.append({
                "indices": [i + 1, j + 1],
                "variables": [names[i], names[j]],
                "residual": format_poly(diff),
            })
    return Report("pushforward", not failures, system, n, failures,
                  {"scale": str(scale), "source": pi_src.name, "target": pi_dst.name})
