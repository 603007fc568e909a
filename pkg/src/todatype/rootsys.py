"""Type A_n roots in the defining representation and Lax pairs built from them.

A root is stored as a pair ``(i, j)`` with ``i != j`` meaning eps_i - eps_j
(1-based).  Positive roots have ``i < j``; ``(i, j)`` is then the sum of
simple roots alpha_i + ... + alpha_{j-1}.  The root vector X_{eps_i - eps_j}
is the matrix unit E_ij of size n+1.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .exactalg import Poly, PolyMatrix, VarSet
from .poisson import Report

Root = tuple[int, int]


def simple_root(k: int) -> Root:
    return (k, k + 1)


def root_vector(root: Root, dim: int) -> tuple[int, ...]:
    i, j = root
    v = [0] * dim
    v[i - 1] += 1
    v[j - 1] -= 1
    return tuple(v)


def simple_coords(root: Root) -> dict[int, int]:
    """Coefficients on the simple roots: eps_i - eps_j = sum alpha_k."""
    i, j = root
    if i < j:
        return {k: 1 for k in range(i, j)}
    return {k: -1 for k in range(j, i)}


def root_label(root: Root) -> str:
    i, j = root
    lo, hi = min(i, j), max(i, j) - 1
    body = "+".join(f"alpha{k}" for k in range(lo, hi + 1))
    return body if i < j else f"-({body})"


@dataclass(frozen=True)
class RootSystemA:
    n: int
    positive_roots: tuple[Root, ...]
    simple_roots: tuple[Root, ...]

    @property
    def dim(self) -> int:
        return self.n + 1


def build_roots(n: int) -> RootSystemA:
    if n < 1:
        raise ValueError("rank must be at least 1")
    simple = tuple(simple_root(k) for k in range(1, n + 1))
    positive = tuple((i, j) for length in range(1, n + 1)
                     for i in range(1, n + 2 - length) for j in [i + length])
    return RootSystemA(n, positive, simple)


@dataclass(frozen=True)
class PhiSubset:
    """Ordered subset of positive roots, simple roots first.

    Variable a_k is attached to ``roots[k-1]``.
    """

    rank: int
    roots: tuple[Root, ...]

    def __post_init__(self):
        system = build_roots(self.rank)
        if tuple(self.roots[:self.rank]) != system.simple_roots:
            raise ValueError("Phi must start with the simple roots in index order")
        if len(set(self.roots)) != len(self.roots):
            raise ValueError("Phi contains a repeated root")
        bad = [r for r in self.roots if r not in system.positive_roots]
        if bad:
            raise ValueError(f"not positive roots of A_{self.rank}: {bad}")

    @property
    def dim(self) -> int:
        return self.rank + 1

    def __len__(self) -> int:
        return len(self.roots)

    @classmethod
    def from_roots(cls, rank: int, extra: Sequence[Root]) -> "PhiSubset":
        simple = [simple_root(k) for k in range(1, rank + 1)]
        rest = [r for r in extra if r not in simple]
        return cls(rank, tuple(simple + rest))

    @classmethod
    def preset(cls, rank: int, spec: str) -> "PhiSubset":
        """``simple``, ``all`` or ``simple+length(k)``."""
        system = build_roots(rank)
        if spec == "simple":
            return cls(rank, system.simple_roots)
        if spec == "all":
            return cls.from_roots(rank, system.positive_roots)
        m = re.fullmatch(r"simple\+length\((\d+)\)", spec)
        if m:
            k = int(m.group(1))
            if not 1 <= k <= rank:
                raise ValueError(f"no roots of length {k} in A_{rank}")
            extra = [(i, i + k) for i in range(1, rank + 2 - k)]
            return cls.from_roots(rank, extra)
        raise ValueError(f"unknown Phi preset {spec!r}")

    @classmethod
    def from_pairs(cls, rank: int, pairs: Sequence[tuple[int, int]]) -> "PhiSubset":
        """Pairs ``(i, j)`` meaning alpha_i + ... + alpha_j; simple roots are added."""
        return cls.from_roots(rank, [(i, j + 1) for i, j in pairs])


def lax_varset(phi: PhiSubset, prefix: str = "a") -> VarSet:
    return VarSet(f"{prefix}{k}" for k in range(1, len(phi) + 1))


def _check_vars(phi: PhiSubset, varset: VarSet, variables: Optional[Sequence[Poly]]):
    variables = list(variables) if variables is not None else varset.gens()
    if len(variables) != len(phi):
        raise ValueError(f"{len(variables)} variables for {len(phi)} roots")
    return variables


def build_L(phi: PhiSubset, varset: VarSet, variables: Sequence[Poly] = None) -> PolyMatrix:
    """L = sum_k a_k (X_{alpha_k} + X_{-alpha_k})."""
    variables = _check_vars(phi, varset, variables)
    d = phi.dim
    z = varset.zero()
    rows = [[z] * d for _ in range(d)]
    for (i, j), a in zip(phi.roots, variables):
        rows[i - 1][j - 1] = rows[i - 1][j - 1] + a
        rows[j - 1][i - 1] = rows[j - 1][i - 1] + a
    return PolyMatrix(varset, rows)


def _signed_roots(phi: PhiSubset) -> list[tuple[int, Root]]:
    # signed index s*k (k 1-based) paired with the root vector (i, j)
    out = []
    for k, (i, j) in enumerate(phi.roots, start=1):
        out.append((k, (i, j)))
        out.append((-k, (j, i)))
    return out


def _sum_root(r1: Root, r2: Root) -> Optional[Root]:
    # (eps_a - eps_b) + (eps_c - eps_d) is a root iff b == c or d == a
    a, b = r1
    c, d = r2
    if b == c and a != d:
        return (a, d)
    if d == a and c != b:
        return (c, b)
    return None


def psi_pairs(phi: PhiSubset) -> dict[tuple[int, int], Root]:
    """Unordered pairs of signed roots whose sum is a positive root.

    Keys are sorted signed indices, e.g. ``(1, 2)`` for alpha_1 + alpha_2 and
    ``(-8, 10)`` for -(root 8) + (root 10).
    """
    signed = _signed_roots(phi)
    out = {}
    for x in range(len(signed)):
        for y in range(x + 1, len(signed)):
            (s1, r1), (s2, r2) = signed[x], signed[y]
            if abs(s1) == abs(s2):
                continue
            total = _sum_root(r1, r2)
            if total is not None and total[0] < total[1]:
                out[tuple(sorted((s1, s2)))] = total
    return out


def build_Psi(phi: PhiSubset) -> list[Root]:
    return sorted(set(psi_pairs(phi).values()), key=lambda r: (r[1] - r[0], r[0]))


def default_signs(phi: PhiSubset) -> dict[tuple[int, int], int]:
    """+1 for a pair of positive roots, -1 when one of the two is negative.

    This is the structure constant of [X_beta, X_gamma] with any negative root
    written first; it reproduces the B matrices of the Volterra-type Lax pairs
    (both positive: a_i a_j [X_ai, X_aj] with coefficient +1).
    """
    return {key: (1 if key[0] > 0 else -1) for key in psi_pairs(phi)}


def build_B(phi: PhiSubset, varset: VarSet,
            signs: Optional[Mapping[tuple[int, int], int]] = None,
            variables: Sequence[Poly] = None) -> PolyMatrix:
    """B = sum c_ij a_i a_j (X_{alpha_i+alpha_j} - X_{-alpha_i-alpha_j})."""
    variables = _check_vars(phi, varset, variables)
    pairs = psi_pairs(phi)
    if signs is None:
        signs = default_signs(phi)
    d = phi.dim
    z = varset.zero()
    rows = [[z] * d for _ in range(d)]
    for key, c in signs.items():
        norm = tuple(sorted(key))
        if norm not in pairs:
            raise ValueError(f"sign given for {key}, whose sum is not in Psi")
        if c not in (-1, 0, 1):
            raise ValueError(f"sign for {key} must be -1, 0 or 1")
        if not c:
            continue
        p, q = pairs[norm]
        term = variables[abs(norm[0]) - 1] * variables[abs(norm[1]) - 1] * c
        rows[p - 1][q - 1] = rows[p - 1][q - 1] + term
        rows[q - 1][p - 1] = rows[q - 1][p - 1] - term
    return PolyMatrix(varset, rows)


def closure_check(L: PolyMatrix, B: PolyMatrix, system: str = "") -> Report:
    """[B, L] must vanish wherever L is structurally zero."""
    if L.shape != B.shape or L.varset != B.varset:
        raise ValueError("L and B must have equal shape and VarSet")
    C = B.commutator(L)
    failures = []
    n = L.shape[0]
    for r in range(n):
        for c in range(n):
            if L[r, c].is_zero() and not C[r, c].is_zero():
                failures.append({"indices": [r + 1, c + 1], "residual": str(C[r, c])})
    return Report("closure", not failures, system, None, failures)
