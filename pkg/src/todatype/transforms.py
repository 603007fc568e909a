"""Maps between the lattices: Flaschka, Henon (squared) and Moser's L^2 reduction."""
from __future__ import annotations

from typing import Optional

import numpy as np

from .exactalg import Poly, PolyMap, PolyMatrix, VarSet, format_poly
from .poisson import Report, VectorField
from .systems import SystemSpec, get_system, make_km

__all__ = [
    "PolyMap", "flaschka", "flaschka_jacobian", "flaschka_pullback_check",
    "henon_squared_check", "moser_reduce", "moser_map", "km_moser_map",
    "conjugacy_check", "squared_toda_field",
]


# -- Flaschka ------------------------------------------------------------------

def flaschka(q: np.ndarray, p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(q, p) -> (a, b) with a_i = exp((q_i - q_{i+1})/2) / 2, b_i = -p_i / 2."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    a = 0.5 * np.exp(0.5 * (q[:-1] - q[1:]))
    b = -0.5 * p
    return a, b


def flaschka_jacobian(q: np.ndarray, p: np.ndarray) -> np.ndarray:
    """d(b, a)/d(q, p), rows ordered b_1..b_n, a_1..a_{n-1} like the Toda VarSet."""
    q = np.asarray(q, dtype=float)
    n = q.size
    a, _ = flaschka(q, p)
    J = np.zeros((2 * n - 1, 2 * n))
    for i in range(n):
        J[i, n + i] = -0.5
    for i in range(n - 1):
        J[n + i, i] = 0.5 * a[i]
        J[n + i, i + 1] = -0.5 * a[i]
    return J


def flaschka_pullback_check(n: int, points: int = 20, scale: float = 0.25,
                            seed: int = 0) -> dict:
    """Compare {f,g} o F with scale * {f o F, g o F}_s on coordinate pairs.

    The left side uses the linear Toda bracket pi1; the right side the
    canonical bracket in (q, p).  Returns the largest absolute error.
    """
    sys = get_system(f"toda:{n}")
    pi = sys.brackets["pi1"]
    rng = np.random.default_rng(seed)
    omega = np.block([[np.zeros((n, n)), np.eye(n)], [-np.eye(n), np.zeros((n, n))]])
    worst = 0.0
    for _ in range(points):
        q = rng.uniform(-1.0, 1.0, n)
        p = rng.uniform(-1.0, 1.0, n)
        a, b = flaschka(q, p)
        state = np.concatenate([b, a])
        J = flaschka_jacobian(q, p)
        rhs = scale * (J @ omega @ J.T)
        lhs = np.array([[e.eval_float(state) for e in row] for row in pi.matrix.rows])
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return {"n": n, "points": points, "scale": scale, "max_abs_error": worst}


# -- conjugacy ------------------------------------------------------------------

def conjugacy_check(pmap: PolyMap, src: SystemSpec, dst_field: VectorField,
                    system: str = "", n: Optional[int] = None) -> Report:
    """For each target variable v: src.field(map_v) == dst.field_v o map."""
    if isinstance(dst_field, SystemSpec):
        dst_field = dst_field.field
    if pmap.source != src.varset or pmap.target != dst_field.varset:
        raise ValueError("map does not connect the given systems")
    failures = []
    for name, img in zip(pmap.target.names, pmap.images):
        lhs = src.field.apply(img)
        rhs = pmap.pullback(dst_field[name])
        diff = lhs - rhs
        if diff.terms:
            failures.append({"indices": [name], "residual": format_poly(diff)})
    return Report("conjugacy", not failures, system or src.name, n or src.n, failures)


# -- Henon, squared -------------------------------------------------------------

def squared_toda_field(m: int) -> VectorField:
    """Toda lattice in (B_i, S_i = A_i^2): B_i' = 2(S_i - S_{i-1}), S_i' = 2 S_i (B_{i+1} - B_i)."""
    vs = VarSet([f"B{i}" for i in range(1, m + 1)] + [f"S{i}" for i in range(1, m)])
    B = {i: vs.var(f"B{i}") for i in range(1, m + 1)}
    S = {i: vs.var(f"S{i}") for i in range(1, m)}
    z = vs.zero()
    comps = {f"B{i}": 2 * (S.get(i, z) - S.get(i - 1, z)) for i in range(1, m + 1)}
    comps.update({f"S{i}": 2 * S[i] * (B[i + 1] - B[i]) for i in range(1, m)})
    return VectorField.from_dict(vs, comps)


def henon_squared_check(n: int, km: Optional[SystemSpec] = None) -> Report:
    """KM lattice -> Toda with B_i = (x_{2i-1} + x_{2i-2})/2, A_i^2 = x_{2i} x_{2i-1}/4.

    Squaring A_i removes the radical, so the statement is a polynomial
    identity in the KM variables (x_j = 0 outside 1..n).
    """
    km = km if km is not None else make_km(n)
    if km.name != "km" or km.n != n:
        raise ValueError(f"expected the KM system with n = {n}")
    m = n // 2 + 1
    target = squared_toda_field(m)
    z = km.varset.zero()
    x = lambda j: km.var(f"x{j}") if 1 <= j <= n else z  # noqa: E731
    images = [(x(2 * i - 1) + x(2 * i - 2)) / 2 for i in range(1, m + 1)]
    images += [x(2 * i) * x(2 * i - 1) / 4 for i in range(1, m)]
    pmap = PolyMap(km.varset, target.varset, images)
    rep = conjugacy_check(pmap, km, target, "henon", n)
    rep.info["toda_size"] = m
    rep.info["map"] = pmap.as_dict()
    return rep


# -- Moser reduction --------------------------------------------------------------

def moser_reduce(L: PolyMatrix) -> PolyMatrix:
    """L^2 with even-numbered (1-based) rows and columns removed."""
    n, m = L.shape
    if n != m:
        raise ValueError("Moser reduction needs a square matrix")
    keep = list(range(0, n, 2))
    return (L @ L).submatrix(keep, keep)


def _read_off(R: PolyMatrix, target_L: PolyMatrix, source: VarSet) -> PolyMap:
    """Match a reduced matrix against a Lax matrix pattern of single variables.

    Every entry of ``target_L`` must be zero or one target variable; the
    image of that variable is the corresponding entry of ``R``.  Entries
    where the pattern is zero must vanish in ``R``.
    """
    if R.shape != target_L.shape:
        raise ValueError(f"reduced shape {R.shape} does not match {target_L.shape}")
    target = target_L.varset
    images: dict[str, Poly] = {}
    d = R.shape[0]
    for r in range(d):
        for c in range(d):
            pat = target_L[r, c]
            if pat.is_zero():
                if not R[r, c].is_zero():
                    raise ValueError(f"reduced entry ({r + 1},{c + 1}) outside the pattern")
                continue
            names = pat.variables()
            if len(names) != 1 or pat != target.var(names[0]):
                raise ValueError("target Lax entries must be single variables")
            name = names[0]
            if name in images and images[name] != R[r, c]:
                raise ValueError(f"inconsistent images for {name}")
            images[name] = R[r, c]
    missing = [v for v in target.names if v not in images]
    if missing:
        raise ValueError(f"no image for {missing}")
    return PolyMap(source, target, [images[v] for v in target.names])


def moser_map(m: int, glv: Optional[SystemSpec] = None) -> PolyMap:
    """glv lattice of size 2m-1 -> Toda-type lattice of size m.

    Read entry by entry off the reduced matrix of the glv Lax matrix.
    """
    if m < 5:
        raise ValueError("the Toda-type family starts at n = 5")
    glv = glv if glv is not None else get_system(f"glv:{2 * m - 1}")
    dst = get_system(f"toda_type:{m}")
    return _read_off(moser_reduce(glv.lax.L), dst.lax.L, glv.varset)


def km_moser_map(n: int) -> PolyMap:
    """KM a-form on a_1..a_n -> classical Toda of size ceil((n+1)/2)."""
    a_form = make_km(n).related["a_form"]
    R = moser_reduce(a_form.lax.L)
    m = R.shape[0]
    dst = get_system(f"toda:{m}")
    return _read_off(R, dst.lax.L, a_form.varset)
