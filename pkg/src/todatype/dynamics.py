"""Numeric integration of catalog systems with drift monitoring."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Optional, Sequence, TextIO

import numpy as np
from scipy.integrate import solve_ivp

from .exactalg import Poly, PolyMatrix
from .systems import SystemSpec, km_trace_powers, trace_powers

METHODS = ("rk4", "dopri")


class BlowupError(FloatingPointError):
    """A non-finite state appeared; ``last_time`` is the last finite sample."""

    def __init__(self, last_time: float, message: str = ""):
        super().__init__(message or f"non-finite state after t = {last_time}")
        self.last_time = last_time


class CompiledPolys:
    """A list of polynomials evaluated together as one numpy expression."""

    def __init__(self, polys: Sequence[Poly]):
        polys = list(polys)
        self.count = len(polys)
        dim = len(polys[0].varset) if polys else 0
        exps, coefs, owner = [], [], []
        for k, p in enumerate(polys):
            for mono, c in p.terms.items():
                exps.append(mono)
                coefs.append(float(c))
                owner.append(k)
        self.exps = np.array(exps, dtype=float).reshape(len(exps), dim)
        self.coefs = np.array(coefs)
        self.owner = np.array(owner, dtype=int)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        monos = np.prod(np.power(x, self.exps), axis=1) if self.exps.size else np.ones(len(self.coefs))
        out = np.zeros(self.count)
        np.add.at(out, self.owner, self.coefs * monos)
        return out


class CompiledMatrix:
    def __init__(self, M: PolyMatrix):
        self.shape = M.shape
        self._entries = CompiledPolys([M[r, c] for r in range(M.shape[0]) for c in range(M.shape[1])])

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self._entries(x).reshape(self.shape)


@dataclass
class Trajectory:
    varnames: list
    times: np.ndarray
    states: np.ndarray
    invariants_log: np.ndarray
    eig_log: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.times)


def invariants_of(sys: SystemSpec, kmax: Optional[int] = None) -> list[Poly]:
    """tr L^k for k = 1..kmax, expressed in the system's own variables."""
    lax_sys = sys.lax_system
    if lax_sys is None:
        return list(sys.hamiltonians.values())
    kmax = kmax or lax_sys.lax.dim
    if lax_sys is sys:
        return trace_powers(sys, kmax)
    return km_trace_powers(sys, kmax)


class _Monitor:
    def __init__(self, sys: SystemSpec, kmax: Optional[int]):
        self.H = CompiledPolys(invariants_of(sys, kmax))
        self.L = CompiledMatrix(sys.lax.L) if sys.lax is not None else None

    def invariants(self, x):
        return self.H(x)

    def eigs(self, x):
        M = self.L(x)
        if not np.allclose(M, M.T):
            raise AssertionError("evaluated L is not symmetric")
        return np.linalg.eigvalsh(M)


def _rk4(f, x0, t_end, dt):
    steps = int(round(t_end / dt))
    if steps and not np.isclose(steps * dt, t_end, rtol=1e-12, atol=0.0):
        raise ValueError("t_end must be a multiple of dt for rk4")
    times = np.arange(steps + 1) * dt
    xs = np.empty((steps + 1, x0.size))
    xs[0] = x = x0
    for s in range(steps):
        k1 = f(x)
        k2 = f(x + 0.5 * dt * k1)
        k3 = f(x + 0.5 * dt * k2)
        k4 = f(x + dt * k3)
        x = x + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(x)):
            raise BlowupError(float(times[s]))
        xs[s + 1] = x
    return times, xs


def _dopri(f, x0, t_end, dt, tol):
    grid = np.linspace(0.0, t_end, int(round(t_end / dt)) + 1)
    with np.errstate(over="ignore", invalid="ignore"):
        sol = solve_ivp(lambda t, x: f(x), (0.0, t_end), x0, method="RK45",
                        t_eval=grid, rtol=tol, atol=tol)
    xs = sol.y.T
    finite = np.all(np.isfinite(xs), axis=1)
    if not sol.success or not finite.all():
        good = grid[: len(xs)][finite]
        raise BlowupError(float(good[-1]) if good.size else 0.0, sol.message)
    return sol.t, xs


def integrate(sys: SystemSpec, x0: Sequence[float], t_end: float, dt: float,
              method: str = "rk4", stride: int = 1, tol: float = 1e-10,
              kmax: Optional[int] = None) -> Trajectory:
    """Integrate the field of ``sys`` on [0, t_end].

    ``t_end = 0`` yields the single initial sample.  Every ``stride``-th
    step is kept (the final step always is).
    """
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (len(sys.varset),):
        raise ValueError(f"x0 needs {len(sys.varset)} entries")
    if not np.all(np.isfinite(x0)):
        raise ValueError("x0 must be finite")
    if dt <= 0 or t_end < 0:
        raise ValueError("need dt > 0 and t_end >= 0")
    if stride < 1:
        raise ValueError("stride must be positive")
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}")
    rhs = CompiledPolys(list(sys.field.components))
    if t_end == 0:
        times, xs = np.zeros(1), x0[None, :]
    elif method == "rk4":
        with np.errstate(over="ignore", invalid="ignore"):
            times, xs = _rk4(rhs, x0, t_end, dt)
    else:
        times, xs = _dopri(rhs, x0, t_end, dt, tol)
    keep = np.arange(0, len(times), stride)
    if keep[-1] != len(times) - 1:
        keep = np.append(keep, len(times) - 1)
    times, xs = times[keep], xs[keep]
    mon = _Monitor(sys, kmax)
    inv = np.array([mon.invariants(x) for x in xs])
    eig = np.array([mon.eigs(x) for x in xs]) if mon.L is not None else None
    return Trajectory(list(sys.varset.names), times, xs, inv, eig,
                      {"system": sys.id, "method": method, "dt": dt, "t_end": t_end,
                       "stride": stride})


def monitor(traj: Trajectory) -> dict:
    """Largest drift of each invariant and each sorted eigenvalue.

    Drift is |v(t) - v(0)| / max(1, |v(0)|), maximised over the trajectory.
    """
    def drift(log):
        ref = log[0]
        return np.max(np.abs(log - ref) / np.maximum(1.0, np.abs(ref)), axis=0)

    out = {"H": [float(v) for v in drift(traj.invariants_log)]}
    if traj.eig_log is not None:
        out["eig"] = [float(v) for v in drift(traj.eig_log)]
    vals = out["H"] + out.get("eig", [])
    out["max"] = max(vals) if vals else 0.0
    return out


def default_x0(sys: SystemSpec, spec: str = "default") -> np.ndarray:
    """Initial state presets: ``default`` (b = 0, a = 1/2), ``ones``, or a comma list."""
    names = sys.varset.names
    if spec == "default":
        return np.array([0.0 if v.startswith("b") else 0.5 for v in names])
    if spec == "ones":
        return np.ones(len(names))
    vals = [float(t) for t in spec.split(",")]
    if len(vals) != len(names):
        raise ValueError(f"x0 needs {len(names)} values, got {len(vals)}")
    return np.array(vals)


def write_csv(traj: Trajectory, fh: TextIO) -> None:
    w = csv.writer(fh, lineterminator="\n")
    header = ["t", *traj.varnames]
    header += [f"H{k}" for k in range(1, traj.invariants_log.shape[1] + 1)]
    if traj.eig_log is not None:
        header += [f"eig{k}" for k in range(1, traj.eig_log.shape[1] + 1)]
    w.writerow(header)
    for i, t in enumerate(traj.times):
        row = [t, *traj.states[i], *traj.invariants_log[i]]
        if traj.eig_log is not None:
            row += list(traj.eig_log[i])
        w.writerow([repr(float(v)) for v in row])
