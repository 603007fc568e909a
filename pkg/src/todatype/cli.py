"""Command-line front end: ``todatype list|show|verify|simulate|reduce|report``.

Exit codes: 0 pass, 1 check failure, 2 usage error, 3 numeric blowup.
"""
from __future__ import annotations

import argparse
import json
import sys as _sys
from pathlib import Path
from typing import Callable, Optional

from .exactalg import PolyMatrix, VarSet, format_poly
from .poisson import (SCHEMA_VERSION, Report, compatible, generic_rank, ham_field,
                      involution_table, is_casimir, is_poisson, verify_pushforward)
from .systems import (BUILDERS, SystemSpec, conservation_report, degeneration_report,
                      get_system, parse_system_id, verify_lax)
from . import dynamics, mastercheck, transforms

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BLOWUP = 0, 1, 2, 3

CHECKS = ("jacobi", "compat", "hamfield", "casimir", "involution", "lax", "rank",
          "pushforward", "conjugacy", "master", "degeneration")

CATALOG = ("toda:4", "km:5", "glv:5", "glv:9", "toda_type:5")

SIM_DEFAULTS = {"t": 10.0, "dt": 1e-3, "method": "rk4", "stride": 1, "x0": "default",
                "out": None, "summary": None, "max_drift": 1e-8, "kmax": None}


class UsageError(Exception):
    pass


def _skip(check: str, sys: SystemSpec, reason: str) -> Report:
    return Report(check, True, sys.name, sys.n, [], {"skipped": reason})


# -- individual checks ---------------------------------------------------------------

def check_jacobi(sys, seed):
    reps = [is_poisson(pi, sys.name, sys.n) for pi in sys.brackets.values()]
    return _merge("jacobi", sys, reps, list(sys.brackets))


def check_compat(sys, seed):
    if len(sys.brackets) < 2:
        return _skip("compat", sys, "system carries a single bracket")
    pis = list(sys.brackets.values())
    return compatible(pis[0], pis[1], sys.name, sys.n)


def check_hamfield(sys, seed):
    failures = []
    for br, hname in sys.pairings:
        got = ham_field(sys.brackets[br], sys.hamiltonians[hname])
        diff = got - sys.field
        for v, p in zip(sys.varset.names, diff.components):
            if p.terms:
                failures.append({"indices": [br, hname, v], "residual": format_poly(p)})
    return Report("hamfield", not failures, sys.name, sys.n, failures,
                  {"pairings": [list(p) for p in sys.pairings]})


def check_casimir(sys, seed):
    if not sys.casimirs:
        return _skip("casimir", sys, "no Casimirs registered")
    failures, table = [], []
    for br, label, C in sys.casimirs:
        ok = is_casimir(sys.brackets[br], C)
        table.append({"bracket": br, "name": label, "ok": ok})
        if not ok:
            failures.append({"indices": [br, label], "residual": "nonzero Hamiltonian field"})
    return Report("casimir", not failures, sys.name, sys.n, failures, {"table": table})


def check_involution(sys, seed):
    Hs = dynamics.invariants_of(sys)
    failures = []
    for br, pi in sys.brackets.items():
        table = involution_table(pi, Hs)
        for i, row in enumerate(table):
            for j, p in enumerate(row):
                if i < j and p.terms:
                    failures.append({"indices": [br, i + 1, j + 1], "residual": format_poly(p)})
    return Report("involution", not failures, sys.name, sys.n, failures,
                  {"functions": [f"tr L^{k}" for k in range(1, len(Hs) + 1)]})


def check_lax(sys, seed):
    lax_sys = sys.lax_system
    if lax_sys is None:
        return _skip("lax", sys, "no Lax pair")
    lax = verify_lax(lax_sys)
    cons = conservation_report(sys)
    rep = _merge("lax", sys, [lax, cons], ["lax_equation", "conservation"])
    rep.info["kmax"] = cons.info["kmax"]
    return rep


def _expected_rank(sys):
    return 2 * sys.n if sys.name == "toda_type" else None


def check_rank(sys, seed):
    table = {}
    failures = []
    expected = _expected_rank(sys)
    for br, pi in sys.brackets.items():
        info = generic_rank(pi, samples=5, seed=seed)
        info["dim"] = len(sys.varset)
        if expected is not None:
            info["expected"] = expected
            info["summary"] = f"{info['max_rank']}/{expected}"
            if info["max_rank"] != expected:
                failures.append({"indices": [br], "residual": info["summary"]})
        table[br] = info
    return Report("rank", not failures, sys.name, sys.n, failures, {"brackets": table})


def _moser_source(sys):
    """(glv system, m) for the Moser pair containing ``sys``, or None."""
    if sys.name == "toda_type":
        return get_system(f"glv:{2 * sys.n - 1}"), sys.n
    if sys.name == "glv" and sys.n % 2 == 1 and sys.n >= 9:
        return sys, (sys.n + 1) // 2
    return None


def check_pushforward(sys, seed):
    if sys.name == "toda":
        info = transforms.flaschka_pullback_check(sys.n, points=20, scale=4.0, seed=seed)
        ok = info["max_abs_error"] < 1e-12
        return Report("pushforward", ok, sys.name, sys.n,
                      [] if ok else [{"indices": ["flaschka"], "residual": str(info["max_abs_error"])}],
                      {"flaschka": info})
    pair = _moser_source(sys)
    if pair is None:
        return _skip("pushforward", sys, "no Poisson map registered")
    glv, m = pair
    dst = get_system(f"toda_type:{m}")
    rep = verify_pushforward(transforms.moser_map(m, glv), glv.brackets["pi"],
                             dst.brackets["pi1"], 2, sys.name, sys.n)
    rep.info.update({"map": f"{glv.id} -> {dst.id}"})
    return rep


def check_conjugacy(sys, seed):
    if sys.name == "km":
        henon = transforms.henon_squared_check(sys.n, sys)
        a_form = sys.related["a_form"]
        pmap = transforms.km_moser_map(sys.n)
        moser = transforms.conjugacy_check(pmap, a_form, get_system(f"toda:{len(pmap.target.names) // 2 + 1}"),
                                           sys.name, sys.n)
        return _merge("conjugacy", sys, [henon, moser], ["henon_squared", "moser"])
    pair = _moser_source(sys)
    if pair is None:
        return _skip("conjugacy", sys, "no conjugating map registered")
    glv, m = pair
    dst = get_system(f"toda_type:{m}")
    rep = transforms.conjugacy_check(transforms.moser_map(m, glv), glv, dst, sys.name, sys.n)
    rep.info["map"] = f"{glv.id} -> {dst.id}"
    return rep


def check_master(sys, seed):
    if sys.id != "toda_type:5":
        return _skip("master", sys, "master symmetry is encoded for toda_type:5 only")
    return mastercheck.master_report(samples=100, seed=seed)


def check_degeneration(sys, seed):
    if sys.name != "toda_type":
        return _skip("degeneration", sys, "defined for the Toda-type family")
    return degeneration_report(sys)


CHECK_FUNCS: dict[str, Callable[[SystemSpec, int], Report]] = {
    "jacobi": check_jacobi, "compat": check_compat, "hamfield": check_hamfield,
    "casimir": check_casimir, "involution": check_involution, "lax": check_lax,
    "rank": check_rank, "pushforward": check_pushforward, "conjugacy": check_conjugacy,
    "master": check_master, "degeneration": check_degeneration,
}


def _merge(check, sys, reports, labels) -> Report:
    failures = []
    parts = {}
    for lab, r in zip(labels, reports):
        parts[lab] = r.ok
        failures += [{**f, "part": lab} for f in r.failures]
    return Report(check, all(r.ok for r in reports), sys.name, sys.n, failures, {"parts": parts})


# -- config ---------------------------------------------------------------------------------

def _load_config(path: Optional[str]) -> dict:
    if not path:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    return cfg


def _setting(args, cfg, key, default=None):
    val = getattr(args, key, None)
    if val is not None:
        return val
    return cfg.get(key, default)


def _system(text) -> SystemSpec:
    try:
        parse_system_id(text)
        return get_system(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _parse_checks(raw) -> list[str]:
    if raw is None:
        return list(CHECKS)
    items = raw if isinstance(raw, list) else [c.strip() for c in str(raw).split(",") if c.strip()]
    bad = [c for c in items if c not in CHECKS]
    if bad:
        raise UsageError(f"unknown checks {bad}; choose from {', '.join(CHECKS)}")
    return items


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False)


def _write(path: Optional[str], text: str) -> None:
    if path:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text)


# -- commands ----------------------------------------------------------------------------------

def run_checks(sys: SystemSpec, checks, seed: int) -> dict:
    results = [CHECK_FUNCS[c](sys, seed).to_dict() for c in checks]
    return {"schema": SCHEMA_VERSION, "system": sys.id, "seed": seed,
            "ok": all(r["ok"] for r in results), "checks": results}


def _human(report: dict) -> str:
    lines = []
    for r in report["checks"]:
        info = r.get("info", {})
        status = "skip" if "skipped" in info else ("PASS" if r["ok"] else "FAIL")
        extra = ""
        if r["check"] == "rank":
            extra = "  " + ", ".join(f"{k}: {v.get('summary', v['max_rank'])}"
                                     for k, v in info["brackets"].items())
        if r["check"] == "master" and "table" in info:
            extra = "  " + "; ".join(
                f"i={row['i']} {row['trace']['verdict']}"
                + (f" c={row['trace']['constant']}" if "constant" in row["trace"] else "")
                for row in info["table"])
        lines.append(f"{r['check']:<13}{status}{extra}")
    return "\n".join(lines)


def cmd_list(args, cfg) -> int:
    for name in BUILDERS:
        print(f"{name}:<n>")
    return EXIT_OK


def cmd_show(args, cfg) -> int:
    sys = _system(_setting(args, cfg, "system"))
    print(_dump({"schema": SCHEMA_VERSION, **sys.describe()}))
    return EXIT_OK


def cmd_verify(args, cfg) -> int:
    sys = _system(_setting(args, cfg, "system"))
    checks = _parse_checks(_setting(args, cfg, "checks"))
    seed = int(_setting(args, cfg, "seed", 0))
    report = run_checks(sys, checks, seed)
    text = _dump(report)
    out = _setting(args, cfg, "out")
    _write(out, text + "\n")
    if getattr(args, "json", False) or not out:
        print(text)
    print(_human(report), file=_sys.stderr)
    return EXIT_OK if report["ok"] else EXIT_FAIL


def cmd_simulate(args, cfg) -> int:
    sys = _system(_setting(args, cfg, "system"))
    p = {k: _setting(args, cfg, k, v) for k, v in SIM_DEFAULTS.items()}
    if float(p["dt"]) <= 0 or float(p["t"]) < 0:
        raise UsageError("need dt > 0 and t >= 0")
    if p["method"] not in dynamics.METHODS:
        raise UsageError(f"method must be one of {dynamics.METHODS}")
    try:
        x0 = dynamics.default_x0(sys, str(p["x0"]))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    summary = {"schema": SCHEMA_VERSION, "system": sys.id, "method": p["method"],
               "t_end": float(p["t"]), "dt": float(p["dt"]), "stride": int(p["stride"])}
    try:
        traj = dynamics.integrate(sys, x0, float(p["t"]), float(p["dt"]), p["method"],
                                  stride=int(p["stride"]), kmax=p["kmax"])
    except dynamics.BlowupError as exc:
        summary.update({"ok": False, "blowup": True, "last_valid_time": exc.last_time})
        _write(p["summary"], _dump(summary) + "\n")
        print(_dump(summary))
        return EXIT_BLOWUP
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    drift = dynamics.monitor(traj)
    ok = drift["max"] < float(p["max_drift"])
    summary.update({"ok": ok, "rows": len(traj), "drift": drift,
                    "max_drift_allowed": float(p["max_drift"])})
    if p["out"]:
        Path(p["out"]).parent.mkdir(parents=True, exist_ok=True)
        with open(p["out"], "w", newline="") as fh:
            dynamics.write_csv(traj, fh)
    _write(p["summary"], _dump(summary) + "\n")
    print(_dump(summary))
    return EXIT_OK if ok else EXIT_FAIL


def generic_pattern(R: PolyMatrix) -> PolyMatrix:
    """Symmetric pattern of single variables covering the nonzero entries of ``R``.

    Diagonal entries are b_i, the first off-diagonal a_1..a_{d-1}, and any
    further nonzero upper entries continue the a-numbering by diagonal.
    """
    d = R.shape[0]
    slots = [(r, r + k) for k in range(1, d) for r in range(d - k)
             if k == 1 or not R[r, r + k].is_zero()]
    vs = VarSet([f"b{i}" for i in range(1, d + 1)] + [f"a{k}" for k in range(1, len(slots) + 1)])
    rows = [[vs.zero()] * d for _ in range(d)]
    for i in range(d):
        rows[i][i] = vs.var(f"b{i + 1}")
    for k, (r, c) in enumerate(slots, start=1):
        rows[r][c] = rows[c][r] = vs.var(f"a{k}")
    return PolyMatrix(vs, rows)


def cmd_reduce(args, cfg) -> int:
    sys = _system(_setting(args, cfg, "source"))
    out = {"schema": SCHEMA_VERSION, "source": sys.id}
    if sys.name == "km":
        a_form = sys.related["a_form"]
        R = transforms.moser_reduce(a_form.lax.L)
        pmap = transforms.km_moser_map(sys.n)
        target = get_system(f"toda:{R.shape[0]}")
        conj = transforms.conjugacy_check(pmap, a_form, target, "km", sys.n)
        out.update({"lax_source": a_form.id, "target": target.id})
    elif sys.name == "glv":
        R = transforms.moser_reduce(sys.lax.L)
        pair = _moser_source(sys)
        if pair is not None:
            pmap = transforms.moser_map(pair[1], sys)
            target = get_system(f"toda_type:{pair[1]}")
            conj = transforms.conjugacy_check(pmap, sys, target, "glv", sys.n)
            out["target"] = target.id
        else:
            pmap = transforms._read_off(R, generic_pattern(R), sys.varset)
            conj = None
            out["target"] = None
    else:
        raise UsageError(f"reduction is defined for km and glv sources, not {sys.name}")
    out["reduced"] = R.to_text()
    out["map"] = pmap.as_dict()
    out["conjugacy"] = conj.to_dict() if conj is not None else {"skipped": "no catalog target"}
    print(_dump(out))
    return EXIT_OK if conj is None or conj.ok else EXIT_FAIL


def cmd_report(args, cfg) -> int:
    outdir = _setting(args, cfg, "out")
    if not outdir:
        raise UsageError("report needs --out DIR")
    seed = int(_setting(args, cfg, "seed", 0))
    systems = _setting(args, cfg, "systems") or list(CATALOG)
    if isinstance(systems, str):
        systems = [s.strip() for s in systems.split(",")]
    index = {"schema": SCHEMA_VERSION, "seed": seed, "systems": {}}
    for sid in systems:
        rep = run_checks(_system(sid), list(CHECKS), seed)
        _write(str(Path(outdir) / f"{sid.replace(':', '_')}.json"), _dump(rep) + "\n")
        index["systems"][sid] = rep["ok"]
        print(f"{sid:<14}{'PASS' if rep['ok'] else 'FAIL'}")
    index["ok"] = all(index["systems"].values())
    _write(str(Path(outdir) / "index.json"), _dump(index) + "\n")
    return EXIT_OK if index["ok"] else EXIT_FAIL


# -- parser ---------------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="todatype", description=__doc__.splitlines()[0])
    ap.add_argument("--config", help="JSON file whose keys mirror the flags")
    sub = ap.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="list system families")
    p = sub.add_parser("show", help="print a system as JSON")
    p.add_argument("system")

    p = sub.add_parser("verify", help="run exact checks")
    p.add_argument("system", nargs="?")
    p.add_argument("--checks", help=f"comma list from {','.join(CHECKS)}")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="write the JSON report here")
    p.add_argument("--json", action="store_true", help="also print JSON when --out is set")

    p = sub.add_parser("simulate", help="integrate and monitor drift")
    p.add_argument("system", nargs="?")
    p.add_argument("--t", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--method", choices=dynamics.METHODS)
    p.add_argument("--stride", type=int)
    p.add_argument("--x0", help="default, ones, or comma-separated values")
    p.add_argument("--kmax", type=int)
    p.add_argument("--max-drift", dest="max_drift", type=float)
    p.add_argument("--out", help="CSV path")
    p.add_argument("--summary", help="JSON summary path")

    p = sub.add_parser("reduce", help="Moser L^2 reduction")
    p.add_argument("--from", dest="source")

    p = sub.add_parser("report", help="run every check on the catalog")
    p.add_argument("--all", action="store_true")
    p.add_argument("--systems", help="comma list overriding the default catalog")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    return ap


COMMANDS = {"list": cmd_list, "show": cmd_show, "verify": cmd_verify,
            "simulate": cmd_simulate, "reduce": cmd_reduce, "report": cmd_report}


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = _load_config(args.config)
        for key in ("system", "source"):
            if hasattr(args, key) and _setting(args, cfg, key) is None:
                raise UsageError(f"{args.command} needs a system id")
        return COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
