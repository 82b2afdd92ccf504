"""Command-line interface.

Every command prints a JSON report {command, inputs, results, verdicts, timings,
version} on stdout and a one-line human summary on stderr.  Exit codes: 0 on
success, 1 when a design verdict is negative, 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__

EXIT_OK, EXIT_NOT_DESIGN, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _threads(args) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("UDESIGN_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"UDESIGN_THREADS must be an integer, got {env!r}")
    return 1


def _design(name: str):
    from .catalog import DesignFileError, resolve_design

    try:
        return resolve_design(name)
    except FileNotFoundError:
        raise UsageError(f"no such design or file: {name}")
    except DesignFileError as exc:
        raise UsageError(str(exc))


def _report(args, inputs: dict, results: dict, verdicts: dict, timings: dict) -> dict:
    return {
        "command": args.command + (f" {args.sub}" if getattr(args, "sub", None) else ""),
        "inputs": inputs,
        "results": results,
        "verdicts": verdicts,
        "timings": timings if args.timings else {},
        "version": __version__,
    }


# -- commands ------------------------------------------------------------------


def cmd_potential(args):
    from .designs import frame_potential, frame_potential_group, target_potential

    rec = _design(args.design)
    if rec.streamed or args.group:
        value = frame_potential_group(rec.ensemble, args.t)
    else:
        value = frame_potential(rec.ensemble, args.t)
    target = float(target_potential(args.t, rec.d))
    res = {"name": rec.name, "d": rec.d, "K": rec.K, "t": args.t, "value": value, "target": target, "gap": value - target}
    return {"design": args.design, "t": args.t}, res, {}, f"P_{args.t}({rec.name}) = {value:.12g} (target {target:g})"


def cmd_verify(args):
    from .designs import is_design

    rec = _design(args.design)
    rep = is_design(rec.ensemble, args.t, args.tol)
    out = rep.to_json()
    verdict = {"design": rep.verdict}
    if rep.below_target:
        verdict["numerical_fault"] = True
    word = "is" if rep.verdict else "is NOT"
    return {"design": args.design, "t": args.t, "tol": args.tol}, out, verdict, f"{rec.name} {word} a {args.t}-design (gap {rep.gap:.3e})"


def cmd_mub(args):
    from .mub import classify_entanglement, mub_family

    try:
        fam = mub_family(args.q)
    except ValueError as exc:
        raise UsageError(str(exc))
    res = {"q": args.q, "bases": len(fam.bases), "labels": [str(a) for a in fam.labels]}
    verdicts = {"mutually_unbiased": True}
    if args.classify:
        if args.d is None or args.d * args.d != args.q:
            raise UsageError("--classify needs --d with d*d == q")
        cls = classify_entanglement(fam, args.d)
        res["entanglement"] = cls.tags
        res["counts"] = cls.counts
        verdicts["counts_match"] = cls.counts == {"maximally_entangled": args.d**2 - args.d, "product": args.d + 1}
    if args.emit:
        Path(args.emit).write_text(json.dumps(fam.to_json()) + "\n")
        res["emitted"] = args.emit
    return {"q": args.q, "classify": args.classify, "d": args.d}, res, verdicts, f"{len(fam.bases)} mutually unbiased bases of C^{args.q}"


def cmd_clifford(args):
    from .catalog import DesignRecord, save_ensemble
    from .designs import is_design
    from .symplectic import is_transitive_on_nonzero, jacobi_design

    try:
        design = jacobi_design(args.p, args.n, args.subgroup, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc))
    ok, sizes = is_transitive_on_nonzero(design.generators, design.space)
    rep = is_design(design, args.t, args.tol)
    res = rep.to_json()
    res.update({"group_order": len(design.group), "orbit_sizes": sizes[:16]})
    if args.out:
        rec = DesignRecord(f"jacobi-p{args.p}-n{args.n}-{args.subgroup}", design, "Jacobi design", [{"t": args.t, "verdict": rep.verdict}])
        save_ensemble(rec, args.out)
        res["written"] = args.out
    return (
        {"p": args.p, "n": args.n, "subgroup": args.subgroup, "t": args.t, "tol": args.tol, "seed": args.seed},
        res,
        {"transitive": ok, "design": rep.verdict},
        f"Jacobi design K={design.K}: P_{args.t} = {rep.value:.12g}",
    )


def cmd_catalog(args):
    from .catalog import BUILTINS, save_ensemble

    if args.sub == "list":
        items = []
        for name, build in BUILTINS.items():
            rec = build()
            items.append({"name": name, "d": rec.d, "K": rec.K, "claims": rec.claims, "provenance": rec.provenance})
        return {}, {"designs": items}, {}, ", ".join(BUILTINS)
    if args.name not in BUILTINS:
        raise UsageError(f"unknown builtin {args.name!r}")
    rec = BUILTINS[args.name]()
    save_ensemble(rec, args.out)
    return {"name": args.name, "out": args.out}, {"written": args.out, "K": rec.K, "d": rec.d}, {}, f"wrote {args.name} to {args.out}"


def cmd_minimize(args, threads):
    from .catalog import save_ensemble
    from .designs import is_design
    from .optimize import OptimizerConfig, minimize_potential

    try:
        cfg = OptimizerConfig(
            d=args.d, K=args.k, t=args.t, max_iter=args.max_iter, restarts=args.restarts,
            tol=args.tol, seed=args.seed, threads=threads,
        )
    except ValueError as exc:
        raise UsageError(str(exc))
    trace = minimize_potential(cfg)
    if args.trace:
        with open(args.trace, "w") as fh:
            for line in trace.json_lines():
                fh.write(line + "\n")
    res = trace.summary()
    res["config"].pop("threads")
    verdict = trace.success and is_design(trace.ensemble(), args.t, max(args.tol, 1e-9)).verdict
    if args.out:
        save_ensemble(trace.ensemble(), args.out)
        res["written"] = args.out
    inputs = {k: getattr(args, k) for k in ("d", "k", "t", "restarts", "seed", "tol", "max_iter")}
    return inputs, res, {"design": bool(verdict)}, f"best P_{args.t} = {trace.best.final:.12g} (gap {trace.gap:.3e})"


def cmd_avg_purity(args):
    from .designs import UnitaryEnsemble
    from .mub import average_purity_mub, page_average

    d = args.d
    expected = 2 * d / (d * d + 1)
    if args.via == "mub":
        exact = average_purity_mub(d)
        value = average_purity_mub(d, direct=True)
        res = {"d": d, "counting": str(exact), "direct": value, "expected": expected}
    else:
        if not args.design:
            raise UsageError("--via design needs --design")
        rec = _design(args.design)
        if rec.d != d * d:
            raise UsageError(f"design dimension {rec.d} != d^2 = {d * d}")
        rng = np.random.default_rng(args.seed)
        psi = rng.standard_normal(d * d) + 1j * rng.standard_normal(d * d)
        psi /= np.linalg.norm(psi)
        try:
            value = page_average(rec.ensemble, psi, d, tol=args.tol)
        except ValueError as exc:
            return {"d": d, "via": "design", "design": args.design}, {"error": str(exc)}, {"design": False}, str(exc)
        res = {"d": d, "value": value, "expected": expected}
    ok = abs(value - expected) <= max(args.tol, 1e-10)
    return {"d": d, "via": args.via, "design": args.design, "seed": args.seed}, res, {"matches": ok}, f"average purity {value:.12g} (2d/(d^2+1) = {expected:.12g})"


def cmd_bounds(args):
    from .designs import cardinality_constraints, clifford_bound, lower_bound, smallest_admissible

    d = args.d
    if d < 2:
        raise UsageError("--d must be >= 2")
    res = {"lower": lower_bound(d), "clifford": clifford_bound(d), "divisibility_min": smallest_admissible(d)}
    verdicts = {}
    if args.k is not None:
        verdicts["K_admissible"] = args.k >= lower_bound(d) and cardinality_constraints(d, args.k)
    return {"d": d, "k": args.k}, res, verdicts, f"d={d}: K >= {res['lower']}, divisibility -> {res['divisibility_min']}, Clifford {res['clifford']}"


def _gamma(path: str) -> np.ndarray:
    try:
        return np.asarray(json.loads(Path(path).read_text()), dtype=float)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read covariance matrix {path}: {exc}")


def cmd_linopt(args):
    from .linopt import energy_fluctuation, is_symplectic_orthogonal, pushforward_design

    rec = _design(args.design)
    if args.sub == "embed":
        try:
            S = pushforward_design(rec.ensemble, args.t, args.tol)
        except ValueError as exc:
            return {"design": args.design}, {"error": str(exc)}, {"design": False}, str(exc)
        ok = all(is_symplectic_orthogonal(s) for s in S)
        if args.out:
            Path(args.out).write_text(json.dumps(S.tolist()) + "\n")
        return {"design": args.design, "t": args.t, "out": args.out}, {"count": len(S), "written": args.out}, {"symplectic_orthogonal": ok}, f"{len(S)} SpO({2 * rec.d}) elements"
    gamma = _gamma(args.gamma)
    try:
        val = energy_fluctuation(rec.ensemble, gamma, args.tol)
    except ValueError as exc:
        msg = str(exc)
        if "2-design" in msg:
            return {"design": args.design, "gamma": args.gamma}, {"error": msg}, {"design": False}, msg
        raise UsageError(msg)
    return {"design": args.design, "gamma": args.gamma}, {"delta_E": val}, {"design": True}, f"Delta E = {val:.12g}"


# -- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=None, help="worker cap (default: $UDESIGN_THREADS or 1)")
    common.add_argument("--timings", action="store_true", help="include wall-clock timings in the report")

    ap = argparse.ArgumentParser(prog="udesign", description="Construct, verify and search for unitary t-designs.")
    ap.add_argument("--version", action="version", version=f"udesign {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("potential", parents=[common], help="frame potential of a design",
                       description="Frame potential sum |tr U^dag U'|^(2t) / K^2 of a design file or builtin.")
    p.add_argument("design")
    p.add_argument("--t", type=int, default=2)
    p.add_argument("--group", action="store_true", help="use the single-sum group formula")

    p = sub.add_parser("verify", parents=[common], help="frame-potential design test",
                       description="Design test: P_t <= minimum potential + tol (frame potential criterion).")
    p.add_argument("design")
    p.add_argument("--t", type=int, default=2)
    p.add_argument("--tol", type=float, default=1e-9)

    p = sub.add_parser("mub", parents=[common], help="mutually unbiased bases from stabilizer states",
                       description="Standard MUB family in prime-power dimension q built from stabilizer lines.")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--classify", action="store_true", help="entanglement classes for q = d^2")
    p.add_argument("--d", type=int)
    p.add_argument("--emit")

    p = sub.add_parser("clifford-design", parents=[common], help="Jacobi (Clifford) design from a symplectic group",
                       description="Weyl operators times metaplectic unitaries over a transitive symplectic group.")
    p.add_argument("--p", type=int, required=True, help="field order (prime power)")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--subgroup", choices=["full", "transitive"], default="full")
    p.add_argument("--t", type=int, default=2)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")

    p = sub.add_parser("catalog", help="built-in designs",
                       description="Built-in designs: qubit12 (12-element Clifford design), chau9 (two-qutrit design), fivedesign (SL(2,5) 5-design).")
    csub = p.add_subparsers(dest="sub", required=True)
    csub.add_parser("list", parents=[common], help="list builtins")
    e = csub.add_parser("emit", parents=[common], help="write a builtin to a design file")
    e.add_argument("name")
    e.add_argument("--out", required=True)

    p = sub.add_parser("minimize", parents=[common], help="numerical frame potential minimization",
                       description="Riemannian descent of the frame potential over K-tuples of unitaries.")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--k", type=int, default=12)
    p.add_argument("--t", type=int, default=2)
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iter", type=int, default=2000)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--out")
    p.add_argument("--trace", help="write the per-iteration trace as JSON lines")

    p = sub.add_parser("avg-purity", parents=[common], help="average reduced-state purity",
                       description="Average purity of tr_2 over MUB vectors or a verified 2-design; Haar value 2d/(d^2+1).")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--via", choices=["mub", "design"], default="mub")
    p.add_argument("--design")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-9)

    p = sub.add_parser("bounds", parents=[common], help="cardinality bounds for 2-designs",
                       description="Lower bound d^4-2d^2+2, divisibility constraint for group designs, Clifford bound d^4-d^2.")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--k", type=int)

    p = sub.add_parser("linopt", help="passive linear optics",
                       description="Embedding of U(d) into SpO(2d) and energy fluctuations averaged over 2-designs.")
    lsub = p.add_subparsers(dest="sub", required=True)
    e = lsub.add_parser("embed", parents=[common], help="push a design into SpO(2d)")
    e.add_argument("--design", required=True)
    e.add_argument("--t", type=int, default=2)
    e.add_argument("--tol", type=float, default=1e-9)
    e.add_argument("--out")
    e = lsub.add_parser("fluctuations", parents=[common], help="energy fluctuation Delta E")
    e.add_argument("--design", required=True)
    e.add_argument("--gamma", required=True)
    e.add_argument("--tol", type=float, default=1e-9)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    start = time.perf_counter()
    try:
        threads = _threads(args)
        if threads < 1:
            raise UsageError("--threads must be >= 1")
        handlers = {
            "potential": cmd_potential,
            "verify": cmd_verify,
            "mub": cmd_mub,
            "clifford-design": cmd_clifford,
            "catalog": cmd_catalog,
            "minimize": lambda a: cmd_minimize(a, threads),
            "avg-purity": cmd_avg_purity,
            "bounds": cmd_bounds,
            "linopt": cmd_linopt,
        }
        inputs, results, verdicts, summary = handlers[args.command](args)
    except UsageError as exc:
        print(f"udesign: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    timings = {"total_s": time.perf_counter() - start}
    print(json.dumps(_report(args, inputs, results, verdicts, timings), sort_keys=False))
    print(summary, file=sys.stderr)
    return EXIT_NOT_DESIGN if verdicts.get("design") is False else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
