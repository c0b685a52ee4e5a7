"""Command-line front end: ``gaugecolor <command> [options]``.

Exit status is 0 on success, 1 when a verification fails and 2 for invalid
parameters.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import lattice as lat
from .code import build_code, export_check_matrices, valid_parameters, verify_structure
from .protocol import gauge_fix_plan, is_gauge_fixing_pair, measurement_schedule, schedule_violations
from .report import Report
from .sim import (
    MAX_QUBITS,
    clifford_transversal_check,
    encode_state,
    logical_expectations,
    run_gauge_fixing,
    stabilizer_expectations,
    universal_demo,
)
from .transversal import (
    DimensionConditionError,
    check_intersection_condition,
    explicit_tset_3d,
    gate_plan,
    solve_tset,
    verify_cellsT,
)

OK, FAILED, INVALID = 0, 1, 2
DEFAULT_SEED = 2015


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    family: str
    n: int
    d: int | None
    e: int | None
    gate_level: int | None
    dprime: int | None
    seed: int
    out: Path | None
    fmt: str
    threads: int

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        if args.n < 1:
            raise UsageError("--n must be a positive integer")
        if args.threads < 1:
            raise UsageError("--threads must be at least 1")
        return cls(
            family=args.family,
            n=args.n,
            d=args.d,
            e=args.e,
            gate_level=args.gate_level,
            dprime=args.dprime,
            seed=args.seed,
            out=Path(args.out) if args.out else None,
            fmt=args.format,
            threads=args.threads,
        )

    @property
    def D(self) -> int:
        return 2 if self.family == "2d" else 3

    def code_params(
        self, default: tuple[int, int] | None = (1, 1), D: int | None = None
    ) -> tuple[int, int]:
        D = self.D if D is None else D
        d = self.d if self.d is not None else (default[0] if default else None)
        e = self.e if self.e is not None else (default[1] if default else None)
        if d is None or e is None:
            raise UsageError("--d and --e are required")
        if d < 1 or e < 1 or d + e > D:
            raise UsageError(f"(d, e) = ({d}, {e}) violates d, e >= 1 and d + e <= D = {D}")
        return d, e


# --------------------------------------------------------------------------
# rendering


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, Path):
        return str(obj)
    return obj


def _text(obj, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            nested = isinstance(v, dict) or (
                isinstance(v, list) and any(isinstance(x, (dict, list)) for x in v)
            )
            if nested:
                lines.append(f"{pad}{k}:")
                lines.extend(_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {v}")
    elif isinstance(obj, list):
        for item in obj:
            if isinstance(item, dict) and "check_name" in item:
                mark = "PASS" if item["pass"] else "FAIL"
                extra = f"  ({item['witness'][0]})" if item["witness"] else ""
                lines.append(f"{pad}[{mark}] {item['check_name']}{extra}")
            elif isinstance(item, list) and not any(isinstance(x, (dict, list)) for x in item):
                lines.append(f"{pad}- {item}")
            elif isinstance(item, (dict, list)):
                lines.extend(_text(item, indent + 1))
                lines.append(f"{pad}--")
            else:
                lines.append(f"{pad}- {item}")
    else:
        lines.append(f"{pad}{obj}")
    return lines


def emit(payload: dict, fmt: str) -> None:
    data = _plain(payload)
    if fmt == "json":
        print(json.dumps(data, indent=2))
    else:
        print("\n".join(_text(data)))


def _write_json(path: Path, payload) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_plain(payload), indent=2) + "\n")
    return path


# --------------------------------------------------------------------------
# commands


def _lattice(cfg: RunConfig) -> lat.ColoredComplex:
    return lat.build_lattice(cfg.family, cfg.n)


def _summary(code) -> dict:
    weights = Counter(int(g.weight) for g in code.S)
    gauge_weights = Counter(int(g.weight) for g in code.G)
    return {
        "family_D": code.D,
        "d": code.d,
        "e": code.e,
        "qubits": code.n_qubits,
        "stabilizer_generators": len(code.S),
        "stabilizer_rank": code.S.rank,
        "gauge_generators": len(code.G),
        "gauge_rank": code.G.rank,
        "gauge_qubits": code.gauge_qubits,
        "logical_qubits": code.logical_qubits,
        "conventional": code.is_conventional,
        "stabilizer_weights": dict(sorted(weights.items())),
        "gauge_weights": dict(sorted(gauge_weights.items())),
        "max_gauge_weight": max(gauge_weights),
    }


def cmd_build(cfg: RunConfig) -> tuple[dict, int]:
    d, e = cfg.code_params()
    K = _lattice(cfg)
    code = build_code(K, d, e)
    summary = _summary(code)
    if cfg.out:
        _write_json(cfg.out / "lattice.json", lat.to_json(K))
        export_check_matrices(code, cfg.out)
        _write_json(cfg.out / "summary.json", summary)
        summary["written_to"] = str(cfg.out)
    return summary, OK


def _verify_one(K, d: int, e: int) -> dict:
    code = build_code(K, d, e, check=False)
    structure = verify_structure(code)
    clifford = clifford_transversal_check(code)
    expect_h = d == e
    had = clifford["hadamard"]
    return {
        "d": d,
        "e": e,
        "ok": structure.ok and all(c.passed for c in clifford.checks if c.name != "hadamard")
        and had.passed == expect_h,
        "structure": structure.to_dict(),
        "clifford": clifford.to_dict(),
        "hadamard_expected": expect_h,
    }


def cmd_verify(cfg: RunConfig, lattice_file: str | None = None) -> tuple[dict, int]:
    if lattice_file:
        try:
            K = lat.from_json(Path(lattice_file).read_text())
        except (OSError, ValueError) as exc:
            failure = Report()
            failure.add("lattice", [str(exc)])
            return {"ok": False, "lattice": failure.to_dict()}, FAILED
    else:
        K = _lattice(cfg)
    lattice_report = lat.validate_complex(K)
    if not K.is_closed:
        lattice_report.add("closed", ["lattice is open; codes need a closed complex"])
    out: dict = {"lattice": lattice_report.to_dict()}
    if not lattice_report.ok:
        out["ok"] = False
        return out, FAILED
    if cfg.d is not None or cfg.e is not None:
        params = [cfg.code_params(default=None, D=K.D)]
    else:
        params = valid_parameters(K.D)
    with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
        codes = list(pool.map(lambda p: _verify_one(K, *p), params))
    out["codes"] = codes
    out["ok"] = all(c["ok"] for c in codes)
    return out, OK if out["ok"] else FAILED


def cmd_plan(cfg: RunConfig) -> tuple[dict, int]:
    d, e = cfg.code_params(default=(1, cfg.D - 1))
    level = cfg.gate_level if cfg.gate_level is not None else cfg.D
    K = _lattice(cfg)
    code = build_code(K, d, e)
    try:
        plan = gate_plan(code, level)
    except DimensionConditionError as exc:
        return {
            "error": "dimension_condition",
            "message": str(exc),
            "D": code.D,
            "n": level,
            "ebar": code.ebar,
        }, INVALID
    solver = plan.T
    out = {"plan": plan.to_json(), "checks": []}
    candidates = {"solver": solver}
    if K.D == 3:
        candidates["explicit"] = explicit_tset_3d(K)
    ok = True
    for name, T in candidates.items():
        cells = verify_cellsT(K, T)
        inter = check_intersection_condition(code, T, level)
        ok = ok and cells and inter
        out["checks"].append(
            {"T_source": name, "size": len(T), "cells": cells, "intersection": inter}
        )
    return out, OK if ok else FAILED


def cmd_schedule(cfg: RunConfig, sector: str) -> tuple[dict, int]:
    d, e = cfg.code_params()
    code = build_code(_lattice(cfg), d, e)
    sectors = ["X", "Z"] if sector == "both" else [sector]
    out = {"d": d, "e": e, "schedules": []}
    ok = True
    for sec in sectors:
        lo = code.d + 1 if sec == "Z" else code.e + 1
        dprime = cfg.dprime if cfg.dprime is not None else lo
        try:
            sched = measurement_schedule(code, dprime, sec)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        problems = schedule_violations(code, sched)
        ok = ok and not problems
        entry = sched.to_json()
        entry["problems"] = problems[:5]
        entry["round_sizes"] = [len(r) for r in sched.rounds]
        if cfg.fmt == "text":
            entry.pop("rounds")
            entry.pop("reconstruction")
        out["schedules"].append(entry)
    return out, OK if ok else FAILED


def cmd_gaugefix(cfg: RunConfig, target: str) -> tuple[dict, int]:
    d, e = cfg.code_params()
    try:
        d2, e2 = (int(x) for x in target.split(","))
    except ValueError:
        raise UsageError("--target must look like D,E (for example 1,2)") from None
    K = _lattice(cfg)
    src = build_code(K, d, e)
    if d2 < 1 or e2 < 1 or d2 + e2 > K.D:
        raise UsageError(f"target ({d2}, {e2}) violates d + e <= D = {K.D}")
    dst = build_code(K, d2, e2)
    if not is_gauge_fixing_pair(src, dst):
        raise UsageError(f"({d2},{e2}) is not a gauge-fixed version of ({d},{e})")
    plan = gauge_fix_plan(src, dst)
    out = {"plan": plan.to_json()}
    ok = True
    if src.n_qubits <= MAX_QUBITS:
        psi = encode_state(src, 1, 1)
        fixed, record = run_gauge_fixing(psi, plan, cfg.seed)
        stabs = stabilizer_expectations(fixed, dst.S)
        before, after = logical_expectations(psi, src), logical_expectations(fixed, dst)
        ok = bool(np.all(np.abs(stabs - 1) < 1e-10)) and all(
            abs(before[k] - after[k]) < 1e-10 for k in before
        )
        out["simulation"] = {
            "record": record.to_json(),
            "stabilizers_ok": bool(np.all(np.abs(stabs - 1) < 1e-10)),
            "logicals_before": before,
            "logicals_after": after,
        }
    out["ok"] = ok
    return out, OK if ok else FAILED


def cmd_demo(cfg: RunConfig, skip_correction: bool) -> tuple[dict, int]:
    if cfg.family != "3d" or cfg.n != 1:
        raise UsageError("demo-universal runs on --family 3d --n 1 only (statevector size)")
    res = universal_demo(cfg.seed, skip_correction=skip_correction)
    out = res.to_json()
    ok = (
        res.hadamard_transversal
        and res.stabilizers_ok
        and res.logicals_preserved
        and res.state_fidelity >= 1 - 1e-10
    )
    out["ok"] = ok
    return out, OK if ok else FAILED


def cmd_export(cfg: RunConfig) -> tuple[dict, int]:
    if cfg.out is None:
        raise UsageError("export needs --out")
    d, e = cfg.code_params(default=(1, cfg.D - 1))
    K = _lattice(cfg)
    code = build_code(K, d, e)
    written = [_write_json(cfg.out / "lattice.json", lat.to_json(K))]
    written += export_check_matrices(code, cfg.out)
    T = solve_tset(K)
    written.append(_write_json(cfg.out / "tset.json", T.to_json()))
    if cfg.gate_level is not None or code.D >= cfg.D * code.ebar:
        level = cfg.gate_level if cfg.gate_level is not None else cfg.D
        try:
            plan = gate_plan(code, level, T=T)
            written.append(_write_json(cfg.out / "gate_plan.json", plan.to_json()))
        except DimensionConditionError:
            pass
    return {"written": [str(p) for p in written]}, OK


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--family", choices=["2d", "3d"], default="3d")
    common.add_argument("--n", type=int, default=1, help="lattice size")
    common.add_argument("--d", type=int)
    common.add_argument("--e", type=int)
    common.add_argument("--gate-level", type=int, help="n of the rotation R_n")
    common.add_argument("--dprime", type=int, help="gauge cell dimension for schedules")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--out", help="output directory")
    common.add_argument("--format", choices=["json", "text"], default="json")
    common.add_argument("--threads", type=int, default=1)

    parser = argparse.ArgumentParser(prog="gaugecolor", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("build", parents=[common], help="build a code and summarise it")
    p = sub.add_parser("verify", parents=[common], help="check structural identities")
    p.add_argument("--lattice", help="verify a lattice JSON file instead of a built family")
    sub.add_parser("plan", parents=[common], help="plan a transversal R_n")
    p = sub.add_parser("schedule", parents=[common], help="gauge measurement schedule")
    p.add_argument("--sector", choices=["X", "Z", "both"], default="both")
    p = sub.add_parser("gaugefix", parents=[common], help="gauge fixing plan (and simulation)")
    p.add_argument("--target", default="1,2", help="target parameters D,E")
    p = sub.add_parser("demo-universal", parents=[common], help="(1,1) -> (1,2) -> R_3 demo")
    p.add_argument("--skip-correction", action="store_true")
    sub.add_parser("export", parents=[common], help="write lattice, matrices, T and plan")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig.from_args(args)
        if args.command == "build":
            payload, code = cmd_build(cfg)
        elif args.command == "verify":
            payload, code = cmd_verify(cfg, args.lattice)
        elif args.command == "plan":
            payload, code = cmd_plan(cfg)
        elif args.command == "schedule":
            payload, code = cmd_schedule(cfg, args.sector)
        elif args.command == "gaugefix":
            payload, code = cmd_gaugefix(cfg, args.target)
        elif args.command == "demo-universal":
            payload, code = cmd_demo(cfg, args.skip_correction)
        else:
            payload, code = cmd_export(cfg)
    except UsageError as exc:
        emit({"error": "invalid_parameters", "message": str(exc)}, args.format)
        return INVALID
    emit(payload, args.format)
    return code


if __name__ == "__main__":
    sys.exit(main())
