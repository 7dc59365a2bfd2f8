"""Command-line front end: ``stmod <command> ...`` emitting JSON reports.

Exit codes: 0 success, 1 a requested check failed, 2 malformed input,
3 a computation cap was exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .groups import CapError, Group, GroupError, GroupSpec, build_group, jennings_chain, nilpotency_index
from .algebra import radical_filtration
from .fflin import FieldError
from .modules import (
    Module,
    ModuleError,
    ModuleMap,
    heller_shift,
    is_heller_of_trivial,
    socle_radical_series,
    trivial_module,
)
from .stmaps import PreconditionError, is_ghost, is_stably_trivial, tate_space
from .ghostcalc import abelian_bounds, ghost_number_cyclic, length_report, q8_example
from .verify import CHECKS, DEFAULT_SEED, run_check

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3


class InputError(ValueError):
    """Malformed job input; the message names the failing invariant."""


# ----------------------------------------------------------------------
# input parsing


def _load_json(path: str | Path) -> dict:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except FileNotFoundError:
        raise InputError(f"{path}: no such file") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    if not isinstance(obj, dict):
        raise InputError(f"{path}: top level must be an object")
    return obj


def parse_group(obj, cap_order: int = 128) -> Group:
    try:
        spec = GroupSpec.from_json(obj)
    except (GroupError, KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad group spec {obj!r}: {exc}") from None
    return build_group(spec, cap_order)


def module_from_json(obj: dict, g: Group | None = None, cap_order: int = 128) -> Module:
    for key in ("p", "dim", "action") + (() if g is not None else ("group",)):
        if key not in obj:
            raise InputError(f"module is missing field {key!r}")
    if g is None:
        g = parse_group(obj["group"], cap_order)
    p, dim = obj["p"], obj["dim"]
    if not isinstance(p, int) or p != g.p:
        raise InputError(f"module prime {p!r} does not match group {g.name} (p={g.p})")
    if not isinstance(dim, int) or dim < 0:
        raise InputError(f"dim must be a nonnegative integer, got {dim!r}")
    action = obj["action"]
    if not isinstance(action, list) or len(action) != len(g.generators):
        raise InputError(f"action must list {len(g.generators)} matrices (generators {', '.join(g.gen_names)})")
    mats = []
    for name, a in zip(g.gen_names, action):
        arr = np.array(a if dim else np.zeros((0, 0)), dtype=object)
        if arr.shape != (dim, dim) or not all(isinstance(x, int) for x in arr.flat):
            raise InputError(f"action of {name} must be a {dim}x{dim} integer matrix")
        mats.append(arr.astype(np.int64) % p)
    try:
        return Module(g, mats)
    except ModuleError as exc:
        raise InputError(str(exc)) from None


def parse_module_file(path: str | Path, cap_order: int = 128) -> Module:
    """Read ``{p, group, dim, action}`` and build a validated module."""
    return module_from_json(_load_json(path), cap_order=cap_order)


def parse_map_file(path: str | Path, cap_order: int = 128) -> ModuleMap:
    """Read ``{group, source, target, matrix}``; source/target are module objects."""
    obj = _load_json(path)
    for key in ("group", "source", "target", "matrix"):
        if key not in obj:
            raise InputError(f"map is missing field {key!r}")
    g = parse_group(obj["group"], cap_order)
    src = module_from_json(obj["source"], g)
    tgt = module_from_json(obj["target"], g)
    mat = np.array(obj["matrix"] if src.dim and tgt.dim else np.zeros((tgt.dim, src.dim)), dtype=np.int64)
    try:
        return ModuleMap(src, tgt, mat.reshape(tgt.dim, src.dim) if mat.size == tgt.dim * src.dim else mat)
    except ModuleError as exc:
        raise InputError(str(exc)) from None


# ----------------------------------------------------------------------
# jobs


@dataclass
class JobSpec:
    command: str
    group: str | None = None
    module: str | None = None
    map: str | None = None
    shift: int = 1
    degrees: tuple[int, int] = (0, 0)
    window: tuple[int, int] = (-4, 4)
    p: int | None = None
    r: int | None = None
    check: str = "all"
    seed: int = DEFAULT_SEED
    cap_order: int = 128
    timing: bool = False
    extra: dict = field(default_factory=dict)


def _module_for(job: JobSpec) -> Module:
    if job.module:
        return parse_module_file(job.module, job.cap_order)
    if job.group:
        return trivial_module(parse_group(job.group, job.cap_order))
    raise InputError("give --module FILE or --group SPEC")


def _module_summary(m: Module) -> dict:
    s = socle_radical_series(m)
    return {"dim": m.dim, "group": m.group.name, "series": s.to_json()}


def run(job: JobSpec) -> tuple[dict, int]:
    """Execute a job and return ``(report, exit code)``."""
    start = time.perf_counter()
    status = EXIT_OK
    cmd = job.command
    if cmd == "heller":
        m = _module_for(job)
        out = heller_shift(m, job.shift)
        results = {"shift": job.shift, "input": _module_summary(m), "output": _module_summary(out),
                   "module": out.to_json(), "matches_shift_of_k": is_heller_of_trivial(out, 4)}
    elif cmd == "tate":
        m = _module_for(job)
        lo, hi = job.degrees
        results = {"module": _module_summary(m),
                   "dims": {str(i): tate_space(m, i).dim for i in range(lo, hi + 1)},
                   "recipe": "dim of stable Hom from the i-th Heller shift of k"}
    elif cmd == "is-ghost":
        if not job.map:
            raise InputError("is-ghost needs --map FILE")
        f = parse_map_file(job.map, job.cap_order)
        verdict = is_ghost(f, job.window)
        results = {"verdict": verdict.to_json()}
    elif cmd == "stably-trivial":
        if not job.map:
            raise InputError("stably-trivial needs --map FILE")
        f = parse_map_file(job.map, job.cap_order)
        v = is_stably_trivial(f)
        cert = v.to_json()
        if v.lift is not None:
            cert["lift"] = v.lift.tolist()
        results = {"certificate": cert}
    elif cmd == "ghost-length":
        m = _module_for(job)
        results = {"module": _module_summary(m), "report": length_report(m).to_json()}
    elif cmd == "ghost-number-cyclic":
        if job.p is None or job.r is None:
            raise InputError("ghost-number-cyclic needs p and r")
        res = ghost_number_cyclic(job.p, job.r)
        res["lengths"] = {str(k): v for k, v in res["lengths"].items()}
        results = res
        if not res["ok"]:
            status = EXIT_FAIL
    elif cmd == "abelian-bounds":
        if not job.group:
            raise InputError("abelian-bounds needs --group SPEC")
        g = parse_group(job.group, job.cap_order)
        rep = abelian_bounds(g)
        results = rep.to_json()
        if not rep.witness.get("ok"):
            status = EXIT_FAIL
    elif cmd == "jennings":
        if not job.group:
            raise InputError("jennings needs --group SPEC")
        g = parse_group(job.group, job.cap_order)
        chain = jennings_chain(g)
        results = {"group": g.name, "chain": chain.to_json(), "nilpotency_index": nilpotency_index(g),
                   "radical_dims": radical_filtration(g).dims,
                   "recipe": "Jennings formula cross-checked against radical powers"}
    elif cmd == "q8-example":
        results = q8_example()
        if not results["ok"]:
            status = EXIT_FAIL
    elif cmd == "verify":
        ids = list(CHECKS) if job.check == "all" else [job.check]
        for c in ids:
            if c not in CHECKS:
                raise InputError(f"unknown check {c!r}; choose from all, {', '.join(CHECKS)}")
        checks = [run_check(c, job.seed) for c in ids]
        results = {"checks": [c.to_json(job.timing) for c in checks],
                   "table": [c.line() for c in checks],
                   "passed": sum(c.passed for c in checks), "total": len(checks)}
        if not all(c.passed for c in checks):
            status = EXIT_FAIL
    else:
        raise InputError(f"unknown command {cmd!r}")
    report = {
        "command": cmd,
        "args": {k: v for k, v in _echo(job).items()},
        "results": results,
        "tool": {"name": "stmod", "version": __version__},
        "seed": job.seed,
    }
    if job.timing:
        report["timing_s"] = round(time.perf_counter() - start, 3)
    return report, status


def _echo(job: JobSpec) -> dict:
    keep = set(job.extra.get("fields", ("group", "module", "map", "p", "r", "check"))) | {"window", "cap_order"}
    out = {}
    for k in sorted(keep):
        v = getattr(job, k)
        if v is not None:
            out[k] = list(v) if isinstance(v, tuple) else v
    return out


# ----------------------------------------------------------------------
# argument handling


def _key_values(tokens: list[str]) -> dict[str, int]:
    out = {}
    for i, t in enumerate(tokens):
        if "=" in t:
            k, v = t.split("=", 1)
        else:
            k, v = ("p", "r")[i] if i < 2 else "?", t
        try:
            out[k.strip()] = int(v)
        except ValueError:
            raise InputError(f"expected an integer in {t!r}") from None
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--window", nargs=2, type=int, metavar=("LO", "HI"), default=(-4, 4),
                        help="Tate degree window for ghost checks (default -4 4)")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for randomized sweeps")
    common.add_argument("--cap-order", type=int, default=128, help="largest group order accepted")
    common.add_argument("--json", metavar="OUT", help="also write the report to OUT")
    common.add_argument("--timing", action="store_true", help="include wall-clock timings in the report")

    ap = argparse.ArgumentParser(prog="stmod", description="Exact computations in the stable module category of a p-group.")
    ap.add_argument("--version", action="version", version=f"stmod {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, help_):
        return sub.add_parser(name, parents=[common], help=help_)

    s = add("heller", "Heller shift of a module (default: the trivial module)")
    s.add_argument("--group"); s.add_argument("--module"); s.add_argument("--shift", type=int, default=1)
    s = add("tate", "Tate cohomology dimensions")
    s.add_argument("--group"); s.add_argument("--module")
    s.add_argument("--degrees", nargs=2, type=int, metavar=("LO", "HI"), default=(-2, 2))
    s = add("is-ghost", "windowed ghost verdict for a map")
    s.add_argument("--map", required=True)
    s = add("stably-trivial", "does a map factor through a projective")
    s.add_argument("--map", required=True)
    s = add("ghost-length", "ghost length and generating-length bound of a module")
    s.add_argument("--group"); s.add_argument("--module")
    s = add("ghost-number-cyclic", "ghost number of kC_{p^r}, e.g. 'p=2 r=3'")
    s.add_argument("params", nargs="+")
    s = add("abelian-bounds", "ghost-number bounds for an abelian group")
    s.add_argument("--group", required=True)
    s = add("jennings", "dimension subgroups and nilpotency index")
    s.add_argument("--group", required=True)
    add("q8-example", "the three-dimensional kQ8-module example")
    s = add("verify", "run replication checks")
    s.add_argument("check", nargs="?", default="all", help=f"all or one of: {', '.join(CHECKS)}")
    return ap


def job_from_args(ns: argparse.Namespace) -> JobSpec:
    job = JobSpec(ns.command, seed=ns.seed, cap_order=ns.cap_order, window=tuple(ns.window), timing=ns.timing)
    fields = [n for n in ("group", "module", "map", "shift", "check", "degrees") if hasattr(ns, n)]
    if hasattr(ns, "params"):
        fields += ["p", "r"]
    job.extra["fields"] = fields
    for name in ("group", "module", "map", "shift", "check"):
        if hasattr(ns, name):
            setattr(job, name, getattr(ns, name))
    if hasattr(ns, "degrees"):
        job.degrees = tuple(ns.degrees)
    if hasattr(ns, "params"):
        kv = _key_values(ns.params)
        job.p, job.r = kv.get("p"), kv.get("r")
    if job.window[0] > job.window[1]:
        raise InputError(f"empty window {list(job.window)}")
    return job


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    ns = ap.parse_args(argv)
    try:
        job = job_from_args(ns)
        report, code = run(job)
    except (InputError, GroupError, ModuleError, FieldError, PreconditionError) as exc:
        print(f"stmod: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CapError as exc:
        print(f"stmod: cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    text = json.dumps(report, indent=2, sort_keys=True)
    if ns.command == "verify":
        for line in report["results"]["table"]:
            print(line, file=sys.stderr)
    print(text)
    if ns.json:
        Path(ns.json).write_text(text + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
