"""Replication checks shared by the test suite and ``stmod verify``.

Every check is deterministic for a given seed and returns a CheckResult
whose ``details`` hold the numbers and certificates behind the verdict.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .algebra import AlgebraElement, group_element, radical_filtration
from .groups import Group, GroupSpec, abelian_groups_of_order, build_group, nilpotency_index
from .modules import (
    Module,
    ModuleMap,
    direct_sum,
    dual_map,
    dual_module,
    heller_of_trivial,
    induced_module,
    iso_test,
    jordan_module,
    omega,
    random_hom,
    random_module,
    regular_module,
    trivial_module,
)
from .ghostcalc import (
    abelian_bounds,
    benson_witness,
    central_ghost,
    classify_ghost_number_two,
    composite_bound_check,
    generating_length_upper,
    ghost_number_cyclic,
    q8_example,
)
from .stmaps import ghost_subspace, is_ghost, is_stably_trivial, tate_space

DEFAULT_SEED = 20240501


@dataclass
class CheckResult:
    id: str
    title: str
    passed: bool
    details: dict = field(default_factory=dict)
    elapsed: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.id}: {self.title}"

    def to_json(self, timing: bool = False) -> dict:
        out = {"id": self.id, "title": self.title, "passed": self.passed, "details": self.details}
        if timing:
            out["elapsed_s"] = round(self.elapsed, 3)
        return out


# ----------------------------------------------------------------------
# random ghosts


def random_ghost(m: Module, n: Module, rng: np.random.Generator,
                 window: tuple[int, int] = (-4, 4)) -> ModuleMap:
    """A random map that vanishes on Tate cohomology in the window.

    Half the time it is drawn from the full windowed ghost space, half the
    time it is ``h ∘ θ`` for a central radical θ, which is a ghost outright.
    """
    if rng.random() < 0.5:
        basis = ghost_subspace(m, n, window)
        if len(basis):
            c = rng.integers(0, m.p, size=len(basis))
            return ModuleMap(m, n, np.einsum("k,kij->ij", c, basis) % m.p, check=False)
    return random_hom(m, n, rng) @ central_ghost(m, rng)


def permutation_modules(g: Group) -> list[Module]:
    """Projective-free permutation modules on cosets of cyclic subgroups."""
    seen, out = set(), []
    for x in range(1, g.order):
        h = g.closure([x])
        if len(h) < g.order and h not in seen:
            seen.add(h)
            out.append(induced_module(g, h))
    return out


def random_chain(g: Group, length: int, rng: np.random.Generator, max_dim: int = 8,
                 pool: list[Module] | None = None) -> list[ModuleMap]:
    """Random composable ghosts; modules come from ``pool`` half the time."""
    mods = []
    for _ in range(length + 1):
        if pool and rng.random() < 0.5:
            mods.append(pool[int(rng.integers(len(pool)))])
        else:
            mods.append(random_module(g, rng, max_dim))
    return [random_ghost(a, b, rng) for a, b in zip(mods, mods[1:])]


def _groups(names) -> list[Group]:
    return [build_group(GroupSpec.parse(n)) for n in names]


# ----------------------------------------------------------------------
# the checks


CYCLIC_EXPECTED = {2: 1, 3: 1, 4: 2, 5: 2, 7: 3, 8: 4, 9: 4}


def _cyclic_pr(q: int) -> tuple[int, int]:
    for p in (2, 3, 5, 7, 11, 13):
        r = round(math.log(q, p))
        if p ** r == q:
            return p, r
    raise ValueError(q)


def check_cyclic_ghost_number(seed: int) -> CheckResult:
    start = time.perf_counter()
    rows = {}
    ok = True
    for q, want in CYCLIC_EXPECTED.items():
        res = ghost_number_cyclic(*_cyclic_pr(q))
        rows[f"C{q}"] = {"ghost_number": res["ghost_number"], "expected": want, "witness": res["witness"]}
        ok &= res["ok"] and res["ghost_number"] == want
    elapsed = time.perf_counter() - start
    ok &= elapsed < 60
    return CheckResult("cyclic-ghost-number", "ghost number of kC_q is ceil((q-1)/2)", ok,
                       {"groups": rows, "under_60s": elapsed < 60}, elapsed)


def check_gh_cyclic(seed: int) -> CheckResult:
    values = {}
    for q in sorted(set(CYCLIC_EXPECTED) | {11, 13, 16}):
        values[f"C{q}"] = ghost_number_cyclic(*_cyclic_pr(q))["ghost_number"]
    ones = sorted((k for k, v in values.items() if v == 1), key=lambda s: int(s[1:]))
    return CheckResult("gh-cyclic", "ghost number 1 exactly for C2 and C3", ones == ["C2", "C3"],
                       {"ghost_numbers": values, "ghost_number_one": ones})


def check_klein_four(seed: int, modules: int = 200, chains: int = 50) -> CheckResult:
    rng = np.random.default_rng(seed)
    g = build_group(GroupSpec.abelian(2, 2))
    a, b = g.generators
    theta = group_element(g, b) - AlgebraElement.one(g)
    cert = benson_witness(g, g.closure([a]), theta, [theta], check_window=True)
    lower_ok = cert.ok and cert.window_ghost != "not-ghost"
    gen_bad, methods = [], {}
    for _ in range(modules):
        m = random_module(g, rng, 8)
        bound, c = generating_length_upper(m)
        methods[c["method"]] = methods.get(c["method"], 0) + 1
        if bound > 2:
            gen_bad.append(m.dim)
    chain_bad = nontrivial_links = 0
    pool = permutation_modules(g)
    for _ in range(chains):
        f1, f2 = random_chain(g, 2, rng, pool=pool)
        nontrivial_links += (not is_stably_trivial(f1)) + (not is_stably_trivial(f2))
        if not is_stably_trivial(f2 @ f1):
            chain_bad += 1
    ok = lower_ok and not gen_bad and chain_bad == 0
    return CheckResult("klein-four", "kV4 has ghost number and generating number two", ok, {
        "lower_witness": cert.to_json(), "modules_checked": modules, "generating_length_over_2": gen_bad,
        "certificate_methods": methods, "chains_checked": chains, "nontrivial_single_ghosts": nontrivial_links,
        "nontrivial_two_chains": chain_bad,
    })


def check_q8_example(seed: int) -> CheckResult:
    rep = q8_example()
    return CheckResult("q8-example", "three-dimensional kQ8-module with ghost length two", rep["ok"], rep)


def check_abelian_bounds(seed: int) -> CheckResult:
    cls = classify_ghost_number_two()
    rows, ok = [], True
    for row in cls["groups"]:
        g = build_group(GroupSpec.parse(row["group"]))
        rep = abelian_bounds(g)
        has_c2 = 2 in g.spec.factors
        tight = rep.lower == rep.upper == rep.nilpotency_index - 1
        row_ok = rep.witness.get("ok", False) and rep.lower <= rep.upper and (tight or not has_c2)
        ok &= bool(row_ok)
        rows.append({**rep.to_json(), "c2_summand": has_c2, "ok": bool(row_ok)})
    two_ok = cls["ghost_number_two"] == sorted(["C4", "C2xC2", "C5"]) and not cls["undecided"]
    return CheckResult("abelian-bounds", "abelian bounds, witnesses and the ghost-number-two list", ok and two_ok,
                       {"bounds": rows, "ghost_number_two": cls["ghost_number_two"],
                        "classification": cls["groups"]})


def check_duality(seed: int, maps: int = 100) -> CheckResult:
    rng = np.random.default_rng(seed)
    out, ok = {}, True
    for g in _groups(["C4", "C8", "V4", "Q8"]):
        agree = ghosts = routes = 0
        mismatches = []
        for t in range(maps):
            m, n = random_module(g, rng, 6), random_module(g, rng, 6)
            f = random_ghost(m, n, rng) if t % 2 else random_hom(m, n, rng)
            v = is_ghost(f)
            vd = is_ghost(dual_map(f))
            vr = is_ghost(f, route="dual")
            if v.is_ghost == vd.is_ghost:
                agree += 1
            else:
                mismatches.append(t)
            routes += v.is_ghost == vr.is_ghost
            ghosts += v.is_ghost
        tate = []
        for _ in range(3):
            m = random_module(g, rng, 6)
            md = dual_module(m)
            for i in range(4):
                tate.append(tate_space(m, -i - 1).dim == tate_space(md, i).dim)
        good = agree == maps and routes == maps and all(tate)
        ok &= good
        out[g.name] = {"maps": maps, "ghosts": ghosts, "agree": agree, "route_agree": routes,
                       "mismatches": mismatches, "tate_duality_checks": len(tate), "tate_duality_ok": all(tate)}
    return CheckResult("duality", "f is a ghost iff f* is; Tate duality of dimensions", ok, out)


# at order 8 the semidihedral and modular presentations give C4xC2 and D8 again
FAMILY_KINDS = {3: ("dihedral", "quaternion"),
                4: ("dihedral", "quaternion", "semidihedral", "modular"),
                5: ("dihedral", "quaternion", "semidihedral", "modular")}


def small_groups(max_order: int) -> list[Group]:
    specs = []
    for p in (2, 3, 5, 7, 11, 13):
        a = 1
        while p ** a <= max_order:
            specs += abelian_groups_of_order(p, a)
            a += 1
    for n in (3, 4):
        if 2 ** n <= max_order:
            specs += [GroupSpec.family(kind, n) for kind in FAMILY_KINDS[n]]
    return [build_group(s) for s in specs]


def check_gh_target_k(seed: int, per_group: int = 20) -> CheckResult:
    rng = np.random.default_rng(seed)
    out, ok, total = {}, True, 0
    for g in small_groups(9):
        k = trivial_module(g)
        ghosts = exceptions = 0
        for t in range(per_group):
            m = random_module(g, rng, 6)
            if t % 2:
                m = direct_sum(m, regular_module(g))
            f = random_ghost(m, k, rng) if t % 3 else random_hom(m, k, rng)
            if is_ghost(f).is_ghost:
                ghosts += 1
                if not is_stably_trivial(f):
                    exceptions += 1
        total += per_group
        ok &= exceptions == 0
        out[g.name] = {"maps": per_group, "ghosts": ghosts, "exceptions": exceptions}
    return CheckResult("gh-target-k", "every ghost into k is stably trivial", ok and total >= 200,
                       {"groups": out, "total_maps": total})


def check_soc_rad(seed: int, chains: int = 120) -> CheckResult:
    rng = np.random.default_rng(seed)
    groups = _groups(["C4", "C8", "C9", "V4", "Q8", "D8", "C2xC4"])
    pools = {g.name: permutation_modules(g) for g in groups}
    bad, lengths, nonzero = [], {1: 0, 2: 0, 3: 0}, 0
    for t in range(chains):
        g = groups[t % len(groups)]
        length = 1 + t % 3
        chain = random_chain(g, length, rng, 6, pools[g.name])
        rep = composite_bound_check(g, chain)
        comp = chain[0]
        for f in chain[1:]:
            comp = f @ comp
        nonzero += not comp.is_zero()
        lengths[length] += 1
        if not all(c["soc_in_kernel"] and c["image_in_rad"] for c in rep.containments):
            bad.append({"group": g.name, "length": length})
    return CheckResult("soc-rad", "l ghosts kill Soc^l and land in Rad^l", not bad,
                       {"chains": chains, "by_length": lengths, "nonzero_composites": nonzero, "exceptions": bad})


def check_nilpotency(seed: int) -> CheckResult:
    named = {"Q8": 5, "C2": 2, "C2xC2": 3, "C2xC2xC2": 4, "C2xC2xC2xC2": 5, "D16": 9, "SD16": 9, "M16": 9}
    for q in (2, 3, 4, 5, 7, 8, 9, 16):
        named[f"C{q}"] = q
    values = {}
    ok = True
    for name, want in named.items():
        got = nilpotency_index(build_group(GroupSpec.parse(name)))
        values[name] = got
        ok &= got == want
    compared = 0
    specs = []
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31):
        a = 1
        while p ** a <= 32:
            specs += abelian_groups_of_order(p, a)
            a += 1
    for n in (3, 4, 5):
        specs += [GroupSpec.family(kind, n) for kind in FAMILY_KINDS[n]]
    abelian_formula_ok = True
    for sp in specs:
        g = build_group(sp)
        m = nilpotency_index(g)  # raises if Jennings and radical powers disagree
        compared += 1
        if sp.kind == "abelian":
            abelian_formula_ok &= m == 1 + sum(q - 1 for q in sp.factors)
        filt = radical_filtration(g)
        abelian_formula_ok &= filt.dims[-2] == 1
    return CheckResult("nilpotency", "nilpotency indices by Jennings and by radical powers", ok and abelian_formula_ok,
                       {"values": values, "groups_compared": compared, "abelian_formula_ok": abelian_formula_ok})


def check_bound_chain(seed: int, per_group: int = 6) -> CheckResult:
    rng = np.random.default_rng(seed)
    out, ok = {}, True
    for g in small_groups(8):
        m = nilpotency_index(g)
        pool = permutation_modules(g)
        bad = 0
        for _ in range(per_group):
            chain = random_chain(g, m - 1, rng, 6, pool)
            rep = composite_bound_check(g, chain)
            if not rep.ok or not rep.stably_trivial:
                bad += 1
        ok &= bad == 0
        out[g.name] = {"chain_length": m - 1, "chains": per_group, "exceptions": bad}
    return CheckResult("bound-chain", "composites of m-1 ghosts are stably trivial", ok, out)


def check_heller_dims(seed: int) -> CheckResult:
    out, ok = {}, True
    for g in small_groups(16):
        dims = {i: heller_of_trivial(g, i).dim for i in range(-4, 5)}
        good = all(d % g.order == (1 if i % 2 == 0 else g.order - 1) % g.order for i, d in dims.items())
        ok &= good
        out[g.name] = {"dims": [dims[i] for i in range(-4, 5)], "ok": good}
    jordan = {}
    for q in (2, 3, 4, 5, 7, 8, 9):
        g = build_group(GroupSpec.abelian(q))
        good = all(iso_test(omega(jordan_module(g, i)), jordan_module(g, q - i)).status == "isomorphic"
                   for i in range(1, q))
        jordan[f"C{q}"] = good
        ok &= good
    return CheckResult("heller-dims", "dim of the i-th Heller shift of k is (-1)^i mod |G|; Jordan blocks flip",
                       ok, {"shifts": out, "jordan_flip": jordan})


CHECKS: dict[str, Callable[[int], CheckResult]] = {
    "cyclic-ghost-number": check_cyclic_ghost_number,
    "gh-cyclic": check_gh_cyclic,
    "klein-four": check_klein_four,
    "q8-example": check_q8_example,
    "abelian-bounds": check_abelian_bounds,
    "duality": check_duality,
    "gh-target-k": check_gh_target_k,
    "soc-rad": check_soc_rad,
    "nilpotency": check_nilpotency,
    "bound-chain": check_bound_chain,
    "heller-dims": check_heller_dims,
}


def run_check(check_id: str, seed: int = DEFAULT_SEED) -> CheckResult:
    if check_id not in CHECKS:
        raise KeyError(f"unknown check {check_id!r}; choose from {', '.join(CHECKS)}")
    start = time.perf_counter()
    res = CHECKS[check_id](seed)
    res.elapsed = time.perf_counter() - start
    return res


def run_all(seed: int = DEFAULT_SEED) -> list[CheckResult]:
    return [run_check(c, seed) for c in CHECKS]
