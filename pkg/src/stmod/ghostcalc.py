"""Ghost lengths, generating lengths, ghost numbers and their bounds.

Exact ghost lengths come from iterating universal ghosts, which needs a
periodic trivial module (cyclic and generalised quaternion groups).
Elsewhere the functions here produce bounds, each backed by a witness that
re-checks independently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import (
    AlgebraElement,
    central_radical_basis,
    group_element,
    is_central,
    multiply,
)
from .fflin import is_prime, matmul
from .groups import CapError, Group, GroupError, GroupSpec, build_group, nilpotency_index, subgroup_as_group
from .modules import (
    InternalError,
    Module,
    ModuleMap,
    fingerprint,
    induce_map,
    induced_module,
    invariants,
    is_heller_of_trivial,
    jordan_module,
    projective_free_part,
    radical_series,
    radical_submodule,
    regular_module,
    restrict,
    socle_series,
    span_contains,
    spin,
    split_projective_free,
    trivial_period,
)
from .stmaps import (
    PreconditionError,
    is_ghost,
    is_stably_trivial,
    theta_multiplication,
    universal_ghost,
)


def ghost_length(m: Module, period: int | None = None) -> int:
    """Least l such that every composite of l ghosts out of m is stably trivial.

    Composes universal ghosts ``m -> F_1 -> F_2 -> ...`` until the composite
    becomes stably trivial.  The radical length of m bounds the answer, so
    exceeding it signals a bug.
    """
    core = projective_free_part(m)
    if core.dim == 0:
        return 0
    cap = len(radical_series(core)) - 1
    comp = ModuleMap.identity(core)
    cur = core
    for length in range(1, cap + 1):
        psi = universal_ghost(cur, period).psi
        comp = psi @ comp
        if is_stably_trivial(comp):
            return length
        cur = psi.target
    raise InternalError(f"ghost length exceeded the radical length {cap}")


def closed_form_cyclic(order: int, size: int) -> int:
    """Ghost length of the Jordan block of a given size over a cyclic group."""
    return min(size, order - size)


@dataclass
class LengthReport:
    fingerprint: tuple
    ghost_length: int | tuple[int, int]
    generating_upper: int
    certificate: dict
    methods: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        gl = self.ghost_length
        return {
            "dim": self.fingerprint[0],
            "ghost_length": list(gl) if isinstance(gl, tuple) else gl,
            "generating_length_upper": self.generating_upper,
            "certificate": self.certificate,
            "methods": self.methods,
        }


def generating_length_upper(m: Module) -> tuple[int, dict]:
    """An upper bound on the generating length with its filtration.

    Every layer of the radical series is a sum of trivial modules, so the
    radical length is always a bound.  Two refinements: an invariants
    filtration ``0 ⊆ M^G ⊆ M`` with ``JM ⊆ M^G`` gives 2, and a module
    isomorphic to a shift of k has length 1.
    """
    core = projective_free_part(m)
    if core.dim == 0:
        return 0, {"method": "projective", "dims": []}
    series = radical_series(core)
    best = (len(series) - 1, {"method": "radical-series", "dims": [b.shape[1] for b in series]})
    inv = invariants(core)
    if inv.dim < core.dim and span_contains(inv.basis, radical_submodule(core), core.p):
        if best[0] > 2:
            best = (2, {"method": "invariants-filtration", "dims": [0, inv.dim, core.dim]})
    elif inv.dim == core.dim:
        best = (1, {"method": "trivial-action", "dims": [0, core.dim]})
    if best[0] > 1:
        shift = is_heller_of_trivial(core, 4)
        if shift is not None:
            best = (1, {"method": "heller-shift-of-k", "shift": shift})
    return best


def length_report(m: Module) -> LengthReport:
    upper, cert = generating_length_upper(m)
    methods = [cert["method"]]
    if trivial_period(m.group) is not None:
        gl: int | tuple[int, int] = ghost_length(m)
        methods.append("universal-ghost-iteration")
    else:
        gl = (1 if projective_free_part(m).dim else 0, upper)
        methods.append("bounds-only")
    return LengthReport(fingerprint(m), gl, upper, cert, methods)


# ----------------------------------------------------------------------
# cyclic groups


def cyclic_group(p: int, r: int, cap: int = 16) -> Group:
    if not is_prime(p) or r < 1:
        raise GroupError(f"need a prime p and r >= 1, got p={p}, r={r}")
    if p ** r > cap:
        raise CapError(f"cyclic group of order {p ** r} exceeds cap {cap}")
    return build_group(GroupSpec.abelian(p ** r))


def ghost_number_cyclic(p: int, r: int, cap: int = 16) -> dict:
    """Ghost number of ``k C_{p^r}`` as the largest Jordan-block ghost length.

    Each computed length is compared against ``min(i, p^r - i)``; the top
    value comes with the witness ``x^{d-1}`` on the block of size d, a
    composite of d - 1 ghosts that must be stably nontrivial.
    """
    g = cyclic_group(p, r, cap)
    order = g.order
    lengths = {}
    for i in range(1, order):
        gl = ghost_length(jordan_module(g, i))
        if gl != closed_form_cyclic(order, i):
            raise InternalError(f"C{order}: block {i} has ghost length {gl}, closed form {closed_form_cyclic(order, i)}")
        lengths[i] = gl
    number = max(lengths.values())
    expected = math.ceil((order - 1) / 2)
    d = expected
    block = jordan_module(g, d)
    x = group_element(g, g.generators[0]) - AlgebraElement.one(g)
    witness = theta_multiplication(block, x ** (d - 1))
    nontrivial = not is_stably_trivial(witness)
    return {
        "group": g.name, "p": p, "r": r, "ghost_number": number, "closed_form": expected,
        "lengths": lengths, "witness": {"block": d, "power": d - 1, "stably_nontrivial": nontrivial},
        "ok": number == expected and nontrivial,
    }


# ----------------------------------------------------------------------
# witnesses for lower bounds


@dataclass
class BensonCertificate:
    """Stable nontriviality of θ acting on a permutation module ``k_H ↑ G``."""

    group: str
    subgroup_order: int
    theta: dict[int, int]
    chain_length: int
    restriction_scalar: int
    subgroup_sum: int
    solve_nontrivial: bool
    window_ghost: str | None

    @property
    def ok(self) -> bool:
        return (self.restriction_scalar == self.subgroup_sum != 0) and self.solve_nontrivial

    def to_json(self) -> dict:
        return {
            "group": self.group, "subgroup_order": self.subgroup_order,
            "theta": {str(k): v for k, v in self.theta.items()},
            "chain_length": self.chain_length, "restriction_scalar": self.restriction_scalar,
            "subgroup_sum": self.subgroup_sum, "solve_nontrivial": self.solve_nontrivial,
            "window_ghost": self.window_ghost, "ok": self.ok,
        }


def benson_witness(g: Group, h, theta: AlgebraElement, factors: list[AlgebraElement] | None = None,
                   check_window: bool = False) -> BensonCertificate:
    """Certify that θ· on ``k_H ↑ G`` is stably nontrivial, two ways.

    Restricted to H, the permutation module has the coset H as a trivial
    summand, and ``θ`` acts on that coordinate by ``Σ_{h∈H} θ_h``.  When
    that scalar is nonzero the identity of k_H factors through θ, which
    rules out factoring through a projective.  The projective-cover solve
    is run independently and must agree.

    ``factors`` (central elements of J with product θ) make θ a composite of
    ``len(factors)`` ghosts.
    """
    h = frozenset(int(x) for x in h)
    if len(h) == 1 or len(h) == g.order or g.closure(h) != h:
        raise PreconditionError("H must be a nontrivial proper subgroup")
    if not is_central(theta):
        raise PreconditionError("θ is not central")
    sub_sum = int(sum(theta.coeffs[x] for x in h) % g.p)
    if sub_sum == 0:
        raise PreconditionError("coefficients of θ on H sum to zero")
    chain = 0
    if factors:
        prod = AlgebraElement.one(g)
        for f in factors:
            if f.augmentation() != 0 or not is_central(f):
                raise PreconditionError("every factor must be central and lie in the radical")
            prod = multiply(prod, f)
        if prod != theta:
            raise PreconditionError("factors do not multiply to θ")
        chain = len(factors)
    m = induced_module(g, h)
    f = theta_multiplication(m, theta)
    # basis vector 0 is the coset H itself
    scalar = int(f.matrix[0, 0])
    solve_nontrivial = not is_stably_trivial(f)
    if (scalar != 0) != solve_nontrivial:
        raise InternalError("restriction argument and factoring solve disagree")
    window = is_ghost(f).status if check_window else None
    return BensonCertificate(g.name, len(h), theta.to_dict(), chain, scalar, sub_sum, solve_nontrivial, window)


@dataclass
class BoundReport:
    group: str
    nilpotency_index: int
    lower: int
    upper: int
    witness: dict

    def to_json(self) -> dict:
        return {"group": self.group, "nilpotency_index": self.nilpotency_index,
                "lower": self.lower, "upper": self.upper, "witness": self.witness}


def abelian_bounds(g: Group) -> BoundReport:
    """``m - p^{r-1}(p-1) <= ghost number <= m - 1`` with a certified witness.

    r is the exponent of the smallest cyclic factor ``<s>``; H is its
    subgroup of order p and θ = (s-1)^{p^{r-1}-1} Π (t-1)^{|t|-1} over the
    other factors t.
    """
    if not g.is_abelian or g.spec is None or g.spec.kind != "abelian":
        raise PreconditionError(f"{g.name} is not given as an abelian group")
    p = g.p
    m = nilpotency_index(g)
    factors = list(g.spec.factors)
    small = min(range(len(factors)), key=lambda i: (factors[i], i))
    r = round(math.log(factors[small], p))
    lower = m - p ** (r - 1) * (p - 1)
    upper = m - 1
    one = AlgebraElement.one(g)
    s = g.generators[small]
    if len(factors) == 1 and r == 1:
        # C_p: H would be all of G; the identity on k is the witness
        from .modules import trivial_module

        k = trivial_module(g)
        nontrivial = not is_stably_trivial(ModuleMap.identity(k))
        witness = {"kind": "identity-on-k", "chain_length": 0, "stably_nontrivial": nontrivial, "ok": nontrivial}
        return BoundReport(g.name, m, lower, upper, witness)
    ghosts = [group_element(g, s) - one] * (p ** (r - 1) - 1)
    for i, q in enumerate(factors):
        if i != small:
            ghosts += [group_element(g, g.generators[i]) - one] * (q - 1)
    theta = one
    for x in ghosts:
        theta = multiply(theta, x)
    h = g.closure([g.power(s, p ** (r - 1))])
    cert = benson_witness(g, h, theta, ghosts)
    if cert.chain_length != lower - 1:
        raise InternalError("witness chain length does not match the lower bound")
    return BoundReport(g.name, m, lower, upper, {"kind": "benson", **cert.to_json()})


def classify_ghost_number_two(cap: int = 16) -> dict:
    """Which abelian groups in the desk range have ghost number exactly two."""
    specs: list[GroupSpec] = []
    for p in (2, 3, 5, 7, 11, 13):
        a = 1
        while p ** a <= cap:
            from .groups import abelian_groups_of_order

            specs += abelian_groups_of_order(p, a)
            a += 1
    extra = [GroupSpec.abelian(3, 3), GroupSpec.abelian(5), GroupSpec.abelian(7), GroupSpec.abelian(9)]
    for sp in extra:
        if sp not in specs:
            specs.append(sp)
    rows = []
    for sp in specs:
        g = build_group(sp)
        bounds = abelian_bounds(g)
        row = {"group": g.name, "lower": bounds.lower, "upper": bounds.upper,
               "witness_ok": bool(bounds.witness.get("ok"))}
        if len(sp.factors) == 1:
            q = sp.factors[0]
            r = round(math.log(q, sp.p))
            exact = ghost_number_cyclic(sp.p, r, cap=max(cap, q))
            row["exact"] = exact["ghost_number"]
            row["lower"] = row["upper"] = exact["ghost_number"]
        elif bounds.lower == bounds.upper:
            row["exact"] = bounds.lower
        if g.name == "C2xC2":
            # generating length two for every projective-free module
            row["upper"] = 2
            row["exact"] = 2
        rows.append(row)
    two = sorted(r["group"] for r in rows if r["lower"] == r["upper"] == 2)
    undecided = [r["group"] for r in rows if r["lower"] <= 2 <= r["upper"] and r["lower"] != r["upper"]]
    return {"groups": rows, "ghost_number_two": two, "undecided": undecided}


# ----------------------------------------------------------------------
# composite chains


@dataclass
class ChainReport:
    length: int
    nilpotency_index: int
    stably_trivial: bool
    containments: list[dict]

    @property
    def ok(self) -> bool:
        forced = self.length >= self.nilpotency_index - 1
        return all(c["soc_in_kernel"] and c["image_in_rad"] for c in self.containments) and \
            (self.stably_trivial or not forced)


def composite_bound_check(g: Group, chain: list[ModuleMap]) -> ChainReport:
    """Compose ``chain`` (applied first to last) and check the socle/radical laws.

    After l ghosts between projective-free modules, ``Soc^l`` of the source
    lies in the kernel and the image lies in ``J^l`` of the target.  Once l
    reaches ``m - 1`` the composite must be stably trivial.
    """
    if not chain:
        raise ValueError("empty chain")
    for a, b in zip(chain, chain[1:]):
        if a.target.dim != b.source.dim or not a.target.same_as(b.source):
            raise ValueError("chain is not composable")
    m = nilpotency_index(g)
    src = chain[0].source
    socs = socle_series(src)
    p = g.p
    comp = chain[0]
    rows = []
    for length in range(1, len(chain) + 1):
        if length > 1:
            comp = chain[length - 1] @ comp
        soc = socs[min(length, len(socs) - 1)]
        soc_ok = not matmul(comp.matrix, soc, p).any() if soc.shape[1] else True
        rad = radical_series(comp.target)
        rl = rad[min(length, len(rad) - 1)]
        img_ok = span_contains(rl, comp.matrix, p)
        rows.append({"prefix": length, "soc_in_kernel": soc_ok, "image_in_rad": img_ok})
    trivial = bool(is_stably_trivial(comp))
    return ChainReport(len(chain), m, trivial, rows)


# ----------------------------------------------------------------------
# the quaternion example


def q8_module(g: Group | None = None) -> Module:
    """The three-dimensional left ideal of kQ8 spanned by
    (x-1)(ε-1), (y-1)(ε-1), (y-1)(x-1)(ε-1) with ε = x^2."""
    g = g if g is not None else build_group(GroupSpec.family("quaternion", 3))
    one = AlgebraElement.one(g)
    x_el, y_el = g.generators
    x = group_element(g, x_el) - one
    y = group_element(g, y_el) - one
    e = group_element(g, g.power(x_el, 2)) - one
    vecs = [multiply(x, e), multiply(y, e), multiply(multiply(y, x), e)]
    basis = np.array([v.coeffs for v in vecs]).T
    reg = regular_module(g)
    if spin(reg, basis).shape[1] != 3:
        raise InternalError("spanning vectors do not form a submodule")
    return restrict(reg, basis)


def q8_example() -> dict:
    g = build_group(GroupSpec.family("quaternion", 3))
    m = q8_module(g)
    p = g.p
    inv = invariants(m)
    free_rank = split_projective_free(m).free_rank
    # 0 -> k -> M -> k⊕k -> 0: M^G is one-dimensional and J M lies in it
    jm = radical_submodule(m)
    ses = inv.dim == 1 and span_contains(inv.basis, jm, p) and m.dim - inv.dim == 2
    gl = ghost_length(m)
    upper, cert = generating_length_upper(m)
    nil = nilpotency_index(g)
    return {
        "group": g.name, "dim": m.dim, "invariants_dim": inv.dim, "indecomposable": inv.dim == 1,
        "projective_free": free_rank == 0, "dim_mod_order": m.dim % g.order,
        "ses_k_M_kk": ses, "ghost_length": gl, "generating_length_upper": upper,
        "generating_certificate": cert, "period": trivial_period(g),
        "group_bounds": [gl, nil - 1],
        "ok": inv.dim == 1 and free_rank == 0 and m.dim % g.order == 3 and ses and gl == 2
              and upper == 2 and [gl, nil - 1] == [2, 4],
    }


# ----------------------------------------------------------------------
# induction


def induction_check(g: Group, h_elements, f: ModuleMap, window: tuple[int, int] = (-4, 4)) -> dict:
    """Induce a ghost f over H up to G and compare both sides."""
    h, emb = subgroup_as_group(g, h_elements)
    if f.source.group != h:
        raise GroupError("map is not over the given subgroup")
    big = induce_map(f, g, emb)
    small_trivial = bool(is_stably_trivial(f))
    big_trivial = bool(is_stably_trivial(big))
    verdict = is_ghost(big, window)
    return {
        "subgroup": h.name, "group": g.name, "induced_dims": [big.source.dim, big.target.dim],
        "ghost": verdict.status, "trivial_over_H": small_trivial, "trivial_over_G": big_trivial,
        "ok": verdict.is_ghost and small_trivial == big_trivial,
    }


def central_ghost(m: Module, rng: np.random.Generator) -> ModuleMap:
    """A random element of ``Z(kG) ∩ J`` acting on m (always a ghost)."""
    basis = central_radical_basis(m.group)
    c = rng.integers(0, m.p, size=len(basis))
    theta = AlgebraElement(m.group, sum((int(a) * b.coeffs for a, b in zip(c, basis)),
                                        np.zeros(m.group.order, dtype=np.int64)))
    return theta_multiplication(m, theta)
