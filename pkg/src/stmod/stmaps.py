"""Maps in the stable module category.

A map is stably trivial when it factors through a projective, equivalently
when it lifts through the projective cover of its target.  Maps
``M -> kG`` correspond to functionals on M (``λ ↦ Σ_g λ(g^{-1} ·) g``), so
the maps that factor through the cover ``(kG)^d -> N`` are spanned by
``Σ_g ρ_N(g) c_i e_j^T ρ_M(g^{-1})`` for top generators ``c_i`` of N.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import AlgebraElement, is_central
from .fflin import kernel_array, left_inverse_rows, matmul, rank_array, rref_array
from .modules import (
    InternalError,
    Module,
    ModuleMap,
    direct_sum,
    dual_map,
    heller_of_trivial,
    hom_basis,
    injective_hull,
    projective_cover,
    quotient,
    split_projective_free,
    trivial_period,
    zero_module,
)

__all__ = [
    "ModuleMap", "dual_map", "theta_multiplication", "projective_maps", "is_stably_trivial",
    "StableVerdict", "StableHom", "stable_hom", "TateSpace", "tate_space", "tate_induced_map",
    "GhostVerdict", "is_ghost", "ghost_subspace", "Triangle", "cone", "UniversalGhost",
    "universal_ghost", "factors_through", "higman_trivial", "PreconditionError",
]


class PreconditionError(ValueError):
    """An operation was asked for outside the setting where it is defined."""


def _vec(a: np.ndarray) -> np.ndarray:
    return a.reshape(-1)


def theta_multiplication(m: Module, theta: AlgebraElement) -> ModuleMap:
    """``v -> θ v``; θ must be central so that this is a module map."""
    if theta.group != m.group:
        raise PreconditionError("algebra element and module live over different groups")
    if not is_central(theta):
        raise PreconditionError("θ is not central in kG")
    return ModuleMap(m, m, m.algebra_action(theta), check=False)


# ----------------------------------------------------------------------
# stable triviality


def projective_maps(m: Module, n: Module) -> np.ndarray:
    """Rows spanning the vec'd maps ``m -> n`` that factor through a projective."""
    g = m.group
    cover, pi = projective_cover(n)
    d = cover.dim // g.order
    if d == 0 or m.dim == 0:
        return np.zeros((0, n.dim * m.dim), dtype=np.int64)
    # images ρ_N(g) c_i of the free generators, shape (|G|, n, d)
    imgs = pi.matrix.reshape(n.dim, d, g.order).transpose(2, 0, 1)
    back = m.elem[g.inv]
    mats = np.einsum("gai,gjb->ijab", imgs, back) % m.p
    return mats.reshape(d * m.dim, n.dim * m.dim)


@dataclass
class StableVerdict:
    """Outcome of a stable-triviality test with its evidence.

    ``lift`` (when trivial) is a map into the projective cover of the
    target whose composite with the cover is the original map.  Otherwise
    ``rank_gap`` records rank(P) < rank(P | f) for the factoring span P.
    """

    trivial: bool
    lift: np.ndarray | None = None
    rank_gap: tuple[int, int] | None = None

    def __bool__(self) -> bool:
        return self.trivial

    def to_json(self) -> dict:
        out: dict = {"stably_trivial": self.trivial}
        if self.lift is not None:
            out["lift_shape"] = list(self.lift.shape)
        if self.rank_gap is not None:
            out["rank_gap"] = list(self.rank_gap)
        return out


def is_stably_trivial(f: ModuleMap) -> StableVerdict:
    m, n, p, g = f.source, f.target, f.p, f.source.group
    if m.dim == 0 or n.dim == 0 or f.is_zero():
        return StableVerdict(True, np.zeros((0, m.dim), dtype=np.int64))
    cover, pi = projective_cover(n)
    d = cover.dim // g.order
    pm = projective_maps(m, n)
    rhs = _vec(f.matrix)
    if pm.shape[0] == 0:
        return StableVerdict(False, rank_gap=(0, 1))
    aug = np.vstack([pm, rhs[None, :]]).T
    r, piv = rref_array(aug, p)
    rp = sum(1 for c in piv if c < pm.shape[0])
    if pm.shape[0] in piv:
        return StableVerdict(False, rank_gap=(rp, rp + 1))
    # coefficients c with pm^T c = rhs
    coeff = np.zeros(pm.shape[0], dtype=np.int64)
    for i, c in enumerate(piv):
        coeff[c] = r[i, -1]
    lam = coeff.reshape(d, m.dim)
    lift = np.einsum("ij,gjb->igb", lam, m.elem[g.inv]).reshape(d * g.order, m.dim) % p
    if not np.array_equal(matmul(pi.matrix, lift, p), f.matrix):
        raise InternalError("lift through the projective cover does not reproduce the map")
    return StableVerdict(True, lift)


def higman_trivial(f: ModuleMap) -> bool:
    """Independent test: f lies in the trace image ``Σ_g g ∘ Hom_k(M, N) ∘ g^{-1}``."""
    m, n, p, g = f.source, f.target, f.p, f.source.group
    if m.dim == 0 or n.dim == 0:
        return True
    tr = np.einsum("gac,gdb->cdab", n.elem, m.elem[g.inv]) % p
    span = tr.reshape(n.dim * m.dim, n.dim * m.dim)
    base = rank_array(span, p)
    return rank_array(np.vstack([span, _vec(f.matrix)[None, :]]), p) == base


# ----------------------------------------------------------------------
# stable Hom


class StableHom:
    """``Hom_kG(M, N)`` modulo maps through projectives, with a coset basis."""

    def __init__(self, m: Module, n: Module):
        p = m.p
        self.source, self.target, self.p = m, n, p
        hom = hom_basis(m, n)
        size = n.dim * m.dim
        pm = projective_maps(m, n)
        if pm.shape[0]:
            red, piv = rref_array(pm, p)
            pb = red[:len(piv)]
        else:
            pb = np.zeros((0, size), dtype=np.int64)
        self.hom_dim = len(hom)
        self.proj_dim = pb.shape[0]
        if len(hom):
            stacked = np.vstack([pb, hom.reshape(len(hom), size)])
            _, piv = rref_array(stacked.T, p)
            chosen = [c - pb.shape[0] for c in piv if c >= pb.shape[0]]
        else:
            chosen = []
        self.reps = hom[chosen] if chosen else np.zeros((0, n.dim, m.dim), dtype=np.int64)
        self.dim = len(chosen)
        basis = np.vstack([self.reps.reshape(self.dim, size), pb]) if size else np.zeros((0, 0), dtype=np.int64)
        if basis.shape[0]:
            self._rows, self._inv = left_inverse_rows(basis.T, p)
        else:
            self._rows, self._inv = [], np.zeros((0, 0), dtype=np.int64)

    def coords(self, matrix: np.ndarray) -> np.ndarray:
        """Coordinates of a module map's stable class in the ``reps`` basis."""
        if self.dim == 0:
            return np.zeros(0, dtype=np.int64)
        v = _vec(np.asarray(matrix, dtype=np.int64) % self.p)
        c = matmul(self._inv, v[self._rows][:, None], self.p)[:, 0]
        return c[:self.dim]

    def representatives(self) -> list[ModuleMap]:
        return [ModuleMap(self.source, self.target, r, check=False) for r in self.reps]


def stable_hom(m: Module, n: Module) -> StableHom:
    return StableHom(m, n)


@dataclass
class TateSpace:
    """``Ĥ^i(G, M)`` realized as stable maps ``Ω̃^i k -> M``."""

    degree: int
    module: Module
    source: Module
    stable: StableHom

    @property
    def dim(self) -> int:
        return self.stable.dim

    def representatives(self) -> list[ModuleMap]:
        return self.stable.representatives()


def tate_space(m: Module, i: int) -> TateSpace:
    key = ("tate", i)
    if key not in m._cache:
        src = heller_of_trivial(m.group, i)
        m._cache[key] = TateSpace(i, m, src, StableHom(src, m))
    return m._cache[key]


def tate_induced_map(f: ModuleMap, i: int) -> np.ndarray:
    """Matrix of ``Ĥ^i(G, f)`` in the representative bases."""
    src = tate_space(f.source, i)
    tgt = tate_space(f.target, i)
    out = np.zeros((tgt.dim, src.dim), dtype=np.int64)
    for j, r in enumerate(src.stable.reps):
        out[:, j] = tgt.stable.coords(matmul(f.matrix, r, f.p))
    return out


# ----------------------------------------------------------------------
# ghosts


@dataclass
class GhostVerdict:
    status: str                                  # ghost-exact | ghost-in-window | not-ghost
    window: tuple[int, int]
    witness: dict | None = None                  # degree and nonzero induced matrix
    period: int | None = None
    route: str = "direct"

    @property
    def is_ghost(self) -> bool:
        return self.status != "not-ghost"

    def __bool__(self) -> bool:
        return self.is_ghost

    def to_json(self) -> dict:
        out = {"status": self.status, "window": list(self.window), "route": self.route}
        if self.period is not None:
            out["period"] = self.period
            out["periodicity_certificate"] = f"dim Omega^{self.period} k = 1"
        if self.witness is not None:
            out["witness"] = {"degree": self.witness["degree"], "via": self.witness["via"],
                              "induced": self.witness["induced"].tolist()}
        return out


def is_ghost(f: ModuleMap, window: tuple[int, int] = (-4, 4), route: str = "direct") -> GhostVerdict:
    """Windowed ghost test, upgraded to exact when k is periodic.

    ``route="dual"`` checks f in degrees ``>= 0`` and ``f*`` in degrees
    ``0..-lo-1`` instead of f in negative degrees; by Tate duality
    ``Ĥ^{-i-1}(f)`` vanishes exactly when ``Ĥ^i(f*)`` does.
    """
    lo, hi = window
    if lo > hi:
        raise ValueError(f"empty window [{lo}, {hi}]")
    checks: list[tuple[ModuleMap, int, int, str]] = []
    if route == "direct":
        checks = [(f, i, i, "f") for i in range(lo, hi + 1)]
    elif route == "dual":
        fd = dual_map(f)
        checks = [(f, i, i, "f") for i in range(max(lo, 0), hi + 1)]
        checks += [(fd, i, -i - 1, "dual") for i in range(0, -lo) if lo <= -i - 1 <= hi]
    else:
        raise ValueError(f"unknown route {route!r}")
    period = trivial_period(f.source.group)
    for h, deg, orig, via in checks:
        ind = tate_induced_map(h, deg)
        if ind.any():
            return GhostVerdict("not-ghost", window, {"degree": orig, "via": via, "induced": ind},
                                period, route)
    if period is not None and hi - lo + 1 >= period:
        return GhostVerdict("ghost-exact", window, None, period, route)
    return GhostVerdict("ghost-in-window", window, None, period, route)


def ghost_subspace(m: Module, n: Module, window: tuple[int, int] = (-4, 4)) -> np.ndarray:
    """Basis ``(k, n.dim, m.dim)`` of maps that induce zero on Ĥ^i for i in the window."""
    hom = hom_basis(m, n)
    if len(hom) == 0:
        return hom
    p = m.p
    rows = []
    for i in range(window[0], window[1] + 1):
        src = tate_space(m, i)
        tgt = tate_space(n, i)
        if src.dim == 0 or tgt.dim == 0:
            continue
        for r in src.stable.reps:
            block = np.stack([tgt.stable.coords(matmul(h, r, p)) for h in hom], axis=1)
            rows.append(block)
    if not rows:
        return hom
    ker = kernel_array(np.vstack(rows) % p, p)
    return np.einsum("kb,kij->bij", ker, hom) % p


# ----------------------------------------------------------------------
# triangles and universal ghosts


@dataclass
class Triangle:
    """``A --f--> M --to_cone--> C --connecting--> I(A)/A`` with C projective-free."""

    f: ModuleMap
    cone: Module
    to_cone: ModuleMap
    connecting: ModuleMap


def cone(f: ModuleMap) -> Triangle:
    """Cone of f, computed from the injection ``(f, e): A -> M ⊕ I(A)``."""
    a, m, p = f.source, f.target, f.p
    hull, e = injective_hull(a)
    big = direct_sum(m, hull) if hull.dim else m
    emb = np.vstack([f.matrix, e.matrix]) if hull.dim else f.matrix
    if rank_array(emb, p) != a.dim:
        raise InternalError("embedding into M ⊕ I(A) is not injective")
    q = quotient(big, emb)
    split = split_projective_free(q.module)
    core = split.core
    incl_m = np.vstack([np.eye(m.dim, dtype=np.int64), np.zeros((hull.dim, m.dim), dtype=np.int64)])
    to_cone = matmul(split.projection, matmul(q.projection, incl_m, p), p)
    hq = quotient(hull, e.matrix)
    to_hull = np.hstack([np.zeros((hull.dim, m.dim), dtype=np.int64), np.eye(hull.dim, dtype=np.int64)])
    conn = matmul(hq.projection, matmul(to_hull, matmul(q.section, split.inclusion, p), p), p)
    return Triangle(f, core, ModuleMap(m, core, to_cone, check=False),
                    ModuleMap(core, hq.module, conn, check=False))


@dataclass
class UniversalGhost:
    psi: ModuleMap
    degrees: list[int] = field(default_factory=list)
    period: int = 0
    triangle: Triangle | None = None


def universal_ghost(m: Module, period: int | None = None) -> UniversalGhost:
    """``Ψ: m -> F_m``, the cone on Tate generators from one full period."""
    g = m.group
    if period is None:
        period = trivial_period(g)
        if period is None:
            raise PreconditionError(f"trivial module of k{g.name} is not periodic (checked up to 8)")
    elif heller_of_trivial(g, period).dim != 1:
        raise PreconditionError(f"Ω^{period} k is not trivial for {g.name}")
    key = ("universal_ghost", period)
    if key in m._cache:
        return m._cache[key]
    sources, mats, degrees = [], [], []
    for i in range(period):
        ts = tate_space(m, i)
        for r in ts.stable.reps:
            sources.append(ts.source)
            mats.append(r)
            degrees.append(i)
    if sources:
        a = direct_sum(*sources)
        phi = ModuleMap(a, m, np.hstack(mats), check=False)
    else:
        phi = ModuleMap(zero_module(g), m, np.zeros((m.dim, 0), dtype=np.int64), check=False)
    tri = cone(phi)
    out = UniversalGhost(tri.to_cone, degrees, period, tri)
    m._cache[key] = out
    return out


def factors_through(h: ModuleMap, psi: ModuleMap) -> tuple[bool, np.ndarray | None]:
    """Whether ``h ≡ k ∘ psi`` stably for some module map ``k``; returns k if so."""
    if h.source.dim != psi.source.dim:
        raise ValueError("maps must share a source")
    p = h.p
    hom = hom_basis(psi.target, h.target)
    pm = projective_maps(h.source, h.target)
    size = h.target.dim * h.source.dim
    comp = np.array([_vec(matmul(k, psi.matrix, p)) for k in hom]).reshape(len(hom), size)
    gens = np.vstack([comp, pm])
    if gens.shape[0] == 0:
        return (not h.matrix.any(), None)
    aug = np.vstack([gens, _vec(h.matrix)[None, :]]).T
    r, piv = rref_array(aug, p)
    if gens.shape[0] in piv:
        return False, None
    coeff = np.zeros(gens.shape[0], dtype=np.int64)
    for i, c in enumerate(piv):
        coeff[c] = r[i, -1]
    k = np.einsum("b,bij->ij", coeff[:len(hom)], hom) % p if len(hom) else None
    return True, k
