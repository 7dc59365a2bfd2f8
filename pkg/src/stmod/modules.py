"""Finite-dimensional kG-modules and their structural calculus.

A module is one action matrix per group generator.  Relations are checked
at construction by walking the Cayley graph: every edge ``h -> s h`` must
agree with ``rho(s) rho(h)``.  That walk also yields the matrix of every
group element, which most constructions below need.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .algebra import AlgebraElement
from .fflin import (
    FpMatrix,
    column_basis_array,
    inverse_array,
    kernel_array,
    left_inverse_rows,
    matmul,
    rank_array,
    rref_array,
)
from .groups import Group, GroupError


class ModuleError(ValueError):
    """Action matrices that do not define a representation."""


class InternalError(AssertionError):
    """A construction failed a self-check that valid input cannot fail."""


def _mat_power(a: np.ndarray, e: int, p: int) -> np.ndarray:
    out = np.eye(a.shape[0], dtype=np.int64)
    while e:
        if e & 1:
            out = matmul(out, a, p)
        a = matmul(a, a, p)
        e >>= 1
    return out


class Module:
    """A kG-module over F_p given by generator action matrices.

    ``check=False`` skips relation validation; it is used for modules the
    library builds itself out of already-valid ones.
    """

    def __init__(self, group: Group, gens: Sequence, *, p: int | None = None,
                 check: bool = True, name: str | None = None):
        p = group.p if p is None else int(p)
        if p != group.p:
            raise ModuleError(f"module over F_{p} for a {group.p}-group")
        mats = []
        for m in gens:
            a = m.a if isinstance(m, FpMatrix) else np.array(m, dtype=np.int64) % p
            if a.ndim != 2:
                a = a.reshape(0, 0) if a.size == 0 else a
            mats.append(a)
        if len(mats) != len(group.generators):
            raise ModuleError(f"expected {len(group.generators)} action matrices, got {len(mats)}")
        n = mats[0].shape[0] if mats else 0
        for i, a in enumerate(mats):
            if a.shape != (n, n):
                raise ModuleError(f"action of {group.gen_names[i]} has shape {a.shape}, expected {(n, n)}")
            a.flags.writeable = False
        self.group = group
        self.p = p
        self.dim = n
        self.gens = tuple(mats)
        self.name = name
        self._elem: np.ndarray | None = None
        self._cache: dict = {}
        if check:
            for i, a in enumerate(mats):
                if n and rank_array(a, p) != n:
                    raise ModuleError(f"action of {group.gen_names[i]} is not invertible")
            self._expand(check=True)

    def __repr__(self) -> str:
        tag = f" {self.name}" if self.name else ""
        return f"<Module{tag} dim={self.dim} over F{self.p}[{self.group.name}]>"

    # element matrices ---------------------------------------------------
    def _expand(self, check: bool) -> None:
        g, p, n = self.group, self.p, self.dim
        elem = np.zeros((g.order, n, n), dtype=np.int64)
        done = np.zeros(g.order, dtype=bool)
        elem[0] = np.eye(n, dtype=np.int64)
        done[0] = True
        frontier = [0]
        while frontier:
            nxt = []
            for h in frontier:
                for si, s in enumerate(g.generators):
                    x = int(g.mul[s, h])
                    cand = matmul(self.gens[si], elem[h], p)
                    if not done[x]:
                        elem[x] = cand
                        done[x] = True
                        nxt.append(x)
                    elif check and not np.array_equal(cand, elem[x]):
                        raise ModuleError(self._violation())
            frontier = nxt
        elem.flags.writeable = False
        self._elem = elem

    def _violation(self) -> str:
        g = self.group
        for rel in g.relations:
            if not np.array_equal(self.word(rel.lhs), self.word(rel.rhs)):
                return f"action violates group relation {rel.name}"
        return "action does not respect the group multiplication table"

    def word(self, w) -> np.ndarray:
        """Matrix of a word ((generator index, exponent), ...)."""
        out = np.eye(self.dim, dtype=np.int64)
        for gi, e in w:
            a = self.gens[gi]
            if e < 0:
                a = self.gen_inverse(gi)
                e = -e
            out = matmul(out, _mat_power(a, e, self.p), self.p)
        return out

    def gen_inverse(self, gi: int) -> np.ndarray:
        key = ("ginv", gi)
        if key not in self._cache:
            s = self.group.generators[gi]
            self._cache[key] = _mat_power(self.gens[gi], self.group.element_order(s) - 1, self.p)
        return self._cache[key]

    @property
    def elem(self) -> np.ndarray:
        """Array ``(|G|, dim, dim)`` of all group-element actions."""
        if self._elem is None:
            self._expand(check=False)
        return self._elem

    def act(self, x: int) -> FpMatrix:
        return FpMatrix._wrap(self.elem[x].copy(), self.p)

    def algebra_action(self, theta: AlgebraElement) -> np.ndarray:
        """Matrix of ``v -> theta v``."""
        c = theta.coeffs
        nz = np.flatnonzero(c)
        out = np.zeros((self.dim, self.dim), dtype=np.int64)
        for x in nz:
            out += c[x] * self.elem[x]
        return out % self.p

    def norm_action(self) -> np.ndarray:
        return self.elem.sum(axis=0) % self.p

    def matrices(self) -> list[FpMatrix]:
        return [FpMatrix._wrap(a.copy(), self.p) for a in self.gens]

    # comparisons / serialization ------------------------------------------
    def same_as(self, other: "Module") -> bool:
        return (self.group == other.group and self.dim == other.dim
                and all(np.array_equal(a, b) for a, b in zip(self.gens, other.gens)))

    def to_json(self) -> dict:
        spec = self.group.spec.to_json() if self.group.spec else self.group.name
        return {"p": self.p, "group": spec, "dim": self.dim,
                "action": [a.tolist() for a in self.gens]}

    def conjugate(self, t: np.ndarray) -> "Module":
        """Same module in the basis given by the columns of invertible ``t``."""
        ti = inverse_array(t, self.p)
        return Module(self.group, [matmul(ti, matmul(a, t, self.p), self.p) for a in self.gens], check=False)


# ----------------------------------------------------------------------
# maps


class ModuleMap:
    """A kG-linear map; ``matrix`` is ``target.dim x source.dim``."""

    def __init__(self, source: Module, target: Module, matrix, *, check: bool = True):
        a = matrix.a if isinstance(matrix, FpMatrix) else np.array(matrix, dtype=np.int64) % source.p
        if a.size == 0:
            a = np.zeros((target.dim, source.dim), dtype=np.int64)
        if a.shape != (target.dim, source.dim):
            raise ModuleError(f"map matrix has shape {a.shape}, expected {(target.dim, source.dim)}")
        if source.group != target.group:
            raise GroupError("map between modules over different groups")
        a.flags.writeable = False
        self.source = source
        self.target = target
        self.matrix = a
        self.p = source.p
        if check and not self.is_intertwiner():
            raise ModuleError("matrix does not intertwine the group actions")

    def is_intertwiner(self) -> bool:
        p = self.p
        return all(np.array_equal(matmul(t, self.matrix, p), matmul(self.matrix, s, p))
                   for s, t in zip(self.source.gens, self.target.gens))

    def __repr__(self) -> str:
        return f"<ModuleMap {self.source.dim} -> {self.target.dim}>"

    def __matmul__(self, other: "ModuleMap") -> "ModuleMap":
        """``self @ other`` is the composite ``self ∘ other``."""
        if other.target is not self.source and not other.target.same_as(self.source):
            raise ModuleError("maps are not composable")
        return ModuleMap(other.source, self.target, matmul(self.matrix, other.matrix, self.p), check=False)

    def __add__(self, other: "ModuleMap") -> "ModuleMap":
        return ModuleMap(self.source, self.target, (self.matrix + other.matrix) % self.p, check=False)

    def __sub__(self, other: "ModuleMap") -> "ModuleMap":
        return ModuleMap(self.source, self.target, (self.matrix - other.matrix) % self.p, check=False)

    def scale(self, c: int) -> "ModuleMap":
        return ModuleMap(self.source, self.target, (self.matrix * c) % self.p, check=False)

    def is_zero(self) -> bool:
        return not self.matrix.any()

    def fp(self) -> FpMatrix:
        return FpMatrix._wrap(self.matrix.copy(), self.p)

    @classmethod
    def identity(cls, m: Module) -> "ModuleMap":
        return cls(m, m, np.eye(m.dim, dtype=np.int64), check=False)

    @classmethod
    def zero(cls, source: Module, target: Module) -> "ModuleMap":
        return cls(source, target, np.zeros((target.dim, source.dim), dtype=np.int64), check=False)


def hom_basis(m: Module, n: Module) -> np.ndarray:
    """Basis of ``Hom_kG(m, n)`` as an array ``(k, n.dim, m.dim)``."""
    p, a, b = m.p, m.dim, n.dim
    if a == 0 or b == 0:
        return np.zeros((0, b, a), dtype=np.int64)
    eye_a, eye_b = np.eye(a, dtype=np.int64), np.eye(b, dtype=np.int64)
    # row-major vec(X): rho_N X -> kron(rho_N, I_a), X rho_M -> kron(I_b, rho_M^T)
    blocks = [(np.kron(t, eye_a) - np.kron(eye_b, s.T)) % p for s, t in zip(m.gens, n.gens)]
    sysm = np.vstack(blocks)
    ker = kernel_array(sysm, p)
    return ker.T.reshape(-1, b, a).copy()


# ----------------------------------------------------------------------
# constructors


def trivial_module(g: Group) -> Module:
    return Module(g, [np.eye(1, dtype=np.int64)] * len(g.generators), check=False, name="k")


def zero_module(g: Group) -> Module:
    return Module(g, [np.zeros((0, 0), dtype=np.int64)] * len(g.generators), check=False, name="0")


def regular_module(g: Group) -> Module:
    """kG acting on itself by left translation (basis = group elements)."""
    from .algebra import left_regular

    return Module(g, [left_regular(g, s) for s in g.generators], check=False, name="kG")


def free_module(g: Group, rank: int) -> Module:
    if rank == 0:
        return zero_module(g)
    return direct_sum(*([regular_module(g)] * rank))


def direct_sum(*mods: Module) -> Module:
    if not mods:
        raise ValueError("direct_sum needs at least one module")
    g = mods[0].group
    for m in mods[1:]:
        if m.group != g:
            raise GroupError("direct sum of modules over different groups")
    gens = []
    n = sum(m.dim for m in mods)
    for i in range(len(g.generators)):
        a = np.zeros((n, n), dtype=np.int64)
        off = 0
        for m in mods:
            a[off:off + m.dim, off:off + m.dim] = m.gens[i]
            off += m.dim
        gens.append(a)
    return Module(g, gens, check=False)


def jordan_module(g: Group, size: int) -> Module:
    """``k[x]/x^size`` over a cyclic group, with the generator acting as ``1 + x``."""
    if len(g.generators) != 1:
        raise GroupError(f"{g.name} is not presented as a cyclic group")
    if not 1 <= size <= g.order:
        raise ValueError(f"Jordan block size {size} outside [1, {g.order}]")
    a = np.eye(size, dtype=np.int64)
    a[np.arange(1, size), np.arange(size - 1)] = 1
    return Module(g, [a], check=False, name=f"J{size}")


def induced_module(g: Group, h: Iterable[int], transversal: Sequence[int] | None = None) -> Module:
    """Permutation module ``k_H ↑ G`` on the left cosets ``tH``."""
    h = frozenset(int(x) for x in h)
    if 0 not in h or g.closure(h) != h:
        raise GroupError("H is not a subgroup")
    reps = list(transversal) if transversal is not None else g.left_cosets(h)
    coset_of = _coset_index(g, h, reps)
    k = len(reps)
    gens = []
    for s in g.generators:
        a = np.zeros((k, k), dtype=np.int64)
        for i, t in enumerate(reps):
            a[coset_of[int(g.mul[s, t])], i] = 1
        gens.append(a)
    return Module(g, gens, check=False, name=f"k_H^G[{len(h)}]")


def _coset_index(g: Group, h: frozenset[int], reps: Sequence[int]) -> np.ndarray:
    coset_of = -np.ones(g.order, dtype=np.int64)
    for i, t in enumerate(reps):
        for x in h:
            y = int(g.mul[t, x])
            if coset_of[y] != -1:
                raise GroupError("invalid transversal: cosets overlap")
            coset_of[y] = i
    if (coset_of < 0).any() or len(reps) * len(h) != g.order:
        raise GroupError("invalid transversal: cosets do not cover G")
    return coset_of


def induce(m: Module, g: Group, embedding: Sequence[int],
           transversal: Sequence[int] | None = None) -> Module:
    """``kG ⊗_{kH} m`` for a module over H embedded in G by ``embedding``.

    Basis vector ``t_i ⊗ v_j`` sits at index ``i * m.dim + j``.
    """
    h_elems = frozenset(int(x) for x in embedding)
    back = {int(e): i for i, e in enumerate(embedding)}
    reps = list(transversal) if transversal is not None else g.left_cosets(h_elems)
    coset_of = _coset_index(g, h_elems, reps)
    d, k = m.dim, len(reps)
    gens = []
    for s in g.generators:
        a = np.zeros((k * d, k * d), dtype=np.int64)
        for i, t in enumerate(reps):
            x = int(g.mul[s, t])
            j = int(coset_of[x])
            hh = int(g.mul[g.inv[reps[j]], x])
            a[j * d:(j + 1) * d, i * d:(i + 1) * d] = m.elem[back[hh]]
        gens.append(a)
    return Module(g, gens, check=False)


def induce_map(f: ModuleMap, g: Group, embedding: Sequence[int],
               transversal: Sequence[int] | None = None) -> ModuleMap:
    """``f ↑ G``: block diagonal with one copy of f per coset."""
    src = induce(f.source, g, embedding, transversal)
    tgt = induce(f.target, g, embedding, transversal)
    k = src.dim // max(f.source.dim, 1) if f.source.dim else tgt.dim // max(f.target.dim, 1)
    mat = np.kron(np.eye(k, dtype=np.int64), f.matrix)
    return ModuleMap(src, tgt, mat)


def restrict_to_subgroup(m: Module, h: Group, embedding: Sequence[int]) -> Module:
    return Module(h, [m.elem[int(embedding[s])] for s in h.generators], check=False)


def dual_module(m: Module) -> Module:
    """``M* = Hom_k(M, k)`` with ``(g φ)(v) = φ(g^{-1} v)``: generator g acts as ``rho(g^{-1})^T``."""
    gens = [m.gen_inverse(i).T.copy() for i in range(len(m.gens))]
    d = Module(m.group, gens, check=False)
    return d


def dual_map(f: ModuleMap, source_dual: Module | None = None, target_dual: Module | None = None) -> ModuleMap:
    """``f*: N* -> M*`` (transpose)."""
    nd = target_dual if target_dual is not None else dual_module(f.target)
    md = source_dual if source_dual is not None else dual_module(f.source)
    return ModuleMap(nd, md, f.matrix.T.copy(), check=False)


# ----------------------------------------------------------------------
# submodules and quotients


@dataclass
class Submodule:
    """Columns of ``basis`` span a G-stable subspace of ``parent``."""

    parent: Module
    basis: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def module(self) -> Module:
        return restrict(self.parent, self.basis)

    def contains(self, vectors: np.ndarray) -> bool:
        return span_contains(self.basis, vectors, self.parent.p)


def span_contains(basis: np.ndarray, vectors: np.ndarray, p: int) -> bool:
    if vectors.size == 0 or not vectors.any():
        return True
    if basis.shape[1] == 0:
        return False
    return rank_array(np.hstack([basis, vectors]), p) == rank_array(basis, p)


def is_stable(m: Module, basis: np.ndarray) -> bool:
    return all(span_contains(basis, matmul(a, basis, m.p), m.p) for a in m.gens)


def spin(m: Module, vectors: np.ndarray) -> np.ndarray:
    """Basis of the submodule generated by the columns of ``vectors``."""
    p = m.p
    basis = column_basis_array(np.asarray(vectors, dtype=np.int64) % p, p)
    while True:
        grown = np.hstack([basis] + [matmul(a, basis, p) for a in m.gens])
        nb = column_basis_array(grown, p)
        if nb.shape[1] == basis.shape[1]:
            return basis
        basis = nb


def restrict(m: Module, basis: np.ndarray) -> Module:
    """The submodule spanned by ``basis`` (assumed G-stable) in that basis."""
    p = m.p
    k = basis.shape[1]
    if k == 0:
        return zero_module(m.group)
    rows, inv = left_inverse_rows(basis, p)
    gens = [matmul(inv, matmul(a, basis, p)[rows], p) for a in m.gens]
    return Module(m.group, gens, check=False)


@dataclass
class Quotient:
    module: Module
    projection: np.ndarray   # (quotient dim) x (parent dim)
    section: np.ndarray      # parent coordinates of the chosen quotient basis


def quotient(m: Module, basis: np.ndarray) -> Quotient:
    """``m / span(basis)``; ``basis`` must be G-stable with independent columns."""
    p, n = m.p, m.dim
    k = basis.shape[1]
    if k == 0:
        eye = np.eye(n, dtype=np.int64)
        return Quotient(m, eye, eye)
    rows, binv = left_inverse_rows(basis, p)
    comp = [j for j in range(n) if j not in set(rows)]
    # coordinates along comp after removing the span: v_C - B_C B_R^{-1} v_R
    proj = np.zeros((len(comp), n), dtype=np.int64)
    proj[np.arange(len(comp)), comp] = 1
    proj[:, rows] = (proj[:, rows] - matmul(basis[comp], binv, p)) % p
    section = np.zeros((n, len(comp)), dtype=np.int64)
    section[comp, np.arange(len(comp))] = 1
    gens = [matmul(proj, matmul(a, section, p), p) for a in m.gens]
    return Quotient(Module(m.group, gens, check=False), proj, section)


# ----------------------------------------------------------------------
# series


def invariants(m: Module) -> Submodule:
    """``M^G``: common fixed vectors of the generators."""
    if m.dim == 0:
        return Submodule(m, np.zeros((0, 0), dtype=np.int64))
    eye = np.eye(m.dim, dtype=np.int64)
    stacked = np.vstack([(a - eye) % m.p for a in m.gens])
    return Submodule(m, kernel_array(stacked, m.p))


def radical_submodule(m: Module, basis: np.ndarray | None = None) -> np.ndarray:
    """Basis of ``J X`` where X = span(basis) is a submodule (default X = M)."""
    p = m.p
    if basis is None:
        basis = np.eye(m.dim, dtype=np.int64)
    if basis.shape[1] == 0:
        return basis
    eye = np.eye(m.dim, dtype=np.int64)
    # J X is the submodule generated by (s - 1) X over generators s
    moved = np.hstack([matmul((a - eye) % p, basis, p) for a in m.gens])
    if not moved.any():
        return np.zeros((m.dim, 0), dtype=np.int64)
    return spin(m, moved)


def radical_series(m: Module) -> list[np.ndarray]:
    """Bases of ``J^i M`` for ``i = 0..h`` with ``J^h M = 0``."""
    out = [np.eye(m.dim, dtype=np.int64)]
    while out[-1].shape[1]:
        out.append(radical_submodule(m, out[-1]))
    return out


def socle_series(m: Module) -> list[np.ndarray]:
    """Bases of ``Soc^i M`` for ``i = 0..L`` with ``Soc^L M = M``."""
    p, n = m.p, m.dim
    eye = np.eye(n, dtype=np.int64)
    out = [np.zeros((n, 0), dtype=np.int64)]
    while out[-1].shape[1] < n:
        prev = out[-1]
        q = quotient(m, prev).projection if prev.shape[1] else eye
        stacked = np.vstack([matmul(q, (a - eye) % p, p) for a in m.gens])
        out.append(kernel_array(stacked, p))
        if out[-1].shape[1] == prev.shape[1]:
            raise InternalError("socle series stalled")
    return out


def coinvariants_dim(m: Module) -> int:
    """``dim M / JM``."""
    return m.dim - radical_submodule(m).shape[1]


def radical_length(m: Module) -> int:
    return len(radical_series(m)) - 1


@dataclass
class SeriesReport:
    socle_dims: list[int]      # dim Soc^i M, i = 1..L
    radical_dims: list[int]    # dim J^i M, i = 1..h
    radical_length: int

    def to_json(self) -> dict:
        return {"socle_dims": self.socle_dims, "radical_dims": self.radical_dims,
                "radical_length": self.radical_length}


def socle_radical_series(m: Module) -> SeriesReport:
    key = "series"
    if key not in m._cache:
        soc = [b.shape[1] for b in socle_series(m)[1:]]
        rad = [b.shape[1] for b in radical_series(m)[1:]]
        m._cache[key] = SeriesReport(soc, rad, len(rad))
    return m._cache[key]


# ----------------------------------------------------------------------
# projectives


@dataclass
class Splitting:
    """``M = F ⊕ core`` with F free of rank ``free_rank`` and norm zero on core."""

    free_rank: int
    core: Module
    inclusion: np.ndarray    # core -> M
    projection: np.ndarray   # M -> core
    free_part: np.ndarray    # basis of F inside M


def split_projective_free(m: Module) -> Splitting:
    """Split off a maximal free summand.

    The free rank equals ``rank(N)`` for the norm N.  Pick v_1..v_t whose
    norms are independent; ``kG v_i`` are independent free submodules.  With
    functionals λ_j dual to the ``N v_i``, ``π_j(w) = Σ_g λ_j(g^{-1} w) g``
    is a module map ``M -> kG`` and ``ker π`` is a complement.
    """
    p, n, G = m.p, m.dim, m.group
    if n == 0:
        return Splitting(0, m, np.zeros((0, 0), dtype=np.int64), np.zeros((0, 0), dtype=np.int64),
                         np.zeros((0, 0), dtype=np.int64))
    nm = m.norm_action()
    t = rank_array(nm, p)
    eye = np.eye(n, dtype=np.int64)
    if t == 0:
        return Splitting(0, m, eye, eye, np.zeros((n, 0), dtype=np.int64))
    _, piv = rref_array(nm, p)
    vs = piv[:t]                       # basis vectors e_v with independent N e_v
    nv = nm[:, vs]                     # n x t
    # functionals λ (t x n) with λ N v_i = δ_ij
    rows, ninv = left_inverse_rows(nv, p)
    lam = np.zeros((t, n), dtype=np.int64)
    lam[:, rows] = ninv
    elem = m.elem
    inv = G.inv
    # π(w)[j, g] = λ_j ρ(g^{-1}) w  -> stacked matrix (t*|G|) x n
    pi = np.einsum("jx,gxy->jgy", lam, elem[inv]).reshape(t * G.order, n) % p
    free_basis = np.hstack([elem[:, :, v].T for v in vs])   # columns ρ(g) e_v
    # π ∘ (inclusion of free part) must be invertible
    comp = matmul(pi, free_basis, p)
    if rank_array(comp, p) != t * G.order:
        raise InternalError("free summand failed the retraction check")
    ker = kernel_array(pi, p)
    core = restrict(m, ker)
    # projection M -> core along the free part
    full = np.hstack([ker, free_basis])
    coords = inverse_array(full, p)
    proj = coords[:ker.shape[1]]
    return Splitting(t, core, ker, proj, free_basis)


def projective_free_part(m: Module) -> Module:
    return split_projective_free(m).core


def projective_cover(m: Module) -> tuple[Module, ModuleMap]:
    """Minimal free cover ``(kG)^d -> M`` with ``d = dim M/JM``.

    The i-th free generator goes to a lift of the i-th top basis vector.
    """
    key = "cover"
    if key in m._cache:
        return m._cache[key]
    p, G = m.p, m.group
    jm = radical_submodule(m)
    if jm.shape[1]:
        rows, _ = left_inverse_rows(jm, p)
    else:
        rows = []
    tops = [j for j in range(m.dim) if j not in set(rows)]
    d = len(tops)
    cover = free_module(G, d)
    if d == 0:
        mat = np.zeros((m.dim, 0), dtype=np.int64)
    else:
        mat = np.hstack([m.elem[:, :, j].T for j in tops])
    f = ModuleMap(cover, m, mat, check=False)
    if rank_array(mat, p) != m.dim:
        raise InternalError("projective cover is not surjective")
    m._cache[key] = (cover, f)
    return cover, f


def injective_hull(m: Module) -> tuple[Module, ModuleMap]:
    """``M -> I(M) = P(M*)*``, dual to the projective cover of the dual."""
    md = dual_module(m)
    cover, pi = projective_cover(md)
    hull = dual_module(cover)
    # (M*)* has the same matrices as M
    return hull, ModuleMap(m, hull, pi.matrix.T.copy(), check=False)


def omega(m: Module) -> Module:
    """``Ω̃^1 M``: kernel of the projective cover, projective-free part."""
    cover, pi = projective_cover(m)
    if cover.dim == 0:
        return zero_module(m.group)
    ker = kernel_array(pi.matrix, m.p)
    return projective_free_part(restrict(cover, ker))


def omega_inverse(m: Module) -> Module:
    """``Ω̃^{-1} M = (Ω̃^1 (M*))*``."""
    return dual_module(omega(dual_module(m)))


def heller_shift(m: Module, i: int) -> Module:
    """``Ω̃^i M``; ``Ω̃^0 M`` is the projective-free part."""
    out = projective_free_part(m)
    step = omega if i > 0 else omega_inverse
    for _ in range(abs(i)):
        out = step(out)
    return out


def heller_of_trivial(g: Group, i: int) -> Module:
    """``Ω̃^i k``, cached on the group so every caller sees the same module."""
    cache = g._cache.setdefault("heller_k", {0: trivial_module(g)})
    if i in cache:
        return cache[i]
    if i > 0:
        out = omega(heller_of_trivial(g, i - 1))
    else:
        out = omega_inverse(heller_of_trivial(g, i + 1))
    out.name = f"Ω^{i}k"
    cache[i] = out
    return out


def trivial_period(g: Group, max_period: int = 8) -> int | None:
    """Smallest d >= 1 with ``Ω̃^d k ≅ k``, if some d <= max_period works.

    A one-dimensional module over a p-group in characteristic p is trivial,
    so the test is ``dim Ω̃^d k == 1``.
    """
    key = ("period", max_period)
    if key not in g._cache:
        found = None
        for d in range(1, max_period + 1):
            if heller_of_trivial(g, d).dim == 1:
                found = d
                break
            # periodic k keeps every shift within |G| + 1 dimensions
            if heller_of_trivial(g, d).dim > 2 * g.order:
                break
        g._cache[key] = found
    return g._cache[key]


# ----------------------------------------------------------------------
# isomorphism


@dataclass
class IsoVerdict:
    status: str                      # "isomorphic" | "not-isomorphic" | "unknown"
    intertwiner: np.ndarray | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.status == "isomorphic"


def jordan_type(m: Module, gen: int = 0) -> tuple[int, ...]:
    """Jordan block sizes (descending) of ``rho(s) - 1`` for generator ``gen``."""
    p, n = m.p, m.dim
    x = (m.gens[gen] - np.eye(n, dtype=np.int64)) % p
    ranks = [n]
    cur = np.eye(n, dtype=np.int64)
    while ranks[-1]:
        cur = matmul(cur, x, p)
        ranks.append(rank_array(cur, p))
    # blocks of size >= j: ranks[j-1] - ranks[j]
    ge = [ranks[j - 1] - ranks[j] for j in range(1, len(ranks))]
    sizes = []
    for j in range(len(ge)):
        exactly = ge[j] - (ge[j + 1] if j + 1 < len(ge) else 0)
        sizes += [j + 1] * exactly
    return tuple(sorted(sizes, reverse=True))


def fingerprint(m: Module) -> tuple:
    s = socle_radical_series(m)
    return (m.dim, tuple(s.socle_dims), tuple(s.radical_dims),
            tuple(jordan_type(m, i) for i in range(len(m.gens))))


def _batch_invertible(mats: np.ndarray, p: int) -> np.ndarray:
    """Invertibility of each matrix in a stack ``(B, n, n)`` over F_p."""
    a = mats.copy() % p
    b, n, _ = a.shape
    inv = np.array([0] + [pow(x, -1, p) for x in range(1, p)], dtype=np.int64)
    alive = np.ones(b, dtype=bool)
    idx = np.arange(b)
    for c in range(n):
        col = a[:, c:, c]
        has = col != 0
        ok = has.any(axis=1)
        alive &= ok
        piv = c + np.argmax(has, axis=1)
        rows_c = a[idx, c].copy()
        rows_p = a[idx, piv].copy()
        a[idx, c] = rows_p
        a[idx, piv] = rows_c
        scale = inv[a[:, c, c]]
        a[:, c] = (a[:, c] * scale[:, None]) % p
        factors = a[:, c + 1:, c].copy()
        a[:, c + 1:] = (a[:, c + 1:] - factors[:, :, None] * a[:, c, None, :]) % p
    return alive


def iso_test(a: Module, b: Module, *, exhaustive_limit: int = 2 ** 20,
             trials: int = 10_000, seed: int = 0) -> IsoVerdict:
    """Decide ``a ≅ b`` where feasible.

    Cheap invariants reject first.  Over cyclic groups the Jordan type is a
    complete invariant.  Otherwise the Hom space is searched for an
    invertible element: exhaustively when small, by sampling when not.
    """
    if a.group != b.group:
        return IsoVerdict("not-isomorphic", reason="different groups")
    if a.dim != b.dim:
        return IsoVerdict("not-isomorphic", reason=f"dimension {a.dim} != {b.dim}")
    if a.dim == 0:
        return IsoVerdict("isomorphic", np.zeros((0, 0), dtype=np.int64), "zero modules")
    fa, fb = fingerprint(a), fingerprint(b)
    if fa != fb:
        names = ["dimension", "socle series", "radical series", "generator Jordan types"]
        which = next(n for n, x, y in zip(names, fa, fb) if x != y)
        return IsoVerdict("not-isomorphic", reason=f"{which} differ")
    if all(np.array_equal(x, y) for x, y in zip(a.gens, b.gens)):
        return IsoVerdict("isomorphic", np.eye(a.dim, dtype=np.int64), "identical actions")
    cyclic = len(a.group.generators) == 1
    hab = hom_basis(a, b)
    dims = (len(hab), len(hom_basis(b, a)), len(hom_basis(a, a)), len(hom_basis(b, b)))
    if len(set(dims)) > 1:
        return IsoVerdict("not-isomorphic", reason=f"Hom dimensions differ {dims}")
    p, k = a.p, len(hab)
    rng = np.random.default_rng(seed)
    batch = 512
    done = 0
    while done < trials:
        c = rng.integers(0, p, size=(batch, k))
        cand = np.einsum("bk,kij->bij", c, hab) % p
        ok = _batch_invertible(cand, p)
        if ok.any():
            return IsoVerdict("isomorphic", cand[int(np.argmax(ok))], "invertible intertwiner found")
        done += batch
    if cyclic:
        # Jordan type agrees, which is complete for cyclic groups
        return IsoVerdict("isomorphic", None, "equal Jordan type over a cyclic group")
    if p ** k <= exhaustive_limit:
        chunk = 1 << 14
        total = p ** k
        for start in range(0, total, chunk):
            idx = np.arange(start, min(total, start + chunk))
            digits = (idx[:, None] // (p ** np.arange(k))[None, :]) % p
            cand = np.einsum("bk,kij->bij", digits, hab) % p
            ok = _batch_invertible(cand, p)
            if ok.any():
                return IsoVerdict("isomorphic", cand[int(np.argmax(ok))], "exhaustive search")
        return IsoVerdict("not-isomorphic", reason="no invertible element in Hom (exhaustive)")
    return IsoVerdict("unknown", reason=f"Hom space of dimension {k} too large to search")


def is_heller_of_trivial(m: Module, search: int = 4) -> int | None:
    """Some i in ``[-search, search]`` with ``m ≅ Ω̃^i k``, else None."""
    g = m.group
    order = [0]
    for j in range(1, search + 1):
        order += [j, -j]
    for i in order:
        target = heller_of_trivial(g, i)
        if target.dim != m.dim:
            continue
        if iso_test(m, target).status == "isomorphic":
            return i
    return None


# ----------------------------------------------------------------------
# random modules


def random_module(g: Group, rng: np.random.Generator, max_dim: int = 8,
                  projective_free: bool = True, min_dim: int = 1) -> Module:
    """A random module built from quotients/submodules of small free modules.

    Rejection-samples until ``min_dim <= dim <= max_dim``.
    """
    p = g.p
    for _ in range(1000):
        rank = int(rng.integers(1, 3)) if g.order * 2 <= 4 * max_dim else 1
        free = free_module(g, rank)
        nvec = int(rng.integers(1, 3))
        vecs = rng.integers(0, p, size=(free.dim, nvec))
        sub = spin(free, vecs)
        choice = rng.random()
        if choice < 0.45:
            m = quotient(free, sub).module
        elif choice < 0.8:
            m = restrict(free, sub)
        else:
            m = quotient(free, sub).module
            if m.dim:
                m = direct_sum(m, trivial_module(g))
        if projective_free:
            m = projective_free_part(m)
        if min_dim <= m.dim <= max_dim:
            t = _random_invertible(m.dim, p, rng)
            return m.conjugate(t)
    raise RuntimeError("random_module: rejection sampling failed")


def _random_invertible(n: int, p: int, rng: np.random.Generator) -> np.ndarray:
    while True:
        t = rng.integers(0, p, size=(n, n))
        if rank_array(t, p) == n:
            return t


def random_hom(m: Module, n: Module, rng: np.random.Generator) -> ModuleMap:
    basis = hom_basis(m, n)
    if len(basis) == 0:
        return ModuleMap.zero(m, n)
    c = rng.integers(0, m.p, size=len(basis))
    return ModuleMap(m, n, np.einsum("k,kij->ij", c, basis) % m.p, check=False)
