"""The group algebra kG (k = F_p) and its radical filtration."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .fflin import FpMatrix, column_basis_array, rank_array
from .groups import Group, GroupError


class AlgebraElement:
    """``sum_g coeffs[g] * g`` in kG."""

    __slots__ = ("group", "p", "coeffs")

    def __init__(self, group: Group, coeffs):
        c = np.array(coeffs, dtype=np.int64) % group.p
        if c.shape != (group.order,):
            raise ValueError(f"expected {group.order} coefficients, got shape {c.shape}")
        c.flags.writeable = False
        self.group = group
        self.p = group.p
        self.coeffs = c

    @classmethod
    def from_dict(cls, group: Group, terms: Mapping[int, int]) -> "AlgebraElement":
        c = np.zeros(group.order, dtype=np.int64)
        for g, a in terms.items():
            c[int(g)] += int(a)
        return cls(group, c)

    @classmethod
    def basis(cls, group: Group, g: int) -> "AlgebraElement":
        return cls.from_dict(group, {g: 1})

    @classmethod
    def one(cls, group: Group) -> "AlgebraElement":
        return cls.basis(group, 0)

    def to_dict(self) -> dict[int, int]:
        return {int(g): int(a) for g, a in enumerate(self.coeffs) if a}

    def _check(self, other: "AlgebraElement") -> None:
        if other.group is not self.group and other.group != self.group:
            raise GroupError("algebra elements over different groups")

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        return AlgebraElement(self.group, self.coeffs + other.coeffs)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        return AlgebraElement(self.group, self.coeffs - other.coeffs)

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.group, -self.coeffs)

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return multiply(self, other)
        return AlgebraElement(self.group, self.coeffs * int(other))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "AlgebraElement":
        out = AlgebraElement.one(self.group)
        for _ in range(n):
            out = multiply(out, self)
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.group == other.group and bool(np.array_equal(self.coeffs, other.coeffs))

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        terms = " + ".join(f"{a}*[{g}]" for g, a in self.to_dict().items()) or "0"
        return f"<{terms} in F{self.p}[{self.group.name}]>"

    def augmentation(self) -> int:
        return int(self.coeffs.sum() % self.p)

    def is_zero(self) -> bool:
        return not self.coeffs.any()

    def antipode(self) -> "AlgebraElement":
        """Image under ``g -> g^-1``."""
        c = np.zeros_like(self.coeffs)
        c[self.group.inv] = self.coeffs
        return AlgebraElement(self.group, c)


def multiply(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """Convolution product using the multiplication table."""
    a._check(b)
    g = a.group
    out = np.zeros(g.order, dtype=np.int64)
    for x in np.flatnonzero(a.coeffs):
        np.add.at(out, g.mul[x], a.coeffs[x] * b.coeffs)
    return AlgebraElement(g, out)


def group_element(g: Group, x: int) -> AlgebraElement:
    return AlgebraElement.basis(g, x)


def norm_element(g: Group) -> AlgebraElement:
    """``sum_{x in G} x``."""
    return AlgebraElement(g, np.ones(g.order, dtype=np.int64))


def is_central(a: AlgebraElement) -> bool:
    """Whether ``a`` commutes with every group generator (hence with all of kG)."""
    for s in a.group.generators:
        e = AlgebraElement.basis(a.group, s)
        if multiply(e, a) != multiply(a, e):
            return False
    return True


def right_regular(g: Group, x: int) -> np.ndarray:
    """Matrix of ``v -> v * x`` on kG in the group-element basis."""
    n = g.order
    m = np.zeros((n, n), dtype=np.int64)
    m[g.mul[:, x], np.arange(n)] = 1
    return m


def left_regular(g: Group, x: int) -> np.ndarray:
    """Matrix of ``v -> x * v`` on kG in the group-element basis."""
    n = g.order
    m = np.zeros((n, n), dtype=np.int64)
    m[g.mul[x, :], np.arange(n)] = 1
    return m


@dataclass
class RadicalFiltration:
    """Column bases of ``J^i`` inside kG for ``i = 0..m`` (last one empty)."""

    group: Group
    p: int
    bases: list[FpMatrix]

    @property
    def dims(self) -> list[int]:
        return [b.cols for b in self.bases]

    @property
    def nilpotency_index(self) -> int:
        return len(self.bases) - 1

    def power(self, i: int) -> FpMatrix:
        if i >= len(self.bases):
            return self.bases[-1]
        return self.bases[i]

    def contains(self, i: int, a: AlgebraElement) -> bool:
        """Whether ``a`` lies in ``J^i``."""
        b = self.power(i)
        v = a.coeffs.reshape(-1, 1)
        if b.cols == 0:
            return not v.any()
        return rank_array(np.hstack([b.a, v]), self.p) == b.cols


def radical_filtration(g: Group, p: int | None = None) -> RadicalFiltration:
    """Powers of the augmentation ideal ``J = J(kG)``.

    Uses ``J^{i+1} = sum_s J^i (s - 1)`` over group generators s, which holds
    because each ``J^i`` is a two-sided ideal and J is the left ideal
    generated by the ``s - 1``.
    """
    p = g.p if p is None else p
    if p != g.p:
        raise GroupError(f"group {g.name} is a {g.p}-group, not a {p}-group")
    key = ("radical", p)
    if key in g._cache:
        return g._cache[key]
    n = g.order
    eye = np.eye(n, dtype=np.int64)
    shifts = [(right_regular(g, s) - eye) % p for s in g.generators]
    aug = np.zeros((n, n - 1), dtype=np.int64)
    aug[0, :] = p - 1
    aug[np.arange(1, n), np.arange(n - 1)] = 1   # columns x - 1
    bases = [eye, aug]
    while bases[-1].shape[1]:
        cur = bases[-1]
        nxt = np.hstack([(r @ cur) % p for r in shifts])
        bases.append(column_basis_array(nxt, p))
        if len(bases) > n + 2:
            raise RuntimeError("radical powers did not terminate")
    filt = RadicalFiltration(g, p, [FpMatrix._wrap(b, p) for b in bases])
    g._cache[key] = filt
    return filt


def radical_powers_bruteforce(g: Group, p: int | None = None) -> list[int]:
    """Dimensions of ``J^i`` from spans of all products ``u v`` (slow oracle)."""
    p = g.p if p is None else p
    n = g.order
    one = [(np.eye(n, dtype=np.int64)[:, x] - (np.arange(n) == 0)) % p for x in range(1, n)]
    j1 = column_basis_array(np.array(one).T, p)
    cur = j1
    dims = [n, j1.shape[1]]
    while cur.shape[1]:
        prods = []
        for u in cur.T:
            ue = AlgebraElement(g, u)
            for v in j1.T:
                prods.append(multiply(ue, AlgebraElement(g, v)).coeffs)
        cur = column_basis_array(np.array(prods).T, p)
        dims.append(cur.shape[1])
    return dims


def dimension_subgroups_direct(g: Group, p: int | None = None) -> list[frozenset[int]]:
    """``F_i = {x : x - 1 in J^i}`` for ``i = 1..`` until trivial."""
    filt = radical_filtration(g, p)
    out = []
    i = 1
    while True:
        fi = frozenset(x for x in range(g.order)
                       if filt.contains(i, group_element(g, x) - AlgebraElement.one(g)))
        out.append(fi)
        if len(fi) == 1:
            return out
        i += 1


def central_radical_basis(g: Group) -> list[AlgebraElement]:
    """Basis of ``Z(kG) ∩ J(kG)``: class sums shifted into the augmentation ideal."""
    from .groups import conjugacy_classes

    out = []
    one = AlgebraElement.one(g)
    for cls in conjugacy_classes(g):
        if cls == [0]:
            continue
        s = AlgebraElement.from_dict(g, {x: 1 for x in cls})
        out.append(s - one * len(cls))
    return out
