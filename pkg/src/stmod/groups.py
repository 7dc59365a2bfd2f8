"""Finite p-groups as explicit multiplication tables.

Elements are integers ``0..|G|-1`` with 0 the identity.  Abelian groups use
mixed-radix exponent vectors (first factor varies fastest); the two-generator
2-group families store ``x^i y^j`` at index ``i + j * 2^(n-1)``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .fflin import is_prime

FAMILIES = ("quaternion", "dihedral", "semidihedral", "modular")
_FAMILY_PREFIX = {"Q": "quaternion", "D": "dihedral", "SD": "semidihedral", "M": "modular"}

#: largest group order built by default
MAX_ORDER = 128


class GroupError(ValueError):
    pass


class CapError(RuntimeError):
    """A desk-scale computation cap was exceeded."""


def _prime_power(n: int) -> tuple[int, int] | None:
    if n < 2:
        return None
    for p in range(2, n + 1):
        if n % p == 0:
            a = 0
            while n % p == 0:
                n //= p
                a += 1
            return (p, a) if n == 1 else None
    return None


@dataclass(frozen=True)
class GroupSpec:
    """Declarative description of a supported p-group.

    ``factors`` are the cyclic orders of an abelian group; ``n`` gives
    order ``2^n`` for the non-abelian families.
    """

    kind: str
    p: int
    factors: tuple[int, ...] = ()
    n: int = 0

    def __post_init__(self):
        if not is_prime(self.p):
            raise GroupError(f"p={self.p} is not prime")
        if self.kind == "abelian":
            if not self.factors:
                raise GroupError("abelian group needs at least one invariant factor")
            for q in self.factors:
                pp = _prime_power(q)
                if pp is None or pp[0] != self.p:
                    raise GroupError(f"invariant factor {q} is not a power of {self.p}")
        elif self.kind in FAMILIES:
            if self.p != 2:
                raise GroupError(f"{self.kind} groups are 2-groups, got p={self.p}")
            if self.n < 3:
                raise GroupError(f"{self.kind} group needs n >= 3, got n={self.n}")
        else:
            raise GroupError(f"unknown group kind {self.kind!r}")

    @property
    def order(self) -> int:
        if self.kind == "abelian":
            return math.prod(self.factors)
        return 2 ** self.n

    @property
    def name(self) -> str:
        if self.kind == "abelian":
            return "x".join(f"C{q}" for q in self.factors)
        prefix = {v: k for k, v in _FAMILY_PREFIX.items()}[self.kind]
        return f"{prefix}{2 ** self.n}"

    @classmethod
    def abelian(cls, *factors: int) -> "GroupSpec":
        pp = _prime_power(factors[0]) if factors else None
        if pp is None:
            raise GroupError(f"bad invariant factors {factors}")
        return cls("abelian", pp[0], tuple(int(f) for f in factors))

    @classmethod
    def family(cls, kind: str, n: int) -> "GroupSpec":
        return cls(kind, 2, (), n)

    @classmethod
    def parse(cls, text: str) -> "GroupSpec":
        """Parse shorthand such as ``C4``, ``C2xC4``, ``V4``, ``Q8``, ``SD16``."""
        t = text.strip().replace(" ", "")
        if t.upper() == "V4":
            return cls.abelian(2, 2)
        m = re.fullmatch(r"(SD|Q|D|M)(\d+)", t, flags=re.IGNORECASE)
        if m:
            order = int(m.group(2))
            pp = _prime_power(order)
            if pp is None or pp[0] != 2:
                raise GroupError(f"{text}: order must be a power of 2")
            return cls.family(_FAMILY_PREFIX[m.group(1).upper()], pp[1])
        parts = re.split(r"[x*+⊕]", t)
        if all(re.fullmatch(r"C\d+", s, flags=re.IGNORECASE) for s in parts):
            return cls.abelian(*(int(s[1:]) for s in parts))
        raise GroupError(f"cannot parse group spec {text!r}")

    @classmethod
    def from_json(cls, obj) -> "GroupSpec":
        if isinstance(obj, str):
            return cls.parse(obj)
        kind = obj.get("kind")
        if kind == "abelian":
            factors = tuple(int(f) for f in obj.get("factors", ()))
            p = obj.get("p")
            if p is None:
                return cls.abelian(*factors)
            return cls("abelian", int(p), factors)
        if kind in FAMILIES:
            return cls(kind, int(obj.get("p", 2)), (), int(obj["n"]))
        raise GroupError(f"unknown group kind {kind!r}")

    def to_json(self) -> dict:
        if self.kind == "abelian":
            return {"kind": "abelian", "p": self.p, "factors": list(self.factors)}
        return {"kind": self.kind, "p": self.p, "n": self.n}


@dataclass(frozen=True)
class Relation:
    """``lhs == rhs`` with words given as ((generator index, exponent), ...)."""

    name: str
    lhs: tuple[tuple[int, int], ...]
    rhs: tuple[tuple[int, int], ...] = ()


class Group:
    """A finite p-group given by its full multiplication table."""

    def __init__(self, mul: np.ndarray, p: int, generators: Sequence[int], *,
                 name: str = "G", relations: Sequence[Relation] = (),
                 spec: GroupSpec | None = None, gen_names: Sequence[str] | None = None):
        mul = np.asarray(mul, dtype=np.int64)
        n = mul.shape[0]
        if mul.shape != (n, n):
            raise GroupError("multiplication table must be square")
        pp = _prime_power(n)
        if n > 1 and (pp is None or pp[0] != p):
            raise GroupError(f"order {n} is not a power of {p}")
        self.order = n
        self.p = p
        self.mul = mul
        self.mul.flags.writeable = False
        self.name = name
        self.spec = spec
        self.relations = tuple(relations)
        self.generators = tuple(int(g) for g in generators)
        self.gen_names = tuple(gen_names) if gen_names else tuple(f"g{i}" for i in range(len(self.generators)))
        self._validate()
        inv = np.zeros(n, dtype=np.int64)
        for g in range(n):
            inv[g] = int(np.flatnonzero(mul[g] == 0)[0])
        inv.flags.writeable = False
        self.inv = inv
        self._cache: dict = {}

    def _validate(self) -> None:
        n, mul = self.order, self.mul
        ar = np.arange(n)
        if not (np.array_equal(mul[0], ar) and np.array_equal(mul[:, 0], ar)):
            raise GroupError("0 is not a two-sided identity")
        for g in range(n):
            if len(np.unique(mul[g])) != n or len(np.unique(mul[:, g])) != n:
                raise GroupError("table is not a Latin square")
        left = mul[mul]                      # left[a, b, c] = (a*b)*c
        right = mul[np.arange(n)[:, None, None], mul[None, :, :]]  # a*(b*c)
        if not np.array_equal(left, right):
            raise GroupError("multiplication is not associative")
        if self.closure(self.generators) != frozenset(range(n)):
            raise GroupError("generators do not generate the group")

    def __repr__(self) -> str:
        return f"Group({self.name}, order={self.order}, p={self.p})"

    # basic arithmetic ------------------------------------------------
    @property
    def elements(self) -> range:
        return range(self.order)

    def mult(self, a: int, b: int) -> int:
        return int(self.mul[a, b])

    def power(self, g: int, e: int) -> int:
        if e < 0:
            g, e = int(self.inv[g]), -e
        out = 0
        for _ in range(e):
            out = int(self.mul[out, g])
        return out

    def element_order(self, g: int) -> int:
        k, x = 1, g
        while x != 0:
            x = int(self.mul[x, g])
            k += 1
        return k

    def commutator(self, a: int, b: int) -> int:
        """``a b a^-1 b^-1``."""
        m, inv = self.mul, self.inv
        return int(m[m[m[a, b], inv[a]], inv[b]])

    def word(self, w: Iterable[tuple[int, int]]) -> int:
        out = 0
        for gi, e in w:
            out = int(self.mul[out, self.power(self.generators[gi], e)])
        return out

    @property
    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.mul, self.mul.T))

    # subgroups ---------------------------------------------------------
    def closure(self, gens: Iterable[int]) -> frozenset[int]:
        """Subgroup generated by ``gens``."""
        gens = [int(g) for g in gens if g != 0]
        seen = {0}
        frontier = [0]
        while frontier:
            nxt = []
            for h in frontier:
                for g in gens:
                    x = int(self.mul[h, g])
                    if x not in seen:
                        seen.add(x)
                        nxt.append(x)
            frontier = nxt
        return frozenset(seen)

    def is_normal(self, sub: Iterable[int]) -> bool:
        s = frozenset(sub)
        for g in self.generators:
            gi = int(self.inv[g])
            for h in s:
                if int(self.mul[self.mul[g, h], gi]) not in s:
                    return False
        return True

    def left_cosets(self, sub: Iterable[int]) -> list[int]:
        """Left transversal of ``sub``, identity first, each rep minimal in its coset."""
        s = sorted(sub)
        seen: set[int] = set()
        reps = []
        for g in range(self.order):
            if g in seen:
                continue
            reps.append(g)
            seen.update(int(self.mul[g, h]) for h in s)
        return reps

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, Group):
            return NotImplemented
        return (self.p == other.p and self.generators == other.generators
                and np.array_equal(self.mul, other.mul))

    def __hash__(self) -> int:
        return hash((self.order, self.p, self.generators, self.mul[1].tobytes() if self.order > 1 else b""))


# ----------------------------------------------------------------------
# construction


def _abelian_table(factors: Sequence[int]) -> np.ndarray:
    n = math.prod(factors)
    idx = np.arange(n)
    digits = []
    rest = idx.copy()
    for q in factors:
        digits.append(rest % q)
        rest //= q
    mul = np.zeros((n, n), dtype=np.int64)
    place = 1
    for q, d in zip(factors, digits):
        mul += ((d[:, None] + d[None, :]) % q) * place
        place *= q
    return mul


def _family_data(kind: str, n: int) -> tuple[int, int]:
    """(twist s, y^2 exponent t) with y x y^-1 = x^s and y^2 = x^t."""
    N = 2 ** (n - 1)
    half = N // 2
    if kind == "quaternion":
        return N - 1, half
    if kind == "dihedral":
        return N - 1, 0
    if kind == "semidihedral":
        return (half - 1) % N, 0
    if kind == "modular":
        return (half + 1) % N, 0
    raise GroupError(kind)


def _family_table(kind: str, n: int) -> np.ndarray:
    N = 2 ** (n - 1)
    s, t = _family_data(kind, n)
    order = 2 * N
    mul = np.zeros((order, order), dtype=np.int64)
    for a in range(order):
        i, j = a % N, a // N
        for b in range(order):
            k, l = b % N, b // N
            # x^i y^j x^k y^l = x^(i + k s^j) y^(j+l), with y^2 = x^t
            e = i + k * (s if j else 1)
            jj = j + l
            if jj == 2:
                e += t
                jj = 0
            mul[a, b] = (e % N) + jj * N
    return mul


def build_group(spec: GroupSpec, cap_order: int = MAX_ORDER) -> Group:
    """Build and validate the group described by ``spec``."""
    if spec.order > cap_order:
        raise CapError(f"group order {spec.order} exceeds cap {cap_order}")
    if spec.kind == "abelian":
        factors = spec.factors
        mul = _abelian_table(factors)
        gens, place = [], 1
        for q in factors:
            gens.append(place)
            place *= q
        rels = [Relation(f"g{i}^{q}=1", ((i, q),)) for i, q in enumerate(factors)]
        for i in range(len(factors)):
            for j in range(i + 1, len(factors)):
                rels.append(Relation(f"g{i}g{j}=g{j}g{i}", ((i, 1), (j, 1)), ((j, 1), (i, 1))))
        return Group(mul, spec.p, gens, name=spec.name, relations=rels, spec=spec,
                     gen_names=[f"g{i}" for i in range(len(factors))])
    N = 2 ** (spec.n - 1)
    s, t = _family_data(spec.kind, spec.n)
    mul = _family_table(spec.kind, spec.n)
    rels = [
        Relation(f"x^{N}=1", ((0, N),)),
        Relation("y^2=1" if t == 0 else f"y^2=x^{t}", ((1, 2),), ((0, t),) if t else ()),
        Relation(f"yxy^-1=x^{s}" if s != N - 1 else "yxy^-1=x^-1", ((1, 1), (0, 1), (1, -1)), ((0, s),)),
    ]
    return Group(mul, 2, [1, N], name=spec.name, relations=rels, spec=spec, gen_names=["x", "y"])


def group(text: str) -> Group:
    """Shorthand: ``group("Q8")``."""
    return build_group(GroupSpec.parse(text))


def subgroup_as_group(g: Group, elements: Iterable[int]) -> tuple[Group, list[int]]:
    """A subgroup as a standalone Group, plus the embedding (new index -> old index).

    The identity stays at index 0; other elements keep their relative order.
    """
    elems = sorted(set(int(e) for e in elements))
    if 0 not in elems:
        raise GroupError("subset does not contain the identity")
    pos = {e: i for i, e in enumerate(elems)}
    sub = g.mul[np.ix_(elems, elems)]
    try:
        table = np.vectorize(pos.__getitem__)(sub)
    except KeyError:
        raise GroupError("subset is not closed under multiplication") from None
    # greedy generating set
    gens: list[int] = []
    cur = frozenset([0])
    for e in elems:
        if e not in cur:
            gens.append(e)
            cur = g.closure(gens)
    if cur != frozenset(elems):
        raise GroupError("subset is not a subgroup")
    new_gens = [pos[e] for e in gens]
    h = Group(table, g.p, new_gens, name=f"sub({g.name},{len(elems)})")
    return h, elems


# ----------------------------------------------------------------------
# structure


def center(g: Group) -> frozenset[int]:
    """Elements commuting with every element of ``g``."""
    mul = g.mul
    return frozenset(int(a) for a in range(g.order) if np.array_equal(mul[a], mul[:, a]))


def cyclic_subgroup(g: Group, generator: int) -> tuple[frozenset[int], list[int]]:
    """``<generator>`` and a left transversal with the identity first."""
    if generator == 0:
        raise GroupError("generator must not be the identity")
    h = g.closure([generator])
    return h, g.left_cosets(h)


def conjugacy_classes(g: Group) -> list[list[int]]:
    seen: set[int] = set()
    classes = []
    for a in range(g.order):
        if a in seen:
            continue
        cls = sorted({int(g.mul[g.mul[b, a], g.inv[b]]) for b in range(g.order)})
        seen.update(cls)
        classes.append(cls)
    return classes


@dataclass
class DimensionChain:
    """Jennings dimension subgroups ``F_1 ⊇ F_2 ⊇ ... ⊇ F_{d+1} = 1``.

    ``exponents[i-1]`` is ``e_i`` with ``p^{e_i} = [F_i : F_{i+1}]``.
    """

    subgroups: list[frozenset[int]]
    exponents: list[int]
    p: int

    @property
    def depth(self) -> int:
        return len(self.exponents)

    def nilpotency_index(self) -> int:
        return 1 + (self.p - 1) * sum(i * e for i, e in enumerate(self.exponents, start=1))

    def to_json(self) -> dict:
        return {
            "orders": [len(f) for f in self.subgroups],
            "exponents": list(self.exponents),
        }


def _check_modulus(g: Group, p: int) -> None:
    if p != g.p:
        raise GroupError(f"group {g.name} is a {g.p}-group, not a {p}-group")


def jennings_chain(g: Group, p: int | None = None) -> DimensionChain:
    """Dimension subgroups by ``F_n = [G, F_{n-1}] (F_{ceil(n/p)})^p``."""
    p = g.p if p is None else p
    _check_modulus(g, p)
    F = [None, frozenset(range(g.order))]  # 1-based
    n = 1
    while len(F[n]) > 1:
        n += 1
        gens = {g.commutator(a, b) for a in range(g.order) for b in F[n - 1]}
        gens |= {g.power(b, p) for b in F[-(-n // p)]}
        F.append(g.closure(gens))
        if n > g.order + 1:
            raise RuntimeError("Jennings recursion failed to terminate")
    subgroups = F[1:]
    exps = []
    for a, b in zip(subgroups, subgroups[1:]):
        idx = len(a) // len(b)
        e = round(math.log(idx, p))
        if p ** e != idx:
            raise RuntimeError("non-p-power index in dimension series")
        exps.append(e)
    return DimensionChain(subgroups, exps, p)


class NilpotencyMismatch(AssertionError):
    pass


def nilpotency_index(g: Group, p: int | None = None) -> int:
    """Smallest m with ``J(kG)^m = 0``, from Jennings' formula and from radical powers.

    The two computations must agree; disagreement raises NilpotencyMismatch.
    """
    p = g.p if p is None else p
    _check_modulus(g, p)
    from .algebra import radical_filtration

    by_formula = jennings_chain(g, p).nilpotency_index()
    direct = radical_filtration(g, p).nilpotency_index
    if by_formula != direct:
        raise NilpotencyMismatch(f"{g.name}: Jennings gives {by_formula}, radical powers give {direct}")
    return direct


def abelian_groups_of_order(p: int, a: int) -> list[GroupSpec]:
    """All abelian groups of order ``p^a``, one spec per partition of ``a``."""
    out = []

    def parts(n, maxpart):
        if n == 0:
            yield ()
            return
        for k in range(min(n, maxpart), 0, -1):
            for rest in parts(n - k, k):
                yield (k,) + rest

    for part in parts(a, a):
        out.append(GroupSpec("abelian", p, tuple(p ** k for k in part)))
    return out
