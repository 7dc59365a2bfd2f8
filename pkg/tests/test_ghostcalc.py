import numpy as np
import pytest

from stmod.algebra import AlgebraElement, group_element
from stmod.ghostcalc import (
    abelian_bounds,
    benson_witness,
    classify_ghost_number_two,
    closed_form_cyclic,
    composite_bound_check,
    cyclic_group,
    generating_length_upper,
    ghost_length,
    ghost_number_cyclic,
    induction_check,
    length_report,
    q8_example,
    q8_module,
)
from stmod.groups import CapError, GroupError, cyclic_subgroup, group, nilpotency_index, subgroup_as_group
from stmod.modules import (
    ModuleMap,
    direct_sum,
    heller_of_trivial,
    jordan_module,
    omega,
    omega_inverse,
    radical_length,
    random_module,
    trivial_module,
)
from stmod.stmaps import PreconditionError, ghost_subspace, is_ghost, is_stably_trivial, theta_multiplication
from stmod.verify import random_chain

CYCLIC_UP_TO_9 = ["C2", "C3", "C4", "C5", "C7", "C8", "C9"]


def xm1(g, gen=0):
    return group_element(g, g.generators[gen]) - AlgebraElement.one(g)


# ghost lengths ----------------------------------------------------------------

def test_ghost_length_of_k(groups):
    for name in ("C4", "C9", "Q8"):
        assert ghost_length(trivial_module(groups(name))) == 1


def test_j2_over_c5_sandwiched(groups):
    g = groups("C5")
    j2 = jordan_module(g, 2)
    x = theta_multiplication(j2, xm1(g))
    # one nontrivial ghost out of J2 forces length >= 2; the radical series gives <= 2
    assert is_ghost(x).is_ghost and not is_stably_trivial(x)
    assert radical_length(j2) == 2
    assert ghost_length(j2) == 2


@pytest.mark.parametrize("name", CYCLIC_UP_TO_9)
def test_jordan_ghost_lengths(name):
    g = group(name)
    n = g.order
    for i in range(1, n):
        j = jordan_module(g, i)
        gl = ghost_length(j)
        assert gl == closed_form_cyclic(n, i) == min(i, n - i)
        assert ghost_length(omega(j)) == gl
        assert ghost_length(omega_inverse(j)) == gl
        assert gl <= generating_length_upper(j)[0] <= radical_length(j) < nilpotency_index(g) <= n


def test_ghost_length_nonperiodic_rejected(groups):
    with pytest.raises(PreconditionError):
        ghost_length(random_module(groups("V4"), np.random.default_rng(0)))


def test_length_report(groups):
    rep = length_report(jordan_module(groups("C8"), 3))
    assert rep.ghost_length == 3 and rep.generating_upper == 3
    assert "universal-ghost-iteration" in rep.methods
    v4 = groups("V4")
    rep = length_report(heller_of_trivial(v4, 2))
    assert rep.ghost_length == (1, 1) and rep.certificate["method"] == "heller-shift-of-k"


def test_generating_length_examples(groups):
    assert generating_length_upper(jordan_module(groups("C8"), 3))[0] == 3
    v4 = groups("V4")
    six = direct_sum(heller_of_trivial(v4, 1), heller_of_trivial(v4, -1))
    assert six.dim == 6
    assert generating_length_upper(six)[0] == 2
    assert generating_length_upper(heller_of_trivial(v4, 1))[0] == 1


def test_v4_generating_length_at_most_two(groups):
    g = groups("V4")
    rng = np.random.default_rng(8)
    for _ in range(30):
        assert generating_length_upper(random_module(g, rng, max_dim=10))[0] <= 2


# cyclic ghost numbers ----------------------------------------------------------

@pytest.mark.parametrize("p,r,number", [(2, 1, 1), (3, 1, 1), (2, 2, 2), (5, 1, 2), (3, 2, 4), (2, 3, 4), (7, 1, 3)])
def test_ghost_number_cyclic(p, r, number):
    rep = ghost_number_cyclic(p, r)
    assert rep["ghost_number"] == number and rep["ok"]
    assert rep["witness"]["stably_nontrivial"]


def test_cyclic_caps_and_validation():
    with pytest.raises(CapError):
        cyclic_group(2, 5)
    with pytest.raises(GroupError):
        cyclic_group(4, 1)
    with pytest.raises(GroupError):
        cyclic_group(2, 0)


def test_monotone_under_subgroups():
    c2 = ghost_number_cyclic(2, 1)["ghost_number"]
    assert c2 <= ghost_number_cyclic(2, 2)["ghost_number"]
    assert c2 <= abelian_bounds(group("V4")).lower


# Benson witnesses -----------------------------------------------------------

def test_benson_c4(groups):
    g = groups("C4")
    h, _ = cyclic_subgroup(g, g.power(g.generators[0], 2))
    cert = benson_witness(g, h, xm1(g), [xm1(g)], check_window=True)
    assert cert.ok and cert.window_ghost == "ghost-exact"


def test_benson_v4(groups):
    g = groups("V4")
    a, _ = g.generators
    cert = benson_witness(g, {0, a}, xm1(g, 1), [xm1(g, 1)], check_window=True)
    assert cert.ok and cert.chain_length == 1 and cert.window_ghost == "ghost-in-window"


def test_benson_c2_c4(groups):
    g = groups("C2xC4")
    g0 = g.generators[0]
    theta = xm1(g, 1) ** 3
    cert = benson_witness(g, {0, g0}, theta, [xm1(g, 1)] * 3)
    assert cert.ok and cert.chain_length == 3


def test_benson_preconditions(groups):
    g = groups("V4")
    a, b = g.generators
    with pytest.raises(PreconditionError, match="sum to zero"):
        benson_witness(g, {0, a}, xm1(g, 0))
    with pytest.raises(PreconditionError, match="proper"):
        benson_witness(g, set(g.elements), xm1(g, 1))
    q8 = groups("Q8")
    with pytest.raises(PreconditionError, match="central"):
        benson_witness(q8, cyclic_subgroup(q8, q8.generators[1])[0], xm1(q8, 0))


# abelian bounds ------------------------------------------------------------

@pytest.mark.parametrize("name,m,bounds", [
    ("C2xC2", 3, (2, 2)),
    ("C2xC4", 5, (4, 4)),
    ("C3xC3", 5, (3, 4)),
    ("C2xC2xC2", 4, (3, 3)),
    ("C4xC4", 7, (5, 6)),
    ("C3", 3, (1, 2)),
])
def test_abelian_bounds(name, m, bounds):
    rep = abelian_bounds(group(name))
    assert rep.nilpotency_index == m
    assert (rep.lower, rep.upper) == bounds
    assert rep.witness["ok"]


def test_abelian_bounds_rejects_nonabelian(groups):
    with pytest.raises(PreconditionError):
        abelian_bounds(groups("Q8"))


def test_classification_of_ghost_number_two():
    rep = classify_ghost_number_two()
    assert rep["ghost_number_two"] == ["C2xC2", "C4", "C5"]
    assert rep["undecided"] == []
    rows = {r["group"]: r for r in rep["groups"]}
    assert rows["C2xC2xC2"]["lower"] == rows["C2xC2xC2"]["exact"] == 3
    assert rows["C8"]["exact"] == 4
    assert rows["C3xC3"]["lower"] >= 3


# composite chains -------------------------------------------------------------

@pytest.mark.parametrize("name,length", [("C2", 1), ("V4", 2), ("Q8", 4), ("C4", 3)])
def test_long_chains_are_trivial(name, length):
    g = group(name)
    rng = np.random.default_rng(21)
    for _ in range(4):
        rep = composite_bound_check(g, random_chain(g, length, rng, 6))
        assert rep.stably_trivial and rep.ok


def test_chain_containments_for_short_chains(groups):
    g = groups("C8")
    rng = np.random.default_rng(4)
    for _ in range(6):
        rep = composite_bound_check(g, random_chain(g, 2, rng, 7))
        assert rep.ok


def test_chain_composability(groups):
    g = groups("C4")
    a, b = jordan_module(g, 2), jordan_module(g, 3)
    with pytest.raises(ValueError):
        composite_bound_check(g, [ModuleMap.identity(a), ModuleMap.identity(b)])
    with pytest.raises(ValueError):
        composite_bound_check(g, [])


def test_nonzero_windowed_ghosts_exist_over_c8(groups):
    # guards the chain tests against being vacuous
    g = groups("C8")
    j4 = jordan_module(g, 4)
    assert len(ghost_subspace(j4, j4, (-2, 2))) > 0


# quaternion example ---------------------------------------------------------

def test_q8_example():
    rep = q8_example()
    assert rep["ok"]
    assert rep["invariants_dim"] == 1
    assert rep["dim_mod_order"] == 3
    assert rep["ghost_length"] == 2
    assert rep["group_bounds"] == [2, 4]
    assert rep["period"] == 4


def test_q8_module_is_not_a_shift_of_k():
    m = q8_module()
    assert m.dim % 8 not in (1, 7)


# induction -----------------------------------------------------------------


def test_induction_c4_in_c8(groups):
    g = groups("C8")
    hs = g.closure([g.power(g.generators[0], 2)])
    h, _ = subgroup_as_group(g, hs)
    f = theta_multiplication(jordan_module(h, 2), xm1(h))
    rep = induction_check(g, hs, f)
    assert rep["ok"] and not rep["trivial_over_G"] and rep["ghost"] == "ghost-exact"
    zero = ModuleMap.zero(f.source, f.target)
    assert induction_check(g, hs, zero)["trivial_over_G"]


def test_induction_c4_in_c2xc4(groups):
    g = groups("C2xC4")
    hs = g.closure([g.generators[1]])
    h, _ = subgroup_as_group(g, hs)
    f = theta_multiplication(jordan_module(h, 2), xm1(h))
    rep = induction_check(g, hs, f, window=(-2, 2))
    assert rep["ok"] and not rep["trivial_over_H"] and not rep["trivial_over_G"]
    assert rep["ghost"] == "ghost-in-window"


def test_induction_rejects_foreign_map(groups):
    g = groups("C8")
    f = ModuleMap.identity(trivial_module(groups("V4")))
    with pytest.raises(GroupError):
        induction_check(g, g.closure([g.power(g.generators[0], 2)]), f)
