"""Ghost lengths of every indecomposable module over k C_8.

Over a cyclic 2-group of order 8 the indecomposables are the Jordan blocks
J_1..J_8 (J_8 is free).  We compute each ghost length by iterating
universal ghosts, compare it with min(i, 8 - i), and then exhibit the map
that realises the ghost number.
"""

from stmod.algebra import AlgebraElement, group_element
from stmod.ghostcalc import ghost_length, ghost_number_cyclic
from stmod.groups import group
from stmod.modules import heller_of_trivial, jordan_module, omega
from stmod.stmaps import is_ghost, is_stably_trivial, tate_space, theta_multiplication

g = group("C8")
print(f"group {g.name}, period of k: Ω̃²k has dim {heller_of_trivial(g, 2).dim}")

print("\nblock  Ω̃(block)  Tate dims (deg -2..2)  ghost length")
for i in range(1, 8):
    j = jordan_module(g, i)
    tate = [tate_space(j, d).dim for d in range(-2, 3)]
    print(f"J{i}     J{omega(j).dim:<8} {tate}        {ghost_length(j)}")

# x = σ - 1 is central and lies in the radical, so multiplication by it is a ghost.
x = group_element(g, g.generators[0]) - AlgebraElement.one(g)
j4 = jordan_module(g, 4)
chain = theta_multiplication(j4, x ** 3)
print(f"\nx acting on J4: {is_ghost(theta_multiplication(j4, x)).status}")
print(f"x^3 on J4 (three ghosts composed) stably trivial? {bool(is_stably_trivial(chain))}")

rep = ghost_number_cyclic(2, 3)
print(f"ghost number of k{g.name}: {rep['ghost_number']} (closed form {rep['closed_form']})")
