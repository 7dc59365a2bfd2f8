"""A three-dimensional module over the quaternion group of order 8.

Inside k Q_8 take the left ideal spanned by (x-1)(ε-1), (y-1)(ε-1) and
(y-1)(x-1)(ε-1) with ε = x².  It is indecomposable (one-dimensional
invariants), not a Heller shift of k (its dimension is 3 mod 8), and an
extension of k⊕k by k.  Because k is periodic of period 4 for Q_8, its ghost
length can be computed exactly.
"""

from stmod.algebra import radical_filtration
from stmod.ghostcalc import ghost_length, q8_example, q8_module
from stmod.groups import group
from stmod.modules import invariants, is_heller_of_trivial, socle_radical_series, trivial_period
from stmod.stmaps import universal_ghost

g = group("Q8")
print("radical dims of kQ8:", radical_filtration(g).dims)
print("period of k:", trivial_period(g))

m = q8_module(g)
print(f"\nmodule dim {m.dim}, invariants dim {invariants(m).dim}")
print("series:", socle_radical_series(m).to_json())
print("a Heller shift of k?", is_heller_of_trivial(m, 4))

u = universal_ghost(m)
print(f"universal ghost uses Tate generators in degrees {u.degrees}; cone has dim {u.triangle.cone.dim}")
print("ghost length:", ghost_length(m))

rep = q8_example()
print("group-level ghost number bounds:", rep["group_bounds"], "all checks ok:", rep["ok"])
