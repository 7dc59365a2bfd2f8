"""The Klein four group: where the generating hypothesis breaks.

k V_4 is not periodic, so Tate cohomology grows and ghost verdicts are
only checked in a window of degrees.  A permutation module gives a ghost
that is not stably trivial, and every projective-free module is built in
two steps from trivial modules, so two is the ghost number.
"""

import numpy as np

from stmod.algebra import AlgebraElement, group_element
from stmod.ghostcalc import abelian_bounds, benson_witness, generating_length_upper
from stmod.groups import group
from stmod.modules import heller_of_trivial, induced_module, random_module, trivial_module
from stmod.stmaps import is_ghost, is_stably_trivial, tate_space, theta_multiplication

g = group("V4")
a, b = g.generators
k = trivial_module(g)

print("Heller shifts of k:", {i: heller_of_trivial(g, i).dim for i in range(-3, 4)})
print("Tate dims of k:    ", {i: tate_space(k, i).dim for i in range(-3, 4)})

# k_<a> induced up to V4, with b - 1 acting on it
perm = induced_module(g, g.closure([a]))
f = theta_multiplication(perm, group_element(g, b) - AlgebraElement.one(g))
print(f"\n(b-1) on k_<a>↑V4: {is_ghost(f).status}, stably trivial: {bool(is_stably_trivial(f))}")
cert = benson_witness(g, g.closure([a]), group_element(g, b) - AlgebraElement.one(g))
print(f"restriction scalar {cert.restriction_scalar}, factoring solve says nontrivial: {cert.solve_nontrivial}")

rng = np.random.default_rng(0)
lengths = {}
for _ in range(40):
    m = random_module(g, rng, max_dim=8)
    bound, certificate = generating_length_upper(m)
    lengths[certificate["method"]] = max(lengths.get(certificate["method"], 0), bound)
print("\nlargest generating-length bound per certificate type:", lengths)

rep = abelian_bounds(g)
print(f"ghost number bounds for V4: [{rep.lower}, {rep.upper}]")
