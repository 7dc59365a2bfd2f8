"""Exact computations in the stable module category of a finite p-group over F_p."""

__version__ = "0.1.0"

from .fflin import FpMatrix, FieldError
from .groups import Group, GroupSpec, build_group, group, jennings_chain, nilpotency_index
from .algebra import AlgebraElement, norm_element, radical_filtration
from .modules import (
    Module,
    ModuleMap,
    direct_sum,
    dual_module,
    heller_of_trivial,
    heller_shift,
    induced_module,
    iso_test,
    jordan_module,
    regular_module,
    trivial_module,
)
from .stmaps import is_ghost, is_stably_trivial, stable_hom, tate_space, universal_ghost
from .ghostcalc import abelian_bounds, ghost_length, ghost_number_cyclic

__all__ = [
    "FpMatrix", "FieldError", "Group", "GroupSpec", "build_group", "group", "jennings_chain",
    "nilpotency_index", "AlgebraElement", "norm_element", "radical_filtration", "Module", "ModuleMap",
    "direct_sum", "dual_module", "heller_of_trivial", "heller_shift", "induced_module", "iso_test", "jordan_module",
    "regular_module", "trivial_module", "is_ghost", "is_stably_trivial", "stable_hom", "tate_space",
    "universal_ghost", "abelian_bounds", "ghost_length", "ghost_number_cyclic",
]
