"""Twisted conjugacy and equalizers in finitely generated nilpotent groups.

The group input model is a consistent polycyclic presentation.  The two
headline operations are:

* ``equalizer(G, phi, psi)`` — a finite generating set of
  ``{x in G : x phi = x psi}``;
* ``decide(G, phi, psi, u, v)`` — decide whether some ``x`` satisfies
  ``(x phi) u = v (x psi)``, returning a verified witness when one exists.

Both require ``G`` nilpotent and ``phi``, ``psi`` validated endomorphisms.
"""

from .equalizer import NotInCEqualizer, equalizer
from .morphism import GroupMap, InvalidMap, compose, inner_automorphism
from .oracle import (
    InfiniteGroup,
    brute_classes,
    brute_equalizer,
    brute_twisted,
    enumerate_group,
)
from .pcgroup import (
    DEFAULT_MAX_CLASS,
    Element,
    NotNilpotent,
    PcError,
    PcPresentation,
    Subgroup,
    collect,
    commutator,
    conjugate,
    consistency_check,
    constructive_membership,
    derived_subgroup,
    induced_sequence,
    invert,
    lower_central_series,
    multiply,
    nilpotency_class,
    normal_closure,
    power,
    refine_to_lcs,
)
from .twisted import Decision, InternalLiftFailure, decide
from .zlinalg import (
    IntMatrix,
    hermite_normal_form,
    kernel_mod_lattice,
    smith_normal_form,
    solve_mod_lattice,
)

__version__ = "1.0.0"

__all__ = [
    "PcPresentation",
    "Element",
    "Subgroup",
    "PcError",
    "NotNilpotent",
    "DEFAULT_MAX_CLASS",
    "collect",
    "multiply",
    "invert",
    "power",
    "conjugate",
    "commutator",
    "consistency_check",
    "induced_sequence",
    "constructive_membership",
    "normal_closure",
    "derived_subgroup",
    "lower_central_series",
    "nilpotency_class",
    "refine_to_lcs",
    "GroupMap",
    "InvalidMap",
    "compose",
    "inner_automorphism",
    "equalizer",
    "NotInCEqualizer",
    "decide",
    "Decision",
    "InternalLiftFailure",
    "enumerate_group",
    "brute_equalizer",
    "brute_twisted",
    "brute_classes",
    "InfiniteGroup",
    "IntMatrix",
    "hermite_normal_form",
    "smith_normal_form",
    "solve_mod_lattice",
    "kernel_mod_lattice",
]
