"""Brute-force ground truth on finite groups.

This module deliberately stays dumb: everything is a literal scan over all
elements in lexicographic exponent order, so that it can serve as an
independent oracle for the clever algorithms.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iproduct

from .morphism import GroupMap
from .pcgroup import Element, PcPresentation, invert, multiply

DEFAULT_LIMIT = 10**6


class InfiniteGroup(Exception):
    """Enumeration was requested for a group with an infinite generator."""


@dataclass(frozen=True)
class FiniteEnumeration:
    group: PcPresentation
    elements: tuple[Element, ...]

    def __len__(self):
        return len(self.elements)


def enumerate_group(grp: PcPresentation, limit: int = DEFAULT_LIMIT) -> FiniteEnumeration:
    """All elements, ordered lexicographically by exponent vector."""
    size = grp.order()
    if size is None:
        raise InfiniteGroup("cannot enumerate: some relative order is infinite")
    if size > limit:
        raise InfiniteGroup(f"group order {size} exceeds the oracle limit {limit}")
    elems = tuple(
        Element(grp, exps) for exps in iproduct(*[range(m) for m in grp.relorders])
    )
    return FiniteEnumeration(grp, elems)


def brute_equalizer(
    grp: PcPresentation, phi: GroupMap, psi: GroupMap, limit: int = DEFAULT_LIMIT
):
    """The exact fixed set {x : x phi = x psi} of a finite group."""
    phi.require_validated()
    psi.require_validated()
    enum = enumerate_group(grp, limit)
    return {x for x in enum.elements if phi.apply(x) == psi.apply(x)}


def brute_twisted(
    grp: PcPresentation,
    phi: GroupMap,
    psi: GroupMap,
    u: Element,
    v: Element,
    limit: int = DEFAULT_LIMIT,
):
    """First x in enumeration order with (x phi) u = v (x psi), else None."""
    phi.require_validated()
    psi.require_validated()
    enum = enumerate_group(grp, limit)
    for x in enum.elements:
        if multiply(phi.apply(x), u) == multiply(v, psi.apply(x)):
            return x
    return None


def brute_classes(
    grp: PcPresentation, phi: GroupMap, psi: GroupMap, limit: int = DEFAULT_LIMIT
):
    """Partition into twisted conjugacy classes; the count is the
    Reidemeister number."""
    phi.require_validated()
    psi.require_validated()
    enum = enumerate_group(grp, limit)
    seen = set()
    classes = []
    for u in enum.elements:
        if u in seen:
            continue
        orbit = {multiply(multiply(phi.apply(x), u), invert(psi.apply(x))) for x in enum.elements}
        seen |= orbit
        classes.append(frozenset(orbit))
    return classes
