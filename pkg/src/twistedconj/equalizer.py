"""Finite generating sets of equalizers Eq(phi, psi) = {x : x phi = x psi}.

The computation runs by induction on the nilpotency class: the abelian base
case is an integer kernel computation, and each higher class reduces to the
quotient by the last nontrivial lower-central-series term plus the kernel of
the central defect homomorphism mu(g) = (g phi)(g psi)^-1.
"""

from __future__ import annotations

from dataclasses import dataclass

from .morphism import GroupMap, compose, induce_on_quotient
from .pcgroup import (
    DEFAULT_MAX_CLASS,
    Element,
    PcError,
    PcPresentation,
    Subgroup,
    abelianized_relation_lattice,
    constructive_membership,
    derived_subgroup,
    full_preimage,
    induced_sequence,
    invert,
    lcs_term_subgroup,
    multiply,
    power,
    quotient_by_lcs_term,
    refine_to_lcs,
    refined_class,
    relative_presentation,
    collect,
)
from .zlinalg import AbelianStructure, IntMatrix, kernel_mod_lattice


class NotInCEqualizer(Exception):
    """mu was evaluated on an element outside Eq_C(phi, psi)."""


def mu(g: Element, phi: GroupMap, psi: GroupMap, csub: Subgroup) -> Element:
    """The central defect c_g with g phi = c_g (g psi); requires c_g in csub."""
    c = multiply(phi.apply(g), invert(psi.apply(g)))
    if not csub.contains(c):
        raise NotInCEqualizer(f"defect of {g!r} lies outside the central subgroup")
    return c


def _cyclic_orders(s: Subgroup) -> tuple[int | None, ...]:
    grp = s.group
    out = []
    for h in s.sequence:
        d = h.depth()
        m = grp.relorders[d]
        out.append(None if m is None else m // h.exps[d])
    return tuple(out)


@dataclass(frozen=True)
class MuMap:
    """The homomorphism mu : Eq_C(phi, psi) -> C on sequence generators."""

    source: Subgroup
    target: AbelianStructure
    images: tuple[Element, ...]
    csub: Subgroup

    @classmethod
    def build(cls, source: Subgroup, phi: GroupMap, psi: GroupMap, csub: Subgroup) -> "MuMap":
        images = tuple(mu(g, phi, psi, csub) for g in source.sequence)
        return cls(source, AbelianStructure(_cyclic_orders(csub)), images, csub)

    def apply(self, g: Element) -> Element:
        coeffs = constructive_membership(self.source, g)
        if coeffs is None:
            raise NotInCEqualizer(f"{g!r} is not in the source subgroup")
        grp = self.source.group
        acc = grp.identity()
        for im, q in zip(self.images, coeffs):
            acc = multiply(acc, power(im, q))
        return acc


def _require_endos(grp: PcPresentation, phi: GroupMap, psi: GroupMap):
    for m in (phi, psi):
        m.require_validated()
        if not (m.domain is grp and m.codomain is grp):
            raise PcError("expected validated endomorphisms of the given group")


def _abelian_equalizer(grp: PcPresentation, phi: GroupMap, psi: GroupMap) -> Subgroup:
    diff = IntMatrix.from_rows(
        [
            [a - b for a, b in zip(phi.images[i].exps, psi.images[i].exps)]
            for i in range(grp.n)
        ],
        cols=grp.n,
    )
    lat = abelianized_relation_lattice(grp)
    ker = kernel_mod_lattice(diff, lat)
    gens = [collect(grp, tuple(enumerate(row))) for row in ker.data]
    return induced_sequence(grp, gens)


def c_equalizer(grp: PcPresentation, phi: GroupMap, psi: GroupMap) -> Subgroup:
    """Full preimage in grp of the equalizer of the induced maps on the
    quotient by the last nontrivial lower-central-series term."""
    _require_endos(grp, phi, psi)
    c = refined_class(grp)
    if c < 2:
        raise PcError("c_equalizer needs nilpotency class >= 2")
    q = quotient_by_lcs_term(grp, c)
    ebar = _equalizer_refined(q.quotient, induce_on_quotient(phi, q), induce_on_quotient(psi, q))
    return full_preimage(q, ebar)


def kernel_to_abelian(source: Subgroup, mumap: MuMap) -> Subgroup:
    """ker(mu) as a subgroup: the derived subgroup of the source together with
    the pullback of the integer kernel of the abelianized mu."""
    grp = source.group
    csub = mumap.csub
    if not source.sequence:
        return source
    sprime = derived_subgroup(source)
    clat = abelianized_relation_lattice(relative_presentation(csub))
    rows = []
    for im in mumap.images:
        coords = constructive_membership(csub, im)
        if coords is None:
            raise NotInCEqualizer("mu image escaped the central subgroup")
        rows.append(coords)
    mat = IntMatrix.from_rows(rows, cols=len(csub.sequence))
    ker = kernel_mod_lattice(mat, clat)
    gens = list(sprime.sequence)
    for row in ker.data:
        g = grp.identity()
        for h, e in zip(source.sequence, row):
            g = multiply(g, power(h, e))
        gens.append(g)
    return induced_sequence(grp, gens)


def _equalizer_refined(grp: PcPresentation, phi: GroupMap, psi: GroupMap) -> Subgroup:
    c = refined_class(grp)
    if c <= 1:
        return _abelian_equalizer(grp, phi, psi)
    csub = lcs_term_subgroup(grp, c)
    source = c_equalizer(grp, phi, psi)
    mumap = MuMap.build(source, phi, psi, csub)
    return kernel_to_abelian(source, mumap)


def equalizer(
    grp: PcPresentation,
    phi: GroupMap,
    psi: GroupMap,
    max_class: int = DEFAULT_MAX_CLASS,
) -> Subgroup:
    """A finite generating set (induced sequence) of {x in grp : x phi = x psi}."""
    _require_endos(grp, phi, psi)
    if grp.lcs_boundaries is not None:
        return _equalizer_refined(grp, phi, psi)
    gstar, to_star, from_star = refine_to_lcs(grp, max_class)
    phistar = compose(compose(from_star, phi), to_star)
    psistar = compose(compose(from_star, psi), to_star)
    estar = _equalizer_refined(gstar, phistar, psistar)
    return induced_sequence(grp, [from_star.apply(h) for h in estar.sequence])
