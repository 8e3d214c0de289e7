"""Deciding twisted conjugacy (x phi) u = v (x psi) with explicit witnesses."""

from __future__ import annotations

from dataclasses import dataclass

from .equalizer import _require_endos, c_equalizer, mu
from .morphism import GroupMap, compose, induce_on_quotient, inner_automorphism
from .pcgroup import (
    DEFAULT_MAX_CLASS,
    Element,
    PcError,
    PcPresentation,
    abelianized_relation_lattice,
    collect,
    constructive_membership,
    invert,
    lcs_term_subgroup,
    multiply,
    power,
    quotient_by_lcs_term,
    refine_to_lcs,
    refined_class,
    relative_presentation,
)
from .zlinalg import IntMatrix, solve_mod_lattice


class InternalLiftFailure(AssertionError):
    """A lifted defect fell outside the central subgroup: implementation bug."""


@dataclass(frozen=True)
class Decision:
    """Outcome of a twisted conjugacy query; witness present iff conjugate."""

    conjugate: bool
    witness: Element | None = None

    @property
    def verdict(self) -> str:
        return "Conjugate" if self.conjugate else "NonConjugate"


def normalize_instance(u: Element, v: Element, phi: GroupMap, psi: GroupMap):
    """Reduce (u, v, phi, psi) to the basepoint instance (w, phi').

    x solves x phi' = w (x psi) iff the same x solves (x phi) u = v (x psi),
    where w = u^-1 v and phi' is phi followed by conjugation by u.
    """
    grp = phi.domain
    _require_endos(grp, phi, psi)
    w = multiply(invert(u), v)
    phi_p = compose(phi, inner_automorphism(grp, u))
    return w, phi_p


def _solve_abelian(grp: PcPresentation, phi_p: GroupMap, psi: GroupMap, w: Element):
    diff = IntMatrix.from_rows(
        [
            [a - b for a, b in zip(phi_p.images[i].exps, psi.images[i].exps)]
            for i in range(grp.n)
        ],
        cols=grp.n,
    )
    lat = abelianized_relation_lattice(grp)
    e = solve_mod_lattice(diff, w.exps, lat)
    if e is None:
        return None
    return collect(grp, tuple(enumerate(e)))


def solve_basepoint(grp: PcPresentation, phi_p: GroupMap, psi: GroupMap, w: Element):
    """Some x with x phi' = w (x psi) in a refined presentation, or None."""
    _require_endos(grp, phi_p, psi)
    c = refined_class(grp)
    if c <= 1:
        return _solve_abelian(grp, phi_p, psi, w)
    csub = lcs_term_subgroup(grp, c)
    q = quotient_by_lcs_term(grp, c)
    xbar = solve_basepoint(
        q.quotient, induce_on_quotient(phi_p, q), induce_on_quotient(psi, q), q.project(w)
    )
    if xbar is None:
        return None
    x1 = q.section(xbar)
    defect = multiply(phi_p.apply(x1), invert(multiply(w, psi.apply(x1))))
    if not csub.contains(defect):
        raise InternalLiftFailure("lifted defect escaped the central subgroup")
    eqc = c_equalizer(grp, phi_p, psi)
    images = [mu(g, phi_p, psi, csub) for g in eqc.sequence]
    clat = abelianized_relation_lattice(relative_presentation(csub))
    rows = [constructive_membership(csub, im) for im in images]
    target = constructive_membership(csub, defect)
    mat = IntMatrix.from_rows(rows, cols=len(csub.sequence))
    e = solve_mod_lattice(mat, tuple(target), clat)
    if e is None:
        return None
    h = grp.identity()
    for g, k in zip(eqc.sequence, e):
        h = multiply(h, power(g, k))
    x = multiply(x1, invert(h))
    if phi_p.apply(x) != multiply(w, psi.apply(x)):
        raise InternalLiftFailure("constructed basepoint witness failed verification")
    return x


def decide(
    grp: PcPresentation,
    phi: GroupMap,
    psi: GroupMap,
    u: Element,
    v: Element,
    max_class: int = DEFAULT_MAX_CLASS,
) -> Decision:
    """Decide u ~ v for the pair (phi, psi); Conjugate answers carry a witness
    x with (x phi) u = v (x psi), verified by exact collection before return."""
    _require_endos(grp, phi, psi)
    if u.group is not grp or v.group is not grp:
        raise PcError("u and v must be elements of the given group")
    if grp.lcs_boundaries is not None:
        gstar, to_star, from_star = grp, None, None
        phis, psis, us, vs = phi, psi, u, v
    else:
        gstar, to_star, from_star = refine_to_lcs(grp, max_class)
        phis = compose(compose(from_star, phi), to_star)
        psis = compose(compose(from_star, psi), to_star)
        us, vs = to_star.apply(u), to_star.apply(v)
    w, phi_p = normalize_instance(us, vs, phis, psis)
    x = solve_basepoint(gstar, phi_p, psis, w)
    if x is None:
        return Decision(False)
    witness = x if from_star is None else from_star.apply(x)
    if multiply(phi.apply(witness), u) != multiply(v, psi.apply(witness)):
        raise InternalLiftFailure("witness failed the defining equation")
    return Decision(True, witness)
