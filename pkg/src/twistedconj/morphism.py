"""Homomorphisms between pc-presented groups, given by generator images."""

from __future__ import annotations

from .pcgroup import (
    Element,
    PcPresentation,
    PcError,
    QuotientData,
    invert,
    multiply,
    power,
)


class InvalidMap(ValueError):
    """A map whose generator images violate a defining relation."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class GroupMap:
    """A homomorphism stored as one codomain element per domain generator.

    check() verifies every defining relation of the domain; algorithms in
    the equalizer/twisted modules refuse maps that were never validated.
    """

    __slots__ = ("domain", "codomain", "images", "_validated")

    def __init__(self, domain: PcPresentation, codomain: PcPresentation, images):
        self.domain = domain
        self.codomain = codomain
        self.images = tuple(images)
        if len(self.images) != domain.n:
            raise PcError("one image per domain generator required")
        for im in self.images:
            if not isinstance(im, Element) or im.group is not codomain:
                raise PcError("images must be elements of the codomain")
        self._validated = False

    # -- construction helpers -------------------------------------------

    @classmethod
    def identity(cls, grp: PcPresentation) -> "GroupMap":
        m = cls(grp, grp, grp.generators())
        m._validated = True
        return m

    @classmethod
    def trivial(cls, grp: PcPresentation) -> "GroupMap":
        m = cls(grp, grp, [grp.identity()] * grp.n)
        m._validated = True
        return m

    @classmethod
    def checked(cls, domain, codomain, images) -> "GroupMap":
        m = cls(domain, codomain, images)
        violations = m.check()
        if violations:
            raise InvalidMap(violations)
        return m

    # -- validation -------------------------------------------------------

    def apply_word(self, word) -> Element:
        acc = self.codomain.identity()
        for i, e in word:
            acc = multiply(acc, power(self.images[i], e))
        return acc

    def check(self) -> list[str]:
        """Relations of the domain violated by the images (empty iff none)."""
        g = self.domain
        violations = []
        for i in range(g.n):
            m = g.relorders[i]
            if m is None:
                continue
            lhs = power(self.images[i], m)
            rhs = self.apply_word(g.power_words[i])
            if lhs != rhs:
                violations.append(f"power relation {g.names[i]}^{m}")
        for (i, j, sign), word in g.conj.items():
            conjer = self.images[i] if sign == 1 else invert(self.images[i])
            lhs = multiply(invert(conjer), multiply(self.images[j], conjer))
            rhs = self.apply_word(word)
            if lhs != rhs:
                tag = g.names[i] if sign == 1 else f"{g.names[i]}^-1"
                violations.append(f"conjugate relation {g.names[j]}^{tag}")
        if not violations:
            self._validated = True
        return violations

    @property
    def validated(self) -> bool:
        return self._validated

    def require_validated(self):
        if not self._validated:
            raise PcError("map was never validated; call check() first")

    # -- evaluation --------------------------------------------------------

    def apply(self, g: Element) -> Element:
        if g.group is not self.domain:
            raise PcError("element not in the domain")
        return self.apply_word(g.word())

    def __call__(self, g: Element) -> Element:
        return self.apply(g)

    def is_endomorphism(self) -> bool:
        return self.domain is self.codomain

    def __eq__(self, other):
        return (
            isinstance(other, GroupMap)
            and self.domain is other.domain
            and self.codomain is other.codomain
            and self.images == other.images
        )

    def __hash__(self):
        return hash(tuple(im.exps for im in self.images))

    def __repr__(self):
        pairs = ", ".join(
            f"{self.domain.names[i]} -> {self.images[i]!r}" for i in range(self.domain.n)
        )
        return f"GroupMap({pairs})"


def compose(f: GroupMap, g: GroupMap) -> GroupMap:
    """x |-> g(f(x))."""
    if f.codomain is not g.domain:
        raise PcError("compose: codomain of the first map must match the domain of the second")
    out = GroupMap(f.domain, g.codomain, [g.apply(im) for im in f.images])
    if f.validated and g.validated:
        out._validated = True
    return out


def inner_automorphism(grp: PcPresentation, u: Element) -> GroupMap:
    """sigma_u : h |-> u^-1 h u."""
    if u.group is not grp:
        raise PcError("conjugating element from a different group")
    ui = invert(u)
    images = [multiply(ui, multiply(x, u)) for x in grp.generators()]
    m = GroupMap(grp, grp, images)
    m._validated = True  # conjugation by a fixed element is always a homomorphism
    return m


def induce_on_quotient(m: GroupMap, q: QuotientData) -> GroupMap:
    """The endomorphism of the quotient induced by an endomorphism of the parent.

    The relevant lcs term is invariant under every endomorphism, so a failed
    validation here is an internal bug and aborts loudly.
    """
    m.require_validated()
    if not (m.domain is q.parent and m.codomain is q.parent):
        raise PcError("induce_on_quotient expects an endomorphism of the parent group")
    images = [
        q.project(m.apply(q.section(q.quotient.generator(i))))
        for i in range(q.quotient.n)
    ]
    out = GroupMap(q.quotient, q.quotient, images)
    violations = out.check()
    if violations:
        raise AssertionError(f"induced map failed validation: {violations[0]}")
    return out
