"""Finitely generated nilpotent groups via consistent polycyclic presentations.

A presentation lists generators g_1 < g_2 < ... < g_n with a relative order
m_i (an integer >= 2, or None for infinite) per generator, a power relation
g_i^{m_i} = word over later generators for each finite m_i, and conjugate
relations g_j^{g_i} = word over generators of index > i for each i < j.
When m_i is infinite an inverse-conjugate relation g_j^{g_i^-1} is required
as well.  Every element then has a unique collected normal form
g_1^{e_1} ... g_n^{e_n} with 0 <= e_i < m_i at finite levels, provided the
presentation is consistent (see consistency_check).

Words are sequences of (generator index, exponent) pairs.  The conventions
are fixed once: g^h = h^-1 g h and [g, h] = g^-1 h^-1 g h.
"""

from __future__ import annotations

from math import gcd

from .zlinalg import IntMatrix, ext_gcd, kernel_mod_lattice, solve_mod_lattice

Word = tuple[tuple[int, int], ...]

DEFAULT_MAX_CLASS = 20


class NotNilpotent(Exception):
    """The lower central series failed to reach the trivial subgroup."""


class PcError(ValueError):
    """Syntactically invalid presentation or word."""


def word_inverse(w) -> Word:
    return tuple((i, -e) for (i, e) in reversed(tuple(w)))


def word_power(w, k: int) -> Word:
    if k >= 0:
        return tuple(w) * k
    return word_inverse(w) * (-k)


class PcPresentation:
    """A polycyclic presentation.  Construction checks syntax only;
    run consistency_check to verify that normal forms are unique."""

    def __init__(
        self,
        names,
        relorders,
        power_words=None,
        conj_words=None,
        lcs_boundaries=None,
    ):
        self.names = tuple(names)
        self.n = len(self.names)
        if len(set(self.names)) != self.n:
            raise PcError("duplicate generator names")
        self.relorders = tuple(relorders)
        if len(self.relorders) != self.n:
            raise PcError("relorders length mismatch")
        for m in self.relorders:
            if m is not None and m < 2:
                raise PcError("relative orders must be >= 2 or None")
        pw = dict(power_words or {})
        cw = dict(conj_words or {})
        self.power_words: tuple[Word | None, ...] = tuple(
            self._check_word(pw.get(i, ()), min_index=i + 1) if self.relorders[i] is not None else None
            for i in range(self.n)
        )
        # conj key: (i, j, sign) for g_j^{g_i^sign}, i < j
        conj = {}
        for i in range(self.n):
            for j in range(i + 1, self.n):
                conj[(i, j, 1)] = self._check_word(cw.get((i, j, 1), ((j, 1),)), min_index=i + 1)
                if self.relorders[i] is None:
                    conj[(i, j, -1)] = self._check_word(cw.get((i, j, -1), ((j, 1),)), min_index=i + 1)
                elif (i, j, -1) in cw:
                    raise PcError("inverse-conjugate word given for finite-order generator")
        for key in cw:
            if key not in conj:
                raise PcError(f"unexpected conjugate relation key {key}")
        self.conj = conj
        self.lcs_boundaries = tuple(lcs_boundaries) if lcs_boundaries is not None else None
        self._mul_cache: dict = {}
        self._conj_gen_cache: dict = {}
        finite = [m for m in self.relorders if m is not None]
        self._finite_order = None
        if len(finite) == self.n:
            size = 1
            for m in finite:
                size *= m
            self._finite_order = size

    def _check_word(self, w, min_index: int) -> Word:
        w = tuple((int(i), int(e)) for (i, e) in w)
        for i, _ in w:
            if not (min_index <= i < self.n):
                raise PcError(f"relation word uses generator index {i}, allowed >= {min_index}")
        return w

    # -- basic element constructors -------------------------------------

    def identity(self) -> "Element":
        return Element(self, (0,) * self.n)

    def generator(self, i: int) -> "Element":
        if not 0 <= i < self.n:
            raise PcError("generator index out of range")
        e = [0] * self.n
        e[i] = 1
        return collect(self, ((i, 1),))

    def generators(self):
        return [self.generator(i) for i in range(self.n)]

    def element(self, exps) -> "Element":
        exps = tuple(int(x) for x in exps)
        if len(exps) != self.n:
            raise PcError("exponent vector length mismatch")
        return collect(self, tuple((i, e) for i, e in enumerate(exps) if e))

    def order(self) -> int | None:
        """Group order, or None when some relative order is infinite."""
        return self._finite_order

    def gen_index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise PcError(f"unknown generator {name!r}") from None

    def __repr__(self):
        return f"PcPresentation({list(self.names)!r})"


class Element:
    """A group element in collected normal form (exponent vector)."""

    __slots__ = ("group", "exps", "_hash")

    def __init__(self, group: PcPresentation, exps: tuple[int, ...]):
        self.group = group
        self.exps = exps
        self._hash = None

    def __eq__(self, other):
        return (
            isinstance(other, Element)
            and self.group is other.group
            and self.exps == other.exps
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.exps)
        return self._hash

    def is_identity(self) -> bool:
        return not any(self.exps)

    def depth(self) -> int:
        """Index of the first nonzero exponent; group.n for the identity."""
        for i, e in enumerate(self.exps):
            if e:
                return i
        return self.group.n

    def word(self) -> Word:
        return tuple((i, e) for i, e in enumerate(self.exps) if e)

    def __repr__(self):
        if self.is_identity():
            return "<identity>"
        parts = []
        for i, e in enumerate(self.exps):
            if e == 1:
                parts.append(self.group.names[i])
            elif e:
                parts.append(f"{self.group.names[i]}^{e}")
        return " ".join(parts)


# -- collection ----------------------------------------------------------


def _power_word_tail(g: PcPresentation, i: int, q: int) -> list:
    """Normal-form tokens of (power word of g_i)^q, via binary powering."""
    key = ("pw", i)
    base = g._conj_gen_cache.get(key)
    if base is None:
        base = collect(g, g.power_words[i])
        g._conj_gen_cache[key] = base
    return list(power(base, q).word())


def _conj_map_apply(g: PcPresentation, images, j: int, exps) -> "Element":
    acc = g.identity()
    for k in range(j + 1, g.n):
        e = exps[k]
        if e:
            acc = multiply(acc, power(images[k], e))
    return acc


def _conj_by_gen_power(g: PcPresentation, s: "Element", j: int, f: int) -> "Element":
    """s^(g_j^f) for an element s supported on generators after g_j.

    Powers of the conjugation automorphism are applied by binary
    exponentiation, with the repeated squarings cached per presentation, so
    the cost grows with log |f| rather than |f|.
    """
    if f == 0 or s.is_identity():
        return s
    if s.depth() <= j:
        raise AssertionError("conjugation would move below the conjugating generator")
    sign = 1 if f > 0 else -1
    cache = g._conj_gen_cache
    level = 0
    key = (j, sign, 0)
    if key not in cache:
        images = [None] * g.n
        for k in range(j + 1, g.n):
            images[k] = collect(g, g.conj[(j, k, sign)])
        cache[key] = images
    t = abs(f)
    out = s
    while t:
        key = (j, sign, level)
        images = cache.get(key)
        if images is None:
            prev = cache[(j, sign, level - 1)]
            images = [None] * g.n
            for k in range(j + 1, g.n):
                images[k] = _conj_map_apply(g, prev, j, prev[k].exps)
            cache[key] = images
        if t & 1:
            out = _conj_map_apply(g, images, j, out.exps)
        t >>= 1
        level += 1
    return out


def _collect_tokens(g: PcPresentation, tokens: list) -> list:
    """Run collection from the left; returns normal-form tokens."""
    tokens = [t for t in tokens if t[1] != 0]
    p = 0
    while p < len(tokens):
        i, e = tokens[p]
        if e == 0:
            del tokens[p]
            p = max(p - 1, 0)
            continue
        m = g.relorders[i]
        if m is not None and not 0 <= e < m:
            q, r = divmod(e, m)
            repl = [(i, r)] if r else []
            repl += _power_word_tail(g, i, q)
            tokens[p : p + 1] = repl
            p = max(p - 1, 0)
            continue
        if p + 1 < len(tokens):
            j, f = tokens[p + 1]
            if f == 0:
                del tokens[p + 1]
                continue
            if i == j:
                tokens[p : p + 2] = [(i, e + f)]
                p = max(p - 1, 0)
                continue
            if i > j:
                mj = g.relorders[j]
                if mj is not None and not 0 <= f < mj:
                    q, r = divmod(f, mj)
                    repl = [(j, r)] if r else []
                    repl += _power_word_tail(g, j, q)
                    tokens[p + 1 : p + 2] = repl
                    continue
                exps = [0] * g.n
                exps[i] = e
                moved = _conj_by_gen_power(g, Element(g, tuple(exps)), j, f)
                tokens[p : p + 2] = [(j, f)] + list(moved.word())
                p = max(p - 1, 0)
                continue
        p += 1
    return tokens


def collect(g: PcPresentation, word) -> Element:
    """Collect an arbitrary word to its unique normal form."""
    tokens = _collect_tokens(g, [(int(i), int(e)) for (i, e) in word])
    exps = [0] * g.n
    for i, e in tokens:
        if exps[i]:
            raise AssertionError("collection produced a non-normal word")
        exps[i] = e
    return Element(g, tuple(exps))


def multiply(a: Element, b: Element) -> Element:
    g = a.group
    if b.group is not g:
        raise PcError("elements from different groups")
    cache = g._mul_cache
    key = (a.exps, b.exps)
    hit = cache.get(key)
    if hit is not None:
        return hit
    out = collect(g, a.word() + b.word())
    if len(cache) < (1 << 18):
        cache[key] = out
    return out


def invert(a: Element) -> Element:
    return collect(a.group, word_inverse(a.word()))


def power(a: Element, k: int) -> Element:
    g = a.group
    if k == 0:
        return g.identity()
    if k < 0:
        return power(invert(a), -k)
    result = None
    base = a
    while k:
        if k & 1:
            result = base if result is None else multiply(result, base)
        k >>= 1
        if k:
            base = multiply(base, base)
    return result


def conjugate(a: Element, h: Element) -> Element:
    """a^h = h^-1 a h."""
    return multiply(invert(h), multiply(a, h))


def commutator(a: Element, b: Element) -> Element:
    """[a, b] = a^-1 b^-1 a b."""
    return multiply(invert(multiply(b, a)), multiply(a, b))


def evaluate_word(g: PcPresentation, word) -> Element:
    return collect(g, word)


# -- consistency ----------------------------------------------------------


def consistency_check(g: PcPresentation) -> list[str]:
    """Run the standard overlap tests; returns a description per violation."""
    violations = []
    gens = g.generators()

    def check(label, x, y):
        if x != y:
            violations.append(label)

    for k in range(g.n):
        for j in range(k):
            for i in range(j):
                lhs = multiply(gens[k], multiply(gens[j], gens[i]))
                rhs = multiply(multiply(gens[k], gens[j]), gens[i])
                check(
                    f"associativity {g.names[k]}*({g.names[j]}*{g.names[i]}) != "
                    f"({g.names[k]}*{g.names[j]})*{g.names[i]}",
                    lhs,
                    rhs,
                )
    for j in range(g.n):
        mj = g.relorders[j]
        if mj is not None:
            wj = collect(g, g.power_words[j])
            check(
                f"power overlap {g.names[j]}*{g.names[j]}^{mj} != {g.names[j]}^{mj}*{g.names[j]}",
                multiply(gens[j], wj),
                multiply(wj, gens[j]),
            )
            for i in range(j):
                lhs = multiply(wj, gens[i])
                rhs = multiply(power(gens[j], mj - 1), multiply(gens[j], gens[i]))
                check(
                    f"power overlap {g.names[j]}^{mj}*{g.names[i]} bracketing",
                    lhs,
                    rhs,
                )
        for i in range(j):
            mi = g.relorders[i]
            if mi is None:
                continue
            wi = collect(g, g.power_words[i])
            lhs = multiply(gens[j], wi)
            rhs = multiply(multiply(gens[j], gens[i]), power(gens[i], mi - 1))
            check(
                f"power overlap {g.names[j]}*{g.names[i]}^{mi} bracketing",
                lhs,
                rhs,
            )
    for i in range(g.n):
        if g.relorders[i] is not None:
            continue
        for j in range(i + 1, g.n):
            fwd = conjugate(conjugate(gens[j], gens[i]), invert(gens[i]))
            check(
                f"inverse-conjugate ({g.names[j]}^{g.names[i]})^{g.names[i]}^-1 != {g.names[j]}",
                fwd,
                gens[j],
            )
            bwd = conjugate(conjugate(gens[j], invert(gens[i])), gens[i])
            check(
                f"inverse-conjugate ({g.names[j]}^{g.names[i]}^-1)^{g.names[i]} != {g.names[j]}",
                bwd,
                gens[j],
            )
    return violations


# -- subgroups via induced generating sequences ---------------------------


class Subgroup:
    """A subgroup given by a canonical induced generating sequence.

    Sequence entries have strictly increasing depths; each leading exponent
    is positive, divides the ambient relative order at finite levels, and
    later pivot coordinates of earlier entries are reduced.
    """

    __slots__ = ("group", "sequence")

    def __init__(self, group: PcPresentation, sequence):
        self.group = group
        self.sequence = tuple(sequence)

    def __eq__(self, other):
        return (
            isinstance(other, Subgroup)
            and self.group is other.group
            and self.sequence == other.sequence
        )

    def __hash__(self):
        return hash(tuple(e.exps for e in self.sequence))

    def is_trivial(self) -> bool:
        return not self.sequence

    def contains(self, g: Element) -> bool:
        return constructive_membership(self, g) is not None

    def contains_subgroup(self, other: "Subgroup") -> bool:
        return all(self.contains(h) for h in other.sequence)

    def order(self) -> int | None:
        """Subgroup order, or None when infinite."""
        total = 1
        for h in self.sequence:
            d = h.depth()
            m = self.group.relorders[d]
            if m is None:
                return None
            total *= m // h.exps[d]
        return total

    def elements(self):
        """All elements (finite subgroups only)."""
        out = [self.group.identity()]
        for h in reversed(self.sequence):
            d = h.depth()
            m = self.group.relorders[d]
            if m is None:
                raise PcError("cannot enumerate an infinite subgroup")
            r = m // h.exps[d]
            new = []
            for k in range(r):
                hk = power(h, k)
                for x in out:
                    new.append(multiply(hk, x))
            out = new
        return out

    def __repr__(self):
        return f"Subgroup({[repr(h) for h in self.sequence]})"


def _sift(entries: dict, g: Element):
    """Reduce g against entries (depth -> Element); returns the residue
    together with the coefficients used, as (residue, {depth: exponent})."""
    coeffs = {}
    grp = g.group
    while not g.is_identity():
        d = g.depth()
        h = entries.get(d)
        if h is None:
            return g, coeffs
        l = h.exps[d]
        e = g.exps[d]
        if e % l != 0:
            return g, coeffs
        q = e // l
        coeffs[d] = coeffs.get(d, 0) + q
        g = multiply(power(h, -q), g)
    return g, coeffs


def _insert(entries: dict, g: Element, pending: list) -> bool:
    """Sift g into entries, extending or refining them.  Returns True when
    entries changed; refinement byproducts are pushed onto pending."""
    grp = g.group
    while not g.is_identity():
        d = g.depth()
        e = g.exps[d]
        m = grp.relorders[d]
        h = entries.get(d)
        if h is None:
            if m is None:
                if e < 0:
                    g = invert(g)
                    e = -e
                gg = e
                entry = g
            else:
                gg, a, _ = ext_gcd(e, m)
                entry = power(g, a) if gg != e else g
                if entry.exps[d] != gg:
                    raise AssertionError("leading exponent not additive")
            entries[d] = entry
            if m is not None:
                pending.append(power(entry, m // gg))
            if entry is not g:
                pending.append(g)
            return True
        l = h.exps[d]
        if e % l == 0:
            q = e // l
            g = multiply(power(h, -q), g)
            continue
        # refine the leading exponent at this depth
        gg, a, b = ext_gcd(l, e)
        new = multiply(power(h, a), power(g, b))
        if new.exps[d] != gg:
            raise AssertionError("leading exponent not additive")
        entries[d] = new
        if m is not None:
            pending.append(power(new, m // gg))
        pending.append(h)
        pending.append(g)
        return True
    return False


def _closure(grp: PcPresentation, gens, extra_candidates=None) -> dict:
    """Compute entries of the induced sequence of gp(gens), optionally closing
    under extra per-entry candidates (used for normal closures)."""
    entries: dict = {}
    pending = [h for h in gens if not h.is_identity()]
    while True:
        while pending:
            g = pending.pop()
            _insert(entries, g, pending)
        seq = [entries[d] for d in sorted(entries)]
        new = []
        for x in seq:
            inv_res, _ = _sift(entries, invert(x))
            if not inv_res.is_identity():
                new.append(inv_res)
            for y in seq:
                res, _ = _sift(entries, multiply(x, y))
                if not res.is_identity():
                    new.append(res)
            d = x.depth()
            m = grp.relorders[d]
            if m is not None:
                res, _ = _sift(entries, power(x, m // x.exps[d]))
                if not res.is_identity():
                    new.append(res)
            if extra_candidates is not None:
                for c in extra_candidates(x):
                    res, _ = _sift(entries, c)
                    if not res.is_identity():
                        new.append(res)
        if not new:
            return entries
        pending = new


def _canonicalize(grp: PcPresentation, entries: dict) -> tuple:
    depths = sorted(entries)
    seq = [entries[d] for d in depths]
    for t in range(len(seq) - 2, -1, -1):
        for s in range(t + 1, len(seq)):
            ds = depths[s]
            l = seq[s].exps[ds]
            c = seq[t].exps[ds]
            q = c // l
            if q:
                seq[t] = multiply(seq[t], power(seq[s], -q))
    return tuple(seq)


def induced_sequence(grp: PcPresentation, gens) -> Subgroup:
    """The subgroup generated by gens, as a canonical induced sequence."""
    entries = _closure(grp, list(gens))
    return Subgroup(grp, _canonicalize(grp, entries))


def normal_closure(grp: PcPresentation, gens) -> Subgroup:
    """Smallest subgroup containing gens and closed under conjugation by
    the ambient generators (and their inverses)."""
    ambient = grp.generators()

    def conj_candidates(x):
        out = []
        for i, gi in enumerate(ambient):
            out.append(conjugate(x, gi))
            out.append(conjugate(x, invert(gi)))
        return out

    entries = _closure(grp, list(gens), extra_candidates=conj_candidates)
    return Subgroup(grp, _canonicalize(grp, entries))


def constructive_membership(s: Subgroup, g: Element):
    """Exponents q_t with g = prod_t sequence[t]^{q_t} (in order), or None."""
    if g.group is not s.group:
        raise PcError("element from a different group")
    entries = {h.depth(): h for h in s.sequence}
    res, coeffs = _sift(entries, g)
    if not res.is_identity():
        return None
    return [coeffs.get(h.depth(), 0) for h in s.sequence]


def derived_subgroup(s: Subgroup) -> Subgroup:
    """Subgroup generated by commutators of s, closed under conjugation by s."""
    grp = s.group
    gens = []
    for x in s.sequence:
        for y in s.sequence:
            c = commutator(x, y)
            if not c.is_identity():
                gens.append(c)

    def conj_candidates(x):
        out = []
        for h in s.sequence:
            out.append(conjugate(x, h))
            out.append(conjugate(x, invert(h)))
        return out

    entries = _closure(grp, gens, extra_candidates=conj_candidates)
    return Subgroup(grp, _canonicalize(grp, entries))


def whole_group(grp: PcPresentation) -> Subgroup:
    return induced_sequence(grp, grp.generators())


def lower_central_series(grp: PcPresentation, max_class: int = DEFAULT_MAX_CLASS):
    """[gamma_1, gamma_2, ..., gamma_{c+1} = 1]; raises NotNilpotent when the
    series stabilizes at a nontrivial subgroup or exceeds max_class."""
    series = [whole_group(grp)]
    ambient = grp.generators()
    while not series[-1].is_trivial():
        if len(series) > max_class:
            raise NotNilpotent(f"lower central series did not reach 1 within class {max_class}")
        prev = series[-1]
        comms = []
        for h in prev.sequence:
            for x in ambient:
                c = commutator(h, x)
                if not c.is_identity():
                    comms.append(c)
        nxt = normal_closure(grp, comms)
        if nxt == prev:
            raise NotNilpotent("lower central series stabilized at a nontrivial subgroup")
        series.append(nxt)
    return series


def nilpotency_class(grp: PcPresentation, max_class: int = DEFAULT_MAX_CLASS) -> int:
    return len(lower_central_series(grp, max_class)) - 1


# -- relative presentations and abelianized relations ----------------------


def relative_presentation(s: Subgroup) -> PcPresentation:
    """A consistent presentation of s on its induced sequence; generator t
    of the result corresponds to s.sequence[t]."""
    grp = s.group
    seq = s.sequence
    p = len(seq)
    names = []
    for t, h in enumerate(seq):
        d = h.depth()
        if h == grp.generator(d) and grp.names[d] not in names:
            names.append(grp.names[d])
        else:
            names.append(f"s{t + 1}")
    relorders = []
    for h in seq:
        d = h.depth()
        m = grp.relorders[d]
        relorders.append(None if m is None else m // h.exps[d])

    def decomp_word(g: Element, min_pos: int) -> Word:
        coeffs = constructive_membership(s, g)
        if coeffs is None:
            raise AssertionError("relative presentation: element escaped the subgroup")
        if any(coeffs[:min_pos]):
            raise AssertionError("relative presentation: relation word not over later entries")
        return tuple((t, q) for t, q in enumerate(coeffs) if q)

    power_words = {}
    conj_words = {}
    for t, h in enumerate(seq):
        if relorders[t] is not None:
            power_words[t] = decomp_word(power(h, relorders[t]), t + 1)
    for t in range(p):
        for t2 in range(t + 1, p):
            conj_words[(t, t2, 1)] = decomp_word(conjugate(seq[t2], seq[t]), t + 1)
            if relorders[t] is None:
                conj_words[(t, t2, -1)] = decomp_word(conjugate(seq[t2], invert(seq[t])), t + 1)
    return PcPresentation(names, relorders, power_words, conj_words)


def abelianized_relation_lattice(grp: PcPresentation) -> IntMatrix:
    """Rows spanning the relation lattice of grp's abelianization in Z^n."""
    rows = []
    for i in range(grp.n):
        m = grp.relorders[i]
        if m is not None:
            w = collect(grp, grp.power_words[i]).exps
            row = [-x for x in w]
            row[i] += m
            rows.append(tuple(row))
    for (i, j, _sign), word in grp.conj.items():
        w = collect(grp, word).exps
        row = list(w)
        row[j] -= 1
        if any(row):
            rows.append(tuple(row))
    return IntMatrix.from_rows(rows, cols=grp.n)


# -- quotients by lower-central-series terms -------------------------------


class QuotientData:
    """Quotient of a refined presentation by a tail of lcs layers, with the
    canonical projection and (set-theoretic) section."""

    def __init__(self, parent: PcPresentation, quotient: PcPresentation, kept: int):
        self.parent = parent
        self.quotient = quotient
        self.kept = kept

    def project(self, g: Element) -> Element:
        if g.group is not self.parent:
            raise PcError("element not in the parent group")
        return Element(self.quotient, g.exps[: self.kept])

    def section(self, g: Element) -> Element:
        if g.group is not self.quotient:
            raise PcError("element not in the quotient group")
        return Element(self.parent, g.exps + (0,) * (self.parent.n - self.kept))


def _truncate_word(word: Word, kept: int) -> Word:
    return tuple((i, e) for (i, e) in word if i < kept)


def refined_class(grp: PcPresentation) -> int:
    if grp.lcs_boundaries is None:
        raise PcError("presentation is not refined to the lower central series")
    return len(grp.lcs_boundaries)


def quotient_by_lcs_term(grp: PcPresentation, k: int) -> QuotientData:
    """QuotientData for grp/gamma_k of a refined presentation, 2 <= k <= c+1."""
    c = refined_class(grp)
    if not 2 <= k <= c + 1:
        raise PcError(f"quotient index k={k} outside [2, {c + 1}]")
    kept = grp.lcs_boundaries[k - 2]
    names = grp.names[:kept]
    relorders = grp.relorders[:kept]
    power_words = {
        i: _truncate_word(grp.power_words[i], kept)
        for i in range(kept)
        if grp.relorders[i] is not None
    }
    conj_words = {
        (i, j, s): _truncate_word(w, kept)
        for (i, j, s), w in grp.conj.items()
        if j < kept
    }
    quotient = PcPresentation(
        names, relorders, power_words, conj_words, lcs_boundaries=grp.lcs_boundaries[: k - 1]
    )
    return QuotientData(grp, quotient, kept)


def lcs_term_subgroup(grp: PcPresentation, k: int) -> Subgroup:
    """gamma_k of a refined presentation as a Subgroup (k >= 1)."""
    c = refined_class(grp)
    if k <= 1:
        return whole_group(grp)
    if k > c:
        return Subgroup(grp, ())
    start = grp.lcs_boundaries[k - 2]
    return induced_sequence(grp, [grp.generator(i) for i in range(start, grp.n)])


def full_preimage(q: QuotientData, sbar: Subgroup) -> Subgroup:
    """Full preimage in the parent of a subgroup of the quotient."""
    if sbar.group is not q.quotient:
        raise PcError("subgroup does not live in the quotient")
    gens = [q.section(h) for h in sbar.sequence]
    gens += [q.parent.generator(i) for i in range(q.kept, q.parent.n)]
    return induced_sequence(q.parent, gens)


# -- refinement to the lower central series --------------------------------


def refine_to_lcs(grp: PcPresentation, max_class: int = DEFAULT_MAX_CLASS):
    """Reorganize grp along its lower central series.

    Returns (gstar, to_star, from_star) where gstar carries lcs_boundaries
    (so that truncating to the first k layers presents grp/gamma_{k+1}) and
    the two maps are mutually inverse isomorphisms.
    """
    cached = getattr(grp, "_refine_cache", None)
    if cached is not None:
        return cached
    from .morphism import GroupMap

    series = lower_central_series(grp, max_class)
    c = len(series) - 1

    # layer data: for layer k (1-based), candidates are the entries of the
    # gamma_k sequence that fall out of gamma_{k+1}
    layers = []  # list of dicts with coords helpers
    kept = []  # (layer_index, element, relorder or None)
    for k in range(1, c + 1):
        gk = series[k - 1]
        gk1 = series[k]
        cand = [h for h in gk.sequence if not gk1.contains(h)]
        p = len(gk.sequence)

        def coords(g, gk=gk, p=p):
            v = constructive_membership(gk, g)
            if v is None:
                raise AssertionError("refinement: element left its lcs layer")
            return tuple(v)

        rel = relative_presentation(gk)
        lat_rows = list(abelianized_relation_lattice(rel).data)
        for z in gk1.sequence:
            lat_rows.append(coords(z))
        cand_rows = [coords(y) for y in cand]
        layer_kept = []
        for idx, y in enumerate(cand):
            later = cand_rows[idx + 1 :]
            lat = IntMatrix.from_rows(lat_rows + later, cols=p)
            a = IntMatrix.from_rows([cand_rows[idx]], cols=p)
            ker = kernel_mod_lattice(a, lat)
            if ker.rows == 0:
                order = None
            else:
                order = ker.data[0][0]
            if order == 1:
                continue  # already generated by the rest of the chain
            layer_kept.append((y, order, lat))
            kept.append((k, y, order))
        layers.append({"gk": gk, "gk1": gk1, "coords": coords, "kept": layer_kept})

    def decompose(g: Element) -> list[int]:
        exps = []
        for k in range(1, c + 1):
            data = layers[k - 1]
            coords = data["coords"]
            for (y, order, lat) in data["kept"]:
                a = IntMatrix.from_rows([coords(y)], cols=lat.cols)
                sol = solve_mod_lattice(a, coords(g), lat)
                if sol is None:
                    raise AssertionError("refinement: decomposition failed")
                e = sol[0]
                if order is not None:
                    e %= order
                exps.append(e)
                if e:
                    g = multiply(power(y, -e), g)
            if not data["gk1"].contains(g):
                raise AssertionError("refinement: residue escaped the next lcs term")
        if not g.is_identity():
            raise AssertionError("refinement: nonzero residue after all layers")
        return exps

    n_new = len(kept)
    names = []
    for (_k, y, _o) in kept:
        d = y.depth()
        base = grp.names[d] if y == grp.generator(d) else f"y{len(names) + 1}"
        while base in names:
            base += "'"
        names.append(base)
    relorders = [o for (_k, _y, o) in kept]
    elements = [y for (_k, y, _o) in kept]

    def decomp_word(g, min_pos):
        exps = decompose(g)
        if any(exps[:min_pos]):
            raise AssertionError("refinement: relation word not over later generators")
        return tuple((i, e) for i, e in enumerate(exps) if e)

    power_words = {}
    conj_words = {}
    for i, (y, o) in enumerate(zip(elements, relorders)):
        if o is not None:
            power_words[i] = decomp_word(power(y, o), i + 1)
    for h in range(n_new):
        for i in range(h + 1, n_new):
            conj_words[(h, i, 1)] = decomp_word(conjugate(elements[i], elements[h]), h + 1)
            if relorders[h] is None:
                conj_words[(h, i, -1)] = decomp_word(
                    conjugate(elements[i], invert(elements[h])), h + 1
                )
    boundaries = []
    count = 0
    for k in range(1, c + 1):
        count += len(layers[k - 1]["kept"])
        boundaries.append(count)
    gstar = PcPresentation(names, relorders, power_words, conj_words, lcs_boundaries=boundaries)
    bad = consistency_check(gstar)
    if bad:
        raise AssertionError(f"refined presentation inconsistent: {bad[0]}")

    to_star = GroupMap(
        grp, gstar, [collect(gstar, tuple(enumerate(decompose(grp.generator(i)))))
                     for i in range(grp.n)]
    )
    from_star = GroupMap(gstar, grp, elements)
    if to_star.check() or from_star.check():
        raise AssertionError("refinement isomorphisms failed validation")
    for i in range(grp.n):
        g = grp.generator(i)
        if from_star.apply(to_star.apply(g)) != g:
            raise AssertionError("refinement maps are not mutually inverse")
    for i in range(gstar.n):
        g = gstar.generator(i)
        if to_star.apply(from_star.apply(g)) != g:
            raise AssertionError("refinement maps are not mutually inverse")
    result = (gstar, to_star, from_star)
    grp._refine_cache = result
    return result
