import random

import pytest

from twistedconj.morphism import (
    GroupMap,
    InvalidMap,
    compose,
    inner_automorphism,
)
from twistedconj.pcgroup import PcError, invert, multiply

from conftest import endo, make_heisenberg, make_q8


def test_identity_and_trivial():
    grp = make_heisenberg()
    ident = GroupMap.identity(grp)
    triv = GroupMap.trivial(grp)
    g = grp.element([2, -1, 3])
    assert ident.apply(g) == g
    assert triv.apply(g).is_identity()
    assert ident.validated and triv.validated


def test_checked_accepts_endomorphism():
    grp = make_heisenberg()
    # a -> a, b -> b^-1, c -> c^-1 respects [b, a] = c^-1
    flip = endo(grp, [[1, 0, 0], [0, -1, 0], [0, 0, -1]])
    assert flip.validated
    rng = random.Random(20)
    for _ in range(100):
        x = grp.element([rng.randint(-5, 5) for _ in range(3)])
        y = grp.element([rng.randint(-5, 5) for _ in range(3)])
        assert flip.apply(multiply(x, y)) == multiply(flip.apply(x), flip.apply(y))


def test_checked_rejects_non_homomorphism():
    grp = make_heisenberg()
    with pytest.raises(InvalidMap) as exc:
        # b -> b^-1 alone breaks the commutator relation
        endo(grp, [[1, 0, 0], [0, -1, 0], [0, 0, 1]])
    assert exc.value.violations


def test_unvalidated_map_is_refused_downstream():
    grp = make_q8()
    m = GroupMap(grp, grp, grp.generators())
    with pytest.raises(PcError):
        m.require_validated()


def test_compose():
    grp = make_heisenberg()
    flip = endo(grp, [[1, 0, 0], [0, -1, 0], [0, 0, -1]])
    both = compose(flip, flip)
    g = grp.element([4, 7, -2])
    assert both.apply(g) == g
    assert both.validated


def test_inner_automorphism():
    grp = make_q8()
    rng = random.Random(21)
    for _ in range(50):
        u = grp.element([rng.randrange(2) for _ in range(3)])
        sigma = inner_automorphism(grp, u)
        x = grp.element([rng.randrange(2) for _ in range(3)])
        assert sigma.apply(x) == multiply(invert(u), multiply(x, u))
        assert not sigma.check()  # really a homomorphism


def test_image_count_must_match():
    grp = make_q8()
    with pytest.raises(PcError):
        GroupMap(grp, grp, grp.generators()[:2])
