"""Shared group catalog and helpers for the whole test suite."""

import random
from itertools import product as iproduct
from pathlib import Path

import pytest

from twistedconj import GroupMap, PcPresentation
from twistedconj.oracle import enumerate_group

FIXTURES = Path(__file__).parent / "fixtures"


def make_heisenberg() -> PcPresentation:
    """Discrete Heisenberg group: <a, b, c | [b,a]=c^-1, c central> (so b^a = bc)."""
    return PcPresentation(
        ["a", "b", "c"],
        [None, None, None],
        conj_words={(0, 1, 1): ((1, 1), (2, 1)), (0, 1, -1): ((1, 1), (2, -1))},
    )


def make_h27() -> PcPresentation:
    """Extraspecial group of order 27, exponent 3."""
    return PcPresentation(["a", "b", "c"], [3, 3, 3], conj_words={(0, 1, 1): ((1, 1), (2, 1))})


def make_q8() -> PcPresentation:
    """Quaternion group of order 8."""
    return PcPresentation(
        ["x", "y", "z"],
        [2, 2, 2],
        power_words={0: ((2, 1),), 1: ((2, 1),)},
        conj_words={(0, 1, 1): ((1, 1), (2, 1))},
    )


def make_d4() -> PcPresentation:
    """Dihedral group of order 8."""
    return PcPresentation(
        ["s", "r", "t"],
        [2, 2, 2],
        power_words={1: ((2, 1),)},
        conj_words={(0, 1, 1): ((1, 1), (2, 1))},
    )


def make_z4() -> PcPresentation:
    return PcPresentation(["t"], [4])


def make_z2z4() -> PcPresentation:
    return PcPresentation(["a", "b"], [2, 4])


def make_z() -> PcPresentation:
    return PcPresentation(["t"], [None])


@pytest.fixture(scope="session")
def heis():
    return make_heisenberg()


@pytest.fixture(scope="session")
def h27():
    return make_h27()


@pytest.fixture(scope="session")
def q8():
    return make_q8()


@pytest.fixture(scope="session")
def d4():
    return make_d4()


@pytest.fixture(scope="session")
def z4():
    return make_z4()


@pytest.fixture(scope="session")
def z2z4():
    return make_z2z4()


@pytest.fixture(scope="session")
def zgroup():
    return make_z()


def endo(grp, images_words) -> GroupMap:
    """Validated endomorphism from a list of exponent vectors or Elements."""
    images = [
        im if hasattr(im, "exps") else grp.element(im) for im in images_words
    ]
    return GroupMap.checked(grp, grp, images)


def all_endomorphisms(grp) -> list[GroupMap]:
    """Every endomorphism of a small finite group, by exhaustive validation."""
    elems = enumerate_group(grp).elements
    out = []
    for images in iproduct(elems, repeat=grp.n):
        m = GroupMap(grp, grp, images)
        if not m.check():
            out.append(m)
    return out


def sample_endo_pairs(grp, min_pairs=50, seed=0):
    """(phi, psi) pairs: exhaustive when there are few, else a seeded sample."""
    endos = all_endomorphisms(grp)
    total = len(endos) ** 2
    if total <= max(min_pairs, 64):
        return [(p, q) for p in endos for q in endos]
    rng = random.Random(seed)
    pairs = []
    seen = set()
    while len(pairs) < min_pairs:
        i, j = rng.randrange(len(endos)), rng.randrange(len(endos))
        if (i, j) not in seen:
            seen.add((i, j))
            pairs.append((endos[i], endos[j]))
    return pairs


FINITE_CORPUS = {
    "z4": make_z4,
    "z2z4": make_z2z4,
    "d4": make_d4,
    "q8": make_q8,
    "h27": make_h27,
}
