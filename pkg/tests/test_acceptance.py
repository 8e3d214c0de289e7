"""Acceptance gate: the eight headline guarantees, run at desk scale.

Each test prints one `[acceptance N] PASS` line on success (visible with -s);
a failure fails the test outright.
"""

import io
import json
import random
import time
from pathlib import Path

import jsonschema

from twistedconj import (
    GroupMap,
    PcPresentation,
    consistency_check,
    decide,
    equalizer,
    invert,
    multiply,
)
from twistedconj.oracle import brute_classes, brute_equalizer, brute_twisted, enumerate_group
from twistedconj.cli import (
    parse_presentation_document,
    run_command,
    serialize_presentation,
)

from conftest import (
    FINITE_CORPUS,
    FIXTURES,
    endo,
    make_heisenberg,
    make_z,
    sample_endo_pairs,
)
from test_pcgroup import CORRUPTED

SCHEMA = json.loads((Path(__file__).parent.parent / "docs" / "result.schema.json").read_text())


def holds(phi, psi, x, u, v):
    return multiply(phi.apply(x), u) == multiply(v, psi.apply(x))


def heisenberg_endos():
    grp = make_heisenberg()
    ident = GroupMap.identity(grp)
    flip = endo(grp, [[1, 0, 0], [0, -1, 0], [0, 0, -1]])
    shear = endo(grp, [[1, 1, 0], [0, 1, 0], [0, 0, 1]])
    return grp, [ident, flip, shear]


def test_acceptance_1_decision_oracle_agreement():
    t0 = time.monotonic()
    checked = 0
    for name, make in FINITE_CORPUS.items():
        grp = make()
        elems = enumerate_group(grp).elements
        for phi, psi in sample_endo_pairs(grp, min_pairs=50, seed=100):
            for u in elems:
                for v in elems:
                    res = decide(grp, phi, psi, u, v)
                    ref = brute_twisted(grp, phi, psi, u, v)
                    assert res.conjugate == (ref is not None), (name, u.exps, v.exps)
                    if res.conjugate:
                        assert holds(phi, psi, res.witness, u, v)
                    checked += 1
    elapsed = time.monotonic() - t0
    assert elapsed < 300, f"runtime budget exceeded: {elapsed:.1f}s"
    print(f"[acceptance 1] PASS decision agrees with brute force on {checked} instances in {elapsed:.1f}s")


def test_acceptance_2_equalizer_oracle_agreement():
    checked = 0
    for name, make in FINITE_CORPUS.items():
        grp = make()
        for phi, psi in sample_endo_pairs(grp, min_pairs=50, seed=100):
            fast = set(equalizer(grp, phi, psi).elements())
            assert fast == brute_equalizer(grp, phi, psi), name
            checked += 1
    print(f"[acceptance 2] PASS equalizer matches brute force on {checked} map pairs")


def test_acceptance_3_witness_soundness_everywhere():
    rng = random.Random(103)
    cases = []
    for name, make in FINITE_CORPUS.items():
        grp = make()
        pairs = sample_endo_pairs(grp, min_pairs=8, seed=103)
        elems = enumerate_group(grp).elements
        cases.append((grp, pairs, lambda g=grp, e=elems: rng.choice(e)))
    hgrp, hmaps = heisenberg_endos()
    hpairs = [(p, q) for p in hmaps for q in hmaps]
    cases.append(
        (hgrp, hpairs, lambda g=hgrp: g.element([rng.randint(-10, 10) for _ in range(3)]))
    )
    total = 0
    while total < 1000:
        grp, pairs, sample = cases[total % len(cases)]
        phi, psi = pairs[rng.randrange(len(pairs))]
        # manufacture a guaranteed-Conjugate instance from a random solution x
        x, u = sample(), sample()
        v = multiply(multiply(phi.apply(x), u), invert(psi.apply(x)))
        res = decide(grp, phi, psi, u, v)
        assert res.conjugate
        assert holds(phi, psi, res.witness, u, v)
        total += 1
    print(f"[acceptance 3] PASS {total} random Conjugate instances returned exact witnesses")


def test_acceptance_4_infinite_group_spot_checks():
    grp = make_heisenberg()
    ident = GroupMap.identity(grp)
    a, b = grp.generator(0), grp.generator(1)
    worst = 0.0
    for k in range(-10, 11):
        v = grp.element([1, 0, k])
        t0 = time.monotonic()
        res = decide(grp, ident, ident, a, v)
        worst = max(worst, time.monotonic() - t0)
        assert res.conjugate and holds(ident, ident, res.witness, a, v)
    t0 = time.monotonic()
    assert not decide(grp, ident, ident, a, b).conjugate
    worst = max(worst, time.monotonic() - t0)
    assert worst < 1.0, f"slowest query took {worst:.3f}s"
    print(f"[acceptance 4] PASS Heisenberg spot checks; slowest query {worst * 1000:.1f}ms")


def test_acceptance_5_abelian_closed_forms():
    z4 = FINITE_CORPUS["z4"]()
    times3 = endo(z4, [[3]])
    ident4 = GroupMap.identity(z4)
    classes = brute_classes(z4, times3, ident4)
    as_sets = sorted(sorted(g.exps[0] for g in c) for c in classes)
    assert as_sets == [[0, 2], [1, 3]]
    # the decision procedure induces the same partition
    for u in enumerate_group(z4).elements:
        for v in enumerate_group(z4).elements:
            same = any(u in c and v in c for c in classes)
            assert decide(z4, times3, ident4, u, v).conjugate == same

    z = make_z()
    times3z = endo(z, [[3]])
    identz = GroupMap.identity(z)
    for k in range(-20, 21):
        res = decide(z, times3z, identz, z.identity(), z.element([k]))
        assert res.conjugate == (k % 2 == 0), k
        if res.conjugate:
            assert holds(times3z, identz, res.witness, z.identity(), z.element([k]))
    print("[acceptance 5] PASS Z4 has exactly the classes {0,2},{1,3}; Z decides 0~k iff k even")


def test_acceptance_6_collection_vs_matrix_oracle():
    grp = make_heisenberg()
    rng = random.Random(106)

    def mat(exps):
        i, j, k = exps
        return ((1, j, k), (0, 1, i), (0, 0, 1))

    def mat_mul(a, b):
        return tuple(
            tuple(sum(a[r][t] * b[t][c] for t in range(3)) for c in range(3)) for r in range(3)
        )

    for _ in range(1000):
        x = tuple(rng.randint(-50, 50) for _ in range(3))
        y = tuple(rng.randint(-50, 50) for _ in range(3))
        prod = multiply(grp.element(x), grp.element(y))
        assert mat(prod.exps) == mat_mul(mat(x), mat(y))
    print("[acceptance 6] PASS 1000 random products match the unitriangular matrix oracle")


def test_acceptance_7_structural_invariants():
    # equivalence-relation behaviour on sampled finite triples
    rng = random.Random(107)
    triples = 0
    groups = [make() for make in FINITE_CORPUS.values()]
    corpus = [(grp, sample_endo_pairs(grp, min_pairs=5, seed=107)) for grp in groups]
    enums = [enumerate_group(grp).elements for grp, _ in corpus]
    while triples < 1000:
        idx = triples % len(corpus)
        grp, pairs = corpus[idx]
        elems = enums[idx]
        phi, psi = pairs[rng.randrange(len(pairs))]
        u, v, w = (rng.choice(elems) for _ in range(3))
        duv = decide(grp, phi, psi, u, v)
        assert decide(grp, phi, psi, v, u).conjugate == duv.conjugate
        if duv.conjugate:
            assert holds(phi, psi, invert(duv.witness), v, u)
        dvw = decide(grp, phi, psi, v, w)
        if duv.conjugate and dvw.conjugate:
            composed = multiply(dvw.witness, duv.witness)
            assert holds(phi, psi, composed, u, w)
            assert decide(grp, phi, psi, u, w).conjugate
        triples += 1

    # mu is a homomorphism on sampled pairs
    from twistedconj.equalizer import MuMap, c_equalizer
    from twistedconj.pcgroup import lcs_term_subgroup, refine_to_lcs, refined_class

    pairs_checked = 0
    for make in (FINITE_CORPUS["q8"], FINITE_CORPUS["d4"], FINITE_CORPUS["h27"]):
        grp = refine_to_lcs(make())[0]
        csub = lcs_term_subgroup(grp, refined_class(grp))
        for phi, psi in sample_endo_pairs(grp, min_pairs=10, seed=108):
            source = c_equalizer(grp, phi, psi)
            mumap = MuMap.build(source, phi, psi, csub)
            elems = list(source.elements())
            for _ in range(40):
                g, h = rng.choice(elems), rng.choice(elems)
                assert mumap.apply(multiply(g, h)) == multiply(mumap.apply(g), mumap.apply(h))
                pairs_checked += 1
            if pairs_checked >= 1000:
                break
        if pairs_checked >= 1000:
            break
    assert pairs_checked >= 1000

    # corrupted presentations are rejected with named violations
    rejected = 0
    for kwargs in CORRUPTED:
        violations = consistency_check(PcPresentation(**kwargs))
        assert violations and all(isinstance(v, str) and v for v in violations)
        rejected += 1
    assert rejected >= 5
    print(
        f"[acceptance 7] PASS {triples} equivalence triples, {pairs_checked} mu pairs, "
        f"{rejected} corrupted presentations rejected"
    )


def test_acceptance_8_cli_contract():
    # round trip on the fixture corpus
    for path in sorted(FIXTURES.glob("*.pc")):
        if path.name.startswith("broken"):
            continue
        name, pres = parse_presentation_document(path.read_text())
        text = serialize_presentation(name, pres)
        name2, pres2 = parse_presentation_document(text)
        assert (name2, pres2.names, pres2.relorders, pres2.power_words, pres2.conj) == (
            name,
            pres.names,
            pres.relorders,
            pres.power_words,
            pres.conj,
        )

    def run(argv):
        out, err = io.StringIO(), io.StringIO()
        return run_command(argv, out=out, err=err), out.getvalue()

    fx = lambda n: str(FIXTURES / n)
    matrix = [
        (["check", fx("heis.pc")], 0),
        (["twisted", fx("heis.pc"), fx("id_heis.map"), fx("id_heis.map"), "-u", "a", "-v", "a c"], 0),
        (["twisted", fx("z4.pc"), fx("times3_z4.map"), fx("id_z4.map"), "-u", "", "-v", "t"], 0),
        (["check", fx("broken_syntax.pc")], 1),
        (["check", fx("no_such_file.pc")], 1),
        (["check", fx("broken_inconsistent.pc")], 2),
        (["eq", fx("q8.pc"), fx("broken_not_endo.map"), fx("id_q8.map")], 2),
    ]
    for argv, expected in matrix:
        code, _ = run(argv)
        assert code == expected, argv

    for argv in (
        ["check", fx("h27.pc"), "--json"],
        ["eq", fx("heis.pc"), fx("flip_heis.map"), fx("id_heis.map"), "--json"],
        ["twisted", fx("heis.pc"), fx("id_heis.map"), fx("id_heis.map"), "-u", "a", "-v", "b", "--json"],
        ["classes", fx("q8.pc"), fx("id_q8.map"), fx("id_q8.map"), "--json"],
    ):
        code, out = run(argv)
        assert code == 0
        jsonschema.validate(json.loads(out), SCHEMA)
    print("[acceptance 8] PASS round trip, exit-code matrix, and JSON schema all honored")
