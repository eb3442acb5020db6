import json
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from quadgroup.product import CyclicFactor, ProductGroup, verify_decomposition, z2_z3
from quadgroup.quadratic import substitute
from quadgroup.suites import random_hom
from quadgroup.surface import (
    CapabilityError,
    Certificate,
    CirclePiece,
    Exhausted,
    Inconclusive,
    MoveSequence,
    SolutionError,
    Split,
    SurfaceGroupSpec,
    SurfaceMove,
    conjugation_key,
    defect_at_least,
    elementary_check,
    euler,
    generating_moves,
    genus_reduce,
    klein_classify,
    make_hom,
    orbit_search,
)
from quadgroup.words import FreeGroup, commutator, conjugate, parse_word, power

from strategies import words

F2 = FreeGroup(2)
A, B = parse_word("a"), parse_word("b")
TORUS = SurfaceGroupSpec(1)
GENUS2 = SurfaceGroupSpec(2)
KLEIN = SurfaceGroupSpec(2, orientable=False)

SPECS = [SurfaceGroupSpec(g, o) for g in (1, 2, 3) for o in (True, False)]


# --- specs --------------------------------------------------------------------------------

def test_spec_shapes():
    assert GENUS2.relator() == parse_word("abABcdCD")
    assert KLEIN.relator() == parse_word("aabb")
    assert GENUS2.generator_names() == ["u1", "v1", "u2", "v2"]
    assert KLEIN.generator_names() == ["V1", "V2"]
    assert [s.euler_characteristic() for s in SPECS] == [0, 1, -2, 0, -4, -1]
    with pytest.raises(ValueError):
        SurfaceGroupSpec(0)


def test_split_bookkeeping():
    assert Split((2, True), ((1, True), (1, True))).holds()
    assert Split((2, False), ((1, False), (1, False))).holds()
    assert not Split((2, True), ((1, True),)).holds()
    assert euler(3, False) == -1


# --- moves ---------------------------------------------------------------------------------

@pytest.mark.parametrize("spec", SPECS, ids=str)
def test_every_move_fixes_the_relator(spec):
    for m in generating_moves(spec):
        assert m.preserves_relator(spec), m


@pytest.mark.parametrize("spec", SPECS, ids=str)
def test_move_inverses_compose_to_identity(spec):
    ids = {i: parse_word(chr(96 + i)) for i in range(1, spec.n_generators + 1)}
    for m in generating_moves(spec):
        fwd, back = m.images(spec), m.inverse().images(spec)
        both = {i: substitute(substitute((i,), fwd), back) for i in ids}
        assert both == {i: (i,) for i in ids}, m


def test_mixing_move_involves_both_handles():
    imgs = SurfaceMove("mix", 1, 1).images(GENUS2)
    for handle in ((1, 2), (3, 4)):
        letters = {abs(x) for gen in handle for x in imgs[gen]}
        assert letters & {1, 2} and letters & {3, 4}


def test_move_json_roundtrip():
    seq = MoveSequence([SurfaceMove("ut", 1, -1), SurfaceMove("mix", 1, 1), SurfaceMove("conj", by=A)])
    data = json.loads(json.dumps(seq.to_json(F2)))
    assert MoveSequence.from_json(data, F2).moves == seq.moves
    with pytest.raises(ValueError):
        SurfaceMove.from_json({"move": "twirl"})
    with pytest.raises(ValueError):
        SurfaceMove.from_json({"move": "ut", "exponent": 2})


@st.composite
def genus_two_solutions(draw):
    x, y = draw(words(max_size=3)), draw(words(max_size=3))
    c = draw(words(max_size=2))
    return tuple(conjugate(z, c) for z in (x, y, y, x))


@given(genus_two_solutions(), st.lists(st.integers(0, 9), max_size=6))
def test_moves_keep_solutions(images, picks):
    hom = make_hom(GENUS2, images, F2)
    moves = generating_moves(GENUS2)
    seq = MoveSequence([moves[i] for i in picks])
    out = seq.replay(hom.images, F2, GENUS2)
    assert make_hom(GENUS2, out, F2)
    assert seq.inverse().replay(out, F2, GENUS2) == hom.images


def test_symbolic_sequence_is_relator_preserving():
    seq = MoveSequence([SurfaceMove("swap", 1, 1), SurfaceMove("rot", 2, -1)])
    imgs = seq.symbolic(GENUS2)
    assert substitute(GENUS2.relator(), imgs) == GENUS2.relator()


# --- homomorphisms ------------------------------------------------------------------------------

def test_make_hom_validates():
    with pytest.raises(SolutionError):
        make_hom(TORUS, (A, B), F2)
    with pytest.raises(ValueError):
        make_hom(TORUS, (A,), F2)
    h = make_hom(TORUS, (A, power(A, 2)), F2)
    assert F2.is_identity(h.relator_value())


def test_conjugation_key_merges_conjugates():
    t = (power(A, 2), B)
    assert conjugation_key(tuple(conjugate(x, A) for x in t), F2) == conjugation_key(t, F2)


def test_orbit_search_path_replays():
    start = (power(A, 2), power(A, 3))
    res = orbit_search(TORUS, start, F2, lambda t: not t[0], 1000)
    assert res.found
    assert res.moves.replay(start, F2, TORUS) == res.images
    assert res.images[0] == ()


# --- elementary check -------------------------------------------------------------------------

def test_torus_example():
    hom = make_hom(TORUS, (power(A, 2), power(A, 3)), F2)
    cert = elementary_check(hom)
    assert isinstance(cert, Certificate) and cert.replays()
    assert cert.terminal[0] == ()
    assert cert.free_factorization() == (A,)


def test_genus_two_example_and_budget():
    hom = make_hom(GENUS2, (A, B, B, A), F2)
    cert = elementary_check(hom)
    assert isinstance(cert, Certificate) and cert.replays()
    assert all(not x for x in cert.terminal[0::2])
    assert isinstance(elementary_check(hom, budget=1), Exhausted)


def test_elementary_in_z2_z3():
    G = z2_z3()
    x, y = G.parse("0:1 1:1"), G.parse("1:2 0:1")
    hom = make_hom(TORUS, (x, power_in(G, x, 2)), G)
    cert = elementary_check(hom)
    assert isinstance(cert, Certificate) and cert.replays()
    hom = make_hom(GENUS2, (x, y, y, x), G)
    assert elementary_check(hom).replays()


def power_in(G, x, n):
    out = G.identity
    for _ in range(n):
        out = G.mul(out, x)
    return out


def test_elementary_needs_orientable_source():
    hom = make_hom(KLEIN, (A, parse_word("A")), F2)
    with pytest.raises(CapabilityError):
        elementary_check(hom)


# --- pinch decompositions ---------------------------------------------------------------------

def test_genus_reduce_two_handles():
    hom = make_hom(GENUS2, (A, B, B, A), F2)
    dec = genus_reduce(hom)
    assert dec.recomposes() and dec.euler_ok()
    assert dec.defect == 2
    assert all(isinstance(p, CirclePiece) for p in dec.pieces)
    assert verify_decomposition(hom, dec).passed
    assert defect_at_least(hom, 2).value == 2
    assert isinstance(defect_at_least(hom, 3), Inconclusive)


def test_random_homs_decompose():
    rng = random.Random(3)
    for _ in range(40):
        hom = random_hom(rng)
        dec = genus_reduce(hom, budget=2000)
        assert dec.recomposes()
        assert dec.euler_ok()
        assert verify_decomposition(hom, dec).passed
        json.dumps(dec.to_json())


# --- Klein bottle ---------------------------------------------------------------------------

def test_klein_cases():
    D = ProductGroup([CyclicFactor(2), CyclicFactor(2)])
    s, t = D.parse("0:1"), D.parse("1:1")
    expected = [
        (F2, ((), ()), "i"),
        (F2, (A, parse_word("A")), "ii"),
        (D, (s, t), "iii"),
        (D, (s, s), "ii"),
        (D, (D.identity, s), "i"),
    ]
    for group, images, case in expected:
        res = klein_classify(make_hom(KLEIN, images, group))
        assert res.case == case
        assert res.replays()
        dec = res.decomposition()
        assert dec.recomposes() and dec.euler_ok()
        assert verify_decomposition(dec.hom, dec).passed


def test_klein_rejects_other_surfaces():
    with pytest.raises(ValueError):
        klein_classify(make_hom(TORUS, (A, A), F2))


def test_commutator_helper_consistency():
    # the torus relator is the commutator of the two images
    h = make_hom(TORUS, (A, power(A, 4)), F2)
    assert h.relator_value() == commutator(*h.images)
