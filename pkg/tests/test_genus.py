import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from quadgroup import genus as G
from quadgroup.genus import (
    CapabilityError,
    CommutatorWitness,
    GenusError,
    enumerate_wicks_forms,
    genus_exact,
    genus_growth,
    genus_upper_search,
    match_genus,
    match_wicks,
    rooted_form_count,
    shorten_witness,
    trivalent_matchings,
)
from quadgroup.words import (
    CyclicWord,
    commutator,
    commutator_product,
    conjugate,
    enumerate_words,
    mul,
    parse_word,
    power,
)

from strategies import words

AB = parse_word("abAB")


def brute_genus_one(w, n):
    """Oracle: is w = [x, y] with |x|, |y| <= n?  Plain double loop."""
    ws = list(enumerate_words(2, n))
    return any(commutator(x, y) == w for x in ws for y in ws)


# --- forms ------------------------------------------------------------------------------

def test_rooted_counts_match_closed_formula():
    # 2 (6g-3)! / (12^g g! (3g-2)!)
    assert rooted_form_count(1) == 1
    assert rooted_form_count(2) == 105
    assert rooted_form_count(3) == 2 * math.factorial(15) // (12**3 * 6 * math.factorial(7))
    for g in (1, 2):
        assert sum(1 for _ in trivalent_matchings(g)) == rooted_form_count(g)


def test_genus_one_has_a_single_form():
    (form,) = enumerate_wicks_forms(1)
    assert CyclicWord.of(form.pattern).unoriented_key() == CyclicWord.of(parse_word("abcABC")).unoriented_key()


def test_genus_two_form_count_is_stable():
    forms = enumerate_wicks_forms(2)
    assert len(forms) == 8
    for f in forms:
        assert len(f.pattern) == 2 * f.n_pieces == 18
        assert sorted({abs(x) for x in f.pattern}) == list(range(1, 10))


def test_capability_limits():
    with pytest.raises(CapabilityError):
        enumerate_wicks_forms(3)
    with pytest.raises(CapabilityError):
        enumerate_wicks_forms(4, expensive=True)


def test_cache_file_roundtrip(tmp_path, monkeypatch):
    monkeypatch.setenv("QUADGROUP_CACHE", str(tmp_path))
    G._forms.cache_clear()
    forms = enumerate_wicks_forms(2)
    path = tmp_path / "wicks-g2.txt"
    head = path.read_text().splitlines()[0]
    assert head == f"wicks g=2 count={len(forms)} version={G.WICKS_VERSION}"
    G._forms.cache_clear()
    assert enumerate_wicks_forms(2) == forms


def test_stale_cache_is_ignored(tmp_path, monkeypatch):
    monkeypatch.setenv("QUADGROUP_CACHE", str(tmp_path))
    (tmp_path / "wicks-g1.txt").write_text("wicks g=1 count=1 version=0\nab\n")
    G._forms.cache_clear()
    (form,) = enumerate_wicks_forms(1)
    assert len(form.pattern) == 6
    G._forms.cache_clear()


# --- witnesses -------------------------------------------------------------------------

def test_witness_is_checked():
    with pytest.raises(AssertionError):
        CommutatorWitness((parse_word("a"), parse_word("a")), AB)


def test_witness_addition():
    w = CommutatorWitness((parse_word("a"), parse_word("b")), AB)
    assert (w + w).target == power(AB, 2)
    assert (w + w).genus == 2


@given(words(max_size=4), words(max_size=4))
def test_shortening_keeps_target(x, y):
    w = commutator(x, y)
    short = shorten_witness(CommutatorWitness((x, y), w))
    assert commutator_product(short.tuple) == w
    assert sum(map(len, short.tuple)) <= len(x) + len(y)


def test_shortening_example():
    wit = shorten_witness(CommutatorWitness((parse_word("ab"), parse_word("b")), AB))
    assert sum(map(len, wit.tuple)) <= 3


# --- matching ----------------------------------------------------------------------------

@given(words(max_size=4), words(max_size=4), words(max_size=3))
def test_commutators_match_genus_one(x, y, c):
    w = conjugate(commutator(x, y), c)
    if not w:
        return
    m = match_genus(w, 1)
    assert m is not None
    r = genus_exact(w)
    assert r.exact and r.value == 1
    assert commutator_product(r.witness.tuple) == w


@pytest.mark.parametrize("text", ["abAB", "aabAAB", "abABabAB", "abaBAbAB", "aaBAAb", "abABaBAb"])
def test_genus_one_matches_agree_with_brute_force(text):
    w = parse_word(text)
    (form,) = enumerate_wicks_forms(1)
    assert (match_wicks(w, form) is not None) == brute_genus_one(w, 4)


def test_square_of_commutator_is_not_genus_one():
    w = power(AB, 2)
    assert match_genus(w, 1) is None
    assert not brute_genus_one(w, 4)
    assert genus_upper_search(w, 1, 4) is None
    m = match_genus(w, 2)
    assert m is not None and commutator_product(m.witness.tuple) == w


def test_upper_search_finds_short_witness():
    wit = genus_upper_search(AB, 1, 2)
    assert wit is not None and commutator_product(wit.tuple) == AB
    wit = genus_upper_search(power(AB, 2), 2, 2)
    assert wit is not None and wit.genus == 2


def test_genus_requires_commutator_subgroup():
    with pytest.raises(GenusError):
        genus_exact(parse_word("ab"))
    with pytest.raises(GenusError):
        genus_upper_search(parse_word("a"), 1, 2)


def test_genus_of_identity():
    r = genus_exact(())
    assert r.exact and r.value == 0


def test_bounds_when_forms_are_exhausted():
    r = genus_exact(power(AB, 2), g_max=1, len_budget=2)
    assert r.lower == 2 and r.upper == 2 and r.exact
    r = genus_exact(power(AB, 2), g_max=1)
    assert not r.exact and r.status == "Bounds(2, unknown)"


def test_conjugated_input_reports_conjugator():
    c = parse_word("ba")
    r = genus_exact(conjugate(AB, c))
    assert r.value == 1
    assert r.conjugator == c


@st.composite
def genus_two_products(draw):
    pair = lambda: (draw(words(max_size=3)), draw(words(max_size=3)))  # noqa: E731
    (x, y), (u, v) = pair(), pair()
    return mul(commutator(x, y), commutator(u, v))


@given(genus_two_products())
def test_products_of_two_commutators(w):
    r = genus_exact(w)
    assert r.exact and r.value <= 2
    assert commutator_product(r.witness.tuple) == w
    assert len(r.witness.tuple) == 2 * r.value


# --- growth ------------------------------------------------------------------------------

def test_growth_of_commutator_small():
    t = genus_growth(AB, 3)
    assert t.values() == [1, 2, 2]
    assert t.subadditive
    for p, row in enumerate(t.rows, 1):
        assert commutator_product(row.witness.tuple) == power(AB, p)


def test_growth_rejects_identity():
    with pytest.raises(GenusError):
        genus_growth((), 2)


def test_max_genus_beyond_range():
    with pytest.raises(CapabilityError):
        genus_exact(AB, g_max=4, expensive=True)
    with pytest.raises(CapabilityError):
        genus_exact(AB, g_max=3)
