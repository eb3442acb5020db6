import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from quadgroup.words import (
    CyclicWord,
    FreeGroup,
    Letter,
    Word,
    WordError,
    commutator,
    commutator_product,
    conjugacy_key,
    conjugate,
    count_words,
    cyclic_reduce,
    enumerate_words,
    exponent_sums,
    format_word,
    in_commutator_subgroup,
    inverse,
    is_cyclically_reduced,
    mul,
    parse_word,
    power,
    primitive_root,
    reduce,
    square_product,
)

from strategies import raw_words, words


def naive_reduce(letters):
    """Oracle: cancel adjacent inverse pairs until nothing changes."""
    s = list(letters)
    changed = True
    while changed:
        changed = False
        for i in range(len(s) - 1):
            if s[i] == -s[i + 1]:
                del s[i : i + 2]
                changed = True
                break
    return tuple(s)


# --- parsing and printing ---------------------------------------------------------

def test_parse_examples():
    assert parse_word("abAB") == (1, 2, -1, -2)
    assert parse_word("a^3B^-2") == (1, 1, 1, 2, 2)
    assert parse_word("1") == ()
    assert parse_word("aA") == ()


def test_parse_rejects_garbage():
    with pytest.raises(WordError):
        parse_word("a1")
    with pytest.raises(WordError):
        parse_word("c", rank=2)


def test_format_identity():
    assert format_word(()) == "1"


@given(words(rank=4))
def test_format_parse_roundtrip(w):
    assert parse_word(format_word(w)) == w


def test_letter_tuple_view():
    assert Word.from_reduced((1, -2)).letters == (Letter(1, 1), Letter(2, -1))
    assert reduce([Letter(1, 1), Letter(1, -1)]) == ()


def test_zero_letter_rejected():
    with pytest.raises(WordError):
        reduce([0])


# --- arithmetic ---------------------------------------------------------------------

@given(raw_words())
def test_reduce_matches_naive(raw):
    assert reduce(raw) == naive_reduce(raw)


@given(words(), words(), words())
def test_mul_associative(x, y, z):
    assert mul(mul(x, y), z) == mul(x, mul(y, z))


@given(words(), words())
def test_mul_matches_reduction_of_concatenation(x, y):
    assert mul(x, y) == naive_reduce(x + y)


@given(words())
def test_inverse(w):
    assert mul(w, inverse(w)) == ()
    assert inverse(inverse(w)) == w


@given(words(max_size=5), st.integers(-4, 4))
def test_power(w, n):
    expected = ()
    for _ in range(abs(n)):
        expected = mul(expected, w if n > 0 else inverse(w))
    assert power(w, n) == expected


def test_commutator_and_conjugate_conventions():
    a, b = parse_word("a"), parse_word("b")
    assert commutator(a, b) == parse_word("abAB")
    assert conjugate(a, b) == parse_word("baB")
    assert commutator_product([a, b, a, b]) == parse_word("abABabAB")
    assert square_product([a, b]) == parse_word("aabb")


def test_operators():
    a, b = parse_word("a"), parse_word("b")
    assert a * b * ~a == parse_word("abA")
    assert (a * b) ** 2 == parse_word("abab")


# --- cyclic words -----------------------------------------------------------------

@given(words(), words())
def test_conjugacy_key_is_invariant(w, c):
    assert conjugacy_key(conjugate(w, c)) == conjugacy_key(w)


@given(words())
def test_cyclic_reduce_recovers_word(w):
    core, c = cyclic_reduce(w)
    assert is_cyclically_reduced(core.letters)
    assert conjugate(core.letters, c) == w


def test_cyclic_word_equality_by_rotation():
    assert CyclicWord.of(parse_word("abAB")) == CyclicWord.of(parse_word("ABab"))
    assert CyclicWord.of(parse_word("abAB")) != CyclicWord.of(parse_word("aabb"))
    # reflection is not a rotation, but the unoriented key identifies them
    x, y = CyclicWord.of(parse_word("aab")), CyclicWord.of(parse_word("BAA"))
    assert x != y
    assert x.unoriented_key() == y.unoriented_key()


def test_min_rotation_uses_letter_order():
    # a < A < b < B
    assert conjugacy_key(parse_word("BAba")) == parse_word("aBAb")


def brute_root(w):
    """Oracle: shortest u (up to length |w|) with u^k = w for some k >= 1."""
    for n in range(1, len(w) + 1):
        for u in enumerate_words(2, n, min_length=n):
            for k in range(1, len(w) + 1):
                if power(u, k) == w:
                    return k
    return None


@pytest.mark.parametrize("text", ["abab", "aaa", "abAB", "bAbA", "ab", "abaBab"])
def test_primitive_root_against_brute_force(text):
    w = parse_word(text)
    root, k = primitive_root(w)
    assert power(root, k) == w
    assert k == brute_root(w)


def test_exponent_sums():
    assert exponent_sums(parse_word("aabAB"), 2) == (1, 0)
    assert in_commutator_subgroup(parse_word("abAB"))
    assert not in_commutator_subgroup(parse_word("ab"))


# --- enumeration ----------------------------------------------------------------------

@pytest.mark.parametrize("rank,length", [(1, 3), (2, 0), (2, 1), (2, 4), (3, 3)])
def test_count_words_against_enumeration(rank, length):
    letters = [s * g for g in range(1, rank + 1) for s in (1, -1)]
    brute = {
        t for t in itertools.product(letters, repeat=length) if naive_reduce(t) == t
    }
    listed = list(enumerate_words(rank, length, min_length=length))
    assert len(listed) == len(brute) == count_words(rank, length)
    assert set(listed) == brute


def test_enumeration_order_is_by_length_then_letter_order():
    first = [format_word(w) for w in enumerate_words(2, 1)]
    assert first == ["1", "a", "A", "b", "B"]


def test_free_group_wrapper():
    F = FreeGroup(2)
    x = F.parse("ab")
    assert F.is_identity(F.mul(x, F.inv(x)))
    assert F.first(x) == (1,) and F.last(x) == (2,)
    assert F.spec_json() == {"type": "free", "rank": 2}
    with pytest.raises(WordError):
        F.parse("c")
