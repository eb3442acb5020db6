import json
import warnings
from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from quadgroup.product import (
    IDENTITY,
    CyclicFactor,
    FreeFactor,
    GroupError,
    ProductElement,
    ProductGroup,
    TableFactor,
    alternating5_table,
    binary_dihedral_table,
    classify_special,
    conjugate_into_factor,
    cyclic_table,
    direct_product_table,
    group_from_json,
    normal_form,
    symmetric4_table,
    z2_z3,
)
from quadgroup.surface import Certificate, SurfaceGroupSpec, make_hom
from quadgroup.words import FreeGroup, parse_word

Z23 = z2_z3()
MIXED = ProductGroup([FreeFactor(1), CyclicFactor(4), TableFactor(symmetric4_table(), "S4", True)])


def raw_syllables(group, max_size=6):
    def one(i):
        f = group.factors[i]
        if isinstance(f, FreeFactor):
            return st.lists(st.sampled_from([1, -1]), min_size=1, max_size=3).map(
                lambda xs: (i, parse_word("".join("a" if x > 0 else "A" for x in xs)))
            )
        return st.integers(0, f.order - 1).map(lambda a: (i, a))

    return st.lists(
        st.integers(0, len(group.factors) - 1).flatmap(one), max_size=max_size
    )


def elements(group, max_size=6):
    return raw_syllables(group, max_size).map(lambda raw: normal_form(raw, group))


# --- an independent model of Z2 * Z3 -------------------------------------------------------

S = ((0, -1), (1, 0))  # order 2 in PSL(2, Z)
U = ((0, -1), (1, 1))  # order 3 in PSL(2, Z)


def matmul(x, y):
    return tuple(
        tuple(sum(x[i][k] * y[k][j] for k in range(2)) for j in range(2)) for i in range(2)
    )


def psl_image(x):
    m = ((1, 0), (0, 1))
    for i, a in x:
        g = S if i == 0 else U
        for _ in range(a):
            m = matmul(m, g)
    return m


def is_psl_identity(m):
    return m in (((1, 0), (0, 1)), ((-1, 0), (0, -1)))


@given(raw_syllables(Z23, 10))
def test_z2_z3_normal_form_agrees_with_matrices(raw):
    x = normal_form(raw, Z23)
    raw_matrix = ((1, 0), (0, 1))
    for i, a in raw:
        raw_matrix = matmul(raw_matrix, psl_image([(i, a)]))
    nf_matrix = psl_image(x)
    assert is_psl_identity(matmul(raw_matrix, invert2(nf_matrix)))
    # the modular group is Z2 * Z3, so a non-empty normal form is never trivial
    assert is_psl_identity(nf_matrix) == (x == IDENTITY)


def invert2(m):
    (a, b), (c, d) = m
    return ((d, -b), (-c, a))  # determinant one


# --- group axioms -------------------------------------------------------------------------------

@given(elements(MIXED), elements(MIXED), elements(MIXED))
def test_product_associative(x, y, z):
    assert MIXED.mul(MIXED.mul(x, y), z) == MIXED.mul(x, MIXED.mul(y, z))


@given(elements(MIXED))
def test_product_inverse(x):
    assert MIXED.is_identity(MIXED.mul(x, MIXED.inv(x)))
    assert MIXED.mul(x, IDENTITY) == x


@given(elements(MIXED))
def test_normal_form_has_no_adjacent_factor(x):
    for (i, a), (j, _) in zip(x, x[1:]):
        assert i != j
    assert all(not MIXED.factors[i].is_identity(a) for i, a in x)


@given(elements(MIXED))
def test_text_and_json_roundtrip(x):
    assert MIXED.parse(MIXED.format(x)) == x
    assert MIXED.parse(json.loads(json.dumps(MIXED.to_json(x)))) == x


@given(elements(Z23, 3), elements(Z23, 5))
def test_conjugate_into_factor_recovers(a, z):
    if len(a) != 1:
        return
    x = Z23.mul(z, a, Z23.inv(z))
    i, elem, c = conjugate_into_factor(x, Z23)
    assert i == a[0][0]
    assert Z23.mul(c, ProductElement([(i, elem)]), Z23.inv(c)) == x


def test_conjugate_into_factor_rejects_hyperbolic():
    assert conjugate_into_factor(Z23.parse("0:1 1:1"), Z23) is None
    assert conjugate_into_factor(IDENTITY, Z23)[0] == 0


def test_common_conjugator():
    z = Z23.parse("0:1 1:2")
    xs = [Z23.mul(z, Z23.parse(s), Z23.inv(z)) for s in ("1:1", "1:2", "1")]
    found = Z23.common_conjugator(xs)
    assert found is not None
    _, out = found
    assert [Z23.format(y) for y in out] == ["1:1", "1:2", "1"]
    assert Z23.common_conjugator([Z23.parse("1:1"), Z23.parse("0:1")]) is None


# --- finite tables -------------------------------------------------------------------------------

def element_orders(table):
    t = TableFactor(table)
    out = Counter()
    for a in range(t.order):
        k, x = 1, a
        while x != t.identity:
            x, k = t.mul(x, a), k + 1
        out[k] += 1
    return out


def test_binary_dihedral_orders():
    for n in (2, 3, 5):
        orders = element_orders(binary_dihedral_table(n))
        assert sum(orders.values()) == 4 * n
        assert orders[2] == 1  # the unique involution
    # the quaternion group
    assert element_orders(binary_dihedral_table(2)) == Counter({1: 1, 2: 1, 4: 6})


def test_symmetric_and_alternating_orders():
    assert element_orders(symmetric4_table()) == Counter({1: 1, 2: 9, 3: 8, 4: 6})
    assert element_orders(alternating5_table()) == Counter({1: 1, 2: 15, 3: 20, 5: 24})


def test_direct_product_table():
    t = direct_product_table(cyclic_table(2), cyclic_table(3))
    assert element_orders(t) == element_orders(cyclic_table(6))


def test_table_validation():
    with pytest.raises(GroupError):
        TableFactor([[0, 1], [1, 1]])  # no inverse for 1
    with pytest.raises(GroupError):
        TableFactor([[1, 1], [1, 1]])  # no identity
    with pytest.raises(GroupError):
        TableFactor([[0, 1], [1]])
    # a Latin square that is not associative
    bad = [[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]]
    with pytest.raises(GroupError, match="associative"):
        TableFactor(bad)


def test_large_table_is_sampled():
    t = TableFactor(direct_product_table(cyclic_table(2), alternating5_table()), seed=1)
    assert t.order == 120


# --- descriptions ----------------------------------------------------------------------------------

def test_group_from_json_shapes():
    assert group_from_json({"type": "free", "rank": 2}) == FreeGroup(2)
    g = group_from_json({"type": "cyclic", "order": 5})
    assert isinstance(g, ProductGroup) and g.factors == (CyclicFactor(5),)
    g = group_from_json(
        '{"type": "product", "factors": [{"type": "cyclic", "order": 2},'
        ' {"type": "finite", "builtin": "binary-dihedral", "n": 3, "m": 5}]}'
    )
    assert g.factors[1].order == 60 and g.factors[1].list_member
    with pytest.raises(GroupError):
        group_from_json({"type": "finite", "builtin": "M11"})
    with pytest.raises(GroupError):
        group_from_json({"type": "quaternionic"})


def test_parse_errors():
    for bad in ("2:1", "0:x", "01", "1:3"):
        with pytest.raises(GroupError):
            Z23.parse(bad)
    with pytest.raises(GroupError):
        Z23.parse([[0]])


def test_elements_enumeration():
    xs = list(Z23.elements(2))
    assert len(xs) == len(set(xs)) == 1 + 3 + 2 * 2
    assert all(normal_form(list(x), Z23) == x for x in xs)


def test_classify_special_warns_off_list():
    g = ProductGroup([TableFactor(cyclic_table(3)), CyclicFactor(2)])
    hom = make_hom(SurfaceGroupSpec(1), (g.parse("0:1"), g.parse("0:2")), g)
    with pytest.warns(UserWarning, match="outside the supported list"):
        cert = classify_special(hom)
    assert isinstance(cert, Certificate)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        classify_special(make_hom(SurfaceGroupSpec(1), (Z23.parse("1:1"), Z23.parse("1:2")), Z23))
