"""Free products of free, cyclic and finite (table) groups.

An element is a tuple of syllables ``(factor_index, element)`` with adjacent
syllables from different factors and no identity syllables.  Free-factor
elements are :class:`~quadgroup.words.Word` values, cyclic elements are
residues and table elements are row indices.

Text syntax for elements: space separated ``i:elem`` tokens, for example
``0:1 1:2`` (the generator of the first factor times the square of the
second's), ``2:abA`` for a free-factor syllable, or ``1`` for the identity.
"""

from __future__ import annotations

import itertools
import json
import random
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterator, Sequence

from .words import FreeGroup, Word, WordError, enumerate_words, format_word, inverse, mul, parse_word


class GroupError(ValueError):
    """Invalid group description or element."""


# --- factors ------------------------------------------------------------------------------

class FreeFactor:
    kind = "free"

    def __init__(self, rank: int):
        if rank < 1:
            raise GroupError("free factor rank must be >= 1")
        self.rank = rank
        self.identity = Word.from_reduced(())

    def mul(self, a, b):
        return mul(a, b)

    def inv(self, a):
        return inverse(a)

    def is_identity(self, a) -> bool:
        return not a

    def length(self, a) -> int:
        return len(a)

    def first(self, a):
        return Word.from_reduced(a[:1])

    def validate(self, a):
        if not isinstance(a, tuple) or any(x == 0 or abs(x) > self.rank for x in a):
            raise GroupError(f"{a!r} is not a word of rank {self.rank}")
        return Word.from_reduced(a)

    def parse(self, text) -> Word:
        try:
            return parse_word(str(text), self.rank)
        except WordError as e:
            raise GroupError(str(e)) from e

    def to_json(self, a):
        return format_word(a)

    def format(self, a) -> str:
        return format_word(a)

    def order_at_most_two(self, a) -> bool:
        return not a

    def elements(self, max_length: int = 1) -> Iterator:
        return enumerate_words(self.rank, max_length, min_length=1)

    def spec_json(self) -> dict:
        return {"type": "free", "rank": self.rank}

    def on_supported_list(self) -> bool:
        return self.rank == 1

    def __eq__(self, other):
        return isinstance(other, FreeFactor) and other.rank == self.rank

    def __hash__(self):
        return hash(("free", self.rank))


class _FiniteFactor:
    order: int
    identity: int

    def is_identity(self, a) -> bool:
        return a == self.identity

    def length(self, a) -> int:
        return 0 if a == self.identity else 1

    def first(self, a):
        return a

    def validate(self, a):
        if not isinstance(a, int) or isinstance(a, bool) or not 0 <= a < self.order:
            raise GroupError(f"{a!r} is not an element index below {self.order}")
        return a

    def parse(self, text) -> int:
        try:
            return self.validate(int(text))
        except (TypeError, ValueError) as e:
            raise GroupError(f"bad element {text!r}: {e}") from e

    def to_json(self, a):
        return a

    def format(self, a) -> str:
        return str(a)

    def order_at_most_two(self, a) -> bool:
        return self.is_identity(self.mul(a, a))

    def elements(self, max_length: int = 1) -> Iterator[int]:
        return (a for a in range(self.order) if a != self.identity)


class CyclicFactor(_FiniteFactor):
    kind = "cyclic"

    def __init__(self, order: int):
        if order < 2:
            raise GroupError("cyclic order must be >= 2")
        self.order = order
        self.identity = 0

    def mul(self, a, b):
        return (a + b) % self.order

    def inv(self, a):
        return (-a) % self.order

    def spec_json(self) -> dict:
        return {"type": "cyclic", "order": self.order}

    def on_supported_list(self) -> bool:
        return True

    def __eq__(self, other):
        return isinstance(other, CyclicFactor) and other.order == self.order

    def __hash__(self):
        return hash(("cyclic", self.order))


class TableFactor(_FiniteFactor):
    """A finite group given by its multiplication table, validated on construction."""

    kind = "finite"

    def __init__(self, table: Sequence[Sequence[int]], name: str = "", list_member: bool = False, seed: int = 0):
        self.table = tuple(tuple(int(x) for x in row) for row in table)
        self.order = len(self.table)
        self.name = name
        self.list_member = list_member
        self._validate(seed)

    def _validate(self, seed: int) -> None:
        n = self.order
        t = self.table
        if n == 0 or any(len(row) != n for row in t):
            raise GroupError("table must be square and non-empty")
        if any(not 0 <= x < n for row in t for x in row):
            raise GroupError("table entries must be element indices")
        ids = [e for e in range(n) if all(t[e][a] == a and t[a][e] == a for a in range(n))]
        if not ids:
            raise GroupError("table has no identity element")
        self.identity = ids[0]
        inv = []
        for a in range(n):
            bs = [b for b in range(n) if t[a][b] == self.identity]
            if len(bs) != 1 or t[bs[0]][a] != self.identity:
                raise GroupError(f"element {a} has no two-sided inverse")
            inv.append(bs[0])
        self._inv = tuple(inv)
        if n <= 64:
            triples = itertools.product(range(n), repeat=3)
        else:
            rng = random.Random(seed)
            triples = ((rng.randrange(n), rng.randrange(n), rng.randrange(n)) for _ in range(200_000))
        for a, b, c in triples:
            if t[t[a][b]][c] != t[a][t[b][c]]:
                raise GroupError(f"table is not associative at ({a}, {b}, {c})")

    def mul(self, a, b):
        return self.table[a][b]

    def inv(self, a):
        return self._inv[a]

    def spec_json(self) -> dict:
        d: dict[str, Any] = {"type": "finite", "name": self.name, "table": [list(r) for r in self.table]}
        if self.list_member:
            d["list_member"] = True
        return d

    def on_supported_list(self) -> bool:
        return self.list_member

    def __eq__(self, other):
        return isinstance(other, TableFactor) and other.table == self.table

    def __hash__(self):
        return hash(("finite", self.table))


# --- table builders ----------------------------------------------------------------------------

def table_from_elements(elements: Sequence, op) -> list[list[int]]:
    index = {e: i for i, e in enumerate(elements)}
    return [[index[op(a, b)] for b in elements] for a in elements]


def cyclic_table(m: int) -> list[list[int]]:
    return [[(a + b) % m for b in range(m)] for a in range(m)]


def binary_dihedral_table(n: int) -> list[list[int]]:
    """D*_n of order 4n: <x, y | x^(2n) = 1, y^2 = x^n, y x y^-1 = x^-1>; element x^k y^e is 2k + e."""
    if n < 2:
        raise GroupError("binary dihedral needs n >= 2")
    m = 2 * n

    def op(p, q):
        (a, e), (b, f) = p, q
        if e == 0:
            return ((a + b) % m, f)
        if f == 0:
            return ((a - b) % m, 1)
        return ((a - b + n) % m, 0)

    elements = [(k, e) for k in range(m) for e in (0, 1)]
    return table_from_elements(elements, op)


def _perm_table(perms: list[tuple[int, ...]]) -> list[list[int]]:
    return table_from_elements(perms, lambda p, q: tuple(p[q[i]] for i in range(len(q))))


def _sign(p: Sequence[int]) -> int:
    s = 1
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                s = -s
    return s


def symmetric4_table() -> list[list[int]]:
    return _perm_table(list(itertools.permutations(range(4))))


def alternating5_table() -> list[list[int]]:
    return _perm_table([p for p in itertools.permutations(range(5)) if _sign(p) > 0])


def direct_product_table(t1: Sequence[Sequence[int]], t2: Sequence[Sequence[int]]) -> list[list[int]]:
    """Table of G1 x G2 with (a, b) at index a * |G2| + b."""
    n2 = len(t2)
    n = len(t1) * n2
    return [
        [t1[i // n2][j // n2] * n2 + t2[i % n2][j % n2] for j in range(n)]
        for i in range(n)
    ]


_BUILTINS = {
    "binary-dihedral": lambda d: binary_dihedral_table(int(d["n"])),
    "S4": lambda d: symmetric4_table(),
    "A5": lambda d: alternating5_table(),
}


# --- free products ------------------------------------------------------------------------------

class ProductElement(tuple):
    """Normal-form element: a tuple of (factor index, factor element) syllables."""

    __slots__ = ()

    @property
    def syllables(self) -> tuple:
        return tuple(self)


IDENTITY = ProductElement(())


class ProductGroup:
    """Free product of the given factors, usable as a target group."""

    kind = "product"

    def __init__(self, factors: Sequence):
        if not factors:
            raise GroupError("a free product needs at least one factor")
        self.factors = tuple(factors)
        self.identity = IDENTITY

    def __repr__(self):
        return f"ProductGroup({json.dumps(self.spec_json()['factors'])[:80]})"

    def __eq__(self, other):
        return isinstance(other, ProductGroup) and other.factors == self.factors

    def __hash__(self):
        return hash(self.factors)

    # arithmetic ---------------------------------------------------------------------------
    def syllable(self, i: int, a) -> ProductElement:
        return normal_form([(i, a)], self)

    def mul(self, *xs) -> ProductElement:
        out: list = []
        for x in xs:
            for s in x:
                _push(out, s, self.factors)
        return ProductElement(out)

    def inv(self, x) -> ProductElement:
        return ProductElement((i, self.factors[i].inv(a)) for i, a in reversed(x))

    def is_identity(self, x) -> bool:
        return not x

    def length(self, x) -> int:
        return sum(max(1, self.factors[i].length(a)) for i, a in x)

    def first(self, x) -> ProductElement:
        i, a = x[0]
        return ProductElement([(i, self.factors[i].first(a))])

    def order_at_most_two(self, x) -> bool:
        return self.is_identity(self.mul(x, x))

    # syntax -----------------------------------------------------------------------------------
    def parse(self, data) -> ProductElement:
        if isinstance(data, ProductElement):
            return data
        if isinstance(data, str):
            s = data.strip()
            if s in ("", "1", "e"):
                return IDENTITY
            raw = []
            for tok in s.split():
                if ":" not in tok:
                    raise GroupError(f"product syllable {tok!r} must look like i:elem")
                i, _, a = tok.partition(":")
                raw.append((self._index(i), self.factors[self._index(i)].parse(a)))
            return normal_form(raw, self)
        raw = []
        for item in data:
            if len(item) != 2:
                raise GroupError(f"syllable {item!r} must be [factor, element]")
            i = self._index(item[0])
            raw.append((i, self.factors[i].parse(item[1])))
        return normal_form(raw, self)

    def _index(self, i) -> int:
        try:
            k = int(i)
        except (TypeError, ValueError) as e:
            raise GroupError(f"bad factor index {i!r}") from e
        if not 0 <= k < len(self.factors):
            raise GroupError(f"factor index {k} out of range")
        return k

    def to_json(self, x) -> list:
        return [[i, self.factors[i].to_json(a)] for i, a in x]

    def format(self, x) -> str:
        if not x:
            return "1"
        return " ".join(f"{i}:{self.factors[i].format(a)}" for i, a in x)

    def spec_json(self) -> dict:
        return {"type": "product", "factors": [f.spec_json() for f in self.factors]}

    # enumeration ---------------------------------------------------------------------------------
    def elements(self, max_syllables: int, free_length: int = 1) -> Iterator[ProductElement]:
        """All normal forms with at most max_syllables syllables (free syllables up to free_length)."""
        options = [
            list(f.elements(free_length)) for f in self.factors
        ]
        yield IDENTITY
        for k in range(1, max_syllables + 1):
            for idx in itertools.product(range(len(self.factors)), repeat=k):
                if any(idx[j] == idx[j + 1] for j in range(k - 1)):
                    continue
                for elems in itertools.product(*(options[i] for i in idx)):
                    yield ProductElement(zip(idx, elems))

    # factors ----------------------------------------------------------------------------------------
    def conjugate_into_factor(self, x):
        return conjugate_into_factor(x, self)

    def common_conjugator(self, images: Sequence) -> tuple[ProductElement, tuple] | None:
        """A z with every z^-1 x z in one factor, when one exists among the candidates tried."""
        nontrivial = [x for x in images if x]
        if not nontrivial:
            return IDENTITY, tuple(images)
        found = conjugate_into_factor(nontrivial[0], self)
        if found is None:
            return None
        i, _, z = found
        zi = self.inv(z)
        out = tuple(self.mul(zi, x, z) for x in images)
        if all(len(y) <= 1 and (not y or y[0][0] == i) for y in out):
            return z, out
        return None

    def unsupported_factors(self) -> list[int]:
        """Indices of factors outside the supported list (Z, Z_m, and tables flagged as list members)."""
        return [k for k, f in enumerate(self.factors) if not f.on_supported_list()]


def _push(out: list, s, factors) -> None:
    i, a = s
    f = factors[i]
    if f.is_identity(a):
        return
    if out and out[-1][0] == i:
        b = f.mul(out[-1][1], a)
        out.pop()
        if not f.is_identity(b):
            out.append((i, b))
    else:
        out.append((i, a))


def normal_form(raw: Sequence, group: ProductGroup) -> ProductElement:
    """Merge adjacent syllables of the same factor and drop identities, to a fixpoint."""
    out: list = []
    for item in raw:
        i, a = item
        if not isinstance(i, int) or not 0 <= i < len(group.factors):
            raise GroupError(f"factor index {i!r} out of range")
        a = group.factors[i].validate(a)
        _push(out, (i, a), group.factors)
    return ProductElement(out)


def conjugate_into_factor(x: Sequence, group: ProductGroup):
    """(i, a, z) with x = z a z^-1 and a in factor i, or None.

    The identity is reported in factor 0 with trivial conjugator.
    """
    x = ProductElement(x)
    if not x:
        return 0, group.factors[0].identity, IDENTITY
    z: list = []
    cur = x
    # x = a m b with a, b in the same factor equals a (m b a) a^-1
    while len(cur) >= 2 and cur[0][0] == cur[-1][0]:
        i, a = cur[0]
        b = cur[-1][1]
        z.append((i, a))
        cur = group.mul(ProductElement(cur[1:-1]), ProductElement([(i, group.factors[i].mul(b, a))]))
    if len(cur) != 1:
        return None
    zz = group.mul(*(ProductElement([s]) for s in z))
    i, a = cur[0]
    if group.mul(zz, cur, group.inv(zz)) != x:
        raise AssertionError("conjugator check failed")
    return i, a, zz


# --- group descriptions --------------------------------------------------------------------------

def _factor_from_json(d: dict, seed: int = 0):
    t = d.get("type")
    if t == "free":
        return FreeFactor(int(d["rank"]))
    if t == "cyclic":
        return CyclicFactor(int(d["order"]))
    if t == "finite":
        if "builtin" in d:
            name = d["builtin"]
            if name not in _BUILTINS:
                raise GroupError(f"unknown builtin group {name!r}")
            table = _BUILTINS[name](d)
            if "m" in d:
                table = direct_product_table(cyclic_table(int(d["m"])), table)
            label = d.get("name", name if "m" not in d else f"Z{d['m']} x {name}")
            return TableFactor(table, label, list_member=bool(d.get("list_member", True)), seed=seed)
        if "table" not in d:
            raise GroupError("finite group needs a table or a builtin")
        return TableFactor(d["table"], d.get("name", ""), list_member=bool(d.get("list_member", False)), seed=seed)
    raise GroupError(f"unknown group type {t!r}")


def group_from_json(d: dict | str, seed: int = 0):
    """Parse a group description; a bare free group becomes :class:`FreeGroup`."""
    if isinstance(d, str):
        d = load_group_json(d)
    if not isinstance(d, dict):
        raise GroupError("group description must be a JSON object")
    if d.get("type") == "free":
        return FreeGroup(int(d["rank"]))
    if d.get("type") == "product":
        factors = d.get("factors") or []
        return ProductGroup([_factor_from_json(f, seed) for f in factors])
    return ProductGroup([_factor_from_json(d, seed)])


def load_group_json(text: str) -> dict:
    """Inline JSON or a path to a JSON file."""
    s = text.strip()
    if s.startswith("{"):
        return json.loads(s)
    return json.loads(Path(s).read_text())


def z2_z3() -> ProductGroup:
    return ProductGroup([CyclicFactor(2), CyclicFactor(3)])


# --- decompositions --------------------------------------------------------------------------------

@dataclass
class VerificationReport:
    items: list[tuple[str, bool, str]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.items)

    def add(self, name: str, ok: bool, detail: str = "") -> None:
        self.items.append((name, ok, detail))

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "items": [{"check": n, "pass": ok, "detail": d} for n, ok, d in self.items],
        }


def _in_one_factor(x, group) -> int | None:
    """Factor index holding x, -1 for the identity, None if x spans several."""
    if isinstance(group, FreeGroup):
        return 0
    if not x:
        return -1
    return x[0][0] if len(x) == 1 else None


def verify_decomposition(hom, dec) -> VerificationReport:
    """Itemised checks of a pinch decomposition against its homomorphism."""
    from .surface import CirclePiece, ProjectivePiece, SurfacePiece

    if dec.hom.spec != hom.spec or len(dec.hom.images) != len(hom.images):
        raise ValueError("decomposition belongs to a different surface group")
    g = hom.target
    rep = VerificationReport()
    try:
        back = dec.recompose()
        rep.add("recomposition", back == tuple(hom.images), "")
    except ValueError as e:
        rep.add("recomposition", False, str(e))
    rep.add("euler-bookkeeping", dec.euler_ok(), f"{len(dec.splits)} splits")
    for k, p in enumerate(dec.pieces):
        if isinstance(p, SurfacePiece):
            where = {_in_one_factor(x, g) for x in p.images} - {-1}
            ok = None not in where and len(where) <= 1
            rep.add(f"piece {k}: surface images in one factor", ok, f"factors {sorted(w for w in where if w is not None)}")
        elif isinstance(p, CirclePiece):
            rep.add(f"piece {k}: circle", True, "unconstrained")
        elif isinstance(p, ProjectivePiece):
            rep.add(f"piece {k}: projective image of order <= 2", g.order_at_most_two(p.image), g.format(p.image))
    return rep


def classify_special(hom, budget: int = 100_000):
    """Elementary check for free products of Z, Z_m and flagged table factors."""
    from .surface import elementary_check

    g = hom.target
    if isinstance(g, ProductGroup):
        off = g.unsupported_factors()
        if off:
            warnings.warn(
                f"factors {off} are outside the supported list; a certificate is not guaranteed",
                stacklevel=2,
            )
    return elementary_check(hom, budget)
