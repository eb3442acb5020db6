"""Quadratic words: recognition, polygon surface type, and canonical forms.

A quadratic word is a word in variables ``x1..xn`` in which every occurring
variable appears exactly twice.  :func:`canonicalize` finds an automorphism
``phi`` of the free group on the variables, recorded as a replayable list of
elementary moves, with ``phi(q) = [x1,x2]...[x_{2g-1},x_{2g}]`` or
``phi(q) = x1^2...xg^2`` exactly (after free reduction).

Two notions of genus live here and they answer different questions:

* :func:`polygon_type` reads ``q`` as a gluing pattern on a single polygon and
  reports the closed surface obtained (orientability, genus, Euler
  characteristic).
* :func:`canonicalize` reports the automorphism-orbit representative of ``q``
  as an element of a free group.

For cyclically reduced quadratic words the two agree, which the test-suite
checks exhaustively on short words; they are still kept as separate results
because they are computed by unrelated procedures.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .words import (
    IDENTITY,
    Word,
    WordError,
    cyclic_reduce,
    inverse,
    mul,
    reduce,
)

_VAR_LETTERS = "xyzuvw"
_VAR_TOKEN = re.compile(r"\s*(?:([xX])(\d+)|([xyzuvwXYZUVW]))\s*(?:\^\s*(-?\d+))?\s*")


def parse_variables(text: str) -> Word:
    """Parse a word in variables: ``x y X Y``, ``x1 x2 x1^-1 x2^-1``, ``x x``."""
    s = text.strip()
    if s in ("", "1"):
        return IDENTITY
    raw: list[int] = []
    pos = 0
    while pos < len(s):
        m = _VAR_TOKEN.match(s, pos)
        if not m or m.end() == pos:
            raise WordError(f"cannot parse variable word {text!r} at position {pos}")
        if m.group(2) is not None:
            idx = int(m.group(2))
            sign = 1 if m.group(1) == "x" else -1
        else:
            ch = m.group(3)
            idx = _VAR_LETTERS.index(ch.lower()) + 1
            sign = 1 if ch.islower() else -1
        if idx < 1:
            raise WordError("variable indices start at 1")
        k = int(m.group(4)) if m.group(4) is not None else 1
        if k < 0:
            sign, k = -sign, -k
        raw.extend([idx * sign] * k)
        pos = m.end()
    return reduce(raw)


def format_variables(w: Sequence[int]) -> str:
    if not w:
        return "1"
    return " ".join(f"x{abs(v)}" + ("" if v > 0 else "^-1") for v in w)


# --- recognition ---------------------------------------------------------------

@dataclass(frozen=True)
class QuadraticWord:
    word: Word
    n_variables: int

    @property
    def variables(self) -> tuple[int, ...]:
        return tuple(sorted({abs(v) for v in self.word}))

    @property
    def orientable_type(self) -> bool:
        return all(
            sum(1 for x in self.word if x == v) == 1 for v in self.variables
        )

    def __str__(self):
        return format_variables(self.word)


@dataclass(frozen=True)
class NotQuadratic:
    variable: int
    count: int
    reason: str


def classify_quadratic(w: Sequence[int], n: int | None = None) -> QuadraticWord | NotQuadratic:
    """Accept w iff, after cyclic reduction, each occurring variable occurs twice."""
    core = cyclic_reduce(reduce(w))[0].letters
    counts: dict[int, int] = {}
    for x in core:
        counts[abs(x)] = counts.get(abs(x), 0) + 1
    for v in sorted(counts):
        if counts[v] != 2:
            return NotQuadratic(v, counts[v], f"x{v} occurs {counts[v]} times")
    if n is None:
        n = max(counts, default=0)
    if counts and max(counts) > n:
        raise WordError(f"variable x{max(counts)} exceeds n = {n}")
    return QuadraticWord(core, n)


def quadratic(w: Sequence[int] | str, n: int | None = None) -> QuadraticWord:
    """Like classify_quadratic but raises on non-quadratic input."""
    if isinstance(w, str):
        w = parse_variables(w)
    q = classify_quadratic(w, n)
    if isinstance(q, NotQuadratic):
        raise WordError(f"not quadratic: {q.reason}")
    return q


# --- polygon surface type -----------------------------------------------------------

@dataclass(frozen=True)
class PolygonType:
    orientable: bool
    genus: int
    euler_characteristic: int


def corner_classes(word: Sequence[int]) -> int:
    """Number of vertices of the one-polygon gluing described by a quadratic cyclic word.

    Edge i runs from corner i to corner i+1 (indices mod len).
    """
    n = len(word)
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        parent[find(a)] = find(b)

    where: dict[int, list[int]] = {}
    for i, x in enumerate(word):
        where.setdefault(abs(x), []).append(i)
    for i, j in where.values():
        if (word[i] > 0) == (word[j] > 0):
            union(i, j)
            union((i + 1) % n, (j + 1) % n)
        else:
            union(i, (j + 1) % n)
            union((i + 1) % n, j)
    return len({find(a) for a in range(n)})


def polygon_type(q: QuadraticWord) -> PolygonType:
    w = q.word
    if not w:
        return PolygonType(True, 0, 2)
    chi = corner_classes(w) - len(w) // 2 + 1
    if q.orientable_type:
        return PolygonType(True, (2 - chi) // 2, chi)
    return PolygonType(False, 2 - chi, chi)


# --- substitutions ---------------------------------------------------------------

def substitute(w: Sequence[int], images: Mapping[int, Word] | Sequence[Word]) -> Word:
    """Apply x_i -> images[i] (1-based mapping or 0-based sequence) and reduce."""
    if isinstance(images, Mapping):
        get = lambda v: images.get(v)  # noqa: E731
    else:
        get = lambda v: images[v - 1] if v <= len(images) else None  # noqa: E731
    parts = []
    for x in w:
        im = get(abs(x))
        if im is None:
            im = Word.from_reduced((abs(x),))
        parts.append(im if x > 0 else inverse(im))
    return mul(*parts)


@dataclass(frozen=True)
class Move:
    """One elementary automorphism of the free group on the variables.

    kinds: ``invert`` (x -> x^-1), ``right`` (x -> x.w), ``left`` (x -> w.x),
    ``conjugate`` (each v in vars -> c v c^-1, c in <vars> or c free of vars),
    ``swap_inv`` (x -> y, y -> x^-1), ``rename`` (x_i -> x_perm[i]).
    """

    kind: str
    var: int = 0
    other: int = 0
    word: Word = IDENTITY
    vars: tuple[int, ...] = ()
    perm: tuple[int, ...] = ()

    def images(self) -> dict[int, Word]:
        k = self.kind
        if k == "invert":
            return {self.var: Word.from_reduced((-self.var,))}
        if k == "right":
            return {self.var: mul((self.var,), self.word)}
        if k == "left":
            return {self.var: mul(self.word, (self.var,))}
        if k == "conjugate":
            c, ci = self.word, inverse(self.word)
            return {v: mul(c, (v,), ci) for v in self.vars}
        if k == "swap_inv":
            return {
                self.var: Word.from_reduced((self.other,)),
                self.other: Word.from_reduced((-self.var,)),
            }
        if k == "rename":
            return {i + 1: Word.from_reduced((p,)) for i, p in enumerate(self.perm)}
        raise ValueError(f"unknown move kind {k!r}")

    def inverse(self) -> "Move":
        k = self.kind
        if k in ("right", "left", "conjugate"):
            return Move(k, self.var, self.other, inverse(self.word), self.vars, self.perm)
        if k == "invert":
            return self
        if k == "swap_inv":
            # x -> y^-1, y -> x  ==  swap_inv with roles exchanged
            return Move("swap_inv", self.other, self.var)
        if k == "rename":
            inv = [0] * len(self.perm)
            for i, p in enumerate(self.perm):
                inv[p - 1] = i + 1
            return Move("rename", perm=tuple(inv))
        raise ValueError(k)

    def to_json(self) -> dict:
        d: dict = {"kind": self.kind}
        if self.var:
            d["var"] = self.var
        if self.other:
            d["other"] = self.other
        if self.word:
            d["word"] = list(self.word)
        if self.vars:
            d["vars"] = list(self.vars)
        if self.perm:
            d["perm"] = list(self.perm)
        return d

    @classmethod
    def from_json(cls, d: dict) -> "Move":
        return cls(
            d["kind"],
            d.get("var", 0),
            d.get("other", 0),
            Word.from_reduced(d.get("word", ())),
            tuple(d.get("vars", ())),
            tuple(d.get("perm", ())),
        )


def _identity_images(n: int) -> tuple[Word, ...]:
    return tuple(Word.from_reduced((i,)) for i in range(1, n + 1))


@dataclass
class Substitution:
    """An automorphism phi of F(x1..xn) with its inverse and the move list.

    ``images[i]`` is phi(x_{i+1}); ``inverse_images`` is phi^-1 likewise.
    Applying phi to a word substitutes ``images``.
    """

    n: int
    images: tuple[Word, ...]
    inverse_images: tuple[Word, ...]
    moves: list[Move] = field(default_factory=list)
    direction: str = "original->canonical"

    @classmethod
    def identity(cls, n: int) -> "Substitution":
        ids = _identity_images(n)
        return cls(n, ids, ids, [])

    def then(self, move: Move) -> "Substitution":
        """Compose: the result maps q to move(self(q))."""
        mimg = move.images()
        nimg = move.inverse().images()
        images = tuple(substitute(im, mimg) for im in self.images)
        ids = _identity_images(self.n)
        inv = tuple(substitute(nimg.get(j + 1, ids[j]), self.inverse_images) for j in range(self.n))
        return Substitution(self.n, images, inv, self.moves + [move], self.direction)

    def apply(self, w: Sequence[int]) -> Word:
        return substitute(w, self.images)

    def apply_inverse(self, w: Sequence[int]) -> Word:
        return substitute(w, self.inverse_images)

    def replay(self) -> "Substitution":
        s = Substitution.identity(self.n)
        for m in self.moves:
            s = s.then(m)
        return s

    def is_identity(self) -> bool:
        return self.images == _identity_images(self.n)


# --- canonical forms ---------------------------------------------------------------

class Kind(enum.Enum):
    TRIVIAL = "trivial"
    ORIENTABLE = "orientable"
    NON_ORIENTABLE = "non-orientable"


@dataclass(frozen=True)
class CanonicalForm:
    kind: Kind
    genus: int

    def word(self) -> Word:
        if self.kind is Kind.ORIENTABLE:
            out: list[int] = []
            for i in range(self.genus):
                a, b = 2 * i + 1, 2 * i + 2
                out += [a, b, -a, -b]
            return Word.from_reduced(out)
        if self.kind is Kind.NON_ORIENTABLE:
            return Word.from_reduced(v for i in range(1, self.genus + 1) for v in (i, i))
        return IDENTITY

    @property
    def n_variables(self) -> int:
        if self.kind is Kind.ORIENTABLE:
            return 2 * self.genus
        return self.genus

    def __str__(self):
        if self.kind is Kind.TRIVIAL:
            return "trivial"
        return f"{self.kind.value} genus {self.genus}: {format_variables(self.word())}"


class _Canonicalizer:
    def __init__(self, q: QuadraticWord):
        self.n = max(q.n_variables, max(q.variables, default=0))
        self.sub = Substitution.identity(self.n)
        self.word = q.word
        self.prefix_len = 0
        self.blocks: list[tuple[int, ...]] = []

    def move(self, m: Move) -> None:
        self.sub = self.sub.then(m)
        self.word = substitute(self.word, m.images())

    @property
    def rest(self) -> Word:
        return Word.from_reduced(self.word[self.prefix_len :])

    def rotate_rest(self, k: int) -> None:
        rest = self.rest
        if k % max(len(rest), 1) == 0:
            return
        head = Word.from_reduced(rest[:k])
        vs = tuple(sorted({abs(x) for x in rest}))
        self.move(Move("conjugate", vars=vs, word=inverse(head)))

    def positions(self) -> dict[int, list[int]]:
        where: dict[int, list[int]] = {}
        for i, x in enumerate(self.rest):
            where.setdefault(abs(x), []).append(i)
        return where

    def run(self) -> tuple[CanonicalForm, Substitution]:
        while True:
            rest = self.rest
            if len(rest) >= 2 and rest[0] == -rest[-1]:
                self.move(Move("conjugate", vars=tuple(sorted({abs(x) for x in rest})),
                               word=Word.from_reduced((-rest[0],))))
                continue
            if not rest:
                break
            where = self.positions()
            same = [v for v in sorted(where) if rest[where[v][0]] == rest[where[v][1]]]
            if self.take_leading_block(rest, bool(same)):
                continue
            if same:
                self.extract_square(same[0], where)
                continue
            if self.eliminate_unlinked(where):
                continue
            if self.blocks and len(self.blocks[-1]) == 1:
                self.square_absorbs_handle(where)
            else:
                self.extract_commutator(where)
        return self.finish()

    def take_leading_block(self, rest: Word, non_orientable: bool) -> bool:
        """Accept a block that already sits in canonical shape at the front."""
        squares = bool(self.blocks) and len(self.blocks[-1]) == 1
        if len(rest) >= 2 and rest[0] > 0 and rest[1] == rest[0]:
            if squares or not self.blocks:
                self.blocks.append((rest[0],))
                self.prefix_len += 2
                return True
        if non_orientable or squares or len(rest) < 4:
            return False
        x, y = rest[0], rest[1]
        if x > 0 and y > 0 and rest[2] == -x and rest[3] == -y:
            self.blocks.append((x, y))
            self.prefix_len += 4
            return True
        return False

    def extract_square(self, x: int, where: dict[int, list[int]]) -> None:
        i, _ = where[x]
        if self.rest[i] < 0:
            self.move(Move("invert", var=x))
        self.rotate_rest(i)
        rest = self.rest
        j = rest.index(x, 1)
        u = Word.from_reduced(rest[1:j])
        if u:
            self.move(Move("right", var=x, word=inverse(u)))
        assert self.word[self.prefix_len : self.prefix_len + 2] == (x, x)
        self.blocks.append((x,))
        self.prefix_len += 2

    def _linked(self, x: int, where) -> list[int]:
        i, j = where[x]
        inside = {abs(v) for v in self.rest[i + 1 : j]}
        return [v for v in sorted(inside) if not (i < where[v][0] < j and i < where[v][1] < j)]

    def eliminate_unlinked(self, where) -> bool:
        for x in sorted(where):
            if self._linked(x, where):
                continue
            i, _ = where[x]
            if self.rest[i] < 0:
                self.move(Move("invert", var=x))
            self.rotate_rest(i)
            rest = self.rest
            j = rest.index(-x)
            inner = tuple(sorted({abs(v) for v in rest[1:j]}))
            # x U x^-1 V  ->  U V
            self.move(Move("conjugate", vars=inner, word=Word.from_reduced((-x,))))
            return True
        return False

    def square_absorbs_handle(self, where) -> None:
        # P' x x . y R1 y^-1 R2  --(y -> x^-1 y)-->  P' . x y R1 y^-1 x R2
        x = self.blocks[-1][0]
        y = min(v for v in where if self._linked(v, where))
        i = where[y][0] if self.rest[where[y][0]] > 0 else where[y][1]
        self.rotate_rest(i)
        self.move(Move("left", var=y, word=Word.from_reduced((-x,))))
        self.blocks.pop()
        self.prefix_len -= 2

    def extract_commutator(self, where) -> None:
        x = min(where)
        y = self._linked(x, where)[0]
        if self.rest[where[x][0]] < 0:
            self.move(Move("invert", var=x))
        self.rotate_rest(where[x][0])
        rest = self.rest
        jy = next(k for k, v in enumerate(rest) if abs(v) == y)
        if rest[jy] < 0:
            self.move(Move("invert", var=y))
        rest = self.rest
        # rest = x A y B x^-1 C y^-1 D
        jy = rest.index(y)
        jx = rest.index(-x)
        a = Word.from_reduced(rest[1:jy])
        if a:
            self.move(Move("left", var=y, word=inverse(a)))
        rest = self.rest
        jy, jx = rest.index(y), rest.index(-x)
        b = Word.from_reduced(rest[jy + 1 : jx])
        if b:
            self.move(Move("right", var=y, word=inverse(b)))
        # rest = x y x^-1 E y^-1 F ; rotate to y^-1 F x y x^-1 E
        rest = self.rest
        self.rotate_rest(rest.index(-y))
        rest = self.rest
        jx = rest.index(x)
        f = Word.from_reduced(rest[1:jx])
        if f:
            self.move(Move("left", var=x, word=inverse(f)))
        # y^-1 x y x^-1 ...  ->  x y x^-1 y^-1 ...
        self.move(Move("swap_inv", var=x, other=y))
        assert self.word[self.prefix_len : self.prefix_len + 4] == (x, y, -x, -y)
        self.blocks.append((x, y))
        self.prefix_len += 4

    def finish(self) -> tuple[CanonicalForm, Substitution]:
        order = [v for b in self.blocks for v in b]
        rest = [v for v in range(1, self.n + 1) if v not in order]
        perm = [0] * self.n
        for new, old in enumerate(order + rest, start=1):
            perm[old - 1] = new
        if perm != list(range(1, self.n + 1)):
            self.move(Move("rename", perm=tuple(perm)))
        if not self.blocks:
            form = CanonicalForm(Kind.TRIVIAL, 0)
        elif len(self.blocks[0]) == 1:
            form = CanonicalForm(Kind.NON_ORIENTABLE, len(self.blocks))
        else:
            form = CanonicalForm(Kind.ORIENTABLE, len(self.blocks))
        assert self.word == form.word(), (self.word, form)
        return form, self.sub


def canonicalize(q: QuadraticWord | str | Sequence[int]) -> tuple[CanonicalForm, Substitution]:
    """Return the canonical form of q and an automorphism phi with phi(q) = canonical word."""
    if not isinstance(q, QuadraticWord):
        q = quadratic(q)
    form, sub = _Canonicalizer(q).run()
    if sub.apply(q.word) != form.word():
        raise AssertionError("canonicalization produced an inconsistent substitution")
    return form, sub


def transport_solution(
    sub: Substitution, canonical_solution: Sequence[Sequence[int]], group=None
) -> tuple:
    """Map a solution of the canonical equation to one of the original word.

    If ``canonical(s) = z`` then ``q(phi(s)) = z``: original variable j takes
    the value of ``phi(x_j)`` evaluated at ``s``.  Components of ``s`` are words
    in a free group unless ``group`` supplies other arithmetic.
    """
    if len(canonical_solution) != sub.n:
        raise ValueError(
            f"solution has {len(canonical_solution)} components, substitution has {sub.n}"
        )
    return tuple(evaluate(im, canonical_solution, group) for im in sub.images)


def evaluate(w: Sequence[int], values: Sequence, group=None):
    """Evaluate a word in variables at concrete group elements."""
    if group is None:
        parts = [values[abs(x) - 1] if x > 0 else inverse(values[abs(x) - 1]) for x in w]
        return mul(*parts)
    out = group.identity
    for x in w:
        v = values[abs(x) - 1]
        out = group.mul(out, v if x > 0 else group.inv(v))
    return out


def enumerate_quadratic_words(max_vars: int, max_length: int) -> Iterable[Word]:
    """All cyclically reduced quadratic words on variables 1..max_vars of length <= max_length."""
    from .words import enumerate_words

    for w in enumerate_words(max_vars, max_length, min_length=2):
        if len(w) % 2:
            continue
        if len(w) >= 2 and w[0] == -w[-1]:
            continue
        counts: dict[int, int] = {}
        for x in w:
            counts[abs(x)] = counts.get(abs(x), 0) + 1
        if all(c == 2 for c in counts.values()):
            yield w
