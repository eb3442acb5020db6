"""Commutator genus of free-group elements.

Lower bounds come only from exhaustive Wicks-form matching; upper bounds come
from verified witnesses (a Wicks match, a bounded tuple search, or a product
of known witnesses).  A failed bounded search never produces a lower bound.

Wicks forms are generated as the maximal (trivalent) one-face patterns: cyclic
words on ``6g - 3`` pieces, each piece once with each sign, whose corner
cycles all have size three.  Every genus-``g`` form is a degeneration of one of
these, so matching allows empty pieces.  The number of such patterns rooted
at a fixed position must equal ``2 (6g-3)! / (12^g g! (3g-2)!)``, which the
test-suite uses as an independent check of the generator.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product as cartesian
from pathlib import Path
from typing import Iterator, Sequence

from .quadratic import QuadraticWord, canonicalize, evaluate
from .words import (
    IDENTITY,
    CyclicWord,
    Word,
    _cyclic_core,
    _min_rotation,
    commutator,
    commutator_product,
    conjugate,
    cyclic_reduce,
    enumerate_words,
    exponent_sums,
    format_word,
    inverse,
    mul,
    parse_word,
    power,
    primitive_root,
)

WICKS_VERSION = 1
DEFAULT_MAX_GENUS = 2


class GenusError(ValueError):
    """genus is only defined on the commutator subgroup."""


class CapabilityError(ValueError):
    """Requested work outside the supported range."""


# --- Wicks forms ---------------------------------------------------------------------

@dataclass(frozen=True)
class WicksForm:
    """A maximal genus-g pattern; pieces are variables 1..6g-3."""

    pattern: Word
    genus: int

    @property
    def n_pieces(self) -> int:
        return 6 * self.genus - 3

    def __str__(self):
        return format_word(self.pattern)


def rooted_form_count(g: int) -> int:
    """Number of trivalent one-face genus-g patterns with a fixed starting corner."""
    return 2 * math.factorial(6 * g - 3) // (
        12**g * math.factorial(g) * math.factorial(3 * g - 2)
    )


def trivalent_matchings(g: int) -> Iterator[tuple[int, ...]]:
    """All pairings of 12g-6 polygon sides whose corner permutation is all 3-cycles.

    Returns ``partner`` arrays.  Corner ``x`` is followed by corner
    ``partner[x] + 1``; the constraint is that this permutation has only
    cycles of length three.
    """
    n = 2 * (6 * g - 3)
    partner = [-1] * n

    def succ(x: int) -> int:
        p = partner[x]
        return -1 if p < 0 else (p + 1) % n

    def pred(y: int) -> int:
        p = partner[(y - 1) % n]
        return -1 if p < 0 else p

    def ok(x: int) -> bool:
        # walk the chain through x; closed cycles must have length 3,
        # open chains must have fewer than 3 arrows
        steps = 0
        y = x
        while True:
            z = succ(y)
            if z < 0:
                break
            steps += 1
            if z == x:
                return steps == 3
            if steps >= 3:
                return False
            y = z
        y = x
        while True:
            z = pred(y)
            if z < 0:
                break
            steps += 1
            if steps >= 3:
                return False
            y = z
        return True

    def rec() -> Iterator[tuple[int, ...]]:
        try:
            i = partner.index(-1)
        except ValueError:
            yield tuple(partner)
            return
        for j in range(i + 1, n):
            if partner[j] >= 0:
                continue
            partner[i], partner[j] = j, i
            if ok(i) and ok(j) and ok((i + 1) % n) and ok((j + 1) % n):
                yield from rec()
            partner[i] = partner[j] = -1

    yield from rec()


def _pattern_of(partner: Sequence[int], start: int, reflect: bool) -> tuple[int, ...]:
    n = len(partner)
    label: dict[int, int] = {}
    out = []
    for k in range(n):
        x = (start - k) % n if reflect else (start + k) % n
        p = partner[x]
        if p in label:
            out.append(-label[p])
        else:
            label[x] = len(label) + 1
            out.append(label[x])
    return tuple(out)


def _form_key(partner: Sequence[int]) -> tuple[int, ...]:
    n = len(partner)
    return min(
        (_pattern_of(partner, s, r) for s in range(n) for r in (False, True)),
        key=lambda t: [2 * abs(x) - (x > 0) for x in t],
    )


def generate_wicks_forms(g: int) -> tuple[list[WicksForm], int]:
    """Generate the forms directly; returns (forms, rooted count)."""
    keys = set()
    rooted = 0
    for partner in trivalent_matchings(g):
        rooted += 1
        keys.add(_form_key(partner))
    forms = [
        WicksForm(Word.from_reduced(k), g)
        for k in sorted(keys, key=lambda t: [2 * abs(x) - (x > 0) for x in t])
    ]
    return forms, rooted


def cache_dir() -> Path:
    return Path(os.environ.get("QUADGROUP_CACHE", ".cache"))


def _cache_file(g: int) -> Path:
    return cache_dir() / f"wicks-g{g}.txt"


def _read_cache(g: int) -> list[WicksForm] | None:
    path = _cache_file(g)
    try:
        lines = path.read_text().splitlines()
    except OSError:
        return None
    if not lines:
        return None
    head = dict(part.split("=", 1) for part in lines[0].split()[1:] if "=" in part)
    if not lines[0].startswith("wicks ") or head.get("version") != str(WICKS_VERSION):
        return None
    if head.get("g") != str(g) or head.get("count") != str(len(lines) - 1):
        return None
    return [WicksForm(parse_word(s), g) for s in lines[1:]]


def _write_cache(g: int, forms: list[WicksForm]) -> None:
    path = _cache_file(g)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        body = [f"wicks g={g} count={len(forms)} version={WICKS_VERSION}"]
        body += [format_word(f.pattern) for f in forms]
        path.write_text("\n".join(body) + "\n")
    except OSError:
        pass


@lru_cache(maxsize=None)
def _forms(g: int, use_cache: bool) -> tuple[WicksForm, ...]:
    if use_cache:
        cached = _read_cache(g)
        if cached is not None:
            return tuple(cached)
    forms, _ = generate_wicks_forms(g)
    if use_cache:
        _write_cache(g, forms)
    return tuple(forms)


def enumerate_wicks_forms(g: int, expensive: bool = False, use_cache: bool = True) -> tuple[WicksForm, ...]:
    """Maximal genus-g forms up to relabelling, rotation and inversion.

    Genus 3 takes minutes and must be requested with ``expensive=True``.
    """
    if g <= 0:
        return ()
    if g >= 4 or (g == 3 and not expensive):
        raise CapabilityError(
            f"Wicks forms of genus {g} need the expensive flag (supported: g <= 2, g = 3 with expensive=True)"
        )
    return _forms(g, use_cache)


# --- matching ------------------------------------------------------------------------

@dataclass(frozen=True)
class CommutatorWitness:
    """(x1, y1, ..., xg, yg) with [x1,y1]...[xg,yg] equal to ``target``."""

    tuple: tuple[Word, ...]
    target: Word

    def __post_init__(self):
        if commutator_product(self.tuple) != self.target:
            raise AssertionError(
                f"witness does not reduce to {format_word(self.target)}: "
                f"{format_word(commutator_product(self.tuple))}"
            )

    @property
    def genus(self) -> int:
        return len(self.tuple) // 2

    def to_json(self) -> list[str]:
        return [format_word(x) for x in self.tuple]

    def __add__(self, other: "CommutatorWitness") -> "CommutatorWitness":
        return CommutatorWitness(self.tuple + other.tuple, mul(self.target, other.target))


def _pair_moves(x: Word, y: Word) -> Iterator[tuple[Word, Word]]:
    # each of these keeps [x, y] unchanged as a word
    yi, xi = inverse(y), inverse(x)
    yield mul(x, y), y
    yield mul(x, yi), y
    yield x, mul(y, x)
    yield x, mul(y, xi)
    yield yi, mul(y, x, yi)
    yield mul(x, y, xi), xi


def shorten_witness(witness: CommutatorWitness) -> CommutatorWitness:
    """Greedy descent on total length using moves that fix each commutator."""
    tup = list(witness.tuple)
    improved = True
    while improved:
        improved = False
        for i in range(0, len(tup), 2):
            for x, y in _pair_moves(tup[i], tup[i + 1]):
                if len(x) + len(y) < len(tup[i]) + len(tup[i + 1]):
                    tup[i], tup[i + 1] = x, y
                    improved = True
                    break
    return CommutatorWitness(tuple(tup), witness.target)


@dataclass(frozen=True)
class WicksMatch:
    form: WicksForm
    rotation: int
    inverted: bool
    pieces: tuple[Word, ...]
    witness: CommutatorWitness


@lru_cache(maxsize=None)
def _form_inverse_images(form: WicksForm) -> tuple[Word, ...]:
    q = QuadraticWord(form.pattern, form.n_pieces)
    _, sub = canonicalize(q)
    return sub.inverse_images


def _split(s: tuple[int, ...], pattern: Word, n_pieces: int) -> Iterator[tuple[Word, ...]]:
    """Yield piece assignments with pattern(pieces) == s letter for letter."""
    n = len(s)
    half = n // 2
    pieces: list[tuple[int, ...] | None] = [None] * (n_pieces + 1)
    m = len(pattern)

    def rec(k: int, pos: int, used: int) -> Iterator[tuple[Word, ...]]:
        if k == m:
            if pos == n:
                yield tuple(Word.from_reduced(p) for p in pieces[1:])  # type: ignore[arg-type]
            return
        x = pattern[k]
        v = abs(x)
        known = pieces[v]
        if known is not None:
            ln = len(known)
            seg = s[pos : pos + ln]
            want = known if x > 0 else tuple(-c for c in reversed(known))
            if seg == want:
                yield from rec(k + 1, pos + ln, used)
            return
        for ln in range(0, half - used + 1):
            seg = s[pos : pos + ln]
            if len(seg) < ln:
                break
            pieces[v] = seg if x > 0 else tuple(-c for c in reversed(seg))
            yield from rec(k + 1, pos + ln, used + ln)
        pieces[v] = None

    yield from rec(0, 0, 0)


def _witness_from_pieces(form: WicksForm, pieces: Sequence[Word]) -> tuple[Word, ...]:
    psi = _form_inverse_images(form)
    return tuple(evaluate(p, pieces) for p in psi[: 2 * form.genus])


def match_wicks(w: Sequence[int] | CyclicWord, form: WicksForm) -> WicksMatch | None:
    """First match of w (or of w^-1) against the form, in the fixed search order.

    Search order: w before w^-1, rotation index ascending, then piece lengths
    lexicographic.  The witness is for w itself, including the conjugator
    undoing any cyclic reduction and rotation.
    """
    if isinstance(w, CyclicWord):
        word, outer = w.letters, IDENTITY
    else:
        word, outer = _cyclic_core(w)
    if not word:
        return None
    n = len(word)
    if n % 2:
        return None
    for inverted in (False, True):
        base = inverse(word) if inverted else word
        for r in range(n):
            s = tuple(base[r:]) + tuple(base[:r])
            for pieces in _split(s, form.pattern, form.n_pieces):
                tup = _witness_from_pieces(form, pieces)
                # base = c0 s c0^-1 with c0 = base[:r]
                c = mul(outer, base[:r])
                if inverted:
                    # word = c0 s^-1 c0^-1 and s^-1 is the reversed product of [y_i, x_i]
                    swapped: list[Word] = []
                    for i in range(len(tup) // 2 - 1, -1, -1):
                        swapped += [tup[2 * i + 1], tup[2 * i]]
                    tup = tuple(swapped)
                target = w.letters if isinstance(w, CyclicWord) else Word.from_reduced(w)
                witness = shorten_witness(
                    CommutatorWitness(tuple(conjugate(x, c) for x in tup), target)
                )
                return WicksMatch(form, r, inverted, pieces, witness)
    return None


def match_genus(w: Sequence[int], g: int, expensive: bool = False) -> WicksMatch | None:
    """Try every genus-g form; None certifies genus(w) != g... only together with lower genera."""
    for form in enumerate_wicks_forms(g, expensive=expensive):
        m = match_wicks(w, form)
        if m is not None:
            return m
    return None


# --- upper bounds by search ------------------------------------------------------------

def _solve_conjugator(a: Word, b: Word) -> Word | None:
    """Some y with y a y^-1 = b, or None."""
    ca, pa = _cyclic_core(a)
    cb, pb = _cyclic_core(b)
    if len(ca) != len(cb):
        return None
    n = len(ca)
    if n == 0:
        return IDENTITY
    doubled = tuple(ca) + tuple(ca)
    target = tuple(cb)
    for k in range(n):
        if doubled[k : k + n] == target:
            # cb = s^-1 ca s with s = ca[:k]
            s = Word.from_reduced(ca[:k])
            return mul(pb, inverse(s), inverse(pa))
    return None


def _shortest_in_coset(y0: Word, root: Word, limit: int) -> Word:
    best = y0
    j_max = (len(y0) + limit) // max(len(root), 1) + 2
    for sign in (1, -1):
        cur = y0
        step = root if sign > 0 else inverse(root)
        for _ in range(j_max):
            cur = mul(cur, step)
            if len(cur) < len(best):
                best = cur
    return best


def _genus_one_search(w: Word, len_budget: int, rank: int) -> CommutatorWitness | None:
    if not w:
        return CommutatorWitness((IDENTITY, IDENTITY), IDENTITY)
    for x in enumerate_words(rank, len_budget, min_length=1):
        xi = inverse(x)
        # [x,y] = w  <=>  y x^-1 y^-1 = x^-1 w
        y0 = _solve_conjugator(xi, mul(xi, w))
        if y0 is None:
            continue
        root, _ = primitive_root(x)
        y = _shortest_in_coset(y0, root, len_budget)
        if len(y) <= len_budget:
            return CommutatorWitness((x, y), w)
    return None


def genus_upper_search(
    w: Sequence[int], g: int, len_budget: int, rank: int | None = None
) -> CommutatorWitness | None:
    """Look for a genus-g witness with bounded components.

    For g = 1 the search is exhaustive over x with |x| <= len_budget, solving
    for the shortest matching y exactly, so it answers "is there a witness
    with both components of length <= len_budget".  For g >= 2 the leading
    pair runs over |x| + |y| <= len_budget by increasing total length and the
    rest is found recursively, the last pair by the exact genus-1 solver or
    a Wicks match; the pairs found that way may be longer than the budget.
    ``None`` never bounds the genus from below.
    """
    w = Word.from_reduced(w)
    if rank is None:
        rank = max((abs(x) for x in w), default=1)
    if any(exponent_sums(w, rank)):
        raise GenusError(f"{format_word(w)} is not in the commutator subgroup")
    if g < 1:
        return None
    if g == 1:
        return _genus_one_search(w, len_budget, rank)
    words = list(enumerate_words(rank, len_budget))
    by_total = sorted(
        (p for p in cartesian(words, words) if len(p[0]) + len(p[1]) <= len_budget),
        key=lambda p: len(p[0]) + len(p[1]),
    )
    for x, y in by_total:
        rest = mul(commutator(y, x), w)
        if g == 2:
            tail = _genus_one_search(rest, len_budget, rank)
            if tail is None:
                m = match_genus(rest, 1) if rest else None
                tail = m.witness if m else None
        else:
            tail = genus_upper_search(rest, g - 1, len_budget, rank)
        if tail is not None:
            return CommutatorWitness((x, y) + tail.tuple, w)
    return None


# --- exact genus ------------------------------------------------------------------------

@dataclass(frozen=True)
class GenusResult:
    lower: int
    upper: int | None
    witness: CommutatorWitness | None
    certificates: tuple[str, ...] = ()
    conjugator: Word = IDENTITY

    @property
    def exact(self) -> bool:
        return self.upper is not None and self.lower == self.upper

    @property
    def value(self) -> int | None:
        return self.lower if self.exact else None

    @property
    def status(self) -> str:
        if self.exact:
            return f"Exact({self.lower})"
        up = "unknown" if self.upper is None else str(self.upper)
        return f"Bounds({self.lower}, {up})"

    def to_json(self) -> dict:
        return {
            "status": "exact" if self.exact else "bounds",
            "lower": self.lower,
            "upper": self.upper,
            "witness": self.witness.to_json() if self.witness else None,
            "certificates": list(self.certificates),
            "conjugator": format_word(self.conjugator),
        }


def _check_commutator(w: Word, rank: int | None) -> None:
    if rank is None:
        rank = max((abs(x) for x in w), default=1)
    if any(exponent_sums(w, rank)):
        raise GenusError(f"genus undefined: {format_word(w)} has nonzero exponent sums")


def genus_exact(
    w: Sequence[int],
    g_max: int = DEFAULT_MAX_GENUS,
    rank: int | None = None,
    expensive: bool = False,
    len_budget: int = 0,
) -> GenusResult:
    """Scan genus 1..g_max by Wicks matching; the first match is exact.

    If nothing matches, the lower bound is ``g_max + 1`` and the upper bound
    comes from :func:`genus_upper_search` at genus ``g_max + 1`` when
    ``len_budget`` is positive and ``g_max + 1 <= 2`` (deeper searches are
    too slow to run implicitly).
    """
    w = Word.from_reduced(w)
    _check_commutator(w, rank)
    if g_max >= 4 or (g_max == 3 and not expensive):
        raise CapabilityError(
            f"max genus {g_max} is outside the Wicks range (g <= 2, or g = 3 with the expensive flag)"
        )
    _, c = cyclic_reduce(w)
    if not w:
        return GenusResult(0, 0, CommutatorWitness((), IDENTITY), ("identity",), c)
    certs = []
    for g in range(1, g_max + 1):
        m = match_genus(w, g, expensive=expensive)
        if m is not None:
            certs.append(f"genus {g}: matched form {m.form} at rotation {m.rotation}")
            return GenusResult(g, g, m.witness, tuple(certs), c)
        certs.append(f"genus {g}: all {len(enumerate_wicks_forms(g, expensive))} forms exhausted")
    upper = None
    wit = None
    if len_budget > 0 and g_max + 1 <= 2:
        wit = genus_upper_search(w, g_max + 1, len_budget, rank)
        if wit is not None:
            upper = g_max + 1
            certs.append(f"genus {upper}: witness by bounded search (budget {len_budget})")
    return GenusResult(g_max + 1, upper, wit, tuple(certs), c)


# --- growth -------------------------------------------------------------------------------

@dataclass
class GrowthTable:
    word: Word
    rows: list[GenusResult] = field(default_factory=list)
    subadditivity: list[tuple[int, int, bool]] = field(default_factory=list)

    def values(self) -> list[int | None]:
        return [r.value for r in self.rows]

    @property
    def subadditive(self) -> bool:
        return all(ok for _, _, ok in self.subadditivity)

    def to_json(self) -> dict:
        return {
            "word": format_word(self.word),
            "rows": [dict(p=i + 1, **r.to_json()) for i, r in enumerate(self.rows)],
            "subadditivity": [{"p": p, "q": q, "holds": ok} for p, q, ok in self.subadditivity],
        }


def genus_growth(
    w: Sequence[int], p_max: int, g_max: int = DEFAULT_MAX_GENUS, rank: int | None = None
) -> GrowthTable:
    """genus(w^p) for p = 1..p_max with dual certificates.

    Where Wicks matching is exhausted the upper bound is the sum of the
    witness for w^(p-1) and the witness for w, which is a verified witness
    for w^p.
    """
    w = Word.from_reduced(w)
    _check_commutator(w, rank)
    if not w:
        raise GenusError("growth is only meaningful for w != 1")
    table = GrowthTable(w)
    for p in range(1, p_max + 1):
        wp = power(w, p)
        res = genus_exact(wp, g_max, rank)
        if not res.exact and p > 1:
            prev, first = table.rows[-1], table.rows[0]
            if prev.witness is not None and first.witness is not None and prev.upper is not None:
                wit = prev.witness + first.witness
                up = wit.genus
                if res.upper is None or up < res.upper:
                    res = GenusResult(
                        res.lower,
                        up,
                        wit,
                        res.certificates + (f"genus {up}: composed witnesses for p={p - 1} and p=1",),
                        res.conjugator,
                    )
        table.rows.append(res)
    exact = {i + 1: r.value for i, r in enumerate(table.rows) if r.exact}
    for p in exact:
        for q in exact:
            if p <= q and p + q in exact:
                table.subadditivity.append((p, q, exact[p + q] <= exact[p] + exact[q]))
    return table
