"""Homomorphisms from closed surface groups, move orbits and pinch decompositions.

Orientable genus g: generators u1, v1, ..., ug, vg and relator
[u1,v1]...[ug,vg].  Non-orientable genus g: generators V1..Vg and relator
V1^2...Vg^2.  A homomorphism is its tuple of generator images in a target
group (any object with ``identity``, ``mul``, ``inv``, ``is_identity`` and
``length``, such as :class:`quadgroup.words.FreeGroup` or a free product).

Every move below is an automorphism of the free group on the generators that
fixes the relator word exactly, so it sends solutions to solutions and its
inverse is again a listed move.  Global conjugation by a target element is
available as a move but the searches here never use it, which keeps every
certificate a pure change of generators.

"Essentially injective" is only semi-decidable.  Here it means: a best-first
search of at most B nodes over the move orbit found no standard curve class
in the kernel, and every such certificate carries B.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable, Sequence

from .quadratic import evaluate, substitute
from .words import IDENTITY, Word, format_word, inverse, mul, parse_word

DEFAULT_BUDGET = 100_000


class SolutionError(ValueError):
    """The images do not satisfy the surface relator."""

    def __init__(self, message: str, relator_value=None):
        super().__init__(message)
        self.relator_value = relator_value


class CapabilityError(ValueError):
    pass


@dataclass(frozen=True)
class SurfaceGroupSpec:
    genus: int
    orientable: bool = True

    def __post_init__(self):
        if self.genus < 1:
            raise ValueError("surface genus must be positive")

    @property
    def n_generators(self) -> int:
        return 2 * self.genus if self.orientable else self.genus

    def relator(self) -> Word:
        if self.orientable:
            out: list[int] = []
            for i in range(self.genus):
                a, b = 2 * i + 1, 2 * i + 2
                out += [a, b, -a, -b]
            return Word.from_reduced(out)
        return Word.from_reduced(v for i in range(1, self.genus + 1) for v in (i, i))

    def generator_names(self) -> list[str]:
        if self.orientable:
            return [f"{c}{i}" for i in range(1, self.genus + 1) for c in "uv"]
        return [f"V{i}" for i in range(1, self.genus + 1)]

    def euler_characteristic(self) -> int:
        return 2 - 2 * self.genus if self.orientable else 2 - self.genus


def euler(genus: int, orientable: bool) -> int:
    return 2 - 2 * genus if orientable else 2 - genus


@dataclass(frozen=True)
class SurfaceHom:
    spec: SurfaceGroupSpec
    images: tuple
    target: Any

    def relator_value(self):
        return evaluate(self.spec.relator(), self.images, self.target)

    def to_json(self) -> dict:
        return {
            "genus": self.spec.genus,
            "orientable": self.spec.orientable,
            "target": self.target.spec_json(),
            "images": [self.target.to_json(x) for x in self.images],
        }

    def __str__(self):
        vals = ", ".join(self.target.format(x) for x in self.images)
        return f"({vals})"


def make_hom(spec: SurfaceGroupSpec, images: Sequence, target) -> SurfaceHom:
    """Build a homomorphism, rejecting images that violate the relator."""
    images = tuple(images)
    if len(images) != spec.n_generators:
        raise ValueError(f"expected {spec.n_generators} images, got {len(images)}")
    value = evaluate(spec.relator(), images, target)
    if not target.is_identity(value):
        raise SolutionError(
            f"relator evaluates to {target.format(value)}, not the identity", value
        )
    return SurfaceHom(spec, images, target)


# --- moves ------------------------------------------------------------------------------

# Templates on letters a, b (one handle) or a, b, c, d (two adjacent handles);
# the mixing move and its inverse were found by search and are checked below.
_TEMPLATES: dict[tuple[str, int], tuple[str, ...]] = {
    ("ut", 1): ("ab", "b"),
    ("ut", -1): ("aB", "b"),
    ("vt", 1): ("a", "ba"),
    ("vt", -1): ("a", "bA"),
    ("rot", 1): ("B", "baB"),
    ("rot", -1): ("abA", "A"),
    ("swap", 1): ("c", "d", "dcDCacdCD", "dcDCbcdCD"),
    ("swap", -1): ("abABcbaBA", "abABdbaBA", "a", "b"),
    ("mix", 1): ("abCA", "acACA", "acA", "dCA"),
    ("mix", -1): ("CBc", "CbcaBc", "CbcBc", "dBc"),
    ("slide", 1): ("aabAA", "a"),
    ("slide", -1): ("b", "BBabb"),
}
_SLOT_WIDTH = {"ut": 1, "vt": 1, "rot": 1, "swap": 2, "mix": 2, "slide": 2}
ORIENTABLE_KINDS = ("ut", "vt", "rot", "swap", "mix")
NON_ORIENTABLE_KINDS = ("slide",)


@dataclass(frozen=True)
class SurfaceMove:
    """A named move.  ``index`` is the (first) handle, or the first V slot, 1-based."""

    kind: str
    index: int = 1
    exponent: int = 1
    by: Any = None

    def slots(self, spec: SurfaceGroupSpec) -> tuple[int, ...]:
        """0-based generator slots rewritten by this move."""
        if self.kind == "conj":
            return tuple(range(spec.n_generators))
        if spec.orientable:
            first = 2 * (self.index - 1)
            return tuple(range(first, first + 2 * _SLOT_WIDTH[self.kind]))
        return (self.index - 1, self.index)

    def images(self, spec: SurfaceGroupSpec) -> dict[int, Word]:
        """Symbolic images (1-based generator -> word) of the rewritten generators."""
        if self.kind == "conj":
            raise ValueError("conjugation has no symbolic images")
        return dict(_symbolic(self.kind, self.exponent, self.slots(spec)))

    def inverse(self) -> "SurfaceMove":
        if self.kind == "conj":
            return SurfaceMove("conj", by=("inverse", self.by))
        return SurfaceMove(self.kind, self.index, -self.exponent)

    def apply(self, images: tuple, group, spec: SurfaceGroupSpec) -> tuple:
        if self.kind == "conj":
            t = _resolve(self.by, group)
            ti = group.inv(t)
            return tuple(group.mul(t, x, ti) for x in images)
        out = list(images)
        for gen, word in _symbolic(self.kind, self.exponent, self.slots(spec)):
            out[gen - 1] = evaluate(word, images, group)
        return tuple(out)

    def preserves_relator(self, spec: SurfaceGroupSpec) -> bool:
        if self.kind == "conj":
            return True
        r = spec.relator()
        return substitute(r, self.images(spec)) == r

    def to_json(self, group=None) -> dict:
        d: dict[str, Any] = {"move": self.kind}
        if self.kind == "conj":
            t = _resolve(self.by, group) if group is not None else self.by
            d["by"] = group.to_json(t) if group is not None else self.by
        else:
            d["index"] = self.index
            d["exponent"] = self.exponent
        return d

    @classmethod
    def from_json(cls, d: dict, group=None) -> "SurfaceMove":
        kind = d["move"]
        if kind == "conj":
            by = d["by"]
            return cls("conj", by=group.parse(by) if group is not None else by)
        if kind not in _SLOT_WIDTH:
            raise ValueError(f"unknown move {kind!r}")
        e = int(d.get("exponent", 1))
        if e not in (1, -1):
            raise ValueError("move exponent must be +1 or -1")
        return cls(kind, int(d.get("index", 1)), e)

    def __str__(self):
        if self.kind == "conj":
            return f"conj({self.by})"
        return f"{self.kind}{'' if self.exponent > 0 else '^-1'}[{self.index}]"


def _resolve(by, group):
    if isinstance(by, tuple) and len(by) == 2 and by[0] == "inverse":
        return group.inv(_resolve(by[1], group))
    return by


@lru_cache(maxsize=None)
def _symbolic(kind: str, exponent: int, slots: tuple[int, ...]) -> tuple[tuple[int, Word], ...]:
    template = _TEMPLATES[(kind, exponent)]
    out = []
    for pos, text in enumerate(template):
        w = parse_word(text)
        mapped = Word.from_reduced(
            (slots[abs(x) - 1] + 1) * (1 if x > 0 else -1) for x in w
        )
        out.append((slots[pos] + 1, mapped))
    return tuple(out)


def generating_moves(spec: SurfaceGroupSpec, conjugators: Sequence = ()) -> list[SurfaceMove]:
    """The move list in its fixed priority order, then conjugations."""
    moves: list[SurfaceMove] = []
    g = spec.genus
    if spec.orientable:
        for i in range(1, g + 1):
            for kind in ("ut", "vt", "rot"):
                moves += [SurfaceMove(kind, i, 1), SurfaceMove(kind, i, -1)]
        for i in range(1, g):
            for kind in ("swap", "mix"):
                moves += [SurfaceMove(kind, i, 1), SurfaceMove(kind, i, -1)]
    else:
        for i in range(1, g):
            moves += [SurfaceMove("slide", i, 1), SurfaceMove("slide", i, -1)]
    moves += [SurfaceMove("conj", by=t) for t in conjugators]
    return moves


def shifted(move: SurfaceMove, offset: int) -> SurfaceMove:
    if move.kind == "conj" or offset == 0:
        return move
    return SurfaceMove(move.kind, move.index + offset, move.exponent, move.by)


@dataclass
class MoveSequence:
    moves: list[SurfaceMove] = field(default_factory=list)

    def __len__(self):
        return len(self.moves)

    def __iter__(self):
        return iter(self.moves)

    def replay(self, images: tuple, group, spec: SurfaceGroupSpec) -> tuple:
        cur = tuple(images)
        for m in self.moves:
            cur = m.apply(cur, group, spec)
        return cur

    def inverse(self) -> "MoveSequence":
        return MoveSequence([m.inverse() for m in reversed(self.moves)])

    def symbolic(self, spec: SurfaceGroupSpec) -> tuple[Word, ...]:
        """Images of the final generators as words in the original ones."""
        cur = tuple(Word.from_reduced((i,)) for i in range(1, spec.n_generators + 1))
        for m in self.moves:
            cur = m.apply(cur, _FREE, spec)
        return cur

    def to_json(self, group=None) -> list[dict]:
        return [m.to_json(group) for m in self.moves]

    @classmethod
    def from_json(cls, data: list, group=None) -> "MoveSequence":
        return cls([SurfaceMove.from_json(d, group) for d in data])

    def __str__(self):
        return " ".join(str(m) for m in self.moves) or "(empty)"


class _FreeArith:
    identity = IDENTITY

    @staticmethod
    def mul(*xs):
        return mul(*xs)

    @staticmethod
    def inv(x):
        return inverse(x)


_FREE = _FreeArith()


# --- best-first orbit search ------------------------------------------------------------------

@dataclass
class SearchResult:
    found: bool
    moves: MoveSequence
    images: tuple
    expanded: int


def _total_length(images: tuple, group) -> int:
    return sum(group.length(x) for x in images)


def conjugation_key(images: tuple, group) -> tuple:
    """Greedy single-syllable conjugation of the whole tuple to shorten it.

    Only conjugate tuples are merged, and every goal used in this module is
    invariant under global conjugation, so deduplicating on this key is sound.
    """
    first = getattr(group, "first", None)
    if first is None:
        return images
    cur = images
    best = _total_length(cur, group)
    while True:
        improved = False
        seen = set()
        for x in cur:
            if group.is_identity(x):
                continue
            c = first(x)
            if c in seen:
                continue
            seen.add(c)
            ci = group.inv(c)
            cand = tuple(group.mul(ci, y, c) for y in cur)
            n = _total_length(cand, group)
            if n < best:
                cur, best, improved = cand, n, True
                break
        if not improved:
            return cur


def orbit_search(
    spec: SurfaceGroupSpec,
    start: tuple,
    group,
    goal: Callable[[tuple], bool],
    budget: int,
    moves: Sequence[SurfaceMove] | None = None,
) -> SearchResult:
    """Best-first search on total image length; ties broken by discovery order.

    ``budget`` caps the number of expanded nodes.  The returned path is the
    one recorded when the goal node was first generated.
    """
    if moves is None:
        moves = generating_moves(spec)
    start = tuple(start)
    if goal(start):
        return SearchResult(True, MoveSequence(), start, 0)
    counter = itertools.count()
    parent: dict[tuple, tuple[tuple | None, SurfaceMove | None]] = {}
    key0 = conjugation_key(start, group)
    parent[key0] = (None, None)
    heap = [(_total_length(start, group), next(counter), start, key0)]
    expanded = 0

    def path(key) -> MoveSequence:
        out = []
        while True:
            prev, mv = parent[key]
            if prev is None:
                break
            out.append(mv)
            key = prev
        return MoveSequence(list(reversed(out)))

    while heap and expanded < budget:
        _, _, node, key = heapq.heappop(heap)
        expanded += 1
        for m in moves:
            child = m.apply(node, group, spec)
            ck = conjugation_key(child, group)
            if ck in parent:
                continue
            parent[ck] = (key, m)
            if goal(child):
                return SearchResult(True, path(ck), child, expanded)
            heapq.heappush(heap, (_total_length(child, group), next(counter), child, ck))
    return SearchResult(False, MoveSequence(), start, expanded)


# --- certificates ----------------------------------------------------------------------------

@dataclass
class Certificate:
    hom: SurfaceHom
    moves: MoveSequence
    terminal: tuple
    budget: int
    expanded: int

    def replays(self) -> bool:
        return self.moves.replay(self.hom.images, self.hom.target, self.hom.spec) == self.terminal

    def free_factorization(self) -> tuple:
        """The v-slot images: the hom factors through the free group on them."""
        return self.terminal[1::2]

    def to_json(self) -> dict:
        t = self.hom.target
        return {
            "result": "certificate",
            "hom": self.hom.to_json(),
            "moves": self.moves.to_json(t),
            "terminal": [t.to_json(x) for x in self.terminal],
            "budget": self.budget,
            "expanded": self.expanded,
        }


@dataclass
class Exhausted:
    hom: SurfaceHom
    budget: int
    expanded: int

    def to_json(self) -> dict:
        return {"result": "exhausted", "budget": self.budget, "expanded": self.expanded}


# --- pinch decompositions ------------------------------------------------------------------

@dataclass
class SurfacePiece:
    genus: int
    orientable: bool
    slots: tuple[int, ...]
    images: tuple
    conjugator: Any
    certification: str

    def to_json(self, group) -> dict:
        return {
            "piece": "surface",
            "genus": self.genus,
            "orientable": self.orientable,
            "slots": list(self.slots),
            "images": [group.to_json(x) for x in self.images],
            "conjugator": group.to_json(self.conjugator),
            "certification": self.certification,
        }


@dataclass
class CirclePiece:
    """A handle (u -> 1, v -> c) or a Klein bottle (V1 -> c, V2 -> c^-1) mapped through S^1."""

    image: Any
    slots: tuple[int, int]
    conjugator: Any
    layout: str = "handle"

    def to_json(self, group) -> dict:
        return {
            "piece": "circle",
            "image": group.to_json(self.image),
            "slots": list(self.slots),
            "conjugator": group.to_json(self.conjugator),
            "layout": self.layout,
        }


@dataclass
class ProjectivePiece:
    image: Any
    slot: int
    conjugator: Any

    def to_json(self, group) -> dict:
        return {
            "piece": "projective",
            "image": group.to_json(self.image),
            "slot": self.slot,
            "conjugator": group.to_json(self.conjugator),
        }


@dataclass(frozen=True)
class Split:
    """One pinch: a surface of the parent type splits into the children."""

    parent: tuple[int, bool]
    children: tuple[tuple[int, bool], ...]

    def holds(self) -> bool:
        chi = sum(euler(g, o) for g, o in self.children) - 2 * (len(self.children) - 1)
        return euler(*self.parent) == chi


@dataclass
class PinchDecomposition:
    hom: SurfaceHom
    moves: MoveSequence
    terminal: tuple
    pieces: list = field(default_factory=list)
    splits: list[Split] = field(default_factory=list)
    budget: int = 0

    @property
    def defect(self) -> int:
        return sum(isinstance(p, CirclePiece) for p in self.pieces)

    def assemble(self) -> tuple:
        """Generator images after the moves, rebuilt from the pieces alone."""
        g = self.hom.target
        out: list = [None] * self.hom.spec.n_generators

        def conj(z, x):
            return g.mul(z, x, g.inv(z))

        for p in self.pieces:
            if isinstance(p, SurfacePiece):
                for s, x in zip(p.slots, p.images):
                    out[s] = conj(p.conjugator, x)
            elif isinstance(p, CirclePiece):
                c = conj(p.conjugator, p.image)
                if p.layout == "handle":
                    out[p.slots[0]], out[p.slots[1]] = g.identity, c
                else:
                    out[p.slots[0]], out[p.slots[1]] = c, g.inv(c)
            else:
                out[p.slot] = conj(p.conjugator, p.image)
        if any(x is None for x in out):
            raise ValueError("decomposition does not cover every generator")
        return tuple(out)

    def recompose(self) -> tuple:
        return self.moves.inverse().replay(self.assemble(), self.hom.target, self.hom.spec)

    def recomposes(self) -> bool:
        try:
            return self.recompose() == tuple(self.hom.images)
        except ValueError:
            return False

    def euler_ok(self) -> bool:
        return all(s.holds() for s in self.splits)

    def to_json(self) -> dict:
        g = self.hom.target
        return {
            "hom": self.hom.to_json(),
            "moves": self.moves.to_json(g),
            "terminal": [g.to_json(x) for x in self.terminal],
            "pieces": [p.to_json(g) for p in self.pieces],
            "defect": self.defect,
            "splits": [
                {"parent": list(s.parent), "children": [list(c) for c in s.children]}
                for s in self.splits
            ],
            "budget": self.budget,
        }


# --- reduction engine -----------------------------------------------------------------------

class _Reducer:
    """Shared state for elementary_check and genus_reduce.

    Works on the whole tuple; every move is recorded globally, so blocks are
    contiguous runs of handles (or V slots) whose own relator is trivial.
    """

    def __init__(self, hom: SurfaceHom, budget: int, per_search: bool):
        self.hom = hom
        self.spec = hom.spec
        self.g = hom.target
        self.cur = tuple(hom.images)
        self.seq = MoveSequence()
        self.remaining = budget
        self.budget = budget
        self.per_search = per_search
        self.pieces: list = []
        self.splits: list[Split] = []
        self.expanded = 0

    def do(self, m: SurfaceMove) -> None:
        self.cur = m.apply(self.cur, self.g, self.spec)
        self.seq.moves.append(m)

    def search(self, lo: int, hi: int, goal) -> SearchResult | None:
        """Search moves inside handles/slots lo..hi-1 (0-based)."""
        limit = self.budget if self.per_search else self.remaining
        if limit <= 0:
            return None
        width = 2 if self.spec.orientable else 1
        sub_spec = SurfaceGroupSpec(hi - lo, self.spec.orientable)
        sub = self.cur[width * lo : width * hi]
        res = orbit_search(sub_spec, sub, self.g, goal, limit)
        self.expanded += res.expanded
        if not self.per_search:
            self.remaining -= res.expanded
        if res.found:
            for m in res.moves:
                self.do(shifted(m, lo))
        return res

    # orientable -------------------------------------------------------------------------
    def u(self, i):
        return self.cur[2 * i]

    def v(self, i):
        return self.cur[2 * i + 1]

    def _prefix_split(self, lo: int, hi: int) -> int | None:
        acc = self.g.identity
        for i in range(lo, hi - 1):
            u, v = self.u(i), self.v(i)
            acc = self.g.mul(acc, u, v, self.g.inv(u), self.g.inv(v))
            if self.g.is_identity(acc):
                return i + 1
        return None

    def _handle_goal(self, sub: tuple) -> bool:
        g = self.g
        k = len(sub) // 2
        acc = g.identity
        for i in range(k):
            u, v = sub[2 * i], sub[2 * i + 1]
            if g.is_identity(u) or g.is_identity(v):
                return True
            if i < k - 1:
                acc = g.mul(acc, u, v, g.inv(u), g.inv(v))
                if g.is_identity(acc):
                    return True
        return False

    def orientable_block(self, lo: int, hi: int) -> bool:
        """Reduce handles lo..hi-1; True when everything became circle pieces."""
        while hi > lo:
            # bring handles with a trivial image to the end of the block as circles
            moved = False
            for i in range(lo, hi):
                if self.g.is_identity(self.v(i)) and not self.g.is_identity(self.u(i)):
                    self.do(SurfaceMove("rot", i + 1, 1))
                if self.g.is_identity(self.u(i)):
                    for j in range(i, hi - 1):
                        self.do(SurfaceMove("swap", j + 1, 1))
                    self.splits.append(Split((hi - lo, True), ((hi - lo - 1, True), (1, True))))
                    self.pieces.append(
                        CirclePiece(self.v(hi - 1), (2 * (hi - 1), 2 * (hi - 1) + 1), self.g.identity)
                    )
                    hi -= 1
                    moved = True
                    break
            if moved:
                continue
            cut = self._prefix_split(lo, hi)
            if cut is not None:
                self.splits.append(Split((hi - lo, True), ((cut - lo, True), (hi - cut, True))))
                a = self.orientable_block(lo, cut)
                b = self.orientable_block(cut, hi)
                return a and b
            res = self.search(lo, hi, self._handle_goal)
            if res is None or not res.found:
                self.surface_piece(lo, hi, True, res)
                return False
        return True

    def surface_piece(self, lo: int, hi: int, orientable: bool, res: SearchResult | None) -> None:
        width = 2 if orientable else 1
        slots = tuple(range(width * lo, width * hi))
        images = tuple(self.cur[s] for s in slots)
        z = self.g.identity
        finder = getattr(self.g, "common_conjugator", None)
        if finder is not None:
            found = finder(images)
            if found is not None:
                z, images = found
        if res is None:
            cert = "unknown"
        else:
            cert = f"essentially-injective-within-budget({res.expanded})"
        self.pieces.append(SurfacePiece(hi - lo, orientable, slots, images, z, cert))

    # non-orientable ---------------------------------------------------------------------
    def _square_prefix(self, lo: int, hi: int) -> int | None:
        acc = self.g.identity
        for i in range(lo, hi - 1):
            acc = self.g.mul(acc, self.cur[i], self.cur[i])
            if self.g.is_identity(acc):
                return i + 1
        return None

    def _cross_goal(self, sub: tuple) -> bool:
        g = self.g
        acc = g.identity
        for i, x in enumerate(sub):
            if g.is_identity(x):
                return True
            if i < len(sub) - 1:
                acc = g.mul(acc, x, x)
                if g.is_identity(acc):
                    return True
        return False

    def non_orientable_block(self, lo: int, hi: int, klein_budget: int) -> None:
        while hi > lo:
            moved = False
            for i in range(lo, hi):
                if self.g.is_identity(self.cur[i]) and hi - lo > 1:
                    for j in range(i, hi - 1):
                        self.do(SurfaceMove("slide", j + 1, 1))
                    self.splits.append(
                        Split((hi - lo, False), ((hi - lo - 1, False), (1, False)))
                    )
                    self.pieces.append(ProjectivePiece(self.g.identity, hi - 1, self.g.identity))
                    hi -= 1
                    moved = True
                    break
            if moved:
                continue
            if hi - lo == 1:
                self.pieces.append(ProjectivePiece(self.cur[lo], lo, self.g.identity))
                return
            cut = self._square_prefix(lo, hi)
            if cut is not None:
                self.splits.append(Split((hi - lo, False), ((cut - lo, False), (hi - cut, False))))
                self.non_orientable_block(lo, cut, klein_budget)
                self.non_orientable_block(cut, hi, klein_budget)
                return
            if hi - lo == 2:
                sub = make_hom(SurfaceGroupSpec(2, False), self.cur[lo:hi], self.g)
                kr = klein_classify(sub, klein_budget)
                self.expanded += kr.expanded
                if kr.case is None:
                    self.surface_piece(lo, hi, False, SearchResult(False, MoveSequence(), (), kr.expanded))
                    return
                for m in kr.moves:
                    self.do(shifted(m, lo))
                for p in kr.pieces:
                    self.pieces.append(_offset_piece(p, lo))
                self.splits.extend(kr.splits)
                return
            res = self.search(lo, hi, self._cross_goal)
            if res is None or not res.found:
                self.surface_piece(lo, hi, False, res)
                return


def _offset_piece(p, offset: int):
    if isinstance(p, ProjectivePiece):
        return ProjectivePiece(p.image, p.slot + offset, p.conjugator)
    if isinstance(p, CirclePiece):
        return CirclePiece(p.image, (p.slots[0] + offset, p.slots[1] + offset), p.conjugator, p.layout)
    return SurfacePiece(
        p.genus, p.orientable, tuple(s + offset for s in p.slots), p.images, p.conjugator, p.certification
    )


def elementary_check(hom: SurfaceHom, budget: int = DEFAULT_BUDGET) -> Certificate | Exhausted:
    """Search for generators with every u-image trivial.

    The reduction splits off handles and separating curves as it finds them,
    and ``budget`` caps the total number of expanded search nodes.
    """
    if not hom.spec.orientable:
        raise CapabilityError("elementary_check needs an orientable source; use klein_classify or genus_reduce")
    red = _Reducer(hom, budget, per_search=False)
    ok = red.orientable_block(0, hom.spec.genus)
    if not ok:
        return Exhausted(hom, budget, red.expanded)
    assert all(hom.target.is_identity(x) for x in red.cur[0::2])
    return Certificate(hom, red.seq, red.cur, budget, red.expanded)


def genus_reduce(hom: SurfaceHom, budget: int = DEFAULT_BUDGET) -> PinchDecomposition:
    """Split off circles, projective planes and separated blocks; budget is per search."""
    red = _Reducer(hom, budget, per_search=True)
    if hom.spec.orientable:
        red.orientable_block(0, hom.spec.genus)
    else:
        red.non_orientable_block(0, hom.spec.genus, budget)
    red.pieces.sort(key=_piece_order)
    dec = PinchDecomposition(hom, red.seq, red.cur, red.pieces, red.splits, budget)
    if not dec.recomposes():
        raise AssertionError("pinch decomposition does not recompose")
    return dec


def _piece_order(p) -> int:
    if isinstance(p, SurfacePiece):
        return p.slots[0]
    if isinstance(p, CirclePiece):
        return p.slots[0]
    return p.slot


@dataclass
class DefectWitness:
    value: int
    decomposition: PinchDecomposition


@dataclass
class Inconclusive:
    reason: str
    budget: int


def defect_at_least(hom: SurfaceHom, d: int, budget: int = DEFAULT_BUDGET) -> DefectWitness | Inconclusive:
    dec = genus_reduce(hom, budget)
    if dec.defect >= d:
        return DefectWitness(dec.defect, dec)
    return Inconclusive(f"found defect {dec.defect} < {d}", budget)


# --- Klein bottle -------------------------------------------------------------------------

@dataclass
class KleinResult:
    hom: SurfaceHom
    case: str | None
    moves: MoveSequence
    terminal: tuple
    pieces: list
    splits: list[Split]
    budget: int
    expanded: int

    @property
    def decided(self) -> bool:
        return self.case is not None

    def decomposition(self) -> PinchDecomposition:
        if self.case is None:
            raise ValueError("no case found within budget")
        return PinchDecomposition(self.hom, self.moves, self.terminal, list(self.pieces), list(self.splits), self.budget)

    def replays(self) -> bool:
        return self.moves.replay(self.hom.images, self.hom.target, self.hom.spec) == self.terminal

    def to_json(self) -> dict:
        t = self.hom.target
        if self.case is None:
            return {
                "result": "essentially-injective-within-budget",
                "budget": self.budget,
                "expanded": self.expanded,
            }
        return {
            "result": "case",
            "case": self.case,
            "moves": self.moves.to_json(t),
            "terminal": [t.to_json(x) for x in self.terminal],
            "decomposition": self.decomposition().to_json(),
            "budget": self.budget,
            "expanded": self.expanded,
        }


def _klein_case(t: tuple, g) -> str | None:
    v1, v2 = t
    if g.is_identity(v1):
        return "i"
    if g.is_identity(g.mul(v1, v2)):
        return "ii"
    if g.is_identity(g.mul(v1, v1)):
        return "iii"
    return None


def klein_classify(hom: SurfaceHom, budget: int = DEFAULT_BUDGET) -> KleinResult:
    """Find V1 -> 1, V1 V2 -> 1 or V1^2 -> 1 in the move orbit, checked in that order per node."""
    if hom.spec != SurfaceGroupSpec(2, False):
        raise ValueError("klein_classify needs the non-orientable genus 2 surface group")
    g = hom.target
    res = orbit_search(hom.spec, hom.images, g, lambda t: _klein_case(t, g) is not None, budget)
    if not res.found:
        return KleinResult(hom, None, MoveSequence(), tuple(hom.images), [], [], budget, res.expanded)
    t = res.images
    case = _klein_case(t, g)
    e = g.identity
    if case == "i":
        pieces = [ProjectivePiece(e, 0, e), ProjectivePiece(t[1], 1, e)]
        splits = [Split((2, False), ((1, False), (1, False)))]
    elif case == "ii":
        pieces = [CirclePiece(t[0], (0, 1), e, layout="klein")]
        splits = []
    else:
        pieces = [ProjectivePiece(t[0], 0, e), ProjectivePiece(t[1], 1, e)]
        splits = [Split((2, False), ((1, False), (1, False)))]
    return KleinResult(hom, case, res.moves, t, pieces, splits, budget, res.expanded)
