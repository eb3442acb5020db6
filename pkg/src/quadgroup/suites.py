"""Named verification suites.

Each suite returns a :class:`SuiteResult` with a case count and the first
counterexample, if any.  The CLI ``verify`` command and the acceptance tests
both call these functions.
"""

from __future__ import annotations

import itertools
import random
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Callable

from .genus import (
    enumerate_wicks_forms,
    genus_growth,
    genus_upper_search,
    match_wicks,
    rooted_form_count,
    trivalent_matchings,
)
from .product import (
    CyclicFactor,
    ProductElement,
    ProductGroup,
    classify_special,
    conjugate_into_factor,
    normal_form,
    verify_decomposition,
    z2_z3,
)
from .quadratic import (
    Kind,
    Move,
    QuadraticWord,
    canonicalize,
    classify_quadratic,
    enumerate_quadratic_words,
    polygon_type,
    substitute,
)
from .surface import (
    Certificate,
    Exhausted,
    SolutionError,
    SurfaceGroupSpec,
    SurfaceMove,
    elementary_check,
    generating_moves,
    genus_reduce,
    klein_classify,
    make_hom,
)
from .words import (
    FreeGroup,
    Word,
    commutator,
    commutator_product,
    cyclic_reduce,
    enumerate_words,
    exponent_sums,
    format_word,
    inverse,
    is_cyclically_reduced,
    mul,
    parse_word,
    square_product,
)

DEFAULT_SEED = 20240


@dataclass
class SuiteResult:
    name: str
    cases: int = 0
    failures: int = 0
    counterexample: str | None = None
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return self.failures == 0 and self.cases > 0

    def fail(self, what: str) -> None:
        self.failures += 1
        if self.counterexample is None:
            self.counterexample = what

    def to_json(self) -> dict:
        return {
            "suite": self.name,
            "passed": self.passed,
            "cases": self.cases,
            "failures": self.failures,
            "counterexample": self.counterexample,
            "details": self.details,
        }

    def summary(self) -> str:
        state = "PASS" if self.passed else "FAIL"
        line = f"{state} {self.name}: {self.cases} cases, {self.failures} failures"
        if self.counterexample:
            line += f"; first counterexample: {self.counterexample}"
        return line


# --- 1: Wicks forms vs brute force --------------------------------------------------------

def wicks_oracle(max_length: int = 8, len_budget: int = 8) -> SuiteResult:
    res = SuiteResult("wicks-oracle")
    roots = {g: sum(1 for _ in trivalent_matchings(g)) for g in (1, 2)}
    for g, n in roots.items():
        if n != rooted_form_count(g):
            res.fail(f"genus {g}: {n} rooted forms, formula says {rooted_form_count(g)}")
    res.details["rooted_counts"] = roots
    res.details["forms"] = {g: len(enumerate_wicks_forms(g)) for g in (1, 2)}
    form = enumerate_wicks_forms(1)[0]
    matched = 0
    for w in enumerate_words(2, max_length, min_length=1):
        if not is_cyclically_reduced(w) or any(exponent_sums(w, 2)):
            continue
        res.cases += 1
        m = match_wicks(w, form)
        b = genus_upper_search(w, 1, len_budget, rank=2)
        if (m is None) != (b is None):
            res.fail(f"{format_word(w)}: wicks={m is not None} search={b is not None}")
            continue
        for wit in (m.witness if m else None, b):
            if wit is not None and commutator_product(wit.tuple) != w:
                res.fail(f"{format_word(w)}: witness does not reduce to w")
        matched += m is not None
    res.details["genus_one"] = matched
    return res


# --- 2: canonical forms and transport -----------------------------------------------------

def _transport_failures(q: Word, words: list[tuple]) -> int:
    form, sub = canonicalize(QuadraticWord(q, max(abs(x) for x in q)))
    imgs = [[(abs(x) - 1, x < 0) for x in im] for im in sub.images]
    cw = [(abs(x) - 1, x < 0) for x in form.word()]
    qq = [(abs(x) - 1, x < 0) for x in q]
    pairs = [(w, tuple(-x for x in reversed(w))) for w in words]
    fails = 0
    # hand-inlined free reduction: this loop runs about 1.5e7 times
    for s in itertools.product(pairs, repeat=sub.n):
        o = []
        for im in imgs:
            out: list[int] = []
            for i, neg in im:
                for c in s[i][neg]:
                    if out and out[-1] == -c:
                        out.pop()
                    else:
                        out.append(c)
            o.append((out, [-c for c in reversed(out)]))
        lhs: list[int] = []
        for i, neg in qq:
            for c in o[i][neg]:
                if lhs and lhs[-1] == -c:
                    lhs.pop()
                else:
                    lhs.append(c)
        rhs: list[int] = []
        for i, neg in cw:
            for c in s[i][neg]:
                if rhs and rhs[-1] == -c:
                    rhs.pop()
                else:
                    rhs.append(c)
        if lhs != rhs:
            fails += 1
    return fails


def random_quadratic_move(rng: random.Random, n: int) -> Move:
    kind = rng.choice(["invert", "right", "left", "swap_inv", "rename", "conjugate"])
    x = rng.randint(1, n)
    if kind == "invert":
        return Move("invert", x)
    if kind in ("right", "left"):
        others = [v for v in range(1, n + 1) if v != x] or [x]
        y = rng.choice(others)
        if y == x:
            return Move("invert", x)
        return Move(kind, x, word=Word.from_reduced((y * rng.choice((1, -1)),)))
    if kind == "swap_inv":
        others = [v for v in range(1, n + 1) if v != x]
        if not others:
            return Move("invert", x)
        return Move("swap_inv", x, rng.choice(others))
    if kind == "rename":
        perm = list(range(1, n + 1))
        rng.shuffle(perm)
        return Move("rename", perm=tuple(perm))
    y = rng.randint(1, n)
    return Move("conjugate", word=Word.from_reduced((y * rng.choice((1, -1)),)), vars=tuple(range(1, n + 1)))


def twist(q: Word, n: int, rng: random.Random, max_moves: int = 5) -> Word:
    """Apply up to max_moves random moves, keeping only those that leave a quadratic word."""
    cur = q
    k = rng.randint(1, max_moves)
    applied = tries = 0
    while applied < k and tries < 50:
        tries += 1
        m = random_quadratic_move(rng, n)
        cand, _ = cyclic_reduce(substitute(cur, m.images()))
        c = classify_quadratic(cand.letters, n)
        if isinstance(c, QuadraticWord) and cand.letters:
            cur = cand.letters
            applied += 1
    return cur


def canonical_roundtrip(
    max_vars: int = 3, max_length: int = 6, sol_length: int = 2, twists: int = 1000, seed: int = DEFAULT_SEED
) -> SuiteResult:
    res = SuiteResult("canonical-roundtrip")
    words = [tuple(w) for w in enumerate_words(2, sol_length)]
    qs = list(enumerate_quadratic_words(max_vars, max_length))
    solutions = 0
    for q in qs:
        res.cases += 1
        n = max(abs(x) for x in q)
        solutions += len(words) ** n
        bad = _transport_failures(q, words)
        if bad:
            res.fail(f"{format_word(q)}: {bad} transported solutions fail")
        qw = QuadraticWord(q, n)
        form, _ = canonicalize(qw)
        poly = polygon_type(qw)
        if (poly.orientable, poly.genus) != (form.kind is not Kind.NON_ORIENTABLE, form.genus):
            res.fail(f"{format_word(q)}: polygon type {poly} disagrees with {form}")
    rng = random.Random(seed)
    for _ in range(twists):
        q = rng.choice(qs)
        n = max(abs(x) for x in q)
        t = twist(q, n, rng)
        res.cases += 1
        f0, _ = canonicalize(QuadraticWord(q, n))
        f1, _ = canonicalize(QuadraticWord(t, n))
        if f0 != f1:
            res.fail(f"{format_word(q)} -> {format_word(t)}: {f0} vs {f1}")
    res.details.update(words=len(qs), solutions=solutions, twists=twists, seed=seed)
    return res


# --- 3, 4: elementary certificates --------------------------------------------------------------------

def thm33_torus(max_length: int = 3, budget: int = 100_000) -> SuiteResult:
    res = SuiteResult("thm33-torus")
    F = FreeGroup(2)
    spec = SurfaceGroupSpec(1)
    ws = list(enumerate_words(2, max_length))
    longest = 0
    for x in ws:
        for y in ws:
            if commutator(x, y):
                continue
            res.cases += 1
            c = elementary_check(make_hom(spec, (x, y), F), budget)
            if isinstance(c, Exhausted) or not c.replays():
                res.fail(f"({format_word(x)}, {format_word(y)})")
            else:
                longest = max(longest, len(c.moves))
    res.details.update(budget=budget, longest_certificate=longest)
    return res


def _valid_genus2(group, elements) -> list[tuple]:
    spec = SurfaceGroupSpec(2)
    out = []
    for t in itertools.product(elements, repeat=4):
        try:
            make_hom(spec, t, group)
        except SolutionError:
            continue
        out.append(t)
    return out


def thm33_genus2(samples: int = 250, budget: int = 1_000_000, seed: int = DEFAULT_SEED) -> SuiteResult:
    res = SuiteResult("thm33-genus2")
    rng = random.Random(seed)
    spec = SurfaceGroupSpec(2)
    targets = [
        ("Z2*Z3", z2_z3(), list(z2_z3().elements(2))),
        ("F2", FreeGroup(2), list(enumerate_words(2, 2))),
    ]
    for name, group, elems in targets:
        valid = _valid_genus2(group, elems)
        picked = valid if len(valid) <= samples else rng.sample(valid, samples)
        res.details[name] = {"valid": len(valid), "sampled": len(picked)}
        for t in picked:
            res.cases += 1
            c = classify_special(make_hom(spec, t, group), budget)
            if isinstance(c, Exhausted) or not c.replays():
                res.fail(f"{name} {[group.format(x) for x in t]}")
    res.details.update(budget=budget, seed=seed)
    return res


# --- 5: genus growth -------------------------------------------------------------------------

def genus_growth_suite(p_max: int = 4) -> SuiteResult:
    res = SuiteResult("genus-growth")
    w = parse_word("abAB")
    table = genus_growth(w, p_max)
    expected = [1, 2, 2, 3][:p_max]
    res.cases = p_max
    for p, (row, want) in enumerate(zip(table.rows, expected), 1):
        if row.value != want:
            res.fail(f"p={p}: {row.status}, expected {want}")
        elif row.witness is None or commutator_product(row.witness.tuple) != mul(*[w] * p):
            res.fail(f"p={p}: witness missing or wrong")
        for g in range(1, want):
            if not any(c.startswith(f"genus {g}: all ") for c in row.certificates):
                res.fail(f"p={p}: lower bound {want} lacks Wicks exhaustion at genus {g}")
    # independent bounded search for the small cases
    if genus_upper_search(w, 1, 2) is None:
        res.fail("p=1: bounded search found no witness")
    if p_max >= 2 and genus_upper_search(mul(w, w), 2, 2) is None:
        res.fail("p=2: bounded search found no witness")
    if not table.subadditive:
        res.fail("subadditivity violated")
    res.details.update(values=table.values(), statuses=[r.status for r in table.rows])
    return res


# --- 6: orbit of [a, b] ------------------------------------------------------------------------

def orbit_reach(
    start: tuple[Word, Word],
    targets: set[tuple[Word, Word]],
    budget: int = 100_000,
    length_cap: int | None = None,
) -> tuple[set, int, dict]:
    """Breadth-first orbit of ``start`` under the torus moves and conjugation by r^(+-1).

    Returns (unreached targets, expanded nodes, parent map).  Nodes with a
    component longer than ``length_cap`` are not expanded.
    """
    F = FreeGroup(2)
    spec = SurfaceGroupSpec(1)
    r = commutator(*start)
    moves = generating_moves(spec, [r, inverse(r)])
    if length_cap is None:
        length_cap = 2 * max((max(len(x), len(y)) for x, y in targets), default=1)
    parent: dict = {start: None}
    queue = deque([start])
    remaining = set(targets) - {start}
    expanded = 0
    while queue and remaining and expanded < budget:
        node = queue.popleft()
        expanded += 1
        for m in moves:
            child = m.apply(node, F, spec)
            if child in parent or max(len(child[0]), len(child[1])) > length_cap:
                continue
            parent[child] = (node, m)
            remaining.discard(child)
            queue.append(child)
    return remaining, expanded, parent


def path_to(parent: dict, node) -> list[SurfaceMove]:
    out = []
    while parent[node] is not None:
        node, m = parent[node]
        out.append(m)
    return list(reversed(out))


def orbit_6_1_2(max_length: int = 3, budget: int = 100_000) -> SuiteResult:
    res = SuiteResult("orbit-6-1-2")
    a, b = parse_word("a"), parse_word("b")
    r = commutator(a, b)
    ws = list(enumerate_words(2, max_length))
    targets = {(x, y) for x in ws for y in ws if commutator(x, y) == r}
    missing, expanded, parent = orbit_reach((a, b), targets, budget)
    res.cases = len(targets)
    for t in sorted(missing, key=lambda t: (len(t[0]) + len(t[1]), t)):
        res.fail(f"({format_word(t[0])}, {format_word(t[1])}) not reached")
    F = FreeGroup(2)
    spec = SurfaceGroupSpec(1)
    for t in targets - missing:
        cur = (a, b)
        for m in path_to(parent, t):
            cur = m.apply(cur, F, spec)
        if cur != t:
            res.fail(f"path to {t} does not replay")
    res.details.update(targets=len(targets), expanded=expanded, budget=budget)
    return res


# --- 7: endomorphism search -------------------------------------------------------------------

def endo_search(u: Word, v: Word, u_image: Word, v_image: Word, max_length: int = 4) -> tuple[int, list]:
    """Endomorphisms of F2 (generator images up to max_length) sending u, v as required."""
    from .quadratic import evaluate

    hits = []
    count = 0
    ws = list(enumerate_words(2, max_length))
    for x in ws:
        for y in ws:
            count += 1
            if evaluate(u, (x, y)) == u_image and evaluate(v, (x, y)) == v_image:
                hits.append((x, y))
    return count, hits


def cor_6_8(max_length: int = 4) -> SuiteResult:
    res = SuiteResult("cor-6-8")
    u = parse_word("abAB")
    v = parse_word("aabAAB")
    count, hits = endo_search(u, v, u, mul(u, v), max_length)
    res.cases = count
    for x, y in hits[:1]:
        res.fail(f"a -> {format_word(x)}, b -> {format_word(y)}")
    res.failures = len(hits)
    res.details.update(endomorphisms=count, hits=len(hits))
    return res


# --- 8: free product axioms -------------------------------------------------------------------

def product_axioms(max_syllables: int = 3, seed: int = DEFAULT_SEED) -> SuiteResult:
    res = SuiteResult("product-axioms")
    G = z2_z3()
    elems = list(G.elements(max_syllables))
    e = G.identity
    rng = random.Random(seed)
    for x in elems:
        res.cases += 1
        if G.mul(x, e) != x or G.mul(e, x) != x:
            res.fail(f"identity law at {G.format(x)}")
        if G.mul(x, G.inv(x)) != e or G.mul(G.inv(x), x) != e:
            res.fail(f"inverse law at {G.format(x)}")
        if normal_form(list(x), G) != x:
            res.fail(f"normal form not idempotent at {G.format(x)}")
        # re-associate the raw syllables of x * x^-1 * x in random groupings
        raw = list(x) + list(G.inv(x)) + list(x)
        for _ in range(3):
            cut = sorted(rng.sample(range(len(raw) + 1), 2)) if len(raw) >= 1 else [0, 0]
            parts = [raw[: cut[0]], raw[cut[0] : cut[1]], raw[cut[1] :]]
            if G.mul(*(normal_form(p, G) for p in parts)) != x:
                res.fail(f"merge order dependence at {G.format(x)}")
        found = conjugate_into_factor(x, G)
        if found is not None:
            i, a, z = found
            if G.mul(z, ProductElement([(i, a)] if not G.factors[i].is_identity(a) else []), G.inv(z)) != x:
                res.fail(f"conjugator wrong at {G.format(x)}")
    for x, y, z in itertools.product(elems, repeat=3):
        res.cases += 1
        if G.mul(G.mul(x, y), z) != G.mul(x, G.mul(y, z)):
            res.fail(f"associativity at {G.format(x)}, {G.format(y)}, {G.format(z)}")
    # completeness: anything of the form z a z^-1 is detected
    singles = [ProductElement([(i, a)]) for i, f in enumerate(G.factors) for a in f.elements()]
    for zz in list(G.elements(2)):
        for s in singles:
            res.cases += 1
            x = G.mul(zz, s, G.inv(zz))
            if conjugate_into_factor(x, G) is None:
                res.fail(f"{G.format(x)} is conjugate into a factor but was not detected")
    res.details.update(elements=len(elems), seed=seed)
    return res


# --- 9: Klein bottle --------------------------------------------------------------------------

def klein_4_8(budget: int = 100_000) -> SuiteResult:
    res = SuiteResult("klein-4-8")
    spec = SurfaceGroupSpec(2, orientable=False)
    dihedral = ProductGroup([CyclicFactor(2), CyclicFactor(2)])
    cases: dict[str, int] = {}
    for name, group, elems in (
        ("Z2*Z2", dihedral, list(dihedral.elements(2))),
        ("F2", FreeGroup(2), list(enumerate_words(2, 2))),
    ):
        for t in itertools.product(elems, repeat=2):
            try:
                hom = make_hom(spec, t, group)
            except SolutionError:
                continue
            res.cases += 1
            kr = klein_classify(hom, budget)
            label = f"{name} ({group.format(t[0])}, {group.format(t[1])})"
            if not kr.decided:
                res.fail(f"{label}: inconclusive")
                continue
            cases[kr.case] = cases.get(kr.case, 0) + 1
            if not kr.replays():
                res.fail(f"{label}: witness does not replay")
            rep = verify_decomposition(hom, kr.decomposition())
            if not rep.passed:
                res.fail(f"{label}: decomposition check failed")
    res.details.update(cases=cases, budget=budget)
    return res


# --- 10: structural invariants ----------------------------------------------------------------

def random_hom(rng: random.Random):
    """A random valid homomorphism built from elementary pieces and random moves."""
    kind = rng.random()
    if kind < 0.5:
        g = rng.randint(1, 3)
        spec = SurfaceGroupSpec(g)
        group = FreeGroup(2) if rng.random() < 0.6 else z2_z3()
        pick = (lambda: rng.choice(_F2_SHORT)) if isinstance(group, FreeGroup) else (lambda: rng.choice(_Z23_SHORT))
        images: list = []
        for _ in range(g):
            images += [group.identity, pick()]
    else:
        g = rng.randint(1, 4)
        spec = SurfaceGroupSpec(g, orientable=False)
        group = ProductGroup([CyclicFactor(2), CyclicFactor(2)]) if rng.random() < 0.5 else FreeGroup(2)
        images = []
        left = g
        while left:
            if left >= 2 and rng.random() < 0.5:
                c = rng.choice(_F2_SHORT) if isinstance(group, FreeGroup) else rng.choice(_D_SHORT)
                images += [c, group.inv(c)]
                left -= 2
            else:
                inv = group.identity if isinstance(group, FreeGroup) else rng.choice([group.identity] + _D_INVOLUTIONS)
                images.append(inv)
                left -= 1
    hom = make_hom(spec, images, group)
    moves = generating_moves(spec)
    if moves:
        for _ in range(rng.randint(0, 4)):
            m = rng.choice(moves)
            hom = make_hom(spec, m.apply(hom.images, group, spec), group)
    return hom


_F2_SHORT = [w for w in enumerate_words(2, 2) if w]
_Z23_SHORT = [x for x in z2_z3().elements(2) if x]
_D = ProductGroup([CyclicFactor(2), CyclicFactor(2)])
_D_SHORT = [x for x in _D.elements(2) if x]
_D_INVOLUTIONS = [x for x in _D.elements(3) if x and _D.order_at_most_two(x)]


def invariants(cases: int = 10_000, seed: int = DEFAULT_SEED, budget: int = 20_000) -> SuiteResult:
    res = SuiteResult("invariants")
    rng = random.Random(seed)
    tally = {"moves": 0, "replay": 0, "recompose": 0, "euler": 0}
    for k in range(cases):
        hom = random_hom(rng)
        spec, group = hom.spec, hom.target
        res.cases += 1
        which = k % 3
        if which == 0:
            # move soundness: every generating move keeps the relator trivial,
            # symbolically and on this tuple
            for m in generating_moves(spec, [rng.choice(_F2_SHORT)] if isinstance(group, FreeGroup) else []):
                tally["moves"] += 1
                if not m.preserves_relator(spec):
                    res.fail(f"{m} changes the relator word")
                try:
                    make_hom(spec, m.apply(hom.images, group, spec), group)
                except SolutionError:
                    res.fail(f"{m} breaks {hom}")
                back = m.inverse().apply(m.apply(hom.images, group, spec), group, spec)
                if back != hom.images:
                    res.fail(f"{m} inverse does not undo it on {hom}")
        elif which == 1 and spec.orientable:
            tally["replay"] += 1
            c = elementary_check(hom, budget)
            if isinstance(c, Exhausted):
                res.fail(f"no certificate for {hom}")
            elif not c.replays() or not all(group.is_identity(u) for u in c.terminal[0::2]):
                res.fail(f"certificate for {hom} does not replay")
        else:
            tally["recompose"] += 1
            dec = genus_reduce(hom, budget)
            if not dec.recomposes():
                res.fail(f"decomposition of {hom} does not recompose")
            tally["euler"] += len(dec.splits)
            if not dec.euler_ok():
                res.fail(f"Euler bookkeeping fails for {hom}")
    res.details.update(tally=tally, seed=seed)
    return res


SUITES: dict[str, Callable[[], SuiteResult]] = {
    "wicks-oracle": wicks_oracle,
    "canonical-roundtrip": canonical_roundtrip,
    "thm33-torus": thm33_torus,
    "thm33-genus2": thm33_genus2,
    "genus-growth": genus_growth_suite,
    "orbit-6-1-2": orbit_6_1_2,
    "cor-6-8": cor_6_8,
    "product-axioms": product_axioms,
    "klein-4-8": klein_4_8,
    "invariants": invariants,
}

SEEDED = {"canonical-roundtrip", "thm33-genus2", "product-axioms", "invariants"}


def run_suite(name: str, seed: int | None = None) -> SuiteResult:
    fn = SUITES[name]
    t0 = time.perf_counter()
    res = fn(seed=seed) if (seed is not None and name in SEEDED) else fn()
    res.seconds = time.perf_counter() - t0
    return res
