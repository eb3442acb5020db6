"""Command-line front end.

Exit codes: 0 computed, 1 computed but inconclusive (a budget ran out),
2 usage error, 3 domain error.
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

from . import genus as genus_mod
from .genus import CapabilityError as GenusCapabilityError
from .genus import GenusError, genus_exact, genus_growth
from .product import GroupError, classify_special, group_from_json, load_group_json, verify_decomposition
from .quadratic import Move, QuadraticWord, Substitution, canonicalize, format_variables, parse_variables, quadratic
from .suites import SUITES, orbit_reach, path_to, run_suite, endo_search
from .surface import (
    DEFAULT_BUDGET,
    CapabilityError,
    Certificate,
    MoveSequence,
    SolutionError,
    SurfaceGroupSpec,
    genus_reduce,
    klein_classify,
    make_hom,
)
from .words import FreeGroup, WordError, commutator, commutator_product, enumerate_words, format_word, parse_word

SCHEMA_VERSION = "1.0"
DEFAULT_WITNESS_LENGTH = 6


class UsageError(ValueError):
    pass


class DomainError(ValueError):
    pass


def _report(command: str, inputs: dict, result: dict, summary: list[str], exit_code: int) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "input": inputs,
        "result": result,
        "summary": summary,
        "exit_code": exit_code,
    }


# --- input helpers ---------------------------------------------------------------------------------

def _group(args):
    if getattr(args, "group", None):
        try:
            return group_from_json(load_group_json(args.group), seed=args.seed)
        except (OSError, json.JSONDecodeError) as e:
            raise UsageError(f"cannot read group: {e}") from e
    return FreeGroup(args.rank)


def _word(text: str, rank: int):
    try:
        return parse_word(text, rank)
    except WordError as e:
        raise UsageError(str(e)) from e


def _hom(args):
    text = args.hom
    s = text.strip()
    if s.startswith("{") or (s.endswith(".json") and Path(s).exists()):
        try:
            d = load_group_json(s)
        except (OSError, json.JSONDecodeError) as e:
            raise UsageError(f"cannot read homomorphism: {e}") from e
        return hom_from_json(d, seed=args.seed)
    group = _group(args)
    parts = [p.strip() for p in s.split(",")]
    orientable = not args.non_orientable
    g = args.genus or (len(parts) // 2 if orientable else len(parts))
    if g < 1:
        raise UsageError("need at least one handle")
    spec = SurfaceGroupSpec(g, orientable)
    return make_hom(spec, [group.parse(p) for p in parts], group)


def hom_from_json(d: dict, seed: int = 0):
    try:
        group = group_from_json(d["target"], seed=seed)
        spec = SurfaceGroupSpec(int(d["genus"]), bool(d.get("orientable", True)))
        images = [group.parse(x) for x in d["images"]]
    except KeyError as e:
        raise UsageError(f"homomorphism JSON lacks {e}") from e
    return make_hom(spec, images, group)


# --- commands -----------------------------------------------------------------------------------------

def cmd_genus(args) -> dict:
    w = _word(args.word, args.rank)
    res = genus_exact(w, args.max_genus, rank=args.rank, expensive=args.max_genus >= 3, len_budget=args.budget)
    code = 0 if res.exact else 1
    lines = [f"genus({format_word(w)}) {res.status}"]
    if res.witness:
        lines.append("witness: " + " ".join(res.witness.to_json()))
    lines += res.certificates
    inputs = {"word": format_word(w), "rank": args.rank, "max_genus": args.max_genus, "budget": args.budget}
    return _report("genus", inputs, res.to_json(), lines, code)


def cmd_growth(args) -> dict:
    w = _word(args.word, args.rank)
    table = genus_growth(w, args.pmax, args.max_genus, rank=args.rank)
    lines = [f"p={i + 1}: {r.status}" for i, r in enumerate(table.rows)]
    lines.append("subadditivity " + ("holds" if table.subadditive else "FAILS"))
    code = 0 if all(r.exact for r in table.rows) else 1
    inputs = {"word": format_word(w), "rank": args.rank, "pmax": args.pmax, "max_genus": args.max_genus}
    return _report("growth", inputs, table.to_json(), lines, code)


def cmd_canonicalize(args) -> dict:
    try:
        w = parse_variables(args.word)
        q = quadratic(w)
    except (WordError, ValueError) as e:
        raise UsageError(str(e)) from e
    form, sub = canonicalize(q)
    result = {
        "kind": form.kind.value,
        "genus": form.genus,
        "canonical": format_variables(form.word()),
        "n_variables": q.n_variables,
        "images": [format_variables(x) for x in sub.images],
        "inverse_images": [format_variables(x) for x in sub.inverse_images],
        "moves": [m.to_json() for m in sub.moves],
    }
    lines = [
        f"{format_variables(q.word)} ~ {form}",
        "substitution: " + ", ".join(f"x{i + 1} -> {format_variables(x)}" for i, x in enumerate(sub.images)),
    ]
    return _report("canonicalize", {"word": format_variables(q.word)}, result, lines, 0)


def cmd_elementary(args) -> dict:
    hom = _hom(args)
    if not hom.spec.orientable:
        raise DomainError("elementary needs an orientable source; use klein or reduce-hom")
    c = classify_special(hom, args.budget)
    if isinstance(c, Certificate):
        t = hom.target
        lines = [
            f"elementary: {len(c.moves)} moves, {c.expanded} nodes",
            f"moves: {c.moves}",
            "terminal: (" + ", ".join(t.format(x) for x in c.terminal) + ")",
        ]
        return _report("elementary", hom.to_json(), c.to_json(), lines, 0)
    return _report(
        "elementary",
        hom.to_json(),
        c.to_json(),
        [f"inconclusive: budget {c.budget} exhausted after {c.expanded} nodes"],
        1,
    )


def _decomposition_lines(dec) -> list[str]:
    t = dec.hom.target
    lines = [f"defect {dec.defect}, {len(dec.pieces)} pieces, {len(dec.moves)} moves"]
    for p in dec.to_json()["pieces"]:
        lines.append("  " + json.dumps(p, sort_keys=True))
    lines.append("recomposes: " + str(dec.recomposes()))
    return lines


def cmd_reduce(args) -> dict:
    hom = _hom(args)
    dec = genus_reduce(hom, args.budget)
    result = dec.to_json()
    result["verification"] = verify_decomposition(hom, dec).to_json()
    unknown = any(p.get("certification") == "unknown" for p in result["pieces"])
    return _report("reduce-hom", hom.to_json(), result, _decomposition_lines(dec), 1 if unknown else 0)


def cmd_klein(args) -> dict:
    args.non_orientable = True
    hom = _hom(args)
    if hom.spec != SurfaceGroupSpec(2, False):
        raise DomainError("klein needs a non-orientable genus 2 homomorphism")
    kr = klein_classify(hom, args.budget)
    result = kr.to_json()
    if kr.decided:
        result["verification"] = verify_decomposition(hom, kr.decomposition()).to_json()
        lines = [f"case {kr.case} after {len(kr.moves)} moves"]
        return _report("klein", hom.to_json(), result, lines, 0)
    return _report("klein", hom.to_json(), result, [f"no case found within budget {args.budget}"], 1)


def cmd_orbit(args) -> dict:
    x, y = _word(args.x, 2), _word(args.y, 2)
    r = commutator(x, y)
    ws = list(enumerate_words(2, args.max_length))
    targets = {(p, q) for p in ws for q in ws if commutator(p, q) == r}
    missing, expanded, parent = orbit_reach((x, y), targets, args.budget)
    F = FreeGroup(2)
    reached = sorted(targets - missing, key=lambda t: (len(t[0]) + len(t[1]), t))
    result = {
        "start": [format_word(x), format_word(y)],
        "relator": format_word(r),
        "targets": len(targets),
        "reached": len(reached),
        "expanded": expanded,
        "budget": args.budget,
        "paths": {
            f"{format_word(p)},{format_word(q)}": MoveSequence(path_to(parent, (p, q))).to_json(F)
            for p, q in reached
        },
        "unreached": [[format_word(p), format_word(q)] for p, q in sorted(missing)],
    }
    lines = [f"{len(reached)}/{len(targets)} solutions of [x,y] = {format_word(r)} reached ({expanded} nodes)"]
    code = 0 if not missing else 1
    return _report("orbit", {"x": format_word(x), "y": format_word(y), "max_length": args.max_length}, result, lines, code)


def cmd_endo(args) -> dict:
    u, v = _word(args.u, 2), _word(args.v, 2)
    ui, vi = _word(args.u_image, 2), _word(args.v_image, 2)
    count, hits = endo_search(u, v, ui, vi, args.max_length)
    result = {"endomorphisms": count, "hits": [[format_word(a), format_word(b)] for a, b in hits]}
    lines = [f"{count} endomorphisms searched, {len(hits)} hits"]
    inputs = {"u": format_word(u), "v": format_word(v), "u_image": format_word(ui), "v_image": format_word(vi),
              "max_length": args.max_length}
    return _report("endo-search", inputs, result, lines, 0)


def cmd_verify(args) -> dict:
    if args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}")
    res = run_suite(args.suite, seed=args.seed)
    return _report("verify", {"suite": args.suite, "seed": args.seed}, res.to_json(), [res.summary()], 0 if res.passed else 1)


# --- replay ----------------------------------------------------------------------------------------------

def replay_report(report: dict, seed: int = 0) -> tuple[bool, str]:
    """Check a saved report's certificate from the report alone."""
    command = report.get("command")
    result = report.get("result", {})
    if command == "canonicalize":
        q = quadratic(parse_variables(report["input"]["word"]))
        sub = Substitution.identity(q.n_variables)
        for m in result["moves"]:
            sub = sub.then(Move.from_json(m))
        ok = [format_variables(x) for x in sub.images] == result["images"]
        ok = ok and format_variables(sub.apply(q.word)) == result["canonical"]
        return ok, "substitution replays" if ok else "substitution differs"
    if command in ("elementary", "reduce-hom", "klein"):
        if result.get("result") in ("exhausted", "essentially-injective-within-budget"):
            return True, "nothing to replay"
        hom = hom_from_json(result.get("hom") or report["input"], seed=seed)
        t = hom.target
        seq = MoveSequence.from_json(result["moves"], t)
        end = seq.replay(hom.images, t, hom.spec)
        ok = [t.to_json(x) for x in end] == result["terminal"]
        return ok, f"{len(seq)} moves " + ("replay" if ok else "do not replay")
    if command == "orbit":
        F = FreeGroup(2)
        spec = SurfaceGroupSpec(1)
        start = tuple(parse_word(s, 2) for s in result["start"])
        for key, moves in result["paths"].items():
            end = MoveSequence.from_json(moves, F).replay(start, F, spec)
            if ",".join(format_word(x) for x in end) != key:
                return False, f"path to {key} does not replay"
        return True, f"{len(result['paths'])} paths replay"
    if command in ("genus", "growth"):
        rows = result.get("rows", [result])
        for row in rows:
            wit = row.get("witness")
            if wit:
                word = report["input"]["word"]
                p = row.get("p", 1)
                target = parse_word(word * p)
                if commutator_product([parse_word(x) for x in wit]) != target:
                    return False, "witness does not reduce to the target"
        return True, "witnesses reduce to their targets"
    raise UsageError(f"nothing to replay for command {command!r}")


# --- parser ------------------------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--rank", type=int, default=2, help="free group rank for words (default 2)")
    common.add_argument("--group", help="target group as inline JSON or a JSON file")
    common.add_argument("--budget", type=int, help="search budget (nodes, or witness length for genus)")
    common.add_argument("--seed", type=int, default=None, help="seed for randomized suites")
    common.add_argument("--replay", metavar="FILE", help="replay the certificate stored in a saved JSON report")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json", help="JSON output")
    fmt.add_argument("--text", dest="fmt", action="store_const", const="text", help="text output (default)")

    p = argparse.ArgumentParser(prog="quadgroup", description="Quadratic equations in free groups and free products.")
    sub = p.add_subparsers(dest="command", required=True)

    def hom_args(sp):
        sp.add_argument("hom", nargs="?", help="images 'w1,w2,...', inline JSON, or a JSON file")
        sp.add_argument("--genus", type=int, default=0, help="surface genus (default: from the image count)")
        sp.add_argument("--non-orientable", action="store_true", help="source is V1^2...Vg^2")

    sp = sub.add_parser("genus", parents=[common], help="commutator genus of a word")
    sp.add_argument("word", nargs="?")
    sp.add_argument("--max-genus", type=int, default=genus_mod.DEFAULT_MAX_GENUS)
    sp.set_defaults(fn=cmd_genus, default_budget=DEFAULT_WITNESS_LENGTH)

    sp = sub.add_parser("growth", parents=[common], help="genus of w^p for p = 1..pmax")
    sp.add_argument("word", nargs="?")
    sp.add_argument("--pmax", type=int, default=4)
    sp.add_argument("--max-genus", type=int, default=genus_mod.DEFAULT_MAX_GENUS)
    sp.set_defaults(fn=cmd_growth, default_budget=DEFAULT_WITNESS_LENGTH)

    sp = sub.add_parser("canonicalize", parents=[common], help="canonical form of a quadratic word")
    sp.add_argument("word", nargs="?")
    sp.set_defaults(fn=cmd_canonicalize, default_budget=0)

    for name, fn, text in (
        ("elementary", cmd_elementary, "certify that a homomorphism is elementary"),
        ("reduce-hom", cmd_reduce, "pinch decomposition of a homomorphism"),
        ("klein", cmd_klein, "Klein bottle case analysis"),
    ):
        sp = sub.add_parser(name, parents=[common], help=text)
        hom_args(sp)
        sp.set_defaults(fn=fn, default_budget=DEFAULT_BUDGET)

    sp = sub.add_parser("orbit", parents=[common], help="reach all short solutions of [x,y] = [x0,y0]")
    sp.add_argument("x", nargs="?", default="a")
    sp.add_argument("y", nargs="?", default="b")
    sp.add_argument("--max-length", type=int, default=3)
    sp.set_defaults(fn=cmd_orbit, default_budget=DEFAULT_BUDGET)

    sp = sub.add_parser("endo-search", parents=[common], help="search endomorphisms of F2 with prescribed values")
    sp.add_argument("u", nargs="?", default="abAB")
    sp.add_argument("v", nargs="?", default="aabAAB")
    sp.add_argument("u_image", nargs="?", default="abAB")
    sp.add_argument("v_image", nargs="?", default="abABaabAAB")
    sp.add_argument("--max-length", type=int, default=4)
    sp.set_defaults(fn=cmd_endo, default_budget=0)

    sp = sub.add_parser("verify", parents=[common], help="run a named verification suite")
    sp.add_argument("suite", nargs="?")
    sp.set_defaults(fn=cmd_verify, default_budget=0)
    return p


def _emit(report: dict, fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
    else:
        for line in report["summary"]:
            out.write(line + "\n")


def run(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    fmt = args.fmt or "text"
    if args.budget is None:
        args.budget = args.default_budget
    if args.seed is None and args.command == "verify":
        from .suites import DEFAULT_SEED

        args.seed = DEFAULT_SEED
    if args.seed is None:
        args.seed = 0
    try:
        if args.replay:
            try:
                saved = json.loads(Path(args.replay).read_text())
            except (OSError, json.JSONDecodeError) as e:
                raise UsageError(f"cannot read report: {e}") from e
            ok, msg = replay_report(saved, seed=args.seed)
            report = _report(args.command, {"replay": args.replay}, {"replayed": ok, "detail": msg},
                             [("replay ok: " if ok else "replay FAILED: ") + msg], 0 if ok else 3)
        else:
            required = {"genus": "word", "growth": "word", "canonicalize": "word", "elementary": "hom",
                        "reduce-hom": "hom", "klein": "hom", "verify": "suite"}
            need = required.get(args.command)
            if need and getattr(args, need) is None:
                raise UsageError(f"{args.command} needs a {need} argument")
            if args.budget < 0:
                raise UsageError("budget must be non-negative")
            report = args.fn(args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 2
    except (WordError, GroupError) as e:
        print(f"input error: {e}", file=sys.stderr)
        return 2
    except (GenusError, SolutionError, CapabilityError, GenusCapabilityError, DomainError) as e:
        print(f"domain error: {e}", file=sys.stderr)
        return 3
    _emit(report, fmt, out)
    return report["exit_code"]


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
