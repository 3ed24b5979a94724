"""Command-line front end.

Every subcommand prints a JSON report (or a short summary with ``--plain``).
Exit codes: 0 success, 1 a check failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__, bell, catalog, games, polytope, quantum
from .errors import BudgetExceededError, DegenerateFaceError, FormatError
from .io import (
    certificate_document,
    dumps,
    format_integer_matrix,
    load_expression,
    load_game,
    strategy_document,
)
from .reproduce import run_checks

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT_ERROR = 2


class InputError(Exception):
    pass


def _resolve_game(spec: str) -> games.GameRelation:
    if spec in catalog.GAMES:
        return catalog.builtin_game(spec)
    path = Path(spec)
    if not path.exists():
        raise InputError(f"unknown game id or missing file: {spec} (ids: {', '.join(catalog.GAMES)})")
    return load_game(path)


def _resolve_expression(spec: str) -> bell.BellExpression:
    if spec in catalog.EXPRESSIONS:
        return catalog.builtin_expression(spec)
    path = Path(spec)
    if not path.exists():
        raise InputError(f"unknown expression id or missing file: {spec} (ids: {', '.join(catalog.EXPRESSIONS)})")
    return load_expression(path)


def _rational(text: str):
    """Exact if the text is an integer or p/q, float otherwise."""
    try:
        return Fraction(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        raise InputError(f"not a number: {text!r}") from None


def _strategy_doc(s: games.DeterministicStrategy | None):
    if s is None:
        return None
    return {"a_map": list(s.a_map), "b_map": list(s.b_map)}


# -- subcommands -----------------------------------------------------------

def cmd_classical_value(args):
    game = _resolve_game(args.game)
    value, witness = games.classical_value_with_witness(game, args.budget)
    if value == 0:
        witness = None
    results = {
        "value": value,
        "winning_pairs": int(value * game.m_a * game.m_b),
        "input_pairs": game.m_a * game.m_b,
        "witness": _strategy_doc(witness),
    }
    plain = f"classical value {value.numerator}/{value.denominator}"
    return results, plain, EXIT_OK


def cmd_facet_check(args):
    expr = _resolve_expression(args.game)
    if args.params:
        try:
            params = polytope.PolytopeParams(*(int(v) for v in args.params.split(",")))
        except (TypeError, ValueError) as exc:
            raise InputError(f"--params needs four positive integers: {exc}") from None
        expr = expr.embed(params)
    try:
        cert = polytope.is_facet(expr, budget=args.budget, proper_face_guard=not args.debug_no_guard)
    except DegenerateFaceError as exc:
        return {"verdict": False, "reason": str(exc)}, f"not a face: {exc}", EXIT_OK
    if args.export_matrix:
        vertices = polytope.saturating_vertices(expr, budget=args.budget)
        Path(args.export_matrix).write_text(format_integer_matrix(polytope.cg_matrix(vertices, expr.params)))
    results = certificate_document(expr, cert, args.game)
    plain = (
        f"vertices {cert.vertex_count}, rank {cert.rank}, d {cert.dimension}: "
        f"{'facet' if cert.verdict else 'not a facet'} ({cert.reason})"
    )
    return results, plain, EXIT_OK


def cmd_quantum(args):
    if args.game not in catalog.QUANTUM:
        raise InputError(f"no quantum strategy for {args.game!r} (ids: {', '.join(catalog.QUANTUM)})")
    game = catalog.builtin_game(args.game)
    defects = []
    if args.debug_flip_sign:
        if args.game != "magic-square-r4":
            raise InputError("--debug-flip-sign applies to magic-square-r4 only")
        flipped = quantum.mermin_peres_square(flip=(0, 0))
        strategy = quantum.magic_square_quantum_strategy(flipped, quantum.mermin_peres_square())
        defects = quantum.square_defects(flipped)
    else:
        strategy = catalog.builtin_quantum(args.game)
        if args.game == "magic-square-r4":
            defects = quantum.square_defects(quantum.mermin_peres_square())
    terms = quantum.success_terms(strategy, game)
    p = float(terms.mean())
    if args.export_strategy:
        Path(args.export_strategy).write_text(dumps(strategy_document(strategy)) + "\n")
    results = {
        "winning_probability": p,
        "terms": [[float(v) for v in row] for row in terms],
        "strategy_defects": defects,
    }
    return results, f"winning probability {p:.17g}", EXIT_CHECK_FAILED if defects else EXIT_OK


def cmd_theorem_2xn(args):
    game = _resolve_game(args.game)
    if game.m_a != 2:
        raise InputError(f"theorem-2xn needs a game where Alice has 2 inputs, got {game.m_a}")
    witness = games.winnable_2xn_witness(game)
    if witness is None:
        results = {
            "winnable": False,
            "witness": None,
            "statement": "no compatible answer pair: not classically winnable, and with two inputs on "
            "one side no quantum strategy wins with certainty either, so this is not pseudo-telepathy",
        }
        return results, "not winnable", EXIT_OK
    a0, a1, b_list = witness
    results = {
        "winnable": True,
        "witness": {"a0": a0, "a1": a1, "b": list(b_list)},
        "statement": "classically winnable, hence not pseudo-telepathy",
    }
    return results, f"winnable: a0={a0}, a1={a1}, b={list(b_list)}", EXIT_OK


def cmd_noise(args):
    if args.i_qm is None and args.i_lv is None and args.i_noise is None:
        expr = bell.magic_square_inequality("restricted4")
        simulated = expr.evaluate_on_distribution(
            quantum.labelled_behavior(quantum.magic_square_quantum_strategy(), 4, 4)
        )
        i_lv = expr.local_maximum(args.budget)[0]
        i_noise = bell.uniform_noise_value(expr)
        i_qm = Fraction(9)
        extra = {"simulated_i_qm": simulated, "p_n_simulated": bell.noise_resistance(simulated, i_lv, i_noise)}
    elif None in (args.i_qm, args.i_lv, args.i_noise):
        raise InputError("give all of --i-qm, --i-lv, --i-noise, or none of them")
    else:
        i_qm, i_lv, i_noise = (_rational(v) for v in (args.i_qm, args.i_lv, args.i_noise))
        extra = {}
    try:
        p_n = bell.noise_resistance(i_qm, i_lv, i_noise)
    except ZeroDivisionError as exc:
        raise InputError(str(exc)) from None
    results = {"i_qm": i_qm, "i_lv": i_lv, "i_noise": i_noise, "p_n": p_n, **extra}
    shown = f"{p_n.numerator}/{p_n.denominator}" if isinstance(p_n, Fraction) else f"{p_n:.17g}"
    return results, f"p_n = {shown}", EXIT_OK


def cmd_reproduce_paper(args):
    checks = run_checks(proper_face_guard=not args.debug_no_guard)
    failed = [c for c in checks if not c.passed]
    results = {
        "checks": [
            {"name": c.name, "expected": c.expected, "observed": c.observed, "tolerance": c.tolerance, "passed": c.passed}
            for c in checks
        ],
        "passed": len(checks) - len(failed),
        "failed": len(failed),
    }
    plain = "\n".join(c.line() for c in checks)
    return results, plain, EXIT_CHECK_FAILED if failed else EXIT_OK


COMMANDS = {
    "classical-value": cmd_classical_value,
    "facet-check": cmd_facet_check,
    "quantum": cmd_quantum,
    "theorem-2xn": cmd_theorem_2xn,
    "noise": cmd_noise,
    "reproduce-paper": cmd_reproduce_paper,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pseudotelepathy", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--budget", type=int, default=None, help="max deterministic strategies to enumerate")
        p.add_argument("--plain", action="store_true", help="print a one-line summary instead of JSON")

    p = sub.add_parser("classical-value", help="exact classical value by enumeration")
    p.add_argument("--game", required=True, help="game file or built-in id")
    common(p)

    p = sub.add_parser("facet-check", help="exact facet test for a Bell expression")
    p.add_argument("--game", "--expression", dest="game", required=True, help="expression file or built-in id")
    p.add_argument("--params", help="embed into a larger scenario, e.g. 3,3,8,8")
    p.add_argument("--export-matrix", help="write the saturating-vertex matrix, one row per line")
    p.add_argument("--debug-no-guard", action="store_true", help="disable the proper-face guard")
    common(p)

    p = sub.add_parser("quantum", help="winning probability of a built-in quantum strategy")
    p.add_argument("--game", required=True, help="built-in id")
    p.add_argument("--debug-flip-sign", action="store_true", help="negate one entry of Alice's square")
    p.add_argument("--export-strategy", help="write the strategy (state and projectors) as JSON")
    common(p)

    p = sub.add_parser("theorem-2xn", help="pair-compatibility test for games with two Alice inputs")
    p.add_argument("--game", required=True, help="game file or built-in id")
    common(p)

    p = sub.add_parser("noise", help="resistance to noise")
    p.add_argument("--i-qm")
    p.add_argument("--i-lv")
    p.add_argument("--i-noise")
    common(p)

    p = sub.add_parser("reproduce-paper", help="recompute every published number")
    p.add_argument("--debug-no-guard", action="store_true", help="disable the proper-face guard")
    common(p)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    inputs = {k: v for k, v in vars(args).items() if k not in ("command", "plain")}
    start = time.perf_counter()
    try:
        results, plain, code = COMMANDS[args.command](args)
    except (InputError, FormatError, BudgetExceededError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    elapsed = time.perf_counter() - start
    if args.plain:
        print(plain)
    else:
        report = {
            "command": args.command,
            "inputs": inputs,
            "results": results,
            "elapsed_seconds": elapsed,
            "version": __version__,
        }
        print(dumps(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
