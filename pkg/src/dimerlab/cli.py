"""Command-line front end: build artifacts, verify single triangulations,
sweep whole flip classes, print Gamma(m, n), and check flip transport.

Exit codes: 0 verified, 1 invalid input, 2 inconclusive (budget ran out),
3 verification failed.  Output is canonical: keys sorted, no timestamps,
budgets and tool version included, so identical invocations are
byte-identical.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor

from . import __version__
from .boundary import (
    BoundaryError,
    InconclusivePresentationError,
    build_gamma,
    verify_boundary_algebra,
    verify_flip_transport,
)
from .dimer import DimerError, build_dimer, reduce_dimer
from .polygon import (
    PolygonError,
    Triangulation,
    enumerate_triangulations,
    fan_triangulation,
    normalize_diagonal,
)
from .quiver import QuiverError, dual_quiver
from .rewrite import RewriteError, SearchBudget, default_max_visited

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_INCONCLUSIVE = 2
EXIT_FAILED = 3


class CliError(ValueError):
    pass


def parse_triangulation_spec(n: int, spec: str) -> Triangulation:
    """Grammar: 'fan', 'fan:APEX', or comma-separated 'a-b' diagonal pairs."""
    spec = spec.strip()
    if spec == "fan":
        return fan_triangulation(n)
    if spec.startswith("fan:"):
        try:
            apex = int(spec[4:])
        except ValueError:
            raise CliError(f"bad fan apex in {spec!r}")
        return fan_triangulation(n, apex)
    diagonals = []
    if spec:
        for pos, part in enumerate(spec.split(",")):
            bits = part.strip().split("-")
            if len(bits) != 2:
                raise CliError(f"bad diagonal {part!r} at position {pos}")
            try:
                a, b = int(bits[0]), int(bits[1])
            except ValueError:
                raise CliError(f"bad diagonal {part!r} at position {pos}")
            diagonals.append(normalize_diagonal(n, (a, b)))
    return Triangulation(n, diagonals)


def _triangulation_from_args(args) -> Triangulation:
    if args.fan is not None and args.diagonals:
        raise CliError("give either --fan or --diagonals, not both")
    if args.fan is not None:
        spec = "fan" if args.fan == "" else f"fan:{args.fan}"
    elif args.diagonals is not None:
        spec = args.diagonals
    else:
        raise CliError("a triangulation is required (--fan or --diagonals)")
    return parse_triangulation_spec(args.n, spec)


def _budget_from_args(args, fallback_length: int = 64) -> SearchBudget | None:
    if args.budget_visited is None and args.budget_length is None:
        return None  # per-query defaults
    return SearchBudget(
        max_path_length=args.budget_length or fallback_length,
        max_visited=args.budget_visited or default_max_visited(),
    )


def _emit(data: dict) -> None:
    sys.stdout.write(json.dumps(data, sort_keys=True, indent=2) + "\n")


def _add_common(sub, need_m=True):
    sub.add_argument("--n", type=int, required=True, help="polygon vertex count")
    if need_m:
        sub.add_argument("--m", type=int, required=True, help="dimer order (m >= 2)")
    sub.add_argument("--diagonals", help="comma-separated a-b diagonal pairs")
    sub.add_argument(
        "--fan",
        nargs="?",
        const="",
        default=None,
        metavar="APEX",
        help="fan triangulation (optionally with apex)",
    )


def _add_budget(sub):
    sub.add_argument(
        "--budget-visited",
        type=int,
        default=None,
        help=f"max visited paths per equality query (default {default_max_visited()})",
    )
    sub.add_argument(
        "--budget-length", type=int, default=None, help="max intermediate path length"
    )


def cmd_build(args) -> int:
    T = _triangulation_from_args(args)
    Q = dual_quiver(reduce_dimer(build_dimer(T, args.m)))
    if args.format == "dot":
        if args.what == "quiver":
            sys.stdout.write(Q.to_dot())
        else:
            raise CliError("DOT output is only available for the quiver")
        return EXIT_OK
    out = {"version": __version__, "triangulation": T.to_json()}
    if args.what in ("dimer", "both"):
        out["dimer"] = reduce_dimer(build_dimer(T, args.m)).to_json()
    if args.what in ("quiver", "both"):
        out["quiver"] = Q.to_json()
    _emit(out)
    return EXIT_OK


def cmd_verify(args) -> int:
    T = _triangulation_from_args(args)
    budget = _budget_from_args(args)
    outcome = verify_boundary_algebra(
        T, args.m, budget=budget, allow_reflection=args.reflect
    )
    _emit(
        {
            "version": __version__,
            "budget": _budget_json(budget),
            "outcome": outcome.to_json(),
        }
    )
    if outcome.inconclusive:
        return EXIT_INCONCLUSIVE
    return EXIT_OK if outcome.passed else EXIT_FAILED


def _budget_json(budget: SearchBudget | None) -> dict:
    if budget is None:
        return {"max_visited": default_max_visited(), "max_path_length": "per-query"}
    return {
        "max_visited": budget.max_visited,
        "max_path_length": budget.max_path_length,
    }


def _sweep_row(task) -> dict:
    import time

    n, m, index, diagonals, budget_tuple, reflect, timings = task
    T = Triangulation(n, [tuple(d) for d in diagonals])
    budget = SearchBudget(*budget_tuple) if budget_tuple else None
    t0 = time.monotonic()
    outcome = verify_boundary_algebra(T, m, budget=budget, allow_reflection=reflect)
    row = {
        "n": n,
        "m": m,
        "index": index,
        "diagonals": [list(d) for d in T.sorted_diagonals],
        "matched": outcome.matched,
        "generators": outcome.generator_count,
        "relations": outcome.relations.passed if outcome.relations else False,
        "central_element": outcome.central.passed if outcome.central else False,
        "inconclusive": outcome.inconclusive,
        "passed": outcome.passed,
    }
    if timings:
        # runtimes are excluded in canonical mode so reports stay byte-identical
        row["runtime_ms"] = round(1000 * (time.monotonic() - t0), 3)
    return row


def cmd_sweep(args) -> int:
    budget = _budget_from_args(args)
    budget_tuple = (
        (budget.max_path_length, budget.max_visited) if budget is not None else None
    )
    tasks = []
    for m in args.m:
        for n in range(3, args.max_n + 1):
            for index, T in enumerate(enumerate_triangulations(n)):
                tasks.append(
                    (
                        n,
                        m,
                        index,
                        [list(d) for d in T.sorted_diagonals],
                        budget_tuple,
                        args.reflect,
                        args.timings,
                    )
                )
    if args.workers > 1 and tasks:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(_sweep_row, tasks))
    else:
        rows = [_sweep_row(t) for t in tasks]
    rows.sort(key=lambda r: (r["m"], r["n"], r["index"]))
    report = {
        "version": __version__,
        "budget": _budget_json(budget),
        "grid": {"max_n": args.max_n, "m": sorted(args.m)},
        "rows": rows,
        "all_matched": all(r["passed"] for r in rows),
    }
    _emit(report)
    if any(r["inconclusive"] for r in rows):
        return EXIT_INCONCLUSIVE
    return EXIT_OK if report["all_matched"] else EXIT_FAILED


def cmd_gamma(args) -> int:
    G = build_gamma(args.m, args.n)
    if args.format == "dot":
        sys.stdout.write(G.to_dot())
    else:
        _emit({"version": __version__, "gamma": G.to_json()})
    return EXIT_OK


def cmd_flip_check(args) -> int:
    T = _triangulation_from_args(args)
    try:
        d = normalize_diagonal(args.n, tuple(int(x) for x in args.flip.split("-")))
    except (ValueError, PolygonError) as exc:
        raise CliError(f"bad flip diagonal {args.flip!r}: {exc}")
    budget = _budget_from_args(args)
    cert = verify_flip_transport(T, d, args.m, budget=budget)
    _emit(
        {
            "version": __version__,
            "budget": _budget_json(budget),
            "certificate": cert.to_json(),
        }
    )
    if cert.inconclusive:
        return EXIT_INCONCLUSIVE
    return EXIT_OK if cert.ok else EXIT_FAILED


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dimerlab",
        description="GL_m-dimer models of polygon triangulations and their boundary algebras",
    )
    parser.add_argument("--version", action="version", version=f"dimerlab {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    b = subs.add_parser("build", help="emit the (reduced) dimer and/or dual quiver")
    _add_common(b)
    b.add_argument("--what", choices=["dimer", "quiver", "both"], default="quiver")
    b.add_argument("--format", choices=["json", "dot"], default="json")
    b.set_defaults(func=cmd_build)

    v = subs.add_parser("verify", help="verify one triangulation against Gamma(m, n)")
    _add_common(v)
    _add_budget(v)
    v.add_argument("--reflect", action="store_true", help="also try reflected matchings")
    v.set_defaults(func=cmd_verify)

    s = subs.add_parser("sweep", help="verify every triangulation of a grid")
    s.add_argument("--max-n", type=int, required=True)
    s.add_argument("--m", type=int, nargs="+", required=True)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--reflect", action="store_true")
    s.add_argument(
        "--timings",
        action="store_true",
        help="include per-row runtimes (leaves canonical byte-identical mode)",
    )
    _add_budget(s)
    s.set_defaults(func=cmd_sweep)

    g = subs.add_parser("gamma", help="print the canonical quiver Gamma(m, n)")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--format", choices=["json", "dot"], default="json")
    g.set_defaults(func=cmd_gamma)

    f = subs.add_parser("flip-check", help="certify flip transport of the presentation")
    _add_common(f)
    _add_budget(f)
    f.add_argument("--flip", required=True, metavar="A-B", help="diagonal to flip")
    f.set_defaults(func=cmd_flip_check)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InconclusivePresentationError as exc:
        sys.stderr.write(f"inconclusive: {exc}\n")
        return EXIT_INCONCLUSIVE
    except (
        CliError,
        PolygonError,
        DimerError,
        QuiverError,
        RewriteError,
        BoundaryError,
    ) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
