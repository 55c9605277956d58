"""Command-line front end: generators -> analyses -> JSON/DOT reports.

Subcommands: analyze | rauzy | evolve | exitwords | density | abstract | xi.
Every JSON report embeds the schema version, tool version, and the
configuration it was produced with; repeated runs are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .abstract_graphs import (
    abstract_dot,
    bound_check,
    coloring_from_json,
    graph_from_json,
    itinerary_check,
    itinerary_from_json,
    Loop,
    random_graph_with_loops,
    search_colorings,
    validate,
    xi_dot,
    build_xi,
)
from .density import special_density_floor, special_window_check, density_estimate
from .errors import HorizonExceeded, ShiftlabError
from .exitwords import decompose, enumerate_exit_words
from .generators import (
    iet_encode,
    oracle_from_prefix,
    read_iet_file,
    read_sequence_file,
    read_substitution_file,
    rotation_coding,
    substitution_fixed_point,
)
from .language import analysis_report
from .rauzy import build_rauzy, build_special_rauzy, evolve, rauzy_dot, special_rauzy_dot
from .words import minimal_step

SCHEMA_VERSION = 1


def _envelope(args: argparse.Namespace, payload: dict) -> dict:
    config = {
        k: (str(v) if isinstance(v, Path) else v)
        for k, v in sorted(vars(args).items())
        if k != "func" and v is not None
    }
    return {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "config": config,
        **payload,
    }


def _emit(args: argparse.Namespace, text: str, default_name: str) -> None:
    out = getattr(args, "out", None)
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    if path.is_dir():
        path = path / default_name
    path.write_text(text)


def _emit_json(args: argparse.Namespace, payload: dict, default_name: str) -> None:
    _emit(
        args,
        json.dumps(_envelope(args, payload), indent=2, sort_keys=True) + "\n",
        default_name,
    )


def _load_prefix(args: argparse.Namespace):
    chosen = [
        k
        for k in ("substitution", "iet", "rotation", "seq")
        if getattr(args, k, None)
    ]
    if len(chosen) != 1:
        raise ValueError(
            "choose exactly one input: --substitution, --iet, --rotation, --seq"
        )
    length = args.length or max(4 * args.horizon, 2000)
    kind = chosen[0]
    if kind == "substitution":
        spec = read_substitution_file(args.substitution)
        return substitution_fixed_point(spec, length)
    if kind == "iet":
        spec = read_iet_file(args.iet)
        prefix, _ = iet_encode(spec, length)
        return prefix
    if kind == "rotation":
        return rotation_coding(Fraction(args.rotation), length)
    return read_sequence_file(args.seq)


def _load_oracle(args: argparse.Namespace):
    prefix = _load_prefix(args)
    return prefix, oracle_from_prefix(prefix, args.horizon)


# -- subcommands -------------------------------------------------------------


def cmd_analyze(args: argparse.Namespace) -> int:
    _, oracle = _load_oracle(args)
    _emit_json(args, analysis_report(oracle, n_min=args.n or 1), "analysis.json")
    return 0


def cmd_rauzy(args: argparse.Namespace) -> int:
    _, oracle = _load_oracle(args)
    n = args.n
    if n is None:
        raise ValueError("rauzy needs --n")
    g = build_rauzy(oracle, n)
    sg = build_special_rauzy(oracle, n)
    if args.format == "json":
        payload = {
            "n": n,
            "factor_graph": {
                "vertices": len(g.vertices),
                "edges": len(g.edges),
            },
            "special_graph": {
                "vertices": sg.vertex_count,
                "edges": sg.edge_count,
            },
        }
        _emit_json(args, payload, f"rauzy_n{n}.json")
        return 0
    text = rauzy_dot(g, oracle) + special_rauzy_dot(sg, oracle)
    _emit(args, text, f"rauzy_n{n}.dot")
    return 0


def cmd_evolve(args: argparse.Namespace) -> int:
    _, oracle = _load_oracle(args)
    n = args.n
    if n is None:
        raise ValueError("evolve needs --n")
    n_max = args.n_max or (oracle.horizon - 4)
    steps = []
    dots = []
    while n <= n_max:
        try:
            step = evolve(oracle, n)
        except HorizonExceeded:
            break
        if step.n_prime > n_max:
            break
        steps.append(
            {
                "n": step.n,
                "bispecial_length": step.n_tilde,
                "n_prime": step.n_prime,
                "rbs_events": [str(w) for w in step.rbs_events],
                "profile_preserved": step.profile_preserved,
                "vertices": step.after.vertex_count,
                "edges": step.after.edge_count,
            }
        )
        dots.append(special_rauzy_dot(step.after, oracle, name=f"step_{step.n_prime}"))
        n = step.n_prime
    if args.format == "dot":
        _emit(args, "".join(dots), "evolution.dot")
    else:
        _emit_json(args, {"steps": steps}, "evolution.json")
    return 0


def cmd_exitwords(args: argparse.Namespace) -> int:
    prefix, oracle = _load_oracle(args)
    if not args.w:
        raise ValueError("exitwords needs --w")
    w = oracle.alphabet.word(args.w)
    payload: dict = {}
    if args.q is None:
        q = minimal_step(w, oracle)
        if q is None:
            raise ValueError(f"{args.w} has no valid step; pass --q explicitly")
    else:
        q = args.q
    report = enumerate_exit_words(w, q, oracle, cap=args.cap)
    payload["enumeration"] = report.to_json()
    if args.z:
        z = oracle.alphabet.word(args.z)
        payload["decomposition"] = {
            "z": args.z,
            "q": q,
            "representations": [
                {"p": str(r.p), "r": r.r, "s": str(r.s)}
                for r in decompose(z, w, q, oracle)
            ],
        }
    _emit_json(args, payload, "exitwords.json")
    return 0


def cmd_density(args: argparse.Namespace) -> int:
    prefix, oracle = _load_oracle(args)
    if args.n is None:
        raise ValueError("density needs --n")
    from .language import growth_profile

    profile = growth_profile(oracle)
    K = args.k or profile.K
    if K is None:
        raise ValueError("growth is not constant within horizon; pass --k")
    payload: dict = {"K": K}
    if args.word:
        w = oracle.alphabet.word(args.word)
        payload["density"] = density_estimate(w, prefix, K).to_json()
    if args.special:
        side = args.side or "left"
        rep = special_density_floor(
            oracle, prefix, args.n, side, K, tolerance=args.theta_tol
        )
        payload["floor"] = rep.to_json()
    if args.window_check:
        wc = special_window_check(oracle, prefix, args.n, K)
        payload["window_check"] = {
            "ok": wc.ok,
            "windows": wc.windows,
            "first_failure": list(wc.first_failure) if wc.first_failure else None,
        }
    if args.color:
        from .density import color_estimate
        from .words import Word

        side = args.side or "left"
        ladder = []
        for m in range(args.n, min(args.n + 8, oracle.horizon - 2) + 1):
            specials = sorted(oracle.special_strings(m, side))
            if specials:
                ladder.append(Word(oracle.alphabet, specials[0]))
        candidates = {"self": prefix}
        for item in args.candidate or ():
            label, _, path = item.partition("=")
            candidates[label] = read_sequence_file(path)
        ce = color_estimate(ladder, candidates, K, threshold=args.theta)
        payload["color"] = ce.to_json()
    _emit_json(args, payload, "density.json")
    return 0


def cmd_abstract(args: argparse.Namespace) -> int:
    if args.graph:
        obj = json.loads(Path(args.graph).read_text())
        g = graph_from_json(obj["graph"] if "graph" in obj else obj)
        coloring = (
            coloring_from_json(obj["coloring"]) if "coloring" in obj else None
        )
        loops = {
            lab: Loop(tuple(edges))
            for lab, edges in obj.get("loops", {}).items()
        }
    elif args.random:
        rng = random.Random(args.seed)
        g, loops = random_graph_with_loops(rng)
        coloring = None
    else:
        raise ValueError("abstract needs --graph FILE or --random")
    rep = validate(g, coloring)
    payload = {
        "validation": {
            "ok": rep.ok,
            "violations": list(rep.violations),
            "K": rep.K,
            "K_left": rep.K_left,
            "K_right": rep.K_right,
        }
    }
    if loops:
        payload["bound"] = bound_check(g, loops).to_json()
    if args.search:
        res = search_colorings(g, args.search)
        payload["search"] = {
            "target": args.search,
            "found": res.found is not None,
            "loops": {lab: list(lp.edges) for lab, lp in res.found[1].items()}
            if res.found
            else None,
            "exhausted": res.exhausted,
            "note": res.note,
        }
    if args.format == "dot":
        _emit(args, abstract_dot(g, coloring, loops or None), "abstract.dot")
    else:
        _emit_json(args, payload, "abstract.json")
    return 0


def cmd_xi(args: argparse.Namespace) -> int:
    if not args.itinerary:
        raise ValueError("xi needs --itinerary FILE")
    obj = json.loads(Path(args.itinerary).read_text())
    it = itinerary_from_json(obj)
    verdict = itinerary_check(it)
    payload: dict = {
        "itinerary_valid": verdict.ok,
        "violations": list(verdict.violations),
    }
    report = bound_check(it.graphs[0], it.partitions[0], it)
    payload["bound"] = report.to_json()
    if args.format == "dot":
        xi = build_xi(it.graphs[0], it.partitions[0], it.twist_shrink_moves())
        _emit(args, xi_dot(xi), "xi.dot")
    else:
        _emit_json(args, payload, "xi.json")
    return 0


# -- argument parsing ---------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shiftlab",
        description="Symbolic-dynamics workbench: factor languages, "
        "branching graphs, exit words, block densities, loop bounds.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, inputs: bool = True) -> None:
        p.add_argument("--out", help="output file or directory (default stdout)")
        p.add_argument("--format", choices=("json", "dot"), default="json")
        p.add_argument("--seed", type=int, default=0)
        if inputs:
            p.add_argument("--horizon", type=int, default=24)
            p.add_argument("--length", type=int, help="prefix/orbit length")
            p.add_argument("--substitution", help="substitution spec JSON file")
            p.add_argument("--iet", help="interval exchange spec JSON file")
            p.add_argument("--rotation", help="rotation number p/q")
            p.add_argument("--seq", help="sequence file")

    p = sub.add_parser("analyze", help="growth / regular-bispecial / periodicity report")
    add_common(p)
    p.add_argument("--n", type=int, help="least length for the bispecial scan")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("rauzy", help="factor graph and its branching skeleton")
    add_common(p)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_rauzy)

    p = sub.add_parser("evolve", help="evolve the branching skeleton across lengths")
    add_common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--n-max", type=int, dest="n_max")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("exitwords", help="enumerate and decompose exit words")
    add_common(p)
    p.add_argument("--w", required=True, help="base word (token string)")
    p.add_argument("--q", type=int, help="step (default: minimal step)")
    p.add_argument("--z", help="word to decompose")
    p.add_argument("--cap", type=int, help="length cap for enumeration")
    p.set_defaults(func=cmd_exitwords)

    p = sub.add_parser("density", help="block densities and the special floor")
    add_common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, help="branching constant override")
    p.add_argument("--word", help="single word to estimate")
    p.add_argument("--special", action="store_true", help="special-word floor")
    p.add_argument("--side", choices=("left", "right"))
    p.add_argument("--theta", type=float, dest="theta",
                   help="color threshold (default 1/(4K))")
    p.add_argument("--theta-tol", type=float, dest="theta_tol", default=0.05)
    p.add_argument(
        "--window-check", action="store_true", dest="window_check",
        help="exact special-in-every-window check",
    )
    p.add_argument("--color", action="store_true",
                   help="threshold color estimate for the special ladder")
    p.add_argument("--candidate", action="append",
                   help="extra candidate sequence as label=path (repeatable)")
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("abstract", help="validate/search abstract branching graphs")
    add_common(p, inputs=False)
    p.add_argument("--graph", help="graph JSON file (graph/coloring/loops)")
    p.add_argument("--random", action="store_true", help="generate a random instance")
    p.add_argument("--search", type=int, help="search for this many disjoint colored loops")
    p.set_defaults(func=cmd_abstract)

    p = sub.add_parser("xi", help="loop-quotient connectivity and the loop bound")
    add_common(p, inputs=False)
    p.add_argument("--itinerary", help="itinerary JSON file")
    p.set_defaults(func=cmd_xi)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except HorizonExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ShiftlabError, ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
