"""Command-line entry point: file formats, searches, classification, reports.

Exit codes: 0 found / true / pass, 1 none / false / refuted, 2 usage or
input error, 3 budget exceeded or undetermined.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from .algebra import format_op, write_op
from .classify import (
    BOUNDED_WIDTH,
    NP_COMPLETE,
    NOT_TAYLOR,
    TAYLOR,
    classify_digraph,
    classify_special_tree,
    compute_core,
    verify_lemma_suite,
)
from .digraph import DEFAULT_POWER_BUDGET, read_dg, write_dg
from .errors import BudgetExceeded, HcolorError
from .homsolver import arc_consistency, build_instance, consistency_23, solve_instance
from .minpath import OrientedPath
from .polysearch import (
    DEFAULT_INDICATOR_BUDGET,
    find_majority,
    find_siggers,
    find_tsi,
    find_wnu,
)
from .spectree import (
    compile_tree,
    format_roles,
    format_stree,
    gen_random_special_tree,
    read_stree,
    write_stree,
)

FORMAT_VERSION = 1

EXIT_FOUND = 0
EXIT_NONE = 1
EXIT_ERROR = 2
EXIT_BUDGET = 3


@dataclass(frozen=True)
class RunConfig:
    """Budgets and reporting knobs shared by the subcommands."""

    seed: int = 0
    node_budget: int | None = None
    indicator_budget: int = DEFAULT_INDICATOR_BUDGET
    power_budget: int = DEFAULT_POWER_BUDGET
    wall_budget: float | None = None
    json_out: str | None = None
    threads: int = 1

    def __post_init__(self) -> None:
        for name in ("indicator_budget", "power_budget"):
            if getattr(self, name) <= 0:
                raise HcolorError(f"{name} must be positive")
        if self.node_budget is not None and self.node_budget < 0:
            raise HcolorError("node budget must be nonnegative")
        if self.threads < 1:
            raise HcolorError("thread count must be positive")


def _config(args) -> RunConfig:
    return RunConfig(
        seed=getattr(args, "seed", 0),
        node_budget=getattr(args, "budget_nodes", None),
        indicator_budget=getattr(args, "budget_indicator", None) or DEFAULT_INDICATOR_BUDGET,
        power_budget=getattr(args, "budget_power", None) or DEFAULT_POWER_BUDGET,
        wall_budget=getattr(args, "budget_wall", None),
        json_out=getattr(args, "json", None),
        threads=getattr(args, "threads", 1),
    )


def _emit_json(payload: dict, path: str | None) -> None:
    payload = {"format_version": FORMAT_VERSION, **payload}
    text = json.dumps(payload, indent=2) + "\n"
    if path:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_build(args) -> int:
    spec = read_stree(args.tree)
    tree = compile_tree(spec)
    write_dg(args.out, tree.digraph)
    roles_path = args.roles or (args.out + ".roles" if not args.out.endswith(".dg")
                                else args.out[:-3] + ".roles")
    with open(roles_path, "w", encoding="ascii") as fh:
        fh.write(format_roles(tree))
    print(f"wrote {args.out} ({tree.digraph.vertex_count} vertices) and {roles_path}")
    return EXIT_FOUND


def _parse_pins(items) -> dict[int, int]:
    pins = {}
    for item in items or []:
        var, _, val = item.partition("=")
        pins[int(var)] = int(val)
    return pins


def _cmd_solve(args) -> int:
    cfg = _config(args)
    x = read_dg(args.input)
    h = read_dg(args.target)
    pins = _parse_pins(args.pin)
    inst = build_instance(x, h, pins)
    if args.method == "bt":
        found = solve_instance(inst, cfg.node_budget)
        if found is None:
            print("no homomorphism")
            return EXIT_NONE
        for var, val in enumerate(found):
            print(f"{var} {val}")
        return EXIT_FOUND
    if args.method == "ac":
        reduced = arc_consistency(inst)
        if reduced is None:
            print("refuted by support filtering")
            return EXIT_NONE
        for var, dom in enumerate(reduced.domains):
            vals = [str(v) for v in range(h.vertex_count) if dom >> v & 1]
            print(f"{var} {{{','.join(vals)}}}")
        return EXIT_FOUND
    family = consistency_23(inst)
    if family is None:
        print("refuted by pair consistency")
        return EXIT_NONE
    print(f"consistent ({len(family)} variable pairs)")
    return EXIT_FOUND


def _cmd_poly(args) -> int:
    cfg = _config(args)
    h = read_dg(args.target)
    kind = args.kind
    if kind == "wnu":
        table = find_wnu(h, args.arity or 3, cfg.indicator_budget, cfg.node_budget)
    elif kind == "majority":
        table = find_majority(h, cfg.indicator_budget, cfg.node_budget)
    elif kind == "siggers":
        table = find_siggers(h, cfg.indicator_budget, cfg.node_budget)
    else:
        table = find_tsi(h, args.arity or 2, cfg.indicator_budget, cfg.node_budget)
    if table is None:
        print(f"no {kind} polymorphism")
        return EXIT_NONE
    if args.out:
        write_op(args.out, table)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(format_op(table))
    return EXIT_FOUND


def _cmd_classify(args) -> int:
    cfg = _config(args)
    if args.tree:
        spec = read_stree(args.tree)
        report = classify_special_tree(
            spec, cfg.node_budget, cfg.indicator_budget, cfg.seed, cfg.wall_budget)
    else:
        g = read_dg(args.input)
        report = classify_digraph(g, cfg.node_budget, cfg.indicator_budget, cfg.seed)
    _emit_json(report.to_dict(), cfg.json_out)
    if report.verdict in (BOUNDED_WIDTH, TAYLOR):
        return EXIT_FOUND
    if report.verdict in (NP_COMPLETE, NOT_TAYLOR):
        return EXIT_NONE
    return EXIT_BUDGET


def _cmd_core(args) -> int:
    cfg = _config(args)
    g = read_dg(args.input)
    result = compute_core(g, cfg.node_budget)
    if args.out:
        write_dg(args.out, result.core)
    print(f"core size {result.core.vertex_count}")
    for v, c in enumerate(result.retraction):
        print(f"{v} {c}")
    return EXIT_FOUND


def _cmd_verify(args) -> int:
    cfg = _config(args)
    if args.suite != "lemmas":
        raise HcolorError(f"unknown suite {args.suite!r}")
    spec = read_stree(args.tree)
    report = verify_lemma_suite(
        spec, cfg.seed, cfg.indicator_budget, cfg.node_budget, cfg.power_budget)
    _emit_json(report, cfg.json_out)
    failed = [k for k, v in report.items()
              if isinstance(v, str) and v.startswith("fail")]
    return EXIT_NONE if failed else EXIT_FOUND


def _cmd_gen(args) -> int:
    spec = gen_random_special_tree(
        args.seed, args.a, args.b, args.height, args.max_path_len)
    if args.out:
        write_stree(args.out, spec)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(format_stree(spec))
    return EXIT_FOUND


def _cmd_convert(args) -> int:
    if args.path:
        g = OrientedPath(args.path).to_digraph()
    else:
        g = compile_tree(read_stree(args.tree)).digraph
    write_dg(args.out, g)
    print(f"wrote {args.out} ({g.vertex_count} vertices)")
    return EXIT_FOUND


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hcolor",
        description="Special oriented trees: homomorphisms, polymorphisms, dichotomy")
    sub = parser.add_subparsers(dest="command", required=True)

    def budgets(p, wall=False):
        p.add_argument("--budget-nodes", type=int, default=None)
        p.add_argument("--budget-indicator", type=int, default=None)
        p.add_argument("--budget-power", type=int, default=None)
        if wall:
            p.add_argument("--budget-wall", type=float, default=None)
        p.add_argument("--threads", type=int, default=1)

    p = sub.add_parser("build", help="compile a tree template to a digraph")
    p.add_argument("--tree", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--roles", default=None)
    p.set_defaults(fn=_cmd_build)

    p = sub.add_parser("solve", help="decide a homomorphism instance")
    p.add_argument("--input", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--pin", action="append", metavar="VAR=VAL")
    p.add_argument("--method", choices=["bt", "ac", "23"], default="bt")
    budgets(p)
    p.set_defaults(fn=_cmd_solve)

    p = sub.add_parser("poly", help="search for a polymorphism")
    p.add_argument("--target", required=True)
    p.add_argument("--kind", choices=["wnu", "siggers", "majority", "tsi"],
                   required=True)
    p.add_argument("--arity", type=int, default=None)
    p.add_argument("--out", default=None)
    budgets(p)
    p.set_defaults(fn=_cmd_poly)

    p = sub.add_parser("classify", help="run the dichotomy pipeline")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--tree")
    group.add_argument("--input")
    p.add_argument("--json", default=None)
    p.add_argument("--seed", type=int, default=0)
    budgets(p, wall=True)
    p.set_defaults(fn=_cmd_classify)

    p = sub.add_parser("core", help="compute the core of a digraph")
    p.add_argument("--input", required=True)
    p.add_argument("--out", default=None)
    budgets(p)
    p.set_defaults(fn=_cmd_core)

    p = sub.add_parser("verify", help="run instance checks on a tree")
    p.add_argument("--tree", required=True)
    p.add_argument("--suite", default="lemmas")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", default=None)
    budgets(p)
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("gen", help="generate a seeded random tree template")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--max-path-len", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_gen)

    p = sub.add_parser("convert", help="convert a path literal or template to .dg")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--path")
    group.add_argument("--tree")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_convert)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else 0
    if getattr(args, "max_path_len", None) is None and args.command == "gen":
        args.max_path_len = args.height + 4
    try:
        return args.fn(args)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except HcolorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def entry() -> None:
    sys.exit(main())
