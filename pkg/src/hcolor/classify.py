"""Core computation and the dichotomy pipeline for special trees.

A core special tree either has no Siggers polymorphism (its coloring
problem is NP-complete) or has one, in which case a Taylor special tree is
congruence meet-semidistributive and the problem has bounded width.  The
classifier computes the core, certifies it is again a special tree, runs
the Siggers search on it, and reports the verdict with timings.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from itertools import product
from math import lcm

from .algebra import (
    eval_term,
    extend_wnu,
    find_singleton_absorber,
    is_polymorphism,
    is_wnu,
    make_special,
    s_set,
    star_table,
    verify_preceq_absorption,
)
from .digraph import Digraph, compute_levels, diagonal_component, power_index
from .errors import (
    BudgetExceeded,
    ConstructionStuck,
    HcolorError,
    NoneFound,
    NotBalanced,
)
from .homsolver import is_homomorphism, solve_hom
from .polysearch import (
    DEFAULT_INDICATOR_BUDGET,
    find_majority,
    find_siggers,
    find_wnu,
    find_wnu_on_top_bottom,
)
from .spectree import (
    SpecialTree,
    SpecialTreeSpec,
    compile_tree,
    e_neighborhood,
    preceq,
)

NP_COMPLETE = "NP_COMPLETE"
BOUNDED_WIDTH = "BOUNDED_WIDTH"
UNDETERMINED = "UNDETERMINED"
TAYLOR = "TAYLOR"
NOT_TAYLOR = "NOT_TAYLOR"


@dataclass(frozen=True)
class CoreResult:
    """A certified core with the maps both ways."""

    core: Digraph
    retraction: tuple[int, ...]  # original vertex -> core vertex
    embedding: tuple[int, ...]  # core vertex -> original vertex


def _quotient(g: Digraph, u: int, v: int) -> tuple[Digraph, tuple[int, ...]]:
    """Identify v with u; parallel edges collapse."""
    mapping = []
    nxt = 0
    for w in range(g.vertex_count):
        if w == v:
            mapping.append(None)  # filled below
            continue
        mapping.append(nxt)
        nxt += 1
    mapping[v] = mapping[u]
    edges = {(mapping[a], mapping[b]) for a, b in g.edges}
    return Digraph.from_edges(g.vertex_count - 1, edges), tuple(mapping)


def _level_groups(g: Digraph) -> list[int] | None:
    try:
        return list(compute_levels(g).levels)
    except (NotBalanced, ValueError):
        return None


def _proper_endomorphism(g: Digraph, node_budget: int | None) -> tuple[int, ...] | None:
    """An endomorphism identifying some vertex pair, or None.

    On connected balanced digraphs endomorphisms preserve levels exactly,
    so only same-level pairs can ever merge.
    """
    levels = _level_groups(g)
    for u in range(g.vertex_count):
        for v in range(u + 1, g.vertex_count):
            if levels is not None and levels[u] != levels[v]:
                continue
            q, mapping = _quotient(g, u, v)
            hom = solve_hom(q, g, node_budget=node_budget)
            if hom is not None:
                endo = tuple(hom[mapping[w]] for w in range(g.vertex_count))
                assert is_homomorphism(g, g, endo)
                return endo
    return None


def _idempotent_power(endo: tuple[int, ...]) -> tuple[int, ...]:
    """The power of the endomorphism that is a retraction (f o f = f).

    After n iterations the image has stabilized and the map permutes it;
    raising to the least common multiple of that permutation's cycle
    lengths fixes the image pointwise.
    """
    n = len(endo)
    f = list(range(n))
    for _ in range(n):
        f = [endo[x] for x in f]
    image = sorted(set(f))
    d = 1
    seen: set[int] = set()
    for start in image:
        if start in seen:
            continue
        length = 0
        x = start
        while True:
            seen.add(x)
            x = f[x]
            length += 1
            if x == start:
                break
        d = lcm(d, length)
    r = list(range(n))
    for _ in range(d):
        r = [f[x] for x in r]
    assert all(r[r[x]] == r[x] for x in range(n))
    return tuple(r)


def compute_core(g: Digraph, node_budget: int | None = None) -> CoreResult:
    """Iterated proper retractions down to a structure with none left.

    Each step finds a vertex-identifying endomorphism, converts it into an
    idempotent retraction, and restricts to its image; the final exhaustive
    failed sweep certifies minimality.
    """
    current = g
    overall = tuple(range(g.vertex_count))  # original vertex -> current vertex
    embedding = tuple(range(g.vertex_count))  # current vertex -> original vertex
    while True:
        endo = _proper_endomorphism(current, node_budget)
        if endo is None:
            break
        retr = _idempotent_power(endo)
        assert is_homomorphism(current, current, retr)
        image = sorted(set(retr))
        relabel = {w: i for i, w in enumerate(image)}
        edges = {(relabel[a], relabel[b]) for a, b in current.edges
                 if a in relabel and b in relabel}
        current = Digraph.from_edges(len(image), edges)
        overall = tuple(relabel[retr[w]] for w in overall)
        embedding = tuple(embedding[w] for w in image)
    assert is_homomorphism(g, current, overall)
    assert is_homomorphism(current, g, embedding)
    return CoreResult(current, overall, embedding)


def spec_from_core(core: Digraph) -> SpecialTreeSpec:
    """Re-read a digraph as a special-tree template; raises if it is not one."""
    from .spectree import _attached_paths

    levels = compute_levels(core)
    h = levels.height
    a_list = sorted(v for v in range(core.vertex_count) if levels[v] == 0)
    b_list = sorted(v for v in range(core.vertex_count) if levels[v] == h)
    a_index = {v: i for i, v in enumerate(a_list)}
    b_index = {v: j for j, v in enumerate(b_list)}
    attached = _attached_paths(core, levels, h)
    edges = tuple((a_index[a], b_index[b], p) for a, b, p in attached)
    return SpecialTreeSpec(len(a_list), len(b_list), h, edges)


@dataclass
class ClassificationReport:
    """Classifier outcome.

    is_core records that the Taylor decision ran on a certified core
    (compute_core finished and its minimality sweep passed).
    """

    input_summary: dict
    is_core: bool
    core_size: int
    taylor: str
    width_certificates: dict
    verdict: str
    timings: dict
    seeds: dict

    def to_dict(self) -> dict:
        return {
            "input_summary": self.input_summary,
            "is_core": self.is_core,
            "core_size": self.core_size,
            "taylor": self.taylor,
            "width_certificates": self.width_certificates,
            "verdict": self.verdict,
            "timings": self.timings,
            "seeds": self.seeds,
        }


def classify_special_tree(spec: SpecialTreeSpec,
                          node_budget: int | None = None,
                          indicator_budget: int = DEFAULT_INDICATOR_BUDGET,
                          seed: int = 0,
                          wall_budget: float | None = None) -> ClassificationReport:
    """Compile, take the core, decide Taylor via the Siggers search.

    Refuted on the core means NP-complete; found means bounded width for a
    special tree.  Budget exhaustion folds into UNDETERMINED.  The wall
    budget is advisory: it is consulted between stages only.
    """
    started = time.perf_counter()

    def wall_left() -> bool:
        return wall_budget is None or time.perf_counter() - started < wall_budget

    timings: dict[str, float] = {}
    width: dict[str, str] = {}
    tree = compile_tree(spec)
    summary = {
        "vertices": tree.digraph.vertex_count,
        "edges": len(tree.digraph.edges),
        "height": spec.height,
        "a_count": spec.a_count,
        "b_count": spec.b_count,
    }
    t0 = time.perf_counter()
    try:
        core_result = compute_core(tree.digraph, node_budget)
    except BudgetExceeded:
        timings["core"] = time.perf_counter() - t0
        return ClassificationReport(
            summary, False, -1, "budget_exceeded", width, UNDETERMINED,
            timings, {"seed": seed})
    timings["core"] = time.perf_counter() - t0
    core = core_result.core
    try:
        core_spec = spec_from_core(core)  # certifies the core is a special tree
    except HcolorError as exc:
        return ClassificationReport(
            summary, True, core.vertex_count, "not_attempted", width,
            UNDETERMINED, timings, {"seed": seed, "diagnostic": str(exc)})

    t0 = time.perf_counter()
    try:
        if not wall_left():
            raise BudgetExceeded("wall budget")
        maj = find_majority(core, indicator_budget, node_budget)
        width["majority"] = "found" if maj is not None else "none"
        if maj is not None:
            width["wnu3"] = "found"  # a majority operation is itself a WNU
        elif wall_left():
            wnu3 = find_wnu(core, 3, indicator_budget, node_budget)
            width["wnu3"] = "found" if wnu3 is not None else "none"
        else:
            width["wnu3"] = "budget_exceeded"
    except BudgetExceeded:
        width.setdefault("majority", "budget_exceeded")
        width.setdefault("wnu3", "budget_exceeded")
    timings["width_certificates"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    try:
        if not wall_left():
            raise BudgetExceeded("wall budget")
        sig = find_siggers(core, indicator_budget, node_budget)
        taylor = "siggers_found" if sig is not None else "refuted"
    except BudgetExceeded:
        taylor = "budget_exceeded"
    timings["siggers"] = time.perf_counter() - t0

    if taylor == "siggers_found":
        verdict = BOUNDED_WIDTH
    elif taylor == "refuted":
        verdict = NP_COMPLETE
    else:
        verdict = UNDETERMINED
    return ClassificationReport(
        summary, True, core.vertex_count, taylor, width, verdict,
        timings, {"seed": seed, "core_height": core_spec.height})


def classify_digraph(g: Digraph,
                     node_budget: int | None = None,
                     indicator_budget: int = DEFAULT_INDICATOR_BUDGET,
                     seed: int = 0) -> ClassificationReport:
    """Same pipeline for arbitrary digraphs; the verdict is capped at the
    Taylor / not-Taylor distinction."""
    timings: dict[str, float] = {}
    summary = {"vertices": g.vertex_count, "edges": len(g.edges)}
    t0 = time.perf_counter()
    try:
        core_result = compute_core(g, node_budget)
    except BudgetExceeded:
        timings["core"] = time.perf_counter() - t0
        return ClassificationReport(
            summary, False, -1, "budget_exceeded", {}, UNDETERMINED,
            timings, {"seed": seed})
    timings["core"] = time.perf_counter() - t0
    core = core_result.core
    t0 = time.perf_counter()
    try:
        sig = find_siggers(core, indicator_budget, node_budget)
        taylor = "siggers_found" if sig is not None else "refuted"
    except BudgetExceeded:
        taylor = "budget_exceeded"
    timings["siggers"] = time.perf_counter() - t0
    verdict = {"siggers_found": TAYLOR, "refuted": NOT_TAYLOR,
               "budget_exceeded": UNDETERMINED}[taylor]
    return ClassificationReport(
        summary, True, core.vertex_count, taylor, {}, verdict,
        timings, {"seed": seed})


def _check_diagonal_containment(tree: SpecialTree, n: int, budget: int) -> str:
    size = tree.digraph.vertex_count
    if size ** n > budget:
        return "skipped: power exceeds budget"
    delta = diagonal_component(tree.digraph, n, budget)
    for side in (tree.a_vertices, tree.b_vertices):
        for tup in product(sorted(side), repeat=n):
            if power_index(size, tup) not in delta:
                return f"fail: tuple {tup} outside the diagonal component"
    return "pass"


def _check_sset_identities(tree: SpecialTree, star) -> str:
    for side in (tree.a_vertices, tree.b_vertices):
        vs = sorted(side)
        for c in vs:
            values, _ = s_set(c, c, star)
            if values != frozenset({c}):
                return f"fail: terms at ({c}, {c}) reach {sorted(values)}"
            for cp in vs:
                sa, ta = s_set(c, cp, star)
                sb, _ = s_set(cp, c, star)
                if sa != sb:
                    return f"fail: term sets at ({c}, {cp}) are not symmetric"
                for val, term in ta.items():
                    if eval_term(term, star, c, cp) != val:
                        return f"fail: witnessing term broken at ({c}, {cp})"
    return "pass"


def _check_star_collapse_below(tree: SpecialTree, o: int, star) -> str:
    """On each side, the lower element of a comparable pair swallows the
    upper under star from both sides' folds of the comparable-pair collapse."""
    for side in (tree.a_vertices, tree.b_vertices):
        for b in sorted(side):
            for d in sorted(side):
                if preceq(tree, o, b, d) and star(b, d) != b:
                    return f"fail: {b} * {d} = {star(b, d)}"
    return "pass"


def _check_anchor_absorption(tree: SpecialTree, o: int, polymer, star) -> tuple[str, str]:
    """Instance checks for the star collapse above a neighborhood.

    Picks every anchor on the opposite side of o whose strictly-above
    neighborhood is at least a pair, closed under star, and free of
    single-element polymer absorbers; for those the two-sided collapse and
    its term-level consequence are theorem-backed.
    """
    o_in_a = o in tree.a_vertices
    anchors = sorted(tree.b_vertices if o_in_a else tree.a_vertices)
    above_side = tree.b_vertices if o_in_a else tree.a_vertices
    checked = 0
    for b in anchors:
        nb = e_neighborhood(tree, frozenset({b}), 1)
        c_set = sorted(c for c in nb if c != b and preceq(tree, o, b, c) and b != c)
        if len(c_set) < 2:
            continue
        if any(star(c, cp) not in set(c_set) for c in c_set for cp in c_set):
            continue
        if any(all(polymer(c, cp) == c for cp in c_set) for c in c_set):
            continue
        ds = [d for d in sorted(above_side)
              if any(preceq(tree, o, c, d) and c != d for c in c_set)]
        for d in ds:
            if star(b, d) != b or star(d, b) != b:
                return (f"fail: {b} does not swallow {d}", "skipped: collapse failed")
            for c in c_set:
                for cp in c_set:
                    _, terms = s_set(c, cp, star)
                    for term in terms.values():
                        if eval_term(term, star, b, d) != b:
                            return ("pass", f"fail: term at ({b}, {d})")
                        if eval_term(term, star, d, b) != b:
                            return ("pass", f"fail: term at ({d}, {b})")
        checked += 1
    if not checked:
        return ("skipped: no eligible neighborhood", "skipped: no eligible neighborhood")
    return ("pass", "pass")


def verify_lemma_suite(spec: SpecialTreeSpec, seed: int = 0,
                       indicator_budget: int = DEFAULT_INDICATOR_BUDGET,
                       node_budget: int | None = None,
                       power_budget: int = 2_000_000) -> dict:
    """Instance-level checks of the structural facts behind the classifier.

    Checks needing a top-and-bottom WNU are skipped when the search finds
    none under budget.  Deterministic given the inputs; the seed is recorded
    for report provenance only.
    """
    tree = compile_tree(spec)
    report: dict = {"seed": seed, "vertices": tree.digraph.vertex_count}
    for n in (2, 3):
        report[f"diagonal_containment_n{n}"] = _check_diagonal_containment(
            tree, n, power_budget)
    try:
        tau = find_wnu_on_top_bottom(
            tree.digraph, 3, tree.a_vertices, tree.b_vertices,
            indicator_budget, node_budget)
    except BudgetExceeded:
        tau = None
        report["top_bottom_wnu"] = "skipped: budget exceeded"
    else:
        report["top_bottom_wnu"] = "found" if tau is not None else "none"
    dependent = ["wnu_extension", "special_polymer", "singleton_absorber",
                 "comparable_pair_absorption", "sset_identities",
                 "star_collapse_below", "anchor_star_absorption", "term_absorption"]
    if tau is None:
        for key in dependent:
            report[key] = "skipped: no top-and-bottom WNU"
        return report

    try:
        full_wnu = extend_wnu(tree, tau, power_budget=power_budget)
        report["wnu_extension"] = "pass" if (
            is_wnu(full_wnu) and is_polymorphism(tree.digraph, full_wnu)) else "fail"
    except (ConstructionStuck, BudgetExceeded) as exc:
        report["wnu_extension"] = f"fail: {exc}"
        for key in dependent[1:]:
            report[key] = "skipped: no full WNU"
        return report

    _, polymer = make_special(full_wnu)
    size = tree.digraph.vertex_count
    special = all(polymer(x, polymer(x, y)) == polymer(x, y)
                  for x in range(size) for y in range(size))
    report["special_polymer"] = "pass" if (
        special and is_polymorphism(tree.digraph, polymer)) else "fail"

    star = star_table(polymer)
    report["sset_identities"] = _check_sset_identities(tree, star)

    try:
        o = find_singleton_absorber(tree, polymer)
        report["singleton_absorber"] = "pass"
    except NoneFound as exc:
        report["singleton_absorber"] = f"fail: {exc}"
        for key in ("comparable_pair_absorption", "star_collapse_below",
                    "anchor_star_absorption", "term_absorption"):
            report[key] = "skipped: no absorber"
        return report

    side = tree.a_vertices if o in tree.a_vertices else tree.b_vertices
    ok14 = verify_preceq_absorption(tree, o, polymer) and all(
        polymer(o, x) == o for x in sorted(side))
    report["comparable_pair_absorption"] = "pass" if ok14 else "fail"

    report["star_collapse_below"] = _check_star_collapse_below(tree, o, star)
    l16, l17 = _check_anchor_absorption(tree, o, polymer, star)
    report["anchor_star_absorption"] = l16
    report["term_absorption"] = l17
    return report
