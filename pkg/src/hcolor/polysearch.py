"""Polymorphism existence via indicator structures.

A k-ary polymorphism of h is a homomorphism from the k-th power of h back
to h.  Identity constraints (WNU patterns, Siggers, total symmetry) merge
power tuples into classes with a union-find and pin forced classes, turning
each search into a homomorphism instance over the quotient.  Values on
weakly connected components of the quotient are independent, so components
are solved separately, smallest first.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import product

from .algebra import (
    OperationTable,
    is_majority,
    is_polymorphism,
    is_siggers,
    is_tsi,
    is_wnu,
)
from .digraph import Digraph
from .errors import BudgetExceeded, InconsistentPins
from .homsolver import CspInstance, edge_relation, solve_instance

DEFAULT_INDICATOR_BUDGET = 4_000_000

Pattern = tuple[str, ...]
Ranges = dict[str, tuple[int, ...]]


@dataclass(frozen=True)
class IdentitySystem:
    """Merge and pin rules over abstract variables, plus raw tuple merges.

    A merge rule equates the images of two patterns for every substitution
    of its variables (restricted by per-variable ranges, full range when
    absent).  A pin rule forces the image of a pattern to the value of one
    of its variables.
    """

    arity: int
    merges: tuple[tuple[Pattern, Pattern, tuple[tuple[str, tuple[int, ...]], ...]], ...] = ()
    pins: tuple[tuple[Pattern, str, tuple[tuple[str, tuple[int, ...]], ...]], ...] = ()
    raw_merges: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...] = ()


def _rotations(k: int) -> list[Pattern]:
    return [("x",) * i + ("y",) + ("x",) * (k - 1 - i) for i in range(k)]


def _ranged(ranges: Ranges | None) -> tuple[tuple[str, tuple[int, ...]], ...]:
    if not ranges:
        return ()
    return tuple(sorted((v, tuple(vals)) for v, vals in ranges.items()))


def wnu_system(k: int, ranges: Ranges | None = None) -> IdentitySystem:
    """All one-differing-argument patterns merged, diagonal pinned."""
    rots = _rotations(k)
    merges = tuple((rots[0], rot, _ranged(ranges)) for rot in rots[1:])
    pins = ((("x",) * k, "x", ()),)
    return IdentitySystem(k, merges, pins)


def wnu_on_sets_system(k: int, sets: list[tuple[int, ...]]) -> IdentitySystem:
    """WNU pattern merges restricted to each given vertex set, diagonal pinned."""
    rots = _rotations(k)
    merges = []
    for vals in sets:
        rng = _ranged({"x": tuple(vals), "y": tuple(vals)})
        merges.extend((rots[0], rot, rng) for rot in rots[1:])
    pins = ((("x",) * k, "x", ()),)
    return IdentitySystem(k, tuple(merges), pins)


def majority_system() -> IdentitySystem:
    rots = _rotations(3)
    merges = tuple((rots[0], rot, ()) for rot in rots[1:])
    pins = tuple((rot, "x", ()) for rot in rots)
    return IdentitySystem(3, merges, pins)


def siggers_system() -> IdentitySystem:
    merge = ((("a", "r", "e", "a"), ("r", "a", "r", "e"), ()),)
    pins = ((("x", "x", "x", "x"), "x", ()),)
    return IdentitySystem(4, merge, pins)


def tsi_system(k: int, size: int) -> IdentitySystem:
    """Tuples with equal argument sets merged, diagonal pinned."""
    groups: dict[frozenset[int], tuple[int, ...]] = {}
    raw = []
    for tup in product(range(size), repeat=k):
        key = frozenset(tup)
        if key in groups:
            raw.append((groups[key], tup))
        else:
            groups[key] = tup
    pins = ((("x",) * k, "x", ()),)
    return IdentitySystem(k, (), pins, tuple(raw))


class _UnionFind:
    __slots__ = ("parent",)

    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        parent = self.parent
        root = i
        while parent[root] != root:
            root = parent[root]
        while parent[i] != root:
            parent[i], i = root, parent[i]
        return root

    def union(self, i: int, j: int) -> None:
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            if ri > rj:
                ri, rj = rj, ri
            self.parent[rj] = ri


@dataclass(frozen=True)
class Indicator:
    """Quotiented indicator instance plus the tuple-to-class bookkeeping."""

    instance: CspInstance
    class_of: tuple[int, ...]
    arity: int
    base: int


def _substitutions(variables: tuple[str, ...], ranges: dict[str, tuple[int, ...]],
                   size: int):
    domains = [ranges.get(v, tuple(range(size))) for v in variables]
    return product(*domains)


def indicator(h: Digraph, sys: IdentitySystem,
              budget: int = DEFAULT_INDICATOR_BUDGET) -> Indicator:
    """The homomorphism instance whose solutions are exactly the operations
    satisfying the identity system."""
    n = h.vertex_count
    k = sys.arity
    total = n ** k
    if total > budget:
        raise BudgetExceeded(f"{total} indicator tuples exceed budget {budget}")
    uf = _UnionFind(total)

    def index_of(pattern: Pattern, sub: dict[str, int]) -> int:
        idx = 0
        for sym in pattern:
            idx = idx * n + sub[sym]
        return idx

    for pat_a, pat_b, ranges in sys.merges:
        variables = tuple(sorted(set(pat_a) | set(pat_b)))
        rng = dict(ranges)
        for values in _substitutions(variables, rng, n):
            sub = dict(zip(variables, values))
            uf.union(index_of(pat_a, sub), index_of(pat_b, sub))
    for ta, tb in sys.raw_merges:
        uf.union(_tuple_index(ta, n), _tuple_index(tb, n))

    pinned: dict[int, int] = {}
    for pattern, var, ranges in sys.pins:
        variables = tuple(sorted(set(pattern)))
        rng = dict(ranges)
        for values in _substitutions(variables, rng, n):
            sub = dict(zip(variables, values))
            root = uf.find(index_of(pattern, sub))
            val = sub[var]
            if pinned.setdefault(root, val) != val:
                raise InconsistentPins(
                    f"class of tuple {root} pinned to both {pinned[root]} and {val}")

    class_of = [0] * total
    class_ids: dict[int, int] = {}
    for i in range(total):
        root = uf.find(i)
        if root not in class_ids:
            class_ids[root] = len(class_ids)
        class_of[i] = class_ids[root]
    nvars = len(class_ids)

    full = (1 << n) - 1
    domains = [full] * nvars
    for root, val in pinned.items():
        domains[class_ids[root]] = 1 << val

    rel = edge_relation(h)
    pairs: set[tuple[int, int]] = set()
    for combo in product(h.edges_sorted, repeat=k) if h.edges else ():
        tail = 0
        head = 0
        for u, v in combo:
            tail = tail * n + u
            head = head * n + v
        pairs.add((class_of[tail], class_of[head]))
    constraints = tuple((u, v, rel, "power edge") for u, v in sorted(pairs))
    inst = CspInstance(n, tuple(domains), constraints)
    return Indicator(inst, tuple(class_of), k, n)


def _tuple_index(tup: tuple[int, ...], n: int) -> int:
    idx = 0
    for v in tup:
        idx = idx * n + v
    return idx


def _components(inst: CspInstance) -> list[list[int]]:
    nvars = inst.variable_count
    adj: list[list[int]] = [[] for _ in range(nvars)]
    for u, v, _, _ in inst.constraints:
        if u != v:
            adj[u].append(v)
            adj[v].append(u)
    seen = [False] * nvars
    comps = []
    for start in range(nvars):
        if seen[start]:
            continue
        comp = [start]
        seen[start] = True
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if not seen[w]:
                    seen[w] = True
                    comp.append(w)
                    queue.append(w)
        comps.append(sorted(comp))
    return comps


def solve_indicator(ind: Indicator, node_budget: int | None = None
                    ) -> tuple[int, ...] | None:
    """Assignment per class, or None.

    Components carrying pinned classes go first (those hold the diagonal,
    where idempotency makes refutations bite), smallest first within.
    """
    inst = ind.instance

    def no_pin(comp: list[int]) -> bool:
        return all(inst.domains[v].bit_count() != 1 for v in comp)

    comps = sorted(_components(inst), key=lambda c: (no_pin(c), len(c), c[0]))
    assignment: list[int | None] = [None] * inst.variable_count
    for comp in comps:
        index = {v: i for i, v in enumerate(comp)}
        domains = tuple(inst.domains[v] for v in comp)
        constraints = tuple(
            (index[u], index[v], rel, tag)
            for u, v, rel, tag in inst.constraints if u in index)
        sub = CspInstance(inst.domain_size, domains, constraints)
        found = solve_instance(sub, node_budget)
        if found is None:
            return None
        for v, val in zip(comp, found):
            assignment[v] = val
    return tuple(assignment)  # type: ignore[arg-type]


def _table_from_assignment(ind: Indicator, assignment: tuple[int, ...]) -> OperationTable:
    values = tuple(assignment[c] for c in ind.class_of)
    return OperationTable(ind.base, ind.arity, values)


def _search(h: Digraph, sys: IdentitySystem, predicate,
            budget: int, node_budget: int | None) -> OperationTable | None:
    ind = indicator(h, sys, budget)
    assignment = solve_indicator(ind, node_budget)
    if assignment is None:
        return None
    table = _table_from_assignment(ind, assignment)
    assert is_polymorphism(h, table)
    assert predicate(table)
    return table


def find_wnu(h: Digraph, k: int, budget: int = DEFAULT_INDICATOR_BUDGET,
             node_budget: int | None = None) -> OperationTable | None:
    """A verified k-ary idempotent WNU polymorphism, or None (exhaustive)."""
    if k < 2:
        raise ValueError("WNU arity must be at least 2")
    return _search(h, wnu_system(k), is_wnu, budget, node_budget)


def find_wnu_on_top_bottom(h: Digraph, k: int, a_set, b_set,
                           budget: int = DEFAULT_INDICATOR_BUDGET,
                           node_budget: int | None = None) -> OperationTable | None:
    """An idempotent polymorphism that restricts to WNUs on both given sets."""
    sys = wnu_on_sets_system(k, [tuple(sorted(a_set)), tuple(sorted(b_set))])
    ind = indicator(h, sys, budget)
    assignment = solve_indicator(ind, node_budget)
    if assignment is None:
        return None
    table = _table_from_assignment(ind, assignment)
    assert is_polymorphism(h, table)
    return table


def find_majority(h: Digraph, budget: int = DEFAULT_INDICATOR_BUDGET,
                  node_budget: int | None = None) -> OperationTable | None:
    return _search(h, majority_system(), is_majority, budget, node_budget)


def find_siggers(h: Digraph, budget: int = DEFAULT_INDICATOR_BUDGET,
                 node_budget: int | None = None) -> OperationTable | None:
    """A 4-ary idempotent polymorphism with s(a,r,e,a) = s(r,a,r,e), or None.

    Presence certifies a Taylor polymorphism algebra; absence on a core
    certifies the opposite.
    """
    return _search(h, siggers_system(), is_siggers, budget, node_budget)


def find_tsi(h: Digraph, k: int, budget: int = DEFAULT_INDICATOR_BUDGET,
             node_budget: int | None = None) -> OperationTable | None:
    """A k-ary totally symmetric idempotent polymorphism, or None."""
    if k < 1:
        raise ValueError("arity must be positive")
    return _search(h, tsi_system(k, h.vertex_count), is_tsi, budget, node_budget)
