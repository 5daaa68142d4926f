"""Homomorphism decisions between digraphs.

Variables carry bitmask domains over target vertices.  Binary constraints
share one Relation object per allowed-pair set, so instances built from an
edge relation stay small.  Everything is deterministic: fixed variable order
(smallest domain, lowest index) and ascending value order.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from itertools import product

from .digraph import Digraph
from .errors import BudgetExceeded, InvalidPin

DEFAULT_ENUM_BUDGET = 5_000_000


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _popcount(mask: int) -> int:
    return mask.bit_count()


@dataclass(frozen=True)
class Relation:
    """Binary relation over 0..size-1 stored as per-value bitmasks."""

    size: int
    fwd: tuple[int, ...]  # fwd[a] = mask of b with (a, b) in the relation
    rev: tuple[int, ...]  # rev[b] = mask of a with (a, b) in the relation

    @classmethod
    def from_pairs(cls, size: int, pairs) -> "Relation":
        fwd = [0] * size
        rev = [0] * size
        for a, b in pairs:
            fwd[a] |= 1 << b
            rev[b] |= 1 << a
        return cls(size, tuple(fwd), tuple(rev))

    @cached_property
    def diagonal(self) -> int:
        mask = 0
        for a in range(self.size):
            if self.fwd[a] >> a & 1:
                mask |= 1 << a
        return mask

    def pairs(self) -> frozenset[tuple[int, int]]:
        return frozenset((a, b) for a in range(self.size) for b in _bits(self.fwd[a]))


def edge_relation(h: Digraph) -> Relation:
    return Relation.from_pairs(h.vertex_count, h.edges_sorted)


@dataclass(frozen=True)
class CspInstance:
    """Variables with vertex-subset domains plus binary constraints."""

    domain_size: int
    domains: tuple[int, ...]
    constraints: tuple[tuple[int, int, Relation, str], ...]

    @cached_property
    def incident(self) -> tuple[tuple[int, ...], ...]:
        inc: list[list[int]] = [[] for _ in range(len(self.domains))]
        for ci, (u, v, _, _) in enumerate(self.constraints):
            inc[u].append(ci)
            if v != u:
                inc[v].append(ci)
        return tuple(tuple(c) for c in inc)

    @property
    def variable_count(self) -> int:
        return len(self.domains)

    def is_solved(self) -> bool:
        return all(_popcount(d) == 1 for d in self.domains)


def build_instance(x: Digraph, h: Digraph, pins: dict[int, int] | None = None) -> CspInstance:
    """One variable per x-vertex, full target domains, one constraint per x-edge."""
    full = (1 << h.vertex_count) - 1
    domains = [full] * x.vertex_count
    for var, val in (pins or {}).items():
        if not (0 <= var < x.vertex_count):
            raise InvalidPin(f"pin variable {var} out of range")
        if not (0 <= val < h.vertex_count):
            raise InvalidPin(f"pin value {val} out of range")
        domains[var] &= 1 << val
    rel = edge_relation(h)
    constraints = tuple(
        (u, v, rel, f"edge {u}->{v}") for u, v in x.edges_sorted)
    return CspInstance(h.vertex_count, tuple(domains), constraints)


def _ac_fixpoint(domains: list[int], inst: CspInstance,
                 dirty: list[int] | None = None) -> bool:
    """Worklist support filtering in place; False when a domain empties.

    With `dirty` given, only constraints touching those variables seed the
    worklist (the rest are assumed already consistent).
    """
    cons = inst.constraints
    if dirty is None:
        # self-loop constraints reduce to a unary filter, applied once here;
        # incremental calls start from an already filtered state
        for u, v, rel, _ in cons:
            if u == v:
                domains[u] &= rel.diagonal
                if not domains[u]:
                    return False
        queue = deque(range(len(cons)))
        queued = [True] * len(cons)
    else:
        queued = [False] * len(cons)
        queue = deque()
        for var in dirty:
            for ci in inst.incident[var]:
                if not queued[ci]:
                    queued[ci] = True
                    queue.append(ci)
    while queue:
        ci = queue.popleft()
        queued[ci] = False
        u, v, rel, _ = cons[ci]
        if u == v:
            continue
        du, dv = domains[u], domains[v]
        new_u = 0
        for a in _bits(du):
            if rel.fwd[a] & dv:
                new_u |= 1 << a
        new_v = 0
        for b in _bits(dv):
            if rel.rev[b] & new_u:
                new_v |= 1 << b
        if not new_u or not new_v:
            return False
        for var, new, old in ((u, new_u, du), (v, new_v, dv)):
            if new != old:
                domains[var] = new
                for cj in inst.incident[var]:
                    if not queued[cj]:
                        queued[cj] = True
                        queue.append(cj)
    return True


def arc_consistency(inst: CspInstance) -> CspInstance | None:
    """Greatest support-filtering fixpoint; None when some domain empties.

    Sound: a value participating in any solution is never removed.
    """
    domains = list(inst.domains)
    if any(d == 0 for d in domains):
        return None
    if not _ac_fixpoint(domains, inst):
        return None
    return CspInstance(inst.domain_size, tuple(domains), inst.constraints)


class _NodeCounter:
    __slots__ = ("left",)

    def __init__(self, budget: int | None):
        self.left = budget

    def tick(self) -> None:
        if self.left is not None:
            if self.left <= 0:
                raise BudgetExceeded("search node budget exhausted")
            self.left -= 1


def _branch_var(domains: list[int]) -> int:
    best = -1
    best_size = None
    for i, d in enumerate(domains):
        size = _popcount(d)
        if size > 1 and (best_size is None or size < best_size):
            best, best_size = i, size
    return best


def _search(domains: list[int], inst: CspInstance, counter: _NodeCounter) -> list[int] | None:
    """Iterative backtracking; frames hold resumable value generators."""
    var = _branch_var(domains)
    if var < 0:
        return domains
    stack: list[tuple[list[int], int, object]] = [(domains, var, _bits(domains[var]))]
    while stack:
        parent, var, values = stack[-1]
        advanced = False
        for val in values:
            counter.tick()
            trial = list(parent)
            trial[var] = 1 << val
            if _ac_fixpoint(trial, inst, dirty=[var]):
                nxt = _branch_var(trial)
                if nxt < 0:
                    return trial
                stack.append((trial, nxt, _bits(trial[nxt])))
                advanced = True
                break
        if not advanced:
            stack.pop()
    return None


def solve_instance(inst: CspInstance, node_budget: int | None = None) -> tuple[int, ...] | None:
    """Backtracking with support filtering at every node."""
    domains = list(inst.domains)
    if any(d == 0 for d in domains):
        return None
    if not _ac_fixpoint(domains, inst):
        return None
    found = _search(domains, inst, _NodeCounter(node_budget))
    if found is None:
        return None
    assignment = tuple(d.bit_length() - 1 for d in found)
    for u, v, rel, tag in inst.constraints:
        assert rel.fwd[assignment[u]] >> assignment[v] & 1, tag
    return assignment


def is_homomorphism(x: Digraph, h: Digraph, mapping: tuple[int, ...],
                    pins: dict[int, int] | None = None) -> bool:
    if len(mapping) != x.vertex_count:
        return False
    if any(not 0 <= t < h.vertex_count for t in mapping):
        return False
    if pins and any(mapping[var] != val for var, val in pins.items()):
        return False
    return all((mapping[u], mapping[v]) in h.edges for u, v in x.edges)


def solve_hom(x: Digraph, h: Digraph, pins: dict[int, int] | None = None,
              node_budget: int | None = None) -> tuple[int, ...] | None:
    """A verified homomorphism x -> h respecting the pins, or None."""
    if x.vertex_count == 0:
        return ()
    if h.vertex_count == 0:
        return None
    inst = build_instance(x, h, pins)
    found = solve_instance(inst, node_budget)
    if found is not None:
        assert is_homomorphism(x, h, found, pins)
    return found


def enumerate_homs(x: Digraph, h: Digraph, limit: int | None = None,
                   budget: int = DEFAULT_ENUM_BUDGET) -> list[tuple[int, ...]]:
    """All homomorphisms in lexicographic order, by plain enumeration.

    Deliberately simple: this is the oracle the solver is checked against.
    """
    if limit is None and h.vertex_count ** x.vertex_count > budget:
        raise BudgetExceeded("enumeration space exceeds budget; pass a limit")
    out: list[tuple[int, ...]] = []
    edges = x.edges_sorted
    for mapping in product(range(h.vertex_count), repeat=x.vertex_count):
        ok = True
        for u, v in edges:
            if (mapping[u], mapping[v]) not in h.edges:
                ok = False
                break
        if ok:
            out.append(mapping)
            if limit is not None and len(out) >= limit:
                break
    return out


def consistency_23(inst: CspInstance) -> dict[tuple[int, int], frozenset] | None:
    """Greatest (2,3)-consistent family of pair assignments, or None.

    For every unordered variable pair the family keeps the assignments that
    extend compatibly to every third variable; the fixpoint is reached by
    repeated sweeps.  None signals collapse (some pair set emptied), which
    soundly refutes the instance.
    """
    n = len(inst.domains)
    domains = list(inst.domains)
    for u, v, rel, _ in inst.constraints:
        if u == v:
            domains[u] &= rel.diagonal
    if any(d == 0 for d in domains):
        return None
    if n < 2:
        return {}
    # rows[u][v][a] = mask of b-values compatible with u=a, v=b
    rows: dict[tuple[int, int], list[int]] = {}
    for u in range(n):
        for v in range(n):
            if u != v:
                rows[(u, v)] = [domains[v] if domains[u] >> a & 1 else 0
                                for a in range(inst.domain_size)]
    for u, v, rel, _ in inst.constraints:
        if u == v:
            continue
        ru, rv = rows[(u, v)], rows[(v, u)]
        for a in range(inst.domain_size):
            ru[a] &= rel.fwd[a]
        for b in range(inst.domain_size):
            rv[b] &= rel.rev[b]
    changed = True
    while changed:
        changed = False
        for u in range(n):
            for v in range(u + 1, n):
                ruv = rows[(u, v)]
                rvu = rows[(v, u)]
                for a in range(inst.domain_size):
                    row = ruv[a]
                    if not row:
                        continue
                    for b in _bits(row):
                        for w in range(n):
                            if w == u or w == v:
                                continue
                            if not (rows[(u, w)][a] & rows[(v, w)][b]):
                                ruv[a] &= ~(1 << b)
                                rvu[b] &= ~(1 << a)
                                changed = True
                                break
        for u in range(n):
            for v in range(u + 1, n):
                if all(m == 0 for m in rows[(u, v)]):
                    return None
    family = {}
    for u in range(n):
        for v in range(u + 1, n):
            family[(u, v)] = frozenset(
                (a, b) for a in range(inst.domain_size) for b in _bits(rows[(u, v)][a]))
    return family
