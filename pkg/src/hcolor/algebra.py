"""Finite operations and the algebraic machinery over special trees.

Operations are explicit tables or lazy composition trees.  The composition
g <- f of an n-ary g with a k-ary f is the kn-ary operation applying f to n
consecutive blocks and g to the results; its arity grows multiplicatively,
so composed operations are never materialized as tables.

The constructive part (binary extensions, weak-pointing certificates, the
full-domain WNU extension) re-verifies every object it builds: certificates
are checked, never trusted.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from math import factorial

from .digraph import Digraph, diagonal_component, power_index
from .errors import (
    ArityBudgetExceeded,
    BudgetExceeded,
    ConstructionStuck,
    DistanceNotUniform,
    InvalidFormat,
    MixedLevels,
    NoneFound,
    NotWNU,
    PreconditionViolated,
)
from .spectree import SpecialTree, dist_e, e_neighborhood, preceq

DEFAULT_POLY_BUDGET = 5_000_000
DEFAULT_ARITY_BUDGET = 1 << 16
DEFAULT_CLOSURE_BUDGET = 1_000_000


@dataclass(frozen=True)
class OperationTable:
    """A k-ary operation on 0..size-1 as a value array.

    Values are listed over argument tuples in lexicographic order with the
    leftmost coordinate most significant.
    """

    size: int
    arity: int
    values: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.values) != self.size ** self.arity:
            raise ValueError("value array length must be size ** arity")
        if any(not 0 <= v < self.size for v in self.values):
            raise ValueError("table value out of range")

    def apply(self, args) -> int:
        idx = 0
        for a in args:
            idx = idx * self.size + a
        return self.values[idx]

    def __call__(self, *args: int) -> int:
        return self.apply(args)


class OperationExpr:
    """Either a table leaf or a lazy composition node."""

    size: int
    arity: int

    def evaluate(self, args) -> int:
        raise NotImplementedError


@dataclass(frozen=True)
class TableExpr(OperationExpr):
    table: OperationTable

    @property
    def size(self) -> int:
        return self.table.size

    @property
    def arity(self) -> int:
        return self.table.arity

    def evaluate(self, args) -> int:
        return self.table.apply(args)


@dataclass(frozen=True)
class ComposeExpr(OperationExpr):
    """g <- f: outer g applied to f evaluated on consecutive argument blocks."""

    outer: OperationExpr
    inner: OperationExpr

    def __post_init__(self) -> None:
        if self.outer.size != self.inner.size:
            raise ValueError("composed operations must share a base set")

    @property
    def size(self) -> int:
        return self.outer.size

    @property
    def arity(self) -> int:
        return self.outer.arity * self.inner.arity

    def evaluate(self, args) -> int:
        k = self.inner.arity
        if len(args) != self.arity:
            raise ValueError("argument count must match arity")
        inner_vals = [
            self.inner.evaluate(args[i * k:(i + 1) * k]) for i in range(self.outer.arity)]
        return self.outer.evaluate(inner_vals)


def as_expr(op: OperationTable | OperationExpr) -> OperationExpr:
    return TableExpr(op) if isinstance(op, OperationTable) else op


def table_from_function(size: int, arity: int, fn) -> OperationTable:
    values = tuple(fn(args) for args in product(range(size), repeat=arity))
    return OperationTable(size, arity, values)


# identity predicates (independent re-checks for search results)

def is_idempotent(t: OperationTable) -> bool:
    return all(t.apply((x,) * t.arity) == x for x in range(t.size))


def is_wnu(t: OperationTable) -> bool:
    """Idempotent with all one-differing-argument patterns equal."""
    if not is_idempotent(t):
        return False
    k = t.arity
    for x in range(t.size):
        for y in range(t.size):
            base = t.apply((y,) + (x,) * (k - 1))
            for pos in range(1, k):
                args = (x,) * pos + (y,) + (x,) * (k - 1 - pos)
                if t.apply(args) != base:
                    return False
    return True


def is_majority(t: OperationTable) -> bool:
    if t.arity != 3:
        return False
    return all(
        t(y, x, x) == x and t(x, y, x) == x and t(x, x, y) == x
        for x in range(t.size) for y in range(t.size))


def is_tsi(t: OperationTable) -> bool:
    """Idempotent and depending only on the set of arguments."""
    if not is_idempotent(t):
        return False
    by_set: dict[frozenset[int], int] = {}
    for args in product(range(t.size), repeat=t.arity):
        key = frozenset(args)
        val = t.apply(args)
        if by_set.setdefault(key, val) != val:
            return False
    return True


def is_siggers(t: OperationTable) -> bool:
    if t.arity != 4 or not is_idempotent(t):
        return False
    r = range(t.size)
    return all(t(a, x, e, a) == t(x, a, x, e) for a in r for x in r for e in r)


def is_commutative_on(t: OperationTable, subset) -> bool:
    if t.arity != 2:
        return False
    return all(t(x, y) == t(y, x) for x in subset for y in subset)


def restriction_is_wnu(t: OperationTable, subset: frozenset[int]) -> bool:
    """The restriction to `subset` is a WNU operation on it (closure included)."""
    sub = sorted(subset)
    k = t.arity
    for args in product(sub, repeat=k):
        if t.apply(args) not in subset:
            return False
    for x in sub:
        if t.apply((x,) * k) != x:
            return False
        for y in sub:
            base = t.apply((y,) + (x,) * (k - 1))
            for pos in range(1, k):
                if t.apply((x,) * pos + (y,) + (x,) * (k - 1 - pos)) != base:
                    return False
    return True


def is_polymorphism(h: Digraph, op: OperationTable | OperationExpr,
                    budget: int = DEFAULT_POLY_BUDGET,
                    sample: int | None = None) -> bool:
    """Edge preservation, exhaustive over edge tuples within the budget.

    With `sample` set, checks that many seeded random edge tuples instead;
    only the exhaustive mode certifies.
    """
    expr = as_expr(op)
    if expr.size != h.vertex_count:
        raise ValueError("operation base size must match the digraph")
    k = expr.arity
    edges = h.edges_sorted
    if not edges:
        return True
    if sample is not None:
        import random

        rng = random.Random(0)
        for _ in range(sample):
            chosen = [edges[rng.randrange(len(edges))] for _ in range(k)]
            tail = expr.evaluate([e[0] for e in chosen])
            head = expr.evaluate([e[1] for e in chosen])
            if (tail, head) not in h.edges:
                return False
        return True
    if len(edges) ** k > budget:
        raise BudgetExceeded(
            f"{len(edges)}^{k} edge tuples exceed budget {budget}; pass sample=")
    for chosen in product(edges, repeat=k):
        tail = expr.evaluate([e[0] for e in chosen])
        head = expr.evaluate([e[1] for e in chosen])
        if (tail, head) not in h.edges:
            return False
    return True


# polymer / special WNU / star

def binary_polymer(w: OperationTable) -> OperationTable:
    """x o y = w(x, ..., x, y); requires w to be a WNU."""
    if not is_wnu(w):
        raise NotWNU("binary polymer requires a verified WNU table")
    n = w.size
    return table_from_function(
        n, 2, lambda args: w.apply((args[0],) * (w.arity - 1) + (args[1],)))


def _is_special_polymer(p: OperationTable) -> bool:
    return all(p(x, p(x, y)) == p(x, y) for x in range(p.size) for y in range(p.size))


def make_special(w: OperationTable) -> tuple[OperationExpr, OperationTable]:
    """Iterate self-composition of a WNU until its polymer is special.

    The polymer of the m-fold composition sends (x, y) to the m-th iterate
    of z -> x o z applied to y, so only polymer tables are materialized; the
    composed WNU is returned as a lazy expression.  Specialness of the m-th
    polymer p is p(x, p(x, y)) = p(x, y); some m <= size! always works.
    """
    base = binary_polymer(w)
    expr: OperationExpr = TableExpr(w)
    polymer = base
    m = 1
    cap = factorial(w.size)
    while not _is_special_polymer(polymer):
        if m >= cap:
            raise AssertionError("special polymer must appear within size! iterates")
        prev = polymer
        polymer = table_from_function(
            w.size, 2, lambda args, p=prev: base(args[0], p(args[0], args[1])))
        expr = ComposeExpr(TableExpr(w), expr)
        m += 1
    return expr, polymer


def star_table(polymer: OperationTable, iterations: int | None = None) -> OperationTable:
    """x * y: fold x through `iterations` right-applications of o to y."""
    if polymer.arity != 2:
        raise ValueError("polymer must be binary")
    count = polymer.size if iterations is None else iterations
    if count < 1:
        raise ValueError("need at least one application")

    def fold(args):
        x, y = args
        z = x
        for _ in range(count):
            z = polymer(z, y)
        return z

    return table_from_function(polymer.size, 2, fold)


def closure(s: frozenset[int], ops, budget: int = DEFAULT_CLOSURE_BUDGET) -> frozenset[int]:
    """Least superset of s closed under every operation."""
    exprs = [as_expr(op) for op in ops]
    current = set(s)
    changed = True
    while changed:
        changed = False
        for expr in exprs:
            if len(current) ** expr.arity > budget:
                raise BudgetExceeded("closure enumeration exceeds budget")
            for args in product(sorted(current), repeat=expr.arity):
                val = expr.evaluate(args)
                if val not in current:
                    current.add(val)
                    changed = True
    return frozenset(current)


# binary star-terms: 'x', 'y', or ('star', t1, t2)

Term = object


def eval_term(term, star: OperationTable, x: int, y: int) -> int:
    if term == "x":
        return x
    if term == "y":
        return y
    _, left, right = term
    return star(eval_term(left, star, x, y), eval_term(right, star, x, y))


def term_uses_both(term) -> bool:
    def vars_of(t):
        if isinstance(t, str):
            return {t}
        return vars_of(t[1]) | vars_of(t[2])

    return vars_of(term) == {"x", "y"}


def s_set(c: int, cp: int, star: OperationTable) -> tuple[frozenset[int], dict[int, Term]]:
    """Values of all binary star-terms using both variables, at (c, cp).

    Returns the value set together with one witnessing term per value.
    The generating rules: seed with x*y and y*x; for a known term t, add
    x*t, y*t, t*x, t*y; for known t, t', add t*t'.
    """
    terms: dict[int, Term] = {}
    queue: list[tuple[int, Term]] = []

    def add(val: int, term: Term) -> None:
        if val not in terms:
            terms[val] = term
            queue.append((val, term))

    add(star(c, cp), ("star", "x", "y"))
    add(star(cp, c), ("star", "y", "x"))
    i = 0
    while i < len(queue):
        val, term = queue[i]
        i += 1
        add(star(c, val), ("star", "x", term))
        add(star(cp, val), ("star", "y", term))
        add(star(val, c), ("star", term, "x"))
        add(star(val, cp), ("star", term, "y"))
        for other_val, other_term in list(terms.items()):
            add(star(val, other_val), ("star", term, other_term))
            add(star(other_val, val), ("star", other_term, term))
    return frozenset(terms), terms


# certificates

@dataclass(frozen=True)
class WeakPointingCertificate:
    """op weakly points x_set into y_set with one witness tuple per coordinate.

    When alpha is present the certificate is symmetric: plugging any u from
    alpha's domain into coordinate i of the i-th witness yields alpha[u]
    regardless of i.
    """

    op: OperationExpr
    x_set: frozenset[int]
    y_set: frozenset[int]
    witnesses: tuple[tuple[int, ...], ...]
    alpha: dict[int, int] | None = None


def verify_weak_pointing(cert: WeakPointingCertificate) -> bool:
    n = cert.op.arity
    if len(cert.witnesses) != n or any(len(w) != n for w in cert.witnesses):
        return False
    for i in range(n):
        base = list(cert.witnesses[i])
        for x in sorted(cert.x_set):
            base[i] = x
            if cert.op.evaluate(base) not in cert.y_set:
                return False
        if cert.alpha is not None:
            for u, target in sorted(cert.alpha.items()):
                base[i] = u
                if cert.op.evaluate(base) != target:
                    return False
    return True


def trivial_pointing(op: OperationTable | OperationExpr, x: int) -> WeakPointingCertificate:
    """Points {x} to {x} with all-x witnesses; needs only idempotency at x."""
    expr = as_expr(op)
    wit = tuple(((x,) * expr.arity,) * expr.arity)
    cert = WeakPointingCertificate(expr, frozenset({x}), frozenset({x}), wit)
    assert verify_weak_pointing(cert)
    return cert


def compose_pointing(f_cert: WeakPointingCertificate,
                     g_cert: WeakPointingCertificate) -> WeakPointingCertificate:
    """Certificate for g <- f pointing f's sources to g's targets.

    Witness tuples interleave g's witnesses (each entry repeated blockwise)
    with one f witness in the distinguished block; idempotency of f makes
    the repeated blocks collapse to g's witness entries.
    """
    if f_cert.op.size != g_cert.op.size:
        raise PreconditionViolated("certificates must share a base set")
    if not verify_weak_pointing(f_cert) or not verify_weak_pointing(g_cert):
        raise PreconditionViolated("input certificates must verify")
    if not f_cert.y_set <= g_cert.x_set:
        raise PreconditionViolated("inner targets must lie in outer sources")
    k = f_cert.op.arity
    n = g_cert.op.arity
    witnesses = []
    for i in range(n):
        b = g_cert.witnesses[i]
        for j in range(k):
            a = f_cert.witnesses[j]
            tup: list[int] = []
            for l in range(n):
                if l == i:
                    tup.extend(a)
                else:
                    tup.extend([b[l]] * k)
            witnesses.append(tuple(tup))
    alpha = None
    if f_cert.alpha is not None and g_cert.alpha is not None:
        alpha = {
            u: g_cert.alpha[v] for u, v in f_cert.alpha.items() if v in g_cert.alpha}
        if not alpha:
            alpha = None
    out = WeakPointingCertificate(
        ComposeExpr(g_cert.op, f_cert.op), f_cert.x_set, g_cert.y_set,
        tuple(witnesses), alpha)
    if not verify_weak_pointing(out):
        raise ConstructionStuck("composed pointing certificate failed verification")
    return out


@dataclass(frozen=True)
class AbsorptionCertificate:
    """subset absorbs superset via op.

    `polymer` may carry the binary polymer when op is a WNU; singleton
    subsets are then checked through it, which the WNU pattern equalities
    make exact.
    """

    superset: frozenset[int]
    subset: frozenset[int]
    op: OperationTable | OperationExpr
    polymer: OperationTable | None = None


def verify_absorption(cert: AbsorptionCertificate,
                      budget: int = DEFAULT_CLOSURE_BUDGET) -> bool:
    sup, sub = cert.superset, cert.subset
    if not sub or not sub <= sup:
        return False
    if cert.polymer is not None and len(sub) == 1:
        (o,) = sub
        p = cert.polymer
        return all(p(o, x) == o for x in sorted(sup))
    expr = as_expr(cert.op)
    k = expr.arity
    if len(sup) ** k > budget:
        raise BudgetExceeded("absorption check exceeds budget")
    for args in product(sorted(sup), repeat=k):
        if expr.evaluate(args) not in sup:
            return False
    inside = all(expr.evaluate(args) in sub for args in product(sorted(sub), repeat=k))
    if not inside:
        return False
    for i in range(k):
        for free in sorted(sup):
            for rest in product(sorted(sub), repeat=k - 1):
                args = rest[:i] + (free,) + rest[i:]
                if expr.evaluate(args) not in sub:
                    return False
    return True


# singleton absorption over a special tree

def find_singleton_absorber(tree: SpecialTree, polymer: OperationTable) -> int:
    """Least template vertex o with o o w = o across its two-step neighborhood.

    Existence is guaranteed when `polymer` is the special polymer of a WNU
    polymorphism; absence therefore diagnoses a failed precondition.
    """
    for u in sorted(tree.a_vertices | tree.b_vertices):
        e2 = e_neighborhood(tree, frozenset({u}), 2)
        if all(polymer(u, w) == u for w in sorted(e2)):
            return u
    raise NoneFound("no singleton absorber; polymer is not special or tree not Taylor")


def verify_preceq_absorption(tree: SpecialTree, o: int, polymer: OperationTable) -> bool:
    """Comparable template pairs collapse to the lower element under o."""
    for side in (tree.a_vertices, tree.b_vertices):
        for a in sorted(side):
            for ap in sorted(side):
                if preceq(tree, o, a, ap) and polymer(a, ap) != a:
                    return False
    return True


# binary extension machinery

def _anchor_map(tree: SpecialTree, anchor: int, c_list: list[int]) -> list[int | None]:
    """Per vertex: the unique c whose side of the tree (relative to the
    anchor) contains it, or None.

    Removing the anchor splits the tree; each c in c_list sits in its own
    part, and that part is exactly the set of vertices strictly between the
    anchor and c or at/beyond c.
    """
    g = tree.digraph
    comp = [-1] * g.vertex_count
    nxt = 0
    for start in range(g.vertex_count):
        if comp[start] >= 0 or start == anchor:
            continue
        stack = [start]
        comp[start] = nxt
        while stack:
            u = stack.pop()
            for w in tree.tree_adjacency[u]:
                if w != anchor and comp[w] < 0:
                    comp[w] = nxt
                    stack.append(w)
        nxt += 1
    by_comp: dict[int, int] = {}
    for c in c_list:
        if comp[c] in by_comp:
            raise PreconditionViolated(
                f"{by_comp[comp[c]]} and {c} share a side of the anchor")
        by_comp[comp[c]] = c
    return [None if v == anchor else by_comp.get(comp[v]) for v in range(g.vertex_count)]


def _check_template_neighbors(tree: SpecialTree, anchor: int, c_list) -> None:
    pairs = set(tree.template_pairs)
    for c in c_list:
        if (c, anchor) not in pairs and (anchor, c) not in pairs:
            raise PreconditionViolated(
                f"{c} is not a template neighbor of anchor {anchor}")


def extend_binary(tree: SpecialTree, anchor: int, c_set: frozenset[int],
                  gamma: dict[tuple[int, int], int], star: OperationTable,
                  terms: dict[tuple[int, int], Term]) -> OperationTable:
    """Extend gamma on c_set to a binary idempotent polymorphism of the tree.

    Above the anchor (at equal levels, both arguments on sides holding some
    c, c') the value is the witnessing star-term for gamma(c, c'); elsewhere
    it is x * y.  The output is verified; failure diagnoses a set that was
    not absorption-free.
    """
    c_list = sorted(c_set)
    _check_template_neighbors(tree, anchor, c_list)
    for c in c_list:
        for cp in c_list:
            val = gamma.get((c, cp))
            if val is None:
                raise PreconditionViolated(f"gamma missing pair ({c}, {cp})")
            term = terms.get((c, cp))
            if term is None or not term_uses_both(term):
                raise PreconditionViolated(f"no witnessing term for ({c}, {cp})")
            if eval_term(term, star, c, cp) != val:
                raise PreconditionViolated(
                    f"term for ({c}, {cp}) evaluates off gamma; value outside its term set")
    anchor_of = _anchor_map(tree, anchor, c_list)
    lv = tree.levels
    n = tree.digraph.vertex_count

    def fill(args):
        x, y = args
        cx, cy = anchor_of[x], anchor_of[y]
        if cx is not None and cy is not None and lv[x] == lv[y]:
            return eval_term(terms[(cx, cy)], star, x, y)
        return star(x, y)

    tau = table_from_function(n, 2, fill)
    if not is_idempotent(tau):
        raise ConstructionStuck("extension is not idempotent")
    for c in c_list:
        for cp in c_list:
            assert tau(c, cp) == gamma[(c, cp)]
    if not is_polymorphism(tree.digraph, tau):
        raise ConstructionStuck(
            "extension is not a polymorphism; the set is not absorption-free")
    return tau


def _commutative_gamma(c_list: list[int], star: OperationTable,
                       overrides: dict[tuple[int, int], int]
                       ) -> tuple[dict[tuple[int, int], int], dict[tuple[int, int], Term]]:
    """A commutative gamma with each value drawn from the pair's term set."""
    gamma: dict[tuple[int, int], int] = {}
    terms: dict[tuple[int, int], Term] = {}
    for c in c_list:
        for cp in c_list:
            if (c, cp) in gamma:
                continue
            values, value_terms = s_set(c, cp, star)
            if c == cp:
                val = c
            elif (c, cp) in overrides:
                val = overrides[(c, cp)]
                if val not in values:
                    raise PreconditionViolated(
                        f"override {val} outside the term set of ({c}, {cp})")
            else:
                val = min(values)
            gamma[(c, cp)] = val
            terms[(c, cp)] = value_terms[val]
            # mirrored entry: same value, term with variables swapped
            _, rev_terms = s_set(cp, c, star)
            gamma[(cp, c)] = overrides.get((cp, c), val)
            if gamma[(cp, c)] != val:
                raise PreconditionViolated("overrides must be commutative")
            terms[(cp, c)] = rev_terms[val]
    return gamma, terms


def _point_pair(tree: SpecialTree, anchor: int, c_list: list[int],
                star: OperationTable, x: int, y: int,
                arity_budget: int) -> WeakPointingCertificate:
    """A symmetric certificate pointing {x, y} to a singleton.

    Induction on the size of the pair's term set: either one of x, y already
    lies in it (one binary extension suffices), or both are first pushed into
    the strictly smaller term set of (x * (x*y), y * (x*y)) and the smaller
    instance is composed on top.
    """
    values, _ = s_set(x, y, star)
    if x in values or y in values:
        z = x if x in values else y
        gamma, terms = _commutative_gamma(
            c_list, star, {(x, y): z, (y, x): z} if x != y else {})
        tau = extend_binary(tree, anchor, frozenset(c_list), gamma, star, terms)
        cert = WeakPointingCertificate(
            TableExpr(tau), frozenset({x, y}), frozenset({z}),
            ((z, z), (z, z)), {u: tau(u, z) for u in c_list})
        if not verify_weak_pointing(cert):
            raise ConstructionStuck("pair certificate failed verification")
        return cert
    c = star(x, y)
    xp, yp = star(x, c), star(y, c)
    smaller, _ = s_set(xp, yp, star)
    if not (smaller | {xp, yp}) < (values | {x, y}):
        raise ConstructionStuck("pair recursion measure did not shrink")
    gamma, terms = _commutative_gamma(
        c_list, star, {(x, c): xp, (c, x): xp, (y, c): yp, (c, y): yp})
    tau = extend_binary(tree, anchor, frozenset(c_list), gamma, star, terms)
    first = WeakPointingCertificate(
        TableExpr(tau), frozenset({x, y}), frozenset({xp, yp}),
        ((c, c), (c, c)), {u: tau(u, c) for u in c_list})
    if not verify_weak_pointing(first):
        raise ConstructionStuck("pair certificate failed verification")
    rest = _point_pair(tree, anchor, c_list, star, xp, yp, arity_budget)
    if first.op.arity * rest.op.arity > arity_budget:
        raise ArityBudgetExceeded("composed pair certificate exceeds arity budget")
    return compose_pointing(first, rest)


def build_pointing_for_neighborhood(
        tree: SpecialTree, anchor: int, c_set: frozenset[int], star: OperationTable,
        arity_budget: int = DEFAULT_ARITY_BUDGET) -> WeakPointingCertificate:
    """A certificate weakly pointing a neighborhood subuniverse to a singleton.

    c_set must consist of template neighbors of the anchor, be closed under
    star, and be absorption-free; a wrong absorption-freeness assertion
    surfaces as ConstructionStuck from the inner constructions.
    """
    if not c_set:
        raise PreconditionViolated("cannot point an empty set")
    c_list = sorted(c_set)
    _check_template_neighbors(tree, anchor, c_list)
    for c in c_list:
        for cp in c_list:
            if star(c, cp) not in c_set:
                raise ConstructionStuck("set is not closed under star")

    def point_set(xs: tuple[int, ...]) -> WeakPointingCertificate:
        if len(xs) == 1:
            return trivial_pointing(star, xs[0])
        x, y = xs[0], xs[1]
        pair_cert = _point_pair(tree, anchor, c_list, star, x, y, arity_budget)
        assert pair_cert.alpha is not None
        targets = frozenset(pair_cert.alpha[u] for u in xs)
        widened = WeakPointingCertificate(
            pair_cert.op, frozenset(xs), targets, pair_cert.witnesses, pair_cert.alpha)
        if not verify_weak_pointing(widened):
            raise ConstructionStuck("widened pair certificate failed verification")
        if len(targets) >= len(xs):
            raise ConstructionStuck("pointing did not shrink the set")
        rest = point_set(tuple(sorted(targets)))
        if widened.op.arity * rest.op.arity > arity_budget:
            raise ArityBudgetExceeded("composed certificate exceeds arity budget")
        return compose_pointing(widened, rest)

    return point_set(tuple(c_list))


def build_pointing_for_af(
        tree: SpecialTree, c_set: frozenset[int], o: int, polymer: OperationTable,
        arity_budget: int = DEFAULT_ARITY_BUDGET) -> WeakPointingCertificate:
    """Pointing certificate for an absorption-free subuniverse of A or B.

    Recursion on the common template distance from o: project through the
    unique toward-o neighbor map onto the strictly closer image set, point
    that, then finish inside the single fiber returned.
    """
    if not c_set:
        raise PreconditionViolated("cannot point an empty set")
    if not (c_set <= tree.a_vertices or c_set <= tree.b_vertices):
        raise MixedLevels("set must lie within A or within B")
    star = star_table(polymer)
    dists = {dist_e(tree, o, c) for c in c_set}
    if len(dists) != 1:
        raise DistanceNotUniform(
            f"distances {sorted(dists)} from {o}; the set is not absorption-free")
    (k,) = dists
    if k == 0:
        return trivial_pointing(star, o)
    if k == 1:
        return build_pointing_for_neighborhood(tree, o, c_set, star, arity_budget)
    d_set = e_neighborhood(tree, c_set, 1) & e_neighborhood(tree, frozenset({o}), k - 1)
    if len(d_set) == 1:
        (d,) = d_set
        return build_pointing_for_neighborhood(tree, d, c_set, star, arity_budget)
    eta: dict[int, int] = {}
    for c in sorted(c_set):
        toward = [w for w in tree.template_adjacency[c] if dist_e(tree, o, w) == k - 1]
        assert len(toward) == 1
        eta[c] = toward[0]
    if set(eta.values()) != d_set:
        raise ConstructionStuck("toward-o projection is not onto the image set")
    upper = build_pointing_for_af(tree, frozenset(d_set), o, polymer, arity_budget)
    (d,) = upper.y_set
    fiber = frozenset(c for c in c_set if eta[c] == d)
    preimages: dict[int, int] = {}
    for c in sorted(c_set, reverse=True):
        preimages[eta[c]] = c  # keep the least preimage per image
    lifted_witnesses = []
    for wit in upper.witnesses:
        if any(v not in preimages for v in wit):
            raise ConstructionStuck("witness entries left the image set; cannot lift")
        lifted_witnesses.append(tuple(preimages[v] for v in wit))
    lifted = WeakPointingCertificate(
        upper.op, c_set, fiber, tuple(lifted_witnesses))
    if not verify_weak_pointing(lifted):
        raise ConstructionStuck("lifted certificate failed verification")
    finish = build_pointing_for_neighborhood(tree, d, fiber, star, arity_budget)
    if lifted.op.arity * finish.op.arity > arity_budget:
        raise ArityBudgetExceeded("composed certificate exceeds arity budget")
    return compose_pointing(lifted, finish)


# full-domain WNU extension

def extend_wnu(tree: SpecialTree, tau: OperationTable,
               edge_order: tuple[int, ...] | None = None,
               power_budget: int = DEFAULT_POLY_BUDGET) -> OperationTable:
    """Turn a polymorphism that is a WNU on the top and bottom levels into a
    WNU on the whole tree.

    The value is redefined case by case over the n-th power: kept on top and
    bottom tuples; on the diagonal component either the least interior
    vertex (single attached path), a rotation pulling the odd coordinate
    first (exactly two paths), or tau; off the diagonal component either the
    least interior vertex, the odd coordinate out, or the first coordinate.
    The least-vertex order ranks attached paths by edge_order and breaks
    ties toward the bottom endpoint.
    """
    n = tau.arity
    h = tree.digraph
    size = h.vertex_count
    if n < 3:
        raise PreconditionViolated("arity must be at least 3")
    if tau.size != size:
        raise PreconditionViolated("table base must match the tree")
    if not is_idempotent(tau) or not is_polymorphism(h, tau):
        raise PreconditionViolated("input must be an idempotent polymorphism")
    if not restriction_is_wnu(tau, tree.a_vertices):
        raise PreconditionViolated("input is not a WNU on the bottom level")
    if not restriction_is_wnu(tau, tree.b_vertices):
        raise PreconditionViolated("input is not a WNU on the top level")
    if size ** n > power_budget:
        raise BudgetExceeded("power membership set exceeds budget")
    m = len(tree.spec.template_edges)
    order = tuple(range(m)) if edge_order is None else tuple(edge_order)
    if sorted(order) != list(range(m)):
        raise PreconditionViolated("edge_order must be a permutation of the edges")
    rank = {e: i for i, e in enumerate(order)}
    # interior vertices carry (edge rank, steps from the bottom endpoint)
    sort_key: list[tuple[int, int] | None] = [None] * size
    edge_of: list[int | None] = [None] * size
    for v, role in enumerate(tree.roles):
        if role[0] == "P":
            sort_key[v] = (rank[role[1]], role[2])
            edge_of[v] = role[1]
    delta = diagonal_component(h, n, power_budget)
    lv = tree.levels
    a_set, b_set = tree.a_vertices, tree.b_vertices

    def least_interior(args) -> int:
        return min(args, key=lambda v: sort_key[v])

    def value(args) -> int:
        if all(v in a_set for v in args) or all(v in b_set for v in args):
            return tau.apply(args)
        if power_index(size, args) in delta:
            assert all(edge_of[v] is not None for v in args)
            edges = [edge_of[v] for v in args]
            if len(set(edges)) == 1:
                return least_interior(args)
            for i in range(n):
                others = {edges[j] for j in range(n) if j != i}
                if len(others) == 1 and edges[i] not in others:
                    rotated = (args[i],) + args[:i] + args[i + 1:]
                    return tau.apply(rotated)
            return tau.apply(args)
        levels = [lv[v] for v in args]
        if len(set(levels)) == 1:
            assert all(edge_of[v] is not None for v in args)
            return least_interior(args)
        for i in range(n):
            others = {levels[j] for j in range(n) if j != i}
            if len(others) == 1 and levels[i] not in others:
                return args[i]
        return args[0]

    out = table_from_function(size, n, value)
    if not is_polymorphism(h, out):
        raise ConstructionStuck("extension is not a polymorphism")
    if not is_wnu(out):
        raise ConstructionStuck("extension is not a WNU")
    return out


# .op text format: `op <n> <k>` then n^k value lines.

def format_op(t: OperationTable) -> str:
    lines = [f"op {t.size} {t.arity}"]
    lines.extend(str(v) for v in t.values)
    return "\n".join(lines) + "\n"


def parse_op(text: str) -> OperationTable:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise InvalidFormat("empty operation file")
    head = lines[0].split()
    if len(head) != 3 or head[0] != "op":
        raise InvalidFormat(f"bad header line: {lines[0]!r}")
    try:
        size, arity = int(head[1]), int(head[2])
        values = tuple(int(ln.strip()) for ln in lines[1:])
    except ValueError as exc:
        raise InvalidFormat("bad operation file") from exc
    if len(values) != size ** arity:
        raise InvalidFormat(f"expected {size ** arity} values, found {len(values)}")
    try:
        return OperationTable(size, arity, values)
    except ValueError as exc:
        raise InvalidFormat(str(exc)) from exc


def read_op(path) -> OperationTable:
    with open(path, "r", encoding="ascii") as fh:
        return parse_op(fh.read())


def write_op(path, t: OperationTable) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(format_op(t))
