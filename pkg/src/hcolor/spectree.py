"""Special-tree templates and their compiled digraphs.

A special tree is built from a height-1 bipartite tree template
T = (A u B; E <= A x B) by replacing every template edge with a minimal
path of one common height, initial vertex glued to the A-endpoint.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property

from .digraph import Digraph, LevelAssignment, compute_levels, is_oriented_tree
from .errors import InvalidFormat, InvalidSpec, MixedLevels, NotMinimal
from .minpath import OrientedPath, common_onto_minimal_path, is_minimal

# Vertex roles in a compiled tree: ('A', i), ('B', j) or ('P', edge, pos)
# with pos counted from the A-endpoint of the attached path.
Role = tuple


@dataclass(frozen=True)
class SpecialTreeSpec:
    """Template: bottom/top vertex counts, height, and per-edge minimal paths."""

    a_count: int
    b_count: int
    height: int
    template_edges: tuple[tuple[int, int, OrientedPath], ...]

    def __post_init__(self) -> None:
        if self.a_count < 1 or self.b_count < 1:
            raise InvalidSpec("a_count and b_count must be positive")
        if self.height < 1:
            raise InvalidSpec("height must be positive")
        m = len(self.template_edges)
        if m != self.a_count + self.b_count - 1:
            raise InvalidSpec(
                f"template must be a tree: expected {self.a_count + self.b_count - 1} "
                f"edges, got {m}")
        seen_pairs = set()
        for a, b, path in self.template_edges:
            if not (0 <= a < self.a_count and 0 <= b < self.b_count):
                raise InvalidSpec(f"template edge ({a}, {b}) out of range")
            if (a, b) in seen_pairs:
                raise InvalidSpec(f"duplicate template edge ({a}, {b})")
            seen_pairs.add((a, b))
            if not is_minimal(path):
                raise InvalidSpec(f"path {path} on edge ({a}, {b}) is not minimal")
            if path.height != self.height:
                raise InvalidSpec(
                    f"path {path} has height {path.height}, template requires {self.height}")
        if not self._template_connected():
            raise InvalidSpec("template is not connected")

    def _template_connected(self) -> bool:
        total = self.a_count + self.b_count
        adj: list[list[int]] = [[] for _ in range(total)]
        for a, b, _ in self.template_edges:
            adj[a].append(self.a_count + b)
            adj[self.a_count + b].append(a)
        seen = {0}
        queue = deque([0])
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        return len(seen) == total


@dataclass(frozen=True, eq=False)
class SpecialTree:
    """A compiled special tree with its level and role bookkeeping."""

    digraph: Digraph
    levels: LevelAssignment
    roles: tuple[Role, ...]
    spec: SpecialTreeSpec

    @cached_property
    def a_vertices(self) -> frozenset[int]:
        return frozenset(range(self.spec.a_count))

    @cached_property
    def b_vertices(self) -> frozenset[int]:
        return frozenset(range(self.spec.a_count, self.spec.a_count + self.spec.b_count))

    @cached_property
    def template_pairs(self) -> tuple[tuple[int, int], ...]:
        """(A-vertex id, B-vertex id) per template edge, in spec order."""
        return tuple((a, self.spec.a_count + b) for a, b, _ in self.spec.template_edges)

    @cached_property
    def template_adjacency(self) -> dict[int, tuple[int, ...]]:
        adj: dict[int, list[int]] = {v: [] for v in sorted(self.a_vertices | self.b_vertices)}
        for a, b in self.template_pairs:
            adj[a].append(b)
            adj[b].append(a)
        return {v: tuple(sorted(ns)) for v, ns in adj.items()}

    @cached_property
    def tree_adjacency(self) -> tuple[tuple[int, ...], ...]:
        g = self.digraph
        return tuple(
            tuple(sorted(g.out_neighbors[v] + g.in_neighbors[v])) for v in range(g.vertex_count))

    def parents_from(self, root: int) -> tuple[int, ...]:
        """Parent array of the undirected tree rooted at `root` (root maps to itself)."""
        parent = [-1] * self.digraph.vertex_count
        parent[root] = root
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for w in self.tree_adjacency[u]:
                if parent[w] < 0:
                    parent[w] = u
                    queue.append(w)
        return tuple(parent)


def compile_tree(spec: SpecialTreeSpec) -> SpecialTree:
    """Compile a template into its digraph with deterministic numbering.

    A-vertices take ids 0..|A|-1, B-vertices follow, then the interior of
    each attached path in template-edge order.
    """
    a, b = spec.a_count, spec.b_count
    roles: list[Role] = [("A", i) for i in range(a)] + [("B", j) for j in range(b)]
    edges: list[tuple[int, int]] = []
    next_id = a + b
    for e_idx, (ai, bj, path) in enumerate(spec.template_edges):
        ids = [ai]
        for pos in range(1, path.length):
            ids.append(next_id)
            roles.append(("P", e_idx, pos))
            next_id += 1
        ids.append(a + bj)
        for step, c in enumerate(path.directions):
            u, v = ids[step], ids[step + 1]
            edges.append((u, v) if c == "1" else (v, u))
    g = Digraph.from_edges(next_id, edges)
    levels = compute_levels(g)
    if levels.height != spec.height:
        raise InvalidSpec("compiled height differs from template height")
    assert is_oriented_tree(g)
    return SpecialTree(g, levels, tuple(roles), spec)


def canned_triad() -> SpecialTreeSpec:
    """The 39-vertex triad whose H-coloring problem is NP-complete.

    Template: center c = A0 and arm tops A1, A2, A3 over B0, B1, B2.
    """
    P = OrientedPath
    return SpecialTreeSpec(
        a_count=4,
        b_count=3,
        height=4,
        template_edges=(
            (0, 0, P("111011")),
            (1, 0, P("110111")),
            (0, 1, P("110111")),
            (2, 1, P("111011")),
            (0, 2, P("11100111")),
            (3, 2, P("111011")),
        ),
    )


def _attached_paths(g: Digraph, levels: LevelAssignment, h: int
                    ) -> list[tuple[int, int, OrientedPath]]:
    """Split a balanced oriented tree into its maximal level-interior paths.

    Each returned triple is (bottom endpoint, top endpoint, direction string
    read from the bottom endpoint).
    """
    bottom = {v for v in range(g.vertex_count) if levels[v] == 0}
    top = {v for v in range(g.vertex_count) if levels[v] == h}
    ends = bottom | top
    adj = [sorted(g.out_neighbors[v] + g.in_neighbors[v]) for v in range(g.vertex_count)]
    paths = []
    seen_edges: set[tuple[int, int]] = set()
    for start in sorted(ends):
        for first in adj[start]:
            key = (min(start, first), max(start, first))
            if key in seen_edges:
                continue
            walk = [start, first]
            seen_edges.add(key)
            while walk[-1] not in ends:
                nxt = [w for w in adj[walk[-1]] if w != walk[-2]]
                if len(nxt) != 1:
                    raise InvalidSpec(
                        f"interior vertex {walk[-1]} has degree != 2; not a special tree")
                walk.append(nxt[0])
                seen_edges.add((min(walk[-2], walk[-1]), max(walk[-2], walk[-1])))
            if walk[0] in top:
                walk.reverse()
            dirs = "".join(
                "1" if (walk[i], walk[i + 1]) in g.edges else "0"
                for i in range(len(walk) - 1))
            paths.append((walk[0], walk[-1], OrientedPath(dirs)))
    return sorted(paths, key=lambda t: (t[0], t[1], t[2].directions))


def recover_top_bottom(
    g: Digraph, h: int, max_len: int | None = None
) -> tuple[frozenset[int], frozenset[int], frozenset[tuple[int, int]]]:
    """Recover (A, B, E) from a compiled special tree of height h.

    A and B are the level-0 and level-h vertices.  E is recovered from the
    digraph alone: it is the set of endpoint images of all homomorphisms
    into g from the common onto path Q of the attached paths.  Because Q is
    minimal, its image cannot descend back to level 0 midway, so exactly the
    template pairs survive.
    """
    levels = compute_levels(g)
    if levels.height != h:
        raise NotMinimal(f"digraph has height {levels.height}, expected {h}")
    a_set = frozenset(v for v in range(g.vertex_count) if levels[v] == 0)
    b_set = frozenset(v for v in range(g.vertex_count) if levels[v] == h)
    attached = _attached_paths(g, levels, h)
    distinct = sorted({str(p) for _, _, p in attached})
    q = common_onto_minimal_path([OrientedPath(s) for s in distinct], max_len)
    pairs = set()
    for start in range(g.vertex_count):
        reach = {start}
        for c in q.directions:
            nxt: set[int] = set()
            for v in reach:
                nxt.update(g.out_neighbors[v] if c == "1" else g.in_neighbors[v])
            reach = nxt
            if not reach:
                break
        for end in reach:
            pairs.add((start, end))
    return a_set, b_set, frozenset(pairs)


def dist_e(tree: SpecialTree, x: int, y: int) -> int:
    """Graph distance of two top/bottom vertices in the bipartite template."""
    adj = tree.template_adjacency
    if x not in adj or y not in adj:
        raise ValueError("dist_e arguments must be template (top or bottom) vertices")
    if x == y:
        return 0
    dist = {x: 0}
    queue = deque([x])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                if w == y:
                    return dist[w]
                queue.append(w)
    raise ValueError("template is disconnected")  # unreachable on valid trees


def e_step(tree: SpecialTree, s: frozenset[int]) -> frozenset[int]:
    """One template-neighborhood step from a one-sided vertex set."""
    if not s:
        return frozenset()
    in_a = s <= tree.a_vertices
    in_b = s <= tree.b_vertices
    if not (in_a or in_b):
        raise MixedLevels("set must lie within A or within B")
    out = set()
    for a, b in tree.template_pairs:
        if in_a and a in s:
            out.add(b)
        if in_b and b in s:
            out.add(a)
    return frozenset(out)


def e_neighborhood(tree: SpecialTree, s: frozenset[int], k: int) -> frozenset[int]:
    """k-fold iterated template neighborhood E_k(s)."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    cur = frozenset(s)
    if cur and not (cur <= tree.a_vertices or cur <= tree.b_vertices):
        raise MixedLevels("set must lie within A or within B")
    for _ in range(k):
        cur = e_step(tree, cur)
    return cur


def preceq(tree: SpecialTree, o: int, u: int, v: int) -> bool:
    """True iff u lies on the unique oriented path from o to v."""
    parent = tree.parents_from(o)
    w = v
    while True:
        if w == u:
            return True
        if w == o:
            return False
        w = parent[w]


def gen_random_special_tree(
    seed: int, a_count: int, b_count: int, h: int, max_path_len: int
) -> SpecialTreeSpec:
    """Seeded random template: a uniform spanning tree of the complete
    bipartite template with a uniformly sampled minimal path per edge."""
    import random

    from .errors import InvalidParams
    from .minpath import minimal_path_counts, sample_minimal_path

    if a_count < 1 or b_count < 1 or h < 1:
        raise InvalidParams("a_count, b_count and height must be positive")
    if max_path_len < h:
        raise InvalidParams("max_path_len must be at least the height")
    counts = minimal_path_counts(h, max_path_len)
    if all(counts[ln][0] == 0 for ln in range(1, max_path_len + 1)):
        raise InvalidParams(f"no minimal path of height {h} fits in {max_path_len}")
    rng = random.Random(seed)
    # Aldous-Broder walk on the complete bipartite template gives a uniform
    # spanning tree.
    total = a_count + b_count
    pairs: set[tuple[int, int]] = set()
    if total == 2:
        pairs.add((0, 0))
    else:
        visited = {0}
        cur = 0  # template vertices: 0..a-1 bottom, a..a+b-1 top
        while len(visited) < total:
            if cur < a_count:
                nxt = a_count + rng.randrange(b_count)
            else:
                nxt = rng.randrange(a_count)
            if nxt not in visited:
                visited.add(nxt)
                a, b = (cur, nxt - a_count) if cur < a_count else (nxt, cur - a_count)
                pairs.add((a, b))
            cur = nxt
    edges = tuple(
        (a, b, sample_minimal_path(rng, h, max_path_len)) for a, b in sorted(pairs))
    return SpecialTreeSpec(a_count, b_count, h, edges)


# .stree text format: `stree <|A|> <|B|> <h> <m>` then m lines
# `<a_index> <b_index> <path>`; '#' comments.

def format_stree(spec: SpecialTreeSpec) -> str:
    lines = [f"stree {spec.a_count} {spec.b_count} {spec.height} {len(spec.template_edges)}"]
    lines.extend(f"{a} {b} {p}" for a, b, p in spec.template_edges)
    return "\n".join(lines) + "\n"


def parse_stree(text: str) -> SpecialTreeSpec:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise InvalidFormat("empty template file")
    head = lines[0].split()
    if len(head) != 5 or head[0] != "stree":
        raise InvalidFormat(f"bad header line: {lines[0]!r}")
    try:
        a, b, h, m = (int(x) for x in head[1:])
    except ValueError as exc:
        raise InvalidFormat(f"bad header numbers: {lines[0]!r}") from exc
    body = lines[1:]
    if len(body) != m:
        raise InvalidFormat(f"expected {m} edge lines, found {len(body)}")
    edges = []
    for ln in body:
        parts = ln.split()
        if len(parts) != 3:
            raise InvalidFormat(f"bad edge line: {ln!r}")
        try:
            ai, bj = int(parts[0]), int(parts[1])
            path = OrientedPath(parts[2])
        except ValueError as exc:
            raise InvalidFormat(f"bad edge line: {ln!r}") from exc
        edges.append((ai, bj, path))
    return SpecialTreeSpec(a, b, h, tuple(edges))


def read_stree(path) -> SpecialTreeSpec:
    with open(path, "r", encoding="ascii") as fh:
        return parse_stree(fh.read())


def write_stree(path, spec: SpecialTreeSpec) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(format_stree(spec))


def format_roles(tree: SpecialTree) -> str:
    """Role sidecar: one `<vertex> <role>` line per vertex."""
    lines = []
    for v, role in enumerate(tree.roles):
        if role[0] == "A":
            lines.append(f"{v} A{role[1]}")
        elif role[0] == "B":
            lines.append(f"{v} B{role[1]}")
        else:
            lines.append(f"{v} P{role[1]}:{role[2]}")
    return "\n".join(lines) + "\n"
