"""Oriented paths as direction strings and minimal-path machinery.

A path of length m is a string over {'1', '0'}: '1' is an edge traversed
forward (level +1), '0' backward (level -1).  Positions 0..m are vertices;
position 0 is the initial vertex, position m the terminal one.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property

from .digraph import Digraph
from .errors import HeightMismatch, NotMinimal, SearchExhausted


@dataclass(frozen=True)
class OrientedPath:
    directions: str

    def __post_init__(self) -> None:
        if any(c not in "01" for c in self.directions):
            raise ValueError("directions must be a string over {'1', '0'}")

    @property
    def length(self) -> int:
        return len(self.directions)

    @property
    def vertex_count(self) -> int:
        return len(self.directions) + 1

    @cached_property
    def levels(self) -> tuple[int, ...]:
        """Vertex levels: prefix sums of +-1 shifted so the minimum is 0."""
        levels = [0]
        for c in self.directions:
            levels.append(levels[-1] + (1 if c == "1" else -1))
        low = min(levels)
        return tuple(lv - low for lv in levels)

    @property
    def height(self) -> int:
        return max(self.levels)

    def to_digraph(self) -> Digraph:
        edges = []
        for i, c in enumerate(self.directions):
            edges.append((i, i + 1) if c == "1" else ((i + 1, i)))
        return Digraph.from_edges(self.vertex_count, edges)

    def __str__(self) -> str:
        return self.directions


def net_length(p: OrientedPath) -> int:
    """Forward edges minus backward edges."""
    return p.directions.count("1") - p.directions.count("0")


def is_minimal(p: OrientedPath) -> bool:
    """Initial vertex at level 0, terminal at the height, interior strictly between."""
    levels = p.levels
    h = max(levels)
    if levels[0] != 0 or levels[-1] != h:
        return False
    return all(0 < lv < h for lv in levels[1:-1])


def path_onto_hom(q: OrientedPath, p: OrientedPath) -> tuple[int, ...] | None:
    """A position map q -> p preserving edges, endpoints to endpoints, onto p.

    Any endpoint-pinned homomorphism between paths is automatically onto:
    its image is a walk from position 0 to the last position of p, and a
    +-1 walk covers every position in between.  The map is found by forward
    reachability over positions and reconstructed backwards.
    """
    m = p.length
    reach: list[set[int]] = [{0}]
    for c in q.directions:
        cur = reach[-1]
        nxt: set[int] = set()
        for pos in cur:
            if c == "1":
                if pos < m and p.directions[pos] == "1":
                    nxt.add(pos + 1)
                if pos > 0 and p.directions[pos - 1] == "0":
                    nxt.add(pos - 1)
            else:
                if pos < m and p.directions[pos] == "0":
                    nxt.add(pos + 1)
                if pos > 0 and p.directions[pos - 1] == "1":
                    nxt.add(pos - 1)
        if not nxt:
            return None
        reach.append(nxt)
    if m not in reach[-1]:
        return None
    # walk back from the pinned terminal position
    positions = [m]
    for j in range(q.length, 0, -1):
        c = q.directions[j - 1]
        cur = positions[-1]
        chosen = None
        for prev in sorted(reach[j - 1]):
            if c == "1":
                ok = (prev + 1 == cur and prev < m and p.directions[prev] == "1") or (
                    prev - 1 == cur and prev > 0 and p.directions[prev - 1] == "0")
            else:
                ok = (prev + 1 == cur and prev < m and p.directions[prev] == "0") or (
                    prev - 1 == cur and prev > 0 and p.directions[prev - 1] == "1")
            if ok:
                chosen = prev
                break
        assert chosen is not None
        positions.append(chosen)
    positions.reverse()
    assert positions[0] == 0 and set(positions) == set(range(m + 1))
    return tuple(positions)


def minimal_path_counts(height: int, max_len: int) -> dict[int, list[int]]:
    """Suffix counts for minimal-path sampling.

    counts[j][lvl] is the number of direction strings of length j that start
    at level lvl, keep every level before the last step inside [1, height-1],
    and end exactly at the height.
    """
    counts: dict[int, list[int]] = {0: [0] * (height + 1)}
    counts[0][height] = 1
    for j in range(1, max_len + 1):
        row = [0] * (height + 1)
        prev = counts[j - 1]
        for lvl in range(height + 1):
            total = 0
            for nl in (lvl + 1, lvl - 1):
                if j == 1:
                    if nl == height:
                        total += prev[nl]
                elif 1 <= nl <= height - 1:
                    total += prev[nl]
            row[lvl] = total
        counts[j] = row
    return counts


def sample_minimal_path(rng, height: int, max_len: int) -> OrientedPath:
    """Uniform sample over all minimal paths of the height with length <= max_len."""
    counts = minimal_path_counts(height, max_len)
    weights = {length: counts[length][0] for length in range(1, max_len + 1)
               if counts[length][0] > 0}
    if not weights:
        raise ValueError(f"no minimal path of height {height} fits in length {max_len}")
    total = sum(weights.values())
    pick = rng.randrange(total)
    for length, w in sorted(weights.items()):
        if pick < w:
            break
        pick -= w
    dirs = []
    lvl = 0
    for j in range(length, 0, -1):
        options = []
        for c, nl in (("1", lvl + 1), ("0", lvl - 1)):
            if j == 1:
                if nl == height:
                    options.append((c, nl, counts[j - 1][nl]))
            elif 1 <= nl <= height - 1:
                w = counts[j - 1][nl]
                if w:
                    options.append((c, nl, w))
        total = sum(w for _, _, w in options)
        pick = rng.randrange(total)
        for c, nl, w in options:
            if pick < w:
                break
            pick -= w
        dirs.append(c)
        lvl = nl
    p = OrientedPath("".join(dirs))
    assert is_minimal(p) and p.height == height
    return p


def _step_masks(p: OrientedPath) -> tuple[int, int, int, int]:
    """Bitmask step tables for walking over p's positions.

    Returns masks of positions allowed to move right/left under a forward
    ('1') and a backward ('0') step of the walking path.
    """
    fwd_right = fwd_left = bwd_right = bwd_left = 0
    for pos, c in enumerate(p.directions):
        if c == "1":
            fwd_right |= 1 << pos
            bwd_left |= 1 << (pos + 1)
        else:
            bwd_right |= 1 << pos
            fwd_left |= 1 << (pos + 1)
    return fwd_right, fwd_left, bwd_right, bwd_left


def common_onto_minimal_path(
    paths: list[OrientedPath], max_len: int | None = None
) -> OrientedPath:
    """A shortest minimal path mapping onto every input, endpoints pinned.

    Inputs must be minimal paths of one common height h.  The search runs
    breadth-first over direction strings; a state keeps, per input path, the
    set of positions an endpoint-pinned homomorphism can currently occupy.
    The result is re-verified with path_onto_hom before it is returned.
    """
    if not paths:
        raise ValueError("need at least one path")
    for p in paths:
        if not is_minimal(p):
            raise NotMinimal(f"path {p} is not minimal")
    h = paths[0].height
    if any(p.height != h for p in paths):
        raise HeightMismatch("input paths must share one height")
    if max_len is None:
        max_len = max(4 * sum(p.length for p in paths), 4)

    masks = [_step_masks(p) for p in paths]
    goals = [1 << p.length for p in paths]
    start = (0, tuple(1 << 0 for _ in paths))

    def accepting(state: tuple[int, tuple[int, ...]]) -> bool:
        level, pos = state
        return level == h and all(pos[i] & goals[i] for i in range(len(paths)))

    def rebuild(state, parents) -> str:
        out = []
        while state in parents:
            state, c = parents[state]
            out.append(c)
        return "".join(reversed(out))

    if accepting(start):  # height-0 degenerate case
        return OrientedPath("")

    parents: dict = {}
    seen = {start}
    frontier = deque([start])
    length = 0
    while frontier and length < max_len:
        length += 1
        for _ in range(len(frontier)):
            level, pos = frontier.popleft()
            for c in "10":
                nl = level + (1 if c == "1" else -1)
                # minimality: level h only at the terminal, level 0 only at
                # the start, everything else strictly between
                if nl < 1 or nl > h:
                    continue
                npos = []
                dead = False
                for i, pm in enumerate(pos):
                    fr, fl, br, bl = masks[i]
                    if c == "1":
                        nm = ((pm & fr) << 1) | ((pm & fl) >> 1)
                    else:
                        nm = ((pm & br) << 1) | ((pm & bl) >> 1)
                    if not nm:
                        dead = True
                        break
                    npos.append(nm)
                if dead:
                    continue
                state = (nl, tuple(npos))
                if state in seen:
                    continue
                seen.add(state)
                parents[state] = ((level, pos), c)
                if accepting(state):
                    q = OrientedPath(rebuild(state, parents))
                    assert is_minimal(q) and q.height == h
                    for p in paths:
                        assert path_onto_hom(q, p) is not None
                    return q
                if nl < h:  # level-h states are terminal only
                    frontier.append(state)
    raise SearchExhausted(
        f"no common path of length <= {max_len}; the cap is undersized")
