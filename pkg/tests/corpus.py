"""Deterministic corpora shared by the test suites."""

import random

from hcolor.digraph import Digraph
from hcolor.spectree import compile_tree, gen_random_special_tree

TREE_SHAPES = [
    (2, 2, 3, 7), (3, 2, 3, 5), (2, 3, 3, 5), (3, 3, 2, 2), (2, 2, 4, 6),
    (4, 3, 2, 2), (1, 1, 4, 8), (2, 1, 4, 6), (1, 2, 3, 7), (3, 4, 2, 2),
    (2, 2, 2, 2), (1, 3, 3, 5), (3, 1, 3, 5), (1, 1, 3, 9), (2, 3, 2, 2),
]


def random_special_trees(count: int, max_vertices: int = 30, seed_base: int = 1000):
    """`count` seeded random templates compiling to at most max_vertices."""
    specs = []
    seed = seed_base
    shape = 0
    while len(specs) < count:
        a, b, h, max_len = TREE_SHAPES[shape % len(TREE_SHAPES)]
        shape += 1
        spec = gen_random_special_tree(seed, a, b, h, max_len)
        seed += 1
        if compile_tree(spec).digraph.vertex_count <= max_vertices:
            specs.append(spec)
    return specs


def random_digraph(rng: random.Random, max_n: int, density: float = 0.35,
                   loops: bool = False) -> Digraph:
    n = rng.randint(1, max_n)
    edges = [(u, v) for u in range(n) for v in range(n)
             if (loops or u != v) and rng.random() < density]
    return Digraph.from_edges(n, edges)


def random_tree_like(rng: random.Random, max_n: int) -> Digraph:
    """A random oriented tree; often solvable against balanced targets."""
    n = rng.randint(2, max_n)
    edges = []
    for v in range(1, n):
        u = rng.randrange(v)
        edges.append((u, v) if rng.random() < 0.5 else (v, u))
    return Digraph.from_edges(n, edges)
