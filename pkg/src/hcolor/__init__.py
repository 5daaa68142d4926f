"""Special oriented trees, H-coloring solvers, polymorphism search, and
the bounded-width / NP-complete dichotomy classifier built on them."""

__version__ = "0.1.0"
