"""Kochen-Specker hypergraph toolchain."""

from ._core import (
    HypergraphError,
    are_isomorphic,
    canonical_form,
    coordinatize,
    criticals,
    decompose,
    find_assignment,
    is_critical,
    is_ks,
    master,
    minimize,
    normalize,
    shuffle,
    size_class,
    stats,
)

__all__ = [
    "HypergraphError",
    "are_isomorphic",
    "canonical_form",
    "coordinatize",
    "criticals",
    "decompose",
    "find_assignment",
    "is_critical",
    "is_ks",
    "master",
    "minimize",
    "normalize",
    "shuffle",
    "size_class",
    "stats",
]
