"""Quasi-sure supports and polar events.

A child is in a node's support when some generator gives it positive weight;
a node is relevant when every edge on its path from the root is supported.
Everything off the relevant part of the tree is polar: null under every
measure of the ambiguity family.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .model import Measure, PathMeasure, ScenarioTree, product_measure


@dataclass(frozen=True)
class SupportMask:
    node_support: dict[str, tuple[str, ...]]  # non-leaf node -> supported children
    relevant_nodes: tuple[tuple[str, ...], ...]  # per level, document order
    relevant_leaves: tuple[str, ...]

    def is_relevant(self, node_id: str) -> bool:
        return node_id in self._relevant_set

    @property
    def _relevant_set(self) -> frozenset[str]:
        cached = getattr(self, "_relevant_cache", None)
        if cached is None:
            cached = frozenset(n for level in self.relevant_nodes for n in level)
            object.__setattr__(self, "_relevant_cache", cached)
        return cached

    def relevant_nonleaf(self, tree: ScenarioTree) -> list[str]:
        """Relevant non-leaf nodes, level by level, document order."""
        return [n for level in self.relevant_nodes[:-1] for n in level]


def compute_support(tree: ScenarioTree) -> SupportMask:
    """One top-down pass; no fixpoint needed since polarity is hereditary
    along paths."""
    node_support: dict[str, tuple[str, ...]] = {}
    for level in range(tree.horizon):
        for node_id in tree.levels[level]:
            node = tree.nodes[node_id]
            assert node.ambiguity is not None
            supported = set()
            for g in node.ambiguity.generators:
                supported.update(g.support())
            node_support[node_id] = tuple(c for c in node.children if c in supported)

    relevant: list[list[str]] = [[tree.root]]
    alive = {tree.root}
    for level in range(tree.horizon):
        next_level: list[str] = []
        for node_id in tree.levels[level]:
            if node_id not in alive:
                continue
            for child in node_support[node_id]:
                alive.add(child)
        for child_id in tree.levels[level + 1]:
            if child_id in alive:
                next_level.append(child_id)
        relevant.append(next_level)

    return SupportMask(
        node_support=node_support,
        relevant_nodes=tuple(tuple(lv) for lv in relevant),
        relevant_leaves=tuple(relevant[tree.horizon]),
    )


def is_polar(tree: ScenarioTree, mask: SupportMask, leaves: set[str] | frozenset[str]) -> bool:
    """True iff the leaf event is null under every measure of the family."""
    unknown = leaves - set(tree.leaves)
    if unknown:
        raise ValueError(f"not leaves of the tree: {sorted(unknown)}")
    return not (leaves & set(mask.relevant_leaves))


def reference_kernels(tree: ScenarioTree) -> dict[str, Measure]:
    """Uniform mixture of generators at every non-leaf node.

    Any strictly positive mixture would do as the canonical selector with
    maximal support; uniform keeps it deterministic.
    """
    kernels: dict[str, Measure] = {}
    for level in range(tree.horizon):
        for node_id in tree.levels[level]:
            node = tree.nodes[node_id]
            assert node.ambiguity is not None
            kernels[node_id] = node.ambiguity.uniform_mixture()
    return kernels


def reference_measure(tree: ScenarioTree) -> PathMeasure:
    """The product of the uniform-mixture kernels; its support is exactly
    the relevant leaves."""
    return product_measure(tree, reference_kernels(tree))


def node_mass(tree: ScenarioTree, measure: PathMeasure) -> dict[str, Fraction]:
    """Total leaf mass under every node (root mass is 1 for a probability)."""
    mass: dict[str, Fraction] = {leaf: measure(leaf) for leaf in tree.leaves}
    for level in range(tree.horizon - 1, -1, -1):
        for node_id in tree.levels[level]:
            mass[node_id] = sum(
                (mass[c] for c in tree.nodes[node_id].children), Fraction(0)
            )
    return mass
