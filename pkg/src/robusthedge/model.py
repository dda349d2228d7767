"""Finite market model: event tree, per-node ambiguity sets, options and claims.

The market lives on a finite scenario tree. Each node carries a d-dimensional
discounted price vector; each non-leaf node carries a finitely generated
ambiguity set (the convex hull of its generator measures) over its children.
Probability weights, prices, option quotes and claim values are exact
rationals; validation happens once at load time and every object is treated
as immutable afterwards, so models are safe to share across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .rational import RationalParseError, format_rational, to_rational


class ModelError(Exception):
    """Base class for model ingestion and evaluation errors."""


class MalformedDocument(ModelError):
    pass


class ProbabilityNotNormalized(ModelError):
    def __init__(self, node: str, generator: int, message: str):
        super().__init__(message)
        self.node = node
        self.generator = generator


class DanglingChildReference(ModelError):
    def __init__(self, node: str, child: str):
        super().__init__(f"node {node!r}: reference to unknown child {child!r}")
        self.node = node
        self.child = child


class DimensionMismatch(ModelError):
    def __init__(self, node: str, expected: int, got: int):
        super().__init__(
            f"node {node!r}: price vector has {got} coordinates, expected {expected}"
        )
        self.node = node


class MissingKernel(ModelError):
    def __init__(self, node: str):
        super().__init__(f"no transition kernel supplied for reachable node {node!r}")
        self.node = node


@dataclass(frozen=True)
class Measure:
    """One-step transition measure: child id -> weight, nonnegative, sum 1."""

    weights: dict[str, Fraction]

    def validate(self, tol: float = 0.0) -> None:
        total = Fraction(0)
        for child, w in self.weights.items():
            if w < 0:
                raise ValueError(f"negative weight {w} on {child!r}")
            total += w
        if tol == 0.0:
            if total != 1:
                raise ValueError(f"weights sum to {total}, not 1")
        elif abs(float(total) - 1.0) > tol:
            raise ValueError(f"weights sum to {float(total)}, outside tolerance {tol}")

    def __call__(self, child: str) -> Fraction:
        return self.weights.get(child, Fraction(0))

    def support(self) -> tuple[str, ...]:
        return tuple(c for c, w in self.weights.items() if w > 0)


@dataclass(frozen=True)
class AmbiguitySet:
    """Finitely generated set of transition measures; semantics = convex hull."""

    generators: tuple[Measure, ...]

    def uniform_mixture(self) -> Measure:
        """Average of the generators: a strictly representative selector."""
        k = len(self.generators)
        mixed: dict[str, Fraction] = {}
        for g in self.generators:
            for child, w in g.weights.items():
                mixed[child] = mixed.get(child, Fraction(0)) + w
        return Measure({c: w / k for c, w in mixed.items()})


@dataclass(frozen=True)
class Node:
    id: str
    level: int
    parent: str | None
    price: tuple[Fraction, ...]
    children: tuple[str, ...]
    ambiguity: AmbiguitySet | None  # None exactly at leaves

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass(frozen=True)
class ScenarioTree:
    horizon: int
    dimension: int
    nodes: dict[str, Node]
    root: str
    levels: tuple[tuple[str, ...], ...]  # node ids per level, document order

    @property
    def leaves(self) -> tuple[str, ...]:
        return self.levels[self.horizon]

    def node(self, node_id: str) -> Node:
        return self.nodes[node_id]

    def increment(self, parent: str, child: str) -> tuple[Fraction, ...]:
        """Price increment S(child) - S(parent)."""
        p = self.nodes[parent].price
        c = self.nodes[child].price
        return tuple(c[i] - p[i] for i in range(self.dimension))

    def path(self, leaf: str) -> tuple[str, ...]:
        """Node ids from the root to the given leaf, inclusive."""
        ids = [leaf]
        while (parent := self.nodes[ids[-1]].parent) is not None:
            ids.append(parent)
        ids.reverse()
        return tuple(ids)


@dataclass(frozen=True)
class PathMeasure:
    """Probability vector over leaves."""

    weights: dict[str, Fraction]

    def validate(self) -> None:
        total = Fraction(0)
        for leaf, w in self.weights.items():
            if w < 0:
                raise ValueError(f"negative weight {w} on leaf {leaf!r}")
            total += w
        if total != 1:
            raise ValueError(f"leaf weights sum to {total}, not 1")

    def __call__(self, leaf: str) -> Fraction:
        return self.weights.get(leaf, Fraction(0))

    def support(self) -> tuple[str, ...]:
        return tuple(leaf for leaf, w in self.weights.items() if w > 0)


@dataclass(frozen=True)
class StaticOption:
    """Traded option: raw payoff per leaf plus its time-0 quote.

    The engine works with the normalized payoff (payoff - quote), so the
    normalized quote is always 0.
    """

    name: str
    quote: Fraction
    payoff: dict[str, Fraction]

    def normalized(self, leaf: str) -> Fraction:
        return self.payoff[leaf] - self.quote


@dataclass(frozen=True)
class Claim:
    """Contingent claim: finite value per leaf."""

    values: dict[str, Fraction]

    def __call__(self, leaf: str) -> Fraction:
        return self.values[leaf]


@dataclass(frozen=True)
class Strategy:
    """Semistatic strategy: initial capital, static option positions,
    and a predictable stock position chosen at each non-leaf node.

    Nodes absent from `dynamic` hold the zero position (polar nodes default
    to zero).
    """

    initial: Fraction
    static: tuple[Fraction, ...]
    dynamic: dict[str, tuple[Fraction, ...]] = field(default_factory=dict)

    def position(self, node_id: str, dimension: int) -> tuple[Fraction, ...]:
        return self.dynamic.get(node_id, (Fraction(0),) * dimension)


@dataclass(frozen=True)
class Model:
    """A validated market: tree, traded options, named claims, and the
    optional named adapted processes / path measures the CLI can reference."""

    tree: ScenarioTree
    options: tuple[StaticOption, ...]
    claims: dict[str, Claim]
    processes: dict[str, dict[str, Fraction]] = field(default_factory=dict)
    measures: dict[str, PathMeasure] = field(default_factory=dict)


def _reject_constant(token: str) -> None:
    raise MalformedDocument(f"non-finite number {token!r} is not a valid rational")


def _rational(raw: object, where: str) -> Fraction:
    try:
        return to_rational(raw)
    except RationalParseError as exc:
        raise MalformedDocument(f"{where}: {exc}") from exc


def load_model(text: str) -> Model:
    """Parse and validate a model document (see README for the schema).

    JSON numbers are parsed exactly: decimals through scaled integers,
    never through binary floats.
    """
    try:
        doc = json.loads(text, parse_float=Fraction, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise MalformedDocument("top level must be an object")

    horizon = doc.get("horizon")
    if not isinstance(horizon, int) or isinstance(horizon, bool) or horizon < 1:
        raise MalformedDocument("'horizon' must be an integer >= 1")

    raw_nodes = doc.get("nodes")
    if not isinstance(raw_nodes, list) or not raw_nodes:
        raise MalformedDocument("'nodes' must be a nonempty array")

    # First pass: identities, levels, parents, prices.
    parsed = []
    ids: set[str] = set()
    for entry in raw_nodes:
        if not isinstance(entry, dict) or "id" not in entry:
            raise MalformedDocument("every node needs an 'id'")
        node_id = str(entry["id"])
        if node_id in ids:
            raise MalformedDocument(f"duplicate node id {node_id!r}")
        ids.add(node_id)
        level = entry.get("level")
        if not isinstance(level, int) or isinstance(level, bool) or not 0 <= level <= horizon:
            raise MalformedDocument(f"node {node_id!r}: bad level {level!r}")
        parent = entry.get("parent")
        parent_id = None if parent is None else str(parent)
        raw_price = entry.get("price")
        if not isinstance(raw_price, list) or not raw_price:
            raise MalformedDocument(f"node {node_id!r}: 'price' must be a nonempty array")
        price = tuple(_rational(p, f"node {node_id!r} price") for p in raw_price)
        parsed.append((node_id, level, parent_id, price, entry.get("generators")))

    dimension = doc.get("dimension")
    if dimension is None:
        dimension = len(parsed[0][3])
    elif not isinstance(dimension, int) or isinstance(dimension, bool) or dimension < 1:
        raise MalformedDocument("'dimension' must be an integer >= 1")

    roots = [p for p in parsed if p[2] is None]
    if len(roots) != 1:
        raise MalformedDocument(f"expected exactly one root node, found {len(roots)}")
    root_id, root_level = roots[0][0], roots[0][1]
    if root_level != 0:
        raise MalformedDocument(f"root node {root_id!r} must be at level 0")

    children: dict[str, list[str]] = {p[0]: [] for p in parsed}
    level_of = {p[0]: p[1] for p in parsed}
    for node_id, level, parent_id, price, _ in parsed:
        if len(price) != dimension:
            raise DimensionMismatch(node_id, dimension, len(price))
        if parent_id is None:
            continue
        if parent_id not in children:
            raise MalformedDocument(f"node {node_id!r}: unknown parent {parent_id!r}")
        if level != level_of[parent_id] + 1:
            raise MalformedDocument(
                f"node {node_id!r}: level {level} is not parent level + 1"
            )
        children[parent_id].append(node_id)

    # Second pass: ambiguity sets over the now-known children.
    nodes: dict[str, Node] = {}
    for node_id, level, parent_id, price, raw_gens in parsed:
        kids = tuple(children[node_id])
        if level == horizon and kids:
            raise MalformedDocument(f"node {node_id!r} at level {horizon} has children")
        if level < horizon and not kids:
            raise MalformedDocument(
                f"node {node_id!r} at level {level} < horizon has no children"
            )
        ambiguity = None
        if kids:
            if not isinstance(raw_gens, list) or not raw_gens:
                raise MalformedDocument(
                    f"node {node_id!r}: 'generators' must be a nonempty array"
                )
            gens = []
            kid_set = set(kids)
            for g_index, raw_g in enumerate(raw_gens):
                if not isinstance(raw_g, dict):
                    raise MalformedDocument(
                        f"node {node_id!r}: generator {g_index} must be an object"
                    )
                weights: dict[str, Fraction] = {}
                for child_key, raw_w in raw_g.items():
                    child = str(child_key)
                    if child not in kid_set:
                        raise DanglingChildReference(node_id, child)
                    weights[child] = _rational(
                        raw_w, f"node {node_id!r} generator {g_index}"
                    )
                measure = Measure({c: weights.get(c, Fraction(0)) for c in kids})
                try:
                    measure.validate()
                except ValueError as exc:
                    raise ProbabilityNotNormalized(
                        node_id, g_index, f"node {node_id!r} generator {g_index}: {exc}"
                    ) from exc
                gens.append(measure)
            ambiguity = AmbiguitySet(tuple(gens))
        nodes[node_id] = Node(node_id, level, parent_id, price, kids, ambiguity)

    levels: list[list[str]] = [[] for _ in range(horizon + 1)]
    for node_id, level, _, _, _ in parsed:
        levels[level].append(node_id)
    tree = ScenarioTree(
        horizon=horizon,
        dimension=dimension,
        nodes=nodes,
        root=root_id,
        levels=tuple(tuple(lv) for lv in levels),
    )
    leaf_set = set(tree.leaves)

    def leaf_map(raw: object, where: str, complete: bool) -> dict[str, Fraction]:
        if not isinstance(raw, dict):
            raise MalformedDocument(f"{where} must be an object of leaf values")
        out: dict[str, Fraction] = {}
        for key, val in raw.items():
            leaf = str(key)
            if leaf not in leaf_set:
                raise MalformedDocument(f"{where}: {leaf!r} is not a leaf")
            out[leaf] = _rational(val, f"{where} at leaf {leaf!r}")
        if complete:
            for leaf in tree.leaves:
                if leaf not in out:
                    raise MalformedDocument(f"{where}: missing value at leaf {leaf!r}")
            out = {leaf: out[leaf] for leaf in tree.leaves}
        return out

    options: list[StaticOption] = []
    for k, raw_opt in enumerate(doc.get("options", []) or []):
        if not isinstance(raw_opt, dict) or "name" not in raw_opt:
            raise MalformedDocument(f"option {k}: needs 'name', 'quote' and 'payoff'")
        name = str(raw_opt["name"])
        quote = _rational(raw_opt.get("quote", 0), f"option {name!r} quote")
        payoff = leaf_map(raw_opt.get("payoff"), f"option {name!r} payoff", complete=True)
        options.append(StaticOption(name, quote, payoff))

    claims: dict[str, Claim] = {}
    for name, raw_claim in (doc.get("claims", {}) or {}).items():
        claims[str(name)] = Claim(
            leaf_map(raw_claim, f"claim {name!r}", complete=True)
        )

    processes: dict[str, dict[str, Fraction]] = {}
    for name, raw_proc in (doc.get("processes", {}) or {}).items():
        if not isinstance(raw_proc, dict):
            raise MalformedDocument(f"process {name!r} must be an object of node values")
        values: dict[str, Fraction] = {}
        for key, val in raw_proc.items():
            node_id = str(key)
            if node_id not in nodes:
                raise MalformedDocument(f"process {name!r}: unknown node {node_id!r}")
            values[node_id] = _rational(val, f"process {name!r} at node {node_id!r}")
        processes[str(name)] = values

    measures: dict[str, PathMeasure] = {}
    for name, raw_meas in (doc.get("measures", {}) or {}).items():
        pm = PathMeasure(leaf_map(raw_meas, f"measure {name!r}", complete=False))
        try:
            pm.validate()
        except ValueError as exc:
            raise MalformedDocument(f"measure {name!r}: {exc}") from exc
        measures[str(name)] = pm

    return Model(tree, tuple(options), claims, processes, measures)


def save_model(model: Model) -> str:
    """Emit the document schema with exact "p/q" strings; load_model of the
    result reproduces the model bit-exactly."""
    tree = model.tree
    raw_nodes = []
    for level_ids in tree.levels:
        for node_id in level_ids:
            node = tree.nodes[node_id]
            entry: dict[str, object] = {
                "id": node.id,
                "level": node.level,
                "parent": node.parent,
                "price": [format_rational(p) for p in node.price],
            }
            if node.ambiguity is not None:
                entry["generators"] = [
                    {c: format_rational(g.weights[c]) for c in node.children}
                    for g in node.ambiguity.generators
                ]
            raw_nodes.append(entry)
    doc = {
        "horizon": tree.horizon,
        "dimension": tree.dimension,
        "nodes": raw_nodes,
        "options": [
            {
                "name": opt.name,
                "quote": format_rational(opt.quote),
                "payoff": {leaf: format_rational(opt.payoff[leaf]) for leaf in tree.leaves},
            }
            for opt in model.options
        ],
        "claims": {
            name: {leaf: format_rational(claim.values[leaf]) for leaf in tree.leaves}
            for name, claim in model.claims.items()
        },
        "processes": {
            name: {nid: format_rational(v) for nid, v in vals.items()}
            for name, vals in model.processes.items()
        },
        "measures": {
            name: {leaf: format_rational(w) for leaf, w in pm.weights.items()}
            for name, pm in model.measures.items()
        },
    }
    return json.dumps(doc, indent=2)


def wealth(
    tree: ScenarioTree,
    strategy: Strategy,
    options: tuple[StaticOption, ...] | list[StaticOption],
    leaf: str,
) -> Fraction:
    """Terminal wealth x + sum_u H_u . dS_u + h . g along the root-to-leaf
    path, with option payoffs normalized by their quotes."""
    node = tree.nodes[leaf]
    if not node.is_leaf:
        raise ValueError(f"{leaf!r} is not a leaf")
    total = strategy.initial
    path = tree.path(leaf)
    for parent_id, child_id in zip(path, path[1:]):
        position = strategy.position(parent_id, tree.dimension)
        step = tree.increment(parent_id, child_id)
        for i in range(tree.dimension):
            total += position[i] * step[i]
    for k, opt in enumerate(options):
        h = strategy.static[k] if k < len(strategy.static) else Fraction(0)
        total += h * opt.normalized(leaf)
    return total


def product_measure(tree: ScenarioTree, kernels: dict[str, Measure]) -> PathMeasure:
    """Multiply one-step kernels along paths into a measure on leaves.

    Kernels must cover every node reachable with positive mass; kernels at
    unreachable nodes are ignored. The result is exactly normalized because
    each factor is.
    """
    mass: dict[str, Fraction] = {tree.root: Fraction(1)}
    for level in range(tree.horizon):
        for node_id in tree.levels[level]:
            w = mass.get(node_id, Fraction(0))
            if w == 0:
                continue
            node = tree.nodes[node_id]
            kernel = kernels.get(node_id)
            if kernel is None:
                raise MissingKernel(node_id)
            for child_key in kernel.weights:
                if child_key not in node.children:
                    raise DanglingChildReference(node_id, child_key)
            for child in node.children:
                cw = w * kernel(child)
                if cw != 0:
                    mass[child] = mass.get(child, Fraction(0)) + cw
    weights = {leaf: mass[leaf] for leaf in tree.leaves if mass.get(leaf, Fraction(0)) > 0}
    result = PathMeasure(weights)
    result.validate()
    return result
