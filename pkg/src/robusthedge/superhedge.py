"""Superhedging prices, optimal semistatic strategies and price intervals.

Two independent routes compute the same number (zero duality gap, exact in
rational mode): a backward recursion of one-step LPs down the relevant tree,
and a single global LP over (initial capital, option positions, node
positions) whose row duals form the optimizing martingale measure. On top of
these sit price intervals, replication and completeness tests, the Lagrange
reformulation check, and the pathwise martingale-inequality prover.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import lp
from .arbitrage import (
    ArbitrageFound,
    _HedgeLayout,
    global_na,
    martingale_rows,
    semistatic_na,
)
from .model import Claim, PathMeasure, ScenarioTree, StaticOption, Strategy, wealth
from .polar import SupportMask

F = Fraction

POINT = "Point"
OPEN_INTERVAL = "OpenInterval"


class ArbitrageDetected(Exception):
    """The market (with its quoted options) admits arbitrage; prices are
    undefined. Carries the failing certificate and, when the stocks alone
    are fine, each offending option's own price interval as a hint."""

    def __init__(self, message: str, found: ArbitrageFound | None = None):
        super().__init__(message)
        self.found = found


class LocalArbitrage(Exception):
    """node_price called at a node violating local NA."""


class LagrangeGap(Exception):
    """The Lagrange reformulation disagreed with the direct price (a bug,
    not a market property)."""


_UNUSED = object()


@dataclass(frozen=True)
class ValueSurface:
    """Backward-recursion values and hedges on the relevant tree; polar
    nodes carry the Unused sentinel and the zero hedge."""

    values: dict[str, Fraction]
    hedges: dict[str, tuple[Fraction, ...]]

    UNUSED = _UNUSED

    def value(self, node_id: str):
        return self.values.get(node_id, _UNUSED)

    def hedge(self, node_id: str, dimension: int) -> tuple[Fraction, ...]:
        return self.hedges.get(node_id, (F(0),) * dimension)


@dataclass(frozen=True)
class PriceInterval:
    lower: Fraction
    upper: Fraction

    @property
    def kind(self) -> str:
        return POINT if self.lower == self.upper else OPEN_INTERVAL


@dataclass(frozen=True)
class Replicable:
    price: Fraction
    strategy: Strategy


@dataclass(frozen=True)
class NotReplicable:
    q_low: PathMeasure
    q_high: PathMeasure
    interval: PriceInterval


@dataclass(frozen=True)
class Proved:
    strategy: Strategy


@dataclass(frozen=True)
class Refuted:
    q: PathMeasure
    expectation: Fraction


def node_price(
    tree: ScenarioTree,
    mask: SupportMask,
    node_id: str,
    child_values: dict[str, Fraction],
    mode: lp.Mode = lp.EXACT,
) -> tuple[Fraction, tuple[Fraction, ...]]:
    """One-step superhedging: the largest one-step martingale expectation of
    the child values, with the dual hedge y satisfying
    value + y.dS_c >= child value on every supported child."""
    support = mask.node_support[node_id]
    d = tree.dimension
    increments = [tree.increment(node_id, c) for c in support]
    k = len(support)
    objective = [child_values[c] for c in support]
    constraints = []
    for i in range(d):
        constraints.append(([inc[i] for inc in increments], "=", F(0)))
    constraints.append(([F(1)] * k, "=", F(1)))
    prog = lp.linear_program(objective, maximize=True, constraints=constraints)
    out = lp.solve(prog, mode)
    if isinstance(out, lp.Infeasible):
        raise LocalArbitrage(f"no one-step martingale weights at node {node_id!r}")
    assert isinstance(out, lp.Optimal)
    hedge = tuple(out.dual[i] for i in range(d))
    if mode.exact:
        for c, inc in zip(support, increments):
            gap = out.value + _dot(hedge, inc) - child_values[c]
            if gap < 0:
                raise RuntimeError("one-step hedge failed re-verification (bug)")
    return out.value, hedge


def _dot(a, b):
    return sum((x * y for x, y in zip(a, b)), F(0))


def _require_stock_na(tree, mask, mode):
    found = global_na(tree, mask, mode)
    if found is not None:
        node = next(iter(found.strategy.dynamic))
        raise ArbitrageDetected(
            f"market admits arbitrage at node {node!r}", found
        )


def _no_consistent_measure(tree, mask, options, mode):
    """Build the ArbitrageDetected for an empty option-constrained polytope,
    hinting at each option whose quote leaves its stocks-only price range."""
    hints = []
    for opt in options:
        raw = Claim({leaf: opt.payoff[leaf] for leaf in tree.leaves})
        upper, _, _ = superhedge_semistatic(tree, mask, raw, (), mode)
        negated = Claim({leaf: -v for leaf, v in raw.values.items()})
        lower_neg, _, _ = superhedge_semistatic(tree, mask, negated, (), mode)
        lower = -lower_neg
        if opt.quote < lower or opt.quote > upper:
            hints.append(
                f"option {opt.name!r} quoted {opt.quote} outside its "
                f"stocks-only price interval [{lower}, {upper}]"
            )
    detail = (
        "; ".join(hints)
        if hints
        else "option quotes jointly admit arbitrage (no consistent martingale measure)"
    )
    return ArbitrageDetected(detail, semistatic_na(tree, mask, options, mode))


def superhedge_dynamic(
    tree: ScenarioTree,
    mask: SupportMask,
    claim: Claim,
    mode: lp.Mode = lp.EXACT,
) -> tuple[Fraction, ValueSurface, Strategy]:
    """Backward recursion over the relevant tree (stocks only): the composed
    one-step prices; the hedge field assembles into an optimal strategy with
    price + H.S_T >= claim on every relevant leaf."""
    _require_stock_na(tree, mask, mode)
    values: dict[str, Fraction] = {
        leaf: claim(leaf) for leaf in mask.relevant_leaves
    }
    hedges: dict[str, tuple[Fraction, ...]] = {}
    for level in range(tree.horizon - 1, -1, -1):
        for node_id in mask.relevant_nodes[level]:
            child_values = {c: values[c] for c in mask.node_support[node_id]}
            value, hedge = node_price(tree, mask, node_id, child_values, mode)
            values[node_id] = value
            hedges[node_id] = hedge
    price = values[tree.root]
    dynamic = {n: h for n, h in hedges.items() if any(v != 0 for v in h)}
    strategy = Strategy(price, (), dynamic)
    surface = ValueSurface(values, hedges)
    if mode.exact:
        for leaf in mask.relevant_leaves:
            if wealth(tree, strategy, (), leaf) < claim(leaf):
                raise RuntimeError("dynamic superhedge certificate failed (bug)")
    return price, surface, strategy


def superhedge_semistatic(
    tree: ScenarioTree,
    mask: SupportMask,
    claim: Claim,
    options: tuple[StaticOption, ...] | list[StaticOption],
    mode: lp.Mode = lp.EXACT,
) -> tuple[Fraction, Strategy, PathMeasure]:
    """Global LP route: min x over semistatic strategies superhedging the
    claim on the relevant leaves. Also returns the dual optimizer, a
    martingale measure attaining the price.

    Requires the stocks to pass NA and the option quotes to admit at least
    one consistent martingale measure; otherwise ArbitrageDetected.
    """
    options = tuple(options)
    _require_stock_na(tree, mask, mode)
    price, strategy, dual = _primal_superhedge(tree, mask, claim, options, mode)
    if mode.exact:
        for leaf in mask.relevant_leaves:
            if wealth(tree, strategy, options, leaf) < claim(leaf):
                raise RuntimeError("semistatic superhedge certificate failed (bug)")
    return price, strategy, dual


def _primal_superhedge(tree, mask, claim, options, mode):
    layout = _HedgeLayout(tree, mask, options)
    nvar = 1 + layout.width  # x first, then h and the node blocks
    objective = [F(1)] + [F(0)] * layout.width
    constraints = []
    for leaf in mask.relevant_leaves:
        coeffs = [F(1)] + layout.wealth_row(leaf, layout.width)
        constraints.append((coeffs, ">=", claim(leaf)))
    lower = [None] * nvar
    prog = lp.linear_program(
        objective, maximize=False, constraints=constraints, lower=lower
    )
    out = lp.solve(prog, mode)
    if isinstance(out, lp.Unbounded):
        # dual infeasible: no martingale measure matches the quotes
        raise _no_consistent_measure(tree, mask, options, mode)
    assert isinstance(out, lp.Optimal), "superhedge LP is always feasible"
    x = out.primal[0]
    strategy = layout.strategy(x, out.primal[1:])
    weights = {}
    for li, leaf in enumerate(mask.relevant_leaves):
        q = out.dual[li]
        if mode.exact:
            if q > 0:
                weights[leaf] = q
        elif q > mode.tolerance:
            weights[leaf] = F(q).limit_denominator(10**12)
    if not mode.exact:
        total = sum(weights.values())
        weights = {k: v / total for k, v in weights.items()}
    dual = PathMeasure(weights)
    if mode.exact:
        dual.validate()
    return x, strategy, dual


def dual_price(
    tree: ScenarioTree,
    mask: SupportMask,
    claim: Claim,
    options: tuple[StaticOption, ...] | list[StaticOption],
    mode: lp.Mode = lp.EXACT,
) -> tuple[Fraction, PathMeasure]:
    """Direct dual route: maximize the claim expectation over the
    option-constrained martingale polytope."""
    options = tuple(options)
    leaves = mask.relevant_leaves
    index = {leaf: k for k, leaf in enumerate(leaves)}
    objective = [claim(leaf) for leaf in leaves]
    constraints = []
    for row, label in martingale_rows(tree, mask, options):
        coeffs = [F(0)] * len(leaves)
        for leaf, a in row.items():
            coeffs[index[leaf]] = a
        constraints.append((coeffs, "=", F(1) if label == "mass" else F(0)))
    prog = lp.linear_program(objective, maximize=True, constraints=constraints)
    out = lp.solve(prog, mode)
    if isinstance(out, lp.Infeasible):
        _require_stock_na(tree, mask, mode)
        raise _no_consistent_measure(tree, mask, options, mode)
    assert isinstance(out, lp.Optimal)
    weights = {
        leaf: out.primal[index[leaf]]
        for leaf in leaves
        if (out.primal[index[leaf]] > 0 if mode.exact else out.primal[index[leaf]] > mode.tolerance)
    }
    if not mode.exact:
        weights = {k: F(v).limit_denominator(10**12) for k, v in weights.items()}
        total = sum(weights.values())
        weights = {k: v / total for k, v in weights.items()}
    return out.value, PathMeasure(weights)


def price_interval(
    tree: ScenarioTree,
    mask: SupportMask,
    claim: Claim,
    options: tuple[StaticOption, ...] | list[StaticOption],
    mode: lp.Mode = lp.EXACT,
) -> PriceInterval:
    """Arbitrage-free price range [-pi(-f), pi(f)]; a Point iff replicable."""
    upper, _, _ = superhedge_semistatic(tree, mask, claim, options, mode)
    negated = Claim({leaf: -v for leaf, v in claim.values.items()})
    lower_neg, _, _ = superhedge_semistatic(tree, mask, negated, options, mode)
    return PriceInterval(-lower_neg, upper)


def check_replicable(
    tree: ScenarioTree,
    mask: SupportMask,
    claim: Claim,
    options: tuple[StaticOption, ...] | list[StaticOption],
    mode: lp.Mode = lp.EXACT,
) -> Replicable | NotReplicable:
    """Second FTAP for one claim: replicable iff the two superhedging prices
    coincide; otherwise two martingale measures separate the expectations."""
    options = tuple(options)
    upper, strategy, q_high = superhedge_semistatic(tree, mask, claim, options, mode)
    negated = Claim({leaf: -v for leaf, v in claim.values.items()})
    lower_neg, _, q_low = superhedge_semistatic(tree, mask, negated, options, mode)
    lower = -lower_neg
    same = lower == upper if mode.exact else abs(float(upper) - float(lower)) <= mode.tolerance
    if same:
        if mode.exact:
            for leaf in mask.relevant_leaves:
                if wealth(tree, strategy, options, leaf) != claim(leaf):
                    raise RuntimeError("replication is not exact (bug)")
        return Replicable(upper, strategy)
    return NotReplicable(q_low, q_high, PriceInterval(lower, upper))


def check_complete(
    tree: ScenarioTree,
    mask: SupportMask,
    options: tuple[StaticOption, ...] | list[StaticOption],
    mode: lp.Mode = lp.EXACT,
) -> bool:
    """Complete iff every relevant leaf indicator is replicable (iff the
    martingale polytope is a single point)."""
    options = tuple(options)
    _require_stock_na(tree, mask, mode)
    for leaf in mask.relevant_leaves:
        indicator = Claim(
            {l: (F(1) if l == leaf else F(0)) for l in tree.leaves}
        )
        if isinstance(check_replicable(tree, mask, indicator, options, mode), NotReplicable):
            return False
    return True


def lagrange_check(
    tree: ScenarioTree,
    mask: SupportMask,
    claim: Claim,
    options: tuple[StaticOption, ...] | list[StaticOption],
    mode: lp.Mode = lp.EXACT,
) -> tuple[Fraction, tuple[Fraction, ...]]:
    """Evaluate pi(f) = inf_h sup over option-unconstrained martingale
    measures of E[f - h.g] at the optimal h* and assert it reproduces the
    semistatic price exactly."""
    options = tuple(options)
    price, strategy, _ = superhedge_semistatic(tree, mask, claim, options, mode)
    h_star = strategy.static
    shifted = Claim(
        {
            leaf: claim(leaf)
            - sum(
                (h_star[k] * options[k].normalized(leaf) for k in range(len(options))),
                F(0),
            )
            for leaf in tree.leaves
        }
    )
    value, _ = dual_price(tree, mask, shifted, (), mode)
    same = value == price if mode.exact else abs(float(value) - float(price)) <= 1e-6
    if not same:
        raise LagrangeGap(f"Lagrange value {value} != price {price}")
    return value, h_star


def prove_inequality(
    tree: ScenarioTree,
    mask: SupportMask,
    claim: Claim,
    bound: Fraction,
    mode: lp.Mode = lp.EXACT,
) -> Proved | Refuted:
    """Reduce 'E_Q[f] <= bound for every martingale measure' to a pathwise
    certificate f <= bound + H.S_T on the relevant leaves, or refute it with
    a martingale measure beating the bound."""
    price, _, strategy = superhedge_dynamic(tree, mask, claim, mode)
    below = price <= bound if mode.exact else float(price) <= float(bound) + mode.tolerance
    if below:
        certificate = Strategy(bound, (), strategy.dynamic)
        if mode.exact:
            for leaf in mask.relevant_leaves:
                if wealth(tree, certificate, (), leaf) < claim(leaf):
                    raise RuntimeError("pathwise certificate failed (bug)")
        return Proved(certificate)
    value, q = dual_price(tree, mask, claim, (), mode)
    if mode.exact:
        expectation = sum((q(leaf) * claim(leaf) for leaf in tree.leaves), F(0))
        if expectation <= bound:
            raise RuntimeError("refutation measure does not beat the bound (bug)")
    else:
        expectation = value
    return Refuted(q, expectation)
