"""Shared fixtures: the trinomial example model and a seeded instance corpus.

Corpus instances stay inside the acceptance envelope (T <= 3, branching <= 4,
d <= 2, e <= 2, <= 4 generators per node) with small rational data so exact
pivoting stays fast.
"""

from __future__ import annotations

import json
import random
from fractions import Fraction
from pathlib import Path

import pytest

from robusthedge.model import Claim, Model, load_model

DATA = Path(__file__).parent / "data"

F = Fraction


@pytest.fixture(scope="session")
def example_b() -> Model:
    return load_model((DATA / "example_b.json").read_text())


@pytest.fixture(scope="session")
def example_b_text() -> str:
    return (DATA / "example_b.json").read_text()


def constant_stock_model(n_leaves: int = 4, price: int = 5) -> Model:
    """One period, constant price, full ambiguity (all Dirac generators)."""
    leaves = [f"w{k}" for k in range(n_leaves)]
    doc = {
        "horizon": 1,
        "nodes": [
            {
                "id": "root",
                "level": 0,
                "parent": None,
                "price": [str(price)],
                "generators": [{leaf: "1"} for leaf in leaves],
            }
        ]
        + [
            {"id": leaf, "level": 1, "parent": "root", "price": [str(price)]}
            for leaf in leaves
        ],
    }
    return load_model(json.dumps(doc))


def grid_market_model(span: int = 1, start: int = 2) -> Model:
    """Two-period recombining walk: children prices = parent price +/- span
    steps, full ambiguity via Dirac generators. Coordinate process fixture."""
    moves = list(range(-span, span + 1))
    nodes = [
        {
            "id": "r",
            "level": 0,
            "parent": None,
            "price": [str(start)],
            "generators": None,
        }
    ]
    level1 = []
    for m1 in moves:
        nid = f"a{m1 + span}"
        level1.append((nid, start + m1))
        nodes.append(
            {"id": nid, "level": 1, "parent": "r", "price": [str(start + m1)]}
        )
    level2 = []
    for nid, p1 in level1:
        for m2 in moves:
            leaf = f"{nid}b{m2 + span}"
            level2.append((leaf, nid, p1 + m2))
            nodes.append(
                {"id": leaf, "level": 2, "parent": nid, "price": [str(p1 + m2)]}
            )
    nodes[0]["generators"] = [{nid: "1"} for nid, _ in level1]
    for nid, _ in level1:
        kids = [leaf for leaf, parent, _ in level2 if parent == nid]
        for entry in nodes:
            if entry["id"] == nid:
                entry["generators"] = [{leaf: "1"} for leaf in kids]
    doc = {"horizon": 2, "nodes": nodes}
    return load_model(json.dumps(doc))


def random_instance(
    rng: random.Random,
    *,
    max_depth: int = 3,
    max_branch: int = 4,
    max_dim: int = 2,
    max_options: int = 2,
    max_leaves: int = 20,
    mm_quotes: bool = False,
) -> Model:
    """Draw a model inside the acceptance envelope.

    With mm_quotes, option quotes are expectations under a full-support
    martingale measure whenever one exists (keeps quotes arbitrage-free on
    NA-passing trees); otherwise quotes are small random rationals.
    """
    for _ in range(200):
        model = _try_random_instance(rng, max_depth, max_branch, max_dim, max_options)
        if len(model.tree.leaves) <= max_leaves:
            break
    if mm_quotes and model.options:
        model = _reprice_options(model, rng)
    return model


def _try_random_instance(rng, max_depth, max_branch, max_dim, max_options) -> Model:
    horizon = rng.randint(1, max_depth)
    dim = rng.randint(1, max_dim)
    counter = 0
    nodes = [("r", 0, None, [F(rng.randint(2, 8)) for _ in range(dim)])]
    frontier = [("r", nodes[0][3])]
    children_of: dict[str, list[str]] = {"r": []}
    generators_of: dict[str, list[dict[str, str]]] = {}

    def increment():
        return F(rng.choice([-2, -1, 0, 1, 2]), rng.choice([1, 1, 2]))

    for level in range(1, horizon + 1):
        next_frontier = []
        for parent, parent_price in frontier:
            # a "balanced" node gets zero-sum increments plus a full-support
            # generator, so it passes local NA by construction; the rest are
            # unconstrained and often produce arbitrage
            balanced = rng.random() < 0.7
            branch = rng.randint(2 if balanced else 1, max_branch)
            steps = [[increment() for _ in range(dim)] for _ in range(branch - 1)]
            if balanced:
                steps.append([-sum(s[i] for s in steps) for i in range(dim)])
            else:
                steps.append([increment() for _ in range(dim)])
            kids = []
            for step in steps:
                counter += 1
                nid = f"n{counter}"
                price = [parent_price[i] + step[i] for i in range(dim)]
                nodes.append((nid, level, parent, price))
                children_of.setdefault(parent, []).append(nid)
                children_of[nid] = []
                kids.append(nid)
                next_frontier.append((nid, price))
            gens = []
            for _ in range(rng.randint(1, 3)):
                if rng.random() < 0.3:
                    gens.append({rng.choice(kids): "1"})  # Dirac: polar mass
                    continue
                raw = [rng.randint(0, 3) for _ in kids]
                if sum(raw) == 0:
                    raw[rng.randrange(len(kids))] = 1
                total = sum(raw)
                gens.append({k: str(F(w, total)) for k, w in zip(kids, raw) if w})
            if balanced:
                gens.append({k: str(F(1, len(kids))) for k in kids})
            generators_of[parent] = gens
        frontier = next_frontier

    raw_nodes = []
    for nid, level, parent, price in nodes:
        entry = {
            "id": nid,
            "level": level,
            "parent": parent,
            "price": [str(x) for x in price],
        }
        if children_of.get(nid):
            entry["generators"] = generators_of[nid]
        raw_nodes.append(entry)

    leaves = [nid for nid, level, _, _ in nodes if level == horizon]
    n_options = rng.randint(0, max_options)
    options = []
    for k in range(n_options):
        payoff = {leaf: str(F(rng.randint(-3, 6), rng.choice([1, 2]))) for leaf in leaves}
        quote = str(F(rng.randint(-2, 4), rng.choice([1, 2])))
        options.append({"name": f"g{k}", "quote": quote, "payoff": payoff})
    claims = {
        "f": {leaf: str(F(rng.randint(-4, 8), rng.choice([1, 2]))) for leaf in leaves}
    }
    doc = {
        "horizon": horizon,
        "dimension": dim,
        "nodes": raw_nodes,
        "options": options,
        "claims": claims,
    }
    return load_model(json.dumps(doc))


def _reprice_options(model: Model, rng: random.Random) -> Model:
    """Quote each option at its expectation under a full-support martingale
    measure of the stocks-only market, when such a measure exists."""
    from robusthedge.arbitrage import find_dominating_mm
    from robusthedge.polar import compute_support, reference_measure

    mask = compute_support(model.tree)
    p_hat = reference_measure(model.tree)
    witness = find_dominating_mm(model.tree, mask, (), p_hat)
    if witness is None:
        return model
    q = witness.q
    options = tuple(
        type(opt)(
            opt.name,
            sum((q(leaf) * opt.payoff[leaf] for leaf in model.tree.leaves), F(0)),
            opt.payoff,
        )
        for opt in model.options
    )
    return Model(model.tree, options, model.claims, model.processes, model.measures)


def random_claim(rng: random.Random, model: Model) -> Claim:
    return Claim(
        {
            leaf: F(rng.randint(-5, 9), rng.choice([1, 2, 3]))
            for leaf in model.tree.leaves
        }
    )
