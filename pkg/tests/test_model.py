"""Model ingestion, wealth evaluation and kernel products."""

import json
import random
from fractions import Fraction

import pytest

from robusthedge.model import (
    DanglingChildReference,
    DimensionMismatch,
    MalformedDocument,
    Measure,
    MissingKernel,
    ProbabilityNotNormalized,
    Strategy,
    load_model,
    product_measure,
    save_model,
    wealth,
)
from robusthedge.polar import reference_kernels

from conftest import random_instance

F = Fraction


def test_smallest_legal_tree_infers_dimension():
    doc = {
        "horizon": 1,
        "nodes": [
            {"id": "r", "level": 0, "parent": None, "price": ["1", "2"],
             "generators": [{"c": "1"}]},
            {"id": "c", "level": 1, "parent": "r", "price": ["1", "2"]},
        ],
    }
    model = load_model(json.dumps(doc))
    assert model.tree.dimension == 2
    assert model.tree.leaves == ("c",)


def test_unnormalized_generator_rejected():
    doc = {
        "horizon": 1,
        "nodes": [
            {"id": "r", "level": 0, "parent": None, "price": ["1"],
             "generators": [{"a": 0.5, "b": 0.6}]},
            {"id": "a", "level": 1, "parent": "r", "price": ["1"]},
            {"id": "b", "level": 1, "parent": "r", "price": ["2"]},
        ],
    }
    with pytest.raises(ProbabilityNotNormalized) as err:
        load_model(json.dumps(doc))
    assert err.value.node == "r"
    assert err.value.generator == 0


def test_decimal_weights_parse_exactly():
    doc = {
        "horizon": 1,
        "nodes": [
            {"id": "r", "level": 0, "parent": None, "price": [1.5],
             "generators": [{"a": 0.1, "b": 0.9}]},
            {"id": "a", "level": 1, "parent": "r", "price": ["1"]},
            {"id": "b", "level": 1, "parent": "r", "price": ["2"]},
        ],
    }
    model = load_model(json.dumps(doc))
    gen = model.tree.nodes["r"].ambiguity.generators[0]
    assert gen.weights == {"a": F(1, 10), "b": F(9, 10)}
    assert model.tree.nodes["r"].price == (F(3, 2),)


def test_dangling_child_reference():
    doc = {
        "horizon": 1,
        "nodes": [
            {"id": "r", "level": 0, "parent": None, "price": ["1"],
             "generators": [{"ghost": "1"}]},
            {"id": "a", "level": 1, "parent": "r", "price": ["1"]},
        ],
    }
    with pytest.raises(DanglingChildReference):
        load_model(json.dumps(doc))


def test_dimension_mismatch():
    doc = {
        "horizon": 1,
        "dimension": 2,
        "nodes": [
            {"id": "r", "level": 0, "parent": None, "price": ["1", "1"],
             "generators": [{"a": "1"}]},
            {"id": "a", "level": 1, "parent": "r", "price": ["1"]},
        ],
    }
    with pytest.raises(DimensionMismatch):
        load_model(json.dumps(doc))


def test_structural_errors():
    base = {
        "horizon": 2,
        "nodes": [
            {"id": "r", "level": 0, "parent": None, "price": ["1"],
             "generators": [{"a": "1"}]},
            {"id": "a", "level": 1, "parent": "r", "price": ["1"]},
        ],
    }
    with pytest.raises(MalformedDocument):
        load_model(json.dumps(base))  # leaf above the horizon
    with pytest.raises(MalformedDocument):
        load_model("not json [")
    with pytest.raises(MalformedDocument):
        load_model(json.dumps({"horizon": 0, "nodes": []}))


def test_infinite_claim_rejected():
    doc = """{
      "horizon": 1,
      "nodes": [
        {"id": "r", "level": 0, "parent": null, "price": ["1"],
         "generators": [{"a": "1"}]},
        {"id": "a", "level": 1, "parent": "r", "price": ["1"]}
      ],
      "claims": {"bad": {"a": Infinity}}
    }"""
    with pytest.raises(MalformedDocument):
        load_model(doc)


def test_round_trip_is_identity(example_b, example_b_text):
    text = save_model(example_b)
    again = load_model(text)
    assert again == example_b
    assert save_model(again) == text


def test_wealth_zero_strategy(example_b):
    strat = Strategy(F(0), ())
    for leaf in example_b.tree.leaves:
        assert wealth(example_b.tree, strat, (), leaf) == 0


def test_wealth_static_only(example_b):
    # one call bought at quote 6/5: payoff 3 at leaf "13" nets 3 - 6/5
    strat = Strategy(F(0), (F(1),))
    assert wealth(example_b.tree, strat, example_b.options, "13") == F(9, 5)
    assert wealth(example_b.tree, strat, example_b.options, "10") == F(-6, 5)


def test_wealth_quote_normalization_example():
    doc = {
        "horizon": 1,
        "nodes": [
            {"id": "r", "level": 0, "parent": None, "price": ["1"],
             "generators": [{"a": "1/2", "b": "1/2"}]},
            {"id": "a", "level": 1, "parent": "r", "price": ["1"]},
            {"id": "b", "level": 1, "parent": "r", "price": ["1"]},
        ],
        "options": [{"name": "g", "quote": 1.2, "payoff": {"a": "3", "b": "0"}}],
    }
    model = load_model(json.dumps(doc))
    strat = Strategy(F(0), (F(1),))
    assert wealth(model.tree, strat, model.options, "a") == F(9, 5)


def test_wealth_dynamic_example_b(example_b):
    # x = 1.2, H = 0.6: 1.2 + 0.6 * dS with dS in {-2, 0, 3}
    strat = Strategy(F(6, 5), (), {"root": (F(3, 5),)})
    values = [wealth(example_b.tree, strat, (), leaf) for leaf in ("8", "10", "13")]
    assert values == [F(0), F(6, 5), F(3)]


def test_product_measure_one_period(example_b):
    kernel = Measure({"8": F(1, 2), "10": F(1, 4), "13": F(1, 4)})
    pm = product_measure(example_b.tree, {"root": kernel})
    assert pm.weights == kernel.weights


def test_product_measure_dirac_continuation():
    doc = {
        "horizon": 2,
        "nodes": [
            {"id": "r", "level": 0, "parent": None, "price": ["1"],
             "generators": [{"a": "1/2", "b": "1/2"}]},
            {"id": "a", "level": 1, "parent": "r", "price": ["1"],
             "generators": [{"a1": "1"}, {"a2": "1"}]},
            {"id": "b", "level": 1, "parent": "r", "price": ["1"],
             "generators": [{"b1": "1"}, {"b2": "1"}]},
            {"id": "a1", "level": 2, "parent": "a", "price": ["1"]},
            {"id": "a2", "level": 2, "parent": "a", "price": ["1"]},
            {"id": "b1", "level": 2, "parent": "b", "price": ["1"]},
            {"id": "b2", "level": 2, "parent": "b", "price": ["1"]},
        ],
    }
    model = load_model(json.dumps(doc))
    kernels = {
        "r": Measure({"a": F(1, 2), "b": F(1, 2)}),
        "a": Measure({"a1": F(1)}),
        "b": Measure({"b1": F(1)}),
    }
    pm = product_measure(model.tree, kernels)
    assert pm.weights == {"a1": F(1, 2), "b1": F(1, 2)}

    with pytest.raises(MissingKernel):
        product_measure(model.tree, {"r": kernels["r"], "a": kernels["a"]})

    # kernels at unreachable nodes are ignored
    kernels_dirac = {
        "r": Measure({"a": F(1)}),
        "a": Measure({"a1": F(1, 3), "a2": F(2, 3)}),
    }
    pm2 = product_measure(model.tree, kernels_dirac)
    assert pm2.weights == {"a1": F(1, 3), "a2": F(2, 3)}


def test_product_measure_normalizes_exactly():
    rng = random.Random(11)
    for _ in range(25):
        model = random_instance(rng)
        pm = product_measure(model.tree, reference_kernels(model.tree))
        assert sum(pm.weights.values()) == 1


def test_conditioning_commutes_with_restriction():
    rng = random.Random(23)
    found = 0
    for _ in range(40):
        model = random_instance(rng, max_depth=3)
        tree = model.tree
        if tree.horizon < 2:
            continue
        kernels = reference_kernels(tree)
        pm = product_measure(tree, kernels)
        for node_id in tree.levels[1]:
            node = tree.nodes[node_id]
            mass = sum(
                (pm(leaf) for leaf in tree.leaves if tree.path(leaf)[1] == node_id),
                F(0),
            )
            if mass == 0 or node.is_leaf:
                continue
            found += 1
            # conditional distribution of pm on the subtree below node_id
            conditional = {
                leaf: pm(leaf) / mass
                for leaf in tree.leaves
                if tree.path(leaf)[1] == node_id and pm(leaf) != 0
            }
            # product measure of the subtree: root kernel replaced by Dirac
            sub_kernels = dict(kernels)
            sub_kernels[tree.root] = Measure({node_id: F(1)})
            if tree.horizon >= 2 and not node.is_leaf:
                restricted = product_measure(tree, sub_kernels)
                assert {k: v for k, v in restricted.weights.items()} == conditional
            break
    assert found >= 10


def test_random_models_round_trip():
    rng = random.Random(5)
    for _ in range(20):
        model = random_instance(rng)
        assert load_model(save_model(model)) == model
