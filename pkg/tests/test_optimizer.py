import random
from itertools import product

import networkx as nx
import pytest

from compiler import DecisionCompiler
from conftest import load_mini_model
from graphs import (
    build_graph,
    chain_graph,
    identity_node,
    input_node,
    random_dag,
    synthetic_boolean_model,
    table_node,
)
from ir import HitPolicy, IROptimizer, ModelType, identity_fractions, identity_reduction, validate_graph


@pytest.fixture
def optimizer():
    return IROptimizer()


class TestIsIdentityNode:
    def test_boolean_echo(self):
        assert IROptimizer.is_identity_node(identity_node("d", "i"))

    def test_text_echo(self):
        node = table_node("d", ["i"], [(['"a"'], "a"), (['"b"'], "b")])
        assert IROptimizer.is_identity_node(node)

    @pytest.mark.parametrize("rules", [
        [(["not(null)"], True)],
        [(["true"], False)],
        [(["true"], True), (["true"], True)],
        [(["true"], True), (["-"], False)],
        [],
    ])
    def test_non_identity_tables(self, rules):
        assert not IROptimizer.is_identity_node(table_node("d", ["i"], rules))

    def test_two_inputs_or_output_kind_never_qualify(self):
        assert not IROptimizer.is_identity_node(table_node("d", ["i", "j"], [(["true", "-"], True)]))
        assert not IROptimizer.is_identity_node(
            table_node("o", ["i"], [(["true"], True), (["false"], False)], output=True)
        )
        assert not IROptimizer.is_identity_node(input_node("i"))


class TestEliminateIdentityNodes:
    def test_chain_collapses_to_input_and_output(self, optimizer):
        graph = chain_graph(4)
        simplified, report = optimizer.eliminate_identity_nodes(graph)
        assert simplified.node_ids == ["n0", "n3"]
        assert simplified.edges == (("n0", "n3"),)
        assert simplified.node("n3").table.input_refs == ("n0",)
        assert report.removed_node_ids == ("n1", "n2")
        assert report.identity_fraction_before == 1.0
        assert (report.nodes_before, report.nodes_after) == (4, 2)
        assert (report.edges_before, report.edges_after) == (3, 1)
        assert validate_graph(simplified).ok

    def test_consumer_reading_both_ends_keeps_the_identity(self, optimizer):
        graph = build_graph("clash", [
            input_node("i"),
            identity_node("x", "i"),
            table_node("o", ["i", "x"], [(["true", "true"], True), (["-", "-"], False)], HitPolicy.FIRST, output=True),
        ])
        simplified, report = optimizer.eliminate_identity_nodes(graph)
        assert report.removed_node_ids == ()
        assert report.retained_identity_ids == ("x",)
        assert simplified == graph

    def test_windturbine_keeps_its_outcomes(self, optimizer, windturbine):
        simplified, report = optimizer.eliminate_identity_nodes(windturbine)
        assert len(report.removed_node_ids) == 4
        assert len(simplified.nodes) == 5
        original = DecisionCompiler().compile(windturbine)
        reduced = DecisionCompiler().compile(simplified)
        for values in product((False, True), repeat=4):
            case = dict(zip(("i_elektriciteit", "i_rotor", "i_windpark", "i_noordzee"), values))
            assert reduced.execute(case).output_value == original.execute(case).output_value

    def test_semantics_preserved_on_synthetic_models(self, optimizer):
        rng = random.Random(1)
        for index in range(100):
            n_inputs = rng.randint(2, 10)
            injected = rng.randint(0, 6)
            graph = synthetic_boolean_model(rng, n_inputs, injected, graph_id=f"synthetic{index}")
            assert validate_graph(graph).ok

            simplified, report = optimizer.eliminate_identity_nodes(graph)
            assert len(report.removed_node_ids) == injected
            assert len(simplified.nodes) == len(graph.nodes) - injected

            _, again = optimizer.eliminate_identity_nodes(simplified)
            assert again.removed_node_ids == ()

            original = DecisionCompiler().compile(graph)
            reduced = DecisionCompiler().compile(simplified)
            for values in product((False, True), repeat=n_inputs):
                case = {f"i{k}": value for k, value in enumerate(values)}
                assert reduced.execute(case).output_value == original.execute(case).output_value

    def test_canonicalize_drops_the_report(self, optimizer):
        assert optimizer.canonicalize(chain_graph(3)).node_ids == ["n0", "n2"]


class TestPlaceholders:
    def test_no_match(self, windturbine):
        assert IROptimizer.detect_placeholder_inputs(windturbine) == []

    def test_case_insensitive_substring(self):
        graph = build_graph("placeholder", [
            input_node("p", name="Vaste Waarde FALSE kopie"),
            input_node("q", name="Activiteit"),
            table_node("o", ["p", "q"], [(["-", "-"], True)], output=True),
        ])
        assert IROptimizer.detect_placeholder_inputs(graph) == ["p"]

    def test_bundled_model(self):
        assert IROptimizer.detect_placeholder_inputs(load_mini_model("KoelwaterLozen")) == ["i_vaste_waarde"]


class TestChainProfile:
    def test_ur_cr_chains(self):
        graph = load_mini_model("AlarminstallatieHebben")
        profile = IROptimizer.chain_profile(graph)
        assert len(profile.chains) == 4
        assert all(chain.shortest >= 4 for chain in profile.chains)
        assert (profile.ur_nodes, profile.cr_nodes) == (4, 4)
        assert profile.summary["disconnected_inputs"] == 0.0

    def test_input_wired_to_output(self):
        graph = build_graph("direct", [input_node("i"), table_node("o", ["i"], [(["-"], True)], output=True)])
        chain = IROptimizer.chain_profile(graph).chains[0]
        assert (chain.shortest, chain.longest) == (2, 2)

    def test_five_node_path(self):
        profile = IROptimizer.chain_profile(chain_graph(5))
        assert profile.chains[0].longest == 5
        assert profile.summary["max_longest"] == 5.0

    def test_matches_path_enumeration(self):
        rng = random.Random(3)
        for index in range(20):
            graph = random_dag(rng, rng.randint(3, 7), graph_id=f"dag{index}")
            digraph = graph.to_networkx()
            profile = IROptimizer.chain_profile(graph)
            for chain in profile.chains:
                paths = list(nx.all_simple_paths(digraph, chain.input_id, graph.output_node_id)) \
                    if chain.input_id != graph.output_node_id else []
                if not paths:
                    assert chain.shortest is None and chain.longest is None
                else:
                    assert chain.shortest == min(len(path) for path in paths)
                    assert chain.longest == max(len(path) for path in paths)


class TestIdentityShares:
    def test_fractions_per_model_type(self, windturbine):
        requirements = load_mini_model("AlarminstallatieHebben")
        fractions = identity_fractions([windturbine, requirements])
        assert fractions[ModelType.OUTCOME]["identity_nodes"] == 4.0
        assert fractions[ModelType.OUTCOME]["of_decision_nodes"] == 1.0
        assert fractions[ModelType.OUTCOME]["of_all_nodes"] == pytest.approx(4 / 9)
        assert fractions[ModelType.REQUIREMENTS]["identity_nodes"] == 8.0

    def test_reduction(self, windturbine, optimizer):
        simplified = optimizer.canonicalize(windturbine)
        assert identity_reduction(windturbine, simplified) == 1.0
        assert identity_reduction(windturbine, windturbine) == 0.0
        assert identity_reduction(simplified, windturbine) is None
