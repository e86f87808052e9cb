import random
from decimal import Decimal
from itertools import product

import pytest

from compiler import DecisionCompiler, batch_execute, execute
from conftest import load_mini_model
from graphs import build_graph, chain_graph, fig1_graph, input_node, make_table, synthetic_boolean_model, table_node
from hit_policy import HIT_POLICY_OPS, evaluate_table, matching_rules
from ir import HitPolicy
from ir.errors import GraphValidationError, HitPolicyViolation, MissingInputError, UnknownInputError
from planner import DecisionPlanner

WINDTURBINE_INPUTS = ("i_elektriciteit", "i_rotor", "i_windpark", "i_noordzee")


class TestHitPolicies:
    def test_first_respects_rule_order(self):
        table = make_table(["x"], [(["true"], "A"), (["-"], "B")], HitPolicy.FIRST)
        assert evaluate_table(table, [True]) == "A"
        assert evaluate_table(table, [False]) == "B"

    def test_unique_double_match_violates(self):
        table = make_table(["x"], [(["> 2"], True), (["not(null)"], True)], HitPolicy.UNIQUE)
        with pytest.raises(HitPolicyViolation) as info:
            evaluate_table(table, [Decimal(3)])
        assert info.value.matched_rule_indexes == [0, 1]
        assert info.value.hit_policy == "UNIQUE"

    def test_unique_single_and_no_match(self):
        table = make_table(["x"], [(["> 2"], "big"), (["<= 2"], "small")])
        assert evaluate_table(table, [Decimal(1)]) == "small"
        assert evaluate_table(table, [None]) is None

    def test_any_agreeing_and_conflicting(self):
        agreeing = make_table(["x"], [(["true"], "ja"), (["-"], "ja")], HitPolicy.ANY)
        assert evaluate_table(agreeing, [True]) == "ja"
        conflicting = make_table(["x"], [(["true"], "ja"), (["-"], "nee")], HitPolicy.ANY)
        with pytest.raises(HitPolicyViolation):
            evaluate_table(conflicting, [True])
        assert evaluate_table(conflicting, [False]) == "nee"
        assert evaluate_table(make_table(["x"], [(["true"], "ja")], HitPolicy.ANY), [False]) is None

    def test_collect_in_rule_order(self):
        table = make_table(["x"], [(["> 1"], "a"), (["> 5"], "b"), (["> 3"], "c")], HitPolicy.COLLECT)
        assert evaluate_table(table, [Decimal(6)]) == ("a", "b", "c")
        assert evaluate_table(table, [Decimal(4)]) == ("a", "c")
        assert evaluate_table(table, [Decimal(0)]) == ()

    def test_first_and_unique_without_match_give_null(self):
        for policy in (HitPolicy.FIRST, HitPolicy.UNIQUE):
            assert evaluate_table(make_table(["x"], [(["true"], "one")], policy), [False]) is None

    def test_positional_arity_is_checked(self):
        with pytest.raises(ValueError):
            matching_rules(make_table(["x", "y"], []), [True])

    def test_every_policy_has_an_operator(self):
        assert set(HIT_POLICY_OPS) == set(HitPolicy)


class TestFig1:
    @pytest.mark.parametrize("graph_factory, input_ids", [
        (lambda: fig1_graph(), ("i_electricity", "i_rotor", "i_farm", "i_north_sea")),
        (lambda: load_mini_model("GeluidProdWindturbine"), WINDTURBINE_INPUTS),
    ])
    def test_only_one_assignment_yields_the_duty(self, graph_factory, input_ids):
        graph = graph_factory()
        executor = DecisionCompiler().compile(graph)
        for values in product((False, True), repeat=4):
            result = executor.execute(dict(zip(input_ids, values)))
            assert result.ok
            assert result.output_value is (values == (True, True, False, False))

    def test_batch_over_exhaustive_cases(self, windturbine):
        cases = [dict(zip(WINDTURBINE_INPUTS, values)) for values in product((False, True), repeat=4)]
        results = batch_execute(windturbine, cases)
        assert len(results) == 16
        assert sum(result.output_value is True for result in results) == 1


class TestExecute:
    def test_output_without_rules_is_null(self):
        graph = build_graph("empty", [input_node("i"), table_node("o", ["i"], [], output=True)])
        assert execute(graph, {"i": True}).output_value is None

    def test_identity_chain_passes_false_through(self):
        result = execute(chain_graph(4), {"n0": False})
        # the output table maps true -> true and anything else -> false
        assert result.output_value is False
        assert result.node_values["n1"] is False
        assert result.node_values["n2"] is False

    def test_unassigned_inputs_read_null(self):
        graph = build_graph("nullable", [
            input_node("i"),
            table_node("o", ["i"], [(["null"], "missing"), (["-"], "present")], HitPolicy.FIRST, output=True),
        ])
        assert execute(graph, {}).output_value == "missing"
        assert execute(graph, {"i": False}).output_value == "present"

    def test_strict_mode_names_missing_inputs(self, windturbine):
        with pytest.raises(MissingInputError) as info:
            execute(windturbine, {"i_rotor": True}, strict=True)
        assert info.value.input_ids == ["i_elektriciteit", "i_noordzee", "i_windpark"]

    def test_strict_mode_names_unknown_keys(self, windturbine):
        assignment = {input_id: True for input_id in ("i_elektriciteit", "i_noordzee", "i_rotor", "i_windpark")}
        execute(windturbine, assignment, strict=True)
        with pytest.raises(UnknownInputError) as info:
            execute(windturbine, {**assignment, "i_rotr": False, "d_plicht": True}, strict=True)
        assert info.value.input_ids == ["d_plicht", "i_rotr"]
        assert execute(windturbine, {**assignment, "i_rotr": False}).output_value == execute(windturbine, assignment).output_value

    def test_violation_demotes_node_to_null(self):
        graph = build_graph("violating", [
            input_node("i"),
            table_node("d", ["i"], [(["true"], "a"), (["-"], "b")], HitPolicy.UNIQUE),
            table_node("o", ["d"], [(["null"], "no value"), (["-"], "value")], HitPolicy.FIRST, output=True),
        ])
        result = execute(graph, {"i": True})
        assert result.output_value == "no value"
        assert [(error.node_id, error.kind) for error in result.errors] == [("d", "HitPolicyViolation")]
        assert execute(graph, {"i": False}).ok

    def test_collect_lists_feed_downstream_tests(self):
        graph = load_mini_model("BouwwerkBrandveiligheid")
        cases = {
            (Decimal(80), "kantoorfunctie"): "Vergunningplicht brandveilig gebruik",
            (Decimal(20), "woonfunctie"): "Meldingsplicht brandveilig gebruik",
            (Decimal(20), "kantoorfunctie"): "Algemene regels van toepassing",
            (Decimal(5), "woonfunctie"): "Algemene regels van toepassing",
            (None, "woonfunctie"): "Algemene regels van toepassing",
        }
        for (height, use), expected in cases.items():
            result = execute(graph, {"i_hoogte": height, "i_gebruiksfunctie": use})
            assert result.output_value == expected
        assert execute(graph, {"i_hoogte": Decimal(80), "i_gebruiksfunctie": None}).node_values["d_hoogteklasse"] == (
            "middelhoog", "hoog",
        )

    def test_invalid_graph_does_not_compile(self):
        graph = build_graph("two-outputs", [
            input_node("i"),
            table_node("a", ["i"], [(["-"], True)], output=True),
            table_node("b", ["i"], [(["-"], True)], output=True),
        ])
        with pytest.raises(GraphValidationError):
            DecisionCompiler().compile(graph)


class TestPlanner:
    def test_plan_follows_topological_order(self, windturbine):
        plan = DecisionPlanner().plan(windturbine)
        order = [step.node_id for step in plan]
        assert order.index("i_rotor") < order.index("d_rotor") < order.index("d_plicht")
        assert all(step.combine is not None for step in plan if step.table is not None)


class TestBatch:
    def test_empty_case_list(self, windturbine):
        assert batch_execute(windturbine, []) == []

    def test_batch_matches_sequential_on_random_models(self):
        rng = random.Random(7)
        for index in range(50):
            n_inputs = rng.randint(2, 5)
            graph = synthetic_boolean_model(rng, n_inputs, rng.randint(0, 4), graph_id=f"g{index}")
            executor = DecisionCompiler().compile(graph)
            cases = [
                {f"i{k}": value for k, value in enumerate(values)}
                for values in product((False, True), repeat=n_inputs)
            ]
            sequential = [executor.execute(case).output_value for case in cases]
            parallel = [result.output_value for result in executor.batch_execute(cases, max_workers=4)]
            assert parallel == sequential

    def test_simplifying_compiler_keeps_outputs(self, windturbine):
        plain = DecisionCompiler().compile(windturbine)
        simplified = DecisionCompiler(simplify=True).compile(windturbine)
        assert len(simplified.plan) < len(plain.plan)
        for values in product((False, True), repeat=4):
            case = dict(zip(WINDTURBINE_INPUTS, values))
            assert simplified.execute(case).output_value == plain.execute(case).output_value
