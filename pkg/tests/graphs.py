"""Hand-built decision graphs and seeded synthetic graphs shared by the tests"""
import random
from dataclasses import replace
from typing import Dict, List, Optional, Sequence, Tuple

from expr import parse_unary_test
from ir import DecisionGraph, DecisionTable, HitPolicy, ModelType, Node, NodeKind, Rule, ValueType
from ir.values import Value

# (cell texts, output value)
RuleSpec = Tuple[Sequence[str], Value]


def input_node(node_id: str, name: Optional[str] = None, value_type: ValueType = ValueType.BOOLEAN) -> Node:
    return Node(id=node_id, name=name or node_id, kind=NodeKind.INPUT_VARIABLE, value_type=value_type)


def make_table(refs: Sequence[str], rules: Sequence[RuleSpec], hit_policy: HitPolicy = HitPolicy.UNIQUE,
               output_name: str = "out") -> DecisionTable:
    return DecisionTable(
        hit_policy=hit_policy,
        input_refs=tuple(refs),
        output_name=output_name,
        rules=tuple(
            Rule(conditions=tuple(parse_unary_test(text) for text in cells), output_value=value)
            for cells, value in rules
        ),
    )


def table_node(node_id: str, refs: Sequence[str], rules: Sequence[RuleSpec],
               hit_policy: HitPolicy = HitPolicy.UNIQUE, output: bool = False, name: Optional[str] = None) -> Node:
    return Node(
        id=node_id,
        name=name or node_id,
        kind=NodeKind.OUTPUT if output else NodeKind.DECISION,
        table=make_table(refs, rules, hit_policy, name or node_id),
    )


def identity_node(node_id: str, ref: str, name: Optional[str] = None) -> Node:
    return table_node(node_id, [ref], [(["true"], True), (["false"], False)], name=name)


def build_graph(graph_id: str, nodes: Sequence[Node], model_type: ModelType = ModelType.OUTCOME) -> DecisionGraph:
    """Edges follow the table references; the output is the node of kind OUTPUT"""
    edges = tuple((ref, node.id) for node in nodes if node.table is not None for ref in node.table.input_refs)
    output = next(node.id for node in nodes if node.kind is NodeKind.OUTPUT)
    return DecisionGraph(id=graph_id, model_type=model_type, nodes=tuple(nodes), edges=edges, output_node_id=output)


def chain_graph(length: int, graph_id: str = "chain", prefix: str = "n") -> DecisionGraph:
    """input -> pass-through nodes -> output, `length` nodes in total"""
    ids = [f"{prefix}{i}" for i in range(length)]
    nodes = [input_node(ids[0])]
    for i in range(1, length - 1):
        nodes.append(identity_node(ids[i], ids[i - 1]))
    nodes.append(table_node(ids[-1], [ids[-2]], [(["true"], True), (["-"], False)], HitPolicy.FIRST, output=True))
    return build_graph(graph_id, nodes)


def diamond_graph(graph_id: str = "diamond") -> DecisionGraph:
    """a -> b, a -> c, b -> d, c -> d"""
    return build_graph(graph_id, [
        input_node("a"),
        table_node("b", ["a"], [(["true"], "ja"), (["false"], "nee")]),
        table_node("c", ["a"], [(["-"], True)]),
        table_node("d", ["b", "c"], [(['"ja"', "true"], True), (["-", "-"], False)], HitPolicy.FIRST, output=True),
    ])


def fig1_graph(graph_id: str = "Fig1") -> DecisionGraph:
    """Four boolean inputs, four pass-through nodes, one aggregating FIRST table"""
    names = ["electricity", "rotor", "farm", "north_sea"]
    nodes: List[Node] = [input_node(f"i_{name}") for name in names]
    nodes += [identity_node(f"d_{name}", f"i_{name}") for name in names]
    nodes.append(table_node(
        "duty", [f"d_{name}" for name in names],
        [(["true", "true", "false", "false"], True), (["-", "-", "-", "-"], False)],
        HitPolicy.FIRST, output=True,
    ))
    return build_graph(graph_id, nodes)


def constant_graph(gold: DecisionGraph, value: Value, graph_id: str = "constant") -> DecisionGraph:
    """Same inputs as `gold`, output fixed to `value` whatever the inputs"""
    nodes = [input_node(node.id, node.name, node.value_type) for node in gold.input_nodes]
    nodes.append(table_node("constant", [], [([], value)], output=True))
    return build_graph(graph_id, nodes, gold.model_type)


def relabel(graph: DecisionGraph, prefix: str) -> DecisionGraph:
    """Same structure with every id and name prefixed"""
    new = {node.id: f"{prefix}{node.id}" for node in graph.nodes}
    nodes = tuple(
        replace(
            node,
            id=new[node.id],
            name=f"{prefix}{node.name}",
            table=None if node.table is None else replace(
                node.table, input_refs=tuple(new[ref] for ref in node.table.input_refs)
            ),
        )
        for node in graph.nodes
    )
    return replace(
        graph,
        id=f"{prefix}{graph.id}",
        nodes=nodes,
        edges=tuple((new[src], new[dst]) for src, dst in graph.edges),
        output_node_id=new[graph.output_node_id],
    )


def random_dag(rng: random.Random, n: int, edge_probability: float = 0.4, graph_id: str = "dag") -> DecisionGraph:
    """Edges only run from lower to higher index; sources are inputs, the last table node is the output"""
    ids = [f"v{i:02d}" for i in range(n)]
    preds: Dict[str, List[str]] = {node_id: [] for node_id in ids}
    for j in range(n):
        for i in range(j):
            if rng.random() < edge_probability:
                preds[ids[j]].append(ids[i])
    table_ids = [node_id for node_id in ids if preds[node_id]]
    output = table_ids[-1] if table_ids else ids[-1]

    nodes = []
    for node_id in ids:
        refs = preds[node_id]
        if not refs:
            nodes.append(input_node(node_id))
        else:
            nodes.append(table_node(node_id, refs, [(["-"] * len(refs), True)], output=node_id == output))
    edges = tuple((ref, node_id) for node_id in ids for ref in preds[node_id])
    return DecisionGraph(id=graph_id, model_type=ModelType.OUTCOME, nodes=tuple(nodes), edges=edges, output_node_id=output)


def _random_rules(rng: random.Random, arity: int, count: int) -> List[RuleSpec]:
    rules: List[RuleSpec] = [
        ([rng.choice(("true", "false", "-")) for _ in range(arity)], rng.random() < 0.5)
        for _ in range(count)
    ]
    rules.append((["-"] * arity, rng.random() < 0.5))
    return rules


def synthetic_boolean_model(
    rng: random.Random,
    n_inputs: int,
    n_identities: int,
    graph_id: str = "synthetic",
) -> DecisionGraph:
    """Random boolean model (FIRST tables) with `n_identities` pass-through nodes spliced into its references"""
    if n_inputs < 2:
        raise ValueError("synthetic models need at least two inputs")
    input_ids = [f"i{k}" for k in range(n_inputs)]
    refs: Dict[str, List[str]] = {
        "m0": input_ids[:2],
        "out": ["m0"] + input_ids[2:],
    }
    rules = {
        "m0": _random_rules(rng, 2, rng.randint(1, 4)),
        "out": _random_rules(rng, len(refs["out"]), rng.randint(1, 6)),
    }

    slots = [(consumer, position) for consumer, consumer_refs in refs.items() for position in range(len(consumer_refs))]
    identities: List[Node] = []
    for k in range(n_identities):
        consumer, position = rng.choice(slots)
        upstream = refs[consumer][position]
        identity_id = f"x{k:02d}"
        identities.append(identity_node(identity_id, upstream))
        refs[consumer][position] = identity_id
        # identity tables keep their own slot so later injections can lengthen chains
        refs[identity_id] = [upstream]
        slots.append((identity_id, 0))

    nodes = [input_node(input_id) for input_id in input_ids]
    nodes += [identity_node(node.id, refs[node.id][0]) for node in identities]
    nodes.append(table_node("m0", refs["m0"], rules["m0"], HitPolicy.FIRST))
    nodes.append(table_node("out", refs["out"], rules["out"], HitPolicy.FIRST, output=True))
    return build_graph(graph_id, nodes)


def clique_with_tail(clique: int, tail: int, graph_id: str = "clique_tail") -> DecisionGraph:
    """A complete graph on `clique` nodes whose last node starts a path of `tail` more nodes"""
    ids = [f"v{i:02d}" for i in range(clique + tail)]
    refs: Dict[str, List[str]] = {node_id: ids[:i] if i < clique else [ids[i - 1]] for i, node_id in enumerate(ids)}
    nodes = [input_node(ids[0])]
    for node_id in ids[1:]:
        arity = len(refs[node_id])
        nodes.append(table_node(node_id, refs[node_id], [(["-"] * arity, True)], output=node_id == ids[-1]))
    return build_graph(graph_id, nodes)
