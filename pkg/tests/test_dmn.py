import json
from decimal import Decimal

import pytest

from conftest import MINI_CORPUS, MODELS_DIR, load_mini_model, mini_model_path
from dmn import (
    ArticleStore,
    BundleFlag,
    compact_json_schema,
    compression_ratio,
    deserialize_graph,
    expand_cross_references,
    infer_model_type,
    load_corpus,
    parse_articles,
    parse_dmn,
    serialize_graph,
    write_manifest,
)
from dmn.legal_articles import LegalArticle
from graphs import build_graph, input_node, table_node
from ir import IRRELEVANT, HitPolicy, ModelType, NodeKind, UnaryTest, ValueType, validate_graph
from ir.errors import DecisionModelError, DmnParseError, SchemaError

ARTICLES_XML = MINI_CORPUS / "articles" / "omgevingswet_fragment.xml"

MINIMAL_DMN = b"""<?xml version="1.0" encoding="UTF-8"?>
<definitions xmlns="https://www.omg.org/spec/DMN/20191111/MODEL/" id="defs" name="Melding">
  <knowledgeSource id="ks" locationURI="act.xml#art-1"/>
  <inputData id="i_a" name="Activiteit">
    <variable id="v_a" name="Activiteit" typeRef="string"/>
  </inputData>
  <decision id="d_out" name="Melding">
    <informationRequirement id="r1"><requiredInput href="#i_a"/></informationRequirement>
    <decisionTable id="t" hitPolicy="FIRST">
      <input id="c"><inputExpression typeRef="string"><text>Activiteit</text></inputExpression></input>
      <output id="o" name="Melding" typeRef="boolean"/>
      <rule id="r"><inputEntry><text>"lozen"</text></inputEntry><outputEntry><text>true</text></outputEntry></rule>
      <rule id="s"><inputEntry><text></text></inputEntry><outputEntry><text>false</text></outputEntry></rule>
    </decisionTable>
  </decision>
</definitions>
"""

TWO_INPUT_DMN = """<?xml version="1.0" encoding="UTF-8"?>
<definitions xmlns="https://www.omg.org/spec/DMN/20191111/MODEL/" id="defs" name="Kolommen">
  <inputData id="a" name="A"><variable id="v_a" name="A" typeRef="boolean"/></inputData>
  <inputData id="b" name="B"><variable id="v_b" name="B" typeRef="boolean"/></inputData>
  <decision id="d_out" name="Uitkomst">
    <informationRequirement id="r1"><requiredInput href="#a"/></informationRequirement>
    <informationRequirement id="r2"><requiredInput href="#b"/></informationRequirement>
    <decisionTable id="t" hitPolicy="FIRST">
      <input id="c1"><inputExpression typeRef="boolean"><text>{first}</text></inputExpression></input>
      <input id="c2"><inputExpression typeRef="boolean"><text>{second}</text></inputExpression></input>
      <output id="o" name="Uitkomst" typeRef="boolean"/>
      <rule id="r"><inputEntry><text>true</text></inputEntry><inputEntry><text>false</text></inputEntry><outputEntry><text>true</text></outputEntry></rule>
    </decisionTable>
  </decision>
</definitions>
"""


def two_input_model(first: str, second: str):
    xml = TWO_INPUT_DMN.format(first=first, second=second).encode("utf-8")
    return parse_dmn(xml, source_name="Outcome - Kolommen.dmn")


def article(article_id, refs=(), act="ACT"):
    return LegalArticle(id=article_id, title="", body_text="", recital_text="", internal_refs=tuple(refs),
                        list_item_count=0, source_xml_path="", act_id=act)


class TestDmnParser:
    def test_windturbine_structure(self, windturbine):
        assert windturbine.id == "GeluidProdWindturbine"
        assert windturbine.model_type is ModelType.OUTCOME
        assert len(windturbine.nodes) == 9
        assert windturbine.output_node_id == "d_plicht"
        assert windturbine.node("d_plicht").table.hit_policy is HitPolicy.FIRST
        assert windturbine.metadata["article_refs"] == ["art-4.1", "art-4.2"]
        assert validate_graph(windturbine).ok

    @pytest.mark.parametrize("model_id", [
        "BouwwerkBrandveiligheid", "GeluidProdWindturbine", "KoelwaterLozen",
        "AlarminstallatieHebben", "MijnbouwwerkMelden",
    ])
    def test_bundled_models_are_well_formed(self, model_id):
        assert validate_graph(load_mini_model(model_id)).ok

    def test_minimal_document(self):
        graph = parse_dmn(MINIMAL_DMN, source_name="Requirements - Melding.dmn")
        assert graph.id == "Melding"
        assert graph.model_type is ModelType.REQUIREMENTS
        assert graph.node("i_a").value_type is ValueType.STRING
        output = graph.node("d_out")
        assert output.kind is NodeKind.OUTPUT
        assert output.table.input_refs == ("i_a",)
        assert output.table.rules[0].conditions == (UnaryTest.equals("lozen"),)
        assert output.table.rules[1].conditions == (IRRELEVANT,)
        assert graph.metadata["source_bytes"] == len(MINIMAL_DMN)

    def test_parsing_is_deterministic(self):
        raw = mini_model_path("AlarminstallatieHebben").read_bytes()
        assert serialize_graph(parse_dmn(raw, "Requirements - A.dmn")) == serialize_graph(parse_dmn(raw, "Requirements - A.dmn"))

    def test_type_needs_a_hint(self):
        with pytest.raises(DmnParseError):
            parse_dmn(MINIMAL_DMN, source_name="Melding.dmn")
        graph = parse_dmn(MINIMAL_DMN, source_name="Melding.dmn", model_type=ModelType.OUTCOME)
        assert graph.model_type is ModelType.OUTCOME

    @pytest.mark.parametrize("name, expected", [
        ("Outcome - X.dmn", ModelType.OUTCOME),
        ("requirements - X.dmn", ModelType.REQUIREMENTS),
        ("Indieningsvereisten/X.dmn", ModelType.REQUIREMENTS),
        ("X.dmn", None),
    ])
    def test_infer_model_type(self, name, expected):
        assert infer_model_type(name) is expected

    @pytest.mark.parametrize("first, second, expected", [
        ("A", "B", ("a", "b")),
        ("B", "A", ("b", "a")),
        ("B", "iets anders", ("b", "a")),
        ("iets anders", "A", ("b", "a")),
        ("iets", "anders", ("a", "b")),
    ])
    def test_columns_bind_to_named_inputs(self, first, second, expected):
        assert two_input_model(first, second).node("d_out").table.input_refs == expected

    def test_column_without_a_free_requirement_is_rejected(self):
        xml = TWO_INPUT_DMN.format(first="A", second="iets anders").replace(
            '<informationRequirement id="r2"><requiredInput href="#b"/></informationRequirement>', ""
        ).replace('<inputData id="b" name="B"><variable id="v_b" name="B" typeRef="boolean"/></inputData>', "")
        with pytest.raises(DmnParseError) as info:
            parse_dmn(xml.encode("utf-8"), source_name="Outcome - Kolommen.dmn")
        assert "cannot bind input column" in str(info.value)

    @pytest.mark.parametrize("broken, fragment", [
        (MINIMAL_DMN.replace(b'hitPolicy="FIRST"', b'hitPolicy="PRIORITY"'), "hit policy"),
        (MINIMAL_DMN.replace(b"<text>\"lozen\"</text>", b"<text>[1..2]</text>"), "Unsupported construct"),
        (MINIMAL_DMN.replace(b'href="#i_a"', b'href="#i_missing"'), "unknown element"),
        (MINIMAL_DMN[:-30], "XML syntax error"),
    ])
    def test_rejects_unsupported_input(self, broken, fragment):
        with pytest.raises(DmnParseError) as info:
            parse_dmn(broken, source_name="Outcome - Broken.dmn")
        assert fragment in str(info.value)


class TestCompactFormat:
    def test_round_trip_keeps_the_graph(self):
        for path in sorted(MODELS_DIR.glob("*.dmn")):
            graph = parse_dmn(path.read_bytes(), source_name=path.name)
            restored = deserialize_graph(serialize_graph(graph))
            assert restored.nodes == graph.nodes
            assert restored.edges == graph.edges
            assert restored.output_node_id == graph.output_node_id
            assert restored.model_type is graph.model_type

    def test_decimals_stay_exact(self):
        graph = build_graph("numbers", [
            input_node("x", value_type=ValueType.NUMBER),
            table_node("o", ["x"], [(["> 0.1"], "2.50")], output=True),
        ])
        document = json.loads(serialize_graph(graph))
        assert document["nodes"][1]["table"]["rules"][0]["when"] == ["> 0.1"]
        restored = deserialize_graph(serialize_graph(graph))
        assert restored.node("o").table.rules[0].conditions[0].value == Decimal("0.1")

    def test_rule_outputs_keep_every_digit(self):
        precise = Decimal("0.12345678901234567890123")
        graph = build_graph("precise", [
            input_node("x"),
            table_node("o", ["x"], [(["true"], precise), (["false"], Decimal("-7.50"))], output=True),
        ])
        data = serialize_graph(graph)
        assert b'"then":0.12345678901234567890123' in data
        restored = deserialize_graph(data)
        assert [rule.output_value for rule in restored.node("o").table.rules] == [precise, Decimal("-7.50")]
        assert str(restored.node("o").table.rules[0].output_value) == "0.12345678901234567890123"

    def test_unknown_hit_policy_names_the_field(self, windturbine):
        document = json.loads(serialize_graph(windturbine))
        index = next(i for i, node in enumerate(document["nodes"]) if node["id"] == "d_plicht")
        document["nodes"][index]["table"]["hit_policy"] = "PRIORITY"
        with pytest.raises(SchemaError) as info:
            deserialize_graph(json.dumps(document))
        assert info.value.field_path == f"nodes[{index}].table.hit_policy"

    def test_bad_cell_names_the_cell(self, windturbine):
        document = json.loads(serialize_graph(windturbine))
        index = next(i for i, node in enumerate(document["nodes"]) if node["id"] == "d_plicht")
        document["nodes"][index]["table"]["rules"][0]["when"][1] = "maybe"
        with pytest.raises(SchemaError) as info:
            deserialize_graph(json.dumps(document))
        assert info.value.field_path == f"nodes[{index}].table.rules[0].when[1]"

    @pytest.mark.parametrize("payload", [b"{", b"[]", b'{"id": "x"}', json.dumps({
        "id": "x", "model_type": "Outcome", "output": "x", "nodes": [],
    })])
    def test_malformed_documents(self, payload):
        with pytest.raises(SchemaError):
            deserialize_graph(payload)

    def test_compact_form_is_smaller(self, windturbine):
        ratio = compression_ratio(windturbine)
        assert ratio is not None and ratio > 1.0
        assert compression_ratio(build_graph("bare", [input_node("i"), table_node("o", ["i"], [], output=True)])) is None

    def test_published_schema(self):
        schema = compact_json_schema()
        assert set(schema["required"]) >= {"id", "model_type", "output", "nodes"}


@pytest.fixture(scope="module")
def store():
    return ArticleStore(parse_articles(ARTICLES_XML.read_bytes(), str(ARTICLES_XML)))


class TestLegalArticles:
    def test_article_fields(self, store):
        first = store.get("art-4.1")
        assert first.act_id == "OMGF-0001"
        assert first.title == "Artikel 4.1 (geluidproductie windturbines)"
        assert first.internal_refs == ("art-4.3",)
        assert first.recital_text.startswith("Het artikel beperkt")
        assert "windpark" in first.body_text
        assert "beperkt de rekenplicht" not in first.body_text
        assert store.get("art-4.2").external_refs == ("BWBR0008017",)
        assert store.get("art-7.2").internal_refs == ("art-6.2",)

    def test_list_items(self, store):
        assert store.get("art-5.2").list_item_count == 3
        assert store.get("art-4.3").list_item_count == 0

    def test_seed_expands_one_level(self, store):
        ids, warnings = expand_cross_references(["art-4.1", "art-4.2"], store)
        assert ids == ["art-4.1", "art-4.2", "art-4.3"]
        assert warnings == []

    def test_expansion_does_not_recurse(self):
        store = ArticleStore([article("A", ["B", "C"]), article("B", ["D"]), article("C"), article("D")])
        ids, _ = expand_cross_references(["A"], store)
        assert ids == ["A", "B", "C"]

    def test_unreferencing_seed_is_unchanged(self):
        store = ArticleStore([article("A"), article("B")])
        assert expand_cross_references(["B", "A"], store) == (["B", "A"], [])

    def test_other_acts_and_dangling_references(self):
        store = ArticleStore([article("A", ["X", "G"]), article("X", act="OTHER")])
        ids, warnings = expand_cross_references(["A", "missing"], store)
        assert ids == ["A", "missing"]
        assert len(warnings) == 2

    def test_duplicate_ids_keep_the_first(self):
        store = ArticleStore([article("A", ["B"]), article("A")])
        assert len(store) == 1
        assert store.get("A").internal_refs == ("B",)


class TestCorpus:
    def test_bundles_are_sorted_and_complete(self, mini_corpus):
        assert [bundle.model_id for bundle in mini_corpus] == sorted(bundle.model_id for bundle in mini_corpus)
        assert len(mini_corpus) == 5
        assert mini_corpus.errors == []
        assert len(mini_corpus.of_type(ModelType.REQUIREMENTS)) == 2

    def test_bundle_contents(self, mini_corpus):
        bundles = mini_corpus.by_id()
        windturbine = bundles["GeluidProdWindturbine"]
        assert [a.id for a in windturbine.articles] == ["art-4.1", "art-4.2", "art-4.3"]
        assert windturbine.seed_article_ids == ["art-4.1", "art-4.2"]
        assert windturbine.flags == []
        assert bundles["KoelwaterLozen"].srl_annotations.objects == ["koelwater", "de maximale warmtevracht"]
        assert bundles["BouwwerkBrandveiligheid"].flags == [BundleFlag.MISSING_SRL]

    def test_empty_directory(self, tmp_path):
        corpus = load_corpus(tmp_path, tmp_path / "articles")
        assert len(corpus) == 0
        assert corpus.errors == []

    def test_missing_directory_raises(self, tmp_path):
        with pytest.raises(DecisionModelError):
            load_corpus(tmp_path / "nowhere", None)

    def test_bad_file_is_reported_not_fatal(self, tmp_path):
        models = tmp_path / "models"
        models.mkdir()
        (models / "Outcome - Good.dmn").write_bytes(mini_model_path("KoelwaterLozen").read_bytes())
        (models / "Outcome - Bad.dmn").write_bytes(b"<definitions")
        corpus = load_corpus(models, MINI_CORPUS / "articles", max_workers=2)
        assert [bundle.model_id for bundle in corpus] == ["Good"]
        assert len(corpus.errors) == 1
        assert corpus.errors[0].path.endswith("Outcome - Bad.dmn")
        assert BundleFlag.MISSING_SRL in corpus.bundles[0].flags

    def test_article_links_file_adds_seeds(self, tmp_path):
        models = tmp_path / "models"
        models.mkdir()
        (models / "Outcome - KoelwaterLozen.dmn").write_bytes(mini_model_path("KoelwaterLozen").read_bytes())
        (models / "article_links.yaml").write_text("KoelwaterLozen:\n  - art-8.3\n", encoding="utf-8")
        bundle = load_corpus(models, MINI_CORPUS / "articles").bundles[0]
        assert bundle.seed_article_ids[-1] == "art-8.3"
        assert "art-8.3" in [a.id for a in bundle.articles]

    def test_manifest(self, mini_corpus, tmp_path):
        path = write_manifest(mini_corpus, tmp_path / "out" / "manifest.json")
        document = json.loads(path.read_text(encoding="utf-8"))
        assert sorted(document["models"]) == sorted(bundle.model_id for bundle in mini_corpus)
        assert document["models"]["BouwwerkBrandveiligheid"]["flags"] == ["missing_srl"]
        assert document["errors"] == []
