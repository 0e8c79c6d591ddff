import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toxtraj.consistency import Verdict, check_metapath, check_relation, evaluate, question, render, verbalize
from toxtraj.cypher import QueryAst, emit_cypher, parse_cypher
from toxtraj.errors import CypherLexError, CypherMalformed, CypherUnknownLabel, CypherUnknownRelation
from toxtraj.resolution import Decision, Outcome
from toxtraj.schema import LAYER_ORDER, Metapath, NodeKey, RelationType, placeholder
from toxtraj.ttg import TtgGraph

S, P, M, R, O, D = LAYER_ORDER
RT = RelationType
FIG1 = ["Food packaging", "Polyethylene terephthalate", "water", "ingestion", "Gut", "Gut microbiota dysbiosis"]
CANONICAL = ('MATCH (a:Source {name: "Food packaging"})-[:EMITS]->'
             '(b:Pollutant {name: "Polyethylene terephthalate"}) RETURN count(*) > 0')


def fig1(pmid="1"):
    return Metapath(tuple(NodeKey(L, n) for L, n in zip(LAYER_ORDER, FIG1)), pmid, 2020)


_NAME_ALPHABET = 'abcXYZ 019-_"\\{}()[]:>*éµ'


def random_name(rng):
    return "".join(rng.choice(_NAME_ALPHABET) for _ in range(rng.randint(1, 14)))


def random_ast(rng):
    """Relation chosen first, then a legal layer pair for it, then arbitrary names."""
    rel = rng.choice(list(RT))
    src_layer, dst_layer = rng.choice(rel.signatures)
    return QueryAst(src_layer, random_name(rng), rel, dst_layer, random_name(rng))


class TestVerbalize:
    def test_fig1_first_question(self):
        assert verbalize(fig1())[0].question == "Does Food packaging emits Polyethylene terephthalate?"

    def test_one_query_per_edge_in_order(self):
        qs = verbalize(fig1())
        assert [q.pattern for q in qs] == fig1().edges
        for q in qs:
            src, rel, dst = q.pattern
            assert src.name in q.question and dst.name in q.question
            assert rel.verb in q.question

    def test_placeholder_verbatim(self):
        node = placeholder(M, "PET")
        q = question(NodeKey(P, "PET"), RT.CONTAMINATES, node)
        assert "unknown medium (PET)" in q


class TestEmit:
    def test_canonical_fig1(self):
        assert emit_cypher(verbalize(fig1())[0].ast) == CANONICAL

    def test_quote_escaping(self):
        ast = QueryAst(S, 'the "best" bottle', RT.EMITS, P, "back\\slash")
        text = emit_cypher(ast)
        assert '{name: "the \\"best\\" bottle"}' in text and '"back\\\\slash"' in text
        assert parse_cypher(text) == ast

    def test_deterministic(self):
        ast = verbalize(fig1())[2].ast
        assert emit_cypher(ast) == emit_cypher(ast)


class TestParse:
    def test_round_trip(self):
        assert emit_cypher(parse_cypher(CANONICAL)) == CANONICAL

    def test_free_spacing_and_case(self):
        text = 'match(x:Source{name:"Food packaging"}) - [ :EMITS ] -> (y:Pollutant {name : "Polyethylene terephthalate"}) return COUNT( * ) > 0'
        assert emit_cypher(parse_cypher(text)) == CANONICAL

    def test_unknown_label_position(self):
        text = 'MATCH (a:Planet {name: "x"})-[:EMITS]->(b:Pollutant {name: "y"}) RETURN count(*) > 0'
        with pytest.raises(CypherUnknownLabel) as ei:
            parse_cypher(text)
        assert ei.value.position == text.index("Planet")

    def test_unknown_relation(self):
        text = CANONICAL.replace("EMITS", "LEAKS")
        with pytest.raises(CypherUnknownRelation) as ei:
            parse_cypher(text)
        assert ei.value.position == text.index("LEAKS")

    def test_lexical_error(self):
        text = CANONICAL.replace('"Food packaging"', '"Food packaging')
        with pytest.raises(CypherLexError) as ei:
            parse_cypher(text)
        assert ei.value.position is not None

    @pytest.mark.parametrize("text", [
        CANONICAL.replace(" RETURN count(*) > 0", ""),
        CANONICAL.replace("->", "<-"),
        CANONICAL.replace("{name:", "{title:"),
        CANONICAL + " LIMIT 1",
        "",
    ])
    def test_malformed(self, text):
        with pytest.raises(CypherMalformed) as ei:
            parse_cypher(text)
        assert 0 <= ei.value.position <= len(text)

    def test_layer_pair_not_checked(self):
        # the vocabulary is checked, the pairing is left to the store
        ast = parse_cypher(CANONICAL.replace("(b:Pollutant", "(b:Organ"))
        assert ast.dst_label is O
        assert evaluate(ast, TtgGraph()) is Verdict.NOVEL


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_ast_fixed_point(seed):
    ast = random_ast(random.Random(seed))
    text = emit_cypher(ast)
    assert parse_cypher(text) == ast
    assert emit_cypher(parse_cypher(text)) == text


class TestEvaluate:
    def _graph(self):
        g = TtgGraph()
        g.upsert_metapath(fig1())
        return g

    def test_confirmed(self):
        ast = QueryAst(O, "Gut", RT.CAUSES, D, FIG1[-1])
        assert evaluate(ast, self._graph()) is Verdict.CONFIRMED

    def test_novel(self):
        assert evaluate(QueryAst(O, "Gut", RT.CAUSES, D, "asthma"), TtgGraph()) is Verdict.NOVEL

    def test_conflict_with_stored_negation(self):
        g = TtgGraph()
        mp_, crohn = NodeKey(P, "Microplastic"), NodeKey(D, "Crohn's disease")
        g.add_relation(mp_, RT.NOT_CAUSE, crohn, ("1", 2020))
        assert evaluate(QueryAst(P, "Microplastic", RT.CAUSES, D, "Crohn's disease"), g) is Verdict.CONFLICT
        assert evaluate(QueryAst(P, "Microplastic", RT.NOT_CAUSE, D, "Crohn's disease"), g) is Verdict.CONFIRMED

    def test_incoming_negation_against_positive(self):
        g = TtgGraph()
        g.add_relation(NodeKey(P, "PVC"), RT.CAUSES, NodeKey(D, "asthma"))
        assert check_relation(NodeKey(P, "PVC"), RT.NOT_CAUSE, NodeKey(D, "asthma"), g).overall == "NeedsResolution"

    def test_agrees_with_edge_exists_for_every_record(self):
        from .test_ttg import synthetic_graph

        g = synthetic_graph(11)
        for rec in g.all_records():
            for rel in {rec.rel, rec.rel.positive_form}:
                ast = QueryAst(rec.src.layer, rec.src.name, rel, rec.dst.layer, rec.dst.name)
                state = g.edge_exists(rec.src, rel, rec.dst).value
                expected = "Confirmed" if (state == "ActivePositive") == rel.positive else "Conflict"
                assert evaluate(ast, g).value == expected


class TestCheckMetapath:
    def test_after_upsert_all_confirmed(self):
        g = TtgGraph()
        g.upsert_metapath(fig1())
        rep = check_metapath(fig1("2"), g)
        assert rep.verdicts == [Verdict.CONFIRMED] * 5 and rep.overall == "Consistent"

    def test_empty_graph_all_novel(self):
        rep = check_metapath(fig1(), TtgGraph())
        assert rep.verdicts == [Verdict.NOVEL] * 5 and rep.overall == "Consistent"

    def test_one_conflict(self):
        g = TtgGraph()
        g.upsert_metapath(fig1())
        edge = (NodeKey(O, "Gut"), RT.CAUSES, NodeKey(D, FIG1[-1]))
        g.apply_decision(Decision(edge, None, Outcome.NEGATED, "", ()))
        rep = check_metapath(fig1("2"), g)
        assert rep.verdicts == [Verdict.CONFIRMED] * 4 + [Verdict.CONFLICT]
        assert rep.overall == "NeedsResolution"
        assert [c.query.pattern for c in rep.conflicts] == [edge]

    def test_render_and_log(self):
        rep = check_metapath(fig1(), TtgGraph())
        assert render(rep).splitlines()[-1] == "overall: Consistent"
        recs = rep.log_records("1", 0)
        assert [r["edge"] for r in recs] == list(range(5))
        assert recs[0]["cypher"] == CANONICAL
