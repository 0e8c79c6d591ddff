import random
from collections import Counter
from itertools import permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toxtraj import ttg
from toxtraj.errors import EdgeConflictError, GraphFormatError, LayerSignatureError, UnknownEdgeError
from toxtraj.resolution import Decision, Outcome
from toxtraj.schema import LAYER_ORDER, Layer, Metapath, NodeKey, RelationType
from toxtraj.ttg import EdgeState, TtgGraph

from .oracles import recount

S, P, M, R, O, D = LAYER_ORDER
RT = RelationType
FIG1 = ["Food packaging", "Polyethylene terephthalate", "water", "ingestion", "Gut", "Gut microbiota dysbiosis"]


def mp(names, pmid="1", year=2020, demographics=()):
    return Metapath(tuple(NodeKey(L, n) for L, n in zip(LAYER_ORDER, names)), pmid, year, tuple(demographics))


def decision(src, rel, dst, outcome, incoming=None, prov=None, note="because"):
    return Decision((src, rel, dst), None, Outcome(outcome), note, (), incoming, prov)


def fig1_graph():
    g = TtgGraph()
    g.upsert_metapath(mp(FIG1))
    return g


class TestUpsert:
    def test_single_chain(self):
        g = fig1_graph()
        s = ttg.stats(g)
        assert sum(s.nodes_per_layer.values()) == 6 and s.edge_count == 5
        assert all(rec.provenance == [("1", 2020)] for rec in g.active_edges())

    def test_idempotent(self):
        g = fig1_graph()
        again = ttg.upsert_metapath(fig1_graph(), mp(FIG1))
        assert again == g

    def test_shared_pollutant(self):
        g = fig1_graph()
        g.upsert_metapath(mp(["Plastic bottles"] + FIG1[1:], pmid="2"))
        pet = NodeKey(P, FIG1[1])
        assert ttg.stats(g).nodes_per_layer["Pollutant"] == 1
        assert sum(1 for r in g.active_edges() if r.dst == pet) == 2
        assert sum(1 for r in g.active_edges() if r.src == pet) == 1
        (water_edge,) = [r for r in g.active_edges() if r.src == pet]
        assert water_edge.provenance == [("1", 2020), ("2", 2020)]

    def test_demographics_on_disease(self):
        g = TtgGraph()
        g.upsert_metapath(mp(FIG1, demographics=["children"]))
        assert g.nodes[NodeKey(D, FIG1[-1])] == {"children"}
        with pytest.raises(LayerSignatureError):
            g.add_node(NodeKey(O, "Gut"), ["children"])

    def test_signature_violation(self):
        with pytest.raises(LayerSignatureError):
            TtgGraph().add_relation(NodeKey(M, "water"), RT.EMITS, NodeKey(P, "PET"))

    def test_conflict_leaves_graph_untouched(self):
        g = TtgGraph()
        g.add_relation(NodeKey(S, FIG1[0]), RT.NOT_EMIT, NodeKey(P, FIG1[1]), ("9", 2019))
        before = g.snapshot()
        with pytest.raises(EdgeConflictError):
            g.upsert_metapath(mp(FIG1))
        assert g == before


class TestEdgeExists:
    def test_fig1_emits(self):
        g = fig1_graph()
        assert ttg.edge_exists(g, NodeKey(S, FIG1[0]), RT.EMITS, NodeKey(P, FIG1[1])) is EdgeState.ACTIVE_POSITIVE

    def test_absent(self):
        assert fig1_graph().edge_exists(NodeKey(S, "Tyres"), RT.EMITS, NodeKey(P, FIG1[1])) is EdgeState.ABSENT

    def test_after_negation(self):
        g = fig1_graph()
        gut, dys = NodeKey(O, "Gut"), NodeKey(D, FIG1[-1])
        g.apply_decision(decision(gut, RT.CAUSES, dys, "Negated"))
        # the family is shared, so either member of it answers the same
        assert g.edge_exists(gut, RT.CAUSES, dys) is EdgeState.ACTIVE_NEGATIVE
        assert g.edge_exists(gut, RT.NOT_CAUSE, dys) is EdgeState.ACTIVE_NEGATIVE


class TestApplyDecision:
    src, dst = NodeKey(S, FIG1[0]), NodeKey(P, FIG1[1])

    def test_accept_extends_provenance(self):
        g = fig1_graph()
        ttg.apply_decision(g, decision(self.src, RT.EMITS, self.dst, "Accepted", "positive", ("5", 2024)))
        (rec,) = g.history(self.src, RT.EMITS, self.dst)
        assert rec.rel is RT.EMITS and rec.provenance == [("1", 2020), ("5", 2024)]
        assert rec.notes == ["because"]

    def test_flip(self):
        g = fig1_graph()
        g.apply_decision(decision(self.src, RT.EMITS, self.dst, "Negated", "negative", ("5", 2024)))
        old, new = g.history(self.src, RT.EMITS, self.dst)
        assert (old.status, old.rel) == ("superseded", RT.EMITS)
        assert (new.status, new.rel, new.provenance) == ("active", RT.NOT_EMIT, [("5", 2024)])

    def test_two_flips(self):
        g = fig1_graph()
        g.apply_decision(decision(self.src, RT.EMITS, self.dst, "Negated"))
        g.apply_decision(decision(self.src, RT.NOT_EMIT, self.dst, "Accepted"))
        hist = g.history(self.src, RT.EMITS, self.dst)
        assert len(hist) == 3 and sum(r.active for r in hist) == 1
        assert hist[-1].rel is RT.EMITS
        g.check_invariants()

    def test_unresolved_is_noop(self):
        g = fig1_graph()
        g.apply_decision(decision(self.src, RT.EMITS, self.dst, "Unresolved"))
        assert g == fig1_graph()

    def test_unknown_edge(self):
        with pytest.raises(UnknownEdgeError):
            TtgGraph().apply_decision(decision(self.src, RT.EMITS, self.dst, "Accepted"))

    def test_relation_without_negation(self):
        g = fig1_graph()
        with pytest.raises(UnknownEdgeError):
            g.apply_decision(decision(NodeKey(P, FIG1[1]), RT.CONTAMINATES, NodeKey(M, "water"), "Negated"))

    def test_negating_chain_edge(self):
        g = fig1_graph()
        route, gut = NodeKey(R, "ingestion"), NodeKey(O, "Gut")
        g.apply_decision(decision(route, RT.AFFECTS, gut, "Negated"))
        assert g.active_record(route, RT.AFFECTS, gut).rel is RT.NOT_AFFECT
        g.check_invariants()
        assert ttg.loads(ttg.dumps(g)) == g

    def test_direct_negation_stays_strict(self):
        with pytest.raises(LayerSignatureError):
            TtgGraph().add_relation(NodeKey(O, "Gut"), RT.NOT_CAUSE, NodeKey(D, "asthma"))


class TestStats:
    def test_empty(self):
        s = ttg.stats(TtgGraph())
        assert set(s.nodes_per_layer.values()) == {0}
        assert (s.edge_count, s.metapath_count, s.pollutant_count) == (0, 0, 0)

    def test_one_path(self):
        s = ttg.stats(fig1_graph())
        assert set(s.nodes_per_layer.values()) == {1}
        assert (s.edge_count, s.metapath_count, s.pollutant_count) == (5, 1, 1)

    def test_negated_edge_kills_path(self):
        g = fig1_graph()
        g.apply_decision(decision(NodeKey(S, FIG1[0]), RT.EMITS, NodeKey(P, FIG1[1]), "Negated"))
        assert ttg.stats(g).metapath_count == 0


POOLS = [[f"{L.short}{i}" for i in range(n)] for L, n in zip(LAYER_ORDER, (6, 4, 3, 2, 3, 5))]


def synthetic_graph(seed, n_paths=50, n_negations=6):
    rng = random.Random(seed)
    g = TtgGraph()
    for i in range(n_paths):
        names = [rng.choice(pool) for pool in POOLS]
        g.upsert_metapath(mp(names, pmid=str(1000 + i), year=rng.randint(2010, 2025),
                             demographics=rng.sample(["children", "adults"], rng.randint(0, 1))))
    # negate a few families so that some stored paths stop being live
    for _ in range(n_negations):
        rec = rng.choice(g.active_edges())
        if rec.rel.negation is not None:
            g.apply_decision(decision(rec.src, rec.rel, rec.dst, "Negated", "negative", ("x", 2024)))
    g.add_relation(NodeKey(P, "P0"), RT.NOT_CAUSE, NodeKey(D, "D4"), ("y", 2025))
    return g


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_stats_match_recount(tmp_path, seed):
    g = synthetic_graph(seed)
    path = tmp_path / "g.jsonl"
    ttg.serialize(g, path)
    assert ttg.stats(g).to_json() == recount.summary(path)


class TestCooccurrence:
    def test_single_path(self):
        c = ttg.cooccurrence(fig1_graph(), "Pollutant", "Source")
        assert (c.rows, c.cols, c.counts) == ([FIG1[1]], [FIG1[0]], [[1]])

    def test_absent_pair(self):
        assert ttg.cooccurrence(fig1_graph(), "Pollutant", "Source").cell(FIG1[1], "Tyres") == 0

    def test_same_layer(self):
        with pytest.raises(ValueError):
            ttg.cooccurrence(fig1_graph(), "Organ", "Organ")

    @pytest.mark.parametrize("pair", [("Pollutant", "Source"), ("Pollutant", "Disease"), ("Medium", "Organ")])
    def test_branching_against_path_recount(self, pair):
        g = synthetic_graph(4, n_negations=0)
        a, b = (LAYER_ORDER.index(Layer(x)) for x in pair)
        expected = Counter((p[a].name, p[b].name) for p in g.metapaths)
        c = ttg.cooccurrence(g, *pair)
        assert {(x, y): c.cell(x, y) for x in c.rows for y in c.cols if c.cell(x, y)} == dict(expected)
        totals = [sum(row) for row in c.counts]
        assert totals == sorted(totals, reverse=True)

    @pytest.mark.parametrize("seed", [5, 6])
    def test_matches_file_recount(self, tmp_path, seed):
        g = synthetic_graph(seed)
        path = tmp_path / "g.jsonl"
        ttg.serialize(g, path)
        for a, b in [("Pollutant", "Source"), ("Pollutant", "Disease"), ("Source", "Organ")]:
            assert ttg.cooccurrence(g, a, b).to_tsv(f"{a}\\{b}") == recount.cooccurrence_tsv(path, a, b)


class TestEmerging:
    def test_all_old(self):
        assert ttg.emerging(fig1_graph(), 2020) == []

    def test_min_year_rule(self):
        g = TtgGraph()
        src, dst = NodeKey(S, "a"), NodeKey(P, "b")
        g.add_relation(src, RT.EMITS, dst, ("1", 2024))
        g.add_relation(src, RT.EMITS, dst, ("2", 2019))
        assert ttg.emerging(g, 2020) == []
        g.add_relation(NodeKey(S, "c"), RT.EMITS, dst, ("3", 2022))
        assert ttg.emerging(g, 2020) == [((NodeKey(S, "c"), RT.EMITS, dst), 2022)]

    @pytest.mark.parametrize("cut", [2012, 2018, 2023])
    def test_matches_file_scan(self, tmp_path, cut):
        g = synthetic_graph(7)
        path = tmp_path / "g.jsonl"
        ttg.serialize(g, path)
        assert ttg.emerging_tsv(g, cut) == recount.emerging_tsv(path, cut)


class TestSerialize:
    def test_empty_round_trip(self, tmp_path):
        ttg.serialize(TtgGraph(), tmp_path / "g.jsonl")
        assert ttg.deserialize(tmp_path / "g.jsonl") == TtgGraph()

    def test_fixture_round_trip(self, tmp_path):
        g = synthetic_graph(3)
        g.ingested.add("abc")
        ttg.serialize(g, tmp_path / "g.jsonl")
        back = ttg.deserialize(tmp_path / "g.jsonl")
        assert back == g
        assert any(r.status == "superseded" for r in back.all_records())
        assert ttg.dumps(back) == ttg.dumps(g)

    def test_version_mismatch(self, tmp_path):
        p = tmp_path / "g.jsonl"
        p.write_text('{"format": "toxtraj-ttg", "version": 9}\n', encoding="utf-8")
        with pytest.raises(GraphFormatError, match="9") as ei:
            ttg.deserialize(p)
        assert "1" in str(ei.value)

    def test_corrupt_line(self):
        text = ttg.dumps(fig1_graph()).replace('"emits"', '"emitz"', 1)
        with pytest.raises(GraphFormatError, match="line"):
            ttg.loads(text)

    def test_wrong_header(self):
        with pytest.raises(GraphFormatError):
            ttg.loads('{"hello": 1}\n')

    def test_exports(self, tmp_path):
        g = fig1_graph()
        ttg.to_graphml(g, tmp_path / "g.graphml")
        assert "Gut microbiota dysbiosis" in (tmp_path / "g.graphml").read_text(encoding="utf-8")
        cy = ttg.to_cypher(g)
        assert cy.count("MERGE (:") == 6 and "[:EMITS" in cy


def test_snapshot_isolation():
    g = fig1_graph()
    snap = g.snapshot()
    g.upsert_metapath(mp(["Tyres"] + FIG1[1:], pmid="2"))
    assert ttg.stats(snap).edge_count == 5 and ttg.stats(g).edge_count == 6


def test_upsert_commutes_over_disjoint_paths():
    paths = [mp([f"{L.short}{k}" for L in LAYER_ORDER], pmid=str(k), year=2010 + k) for k in range(4)]
    graphs = []
    for order in permutations(paths):
        g = TtgGraph()
        for m in order:
            g.upsert_metapath(m)
        graphs.append(g)
    assert all(g == graphs[0] for g in graphs[1:])
    assert len({ttg.dumps(g) for g in graphs}) == 1


@settings(max_examples=40, deadline=None)
@given(st.permutations(range(12)), st.integers(0, 10))
def test_upsert_order_independent_with_overlap(order, seed):
    rng = random.Random(seed)
    paths = [mp([rng.choice(pool[:2]) for pool in POOLS], pmid=str(i), year=2015 + i) for i in range(12)]
    a, b = TtgGraph(), TtgGraph()
    for m in paths:
        a.upsert_metapath(m)
    for i in order:
        b.upsert_metapath(paths[i])
    assert ttg.dumps(a) == ttg.dumps(b)


# -- random operation sequences checked against a shadow model -------------------------

NEGATABLE = [(RT.EMITS, S, P), (RT.AFFECTS, P, O), (RT.CAUSES, P, D), (RT.CAUSES, O, D)]


def run_random_ops(seed, n_ops=500):
    """Apply random upserts, negative insertions, decisions and round trips.

    Returns the final graph and the number of operations that raised an
    expected error. Every step is checked against a small model holding the
    active relation and record count for each family.
    """
    rng = random.Random(seed)
    pools = [[f"{L.short}{i}" for i in range(2)] for L in LAYER_ORDER]
    g = TtgGraph()
    active, n_records = {}, Counter()
    rejected = 0

    def fam(src, rel, dst):
        return ttg.family_key(src, rel, dst)

    for _ in range(n_ops):
        op = rng.random()
        if op < 0.35:
            m = mp([rng.choice(pool) for pool in pools], pmid=str(rng.randint(1, 30)), year=rng.randint(2000, 2025))
            clash = any(active.get(fam(*e), e[1]) is not e[1] for e in m.edges)
            before = g.snapshot()
            if clash:
                with pytest.raises(EdgeConflictError):
                    g.upsert_metapath(m)
                assert g == before
                rejected += 1
            else:
                g.upsert_metapath(m)
                for e in m.edges:
                    if fam(*e) not in active:
                        active[fam(*e)] = e[1]
                        n_records[fam(*e)] += 1
        elif op < 0.55:
            rel, ls, ld = rng.choice(NEGATABLE[:3])
            src, dst = NodeKey(ls, rng.choice(pools[ls.position])), NodeKey(ld, rng.choice(pools[ld.position]))
            neg = rel.negation
            key = fam(src, neg, dst)
            if active.get(key, neg) is not neg:
                with pytest.raises(EdgeConflictError):
                    g.add_relation(src, neg, dst, ("n", 2021))
                rejected += 1
            else:
                g.add_relation(src, neg, dst, ("n", 2021))
                if key not in active:
                    active[key] = neg
                    n_records[key] += 1
        elif op < 0.9:
            if not active:
                continue
            key = rng.choice(sorted(active, key=ttg._fam_sort))
            src, _, dst = key
            rel = active[key]
            outcome = rng.choice(["Accepted", "Negated", "Unresolved"])
            wanted = {"Accepted": rel.positive_form, "Negated": rel.positive_form.negation,
                      "Unresolved": rel}[outcome]
            if wanted is None:
                with pytest.raises(UnknownEdgeError):
                    g.apply_decision(decision(src, rel, dst, outcome))
                rejected += 1
            else:
                g.apply_decision(decision(src, rel, dst, outcome))
                if wanted is not rel:
                    active[key] = wanted
                    n_records[key] += 1
        else:
            assert ttg.loads(ttg.dumps(g)) == g

        g.check_invariants()
        assert set(g.families) == set(active)
        for key, rel in active.items():
            src, _, dst = key
            assert g.active_record(src, rel, dst).rel is rel
            assert len(g.history(src, rel, dst)) == n_records[key]
    return g, rejected


@pytest.mark.parametrize("seed", range(3))
def test_random_operations_keep_invariants(seed):
    g, rejected = run_random_ops(seed)
    assert rejected > 0
    assert ttg.loads(ttg.dumps(g)) == g
