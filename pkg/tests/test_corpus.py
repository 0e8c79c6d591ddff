import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toxtraj.corpus import (
    AbstractRecord,
    ChunkConfig,
    Corpus,
    chunk,
    clean_text,
    dump_corpus,
    load_corpus,
    reassemble,
    save_corpus,
)
from toxtraj.errors import CorpusError, DuplicatePmidError

from .oracles.segmentation import segment

TEN_SENTENCES = (
    "Microplastics are now found in nearly every environmental compartment studied so far. "
    "Bottled water samples from twelve countries were analysed with infrared spectroscopy. "
    "Polyethylene terephthalate fragments dominated the particle counts. "
    "Particles smaller than ten micrometres were counted separately. "
    "Why do smaller particles matter? "
    "They cross the intestinal barrier more readily in animal models and reach the liver. "
    "Children drink more water per kilogram of body weight than adults do. "
    "Exposure estimates therefore differ by age group, e.g. infants versus teenagers. "
    "Gut microbiota changes were reported in two of the cohort studies reviewed here! "
    "Further longitudinal work is needed to confirm these associations."
)
# produced by tests/oracles/segmentation.py before the chunker existed
FROZEN_SPANS = [(0, 304), (240, 492), (422, 654), (573, 720)]


def _write(tmp_path, lines):
    p = tmp_path / "corpus.jsonl"
    p.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    return p


def _rec(pmid, text="Some text.", year=2020):
    return json.dumps({"pmid": pmid, "year": year, "title": "t", "text": text})


class TestLoad:
    def test_empty_file(self, tmp_path):
        assert len(load_corpus(_write(tmp_path, []))) == 0

    def test_order_preserved(self, tmp_path):
        c = load_corpus(_write(tmp_path, [_rec("2"), _rec("1")]))
        assert [r.pmid for r in c] == ["2", "1"]

    def test_duplicate_pmid_named(self, tmp_path):
        with pytest.raises(DuplicatePmidError, match="123") as ei:
            load_corpus(_write(tmp_path, [_rec("123"), _rec("123")]))
        assert ei.value.line == 2

    def test_malformed_line_reports_number(self, tmp_path):
        with pytest.raises(CorpusError) as ei:
            load_corpus(_write(tmp_path, [_rec("1"), "{not json"]))
        assert ei.value.line == 2
        assert "line 2" in str(ei.value)

    def test_missing_year_rejected(self, tmp_path):
        line = json.dumps({"pmid": "1", "title": "t", "text": "x"})
        with pytest.raises(CorpusError, match="year"):
            load_corpus(_write(tmp_path, [line]))

    def test_text_empty_after_cleaning(self, tmp_path):
        with pytest.raises(CorpusError, match="empty"):
            load_corpus(_write(tmp_path, [_rec("1", "<p> </p>")]))

    def test_unreadable(self, tmp_path):
        with pytest.raises(CorpusError):
            load_corpus(tmp_path / "absent.jsonl")

    def test_cleaning_applied(self, tmp_path):
        c = load_corpus(_write(tmp_path, [_rec("1", "<b>Microplastics</b>   harm.")]))
        assert c["1"].text == "Microplastics harm."

    def test_round_trip(self, tmp_path):
        recs = [AbstractRecord("a", 2001, "T", "One. Two.", {"journal": "J"}),
                AbstractRecord("b", 2019, "U", "Three.")]
        p = tmp_path / "c.jsonl"
        save_corpus(Corpus(recs), p)
        again = load_corpus(p)
        assert again == Corpus(recs)
        assert dump_corpus(again) == p.read_text(encoding="utf-8")


class TestClean:
    def test_tags(self):
        assert clean_text("<b>Microplastics</b> harm.") == "Microplastics harm."

    def test_url(self):
        assert clean_text("See https://x.y/z for data.") == "See for data."

    def test_escaped_markup(self):
        assert clean_text("a &lt;i&gt;b&lt;/i&gt; c") == "a b c"

    @given(st.text())
    def test_idempotent_and_not_longer(self, s):
        once = clean_text(s)
        assert clean_text(once) == once
        assert len(once) <= len(s)


class TestChunk:
    def test_single_short_sentence(self):
        rec = AbstractRecord("1", 2020, "", "PET leaches into water.")
        (c,) = chunk(rec)
        assert c.text == rec.text and c.char_span == (0, len(rec.text))

    def test_empty_text(self):
        rec = AbstractRecord("1", 2020, "", "")
        with pytest.raises(ValueError):
            chunk(rec)

    def test_min_tokens(self):
        with pytest.raises(ValueError):
            ChunkConfig(max_tokens=15)

    def test_matches_reference_segmentation(self):
        rec = AbstractRecord("1", 2020, "", TEN_SENTENCES)
        chunks = chunk(rec, ChunkConfig(max_tokens=40, overlap_sentences=1))
        assert [c.char_span for c in chunks] == FROZEN_SPANS
        # the oracle still agrees with its frozen output
        assert segment(TEN_SENTENCES, 40, 1) == FROZEN_SPANS

    def test_long_sentence_is_split(self):
        text = " ".join(f"w{i}" for i in range(50)) + "."
        chunks = chunk(AbstractRecord("1", 2020, "", text), ChunkConfig(max_tokens=16))
        assert all(len(c.text.split()) <= 16 for c in chunks)
        assert reassemble(chunks) == text


_word = st.text(alphabet="abcdefgh", min_size=1, max_size=6)
_sentence = st.builds(
    lambda first, rest, end: " ".join([first.capitalize()] + rest) + end,
    _word, st.lists(_word, max_size=25), st.sampled_from([".", "?", "!"]),
)


@settings(max_examples=150, deadline=None)
@given(st.lists(_sentence, min_size=1, max_size=15), st.integers(16, 40), st.integers(0, 3))
def test_chunk_properties(sents, max_tokens, overlap):
    text = " ".join(sents)
    rec = AbstractRecord("p", 2020, "", text)
    chunks = chunk(rec, ChunkConfig(max_tokens, overlap))
    assert reassemble(chunks) == text
    assert chunks[0].char_span[0] == 0 and chunks[-1].char_span[1] == len(text)
    for prev, cur in zip(chunks, chunks[1:]):
        assert prev.char_span[0] < cur.char_span[0] <= prev.char_span[1]
    for c in chunks:
        assert c.text == text[c.char_span[0]:c.char_span[1]]
        assert len(c.text.split()) <= max_tokens
    if all(len(s.split()) <= max_tokens for s in sents) and max_tokens >= 16:
        assert [c.char_span for c in chunks] == segment(text, max_tokens, overlap)
