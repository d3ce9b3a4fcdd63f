from __future__ import annotations

import math
import random
from collections import Counter

import pytest
from hypothesis import given, strategies as st

from mcqa.corpus import Paragraph, Question
from mcqa.retrieval import (
    EvidenceError,
    IndexBuildError,
    IndexFormatError,
    build_index,
    bm25_score,
    fuse_evidence,
    load_index,
    retrieve_evidence,
    retrieve_top_k,
    save_index,
    tokenize,
)

import zh_fixtures as zh


# --------------------------------------------------------------------------
# Independent oracle: recompute BM25 by scanning raw token counts, without
# touching the index structures under test.

def oracle_scores(texts: dict[str, str], query: str) -> dict[str, float]:
    counts = {pid: Counter(tokenize(text)) for pid, text in texts.items()}
    lengths = {pid: sum(c.values()) for pid, c in counts.items()}
    n = len(texts)
    avg = sum(lengths.values()) / n
    scores = {}
    for pid in texts:
        total = 0.0
        for token in set(tokenize(query)):
            tf = counts[pid][token]
            if tf == 0:
                continue
            df = sum(1 for c in counts.values() if c[token] > 0)
            idf = math.log(1.0 + (n - df + 0.5) / (df + 0.5))
            total += idf * tf * (1.2 + 1.0) / (tf + 1.2 * (1.0 - 0.75 + 0.75 * lengths[pid] / avg))
        scores[pid] = total
    return scores


def fixture_paragraphs(count: int = 20, seed: int = 42) -> list[Paragraph]:
    rng = random.Random(seed)
    chars = [chr(cp) for cp in range(0x4E00, 0x4E00 + 120)]
    words = ["bert", "lucene", "index", "query", "rank"]
    paragraphs = []
    for i in range(count):
        pieces = [rng.choice(chars) for _ in range(rng.randrange(5, 25))]
        if rng.random() < 0.5:
            pieces.insert(rng.randrange(len(pieces)), rng.choice(words))
        paragraphs.append(Paragraph("les", i, "".join(pieces)))
    return paragraphs


class TestTokenize:
    def test_cjk_pair(self):
        assert tokenize("老人") == ["老", "人", "老人"]

    def test_empty(self):
        assert tokenize("") == []

    def test_ascii_breaks_bigram_adjacency(self):
        assert tokenize("BERT模型") == ["bert", "模", "型", "模型"]

    def test_punctuation_and_whitespace_emit_nothing(self):
        assert tokenize("，。！ \t\n？") == []
        assert tokenize("老，人") == ["老", "人"]

    def test_ascii_runs_lowercased(self):
        assert tokenize("Na2 CO3") == ["na2", "co3"]

    def test_three_char_run(self):
        assert tokenize("甲乙丙") == ["甲", "乙", "甲乙", "丙", "乙丙"]

    @given(st.text(max_size=60))
    def test_tokens_never_contain_whitespace(self, text):
        for token in tokenize(text):
            assert token
            assert not any(ch.isspace() for ch in token)


class TestBuildIndex:
    def test_statistics(self):
        paragraphs = [Paragraph("l", 0, "老人"), Paragraph("l", 1, "老人與海"),
                      Paragraph("l", 2, "bert")]
        index = build_index(paragraphs, "textbook")
        assert index.doc_count == 3
        lengths = [3, 7, 1]
        assert index.avg_doc_length == pytest.approx(sum(lengths) / 3, rel=1e-12)
        assert sorted(index.doc_lengths.values()) == sorted(lengths)

    def test_single_paragraph_postings(self):
        index = build_index([Paragraph("l", 0, "老人")], "textbook")
        assert set(index.postings) == {"老", "人", "老人"}
        for entries in index.postings.values():
            assert entries == (("l:0", 1),)

    def test_duplicate_paragraph_id_rejected(self):
        paragraphs = [Paragraph("l", 0, "甲"), Paragraph("l", 0, "乙")]
        with pytest.raises(IndexBuildError, match="duplicate"):
            build_index(paragraphs, "textbook")

    def test_empty_corpus_rejected(self):
        with pytest.raises(IndexBuildError, match="zero paragraphs"):
            build_index([], "textbook")

    def test_bad_source_tag(self):
        with pytest.raises(ValueError, match="source_tag"):
            build_index([Paragraph("l", 0, "甲")], "corpus")

    def test_postings_match_naive_scan(self):
        paragraphs = fixture_paragraphs()
        index = build_index(paragraphs, "textbook")
        expected: dict[str, dict[str, int]] = {}
        for p in paragraphs:
            pid = f"{p.lesson_id}:{p.index}"
            for token in tokenize(p.text):
                expected.setdefault(token, {}).setdefault(pid, 0)
                expected[token][pid] += 1
        assert set(index.postings) == set(expected)
        for token, entries in index.postings.items():
            assert dict(entries) == expected[token]
            assert list(entries) == sorted(entries)

    def test_build_is_deterministic(self):
        paragraphs = fixture_paragraphs()
        assert build_index(paragraphs, "textbook") == build_index(paragraphs, "textbook")


class TestBm25:
    def test_no_overlap_scores_zero(self):
        index = build_index([Paragraph("l", 0, "老人")], "textbook")
        assert bm25_score(index, tokenize("海豚"), "l:0") == 0.0

    def test_matches_oracle(self):
        paragraphs = fixture_paragraphs()
        texts = {f"{p.lesson_id}:{p.index}": p.text for p in paragraphs}
        index = build_index(paragraphs, "textbook")
        rng = random.Random(7)
        for _ in range(50):
            source = rng.choice(paragraphs).text
            start = rng.randrange(max(1, len(source) - 4))
            query = source[start:start + rng.randrange(2, 6)] or source[:2]
            expected = oracle_scores(texts, query)
            for pid in texts:
                assert bm25_score(index, tokenize(query), pid) == pytest.approx(
                    expected[pid], abs=1e-9)

    def test_duplicate_query_tokens_ignored(self):
        index = build_index(fixture_paragraphs(), "textbook")
        tokens = tokenize("老人")
        assert bm25_score(index, tokens, "les:0") == bm25_score(index, tokens * 3, "les:0")

    def test_monotone_in_term_frequency(self):
        # same length docs, increasing tf of the probe term
        paragraphs = [Paragraph("l", i, "丙" * (4 - i) + "甲" * i) for i in range(1, 4)]
        index = build_index(paragraphs, "textbook")
        scores = [bm25_score(index, ["甲"], f"l:{i}") for i in range(1, 4)]
        assert scores == sorted(scores)
        assert scores[0] < scores[-1]

    def test_unknown_paragraph_id(self):
        index = build_index([Paragraph("l", 0, "甲")], "textbook")
        with pytest.raises(KeyError, match="nope"):
            bm25_score(index, ["甲"], "nope")


class TestRetrieveTopK:
    def test_exact_text_query_ranks_first(self):
        paragraphs = fixture_paragraphs()
        index = build_index(paragraphs, "textbook")
        target = paragraphs[3]
        results = retrieve_top_k(index, target.text, 1)
        assert results[0].paragraph_id == "les:3"
        assert results[0].text == target.text

    def test_disjoint_query_returns_nothing(self):
        index = build_index([Paragraph("l", 0, "老人")], "textbook")
        assert retrieve_top_k(index, "海豚", 3) == []

    def test_k_larger_than_corpus(self):
        index = build_index([Paragraph("l", 0, "老人"), Paragraph("l", 1, "老虎")], "textbook")
        results = retrieve_top_k(index, "老", 10)
        assert len(results) == 2

    def test_k_must_be_positive(self):
        index = build_index([Paragraph("l", 0, "甲")], "textbook")
        with pytest.raises(ValueError, match="k"):
            retrieve_top_k(index, "甲", 0)

    def test_matches_brute_force(self):
        paragraphs = fixture_paragraphs(count=30, seed=3)
        texts = {f"{p.lesson_id}:{p.index}": p.text for p in paragraphs}
        index = build_index(paragraphs, "textbook")
        rng = random.Random(99)
        for _ in range(40):
            source = rng.choice(paragraphs).text
            query = source[:rng.randrange(2, min(8, len(source)) + 1)]
            expected = sorted(
                ((pid, s) for pid, s in oracle_scores(texts, query).items() if s > 0),
                key=lambda item: (-item[1], item[0]))
            got = retrieve_top_k(index, query, 5)
            assert [r.paragraph_id for r in got] == [pid for pid, _ in expected[:5]]
            for result, (_, expected_score) in zip(got, expected):
                assert result.score == pytest.approx(expected_score, abs=1e-9)

    def test_results_sorted(self):
        index = build_index(fixture_paragraphs(), "textbook")
        results = retrieve_top_k(index, "老人 bert", 10)
        keys = [(-r.score, r.paragraph_id) for r in results]
        assert keys == sorted(keys)


class TestFuseEvidence:
    def test_both_present(self):
        assert fuse_evidence("甲", "乙") == "甲 [SEP] 乙"

    def test_single_source(self):
        assert fuse_evidence("甲", None) == "甲"
        assert fuse_evidence(None, "乙") == "乙"

    def test_both_absent(self):
        assert fuse_evidence(None, None) == ""
        assert fuse_evidence("", "") == ""

    def test_textbook_always_first(self):
        fused = fuse_evidence("課本內容", "維基內容")
        assert fused.index("課本內容") < fused.index("維基內容")


class TestRetrieveEvidence:
    def _question(self, **overrides) -> Question:
        fields = dict(id="q", text=zh.FAMILY_QUESTION, options=zh.FAMILY_OPTIONS,
                      gold_index=0, gold_se=zh.FAMILY_EVIDENCE, se_class="SE1", split="test")
        fields.update(overrides)
        return Question(**fields)

    def test_gold_passthrough(self):
        question = self._question()
        assert retrieve_evidence(question, mode="gold") == zh.FAMILY_EVIDENCE

    def test_gold_on_se2_rejected(self):
        question = self._question(gold_se=None, se_class="SE2")
        with pytest.raises(EvidenceError, match="q"):
            retrieve_evidence(question, mode="gold")

    def test_retrieved_without_wiki_has_no_separator(self):
        index = build_index([Paragraph("l", 0, zh.FAMILY_EVIDENCE)], "textbook")
        evidence = retrieve_evidence(self._question(), index, None, mode="retrieved")
        assert evidence == zh.FAMILY_EVIDENCE
        assert " [SEP] " not in evidence

    def test_retrieved_fuses_when_wiki_present(self):
        textbook = build_index([Paragraph("l", 0, zh.FAMILY_EVIDENCE)], "textbook")
        wiki = build_index([Paragraph("wiki:w", 0, "家庭是社會的基本單位。")], "wiki")
        evidence = retrieve_evidence(self._question(), textbook, wiki, mode="retrieved")
        assert evidence == zh.FAMILY_EVIDENCE + " [SEP] " + "家庭是社會的基本單位。"

    def test_retrieved_no_match_is_empty(self):
        index = build_index([Paragraph("l", 0, "bbbb")], "textbook")
        question = self._question(options=("甲乙", "丙丁"), gold_index=0, text="問題？")
        assert retrieve_evidence(question, index, None, mode="retrieved") == ""


class TestPersistence:
    def test_round_trip_preserves_queries(self, tmp_path):
        paragraphs = fixture_paragraphs()
        index = build_index(paragraphs, "textbook")
        path = tmp_path / "index.json"
        save_index(index, path)
        loaded = load_index(path)
        assert loaded == index
        query = paragraphs[5].text[:4]
        assert retrieve_top_k(loaded, query, 5) == retrieve_top_k(index, query, 5)

    def test_save_is_deterministic(self, tmp_path):
        index = build_index(fixture_paragraphs(), "textbook")
        save_index(index, tmp_path / "a.json")
        save_index(index, tmp_path / "b.json")
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()

    def test_version_check(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"format": "mcqa-index", "version": 999}', encoding="utf-8")
        with pytest.raises(IndexFormatError, match="version"):
            load_index(path)
        path.write_text('{"something": "else"}', encoding="utf-8")
        with pytest.raises(IndexFormatError, match="not a persisted index"):
            load_index(path)
