"""CJK-aware tokenization, an immutable inverted index, and BM25 retrieval.

The index is the search-engine stand-in for evidence retrieval: build it
once over textbook (or encyclopedia) paragraphs, then rank paragraphs for
a query with BM25 and fuse the per-source best hits into one evidence
string.
"""

from __future__ import annotations

import json
import math
from bisect import bisect_left
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import Paragraph, Question
from .errors import McqaError

K1 = 1.2
B = 0.75

SOURCE_TAGS = ("textbook", "wiki")

EVIDENCE_SEPARATOR = " [SEP] "

INDEX_FORMAT = "mcqa-index"
INDEX_VERSION = 1

# Han ideograph blocks treated as CJK for unigram+bigram emission.
_CJK_BLOCKS = (
    (0x4E00, 0x9FFF),    # unified ideographs
    (0x3400, 0x4DBF),    # extension A
    (0xF900, 0xFAFF),    # compatibility ideographs
    (0x20000, 0x2EBEF),  # extensions B..F
)


class IndexBuildError(McqaError):
    """The paragraph collection cannot form a valid index."""


class IndexFormatError(McqaError):
    """A persisted index file has the wrong format or version."""


class EvidenceError(McqaError):
    """Evidence was requested in a mode the question cannot satisfy."""


def _is_cjk(ch: str) -> bool:
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in _CJK_BLOCKS)


def tokenize(text: str) -> list[str]:
    """Split *text* into CJK unigrams, CJK bigrams, and ASCII-alphanumeric runs.

    Every CJK codepoint yields a unigram; every pair of directly adjacent
    CJK codepoints additionally yields a bigram; each maximal run of ASCII
    letters/digits yields one lowercased token. Anything else (punctuation,
    whitespace, non-ASCII non-CJK symbols) emits nothing and breaks CJK
    adjacency. Emission order follows the text, with each bigram right
    after its second character and each ASCII run at the point it ends.
    """
    tokens: list[str] = []
    ascii_run: list[str] = []
    prev_cjk: str | None = None
    for ch in text:
        if ch.isascii() and ch.isalnum():
            ascii_run.append(ch)
            prev_cjk = None
            continue
        if ascii_run:
            tokens.append("".join(ascii_run).lower())
            ascii_run.clear()
        if _is_cjk(ch):
            tokens.append(ch)
            if prev_cjk is not None:
                tokens.append(prev_cjk + ch)
            prev_cjk = ch
        else:
            prev_cjk = None
    if ascii_run:
        tokens.append("".join(ascii_run).lower())
    return tokens


@dataclass(frozen=True)
class InvertedIndex:
    """Immutable token -> postings map over paragraphs, with BM25 statistics.

    Postings lists are sorted by paragraph id. Instances are only built by
    :func:`build_index` or :func:`load_index` and must not be mutated.
    """

    postings: dict[str, tuple[tuple[str, int], ...]]
    doc_lengths: dict[str, int]
    doc_count: int
    avg_doc_length: float
    source_tag: str
    texts: dict[str, str]


@dataclass(frozen=True)
class RetrievalResult:
    paragraph_id: str
    score: float
    text: str


def paragraph_id(paragraph: Paragraph) -> str:
    return f"{paragraph.lesson_id}:{paragraph.index}"


def build_index(paragraphs: Iterable[Paragraph], source_tag: str) -> InvertedIndex:
    """Index *paragraphs* for BM25 retrieval; ids must be unique."""
    if source_tag not in SOURCE_TAGS:
        raise ValueError(f"source_tag must be one of {SOURCE_TAGS}, got {source_tag!r}")
    raw_postings: dict[str, list[tuple[str, int]]] = {}
    doc_lengths: dict[str, int] = {}
    texts: dict[str, str] = {}
    for paragraph in paragraphs:
        pid = paragraph_id(paragraph)
        if pid in doc_lengths:
            raise IndexBuildError(f"duplicate paragraph id {pid!r}")
        tokens = tokenize(paragraph.text)
        doc_lengths[pid] = len(tokens)
        texts[pid] = paragraph.text
        for token, tf in Counter(tokens).items():
            raw_postings.setdefault(token, []).append((pid, tf))
    if not doc_lengths:
        raise IndexBuildError("cannot build an index over zero paragraphs")
    postings = {token: tuple(sorted(entries)) for token, entries in raw_postings.items()}
    doc_count = len(doc_lengths)
    avg_doc_length = sum(doc_lengths.values()) / doc_count
    return InvertedIndex(postings=postings, doc_lengths=doc_lengths,
                         doc_count=doc_count, avg_doc_length=avg_doc_length,
                         source_tag=source_tag, texts=texts)


def _idf(index: InvertedIndex, df: int) -> float:
    return math.log(1.0 + (index.doc_count - df + 0.5) / (df + 0.5))


def _tf_weight(tf: int, doc_length: int, avg_doc_length: float) -> float:
    return tf * (K1 + 1.0) / (tf + K1 * (1.0 - B + B * doc_length / avg_doc_length))


def bm25_score(index: InvertedIndex, query_tokens: Sequence[str], pid: str) -> float:
    """BM25 score of paragraph *pid* for the distinct tokens of the query.

    Each distinct query token t contributes idf(t) * tf'(t, d) where
    idf(t) = ln(1 + (N - df + 0.5) / (df + 0.5)) and
    tf'(t, d) = tf * (k1 + 1) / (tf + k1 * (1 - b + b * len(d) / avg_len)),
    with k1 = 1.2 and b = 0.75. Tokens absent from the index contribute 0.
    """
    if pid not in index.doc_lengths:
        raise KeyError(f"unknown paragraph id {pid!r}")
    doc_length = index.doc_lengths[pid]
    score = 0.0
    for token in set(query_tokens):
        entries = index.postings.get(token)
        if not entries:
            continue
        pos = bisect_left(entries, (pid,))
        if pos == len(entries) or entries[pos][0] != pid:
            continue
        tf = entries[pos][1]
        score += _idf(index, len(entries)) * _tf_weight(tf, doc_length, index.avg_doc_length)
    return score


def retrieve_top_k(index: InvertedIndex, query: str, k: int) -> list[RetrievalResult]:
    """Rank paragraphs for *query* and return the top *k* with positive scores.

    Results are sorted by score descending, then paragraph id ascending.
    Paragraphs sharing no token with the query are excluded.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    accumulated: dict[str, float] = {}
    for token in set(tokenize(query)):
        entries = index.postings.get(token)
        if not entries:
            continue
        idf = _idf(index, len(entries))
        for pid, tf in entries:
            weight = _tf_weight(tf, index.doc_lengths[pid], index.avg_doc_length)
            accumulated[pid] = accumulated.get(pid, 0.0) + idf * weight
    ranked = sorted(((pid, score) for pid, score in accumulated.items() if score > 0.0),
                    key=lambda item: (-item[1], item[0]))
    return [RetrievalResult(paragraph_id=pid, score=score, text=index.texts[pid])
            for pid, score in ranked[:k]]


def fuse_evidence(textbook_se: str | None, wiki_se: str | None) -> str:
    """Join the per-source evidence strings, textbook first.

    Both present: ``textbook + " [SEP] " + wiki``; one present: that text
    alone; both absent (``None`` or empty): the empty string.
    """
    textbook = textbook_se or ""
    wiki = wiki_se or ""
    if textbook and wiki:
        return textbook + EVIDENCE_SEPARATOR + wiki
    return textbook or wiki


def retrieve_evidence(question: Question,
                      textbook_index: InvertedIndex | None = None,
                      wiki_index: InvertedIndex | None = None,
                      mode: str = "retrieved") -> str:
    """Produce the evidence string for *question*.

    ``mode="gold"`` returns the annotated evidence verbatim and requires it
    to exist. ``mode="retrieved"`` queries each available index with the
    question text plus all option texts (space-joined so option boundaries
    never form bigrams) and fuses the per-source top hits.
    """
    if mode == "gold":
        if question.gold_se is None:
            raise EvidenceError(
                f"question {question.id!r} has no gold evidence (se_class {question.se_class})")
        return question.gold_se
    if mode != "retrieved":
        raise ValueError(f"mode must be 'gold' or 'retrieved', got {mode!r}")
    if textbook_index is None:
        raise ValueError("retrieved mode requires a textbook index")
    query = " ".join((question.text, *question.options))
    textbook_hits = retrieve_top_k(textbook_index, query, 1)
    textbook_se = textbook_hits[0].text if textbook_hits else None
    wiki_se = None
    if wiki_index is not None:
        wiki_hits = retrieve_top_k(wiki_index, query, 1)
        wiki_se = wiki_hits[0].text if wiki_hits else None
    return fuse_evidence(textbook_se, wiki_se)


def save_index(index: InvertedIndex, path: Path | str) -> None:
    """Persist the index as versioned JSON; output bytes are deterministic."""
    payload = {
        "format": INDEX_FORMAT,
        "version": INDEX_VERSION,
        "source_tag": index.source_tag,
        "doc_count": index.doc_count,
        "avg_doc_length": index.avg_doc_length,
        "doc_lengths": index.doc_lengths,
        "postings": {token: [[pid, tf] for pid, tf in entries]
                     for token, entries in index.postings.items()},
        "texts": index.texts,
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, ensure_ascii=False, sort_keys=True), encoding="utf-8")


def load_index(path: Path | str) -> InvertedIndex:
    path = Path(path)
    payload = json.loads(path.read_text(encoding="utf-8"))
    if not isinstance(payload, dict) or payload.get("format") != INDEX_FORMAT:
        raise IndexFormatError(f"{path}: not a persisted index file")
    if payload.get("version") != INDEX_VERSION:
        raise IndexFormatError(
            f"{path}: unsupported index version {payload.get('version')!r}")
    postings = {token: tuple((pid, tf) for pid, tf in entries)
                for token, entries in payload["postings"].items()}
    return InvertedIndex(postings=postings,
                         doc_lengths=payload["doc_lengths"],
                         doc_count=payload["doc_count"],
                         avg_doc_length=payload["avg_doc_length"],
                         source_tag=payload["source_tag"],
                         texts=payload["texts"])
