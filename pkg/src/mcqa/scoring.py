"""Candidate scoring: a deterministic lexical scorer and a remote-service client.

Both scorers return one normalized score per candidate. The lexical scorer
needs no model or network and makes the whole pipeline runnable and
testable on its own; the remote client speaks the ``POST /score`` JSON
protocol of a model-backed scorer service.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import requests

from .errors import McqaError
from .retrieval import tokenize

SOFTMAX_SHARPNESS = 10.0
REMOTE_SUM_TOLERANCE = 1e-3

SCORER_KINDS = ("lexical", "remote")


class ScoringError(McqaError):
    """Base class for scorer failures."""


class TransportError(ScoringError):
    """The remote service could not be reached within the retry budget."""


class ProtocolError(ScoringError):
    """The remote service answered, but not with a valid score vector."""


@dataclass(frozen=True)
class ScoreVector:
    """One real score per candidate, in candidate order."""

    scores: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "scores", tuple(float(s) for s in self.scores))
        if not self.scores:
            raise ValueError("score vector must not be empty")
        for s in self.scores:
            if not math.isfinite(s):
                raise ValueError(f"score vector contains non-finite value {s!r}")

    def __len__(self) -> int:
        return len(self.scores)

    def __getitem__(self, i: int) -> float:
        return self.scores[i]

    def __iter__(self):
        return iter(self.scores)

    def as_list(self) -> list[float]:
        return list(self.scores)


@dataclass(frozen=True)
class ScorerConfig:
    kind: str = "lexical"
    endpoint: str | None = None
    timeout: float = 10.0
    max_retries: int = 2

    def __post_init__(self) -> None:
        if self.kind not in SCORER_KINDS:
            raise ValueError(f"scorer kind must be one of {SCORER_KINDS}, got {self.kind!r}")
        if self.kind == "remote" and not self.endpoint:
            raise ValueError("remote scorer requires an endpoint URL")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if self.max_retries < 0:
            raise ValueError("max_retries must be non-negative")


def _dice(a: Counter, b: Counter) -> float:
    total = a.total() + b.total()
    if a.total() == 0 or b.total() == 0:
        return 0.0
    intersection = sum(min(count, b[token]) for token, count in a.items())
    return 2.0 * intersection / total


def _softmax(raw: Sequence[float], sharpness: float = SOFTMAX_SHARPNESS) -> list[float]:
    scaled = [r * sharpness for r in raw]
    peak = max(scaled)
    exps = [math.exp(v - peak) for v in scaled]
    norm = sum(exps)
    return [e / norm for e in exps]


def lexical_score(evidence: str, question: str, candidates: Sequence[str]) -> ScoreVector:
    """Score candidates by token overlap with the evidence.

    The raw score of candidate i is the Dice coefficient between the token
    multisets of ``question + candidates[i]`` and of the evidence:
    2*|intersection| / (|a| + |b|) with multiset counts, 0 when either side
    is empty. Raw scores pass through a sharpened softmax (factor 10) to
    yield a probability-shaped vector; the sharpening never changes which
    candidate ranks first or last.
    """
    if not candidates:
        raise ValueError("candidates must be non-empty")
    evidence_tokens = Counter(tokenize(evidence))
    raw = [_dice(Counter(tokenize(question + candidate)), evidence_tokens)
           for candidate in candidates]
    return ScoreVector(tuple(_softmax(raw)))


def remote_score(config: ScorerConfig, evidence: str, question: str,
                 candidates: Sequence[str], *, question_id: str | None = None) -> ScoreVector:
    """Fetch scores from the remote service and validate them.

    The request body carries the three raw fields; any model-specific input
    assembly is the service's business. The response must contain exactly
    one finite score per candidate, summing to 1 within 1e-3; vectors
    inside that tolerance are renormalized to sum exactly to 1.
    """
    if config.kind != "remote":
        raise ValueError("remote_score requires a remote scorer config")
    if not candidates:
        raise ValueError("candidates must be non-empty")
    context = f" (question {question_id!r})" if question_id is not None else ""
    url = config.endpoint.rstrip("/") + "/score"
    payload = {"evidence": evidence, "question": question, "candidates": list(candidates)}

    response = None
    last_failure: Exception | None = None
    for _attempt in range(config.max_retries + 1):
        try:
            response = requests.post(url, json=payload, timeout=config.timeout)
            break
        except (requests.ConnectionError, requests.Timeout) as exc:
            last_failure = exc
    if response is None:
        raise TransportError(
            f"scorer service unreachable at {url} after {config.max_retries + 1} "
            f"attempt(s){context}: {last_failure}") from last_failure

    if response.status_code != 200:
        detail = ""
        try:
            detail = response.json().get("error", "")
        except ValueError:
            pass
        raise ProtocolError(
            f"scorer service returned HTTP {response.status_code}{context}: {detail or response.text[:200]}")
    try:
        body = response.json()
    except ValueError as exc:
        raise ProtocolError(f"scorer service sent non-JSON body{context}") from exc
    scores = body.get("scores") if isinstance(body, dict) else None
    if not isinstance(scores, list):
        raise ProtocolError(f"scorer service response lacks a 'scores' list{context}")
    if len(scores) != len(candidates):
        raise ProtocolError(
            f"scorer service returned {len(scores)} scores for "
            f"{len(candidates)} candidates{context}")
    values = []
    for s in scores:
        if isinstance(s, bool) or not isinstance(s, (int, float)) or not math.isfinite(s):
            raise ProtocolError(f"scorer service returned non-finite score {s!r}{context}")
        values.append(float(s))
    total = sum(values)
    if abs(total - 1.0) > REMOTE_SUM_TOLERANCE:
        raise ProtocolError(
            f"scorer service scores sum to {total!r}, outside the "
            f"{REMOTE_SUM_TOLERANCE} normalization tolerance{context}")
    return ScoreVector(tuple(v / total for v in values))


def score(config: ScorerConfig, evidence: str, question: str,
          candidates: Sequence[str], *, question_id: str | None = None) -> ScoreVector:
    """Dispatch to the configured scorer."""
    if config.kind == "lexical":
        return lexical_score(evidence, question, candidates)
    return remote_score(config, evidence, question, candidates, question_id=question_id)
