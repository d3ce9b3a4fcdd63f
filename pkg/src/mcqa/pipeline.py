"""Answer selection and the ablation evaluation harness.

The cascade per question is: preprocess options, score the (possibly
rewritten) candidates against the evidence, then select — highest score
for regular questions, lowest for negation questions. The harness runs
that cascade over a dataset split under any of the four ablation modes
and three evidence scenarios, and reports overall and per-subset accuracy.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

from .analysis import (
    DEFAULT_CATCHALL,
    DEFAULT_LEXICON,
    NEGATION,
    CatchallConfig,
    NegationLexicon,
    QuestionAnalysis,
    analyze,
    classify_question,
    detect_catchall,
)
from .corpus import Dataset, Question, SPLITS
from .errors import McqaError
from .retrieval import InvertedIndex, retrieve_evidence
from .scoring import ScorerConfig, ScoreVector, score

SCENARIOS = ("gold", "retrieved_textbook_only", "retrieved_fused")

SUBSET_ALL = "all"
SUBSET_NEGATION = "negation_only"
SUBSET_CATCHALL = "catchall_only"
SUBSET_NAMES = (SUBSET_ALL, SUBSET_NEGATION, SUBSET_CATCHALL)


class EvaluationError(McqaError):
    """The evaluation request selected no questions or is inconsistent."""


@dataclass(frozen=True)
class AblationMode:
    """Which of the two fixes are active."""

    neg_enabled: bool
    catchall_enabled: bool

    @property
    def label(self) -> str:
        if self.neg_enabled and self.catchall_enabled:
            return "+Neg+AllAbv&NonAbv"
        if self.neg_enabled:
            return "+Neg"
        if self.catchall_enabled:
            return "+AllAbv&NonAbv"
        return "Base"


MODE_BASE = AblationMode(neg_enabled=False, catchall_enabled=False)
MODE_NEG = AblationMode(neg_enabled=True, catchall_enabled=False)
MODE_CATCHALL = AblationMode(neg_enabled=False, catchall_enabled=True)
MODE_BOTH = AblationMode(neg_enabled=True, catchall_enabled=True)
ALL_MODES = (MODE_BASE, MODE_NEG, MODE_CATCHALL, MODE_BOTH)


@dataclass(frozen=True)
class Prediction:
    question_id: str
    chosen_index: int
    qtype: str
    evidence: str
    scores: ScoreVector


@dataclass(frozen=True)
class SubsetResult:
    correct: int
    total: int

    @property
    def accuracy(self) -> float | None:
        if self.total == 0:
            return None
        return self.correct / self.total


@dataclass(frozen=True)
class QuestionOutcome:
    prediction: Prediction
    gold_index: int
    in_negation_subset: bool
    in_catchall_subset: bool

    @property
    def correct(self) -> bool:
        return self.prediction.chosen_index == self.gold_index


@dataclass(frozen=True)
class EvalReport:
    mode: AblationMode
    scenario: str
    overall: SubsetResult
    subsets: dict[str, SubsetResult]
    outcomes: tuple[QuestionOutcome, ...]


def select_answer(scores: ScoreVector | Sequence[float], qtype: str) -> int:
    """Pick the candidate index: argmax for regular, argmin for negation.

    Ties break toward the lowest index in both directions.
    """
    values = list(scores)
    if not values:
        raise ValueError("cannot select from an empty score vector")
    indices = range(len(values))
    if qtype == NEGATION:
        return min(indices, key=values.__getitem__)
    return max(indices, key=values.__getitem__)


def answer_question(question: Question, analysis: QuestionAnalysis,
                    evidence: str, scorer_config: ScorerConfig) -> Prediction:
    """Score the rewritten options against the evidence and select."""
    vector = score(scorer_config, evidence, question.text,
                   list(analysis.rewritten_options), question_id=question.id)
    chosen = select_answer(vector, analysis.qtype)
    return Prediction(question_id=question.id, chosen_index=chosen,
                      qtype=analysis.qtype, evidence=evidence, scores=vector)


def _pmap(fn: Callable, items: Sequence, jobs: int) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as executor:
        return list(executor.map(fn, items))


def _select_questions(dataset: Dataset, split: str, scenario: str) -> list[Question]:
    if split not in SPLITS:
        raise ValueError(f"split must be one of {SPLITS}, got {split!r}")
    if scenario not in SCENARIOS:
        raise ValueError(f"scenario must be one of {SCENARIOS}, got {scenario!r}")
    questions = [q for q in dataset.questions if q.split == split]
    if scenario == "gold":
        questions = [q for q in questions if q.se_class == "SE1"]
    if not questions:
        detail = " restricted to SE1 questions" if scenario == "gold" else ""
        raise EvaluationError(
            f"no questions selected for split {split!r}, scenario {scenario!r}{detail}")
    return questions


def _gather_evidence(questions: Sequence[Question], scenario: str,
                     textbook_index: InvertedIndex | None,
                     wiki_index: InvertedIndex | None, jobs: int) -> dict[str, str]:
    if scenario == "gold":
        return {q.id: q.gold_se for q in questions}
    if textbook_index is None:
        raise ValueError(f"scenario {scenario!r} requires a textbook index")
    if scenario == "retrieved_fused" and wiki_index is None:
        raise ValueError("scenario 'retrieved_fused' requires a wiki index")
    wiki = wiki_index if scenario == "retrieved_fused" else None

    def fetch(question: Question) -> str:
        return retrieve_evidence(question, textbook_index, wiki, mode="retrieved")

    texts = _pmap(fetch, questions, jobs)
    return {q.id: text for q, text in zip(questions, texts)}


def _evaluate_prepared(questions: Sequence[Question], evidence: dict[str, str],
                       mode: AblationMode, scenario: str, scorer_config: ScorerConfig,
                       lexicon: NegationLexicon, catchall: CatchallConfig,
                       jobs: int) -> EvalReport:
    def solve(question: Question) -> QuestionOutcome:
        q_analysis = analyze(question, lexicon, catchall,
                             neg_enabled=mode.neg_enabled,
                             catchall_enabled=mode.catchall_enabled)
        prediction = answer_question(question, q_analysis, evidence[question.id], scorer_config)
        # subset membership always uses the full detectors so the four
        # ablation columns stay comparable
        return QuestionOutcome(
            prediction=prediction,
            gold_index=question.gold_index,
            in_negation_subset=classify_question(question.text, lexicon) == NEGATION,
            in_catchall_subset=bool(detect_catchall(question.options, catchall)),
        )

    outcomes = tuple(_pmap(solve, questions, jobs))
    overall = _tally(outcomes, lambda outcome: True)
    subsets = {
        SUBSET_ALL: overall,
        SUBSET_NEGATION: _tally(outcomes, lambda o: o.in_negation_subset),
        SUBSET_CATCHALL: _tally(outcomes, lambda o: o.in_catchall_subset),
    }
    return EvalReport(mode=mode, scenario=scenario, overall=overall,
                      subsets=subsets, outcomes=outcomes)


def _tally(outcomes: Sequence[QuestionOutcome],
           member: Callable[[QuestionOutcome], bool]) -> SubsetResult:
    selected = [o for o in outcomes if member(o)]
    return SubsetResult(correct=sum(o.correct for o in selected), total=len(selected))


def evaluate(dataset: Dataset, split: str, mode: AblationMode, scenario: str,
             scorer_config: ScorerConfig, *,
             textbook_index: InvertedIndex | None = None,
             wiki_index: InvertedIndex | None = None,
             lexicon: NegationLexicon = DEFAULT_LEXICON,
             catchall: CatchallConfig = DEFAULT_CATCHALL,
             jobs: int = 1) -> EvalReport:
    """Run the full cascade over one split under one mode and scenario.

    ``scenario="gold"`` evaluates only questions with annotated evidence;
    the retrieved scenarios evaluate every question of the split using the
    search index (textbook alone, or textbook fused with wiki). Subset
    accuracies are reported for negation-type and catchall-type questions,
    with membership decided by the full detectors regardless of the mode's
    toggles.
    """
    questions = _select_questions(dataset, split, scenario)
    evidence = _gather_evidence(questions, scenario, textbook_index, wiki_index, jobs)
    return _evaluate_prepared(questions, evidence, mode, scenario, scorer_config,
                              lexicon, catchall, jobs)


def compare_modes(dataset: Dataset, split: str, scenario: str,
                  scorer_config: ScorerConfig, *,
                  textbook_index: InvertedIndex | None = None,
                  wiki_index: InvertedIndex | None = None,
                  lexicon: NegationLexicon = DEFAULT_LEXICON,
                  catchall: CatchallConfig = DEFAULT_CATCHALL,
                  jobs: int = 1) -> tuple[EvalReport, ...]:
    """Evaluate all four ablation modes with evidence retrieved once per question."""
    questions = _select_questions(dataset, split, scenario)
    evidence = _gather_evidence(questions, scenario, textbook_index, wiki_index, jobs)
    return tuple(
        _evaluate_prepared(questions, evidence, mode, scenario, scorer_config,
                           lexicon, catchall, jobs)
        for mode in ALL_MODES)


# --------------------------------------------------------------------------
# Report serialization


def _subset_dict(result: SubsetResult) -> dict:
    return {"correct": result.correct, "total": result.total, "accuracy": result.accuracy}


def report_to_dict(report: EvalReport) -> dict:
    return {
        "mode": {
            "label": report.mode.label,
            "neg_enabled": report.mode.neg_enabled,
            "catchall_enabled": report.mode.catchall_enabled,
        },
        "scenario": report.scenario,
        "overall": _subset_dict(report.overall),
        "subsets": {name: _subset_dict(report.subsets[name]) for name in SUBSET_NAMES},
        "predictions": [
            {"id": o.prediction.question_id, "chosen": o.prediction.chosen_index,
             "gold": o.gold_index, "qtype": o.prediction.qtype}
            for o in report.outcomes
        ],
    }


def report_to_json(report: EvalReport) -> str:
    return json.dumps(report_to_dict(report), ensure_ascii=False, indent=2) + "\n"


def reports_to_json(reports: Sequence[EvalReport]) -> str:
    return json.dumps([report_to_dict(r) for r in reports], ensure_ascii=False, indent=2) + "\n"


def _cell(result: SubsetResult) -> str:
    accuracy = result.accuracy
    shown = f"{accuracy:.4f}" if accuracy is not None else "-"
    return f"{result.correct}/{result.total} {shown}"


def render_table(reports: Sequence[EvalReport]) -> str:
    """Format reports as an aligned plain-text table, one mode per row."""
    headers = ["mode", "overall", "negation_only", "catchall_only"]
    rows = [[report.mode.label,
             _cell(report.overall),
             _cell(report.subsets[SUBSET_NEGATION]),
             _cell(report.subsets[SUBSET_CATCHALL])]
            for report in reports]
    widths = [max(len(headers[col]), *(len(row[col]) for row in rows)) if rows else len(headers[col])
              for col in range(len(headers))]
    lines = ["  ".join(header.ljust(widths[col]) for col, header in enumerate(headers)).rstrip()]
    for row in rows:
        lines.append("  ".join(cell.ljust(widths[col]) for col, cell in enumerate(row)).rstrip())
    return "\n".join(lines) + "\n"
