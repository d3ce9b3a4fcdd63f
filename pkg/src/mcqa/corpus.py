"""Data model, JSONL ingestion, and synthetic corpus generation.

A dataset bundle is a directory holding two UTF-8 JSONL files (no BOM):

* ``lessons.jsonl``   -- one object per paragraph:
  ``{"lesson_id": str, "title": str, "index": int, "text": str}``
* ``questions.jsonl`` -- one object per question:
  ``{"id": str, "text": str, "options": [str], "gold_index": int,
  "gold_se": str|null, "se_class": "SE1"|"SE2", "split": "train"|"dev"|"test"}``

An optional ``wiki.jsonl`` carries pre-extracted encyclopedia paragraphs in
the lessons schema, with every lesson id prefixed ``wiki:``.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import McqaError

SPLITS = ("train", "dev", "test")
SE_CLASSES = ("SE1", "SE2")

LESSONS_FILE = "lessons.jsonl"
QUESTIONS_FILE = "questions.jsonl"
WIKI_FILE = "wiki.jsonl"

WIKI_PREFIX = "wiki:"


class ParseError(McqaError):
    """A JSONL line could not be decoded or lacks a required field."""


class ValidationError(McqaError):
    """A record violates a data-model invariant."""


def _fail(kind: str, record_id: str, field_name: str, problem: str) -> None:
    raise ValidationError(f"{kind} {record_id!r}: field {field_name!r} {problem}")


@dataclass(frozen=True)
class Paragraph:
    """One retrieval unit: a single paragraph of a lesson."""

    lesson_id: str
    index: int
    text: str

    def __post_init__(self) -> None:
        rid = f"{self.lesson_id}:{self.index}"
        if not self.lesson_id:
            _fail("paragraph", rid, "lesson_id", "must be non-empty")
        if self.index < 0:
            _fail("paragraph", rid, "index", "must be non-negative")
        if not self.text.strip():
            _fail("paragraph", rid, "text", "must be non-empty after trimming")


@dataclass(frozen=True)
class Lesson:
    id: str
    title: str
    paragraphs: tuple[Paragraph, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "paragraphs", tuple(self.paragraphs))
        if not self.id:
            _fail("lesson", self.id, "id", "must be non-empty")
        if not self.paragraphs:
            _fail("lesson", self.id, "paragraphs", "must be non-empty")
        last = -1
        for p in self.paragraphs:
            if p.lesson_id != self.id:
                _fail("lesson", self.id, "paragraphs",
                      f"contains paragraph owned by {p.lesson_id!r}")
            if p.index <= last:
                _fail("lesson", self.id, "paragraphs",
                      f"indexes must be strictly increasing (saw {p.index} after {last})")
            last = p.index


@dataclass(frozen=True)
class Question:
    """A multiple-choice question with 2..8 candidate options."""

    id: str
    text: str
    options: tuple[str, ...]
    gold_index: int
    gold_se: str | None
    se_class: str
    split: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "options", tuple(self.options))
        if not self.id:
            _fail("question", self.id, "id", "must be non-empty")
        n = len(self.options)
        if not 2 <= n <= 8:
            _fail("question", self.id, "options", f"must hold 2..8 entries, got {n}")
        if len(set(self.options)) != n:
            _fail("question", self.id, "options", "must be pairwise distinct")
        if not 0 <= self.gold_index < n:
            _fail("question", self.id, "gold_index",
                  f"out of range: {self.gold_index} for {n} options")
        if self.se_class not in SE_CLASSES:
            _fail("question", self.id, "se_class", f"must be one of {SE_CLASSES}")
        if self.se_class == "SE1" and self.gold_se is None:
            _fail("question", self.id, "gold_se", "must be present when se_class is SE1")
        if self.se_class == "SE2" and self.gold_se is not None:
            _fail("question", self.id, "gold_se", "must be absent when se_class is SE2")
        if self.split not in SPLITS:
            _fail("question", self.id, "split", f"must be one of {SPLITS}")


@dataclass(frozen=True)
class Dataset:
    lessons: tuple[Lesson, ...]
    questions: tuple[Question, ...]
    source_paths: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "lessons", tuple(self.lessons))
        object.__setattr__(self, "questions", tuple(self.questions))
        object.__setattr__(self, "source_paths", tuple(self.source_paths))
        seen_lessons: set[str] = set()
        for lesson in self.lessons:
            if lesson.id in seen_lessons:
                _fail("dataset", lesson.id, "lessons", "duplicate lesson id")
            seen_lessons.add(lesson.id)
        seen_questions: set[str] = set()
        for q in self.questions:
            if q.id in seen_questions:
                _fail("dataset", q.id, "questions", "duplicate question id")
            seen_questions.add(q.id)

    def paragraphs(self) -> list[Paragraph]:
        return [p for lesson in self.lessons for p in lesson.paragraphs]


def _iter_jsonl(path: Path) -> Iterable[tuple[int, dict]]:
    with path.open("r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"{path}:{lineno}: invalid JSON: {exc.msg}") from exc
            if not isinstance(record, dict):
                raise ParseError(f"{path}:{lineno}: expected a JSON object")
            yield lineno, record


def _field(record: dict, name: str, path: Path, lineno: int):
    if name not in record:
        raise ParseError(f"{path}:{lineno}: record missing field {name!r}")
    return record[name]


def read_lessons_file(path: Path | str) -> tuple[Lesson, ...]:
    """Read a lessons-schema JSONL file (also used for ``wiki.jsonl``)."""
    path = Path(path)
    rows: list[tuple[int, str, str, int, str]] = []
    for lineno, record in _iter_jsonl(path):
        lesson_id = _field(record, "lesson_id", path, lineno)
        title = _field(record, "title", path, lineno)
        index = _field(record, "index", path, lineno)
        text = _field(record, "text", path, lineno)
        if not isinstance(index, int) or isinstance(index, bool):
            raise ParseError(f"{path}:{lineno}: field 'index' must be an integer")
        rows.append((lineno, str(lesson_id), str(title), index, str(text)))

    order: list[str] = []
    titles: dict[str, str] = {}
    grouped: dict[str, list[tuple[int, str]]] = {}
    for lineno, lesson_id, title, index, text in rows:
        if lesson_id not in grouped:
            order.append(lesson_id)
            grouped[lesson_id] = []
            titles[lesson_id] = title
        elif titles[lesson_id] != title:
            raise ValidationError(
                f"{path}:{lineno}: lesson {lesson_id!r}: field 'title' differs between rows")
        grouped[lesson_id].append((index, text))

    lessons = []
    for lesson_id in order:
        paragraphs = tuple(
            Paragraph(lesson_id=lesson_id, index=index, text=text)
            for index, text in sorted(grouped[lesson_id]))
        try:
            lessons.append(Lesson(id=lesson_id, title=titles[lesson_id], paragraphs=paragraphs))
        except ValidationError as exc:
            raise ValidationError(f"{path}: {exc}") from exc
    return tuple(lessons)


def read_questions_file(path: Path | str) -> tuple[Question, ...]:
    path = Path(path)
    questions = []
    for lineno, record in _iter_jsonl(path):
        options = _field(record, "options", path, lineno)
        if not isinstance(options, list):
            raise ParseError(f"{path}:{lineno}: field 'options' must be a list")
        try:
            questions.append(Question(
                id=str(_field(record, "id", path, lineno)),
                text=str(_field(record, "text", path, lineno)),
                options=tuple(str(opt) for opt in options),
                gold_index=_field(record, "gold_index", path, lineno),
                gold_se=_field(record, "gold_se", path, lineno),
                se_class=str(_field(record, "se_class", path, lineno)),
                split=str(_field(record, "split", path, lineno)),
            ))
        except ValidationError as exc:
            raise ValidationError(f"{path}:{lineno}: {exc}") from exc
    return tuple(questions)


def load_dataset(path: Path | str) -> Dataset:
    """Load and validate the ``lessons.jsonl`` + ``questions.jsonl`` bundle at *path*."""
    root = Path(path)
    lessons_path = root / LESSONS_FILE
    questions_path = root / QUESTIONS_FILE
    lessons = read_lessons_file(lessons_path)
    questions = read_questions_file(questions_path)
    return Dataset(lessons=lessons, questions=questions,
                   source_paths=(str(lessons_path), str(questions_path)))


def load_wiki_lessons(path: Path | str) -> tuple[Lesson, ...]:
    """Load ``wiki.jsonl``; every lesson id must carry the ``wiki:`` prefix."""
    lessons = read_lessons_file(path)
    for lesson in lessons:
        if not lesson.id.startswith(WIKI_PREFIX):
            _fail("lesson", lesson.id, "lesson_id", f"must start with {WIKI_PREFIX!r}")
    return lessons


def save_dataset(dataset: Dataset, path: Path | str) -> None:
    """Write the bundle files for *dataset* under directory *path*.

    Output is deterministic: loading the written bundle reproduces the
    dataset exactly (source paths aside).
    """
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    with (root / LESSONS_FILE).open("w", encoding="utf-8") as handle:
        for lesson in dataset.lessons:
            for p in lesson.paragraphs:
                handle.write(json.dumps(
                    {"lesson_id": lesson.id, "title": lesson.title,
                     "index": p.index, "text": p.text},
                    ensure_ascii=False) + "\n")
    with (root / QUESTIONS_FILE).open("w", encoding="utf-8") as handle:
        for q in dataset.questions:
            handle.write(json.dumps(
                {"id": q.id, "text": q.text, "options": list(q.options),
                 "gold_index": q.gold_index, "gold_se": q.gold_se,
                 "se_class": q.se_class, "split": q.split},
                ensure_ascii=False) + "\n")


def save_wiki_lessons(lessons: Sequence[Lesson], path: Path | str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as handle:
        for lesson in lessons:
            for p in lesson.paragraphs:
                handle.write(json.dumps(
                    {"lesson_id": lesson.id, "title": lesson.title,
                     "index": p.index, "text": p.text},
                    ensure_ascii=False) + "\n")


# --------------------------------------------------------------------------
# Statistics


@dataclass(frozen=True)
class SplitCounts:
    questions: int
    negation: int
    catchall: int


@dataclass(frozen=True)
class DatasetStats:
    """Per-split question counts plus the global lesson count.

    Lessons carry no split assignment in this data model, so the lesson
    count is reported once for the whole dataset.
    """

    lessons: int
    by_split: dict[str, SplitCounts]

    @property
    def total_questions(self) -> int:
        return sum(c.questions for c in self.by_split.values())


def dataset_stats(dataset: Dataset, lexicon=None, catchall=None) -> DatasetStats:
    """Count questions, negation-type questions, and catchall-type questions per split."""
    # local import: corpus and analysis would otherwise cycle at module load
    from .analysis import DEFAULT_CATCHALL, DEFAULT_LEXICON, NEGATION, classify_question, detect_catchall

    lexicon = lexicon or DEFAULT_LEXICON
    catchall = catchall or DEFAULT_CATCHALL
    counts = {split: [0, 0, 0] for split in SPLITS}
    for q in dataset.questions:
        bucket = counts[q.split]
        bucket[0] += 1
        if classify_question(q.text, lexicon) == NEGATION:
            bucket[1] += 1
        if detect_catchall(q.options, catchall):
            bucket[2] += 1
    return DatasetStats(
        lessons=len(dataset.lessons),
        by_split={split: SplitCounts(*counts[split]) for split in SPLITS},
    )


# --------------------------------------------------------------------------
# Synthetic corpus generation

_CJK_RANGE = (0x4E00, 0x9FFF)

OPTION_LENGTH = 4
QUESTION_LENGTH = 8


def _reserved_characters() -> frozenset[str]:
    # local import: corpus and analysis would otherwise cycle at module load
    from .analysis import DEFAULT_ALL_PHRASES, DEFAULT_NEGATION_PHRASES, DEFAULT_NONE_PHRASES

    chars: set[str] = set()
    for phrase in (*DEFAULT_NEGATION_PHRASES, *DEFAULT_ALL_PHRASES, *DEFAULT_NONE_PHRASES):
        chars.update(phrase)
    return frozenset(chars)


class _CharSupply:
    """Deals out distinct CJK characters so no two drawings ever collide.

    Characters used by the negation lexicon and the catchall phrases are
    excluded up front, which keeps generated text free of accidental
    phrase matches.
    """

    def __init__(self, rng: random.Random):
        reserved = _reserved_characters()
        lo, hi = _CJK_RANGE
        pool = [chr(cp) for cp in range(lo, hi + 1) if chr(cp) not in reserved]
        rng.shuffle(pool)
        self._pool = pool
        self._cursor = 0

    def draw(self, count: int) -> str:
        end = self._cursor + count
        if end > len(self._pool):
            raise ValueError(
                "synthetic generator exhausted its distinct-character pool; "
                "request fewer questions")
        chunk = self._pool[self._cursor:end]
        self._cursor = end
        return "".join(chunk)


def gen_synthetic(*, regular: int = 0, negation: int = 0,
                  all_of_the_above: int = 0, none_of_the_above: int = 0,
                  seed: int = 0, split: str = "test",
                  paragraphs_per_lesson: int = 10) -> Dataset:
    """Generate a deterministic synthetic dataset of four question archetypes.

    Every question draws from its own disjoint character alphabet, so token
    overlap happens only where the archetype plants it:

    * regular: the gold option occurs verbatim in the evidence, distractors
      share nothing with it.
    * negation: the question embeds a negation phrase; the three distractors
      occur verbatim in the evidence and the gold option shares nothing.
    * all-of-the-above: the last option is the all-of-the-above phrase and
      the evidence contains the other three options verbatim.
    * none-of-the-above: the last option is the none-of-the-above phrase;
      the evidence holds only a two-character fragment of each other option,
      so the concatenation rewrite overlaps the evidence more than any
      single option does, while no full option text occurs.

    Each evidence string is also planted as a textbook paragraph, making it
    the unique best retrieval hit for its own question.
    """
    for name, value in (("regular", regular), ("negation", negation),
                        ("all_of_the_above", all_of_the_above),
                        ("none_of_the_above", none_of_the_above)):
        if value < 0:
            raise ValueError(f"count {name!r} must be non-negative, got {value}")
    if split not in SPLITS:
        raise ValueError(f"split must be one of {SPLITS}, got {split!r}")

    # local import: corpus and analysis would otherwise cycle at module load
    from .analysis import DEFAULT_ALL_PHRASES, DEFAULT_NEGATION_PHRASES, DEFAULT_NONE_PHRASES

    rng = random.Random(seed)
    supply = _CharSupply(rng)
    questions: list[Question] = []
    evidence_texts: list[str] = []

    def add_question(kind: str, number: int, text: str,
                     options: Sequence[str], gold_index: int, evidence: str) -> None:
        questions.append(Question(
            id=f"syn-{kind}-{number:04d}", text=text, options=tuple(options),
            gold_index=gold_index, gold_se=evidence, se_class="SE1", split=split))
        evidence_texts.append(evidence)

    for i in range(regular):
        options = [supply.draw(OPTION_LENGTH) for _ in range(4)]
        gold = rng.randrange(4)
        text = supply.draw(QUESTION_LENGTH) + "？"
        filler = supply.draw(4)
        evidence = filler[:2] + options[gold] + filler[2:]
        add_question("regular", i, text, options, gold, evidence)

    for i in range(negation):
        options = [supply.draw(OPTION_LENGTH) for _ in range(4)]
        gold = rng.randrange(4)
        phrase = DEFAULT_NEGATION_PHRASES[i % len(DEFAULT_NEGATION_PHRASES)]
        stem = supply.draw(QUESTION_LENGTH)
        text = stem[:4] + phrase + stem[4:] + "？"
        evidence = "".join(opt for j, opt in enumerate(options) if j != gold)
        add_question("negation", i, text, options, gold, evidence)

    for i in range(all_of_the_above):
        others = [supply.draw(OPTION_LENGTH) for _ in range(3)]
        options = [*others, DEFAULT_ALL_PHRASES[0]]
        text = supply.draw(QUESTION_LENGTH) + "？"
        evidence = "".join(others)
        add_question("allabove", i, text, options, 3, evidence)

    for i in range(none_of_the_above):
        others = [supply.draw(OPTION_LENGTH) for _ in range(3)]
        options = [*others, DEFAULT_NONE_PHRASES[0]]
        text = supply.draw(QUESTION_LENGTH) + "？"
        evidence = "".join(opt[:2] for opt in others)
        add_question("noneabove", i, text, options, 3, evidence)

    lessons = []
    for li in range(0, len(evidence_texts), paragraphs_per_lesson):
        chunk = evidence_texts[li:li + paragraphs_per_lesson]
        lesson_id = f"syn-les-{li // paragraphs_per_lesson:04d}"
        paragraphs = tuple(
            Paragraph(lesson_id=lesson_id, index=pi, text=text)
            for pi, text in enumerate(chunk))
        lessons.append(Lesson(id=lesson_id, title=f"synthetic lesson {li // paragraphs_per_lesson}",
                              paragraphs=paragraphs))

    return Dataset(lessons=tuple(lessons), questions=tuple(questions),
                   source_paths=(f"synthetic:seed={seed}",))
