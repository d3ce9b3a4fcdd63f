"""Question preprocessing: negation detection and catchall-option rewriting.

Phrase lists ship as built-in defaults and can also be loaded from plain
UTF-8 text files, one phrase per line, with ``#``-prefixed comment lines.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Sequence

from .errors import McqaError

if TYPE_CHECKING:
    from .corpus import Question

REGULAR = "regular"
NEGATION = "negation"

ALL_OF_THE_ABOVE = "all_of_the_above"
NONE_OF_THE_ABOVE = "none_of_the_above"

JOINER = "^"

DEFAULT_NEGATION_PHRASES = (
    "不會", "不能", "不得", "不是", "不應該",
    "不可能", "不需", "不必", "不用", "沒有",
)
DEFAULT_ALL_PHRASES = ("以上皆是",)
DEFAULT_NONE_PHRASES = ("以上皆非",)


class RewriteError(McqaError):
    """Catchall rewriting had no non-catchall options left to concatenate."""


def _check_phrases(phrases: Sequence[str], name: str) -> tuple[str, ...]:
    phrases = tuple(phrases)
    if not phrases:
        raise ValueError(f"{name} must not be empty")
    if len(set(phrases)) != len(phrases):
        raise ValueError(f"{name} must not contain duplicates")
    for phrase in phrases:
        if not phrase.strip():
            raise ValueError(f"{name} must not contain empty or whitespace phrases")
    return phrases


@dataclass(frozen=True)
class NegationLexicon:
    """Phrases whose presence in a question text marks it negation-type."""

    phrases: tuple[str, ...] = DEFAULT_NEGATION_PHRASES

    def __post_init__(self) -> None:
        object.__setattr__(self, "phrases", _check_phrases(self.phrases, "lexicon phrases"))


@dataclass(frozen=True)
class CatchallConfig:
    """Exact-match phrase sets marking all/none-of-the-above options."""

    all_phrases: tuple[str, ...] = DEFAULT_ALL_PHRASES
    none_phrases: tuple[str, ...] = DEFAULT_NONE_PHRASES

    def __post_init__(self) -> None:
        object.__setattr__(self, "all_phrases", _check_phrases(self.all_phrases, "all_phrases"))
        object.__setattr__(self, "none_phrases", _check_phrases(self.none_phrases, "none_phrases"))
        overlap = set(self.all_phrases) & set(self.none_phrases)
        if overlap:
            raise ValueError(f"phrase sets overlap: {sorted(overlap)}")


DEFAULT_LEXICON = NegationLexicon()
DEFAULT_CATCHALL = CatchallConfig()


def load_phrases(path: Path | str) -> tuple[str, ...]:
    """Read one phrase per line; blank lines and ``#`` comments are skipped."""
    phrases = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        phrases.append(stripped)
    return tuple(phrases)


def load_lexicon(path: Path | str) -> NegationLexicon:
    return NegationLexicon(phrases=load_phrases(path))


def load_catchall(all_path: Path | str | None = None,
                  none_path: Path | str | None = None) -> CatchallConfig:
    return CatchallConfig(
        all_phrases=load_phrases(all_path) if all_path else DEFAULT_ALL_PHRASES,
        none_phrases=load_phrases(none_path) if none_path else DEFAULT_NONE_PHRASES,
    )


def classify_question(text: str, lexicon: NegationLexicon = DEFAULT_LEXICON) -> str:
    """Return ``NEGATION`` iff any lexicon phrase occurs as a substring of *text*.

    Only the question text is scanned; options and evidence never
    participate in classification.
    """
    for phrase in lexicon.phrases:
        if phrase in text:
            return NEGATION
    return REGULAR


def detect_catchall(options: Sequence[str],
                    config: CatchallConfig = DEFAULT_CATCHALL) -> tuple[tuple[int, str], ...]:
    """Flag option positions whose trimmed text exactly equals a catchall phrase."""
    all_set = set(config.all_phrases)
    none_set = set(config.none_phrases)
    positions = []
    for i, option in enumerate(options):
        trimmed = option.strip()
        if trimmed in all_set:
            positions.append((i, ALL_OF_THE_ABOVE))
        elif trimmed in none_set:
            positions.append((i, NONE_OF_THE_ABOVE))
    return tuple(positions)


def rewrite_options(options: Sequence[str],
                    catchall_positions: Sequence[tuple[int, str]]) -> tuple[str, ...]:
    """Replace each flagged option with the ``^``-joined other options.

    Non-flagged texts keep their position and content; list length and
    order never change.
    """
    options = tuple(options)
    flagged = {i for i, _kind in catchall_positions}
    for i in flagged:
        if not 0 <= i < len(options):
            raise ValueError(f"catchall position {i} out of range for {len(options)} options")
    if not catchall_positions:
        return options
    others = [opt for j, opt in enumerate(options) if j not in flagged]
    if not others:
        raise RewriteError("every option is flagged as catchall; nothing to concatenate")
    replacement = JOINER.join(others)
    return tuple(replacement if j in flagged else opt for j, opt in enumerate(options))


@dataclass(frozen=True)
class QuestionAnalysis:
    question_id: str
    qtype: str
    catchall_positions: tuple[tuple[int, str], ...]
    rewritten_options: tuple[str, ...]


def analyze(question: Question,
            lexicon: NegationLexicon = DEFAULT_LEXICON,
            config: CatchallConfig = DEFAULT_CATCHALL,
            *, neg_enabled: bool = True,
            catchall_enabled: bool = True) -> QuestionAnalysis:
    """Run both preprocessing mechanisms, each gated by its toggle.

    With ``neg_enabled`` off the question type is always regular; with
    ``catchall_enabled`` off the options pass through untouched. The two
    mechanisms compose independently.
    """
    qtype = classify_question(question.text, lexicon) if neg_enabled else REGULAR
    if catchall_enabled:
        positions = detect_catchall(question.options, config)
        rewritten = rewrite_options(question.options, positions)
    else:
        positions = ()
        rewritten = tuple(question.options)
    return QuestionAnalysis(
        question_id=question.id, qtype=qtype,
        catchall_positions=positions, rewritten_options=rewritten)
