"""Command line for the pipeline: index, answer, eval, gen-synth.

Human-readable output goes to stdout, diagnostics to stderr, machine
output to ``--out`` files. Exit codes: 0 success, 2 usage/input error,
3 external-service error.
"""

from __future__ import annotations

import functools
import json
import os
import sys
from pathlib import Path

import click

from . import analysis, corpus, pipeline, retrieval
from .errors import McqaError
from .scoring import ScorerConfig, TransportError

TEXTBOOK_INDEX_FILE = "textbook.index.json"
WIKI_INDEX_FILE = "wiki.index.json"


def _abort(message: str, code: int) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except TransportError as exc:
            _abort(str(exc), 3)
        except (McqaError, OSError, ValueError) as exc:
            _abort(str(exc), 2)
    return wrapper


def _scorer_config(scorer: str, endpoint: str | None) -> ScorerConfig:
    if scorer == "remote" and not endpoint:
        raise ValueError("remote scorer requires --endpoint or MCQA_ENDPOINT")
    return ScorerConfig(kind=scorer, endpoint=endpoint)


def _phrase_configs(lexicon_path: Path | None, catchall_all: Path | None,
                    catchall_none: Path | None):
    lexicon = analysis.load_lexicon(lexicon_path) if lexicon_path else analysis.DEFAULT_LEXICON
    catchall = analysis.load_catchall(catchall_all, catchall_none)
    return lexicon, catchall


def _load_indices(index_dir: Path, want_wiki: bool):
    textbook = retrieval.load_index(index_dir / TEXTBOOK_INDEX_FILE)
    wiki = None
    wiki_path = index_dir / WIKI_INDEX_FILE
    if want_wiki and wiki_path.exists():
        wiki = retrieval.load_index(wiki_path)
    return textbook, wiki


_scorer_options = [
    click.option("--scorer", type=click.Choice(["lexical", "remote"]), default="lexical",
                 show_default=True, help="Candidate scorer implementation."),
    click.option("--endpoint", envvar="MCQA_ENDPOINT", default=None,
                 help="Remote scorer base URL (falls back to MCQA_ENDPOINT)."),
]

_phrase_options = [
    click.option("--lexicon", "lexicon_path", type=click.Path(path_type=Path), default=None,
                 help="Negation phrase file (one phrase per line)."),
    click.option("--catchall-all", type=click.Path(path_type=Path), default=None,
                 help="All-of-the-above phrase file."),
    click.option("--catchall-none", type=click.Path(path_type=Path), default=None,
                 help="None-of-the-above phrase file."),
]


def _add_options(options):
    def wrap(fn):
        for option in reversed(options):
            fn = option(fn)
        return fn
    return wrap


@click.group()
@click.version_option(package_name="mcqa")
def main() -> None:
    """Evidence-grounded multiple-choice question answering over a CJK corpus."""


@main.command("index")
@click.option("--data", "data_dir", type=click.Path(path_type=Path), required=True,
              help="Dataset directory holding lessons.jsonl (and optionally wiki.jsonl).")
@click.option("--index", "index_dir", type=click.Path(path_type=Path), required=True,
              help="Output directory for persisted indices.")
@_guarded
def cmd_index(data_dir: Path, index_dir: Path) -> None:
    """Build and persist the textbook (and wiki) retrieval indices."""
    lessons = corpus.read_lessons_file(data_dir / corpus.LESSONS_FILE)
    paragraphs = [p for lesson in lessons for p in lesson.paragraphs]
    textbook = retrieval.build_index(paragraphs, "textbook")
    index_dir.mkdir(parents=True, exist_ok=True)
    textbook_path = index_dir / TEXTBOOK_INDEX_FILE
    retrieval.save_index(textbook, textbook_path)
    click.echo(f"textbook: {textbook.doc_count} paragraphs -> {textbook_path}")

    wiki_source = data_dir / corpus.WIKI_FILE
    if wiki_source.exists():
        wiki_lessons = corpus.load_wiki_lessons(wiki_source)
        wiki_paragraphs = [p for lesson in wiki_lessons for p in lesson.paragraphs]
        wiki = retrieval.build_index(wiki_paragraphs, "wiki")
        wiki_path = index_dir / WIKI_INDEX_FILE
        retrieval.save_index(wiki, wiki_path)
        click.echo(f"wiki: {wiki.doc_count} paragraphs -> {wiki_path}")


def _question_from_stdin() -> corpus.Question:
    record = json.loads(sys.stdin.read())
    if not isinstance(record, dict):
        raise ValueError("stdin must hold a single JSON object")
    for required in ("text", "options"):
        if required not in record:
            raise ValueError(f"stdin question is missing field {required!r}")
    gold_se = record.get("gold_se")
    return corpus.Question(
        id=str(record.get("id", "stdin-question")),
        text=str(record["text"]),
        options=tuple(str(opt) for opt in record["options"]),
        gold_index=int(record.get("gold_index", 0)),
        gold_se=gold_se,
        se_class=str(record.get("se_class", "SE1" if gold_se is not None else "SE2")),
        split=str(record.get("split", "test")),
    )


def _find_question(data_dir: Path, question_id: str) -> corpus.Question:
    dataset = corpus.load_dataset(data_dir)
    for question in dataset.questions:
        if question.id == question_id:
            return question
    raise ValueError(f"question id {question_id!r} not found in {data_dir}")


@main.command("answer")
@click.option("--data", "data_dir", type=click.Path(path_type=Path), default=None,
              help="Dataset directory (required with --id).")
@click.option("--index", "index_dir", type=click.Path(path_type=Path), default=None,
              help="Index directory (required for retrieved scenarios).")
@click.option("--id", "question_id", default=None,
              help="Answer this dataset question instead of reading stdin JSON.")
@click.option("--scenario", type=click.Choice(["gold", "retrieved", "retrieved-textbook-only"]),
              default="gold", show_default=True)
@click.option("--no-neg", is_flag=True, help="Disable negation-type handling.")
@click.option("--no-catchall", is_flag=True, help="Disable catchall-option rewriting.")
@_add_options(_scorer_options)
@_add_options(_phrase_options)
@_guarded
def cmd_answer(data_dir: Path | None, index_dir: Path | None, question_id: str | None,
               scenario: str, no_neg: bool, no_catchall: bool, scorer: str,
               endpoint: str | None, lexicon_path: Path | None,
               catchall_all: Path | None, catchall_none: Path | None) -> None:
    """Answer one question and print the prediction as JSON."""
    if question_id is not None:
        if data_dir is None:
            raise ValueError("--id requires --data")
        question = _find_question(data_dir, question_id)
    else:
        question = _question_from_stdin()

    lexicon, catchall = _phrase_configs(lexicon_path, catchall_all, catchall_none)
    config = _scorer_config(scorer, endpoint)

    if scenario == "gold":
        evidence = retrieval.retrieve_evidence(question, mode="gold")
    else:
        if index_dir is None:
            raise ValueError(f"--scenario {scenario} requires --index")
        textbook, wiki = _load_indices(index_dir, want_wiki=scenario == "retrieved")
        evidence = retrieval.retrieve_evidence(question, textbook, wiki, mode="retrieved")

    q_analysis = analysis.analyze(question, lexicon, catchall,
                                  neg_enabled=not no_neg, catchall_enabled=not no_catchall)
    prediction = pipeline.answer_question(question, q_analysis, evidence, config)
    click.echo(json.dumps({
        "id": question.id,
        "qtype": prediction.qtype,
        "evidence": prediction.evidence,
        "rewritten_options": list(q_analysis.rewritten_options),
        "scores": prediction.scores.as_list(),
        "chosen_index": prediction.chosen_index,
        "chosen_option": question.options[prediction.chosen_index],
    }, ensure_ascii=False, indent=2))


@main.command("eval")
@click.option("--data", "data_dir", type=click.Path(path_type=Path), required=True)
@click.option("--index", "index_dir", type=click.Path(path_type=Path), default=None,
              help="Index directory (required for retrieved scenarios).")
@click.option("--split", type=click.Choice(list(corpus.SPLITS)), default="test",
              show_default=True)
@click.option("--scenario", type=click.Choice(["gold", "retrieved", "retrieved-textbook-only"]),
              default="gold", show_default=True)
@click.option("--no-neg", is_flag=True, help="Disable negation-type handling.")
@click.option("--no-catchall", is_flag=True, help="Disable catchall-option rewriting.")
@click.option("--all-modes", is_flag=True, help="Evaluate all four ablation modes.")
@click.option("--jobs", type=click.IntRange(min=1), default=lambda: os.cpu_count() or 1,
              help="Worker threads (default: available cores).")
@click.option("--out", "out_path", type=click.Path(path_type=Path), default=None,
              help="Write the report JSON here.")
@_add_options(_scorer_options)
@_add_options(_phrase_options)
@_guarded
def cmd_eval(data_dir: Path, index_dir: Path | None, split: str, scenario: str,
             no_neg: bool, no_catchall: bool, all_modes: bool, jobs: int,
             out_path: Path | None, scorer: str, endpoint: str | None,
             lexicon_path: Path | None, catchall_all: Path | None,
             catchall_none: Path | None) -> None:
    """Evaluate a dataset split and print a per-mode accuracy table."""
    dataset = corpus.load_dataset(data_dir)
    lexicon, catchall = _phrase_configs(lexicon_path, catchall_all, catchall_none)
    config = _scorer_config(scorer, endpoint)

    textbook = wiki = None
    if scenario == "gold":
        pipeline_scenario = "gold"
    else:
        if index_dir is None:
            raise ValueError(f"--scenario {scenario} requires --index")
        textbook, wiki = _load_indices(index_dir, want_wiki=scenario == "retrieved")
        if scenario == "retrieved" and wiki is None:
            click.echo("note: no wiki index found, falling back to textbook-only retrieval",
                       err=True)
        pipeline_scenario = "retrieved_fused" if wiki is not None else "retrieved_textbook_only"

    shared = dict(textbook_index=textbook, wiki_index=wiki,
                  lexicon=lexicon, catchall=catchall, jobs=jobs)
    if all_modes:
        reports = pipeline.compare_modes(dataset, split, pipeline_scenario, config, **shared)
        payload = pipeline.reports_to_json(reports)
    else:
        mode = pipeline.AblationMode(neg_enabled=not no_neg, catchall_enabled=not no_catchall)
        report = pipeline.evaluate(dataset, split, mode, pipeline_scenario, config, **shared)
        reports = (report,)
        payload = pipeline.report_to_json(report)

    click.echo(f"scenario: {pipeline_scenario}  split: {split}  scorer: {scorer}")
    click.echo(pipeline.render_table(reports), nl=False)
    if out_path is not None:
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.write_text(payload, encoding="utf-8")
        click.echo(f"report written to {out_path}", err=True)


@main.command("gen-synth")
@click.option("--regular", type=click.IntRange(min=0), default=0, show_default=True)
@click.option("--neg", type=click.IntRange(min=0), default=0, show_default=True)
@click.option("--all-abv", type=click.IntRange(min=0), default=0, show_default=True)
@click.option("--none-abv", type=click.IntRange(min=0), default=0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--split", type=click.Choice(list(corpus.SPLITS)), default="test",
              show_default=True)
@click.option("--data", "data_dir", type=click.Path(path_type=Path), required=True,
              help="Output directory for the generated bundle.")
@_guarded
def cmd_gen_synth(regular: int, neg: int, all_abv: int, none_abv: int,
                  seed: int, split: str, data_dir: Path) -> None:
    """Generate a synthetic dataset bundle with planted evidence paragraphs."""
    dataset = corpus.gen_synthetic(
        regular=regular, negation=neg, all_of_the_above=all_abv,
        none_of_the_above=none_abv, seed=seed, split=split)
    corpus.save_dataset(dataset, data_dir)
    stats = corpus.dataset_stats(dataset)
    counts = stats.by_split[split]
    click.echo(f"wrote {len(dataset.questions)} questions / {len(dataset.lessons)} lessons "
               f"to {data_dir} (negation: {counts.negation}, catchall: {counts.catchall})")


if __name__ == "__main__":
    main()
