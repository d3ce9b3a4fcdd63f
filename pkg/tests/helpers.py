"""Construction helpers shared across test modules."""

from __future__ import annotations

import json
from pathlib import Path

from mcqa.corpus import Question

import zh_fixtures as zh


def write_jsonl(path: Path, records: list[dict]) -> None:
    with path.open("w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")


def make_question(**overrides) -> Question:
    fields = dict(id="q-1", text=zh.FAMILY_QUESTION, options=zh.FAMILY_OPTIONS,
                  gold_index=0, gold_se=zh.FAMILY_EVIDENCE, se_class="SE1", split="test")
    fields.update(overrides)
    return Question(**fields)
