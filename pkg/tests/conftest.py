from __future__ import annotations

from pathlib import Path

import pytest

from helpers import write_jsonl
import zh_fixtures as zh


@pytest.fixture
def bundle_dir(tmp_path: Path) -> Path:
    """A small valid bundle: 2 lessons, 3 questions (one SE2)."""
    write_jsonl(tmp_path / "lessons.jsonl", [
        {"lesson_id": "les-1", "title": "家庭", "index": 0, "text": zh.FAMILY_EVIDENCE},
        {"lesson_id": "les-1", "title": "家庭", "index": 1, "text": "單親家庭是只有爸爸或媽媽其中一人和子女同住。"},
        {"lesson_id": "les-2", "title": "高齡社會", "index": 0,
         "text": "面對高齡化，政府制定老人福利政策，提供良好的安養照顧，並建立健全的醫療體系。"},
    ])
    write_jsonl(tmp_path / "questions.jsonl", [
        {"id": "q-family", "text": zh.FAMILY_QUESTION, "options": list(zh.FAMILY_OPTIONS),
         "gold_index": 0, "gold_se": zh.FAMILY_EVIDENCE, "se_class": "SE1", "split": "test"},
        {"id": "q-allabove", "text": zh.ALLABOVE_QUESTION, "options": list(zh.ALLABOVE_OPTIONS),
         "gold_index": 3, "gold_se": "面對高齡化，政府制定老人福利政策，提供良好的安養照顧，並建立健全的醫療體系。",
         "se_class": "SE1", "split": "test"},
        {"id": "q-neg", "text": zh.NEGATION_QUESTION, "options": list(zh.NEGATION_OPTIONS),
         "gold_index": 2, "gold_se": None, "se_class": "SE2", "split": "dev"},
    ])
    return tmp_path
