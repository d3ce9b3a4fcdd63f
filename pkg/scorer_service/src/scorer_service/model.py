"""Model wrapper: input assembly and candidate scoring.

Each candidate is encoded as ``[CLS] evidence [SEP] question [SEP]
candidate [SEP]``; all candidates of a request go through the shared
encoder in one batch, a linear head produces one logit per candidate, and
a softmax across candidates yields the scores.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import torch
from transformers import AutoModelForMultipleChoice, AutoTokenizer

from .config import ServiceConfig


class OverBudgetError(Exception):
    """Question plus candidate alone exceed the sequence budget."""


@dataclass(frozen=True)
class AssembledInput:
    input_ids: list[int]
    token_type_ids: list[int]

    def __len__(self) -> int:
        return len(self.input_ids)


class CandidateScorer:
    """Loads a multiple-choice model and scores candidate lists."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        self.tokenizer = AutoTokenizer.from_pretrained(config.model_path)
        self.model = AutoModelForMultipleChoice.from_pretrained(config.model_path)
        self.model.to(torch.device(config.device))
        self.model.eval()
        self.model_id = Path(config.model_path).name

    def _encode(self, text: str) -> list[int]:
        return self.tokenizer.encode(text, add_special_tokens=False)

    def assemble_input(self, evidence: str, question: str, candidate: str) -> AssembledInput:
        """Lay out one candidate's sequence, truncating only the evidence.

        The evidence segment is cut from its end until the sequence fits the
        budget; the question and candidate are never truncated. If they
        alone (plus the four special tokens) exceed the budget, the request
        cannot be served.
        """
        cls_id = self.tokenizer.cls_token_id
        sep_id = self.tokenizer.sep_token_id
        question_ids = self._encode(question)
        candidate_ids = self._encode(candidate)
        evidence_budget = self.config.max_seq_len - 4 - len(question_ids) - len(candidate_ids)
        if evidence_budget < 0:
            raise OverBudgetError(
                f"question ({len(question_ids)} tokens) and candidate "
                f"({len(candidate_ids)} tokens) exceed the {self.config.max_seq_len}-token budget")
        evidence_ids = self._encode(evidence)[:evidence_budget]
        input_ids = [cls_id, *evidence_ids, sep_id, *question_ids, sep_id, *candidate_ids, sep_id]
        first_segment = 2 + len(evidence_ids)
        token_type_ids = [0] * first_segment + [1] * (len(input_ids) - first_segment)
        return AssembledInput(input_ids=input_ids, token_type_ids=token_type_ids)

    def score(self, evidence: str, question: str, candidates: list[str]) -> list[float]:
        """One softmax-normalized score per candidate, deterministic in eval mode."""
        assembled = [self.assemble_input(evidence, question, c) for c in candidates]
        width = max(len(a) for a in assembled)
        pad_id = self.tokenizer.pad_token_id
        input_ids, token_type_ids, attention_mask = [], [], []
        for a in assembled:
            padding = width - len(a)
            input_ids.append(a.input_ids + [pad_id] * padding)
            token_type_ids.append(a.token_type_ids + [0] * padding)
            attention_mask.append([1] * len(a) + [0] * padding)
        device = torch.device(self.config.device)
        batch = {
            "input_ids": torch.tensor([input_ids], device=device),
            "token_type_ids": torch.tensor([token_type_ids], device=device),
            "attention_mask": torch.tensor([attention_mask], device=device),
        }
        with torch.no_grad():
            logits = self.model(**batch).logits
        return torch.softmax(logits[0], dim=0).tolist()
