"""Build a tiny randomly-initialized fixture model for protocol tests.

The fixture keeps CI self-contained: generating it takes a moment and
needs no downloads, yet it exercises the full tokenizer/model/serving
path. Weights are deterministic for a fixed seed.
"""

from __future__ import annotations

import string
from pathlib import Path

import torch
from tokenizers import Tokenizer, models, normalizers, pre_tokenizers
from transformers import BertConfig, BertForMultipleChoice, BertTokenizerFast

FIXTURE_CJK_CHARS = 768


def _build_vocab() -> list[str]:
    vocab = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]
    vocab += [chr(cp) for cp in range(0x4E00, 0x4E00 + FIXTURE_CJK_CHARS)]
    ascii_chars = list(string.ascii_lowercase + string.digits)
    vocab += ascii_chars
    vocab += [f"##{ch}" for ch in ascii_chars]
    return vocab


def _build_tokenizer() -> BertTokenizerFast:
    vocab = _build_vocab()
    wordpiece = models.WordPiece({token: i for i, token in enumerate(vocab)},
                                 unk_token="[UNK]", max_input_chars_per_word=100)
    tokenizer = Tokenizer(wordpiece)
    tokenizer.normalizer = normalizers.BertNormalizer(lowercase=True)
    tokenizer.pre_tokenizer = pre_tokenizers.BertPreTokenizer()
    return BertTokenizerFast(tokenizer_object=tokenizer, unk_token="[UNK]",
                             pad_token="[PAD]", cls_token="[CLS]",
                             sep_token="[SEP]", mask_token="[MASK]")


def build_fixture_model(out_dir: Path | str, seed: int = 0) -> Path:
    """Write a tiny multiple-choice model + tokenizer to *out_dir*."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    tokenizer = _build_tokenizer()
    config = BertConfig(
        vocab_size=tokenizer.vocab_size,
        hidden_size=32,
        num_hidden_layers=2,
        num_attention_heads=4,
        intermediate_size=64,
        max_position_embeddings=512,
        type_vocab_size=2,
    )
    torch.manual_seed(seed)
    model = BertForMultipleChoice(config)
    with torch.no_grad():
        # spread the logits so candidate scores differ visibly; freshly
        # initialized heads score near-uniformly
        model.classifier.weight.mul_(2000.0)
    model.save_pretrained(out_dir)
    tokenizer.save_pretrained(out_dir)
    return out_dir


def main() -> None:
    import argparse

    parser = argparse.ArgumentParser(description=build_fixture_model.__doc__)
    parser.add_argument("out_dir", type=Path)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    path = build_fixture_model(args.out_dir, seed=args.seed)
    print(f"fixture model written to {path}")


if __name__ == "__main__":
    main()
