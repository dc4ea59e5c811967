"""Training-file IO and the word-level vocabulary.

Training data is the pipeline's model-input JSONL: one ``{"id", "input",
"target"}`` object per line.  Tokenization is plain whitespace splitting on
both sides; the vocabulary is built from the training (and validation)
files, which is what makes from-scratch training on tiny corpora viable
without any pretrained checkpoint.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

PAD, BOS, EOS, UNK = 0, 1, 2, 3
SPECIALS = ["<pad>", "<bos>", "<eos>", "<unk>"]


class DataFileError(ValueError):
    """Malformed training file; the message carries line diagnostics."""


def read_pairs(path: str | Path) -> list[tuple[str, str]]:
    path = Path(path)
    if not path.is_file():
        raise DataFileError(f"{path}: file not found")
    pairs = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataFileError(f"{path}:{lineno}: invalid JSON: {exc.msg}") from None
            if not isinstance(row, dict) or "input" not in row or "target" not in row:
                raise DataFileError(f"{path}:{lineno}: expected an object with "
                                    "'input' and 'target' fields")
            pairs.append((str(row["input"]), str(row["target"])))
    if not pairs:
        raise DataFileError(f"{path}: no training pairs")
    return pairs


@dataclass(frozen=True)
class Vocab:
    tokens: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "_index", {t: i for i, t in enumerate(self.tokens)})

    def __len__(self) -> int:
        return len(self.tokens)

    @classmethod
    def build(cls, pairs: list[tuple[str, str]]) -> "Vocab":
        seen = dict.fromkeys(SPECIALS)
        for source, target in pairs:
            for token in source.split():
                seen.setdefault(token, None)
            for token in target.split():
                seen.setdefault(token, None)
        return cls(tuple(seen))

    def encode(self, text: str, *, max_len: int) -> list[int]:
        ids = [self._index.get(token, UNK) for token in text.split()]
        return ids[:max_len]

    def decode(self, ids: list[int]) -> str:
        words = []
        for i in ids:
            if i == EOS:
                break
            if i in (PAD, BOS):
                continue
            words.append(self.tokens[i] if i < len(self.tokens) else "<unk>")
        return " ".join(words)
