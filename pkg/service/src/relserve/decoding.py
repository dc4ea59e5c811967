"""Greedy and top-k + nucleus decoding.

Greedy is fully deterministic.  Sampling filters to the top-k logits, then
keeps the smallest set of those tokens covering ``top_p`` probability mass,
and draws from a generator seeded per request, so identical requests
reproduce identical outputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch

from .data import BOS, EOS, Vocab
from .model import Seq2SeqTransformer


@dataclass(frozen=True)
class Decoding:
    strategy: str = "greedy"
    top_k: int = 20
    top_p: float = 0.95
    max_new_tokens: int = 128
    seed: int | None = None


def _filter_topk_nucleus(logits: torch.Tensor, top_k: int,
                         top_p: float) -> torch.Tensor:
    """Return per-row probabilities with non-candidates zeroed."""
    k = min(top_k, logits.shape[-1])
    values, indices = torch.topk(logits, k, dim=-1)
    probs = torch.softmax(values, dim=-1)
    cumulative = torch.cumsum(probs, dim=-1)
    # keep tokens until top_p mass is reached (always at least one)
    cut = cumulative - probs >= top_p
    probs = probs.masked_fill(cut, 0.0)
    full = torch.zeros_like(logits)
    full.scatter_(-1, indices, probs)
    return full


@torch.no_grad()
def generate_batch(model: Seq2SeqTransformer, vocab: Vocab,
                   sources: list[str], decoding: Decoding,
                   max_source_length: int = 1024) -> list[str]:
    model.eval()
    encoded = [[BOS] + vocab.encode(s, max_len=max_source_length - 2) + [EOS]
               for s in sources]
    width = max(len(e) for e in encoded)
    src = torch.full((len(encoded), width), 0, dtype=torch.long)
    for i, ids in enumerate(encoded):
        src[i, :len(ids)] = torch.tensor(ids, dtype=torch.long)

    generator = None
    if decoding.strategy == "topk_nucleus":
        generator = torch.Generator()
        generator.manual_seed(decoding.seed if decoding.seed is not None else 0)

    memory = model.encode(src)
    tgt = torch.full((len(encoded), 1), BOS, dtype=torch.long)
    finished = torch.zeros(len(encoded), dtype=torch.bool)
    for _ in range(decoding.max_new_tokens):
        logits = model.decode_step(memory, src, tgt)
        if decoding.strategy == "greedy":
            next_token = logits.argmax(dim=-1)
        else:
            probs = _filter_topk_nucleus(logits, decoding.top_k, decoding.top_p)
            next_token = torch.multinomial(probs, 1, generator=generator).squeeze(1)
        next_token = next_token.masked_fill(finished, EOS)
        tgt = torch.cat([tgt, next_token.unsqueeze(1)], dim=1)
        finished |= next_token.eq(EOS)
        if bool(finished.all()):
            break
    return [vocab.decode(row.tolist()[1:]) for row in tgt]
