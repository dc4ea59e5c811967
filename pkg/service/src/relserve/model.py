"""A small transformer encoder-decoder trained from scratch.

No pretrained checkpoint is assumed: the model is sized to memorize
desk-scale corpora in minutes on a CPU, not to generalize at benchmark
scale.  Checkpoints bundle the weights, the architecture config and the
vocabulary into a single file.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from pathlib import Path

import torch
from torch import nn

from .data import PAD, Vocab


@dataclass(frozen=True)
class ModelConfig:
    vocab_size: int
    d_model: int = 160
    nhead: int = 4
    num_encoder_layers: int = 2
    num_decoder_layers: int = 2
    dim_feedforward: int = 320
    dropout: float = 0.0
    max_positions: int = 1024


class Seq2SeqTransformer(nn.Module):
    def __init__(self, config: ModelConfig):
        super().__init__()
        self.config = config
        self.token_embedding = nn.Embedding(config.vocab_size, config.d_model,
                                            padding_idx=PAD)
        self.position_embedding = nn.Embedding(config.max_positions, config.d_model)
        self.transformer = nn.Transformer(
            d_model=config.d_model, nhead=config.nhead,
            num_encoder_layers=config.num_encoder_layers,
            num_decoder_layers=config.num_decoder_layers,
            dim_feedforward=config.dim_feedforward, dropout=config.dropout,
            batch_first=True)
        # the nested-tensor fast path is prototype-stage and warns on every
        # masked batch; not worth it at this model size
        self.transformer.encoder.enable_nested_tensor = False
        self.transformer.encoder.use_nested_tensor = False
        self.out = nn.Linear(config.d_model, config.vocab_size)

    def _embed(self, ids: torch.Tensor) -> torch.Tensor:
        positions = torch.arange(ids.shape[1], device=ids.device)
        return self.token_embedding(ids) + self.position_embedding(positions)

    @staticmethod
    def _causal_mask(length: int, device) -> torch.Tensor:
        # bool mask, same dtype as the key-padding masks
        return torch.triu(torch.ones(length, length, dtype=torch.bool,
                                     device=device), diagonal=1)

    def forward(self, src: torch.Tensor, tgt: torch.Tensor) -> torch.Tensor:
        """src: (B, S); tgt: (B, T) decoder input ids -> (B, T, V) logits."""
        hidden = self.transformer(
            self._embed(src), self._embed(tgt),
            tgt_mask=self._causal_mask(tgt.shape[1], tgt.device),
            src_key_padding_mask=src.eq(PAD),
            tgt_key_padding_mask=tgt.eq(PAD),
            memory_key_padding_mask=src.eq(PAD))
        return self.out(hidden)

    def encode(self, src: torch.Tensor) -> torch.Tensor:
        return self.transformer.encoder(self._embed(src),
                                        src_key_padding_mask=src.eq(PAD))

    def decode_step(self, memory: torch.Tensor, src: torch.Tensor,
                    tgt: torch.Tensor) -> torch.Tensor:
        """Logits for the last position of ``tgt`` given encoded ``memory``."""
        hidden = self.transformer.decoder(
            self._embed(tgt), memory,
            tgt_mask=self._causal_mask(tgt.shape[1], tgt.device),
            memory_key_padding_mask=src.eq(PAD))
        return self.out(hidden[:, -1, :])


def save_checkpoint(path: str | Path, model: Seq2SeqTransformer,
                    vocab: Vocab) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    torch.save({"config": asdict(model.config), "vocab": list(vocab.tokens),
                "state_dict": model.state_dict()}, path)


def load_checkpoint(path: str | Path) -> tuple[Seq2SeqTransformer, Vocab]:
    payload = torch.load(path, map_location="cpu", weights_only=True)
    config = ModelConfig(**payload["config"])
    model = Seq2SeqTransformer(config)
    model.load_state_dict(payload["state_dict"])
    model.eval()
    return model, Vocab(tuple(payload["vocab"]))
