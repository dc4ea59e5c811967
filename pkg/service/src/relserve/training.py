"""Seeded training loop: AdamW, linear warmup/decay, teacher forcing."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import torch
from torch import nn
from torch.utils.data import DataLoader, Dataset

from .data import BOS, EOS, PAD, Vocab, read_pairs
from .model import ModelConfig, Seq2SeqTransformer

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainSettings:
    train_file: str
    val_file: str | None = None
    learning_rate: float = 8e-5
    epochs: int = 10
    max_source_length: int = 1024
    max_target_length: int = 128
    batch_size: int = 4
    scheduler: str = "linear"
    optimizer: str = "adamw"
    seed: int = 0


@dataclass
class TrainMetrics:
    train_loss: list[float] = field(default_factory=list)
    val_loss: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"train_loss": self.train_loss, "val_loss": self.val_loss}


class _PairDataset(Dataset):
    def __init__(self, pairs, vocab: Vocab, settings: TrainSettings):
        self.rows = []
        for source, target in pairs:
            src = [BOS] + vocab.encode(source, max_len=settings.max_source_length - 2) + [EOS]
            tgt = vocab.encode(target, max_len=settings.max_target_length - 1)
            self.rows.append((src, [BOS] + tgt, tgt + [EOS]))

    def __len__(self):
        return len(self.rows)

    def __getitem__(self, i):
        return self.rows[i]


def _collate(batch):
    def pad(seqs):
        width = max(len(s) for s in seqs)
        out = torch.full((len(seqs), width), PAD, dtype=torch.long)
        for i, s in enumerate(seqs):
            out[i, :len(s)] = torch.tensor(s, dtype=torch.long)
        return out

    src, tgt_in, tgt_out = zip(*batch)
    return pad(src), pad(tgt_in), pad(tgt_out)


def _epoch_loss(model, loader, criterion, optimizer=None, scheduler=None):
    total, batches = 0.0, 0
    for src, tgt_in, tgt_out in loader:
        logits = model(src, tgt_in)
        loss = criterion(logits.reshape(-1, logits.shape[-1]), tgt_out.reshape(-1))
        if optimizer is not None:
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            scheduler.step()
        total += float(loss.detach())
        batches += 1
    return total / max(batches, 1)


def train(settings: TrainSettings) -> tuple[Seq2SeqTransformer, Vocab, TrainMetrics]:
    if settings.optimizer != "adamw":
        raise ValueError(f"unsupported optimizer {settings.optimizer!r}")
    if settings.scheduler != "linear":
        raise ValueError(f"unsupported scheduler {settings.scheduler!r}")

    torch.manual_seed(settings.seed)
    train_pairs = read_pairs(settings.train_file)
    val_pairs = read_pairs(settings.val_file) if settings.val_file else []
    vocab = Vocab.build(train_pairs + val_pairs)

    max_positions = max(settings.max_source_length, settings.max_target_length)
    model = Seq2SeqTransformer(ModelConfig(vocab_size=len(vocab),
                                           max_positions=max_positions))
    metrics = TrainMetrics()
    if settings.epochs == 0:
        return model, vocab, metrics

    generator = torch.Generator()
    generator.manual_seed(settings.seed)
    train_loader = DataLoader(_PairDataset(train_pairs, vocab, settings),
                              batch_size=settings.batch_size, shuffle=True,
                              generator=generator, collate_fn=_collate)
    val_loader = None
    if val_pairs:
        val_loader = DataLoader(_PairDataset(val_pairs, vocab, settings),
                                batch_size=settings.batch_size, shuffle=False,
                                collate_fn=_collate)

    optimizer = torch.optim.AdamW(model.parameters(), lr=settings.learning_rate)
    total_steps = max(1, settings.epochs * len(train_loader))
    warmup = max(1, total_steps // 10)

    def lr_lambda(step):
        if step < warmup:
            return (step + 1) / warmup
        return max(0.0, (total_steps - step) / max(1, total_steps - warmup))

    scheduler = torch.optim.lr_scheduler.LambdaLR(optimizer, lr_lambda)
    criterion = nn.CrossEntropyLoss(ignore_index=PAD)

    for epoch in range(settings.epochs):
        model.train()
        metrics.train_loss.append(
            _epoch_loss(model, train_loader, criterion, optimizer, scheduler))
        if val_loader is not None:
            model.eval()
            with torch.no_grad():
                metrics.val_loss.append(_epoch_loss(model, val_loader, criterion))
        log.info("epoch %d/%d train_loss=%.4f", epoch + 1, settings.epochs,
                 metrics.train_loss[-1])
    model.eval()
    return model, vocab, metrics
