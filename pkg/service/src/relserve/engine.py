"""Single-model engine shared by the HTTP endpoints.

One model instance serves everything.  Generation requests queue on a lock
(each request is internally chunked into bounded batches); a training job
holds the training flag for its whole run, during which generation is
refused rather than stalled, since training rebuilds the model the requests
would be answered with.
"""

from __future__ import annotations

import logging
import threading
from pathlib import Path

from .data import Vocab
from .decoding import Decoding, generate_batch
from .model import Seq2SeqTransformer, load_checkpoint, save_checkpoint
from .training import TrainMetrics, TrainSettings, train

log = logging.getLogger(__name__)

LATEST = "latest.pt"


class EngineBusy(RuntimeError):
    pass


class NoModelLoaded(RuntimeError):
    pass


class Engine:
    def __init__(self, checkpoint_dir: str | Path, max_batch_size: int = 16):
        self.checkpoint_dir = Path(checkpoint_dir)
        self.max_batch_size = max_batch_size
        self.model: Seq2SeqTransformer | None = None
        self.vocab: Vocab | None = None
        self._lock = threading.Lock()  # serializes model access
        self.training_active = threading.Event()
        latest = self.checkpoint_dir / LATEST
        if latest.is_file():
            self.model, self.vocab = load_checkpoint(latest)
            log.info("loaded checkpoint %s", latest)

    def run_training(self, settings: TrainSettings) -> TrainMetrics:
        if self.training_active.is_set():
            raise EngineBusy("a training job is already running")
        self.training_active.set()
        try:
            model, vocab, metrics = train(settings)
            if settings.epochs == 0:
                return metrics  # no-op job: current model untouched
            with self._lock:
                self.model, self.vocab = model, vocab
                save_checkpoint(self.checkpoint_dir / LATEST, model, vocab)
            return metrics
        finally:
            self.training_active.clear()

    def generate(self, inputs: list[str], decoding: Decoding) -> list[str]:
        if self.training_active.is_set():
            raise EngineBusy("training in progress")
        with self._lock:
            if self.model is None or self.vocab is None:
                raise NoModelLoaded("no checkpoint loaded; train first")
            outputs: list[str] = []
            for offset in range(0, len(inputs), self.max_batch_size):
                chunk = inputs[offset:offset + self.max_batch_size]
                outputs.extend(generate_batch(self.model, self.vocab, chunk,
                                              decoding))
            return outputs
