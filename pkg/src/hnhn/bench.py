"""Timing harness for the forward+backward pass across a size sweep.

The model's per-step cost should grow linearly with total incidence count at
a fixed hidden dimension; the fitted log-log slope is the reported exponent.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .autodiff import Tape, Tensor, softmax_cross_entropy
from .hypergraph import normalization_tables
from .model import forward, init_model
from .rng import CounterRng
from .synthetic import random_hypergraph

BASE_N = 1500
BASE_M = 750
HIDDEN_DIM = 64
FEATURE_DIM = 32


@dataclass
class BenchPoint:
    scale: int
    incidence: int
    seconds: float


def _time_step(n: int, m: int, seed: int, repeats: int) -> tuple[int, float]:
    h = random_hypergraph(n, m, seed=seed, min_size=3, max_size=6)
    rng = CounterRng(seed + 1)
    features = rng.uniform(-1.0, 1.0, (h.n, FEATURE_DIM))
    labels = rng.integers(4, h.n).astype(np.int64)
    rows = np.arange(h.n)
    model = init_model(FEATURE_DIM, HIDDEN_DIM, n_classes=4, seed=seed + 2)
    tables = normalization_tables(h, 0.0, 0.0)
    x = Tensor(features)

    def step() -> None:
        tape = Tape()
        out = forward(model, h, tables, x, training=False, tape=tape)
        loss = softmax_cross_entropy(out.node_logits, labels, rows, tape)
        model.zero_grads()
        tape.backward(loss)

    step()  # warm caches before timing
    best = min(_timed(step) for _ in range(repeats))
    return h.incidence_count, best


def _timed(fn) -> float:
    start = time.perf_counter()
    fn()
    return time.perf_counter() - start


def run_scaling_bench(seed: int = 0, repeats: int = 5) -> tuple[list[BenchPoint], float]:
    """Time one training step at 1x, 2x, 4x size; returns points and the
    fitted scaling exponent of seconds vs incidence count."""
    points = []
    for scale in (1, 2, 4):
        incidence, seconds = _time_step(
            BASE_N * scale, BASE_M * scale, seed=seed + scale, repeats=repeats
        )
        points.append(BenchPoint(scale=scale, incidence=incidence, seconds=seconds))
    log_x = np.log([p.incidence for p in points])
    log_y = np.log([p.seconds for p in points])
    exponent = float(np.polyfit(log_x, log_y, 1)[0])
    return points, exponent
