"""Seeded random streams and survival-curve bookkeeping shared by the engines.

Every random sequence draws from its own generator derived from
``(seed, m, index)`` through ``numpy.random.SeedSequence``'s spawn key, so a
curve is reproducible no matter how sequences are split across workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np


def sequence_rng(seed: int, m: int, index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed) & (2**64 - 1), spawn_key=(int(m), int(index)))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class SurvivalPoint:
    m: int
    p_hat: float
    stderr: float
    n: int


@dataclass
class SurvivalCurve:
    points: list[SurvivalPoint]
    metadata: dict = field(default_factory=dict)

    @classmethod
    def from_counts(cls, counts: dict[int, int], n: int, metadata: dict | None = None):
        pts = []
        for m in sorted(counts):
            p = counts[m] / n
            pts.append(SurvivalPoint(m, p, math.sqrt(p * (1 - p) / n), n))
        return cls(pts, dict(metadata or {}))

    @property
    def m(self) -> np.ndarray:
        return np.array([p.m for p in self.points])

    @property
    def p_hat(self) -> np.ndarray:
        return np.array([p.p_hat for p in self.points])

    @property
    def stderr(self) -> np.ndarray:
        return np.array([p.stderr for p in self.points])

    def __len__(self) -> int:
        return len(self.points)

    def at(self, m: int) -> SurvivalPoint:
        for p in self.points:
            if p.m == m:
                return p
        raise KeyError(m)


def _count_chunk(args) -> tuple[int, int]:
    run, m, config, seed, start, stop = args
    hits = 0
    for i in range(start, stop):
        hits += int(run(m, config, sequence_rng(seed, m, i)))
    return m, hits


def count_outcomes(
    run: Callable, config, m_values, n_sequences: int, seed: int, workers: int = 1
) -> dict[int, int]:
    """Number of accepted outcomes of ``run(m, config, rng)`` for every m."""
    jobs = []
    chunk = max(1, math.ceil(n_sequences / max(1, workers)))
    for m in m_values:
        for start in range(0, n_sequences, chunk):
            jobs.append((run, m, config, seed, start, min(n_sequences, start + chunk)))
    counts = {int(m): 0 for m in m_values}
    if workers <= 1:
        results = map(_count_chunk, jobs)
        for m, hits in results:
            counts[m] += hits
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for m, hits in pool.map(_count_chunk, jobs):
                counts[m] += hits
    return counts
