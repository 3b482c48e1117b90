"""Rate-compatible puncturing and k-step-recoverable (k-SR) classification."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .construct import E2rcProfile
from .decoder import SR_INFINITY
from .matrix import BitMatrix

_RATE_EPS = 1e-9


@dataclass(frozen=True)
class PunctureSchedule:
    """Codeword column indices in puncturing order, most preferred first."""

    order: tuple[int, ...]
    mother_rate: float
    max_rate: float
    N: int
    K: int

    def realized_rate(self, punctured: int) -> float:
        return self.K / (self.N - punctured)


def puncture_count(N: int, R_L: float, R_p: float) -> int:
    """Number of punctured symbols ``round(N (1 - R_L / R_p))``, halves rounded up."""
    if not (0 < R_L <= 1 and 0 < R_p <= 1):
        raise ValueError(f"rates must lie in (0, 1], got R_L={R_L}, R_p={R_p}")
    if R_p < R_L - _RATE_EPS:
        raise ValueError(f"target rate {R_p} is below the mother rate {R_L}")
    exact = N * (1.0 - R_L / R_p)
    p = max(0, math.floor(exact + 0.5 + _RATE_EPS))
    K = round(N * R_L)
    if p > N - K:
        raise ValueError(f"rate {R_p} needs {p} punctured symbols, more than the {N - K} parities")
    return p


def max_rate(profile: E2rcProfile) -> float:
    """Highest rate reachable by puncturing every weight-two parity, ``K / (N - nv2)``."""
    return profile.K / (profile.N - profile.nv2)


def puncture_schedule(profile: E2rcProfile) -> PunctureSchedule:
    """Weight-two parity columns in block order, left to right.

    The degree-one column and the L columns are never scheduled.
    """
    start = profile.K + profile.l
    order = tuple(range(start, start + profile.nv2))
    return PunctureSchedule(order, profile.K / profile.N, max_rate(profile), profile.N, profile.K)


def apply_puncturing(schedule: PunctureSchedule, target_rate: float, N: int | None = None) -> tuple[int, ...]:
    """The schedule prefix that realizes ``target_rate``."""
    N = schedule.N if N is None else N
    if target_rate > schedule.max_rate + _RATE_EPS:
        raise ValueError(f"rate {target_rate} exceeds the maximum {schedule.max_rate:.6f}")
    p = puncture_count(N, schedule.mother_rate, target_rate)
    if p > len(schedule.order):
        raise ValueError(f"rate {target_rate} needs {p} punctures; schedule has {len(schedule.order)}")
    return schedule.order[:p]


@dataclass(frozen=True)
class SrClassification:
    """Per-variable recovery step: 0 unpunctured, k for k-SR, ``SR_INFINITY`` unrecoverable."""

    level: np.ndarray

    def nodes_at(self, k: int) -> np.ndarray:
        return np.flatnonzero(self.level == k)

    @property
    def unrecoverable(self) -> np.ndarray:
        return np.flatnonzero(self.level == SR_INFINITY)

    @property
    def depth(self) -> int:
        finite = self.level[self.level != SR_INFINITY]
        return int(finite.max()) if finite.size else 0


def classify_sr(h: BitMatrix, punctured: Iterable[int]) -> SrClassification:
    """Assign each punctured node the smallest k for which it is k-step recoverable.

    Level k: some neighboring check has every other neighbor at a level below
    k, at least one of them exactly at k - 1 (for k = 1 every other neighbor
    is unpunctured).
    """
    level = np.zeros(h.num_cols, dtype=np.int64)
    pending = set(int(v) for v in punctured)
    for v in pending:
        if not 0 <= v < h.num_cols:
            raise ValueError(f"punctured index {v} out of range")
        level[v] = SR_INFINITY
    k = 0
    while pending:
        k += 1
        found = []
        for v in sorted(pending):
            for c in h.col_support[v]:
                others = [level[u] for u in h.row_support[c] if u != v]
                if all(x < k for x in others) and (k == 1 or any(x == k - 1 for x in others)):
                    found.append(v)
                    break
        if not found:
            break
        for v in found:
            level[v] = k
        pending.difference_update(found)
    return SrClassification(level)


def sr_level_violations(h: BitMatrix, profile: E2rcProfile) -> list[tuple[int, int, int]]:
    """Scheduled columns recovered later than their designed block, or never.

    Classifies with the full schedule punctured and returns
    ``(codeword column, level, block)`` for every offender.
    """
    order = puncture_schedule(profile).order
    sr = classify_sr(h, order)
    out = []
    for col in order:
        block = profile.block_of_column(col - profile.K)
        if sr.level[col] > block:
            out.append((col, int(sr.level[col]), block))
    return out
