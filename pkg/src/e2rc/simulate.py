"""Monte Carlo BER/FER sweeps of a punctured code over BPSK/AWGN.

Every batch draws from its own generator, seeded from (seed, rate index,
grid index, batch index), and the stop rule is applied in batch order, so a
sweep is reproducible whatever the number of workers.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .codes import E2rcCode, rate_half_code
from .decoder import DEFAULT_MAX_ITERS, LLR_CLAMP, BpDecoder
from .puncture import apply_puncturing, puncture_schedule

CSV_COLUMNS = ("rate", "ebn0_db", "frames", "bit_errors", "frame_errors", "ber", "fer", "mean_iterations")
_RATE_EPS = 1e-9


@dataclass(frozen=True)
class SimConfig:
    code: str | None = None  # path prefix of .alist/.profile; None means the rate-1/2 fixture
    rates: tuple[float, ...] = (0.5,)
    ebn0_grid_db: tuple[float, ...] = (1.0, 1.5, 2.0)
    min_frame_errors: int = 100
    max_frames: int = 10**7
    seed: int = 0
    max_iters: int = DEFAULT_MAX_ITERS
    batch_size: int = 64
    workers: int = 1

    def __post_init__(self):
        if self.min_frame_errors < 1 or self.max_frames < 1 or self.batch_size < 1:
            raise ValueError("stop rule and batch size must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        if not self.rates:
            raise ValueError("rate ladder is empty")


@dataclass(frozen=True)
class SimRecord:
    rate: float
    ebn0_db: float
    frames: int
    bit_errors: int
    frame_errors: int
    ber: float
    fer: float
    mean_iterations: float


def noise_variance(ebn0_db: float, rate: float) -> float:
    """``1 / (2 R 10^(Eb/N0 / 10))`` with Eb counted at the transmitted rate."""
    if not 0 < rate <= 1:
        raise ValueError(f"rate must lie in (0, 1], got {rate}")
    if math.isinf(ebn0_db) and ebn0_db > 0:
        return 0.0
    return 1.0 / (2.0 * rate * 10.0 ** (ebn0_db / 10.0))


def transmitted_positions(n: int, punctured: Iterable[int]) -> np.ndarray:
    keep = np.ones(n, dtype=bool)
    keep[list(punctured)] = False
    return np.flatnonzero(keep)


def awgn_transmit(c, punctured: Iterable[int], variance: float, rng: np.random.Generator) -> np.ndarray:
    """BPSK (0 -> +1, 1 -> -1) plus Gaussian noise, over unpunctured positions only.

    ``c`` may be one codeword or a (frames, N) batch.
    """
    if variance < 0:
        raise ValueError("noise variance must be nonnegative")
    c = np.asarray(c, dtype=np.uint8)
    pos = transmitted_positions(c.shape[-1], punctured)
    x = 1.0 - 2.0 * c[..., pos]
    if variance == 0:
        return x
    return x + rng.normal(0.0, math.sqrt(variance), size=x.shape)


def receiver_llr(y: np.ndarray, n: int, punctured: Iterable[int], variance: float) -> np.ndarray:
    """Full-length LLRs with 0 at punctured positions; a noiseless channel saturates at the clamp."""
    y = np.atleast_2d(y)
    pos = transmitted_positions(n, punctured)
    llr = np.zeros((y.shape[0], n))
    if variance == 0:
        llr[:, pos] = np.sign(y) * LLR_CLAMP
    else:
        llr[:, pos] = 2.0 * y / variance
    return llr


# -- sweep ------------------------------------------------------------

_WORKER_STATE: dict = {}


def _init_worker(code: E2rcCode):
    _WORKER_STATE["code"] = code
    _WORKER_STATE["decoder"] = BpDecoder(code.h)


def _run_batch(args) -> tuple[int, int, int, int]:
    """One batch.  Returns (frames, bit_errors, frame_errors, iteration_sum)."""
    seed, key, frames, punctured, variance, max_iters = args
    code: E2rcCode = _WORKER_STATE["code"]
    decoder: BpDecoder = _WORKER_STATE["decoder"]
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))
    m = rng.integers(0, 2, size=(frames, code.K), dtype=np.uint8)
    c = code.encode(m)
    y = awgn_transmit(c, punctured, variance, rng)
    llr = receiver_llr(y, code.N, punctured, variance)
    hard, iters, _ = decoder.decode_batch(llr, max_iters)
    wrong = hard[:, : code.K] != m
    per_frame = wrong.sum(axis=1)
    return frames, int(per_frame.sum()), int(np.count_nonzero(per_frame)), int(iters.sum())


def _grid_point(cfg: SimConfig, code: E2rcCode, key: tuple[int, int], punctured, variance, pool) -> tuple:
    frames = bit_errors = frame_errors = iter_sum = 0
    batch_idx = 0
    while frame_errors < cfg.min_frame_errors and frames < cfg.max_frames:
        jobs = []
        planned = frames
        for _ in range(cfg.workers):
            size = min(cfg.batch_size, cfg.max_frames - planned)
            if size <= 0:
                break
            jobs.append((cfg.seed, key + (batch_idx,), size, punctured, variance, cfg.max_iters))
            planned += size
            batch_idx += 1
        results = pool.map(_run_batch, jobs) if pool is not None else map(_run_batch, jobs)
        for f, b, fe, it in results:
            # stop rule in batch order; later batches of this round are dropped
            if frame_errors >= cfg.min_frame_errors or frames >= cfg.max_frames:
                break
            frames += f
            bit_errors += b
            frame_errors += fe
            iter_sum += it
    return frames, bit_errors, frame_errors, iter_sum


def run_ber_sweep(cfg: SimConfig, code: E2rcCode | None = None) -> list[SimRecord]:
    """One record per (rate, Eb/N0) pair, rates outermost."""
    if code is None:
        code = E2rcCode.load(cfg.code) if cfg.code is not None else rate_half_code()
    schedule = puncture_schedule(code.profile)
    lo, hi = schedule.mother_rate, schedule.max_rate
    for r in cfg.rates:
        if not lo - _RATE_EPS <= r <= hi + _RATE_EPS:
            raise ValueError(f"rate {r} is outside the achievable range [{lo:.6f}, {hi:.6f}]")
    if not cfg.ebn0_grid_db:
        return []

    pool = None
    if cfg.workers > 1:
        pool = ProcessPoolExecutor(cfg.workers, initializer=_init_worker, initargs=(code,))
    else:
        _init_worker(code)
    records = []
    try:
        for ri, rate in enumerate(cfg.rates):
            punctured = apply_puncturing(schedule, rate)
            realized = schedule.realized_rate(len(punctured))
            for gi, ebn0 in enumerate(cfg.ebn0_grid_db):
                variance = noise_variance(ebn0, realized)
                f, b, fe, it = _grid_point(cfg, code, (ri, gi), punctured, variance, pool)
                records.append(
                    SimRecord(realized, float(ebn0), f, b, fe, b / (f * code.K), fe / f, it / f)
                )
    finally:
        if pool is not None:
            pool.shutdown()
    return records


# -- output -----------------------------------------------------------


def csv_text(records: Sequence[SimRecord], max_iters: int = DEFAULT_MAX_ITERS) -> str:
    buf = io.StringIO()
    buf.write(
        "# Eb/N0 is per information bit at the transmitted (punctured) rate R_p: "
        "sigma^2 = 1/(2 R_p 10^(EbN0/10)); BPSK 0->+1; "
        f"flooding sum-product, max_iters={max_iters}\n"
    )
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow([
            f"{r.rate:.6f}", f"{r.ebn0_db:.4f}", r.frames, r.bit_errors, r.frame_errors,
            f"{r.ber:.6e}", f"{r.fer:.6e}", f"{r.mean_iterations:.4f}",
        ])
    return buf.getvalue()


def write_csv(records: Sequence[SimRecord], path: str | Path, max_iters: int = DEFAULT_MAX_ITERS) -> None:
    Path(path).write_text(csv_text(records, max_iters))


def read_csv(path: str | Path) -> list[SimRecord]:
    lines = [ln for ln in Path(path).read_text().splitlines() if not ln.startswith("#")]
    out = []
    for row in csv.DictReader(lines):
        out.append(SimRecord(
            float(row["rate"]), float(row["ebn0_db"]), int(row["frames"]), int(row["bit_errors"]),
            int(row["frame_errors"]), float(row["ber"]), float(row["fer"]), float(row["mean_iterations"]),
        ))
    return out


def required_ebn0(records: Sequence[SimRecord], target_ber: float) -> float:
    """Eb/N0 where the BER curve first crosses ``target_ber`` (log-linear interpolation).

    Returns ``inf`` if the curve never reaches the target.
    """
    pts = sorted((r.ebn0_db, r.ber) for r in records)
    for (x0, b0), (x1, b1) in zip(pts, pts[1:]):
        if b0 > target_ber >= b1:
            if b1 <= 0:
                return x1
            t = (math.log10(b0) - math.log10(target_ber)) / (math.log10(b0) - math.log10(b1))
            return x0 + t * (x1 - x0)
    if pts and pts[0][1] <= target_ber:
        return pts[0][0]
    return math.inf
