"""Erasure peeling and sum-product decoding on a Tanner graph."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .matrix import BitMatrix

ERASED = -1
SR_INFINITY = np.iinfo(np.int64).max
LLR_CLAMP = 30.0
DEFAULT_MAX_ITERS = 80


class ErasureContradiction(ValueError):
    """A check whose neighbors are all known has odd parity."""

    def __init__(self, check: int):
        super().__init__(f"check {check} is unsatisfied by the known bits")
        self.check = check


@dataclass
class PeelResult:
    bits: np.ndarray
    iterations: int
    steps: np.ndarray

    @property
    def complete(self) -> bool:
        return not np.any(self.bits == ERASED)


def peel_erasures(h: BitMatrix, known) -> PeelResult:
    """Flooding erasure decoder.

    ``known`` holds 0/1 for known bits and ``ERASED`` (-1) for erasures.  In
    each iteration every check with exactly one erased neighbor resolves it;
    ``steps[v]`` records the iteration in which ``v`` was recovered (0 for
    initially known bits, ``SR_INFINITY`` for bits never recovered).
    """
    bits = np.array(known, dtype=np.int8)
    if bits.shape != (h.num_cols,):
        raise ValueError(f"expected {h.num_cols} bits, got shape {bits.shape}")
    if np.any((bits != 0) & (bits != 1) & (bits != ERASED)):
        raise ValueError("bits must be 0, 1 or ERASED")

    erased = bits == ERASED
    steps = np.where(erased, SR_INFINITY, 0).astype(np.int64)
    count = np.zeros(h.num_rows, dtype=np.int64)
    parity = np.zeros(h.num_rows, dtype=np.int8)
    for r, cols in enumerate(h.row_support):
        for c in cols:
            if erased[c]:
                count[r] += 1
            else:
                parity[r] ^= bits[c]
    bad = np.flatnonzero((count == 0) & (parity == 1))
    if bad.size:
        raise ErasureContradiction(int(bad[0]))

    ready = [int(r) for r in np.flatnonzero(count == 1)]
    iteration = 0
    while ready:
        iteration += 1
        recovered: dict[int, int] = {}
        for r in ready:
            v = next(c for c in h.row_support[r] if bits[c] == ERASED)
            val = int(parity[r])
            if recovered.setdefault(v, val) != val:
                raise ErasureContradiction(r)
        touched = set()
        for v, val in recovered.items():
            bits[v] = val
            steps[v] = iteration
            for r in h.col_support[v]:
                count[r] -= 1
                parity[r] ^= val
                touched.add(r)
        ready = []
        for r in sorted(touched):
            if count[r] == 1:
                ready.append(r)
            elif count[r] == 0 and parity[r]:
                raise ErasureContradiction(r)
    return PeelResult(bits, iteration, steps)


# -- sum-product ------------------------------------------------------


@dataclass
class LlrFrame:
    llr: np.ndarray
    punctured_mask: np.ndarray

    def __post_init__(self):
        self.llr = np.asarray(self.llr, dtype=np.float64)
        self.punctured_mask = np.asarray(self.punctured_mask, dtype=bool)
        if self.llr.shape != self.punctured_mask.shape:
            raise ValueError("llr and punctured_mask lengths differ")
        if not np.all(np.isfinite(self.llr)):
            raise ValueError("llr values must be finite")
        if np.any(self.llr[self.punctured_mask] != 0):
            raise ValueError("punctured positions must carry llr 0")


@dataclass
class DecodeResult:
    hard_bits: np.ndarray
    iterations_used: int
    converged: bool


def llr_from_awgn(received, noise_variance: float, punctured_mask=None) -> LlrFrame:
    """Channel LLRs ``2 y / sigma^2`` for BPSK (0 -> +1); punctured positions get 0."""
    if not noise_variance > 0:
        raise ValueError(f"noise variance must be positive, got {noise_variance}")
    y = np.asarray(received, dtype=np.float64)
    mask = np.zeros(y.shape, dtype=bool) if punctured_mask is None else np.asarray(punctured_mask, bool)
    llr = np.where(mask, 0.0, 2.0 * y / noise_variance)
    return LlrFrame(llr, mask)


class BpDecoder:
    """Flooding sum-product decoder bound to one parity-check matrix.

    Check updates use the tanh rule with exclusive products taken from
    prefix/suffix products over a padded per-check edge table, so zero
    (punctured) inputs are handled exactly.
    """

    def __init__(self, h: BitMatrix):
        self.h = h
        rows, cols = h.edges()
        self.edge_col = cols
        num_edges = len(cols)
        row_deg = h.row_degrees()
        width = int(row_deg.max()) if h.num_rows else 0
        # padded table of edge ids per check; pad points at a dummy slot holding 1.0
        table = np.full((h.num_rows, max(width, 1)), num_edges, dtype=np.int64)
        starts = np.concatenate([[0], np.cumsum(row_deg)[:-1]])
        slot = np.arange(num_edges) - starts[rows]
        table[rows, slot] = np.arange(num_edges)
        self.table = table
        self.slot_rows = rows
        self.slot_pos = slot
        self.var_sum = sp.csr_matrix(
            (np.ones(num_edges), (np.arange(num_edges), cols)), shape=(num_edges, h.num_cols)
        )
        self.check = h.csr

    def decode(self, frame: LlrFrame | np.ndarray, max_iters: int = DEFAULT_MAX_ITERS) -> DecodeResult:
        llr = frame.llr if isinstance(frame, LlrFrame) else np.asarray(frame, dtype=np.float64)
        hard, iters, conv = self.decode_batch(llr[None, :], max_iters)
        return DecodeResult(hard[0], int(iters[0]), bool(conv[0]))

    def decode_batch(self, llr, max_iters: int = DEFAULT_MAX_ITERS):
        """Decode a (frames, N) LLR array.  Returns (hard bits, iterations, converged)."""
        if max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        llr = np.clip(np.asarray(llr, dtype=np.float64), -LLR_CLAMP, LLR_CLAMP)
        if llr.ndim != 2 or llr.shape[1] != self.h.num_cols:
            raise ValueError(f"expected LLR array of shape (frames, {self.h.num_cols})")
        frames = llr.shape[0]
        hard_out = (llr < 0).astype(np.uint8)
        iters_out = np.full(frames, max_iters, dtype=np.int64)
        conv_out = np.zeros(frames, dtype=bool)

        active = np.arange(frames)
        chan = llr
        v2c = chan[:, self.edge_col]
        for it in range(1, max_iters + 1):
            c2v = self._check_update(v2c)
            post = chan + c2v @ self.var_sum
            hard = (post < 0).astype(np.uint8)
            synd = (self.check @ hard.T.astype(np.int32)) % 2
            done = ~synd.any(axis=0)
            if it == max_iters:
                done[:] = True
            if done.any():
                idx = active[done]
                hard_out[idx] = hard[done]
                iters_out[idx] = it
                conv_out[idx] = ~synd[:, done].any(axis=0)
                keep = ~done
                active, chan, post, c2v = active[keep], chan[keep], post[keep], c2v[keep]
                if active.size == 0:
                    break
            v2c = np.clip(post[:, self.edge_col] - c2v, -LLR_CLAMP, LLR_CLAMP)
        return hard_out, iters_out, conv_out

    def _check_update(self, v2c: np.ndarray) -> np.ndarray:
        frames = v2c.shape[0]
        t = np.ones((frames, v2c.shape[1] + 1))
        t[:, :-1] = np.tanh(v2c / 2.0)
        g = t[:, self.table]  # (frames, rows, width)
        prefix = np.ones_like(g)
        suffix = np.ones_like(g)
        np.cumprod(g[:, :, :-1], axis=2, out=prefix[:, :, 1:])
        np.cumprod(g[:, :, :0:-1], axis=2, out=suffix[:, :, -2::-1])
        excl = (prefix * suffix)[:, self.slot_rows, self.slot_pos]
        excl = np.clip(excl, -1.0 + 1e-15, 1.0 - 1e-15)
        return np.clip(2.0 * np.arctanh(excl), -LLR_CLAMP, LLR_CLAMP)


@lru_cache(maxsize=8)
def _decoder_for(h: BitMatrix) -> BpDecoder:
    return BpDecoder(h)


def bp_decode(h: BitMatrix, frame: LlrFrame, max_iters: int = DEFAULT_MAX_ITERS) -> DecodeResult:
    """Sum-product decoding of one frame (flooding schedule, early exit on zero syndrome)."""
    if frame.llr.shape != (h.num_cols,):
        raise ValueError(f"frame length {frame.llr.shape} does not match {h.num_cols} columns")
    return _decoder_for(h).decode(frame, max_iters)
