"""Linear-time encoders for H = [H1 | H2] with codewords laid out as [m | p].

Four routes to the parity bits, all solving ``H2 p = H1 m``:

* row-by-row back-substitution on a unit lower-triangular H2,
* a ``gamma(1)``-cell shift register with time-varying taps,
* erasure decoding with the message known and every parity erased,
* a precomputed plan (triangular sweep plus a small dense solve) that also
  covers the low-rate H2 = [L | T].

Bit vectors are uint8 arrays; 2-D inputs are batches of shape (frames, len).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import gf2
from .construct import E2rcProfile
from .decoder import ERASED, peel_erasures
from .matrix import BitMatrix, mod2_syndrome


class EncodingError(ValueError):
    pass


def _as_batch(v, length: int, what: str) -> tuple[np.ndarray, bool]:
    a = np.asarray(v, dtype=np.uint8)
    single = a.ndim == 1
    a = np.atleast_2d(a)
    if a.ndim != 2 or a.shape[1] != length:
        raise ValueError(f"{what} must have length {length}, got shape {np.shape(v)}")
    return a, single


def syndrome_target(h1: BitMatrix, m) -> np.ndarray:
    """``s = H1 m`` over GF(2)."""
    if np.shape(m)[-1] != h1.num_cols:
        raise ValueError(f"message length {np.shape(m)[-1]} does not match K = {h1.num_cols}")
    return mod2_syndrome(h1, m)


# -- back-substitution ------------------------------------------------


def _lower_rows(h2: BitMatrix) -> list[tuple[int, ...]]:
    if h2.num_rows != h2.num_cols:
        raise EncodingError(f"H2 must be square, got {h2.shape}")
    for c, rows in enumerate(h2.col_support):
        if not rows or rows[0] != c:
            raise EncodingError(f"H2 is not unit lower triangular (column {c})")
    return [tuple(c for c in cols if c != r) for r, cols in enumerate(h2.row_support)]


def triangular_sweep(rows: list[tuple[int, ...]], s: np.ndarray) -> np.ndarray:
    """Solve a unit lower-triangular system; ``s`` has shape (rows, frames)."""
    p = np.empty_like(s)
    for i, prev in enumerate(rows):
        if prev:
            p[i] = s[i] ^ np.bitwise_xor.reduce(p[list(prev)], axis=0)
        else:
            p[i] = s[i]
    return p


def encode_back_substitution(h2: BitMatrix, s) -> np.ndarray:
    """``p_i = s_i + sum_{j<i} h_ij p_j`` in row order."""
    rows = _lower_rows(h2)
    sb, single = _as_batch(s, h2.num_rows, "syndrome")
    p = triangular_sweep(rows, sb.T.copy()).T
    return p[0] if single else p


# -- sliding window ---------------------------------------------------


@dataclass(frozen=True)
class WindowCoefficients:
    """Taps ``g_0 .. g_{w-1}`` of the division circuit at row time ``t``.

    ``g[i]`` multiplies the parity bit ``p_{t-w+i}``.
    """

    g: np.ndarray
    t: int


def _step(x: int) -> int:
    return 1 if x >= 0 else 0


def _kron(x: int) -> int:
    return 1 if x == 0 else 0


def _tap(profile: E2rcProfile, i: int, t: int) -> int:
    p = profile
    d, g1, S = p.d, p.gamma[0], p.S
    total = 0
    for k in range(1, d + 1):
        gk = p.gamma[k - 1]
        if _kron(i - g1 + gk):
            total += _step(t - S[k]) - _kron(gk + S[k] - S[d]) * _step(t - S[d])
    return total


def window_coefficients(profile: E2rcProfile, t: int) -> WindowCoefficients:
    """Evaluate the tap-timing formula at every window position for row time ``t``."""
    if not profile.is_full:
        raise EncodingError("sliding-window coefficients need the full regime")
    if not 0 <= t < profile.M:
        raise ValueError(f"t must lie in [0, {profile.M - 1}]")
    g = np.array([_tap(profile, i, t) for i in range(profile.window)], dtype=np.int64)
    if np.any((g != 0) & (g != 1)):
        raise EncodingError(f"tap formula left the binary range at t={t}: {g}")
    return WindowCoefficients(g.astype(np.uint8), t)


@lru_cache(maxsize=32)
def _tap_schedule(profile: E2rcProfile) -> tuple[tuple[int, ...], ...]:
    # g_i can be nonzero only at i = gamma(1) - gamma(k)
    candidates = sorted({profile.gamma[0] - g for g in profile.gamma})
    return tuple(
        tuple(i for i in candidates if _tap(profile, i, t)) for t in range(profile.M)
    )


class ShiftRegisterEncoder:
    """Division circuit with ``gamma(1)`` one-bit cells per frame.

    Cells are a ring buffer: the cell at ``t % w`` holds ``p_{t-w}`` until it
    is overwritten by ``p_t``.
    """

    def __init__(self, profile: E2rcProfile, frames: int = 1):
        if not profile.is_full:
            raise EncodingError("sliding-window encoding needs the full regime")
        self.profile = profile
        self.window = profile.window
        self.cells = np.zeros((self.window, frames), dtype=np.uint8)
        self.schedule = _tap_schedule(profile)

    def run(self, s: np.ndarray) -> np.ndarray:
        """``s`` has shape (M, frames); returns parities of the same shape."""
        w = self.window
        cells = self.cells
        out = np.empty_like(s)
        for t, taps in enumerate(self.schedule):
            bit = s[t].copy()
            for i in taps:
                bit ^= cells[(t + i) % w]
            cells[t % w] = bit
            out[t] = bit
        return out


def encode_sliding_window(profile: E2rcProfile, s) -> np.ndarray:
    sb, single = _as_batch(s, profile.M, "syndrome")
    reg = ShiftRegisterEncoder(profile, frames=sb.shape[0])
    p = reg.run(sb.T.copy()).T
    return p[0] if single else p


# -- erasure decoder as encoder ---------------------------------------


def encode_by_erasure(h: BitMatrix, profile: E2rcProfile, m) -> tuple[np.ndarray, int]:
    """Recover all parities by peeling with the message known.  Returns (p, iterations)."""
    if not profile.is_full:
        raise EncodingError("erasure-based encoding needs the full regime")
    m = np.asarray(m, dtype=np.int8)
    if m.shape != (profile.K,):
        raise ValueError(f"message must have length {profile.K}")
    known = np.concatenate([m, np.full(profile.M, ERASED, dtype=np.int8)])
    res = peel_erasures(h, known)
    if not res.complete:
        missing = np.flatnonzero(res.bits == ERASED)
        raise EncodingError(f"erasure encoder stalled with {missing.size} parities unresolved")
    return res.bits[profile.K:].astype(np.uint8), res.iterations


# -- general plan -----------------------------------------------------


@dataclass(frozen=True)
class EncodePlan:
    """Offline data for solving ``[L | T] p = s`` with T unit lower triangular on top.

    ``l`` leading columns form L.  Online cost: two triangular sweeps over T
    plus one dense ``l x l`` product.
    """

    size: int
    l: int  # noqa: E741
    top_rows: tuple[tuple[int, ...], ...]  # per row r < size-l: earlier T columns (T-relative)
    bottom_rows: tuple[tuple[int, ...], ...]  # per row r >= size-l: T columns (T-relative)
    l_rows: tuple[tuple[int, ...], ...]  # per top row: L columns present
    phi_inv: np.ndarray  # (l, l) over GF(2)


def trailing_triangular_offset(h2: BitMatrix) -> int:
    n = h2.num_cols
    offsets = [c - rows[0] if rows else None for c, rows in enumerate(h2.col_support)]
    l = offsets[-1] if offsets and offsets[-1] is not None else n
    if l < 0 or l > n or any(o != l for o in offsets[l:]):
        return n
    return l


def build_encode_plan(h2: BitMatrix) -> EncodePlan:
    """Precompute the elimination schedule for a square, invertible H2."""
    n = h2.num_rows
    if h2.num_cols != n:
        raise EncodingError(f"H2 must be square, got {h2.shape}")
    l = trailing_triangular_offset(h2)
    nt = n - l
    top_rows, l_rows, bottom_rows = [], [], []
    for r, cols in enumerate(h2.row_support):
        t_cols = tuple(c - l for c in cols if c >= l)
        if r < nt:
            top_rows.append(tuple(c for c in t_cols if c != r))
            l_rows.append(tuple(c for c in cols if c < l))
        else:
            bottom_rows.append(t_cols)

    # phi = L_bot + T_bot * T_top^{-1} * L_top, column by column
    phi = np.zeros((l, l), dtype=np.uint8)
    if l:
        l_top = np.zeros((nt, l), dtype=np.uint8)
        for r, cs in enumerate(l_rows):
            l_top[r, list(cs)] = 1
        x = triangular_sweep(top_rows, l_top)
        for i, cs in enumerate(bottom_rows):
            acc = np.zeros(l, dtype=np.uint8)
            for c in cs:
                acc ^= x[c]
            phi[i] = acc
        for c in range(l):
            for r in h2.col_support[c]:
                if r >= nt:
                    phi[r - nt, c] ^= 1
    try:
        phi_inv = gf2.inverse(phi)
    except gf2.SingularMatrixError:
        witness = gf2.dependent_rows(h2.to_dense())
        raise gf2.SingularMatrixError(
            f"H2 is singular over GF(2); rows {witness} sum to zero", witness
        ) from None
    return EncodePlan(n, l, tuple(top_rows), tuple(bottom_rows), tuple(l_rows), phi_inv)


def encode_with_plan(plan: EncodePlan, s) -> np.ndarray:
    sb, single = _as_batch(s, plan.size, "syndrome")
    s_t = sb.T.copy()
    nt = plan.size - plan.l
    top = s_t[:nt]
    if plan.l:
        x = triangular_sweep(plan.top_rows, top)
        resid = s_t[nt:].copy()
        for i, cs in enumerate(plan.bottom_rows):
            for c in cs:
                resid[i] ^= x[c]
        p_l = (plan.phi_inv.astype(np.int64) @ resid) % 2
        p_l = p_l.astype(np.uint8)
        rhs = top.copy()
        for r, cs in enumerate(plan.l_rows):
            for c in cs:
                rhs[r] ^= p_l[c]
        p_t = triangular_sweep(plan.top_rows, rhs)
        p = np.concatenate([p_l, p_t])
    else:
        p = triangular_sweep(plan.top_rows, top)
    p = p.T
    return p[0] if single else p
