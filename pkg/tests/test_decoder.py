from __future__ import annotations

import numpy as np
import pytest

from e2rc.decoder import (
    ERASED,
    LLR_CLAMP,
    SR_INFINITY,
    BpDecoder,
    ErasureContradiction,
    LlrFrame,
    bp_decode,
    llr_from_awgn,
    peel_erasures,
)
from e2rc.matrix import BitMatrix
from e2rc.puncture import classify_sr, puncture_schedule

from oracles import min_distance_codewords


def saturated(c, punctured=()):
    llr = LLR_CLAMP * (1.0 - 2.0 * np.asarray(c, dtype=float))
    mask = np.zeros(len(llr), dtype=bool)
    mask[list(punctured)] = True
    llr[mask] = 0.0
    return LlrFrame(llr, mask)


# -- peeling ----------------------------------------------------------


def test_peel_m7_steps(code7, rng):
    m = rng.integers(0, 2, 3)
    c = code7.encode(m)
    known = np.concatenate([m, np.full(7, ERASED)])
    res = peel_erasures(code7.h, known)
    assert res.complete and res.iterations == 4
    assert list(res.steps[3:]) == [1, 1, 1, 2, 2, 3, 4]
    assert np.array_equal(res.bits, c)


def test_peel_stall_marks_infinity():
    h = BitMatrix.from_dense([[1, 1, 1]])
    res = peel_erasures(h, [0, ERASED, ERASED])
    assert not res.complete and res.iterations == 0
    assert (res.steps[1:] == SR_INFINITY).all()


def test_peel_contradiction():
    h = BitMatrix.from_dense([[1, 1, 0], [0, 1, 1]])
    with pytest.raises(ErasureContradiction):
        peel_erasures(h, [1, 0, 0])
    # two checks force different values on the same bit
    h = BitMatrix.from_dense([[1, 1, 0], [0, 1, 1]])
    with pytest.raises(ErasureContradiction):
        peel_erasures(h, [1, ERASED, 0])


def test_peel_input_validation():
    h = BitMatrix.from_dense([[1, 1]])
    with pytest.raises(ValueError):
        peel_erasures(h, [0, 2])
    with pytest.raises(ValueError):
        peel_erasures(h, [0])


def test_peel_steps_agree_with_classifier(code600):
    order = puncture_schedule(code600.profile).order
    known = np.zeros(code600.N, dtype=np.int8)
    known[list(order)] = ERASED
    res = peel_erasures(code600.h, known)
    sr = classify_sr(code600.h, order)
    assert np.array_equal(res.steps, sr.level)


# -- frames -----------------------------------------------------------


def test_llr_frame_validation():
    with pytest.raises(ValueError):
        LlrFrame(np.array([1.0, np.nan]), np.zeros(2, bool))
    with pytest.raises(ValueError):
        LlrFrame(np.array([1.0, 2.0]), np.array([False, True]))
    with pytest.raises(ValueError):
        LlrFrame(np.zeros(2), np.zeros(3, bool))


def test_llr_from_awgn():
    f = llr_from_awgn([0.5, -1.0, 2.0], 0.5, [False, False, True])
    assert list(f.llr) == [2.0, -4.0, 0.0]
    with pytest.raises(ValueError):
        llr_from_awgn([1.0], 0.0)


# -- sum-product ------------------------------------------------------


def test_saturated_all_zero_one_iteration(code600):
    res = bp_decode(code600.h, saturated(np.zeros(code600.N)))
    assert res.converged and res.iterations_used == 1
    assert not res.hard_bits.any()


@pytest.mark.parametrize("fixture", ["code7", "code8"])
def test_single_flip_corrected(fixture, request, rng):
    code = request.getfixturevalue(fixture)
    dense = code.h.to_dense()
    # minimum distance >= 3 so one flip is uniquely decodable
    assert not list(min_distance_codewords(dense, 2))
    c = code.encode(rng.integers(0, 2, code.K))
    for pos in range(code.N):
        llr = 20.0 * (1.0 - 2.0 * c)
        llr[pos] = -llr[pos]
        res = BpDecoder(code.h).decode(llr)
        assert res.converged and np.array_equal(res.hard_bits, c), pos


def test_single_flip_at_clamp(code7, rng):
    """At the clamp magnitude a flipped bit is fixed unless its only check
    cannot outvote the channel (the degree-one parity)."""
    c = code7.encode(rng.integers(0, 2, 3))
    degree = code7.h.column_degrees()
    for pos in np.flatnonzero(degree >= 2):
        f = saturated(c)
        f.llr[pos] = -f.llr[pos]
        res = bp_decode(code7.h, f)
        assert res.converged and np.array_equal(res.hard_bits, c), pos


def test_codeword_symmetry(code600, rng):
    dec = BpDecoder(code600.h)
    c = code600.encode(rng.integers(0, 2, 600))
    y = 1.0 + rng.normal(0, 0.8, code600.N)
    llr = 2 * y / 0.64
    base = dec.decode(llr, 30)
    flipped = dec.decode(llr * (1.0 - 2.0 * c), 30)
    assert np.array_equal(flipped.hard_bits, base.hard_bits ^ c)
    assert flipped.iterations_used == base.iterations_used


def test_zero_noise_matches_peeling(code600, rng):
    order = puncture_schedule(code600.profile).order
    c = code600.encode(rng.integers(0, 2, 600))
    known = c.astype(np.int8)
    known[list(order)] = ERASED
    peel = peel_erasures(code600.h, known)
    res = bp_decode(code600.h, saturated(c, order))
    assert res.converged and np.array_equal(res.hard_bits, peel.bits)
    assert res.iterations_used <= peel.iterations


def test_batch_matches_single(code8, rng):
    dec = BpDecoder(code8.h)
    llr = rng.normal(1.0, 1.5, (6, code8.N))
    hard, iters, conv = dec.decode_batch(llr, 20)
    for i in range(6):
        r = dec.decode(llr[i], 20)
        assert np.array_equal(r.hard_bits, hard[i])
        assert r.iterations_used == iters[i] and r.converged == conv[i]


def test_non_convergence_reports_cap(code8):
    llr = np.zeros(code8.N)
    llr[0] = -5.0  # every other bit is unknown, so no check can answer
    res = BpDecoder(code8.h).decode(llr, 3)
    assert not res.converged and res.iterations_used == 3
    assert res.hard_bits[0] == 1


def test_iteration_cap_validation(code8):
    with pytest.raises(ValueError):
        BpDecoder(code8.h).decode(np.zeros(code8.N), 0)
    with pytest.raises(ValueError):
        bp_decode(code8.h, saturated(np.zeros(5)))
