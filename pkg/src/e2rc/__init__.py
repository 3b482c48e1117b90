"""Rate-compatible LDPC codes whose weight-two parity columns are all recoverable under puncturing."""

from .codes import RATE_04, RATE_HALF, E2rcCode, build_code, rate_04_code, rate_half_code
from .construct import E2rcProfile, build_h2, compute_profile, ksr_column, verify_h2
from .decoder import BpDecoder, LlrFrame, bp_decode, llr_from_awgn, peel_erasures
from .encoder import (
    build_encode_plan,
    encode_back_substitution,
    encode_by_erasure,
    encode_sliding_window,
    encode_with_plan,
    window_coefficients,
)
from .matrix import BitMatrix, DegreeDistribution, from_alist, mod2_syndrome, to_alist
from .peg import ConstructionTarget, assign_column_degrees, audit_4cycles, peg_build
from .puncture import apply_puncturing, classify_sr, max_rate, puncture_count, puncture_schedule
from .simulate import SimConfig, SimRecord, noise_variance, run_ber_sweep

__all__ = [
    "RATE_04", "RATE_HALF", "E2rcCode", "build_code", "rate_04_code", "rate_half_code",
    "E2rcProfile", "build_h2", "compute_profile", "ksr_column", "verify_h2",
    "BpDecoder", "LlrFrame", "bp_decode", "llr_from_awgn", "peel_erasures",
    "build_encode_plan", "encode_back_substitution", "encode_by_erasure",
    "encode_sliding_window", "encode_with_plan", "window_coefficients",
    "BitMatrix", "DegreeDistribution", "from_alist", "mod2_syndrome", "to_alist",
    "ConstructionTarget", "assign_column_degrees", "audit_4cycles", "peg_build",
    "apply_puncturing", "classify_sr", "max_rate", "puncture_count", "puncture_schedule",
    "SimConfig", "SimRecord", "noise_variance", "run_ber_sweep",
]
