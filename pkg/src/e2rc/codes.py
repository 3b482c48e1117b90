"""A constructed code: H, its profile and the encoders that apply to it.

On disk a code is two files sharing a prefix: ``PREFIX.alist`` (full H) and
``PREFIX.profile`` (key-value profile text).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .construct import E2rcProfile, build_h2, compute_profile
from .encoder import (
    EncodePlan,
    build_encode_plan,
    encode_back_substitution,
    encode_by_erasure,
    encode_sliding_window,
    encode_with_plan,
    syndrome_target,
)
from .matrix import BitMatrix, DegreeDistribution, from_alist, mod2_syndrome, to_alist
from .peg import ConstructionTarget, assign_column_degrees, peg_build

ENCODE_METHODS = ("backsub", "window", "erasure", "plan")

# edge-perspective fixtures for the two reference mother codes
RATE_HALF = DegreeDistribution.normalized(
    {1: 0.00025, 2: 0.30199, 3: 0.27073, 7: 0.42702},
    {6: 0.40685, 7: 0.55054, 8: 0.01815, 9: 0.01361, 10: 0.00504, 11: 0.00278, 12: 0.00303},
)
RATE_04 = DegreeDistribution.normalized({2: 0.29472, 3: 0.25667, 10: 0.44861}, {6: 1.0})


@dataclass(frozen=True)
class E2rcCode:
    h: BitMatrix
    profile: E2rcProfile

    def __post_init__(self):
        p = self.profile
        if self.h.shape != (p.M, p.N):
            raise ValueError(f"H has shape {self.h.shape}, profile expects {(p.M, p.N)}")

    @property
    def K(self) -> int:
        return self.profile.K

    @property
    def N(self) -> int:
        return self.profile.N

    @property
    def M(self) -> int:
        return self.profile.M

    @cached_property
    def h1(self) -> BitMatrix:
        return self.h.select_columns(range(self.K))

    @cached_property
    def h2(self) -> BitMatrix:
        return self.h.select_columns(range(self.K, self.N))

    @cached_property
    def plan(self) -> EncodePlan:
        return build_encode_plan(self.h2)

    def available_methods(self) -> tuple[str, ...]:
        if self.profile.is_full:
            return ENCODE_METHODS
        return ("plan",)

    def encode(self, m, method: str = "plan") -> np.ndarray:
        """Codewords ``[m | p]`` for one message or a (frames, K) batch."""
        if method not in ENCODE_METHODS:
            raise ValueError(f"unknown method {method!r}; choose from {ENCODE_METHODS}")
        if method not in self.available_methods():
            raise ValueError(f"method {method!r} needs the full regime")
        m = np.asarray(m, dtype=np.uint8)
        batch = np.atleast_2d(m)
        if batch.ndim != 2 or batch.shape[1] != self.K:
            raise ValueError(f"message length must be {self.K}, got shape {m.shape}")
        if method == "erasure":
            p = np.stack([encode_by_erasure(self.h, self.profile, row)[0] for row in batch])
        else:
            s = syndrome_target(self.h1, batch)
            if method == "backsub":
                p = encode_back_substitution(self.h2, s)
            elif method == "window":
                p = encode_sliding_window(self.profile, s)
            else:
                p = encode_with_plan(self.plan, s)
        c = np.concatenate([batch, np.atleast_2d(p)], axis=1).astype(np.uint8)
        return c[0] if m.ndim == 1 else c

    def is_codeword(self, c) -> bool:
        return not np.any(mod2_syndrome(self.h, c))

    def save(self, prefix: str | Path) -> tuple[Path, Path]:
        prefix = Path(prefix)
        alist, prof = prefix.with_name(prefix.name + ".alist"), prefix.with_name(prefix.name + ".profile")
        alist.write_text(to_alist(self.h))
        prof.write_text(self.profile.to_text())
        return alist, prof

    @classmethod
    def load(cls, prefix: str | Path) -> E2rcCode:
        prefix = Path(prefix)
        h = from_alist(prefix.with_name(prefix.name + ".alist").read_text())
        profile = E2rcProfile.from_text(prefix.with_name(prefix.name + ".profile").read_text())
        return cls(h, profile)


def build_code(
    M: int,
    K: int,
    nv2: int | None = None,
    dist: DegreeDistribution | None = None,
    seed: int = 0,
    girth_floor: int = 6,
    match_check_degrees: bool = False,
) -> E2rcCode:
    """Construct H2 from the profile, then grow H1 (and L) by PEG.

    Without a distribution every free column gets degree 3.
    """
    nv2 = M - 1 if nv2 is None else nv2
    profile = compute_profile(M, nv2, K)
    h2 = build_h2(profile)
    if dist is None:
        degrees = (3,) * (K + profile.l)
    else:
        degrees = tuple(assign_column_degrees(dist, K, profile.l))
    target = ConstructionTarget(dist, degrees, girth_floor, seed, match_check_degrees)
    return E2rcCode(peg_build(h2, target), profile)


def rate_half_code(seed: int = 1, match_check_degrees: bool = False) -> E2rcCode:
    """The N=1200 full-regime mother code."""
    return build_code(600, 600, 599, RATE_HALF, seed, match_check_degrees=match_check_degrees)


def rate_04_code(seed: int = 1, match_check_degrees: bool = False) -> E2rcCode:
    """The N=2000 low-rate mother code with 1061 weight-two parities."""
    return build_code(1200, 800, 1061, RATE_04, seed, match_check_degrees=match_check_degrees)
