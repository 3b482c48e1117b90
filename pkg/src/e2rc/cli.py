"""Command-line entry point: ``e2rc <subcommand> ...``.

Exit status: 0 ok, 1 verification failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .codes import ENCODE_METHODS, E2rcCode, build_code
from .construct import verify_h2
from .decoder import DEFAULT_MAX_ITERS, BpDecoder
from .matrix import AlistError, DegreeDistribution
from .peg import InfeasibleConstruction, audit_4cycles, nv2_from_distribution
from .puncture import apply_puncturing, puncture_schedule, sr_level_violations
from .simulate import SimConfig, run_ber_sweep, write_csv

EXIT_OK, EXIT_VERIFY, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# -- file formats -----------------------------------------------------


def read_bit_frames(path: str | Path, length: int) -> np.ndarray:
    """One frame per line, one ASCII 0/1 per bit."""
    frames = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        if set(line) - {"0", "1"}:
            raise UsageError(f"{path}:{lineno}: bits must be 0 or 1")
        if len(line) != length:
            raise UsageError(f"{path}:{lineno}: expected {length} bits, got {len(line)}")
        frames.append([int(ch) for ch in line])
    return np.array(frames, dtype=np.uint8).reshape(-1, length)


def format_bit_frames(frames: np.ndarray) -> str:
    return "".join("".join(map(str, row)) + "\n" for row in np.atleast_2d(frames))


def read_llr_frames(path: str | Path, length: int) -> np.ndarray:
    """One real per line; frames separated by blank lines."""
    frames, cur = [], []
    lines = Path(path).read_text().splitlines() + [""]
    for lineno, line in enumerate(lines, 1):
        line = line.strip()
        if not line:
            if cur:
                if len(cur) != length:
                    raise UsageError(f"{path}: frame {len(frames)} has {len(cur)} values, expected {length}")
                frames.append(cur)
                cur = []
            continue
        try:
            cur.append(float(line))
        except ValueError:
            raise UsageError(f"{path}:{lineno}: not a number: {line!r}") from None
    return np.array(frames, dtype=np.float64).reshape(-1, length)


# -- subcommands ------------------------------------------------------


def cmd_construct(args) -> int:
    dist = DegreeDistribution.from_text(Path(args.dist).read_text()) if args.dist else None
    nv2 = args.nv2
    if nv2 is None:
        nv2 = nv2_from_distribution(dist, args.M + args.K, args.M) if dist else args.M - 1
    code = build_code(args.M, args.K, nv2, dist, args.seed, args.girth, args.match_check_degrees)
    alist, prof = code.save(args.out)
    p = code.profile
    print(f"wrote {alist} and {prof}")
    print(f"M={p.M} K={p.K} N={p.N} nv2={p.nv2} regime={p.regime} d={p.d} gamma={list(p.gamma)}")
    return EXIT_OK


def cmd_encode(args) -> int:
    code = E2rcCode.load(args.code)
    m = read_bit_frames(args.input, code.K)
    c = code.encode(m, args.method) if len(m) else np.zeros((0, code.N), np.uint8)
    Path(args.out).write_text(format_bit_frames(c) if len(c) else "")
    print(f"encoded {len(c)} frame(s) with {args.method}")
    return EXIT_OK


def cmd_decode(args) -> int:
    code = E2rcCode.load(args.code)
    llr = read_llr_frames(args.llr_in, code.N)
    hard, iters, conv = BpDecoder(code.h).decode_batch(llr, args.max_iters) if len(llr) else ([], [], [])
    text = format_bit_frames(hard) if len(llr) else ""
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    for i, (it, ok) in enumerate(zip(iters, conv)):
        state = "converged" if ok else "not converged"
        print(f"frame {i}: {state} after {it} iteration(s)", file=sys.stderr)
    return EXIT_OK


def cmd_puncture(args) -> int:
    code = E2rcCode.load(args.code)
    schedule = puncture_schedule(code.profile)
    idx = apply_puncturing(schedule, args.rate)
    Path(args.out).write_text("".join(f"{i}\n" for i in idx))
    print(f"{len(idx)} punctured, realized rate {schedule.realized_rate(len(idx)):.6f}")
    return EXIT_OK


def cmd_verify(args) -> int:
    code = E2rcCode.load(args.code)
    report = verify_h2(code.h2, code.profile)
    for line in report.lines():
        print(line)
    cycles = audit_4cycles(code.h)
    print(("PASS" if not cycles else "FAIL") + f" no_4cycles: {len(cycles)} found")
    late = sr_level_violations(code.h, code.profile)
    detail = "" if not late else f" (first: column {late[0][0]} at level {late[0][1]}, block {late[0][2]})"
    print(("PASS" if not late else "FAIL") + f" sr_levels: {len(late)} late or unrecoverable{detail}")
    ok = report.passed and not cycles and not late
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_simulate(args) -> int:
    cfg = SimConfig(
        code=args.code,
        rates=tuple(args.rates),
        ebn0_grid_db=tuple(args.ebn0),
        min_frame_errors=args.min_frame_errors,
        max_frames=args.max_frames,
        seed=args.seed,
        max_iters=args.max_iters,
        batch_size=args.batch_size,
        workers=args.workers,
    )
    records = run_ber_sweep(cfg)
    write_csv(records, args.out, cfg.max_iters)
    print(f"wrote {len(records)} record(s) to {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="e2rc", description="Rate-compatible LDPC construction and simulation")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build a code and write PREFIX.alist and PREFIX.profile")
    p.add_argument("--M", type=int, required=True, help="parity symbols")
    p.add_argument("--K", type=int, required=True, help="message symbols")
    p.add_argument("--nv2", type=int, help="weight-two parity columns (default M-1, or from --dist)")
    p.add_argument("--dist", help="degree distribution file with [variable] and [check] sections")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--girth", type=int, default=6, help="shortest allowed cycle")
    p.add_argument("--match-check-degrees", action="store_true", help="steer row degrees toward the check distribution")
    p.add_argument("--out", default="e2rc", help="output prefix")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("encode", help="encode message frames")
    p.add_argument("--code", required=True, help="code prefix")
    p.add_argument("--in", dest="input", required=True, help="message bits, one frame per line")
    p.add_argument("--out", required=True)
    p.add_argument("--method", choices=ENCODE_METHODS, default="plan")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="sum-product decoding of LLR frames")
    p.add_argument("--code", required=True)
    p.add_argument("--llr-in", required=True, help="one LLR per line, frames separated by blank lines")
    p.add_argument("--max-iters", type=int, default=DEFAULT_MAX_ITERS)
    p.add_argument("--out", help="decoded bits (default stdout)")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("puncture", help="write the punctured index list for a rate")
    p.add_argument("--code", required=True)
    p.add_argument("--rate", type=float, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_puncture)

    p = sub.add_parser("verify", help="structural audit of a stored code")
    p.add_argument("--code", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="BER/FER sweep to CSV")
    p.add_argument("--code", help="code prefix (default: built-in N=1200 rate-1/2 code)")
    p.add_argument("--rates", type=float, nargs="+", default=[0.5])
    p.add_argument("--ebn0", type=float, nargs="+", required=True, help="Eb/N0 grid in dB")
    p.add_argument("--min-frame-errors", type=int, default=100)
    p.add_argument("--max-frames", type=int, default=10**7)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iters", type=int, default=DEFAULT_MAX_ITERS)
    p.add_argument("--batch-size", type=int, default=64)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True, help="CSV path")
    p.set_defaults(func=cmd_simulate)
    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, AlistError, InfeasibleConstruction, ValueError, OSError) as exc:
        print(f"e2rc {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
