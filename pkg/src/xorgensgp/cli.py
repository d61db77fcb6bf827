"""Command-line front end: ``xorgensgp {gen,test,bench,params}``.

Exit codes: 0 success / battery pass, 2 battery suspect, 3 battery fail,
64 bad usage, 65 unknown generator, 66 invalid lanes or parameters,
73 output not writable, 74 input unreadable or exhausted.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import core
from .baselines import MT19937, Xorwow
from .bench import PAPER_GPU_RNS, compare, measure_ensemble_throughput, measure_throughput
from .core import TINY_PARAMS, TINY_VERIFIED, XORGENSGP_32, Xorgens, lane_bound, period_description
from .parallel import LaneBoundError, create_ensemble, generate, mt_parallel_bound
from .stattests import (DEFAULT_CONFIG, DEEP_CONFIG, SMOKE_CONFIG, FileSource, StreamExhausted,
                        Verdict, load_config, run_battery)

EXIT_OK = 0
EXIT_SUSPECT = 2
EXIT_FAIL = 3
EXIT_USAGE = 64
EXIT_UNKNOWN_GENERATOR = 65
EXIT_BAD_PARAMS = 66
EXIT_CANT_WRITE = 73
EXIT_IO = 74

VERDICT_EXIT = {Verdict.PASS: EXIT_OK, Verdict.SUSPECT: EXIT_SUSPECT, Verdict.FAIL: EXIT_FAIL}

GENERATORS = ("xorgensgp32", "xorgens-raw", "xorwow", "mt19937")
NAMED_CONFIGS = {"default": DEFAULT_CONFIG, "smoke": SMOKE_CONFIG, "deep": DEEP_CONFIG}


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def xorgens_params(selector: str):
    """(params, weyl) for xorgens selectors, None for the other generators."""
    if selector == "xorgensgp32":
        return XORGENSGP_32, True
    if selector == "xorgens-raw":
        return XORGENSGP_32, False
    if selector.startswith("tiny:"):
        name = selector[5:]
        weyl = True
        if name.endswith("-raw"):
            name, weyl = name[:-4], False
        if name not in TINY_PARAMS:
            raise CliError(f"unknown tiny parameter set {name!r}; "
                           f"choose from {', '.join(TINY_PARAMS)}", EXIT_UNKNOWN_GENERATOR)
        return TINY_PARAMS[name], weyl
    if selector in ("xorwow", "mt19937"):
        return None
    raise CliError(f"unknown generator {selector!r}", EXIT_UNKNOWN_GENERATOR)


def make_generator(selector: str, seed: int = 0):
    """Build a stream object for a generator selector."""
    xp = xorgens_params(selector)
    if xp is not None:
        params, weyl = xp
        g = Xorgens(params, seed, weyl=weyl)
        if selector == "xorgens-raw":
            g.name = "xorgens-raw"
        return g
    if selector == "xorwow":
        return Xorwow(seed)
    if not 0 <= seed < 2**32:
        raise CliError("mt19937 takes a 32-bit seed", EXIT_USAGE)
    return MT19937(seed)


def _word_bits(selector: str) -> int:
    xp = xorgens_params(selector)
    return xp[0].w if xp else 32


def _encode(words: np.ndarray, word_bits: int, fmt: str) -> bytes:
    if fmt == "raw-le":
        return np.asarray(words, dtype=np.uint64).astype(f"<u{word_bits // 8}").tobytes()
    if fmt == "hex":
        width = word_bits // 4
        return "".join(f"{int(v):0{width}x}\n" for v in words).encode()
    return "".join(f"{int(v)}\n" for v in words).encode()


def _produce(args) -> tuple[np.ndarray, int]:
    if args.count % args.blocks:
        raise CliError("--count must be a multiple of --blocks", EXIT_USAGE)
    per_block = args.count // args.blocks
    xp = xorgens_params(args.generator)
    if xp is None:
        if args.lanes != 1:
            raise CliError("--lanes applies to xorgens generators only", EXIT_BAD_PARAMS)
        parts = [make_generator(args.generator, args.seed + i).words(per_block)
                 for i in range(args.blocks)]
        return np.concatenate(parts) if parts else np.empty(0, np.uint64), 32
    params, weyl = xp
    try:
        if weyl:
            ens = create_ensemble(params, args.seed, args.blocks, args.lanes)
            parts = generate(ens, per_block)
        else:
            if args.lanes > lane_bound(params):
                raise LaneBoundError(f"lanes={args.lanes} exceeds min(s, r-s)="
                                     f"{lane_bound(params)}")
            parts = [Xorgens(params, args.seed + i, weyl=False).words(per_block, lanes=args.lanes)
                     for i in range(args.blocks)]
    except LaneBoundError as exc:
        raise CliError(str(exc), EXIT_BAD_PARAMS) from exc
    return np.concatenate(parts), params.w


def cmd_gen(args) -> int:
    words, w = _produce(args)
    data = _encode(words, w, args.format)
    if args.output in (None, "-"):
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
        return EXIT_OK
    try:
        with open(args.output, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise CliError(f"cannot write {args.output}: {exc.strerror}", EXIT_CANT_WRITE) from exc
    return EXIT_OK


def _battery_config(name_or_path):
    if name_or_path in NAMED_CONFIGS:
        return NAMED_CONFIGS[name_or_path]
    try:
        return load_config(name_or_path)
    except OSError as exc:
        raise CliError(f"cannot read config {name_or_path}: {exc.strerror}", EXIT_IO) from exc
    except ValueError as exc:
        raise CliError(f"bad config {name_or_path}: {exc}", EXIT_USAGE) from exc


def cmd_test(args) -> int:
    config = _battery_config(args.config)
    if args.input:
        try:
            source = FileSource(args.input, args.word_bits)
        except OSError as exc:
            raise CliError(f"cannot read {args.input}: {exc.strerror}", EXIT_IO) from exc
    else:
        source = make_generator(args.generator, args.seed)
    try:
        report = run_battery(source, config)
    except StreamExhausted as exc:
        raise CliError(str(exc), EXIT_IO) from exc
    text = report.to_json() + "\n"
    if args.output:
        try:
            with open(args.output, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise CliError(f"cannot write {args.output}: {exc.strerror}", EXIT_CANT_WRITE) from exc
    else:
        sys.stdout.write(text)
    return VERDICT_EXIT[report.overall]


def cmd_bench(args) -> int:
    selectors = list(GENERATORS) if args.generator == ["all"] else args.generator
    reports = []
    for sel in selectors:
        rep = measure_throughput(make_generator(sel, args.seed), args.count, args.trials)
        print(f"{rep.generator}: sink {rep.sink:#x}", file=sys.stderr)
        reports.append(rep)
    block_counts = list(args.blocks or [])
    if args.scaling:
        block_counts += sorted({1, 4, os.cpu_count() or 1})
    for blocks in block_counts:
        per_block = max(1, args.count // blocks)
        rep = measure_ensemble_throughput(XORGENSGP_32, blocks, per_block, args.trials,
                                          base_seed=args.seed)
        print(f"{rep.generator}: sink {rep.sink:#x}", file=sys.stderr)
        reports.append(rep)
    if args.json:
        print(json.dumps([r.to_dict() for r in reports], indent=2))
    else:
        print(compare(reports))
        print("\nPublished GPU rates, not reproducible on a CPU:")
        for name, (gtx480, gtx295) in PAPER_GPU_RNS.items():
            print(f"  {name:<10} GTX 480 {gtx480:.3g} RN/s, GTX 295 {gtx295:.3g} RN/s")
    return EXIT_OK


def params_table(selector: str) -> dict:
    xp = xorgens_params(selector)
    if xp is None:
        g = make_generator(selector, 5489 if selector == "mt19937" else 0)
        info = {"generator": selector, "word_bits": 32, "state_words": g.state_words,
                "period": g.period_display}
        if selector == "mt19937":
            info["parallel_terms"] = mt_parallel_bound(624, 397)
        return info
    params, weyl = xp
    desc = period_description(params)
    info = {"generator": selector, "r": params.r, "s": params.s, "a": params.a,
            "b": params.b, "c": params.c, "d": params.d, "w": params.w,
            "gamma": params.gamma, "omega": params.omega, "weyl": weyl,
            "lane_bound": lane_bound(params),
            "state_words": core.state_words(params) if weyl else params.r,
            "nominal_period": desc.display if weyl else f"2^{{{desc.linear_exponent}}}-1"}
    verified = TINY_VERIFIED.get(params.name)
    if verified:
        info["verified_linear_period"] = verified["linear"]
        if weyl and "output" in verified:
            info["verified_period"] = verified["output"]
        info["verified_by"] = verified["method"]
    return info


def cmd_params(args) -> int:
    info = params_table(args.generator)
    if args.json:
        print(json.dumps(info, indent=2))
    else:
        width = max(map(len, info))
        for key, value in info.items():
            print(f"{key:<{width}}  {value}")
    return EXIT_OK


def _seed(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def _nonneg(text: str) -> int:
    v = int(text, 0)
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def _positive(text: str) -> int:
    v = int(text, 0)
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    gen_help = ("generator: xorgensgp32, xorgens-raw, xorwow, mt19937, tiny:<set> or "
                f"tiny:<set>-raw with <set> in {{{', '.join(TINY_PARAMS)}}}")
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = _Parser(prog="xorgensgp", description="xorgens / xorgensGP random number tools",
                     formatter_class=fmt)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="write words to a file or stdout", formatter_class=fmt)
    p.add_argument("--generator", "-g", default="xorgensgp32", help=gen_help)
    p.add_argument("--seed", type=_seed, default=0, help="64-bit seed (0 is fine)")
    p.add_argument("--count", "-n", type=_nonneg, default=1024, help="total words")
    p.add_argument("--blocks", type=_positive, default=1,
                   help="independent streams seeded seed, seed+1, ...; output block-major")
    p.add_argument("--lanes", type=_positive, default=1, help="terms per batch, <= min(s, r-s)")
    p.add_argument("--format", choices=("raw-le", "hex", "u32-lines"), default="raw-le")
    p.add_argument("--output", "-o", default=None, help="output path (default stdout)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("test", help="run the statistical battery", formatter_class=fmt)
    p.add_argument("--generator", "-g", default="xorgensgp32", help=gen_help)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--config", default="default",
                   help="default, smoke, deep, or a key = value config file")
    p.add_argument("--input", default=None, help="test a raw little-endian word file instead")
    p.add_argument("--word-bits", type=int, choices=(8, 16, 32, 64), default=32,
                   help="word size of --input")
    p.add_argument("--output", "-o", default=None, help="write the JSON report here")
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("bench", help="measure throughput in RN/s", formatter_class=fmt)
    p.add_argument("--generator", "-g", action="append", default=None,
                   help="repeatable; 'all' for every full-size generator")
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--count", type=int, default=10**8, help="words per trial")
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--blocks", type=_positive, action="append", default=None,
                   help="also time an xorgensGP-32 ensemble of this many blocks")
    p.add_argument("--scaling", action="store_true",
                   help="time ensembles of 1, 4 and one-per-core blocks")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("params", help="show generator parameters", formatter_class=fmt)
    p.add_argument("generator", help=gen_help)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_params)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "bench" and args.generator is None:
        args.generator = ["xorgensgp32"]
    try:
        return args.func(args)
    except CliError as exc:
        print(f"xorgensgp: {exc}", file=sys.stderr)
        return exc.code
    except core.ParameterError as exc:
        print(f"xorgensgp: {exc}", file=sys.stderr)
        return EXIT_BAD_PARAMS
    except ValueError as exc:
        print(f"xorgensgp: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
