"""Throughput (RN/s) measurement.

Each trial generates ``count`` words and folds them into a running XOR, so
no output can be optimised away; the folded value is reported. One
untimed warm-up trial runs first to absorb compilation and cache effects.
"""

from __future__ import annotations

import json
import os
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .core import fold_words, period_description, state_words
from .parallel import create_ensemble

__all__ = ["ThroughputReport", "measure_throughput", "measure_ensemble_throughput",
           "compare", "PAPER_GPU_RNS"]

# published GPU rates (GTX 480, GTX 295) for xorgensGP, MTGP and CURAND; context only
PAPER_GPU_RNS = {
    "xorgensGP": (17.7e9, 9.1e9),
    "MTGP": (17.5e9, 10.7e9),
    "CURAND": (18.5e9, 7.1e9),
}


@dataclass
class ThroughputReport:
    generator: str
    count: int
    trials: int
    rns: list[float]
    sink: int
    state_words: int | None = None
    period: str | None = None
    blocks: int = 1
    extra: dict = field(default_factory=dict)

    @property
    def mean(self) -> float:
        return statistics.fmean(self.rns)

    @property
    def min(self) -> float:
        return min(self.rns)

    @property
    def max(self) -> float:
        return max(self.rns)

    @property
    def cv(self) -> float:
        """Coefficient of variation of RN/s across trials."""
        return statistics.stdev(self.rns) / self.mean if len(self.rns) > 1 else 0.0

    def to_dict(self) -> dict:
        d = asdict(self)
        d.update(mean=self.mean, min=self.min, max=self.max, cv=self.cv)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _fold(generator, n: int) -> int:
    if hasattr(generator, "xor_fold"):
        return generator.xor_fold(n)
    acc = 0
    chunk = 1 << 20
    for start in range(0, n, chunk):
        acc ^= int(np.bitwise_xor.reduce(generator.words(min(chunk, n - start))))
    return acc


def measure_throughput(generator, count: int = 10**8, trials: int = 5,
                       min_count: int = 10**6) -> ThroughputReport:
    """Time ``trials`` runs of ``count`` words each on ``generator``.

    ``generator`` needs ``xor_fold(n)`` or ``words(n)``.
    """
    if count < min_count:
        raise ValueError(f"count must be at least {min_count}")
    if trials < 3:
        raise ValueError("need at least 3 trials")
    sink = _fold(generator, count)  # warm-up, not timed
    rates = []
    for _ in range(trials):
        t0 = time.perf_counter()
        sink ^= _fold(generator, count)
        elapsed = time.perf_counter() - t0
        rates.append(count / max(elapsed, 1e-9))
    return ThroughputReport(getattr(generator, "name", type(generator).__name__),
                            count, trials, rates, sink,
                            getattr(generator, "state_words", None),
                            getattr(generator, "period_display", None))


def measure_ensemble_throughput(params, num_blocks: int, per_block: int, trials: int = 5,
                                base_seed: int = 0, workers: int | None = None) -> ThroughputReport:
    """RN/s for ``num_blocks`` independent streams run concurrently."""
    if trials < 3:
        raise ValueError("need at least 3 trials")
    ens = create_ensemble(params, base_seed, num_blocks)
    workers = workers or min(num_blocks, os.cpu_count() or 1)

    def run():
        with ThreadPoolExecutor(max_workers=workers) as pool:
            acc = 0
            for v in pool.map(lambda st: fold_words(st, per_block), ens.blocks):
                acc ^= v
        return acc

    sink = run()
    rates = []
    for _ in range(trials):
        t0 = time.perf_counter()
        sink ^= run()
        rates.append(num_blocks * per_block / (time.perf_counter() - t0))
    return ThroughputReport(f"{params.name or 'xorgens'}x{num_blocks}", per_block * num_blocks,
                            trials, rates, sink, state_words(params),
                            period_description(params).display, blocks=num_blocks,
                            extra={"workers": workers})


def _fmt_rate(v: float) -> str:
    mant, exp = f"{v:.2e}".split("e")
    return f"{mant} x 10^{int(exp)}"


def compare(reports: list[ThroughputReport]) -> str:
    """Aligned text table: state size, nominal period and mean RN/s."""
    header = ("Generator", "State-Space", "Period", "RN/s (mean)", "CV")
    rows = [header]
    for r in reports:
        words = f"{r.state_words} words" if r.state_words is not None else "?"
        rows.append((r.generator, words, r.period or "?", _fmt_rate(r.mean), f"{r.cv:.1%}"))
    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    lines = []
    for k, row in enumerate(rows):
        lines.append("  ".join(cell.ljust(widths[i]) if i in (0, 2) else cell.rjust(widths[i])
                               for i, cell in enumerate(row)).rstrip())
        if k == 0:
            lines.append("-" * len(lines[0]))
    return "\n".join(lines)
