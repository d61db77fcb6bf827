"""A small empirical test battery with TestU01-style verdicts.

Words enter the bit-level tests most-significant bit first. A p-value below
1e-10 (or above 1 - 1e-10) is a failure and one beyond 1e-4 is suspect.
With N tests, a p-value beyond 1/N now and then is expected, so reports
carry the number of tests run.

The matrix-rank and linear-complexity tests target GF(2) linearity: a
purely xorshift-based generator with a small state fails them quickly.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .special import chi_square_pvalue, normal_pvalue, poisson_sf

__all__ = [
    "Verdict", "TestResult", "BatteryReport", "BatteryConfig", "TestSpec",
    "InsufficientDataError", "StreamExhausted", "FileSource",
    "verdict_for", "words_to_bits", "monobit", "runs_test", "gf2_rank",
    "rank_probabilities", "matrix_rank_test", "berlekamp_massey",
    "linear_complexity_test", "birthday_spacings", "run_battery",
    "DEFAULT_CONFIG", "SMOKE_CONFIG", "DEEP_CONFIG", "parse_config", "load_config",
]

FAIL_LEVEL = 1e-10
SUSPECT_LEVEL = 1e-4


class InsufficientDataError(ValueError):
    """The sample is too small for the test's distributional approximation."""


class StreamExhausted(EOFError):
    """A finite word source ran out before the battery finished."""


class Verdict(str, enum.Enum):
    PASS = "pass"
    SUSPECT = "suspect"
    FAIL = "fail"
    NOT_APPLICABLE = "n/a"


def verdict_for(p: float) -> Verdict:
    tail = min(p, 1.0 - p)
    if tail < FAIL_LEVEL:
        return Verdict.FAIL
    if tail < SUSPECT_LEVEL:
        return Verdict.SUSPECT
    return Verdict.PASS


@dataclass
class TestResult:
    test_name: str
    n_consumed: int
    statistic: float | None
    p_value: float | None
    verdict: Verdict
    details: dict = field(default_factory=dict)

    __test__ = False  # not a pytest class

    @classmethod
    def from_p(cls, name, n, statistic, p, **details):
        p = min(1.0, max(0.0, float(p)))
        return cls(name, int(n), float(statistic), p, verdict_for(p), details)

    def to_dict(self) -> dict:
        return {"name": self.test_name, "n": self.n_consumed,
                "statistic": self.statistic, "p": self.p_value,
                "verdict": self.verdict.value,
                **({"details": self.details} if self.details else {})}


def words_to_bits(words: np.ndarray, word_bits: int) -> np.ndarray:
    """Unpack words into a 0/1 uint8 array, most significant bit first."""
    words = np.asarray(words, dtype=np.uint64)
    nbytes = word_bits // 8
    be = words.astype(f">u{nbytes}") if nbytes > 1 else words.astype(np.uint8)
    return np.unpackbits(be.view(np.uint8))


def _as_bits(bits, n=None) -> np.ndarray:
    arr = np.asarray(bits, dtype=np.uint8)
    if n is not None:
        if n > arr.size:
            raise InsufficientDataError(f"need {n} bits, got {arr.size}")
        arr = arr[:n]
    return arr


def monobit(bits, n: int | None = None) -> TestResult:
    """Frequency test: S = sum(2 b_i - 1), p = erfc(|S| / sqrt(2n))."""
    b = _as_bits(bits, n)
    n = b.size
    if n < 100:
        raise InsufficientDataError("monobit needs n >= 100")
    s = 2 * int(np.count_nonzero(b)) - n
    stat = abs(s) / math.sqrt(n)
    return TestResult.from_p("monobit", n, stat, math.erfc(stat / math.sqrt(2)), sum=s)


def runs_test(bits, n: int | None = None) -> TestResult:
    """Runs test; not applicable when the ones-fraction is off by 2/sqrt(n)."""
    b = _as_bits(bits, n)
    n = b.size
    if n < 100:
        raise InsufficientDataError("runs test needs n >= 100")
    pi = np.count_nonzero(b) / n
    if abs(pi - 0.5) >= 2.0 / math.sqrt(n):
        return TestResult("runs", n, None, None, Verdict.NOT_APPLICABLE,
                          {"reason": "ones fraction fails the frequency prerequisite",
                           "pi": pi})
    runs = 1 + int(np.count_nonzero(b[1:] != b[:-1]))
    spread = 2.0 * math.sqrt(2.0 * n) * pi * (1.0 - pi)
    z = (runs - 2.0 * n * pi * (1.0 - pi)) / spread * math.sqrt(2.0)
    return TestResult.from_p("runs", n, runs, normal_pvalue(z), z=z)


def gf2_rank(matrix) -> int:
    """Rank over GF(2) of a 0/1 matrix, any shape."""
    m = np.asarray(matrix, dtype=np.uint8)
    if m.ndim != 2:
        raise ValueError("expected a 2-D bit matrix")
    rows = [int("".join(map(str, row)), 2) if row.size else 0 for row in m]
    rank = 0
    for col in reversed(range(m.shape[1])):
        bit = 1 << col
        pivot = next((i for i in range(rank, len(rows)) if rows[i] & bit), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i] & bit:
                rows[i] ^= rows[rank]
        rank += 1
    return rank


def rank_probability(m: int, rank: int) -> float:
    """P(rank) for a random m x m matrix over GF(2)."""
    # 2^{r(2m-r)-m^2} * prod_{i<r} (1 - 2^{i-m})^2 / (1 - 2^{i-r})
    log2p = rank * (2 * m - rank) - m * m
    prod = 1.0
    for i in range(rank):
        prod *= (1.0 - 2.0 ** (i - m)) ** 2 / (1.0 - 2.0 ** (i - rank))
    return prod * 2.0 ** log2p


def rank_probabilities(m: int = 32) -> tuple[float, float, float]:
    """Probabilities of rank m, m - 1 and <= m - 2."""
    p_full = rank_probability(m, m)
    p_one = rank_probability(m, m - 1)
    return p_full, p_one, 1.0 - p_full - p_one


def _rows_from_words(words: np.ndarray, word_bits: int, m: int) -> np.ndarray:
    """Consecutive m-bit rows of the MSB-first bit stream, as uint64."""
    words = np.asarray(words, dtype=np.uint64)
    if word_bits == m:
        return words.copy()
    if m % word_bits == 0:
        k = m // word_bits
        w = words[: words.size // k * k].reshape(-1, k)
        rows = np.zeros(w.shape[0], dtype=np.uint64)
        for j in range(k):
            rows = (rows << np.uint64(word_bits)) | w[:, j]
        return rows
    if word_bits % m == 0:
        k = word_bits // m
        mask = np.uint64((1 << m) - 1)
        shifts = [np.uint64(word_bits - m * (j + 1)) for j in range(k)]
        return np.stack([(words >> sh) & mask for sh in shifts], axis=1).ravel()
    bits = words_to_bits(words, word_bits)
    bits = bits[: bits.size // m * m].reshape(-1, m).astype(np.uint64)
    weights = np.uint64(1) << np.arange(m - 1, -1, -1, dtype=np.uint64)
    return (bits * weights).sum(axis=1, dtype=np.uint64)


def words_needed(bits: int, word_bits: int) -> int:
    return -(-bits // word_bits)


def matrix_rank_test(words, num_matrices: int, m: int = 32, word_bits: int = 32) -> TestResult:
    """Binary matrix rank test over m x m matrices (m <= 64)."""
    if num_matrices < 38:
        raise InsufficientDataError("matrix rank test needs at least 38 matrices")
    if not 1 <= m <= 64:
        raise ValueError("matrix size must be in [1, 64]")
    rows = _rows_from_words(words, word_bits, m)
    if rows.size < num_matrices * m:
        raise InsufficientDataError(f"need {num_matrices * m} rows, got {rows.size}")
    rows = np.ascontiguousarray(rows[: num_matrices * m])
    ranks = np.empty(num_matrices, dtype=np.int64)
    _kernels.batch_gf2_ranks(rows, m, m, ranks)
    observed = [int(np.sum(ranks == m)), int(np.sum(ranks == m - 1)),
                int(np.sum(ranks <= m - 2))]
    probs = rank_probabilities(m)
    stat = sum((o - num_matrices * p) ** 2 / (num_matrices * p)
               for o, p in zip(observed, probs))
    return TestResult.from_p("matrix_rank", num_matrices * m * m, stat,
                             chi_square_pvalue(stat, 2), m=m, counts=observed)


def berlekamp_massey(bits) -> int:
    """Length of the shortest LFSR generating ``bits`` over GF(2)."""
    arr = np.ascontiguousarray(np.asarray(bits, dtype=np.uint8) & 1)
    if arr.size == 0:
        raise ValueError("empty sequence")
    return int(_kernels.berlekamp_massey(arr))


# bin probabilities for T <= -2.5, (-2.5,-1.5], ..., T > 2.5
_LC_PROBS = (1 / 96, 1 / 32, 1 / 8, 1 / 2, 1 / 4, 1 / 16, 1 / 48)


def block_complexities(bits, block_length: int, num_blocks: int) -> np.ndarray:
    b = _as_bits(bits, block_length * num_blocks)
    lengths = np.empty(num_blocks, dtype=np.int64)
    _kernels.block_complexities(np.ascontiguousarray(b), block_length, lengths)
    return lengths


def complexity_result(lengths: np.ndarray, block_length: int) -> TestResult:
    """Chi-square verdict from per-block linear complexities."""
    k = block_length
    num_blocks = lengths.size
    if num_blocks < 38:
        raise InsufficientDataError("linear complexity test needs at least 38 blocks")
    mu = k / 2 + (9 + (-1) ** (k + 1)) / 36 - math.ldexp(k / 3 + 2 / 9, -k)
    t = (-1) ** k * (lengths - mu) + 2 / 9
    edges = [-2.5, -1.5, -0.5, 0.5, 1.5, 2.5]
    counts = np.bincount(np.searchsorted(edges, t, side="left"), minlength=7)
    stat = float(sum((c - num_blocks * p) ** 2 / (num_blocks * p)
                     for c, p in zip(counts, _LC_PROBS)))
    return TestResult.from_p("linear_complexity", k * num_blocks, stat,
                             chi_square_pvalue(stat, 6), block_length=k,
                             counts=counts.tolist(), min_complexity=int(lengths.min()),
                             max_complexity=int(lengths.max()))


def linear_complexity_test(bits, block_length: int, num_blocks: int) -> TestResult:
    """Chi-square test on per-block linear complexity (7 bins, 6 dof)."""
    if num_blocks < 38:
        raise InsufficientDataError("linear complexity test needs at least 38 blocks")
    return complexity_result(block_complexities(bits, block_length, num_blocks),
                             block_length)


def birthday_lambda(n_draws: int, t_bits: int) -> float:
    return n_draws ** 3 / 2.0 ** (t_bits + 2)


def _draws(words, word_bits, t_bits, count):
    words = np.asarray(words, dtype=np.uint64)
    if t_bits <= word_bits:
        vals = words[:count] >> np.uint64(word_bits - t_bits)
    elif t_bits % word_bits == 0 and t_bits <= 64:
        k = t_bits // word_bits
        vals = _rows_from_words(words[: count * k], word_bits, t_bits)[:count]
    else:
        raise ValueError(f"t_bits={t_bits} incompatible with {word_bits}-bit words")
    if vals.size < count:
        raise InsufficientDataError(f"need {count} draws, got {vals.size}")
    return vals


def birthday_draw_words(n_draws: int, t_bits: int, word_bits: int, repeats: int = 1) -> int:
    per = 1 if t_bits <= word_bits else t_bits // word_bits
    return n_draws * repeats * per


def birthday_spacings(words, n_draws: int, t_bits: int, repeats: int = 1,
                      word_bits: int = 32) -> TestResult:
    """Marsaglia's birthday spacings: duplicate spacings are Poisson(lambda).

    Each repeat draws ``n_draws`` t-bit values; the duplicate counts are
    summed, which is Poisson(repeats * lambda) under the null.
    """
    lam = birthday_lambda(n_draws, t_bits)
    if not 1 <= lam <= 16:
        raise InsufficientDataError(f"lambda = {lam:g} outside [1, 16]")
    vals = _draws(words, word_bits, t_bits, n_draws * repeats).reshape(repeats, n_draws)
    vals = np.sort(vals, axis=1)
    spacings = np.diff(vals, axis=1, prepend=np.zeros((repeats, 1), dtype=np.uint64))
    spacings.sort(axis=1)
    dups = int(np.count_nonzero(spacings[:, 1:] == spacings[:, :-1]))
    total_lam = lam * repeats
    return TestResult.from_p("birthday_spacings", n_draws * repeats * t_bits, dups,
                             poisson_sf(dups, total_lam), lam=total_lam)


# --- battery --------------------------------------------------------------

@dataclass(frozen=True)
class TestSpec:
    name: str
    options: dict

    __test__ = False


@dataclass(frozen=True)
class BatteryConfig:
    tests: tuple[TestSpec, ...]

    def options(self, name):
        for spec in self.tests:
            if spec.name == name:
                return spec.options
        raise KeyError(name)


@dataclass
class BatteryReport:
    generator: str
    params: dict
    seed: int | None
    results: list[TestResult]

    @property
    def overall(self) -> Verdict:
        verdicts = {r.verdict for r in self.results}
        for v in (Verdict.FAIL, Verdict.SUSPECT):
            if v in verdicts:
                return v
        return Verdict.PASS

    def to_dict(self) -> dict:
        return {"generator": self.generator, "params": self.params, "seed": self.seed,
                "num_tests": len(self.results),
                "tests": [r.to_dict() for r in self.results],
                "overall": self.overall.value}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


_TEST_KEYS = {
    "monobit": {"n"},
    "runs": {"n"},
    "matrix_rank": {"num_matrices", "m"},
    "linear_complexity": {"block_length", "num_blocks", "bit"},
    "birthday_spacings": {"n_draws", "t_bits", "repeats"},
}

DEFAULT_CONFIG_TEXT = """\
# ~1e8 bits per test
tests = monobit, runs, matrix_rank, linear_complexity, birthday_spacings
monobit.n = 100000000
runs.n = 100000000
matrix_rank.num_matrices = 100000
matrix_rank.m = 32
# bit 0 is the least significant bit of each word; "all" uses every bit
linear_complexity.bit = 0
linear_complexity.block_length = 256
linear_complexity.num_blocks = 390625
birthday_spacings.n_draws = 4096
birthday_spacings.t_bits = 32
birthday_spacings.repeats = 750
"""

SMOKE_CONFIG_TEXT = """\
tests = monobit, runs, matrix_rank, linear_complexity, birthday_spacings
monobit.n = 1000000
runs.n = 1000000
matrix_rank.num_matrices = 2000
linear_complexity.bit = 0
linear_complexity.block_length = 256
linear_complexity.num_blocks = 1000
birthday_spacings.n_draws = 4096
birthday_spacings.t_bits = 32
birthday_spacings.repeats = 20
"""


# longer linear-complexity blocks: small-state xorshift parts show through
DEEP_CONFIG_TEXT = """\
tests = linear_complexity, matrix_rank
linear_complexity.bit = 0
linear_complexity.block_length = 512
linear_complexity.num_blocks = 195312
matrix_rank.num_matrices = 100000
matrix_rank.m = 32
"""


def parse_config(text: str) -> BatteryConfig:
    """Parse ``key = value`` lines; ``tests`` lists the tests in run order."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        raw[key] = value
    if "tests" not in raw:
        raise ValueError("config must list tests")
    names = [n.strip() for n in raw.pop("tests").split(",") if n.strip()]
    options = {n: {} for n in names}
    for key, value in raw.items():
        test, _, opt = key.partition(".")
        if test not in _TEST_KEYS or opt not in _TEST_KEYS[test]:
            raise ValueError(f"unknown config key {key!r}")
        if test in options:
            options[test][opt] = value if value == "all" else int(value)
    for n in names:
        if n not in _TEST_KEYS:
            raise ValueError(f"unknown test {n!r}")
    return BatteryConfig(tuple(TestSpec(n, options[n]) for n in names))


def load_config(path) -> BatteryConfig:
    with open(path) as fh:
        return parse_config(fh.read())


DEFAULT_CONFIG = parse_config(DEFAULT_CONFIG_TEXT)
SMOKE_CONFIG = parse_config(SMOKE_CONFIG_TEXT)
DEEP_CONFIG = parse_config(DEEP_CONFIG_TEXT)


class FileSource:
    """Little-endian words read from a binary file."""

    def __init__(self, path, word_bits: int = 32, name: str | None = None):
        if word_bits not in (8, 16, 32, 64):
            raise ValueError("word_bits must be 8, 16, 32 or 64")
        self.word_bits = word_bits
        self.name = name or str(path)
        self._fh = open(path, "rb")

    def words(self, n: int) -> np.ndarray:
        nbytes = self.word_bits // 8
        data = self._fh.read(n * nbytes)
        if len(data) < n * nbytes:
            raise StreamExhausted(f"{self.name}: wanted {n} words, file had "
                                  f"{len(data) // nbytes} left")
        return np.frombuffer(data, dtype=f"<u{nbytes}").astype(np.uint64)

    def close(self):
        self._fh.close()

    def describe(self) -> dict:
        return {"file": self.name, "word_bits": self.word_bits}


_CHUNK_BITS = 1 << 22


def _run_one(source, spec: TestSpec) -> TestResult:
    w = source.word_bits
    opt = spec.options
    if spec.name in ("monobit", "runs"):
        n = opt.get("n", 100_000_000)
        bits = words_to_bits(source.words(words_needed(n, w)), w)[:n]
        return monobit(bits) if spec.name == "monobit" else runs_test(bits)
    if spec.name == "matrix_rank":
        m = opt.get("m", 32)
        count = opt.get("num_matrices", 100_000)
        words = source.words(words_needed(count * m * m, w))
        return matrix_rank_test(words, count, m=m, word_bits=w)
    if spec.name == "linear_complexity":
        k = opt.get("block_length", 256)
        blocks = opt.get("num_blocks", 20_000)
        bit = opt.get("bit", 0)
        if blocks < 38:
            raise InsufficientDataError("linear complexity test needs at least 38 blocks")
        lengths = []
        # chunked: one word per bit would otherwise mean 8 bytes per tested bit
        chunk = max(1, _CHUNK_BITS // k)
        for start in range(0, blocks, chunk):
            nb = min(chunk, blocks - start)
            n = nb * k
            if bit == "all":
                bits = words_to_bits(source.words(words_needed(n, w)), w)[:n]
            else:
                bits = ((source.words(n) >> np.uint64(bit)) & np.uint64(1)).astype(np.uint8)
            lengths.append(block_complexities(bits, k, nb))
        res = complexity_result(np.concatenate(lengths), k)
        res.details["bit"] = bit
        return res
    if spec.name == "birthday_spacings":
        n_draws = opt.get("n_draws", 4096)
        t = opt.get("t_bits", 32)
        reps = opt.get("repeats", 1)
        words = source.words(birthday_draw_words(n_draws, t, w, reps))
        return birthday_spacings(words, n_draws, t, repeats=reps, word_bits=w)
    raise ValueError(f"unknown test {spec.name!r}")


def run_battery(source, config: BatteryConfig = DEFAULT_CONFIG) -> BatteryReport:
    """Run each configured test on fresh output, in order.

    ``source`` needs ``word_bits`` and ``words(n)``; ``name``, ``seed`` and
    ``describe()`` are used for the report when present.
    """
    results = [_run_one(source, spec) for spec in config.tests]
    params = source.describe() if hasattr(source, "describe") else {}
    return BatteryReport(getattr(source, "name", type(source).__name__), params,
                         getattr(source, "seed", None), results)
