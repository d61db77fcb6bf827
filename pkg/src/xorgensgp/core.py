"""The xorgens generator: parameters, seeding and the Weyl-combined output.

A generator of degree ``r`` keeps the last ``r`` words of the sequence

    x_i = x_{i-r}(I + L^a)(I + R^b) + x_{i-s}(I + L^c)(I + R^d)

in a circular buffer, plus a Weyl accumulator ``w_k = w_{k-1} + omega``.
Each output is ``(w_k ^ (w_k >> gamma)) + x_k mod 2^w``; the integer
addition is what breaks linearity over GF(2).

The scalar functions in this module are the reference definition. Bulk
generation (:meth:`Xorgens.words`) runs a compiled kernel that is tested
to be bit-exact against them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels

__all__ = [
    "ParameterError", "GcdError", "TapRangeError", "ShiftRangeError",
    "EvenOmegaError", "WordSizeError",
    "GeneratorParams", "XorgensState", "Xorgens", "PeriodDescription",
    "golden_omega", "make_params", "validate_params", "xorshift_transform",
    "step_linear", "weyl_next", "next_word", "seed_state", "lane_bound",
    "period_description", "linear_period", "state_words",
    "XORGENSGP_32", "TINY_PARAMS", "TINY_VERIFIED", "WORD_SIZES",
    "fill_words", "fold_words", "expand_seed",
]

WORD_SIZES = (8, 16, 32, 64)
MASK64 = (1 << 64) - 1


class ParameterError(ValueError):
    """Base class for rejected generator parameters."""


class GcdError(ParameterError):
    pass


class TapRangeError(ParameterError):
    pass


class ShiftRangeError(ParameterError):
    pass


class EvenOmegaError(ParameterError):
    pass


class WordSizeError(ParameterError):
    pass


def golden_omega(w: int) -> int:
    """Odd integer nearest to 2^(w-1) * (sqrt(5) - 1)."""
    # isqrt keeps this exact for w = 64 where floats run out of bits
    v = math.isqrt(5 << (2 * w - 2)) - (1 << (w - 1))
    return v if v & 1 else v + 1


@dataclass(frozen=True)
class GeneratorParams:
    r: int
    s: int
    a: int
    b: int
    c: int
    d: int
    w: int = 32
    omega: int | None = None
    gamma: int | None = None
    name: str = ""

    def __post_init__(self):
        # omega and gamma default to the golden-ratio increment and w/2
        if self.omega is None and self.w in WORD_SIZES:
            object.__setattr__(self, "omega", golden_omega(self.w))
        if self.gamma is None:
            object.__setattr__(self, "gamma", self.w // 2)

    @property
    def mask(self) -> int:
        return (1 << self.w) - 1

    @property
    def shifts(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)


def make_params(r, s, a, b, c, d, w=32, omega=None, gamma=None, name=""):
    """Build and validate a parameter set in one call."""
    return validate_params(GeneratorParams(r, s, a, b, c, d, w, omega, gamma, name))


def validate_params(p: GeneratorParams) -> GeneratorParams:
    """Return ``p`` unchanged if it describes a legal generator.

    Raises:
        WordSizeError: w not in {8, 16, 32, 64}.
        TapRangeError: s outside (0, r).
        GcdError: gcd(r, s) != 1.
        ShiftRangeError: a shift or gamma outside (0, w).
        EvenOmegaError: the Weyl increment is even.
    """
    if p.w not in WORD_SIZES:
        raise WordSizeError(f"word size {p.w} not in {WORD_SIZES}")
    if p.r < 2 or not 0 < p.s < p.r:
        raise TapRangeError(f"need 0 < s < r, got r={p.r}, s={p.s}")
    g = math.gcd(p.r, p.s)
    if g != 1:
        raise GcdError(f"gcd(r, s) = gcd({p.r}, {p.s}) = {g}, must be 1")
    for label, v in zip("abcd", p.shifts):
        if not 0 < v < p.w:
            raise ShiftRangeError(f"shift {label}={v} outside (0, {p.w})")
    if not 0 < p.gamma < p.w:
        raise ShiftRangeError(f"gamma={p.gamma} outside (0, {p.w})")
    if not 0 <= p.omega <= p.mask:
        raise ShiftRangeError(f"omega={p.omega} is not a {p.w}-bit word")
    if p.omega % 2 == 0:
        raise EvenOmegaError(f"omega={p.omega} is even")
    return p


def lane_bound(params: GeneratorParams) -> int:
    """Number of consecutive terms that may be computed concurrently."""
    return min(params.s, params.r - params.s)


def state_words(params: GeneratorParams) -> int:
    """State footprint in words: the buffer plus the Weyl accumulator."""
    return params.r + 1


@dataclass(frozen=True)
class PeriodDescription:
    linear_exponent: int
    weyl_factor_exponent: int

    @property
    def display(self) -> str:
        return f"≈2^{{{self.linear_exponent + self.weyl_factor_exponent}}}"

    @property
    def exact(self) -> int:
        return ((1 << self.linear_exponent) - 1) << self.weyl_factor_exponent


def period_description(params: GeneratorParams) -> PeriodDescription:
    """Nominal period (2^(rw) - 1) * 2^w.

    Nominal only: it is reached when the recurrence's characteristic
    polynomial is primitive, which is not checked here.
    """
    return PeriodDescription(params.r * params.w, params.w)


XORGENSGP_32 = make_params(128, 65, 15, 14, 12, 17, w=32, name="xorgensgp32")

# Desk-scale sets for exhaustive checks. Shifts were found by a search over
# all (a, b, c, d); ``linear_period`` is 2^(rw) - 1 in every case, confirmed
# by orbit iteration for rw <= 32 and by a GF(2) matrix order test for r4w16.
TINY_PARAMS = {
    "r2w8": make_params(2, 1, 1, 2, 6, 7, w=8, name="r2w8"),
    "r2w16": make_params(2, 1, 1, 1, 6, 11, w=16, name="r2w16"),
    "r3w8": make_params(3, 2, 1, 2, 4, 1, w=8, name="r3w8"),
    "r4w8": make_params(4, 3, 1, 3, 4, 6, w=8, name="r4w8"),
    "r4w16": make_params(4, 3, 1, 2, 5, 8, w=16, name="r4w16"),
}

TINY_VERIFIED = {
    "r2w8": {"linear": 2**16 - 1, "output": (2**16 - 1) * 2**8,
             "method": "orbit iteration"},
    "r2w16": {"linear": 2**32 - 1, "method": "orbit iteration"},
    "r3w8": {"linear": 2**24 - 1, "method": "orbit iteration"},
    "r4w8": {"linear": 2**32 - 1, "method": "orbit iteration"},
    "r4w16": {"linear": 2**64 - 1, "method": "GF(2) matrix order"},
}


def xorshift_transform(x: int, left: int, right: int, w: int = 32) -> int:
    """Apply (I + L^left)(I + R^right) to a w-bit word, left factor first."""
    mask = (1 << w) - 1
    t = x ^ ((x << left) & mask)
    return t ^ (t >> right)


@dataclass
class XorgensState:
    """One serial xorgens stream.

    ``x[idx]`` holds the oldest word x_{i-r}, the slot the next term
    overwrites. Single owner; never step one state from two threads.
    """
    params: GeneratorParams
    x: list[int]
    idx: int = 0
    weyl: int = 0

    def copy(self) -> XorgensState:
        return XorgensState(self.params, list(self.x), self.idx, self.weyl)

    def ordered(self) -> list[int]:
        """Buffer contents oldest first."""
        return self.x[self.idx:] + self.x[:self.idx]

    def __eq__(self, other):
        if not isinstance(other, XorgensState):
            return NotImplemented
        return (self.params == other.params and self.ordered() == other.ordered()
                and self.weyl == other.weyl)


def step_linear(state: XorgensState) -> int:
    """Compute the next term of the recurrence in place; Weyl untouched."""
    p = state.params
    r, idx, x = p.r, state.idx, state.x
    old = x[idx]
    tap = x[(idx + r - p.s) % r]
    new = (xorshift_transform(old, p.a, p.b, p.w)
           ^ xorshift_transform(tap, p.c, p.d, p.w))
    x[idx] = new
    state.idx = (idx + 1) % r
    return new


def weyl_next(state: XorgensState) -> int:
    p = state.params
    state.weyl = (state.weyl + p.omega) & p.mask
    return state.weyl


def next_word(state: XorgensState) -> int:
    xk = step_linear(state)
    wk = weyl_next(state)
    return ((wk ^ (wk >> state.params.gamma)) + xk) & state.params.mask


def _splitmix64(z: int) -> tuple[int, int]:
    z = (z + 0x9E3779B97F4A7C15) & MASK64
    out = z
    out = ((out ^ (out >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    out = ((out ^ (out >> 27)) * 0x94D049BB133111EB) & MASK64
    return z, out ^ (out >> 31)


def expand_seed(seed: int, count: int, w: int) -> list[int]:
    """``count`` w-bit words from the splitmix64 stream started at ``seed``.

    Each word is the top w bits of one splitmix64 output.
    """
    if not 0 <= seed <= MASK64:
        raise ValueError(f"seed {seed} is not a 64-bit unsigned integer")
    words = []
    z = seed
    for _ in range(count):
        z, out = _splitmix64(z)
        words.append(out >> (64 - w))
    return words


def seed_state(params: GeneratorParams, seed: int, warmup: int | None = None) -> XorgensState:
    """Deterministically initialise a state from a 64-bit seed.

    The seed is expanded through splitmix64 into the r buffer words and
    the Weyl accumulator; an all-zero buffer gets ``x[0] = omega``. Then
    ``4 r`` outputs are discarded so every word has mixed into the rest.
    """
    words = expand_seed(seed, params.r + 1, params.w)
    x = words[:params.r]
    if not any(x):
        x[0] = params.omega
    state = XorgensState(params, x, 0, words[params.r])
    n = 4 * params.r if warmup is None else warmup
    for _ in range(n):
        next_word(state)
    return state


def _kernel_args(params: GeneratorParams):
    u = np.uint64
    return (u(params.r), u(params.s), u(params.a), u(params.b), u(params.c),
            u(params.d), u(params.mask), u(params.omega), u(params.gamma))


def fill_words(state: XorgensState, n: int, lanes: int = 1, weyl: bool = True) -> np.ndarray:
    """Next ``n`` outputs of ``state`` as uint64, advancing it in place.

    ``lanes`` terms of the recurrence are evaluated per batch against the
    pre-batch buffer; callers must keep ``lanes <= lane_bound``.
    """
    p = state.params
    x = np.array(state.x, dtype=np.uint64)
    out = np.empty(n, dtype=np.uint64)
    r, s, a, b, c, d, mask, omega, gamma = _kernel_args(p)
    idx, w = _kernels.xorgens_fill(x, state.idx, np.uint64(state.weyl), p.r, p.s,
                                   a, b, c, d, mask, omega, gamma, lanes, weyl, out)
    state.x = x.tolist()
    state.idx = int(idx)
    state.weyl = int(w)
    return out


def fold_words(state: XorgensState, n: int, weyl: bool = True) -> int:
    """Advance ``n`` steps and return the XOR of all outputs."""
    p = state.params
    x = np.array(state.x, dtype=np.uint64)
    r, s, a, b, c, d, mask, omega, gamma = _kernel_args(p)
    idx, w, acc = _kernels.xorgens_fold(x, state.idx, np.uint64(state.weyl), p.r, p.s,
                                        a, b, c, d, mask, omega, gamma, weyl, n)
    state.x = x.tolist()
    state.idx = int(idx)
    state.weyl = int(w)
    return int(acc)


def linear_period(params: GeneratorParams, start: list[int] | None = None,
                  max_steps: int = 1 << 24) -> int | None:
    """Period of the buffer sequence from ``start`` by exhaustive iteration.

    ``start`` defaults to ``[1, 0, ..., 0]``. Returns None when the start
    does not recur within ``max_steps``.
    """
    if start is None:
        start = [1] + [0] * (params.r - 1)
    x = np.array(start, dtype=np.uint64)
    r, s, a, b, c, d, mask, _, _ = _kernel_args(params)
    steps = _kernels.linear_orbit(x, params.r, params.s, a, b, c, d, mask, max_steps)
    return None if steps < 0 else int(steps)


class Xorgens:
    """Stream interface over an :class:`XorgensState`.

    ``weyl=False`` gives the raw linear generator (no Weyl stage), used as
    the ablation baseline.
    """

    def __init__(self, params: GeneratorParams = XORGENSGP_32, seed: int = 0,
                 weyl: bool = True):
        self.params = validate_params(params)
        self.seed = seed
        self.weyl = weyl
        self.state = seed_state(params, seed)
        base = params.name or f"r{params.r}w{params.w}"
        self.name = base if weyl else f"{base}-raw"

    @property
    def word_bits(self) -> int:
        return self.params.w

    @property
    def state_words(self) -> int:
        return state_words(self.params) if self.weyl else self.params.r

    @property
    def period_display(self) -> str:
        desc = period_description(self.params)
        if self.weyl:
            return desc.display
        return f"2^{{{desc.linear_exponent}}}-1"

    def next_word(self) -> int:
        if self.weyl:
            return next_word(self.state)
        return step_linear(self.state)

    def words(self, n: int, lanes: int = 1) -> np.ndarray:
        return fill_words(self.state, n, lanes=lanes, weyl=self.weyl)

    def xor_fold(self, n: int) -> int:
        return fold_words(self.state, n, weyl=self.weyl)

    def describe(self) -> dict:
        p = self.params
        return {"r": p.r, "s": p.s, "a": p.a, "b": p.b, "c": p.c, "d": p.d,
                "w": p.w, "omega": p.omega, "gamma": p.gamma, "weyl": self.weyl}
