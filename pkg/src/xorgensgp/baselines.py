"""Comparison generators with the same stream interface as :class:`Xorgens`.

* :class:`Xorwow`: Marsaglia's xorwow, the algorithm behind CURAND's
  default generator. Seeding is ours, so streams will not match CURAND.
* :class:`MT19937`: the 1998 Mersenne Twister with ``init_genrand``
  seeding, the GF(2)-linear reference point.
* :func:`raw_xorgens`: xorgens without the Weyl stage.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import XORGENSGP_32, GeneratorParams, Xorgens, XorgensState, expand_seed, step_linear

__all__ = ["XorwowState", "Mt19937State", "xorwow_seed", "xorwow_next", "mt_seed",
           "mt_next", "raw_xorgens_next", "raw_xorgens", "Xorwow", "MT19937",
           "XORWOW_MARSAGLIA", "MT_N", "MT_M"]

M32 = 0xFFFFFFFF
MT_N = 624
MT_M = 397

# initial values from Marsaglia's published xorwow routine
XORWOW_MARSAGLIA = (123456789, 362436069, 521288629, 88675123, 5783321, 6615241)


@dataclass
class XorwowState:
    x: int
    y: int
    z: int
    u: int
    v: int
    d: int

    def __post_init__(self):
        if not (self.x | self.y | self.z | self.u | self.v):
            raise ValueError("xorwow xorshift words must not all be zero")

    def as_tuple(self):
        return (self.x, self.y, self.z, self.u, self.v, self.d)


def xorwow_next(st: XorwowState) -> int:
    t = st.x ^ (st.x >> 2)
    st.x, st.y, st.z, st.u = st.y, st.z, st.u, st.v
    st.v = (st.v ^ ((st.v << 4) & M32)) ^ (t ^ ((t << 1) & M32))
    st.d = (st.d + 362437) & M32
    return (st.d + st.v) & M32


def xorwow_seed(seed: int) -> XorwowState:
    """Fill the six words from splitmix64; an all-zero xorshift part gets x = 1."""
    words = expand_seed(seed, 6, 32)
    if not any(words[:5]):
        words[0] = 1
    return XorwowState(*words)


@dataclass
class Mt19937State:
    mt: list[int]
    index: int = MT_N


def mt_seed(seed: int) -> Mt19937State:
    """``init_genrand`` from the reference implementation."""
    mt = [seed & M32]
    for i in range(1, MT_N):
        prev = mt[-1]
        mt.append((1812433253 * (prev ^ (prev >> 30)) + i) & M32)
    return Mt19937State(mt, MT_N)


def _mt_twist(mt: list[int]) -> None:
    for i in range(MT_N):
        y = (mt[i] & 0x80000000) | (mt[(i + 1) % MT_N] & 0x7FFFFFFF)
        v = mt[(i + MT_M) % MT_N] ^ (y >> 1)
        if y & 1:
            v ^= 0x9908B0DF
        mt[i] = v


def mt_next(st: Mt19937State) -> int:
    if st.index >= MT_N:
        _mt_twist(st.mt)
        st.index = 0
    y = st.mt[st.index]
    st.index += 1
    y ^= y >> 11
    y ^= (y << 7) & 0x9D2C5680
    y ^= (y << 15) & 0xEFC60000
    y ^= y >> 18
    return y & M32


def raw_xorgens_next(state: XorgensState) -> int:
    return step_linear(state)


def raw_xorgens(params: GeneratorParams = XORGENSGP_32, seed: int = 0) -> Xorgens:
    return Xorgens(params, seed, weyl=False)


class Xorwow:
    name = "xorwow"
    word_bits = 32
    state_words = 6
    period_display = "2^{192}-2^{32}"

    def __init__(self, seed: int = 0, state: XorwowState | None = None):
        self.seed = seed
        self.state = state if state is not None else xorwow_seed(seed)

    @classmethod
    def marsaglia(cls) -> Xorwow:
        return cls(state=XorwowState(*XORWOW_MARSAGLIA))

    def next_word(self) -> int:
        return xorwow_next(self.state)

    def _arr(self):
        return np.array(self.state.as_tuple(), dtype=np.uint64)

    def _store(self, arr):
        self.state = XorwowState(*(int(v) for v in arr))

    def words(self, n: int) -> np.ndarray:
        st = self._arr()
        out = np.empty(n, dtype=np.uint64)
        _kernels.xorwow_fill(st, out)
        self._store(st)
        return out

    def xor_fold(self, n: int) -> int:
        st = self._arr()
        acc = _kernels.xorwow_fold(st, n)
        self._store(st)
        return int(acc)

    def describe(self) -> dict:
        return {"algorithm": "xorwow", "state": list(self.state.as_tuple())}


class MT19937:
    name = "mt19937"
    word_bits = 32
    state_words = MT_N + 1
    period_display = "2^{19937}-1"

    def __init__(self, seed: int = 5489):
        self.seed = seed
        self.state = mt_seed(seed)

    def next_word(self) -> int:
        return mt_next(self.state)

    def words(self, n: int) -> np.ndarray:
        mt = np.array(self.state.mt, dtype=np.uint64)
        out = np.empty(n, dtype=np.uint64)
        idx = _kernels.mt_fill(mt, self.state.index, out)
        self.state = Mt19937State(mt.tolist(), int(idx))
        return out

    def xor_fold(self, n: int) -> int:
        mt = np.array(self.state.mt, dtype=np.uint64)
        idx, acc = _kernels.mt_fold(mt, self.state.index, n)
        self.state = Mt19937State(mt.tolist(), int(idx))
        return int(acc)

    def describe(self) -> dict:
        return {"algorithm": "mt19937", "seeding": "init_genrand"}
