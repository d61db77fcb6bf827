"""Block- and lane-parallel generation (xorgensGP).

Two levels of parallelism, both bit-exact with serial generation:

* blocks: ``p`` independent states seeded ``base_seed, base_seed + 1, ...``,
  one per worker, producing disjoint streams;
* lanes: inside one state, up to ``min(s, r - s)`` consecutive terms of the
  recurrence depend only on words already in the buffer and can be
  evaluated together.

Past ``min(s, r - s)`` lanes a batch either reads a term that is not yet
written (``lanes > s``) or overwrites a slot another lane still has to read
(``lanes > r - s``). :func:`unsynchronised_batch` reproduces the second
hazard for demonstration.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import (MASK64, GeneratorParams, XorgensState, fill_words, lane_bound,
                   seed_state, validate_params, xorshift_transform)

__all__ = ["LaneBoundError", "BlockEnsemble", "create_ensemble", "batch_step",
           "generate", "mt_parallel_bound", "unsynchronised_batch"]


class LaneBoundError(ValueError):
    """Requested more lanes than the recurrence allows."""


def _check_lanes(params: GeneratorParams, lanes: int) -> None:
    bound = lane_bound(params)
    if not 1 <= lanes <= bound:
        raise LaneBoundError(
            f"lanes={lanes} outside [1, {bound}] = [1, min(s, r-s)] "
            f"for r={params.r}, s={params.s}")


@dataclass
class BlockEnsemble:
    params: GeneratorParams
    blocks: list[XorgensState]
    base_seed: int
    lanes: int = 1

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)


def create_ensemble(params: GeneratorParams, base_seed: int, num_blocks: int,
                    lanes: int = 1) -> BlockEnsemble:
    """Seed ``num_blocks`` states with consecutive seeds (mod 2^64)."""
    validate_params(params)
    if num_blocks < 1:
        raise ValueError("num_blocks must be positive")
    _check_lanes(params, lanes)
    blocks = [seed_state(params, (base_seed + i) & MASK64) for i in range(num_blocks)]
    return BlockEnsemble(params, blocks, base_seed, lanes)


def _lane_terms(state: XorgensState, lanes: int) -> np.ndarray:
    """Linear terms x_i .. x_{i+lanes-1}, all read from the current buffer."""
    p = state.params
    x = np.array(state.x, dtype=np.uint64)
    mask = np.uint64(p.mask)
    pos = (state.idx + np.arange(lanes)) % p.r
    old = x[pos]
    tap = x[(pos + p.r - p.s) % p.r]
    t = old ^ ((old << np.uint64(p.a)) & mask)
    t ^= t >> np.uint64(p.b)
    u = tap ^ ((tap << np.uint64(p.c)) & mask)
    u ^= u >> np.uint64(p.d)
    return t ^ u


def _weyl_outputs(state: XorgensState, terms: np.ndarray) -> np.ndarray:
    p = state.params
    # closed form weyl_0 + k * omega, in Python ints so w = 64 cannot overflow
    weyls = np.array([(state.weyl + k * p.omega) & p.mask
                      for k in range(1, terms.size + 1)], dtype=np.uint64)
    out = ((weyls ^ (weyls >> np.uint64(p.gamma))) + terms) & np.uint64(p.mask)
    state.weyl = int(weyls[-1]) if terms.size else state.weyl
    return out


def batch_step(state: XorgensState, lanes: int) -> np.ndarray:
    """Produce the next ``lanes`` outputs with one vectorised batch.

    Every lane reads only buffer words older than the batch, so lanes are
    independent; the Weyl term for output k is taken in closed form from
    the accumulator. The result equals ``lanes`` calls of ``next_word``.
    """
    _check_lanes(state.params, lanes)
    terms = _lane_terms(state, lanes)
    p = state.params
    for l, v in enumerate(terms.tolist()):
        state.x[(state.idx + l) % p.r] = v
    state.idx = (state.idx + lanes) % p.r
    return _weyl_outputs(state, terms)


def unsynchronised_batch(state: XorgensState, lanes: int) -> list[int]:
    """Linear terms from lanes that each read then write with no barrier.

    Lanes run highest index first, each writing its slot in place before
    lower lanes read. Lane ``l`` reads the slot that lane ``l + (r - s)``
    overwrites, and a lane ``l >= s`` reads a term its partner has not
    written yet, so results match serial stepping only while
    ``lanes <= min(s, r - s)``. No bound check; Weyl untouched.
    """
    p = state.params
    done = {}
    for l in reversed(range(lanes)):
        slot = (state.idx + l) % p.r
        tap = (slot + p.r - p.s) % p.r
        v = (xorshift_transform(state.x[slot], p.a, p.b, p.w)
             ^ xorshift_transform(state.x[tap], p.c, p.d, p.w))
        state.x[slot] = v
        done[l] = v
    state.idx = (state.idx + lanes) % p.r
    return [done[l] for l in range(lanes)]


def generate(ensemble: BlockEnsemble, per_block: int,
             workers: int | None = None) -> list[np.ndarray]:
    """Next ``per_block`` words from every block, in block order.

    Blocks are independent so they are fanned out over a thread pool; the
    kernels release the GIL. Output never depends on ``workers``.
    """
    lanes = ensemble.lanes

    def run(state):
        return fill_words(state, per_block, lanes=lanes)

    if workers == 1 or ensemble.num_blocks == 1:
        return [run(st) for st in ensemble.blocks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, ensemble.blocks))


def mt_parallel_bound(n: int, m: int) -> int:
    """Terms of an MT-style recurrence x_i = h(x_{i-N}, x_{i-N+1}, x_{i-N+M})
    computable at once."""
    if not 0 < m < n:
        raise ValueError(f"need 0 < M < N, got N={n}, M={m}")
    return n - m
