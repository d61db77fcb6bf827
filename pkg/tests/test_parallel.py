import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xorgensgp.core import (TINY_PARAMS, XORGENSGP_32, Xorgens, fill_words, lane_bound,
                            next_word, seed_state, step_linear)
from xorgensgp.parallel import (LaneBoundError, batch_step, create_ensemble, generate,
                                mt_parallel_bound, unsynchronised_batch)


def serial(params, seed, n):
    state = seed_state(params, seed)
    return [next_word(state) for _ in range(n)]


def test_single_block_single_lane_is_serial():
    ens = create_ensemble(XORGENSGP_32, 0, 1, 1)
    assert generate(ens, 300)[0].tolist() == serial(XORGENSGP_32, 0, 300)


def test_ensemble_seeds_are_consecutive():
    ens = create_ensemble(TINY_PARAMS["r2w16"], 100, 4)
    assert [b == seed_state(TINY_PARAMS["r2w16"], 100 + i) for i, b in enumerate(ens.blocks)] \
        == [True] * 4


def test_seed_wraps_mod_2_64():
    ens = create_ensemble(TINY_PARAMS["r2w8"], 2**64 - 1, 2)
    assert ens.blocks[1] == seed_state(TINY_PARAMS["r2w8"], 0)


def test_create_ensemble_errors():
    with pytest.raises(LaneBoundError):
        create_ensemble(XORGENSGP_32, 0, 1, lanes=64)
    with pytest.raises(LaneBoundError):
        create_ensemble(XORGENSGP_32, 0, 1, lanes=0)
    with pytest.raises(ValueError):
        create_ensemble(XORGENSGP_32, 0, 0)


def test_tiny_r4_allows_one_lane():
    p = TINY_PARAMS["r4w8"]
    assert lane_bound(p) == 1
    state = seed_state(p, 0)
    batch_step(state, 1)
    with pytest.raises(LaneBoundError):
        batch_step(state, 2)


def test_batch_step_one_lane_is_next_word():
    a = seed_state(XORGENSGP_32, 3)
    b = a.copy()
    for _ in range(200):
        assert batch_step(a, 1).tolist() == [next_word(b)]
    assert a == b


@pytest.mark.parametrize("lanes", [1, 2, 17, 32, 62, 63])
@pytest.mark.parametrize("per_block", [1, 17, 10_000])
def test_batch_step_matches_serial(lanes, per_block):
    a = seed_state(XORGENSGP_32, lanes)
    b = a.copy()
    got = []
    while len(got) < per_block:
        got.extend(batch_step(a, lanes).tolist())
    assert got == [next_word(b) for _ in range(len(got))]
    assert a == b


@pytest.mark.parametrize("lanes", range(1, 64))
def test_kernel_lanes_match_serial(lanes):
    a = seed_state(XORGENSGP_32, 1)
    b = a.copy()
    assert np.array_equal(fill_words(a, 3000, lanes=lanes), fill_words(b, 3000))
    assert a == b


def test_generate_empty_blocks():
    out = generate(create_ensemble(XORGENSGP_32, 0, 2), 0)
    assert [len(o) for o in out] == [0, 0]


def test_generate_is_two_serial_runs():
    base = 2**40
    out = generate(create_ensemble(XORGENSGP_32, base, 2), 10_000)
    for i in range(2):
        assert np.array_equal(out[i], Xorgens(XORGENSGP_32, base + i).words(10_000))


def test_generate_schedule_independent():
    runs = [generate(create_ensemble(XORGENSGP_32, 5, 8, lanes=32), 10**5, workers=w)
            for w in (1, 3, 8)]
    for other in runs[1:]:
        assert all(np.array_equal(x, y) for x, y in zip(runs[0], other))


def test_block_independence():
    ens = create_ensemble(TINY_PARAMS["r2w16"], 0, 3)
    ref = generate(create_ensemble(TINY_PARAMS["r2w16"], 0, 3), 500)
    ens.blocks[1].x = [1, 2]
    out = generate(ens, 500)
    assert np.array_equal(out[0], ref[0]) and np.array_equal(out[2], ref[2])
    assert not np.array_equal(out[1], ref[1])


def test_unsynchronised_within_bound_is_serial():
    a = seed_state(XORGENSGP_32, 0)
    b = a.copy()
    assert unsynchronised_batch(a, 63) == [step_linear(b) for _ in range(63)]


def test_unsynchronised_past_bound_is_wrong():
    a = seed_state(XORGENSGP_32, 0)
    b = a.copy()
    got = unsynchronised_batch(a, 64)
    want = [step_linear(b) for _ in range(64)]
    assert got != want
    assert got[1:] == want[1:]  # only the lane whose tap was overwritten is wrong


@pytest.mark.parametrize("name", list(TINY_PARAMS))
def test_lane_bound_tight_for_tiny_params(name):
    p = TINY_PARAMS[name]
    k = lane_bound(p) + 1
    wrong = 0
    for seed in range(20):
        a = seed_state(p, seed)
        b = a.copy()
        if unsynchronised_batch(a, k) != [step_linear(b) for _ in range(k)]:
            wrong += 1
    assert wrong > 0


def test_mt_parallel_bound():
    assert mt_parallel_bound(624, 397) == 227
    assert mt_parallel_bound(2, 1) == 1
    with pytest.raises(ValueError):
        mt_parallel_bound(397, 624)
    with pytest.raises(ValueError):
        mt_parallel_bound(5, 5)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**64 - 1), st.integers(1, 63), st.integers(0, 400))
def test_lane_batching_property(seed, lanes, n):
    a = seed_state(XORGENSGP_32, seed)
    b = a.copy()
    assert np.array_equal(fill_words(a, n, lanes=lanes), fill_words(b, n))
