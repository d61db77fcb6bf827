import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from xorgensgp import core
from xorgensgp.core import (TINY_PARAMS, XORGENSGP_32, EvenOmegaError, GcdError,
                            GeneratorParams, ShiftRangeError, TapRangeError, WordSizeError,
                            Xorgens, XorgensState, fill_words, fold_words, golden_omega,
                            lane_bound, make_params, next_word, period_description,
                            seed_state, state_words, step_linear, validate_params,
                            weyl_next, xorshift_transform)

GP32_SEED0 = [0x72771021, 0x3a8a7e6c, 0xdba560e5, 0x40cb1932, 0x621c8812, 0xf77c41ca,
              0x3df44476, 0x50aadd4f, 0xe19eede2, 0xda37298c, 0x87dc0911, 0xac64fbe2,
              0x99b43c4d, 0x350378d6, 0xcfd2435b, 0x0d7b5952]
GP32_SEED7_LINEAR = [0x3343a426, 0x3f0a84e3, 0x5a3fc26e, 0x67307759, 0xdffcc592,
                     0x868b28bd, 0x397a845e, 0x58c7438f, 0xcc2dc832, 0x91a5cd54]


def scalar(params, seed):
    p = params
    return oracles.ScalarXorgens(p.r, p.s, p.a, p.b, p.c, p.d, p.w, p.omega, p.gamma, seed)


# --- parameters -------------------------------------------------------------

def test_production_params_accepted():
    p = GeneratorParams(128, 65, 15, 14, 12, 17, 32, omega=2654435769, gamma=16)
    assert validate_params(p) is p


def test_smallest_configuration_accepted():
    make_params(2, 1, 1, 1, 1, 1, w=8)


@pytest.mark.parametrize("kwargs, exc", [
    (dict(r=128, s=64), GcdError),
    (dict(r=128, s=0), TapRangeError),
    (dict(r=128, s=128), TapRangeError),
    (dict(r=128, s=65, a=0), ShiftRangeError),
    (dict(r=128, s=65, d=32), ShiftRangeError),
    (dict(r=128, s=65, omega=2654435768), EvenOmegaError),
    (dict(r=128, s=65, gamma=32), ShiftRangeError),
    (dict(r=128, s=65, w=24), WordSizeError),
])
def test_invalid_params_raise_distinct_errors(kwargs, exc):
    args = dict(a=15, b=14, c=12, d=17, w=32)
    args.update(kwargs)
    with pytest.raises(exc):
        make_params(**args)


def test_error_classes_are_distinct():
    classes = {GcdError, TapRangeError, ShiftRangeError, EvenOmegaError, WordSizeError}
    assert len(classes) == 5
    assert all(issubclass(c, ValueError) for c in classes)


@pytest.mark.parametrize("w", [8, 16, 32, 64])
def test_golden_omega_matches_high_precision(w):
    assert golden_omega(w) == oracles.omega_for(w)


def test_defaults():
    assert XORGENSGP_32.gamma == 16
    assert XORGENSGP_32.omega == 2654435769
    assert lane_bound(XORGENSGP_32) == 63
    assert state_words(XORGENSGP_32) == 129


def test_period_description():
    assert period_description(XORGENSGP_32).display == "≈2^{4128}"
    d = period_description(TINY_PARAMS["r2w8"])
    assert (d.linear_exponent, d.weyl_factor_exponent) == (16, 8)
    assert d.exact == (2**16 - 1) * 2**8
    p64 = make_params(64, 33, 1, 1, 1, 1, w=64)
    assert period_description(p64).display == "≈2^{4160}"


# --- xorshift and stepping ------------------------------------------------

def test_xorshift_examples():
    assert xorshift_transform(0, 15, 14) == 0
    assert xorshift_transform(0x01, 1, 1, w=8) == 0x02
    assert xorshift_transform(0xFFFFFFFF, 15, 14, w=32) == 0x7FFE


@given(st.integers(0, 2**32 - 1), st.integers(0, 2**32 - 1),
       st.integers(1, 31), st.integers(1, 31))
def test_xorshift_is_linear(x, y, a, b):
    assert (xorshift_transform(x ^ y, a, b) ==
            xorshift_transform(x, a, b) ^ xorshift_transform(y, a, b))


def test_weyl_examples():
    p = make_params(2, 1, 1, 1, 1, 1, w=8, omega=1)
    st8 = XorgensState(p, [1, 0], 0, 255)
    assert weyl_next(st8) == 0
    st32 = XorgensState(XORGENSGP_32, [1] + [0] * 127, 0, 0)
    assert [weyl_next(st32) for _ in range(3)] == [2654435769, 1013904242, 3668340011]


@pytest.mark.parametrize("w", [8, 16])
def test_weyl_full_cycle(w):
    p = make_params(2, 1, 1, 1, 1, 1, w=w)
    state = XorgensState(p, [1, 0], 0, 12345 & p.mask)
    seen = {weyl_next(state) for _ in range(2**w)}
    assert len(seen) == 2**w
    assert state.weyl == 12345 & p.mask


def test_zero_buffer_is_absorbing():
    state = XorgensState(XORGENSGP_32, [0] * 128, 0, 0)
    assert [step_linear(state) for _ in range(300)] == [0] * 300
    assert not any(state.x)


def test_linear_kat_against_scalar_oracle():
    state = seed_state(XORGENSGP_32, 7)
    ref = scalar(XORGENSGP_32, 7)
    got = [step_linear(state) for _ in range(10)]
    assert got == [ref.linear() for _ in range(10)]
    assert got == GP32_SEED7_LINEAR


def test_output_kat_against_scalar_oracle():
    g = Xorgens(XORGENSGP_32, 0)
    ref = scalar(XORGENSGP_32, 0)
    assert [g.next_word() for _ in range(16)] == GP32_SEED0
    assert [ref.next() for _ in range(16)] == GP32_SEED0


@pytest.mark.parametrize("name", list(TINY_PARAMS))
def test_tiny_streams_match_scalar_oracle(name):
    p = TINY_PARAMS[name]
    g = Xorgens(p, 3)
    ref = scalar(p, 3)
    assert g.words(2000).tolist() == [ref.next() for _ in range(2000)]


def test_kernel_fill_matches_python_stepping():
    a = seed_state(XORGENSGP_32, 11)
    b = a.copy()
    words = fill_words(a, 5000)
    assert words.tolist() == [next_word(b) for _ in range(5000)]
    assert a == b


def test_fold_is_xor_of_words():
    a = seed_state(XORGENSGP_32, 5)
    b = a.copy()
    acc = 0
    for v in fill_words(b, 10_000).tolist():
        acc ^= v
    assert fold_words(a, 10_000) == acc
    assert a == b


def test_call_batching_does_not_matter():
    g1, g2 = Xorgens(seed=9), Xorgens(seed=9)
    whole = g1.words(1000)
    parts = np.concatenate([g2.words(n) for n in (1, 7, 100, 392, 500)])
    assert np.array_equal(whole, parts)


def test_raw_stream_is_step_linear():
    g = Xorgens(XORGENSGP_32, 4, weyl=False)
    state = seed_state(XORGENSGP_32, 4)
    assert g.words(500).tolist() == [step_linear(state) for _ in range(500)]


# --- seeding ----------------------------------------------------------------

def test_seeding_deterministic_and_distinct():
    p = TINY_PARAMS["r4w16"]
    states = [seed_state(p, s) for s in range(256)]
    assert all(seed_state(p, s) == states[s] for s in (0, 17, 255))
    snapshots = {tuple(st.ordered()) for st in states}
    assert len(snapshots) == 256


def test_seeding_never_all_zero():
    for s in range(2000):
        assert any(seed_state(TINY_PARAMS["r2w8"], s, warmup=0).x)


def test_seed_range():
    seed_state(TINY_PARAMS["r2w8"], 2**64 - 1)
    with pytest.raises(ValueError):
        seed_state(TINY_PARAMS["r2w8"], 2**64)
    with pytest.raises(ValueError):
        seed_state(TINY_PARAMS["r2w8"], -1)


def test_expand_seed_is_splitmix64():
    assert core.expand_seed(123, 5, 64) == oracles.splitmix64_stream(123, 5)


def test_footprint():
    assert Xorgens().state_words == 129
    assert Xorgens(weyl=False).state_words == 128


# --- GF(2) structure ------------------------------------------------------

def _pack(state):
    p = state.params
    return sum(v << (j * p.w) for j, v in enumerate(state.ordered()))


@pytest.mark.parametrize("name", ["r2w8", "r3w8", "r4w16"])
def test_step_linear_matches_transition_matrix(name):
    p = TINY_PARAMS[name]
    images = oracles.transition_images(p.r, p.s, p.a, p.b, p.c, p.d, p.w)
    rng = np.random.default_rng(1)
    for _ in range(50):
        words = [int(v) for v in rng.integers(0, 2**p.w, p.r)]
        idx = int(rng.integers(0, p.r))
        # place words so that ordered() gives ``words``
        x = [0] * p.r
        for j, v in enumerate(words):
            x[(idx + j) % p.r] = v
        state = XorgensState(p, x, idx, 0)
        before = _pack(state)
        step_linear(state)
        assert _pack(state) == oracles.apply_images(images, before)


def test_next_word_is_not_linear():
    # output of the XOR of two states differs from the XOR of the outputs
    p = TINY_PARAMS["r2w16"]
    failures = 0
    for k in range(20):
        s1, s2 = seed_state(p, 2 * k), seed_state(p, 2 * k + 1)
        s3 = XorgensState(p, [u ^ v for u, v in zip(s1.x, s2.x)], s1.idx, s1.weyl ^ s2.weyl)
        if next_word(s3) != next_word(s1) ^ next_word(s2):
            failures += 1
    assert failures > 10


def test_lsb_of_raw_stream_has_bounded_complexity():
    from xorgensgp.stattests import berlekamp_massey
    p = TINY_PARAMS["r2w8"]
    bits = Xorgens(p, 1, weyl=False).words(400) & np.uint64(1)
    assert berlekamp_massey(bits) <= p.r * p.w


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(list(TINY_PARAMS)), st.integers(0, 2**64 - 1),
       st.integers(0, 300))
def test_determinism_property(name, seed, n):
    p = TINY_PARAMS[name]
    assert np.array_equal(Xorgens(p, seed).words(n), Xorgens(p, seed).words(n))


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(list(TINY_PARAMS)), st.integers(0, 2**64 - 1))
def test_outputs_fit_word_size(name, seed):
    p = TINY_PARAMS[name]
    assert int(Xorgens(p, seed).words(256).max()) <= p.mask


def test_forced_component_output():
    p = make_params(2, 1, 1, 1, 1, 1, w=8, omega=1, gamma=4)
    state = XorgensState(p, [0, 0], 0, 0)
    assert next_word(state) == 1


def test_lane_bound_examples():
    assert lane_bound(make_params(2, 1, 1, 1, 1, 1, w=8)) == 1
    assert lane_bound(make_params(128, 95, 1, 1, 1, 1)) == 33


def test_weyl_ablation_diverges():
    full = Xorgens(XORGENSGP_32, 0).words(10**6)
    raw = Xorgens(XORGENSGP_32, 0, weyl=False).words(10**6)
    assert not np.array_equal(full, raw)
