"""Compiled inner loops shared by the generators.

All kernels work on ``uint64`` arrays and mask results down to the word
size, so one compiled body serves w in {8, 16, 32, 64}. Every scalar
argument that meets a shift or an add is passed as ``uint64``; mixing
signed and unsigned integers makes numba fall back to float64.
"""

import numpy as np
from numba import njit


@njit(nogil=True, cache=True)
def xorgens_fill(x, idx, weyl, r, s, a, b, c, d, mask, omega, gamma,
                 lanes, use_weyl, out):
    """Advance an xorgens state ``out.size`` steps, writing each output.

    Terms are produced in batches of ``lanes``: every term of a batch is
    computed from the buffer as it stood before the batch, then all are
    written back. With ``lanes <= min(s, r - s)`` this equals serial
    stepping. Returns the updated ``(idx, weyl)``.
    """
    n = out.size
    tmp = np.empty(lanes, np.uint64)
    k = 0
    while k < n:
        m = min(lanes, n - k)
        for l in range(m):
            j = idx + l
            if j >= r:
                j -= r
            js = j + r - s
            if js >= r:
                js -= r
            t = x[j]
            t ^= (t << a) & mask
            t ^= t >> b
            v = x[js]
            v ^= (v << c) & mask
            v ^= v >> d
            tmp[l] = t ^ v
        for l in range(m):
            j = idx + l
            if j >= r:
                j -= r
            x[j] = tmp[l]
            if use_weyl:
                weyl = (weyl + omega) & mask
                out[k + l] = ((weyl ^ (weyl >> gamma)) + tmp[l]) & mask
            else:
                out[k + l] = tmp[l]
        idx = (idx + m) % r
        k += m
    return idx, weyl


@njit(nogil=True, cache=True)
def xorgens_fold(x, idx, weyl, r, s, a, b, c, d, mask, omega, gamma,
                 use_weyl, n):
    """Serial stepping that folds outputs into an XOR accumulator."""
    acc = np.uint64(0)
    for _ in range(n):
        t = x[idx]
        js = idx + r - s
        if js >= r:
            js -= r
        t ^= (t << a) & mask
        t ^= t >> b
        v = x[js]
        v ^= (v << c) & mask
        v ^= v >> d
        t ^= v
        x[idx] = t
        idx += 1
        if idx == r:
            idx = 0
        if use_weyl:
            weyl = (weyl + omega) & mask
            acc ^= ((weyl ^ (weyl >> gamma)) + t) & mask
        else:
            acc ^= t
    return idx, weyl, acc


@njit(nogil=True, cache=True)
def linear_orbit(x, r, s, a, b, c, d, mask, max_steps):
    """Steps until the linear buffer returns to its start, or -1.

    Compares canonical (oldest-first) order, so the returned count is the
    period of the sequence of buffer contents.
    """
    start = x.copy()
    idx = 0
    for step in range(1, max_steps + 1):
        t = x[idx]
        js = idx + r - s
        if js >= r:
            js -= r
        t ^= (t << a) & mask
        t ^= t >> b
        v = x[js]
        v ^= (v << c) & mask
        v ^= v >> d
        x[idx] = t ^ v
        idx += 1
        if idx == r:
            idx = 0
        same = True
        for q in range(r):
            j = idx + q
            if j >= r:
                j -= r
            if x[j] != start[q]:
                same = False
                break
        if same:
            return step
    return -1


@njit(nogil=True, cache=True)
def xorwow_fill(st, out):
    """Marsaglia's xorwow: ``st`` holds x, y, z, w, v, d as uint64."""
    mask = np.uint64(0xFFFFFFFF)
    x, y, z, w, v, d = st[0], st[1], st[2], st[3], st[4], st[5]
    inc = np.uint64(362437)
    for k in range(out.size):
        t = x ^ (x >> np.uint64(2))
        x = y
        y = z
        z = w
        w = v
        v = (v ^ ((v << np.uint64(4)) & mask)) ^ (t ^ ((t << np.uint64(1)) & mask))
        d = (d + inc) & mask
        out[k] = (d + v) & mask
    st[0], st[1], st[2], st[3], st[4], st[5] = x, y, z, w, v, d


@njit(nogil=True, cache=True)
def xorwow_fold(st, n):
    mask = np.uint64(0xFFFFFFFF)
    x, y, z, w, v, d = st[0], st[1], st[2], st[3], st[4], st[5]
    inc = np.uint64(362437)
    acc = np.uint64(0)
    for _ in range(n):
        t = x ^ (x >> np.uint64(2))
        x = y
        y = z
        z = w
        w = v
        v = (v ^ ((v << np.uint64(4)) & mask)) ^ (t ^ ((t << np.uint64(1)) & mask))
        d = (d + inc) & mask
        acc ^= (d + v) & mask
    st[0], st[1], st[2], st[3], st[4], st[5] = x, y, z, w, v, d
    return acc


@njit(nogil=True, cache=True)
def _mt_twist(mt):
    upper = np.uint64(0x80000000)
    lower = np.uint64(0x7FFFFFFF)
    matrix_a = np.uint64(0x9908B0DF)
    one = np.uint64(1)
    for i in range(624):
        y = (mt[i] & upper) | (mt[(i + 1) % 624] & lower)
        v = mt[(i + 397) % 624] ^ (y >> one)
        if y & one:
            v ^= matrix_a
        mt[i] = v


@njit(nogil=True, cache=True)
def _mt_temper(y):
    mask = np.uint64(0xFFFFFFFF)
    y ^= y >> np.uint64(11)
    y ^= (y << np.uint64(7)) & np.uint64(0x9D2C5680)
    y ^= (y << np.uint64(15)) & np.uint64(0xEFC60000)
    y ^= y >> np.uint64(18)
    return y & mask


@njit(nogil=True, cache=True)
def mt_fill(mt, index, out):
    for k in range(out.size):
        if index >= 624:
            _mt_twist(mt)
            index = 0
        out[k] = _mt_temper(mt[index])
        index += 1
    return index


@njit(nogil=True, cache=True)
def mt_fold(mt, index, n):
    acc = np.uint64(0)
    for _ in range(n):
        if index >= 624:
            _mt_twist(mt)
            index = 0
        acc ^= _mt_temper(mt[index])
        index += 1
    return index, acc


@njit(nogil=True, cache=True)
def gf2_rank_rows(rows, ncols):
    """Rank over GF(2) of a matrix whose rows are packed into uint64."""
    m = rows.copy()
    nrows = m.size
    rank = 0
    for col in range(ncols - 1, -1, -1):
        bit = np.uint64(1) << np.uint64(col)
        pivot = -1
        for i in range(rank, nrows):
            if m[i] & bit:
                pivot = i
                break
        if pivot < 0:
            continue
        tmp = m[rank]
        m[rank] = m[pivot]
        m[pivot] = tmp
        for i in range(nrows):
            if i != rank and (m[i] & bit):
                m[i] ^= m[rank]
        rank += 1
        if rank == nrows:
            break
    return rank


@njit(nogil=True, cache=True)
def batch_gf2_ranks(rows, nrows, ncols, out):
    for k in range(out.size):
        out[k] = gf2_rank_rows(rows[k * nrows:(k + 1) * nrows], ncols)


@njit(nogil=True, cache=True)
def berlekamp_massey(s):
    """Linear complexity of the 0/1 array ``s`` over GF(2)."""
    n = s.size
    c = np.zeros(n + 1, np.uint8)
    bb = np.zeros(n + 1, np.uint8)
    t = np.zeros(n + 1, np.uint8)
    c[0] = 1
    bb[0] = 1
    length = 0
    blen = 0  # degree bound of bb
    m = -1
    for i in range(n):
        disc = s[i]
        for j in range(1, length + 1):
            disc ^= c[j] & s[i - j]
        if disc:
            shift = i - m
            top = min(blen, n - shift)
            if 2 * length <= i:
                for j in range(length + 1):
                    t[j] = c[j]
                for j in range(top + 1):
                    c[j + shift] ^= bb[j]
                old = length
                length = i + 1 - length
                m = i
                tmp = bb
                bb = t
                t = tmp
                blen = old
            else:
                for j in range(top + 1):
                    c[j + shift] ^= bb[j]
    return length


@njit(nogil=True, cache=True)
def block_complexities(bits, k, out):
    for q in range(out.size):
        out[q] = berlekamp_massey(bits[q * k:(q + 1) * k])
