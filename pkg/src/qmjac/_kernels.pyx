# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled point-counting loops over F_{p^r}.

Field elements are coordinate vectors in the power basis of a monic
irreducible modulus; element n has coordinates given by its base-p digits.
"""

import numpy as np
cimport numpy as cnp

cdef enum:
    MAXR = 16

ctypedef long long i64


cdef inline i64 _fmod(i64 c, i64 p, double inv) noexcept nogil:
    # c >= 0 and c < 2^50: floating-point quotient estimate, then fix up
    cdef i64 t = c - p * <i64>(c * inv)
    if t < 0:
        t += p
    elif t >= p:
        t -= p
    return t


cdef inline void _increment(i64* a, int r, i64 p) noexcept nogil:
    cdef int k = 0
    while k < r:
        a[k] += 1
        if a[k] < p:
            return
        a[k] = 0
        k += 1


cdef inline void _mulmod(const i64* a, const i64* b, i64* out, const i64* red,
                         int r, i64 p) noexcept nogil:
    # red[(k - r) * r + j] is the x^j coordinate of x^k mod the modulus,
    # so each output coordinate needs a single reduction mod p.
    cdef i64 prod[2 * MAXR]
    cdef int i, j, k
    cdef i64 c
    for k in range(2 * r - 1):
        prod[k] = 0
    for i in range(r):
        if a[i] == 0:
            continue
        for j in range(r):
            prod[i + j] += a[i] * b[j]
    cdef double inv = 1.0 / p
    for k in range(r, 2 * r - 1):
        prod[k] = _fmod(prod[k], p, inv)
    for j in range(r):
        c = prod[j]
        for k in range(r, 2 * r - 1):
            c += prod[k] * red[(k - r) * r + j]
        out[j] = _fmod(c, p, inv)


cdef inline bint _bit(const unsigned char* table, i64 n) noexcept nogil:
    return (table[n >> 3] >> (n & 7)) & 1


cdef inline i64 _index(const i64* a, int r, i64 p) noexcept nogil:
    cdef i64 n = 0
    cdef int k
    for k in range(r - 1, -1, -1):
        n = n * p + a[k]
    return n


cdef inline void _digits(i64 n, i64* a, int r, i64 p) noexcept nogil:
    cdef int k
    for k in range(r):
        a[k] = n % p
        n //= p


def reduction_table(i64 p, int r, modulus):
    """Coordinates of x^r, ..., x^(2r-2) reduced by the monic modulus."""
    cdef list rows = []
    cur = [(-c) % p for c in list(modulus)[:r]]  # x^r
    for _ in range(r - 1):
        rows.extend(cur)
        top = cur[r - 1]
        nxt = [0] + cur[: r - 1]
        cur = [(nxt[j] - top * list(modulus)[j]) % p for j in range(r)]
    if r == 1:
        return np.zeros(1, dtype=np.int64)
    return np.asarray(rows, dtype=np.int64)


def square_table(i64 p, int r, modulus):
    """Bitset (uint8 array, little-endian bits) marking the nonzero squares
    of F_{p^r} by element index. Packing keeps the table cache-resident."""
    if p >= (1 << 20) or r > MAXR:
        raise ValueError("field too large for the compiled kernel")
    cdef i64 q = p ** r
    cdef cnp.ndarray[cnp.int64_t, ndim=1] mod = reduction_table(p, r, modulus)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] table = np.zeros(q // 8 + 1, dtype=np.uint8)
    cdef i64 x[MAXR]
    cdef i64 y[MAXR]
    cdef i64 n, idx
    cdef unsigned char* tp = <unsigned char*> table.data
    cdef const i64* mp = <const i64*> mod.data
    with nogil:
        _digits(0, x, r, p)
        for n in range(1, q):
            _increment(x, r, p)
            _mulmod(x, x, y, mp, r, p)
            idx = _index(y, r, p)
            tp[idx >> 3] |= <unsigned char>(1 << (idx & 7))
    return table


def character_sum(coeffs, i64 p, int r, modulus, squares, i64 start, i64 stop):
    """Sum of chi(f(x)) over elements x with index in [start, stop).

    ``coeffs`` holds f mod p, lowest degree first. Odd f is evaluated as
    x h(x^2), using chi(f(x)) = chi(x) chi(h(x^2)).
    """
    if p >= (1 << 20) or r > MAXR:
        raise ValueError("field too large for the compiled kernel")
    coeffs = [int(c) % p for c in coeffs]
    cdef bint odd = len(coeffs) > 1 and all(c == 0 for c in coeffs[0::2])
    if odd:
        coeffs = coeffs[1::2]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] cf = np.ascontiguousarray(coeffs, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] mod = reduction_table(p, r, modulus)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] table = np.ascontiguousarray(squares, dtype=np.uint8)
    cdef int deg = cf.shape[0] - 1
    cdef i64 x[MAXR]
    cdef i64 acc[MAXR]
    cdef i64 tmp[MAXR]
    cdef i64 y[MAXR]
    cdef i64 n, idx, total = 0
    cdef int sign
    cdef int k, j
    cdef const i64* cp = <const i64*> cf.data
    cdef const i64* mp = <const i64*> mod.data
    cdef const unsigned char* tp = <const unsigned char*> table.data
    with nogil:
        _digits(start, x, r, p)
        for n in range(start, stop):
            if n > start:
                _increment(x, r, p)
            sign = 1
            if odd:
                if n == 0:
                    continue
                if not _bit(tp, n):
                    sign = -1
                _mulmod(x, x, y, mp, r, p)
            else:
                for j in range(r):
                    y[j] = x[j]
            for j in range(r):
                acc[j] = 0
            acc[0] = cp[deg]
            for k in range(deg - 1, -1, -1):
                _mulmod(acc, y, tmp, mp, r, p)
                tmp[0] += cp[k]
                if tmp[0] >= p:
                    tmp[0] -= p
                for j in range(r):
                    acc[j] = tmp[j]
            idx = _index(acc, r, p)
            if idx == 0:
                continue
            if _bit(tp, idx):
                total += sign
            else:
                total -= sign
    return total
