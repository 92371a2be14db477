"""Numpy implementation of the point-counting loops.

Mirrors the compiled kernel: same function names, same arguments, same
results. Elements are processed in chunks as (r, chunk) coordinate arrays.
"""

from __future__ import annotations

import numpy as np

CHUNK = 1 << 18


def _digits(indices: np.ndarray, r: int, p: int) -> np.ndarray:
    out = np.empty((r, indices.size), dtype=np.int64)
    n = indices.copy()
    for k in range(r):
        out[k] = n % p
        n //= p
    return out


def _index(coords: np.ndarray, p: int) -> np.ndarray:
    n = np.zeros(coords.shape[1], dtype=np.int64)
    for k in range(coords.shape[0] - 1, -1, -1):
        n = n * p + coords[k]
    return n


def _mulmod(a: np.ndarray, b: np.ndarray, modulus: np.ndarray, p: int) -> np.ndarray:
    r = a.shape[0]
    prod = np.zeros((2 * r - 1, a.shape[1]), dtype=np.int64)
    for i in range(r):
        for j in range(r):
            prod[i + j] += a[i] * b[j]
    prod %= p
    for k in range(2 * r - 2, r - 1, -1):
        c = prod[k]
        for j in range(r):
            if modulus[j]:
                prod[k - r + j] = (prod[k - r + j] - c * modulus[j]) % p
    return prod[:r] % p


def square_table(p: int, r: int, modulus) -> np.ndarray:
    q = p**r
    mod = np.asarray(modulus, dtype=np.int64)
    table = np.zeros(q, dtype=np.uint8)
    for start in range(1, q, CHUNK):
        idx = np.arange(start, min(start + CHUNK, q), dtype=np.int64)
        x = _digits(idx, r, p)
        table[_index(_mulmod(x, x, mod, p), p)] = 1
    return table


def character_sum(coeffs, p: int, r: int, modulus, squares, start: int, stop: int) -> int:
    cf = [int(c) % p for c in coeffs]
    # odd f = x h(x^2): chi(f(x)) = chi(x) chi(h(x^2))
    odd = len(cf) > 1 and all(c == 0 for c in cf[0::2])
    if odd:
        cf = cf[1::2]
    mod = np.asarray(modulus, dtype=np.int64)
    squares = np.asarray(squares, dtype=np.uint8)
    total = 0
    for lo in range(start, stop, CHUNK):
        idx = np.arange(lo, min(lo + CHUNK, stop), dtype=np.int64)
        x = _digits(idx, r, p)
        y = _mulmod(x, x, mod, p) if odd else x
        acc = np.zeros_like(x)
        acc[0] = cf[-1]
        for c in reversed(cf[:-1]):
            acc = _mulmod(acc, y, mod, p)
            acc[0] = (acc[0] + c) % p
        values = _index(acc, p)
        chi = 2 * squares[values].astype(np.int64) - 1
        chi[values == 0] = 0
        if odd:
            chi_x = 2 * squares[idx].astype(np.int64) - 1
            chi_x[idx == 0] = 0
            chi = chi * chi_x
        total += int(chi.sum())
    return total
