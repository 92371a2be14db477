"""Exact arithmetic: Gaussian rationals, univariate polynomials, resultants,
cyclotomic polynomials, finite fields F_{p^r}, valuations on Q(i) and
rational quaternions.

Rationals are :class:`fractions.Fraction` throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import QMError

INF = math.inf


def as_fraction(x) -> Fraction:
    """Parse ints, Fractions and strings like ``"3/4"`` into a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, GaussianRational):
        if x.im != 0:
            raise QMError("DEGENERATE_INPUT", f"{x} is not rational")
        return x.re
    raise TypeError(f"cannot convert {x!r} to Fraction")


def frac_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


# --------------------------------------------------------------------------
# Gaussian rationals


class GaussianRational:
    """An element re + im*i of Q(i)."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = as_fraction(re)
        self.im = as_fraction(im)

    @staticmethod
    def coerce(x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, complex):
            raise TypeError("complex floats are not exact")
        return GaussianRational(as_fraction(x), 0)

    def __add__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return GaussianRational.coerce(other) - self

    def __mul__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def inverse(self) -> "GaussianRational":
        n = self.norm()
        if n == 0:
            raise QMError("DIVISION_BY_ZERO", "inverse of 0 in Q(i)")
        return GaussianRational(self.re / n, -self.im / n)

    def __truediv__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = GaussianRational(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def is_rational(self) -> bool:
        return self.im == 0

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}*i"
        return f"{self.re}+{self.im}*i" if self.im > 0 else f"{self.re}{self.im}*i"


I = GaussianRational(0, 1)


def simplify_scalar(x):
    """Drop to Fraction when a Gaussian rational happens to be real."""
    if isinstance(x, GaussianRational) and x.im == 0:
        return x.re
    if isinstance(x, int):
        return Fraction(x)
    return x


# --------------------------------------------------------------------------
# Univariate polynomials


class Poly:
    """Dense univariate polynomial; ``coeffs[k]`` is the x^k coefficient.

    Coefficients may be ints, Fractions or GaussianRationals. Trailing
    zeros are stripped, so the zero polynomial has ``coeffs == []``.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [simplify_scalar(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = cs

    @classmethod
    def x(cls) -> "Poly":
        return cls([0, 1])

    @classmethod
    def constant(cls, c) -> "Poly":
        return cls([c])

    @classmethod
    def from_roots(cls, roots) -> "Poly":
        out = cls([1])
        for r in roots:
            out = out * cls([-r, 1])
        return out

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def lc(self):
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __getitem__(self, k: int):
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Fraction(0)

    def __len__(self):
        return len(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, Poly):
            other = Poly([other])
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(self.coeffs))

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly([other])
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(self[k] + other[k] for k in range(n))

    __radd__ = __add__

    def __neg__(self):
        return Poly(-c for c in self.coeffs)

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly([other])
        return self + (-other)

    def __rsub__(self, other):
        return Poly([other]) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return Poly(c * other for c in self.coeffs)
        if not self.coeffs or not other.coeffs:
            return Poly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        result = Poly([1])
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __call__(self, x):
        acc = Fraction(0) if not isinstance(x, (complex, float)) else 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __repr__(self):
        return f"Poly({[str(c) for c in self.coeffs]})"

    def __str__(self):
        return self.pretty()

    def pretty(self, var: str = "x") -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
            if isinstance(c, GaussianRational):
                cs = f"({c})"
            else:
                cs = str(c)
            if mono and cs == "1":
                term = mono
            elif mono and cs == "-1":
                term = "-" + mono
            else:
                term = cs + ("*" + mono if mono else "")
            terms.append(term)
        s = " + ".join(terms)
        return s.replace("+ -", "- ")

    def derivative(self) -> "Poly":
        return Poly(k * self.coeffs[k] for k in range(1, len(self.coeffs)))

    def divmod(self, other: "Poly"):
        if other.is_zero():
            raise QMError("DIVISION_BY_ZERO", "polynomial division by zero")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return Poly(), Poly(rem)
        quo = [Fraction(0)] * (dq + 1)
        lead = other.coeffs[-1]
        for k in range(dq, -1, -1):
            c = rem[k + len(other.coeffs) - 1]
            if c == 0:
                continue
            q = c / lead
            quo[k] = q
            for j, b in enumerate(other.coeffs):
                rem[k + j] = rem[k + j] - q * b
        return Poly(quo), Poly(rem)

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def exact_div(self, other: "Poly") -> "Poly":
        q, r = self.divmod(other)
        if not r.is_zero():
            raise QMError("INTERNAL_ERROR", "division was expected to be exact")
        return q

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        lead = self.lc()
        return Poly(c / lead for c in self.coeffs)

    def gcd(self, other: "Poly") -> "Poly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def scale_variable(self, s) -> "Poly":
        """Return the polynomial x -> f(s*x)."""
        out = []
        power = Fraction(1)
        for c in self.coeffs:
            out.append(c * power)
            power = power * s
        return Poly(out)

    def reverse(self, n: int | None = None) -> "Poly":
        """x^n f(1/x), with n defaulting to the degree."""
        if n is None:
            n = self.degree
        cs = self.coeffs + [Fraction(0)] * (n + 1 - len(self.coeffs))
        return Poly(reversed(cs[: n + 1]))

    def compose(self, inner: "Poly") -> "Poly":
        acc = Poly()
        for c in reversed(self.coeffs):
            acc = acc * inner + c
        return acc

    def is_integral(self) -> bool:
        return all(
            not isinstance(c, GaussianRational) and Fraction(c).denominator == 1
            for c in self.coeffs
        )

    def int_coeffs(self) -> list[int]:
        if not self.is_integral():
            raise QMError("DEGENERATE_INPUT", "polynomial has non-integer coefficients")
        return [int(Fraction(c)) for c in self.coeffs]

    def to_json(self) -> list[str]:
        out = []
        for c in self.coeffs:
            if isinstance(c, GaussianRational):
                out.append([frac_str(c.re), frac_str(c.im)])
            else:
                out.append(frac_str(Fraction(c)))
        return out


# --------------------------------------------------------------------------
# Linear algebra over exact fields


def determinant(matrix: Sequence[Sequence]) -> Fraction:
    """Exact determinant by Gaussian elimination over Q or Q(i)."""
    m = [[simplify_scalar(v) for v in row] for row in matrix]
    n = len(m)
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        pv = m[col][col]
        det = det * pv
        for r in range(col + 1, n):
            if m[r][col] == 0:
                continue
            factor = m[r][col] / pv
            row_r, row_c = m[r], m[col]
            for k in range(col, n):
                row_r[k] = row_r[k] - factor * row_c[k]
    return simplify_scalar(det)


def sylvester_matrix(f: Poly, g: Poly) -> list[list]:
    m, n = f.degree, g.degree
    size = m + n
    rows = []
    fc = list(reversed(f.coeffs))
    gc = list(reversed(g.coeffs))
    for k in range(n):
        rows.append([Fraction(0)] * k + fc + [Fraction(0)] * (size - k - m - 1))
    for k in range(m):
        rows.append([Fraction(0)] * k + gc + [Fraction(0)] * (size - k - n - 1))
    return rows


def resultant(f: Poly, g: Poly):
    """Sylvester resultant, normalised as lc(f)^deg(g) * prod g(roots of f)."""
    if f.is_zero() and g.is_zero():
        raise QMError("DEGENERATE_INPUT", "resultant of two zero polynomials")
    if f.is_zero() or g.is_zero():
        return Fraction(0)
    if f.degree == 0:
        return simplify_scalar(f.coeffs[0] ** g.degree)
    if g.degree == 0:
        return simplify_scalar(g.coeffs[0] ** f.degree)
    return determinant(sylvester_matrix(f, g))


def discriminant(f: Poly):
    n = f.degree
    if n < 1:
        raise QMError("DEGENERATE_INPUT", "discriminant of a constant")
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return simplify_scalar(sign * resultant(f, f.derivative()) / f.lc())


# --------------------------------------------------------------------------
# Integer helpers


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def factorize(n: int) -> dict[int, int]:
    """Trial-division factorisation of |n| (n is always small here)."""
    n = abs(n)
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def euler_phi(k: int) -> int:
    result = k
    for q in factorize(k):
        result = result // q * (q - 1)
    return result


def squarefree_kernel(n: int) -> int:
    """Squarefree part of an integer, keeping the sign."""
    if n == 0:
        return 0
    out = -1 if n < 0 else 1
    for q, e in factorize(n).items():
        if e % 2:
            out *= q
    return out


def vp(n: int, p: int) -> float:
    """p-adic valuation of a nonzero integer; infinity for 0."""
    if n == 0:
        return INF
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def vp_fraction(x: Fraction, p: int):
    x = Fraction(x)
    if x == 0:
        return INF
    return vp(x.numerator, p) - vp(x.denominator, p)


def legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def sqrt_mod(n: int, p: int) -> int | None:
    """A square root of n modulo an odd prime p (Tonelli-Shanks), or None."""
    n %= p
    if n == 0:
        return 0
    if legendre(n, p) != 1:
        return None
    if p % 4 == 3:
        return pow(n, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while legendre(z, p) != -1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(n, q, p), pow(n, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


def integer_nth_root(n: int, k: int) -> int | None:
    """Exact k-th root of a nonnegative integer, or None."""
    if n < 0:
        return None
    if n < 2:
        return n
    lo, hi = 0, 1 << (n.bit_length() // k + 1)
    while lo < hi:
        mid = (lo + hi) // 2
        if mid**k < n:
            lo = mid + 1
        else:
            hi = mid
    return lo if lo**k == n else None


# --------------------------------------------------------------------------
# Cyclotomic polynomials


def _substitute_power(coeffs: Sequence[int], e: int) -> list[int]:
    out = [0] * ((len(coeffs) - 1) * e + 1)
    for k, c in enumerate(coeffs):
        out[k * e] = c
    return out


@lru_cache(maxsize=None)
def _cyclotomic_coeffs(k: int) -> tuple[int, ...]:
    # Reduce to the squarefree kernel, Phi_k(x) = Phi_rad(k)(x^(k/rad k)),
    # then peel primes off with Phi_{mq}(x) = Phi_m(x^q) / Phi_m(x).
    primes = sorted(factorize(k))
    rad = math.prod(primes)
    if rad != k:
        return tuple(_substitute_power(_cyclotomic_coeffs(rad), k // rad))
    if k == 1:
        return (-1, 1)
    if len(primes) == 1:
        return (1,) * k
    q = primes[-1]
    inner = _cyclotomic_coeffs(k // q)
    num = Poly(_substitute_power(inner, q))
    return tuple(int(c) for c in num.exact_div(Poly(inner)).coeffs)


def cyclotomic(k: int) -> Poly:
    if k < 1:
        raise QMError("DEGENERATE_INPUT", "cyclotomic index must be positive")
    return Poly(_cyclotomic_coeffs(k))


# --------------------------------------------------------------------------
# Polynomials over F_p as int lists (low degree first)


def fp_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def fp_mul(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return fp_trim(out)


def fp_divmod(a: list[int], b: list[int], p: int):
    a = [x % p for x in a]
    b = fp_trim([x % p for x in b])
    if not b:
        raise QMError("DIVISION_BY_ZERO", "division by zero polynomial mod p")
    inv = pow(b[-1], p - 2, p)
    quo = [0] * max(len(a) - len(b) + 1, 0)
    for k in range(len(a) - len(b), -1, -1):
        c = a[k + len(b) - 1] * inv % p
        quo[k] = c
        if c:
            for j, y in enumerate(b):
                a[k + j] = (a[k + j] - c * y) % p
    return fp_trim(quo), fp_trim(a[: len(b) - 1])


def fp_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    a = fp_trim([x % p for x in a])
    b = fp_trim([x % p for x in b])
    while b:
        a, b = b, fp_divmod(a, b, p)[1]
    if a:
        inv = pow(a[-1], p - 2, p)
        a = [x * inv % p for x in a]
    return a


def fp_powmod(base: list[int], e: int, mod: list[int], p: int) -> list[int]:
    result = [1]
    base = fp_divmod(base, mod, p)[1]
    while e:
        if e & 1:
            result = fp_divmod(fp_mul(result, base, p), mod, p)[1]
        base = fp_divmod(fp_mul(base, base, p), mod, p)[1]
        e >>= 1
    return result


def fp_is_irreducible(f: list[int], p: int) -> bool:
    """Rabin's irreducibility test for a monic polynomial over F_p."""
    n = len(f) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    x = [0, 1]
    if fp_powmod(x, p**n, f, p) != fp_divmod(x, f, p)[1]:
        return False
    for q in factorize(n):
        h = fp_powmod(x, p ** (n // q), f, p)
        diff = fp_trim([(h[k] if k < len(h) else 0) - (1 if k == 1 else 0) for k in range(max(len(h), 2))])
        diff = [c % p for c in diff]
        if len(fp_gcd(f, diff, p)) != 1:
            return False
    return True


def fp_squarefree(f: list[int], p: int) -> bool:
    f = fp_trim([c % p for c in f])
    df = fp_trim([(k * f[k]) % p for k in range(1, len(f))])
    if not df:
        return len(f) <= 1
    return len(fp_gcd(f, df, p)) == 1


@lru_cache(maxsize=None)
def irreducible_modulus(p: int, r: int, index: int = 0) -> tuple[int, ...]:
    """The ``index``-th monic irreducible of degree r over F_p in
    lexicographic order of (c_{r-1}, ..., c_0); deterministic so cached
    counts are reproducible."""
    if r == 1:
        if index >= p:
            raise QMError("DEGENERATE_INPUT", "not that many linear moduli")
        return (-index % p, 1)
    found = -1
    for n in range(p**r):
        coeffs = []
        m = n
        for _ in range(r):
            coeffs.append(m % p)
            m //= p
        f = coeffs + [1]
        if f[0] == 0:
            continue
        if fp_is_irreducible(f, p):
            found += 1
            if found == index:
                return tuple(f)
    raise QMError("DEGENERATE_INPUT", "no such irreducible modulus")


# --------------------------------------------------------------------------
# Finite fields


@dataclass(frozen=True)
class FiniteField:
    p: int
    r: int
    modulus: tuple[int, ...]

    @classmethod
    def make(cls, p: int, r: int = 1, modulus_index: int = 0) -> "FiniteField":
        if not is_prime(p):
            raise QMError("DEGENERATE_INPUT", f"{p} is not prime")
        return cls(p, r, irreducible_modulus(p, r, modulus_index))

    @property
    def order(self) -> int:
        return self.p**self.r

    def __call__(self, value) -> "FiniteFieldElement":
        if isinstance(value, int):
            coords = [value % self.p] + [0] * (self.r - 1)
        elif isinstance(value, Fraction):
            if value.denominator % self.p == 0:
                raise QMError("DIVISION_BY_ZERO", "denominator divisible by p")
            c = value.numerator * pow(value.denominator, -1, self.p) % self.p
            coords = [c] + [0] * (self.r - 1)
        else:
            coords = [c % self.p for c in value] + [0] * (self.r - len(value))
        return FiniteFieldElement(self, tuple(coords))

    def element_from_index(self, n: int) -> "FiniteFieldElement":
        coords = []
        for _ in range(self.r):
            coords.append(n % self.p)
            n //= self.p
        return FiniteFieldElement(self, tuple(coords))

    def elements(self):
        for n in range(self.order):
            yield self.element_from_index(n)

    def generator(self) -> "FiniteFieldElement":
        """Smallest (by index) generator of the multiplicative group."""
        q = self.order
        primes = list(factorize(q - 1))
        for n in range(1, q):
            x = self.element_from_index(n)
            if all(x ** ((q - 1) // l) != self(1) for l in primes):
                return x
        raise QMError("INTERNAL_ERROR", "no generator found")


@dataclass(frozen=True)
class FiniteFieldElement:
    field: FiniteField
    coords: tuple[int, ...]

    def _wrap(self, poly: list[int]) -> "FiniteFieldElement":
        r = self.field.r
        poly = list(poly) + [0] * (r - len(poly))
        return FiniteFieldElement(self.field, tuple(poly[:r]))

    def __add__(self, other):
        p = self.field.p
        return FiniteFieldElement(
            self.field, tuple((a + b) % p for a, b in zip(self.coords, other.coords))
        )

    def __sub__(self, other):
        p = self.field.p
        return FiniteFieldElement(
            self.field, tuple((a - b) % p for a, b in zip(self.coords, other.coords))
        )

    def __neg__(self):
        p = self.field.p
        return FiniteFieldElement(self.field, tuple(-a % p for a in self.coords))

    def __mul__(self, other):
        p = self.field.p
        prod = fp_mul(fp_trim(list(self.coords)), fp_trim(list(other.coords)), p)
        return self._wrap(fp_divmod(prod, list(self.field.modulus), p)[1])

    def __pow__(self, e: int):
        p = self.field.p
        if e < 0:
            e %= self.field.order - 1
        res = fp_powmod(fp_trim(list(self.coords)), e, list(self.field.modulus), p)
        return self._wrap(res)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def index(self) -> int:
        n = 0
        for c in reversed(self.coords):
            n = n * self.field.p + c
        return n


def quadratic_character(x: FiniteFieldElement) -> int:
    """Legendre-type character of F_q via Euler's criterion."""
    if x.field.p == 2:
        raise QMError("UNSUPPORTED_CHARACTERISTIC", "characteristic 2")
    if x.is_zero():
        return 0
    y = x ** ((x.field.order - 1) // 2)
    return 1 if y.coords == (1,) + (0,) * (x.field.r - 1) else -1


# --------------------------------------------------------------------------
# Valuations on Q(i) at odd primes


def _hensel_sqrt_minus_one(p: int, residue: int, precision: int) -> int:
    """Lift a root of t^2 + 1 from F_p to Z/p^precision."""
    r = residue % p
    mod = p
    while mod < p**precision:
        mod = min(mod * mod, p**precision)
        # Newton step r <- r - (r^2+1)/(2r)
        r = (r - (r * r + 1) * pow(2 * r, -1, mod)) % mod
    return r


def square_roots_of_minus_one(p: int) -> tuple[int, int]:
    r = sqrt_mod(-1, p)
    if r is None:
        raise QMError("PRECONDITION_FAILED", f"-1 is not a square mod {p}")
    return tuple(sorted((r, p - r)))


def gaussian_valuation(x, p: int, branch: int | None = None, precision: int = 64):
    """Valuation of x in Q(i) at a prime above the odd prime p, with v(p) = 1.

    For p = 3 mod 4 the prime is inert. For p = 1 mod 4 ``branch`` is the
    residue of i modulo the chosen prime (a root of t^2+1 mod p); by default
    the smaller root.
    """
    if p == 2:
        raise QMError("UNSUPPORTED", "the ramified prime 2 is excluded")
    x = GaussianRational.coerce(x)
    if x == 0:
        return INF
    den = math.lcm(x.re.denominator, x.im.denominator)
    a = int(x.re * den)
    b = int(x.im * den)
    if p % 4 == 3:
        return Fraction(vp(a * a + b * b, p), 2) - vp(den, p)
    roots = square_roots_of_minus_one(p)
    if branch is None:
        branch = roots[0]
    if branch % p not in roots:
        raise QMError("DEGENERATE_INPUT", f"{branch} is not a square root of -1 mod {p}")
    # v(a + b i) at one prime is at most v_p(a^2 + b^2).
    needed = max(precision, vp(a * a + b * b, p) + 1)
    r = _hensel_sqrt_minus_one(p, branch, needed)
    return Fraction(vp((a + b * r) % p**needed or p**needed, p) - vp(den, p))


# --------------------------------------------------------------------------
# Rational quaternions (-1,-1 | Q)


class Quaternion:
    """t + x i + y j + z k with i^2 = j^2 = -1 and ij = k = -ji."""

    __slots__ = ("t", "x", "y", "z")

    def __init__(self, t=0, x=0, y=0, z=0):
        self.t = as_fraction(t)
        self.x = as_fraction(x)
        self.y = as_fraction(y)
        self.z = as_fraction(z)

    @staticmethod
    def coerce(q) -> "Quaternion":
        return q if isinstance(q, Quaternion) else Quaternion(q)

    def coords(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.t, self.x, self.y, self.z)

    def __add__(self, other):
        o = Quaternion.coerce(other)
        return Quaternion(*(a + b for a, b in zip(self.coords(), o.coords())))

    __radd__ = __add__

    def __neg__(self):
        return Quaternion(-self.t, -self.x, -self.y, -self.z)

    def __sub__(self, other):
        return self + (-Quaternion.coerce(other))

    def __rsub__(self, other):
        return Quaternion.coerce(other) - self

    def __mul__(self, other):
        o = Quaternion.coerce(other)
        t1, x1, y1, z1 = self.coords()
        t2, x2, y2, z2 = o.coords()
        return Quaternion(
            t1 * t2 - x1 * x2 - y1 * y2 - z1 * z2,
            t1 * x2 + x1 * t2 + y1 * z2 - z1 * y2,
            t1 * y2 - x1 * z2 + y1 * t2 + z1 * x2,
            t1 * z2 + x1 * y2 - y1 * x2 + z1 * t2,
        )

    def __rmul__(self, other):
        return Quaternion.coerce(other) * self

    def conjugate(self) -> "Quaternion":
        return Quaternion(self.t, -self.x, -self.y, -self.z)

    def trd(self) -> Fraction:
        return 2 * self.t

    def nrd(self) -> Fraction:
        return self.t**2 + self.x**2 + self.y**2 + self.z**2

    def inverse(self) -> "Quaternion":
        n = self.nrd()
        if n == 0:
            raise QMError("DIVISION_BY_ZERO", "zero quaternion has no inverse")
        c = self.conjugate()
        return Quaternion(c.t / n, c.x / n, c.y / n, c.z / n)

    def __truediv__(self, other):
        return self * Quaternion.coerce(other).inverse()

    def is_lipschitz(self) -> bool:
        return all(c.denominator == 1 for c in self.coords())

    def __eq__(self, other):
        try:
            o = Quaternion.coerce(other)
        except TypeError:
            return NotImplemented
        return self.coords() == o.coords()

    def __hash__(self):
        return hash(self.coords())

    def __repr__(self):
        return "Quaternion({}, {}, {}, {})".format(*(str(c) for c in self.coords()))

    def __str__(self):
        parts = []
        for c, sym in zip(self.coords(), ("", "i", "j", "k")):
            if c == 0:
                continue
            if sym and c == 1:
                parts.append(sym)
            elif sym and c == -1:
                parts.append("-" + sym)
            else:
                parts.append(f"{c}{sym}")
        return " + ".join(parts).replace("+ -", "- ") if parts else "0"


QI = Quaternion(0, 1, 0, 0)
QJ = Quaternion(0, 0, 1, 0)
QK = Quaternion(0, 0, 0, 1)


def quaternion_ops(a: Quaternion, b: Quaternion) -> dict:
    """Bundle of the basic operations on a pair, used by the CLI."""
    out = {
        "sum": a + b,
        "product": a * b,
        "conjugate_a": a.conjugate(),
        "trd_a": a.trd(),
        "nrd_a": a.nrd(),
    }
    if b.nrd() != 0:
        out["quotient"] = a / b
    return out


# --------------------------------------------------------------------------
# Polynomials over Q(i) needed for quadratic-field factor searches


def newton_to_coefficients(power_sums: Sequence[Fraction], n: int) -> list[Fraction]:
    """Coefficients of prod(1 - a_k T) from power sums p_1..p_n of the a_k.

    Returns [1, c_1, ..., c_n] with k c_k = -sum_{j=1}^{k} p_j c_{k-j}.
    """
    c = [Fraction(1)]
    for k in range(1, n + 1):
        s = Fraction(0)
        for j in range(1, k + 1):
            s += power_sums[j - 1] * c[k - j]
        c.append(-s / k)
    return c


def coefficients_to_power_sums(coeffs: Sequence, n: int) -> list[Fraction]:
    """Power sums p_1..p_n of the inverse roots of 1 + c_1 T + ... ."""
    c = [Fraction(x) for x in coeffs] + [Fraction(0)] * (n + 1)
    p = []
    for k in range(1, n + 1):
        s = -k * c[k]
        for j in range(1, k):
            s -= c[j] * p[k - j - 1]
        p.append(s)
    return p
