"""The Q8-symmetric hyperelliptic family y^2 = f(x) of even genus g >= 4.

In A-coordinates

    f(x) = x (x^4 - 1) (x^{2g-4} + 1 + sum_j a_j (x^{2g-4-2j} + x^{2j})),

with d = g/2 - 1 parameters. In B-coordinates the last factor is
prod_j (x^2 - b_j^2)(x^2 - b_j^-2), so the finite Weierstrass points are
0, +-1, +-i, +-b_j, +-1/b_j.
"""

from __future__ import annotations

import cmath
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .algebra import (
    GaussianRational,
    Poly,
    as_fraction,
    discriminant,
    frac_str,
    simplify_scalar,
)
from .errors import QMError


def _parse_gaussian(x) -> GaussianRational:
    if isinstance(x, str):
        s = x.strip().replace(" ", "")
        if s.endswith("i") or s.endswith("*i"):
            body = s[:-2] if s.endswith("*i") else s[:-1]
            # split "re+im" at the last sign that is not leading
            for k in range(len(body) - 1, 0, -1):
                if body[k] in "+-" and body[k - 1] not in "eE/":
                    re, im = body[:k], body[k:]
                    return GaussianRational(Fraction(re), Fraction(_unit(im)))
            return GaussianRational(0, Fraction(_unit(body)))
        return GaussianRational(Fraction(s))
    return GaussianRational.coerce(x)


def _unit(s: str) -> str:
    if s in ("", "+"):
        return "1"
    if s == "-":
        return "-1"
    return s


@dataclass(frozen=True)
class FamilyParams:
    """A fiber of the family: genus plus either A- or B-coordinates."""

    g: int
    a: tuple = None
    b: tuple = None

    def __post_init__(self):
        if self.g < 4 or self.g % 2:
            raise QMError("DEGENERATE_INPUT", f"genus must be even and >= 4, got {self.g}")
        if (self.a is None) == (self.b is None):
            raise QMError("DEGENERATE_INPUT", "give exactly one of a or b")
        coords = self.a if self.a is not None else self.b
        if len(coords) != self.d:
            raise QMError(
                "DEGENERATE_INPUT", f"genus {self.g} needs {self.d} parameters, got {len(coords)}"
            )
        if self.a is not None:
            object.__setattr__(self, "a", tuple(simplify_scalar(_parse_gaussian(v)) for v in self.a))
        else:
            bs = tuple(_parse_gaussian(v) for v in self.b)
            for v in bs:
                if v == 0 or v**4 == 1:
                    raise QMError("DEGENERATE_INPUT", f"b = {v} is 0 or a 4th root of unity")
            object.__setattr__(self, "b", bs)

    @property
    def d(self) -> int:
        return self.g // 2 - 1

    @classmethod
    def from_a(cls, g: int, a: Sequence) -> "FamilyParams":
        return cls(g, a=tuple(a))

    @classmethod
    def from_b(cls, g: int, b: Sequence) -> "FamilyParams":
        return cls(g, b=tuple(b))

    def a_coordinates(self) -> tuple:
        if self.a is not None:
            return self.a
        return tuple(base_change_b_to_a(self.g, self.b))

    def is_rational(self) -> bool:
        return all(not isinstance(v, GaussianRational) or v.im == 0 for v in self.a_coordinates())

    def canonical(self) -> str:
        """Stable string key used by the point-count cache."""
        return ",".join(_scalar_str(v) for v in self.a_coordinates())

    def to_json(self) -> dict:
        out = {"g": self.g, "d": self.d}
        out["a"] = [_scalar_json(v) for v in self.a_coordinates()]
        if self.b is not None:
            out["b"] = [_scalar_json(v) for v in self.b]
        return out


def _scalar_str(v) -> str:
    v = simplify_scalar(v)
    if isinstance(v, GaussianRational):
        return f"{frac_str(v.re)}+{frac_str(v.im)}i"
    return frac_str(v)


def _scalar_json(v):
    v = simplify_scalar(v)
    if isinstance(v, GaussianRational):
        return [frac_str(v.re), frac_str(v.im)]
    return frac_str(v)


@dataclass(frozen=True)
class HyperellipticModel:
    f: Poly

    @property
    def genus(self) -> int:
        return (self.f.degree - 1) // 2

    def to_json(self) -> dict:
        return {"genus": self.genus, "f": self.f.to_json(), "pretty": self.f.pretty()}


def symmetric_factor(g: int, a: Sequence) -> Poly:
    """x^{2g-4} + 1 + sum_j a_j (x^{2g-4-2j} + x^{2j})."""
    n = 2 * g - 4
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[0] += 1
    coeffs[n] += 1
    for j, aj in enumerate(a, start=1):
        coeffs[n - 2 * j] = coeffs[n - 2 * j] + aj
        coeffs[2 * j] = coeffs[2 * j] + aj
    return Poly(coeffs)


def build_family_poly(params: FamilyParams) -> HyperellipticModel:
    a = params.a_coordinates()
    base = Poly([0, -1, 0, 0, 0, 1])  # x^5 - x
    return HyperellipticModel(base * symmetric_factor(params.g, a))


def polynomial_discriminant(params: FamilyParams):
    """Discriminant of the degree-(2g+1) polynomial f itself."""
    return discriminant(build_family_poly(params).f)


def family_discriminant(params: FamilyParams):
    """Discriminant of the curve y^2 = f(x): 2^{4g} disc(f).

    This is the normalisation under which the genus-4 fibers satisfy
    |Delta(a)| = 2^40 |a^2 - 1|^6.
    """
    return simplify_scalar(2 ** (4 * params.g) * polynomial_discriminant(params))


def base_change_b_to_a(g: int, b: Sequence) -> list:
    """A-coordinates of the fiber whose extra roots are +-b_j, +-1/b_j."""
    bs = [_parse_gaussian(v) for v in b]
    if any(v == 0 for v in bs):
        raise QMError("DEGENERATE_INPUT", "b_j = 0")
    prod = Poly([1])
    for v in bs:
        prod = prod * Poly([-(v * v), 0, 1]) * Poly([-(1 / (v * v)), 0, 1])
    d = g // 2 - 1
    a = [prod[2 * j] for j in range(1, d)]
    a.append(prod[2 * d] / 2)
    return [simplify_scalar(v) for v in a]


def verify_q8_symmetry(model: HyperellipticModel) -> bool:
    """f(-x) = -f(x) and x^{2g+2} f(1/x) = -f(x)."""
    f = model.f
    n = f.degree
    if n < 3 or n % 2 == 0:
        return False
    g = (n - 1) // 2
    odd = all(f[k] == 0 for k in range(0, n + 1, 2))
    # x^{2g+2} f(1/x) has coefficient f[k] at x^{2g+2-k}
    flipped = Poly([f[2 * g + 2 - k] if 0 <= 2 * g + 2 - k <= n else 0 for k in range(2 * g + 3)])
    return odd and flipped == -f


# --------------------------------------------------------------------------
# Weierstrass data


STABILIZERS = {"0": "alpha", "inf": "alpha", "1": "beta", "-1": "beta", "i": "alpha*beta", "-i": "alpha*beta"}


@dataclass(frozen=True)
class WeierstrassSet:
    labels: tuple[str, ...]
    values: tuple
    stabilizer_order: dict = field(hash=False)
    stabilizer_generator: dict = field(hash=False)

    @property
    def finite_labels(self) -> tuple[str, ...]:
        return tuple(l for l in self.labels if l != "inf")

    def to_json(self) -> dict:
        return {
            "labels": list(self.labels),
            "values": [None if v is None else _scalar_json(v) for v in self.values],
            "stabilizer_order": dict(self.stabilizer_order),
            "stabilizer_generator": dict(self.stabilizer_generator),
        }


def weierstrass_labels(d: int) -> list[str]:
    """Finite labels in the fixed order 0, 1, -1, i, -i, b1, -b1, 1/b1, -1/b1, ..."""
    labels = ["0", "1", "-1", "i", "-i"]
    for j in range(1, d + 1):
        labels += [f"b{j}", f"-b{j}", f"1/b{j}", f"-1/b{j}"]
    return labels


def weierstrass_data(params: FamilyParams) -> WeierstrassSet:
    if params.b is None:
        raise QMError("DEGENERATE_INPUT", "Weierstrass labels need B-coordinates")
    one = GaussianRational(1)
    i = GaussianRational(0, 1)
    values = [GaussianRational(0), one, -one, i, -i]
    for bj in params.b:
        values += [bj, -bj, 1 / bj, -(1 / bj)]
    labels = weierstrass_labels(params.d)
    seen = {}
    for lab, v in zip(labels, values):
        if v in seen:
            raise QMError("SINGULAR_FIBER", f"{lab} collides with {seen[v]}")
        seen[v] = lab
    labels.append("inf")
    values.append(None)
    order = {lab: (4 if lab in STABILIZERS else 2) for lab in labels}
    gen = {lab: STABILIZERS.get(lab, "iota") for lab in labels}
    return WeierstrassSet(tuple(labels), tuple(values), order, gen)


# --------------------------------------------------------------------------
# Genus-4 moduli orbit and automorphism scan


def _orbit_maps():
    return (
        lambda a: a,
        lambda a: -a,
        lambda a: (a + 3) / (a - 1),
        lambda a: -(a + 3) / (a - 1),
        lambda a: (a - 3) / (a + 1),
        lambda a: -(a - 3) / (a + 1),
    )


ORBIT_MAPS = _orbit_maps()


def moduli_orbit_g4(a) -> frozenset:
    a = as_fraction(a) if not isinstance(a, GaussianRational) else a
    if a == 1 or a == -1:
        raise QMError("SINGULAR_FIBER", "a = +-1 gives a singular fiber")
    return frozenset(simplify_scalar(m(a)) for m in ORBIT_MAPS)


def special_point_set(b) -> list:
    """S = {0, inf, +-1, +-i, +-b, +-1/b}; infinity is represented by None."""
    if isinstance(b, complex):
        pts = [0j, None, 1 + 0j, -1 + 0j, 1j, -1j, b, -b, 1 / b, -1 / b]
    else:
        b = _parse_gaussian(b)
        if b == 0:
            raise QMError("SINGULAR_FIBER", "b = 0")
        one, i = GaussianRational(1), GaussianRational(0, 1)
        pts = [GaussianRational(0), None, one, -one, i, -i, b, -b, 1 / b, -(1 / b)]
    return pts


def _mobius_to_01inf(z1, z2, z3):
    """Coefficients (A, B, C, D) of the map sending z1, z2, z3 to 0, 1, inf."""
    if z1 is None:
        return (0, z2 - z3, 1, -z3)
    if z2 is None:
        return (1, -z1, 1, -z3)
    if z3 is None:
        return (1, -z1, 0, z2 - z1)
    return (z2 - z3, -z1 * (z2 - z3), z2 - z1, -z3 * (z2 - z1))


def _apply(m, x, is_zero):
    A, B, C, D = m
    if x is None:
        num, den = A, C
    else:
        num, den = A * x + B, C * x + D
    if is_zero(den):
        return None
    if isinstance(num, int) and isinstance(den, int):
        return Fraction(num, den)
    return num / den


def _normalise(m, is_zero):
    for v in m:
        if not is_zero(v):
            return tuple(w / v for w in m)
    raise QMError("INTERNAL_ERROR", "zero Mobius matrix")


def extra_automorphism_scan(b, tol: float = 1e-9) -> list[tuple]:
    """All fractional-linear maps x -> (Ax+B)/(Cx+D) preserving S.

    Each such map sends exactly one ordered triple of S to (0, 1, inf), so
    running over the 720 triples finds every one of them. Returns
    normalised coefficient 4-tuples.
    """
    pts = special_point_set(b)
    exact = not isinstance(b, complex)
    if exact:
        is_zero = lambda v: v == 0  # noqa: E731
        finite = [p for p in pts if p is not None]
        if len(set(finite)) != len(finite):
            raise QMError("SINGULAR_FIBER", "points of S collide")

        def member(x, pool):
            return x in pool

    else:
        is_zero = lambda v: abs(v) < tol  # noqa: E731
        finite = [p for p in pts if p is not None]
        for u, v in itertools.combinations(finite, 2):
            if abs(u - v) < tol:
                raise QMError("SINGULAR_FIBER", "points of S collide")

        def member(x, pool):
            if x is None:
                return None in pool
            return any(p is not None and abs(p - x) < tol * max(1.0, abs(x)) for p in pool)

    found = []
    for z1, z2, z3 in itertools.permutations(pts, 3):
        m = _mobius_to_01inf(z1, z2, z3)
        # the map must land on S, and must send (z1,z2,z3) to (0,1,inf) in S
        ok = True
        for x in pts:
            y = _apply(m, x, is_zero)
            if not member(y, pts):
                ok = False
                break
        if ok:
            found.append(_normalise(m, is_zero))
    return found


def mobius_label(m) -> str:
    """Readable name for the four generic maps, else the raw coefficients."""
    A, B, C, D = (complex(v) if not isinstance(v, complex) else v for v in m)
    table = {(1, 0, 0, 1): "x", (1, 0, 0, -1): "-x", (0, 1, 1, 0): "1/x", (0, 1, -1, 0): "-1/x"}
    for key, name in table.items():
        if all(abs(u - v) < 1e-12 for u, v in zip((A, B, C, D), key)):
            return name
    return "(" + ", ".join(str(v) for v in m) + ")"


def exceptional_b() -> complex:
    """A root of b^4 + 6 b^2 + 1, where the fiber acquires extra symmetry."""
    return 1j * (cmath.sqrt(2) - 1)
