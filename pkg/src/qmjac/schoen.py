"""Restriction of f_hat = prod f(t_i) to the linear space P0 and the check
that minus it is a fourth power.

Points of Sym^g P^1 are written through the elementary symmetric functions
e_1..e_g of t_1..t_g. On P0 the upper half is fixed by the lower half:
e_{g-i} = -e_i + (-1)^{g/2+i} c_i e_{g/2}, where the c_i come from the
symmetric form q1(X, Y) = X Y prod (X - beta_j Y)(X - Y/beta_j).

Here f(t) = t (t^2 - 1)^2 prod (t - beta_j)^2 (t - 1/beta_j)^2, so that
prod f(t_i) = Res(E, f) for E(t) = prod (t - t_i); the auxiliary
denominator (t - gamma)^(2g+4) only rescales by a fourth power.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .algebra import Poly, as_fraction, integer_nth_root, resultant
from .errors import QMError


def _q1_poly(beta: Sequence[Fraction]) -> Poly:
    """q1(u, 1) = u prod (u - beta_j)(u - 1/beta_j)."""
    out = Poly([0, 1])
    for b in beta:
        out = out * Poly([-b, 1]) * Poly([-1 / b, 1])
    return out


def compute_c_coefficients(g: int, beta: Sequence) -> list[Fraction]:
    """c_0..c_g with sum c_j u^j = 2 q1(u, 1) / Z_{g/2}(q1)."""
    beta = [as_fraction(b) for b in beta]
    _validate(g, beta)
    q1 = _q1_poly(beta)
    z = Fraction(q1[g // 2])
    if z == 0:
        raise QMError("PRECONDITION_FAILED", "middle coefficient of q1 vanishes")
    return [2 * Fraction(q1[j]) / z for j in range(g + 1)]


def _validate(g: int, beta: list[Fraction]) -> None:
    if g < 4 or g % 2:
        raise QMError("DEGENERATE_INPUT", "g must be even and at least 4")
    if len(beta) != g // 2 - 1:
        raise QMError("DEGENERATE_INPUT", f"expected {g // 2 - 1} values of beta")
    seen = set()
    for b in beta:
        if b == 0 or b**4 == 1:
            raise QMError("PRECONDITION_FAILED", f"beta = {b} is not admissible")
        for v in (b, 1 / b):
            if v in seen:
                raise QMError("PRECONDITION_FAILED", "beta values collide")
            seen.add(v)


@dataclass(frozen=True)
class SchoenContext:
    g: int
    beta: tuple[Fraction, ...]
    gamma: Fraction
    q1: Poly
    Zg2: Fraction
    c: tuple[Fraction, ...]

    @classmethod
    def make(cls, g: int, beta: Sequence, gamma=None) -> "SchoenContext":
        beta = tuple(as_fraction(b) for b in beta)
        c = compute_c_coefficients(g, beta)
        q1 = _q1_poly(beta)
        branch = {Fraction(0), Fraction(1), Fraction(-1)} | set(beta) | {1 / b for b in beta}
        if gamma is None:
            gamma = next(n for n in range(1, 10**6) if Fraction(n) not in branch)
        gamma = as_fraction(gamma)
        if gamma in branch:
            raise QMError("PRECONDITION_FAILED", "gamma must avoid the branch points")
        ctx = cls(g, beta, gamma, q1, Fraction(q1[g // 2]), tuple(c))
        ctx._check()
        return ctx

    @property
    def delta(self) -> tuple[Fraction, ...]:
        return tuple(-b for b in self.beta)

    def f_poly(self) -> Poly:
        f = Poly([0, 1]) * Poly([-1, 0, 1]) ** 2
        for b in self.beta:
            f = f * (Poly([-b, 1]) * Poly([-1 / b, 1])) ** 2
        return f

    def _check(self) -> None:
        g, c = self.g, self.c
        problems = []
        if c[0] != 0 or c[g] != 0:
            problems.append("c_0, c_g not zero")
        if c[g // 2] != 2:
            problems.append("c_{g/2} != 2")
        if any(c[j] != c[g - j] for j in range(g + 1)):
            problems.append("c not symmetric")
        sym = Poly([1])
        for dl in self.delta:
            sym = sym * Poly([dl, 1]) * Poly([1 / dl, 1])
        if not all(isinstance(v, Fraction) or isinstance(v, int) for v in sym.coeffs):
            problems.append("symmetrised polynomial not rational")
        if problems:
            raise QMError("INTERNAL_ERROR", "; ".join(problems))

    def to_json(self) -> dict:
        return {
            "g": self.g,
            "beta": [str(b) for b in self.beta],
            "gamma": str(self.gamma),
            "Z_g2": str(self.Zg2),
            "c": [str(v) for v in self.c],
        }


def surprising_symmetry_check(ctx: SchoenContext, c: Sequence | None = None) -> bool:
    """sum_i c_i (-delta_j)^i = 0 for every j."""
    c = list(ctx.c if c is None else c)
    return all(sum(ci * (-dl) ** i for i, ci in enumerate(c)) == 0 for dl in ctx.delta)


@dataclass(frozen=True)
class P0Point:
    free: tuple[Fraction, ...]  # e_1 .. e_{g/2}
    e: tuple[Fraction, ...]  # e_0 .. e_g

    @classmethod
    def make(cls, ctx: SchoenContext, free: Sequence) -> "P0Point":
        g, h = ctx.g, ctx.g // 2
        free = tuple(as_fraction(v) for v in free)
        if len(free) != h:
            raise QMError("DEGENERATE_INPUT", f"expected {h} free coordinates")
        e = [Fraction(0)] * (g + 1)
        e[0] = Fraction(1)
        for i, v in enumerate(free, 1):
            e[i] = v
        for i in range(h):
            e[g - i] = -e[i] + (-1) ** (h + i) * ctx.c[i] * e[h]
        if e[g] != -1:
            raise QMError("INTERNAL_ERROR", "e_g != -1 on P0")
        return cls(free, tuple(e))

    def E_poly(self) -> Poly:
        """prod (t - t_i) = sum_k (-1)^k e_k t^(g-k)."""
        g = len(self.e) - 1
        return Poly([(-1) ** (g - j) * self.e[g - j] for j in range(g + 1)])


def _root_sum(e: Sequence[Fraction], r: Fraction) -> Fraction:
    """prod_i (t_i + r) = sum_k e_k r^(g-k)."""
    g = len(e) - 1
    return sum(e[k] * r ** (g - k) for k in range(g + 1))


def _factors(ctx: SchoenContext, point: P0Point) -> dict[str, Fraction]:
    e = point.e
    out = {
        "e_g": e[ctx.g],
        "sum_e": sum(e),
        "alt_sum_e": sum((-1) ** i * v for i, v in enumerate(e)),
    }
    for j, dl in enumerate(ctx.delta, 1):
        out[f"delta{j}"] = _root_sum(e, dl)
        out[f"inv_delta{j}"] = _root_sum(e, 1 / dl)
    return out


def restrict_fhat_to_P0(ctx: SchoenContext, point: P0Point, method: str = "resultant") -> Fraction:
    """prod (t_i - gamma)^(2g+4) f_hat at the point, i.e. prod_i f(t_i)."""
    e = point.e
    h = ctx.g // 2
    factors = _factors(ctx, point)
    if e[h] != 0 and any(v == 0 for v in factors.values()):
        raise QMError("DEGENERATE_POINT", "a factor vanishes at this point")
    if method == "resultant":
        return Fraction(resultant(point.E_poly(), ctx.f_poly()))
    if method == "factored":
        value = factors["e_g"] * factors["sum_e"] ** 2 * factors["alt_sum_e"] ** 2
        for j in range(1, len(ctx.beta) + 1):
            value *= factors[f"delta{j}"] ** 2 * factors[f"inv_delta{j}"] ** 2
        return value
    raise QMError("DEGENERATE_INPUT", f"unknown method {method!r}")


def fhat_value(ctx: SchoenContext, point: P0Point) -> Fraction:
    """f_hat itself, dividing out prod (t_i - gamma)^(2g+4) = E(gamma)^(2g+4)."""
    eg = point.E_poly()(ctx.gamma)
    if eg == 0:
        raise QMError("DEGENERATE_POINT", "a point coordinate equals gamma")
    return restrict_fhat_to_P0(ctx, point) / Fraction(eg) ** (2 * ctx.g + 4)


def pair_factor_identity(ctx: SchoenContext, point: P0Point) -> bool:
    """(sum e_i)(sum (-1)^i e_i) = (-1)^(d+1) prod (delta - 1/delta)^2 e_{g/2}^2 / Z^2.

    The sign comes from q1(-1, 1) = -prod (1 + beta)(1 + 1/beta); it drops
    out of f_hat, where this factor appears squared.
    """
    f = _factors(ctx, point)
    d = len(ctx.beta)
    rhs = Fraction((-1) ** (d + 1))
    for dl in ctx.delta:
        rhs *= (dl - 1 / dl) ** 2
    rhs *= point.e[ctx.g // 2] ** 2 / ctx.Zg2**2
    return f["sum_e"] * f["alt_sum_e"] == rhs


def _cheb_ratio(dl: Fraction, k: int) -> Fraction:
    """(dl^k - dl^-k) / (dl - dl^-1)."""
    return (dl**k - dl ** (-k)) / (dl - 1 / dl)


def fourth_root_closed_form(ctx: SchoenContext, point: P0Point) -> Fraction:
    """u with -prod f(t_i) = u^4, assembled from the per-root factors."""
    g, h = ctx.g, ctx.g // 2
    e = point.e
    d = len(ctx.beta)
    u = e[h] / ctx.Zg2
    for dl in ctx.delta:
        qt = sum(e[i] * _cheb_ratio(dl, h - i) for i in range(d + 1))
        qt += Fraction(1, 2) * (-1) ** h * e[h] * sum((-1) ** i * ctx.c[i] * _cheb_ratio(dl, i - h) for i in range(d + 1))
        u *= qt * (dl - 1 / dl) ** 2
    return u


def is_rational_fourth_power(v) -> tuple[bool, Fraction | None]:
    v = as_fraction(v)
    if v < 0:
        return False, None
    if v == 0:
        return True, Fraction(0)
    num = integer_nth_root(v.numerator, 4)
    den = integer_nth_root(v.denominator, 4)
    if num is None or den is None:
        return False, None
    return True, Fraction(num, den)


@dataclass
class FourthPowerReport:
    ctx: SchoenContext
    sign: int
    trials: list[dict] = field(default_factory=list)
    rejected: int = 0
    symbolic: bool | None = None

    @property
    def passed(self) -> int:
        return sum(1 for t in self.trials if t["fourth_power"])

    @property
    def ok(self) -> bool:
        return self.passed == len(self.trials) and self.symbolic is not False

    def to_json(self) -> dict:
        return {
            "context": self.ctx.to_json(),
            "sign": self.sign,
            "trials": [
                {
                    "point": [str(v) for v in t["point"]],
                    "value": str(t["value"]),
                    "fourth_power": t["fourth_power"],
                    "root": None if t["root"] is None else str(t["root"]),
                }
                for t in self.trials
            ],
            "passed": self.passed,
            "rejected_draws": self.rejected,
            "symbolic": self.symbolic,
            "ok": self.ok,
        }


def random_point(ctx: SchoenContext, rng: random.Random, bound: int = 1000) -> P0Point:
    free = []
    for _ in range(ctx.g // 2):
        den = rng.randint(1, bound)
        free.append(Fraction(rng.randint(-bound, bound), den))
    return P0Point.make(ctx, free)


def verify_fourth_power_identity(
    ctx: SchoenContext,
    trials: int = 25,
    seed: int = 1,
    symbolic: bool | None = None,
    sign: int = -1,
) -> FourthPowerReport:
    """Check that sign * f_hat|P0 is a rational fourth power on random points.

    With the default sign -1 every nondegenerate point must pass; sign +1 is
    the control. The symbolic check runs by default only for g = 4.
    """
    rng = random.Random(seed)
    report = FourthPowerReport(ctx, sign)
    while len(report.trials) < trials:
        point = random_point(ctx, rng)
        if point.e[ctx.g // 2] == 0:
            report.rejected += 1
            continue
        try:
            value = sign * fhat_value(ctx, point)
        except QMError:
            report.rejected += 1
            continue
        ok, root = is_rational_fourth_power(value)
        report.trials.append({"point": point.free, "value": value, "fourth_power": ok, "root": root})
    if symbolic is None:
        symbolic = ctx.g == 4
    if symbolic:
        report.symbolic = symbolic_fourth_power_check(ctx, sign)
    return report


def symbolic_fourth_power_check(ctx: SchoenContext, sign: int = -1) -> bool:
    """sign * Res(E, f) as a polynomial in the free coordinates is a fourth power.

    Factors over Q; passes when every irreducible factor has multiplicity
    divisible by 4 and the leading constant is a positive rational fourth power.
    """
    import sympy as sp

    g, h = ctx.g, ctx.g // 2
    t = sp.symbols("t")
    free = sp.symbols(f"e1:{h + 1}")
    e = [sp.Integer(1)] + list(free) + [sp.Integer(0)] * (g - h)
    for i in range(h):
        ci = sp.Rational(ctx.c[i].numerator, ctx.c[i].denominator)
        e[g - i] = -e[i] + (-1) ** (h + i) * ci * e[h]
    E = sum((-1) ** k * e[k] * t ** (g - k) for k in range(g + 1))
    f = sp.Poly([sp.Rational(Fraction(c).numerator, Fraction(c).denominator) for c in reversed(ctx.f_poly().coeffs)], t).as_expr()
    value = sp.expand(sign * sp.resultant(E, f, t))
    const, factors = sp.factor_list(value)
    if any(m % 4 for _, m in factors):
        return False
    ok, _ = is_rational_fourth_power(Fraction(int(sp.numer(const)), int(sp.denom(const))))
    return ok
