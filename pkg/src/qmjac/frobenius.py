"""Point counts, L-polynomials and the endomorphism bookkeeping they feed.

For a fiber with good reduction at p, the L-polynomial

    c_p(T) = prod_{k=1}^{2g} (1 - alpha_k T)

is recovered from point counts through the power sums
p^r + 1 - #C(F_{p^r}) = sum_k alpha_k^r. Its tensor square, with inverse
roots alpha_k alpha_l, splits off cyclotomic factors Phi_k(pT) that bound
the endomorphism algebra over each F_{p^r}.
"""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

from . import kernels
from .algebra import (
    Poly,
    coefficients_to_power_sums,
    cyclotomic,
    euler_phi,
    fp_divmod,
    fp_squarefree,
    frac_str,
    irreducible_modulus,
    is_prime,
    newton_to_coefficients,
)
from .cache import CountCache
from .errors import QMError
from .family import FamilyParams, build_family_poly

DEFAULT_BUDGET = 2**32
GENERIC = "GENERIC"
SQUARE = "SQUARE"


# --------------------------------------------------------------------------
# Counting


def reduce_mod_p(f: Poly, p: int) -> list[int]:
    """Integer coefficients of f mod p; BAD_PRIME if the reduction is not a
    squarefree polynomial of the same degree."""
    if p == 2 or not is_prime(p):
        raise QMError("BAD_PRIME", f"{p} is not an odd prime")
    out = []
    for c in f.coeffs:
        c = Fraction(c)
        if c.denominator % p == 0:
            raise QMError("BAD_PRIME", f"p = {p} divides a coefficient denominator")
        out.append(c.numerator * pow(c.denominator, -1, p) % p)
    if out[-1] == 0 or not fp_squarefree(out, p):
        raise QMError("BAD_PRIME", f"the model has bad reduction at p = {p}")
    return out


def modulus_id(modulus) -> str:
    return ",".join(str(c) for c in modulus)


def count_points(
    params: FamilyParams,
    p: int,
    r: int = 1,
    *,
    budget: int = DEFAULT_BUDGET,
    cache: CountCache | None = None,
    modulus_index: int = 0,
    threads: int = 1,
    backend: str | None = None,
) -> int:
    """#C(F_{p^r}) for the smooth projective model, whose odd-degree affine
    equation has a single point at infinity."""
    if not params.is_rational():
        raise QMError("DEGENERATE_INPUT", "point counting needs rational parameters")
    if r < 1:
        raise QMError("DEGENERATE_INPUT", "extension degree must be >= 1")
    f_mod = reduce_mod_p(build_family_poly(params).f, p)
    q = p**r
    if q > budget:
        raise QMError("BUDGET_EXCEEDED", f"p^r = {q} exceeds the budget {budget}")
    modulus = irreducible_modulus(p, r, modulus_index)
    key = CountCache.make_key(params.g, params.canonical(), p, r, modulus_id(modulus))
    if cache is not None:
        hit = cache.get(key)
        if hit is not None:
            return hit
    count = count_points_raw(f_mod, p, r, modulus, threads=threads, backend=backend)
    if cache is not None:
        cache.put(key, count)
    return count


def count_points_raw(f_mod, p: int, r: int, modulus, *, threads: int = 1, backend: str | None = None) -> int:
    impl = kernels.get_backend(backend)
    q = p**r
    mod = list(modulus)[:r]
    squares = impl.square_table(p, r, mod)
    threads = max(1, int(threads))
    bounds = np.linspace(0, q, threads + 1).astype(np.int64).tolist()
    chunks = list(zip(bounds[:-1], bounds[1:]))
    if threads == 1:
        sums = [impl.character_sum(f_mod, p, r, mod, squares, lo, hi) for lo, hi in chunks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            sums = list(pool.map(lambda c: impl.character_sum(f_mod, p, r, mod, squares, *c), chunks))
    return q + 1 + int(sum(sums))


# --------------------------------------------------------------------------
# Fitting


def power_sums_from_counts(counts: Mapping[int, int], p: int, upto: int) -> list[int]:
    missing = [r for r in range(1, upto + 1) if r not in counts]
    if missing:
        raise QMError("DEGENERATE_INPUT", f"missing counts for r = {missing}")
    return [p**r + 1 - counts[r] for r in range(1, upto + 1)]


def functional_equation_completion(low: list, p: int, n: int, sign: int = 1) -> Poly:
    """Coefficients of a degree-n Weil polynomial from its lower half:
    a_{n-j} = sign * p^{n/2 - j} a_j."""
    coeffs = [Fraction(0)] * (n + 1)
    half = n // 2
    for j in range(half + 1):
        coeffs[j] = Fraction(low[j])
    for j in range(half):
        coeffs[n - j] = sign * p ** (half - j) * coeffs[j]
    return Poly(coeffs)


def _require_integral(values, what: str) -> None:
    for v in values:
        if Fraction(v).denominator != 1:
            raise QMError("ANSATZ_VIOLATED", f"{what} produced non-integer coefficient {v}")


def predicted_counts(c: Poly, p: int, upto: int) -> dict[int, int]:
    sums = coefficients_to_power_sums(c.coeffs, upto)
    return {r: p**r + 1 - int(sums[r - 1]) for r in range(1, upto + 1)}


@dataclass
class LFit:
    c_p: Poly
    g_p: Poly | None
    sign: int
    verified_r: list[int]


def fit_l_polynomial(counts: Mapping[int, int], p: int, g: int, ansatz: str = GENERIC) -> LFit:
    """Recover c_p (and g_p for the square ansatz) from point counts.

    GENERIC uses counts r = 1..g. SQUARE assumes c_p = g_p^2 and uses
    r = 1..g/2; the sign in the functional equation of g_p is forced when
    its middle coefficient is nonzero and is otherwise selected by surplus
    counts. Every count beyond those used for fitting is re-checked.
    """
    ansatz = ansatz.upper()
    extra = sorted(r for r in counts if r > (g if ansatz == GENERIC else g // 2))
    if ansatz == GENERIC:
        sums = power_sums_from_counts(counts, p, g)
        low = newton_to_coefficients([Fraction(s) for s in sums], g)
        _require_integral(low, "Newton's identities")
        candidates = [(functional_equation_completion(low, p, 2 * g), None, 1)]
    elif ansatz == SQUARE:
        if g % 2:
            raise QMError("DEGENERATE_INPUT", "the square ansatz needs even g")
        half = g // 2
        sums = power_sums_from_counts(counts, p, half)
        low = newton_to_coefficients([Fraction(s, 2) for s in sums], half)
        _require_integral(low, "the square ansatz")
        signs = [1] if low[half] != 0 else [1, -1]
        candidates = []
        for s in signs:
            gp = functional_equation_completion(low, p, g, s)
            candidates.append((gp * gp, gp, s))
    else:
        raise QMError("DEGENERATE_INPUT", f"unknown ansatz {ansatz!r}")

    survivors = []
    for c, gp, s in candidates:
        if extra:
            pred = predicted_counts(c, p, max(extra))
            if any(pred[r] != counts[r] for r in extra):
                continue
        survivors.append((c, gp, s))
    if not survivors:
        raise QMError("ANSATZ_VIOLATED", f"surplus counts at r = {extra} contradict the {ansatz} fit")
    if len(survivors) > 1:
        raise QMError(
            "ANSATZ_UNDERDETERMINED",
            "the functional-equation sign is not determined; supply a count at r = g/2 + 1",
        )
    c, gp, s = survivors[0]
    return LFit(c, gp, s, extra)


def weil_deviation(poly: Poly, p: int) -> float:
    """max | |alpha| - sqrt(p) | over the inverse roots of poly."""
    coeffs = [float(c) for c in poly.coeffs]
    roots = np.roots(coeffs)  # low-to-high order lists the inverse roots
    return float(np.max(np.abs(np.abs(roots) - math.sqrt(p)))) if roots.size else 0.0


def is_weil_polynomial(poly: Poly, p: int, tol: float = 1e-9) -> bool:
    return weil_deviation(poly, p) < tol * max(1.0, math.sqrt(p))


# --------------------------------------------------------------------------
# Tensor square and cyclotomic factors


def _bareiss_det(m: list[list[int]]) -> int:
    m = [row[:] for row in m]
    n = len(m)
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        pivot = m[k][k]
        for i in range(k + 1, n):
            row_i, row_k = m[i], m[k]
            mik = row_i[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pivot - mik * row_k[j]) // prev
        prev = pivot
    return sign * m[n - 1][n - 1]


def _interpolate_integer_nodes(values: list) -> Poly:
    """Polynomial through (k, values[k]) for k = 0..N via forward differences."""
    n = len(values)
    diffs = [Fraction(v) for v in values]
    newton = []
    for k in range(n):
        newton.append(diffs[0] / math.factorial(k))
        diffs = [diffs[i + 1] - diffs[i] for i in range(len(diffs) - 1)]
    poly = Poly()
    basis = Poly([1])
    for k, coef in enumerate(newton):
        poly = poly + basis * coef
        basis = basis * Poly([-k, 1])
    return poly


def tensor_square(c: Poly, g: int, method: str = "resultant") -> Poly:
    """Res_z(c(z), z^{2g} c(T/z)), the polynomial with inverse roots
    alpha_k alpha_l over all ordered pairs.

    ``method="resultant"`` evaluates the Sylvester determinant at 4g^2+1
    integer values of T and interpolates; ``method="power_sums"`` squares
    the power sums instead. Both are exact.
    """
    n = 2 * g
    if c.degree != n:
        raise QMError("DEGENERATE_INPUT", f"expected degree {n}, got {c.degree}")
    big = n * n
    if method == "power_sums":
        sums = coefficients_to_power_sums(c.coeffs, big)
        return Poly(newton_to_coefficients([s * s for s in sums], big))
    if method != "resultant":
        raise QMError("DEGENERATE_INPUT", f"unknown method {method!r}")
    if not c.is_integral():
        raise QMError("DEGENERATE_INPUT", "tensor square expects integer coefficients")
    cs = c.int_coeffs()
    values = []
    for t in range(big + 1):
        # z^{2g} c(t/z) = sum_j c_j t^j z^{2g-j}
        other = Poly([cs[n - k] * t ** (n - k) for k in range(n + 1)])
        rows = _sylvester_int(cs, [int(v) for v in other.coeffs] + [0] * (n + 1 - len(other.coeffs)))
        values.append(_bareiss_det(rows))
    return _interpolate_integer_nodes(values)


def _sylvester_int(f: list[int], g: list[int]) -> list[list[int]]:
    m, n = len(f) - 1, len(g) - 1
    size = m + n
    fr, gr = f[::-1], g[::-1]
    rows = [[0] * k + fr + [0] * (size - k - m - 1) for k in range(n)]
    rows += [[0] * k + gr + [0] * (size - k - n - 1) for k in range(m)]
    return rows


def cyclotomic_candidates(bound: int) -> list[int]:
    """All k with phi(k) <= bound (phi(k) >= sqrt(k/2) bounds the search)."""
    return [k for k in range(1, 2 * bound * bound + 3) if euler_phi(k) <= bound]


_CHECK_PRIME = (1 << 61) - 1


@dataclass
class CyclotomicSplit:
    kset: list[int]
    h: Poly  # polynomial in U = pT, constant term 1
    h_of_pT: Poly

    def multiplicities(self) -> dict[int, int]:
        return dict(sorted(Counter(self.kset).items()))


def cyclotomic_factorization(ct: Poly, p: int) -> CyclotomicSplit:
    """Split ct(T) = h(pT) prod_i Phi_{k_i}(pT) with no root of unity among
    the roots of h.

    Each Phi_k(pT) has constant term +-1, so divisibility over Q implies
    divisibility modulo a large prime; that is used as a cheap filter
    before each exact division.
    """
    rest = ct
    kset: list[int] = []
    sign = 1
    for k in cyclotomic_candidates(ct.degree):
        phi = cyclotomic(k)
        if phi.degree > rest.degree:
            continue
        div = phi.scale_variable(p)
        while rest.degree >= div.degree:
            residue = fp_divmod(
                [int(c) for c in _mod_coeffs(rest)], [int(c) for c in _mod_coeffs(div)], _CHECK_PRIME
            )[1]
            if residue:
                break
            q, rem = rest.divmod(div)
            if not rem.is_zero():
                break
            rest = q
            kset.append(k)
            if k == 1:
                sign = -sign
    h_pT = rest * sign
    if h_pT[0] != 1:
        raise QMError("INTERNAL_ERROR", "cyclotomic bookkeeping lost the normalisation")
    h = h_pT.scale_variable(Fraction(1, p))
    return CyclotomicSplit(sorted(kset), h, h_pT)


def _mod_coeffs(poly: Poly) -> list[int]:
    out = []
    for c in poly.coeffs:
        c = Fraction(c)
        out.append(c.numerator * pow(c.denominator, -1, _CHECK_PRIME) % _CHECK_PRIME)
    return out


def endo_dimension_report(kset, r_max: int = 12) -> tuple[dict[int, int], int]:
    """dim_Q End(A over F_{p^r}) = sum over k_i | r of deg Phi_{k_i}, and
    the degree lcm(k_i) of the endomorphism field."""
    ks = list(kset)
    if not ks:
        raise QMError("DEGENERATE_INPUT", "empty cyclotomic multiset")
    dims = {r: sum(euler_phi(k) for k in ks if r % k == 0) for r in range(1, r_max + 1)}
    return dims, math.lcm(*ks)


def ordinarity_check(g_p: Poly, p: int) -> bool:
    if g_p.degree % 2:
        raise QMError("DEGENERATE_INPUT", "odd degree")
    return Fraction(g_p[g_p.degree // 2]) % p != 0


# --------------------------------------------------------------------------
# Full report


@dataclass
class LPolynomialReport:
    p: int
    g: int
    counts: dict[int, int]
    c_p: Poly
    g_p: Poly | None
    ansatz: str
    sign: int
    verified_r: list[int]
    ordinary: bool
    tensor_kset: list[int]
    h: Poly
    endo_dims: dict[int, int]
    endo_field_degree: int
    weil_deviation: float
    extras: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "g": self.g,
            "counts": {str(r): n for r, n in sorted(self.counts.items())},
            "ansatz": self.ansatz,
            "c_p": [frac_str(c) for c in self.c_p.coeffs],
            "g_p": None if self.g_p is None else [frac_str(c) for c in self.g_p.coeffs],
            "g_p_pretty": None if self.g_p is None else self.g_p.pretty("T"),
            "functional_equation_sign": self.sign,
            "surplus_counts_verified": self.verified_r,
            "ordinary": self.ordinary,
            "tensor_kset": dict(sorted(Counter(self.tensor_kset).items())),
            "h": [frac_str(c) for c in self.h.coeffs],
            "endo_dims": {str(r): d for r, d in self.endo_dims.items()},
            "endo_field_degree": self.endo_field_degree,
            "weil_max_deviation": self.weil_deviation,
        }


def l_polynomial_report(
    params: FamilyParams,
    p: int,
    ansatz: str = SQUARE,
    *,
    budget: int = DEFAULT_BUDGET,
    cache: CountCache | None = None,
    threads: int = 1,
    surplus: int = 1,
    r_max: int = 12,
    tensor_method: str = "resultant",
) -> LPolynomialReport:
    """Count, fit, verify, and run the tensor-square bookkeeping at p.

    ``surplus`` extra extension degrees beyond the fitting range are counted
    when the budget allows and used to verify the fit.
    """
    g = params.g
    ansatz = ansatz.upper()
    needed = g if ansatz == GENERIC else g // 2
    counts = {}
    for r in range(1, needed + surplus + 1):
        if p**r > budget:
            if r <= needed:
                raise QMError("BUDGET_EXCEEDED", f"need p^{r} = {p ** r} > budget {budget}")
            break
        counts[r] = count_points(params, p, r, budget=budget, cache=cache, threads=threads)
    fit = fit_l_polynomial(counts, p, g, ansatz)
    weil_source = fit.g_p if fit.g_p is not None else fit.c_p
    ct = tensor_square(fit.c_p, g, method=tensor_method)
    split = cyclotomic_factorization(ct, p)
    dims, k = endo_dimension_report(split.kset, r_max) if split.kset else ({r: 0 for r in range(1, r_max + 1)}, 1)
    ordinary = ordinarity_check(fit.g_p if fit.g_p is not None else fit.c_p, p)
    return LPolynomialReport(
        p=p,
        g=g,
        counts=counts,
        c_p=fit.c_p,
        g_p=fit.g_p,
        ansatz=ansatz,
        sign=fit.sign,
        verified_r=fit.verified_r,
        ordinary=ordinary,
        tensor_kset=split.kset,
        h=split.h,
        endo_dims=dims,
        endo_field_degree=k,
        weil_deviation=weil_deviation(weil_source, p),
    )
