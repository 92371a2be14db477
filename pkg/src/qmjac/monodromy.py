"""The omega character, candidate connected monodromy fields, and the
two-prime certificate that the endomorphism algebra has center Q.

omega(Frob_p) is read off the T^g coefficient of the degree-g factor g_p,
which equals det(Frob | W) = omega * p^{g/2}. For p = 1 mod 4 the value
+1 means Frob_p lies in the identity component, which happens exactly when
p splits completely in the connected monodromy field.

Candidate fields are Q(i, sqrt(beta)) with beta running over classes of
Q(i)^x / squares supported on i, 1+i and the primes above the odd bad
primes, kept when the extension is Galois over Q.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .algebra import (
    GaussianRational,
    Poly,
    discriminant,
    factorize,
    fp_divmod,
    fp_gcd,
    fp_powmod,
    fp_trim,
    is_prime,
    legendre,
    sqrt_mod,
    squarefree_kernel,
)
from .errors import QMError

INCONCLUSIVE = "INCONCLUSIVE"
NO_CANDIDATE = "NO_CANDIDATE"
QUATERNION_ALGEBRA_OVER_Q = "QUATERNION_ALGEBRA_OVER_Q"


# --------------------------------------------------------------------------
# omega


@dataclass(frozen=True)
class OmegaDatum:
    p: int
    omega: int
    source_g_p: Poly | None = None

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "omega": self.omega,
            "g_p": None if self.source_g_p is None else self.source_g_p.pretty("T"),
        }


def omega_of_frobenius(g_p: Poly, p: int, g: int) -> int:
    if p % 4 != 1:
        raise QMError("PRECONDITION_FAILED", f"omega is only read at p = 1 mod 4, got {p}")
    if g % 2 or g_p.degree != g or g_p[0] != 1:
        raise QMError("WEIL_SHAPE_VIOLATED", "expected a degree-g polynomial with constant term 1")
    top = Fraction(g_p[g])
    scale = p ** (g // 2)
    if top == scale:
        return 1
    if top == -scale:
        return -1
    raise QMError("WEIL_SHAPE_VIOLATED", f"T^{g} coefficient {top} is not +-{scale}")


# --------------------------------------------------------------------------
# Candidate fields


@dataclass(frozen=True)
class _Generator:
    name: str
    value: GaussianRational
    rational_prime: int | None  # the rational prime below, None for units


def _gaussian_prime_above(q: int) -> GaussianRational:
    """a + b i with a^2 + b^2 = q, a > b > 0 (q = 1 mod 4)."""
    for b in range(1, math.isqrt(q) + 1):
        a2 = q - b * b
        a = math.isqrt(a2)
        if a * a == a2 and a > b:
            return GaussianRational(a, b)
    raise QMError("INTERNAL_ERROR", f"no sum of two squares for {q}")


def _gaussian_name(z: GaussianRational) -> str:
    im = {1: "+i", -1: "-i"}.get(int(z.im), f"{int(z.im):+d}i")
    return f"({z.re}{im})"


def _generators(bad_primes: Iterable[int]) -> list[_Generator]:
    gens = [
        _Generator("i", GaussianRational(0, 1), None),
        _Generator("(1+i)", GaussianRational(1, 1), 2),
    ]
    for q in sorted(set(bad_primes)):
        if q == 2:
            continue
        if not is_prime(q):
            raise QMError("DEGENERATE_INPUT", f"{q} is not prime")
        if q % 4 == 3:
            gens.append(_Generator(str(q), GaussianRational(q), q))
        else:
            pi = _gaussian_prime_above(q)
            gens.append(_Generator(_gaussian_name(pi), pi, q))
            gens.append(_Generator(_gaussian_name(pi.conjugate()), pi.conjugate(), q))
    return gens


def _conjugation_matrix(gens: list[_Generator]) -> list[list[int]]:
    """F2-matrix of complex conjugation on the exponent vectors mod squares.

    conj(i) = -i = i^3 ~ i; conj(1+i) = -i (1+i) ~ i (1+i); inert primes are
    fixed; the two primes above a split prime are swapped.
    """
    n = len(gens)
    cols = []
    for k, gen in enumerate(gens):
        image = [0] * n
        if gen.name == "i":
            image[k] = 1
        elif gen.name == "(1+i)":
            image[k] = 1
            image[0] = 1
        elif gen.rational_prime is not None and gen.rational_prime % 4 == 3:
            image[k] = 1
        else:
            partner = k + 1 if k + 1 < n and gens[k + 1].rational_prime == gen.rational_prime else k - 1
            image[partner] = 1
        cols.append(image)
    return cols


@dataclass(frozen=True)
class CandidateField:
    """Q(i, sqrt(beta)) for a squarefree class beta in Q(i)^x / squares."""

    beta_tag: str
    beta: GaussianRational
    exponents: tuple[int, ...]
    galois_over_q: bool = True

    @property
    def name(self) -> str:
        if self.beta_tag == "i":
            return "Q(zeta8)"
        return f"Q(i,sqrt({self.beta_tag}))"

    def ramified_primes(self) -> set[int]:
        return {q for q in factorize(int(self.beta.norm())) if q != 1} | {2}

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "beta": self.beta_tag,
            "beta_value": [str(self.beta.re), str(self.beta.im)],
            "galois_over_Q": self.galois_over_q,
        }


def _tag(gens: list[_Generator], exps: Sequence[int]) -> str:
    """Readable tag such as "i", "3", "3i", "(1+i)"; rational primes first."""
    parts = []
    for k, (gen, e) in enumerate(zip(gens, exps)):
        if not e or gen.name == "i":
            continue
        q = gen.rational_prime
        pair = [j for j, h in enumerate(gens) if q is not None and q % 4 == 1 and h.rational_prime == q]
        if pair and all(exps[j] for j in pair):
            if k == pair[0]:
                parts.append(str(q))
        else:
            parts.append(gen.name)
    tag = "*".join(parts)
    if exps[0]:
        tag = tag + "i" if tag else "i"
    return tag


def candidate_fields(bad_primes: Iterable[int]) -> list[CandidateField]:
    gens = _generators(bad_primes)
    conj = _conjugation_matrix(gens)
    n = len(gens)
    out = []
    for exps in itertools.product((0, 1), repeat=n):
        if not any(exps):
            continue
        image = [0] * n
        for k, e in enumerate(exps):
            if e:
                image = [(a + b) % 2 for a, b in zip(image, conj[k])]
        if image != list(exps):
            continue
        beta = GaussianRational(1)
        for gen, e in zip(gens, exps):
            if e:
                beta = beta * gen.value
        out.append(CandidateField(_tag(gens, exps), beta, tuple(exps)))
    out.sort(key=lambda c: (sum(c.exponents), c.exponents[::-1]))
    return out


def splits_completely(p: int, fld: CandidateField) -> bool:
    """Whether p splits completely in the Galois field Q(i, sqrt(beta))."""
    if p == 2 or p in fld.ramified_primes():
        raise QMError("RAMIFIED_PRIME", f"{p} ramifies in {fld.name}")
    if p % 4 != 1:
        return False
    r = sqrt_mod(-1, p)
    den = math.lcm(fld.beta.re.denominator, fld.beta.im.denominator)
    value = (int(fld.beta.re * den) + int(fld.beta.im * den) * r) * pow(den, -1, p)
    return legendre(value, p) == 1


@dataclass
class Identification:
    identified: CandidateField | str
    survivors: list[CandidateField]
    eliminations: dict[str, dict]

    def to_json(self) -> dict:
        ident = self.identified if isinstance(self.identified, str) else self.identified.name
        return {
            "identified": ident,
            "survivors": [c.name for c in self.survivors],
            "eliminations": self.eliminations,
        }


def identify_connected_monodromy_field(
    data: Sequence[OmegaDatum], candidates: Sequence[CandidateField]
) -> Identification:
    if not data:
        raise QMError("DEGENERATE_INPUT", "no omega data")
    survivors = []
    eliminated: dict[str, dict] = {}
    for fld in candidates:
        witness = None
        for d in data:
            if d.p % 4 != 1:
                raise QMError("PRECONDITION_FAILED", f"omega at {d.p} is not defined here")
            split = splits_completely(d.p, fld)
            if split != (d.omega == 1):
                witness = {"p": d.p, "omega": d.omega, "splits_completely": split}
                break
        if witness is None:
            survivors.append(fld)
        else:
            eliminated[fld.name] = witness
    if len(survivors) == 1:
        ident: CandidateField | str = survivors[0]
    elif survivors:
        ident = INCONCLUSIVE
    else:
        ident = NO_CANDIDATE
    return Identification(ident, survivors, eliminated)


# --------------------------------------------------------------------------
# Center certificate


def reversed_monic(g_p: Poly) -> Poly:
    """x^n g_p(1/x): the monic Frobenius polynomial with roots alpha."""
    return g_p.reverse()


def real_subfield_polynomial(g_p: Poly, p: int) -> Poly:
    """h with P(x) = x^{n/2} h(x + p/x), P the reversed g_p (n = deg)."""
    P = reversed_monic(g_p)
    n = P.degree
    if n % 2:
        raise QMError("NOT_SIMPLE_INPUT", "odd degree")
    half = n // 2
    rest = P
    h = [Fraction(0)] * (half + 1)
    for k in range(half, -1, -1):
        # x^{half-k} (x^2 + p)^k has leading term x^{half+k}
        coef = Fraction(rest[half + k])
        h[k] = coef
        term = Poly([0] * (half - k) + [1]) * Poly([p, 0, 1]) ** k
        rest = rest - term * coef
    if not rest.is_zero():
        raise QMError("WEIL_SHAPE_VIOLATED", "polynomial is not of the form x^{n/2} h(x + p/x)")
    return Poly(h)


def _has_quadratic_factor(P: Poly, p: int) -> bool:
    # Monic integer factors of a Weil polynomial have constant term of
    # absolute value p^{k/2}, so only even-degree factors x^2 + u x +- p
    # can occur; |u| <= 2 sqrt(p).
    bound = 2 * math.isqrt(p) + 2
    for v in (p, -p):
        for u in range(-bound, bound + 1):
            if (P % Poly([v, u, 1])).is_zero():
                return True
    return False


def is_irreducible_weil(g_p: Poly, p: int) -> bool:
    from .frobenius import is_weil_polynomial

    if not g_p.is_integral() or not is_weil_polynomial(g_p, p):
        raise QMError("WEIL_SHAPE_VIOLATED", "input is not an integral Weil polynomial")
    P = reversed_monic(g_p)
    if P.degree not in (4, 6):
        raise QMError("DEGENERATE_INPUT", "only degrees 4 and 6 are supported")
    return not _has_quadratic_factor(P, p)


def _root_count_mod(h: Poly, ell: int) -> int:
    hc = fp_trim([int(Fraction(c).numerator * pow(Fraction(c).denominator, -1, ell)) % ell for c in h.coeffs])
    xq = fp_powmod([0, 1], ell, hc, ell)
    diff = list(xq) + [0] * max(0, 2 - len(xq))
    diff[1] = (diff[1] - 1) % ell
    return len(fp_gcd(hc, fp_trim(diff), ell)) - 1


def _disc_primes(P: Poly) -> set[int]:
    return set(factorize(abs(int(discriminant(P)))))


def _excludes_quadratic(P: Poly, m: int, disc: int, max_primes: int = 300) -> bool:
    """True if some prime proves Q(sqrt m) is not inside Q[x]/P.

    A root of P mod ell gives a degree-one prime of Q[x]/P above ell, which
    must sit over a split prime of any quadratic subfield; so a root mod ell
    with m a non-residue mod ell rules Q(sqrt m) out.
    """
    bad = 2 * abs(m) * abs(disc)
    ell, tried = 2, 0
    while tried < max_primes:
        ell += 1
        if not is_prime(ell) or bad % ell == 0:
            continue
        tried += 1
        if pow(m % ell, (ell - 1) // 2, ell) == ell - 1 and _root_count_mod(P, ell) > 0:
            return True
    return False


def _imaginary_quadratic_subfields(P: Poly, primes: Iterable[int] | None = None) -> list[int]:
    """Squarefree m < 0 with Q(sqrt m) inside Q[x]/P, for every m supported
    on ``primes`` (default: the primes dividing disc(P), outside which no
    subfield ramifies). Candidates without a cheap exclusion witness are
    settled by factoring P over Q(sqrt m)."""
    disc = int(discriminant(P))
    primes = sorted(_disc_primes(P) if primes is None else primes)
    found = []
    for r in range(len(primes) + 1):
        for subset in itertools.combinations(primes, r):
            m = -math.prod(subset)
            if not _excludes_quadratic(P, m, disc) and _factors_over_quadratic(P, m):
                found.append(m)
    return sorted(found)


def _factors_over_quadratic(P: Poly, m: int) -> bool:
    import sympy as sp

    x = sp.symbols("x")
    expr = sum(sp.Rational(Fraction(c).numerator, Fraction(c).denominator) * x**k for k, c in enumerate(P.coeffs))
    _, factors = sp.factor_list(expr, extension=sp.sqrt(m))
    return len(factors) > 1 or factors[0][1] > 1


@dataclass
class CenterCertificate:
    certified: bool
    real_subfield_polys: tuple[Poly, Poly]
    real_disc_kernels: tuple[int, int]
    real_witness: dict | None
    imaginary_subfields: tuple[list[int], list[int]]
    reasons: list[str] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        return "CertifiedTrivialCenter" if self.certified else "Inconclusive"

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "real_subfield_polynomials": [h.pretty("s") for h in self.real_subfield_polys],
            "real_discriminant_kernels": list(self.real_disc_kernels),
            "real_subfield_witness": self.real_witness,
            "imaginary_quadratic_subfields": [list(v) for v in self.imaginary_subfields],
            "reasons": self.reasons,
        }


def center_certificate(g1: Poly, p1: int, g2: Poly, p2: int, aux_primes: int = 200) -> CenterCertificate:
    """Certify that Q[T]/g1 and Q[T]/g2 share no subfield other than Q.

    Both are CM fields; a common subfield is either totally real, hence
    inside both real subfields Q[s]/h_i, or an imaginary quadratic field,
    or the whole field (which forces equal real subfields).
    """
    for g_p, p in ((g1, p1), (g2, p2)):
        if g_p.degree not in (4, 6):
            raise QMError("DEGENERATE_INPUT", "degree 4 or 6 expected")
        if not is_irreducible_weil(g_p, p):
            raise QMError("NOT_SIMPLE_INPUT", f"the polynomial at p = {p} is reducible")
    h1, h2 = real_subfield_polynomial(g1, p1), real_subfield_polynomial(g2, p2)
    d1, d2 = discriminant(h1), discriminant(h2)
    k1, k2 = squarefree_kernel(int(d1)), squarefree_kernel(int(d2))
    reasons = []

    # real subfields: a prime splitting differently in the two is a witness
    witness = None
    bad = abs(int(d1 * d2)) * p1 * p2 * 2
    ell, tried = 2, 0
    while tried < aux_primes and witness is None:
        ell += 1
        if not is_prime(ell) or bad % ell == 0:
            continue
        tried += 1
        n1, n2 = _root_count_mod(h1, ell), _root_count_mod(h2, ell)
        if n1 != n2:
            witness = {"prime": ell, "roots_mod_prime": [n1, n2]}
    real_distinct = witness is not None or (h1.degree == 2 and k1 != k2)
    if not real_distinct:
        reasons.append("real subfields not separated by any auxiliary prime")

    # a shared quadratic subfield ramifies only at primes dividing both discriminants
    P1, P2 = reversed_monic(g1), reversed_monic(g2)
    common = _disc_primes(P1) & _disc_primes(P2)
    im1 = _imaginary_quadratic_subfields(P1, common)
    im2 = _imaginary_quadratic_subfields(P2, common)
    shared = sorted(set(im1) & set(im2))
    if shared:
        reasons.append(f"shared imaginary quadratic subfields {shared}")
    certified = real_distinct and not shared
    return CenterCertificate(certified, (h1, h2), (abs(k1), abs(k2)), witness, (im1, im2), reasons)


@dataclass
class AlgebraVerdict:
    verdict: str
    reasons: list[str]

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "reasons": self.reasons}


def endo_algebra_verdict(reports: Sequence, center: CenterCertificate | None) -> AlgebraVerdict:
    """Combine two Frobenius reports and a center certificate.

    Each report must show c_p = g_p^2 with g_p an irreducible ordinary Weil
    polynomial and a 4g-dimensional endomorphism algebra over its
    endomorphism field, i.e. End^0 of the reduction is M_2 of the CM field
    Q[T]/g_p. The geometric algebra B of the generic fiber then embeds in
    both, its center lies in their common subfield Q, and B contains the
    quaternion algebra (-1,-1 | Q) generated by the Q8 action. Dimension
    forces B to be that quaternion algebra: M_2(Q) would need a zero
    divisor, which a definite quaternion algebra has none of, and a larger
    central simple algebra over Q cannot embed in M_2(K) with [K:Q] = g
    while commuting with nothing but scalars.
    """
    reasons = []
    if len(reports) < 2:
        return AlgebraVerdict(INCONCLUSIVE, ["two primes are needed"])
    for rep in reports[:2]:
        tag = f"p={rep.p}"
        if rep.g_p is None:
            reasons.append(f"{tag}: no square factorisation")
            continue
        if not rep.ordinary:
            reasons.append(f"{tag}: not ordinary")
        if rep.endo_dims.get(rep.endo_field_degree) != 4 * rep.g:
            reasons.append(f"{tag}: endomorphism dimension is not {4 * rep.g}")
        try:
            if not is_irreducible_weil(rep.g_p, rep.p):
                reasons.append(f"{tag}: g_p reducible")
        except QMError as exc:
            reasons.append(f"{tag}: {exc.code}")
    if center is None or not center.certified:
        reasons.append("center not certified trivial")
    if reasons:
        return AlgebraVerdict(INCONCLUSIVE, reasons)
    return AlgebraVerdict(QUATERNION_ALGEBRA_OVER_Q, ["all prerequisites hold"])
