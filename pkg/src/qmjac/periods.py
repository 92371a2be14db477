"""Numerical period matrix of genus-4 fibers.

The homology basis is g0, a.g0, g1, a.g1, g2, a.g2, g3, a.g3, where g_n is
the double-cover lift of an arc d_n between adjacent branch points:

    d0: 0 -> 1 (segment), d1: 1 -> z6, d2: z6 -> i, d3: i -> z3,

with z6, z3 the roots of x^4 + 2a x^2 + 1 continuing e^{i pi/3}, e^{2 i pi/3}
from a = 1/2. Arcs interpolate log-linearly, so at a = 1/2 they run along
the unit circle. The lift leaves the start of d_n on the sheet where Im y > 0,
so its period is twice the integral of x^(l-1) dx / y over d_n on that
sheet. The substitution t = sin^2(pi s / 2) removes both endpoint
square-root singularities, and Gauss-Legendre panels in s are doubled until
successive results agree.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import QMError
from .lattice import homology_data

GENUS = 4
BASIS_TAG = ("g0", "a.g0", "g1", "a.g1", "g2", "a.g2", "g3", "a.g3")
_ANCHORS = (cmath.exp(1j * math.pi / 3), cmath.exp(2j * math.pi / 3))


def family_f_g4(a: complex) -> Callable[[np.ndarray], np.ndarray]:
    """f(x) = x (x^4 - 1)(x^4 + 2a x^2 + 1)."""

    def f(x):
        x2 = x * x
        return x * (x2 * x2 - 1) * (x2 * x2 + 2 * a * x2 + 1)

    return f


def branch_points_g4(a: complex) -> dict[str, complex]:
    """Finite branch points, with z6 and z3 tracked from their a = 1/2 positions."""
    a = complex(a)
    disc = cmath.sqrt(a * a - 1)
    roots = []
    for u in (-a + disc, -a - disc):
        s = cmath.sqrt(u)
        roots += [s, -s]
    pts = {"0": 0j, "1": 1 + 0j, "-1": -1 + 0j, "i": 1j, "-i": -1j}
    used = set()
    for name, anchor in zip(("z6", "z3"), _ANCHORS):
        k = min((k for k in range(4) if k not in used), key=lambda k: abs(roots[k] - anchor))
        used.add(k)
        pts[name] = roots[k]
        pts["-" + name] = -roots[k]
    return pts


@dataclass(frozen=True)
class BranchPath:
    """Lift of the arc x(t), t in [0, 1], to the sheet with Im y > 0 near t = 0.

    ``twist`` applies (x, y) -> (-x, i y) when set, giving the alpha-image.
    """

    start: complex
    end: complex
    kind: str  # "segment" or "arc"
    twist: bool = False
    label: str = ""
    closed: bool = True

    def x_of_t(self, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        if self.kind == "segment":
            return self.start + (self.end - self.start) * t, np.full_like(t, self.end - self.start, dtype=complex)
        # counter-clockwise log-linear interpolation
        ratio = cmath.log(self.end / self.start)
        if ratio.imag <= 0:
            ratio += 2j * math.pi
        x = self.start * np.exp(ratio * t)
        return x, ratio * x


def build_homology_basis(a: complex, clearance: float = 1e-6) -> list[BranchPath]:
    pts = branch_points_g4(a)
    finite = list(pts.values())
    for u in range(len(finite)):
        for v in range(u + 1, len(finite)):
            if abs(finite[u] - finite[v]) < clearance:
                raise QMError("ILL_CONDITIONED", "branch points nearly collide")
    base = [
        BranchPath(pts["0"], pts["1"], "segment", label="g0"),
        BranchPath(pts["1"], pts["z6"], "arc", label="g1"),
        BranchPath(pts["z6"], pts["i"], "arc", label="g2"),
        BranchPath(pts["i"], pts["z3"], "arc", label="g3"),
    ]
    paths = []
    for p in base:
        paths.append(p)
        paths.append(BranchPath(p.start, p.end, p.kind, twist=True, label="a." + p.label))
    _check_clearance(paths, finite, clearance=max(clearance, 1e-3))
    return paths


def _check_clearance(paths, points, clearance):
    t = np.linspace(0.02, 0.98, 200)
    for p in paths:
        x, _ = p.x_of_t(t)
        ends = {p.start, p.end}
        for b in points:
            if b in ends:
                continue
            if np.min(np.abs(x - b)) < clearance:
                raise QMError("ILL_CONDITIONED", f"path {p.label} passes within {clearance} of a branch point")


def _gauss_nodes(panels: np.ndarray, order: int) -> tuple[np.ndarray, np.ndarray]:
    xg, wg = np.polynomial.legendre.leggauss(order)
    lo, hi = panels[:-1, None], panels[1:, None]
    s = (0.5 * (hi - lo) * xg[None, :] + 0.5 * (hi + lo)).ravel()
    w = (0.5 * (hi - lo) * wg[None, :]).ravel()
    return s, w


def _continued_sqrt(values: np.ndarray, max_turn: float = 0.5) -> np.ndarray:
    """sqrt along an ordered sequence, choosing signs by continuity."""
    y = np.sqrt(values.astype(complex))
    dots = y[1:] * np.conj(y[:-1])
    mag = np.abs(dots)
    if np.any(mag == 0) or np.any(np.abs(dots.real) < max_turn * mag):
        raise QMError("CONTINUATION_FAILED", "square root turns too fast between nodes")
    flips = np.concatenate([[1.0], np.sign(dots.real)])
    return y * np.cumprod(flips)


def _path_integrals(path: BranchPath, f, panels: np.ndarray, order: int) -> np.ndarray:
    s, w = _gauss_nodes(panels, order)
    t = np.sin(0.5 * math.pi * s) ** 2
    dt = 0.5 * math.pi * np.sin(math.pi * s)
    x, dx = path.x_of_t(t)
    y = _continued_sqrt(f(x))
    if abs(y[0].imag) < 1e-3 * abs(y[0]):
        raise QMError("CONTINUATION_FAILED", f"initial sheet of {path.label} is ambiguous")
    if y[0].imag < 0:
        y = -y
    if path.twist:
        x, dx, y = -x, -dx, 1j * y
    out = np.empty(GENUS, dtype=complex)
    for ell in range(GENUS):
        out[ell] = 2 * np.sum(w * dt * x**ell * dx / y)
    return out


@dataclass
class PeriodMatrix:
    entries: np.ndarray  # 4 x 8 complex
    error_bounds: np.ndarray  # 4 x 8 float
    basis_tag: tuple[str, ...] = BASIS_TAG
    a: complex = 0.5
    meta: dict = field(default_factory=dict)

    def lattice_rank(self, rel: float = 1e-8) -> int:
        real = np.vstack([self.entries.real, self.entries.imag])
        sv = np.linalg.svd(real, compute_uv=False)
        return int(np.sum(sv > rel * sv[0]))

    def to_json(self) -> dict:
        return {
            "a": [float(np.real(self.a)).hex(), float(np.imag(self.a)).hex()],
            "basis": list(self.basis_tag),
            "entries": [[[float(v.real).hex(), float(v.imag).hex()] for v in row] for row in self.entries],
            "error_bounds": [[float(e).hex() for e in row] for row in self.error_bounds],
        }


def compute_period_matrix(
    paths: list[BranchPath],
    a: complex,
    tol: float = 1e-12,
    order: int = 24,
    panels: int = 4,
    breakpoints: np.ndarray | None = None,
    max_panels: int = 1024,
) -> PeriodMatrix:
    """Integrate each path, doubling the panel count until two successive
    estimates agree to ``tol`` (absolute, scaled by the entry size)."""
    if tol < 1e-12:
        raise QMError("PRECONDITION_FAILED", "tol must be at least 1e-12")
    f = family_f_g4(complex(a))
    cols, errs = [], []
    for path in paths:
        if breakpoints is not None:
            grid = np.asarray(breakpoints, dtype=float)
        else:
            grid = np.linspace(0.0, 1.0, panels + 1)
        prev = _path_integrals(path, f, grid, order)
        while True:
            grid = np.sort(np.concatenate([grid, 0.5 * (grid[:-1] + grid[1:])]))
            cur = _path_integrals(path, f, grid, order)
            err = np.abs(cur - prev)
            if np.all(err <= tol * max(1.0, np.max(np.abs(cur)))):
                break
            if len(grid) > max_panels:
                raise QMError("CONTINUATION_FAILED", f"quadrature did not converge on {path.label}")
            prev = cur
        cols.append(cur)
        errs.append(err)
    return PeriodMatrix(np.array(cols).T, np.array(errs).T, a=complex(a))


def period_matrix(a: complex = 0.5, tol: float = 1e-12) -> PeriodMatrix:
    return compute_period_matrix(build_homology_basis(a), a, tol)


def verify_analytic_rational(Pi: PeriodMatrix | np.ndarray, M, R) -> float:
    """max |M Pi - Pi R| / max |Pi|."""
    P = Pi.entries if isinstance(Pi, PeriodMatrix) else np.asarray(Pi)
    M = np.array([[complex(v) for v in row] for row in M])
    R = np.asarray(R, dtype=float)
    return float(np.max(np.abs(M @ P - P @ R)) / np.max(np.abs(P)))


# Fixed once at a = 1/2, where i Pi E^{-1} Pi^* is positive definite.
POSITIVITY_SIGN = 1


def verify_riemann_relations(Pi: PeriodMatrix | np.ndarray, E, sign: int = POSITIVITY_SIGN) -> tuple[float, bool]:
    """Residual of Pi E^{-1} Pi^T and definiteness of sign * i Pi E^{-1} Pi^*."""
    P = Pi.entries if isinstance(Pi, PeriodMatrix) else np.asarray(Pi)
    Einv = np.linalg.inv(np.asarray(E, dtype=float))
    first = P @ Einv @ P.T
    residual = float(np.max(np.abs(first)) / np.max(np.abs(P)) ** 2)
    herm = sign * 1j * (P @ Einv @ P.conj().T)
    herm = 0.5 * (herm + herm.conj().T)
    eig = np.linalg.eigvalsh(herm)
    return residual, bool(np.all(eig > 0))


def period_report(a: complex = 0.5, tol: float = 1e-12) -> dict:
    data = homology_data()
    Pi = period_matrix(a, tol)
    res_a = verify_analytic_rational(Pi, data.M_alpha, data.R_alpha)
    res_b = verify_analytic_rational(Pi, data.M_beta, data.R_beta)
    riemann, positive = verify_riemann_relations(Pi, data.E)
    return {
        "period_matrix": Pi,
        "residual_alpha": res_a,
        "residual_beta": res_b,
        "riemann_residual": riemann,
        "positivity": positive,
        "lattice_rank": Pi.lattice_rank(),
    }


def stability_scan(n: int = 20, radius: float = 0.05, seed: int = 1, center: complex = 0.5, tol: float = 1e-11) -> list[dict]:
    """Residuals at n pseudo-random parameters in a disc around ``center``."""
    rng = np.random.default_rng(seed)
    data = homology_data()
    out = []
    for _ in range(n):
        r = radius * math.sqrt(rng.random())
        theta = 2 * math.pi * rng.random()
        a = center + r * cmath.exp(1j * theta)
        Pi = period_matrix(a, tol)
        out.append(
            {
                "a": a,
                "residual_alpha": verify_analytic_rational(Pi, data.M_alpha, data.R_alpha),
                "residual_beta": verify_analytic_rational(Pi, data.M_beta, data.R_beta),
            }
        )
    return out
