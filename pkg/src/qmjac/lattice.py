"""Two-torsion Q8-module, genus-4 homology matrices, and the lattice
computations over the Lipschitz order O = Z<1, i, j, k>.

Homology matrices act on column vectors in the basis
g0, a.g0, g1, a.g1, g2, a.g2, g3, a.g3 (a the automorphism x -> -x), so
column n of R is the image of basis vector n.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .algebra import GaussianRational, Quaternion, determinant
from .errors import QMError
from .family import weierstrass_labels

# --------------------------------------------------------------------------
# F2 helpers


def f2_rank(m) -> int:
    a = (np.asarray(m, dtype=np.int64) % 2).astype(np.uint8)
    rows, cols = a.shape
    rank = 0
    for c in range(cols):
        pivot = next((r for r in range(rank, rows) if a[r, c]), None)
        if pivot is None:
            continue
        a[[rank, pivot]] = a[[pivot, rank]]
        for r in range(rows):
            if r != rank and a[r, c]:
                a[r] ^= a[rank]
        rank += 1
        if rank == rows:
            break
    return rank


def _f2(m) -> np.ndarray:
    return (np.asarray(m, dtype=np.int64) % 2).astype(np.int64)


# --------------------------------------------------------------------------
# Two-torsion


def _negate_label(lab: str) -> str:
    if lab == "0":
        return "0"
    return lab[1:] if lab.startswith("-") else "-" + lab


def _invert_label(lab: str) -> str:
    sign, core = ("-", lab[1:]) if lab.startswith("-") else ("", lab)
    if core == "1":
        return lab
    if core == "i":
        return _negate_label(lab)
    if core.startswith("1/"):
        return sign + core[2:]
    return sign + "1/" + core


@dataclass(frozen=True)
class TwoTorsionModule:
    """A[2] in the basis e_x, x in S minus {0}; e_0 is the sum of the basis."""

    g: int
    basis_labels: tuple[str, ...]

    @classmethod
    def make(cls, g: int) -> "TwoTorsionModule":
        if g < 4 or g % 2:
            raise QMError("DEGENERATE_INPUT", "g must be even and at least 4")
        labels = tuple(weierstrass_labels(g // 2 - 1)[1:])
        assert len(labels) == 2 * g
        return cls(g, labels)

    def vector(self, label: str) -> np.ndarray:
        v = np.zeros(2 * self.g, dtype=np.int64)
        if label == "0":
            v[:] = 1
        else:
            v[self.basis_labels.index(label)] = 1
        return v


def two_torsion_action(g: int) -> tuple[np.ndarray, np.ndarray]:
    """F2 matrices of alpha: e_x -> e_{-x} and beta: e_x -> e_{1/x} + e_0."""
    mod = TwoTorsionModule.make(g)
    n = 2 * g
    ma = np.zeros((n, n), dtype=np.int64)
    mb = np.zeros((n, n), dtype=np.int64)
    for col, lab in enumerate(mod.basis_labels):
        ma[:, col] = mod.vector(_negate_label(lab))
        mb[:, col] = (mod.vector(_invert_label(lab)) + mod.vector("0")) % 2
    return ma, mb


def hurwitz_obstruction(g: int, ma=None, mb=None) -> tuple[bool, int]:
    """Whether 2w = -1 + i + j + k acts nontrivially on A[2], and the rank.

    A nonzero action means w = (-1 + i + j + k)/2 is not an endomorphism, so
    the endomorphism ring stops at the Lipschitz order.
    """
    if ma is None or mb is None:
        ma, mb = two_torsion_action(g)
    n = ma.shape[0]
    N = _f2(np.eye(n, dtype=np.int64) + ma + mb + ma @ mb)
    return bool(N.any()), f2_rank(N)


# --------------------------------------------------------------------------
# Genus-4 homology

_R_ALPHA = np.kron(np.eye(4, dtype=np.int64), np.array([[0, -1], [1, 0]], dtype=np.int64))

_R_BETA = np.array(
    [
        [1, 0, -1, -1, 0, 0, 0, 0],
        [0, -1, -1, 1, 0, 0, 0, 0],
        [1, 1, 0, -1, 0, 0, 0, 0],
        [1, -1, -1, 0, 0, 0, 0, 0],
        [0, 0, 0, -1, 0, 0, 0, 1],
        [0, 0, -1, 0, 0, 0, 1, 0],
        [1, 1, 0, -1, 0, -1, 0, 0],
        [1, -1, -1, 0, -1, 0, 0, 0],
    ],
    dtype=np.int64,
)

_E = np.array(
    [
        [0, -1, -1, 0, 0, 0, 0, 0],
        [1, 0, 0, -1, 0, 0, 0, 0],
        [1, 0, 0, 0, -1, 0, 0, 0],
        [0, 1, 0, 0, 0, -1, 0, 0],
        [0, 0, 1, 0, 0, 0, -1, 0],
        [0, 0, 0, 1, 0, 0, 0, -1],
        [0, 0, 0, 0, 1, 0, 0, 0],
        [0, 0, 0, 0, 0, 1, 0, 0],
    ],
    dtype=np.int64,
)


@dataclass(frozen=True)
class HomologyData:
    R_alpha: np.ndarray
    R_beta: np.ndarray
    E: np.ndarray
    M_alpha: list[list[GaussianRational]]
    M_beta: list[list[GaussianRational]]

    def R_of(self, q: Quaternion, k_order: str = "ab") -> np.ndarray:
        """Rational representation t + x R_a + y R_b + z R_k (object dtype).

        k_order "ab" takes R_k = R_a R_b; "ba" takes R_k = R_b R_a, the
        order-reversing choice matching actions induced by pullback.
        """
        t, x, y, z = q.coords()
        ident = np.eye(8, dtype=np.int64)
        rk = self.R_alpha @ self.R_beta if k_order == "ab" else self.R_beta @ self.R_alpha
        parts = [(t, ident), (x, self.R_alpha), (y, self.R_beta), (z, rk)]
        out = np.zeros((8, 8), dtype=object)
        for c, m in parts:
            out = out + m.astype(object) * Fraction(c)
        return out

    def M_complex(self) -> tuple[np.ndarray, np.ndarray]:
        return (
            np.array([[complex(v) for v in row] for row in self.M_alpha]),
            np.array([[complex(v) for v in row] for row in self.M_beta]),
        )

    def check(self) -> None:
        ra, rb, e = self.R_alpha, self.R_beta, self.E
        ident = np.eye(8, dtype=np.int64)
        failures = []
        if not np.array_equal(ra @ ra, -ident):
            failures.append("R_alpha^2 != -1")
        if not np.array_equal(rb @ rb, -ident):
            failures.append("R_beta^2 != -1")
        if not np.array_equal(rb @ ra, -(ra @ rb)):
            failures.append("R_beta R_alpha != -R_alpha R_beta")
        if not np.array_equal(ra.T @ e @ ra, e):
            failures.append("R_alpha does not preserve E")
        if not np.array_equal(rb.T @ e @ rb, e):
            failures.append("R_beta does not preserve E")
        if not np.array_equal(e.T, -e):
            failures.append("E is not antisymmetric")
        if determinant(e.tolist()) != 1:
            failures.append("det E != 1")
        ma, mb = self.M_complex()
        if not np.allclose(ma @ ma, -np.eye(4)) or not np.allclose(mb @ mb, -np.eye(4)):
            failures.append("M matrices do not square to -1")
        if not np.allclose(mb @ ma, -(ma @ mb)):
            failures.append("M matrices do not anticommute")
        if failures:
            raise QMError("INTERNAL_ERROR", "; ".join(failures))

    def to_json(self) -> dict:
        def imat(m):
            return [[str(int(v)) for v in row] for row in m]

        def gmat(m):
            return [[[str(v.re), str(v.im)] for v in row] for row in m]

        return {
            "R_alpha": imat(self.R_alpha),
            "R_beta": imat(self.R_beta),
            "E": imat(self.E),
            "M_alpha": gmat(self.M_alpha),
            "M_beta": gmat(self.M_beta),
        }


def homology_data() -> HomologyData:
    i = GaussianRational(0, 1)
    z = GaussianRational(0)
    m_alpha = [[i if r == c else z for c in range(4)] for r in range(4)]
    for k in (1, 3):
        m_alpha[k][k] = -i
    m_beta = [[i if r + c == 3 else z for c in range(4)] for r in range(4)]
    data = HomologyData(_R_ALPHA.copy(), _R_BETA.copy(), _E.copy(), m_alpha, m_beta)
    data.check()
    return data


def lipschitz_span_rank(data: HomologyData | None = None) -> int:
    """Rank of span{1, R_a, R_b, R_a R_b}, and a closure check under products."""
    data = data or homology_data()
    ra, rb = data.R_alpha, data.R_beta
    basis = [np.eye(8, dtype=np.int64), ra, rb, ra @ rb]
    stack = np.array([m.flatten() for m in basis], dtype=float)
    rank = int(np.linalg.matrix_rank(stack))
    for u in basis:
        for v in basis:
            prod = (u @ v).flatten().astype(float)
            if np.linalg.matrix_rank(np.vstack([stack, prod])) != rank:
                raise QMError("INTERNAL_ERROR", "span is not closed under products")
    return rank


def hurwitz_rational_rep(data: HomologyData | None = None) -> tuple[np.ndarray, bool]:
    """R(w) for w = (-1 + i + j + k)/2 and whether it is integral."""
    data = data or homology_data()
    omega = Quaternion(Fraction(-1, 2), Fraction(1, 2), Fraction(1, 2), Fraction(1, 2))
    rw = data.R_of(omega)
    integral = all(Fraction(v).denominator == 1 for v in rw.flatten())
    return rw, integral


NOT_LOCALLY_FREE = "NotLocallyFree"
FREE = "Free"


def regular_representation(q: Quaternion) -> np.ndarray:
    """4x4 integer matrix of left multiplication by q on O in the basis 1, i, j, k."""
    basis = [Quaternion(1), Quaternion(0, 1), Quaternion(0, 0, 1), Quaternion(0, 0, 0, 1)]
    cols = [(q * b).coords() for b in basis]
    return np.array([[int(c[r]) for c in cols] for r in range(4)], dtype=np.int64)


def free_module_generators(rank: int = 2) -> tuple[np.ndarray, np.ndarray]:
    """Actions of i and j on O^rank, as a known-free control lattice."""
    li = regular_representation(Quaternion(0, 1))
    lj = regular_representation(Quaternion(0, 0, 1))
    eye = np.eye(rank, dtype=np.int64)
    return np.kron(eye, li), np.kron(eye, lj)


def nonfreeness_check(ri=None, rj=None) -> tuple[int, int, str]:
    """dim_F2 of J L / 2L for J = (1+i, 1+j, 1+k), and of L / J L.

    J is the 2-adic Jacobson radical of O with O/J = F2; a free O-module of
    rank n has L / J L of dimension n, so with rank_Z L = 4n the quotient
    must be rank_Z(L) / 4.
    """
    if ri is None or rj is None:
        data = homology_data()
        ri, rj = data.R_alpha, data.R_beta
    n = ri.shape[0]
    ident = np.eye(n, dtype=np.int64)
    block = np.hstack([ident + ri, ident + rj, ident + ri @ rj])
    dim_jl = f2_rank(block)
    dim_q = n - dim_jl
    verdict = FREE if 4 * dim_q == n else NOT_LOCALLY_FREE
    return dim_jl, dim_q, verdict


# --------------------------------------------------------------------------
# T-matrix

_UNITS = (Quaternion(1), Quaternion(0, 1), Quaternion(0, 0, 1), Quaternion(0, 0, 0, 1))


def _phi(data: HomologyData, h1: Quaternion, h2: Quaternion, k_order: str) -> np.ndarray:
    """phi(h1, h2) = h1 e_1 + h2 e_5 in the lattice."""
    e1 = np.zeros(8, dtype=object)
    e5 = np.zeros(8, dtype=object)
    e1[0] = 1
    e5[4] = 1
    return data.R_of(h1, k_order).dot(e1) + data.R_of(h2, k_order).dot(e5)


def _im_h(data: HomologyData, u: np.ndarray, v: np.ndarray) -> Fraction:
    return Fraction(u.dot(data.E.astype(object)).dot(v))


def t_matrix(data: HomologyData | None = None, k_order: str = "ba") -> list[list[Quaternion]]:
    """The 2x2 quaternion matrix T with trd(a^t T b') = Im H(phi a, phi b).

    Each entry follows from 2t = trd(t) + trd(-t i) i + trd(-t j) j + trd(-t k) k
    evaluated on the unit translates of the two basis vectors. With
    k_order "ab" the k-components change sign.
    """
    data = data or homology_data()
    zero = Quaternion(0)
    T = [[zero, zero], [zero, zero]]
    for a in range(2):
        for b in range(2):
            total = Quaternion(0)
            for h in _UNITS:
                left = _phi(data, *((Quaternion(1), zero) if a == 0 else (zero, Quaternion(1))), k_order)
                right = _phi(data, *((h, zero) if b == 0 else (zero, h)), k_order)
                total = total + h * _im_h(data, left, right)
            T[a][b] = total * Fraction(1, 2)
    return T


def conjugate_transpose(T: list[list[Quaternion]]) -> list[list[Quaternion]]:
    return [[T[c][r].conjugate() for c in range(2)] for r in range(2)]


def t_matrix_report(data: HomologyData | None = None, k_order: str = "ba") -> dict:
    T = t_matrix(data, k_order)
    tp = conjugate_transpose(T)
    anti = all(tp[r][c] == -T[r][c] for r in range(2) for c in range(2))
    nrd_prod = T[0][0].nrd() * T[1][1].nrd()
    return {"T": T, "antihermitian": anti, "nrd_product": nrd_prod}
