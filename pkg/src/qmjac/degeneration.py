"""Cluster pictures of the branch points, reduction verdicts, and the
identities behind the stable-model description of the family.

Valuations are p-adic on Q(i) (through a chosen square root of -1 when p
splits) or t-adic on Laurent polynomials over Q(i).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .algebra import GaussianRational, as_fraction, gaussian_valuation, is_prime
from .errors import QMError

GOOD = "GoodReduction"
POTENTIALLY_GOOD = "PotentiallyGood"
NOT_POTENTIALLY_GOOD = "NotPotentiallyGood"
INCONCLUSIVE = "Inconclusive"

# --------------------------------------------------------------------------
# Valued points


@dataclass(frozen=True)
class Laurent:
    """Finite Laurent polynomial in t over Q(i): {exponent: coefficient}."""

    terms: tuple[tuple[int, GaussianRational], ...]

    @classmethod
    def make(cls, mapping) -> "Laurent":
        items = {}
        for e, c in dict(mapping).items():
            c = GaussianRational.coerce(c)
            if c != 0:
                items[int(e)] = c
        return cls(tuple(sorted(items.items())))

    @classmethod
    def monomial(cls, coeff, exponent: int) -> "Laurent":
        return cls.make({exponent: coeff})

    def __sub__(self, other: "Laurent") -> "Laurent":
        out = dict(self.terms)
        for e, c in other.terms:
            out[e] = out.get(e, GaussianRational(0)) - c
        return Laurent.make(out)

    def valuation(self) -> Fraction | None:
        return Fraction(self.terms[0][0]) if self.terms else None

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms:
            parts.append(f"({c})" + ("" if e == 0 else f"*t^{e}"))
        return " + ".join(parts)


@dataclass(frozen=True)
class ValuedPoint:
    label: str
    element: GaussianRational | Laurent
    context: tuple  # ("p", p, branch) or ("t",)

    def distance_valuation(self, other: "ValuedPoint") -> Fraction | None:
        """v(self - other); None stands for +infinity."""
        if self.context != other.context:
            raise QMError("DEGENERATE_INPUT", "points live in different valued fields")
        diff = self.element - other.element
        if self.context[0] == "t":
            return diff.valuation()
        if diff == 0:
            return None
        _, p, branch = self.context
        return as_fraction(gaussian_valuation(diff, p, branch=branch))


def p_adic_points(values: dict[str, object], p: int, branch: int | None = None) -> list[ValuedPoint]:
    if p == 2:
        raise QMError("UNSUPPORTED", "residue characteristic 2")
    if not is_prime(p):
        raise QMError("DEGENERATE_INPUT", f"{p} is not prime")
    return [ValuedPoint(lab, GaussianRational.coerce(v), ("p", p, branch)) for lab, v in values.items()]


def family_roots_p_adic(b: Sequence, p: int, branch: int | None = None) -> list[ValuedPoint]:
    """Roots 0, +-1, +-i, +-b_j, +-1/b_j of f at a rational (or Q(i)) b-tuple."""
    one, i = GaussianRational(1), GaussianRational(0, 1)
    values = {"0": GaussianRational(0), "1": one, "-1": -one, "i": i, "-i": -i}
    for k, bj in enumerate(b, 1):
        bj = GaussianRational.coerce(bj)
        values.update({f"b{k}": bj, f"-b{k}": -bj, f"1/b{k}": 1 / bj, f"-1/b{k}": -(1 / bj)})
    if len(set(values.values())) != len(values):
        raise QMError("DEGENERATE_INPUT", "roots are not distinct")
    if branch is None and p % 4 == 1:
        from .algebra import square_roots_of_minus_one

        branch = square_roots_of_minus_one(p)[0]
    return p_adic_points(values, p, branch)


def pullback_roots_t_adic(power: int = 2) -> list[ValuedPoint]:
    """Roots at t = 0 of the genus-4 fiber pulled back along b = t^power."""
    one, i = GaussianRational(1), GaussianRational(0, 1)
    pts = {
        "0": {},
        "1": {0: one},
        "-1": {0: -one},
        "i": {0: i},
        "-i": {0: -i},
        "b": {power: one},
        "-b": {power: -one},
        "1/b": {-power: one},
        "-1/b": {-power: -one},
    }
    return [ValuedPoint(lab, Laurent.make(m), ("t",)) for lab, m in pts.items()]


# --------------------------------------------------------------------------
# Cluster trees


@dataclass
class Cluster:
    members: frozenset[str]
    depth: Fraction
    children: list["Cluster"] = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.members)

    def to_json(self) -> dict:
        return {
            "roots": sorted(self.members),
            "size": self.size,
            "depth": str(self.depth),
            "children": [c.to_json() for c in self.children],
        }


@dataclass
class ClusterTree:
    roots: list[ValuedPoint]
    top: Cluster
    leading_coeff_valuation: Fraction
    distances: dict[frozenset, Fraction]

    def proper_clusters(self) -> list[Cluster]:
        out = []

        def walk(c):
            if c.size >= 2:
                out.append(c)
            for ch in c.children:
                walk(ch)

        walk(self.top)
        return out

    def depths(self) -> list[Fraction]:
        return sorted(c.depth for c in self.proper_clusters())

    def d_between(self, label: str, cluster: Cluster) -> Fraction:
        """Depth of the smallest cluster containing the root and the cluster."""
        return min(self.distances[frozenset((label, m))] for m in cluster.members)

    def nu(self, cluster: Cluster) -> Fraction:
        total = self.leading_coeff_valuation + cluster.size * cluster.depth
        for r in self.roots:
            if r.label not in cluster.members:
                total += self.d_between(r.label, cluster)
        return total

    def to_json(self) -> dict:
        return {"leading_coeff_valuation": str(self.leading_coeff_valuation), "tree": self.top.to_json()}


def build_cluster_tree(roots: Sequence[ValuedPoint], leading_coeff_valuation=0) -> ClusterTree:
    roots = list(roots)
    labels = [r.label for r in roots]
    if len(set(labels)) != len(labels):
        raise QMError("DEGENERATE_INPUT", "duplicate root labels")
    dist: dict[frozenset, Fraction] = {}
    for u, v in itertools.combinations(roots, 2):
        d = u.distance_valuation(v)
        if d is None:
            raise QMError("DEGENERATE_INPUT", f"roots {u.label} and {v.label} coincide")
        dist[frozenset((u.label, v.label))] = d

    def split(members: frozenset[str]) -> Cluster:
        if len(members) == 1:
            return Cluster(members, Fraction(0))  # leaves carry no depth
        inner = [dist[frozenset(pair)] for pair in itertools.combinations(sorted(members), 2)]
        depth = min(inner)
        # children: classes of the relation v(r - r') > depth
        remaining = set(members)
        children = []
        while remaining:
            seed = min(remaining)
            cls = {seed} | {m for m in remaining if m != seed and dist[frozenset((seed, m))] > depth}
            remaining -= cls
            children.append(split(frozenset(cls)))
        children.sort(key=lambda c: (-c.size, sorted(c.members)))
        return Cluster(members, depth, children)

    top = split(frozenset(labels)) if len(labels) > 1 else Cluster(frozenset(labels), Fraction(0))
    return ClusterTree(roots, top, as_fraction(leading_coeff_valuation), dist)


def _is_principal(tree: ClusterTree, c: Cluster, genus: int) -> bool:
    if c.size < 3:
        return False
    if c is tree.top:
        if len(c.children) == 2:
            return False
        if any(ch.size == 2 * genus for ch in c.children):
            return False
    return True


@dataclass
class ReductionVerdict:
    verdict: str
    reasons: list[str]

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "reasons": self.reasons}


def reduction_verdict(tree: ClusterTree, unramified: bool = True) -> ReductionVerdict:
    """Good reduction when the roots are defined over an unramified
    extension, every proper cluster other than the top one is odd, and every
    proper cluster is principal with even nu; a proper even cluster other
    than the top one rules out potentially good reduction of the Jacobian.
    """
    ctx = tree.roots[0].context
    if ctx[0] == "p" and ctx[1] == 2:
        raise QMError("UNSUPPORTED", "residue characteristic 2")
    n = len(tree.roots)
    genus = (n - 1) // 2
    proper = tree.proper_clusters()
    even = [c for c in proper if c is not tree.top and c.size % 2 == 0]
    if even:
        names = ["{" + ", ".join(sorted(c.members)) + "}" for c in even]
        return ReductionVerdict(NOT_POTENTIALLY_GOOD, [f"even cluster {s}" for s in names])
    reasons = []
    if not unramified:
        reasons.append("condition 1: roots need a ramified extension")
    for c in proper:
        name = "{" + ", ".join(sorted(c.members)) + "}"
        if not _is_principal(tree, c, genus):
            reasons.append(f"condition 3: {name} is not principal")
        elif tree.nu(c).denominator != 1 or tree.nu(c).numerator % 2:
            reasons.append(f"condition 3: nu of {name} is {tree.nu(c)}, not even")
    if reasons:
        return ReductionVerdict(POTENTIALLY_GOOD, reasons)
    return ReductionVerdict(GOOD, ["all three conditions hold"])


# --------------------------------------------------------------------------
# Parameters with a twin cluster


def _twin_conditions_hold(b: Sequence[Fraction], p: int) -> bool:
    try:
        pts = family_roots_p_adic(b, p)
    except QMError:
        return False
    by_label = {pt.label: pt for pt in pts}
    b1 = by_label["b1"]
    for pt in pts:
        if pt.label == "b1":
            continue
        v = b1.distance_valuation(pt)
        if pt.label == "b2":
            if v is None or v <= 0:
                return False
        elif v != 0:
            return False
    return True


def bad_parameter_constructor(g: int, p: int, search_bound: int | None = None) -> tuple[Fraction, ...]:
    """Distinct rationals b_1..b_d outside {0, +-1} with v_p(b1 - b2) > 0 and
    v_p(b1 - r) = 0 for every other root r, found by a greedy integer search."""
    if g < 6 or g % 2:
        raise QMError("DEGENERATE_INPUT", "g must be even and at least 6")
    if p == 2:
        raise QMError("UNSUPPORTED", "residue characteristic 2")
    d = g // 2 - 1
    bound = search_bound or 4 * p + 4 * d + 8
    for b1 in range(2, bound):
        b2 = b1 + p
        chosen = [Fraction(b1), Fraction(b2)]
        if not _twin_conditions_hold(chosen, p):
            continue
        for cand in range(2, bound * 4):
            if len(chosen) == d:
                break
            trial = chosen + [Fraction(cand)]
            if cand not in (b1, b2) and _twin_conditions_hold(trial, p):
                chosen = trial
        if len(chosen) == d:
            return tuple(chosen)
    raise QMError("SEARCH_EXHAUSTED", f"no tuple for g={g}, p={p} below {bound}")


# --------------------------------------------------------------------------
# Identities of the stable model


def genus2_splitting_identity(sign: int = 1, perturb: bool = False) -> bool:
    """Check that u = z + c/z, w = i v (z + sign*s)/z^2 maps
    v^2 = -z(z^2-1)(z^2-c^2) to w^2 = (u + 2 sign*s)(u^2 - (c+1)^2), s^2 = c.

    ``perturb`` drops the factor i from w, as a control that must fail.
    """
    import sympy as sp

    if sign not in (1, -1):
        raise QMError("DEGENERATE_INPUT", "sign must be +-1")
    z, c, s, v = sp.symbols("z c s v")
    u = z + c / z
    w = (1 if perturb else sp.I) * v * (z + sign * s) / z**2
    expr = sp.numer(sp.together(w**2 - (u + 2 * sign * s) * (u**2 - (c + 1) ** 2)))
    expr = sp.expand(sp.expand(expr).subs(v**2, -z * (z**2 - 1) * (z**2 - c**2)))
    reduced = sp.rem(sp.Poly(expr, s), sp.Poly(s**2 - c, s)).as_expr()
    return sp.expand(reduced) == 0


def j_invariant_Ec(c) -> Fraction:
    """1728 (c + 1/3)^3 (c + 3)^3 / ((c - 1)^4 (c + 1)^2)."""
    c = as_fraction(c)
    if c in (1, -1):
        raise QMError("POLE", f"j has a pole at c = {c}")
    return 1728 * (c + Fraction(1, 3)) ** 3 * (c + 3) ** 3 / ((c - 1) ** 4 * (c + 1) ** 2)
