"""Rational inner functions in Rudin normal form.

A rational inner function on ``D^n`` is stored as ``(tau, d, q)`` and
represents ``f = tau * q~ / q`` with ``q~ = reflect(q, d)`` and ``q``
non-vanishing on the open polydisc. Restrictions to one-dimensional discs
are reduced to a coprime :class:`OneVarRational`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import polynomial as P
from .errors import (
    ArgumentError,
    DominationError,
    ReductionUnstableError,
    SingularPointError,
    StabilityError,
)
from .geometry import FLAT, MOBIUS_GRAPH, AnalyticDisc
from .polynomial import MultiPoly, StabilityGrid

TAU_TOL = 1e-12
DIVISION_TOL = 1e-12
PAIRING_RTOL = 1e-8
BOUNDARY_TOL = 1e-7
INNER_CIRCLE_TOL = 1e-8
POINT_TOL = 1e-12


@dataclass(frozen=True)
class RationalInnerFunction:
    tau: complex
    d: tuple
    q: MultiPoly
    numerator: MultiPoly = field(compare=False)

    @property
    def n(self) -> int:
        return self.q.nvars

    def __call__(self, *z):
        return eval_rif(self, z[0] if len(z) == 1 else z)


@dataclass(frozen=True)
class OneVarRational:
    """Coprime quotient ``num / den`` of univariate polynomials, ``den(0) = 1`` when possible."""

    num: MultiPoly
    den: MultiPoly
    inner: bool = False

    def __call__(self, z):
        z_arr = np.asarray(z, dtype=complex)
        num = np.polyval(self.num.to_coeffs()[::-1], z_arr)
        den = np.polyval(self.den.to_coeffs()[::-1], z_arr)
        if np.any(np.abs(den) < DIVISION_TOL):
            raise SingularPointError("denominator vanishes at evaluation point")
        out = num / den
        return complex(out) if out.ndim == 0 else out

    @property
    def degree(self) -> int:
        return max(self.num.total_degree(), self.den.total_degree())

    def zeros(self) -> np.ndarray:
        return P.roots_1d(self.num)

    def poles(self) -> np.ndarray:
        return P.roots_1d(self.den)


@dataclass(frozen=True)
class InnerValidationReport:
    max_torus_defect: float
    max_interior_modulus: float
    singular_suspects: tuple
    torus_points: int
    excluded_points: int


@dataclass(frozen=True)
class InnerSample:
    """Sampling parameters for :func:`validate_inner`."""

    angles: int = 64
    interior: int = 100
    seed: int = 0
    exclusion: float = 1e-6
    max_points: int = 2 ** 20


def make_rif(tau, d: Sequence[int], q: MultiPoly, *, check_stability=True, grid: StabilityGrid | None = None) -> RationalInnerFunction:
    """Validated constructor for ``tau * reflect(q, d) / q``."""
    tau = complex(tau)
    d = tuple(int(x) for x in d)
    if abs(abs(tau) - 1.0) > TAU_TOL:
        raise ArgumentError(f"tau must be unimodular, got |tau| = {abs(tau)!r}")
    if len(d) != q.nvars:
        raise ArgumentError(f"d has length {len(d)}, q has {q.nvars} variables")
    if any(x < 0 for x in d):
        raise ArgumentError("d must be non-negative")
    if q.is_zero() or abs(q.coeff((0,) * q.nvars)) == 0:
        raise StabilityError("q(0) must be nonzero")
    if any(a > b for a, b in zip(q.multidegree(), d)):
        raise DominationError(f"multidegree {q.multidegree()} of q is not dominated by d = {d}")
    if check_stability:
        report = P.is_stable(q, grid)
        if not report.stable:
            raise StabilityError(f"q vanishes (numerically) in the polydisc near {report.witness}")
    return RationalInnerFunction(tau, d, q, P.reflect(q, d).scale(tau))


def coordinate_function(n: int, r: int = 0) -> RationalInnerFunction:
    d = [0] * n
    d[r] = 1
    return make_rif(1.0, d, MultiPoly.constant(n))


def constant_rif(n: int, value=1.0) -> RationalInnerFunction:
    return make_rif(value, (0,) * n, MultiPoly.constant(n))


def rif_from_fraction(num: MultiPoly, den: MultiPoly, d: Sequence[int] | None = None, rtol=1e-10) -> RationalInnerFunction:
    """Convert an explicit fraction to Rudin form, rejecting non-Rudin pairs."""
    if d is None:
        d = tuple(max(a, b) for a, b in zip(num.multidegree(), den.multidegree()))
    refl = P.reflect(den, d)
    exp, ref_c = max(refl.terms.items(), key=lambda kv: abs(kv[1]))
    tau = num.coeff(exp) / ref_c
    if abs(abs(tau) - 1) > 1e-9:
        raise ArgumentError("numerator is not a unimodular multiple of the reflected denominator")
    diff = num - refl.scale(tau)
    if diff.max_modulus() > rtol * max(num.max_modulus(), 1.0):
        raise ArgumentError("numerator is not a unimodular multiple of the reflected denominator")
    return make_rif(tau / abs(tau), d, den)


def eval_rif(f: RationalInnerFunction, z) -> complex:
    """Evaluate at a point of the closed polydisc."""
    z = np.asarray(z, dtype=complex).reshape(-1)
    if z.shape[0] != f.n:
        raise ArgumentError(f"point has {z.shape[0]} coordinates, function lives on D^{f.n}")
    if np.any(np.abs(z) > 1 + POINT_TOL):
        raise ArgumentError("point lies outside the closed polydisc")
    den = P.eval_poly(f.q, z)
    if abs(den) < DIVISION_TOL:
        raise SingularPointError(f"denominator vanishes at {tuple(z)}")
    return P.eval_poly(f.numerator, z) / den


def eval_rif_many(f: RationalInnerFunction, points) -> np.ndarray:
    pts = np.asarray(points, dtype=complex).reshape(-1, f.n)
    if np.any(np.abs(pts) > 1 + POINT_TOL):
        raise ArgumentError("point lies outside the closed polydisc")
    den = P.eval_many(f.q, pts)
    if np.any(np.abs(den) < DIVISION_TOL):
        raise SingularPointError("denominator vanishes at an evaluation point")
    return P.eval_many(f.numerator, pts) / den


def degree(f: RationalInnerFunction) -> int:
    return sum(f.d)


def pullback(f: RationalInnerFunction, disc: AnalyticDisc, *, check_stability=True) -> RationalInnerFunction:
    """``f o disc`` for a flat disc or coordinate pairing, again in Rudin form.

    With ``z_r = c_r w_{s(r)}`` the reflection transforms as
    ``q~ o disc = prod(c_r^{d_r}) * reflect(q o disc, d')`` where ``d'``
    sums ``d_r`` over each source coordinate.
    """
    if disc.n != f.n:
        raise ArgumentError(f"disc maps into D^{disc.n}, function lives on D^{f.n}")
    sources, mult = disc.monomial_map()
    target = disc.source_dim
    q_new = P.substitute_monomial_map(f.q, target, sources, mult)
    d_new = [0] * target
    tau_new = f.tau
    for r, dr in enumerate(f.d):
        d_new[sources[r]] += dr
        tau_new *= complex(mult[r]) ** dr
    tau_new /= abs(tau_new)
    return make_rif(tau_new, d_new, q_new, check_stability=check_stability)


def _compose_mobius(p: MultiPoly, m, power: int) -> MultiPoly:
    """``(1 - conj(a) z)^power * p(z, m(z))`` as a univariate polynomial."""
    z = MultiPoly.variable(1, 0)
    lin_num = (z - m.a).scale(m.t)
    lin_den = MultiPoly.constant(1) - z.scale(m.a.conjugate())
    out = MultiPoly(1, {})
    for (i, j), c in p.terms.items():
        if j > power:
            raise DominationError(f"z2-degree {j} exceeds clearing power {power}")
        out = out + (z ** i) * (lin_num ** j) * (lin_den ** (power - j)) * c
    return out


def _pair_roots(num_roots, den_roots, rtol):
    """Greedy nearest pairing; returns (pairs, ambiguous)."""
    cands = sorted(
        ((abs(x - y), i, j) for i, x in enumerate(num_roots) for j, y in enumerate(den_roots)),
        key=lambda c: c[0],
    )
    used_i, used_j, pairs, ambiguous = set(), set(), [], []
    for dist, i, j in cands:
        if i in used_i or j in used_j:
            continue
        tol = rtol * max(1.0, abs(num_roots[i]))
        if dist <= tol:
            pairs.append((i, j, dist))
            used_i.add(i)
            used_j.add(j)
        elif dist <= 10 * tol:
            ambiguous.append((complex(num_roots[i]), complex(den_roots[j]), dist))
    return pairs, ambiguous


def _deflate(p: MultiPoly, roots) -> MultiPoly:
    if not len(roots):
        return p
    quot, _ = np.polydiv(p.to_coeffs()[::-1], np.poly(np.asarray(roots, dtype=complex)))
    return MultiPoly.from_coeffs(np.atleast_1d(quot)[::-1])


def reduce_rational(num: MultiPoly, den: MultiPoly, *, rtol=PAIRING_RTOL, check_inner=True) -> OneVarRational:
    """Cancel matched numerator/denominator roots and normalise ``den(0) = 1``.

    Root pairs closer than ``rtol * max(1, |r|)`` are cancelled; a pair
    within ten times that distance is ambiguous and raises
    :class:`ReductionUnstableError`.
    """
    if num.nvars != 1 or den.nvars != 1:
        raise ArgumentError("reduce_rational expects univariate polynomials")
    if den.is_zero():
        raise SingularPointError("zero denominator")
    if not num.is_zero() and num.total_degree() > 0 and den.total_degree() > 0:
        nr, dr = P.roots_1d(num), P.roots_1d(den)
        pairs, ambiguous = _pair_roots(nr, dr, rtol)
        if ambiguous:
            raise ReductionUnstableError(
                "root pair distance too close to the pairing tolerance",
                {"ambiguous_pairs": ambiguous, "rtol": rtol},
            )
        if pairs:
            common = [(nr[i] + dr[j]) / 2 for i, j, _ in pairs]
            num, den = _deflate(num, common), _deflate(den, common)
    c0 = den.coeff((0,))
    norm = c0 if abs(c0) > DIVISION_TOL * max(den.max_modulus(), 1.0) else den.coeff((den.total_degree(),))
    num, den = num.scale(1 / norm), den.scale(1 / norm)
    inner = is_inner_1d(num, den) if check_inner else False
    return OneVarRational(num, den, inner)


def is_inner_1d(num: MultiPoly, den: MultiPoly, samples=64, tol=INNER_CIRCLE_TOL) -> bool:
    """Denominator zero-free on the closed disc and ``|num| = |den|`` on the circle."""
    if den.total_degree() > 0:
        if np.any(np.abs(P.roots_1d(den)) < 1 + BOUNDARY_TOL):
            return False
    zeta = np.exp(2j * np.pi * np.arange(samples) / samples)
    nv = np.abs(np.polyval(num.to_coeffs()[::-1], zeta)) if not num.is_zero() else np.zeros(samples)
    dv = np.abs(np.polyval(den.to_coeffs()[::-1], zeta))
    return bool(np.max(np.abs(nv - dv)) <= tol * max(1.0, float(np.max(dv))))


def restrict(f: RationalInnerFunction, disc: AnalyticDisc, *, rtol=PAIRING_RTOL) -> OneVarRational:
    """Reduced one-variable rational function ``f o disc``."""
    if disc.n != f.n:
        raise ArgumentError(f"disc maps into D^{disc.n}, function lives on D^{f.n}")
    if disc.kind == FLAT:
        g = pullback(f, disc, check_stability=False)
        num, den = g.numerator, g.q
    elif disc.kind == MOBIUS_GRAPH:
        power = f.d[1]
        num = _compose_mobius(f.numerator, disc.mobius, power)
        den = _compose_mobius(f.q, disc.mobius, power)
    else:
        raise ArgumentError("restrict needs a one-dimensional disc; use pullback for coordinate pairings")
    out = reduce_rational(num, den, rtol=rtol)
    if not out.inner:
        raise ReductionUnstableError("restriction failed the inner-function check", {"disc": disc.label})
    return out


def disc_degree(f: RationalInnerFunction, disc: AnalyticDisc, *, boundary_tol=BOUNDARY_TOL) -> int:
    """Number of zeros of ``f o disc`` inside the disc, with multiplicity."""
    g = restrict(f, disc)
    if g.num.total_degree() == 0:
        return 0
    return int(np.sum(np.abs(g.zeros()) < 1 - boundary_tol))


def _torus_axis(angles, n, max_points):
    a = angles
    while a > 4 and a ** n > max_points:
        a -= 1
    return np.exp(2j * np.pi * np.arange(a) / a)


def validate_inner(f: RationalInnerFunction, sample: InnerSample | None = None) -> InnerValidationReport:
    """Unimodularity on a torus grid and the modulus bound at interior samples."""
    sample = sample or InnerSample()
    axis = _torus_axis(sample.angles, f.n, sample.max_points)
    qv = P.eval_tensor(f.q, [axis] * f.n)
    nv = P.eval_tensor(f.numerator, [axis] * f.n)
    thresh = sample.exclusion * max(f.q.max_modulus(), 1.0)
    keep = np.abs(qv) >= thresh
    defect = np.abs(np.abs(nv[keep]) / np.abs(qv[keep]) - 1.0)
    suspects = tuple(
        tuple(complex(axis[i]) for i in idx) for idx in zip(*np.nonzero(~keep))
    )
    rng = np.random.default_rng(sample.seed)
    rad = np.sqrt(rng.uniform(0, 1, size=(sample.interior, f.n)))
    pts = rad * np.exp(2j * np.pi * rng.uniform(0, 1, size=(sample.interior, f.n)))
    interior = np.abs(eval_rif_many(f, pts)) if sample.interior else np.zeros(0)
    return InnerValidationReport(
        max_torus_defect=float(defect.max()) if defect.size else 0.0,
        max_interior_modulus=float(interior.max()) if interior.size else 0.0,
        singular_suspects=suspects,
        torus_points=int(qv.size),
        excluded_points=int((~keep).sum()),
    )


def _unit(rng):
    return complex(np.exp(2j * np.pi * rng.uniform()))


def random_rif(rng: np.random.Generator, n: int, degree_: int, *, max_factors=4, singular_prob=0.0, max_coeff_sum=0.9) -> RationalInnerFunction:
    """Random RIF of total degree ``degree_`` with ``q`` a product of affine factors.

    Each factor ``1 + sum_{r in S} c_r z_r`` uses a random subset ``S`` of
    the coordinates whose degree budget is not exhausted. Regular factors
    have ``sum |c_r| <= max_coeff_sum`` (no zeros on the closed polydisc);
    with probability ``singular_prob`` a factor over two or more
    coordinates gets ``sum |c_r| = 1`` and vanishes at one torus point.
    """
    d = [0] * n
    for _ in range(degree_):
        d[int(rng.integers(n))] += 1
    budget = list(d)
    q = MultiPoly.constant(n)
    for _ in range(max_factors):
        avail = [r for r in range(n) if budget[r] > 0]
        if not avail or rng.uniform() < 0.2:
            break
        size = int(rng.integers(1, len(avail) + 1))
        S = sorted(rng.choice(avail, size=size, replace=False).tolist())
        if len(S) >= 2 and rng.uniform() < singular_prob:
            total = 1.0
        else:
            total = rng.uniform(0.1, max_coeff_sum)
        weights = rng.dirichlet(np.ones(len(S)))
        factor = MultiPoly.constant(n)
        for r, w in zip(S, weights):
            factor = factor + MultiPoly.variable(n, r, total * w * _unit(rng))
            budget[r] -= 1
        q = q * factor
    return make_rif(_unit(rng), d, q)
