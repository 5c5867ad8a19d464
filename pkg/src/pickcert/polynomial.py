"""Sparse multivariate polynomials with complex coefficients.

A :class:`MultiPoly` is an immutable table ``exponent tuple -> complex``.
Coefficients whose modulus falls below ``PRUNE_RTOL`` times the largest
coefficient modulus of the operand(s) are dropped, so tables stay canonical
after cancellation.

Besides arithmetic this module provides the reflection
``q~(z) = z^d * conj(q)(1/conj(z))``, univariate root finding (companion
matrix plus one Newton step) and a numerical non-vanishing check on the
polydisc.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ArgumentError, DominationError

PRUNE_RTOL = 1e-14
STABILITY_ATOL = 1e-9
BOUNDARY_TOL = 1e-7

Exponent = tuple


def grlex_key(exp):
    """Graded lexicographic sort key (total degree first, then lex)."""
    return (sum(exp), tuple(exp))


def _prune(terms, scale):
    thresh = PRUNE_RTOL * scale
    return {e: c for e, c in terms.items() if c != 0 and abs(c) > thresh}


class MultiPoly:
    """Immutable sparse polynomial in ``nvars`` complex variables."""

    __slots__ = ("_nvars", "_terms")

    def __init__(self, nvars: int, terms: Mapping[Sequence[int], complex] | None = None, *, scale=None):
        if nvars < 1:
            raise ArgumentError(f"nvars must be positive, got {nvars}")
        table = {}
        for exp, coeff in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != nvars:
                raise ArgumentError(f"exponent {exp} has length {len(exp)}, expected {nvars}")
            if any(e < 0 for e in exp):
                raise ArgumentError(f"negative exponent in {exp}")
            c = complex(coeff)
            if not (math.isfinite(c.real) and math.isfinite(c.imag)):
                raise ArgumentError(f"non-finite coefficient at {exp}")
            table[exp] = table.get(exp, 0j) + c
        if scale is None:
            scale = max((abs(c) for c in table.values()), default=0.0)
        self._nvars = nvars
        self._terms = MappingProxyType(_prune(table, scale))

    # -- construction helpers -------------------------------------------------
    @classmethod
    def constant(cls, nvars, value=1.0):
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def variable(cls, nvars, index, coeff=1.0):
        exp = [0] * nvars
        exp[index] = 1
        return cls(nvars, {tuple(exp): coeff})

    @classmethod
    def monomial(cls, exp, coeff=1.0):
        exp = tuple(exp)
        return cls(len(exp), {exp: coeff})

    @classmethod
    def from_coeffs(cls, coeffs: Iterable[complex]):
        """Univariate polynomial from ascending coefficients."""
        return cls(1, {(k,): c for k, c in enumerate(coeffs)})

    # -- accessors ------------------------------------------------------------
    @property
    def nvars(self) -> int:
        return self._nvars

    @property
    def terms(self) -> Mapping[tuple, complex]:
        return self._terms

    def coeff(self, exp) -> complex:
        return self._terms.get(tuple(exp), 0j)

    def is_zero(self) -> bool:
        return not self._terms

    def sorted_terms(self):
        return sorted(self._terms.items(), key=lambda kv: grlex_key(kv[0]))

    def multidegree(self) -> tuple:
        if not self._terms:
            return (0,) * self._nvars
        return tuple(max(e[r] for e in self._terms) for r in range(self._nvars))

    def total_degree(self) -> int:
        return max((sum(e) for e in self._terms), default=0)

    def max_modulus(self) -> float:
        return max((abs(c) for c in self._terms.values()), default=0.0)

    def to_coeffs(self) -> np.ndarray:
        """Ascending coefficient array of a univariate polynomial."""
        if self._nvars != 1:
            raise ArgumentError("to_coeffs requires a univariate polynomial")
        out = np.zeros(self.total_degree() + 1, dtype=complex)
        for (k,), c in self._terms.items():
            out[k] = c
        return out

    # -- arithmetic -----------------------------------------------------------
    def _check(self, other):
        if not isinstance(other, MultiPoly):
            return MultiPoly.constant(self._nvars, other)
        if other._nvars != self._nvars:
            raise ArgumentError(f"dimension mismatch: {self._nvars} vs {other._nvars}")
        return other

    def __add__(self, other):
        other = self._check(other)
        table = dict(self._terms)
        for e, c in other._terms.items():
            table[e] = table.get(e, 0j) + c
        return MultiPoly(self._nvars, table, scale=max(self.max_modulus(), other.max_modulus()))

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self._nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            return self.scale(other)
        other = self._check(other)
        table = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                table[e] = table.get(e, 0j) + c1 * c2
        return MultiPoly(self._nvars, table, scale=self.max_modulus() * other.max_modulus())

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        out = MultiPoly.constant(self._nvars)
        for _ in range(k):
            out = out * self
        return out

    def scale(self, s) -> "MultiPoly":
        s = complex(s)
        return MultiPoly(self._nvars, {e: s * c for e, c in self._terms.items()})

    def conj(self) -> "MultiPoly":
        return MultiPoly(self._nvars, {e: c.conjugate() for e, c in self._terms.items()})

    def __call__(self, *z):
        return eval_poly(self, z[0] if len(z) == 1 and np.ndim(z[0]) else z)

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self._nvars == other._nvars and dict(self._terms) == dict(other._terms)

    def __hash__(self):
        return hash((self._nvars, frozenset(self._terms.items())))

    def __repr__(self):
        if not self._terms:
            return f"MultiPoly({self._nvars}, 0)"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(f"z{r + 1}^{k}" if k > 1 else f"z{r + 1}" for r, k in enumerate(e) if k)
            parts.append(f"({c:.6g})" + (f"*{mono}" if mono else ""))
        return f"MultiPoly({self._nvars}, " + " + ".join(parts) + ")"


def add(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    return p + q


def multiply(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    return p * q


def scalar_multiply(p: MultiPoly, s: complex) -> MultiPoly:
    return p.scale(s)


def compose_univariate(p: MultiPoly, g: MultiPoly) -> MultiPoly:
    """Return ``p(g(z))`` for univariate ``p`` and ``g`` (Horner scheme)."""
    if p.nvars != 1 or g.nvars != 1:
        raise ArgumentError("compose_univariate requires univariate operands")
    coeffs = p.to_coeffs() if not p.is_zero() else np.zeros(1, dtype=complex)
    out = MultiPoly.constant(1, coeffs[-1])
    for c in coeffs[-2::-1]:
        out = out * g + c
    return out


def eval_poly(p: MultiPoly, z) -> complex:
    """Evaluate ``p`` at a single point ``z`` (sequence of length nvars)."""
    z = np.asarray(z, dtype=complex).reshape(-1)
    if z.shape[0] != p.nvars:
        raise ArgumentError(f"point has {z.shape[0]} coordinates, polynomial has {p.nvars} variables")
    total = 0j
    for exp, c in p.terms.items():
        term = c
        for zr, k in zip(z, exp):
            if k:
                term *= complex(zr) ** k
        total += term
    return complex(total)


def eval_many(p: MultiPoly, points) -> np.ndarray:
    """Vectorised evaluation at an ``(m, nvars)`` array of points."""
    pts = np.asarray(points, dtype=complex)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1) if p.nvars == 1 else pts.reshape(1, -1)
    if pts.shape[1] != p.nvars:
        raise ArgumentError(f"points have {pts.shape[1]} coordinates, polynomial has {p.nvars} variables")
    out = np.zeros(pts.shape[0], dtype=complex)
    for exp, c in p.terms.items():
        term = np.full(pts.shape[0], c, dtype=complex)
        for r, k in enumerate(exp):
            if k:
                term = term * pts[:, r] ** k
        out += term
    return out


def eval_tensor(p: MultiPoly, axes: Sequence[np.ndarray]) -> np.ndarray:
    """Evaluate on the tensor-product grid ``axes[0] x ... x axes[n-1]``."""
    if len(axes) != p.nvars:
        raise ArgumentError("one sample axis per variable required")
    axes = [np.asarray(a, dtype=complex) for a in axes]
    shape = tuple(a.shape[0] for a in axes)
    out = np.zeros(shape, dtype=complex)
    degs = p.multidegree()
    powers = [np.vander(a, degs[r] + 1, increasing=True) for r, a in enumerate(axes)]
    for exp, c in p.terms.items():
        term = np.asarray(c, dtype=complex)
        for r, k in enumerate(exp):
            vec = powers[r][:, k]
            term = np.multiply.outer(term, vec) if term.ndim else c * vec
        out += term
    return out


def reflect(p: MultiPoly, d: Sequence[int]) -> MultiPoly:
    """Reflection ``z^d * conj(p)(1/conj(z))``: exponent ``a -> d - a`` and conjugation."""
    d = tuple(int(x) for x in d)
    if len(d) != p.nvars:
        raise ArgumentError(f"multidegree {d} has wrong length for {p.nvars} variables")
    table = {}
    for exp, c in p.terms.items():
        if any(a > b for a, b in zip(exp, d)):
            raise DominationError(f"exponent {exp} is not dominated by {d}")
        table[tuple(b - a for a, b in zip(exp, d))] = c.conjugate()
    return MultiPoly(p.nvars, table)


def roots_1d(p: MultiPoly) -> np.ndarray:
    """All roots of a univariate polynomial, with multiplicity.

    Companion-matrix eigenvalues (``numpy.roots``) followed by one Newton
    step per root; the step is kept only if it does not increase ``|p|``.
    """
    if p.nvars != 1:
        raise ArgumentError("roots_1d requires a univariate polynomial")
    if p.is_zero():
        raise ArgumentError("the zero polynomial has no well-defined roots")
    coeffs = p.to_coeffs()
    if coeffs.shape[0] == 1:
        return np.zeros(0, dtype=complex)
    desc = coeffs[::-1]
    roots = np.roots(desc).astype(complex)
    dcoeffs = np.polyder(desc)
    for i, r in enumerate(roots):
        val = np.polyval(desc, r)
        der = np.polyval(dcoeffs, r)
        if val == 0 or der == 0:
            continue
        cand = r - val / der
        if abs(np.polyval(desc, cand)) <= abs(val):
            roots[i] = cand
    return roots


def poly_from_roots(roots, leading=1.0) -> MultiPoly:
    """``leading * prod(z - r)`` as a univariate polynomial."""
    desc = np.poly(np.asarray(roots, dtype=complex)) if len(roots) else np.ones(1)
    return MultiPoly.from_coeffs(leading * np.asarray(desc, dtype=complex)[::-1])


@dataclass(frozen=True)
class StabilityGrid:
    """Sampling parameters for :func:`is_stable`.

    ``max_points`` caps the size of the interior tensor grid; when the full
    grid would exceed it, the number of angles per coordinate is reduced.
    """

    radii: tuple = (0.0, 0.25, 0.5, 0.75, 0.9, 0.99)
    angles: int = 64
    max_points: int = 2 ** 20
    atol: float = STABILITY_ATOL
    boundary_tol: float = BOUNDARY_TOL

    def effective_angles(self, nvars: int) -> int:
        nonzero = sum(1 for r in self.radii if r > 0)
        has_zero = any(r == 0 for r in self.radii)
        a = self.angles
        while a > 4 and (nonzero * a + has_zero) ** nvars > self.max_points:
            a -= 1
        return a

    def axis(self, nvars: int) -> np.ndarray:
        a = self.effective_angles(nvars)
        theta = 2 * np.pi * np.arange(a) / a
        pts = [0j] if any(r == 0 for r in self.radii) else []
        for r in self.radii:
            if r > 0:
                pts.extend(r * np.exp(1j * theta))
        return np.asarray(pts, dtype=complex)

    def torus_axis(self, nvars: int) -> np.ndarray:
        a = self.effective_angles(nvars)
        return np.exp(2j * np.pi * np.arange(a) / a)


@dataclass(frozen=True)
class StabilityReport:
    stable: bool
    min_modulus: float
    witness: tuple
    grid_resolution: dict = field(default_factory=dict)
    boundary_min_modulus: float = float("nan")
    exact: bool = False


def _grid_minimum(p, axis):
    vals = np.abs(eval_tensor(p, [axis] * p.nvars))
    idx = np.unravel_index(int(np.argmin(vals)), vals.shape)
    return float(vals[idx]), tuple(complex(axis[i]) for i in idx)


def is_stable(p: MultiPoly, grid: StabilityGrid | None = None) -> StabilityReport:
    """Check that ``p`` does not vanish on the open polydisc.

    One variable: exact up to root-finding accuracy (no root of modulus
    below ``1 - boundary_tol``). Several variables: heuristic minimum of
    ``|p|`` over a polar grid of the polydisc of radius ``max(radii)``; this
    is not a certificate. Torus samples are reported separately and do not
    enter the verdict, since stable polynomials may vanish on the boundary.
    """
    grid = grid or StabilityGrid()
    if p.is_zero():
        raise ArgumentError("the zero polynomial is not stable")
    axis = grid.axis(p.nvars)
    min_mod, witness = _grid_minimum(p, axis)
    bmin, _ = _grid_minimum(p, grid.torus_axis(p.nvars))
    resolution = {
        "radii": list(grid.radii),
        "angles": grid.effective_angles(p.nvars),
        "points": int(axis.shape[0] ** p.nvars),
    }
    if p.nvars == 1:
        roots = roots_1d(p)
        inside = roots[np.abs(roots) < 1 - grid.boundary_tol]
        stable = inside.shape[0] == 0
        if not stable:
            k = int(np.argmin(np.abs(inside)))
            witness, min_mod = (complex(inside[k]),), 0.0
        return StabilityReport(stable, min_mod, witness, resolution, bmin, exact=True)
    return StabilityReport(min_mod > grid.atol, min_mod, witness, resolution, bmin)


def substitute_monomial_map(p: MultiPoly, target_nvars: int, sources: Sequence[int], multipliers: Sequence[complex]) -> MultiPoly:
    """Substitute ``z_r -> multipliers[r] * w_{sources[r]}``.

    Covers flat analytic discs (every source 0) and the coordinate pairings
    used when slicing the polydisc by (n-1)-discs.
    """
    if len(sources) != p.nvars or len(multipliers) != p.nvars:
        raise ArgumentError("one source and one multiplier per variable required")
    table = {}
    for exp, c in p.terms.items():
        new = [0] * target_nvars
        coeff = c
        for r, k in enumerate(exp):
            if k:
                new[sources[r]] += k
                coeff *= complex(multipliers[r]) ** k
        key = tuple(new)
        table[key] = table.get(key, 0j) + coeff
    return MultiPoly(target_nvars, table, scale=p.max_modulus())


def all_exponents(degs):
    """Every exponent tuple dominated by ``degs``, in grlex order."""
    return sorted(itertools.product(*(range(d + 1) for d in degs)), key=grlex_key)
