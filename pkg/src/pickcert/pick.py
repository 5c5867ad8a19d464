"""One-variable Pick interpolation: matrices, verdicts and reconstruction.

The Pick matrix of nodes ``lam`` and targets ``w`` is
``P[i, j] = (1 - w_i conj(w_j)) / (1 - lam_i conj(lam_j))``. The data admit a
Schur-class interpolant iff ``P`` is positive semidefinite, and the
interpolant is unique iff ``P`` is moreover singular, in which case it is a
finite Blaschke product of degree ``rank(P)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import polynomial as P
from .errors import (
    ArgumentError,
    NearUniqueError,
    PreconditionError,
    ReconstructionError,
    ReductionUnstableError,
)
from .polynomial import MultiPoly
from .rif import OneVarRational, reduce_rational

NODE_TOL = 1e-12
TARGET_TOL = 1e-12
INTERP_TOL = 1e-8


@dataclass(frozen=True)
class PickTolerances:
    tol_psd: float = 1e-9
    tol_rank: float = 1e-7


@dataclass(frozen=True)
class PickProblem:
    nodes: tuple
    targets: tuple

    def __post_init__(self):
        nodes = tuple(complex(x) for x in self.nodes)
        targets = tuple(complex(x) for x in self.targets)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "targets", targets)
        if len(nodes) != len(targets):
            raise ArgumentError(f"{len(nodes)} nodes but {len(targets)} targets")
        if any(abs(x) >= 1 for x in nodes):
            raise ArgumentError("nodes must lie in the open unit disc")
        if any(abs(w) > 1 + TARGET_TOL for w in targets):
            raise ArgumentError("targets must lie in the closed unit disc")
        for (i, x), (j, y) in itertools.combinations(enumerate(nodes), 2):
            if abs(x - y) <= NODE_TOL:
                raise ArgumentError(f"duplicate nodes {i} and {j}")

    def __len__(self):
        return len(self.nodes)

    def extended(self, node, target) -> "PickProblem":
        return PickProblem(self.nodes + (node,), self.targets + (target,))

    def subset(self, idx) -> "PickProblem":
        return PickProblem(tuple(self.nodes[i] for i in idx), tuple(self.targets[i] for i in idx))


@dataclass(frozen=True)
class PickMatrix:
    entries: np.ndarray
    eigenvalues: np.ndarray  # ascending
    eigenvectors: np.ndarray = field(repr=False)
    rank_estimate: int = 0

    @property
    def largest(self) -> float:
        return float(self.eigenvalues[-1]) if self.eigenvalues.size else 0.0

    @property
    def smallest(self) -> float:
        return float(self.eigenvalues[0]) if self.eigenvalues.size else 0.0


@dataclass(frozen=True)
class UniquenessVerdict:
    solvable: bool
    unique: bool
    min_eigenvalue: float
    smallest_relative_eigenvalue: float
    tolerances: PickTolerances

    @property
    def label(self) -> str:
        if not self.solvable:
            return "unsolvable"
        return "unique" if self.unique else "non-unique"


@dataclass(frozen=True)
class ValueDisc:
    center: complex
    radius: float

    def contains(self, w, tol=0.0) -> bool:
        return abs(w - self.center) <= self.radius + tol


def pick_entries(nodes, targets) -> np.ndarray:
    lam = np.asarray(nodes, dtype=complex)
    w = np.asarray(targets, dtype=complex)
    return (1 - np.outer(w, w.conj())) / (1 - np.outer(lam, lam.conj()))


def build_pick_matrix(p: PickProblem, tol: PickTolerances | None = None) -> PickMatrix:
    tol = tol or PickTolerances()
    entries = pick_entries(p.nodes, p.targets)
    if entries.size:
        evals, evecs = np.linalg.eigh(entries)
    else:
        evals, evecs = np.zeros(0), np.zeros((0, 0), dtype=complex)
    top = float(evals[-1]) if evals.size else 0.0
    rank = int(np.sum(evals > tol.tol_rank * top)) if top > 0 else 0
    return PickMatrix(entries, evals, evecs, rank)


def classify(pm: PickMatrix, tol: PickTolerances | None = None) -> UniquenessVerdict:
    tol = tol or PickTolerances()
    if not pm.eigenvalues.size:
        return UniquenessVerdict(True, False, 0.0, 1.0, tol)
    lo, hi = pm.smallest, pm.largest
    solvable = lo >= -tol.tol_psd * max(1.0, hi)
    rel = lo / hi if hi > 0 else 0.0
    unique = solvable and lo <= tol.tol_rank * hi
    return UniquenessVerdict(bool(solvable), bool(unique), lo, float(rel), tol)


def _kernel_interpolant(p: PickProblem):
    """Numerator and denominator built from the null vector of ``p``'s Pick matrix.

    For ``nu`` in the kernel, ``A(z) = sum nu_j / (1 - conj(lam_j) z)`` and
    ``B(z) = sum nu_j conj(w_j) / (1 - conj(lam_j) z)`` satisfy
    ``A(lam_i) = w_i B(lam_i)``; both are cleared of the common denominator.
    """
    entries = pick_entries(p.nodes, p.targets)
    _, vecs = np.linalg.eigh(entries)
    nu = vecs[:, 0]
    factors = [MultiPoly.from_coeffs([1.0, -lam.conjugate()]) for lam in p.nodes]
    num = MultiPoly(1, {})
    den = MultiPoly(1, {})
    for j, (nu_j, w_j) in enumerate(zip(nu, p.targets)):
        prod = MultiPoly.constant(1)
        for k, fac in enumerate(factors):
            if k != j:
                prod = prod * fac
        num = num + prod.scale(nu_j)
        den = den + prod.scale(nu_j * w_j.conjugate())
    return num, den


def interpolation_residual(g, p: PickProblem) -> float:
    if not len(p):
        return 0.0
    return float(np.max(np.abs(g(np.asarray(p.nodes)) - np.asarray(p.targets))))


def reconstruct_unique(p: PickProblem, pm: PickMatrix | None = None, tol: PickTolerances | None = None, *, interp_tol=INTERP_TOL) -> OneVarRational:
    """The unique Schur interpolant of singular PSD data, as a Blaschke product.

    The null vector is taken on the leading ``rank + 1`` nodes, where the
    kernel is one-dimensional and no common factors appear. If the rank was
    underestimated, larger leading subsets are tried; a candidate from ``m``
    nodes must have degree ``m - 1``, be inner and interpolate every node.
    """
    tol = tol or PickTolerances()
    pm = pm or build_pick_matrix(p, tol)
    verdict = classify(pm, tol)
    if not verdict.unique:
        raise PreconditionError(f"Pick data are {verdict.label}; a unique interpolant needs a singular PSD matrix")
    rank = pm.rank_estimate
    failures = []
    for m in range(rank + 1, len(p) + 1):
        sub = p.subset(range(m))
        num, den = _kernel_interpolant(sub)
        try:
            g = reduce_rational(num, den)
        except ReductionUnstableError as exc:
            failures.append(f"m={m}: {exc}")
            continue
        resid = interpolation_residual(g, p)
        if not g.inner:
            failures.append(f"m={m}: not inner")
        elif g.degree != m - 1:
            failures.append(f"m={m}: degree {g.degree} != {m - 1}")
        elif resid > interp_tol:
            failures.append(f"m={m}: interpolation residual {resid:.3e}")
        else:
            return g
    raise ReconstructionError("; ".join(failures) or "no reconstruction attempted")


def value_disc(p: PickProblem, z_star: complex, tol: PickTolerances | None = None) -> ValueDisc:
    """Set of values ``g(z_star)`` over all Schur-class interpolants of ``p``.

    With ``u_i = 1/(1 - lam_i conj(z))``, ``v = w * u`` and ``s = 1 - |z|^2``
    the bordered Pick matrix is PSD iff
    ``(1 - |x|^2)/s - u*P^-1 u + 2 Re(x v*P^-1 u) - |x|^2 v*P^-1 v >= 0``,
    a closed disc in ``x``.
    """
    tol = tol or PickTolerances()
    z_star = complex(z_star)
    if abs(z_star) >= 1:
        raise ArgumentError("z_star must lie in the open disc")
    for lam, w in zip(p.nodes, p.targets):
        if abs(lam - z_star) <= NODE_TOL:
            return ValueDisc(w, 0.0)
    pm = build_pick_matrix(p, tol)
    verdict = classify(pm, tol)
    if not verdict.solvable:
        raise PreconditionError("value disc of an unsolvable Pick problem")
    if verdict.unique:
        g = reconstruct_unique(p, pm, tol)
        return ValueDisc(complex(g(z_star)), 0.0)
    s = 1 - abs(z_star) ** 2
    if len(p):
        lam = np.asarray(p.nodes)
        u = 1 / (1 - lam * z_star.conjugate())
        v = np.asarray(p.targets) * u
        cf = scipy.linalg.cho_factor(pm.entries)
        pu, pv = scipy.linalg.cho_solve(cf, u), scipy.linalg.cho_solve(cf, v)
        alpha = float(np.real(np.vdot(u, pu)))
        beta = complex(np.vdot(v, pu))
        gamma = float(np.real(np.vdot(v, pv)))
    else:
        alpha, beta, gamma = 0.0, 0j, 0.0
    A = 1 / s + gamma
    center = beta.conjugate() / A
    r2 = (1 / s - alpha) / A + abs(beta) ** 2 / A ** 2
    return ValueDisc(center, float(np.sqrt(max(r2, 0.0))))


def two_solutions(p: PickProblem, z_star: complex, tol: PickTolerances | None = None, *, min_radius=1e-10):
    """Two interpolants of ``p`` taking the values ``center +/- radius`` at ``z_star``."""
    tol = tol or PickTolerances()
    verdict = classify(build_pick_matrix(p, tol), tol)
    if not verdict.solvable or verdict.unique:
        raise PreconditionError(f"two_solutions needs solvable non-unique data, got {verdict.label}")
    if any(abs(lam - z_star) <= NODE_TOL for lam in p.nodes):
        raise PreconditionError("z_star coincides with a node")
    vd = value_disc(p, z_star, tol)
    if vd.radius < min_radius:
        raise NearUniqueError(f"value disc radius {vd.radius:.3e} below {min_radius:.1e}")
    out = []
    for sign in (1, -1):
        w = vd.center + sign * vd.radius
        if abs(w) > 1:
            w /= abs(w)
        ext = p.extended(z_star, w)
        out.append(reconstruct_unique(ext, None, tol))
    return out[0], out[1], vd


def blaschke(zeros, c=1.0):
    """Finite Blaschke product ``c * prod (z - a)/(1 - conj(a) z)`` as a :class:`OneVarRational`."""
    num = P.poly_from_roots(zeros, leading=complex(c))
    den = MultiPoly.constant(1)
    for a in zeros:
        den = den * MultiPoly.from_coeffs([1.0, -complex(a).conjugate()])
    return OneVarRational(num, den, inner=True)
