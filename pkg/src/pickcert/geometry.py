"""Analytic discs in the polydisc, disc automorphisms and node lattices.

Three disc shapes are supported:

* flat discs ``z -> (z, c_2 z, ..., c_n z)`` with unimodular ``c_r``;
* Moebius graphs ``z -> (z, m(z))`` in the bidisc, ``m`` an automorphism;
* coordinate pairings ``(z_1..z_{n-1}) -> (z_1..z_{n-1}, c z_s)``, the
  (n-1)-dimensional slices used to reduce dimension by one.

:func:`generate_nodes` builds the ``N**n`` interpolation nodes placed ``N``
per flat disc over all ``N**(n-1)`` multiplier combinations.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ArgumentError, ConfigurationError, DegenerateConfigurationError

UNIMODULAR_TOL = 1e-12
POLE_TOL = 1e-14
INTERSECTION_RESIDUAL_TOL = 1e-10
MIN_ROOT_GAP = 1e-6


def _check_unimodular(c, what):
    if abs(abs(c) - 1.0) > UNIMODULAR_TOL:
        raise ArgumentError(f"{what} must be unimodular, got |{what}| = {abs(c)!r}")


@dataclass(frozen=True)
class MobiusMap:
    """Disc automorphism ``z -> t (z - a) / (1 - conj(a) z)``."""

    t: complex
    a: complex

    def __post_init__(self):
        object.__setattr__(self, "t", complex(self.t))
        object.__setattr__(self, "a", complex(self.a))
        _check_unimodular(self.t, "t")
        if not abs(self.a) < 1:
            raise ArgumentError(f"|a| must be < 1, got {abs(self.a)!r}")

    def __call__(self, z):
        return mobius_eval(self, z)

    def inverse(self) -> "MobiusMap":
        # w = t (z - a)/(1 - a* z)  <=>  z = (w + t a) / (t + a* w) = conj(t) (w + t a) / (1 + conj(t) a* w)
        return MobiusMap(self.t.conjugate(), -self.t * self.a)


def mobius_eval(m: MobiusMap, z):
    """Evaluate ``m`` at a scalar or array ``z`` in the closed disc."""
    z_arr = np.asarray(z, dtype=complex)
    den = 1 - m.a.conjugate() * z_arr
    if np.any(np.abs(den) < POLE_TOL):
        raise ArgumentError("evaluation at the pole of the Moebius map")
    out = m.t * (z_arr - m.a) / den
    return complex(out) if out.ndim == 0 else out


FLAT = "flat"
MOBIUS_GRAPH = "mobius_graph"
COORDINATE_PAIRING = "coordinate_pairing"


@dataclass(frozen=True)
class AnalyticDisc:
    """Embedding of the disc (or of ``D^(n-1)``) into ``D^n``.

    ``multipliers`` holds ``c_2..c_n`` of a flat disc. A coordinate pairing
    maps ``(z_1..z_{n-1})`` to ``(z_1..z_{n-1}, pair_multiplier * z_s)``
    with ``s = pair_source`` (0-based).
    """

    n: int
    kind: str
    multipliers: tuple = ()
    mobius: MobiusMap | None = None
    pair_source: int = 0
    pair_multiplier: complex = 1.0
    label: str = ""

    @classmethod
    def flat(cls, multipliers: Sequence[complex], label=""):
        mult = tuple(complex(c) for c in multipliers)
        for c in mult:
            _check_unimodular(c, "flat disc multiplier")
        return cls(len(mult) + 1, FLAT, multipliers=mult, label=label)

    @classmethod
    def mobius_graph(cls, m: MobiusMap, label=""):
        return cls(2, MOBIUS_GRAPH, mobius=m, label=label)

    @classmethod
    def coordinate_pairing(cls, n: int, rho: complex, label=""):
        """``C_rho``: the last coordinate becomes ``conj(rho) * z_{n-1}``."""
        if n < 2:
            raise ArgumentError("coordinate pairing needs n >= 2")
        rho = complex(rho)
        _check_unimodular(rho, "rho")
        return cls(n, COORDINATE_PAIRING, pair_source=n - 2, pair_multiplier=rho.conjugate(), label=label)

    @classmethod
    def slice_disc(cls, n: int, tau: complex, label=""):
        """``E``: the last coordinate becomes ``tau * z_1``."""
        if n < 2:
            raise ArgumentError("slice disc needs n >= 2")
        tau = complex(tau)
        _check_unimodular(tau, "tau")
        return cls(n, COORDINATE_PAIRING, pair_source=0, pair_multiplier=tau, label=label)

    @property
    def source_dim(self) -> int:
        return self.n - 1 if self.kind == COORDINATE_PAIRING else 1

    def monomial_map(self):
        """``(sources, multipliers)`` such that ``z_r = multipliers[r] * w_{sources[r]}``.

        Only defined for flat discs and coordinate pairings.
        """
        if self.kind == FLAT:
            return (0,) * self.n, (1.0 + 0j,) + self.multipliers
        if self.kind == COORDINATE_PAIRING:
            sources = tuple(range(self.n - 1)) + (self.pair_source,)
            mult = (1.0 + 0j,) * (self.n - 1) + (self.pair_multiplier,)
            return sources, mult
        raise ArgumentError("Moebius graphs are not monomial maps")

    def __call__(self, z):
        return disc_eval(self, z)


def disc_eval(disc: AnalyticDisc, z) -> tuple:
    """Image of a base point under ``disc``; the base point must lie in the open disc."""
    if disc.kind == COORDINATE_PAIRING:
        w = tuple(complex(x) for x in np.asarray(z, dtype=complex).reshape(-1))
        if len(w) != disc.n - 1:
            raise ArgumentError(f"coordinate pairing expects {disc.n - 1} base coordinates")
        if any(abs(x) >= 1 for x in w):
            raise ArgumentError("base point must lie in the open polydisc")
        return w + (disc.pair_multiplier * w[disc.pair_source],)
    z = complex(z)
    if abs(z) >= 1:
        raise ArgumentError(f"base point {z} is not in the open disc")
    if disc.kind == FLAT:
        return (z,) + tuple(c * z for c in disc.multipliers)
    return (z, mobius_eval(disc.mobius, z))


def disc_eval_many(disc: AnalyticDisc, z) -> np.ndarray:
    """Vectorised :func:`disc_eval` for one-dimensional discs; returns ``(m, n)``."""
    z = np.asarray(z, dtype=complex).reshape(-1)
    if disc.kind == FLAT:
        return np.column_stack([z] + [c * z for c in disc.multipliers])
    if disc.kind == MOBIUS_GRAPH:
        return np.column_stack([z, mobius_eval(disc.mobius, z)])
    raise ArgumentError("disc_eval_many supports one-dimensional discs only")


@dataclass(frozen=True)
class IntersectionResult:
    """Where a Moebius graph meets each flat disc ``z -> (z, tau_i z)``."""

    taus: tuple
    mobius: MobiusMap
    roots: tuple  # (r_i, s_i) per tau; s_i may be inf
    selected: tuple
    residuals: tuple

    @property
    def points(self) -> tuple:
        return tuple((r, tau * r) for r, tau in zip(self.selected, self.taus))

    def min_gap(self) -> float:
        sel = self.selected
        return min((abs(x - y) for x, y in itertools.combinations(sel, 2)), default=math.inf)


def _solve_quadratic(A, B, C):
    """Roots of ``A z^2 + B z + C`` without cancellation (A, C nonzero)."""
    sq = cmath.sqrt(B * B - 4 * A * C)
    if abs(B + sq) >= abs(B - sq):
        qq = -(B + sq) / 2
    else:
        qq = -(B - sq) / 2
    return qq / A, C / qq


def intersect_mobius_with_flat(taus: Sequence[complex], m: MobiusMap) -> IntersectionResult:
    """Solve ``tau_i z = m(z)`` for every ``tau_i``.

    Equivalent to ``-tau conj(a) z^2 + (tau - t) z + t a = 0``. The product of
    the roots has modulus one, so at most one root lies in the open disc.
    """
    taus = tuple(complex(x) for x in taus)
    for x in taus:
        _check_unimodular(x, "tau")
    t, a = m.t, m.a
    roots, selected, residuals = [], [], []
    for tau in taus:
        if a == 0:
            if abs(t - tau) <= UNIMODULAR_TOL:
                raise DegenerateConfigurationError(
                    f"t = tau = {tau} with a = 0: the Moebius graph coincides with the flat disc")
            r, s = 0j, complex(math.inf, 0)
        else:
            A, B, C = -tau * a.conjugate(), tau - t, t * a
            r, s = _solve_quadratic(A, B, C)
            if abs(s) < abs(r):
                r, s = s, r
            # one Newton step on the quadratic
            der = 2 * A * r + B
            if der != 0:
                cand = r - (A * r * r + B * r + C) / der
                if abs(A * cand * cand + B * cand + C) <= abs(A * r * r + B * r + C):
                    r = cand
            if not abs(r) < 1:
                raise ConfigurationError(f"no intersection root inside the disc for tau = {tau}")
            if abs(s) < 1:
                raise ConfigurationError(f"two intersection roots inside the disc for tau = {tau}; shrink |a|")
        roots.append((r, s))
        selected.append(r)
        residuals.append(abs(tau * r - mobius_eval(m, r)))
    return IntersectionResult(taus, m, tuple(roots), tuple(selected), tuple(residuals))


def _largest_gap_midpoint(taus):
    angles = sorted(cmath.phase(x) % (2 * math.pi) for x in taus)
    best_gap, best_mid = -1.0, 0.0
    for i, start in enumerate(angles):
        end = angles[(i + 1) % len(angles)] + (2 * math.pi if i == len(angles) - 1 else 0.0)
        gap = end - start
        if gap > best_gap + 1e-15:
            best_gap, best_mid = gap, start + gap / 2
    return cmath.exp(1j * best_mid), best_gap / 2


def choose_mobius(taus: Sequence[complex], seed: int | None = None, *, max_halvings: int = 60):
    """Pick ``(m, eps)`` so that the graph of ``m`` meets every flat disc once.

    ``t`` is the midpoint of the largest arc between consecutive ``taus``.
    ``|a|`` starts at one eighth of that arc length and is halved until
    every selected root has modulus below 1/2, the roots are pairwise
    separated by more than ``MIN_ROOT_GAP`` and residuals are below
    ``INTERSECTION_RESIDUAL_TOL``. ``eps = 2 |a|``.

    ``seed=None`` keeps ``a`` real and positive; an integer seed draws the
    argument of ``a`` from ``numpy.random.default_rng(seed)``.
    """
    taus = tuple(complex(x) for x in taus)
    if not taus:
        raise ArgumentError("at least one multiplier required")
    for x, y in itertools.combinations(taus, 2):
        if abs(x - y) <= UNIMODULAR_TOL:
            raise ArgumentError("multipliers must be pairwise distinct")
    t, half_gap = _largest_gap_midpoint(taus)
    phase = 0.0 if seed is None else float(np.random.default_rng(seed).uniform(0, 2 * math.pi))
    radius = (2 * half_gap) / 8
    last_err = None
    for _ in range(max_halvings):
        m = MobiusMap(t, radius * cmath.exp(1j * phase))
        try:
            res = intersect_mobius_with_flat(taus, m)
        except ConfigurationError as exc:
            last_err = exc
        else:
            if (max(abs(r) for r in res.selected) < 0.5
                    and res.min_gap() > MIN_ROOT_GAP
                    and max(res.residuals) <= INTERSECTION_RESIDUAL_TOL):
                return m, 2 * radius
        radius /= 2
    raise ConfigurationError(f"no admissible Moebius map found for {len(taus)} multipliers: {last_err}")


def default_multipliers(N: int, n: int) -> tuple:
    """Rows ``r = 2..n`` of ``exp(2 pi i ((i-1)/N + (r-1)/(2 N n)))``."""
    return tuple(
        tuple(cmath.exp(2j * math.pi * ((i - 1) / N + (r - 1) / (2 * N * n))) for i in range(1, N + 1))
        for r in range(2, n + 1)
    )


def default_base_points(N: int) -> tuple:
    return tuple(complex(j / (N + 1)) for j in range(1, N + 1))


@dataclass(frozen=True)
class NodeConfig:
    """Node placement policy.

    ``policy='default'`` uses :func:`default_multipliers` and
    :func:`default_base_points`; ``policy='random'`` draws both from
    ``seed``. Explicit ``tau_table`` / ``base_points`` override either.
    """

    policy: str = "default"
    seed: int = 0
    tau_table: tuple | None = None
    base_points: tuple | None = None


@dataclass(frozen=True)
class NodeGrid:
    N: int
    n: int
    tau_table: tuple
    disc_indices: tuple
    discs: tuple
    base_points: tuple  # one tuple of N base points per disc
    nodes: tuple  # N**n points, disc-major
    config: NodeConfig = field(default_factory=NodeConfig)

    @property
    def M(self) -> int:
        return len(self.discs)

    def disc_nodes(self, k: int) -> tuple:
        return self.nodes[k * self.N:(k + 1) * self.N]

    def disc_multipliers(self, k: int) -> tuple:
        return self.discs[k].multipliers


def _distinct(points, what, tol=1e-12):
    pts = list(points)
    for x, y in itertools.combinations(pts, 2):
        if np.max(np.abs(np.asarray(x) - np.asarray(y))) <= tol:
            raise ArgumentError(f"{what} are not pairwise distinct")


def _random_config(N, n, seed):
    rng = np.random.default_rng(seed)
    table = []
    for _ in range(2, n + 1):
        angles = np.sort(rng.uniform(0, 2 * math.pi, size=N))
        table.append(tuple(complex(cmath.exp(1j * a)) for a in angles))
    while True:
        rad = 0.9 * np.sqrt(rng.uniform(0.05, 1, size=N))
        pts = rad * np.exp(1j * rng.uniform(0, 2 * math.pi, size=N))
        if N < 2 or min(abs(x - y) for x, y in itertools.combinations(pts, 2)) > 0.05:
            return tuple(table), tuple(complex(p) for p in pts)


def generate_nodes(N: int, n: int, config: NodeConfig | None = None) -> NodeGrid:
    """Build the ``N**(n-1)`` flat discs and their ``N**n`` lifted nodes."""
    config = config or NodeConfig()
    if N < 1 or n < 1:
        raise ArgumentError("N and n must be positive")
    if config.policy == "default":
        table, base = default_multipliers(N, n), default_base_points(N)
    elif config.policy == "random":
        table, base = _random_config(N, n, config.seed)
    else:
        raise ArgumentError(f"unknown node policy {config.policy!r}")
    if config.tau_table is not None:
        table = tuple(tuple(complex(c) for c in row) for row in config.tau_table)
    if len(table) != n - 1 or any(len(row) != N for row in table):
        raise ArgumentError(f"tau_table must have {n - 1} rows of {N} multipliers")
    for row in table:
        for c in row:
            _check_unimodular(c, "multiplier")
        _distinct(row, "multipliers within a coordinate")

    indices = tuple(itertools.product(range(N), repeat=n - 1))
    if config.base_points is not None:
        bp = config.base_points
        if len(bp) and np.ndim(bp[0]) == 0:
            per_disc = tuple(tuple(complex(x) for x in bp) for _ in indices)
        else:
            per_disc = tuple(tuple(complex(x) for x in row) for row in bp)
    else:
        per_disc = tuple(base for _ in indices)
    if len(per_disc) != len(indices) or any(len(row) != N for row in per_disc):
        raise ArgumentError(f"need {N} base points for each of {len(indices)} discs")
    for row in per_disc:
        if any(abs(x) >= 1 for x in row):
            raise ArgumentError("base points must lie in the open disc")
        _distinct(row, "base points on a disc")

    discs, nodes = [], []
    for k, idx in enumerate(indices):
        disc = AnalyticDisc.flat([table[r][i] for r, i in enumerate(idx)], label=f"D{k}")
        discs.append(disc)
        nodes.extend(disc_eval(disc, z) for z in per_disc[k])
    _distinct(nodes, "lifted nodes")
    return NodeGrid(N, n, table, indices, tuple(discs), per_disc, tuple(nodes), config)


def refined_node_counts(f, grid: NodeGrid) -> list:
    """Per-disc node counts ``disc_degree(f, D_k) + 1``."""
    from .rif import disc_degree

    if f.n != grid.n:
        raise ArgumentError(f"function lives on D^{f.n}, grid on D^{grid.n}")
    return [disc_degree(f, disc) + 1 for disc in grid.discs]
