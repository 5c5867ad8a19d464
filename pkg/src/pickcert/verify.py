"""Executable uniqueness certificates for rational inner functions.

For ``f`` of degree below ``N`` and a node grid from
:func:`pickcert.geometry.generate_nodes` the certificate checks, disc by
disc, that the one-variable Pick data sampled from ``f`` are positive
semidefinite and singular and that the unique interpolant reproduces
``f`` on the disc. Uniqueness across discs is checked through a Moebius
graph meeting every flat disc (n = 2), and for n = 3 by repeating the
two-variable chain on the slices ``C_rho`` for a finite sample of ``rho``.

The certificate is evidence about ``f`` and the chosen nodes; it does not
search the Schur class for competing interpolants.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import rif as R
from .errors import ArgumentError, ConfigurationError, InapplicableError, PickCertError, PreconditionError
from .geometry import (
    MIN_ROOT_GAP,
    AnalyticDisc,
    MobiusMap,
    NodeGrid,
    choose_mobius,
    disc_eval_many,
    intersect_mobius_with_flat,
    mobius_eval,
    refined_node_counts,
)
from .pick import (
    PickProblem,
    PickTolerances,
    build_pick_matrix,
    classify,
    interpolation_residual,
    reconstruct_unique,
    two_solutions,
)

SCHEMA = "pickcert.certificate"
SCHEMA_VERSION = 1
SEMANTICS = (
    "Checks, for the given rational inner function, every step of the disc-restriction "
    "uniqueness argument at the given nodes: per-disc Pick matrices are PSD and singular, "
    "their unique interpolants reproduce f on each disc, and Moebius-graph cross-checks "
    "tie the discs together. It does not enumerate Schur-class competitors g."
)
RHO_CAVEAT = "the union over all rho in T is replaced by a finite sample of rho values"
SWEEP_CAVEAT = "set-of-uniqueness sweeps are finite samples, not proofs"


@dataclass(frozen=True)
class CertifyTolerances:
    pick: PickTolerances = field(default_factory=PickTolerances)
    residual: float = 1e-7
    cross_check: float = 1e-7
    fresh_points: int = 50
    fresh_radius: float = 0.9
    seed: int = 0
    rho_samples: int = 5

    def to_dict(self):
        return {
            "tol_psd": self.pick.tol_psd,
            "tol_rank": self.pick.tol_rank,
            "residual": self.residual,
            "cross_check": self.cross_check,
            "fresh_points": self.fresh_points,
            "fresh_radius": self.fresh_radius,
            "seed": self.seed,
            "rho_samples": self.rho_samples,
        }


TOLERANCE_PROFILES = {
    "default": CertifyTolerances(),
    "strict": CertifyTolerances(PickTolerances(1e-11, 1e-9), residual=1e-9, cross_check=1e-9),
    "loose": CertifyTolerances(PickTolerances(1e-7, 1e-5), residual=1e-5, cross_check=1e-5),
}


def _c(z):
    z = complex(z)
    return {"re": z.real, "im": z.imag}


@dataclass
class DiscEvidence:
    disc_id: str
    stage: str
    restricted_degree: int | None = None
    node_count: int = 0
    nodes: tuple = ()
    targets: tuple = ()
    eigenvalues: tuple = ()
    solvable: bool | None = None
    unique: bool | None = None
    smallest_relative_eigenvalue: float | None = None
    reconstruction_residual: float | None = None
    interpolation_residual: float | None = None
    passed: bool = False
    failure: str | None = None
    interpolant: object = field(default=None, repr=False, compare=False)

    def to_dict(self):
        return {
            "disc": self.disc_id,
            "stage": self.stage,
            "restricted_degree": self.restricted_degree,
            "node_count": self.node_count,
            "nodes": [_c(z) for z in self.nodes],
            "targets": [_c(w) for w in self.targets],
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "solvable": self.solvable,
            "unique": self.unique,
            "smallest_relative_eigenvalue": self.smallest_relative_eigenvalue,
            "reconstruction_residual": self.reconstruction_residual,
            "interpolation_residual": self.interpolation_residual,
            "passed": self.passed,
            "failure": self.failure,
        }


@dataclass
class CrossCheck:
    label: str
    kind: str  # "mobius" or "rho"
    passed: bool = False
    failure: str | None = None
    t: complex | None = None
    a: complex | None = None
    eps: float | None = None
    rho: complex | None = None
    intersections: tuple = ()
    consistency_residual: float | None = None
    evidence: DiscEvidence | None = None
    children: list = field(default_factory=list)

    def to_dict(self):
        out = {"label": self.label, "kind": self.kind, "passed": self.passed, "failure": self.failure}
        if self.kind == "mobius":
            out.update({
                "t": _c(self.t) if self.t is not None else None,
                "a": _c(self.a) if self.a is not None else None,
                "eps": self.eps,
                "intersections": [_c(r) for r in self.intersections],
                "consistency_residual": self.consistency_residual,
                "evidence": self.evidence.to_dict() if self.evidence else None,
            })
        else:
            out.update({
                "rho": _c(self.rho),
                "per_disc": [c.to_dict() for c in self.children if isinstance(c, DiscEvidence)],
                "cross_checks": [c.to_dict() for c in self.children if isinstance(c, CrossCheck)],
            })
        return out


@dataclass
class UniquenessCertificate:
    N: int
    n: int
    degree: int
    per_disc: list
    cross_checks: list
    tolerances: CertifyTolerances
    refined: bool = False
    node_counts: tuple = ()
    caveats: tuple = ()
    overall: bool = False
    failing_stage: str | None = None

    @property
    def node_savings(self) -> int:
        return sum(self.N - k for k in self.node_counts)

    def to_dict(self):
        return {
            "schema": SCHEMA,
            "version": SCHEMA_VERSION,
            "semantics": SEMANTICS,
            "caveats": list(self.caveats),
            "N": self.N,
            "n": self.n,
            "degree": self.degree,
            "refined": self.refined,
            "node_counts": list(self.node_counts),
            "node_savings": self.node_savings,
            "tolerances": self.tolerances.to_dict(),
            "per_disc": [e.to_dict() for e in self.per_disc],
            "cross_checks": [c.to_dict() for c in self.cross_checks],
            "overall": self.overall,
            "failing_stage": self.failing_stage,
        }

    def csv_rows(self):
        """``(disc, eigenvalues, residual)`` rows for every Pick problem solved."""
        rows = []

        def walk_disc(e, prefix):
            rows.append((prefix + e.disc_id, e.eigenvalues, e.reconstruction_residual))

        def walk_check(c, prefix):
            if c.evidence is not None:
                walk_disc(c.evidence, prefix)
            for child in c.children:
                if isinstance(child, DiscEvidence):
                    walk_disc(child, prefix + c.label + "/")
                else:
                    walk_check(child, prefix + c.label + "/")

        for e in self.per_disc:
            walk_disc(e, "")
        for c in self.cross_checks:
            walk_check(c, "")
        return rows


def fresh_points(tol: CertifyTolerances, salt: int = 0) -> np.ndarray:
    rng = np.random.default_rng([tol.seed, salt])
    rad = tol.fresh_radius * np.sqrt(rng.uniform(0, 1, tol.fresh_points))
    return rad * np.exp(2j * np.pi * rng.uniform(0, 1, tol.fresh_points))


def _solve_disc(ev: DiscEvidence, base, targets, truth: Callable, tol: CertifyTolerances, fresh):
    """Fill ``ev`` with the Pick verdict and reconstruction residual; returns ``ev``."""
    ev.nodes = tuple(complex(z) for z in base)
    ev.targets = tuple(complex(w) for w in targets)
    ev.node_count = len(ev.nodes)
    if ev.restricted_degree is not None and ev.restricted_degree >= ev.node_count:
        ev.failure = f"restricted degree {ev.restricted_degree} >= node count {ev.node_count}"
        return ev
    try:
        prob = PickProblem(ev.nodes, ev.targets)
        pm = build_pick_matrix(prob, tol.pick)
        verdict = classify(pm, tol.pick)
        ev.eigenvalues = tuple(float(x) for x in pm.eigenvalues)
        ev.solvable, ev.unique = verdict.solvable, verdict.unique
        ev.smallest_relative_eigenvalue = verdict.smallest_relative_eigenvalue
        if not verdict.unique:
            ev.failure = f"pick verdict {verdict.label}"
            return ev
        g = reconstruct_unique(prob, pm, tol.pick)
        ev.interpolant = g
        ev.interpolation_residual = interpolation_residual(g, prob)
        ev.reconstruction_residual = float(np.max(np.abs(g(fresh) - truth(fresh))))
    except PickCertError as exc:
        ev.failure = f"{type(exc).__name__}: {exc}"
        return ev
    if ev.reconstruction_residual > tol.residual:
        ev.failure = f"reconstruction residual {ev.reconstruction_residual:.3e} > {tol.residual:.1e}"
        return ev
    ev.passed = True
    return ev


def _flat_evidence(f, disc: AnalyticDisc, base, targets, tol, fresh, disc_id, stage) -> DiscEvidence:
    ev = DiscEvidence(disc_id, stage)
    try:
        ev.restricted_degree = R.restrict(f, disc).degree
    except PickCertError as exc:
        ev.failure = f"restriction: {type(exc).__name__}: {exc}"
        return ev
    return _solve_disc(ev, base, targets, lambda z: R.eval_rif_many(f, disc_eval_many(disc, z)), tol, fresh)


def mobius_cross_check(f2, taus, flat_interpolants, tol: CertifyTolerances, fresh, label="mobius") -> CrossCheck:
    """Tie flat-disc reconstructions together through a Moebius graph in the bidisc.

    Targets on the graph are the flat-disc interpolants evaluated at the
    intersection points; the graph's Pick problem must again be singular,
    and its interpolant must reproduce ``f2`` along the graph.
    """
    cc = CrossCheck(label, "mobius")
    if any(g is None for g in flat_interpolants):
        cc.failure = "upstream flat-disc reconstruction failed"
        return cc
    try:
        m, eps = choose_mobius(taus)
        cc.t, cc.a, cc.eps = m.t, m.a, eps
        inter = intersect_mobius_with_flat(taus, m)
        cc.intersections = inter.selected
        chain = np.array([complex(g(r)) for g, r in zip(flat_interpolants, inter.selected)])
        direct = R.eval_rif_many(f2, np.array(inter.points))
        graph = AnalyticDisc.mobius_graph(m, label=label)
        ev = DiscEvidence(label, "mobius", restricted_degree=R.restrict(f2, graph).degree)
        _solve_disc(ev, inter.selected, chain, lambda z: R.eval_rif_many(f2, disc_eval_many(graph, z)), tol, fresh)
        cc.evidence = ev
        if ev.interpolant is not None:
            cc.consistency_residual = float(np.max(np.abs(ev.interpolant(np.array(inter.selected)) - chain)))
        else:
            cc.consistency_residual = float(np.max(np.abs(chain - direct)))
    except PickCertError as exc:
        cc.failure = f"{type(exc).__name__}: {exc}"
        return cc
    if not ev.passed:
        cc.failure = ev.failure
    elif float(np.max(np.abs(chain - direct))) > tol.cross_check:
        cc.failure = "flat-disc interpolants disagree with f at the intersection points"
    elif cc.consistency_residual > tol.cross_check:
        cc.failure = f"consistency residual {cc.consistency_residual:.3e}"
    else:
        cc.passed = True
    return cc


def _rho_values(k):
    return [cmath.exp(2j * math.pi * j / 8) for j in range(k)]


def _check_preconditions(f, grid):
    if f.n != grid.n:
        raise ArgumentError(f"function lives on D^{f.n}, grid on D^{grid.n}")
    if R.degree(f) >= grid.N:
        raise PreconditionError(f"degree {R.degree(f)} is not below N = {grid.N}")
    if grid.n > 3:
        raise PreconditionError("certification chain is implemented for n <= 3")


def _run(f, grid: NodeGrid, tol: CertifyTolerances, counts, mutation, refined):
    _check_preconditions(f, grid)
    fresh = fresh_points(tol)
    N, n = grid.N, grid.n
    all_targets = R.eval_rif_many(f, np.array(grid.nodes))
    per_disc = []
    for k, disc in enumerate(grid.discs):
        targets = np.array(all_targets[k * N:(k + 1) * N])
        if mutation is not None and mutation[0] == k:
            targets[mutation[1]] += mutation[2]
        c = counts[k]
        idx = "".join(str(i) for i in grid.disc_indices[k])
        per_disc.append(_flat_evidence(
            f, disc, grid.base_points[k][:c], targets[:c], tol, fresh, f"D{k}[{idx}]", "flat"))

    checks = []
    caveats = [SWEEP_CAVEAT]
    if n == 2:
        checks.append(mobius_cross_check(
            f, grid.tau_table[0], [e.interpolant for e in per_disc], tol, fresh, "mobius"))
    elif n == 3:
        caveats.append(RHO_CAVEAT)
        # discs are ordered (i2, i3) with i3 fastest
        for k3, tau3 in enumerate(grid.tau_table[1]):
            fk = R.pullback(f, AnalyticDisc.slice_disc(3, tau3))
            interps = [per_disc[i2 * N + k3].interpolant for i2 in range(N)]
            checks.append(mobius_cross_check(fk, grid.tau_table[0], interps, tol, fresh, f"E{k3}/mobius"))
        base = grid.base_points[0]
        for j, rho in enumerate(_rho_values(tol.rho_samples)):
            checks.append(_rho_check(f, grid, rho, base, tol, fresh, f"rho{j}"))
    overall = all(e.passed for e in per_disc) and all(c.passed for c in checks)
    failing = None
    if not overall:
        failing = next((f"{e.disc_id}: {e.failure}" for e in per_disc if not e.passed), None) \
            or next(f"{c.label}: {c.failure}" for c in checks if not c.passed)
    return UniquenessCertificate(
        N, n, R.degree(f), per_disc, checks, tol, refined, tuple(counts), tuple(caveats), overall, failing)


def _rho_check(f, grid, rho, base, tol, fresh, label) -> CrossCheck:
    """Two-variable chain on the slice ``C_rho`` of the tridisc."""
    cc = CrossCheck(label, "rho", rho=rho)
    try:
        f_rho = R.pullback(f, AnalyticDisc.coordinate_pairing(3, rho))
    except PickCertError as exc:
        cc.failure = f"{type(exc).__name__}: {exc}"
        return cc
    taus = [rho * tau for tau in grid.tau_table[1]]
    interps = []
    for k, tau in enumerate(taus):
        disc = AnalyticDisc.flat([tau], label=f"{label}/H{k}")
        # H_k lies on the slice E_k of the full grid: (z, rho tau_k z, tau_k z)
        pts = np.array([(z, tau * z, grid.tau_table[1][k] * z) for z in base])
        targets = R.eval_rif_many(f, pts)
        ev = _flat_evidence(f_rho, disc, base, targets, tol, fresh, f"H{k}", "rho-flat")
        cc.children.append(ev)
        interps.append(ev.interpolant)
    cc.children.append(mobius_cross_check(f_rho, taus, interps, tol, fresh, "mobius"))
    bad = [c for c in cc.children if not c.passed]
    if bad:
        first = bad[0]
        cc.failure = f"{getattr(first, 'disc_id', None) or first.label}: {first.failure}"
    else:
        cc.passed = True
    return cc


def certify_uniqueness(f, grid: NodeGrid, tol: CertifyTolerances | None = None, *, mutation=None) -> UniquenessCertificate:
    """Run the full certificate chain with ``N`` nodes on every disc.

    ``mutation=(disc, node, delta)`` perturbs one sampled target before the
    Pick problem is built; used to test that the certificate is sensitive
    to corrupted data.
    """
    tol = tol or CertifyTolerances()
    return _run(f, grid, tol, [grid.N] * grid.M, mutation, refined=False)


def refined_certify(f, grid: NodeGrid, tol: CertifyTolerances | None = None, *, mutation=None) -> UniquenessCertificate:
    """Certificate using only ``disc_degree + 1`` leading nodes on each disc."""
    tol = tol or CertifyTolerances()
    _check_preconditions(f, grid)
    counts = refined_node_counts(f, grid)
    return _run(f, grid, tol, counts, mutation, refined=True)


@dataclass(frozen=True)
class SharpnessReport:
    disc_index: int
    dropped_node: complex
    z_star: complex
    remaining_nodes: tuple
    smallest_relative_eigenvalue: float
    radius: float
    center: complex
    value_f: complex
    values: tuple
    disagreement: float
    agreement_residual: float
    interpolants: tuple = field(repr=False, compare=False, default=())

    def to_dict(self):
        return {
            "disc_index": self.disc_index,
            "dropped_node": _c(self.dropped_node),
            "z_star": _c(self.z_star),
            "remaining_nodes": [_c(z) for z in self.remaining_nodes],
            "smallest_relative_eigenvalue": self.smallest_relative_eigenvalue,
            "value_disc": {"center": _c(self.center), "radius": self.radius},
            "f_at_z_star": _c(self.value_f),
            "interpolant_values": [_c(v) for v in self.values],
            "disagreement": self.disagreement,
            "agreement_residual": self.agreement_residual,
            "interpolants": [
                {"num": [_c(c) for c in g.num.to_coeffs()], "den": [_c(c) for c in g.den.to_coeffs()]}
                for g in self.interpolants
            ],
        }


def sharpness_demo(f, grid: NodeGrid, disc_index: int, z_star: complex = -0.5, *, drop: int = -1, tol: CertifyTolerances | None = None) -> SharpnessReport:
    """Drop one node from a disc of restricted degree ``N - 1`` and exhibit two interpolants."""
    tol = tol or CertifyTolerances()
    disc = grid.discs[disc_index]
    deg = R.disc_degree(f, disc)
    if deg != grid.N - 1:
        raise InapplicableError(
            f"restriction to disc {disc_index} has degree {deg}; removing a node from N = {grid.N} "
            f"only breaks uniqueness when the degree is N - 1")
    base = list(grid.base_points[disc_index])
    targets = list(R.eval_rif_many(f, np.array(grid.disc_nodes(disc_index))))
    dropped = base.pop(drop)
    targets.pop(drop)
    prob = PickProblem(base, targets)
    verdict = classify(build_pick_matrix(prob, tol.pick), tol.pick)
    if not verdict.solvable or verdict.unique:
        raise PreconditionError(f"reduced problem is {verdict.label}, expected positive definite")
    g1, g2, vd = two_solutions(prob, z_star, tol.pick)
    values = (complex(g1(z_star)), complex(g2(z_star)))
    agree = max(interpolation_residual(g1, prob), interpolation_residual(g2, prob))
    value_f = complex(R.eval_rif(f, disc(z_star)))
    return SharpnessReport(
        disc_index, complex(dropped), complex(z_star), tuple(complex(z) for z in base),
        verdict.smallest_relative_eigenvalue, vd.radius, vd.center, value_f, values,
        abs(values[0] - values[1]), agree, (g1, g2))


@dataclass(frozen=True)
class SweepReport:
    max_deviation: float
    worst_point: tuple
    points: int
    t0: complex
    eps: float

    def to_dict(self):
        return {
            "max_deviation": self.max_deviation,
            "worst_point": [_c(z) for z in self.worst_point],
            "points": self.points,
            "t0": _c(self.t0),
            "eps": self.eps,
            "caveat": SWEEP_CAVEAT,
        }


def _graph_ok(taus, m, max_root=0.5):
    try:
        inter = intersect_mobius_with_flat(taus, m)
    except PickCertError:
        return False
    return max(abs(r) for r in inter.selected) < max_root and inter.min_gap() > MIN_ROOT_GAP


def sweep_points(taus, *, n_t=3, n_a=4, n_z=8, seed=0):
    """Points of ``C_{m_{t,a}}(D)`` for ``t`` near ``t0`` and ``|a| <= eps/2``.

    Each sampled graph is re-checked against the flat discs the same way
    :func:`choose_mobius` checks its own; graphs that fail are skipped.
    """
    m0, eps = choose_mobius(taus)
    rng = np.random.default_rng(seed)
    phi = 0.9 * 2 * math.asin(min(eps / 4, 1.0))
    thetas = np.linspace(-phi, phi, n_t) if n_t > 1 else np.zeros(1)
    a_vals = 0.5 * eps * np.sqrt(rng.uniform(0, 1, n_a)) * np.exp(2j * np.pi * rng.uniform(0, 1, n_a))
    z_vals = 0.9 * np.sqrt(rng.uniform(0, 1, n_z)) * np.exp(2j * np.pi * rng.uniform(0, 1, n_z))
    pts = []
    for th in thetas:
        t = m0.t * cmath.exp(1j * th)
        for a in a_vals:
            m = MobiusMap(t, complex(a))
            if _graph_ok(taus, m):
                pts.extend((complex(z), complex(mobius_eval(m, z))) for z in z_vals)
    return pts, m0, eps


def equality_sweep(f: Callable, g: Callable, taus, *, n_t=3, n_a=4, n_z=8, seed=0) -> SweepReport:
    """Max ``|f - g|`` over sampled points of the Moebius-graph family in the bidisc."""
    pts, m0, eps = sweep_points(taus, n_t=n_t, n_a=n_a, n_z=n_z, seed=seed)
    dev = [abs(complex(f(x, y)) - complex(g(x, y))) for x, y in pts]
    k = int(np.argmax(dev))
    return SweepReport(float(dev[k]), pts[k], len(pts), m0.t, eps)


class ChainInterpolant:
    """The function on the bidisc produced by the reconstruction chain.

    Built from the flat-disc interpolants of a passing certificate. At a
    point ``(x, y)`` it finds a graph ``m_{t,a}`` with ``m(x) = y``,
    interpolates the flat-disc values at the graph's intersection points
    and evaluates the resulting Blaschke product at ``x``.
    """

    def __init__(self, certificate: UniquenessCertificate, taus, tol: CertifyTolerances | None = None, *, min_gap=0.02):
        if certificate.n != 2:
            raise ArgumentError("chain interpolant is defined on the bidisc")
        self.taus = tuple(complex(t) for t in taus)
        self.flat = [e.interpolant for e in certificate.per_disc]
        if any(g is None for g in self.flat):
            raise PreconditionError("certificate has failed discs")
        self.tol = tol or certificate.tolerances
        self.t0 = choose_mobius(self.taus)[0].t
        self.min_gap = min_gap

    def _solve_a(self, t, x, y):
        # t a - (y x) conj(a) = t x - y, real-linear in a
        u = y * x
        rhs = t * x - y
        c1, c2 = t - u, 1j * (t + u)
        mat = np.array([[c1.real, c2.real], [c1.imag, c2.imag]])
        p, q = np.linalg.solve(mat, [rhs.real, rhs.imag])
        return complex(p, q)

    def graphs_through(self, x, y):
        """Moebius graphs through ``(x, y)`` with their flat-disc intersections.

        ``t`` is rotated off ``t0`` when needed. Graphs whose intersection
        points are well separated and away from the circle are yielded in
        order of increasing ``|a|``.
        """
        cands = []
        for th in np.linspace(-np.pi, np.pi, 361):
            t = self.t0 * cmath.exp(1j * th)
            try:
                a = self._solve_a(t, x, y)
            except np.linalg.LinAlgError:
                continue
            if abs(a) < 1:
                cands.append((abs(a), t, a))
        for _, t, a in sorted(cands, key=lambda c: c[0]):
            try:
                inter = intersect_mobius_with_flat(self.taus, MobiusMap(t, a))
            except PickCertError:
                continue
            if max(abs(r) for r in inter.selected) <= 0.9 and inter.min_gap() >= self.min_gap:
                yield inter

    def __call__(self, x, y):
        x, y = complex(x), complex(y)
        for inter in self.graphs_through(x, y):
            vals = [complex(g(r)) for g, r in zip(self.flat, inter.selected)]
            try:
                g = reconstruct_unique(PickProblem(inter.selected, vals), None, self.tol.pick)
            except PickCertError:
                continue
            return complex(g(x))
        raise ConfigurationError(f"no usable Moebius graph through {(x, y)}")
