"""Acceptance criteria, each at its stated tolerance and runtime budget."""

import cmath
import math
import time

import numpy as np

from pickcert import rif as R
from pickcert.geometry import AnalyticDisc, NodeConfig, choose_mobius, generate_nodes, intersect_mobius_with_flat, MobiusMap
from pickcert.pick import PickProblem, blaschke, build_pick_matrix, classify, reconstruct_unique
from pickcert.polynomial import MultiPoly
from pickcert.verify import certify_uniqueness, refined_certify, sharpness_demo


def _random_degree(rng, hi):
    return int(rng.integers(1, hi + 1))


def _flat_ok(cert):
    worst_psd = min(e.eigenvalues[0] / max(1.0, abs(e.eigenvalues[-1])) for e in cert.per_disc)
    worst_rel = max(e.smallest_relative_eigenvalue for e in cert.per_disc)
    worst_res = max(e.reconstruction_residual for e in cert.per_disc)
    return worst_psd >= -1e-8 and worst_rel <= 1e-6 and worst_res <= 1e-7, worst_psd, worst_rel, worst_res


def _mobius_residuals(checks):
    out = []
    for c in checks:
        if c.kind == "mobius":
            out.append(c.consistency_residual if c.consistency_residual is not None else math.inf)
            if c.evidence is not None and c.evidence.reconstruction_residual is not None:
                out.append(c.evidence.reconstruction_residual)
        out.extend(_mobius_residuals([x for x in c.children if hasattr(x, "kind")]))
    return out


def test_c1_rudin_form_validity(report):
    start = time.perf_counter()
    worst_torus, worst_int = 0.0, 0.0
    for seed in range(25):
        rng = np.random.default_rng(seed)
        f = R.random_rif(rng, 2, _random_degree(rng, 4), singular_prob=0.3)
        rep = R.validate_inner(f, R.InnerSample(angles=64, interior=100, seed=seed))
        worst_torus = max(worst_torus, rep.max_torus_defect)
        worst_int = max(worst_int, rep.max_interior_modulus)
    elapsed = time.perf_counter() - start
    ok = worst_torus <= 1e-9 and worst_int <= 1 + 1e-12 and elapsed < 5
    report("C1 Rudin-form validity", ok,
           f"torus defect {worst_torus:.2e} <= 1e-9, interior max {worst_int:.15f} <= 1+1e-12, {elapsed:.2f}s < 5s")
    assert ok


def test_c2_certificate_bidisc(report):
    start = time.perf_counter()
    grid = generate_nodes(3, 2)
    certs = []
    for seed in range(20):
        rng = np.random.default_rng(1000 + seed)
        certs.append(certify_uniqueness(R.random_rif(rng, 2, _random_degree(rng, 2)), grid))
    elapsed = time.perf_counter() - start
    flat = [_flat_ok(c) for c in certs]
    mob = max(max(_mobius_residuals(c.cross_checks)) for c in certs)
    ok = all(c.overall for c in certs) and all(x[0] for x in flat) and mob <= 1e-7 and elapsed < 10
    report("C2 certificate n=2", ok,
           f"{sum(c.overall for c in certs)}/20 pass, min eig/|P| {min(x[1] for x in flat):.1e}, "
           f"rel eig {max(x[2] for x in flat):.1e}, recon {max(x[3] for x in flat):.1e}, "
           f"moebius {mob:.1e}, {elapsed:.2f}s < 10s")
    assert ok


def test_c3_certificate_tridisc(report):
    start = time.perf_counter()
    grid = generate_nodes(2, 3)
    certs = []
    for seed in range(10):
        rng = np.random.default_rng(2000 + seed)
        certs.append(certify_uniqueness(R.random_rif(rng, 3, 1), grid))
    elapsed = time.perf_counter() - start
    flat = [_flat_ok(c) for c in certs]
    mob = max(max(_mobius_residuals(c.cross_checks)) for c in certs)
    rho = all(sum(c.kind == "rho" and c.passed for c in cert.cross_checks) == 5 for cert in certs)
    ok = all(c.overall for c in certs) and all(x[0] for x in flat) and rho and mob <= 1e-7 and elapsed < 20
    report("C3 certificate n=3", ok,
           f"{sum(c.overall for c in certs)}/10 pass incl. 5 rho samples, recon {max(x[3] for x in flat):.1e}, "
           f"moebius {mob:.1e}, {elapsed:.2f}s < 20s")
    assert ok


def test_c4_mobius_intersections(report):
    worst_gap, worst_abs, worst_res = math.inf, 0.0, 0.0
    for seed in range(5):
        rng = np.random.default_rng(3000 + seed)
        taus = np.exp(2j * np.pi * rng.uniform(0, 1, 5))
        m, _ = choose_mobius(taus, seed=seed)
        inter = intersect_mobius_with_flat(taus, m)
        worst_gap = min(worst_gap, inter.min_gap())
        worst_abs = max(worst_abs, max(abs(r) for r in inter.selected))
        worst_res = max(worst_res, max(inter.residuals))
    taus = [cmath.exp(2j * math.pi * k / 5) for k in range(5)]
    zero = intersect_mobius_with_flat(taus, MobiusMap(cmath.exp(1j * math.pi / 5), 0))
    exact = all(r == 0 for r in zero.selected)
    ok = worst_gap > 1e-6 and worst_abs < 1 and worst_res <= 1e-10 and exact
    report("C4 Moebius intersections", ok,
           f"min gap {worst_gap:.2e} > 1e-6, max |r| {worst_abs:.3f} < 1, residual {worst_res:.1e} <= 1e-10, "
           f"a=0 roots exactly 0: {exact}")
    assert ok


def test_c5_refinement(report):
    z1, z2 = MultiPoly.variable(2, 0), MultiPoly.variable(2, 1)
    f = R.rif_from_fraction(2 * z1 * z2 - z1 - z2, 2 - z1 - z2)
    g = R.restrict(f, AnalyticDisc.flat([1]))
    minus_z = MultiPoly.from_coeffs([0, -1])
    err = max(abs(g.num.coeff((k,)) / g.den.coeff((0,)) - minus_z.coeff((k,))) for k in range(3))
    err = max(err, max(abs(g.den.coeff((k,)) / g.den.coeff((0,)) - (k == 0)) for k in range(3)))
    roots3 = tuple(cmath.exp(2j * math.pi * k / 3) for k in range(3))
    grid = generate_nodes(3, 2, NodeConfig(tau_table=(roots3,)))
    cert = refined_certify(f, grid)
    diag = cert.per_disc[0]
    ok = err <= 1e-12 and diag.passed and diag.node_count == 2 and cert.node_savings > 0 and cert.overall
    report("C5 refinement", ok,
           f"diagonal restriction error {err:.1e} <= 1e-12, diagonal disc N_k = {diag.node_count}, "
           f"passed {diag.passed}, node savings {cert.node_savings}")
    assert ok


def test_c6_sharpness(report):
    grid = generate_nodes(3, 2)
    rng = np.random.default_rng(6)
    f = R.random_rif(rng, 2, 2)
    k = next(k for k in range(grid.M) if R.disc_degree(f, grid.discs[k]) == 2)
    rep = sharpness_demo(f, grid, k)
    ok = (rep.smallest_relative_eigenvalue >= 1e-6 and rep.agreement_residual <= 1e-9
          and abs(rep.disagreement - 2 * rep.radius) <= 1e-8 and rep.radius > 1e-4)
    report("C6 sharpness", ok,
           f"rel eig {rep.smallest_relative_eigenvalue:.2e} >= 1e-6, agreement {rep.agreement_residual:.1e} <= 1e-9, "
           f"|diff - 2r| {abs(rep.disagreement - 2 * rep.radius):.1e} <= 1e-8, radius {rep.radius:.3f} > 1e-4")
    assert ok


def test_c7_one_variable_equivalence(report):
    failures = 0
    worst = 0.0
    for seed in range(30):
        rng = np.random.default_rng(7000 + seed)
        k = int(rng.integers(1, 6))
        zeros = 0.9 * np.sqrt(rng.uniform(0, 1, k)) * np.exp(2j * np.pi * rng.uniform(0, 1, k))
        b = blaschke(zeros, cmath.exp(2j * math.pi * rng.uniform()))
        nodes = []
        while len(nodes) < k + 1:
            z = 0.9 * math.sqrt(rng.uniform()) * cmath.exp(2j * math.pi * rng.uniform())
            if all(abs(z - w) > 0.1 for w in nodes):
                nodes.append(z)
        full = PickProblem(nodes, b(np.array(nodes)))
        short = full.subset(range(k))
        v_full = classify(build_pick_matrix(full))
        v_short = classify(build_pick_matrix(short))
        if not v_full.unique or v_short.unique:
            failures += 1
            continue
        g = reconstruct_unique(full)
        probe = 0.9 * np.exp(2j * np.pi * np.linspace(0, 1, 40, endpoint=False)) * np.linspace(0, 1, 40)
        worst = max(worst, float(np.max(np.abs(g(probe) - b(probe)))))
    ok = failures == 0 and worst <= 1e-8
    report("C7 one-variable equivalence", ok, f"{30 - failures}/30 verdicts correct, reconstruction error {worst:.1e} <= 1e-8")
    assert ok


def test_c8_mutation_soundness(report):
    grid = generate_nodes(3, 2)
    flipped = 0
    for seed in range(100):
        rng = np.random.default_rng(8000 + seed)
        f = R.random_rif(rng, 2, _random_degree(rng, 2))
        delta = 1e-3 * cmath.exp(2j * math.pi * rng.uniform())
        mutation = (int(rng.integers(grid.M)), int(rng.integers(grid.N)), delta)
        cert = certify_uniqueness(f, grid, mutation=mutation)
        if not cert.overall:
            flipped += 1
    ok = flipped >= 95
    report("C8 mutation soundness", ok, f"{flipped}/100 mutated runs rejected (need >= 95)")
    assert ok
