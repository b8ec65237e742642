"""Acceptance criteria, one test each.

Every test prints a single ``[PASS]`` or ``[FAIL]`` line with the measured
quantities before asserting, so ``pytest tests/test_acceptance.py -v`` gives a
readable scorecard. Tolerances are the ones the criteria state.
"""

import math
import time

import numpy as np
import pytest

from cgfield import appendix_verifier as av
from cgfield import catalog
from cgfield import complex_manifold as cm
from cgfield import field_metrics as fm
from cgfield import gamma_algebra as ga
from cgfield import runner
from cgfield import spacetime_fields as sf

SEED = 20240
PROBE = (0.3, 0.2, -0.1, 0.4)


@pytest.fixture
def verdict(capsys):
    def emit(number, title, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number:>2} {title}: {detail}")
        assert ok, detail

    return emit


def rng_for(k):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([SEED, k])))


def rand_point(rng, n, radius=0.35):
    return radius * (rng.uniform(-1, 1, n) + 1j * rng.uniform(-1, 1, n)) / math.sqrt(2)


def test_c01_gamma_identities(verdict):
    t0 = time.perf_counter()
    recs = ga.selftest()
    dt = time.perf_counter() - t0
    anti = [r for r in recs if r["identity"] == "clifford-anticommutator"]
    trip = [r for r in recs if r["identity"] == "gamma-triple-product"]
    ok = len(anti) == 10 and len(trip) == 64 and all(r["pass"] for r in recs) and dt < 1.0
    verdict(1, "gamma identity suite", ok,
            f"{sum(r['pass'] for r in anti)}/10 anticommutators, {sum(r['pass'] for r in trip)}/64 triples exact, {dt:.3f}s")


def test_c02_flatness(verdict):
    rng = rng_for(2)
    t0 = time.perf_counter()
    worst = 0.0
    for n in (1, 2, 4):
        m = 2 * np.eye(n) + 0.3 * (np.ones((n, n)) + 1j * (np.triu(np.ones((n, n)), 1) - np.tril(np.ones((n, n)), -1)))
        g = cm.geometry(cm.constant_metric(m), rand_point(rng, n))
        worst = max(worst, np.abs(g.connection).max(), max(np.abs(f).max() for f in g.curvature.families()),
                    np.abs(g.ricci).max())
    dt = time.perf_counter() - t0
    verdict(2, "flatness", worst <= 1e-12 and dt < 1.0, f"max |Gamma|, |R|, |Ric| = {worst:.2e}, {dt:.3f}s")


def random_metric_set(rng, k=20):
    return [(cm.random_hermitian_polynomial_metric(rng, 2), rand_point(rng, 2)) for _ in range(k)]


def test_c03_ricci_routes(verdict):
    st = cm.DerivativeStencil(1e-3)
    t0 = time.perf_counter()
    dev = max(np.abs(cm.ricci_logdet(A, p, st) - cm.ricci_via_connection(A, p, st)).max()
              for A, p in random_metric_set(rng_for(3)))
    r = complex(cm.ricci_logdet(cm.exp_metric(), [0.3 + 0.2j], st)[0, 0])
    dt = time.perf_counter() - t0
    ok = dev <= 1e-6 and abs(r - 1) <= 1e-6 and dt < 10
    verdict(3, "Ricci route equivalence", ok, f"max route deviation {dev:.2e}, Kahler R = {r.real:.12f}{r.imag:+.1e}i, {dt:.2f}s")


def test_c04_ricci_antisymmetry(verdict):
    st = cm.DerivativeStencil(1e-3)
    res = max(cm.ricci_antisymmetry_residual(A, p, st) for A, p in random_metric_set(rng_for(3)))
    verdict(4, "Ricci antisymmetry", res <= 1e-5, f"max |R_jk + R_kj| = {res:.2e}")


def test_c05_determinant_oracle(verdict):
    rng = rng_for(5)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(1000):
        s = fm.PotentialSample(rng.uniform(-2, 2), rng.uniform(-2, 2, 3))
        d = 1 - s.a0**2 + s.avec_sq
        raw = np.linalg.det(fm.build_u1_metric(s).m)
        worst = max(worst, abs(raw - d**2) / max(1.0, d**2))
    dt = time.perf_counter() - t0
    verdict(5, "determinant oracle", worst <= 1e-12 and dt < 1.0, f"max rel |det - D^2| = {worst:.2e} over 1000 samples, {dt:.3f}s")


def test_c06_region_boundary(verdict):
    t0 = time.perf_counter()
    sweep = fm.coulomb_sweep(0.5 + 0.05 * np.arange(1271), far_radius=32.0)
    dt = time.perf_counter() - t0
    rb, far = sweep.bound_radius, sweep.far_min_d
    ok = rb is not None and abs(rb - 1.0) <= 1e-6 and far >= 1 - 1e-3 and dt < 1.0
    verdict(6, "region boundary", ok, f"bound radius {rb!r}, min D for r >= 32 = {far:.6f}, {dt:.3f}s")


def test_c07_poisson(verdict):
    r1, r2, ratio = runner.poisson_study(0.05)
    verdict(7, "Poisson convergence", 3.5 <= ratio <= 4.5, f"residual {r1:.3e} -> {r2:.3e}, ratio {ratio:.4f}")


def _box(cf, h):
    A = sf.VecPotential.from_closed_form(sf.Grid4.centred(PROBE, 2, h), cf)
    return sf.box_identity_check(A, A.grid.centre_index).residual


def _order2(cf, h):
    a, b = _box(cf, h), _box(cf, h / 2)
    if a <= 1e-9 and b <= 1e-9:
        return True, a, b, None
    ratio = a / b if b > 0 else math.inf
    return 3.5 <= ratio <= 4.5, a, b, ratio


def test_c08_mass_extraction(verdict):
    h = 0.1
    m = sf.extract_mass(sf.VecPotential.from_closed_form(sf.Grid4.centred(PROBE, 6, h), catalog.plane_wave()))
    mass_ok = abs(m.median) <= 10 * h**2
    pw_ok, pa, pb, pr = _order2(catalog.plane_wave(), h)
    ub_ok, ua, ub, ur = _order2(catalog.uniform_b_symmetric(), h)
    fmt = lambda r: "n/a" if r is None else f"{r:.4f}"  # noqa: E731
    detail = (f"plane-wave m^2 = {m.median:.2e} (bound {10 * h**2:g}); plane-wave box residual {pa:.2e} -> {pb:.2e} "
              f"ratio {fmt(pr)}; uniform-B box residual {ua:.3e} -> {ub:.3e} ratio {fmt(ur)}")
    verdict(8, "mass extraction", mass_ok and pw_ok and ub_ok, detail)


def test_c09_lagrangian(verdict):
    h = 0.1
    parts, ok = [], True
    for label, cf in (("E-only", catalog.e_only()), ("B-only", catalog.uniform_b_symmetric()),
                      ("plane-wave", catalog.plane_wave())):
        A = sf.VecPotential.from_closed_form(sf.Grid4.centred(PROBE, 2, h), cf)
        r = sf.lagrangian_check(A, A.grid.centre_index).residual
        ok &= r <= 10 * h**2
        parts.append(f"{label} {r:.2e}")
    verdict(9, "Lagrangian identity", ok, f"|-FF/4 + (E^2-B^2)/2| bound {10 * h**2:g}: " + ", ".join(parts))


def test_c10_appendix(verdict):
    t0 = time.perf_counter()
    path = av.PathSpec.straight((-1.2, -0.8, 0.5, -0.3), (1.0, 0.9, -0.4, 0.6), 201, "simpson")
    shift = (0.3, 0.1, -0.2, 0.4)
    a = av.verify_expansion(catalog.constant(*shift), catalog.on_shell_plane_wave(shift=shift), path, 1e-4)
    b = av.verify_expansion(catalog.gaussian_lorenz(), catalog.spinor_gaussian(), path, 1e-4)
    dt = time.perf_counter() - t0
    ok = a.passed and a.converged and b.passed and b.convergence_ratio is not None and b.convergence_ratio >= 3 and dt < 30
    verdict(10, "expansion certification", ok,
            f"constant/plane-wave err {a.relative_error:.1e} (noise floor {av.NOISE_FLOOR:g}); "
            f"Gaussian err {b.relative_error:.1e}, ratio {b.convergence_ratio:.2f}; {dt:.2f}s")


def test_c11_quadratic_dirac(verdict):
    h = 1e-2
    x = (0.1, 0.2, 0.3, 0.4)
    psi = catalog.on_shell_plane_wave()
    res = float(np.linalg.norm(av.quadratic_dirac_residual(catalog.zero(), psi, 1.0, x, h)))
    m_off = 1.3
    off = float(np.linalg.norm(av.quadratic_dirac_residual(catalog.zero(), psi, m_off, x, h)))
    gap = abs(1.0 - m_off**2) * float(np.linalg.norm(psi.at(x)))
    rel = abs(off - gap) / gap
    verdict(11, "quadratic Dirac residual", res <= 10 * h**2 and rel <= 0.01,
            f"on-shell {res:.2e} (bound {10 * h**2:g}); off-shell {off:.5f} vs {gap:.5f} ({rel:.2%})")


def test_c12_colour_rank(verdict):
    s = fm.PotentialSample(0.2, (0.1, -0.3, 0.2))
    drop = fm.colour_rank_analysis(fm.build_colour_metric(s, "product", np.diag([1.0, 1.0, 0.0])))
    full = [fm.colour_rank_analysis(fm.build_colour_metric(s, "product", q)).deficit
            for q in (np.eye(3), np.diag([1.0, 2.0, 0.5]))]
    ok = drop.rank == 8 and drop.deficit == 4 and full == [0, 0]
    verdict(12, "colour rank drop", ok, f"rank {drop.rank} deficit {drop.deficit}; full-rank deficits {full}")


def test_c13_determinism(verdict, tmp_path):
    bodies = []
    for k in range(2):
        cfg = runner.RunConfig(command="all", seed=SEED, out_dir=tmp_path / f"run{k}").validate()
        runner.write_outputs(cfg, runner.run(cfg))
        bodies.append((tmp_path / f"run{k}" / "report.json").read_bytes())
    verdict(13, "determinism", bodies[0] == bodies[1], f"report.json {len(bodies[0])} bytes, identical={bodies[0] == bodies[1]}")
