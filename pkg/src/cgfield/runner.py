"""Suite orchestration and report assembly.

Configuration is an INI file with one section per suite plus ``[run]``.
Every key is optional; defaults reproduce the reference acceptance runs.
Random metrics come from ``numpy.random.Generator(PCG64(SeedSequence([seed, k])))``
where ``k`` is the fixed index of the suite, so suites are independent of
the order they run in.
"""

from __future__ import annotations

import configparser
import csv
import hashlib
import io
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import appendix_verifier as av
from . import catalog
from . import complex_manifold as cm
from . import field_metrics as fm
from . import spacetime_fields as sf
from .gamma_algebra import selftest
from .sampled import FormatError, atomic_write_text, load_sampled_field

log = logging.getLogger(__name__)

SUITES = ("gamma-selftest", "manifold", "region", "fields", "appendix")
COMMANDS = SUITES + ("all",)
SUITE_INDEX = {name: k for k, name in enumerate(SUITES)}

PASS, FAIL, DIAG = "PASS", "FAIL", "DIAGNOSTIC"


class ConfigError(ValueError):
    pass


def _floats(text: str, n: int | None = None) -> tuple[float, ...]:
    vals = tuple(float(x) for x in text.replace(",", " ").split())
    if n is not None and len(vals) != n:
        raise ConfigError(f"expected {n} numbers, got {text!r}")
    return vals


def _names(text: str) -> tuple[str, ...]:
    return tuple(x.strip() for x in text.split(",") if x.strip())


@dataclass
class RunConfig:
    command: str = "all"
    seed: int = 0
    tol_scale: float = 1.0
    out_dir: Path = Path("cgfield-out")
    # manifold
    n_random: int = 20
    manifold_dim: int = 2
    fd_step: float = 1e-3
    fd_order: int = 4
    probe_radius: float = 0.35
    tol_flat: float = 1e-12
    tol_ricci_routes: float = 1e-6
    tol_antisymmetry: float = 1e-5
    tol_compat: float = 1e-6
    tol_ricci_identity: float = 1e-4
    # region
    coulomb_q: float = 1.0
    r_min: float = 0.5
    r_max: float = 64.0
    r_step: float = 0.05
    region_tol: float = 1e-6
    far_radius: float = 32.0
    n_det_samples: int = 1000
    # fields
    potentials: tuple[str, ...] = ("plane_wave", "uniform_b", "uniform_b_landau", "e_only")
    grid_step: float = 0.1
    probe_point: tuple[float, ...] = (0.3, 0.2, -0.1, 0.4)
    poisson_step: float = 0.05
    sampled_path: str | None = None
    # appendix
    cases: tuple[str, ...] = ("gaussian", "constant_plane_wave", "gaussian_non_lorenz")
    path_start: tuple[float, ...] = (-1.2, -0.8, 0.5, -0.3)
    path_end: tuple[float, ...] = (1.0, 0.9, -0.4, 0.6)
    path_points: int = 201
    quadrature: str = "simpson"
    appendix_tol: float = 1e-4
    dirac_step: float = 1e-2

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        for name in (
            "tol_scale", "fd_step", "tol_flat", "tol_ricci_routes", "tol_antisymmetry", "tol_compat",
            "tol_ricci_identity", "region_tol", "grid_step", "poisson_step", "appendix_tol", "dirac_step",
            "r_step", "probe_radius",
        ):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.fd_order not in (2, 4):
            raise ConfigError("fd_order must be 2 or 4")
        if self.quadrature not in ("simpson", "trapezoid"):
            raise ConfigError("quadrature must be simpson or trapezoid")
        if self.path_points < 3:
            raise ConfigError("path needs at least 3 points")
        if not 0 < self.r_min < self.r_max:
            raise ConfigError("need 0 < r_min < r_max")
        unknown = [p for p in self.potentials if p not in catalog.POTENTIALS]
        if unknown:
            raise ConfigError(f"unknown potentials: {unknown}")
        bad_cases = [c for c in self.cases if c not in APPENDIX_CASES]
        if bad_cases:
            raise ConfigError(f"unknown appendix cases: {bad_cases}")
        if self.sampled_path:
            try:
                load_sampled_field(self.sampled_path)
            except (OSError, FormatError) as exc:
                raise ConfigError(f"sampled field {self.sampled_path}: {exc}") from None
        return self

    def tol(self, value: float) -> float:
        return value * self.tol_scale

    def digest_inputs(self) -> dict:
        d = {k: v for k, v in self.__dict__.items() if k not in ("out_dir", "command")}
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in sorted(d.items())}


_SCHEMA = {
    "run": {"seed": int, "tol_scale": float},
    "manifold": {
        "n_random": int, "dim": ("manifold_dim", int), "h": ("fd_step", float), "order": ("fd_order", int),
        "probe_radius": float, "tol_flat": float, "tol_ricci_routes": float, "tol_antisymmetry": float,
        "tol_compat": float, "tol_ricci_identity": float,
    },
    "region": {
        "q": ("coulomb_q", float), "r_min": float, "r_max": float, "r_step": float, "tol": ("region_tol", float),
        "far_radius": float, "samples": ("n_det_samples", int),
    },
    "fields": {
        "potentials": ("potentials", _names), "h": ("grid_step", float), "point": ("probe_point", lambda s: _floats(s, 4)),
        "poisson_h": ("poisson_step", float), "sampled": ("sampled_path", str),
    },
    "appendix": {
        "cases": ("cases", _names), "start": ("path_start", lambda s: _floats(s, 4)),
        "end": ("path_end", lambda s: _floats(s, 4)), "points": ("path_points", int), "quadrature": str,
        "tol": ("appendix_tol", float), "dirac_h": ("dirac_step", float),
    },
}


def load_config(path, command: str = "all", seed: int | None = None, tol_scale: float | None = None,
                out_dir=None) -> RunConfig:
    """Parse and validate an INI configuration; every problem raises ConfigError."""
    parser = configparser.ConfigParser()
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except configparser.Error as exc:
        raise ConfigError(f"config parse error: {exc}") from None
    cfg = RunConfig(command=command)
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        keys = _SCHEMA[section]
        for key, raw in parser.items(section):
            if key not in keys:
                raise ConfigError(f"unknown key {key!r} in [{section}]")
            spec = keys[key]
            attr, conv = spec if isinstance(spec, tuple) else (key, spec)
            try:
                setattr(cfg, attr, conv(raw))
            except (ValueError, ConfigError) as exc:
                raise ConfigError(f"[{section}] {key} = {raw!r}: {exc}") from None
    if seed is not None:
        cfg.seed = seed
    if tol_scale is not None:
        cfg.tol_scale = tol_scale
    if out_dir is not None:
        cfg.out_dir = Path(out_dir)
    if cfg.sampled_path:
        cfg.sampled_path = str(Path(path).parent / cfg.sampled_path)
    return cfg.validate()


# ---------------------------------------------------------------------------
# report


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        return [_jsonable(float(x.real)), _jsonable(float(x.imag))]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    return x


def digest(obj) -> str:
    return hashlib.sha256(json.dumps(_jsonable(obj), sort_keys=True).encode()).hexdigest()[:16]


@dataclass
class Report:
    records: list[dict] = field(default_factory=list)
    artifacts: dict = field(default_factory=dict)

    def add(self, suite: str, name: str, identity: str, value, tol=None, status: str | None = None,
            inputs=None, convergence=None, passed: bool | None = None):
        if status is None:
            status = PASS if passed else FAIL
        self.records.append(
            {
                "suite": suite,
                "name": name,
                "identity": identity,
                "inputs_digest": digest(inputs if inputs is not None else {"name": name}),
                "value": _jsonable(value),
                "tolerance": _jsonable(tol),
                "status": status,
                "convergence": _jsonable(convergence),
            }
        )

    def summary(self) -> dict:
        counts = {PASS: 0, FAIL: 0, DIAG: 0}
        for r in self.records:
            counts[r["status"]] += 1
        return {"total": len(self.records), "pass": counts[PASS], "fail": counts[FAIL], "diagnostic": counts[DIAG]}

    def failed(self) -> list[dict]:
        return [r for r in self.records if r["status"] == FAIL]

    def body(self, cfg: RunConfig) -> dict:
        return {
            "command": cfg.command,
            "config": _jsonable(cfg.digest_inputs()),
            "records": self.records,
            "summary": self.summary(),
        }

    def to_json(self, cfg: RunConfig) -> str:
        return json.dumps(self.body(cfg), sort_keys=True, indent=2) + "\n"


def suite_rng(cfg: RunConfig, suite: str) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([cfg.seed, SUITE_INDEX[suite]])))


# ---------------------------------------------------------------------------
# suites


def run_gamma(cfg: RunConfig, rep: Report) -> None:
    for rec in selftest():
        rep.add("gamma-selftest", rec["name"], rec["identity"], rec.get("value", "exact"),
                tol="exact", passed=rec["pass"], inputs={"name": rec["name"]})


def _random_point(rng, n, radius):
    return radius * (rng.uniform(-1, 1, n) + 1j * rng.uniform(-1, 1, n)) / math.sqrt(2)


def run_manifold(cfg: RunConfig, rep: Report) -> None:
    S = "manifold"
    st = cm.DerivativeStencil(cfg.fd_step, cfg.fd_order)
    rng = suite_rng(cfg, S)

    for n in (1, 2, 4):
        m = np.eye(n) * 2.0 + 0.25 * (np.ones((n, n)) + 1j * np.triu(np.ones((n, n)), 1) - 1j * np.tril(np.ones((n, n)), -1))
        A = cm.constant_metric(m)
        p = _random_point(rng, n, cfg.probe_radius)
        g = cm.geometry(A, p, st)
        worst = max(
            float(np.max(np.abs(g.connection))),
            max(float(np.max(np.abs(f))) for f in g.curvature.families()),
            float(np.max(np.abs(g.ricci))),
        )
        t = cfg.tol(cfg.tol_flat)
        rep.add(S, f"flat_n{n}", "constant metric: connection, curvature, Ricci vanish", worst, t,
                passed=worst <= t, inputs={"n": n})

    A = cm.exp_metric()
    p = [0.3 + 0.2j]
    r = complex(cm.ricci_logdet(A, p, st)[0, 0])
    t = cfg.tol(1e-6)
    rep.add(S, "kahler_exp_ricci", "A = exp(z zbar) has R = 1", r, t, passed=abs(r - 1) <= t, inputs={"p": p})
    gam = complex(cm.connection_from_metric(A, p, st)[0, 0, 0])
    rep.add(S, "kahler_exp_connection", "A = exp(z zbar) has Gamma = zbar", gam, t,
            passed=abs(gam - np.conj(p[0])) <= t, inputs={"p": p})

    routes, anti, compat, herm, detd = [], [], [], [], []
    for k in range(cfg.n_random):
        A = cm.random_hermitian_polynomial_metric(rng, cfg.manifold_dim)
        p = _random_point(rng, cfg.manifold_dim, cfg.probe_radius)
        routes.append(float(np.max(np.abs(cm.ricci_logdet(A, p, st) - cm.ricci_via_connection(A, p, st)))))
        anti.append(cm.ricci_antisymmetry_residual(A, p, st))
        compat.append(cm.check_metric_compatibility(A, p, st).max_residual)
        herm.append(cm.check_hermitian_symmetry(A, p, st).residual)
        detd.append(cm.det_derivative_residual(A, p, st))
    conv = {"h": cfg.fd_step, "order": cfg.fd_order}
    inputs = {"seed": cfg.seed, "n": cfg.n_random, "dim": cfg.manifold_dim}
    for name, ident, vals, tol in (
        ("ricci_routes", "Ricci from ln det equals d(trace Gamma)/dzbar", routes, cfg.tol_ricci_routes),
        ("ricci_antisymmetry", "R_{jbar k} = -R_{k jbar}", anti, cfg.tol_antisymmetry),
        ("metric_compatibility", "dA = A Gamma (and conjugate)", compat, cfg.tol_compat),
        ("hermitian_symmetry", "conj(R_{abar b}) = R_{a bbar}", herm, cfg.tol_compat),
        ("det_derivative", "d det A = det A tr(A^-1 dA)", detd, cfg.tol_compat),
    ):
        t = cfg.tol(tol)
        rep.add(S, name, ident, {"max": max(vals), "per_metric": vals}, t, passed=max(vals) <= t,
                inputs=inputs, convergence=conv)

    A = cm.random_kahler_metric(rng, cfg.manifold_dim)
    p = _random_point(rng, cfg.manifold_dim, cfg.probe_radius)
    ri = cm.ricci_identity_check(A, p, cm.DerivativeStencil(1e-2, 2), cfg.tol(cfg.tol_ricci_identity))
    rep.add(S, "ricci_identity_kahler", "R_{jbar k;m} + R_{m jbar;k} = 0 (torsion free)", ri.residual,
            cfg.tol(cfg.tol_ricci_identity), passed=ri.ok, inputs={"seed": cfg.seed},
            convergence={"h": 1e-2, "half_step": ri.residual_half_step, "richardson": ri.richardson_estimate,
                         "torsion": ri.torsion})
    ef = cm.einstein_form(A, p, st)
    gap = abs(ef.trace - ef.expected_trace)
    rep.add(S, "einstein_trace", "metric trace of G equals (1 - n) R", {"trace": ef.trace, "expected": ef.expected_trace},
            cfg.tol(1e-8), passed=gap <= cfg.tol(1e-8), inputs={"seed": cfg.seed})

    B = cm.random_hermitian_polynomial_metric(rng, cfg.manifold_dim)
    ri = cm.ricci_identity_check(B, p, cm.DerivativeStencil(1e-2, 2), cfg.tol(cfg.tol_ricci_identity))
    rep.add(S, "ricci_identity_non_kahler", "Ricci identity on a metric with torsion", ri.residual, None, DIAG,
            inputs={"seed": cfg.seed}, convergence={"torsion": ri.torsion})


def region_sweep(cfg: RunConfig) -> fm.RegionSweep:
    n = int(round((cfg.r_max - cfg.r_min) / cfg.r_step))
    radii = cfg.r_min + cfg.r_step * np.arange(n + 1)
    return fm.coulomb_sweep(radii, cfg.coulomb_q, cfg.tol(cfg.region_tol), cfg.far_radius)


def run_region(cfg: RunConfig, rep: Report) -> None:
    S = "region"
    rng = suite_rng(cfg, S)
    worst = 0.0
    for _ in range(cfg.n_det_samples):
        s = fm.PotentialSample(rng.uniform(-2, 2), rng.uniform(-2, 2, 3))
        d = fm.metric_determinant(s)
        worst = max(worst, abs(d.raw - d.d**2) / max(1.0, d.d**2))
    t = cfg.tol(1e-12)
    rep.add(S, "u1_determinant_square", "det(gamma0 + gamma0 gamma.A) = (1 - A0^2 + |A|^2)^2", worst, t,
            passed=worst <= t, inputs={"seed": cfg.seed, "n": cfg.n_det_samples})

    mins = []
    for _ in range(cfg.n_det_samples):
        mins.append(fm.physical_d(fm.PotentialSample(rng.uniform(-1, 1), rng.normal(size=3))))
    rep.add(S, "perturbative_exclusion", "D > 0 whenever |A0| < 1", min(mins), 0.0, passed=min(mins) > 0,
            inputs={"seed": cfg.seed})

    sweep = region_sweep(cfg)
    rep.artifacts["region_sweep.csv"] = sweep_csv(sweep)
    rb = sweep.bound_radius
    t = cfg.tol(cfg.region_tol)
    rep.add(S, "coulomb_bound_boundary", "D = 0 at r = q for A0 = q/r", rb, t,
            passed=rb is not None and abs(rb - cfg.coulomb_q) <= t,
            inputs={"q": cfg.coulomb_q, "r": [cfg.r_min, cfg.r_max, cfg.r_step]})
    grid_hit = [row.r for row in sweep.rows if row.label is fm.RegionLabel.BOUND]
    rep.add(S, "coulomb_bound_row", "sweep row labelled BoundBoundary", grid_hit, t, DIAG, inputs={"q": cfg.coulomb_q})
    if sweep.far_min_d is not None:
        rep.add(S, "coulomb_far_field", "D approaches 1 far from the source", sweep.far_min_d, 1 - 1e-3,
                passed=sweep.far_min_d >= 1 - 1e-3, inputs={"far_radius": cfg.far_radius})

    blk = fm.build_colour_metric(fm.PotentialSample(0.2, (0.1, -0.3, 0.2)), "product", np.diag([1, 1, 0]))
    rr = fm.colour_rank_analysis(blk)
    rep.add(S, "colour_rank_drop", "colour block diag(1,1,0) drops rank by 4", {"rank": rr.rank, "deficit": rr.deficit},
            8, passed=rr.rank == 8)
    full = fm.build_colour_metric(fm.PotentialSample(0.2, (0.1, -0.3, 0.2)), "product", np.eye(3))
    rf = fm.colour_rank_analysis(full)
    rep.add(S, "colour_full_rank", "non-degenerate colour metric keeps full rank", rf.deficit, 0, passed=rf.deficit == 0)

    p = fm.build_u1_metric(fm.PotentialSample(0.3, (0.2, 0.1, -0.4))).m
    q = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    dense = np.linalg.det(np.kron(p, q))
    law = fm.kron_det(p, q)
    rel = abs(dense - law) / abs(dense)
    rep.add(S, "kronecker_determinant", "det(P x Q) = det(P)^3 det(Q)^4", rel, cfg.tol(1e-10),
            passed=rel <= cfg.tol(1e-10), inputs={"seed": cfg.seed})
    split = fm.colour_logdet_split(p, q)
    rep.add(S, "colour_logdet_split", "ln det(P x Q) = 3 ln det P + 4 ln det Q", split["dense_log_abs"], cfg.tol(1e-10),
            passed=split["abs_match"])

    cc = np.zeros((3, 9))
    cc[:, 0] = rng.uniform(-0.3, 0.3, 3)
    a0 = float(rng.uniform(-0.5, 0.5))
    ent = fm.build_colour_metric(fm.PotentialSample(a0, colour_coeffs=cc), "entangled").m
    expect = (1 - a0**2 - float(cc[:, 0] @ cc[:, 0])) ** 6
    rel = abs(np.linalg.det(ent) - expect) / abs(expect)
    rep.add(S, "entangled_u3_determinant", "lambda0-only entangled metric: det = (1 - A0^2 - |A_0|^2)^6", rel,
            cfg.tol(1e-10), passed=rel <= cfg.tol(1e-10), inputs={"seed": cfg.seed})
    ext = fm.u3_extend(fm.PotentialSample(0.0, colour_coeffs=cc))
    rep.add(S, "u3_lambda0", "lambda0 = i I3 is unitary and anti-Hermitian",
            {"unitary": ext["lambda0_unitary"], "hermitian": ext["lambda0_hermitian"]}, None, DIAG)

    for label, mat in (("gamma0", fm.GAMMA0), ("identity3", np.eye(3)), ("diag10", np.diag([1.0, 0.0]))):
        rep.add(S, f"signature_{label}", "eigenvalue sign census", fm.signature_classify(mat).value, None, DIAG)


def sweep_csv(sweep: fm.RegionSweep) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["r", "D", "label"])
    w.writerows(sweep.csv_rows())
    return buf.getvalue()


def _potential_on_grid(name: str, centre, half, h) -> sf.VecPotential:
    return sf.VecPotential.from_closed_form(sf.Grid4.centred(centre, half, h), catalog.potential(name))


def _order2(r1: float, r2: float, floor: float = 1e-9) -> tuple[bool, float | None]:
    if r2 <= floor and r1 <= floor:
        return True, None
    ratio = r1 / r2 if r2 > 0 else math.inf
    return 3.5 <= ratio <= 4.5, ratio


def poisson_study(h: float) -> tuple[float, float, float]:
    """Coulomb Laplacian residual on r in [1, 5] at h and h/2 (shared lattice nodes at r = 1)."""
    out = []
    for step in (h, h / 2):
        n = int(round(3.0 / step))
        grid = sf.Grid4((1, n + 1, n + 1, n + 1), (1.0, step, step, step), (0.0, -0.5, -0.5, -0.5))
        out.append(sf.poisson_residual(sf.VecPotential.from_closed_form(grid, catalog.coulomb()), (1.0, 5.0)).max_residual)
    return out[0], out[1], out[0] / out[1]


def run_fields(cfg: RunConfig, rep: Report) -> None:
    S = "fields"
    h = cfg.grid_step
    centre = cfg.probe_point
    t_h2 = lambda step: cfg.tol(10 * step**2)  # noqa: E731

    r1, r2, ratio = poisson_study(cfg.poisson_step)
    rep.add(S, "poisson_coulomb", "laplacian of 1/r vanishes off the source", {"h": r1, "h_half": r2}, [3.5, 4.5],
            passed=3.5 <= ratio <= 4.5, convergence={"ratio": ratio, "h": cfg.poisson_step})
    g = sf.Grid4((1, 9, 9, 9), (1.0, 0.1, 0.1, 0.1), (0.0, 0.0, 0.0, 0.0))
    xs = sf.poisson_residual(sf.VecPotential.from_closed_form(g, catalog.x_squared())).max_residual
    rep.add(S, "poisson_x_squared", "non-harmonic A0 = x^2 detected", xs, None, DIAG)

    for name in cfg.potentials:
        inputs = {"potential": name, "h": h, "point": list(centre)}
        res = {}
        for step in (h, h / 2):
            A = _potential_on_grid(name, centre, 2, step)
            p = A.grid.centre_index
            F = sf.field_tensor(A, p)
            em = sf.em_fields(A, p)
            res[step] = {
                "f0i": float(np.max(np.abs(F[0, 1:] + em.e))),
                "lag": sf.lagrangian_check(A, p),
                "scalar": bool(np.any(A.a[0])),
            }
            try:
                res[step]["box"] = sf.box_identity_check(A, p).residual
                res[step]["transverse"] = sf.transverse_identity_check(A, p)
            except sf.GaugeError as exc:
                res[step]["gauge"] = str(exc)
        a, b = res[h], res[h / 2]
        rep.add(S, f"{name}:f0i_vs_e", "F^{0i} = -E^i (same stencils)", a["f0i"], 1e-12, passed=a["f0i"] <= 1e-12, inputs=inputs)
        lag = a["lag"]
        rep.add(S, f"{name}:lagrangian", "-F.F/4 = -(E^2 - B^2)/2", lag.residual, t_h2(h), passed=lag.residual <= t_h2(h),
                inputs=inputs, convergence={"h_half": b["lag"].residual, "standard_sign_residual": lag.standard_residual,
                                            "quarter_ff": lag.quarter_ff, "e2_minus_b2": lag.e2_minus_b2})
        if "box" in a:
            ok, ratio = _order2(a["box"], b["box"])
            if a["scalar"]:
                # the identity is stated for A^0 = 0, so a scalar potential only shows what breaks
                rep.add(S, f"{name}:box_identity", "box(A.A) = 2(E^2 - B^2) + 2 A.box(A), A^0 != 0",
                        {"h": a["box"], "h_half": b["box"]}, None, DIAG, inputs=inputs, convergence={"ratio": ratio})
            else:
                rep.add(S, f"{name}:box_identity", "box(A.A) = 2(E^2 - B^2) + 2 A.box(A)",
                        {"h": a["box"], "h_half": b["box"]}, [3.5, 4.5], passed=ok, inputs=inputs,
                        convergence={"ratio": ratio})
            tr = a["transverse"]
            rep.add(S, f"{name}:transverse_two_term", "B^2 = (grad A):(grad A) - (grad A):(grad A)^T", tr.two_term, t_h2(h),
                    passed=tr.two_term <= t_h2(h), inputs=inputs)
            rep.add(S, f"{name}:transverse_one_term", "B^2 = (grad A):(grad A) for transverse fields", tr.one_term, None, DIAG,
                    inputs=inputs, convergence={"cross_term": tr.cross})
        else:
            rep.add(S, f"{name}:box_identity", "Coulomb gauge precondition", a["gauge"], None, DIAG, inputs=inputs)

        cf = catalog.potential(name)
        if cf.static or name == "plane_wave":
            A = _potential_on_grid(name, centre, 6, h)
            try:
                m = sf.extract_mass(A)
            except sf.GridError as exc:
                rep.add(S, f"{name}:mass", "m^2 = (E^2 - B^2)/|A|^2", str(exc), None, DIAG, inputs=inputs)
            else:
                if name == "plane_wave":
                    rep.add(S, f"{name}:mass", "null field has m^2 = 0", m.median, t_h2(h), passed=abs(m.median) <= t_h2(h),
                            inputs=inputs, convergence={"spread": m.spread, "n": m.n_used})
                else:
                    rep.add(S, f"{name}:mass", "m^2 = (E^2 - B^2)/|A|^2", m.median, None, DIAG, inputs=inputs,
                            convergence={"spread": m.spread, "constant": m.constant})

    for step in (h, h / 2):
        grid = sf.Grid4.centred(centre, 3, step)
        div = sf.current_divergence(sf.SpinorField.from_closed_form(grid, catalog.on_shell_plane_wave()))
        rep.add(S, f"current_conservation_h{step:g}", "d_mu (psibar gamma^mu psi) = 0 for free solutions", div, t_h2(step),
                passed=div <= t_h2(step))
    grid = sf.Grid4.centred(centre, 3, h)
    noise_rng = suite_rng(cfg, S)
    noise = noise_rng.normal(size=(4, *grid.dims)) + 1j * noise_rng.normal(size=(4, *grid.dims))
    rep.add(S, "current_noise_detection", "random spinor violates current conservation",
            sf.current_divergence(sf.SpinorField(grid, noise)), None, DIAG, inputs={"seed": cfg.seed})

    if cfg.sampled_path:
        fld = load_sampled_field(cfg.sampled_path)
        if isinstance(fld, sf.VecPotential):
            p = fld.grid.centre_index
            lag = sf.lagrangian_check(fld, p)
            rep.add(S, "sampled:lagrangian", "-F.F/4 against (E^2 - B^2)/2 on a sampled field",
                    {"residual": lag.residual, "standard_sign_residual": lag.standard_residual}, None, DIAG,
                    inputs={"file": Path(cfg.sampled_path).name})
        else:
            rep.add(S, "sampled:current", "current divergence of a sampled spinor", sf.current_divergence(fld), None, DIAG,
                    inputs={"file": Path(cfg.sampled_path).name})


def _case(name: str):
    if name == "gaussian":
        return catalog.gaussian_lorenz(), catalog.spinor_gaussian()
    if name == "constant_plane_wave":
        shift = (0.3, 0.1, -0.2, 0.4)
        return catalog.constant(*shift), catalog.on_shell_plane_wave(shift=shift)
    if name == "gaussian_non_lorenz":
        return catalog.gaussian_plain(), catalog.spinor_gaussian()
    if name == "zero":
        return catalog.zero(), catalog.spinor_gaussian()
    raise ConfigError(f"unknown appendix case {name!r}")


APPENDIX_CASES = ("gaussian", "constant_plane_wave", "gaussian_non_lorenz", "zero")


def run_appendix(cfg: RunConfig, rep: Report) -> None:
    S = "appendix"
    t = cfg.tol(cfg.appendix_tol)
    for name in cfg.cases:
        A, psi = _case(name)
        path = av.PathSpec.straight(cfg.path_start, cfg.path_end, cfg.path_points, cfg.quadrature)
        r = av.verify_expansion(A, psi, path, t)
        terms = av.rhs_terms(A, psi, path)
        rep.artifacts[f"terms_{name}.json"] = json.dumps(
            _jsonable({
                "case": name,
                "local_terms": {k: v for k, v in terms.local_terms.items()},
                "integral_terms": {k: v for k, v in terms.integral_terms.items()},
                "lorenz_defect": terms.lorenz_defect,
                "lhs": r.lhs,
                "rhs_total": r.rhs_total,
                "term_norms": r.term_norms,
            }),
            sort_keys=True,
            indent=2,
        ) + "\n"
        inputs = {"case": name, "start": list(cfg.path_start), "end": list(cfg.path_end), "n": cfg.path_points}
        conv = {"refined_error": r.refined_error, "ratio": r.convergence_ratio, "converged": r.converged,
                "lorenz_defect": r.lorenz_defect}
        if name == "gaussian_non_lorenz":
            lhs = av.lhs_integral(A, psi, path)
            gap = float(np.linalg.norm(lhs - terms.total - terms.lorenz_defect) / np.linalg.norm(terms.lorenz_defect))
            rep.add(S, f"{name}:expansion", "expansion off the Lorenz gauge misses the d.A term", r.relative_error, None, DIAG,
                    inputs=inputs, convergence=conv)
            rep.add(S, f"{name}:lorenz_defect", "lhs - rhs equals int (d.A) gamma gamma d psi dx", gap, t, passed=gap <= t,
                    inputs=inputs)
        else:
            rep.add(S, f"{name}:expansion", "path-integral expansion of the gauge term", r.relative_error, t,
                    passed=r.passed and r.converged, inputs=inputs, convergence=conv)
        sec = av.second_order_integral(A, psi, path)
        rep.add(S, f"{name}:second_order", "second-order integral (omitted from the expansion)", float(np.linalg.norm(sec)),
                None, DIAG, inputs=inputs)
        mot = av.motion_equation_terms(A, psi, path)
        rep.add(S, f"{name}:motion_terms", "Dirac-matching versus nonlocal terms", mot, None, DIAG, inputs=inputs)

    x = (0.1, 0.2, 0.3, 0.4)
    psi = catalog.on_shell_plane_wave()
    vals = []
    for step in (cfg.dirac_step, cfg.dirac_step / 2):
        res = float(np.linalg.norm(av.quadratic_dirac_residual(catalog.zero(), psi, 1.0, x, step)))
        vals.append(res)
    tq = cfg.tol(10 * cfg.dirac_step**2)
    rep.add(S, "dirac_free_on_shell", "quadratic Dirac form, free on-shell wave", vals[0], tq, passed=vals[0] <= tq,
            convergence={"h_half": vals[1], "ratio": vals[0] / vals[1] if vals[1] else None})
    shift = (0.3, 0.1, -0.2, 0.4)
    res = float(np.linalg.norm(av.quadratic_dirac_residual(catalog.constant(*shift), catalog.on_shell_plane_wave(shift=shift),
                                                           1.0, x, cfg.dirac_step)))
    rep.add(S, "dirac_constant_potential", "minimal coupling absorbs a constant potential", res, tq, passed=res <= tq)
    m_off = 1.3
    res = float(np.linalg.norm(av.quadratic_dirac_residual(catalog.zero(), psi, m_off, x, cfg.dirac_step)))
    gap = abs(1.0 - m_off**2) * float(np.linalg.norm(psi.at(x)))
    rel = abs(res - gap) / gap
    rep.add(S, "dirac_off_shell_gap", "off-shell residual equals |p^2 - m^2| |psi|", rel, 0.01, passed=rel <= 0.01)


RUNNERS = {
    "gamma-selftest": run_gamma,
    "manifold": run_manifold,
    "region": run_region,
    "fields": run_fields,
    "appendix": run_appendix,
}


def run(cfg: RunConfig) -> Report:
    """Execute the selected suites in fixed order and return the assembled report."""
    rep = Report()
    suites = SUITES if cfg.command == "all" else (cfg.command,)
    for name in suites:
        log.info("running suite %s", name)
        RUNNERS[name](cfg, rep)
    return rep


def write_outputs(cfg: RunConfig, rep: Report) -> list[Path]:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, text in sorted(rep.artifacts.items()):
        atomic_write_text(out / name, text)
        written.append(out / name)
    atomic_write_text(out / "report.json", rep.to_json(cfg))
    written.append(out / "report.json")
    return written
