"""Path-integral check of the gauge-field expansion of the fermion motion equation.

The left side is

    L = int gamma_s d^s(gamma_n A^n) gamma_r gamma_l d^r psi dx^l

along a space-time path. The right side is the sum of three local terms
(taken as differences between the path end and start) and six path
integrals, see :func:`rhs_terms`. The two sides agree whenever the potential
satisfies the Lorenz condition d_mu A^mu = 0; otherwise they differ by
``lorenz_defect`` = int (d.A) gamma_r gamma_l d^r psi dx^l, which is reported
alongside.

Derivatives of the fields are taken pointwise by fourth-order central
differences on callables, so closed forms and interpolated samples are
treated the same way.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import simpson, trapezoid
from scipy.ndimage import map_coordinates, spline_filter

from .gamma_algebra import GAMMA, GAMMA5, GAMMA_LOWER, LEVI_CIVITA, METRIC

log = logging.getLogger(__name__)

G_DIAG = np.diag(METRIC).astype(float)
DEFAULT_FD_STEP = 1e-3
NOISE_FLOOR = 1e-9

# gamma_mu gamma_nu for all index pairs, lower indices
GG_LOWER = np.einsum("mab,nbc->mnac", GAMMA_LOWER, GAMMA_LOWER)


class PathError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# fields as point callables


def as_point_field(f) -> Callable[[np.ndarray], np.ndarray]:
    """Wrap a closed form or a grid field as ``X (4, N) -> values (4, N)``.

    Grid fields are interpolated with cubic B-splines; only axes with at least
    four points are interpolated, static axes are dropped. Points outside the
    sampled box raise :class:`PathError`.
    """
    if hasattr(f, "grid"):
        data = f.a if hasattr(f, "a") else f.psi
        grid = f.grid
        live = [mu for mu in range(4) if grid.dims[mu] > 1]
        if any(grid.dims[mu] < 4 for mu in live):
            raise PathError("cubic interpolation needs at least four samples along each live axis")
        squeeze = tuple(0 if grid.dims[mu] == 1 else slice(None) for mu in range(4))
        parts = [data.real] + ([data.imag] if np.iscomplexobj(data) else [])
        coeffs = [[spline_filter(comp[squeeze], order=3, mode="mirror") for comp in part] for part in parts]
        origin = np.array([grid.origin[mu] for mu in live])[:, None]
        spacing = np.array([grid.spacing[mu] for mu in live])[:, None]
        upper = np.array([grid.dims[mu] - 1 for mu in live])[:, None]

        def call(X):
            idx = (np.asarray(X, dtype=float)[live] - origin) / spacing
            if np.any(idx < -1e-9) or np.any(idx > upper + 1e-9):
                raise PathError("path leaves the sampled grid")
            vals = [
                np.array([map_coordinates(c, idx, order=3, mode="mirror", prefilter=False) for c in part])
                for part in coeffs
            ]
            return vals[0] + 1j * vals[1] if len(vals) == 2 else vals[0]

        return call

    def call(X):
        X = np.asarray(X, dtype=float)
        out = np.asarray(f(X[0], X[1], X[2], X[3]))
        return np.broadcast_to(out, (4, X.shape[1])) if out.ndim == 1 else out

    return call


_TAPS4 = ((-2, 1 / 12), (-1, -2 / 3), (1, 2 / 3), (2, -1 / 12))
_TAPS2 = ((-1, -0.5), (1, 0.5))


def jacobian(fn, X: np.ndarray, h: float = DEFAULT_FD_STEP, order: int = 4) -> np.ndarray:
    """d_mu fn at every column of X; returns shape (4, *fn(X).shape) with mu first."""
    taps = _TAPS4 if order == 4 else _TAPS2
    out = []
    for mu in range(4):
        acc = 0.0
        for k, w in taps:
            Xs = X.copy()
            Xs[mu] += k * h
            acc = acc + w * fn(Xs)
        out.append(acc / h)
    return np.array(out)


@dataclass
class PathSpec:
    """Ordered path points x^mu(t_i) on a uniform parameter grid.

    ``tangent`` holds dx^mu/dt; when absent it is estimated from the points.
    """

    points: np.ndarray
    quadrature: str = "simpson"
    params: np.ndarray | None = None
    tangent: np.ndarray | None = None
    segment: tuple | None = None

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        if self.points.ndim != 2 or self.points.shape[1] != 4:
            raise PathError("path points must have shape (N, 4)")
        n = self.points.shape[0]
        if n < 3:
            raise PathError("a path needs at least three points")
        if self.quadrature not in ("simpson", "trapezoid"):
            raise PathError(f"unknown quadrature {self.quadrature!r}")
        if self.params is None:
            self.params = np.linspace(0.0, 1.0, n)
        self.params = np.asarray(self.params, dtype=float)
        if np.any(np.diff(self.params) <= 0):
            raise PathError("path parameter must be strictly increasing")
        if self.tangent is None:
            self.tangent = np.gradient(self.points, self.params, axis=0, edge_order=2)
        self.tangent = np.asarray(self.tangent, dtype=float)

    @classmethod
    def straight(cls, start, end, n: int = 201, quadrature: str = "simpson") -> "PathSpec":
        start = np.asarray(start, dtype=float)
        end = np.asarray(end, dtype=float)
        s = np.linspace(0.0, 1.0, n)
        pts = start[None, :] + s[:, None] * (end - start)[None, :]
        return cls(pts, quadrature, s, np.tile(end - start, (n, 1)), (tuple(start), tuple(end)))

    @property
    def n(self) -> int:
        return self.points.shape[0]

    def refined(self) -> "PathSpec":
        """Same path with every interval halved (2n - 1 points)."""
        if self.segment is not None:
            return PathSpec.straight(*self.segment, n=2 * self.n - 1, quadrature=self.quadrature)
        raise PathError("refinement is only defined for straight paths")

    def reversed(self) -> "PathSpec":
        if self.segment is not None:
            return PathSpec.straight(self.segment[1], self.segment[0], self.n, self.quadrature)
        return PathSpec(self.points[::-1], self.quadrature, self.params, -self.tangent[::-1])

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """Integrate samples (..., N) over the path parameter."""
        if self.quadrature == "simpson":
            return simpson(values, x=self.params, axis=-1)
        return trapezoid(values, x=self.params, axis=-1)


@dataclass
class _PathData:
    """Fields and derivatives at all path points, columns indexed by point."""

    A: np.ndarray  # A^nu, (4, N)
    dA: np.ndarray  # d_mu A^nu, (4mu, 4nu, N)
    ddA: np.ndarray  # d_l d_mu A^nu, (4l, 4mu, 4nu, N)
    psi: np.ndarray  # (4, N)
    dpsi: np.ndarray  # d_mu psi, (4mu, 4, N)
    ddpsi: np.ndarray  # d_l d_mu psi, (4l, 4mu, 4, N)
    xdot: np.ndarray  # (4, N)


def _sample(A, psi, X: np.ndarray, xdot: np.ndarray, h: float) -> _PathData:
    fa = as_point_field(A)
    fp = as_point_field(psi)
    da_fn = lambda Y: jacobian(fa, Y, h)  # noqa: E731
    dp_fn = lambda Y: jacobian(fp, Y, h)  # noqa: E731
    return _PathData(
        fa(X).astype(float),
        da_fn(X),
        jacobian(da_fn, X, h),
        fp(X).astype(complex),
        dp_fn(X),
        jacobian(dp_fn, X, h),
        xdot,
    )


def _raise(d: np.ndarray, axis: int) -> np.ndarray:
    """Raise a derivative index sitting on ``axis`` of ``d``."""
    shape = [1] * d.ndim
    shape[axis] = 4
    return d * G_DIAG.reshape(shape)


def _field_strength(dA: np.ndarray) -> np.ndarray:
    """F^{mu nu} from d_mu A^nu; works with extra leading or trailing axes after (mu, nu)."""
    up = _raise(dA, 0)  # d^mu A^nu
    return up - np.swapaxes(up, 0, 1)


def _local_terms(d: _PathData, k: int) -> dict:
    """Local terms at path point ``k``."""
    A = d.A[:, k]
    dpsi_up = _raise(d.dpsi[:, :, k], 0)  # d^nu psi, (4, 4)
    A_low = G_DIAG * A
    t1 = np.einsum("n,na->a", A_low, dpsi_up)
    # Ftilde^{mu nu} psi = A^mu d^nu psi - A^nu d^mu psi
    ftil = np.einsum("m,na->mna", A, dpsi_up) - np.einsum("n,ma->mna", A, dpsi_up)
    t2 = 0.5 * np.einsum("mnab,mnb->a", GG_LOWER, ftil)
    F = _field_strength(d.dA[:, :, k])
    t3 = 0.5 * np.einsum("mnab,mn,b->a", GG_LOWER, F, d.psi[:, k])
    return {"a_dot_dpsi": t1, "gg_ftilde_psi": t2, "gg_f_psi": t3}


def _lhs_integrand(d: _PathData) -> np.ndarray:
    dA_up = _raise(d.dA, 0)  # d^s A^n, (s, n, N)
    M1 = np.einsum("snN,snab->abN", dA_up, GG_LOWER)
    xslash = np.einsum("lN,lab->abN", d.xdot, GAMMA_LOWER)
    dpsi_up = _raise(d.dpsi, 0)  # d^r psi, (r, 4, N)
    v = np.einsum("rab,bcN,rcN->aN", GAMMA_LOWER, xslash, dpsi_up)
    return np.einsum("abN,bN->aN", M1, v)


def _lorenz_integrand(d: _PathData) -> np.ndarray:
    div = np.einsum("mmN->N", d.dA)
    xslash = np.einsum("lN,lab->abN", d.xdot, GAMMA_LOWER)
    dpsi_up = _raise(d.dpsi, 0)
    return div * np.einsum("rab,bcN,rcN->aN", GAMMA_LOWER, xslash, dpsi_up)


def _integrands(d: _PathData) -> dict:
    xd = d.xdot
    xd_up = xd
    A = d.A
    A_low = G_DIAG[:, None] * A
    dpsi_up = _raise(d.dpsi, 0)  # (rho, 4, N)
    div = np.einsum("mmN->N", d.dA)

    # 1: 1/2 gamma_r gamma_l (d.A)(xdot^l d^r - xdot^r d^l) psi
    anti = np.einsum("lN,raN->rlaN", xd_up, dpsi_up) - np.einsum("rN,laN->rlaN", xd_up, dpsi_up)
    i1 = 0.5 * div * np.einsum("rlab,rlbN->aN", GG_LOWER, anti)

    # 2: i eps_{s r l m} d^s A^n gamma_n gamma5 gamma^m d^r psi xdot^l
    dA_up = _raise(d.dA, 0)
    g5gm = np.einsum("ab,mbc->mac", GAMMA5, GAMMA)
    gn_g5gm = np.einsum("nab,mbc->nmac", GAMMA_LOWER, g5gm)
    w = np.einsum("srlm,snN,lN->nmrN", LEVI_CIVITA, dA_up, xd)
    i2 = 1j * np.einsum("nmrN,nmab,rbN->aN", w, gn_g5gm, dpsi_up)

    # 3: -A_n d_l d^n psi xdot^l
    ddpsi_up = _raise(d.ddpsi, 1)  # d_l d^n psi
    i3 = -np.einsum("nN,lnaN,lN->aN", A_low, ddpsi_up, xd)

    # 4: -1/2 gamma_m gamma_n (A^m d^n - A^n d^m) d_l psi xdot^l
    ddpsi_t_up = np.einsum("lN,lnaN->naN", xd, ddpsi_up)  # d^n (d psi/dt)
    ft = np.einsum("mN,naN->mnaN", A, ddpsi_t_up) - np.einsum("nN,maN->mnaN", A, ddpsi_t_up)
    i4 = -0.5 * np.einsum("mnab,mnbN->aN", GG_LOWER, ft)

    # 5: -1/2 gamma_m gamma_n d_l F^{mn} psi xdot^l
    dF = np.array([_field_strength(d.ddA[l]) for l in range(4)])  # (l, m, n, N)
    dF_t = np.einsum("lmnN,lN->mnN", dF, xd)
    i5 = -0.5 * np.einsum("mnab,mnN,bN->aN", GG_LOWER, dF_t, d.psi)

    # 6: -gamma_m gamma_n d^s A^m d_s psi xdot^n
    sdot = np.einsum("smN,saN->maN", dA_up, d.dpsi)  # d^s A^m d_s psi
    i6 = -np.einsum("mnab,mbN,nN->aN", GG_LOWER, sdot, xd)

    return {
        "div_a_antisym": i1,
        "epsilon_gamma5": i2,
        "a_dd_psi": i3,
        "ftilde_d_psi": i4,
        "d_f_psi": i5,
        "da_d_psi": i6,
    }


LOCAL_NAMES = ("a_dot_dpsi", "gg_ftilde_psi", "gg_f_psi")
INTEGRAL_NAMES = ("div_a_antisym", "epsilon_gamma5", "a_dd_psi", "ftilde_d_psi", "d_f_psi", "da_d_psi")


@dataclass
class TermBreakdown:
    local_terms: dict
    integral_terms: dict
    lorenz_defect: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return sum(self.local_terms.values()) + sum(self.integral_terms.values())

    def norms(self) -> dict:
        out = {k: float(np.linalg.norm(v)) for k, v in self.local_terms.items()}
        out.update({k: float(np.linalg.norm(v)) for k, v in self.integral_terms.items()})
        return out


def _path_data(A, psi, path: PathSpec, h: float) -> _PathData:
    X = path.points.T
    return _sample(A, psi, X, path.tangent.T, h)


def lhs_integral(A, psi, path: PathSpec, h: float = DEFAULT_FD_STEP) -> np.ndarray:
    d = _path_data(A, psi, path, h)
    return path.integrate(_lhs_integrand(d))


def _breakdown(d: _PathData, path: PathSpec) -> TermBreakdown:
    start = _local_terms(d, 0)
    end = _local_terms(d, path.n - 1)
    local = {k: end[k] - start[k] for k in LOCAL_NAMES}
    integrals = {k: path.integrate(v) for k, v in _integrands(d).items()}
    return TermBreakdown(local, integrals, path.integrate(_lorenz_integrand(d)))


def rhs_terms(A, psi, path: PathSpec, h: float = DEFAULT_FD_STEP) -> TermBreakdown:
    return _breakdown(_path_data(A, psi, path, h), path)


def second_order_integral(A, psi, path: PathSpec, h: float = DEFAULT_FD_STEP) -> np.ndarray:
    """-int gamma_m A^m gamma_s d^s(gamma_n A^n) gamma_r gamma_l d^r psi dx^l (diagnostic only)."""
    d = _path_data(A, psi, path, h)
    aslash = np.einsum("mN,mab->abN", d.A, GAMMA_LOWER)
    return -path.integrate(np.einsum("abN,bN->aN", aslash, _lhs_integrand(d)))


@dataclass
class ExpansionReport:
    lhs: np.ndarray
    rhs_total: np.ndarray
    relative_error: float
    refined_error: float
    convergence_ratio: float | None
    converged: bool
    passed: bool
    tol: float
    n_points: int
    term_norms: dict = field(default_factory=dict)
    lorenz_defect: float = 0.0

    def as_record(self) -> dict:
        return {
            "lhs": _cvec(self.lhs),
            "rhs_total": _cvec(self.rhs_total),
            "relative_error": self.relative_error,
            "refined_error": self.refined_error,
            "convergence_ratio": self.convergence_ratio,
            "converged": self.converged,
            "pass": self.passed,
            "tol": self.tol,
            "n_points": self.n_points,
            "term_norms": self.term_norms,
            "lorenz_defect": self.lorenz_defect,
        }


def _cvec(v) -> list:
    return [[float(np.real(x)), float(np.imag(x))] for x in np.asarray(v).ravel()]


def relative_error(lhs: np.ndarray, rhs: np.ndarray, term_norms) -> float:
    """|lhs - rhs| / max(|lhs|, largest term norm, 1e-12); zero when both sides agree exactly."""
    num = float(np.linalg.norm(lhs - rhs))
    if num == 0.0:
        return 0.0
    floor = max([1e-12, *term_norms])
    return num / max(float(np.linalg.norm(lhs)), floor)


def _evaluate(A, psi, path, h):
    d = _path_data(A, psi, path, h)
    lhs = path.integrate(_lhs_integrand(d))
    terms = _breakdown(d, path)
    norms = terms.norms()
    return lhs, terms, relative_error(lhs, terms.total, norms.values())


def verify_expansion(A, psi, path: PathSpec, tol: float = 1e-4, h: float = DEFAULT_FD_STEP) -> ExpansionReport:
    """Compare both sides on ``path`` and on its refinement (intervals halved).

    Converged means the error dropped by at least 3x under refinement or is
    already at the finite-difference noise floor.
    """
    lhs, terms, err = _evaluate(A, psi, path, h)
    try:
        _, _, err2 = _evaluate(A, psi, path.refined(), h)
    except PathError:
        err2 = err
        log.warning("path cannot be refined; convergence not assessed")
    ratio = err / err2 if err2 > 0 else None
    converged = err <= NOISE_FLOOR or (ratio is not None and ratio >= 3.0) or err2 == 0.0
    return ExpansionReport(
        lhs,
        terms.total,
        err,
        err2,
        ratio,
        converged,
        bool(err <= tol),
        tol,
        path.n,
        terms.norms(),
        float(np.linalg.norm(terms.lorenz_defect)),
    )


# ---------------------------------------------------------------------------
# quadratic Dirac form


def quadratic_dirac_residual(A, psi, m: float, p, h: float = 1e-2, order: int = 2) -> np.ndarray:
    """[(i d - A)^2 - (i/2) gamma_m gamma_n F^{mn} - m^2] psi at point ``p``.

    The square expands to -box psi - i (d.A) psi - 2i A.d psi + A.A psi; all
    derivatives use central differences of the given order and step.
    """
    X = np.asarray(p, dtype=float).reshape(4, 1)
    fa = as_point_field(A)
    fp = as_point_field(psi)
    dpsi_fn = lambda Y: jacobian(fp, Y, h, order)  # noqa: E731
    psi0 = fp(X)[:, 0].astype(complex)
    dpsi = dpsi_fn(X)[..., 0]
    ddpsi = jacobian(dpsi_fn, X, h, order)[..., 0]
    a = fa(X)[:, 0]
    da = jacobian(fa, X, h, order)[..., 0]
    box_psi = np.einsum("m,mma->a", G_DIAG, ddpsi)
    a_low = G_DIAG * a
    div = np.trace(da)
    kinetic = -box_psi - 1j * div * psi0 - 2j * np.einsum("m,ma->a", a, dpsi) + (a @ a_low) * psi0
    F = _field_strength(da)
    spin = -0.5j * np.einsum("mnab,mn,b->a", GG_LOWER, F, psi0)
    return kinetic + spin - m**2 * psi0


def motion_equation_terms(A, psi, path: PathSpec, h: float = DEFAULT_FD_STEP) -> dict:
    """Labelled magnitudes of box psi + i * (expansion) at the path end; diagnostic only."""
    d = _path_data(A, psi, path, h)
    k = path.n - 1
    box_psi = np.einsum("m,mma->a", G_DIAG, d.ddpsi[..., k])
    local = _local_terms(d, k)
    integrals = {name: path.integrate(v) for name, v in _integrands(d).items()}
    dirac = {
        "box_psi": box_psi,
        "i_a_dot_dpsi": 1j * local["a_dot_dpsi"],
        "i_gg_f_psi": 1j * local["gg_f_psi"],
    }
    nonlocal_ = {"i_gg_ftilde_psi": 1j * local["gg_ftilde_psi"]}
    nonlocal_.update({f"i_{name}": 1j * v for name, v in integrals.items()})
    dn = {k: float(np.linalg.norm(v)) for k, v in dirac.items()}
    nn = {k: float(np.linalg.norm(v)) for k, v in nonlocal_.items()}
    dirac_norm = float(np.linalg.norm(sum(dirac.values())))
    nonlocal_norm = float(np.linalg.norm(sum(nonlocal_.values())))
    return {
        "dirac_terms": dn,
        "nonlocal_terms": nn,
        "mass_like_term": "i_a_dd_psi",
        "dirac_norm": dirac_norm,
        "nonlocal_norm": nonlocal_norm,
        "nonlocal_to_dirac": nonlocal_norm / dirac_norm if dirac_norm > 0 else None,
    }
