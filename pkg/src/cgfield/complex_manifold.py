"""Geometry of metric fields over complex coordinates.

Metrics are arbitrary callables ``z -> (n, n)`` complex arrays, with entry
``[g, a]`` holding the component A_{g-bar a}. All derivatives are Wirtinger
derivatives taken by central differences on the real and imaginary parts of
one coordinate at a time.

Index layout used throughout:

* connection ``gamma[i, b, a]``  = Gamma^b_{i a}   = (A^{-1} dA/dz^i)[b, a]
* Ricci ``ricci[a, b]``          = R_{a-bar b}     = d^2 ln det A / dzbar^a dz^b
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

log = logging.getLogger(__name__)

SINGULAR_DET = 1e-10


class GeometryError(ValueError):
    """Base class for failures while evaluating geometry at a point."""


class SingularMetricError(GeometryError):
    """det A fell below threshold: a physical-region singularity."""


class BranchCutError(GeometryError):
    """The phase of det A jumps inside a stencil, so ln det is not continuous there."""


class DerivativeError(GeometryError):
    pass


class HermitianPreconditionError(GeometryError):
    pass


@dataclass(frozen=True)
class DerivativeStencil:
    h: float = 1e-3
    order: int = 4

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("stencil step must be positive")
        if self.order not in (2, 4):
            raise ValueError("stencil order must be 2 or 4")

    def halved(self) -> "DerivativeStencil":
        return DerivativeStencil(self.h / 2, self.order)

    @property
    def taps(self) -> tuple[tuple[int, float], ...]:
        if self.order == 2:
            return ((-1, -0.5), (1, 0.5))
        return ((-2, 1 / 12), (-1, -2 / 3), (1, 2 / 3), (2, -1 / 12))


DEFAULT_STENCIL = DerivativeStencil()


@dataclass
class MetricField:
    """Callable metric ``z -> A(z)`` on an n-dimensional complex chart."""

    func: Callable[[np.ndarray], np.ndarray]
    dim: int
    hermitian: bool = False
    domain_note: str = ""
    name: str = "metric"

    def __call__(self, z) -> np.ndarray:
        z = as_point(z, self.dim)
        val = np.asarray(self.func(z), dtype=complex)
        if val.shape != (self.dim, self.dim):
            raise GeometryError(f"{self.name}: expected ({self.dim},{self.dim}) matrix, got {val.shape}")
        return val


def as_point(p, dim: int | None = None) -> np.ndarray:
    z = np.atleast_1d(np.asarray(p, dtype=complex))
    if z.ndim != 1 or z.size < 1:
        raise ValueError("a complex point is a non-empty 1-d coordinate tuple")
    if dim is not None and z.size != dim:
        raise ValueError(f"point has {z.size} coordinates, manifold has {dim}")
    return z


def holo_deriv(f, p, alpha: int, conjugate: bool = False, stencil: DerivativeStencil = DEFAULT_STENCIL):
    """Wirtinger derivative of ``f`` along coordinate ``alpha``.

    ``conjugate=False`` gives d/dz = (d/dx - i d/dy)/2, ``True`` gives
    d/dzbar = (d/dx + i d/dy)/2. Works for scalar- or array-valued ``f``.
    """
    z = as_point(p)
    if not 0 <= alpha < z.size:
        raise IndexError(f"coordinate index {alpha} out of range for dimension {z.size}")
    h = stencil.h
    dx = 0.0
    dy = 0.0
    for k, w in stencil.taps:
        zx = z.copy()
        zx[alpha] += k * h
        zy = z.copy()
        zy[alpha] += 1j * k * h
        try:
            dx = dx + w * np.asarray(f(zx), dtype=complex)
            dy = dy + w * np.asarray(f(zy), dtype=complex)
        except GeometryError:
            raise
        except Exception as exc:  # noqa: BLE001 - user callables fail in arbitrary ways
            raise DerivativeError(f"evaluation failed inside stencil at coordinate {alpha}: {exc}") from exc
    dx = dx / h
    dy = dy / h
    out = 0.5 * (dx + 1j * dy) if conjugate else 0.5 * (dx - 1j * dy)
    if not np.all(np.isfinite(out)):
        raise DerivativeError("non-finite derivative")
    return out[()] if np.ndim(out) == 0 else out


class AnalyticityResult(NamedTuple):
    analytic: bool
    residual: float


def check_analytic(f, p, tol: float = 1e-8, stencil: DerivativeStencil = DEFAULT_STENCIL) -> AnalyticityResult:
    """Cauchy-Riemann test: max over coordinates of |df/dzbar|."""
    z = as_point(p)
    res = max(float(np.max(np.abs(holo_deriv(f, z, a, True, stencil)))) for a in range(z.size))
    return AnalyticityResult(res <= tol, res)


def _checked_metric(A: MetricField, z) -> np.ndarray:
    m = A(z)
    d = np.linalg.det(m)
    if not np.isfinite(d) or abs(d) < SINGULAR_DET:
        raise SingularMetricError(
            f"{A.name}: physical-region singularity, |det A| = {abs(d):.3e} at z = {np.round(z, 12)}"
        )
    return m


def metric_derivatives(A: MetricField, p, stencil: DerivativeStencil = DEFAULT_STENCIL, conjugate: bool = False):
    """Stack of dA/dz^i (or dA/dzbar^i), shape (n, n, n) with the direction first."""
    z = as_point(p, A.dim)
    return np.array([holo_deriv(A, z, i, conjugate, stencil) for i in range(A.dim)])


def connection_from_metric(A: MetricField, p, stencil: DerivativeStencil = DEFAULT_STENCIL) -> np.ndarray:
    """Holomorphic connection ``gamma[i, b, a] = A^{b g-bar} dA_{g-bar a}/dz^i``.

    Mixed-type components vanish identically and are not represented.
    """
    z = as_point(p, A.dim)
    ainv = np.linalg.inv(_checked_metric(A, z))
    return np.einsum("bg,iga->iba", ainv, metric_derivatives(A, z, stencil))


def _transposed_connection(A: MetricField, p, stencil: DerivativeStencil) -> np.ndarray:
    """Connection acting on barred indices: (A^T)^{-1} dA^T/dz^i."""
    z = as_point(p, A.dim)
    ainv_t = np.linalg.inv(_checked_metric(A, z)).T
    dA = metric_derivatives(A, z, stencil)
    return np.einsum("bg,iag->iba", ainv_t, dA)


@dataclass
class CurvatureFamilies:
    """The four non-vanishing curvature families, each indexed ``[a, b, j, k]``.

    ``unbarred_jbar_k``  R^a_{b jbar k}        = d Gamma^a_{k b} / dzbar^j
    ``unbarred_j_kbar``  R^a_{b j kbar}        = -d Gamma^a_{j b} / dzbar^k
    ``barred_jbar_k``    R^abar_{bbar jbar k}  (same, barred connection)
    ``barred_j_kbar``    R^abar_{bbar j kbar}
    """

    unbarred_jbar_k: np.ndarray
    unbarred_j_kbar: np.ndarray
    barred_jbar_k: np.ndarray
    barred_j_kbar: np.ndarray

    def families(self) -> tuple[np.ndarray, ...]:
        return (self.unbarred_jbar_k, self.unbarred_j_kbar, self.barred_jbar_k, self.barred_j_kbar)

    def ricci_traces(self) -> tuple[np.ndarray, ...]:
        """Contract upper with first lower index; each result is indexed [j, k]."""
        return tuple(np.einsum("aajk->jk", f) for f in self.families())


def _dbar_connection(conn_fn, z, n, stencil):
    # dconn[j, i, b, a] = d conn[i, b, a] / dzbar^j
    return np.array([holo_deriv(conn_fn, z, j, True, stencil) for j in range(n)])


def curvature_components(A: MetricField, p, stencil: DerivativeStencil = DEFAULT_STENCIL) -> CurvatureFamilies:
    z = as_point(p, A.dim)
    n = A.dim
    d_hol = _dbar_connection(lambda q: connection_from_metric(A, q, stencil), z, n, stencil)
    d_bar = _dbar_connection(lambda q: _transposed_connection(A, q, stencil), z, n, stencil)
    # d[j, k, a, b] -> R[a, b, j, k]
    fam_a = np.einsum("jkab->abjk", d_hol)
    fam_c = np.einsum("jkab->abjk", d_bar)
    # R^a_{b j kbar} = -d_{kbar} Gamma^a_{j b}: swap roles of j and k
    fam_b = -np.einsum("kjab->abjk", d_hol)
    fam_d = -np.einsum("kjab->abjk", d_bar)
    return CurvatureFamilies(fam_a, fam_b, fam_c, fam_d)


def _logdet_function(A: MetricField, z0: np.ndarray):
    """ln det A with the phase continued from z0; raises on a branch jump."""
    d0 = np.linalg.det(_checked_metric(A, z0))
    phase0 = np.angle(d0)

    def f(q):
        d = np.linalg.det(_checked_metric(A, q))
        rel = np.angle(d / d0)
        if abs(rel) > np.pi / 2:
            raise BranchCutError(f"phase of det A jumps by {rel:.3f} rad inside the stencil")
        return np.log(abs(d)) + 1j * (phase0 + rel)

    return f


def ricci_logdet(A: MetricField, p, stencil: DerivativeStencil = DEFAULT_STENCIL) -> np.ndarray:
    """R[a, b] = d^2 ln det A / dzbar^a dz^b by nested Wirtinger differences."""
    z = as_point(p, A.dim)
    f = _logdet_function(A, z)
    n = A.dim
    out = np.empty((n, n), dtype=complex)
    for b in range(n):
        grad_b = lambda q, b=b: holo_deriv(f, q, b, False, stencil)  # noqa: E731
        for a in range(n):
            out[a, b] = holo_deriv(grad_b, z, a, True, stencil)
    return out


def connection_trace(A: MetricField, p, stencil: DerivativeStencil = DEFAULT_STENCIL) -> np.ndarray:
    """t[b] = Gamma^g_{b g}."""
    return np.einsum("bgg->b", connection_from_metric(A, p, stencil))


def ricci_via_connection(A: MetricField, p, stencil: DerivativeStencil = DEFAULT_STENCIL) -> np.ndarray:
    """R[a, b] = d(Gamma^g_{b g}) / dzbar^a; independent of the log-det route."""
    z = as_point(p, A.dim)
    trace_fn = lambda q: connection_trace(A, q, stencil)  # noqa: E731
    return np.array([holo_deriv(trace_fn, z, a, True, stencil) for a in range(A.dim)])


def ricci_antisymmetry_residual(A: MetricField, p, stencil: DerivativeStencil = DEFAULT_STENCIL) -> float:
    """max |R_{jbar k} + R_{k jbar}|.

    R_{jbar k} is the trace of the first curvature family. R_{k jbar} is taken
    from ln det A with the derivatives nested the other way round, so the two
    sides share no finite-difference data. The barred families are compared
    the same way against the conjugate traces.
    """
    z = as_point(p, A.dim)
    n = A.dim
    ta, tb, tc, td = curvature_components(A, z, stencil).ricci_traces()
    f = _logdet_function(A, z)
    mirror = np.empty((n, n), dtype=complex)  # mirror[k, j] = R_{k jbar}
    for j in range(n):
        dbar_j = lambda q, j=j: holo_deriv(f, q, j, True, stencil)  # noqa: E731
        for k in range(n):
            mirror[k, j] = -holo_deriv(dbar_j, z, k, False, stencil)
    res = max(
        np.max(np.abs(ta + mirror.T)),
        np.max(np.abs(tb - mirror)),
        np.max(np.abs(tc + td.T)),
    )
    return float(res)


def det_derivative_residual(A: MetricField, p, stencil: DerivativeStencil = DEFAULT_STENCIL) -> float:
    """max_nu |d(det A) - det A * tr(A^{-1} dA)| over holomorphic and antiholomorphic nu."""
    z = as_point(p, A.dim)
    m = _checked_metric(A, z)
    det = np.linalg.det(m)
    ainv = np.linalg.inv(m)
    detf = lambda q: np.linalg.det(A(q))  # noqa: E731
    worst = 0.0
    for conj in (False, True):
        dA = metric_derivatives(A, z, stencil, conj)
        for nu in range(A.dim):
            lhs = holo_deriv(detf, z, nu, conj, stencil)
            rhs = det * np.trace(ainv @ dA[nu])
            worst = max(worst, abs(lhs - rhs))
    return float(worst)


class CompatibilityResult(NamedTuple):
    residual: np.ndarray
    max_residual: float
    ok: bool


def check_metric_compatibility(
    A: MetricField, p, stencil: DerivativeStencil = DEFAULT_STENCIL, tol: float = 1e-6
) -> CompatibilityResult:
    """Residual of dA/dz^i = A Gamma_i per holomorphic direction.

    For metrics flagged Hermitian the antiholomorphic half, dA/dzbar^i =
    Gamma_i^dagger A, is checked too and stacked after the holomorphic part.
    """
    z = as_point(p, A.dim)
    m = _checked_metric(A, z)
    conn = connection_from_metric(A, z, stencil)
    res = metric_derivatives(A, z, stencil) - np.einsum("ga,iab->igb", m, conn)
    if A.hermitian:
        dbar = metric_derivatives(A, z, stencil, conjugate=True)
        res_bar = dbar - np.einsum("iab,bc->iac", np.conj(np.transpose(conn, (0, 2, 1))), m)
        res = np.concatenate([res, res_bar])
    worst = float(np.max(np.abs(res)))
    return CompatibilityResult(res, worst, worst <= tol)


class HermitianSymmetryResult(NamedTuple):
    symmetric: bool
    residual: float


def require_hermitian(A: MetricField, p, rtol: float = 1e-12) -> np.ndarray:
    m = A(p)
    scale = max(1.0, float(np.max(np.abs(m))))
    dev = float(np.max(np.abs(m - m.conj().T)))
    if dev > rtol * scale:
        raise HermitianPreconditionError(f"{A.name} is not Hermitian at the probe point (deviation {dev:.3e})")
    return m


def check_hermitian_symmetry(
    A: MetricField, p, stencil: DerivativeStencil = DEFAULT_STENCIL, tol: float = 1e-6
) -> HermitianSymmetryResult:
    """conj(R_{abar b}) against R_{a bbar} built from the conjugated connection trace."""
    z = as_point(p, A.dim)
    require_hermitian(A, z)
    ricci = ricci_logdet(A, z, stencil)
    conj_trace = lambda q: np.conj(connection_trace(A, q, stencil))  # noqa: E731
    # mirror[a, b] = d/dz^a conj(Gamma^g_{b g})
    mirror = np.array([holo_deriv(conj_trace, z, a, False, stencil) for a in range(A.dim)])
    res = float(np.max(np.abs(np.conj(ricci) - mirror)))
    return HermitianSymmetryResult(res <= tol, res)


@dataclass
class RicciIdentityResult:
    residual: float
    residual_half_step: float
    richardson_estimate: float
    torsion: float
    fd_order_insufficient: bool
    ok: bool


def _ricci_identity_residual(A: MetricField, z, stencil) -> tuple[float, float]:
    n = A.dim
    ric = ricci_logdet(A, z, stencil)
    conn = connection_from_metric(A, z, stencil)
    # dric[m, j, k] = d R_{jbar k} / dz^m
    dric = np.array([holo_deriv(lambda q: ricci_logdet(A, q, stencil), z, m, False, stencil) for m in range(n)])
    worst = 0.0
    for j in range(n):
        for k in range(n):
            for m in range(n):
                # R_{jbar k; m}: only the unbarred slot picks up a connection term
                first = dric[m, j, k] - np.dot(conn[m, :, k], ric[j, :])
                # R_{m jbar} = -R_{jbar m}
                second = -dric[k, j, m] + np.dot(conn[k, :, m], ric[j, :])
                worst = max(worst, abs(first + second))
    torsion = float(np.max(np.abs(conn - np.transpose(conn, (2, 1, 0))))) if n > 1 else 0.0
    return worst, torsion


def ricci_identity_check(
    A: MetricField, p, stencil: DerivativeStencil = DEFAULT_STENCIL, tol: float = 1e-4
) -> RicciIdentityResult:
    """Residual of R_{jbar k;m} + R_{m jbar;k} = 0, assuming zero torsion.

    Evaluated at ``h`` and ``h/2``; when the two disagree by more than ``tol``
    the stencil order is flagged insufficient.
    """
    z = as_point(p, A.dim)
    r1, torsion = _ricci_identity_residual(A, z, stencil)
    r2, _ = _ricci_identity_residual(A, z, stencil.halved())
    est = abs(r1 - r2)
    if torsion > 1e-6:
        log.info("%s: torsion %.2e, identity assumes a torsion-free connection", A.name, torsion)
    return RicciIdentityResult(r1, r2, est, torsion, est > tol, r1 <= tol and est <= tol)


@dataclass
class EinsteinForm:
    g: np.ndarray
    scalar: complex
    trace: complex
    expected_trace: complex


def scalar_curvature(A: MetricField, p, stencil: DerivativeStencil = DEFAULT_STENCIL) -> complex:
    z = as_point(p, A.dim)
    ainv = np.linalg.inv(_checked_metric(A, z))
    return complex(np.trace(ainv @ ricci_logdet(A, z, stencil)))


def einstein_form(A: MetricField, p, stencil: DerivativeStencil = DEFAULT_STENCIL) -> EinsteinForm:
    """G = A^{-1} Ric A^{-1} - R A^{-1}; its metric trace is R - n R."""
    z = as_point(p, A.dim)
    m = _checked_metric(A, z)
    ainv = np.linalg.inv(m)
    ric = ricci_logdet(A, z, stencil)
    R = complex(np.trace(ainv @ ric))
    G = ainv @ ric @ ainv - R * ainv
    return EinsteinForm(G, R, complex(np.trace(m @ G)), (1 - A.dim) * R)


@dataclass
class GeometryTensors:
    connection: np.ndarray
    curvature: CurvatureFamilies
    ricci: np.ndarray
    scalar: complex
    index_note: str = field(default="connection[i,b,a]=Gamma^b_{ia}; ricci[a,b]=R_{abar b}")


def geometry(A: MetricField, p, stencil: DerivativeStencil = DEFAULT_STENCIL) -> GeometryTensors:
    z = as_point(p, A.dim)
    return GeometryTensors(
        connection_from_metric(A, z, stencil),
        curvature_components(A, z, stencil),
        ricci_logdet(A, z, stencil),
        scalar_curvature(A, z, stencil),
    )


# ---------------------------------------------------------------------------
# Metric catalog


def constant_metric(m) -> MetricField:
    m = np.array(m, dtype=complex)
    return MetricField(
        lambda z: m, m.shape[0], hermitian=bool(np.allclose(m, m.conj().T)), name="constant"
    )


def exp_metric() -> MetricField:
    """n = 1 Kahler exemplar A = exp(z zbar); Gamma = zbar and R = 1 everywhere."""
    return MetricField(lambda z: np.array([[np.exp(z[0] * np.conj(z[0]))]]), 1, hermitian=True, name="exp-zzbar")


def diagonal_exp_metric(n: int = 2) -> MetricField:
    return MetricField(
        lambda z: np.diag(np.exp(z * np.conj(z))), n, hermitian=True, name=f"diag-exp-{n}"
    )


def random_hermitian_polynomial_metric(rng: np.random.Generator, n: int = 2, scale: float = 0.3) -> MetricField:
    """Hermitian metric M0 + sum(z B + zbar B^dagger) + sum zbar^a z^b C_ab.

    Positive definite for |z| below roughly 1 at the default ``scale``.
    """

    def cplx(*shape):
        return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)

    h0 = cplx(n, n)
    m0 = 3.0 * np.eye(n) + 0.5 * scale * (h0 + h0.conj().T)
    B = scale * cplx(n, n, n)
    X = scale * cplx(n, n, n, n)
    C = X + np.conj(np.transpose(X, (1, 0, 3, 2)))  # C[b,a] = C[a,b]^dagger

    def func(z):
        zb = np.conj(z)
        lin = np.einsum("a,aij->ij", z, B)
        quad = np.einsum("a,b,abij->ij", zb, z, C)
        return m0 + lin + lin.conj().T + quad

    return MetricField(func, n, hermitian=True, name="random-hermitian-poly")


def kahler_quartic_metric(H, eps: float = 0.2) -> MetricField:
    """Kahler metric from the potential K = |z|^2 + eps (zbar^T H z)^2, H Hermitian."""
    H = np.asarray(H, dtype=complex)
    n = H.shape[0]

    def func(z):
        zb = np.conj(z)
        q = np.real(zb @ H @ z)
        dq_dzbar = H @ z  # index g
        dq_dz = H.T @ zb  # index a
        return np.eye(n) + eps * (2.0 * np.outer(dq_dzbar, dq_dz) + 2.0 * q * H)

    return MetricField(func, n, hermitian=True, name="kahler-quartic")


def random_kahler_metric(rng: np.random.Generator, n: int = 2, eps: float = 0.2) -> MetricField:
    X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return kahler_quartic_metric(0.5 * (X + X.conj().T), eps)
