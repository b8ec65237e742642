"""Finite-difference field calculus on a uniform space-time grid.

Conventions: metric diag(+,-,-,-), A^mu = (A0, avec), E = -grad A0 - d avec/dt,
B = curl avec and F^{mu nu} = d^mu A^nu - d^nu A^mu, which makes F^{0i} = -E^i
and F^{ij} = -eps_ijk B^k. A time axis of length one marks a static field,
whose time derivatives are taken as zero.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .catalog import ClosedForm, SpinorForm
from .gamma_algebra import GAMMA, METRIC

log = logging.getLogger(__name__)

CATALOG_GAUGE_TOL = 1e-6
SAMPLED_GAUGE_TOL = 1e-3
MARGIN = 2


class GridError(ValueError):
    """Point too close to the boundary or region unusable."""


class GaugeError(ValueError):
    """Coulomb-gauge precondition violated."""


@dataclass(frozen=True)
class Grid4:
    dims: tuple[int, int, int, int]
    spacing: tuple[float, float, float, float]
    origin: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        spacing = tuple(float(h) for h in self.spacing)
        origin = tuple(float(o) for o in self.origin)
        if len(dims) != 4 or len(spacing) != 4 or len(origin) != 4:
            raise ValueError("Grid4 needs four dims, spacings and origin coordinates")
        if any(d < 1 for d in dims):
            raise ValueError("grid dims must be positive")
        if any(not h > 0 for h in spacing):
            raise ValueError("grid spacing must be positive")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "spacing", spacing)
        object.__setattr__(self, "origin", origin)

    @classmethod
    def centred(cls, centre: Sequence[float], half: Sequence[int] | int, spacing: Sequence[float] | float):
        """Grid with ``2*half+1`` points per axis around ``centre``; half = 0 gives a static axis."""
        half = (half,) * 4 if np.isscalar(half) else tuple(half)
        spacing = (spacing,) * 4 if np.isscalar(spacing) else tuple(spacing)
        dims = tuple(2 * n + 1 for n in half)
        origin = tuple(c - n * h for c, n, h in zip(centre, half, spacing))
        return cls(dims, spacing, origin)

    @property
    def centre_index(self) -> tuple[int, int, int, int]:
        return tuple(d // 2 for d in self.dims)

    def axes(self) -> list[np.ndarray]:
        return [o + h * np.arange(n) for o, h, n in zip(self.origin, self.spacing, self.dims)]

    def mesh(self) -> tuple[np.ndarray, ...]:
        return tuple(np.meshgrid(*self.axes(), indexing="ij"))

    def coords(self, idx) -> np.ndarray:
        return np.array([o + h * i for o, h, i in zip(self.origin, self.spacing, idx)])

    def index_of(self, point, atol: float = 1e-9) -> tuple[int, int, int, int]:
        idx = []
        for c, o, h, n in zip(point, self.origin, self.spacing, self.dims):
            k = (c - o) / h
            ki = int(round(k))
            if abs(k - ki) > atol or not 0 <= ki < n:
                raise GridError(f"point {tuple(point)} is not a grid node")
            idx.append(ki)
        return tuple(idx)

    def static_axes(self) -> tuple[bool, ...]:
        return tuple(n == 1 for n in self.dims)


@dataclass
class VecPotential:
    grid: Grid4
    a: np.ndarray
    source: str = "sampled"
    closed_form: ClosedForm | None = None
    gauge_tol: float = SAMPLED_GAUGE_TOL
    singular_points: tuple = ()

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=float)
        if self.a.shape != (4, *self.grid.dims):
            raise ValueError(f"potential array shape {self.a.shape} does not match grid {self.grid.dims}")
        bad = ~np.isfinite(self.a).all(axis=0)
        if bad.any() and (bad & ~self.singular_mask()).any():
            raise ValueError("potential has non-finite values outside the masked singular cells")

    @classmethod
    def from_closed_form(cls, grid: Grid4, cf: ClosedForm) -> "VecPotential":
        with np.errstate(divide="ignore", invalid="ignore"):
            a = cf(*grid.mesh())
        return cls(grid, a, f"catalog:{cf.name}", cf, CATALOG_GAUGE_TOL, tuple(cf.singular_points))

    def singular_mask(self) -> np.ndarray:
        """Cells within two spatial steps of a declared singular point."""
        mask = np.zeros(self.grid.dims, dtype=bool)
        if not self.singular_points:
            return mask
        _, x, y, z = self.grid.mesh()
        reach = 2.0 * max(self.grid.spacing[1:])
        for sx, sy, sz in self.singular_points:
            mask |= np.sqrt((x - sx) ** 2 + (y - sy) ** 2 + (z - sz) ** 2) <= reach + 1e-12
        return mask


@dataclass
class SpinorField:
    grid: Grid4
    psi: np.ndarray
    source: str = "sampled"

    def __post_init__(self):
        self.psi = np.asarray(self.psi, dtype=complex)
        if self.psi.shape != (4, *self.grid.dims):
            raise ValueError(f"spinor array shape {self.psi.shape} does not match grid {self.grid.dims}")

    @classmethod
    def from_closed_form(cls, grid: Grid4, sf: SpinorForm) -> "SpinorField":
        return cls(grid, sf(*grid.mesh()), f"catalog:{sf.name}")


# ---------------------------------------------------------------------------
# stencils on whole arrays; the last four axes are (t, x, y, z)


def _slice(ndim: int, axis: int, sl: slice) -> tuple:
    out = [slice(None)] * ndim
    out[axis] = sl
    return tuple(out)


def d1(f: np.ndarray, mu: int, h: float) -> np.ndarray:
    """Central first derivative along grid axis ``mu``; boundary cells are NaN."""
    axis = f.ndim - 4 + mu
    if f.shape[axis] == 1:
        return np.zeros_like(f)
    out = np.full(f.shape, np.nan, dtype=np.result_type(f, float))
    out[_slice(f.ndim, axis, slice(1, -1))] = (
        f[_slice(f.ndim, axis, slice(2, None))] - f[_slice(f.ndim, axis, slice(None, -2))]
    ) / (2.0 * h)
    return out


def d2(f: np.ndarray, mu: int, h: float) -> np.ndarray:
    axis = f.ndim - 4 + mu
    if f.shape[axis] == 1:
        return np.zeros_like(f)
    out = np.full(f.shape, np.nan, dtype=np.result_type(f, float))
    out[_slice(f.ndim, axis, slice(1, -1))] = (
        f[_slice(f.ndim, axis, slice(2, None))]
        - 2.0 * f[_slice(f.ndim, axis, slice(1, -1))]
        + f[_slice(f.ndim, axis, slice(None, -2))]
    ) / h**2
    return out


def gradient4(f: np.ndarray, grid: Grid4) -> np.ndarray:
    """Stack of d_mu f (lower index) along a new leading axis."""
    return np.stack([d1(f, mu, grid.spacing[mu]) for mu in range(4)])


def laplacian(f: np.ndarray, grid: Grid4) -> np.ndarray:
    return sum(d2(f, mu, grid.spacing[mu]) for mu in (1, 2, 3))


def box(f: np.ndarray, grid: Grid4) -> np.ndarray:
    """d_t^2 f - laplacian f."""
    return d2(f, 0, grid.spacing[0]) - laplacian(f, grid)


def _check_point(grid: Grid4, p) -> tuple[int, int, int, int]:
    p = tuple(int(i) for i in p)
    if len(p) != 4:
        raise GridError("grid point needs four indices")
    for i, n in zip(p, grid.dims):
        if n == 1:
            if i != 0:
                raise GridError("index on a static axis must be 0")
        elif not MARGIN <= i < n - MARGIN:
            raise GridError(f"point {p} is closer than {MARGIN} cells to the grid boundary {grid.dims}")
    return p


def _patch(grid: Grid4, arr: np.ndarray, p) -> tuple[Grid4, np.ndarray]:
    """5^4 neighbourhood of ``p`` (static axes kept at length one)."""
    p = _check_point(grid, p)
    sl = tuple(slice(0, 1) if n == 1 else slice(i - MARGIN, i + MARGIN + 1) for i, n in zip(p, grid.dims))
    sub = Grid4(
        tuple(1 if n == 1 else 2 * MARGIN + 1 for n in grid.dims),
        grid.spacing,
        tuple(grid.coords([s.start for s in sl])),
    )
    return sub, arr[(slice(None),) + sl]


def _centre(sub: Grid4, arr: np.ndarray):
    return arr[(...,) + sub.centre_index]


# ---------------------------------------------------------------------------
# field extraction


@dataclass(frozen=True)
class EMSample:
    e: np.ndarray
    b: np.ndarray

    @property
    def e2_minus_b2(self) -> float:
        return float(self.e @ self.e - self.b @ self.b)


def em_arrays(grid: Grid4, a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """E and B over the whole grid, shape (3, nt, nx, ny, nz) each."""
    da = np.stack([gradient4(a[nu], grid) for nu in range(4)])  # da[nu, mu] = d_mu A^nu
    e = np.stack([-da[0, i] - da[i, 0] for i in (1, 2, 3)])
    b = np.stack([da[3, 2] - da[2, 3], da[1, 3] - da[3, 1], da[2, 1] - da[1, 2]])
    return e, b


def em_fields(A: VecPotential, p) -> EMSample:
    sub, a = _patch(A.grid, A.a, p)
    e, b = em_arrays(sub, a)
    return EMSample(_centre(sub, e), _centre(sub, b))


def field_tensor_arrays(grid: Grid4, a: np.ndarray) -> np.ndarray:
    """F[mu, nu, ...] = d^mu A^nu - d^nu A^mu."""
    da = np.stack([gradient4(a[nu], grid) for nu in range(4)])  # [nu, mu] lower mu
    g = np.diag(METRIC).astype(float)
    up = g[None, :, None, None, None, None] * da  # up[nu, mu] = d^mu A^nu
    return np.transpose(up, (1, 0, 2, 3, 4, 5)) - up


def field_tensor(A: VecPotential, p) -> np.ndarray:
    sub, a = _patch(A.grid, A.a, p)
    return _centre(sub, field_tensor_arrays(sub, a))


def divergence3(grid: Grid4, a: np.ndarray) -> np.ndarray:
    return sum(d1(a[i], i, grid.spacing[i]) for i in (1, 2, 3))


def _require_transverse(A: VecPotential, sub: Grid4, a: np.ndarray) -> float:
    div = float(abs(_centre(sub, divergence3(sub, a))))
    if div > A.gauge_tol:
        raise GaugeError(f"|div avec| = {div:.3e} exceeds gauge tolerance {A.gauge_tol:.1e}")
    return div


# ---------------------------------------------------------------------------
# identities


@dataclass
class PoissonResult:
    max_residual: float
    n_cells: int
    n_masked: int
    location: tuple | None = None


def poisson_residual(
    A: VecPotential,
    r_range: tuple[float, float] | None = None,
    centre: Sequence[float] = (0.0, 0.0, 0.0),
    static_tol: float = 1e-12,
) -> PoissonResult:
    """max |laplacian A0| over interior cells with r in ``r_range`` (all interior cells if None)."""
    grid = A.grid
    a0 = A.a[0]
    if grid.dims[0] > 1:
        dt = d1(a0, 0, grid.spacing[0])
        if np.nanmax(np.abs(dt)) > static_tol:
            raise GridError("Poisson check needs a static scalar potential")
    lap = laplacian(a0, grid)
    region = np.isfinite(lap)
    if r_range is not None:
        _, x, y, z = grid.mesh()
        r = np.sqrt((x - centre[0]) ** 2 + (y - centre[1]) ** 2 + (z - centre[2]) ** 2)
        region &= (r >= r_range[0] - 1e-12) & (r <= r_range[1] + 1e-12)
    masked = region & A.singular_mask()
    usable = region & ~A.singular_mask()
    if not usable.any():
        raise GridError("no usable cells in the Poisson region")
    vals = np.where(usable, np.abs(lap), -np.inf)
    loc = np.unravel_index(int(np.argmax(vals)), vals.shape)
    return PoissonResult(float(vals[loc]), int(usable.sum()), int(masked.sum()), tuple(int(i) for i in loc))


@dataclass
class BoxIdentityResult:
    residual: float
    box_a2: float
    e2_minus_b2: float
    a_dot_box_a: float
    divergence: float


def box_identity_check(A: VecPotential, p) -> BoxIdentityResult:
    """|box(avec.avec) - 2(E^2 - B^2) - 2 avec.box(avec)| at ``p`` (Coulomb gauge required)."""
    sub, a = _patch(A.grid, A.a, p)
    div = _require_transverse(A, sub, a)
    vec = a[1:]
    box_a2 = _centre(sub, box(np.sum(vec**2, axis=0), sub))
    a_box_a = float(sum(_centre(sub, vec[i]) * _centre(sub, box(vec[i], sub)) for i in range(3)))
    e, b = em_arrays(sub, a)
    em = EMSample(_centre(sub, e), _centre(sub, b))
    res = abs(box_a2 - 2.0 * em.e2_minus_b2 - 2.0 * a_box_a)
    return BoxIdentityResult(float(res), float(box_a2), em.e2_minus_b2, a_box_a, div)


@dataclass
class TransverseResult:
    two_term: float
    one_term: float
    b2: float
    grad_sq: float
    cross: float


def transverse_identity_check(A: VecPotential, p) -> TransverseResult:
    """B^2 against sum (d_i A_j)^2 with and without the cross term sum d_i A_j d_j A_i."""
    sub, a = _patch(A.grid, A.a, p)
    _require_transverse(A, sub, a)
    g = np.array([[_centre(sub, d1(a[j], i, sub.spacing[i])) for j in (1, 2, 3)] for i in (1, 2, 3)])
    _, b = em_arrays(sub, a)
    b2 = float(np.sum(_centre(sub, b) ** 2))
    grad_sq = float(np.sum(g * g))
    cross = float(np.sum(g * g.T))
    return TransverseResult(abs(b2 - grad_sq + cross), abs(b2 - grad_sq), b2, grad_sq, cross)


@dataclass
class MassResult:
    values: np.ndarray
    median: float
    spread: float
    n_used: int
    constant: bool


def extract_mass(
    A: VecPotential, region: np.ndarray | None = None, threshold: float = 1e-8, constant_tol: float = 1e-6
) -> MassResult:
    """Pointwise m^2 = (E^2 - B^2)/|avec|^2 with the median as aggregate."""
    e, b = em_arrays(A.grid, A.a)
    a2 = np.sum(A.a[1:] ** 2, axis=0)
    use = np.isfinite(e).all(axis=0) & np.isfinite(b).all(axis=0) & (a2 > threshold)
    interior = np.zeros(A.grid.dims, dtype=bool)
    interior[tuple(slice(0, 1) if n == 1 else slice(MARGIN, n - MARGIN) for n in A.grid.dims)] = True
    use &= interior & ~A.singular_mask()
    if region is not None:
        use &= np.asarray(region, dtype=bool)
    if not use.any():
        raise GridError("|avec|^2 is below threshold at every usable cell; mass undefined")
    m2 = (np.sum(e**2, axis=0) - np.sum(b**2, axis=0))[use] / a2[use]
    spread = float(np.max(m2) - np.min(m2))
    return MassResult(m2, float(np.median(m2)), spread, int(use.sum()), spread <= constant_tol)


@dataclass
class LagrangianResult:
    residual: float
    standard_residual: float
    quarter_ff: float
    e2_minus_b2: float


def lagrangian_check(A: VecPotential, p) -> LagrangianResult:
    """Compare -F_{mu nu}F^{mu nu}/4 with -(E^2 - B^2)/2.

    ``residual`` is |-FF/4 + (E^2 - B^2)/2|. ``standard_residual`` is
    |-FF/4 - (E^2 - B^2)/2|, the combination that vanishes with the
    conventions fixed at the top of this module.
    """
    sub, a = _patch(A.grid, A.a, p)
    F = _centre(sub, field_tensor_arrays(sub, a))
    g = METRIC.astype(float)
    f_low = g @ F @ g
    lag = -0.25 * float(np.sum(f_low * F))
    e, b = em_arrays(sub, a)
    em = EMSample(_centre(sub, e), _centre(sub, b))
    return LagrangianResult(
        abs(lag + 0.5 * em.e2_minus_b2), abs(lag - 0.5 * em.e2_minus_b2), lag, em.e2_minus_b2
    )


def current_arrays(psi: np.ndarray) -> np.ndarray:
    """j^mu = psi^dagger gamma0 gamma^mu psi, shape (4, ...)."""
    g0g = np.einsum("ab,mbc->mac", GAMMA[0], GAMMA)
    return np.real(np.einsum("a...,mab,b...->m...", np.conj(psi), g0g, psi))


def current_divergence(psi: SpinorField, region: np.ndarray | None = None) -> float:
    """max |d_mu j^mu| over interior cells (optionally restricted to ``region``)."""
    grid = psi.grid
    j = current_arrays(psi.psi)
    div = sum(d1(j[mu], mu, grid.spacing[mu]) for mu in range(4))
    ok = np.isfinite(div)
    if region is not None:
        ok &= np.asarray(region, dtype=bool)
    if not ok.any():
        raise GridError("no interior cells for the current divergence")
    return float(np.max(np.abs(div[ok])))
