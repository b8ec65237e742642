"""Concrete metric models built from gauge potentials.

The U(1) model is the 4x4 matrix gamma0 + gamma0 gamma^mu A_mu with A_mu the
covariant potential, so ``A_0 = a0`` and ``A_k = -avec[k]``. Colour models
are 12x12 matrices on spinor (x) colour space.
"""

from __future__ import annotations

import enum
import logging
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .gamma_algebra import GAMMA, METRIC, PAULI

log = logging.getLogger(__name__)

GAMMA0 = GAMMA[0]
IDENTITY3 = np.eye(3, dtype=complex)
DEFAULT_REGION_TOL = 1e-6


def gell_mann() -> np.ndarray:
    """Standard Gell-Mann matrices, shape (9, 3, 3), with index 0 left as zeros.

    Index 0 is reserved for the U(3) generator; see :func:`u3_generators`.
    Normalisation tr(l_a l_b) = 2 delta_ab for a, b = 1..8.
    """
    lam = np.zeros((9, 3, 3), dtype=complex)
    lam[1][0, 1] = lam[1][1, 0] = 1
    lam[2][0, 1], lam[2][1, 0] = -1j, 1j
    lam[3][0, 0], lam[3][1, 1] = 1, -1
    lam[4][0, 2] = lam[4][2, 0] = 1
    lam[5][0, 2], lam[5][2, 0] = -1j, 1j
    lam[6][1, 2] = lam[6][2, 1] = 1
    lam[7][1, 2], lam[7][2, 1] = -1j, 1j
    lam[8] = np.diag([1, 1, -2]) / math.sqrt(3)
    return lam


def u3_generators() -> np.ndarray:
    """Gell-Mann matrices with lambda^0 = i I3 in slot 0."""
    lam = gell_mann()
    lam[0] = 1j * IDENTITY3
    return lam


LAMBDA = u3_generators()


@dataclass(frozen=True)
class PotentialSample:
    """Potential at one point in natural units.

    ``colour_coeffs[k-1, a]`` holds A^k_a for spatial k = 1..3 and generator
    a = 0..8, where generator 0 is the U(3) element i I3.
    """

    a0: float
    avec: tuple[float, float, float] = (0.0, 0.0, 0.0)
    colour_coeffs: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "avec", tuple(float(x) for x in self.avec))
        if len(self.avec) != 3:
            raise ValueError("avec must have three components")
        if self.colour_coeffs is not None:
            cc = np.asarray(self.colour_coeffs, dtype=float)
            if cc.shape != (3, 9):
                raise ValueError(f"colour_coeffs must have shape (3, 9), got {cc.shape}")
            object.__setattr__(self, "colour_coeffs", cc)

    @property
    def covariant(self) -> np.ndarray:
        """A_mu = (a0, -avec)."""
        return METRIC @ np.array([self.a0, *self.avec])

    @property
    def avec_sq(self) -> float:
        return float(np.dot(self.avec, self.avec))


@dataclass
class DiracMetric:
    m: np.ndarray
    sample: PotentialSample | None = None


class ColourMode(str, enum.Enum):
    PRODUCT = "product"
    ENTANGLED = "entangled"


@dataclass
class ColourMetric:
    m: np.ndarray
    mode: ColourMode


class RegionLabel(str, enum.Enum):
    BOUND = "BoundBoundary"
    FREE = "FreeBoundary"
    INTERIOR = "Interior"
    SINGULAR = "Singular"


@dataclass(frozen=True)
class RegionVerdict:
    d_value: float
    label: RegionLabel


def _require_u1(s: PotentialSample):
    if s.colour_coeffs is not None:
        raise ValueError("U(1) models take no colour coefficients")


def build_u1_metric(s: PotentialSample) -> DiracMetric:
    _require_u1(s)
    A = s.covariant
    m = GAMMA0 + sum(A[mu] * (GAMMA0 @ GAMMA[mu]) for mu in range(4))
    return DiracMetric(m, s)


def u1_block_form(s: PotentialSample) -> np.ndarray:
    """Closed block form [[(1+a0) I, -sigma.avec], [-sigma.avec, (a0-1) I]]."""
    sig = sum(a * PAULI[k] for k, a in enumerate(s.avec))
    eye = np.eye(2)
    return np.block([[(1 + s.a0) * eye, -sig], [-sig, (s.a0 - 1) * eye]]).astype(complex)


def build_scalar_metric(s: PotentialSample) -> DiracMetric:
    """Large-component approximation diag(1+a0, 1+a0, -1, -1)."""
    if math.sqrt(s.avec_sq) > 0.1 * abs(s.a0):
        warnings.warn(
            f"scalar approximation used with |avec| = {math.sqrt(s.avec_sq):.3g} > 0.1 |a0|",
            stacklevel=2,
        )
    return DiracMetric(np.diag([1 + s.a0, 1 + s.a0, -1, -1]).astype(complex), s)


@dataclass(frozen=True)
class DeterminantReport:
    d: float
    raw: complex

    @property
    def square_consistent(self) -> bool:
        return abs(self.raw - self.d**2) <= 1e-12 * max(1.0, abs(self.d) ** 2)


def physical_d(s: PotentialSample) -> float:
    return 1.0 - s.a0**2 + s.avec_sq


def metric_determinant(s: PotentialSample) -> DeterminantReport:
    """D = 1 - a0^2 + |avec|^2 and the dense 4x4 determinant, which is D^2."""
    return DeterminantReport(physical_d(s), complex(np.linalg.det(build_u1_metric(s).m)))


def log_determinants(s: PotentialSample) -> dict:
    """ln D and ln det of the 4x4 matrix; the latter is twice the former where D > 0."""
    rep = metric_determinant(s)
    out = {"d": rep.d, "raw": rep.raw.real}
    out["ln_d"] = math.log(rep.d) if rep.d > 0 else None
    out["ln_raw"] = math.log(abs(rep.raw)) if rep.raw != 0 else None
    log.debug("log-det pair %s", out)
    return out


def classify_d(d: float, tol: float = DEFAULT_REGION_TOL) -> RegionVerdict:
    if not tol > 0:
        raise ValueError("tol must be positive")
    if not math.isfinite(d):
        return RegionVerdict(d, RegionLabel.SINGULAR)
    if abs(d) <= tol:
        return RegionVerdict(d, RegionLabel.BOUND)
    if abs(d - 1.0) <= tol:
        return RegionVerdict(d, RegionLabel.FREE)
    return RegionVerdict(d, RegionLabel.INTERIOR)


def classify_region(s: PotentialSample, tol: float = DEFAULT_REGION_TOL) -> RegionVerdict:
    return classify_d(physical_d(s), tol)


def coulomb_sample(r: float, q: float = 1.0) -> PotentialSample:
    if r == 0:
        return PotentialSample(math.inf)
    return PotentialSample(q / r)


@dataclass
class SweepRow:
    r: float
    d: float
    label: RegionLabel


@dataclass
class RegionSweep:
    rows: list[SweepRow]
    bound_radius: float | None
    far_min_d: float | None

    def csv_rows(self) -> list[tuple]:
        return [(f"{row.r:.12g}", f"{row.d:.12g}", row.label.value) for row in self.rows]

    def summary(self) -> dict:
        counts: dict[str, int] = {}
        for row in self.rows:
            counts[row.label.value] = counts.get(row.label.value, 0) + 1
        return {
            "bound_radius": self.bound_radius,
            "far_min_d": self.far_min_d,
            "label_counts": dict(sorted(counts.items())),
            "n_rows": len(self.rows),
        }


def locate_bound_boundary(
    sample_at: Callable[[float], PotentialSample], r_lo: float, r_hi: float, xtol: float = 1e-12
) -> float | None:
    """Root of D(r) on [r_lo, r_hi] by Brent's method, or None without a sign change."""
    f = lambda r: physical_d(sample_at(r))  # noqa: E731
    flo, fhi = f(r_lo), f(r_hi)
    if flo == 0:
        return r_lo
    if fhi == 0:
        return r_hi
    if flo * fhi > 0:
        return None
    return float(brentq(f, r_lo, r_hi, xtol=xtol, rtol=4 * np.finfo(float).eps))


def coulomb_sweep(
    radii: Sequence[float], q: float = 1.0, tol: float = DEFAULT_REGION_TOL, far_radius: float = 32.0
) -> RegionSweep:
    """Classify A0 = q/r over ``radii`` and refine the D = 0 crossing."""
    radii = sorted(float(r) for r in radii)
    rows = []
    for r in radii:
        v = classify_region(coulomb_sample(r, q), tol)
        rows.append(SweepRow(r, v.d_value, v.label))
    positive = [r for r in radii if r > 0]
    bound = locate_bound_boundary(lambda r: coulomb_sample(r, q), positive[0], positive[-1]) if positive else None
    far = [row.d for row in rows if row.r >= far_radius]
    return RegionSweep(rows, bound, min(far) if far else None)


# ---------------------------------------------------------------------------
# Colour models


def colour_fields(s: PotentialSample) -> np.ndarray:
    """C^k = sum_a A^k_a lambda^a for k = 1..3, shape (3, 3, 3)."""
    if s.colour_coeffs is None:
        raise ValueError("colour model requested but the sample has no colour coefficients")
    return np.einsum("ka,aij->kij", s.colour_coeffs, LAMBDA)


def u3_extend(s: PotentialSample) -> dict:
    """Colour components A_k including the U(3) generator, with its properties."""
    comps = colour_fields(s)
    lam0 = LAMBDA[0]
    return {
        "components": comps,
        "lambda0_unitary": bool(np.allclose(lam0 @ lam0.conj().T, IDENTITY3)),
        "lambda0_hermitian": bool(np.allclose(lam0, lam0.conj().T)),
        "components_hermitian": [bool(np.allclose(c, c.conj().T)) for c in comps],
    }


def build_colour_metric(
    s: PotentialSample, mode: ColourMode | str, colour_block: np.ndarray | None = None
) -> ColourMetric:
    """12x12 colour metric.

    ``product``: U(1) spinor block (x) caller-supplied 3x3 ``colour_block``.
    ``entangled``: gamma0 (x) I3 + a0 I4 (x) I3 - sum_k gamma0 gamma^k (x) C^k,
    with the spatial colour matrices C^k carrying the coupling.
    """
    mode = ColourMode(mode)
    if mode is ColourMode.PRODUCT:
        if colour_block is None:
            raise ValueError("product mode needs a 3x3 colour block")
        q = np.asarray(colour_block, dtype=complex)
        if q.shape != (3, 3):
            raise ValueError(f"colour block must be 3x3, got {q.shape}")
        spin = build_u1_metric(PotentialSample(s.a0, s.avec)).m
        return ColourMetric(np.kron(spin, q), mode)
    comps = colour_fields(s)
    m = np.kron(GAMMA0, IDENTITY3) + s.a0 * np.eye(12)
    for k in range(3):
        m = m - np.kron(GAMMA0 @ GAMMA[k + 1], comps[k])
    return ColourMetric(m, mode)


def kron_det(p: np.ndarray, q: np.ndarray) -> complex:
    """det(P (x) Q) = det(P)^dim(Q) det(Q)^dim(P)."""
    return complex(np.linalg.det(p) ** q.shape[0] * np.linalg.det(q) ** p.shape[0])


def colour_logdet_split(p: np.ndarray, q: np.ndarray) -> dict:
    """ln det(P (x) Q) = 3 ln det P + 4 ln det Q for 4x4 P and 3x3 Q."""
    lp = np.log(complex(np.linalg.det(p)))
    lq = np.log(complex(np.linalg.det(q)))
    dense = np.linalg.slogdet(np.kron(p, q))
    return {
        "split": 3 * lp + 4 * lq,
        "dense_log_abs": float(dense[1]),
        "abs_match": bool(abs((3 * lp + 4 * lq).real - dense[1]) <= 1e-10 * max(1.0, abs(dense[1]))),
    }


@dataclass
class RankReport:
    rank: int
    size: int
    deficit: int
    singular_values: np.ndarray
    det: complex
    det_vanishes: bool


def colour_rank_analysis(cm: ColourMetric | np.ndarray, tol: float = 1e-10) -> RankReport:
    m = cm.m if isinstance(cm, ColourMetric) else np.asarray(cm, dtype=complex)
    sv = np.linalg.svd(m, compute_uv=False)
    thresh = tol * sv[0] if sv.size and sv[0] > 0 else tol
    rank = int(np.sum(sv > thresh))
    det = complex(np.linalg.det(m))
    return RankReport(rank, m.shape[0], m.shape[0] - rank, sv, det, abs(det) <= tol)


class Signature(str, enum.Enum):
    HYPERBOLIC = "hyperbolic"
    ELLIPTIC = "elliptic"
    DEGENERATE = "degenerate"


def signature_classify(m, tol: float = 1e-12) -> Signature:
    """Eigenvalue sign census of the Hermitian part of ``m``."""
    m = np.atleast_2d(np.asarray(m, dtype=complex))
    ev = np.linalg.eigvalsh(0.5 * (m + m.conj().T))
    if np.any(np.abs(ev) <= tol):
        return Signature.DEGENERATE
    if np.all(ev > 0) or np.all(ev < 0):
        return Signature.ELLIPTIC
    return Signature.HYPERBOLIC
