"""Closed-form potentials and spinors used as oracles.

Every potential is a vectorised callable ``f(t, x, y, z) -> (4, ...)`` real
array holding the contravariant components A^mu. Spinors map to ``(4, ...)``
complex arrays. Entries are created by name from a parameter dict so that
configuration files can select them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .gamma_algebra import PAULI

FieldFunc = Callable[..., np.ndarray]


@dataclass
class ClosedForm:
    name: str
    func: FieldFunc
    params: dict = field(default_factory=dict)
    static: bool = False
    singular_points: tuple = ()
    lorenz: bool | None = None

    def __call__(self, t, x, y, z) -> np.ndarray:
        return self.func(t, x, y, z)

    def at(self, point) -> np.ndarray:
        t, x, y, z = (np.asarray(c, dtype=float) for c in point)
        return self.func(t, x, y, z)


def _bcast(*comps):
    shape = np.broadcast_shapes(*(np.shape(c) for c in comps))
    return np.stack([np.broadcast_to(np.asarray(c, dtype=float), shape) for c in comps])


def _zero_like(t, x, y, z):
    return np.zeros(np.broadcast_shapes(np.shape(t), np.shape(x), np.shape(y), np.shape(z)))


def zero() -> ClosedForm:
    return ClosedForm("zero", lambda t, x, y, z: _bcast(*(_zero_like(t, x, y, z),) * 4), static=True, lorenz=True)


def constant(a0=0.0, ax=0.0, ay=0.0, az=0.0) -> ClosedForm:
    vals = (float(a0), float(ax), float(ay), float(az))

    def f(t, x, y, z):
        base = _zero_like(t, x, y, z)
        return _bcast(*(base + v for v in vals))

    return ClosedForm("constant", f, dict(a0=a0, ax=ax, ay=ay, az=az), static=True, lorenz=True)


def plane_wave(amplitude=1.0, k=1.0, direction=(0.0, 0.6, 0.8), polarization=(1.0, 0.0, 0.0)) -> ClosedForm:
    """Transverse vacuum wave avec = amplitude * pol * cos(k (n.r - t)), A0 = 0."""
    n = np.asarray(direction, dtype=float)
    n = n / np.linalg.norm(n)
    pol = np.asarray(polarization, dtype=float)
    pol = pol - np.dot(pol, n) * n
    if np.linalg.norm(pol) < 1e-12:
        raise ValueError("polarization must not be parallel to the propagation direction")
    pol = pol / np.linalg.norm(pol)

    def f(t, x, y, z):
        c = amplitude * np.cos(k * (n[0] * x + n[1] * y + n[2] * z - t))
        return _bcast(0.0 * c, pol[0] * c, pol[1] * c, pol[2] * c)

    return ClosedForm(
        "plane_wave",
        f,
        dict(amplitude=amplitude, k=k, direction=tuple(direction), polarization=tuple(polarization)),
        lorenz=True,
    )


def uniform_b_symmetric(bx=0.0, by=0.0, bz=1.0) -> ClosedForm:
    """Static uniform magnetic field in the symmetric gauge avec = B x r / 2."""
    b = np.array([bx, by, bz], dtype=float)

    def f(t, x, y, z):
        zero_ = _zero_like(t, x, y, z)
        x, y, z = (zero_ + c for c in (x, y, z))
        return _bcast(zero_, 0.5 * (b[1] * z - b[2] * y), 0.5 * (b[2] * x - b[0] * z), 0.5 * (b[0] * y - b[1] * x))

    return ClosedForm("uniform_b", f, dict(bx=bx, by=by, bz=bz), static=True, lorenz=True)


def uniform_b_landau(b=1.0) -> ClosedForm:
    """Uniform field B = b z-hat in the Landau gauge avec = (-b y, 0, 0)."""

    def f(t, x, y, z):
        zero_ = _zero_like(t, x, y, z)
        return _bcast(zero_, -b * (zero_ + y), zero_, zero_)

    return ClosedForm("uniform_b_landau", f, dict(b=b), static=True, lorenz=True)


def e_only(e0=1.0) -> ClosedForm:
    """Static uniform E = e0 x-hat from A0 = -e0 x."""

    def f(t, x, y, z):
        zero_ = _zero_like(t, x, y, z)
        return _bcast(-e0 * (zero_ + x), zero_, zero_, zero_)

    return ClosedForm("e_only", f, dict(e0=e0), static=True, lorenz=True)


def coulomb(q=1.0) -> ClosedForm:
    def f(t, x, y, z):
        zero_ = _zero_like(t, x, y, z)
        r = np.sqrt((zero_ + x) ** 2 + y**2 + z**2)
        with np.errstate(divide="ignore", invalid="ignore"):
            a0 = np.where(r > 0, q / np.where(r > 0, r, 1.0), np.inf)
        return _bcast(a0, zero_, zero_, zero_)

    return ClosedForm("coulomb", f, dict(q=q), static=True, singular_points=((0.0, 0.0, 0.0),), lorenz=True)


def x_squared() -> ClosedForm:
    def f(t, x, y, z):
        zero_ = _zero_like(t, x, y, z)
        return _bcast((zero_ + x) ** 2, zero_, zero_, zero_)

    return ClosedForm("x_squared", f, static=True, lorenz=True)


def linear_time(component=1) -> ClosedForm:
    """A^component = t, all others zero."""

    def f(t, x, y, z):
        zero_ = _zero_like(t, x, y, z)
        comps = [zero_] * 4
        comps[component] = zero_ + t
        return _bcast(*comps)

    return ClosedForm("linear_time", f, dict(component=component), lorenz=component != 0)


def oscillating_uniform(omega=1.0) -> ClosedForm:
    """Spatially uniform avec = (cos(omega t), 0, 0)."""

    def f(t, x, y, z):
        zero_ = _zero_like(t, x, y, z)
        return _bcast(zero_, zero_ + np.cos(omega * t), zero_, zero_)

    return ClosedForm("oscillating_uniform", f, dict(omega=omega), lorenz=True)


def _gaussian(t, x, y, z, centre, width):
    c = np.asarray(centre, dtype=float)
    r2 = (t - c[0]) ** 2 + (x - c[1]) ** 2 + (y - c[2]) ** 2 + (z - c[3]) ** 2
    return np.exp(-r2 / (2.0 * width**2))


DEFAULT_TWIST = (
    (0.0, 0.7, -0.4, 0.2),
    (-0.7, 0.0, 0.5, -0.3),
    (0.4, -0.5, 0.0, 0.6),
    (-0.2, 0.3, -0.6, 0.0),
)


def gaussian_lorenz(amplitude=1.0, width=0.8, centre=(0.0, 0.0, 0.0, 0.0), twist=DEFAULT_TWIST) -> ClosedForm:
    """Localised potential A^mu = amplitude * M[nu, mu] dG/dx^nu with M antisymmetric.

    Antisymmetry of M makes the four-divergence vanish identically. G is a
    Euclidean Gaussian in (t, x, y, z).
    """
    M = np.asarray(twist, dtype=float)
    if M.shape != (4, 4) or not np.allclose(M, -M.T):
        raise ValueError("twist must be an antisymmetric 4x4 matrix")
    c = np.asarray(centre, dtype=float)

    def f(t, x, y, z):
        g = _gaussian(t, x, y, z, c, width)
        coords = (t, x, y, z)
        grad = [-(coords[nu] - c[nu]) / width**2 * g for nu in range(4)]
        return amplitude * _bcast(*(sum(M[nu, mu] * grad[nu] for nu in range(4)) for mu in range(4)))

    return ClosedForm(
        "gaussian_lorenz",
        f,
        dict(amplitude=amplitude, width=width, centre=tuple(centre)),
        lorenz=True,
    )


def gaussian_plain(amplitude=1.0, width=0.8, centre=(0.0, 0.0, 0.0, 0.0), polarization=(0.3, 1.0, -0.5, 0.4)) -> ClosedForm:
    """A^mu = amplitude * pol^mu * G; not divergence free."""
    pol = np.asarray(polarization, dtype=float)

    def f(t, x, y, z):
        g = amplitude * _gaussian(t, x, y, z, centre, width)
        return _bcast(*(p * g for p in pol))

    return ClosedForm(
        "gaussian_plain",
        f,
        dict(amplitude=amplitude, width=width, centre=tuple(centre), polarization=tuple(polarization)),
        lorenz=False,
    )


def pure_gauge(amplitude=1.0, width=1.0) -> ClosedForm:
    """A^mu = d^mu chi for a Gaussian chi: F vanishes identically."""

    def f(t, x, y, z):
        chi = amplitude * _gaussian(t, x, y, z, (0, 0, 0, 0), width)
        coords = (t, x, y, z)
        sign = (1.0, -1.0, -1.0, -1.0)
        return _bcast(*(sign[mu] * (-coords[mu] / width**2) * chi for mu in range(4)))

    return ClosedForm("pure_gauge", f, dict(amplitude=amplitude, width=width), lorenz=False)


POTENTIALS: dict[str, Callable[..., ClosedForm]] = {
    "zero": zero,
    "constant": constant,
    "plane_wave": plane_wave,
    "uniform_b": uniform_b_symmetric,
    "uniform_b_landau": uniform_b_landau,
    "e_only": e_only,
    "coulomb": coulomb,
    "x_squared": x_squared,
    "linear_time": linear_time,
    "oscillating_uniform": oscillating_uniform,
    "gaussian_lorenz": gaussian_lorenz,
    "gaussian_plain": gaussian_plain,
    "pure_gauge": pure_gauge,
}


def potential(name: str, **params) -> ClosedForm:
    try:
        factory = POTENTIALS[name]
    except KeyError:
        raise KeyError(f"unknown potential {name!r}; choose from {sorted(POTENTIALS)}") from None
    return factory(**params)


# ---------------------------------------------------------------------------
# Spinors


def dirac_spinor(momentum, mass: float, spin: int = 0) -> tuple[np.ndarray, float]:
    """Positive-energy solution u of (gamma^mu p_mu - m) u = 0 and its energy."""
    p = np.asarray(momentum, dtype=float)
    energy = float(np.sqrt(mass**2 + p @ p))
    chi = np.zeros(2, dtype=complex)
    chi[spin] = 1.0
    sp = sum(p[k] * PAULI[k] for k in range(3))
    norm = np.sqrt(energy + mass)
    return np.concatenate([norm * chi, (sp @ chi) / norm]), energy


@dataclass
class SpinorForm:
    name: str
    func: FieldFunc
    params: dict = field(default_factory=dict)

    def __call__(self, t, x, y, z) -> np.ndarray:
        return self.func(t, x, y, z)

    def at(self, point) -> np.ndarray:
        t, x, y, z = (np.asarray(c, dtype=float) for c in point)
        return self.func(t, x, y, z)


def spinor_plane_wave(wavevector, amplitude) -> SpinorForm:
    """psi = amplitude * exp(-i k.x) with k.x = k^0 t - kvec.r."""
    k = np.asarray(wavevector, dtype=float)
    u = np.asarray(amplitude, dtype=complex)

    def f(t, x, y, z):
        phase = np.exp(-1j * (k[0] * t - k[1] * x - k[2] * y - k[3] * z))
        return u.reshape((4,) + (1,) * np.ndim(phase)) * phase

    return SpinorForm("plane_wave", f, dict(wavevector=tuple(k)))


def on_shell_plane_wave(momentum=(0.3, -0.2, 0.4), mass=1.0, shift=(0.0, 0.0, 0.0, 0.0), spin=0) -> SpinorForm:
    """Plane wave with kinetic momentum on shell in a constant potential ``shift`` (A^mu).

    Kinetic four-momentum p = (E, momentum) solves the free Dirac equation; the
    phase carries k = p + A so that (i d - A) acts as p on the exponential.
    """
    u, energy = dirac_spinor(momentum, mass, spin)
    p_up = np.array([energy, *momentum])
    k_up = p_up + np.asarray(shift, dtype=float)
    sf = spinor_plane_wave(k_up, u)
    sf.params.update(momentum=tuple(momentum), mass=mass, shift=tuple(shift), spin=spin)
    return sf


def spinor_gaussian(width=1.0, centre=(0.0, 0.0, 0.0, 0.0), carrier=(0.5, 0.2, -0.3, 0.1), amplitude=None) -> SpinorForm:
    """Gaussian envelope times a carrier wave exp(-i q.x) and a fixed spinor."""
    u = np.asarray(amplitude if amplitude is not None else (1.0, 0.5j, -0.3, 0.2 + 0.4j), dtype=complex)
    q = np.asarray(carrier, dtype=float)

    def f(t, x, y, z):
        g = _gaussian(t, x, y, z, centre, width)
        phase = np.exp(-1j * (q[0] * t - q[1] * x - q[2] * y - q[3] * z))
        env = g * phase
        return u.reshape((4,) + (1,) * np.ndim(env)) * env

    return SpinorForm("gaussian", f, dict(width=width, centre=tuple(centre), carrier=tuple(carrier)))


SPINORS: dict[str, Callable[..., SpinorForm]] = {
    "plane_wave": on_shell_plane_wave,
    "gaussian": spinor_gaussian,
}


def spinor(name: str, **params) -> SpinorForm:
    try:
        factory = SPINORS[name]
    except KeyError:
        raise KeyError(f"unknown spinor {name!r}; choose from {sorted(SPINORS)}") from None
    return factory(**params)
