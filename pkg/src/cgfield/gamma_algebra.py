"""Exact Dirac gamma-matrix algebra in the Dirac (standard) representation.

Entries are Gaussian rationals, so every identity here is checked with ``==``
rather than a tolerance. Float copies of the matrices (``GAMMA``,
``GAMMA_LOWER``, ``GAMMA5``) are exported for the numerical modules.

Conventions
-----------
* ``gamma(mu)`` is the contravariant matrix gamma^mu; gamma^0 = diag(1, 1, -1, -1).
* ``METRIC = diag(+1, -1, -1, -1)``; lower-index matrices gamma_mu = g_{mu nu} gamma^nu.
* ``gamma5() = i gamma^0 gamma^1 gamma^2 gamma^3``.
* Levi-Civita: eps^{0123} = +1, hence eps_{0123} = -1. This is the sign that makes
  gamma_s gamma_r gamma_l = -i eps_{s r l m} gamma5 gamma^m hold for distinct indices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np


class GaussianRational:
    """Complex number with rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @classmethod
    def coerce(cls, value) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, complex):
            return cls(Fraction(value.real), Fraction(value.imag))
        return cls(Fraction(value), 0)

    def __add__(self, other):
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return GaussianRational.coerce(other) - self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, other):
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = GaussianRational.coerce(other)
        den = o.re * o.re + o.im * o.im
        if den == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        num = self * o.conjugate()
        return GaussianRational(num.re / den, num.im / den)

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def __eq__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        if self.im == 0:
            return str(self.re)
        return f"({self.re}{'+' if self.im >= 0 else '-'}{abs(self.im)}i)"


I_UNIT = GaussianRational(0, 1)


def _exact(rows) -> np.ndarray:
    out = np.empty((4, 4), dtype=object)
    for a in range(4):
        for b in range(4):
            out[a, b] = GaussianRational.coerce(rows[a][b])
    return out


@dataclass(frozen=True, eq=False)
class CliffordElement:
    """A 4x4 Gaussian-rational matrix viewed as an element of the Dirac algebra.

    ``basis_coeffs`` (optional) holds the 16 coefficients over ``BASIS_LABELS``;
    when present the entries must equal the expansion.
    """

    entries: np.ndarray
    basis_coeffs: tuple | None = None

    def __post_init__(self):
        ent = np.asarray(self.entries, dtype=object)
        if ent.shape != (4, 4):
            raise ValueError(f"Clifford element must be 4x4, got {ent.shape}")
        fixed = np.empty((4, 4), dtype=object)
        for idx in np.ndindex(4, 4):
            fixed[idx] = GaussianRational.coerce(ent[idx])
        object.__setattr__(self, "entries", fixed)
        if self.basis_coeffs is not None:
            coeffs = tuple(GaussianRational.coerce(c) for c in self.basis_coeffs)
            if len(coeffs) != 16:
                raise ValueError("basis_coeffs needs 16 entries")
            object.__setattr__(self, "basis_coeffs", coeffs)
            if reconstruct(coeffs) != CliffordElement(fixed):
                raise ValueError("basis_coeffs do not reproduce entries")

    def __matmul__(self, other: "CliffordElement") -> "CliffordElement":
        return CliffordElement(self.entries.dot(other.entries))

    def __add__(self, other: "CliffordElement") -> "CliffordElement":
        return CliffordElement(self.entries + other.entries)

    def __sub__(self, other: "CliffordElement") -> "CliffordElement":
        return CliffordElement(self.entries - other.entries)

    def __neg__(self) -> "CliffordElement":
        return CliffordElement(-self.entries)

    def scale(self, c) -> "CliffordElement":
        c = GaussianRational.coerce(c)
        return CliffordElement(np.vectorize(lambda e: e * c, otypes=[object])(self.entries))

    def trace(self) -> GaussianRational:
        return sum((self.entries[i, i] for i in range(4)), GaussianRational())

    def __eq__(self, other):
        if not isinstance(other, CliffordElement):
            return NotImplemented
        return all(self.entries[idx] == other.entries[idx] for idx in np.ndindex(4, 4))

    def __hash__(self):
        return hash(tuple(self.entries.ravel()))

    def is_zero(self) -> bool:
        return not any(bool(e) for e in self.entries.ravel())

    def to_complex(self) -> np.ndarray:
        return np.array([[complex(e) for e in row] for row in self.entries], dtype=complex)


def identity() -> CliffordElement:
    return CliffordElement(_exact(np.eye(4, dtype=int).tolist()))


def zero() -> CliffordElement:
    return CliffordElement(_exact(np.zeros((4, 4), dtype=int).tolist()))


METRIC = np.diag([1, -1, -1, -1])

_i = 1j
_GAMMA_ROWS = (
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, -1, 0], [0, 0, 0, -1]],
    [[0, 0, 0, 1], [0, 0, 1, 0], [0, -1, 0, 0], [-1, 0, 0, 0]],
    [[0, 0, 0, -_i], [0, 0, _i, 0], [0, _i, 0, 0], [-_i, 0, 0, 0]],
    [[0, 0, 1, 0], [0, 0, 0, -1], [-1, 0, 0, 0], [0, 1, 0, 0]],
)
_GAMMA_EXACT = tuple(CliffordElement(_exact(rows)) for rows in _GAMMA_ROWS)


def _check_index(mu) -> int:
    if isinstance(mu, bool) or not isinstance(mu, (int, np.integer)) or not 0 <= mu <= 3:
        raise IndexError(f"Minkowski index must be an integer in 0..3, got {mu!r}")
    return int(mu)


def metric(mu: int, nu: int) -> int:
    return int(METRIC[_check_index(mu), _check_index(nu)])


def gamma(mu: int) -> CliffordElement:
    """Contravariant gamma^mu in the Dirac representation."""
    return _GAMMA_EXACT[_check_index(mu)]


def gamma_lower(mu: int) -> CliffordElement:
    mu = _check_index(mu)
    g = gamma(mu)
    return g if METRIC[mu, mu] > 0 else -g


def gamma5() -> CliffordElement:
    return (gamma(0) @ gamma(1) @ gamma(2) @ gamma(3)).scale(I_UNIT)


def anticommutator(a: CliffordElement, b: CliffordElement) -> CliffordElement:
    return a @ b + b @ a


def commutator(a: CliffordElement, b: CliffordElement) -> CliffordElement:
    return a @ b - b @ a


def _perm_sign(p: Sequence[int]) -> int:
    p = list(p)
    sign = 1
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


def levi_civita_upper(s: int, r: int, l: int, m: int) -> int:
    """eps^{srlm} with eps^{0123} = +1."""
    idx = (s, r, l, m)
    if len(set(idx)) < 4:
        return 0
    return _perm_sign(idx)


def levi_civita(s: int, r: int, l: int, m: int) -> int:
    """eps_{srlm}; lowering all four indices flips the sign, so eps_{0123} = -1."""
    return -levi_civita_upper(s, r, l, m)


LEVI_CIVITA = np.array(
    [[[[levi_civita(s, r, l, m) for m in range(4)] for l in range(4)] for r in range(4)] for s in range(4)],
    dtype=float,
)

# Basis of the Dirac algebra: I, gamma^mu, sigma^{mu nu} (mu<nu), gamma5 gamma^mu, gamma5.
BASIS_LABELS: tuple[str, ...] = (
    ("I",)
    + tuple(f"g{m}" for m in range(4))
    + tuple(f"s{m}{n}" for m, n in itertools.combinations(range(4), 2))
    + tuple(f"g5g{m}" for m in range(4))
    + ("g5",)
)


def sigma(mu: int, nu: int) -> CliffordElement:
    """sigma^{mu nu} = (i/2) [gamma^mu, gamma^nu]."""
    return commutator(gamma(mu), gamma(nu)).scale(GaussianRational(0, Fraction(1, 2)))


def basis() -> tuple[CliffordElement, ...]:
    g5 = gamma5()
    return (
        (identity(),)
        + tuple(gamma(m) for m in range(4))
        + tuple(sigma(m, n) for m, n in itertools.combinations(range(4), 2))
        + tuple(g5 @ gamma(m) for m in range(4))
        + (g5,)
    )


_BASIS = basis()


def _square_sign(b: CliffordElement) -> GaussianRational:
    sq = b @ b
    return sq.entries[0, 0]


# Every basis element squares to +I or -I, so B^{-1} = B / (B B)_{00}.
_BASIS_INV = tuple(b.scale(GaussianRational(1) / _square_sign(b)) for b in _BASIS)


def basis_expand(m: CliffordElement) -> tuple[GaussianRational, ...]:
    """Coefficients c_i with sum_i c_i B_i == m, via c_i = tr(B_i^{-1} m) / 4."""
    quarter = GaussianRational(Fraction(1, 4))
    return tuple((binv @ m).trace() * quarter for binv in _BASIS_INV)


def reconstruct(coeffs: Sequence) -> CliffordElement:
    if len(coeffs) != 16:
        raise ValueError("need 16 coefficients")
    out = zero()
    for c, b in zip(coeffs, _BASIS):
        c = GaussianRational.coerce(c)
        if c:
            out = out + b.scale(c)
    return out


def triple_decompose(sigma_: int, rho: int, lam: int) -> CliffordElement:
    """Right-hand side of the triple-product rule for lower-index gammas.

    All indices distinct: ``-i eps_{s r l m} gamma5 gamma^m``; otherwise
    ``g_{sr} gamma_l + g_{rl} gamma_s - g_{sl} gamma_r``. The result carries its
    basis coefficients, and equals gamma_s gamma_r gamma_l for every index triple.
    """
    s, r, l = (_check_index(i) for i in (sigma_, rho, lam))
    coeffs = [GaussianRational() for _ in range(16)]
    if len({s, r, l}) == 3:
        for m in range(4):
            e = levi_civita(s, r, l, m)
            if e:
                coeffs[BASIS_LABELS.index(f"g5g{m}")] += GaussianRational(0, -e)
    else:
        # gamma_k = g_kk gamma^k in the gamma^mu slots
        for k, w in ((l, metric(s, r)), (s, metric(r, l)), (r, -metric(s, l))):
            if w:
                coeffs[1 + k] += GaussianRational(w * metric(k, k))
    return CliffordElement(reconstruct(coeffs).entries, tuple(coeffs))


# Float copies for the numerical modules.
GAMMA = np.array([g.to_complex() for g in _GAMMA_EXACT])
GAMMA_LOWER = np.einsum("mn,nab->mab", METRIC.astype(float), GAMMA)
GAMMA5 = gamma5().to_complex()
PAULI = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex)


def selftest() -> list[dict]:
    """Exhaustive identity checks: 10 anticommutator pairs and 64 triple products."""
    records = []
    for mu, nu in itertools.combinations_with_replacement(range(4), 2):
        lhs = anticommutator(gamma(mu), gamma(nu))
        rhs = identity().scale(2 * metric(mu, nu))
        records.append({"name": f"anticommutator[{mu},{nu}]", "identity": "clifford-anticommutator", "pass": lhs == rhs})
    for s, r, l in itertools.product(range(4), repeat=3):
        direct = gamma_lower(s) @ gamma_lower(r) @ gamma_lower(l)
        records.append(
            {"name": f"triple[{s},{r},{l}]", "identity": "gamma-triple-product", "pass": direct == triple_decompose(s, r, l)}
        )
    return records
