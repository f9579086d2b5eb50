"""Fourier coefficient vectors on [-l, l[ and the operators acting on them.

A real trigonometric polynomial

    f(x) = c0/2 + sum_k c_k cos(k pi x / l) + d_k sin(k pi x / l)

is stored as the coefficient sequence (c0/2, c1, d1, ..., cK, dK). In this
basis d/dx acts block-diagonally: the constant mode is annihilated and mode k
is multiplied by the 2x2 block [[0, lam], [-lam, 0]] with lam = k pi / l.
A constant-coefficient operator sum_n A_n d^n/dx^n therefore collapses, per
mode, to sigma_k * I + omega_k * J with J = [[0, 1], [-1, 0]].
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidInputError, SpectralOverflowError

__all__ = [
    "MAX_MODE",
    "FourierState",
    "OperatorCoefficients",
    "SpectralPair",
    "wavenumber",
    "apply_fourier_derivative",
    "apply_operator_polynomial",
    "spectral_pair",
    "synthesize",
]

#: Highest mode index accepted by :func:`spectral_pair` unless overridden.
MAX_MODE = 512


def _check_finite(values, what):
    for v in values:
        if not math.isfinite(v):
            raise InvalidInputError(f"{what} contains a non-finite entry: {v!r}")


@dataclass(frozen=True)
class FourierState:
    """Truncated coefficient vector ``(c0/2, c1, d1, ..., cK, dK)``.

    Parameters
    ----------
    half_c0 : float
        The leading entry, i.e. half the zeroth cosine coefficient.
    modes : sequence of (float, float)
        ``(c_k, d_k)`` for ``k = 1..K``.
    """

    half_c0: float
    modes: tuple[tuple[float, float], ...]

    def __post_init__(self):
        half_c0 = float(self.half_c0)
        modes = tuple((float(c), float(d)) for c, d in self.modes)
        if len(modes) < 1:
            raise InvalidInputError("a FourierState needs at least one mode (K >= 1)")
        _check_finite([half_c0], "half_c0")
        _check_finite([v for pair in modes for v in pair], "modes")
        object.__setattr__(self, "half_c0", half_c0)
        object.__setattr__(self, "modes", modes)

    @property
    def K(self) -> int:
        return len(self.modes)

    @classmethod
    def zeros(cls, K: int) -> "FourierState":
        return cls(0.0, ((0.0, 0.0),) * K)

    @classmethod
    def from_vector(cls, vector) -> "FourierState":
        """Build from the flat layout ``[c0/2, c1, d1, c2, d2, ...]``."""
        v = np.asarray(vector, dtype=float)
        if v.ndim != 1 or v.size < 3 or v.size % 2 == 0:
            raise InvalidInputError(
                f"coefficient vector must have odd length >= 3, got shape {v.shape}")
        pairs = v[1:].reshape(-1, 2)
        return cls(float(v[0]), tuple((float(c), float(d)) for c, d in pairs))

    def as_vector(self) -> np.ndarray:
        out = np.empty(2 * self.K + 1)
        out[0] = self.half_c0
        out[1:] = np.asarray(self.modes).ravel()
        return out

    def support(self) -> list[int]:
        """Indices of modes with a nonzero coefficient; 0 stands for the constant."""
        ks = [0] if self.half_c0 != 0.0 else []
        ks.extend(k for k, (c, d) in enumerate(self.modes, start=1) if c != 0.0 or d != 0.0)
        return ks

    def highest_nonzero_mode(self) -> int:
        for k in range(self.K, 0, -1):
            c, d = self.modes[k - 1]
            if c != 0.0 or d != 0.0:
                return k
        return 0

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.as_vector())))


@dataclass(frozen=True)
class OperatorCoefficients:
    """Constant coefficients ``A_0..A_order`` of ``sum_n A_n d^n/dx^n`` on [-l, l[."""

    order: int
    a: tuple[float, ...]
    l: float

    def __post_init__(self):
        a = tuple(float(v) for v in self.a)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "l", float(self.l))
        if isinstance(self.order, bool) or int(self.order) != self.order:
            raise InvalidInputError(f"order must be an integer, got {self.order!r}")
        if self.order < 2 or self.order % 2:
            raise InvalidInputError(f"order must be an even integer >= 2, got {self.order}")
        if len(a) != self.order + 1:
            raise InvalidInputError(
                f"expected {self.order + 1} coefficients for order {self.order}, got {len(a)}")
        _check_finite(a, "operator coefficients")
        if not (math.isfinite(self.l) and self.l > 0):
            raise InvalidInputError(f"half-period l must be positive and finite, got {self.l}")

    @classmethod
    def from_list(cls, a: Sequence[float], l: float) -> "OperatorCoefficients":
        """Pad ``a`` with zeros up to the next even order."""
        a = list(a)
        order = max(2, len(a) - 1)
        order += order % 2
        return cls(order, tuple(a) + (0.0,) * (order + 1 - len(a)), l)


@dataclass(frozen=True)
class SpectralPair:
    """Growth rate ``sigma`` and rotation rate ``omega`` of mode ``k``."""

    sigma: float
    omega: float
    k: int

    def block(self) -> np.ndarray:
        return np.array([[self.sigma, self.omega], [-self.omega, self.sigma]])


def wavenumber(k: int, l: float) -> float:
    return k * math.pi / l


def spectral_pair(ops: OperatorCoefficients, k: int, mode_cap: int = MAX_MODE) -> SpectralPair:
    """Return ``(sigma_k, omega_k)`` for the operator ``ops``.

    Even-order coefficients feed sigma with alternating sign, odd-order ones
    feed omega::

        sigma_k = sum_{n=0}^{m}   (-1)^n A_{2n}   lam^{2n}
        omega_k = sum_{n=0}^{m-1} (-1)^n A_{2n+1} lam^{2n+1}

    with ``lam = k pi / l``. For ``k = 0`` the mode is a scalar and the pair is
    ``(A_0, 0)``.

    Raises
    ------
    SpectralOverflowError
        If a power ``lam^n`` (or a term ``A_n lam^n``) that multiplies a
        nonzero coefficient is not representable as a finite double.
    """
    if k < 0 or int(k) != k:
        raise InvalidInputError(f"mode index must be a nonnegative integer, got {k!r}")
    if k > mode_cap:
        raise InvalidInputError(f"mode {k} exceeds the mode cap {mode_cap}")
    if k == 0:
        return SpectralPair(ops.a[0], 0.0, 0)

    top = max((n for n, v in enumerate(ops.a) if v != 0.0), default=-1)
    lam = wavenumber(k, ops.l)
    even_terms, odd_terms = [], []
    power = 1.0
    for n in range(top + 1):
        if n:
            power *= lam
        if not math.isfinite(power):
            raise SpectralOverflowError(
                f"(k pi / l)^n overflows double precision at k={k}, n={n}", k=k, n=n)
        coeff = ops.a[n]
        if coeff == 0.0:
            continue
        sign = -1.0 if (n // 2) % 2 else 1.0
        term = sign * coeff * power
        if not math.isfinite(term):
            raise SpectralOverflowError(
                f"A_n (k pi / l)^n overflows double precision at k={k}, n={n}", k=k, n=n)
        (odd_terms if n % 2 else even_terms).append(term)

    # fsum is exactly rounded; high-order terms differ by many decades
    sigma = math.fsum(even_terms)
    omega = math.fsum(odd_terms)
    if not (math.isfinite(sigma) and math.isfinite(omega)):
        raise SpectralOverflowError(f"spectral pair sum overflows at k={k}", k=k)
    return SpectralPair(sigma, omega, k)


def apply_fourier_derivative(state: FourierState, l: float) -> FourierState:
    """Differentiate in coefficient space: ``(c_k, d_k) -> (lam d_k, -lam c_k)``."""
    if not (math.isfinite(l) and l > 0):
        raise InvalidInputError(f"half-period l must be positive and finite, got {l}")
    modes = []
    for k, (c, d) in enumerate(state.modes, start=1):
        lam = wavenumber(k, l)
        modes.append((lam * d, -lam * c))
    return FourierState(0.0, tuple(modes))


def apply_operator_polynomial(state: FourierState, ops: OperatorCoefficients) -> FourierState:
    """Apply ``sum_n A_n d^n/dx^n`` to the polynomial represented by ``state``.

    Mode ``k`` is multiplied by ``[[sigma_k, omega_k], [-omega_k, sigma_k]]``
    and the constant mode by ``A_0``.
    """
    modes = []
    for k, (c, d) in enumerate(state.modes, start=1):
        p = spectral_pair(ops, k)
        modes.append((p.sigma * c + p.omega * d, -p.omega * c + p.sigma * d))
    return FourierState(ops.a[0] * state.half_c0, tuple(modes))


def synthesize(state: FourierState, x, l: float):
    """Evaluate the trigonometric polynomial at ``x`` (scalar or array)."""
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    total = np.full(x_arr.shape, state.half_c0)
    for k, (c, d) in enumerate(state.modes, start=1):
        if c == 0.0 and d == 0.0:
            continue
        theta = wavenumber(k, l) * x_arr
        total = total + (c * np.cos(theta) + d * np.sin(theta))
    if np.ndim(x) == 0:
        return float(total[0])
    return total
