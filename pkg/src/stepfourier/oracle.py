"""Finite-difference reference solver for operators of order <= 2.

Method of lines on a periodic grid over [-l, l[: second-order central
differences in x, classical RK4 in t, coefficients looked up per grid point
and per time row. Slow and low order on purpose; it shares no code path with
the spectral construction and exists only to cross-check it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, FDConfigError, UnsupportedOrderError
from .solver import Field, StepProblem
from .spectral import synthesize

__all__ = ["FDConfig", "ErrorReport", "fd_solve", "compare"]


@dataclass(frozen=True)
class FDConfig:
    nx: int = 256
    dt: float = 1e-4
    safety: float = 0.5

    def __post_init__(self):
        if self.nx < 16:
            raise FDConfigError(f"nx must be >= 16, got {self.nx}")
        if not self.dt > 0:
            raise FDConfigError(f"dt must be positive, got {self.dt}")


def _effective_order(problem: StepProblem) -> int:
    top = 0
    for row in problem.coeffs:
        for cell in row:
            for n, a in enumerate(cell):
                if a != 0.0:
                    top = max(top, n)
    return top


def _row_coefficients(problem: StepProblem, i: int, x: np.ndarray) -> np.ndarray:
    """Array of shape (3, nx): A_0, A_1, A_2 at every grid point for time row i."""
    strips = np.array([problem.strip_of(float(v)) for v in x])
    out = np.zeros((3, x.size))
    for n in range(3):
        out[n] = [problem.coeffs[i][j][n] for j in strips]
    return out


def fd_solve(problem: StepProblem, cfg: FDConfig, t_end: float) -> Field:
    """Integrate from t=0 to ``t_end`` and return the state at ``t_end``.

    Every time interface before ``t_end`` is hit exactly: each segment is
    split into ``round(length / dt)`` equal steps.
    """
    if _effective_order(problem) > 2:
        raise UnsupportedOrderError(
            f"finite-difference oracle needs order <= 2, problem uses order "
            f"{_effective_order(problem)}")
    if not 0.0 < t_end < problem.T:
        raise DomainError(f"t_end={t_end} must lie in ]0, {problem.T}[")

    l = problem.l
    dx = 2.0 * l / cfg.nx
    x = -l + dx * np.arange(cfg.nx)
    tp = problem.time_partition
    last_row = problem.row_of(t_end)
    rows = [_row_coefficients(problem, i, x) for i in range(last_row + 1)]

    max_diffusion = max(float(np.max(np.abs(r[2]))) for r in rows)
    if max_diffusion > 0.0:
        bound = cfg.safety * dx * dx / (2.0 * max_diffusion)
        if cfg.dt > bound:
            raise FDConfigError(
                f"dt={cfg.dt} exceeds the stability bound {bound:.3e} for nx={cfg.nx}")

    def rhs(u, coeff):
        up, um = np.roll(u, -1), np.roll(u, 1)
        return coeff[0] * u + coeff[1] * (up - um) / (2.0 * dx) \
            + coeff[2] * (up - 2.0 * u + um) / (dx * dx)

    u = synthesize(problem.initial, x, l)
    for i in range(last_row + 1):
        seg = min(tp[i + 1], t_end) - tp[i]
        n_steps = max(1, round(seg / cfg.dt))
        h = seg / n_steps
        coeff = rows[i]
        for _ in range(n_steps):
            k1 = rhs(u, coeff)
            k2 = rhs(u + 0.5 * h * k1, coeff)
            k3 = rhs(u + 0.5 * h * k2, coeff)
            k4 = rhs(u + h * k3, coeff)
            u = u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    return Field(np.array([t_end]), x, u[None, :], np.zeros((1, x.size), dtype=bool),
                 problem.digest(), problem.initial.K)


@dataclass(frozen=True)
class ErrorReport:
    max_error: float
    rms_error: float
    where: tuple[float, float]

    def __str__(self):
        return (f"max={self.max_error:.6e} rms={self.rms_error:.6e} "
                f"at t={self.where[0]!r} x={self.where[1]!r}")


def compare(spectral: Field, reference: Field) -> ErrorReport:
    """Max and root-mean-square difference over entries present in both fields."""
    if not (np.array_equal(spectral.t_values, reference.t_values)
            and np.array_equal(spectral.x_values, reference.x_values)):
        raise ValueError("fields are sampled on different grids")
    usable = ~(spectral.absent | reference.absent)
    if not usable.any():
        raise ValueError("no entries present in both fields")
    diff = np.where(usable, np.abs(spectral.values - reference.values), 0.0)
    a, b = np.unravel_index(int(np.argmax(diff)), diff.shape)
    rms = math.sqrt(float(np.sum(diff[usable] ** 2)) / int(usable.sum()))
    return ErrorReport(float(diff[a, b]), rms,
                       (float(spectral.t_values[a]), float(spectral.x_values[b])))
