"""Closed-form time evolution of one cell and stitching across time interfaces.

Each Fourier mode evolves under the 2x2 generator ``[[sigma, omega],
[-omega, sigma]]`` whose exponential is a scaled rotation. Cell coefficients
use the absolute-time convention: the value of mode k at time t inside a cell
is ``exp(sigma t) R(omega t) (c, d)`` with t measured from 0, not from the
start of the cell. Crossing an interface t1 therefore means solving for the
new cell's (c, d) such that both cells agree at t1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidInputError, SpectralOverflowError
from .spectral import FourierState, OperatorCoefficients, SpectralPair, spectral_pair

__all__ = [
    "EXP_LIMIT",
    "CellState",
    "block_exp",
    "evolve_mode",
    "evolve_state",
    "evolve_state_rate",
    "make_cell",
    "stitch_zero_mode",
    "stitch_mode",
    "stitch_state",
]

#: Largest exponent argument accepted anywhere (ln(max double) is ~709.78).
EXP_LIMIT = 700.0


def _guarded_exp(arg, *, k=None, sigma=None, t=None):
    if arg > EXP_LIMIT:
        raise SpectralOverflowError(
            f"exponent {arg:.6g} exceeds {EXP_LIMIT:g} (k={k}, sigma={sigma}, t={t})",
            k=k, sigma=sigma, t=t, exponent=arg)
    return math.exp(arg)


@dataclass(frozen=True)
class CellState:
    """Coefficients and spectral pairs of one cell ``[t_start, t_end[``.

    ``state`` holds absolute-time coefficients; ``pairs[k]`` drives mode k,
    with ``pairs[0]`` the scalar constant mode.
    """

    state: FourierState
    pairs: tuple[SpectralPair, ...]
    t_start: float
    t_end: float

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(self.pairs))
        if not self.t_start < self.t_end:
            raise InvalidInputError(
                f"cell needs t_start < t_end, got [{self.t_start}, {self.t_end}]")
        if len(self.pairs) != self.state.K + 1:
            raise InvalidInputError(
                f"expected {self.state.K + 1} spectral pairs, got {len(self.pairs)}")
        for k, p in enumerate(self.pairs):
            if p.k != k:
                raise InvalidInputError(f"pairs[{k}] describes mode {p.k}")


def make_cell(state: FourierState, ops: OperatorCoefficients, t_start: float,
              t_end: float) -> CellState:
    pairs = tuple(spectral_pair(ops, k) for k in range(state.K + 1))
    return CellState(state, pairs, t_start, t_end)


def block_exp(p: SpectralPair, t: float) -> np.ndarray:
    """``exp(t [[sigma, omega], [-omega, sigma]])`` as a 2x2 array."""
    scale = _guarded_exp(p.sigma * t, k=p.k, sigma=p.sigma, t=t)
    co, si = math.cos(p.omega * t), math.sin(p.omega * t)
    return scale * np.array([[co, si], [-si, co]])


def evolve_mode(c: float, d: float, p: SpectralPair, t: float) -> tuple[float, float]:
    """Advance one mode to absolute time ``t``."""
    scale = _guarded_exp(p.sigma * t, k=p.k, sigma=p.sigma, t=t)
    co, si = math.cos(p.omega * t), math.sin(p.omega * t)
    return scale * (c * co + d * si), scale * (d * co - c * si)


def _check_inside(cs: CellState, t: float):
    if not cs.t_start <= t <= cs.t_end:
        raise DomainError(f"t={t} outside cell [{cs.t_start}, {cs.t_end}]")


def evolve_state(cs: CellState, t: float, *, skip_zero_modes: bool = True) -> FourierState:
    """Coefficients of the cell's solution at absolute time ``t``.

    Modes whose coefficients are exactly zero are left at zero without
    touching their exponential; a growing zero mode would otherwise turn
    into ``0 * inf``. Pass ``skip_zero_modes=False`` to evolve them anyway
    (the overflow guard then fires instead).
    """
    _check_inside(cs, t)
    half_c0 = cs.state.half_c0
    if half_c0 != 0.0 or not skip_zero_modes:
        p0 = cs.pairs[0]
        half_c0 = half_c0 * _guarded_exp(p0.sigma * t, k=0, sigma=p0.sigma, t=t)
    modes = []
    for k, (c, d) in enumerate(cs.state.modes, start=1):
        if skip_zero_modes and c == 0.0 and d == 0.0:
            modes.append((0.0, 0.0))
        else:
            modes.append(evolve_mode(c, d, cs.pairs[k], t))
    return FourierState(half_c0, tuple(modes))


def evolve_state_rate(cs: CellState, t: float) -> FourierState:
    """Exact time derivative of :func:`evolve_state` at ``t``.

    d/dt of ``e^{st}(c cos wt + d sin wt)`` is
    ``s e^{st}(c cos wt + d sin wt) + w e^{st}(d cos wt - c sin wt)``.
    """
    _check_inside(cs, t)
    p0 = cs.pairs[0]
    half_c0 = 0.0
    if cs.state.half_c0 != 0.0:
        half_c0 = p0.sigma * cs.state.half_c0 * _guarded_exp(p0.sigma * t, k=0, sigma=p0.sigma, t=t)
    modes = []
    for k, (c, d) in enumerate(cs.state.modes, start=1):
        if c == 0.0 and d == 0.0:
            modes.append((0.0, 0.0))
            continue
        p = cs.pairs[k]
        ct, dt = evolve_mode(c, d, p, t)
        modes.append((p.sigma * ct + p.omega * dt, p.sigma * dt - p.omega * ct))
    return FourierState(half_c0, tuple(modes))


def stitch_zero_mode(half_c0_prev: float, A0_prev: float, A0_next: float, t1: float) -> float:
    """Constant-mode coefficient of the next cell so both cells agree at ``t1``."""
    if half_c0_prev == 0.0:
        return 0.0
    return half_c0_prev * _guarded_exp(t1 * (A0_prev - A0_next), k=0, sigma=A0_next, t=t1)


def stitch_mode(c: float, d: float, p_prev: SpectralPair, p_next: SpectralPair,
                t1: float) -> tuple[float, float]:
    """Absolute-time coefficients of mode k in the next cell.

    With ``g = exp((sigma_prev - sigma_next) t1)`` the target values are

        a = g (c cos(w_prev t1) + d sin(w_prev t1))
        b = g (d cos(w_prev t1) - c sin(w_prev t1))

    and the 2x2 rotation system is inverted in closed form::

        c' = a cos(w_next t1) - b sin(w_next t1)
        d' = b cos(w_next t1) + a sin(w_next t1)
    """
    if c == 0.0 and d == 0.0:
        return 0.0, 0.0
    g = _guarded_exp((p_prev.sigma - p_next.sigma) * t1, k=p_next.k, sigma=p_next.sigma, t=t1)
    co_p, si_p = math.cos(p_prev.omega * t1), math.sin(p_prev.omega * t1)
    a = g * (c * co_p + d * si_p)
    b = g * (d * co_p - c * si_p)
    co_n, si_n = math.cos(p_next.omega * t1), math.sin(p_next.omega * t1)
    c_new = a * co_n - b * si_n
    d_new = b * co_n + a * si_n
    if not (math.isfinite(c_new) and math.isfinite(d_new)):
        raise SpectralOverflowError(
            f"stitched coefficients of mode {p_next.k} overflow at t1={t1}",
            k=p_next.k, sigma=p_next.sigma, t=t1, exponent=(p_prev.sigma - p_next.sigma) * t1)
    return c_new, d_new


def stitch_state(prev: CellState, ops_next: OperatorCoefficients, t_end: float) -> CellState:
    """Build the cell following ``prev`` at the interface ``prev.t_end``."""
    t1 = prev.t_end
    nxt_pairs = tuple(spectral_pair(ops_next, k) for k in range(prev.state.K + 1))
    half_c0 = stitch_zero_mode(prev.state.half_c0, prev.pairs[0].sigma, nxt_pairs[0].sigma, t1)
    modes = tuple(
        stitch_mode(c, d, prev.pairs[k], nxt_pairs[k], t1)
        for k, (c, d) in enumerate(prev.state.modes, start=1)
    )
    return CellState(FourierState(half_c0, modes), nxt_pairs, t1, t_end)
