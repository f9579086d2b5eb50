"""Weak solution of a linear PDE with step-function coefficients.

The time-space rectangle [0, T[ x [-l, l[ is cut into cells
``[t_i, t_{i+1}[ x [x_j, x_{j+1}[`` and each coefficient ``A_n`` is constant
on every cell. Each space strip j is marched in time independently, starting
from the same global initial condition: inside a cell the solution is the
closed-form Fourier series of the constant-coefficient problem, and at every
``t_i`` the next cell's coefficients are stitched so the series agree. The
weak solution reads strip j's series only on ``[x_j, x_{j+1}[``.
"""
from __future__ import annotations

import bisect
import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import (
    DomainError,
    ProblemValidationError,
    SpectralOverflowError,
    UnavailableValueError,
)
from .propagator import (
    EXP_LIMIT,
    CellState,
    evolve_state,
    evolve_state_rate,
    make_cell,
    stitch_state,
)
from .spectral import (
    MAX_MODE,
    FourierState,
    OperatorCoefficients,
    spectral_pair,
    synthesize,
    wavenumber,
)

__all__ = [
    "StepProblem",
    "DivergenceNote",
    "PiecewiseSolution",
    "Field",
    "build",
    "check_divergence",
    "evaluate",
    "evaluate_on",
    "evaluate_grid",
    "residual",
    "spatial_operator_value",
    "tolerance_scale",
]

GROWTH = "growth"
OVERFLOW = "overflow"


def _finite(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _partition_violations(name, values, first, last):
    out = []
    if len(values) < 2:
        out.append(f"{name} needs at least two points, got {len(values)}")
        return out
    for idx, v in enumerate(values):
        if not _finite(v):
            out.append(f"{name}[{idx}] is not a finite number: {v!r}")
    if out:
        return out
    if first is not None and values[0] != first:
        out.append(f"{name} must start at {first!r}, got {values[0]!r}")
    if last is not None and values[-1] != last:
        out.append(f"{name} must end at {last!r}, got {values[-1]!r}")
    for idx in range(1, len(values)):
        if not values[idx] > values[idx - 1]:
            out.append(f"{name} not strictly increasing at index {idx}")
    return out


def problem_violations(l, T, time_partition, space_partition, order, coeffs,
                       initial) -> list[str]:
    """Every rule the raw problem data breaks; empty when the problem is valid."""
    out = []
    l_ok = _finite(l) and l > 0
    T_ok = _finite(T) and T > 0
    if not l_ok:
        out.append(f"l must be a positive finite number, got {l!r}")
    if not T_ok:
        out.append(f"T must be a positive finite number, got {T!r}")
    out += _partition_violations("time_partition", time_partition, 0.0, T if T_ok else None)
    out += _partition_violations("space_partition", space_partition,
                                 -l if l_ok else None, l if l_ok else None)

    order_ok = isinstance(order, int) and not isinstance(order, bool) and order >= 2 \
        and order % 2 == 0
    if not order_ok:
        out.append(f"order must be an even integer >= 2, got {order!r}")

    I, J = len(time_partition) - 1, len(space_partition) - 1
    if len(coeffs) != I:
        out.append(f"coefficients has {len(coeffs)} time rows, expected {I}")
    for i, row in enumerate(coeffs):
        if len(row) != J:
            out.append(f"coefficients[{i}] has {len(row)} space cells, expected {J}")
        for j, cell in enumerate(row):
            if order_ok and len(cell) != order + 1:
                out.append(
                    f"coefficients[{i}][{j}] has {len(cell)} entries, expected {order + 1}")
            for n, v in enumerate(cell):
                if not _finite(v):
                    out.append(f"coefficients[{i}][{j}][{n}] is not a finite number: {v!r}")

    if not isinstance(initial, FourierState):
        out.append("initial must be a FourierState")
    elif initial.K > MAX_MODE:
        out.append(f"initial condition carries {initial.K} modes, above the cap {MAX_MODE}")
    return out


@dataclass(frozen=True)
class StepProblem:
    """``dPsi/dt = sum_n A_n(t, x) d^n Psi/dx^n`` with piecewise-constant ``A_n``.

    ``coeffs[i][j][n]`` is ``A_n`` on the cell
    ``[time_partition[i], time_partition[i+1][ x [space_partition[j],
    space_partition[j+1][``.
    """

    l: float
    T: float
    time_partition: tuple[float, ...]
    space_partition: tuple[float, ...]
    order: int
    coeffs: tuple[tuple[tuple[float, ...], ...], ...]
    initial: FourierState

    def __post_init__(self):
        def num(v):
            return float(v) if isinstance(v, int) and not isinstance(v, bool) else v

        object.__setattr__(self, "l", num(self.l))
        object.__setattr__(self, "T", num(self.T))
        object.__setattr__(self, "time_partition", tuple(num(v) for v in self.time_partition))
        object.__setattr__(self, "space_partition", tuple(num(v) for v in self.space_partition))
        object.__setattr__(self, "coeffs", tuple(
            tuple(tuple(num(v) for v in cell) for cell in row) for row in self.coeffs))
        errors = problem_violations(self.l, self.T, self.time_partition,
                                    self.space_partition, self.order, self.coeffs,
                                    self.initial)
        if errors:
            raise ProblemValidationError(errors)

    @property
    def I(self) -> int:
        return len(self.time_partition) - 1

    @property
    def J(self) -> int:
        return len(self.space_partition) - 1

    def ops(self, i: int, j: int) -> OperatorCoefficients:
        return OperatorCoefficients(self.order, self.coeffs[i][j], self.l)

    def row_of(self, t: float) -> int:
        if not 0.0 <= t < self.T:
            raise DomainError(f"t={t} outside [0, {self.T}[")
        return bisect.bisect_right(self.time_partition, t) - 1

    def strip_of(self, x: float) -> int:
        if not -self.l <= x < self.l:
            raise DomainError(f"x={x} outside [{-self.l}, {self.l}[")
        return bisect.bisect_right(self.space_partition, x) - 1

    def to_dict(self) -> dict:
        """Document form, with only the nonzero initial modes listed."""
        return {
            "l": self.l,
            "T": self.T,
            "time_partition": list(self.time_partition),
            "space_partition": list(self.space_partition),
            "order": self.order,
            "coefficients": [[list(cell) for cell in row] for row in self.coeffs],
            "initial": {
                "half_c0": self.initial.half_c0,
                "modes": [{"k": k, "c": c, "d": d}
                          for k, (c, d) in enumerate(self.initial.modes, start=1)
                          if c != 0.0 or d != 0.0],
            },
        }

    def digest(self) -> str:
        payload = self.to_dict()
        payload["truncation"] = self.initial.K
        text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()


@dataclass(frozen=True)
class DivergenceNote:
    """A mode that grows inside a cell; ``overflow`` when it leaves double range."""

    cell: tuple[int, int]
    k: int
    sigma: float
    max_exponent: float
    severity: str

    @classmethod
    def for_growth(cls, cell, k, sigma, max_exponent):
        severity = OVERFLOW if max_exponent > EXP_LIMIT else GROWTH
        return cls(tuple(cell), k, sigma, max_exponent, severity)

    def __str__(self):
        i, j = self.cell
        return (f"{self.severity}: cell ({i},{j}) mode k={self.k} "
                f"sigma={self.sigma!r} max_exponent={self.max_exponent:.6g}")


def _sort_notes(notes):
    rank = {OVERFLOW: 0, GROWTH: 1}
    return sorted(notes, key=lambda n: (rank[n.severity], n.cell[1], n.cell[0], n.k))


@dataclass(frozen=True)
class PiecewiseSolution:
    """Per-strip cell states; ``strips[j][i]`` is None where stitching overflowed."""

    problem: StepProblem
    strips: tuple[tuple[Optional[CellState], ...], ...]
    notes: tuple[DivergenceNote, ...] = ()

    def cell(self, i: int, j: int) -> Optional[CellState]:
        return self.strips[j][i]

    def overflow_note(self, i: int, j: int) -> Optional[DivergenceNote]:
        for note in self.notes:
            if note.cell == (i, j) and note.severity == OVERFLOW:
                return note
        return None

    @property
    def truncation(self) -> int:
        return self.problem.initial.K


@dataclass
class Field:
    """Solution samples on a rectangular (t, x) grid.

    ``values[a, b]`` is Psi(t_values[a], x_values[b]); entries flagged in
    ``absent`` belong to overflowing cells and hold NaN.
    """

    t_values: np.ndarray
    x_values: np.ndarray
    values: np.ndarray
    absent: np.ndarray
    problem_hash: str = ""
    truncation: int = 0
    notes: tuple[DivergenceNote, ...] = field(default=())

    def __post_init__(self):
        self.t_values = np.asarray(self.t_values, dtype=float)
        self.x_values = np.asarray(self.x_values, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        self.absent = np.asarray(self.absent, dtype=bool)
        shape = (self.t_values.size, self.x_values.size)
        if self.values.shape != shape or self.absent.shape != shape:
            raise ValueError(
                f"values/absent must have shape {shape}, got {self.values.shape} "
                f"and {self.absent.shape}")
        if not np.all(np.isfinite(self.values[~self.absent])):
            raise ValueError("field contains non-finite values outside absent cells")

    @property
    def provenance(self) -> str:
        return f"problem {self.problem_hash[:12]} K={self.truncation}"


def _cell_notes(cs: CellState, i: int, j: int) -> list[DivergenceNote]:
    notes = []
    for k in cs.state.support():
        sigma = cs.pairs[k].sigma
        if sigma > 0.0:
            notes.append(DivergenceNote.for_growth((i, j), k, sigma, sigma * cs.t_end))
    return notes


def build(problem: StepProblem) -> PiecewiseSolution:
    """March every strip through its time rows, stitching at each interface."""
    tp = problem.time_partition
    strips, notes = [], []
    for j in range(problem.J):
        rows: list[Optional[CellState]] = []
        try:
            cs = make_cell(problem.initial, problem.ops(0, j), tp[0], tp[1])
            rows.append(cs)
            for i in range(1, problem.I):
                cs = stitch_state(cs, problem.ops(i, j), tp[i + 1])
                rows.append(cs)
        except SpectralOverflowError as exc:
            failed = len(rows)
            exponent = exc.exponent if exc.exponent is not None else math.inf
            for i in range(failed, problem.I):
                sigma = exc.sigma if exc.sigma is not None else math.nan
                notes.append(DivergenceNote((i, j), exc.k if exc.k is not None else -1,
                                            sigma, exponent, OVERFLOW))
            rows.extend([None] * (problem.I - failed))
        for i, cs in enumerate(rows):
            if cs is not None:
                notes.extend(_cell_notes(cs, i, j))
        strips.append(tuple(rows))
    return PiecewiseSolution(problem, tuple(strips), tuple(_sort_notes(notes)))


def check_divergence(problem: StepProblem) -> list[DivergenceNote]:
    """Predict growth and overflow without solving.

    Looks at every cell and every mode in the support of the initial
    condition (stitching never creates new modes).
    """
    support = problem.initial.support()
    notes = []
    for i in range(problem.I):
        t_end = problem.time_partition[i + 1]
        for j in range(problem.J):
            ops = problem.ops(i, j)
            for k in support:
                try:
                    sigma = spectral_pair(ops, k).sigma
                except SpectralOverflowError:
                    notes.append(DivergenceNote((i, j), k, math.inf, math.inf, OVERFLOW))
                    continue
                if sigma > 0.0:
                    notes.append(DivergenceNote.for_growth((i, j), k, sigma, sigma * t_end))
    return _sort_notes(notes)


def _available_cell(sol: PiecewiseSolution, i: int, j: int) -> CellState:
    cs = sol.cell(i, j)
    note = sol.overflow_note(i, j)
    if cs is None or note is not None:
        raise UnavailableValueError(f"cell ({i},{j}) overflows: {note}", note)
    return cs


def _evolve(cs, t, i, j):
    try:
        return evolve_state(cs, t)
    except SpectralOverflowError as exc:
        note = DivergenceNote((i, j), exc.k, exc.sigma, exc.exponent, OVERFLOW)
        raise UnavailableValueError(f"cell ({i},{j}) overflows at t={t}", note) from exc


def evaluate(sol: PiecewiseSolution, t: float, x: float) -> float:
    """Psi(t, x) read from the unique cell containing (t, x)."""
    problem = sol.problem
    i, j = problem.row_of(t), problem.strip_of(x)
    cs = _available_cell(sol, i, j)
    return synthesize(_evolve(cs, t, i, j), x, problem.l)


def evaluate_on(sol: PiecewiseSolution, t_values: Sequence[float],
                x_values: Sequence[float]) -> Field:
    """Sample the solution on the tensor grid ``t_values x x_values``."""
    problem = sol.problem
    t_arr = np.asarray(t_values, dtype=float)
    x_arr = np.asarray(x_values, dtype=float)
    strip_idx = np.array([problem.strip_of(float(x)) for x in x_arr], dtype=int)
    values = np.full((t_arr.size, x_arr.size), np.nan)
    absent = np.zeros(values.shape, dtype=bool)
    for a, t in enumerate(t_arr):
        i = problem.row_of(float(t))
        for j in np.unique(strip_idx):
            mask = strip_idx == j
            try:
                cs = _available_cell(sol, i, int(j))
                state = _evolve(cs, float(t), i, int(j))
            except UnavailableValueError:
                absent[a, mask] = True
                continue
            values[a, mask] = synthesize(state, x_arr[mask], problem.l)
    return Field(t_arr, x_arr, values, absent, problem.digest(), sol.truncation, sol.notes)


def evaluate_grid(sol: PiecewiseSolution, nt: int = 21, nx: int = 21,
                  x_range: Optional[tuple[float, float]] = None) -> Field:
    """Uniform grid over ``[0, T[ x [x0, x1[``, right endpoints excluded.

    ``x_range`` defaults to the whole period ``[-l, l[``.
    """
    if nt < 2 or nx < 2:
        raise ValueError(f"grid needs nt, nx >= 2, got nt={nt}, nx={nx}")
    problem = sol.problem
    x0, x1 = x_range if x_range is not None else (-problem.l, problem.l)
    if not -problem.l <= x0 < x1 <= problem.l:
        raise DomainError(f"x range [{x0}, {x1}[ not inside [{-problem.l}, {problem.l}[")
    t_values = problem.T * np.arange(nt) / nt
    x_values = x0 + (x1 - x0) * np.arange(nx) / nx
    return evaluate_on(sol, t_values, x_values)


def spatial_operator_value(state: FourierState, ops: OperatorCoefficients, x: float) -> float:
    """``sum_n A_n d^n/dx^n`` of the series, evaluated pointwise at ``x``.

    Works from the raw coefficients ``A_n``, never from the spectral pairs:
    the n-th derivative of ``c cos(lam x) + d sin(lam x)`` is the same
    expression with the phase shifted by ``n pi / 2`` and scaled by ``lam^n``.
    """
    terms = [ops.a[0] * state.half_c0]
    for k, (c, d) in enumerate(state.modes, start=1):
        if c == 0.0 and d == 0.0:
            continue
        lam = wavenumber(k, ops.l)
        co, si = math.cos(lam * x), math.sin(lam * x)
        # cos/sin of theta + n pi/2 for n mod 4 = 0, 1, 2, 3
        shifted = ((co, si), (-si, co), (-co, -si), (si, -co))
        power = 1.0
        for n, coeff in enumerate(ops.a):
            if n:
                power *= lam
            if coeff == 0.0:
                continue
            cs, ss = shifted[n % 4]
            terms.append(coeff * power * (c * cs + d * ss))
    return math.fsum(terms)


def residual(sol: PiecewiseSolution, t: float, x: float, dt: float) -> tuple[float, float]:
    """PDE residual at an interior point, as ``(analytic, finite_difference)``.

    The analytic residual uses the exact time derivative of the series; the
    finite-difference one replaces it with a central difference of step
    ``dt``. Both subtract the spatial operator evaluated from the raw
    coefficients.
    """
    problem = sol.problem
    if not dt > 0:
        raise DomainError(f"dt must be positive, got {dt}")
    i, j = problem.row_of(t), problem.strip_of(x)
    t_lo, t_hi = problem.time_partition[i], problem.time_partition[i + 1]
    if not (t - dt > t_lo and t + dt < t_hi):
        raise DomainError(f"t={t} is within dt={dt} of the cell boundary [{t_lo}, {t_hi}[")
    if x in problem.space_partition:
        raise DomainError(f"x={x} is a partition point")
    cs = _available_cell(sol, i, j)
    ops = problem.ops(i, j)
    spatial = spatial_operator_value(_evolve(cs, t, i, j), ops, x)
    rate = synthesize(evolve_state_rate(cs, t), x, problem.l)
    ahead = synthesize(_evolve(cs, t + dt, i, j), x, problem.l)
    behind = synthesize(_evolve(cs, t - dt, i, j), x, problem.l)
    return rate - spatial, (ahead - behind) / (2.0 * dt) - spatial


def tolerance_scale(sol: PiecewiseSolution) -> float:
    """Rounding scale of the PDE operator over all available cells.

    Max over cells of ``sum_n |A_n| (K pi / l)^n`` times the largest
    coefficient magnitude the cell reaches on its time interval.
    """
    problem = sol.problem
    lam = wavenumber(max(1, sol.truncation), problem.l)
    scale = 0.0
    for j, strip in enumerate(sol.strips):
        for i, cs in enumerate(strip):
            if cs is None or sol.overflow_note(i, j) is not None:
                continue
            amp = max(evolve_state(cs, cs.t_start).max_abs(), evolve_state(cs, cs.t_end).max_abs())
            weight = math.fsum(abs(a) * lam ** n for n, a in enumerate(problem.coeffs[i][j]))
            scale = max(scale, weight * amp)
    return scale
