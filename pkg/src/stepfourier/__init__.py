"""Explicit weak solutions of linear PDEs with step-function coefficients.

Solves ``dPsi/dt = sum_n A_n(t, x) d^n Psi/dx^n`` on ``[0, T[ x [-l, l[``
when every ``A_n`` is constant on the cells of a rectangular partition and
the initial condition is a trigonometric polynomial.
"""
from importlib import resources

from .errors import (
    DomainError,
    FDConfigError,
    InvalidInputError,
    ProblemSyntaxError,
    ProblemValidationError,
    SpectralOverflowError,
    StepFourierError,
    UnavailableValueError,
    UnsupportedOrderError,
)
from .oracle import FDConfig, ErrorReport, compare, fd_solve
from .problem_io import (
    ProblemDocument,
    Settings,
    emit_csv,
    emit_gnuplot,
    parse_document,
    parse_problem,
    serialize_document,
    serialize_problem,
)
from .propagator import (
    CellState,
    block_exp,
    evolve_mode,
    evolve_state,
    stitch_mode,
    stitch_zero_mode,
)
from .solver import (
    DivergenceNote,
    Field,
    PiecewiseSolution,
    StepProblem,
    build,
    check_divergence,
    evaluate,
    evaluate_grid,
    evaluate_on,
    residual,
    tolerance_scale,
)
from .spectral import (
    FourierState,
    OperatorCoefficients,
    SpectralPair,
    apply_fourier_derivative,
    apply_operator_polynomial,
    spectral_pair,
    synthesize,
)

__version__ = "0.1.0"


def fixture_path(name: str):
    """Path to a bundled problem document, e.g. ``fixture_path("ex3_3")``."""
    return resources.files(__package__).joinpath("fixtures", f"{name}.json")


def fixture_names() -> list[str]:
    folder = resources.files(__package__).joinpath("fixtures")
    return sorted(p.name[:-5] for p in folder.iterdir() if p.name.endswith(".json"))
