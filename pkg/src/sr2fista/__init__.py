"""Accelerated forward-backward splitting for composite, possibly weakly
convex, problems, with certificate checkers for its convergence bounds."""

from .exceptions import (ArgumentError, BacktrackingError, DivergenceError,
                         IllPosedProxError, InvariantViolation, NumericError,
                         SR2Error)
from .problem import (Optimum, ProblemSpec, ProxOracle, SmoothOracle,
                      check_gradient, diagonal_quadratic, evaluate_f, quadratic,
                      reformulate_convex, zero_regularizer)
from .schedule import ScheduleParams
from .solver import (Backtracking, SolveResult, SolverConfig, SolverState,
                     TraceRecord, ista_step, solve, sr2fista_backtracking_step,
                     sr2fista_step)

__version__ = "0.1.0"
