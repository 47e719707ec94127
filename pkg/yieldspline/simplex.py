"""Dense two-phase simplex solver.

Problems are stated as::

    minimize    c . x
    subject to  A[k] . x  (<=, =, >=)  b[k]
                x >= lower            (lower may be -inf: free variable)

Finite lower bounds are shifted to zero and free variables are split into
a positive and a negative part before the tableau is built. Pivoting uses
Bland's rule (smallest eligible index) for both the entering and the
leaving variable, which rules out cycling.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from numpy.typing import ArrayLike, NDArray

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-9
DEFAULT_MAX_ITERATIONS = 10_000


class LinearProgramError(Exception):
    """Base class for linear program failures."""
    pass


class InfeasibleError(LinearProgramError):
    """No point satisfies every constraint."""
    pass


class UnboundedError(LinearProgramError):
    """The objective decreases without bound over the feasible set."""
    pass


class IterationLimitError(LinearProgramError):
    """Pivot budget exhausted before reaching optimality."""

    def __init__(self, message: str, phase: int, iterations: int):
        super().__init__(message)
        self.phase = phase
        self.iterations = iterations


class Relation(Enum):
    LE = "<="
    EQ = "="
    GE = ">="

    def flipped(self) -> Relation:
        if self is Relation.LE:
            return Relation.GE
        if self is Relation.GE:
            return Relation.LE
        return self


@dataclass(frozen=True)
class LinearProgram:
    objective: NDArray[np.float64]
    constraints: NDArray[np.float64]
    relations: tuple[Relation, ...]
    rhs: NDArray[np.float64]
    lower: NDArray[np.float64] | None = None

    def __post_init__(self):
        c = np.asarray(self.objective, dtype=float)
        a = np.asarray(self.constraints, dtype=float)
        b = np.asarray(self.rhs, dtype=float)
        if c.ndim != 1:
            raise LinearProgramError("Objective must be a vector")
        a = a.reshape(-1, len(c))
        if len(b) != len(a) or len(self.relations) != len(a):
            raise LinearProgramError(
                f"Constraint rows ({len(a)}), relations ({len(self.relations)}) "
                f"and right-hand sides ({len(b)}) disagree"
            )
        lower = np.full(len(c), -np.inf) if self.lower is None else np.asarray(self.lower, dtype=float)
        if lower.shape != c.shape:
            raise LinearProgramError(f"Expected {len(c)} lower bounds, got {lower.shape}")
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise LinearProgramError("Linear program entries must be finite")
        if np.any(lower == np.inf) or np.any(np.isnan(lower)):
            raise LinearProgramError("Lower bounds must be finite or -inf")
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "constraints", a)
        object.__setattr__(self, "rhs", b)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "relations", tuple(Relation(r) for r in self.relations))

    @property
    def n_variables(self) -> int:
        return len(self.objective)

    @property
    def n_constraints(self) -> int:
        return len(self.rhs)

    def residual(self, x: ArrayLike) -> float:
        """Largest constraint or bound violation at ``x``."""
        xx = np.asarray(x, dtype=float)
        ax = self.constraints @ xx - self.rhs
        worst = 0.0
        for value, rel in zip(ax, self.relations, strict=True):
            if rel is Relation.LE:
                worst = max(worst, value)
            elif rel is Relation.GE:
                worst = max(worst, -value)
            else:
                worst = max(worst, abs(value))
        finite = np.isfinite(self.lower)
        if np.any(finite):
            worst = max(worst, float(np.max(self.lower[finite] - xx[finite], initial=0.0)))
        return float(worst)


@dataclass
class SimplexResult:
    x: NDArray[np.float64]
    objective: float
    status: str = "optimal"
    phase1_iterations: int = 0
    phase2_iterations: int = 0
    basis: list[int] = field(default_factory=list)


class _Tableau:
    """Constraint rows ``[A | b]`` plus one reduced-cost row at the bottom."""

    def __init__(self, table: NDArray[np.float64], basis: list[int], tol: float):
        self.T = table
        self.basis = basis
        self.tol = tol

    @property
    def m(self) -> int:
        return self.T.shape[0] - 1

    def _pivot_col(self, allowed: int) -> int | None:
        costs = self.T[-1, :allowed]
        eligible = np.flatnonzero(costs < -self.tol)
        return int(eligible[0]) if len(eligible) else None

    def _pivot_row(self, col: int) -> int | None:
        column = self.T[:-1, col]
        best: int | None = None
        best_ratio = np.inf
        for r in np.flatnonzero(column > self.tol):
            ratio = self.T[r, -1] / column[r]
            if ratio < best_ratio - self.tol or (
                abs(ratio - best_ratio) <= self.tol and best is not None and self.basis[r] < self.basis[best]
            ):
                best, best_ratio = int(r), ratio
        return best

    def do_pivot(self, row: int, col: int) -> None:
        self.basis[row] = col
        self.T[row] /= self.T[row, col]
        factors = self.T[:, col].copy()
        factors[row] = 0.0
        self.T -= np.outer(factors, self.T[row])

    def run(self, allowed: int, max_iterations: int, phase: int) -> int:
        """Pivot until optimal over the first ``allowed`` columns; return the pivot count."""
        for nit in range(max_iterations):
            col = self._pivot_col(allowed)
            if col is None:
                return nit
            row = self._pivot_row(col)
            if row is None:
                raise UnboundedError(f"Objective unbounded along column {col} (phase {phase})")
            self.do_pivot(row, col)
        raise IterationLimitError(
            f"Simplex phase {phase} did not finish in {max_iterations} pivots",
            phase=phase,
            iterations=max_iterations,
        )


def _standard_form(lp: LinearProgram) -> tuple[NDArray[np.float64], NDArray[np.float64],
                                               list[Relation], NDArray[np.float64], NDArray[np.float64]]:
    """Shift bounds and split free variables; returns (c, A, relations, b, recover)."""
    lower = np.asarray(lp.lower)
    free = ~np.isfinite(lower)
    shift = np.where(free, 0.0, lower)

    n = lp.n_variables
    # recover maps standard-form columns back to the original variables
    recover = np.zeros((n, n + int(free.sum())))
    recover[:, :n] = np.eye(n)
    extra = n
    for j in np.flatnonzero(free):
        recover[j, extra] = -1.0
        extra += 1

    a = lp.constraints @ recover
    c = lp.objective @ recover
    b = lp.rhs - lp.constraints @ shift
    relations = list(lp.relations)
    for k in np.flatnonzero(b < 0.0):
        a[k] = -a[k]
        b[k] = -b[k]
        relations[k] = relations[k].flipped()
    return c, a, relations, b, recover


def simplex_solve(
    lp: LinearProgram,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
    tolerance: float = DEFAULT_TOLERANCE,
) -> SimplexResult:
    """Solve ``lp`` and return a basic optimal solution.

    Raises:
        InfeasibleError: If phase one ends with positive artificial cost
        UnboundedError: If an entering column has no positive entry
        IterationLimitError: If either phase runs out of pivots
    """
    c, a, relations, b, recover = _standard_form(lp)
    m, n = a.shape

    n_slack = sum(rel is not Relation.EQ for rel in relations)
    n_art = sum(rel is not Relation.LE for rel in relations)
    width = n + n_slack + n_art

    table = np.zeros((m + 1, width + 1))
    table[:m, :n] = a
    table[:m, -1] = b
    basis: list[int] = [0] * m
    slack, art = n, n + n_slack
    art_rows = []
    for k, rel in enumerate(relations):
        if rel is Relation.LE:
            table[k, slack] = 1.0
            basis[k] = slack
            slack += 1
            continue
        if rel is Relation.GE:
            table[k, slack] = -1.0
            slack += 1
        table[k, art] = 1.0
        basis[k] = art
        art_rows.append(k)
        art += 1

    tab = _Tableau(table, basis, tolerance)
    first = n + n_slack

    phase1 = 0
    if n_art:
        tab.T[-1, first:width] = 1.0
        for k in art_rows:
            tab.T[-1] -= tab.T[k]
        phase1 = tab.run(width, max_iterations, phase=1)
        infeasibility = -tab.T[-1, -1]
        if infeasibility > tolerance * max(1.0, float(np.max(np.abs(b), initial=0.0))):
            raise InfeasibleError(f"Linear program is infeasible (phase one cost {infeasibility:.3g})")

        # drive zero-level artificials out of the basis, dropping redundant rows
        redundant = []
        for r in range(m):
            if tab.basis[r] < first:
                continue
            candidates = np.flatnonzero(np.abs(tab.T[r, :first]) > tolerance)
            if len(candidates):
                tab.do_pivot(r, int(candidates[0]))
            else:
                redundant.append(r)
        if redundant:
            logger.debug(f"Dropping {len(redundant)} redundant constraint rows")
            keep = [r for r in range(m) if r not in redundant]
            tab.T = tab.T[keep + [m]]
            tab.basis = [tab.basis[r] for r in keep]

    # phase two on the original costs, artificial columns excluded
    rows = tab.m
    tab.T = np.delete(tab.T, np.s_[first:width], axis=1)
    costs = np.concatenate((c, np.zeros(n_slack)))
    cb = costs[tab.basis]
    tab.T[-1, :first] = costs - cb @ tab.T[:rows, :first]
    tab.T[-1, -1] = -cb @ tab.T[:rows, -1]
    phase2 = tab.run(first, max_iterations, phase=2)

    z = np.zeros(first)
    z[tab.basis] = tab.T[:rows, -1]
    lower = np.asarray(lp.lower)
    x = recover @ z[:recover.shape[1]] + np.where(np.isfinite(lower), lower, 0.0)
    objective = float(lp.objective @ x)
    logger.debug(
        f"Simplex solved {lp.n_variables} variables x {lp.n_constraints} constraints "
        f"in {phase1} + {phase2} pivots, objective {objective:.12g}"
    )
    return SimplexResult(
        x=x,
        objective=objective,
        phase1_iterations=phase1,
        phase2_iterations=phase2,
        basis=list(tab.basis),
    )
