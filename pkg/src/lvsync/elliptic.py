"""Logistic steady state: Δθ + θ(a - θ) = 0 with zero Dirichlet boundary.

A positive solution exists iff the growth rate is supercritical, i.e. the
principal eigenvalue λ1(a) of -(Δ + a) is negative (for constant a this is
a > λ1 of -Δ). The solver gates on that condition and raises
SubcriticalError otherwise: below the threshold only θ ≡ 0 solves the
problem and silently returning it would be misleading.

Newton linearization: J(θ)δ = -(Δθ + θ(a-θ)) with J(θ) = Δ + diag(a - 2θ),
damped by step halving whenever the residual fails to decrease or an
iterate loses positivity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .grid import Field, Grid, GridMismatchError, assemble_operator, l2_norm
from .spectral import principal_eigenpair

__all__ = [
    "LogisticSolution",
    "SubcriticalError",
    "NewtonDivergenceError",
    "solve_logistic",
    "logistic_residual",
    "uniqueness_probe",
    "UniquenessReport",
]

DEFAULT_TOL = 1e-10
MAX_NEWTON = 60
MAX_HALVINGS = 30


class SubcriticalError(ValueError):
    """Growth rate below the principal eigenvalue: only θ=0 exists."""

    def __init__(self, lambda1: float):
        super().__init__(
            f"subcritical: lambda1(a) = {lambda1:.6g} >= 0, no positive steady state"
        )
        self.lambda1 = lambda1


class NewtonDivergenceError(RuntimeError):
    """Newton iteration failed; carries the residual trace."""

    def __init__(self, message: str, trace: list[float]):
        super().__init__(message + f" (residual trace: {['%.3e' % r for r in trace]})")
        self.trace = trace


@dataclass(frozen=True)
class LogisticSolution:
    """Positive solution of the logistic problem with solver diagnostics."""

    theta: Field
    a: Field
    residual_norm: float
    newton_iterations: int
    lambda1_of_a: float


def _as_field(grid: Grid, a) -> Field:
    if isinstance(a, Field):
        if a.grid != grid:
            raise GridMismatchError("growth rate lives on a different grid")
        return a
    return Field.constant(grid, float(a))


def logistic_residual(theta: Field, a) -> float:
    """L2 norm of the discrete residual Δθ + θ(a - θ)."""
    a = _as_field(theta.grid, a)
    op = assemble_operator(theta.grid, a - theta)
    return l2_norm(op.apply(theta))


def _residual_vec(lap: sp.spmatrix, theta: np.ndarray, a: np.ndarray) -> np.ndarray:
    return lap @ theta + theta * (a - theta)


def _newton(
    grid: Grid,
    a_vals: np.ndarray,
    theta0: np.ndarray,
    tol: float,
    enforce_positive: bool,
    max_iter: int = MAX_NEWTON,
) -> tuple[np.ndarray, float, int, list[float]]:
    """Damped Newton on the logistic residual. Returns (theta, res, iters, trace).

    With enforce_positive, steps that drive any node nonpositive are damped;
    hitting the damping floor is a hard failure. Without it (uniqueness
    probe), iterates may roam through zero and sign changes.
    """
    from .grid import _laplacian  # shared cached stencil

    lap = _laplacian(grid.domain)
    vol = np.sqrt(grid.cell_volume)
    theta = theta0.copy()
    res = float(np.linalg.norm(_residual_vec(lap, theta, a_vals)) * vol)
    trace = [res]
    for it in range(1, max_iter + 1):
        if res <= tol:
            return theta, res, it - 1, trace
        J = (lap + sp.diags(a_vals - 2.0 * theta)).tocsc()
        try:
            delta = spla.splu(J).solve(-_residual_vec(lap, theta, a_vals))
        except RuntimeError as exc:  # singular Jacobian
            raise NewtonDivergenceError(f"Newton linear solve failed: {exc}", trace)
        t = 1.0
        for _ in range(MAX_HALVINGS + 1):
            candidate = theta + t * delta
            if enforce_positive and candidate.min() <= 0.0:
                t *= 0.5
                continue
            new_res = float(np.linalg.norm(_residual_vec(lap, candidate, a_vals)) * vol)
            if new_res < res or new_res <= tol:
                theta, res = candidate, new_res
                break
            t *= 0.5
        else:
            raise NewtonDivergenceError(
                f"Newton stalled at iteration {it}: damping floor reached", trace
            )
        trace.append(res)
    if res <= tol:
        return theta, res, max_iter, trace
    raise NewtonDivergenceError(f"Newton did not converge in {max_iter} iterations", trace)


def solve_logistic(
    grid: Grid,
    a,
    tol: float = DEFAULT_TOL,
    initial: Field | None = None,
    a_sequence=None,
) -> LogisticSolution:
    """Unique positive steady state of the diffusive logistic equation.

    a may be a constant or a Field on grid. a_sequence optionally lists
    intermediate growth rates solved in order with warm starts (continuation
    for stiff cases). Raises SubcriticalError when λ1(a) >= 0 and
    NewtonDivergenceError with the residual trace on failure.
    """
    a = _as_field(grid, a)
    if tol <= 0:
        raise ValueError("tol must be positive")

    # eigen tolerance fixed at 1e-7: the gate needs the sign and rough size
    # of lambda1, and the residual floor eps*h^-2 rules out tighter demands
    # on fine oracle grids
    op_a = assemble_operator(grid, a)
    gate = principal_eigenpair(op_a, tol=1e-7)
    lam1 = gate.lam
    if lam1 >= 0:
        raise SubcriticalError(lam1)

    stages = [_as_field(grid, s) for s in (a_sequence or [])]
    stages.append(a)

    def run_stages(theta0: np.ndarray) -> tuple[np.ndarray, float, int]:
        theta, res, total = theta0, np.inf, 0
        prev_max = stages[0].max()
        for stage in stages:
            # amplitude-matched warm start: theta_a scales roughly linearly
            # in a, and an unscaled hand-off can leave the Newton basin
            if stage.max() != prev_max:
                theta = theta * (stage.max() / prev_max)
            prev_max = stage.max()
            theta, res, iters, _ = _newton(
                grid, stage.values, theta, tol, enforce_positive=True
            )
            total += iters
            if theta.max() <= 1e-6 * max(1.0, stage.max()):
                # zero solves the equation too; silently returning it would
                # be misleading for a supercritical growth rate
                raise NewtonDivergenceError(
                    "Newton collapsed to the trivial zero solution", [res]
                )
        return theta, res, total

    if initial is not None:
        if initial.grid != grid:
            raise GridMismatchError("initial guess lives on a different grid")
        theta, res, iters_total = run_stages(initial.values.copy())
    else:
        # default start: principal eigenfunction of Δ + a, scaled to half the
        # first stage's max growth rate
        phi1 = gate.phi
        start = phi1.values * (0.5 * stages[0].max() / phi1.values.max())
        try:
            theta, res, iters_total = run_stages(start)
        except NewtonDivergenceError:
            # the eigenfunction start is heuristic and can stall for large a
            # on coarse grids; the constant max(a) field is a discrete
            # supersolution, and for this concave reaction Newton descends
            # from it monotonically
            theta, res, iters_total = run_stages(
                np.full(grid.size, stages[0].max())
            )

    if theta.min() <= 0.0:
        raise NewtonDivergenceError("converged iterate is not strictly positive", [res])
    if theta.max() >= a.max():
        raise NewtonDivergenceError(
            f"converged iterate violates the a-priori bound max θ = {theta.max():.6g} "
            f">= max a = {a.max():.6g}",
            [res],
        )
    return LogisticSolution(
        theta=Field(grid, theta),
        a=a,
        residual_norm=res,
        newton_iterations=iters_total,
        lambda1_of_a=lam1,
    )


@dataclass(frozen=True)
class UniquenessReport:
    """Multi-start Newton outcome: numerical evidence, not a proof."""

    solutions: tuple[Field, ...]  # distinct positive limits
    n_starts: int
    n_positive: int
    n_zero: int
    n_sign_changing: int
    n_failed: int

    @property
    def n_distinct_positive(self) -> int:
        return len(self.solutions)


def uniqueness_probe(
    grid: Grid,
    a,
    n_starts: int,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
    distinct_tol: float = 1e-6,
) -> UniquenessReport:
    """Run Newton from diverse positive starts and report distinct positive limits.

    Start menu: the scaled principal eigenfunction of Δ + a, constants spread
    over (0, max a], and seeded random positive fields. The inner Newton does
    not enforce positivity, so convergence to zero or to sign-changing
    solutions is observed and classified rather than masked. Non-convergent
    starts are counted, never fatal.
    """
    a = _as_field(grid, a)
    if n_starts < 1:
        raise ValueError("n_starts must be >= 1")
    rng = np.random.default_rng(seed)
    amax = a.max()
    if amax <= 0:
        amax = 1.0

    starts: list[np.ndarray] = []
    phi1 = principal_eigenpair(assemble_operator(grid, a), tol=1e-7).phi
    starts.append(phi1.values * (0.5 * amax / phi1.values.max()))
    n_const = max(0, (n_starts - 1) // 2)
    for j in range(n_const):
        starts.append(np.full(grid.size, amax * (j + 1) / n_const))
    while len(starts) < n_starts:
        starts.append(rng.uniform(0.0, amax, size=grid.size))

    distinct: list[np.ndarray] = []
    n_zero = n_sign = n_fail = n_pos = 0
    for s in starts:
        try:
            theta, _, _, _ = _newton(grid, a.values, s, tol, enforce_positive=False)
        except NewtonDivergenceError:
            n_fail += 1
            continue
        if np.abs(theta).max() <= 1e-8:
            n_zero += 1
        elif theta.min() > 0.0:
            n_pos += 1
            if not any(
                np.max(np.abs(theta - d)) <= distinct_tol for d in distinct
            ):
                distinct.append(theta)
        else:
            n_sign += 1

    return UniquenessReport(
        solutions=tuple(Field(grid, d) for d in distinct),
        n_starts=n_starts,
        n_positive=n_pos,
        n_zero=n_zero,
        n_sign_changing=n_sign,
        n_failed=n_fail,
    )
