"""Fixed-step RK4 integration of alpha-path families and pathwise sample
trajectories, plus the integral-form residual diagnostic.

The step size is fixed (no adaptivity) so that every path in a fan shares
one uniform grid: fan-wide monotonicity checks and the Simpson residual
both need aligned nodes, and node placement stays reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Sequence

import numpy as np

from . import expr
from .core import (
    FirstOrderSystem,
    UdeSpec,
    companion_system,
    pathwise_system_factory,
    phi_inv,
    validate_spec,
)
from .errors import (
    AlignmentError,
    BlowUpError,
    ConfigError,
    FanSolveError,
    NonFiniteError,
)

if TYPE_CHECKING:
    from .oracle import SamplePath

# any |state| beyond this aborts a solve: distinguishes hypothesis failure
# from numeric overflow noise
BLOWUP_LIMIT = 1e12


@dataclass
class Trajectory:
    """Uniform-grid trajectory of the full state vector (x, x', ..., x^(n-1)).

    ``diffusion_warnings`` records (t, g value) at every node where the
    diffusion evaluated along the trajectory was not strictly positive;
    such nodes void the regularity hypothesis but do not stop the solve.
    """

    times: np.ndarray  # (N+1,)
    states: np.ndarray  # (N+1, n)
    diffusion_warnings: list[tuple[float, float]] = field(default_factory=list)

    @property
    def position(self) -> np.ndarray:
        return self.states[:, 0]


@dataclass
class AlphaPath(Trajectory):
    """Trajectory of the ODE obtained by freezing the driver at phi_inv(alpha)."""

    alpha: float = 0.5


@dataclass
class AlphaFan:
    """One AlphaPath per grid alpha; all paths share an identical time grid.

    The fan is the discrete inverse-uncertainty-distribution surface: column
    t of the positions, read across alphas, tabulates alpha -> x_t^alpha.
    """

    spec: UdeSpec
    grid: list[float]
    paths: list[AlphaPath]


def time_grid(spec: UdeSpec) -> np.ndarray:
    """Uniform node times 0 = t_0 < ... < t_N = horizon."""
    return np.linspace(0.0, spec.horizon, spec.step_count + 1)


def rk4_step(
    system: FirstOrderSystem, t: float, y: Sequence[float], h: float
) -> tuple[float, ...]:
    """One classical 4-stage Runge-Kutta update. Deterministic.

    Raises NonFiniteError if any stage evaluation fails or the updated
    state is not finite.
    """
    rhs = system.rhs
    try:
        k1 = rhs(t, y)
        y1 = tuple(a + 0.5 * h * b for a, b in zip(y, k1))
        k2 = rhs(t + 0.5 * h, y1)
        y2 = tuple(a + 0.5 * h * b for a, b in zip(y, k2))
        k3 = rhs(t + 0.5 * h, y2)
        y3 = tuple(a + h * b for a, b in zip(y, k3))
        k4 = rhs(t + h, y3)
    except (ValueError, OverflowError, ZeroDivisionError) as exc:
        raise NonFiniteError(f"stage evaluation at t={t}") from exc
    w = h / 6.0
    out = tuple(
        a + w * (p + 2.0 * (q + r) + s)
        for a, p, q, r, s in zip(y, k1, k2, k3, k4)
    )
    for v in out:
        if not math.isfinite(v):
            raise NonFiniteError(f"state after step from t={t}")
    return out


def _require_valid(spec: UdeSpec) -> None:
    problems = validate_spec(spec)
    if problems:
        raise ConfigError("invalid spec: " + "; ".join(problems))


def solve_alpha_path(spec: UdeSpec, alpha: float) -> AlphaPath:
    """Integrate the alpha-path ODE over [0, horizon] with the spec's step.

    Component 0 of the states is the path itself, component k its k-th
    derivative. Raises BlowUpError (naming the last good time) when a state
    leaves the finite range; non-positive diffusion along the path is
    recorded as a warning, not an error.
    """
    _require_valid(spec)
    system = companion_system(spec, alpha)
    g_fn = expr.compile_evaluator(spec.diffusion, spec.order)
    times = time_grid(spec)
    tlist = [float(v) for v in times]
    n_steps = spec.step_count
    h = spec.horizon / n_steps

    y = tuple(float(v) for v in spec.initial)
    states = [y]
    warnings: list[tuple[float, float]] = []

    def check_diffusion(t: float, state: tuple[float, ...]) -> None:
        try:
            gv = g_fn(t, state)
        except (ValueError, OverflowError, ZeroDivisionError):
            gv = float("nan")
        if not gv > 0.0:
            warnings.append((t, gv))

    check_diffusion(0.0, y)
    for i in range(n_steps):
        t = tlist[i]
        try:
            y = rk4_step(system, t, y, h)
        except NonFiniteError as exc:
            raise BlowUpError(t, alpha) from exc
        for v in y:
            if abs(v) > BLOWUP_LIMIT:
                raise BlowUpError(t, alpha)
        states.append(y)
        check_diffusion(tlist[i + 1], y)

    return AlphaPath(
        times=times,
        states=np.array(states, dtype=float),
        diffusion_warnings=warnings,
        alpha=alpha,
    )


def solve_fan(spec: UdeSpec, grid: Sequence[float]) -> AlphaFan:
    """Solve one alpha-path per grid value.

    Solves are independent; the fan is assembled in grid order and fails
    only if a path fails, aggregating every failure with its alpha.
    """
    _require_valid(spec)
    grid = [float(a) for a in grid]
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigError("alpha grid must be strictly increasing")
    paths: list[AlphaPath] = []
    failures: list[tuple[float, BlowUpError]] = []
    for alpha in grid:
        try:
            paths.append(solve_alpha_path(spec, alpha))
        except BlowUpError as exc:
            failures.append((alpha, exc))
    if failures:
        raise FanSolveError(failures)
    return AlphaFan(spec=spec, grid=grid, paths=paths)


@dataclass(frozen=True)
class IntegralResidual:
    """Worst deviation of a path from its own integral-form restatement."""

    max_residual: float
    at_time: float
    used_trapezoid: bool  # some prefix had too few nodes for Simpson


def _composite_simpson(values: np.ndarray, h: float) -> tuple[float, bool]:
    """Integrate uniformly spaced samples at fourth order.

    Even interval counts use composite Simpson; odd counts close the last
    three intervals with the 3/8 rule, keeping the error O(h^4) so halving
    the step keeps shrinking the residual by ~16x. A single interval has too
    few nodes for either rule and falls back to the trapezoid, flagged.
    """
    m = len(values) - 1
    if m == 0:
        return 0.0, False
    if m == 1:
        return 0.5 * h * (values[0] + values[1]), True
    tail = 0.0
    if m % 2 == 1:
        tail = (
            3.0
            * h
            / 8.0
            * (values[-4] + 3.0 * values[-3] + 3.0 * values[-2] + values[-1])
        )
        values = values[:-3]
        m -= 3
    if m == 0:
        return float(tail), False
    s = (
        values[0]
        + values[-1]
        + 4.0 * values[1:-1:2].sum()
        + 2.0 * values[2:-2:2].sum()
    )
    return h / 3.0 * float(s) + float(tail), False


def integral_residual(
    path: AlphaPath, spec: UdeSpec, alpha: float
) -> IntegralResidual:
    """Check the path against its equivalent integral equation.

    An order-n path satisfies
        x(t) = sum_k t^k/k! * x_k(0)
               + 1/(n-1)! * integral_0^t (t-s)^(n-1) * F(s) ds
    where F is the top row of the companion system, f + |g| * phi_inv(alpha),
    evaluated along the stored states. The integral is approximated node-wise
    by composite Simpson quadrature (3/8 closure for odd interval counts);
    prefixes with fewer than 3 nodes fall back to the trapezoid, flagged.
    Returns the maximum absolute deviation over all grid nodes.
    """
    n = spec.order
    c = phi_inv(alpha)
    f_fn = expr.compile_evaluator(spec.drift, n)
    g_fn = expr.compile_evaluator(spec.diffusion, n)
    times = path.times
    rows = path.states.tolist()
    forcing = np.array(
        [f_fn(t, row) + abs(g_fn(t, row)) * c for t, row in zip(times, rows)]
    )
    positions = path.states[:, 0]
    factor = 1.0 / math.factorial(n - 1)
    h = spec.horizon / spec.step_count

    max_residual = -1.0
    at_time = 0.0
    used_trapezoid = False
    for j in range(len(times)):
        tj = float(times[j])
        poly = sum(tj**k / math.factorial(k) * spec.initial[k] for k in range(n))
        if j == 0:
            integral = 0.0
        else:
            kernel = (tj - times[: j + 1]) ** (n - 1)
            integral, trap = _composite_simpson(kernel * forcing[: j + 1], h)
            used_trapezoid = used_trapezoid or trap
        residual = abs(positions[j] - (poly + factor * integral))
        if residual > max_residual:
            max_residual = residual
            at_time = tj
    return IntegralResidual(float(max_residual), at_time, used_trapezoid)


def solve_sample_path(spec: UdeSpec, c: "SamplePath") -> Trajectory:
    """Integrate the pathwise ODE driven by a piecewise-linear surrogate.

    The top row becomes f + g * slope, with the slope constant per surrogate
    segment. Breakpoints must land on solver grid nodes (each RK4 step then
    lies inside a single segment, so every stage sees that segment's slope).
    """
    _require_valid(spec)
    times = time_grid(spec)
    tlist = [float(v) for v in times]
    n_steps = spec.step_count
    h = spec.horizon / n_steps
    tolerance = 1e-9 * max(spec.horizon, 1.0)

    node_index: list[int] = []
    for s in c.breakpoints:
        k = int(round(s / h))
        if k < 0 or k > n_steps or abs(s - tlist[k]) > tolerance:
            raise AlignmentError(
                f"breakpoint t={s} does not fall on a solver node (step {h})"
            )
        node_index.append(k)
    if node_index[0] != 0 or node_index[-1] != n_steps:
        raise AlignmentError(
            "sample path must span [0, horizon] on the solver grid"
        )
    if any(b <= a for a, b in zip(node_index, node_index[1:])):
        raise AlignmentError("breakpoints collapse onto the same solver node")

    make_system = pathwise_system_factory(spec)
    y = tuple(float(v) for v in spec.initial)
    states = [y]
    for seg in range(len(c.slopes)):
        system = make_system(float(c.slopes[seg]))
        for i in range(node_index[seg], node_index[seg + 1]):
            t = tlist[i]
            try:
                y = rk4_step(system, t, y, h)
            except NonFiniteError as exc:
                raise BlowUpError(t) from exc
            for v in y:
                if abs(v) > BLOWUP_LIMIT:
                    raise BlowUpError(t)
            states.append(y)
    return Trajectory(times=times, states=np.array(states, dtype=float))
