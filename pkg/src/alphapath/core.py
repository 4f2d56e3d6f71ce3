"""Problem specifications, the inverse normal uncertainty quantile, alpha
grids, and the reduction of order-n scalar problems to first-order systems.

An order-n problem prescribes x^(n) = f(t, x0..x{n-1}) + g(t, x0..x{n-1}) * dC/dt
with n initial values (position and derivatives at t = 0). For a fixed
alpha in (0, 1) the driver derivative is replaced by the constant
phi_inv(alpha), weighted by |g|, which turns the problem into an ordinary
ODE whose solution is the alpha-path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from . import expr
from .errors import ConfigError, DomainError

SQRT3_OVER_PI = math.sqrt(3.0) / math.pi


def phi_inv(alpha: float) -> float:
    """Inverse standard normal uncertainty distribution: (sqrt(3)/pi) * ln(a/(1-a)).

    Strictly increasing on (0, 1), odd about alpha = 0.5, and exactly zero
    at 0.5. This is the uncertainty-theory normal, not the Gaussian quantile.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie strictly inside (0, 1), got {alpha}")
    return SQRT3_OVER_PI * math.log(alpha / (1.0 - alpha))


@dataclass(frozen=True)
class UdeSpec:
    """Order-n problem definition.

    ``initial`` holds exactly n values: position and its first n-1
    derivatives at t = 0. ``horizon`` / ``step`` must give an integer node
    count (within 1e-9).
    """

    order: int
    drift: expr.ExprAst  # f
    diffusion: expr.ExprAst  # g
    initial: tuple[float, ...]
    horizon: float
    step: float

    @classmethod
    def from_strings(
        cls,
        order: int,
        f: str,
        g: str,
        initial: Sequence[float],
        horizon: float,
        step: float,
    ) -> "UdeSpec":
        """Parse f and g source text against the given order."""
        return cls(
            order=order,
            drift=expr.parse_source(f, order),
            diffusion=expr.parse_source(g, order),
            initial=tuple(float(v) for v in initial),
            horizon=float(horizon),
            step=float(step),
        )

    @property
    def step_count(self) -> int:
        return int(round(self.horizon / self.step))


def validate_spec(spec: UdeSpec) -> list[str]:
    """Check every spec invariant; returns all problems found (empty = valid)."""
    problems: list[str] = []
    order_ok = isinstance(spec.order, int) and spec.order >= 1
    if not order_ok:
        problems.append(f"order must be a positive integer, got {spec.order!r}")
    if len(spec.initial) != spec.order:
        problems.append(
            f"initial condition count: expected {spec.order} values, "
            f"got {len(spec.initial)}"
        )
    if any(not math.isfinite(v) for v in spec.initial):
        problems.append("initial conditions must all be finite")
    horizon_ok = math.isfinite(spec.horizon) and spec.horizon > 0
    step_ok = math.isfinite(spec.step) and spec.step > 0
    if not horizon_ok:
        problems.append(f"horizon must be positive and finite, got {spec.horizon!r}")
    if not step_ok:
        problems.append(f"step must be positive and finite, got {spec.step!r}")
    if horizon_ok and step_ok:
        if spec.step > spec.horizon:
            problems.append(
                f"step {spec.step} exceeds horizon {spec.horizon}"
            )
        else:
            ratio = spec.horizon / spec.step
            if abs(ratio - round(ratio)) > 1e-9:
                problems.append(
                    f"horizon/step = {ratio!r} is not an integer node count "
                    "(within 1e-9)"
                )
    if order_ok:
        legal = set(expr.state_variables(spec.order))
        exposed = ", ".join(expr.state_variables(spec.order))
        for label, tree in (("f", spec.drift), ("g", spec.diffusion)):
            for name in sorted(expr.variables_of(tree) - legal):
                problems.append(
                    f"unknown variable: {label} references {name!r} "
                    f"(order {spec.order} exposes {exposed})"
                )
    return problems


@dataclass(frozen=True)
class AlphaGridSpec:
    """Discretization of alpha in (0, 1): odd count, endpoints lo and 1 - lo."""

    count: int = 99
    lo: float = 0.01
    symmetric: bool = True


def alpha_grid(gspec: AlphaGridSpec) -> list[float]:
    """Strictly increasing alpha values from lo to 1 - lo.

    With the symmetric flag the grid is built by mirroring the lower half
    about 0.5, so paired values satisfy a_i + a_{count-1-i} = 1 up to one
    rounding, and 0.5 is a grid point exactly.
    """
    count, lo = gspec.count, gspec.lo
    if not isinstance(count, int) or count < 3 or count % 2 == 0:
        raise ConfigError(f"alpha count must be an odd integer >= 3, got {count!r}")
    if not (math.isfinite(lo) and 0.0 < lo < 0.5):
        raise ConfigError(f"alpha lo must lie in (0, 0.5), got {lo!r}")
    step = (1.0 - 2.0 * lo) / (count - 1)
    if gspec.symmetric:
        half = count // 2
        lower = [lo + i * step for i in range(half)]
        return lower + [0.5] + [1.0 - v for v in reversed(lower)]
    return [lo + i * step for i in range(count)]


@dataclass(frozen=True)
class FirstOrderSystem:
    """First-order reduction of an order-n scalar problem.

    ``rhs(t, y)`` returns the derivative of the state vector
    y = (x, x', ..., x^(n-1)). The first n-1 components are the shift map
    y_k' = y_{k+1} by construction; only the top row is problem-specific.
    ``alpha`` records provenance (None for pathwise sample systems).
    """

    dimension: int
    rhs: Callable[[float, Sequence[float]], tuple[float, ...]]
    spec: UdeSpec
    alpha: float | None


def companion_system(spec: UdeSpec, alpha: float) -> FirstOrderSystem:
    """System whose top row is f(t, y) + |g(t, y)| * phi_inv(alpha).

    At alpha = 0.5 the driver constant is exactly zero, so the system
    coincides with the drift-only dynamics.
    """
    c = phi_inv(alpha)
    f_fn = expr.compile_evaluator(spec.drift, spec.order)
    g_fn = expr.compile_evaluator(spec.diffusion, spec.order)

    def rhs(t: float, y: Sequence[float]) -> tuple[float, ...]:
        return (*y[1:], f_fn(t, y) + abs(g_fn(t, y)) * c)

    return FirstOrderSystem(spec.order, rhs, spec, alpha)


def pathwise_system_factory(
    spec: UdeSpec,
) -> Callable[[float], FirstOrderSystem]:
    """Builder for per-segment systems with top row f(t, y) + g(t, y) * slope.

    The driver derivative keeps its sign here (no absolute value): the
    surrogate path's slope plays the role dC/dt plays in the original
    problem. Compiles f and g once and reuses them across segments.
    """
    f_fn = expr.compile_evaluator(spec.drift, spec.order)
    g_fn = expr.compile_evaluator(spec.diffusion, spec.order)

    def make(slope: float) -> FirstOrderSystem:
        def rhs(t: float, y: Sequence[float]) -> tuple[float, ...]:
            return (*y[1:], f_fn(t, y) + g_fn(t, y) * slope)

        return FirstOrderSystem(spec.order, rhs, spec, None)

    return make
