"""Shared spec builders for the test suite.

The two workhorse problems: a driver-only polynomial case with known
closed-form paths, and a nonlinear case whose drift/diffusion satisfy the
positivity and position-monotonicity hypotheses everywhere.
"""

from __future__ import annotations

import pytest

from alphapath import AlphaGridSpec, UdeSpec, alpha_grid, solve_fan


def polynomial_spec(order: int, initial=None, horizon=1.0, step=1e-3) -> UdeSpec:
    """x^(n) driven purely by the constant driver: f = 0, g = 1."""
    if initial is None:
        initial = [0.0] * order
    return UdeSpec.from_strings(order, "0", "1", initial, horizon, step)


def tanh_spec(order: int, initial=None, horizon=1.0, step=1e-3) -> UdeSpec:
    """Nonlinear case with f = x0 and g = 2 + tanh(x0) (both hypotheses hold)."""
    if initial is None:
        initial = [0.1] + [0.0] * (order - 1)
    return UdeSpec.from_strings(order, "x0", "2+tanh(x0)", initial, horizon, step)


SMALL_GRID = AlphaGridSpec(count=9, lo=0.1)


@pytest.fixture(scope="session")
def tanh_fan_small():
    """9-alpha fan of the order-2 nonlinear problem at a coarse step."""
    spec = tanh_spec(2, step=1e-2)
    return spec, solve_fan(spec, alpha_grid(SMALL_GRID))


@pytest.fixture(scope="session")
def poly_fan_small():
    """9-alpha fan of the order-2 polynomial problem at a coarse step."""
    spec = polynomial_spec(2, step=1e-2)
    return spec, solve_fan(spec, alpha_grid(SMALL_GRID))
