"""Tests for the quantile function, alpha grids, spec validation, and the
first-order reduction."""

from __future__ import annotations

import math
import random

import pytest

from alphapath import (
    AlphaGridSpec,
    UdeSpec,
    alpha_grid,
    companion_system,
    phi_inv,
    validate_spec,
)
from alphapath.core import pathwise_system_factory
from alphapath.errors import ConfigError, DomainError
from alphapath.expr import evaluate, parse_source

from conftest import tanh_spec


def test_phi_inv_center_is_exactly_zero():
    assert phi_inv(0.5) == 0.0


def test_phi_inv_antisymmetry():
    # dyadic grid so the mirror value 1 - alpha is exact
    for k in range(1, 1024):
        a = k / 1024
        assert abs(phi_inv(a) + phi_inv(1.0 - a)) <= 1e-14


def test_phi_inv_spot_value():
    # direct evaluation of (sqrt(3)/pi) * ln(0.9/0.1)
    assert phi_inv(0.9) == pytest.approx(1.21139, abs=1e-5)


def test_phi_inv_strictly_increasing_on_fine_grid():
    values = [phi_inv(k / 1001) for k in range(1, 1001)]
    assert all(b > a for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("alpha", [0.0, 1.0, -0.2, 1.7, math.nan])
def test_phi_inv_domain(alpha):
    with pytest.raises(DomainError):
        phi_inv(alpha)


def test_alpha_grid_three_points():
    assert alpha_grid(AlphaGridSpec(count=3, lo=0.25)) == [0.25, 0.5, 0.75]


def test_alpha_grid_default_resolution():
    grid = alpha_grid(AlphaGridSpec())
    assert len(grid) == 99
    assert grid[0] == 0.01
    assert grid[-1] == pytest.approx(0.99, abs=1e-15)
    assert grid[49] == 0.5
    assert all(b > a for a, b in zip(grid, grid[1:]))
    assert all(0.0 < a < 1.0 for a in grid)


def test_alpha_grid_symmetry_pairs():
    grid = alpha_grid(AlphaGridSpec(count=99, lo=0.01))
    for a, b in zip(grid, reversed(grid)):
        assert abs(a + b - 1.0) <= 1e-15


def test_alpha_grid_rejects_even_count():
    with pytest.raises(ConfigError):
        alpha_grid(AlphaGridSpec(count=2, lo=0.25))


@pytest.mark.parametrize("count,lo", [(1, 0.25), (9, 0.0), (9, 0.5), (9, -0.1)])
def test_alpha_grid_rejects_bad_parameters(count, lo):
    with pytest.raises(ConfigError):
        alpha_grid(AlphaGridSpec(count=count, lo=lo))


def test_alpha_grid_asymmetric_variant():
    grid = alpha_grid(AlphaGridSpec(count=5, lo=0.1, symmetric=False))
    assert grid[0] == 0.1
    assert grid[-1] == pytest.approx(0.9, abs=1e-15)
    assert all(b > a for a, b in zip(grid, grid[1:]))


def test_companion_constant_driver():
    spec = UdeSpec.from_strings(2, "0", "1", [0.0, 0.0], 1.0, 1e-3)
    system = companion_system(spec, 0.9)
    out = system.rhs(0.3, (2.0, 5.0))
    assert out[0] == 5.0
    assert out[1] == phi_inv(0.9)
    assert out[1] == pytest.approx(1.21139, abs=1e-5)


def test_companion_median_alpha_drops_driver():
    spec = UdeSpec.from_strings(2, "0", "1", [0.0, 0.0], 1.0, 1e-3)
    system = companion_system(spec, 0.5)
    assert system.rhs(0.0, (1.0, 2.0)) == (2.0, 0.0)


def test_companion_median_equals_drift_only():
    spec = tanh_spec(2)
    system = companion_system(spec, 0.5)
    f = parse_source("x0", 2)
    rng = random.Random(3)
    for _ in range(20):
        t = rng.uniform(0.0, 1.0)
        y = (rng.uniform(-2, 2), rng.uniform(-2, 2))
        env = {"t": t, "x0": y[0], "x1": y[1]}
        assert system.rhs(t, y)[-1] == evaluate(f, env)


def test_companion_order_three_structure():
    spec = UdeSpec.from_strings(3, "x0", "2+tanh(x0)", [0.0, 0.0, 0.0], 1.0, 1e-3)
    alpha = 0.73
    system = companion_system(spec, alpha)
    y = (0.4, -1.1, 2.2)
    out = system.rhs(0.0, y)
    assert out[:2] == (-1.1, 2.2)
    expected = 0.4 + (2.0 + math.tanh(0.4)) * phi_inv(alpha)
    assert out[2] == pytest.approx(expected, rel=1e-15)


def test_companion_shift_components_pass_through():
    # the chain rows forward the state entries themselves, untouched
    spec = UdeSpec.from_strings(3, "x0", "1", [0.0, 0.0, 0.0], 1.0, 1e-3)
    system = companion_system(spec, 0.25)
    y = (1.5, math.nan, 2.5)  # NaN survives only if the entry is passed through
    out = system.rhs(0.0, y)
    assert out[0] is y[1]
    assert out[1] is y[2]


def test_companion_uses_absolute_diffusion():
    spec = UdeSpec.from_strings(2, "0", "0-1", [0.0, 0.0], 1.0, 1e-3)
    system = companion_system(spec, 0.9)
    # g is -1 but the driver weight is |g|
    assert system.rhs(0.0, (0.0, 0.0))[1] == phi_inv(0.9)


def test_pathwise_system_keeps_diffusion_sign():
    spec = UdeSpec.from_strings(2, "0", "0-1", [0.0, 0.0], 1.0, 1e-3)
    system = pathwise_system_factory(spec)(2.0)
    assert system.rhs(0.0, (0.0, 0.0))[1] == -2.0


def test_validate_spec_accepts_valid():
    assert validate_spec(tanh_spec(2)) == []


def test_validate_spec_initial_count():
    spec = UdeSpec.from_strings(2, "0", "1", [0.0], 1.0, 1e-3)
    report = validate_spec(spec)
    assert any("initial condition count" in p for p in report)


def test_validate_spec_unknown_variable():
    # g referencing x2 inside an order-2 spec (tree built against order 3)
    g = parse_source("x2", 3)
    spec = UdeSpec(
        order=2,
        drift=parse_source("0", 2),
        diffusion=g,
        initial=(0.0, 0.0),
        horizon=1.0,
        step=1e-3,
    )
    report = validate_spec(spec)
    assert any("unknown variable" in p for p in report)


def test_validate_spec_reports_all_failures():
    g = parse_source("x2", 3)
    spec = UdeSpec(
        order=2,
        drift=parse_source("0", 2),
        diffusion=g,
        initial=(0.0,),
        horizon=1.0,
        step=0.3,
    )
    report = validate_spec(spec)
    assert len(report) >= 3  # count, ratio, unknown variable


def test_validate_spec_step_ratio():
    spec = UdeSpec.from_strings(2, "0", "1", [0.0, 0.0], 1.0, 0.3)
    assert any("node count" in p for p in validate_spec(spec))
    ok = UdeSpec.from_strings(2, "0", "1", [0.0, 0.0], 1.0, 0.125)
    assert validate_spec(ok) == []


def test_validate_spec_nonfinite_initial():
    spec = UdeSpec.from_strings(2, "0", "1", [math.inf, 0.0], 1.0, 1e-3)
    assert any("finite" in p for p in validate_spec(spec))


def test_validate_spec_step_exceeds_horizon():
    spec = UdeSpec.from_strings(2, "0", "1", [0.0, 0.0], 1.0, 2.0)
    assert any("exceeds horizon" in p for p in validate_spec(spec))
