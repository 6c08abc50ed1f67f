import math

import pytest
import numpy as np
from scipy import optimize

from pyboseglass.dtypes import ConvergenceError, DomainError, FitParams, ThermoInput, ThermoState
from pyboseglass.materials import GAAS, HBAR, K_B, density_to_dimensionless, per_cm2
import pyboseglass.thermo

tolerance = 1e-9

fit = FitParams.default()
M = GAAS.M_kg
L0 = 1e-8
u = 47.0
densities_cm2 = [1.2e10, 0.8e10, 0.4e10]


def dimensionless(density_cm2):
    return density_to_dimensionless(per_cm2(density_cm2), L0)


def lambda_cr_oracle(n, L_c):
    """Bisection on the monotone form n*y + ln(y) = ln(2 L_c**2) with y = Lambda_cr**2."""
    target = math.log(2.0 * L_c**2)
    y = optimize.bisect(lambda y: n * y + math.log(y) - target, 1e-300, 2.0 * L_c**2 + 1.0, xtol=1e-14, rtol=1e-15)
    return math.sqrt(y)


def test_thermal_wavelength():
    Lambda = pyboseglass.thermo.thermal_wavelength(1.0, M)

    assert pytest.approx(math.sqrt(2 * math.pi * HBAR**2 / (M * K_B)), rel=1e-14) == Lambda
    assert pytest.approx(1.12e-7, rel=0.01) == Lambda
    assert pytest.approx(Lambda / 2.0, rel=1e-14) == pyboseglass.thermo.thermal_wavelength(4.0, M)


@pytest.mark.parametrize("T, mass", [(0.0, M), (-1.0, M), (1.0, 0.0), (math.inf, M)])
def test_thermal_wavelength_domain(T, mass):
    with pytest.raises(DomainError):
        pyboseglass.thermo.thermal_wavelength(T, mass)


@pytest.mark.parametrize("n, L_c", [(0.012, 50.0), (0.004, 7.6), (0.012, 1e4), (1e-6, 2.0), (3.0, 0.5)])
def test_lambda_cr_oracle(n, L_c):
    assert pytest.approx(lambda_cr_oracle(n, L_c), rel=1e-12) == pyboseglass.thermo.solve_lambda_cr(n, L_c)


def test_lambda_cr_without_density():
    assert pytest.approx(math.sqrt(2.0) * 7.0, rel=1e-15) == pyboseglass.thermo.solve_lambda_cr(0.0, 7.0)
    assert pyboseglass.thermo.solve_lambda_cr(0.012, 7.0) < math.sqrt(2.0) * 7.0


def test_lambda_cr_huge_length():
    n, L_c = 0.012, 1e160
    y = pyboseglass.thermo.solve_lambda_cr(n, L_c) ** 2
    rhs = math.log(2.0) + 2.0 * math.log(L_c)

    assert pytest.approx(rhs, rel=1e-13) == n * y + math.log(y)


@pytest.mark.parametrize("n, L_c", [(-0.1, 5.0), (0.01, 0.0), (math.nan, 5.0)])
def test_lambda_cr_domain(n, L_c):
    with pytest.raises(DomainError):
        pyboseglass.thermo.solve_lambda_cr(n, L_c)


def test_regime():
    assert pyboseglass.thermo.regime(0.012, 1.0, fit) == "below-critical"
    assert pyboseglass.thermo.regime(0.012, u, fit) == "above-critical"


@pytest.mark.parametrize("density_cm2", densities_cm2)
def test_condensation_temperature(density_cm2):
    n = dimensionless(density_cm2)
    T_c = pyboseglass.thermo.condensation_temperature(n, u, fit, M, L0)
    Lambda_cr = pyboseglass.thermo.solve_lambda_cr(n, fit.localization_length(0.0)) * L0

    assert 0.5 < T_c < 5.0
    assert pytest.approx(Lambda_cr, rel=1e-12) == pyboseglass.thermo.thermal_wavelength(T_c, M)


def test_condensation_temperature_ordering():
    T_c = [pyboseglass.thermo.condensation_temperature(dimensionless(d), u, fit, M, L0) for d in densities_cm2]

    assert T_c[0] > T_c[1] > T_c[2]


def test_condensation_temperature_matches_flag():
    n = dimensionless(1.2e10)
    T_c = pyboseglass.thermo.condensation_temperature(n, u, fit, M, L0)

    def condensed(T):
        return pyboseglass.thermo.solve_thermo_state(ThermoInput(n, T, u, fit, M, L0)).condensed

    lo, hi = 0.1, 10.0
    assert condensed(lo) and not condensed(hi)
    while hi - lo > 1e-9 * hi:
        mid = 0.5 * (lo + hi)
        if condensed(mid):
            lo = mid
        else:
            hi = mid

    assert pytest.approx(T_c, rel=1e-6) == 0.5 * (lo + hi)


@pytest.mark.parametrize("T", [0.05, 0.1, 0.5, 1.0, 1.5, 2.0])
def test_condensed_state(T):
    n = dimensionless(1.2e10)
    state = pyboseglass.thermo.solve_thermo_state(ThermoInput(n, T, u, fit, M, L0))

    assert state.condensed
    assert 0 < state.n_c < fit.n_g / u
    assert state.root_count >= 1
    assert max(state.residuals(fit, u)) <= tolerance
    assert pytest.approx(pyboseglass.thermo.thermal_wavelength(T, M), rel=1e-14) == state.Lambda_m


def test_normal_state():
    n = dimensionless(1.2e10)
    state = pyboseglass.thermo.solve_thermo_state(ThermoInput(n, 4.0, u, fit, M, L0))

    assert not state.condensed
    assert state.n_c == 0.0
    assert state.condensate_fraction == 0.0
    assert pytest.approx(fit.localization_length(0.0), rel=1e-12) == state.L_c
    assert state.Lambda < state.Lambda_cr


def test_below_critical_density():
    # u * n < n_g: the condensate can take up the whole density
    n = 0.012
    state = pyboseglass.thermo.solve_thermo_state(ThermoInput(n, 0.05, 1.0, fit, M, L0))

    assert state.condensed
    assert state.n_c < n
    assert state.condensate_fraction > 0.5
    assert max(state.residuals(fit, 1.0)) <= tolerance


def test_sweep_monotone():
    n = dimensionless(0.8e10)
    T_grid = np.linspace(0.1, 5.0, 15)
    states = pyboseglass.thermo.thermo_sweep(n, u, fit, M, L0, T_grid, workers=3)
    flags = np.array([s.condensed for s in states])
    fraction = np.array([s.condensate_fraction for s in states])
    L_c = np.array([s.L_c for s in states if s.condensed])

    assert [s.T for s in states] == list(T_grid)
    assert flags[0] and not flags[-1]
    assert np.all(np.diff(flags.astype(int)) <= 0)
    assert np.all(np.diff(fraction) <= 1e-12)
    assert np.all(np.diff(L_c) <= 1e-12 * L_c[:-1])


def test_sweep_isolates_failures(monkeypatch):
    solve = pyboseglass.thermo.solve_thermo_state

    def flaky(thermo_input):
        if thermo_input.T == 2.0:
            raise ConvergenceError("no sign change")
        return solve(thermo_input)

    monkeypatch.setattr(pyboseglass.thermo, "solve_thermo_state", flaky)
    states = pyboseglass.thermo.thermo_sweep(0.012, u, fit, M, L0, [1.0, 2.0, 3.0])

    assert states[1].error == "no sign change"
    assert math.isnan(states[1].n_c)
    assert states[0].error is None and states[2].error is None


@pytest.mark.parametrize("T_grid", [[1.0, 0.5], [0.0, 1.0], [-1.0]])
def test_sweep_rejects_grid(T_grid):
    with pytest.raises(ValueError):
        pyboseglass.thermo.thermo_sweep(0.012, u, fit, M, L0, T_grid)


@pytest.mark.slow
@pytest.mark.parametrize("density_cm2", densities_cm2)
def test_thermo_grid(density_cm2):
    n = dimensionless(density_cm2)
    T_grid = np.linspace(0.1, 5.0, 40)
    states = pyboseglass.thermo.thermo_sweep(n, u, fit, M, L0, T_grid)
    condensed = [s for s in states if s.condensed]
    flags = np.array([s.condensed for s in states], dtype=int)
    L_c = np.array([s.L_c for s in condensed])

    assert all(s.error is None for s in states)
    assert condensed
    assert np.all(np.diff(flags) <= 0)
    for state in condensed:
        assert state.n_c < fit.n_g / u
        assert max(state.residuals(fit, u)) <= tolerance
    assert np.all(np.diff(L_c) <= 1e-12 * L_c[:-1])
