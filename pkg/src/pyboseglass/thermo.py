"""
Finite-temperature condensation of a localized two-dimensional Bose gas.

At temperature T the condensate density ``n_c``, the localization length
``L_c`` and the critical wavelength ``Lambda_cr`` satisfy

    1 - n_c/n = Lambda_cr**2 / Lambda**2,
    n Lambda_cr**2 = ln(2 L_c**2 / Lambda_cr**2),
    L_c = alpha (n_g - u n_c)**beta,

with the thermal de Broglie wavelength ``Lambda``. Lengths are in units of L0
unless a name ends in ``_m``.

Functions:
- `thermal_wavelength(T, M)`: Thermal de Broglie wavelength in m.
- `solve_lambda_cr(n, L_c)`: Critical wavelength for a given localization length.
- `solve_thermo_state(thermo_input)`: Condensate state at one temperature.
- `condensation_temperature(n, u, fit, M, L0)`: Onset temperature of condensation.
- `thermo_sweep(n, u, fit, M, L0, T_grid)`: States along a temperature grid.
- `regime(n, u, fit)`: Whether a density lies below or above the critical density.
"""

import logging
import math

import numpy as np
from scipy import special

from .dtypes import (
    Bracket,
    ConvergenceError,
    DomainError,
    FitParams,
    ThermoInput,
    ThermoState,
)
from .materials import HBAR, K_B
from .numerics import find_root_bracketed, parallel_map

logger = logging.getLogger(__name__)

SCAN_POINTS = 512

# ln(z) above which the Lambert W argument is handled in log form
_LOG_OVERFLOW = 700.0


def thermal_wavelength(T: float, M: float) -> float:
    """
    Thermal de Broglie wavelength ``sqrt(2 pi hbar**2 / (M k_B T))``.

    Parameters
    ----------
    T : float
        Temperature in K.
    M : float
        Particle mass in kg.

    Returns
    -------
    float
        Wavelength in m.
    """
    if not (T > 0 and M > 0 and math.isfinite(T) and math.isfinite(M)):
        raise DomainError(f"T and M must be positive, got T={T}, M={M}")
    return math.sqrt(2.0 * math.pi * HBAR**2 / (M * K_B * T))


def _lambert_w_of_exp(log_z):
    """Principal Lambert W of ``exp(log_z)``, vectorized, without overflow."""
    log_z = np.asarray(log_z, dtype=float)
    w = np.empty_like(log_z)
    small = log_z < _LOG_OVERFLOW
    w[small] = special.lambertw(np.exp(log_z[small])).real
    for index in np.flatnonzero(~small):
        c = float(log_z.flat[index])

        def mismatch(x, c=c):
            return x + math.log(x) - c

        w.flat[index] = find_root_bracketed(
            mismatch, Bracket.from_function(mismatch, 1.0, c), tol=1e-15 * c
        )
    return w


def _lambda_cr_squared(n: float, log_L_c):
    """``Lambda_cr**2`` for ``n > 0`` from the log of the localization length."""
    return _lambert_w_of_exp(math.log(2.0 * n) + 2.0 * np.asarray(log_L_c)) / n


def solve_lambda_cr(n: float, L_c: float) -> float:
    """
    Critical wavelength at density ``n`` and localization length ``L_c``.

    The left side of ``n y + ln y = ln(2 L_c**2)`` is strictly increasing in
    ``y = Lambda_cr**2``, and the unique root is ``y = W(2 n L_c**2) / n``
    with the principal Lambert W function.

    Parameters
    ----------
    n : float
        Total density, ``n >= 0``.
    L_c : float
        Localization length, ``L_c > 0``.

    Returns
    -------
    float
        ``Lambda_cr``, in the length unit of ``L_c``; at most ``sqrt(2) L_c``.
    """
    if not (n >= 0 and math.isfinite(n)):
        raise DomainError(f"n must be finite and non-negative, got {n}")
    if not (L_c > 0 and math.isfinite(L_c)):
        raise DomainError(f"L_c must be finite and positive, got {L_c}")
    if n == 0:
        return math.sqrt(2.0) * L_c
    return math.sqrt(float(_lambda_cr_squared(n, math.log(L_c))))


def regime(n: float, u: float, fit: FitParams) -> str:
    """
    Returns
    -------
    str
        "below-critical" if ``n < n_g/u``, otherwise "above-critical".
    """
    return "below-critical" if u * n < fit.n_g else "above-critical"


def solve_thermo_state(thermo_input: ThermoInput) -> ThermoState:
    """
    Solve the finite-temperature system at one temperature.

    The unknown is ``s = ln(n_g - u n_c)``, the log-distance of ``u n_c`` to
    the critical value, so that ``ln L_c = ln(alpha) + beta s`` stays finite
    up to the cap. The mismatch ``G = n_c - n (1 - Lambda_cr**2/Lambda**2)``
    is scanned on 512 points between ``n_c = 0`` and ``n_c = min(n, n_g/u)``,
    the sign change with the largest ``n_c`` is refined with Brent's method.

    Parameters
    ----------
    thermo_input : ThermoInput
        Density, temperature, interaction, fit and physical scales.

    Returns
    -------
    ThermoState
        The state; ``condensed`` is False and ``n_c = 0`` when
        ``Lambda <= Lambda_cr(n, L_c(0))``.

    Raises
    ------
    ConvergenceError
        If no sign change is found below the cap.
    """
    n, u, fit = thermo_input.n, thermo_input.u, thermo_input.fit
    L0 = thermo_input.L0
    cap = fit.n_g / u
    log_alpha = math.log(fit.alpha)
    Lambda = thermal_wavelength(thermo_input.T, thermo_input.M) / L0
    Lambda2 = Lambda**2

    def condensate(s):
        return np.minimum((fit.n_g - np.exp(s)) / u, np.nextafter(cap, 0.0))

    def mismatch(s):
        y = _lambda_cr_squared(n, log_alpha + fit.beta * np.asarray(s))
        return condensate(s) - n * (1.0 - y / Lambda2)

    s_top = math.log(fit.n_g)
    f_top = float(mismatch(s_top))
    if f_top >= 0:
        L_c = math.exp(log_alpha + fit.beta * s_top)
        return ThermoState(
            thermo_input.T, n, 0.0, L_c, Lambda, solve_lambda_cr(n, L_c), False, L0,
            cap=cap, root_count=0, log_gap=s_top,
        )

    if n < cap:
        s_bottom = math.log(fit.n_g - u * n)
    else:
        depth = 1.0
        s_bottom = s_top - depth
        while float(mismatch(s_bottom)) <= 0:
            depth *= 2.0
            if depth > 1e7:
                raise ConvergenceError(
                    f"No condensate root below the cap at T={thermo_input.T} K.",
                    best_estimate=cap,
                )
            s_bottom = s_top - depth
        logger.debug("expanded log-gap bracket to s=%.6g", s_bottom)

    s_grid = np.linspace(s_bottom, s_top, SCAN_POINTS)
    values = mismatch(s_grid)
    changes = np.flatnonzero(np.sign(values[:-1]) * np.sign(values[1:]) <= 0)
    if changes.size == 0:
        raise ConvergenceError(
            f"Condensate mismatch has no sign change at T={thermo_input.T} K.",
            best_estimate=0.0,
        )
    if changes.size > 1:
        logger.info("%d condensate roots at T=%g K, keeping the largest", changes.size, thermo_input.T)

    # smallest s is the largest condensate density
    i = changes[0]
    bracket = Bracket(s_grid[i], s_grid[i + 1], values[i], values[i + 1])
    s = find_root_bracketed(
        lambda x: float(mismatch(x)), bracket, tol=1e-15 * max(1.0, abs(s_grid[i]))
    )
    log_L_c = log_alpha + fit.beta * s
    n_c = float(condensate(s))
    Lambda_cr = math.sqrt(float(_lambda_cr_squared(n, log_L_c)))
    return ThermoState(
        thermo_input.T, n, n_c, math.exp(log_L_c), Lambda, Lambda_cr, True, L0,
        cap=cap, root_count=int(changes.size), log_gap=s,
    )


def condensation_temperature(n: float, u: float, fit: FitParams, M: float, L0: float) -> float:
    """
    Temperature below which a condensate appears.

    At onset ``n_c = 0``, so ``L_c = alpha n_g**beta`` does not depend on ``u``
    and ``T_c = 2 pi hbar**2 / (M k_B (Lambda_cr L0)**2)``.

    Parameters
    ----------
    n : float
        Total dimensionless density.
    u : float
        Interaction strength.
    fit : FitParams
        Critical power law.
    M : float
        Boson mass in kg.
    L0 : float
        Length scale in m.

    Returns
    -------
    float
        T_c in K.
    """
    if not (n > 0 and u > 0 and M > 0 and L0 > 0):
        raise DomainError("n, u, M and L0 must be positive")
    Lambda_cr = solve_lambda_cr(n, fit.alpha * fit.n_g**fit.beta) * L0
    return 2.0 * math.pi * HBAR**2 / (M * K_B * Lambda_cr**2)


def thermo_sweep(n: float, u: float, fit: FitParams, M: float, L0: float, T_grid, workers: int = 1):
    """
    Solve the finite-temperature system along a temperature grid.

    Failing points are logged and returned as states with ``error`` set.

    Parameters
    ----------
    n : float
        Total dimensionless density.
    u : float
        Interaction strength.
    fit : FitParams
        Critical power law.
    M : float
        Boson mass in kg.
    L0 : float
        Length scale in m.
    T_grid : array_like
        Increasing positive temperatures in K.
    workers : int, optional
        Worker threads. Default is 1.

    Returns
    -------
    list[ThermoState]
        One state per temperature, in grid order.
    """
    T_grid = np.asarray(T_grid, dtype=float).ravel()
    if np.any(T_grid <= 0):
        raise ValueError("Temperatures must be positive.")
    if np.any(np.diff(T_grid) < 0):
        raise ValueError("Temperatures must be sorted in increasing order.")

    def solve(T):
        try:
            return solve_thermo_state(ThermoInput(n, float(T), u, fit, M, L0))
        except (ConvergenceError, DomainError) as e:
            logger.warning("thermo point T=%g K failed: %s", T, e)
            return ThermoState.failed(float(T), n, L0, str(e))

    return parallel_map(solve, T_grid, workers)
