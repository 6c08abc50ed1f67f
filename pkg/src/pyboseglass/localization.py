"""
Optimal lakes, localization curves and the critical power law.

For fixed interaction and condensate density, the lake radius is the well
radius that minimizes the chemical potential. Tracing the resulting coherence
length over the density gives the localization curve, which diverges at a
critical value of ``u * n_c`` and is fitted by ``L_c = alpha (n_g - u n_c)**beta``.

Functions:
- `mu_of_L(u, n_c, L_values)`: Chemical potential and coherence length over well radii.
- `minimize_mu_over_L(u, n_c, scan)`: Optimal lake at one density.
- `localization_curve(u, densities)`: Optimal lakes over a density grid.
- `fit_power_law(curve)`: Critical power-law fit.
- `rescale_solution(params, a)`, `rescale_curve(curve, a)`: Self-similarity map.
- `density_grid(n_min, n_max, count, n_threshold)`: Densities refined toward a threshold.
"""

import logging
import math
import warnings
from typing import Optional

import numpy as np
from scipy import optimize

from .dtypes import (
    ConvergenceError,
    CurvePoint,
    DomainError,
    FitParams,
    GpProblem,
    InsufficientDataError,
    LocalizationCurve,
    NoLocalizedSolutionError,
    NotLocalizedError,
    OptimalLake,
    RadialProfile,
    RankError,
    ScanOptions,
    SolverOptions,
)
from .gp_core import solve_gp
from .numerics import parallel_map

logger = logging.getLogger(__name__)

MIN_FIT_POINTS = 5
FIT_SCAN_POINTS = 200


def _solve(u: float, n_c: float, L: float, options: Optional[SolverOptions]):
    """Solution at one radius, or the error that prevented it."""
    try:
        return solve_gp(GpProblem(u, n_c, L, options=options))
    except (NotLocalizedError, ConvergenceError) as e:
        return e


def mu_of_L(u: float, n_c: float, L_values, options: Optional[SolverOptions] = None, workers: int = 1):
    """
    Chemical potential over a set of well radii.

    Parameters
    ----------
    u : float
        Interaction strength.
    n_c : float
        Condensate density.
    L_values : array_like
        Well radii.
    options : SolverOptions, optional
        Solver settings.
    workers : int, optional
        Worker threads. Default is 1.

    Returns
    -------
    np.ndarray
        Rows ``(L, mu0, L_c, localized)``. Radii without a localized state
        report the last ``mu0`` seen by the solver and ``L_c = NaN``; solver
        failures report NaN for both.
    """
    L_values = np.asarray(L_values, dtype=float).ravel()
    results = parallel_map(lambda L: _solve(u, n_c, L, options), L_values, workers)
    table = np.full((L_values.size, 4), np.nan)
    table[:, 0] = L_values
    table[:, 3] = 0.0
    for row, result in zip(table, results):
        if isinstance(result, NotLocalizedError):
            row[1] = result.mu0
        elif isinstance(result, ConvergenceError):
            logger.warning("mu(L) at L=%g failed: %s", row[0], result)
        else:
            row[1:] = result.mu0, result.L_c, 1.0
    return table


def minimize_mu_over_L(
    u: float,
    n_c: float,
    scan: Optional[ScanOptions] = None,
    options: Optional[SolverOptions] = None,
    workers: int = 1,
) -> OptimalLake:
    """
    Well radius that minimizes the chemical potential.

    A geometric coarse scan locates the best localized radius; golden-section
    search on its neighbours refines it. A minimum on the edge of the scan
    range is refined with a bounded search and reported with a warning.

    Parameters
    ----------
    u : float
        Interaction strength, ``u >= 0``.
    n_c : float
        Condensate density, ``n_c > 0``.
    scan : ScanOptions, optional
        Scan range and refinement tolerance.
    options : SolverOptions, optional
        Solver settings.
    workers : int, optional
        Worker threads for the coarse scan. Default is 1.

    Returns
    -------
    OptimalLake
        The minimizing radius and its solution.

    Raises
    ------
    NoLocalizedSolutionError
        If no scanned radius gives a localized state.
    """
    if not (math.isfinite(u) and u >= 0):
        raise DomainError(f"u must be non-negative, got {u}")
    if not (math.isfinite(n_c) and n_c > 0):
        raise DomainError(f"n_c must be positive, got {n_c}")
    scan = scan if scan is not None else ScanOptions()

    L_values = scan.L_values()
    solutions = {}
    coarse = parallel_map(lambda L: _solve(u, n_c, L, options), L_values, workers)
    mu = np.full(L_values.size, np.inf)
    for i, result in enumerate(coarse):
        if isinstance(result, ConvergenceError):
            logger.warning("coarse scan at L=%g failed: %s", L_values[i], result)
        elif not isinstance(result, NotLocalizedError):
            mu[i] = result.mu0
            solutions[float(L_values[i])] = result

    if not np.any(np.isfinite(mu)):
        raise NoLocalizedSolutionError(
            f"no localized solution for u={u}, n_c={n_c} on L in [{scan.L_min}, {scan.L_max}]"
        )

    def objective(L):
        key = float(L)
        if key not in solutions:
            result = _solve(u, n_c, key, options)
            if isinstance(result, (NotLocalizedError, ConvergenceError)):
                # positive penalty keeps the search inside the localized bracket
                return max(getattr(result, "mu0", 0.0), 0.0)
            solutions[key] = result
        return solutions[key].mu0

    i = int(np.argmin(mu))
    last = L_values.size - 1
    refined = None
    if 0 < i < last:
        try:
            refined = optimize.minimize_scalar(
                objective,
                bracket=(L_values[i - 1], L_values[i], L_values[i + 1]),
                method="golden",
                tol=scan.refine_rtol,
            )
        except ValueError as e:
            logger.debug("golden bracket rejected (%s), using bounded search", e)
    else:
        warnings.warn(
            f"Chemical potential minimum at the edge of the scan range (L={L_values[i]:.4g}); "
            "widen L_min/L_max.",
            UserWarning,
        )
    if refined is None:
        lo, hi = L_values[max(i - 1, 0)], L_values[min(i + 1, last)]
        refined = optimize.minimize_scalar(
            objective,
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": scan.refine_rtol * L_values[i]},
        )

    L_star = min(solutions, key=lambda L: solutions[L].mu0)
    best = solutions[L_star]
    logger.info("optimal lake u=%g n_c=%g: L*=%.6g mu0*=%.8g L_c=%.6g", u, n_c, L_star, best.mu0, best.L_c)
    return OptimalLake(L_star, best.mu0, best.L_c, best)


def localization_curve(
    u: float,
    densities,
    scan: Optional[ScanOptions] = None,
    options: Optional[SolverOptions] = None,
    workers: int = 1,
) -> LocalizationCurve:
    """
    Optimal lakes over a grid of condensate densities.

    Parameters
    ----------
    u : float
        Interaction strength.
    densities : array_like
        Positive, increasing condensate densities.
    scan : ScanOptions, optional
        Radius scan of every point.
    options : SolverOptions, optional
        Solver settings.
    workers : int, optional
        Densities evaluated concurrently. Default is 1.

    Returns
    -------
    LocalizationCurve
        One point per density, in input order. Densities without a localized
        lake, or whose solve failed, are kept with ``localized = False``.
    """
    densities = np.asarray(densities, dtype=float).ravel()
    if np.any(densities <= 0):
        raise ValueError("Densities must be positive.")
    if np.any(np.diff(densities) < 0):
        raise ValueError("Densities must be sorted in increasing order.")

    def point(n_c):
        try:
            return CurvePoint.from_lake(n_c, minimize_mu_over_L(u, n_c, scan, options))
        except NoLocalizedSolutionError:
            logger.info("no localized lake at n_c=%g", n_c)
            return CurvePoint(n_c, note="not localized")
        except ConvergenceError as e:
            logger.warning("curve point n_c=%g failed: %s", n_c, e)
            return CurvePoint(n_c, note=str(e))

    curve = LocalizationCurve(parallel_map(point, densities, workers), u)
    _, L_c = curve.arrays()
    if np.any(np.diff(L_c) <= 0):
        warnings.warn("Localization length is not increasing along the curve.", UserWarning)
    return curve


def _log_fit(x, log_L_c, n_g):
    """Linear least squares of ln L_c = ln alpha + beta ln(n_g - x)."""
    design = np.column_stack([np.ones_like(x), np.log(n_g - x)])
    coefficients, _, rank, _ = np.linalg.lstsq(design, log_L_c, rcond=None)
    residual = log_L_c - design @ coefficients
    return coefficients, float(residual @ residual), rank


def fit_power_law(curve: LocalizationCurve) -> FitParams:
    """
    Fit ``L_c = alpha (n_g - u n_c)**beta`` to the localized points of a curve.

    For fixed ``n_g`` the log form is linear in ``(ln alpha, beta)`` and is
    solved by least squares; ``n_g`` minimizes the remaining sum of squares
    in a one-dimensional search over ``ln(n_g - max(u n_c))``. Fitting in
    ``x = u n_c`` makes the parameters independent of ``u``.

    Parameters
    ----------
    curve : LocalizationCurve
        Curve with at least five localized points.

    Returns
    -------
    FitParams
        Fitted parameters; ``rms_residual`` is the rms of ``ln L_c``.

    Raises
    ------
    InsufficientDataError
        If fewer than five points are localized.
    RankError
        If the coherence lengths (or the densities) are all equal.
    ConvergenceError
        If the search ends without a decreasing power law.
    """
    n_c, L_c = curve.arrays()
    if n_c.size < MIN_FIT_POINTS:
        raise InsufficientDataError(
            f"need at least {MIN_FIT_POINTS} localized points, got {n_c.size}"
        )
    if np.ptp(L_c) <= 1e-12 * np.max(L_c) or np.ptp(n_c) == 0:
        raise RankError("localization lengths or densities are constant; the power law is undetermined")

    x = curve.u * n_c
    log_L_c = np.log(L_c)
    x_max = float(np.max(x))
    scale = max(x_max, float(np.ptp(x)))

    def sse(t):
        return _log_fit(x, log_L_c, x_max + math.exp(t))[1]

    t_grid = np.linspace(math.log(1e-8 * scale), math.log(1e3 * scale), FIT_SCAN_POINTS)
    values = np.array([sse(t) for t in t_grid])
    i = int(np.argmin(values))
    if 0 < i < t_grid.size - 1:
        result = optimize.minimize_scalar(
            sse, bracket=(t_grid[i - 1], t_grid[i], t_grid[i + 1]), method="golden", tol=1e-10
        )
    else:
        lo, hi = t_grid[max(i - 1, 0)], t_grid[min(i + 1, t_grid.size - 1)]
        result = optimize.minimize_scalar(sse, bounds=(lo, hi), method="bounded", options={"xatol": 1e-10})

    t_best = float(result.x) if result.fun <= values[i] else float(t_grid[i])
    n_g = x_max + math.exp(t_best)
    (log_alpha, beta), total, rank = _log_fit(x, log_L_c, n_g)
    if rank < 2:
        raise RankError("design matrix of the log fit is rank deficient")
    rms = math.sqrt(total / x.size)
    if not (np.isfinite(beta) and beta < 0 and np.isfinite(log_alpha)) or i in (0, t_grid.size - 1):
        raise ConvergenceError(
            f"power-law fit did not find a diverging branch (beta={beta:.4g}, n_g={n_g:.4g})",
            best_estimate=(math.exp(log_alpha), beta, n_g),
            residual=rms,
        )
    logger.info("power-law fit: alpha=%.6g beta=%.6g n_g=%.6g rms=%.3g", math.exp(log_alpha), beta, n_g, rms)
    return FitParams(math.exp(log_alpha), beta, n_g, rms)


def rescale_solution(params, a: float):
    """
    Self-similarity map ``u -> u/a, n_c -> a n_c, psi -> sqrt(a) psi``.

    ``mu0``, ``L`` and ``L_c`` are unchanged by the map.

    Parameters
    ----------
    params : tuple
        ``(u, n_c, psi)`` with ``psi`` a RadialProfile or an array of samples.
    a : float
        Scale factor, ``a > 0``.

    Returns
    -------
    tuple
        The transformed ``(u, n_c, psi)``.
    """
    if not (math.isfinite(a) and a > 0):
        raise DomainError(f"scale factor must be positive, got {a}")
    u, n_c, psi = params
    factor = math.sqrt(a)
    if isinstance(psi, RadialProfile):
        psi = psi.scaled(factor)
    else:
        psi = factor * np.asarray(psi, dtype=float)
    return u / a, a * n_c, psi


def rescale_curve(curve: LocalizationCurve, a: float) -> LocalizationCurve:
    """
    Apply the self-similarity map to a whole curve.

    Parameters
    ----------
    curve : LocalizationCurve
        Curve at interaction ``u``.
    a : float
        Scale factor; the result belongs to ``u/a`` with densities ``a n_c``.

    Returns
    -------
    LocalizationCurve
        The rescaled curve.
    """
    if not (math.isfinite(a) and a > 0):
        raise DomainError(f"scale factor must be positive, got {a}")
    points = [
        CurvePoint(a * p.n_c, p.L_c, p.L_star, p.mu0_star, p.localized, p.note)
        for p in curve.points
    ]
    return LocalizationCurve(points, curve.u / a)


def density_grid(n_min: float, n_max: float, count: int, n_threshold: float):
    """
    Densities from ``n_min`` to ``n_max`` whose distance to ``n_threshold`` shrinks geometrically.

    Parameters
    ----------
    n_min, n_max : float
        First and last density, ``0 < n_min < n_max < n_threshold``.
    count : int
        Number of densities.
    n_threshold : float
        Expected critical density.

    Returns
    -------
    np.ndarray
        Increasing densities.
    """
    assert count >= 2, "count must be at least 2"
    if not 0 < n_min < n_max < n_threshold:
        raise ValueError("need 0 < n_min < n_max < n_threshold")
    gaps = np.geomspace(n_threshold - n_min, n_threshold - n_max, count)
    densities = n_threshold - gaps
    densities[0], densities[-1] = n_min, n_max
    return densities
