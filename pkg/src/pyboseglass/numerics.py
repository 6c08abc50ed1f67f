"""
Shared numerical kernel: special functions, radial quadrature and bracketed root finding.

Every function here is pure and safe to call from concurrent workers.

Functions:
- `bessel_j0(x)`, `bessel_j1(x)`: Bessel functions of the first kind.
- `modified_bessel_k0_k1(x)`: Modified Bessel functions of the second kind of orders 0 and 1.
- `integrate_radial_2d(f, grid)`: Integral of a radial function over the disk.
- `adaptive_quadrature(g, a, b, tol)`: Adaptive Gauss-Kronrod quadrature with an error budget.
- `find_root_bracketed(h, bracket, tol)`: Brent's method on a sign-change interval.
- `parallel_map(func, items, workers)`: Ordered map over independent sweep points.
"""

import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy import integrate, optimize, special

from .dtypes import Bracket, ConvergenceError, DomainError, RadialGrid

logger = logging.getLogger(__name__)


def _check_finite(x):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("Bessel functions need finite arguments.")
    return x


def _scalar_or_array(value):
    return float(value) if np.ndim(value) == 0 else value


def bessel_j0(x):
    """
    Bessel function of the first kind of order 0.

    Parameters
    ----------
    x : float or array_like
        Finite argument(s).

    Returns
    -------
    float or np.ndarray
        J0(x).
    """
    return _scalar_or_array(special.j0(_check_finite(x)))


def bessel_j1(x):
    """
    Bessel function of the first kind of order 1.

    Parameters
    ----------
    x : float or array_like
        Finite argument(s).

    Returns
    -------
    float or np.ndarray
        J1(x), accurate to about 1e-15 absolute.

    Raises
    ------
    DomainError
        If any argument is NaN or infinite.
    """
    return _scalar_or_array(special.j1(_check_finite(x)))


def modified_bessel_k0_k1(x):
    """
    Modified Bessel functions of the second kind, K0 and K1.

    Parameters
    ----------
    x : float or array_like
        Positive argument(s).

    Returns
    -------
    tuple
        (K0(x), K1(x)).

    Raises
    ------
    DomainError
        If any argument is not positive or not finite.
    """
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)) or np.any(x <= 0):
        raise DomainError("K0 and K1 are defined for finite x > 0 only.")
    return _scalar_or_array(special.k0(x)), _scalar_or_array(special.k1(x))


def integrate_radial_2d(f, grid: RadialGrid) -> float:
    """
    Integrate a rotationally symmetric function over the disk of radius ``grid.r_max``.

    Computes the integral of ``f(r) * 2 * pi * r`` on ``[0, r_max]`` with the
    composite Simpson rule, which is fourth order on smooth data.

    Parameters
    ----------
    f : array_like
        Samples of the integrand on every grid node.
    grid : RadialGrid
        The grid the samples belong to.

    Returns
    -------
    float
        The two-dimensional integral.
    """
    f = np.asarray(f, dtype=float)
    if f.shape != grid.r.shape:
        raise ValueError(
            f"Got {f.size} samples for a grid with {grid.node_count} nodes."
        )
    return float(integrate.simpson(2.0 * np.pi * grid.r * f, x=grid.r))


def adaptive_quadrature(g, a: float, b: float, tol: float, points=None, limit: int = 200) -> float:
    """
    Adaptive Gauss-Kronrod quadrature of a bounded integrand.

    Parameters
    ----------
    g : callable
        Integrand on ``[a, b]``.
    a, b : float
        Integration limits, ``a < b``.
    tol : float
        Absolute error budget.
    points : sequence of float, optional
        Interior points where the integrand oscillates or has kinks.
    limit : int, optional
        Subdivision budget. Default is 200.

    Returns
    -------
    float
        Integral estimate with estimated absolute error ``<= tol``.

    Raises
    ------
    ConvergenceError
        If the subdivision budget is exhausted; the best estimate is attached.
    """
    assert a < b, "Need a < b"
    assert tol > 0, "Tolerance must be positive"

    if points is not None:
        points = [p for p in points if a < p < b] or None
    result = integrate.quad(
        g, a, b, epsabs=tol, epsrel=0.0, limit=limit, points=points, full_output=1
    )
    value, error = result[0], result[1]
    # quad appends a message (and explanation) when ier > 0
    if len(result) > 3 or error > tol:
        message = result[3] if len(result) > 3 else "error estimate above tolerance"
        raise ConvergenceError(
            f"Quadrature on [{a}, {b}] did not converge: {message}",
            best_estimate=value,
            residual=error,
        )
    return float(value)


def find_root_bracketed(h, bracket: Bracket, tol: float = 1e-12, maxiter: int = 200) -> float:
    """
    Find a root of a scalar function inside a sign-change interval.

    Uses Brent's method, i.e. bisection safeguarded inverse quadratic and
    secant steps. The endpoints are sorted first, so swapping them leaves the
    result unchanged.

    Parameters
    ----------
    h : callable
        Continuous scalar function.
    bracket : Bracket
        Interval with ``f_lo * f_hi <= 0``.
    tol : float, optional
        Absolute tolerance on the root. Default is 1e-12.
    maxiter : int, optional
        Iteration budget. Default is 200.

    Returns
    -------
    float
        The root.
    """
    assert tol > 0, "Tolerance must be positive"
    if not isinstance(bracket, Bracket):
        raise ValueError("find_root_bracketed needs a Bracket instance.")

    (lo, f_lo), (hi, f_hi) = sorted([(bracket.lo, bracket.f_lo), (bracket.hi, bracket.f_hi)])
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi

    root, info = optimize.brentq(h, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps,
                                 maxiter=maxiter, full_output=True, disp=False)
    if not info.converged:
        raise ConvergenceError(
            f"Root search on [{lo}, {hi}] did not converge ({info.flag}).",
            best_estimate=root,
        )
    logger.debug("root %.17g after %d iterations", root, info.iterations)
    return float(root)


def parallel_map(func, items, workers: int = 1):
    """
    Apply ``func`` to every item, optionally on a thread pool.

    Parameters
    ----------
    func : callable
        Function of one item.
    items : iterable
        Inputs.
    workers : int, optional
        Number of worker threads; 1 evaluates sequentially. Default is 1.

    Returns
    -------
    list
        Results in input order.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as executor:
        return list(executor.map(func, items))
