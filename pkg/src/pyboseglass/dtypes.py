"""
Data types shared across the package.

Grids, solver options, ground-state records, localization curves, fit
parameters, finite-temperature states, emission records and the exception
classes raised by the numerical modules.
"""

import csv
import math
from pathlib import Path
from typing import Callable, Iterable, Optional

import numpy as np

VARIANTS = ("as-printed", "limit-consistent")


def format_float(value) -> str:
    """Round-trip text form of a float, used for every CSV cell."""
    return format(float(value), ".17g")


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class RankError(ValueError):
    """Data too degenerate to determine the requested parameters."""


class InsufficientDataError(ValueError):
    """Fewer data points than an operation needs."""


class ConfigError(ValueError):
    """
    Invalid run configuration.

    Attributes
    ----------
    messages : list[str]
        One message per offending field, formatted as ``"[section] key: reason"``.
    """

    def __init__(self, messages):
        if isinstance(messages, str):
            messages = [messages]
        self.messages = list(messages)
        super().__init__("; ".join(self.messages))


class ConvergenceError(RuntimeError):
    """
    An iterative method exhausted its budget.

    Attributes
    ----------
    best_estimate : float, np.ndarray or None
        The best iterate available when the budget ran out.
    residual : float or None
        The residual belonging to ``best_estimate``.
    """

    def __init__(self, message: str, best_estimate=None, residual=None):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.residual = residual


class NotLocalizedError(RuntimeError):
    """
    The ground state is not localized (chemical potential not negative).

    Attributes
    ----------
    mu0 : float
        The dimensionless chemical potential at which localization was lost.
    """

    def __init__(self, mu0: float, message: Optional[str] = None):
        super().__init__(
            message or f"no localized solution (mu0 = {mu0:.6g} is not negative)"
        )
        self.mu0 = mu0


class NoLocalizedSolutionError(RuntimeError):
    """No well radius in a scan produced a localized ground state."""


class RadialGrid:
    """
    Radial grid of a two-dimensional, rotationally symmetric problem.

    Attributes
    ----------
    r : np.ndarray
        Strictly increasing radii with ``r[0] = 0``.
    node_count : int
        Number of nodes.
    r_max : float
        Outer cutoff ``r[-1]``.

    Methods
    -------
    uniform(r_max: float, nodes_per_unit: int) -> RadialGrid
        Uniform grid with spacing ``1/nodes_per_unit``; every integer radius is a node.
    cell_areas() -> np.ndarray
        Areas of the annular dual cells around every node.
    to_array() -> np.ndarray
        Copy of the radii.
    """

    def __init__(self, r):
        """
        Parameters
        ----------
        r : array_like
            Radii, strictly increasing, starting at 0.
        """
        r = np.asarray(r, dtype=float)
        if r.ndim != 1 or r.size < 3:
            raise ValueError("A radial grid needs at least 3 nodes.")
        if r[0] != 0.0:
            raise ValueError("A radial grid must start at r = 0.")
        if not np.all(np.diff(r) > 0):
            raise ValueError("Radial grid nodes must be strictly increasing.")
        self.r = r
        self.node_count = int(r.size)
        self.r_max = float(r[-1])

    @classmethod
    def uniform(cls, r_max: float, nodes_per_unit: int):
        """
        Create a uniform grid on ``[0, r_max]``.

        The spacing is exactly ``1/nodes_per_unit`` so that integer radii (the
        well edge ``r = 1`` in particular) fall on nodes. ``r_max`` is rounded
        up to the next multiple of the spacing.

        Parameters
        ----------
        r_max : float
            Requested outer cutoff.
        nodes_per_unit : int
            Number of intervals per unit length.

        Returns
        -------
        RadialGrid
            The uniform grid.
        """
        assert nodes_per_unit >= 1, "nodes_per_unit must be positive"
        assert r_max > 0, "r_max must be positive"
        intervals = max(2, int(math.ceil(r_max * nodes_per_unit - 1e-9)))
        return cls(np.arange(intervals + 1) / nodes_per_unit)

    def cell_areas(self):
        """
        Areas of the dual cells around the nodes.

        Node ``i`` owns the annulus between the midpoints to its neighbours; the
        first cell is the disk of radius ``r[1]/2`` and the last cell ends at
        ``r_max``. The areas sum to ``pi * r_max**2``.

        Returns
        -------
        np.ndarray
            Cell areas, same length as the grid.
        """
        faces = np.concatenate(([0.0], 0.5 * (self.r[1:] + self.r[:-1]), [self.r_max]))
        return np.pi * (faces[1:] ** 2 - faces[:-1] ** 2)

    def to_array(self):
        """
        Returns
        -------
        np.ndarray
            Copy of the radii.
        """
        return self.r.copy()

    def __len__(self):
        return self.node_count

    def __iter__(self):
        return iter(self.r)

    def __getitem__(self, index):
        return self.r[index]

    def __repr__(self):
        return f"RadialGrid(node_count={self.node_count}, r_max={self.r_max})"


class Bracket:
    """
    Sign-change interval of a scalar function.

    Attributes
    ----------
    lo, hi : float
        Interval endpoints (in any order).
    f_lo, f_hi : float
        Function values at the endpoints, with ``f_lo * f_hi <= 0``.
    """

    def __init__(self, lo: float, hi: float, f_lo: float, f_hi: float):
        if not all(np.isfinite([lo, hi])):
            raise ValueError("Bracket endpoints must be finite.")
        if np.isnan(f_lo) or np.isnan(f_hi) or np.sign(f_lo) * np.sign(f_hi) > 0:
            raise ValueError(
                f"Invalid bracket: f({lo}) = {f_lo} and f({hi}) = {f_hi} do not change sign."
            )
        self.lo = float(lo)
        self.hi = float(hi)
        self.f_lo = float(f_lo)
        self.f_hi = float(f_hi)

    @classmethod
    def from_function(cls, h: Callable[[float], float], lo: float, hi: float):
        """
        Evaluate ``h`` at both endpoints and build the bracket.

        Parameters
        ----------
        h : callable
            Scalar function.
        lo, hi : float
            Interval endpoints.
        """
        return cls(lo, hi, h(lo), h(hi))

    def swapped(self):
        """
        Returns
        -------
        Bracket
            The same interval with the endpoints exchanged.
        """
        return Bracket(self.hi, self.lo, self.f_hi, self.f_lo)

    @property
    def width(self):
        return abs(self.hi - self.lo)

    def __repr__(self):
        return f"Bracket(lo={self.lo}, hi={self.hi}, f_lo={self.f_lo}, f_hi={self.f_hi})"


class SolverOptions:
    """
    Numerical settings of the ground-state solver.

    Attributes
    ----------
    nodes_per_radius : int
        Grid intervals per well radius. Default is 200.
    decay_lengths : float
        The cutoff is placed this many decay lengths ``1/kappa`` beyond the well edge. Default is 8.
    r_max_min : float
        Smallest cutoff in units of the well radius. Default is 4.
    r_max_cap : float
        Largest admissible cutoff; states that need more are reported as not localized. Default is 400.
    residual_tol : float
        Convergence threshold of the normalized GP residual. Default is 1e-9.
    constraint_tol : float
        Admissible relative error of the amplitude condition. Default is 1e-8.
    stagnation_tol : float
        Relative change of the eigenvalue per step below which a relaxation counts as stalled. Default is 1e-10.
    max_iterations : int
        Imaginary-time step budget of one inner solve. Default is 200000.
    tau_initial, tau_min, tau_max : float
        Initial, smallest and largest imaginary-time step. Defaults are 1, 1e-12, 1e8.
    max_outer : int
        Evaluation budget of the amplitude root search. Default is 80.
    initial_guess : str
        "gaussian" (width ``min(1, l_h/L)``) or "linear" (ground state of the bare well). Default is "gaussian".
    """

    def __init__(
        self,
        nodes_per_radius: int = 200,
        decay_lengths: float = 8.0,
        r_max_min: float = 4.0,
        r_max_cap: float = 400.0,
        residual_tol: float = 1e-9,
        constraint_tol: float = 1e-8,
        stagnation_tol: float = 1e-10,
        max_iterations: int = 200000,
        tau_initial: float = 1.0,
        tau_min: float = 1e-12,
        tau_max: float = 1e8,
        max_outer: int = 80,
        initial_guess: str = "gaussian",
    ):
        assert nodes_per_radius >= 4, "nodes_per_radius must be at least 4"
        assert decay_lengths > 0, "decay_lengths must be positive"
        assert 1.0 < r_max_min <= r_max_cap, "need 1 < r_max_min <= r_max_cap"
        assert stagnation_tol > 0, "stagnation_tol must be positive"
        assert residual_tol > 0 and constraint_tol > 0, "tolerances must be positive"
        assert max_iterations >= 1 and max_outer >= 1, "budgets must be positive"
        assert 0 < tau_min <= tau_initial <= tau_max, "need tau_min <= tau_initial <= tau_max"
        assert initial_guess in ["gaussian", "linear"], "initial_guess must be 'gaussian' or 'linear'"

        self.nodes_per_radius = int(nodes_per_radius)
        self.decay_lengths = float(decay_lengths)
        self.r_max_min = float(r_max_min)
        self.r_max_cap = float(r_max_cap)
        self.residual_tol = float(residual_tol)
        self.constraint_tol = float(constraint_tol)
        self.stagnation_tol = float(stagnation_tol)
        self.max_iterations = int(max_iterations)
        self.tau_initial = float(tau_initial)
        self.tau_min = float(tau_min)
        self.tau_max = float(tau_max)
        self.max_outer = int(max_outer)
        self.initial_guess = initial_guess

    def to_dict(self):
        return dict(vars(self))

    def replace(self, **changes):
        """
        Returns
        -------
        SolverOptions
            A copy with the given fields changed.
        """
        values = self.to_dict()
        values.update(changes)
        return SolverOptions(**values)

    def __repr__(self):
        fields = ", ".join(f"{k}={v!r}" for k, v in self.to_dict().items())
        return f"SolverOptions({fields})"


class GpProblem:
    """
    Dimensionless constrained Gross-Pitaevskii problem for one cylindrical well.

    Lengths are in units of the disorder scale ``L0``, densities in ``1/L0**2``.

    Attributes
    ----------
    u : float
        Interaction strength, ``u >= 0``.
    n_c : float
        Condensate density, ``n_c > 0``.
    L : float
        Well radius, ``L > 0``.
    xi0 : float
        Disorder strength, fixed to 1 by the choice of ``L0``.
    options : SolverOptions
        Numerical settings.
    """

    def __init__(
        self,
        u: float,
        n_c: float,
        L: float,
        xi0: float = 1.0,
        options: Optional[SolverOptions] = None,
    ):
        if not (np.isfinite(u) and u >= 0):
            raise DomainError(f"u must be finite and non-negative, got {u}")
        if not (np.isfinite(n_c) and n_c > 0):
            raise DomainError(f"n_c must be finite and positive, got {n_c}")
        if not (np.isfinite(L) and L > 0):
            raise DomainError(f"L must be finite and positive, got {L}")
        if xi0 != 1.0:
            raise DomainError("xi0 is fixed to 1 by the choice of the length scale L0")
        self.u = float(u)
        self.n_c = float(n_c)
        self.L = float(L)
        self.xi0 = 1.0
        self.options = options if options is not None else SolverOptions()

    def __repr__(self):
        return f"GpProblem(u={self.u}, n_c={self.n_c}, L={self.L})"


class RadialProfile:
    """
    Radially symmetric order parameter sampled on a radial grid.

    Coordinates are in units of the well radius, the amplitude in units of
    its inverse.

    Attributes
    ----------
    grid : RadialGrid
        Sampling grid.
    psi : np.ndarray
        Samples of the order parameter.
    """

    def __init__(self, grid: RadialGrid, psi):
        psi = np.asarray(psi, dtype=float)
        if psi.shape != grid.r.shape:
            raise ValueError(
                f"Profile has {psi.size} samples but the grid has {grid.node_count} nodes."
            )
        if not np.all(np.isfinite(psi)):
            raise ValueError("Profile samples must be finite.")
        self.grid = grid
        self.psi = psi

    @property
    def r(self):
        return self.grid.r

    def is_nodeless(self):
        """
        Returns
        -------
        bool
            True if the samples never change sign.
        """
        return bool(np.all(self.psi >= 0) or np.all(self.psi <= 0))

    def is_decayed(self, rtol: float = 1e-6):
        """
        Returns
        -------
        bool
            True if the last sample is below ``rtol`` times the maximum.
        """
        peak = np.max(np.abs(self.psi))
        return bool(abs(self.psi[-1]) <= rtol * peak)

    def scaled(self, factor: float):
        """
        Returns
        -------
        RadialProfile
            The profile multiplied by ``factor`` on the same grid.
        """
        return RadialProfile(self.grid, factor * self.psi)

    def __repr__(self):
        return f"RadialProfile(node_count={self.grid.node_count}, r_max={self.grid.r_max}, psi_max={np.max(self.psi):.6g})"


class GpSolution:
    """
    Converged ground state of one well.

    Attributes
    ----------
    profile : RadialProfile
        The order parameter.
    mu0 : float
        Dimensionless chemical potential (the eigenvalue of the discrete equation is ``mu0 * L**2``).
    L : float
        Well radius.
    L_c : float
        Coherence length, ``L_c**2 = N / n_c``.
    healing_length : float
        ``2/sqrt(u*n_c)``; infinite for ``u = 0``.
    residual_norm : float
        Normalized discrete GP residual at the returned state.
    converged : bool
        True when the residual and the amplitude condition met their tolerances.
    u, n_c : float
        The problem parameters.
    particle_number : float
        ``N = integral of psi**2`` (equal to ``n_c * L_c**2``).
    coupling : float
        Effective coupling ``g = u * N`` of the unit-norm shape.
    constraint_residual : float
        Relative error of ``integral psi**4 / integral psi**2 = n_c * L**2``.
    iterations : int
        Imaginary-time steps of the final inner solve.
    energy_history : np.ndarray
        Discrete energy (unit-norm shape) after every accepted step.
    """

    def __init__(
        self,
        profile: RadialProfile,
        mu0: float,
        L: float,
        L_c: float,
        healing_length: float,
        residual_norm: float,
        converged: bool,
        u: float,
        n_c: float,
        particle_number: float,
        coupling: float,
        constraint_residual: float,
        iterations: int = 0,
        energy_history=None,
    ):
        self.profile = profile
        self.mu0 = float(mu0)
        self.L = float(L)
        self.L_c = float(L_c)
        self.healing_length = float(healing_length)
        self.residual_norm = float(residual_norm)
        self.converged = bool(converged)
        self.u = float(u)
        self.n_c = float(n_c)
        self.particle_number = float(particle_number)
        self.coupling = float(coupling)
        self.constraint_residual = float(constraint_residual)
        self.iterations = int(iterations)
        self.energy_history = (
            np.asarray(energy_history, dtype=float)
            if energy_history is not None
            else np.empty(0)
        )

    @property
    def localized(self):
        return self.mu0 < 0

    def __repr__(self):
        return (
            f"GpSolution(L={self.L}, mu0={self.mu0:.10g}, L_c={self.L_c:.10g}, "
            f"residual_norm={self.residual_norm:.3g}, converged={self.converged})"
        )


class ScanOptions:
    """
    Well-radius scan used to minimize the chemical potential.

    Attributes
    ----------
    L_min, L_max : float
        Scan range in units of L0. Defaults are 0.5 and 40.
    L_points : int
        Number of geometrically spaced coarse points. Default is 80.
    refine_rtol : float
        Relative tolerance of the golden-section refinement. Default is 1e-4.
    """

    def __init__(
        self,
        L_min: float = 0.5,
        L_max: float = 40.0,
        L_points: int = 80,
        refine_rtol: float = 1e-4,
    ):
        assert 0 < L_min < L_max, "need 0 < L_min < L_max"
        assert L_points >= 3, "the scan needs at least 3 points"
        assert refine_rtol > 0, "refine_rtol must be positive"
        self.L_min = float(L_min)
        self.L_max = float(L_max)
        self.L_points = int(L_points)
        self.refine_rtol = float(refine_rtol)

    def L_values(self):
        """
        Returns
        -------
        np.ndarray
            The coarse scan radii.
        """
        return np.geomspace(self.L_min, self.L_max, self.L_points)

    def to_dict(self):
        return dict(vars(self))

    def __repr__(self):
        fields = ", ".join(f"{k}={v!r}" for k, v in self.to_dict().items())
        return f"ScanOptions({fields})"


class OptimalLake:
    """
    Well radius minimizing the chemical potential at fixed density.

    Attributes
    ----------
    L_star : float
        Minimizing radius.
    mu0_star : float
        Minimal chemical potential (negative).
    L_c : float
        Coherence length at the minimum.
    solution : GpSolution
        Ground state at ``L_star``.
    """

    def __init__(self, L_star: float, mu0_star: float, L_c: float, solution: GpSolution):
        assert mu0_star < 0, "an optimal lake must be localized"
        self.L_star = float(L_star)
        self.mu0_star = float(mu0_star)
        self.L_c = float(L_c)
        self.solution = solution

    def __repr__(self):
        return f"OptimalLake(L_star={self.L_star:.8g}, mu0_star={self.mu0_star:.8g}, L_c={self.L_c:.8g})"


class CurvePoint:
    """
    One density of a localization curve.

    Attributes
    ----------
    n_c : float
        Condensate density.
    L_c, L_star, mu0_star : float
        Coherence length, optimal radius and minimal chemical potential; NaN when not localized.
    localized : bool
        Whether a localized lake was found.
    note : str
        Reason for a missing point (empty when localized).
    """

    def __init__(
        self,
        n_c: float,
        L_c: float = math.nan,
        L_star: float = math.nan,
        mu0_star: float = math.nan,
        localized: bool = False,
        note: str = "",
    ):
        self.n_c = float(n_c)
        self.L_c = float(L_c)
        self.L_star = float(L_star)
        self.mu0_star = float(mu0_star)
        self.localized = bool(localized)
        self.note = note

    @classmethod
    def from_lake(cls, n_c: float, lake: OptimalLake):
        return cls(n_c, lake.L_c, lake.L_star, lake.mu0_star, True)

    def to_array(self):
        return np.array([self.n_c, self.L_c, self.L_star, self.mu0_star, float(self.localized)])

    def __repr__(self):
        return (
            f"CurvePoint(n_c={self.n_c}, L_c={self.L_c}, L_star={self.L_star}, "
            f"mu0_star={self.mu0_star}, localized={self.localized})"
        )


class LocalizationCurve:
    """
    Coherence length versus condensate density at fixed interaction strength.

    Attributes
    ----------
    points : list[CurvePoint]
        One point per requested density, in input order.
    u : float
        Interaction strength.

    Methods
    -------
    localized_points() -> list[CurvePoint]
        Points that produced a localized lake.
    arrays() -> tuple[np.ndarray, np.ndarray]
        Densities and coherence lengths of the localized points.
    to_csv(path)
        Write the curve (columns n_c, L_c, L_star, mu0_star, localized_flag).
    from_csv(path, u) -> LocalizationCurve
        Read a curve written by ``to_csv``.
    """

    COLUMNS = ["n_c", "L_c", "L_star", "mu0_star", "localized_flag"]

    def __init__(self, points: Iterable[CurvePoint], u: float):
        self.points = list(points)
        self.u = float(u)

    def localized_points(self):
        return [p for p in self.points if p.localized]

    def arrays(self):
        pts = self.localized_points()
        return (
            np.array([p.n_c for p in pts], dtype=float),
            np.array([p.L_c for p in pts], dtype=float),
        )

    def to_rows(self):
        """
        Returns
        -------
        list[list[str]]
            CSV rows without header; floats with 17 significant digits.
        """
        return [
            [
                format_float(p.n_c),
                format_float(p.L_c),
                format_float(p.L_star),
                format_float(p.mu0_star),
                str(int(p.localized)),
            ]
            for p in self.points
        ]

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(self.COLUMNS)
            writer.writerows(self.to_rows())

    @classmethod
    def from_csv(cls, path, u: float = 1.0):
        points = []
        with open(Path(path), newline="", encoding="utf-8") as f:
            for row in csv.DictReader(f):
                points.append(
                    CurvePoint(
                        float(row["n_c"]),
                        float(row["L_c"]),
                        float(row["L_star"]),
                        float(row["mu0_star"]),
                        bool(int(row["localized_flag"])),
                    )
                )
        return cls(points, u)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __repr__(self):
        return f"LocalizationCurve(u={self.u}, points={len(self.points)}, localized={len(self.localized_points())})"


class FitParams:
    """
    Critical power law ``L_c = alpha * (n_g - u*n_c)**beta``.

    The fit is done in the product ``x = u * n_c`` so the parameters are the
    same for every interaction strength; the critical condensate density is
    ``n_g / u``.

    Attributes
    ----------
    alpha : float
        Amplitude, positive.
    beta : float
        Exponent, negative.
    n_g : float
        Critical value of ``u * n_c``.
    rms_residual : float
        Root-mean-square residual of ``ln L_c``.
    """

    def __init__(self, alpha: float, beta: float, n_g: float, rms_residual: float = 0.0):
        assert alpha > 0, "alpha must be positive"
        assert beta < 0, "beta must be negative"
        assert n_g > 0, "n_g must be positive"
        self.alpha = float(alpha)
        self.beta = float(beta)
        self.n_g = float(n_g)
        self.rms_residual = float(rms_residual)

    @classmethod
    def default(cls):
        """
        Returns
        -------
        FitParams
            alpha = 5.4, beta = -0.1317, n_g = 0.074.
        """
        return cls(5.4, -0.1317, 0.074)

    def log_localization_length(self, x):
        """
        Natural log of ``L_c`` at ``x = u * n_c``, finite up to the critical point.
        """
        x = np.asarray(x, dtype=float)
        return math.log(self.alpha) + self.beta * np.log(self.n_g - x)

    def localization_length(self, x):
        """
        ``L_c`` at ``x = u * n_c``; infinite at ``x = n_g``.
        """
        with np.errstate(divide="ignore", over="ignore"):
            return np.exp(self.log_localization_length(x))

    def to_dict(self):
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "n_g": self.n_g,
            "rms": self.rms_residual,
        }

    @classmethod
    def from_dict(cls, values: dict):
        return cls(
            float(values["alpha"]),
            float(values["beta"]),
            float(values["n_g"]),
            float(values.get("rms", 0.0)),
        )

    def to_array(self):
        return np.array([self.alpha, self.beta, self.n_g])

    def __iter__(self):
        return iter(self.to_array())

    def __getitem__(self, index: int):
        return self.to_array()[index]

    def __repr__(self):
        return (
            f"FitParams(alpha={self.alpha:.8g}, beta={self.beta:.8g}, "
            f"n_g={self.n_g:.8g}, rms_residual={self.rms_residual:.3g})"
        )


class ThermoInput:
    """
    Input of the finite-temperature problem.

    Attributes
    ----------
    n : float
        Total dimensionless density (units 1/L0**2).
    T : float
        Temperature in K.
    u : float
        Interaction strength.
    fit : FitParams
        Critical power law.
    M : float
        Boson mass in kg.
    L0 : float
        Disorder length scale in m.
    """

    def __init__(self, n: float, T: float, u: float, fit: FitParams, M: float, L0: float):
        if not (n > 0 and T > 0 and u > 0 and M > 0 and L0 > 0):
            raise DomainError("n, T, u, M and L0 must all be positive")
        assert isinstance(fit, FitParams), "fit must be a FitParams instance"
        self.n = float(n)
        self.T = float(T)
        self.u = float(u)
        self.fit = fit
        self.M = float(M)
        self.L0 = float(L0)

    def __repr__(self):
        return f"ThermoInput(n={self.n}, T={self.T}, u={self.u}, M={self.M}, L0={self.L0})"


class ThermoState:
    """
    Solution of the finite-temperature system at one temperature.

    Lengths without suffix are dimensionless (units of L0); the ``*_m`` and
    ``*_um`` properties are their SI mirrors.

    Attributes
    ----------
    T : float
        Temperature in K.
    n : float
        Total density.
    n_c : float
        Condensate density.
    L_c : float
        Localization length.
    Lambda, Lambda_cr : float
        Thermal and critical de Broglie wavelengths.
    condensed : bool
        Whether a condensate is present.
    L0 : float
        Length scale in m.
    cap : float
        Critical condensate density ``n_g / u``.
    root_count : int
        Sign changes of the condensate mismatch found on the scan.
    log_gap : float
        ``ln(n_g - u*n_c)``, which keeps the distance to the cap exact where ``n_c`` rounds to it.
    error : str or None
        Failure message for sweep points that did not solve.
    """

    def __init__(
        self,
        T: float,
        n: float,
        n_c: float,
        L_c: float,
        Lambda: float,
        Lambda_cr: float,
        condensed: bool,
        L0: float,
        cap: float = math.inf,
        root_count: int = 0,
        log_gap: float = math.nan,
        error: Optional[str] = None,
    ):
        self.T = float(T)
        self.n = float(n)
        self.n_c = float(n_c)
        self.L_c = float(L_c)
        self.Lambda = float(Lambda)
        self.Lambda_cr = float(Lambda_cr)
        self.condensed = bool(condensed)
        self.L0 = float(L0)
        self.cap = float(cap)
        self.root_count = int(root_count)
        self.log_gap = float(log_gap)
        self.error = error

    @classmethod
    def failed(cls, T: float, n: float, L0: float, message: str):
        nan = math.nan
        return cls(T, n, nan, nan, nan, nan, False, L0, error=message)

    @property
    def condensate_fraction(self):
        return self.n_c / self.n

    @property
    def L_c_m(self):
        return self.L_c * self.L0

    @property
    def L_c_um(self):
        return self.L_c * self.L0 * 1e6

    @property
    def Lambda_m(self):
        return self.Lambda * self.L0

    @property
    def Lambda_cr_m(self):
        return self.Lambda_cr * self.L0

    def residuals(self, fit: FitParams, u: float):
        """
        Relative residuals of the three equations of the finite-temperature system.

        Parameters
        ----------
        fit : FitParams
            Critical power law.
        u : float
            Interaction strength.

        Returns
        -------
        tuple[float, float, float]
            Residuals of the condensate-fraction equation (zero when not
            condensed), the critical-wavelength equation and the power law.
            The power law is compared in log form through ``log_gap``, which
            must also agree with ``n_c``.
        """
        y = self.Lambda_cr**2
        r1 = (1.0 - self.n_c / self.n) - y / self.Lambda**2 if self.condensed else 0.0
        lhs2 = self.n * y
        rhs2 = math.log(2.0) + 2.0 * math.log(self.L_c) - math.log(y)
        r2 = abs(lhs2 - rhs2) / max(1.0, abs(lhs2))
        if math.isnan(self.log_gap):
            r3 = abs(math.log(self.L_c) - float(fit.log_localization_length(u * self.n_c)))
        else:
            power_law = abs(math.log(self.L_c) - (math.log(fit.alpha) + fit.beta * self.log_gap))
            gap = abs(u * self.n_c + math.exp(self.log_gap) - fit.n_g) / fit.n_g
            r3 = max(power_law / max(1.0, abs(math.log(self.L_c))), gap)
        return abs(r1), r2, r3

    def __repr__(self):
        return (
            f"ThermoState(T={self.T}, n_c={self.n_c:.8g}, fraction={self.condensate_fraction:.6g}, "
            f"L_c={self.L_c:.8g}, condensed={self.condensed})"
        )


class EmissionModel:
    """
    Optical parameters of the superradiant emission of a condensate lake.

    Attributes
    ----------
    a0 : float
        Exciton Bohr radius in m.
    gamma0 : float
        Bulk recombination rate in 1/s.
    wavelength : float
        Wavelength in the material in m. Default is 228e-9 (GaAs).
    variant : str
        Cooperativity prefactor, "limit-consistent" (default) or "as-printed".
    """

    def __init__(
        self,
        a0: float,
        gamma0: float,
        wavelength: float = 228e-9,
        variant: str = "limit-consistent",
    ):
        if not (a0 > 0 and gamma0 > 0 and wavelength > 0):
            raise DomainError("a0, gamma0 and wavelength must be positive")
        assert variant in VARIANTS, f"variant must be one of {VARIANTS}"
        self.a0 = float(a0)
        self.gamma0 = float(gamma0)
        self.wavelength = float(wavelength)
        self.variant = variant

    @property
    def k(self):
        return 2.0 * math.pi / self.wavelength

    def __repr__(self):
        return (
            f"EmissionModel(a0={self.a0}, gamma0={self.gamma0}, "
            f"wavelength={self.wavelength}, variant={self.variant!r})"
        )


class EmissionReport:
    """
    Scalar emission observables of one lake.

    Attributes
    ----------
    a_c : float
        Condensate radius in m.
    k_a_c : float
        Product of wavenumber and condensate radius.
    N_e : float
        Number of exciton modes.
    mu_c_as_printed, mu_c_limit_consistent : float
        Cooperativity in both prefactor variants.
    enhancement : float
        ``gamma/gamma0`` for the model's variant.
    gamma : float
        Superradiant rate in 1/s.
    """

    COLUMNS = ["a_c_m", "N_e", "mu_c_as_printed", "mu_c_limit_consistent", "enhancement"]

    def __init__(
        self,
        a_c: float,
        k_a_c: float,
        N_e: float,
        mu_c_as_printed: float,
        mu_c_limit_consistent: float,
        enhancement: float,
        gamma: float,
    ):
        self.a_c = float(a_c)
        self.k_a_c = float(k_a_c)
        self.N_e = float(N_e)
        self.mu_c_as_printed = float(mu_c_as_printed)
        self.mu_c_limit_consistent = float(mu_c_limit_consistent)
        self.enhancement = float(enhancement)
        self.gamma = float(gamma)

    def to_row(self):
        return [
            format_float(self.a_c),
            format_float(self.N_e),
            format_float(self.mu_c_as_printed),
            format_float(self.mu_c_limit_consistent),
            format_float(self.enhancement),
        ]

    def __repr__(self):
        return (
            f"EmissionReport(a_c={self.a_c:.6g}, k_a_c={self.k_a_c:.6g}, N_e={self.N_e:.6g}, "
            f"enhancement={self.enhancement:.6g})"
        )


class PatternSample:
    """
    One sample of the angular emission pattern.

    Attributes
    ----------
    phi : float
        Polar angle from the well normal in rad, within ``[0, pi]``.
    chi : float
        Dipole orientation angle in rad.
    intensity : float
        Relative power per unit angle, non-negative.
    """

    def __init__(self, phi: float, chi: float, intensity: float):
        assert 0.0 <= phi <= math.pi, "phi must lie in [0, pi]"
        assert intensity >= 0.0, "intensity must be non-negative"
        self.phi = float(phi)
        self.chi = float(chi)
        self.intensity = float(intensity)

    def to_array(self):
        return np.array([self.phi, self.chi, self.intensity])

    def __iter__(self):
        return iter(self.to_array())

    def __getitem__(self, index: int):
        if index < 0 or index > 2:
            raise IndexError("Index must be 0, 1, or 2 for phi, chi, intensity respectively.")
        return self.to_array()[index]

    def __repr__(self):
        return f"PatternSample(phi={self.phi}, chi={self.chi}, intensity={self.intensity})"
