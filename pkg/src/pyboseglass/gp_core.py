"""
Ground state of the dimensionless constrained Gross-Pitaevskii problem in one cylindrical well.

Coordinates are in units of the well radius L, so the well edge sits at ``r = 1``
and the problem reads

    -lap(psi) - L*theta(1 - r)*psi + u*psi**3 = mu0*L**2*psi,
    integral(psi**4) / integral(psi**2) = n_c * L**2.

The radial operator is discretized with finite volumes (piecewise-linear
elements with lumped mass) on a uniform grid whose nodes include ``r = 1``.
The last node carries the Dirichlet condition ``psi(r_max) = 0``. All norms
used by the solver are the dual-cell sums of that discretization, which makes
the discrete problem exactly variational.

Functions:
- `linear_well_eigenvalue(L)`: Exact ``mu0*L**2`` of the bare well (u = 0).
- `linear_well_profile(L, grid)`: Exact bare-well eigenfunction sampled on a grid.
- `solve_gp(problem)`: Constrained ground state of one well.
- `chemical_potential(profile, u, L)`: Discrete Rayleigh quotient.
- `gp_residual(solution, u)`: Normalized discrete residual of the GP equation.
- `gp_energy(profile, u, L)`: Discrete GP energy functional.
"""

import logging
import math
import warnings
from typing import Optional

import numpy as np
from scipy import linalg, special

from .dtypes import (
    Bracket,
    ConvergenceError,
    DomainError,
    GpProblem,
    GpSolution,
    NotLocalizedError,
    RadialGrid,
    RadialProfile,
    SolverOptions,
)
from .numerics import bessel_j0, bessel_j1, find_root_bracketed, modified_bessel_k0_k1

logger = logging.getLogger(__name__)

# Relative slack for accepting an imaginary-time step as energy non-increasing
ENERGY_SLACK = 1e-12

# Spectral shift below the lowest eigenvalue of the frozen operator, relative
SHIFT_GAP = 1e-6

# A cutoff within this factor of the decay-length estimate is kept
CUTOFF_SLACK = 1.05

# A relaxation whose eigenvalue stagnates for this many steps is stalled
STALL_STEPS = 50

# Steps after which a relaxation that has not halved its residual is stalled
CRAWL_STEPS = 2000

# Outer part of the grid, as a fraction of r_max, and the peak fraction above which a profile reaches the wall
OUTER_SHELL = 0.75
SPREAD_RTOL = 0.05


def linear_well_eigenvalue(L: float) -> float:
    """
    Ground-state eigenvalue ``lam = mu0 * L**2`` of the bare well (u = 0).

    Solves the matching condition of the interior and exterior solutions at
    the well edge,

        q * J1(q) / J0(q) = kappa * K1(kappa) / K0(kappa),

    with ``q**2 = L + lam`` and ``kappa**2 = -lam``. A nodeless ground state
    has ``q`` below the first zero of J0, which brackets the root.

    Parameters
    ----------
    L : float
        Well radius in units of L0.

    Returns
    -------
    float
        The eigenvalue ``mu0 * L**2`` (negative).
    """
    if not (np.isfinite(L) and L > 0):
        raise DomainError(f"L must be finite and positive, got {L}")

    def mismatch(lam):
        q = math.sqrt(L + lam)
        kappa = math.sqrt(-lam)
        k0, k1 = modified_bessel_k0_k1(kappa)
        return q * bessel_j1(q) / bessel_j0(q) - kappa * k1 / k0

    q_max = special.jn_zeros(0, 1)[0] * (1.0 - 1e-12)
    lo = -L
    hi = min(-1e-300, q_max**2 - L)
    f_hi = mismatch(hi)
    if f_hi <= 0:
        # binding energy below double precision
        return hi
    bracket = Bracket(lo, hi, mismatch(lo), f_hi)
    return find_root_bracketed(mismatch, bracket, tol=1e-15 * max(1.0, L))


def linear_well_profile(L: float, grid: RadialGrid) -> RadialProfile:
    """
    Exact bare-well ground state sampled on a grid, scaled to ``psi(0) = 1``.

    Parameters
    ----------
    L : float
        Well radius in units of L0.
    grid : RadialGrid
        Grid in units of the well radius.

    Returns
    -------
    RadialProfile
        ``J0(q*r)`` inside the well, ``J0(q) K0(kappa*r)/K0(kappa)`` outside.
    """
    lam = linear_well_eigenvalue(L)
    q = math.sqrt(L + lam)
    kappa = math.sqrt(-lam)
    r = grid.r
    inside = r <= 1.0
    psi = np.empty_like(r)
    psi[inside] = bessel_j0(q * r[inside])
    k0_edge, _ = modified_bessel_k0_k1(kappa)
    psi[~inside] = bessel_j0(q) * special.k0(kappa * r[~inside]) / k0_edge
    return RadialProfile(grid, psi)


class _WellOperator:
    """
    Finite-volume form of the radial GP operator for one grid and well radius.

    Unknowns are the nodes ``0 .. node_count - 2``. In the symmetrized variable
    ``phi = sqrt(W) * psi`` the linear part is the symmetric tridiagonal matrix
    with diagonal ``K_ii/W_i + V_i`` and off-diagonal ``K_i,i+1 / sqrt(W_i W_i+1)``.
    """

    def __init__(self, grid: RadialGrid, L: float):
        r = grid.r
        n = grid.node_count - 1
        midpoints = 0.5 * (r[1:] + r[:-1])
        conductance = 2.0 * np.pi * midpoints / np.diff(r)

        stiffness_diag = conductance.copy()
        stiffness_diag[1:] += conductance[:-1]
        stiffness_off = -conductance[: n - 1]

        theta = (r[:n] < 1.0).astype(float)
        theta[np.isclose(r[:n], 1.0, rtol=0.0, atol=1e-12)] = 0.5

        self.grid = grid
        self.L = float(L)
        self.size = n
        self.weights = grid.cell_areas()[:n]
        self.sqrt_weights = np.sqrt(self.weights)
        self.potential = -L * theta
        self.stiffness_diag = stiffness_diag
        self.stiffness_off = stiffness_off
        self.diag_linear = stiffness_diag / self.weights + self.potential
        self.off = stiffness_off / (self.sqrt_weights[:-1] * self.sqrt_weights[1:])

    def diagonal(self, phi, g: float):
        return self.diag_linear + g * phi**2 / self.weights

    def matvec(self, diag, x):
        y = diag * x
        y[:-1] += self.off * x[1:]
        y[1:] += self.off * x[:-1]
        return y

    def quartic(self, phi) -> float:
        return float(np.sum(phi**4 / self.weights))

    def energy(self, phi, g: float) -> float:
        return float(phi @ self.matvec(self.diag_linear, phi)) + 0.5 * g * self.quartic(phi)

    def eigen_residual(self, phi, g: float):
        """Rayleigh quotient and residual norm of a unit-norm ``phi``."""
        a_phi = self.matvec(self.diagonal(phi, g), phi)
        lam = float(phi @ a_phi)
        return lam, float(np.linalg.norm(a_phi - lam * phi))

    def lowest_eigenvalue(self, diag) -> float:
        return float(
            linalg.eigvalsh_tridiagonal(diag, self.off, select="i", select_range=(0, 0))[0]
        )

    def from_profile(self, psi):
        phi = self.sqrt_weights * np.asarray(psi, dtype=float)[: self.size]
        return _normalized(phi)

    def to_profile(self, phi, particle_number: float) -> RadialProfile:
        psi = math.sqrt(particle_number) * phi / self.sqrt_weights
        return RadialProfile(self.grid, np.append(psi, 0.0))

    def initial_guess(self, kind: str, width: float):
        r = self.grid.r[: self.size]
        if kind == "linear":
            psi = linear_well_profile(self.L, self.grid).psi
        else:
            psi = np.exp(-0.5 * (r / width) ** 2)
        return self.from_profile(psi)


class _RelaxedState:
    def __init__(self, phi, lam, energy, residual, iterations, history):
        self.phi = phi
        self.lam = lam
        self.energy = energy
        self.residual = residual
        self.iterations = iterations
        self.history = history


def _normalized(phi):
    norm = np.linalg.norm(phi)
    if norm == 0 or not np.isfinite(norm):
        raise DomainError("Cannot normalize a zero or non-finite profile.")
    phi = phi / norm
    return phi if np.sum(phi) >= 0 else -phi


def _spread_to_wall(op: _WellOperator, phi) -> bool:
    """True if the profile keeps a sizable fraction of its peak in the outer shell of the grid."""
    psi = np.abs(phi / op.sqrt_weights)
    outer = op.grid.r[: op.size] >= OUTER_SHELL * op.grid.r_max
    return bool(np.max(psi[outer]) > SPREAD_RTOL * np.max(psi))


def _relax(op: _WellOperator, g: float, phi, options: SolverOptions) -> _RelaxedState:
    """
    Normalized gradient flow (backward Euler in imaginary time) at fixed coupling ``g``.

    Every step solves ``(I + tau*(A(phi) - s)) phi_new = phi`` with ``s`` just
    below the lowest eigenvalue of the frozen operator ``A(phi)``, then
    renormalizes. A step is accepted only if the discrete energy does not
    increase; ``tau`` doubles on acceptance and halves on rejection.

    Raises
    ------
    NotLocalizedError
        As soon as neither the iterate nor the frozen operator is bound, or
        when the flow stalls with a state that is unbound within the box or
        spread out to the cutoff.
    """
    phi = _normalized(phi)
    tau = options.tau_initial
    energy = op.energy(phi, g)
    history = [energy]
    banded = np.zeros((2, op.size))
    # eigenvalues above minus the confinement energy of the empty disc count as zero
    box_floor = -((special.jn_zeros(0, 1)[0] / op.grid.r_max) ** 2)
    lam_previous = math.nan
    stagnant = 0
    window_residual, window_start = math.inf, 0

    for iteration in range(options.max_iterations):
        diag = op.diagonal(phi, g)
        lam, residual = op.eigen_residual(phi, g)
        if residual <= options.residual_tol:
            logger.debug(
                "relaxed g=%.6g in %d steps: lam=%.12g residual=%.3g",
                g, iteration, lam, residual,
            )
            return _RelaxedState(phi, lam, energy, residual, iteration, history)

        lowest = op.lowest_eigenvalue(diag)
        if lam >= 0 and lowest >= 0:
            logger.debug("g=%.6g: unbound after %d steps (lam=%.6g)", g, iteration, lam)
            raise NotLocalizedError(lam / op.L**2)

        if residual <= 0.5 * window_residual:
            window_residual, window_start = residual, iteration
        if abs(lam - lam_previous) <= options.stagnation_tol * max(1.0, abs(lam)):
            stagnant += 1
        else:
            stagnant = 0
        lam_previous = lam
        if stagnant >= STALL_STEPS or iteration - window_start >= CRAWL_STEPS:
            if lam >= box_floor or _spread_to_wall(op, phi):
                logger.debug(
                    "g=%.6g: stalled after %d steps at lam=%.6g residual=%.3g",
                    g, iteration, lam, residual,
                )
                raise NotLocalizedError(lam / op.L**2)
            stagnant, window_residual, window_start = 0, residual, iteration

        shift = lowest - SHIFT_GAP * max(1.0, abs(lowest))

        while True:
            banded[0, 1:] = tau * op.off
            banded[1, :] = 1.0 + tau * (diag - shift)
            candidate = linalg.solveh_banded(banded, phi, check_finite=False)
            candidate = _normalized(np.maximum(_normalized(candidate), 0.0))
            candidate_energy = op.energy(candidate, g)
            if candidate_energy <= energy + ENERGY_SLACK * max(1.0, abs(energy)):
                tau = min(2.0 * tau, options.tau_max)
                break
            tau *= 0.5
            if tau < options.tau_min:
                raise ConvergenceError(
                    "Imaginary-time step fell below tau_min without decreasing the energy.",
                    best_estimate=phi,
                    residual=residual,
                )
        phi = candidate
        energy = candidate_energy
        history.append(energy)

    lam, residual = op.eigen_residual(phi, g)
    raise ConvergenceError(
        f"GP relaxation did not converge in {options.max_iterations} steps "
        f"(residual {residual:.3g}).",
        best_estimate=phi,
        residual=residual,
    )


def _solve_amplitude(op: _WellOperator, target: float, phi, options: SolverOptions):
    """
    Find the coupling ``g = u*N`` with ``g * P(g) = target`` on a fixed grid.

    ``P(g)`` is the quartic integral of the unit-norm shape relaxed at ``g``;
    ``target = u * n_c * L**2``.

    Returns
    -------
    tuple[float, _RelaxedState]
        The coupling and the relaxed state at it.
    """
    L2 = op.L**2
    state = _relax(op, 0.0, phi, options)
    if state.lam >= 0:
        raise NotLocalizedError(state.lam / L2)
    if target == 0.0:
        return 0.0, state

    # g*P(g) <= g*P(0), so the first guess never overshoots
    g_lo, f_lo = 0.0, -target
    g = target / op.quartic(state.phi)
    evaluations = 0
    while True:
        state = _relax(op, g, state.phi, options)
        evaluations += 1
        if state.lam >= 0:
            raise NotLocalizedError(state.lam / L2)
        f = g * op.quartic(state.phi) - target
        if f >= 0:
            break
        if f <= f_lo:
            raise NotLocalizedError(
                state.lam / L2,
                f"amplitude condition unreachable: g*P(g) passed its maximum below {target:.6g}",
            )
        if evaluations >= options.max_outer:
            raise ConvergenceError(
                "Bracket expansion of the amplitude condition exhausted max_outer.",
                best_estimate=g,
                residual=abs(f) / target,
            )
        g_lo, f_lo = g, f
        g *= 2.0
        logger.debug("expanding amplitude bracket to g=%.6g", g)

    if f == 0.0:
        return g, state

    warm = {"phi": state.phi}

    def mismatch(coupling):
        relaxed = _relax(op, coupling, warm["phi"], options)
        warm["phi"] = relaxed.phi
        return coupling * op.quartic(relaxed.phi) - target

    root = find_root_bracketed(
        mismatch,
        Bracket(g_lo, g, f_lo, f),
        tol=1e-3 * options.constraint_tol * g,
        maxiter=options.max_outer,
    )
    return root, _relax(op, root, warm["phi"], options)


def _cutoff_radius(lam: float, options: SolverOptions) -> float:
    kappa = math.sqrt(-lam)
    return max(options.r_max_min, 1.0 + options.decay_lengths / kappa)


def solve_gp(problem: GpProblem) -> GpSolution:
    """
    Constrained ground state of one cylindrical well.

    The amplitude condition is enforced by an outer root search in the
    coupling ``g = u*N`` of the unit-norm shape; it depends on ``u`` and
    ``n_c`` only through ``u*n_c``, so rescaled problems reproduce ``mu0`` and
    ``L_c`` to round-off. The cutoff radius is chosen from the decay constant
    of the solution and the solve is repeated on a larger grid when needed.

    Parameters
    ----------
    problem : GpProblem
        Interaction, density, well radius and solver options.

    Returns
    -------
    GpSolution
        The converged ground state.

    Raises
    ------
    NotLocalizedError
        If no state with ``mu0 < 0`` exists within the admissible cutoff.
    ConvergenceError
        If the relaxation or the amplitude search exhausts its budget.
    """
    options = problem.options
    u, n_c, L = problem.u, problem.n_c, problem.L
    L2 = L * L
    target = u * n_c * L2
    healing = 2.0 / math.sqrt(u * n_c) if u > 0 else math.inf

    lam_linear = linear_well_eigenvalue(L)
    r_max = _cutoff_radius(lam_linear, options)
    if r_max > options.r_max_cap:
        # interaction only weakens the binding of the bare well
        raise NotLocalizedError(
            lam_linear / L2,
            f"bare-well decay length needs r_max={r_max:.4g} beyond r_max_cap={options.r_max_cap:.4g}",
        )

    previous: Optional[RadialProfile] = None
    while True:
        grid = RadialGrid.uniform(r_max, options.nodes_per_radius)
        op = _WellOperator(grid, L)
        if previous is None:
            phi = op.initial_guess(options.initial_guess, min(1.0, healing / L))
        else:
            phi = op.from_profile(np.interp(grid.r, previous.r, previous.psi, right=0.0))

        try:
            g, state = _solve_amplitude(op, target, phi, options)
        except NotLocalizedError:
            if grid.r_max >= options.r_max_cap:
                raise
            r_max = min(options.r_max_cap, 4.0 * grid.r_max)
            logger.debug("no bound state for r_max=%.4g, retrying with %.4g", grid.r_max, r_max)
            continue

        needed = _cutoff_radius(state.lam, options)
        if needed <= CUTOFF_SLACK * grid.r_max:
            break
        if grid.r_max >= options.r_max_cap:
            raise NotLocalizedError(
                state.lam / L2,
                f"decay length needs r_max={needed:.4g} beyond r_max_cap={options.r_max_cap:.4g}",
            )
        previous = op.to_profile(state.phi, 1.0)
        r_max = min(options.r_max_cap, 1.25 * needed)
        logger.debug("enlarging grid from r_max=%.4g to %.4g", grid.r_max, r_max)

    quartic = op.quartic(state.phi)
    particle_number = g / u if u > 0 else n_c * L2 / quartic
    profile = op.to_profile(state.phi, particle_number)

    norm = float(np.sum(op.weights * profile.psi[:-1] ** 2))
    ratio = float(np.sum(op.weights * profile.psi[:-1] ** 4)) / norm
    constraint_residual = abs(ratio - n_c * L2) / (n_c * L2)
    if constraint_residual > options.constraint_tol:
        raise ConvergenceError(
            f"Amplitude condition violated by {constraint_residual:.3g} (relative).",
            best_estimate=profile,
            residual=constraint_residual,
        )

    solution = GpSolution(
        profile=profile,
        mu0=state.lam / L2,
        L=L,
        L_c=math.sqrt(particle_number / n_c),
        healing_length=healing,
        residual_norm=state.residual,
        converged=True,
        u=u,
        n_c=n_c,
        particle_number=particle_number,
        coupling=g,
        constraint_residual=constraint_residual,
        iterations=state.iterations,
        energy_history=state.history,
    )
    logger.debug("solved %r: %r", problem, solution)
    return solution


def _quadratic_forms(profile: RadialProfile, L: float):
    op = _WellOperator(profile.grid, L)
    psi = profile.psi[: op.size]
    k_psi = op.stiffness_diag * psi
    k_psi[:-1] += op.stiffness_off * psi[1:]
    k_psi[1:] += op.stiffness_off * psi[:-1]
    return op, psi, k_psi


def _check_profile(profile: RadialProfile):
    if not profile.is_decayed():
        warnings.warn(
            "Profile is not decayed at the cutoff; the Dirichlet node ignores its last sample.",
            UserWarning,
        )


def chemical_potential(profile: RadialProfile, u: float, L: float) -> float:
    """
    Dimensionless chemical potential of a profile (discrete Rayleigh quotient).

    ``mu0 * L**2 = [psi K psi + sum(W V psi**2) + u sum(W psi**4)] / sum(W psi**2)``
    with the finite-volume stiffness ``K``, cell areas ``W`` and well potential
    ``V``. For a converged ``solve_gp`` output it equals the solver's
    eigenvalue to round-off.

    Parameters
    ----------
    profile : RadialProfile
        Order parameter on a grid in units of the well radius.
    u : float
        Interaction strength.
    L : float
        Well radius.

    Returns
    -------
    float
        mu0.
    """
    _check_profile(profile)
    op, psi, k_psi = _quadratic_forms(profile, L)
    norm = float(np.sum(op.weights * psi**2))
    if norm == 0.0:
        raise DomainError("The chemical potential of a zero profile is undefined.")
    numerator = (
        float(psi @ k_psi)
        + float(np.sum(op.weights * op.potential * psi**2))
        + u * float(np.sum(op.weights * psi**4))
    )
    return numerator / norm / (L * L)


def gp_energy(profile: RadialProfile, u: float, L: float) -> float:
    """
    Discrete GP energy ``psi K psi + sum(W V psi**2) + (u/2) sum(W psi**4)``.

    Parameters
    ----------
    profile : RadialProfile
        Order parameter on a grid in units of the well radius.
    u : float
        Interaction strength.
    L : float
        Well radius.

    Returns
    -------
    float
        The energy in units where the eigenvalue is ``mu0 * L**2``.
    """
    op, psi, k_psi = _quadratic_forms(profile, L)
    return (
        float(psi @ k_psi)
        + float(np.sum(op.weights * op.potential * psi**2))
        + 0.5 * u * float(np.sum(op.weights * psi**4))
    )


def gp_residual(solution: GpSolution, u: float, profile: Optional[RadialProfile] = None) -> float:
    """
    Normalized discrete residual of the GP equation.

    Returns the cell-weighted L2 norm of
    ``-lap(psi) - L*theta(1 - r)*psi + u*psi**3 - mu0*L**2*psi`` divided by the
    norm of ``psi``.

    Parameters
    ----------
    solution : GpSolution
        Supplies the well radius, the eigenvalue and (by default) the profile.
    u : float
        Interaction strength.
    profile : RadialProfile, optional
        Evaluate this profile against the solution's eigenvalue instead.

    Returns
    -------
    float
        The residual norm.
    """
    profile = solution.profile if profile is None else profile
    L = solution.L
    op, psi, k_psi = _quadratic_forms(profile, L)
    lam = solution.mu0 * L * L
    pointwise = k_psi / op.weights + op.potential * psi + u * psi**3 - lam * psi
    norm = math.sqrt(float(np.sum(op.weights * psi**2)))
    if norm == 0.0:
        raise DomainError("The residual of a zero profile is undefined.")
    return math.sqrt(float(np.sum(op.weights * pointwise**2))) / norm
