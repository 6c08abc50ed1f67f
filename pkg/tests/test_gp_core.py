import math
import time

import pytest
import numpy as np
from scipy import optimize, special

from pyboseglass.dtypes import (
    DomainError,
    GpProblem,
    GpSolution,
    NotLocalizedError,
    RadialGrid,
    RadialProfile,
    SolverOptions,
)
import pyboseglass.gp_core

tolerance = 1e-8

# exact to 1e-6 for the bare well; see test_linear_solver_oracle
oracle_options = SolverOptions(nodes_per_radius=2000, decay_lengths=12.0, residual_tol=1e-7)
coarse_options = SolverOptions(nodes_per_radius=50, residual_tol=1e-10)


def matching_root(L):
    """Bare-well eigenvalue from a dense sign scan of the matching condition and bisection."""

    def mismatch(lam):
        q = math.sqrt(L + lam)
        kappa = math.sqrt(-lam)
        return q * special.j1(q) / special.j0(q) - kappa * special.k1(kappa) / special.k0(kappa)

    lo = -L * (1 - 1e-9)
    hi = min(-1e-12, special.jn_zeros(0, 1)[0] ** 2 * (1 - 1e-9) - L)
    grid = np.linspace(lo, hi, 20001)
    values = np.array([mismatch(lam) for lam in grid])
    i = np.flatnonzero(np.sign(values[:-1]) != np.sign(values[1:]))[0]
    return optimize.bisect(mismatch, grid[i], grid[i + 1], xtol=1e-15, rtol=1e-15, maxiter=500)


@pytest.mark.parametrize("L", [0.5, 1.0, 2.0, 5.0, 10.0, 20.0])
def test_linear_eigenvalue_oracle(L):
    lam = pyboseglass.gp_core.linear_well_eigenvalue(L)

    assert lam < 0
    assert pytest.approx(matching_root(L), rel=1e-10) == lam


@pytest.mark.parametrize("L", [0.0, -1.0, np.inf])
def test_linear_eigenvalue_domain(L):
    with pytest.raises(DomainError):
        pyboseglass.gp_core.linear_well_eigenvalue(L)


def test_linear_profile_continuous():
    grid = RadialGrid.uniform(6.0, 100)
    profile = pyboseglass.gp_core.linear_well_profile(5.0, grid)
    edge = int(np.flatnonzero(grid.r == 1.0)[0])

    assert profile.psi[0] == 1.0
    assert profile.is_nodeless()
    assert abs(profile.psi[edge + 1] - profile.psi[edge]) < 0.05 * profile.psi[edge]
    assert abs(profile.psi[edge] - profile.psi[edge - 1]) < 0.05 * profile.psi[edge]


@pytest.mark.parametrize("L", [1.0, 5.0, 10.0])
def test_linear_solver_oracle(L):
    solution = pyboseglass.gp_core.solve_gp(GpProblem(0.0, 0.05, L, options=oracle_options))

    assert solution.localized
    assert math.isinf(solution.healing_length)
    assert pytest.approx(matching_root(L) / L**2, rel=1e-6) == solution.mu0
    assert solution.constraint_residual <= tolerance


def exact_profile_solution(grid, L):
    lam = pyboseglass.gp_core.linear_well_eigenvalue(L)
    profile = pyboseglass.gp_core.linear_well_profile(L, grid)
    solution = GpSolution(profile, lam / L**2, L, math.nan, math.inf, 0.0, True, 0.0, 1.0, 1.0, 0.0, 0.0)
    return profile, solution


def test_residual_refinement():
    # cutoff about 30 decay lengths beyond the edge for L = 5
    residuals = []
    for nodes in [100, 200, 400]:
        profile, solution = exact_profile_solution(RadialGrid.uniform(20.0, nodes), 5.0)
        residuals.append(pyboseglass.gp_core.gp_residual(solution, 0.0, profile))

    assert residuals[0] > residuals[1] > residuals[2]


def test_chemical_potential_exact_profile():
    profile, solution = exact_profile_solution(RadialGrid.uniform(20.0, 200), 5.0)

    assert pytest.approx(solution.mu0, rel=1e-4) == pyboseglass.gp_core.chemical_potential(profile, 0.0, 5.0)


def test_chemical_potential_zero_profile():
    grid = RadialGrid.uniform(4.0, 10)
    with pytest.raises(DomainError):
        pyboseglass.gp_core.chemical_potential(RadialProfile(grid, np.zeros(grid.node_count)), 1.0, 2.0)


def test_chemical_potential_warns_on_truncation():
    grid = RadialGrid.uniform(2.0, 20)
    with pytest.warns(UserWarning):
        pyboseglass.gp_core.chemical_potential(RadialProfile(grid, np.ones(grid.node_count)), 1.0, 2.0)


@pytest.fixture(scope="module")
def interacting():
    return pyboseglass.gp_core.solve_gp(GpProblem(1.0, 0.05, 3.0))


def test_solution_properties(interacting):
    solution = interacting

    assert solution.converged
    assert solution.localized
    assert solution.profile.is_nodeless()
    assert solution.profile.is_decayed()
    assert solution.constraint_residual <= tolerance
    assert solution.residual_norm <= tolerance
    assert pyboseglass.gp_core.gp_residual(solution, 1.0) <= tolerance
    assert pytest.approx(2.0 / math.sqrt(0.05), rel=1e-14) == solution.healing_length
    assert pytest.approx(solution.n_c * solution.L_c**2, rel=1e-12) == solution.particle_number
    assert pytest.approx(solution.u * solution.particle_number, rel=1e-12) == solution.coupling


def test_interaction_raises_mu(interacting):
    bare = pyboseglass.gp_core.linear_well_eigenvalue(3.0) / 9.0

    # mu0 = shape eigenvalue / L**2 + u*n_c, and the bare well minimizes the shape part
    assert interacting.mu0 > bare + 0.05 - 1e-5


def test_chemical_potential_matches_solver(interacting):
    mu0 = pyboseglass.gp_core.chemical_potential(interacting.profile, 1.0, 3.0)

    assert pytest.approx(interacting.mu0, rel=tolerance) == mu0


def test_energy_history(interacting):
    history = interacting.energy_history
    slack = 1e-12 * np.maximum(1.0, np.abs(history[:-1]))

    assert history.size >= 1
    assert np.all(np.diff(history) <= slack)

    energy = pyboseglass.gp_core.gp_energy(interacting.profile, 1.0, 3.0)
    assert pytest.approx(interacting.particle_number * history[-1], rel=1e-9) == energy


def test_initial_guess_independent(interacting):
    solution = pyboseglass.gp_core.solve_gp(
        GpProblem(1.0, 0.05, 3.0, options=SolverOptions(initial_guess="linear"))
    )

    assert pytest.approx(interacting.mu0, rel=1e-6) == solution.mu0
    assert pytest.approx(interacting.L_c, rel=1e-6) == solution.L_c


@pytest.mark.parametrize("a", [0.1, 1 / 47, 2.0, 10.0])
def test_self_similarity(a):
    base = pyboseglass.gp_core.solve_gp(GpProblem(1.0, 0.04, 3.0, options=coarse_options))
    scaled = pyboseglass.gp_core.solve_gp(GpProblem(1.0 / a, a * 0.04, 3.0, options=coarse_options))

    assert pytest.approx(base.mu0, rel=tolerance) == scaled.mu0
    assert pytest.approx(base.L_c, rel=tolerance) == scaled.L_c
    assert pytest.approx(a * base.particle_number, rel=1e-7) == scaled.particle_number


def test_tiny_well_not_localized():
    with pytest.raises(NotLocalizedError):
        pyboseglass.gp_core.solve_gp(GpProblem(1.0, 0.01, 0.05, options=coarse_options))


def test_dense_condensate_not_localized():
    with pytest.raises(NotLocalizedError):
        pyboseglass.gp_core.solve_gp(GpProblem(1.0, 0.5, 3.0, options=coarse_options))


def test_dense_condensate_fails_fast():
    problem = GpProblem(1.0, 0.5, 3.0, options=SolverOptions(nodes_per_radius=50))
    start = time.perf_counter()
    with pytest.raises(NotLocalizedError) as info:
        pyboseglass.gp_core.solve_gp(problem)

    assert time.perf_counter() - start < 30.0
    assert math.isfinite(info.value.mu0)


def test_relax_unbound_coupling():
    op = pyboseglass.gp_core._WellOperator(RadialGrid.uniform(4.0, 40), 1.0)
    phi = op.initial_guess("gaussian", 1.0)
    options = SolverOptions(nodes_per_radius=40, max_iterations=5000)

    with pytest.raises(NotLocalizedError) as info:
        pyboseglass.gp_core._relax(op, 1e3, phi, options)
    assert info.value.mu0 >= 0


matrix = [
    (u, x / u, L)
    for u in [0.5, 1.0, 4.0, 47.0]
    for x, L in [(0.005, 1.5), (0.01, 3.0), (0.02, 5.0), (0.04, 3.0), (0.03, 8.0)]
]


@pytest.mark.slow
@pytest.mark.parametrize("u, n_c, L", matrix)
def test_solution_matrix(u, n_c, L):
    solution = pyboseglass.gp_core.solve_gp(GpProblem(u, n_c, L))
    history = solution.energy_history

    assert solution.localized
    assert solution.profile.is_nodeless()
    assert solution.profile.is_decayed()
    assert solution.constraint_residual <= tolerance
    assert pyboseglass.gp_core.gp_residual(solution, u) <= tolerance
    assert np.all(np.diff(history) <= 1e-12 * np.maximum(1.0, np.abs(history[:-1])))
