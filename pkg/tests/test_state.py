import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from radopt import assembly as asm
from radopt.adjoint import solve_adjoint
from radopt.errors import InvalidArgument, NoConvergence
from radopt.mesh import build_rect_mesh, mark_boundary
from radopt.state import (
    PhysicsParams,
    check_gradient_bound,
    dirichlet_form,
    energy_residual,
    equilibrium_temperature,
    radiative_power,
    solve_state,
    total_potential,
)

PHYS = PhysicsParams()


@pytest.fixture(scope="module")
def setup16():
    m = build_rect_mesh(16, 16)
    kappa = PHYS.kappa(np.full(m.n_triangles, 0.6))
    f = np.full(m.n_triangles, 0.001)
    return m, kappa, f, solve_state(m, kappa, f, PHYS)


def test_kappa_mixing():
    assert PHYS.kappa(0.6) == pytest.approx(6.4)
    assert PHYS.kappa(0.6, worst=True) == pytest.approx(4.6)


@pytest.mark.parametrize("kw", [dict(sigma=0), dict(r=1.5), dict(alpha=2, beta=1), dict(alpha=0)])
def test_physics_invariants(kw):
    with pytest.raises(InvalidArgument):
        PhysicsParams(**kw)


def test_flux_balance_and_energy_identity(setup16):
    m, kappa, f, sol = setup16
    F = asm.assemble_load(m, f)
    assert energy_residual(m, kappa, F, sol.u, PHYS) <= 1e-12 * abs(F @ sol.u)
    flux = radiative_power(m, sol.u, PHYS, power=3)
    assert abs(flux - 0.001) <= 1e-6 * 0.001


def test_weak_source_close_to_equilibrium(setup16):
    m, kappa, f, sol = setup16
    c = equilibrium_temperature(m, f, PHYS)
    assert c == pytest.approx((0.001 / 4) ** (1 / 3), rel=1e-14)
    assert np.abs(sol.u - c).max() <= 1e-3 * c


def test_square_symmetry(setup16):
    m, kappa, f, sol = setup16
    n = 17
    U = sol.u.reshape(n, n)
    for img in (U[:, ::-1], U[::-1, :], U.T):
        assert np.abs(img - U).max() <= 1e-12 * U.max()


def test_radiative_subset_and_zero_source():
    m = mark_boundary(build_rect_mesh(8, 8), "top")
    kappa = np.ones(m.n_triangles)
    sol = solve_state(m, kappa, np.full(m.n_triangles, 1.0), PHYS)
    assert radiative_power(m, sol.u, PHYS, power=3) == pytest.approx(1.0, rel=1e-8)
    # insulated bottom is the hottest side
    assert sol.u[: 9].min() > sol.u[-9:].max()
    zero = solve_state(m, kappa, np.zeros(m.n_triangles), PHYS)
    assert np.all(zero.u == 0)


def test_robin_case_is_linear(rng):
    m = build_rect_mesh(8, 8)
    phys2 = PhysicsParams(r=2)
    kappa = phys2.kappa(rng.uniform(0, 1, m.n_triangles))
    f = rng.uniform(0, 1, m.n_triangles)
    u1 = solve_state(m, kappa, f, phys2).u
    u7 = solve_state(m, kappa, 7.0 * f, phys2).u
    assert np.allclose(u7, 7.0 * u1, rtol=1e-9, atol=0)


def test_strong_source_converges():
    m = build_rect_mesh(16, 16)
    kappa = PHYS.kappa(np.full(m.n_triangles, 0.5))
    f = np.full(m.n_triangles, 1e7)
    sol = solve_state(m, kappa, f, PHYS)
    assert sol.newton_iters < 50
    assert radiative_power(m, sol.u, PHYS, power=3) == pytest.approx(1e7, rel=1e-6)


def test_newton_cap_raises():
    m = build_rect_mesh(8, 8)
    kappa = np.ones(m.n_triangles)
    with pytest.raises(NoConvergence) as exc:
        solve_state(m, kappa, np.full(m.n_triangles, 1e7), PHYS, max_newton=2)
    assert exc.value.result.newton_iters == 2


def test_argument_checks():
    m = build_rect_mesh(4, 4)
    with pytest.raises(InvalidArgument):
        solve_state(m, np.zeros(m.n_triangles), np.ones(m.n_triangles), PHYS)
    with pytest.raises(InvalidArgument):
        solve_state(m, np.ones(m.n_triangles), np.ones(m.n_triangles), PHYS, eta3=0.0)


def test_variational_minimality(setup16, rng):
    m, kappa, f, sol = setup16
    j0 = total_potential(m, kappa, f, PHYS, sol.u)
    for _ in range(5):
        w = rng.uniform(-1, 1, m.n_nodes)
        assert total_potential(m, kappa, f, PHYS, sol.u + 1e-3 * w) >= j0


def test_gradient_difference_bound(setup16):
    m, kappa, f, sol = setup16
    for g in (f, 10 * f):
        u = solve_state(m, kappa, g, PHYS).u
        rep = check_gradient_bound(m, kappa, g, PHYS, u, solve_adjoint(m, kappa, g, u, PHYS))
        assert rep.holds and not rep.violated
    zero = check_gradient_bound(m, kappa, 0 * f, PHYS, 0 * sol.u, 0 * sol.u)
    assert (zero.lhs, zero.rhs) == (0.0, 0.0)


def test_dirichlet_form_of_x():
    m = build_rect_mesh(5, 5)
    assert dirichlet_form(m, 1.0, m.nodes[:, 0]) == pytest.approx(1.0, rel=1e-13)
    assert dirichlet_form(m, 1.0, np.full(m.n_nodes, 3.0)) == 0.0


@settings(max_examples=10)
@given(st.integers(0, 2**32 - 1))
def test_nonnegative_for_nonnegative_source(seed):
    rng = np.random.default_rng(seed)
    m = build_rect_mesh(10, 10)
    kappa = PHYS.kappa(rng.uniform(0, 1, m.n_triangles))
    f = rng.uniform(0, 1, m.n_triangles) * (rng.uniform(size=m.n_triangles) < 0.3)
    u = solve_state(m, kappa, f, PHYS).u
    assert u.min() >= -1e-10
