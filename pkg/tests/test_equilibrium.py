from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from angelesco import equilibrium as eq
from angelesco.errors import BranchError, DomainError

D = 30


def test_symmetric_curve_is_degenerate():
    c = eq.curve_constants(-1, D)
    assert c.zstar == 0 and c.x0 == 0 and c.b == 0


def test_curve_at_minus_two():
    c = eq.curve_constants(-2, D)
    assert c.b == Fraction(-1, 63)
    assert abs(c.zstar - mp.mpf("4.33292801285899e-3")) < 1e-15
    assert abs(c.x0 - mp.mpf("-4.00902569419553e-3")) < 1e-15
    r1, r2 = eq.cubic_residuals(c)
    assert max(r1, r2) < mp.mpf(10) ** -25


@pytest.mark.parametrize("a", [-3, -2, Fraction(-11, 10), Fraction(-9, 10), Fraction(-1, 2)])
def test_x0_sign_follows_a_plus_one(a):
    c = eq.curve_constants(a, D)
    assert (c.x0 > 0) == (a + 1 > 0)


def test_large_z_behaviour():
    with mp.workdps(D):
        z = mp.mpc(1000, 700)
        bv = eq.zeta_branches(z, -2, D)
        assert abs(bv.zeta0 * z - 1) < 5e-3
        assert abs(bv.zeta1 * z + mp.mpf(1) / 2) < 5e-3
        assert abs(bv.zeta2 * z + mp.mpf(1) / 2) < 5e-3


def test_on_support_needs_boundary_values():
    with pytest.raises(BranchError):
        eq.zeta_branches(mp.mpf("0.5"), -1, D)
    with pytest.raises(DomainError):
        eq.boundary_values(2, -1, D)


@settings(max_examples=20, deadline=None)
@given(
    st.floats(min_value=-3, max_value=3),
    st.floats(min_value=0.01, max_value=3),
    st.booleans(),
    st.sampled_from([-2, -1, Fraction(-3, 5)]),
)
def test_branch_identities(x, y, lower, a):
    c = eq.curve_constants(a, D)
    z = mp.mpc(x, -y if lower else y)
    bv = eq.zeta_branches(z, None, D, c)
    s, prod = eq.branch_identity_residuals(bv, c)
    assert s < mp.mpf(10) ** -20 and prod < mp.mpf(10) ** -20


def test_symmetric_densities_mirror():
    for x in ("0.1", "0.5", "0.9"):
        x = mp.mpf(x)
        assert abs(eq.density(1, -x, -1, D) - eq.density(2, x, -1, D)) < mp.mpf(10) ** -25


def test_density_vanishes_at_x0():
    c = eq.curve_constants(-2, D)
    assert abs(eq.density(1, c.x0, None, D, c)) < mp.mpf(10) ** -12


def test_density_methods_agree():
    c = eq.curve_constants(-2, D)
    for j, x in ((1, mp.mpf("-1.3")), (2, mp.mpf("0.4"))):
        exact = eq.density(j, x, None, D, c)
        assert abs(eq.density(j, x, None, D, c, method="tracked") - exact) < mp.mpf(10) ** -25
        assert abs(eq.density(j, x, None, D, c, method="richardson") - exact) < 1e-10


@pytest.mark.parametrize("a", [-2, -1, Fraction(-3, 5)])
def test_masses_are_half(a):
    for j in (1, 2):
        assert abs(eq.mass(j, a, D) - mp.mpf(1) / 2) < mp.mpf(10) ** -12


def test_sign_pattern():
    for a, j, negative in ((-2, 1, True), (-2, 2, False), (Fraction(-3, 5), 1, False), (Fraction(-3, 5), 2, True)):
        c = eq.curve_constants(a, D)
        signs = eq.sign_changes(j, a, 30, D, c)
        neg = [x for x, s in signs if s < 0]
        assert bool(neg) == negative
        # the negative part sits between x0 and 0
        assert all(min(c.x0, 0) < x < max(c.x0, 0) for x in neg)


def test_inverse_cube_root_at_zero():
    vals = eq.edge_exponent_check(2, -1, D)
    assert abs(vals[-1] - vals[-2]) < 1e-3 * abs(vals[-1])


@pytest.mark.parametrize("j", [1, 2])
def test_two_thirds_blowup_off_symmetry(j):
    # corrections decay like |x|^(1/3), so differences shrink by 100^(1/3) per step
    v = eq.edge_exponent_check(j, -2, D, points=(1e-6, 1e-8, 1e-10))
    d1, d2 = abs(v[1] - v[0]), abs(v[2] - v[1])
    assert 3.5 < d1 / d2 < 6
    assert abs(v[2]) > mp.mpf("0.01")


def test_riemann_map_branch_points():
    assert eq.riemann_map(0, -2) == 0
    assert eq.riemann_map(1, -2) == 1
    assert abs(eq.riemann_map(-1, -2) + 2) < 1e-15
    with mp.workdps(30):
        xi = mp.mpf("1e-4")
        assert abs(eq.riemann_map(xi, -2) / xi**3 - mp.mpf(-8) / 3) < 1e-3


def test_symmetric_lagrange_constants():
    data = eq.potentials_and_constants(-1, D)
    with mp.workdps(D):
        assert abs(data.l1 - data.l2) < mp.mpf(10) ** -25
        assert abs(data.l1 + data.l2 - mp.mpf(3) / 2 * mp.log(mp.mpf(27) / 4)) < mp.mpf(10) ** -25


def test_variational_conditions():
    data = eq.potentials_and_constants(-2, D)
    assert eq.variational_deviation(data, 8) < mp.mpf(10) ** -12


def test_phase_maps_at_symmetric_point():
    maps = eq.phase_maps(-1, D)
    with mp.workdps(D):
        assert abs(maps.fprime0 - mp.sqrt(2)) < mp.mpf(10) ** -25
        assert maps.tau0 == 0
        assert abs(maps.lambda2_0 - 9 * mp.cbrt(2) / 4) < mp.mpf(10) ** -25


def test_lambda1_slope_in_a():
    e = mp.mpf("1e-4")
    maps = eq.phase_maps(-1 + e, D)
    assert abs(maps.lambda1_0 / e - 3 * mp.cbrt(4) / 4) < 1e-3


def test_phase_integral_matches_g_functions():
    data = eq.potentials_and_constants(-2, D)
    z = mp.mpc("0.05", "0.04")
    for j in (1, 2):
        assert abs(eq.phi_integral(j, z, None, D, data.curve) - data.phi(j, z)) < 1e-10


def test_energy_of_uniform_measure():
    half = mp.mpf(1) / 2
    val = eq.mutual_energy(lambda x: half, lambda x: half, [0, 1], [0, 1], 20)
    assert abs(val - mp.mpf(3) / 8) < 1e-10


def test_energy_symmetric_swap():
    psi1, s1, psi2, s2 = eq.equilibrium_densities(-1, 20)
    e = eq.energy(psi1, psi2, s1, s2, 15, order=32)
    f = eq.energy(
        lambda x: psi2(-x), lambda x: psi1(-x), [-t for t in reversed(s2)], [-t for t in reversed(s1)], 15, order=32
    )
    assert abs(e - f) < 1e-10
    # variational conditions give E = (l1 + l2) / 4
    assert abs(e - mp.mpf(3) / 8 * mp.log(mp.mpf(27) / 4)) < 1e-9


def test_energy_increases_off_minimizer():
    psi1, s1, psi2, s2 = eq.equilibrium_densities(-1, 20)

    def bump(x):
        # mass-zero perturbation on [0, 1]
        return 30 * x**2 * (1 - x) ** 2 - 1

    def e(t):
        return eq.energy(psi1, lambda x: psi2(x) + t * bump(x), s1, s2, 15)

    e0, e1, e2 = e(0), e(mp.mpf("0.01")), e(mp.mpf("-0.01"))
    assert e1 > e0 and e2 > e0
    assert abs((e1 - e0) / (e2 - e0) - 1) < 0.1
