import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cgfield import catalog
from cgfield import spacetime_fields as sf
from cgfield.gamma_algebra import GAMMA

POINT = (0.3, 0.2, -0.1, 0.4)


def on_grid(cf, half=2, h=0.1, centre=POINT):
    return sf.VecPotential.from_closed_form(sf.Grid4.centred(centre, half, h), cf)


def test_grid_validation():
    with pytest.raises(ValueError):
        sf.Grid4((3, 3, 3), (1, 1, 1, 1))
    with pytest.raises(ValueError):
        sf.Grid4((3, 3, 3, 0), (1, 1, 1, 1))
    with pytest.raises(ValueError):
        sf.Grid4((3, 3, 3, 3), (1, 1, 0, 1))


def test_grid_centred_and_index():
    g = sf.Grid4.centred(POINT, (0, 2, 2, 2), 0.1)
    assert g.dims == (1, 5, 5, 5)
    assert g.static_axes() == (True, False, False, False)
    assert np.allclose(g.coords(g.centre_index), POINT)
    assert g.index_of(g.coords((0, 1, 3, 4))) == (0, 1, 3, 4)
    with pytest.raises(sf.GridError):
        g.index_of((0.3, 0.25, 0.2, -0.1))


def test_potential_shape_checked():
    g = sf.Grid4((1, 3, 3, 3), (1, 1, 1, 1))
    with pytest.raises(ValueError):
        sf.VecPotential(g, np.zeros((4, 3, 3, 3)))
    with pytest.raises(ValueError):
        sf.SpinorField(g, np.zeros((3, 1, 3, 3, 3)))


def test_nonfinite_outside_mask_rejected():
    g = sf.Grid4((1, 3, 3, 3), (1, 1, 1, 1))
    a = np.zeros((4, 1, 3, 3, 3))
    a[0, 0, 1, 1, 1] = np.nan
    with pytest.raises(ValueError, match="non-finite"):
        sf.VecPotential(g, a)


def test_coulomb_singularity_is_masked():
    g = sf.Grid4((1, 9, 9, 9), (1.0, 0.25, 0.25, 0.25), (0.0, -1.0, -1.0, -1.0))
    A = sf.VecPotential.from_closed_form(g, catalog.coulomb())
    assert np.isinf(A.a[0, 0, 4, 4, 4])
    mask = A.singular_mask()
    assert mask[0, 4, 4, 4] and mask[0, 6, 4, 4] and not mask[0, 7, 4, 4]


def test_point_too_close_to_boundary():
    A = on_grid(catalog.plane_wave())
    with pytest.raises(sf.GridError):
        sf.em_fields(A, (1, 2, 2, 2))


def test_static_axis_has_zero_time_derivative():
    g = sf.Grid4.centred(POINT, (0, 2, 2, 2), 0.1)
    A = sf.VecPotential.from_closed_form(g, catalog.e_only(2.0))
    em = sf.em_fields(A, g.centre_index)
    assert np.allclose(em.e, [2.0, 0, 0], atol=1e-12)
    with pytest.raises(sf.GridError):
        sf.em_fields(A, (1, 2, 2, 2))


def plane_wave_exact(point, k=1.0):
    n = np.array([0.0, 0.6, 0.8])
    pol = np.array([1.0, 0.0, 0.0])
    t, r = point[0], np.asarray(point[1:])
    s = np.sin(k * (n @ r - t))
    return -k * s * pol, -k * s * np.cross(n, pol)


@pytest.mark.parametrize("h", [0.02, 0.01])
def test_plane_wave_fields_against_closed_form(h):
    A = on_grid(catalog.plane_wave(), h=h)
    em = sf.em_fields(A, A.grid.centre_index)
    e, b = plane_wave_exact(POINT)
    assert np.allclose(em.e, e, atol=h**2)
    assert np.allclose(em.b, b, atol=h**2)


def test_landau_and_symmetric_give_same_b():
    for cf in (catalog.uniform_b_symmetric(), catalog.uniform_b_landau()):
        A = on_grid(cf)
        em = sf.em_fields(A, A.grid.centre_index)
        assert np.allclose(em.b, [0, 0, 1], atol=1e-12)
        assert np.allclose(em.e, 0, atol=1e-12)


def test_field_tensor_layout():
    A = on_grid(catalog.plane_wave())
    p = A.grid.centre_index
    F = sf.field_tensor(A, p)
    em = sf.em_fields(A, p)
    assert np.allclose(F, -F.T)
    assert np.array_equal(F[0, 1:], -em.e)
    assert np.allclose([F[2, 3], F[3, 1], F[1, 2]], -em.b)


coef = st.floats(min_value=-2, max_value=2, allow_nan=False)


@settings(max_examples=30, deadline=None)
@given(st.lists(coef, min_size=16, max_size=16))
def test_linear_potential_invariants_exact(c):
    # A^mu = C[mu, nu] x^nu; central differences are exact on linear data
    C = np.array(c).reshape(4, 4)
    g = sf.Grid4.centred(POINT, 2, 0.1)
    A = sf.VecPotential(g, np.einsum("mn,n...->m...", C, np.array(g.mesh())))
    p = g.centre_index
    F = sf.field_tensor(A, p)
    eta = np.diag([1.0, -1, -1, -1])
    assert np.allclose(F, eta @ C.T - C @ eta, atol=1e-10)
    lag = sf.lagrangian_check(A, p)
    assert lag.standard_residual <= 1e-10 * max(1.0, abs(lag.quarter_ff))


def test_lagrangian_plane_wave_small():
    A = on_grid(catalog.plane_wave())
    lag = sf.lagrangian_check(A, A.grid.centre_index)
    assert lag.residual <= 10 * 0.1**2
    assert abs(lag.e2_minus_b2) <= 1e-3


@pytest.mark.parametrize(
    "cf,e2b2",
    [(catalog.e_only(), 1.0), (catalog.uniform_b_symmetric(), -1.0), (catalog.uniform_b_landau(), -1.0)],
)
def test_lagrangian_sign_on_static_fields(cf, e2b2):
    A = on_grid(cf)
    lag = sf.lagrangian_check(A, A.grid.centre_index)
    assert lag.e2_minus_b2 == pytest.approx(e2b2, abs=1e-12)
    assert lag.quarter_ff == pytest.approx(0.5 * e2b2, abs=1e-12)
    assert lag.standard_residual <= 1e-12
    assert lag.residual == pytest.approx(abs(e2b2), abs=1e-12)


def test_poisson_coulomb_second_order():
    res = []
    for step in (0.1, 0.05):
        n = int(round(3.0 / step))
        g = sf.Grid4((1, n + 1, n + 1, n + 1), (1.0, step, step, step), (0.0, -0.5, -0.5, -0.5))
        res.append(sf.poisson_residual(sf.VecPotential.from_closed_form(g, catalog.coulomb()), (1.0, 5.0)))
    assert res[0].n_masked == 0 and res[0].n_cells > 0
    assert 3.5 <= res[0].max_residual / res[1].max_residual <= 4.5


def test_poisson_detects_x_squared():
    g = sf.Grid4((1, 7, 7, 7), (1.0, 0.1, 0.1, 0.1))
    r = sf.poisson_residual(sf.VecPotential.from_closed_form(g, catalog.x_squared()))
    assert r.max_residual == pytest.approx(2.0, rel=1e-9)


def test_poisson_needs_static_field():
    A = on_grid(catalog.linear_time(0))
    with pytest.raises(sf.GridError, match="static"):
        sf.poisson_residual(A)


def test_box_identity_plane_wave_converges():
    r = [sf.box_identity_check(A, A.grid.centre_index).residual for A in (on_grid(catalog.plane_wave(), h=h) for h in (0.1, 0.05))]
    assert 3.5 <= r[0] / r[1] <= 4.5


def test_box_identity_landau_exact():
    A = on_grid(catalog.uniform_b_landau())
    assert sf.box_identity_check(A, A.grid.centre_index).residual <= 1e-12


def test_box_identity_symmetric_gauge_offset():
    # symmetric gauge: the dropped cross term contributes exactly B^2 at every step size
    for h in (0.1, 0.05):
        A = on_grid(catalog.uniform_b_symmetric(), h=h)
        r = sf.box_identity_check(A, A.grid.centre_index)
        assert r.residual == pytest.approx(1.0, abs=1e-12)


def test_transverse_two_term_exact():
    for cf in (catalog.uniform_b_symmetric(), catalog.uniform_b_landau(), catalog.plane_wave()):
        A = on_grid(cf)
        tr = sf.transverse_identity_check(A, A.grid.centre_index)
        assert tr.two_term <= 1e-12
    tr = sf.transverse_identity_check(on_grid(catalog.uniform_b_symmetric()), (2, 2, 2, 2))
    assert tr.cross == pytest.approx(-0.5) and tr.one_term == pytest.approx(0.5)


def test_gauge_precondition():
    A = on_grid(catalog.gaussian_plain())
    with pytest.raises(sf.GaugeError):
        sf.box_identity_check(A, A.grid.centre_index)


def test_mass_null_plane_wave():
    h = 0.1
    A = on_grid(catalog.plane_wave(), half=6, h=h)
    m = sf.extract_mass(A)
    assert abs(m.median) <= 10 * h**2
    assert m.n_used > 0


def test_mass_undefined_without_vector_potential():
    with pytest.raises(sf.GridError):
        sf.extract_mass(on_grid(catalog.e_only()))


def test_current_conserved_for_free_wave():
    for h in (0.1, 0.05):
        grid = sf.Grid4.centred(POINT, 3, h)
        psi = sf.SpinorField.from_closed_form(grid, catalog.on_shell_plane_wave())
        assert sf.current_divergence(psi) <= 1e-10


def test_current_of_random_spinor_not_conserved():
    grid = sf.Grid4.centred(POINT, 3, 0.1)
    rng = np.random.default_rng(5)
    psi = sf.SpinorField(grid, rng.normal(size=(4, *grid.dims)) + 1j * rng.normal(size=(4, *grid.dims)))
    assert sf.current_divergence(psi) > 1.0


def test_current_density_positive():
    rng = np.random.default_rng(1)
    psi = rng.normal(size=(4, 6)) + 1j * rng.normal(size=(4, 6))
    j = sf.current_arrays(psi)
    assert np.allclose(j[0], np.sum(np.abs(psi) ** 2, axis=0))
    assert np.all(j[0] ** 2 >= np.sum(j[1:] ** 2, axis=0) - 1e-12)


# catalog


@pytest.mark.parametrize("name", sorted(catalog.POTENTIALS))
def test_catalog_shapes(name):
    cf = catalog.potential(name)
    out = cf.at((0.1, 0.2, 0.3, 0.4))
    assert out.shape == (4,)
    g = sf.Grid4.centred((0.1, 0.7, 0.3, 0.4), 1, 0.1)
    assert cf(*g.mesh()).shape == (4, 3, 3, 3, 3)


@pytest.mark.parametrize("name", [n for n in sorted(catalog.POTENTIALS) if n != "coulomb"])
def test_catalog_lorenz_flags(name):
    cf = catalog.potential(name)
    A = on_grid(cf, h=0.01)
    div = sum(sf.d1(A.a[mu], mu, 0.01) for mu in range(4))[A.grid.centre_index]
    if cf.lorenz:
        assert abs(div) <= 1e-3
    elif cf.lorenz is False:
        assert abs(div) > 1e-3


def test_catalog_unknown_names():
    with pytest.raises(KeyError):
        catalog.potential("nope")
    with pytest.raises(KeyError):
        catalog.spinor("nope")


def test_gaussian_lorenz_rejects_symmetric_twist():
    with pytest.raises(ValueError):
        catalog.gaussian_lorenz(twist=np.eye(4))


def test_plane_wave_rejects_longitudinal_polarization():
    with pytest.raises(ValueError):
        catalog.plane_wave(polarization=(0.0, 0.6, 0.8))


@pytest.mark.parametrize("spin", [0, 1])
def test_dirac_spinor_solves_free_equation(spin):
    p = np.array([0.3, -0.2, 0.4])
    u, energy = catalog.dirac_spinor(p, 1.0, spin)
    slash = energy * GAMMA[0] - sum(p[k] * GAMMA[k + 1] for k in range(3))
    assert np.allclose(slash @ u, u, atol=1e-14)


def test_transverse_hand_example():
    # avec = (y, 0, 0): B = (0, 0, -1), sum (d_i A_j)^2 = 1, cross term 0
    g = sf.Grid4.centred(POINT, 2, 0.1)
    _, x, y, z = g.mesh()
    A = sf.VecPotential(g, np.stack([0 * x, y, 0 * x, 0 * x]))
    tr = sf.transverse_identity_check(A, g.centre_index)
    assert tr.b2 == pytest.approx(1.0) and tr.grad_sq == pytest.approx(1.0)
    assert tr.two_term <= 1e-10 and tr.one_term <= 1e-10
    assert np.allclose(sf.em_fields(A, g.centre_index).b, [0, 0, -1])


def test_zero_field_checks_vanish():
    A = on_grid(catalog.zero())
    p = A.grid.centre_index
    assert sf.box_identity_check(A, p).residual == 0.0
    assert sf.lagrangian_check(A, p).residual == 0.0
    assert sf.transverse_identity_check(A, p).two_term == 0.0
    psi = sf.SpinorField(A.grid, np.zeros((4, *A.grid.dims)))
    assert sf.current_divergence(psi) == 0.0


def test_constant_vector_potential_mass_zero():
    m = sf.extract_mass(on_grid(catalog.constant(0.0, 0.3, -0.2, 0.5)))
    assert np.all(m.values == 0.0) and m.constant


def test_oscillating_uniform_mass_not_constant():
    omega = 1.0
    A = on_grid(catalog.oscillating_uniform(omega), half=4, h=0.05)
    m = sf.extract_mass(A)
    assert not m.constant
    t = A.grid.axes()[0][2:-2]
    expected = omega**2 * np.tan(omega * t) ** 2
    assert np.min(m.values) == pytest.approx(expected.min(), abs=1e-2)
    assert np.max(m.values) == pytest.approx(expected.max(), abs=1e-2)


def test_box_identity_shift_invariant():
    A = on_grid(catalog.plane_wave())
    shifted = sf.VecPotential(A.grid, A.a + np.array([0.0, 0.4, -0.7, 1.1])[:, None, None, None, None])
    p = A.grid.centre_index
    assert sf.box_identity_check(shifted, p).residual == pytest.approx(sf.box_identity_check(A, p).residual, abs=1e-10)


def test_lagrangian_translation_invariant():
    cf = catalog.uniform_b_landau()
    a = sf.lagrangian_check(on_grid(cf, centre=POINT), (2, 2, 2, 2))
    b = sf.lagrangian_check(on_grid(cf, centre=(1.3, -2.0, 4.0, 0.5)), (2, 2, 2, 2))
    assert a.residual == pytest.approx(b.residual, abs=1e-10)
    assert a.quarter_ff == pytest.approx(b.quarter_ff, abs=1e-10)
