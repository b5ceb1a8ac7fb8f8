import math

import numpy as np
import pytest

from dbarn.forms import random_cpolynomial
from dbarn.geometry import (
    DiscGeometry,
    RadialFourierSum,
    SampledField,
    fd_weights,
    normal_derivative,
    plateau_bump,
    tangential_decompose,
    ws_inner_sampled,
    ws_norm_sampled,
)
from dbarn.sobolev import inner_s_direct


def radial(geom, fn):
    return SampledField.from_polar(geom, lambda r, t: fn(r) * np.ones_like(t))


# -- grid and quadrature --------------------------------------------------------


def test_area(geom):
    area = geom.interior_integral(np.ones((geom.n_r, geom.n_theta))).real
    assert abs(area - math.pi) / math.pi <= 1e-10


def test_grid_shape_validation():
    with pytest.raises(ValueError):
        DiscGeometry.build(radial_nodes=4)
    with pytest.raises(ValueError):
        DiscGeometry.build(angular_nodes=17)


def test_boundary_integral_examples(geom):
    assert abs(geom.boundary_integral(np.ones(geom.n_theta)) - 2 * math.pi) < 1e-13
    assert abs(geom.boundary_integral(np.exp(1j * geom.theta))) < 1e-13
    assert abs(geom.boundary_integral(np.cos(geom.theta) ** 2) - math.pi) < 1e-13


def test_unit_normal(geom):
    nu1, nu2 = geom.nu
    assert np.max(np.abs(nu1**2 + nu2**2 - 1.0)) < 1e-14


def test_normal_kills_nu(geom):
    # N(nu_j) = 0: the normal components are independent of r.
    nu1, _ = geom.nu
    f = SampledField(geom, np.broadcast_to(nu1, (geom.n_r, geom.n_theta)).copy())
    deriv = f.radial_derivative().values[geom.annulus_mask]
    assert np.max(np.abs(deriv)) < 1e-8


def test_tangential_kills_defining_function(geom):
    rho = radial(geom, lambda r: r - 1.0)
    y1, _ = tangential_decompose(1, rho)
    y2, _ = tangential_decompose(2, rho)
    assert np.max(np.abs(y1.values)) < 1e-12
    assert np.max(np.abs(y2.values)) < 1e-12


# -- normal derivatives -----------------------------------------------------------


def test_normal_derivative_examples(geom):
    f = radial(geom, lambda r: r**2)
    assert np.max(np.abs(normal_derivative(f, 1) - 2.0)) < 1e-9
    const = radial(geom, lambda r: np.ones_like(r))
    for order in (1, 2):
        assert np.max(np.abs(normal_derivative(const, order))) < 1e-9
    # higher orders amplify rounding by 1/spacing^order
    assert np.max(np.abs(normal_derivative(const, 3))) < 1e-6
    cubic = radial(geom, lambda r: (1 - r) ** 3)
    assert np.max(np.abs(normal_derivative(cubic, 2))) < 1e-7


def test_normal_derivative_order_cap(geom):
    f = radial(geom, lambda r: r)
    with pytest.raises(ValueError, match="order 4"):
        normal_derivative(f, 5)


def test_normal_derivative_needs_nodes(geom):
    f = radial(geom, lambda r: r)
    with pytest.raises(ValueError, match="boundary-layer"):
        normal_derivative(f, 4, spacing=0.4)


def test_fd_weights_differentiate_polynomials(rng):
    x = np.sort(rng.uniform(0.0, 1.0, size=7))
    w = fd_weights(x, 0.5, 3)
    coeffs = rng.standard_normal(5)
    vals = np.polyval(coeffs, x)
    for m in (0, 1, 2, 3):
        exact = np.polyval(np.polyder(np.poly1d(coeffs), m), 0.5)
        assert abs(w[m] @ vals - exact) < 1e-7 * max(1.0, abs(exact))


# -- tangential decomposition ------------------------------------------------------


def test_tangential_decompose_radial_field(geom):
    f = radial(geom, lambda r: r)
    nu1, _ = geom.nu
    yf, nf = tangential_decompose(1, f)
    mask = geom.annulus_mask
    assert np.max(np.abs(yf.values[mask])) < 1e-10
    expected = np.broadcast_to(nu1, (geom.n_r, geom.n_theta))[mask]
    assert np.max(np.abs(nf.values[mask] - expected)) < 1e-9


def test_tangential_decompose_angular_field(geom):
    f = SampledField.from_polar(geom, lambda r, t: np.exp(1j * t) * np.ones_like(r))
    mask = geom.annulus_mask
    assert np.max(np.abs(f.radial_derivative().values[mask])) < 1e-8


def test_tangential_decompose_x(geom):
    f = SampledField.from_function(geom, lambda z: z.real)
    nu1, _ = geom.nu
    y1, n1 = tangential_decompose(1, f)
    mask = geom.annulus_mask
    exp_y = np.broadcast_to(1 - nu1**2, (geom.n_r, geom.n_theta))
    exp_n = np.broadcast_to(nu1**2, (geom.n_r, geom.n_theta))
    assert np.max(np.abs(y1.values[mask] - exp_y[mask])) < 1e-9
    assert np.max(np.abs(n1.values[mask] - exp_n[mask])) < 1e-9


def test_decomposition_sums_to_real_derivative(geom, rng):
    for _ in range(5):
        p = random_cpolynomial(rng, 1, 3)
        f = SampledField.from_polynomial(geom, p)
        for j in (1, 2):
            yj, nj = tangential_decompose(j, f)
            exact = SampledField.from_polynomial(geom, p.diff_real(j))
            diff = (yj.values + nj.values - exact.values)[geom.annulus_mask]
            assert np.max(np.abs(diff)) < 1e-6


def test_nu_weighted_tangential_sum_vanishes(geom, rng):
    nu1, nu2 = geom.nu
    for _ in range(20):
        p = random_cpolynomial(rng, 1, 3)
        f = SampledField.from_polynomial(geom, p)
        y1, _ = tangential_decompose(1, f)
        y2, _ = tangential_decompose(2, f)
        total = nu1[None, :] * y1.values + nu2[None, :] * y2.values
        assert np.max(np.abs(total[geom.annulus_mask])) < 1e-8


# -- sampled W^s inner products ------------------------------------------------------


@pytest.mark.parametrize("s", [0, 1, 2])
def test_ws_norm_matches_exact(geom, rng, s):
    for _ in range(3):
        p = random_cpolynomial(rng, 1, 3)
        f = SampledField.from_polynomial(geom, p)
        exact = inner_s_direct(p, p, s).real
        quad = ws_inner_sampled(f, f, s).real
        assert abs(quad - exact) <= 1e-8 * max(exact, 1.0)


def test_ws_inner_polarized(geom, rng):
    p = random_cpolynomial(rng, 1, 3)
    q = random_cpolynomial(rng, 1, 3)
    f = SampledField.from_polynomial(geom, p)
    g = SampledField.from_polynomial(geom, q)
    exact = inner_s_direct(p, q, 2)
    quad = ws_inner_sampled(f, g, 2)
    assert abs(quad - exact) <= 1e-7 * max(abs(exact), 1.0)


def test_ws_norm_rejects_large_s(geom):
    f = radial(geom, lambda r: r)
    with pytest.raises(ValueError):
        ws_norm_sampled(f, 3)


# -- cutoff profile -------------------------------------------------------------------


def test_plateau_bump_shape():
    t = np.array([0.0, 0.3, 0.5, 0.6, 0.99, 1.0, 2.0])
    v = plateau_bump(t)
    assert v[0] == v[1] == v[2] == 1.0
    assert 0.0 < v[3] < 1.0
    assert v[4] < 1e-4
    assert v[5] == v[6] == 0.0
    assert np.array_equal(plateau_bump(-t), v)


def test_plateau_bump_derivatives_match_finite_differences():
    ts = np.linspace(0.55, 0.95, 9)
    h = 1e-6
    d1 = plateau_bump(ts, 1)
    fd1 = (plateau_bump(ts + h) - plateau_bump(ts - h)) / (2 * h)
    assert np.max(np.abs(d1 - fd1)) < 1e-5
    d2 = plateau_bump(ts, 2)
    fd2 = (plateau_bump(ts + h) - 2 * plateau_bump(ts) + plateau_bump(ts - h)) / h**2
    assert np.max(np.abs(d2 - fd2)) < 1e-3


# -- polar normal form -----------------------------------------------------------------


def test_radial_fourier_sum_exact_derivatives(geom, rng):
    p = random_cpolynomial(rng, 1, 4)
    rfs = RadialFourierSum.from_cpolynomial(p)
    sampled = rfs.sample(geom)
    direct = SampledField.from_polynomial(geom, p).values
    assert np.max(np.abs(sampled - direct)) < 1e-12
    # first radial derivative against the stencil path, away from the origin
    d_exact = rfs.radial_derivative(1).sample(geom)
    d_stencil = SampledField(geom, direct).radial_derivative().values
    mask = geom.r > 0.1
    assert np.max(np.abs((d_exact - d_stencil)[mask])) < 1e-6


def test_radial_fourier_phase_shift(geom):
    one = RadialFourierSum(((1.0 + 0j, 0, 0),))
    shifted = one.phase_shift(-1)
    vals = shifted.boundary_values(geom)
    assert np.allclose(vals, np.exp(-1j * geom.theta))


def test_field_csv_export(tmp_path):
    small = DiscGeometry.build(radial_nodes=20, angular_nodes=8, refine_depth=2)
    f = SampledField.from_polar(small, lambda r, t: r * np.exp(1j * t))
    path = tmp_path / "field.csv"
    f.to_csv(str(path))
    lines = path.read_text().splitlines()
    assert lines[0] == "r,theta,re,im"
    assert len(lines) == 1 + small.n_r * small.n_theta
