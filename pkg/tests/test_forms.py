from fractions import Fraction

import numpy as np
import pytest

from dbarn.forms import (
    CPolynomial,
    CRational,
    FormPoly,
    QC_ONE,
    box,
    contract,
    dbar,
    epsilon,
    form_from_text,
    form_to_text,
    laplacian,
    random_cpolynomial,
    random_form,
    theta,
    wedge_d1,
)

from oracles import contract_full, dbar_full, theta_full, wedge_full


def const_form(n, q, J):
    return FormPoly(n, q, {tuple(J): CPolynomial.const(n, 1)})


# -- scalars and polynomials -----------------------------------------------------


def test_crational_arithmetic():
    a = CRational.of(Fraction(1, 2), Fraction(-1, 3))
    b = CRational.of(2, 1)
    assert (a * b).re == Fraction(4, 3)
    assert (a * b).im == Fraction(-1, 6)
    assert (a / a) == QC_ONE
    assert a.conjugate().im == Fraction(1, 3)
    assert (a - a).is_zero()


def test_cpolynomial_rejects_zero_coefficients():
    with pytest.raises(ValueError):
        CPolynomial(1, {((0,), (0,)): CRational.of(0)})


def test_wirtinger_derivatives():
    # f = z^2 zbar: df/dz = 2 z zbar, df/dzbar = z^2
    f = CPolynomial.monomial(2, (2, 0), (1, 0))
    fz = f.diff_z(1)
    assert fz.terms == {((1, 0), (1, 0)): CRational.of(2)}
    fzb = f.diff_zbar(1)
    assert fzb.terms == {((2, 0), (0, 0)): CRational.of(1)}


def test_real_derivatives_match_cartesian(rng):
    # D_1 (x-derivative) of x^2 = 2x with x = (z + zbar)/2
    x = (CPolynomial.z(1, 1) + CPolynomial.zbar(1, 1)).scale(Fraction(1, 2))
    d = (x * x).diff_real(1)
    assert d == x.scale(2)
    # D_2 (y-derivative) of y = 1 with y = (z - zbar)/2i
    y = (CPolynomial.z(1, 1) - CPolynomial.zbar(1, 1)).scale(
        CRational.of(0, Fraction(-1, 2)))
    assert y.diff_real(2) == CPolynomial.const(1, 1)


def test_eval_matches_terms(rng):
    p = random_cpolynomial(rng, 2, 3)
    zs = rng.standard_normal((2, 5)) + 1j * rng.standard_normal((2, 5))
    direct = np.zeros(5, dtype=complex)
    for (a, b), c in p.terms.items():
        direct += (c.to_complex() * zs[0] ** a[0] * zs[1] ** a[1]
                   * np.conj(zs[0]) ** b[0] * np.conj(zs[1]) ** b[1])
    assert np.allclose(p.eval(zs), direct)


def test_conjugate_is_pointwise_conjugate(rng):
    p = random_cpolynomial(rng, 2, 3)
    zs = rng.standard_normal((2, 4)) + 1j * rng.standard_normal((2, 4))
    assert np.allclose(p.conjugate().eval(zs), np.conj(p.eval(zs)))


# -- sign bookkeeping ---------------------------------------------------------------


def test_epsilon_examples():
    assert epsilon(1, (2,), (1, 2)) == 1
    assert epsilon(2, (1,), (1, 2)) == -1
    assert epsilon(1, (1, 3), (1, 2, 3)) == 0
    assert epsilon(2, (1, 3), (1, 2, 3)) == -1
    assert epsilon(3, (1, 2), (1, 2, 4)) == 0


# -- dbar -----------------------------------------------------------------------------


def test_dbar_examples():
    f = FormPoly(2, 0, {(): CPolynomial.zbar(2, 1)})
    assert dbar(f).component((1,)).terms == {((0, 0), (0, 0)): QC_ONE}
    holo = FormPoly(2, 0, {(): CPolynomial.z(2, 1)})
    assert dbar(holo).is_zero()
    phi = FormPoly(2, 1, {(1,): CPolynomial.zbar(2, 2)})
    assert dbar(phi).component((1, 2)).terms == {((0, 0), (0, 0)): CRational.of(-1)}


def test_dbar_top_degree_is_zero(rng):
    phi = random_form(rng, 2, 2, 3)
    assert dbar(phi).is_zero()


def test_dbar_matches_antisymmetrization_oracle(rng):
    for _ in range(25):
        n = int(rng.integers(2, 4))
        q = int(rng.integers(0, n))
        phi = random_form(rng, n, q, 3)
        assert dbar(phi) == dbar_full(phi)


def test_dbar_squared_zero(rng):
    for _ in range(30):
        n = int(rng.integers(2, 4))
        q = int(rng.integers(0, n - 1))
        phi = random_form(rng, n, q, 4)
        assert dbar(dbar(phi)).is_zero()


# -- theta ----------------------------------------------------------------------------


def test_theta_examples():
    psi = FormPoly(1, 1, {(1,): CPolynomial.z(1, 1)})
    assert theta(psi).component(()).terms == {((0,), (0,)): CRational.of(-1)}
    assert theta(const_form(1, 1, (1,))).is_zero()
    psi2 = FormPoly(2, 2, {(1, 2): CPolynomial.z(2, 2)})
    assert theta(psi2).component((1,)).terms == {((0, 0), (0, 0)): QC_ONE}


def test_theta_degree_error():
    with pytest.raises(ValueError, match="degree"):
        theta(const_form(2, 0, ()))


def test_theta_matches_oracle(rng):
    for _ in range(25):
        n = int(rng.integers(2, 4))
        q = int(rng.integers(1, n + 1))
        psi = random_form(rng, n, q, 3)
        assert theta(psi) == theta_full(psi)


def test_theta_squared_zero(rng):
    for _ in range(30):
        n = int(rng.integers(2, 4))
        q = int(rng.integers(2, n + 1))
        psi = random_form(rng, n, q, 4)
        assert theta(theta(psi)).is_zero()


# -- contraction and wedge ------------------------------------------------------------


def test_contract_examples():
    psi = const_form(2, 2, (1, 2))
    assert contract(psi, const_form(2, 1, (1,))).component((2,)).terms == {
        ((0, 0), (0, 0)): QC_ONE}
    assert contract(psi, const_form(2, 1, (2,))).component((1,)).terms == {
        ((0, 0), (0, 0)): CRational.of(-1)}
    assert contract(const_form(2, 1, (1,)), const_form(2, 1, (2,))).is_zero()


def test_contract_conjugates_polynomial_coefficients():
    # omega = z dzbar: conj(omega_1) = zbar
    psi = const_form(1, 1, (1,))
    omega = FormPoly(1, 1, {(1,): CPolynomial.z(1, 1)})
    out = contract(psi, omega)
    assert out.component(()).terms == {((0,), (1,)): QC_ONE}


def test_contract_matches_oracle(rng):
    for _ in range(25):
        n = int(rng.integers(2, 4))
        q = int(rng.integers(1, n + 1))
        psi = random_form(rng, n, q, 3)
        omega = random_form(rng, n, 1, 3)
        assert contract(psi, omega) == contract_full(psi, omega)


def test_wedge_examples():
    one = const_form(2, 0, ())
    dzb1 = const_form(2, 1, (1,))
    assert wedge_d1(one, dzb1) == dzb1
    assert wedge_d1(dzb1, dzb1).is_zero()


def test_wedge_matches_oracle(rng):
    for _ in range(25):
        n = int(rng.integers(2, 4))
        q = int(rng.integers(0, n))
        phi = random_form(rng, n, q, 3)
        omega = random_form(rng, n, 1, 3)
        assert wedge_d1(phi, omega) == wedge_full(phi, omega)


def test_wedge_degree_error():
    with pytest.raises(ValueError, match="top degree"):
        wedge_d1(const_form(2, 2, (1, 2)), const_form(2, 1, (1,)))


def test_interior_exterior_anticommutation(rng):
    # contract(wedge(phi, w), w) + wedge(contract(phi, w), w) = |w|^2 phi
    # for constant-coefficient w.
    for _ in range(50):
        n = int(rng.integers(2, 4))
        q = int(rng.integers(1, n))
        phi = random_form(rng, n, q, 3)
        comps = {}
        norm2 = CRational.of(0)
        for k in range(1, n + 1):
            c = CRational.of(int(rng.integers(-3, 4)), int(rng.integers(-3, 4)))
            if not c.is_zero():
                comps[(k,)] = CPolynomial.const(n, c)
                norm2 = norm2 + c * c.conjugate()
        omega = FormPoly(n, 1, comps)
        lhs = contract(wedge_d1(phi, omega), omega) + wedge_d1(contract(phi, omega), omega)
        assert lhs == phi.scale(norm2)


# -- box -----------------------------------------------------------------------------


def test_box_examples():
    f = CPolynomial.z(1, 1) * CPolynomial.zbar(1, 1)
    assert box(FormPoly(1, 0, {(): f})).component(()).terms == {
        ((0,), (0,)): CRational.of(-1)}
    assert box(const_form(2, 0, ())).is_zero()
    # value fixed by direct composition: theta kills zbar^2 dzbar, dbar is top
    # degree, so box(zbar^2 dzbar) = 0 (consistent with Lap(zbar^2) = 0).
    psi = FormPoly(1, 1, {(1,): CPolynomial.monomial(1, (0,), (2,))})
    assert box(psi).is_zero()


def test_box_is_composition(rng):
    for _ in range(10):
        n = int(rng.integers(1, 4))
        q = int(rng.integers(1, n + 1))
        phi = random_form(rng, n, q, 3)
        expected = theta(dbar(phi)) if q < n else FormPoly.zero(n, q)
        expected = expected + dbar(theta(phi))
        assert box(phi) == expected


def test_box_diagonal_and_proportional(rng):
    constant = CRational.of(Fraction(-1, 4))
    for _ in range(30):
        n = int(rng.integers(1, 4))
        q = int(rng.integers(0, n + 1))
        phi = random_form(rng, n, q, 3)
        b = box(phi)
        for K in set(phi.comps) | set(b.comps):
            single = FormPoly.from_components(n, q, {K: phi.component(K)})
            assert box(single).component(K) == b.component(K)
            assert b.component(K) == laplacian(phi.component(K)).scale(constant)


# -- serialization ---------------------------------------------------------------------


def test_form_text_round_trip(rng):
    for _ in range(10):
        n = int(rng.integers(1, 4))
        q = int(rng.integers(0, n + 1))
        phi = random_form(rng, n, q, 4)
        assert form_from_text(form_to_text(phi)) == phi


def test_form_text_explicit():
    text = """
    (form (n 2) (q 1)
      (comp (2)
        (term 1/2 -3 (z 1 0) (zbar 0 2))))
    """
    phi = form_from_text(text)
    assert phi.n == 2 and phi.q == 1
    assert phi.component((2,)).terms == {
        ((1, 0), (0, 2)): CRational.of(Fraction(1, 2), -3)}


def test_form_text_rejects_garbage():
    with pytest.raises(ValueError):
        form_from_text("(shape (n 1))")
    with pytest.raises(ValueError):
        form_from_text("(form (q 1) (comp (1) (term 1 0 (z 1) (zbar 0))))")
