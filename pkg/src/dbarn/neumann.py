"""Discrete dbar complex on the disc and the weighted Neumann machinery.

All solver claims run on the monomial Galerkin spaces: functions are spanned
by z^a zbar^b with a+b <= d, (0,1)-form components by the same monomials with
a+b <= d-1 (the image of dbar on the function space, which keeps the discrete
dbar surjective and the discrete harmonic space trivial).  Every inner
product is an exact rational multiple of pi, so the assertions test algebra,
not quadrature.

Contents:

  * the dbar matrix and the W^s Hilbert-space adjoint of any matrix between
    Gram-weighted spaces,
  * least-norm (canonical) solutions of dbar u = f and the inverse of
    dbar dbar* on (0,1)-forms (in one complex variable the full Laplacian
    dbar dbar* + dbar* dbar reduces to dbar dbar* at top degree),
  * the Hodge-type splitting of a form into its dbar-range part and the
    orthogonal remainder,
  * the integration-by-parts (Green) identity connecting <dbar phi, psi>_s,
    <phi, theta psi>_s and the weighted boundary pairing, with every piece
    exact,
  * the boundary domain condition N^s(psi .| dbar rho) = 0, a cutoff
    projection producing forms that satisfy it, and the boundary blow-up
    experiment that shows why the condition is forced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .forms import CPolynomial, CRational, FormPoly, QC_ZERO
from .geometry import (
    DiscGeometry,
    RadialFourierSum,
    SampledField,
    default_geometry,
    normal_derivative,
    plateau_bump,
)
from .multiindex import enumerate_up_to, gamma
from .sobolev import (
    MonomialBasis,
    SobolevGram,
    _GRAM_CACHE,
    assemble_gram,
    inner_s_exact,
)

MAX_NEUMANN_S = 2
MAX_NEUMANN_D = 40


def form_subgram(gram: SobolevGram) -> SobolevGram:
    """Gram of the degree-(d-1) prefix, sliced from the degree-d matrix.

    The basis ordering is degree graded, so the leading principal block of
    the degree-d Gram is exactly the degree-(d-1) Gram; slicing avoids a
    second exact assembly and seeds the cache.
    """
    if gram.basis.degree == 0:
        raise ValueError("cannot slice below degree 0")
    sub_basis = MonomialBasis(gram.basis.degree - 1)
    key = (sub_basis.degree, gram.s)
    if key not in _GRAM_CACHE:
        sub = SobolevGram(s=gram.s, basis=sub_basis,
                          matrix=gram.matrix[: sub_basis.dim, : sub_basis.dim].copy())
        _GRAM_CACHE[key] = sub
    return _GRAM_CACHE[key]


@dataclass
class DiscreteComplex:
    """dbar: functions of degree <= d -> form components of degree <= d-1,
    with the W^s Gram geometry on both sides (one complex variable)."""

    s: int
    basis: MonomialBasis        # function space, degree d
    form_basis: MonomialBasis   # form component space, degree d-1
    gram: SobolevGram
    form_gram: SobolevGram
    dbar_matrix: np.ndarray     # shape (form_dim, dim)

    @classmethod
    def build(cls, d: int, s: int) -> "DiscreteComplex":
        if not 0 <= s <= MAX_NEUMANN_S:
            raise ValueError(f"s must lie in 0..{MAX_NEUMANN_S}")
        if not 1 <= d <= MAX_NEUMANN_D:
            raise ValueError(f"basis degree must lie in 1..{MAX_NEUMANN_D}")
        basis = MonomialBasis(d)
        gram = assemble_gram(basis, s)
        form_gram = form_subgram(gram)
        form_basis = form_gram.basis
        mat = np.zeros((form_basis.dim, basis.dim))
        for j, (a, b) in enumerate(basis.exponents):
            if b:
                mat[form_basis.index_of(a, b - 1), j] = b
        return cls(s=s, basis=basis, form_basis=form_basis, gram=gram,
                   form_gram=form_gram, dbar_matrix=mat)

    # -- coefficient plumbing ----------------------------------------------------

    def function_coeffs(self, p: CPolynomial) -> np.ndarray:
        return self.basis.coefficients_of(p)

    def form_coeffs(self, phi: FormPoly | CPolynomial) -> np.ndarray:
        comp = phi.component((1,)) if isinstance(phi, FormPoly) else phi
        return self.form_basis.coefficients_of(comp)

    def holomorphic_indices(self) -> np.ndarray:
        return np.array([i for i, (a, b) in enumerate(self.basis.exponents) if b == 0])


def adjoint(op_matrix: np.ndarray, gram_dom: SobolevGram,
            gram_cod: SobolevGram) -> np.ndarray:
    """The Gram adjoint A* with <A v, w>_cod = <v, A* w>_dom for all v, w.

    One round of iterative refinement on the Gram solve recovers the digits
    the Hilbert-type conditioning of the monomial Gram eats.
    """
    rhs = op_matrix.conj().T @ gram_cod.matrix
    x = gram_dom.solve(rhs)
    x += gram_dom.solve(rhs - gram_dom.matrix @ x)
    return x


@dataclass
class LeastNormSolution:
    coeffs: np.ndarray
    residual: float              # |dbar u - f|_s relative to |f|_s
    kernel_orthogonality: float  # max |<u, z^k>_s|


def _normal_factor(cx: DiscreteComplex) -> np.ndarray:
    """Cholesky factor of A G^-1 A^H, the Hermitian core of A A*.

    The Gram adjoint is A* = G^-1 A^H G_f, so A A* = (A G^-1 A^H) G_f; the
    parenthesized matrix is Hermitian positive definite exactly when the
    discrete dbar is onto the form space.
    """
    normal = cx.dbar_matrix @ cx.gram.solve(cx.dbar_matrix.conj().T)
    try:
        return np.linalg.cholesky(normal)
    except np.linalg.LinAlgError as exc:
        raise ValueError("dbar normal matrix is singular on the truncated range; "
                         "reduce the degree of f") from exc


def _chol_solve(lu: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    return np.linalg.solve(lu.conj().T, np.linalg.solve(lu, rhs))


def canonical_solve_dbar(f, s: int | None = None, d: int | None = None,
                         cx: DiscreteComplex | None = None) -> LeastNormSolution:
    """Least-W^s-norm solution of dbar u = f, orthogonal to the holomorphics.

    f may be a FormPoly / CPolynomial of degree <= d-1 or a coefficient
    vector over the form basis.  Solved through the Gram normal equations
    u = G^-1 A^H (A G^-1 A^H)^-1 f with two rounds of iterative refinement.
    """
    if cx is None:
        cx = DiscreteComplex.build(d, s)
    fvec = f if isinstance(f, np.ndarray) else cx.form_coeffs(f)
    lu = _normal_factor(cx)
    u = cx.gram.solve(cx.dbar_matrix.conj().T @ _chol_solve(lu, fvec))
    for _ in range(2):
        r = fvec - cx.dbar_matrix @ u
        u = u + cx.gram.solve(cx.dbar_matrix.conj().T @ _chol_solve(lu, r))

    fnorm = cx.form_gram.norm(fvec)
    resid = cx.form_gram.norm(cx.dbar_matrix @ u - fvec) / fnorm if fnorm else 0.0
    holo = cx.holomorphic_indices()
    pair = cx.gram.matrix @ u
    ortho = float(np.max(np.abs(pair[holo]))) if len(holo) else 0.0
    return LeastNormSolution(coeffs=u, residual=resid, kernel_orthogonality=ortho)


@dataclass
class NeumannSolution:
    coeffs: np.ndarray           # (0,1)-form coefficients of u = N_s f
    residual: float              # |dbar dbar* u - f|_s / |f|_s
    norm_ratio: float            # |u|_s / |f|_s
    canonical_match: float       # |dbar* u - canonical solution|_s


def neumann_solve(f, s: int | None = None, d: int | None = None,
                  cx: DiscreteComplex | None = None) -> NeumannSolution:
    """Invert dbar dbar* on (0,1)-forms (the full Laplacian at top degree).

    The discrete harmonic space is trivial (dbar is onto the form space), so
    the solve is a definite system; dbar* of the solution must match the
    independent least-norm solve of dbar u = f.
    """
    if cx is None:
        cx = DiscreteComplex.build(d, s)
    fvec = f if isinstance(f, np.ndarray) else cx.form_coeffs(f)
    a_star = adjoint(cx.dbar_matrix, cx.gram, cx.form_gram)
    # Operator on forms: u -> A A* u = (A G^-1 A^H)(G_f u); solve in two steps.
    lu = _normal_factor(cx)

    def apply_op(vec: np.ndarray) -> np.ndarray:
        return cx.dbar_matrix @ (a_star @ vec)

    u = cx.form_gram.solve(_chol_solve(lu, fvec))
    for _ in range(2):
        r = fvec - apply_op(u)
        u = u + cx.form_gram.solve(_chol_solve(lu, r))

    fnorm = cx.form_gram.norm(fvec)
    resid = cx.form_gram.norm(apply_op(u) - fvec) / fnorm if fnorm else 0.0
    ratio = cx.form_gram.norm(u) / fnorm if fnorm else 0.0
    canon = canonical_solve_dbar(fvec, cx=cx)
    diff = cx.gram.norm(a_star @ u - canon.coeffs)
    return NeumannSolution(coeffs=u, residual=resid, norm_ratio=ratio,
                           canonical_match=diff)


def neumann_operator_norm_proxy(d: int, s: int) -> float:
    """max over form basis vectors of |N_s e_k|_s / |e_k|_s."""
    cx = DiscreteComplex.build(d, s)
    lu = _normal_factor(cx)
    inv = cx.form_gram.solve(_chol_solve(lu, np.eye(cx.form_basis.dim)))
    best = 0.0
    for k in range(cx.form_basis.dim):
        e = np.zeros(cx.form_basis.dim)
        e[k] = 1.0
        best = max(best, cx.form_gram.norm(inv[:, k]) / cx.form_gram.norm(e))
    return best


def hodge_decompose(f, s: int | None = None, d: int | None = None,
                    cx: DiscreteComplex | None = None
                    ) -> tuple[np.ndarray, np.ndarray]:
    """Split f into its dbar-range part and the W^s-orthogonal remainder.

    f is a coefficient vector over the full degree-d basis (or a form whose
    component may reach degree d).  In one variable at top degree the
    remainder is purely a truncation artifact: it vanishes whenever f lies
    in the degree-(d-1) range of the discrete dbar.
    """
    if cx is None:
        cx = DiscreteComplex.build(d, s)
    if isinstance(f, np.ndarray):
        fvec = f
    else:
        comp = f.component((1,)) if isinstance(f, FormPoly) else f
        fvec = cx.basis.coefficients_of(comp)
    k = cx.form_basis.dim
    rhs = (cx.gram.matrix @ fvec)[:k]
    c = cx.form_gram.solve(rhs)
    f1 = np.zeros_like(fvec)
    f1[:k] = c
    return f1, fvec - f1


# -- exact rational block backend -------------------------------------------------
#
# The monomial Gram decomposes into charge blocks (charge = z-exponent minus
# zbar-exponent) that are shifted Hilbert matrices; beyond degree ~25 their
# float64 factorization breaks down even though the matrices are exactly
# positive definite.  dbar shifts charge by +1, so the whole Neumann solve
# factors over charges into blocks of size <= (d+2)/2, small enough to solve
# in exact rational arithmetic.  The routines below carry out the solve and
# the positivity certification that way; only final scalars become floats.


def _charge_exponents(charge: int, max_degree: int) -> list[tuple[int, int]]:
    out = []
    b = max(0, -charge)
    while 2 * b + charge <= max_degree:
        out.append((b + charge, b))
        b += 1
    return out


def _exact_gram_block(exps: list[tuple[int, int]], s: int) -> list[list[Fraction]]:
    monos = [CPolynomial.monomial(1, (a,), (b,)) for a, b in exps]
    n = len(monos)
    block = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            val = inner_s_exact(monos[i], monos[j], s)
            if val.im != 0:
                raise AssertionError("same-charge Gram entry must be real")
            block[i][j] = block[j][i] = val.re
    return block


def _fraction_solve(mat: list[list[Fraction]], rhs: list[list[Fraction]]
                    ) -> list[list[Fraction]]:
    """Exact Gaussian elimination; rhs holds columns of the right-hand sides."""
    n = len(mat)
    a = [row[:] + r[:] for row, r in zip(mat, rhs)]
    m = len(a[0])
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise ValueError("exact system is singular")
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:m] for row in a]


def _fraction_ldl_pivots(mat: list[list[Fraction]]) -> list[Fraction]:
    """Pivots of the (unpermuted) LDL^T factorization; all positive iff PD."""
    n = len(mat)
    a = [row[:] for row in mat]
    pivots = []
    for k in range(n):
        piv = a[k][k]
        pivots.append(piv)
        if piv == 0:
            return pivots
        for r in range(k + 1, n):
            f = a[r][k] / piv
            for c in range(k, n):
                a[r][c] -= f * a[k][c]
    return pivots


def verify_gram_positive_definite_exact(d: int, s: int) -> bool:
    """Certify positive definiteness of the degree-d W^s Gram, exactly."""
    for charge in range(-d, d + 1):
        exps = _charge_exponents(charge, d)
        if not exps:
            continue
        block = _exact_gram_block(exps, s)
        if any(p <= 0 for p in _fraction_ldl_pivots(block)):
            return False
    return True


def neumann_operator_norm_proxy_exact(d: int, s: int) -> float:
    """max_k |N_s e_k|_s / |e_k|_s over the form basis, in exact arithmetic.

    For a form basis vector e_k in charge block kappa, the solve reads
    y = (A G_func^-1 A^H)^-1 e_k and |N_s e_k|_s^2 = y^T G_form^-1 y; both
    Grams and the integer dbar block A live on single charges.
    """
    if s < 0 or s > MAX_NEUMANN_S:
        raise ValueError(f"s must lie in 0..{MAX_NEUMANN_S}")
    best = Fraction(0)
    for charge in range(-(d - 1), d):
        form_exps = _charge_exponents(charge, d - 1)
        if not form_exps:
            continue
        func_exps = _charge_exponents(charge - 1, d)
        form_index = {e: i for i, e in enumerate(form_exps)}
        nf, nu = len(form_exps), len(func_exps)
        a_mat = [[Fraction(0)] * nu for _ in range(nf)]
        for j, (a, b) in enumerate(func_exps):
            if b:
                a_mat[form_index[(a, b - 1)]][j] = Fraction(b)
        g_func = _exact_gram_block(func_exps, s)
        g_form = _exact_gram_block(form_exps, s)
        # X = G_func^-1 A^T ; M = A X ; Y = M^-1 ; W = G_form^-1 Y
        a_t = [[a_mat[i][j] for i in range(nf)] for j in range(nu)]
        x = _fraction_solve(g_func, a_t)
        m = [[sum(a_mat[i][t] * x[t][j] for t in range(nu)) for j in range(nf)]
             for i in range(nf)]
        eye = [[Fraction(1) if i == j else Fraction(0) for j in range(nf)]
               for i in range(nf)]
        y = _fraction_solve(m, eye)
        w = _fraction_solve(g_form, y)
        for k in range(nf):
            num = sum(y[t][k] * w[t][k] for t in range(nf))
            ratio2 = num / g_form[k][k]
            best = max(best, ratio2)
    return math.sqrt(float(best))


# -- exact Green identity -------------------------------------------------------


def _circle_integral_exact(p: CPolynomial) -> CRational:
    """Exact unit-circle integral of a polynomial, as a multiple of pi.

    integral over the circle of z^a zbar^b dtheta = 2 pi iff a == b.
    """
    total = QC_ZERO
    for (a, b), c in p.terms.items():
        if a[0] == b[0]:
            total = total + c.scale(2)
    return total


@dataclass
class GreensIdentityResult:
    lhs: complex
    interior: complex
    boundary: complex
    residual: float


def greens_identity_check(phi: CPolynomial, psi: FormPoly | CPolynomial,
                          s: int) -> GreensIdentityResult:
    """Check <dbar phi, psi>_s = <phi, theta psi>_s + weighted boundary pairing.

    All three pieces are computed independently in exact rational arithmetic
    (interior: disc monomial integrals; boundary: circle monomial integrals),
    so the residual is pure floating-point conversion noise.
    """
    if s < 0 or s > 2:
        raise ValueError("the exact identity check supports s in {0, 1, 2}")
    psi1 = psi.component((1,)) if isinstance(psi, FormPoly) else psi
    lhs = inner_s_exact(phi.diff_zbar(1), psi1, s)
    interior = inner_s_exact(phi, -psi1.diff_z(1), s)
    half_z = CPolynomial.monomial(1, (1,), (0,), CRational.of(Fraction(1, 2)))
    boundary = QC_ZERO
    for alpha in enumerate_up_to(s, 2):
        dphi = phi.diff_multi(alpha.exponents)
        dpsi = psi1.diff_multi(alpha.exponents)
        integrand = dphi * dpsi.conjugate() * half_z
        boundary = boundary + _circle_integral_exact(integrand).scale(gamma(alpha))
    diff = lhs - interior - boundary
    return GreensIdentityResult(
        lhs=lhs.to_complex() * math.pi,
        interior=interior.to_complex() * math.pi,
        boundary=boundary.to_complex() * math.pi,
        residual=abs(diff.to_complex()) * math.pi,
    )


# -- boundary domain condition and the cutoff projection -------------------------


def contraction_with_dbar_rho(psi: SampledField) -> SampledField:
    """psi .| dbar(rho) = psi_1 * exp(-i theta)/2 on the grid (n = 1)."""
    geom = psi.geom
    return SampledField(geom, psi.values * geom.rho_z_phase[None, :])


def check_domain_condition(psi: SampledField | FormPoly, s: int,
                           geom: DiscGeometry | None = None,
                           spacing: float | None = None) -> float:
    """Max over boundary nodes of |N^s(psi .| dbar rho)| via radial stencils."""
    if isinstance(psi, FormPoly):
        if geom is None:
            geom = default_geometry()
        psi = SampledField.from_polynomial(geom, psi.component((1,)))
    c = contraction_with_dbar_rho(psi)
    vals = normal_derivative(c, s, spacing=spacing)
    return float(np.max(np.abs(vals)))


def domain_projection(phi: FormPoly, s: int, eps: float,
                      geom: DiscGeometry | None = None) -> SampledField:
    """Boundary-collar form psi with N^s((phi - psi) .| dbar rho) = 0 on bOmega.

    psi = c_s * (-rho)^s * cutoff(-rho/eps) * N^s(phi .| dbar rho) wedge dbar rho,
    with c_s = (-1)^s * 4 / s! .  The factor 4 = |dbar rho|^{-2} and the sign
    (-1)^s = N^s((-rho)^s)/s! at the boundary are exactly what make the s-th
    normal derivative of the contraction of psi reproduce that of phi; the
    collar cutoff keeps |psi|_s small as eps shrinks.  The s-fold normal
    derivative of the contraction is taken exactly in the polar normal form
    of the polynomial input, so the only numerics in psi are the cutoff
    factors.
    """
    if not 0 < eps < 0.5:
        raise ValueError("eps must lie in (0, 0.5)")
    if s < 1:
        raise ValueError("s must be positive")
    if geom is None:
        geom = default_geometry()
    comp = phi.component((1,))
    contraction = RadialFourierSum.from_cpolynomial(comp).phase_shift(-1).scale(0.5)
    g_vals = contraction.radial_derivative(s).sample(geom)
    u = 1.0 - geom.r
    cut = u**s * plateau_bump(u / eps)
    c_s = (-1) ** s * 4.0 / math.factorial(s)
    rho_zbar = np.conj(geom.rho_z_phase)
    vals = c_s * cut[:, None] * g_vals * rho_zbar[None, :]
    return SampledField(geom, vals, form_degree=1)


# -- the boundary blow-up experiment ---------------------------------------------


@dataclass
class BlowupRow:
    eps: float
    norm: float
    pairing: float


@dataclass
class BlowupReport:
    s: int
    delta: float
    rows: tuple[BlowupRow, ...]
    slope: float
    norm_ratio: float
    test_form: str

    @property
    def pairing_monotone(self) -> bool:
        pairings = [row.pairing for row in self.rows]  # rows sorted by eps desc
        return all(a < b for a, b in zip(pairings, pairings[1:]))


def _cap_radial_factor(s: int, eps: float, delta: float, r: np.ndarray
                       ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(R, dR/dr, d2R/dr2) of (1-r)^(s-1) (1-r+eps)^(3/4) bump((1-r)/delta)."""
    u = 1.0 - r
    if s == 1:
        p, p1, p2 = np.ones_like(u), np.zeros_like(u), np.zeros_like(u)
    elif s == 2:
        p, p1, p2 = u, np.ones_like(u), np.zeros_like(u)
    else:
        p = u ** (s - 1)
        p1 = (s - 1) * u ** (s - 2)
        p2 = (s - 1) * (s - 2) * u ** (s - 3)
    q = (u + eps) ** 0.75
    q1 = 0.75 * (u + eps) ** (-0.25)
    q2 = 0.75 * -0.25 * (u + eps) ** (-1.25)
    c = plateau_bump(u / delta)
    c1 = plateau_bump(u / delta, 1) / delta
    c2 = plateau_bump(u / delta, 2) / delta**2
    val = p * q * c
    d_u = p1 * q * c + p * q1 * c + p * q * c1
    d_uu = (p2 * q * c + p * q2 * c + p * q * c2
            + 2 * (p1 * q1 * c + p1 * q * c1 + p * q1 * c1))
    return val, -d_u, d_uu  # d/dr = -d/du


def _cap_angular_factor(delta: float, theta: np.ndarray
                        ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    t = np.mod(theta + math.pi, 2 * math.pi) - math.pi
    return (plateau_bump(t / delta),
            plateau_bump(t / delta, 1) / delta,
            plateau_bump(t / delta, 2) / delta**2)


def _separable_ws_norm(geom: DiscGeometry, s: int,
                       radial: tuple[np.ndarray, np.ndarray, np.ndarray],
                       angular: tuple[np.ndarray, np.ndarray, np.ndarray]) -> float:
    """W^s norm of R(r) T(theta) with analytic factor derivatives, s <= 2."""
    R, R1, R2 = radial
    T, T1, T2 = angular
    r = geom.r[:, None]

    def integral(arr: np.ndarray) -> float:
        return geom.interior_integral(arr).real

    f = R[:, None] * T[None, :]
    total = integral(np.abs(f) ** 2)
    if s >= 1:
        fr = R1[:, None] * T[None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            ft_over_r = R[:, None] * T1[None, :] / r
        ft_over_r[geom.r == 0.0, :] = 0.0
        total += integral(np.abs(fr) ** 2 + np.abs(ft_over_r) ** 2)
    if s >= 2:
        frr = R2[:, None] * T[None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            h_rt = R1[:, None] * T1[None, :] / r - R[:, None] * T1[None, :] / r**2
            h_tt = R1[:, None] * T[None, :] / r + R[:, None] * T2[None, :] / r**2
        h_rt[geom.r == 0.0, :] = 0.0
        h_tt[geom.r == 0.0, :] = 0.0
        total += integral(np.abs(frr) ** 2 + 2 * np.abs(h_rt) ** 2 + np.abs(h_tt) ** 2)
    return math.sqrt(max(total, 0.0))


def blowup_test_form(s: int) -> FormPoly:
    """Fixed pairing form: 2 z^(m+1) zbar^m dzbar with m = ceil(s/2).

    Its contraction with dbar(rho) is r^(2m+1), whose s-th radial derivative
    at r = 1 is the constant (2m+1)!/(2m+1-s)! >= 1 on the whole circle, so
    the cap-localized pairing sees a uniform nonzero target.
    """
    m = (s + 1) // 2
    comp = CPolynomial.monomial(1, (m + 1,), (m,), 2)
    return FormPoly(1, 1, {(1,): comp})


def blowup_experiment(s: int, eps_list: list[float] | None = None,
                      delta: float = 0.5,
                      geom: DiscGeometry | None = None) -> BlowupReport:
    """Measure the boundary pairing blow-up of the cap family.

    The family phi_eps = (-rho)^(s-1) (-rho+eps)^(3/4) chi has W^s norms
    bounded in eps while its s-th normal trace grows like eps^(-1/4);
    pairing it against a fixed admissible-direction form on the circle and
    fitting log|pairing| against log(eps) measures that exponent.  Radial
    derivatives of the family are analytic; only the cutoff profile values
    are numeric.
    """
    if s not in (1, 2):
        raise ValueError("the blow-up experiment supports s in {1, 2}")
    if eps_list is None:
        eps_list = [2.0 ** (-k) for k in range(3, 11)]
    eps_list = sorted(eps_list, reverse=True)
    if min(eps_list) < 2.0**-12 or max(eps_list) > 2.0**-3:
        raise ValueError("eps values must lie in [2^-12, 2^-3]")
    if geom is None:
        depth = max(10, int(math.ceil(-math.log2(min(eps_list)))) + 3)
        geom = default_geometry(radial_nodes=900, angular_nodes=128, refine_depth=depth)
    if geom.floor_width > min(eps_list) / 4.0:
        raise ValueError(
            f"radial grid (floor width {geom.floor_width:.2e}) does not resolve "
            f"the smallest eps {min(eps_list):.2e}")

    psi = blowup_test_form(s)
    m = (s + 1) // 2
    trace_constant = math.factorial(2 * m + 1) // math.factorial(2 * m + 1 - s)
    # N^s(psi .| dbar rho) on the circle, exact in the polar normal form:
    contraction = (RadialFourierSum.from_cpolynomial(psi.component((1,)))
                   .phase_shift(-1).scale(0.5))
    psi_trace = contraction.radial_derivative(s).boundary_values(geom)

    angular = _cap_angular_factor(delta, geom.theta)
    rows = []
    for eps in eps_list:
        radial = _cap_radial_factor(s, eps, delta, geom.r)
        norm = _separable_ws_norm(geom, s, radial, angular)
        # N^s of the family at r = 1: all s-1 derivatives must land on the
        # (1-r)^(s-1) factor, one on (1-r+eps)^(3/4); the cutoff is flat at
        # the boundary.
        trace = (math.factorial(s) * (-1.0) ** s * 0.75 * eps**-0.25) * angular[0]
        pairing = abs(geom.boundary_integral(trace * np.conj(psi_trace)))
        rows.append(BlowupRow(eps=eps, norm=norm, pairing=pairing))

    logs = np.log([row.eps for row in rows])
    logp = np.log([row.pairing for row in rows])
    slope = float(np.polyfit(logs, logp, 1)[0])
    norms = [row.norm for row in rows]
    return BlowupReport(
        s=s, delta=delta, rows=tuple(rows), slope=slope,
        norm_ratio=max(norms) / min(norms),
        test_form=f"2 z^{m + 1} zbar^{m} dzbar (trace constant {trace_constant})",
    )
