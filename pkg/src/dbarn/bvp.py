"""Elliptic boundary value problems behind the Sobolev adjoint correction.

Two solvers live here.

1. A one-dimensional analog on [0, 1] of the interior equation
   sum_{j=0}^s (-Lap)^j u = 0 with s boundary operators per endpoint, each a
   polynomial in the outward normal derivative (leading order s+k-1, leading
   coefficient (-1)^(k-1) for the k-th operator).  The ODE has constant
   coefficients, so the solution space is spanned exactly by exponentials
   exp(lambda x) where -lambda^2 runs over the nontrivial (s+1)-th roots of
   unity; solving is collocation of the boundary operators on that basis.
   A second-order finite-difference path provides an independent check.

2. The adjoint-correction operator K on the unit disc for s = 1.  Its
   component solves

        omega - Lap(omega) = 0  on the disc,
        N(omega) = P2(psi)      on the circle,

   where the order-2 boundary data P2(psi) consists of the contraction
   psi .| dbar(rho) plus the adjoint-tangential corrections
   Y_j^* (D_j psi_1 * drho/dz); on the circle Y_j = c_j(theta) d/dtheta with
   c_1 = -sin, c_2 = cos and the adjoint with respect to arc measure is
   Y_j^* = -d/dtheta (c_j .).  The solve is per Fourier mode: a radial
   two-point problem with a regularized row at r = 0 (L'Hopital for m = 0,
   Dirichlet for m >= 1) and the Neumann datum at r = 1, discretized with
   second-order differences on the geometry's radial line and validated
   against the modified-Bessel power series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .forms import CPolynomial
from .geometry import (
    DiscGeometry,
    SampledField,
    fd_weights,
    normal_derivative,
)

# -- 1D interval problem -------------------------------------------------------


def characteristic_roots(s: int) -> np.ndarray:
    """The 2s roots lambda of sum_j (-lambda^2)^j = 0, i.e. -lambda^2 a
    nontrivial (s+1)-th root of unity."""
    if s < 1:
        raise ValueError("s must be positive")
    ks = np.arange(1, s + 1)
    zeta = np.exp(2j * math.pi * ks / (s + 1))
    lam = np.sqrt(-zeta)
    return np.concatenate([lam, -lam])


@dataclass(frozen=True)
class Interval1DProblem:
    """Boundary operators and data for the order-2s interval problem.

    Each operator is a coefficient list over powers 0..2s-1 of the outward
    normal derivative at its endpoint (N = -d/dx at 0, N = +d/dx at 1).
    The k-th operator (k = 1..s) must have leading order s+k-1 with leading
    coefficient (-1)^(k-1).
    """

    s: int
    left_ops: tuple[tuple[complex, ...], ...]
    right_ops: tuple[tuple[complex, ...], ...]
    left_data: tuple[complex, ...]
    right_data: tuple[complex, ...]

    def __post_init__(self) -> None:
        s = self.s
        for name, ops, data in (("left", self.left_ops, self.left_data),
                                ("right", self.right_ops, self.right_data)):
            if len(ops) != s or len(data) != s:
                raise ValueError(f"{name} side needs exactly s={s} operators and data")
            for k, op in enumerate(ops, start=1):
                if len(op) > 2 * s:
                    raise ValueError(f"{name} operator {k} exceeds normal order {2*s - 1}")
                lead = s + k - 1
                padded = tuple(op) + (0,) * (2 * s - len(op))
                if any(abs(c) > 1e-14 for c in padded[lead + 1:]):
                    raise ValueError(
                        f"{name} operator {k} must have leading normal order {lead}")
                if abs(padded[lead] - (-1) ** (k - 1)) > 1e-12:
                    raise ValueError(
                        f"{name} operator {k} must have leading coefficient "
                        f"{(-1) ** (k - 1)}")

    @staticmethod
    def shaped(s: int, left_data: Sequence[complex], right_data: Sequence[complex],
               lower_order: np.ndarray | None = None) -> "Interval1DProblem":
        """Problem with the canonical operator structure.

        lower_order, if given, has shape (2, s, 2s) and adds constant
        lower-order terms below each operator's leading entry.
        """
        ops = []
        for side in range(2):
            side_ops = []
            for k in range(1, s + 1):
                coeffs = np.zeros(2 * s, dtype=complex)
                coeffs[s + k - 1] = (-1) ** (k - 1)
                if lower_order is not None:
                    extra = np.asarray(lower_order[side][k - 1], dtype=complex).copy()
                    extra[s + k - 1:] = 0.0
                    coeffs += extra
                side_ops.append(tuple(coeffs))
            ops.append(tuple(side_ops))
        return Interval1DProblem(s, ops[0], ops[1],
                                 tuple(left_data), tuple(right_data))


def _apply_normal_powers(op: Sequence[complex], lam: complex, endpoint: int) -> complex:
    """Value of sum_t c_t N^t on exp(lambda x) at the endpoint (0 or 1)."""
    normal = -lam if endpoint == 0 else lam
    base = 1.0 if endpoint == 0 else np.exp(lam)
    return sum(c * normal**t for t, c in enumerate(op)) * base


@dataclass
class IntervalSolution:
    problem: Interval1DProblem
    roots: np.ndarray
    coeffs: np.ndarray
    condition: float
    max_boundary_residual: float

    def evaluate(self, x: np.ndarray, deriv: int = 0) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        for lam, c in zip(self.roots, self.coeffs):
            out += c * lam**deriv * np.exp(lam * x)
        return out


def solve_interval(problem: Interval1DProblem) -> IntervalSolution:
    """Solve in the exact exponential basis by boundary collocation.

    The ODE residual is identically zero by construction; only the 2s x 2s
    boundary system is solved numerically.  A singular collocation system
    (non-elliptic operator set) raises with the condition number.
    """
    s = problem.s
    roots = characteristic_roots(s)
    rows = []
    rhs = []
    for op, g in zip(problem.left_ops, problem.left_data):
        rows.append([_apply_normal_powers(op, lam, 0) for lam in roots])
        rhs.append(g)
    for op, g in zip(problem.right_ops, problem.right_data):
        rows.append([_apply_normal_powers(op, lam, 1) for lam in roots])
        rhs.append(g)
    mat = np.array(rows, dtype=complex)
    rhs = np.array(rhs, dtype=complex)
    cond = float(np.linalg.cond(mat))
    if not np.isfinite(cond) or cond > 1e12:
        raise ValueError(f"singular boundary collocation system (cond = {cond:.3e}); "
                         "the operator set is not elliptic")
    coeffs = np.linalg.solve(mat, rhs)
    resid = float(np.max(np.abs(mat @ coeffs - rhs)))
    return IntervalSolution(problem, roots, coeffs, cond, resid)


def _one_sided_row(x: np.ndarray, nodes: np.ndarray, x0: float, order: int) -> np.ndarray:
    w = fd_weights(x[nodes], x0, order)[order]
    return w


def solve_interval_fd(problem: Interval1DProblem, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Second-order finite-difference solve on n+1 uniform nodes.

    Interior rows discretize sum_j (-1)^j u^(2j) with central differences;
    boundary rows use one-sided stencils of order 2 (t+2 points for the t-th
    derivative).  Returns (grid, values).
    """
    s = problem.s
    if n < 6 * s:
        raise ValueError("grid too coarse for the boundary stencils")
    h = 1.0 / n
    x = np.linspace(0.0, 1.0, n + 1)
    rows, cols, vals = [], [], []
    rhs = np.zeros(n + 1, dtype=complex)
    row = 0

    # boundary rows, s per endpoint
    for endpoint, ops, data in ((0, problem.left_ops, problem.left_data),
                                (1, problem.right_ops, problem.right_data)):
        sign = -1.0 if endpoint == 0 else 1.0
        x0 = 0.0 if endpoint == 0 else 1.0
        for op, g in zip(ops, data):
            acc: dict[int, complex] = {}
            for t, c in enumerate(op):
                if c == 0:
                    continue
                if t == 0:
                    node = 0 if endpoint == 0 else n
                    acc[node] = acc.get(node, 0.0) + c
                    continue
                count = t + 2
                nodes = (np.arange(count) if endpoint == 0
                         else np.arange(n - count + 1, n + 1))
                w = _one_sided_row(x, nodes, x0, t) * (sign**t)
                for node, wv in zip(nodes, w):
                    acc[node] = acc.get(node, 0.0) + c * wv
            for node, wv in acc.items():
                rows.append(row)
                cols.append(int(node))
                vals.append(wv)
            rhs[row] = g
            row += 1

    # interior rows at nodes s..n-s
    stencils = []
    for j in range(problem.s + 1):
        st = np.zeros(2 * j + 1)
        for l in range(2 * j + 1):
            st[l] = (-1) ** l * math.comb(2 * j, l)
        stencils.append(st * (-1.0) ** j / h ** (2 * j))
    for i in range(s, n - s + 1):
        acc = {}
        for j, st in enumerate(stencils):
            for l, wv in enumerate(st):
                node = i + j - l
                acc[node] = acc.get(node, 0.0) + wv
        for node, wv in acc.items():
            rows.append(row)
            cols.append(int(node))
            vals.append(wv)
        row += 1

    mat = scipy.sparse.csr_matrix((vals, (rows, cols)), shape=(n + 1, n + 1))
    sol = scipy.sparse.linalg.spsolve(mat.tocsc(), rhs)
    return x, sol


def manufactured_interval_problem(s: int, rng: np.random.Generator,
                                  with_lower_order: bool = True
                                  ) -> tuple[Interval1DProblem, IntervalSolution]:
    """Random exponential-basis solution and the problem whose data it solves."""
    roots = characteristic_roots(s)
    coeffs = rng.standard_normal(2 * s) + 1j * rng.standard_normal(2 * s)
    lower = None
    if with_lower_order:
        lower = 0.5 * rng.standard_normal((2, s, 2 * s))
    shaped = Interval1DProblem.shaped(s, [0.0] * s, [0.0] * s, lower)

    # evaluate each operator on the manufactured solution
    left_data = []
    for op in shaped.left_ops:
        left_data.append(sum(c * _apply_normal_powers(op, lam, 0)
                             for lam, c in zip(roots, coeffs)))
    right_data = []
    for op in shaped.right_ops:
        right_data.append(sum(c * _apply_normal_powers(op, lam, 1)
                              for lam, c in zip(roots, coeffs)))
    problem = Interval1DProblem(s, shaped.left_ops, shaped.right_ops,
                                tuple(left_data), tuple(right_data))
    exact = IntervalSolution(problem, roots, coeffs, 0.0, 0.0)
    return problem, exact


# -- the adjoint-correction operator K on the disc (s = 1) ----------------------


def bessel_i_series(m: int, r: np.ndarray, terms: int = 60) -> np.ndarray:
    """Modified Bessel function I_m by its power series (exact oracle on [0,1])."""
    r = np.asarray(r, dtype=float)
    out = np.zeros_like(r)
    for k in range(terms):
        c = 1.0 / (math.factorial(k) * math.factorial(k + m))
        out += c * (r / 2.0) ** (2 * k + m)
    return out


def bessel_i_series_derivative(m: int, r: np.ndarray, terms: int = 60) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    out = np.zeros_like(r)
    for k in range(terms):
        p = 2 * k + m
        if p == 0:
            continue
        c = p / (math.factorial(k) * math.factorial(k + m)) / 2.0
        out += c * (r / 2.0) ** (p - 1)
    return out


@dataclass
class DiscKOperator:
    """The s = 1 adjoint-correction operator on the unit disc.

    Solves omega - Lap(omega) = 0 with Neumann datum N(omega) = data per
    angular Fourier mode; unit-response radial profiles are cached per |m|.
    """

    geom: DiscGeometry
    mode_max: int | None = None
    _profiles: dict[int, np.ndarray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.mode_max is None:
            self.mode_max = self.geom.n_theta // 2

    # -- radial mode solves -----------------------------------------------------

    def _mode_matrix(self, m: int) -> tuple[np.ndarray, int, int]:
        r = self.geom.r
        n = len(r)
        ab = np.zeros((5, n))  # banded storage for (l, u) = (2, 2)

        def put(i: int, j: int, v: float) -> None:
            ab[2 + i - j, j] += v

        for i in range(1, n - 1):
            sel = np.array([i - 1, i, i + 1])
            w2 = fd_weights(r[sel], r[i], 2)[2]
            w1 = fd_weights(r[sel], r[i], 1)[1]
            for j, (a2, a1) in zip(sel, zip(w2, w1)):
                put(i, j, a2 + a1 / r[i])
            put(i, i, -(m * m) / (r[i] * r[i]) - 1.0)
        if m == 0:
            # Lap at the origin of a radial mode: 2 * omega'' - omega = 0
            sel = np.array([0, 1, 2])
            w2 = fd_weights(r[sel], 0.0, 2)[2]
            for j, a2 in zip(sel, w2):
                put(0, j, 2.0 * a2)
            put(0, 0, -1.0)
        else:
            put(0, 0, 1.0)
        sel = np.array([n - 3, n - 2, n - 1])
        w1 = fd_weights(r[sel], 1.0, 1)[1]
        for j, a1 in zip(sel, w1):
            put(n - 1, j, a1)
        return ab, 2, 2

    def unit_profile(self, m: int) -> np.ndarray:
        """Radial solution with Neumann datum 1 for angular wavenumber m."""
        m = abs(int(m))
        if m > self.mode_max:
            raise ValueError(f"mode {m} beyond the truncation {self.mode_max}")
        prof = self._profiles.get(m)
        if prof is None:
            ab, l, u = self._mode_matrix(m)
            rhs = np.zeros(self.geom.n_r)
            rhs[-1] = 1.0
            prof = scipy.linalg.solve_banded((l, u), ab, rhs)
            self._profiles[m] = prof
        return prof

    def solve_with_boundary_data(self, data: np.ndarray) -> SampledField:
        """Recombine per-mode solves for Neumann data given on the circle."""
        geom = self.geom
        data = np.asarray(data, dtype=complex)
        if data.shape != (geom.n_theta,):
            raise ValueError("data must be sampled on the angular grid")
        hat = np.fft.fft(data) / geom.n_theta
        wavenumbers = geom.theta_wavenumbers().astype(int)
        spectrum = np.zeros((geom.n_r, geom.n_theta), dtype=complex)
        for idx, m in enumerate(wavenumbers):
            if abs(m) > self.mode_max or hat[idx] == 0:
                continue
            spectrum[:, idx] = hat[idx] * self.unit_profile(m) * geom.n_theta
        values = np.fft.ifft(spectrum, axis=1)
        return SampledField(geom, values)

    # -- boundary data of the order-2 operator ----------------------------------

    def boundary_data(self, psi: SampledField) -> np.ndarray:
        """P2(psi) on the circle for a sampled (0,1)-form component psi.

        The zeroth-order part is the contraction psi .| dbar(rho) itself; the
        first-order parts apply the circle adjoints Y_j^* = -d/dtheta (c_j .)
        to D_j(psi_1) * drho/dz, with D_j split into tangential and normal
        pieces on the boundary.
        """
        geom = self.geom
        theta = geom.theta
        rho_z = geom.rho_z_phase  # exp(-i theta) / 2, r-independent
        psi_b = psi.boundary_values()
        data = psi_b * rho_z

        dpsi_dtheta = psi.theta_derivative().boundary_values()
        dpsi_dr = normal_derivative(psi, 1)
        c = (-np.sin(theta), np.cos(theta))
        nu = (np.cos(theta), np.sin(theta))
        k = geom.theta_wavenumbers()
        nyq = geom.n_theta // 2
        for j in (0, 1):
            d_j_psi = c[j] * dpsi_dtheta + nu[j] * dpsi_dr
            t_j = d_j_psi * rho_z
            # Y_j^* t = -d/dtheta (c_j t), spectrally
            prod = c[j] * t_j
            mult = 1j * k
            mult[nyq] = 0.0
            data -= np.fft.ifft(np.fft.fft(prod) * mult)
        return data

    def apply(self, psi: SampledField | CPolynomial) -> SampledField:
        """K psi for s = 1: assemble boundary data, then the Neumann solve."""
        if isinstance(psi, CPolynomial):
            psi = SampledField.from_polynomial(self.geom, psi)
        return self.solve_with_boundary_data(self.boundary_data(psi))


def derive_boundary_data_s1(psi: SampledField, geom: DiscGeometry | None = None
                            ) -> np.ndarray:
    """Order-2 boundary data of the adjoint correction for s = 1."""
    return DiscKOperator(geom or psi.geom).boundary_data(psi)


def apply_K_s1(psi: SampledField | CPolynomial,
               geom: DiscGeometry | None = None,
               mode_max: int | None = None) -> SampledField:
    """One-shot K psi for s = 1; build a DiscKOperator directly to reuse the
    per-mode factorizations across calls."""
    if geom is None:
        if isinstance(psi, CPolynomial):
            raise ValueError("polynomial input needs an explicit geometry")
        geom = psi.geom
    return DiscKOperator(geom, mode_max=mode_max).apply(psi)


def dbar_component_sampled(u: SampledField) -> SampledField:
    """du/dzbar = (exp(i theta)/2) (d/dr + (i/r) d/dtheta) u, numerically."""
    geom = u.geom
    ur = u.radial_derivative().values
    ut = u.theta_derivative().values
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = 0.5 * np.exp(1j * geom.theta)[None, :] * (ur + 1j * ut / geom.r[:, None])
    vals[geom.r == 0.0, :] = 0.0
    return SampledField(geom, vals)


def apply_Gs_s1(op: DiscKOperator, u: SampledField | CPolynomial) -> SampledField:
    """G_1 u = K(dbar u) on functions; dbar u is exact for polynomials.

    The result depends only on the boundary traces of u and dbar(u): interior
    perturbations never reach the boundary stencils that feed the data.
    """
    if isinstance(u, CPolynomial):
        psi = SampledField.from_polynomial(op.geom, u.diff_zbar(1))
    else:
        psi = dbar_component_sampled(u)
    return op.apply(psi)
