"""Exact calculus of (0,q)-forms with polynomial coefficients on C^n.

Coefficients are polynomials in z_1..z_n and their conjugates with exact
complex-rational coefficients, stored sparsely:

    CPolynomial.terms : {(a, b): CRational}

where a and b are exponent tuples for the holomorphic and anti-holomorphic
variables.  A (0,q)-form maps strictly increasing index tuples J (entries in
1..n, length q) to such polynomials:

    FormPoly.comps : {J: CPolynomial}

Real-coordinate derivatives are defined through the Wirtinger operators:
with z_j = x_j + i*x_{j+n},

    D_j     = d/dz_j + d/dzbar_j          (j <= n)
    D_{j+n} = i * (d/dz_j - d/dzbar_j).

All operators here (dbar, its formal adjoint theta, contraction against a
(0,1)-form, wedge with a (0,1)-form, and the Laplacian box = dbar theta +
theta dbar) are exact, so identities like dbar(dbar(phi)) == 0 hold bit for
bit and are tested that way.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

Exponents = tuple[int, ...]
BiExponent = tuple[Exponents, Exponents]
IncreasingIndex = tuple[int, ...]


@dataclass(frozen=True)
class CRational:
    """Complex number with exact rational real and imaginary parts."""

    re: Fraction
    im: Fraction

    @staticmethod
    def of(re: Fraction | int | str = 0, im: Fraction | int | str = 0) -> "CRational":
        return CRational(Fraction(re), Fraction(im))

    def __add__(self, other: "CRational") -> "CRational":
        return CRational(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "CRational") -> "CRational":
        return CRational(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "CRational":
        return CRational(-self.re, -self.im)

    def __mul__(self, other: "CRational") -> "CRational":
        return CRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __truediv__(self, other: "CRational") -> "CRational":
        d = other.re * other.re + other.im * other.im
        if d == 0:
            raise ZeroDivisionError("division by zero CRational")
        return CRational(
            (self.re * other.re + self.im * other.im) / d,
            (self.im * other.re - self.re * other.im) / d,
        )

    def scale(self, c: Fraction | int) -> "CRational":
        c = Fraction(c)
        return CRational(self.re * c, self.im * c)

    def conjugate(self) -> "CRational":
        return CRational(self.re, -self.im)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def to_complex(self) -> complex:
        return complex(self.re) + 1j * complex(self.im)


QC_ZERO = CRational.of(0)
QC_ONE = CRational.of(1)
QC_I = CRational.of(0, 1)


def _zero_exp(n: int) -> Exponents:
    return (0,) * n


def _bump(e: Exponents, k: int, delta: int) -> Exponents:
    out = list(e)
    out[k] += delta
    return tuple(out)


@dataclass(frozen=True)
class CPolynomial:
    """Sparse polynomial in z_1..z_n, zbar_1..zbar_n over CRational.

    Zero coefficients are never stored; the canonical zero polynomial has an
    empty term map.  Instances are immutable by convention: operations return
    new polynomials.
    """

    n: int
    terms: Mapping[BiExponent, CRational]

    def __post_init__(self) -> None:
        for (a, b), c in self.terms.items():
            if len(a) != self.n or len(b) != self.n:
                raise ValueError(f"exponent tuples must have length n={self.n}")
            if any(e < 0 for e in a + b):
                raise ValueError("negative exponent")
            if c.is_zero():
                raise ValueError("zero coefficient stored")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(n: int) -> "CPolynomial":
        return CPolynomial(n, {})

    @staticmethod
    def const(n: int, c: CRational | Fraction | int) -> "CPolynomial":
        if not isinstance(c, CRational):
            c = CRational.of(c)
        if c.is_zero():
            return CPolynomial.zero(n)
        return CPolynomial(n, {(_zero_exp(n), _zero_exp(n)): c})

    @staticmethod
    def z(n: int, k: int) -> "CPolynomial":
        """The coordinate z_k (1-based)."""
        return CPolynomial(n, {(_bump(_zero_exp(n), k - 1, 1), _zero_exp(n)): QC_ONE})

    @staticmethod
    def zbar(n: int, k: int) -> "CPolynomial":
        return CPolynomial(n, {(_zero_exp(n), _bump(_zero_exp(n), k - 1, 1)): QC_ONE})

    @staticmethod
    def monomial(n: int, a: Sequence[int], b: Sequence[int],
                 c: CRational | Fraction | int = 1) -> "CPolynomial":
        if not isinstance(c, CRational):
            c = CRational.of(c)
        if c.is_zero():
            return CPolynomial.zero(n)
        return CPolynomial(n, {(tuple(a), tuple(b)): c})

    # -- ring operations ---------------------------------------------------

    def __add__(self, other: "CPolynomial") -> "CPolynomial":
        out = dict(self.terms)
        for key, c in other.terms.items():
            s = out.get(key, QC_ZERO) + c
            if s.is_zero():
                out.pop(key, None)
            else:
                out[key] = s
        return CPolynomial(self.n, out)

    def __sub__(self, other: "CPolynomial") -> "CPolynomial":
        return self + (-other)

    def __neg__(self) -> "CPolynomial":
        return CPolynomial(self.n, {k: -c for k, c in self.terms.items()})

    def __mul__(self, other: "CPolynomial") -> "CPolynomial":
        out: dict[BiExponent, CRational] = {}
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                key = (tuple(x + y for x, y in zip(a1, a2)),
                       tuple(x + y for x, y in zip(b1, b2)))
                s = out.get(key, QC_ZERO) + c1 * c2
                if s.is_zero():
                    out.pop(key, None)
                else:
                    out[key] = s
        return CPolynomial(self.n, out)

    def scale(self, c: CRational | Fraction | int) -> "CPolynomial":
        if not isinstance(c, CRational):
            c = CRational.of(c)
        if c.is_zero():
            return CPolynomial.zero(self.n)
        return CPolynomial(self.n, {k: v * c for k, v in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Total degree in all variables; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(a) + sum(b) for a, b in self.terms)

    # -- derivatives and conjugation ----------------------------------------

    def diff_z(self, k: int) -> "CPolynomial":
        """d/dz_k (1-based)."""
        out: dict[BiExponent, CRational] = {}
        for (a, b), c in self.terms.items():
            e = a[k - 1]
            if e:
                out[(_bump(a, k - 1, -1), b)] = c.scale(e)
        return CPolynomial(self.n, out)

    def diff_zbar(self, k: int) -> "CPolynomial":
        out: dict[BiExponent, CRational] = {}
        for (a, b), c in self.terms.items():
            e = b[k - 1]
            if e:
                out[(a, _bump(b, k - 1, -1))] = c.scale(e)
        return CPolynomial(self.n, out)

    def diff_real(self, j: int) -> "CPolynomial":
        """D_j over the 2n real coordinates, via the Wirtinger operators."""
        if not 1 <= j <= 2 * self.n:
            raise ValueError(f"real coordinate index {j} out of range 1..{2 * self.n}")
        if j <= self.n:
            return self.diff_z(j) + self.diff_zbar(j)
        k = j - self.n
        return (self.diff_z(k) - self.diff_zbar(k)).scale(QC_I)

    def diff_multi(self, alpha: Sequence[int]) -> "CPolynomial":
        """D^alpha for a multi-index over the 2n real coordinates."""
        out = self
        for j, e in enumerate(alpha, start=1):
            for _ in range(e):
                out = out.diff_real(j)
        return out

    def conjugate(self) -> "CPolynomial":
        """Complex conjugate: swaps z and zbar exponents, conjugates coefficients."""
        return CPolynomial(self.n, {(b, a): c.conjugate() for (a, b), c in self.terms.items()})

    # -- evaluation ----------------------------------------------------------

    def eval(self, zs: np.ndarray) -> np.ndarray:
        """Evaluate at complex points; zs has shape (n, ...) or (...) when n == 1."""
        zs = np.asarray(zs, dtype=complex)
        if self.n == 1 and zs.ndim >= 0 and (zs.ndim == 0 or zs.shape[0] != 1):
            zs = zs[None, ...]
        if zs.shape[0] != self.n:
            raise ValueError(f"expected leading axis of length n={self.n}")
        out = np.zeros(zs.shape[1:], dtype=complex)
        conj = np.conj(zs)
        for (a, b), c in self.terms.items():
            term = np.full(zs.shape[1:], c.to_complex())
            for k in range(self.n):
                if a[k]:
                    term = term * zs[k] ** a[k]
                if b[k]:
                    term = term * conj[k] ** b[k]
            out += term
        return out


def epsilon(k: int, J: IncreasingIndex, K: IncreasingIndex) -> int:
    """Sign of the permutation sorting (k, J_1, .., J_q) into K; 0 if invalid."""
    if len(K) != len(J) + 1:
        raise ValueError("need |K| = |J| + 1")
    if k in J:
        return 0
    merged = tuple(sorted((k,) + tuple(J)))
    if merged != tuple(K):
        return 0
    inversions = sum(1 for j in J if j < k)
    return -1 if inversions % 2 else 1


def _validate_index(J: IncreasingIndex, n: int) -> None:
    if any(not 1 <= j <= n for j in J):
        raise ValueError(f"index entries must lie in 1..{n}: {J}")
    if any(J[i] >= J[i + 1] for i in range(len(J) - 1)):
        raise ValueError(f"index must be strictly increasing: {J}")


@dataclass(frozen=True)
class FormPoly:
    """A (0,q)-form with CPolynomial components over increasing indices.

    q may exceed n, in which case no component keys exist and the form is
    necessarily zero (this keeps dbar total at top degree).
    """

    n: int
    q: int
    comps: Mapping[IncreasingIndex, CPolynomial]

    def __post_init__(self) -> None:
        for J, p in self.comps.items():
            if len(J) != self.q:
                raise ValueError(f"component index {J} has length != q={self.q}")
            _validate_index(J, self.n)
            if p.n != self.n:
                raise ValueError("component polynomial has wrong variable count")
            if p.is_zero():
                raise ValueError("zero component stored")

    @staticmethod
    def zero(n: int, q: int) -> "FormPoly":
        return FormPoly(n, q, {})

    @staticmethod
    def from_components(n: int, q: int,
                        comps: Mapping[IncreasingIndex, CPolynomial]) -> "FormPoly":
        return FormPoly(n, q, {J: p for J, p in comps.items() if not p.is_zero()})

    def component(self, J: IncreasingIndex) -> CPolynomial:
        return self.comps.get(tuple(J), CPolynomial.zero(self.n))

    def is_zero(self) -> bool:
        return not self.comps

    def __add__(self, other: "FormPoly") -> "FormPoly":
        if (self.n, self.q) != (other.n, other.q):
            raise ValueError("degree/dimension mismatch")
        out = dict(self.comps)
        for J, p in other.comps.items():
            s = out.get(J, CPolynomial.zero(self.n)) + p
            if s.is_zero():
                out.pop(J, None)
            else:
                out[J] = s
        return FormPoly(self.n, self.q, out)

    def __sub__(self, other: "FormPoly") -> "FormPoly":
        return self + other.scale(-1)

    def scale(self, c: CRational | Fraction | int) -> "FormPoly":
        if not isinstance(c, CRational):
            c = CRational.of(c)
        if c.is_zero():
            return FormPoly.zero(self.n, self.q)
        return FormPoly(self.n, self.q, {J: p.scale(c) for J, p in self.comps.items()})


def _accumulate(target: dict[IncreasingIndex, CPolynomial], J: IncreasingIndex,
                p: CPolynomial) -> None:
    if p.is_zero():
        return
    s = target.get(J)
    s = p if s is None else s + p
    if s.is_zero():
        target.pop(J, None)
    else:
        target[J] = s


def dbar(phi: FormPoly) -> FormPoly:
    """The Cauchy-Riemann operator: raises anti-holomorphic degree by one."""
    n = phi.n
    out: dict[IncreasingIndex, CPolynomial] = {}
    for J, p in phi.comps.items():
        for k in range(1, n + 1):
            if k in J:
                continue
            K = tuple(sorted((k,) + J))
            sign = epsilon(k, J, K)
            d = p.diff_zbar(k)
            _accumulate(out, K, d if sign == 1 else -d)
    return FormPoly(n, phi.q + 1, out)


def theta(psi: FormPoly) -> FormPoly:
    """Formal adjoint of dbar: lowers degree by one.

    theta(psi)_I = - sum over i, J of epsilon(i, I -> J) d(psi_J)/dz_i.
    """
    if psi.q < 1:
        raise ValueError("theta needs a form of degree >= 1")
    n = psi.n
    out: dict[IncreasingIndex, CPolynomial] = {}
    for J, p in psi.comps.items():
        for pos, i in enumerate(J):
            I = J[:pos] + J[pos + 1:]
            sign = -1 if pos % 2 else 1  # epsilon(i, I -> J)
            d = p.diff_z(i)
            _accumulate(out, I, -d if sign == 1 else d)
    return FormPoly(n, psi.q - 1, out)


def contract(psi: FormPoly, omega: FormPoly) -> FormPoly:
    """Contraction psi .| omega against a (0,1)-form omega.

    (psi .| omega)_I = sum over k, K of epsilon(k, I -> K) psi_K conj(omega_k);
    for polynomial omega the conjugate swaps z and zbar exponents.
    """
    if omega.q != 1:
        raise ValueError("contraction requires a (0,1)-form on the right")
    if psi.q < 1:
        raise ValueError("contraction requires degree >= 1 on the left")
    n = psi.n
    omega_conj = {J[0]: p.conjugate() for J, p in omega.comps.items()}
    out: dict[IncreasingIndex, CPolynomial] = {}
    for K, p in psi.comps.items():
        for pos, k in enumerate(K):
            wk = omega_conj.get(k)
            if wk is None:
                continue
            I = K[:pos] + K[pos + 1:]
            sign = -1 if pos % 2 else 1
            term = p * wk
            _accumulate(out, I, term if sign == 1 else -term)
    return FormPoly(n, psi.q - 1, out)


def wedge_d1(phi: FormPoly, omega: FormPoly) -> FormPoly:
    """Exterior multiplication by a (0,1)-form.

    Components are sum over k, J of epsilon(k, J -> K) omega_k phi_J, the
    convention that makes contraction and wedge anticommute to |omega|^2.
    """
    if omega.q != 1:
        raise ValueError("wedge_d1 requires a (0,1)-form")
    if phi.q >= phi.n:
        raise ValueError("wedge at top degree")
    n = phi.n
    out: dict[IncreasingIndex, CPolynomial] = {}
    for J, p in phi.comps.items():
        for (k,), wk in omega.comps.items():
            if k in J:
                continue
            K = tuple(sorted((k,) + J))
            sign = epsilon(k, J, K)
            term = wk * p
            _accumulate(out, K, term if sign == 1 else -term)
    return FormPoly(n, phi.q + 1, out)


def box(phi: FormPoly) -> FormPoly:
    """Complex Laplacian dbar theta + theta dbar.

    theta on degree 0 and dbar past top degree contribute zero, so box is
    total in every degree.
    """
    n, q = phi.n, phi.q
    part1 = dbar(theta(phi)) if q >= 1 else FormPoly.zero(n, q)
    part2 = theta(dbar(phi))
    return part1 + part2


def laplacian(p: CPolynomial) -> CPolynomial:
    """Real Laplacian sum_j D_j^2 over the 2n real coordinates."""
    out = CPolynomial.zero(p.n)
    for j in range(1, 2 * p.n + 1):
        out = out + p.diff_real(j).diff_real(j)
    return out


# -- random instances (shared by property tests and the verification CLI) ----

def random_cpolynomial(rng: np.random.Generator, n: int, max_deg: int,
                       terms: int = 4, denom: int = 4) -> CPolynomial:
    """Random sparse polynomial with small rational coefficients."""
    out = CPolynomial.zero(n)
    for _ in range(terms):
        a = tuple(int(rng.integers(0, max_deg + 1)) for _ in range(n))
        b = tuple(int(rng.integers(0, max_deg + 1)) for _ in range(n))
        c = CRational.of(
            Fraction(int(rng.integers(-6, 7)), int(rng.integers(1, denom + 1))),
            Fraction(int(rng.integers(-6, 7)), int(rng.integers(1, denom + 1))),
        )
        out = out + CPolynomial.monomial(n, a, b, c)
    return out


def random_form(rng: np.random.Generator, n: int, q: int, max_deg: int,
                terms: int = 3) -> FormPoly:
    """Random (0,q)-form with a polynomial in every increasing index slot."""
    from itertools import combinations

    comps: dict[IncreasingIndex, CPolynomial] = {}
    for J in combinations(range(1, n + 1), q):
        p = random_cpolynomial(rng, n, max_deg, terms=terms)
        if not p.is_zero():
            comps[J] = p
    return FormPoly(n, q, comps)


# -- plain-text serialization -------------------------------------------------
#
# Format (whitespace-insensitive s-expressions):
#
#   (form (n 2) (q 1)
#     (comp (1)
#       (term -1/2 0 (z 1 0) (zbar 0 2))))
#
# Each term carries the real part, imaginary part, then the z and zbar
# exponent lists.  Rationals print as Fraction strings ("-1/2", "3").

def form_to_text(phi: FormPoly) -> str:
    lines = [f"(form (n {phi.n}) (q {phi.q})"]
    for J in sorted(phi.comps):
        p = phi.comps[J]
        idx = " ".join(str(j) for j in J)
        lines.append(f"  (comp ({idx})")
        for (a, b) in sorted(p.terms):
            c = p.terms[(a, b)]
            za = " ".join(str(e) for e in a)
            zb = " ".join(str(e) for e in b)
            lines.append(f"    (term {c.re} {c.im} (z {za}) (zbar {zb}))")
        lines.append("  )")
    lines.append(")")
    return "\n".join(lines)


def _tokenize(text: str) -> list[str]:
    return text.replace("(", " ( ").replace(")", " ) ").split()


def _parse_sexp(tokens: list[str], pos: int) -> tuple[object, int]:
    if tokens[pos] != "(":
        return tokens[pos], pos + 1
    out: list[object] = []
    pos += 1
    while tokens[pos] != ")":
        node, pos = _parse_sexp(tokens, pos)
        out.append(node)
    return out, pos + 1


def form_from_text(text: str) -> FormPoly:
    tokens = _tokenize(text)
    tree, end = _parse_sexp(tokens, 0)
    if end != len(tokens):
        raise ValueError("trailing tokens after form expression")
    if not (isinstance(tree, list) and tree and tree[0] == "form"):
        raise ValueError("expected a (form ...) expression")
    n = q = None
    comps: dict[IncreasingIndex, CPolynomial] = {}
    for node in tree[1:]:
        if not isinstance(node, list) or not node:
            raise ValueError(f"unexpected node {node!r}")
        if node[0] == "n":
            n = int(node[1])
        elif node[0] == "q":
            q = int(node[1])
        elif node[0] == "comp":
            if n is None or q is None:
                raise ValueError("(n ..) and (q ..) must precede components")
            J = tuple(int(tok) for tok in node[1])
            terms: dict[BiExponent, CRational] = {}
            for term in node[2:]:
                if term[0] != "term":
                    raise ValueError(f"expected (term ...), got {term!r}")
                re_part, im_part = Fraction(term[1]), Fraction(term[2])
                zs = term[3]
                zbs = term[4]
                if zs[0] != "z" or zbs[0] != "zbar":
                    raise ValueError("term needs (z ...) and (zbar ...) exponent lists")
                a = tuple(int(tok) for tok in zs[1:])
                b = tuple(int(tok) for tok in zbs[1:])
                c = CRational(re_part, im_part)
                if not c.is_zero():
                    terms[(a, b)] = terms.get((a, b), QC_ZERO) + c
            poly = CPolynomial(n, {k: v for k, v in terms.items() if not v.is_zero()})
            if not poly.is_zero():
                comps[J] = poly
        else:
            raise ValueError(f"unknown node {node[0]!r}")
    if n is None or q is None:
        raise ValueError("form is missing (n ..) or (q ..)")
    return FormPoly(n, q, comps)
