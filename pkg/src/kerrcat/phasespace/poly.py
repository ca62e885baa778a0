"""Exact polynomial calculus on phase space: star product, Moyal bracket,
McCoy quantization and the invertible Wigner transform of operators.

Polynomials carry a basis tag: ``"a"`` for the complex coordinates (a, a*)
and ``"xp"`` for the quadratures, with [x, p] = i*lambda.  All structure
constants are exact (see :mod:`.coeff`), so the identities tested downstream
hold with zero tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .coeff import Coeff

__all__ = [
    "PhaseSpacePolynomial", "NormalOrderedOperatorPoly",
    "LindbladPhaseSpaceReport",
    "a_var", "astar_var", "x_var", "p_var",
    "star_product", "star_term", "star_commutator", "moyal_bracket",
    "poisson_bracket", "mccoy_quantize", "mccoy_x_ordered_symbol",
    "wigner_transform_operator", "convert_basis",
    "effective_hamiltonian_surface", "kerr_lamb_shift_check",
    "lindblad_phase_space_identity",
]

_ONE_HALF = Fraction(1, 2)


def _binom(n, k):
    return math.comb(n, k)


class PhaseSpacePolynomial:
    """Finite polynomial in two conjugate variables with exact coefficients.

    ``terms`` maps the exponent pair (j, k) to a :class:`Coeff`, where the
    monomial is a^j (a*)^k in the ``"a"`` basis and x^j p^k in ``"xp"``.
    """

    __slots__ = ("basis", "lam", "terms")

    def __init__(self, basis: str, terms: dict | None = None, lam=1):
        if basis not in ("a", "xp"):
            raise ValueError(f"unknown basis tag {basis!r}")
        self.basis = basis
        self.lam = Fraction(lam)
        if self.lam <= 0:
            raise ValueError("lambda must be positive")
        self.terms = {}
        if terms:
            for key, c in terms.items():
                if not c.is_zero():
                    self.terms[key] = c

    # -- construction helpers -------------------------------------------------

    @classmethod
    def monomial(cls, basis: str, j: int, k: int, coeff=1, lam=1) -> "PhaseSpacePolynomial":
        c = coeff if isinstance(coeff, Coeff) else Coeff.of(coeff)
        return cls(basis, {(j, k): c}, lam)

    @classmethod
    def zero(cls, basis: str, lam=1) -> "PhaseSpacePolynomial":
        return cls(basis, {}, lam)

    # -- ring operations ------------------------------------------------------

    def _check(self, other: "PhaseSpacePolynomial"):
        if self.basis != other.basis or self.lam != other.lam:
            raise ValueError("basis/lambda mismatch between polynomials")

    def __add__(self, other):
        self._check(other)
        terms = dict(self.terms)
        for key, c in other.terms.items():
            terms[key] = terms.get(key, Coeff()) + c
        return PhaseSpacePolynomial(self.basis, terms, self.lam)

    def __sub__(self, other):
        return self + other.scale(-1)

    def __mul__(self, other):
        """Commutative pointwise product."""
        self._check(other)
        two_lam = 2 * self.lam
        terms = {}
        for (j1, k1), c1 in self.terms.items():
            for (j2, k2), c2 in other.terms.items():
                key = (j1 + j2, k1 + k2)
                prod = c1.mul(c2, two_lam)
                terms[key] = terms.get(key, Coeff()) + prod
        return PhaseSpacePolynomial(self.basis, terms, self.lam)

    def scale(self, re, im=0):
        return PhaseSpacePolynomial(
            self.basis, {k: c.scale(re, im) for k, c in self.terms.items()}, self.lam)

    def scale_coeff(self, c: Coeff):
        two_lam = 2 * self.lam
        return PhaseSpacePolynomial(
            self.basis, {k: v.mul(c, two_lam) for k, v in self.terms.items()}, self.lam)

    def deriv(self, var: int, order: int = 1):
        """Partial derivative: var = 0 for a (or x), 1 for a* (or p)."""
        poly = self
        for _ in range(order):
            terms = {}
            for (j, k), c in poly.terms.items():
                if var == 0 and j > 0:
                    terms[(j - 1, k)] = terms.get((j - 1, k), Coeff()) + c.scale(j)
                elif var == 1 and k > 0:
                    terms[(j, k - 1)] = terms.get((j, k - 1), Coeff()) + c.scale(k)
            poly = PhaseSpacePolynomial(self.basis, terms, self.lam)
        return poly

    def degree(self) -> int:
        return max((j + k for (j, k) in self.terms), default=-1)

    def without_constant(self):
        terms = {k: c for k, c in self.terms.items() if k != (0, 0)}
        return PhaseSpacePolynomial(self.basis, terms, self.lam)

    def coefficient(self, j: int, k: int) -> Coeff:
        return self.terms.get((j, k), Coeff())

    def __eq__(self, other):
        if not isinstance(other, PhaseSpacePolynomial):
            return NotImplemented
        return (self.basis == other.basis and self.lam == other.lam
                and self.terms == other.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def evaluate(self, u: complex, v: complex) -> complex:
        """Numerical value at (a, a*) = (u, v) or (x, p) = (u, v)."""
        lamf = float(self.lam)
        return sum(c.to_complex(lamf) * u**j * v**k for (j, k), c in self.terms.items())

    def __repr__(self):
        names = ("a", "a*") if self.basis == "a" else ("x", "p")
        bits = []
        for (j, k) in sorted(self.terms):
            c = self.terms[(j, k)]
            lamf = float(self.lam)
            bits.append(f"({c.to_complex(lamf):.6g})*{names[0]}^{j}*{names[1]}^{k}")
        return " + ".join(bits) if bits else "0"


def a_var(lam=1):
    return PhaseSpacePolynomial.monomial("a", 1, 0, 1, lam)


def astar_var(lam=1):
    return PhaseSpacePolynomial.monomial("a", 0, 1, 1, lam)


def x_var(lam=1):
    return PhaseSpacePolynomial.monomial("xp", 1, 0, 1, lam)


def p_var(lam=1):
    return PhaseSpacePolynomial.monomial("xp", 0, 1, 1, lam)


# -- star product -------------------------------------------------------------

def star_term(f: PhaseSpacePolynomial, g: PhaseSpacePolynomial, n: int) -> PhaseSpacePolynomial:
    """Order-n bidifferential term of the Groenewold star product.

    In the (a, a*) basis the order-n prefactor is (1/2)^n / n!; in (x, p) it
    is (i*lambda/2)^n / n!.  Even orders are symmetric under swapping the
    factors, which is why the Moyal bracket keeps only odd derivatives.
    """
    f._check(g)
    out = PhaseSpacePolynomial.zero(f.basis, f.lam)
    for k in range(n + 1):
        sign = -1 if k % 2 else 1
        c = Fraction(_binom(n, k) * sign, math.factorial(n))
        if f.basis == "a":
            # f exp((1/2)(<-d_a ->d_a* - <-d_a* ->d_a)) g
            df = f.deriv(0, n - k).deriv(1, k)
            dg = g.deriv(1, n - k).deriv(0, k)
            term = (df * dg).scale(c * _ONE_HALF**n)
        else:
            # f exp((i lam/2)(<-d_x ->d_p - <-d_p ->d_x)) g
            df = f.deriv(0, n - k).deriv(1, k)
            dg = g.deriv(1, n - k).deriv(0, k)
            pref = (f.lam * _ONE_HALF) ** n
            term = (df * dg).scale(c)
            # multiply by (i)^n * pref
            i_mod = n % 4
            re, im = {0: (pref, 0), 1: (0, pref), 2: (-pref, 0), 3: (0, -pref)}[i_mod]
            term = term.scale(re, im)
        out = out + term
    return out


def star_product(f: PhaseSpacePolynomial, g: PhaseSpacePolynomial) -> PhaseSpacePolynomial:
    """Associative Groenewold star product; exact finite series."""
    f._check(g)
    nmax = min(f.degree(), g.degree())
    out = PhaseSpacePolynomial.zero(f.basis, f.lam)
    for n in range(max(nmax, 0) + 1):
        out = out + star_term(f, g, n)
    return out


def star_commutator(f, g):
    """f * g - g * f (star commutator); {{a, a*}} = 1 in this normalisation."""
    return star_product(f, g) - star_product(g, f)


def moyal_bracket(f, g):
    """(f*g - g*f) / (i lambda): the bracket that generates Wigner dynamics
    and reduces exactly to the Poisson bracket when either argument is at
    most quadratic."""
    c = star_commutator(f, g)
    inv = Fraction(1) / c.lam
    return c.scale(0, -inv)   # 1/(i lam) = -i/lam


def poisson_bracket(f, g):
    """Classical bracket {f, g} = f_x g_p - f_p g_x (basis-aware)."""
    f._check(g)
    if f.basis == "xp":
        return f.deriv(0) * g.deriv(1) - f.deriv(1) * g.deriv(0)
    # in (a, a*): {f, g} = (f_a g_a* - f_a* g_a) / (i lam)
    raw = f.deriv(0) * g.deriv(1) - f.deriv(1) * g.deriv(0)
    inv = Fraction(1) / f.lam
    return raw.scale(0, -inv)


# -- basis conversion ---------------------------------------------------------

def convert_basis(poly: PhaseSpacePolynomial, to: str) -> PhaseSpacePolynomial:
    """Exact linear substitution a = (x + i p)/sqrt(2 lam) and its inverse.

    sqrt(2 lam) lives in the coefficient ring, so odd-degree monomials stay
    exact too.
    """
    if to == poly.basis:
        return poly
    lam = poly.lam
    two_lam = 2 * lam
    if to == "a":
        # x = (s/2)(a + a*), p = -i (s/2)(a - a*), s = sqrt(2 lam)
        half_s = Coeff.of(0, 0, _ONE_HALF, 0)
        first = (PhaseSpacePolynomial.monomial("a", 1, 0, 1, lam)
                 + PhaseSpacePolynomial.monomial("a", 0, 1, 1, lam)).scale_coeff(half_s)
        second = (PhaseSpacePolynomial.monomial("a", 1, 0, 1, lam)
                  - PhaseSpacePolynomial.monomial("a", 0, 1, 1, lam)).scale_coeff(
                      Coeff.of(0, 0, 0, -_ONE_HALF))
    else:
        # a = (x + i p) s / (2 lam), a* = (x - i p) s / (2 lam)
        inv = Coeff.of(0, 0, Fraction(1, 1) / two_lam, 0)
        first = (PhaseSpacePolynomial.monomial("xp", 1, 0, 1, lam)
                 + PhaseSpacePolynomial.monomial("xp", 0, 1, Coeff.of(0, 1), lam)
                 ).scale_coeff(inv)
        second = (PhaseSpacePolynomial.monomial("xp", 1, 0, 1, lam)
                  + PhaseSpacePolynomial.monomial("xp", 0, 1, Coeff.of(0, -1), lam)
                  ).scale_coeff(inv)
    out = PhaseSpacePolynomial.zero(to, lam)
    for (j, k), c in poly.terms.items():
        mono = PhaseSpacePolynomial.monomial(to, 0, 0, 1, lam).scale_coeff(c)
        for _ in range(j):
            mono = mono * first
        for _ in range(k):
            mono = mono * second
        out = out + mono
    return out


# -- operator polynomials and McCoy / Wigner maps -----------------------------

class NormalOrderedOperatorPoly:
    """Operator polynomial Sum c_{jk} (a^dag)^j a^k (normal order)."""

    __slots__ = ("terms", "lam")

    def __init__(self, terms: dict | None = None, lam=1):
        self.lam = Fraction(lam)
        self.terms = {}
        if terms:
            for key, c in terms.items():
                if not c.is_zero():
                    self.terms[key] = c

    def coefficient(self, j: int, k: int) -> Coeff:
        return self.terms.get((j, k), Coeff())

    def is_hermitian(self) -> bool:
        return all(self.coefficient(k, j) == c.conj() for (j, k), c in self.terms.items())

    def __eq__(self, other):
        if not isinstance(other, NormalOrderedOperatorPoly):
            return NotImplemented
        return self.lam == other.lam and self.terms == other.terms

    def to_matrix(self, dim: int):
        """Dense Fock-basis matrix (for cross checks against kerrcat.fock)."""
        import numpy as np
        from ..fock import annihilation
        a = annihilation(dim).astype(complex)
        ad = a.T.conj()
        lamf = float(self.lam)
        out = np.zeros((dim, dim), dtype=complex)
        for (j, k), c in self.terms.items():
            out += c.to_complex(lamf) * (
                np.linalg.matrix_power(ad, j) @ np.linalg.matrix_power(a, k))
        return out

    def __repr__(self):
        lamf = float(self.lam)
        bits = [f"({c.to_complex(lamf):.6g})*ad^{j}*a^{k}"
                for (j, k), c in sorted(self.terms.items())]
        return " + ".join(bits) if bits else "0"


def _apply_exp_mixed_deriv(poly: PhaseSpacePolynomial, sign: int) -> PhaseSpacePolynomial:
    """exp(sign * (1/2) d_a d_a*) on an (a, a*) polynomial; finite sum."""
    if poly.basis != "a":
        raise ValueError("mixed-derivative prefactor acts on the (a, a*) basis")
    out = PhaseSpacePolynomial.zero("a", poly.lam)
    for (j, k), c in poly.terms.items():
        for r in range(min(j, k) + 1):
            num = (math.factorial(j) // math.factorial(j - r)) * \
                  (math.factorial(k) // math.factorial(k - r))
            q = Fraction(sign**r * num, 2**r * math.factorial(r))
            key = (j - r, k - r)
            add = c.scale(q)
            cur = out.terms.get(key, Coeff()) + add
            if cur.is_zero():
                out.terms.pop(key, None)
            else:
                out.terms[key] = cur
    return out


def mccoy_quantize(f: PhaseSpacePolynomial) -> NormalOrderedOperatorPoly:
    """Normal-ordered operator of a Wigner-symbol polynomial.

    Applies exp(+(1/2) d_a d_a*) and reads the result with a* to the left,
    i.e. the coefficient of a^j (a*)^k becomes that of (a^dag)^k a^j.
    """
    g = _apply_exp_mixed_deriv(f if f.basis == "a" else convert_basis(f, "a"), +1)
    return NormalOrderedOperatorPoly(
        {(k, j): c for (j, k), c in g.terms.items()}, g.lam)


def mccoy_x_ordered_symbol(f: PhaseSpacePolynomial) -> PhaseSpacePolynomial:
    """Quadrature McCoy prefactor exp(-(i lam / 2) d_x d_p); the result read
    with x to the left gives the x-ordered operator."""
    if f.basis != "xp":
        raise ValueError("x-ordered McCoy acts on the (x, p) basis")
    out = PhaseSpacePolynomial.zero("xp", f.lam)
    for (j, k), c in f.terms.items():
        for r in range(min(j, k) + 1):
            num = (math.factorial(j) // math.factorial(j - r)) * \
                  (math.factorial(k) // math.factorial(k - r))
            mag = Fraction(num, 2**r * math.factorial(r)) * f.lam**r
            i_mod = (-r) % 4    # (-i)^r = i^((-r) mod 4)
            re, im = {0: (mag, 0), 1: (0, mag), 2: (-mag, 0), 3: (0, -mag)}[i_mod]
            key = (j - r, k - r)
            cur = out.terms.get(key, Coeff()) + c.scale(re, im)
            if cur.is_zero():
                out.terms.pop(key, None)
            else:
                out.terms[key] = cur
    return out


def wigner_transform_operator(op: NormalOrderedOperatorPoly) -> PhaseSpacePolynomial:
    """Wigner symbol of a normal-ordered operator; exact inverse of
    :func:`mccoy_quantize` (e.g. a^dag a -> a* a - 1/2)."""
    sym = PhaseSpacePolynomial(
        "a", {(k, j): c for (j, k), c in op.terms.items()}, op.lam)
    return _apply_exp_mixed_deriv(sym, -1)


# -- model-specific constructions ---------------------------------------------

def hamiltonian_operator_poly(delta, kerr, eps2, eps4=0, lam=1) -> NormalOrderedOperatorPoly:
    """Normal-ordered model Hamiltonian as an operator polynomial."""
    terms = {(1, 1): Coeff.of(delta), (2, 2): -Coeff.of(kerr),
             (2, 0): Coeff.of(eps2), (0, 2): Coeff.of(eps2)}
    if eps4:
        terms[(4, 0)] = Coeff.of(eps4)
        terms[(0, 4)] = Coeff.of(eps4)
    return NormalOrderedOperatorPoly(terms, lam)


def effective_hamiltonian_surface(delta, kerr, eps2, eps4=0, lam=1,
                                  classical: bool = False) -> PhaseSpacePolynomial:
    """Quantum metapotential: Wigner symbol of the model Hamiltonian in (x, p).

    With classical=True the star-product (Lamb shift) corrections are dropped,
    leaving the naive symbol delta (x^2+p^2)/(2 lam) - kerr ((x^2+p^2)/(2 lam))^2
    + eps2 (x^2 - p^2)/lam.
    """
    op = hamiltonian_operator_poly(delta, kerr, eps2, eps4, lam)
    if classical:
        sym = PhaseSpacePolynomial(
            "a", {(k, j): c for (j, k), c in op.terms.items()}, op.lam)
    else:
        sym = wigner_transform_operator(op)
    return convert_basis(sym, "xp")


def kerr_lamb_shift_check(delta, kerr, lam=1) -> NormalOrderedOperatorPoly:
    """Quantize H = delta a*a - kerr a*^2 a^2 (symbol); the oscillator
    frequency comes back renormalised by -2 kerr plus a scalar."""
    sym = (PhaseSpacePolynomial.monomial("a", 1, 1, Coeff.of(delta), lam)
           + PhaseSpacePolynomial.monomial("a", 2, 2, -Coeff.of(kerr), lam))
    return mccoy_quantize(sym)


# -- dissipator identities ----------------------------------------------------

@dataclass
class LindbladPhaseSpaceReport:
    """Symbolic verification that the Wigner transform of the thermal
    dissipator is drift + diffusion with the quoted coefficients."""

    n_th: Fraction
    verified: bool
    drift_coefficient: Fraction            # units of kappa, multiplies (d_x x + d_p p)
    diffusion_coefficient_a: Fraction      # units of kappa, multiplies d^2_{a a*}
    diffusion_coefficient_xp: Fraction     # units of kappa, multiplies (d_x^2 + d_p^2)
    moyal_even_orders_vanish: bool
    residual_terms: int

    def summary(self) -> str:
        ok = "verified" if self.verified else "FAILED"
        return (f"dissipator identity {ok}: drift kappa*{self.drift_coefficient}, "
                f"diffusion kappa*{self.diffusion_coefficient_a} d2/da da* "
                f"= kappa*{self.diffusion_coefficient_xp} (dx^2+dp^2), "
                f"n_th = {self.n_th}; Moyal even orders vanish: "
                f"{self.moyal_even_orders_vanish}")


def _random_poly(basis, lam, degree, rng) -> PhaseSpacePolynomial:
    terms = {}
    for j in range(degree + 1):
        for k in range(degree + 1 - j):
            num = rng.randrange(-6, 7)
            den = rng.randrange(1, 5)
            if num:
                terms[(j, k)] = Coeff.of(Fraction(num, den))
    return PhaseSpacePolynomial(basis, terms, lam)


def lindblad_phase_space_identity(n_th=Fraction(0), w: PhaseSpacePolynomial | None = None,
                                  seed: int = 7, lam=1) -> LindbladPhaseSpaceReport:
    """Check the phase-space form of the thermal photon dissipators.

    Expands a*W*a^*, (a^* a - 1/2)*W, W*(a^* a - 1/2) (and the gain
    counterparts) on a generic polynomial W and verifies, with exact
    coefficients, that the result equals

        (1/2)(d_a(a W) + d_a*(a* W)) + (1/2 + n_th) d^2_{a a*} W

    per unit kappa.  Also certifies that only odd star orders contribute to
    the Moyal bracket with the quartic model Hamiltonian.
    """
    import random
    n_th = Fraction(n_th)
    lam = Fraction(lam)
    if w is None:
        rng = random.Random(seed)
        w = _random_poly("a", lam, 5, rng)
    a = a_var(lam)
    ast = astar_var(lam)
    n_sym_loss = star_product(ast, a)          # a*a - 1/2
    n_sym_gain = star_product(a, ast)          # a*a + 1/2

    def dissipator(jump_left, jump_right, n_sym):
        return star_product(star_product(jump_left, w), jump_right) \
            - (star_product(n_sym, w) + star_product(w, n_sym)).scale(_ONE_HALF)

    lhs = dissipator(a, ast, n_sym_loss).scale(1 + n_th) \
        + dissipator(ast, a, n_sym_gain).scale(n_th)

    drift = (a * w).deriv(0) + (ast * w).deriv(1)
    rhs = drift.scale(_ONE_HALF) + w.deriv(0).deriv(1).scale(_ONE_HALF + n_th)
    diff = lhs - rhs

    h = convert_basis(
        effective_hamiltonian_surface(3, 1, Fraction(1, 2), lam=lam), "a")
    even_ok = all(
        (star_term(h, w, n) - star_term(w, h, n)).is_zero() for n in (0, 2, 4))

    return LindbladPhaseSpaceReport(
        n_th=n_th,
        verified=diff.is_zero(),
        drift_coefficient=_ONE_HALF,
        diffusion_coefficient_a=_ONE_HALF + n_th,
        diffusion_coefficient_xp=_ONE_HALF * (_ONE_HALF + n_th),
        moyal_even_orders_vanish=even_ok,
        residual_terms=len(diff.terms),
    )
