"""Exact coefficients for the phase-space polynomial algebra.

A coefficient is an element of Q(i)[s] / (s^2 - 2*lambda) with rational
lambda > 0, i.e. c = u + v*s where u, v are Gaussian rationals and
s = sqrt(2*lambda).  This ring is closed under the star product, the McCoy
prefactor and the linear substitution between the (a, a*) and (x, p) bases,
so every identity in the module tests exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

__all__ = ["Coeff", "ZERO", "ONE", "I"]

_F0 = Fraction(0)
_F1 = Fraction(1)


def _fr(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10**12)
    return Fraction(x)


@dataclass(frozen=True)
class Coeff:
    """c = (ur + i*ui) + (vr + i*vi) * sqrt(2*lambda), all parts rational."""

    ur: Fraction = _F0
    ui: Fraction = _F0
    vr: Fraction = _F0
    vi: Fraction = _F0

    @classmethod
    def of(cls, re=0, im=0, s_re=0, s_im=0) -> "Coeff":
        return cls(_fr(re), _fr(im), _fr(s_re), _fr(s_im))

    def is_zero(self) -> bool:
        return not (self.ur or self.ui or self.vr or self.vi)

    def __add__(self, o: "Coeff") -> "Coeff":
        return Coeff(self.ur + o.ur, self.ui + o.ui, self.vr + o.vr, self.vi + o.vi)

    def __sub__(self, o: "Coeff") -> "Coeff":
        return Coeff(self.ur - o.ur, self.ui - o.ui, self.vr - o.vr, self.vi - o.vi)

    def __neg__(self) -> "Coeff":
        return Coeff(-self.ur, -self.ui, -self.vr, -self.vi)

    def mul(self, o: "Coeff", two_lam: Fraction) -> "Coeff":
        """Product with s^2 = two_lam folded back into the rational part."""
        ur = self.ur * o.ur - self.ui * o.ui + two_lam * (self.vr * o.vr - self.vi * o.vi)
        ui = self.ur * o.ui + self.ui * o.ur + two_lam * (self.vr * o.vi + self.vi * o.vr)
        vr = self.ur * o.vr - self.ui * o.vi + self.vr * o.ur - self.vi * o.ui
        vi = self.ur * o.vi + self.ui * o.vr + self.vr * o.ui + self.vi * o.ur
        return Coeff(ur, ui, vr, vi)

    def scale(self, re, im=0) -> "Coeff":
        """Multiply by the Gaussian rational re + i*im."""
        re, im = _fr(re), _fr(im)
        return Coeff(self.ur * re - self.ui * im, self.ur * im + self.ui * re,
                     self.vr * re - self.vi * im, self.vr * im + self.vi * re)

    def conj(self) -> "Coeff":
        return Coeff(self.ur, -self.ui, self.vr, -self.vi)

    def to_complex(self, lam: float) -> complex:
        s = (2.0 * lam) ** 0.5
        return complex(self.ur + s * self.vr, self.ui + s * self.vi)


ZERO = Coeff()
ONE = Coeff.of(1)
I = Coeff.of(0, 1)
