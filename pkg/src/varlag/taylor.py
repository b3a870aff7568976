"""Truncated Taylor arithmetic and first-order dual directions.

TaylorScalar carries the coefficients [a0, a1, ..., aK] of a0 + a1*h + ... +
aK*h^K and closes the elementary operations under truncation at order K.
Coefficients may be plain floats or numpy arrays of a common shape, so one
evaluation can sweep a whole batch of sample points.

DualDirection layers an infinitesimal perturbation (eps^2 = 0) on top of any
base ring (floats, arrays, TaylorScalar, or another DualDirection), which is
how partial derivatives of expressions are extracted.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError

_FACTORIAL = [1.0, 1.0, 2.0, 6.0, 24.0]


def _is_number(x):
    return isinstance(x, (int, float, np.ndarray, np.floating, np.integer))


def _all(x) -> bool:
    return bool(np.all(x))


def _any(x) -> bool:
    return bool(np.any(x))


class TaylorScalar:
    """Truncated univariate Taylor value of order K (2 by default, up to 4)."""

    __slots__ = ("coeffs",)
    __array_ufunc__ = None  # force numpy to defer to our reflected operators

    def __init__(self, coeffs):
        coeffs = tuple(
            c if isinstance(c, np.ndarray) else float(c) for c in coeffs
        )
        if not 1 <= len(coeffs) <= 5:
            raise ValueError("TaylorScalar supports orders 0 through 4")
        self.coeffs = coeffs

    @classmethod
    def constant(cls, value, order: int) -> "TaylorScalar":
        zero = value * 0.0 if isinstance(value, np.ndarray) else 0.0
        return cls((value,) + (zero,) * order)

    @classmethod
    def variable(cls, value, order: int) -> "TaylorScalar":
        """Taylor expansion of the identity: value + 1*h."""
        zero = value * 0.0 if isinstance(value, np.ndarray) else 0.0
        one = zero + 1.0
        tail = (one,) + (zero,) * (order - 1) if order >= 1 else ()
        return cls((value,) + tail)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __repr__(self):
        return f"TaylorScalar({list(self.coeffs)!r})"

    # -- ring structure -----------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, TaylorScalar):
            if other.order != self.order:
                raise ValueError(
                    f"mixed Taylor orders {self.order} and {other.order}"
                )
            return other
        if _is_number(other):
            return TaylorScalar.constant(other, self.order)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return TaylorScalar(tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return TaylorScalar(tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return TaylorScalar(tuple(a - b for a, b in zip(self.coeffs, o.coeffs)))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if _is_number(other):
            return TaylorScalar(tuple(a * other for a in self.coeffs))
        if not isinstance(other, TaylorScalar):
            return NotImplemented
        o = self._coerce(other)
        a, b = self.coeffs, o.coeffs
        out = []
        for j in range(len(a)):
            acc = a[0] * b[j]
            for i in range(1, j + 1):
                acc = acc + a[i] * b[j - i]
            out.append(acc)
        return TaylorScalar(tuple(out))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if _any(o.coeffs[0] == 0.0):
            raise DomainError("division by Taylor value with zero constant term")
        a, b = self.coeffs, o.coeffs
        q = [a[0] / b[0]]
        for j in range(1, len(a)):
            acc = a[j]
            for i in range(j):
                acc = acc - q[i] * b[j - i]
            q.append(acc / b[0])
        return TaylorScalar(tuple(q))

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        return powi(self, k)

    # -- composition with elementary functions -------------------------------

    def _compose(self, derivs):
        """Sum derivs[j]/j! * h^j where h is the nilpotent part of self."""
        k = self.order
        h = TaylorScalar((self.coeffs[0] * 0.0,) + self.coeffs[1:])
        out = TaylorScalar.constant(derivs[k] / _FACTORIAL[k], k)
        for j in range(k - 1, -1, -1):
            out = out * h + derivs[j] / _FACTORIAL[j]
        return out

    def sin(self):
        a = self.coeffs[0]
        s, c = np.sin(a), np.cos(a)
        return self._compose([s, c, -s, -c, s][: self.order + 1])

    def cos(self):
        a = self.coeffs[0]
        s, c = np.sin(a), np.cos(a)
        return self._compose([c, -s, -c, s, c][: self.order + 1])

    def tan(self):
        t = np.tan(self.coeffs[0])
        sec2 = 1.0 + t * t
        derivs = [
            t,
            sec2,
            2.0 * t * sec2,
            2.0 * sec2 * (1.0 + 3.0 * t * t),
            8.0 * t * sec2 * (2.0 + 3.0 * t * t),
        ]
        return self._compose(derivs[: self.order + 1])

    def sinh(self):
        a = self.coeffs[0]
        s, c = np.sinh(a), np.cosh(a)
        return self._compose([s, c, s, c, s][: self.order + 1])

    def cosh(self):
        a = self.coeffs[0]
        s, c = np.sinh(a), np.cosh(a)
        return self._compose([c, s, c, s, c][: self.order + 1])

    def exp(self):
        e = np.exp(self.coeffs[0])
        return self._compose([e] * (self.order + 1))

    def log(self):
        a = self.coeffs[0]
        if _any(a <= 0.0):
            raise DomainError("log of non-positive constant term")
        inv = 1.0 / a
        derivs = [np.log(a), inv, -inv * inv, 2.0 * inv**3, -6.0 * inv**4]
        return self._compose(derivs[: self.order + 1])

    def sqrt(self):
        a = self.coeffs[0]
        if _any(a <= 0.0):
            raise DomainError("sqrt of non-positive constant term")
        r = np.sqrt(a)
        derivs = [
            r,
            0.5 / r,
            -0.25 / (r * a),
            0.375 / (r * a * a),
            -0.9375 / (r * a**3),
        ]
        return self._compose(derivs[: self.order + 1])

    def atan(self):
        a = self.coeffs[0]
        d = 1.0 / (1.0 + a * a)
        derivs = [
            np.arctan(a),
            d,
            -2.0 * a * d * d,
            (6.0 * a * a - 2.0) * d**3,
            24.0 * a * (1.0 - a * a) * d**4,
        ]
        return self._compose(derivs[: self.order + 1])

    # -- jet utilities --------------------------------------------------------

    def derivative_series(self) -> "TaylorScalar":
        """Coefficient-shift derivative: d/dh of the truncated polynomial."""
        k = self.order
        if k == 0:
            return TaylorScalar((self.coeffs[0] * 0.0,))
        return TaylorScalar(
            tuple((j + 1) * self.coeffs[j + 1] for j in range(k))
        )

    def truncated(self, order: int) -> "TaylorScalar":
        if order >= self.order:
            return self
        return TaylorScalar(self.coeffs[: order + 1])


def powi(x, k: int):
    """Integer power by repeated multiplication; negative k via reciprocal."""
    if k == 0:
        return x * 0.0 + 1.0
    if k < 0:
        return 1.0 / powi(x, -k)
    out = None
    base = x
    while k:
        if k & 1:
            out = base if out is None else out * base
        k >>= 1
        if k:
            base = base * base
    return out


class DualDirection:
    """First-order dual a + eps*b with eps^2 = 0 over any base ring."""

    __slots__ = ("base", "perturbation")
    __array_ufunc__ = None

    def __init__(self, base, perturbation):
        self.base = base
        self.perturbation = perturbation

    def __repr__(self):
        return f"DualDirection({self.base!r}, {self.perturbation!r})"

    def __add__(self, other):
        if isinstance(other, DualDirection):
            return DualDirection(
                self.base + other.base, self.perturbation + other.perturbation
            )
        return DualDirection(self.base + other, self.perturbation)

    __radd__ = __add__

    def __neg__(self):
        return DualDirection(-self.base, -self.perturbation)

    def __sub__(self, other):
        return self + (-other if isinstance(other, DualDirection) else -1.0 * other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, DualDirection):
            return DualDirection(
                self.base * other.base,
                self.base * other.perturbation + self.perturbation * other.base,
            )
        return DualDirection(self.base * other, self.perturbation * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, DualDirection):
            inv = 1.0 / other.base
            return DualDirection(
                self.base * inv,
                (self.perturbation - self.base * inv * other.perturbation) * inv,
            )
        return DualDirection(self.base / other, self.perturbation / other)

    def __rtruediv__(self, other):
        inv = 1.0 / self.base
        return DualDirection(other * inv, -other * inv * inv * self.perturbation)

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        return powi(self, k)

    def _lift(self, value, deriv):
        return DualDirection(value, self.perturbation * deriv)

    def sin(self):
        return self._lift(fsin(self.base), fcos(self.base))

    def cos(self):
        return self._lift(fcos(self.base), -fsin(self.base))

    def tan(self):
        t = ftan(self.base)
        return self._lift(t, 1.0 + t * t)

    def sinh(self):
        return self._lift(fsinh(self.base), fcosh(self.base))

    def cosh(self):
        return self._lift(fcosh(self.base), fsinh(self.base))

    def exp(self):
        e = fexp(self.base)
        return self._lift(e, e)

    def log(self):
        return self._lift(flog(self.base), 1.0 / self.base)

    def sqrt(self):
        r = fsqrt(self.base)
        return self._lift(r, 0.5 / r)

    def atan(self):
        return self._lift(fatan(self.base), 1.0 / (1.0 + self.base * self.base))


def _dispatch(name, np_fn):
    def fn(x):
        if isinstance(x, (TaylorScalar, DualDirection)):
            return getattr(x, name)()
        return np_fn(x)

    fn.__name__ = "f" + name
    return fn


fsin = _dispatch("sin", np.sin)
fcos = _dispatch("cos", np.cos)
ftan = _dispatch("tan", np.tan)
fsinh = _dispatch("sinh", np.sinh)
fcosh = _dispatch("cosh", np.cosh)
fexp = _dispatch("exp", np.exp)


def fsqrt(x):
    if isinstance(x, (TaylorScalar, DualDirection)):
        return x.sqrt()
    if _any(np.asarray(x) <= 0.0):
        raise DomainError("sqrt of non-positive constant term")
    return np.sqrt(x)


def flog(x):
    if isinstance(x, (TaylorScalar, DualDirection)):
        return x.log()
    if _any(np.asarray(x) <= 0.0):
        raise DomainError("log of non-positive constant term")
    return np.log(x)


def fatan(x):
    if isinstance(x, (TaylorScalar, DualDirection)):
        return x.atan()
    return np.arctan(x)


def fatan2(y, x):
    """Full-circle angle with derivative (x*dy - y*dx)/(x^2 + y^2).

    Branch cut along the negative x axis; evaluating exactly on the cut with
    a nonzero perturbation raises DomainError.
    """
    if isinstance(y, DualDirection) or isinstance(x, DualDirection):
        if not isinstance(y, DualDirection):
            y = DualDirection(y, x.perturbation * 0.0)
        if not isinstance(x, DualDirection):
            x = DualDirection(x, y.perturbation * 0.0)
        den = x.base * x.base + y.base * y.base
        val = fatan2(y.base, x.base)
        eps = (x.base * y.perturbation - y.base * x.perturbation) / den
        return DualDirection(val, eps)
    if isinstance(y, TaylorScalar) or isinstance(x, TaylorScalar):
        if not isinstance(y, TaylorScalar):
            y = TaylorScalar.constant(y, x.order)
        if not isinstance(x, TaylorScalar):
            x = TaylorScalar.constant(x, y.order)
        if y.order != x.order:
            raise ValueError("mixed Taylor orders in atan2")
        y0, x0 = y.coeffs[0], x.coeffs[0]
        if _any((x0 * x0 + y0 * y0) == 0.0):
            raise DomainError("atan2 at the origin")
        on_cut = (y0 == 0.0) & (x0 < 0.0)
        perturbed = False
        for c in y.coeffs[1:]:
            perturbed = perturbed | (c != 0.0)
        if _any(on_cut & perturbed):
            raise DomainError("atan2 on the branch cut with nonzero perturbation")
        theta0 = np.arctan2(y0, x0)
        k = y.order
        if k == 0:
            return TaylorScalar((theta0,))
        yk, xk = y.truncated(k - 1), x.truncated(k - 1)
        rate = (xk * y.derivative_series() - yk * x.derivative_series()) / (
            xk * xk + yk * yk
        )
        coeffs = [theta0] + [rate.coeffs[j] / (j + 1) for j in range(k)]
        return TaylorScalar(tuple(coeffs))
    if _any((np.asarray(x) == 0.0) & (np.asarray(y) == 0.0)):
        raise DomainError("atan2 at the origin")
    return np.arctan2(y, x)
