"""Dense real polynomials in one or two variables.

Coefficients are stored in an ndarray ``c`` with ``c[i]`` (1 variable) or
``c[i, j]`` (2 variables) the coefficient of ``u1**i u2**j``. Besides the
usual ring operations the class provides rigorous range enclosures over
boxes, computed from the Taylor expansion at the box centre; these drive the
certified inside/outside classification used by the ball-measure quadrature.
"""

from __future__ import annotations

import itertools
from math import factorial
from typing import Iterable

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.signal import convolve


class Polynomial:
    __slots__ = ("coef", "_taylor")
    __array_ufunc__ = None  # numpy scalars/arrays defer to our reflected operators

    def __init__(self, coef):
        coef = np.atleast_1d(np.asarray(coef, dtype=float))
        if coef.ndim not in (1, 2):
            raise ValueError("only polynomials in 1 or 2 variables are supported")
        self.coef = _trim(coef)
        self._taylor = None

    @classmethod
    def from_terms(cls, terms: Iterable, nvars: int) -> "Polynomial":
        """Build from ``(exponents, coefficient)`` pairs; repeated exponents add up."""
        terms = [(tuple(int(e) for e in np.atleast_1d(exps)), float(c)) for exps, c in terms]
        for exps, _ in terms:
            if len(exps) != nvars or min(exps, default=0) < 0:
                raise ValueError(f"bad exponent tuple {exps} for {nvars} variable(s)")
        shape = tuple(max([e[k] for e, _ in terms], default=0) + 1 for k in range(nvars))
        coef = np.zeros(shape)
        for exps, c in terms:
            coef[exps] += c
        return cls(coef)

    @classmethod
    def constant(cls, value: float, nvars: int) -> "Polynomial":
        return cls(np.full((1,) * nvars, float(value)))

    @classmethod
    def variable(cls, k: int, nvars: int) -> "Polynomial":
        exps = [0] * nvars
        exps[k] = 1
        return cls.from_terms([(exps, 1.0)], nvars)

    @property
    def nvars(self) -> int:
        return self.coef.ndim

    def terms(self) -> list:
        """Nonzero ``(exponents, coefficient)`` pairs in lexicographic order."""
        idx = np.argwhere(self.coef != 0)
        return [(tuple(int(i) for i in ix), float(self.coef[tuple(ix)])) for ix in idx]

    # ring operations -----------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise ValueError("polynomials in different numbers of variables")
            return other
        if np.ndim(other) == 0:
            return Polynomial.constant(float(other), self.nvars)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        shape = tuple(max(a, b) for a, b in zip(self.coef.shape, other.coef.shape))
        out = np.zeros(shape)
        out[tuple(slice(0, n) for n in self.coef.shape)] += self.coef
        out[tuple(slice(0, n) for n in other.coef.shape)] += other.coef
        return Polynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(-self.coef)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Polynomial(convolve(self.coef, other.coef, method="direct"))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if int(n) != n or n < 0:
            raise ValueError("only nonnegative integer powers")
        out = Polynomial.constant(1.0, self.nvars)
        for _ in range(int(n)):
            out = out * self
        return out

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        diff = (self - other).coef
        return bool(np.all(diff == 0))

    def __hash__(self):
        return hash((self.coef.shape, self.coef.tobytes()))

    def __repr__(self):
        return f"Polynomial({self.terms()!r})"

    def is_zero(self) -> bool:
        return not np.any(self.coef)

    def deriv(self, axis: int = 0, order: int = 1) -> "Polynomial":
        c = self.coef
        for _ in range(order):
            n = c.shape[axis]
            if n == 1:
                return Polynomial(np.zeros((1,) * self.nvars))
            k = np.arange(1, n, dtype=float)
            shape = [1] * self.nvars
            shape[axis] = n - 1
            c = np.take(c, np.arange(1, n), axis=axis) * k.reshape(shape)
        return Polynomial(c)

    def __call__(self, u) -> np.ndarray:
        """Evaluate at points ``u`` of shape ``(..., nvars)`` (or ``(...)`` for one variable)."""
        u = np.asarray(u, dtype=float)
        if self.nvars == 1:
            if u.ndim and u.shape[-1] == 1:
                u = u[..., 0]
            return npoly.polyval(u, self.coef)
        return npoly.polyval2d(u[..., 0], u[..., 1], self.coef)

    # range enclosures ----------------------------------------------------

    def _taylor_table(self):
        if self._taylor is None:
            table = []
            for alpha in itertools.product(*(range(n) for n in self.coef.shape)):
                p = self
                for axis, a in enumerate(alpha):
                    p = p.deriv(axis, a)
                p = p * (1.0 / np.prod([factorial(a) for a in alpha]))
                if not p.is_zero():
                    table.append((alpha, p))
            self._taylor = table
        return self._taylor

    def enclose(self, center, halfwidth):
        """Range enclosure over boxes ``center +- halfwidth``.

        Returns ``(lo, hi, spread)`` where ``[lo, hi]`` contains every value of
        the polynomial on each box and ``spread[..., k]`` is the part of the
        enclosure width due to the variable ``k`` (used to pick split axes).
        The enclosure is exact up to rounding for affine polynomials and its
        overestimate shrinks quadratically with the box size otherwise.
        """
        center = np.asarray(center, dtype=float)
        halfwidth = np.asarray(halfwidth, dtype=float)
        if self.nvars == 1 and (center.ndim == 0 or center.shape[-1] != 1):
            center = center[..., None]
            halfwidth = halfwidth[..., None]
        base = np.zeros(center.shape[:-1])
        lo = base.copy()
        hi = base.copy()
        spread = np.zeros(center.shape)
        for alpha, p in self._taylor_table():
            b = p(center)
            if not any(alpha):
                lo = lo + b
                hi = hi + b
                continue
            mono = np.prod([halfwidth[..., k] ** a for k, a in enumerate(alpha)], axis=0)
            size = np.abs(b) * mono
            if all(a % 2 == 0 for a in alpha):
                lo = lo + np.minimum(b, 0.0) * mono
                hi = hi + np.maximum(b, 0.0) * mono
                width = size
            else:
                lo = lo - size
                hi = hi + size
                width = 2.0 * size
            for k, a in enumerate(alpha):
                if a:
                    spread[..., k] += width
        return lo, hi, spread


def _trim(coef: np.ndarray) -> np.ndarray:
    # drop trailing all-zero slices so degrees stay minimal
    for axis in range(coef.ndim):
        while coef.shape[axis] > 1:
            last = np.take(coef, [coef.shape[axis] - 1], axis=axis)
            if np.any(last):
                break
            coef = np.take(coef, np.arange(coef.shape[axis] - 1), axis=axis)
    return coef
