"""Gauss hypergeometric function and complete elliptic integral of the first kind.

Both functions are real-argument only.  ``gauss_2f1`` also accepts
``mpmath.mpf`` inputs, in which case every operation (including the stopping
rule) runs at the working precision of ``mpmath.mp``; the rest of the package
relies on this to evaluate solutions in extended precision.

Elliptic convention: ``K(m) = int_0^{pi/2} dtheta / sqrt(1 - m sin^2 theta)``
with the *parameter* ``m`` (the squared modulus).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath

MAX_TERMS = 10_000
INTEGER_SNAP = 1e-8


class ParameterError(ValueError):
    pass


class DomainError(ValueError):
    pass


class ConvergenceError(ArithmeticError):
    def __init__(self, msg, partial_sum=None, terms=None):
        super().__init__(msg)
        self.partial_sum = partial_sum
        self.terms = terms


class _FloatCtx:
    eps = 2.0**-53
    pi = math.pi

    @staticmethod
    def num(x):
        return float(x)

    log = staticmethod(math.log)
    sqrt = staticmethod(math.sqrt)

    @staticmethod
    def rgamma(x):
        if x <= 0 and x == math.floor(x):
            return 0.0
        return 1.0 / math.gamma(x)

    @staticmethod
    def gamma(x):
        return math.gamma(x)

    @staticmethod
    def digamma(x):
        return _digamma(x)


class _MpCtx:
    pi = property(lambda self: mpmath.mp.pi)

    @property
    def eps(self):
        return mpmath.mp.eps

    @staticmethod
    def num(x):
        return mpmath.mpf(x)

    log = staticmethod(mpmath.log)
    sqrt = staticmethod(mpmath.sqrt)
    rgamma = staticmethod(mpmath.rgamma)
    gamma = staticmethod(mpmath.gamma)
    digamma = staticmethod(mpmath.digamma)


_FLOAT = _FloatCtx()
_MP = _MpCtx()


def _ctx_for(*xs):
    return _MP if any(isinstance(x, mpmath.mpf) for x in xs) else _FLOAT


# Bernoulli numbers B_2k / (2k) for the digamma asymptotic series
_DIGAMMA_ASYM = (1 / 12, -1 / 120, 1 / 252, -1 / 240, 1 / 132, -691 / 32760, 1 / 12)


def _digamma(x: float) -> float:
    if x <= 0 and x == math.floor(x):
        raise ParameterError(f"digamma pole at {x}")
    if x < 0.5:
        return _digamma(1.0 - x) - math.pi / math.tan(math.pi * x)
    acc = 0.0
    while x < 10.0:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    series = 0.0
    p = inv2
    for coef in _DIGAMMA_ASYM:
        series += coef * p
        p *= inv2
    return acc + math.log(x) - 0.5 / x - series


@dataclass(frozen=True)
class HyperParams:
    a: float
    b: float
    c: float
    z: float

    def __post_init__(self):
        c = self.c
        if c <= 0 and c == int(c):
            raise ParameterError(f"c = {c} is a nonpositive integer (pole of the series)")
        if not self.z < 1:
            raise DomainError(f"z = {self.z} outside (-inf, 1)")


def _is_nonpos_int(x) -> bool:
    return x <= 0 and x == int(x)


def _series(ctx, a, b, c, z):
    """Maclaurin series, summed until the next term is below eps relative."""
    one = ctx.num(1)
    term = one
    total = one
    n = 0
    tol = ctx.eps
    while True:
        ratio = (a + n) * (b + n) / ((c + n) * (n + 1)) * z
        term = term * ratio
        total += term
        n += 1
        if term == 0:
            return total
        if abs(term) <= tol * abs(total) and abs(ratio) < 1:
            return total
        if n >= MAX_TERMS:
            raise ConvergenceError(
                f"2F1({a}, {b}; {c}; {z}) series did not converge after {n} terms",
                partial_sum=total, terms=n)


def _log_case(ctx, a, b, m, w):
    """F(a, b; a+b+m; 1-w) for integer m >= 0 and 0 < w <= 1/2."""
    c = a + b + m
    gc = ctx.gamma(c)
    zm1 = -w
    finite = ctx.num(0)
    if m > 0:
        coef = ctx.num(1)
        for k in range(m):
            finite += coef * math.factorial(m - k - 1) * zm1**k
            coef = coef * (a + k) * (b + k) / (k + 1)
        finite *= gc * ctx.rgamma(a + m) * ctx.rgamma(b + m)

    pref = gc * ctx.rgamma(a) * ctx.rgamma(b) * zm1**m
    if pref == 0:
        return finite
    logw = ctx.log(w)
    psi_k1 = ctx.digamma(ctx.num(1))
    psi_km1 = ctx.digamma(ctx.num(m + 1))
    psi_a = ctx.digamma(a + m)
    psi_b = ctx.digamma(b + m)
    coef = ctx.num(1) / math.factorial(m)
    total = ctx.num(0)
    k = 0
    while True:
        term = coef * w**k * (logw - psi_k1 - psi_km1 + psi_a + psi_b)
        total += term
        if k > 2 and abs(term) <= ctx.eps * abs(total):
            break
        if k >= MAX_TERMS:
            raise ConvergenceError(
                f"logarithmic 2F1 connection series did not converge (m={m})",
                partial_sum=total, terms=k)
        coef = coef * (a + m + k) * (b + m + k) / ((k + 1) * (k + 1 + m))
        psi_k1 += ctx.num(1) / (k + 1)
        psi_km1 += ctx.num(1) / (k + 1 + m)
        psi_a += ctx.num(1) / (a + m + k)
        psi_b += ctx.num(1) / (b + m + k)
        k += 1
    return finite - pref * total


def _near_one(ctx, a, b, c, w):
    """F(a, b; c; 1-w) for 0 < w <= 1/2 via the connection formula in ``w``."""
    s = c - a - b
    m = round(float(s))
    if abs(float(s) - m) < INTEGER_SNAP:
        if m >= 0:
            return _log_case(ctx, a, b, m, w)
        # Euler: F(a,b;c;z) = (1-z)^{c-a-b} F(c-a, c-b; c; z) flips the sign of c-a-b
        return w**s * _log_case(ctx, c - a, c - b, -m, w)
    gc = ctx.gamma(c)
    out = ctx.num(0)
    t1 = gc * ctx.gamma(s) * ctx.rgamma(c - a) * ctx.rgamma(c - b)
    if t1 != 0:
        out += t1 * _series(ctx, a, b, 1 - s, w)
    t2 = gc * ctx.gamma(-s) * ctx.rgamma(a) * ctx.rgamma(b)
    if t2 != 0:
        out += t2 * w**s * _series(ctx, c - a, c - b, 1 + s, w)
    return out


def _eval(ctx, a, b, c, z, w):
    # z and w = 1 - z are both supplied so callers holding an accurate 1 - z keep it
    if _is_nonpos_int(a) or _is_nonpos_int(b):
        return _series(ctx, a, b, c, z)
    if z < 0:
        # Pfaff: F(a,b;c;z) = (1-z)^{-a} F(a, c-b; c; z/(z-1))
        zz = z / (z - 1)
        return w ** (-a) * _eval(ctx, a, c - b, c, zz, 1 / w)
    if z < 0.5:
        return _series(ctx, a, b, c, z)
    return _near_one(ctx, a, b, c, w)


def gauss_2f1(a, b, c, z):
    """Gauss hypergeometric function 2F1(a, b; c | z) for real ``z < 1``.

    Arguments below 1/2 are summed directly; on [1/2, 1) the standard
    connection formula maps the evaluation to the argument ``1 - z``.  When
    ``c - a - b`` lies within 1e-8 of an integer the logarithmic form of that
    formula is used with the integer value, which perturbs the result by
    O(|c - a - b - round(c - a - b)|).  Negative arguments go through the
    Pfaff transformation first.
    """
    HyperParams(float(a), float(b), float(c), float(z))
    ctx = _ctx_for(a, b, c, z)
    a, b, c, z = (ctx.num(v) for v in (a, b, c, z))
    return _eval(ctx, a, b, c, z, 1 - z)


def gauss_2f1_complement(a, b, c, w):
    """``2F1(a, b; c | 1 - w)`` for ``w > 0`` without forming ``1 - w`` first."""
    HyperParams(float(a), float(b), float(c), 0.0)
    if not w > 0:
        raise DomainError(f"complementary argument w = {w} must be positive")
    ctx = _ctx_for(a, b, c, w)
    a, b, c, w = (ctx.num(v) for v in (a, b, c, w))
    return _eval(ctx, a, b, c, 1 - w, w)


def _agm(x, y, eps):
    for _ in range(64):
        if abs(x - y) <= eps * x:
            break
        x, y = (x + y) / 2, math.sqrt(x * y)
    return (x + y) / 2


def elliptic_k(m: float) -> float:
    """Complete elliptic integral of the first kind, parameter ``m`` in (0, 1)."""
    if not 0.0 < m < 1.0:
        raise DomainError(f"elliptic parameter m = {m} outside (0, 1)")
    return math.pi / (2.0 * _agm(1.0, math.sqrt(1.0 - m), 4 * _FloatCtx.eps))


def elliptic_k_complement(m: float) -> float:
    """``K(1 - m)`` computed from ``m`` directly, accurate for tiny ``m``."""
    if not 0.0 < m < 1.0:
        raise DomainError(f"elliptic parameter m = {m} outside (0, 1)")
    return math.pi / (2.0 * _agm(1.0, math.sqrt(m), 4 * _FloatCtx.eps))
