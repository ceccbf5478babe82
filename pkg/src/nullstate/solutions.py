"""Closed-form solution handles for one and two arcs, plus test functions.

A handle is a callable on strictly increasing coordinate tuples.  Evaluators
are written once for both floats and ``mpmath.mpf``: passing mpf coordinates
evaluates the whole formula (including the hypergeometric series and kappa
itself, when kappa is a ``Fraction``) at ``mpmath.mp`` precision.

Covariant handles also expose ``extended``, the same closed form written with
absolute values so it makes sense on every ordering of the coordinates that
a Moebius map of the upper half-plane can produce.  ``mobius_transform_check``
uses it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Sequence

import mpmath

from . import params, specfun
from .specfun import DomainError, ParameterError

Number = float  # or mpmath.mpf


@dataclass(frozen=True)
class ConfigPoint:
    coords: tuple

    def __post_init__(self):
        xs = tuple(self.coords)
        object.__setattr__(self, "coords", xs)
        if len(xs) < 2 or len(xs) % 2:
            raise ParameterError(f"a configuration needs an even number >= 2 of coordinates, got {len(xs)}")
        for a, b in zip(xs, xs[1:]):
            if not b > a:
                raise DomainError(f"coordinates must be strictly increasing: {xs}")

    @property
    def min_gap(self):
        return min(b - a for a, b in zip(self.coords, self.coords[1:]))

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)


def _coords(pt) -> tuple:
    return pt.coords if isinstance(pt, ConfigPoint) else ConfigPoint(tuple(pt)).coords


def _is_mp(xs) -> bool:
    return any(isinstance(x, mpmath.mpf) for x in xs)


def kappa_value(kappa, like=()):
    """``kappa`` as a float, or as an exact-as-possible mpf if ``like`` holds mpf values."""
    if _is_mp(like):
        if isinstance(kappa, Fraction):
            return mpmath.mpf(kappa.numerator) / kappa.denominator
        return mpmath.mpf(kappa)
    return float(kappa)


@dataclass(frozen=True)
class Claims:
    satisfies_null_state: bool = True
    satisfies_ward: bool = True
    known_dual_vector: tuple | None = None


@dataclass(frozen=True)
class SolutionHandle:
    n_pairs: int
    kappa: object
    evaluator: Callable
    label: str
    claims: Claims = field(default_factory=Claims)
    extension: Callable | None = None

    def __post_init__(self):
        params.SleKappa(self.kappa)

    @property
    def arity(self) -> int:
        return 2 * self.n_pairs

    def __call__(self, pt):
        xs = _coords(pt)
        if len(xs) != self.arity:
            raise ParameterError(f"{self.label} takes {self.arity} coordinates, got {len(xs)}")
        return self.evaluator(xs)

    def extended(self, xs: Sequence):
        """Covariant extension off the increasing chamber; raises if the handle has none."""
        xs = tuple(xs)
        if len(xs) != self.arity:
            raise ParameterError(f"{self.label} takes {self.arity} coordinates, got {len(xs)}")
        if len(set(xs)) != len(xs):
            raise DomainError("coordinates must be distinct")
        if self.extension is None:
            if all(b > a for a, b in zip(xs, xs[1:])):
                return self.evaluator(xs)
            raise DomainError(f"{self.label} has no extension off the increasing chamber")
        return self.extension(xs)

    def scaled(self, c) -> "SolutionHandle":
        return combine([(c, self)])

    def to_dict(self) -> dict:
        v = self.claims.known_dual_vector
        return {
            "label": self.label,
            "n_pairs": self.n_pairs,
            "kappa": float(self.kappa),
            "satisfies_null_state": self.claims.satisfies_null_state,
            "satisfies_ward": self.claims.satisfies_ward,
            "known_dual_vector": None if v is None else [float(x) for x in v],
        }


def combine(terms: Sequence[tuple[float, SolutionHandle]], label: str | None = None) -> SolutionHandle:
    """Pointwise linear combination ``sum c_k F_k`` of handles sharing N and kappa."""
    if not terms:
        raise ParameterError("empty combination")
    n, k = terms[0][1].n_pairs, terms[0][1].kappa
    if any(h.n_pairs != n or h.kappa != k for _, h in terms):
        raise ParameterError("combined handles must share n_pairs and kappa")
    coefs = [c for c, _ in terms]
    hs = [h for _, h in terms]

    def ev(xs):
        return sum(c * h.evaluator(xs) for c, h in zip(coefs, hs))

    ext = None
    if all(h.extension is not None for h in hs):
        def ext(xs):
            return sum(c * h.extension(xs) for c, h in zip(coefs, hs))

    dual = None
    if all(h.claims.known_dual_vector is not None for h in hs):
        dual = tuple(sum(c * h.claims.known_dual_vector[i] for c, h in zip(coefs, hs))
                     for i in range(len(hs[0].claims.known_dual_vector)))
    claims = Claims(all(h.claims.satisfies_null_state for h in hs),
                    all(h.claims.satisfies_ward for h in hs), dual)
    name = label or " + ".join(f"{c!r}*{h.label}" for c, h in terms)
    return SolutionHandle(n, k, ev, name, claims, ext)


# ---------------------------------------------------------------------------
# one arc


def s1_solution(k, scale: float = 1.0) -> SolutionHandle:
    """``C (x2 - x1)^(1 - 6/kappa)``."""
    kap = params.SleKappa(k).kappa

    def ext(xs):
        a = 1 - 6 / kappa_value(kap, xs)
        return scale * abs(xs[1] - xs[0]) ** a

    return SolutionHandle(1, kap, ext, f"s1(kappa={kap}, C={scale})",
                          Claims(True, True, (scale,)), ext)


# ---------------------------------------------------------------------------
# two arcs


def _g1(kap, lam, one_minus_lam):
    two_k = 2 / kap
    a = 1 - 6 / kap
    A, B, C = 4 / kap, 1 - 4 / kap, 8 / kap
    if lam <= 0.5:
        f = specfun.gauss_2f1(A, B, C, lam)
    else:
        f = specfun.gauss_2f1_complement(A, B, C, one_minus_lam)
    return lam**two_k * one_minus_lam**a * f


def _check_lambda(lam, one_minus_lam):
    if not (0 < lam < 1 and 0 < one_minus_lam < 1):
        raise DomainError(f"cross-ratio {lam} outside (0, 1)")


def g_functions(k, lam):
    """``(G1(lam), G2(lam))`` with ``G2(lam) = G1(1 - lam)``."""
    kap = kappa_value(params.SleKappa(k).kappa, (lam,))
    om = 1 - lam
    _check_lambda(lam, om)
    return _g1(kap, lam, om), _g1(kap, om, lam)


def cross_ratio(xs):
    """``lam`` and ``1 - lam`` for four coordinates, each formed without cancellation."""
    x1, x2, x3, x4 = xs
    den = (x3 - x1) * (x4 - x2)
    return (x2 - x1) * (x4 - x3) / den, (x3 - x2) * (x4 - x1) / den


def connection_constant(k):
    """``2F1(4/k, 1 - 4/k; 8/k | 1)``: the value ``G2`` leaves behind when ``lam -> 0``."""
    kap = params.SleKappa(k).kappa
    if isinstance(kap, mpmath.mpf):
        g, rg = mpmath.gamma, mpmath.rgamma
    else:
        kap = float(kap)
        g = math.gamma
        rg = lambda x: 1.0 / math.gamma(x)  # noqa: E731
    return g(8 / kap) * g(8 / kap - 1) * rg(4 / kap) * rg(12 / kap - 1)


def s2_solution(k, c1: float, c2: float) -> SolutionHandle:
    """``[(x4-x2)(x3-x1)]^(1-6/kappa) [c1 G1(lam) + c2 G2(lam)]``.

    Its dual vector in the lexicographic diagram order
    ``{(1,2),(3,4)}``, ``{(1,4),(2,3)}`` is ``K0 * (c2, c1)`` with
    ``K0 = connection_constant(kappa)``.
    """
    kap = params.SleKappa(k).kappa

    def ext(xs):
        kv = kappa_value(kap, xs)
        a = 1 - 6 / kv
        lam, om = cross_ratio(xs)
        _check_lambda(lam, om)
        x1, x2, x3, x4 = xs
        pref = abs((x4 - x2) * (x3 - x1)) ** a
        out = 0
        if c1:
            out += c1 * _g1(kv, lam, om)
        if c2:
            out += c2 * _g1(kv, om, lam)
        return pref * out

    k0 = connection_constant(float(kap))
    return SolutionHandle(2, kap, ext, f"s2(kappa={kap}, C1={c1}, C2={c2})",
                          Claims(True, True, (c2 * k0, c1 * k0)), ext)


CARDY_NORM = 3.0 * math.gamma(2.0 / 3.0) / math.gamma(1.0 / 3.0) ** 2


def cardy_solution() -> SolutionHandle:
    """The kappa = 6 element equal to the crossing probability at modulus ``m = lam``.

    At kappa = 6 the prefactor is 1 and ``G1(lam) = lam^(1/3) 2F1(2/3, 1/3; 4/3 | lam)``,
    so the handle is ``s2(6, CARDY_NORM, 0)``.  Its dual vector is ``(0, 1)``.
    """
    h = s2_solution(6, CARDY_NORM, 0.0)
    return replace(h, label="cardy(kappa=6)")


# ---------------------------------------------------------------------------
# test functions


def counterexample_solution(k, n_pairs: int) -> SolutionHandle:
    """``prod_{i<j} (x_j - x_i)^(2/kappa)``: null-state PDEs hold, only translation Ward does."""
    kap = params.SleKappa(k).kappa
    if int(n_pairs) != n_pairs or n_pairs < 1:
        raise ParameterError("n_pairs must be a positive integer")

    def ext(xs):
        e = 2 / kappa_value(kap, xs)
        out = 1
        for i in range(len(xs)):
            for j in range(i + 1, len(xs)):
                out *= abs(xs[j] - xs[i]) ** e
        return out

    return SolutionHandle(n_pairs, kap, ext, f"counterexample(kappa={kap}, N={n_pairs})",
                          Claims(True, False, None), ext)


def constant_solution(n_pairs: int, value: float = 1.0, k=6) -> SolutionHandle:
    """The constant ``value``; a genuine solution only at kappa = 6 where the weight vanishes."""
    kap = params.SleKappa(k).kappa
    ok = kap == 6
    from .diagrams import catalan

    def ev(xs):
        return value + 0 * xs[0]

    dual = tuple([value] * catalan(n_pairs)) if ok else None
    return SolutionHandle(n_pairs, kap, ev, f"constant({value}, kappa={kap}, N={n_pairs})",
                          Claims(ok, ok, dual), ev)


def zero_solution(n_pairs: int, k=6) -> SolutionHandle:
    from .diagrams import catalan

    kap = params.SleKappa(k).kappa

    def ev(xs):
        return 0 * xs[0]

    return SolutionHandle(n_pairs, kap, ev, f"zero(kappa={kap}, N={n_pairs})",
                          Claims(True, True, tuple([0.0] * catalan(n_pairs))), ev)


# ---------------------------------------------------------------------------
# Moebius covariance


def mobius_transform_check(f: SolutionHandle, map_params, pt) -> float:
    """Relative violation of ``F(x') prod f'(x_i)^theta1 = F(x)`` for ``f(x) = (ax+b)/(cx+d)``.

    The image may leave the increasing chamber (a map with its pole to the
    left of the points rotates them cyclically).  ``F`` is then evaluated
    through its covariant extension with the original labels kept.
    """
    a, b, c, d = map_params
    det = a * d - b * c
    if not det > 0:
        raise ParameterError(f"map must preserve the upper half-plane (ad - bc = {det} <= 0)")
    xs = _coords(pt)
    dens = [c * x + d for x in xs]
    if any(den == 0 for den in dens):
        raise DomainError("a coordinate is mapped to infinity")
    image = [(a * x + b) / den for x, den in zip(xs, dens)]
    theta = params.one_leg_weight(f.kappa)
    theta = kappa_value(theta, xs) if isinstance(theta, Fraction) else theta
    jac = 1
    for den in dens:
        jac *= (det / (den * den)) ** theta
    lhs = f.extended(image) * jac
    rhs = f(xs)
    if rhs == 0:
        return abs(lhs)
    return abs(lhs - rhs) / abs(rhs)


SOLUTIONS = {
    "s1": "s1_solution(kappa, C)",
    "s2": "s2_solution(kappa, C1, C2)",
    "cardy": "cardy_solution()",
    "counterexample": "counterexample_solution(kappa, N)",
    "constant": "constant_solution(N)",
    "zero": "zero_solution(N)",
}


def build(name: str, kappa=None, n_pairs: int | None = None, c1: float = 1.0, c2: float = 0.0,
          scale: float = 1.0) -> SolutionHandle:
    """Look a handle up by name (used by the command line)."""
    if name == "s1":
        return s1_solution(kappa, scale)
    if name == "s2":
        return s2_solution(kappa, c1, c2)
    if name == "cardy":
        return cardy_solution()
    if name == "counterexample":
        return counterexample_solution(kappa, n_pairs or 2)
    if name == "constant":
        return constant_solution(n_pairs or 1, scale, 6 if kappa is None else kappa)
    if name == "zero":
        return zero_solution(n_pairs or 1, 6 if kappa is None else kappa)
    raise ParameterError(f"unknown solution {name!r}; choose from {sorted(SOLUTIONS)}")
