"""Finite-difference residuals of the null-state PDEs and the conformal Ward identities.

For a point ``x`` with ``2N`` coordinates, ``kappa`` and ``theta = (6 - kappa)/(2 kappa)``:

* null-state PDE centred on ``x_j``::

      (kappa/4) d_j^2 F + sum_{k != j} [ d_k F / (x_k - x_j) - theta F / (x_k - x_j)^2 ] = 0

* Ward identities::

      sum_k d_k F = 0
      sum_k (x_k d_k + theta) F = 0
      sum_k (x_k^2 d_k + 2 theta x_k) F = 0

Derivatives use 5-point fourth-order central stencils.  Every residual is
``|sum of terms| / max(sum |terms|, natural scale)``: zero for an exact
solution and of order one when the identity fails.  The natural scale is the
size each term would have for a function of size ``|F|`` varying on the
length ``g`` (the minimum gap): ``|F|/g^2`` for the PDEs and ``|F|/g``,
``|F|``, ``|F| max|x|`` for the three Ward identities.  It keeps a
(numerically) constant function, whose terms are pure roundoff, from
reporting an order-one ratio of noise.  When everything vanishes the
residual is 0.

The convergence-order fit needs truncation errors far below double
precision roundoff at the smallest steps, so it re-evaluates the handle
with ``mpmath`` coordinates at ``ORDER_FIT_DPS`` digits.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from . import params
from .solutions import SolutionHandle, _coords, kappa_value

DEFAULT_REL_STEP = 1e-3
DEFAULT_SWEEP = tuple(10.0 ** (-e) for e in np.arange(1.0, 4.01, 0.5))
ORDER_FIT_DPS = 40
ORDER_FIT_FLOOR_MARGIN = 12
MIN_SWEEP_DECADES = 3.0


class StepError(ValueError):
    pass


@dataclass
class ResidualReport:
    null_state: list
    ward: list
    step_sizes: list
    convergence_order: list | None = None
    order_note: str | None = None
    per_point: list = field(default_factory=list)

    @property
    def max_null_state(self) -> float:
        return max(self.null_state)

    def to_dict(self) -> dict:
        return asdict(self)


def _theta(f: SolutionHandle, like):
    th = params.one_leg_weight(f.kappa)
    return kappa_value(th, like) if isinstance(th, Fraction) else (
        mpmath.mpf(th) if any(isinstance(x, mpmath.mpf) for x in like) else float(th))


def _derivatives(f: SolutionHandle, xs: tuple, h):
    """``F``, gradient and diagonal second derivatives at ``xs``."""
    n = len(xs)
    f0 = f.evaluator(xs)
    grad, diag = [], []
    for k in range(n):
        vals = []
        for s in (-2, -1, 1, 2):
            ys = list(xs)
            ys[k] = xs[k] + s * h
            vals.append(f.evaluator(tuple(ys)))
        m2, m1, p1, p2 = vals
        grad.append((m2 - 8 * m1 + 8 * p1 - p2) / (12 * h))
        diag.append((-m2 + 16 * m1 - 30 * f0 + 16 * p1 - p2) / (12 * h * h))
    return f0, grad, diag


def _ratio(terms, floor=0.0) -> float:
    scale = max(sum(abs(t) for t in terms), abs(floor))
    if scale == 0:
        return 0.0
    return float(abs(sum(terms)) / scale)


def _null_terms(kap, theta, xs, j, f0, grad, diag):
    terms = [kap / 4 * diag[j]]
    for k in range(len(xs)):
        if k != j:
            d = xs[k] - xs[j]
            terms.append(grad[k] / d)
            terms.append(-theta * f0 / (d * d))
    return terms


def _ward_terms(theta, xs, f0, grad):
    t1 = list(grad)
    t2 = [x * g for x, g in zip(xs, grad)] + [theta * f0] * len(xs)
    t3 = [x * x * g for x, g in zip(xs, grad)] + [2 * theta * x * f0 for x in xs]
    return t1, t2, t3


def _floors(xs, f0):
    g = min(b - a for a, b in zip(xs, xs[1:]))
    big = max(abs(x) for x in xs)
    return f0 / (g * g), (f0 / g, f0, f0 * big)


def _check_step(xs, h):
    gap = min(b - a for a, b in zip(xs, xs[1:]))
    if not 0 < h < gap / 4:
        raise StepError(f"step {h} must lie in (0, min gap / 4 = {gap / 4})")
    return gap


def _default_step(xs):
    return DEFAULT_REL_STEP * min(b - a for a, b in zip(xs, xs[1:]))


def _all_residuals(f, xs, h):
    _check_step(xs, h)
    kap = kappa_value(f.kappa, xs)
    theta = _theta(f, xs)
    f0, grad, diag = _derivatives(f, xs, h)
    fl_null, fl_ward = _floors(xs, f0)
    null = [_ratio(_null_terms(kap, theta, xs, j, f0, grad, diag), fl_null) for j in range(len(xs))]
    ward = [_ratio(t, fl) for t, fl in zip(_ward_terms(theta, xs, f0, grad), fl_ward)]
    return null, ward


def null_state_residual(f: SolutionHandle, pt, j: int, h=None) -> float:
    """Normalized residual of the PDE centred on coordinate ``j`` (1-based)."""
    xs = _coords(pt)
    if not 1 <= j <= len(xs):
        raise ValueError(f"j must lie in 1..{len(xs)}")
    h = _default_step(xs) if h is None else h
    _check_step(xs, h)
    kap = kappa_value(f.kappa, xs)
    f0, grad, diag = _derivatives(f, xs, h)
    return _ratio(_null_terms(kap, _theta(f, xs), xs, j - 1, f0, grad, diag), _floors(xs, f0)[0])


def ward_residuals(f: SolutionHandle, pt, h=None) -> tuple[float, float, float]:
    """Normalized residuals of the translation, dilation and inversion identities."""
    xs = _coords(pt)
    h = _default_step(xs) if h is None else h
    _check_step(xs, h)
    f0, grad, _ = _derivatives(f, xs, h)
    return tuple(_ratio(t, fl) for t, fl in zip(_ward_terms(_theta(f, xs), xs, f0, grad), _floors(xs, f0)[1]))


def _fit_order(hs, values, floor):
    # residuals at the roundoff floor carry no truncation signal
    pts = [(math.log(h), math.log(v)) for h, v in zip(hs, values) if v > floor]
    if len(pts) < 3:
        return None
    x, y = np.array(pts).T
    return float(np.polyfit(x, y, 1)[0])


def full_report(f: SolutionHandle, pts, h_sweep=DEFAULT_SWEEP, rel_step=DEFAULT_REL_STEP,
                order_points: int | None = 3) -> ResidualReport:
    """Worst residuals over ``pts`` at ``h = rel_step * min gap``, plus an order fit.

    ``h_sweep`` holds steps relative to each point's minimum gap.  The fitted
    order (slope of log residual against log h, worst case over the first
    ``order_points`` points, all points if None) is reported only when the
    sweep spans at least three decades.  Residuals that are exactly zero at
    every step (e.g. constant handles) have no order and report None.
    """
    pts = [_coords(p) for p in pts]
    if not pts:
        raise ValueError("need at least one point")
    n = 2 * f.n_pairs
    null = [0.0] * n
    ward = [0.0] * 3
    per_point = []
    for xs in pts:
        a, b = _all_residuals(f, xs, rel_step * min(q - p for p, q in zip(xs, xs[1:])))
        null = [max(u, v) for u, v in zip(null, a)]
        ward = [max(u, v) for u, v in zip(ward, b)]
        per_point.append({"point": [float(x) for x in xs], "null_state": a, "ward": b})
    hs = sorted(h_sweep, reverse=True)
    report = ResidualReport(null, ward, list(hs), per_point=per_point)
    if not hs or math.log10(hs[0] / hs[-1]) < MIN_SWEEP_DECADES - 1e-9:
        report.order_note = f"sweep spans fewer than {MIN_SWEEP_DECADES:g} decades; no order fitted"
        return report
    fit_pts = pts if order_points is None else pts[:order_points]
    with mpmath.workdps(ORDER_FIT_DPS):
        table = np.zeros((len(hs), n + 3))
        for xs in fit_pts:
            mx = tuple(mpmath.mpf(x) for x in xs)
            gap = min(q - p for p, q in zip(mx, mx[1:]))
            for i, rel in enumerate(hs):
                a, b = _all_residuals(f, mx, mpmath.mpf(rel) * gap)
                table[i] = np.maximum(table[i], a + b)
    floor = 10.0 ** (-(ORDER_FIT_DPS - ORDER_FIT_FLOOR_MARGIN))
    report.convergence_order = [_fit_order(hs, table[:, c], floor) for c in range(n + 3)]
    report.order_note = (f"orders from {len(fit_pts)} point(s) at {ORDER_FIT_DPS} digits; entries are "
                         "the null-state PDEs then the three Ward identities; None means the residual "
                         f"stayed below {floor:.0e} (exact to working precision) at most steps")
    return report


def growth_bound_probe(f: SolutionHandle, p: float, c: float, pts) -> bool:
    """True iff ``|F(x)| <= c * prod_{i<j} |x_j - x_i|^(+-p)`` on every point.

    The exponent is ``-p`` for pairs closer than 1 and ``+p`` otherwise, so
    the bound allows power-law blow-up at collisions and power-law growth at
    infinity.
    """
    for pt in pts:
        xs = _coords(pt)
        log_bound = math.log(c) if c > 0 else -math.inf
        for i in range(len(xs)):
            for j in range(i + 1, len(xs)):
                g = float(xs[j] - xs[i])
                log_bound += (-p if g < 1 else p) * math.log(g)
        val = abs(float(f(xs)))
        if val == 0:
            continue
        if not math.log(val) <= log_bound:
            return False
    return True


def random_points(n_pairs: int, count: int, seed: int = 0, min_gap: float = 0.5,
                  max_gap: float = 2.0, start=(0.5, 1.5)) -> list[tuple]:
    """Increasing configurations with gaps uniform in ``[min_gap, max_gap]``.

    The first coordinate is drawn from ``start`` (positive by default, so that
    sums of coordinates do not vanish by accident).
    """
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        x = rng.uniform(*start)
        xs = [x]
        for _ in range(2 * n_pairs - 1):
            x += rng.uniform(min_gap, max_gap)
            xs.append(x)
        out.append(tuple(float(v) for v in xs))
    return out


def growth_probe_points(n_pairs: int, seed: int = 0, count: int = 50,
                        gap_range=(1e-4, 1e4)) -> list[tuple]:
    """Configurations mixing near collisions and wide separations (log-uniform gaps)."""
    rng = np.random.default_rng(seed)
    lo, hi = math.log(gap_range[0]), math.log(gap_range[1])
    out = []
    for _ in range(count):
        gaps = np.exp(rng.uniform(lo, hi, 2 * n_pairs - 1))
        xs = np.concatenate([[0.0], np.cumsum(gaps)])
        out.append(tuple(float(v) for v in xs))
    return out
