"""Collapse limits of solution handles and the dual vector built from them.

Interval collapse of ``(x_i, x_{i+1})``: put ``x_{i+1} = x_i + delta`` and
extrapolate ``H(delta) = delta^(6/kappa - 1) F`` to ``delta -> 0``.

Outer collapse of the outermost pair: put it at ``(c - R, c + R)`` around the
midpoint ``c`` of the other coordinates and extrapolate
``(2R)^(6/kappa - 1) F`` to ``R -> infinity``.

Near a collision a solution is a sum of two Frobenius series, with leading
powers ``1 - 6/kappa`` (identity channel) and ``2/kappa`` (two-leg channel).
``H`` therefore expands in ``delta^n`` and ``delta^(q + n)`` with
``q = 8/kappa - 1``.  When ``q`` is an integer the two series overlap and
``delta^e log(delta)`` terms can appear.  Both cases are removed by a
Richardson table on a geometric ladder (ratio 1/2): each column eliminates
one known exponent, and a repeated exponent also removes the matching log
term.  The reported value is the table entry with the smallest error, where
the error of an entry is the larger of its self-consistency (distance to its
neighbours in the table) and the rounding noise of the samples as amplified
by the table; that error is the reported ``stderr``.  In a sequence of
collapses each step's relative error is fed to the next step as sample
noise.  The same machinery, in ``1/R``, serves the outer collapse.

The leading power of ``F`` itself (``exponent_fit``) is extrapolated the
same way from the local log-log slopes of the ladder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import diagrams as dg
from .solutions import Claims, SolutionHandle, _coords
from .specfun import ConvergenceError, DomainError, ParameterError

LEVELS = 12
RATIO = 0.5
DELTA_FRACTION = 1.0 / 8.0  # delta_0 = gap / 8
MAX_DELTA_FRACTION = 0.25
OUTER_SPAN_FACTOR = 8.0  # R_0 = 8 * span of the remaining coordinates
MAX_LADDER = 10
CONVERGENCE_RTOL = 1e-4
CONVERGENCE_ATOL = 1e-12  # ladders at roundoff level count as converged to zero
ZERO_RTOL = 1e-7
EXPONENT_TOL = 0.02
SAMPLE_NOISE = 4 * np.finfo(float).eps  # relative rounding noise of a closed-form evaluation
MAX_DUAL_N = 4

TWO_LEG = "two_leg"
IDENTITY = "identity"
MIXED = "mixed"
UNDEFINED = "undefined"


class ClassificationError(ArithmeticError):
    def __init__(self, msg, diagnostics=None):
        super().__init__(msg)
        self.diagnostics = diagnostics or {}


@dataclass
class CollapseResult:
    value: float
    exponent_fit: float
    stderr: float
    deltas_used: list
    samples: list = field(default_factory=list)  # the scaled values H on the ladder
    kind: str = dg.INTERVAL

    @property
    def scale(self) -> float:
        return max((abs(v) for v in self.samples), default=0.0)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "value": self.value, "exponent_fit": self.exponent_fit,
                "stderr": self.stderr, "deltas_used": list(self.deltas_used),
                "samples": list(self.samples)}


# ---------------------------------------------------------------------------
# extrapolation


def _q(kappa) -> float:
    return 8.0 / float(kappa) - 1.0


def _is_integer(x: float, tol: float = 1e-9) -> bool:
    return abs(x - round(x)) < tol


def exponent_ladder(kappa, mixed_powers: bool = False, count: int = MAX_LADDER) -> list[float]:
    """Correction exponents of ``H`` (or of log-slopes of ``F`` if ``mixed_powers``).

    ``H`` carries ``n`` and ``q + n``; a log-slope also carries products,
    ``m q + n``.  Exponents that coincide only when ``q`` is an integer are
    doubled so the table also removes the accompanying ``log`` terms.
    """
    q = _q(kappa)
    ms = range(0, count + 1) if mixed_powers else (0, 1)
    raw = sorted(m * q + n for m in ms for n in range(0, count + 1) if (m, n) != (0, 0))
    out: list[float] = []
    for e in raw:
        if out and abs(e - out[-1]) < 1e-9 and not _is_integer(q):
            continue
        out.append(e)
    return out[:count]


def richardson(values, ratio, exponents, noise=0.0):
    """Extrapolate ``values[k] ~ L + sum_e c_e h_k^e`` with ``h_k = h_0 ratio^k`` to ``h -> 0``.

    ``noise`` is the absolute rounding noise of each value.  Column ``m``
    amplifies it by ``prod (1 + r^e) / (1 - r^e)``; the column returned is
    the one whose larger of truncation and noise error is smallest.
    Returns ``(estimate, error_estimate, column)``.
    """
    col = [float(v) for v in values]
    gain = 1.0
    first = abs(col[-1] - col[-2]) if len(col) > 1 else math.inf
    best = (col[-1], max(first, noise), 0)
    for m, e in enumerate(exponents, 1):
        if len(col) < 3:
            break
        f = ratio**e
        gain *= (1.0 + f) / (1.0 - f)
        new = [(col[k + 1] - f * col[k]) / (1.0 - f) for k in range(len(col) - 1)]
        err = max(abs(new[-1] - new[-2]), abs(new[-1] - col[-1]), gain * noise)
        if err < best[1]:
            best = (new[-1], err, m)
        col = new
    return best


def _slope_fit(samples, base_power, ratio, kappa):
    """Leading power of the raw function from the ladder of ``H`` values."""
    logs = []
    for a, b in zip(samples, samples[1:]):
        if a == 0 or b == 0 or (a > 0) != (b > 0):
            return float("nan")
        logs.append(base_power + math.log(b / a) / math.log(ratio))
    if len(logs) < 2:
        return logs[0] if logs else float("nan")
    return richardson(logs, ratio, exponent_ladder(kappa, mixed_powers=True))[0]


def _finish(samples, steps, kappa, kind, base_power, label, rel_noise=SAMPLE_NOISE):
    arr = np.asarray(samples, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ConvergenceError(f"{label}: non-finite scaled values on the ladder",
                               partial_sum=list(samples), terms=len(samples))
    scale = float(np.max(np.abs(arr)))
    if scale == 0.0:
        return CollapseResult(0.0, float("nan"), 0.0, list(steps), list(samples), kind)
    value, err, _ = richardson(samples, RATIO, exponent_ladder(kappa), noise=rel_noise * scale)
    if err > max(CONVERGENCE_RTOL * scale, CONVERGENCE_ATOL):
        raise ConvergenceError(
            f"{label}: limit does not stabilize (error estimate {err:.3g} vs scale {scale:.3g})",
            partial_sum=value, terms=len(samples))
    expo = _slope_fit(samples, base_power, RATIO, kappa)
    return CollapseResult(value, expo, err, list(steps), list(samples), kind)


# ---------------------------------------------------------------------------
# single collapses


def _split_point(f: SolutionHandle, i: int, base_pt, anchor):
    """Coordinates other than the collapsing pair, and the left endpoint of the pair."""
    n = f.arity
    if not 1 <= i < n:
        raise ParameterError(f"interval index i must lie in 1..{n - 1}")
    xs = tuple(base_pt.coords if hasattr(base_pt, "coords") else base_pt)
    if len(xs) == n:
        xs = _coords(xs)
        others = xs[: i - 1] + xs[i + 1:]
        return others, (xs[i - 1] if anchor is None else anchor)
    if len(xs) != n - 2:
        raise ParameterError(f"base point needs {n} or {n - 2} coordinates, got {len(xs)}")
    others = _coords(xs) if xs else ()
    lo = others[i - 2] if i >= 2 else None
    hi = others[i - 1] if i - 1 < len(others) else None
    if anchor is not None:
        if (lo is not None and not anchor > lo) or (hi is not None and not anchor < hi):
            raise DomainError(f"anchor {anchor} does not lie between its neighbours")
        return others, anchor
    if lo is not None and hi is not None:
        return others, 0.5 * (lo + hi)
    if not others:
        return others, 0.0
    width = (others[-1] - others[0]) if len(others) > 1 else 1.0
    return others, (others[0] - width if lo is None else others[-1] + width)


def collapse_interval(f: SolutionHandle, i: int, base_pt, anchor=None, delta0=None,
                      levels: int = LEVELS, rel_noise: float = SAMPLE_NOISE) -> CollapseResult:
    """Limit of ``(x_{i+1} - x_i)^(6/kappa - 1) F`` as ``x_{i+1} -> x_i`` (``i`` is 1-based).

    ``base_pt`` is either a full point (its ``x_i`` is kept, its ``x_{i+1}``
    ignored) or the reduced point without the pair, in which case the pair
    sits at ``anchor`` (default: midway between its neighbours).
    """
    others, x0 = _split_point(f, i, base_pt, anchor)
    dist = [abs(x0 - y) for y in others]
    gap = min(dist) if dist else 1.0
    if gap <= 0:
        raise DomainError("collapse point coincides with another coordinate")
    d0 = DELTA_FRACTION * gap if delta0 is None else delta0
    if not 0 < d0 <= MAX_DELTA_FRACTION * gap:
        raise DomainError(f"delta_0 = {d0} exceeds a quarter of the gap {gap}")
    power = 1.0 - 6.0 / float(f.kappa)
    head, tail = others[: i - 1], others[i - 1:]
    deltas, samples = [], []
    for k in range(levels):
        d = d0 * RATIO**k
        deltas.append(d)
        samples.append(d ** (-power) * f.evaluator(head + (x0, x0 + d) + tail))
    return _finish(samples, deltas, f.kappa, dg.INTERVAL, power,
                   f"interval collapse ({i}, {i + 1}) of {f.label}", rel_noise)


def collapse_outer(f: SolutionHandle, base_pt=(), R0=None, levels: int = LEVELS,
                   rel_noise: float = SAMPLE_NOISE) -> CollapseResult:
    """Limit of ``(2R)^(6/kappa - 1) F`` with the first and last coordinates at ``c -+ R``.

    ``base_pt`` holds the inner ``2N - 2`` coordinates (a full point is also
    accepted; its first and last entries are then dropped).
    """
    n = f.arity
    xs = tuple(base_pt.coords if hasattr(base_pt, "coords") else base_pt)
    if len(xs) == n:
        xs = _coords(xs)[1:-1]
    if len(xs) != n - 2:
        raise ParameterError(f"base point needs {n - 2} inner coordinates, got {len(xs)}")
    inner = _coords(xs) if xs else ()
    c = 0.5 * (inner[0] + inner[-1]) if inner else 0.0
    span = (inner[-1] - inner[0]) if len(inner) > 1 else 0.0
    r0 = (OUTER_SPAN_FACTOR * span if span > 0 else 1.0) if R0 is None else R0
    if inner and not r0 > 2 * span:
        raise DomainError(f"R_0 = {r0} must exceed twice the span {span}")
    power = 1.0 - 6.0 / float(f.kappa)
    radii, samples = [], []
    for k in range(levels):
        R = r0 / RATIO**k
        radii.append(R)
        samples.append((2 * R) ** (-power) * f.evaluator((c - R,) + inner + (c + R,)))
    # expansion variable is 1/R; exponents of F are reported as powers of 2R
    res = _finish(samples, [1.0 / r for r in radii], f.kappa, dg.OUTER, -power,
                  f"outer collapse of {f.label}", rel_noise)
    res.exponent_fit = -res.exponent_fit if math.isfinite(res.exponent_fit) else res.exponent_fit
    res.deltas_used = radii
    return res


# ---------------------------------------------------------------------------
# collapsed handles


@dataclass(frozen=True)
class CollapsedHandle(SolutionHandle):
    parent: SolutionHandle | None = None
    collapsed_arcs: tuple = ()


def _interval_reduced(h: SolutionHandle, pos: int, anchor=None) -> CollapsedHandle:
    """Handle on the remaining coordinates after collapsing positions ``pos, pos + 1`` (1-based)."""

    def ev(ys):
        a = anchor
        if a is not None:
            lo = ys[pos - 2] if pos >= 2 else -math.inf
            hi = ys[pos - 1] if pos - 1 < len(ys) else math.inf
            if not lo < a < hi:
                a = None
        return collapse_interval(h, pos, tuple(ys), anchor=a).value

    return CollapsedHandle(h.n_pairs - 1, h.kappa, ev, f"interval[{pos},{pos + 1}]({h.label})",
                           Claims(h.claims.satisfies_null_state, h.claims.satisfies_ward, None),
                           None, h, (("interval", pos),))


def _outer_reduced(h: SolutionHandle) -> CollapsedHandle:
    def ev(ys):
        return collapse_outer(h, tuple(ys)).value

    return CollapsedHandle(h.n_pairs - 1, h.kappa, ev, f"outer({h.label})",
                           Claims(h.claims.satisfies_null_state, h.claims.satisfies_ward, None),
                           None, h, (("outer", 1),))


def collapsed_handle(f: SolutionHandle, i: int | None = None, kind: str = dg.INTERVAL,
                     anchor=None) -> CollapsedHandle:
    """The reduced element obtained by collapsing interval ``i`` (or the outer pair)."""
    if f.n_pairs < 1:
        raise ParameterError("nothing left to collapse")
    if kind == dg.INTERVAL:
        return _interval_reduced(f, i, anchor)
    if kind == dg.OUTER:
        return _outer_reduced(f)
    raise ParameterError(f"unknown collapse kind {kind!r}")


# ---------------------------------------------------------------------------
# sequences and dual vectors


@dataclass
class SequenceResult:
    value: float
    stderr: float
    steps: list

    def to_dict(self) -> dict:
        return {"value": self.value, "stderr": self.stderr, "steps": self.steps}


def apply_sequence_detailed(f: SolutionHandle, s: dg.LimitSequence, anchor) -> SequenceResult:
    verdict = dg.validate_sequence(s)
    if not verdict:
        raise ParameterError(f"invalid limit sequence: {verdict.rule} (step {verdict.step})")
    if s.diagram.n_pairs != f.n_pairs:
        raise ParameterError("sequence and handle disagree on N")
    xs = _coords(anchor)
    labels = list(range(1, f.arity + 1))  # original indices still present
    coords = dict(zip(labels, xs))
    h = f
    stderr = 0.0
    noise = SAMPLE_NOISE  # relative error of the values fed to the next ladder
    steps = []
    for k, ((a, b), kind) in enumerate(zip(s.arcs(), s.kinds)):
        pa, pb = labels.index(a) + 1, labels.index(b) + 1
        here = tuple(coords[lab] for lab in labels)
        try:
            if kind == dg.INTERVAL:
                if pb != pa + 1:
                    raise ParameterError(f"arc {(a, b)} is not adjacent at step {k}")
                res = collapse_interval(h, pa, here, rel_noise=noise)
                nxt = collapsed_handle(h, pa, dg.INTERVAL, anchor=coords[a])
            else:
                if not (pa == 1 and pb == len(labels)):
                    raise ParameterError(f"arc {(a, b)} is not outermost at step {k}")
                res = collapse_outer(h, here, rel_noise=noise)
                nxt = collapsed_handle(h, kind=dg.OUTER)
        except ConvergenceError as exc:
            err = ConvergenceError(f"step {k} ({kind} of {(a, b)}): {exc}",
                                   partial_sum=exc.partial_sum, terms=exc.terms)
            err.step = k
            raise err from exc
        stderr += res.stderr
        noise = SAMPLE_NOISE + (res.stderr / res.scale if res.scale else 0.0)
        steps.append({"arc": [a, b], "kind": kind, "value_at_anchor": res.value, "stderr": res.stderr})
        labels = [lab for lab in labels if lab not in (a, b)]
        h = nxt
    return SequenceResult(res.value, stderr, steps)


def apply_sequence(f: SolutionHandle, s: dg.LimitSequence, anchor) -> float:
    """The number obtained by applying every collapse of ``s`` in order."""
    return apply_sequence_detailed(f, s, anchor).value


def representative(d: dg.ArcDiagram) -> dg.LimitSequence:
    """A sequence for ``d`` with as few outer collapses as possible (ties: first found)."""
    seqs = dg.allowable_sequences(d)
    return min(seqs, key=lambda s: (s.kinds.count(dg.OUTER), s.kinds[-1] != dg.INTERVAL))


@dataclass
class DualVector:
    values: list
    stderr: list
    sequences: list

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, k):
        return self.values[k]

    def to_dict(self) -> dict:
        return {"values": self.values, "stderr": self.stderr,
                "sequences": [s.to_dict() for s in self.sequences]}


def dual_vector(f: SolutionHandle, anchor) -> DualVector:
    """``[L_s F]`` for one representative sequence per diagram, in lexicographic diagram order."""
    if f.n_pairs > MAX_DUAL_N:
        raise ParameterError(f"dual vector limited to N <= {MAX_DUAL_N}")
    xs = _coords(anchor)
    if len(xs) != f.arity:
        raise ParameterError(f"anchor needs {f.arity} coordinates")
    if min(b - a for a, b in zip(xs, xs[1:])) < 1:
        raise DomainError("anchor must be well separated (min gap >= 1)")
    values, errs, seqs = [], [], []
    for idx, d in enumerate(dg.enumerate_diagrams(f.n_pairs)):
        s = representative(d)
        try:
            r = apply_sequence_detailed(f, s, xs)
        except ConvergenceError as exc:
            raise ConvergenceError(f"diagram {idx} {d.pairs}: {exc}", exc.partial_sum, exc.terms) from exc
        values.append(r.value)
        errs.append(r.stderr)
        seqs.append(s)
    return DualVector(values, errs, seqs)


# ---------------------------------------------------------------------------
# classification


@dataclass
class Classification:
    label: str
    operational_label: str
    limit: float
    exponent_fit: float
    diagnostics: dict

    def to_dict(self) -> dict:
        return {"label": self.label, "operational_label": self.operational_label,
                "limit": self.limit, "exponent_fit": self.exponent_fit, "diagnostics": self.diagnostics}


def _label_one(res: CollapseResult, kappa) -> tuple[str, dict]:
    p_id = 1.0 - 6.0 / float(kappa)
    p_two = 2.0 / float(kappa)
    scale = res.scale
    zero = scale == 0.0 or abs(res.value) < ZERO_RTOL * scale
    e = res.exponent_fit
    diag = {"limit": res.value, "stderr": res.stderr, "scale": scale, "exponent_fit": e,
            "identity_power": p_id, "two_leg_power": p_two}
    if scale == 0.0:
        diag["note"] = "function vanishes on the whole ladder"
        return TWO_LEG, diag
    if zero and abs(e - p_two) <= EXPONENT_TOL:
        return TWO_LEG, diag
    if not zero and abs(e - p_id) <= EXPONENT_TOL:
        return IDENTITY, diag
    if not zero and p_id + EXPONENT_TOL < e < p_two - EXPONENT_TOL:
        return MIXED, diag
    raise ClassificationError(
        f"exponent {e:.4g} with limit {res.value:.3g} (scale {scale:.3g}) matches neither "
        f"channel ({p_id:.4g} identity, {p_two:.4g} two-leg) within {EXPONENT_TOL}", diag)


def _eight_over_kappa_integer(kappa) -> bool:
    r = Fraction(8) / Fraction(kappa).limit_denominator(10**9)
    return r.denominator == 1 and r > 0


def classify_interval(f: SolutionHandle, i: int, pts) -> Classification:
    """Channel of the interval ``(x_i, x_{i+1})`` over a sample of points.

    Rules: ``two_leg`` when the limit is zero (below ``1e-7`` times the
    largest scaled value) and the fitted power is ``2/kappa``; ``identity``
    when the limit is nonzero and the power is ``1 - 6/kappa``; ``mixed``
    when the limit is nonzero and the power lies strictly between the two;
    anything else raises ``ClassificationError``.  Every point must agree.

    When ``8/kappa`` is a positive integer the two powers differ by an
    integer and the identity channel is left undefined: such a result gets
    ``label = "undefined"`` with the numerical verdict kept in
    ``operational_label``.  Two-leg verdicts are kept at every kappa.
    """
    pts = list(pts)
    if not pts:
        raise ParameterError("need at least one sample point")
    labels, per_point = [], []
    for pt in pts:
        res = collapse_interval(f, i, pt)
        lab, diag = _label_one(res, f.kappa)
        labels.append(lab)
        per_point.append(diag)
    if len(set(labels)) != 1:
        raise ClassificationError(f"sample points disagree: {labels}", {"per_point": per_point})
    lab = labels[0]
    worst = max(per_point, key=lambda d: abs(d["exponent_fit"] - (d["two_leg_power"] if lab == TWO_LEG
                                                                   else d["identity_power"]))
                if math.isfinite(d["exponent_fit"]) else 0.0)
    diagnostics = {"per_point": per_point}
    final = lab
    if lab != TWO_LEG and _eight_over_kappa_integer(f.kappa):
        final = UNDEFINED
        diagnostics["reason"] = ("8/kappa is a positive integer: the two channel powers differ by an "
                                 "integer and the identity label is not defined")
    return Classification(final, lab, worst["limit"], worst["exponent_fit"], diagnostics)
