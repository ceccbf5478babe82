"""Monte Carlo crossing probabilities for critical percolation in rectangles.

Two lattices are supported:

``square_bond``
    Vertices ``(col, row)`` with ``col = 0..W`` and ``row = 0..H-1``.  Every
    horizontal bond between neighbouring columns and every vertical bond inside
    the interior columns ``1..W-1`` is open independently with probability
    ``p_open``.  Columns 0 and W are wired (merged into the left and right
    terminal).  With ``W = H`` this lattice is isomorphic to its own dual, so at
    ``p_open = 1/2`` the left-right crossing probability is exactly 1/2 at every
    size.  The continuum aspect ratio is ``W / H``.

``triangular_site``
    Sites ``(col, row)`` with ``col = 0..W-1`` and ``row = 0..H-1`` on a
    triangular lattice drawn with odd rows shifted half a spacing to the right.
    Interior sites are open with probability ``p_open``; the first and last
    columns are wired.  Rows are ``sqrt(3)/2`` apart, so the aspect ratio is
    ``(W - 1) / ((H - 1) * sqrt(3) / 2)``.

Random numbers: trial ``t`` of a batch seeded with ``seed`` draws all of its
bonds (sites) from ``PCG64(SeedSequence(seed, spawn_key=(t,)))``.  At
``p_open = 1/2`` each 64-bit word supplies 64 bonds (one bit each); otherwise
each bond consumes one word, compared as a 53-bit uniform.  Because streams are
keyed by trial index, results do not depend on chunking or thread count.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field

import numpy as np
import numba
from numba import njit, prange

from . import specfun

KINDS = ("square_bond", "triangular_site")
MAX_CELLS = 4_000_000
_CHUNK_WORDS = 1 << 21


@dataclass(frozen=True)
class LatticeSpec:
    kind: str
    width_cells: int
    height_cells: int
    p_open: float = 0.5

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown lattice kind {self.kind!r}; expected one of {KINDS}")
        if self.width_cells < 8 or self.height_cells < 8:
            raise ValueError("width_cells and height_cells must both be >= 8")
        if not 0.0 <= self.p_open <= 1.0:
            raise ValueError("p_open must lie in [0, 1]")
        if self.width_cells * self.height_cells > MAX_CELLS:
            raise ValueError(f"lattice larger than {MAX_CELLS} cells")

    @property
    def aspect_ratio(self) -> float:
        if self.kind == "square_bond":
            return self.width_cells / self.height_cells
        return (self.width_cells - 1) / ((self.height_cells - 1) * math.sqrt(3.0) / 2.0)

    @property
    def n_variables(self) -> int:
        """Number of random bonds (or sites) sampled per trial."""
        w, h = self.width_cells, self.height_cells
        if self.kind == "square_bond":
            return w * h + (w - 1) * (h - 1)
        return (w - 2) * h

    @classmethod
    def square(cls, height_cells: int, aspect_ratio: float, p_open: float = 0.5) -> "LatticeSpec":
        """Square bond lattice of the given height whose width best matches ``aspect_ratio``."""
        return cls("square_bond", int(round(aspect_ratio * height_cells)), height_cells, p_open)


@dataclass
class TrialBatch:
    spec: LatticeSpec
    n_trials: int
    seed: int
    crossings: int
    p_hat: float = field(init=False)
    stderr: float = field(init=False)

    def __post_init__(self):
        if not 0 <= self.crossings <= self.n_trials:
            raise ValueError("crossings must lie in [0, n_trials]")
        self.p_hat = self.crossings / self.n_trials if self.n_trials else float("nan")
        self.stderr = math.sqrt(self.p_hat * (1.0 - self.p_hat) / self.n_trials) if self.n_trials else float("nan")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["spec"]["aspect_ratio"] = self.spec.aspect_ratio
        return d


# ---------------------------------------------------------------------------
# union-find kernels
#
# Both lattices are swept column by column.  Only the partition of the current
# column into clusters (connected through the columns already swept) is kept.
# Label 0 is the wired left terminal, labels 1..H name clusters carried over
# from the previous column and H+1+r is a fresh cluster started at row r.  A
# closed site is -1.  Each step builds a small forest over those 2H+1 labels.
# Unions always hang the larger root under the smaller one, so a root is the
# minimum label of its set and the left terminal can never lose its root
# status.  Relabelling names every cluster after its lowest row (plus one),
# which needs no hash map and no data-dependent branch.


@njit(cache=True, inline="always")
def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]  # path halving
        x = parent[x]
    return x


@njit(cache=True, inline="always")
def _is_open(words, b, bitmode, threshold):
    if bitmode:
        return np.int64((words[b >> 6] >> np.uint64(b & 63)) & np.uint64(1))
    return np.int64((words[b] >> np.uint64(11)) < threshold)


@njit(cache=True, inline="always")
def _link(parent, a, b):
    ra = _find(parent, a)
    rb = _find(parent, b)
    if ra < rb:
        parent[rb] = ra
    elif rb < ra:
        parent[ra] = rb


@njit(cache=True, inline="always")
def _reset(parent, first, H):
    for k in range(2 * H + 1):
        parent[k] = k
        first[k] = H


@njit(cache=True, inline="always")
def _relabel(parent, labels, first, H):
    """Compact ``labels`` to 0 (left) or lowest row + 1; True if any touches the left."""
    for r in range(H):
        if labels[r] >= 0:
            root = _find(parent, labels[r])
            labels[r] = root
            first[root] = min(first[root], r)
    alive = 0
    for r in range(H):
        root = labels[r]
        if root >= 0:
            left = np.int64(root == 0)
            alive |= left
            labels[r] = (1 - left) * (first[root] + 1)
    return alive != 0


@njit(cache=True)
def _square_bond_crosses(words, W, H, bitmode, threshold, labels, parent, first):
    for r in range(H):
        labels[r] = 0
    b = 0
    for c in range(W - 1):
        _reset(parent, first, H)
        # horizontal bonds c -> c+1; a vertex without one starts a fresh cluster
        for r in range(H):
            bit = _is_open(words, b, bitmode, threshold)
            b += 1
            labels[r] = labels[r] * bit + (H + 1 + r) * (1 - bit)
        # vertical bonds of column c+1, merged branch-free along the column
        cur = _find(parent, labels[0])
        for r in range(1, H):
            bit = _is_open(words, b, bitmode, threshold)
            b += 1
            rb = _find(parent, labels[r])
            lo = min(cur, rb)
            hi = max(cur, rb)
            parent[hi] = hi + bit * (lo - hi)
            cur = rb + bit * (lo - rb)
        if not _relabel(parent, labels, first, H):
            return False
    # last column is wired to the right terminal
    for r in range(H):
        if _is_open(words, b, bitmode, threshold) and labels[r] == 0:
            return True
        b += 1
    return False


@njit(cache=True)
def _triangular_site_crosses(words, W, H, bitmode, threshold, labels, parent, first, old):
    for r in range(H):
        labels[r] = 0
    s = 0
    for c in range(1, W - 1):
        _reset(parent, first, H)
        for r in range(H):
            old[r] = labels[r]
            labels[r] = H + 1 + r if _is_open(words, s, bitmode, threshold) else -1
            s += 1
        for r in range(H):
            if labels[r] < 0:
                continue
            if old[r] >= 0:
                _link(parent, labels[r], old[r])
            # odd rows sit half a spacing right, so an even row in this column
            # also touches rows r-1 and r+1 of the previous column
            if r % 2 == 0:
                if r > 0 and old[r - 1] >= 0:
                    _link(parent, labels[r], old[r - 1])
                if r + 1 < H and old[r + 1] >= 0:
                    _link(parent, labels[r], old[r + 1])
            if r > 0 and labels[r - 1] >= 0:
                _link(parent, labels[r], labels[r - 1])
        if not _relabel(parent, labels, first, H):
            return False
    # every site of the wired last column neighbours (W-2, r)
    for r in range(H):
        if labels[r] == 0:
            return True
    return False


@njit(cache=True, parallel=True)
def _run_chunk(words, kind_code, W, H, bitmode, threshold, out):
    for t in prange(words.shape[0]):
        labels = np.empty(H, dtype=np.int64)
        parent = np.empty(2 * H + 1, dtype=np.int64)
        first = np.empty(2 * H + 1, dtype=np.int64)
        if kind_code == 0:
            out[t] = _square_bond_crosses(words[t], W, H, bitmode, threshold, labels, parent, first)
        else:
            old = np.empty(H, dtype=np.int64)
            out[t] = _triangular_site_crosses(words[t], W, H, bitmode, threshold, labels, parent,
                                              first, old)


# ---------------------------------------------------------------------------
# public API


def trial_words(seed: int, trial: int, n_words: int) -> np.ndarray:
    """The raw 64-bit stream owned by one trial."""
    bitgen = np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(trial,)))
    return bitgen.random_raw(n_words)


def _sampling_mode(p_open: float) -> tuple[bool, int]:
    if p_open == 0.5:
        return True, 0
    return False, min(int(p_open * 2.0**53), 2**53)


def _words_per_trial(spec: LatticeSpec, bitmode: bool) -> int:
    n = spec.n_variables
    return (n + 63) // 64 if bitmode else n


def usable_threads(threads: int | None) -> int:
    """Requested worker count clamped to numba's pool (None means the whole pool)."""
    pool = numba.config.NUMBA_NUM_THREADS
    if threads is None:
        return pool
    if threads < 1:
        raise ValueError("threads must be positive")
    return min(int(threads), pool)


def crossing_flags(spec: LatticeSpec, n_trials: int, seed: int, first_trial: int = 0,
                   threads: int | None = None) -> np.ndarray:
    """Boolean left-right crossing outcome for trials ``first_trial .. first_trial + n_trials - 1``."""
    previous = numba.get_num_threads()
    numba.set_num_threads(usable_threads(threads))
    try:
        return _crossing_flags(spec, n_trials, seed, first_trial)
    finally:
        numba.set_num_threads(previous)


def _crossing_flags(spec, n_trials, seed, first_trial):
    bitmode, threshold = _sampling_mode(spec.p_open)
    n_words = max(_words_per_trial(spec, bitmode), 1)
    kind_code = KINDS.index(spec.kind)
    chunk = max(1, _CHUNK_WORDS // n_words)
    out = np.zeros(n_trials, dtype=np.bool_)
    if spec.p_open == 0.0 or spec.p_open == 1.0:
        # degenerate probabilities need no randomness
        words = np.zeros((1, n_words), dtype=np.uint64)
        flag = np.zeros(1, dtype=np.bool_)
        _run_chunk(words, kind_code, spec.width_cells, spec.height_cells, False,
                   np.uint64(threshold), flag)
        out[:] = flag[0]
        return out
    buf = np.empty((chunk, n_words), dtype=np.uint64)
    for start in range(0, n_trials, chunk):
        stop = min(start + chunk, n_trials)
        for k in range(start, stop):
            buf[k - start] = trial_words(seed, first_trial + k, n_words)
        _run_chunk(buf[: stop - start], kind_code, spec.width_cells, spec.height_cells,
                   bitmode, np.uint64(threshold), out[start:stop])
    return out


def run_batch(spec: LatticeSpec, n_trials: int, seed: int, threads: int | None = None) -> TrialBatch:
    """Sample ``n_trials`` independent configurations and count left-right crossings."""
    if n_trials < 1:
        raise ValueError("n_trials must be positive")
    flags = crossing_flags(spec, n_trials, seed, threads=threads)
    return TrialBatch(spec, n_trials, seed, int(flags.sum()))


_CARDY_NORM = 3.0 * math.gamma(2.0 / 3.0) / math.gamma(1.0 / 3.0) ** 2


def aspect_ratio_of_parameter(m: float) -> float:
    """Rectangle aspect ratio ``K(1-m) / K(m)`` for the elliptic parameter ``m``."""
    return specfun.elliptic_k_complement(m) / specfun.elliptic_k(m)


MAX_ASPECT_RATIO = 200.0


def _parameter_pair(R: float, tol: float, max_iter: int) -> tuple[float, float]:
    # (m, 1 - m), each accurate in relative terms
    if not (R > 0 and math.isfinite(R)):
        raise ValueError("aspect ratio must be positive and finite")
    if R == 1.0:
        return 0.5, 0.5
    if R < 1.0:
        m, w = _parameter_pair(1.0 / R, tol, max_iter)
        return w, m
    if R > MAX_ASPECT_RATIO:
        raise ValueError(f"aspect ratio {R} above {MAX_ASPECT_RATIO}: parameter underflows")
    # for R > 1 the root is small (about 16 exp(-pi R)), so bisect on log m
    lo, hi = math.log(1e-300), math.log(0.5)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if aspect_ratio_of_parameter(math.exp(mid)) > R:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol:
            m = math.exp(0.5 * (lo + hi))
            return m, 1.0 - m
    raise ArithmeticError(f"bisection for m(R={R}) did not converge: log-bracket [{lo}, {hi}]")


def parameter_of_aspect_ratio(R: float, tol: float = 1e-13, max_iter: int = 400) -> float:
    """Invert ``R = K(1-m)/K(m)`` for ``m`` in (0, 1) by bisection.

    Ratios below 1 use the exact symmetry ``m(R) = 1 - m(1/R)``.
    """
    return _parameter_pair(R, tol, max_iter)[0]


def _cardy(m: float, w: float) -> float:
    a, b, c = 1.0 / 3.0, 2.0 / 3.0, 4.0 / 3.0
    if m <= 0.5:
        f = specfun.gauss_2f1(a, b, c, m)
    else:
        f = specfun.gauss_2f1_complement(a, b, c, w)
    return _CARDY_NORM * m ** (1.0 / 3.0) * f


def cardy_of_parameter(m: float) -> float:
    """Crossing probability as a function of the elliptic parameter ``m``."""
    if not 0.0 < m < 1.0:
        raise specfun.DomainError(f"elliptic parameter m = {m} outside (0, 1)")
    return _cardy(m, 1.0 - m)


def cardy_probability(R: float) -> float:
    """Continuum left-right crossing probability of a rectangle of aspect ratio ``R``."""
    return _cardy(*_parameter_pair(R, 1e-13, 400))


def compare(spec: LatticeSpec, n_trials: int, seed: int, threads: int | None = None) -> dict:
    """Run a batch and compare the estimate with the continuum prediction."""
    batch = run_batch(spec, n_trials, seed, threads)
    target = cardy_probability(spec.aspect_ratio)
    allowance = 2.0 / min(spec.width_cells, spec.height_cells)
    budget = max(3.0 * batch.stderr, allowance)
    diff = batch.p_hat - target
    z = diff / batch.stderr if batch.stderr > 0 else (0.0 if diff == 0 else math.copysign(math.inf, diff))
    report = {
        "batch": batch.to_dict(),
        "aspect_ratio": spec.aspect_ratio,
        "p_hat": batch.p_hat,
        "stderr": batch.stderr,
        "cardy": target,
        "z": z,
        "finite_size_allowance": allowance,
        "passed": abs(diff) < budget,
    }
    if not report["passed"] and allowance > 3.0 * batch.stderr:
        report["diagnostic"] = (
            f"|p_hat - cardy| = {abs(diff):.4g} exceeds the finite-size allowance "
            f"{allowance:.4g}; lattice too small for the continuum limit"
        )
    return report


def sweep_csv(reports: list[dict]) -> str:
    """CSV rows ``R, p_hat, stderr, cardy, z`` for a list of ``compare`` reports."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["R", "p_hat", "stderr", "cardy", "z"])
    for r in reports:
        writer.writerow([repr(float(r[k])) for k in ("aspect_ratio", "p_hat", "stderr", "cardy", "z")])
    return buf.getvalue()
