import math

import mpmath
import numpy as np
import pytest
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from nullstate.percolation import (LatticeSpec, aspect_ratio_of_parameter, cardy_of_parameter,
                                   cardy_probability, compare, crossing_flags, parameter_of_aspect_ratio,
                                   run_batch, sweep_csv, trial_words)
from nullstate.specfun import DomainError


def bits(words, n):
    return [(int(words[b >> 6]) >> (b & 63)) & 1 for b in range(n)]


def connected(n_nodes, edges, a, b):
    if not edges:
        return False
    i, j = np.array(edges).T
    g = coo_matrix((np.ones(len(i)), (i, j)), shape=(n_nodes, n_nodes))
    _, lab = connected_components(g, directed=False)
    return lab[a] == lab[b]


def square_oracle(words, W, H):
    """Independent crossing test: explicit graph with two terminal nodes."""
    b = bits(words, W * H + (W - 1) * (H - 1))
    node = lambda c, r: c * H + r  # noqa: E731
    left, right = (W + 1) * H, (W + 1) * H + 1
    edges = [(left, node(0, r)) for r in range(H)] + [(right, node(W, r)) for r in range(H)]
    k = 0
    for c in range(W - 1):
        for r in range(H):
            if b[k]:
                edges.append((node(c, r), node(c + 1, r)))
            k += 1
        for r in range(1, H):
            if b[k]:
                edges.append((node(c + 1, r - 1), node(c + 1, r)))
            k += 1
    for r in range(H):
        if b[k]:
            edges.append((node(W - 1, r), node(W, r)))
        k += 1
    return connected((W + 1) * H + 2, edges, left, right)


def triangular_oracle(words, W, H):
    b = bits(words, (W - 2) * H)
    open_ = lambda c, r: c in (0, W - 1) or b[(c - 1) * H + r]  # noqa: E731
    node = lambda c, r: c * H + r  # noqa: E731
    left, right = W * H, W * H + 1
    edges = [(left, node(0, r)) for r in range(H)] + [(right, node(W - 1, r)) for r in range(H)]
    for c in range(W):
        for r in range(H):
            if not open_(c, r):
                continue
            nbrs = [(c + 1, r), (c, r + 1)]
            nbrs += [(c + 1, r - 1), (c + 1, r + 1)] if r % 2 else []
            for cc, rr in nbrs:
                if 0 <= cc < W and 0 <= rr < H and open_(cc, rr):
                    edges.append((node(c, r), node(cc, rr)))
    return connected(W * H + 2, edges, left, right)


@pytest.mark.parametrize("W,H", [(8, 8), (13, 9), (9, 17)])
def test_square_kernel_matches_graph_oracle(W, H):
    spec = LatticeSpec("square_bond", W, H)
    flags = crossing_flags(spec, 150, seed=3)
    n_words = (spec.n_variables + 63) // 64
    want = [square_oracle(trial_words(3, t, n_words), W, H) for t in range(150)]
    assert flags.tolist() == want
    assert 0 < sum(want) < 150


@pytest.mark.parametrize("W,H", [(8, 8), (12, 9), (9, 14)])
def test_triangular_kernel_matches_graph_oracle(W, H):
    spec = LatticeSpec("triangular_site", W, H)
    flags = crossing_flags(spec, 150, seed=4)
    n_words = (spec.n_variables + 63) // 64
    want = [triangular_oracle(trial_words(4, t, n_words), W, H) for t in range(150)]
    assert flags.tolist() == want


def test_degenerate_probabilities():
    assert run_batch(LatticeSpec("square_bond", 20, 10, 1.0), 50, 1).p_hat == 1
    assert run_batch(LatticeSpec("square_bond", 20, 10, 0.0), 50, 1).p_hat == 0
    assert run_batch(LatticeSpec("triangular_site", 20, 10, 1.0), 50, 1).p_hat == 1


def test_off_critical_word_mode_is_sensible():
    lo = run_batch(LatticeSpec("square_bond", 40, 40, 0.35), 500, 1).p_hat
    hi = run_batch(LatticeSpec("square_bond", 40, 40, 0.65), 500, 1).p_hat
    assert lo < 0.05 and hi > 0.95


def test_determinism_and_threads():
    spec = LatticeSpec.square(24, 1.5)
    a = run_batch(spec, 3000, 99)
    assert run_batch(spec, 3000, 99) == a
    assert run_batch(spec, 3000, 99, threads=1).crossings == a.crossings
    assert run_batch(spec, 3000, 99, threads=8).crossings == a.crossings
    assert run_batch(spec, 3000, 100).crossings != a.crossings
    full = crossing_flags(spec, 40, 5)
    assert crossing_flags(spec, 15, 5, first_trial=20).tolist() == full[20:35].tolist()


def test_trial_words_are_pcg64_streams():
    ref = np.random.PCG64(np.random.SeedSequence(7, spawn_key=(3,))).random_raw(5)
    assert trial_words(7, 3, 5).tolist() == ref.tolist()


def test_self_duality_small_lattice():
    b = run_batch(LatticeSpec("square_bond", 16, 16), 100_000, 2024)
    assert abs(b.p_hat - 0.5) < 3 * b.stderr


def test_monotone_in_aspect_ratio():
    ps = [run_batch(LatticeSpec.square(32, r), 100_000, 8) for r in (0.5, 1, 2, 4)]
    for a, b in zip(ps, ps[1:]):
        assert b.p_hat < a.p_hat + 3 * math.hypot(a.stderr, b.stderr)


def test_triangular_against_cardy():
    # (W-1) / ((H-1) sqrt(3)/2) close to 1
    spec = LatticeSpec("triangular_site", 33, 38)
    b = run_batch(spec, 20_000, 5)
    assert abs(b.p_hat - cardy_probability(spec.aspect_ratio)) < max(4 * b.stderr, 2 / 33)


def test_spec_guards():
    for args in (("hex", 10, 10), ("square_bond", 7, 10), ("square_bond", 10, 10, 1.2),
                 ("square_bond", 4000, 2000)):
        with pytest.raises(ValueError):
            LatticeSpec(*args)
    with pytest.raises(ValueError):
        run_batch(LatticeSpec("square_bond", 10, 10), 0, 1)


def test_batch_statistics():
    b = run_batch(LatticeSpec("square_bond", 10, 10), 400, 1)
    assert b.stderr == pytest.approx(math.sqrt(b.p_hat * (1 - b.p_hat) / 400))
    assert b.to_dict()["spec"]["aspect_ratio"] == 1


# continuum formula


def m_of_ratio_theta_mp(R):
    """Oracle: the nome q = exp(-pi R) gives m = (theta2 / theta3)^4."""
    q = mpmath.exp(-mpmath.pi * R)
    return (mpmath.jtheta(2, 0, q) / mpmath.jtheta(3, 0, q)) ** 4


def m_of_ratio_theta(R):
    with mpmath.workdps(40):
        return float(m_of_ratio_theta_mp(R))


def cardy_mp(R):
    with mpmath.workdps(60):
        m = m_of_ratio_theta_mp(R)
        third = mpmath.mpf(1) / 3
        return float(3 * mpmath.gamma(2 * third) / mpmath.gamma(third) ** 2 * m ** third
                     * mpmath.hyp2f1(third, 2 * third, 4 * third, m))


def test_cardy_examples():
    assert cardy_probability(1) == pytest.approx(0.5, abs=1e-14)
    assert 0 < cardy_probability(2) < 0.5
    assert cardy_probability(2) == pytest.approx(0.17564689380065, abs=1e-10)
    vals = [cardy_probability(r) for r in np.linspace(1, 20, 40)]
    assert all(b < a for a, b in zip(vals, vals[1:])) and vals[-1] < 1e-8


@pytest.mark.parametrize("R", [0.05, 0.3, 0.5, 1, 1.7, 3, 8])
def test_cardy_against_theta_oracle(R):
    assert parameter_of_aspect_ratio(R) == pytest.approx(m_of_ratio_theta(R), rel=1e-10)
    assert cardy_probability(R) == pytest.approx(cardy_mp(R), rel=1e-10, abs=1e-15)


def test_cardy_duality_and_roundtrip():
    for R in np.geomspace(0.02, 50, 50):
        assert abs(cardy_probability(R) + cardy_probability(1 / R) - 1) < 1e-10
    for m in np.linspace(0.01, 0.99, 50):
        assert parameter_of_aspect_ratio(aspect_ratio_of_parameter(m)) == pytest.approx(m, abs=1e-10)


def test_cardy_domain():
    with pytest.raises(DomainError):
        cardy_of_parameter(1.0)
    with pytest.raises((DomainError, ValueError)):
        cardy_probability(-1)


def test_compare_report_and_csv():
    rep = compare(LatticeSpec("square_bond", 8, 8, 0.3), 1000, 1)
    assert not rep["passed"] and "finite-size" in rep["diagnostic"]
    rep = compare(LatticeSpec.square(32, 2), 4000, 1)
    assert set(rep) >= {"p_hat", "stderr", "cardy", "z", "passed"}
    lines = sweep_csv([rep]).strip().split("\n")
    assert lines[0] == "R,p_hat,stderr,cardy,z" and len(lines) == 2
