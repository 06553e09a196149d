"""Cylinder harmonics: certified intervals, harmonicity, product limits."""

from fractions import Fraction

import numpy as np
import pytest

from prodset_lab.boundary import (
    BoundaryCylinder,
    CylinderHarmonic,
    choi_effros_approx,
    collapsed_coordinate,
    escape_probability_exact,
    free_cylinder_harmonic,
    simulate_boundary_prefix_words,
    simulate_escape_line,
)
from prodset_lab.groups import FreeGroup
from prodset_lab.measures import SparseMeasure, harmonic_check

F2 = FreeGroup(2)
MU = SparseMeasure.uniform(F2, [(1,), (-1,), (2,), (-2,)])

A_WORD = (1,)
H_A = CylinderHarmonic(F2, A_WORD, depth=40)


def test_cylinder_validation():
    with pytest.raises(ValueError):
        BoundaryCylinder(())
    with pytest.raises(ValueError):
        BoundaryCylinder((1, -1))


def test_collapsed_coordinate():
    p = (-1,)
    assert collapsed_coordinate((-1,), p) == 0
    assert collapsed_coordinate((-1, 2), p) == 1
    assert collapsed_coordinate((), p) == -1
    assert collapsed_coordinate((1,), p) == -2
    assert collapsed_coordinate((2, 1), p) == -3
    assert collapsed_coordinate((-1, 2, 2, 1), p) == 3


def test_intervals_bracket_closed_form():
    # oracle: one-step (gambler's ruin) closed form on the collapsed line
    for depth in (6, 12, 40):
        h = CylinderHarmonic(F2, A_WORD, depth=depth)
        for c in range(-5, 6):
            exact = escape_probability_exact(2, c)
            lo, hi = h._low[c + depth], h._high[c + depth]
            assert lo <= exact <= hi
        assert h._high[depth] - h._low[depth] < Fraction(1, 3) ** (depth - 2)


def test_spec_values_certified():
    iv_e = H_A.interval(())
    assert iv_e.contains(Fraction(1, 4)) and iv_e.width <= Fraction(1, 10**6)
    iv_a = H_A.interval((1,))
    assert iv_a.contains(Fraction(3, 4)) and iv_a.width <= Fraction(1, 10**6)
    iv_b = H_A.interval((2,))
    assert iv_b.contains(Fraction(1, 12))
    assert abs(H_A.value((1,)) - 0.75) < 1e-9

    one_call = free_cylinder_harmonic(F2, A_WORD, (1,), depth=40)
    assert one_call == iv_a


def test_small_depth_gives_wide_but_honest_interval():
    shallow = CylinderHarmonic(F2, A_WORD, depth=3)
    iv = shallow.interval((1,))
    assert iv.low <= Fraction(3, 4) <= iv.high
    assert iv.width > Fraction(1, 10**6)  # too shallow to certify 1e-6
    for g in [(1, 2, 1, 2), (-2, -2, -2, -2, 1)]:  # coordinates past depth 3
        c = collapsed_coordinate(F2.inv(g), (-1,))
        assert abs(c) > 3
        beyond = shallow.interval(g)
        assert beyond.low <= escape_probability_exact(2, c) <= beyond.high


def test_left_harmonicity_residual():
    rep = harmonic_check(H_A.value, MU, 4, tol=1e-9)
    assert rep.passed, f"residual {rep.residual}"


def test_cylinders_partition_boundary():
    harmonics = [CylinderHarmonic(F2, (s,), depth=40) for s in (1, -1, 2, -2)]
    for g in F2.ball(4):
        total = sum(h.value(g) for h in harmonics)
        assert abs(total - 1.0) < 1e-9


def test_escape_line_monte_carlo():
    # 10^6 walks; horizon misclassification <= 2 * (1/3)^25
    est = simulate_escape_line(2, start=0, n_walks=1_000_000, horizon=25, seed=7)
    sigma = (0.75 * 0.25 / 1_000_000) ** 0.5
    assert abs(est - 0.75) <= 3 * sigma + 2 * (1 / 3) ** 25


def test_full_word_monte_carlo():
    est = simulate_boundary_prefix_words(
        F2, start=(-1,), prefix=(-1,), n_walks=100_000, stop_margin=25, seed=11
    )
    sigma = (0.75 * 0.25 / 100_000) ** 0.5
    assert abs(est - 0.75) <= 3.5 * sigma


def test_choi_effros_constants():
    res = choi_effros_approx(lambda g: 1.0, lambda g: 1.0, MU, (), 6)
    for v in res.values:
        assert abs(v - 1.0) <= 1e-12


def test_choi_effros_same_cylinder_tends_to_mass():
    res = choi_effros_approx(H_A.value, H_A.value, MU, (), 10)
    assert abs(res.final - 0.25) < 0.02
    assert abs(res.final - 0.25) < abs(res.values[1] - 0.25)
    # Monte Carlo oracle for the same integrand
    rng = np.random.default_rng(3)
    letters = [(1,), (-1,), (2,), (-2,)]
    samples = []
    for _ in range(20_000):
        w = ()
        for s in rng.integers(0, 4, size=10):
            w = F2.mul_unchecked(w, letters[s])
        samples.append(H_A.value(w) ** 2)
    mc = float(np.mean(samples))
    se = float(np.std(samples) / len(samples) ** 0.5)
    assert abs(res.final - mc) <= 4 * se


def test_choi_effros_disjoint_cylinders_tend_to_zero():
    h_b = CylinderHarmonic(F2, (2,), depth=40)
    res = choi_effros_approx(H_A.value, h_b.value, MU, (), 10)
    assert res.final < 0.02
    assert res.final < res.values[0]
