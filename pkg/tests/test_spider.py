import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spidermax.spider import (Ball, MobiusPiece, PiecewiseMobius, SpiderPoint,
                              StepFunction, ball_measure, ball_trace,
                              integrate, integrate_over, level_measure,
                              lp_norm, lp_norm_report, measure)


def test_ball_traces():
    star = Ball.star(1, Fraction(4, 5), Fraction(3, 10))
    assert ball_trace(star, 2) == (0, Fraction(3, 10))
    assert ball_trace(star, 1) == (0, Fraction(4, 5))
    iv = Ball.interval(1, Fraction(1, 5), Fraction(1, 2))
    assert ball_trace(iv, 2) is None
    assert ball_trace(iv, 1) == (Fraction(1, 5), Fraction(1, 2))


def test_measure_examples():
    full = [[(0, 1)] for _ in range(3)]
    assert measure(full, 3) == 1
    star = Ball.star(1, Fraction(4, 5), Fraction(3, 10))
    assert ball_measure(star, 3) == Fraction(8, 10) + 2 * Fraction(3, 10) * Fraction(1, 3) == Fraction(7, 15)
    iv = Ball.interval(1, Fraction(1, 5), Fraction(1, 2))
    assert ball_measure(iv, 2) == Fraction(3, 20)


def test_measure_rejects_overlap():
    with pytest.raises(ValueError):
        measure([[(0, Fraction(1, 2)), (Fraction(1, 4), 1)]], 1)


@given(st.integers(1, 4), st.fractions(0, 1), st.fractions(min_value=Fraction(1, 100), max_value=2))
@settings(max_examples=60, deadline=None)
def test_ball_round_trip(ray, center, radius):
    ball = Ball.from_center_radius(ray, center, radius)
    b = min(center + radius, 1)
    t = min(max(radius - center, 0), 1)
    if ball.kind == "interval":
        assert t == 0 or radius <= center
        assert ball_trace(ball, ray) == (center - radius, b)
    else:
        assert ball_trace(ball, ray) == (0, b)
        other = ray % 4 + 1
        got = ball_trace(ball, other)
        assert (got or (0, 0))[1] == t


def test_step_function_validation():
    with pytest.raises(ValueError):
        StepFunction(1, (((0, Fraction(1, 2)), (1,)),))  # does not end at 1
    with pytest.raises(ValueError):
        StepFunction(1, (((0, 1, 1), (1, 2)),))  # not strictly increasing


def test_step_eval_right_continuous():
    f = StepFunction.radial(2, (0, Fraction(1, 2), 1), (3, 1))
    assert f.value_at(1, Fraction(1, 2)) == 1
    assert f.value_at(1, Fraction(49, 100)) == 3
    assert f.value_at(2, 1) == 1
    assert f(SpiderPoint(2, 0)) == 3


def test_integrate_examples():
    assert integrate(StepFunction.constant(Fraction(5, 2), 4)) == Fraction(5, 2)
    one_ray = StepFunction(2, (((0, 1), (1,)), ((0, 1), (0,))))
    assert integrate(one_ray) == Fraction(1, 2)
    for k in (1, 2, 5):
        ind = StepFunction.indicator(k, Fraction(3, 10))
        assert integrate(ind) == Fraction(3, 10)


def test_lp_norm_step_closed_form(rng):
    from conftest import rand_step
    for _ in range(25):
        f = rand_step(rng, rng.randint(1, 4))
        p = rng.choice((1.5, 2.0, 3.0))
        # Riemann check
        n = 4000
        total = 0.0
        for ray in range(1, f.k + 1):
            for i in range(n):
                x = (i + 0.5) / n
                total += abs(float(f.value_at(ray, x))) ** p / n
        assert lp_norm(f, p) == pytest.approx((total / f.k) ** (1 / p), abs=1e-3)


def test_lp_norm_constant():
    f = StepFunction.constant(-3.0, 2)
    assert lp_norm(f, 2.5) == pytest.approx(3.0, abs=1e-12)


def test_level_measure_step():
    f = StepFunction.radial(2, (0, Fraction(1, 2), 1), (2, 1))
    assert level_measure(f, Fraction(3, 2)) == Fraction(1, 2)
    assert level_measure(f, 2, strict=False) == Fraction(1, 2)
    assert level_measure(f, 2, strict=True) == 0
    assert level_measure(f, 5) == 0


def test_mobius_piece_and_level():
    # g = 1/(1+x) on [0,1]: {g > s} = [0, 1/s - 1)
    g = PiecewiseMobius(1, [[MobiusPiece(0, 1, 1, 0, 1, 1)]])
    assert g.value_at(1, 0) == 1
    assert g.value_at(1, 1) == 0.5
    assert level_measure(g, Fraction(2, 3)) == Fraction(1, 2)
    with pytest.raises(ValueError):
        level_measure(g, -1)
    assert g.superlevel(Fraction(1, 2), strict=False)[0] == [(0, 1)]


def test_level_measure_monotone_right_continuous(rng):
    from spidermax.maximal import compute
    from conftest import rand_step
    for _ in range(10):
        f = rand_step(rng, rng.randint(1, 3))
        g = compute(f)
        levels = sorted(rng.uniform(0, float(f.max_value()) + 0.5) for _ in range(8))
        vals = [level_measure(g, s) for s in levels]
        assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))
        for s in levels:  # right-continuity within float slop
            assert level_measure(g, s) == pytest.approx(
                level_measure(g, s + 1e-11), abs=1e-7)


def test_quadrature_error_report():
    g = PiecewiseMobius(1, [[MobiusPiece(0.0, 1.0, 1.0, 1.0, 1.0, 0.5)]])
    val, err = lp_norm_report(g, 2, tol=1e-12)
    # exact: int ((1+x)/(1+x/2))^2 dx on [0,1]
    import scipy.integrate as si
    ref = si.quad(lambda x: ((1 + x) / (1 + 0.5 * x)) ** 2, 0, 1)[0] ** 0.5
    assert val == pytest.approx(ref, abs=1e-10)
    assert err >= 0


def test_serialization_round_trip():
    f = StepFunction(2, (((Fraction(0), Fraction(1, 3), Fraction(1)), (Fraction(5, 2), Fraction(1, 7))),
                         ((Fraction(0), Fraction(1)), (Fraction(3),))))
    blob = json.dumps(f.to_json())
    g = StepFunction.from_json(json.loads(blob))
    assert g == f
    assert g.is_exact()


def test_integrate_over_region():
    f = StepFunction.radial(2, (0, Fraction(1, 2), 1), (2, 1))
    region = [[(Fraction(1, 4), Fraction(3, 4))], []]
    # on ray 1: 2 * 1/4 + 1 * 1/4 = 3/4, normalized by k = 2
    assert integrate_over(f, region) == Fraction(3, 8)
