import json
import random

import numpy as np
import pytest

from dataeff.curve import (
    CurveModel,
    EfficiencyPoint,
    _jacobian,
    _residual,
    average_points,
    evaluate,
    fit_curve,
    invert,
    points_from_csv,
    points_to_csv,
)
from dataeff.errors import CurveDomainError, FitError, UnreachableTargetError

# Canonical fixture curve used throughout: a=-27.26, b=0.35, c=97.79.
CANONICAL = CurveModel(-27.26, 0.35, 97.79, 0.0, 0, True, (1.0, 100.0))
POSITIVE_SIZES = (1, 2, 4, 7, 12, 21, 36, 60, 100)


def h(x, a=-27.26, b=0.35, c=97.79):
    return a / x**b + c


def noiseless_points(a=-27.26, b=0.35, c=97.79, xs=POSITIVE_SIZES):
    return [EfficiencyPoint(x, h(x, a, b, c)) for x in xs]


def test_fit_recovers_canonical_parameters():
    model = fit_curve(noiseless_points())
    assert abs(model.a - -27.26) / 27.26 < 1e-4
    assert abs(model.b - 0.35) / 0.35 < 1e-4
    assert abs(model.c - 97.79) / 97.79 < 1e-4
    assert model.converged
    assert model.well_formed
    assert model.fit_domain == (1.0, 100.0)


def test_fit_three_points_interpolates_exactly():
    points = [EfficiencyPoint(x, h(x, -10.0, 1.0, 90.0)) for x in (1, 10, 100)]
    model = fit_curve(points)
    assert model.sse < 1e-16
    assert model.a == pytest.approx(-10.0, rel=1e-9)
    assert model.b == pytest.approx(1.0, rel=1e-9)
    assert model.c == pytest.approx(90.0, rel=1e-9)


def test_fit_two_points_rejected():
    with pytest.raises(FitError):
        fit_curve([EfficiencyPoint(1, 70), EfficiencyPoint(100, 95)])


def test_fit_requires_distinct_positive_x():
    points = [
        EfficiencyPoint(1, 70, seed=0),
        EfficiencyPoint(1, 71, seed=1),
        EfficiencyPoint(2, 80),
        EfficiencyPoint(0, 10),
    ]
    with pytest.raises(FitError):
        fit_curve(points)


def test_fit_flat_data_degenerates():
    points = [EfficiencyPoint(x, 50.0) for x in (1, 5, 25, 100)]
    model = fit_curve(points)
    assert model.a == 0.0
    assert model.c == 50.0
    assert model.converged
    assert not model.well_formed


def test_fit_excludes_zero_points():
    with_zero = [EfficiencyPoint(0, 5.0)] + noiseless_points()
    without = noiseless_points()
    m1, m2 = fit_curve(with_zero), fit_curve(without)
    assert (m1.a, m1.b, m1.c) == (m2.a, m2.b, m2.c)


def test_fit_order_invariant():
    points = noiseless_points()
    shuffled = points[:]
    random.Random(5).shuffle(shuffled)
    m1, m2 = fit_curve(points), fit_curve(shuffled)
    assert abs(m1.a - m2.a) < 1e-6
    assert abs(m1.b - m2.b) < 1e-6
    assert abs(m1.c - m2.c) < 1e-6


def test_fit_duplication_invariant():
    points = noiseless_points()
    tripled = [p for p in points for _ in range(3)]
    m1, m2 = fit_curve(points), fit_curve(tripled)
    assert abs(m1.a - m2.a) < 1e-6
    assert abs(m1.b - m2.b) < 1e-6
    assert abs(m1.c - m2.c) < 1e-6


def test_fit_gradient_vanishes_on_noiseless_data():
    rng = np.random.default_rng(31337)
    for _ in range(10):
        a, b, c = rng.uniform(-40, -5), rng.uniform(0.1, 2), rng.uniform(60, 99)
        points = noiseless_points(a, b, c)
        model = fit_curve(points)
        xs = np.array([p.subset_percent for p in points], float)
        ys = np.array([p.exact_match for p in points], float)
        theta = np.array([model.a, model.b, model.c])
        grad = 2.0 * _jacobian(theta, xs).T @ _residual(theta, xs, ys)
        assert float(np.linalg.norm(grad)) < 1e-8


def test_jacobian_matches_central_differences():
    xs = np.array([1.0, 3.0, 12.0, 55.0, 100.0])
    for theta in ([-27.26, 0.35, 97.79], [-10.0, 1.2, 85.0], [-35.0, 0.12, 66.0]):
        theta = np.array(theta, dtype=float)
        jac = _jacobian(theta, xs)
        for j in range(3):
            step = np.zeros(3)
            step[j] = 1e-6 * max(1.0, abs(theta[j]))
            numeric = (
                _residual(theta + step, xs, np.zeros_like(xs))
                - _residual(theta - step, xs, np.zeros_like(xs))
            ) / (2 * step[j])
            scale = np.maximum(np.abs(jac[:, j]), 1e-12)
            assert np.max(np.abs(numeric - jac[:, j]) / scale) < 1e-5


def test_evaluate_canonical_values():
    assert evaluate(CANONICAL, 1.0) == pytest.approx(70.53, abs=1e-9)
    assert evaluate(CANONICAL, 7.0) == pytest.approx(83.9943700172168, abs=1e-9)
    assert evaluate(CANONICAL, 100.0) == pytest.approx(92.35091492939483, abs=1e-9)


def test_evaluate_pole_at_zero():
    with pytest.raises(CurveDomainError):
        evaluate(CANONICAL, 0.0)
    with pytest.raises(CurveDomainError):
        evaluate(CANONICAL, -3.0)


def test_evaluate_clamps_only_on_request():
    tall = CurveModel(-5.0, 0.5, 103.0, 0.0, 0, True, (1.0, 100.0))
    raw = evaluate(tall, 100.0)
    assert raw > 100.0
    assert evaluate(tall, 100.0, clamp=True) == 100.0


def test_invert_canonical_closed_form():
    # Closed-form oracle ((y - c) / a) ** (-1 / b) at full precision.
    assert invert(CANONICAL, 80.0).percent == pytest.approx(3.385097270466952, abs=1e-9)
    assert invert(CANONICAL, 90.0).percent == pytest.approx(35.83047402634006, abs=1e-9)
    assert not invert(CANONICAL, 80.0).exceeds_full_data


def test_invert_round_trip():
    y = evaluate(CANONICAL, 7.0)
    assert invert(CANONICAL, y).percent == pytest.approx(7.0, abs=1e-9)


def test_invert_above_asymptote():
    with pytest.raises(UnreachableTargetError) as exc:
        invert(CANONICAL, 98.0)
    assert "97.79" in str(exc.value)
    with pytest.raises(UnreachableTargetError):
        invert(CANONICAL, 97.79)  # the ceiling itself is never reached


def test_invert_flags_beyond_full_data():
    answer = invert(CANONICAL, 97.0)
    assert answer.exceeds_full_data
    assert answer.percent == pytest.approx(24774.01850968851, rel=1e-9)
    assert float(answer) == answer.percent


def test_invert_rejects_degenerate_models():
    with pytest.raises(CurveDomainError):
        invert(CurveModel(-10.0, 0.0, 90.0, 0.0, 0, True, (1.0, 100.0)), 80.0)
    with pytest.raises(CurveDomainError):
        invert(CurveModel(0.0, 1.0, 90.0, 0.0, 0, True, (1.0, 100.0)), 80.0)


def test_round_trip_property_over_random_models():
    rng = np.random.default_rng(777)
    for _ in range(50):
        model = CurveModel(
            a=float(rng.uniform(-40, -5)),
            b=float(rng.uniform(0.1, 2.0)),
            c=float(rng.uniform(60, 99)),
            sse=0.0, iterations=0, converged=True, fit_domain=(0.5, 100.0),
        )
        for x in np.linspace(0.5, 100.0, 23):
            x = float(x)
            back = invert(model, evaluate(model, x)).percent
            assert abs(back - x) < 1e-6 * x


def test_monotone_increasing_for_well_formed_models():
    rng = np.random.default_rng(4242)
    xs = rng.uniform(0.5, 100.0, size=(1000, 2))
    for lo, hi in np.sort(xs, axis=1):
        if lo == hi:
            continue
        assert evaluate(CANONICAL, float(lo)) < evaluate(CANONICAL, float(hi))


def test_average_points_pools_seeds():
    points = [
        EfficiencyPoint(1, 70, seed=0), EfficiencyPoint(1, 72, seed=1),
        EfficiencyPoint(2, 80, seed=0), EfficiencyPoint(2, 82, seed=1),
    ]
    averaged = average_points(points)
    assert [(p.subset_percent, p.exact_match) for p in averaged] == [(1, 71.0), (2, 81.0)]
    model_avg = fit_curve(points + [EfficiencyPoint(4, 85), EfficiencyPoint(7, 88)],
                          average_first=True)
    assert model_avg.iterations >= 0  # averaging path fits without error


def test_model_json_round_trip_full_precision():
    model = fit_curve(noiseless_points())
    again = CurveModel.from_json(model.to_json())
    assert again == model
    payload = json.loads(model.to_json())
    assert payload["a"] == model.a  # no rounding in serialized parameters


def test_points_csv_round_trip():
    points = [
        EfficiencyPoint(1, 70.5, seed=2, model_id="m", domain="weather"),
        EfficiencyPoint(12, 88.25, seed=3, model_id="m", domain="weather"),
    ]
    again = points_from_csv(points_to_csv(points))
    assert again == points


def test_points_csv_minimal_columns():
    points = points_from_csv("subset_percent,exact_match\n1,70\n12,88\n")
    assert points == [EfficiencyPoint(1, 70), EfficiencyPoint(12, 88)]
    with pytest.raises(FitError):
        points_from_csv("x,y\n1,70\n")


def test_point_validation():
    with pytest.raises(ValueError):
        EfficiencyPoint(-1, 50)
    with pytest.raises(ValueError):
        EfficiencyPoint(50, 101)


def test_fit_decreasing_data_flagged_not_well_formed():
    points = [EfficiencyPoint(x, h(x, 20.0, 0.5, 60.0)) for x in POSITIVE_SIZES]
    model = fit_curve(points)
    assert not model.well_formed
    assert model.a == pytest.approx(20.0, rel=1e-6)
    assert model.sse < 1e-12


def test_fit_nearly_flat_data_converges():
    points = [EfficiencyPoint(x, 50.0 + 1e-12 * x) for x in (1, 4, 16, 64)]
    model = fit_curve(points)
    assert model.converged
    assert model.sse < 1e-18
