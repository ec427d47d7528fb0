import numpy as np
import pytest

from otr import (
    Dataset,
    OracleLimits,
    ValidationError,
    constant_policy_values,
    exact_nonsmooth_argmax,
    nonsmooth_objective,
)

from conftest import random_instance, setting_data


def threshold_max(d):
    """Brute-force max for an intercept + one covariate design: all half-lines in x."""
    x = d.covariates[:, 1]
    s = 2.0 / d.n * (2 * d.treatment - 1) * d.outcome
    cuts = np.unique(x)
    mids = np.r_[cuts[0] - 1, (cuts[:-1] + cuts[1:]) / 2, cuts[-1] + 1]
    best = 0.0
    for t in mids:
        best = max(best, s[x > t].sum(), s[x < t].sum())
    return best


def test_two_point_hand_example():
    d = Dataset(np.array([[1.0], [-1.0]]), [1, 0], [3, 1], has_intercept=False, anchor_index=0)
    beta, value = exact_nonsmooth_argmax(d)
    assert value == 3.0
    np.testing.assert_array_equal(beta, [1.0])


def test_never_treat_is_optimal_when_treatment_hurts(rng):
    n = 15
    X = np.column_stack([np.ones(n), rng.standard_normal(n)])
    A = np.r_[np.ones(8), np.zeros(7)]
    Y = np.where(A == 1, -1.0, 1.0) * rng.uniform(0.5, 2.0, n)
    d = Dataset(X, A, Y)
    beta, value = exact_nonsmooth_argmax(d)
    assert value == 0.0
    assert nonsmooth_objective(d, beta) == 0.0


def test_matches_threshold_brute_force(rng):
    for _ in range(40):
        d = random_instance(rng, n=int(rng.integers(4, 30)), p=2)
        beta, value = exact_nonsmooth_argmax(d)
        assert value == pytest.approx(threshold_max(d), abs=1e-12)
        assert nonsmooth_objective(d, beta) == pytest.approx(value, abs=1e-12)
        assert abs(beta[1]) == 1.0 or not beta.any()


def test_dominates_random_directions(rng):
    for _ in range(10):
        d = random_instance(rng, n=20, p=2)
        _, value = exact_nonsmooth_argmax(d)
        B = rng.standard_normal((1000, 2)) * rng.choice([0.1, 1, 10], size=(1000, 1))
        assert max(nonsmooth_objective(d, b) for b in B) <= value + 1e-12


def test_three_columns_attained_and_dominant(rng):
    d = setting_data("s1", n=40, seed=1).drop_columns(["x3"])
    beta, value = exact_nonsmooth_argmax(d)
    assert nonsmooth_objective(d, beta) == pytest.approx(value, abs=1e-12)
    B = rng.standard_normal((5000, 3))
    assert max(nonsmooth_objective(d, b) for b in B) <= value + 1e-12


def test_limits():
    d = setting_data("s1", n=40, seed=1)
    with pytest.raises(ValidationError, match="p <= 3"):
        exact_nonsmooth_argmax(d)
    small = d.drop_columns(["x3"])
    with pytest.raises(ValidationError, match="n <= 10"):
        exact_nonsmooth_argmax(small, OracleLimits(max_n=10))
    with pytest.raises(ValidationError, match="budget"):
        exact_nonsmooth_argmax(small, OracleLimits(budget=100))
    assert OracleLimits().work(500, 3) == 124750 * 8 * 500


def test_constant_policies():
    X = np.column_stack([np.ones(4), [0.1, 0.2, 0.3, 0.4]])
    d = Dataset(X, [1, 0, 1, 0], [2.0, 2.0, 5.0, 5.0])
    all_, none, rand = constant_policy_values(d)
    assert all_ == none == rand == 3.5
    d2 = Dataset(X, [1, 0, 1, 0], [1.0, 2.0, 3.0, 7.0])
    all_, none, rand = constant_policy_values(d2)
    assert (all_, none) == (2.0, 4.5)
    assert rand == (all_ + none) / 2
    pi = np.array([0.25, 0.5, 0.5, 0.75])
    all_, none, _ = constant_policy_values(d2, pi)
    assert all_ == pytest.approx((1 / 0.25 + 3 / 0.5) / 4)
    assert none == pytest.approx((2 / 0.5 + 7 / 0.25) / 4)


def test_setting1_randomized_value_large_sample():
    d = setting_data("s1", n=200_000, seed=3)
    _, _, rand = constant_policy_values(d)
    assert rand == pytest.approx(-0.47, abs=0.03)
