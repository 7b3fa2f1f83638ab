import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from subspace_problem import geometry as geo
from subspace_problem.seq_space import SeqWeight, default_matrix, is_in_system, random_normalized_weight
from subspace_problem.weights import (
    AngularWeight, MinCombination, ProductWeight, floor_weight, lemma1_normalize,
    level_ratio, make_canonical_wbar, make_uk, make_wk, restriction_constant, sup_ratio,
    transfer_single_closed_form, weight_transfer_sup, wmax, wmin)


@pytest.fixture(scope="module")
def wks(families, matrix):
    return [make_wk(k, matrix, families) for k in range(1, 13)]


def test_wk_anchor_values(families, matrix, wks):
    for k in (1, 3, 7):
        w = wks[k - 1]
        for n in range(1, 13):
            lo, hi = families.plateau(n)
            for t in (lo, families.theta(n), hi):
                assert w(t) == matrix.value(n, k)
            assert w(families.shoulder(n)) == 1.0
        assert w(0.0) == 1.0 and w(math.pi) == 1.0


def test_wk_midpoint_between_plateau_and_shoulder(families, matrix, wks):
    # halfway from the right edge of I_n to s_n the weight is (lam + 1)/2
    w = wks[1]
    for n in (2, 4, 8):
        hi = families.plateau(n)[1]
        mid = 0.5 * (hi + families.shoulder(n))
        assert w(mid) == pytest.approx(0.5 * (matrix.value(n, 2) + 1.0), rel=1e-14)


def test_wk_example_n2(families, matrix, wks):
    # n = 2 is the pair (1, 2), so lam_{2k} = 1/2 for every k
    assert wks[0](families.theta(2)) == 0.5
    assert wks[4](families.theta(2)) == 0.5


def test_wk_decreasing_in_level(wks):
    theta = np.linspace(0, math.pi, 50_001)
    vals = np.stack([w(theta) for w in wks])
    assert np.all(np.diff(vals, axis=0) <= 0)
    assert np.all(vals <= 1.0) and np.all(vals > 0)


def test_combine_exact_min_max():
    f = AngularWeight(np.array([0.0, 1.0, 2.0]), np.array([0.1, 1.0, 0.1]))
    g = AngularWeight(np.array([0.0, 2.0]), np.array([0.6, 0.4]))
    t = np.linspace(0, 2, 20001)
    assert np.max(np.abs(wmin(f, g)(t) - np.minimum(f(t), g(t)))) < 1e-14
    assert np.max(np.abs(wmax(f, g)(t) - np.maximum(f(t), g(t)))) < 1e-14


def test_sup_ratio_exact():
    f = AngularWeight(np.array([0.0, 1.0, 2.0]), np.array([1.0, 3.0, 1.0]))
    g = AngularWeight(np.array([0.0, 2.0]), np.array([1.0, 2.0]))
    t = np.linspace(0, 2, 200001)
    assert sup_ratio(f, g) == pytest.approx(np.max(f(t) / g(t)), rel=1e-9)


def test_weight_json_roundtrip(wks):
    back = AngularWeight.from_dict(wks[2].to_dict())
    assert np.array_equal(back.thetas, wks[2].thetas)


@pytest.fixture(scope="module")
def normalizer_inputs(families, matrix, wks):
    rng = np.random.default_rng(11)
    canon = [make_canonical_wbar(random_normalized_weight(matrix, rng), families) for _ in range(5)]
    return [wks[1], wks[4]] + canon


def test_normalizer_properties(families, matrix, wks, normalizer_inputs):
    z = geo.sample_g1(10_000, seed=12)
    floor = floor_weight(families, 12)
    for wp in normalizer_inputs:
        res = lemma1_normalize(wp, families, matrix, wks[0])
        wb = res.weight.at(z)
        assert np.all(res.constant * wp.at(z) <= wb)
        assert np.all(wb <= 1.0)
        assert np.all(floor.at(z) <= wb)
        for n in range(1, 13):
            pts = geo.sample_disc(n, 200, seed=n)
            assert np.all(res.weight.at(pts) == res.lam(n))
            assert res.lam(n) >= 1.0 / n**2
        assert is_in_system(res.lam, matrix)


def test_normalizer_fixes_normalized_wk(families, matrix, wks):
    # w_k is already between w'' and w_1 and constant on the discs
    res = lemma1_normalize(wks[2], families, matrix, wks[0])
    theta = np.linspace(0, math.pi, 30_001)
    assert np.array_equal(res.weight(theta), wks[2](theta))
    assert res.constant == 1.0


def test_normalizer_rejects_callables(families, matrix, wks):
    with pytest.raises(TypeError):
        lemma1_normalize(lambda t: 1.0, families, matrix, wks[0])


def test_canonical_rejects_unnormalized(families):
    with pytest.raises(ValueError):
        make_canonical_wbar(SeqWeight(np.array([2.0, 1.0])), families)


@pytest.mark.parametrize("k,expected", [(1, 1.0), (2, 4 ** -0.25), (3, 5 ** -(1 / 3))])
def test_uk_constant_far_out(k, expected):
    u = make_uk(k)
    assert u(0.75j, k + 1.0) == pytest.approx(expected, rel=1e-14)
    assert restriction_constant(k) == pytest.approx(1.0 / expected, rel=1e-14)


def test_uk_documented_values():
    assert make_uk(2)(0.75j, 3.0) == pytest.approx(0.70711, abs=5e-6)
    # d(0.75i) = 0.25, so u_2 = (1 + 4)^(-1/4) at t = 0
    assert make_uk(2)(0.75j, 0.0) == pytest.approx(0.66874, abs=5e-6)
    assert restriction_constant(2) == pytest.approx(1.41421, abs=5e-6)


@settings(max_examples=200)
@given(st.integers(min_value=1, max_value=8), st.floats(min_value=0.0, max_value=1e6),
       st.floats(min_value=0.51, max_value=0.99), st.floats(min_value=0.01, max_value=3.1))
def test_uk_in_unit_interval(k, t, r, a):
    v = make_uk(k)(r * np.exp(1j * a), t)
    assert 0.0 < v <= 1.0


def test_uk_bridge_continuous():
    u = make_uk(3)
    z = 0.8 * np.exp(0.7j)
    for t0 in (3.0, 4.0):
        assert u(z, t0 - 1e-12) == pytest.approx(u(z, t0 + 1e-12), rel=1e-9)


def brute_sup(v, z1):
    t = np.concatenate([np.linspace(0, 12, 120_001), np.geomspace(12, 1e4, 5000)])
    vals = v.of_t(z1, t)
    i = int(np.argmax(vals))
    # polish around the best grid cell
    lo, hi = t[max(i - 1, 0)], t[min(i + 1, t.size - 1)]
    fine = np.linspace(lo, hi, 100_001)
    return max(float(vals.max()), float(np.max(v.of_t(z1, fine))))


def test_transfer_sup_against_grid(wks):
    rng = np.random.default_rng(5)
    z = geo.sample_g1(30, seed=7)
    for i, z1 in enumerate(z):
        k1, k2 = 1 + i % 4, 2 + (i * 3) % 4
        p1, p2 = ProductWeight(wks[k1 - 1], k1), ProductWeight(wks[k2 - 1], k2)
        comb = MinCombination(((1.0, p1), (float(rng.uniform(0.3, 3.0)), p2)))
        for v in (p1, p2, comb):
            assert weight_transfer_sup(v, z1) == pytest.approx(brute_sup(v, z1), abs=1e-9)


def test_transfer_single_closed_form(wks):
    for z1 in geo.sample_g1(20, seed=8):
        for k in (1, 2, 5):
            p = ProductWeight(wks[k - 1], k)
            assert weight_transfer_sup(p, z1) == pytest.approx(transfer_single_closed_form(p, z1), rel=1e-14)
            assert weight_transfer_sup(p, z1) <= restriction_constant(k) * wks[k - 1].at(z1)


def test_condition_m_case_i(wks):
    v1, v2 = ProductWeight(wks[0], 1), ProductWeight(wks[1], 2)
    r = [level_ratio(v1, v2, 0.75j, t) for t in (1e2, 1e4, 1e6)]
    assert r[0] < r[1] < r[2] and r[2] > 10
    # for t >= k + 1 the ratio is (1 + t)^(1/4) times the w-ratio (1 at pi/2)
    assert r[2] == pytest.approx((1 + 1e6) ** 0.25, rel=1e-12)


def test_condition_m_case_ii(wks):
    v1, v3 = ProductWeight(wks[0], 1), ProductWeight(wks[2], 3)
    d = 10.0 ** -np.arange(1, 7)
    r = [level_ratio(v1, v3, (1 - dj) * 1j, 1.0) for dj in d]
    assert all(b > a for a, b in zip(r, r[1:]))
    expected = (2 + 1 / d) ** (1 / 3)
    assert np.allclose(r, expected, rtol=1e-9)
