import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from subspace_problem.seq_space import (
    FiniteSeq, KoetheMatrix, SeqWeight, above_floor, default_matrix, diag_unpair,
    is_in_system, koethe_grothendieck_entry, normalize_seq_weight,
    random_normalized_weight, random_unit_sequence, seminorm, with_witnesses)


def brute_pairs(count):
    """Walk the diagonals m + j = s + 1 in order of increasing m."""
    out = []
    s = 1
    while len(out) < count:
        for m in range(1, s + 1):
            out.append((m, s + 1 - m))
        s += 1
    return out[:count]


def test_diag_unpair_first_ten():
    expected = [(1, 1), (1, 2), (2, 1), (1, 3), (2, 2),
                (3, 1), (1, 4), (2, 3), (3, 2), (4, 1)]
    assert [diag_unpair(n) for n in range(1, 11)] == expected


def test_diag_unpair_matches_enumeration():
    pairs = brute_pairs(5000)
    assert [diag_unpair(n) for n in range(1, 5001)] == pairs
    assert len(set(pairs)) == len(pairs)


@given(st.integers(min_value=1, max_value=10**12))
def test_diag_unpair_bijective_part(n):
    m, j = diag_unpair(n)
    s = m + j - 1
    assert s * (s - 1) // 2 + m == n
    assert 1 <= j <= n


def test_diag_unpair_rejects_zero():
    with pytest.raises(ValueError):
        diag_unpair(0)


def test_entry_values():
    # n = 2 -> (1, 2): 1/2 once k >= 1
    assert koethe_grothendieck_entry(2, 1) == 0.5
    # n = 3 -> (2, 1): j = 1 so the entry is 1 at every level
    assert koethe_grothendieck_entry(3, 1) == 1.0
    # n = 8 -> (2, 3): 1 at k = 1, 1/3 from k = 2 on
    assert koethe_grothendieck_entry(8, 1) == 1.0
    assert koethe_grothendieck_entry(8, 2) == pytest.approx(1 / 3)


def test_default_matrix_invariants():
    mat = default_matrix(60, 15)
    mat.check_invariants()
    assert np.all(np.diff(mat.entries, axis=1) <= 0)
    n = np.arange(1, 61)[:, None]
    assert np.all(mat.entries[1:] > 1.0 / n[1:] ** 2)
    assert mat.entries[0, 0] == 1.0


def test_above_floor_allows_equality_only_at_one():
    assert above_floor(np.array([1.0, 0.5, 0.2])).all()
    assert not above_floor(np.array([1.0, 0.25]))[1]


def test_matrix_roundtrip():
    mat = default_matrix(6, 4)
    doc = json.loads(mat.to_json())
    back = KoetheMatrix.from_dict(doc)
    assert np.array_equal(back.entries, mat.entries)
    assert back.value(5, 2) == mat.value(5, 2)


def test_level_out_of_range():
    with pytest.raises(ValueError):
        default_matrix(4, 3).level(4)


def brute_normalize(mu, c, n_max, k_max):
    out = []
    for n in range(1, n_max + 1):
        vals = [max(c[k - 1], 1.0) * koethe_grothendieck_entry(n, k) for k in range(1, k_max + 1)]
        out.append(min(min(vals), koethe_grothendieck_entry(n, 1)))
    return np.array(out)


@pytest.mark.parametrize("k,scale", [(1, 0.3), (2, 1.0), (4, 2.5), (7, 0.05)])
def test_normalize_against_brute_force(k, scale):
    mat = default_matrix(50, 8)
    rng = np.random.default_rng(k)
    mu = with_witnesses(scale * mat.level(k) * rng.uniform(0.5, 1.0, 50), mat)
    lam, C = normalize_seq_weight(mu, mat)
    assert np.allclose(lam.values, brute_normalize(mu, mu.witnesses, 50, 8), rtol=0, atol=0)
    assert np.all(mu.values <= C * lam.values * (1 + 1e-15))
    assert lam.normalized
    assert is_in_system(lam, mat)


def test_normalize_needs_witnesses():
    mat = default_matrix(5, 3)
    with pytest.raises(ValueError):
        normalize_seq_weight(SeqWeight(np.ones(5)), mat)


def test_weight_rejects_nonpositive():
    with pytest.raises(ValueError):
        SeqWeight(np.array([1.0, 0.0]))


@st.composite
def weight_and_seq(draw):
    n = draw(st.integers(min_value=1, max_value=12))
    lam = draw(st.lists(st.floats(min_value=1e-3, max_value=1.0), min_size=n, max_size=n))
    re = draw(st.lists(st.floats(min_value=-1e3, max_value=1e3), min_size=n, max_size=n))
    im = draw(st.lists(st.floats(min_value=-1e3, max_value=1e3), min_size=n, max_size=n))
    return SeqWeight(np.array(lam)), FiniteSeq(np.array(re) + 1j * np.array(im))


@given(weight_and_seq(), st.floats(min_value=-50, max_value=50))
def test_seminorm_homogeneous(pair, c):
    lam, a = pair
    assert seminorm(a * c, lam) == pytest.approx(abs(c) * seminorm(a, lam), rel=1e-12, abs=1e-300)


@given(weight_and_seq(), weight_and_seq())
def test_seminorm_triangle(p, q):
    lam, a = p
    _, b = q
    n = min(a.size, b.size)
    a, b = FiniteSeq(a.coefficients[:n]), FiniteSeq(b.coefficients[:n])
    assert seminorm(a + b, lam) <= seminorm(a, lam) + seminorm(b, lam) + 1e-9


@given(weight_and_seq(), st.floats(min_value=1e-3, max_value=1e3))
def test_seminorm_scales_with_weight(pair, c):
    lam, a = pair
    assert seminorm(a, lam.scaled(c)) == pytest.approx(c * seminorm(a, lam), rel=1e-12, abs=1e-300)


@settings(max_examples=50)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_random_unit_sequence_normalized(seed):
    mat = default_matrix(12, 12)
    rng = np.random.default_rng(seed)
    lam = random_normalized_weight(mat, rng)
    a = random_unit_sequence(lam, 8, rng)
    assert seminorm(a, lam) == pytest.approx(1.0, rel=1e-14)
    assert lam.normalized and is_in_system(lam, mat)


def test_finite_seq_ops():
    a = FiniteSeq.unit(3, 4, 2.0)
    assert a.support == [3]
    b = a + FiniteSeq.unit(1, 2)
    assert b.support == [1, 3]
    assert (b - b).support == []
    assert seminorm(FiniteSeq.zeros(0), SeqWeight(np.ones(1))) == 0.0
