import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from subspace_problem import geometry as geo
from subspace_problem import outer

TWO_PI = 2 * math.pi


def quad_complex(f, a, b, **kw):
    re = quad(lambda t: f(t).real, a, b, limit=400, epsabs=1e-13, epsrel=1e-12, **kw)[0]
    im = quad(lambda t: f(t).imag, a, b, limit=400, epsabs=1e-13, epsrel=1e-12, **kw)[0]
    return re + 1j * im


def herglotz(t, z):
    e = np.exp(1j * t)
    return (e + z) / (e - z)


@pytest.mark.parametrize("z,a,b", [
    (0.5, 0.0, math.pi), (0.3 - 0.4j, 1.0, 2.5), (0.9j, 1.2, 1.9),
    (0.95 * np.exp(0.3j), 0.2, 0.4), (-0.7, 0.5, 4.0),
])
def test_segment_matches_quadrature(z, a, b):
    pts = [float(np.angle(z)) % TWO_PI] if a < float(np.angle(z)) % TWO_PI < b else None
    ref = quad_complex(lambda t: herglotz(t, z), a, b, points=pts)
    got = complex(outer.herglotz_segment(z, a, b))
    assert abs(got - ref) <= 1e-10 * max(abs(ref), 1.0)


def test_poisson_normalization():
    rng = np.random.default_rng(0)
    z = 0.99 * np.sqrt(rng.uniform(0, 1, 1000)) * np.exp(TWO_PI * 1j * rng.uniform(0, 1, 1000))
    full = outer.herglotz_segment(z, 0.0, TWO_PI)
    assert np.max(np.abs(full.real / TWO_PI - 1)) < 1e-10
    assert np.max(np.abs(full.imag)) < 1e-10


@settings(max_examples=100)
@given(st.floats(0.0, 0.98), st.floats(-math.pi, math.pi),
       st.floats(0.0, 3.0), st.floats(0.01, 3.0), st.floats(0.05, 0.95))
def test_segment_additivity(r, arg, a, length, frac):
    z = r * np.exp(1j * arg)
    b = a + length
    c = a + frac * length
    whole = outer.herglotz_segment(z, a, b)
    parts = outer.herglotz_segment(z, a, c) + outer.herglotz_segment(z, c, b)
    assert abs(whole - parts) <= 1e-12 * max(1.0, abs(whole))


def test_segment_rejects_boundary_points():
    with pytest.raises(ValueError):
        outer.herglotz_segment(1.0 + 0j, 0.0, 1.0)


def exponent_oracle(n, families, delta, base, off, m_max=30):
    """h_n at (1 - delta) e^{i(base + off)} by adaptive quadrature.

    The kernel is written in the offset psi = t - arg z so points next to a
    tiny arc keep their precision.
    """
    r = 1.0 - delta

    def kern(psi):
        # e^{i psi} - r = expm1(i psi) + delta
        num = np.exp(1j * psi) + r
        den = complex(-2.0 * math.sin(psi / 2) ** 2 + delta, math.sin(psi))
        return num / den

    # the kernel peaks with width ~delta at psi = 0: break the range there
    scales = delta * 4.0 ** np.arange(0, 30)
    scales = scales[scales < 1.0]
    brk = np.concatenate([-scales, [0.0], scales])

    total = families.log_eps(n) * quad_complex(kern, -math.pi, math.pi, points=brk)
    for m in range(1, m_max + 1):
        c = -families.log_eps(n) if m == n else -(m + 4) * geo.LOG2
        e = families.eps(m)
        shift = (families.theta(m) - base) - off
        pts = brk - shift
        pts = pts[(pts > -e) & (pts < e)]
        total += c * quad_complex(lambda u: kern(shift + u), -e, e,
                                  points=pts if pts.size else None)
    return total / TWO_PI


def oracle_points(families):
    z = geo.sample_g1(94, seed=31)
    pts = [(1.0 - abs(p), 0.0, float(np.angle(p))) for p in z]
    for m in (1, 2):
        e = families.eps(m)
        for d, o in ((10 * e, 0.3 * e), (e, -0.5 * e), (0.2 * e, 1.5 * e)):
            pts.append((d, families.theta(m), o))
    return pts


# the odd imaginary part over the full circle integrates to 0 and quad flags
# roundoff at that level; the comparison below carries its own tolerance
@pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_exponent_matches_quadrature(n, families):
    for delta, base, off in oracle_points(families):
        ref = exponent_oracle(n, families, delta, base, off)
        got = outer.exponent_polar(n, families, delta, off, base)
        assert abs(complex(got.value) - ref) <= float(got.tail_bound) + 1e-8, (delta, base, off)


def test_exponent_at_zero_series(families):
    for n in (1, 3, 7):
        series = families.log_eps(n) + sum(
            (-families.log_eps(n) if m == n else -(m + 4) * math.log(2)) * 2 * families.eps(m)
            for m in range(1, 400)) / TWO_PI
        got = outer.exponent(n, 0j, families)
        assert got.value.real == pytest.approx(series, abs=1e-13)
        assert abs(got.value.imag) < 1e-15
        assert outer.exponent_at_zero(n, families, 40) == pytest.approx(series, abs=1e-13)


def test_tail_bound_covers_truncation(families):
    z = geo.sample_g1(300, seed=4)
    for n in (1, 5):
        coarse = outer.exponent(n, z, families, m_cut=max(n, 12), tail_target=math.inf)
        fine = outer.exponent(n, z, families, m_cut=640)
        assert np.all(np.abs(coarse.value - fine.value) <= coarse.tail_bound + fine.tail_bound + 1e-13)


def test_modulus_ceiling(families):
    z = geo.sample_g1(1000, seed=5)
    for n in range(1, 13):
        h = outer.exponent(n, z, families)
        assert np.all(h.value.real <= 0.0)
        assert np.all(h.value.real <= h.tail_bound)


@pytest.mark.parametrize("n", [1, 4, 8])
def test_cn_bound(n, families):
    z = geo.sample_complement(n, 1000, near=200, seed=n)
    rep = outer.modulus_bound_check(n, z, families)
    assert rep.ok and rep.samples == 1000
    assert rep.max_log_modulus <= math.log(2.0 ** (-4 - n))


def test_cn_chain_arithmetic(families):
    for n in range(1, 13):
        assert outer.jensen_chain_value(n, families) <= outer.cn_bound(n)


def test_boundary_profile_values(families):
    prof = outer.BoundaryProfile(3, families)
    assert prof.log_value_on_arc(3) == 0.0
    assert prof.value_on_arc(5) == pytest.approx(families.eps(3) * 2.0 ** -9, rel=1e-14)
    assert prof(0.3 + 1e-3) == pytest.approx(families.eps(3), rel=1e-12)


@pytest.mark.parametrize("n", [1, 3, 6])
def test_radial_convergence(n, families):
    for base, off in outer.admissible_angles(n, families, count=8, seed=2):
        rep = outer.radial_convergence_check(n, off, families, base=base)
        assert rep.ok, (base, off, rep.rel_error)


@pytest.mark.parametrize("n", [1, 2, 5])
def test_phase_methods_agree(n, families):
    for base, off in outer.admissible_angles(n, families, count=8, seed=3):
        pv = outer.boundary_value(n, off, families, method="pv", base=base)
        rl = outer.boundary_value(n, off, families, method="radial", base=base)
        assert np.all(np.abs(pv.phase - rl.phase) <= pv.err + rl.err + 1e-12)
        assert np.array_equal(pv.modulus, rl.modulus)


def test_boundary_value_rejects_jumps(families):
    lo, hi = families.arc(2)
    with pytest.raises(ValueError):
        outer.boundary_value(2, families.eps(2), families, base=families.theta(2))
    with pytest.raises(ValueError):
        outer.boundary_value(2, 0.3, families, method="bogus")
