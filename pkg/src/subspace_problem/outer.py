"""Outer functions ``e_n = exp(h_n)`` with piecewise-constant boundary modulus.

The boundary profile is ``phi_n = 1`` on ``J_n``, ``eps_n 2^(-m-4)`` on
``J_m`` (``m != n``) and ``eps_n`` elsewhere, so

    log phi_n = log eps_n + (-log eps_n) 1_{J_n} + sum_{m != n} -(m+4) log 2 1_{J_m}

and ``h_n(z) = (1/2pi) int (e^{it}+z)/(e^{it}-z) log phi_n(t) dt`` is a finite
combination of segment integrals of the Herglotz kernel, each available in
closed form from the antiderivative ``t - 2i log(1 - z e^{-it})``.  Only the
arcs ``J_m`` with ``m > m_cut`` are dropped; their contribution is bounded
explicitly (``tail_bound``).  Dropping them can only raise ``Re h_n``, so
every upper bound certified on the truncated exponent holds for ``e_n``.

Points are handled in polar form ``z = (1 - delta) e^{i(base + off)}``:
``delta`` and ``off`` keep full relative precision near the unit circle and
inside arcs far narrower than the spacing of binary64 around ``theta_n``.
Moduli are compared in the log domain; ``|e_n|`` is never formed for the
certificates (``eps_n`` underflows for ``n`` around 40 and beyond).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .geometry import LOG2, AngularFamilies

TWO_PI = 2.0 * math.pi
DEFAULT_M_CUT = 40
M_CAP = 640
_CHUNK = 4096


# ---------------------------------------------------------------- kernels

def _clog1p(u: np.ndarray) -> np.ndarray:
    """Principal ``log(1 + u)`` for complex ``u``, accurate for small ``|u|``."""
    re = 0.5 * np.log1p(2.0 * u.real + (u.real**2 + u.imag**2))
    im = np.arctan2(u.imag, 1.0 + u.real)
    return re + 1j * im


def _w(delta, psi):
    """``1 - (1-delta) e^{i psi}`` without cancellation."""
    r = 1.0 - delta
    return (delta + 2.0 * r * np.sin(0.5 * psi) ** 2) - 1j * r * np.sin(psi)


def segment_log_ratio(delta, psi_c, h):
    """``log w(c+h) - log w(c-h)`` with ``w(t) = 1 - z e^{-it}``.

    ``psi_c = arg z - c``.  For short segments the ratio is ``1 + u`` with
    ``u = 2i r sin(h) e^{i psi_c} / w(c-h)`` and ``log1p`` keeps it exact;
    otherwise both principal logarithms are taken directly (their arguments
    lie in ``[-pi/2, pi/2]`` since ``Re w >= 0``).
    """
    delta, psi_c, h = np.broadcast_arrays(np.asarray(delta, float),
                                          np.asarray(psi_c, float),
                                          np.asarray(h, float))
    r = 1.0 - delta
    wm = _w(delta, psi_c + h)
    with np.errstate(divide="ignore", invalid="ignore"):
        u = 2j * r * np.sin(h) * np.exp(1j * psi_c) / wm
        small = np.abs(u) < 0.5
        out = np.empty(delta.shape, dtype=complex)
        out[small] = _clog1p(u[small])
        big = ~small
        if np.any(big):
            wp = _w(delta[big], psi_c[big] - h[big])
            out[big] = np.log(wp) - np.log(wm[big])
    return out


def herglotz_segment(z, a: float, b: float):
    """``int_a^b (e^{it} + z)/(e^{it} - z) dt`` in closed form for ``|z| < 1``."""
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) >= 1.0):
        raise ValueError("herglotz_segment needs |z| < 1")
    if not 0.0 <= a < b <= TWO_PI:
        raise ValueError("need 0 <= a < b <= 2 pi")
    c, h = 0.5 * (a + b), 0.5 * (b - a)
    delta = 1.0 - np.abs(z)
    psi_c = np.angle(z) - c
    out = 2.0 * h - 2j * segment_log_ratio(delta, psi_c, h)
    return complex(out) if out.ndim == 0 else out


def herglotz_segment_polar(delta, base: float, off, c: float, h: float):
    """Segment integral for ``z = (1-delta) e^{i(base+off)}`` over ``[c-h, c+h]``."""
    psi_c = (base - c) + np.asarray(off, dtype=float)
    return 2.0 * h - 2j * segment_log_ratio(delta, psi_c, h)


# ---------------------------------------------------------------- profile

@lru_cache(maxsize=64)
def _segments(families: AngularFamilies, m_cut: int) -> tuple[np.ndarray, np.ndarray]:
    m = np.arange(1, m_cut + 1)
    centers = 1.0 / (2.0 * m)
    halfw = np.array([families.eps(int(k)) for k in m])
    return centers, halfw


@lru_cache(maxsize=64)
def _tail_mass(families: AngularFamilies, m_cut: int) -> float:
    """``sum_{m > m_cut} (m + 4) log 2 * 2 eps_m``.

    Summed for 400 further terms; ``eps_m`` decays faster than ``2^-m``, so
    the rest is below ``2^-400`` of what is kept.
    """
    total = 0.0
    for m in range(m_cut + 400, m_cut, -1):
        total += (m + 4) * LOG2 * 2.0 * families.eps(m)
    return total


@dataclass(frozen=True)
class BoundaryProfile:
    """``phi_n`` on ``[0, 2pi]``; moduli exact, logs in closed form."""

    n: int
    families: AngularFamilies

    def log_phi(self, theta) -> np.ndarray:
        scalar = np.ndim(theta) == 0
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        out = np.full(theta.shape, self.families.log_eps(self.n))
        idx = arc_index(theta, self.families)
        own = idx == self.n
        other = (idx > 0) & ~own
        out[own] = 0.0
        out[other] = out[other] - (idx[other] + 4) * LOG2
        return float(out[0]) if scalar else out

    def __call__(self, theta):
        return np.exp(self.log_phi(theta))

    def value_on_arc(self, m: int) -> float:
        """``phi_n`` on ``J_m``: 1 when ``m == n``."""
        if m == self.n:
            return 1.0
        return math.ldexp(self.families.eps(self.n), -m - 4)

    def log_value_on_arc(self, m: int) -> float:
        if m == self.n:
            return 0.0
        return self.families.log_eps(self.n) - (m + 4) * LOG2


def arc_index(theta, families: AngularFamilies) -> np.ndarray:
    """``m`` with ``theta in J_m`` (closed arcs), 0 when there is none."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    out = np.zeros(theta.shape, dtype=int)
    pos = (theta > 0) & (theta <= 0.5 + families.eps(1))
    m0 = np.where(pos, np.rint(1.0 / (2.0 * np.where(pos, theta, 1.0))), 1).astype(int)
    for shift in (-1, 0, 1):
        m = np.maximum(m0 + shift, 1)
        e = np.array([families.eps(int(k)) for k in m.ravel()]).reshape(m.shape)
        hit = pos & (np.abs(theta - 1.0 / (2.0 * m)) <= e) & (out == 0)
        out[hit] = m[hit]
    return out


def coefficients(n: int, families: AngularFamilies, m_cut: int) -> np.ndarray:
    """Jump heights of ``log phi_n`` over the base level on ``J_1..J_m_cut``."""
    m = np.arange(1, m_cut + 1)
    c = -(m + 4) * LOG2
    c[n - 1] = -families.log_eps(n)
    return c


def tail_arc_end(families: AngularFamilies, m_cut: int) -> float:
    """Every ``J_m`` with ``m > m_cut`` lies in ``[0, tail_arc_end]``."""
    return 1.0 / (2.0 * (m_cut + 1)) + families.eps(m_cut + 1)


def _arc_distance(delta, alpha, beta: float):
    """Distance from ``(1-delta) e^{i alpha}`` to the arc ``{e^{it}: 0 <= t <= beta}``."""
    delta = np.asarray(delta, dtype=float)
    a = np.mod(np.asarray(alpha, dtype=float), TWO_PI)
    inside = a <= beta
    d0 = np.abs(_w(delta, a))
    d1 = np.abs(_w(delta, a - beta))
    return np.where(inside, delta, np.minimum(d0, d1))


def tail_bound_polar(families: AngularFamilies, m_cut: int, delta, alpha):
    """Bound on ``|h_n - h_n^(m_cut)|``: ``sum_{m>m_cut} |c_m| 2 eps_m (2/dist) / 2pi``.

    ``|(e^{it}+z)/(e^{it}-z)| <= 2/|e^{it} - z|`` and the dropped arcs all lie
    in ``[0, tail_arc_end]``.  The same bound holds for the boundary phase
    since ``|cot(x/2)| <= 2/|e^{ix} - 1|``.
    """
    dist = _arc_distance(delta, alpha, tail_arc_end(families, m_cut))
    with np.errstate(divide="ignore"):
        return _tail_mass(families, m_cut) * (2.0 / dist) / TWO_PI


# ---------------------------------------------------------------- exponent

@dataclass(frozen=True)
class OuterExponent:
    """``value = h_n(z)`` (truncated), ``|h_n - value| <= tail_bound``."""

    value: np.ndarray
    tail_bound: np.ndarray
    m_cut: np.ndarray

    @property
    def log_modulus(self) -> np.ndarray:
        return self.value.real


def _exponent_block(n, families, m_cut, delta, base, off):
    centers, halfw = _segments(families, m_cut)
    coef = coefficients(n, families, m_cut)
    out = np.empty(delta.shape, dtype=complex)
    for s in range(0, delta.size, _CHUNK):
        d = delta[s:s + _CHUNK, None]
        psi_c = (base - centers)[None, :] + off[s:s + _CHUNK, None]
        seg = 2.0 * halfw[None, :] - 2j * segment_log_ratio(d, psi_c, halfw[None, :])
        out[s:s + _CHUNK] = families.log_eps(n) + (seg @ coef) / TWO_PI
    return out


def exponent_polar(n: int, families: AngularFamilies, delta, off, base: float = 0.0,
                   m_cut: Optional[int] = None, tail_target: float = 1e-10,
                   m_cap: int = M_CAP) -> OuterExponent:
    """``h_n`` at ``(1 - delta) e^{i(base + off)}``, with adaptive ``m_cut``.

    Points whose tail bound exceeds ``tail_target`` are recomputed with a
    doubled cut, up to ``m_cap``; whatever bound remains is reported.
    """
    m_cut = max(families.n_max, DEFAULT_M_CUT, n) if m_cut is None else m_cut
    if m_cut < n:
        raise ValueError("m_cut must be >= n")
    delta, off = np.broadcast_arrays(np.asarray(delta, float), np.asarray(off, float))
    shape = delta.shape
    delta, off = delta.ravel().copy(), off.ravel().copy()
    if np.any(delta <= 0.0) or np.any(delta > 1.0):
        raise ValueError("exponent needs 0 < 1 - |z| <= 1 (points inside the disc)")
    value = np.empty(delta.shape, dtype=complex)
    tail = np.empty(delta.shape)
    cuts = np.empty(delta.shape, dtype=int)
    todo = np.arange(delta.size)
    cut = m_cut
    while todo.size:
        value[todo] = _exponent_block(n, families, cut, delta[todo], base, off[todo])
        tail[todo] = tail_bound_polar(families, cut, delta[todo], base + off[todo])
        cuts[todo] = cut
        if cut >= m_cap:
            break
        todo = todo[tail[todo] > tail_target]
        cut = min(2 * cut, m_cap)
    if np.any(~np.isfinite(tail)) or np.any(tail == np.inf):
        raise ValueError("tail bound is infinite: point on the accumulation arc")
    return OuterExponent(value.reshape(shape), tail.reshape(shape), cuts.reshape(shape))


def exponent(n: int, z, families: AngularFamilies, m_cut: Optional[int] = None,
             tail_target: float = 1e-10) -> OuterExponent:
    """``h_n(z) = log e_n(z)`` for ``|z| < 1``."""
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) >= 1.0):
        raise ValueError("exponent needs |z| < 1")
    return exponent_polar(n, families, 1.0 - np.abs(z), np.angle(z), 0.0,
                          m_cut=m_cut, tail_target=tail_target)


def exponent_at_zero(n: int, families: AngularFamilies, m_cut: int) -> float:
    """Mean of ``log phi_n`` over the circle (truncated at ``m_cut``)."""
    total = families.log_eps(n) * TWO_PI
    for m in range(1, m_cut + 1):
        c = -families.log_eps(n) if m == n else -(m + 4) * LOG2
        total += c * 2.0 * families.eps(m)
    return total / TWO_PI


def outer_value(n: int, z, families: AngularFamilies, m_cut: Optional[int] = None):
    """``e_n(z)``; only safe while ``log eps_n`` stays far above -700."""
    return np.exp(exponent(n, z, families, m_cut).value)


# ---------------------------------------------------------------- modulus bounds

def jensen_chain_value(n: int, families: AngularFamilies) -> float:
    """``pi^-1 eps_n 2^12 n^4 + eps_n`` (the Jensen chain on ``C_n``)."""
    e = families.eps(n)
    return e * 2.0**12 * n**4 / math.pi + e


def cn_bound(n: int) -> float:
    return math.ldexp(1.0, -4 - n)


@dataclass(frozen=True)
class ModulusReport:
    n: int
    samples: int
    max_log_modulus: float
    log_bound: float
    max_tail: float
    chain_value: float
    chain_ok: bool
    numeric_ok: bool

    @property
    def ok(self) -> bool:
        return self.chain_ok and self.numeric_ok

    @property
    def margin(self) -> float:
        return self.log_bound - self.max_log_modulus


def modulus_bound_check(n: int, z, families: AngularFamilies,
                        bound: Optional[float] = None,
                        m_cut: Optional[int] = None) -> ModulusReport:
    """``|e_n(z)| <= 2^(-4-n)`` on samples of ``C_n``, compared in the log domain.

    Points inside ``D_n`` are dropped.  The truncated exponent already bounds
    ``Re h_n`` from above, so the tail is reported but not added.
    """
    from .geometry import in_disc

    z = np.asarray(z, dtype=complex).ravel()
    z = z[~in_disc(z, n)]
    bound = cn_bound(n) if bound is None else bound
    h = exponent(n, z, families, m_cut)
    chain = jensen_chain_value(n, families)
    log_b = math.log(bound)
    mx = float(np.max(h.value.real)) if z.size else -math.inf
    return ModulusReport(
        n=n, samples=int(z.size), max_log_modulus=mx, log_bound=log_b,
        max_tail=float(np.max(h.tail_bound)) if z.size else 0.0,
        chain_value=chain, chain_ok=chain <= bound, numeric_ok=mx <= log_b,
    )


# ---------------------------------------------------------------- boundary values

def _angle_parts(theta, base):
    theta = np.asarray(theta, dtype=float)
    if base is None:
        return 0.0, theta
    return float(base), theta


def jump_clearance(n: int, families: AngularFamilies, off, base: float = 0.0,
                   m_cut: Optional[int] = None) -> tuple[np.ndarray, np.ndarray]:
    """Distance to the nearest jump of ``phi_n`` and length of the constancy
    interval containing ``theta = base + off`` (``theta`` in ``[0, 2pi)``).

    Arcs beyond ``m_cut`` are lumped into ``[0, tail_arc_end]``; points in
    there get clearance 0.
    """
    m_cut = max(families.n_max, DEFAULT_M_CUT, n) if m_cut is None else m_cut
    off = np.atleast_1d(np.asarray(off, dtype=float))
    centers, halfw = _segments(families, m_cut)
    psi = (base - centers)[None, :] + off[:, None]
    ends = np.concatenate([psi - halfw[None, :], psi + halfw[None, :]], axis=1)
    theta = base + off
    beta = tail_arc_end(families, m_cut)
    left_tail = theta - beta
    right_wrap = TWO_PI - theta
    big = np.inf
    left = np.where(ends > 0, ends, big).min(axis=1)
    left = np.minimum(left, np.where(left_tail > 0, left_tail, big))
    right = np.where(ends < 0, -ends, big).min(axis=1)
    right = np.minimum(right, right_wrap)
    clear = np.minimum(left, right)
    clear = np.where(left_tail > 0, clear, 0.0)
    return clear, left + right


def admissible(n: int, families: AngularFamilies, off, base: float = 0.0,
               keep_out: float = 1e-6, m_cut: Optional[int] = None) -> np.ndarray:
    """Clearance above ``keep_out`` times the length of the constancy interval."""
    clear, length = jump_clearance(n, families, off, base, m_cut)
    return (clear > 0) & (clear > keep_out * length)


def phase_pv(n: int, families: AngularFamilies, off, base: float = 0.0,
             m_cut: Optional[int] = None) -> tuple[np.ndarray, np.ndarray]:
    """Boundary phase ``Im h_n*`` from the conjugate-function integral.

    ``(1/2pi) PV int cot((theta - t)/2) log phi_n(t) dt``; the constant part
    integrates to zero and each arc contributes
    ``(c_m / pi) log|sin((psi+h)/2) / sin((psi-h)/2)|``.
    Returns the phase and the tail bound.
    """
    m_cut = max(families.n_max, DEFAULT_M_CUT, n) if m_cut is None else m_cut
    off = np.atleast_1d(np.asarray(off, dtype=float))
    centers, halfw = _segments(families, m_cut)
    coef = coefficients(n, families, m_cut)
    psi = (base - centers)[None, :] + off[:, None]
    h = np.broadcast_to(halfw[None, :], psi.shape)
    den = np.sin(0.5 * (psi - h))
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = 2.0 * np.cos(0.5 * psi) * np.sin(0.5 * h) / den
        num = np.sin(0.5 * (psi + h))
        direct = np.log(np.abs(num / den))
    use_rel = np.abs(rel) < 0.5
    logs = np.where(use_rel, np.log1p(np.where(use_rel, rel, 0.0)), direct)
    phase = (logs @ coef) / math.pi
    tail = tail_bound_polar(families, m_cut, np.zeros_like(off), base + off)
    return phase, tail


def _neville_zero(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Polynomial extrapolation to 0 along the last axis; value and last step."""
    p = y.astype(complex).copy()
    k = x.shape[-1]
    prev = p[..., -1].copy()
    for level in range(1, k):
        for i in range(k - level):
            xi, xj = x[..., i], x[..., i + level]
            p[..., i] = (xj * p[..., i] - xi * p[..., i + 1]) / (xj - xi)
        if level == k - 2:
            prev = p[..., 1].copy()
    return p[..., 0], np.abs(p[..., 0] - prev)


@dataclass(frozen=True)
class RadialLimit:
    value: np.ndarray          # extrapolated h_n* (complex)
    err: np.ndarray            # last extrapolation difference
    tail: np.ndarray
    deltas: np.ndarray         # radial offsets used, shape (points, levels)
    samples: np.ndarray        # h_n at those offsets


def radial_limit(n: int, families: AngularFamilies, off, base: float = 0.0,
                 levels: int = 5, ratio: float = 1.0 / 32.0,
                 m_cut: Optional[int] = None) -> RadialLimit:
    """Richardson-extrapolated ``lim_{r -> 1} h_n(r e^{i theta})``.

    ``h_n`` continues analytically across the arc around ``theta`` (the
    profile is locally constant), so ``delta -> h_n((1-delta)e^{i theta})`` is
    analytic for ``|delta|`` below the jump clearance ``D``.  The radii used
    are ``delta_j = ratio * D * 2^-j``, ``j < levels``.
    """
    m_cut = max(families.n_max, DEFAULT_M_CUT, n) if m_cut is None else m_cut
    off = np.atleast_1d(np.asarray(off, dtype=float))
    clear, _ = jump_clearance(n, families, off, base, m_cut)
    if np.any(clear <= 0):
        raise ValueError("radial limit requested at a jump of the boundary profile")
    d0 = np.minimum(ratio * clear, 0.125)
    deltas = d0[:, None] * 2.0 ** -np.arange(levels)[None, :]
    offs = np.broadcast_to(off[:, None], deltas.shape)
    h = _exponent_block(n, families, m_cut, deltas.ravel(), base, offs.ravel())
    h = h.reshape(deltas.shape)
    val, err = _neville_zero(deltas, h)
    tail = tail_bound_polar(families, m_cut, np.zeros_like(off), base + off)
    return RadialLimit(val, err, tail, deltas, h)


@dataclass(frozen=True)
class BoundaryValue:
    modulus: np.ndarray
    phase: np.ndarray
    err: np.ndarray

    @property
    def value(self) -> np.ndarray:
        return self.modulus * np.exp(1j * self.phase)


def boundary_value(n: int, theta, families: AngularFamilies, method: str = "pv",
                   base: Optional[float] = None, keep_out: float = 1e-6,
                   m_cut: Optional[int] = None) -> BoundaryValue:
    """``e_n*(e^{i theta})``: exact modulus ``phi_n(theta)``, computed phase.

    ``theta`` may be given as an offset from ``base`` to resolve points
    inside the narrow arcs.  ``method`` is ``"pv"`` (closed-form conjugate
    function) or ``"radial"`` (extrapolated radial limit).
    """
    b, off = _angle_parts(theta, base)
    off = np.atleast_1d(off)
    ok = admissible(n, families, off, b, keep_out, m_cut)
    if not np.all(ok):
        raise ValueError("theta is at or too near a jump of phi_n")
    prof = BoundaryProfile(n, families)
    mod = np.exp(prof.log_phi(b + off)) if base is None else _modulus_offset(prof, b, off)
    if method == "pv":
        ph, tail = phase_pv(n, families, off, b, m_cut)
        return BoundaryValue(mod, ph, tail)
    if method == "radial":
        lim = radial_limit(n, families, off, b, m_cut=m_cut)
        return BoundaryValue(mod, lim.value.imag, lim.err + lim.tail)
    raise ValueError(f"unknown method {method!r}")


def _modulus_offset(prof: BoundaryProfile, base: float, off: np.ndarray) -> np.ndarray:
    """``phi_n`` at ``base + off`` without rounding ``base + off`` first."""
    fam = prof.families
    m_cut = max(fam.n_max, DEFAULT_M_CUT, prof.n)
    centers, halfw = _segments(fam, m_cut)
    psi = (base - centers)[None, :] + off[:, None]
    inside = np.abs(psi) <= halfw[None, :]
    out = np.full(off.shape, fam.log_eps(prof.n))
    for i, row in enumerate(inside):
        hits = np.flatnonzero(row)
        if hits.size:
            out[i] = prof.log_value_on_arc(int(hits[0]) + 1)
    return np.exp(out)


@dataclass(frozen=True)
class RadialReport:
    n: int
    theta: np.ndarray
    limit_modulus: np.ndarray
    target: np.ndarray
    rel_error: np.ndarray
    cauchy: np.ndarray
    ok: bool


def radial_convergence_check(n: int, theta, families: AngularFamilies,
                             base: Optional[float] = None, rtol: float = 1e-6,
                             levels: int = 6) -> RadialReport:
    """``|e_n((1-delta)e^{i theta})| -> phi_n(theta)`` as ``delta = D 2^-j -> 0``.

    The raw moduli must form a contracting sequence (successive differences
    shrink) and their extrapolated limit must match ``phi_n`` to ``rtol``.
    """
    b, off = _angle_parts(theta, base)
    off = np.atleast_1d(off)
    lim = radial_limit(n, families, off, b, levels=levels)
    prof = BoundaryProfile(n, families)
    target_log = np.log(_modulus_offset(prof, b, off))
    raw = lim.samples.real
    steps = np.abs(np.diff(raw, axis=1))
    cauchy = np.all(steps[:, 1:] <= steps[:, :-1] * (1 + 1e-9) + 1e-300, axis=1)
    rel = np.abs(np.expm1(lim.value.real - target_log))
    return RadialReport(n, b + off, np.exp(lim.value.real), np.exp(target_log),
                        rel, cauchy, bool(np.all(rel <= rtol) and np.all(cauchy)))


def admissible_angles(n: int, families: AngularFamilies, count: int = 20,
                      seed: int = 0) -> list[tuple[float, float]]:
    """A deterministic spread of admissible ``(base, off)`` boundary points:
    inside ``J_n``, inside other arcs, in the gaps and on the lower half."""
    rng = np.random.default_rng(seed + 1000 * n)
    pts: list[tuple[float, float]] = []
    arcs = [m for m in range(1, families.n_max + 1)]
    while len(pts) < count:
        kind = len(pts) % 4
        if kind == 0:
            m = n
        elif kind == 1:
            m = int(rng.choice(arcs))
        else:
            m = 0
        if m:
            e = families.eps(m)
            cand = (families.theta(m), float(rng.uniform(-0.9, 0.9)) * e)
        elif kind == 2:
            g = int(rng.integers(1, families.n_max))
            lo = families.theta(g + 1) + families.eps(g + 1)
            hi = families.theta(g) - families.eps(g)
            cand = (0.0, float(lo + (hi - lo) * rng.uniform(0.1, 0.9)))
        else:
            cand = (0.0, float(rng.uniform(0.6, 2 * math.pi - 0.2)))
        if admissible(n, families, cand[1], cand[0])[0]:
            pts.append(cand)
    return pts
