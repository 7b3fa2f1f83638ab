"""The half-annulus G1 = {1/2 < |z| < 1, 0 < arg z < pi} and its families.

For every ``n`` the construction uses

* ``theta_n = 1/(2n)``,
* the plateau ``I_n = [theta_n - 1/(32 n^2), theta_n + 1/(32 n^2)]``,
* the shoulder point ``s_n = theta_n + 1/(16 n^2)``,
* the boundary arc ``J_n = [theta_n - eps_n, theta_n + eps_n]``,
* the disc ``D_n = {z in G1 : |z - exp(i theta_n)| < 1/(50 n^2)}`` and
  ``C_n = G1 \\ D_n``.

All angles are radians in binary64.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.stats import qmc

R_IN = 0.5
R_OUT = 1.0
LOG2 = math.log(2.0)


def default_eps(n: int) -> float:
    """``eps_n = 2^(-n-17) n^(-6)``: half of the admissible ceiling."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return math.ldexp(1.0, -n - 17) / float(n) ** 6


def default_log_eps(n: int) -> float:
    return -(n + 17) * LOG2 - 6.0 * math.log(n)


def eps_ceiling(n: int) -> float:
    """The strict upper bound ``2^(-n-16) n^(-6)`` every ``eps_n`` must beat."""
    return math.ldexp(1.0, -n - 16) / float(n) ** 6


def theta_center(n) -> float:
    return 1.0 / (2.0 * n)


def plateau_halfwidth(n) -> float:
    return 1.0 / (32.0 * n * n)


def shoulder(n) -> float:
    return theta_center(n) + 1.0 / (16.0 * n * n)


def disc_radius(n) -> float:
    return 1.0 / (50.0 * n * n)


def disc_center(n) -> complex:
    return complex(math.cos(theta_center(n)), math.sin(theta_center(n)))


@dataclass(frozen=True)
class AngularFamilies:
    """``theta_n``, ``I_n``, ``s_n`` and ``J_n`` for ``1 <= n <= n_max``.

    ``eps_rule`` must be defined for every ``n >= 1``; indices beyond
    ``n_max`` are needed by the tail of the outer functions.
    """

    n_max: int = 12
    eps_rule: Callable[[int], float] = default_eps
    log_eps_rule: Optional[Callable[[int], float]] = default_log_eps

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")
        self.check_invariants()

    def eps(self, n: int) -> float:
        return self.eps_rule(n)

    def log_eps(self, n: int) -> float:
        if self.log_eps_rule is not None:
            return self.log_eps_rule(n)
        return math.log(self.eps_rule(n))

    def theta(self, n: int) -> float:
        return theta_center(n)

    def plateau(self, n: int) -> tuple[float, float]:
        c, h = theta_center(n), plateau_halfwidth(n)
        return c - h, c + h

    def shoulder(self, n: int) -> float:
        return shoulder(n)

    def arc(self, n: int) -> tuple[float, float]:
        c, e = theta_center(n), self.eps(n)
        return c - e, c + e

    def anchor_sequence(self) -> list[float]:
        """``0 < s_{N+1} < left(I_N) < right(I_N) < s_N < ... < s_1 < pi``."""
        seq = [0.0, shoulder(self.n_max + 1)]
        for n in range(self.n_max, 0, -1):
            seq.extend([*self.plateau(n), shoulder(n)])
        seq.append(math.pi)
        return seq

    def check_invariants(self) -> None:
        for n in range(1, self.n_max + 1):
            e = self.eps(n)
            if not 0.0 < e < eps_ceiling(n):
                raise ValueError(f"eps_{n}={e} violates 0 < eps < 2^(-n-16) n^(-6)")
            if not e < plateau_halfwidth(n):
                raise ValueError(f"J_{n} is not strictly inside I_{n}")
        seq = self.anchor_sequence()
        if any(b <= a for a, b in zip(seq, seq[1:])):
            raise ValueError("anchor sequence is not strictly increasing")


# ---------------------------------------------------------------- regions

def in_g1(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    r = np.abs(z)
    return (r > R_IN) & (r < R_OUT) & (z.imag > 0)


def boundary_distance(z):
    """Distance from ``z`` in G1 to the complement of G1.

    Minimum of the distances to the two circles and to the two real
    segments ``[1/2, 1]`` and ``[-1, -1/2]``.
    """
    zz = np.asarray(z, dtype=complex)
    if not np.all(in_g1(zz)):
        raise ValueError("boundary_distance needs points of G1")
    r = np.abs(zz)
    x, y = zz.real, zz.imag
    right = np.hypot(x - np.clip(x, 0.5, 1.0), y)
    left = np.hypot(x - np.clip(x, -1.0, -0.5), y)
    d = np.minimum.reduce([r - R_IN, R_OUT - r, right, left])
    return float(d) if np.ndim(d) == 0 else d


@dataclass(frozen=True)
class Region:
    """One of ``"D"``, ``"C"``, ``"sector"`` (arg in I_n) or ``"G1"``."""

    kind: str
    n: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("D", "C", "sector", "G1"):
            raise ValueError(f"unknown region kind {self.kind!r}")
        if self.kind != "G1" and (self.n is None or self.n < 1):
            raise ValueError(f"region {self.kind} needs an index n >= 1")

    def to_dict(self) -> dict:
        return {"kind": self.kind, "n": self.n}


def in_disc(z, n: int) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    return in_g1(z) & (np.abs(z - disc_center(n)) < disc_radius(n))


def region_membership(z, region: Region):
    z = np.asarray(z, dtype=complex)
    g = in_g1(z)
    if region.kind == "G1":
        out = g
    elif region.kind == "D":
        out = in_disc(z, region.n)
    elif region.kind == "C":
        out = g & ~in_disc(z, region.n)
    else:
        lo = theta_center(region.n) - plateau_halfwidth(region.n)
        hi = theta_center(region.n) + plateau_halfwidth(region.n)
        a = np.angle(z)
        out = g & (a >= lo) & (a <= hi)
    return bool(out) if out.ndim == 0 else out


def disc_index(z) -> np.ndarray:
    """Index ``n`` with ``z in D_n``, or 0 when ``z`` lies in no disc.

    The discs sit in the pairwise disjoint sectors over ``I_n``, so only the
    integers next to ``1/(2 arg z)`` need checking.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    out = np.zeros(z.shape, dtype=int)
    a = np.angle(z)
    ok = in_g1(z) & (a > 0)
    n0 = np.where(ok, np.rint(1.0 / (2.0 * np.where(ok, a, 1.0))), 1).astype(int)
    for shift in (-1, 0, 1):
        n = np.maximum(n0 + shift, 1)
        centers = np.exp(1j / (2.0 * n))
        hit = ok & (np.abs(z - centers) < 1.0 / (50.0 * n * n)) & (out == 0)
        out[hit] = n[hit]
    return out


# ---------------------------------------------------------------- samplers

@dataclass(frozen=True)
class SamplingPlan:
    count: int
    seed: int = 0

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("sampling plan needs at least one sample")


def _halton(count: int, seed: int, d: int = 2) -> np.ndarray:
    return qmc.Halton(d=d, scramble=True, seed=seed).random(count)


def sample_g1(count: int, seed: int = 0) -> np.ndarray:
    u = _halton(count, seed)
    r = R_IN + (R_OUT - R_IN) * u[:, 0]
    t = math.pi * u[:, 1]
    z = r * np.exp(1j * t)
    return z[in_g1(z)]


def _disc_points(n: int, count: int, seed: int, rho_lo: float, rho_hi: float) -> np.ndarray:
    """Points ``c_n + rho e^{i beta}`` with ``rho`` in [rho_lo, rho_hi) inside G1."""
    out: list[np.ndarray] = []
    have, rounds = 0, 0
    c = disc_center(n)
    while have < count:
        u = _halton(3 * count + 16, seed + 7919 * rounds)
        rho = np.sqrt(rho_lo**2 + (rho_hi**2 - rho_lo**2) * u[:, 0])
        beta = 2 * math.pi * u[:, 1]
        z = c + rho * np.exp(1j * beta)
        z = z[in_g1(z)]
        out.append(z)
        have += z.size
        rounds += 1
    return np.concatenate(out)[:count]


def sample_disc(n: int, count: int, seed: int = 0) -> np.ndarray:
    """Points of ``D_n`` (area-uniform in the disc, clipped to G1)."""
    z = _disc_points(n, count, seed, 0.0, disc_radius(n))
    return z[in_disc(z, n)]


def sample_complement(n: int, count: int, near: int = 0, seed: int = 0,
                      band: float = 1e-3) -> np.ndarray:
    """``count`` points of ``C_n``; ``near`` of them within ``band`` of the
    circle ``|z - e^{i theta_n}| = 1/(50 n^2)`` (including points on it)."""
    far = []
    have, rounds = 0, 0
    while have < count - near:
        z = sample_g1(2 * (count - near) + 16, seed + 104729 * rounds)
        z = z[~in_disc(z, n)]
        far.append(z)
        have += z.size
        rounds += 1
    far_z = np.concatenate(far)[: count - near] if count > near else np.zeros(0, complex)
    if near:
        rad = disc_radius(n)
        ring = _disc_points(n, near, seed + 1, rad, rad + band)
        ring = ring[~in_disc(ring, n)]
        # points exactly on the circle, where the estimates are tightest
        beta = np.linspace(0.0, 2 * math.pi, 64, endpoint=False)
        edge = disc_center(n) + rad * np.exp(1j * beta)
        edge = edge[in_g1(edge) & ~in_disc(edge, n)]
        near_z = np.concatenate([edge, ring])[:near]
        return np.concatenate([far_z, near_z])
    return far_z


def sample_common(count: int, seed: int = 0) -> np.ndarray:
    """Points of ``D = intersection of all C_n`` (G1 minus every disc)."""
    out = []
    have, rounds = 0, 0
    while have < count:
        z = sample_g1(2 * count + 16, seed + 15485863 * rounds)
        z = z[disc_index(z) == 0]
        out.append(z)
        have += z.size
        rounds += 1
    return np.concatenate(out)[:count]


# ---------------------------------------------------------------- checks

def min_kernel_distance(n: int, families: AngularFamilies,
                        plan: SamplingPlan) -> tuple[float, bool]:
    """Sampled infimum of ``|e^{i theta} - z|`` over ``theta in J_n``, ``z in C_n``.

    The candidates for ``z`` are the part of the circle ``dD_n`` inside the
    unit disc (where the infimum sits) plus ``plan.count`` points of ``C_n``.
    Returns the estimate and whether it exceeds ``1/(64 n^2)``.
    """
    if plan.count < 1:
        raise ValueError("sampling plan needs at least one sample")
    a, b = families.arc(n)
    theta = np.linspace(a, b, 33)
    beta = np.linspace(0.0, 2 * math.pi, max(plan.count, 64), endpoint=False)
    edge = disc_center(n) + disc_radius(n) * np.exp(1j * beta)
    edge = edge[np.abs(edge) < 1.0]
    far = sample_complement(n, plan.count, seed=plan.seed)
    z = np.concatenate([edge, far])
    d = np.abs(np.exp(1j * theta)[:, None] - z[None, :]).min()
    return float(d), bool(d > 1.0 / (64.0 * n * n))


def sector_deviation(n: int) -> float:
    """Upper bound ``asin(rho / (1 - rho))`` on ``|arg z - theta_n|`` over ``D_n``."""
    rho = disc_radius(n)
    return math.asin(rho / (1.0 - rho))


def sector_inclusion_check(n: int) -> bool:
    return sector_deviation(n) <= plateau_halfwidth(n)
