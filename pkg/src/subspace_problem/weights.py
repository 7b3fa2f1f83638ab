"""Angular weights on G1 and product weights on G1 x C.

An :class:`AngularWeight` is a continuous piecewise-affine function of
``theta`` on ``[0, pi]`` stored by its anchors; ``w(r e^{i theta}) =
w_hat(theta)`` does not depend on ``r``.  Minima and maxima of two such
weights are again piecewise affine once the crossing points are added as
anchors, so every sup/inf used below is an exact anchor scan.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .geometry import AngularFamilies, boundary_distance, shoulder
from .seq_space import KoetheMatrix, SeqWeight, system_witnesses


@dataclass(frozen=True)
class AngularWeight:
    thetas: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.thetas, dtype=float).copy()
        v = np.asarray(self.values, dtype=float).copy()
        if t.ndim != 1 or t.shape != v.shape or t.size < 2:
            raise ValueError("anchors need matching 1-d arrays of length >= 2")
        if np.any(np.diff(t) <= 0):
            raise ValueError("anchor angles must be strictly increasing")
        if np.any(v <= 0):
            raise ValueError("weight values must be positive")
        t.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "thetas", t)
        object.__setattr__(self, "values", v)

    def __call__(self, theta):
        out = np.interp(theta, self.thetas, self.values)
        return float(out) if np.ndim(out) == 0 else out

    def at(self, z):
        """Evaluate at points of G1 (only ``arg z`` matters)."""
        return self(np.angle(z))

    def sup_on(self, lo: float, hi: float) -> float:
        """Exact ``max`` over ``[lo, hi]``: endpoints and interior anchors."""
        inside = self.values[(self.thetas > lo) & (self.thetas < hi)]
        return float(max(self(lo), self(hi), *inside)) if inside.size else float(max(self(lo), self(hi)))

    def to_dict(self) -> dict:
        return {"anchors": [[float(t), float(v)] for t, v in zip(self.thetas, self.values)]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, doc: dict) -> "AngularWeight":
        arr = np.asarray(doc["anchors"], dtype=float)
        return cls(arr[:, 0], arr[:, 1])


def _merged_grid(f: AngularWeight, g: AngularWeight) -> np.ndarray:
    return np.union1d(f.thetas, g.thetas)


def combine(f: AngularWeight, g: AngularWeight, op: Callable) -> AngularWeight:
    """Pointwise ``op`` (``np.minimum`` or ``np.maximum``) of two weights.

    On each cell of the merged grid both weights are affine; if their
    difference changes sign the crossing point is inserted.
    """
    grid = _merged_grid(f, g)
    fv, gv = f(grid), g(grid)
    diff = fv - gv
    extra = []
    for i in np.flatnonzero(diff[:-1] * diff[1:] < 0):
        t0, t1 = grid[i], grid[i + 1]
        t = t0 + (t1 - t0) * diff[i] / (diff[i] - diff[i + 1])
        if t0 < t < t1:
            extra.append(t)
    if extra:
        grid = np.union1d(grid, extra)
        fv, gv = f(grid), g(grid)
    return AngularWeight(grid, op(fv, gv))


def wmin(f: AngularWeight, g: AngularWeight) -> AngularWeight:
    return combine(f, g, np.minimum)


def wmax(f: AngularWeight, g: AngularWeight) -> AngularWeight:
    return combine(f, g, np.maximum)


def sup_ratio(f: AngularWeight, g: AngularWeight) -> float:
    """Exact ``sup f/g``; a ratio of positive affine maps is monotone on a cell."""
    grid = _merged_grid(f, g)
    return float(np.max(f(grid) / g(grid)))


def plateau_weight(plateaus: Sequence[float], families: AngularFamilies,
                   n_cut: Optional[int] = None) -> AngularWeight:
    """Value ``plateaus[n-1]`` on ``I_n`` for ``n <= n_cut``, 1 at every
    shoulder ``s_n``, at 0 and at pi, affine in between.

    Below ``s_{n_cut+1}`` the weight is the constant 1.
    """
    n_cut = len(plateaus) if n_cut is None else n_cut
    if n_cut < 1 or n_cut > len(plateaus):
        raise ValueError("n_cut must be between 1 and the number of plateau values")
    t = [0.0, shoulder(n_cut + 1)]
    v = [1.0, 1.0]
    for n in range(n_cut, 0, -1):
        lo, hi = families.plateau(n)
        p = float(plateaus[n - 1])
        t += [lo, hi, shoulder(n)]
        v += [p, p, 1.0]
    t.append(math.pi)
    v.append(1.0)
    return AngularWeight(np.array(t), np.array(v))


def make_wk(k: int, matrix: KoetheMatrix, families: AngularFamilies,
            n_cut: Optional[int] = None) -> AngularWeight:
    """The weight ``w_k``: plateau ``lam_{nk}`` on each ``I_n``."""
    if not 1 <= k <= matrix.k_max:
        raise ValueError(f"level {k} outside 1..{matrix.k_max}")
    n_cut = min(families.n_max, matrix.n_max) if n_cut is None else n_cut
    if n_cut > matrix.n_max:
        raise ValueError("n_cut exceeds the matrix truncation")
    return plateau_weight(matrix.level(k)[:n_cut], families, n_cut)


def make_canonical_wbar(lam: SeqWeight, families: AngularFamilies,
                        n_cut: Optional[int] = None) -> AngularWeight:
    """``w_k`` with ``lam_{nk}`` replaced by ``lam(n)``; needs ``lam`` normalized."""
    if not lam.normalized:
        raise ValueError("canonical weights need 1/n^2 <= lam(n) <= 1")
    n_cut = lam.n_max if n_cut is None else n_cut
    return plateau_weight(lam.values[:n_cut], families, n_cut)


def floor_weight(families: AngularFamilies, n_cut: int) -> AngularWeight:
    """Plateau values ``1/n^2``: every normalized weight dominates it."""
    n = np.arange(1, n_cut + 1, dtype=float)
    return plateau_weight(1.0 / n**2, families, n_cut)


def wbar_witnesses(w: AngularWeight, matrix: KoetheMatrix, families: AngularFamilies,
                   n_cut: Optional[int] = None) -> tuple[float, ...]:
    """Exact ``C_k = sup w / w_k`` for every materialized level."""
    return tuple(sup_ratio(w, make_wk(k, matrix, families, n_cut))
                 for k in range(1, matrix.k_max + 1))


@dataclass(frozen=True)
class NormalizeResult:
    weight: AngularWeight
    constant: float
    lam: SeqWeight
    rho: np.ndarray


def lemma1_normalize(wprime: AngularWeight, families: AngularFamilies,
                     matrix: KoetheMatrix, w1: AngularWeight,
                     n_cut: Optional[int] = None) -> NormalizeResult:
    """Replace ``wprime`` by a dominating weight that is constant on each D_n.

    ``rho(n) = max(1/n^2, sup_{I_n} wprime)``, ``w1_rho`` is ``w_1`` with its
    plateaus replaced by ``rho`` and the result is
    ``min(w_1, max(w1_rho, wprime))``.  The returned constant ``C`` satisfies
    ``C wprime <= wbar <= 1``; ``lam`` holds the values of ``wbar`` on the
    discs with their witnesses.
    """
    if not isinstance(wprime, AngularWeight):
        raise TypeError("lemma1_normalize needs an anchor-based AngularWeight")
    n_cut = min(families.n_max, matrix.n_max) if n_cut is None else n_cut
    rho = np.array([
        max(1.0 / n**2, wprime.sup_on(*families.plateau(n)))
        for n in range(1, n_cut + 1)
    ])
    w_rho = plateau_weight(rho, families, n_cut)
    wbar = wmin(w1, wmax(w_rho, wprime))
    c = min(1.0, 1.0 / sup_ratio(wprime, w1))
    on_discs = np.array([wbar(families.theta(n)) for n in range(1, n_cut + 1)])
    lam = SeqWeight(on_discs, system_witnesses(on_discs, matrix))
    return NormalizeResult(wbar, c, lam, rho)


# ---------------------------------------------------------------- G1 x C

def level_exponent(k: int) -> float:
    return (k - 1) / (2.0 * k)


def restriction_constant(k: int) -> float:
    """``C_k = (k+2)^((k-1)/(2k))``."""
    return (k + 2.0) ** level_exponent(k)


def make_uk(k: int) -> Callable:
    """``u_k(z1, t)``: ``(1 + 1/d(z1) + t)^-a`` for ``t <= k``, ``(1+t)^-a`` for
    ``t >= k+1`` and affine in between, with ``a = (k-1)/(2k)``."""
    if k < 1:
        raise ValueError("level must be >= 1")
    a = level_exponent(k)

    def u(z1, t):
        d = boundary_distance(z1)
        t = np.asarray(t, dtype=float)
        if a == 0.0:
            out = np.ones(np.broadcast(np.asarray(d), t).shape)
        else:
            low = (1.0 + 1.0 / d + np.minimum(t, k)) ** (-a)
            high = (1.0 + np.maximum(t, k + 1)) ** (-a)
            lo_k = (1.0 + 1.0 / d + k) ** (-a)
            hi_k = (k + 2.0) ** (-a)
            s = np.clip(t - k, 0.0, 1.0)
            bridge = lo_k + s * (hi_k - lo_k)
            out = np.where(t <= k, low, np.where(t >= k + 1, high, bridge))
        return float(out) if out.ndim == 0 else out

    u.level = k
    return u


@dataclass(frozen=True)
class ProductWeight:
    """``v_k(z1, z2) = w_k(z1) u_k(z1, |z2|)``."""

    base: AngularWeight
    k: int

    def u(self, z1, t):
        return make_uk(self.k)(z1, t)

    def __call__(self, z1, z2):
        return self.base.at(z1) * self.u(z1, np.abs(z2))

    def of_t(self, z1, t):
        return self.base.at(z1) * self.u(z1, t)


@dataclass(frozen=True)
class MinCombination:
    """``vbar = min_i scale_i * v_{k_i}`` (a finite element of the system)."""

    terms: tuple[tuple[float, ProductWeight], ...]

    def __call__(self, z1, z2):
        return np.min([s * p(z1, z2) for s, p in self.terms], axis=0)

    def of_t(self, z1, t):
        return np.min([s * p.of_t(z1, t) for s, p in self.terms], axis=0)


def _as_combination(vbar) -> MinCombination:
    if isinstance(vbar, ProductWeight):
        return MinCombination(((1.0, vbar),))
    return vbar


def weight_transfer_sup(vbar, z1: complex) -> float:
    """Exact ``sup_{t >= 0} vbar(z1, t)``.

    For one level ``t -> u_k`` is decreasing on ``[0, k]``, affine increasing
    on ``[k, k+1]`` and decreasing after, so on each cell between the integer
    breakpoints the minimum is ``min(increasing part, decreasing part)`` and
    its sup sits at a cell end or at the crossing point.
    """
    comb = _as_combination(vbar)
    levels = sorted({p.k for _, p in comb.terms})
    pts = sorted({0.0, *[float(k) for k in levels if k > 1],
                  *[k + 1.0 for k in levels if k > 1]})

    def f(t: float) -> float:
        return float(comb.of_t(z1, t))

    best = max(f(t) for t in pts)
    for a, b in zip(pts, pts[1:]):
        up_idx = {i for i, (_, p) in enumerate(comb.terms) if p.k > 1 and p.k == a and p.k + 1 == b}
        rising = [t for i, t in enumerate(comb.terms) if i in up_idx]
        falling = [t for i, t in enumerate(comb.terms) if i not in up_idx]
        if not rising or not falling:
            continue

        def gap(t: float) -> float:
            up = min(s * float(p.of_t(z1, t)) for s, p in rising)
            down = min(s * float(p.of_t(z1, t)) for s, p in falling)
            return up - down

        ga, gb = gap(a), gap(b)
        if ga < 0 < gb:
            t = brentq(gap, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps)
            best = max(best, f(t))
    return best


def transfer_single_closed_form(p: ProductWeight, z1: complex) -> float:
    """``w_k(z1) * max(u_k(z1, 0), (k+2)^-a)`` for a single level."""
    if p.k == 1:
        return float(p.base.at(z1))
    return float(p.base.at(z1)) * max(p.u(z1, 0.0), (p.k + 2.0) ** (-level_exponent(p.k)))


def level_ratio(v_lo: ProductWeight, v_hi: ProductWeight, z1: complex, t: float) -> float:
    """``v_k / v_k'`` at ``(z1, |z2| = t)``; the witness quantity of condition (M)."""
    return float(v_lo.of_t(z1, t) / v_hi.of_t(z1, t))
