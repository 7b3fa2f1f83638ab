"""Weighted sequence spaces on the positive integers.

A Koethe-type matrix ``lam[n, k]`` (decreasing in the level ``k``) defines
the inductive limit ``k_inf = ind_k l_inf(lam_k)``; its projective hull
``K_inf`` is topologized by the weights ``lam_bar`` dominated by a multiple
of every ``lam_k``.  Everything here lives on a finite truncation
``1 <= n <= n_max``, ``1 <= k <= k_max``.  Indices are 1-based in the public
API and 0-based in the stored arrays.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np


def above_floor(values: np.ndarray) -> np.ndarray:
    """``values[n-1] > 1/n^2`` along the first axis, with equality allowed at
    ``n = 1`` (where ``1 < lam <= 1`` is impossible)."""
    values = np.asarray(values, dtype=float)
    n = np.arange(1, values.shape[0] + 1, dtype=float)
    floor = (1.0 / n**2).reshape((-1,) + (1,) * (values.ndim - 1))
    strict = values > floor
    strict[0] = values[0] >= 1.0
    return strict


def diag_unpair(n: int) -> tuple[int, int]:
    """Inverse of the diagonal enumeration of N x N.

    Diagonal ``s`` holds the pairs with ``m + j = s + 1`` and starts at index
    ``s(s-1)/2 + 1``; along a diagonal ``m`` increases and ``j`` decreases::

        1 -> (1,1)   2 -> (1,2)   3 -> (2,1)   4 -> (1,3)   5 -> (2,2) ...

    Since ``n >= s >= j`` the second coordinate never exceeds ``n``.
    """
    if n < 1:
        raise ValueError(f"index must be >= 1, got {n}")
    s = int((math.isqrt(8 * n) + 1) // 2)
    while s * (s - 1) // 2 >= n:
        s -= 1
    while (s + 1) * s // 2 < n:
        s += 1
    p = n - s * (s - 1) // 2
    return p, s + 1 - p


def koethe_grothendieck_entry(n: int, k: int) -> float:
    m, j = diag_unpair(n)
    return 1.0 / j if m <= k else 1.0


@dataclass(frozen=True)
class KoetheMatrix:
    """Materialized block ``entries[n-1, k-1] = lam_{nk}`` plus its rule."""

    entries: np.ndarray
    generator: Callable[[int, int], float] = field(repr=False, compare=False)

    @property
    def n_max(self) -> int:
        return self.entries.shape[0]

    @property
    def k_max(self) -> int:
        return self.entries.shape[1]

    def value(self, n: int, k: int) -> float:
        if 1 <= n <= self.n_max and 1 <= k <= self.k_max:
            return float(self.entries[n - 1, k - 1])
        return float(self.generator(n, k))

    def level(self, k: int) -> np.ndarray:
        """The weight ``lam_k`` restricted to ``1..n_max``."""
        if not 1 <= k <= self.k_max:
            raise ValueError(f"level {k} outside 1..{self.k_max}")
        return self.entries[:, k - 1]

    def check_invariants(self) -> None:
        if np.any(np.diff(self.entries, axis=1) > 0):
            raise ValueError("Koethe matrix must be non-increasing in k")
        if not np.all(above_floor(self.entries)) or np.any(self.entries > 1.0):
            raise ValueError("entries must satisfy 1/n^2 < lam_nk <= 1")

    def to_dict(self) -> dict:
        return {
            "n_max": self.n_max,
            "k_max": self.k_max,
            "entries": [
                [n + 1, k + 1, float(self.entries[n, k])]
                for n in range(self.n_max)
                for k in range(self.k_max)
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, doc: dict) -> "KoetheMatrix":
        entries = np.zeros((doc["n_max"], doc["k_max"]))
        for n, k, v in doc["entries"]:
            entries[n - 1, k - 1] = v
        frozen = entries.copy()

        def generator(n: int, k: int) -> float:
            return float(frozen[n - 1, k - 1])

        entries.setflags(write=False)
        return cls(entries, generator)


def default_matrix(n_max: int, k_max: int) -> KoetheMatrix:
    """The diagonally re-indexed Koethe-Grothendieck matrix.

    With ``(m, j) = diag_unpair(n)`` the entry is ``1/j`` when ``m <= k`` and
    ``1`` otherwise.
    """
    if n_max < 1 or k_max < 1:
        raise ValueError("n_max and k_max must be >= 1")
    entries = np.array(
        [[koethe_grothendieck_entry(n, k) for k in range(1, k_max + 1)]
         for n in range(1, n_max + 1)]
    )
    entries.setflags(write=False)
    mat = KoetheMatrix(entries, koethe_grothendieck_entry)
    mat.check_invariants()
    return mat


@dataclass(frozen=True)
class SeqWeight:
    """A weight ``lam_bar`` on ``1..n_max``, optionally with its witnesses.

    ``witnesses[k-1] = c_k`` certifies ``lam_bar <= c_k * lam_k`` on the
    truncation.
    """

    values: np.ndarray
    witnesses: Optional[tuple[float, ...]] = None

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size == 0:
            raise ValueError("weight needs a non-empty 1-d value array")
        if np.any(vals <= 0):
            raise ValueError("weights must be strictly positive")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def n_max(self) -> int:
        return self.values.size

    def __call__(self, n: int) -> float:
        return float(self.values[n - 1])

    @property
    def normalized(self) -> bool:
        n = np.arange(1, self.n_max + 1, dtype=float)
        return bool(np.all(self.values >= 1.0 / n**2) and np.all(self.values <= 1.0))

    def scaled(self, c: float) -> "SeqWeight":
        wit = None if self.witnesses is None else tuple(c * w for w in self.witnesses)
        return SeqWeight(c * self.values, wit)


def system_witnesses(values: np.ndarray, matrix: KoetheMatrix) -> tuple[float, ...]:
    """Smallest ``c_k`` with ``values <= c_k * lam_k`` on the truncation."""
    values = np.asarray(values, dtype=float)
    n = values.size
    if n > matrix.n_max:
        raise ValueError("weight is longer than the matrix truncation")
    ratios = values[:, None] / matrix.entries[:n, :]
    return tuple(float(c) for c in ratios.max(axis=0))


def with_witnesses(values: Sequence[float], matrix: KoetheMatrix) -> SeqWeight:
    vals = np.asarray(values, dtype=float)
    return SeqWeight(vals, system_witnesses(vals, matrix))


def is_in_system(lam: SeqWeight, matrix: KoetheMatrix, rtol: float = 0.0) -> bool:
    """Check the stored witnesses (or a scan if absent) on the truncation."""
    wit = lam.witnesses or system_witnesses(lam.values, matrix)
    n = lam.n_max
    bound = np.asarray(wit)[None, :] * matrix.entries[:n, : len(wit)]
    return bool(np.all(lam.values[:, None] <= bound * (1.0 + rtol)))


def normalize_seq_weight(mu: SeqWeight, matrix: KoetheMatrix) -> tuple[SeqWeight, float]:
    """Dominate ``mu`` by a normalized weight of the associated system.

    With ``d_k = max(c_k, 1)`` the result is
    ``lam_bar = min(inf_k d_k lam_k, lam_1)`` and ``mu <= C * lam_bar`` with
    ``C = d_1``.  The returned weight carries the witnesses ``c_k = d_k``.
    """
    if mu.witnesses is None:
        raise ValueError("mu must carry explicit witnesses c_k")
    if mu.n_max > matrix.n_max:
        raise ValueError("mu is longer than the matrix truncation")
    c = np.asarray(mu.witnesses, dtype=float)
    if c.size == 0:
        raise ValueError("empty witness list")
    k_used = min(c.size, matrix.k_max)
    d = np.maximum(c[:k_used], 1.0)
    block = matrix.entries[: mu.n_max, :k_used]
    lam_bar = np.minimum((d[None, :] * block).min(axis=1), block[:, 0])
    out = SeqWeight(lam_bar, tuple(float(x) for x in d))
    return out, float(d[0])


def random_normalized_weight(matrix: KoetheMatrix, rng: np.random.Generator,
                             n: Optional[int] = None) -> SeqWeight:
    """A random element of the associated system with ``1/n^2 <= lam <= 1``.

    Built by normalizing a random weight ``mu = s * lam_K`` with a random
    level ``K`` and scale ``s``, so it exercises ``normalize_seq_weight``.
    """
    n = matrix.n_max if n is None else n
    k = int(rng.integers(1, matrix.k_max + 1))
    s = float(rng.uniform(0.2, 3.0))
    mu = with_witnesses(s * matrix.entries[:n, k - 1], matrix)
    lam, _ = normalize_seq_weight(mu, matrix)
    return lam


@dataclass(frozen=True)
class FiniteSeq:
    """Finitely supported complex sequence; ``coefficients[n-1] = a_n``."""

    coefficients: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.coefficients, dtype=complex).ravel().copy()
        a.setflags(write=False)
        object.__setattr__(self, "coefficients", a)

    @classmethod
    def unit(cls, n: int, size: int, scale: complex = 1.0) -> "FiniteSeq":
        a = np.zeros(size, dtype=complex)
        a[n - 1] = scale
        return cls(a)

    @classmethod
    def zeros(cls, size: int) -> "FiniteSeq":
        return cls(np.zeros(size, dtype=complex))

    @property
    def size(self) -> int:
        return self.coefficients.size

    @property
    def support(self) -> list[int]:
        return [int(i) + 1 for i in np.flatnonzero(self.coefficients)]

    def check_fits(self, matrix: KoetheMatrix) -> None:
        if self.size > matrix.n_max:
            raise ValueError(f"support exceeds n_max={matrix.n_max}")

    def __add__(self, other: "FiniteSeq") -> "FiniteSeq":
        n = max(self.size, other.size)
        a = np.zeros(n, dtype=complex)
        a[: self.size] += self.coefficients
        a[: other.size] += other.coefficients
        return FiniteSeq(a)

    def __sub__(self, other: "FiniteSeq") -> "FiniteSeq":
        return self + other * (-1.0)

    def __mul__(self, c: complex) -> "FiniteSeq":
        return FiniteSeq(self.coefficients * c)

    __rmul__ = __mul__


def seminorm(a: FiniteSeq, lam: SeqWeight) -> float:
    """``p_lam(a) = sup_n lam(n) |a_n|`` over the support (0 if empty)."""
    if a.size == 0:
        return 0.0
    if a.size > lam.n_max:
        raise ValueError("weight is shorter than the sequence support")
    return float(np.max(lam.values[: a.size] * np.abs(a.coefficients)))


def random_unit_sequence(lam: SeqWeight, size: int,
                         rng: np.random.Generator) -> FiniteSeq:
    """Random complex ``a`` with ``p_lam(a) = 1``.

    Coordinates are drawn uniformly from the unit disc and scaled by
    ``1/lam(n)``; the result is then renormalized so the sup is attained.
    """
    r = np.sqrt(rng.uniform(0.0, 1.0, size))
    t = rng.uniform(0.0, 2 * np.pi, size)
    a = r * np.exp(1j * t) / lam.values[:size]
    seq = FiniteSeq(a)
    return seq * (1.0 / seminorm(seq, lam))
