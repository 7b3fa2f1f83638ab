"""The maps psi, phi and A at finite truncation.

* ``psi(a) = sum a_n e_n`` sends truncated sequences to spans of outer
  functions on G1.
* ``phi(f)_n = (2 eps_n)^-1 int_{J_n} f*(e^{it}) chi_n(t) dt`` with
  ``chi_n = exp(-i arg e_n*)`` reads coefficients back from boundary values.
* ``B = phi psi - id`` is a seminorm contraction; ``A = sum (-B)^m`` inverts
  ``phi psi`` and ``(psi A) phi`` is a projection.
* ``A f (z1) = f(z1, 0)`` restricts functions on G1 x C.

``f*`` is taken from extrapolated radial limits and ``chi_n`` from the
closed-form conjugate function, so the diagonal identity ``(phi psi)_nn = 1``
compares two independent boundary-phase computations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .geometry import AngularFamilies
from .outer import (BoundaryProfile, exponent, exponent_polar, phase_pv, radial_limit)
from .seq_space import FiniteSeq, SeqWeight, seminorm
from .weights import (AngularWeight, ProductWeight, make_canonical_wbar, make_uk,
                      restriction_constant)


# ---------------------------------------------------------------- psi side

@dataclass(frozen=True)
class SpanBasis:
    """``h_n`` for ``n = 1..N`` on a fixed point set (rows are ``n``)."""

    z: np.ndarray
    h: np.ndarray
    tail: np.ndarray

    @property
    def size(self) -> int:
        return self.h.shape[0]

    def moduli(self) -> np.ndarray:
        return np.exp(self.h.real)

    def concat(self, other: "SpanBasis") -> "SpanBasis":
        if other.size != self.size:
            raise ValueError("bases have different truncations")
        return SpanBasis(np.concatenate([self.z, other.z]),
                         np.concatenate([self.h, other.h], axis=1),
                         np.concatenate([self.tail, other.tail], axis=1))


def span_basis(z, N: int, families: AngularFamilies) -> SpanBasis:
    z = np.asarray(z, dtype=complex).ravel()
    h = np.empty((N, z.size), dtype=complex)
    tail = np.empty((N, z.size))
    for n in range(1, N + 1):
        e = exponent(n, z, families)
        h[n - 1], tail[n - 1] = e.value, e.tail_bound
    return SpanBasis(z, h, tail)


def span_basis_polar(delta, off, base: float, N: int, families: AngularFamilies) -> SpanBasis:
    """Like ``span_basis`` at ``(1 - delta) e^{i(base + off)}``, keeping full
    precision for points far closer to the circle than rounding ``z`` allows."""
    delta, off = np.broadcast_arrays(np.asarray(delta, float).ravel(), np.asarray(off, float).ravel())
    h = np.empty((N, delta.size), dtype=complex)
    tail = np.empty((N, delta.size))
    for n in range(1, N + 1):
        e = exponent_polar(n, families, delta, off, base)
        h[n - 1], tail[n - 1] = e.value, e.tail_bound
    z = (1.0 - delta) * np.exp(1j * (base + off))
    return SpanBasis(z, h, tail)


@dataclass(frozen=True)
class SpanElement:
    """The function ``sum_n a_n e_n`` on G1."""

    coefficients: FiniteSeq
    families: AngularFamilies

    def evaluate(self, z=None, basis: Optional[SpanBasis] = None) -> tuple[np.ndarray, np.ndarray]:
        """Values and an absolute error bound from the truncated exponents."""
        a = self.coefficients.coefficients
        if basis is None:
            basis = span_basis(z, a.size, self.families)
        if basis.size < a.size:
            raise ValueError("basis is shorter than the coefficient support")
        terms = np.exp(basis.h[: a.size])
        vals = a @ terms
        err = np.abs(a) @ (np.abs(terms) * np.expm1(basis.tail[: a.size]))
        return vals, err


def psi(a: FiniteSeq, families: AngularFamilies) -> SpanElement:
    return SpanElement(a, families)


@dataclass(frozen=True)
class PsiReport:
    measured: float
    seminorm: float
    bound: float
    allowance: float
    samples: int

    @property
    def ok(self) -> bool:
        return self.measured <= self.bound + self.allowance


def psi_seminorm_check(a: FiniteSeq, lam: SeqWeight, families: AngularFamilies,
                       basis: SpanBasis, constant: float = 3.0) -> PsiReport:
    """``p_wbar(psi a) <= 3 p_lam(a)`` on the points of ``basis``.

    ``wbar`` is the canonical weight with plateaus ``lam``.
    """
    w = make_canonical_wbar(lam, families)
    vals, err = psi(a, families).evaluate(basis=basis)
    wz = w.at(basis.z)
    measured = float(np.max(wz * np.abs(vals))) if vals.size else 0.0
    allowance = float(np.max(wz * err)) + 1e-12 if vals.size else 0.0
    p = seminorm(a, lam)
    return PsiReport(measured, p, constant * p, allowance, int(basis.z.size))


# ---------------------------------------------------------------- phi side

def graded_mesh(h: float, levels: int, order: int = 16) -> tuple[np.ndarray, np.ndarray]:
    """Open Gauss nodes on ``[-h, h]`` graded geometrically toward both ends.

    On each half the distance ``x`` to the nearer endpoint is split into
    ``[h 2^-l-1, h 2^-l]`` for ``l < levels`` plus ``[0, h 2^-levels]``.
    """
    g, gw = np.polynomial.legendre.leggauss(order)
    edges = [0.0] + [h * 2.0 ** -l for l in range(levels, -1, -1)]
    xs, ws = [], []
    for lo, hi in zip(edges, edges[1:]):
        xs.append(lo + (hi - lo) * 0.5 * (g + 1.0))
        ws.append((hi - lo) * 0.5 * gw)
    x = np.concatenate(xs)
    w = np.concatenate(ws)
    off = np.concatenate([-h + x, h - x[::-1]])
    return off, np.concatenate([w, w[::-1]])


@dataclass
class ArcQuadrature:
    """Quadrature data on one arc ``J_n`` at two refinement levels."""

    n: int
    offsets: list[np.ndarray]
    weights: list[np.ndarray]
    chi: list[np.ndarray] = field(default_factory=list)
    chi_err: list[np.ndarray] = field(default_factory=list)
    # (j -> [per-level e_j* values]), (j -> [per-level phase errors])
    boundary: dict = field(default_factory=dict)
    boundary_err: dict = field(default_factory=dict)


class BoundaryTables:
    """Boundary values of ``e_1..e_N`` and ``chi_n`` on graded meshes of ``J_n``."""

    def __init__(self, families: AngularFamilies, N: int, levels: int = 6, order: int = 16,
                 phase_method: str = "radial"):
        if N > families.n_max:
            raise ValueError("operator truncation exceeds n_max")
        if levels < 2:
            raise ValueError("need at least two mesh levels for an error estimate")
        self.families, self.N, self.levels, self.order = families, N, levels, order
        self.phase_method = phase_method
        self.arcs: dict[int, ArcQuadrature] = {}
        for n in range(1, N + 1):
            h = families.eps(n)
            meshes = [graded_mesh(h, lv, order) for lv in (levels, levels - 1)]
            arc = ArcQuadrature(n, [m[0] for m in meshes], [m[1] for m in meshes])
            base = families.theta(n)
            for off in arc.offsets:
                ph, tail = phase_pv(n, families, off, base)
                arc.chi.append(np.exp(-1j * ph))
                arc.chi_err.append(tail)
            for j in range(1, N + 1):
                modulus = BoundaryProfile(j, families).value_on_arc(n)
                vals, errs = [], []
                for off in arc.offsets:
                    ph, err = self._phase(j, off, base)
                    vals.append(modulus * np.exp(1j * ph))
                    errs.append(err)
                arc.boundary[j] = vals
                arc.boundary_err[j] = errs
            self.arcs[n] = arc

    def _phase(self, j: int, off: np.ndarray, base: float):
        if self.phase_method == "radial":
            lim = radial_limit(j, self.families, off, base)
            return lim.value.imag, lim.err + lim.tail
        if self.phase_method == "pv":
            return phase_pv(j, self.families, off, base)
        raise ValueError(f"unknown phase method {self.phase_method!r}")

    def boundary_sum(self, a: np.ndarray, n: int, level: int) -> tuple[np.ndarray, np.ndarray]:
        """``f* = sum_j a_j e_j*`` on ``J_n`` nodes and a modulus-weighted phase error."""
        arc = self.arcs[n]
        vals = np.zeros(arc.offsets[level].shape, dtype=complex)
        err = np.zeros(arc.offsets[level].shape)
        for j, aj in enumerate(a, start=1):
            if aj == 0:
                continue
            vals += aj * arc.boundary[j][level]
            err += abs(aj) * np.abs(arc.boundary[j][level]) * arc.boundary_err[j][level]
        return vals, err


@dataclass(frozen=True)
class PhiResult:
    values: FiniteSeq
    quad_err: np.ndarray
    phase_err: np.ndarray

    @property
    def err(self) -> np.ndarray:
        return self.quad_err + self.phase_err


def phi_apply(f: SpanElement, tables: BoundaryTables, tol: Optional[float] = None) -> PhiResult:
    """Coefficients ``(2 eps_n)^-1 int_{J_n} f* chi_n`` for ``n = 1..N``.

    Raises when a coordinate's error estimate exceeds ``tol``.
    """
    a = f.coefficients.coefficients
    if a.size > tables.N:
        raise ValueError("span element is longer than the tabulated truncation")
    fam = tables.families
    out = np.zeros(tables.N, dtype=complex)
    qerr = np.zeros(tables.N)
    perr = np.zeros(tables.N)
    for n in range(1, tables.N + 1):
        arc = tables.arcs[n]
        scale = 1.0 / (2.0 * fam.eps(n))
        q = []
        for level in (0, 1):
            fstar, ferr = tables.boundary_sum(a, n, level)
            q.append(scale * np.sum(arc.weights[level] * fstar * arc.chi[level]))
            if level == 0:
                perr[n - 1] = scale * np.sum(arc.weights[0] * (ferr + np.abs(fstar) * arc.chi_err[0]))
        out[n - 1] = q[0]
        qerr[n - 1] = abs(q[0] - q[1])
    res = PhiResult(FiniteSeq(out), qerr, perr)
    if tol is not None and np.any(res.err > tol):
        raise ValueError(f"phi error estimate {res.err.max():.3e} exceeds tolerance {tol:.3e}")
    return res


def phi_continuity(f: SpanElement, lam: SeqWeight, tables: BoundaryTables,
                   basis: Optional[SpanBasis] = None) -> tuple[float, float]:
    """``(max_n lam(n) |phi(f)_n|, sampled sup_z wbar(z) |f(z)|)``.

    The sup runs over ``basis`` points and the boundary values on the ``J_n``
    nodes, which are limits of points of ``D_n`` where ``wbar = lam(n)``.
    Since ``phi(f)_n`` is a positive-weight average of ``f* chi_n`` over those
    nodes, the first number never exceeds the second beyond rounding.
    """
    a = f.coefficients.coefficients
    res = phi_apply(f, tables)
    n_rng = np.arange(1, tables.N + 1)
    lhs = float(np.max(lam.values[: tables.N] * np.abs(res.values.coefficients)))
    rhs = 0.0
    for n in n_rng:
        fstar, _ = tables.boundary_sum(a, int(n), 0)
        rhs = max(rhs, lam(int(n)) * float(np.max(np.abs(fstar))))
    if basis is not None:
        w = make_canonical_wbar(lam, tables.families)
        vals, _ = f.evaluate(basis=basis)
        rhs = max(rhs, float(np.max(w.at(basis.z) * np.abs(vals))))
    return lhs, rhs


def chi_n(n: int, theta_off, families: AngularFamilies) -> tuple[np.ndarray, np.ndarray]:
    """``exp(-i arg e_n*)`` at ``theta_n + theta_off`` and its phase error bound."""
    ph, tail = phase_pv(n, families, theta_off, families.theta(n))
    return np.exp(-1j * ph), tail


# ---------------------------------------------------------------- phi psi

@dataclass(frozen=True)
class OperatorMatrix:
    """``(phi psi)_{nj}`` with per-entry error bounds (quadrature + phase)."""

    entries: np.ndarray
    err: np.ndarray

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def near_identity(self) -> np.ndarray:
        """``B = phi psi - id``."""
        return self.entries - np.eye(self.dim)

    @property
    def diag_residual(self) -> np.ndarray:
        return np.abs(np.diag(self.entries) - 1.0)

    def to_dict(self) -> dict:
        rows = []
        for n in range(self.dim):
            for j in range(self.dim):
                v = self.entries[n, j]
                rows.append([n + 1, j + 1, float(v.real), float(v.imag), float(self.err[n, j])])
        return {"dim": self.dim, "columns": ["n", "j", "re", "im", "err"], "entries": rows}


def build_operator_matrix(tables: BoundaryTables) -> OperatorMatrix:
    """Column ``j`` is ``phi(e_j)``."""
    N = tables.N
    M = np.zeros((N, N), dtype=complex)
    E = np.zeros((N, N))
    for j in range(1, N + 1):
        res = phi_apply(psi(FiniteSeq.unit(j, N), tables.families), tables)
        M[:, j - 1] = res.values.coefficients
        E[:, j - 1] = res.err
    return OperatorMatrix(M, E)


def offdiagonal_bound(n: int, j: int, families: AngularFamilies) -> float:
    """``eps_j 2^(-n-4)``: the modulus of ``e_j*`` on ``J_n``."""
    return math.ldexp(families.eps(j), -n - 4)


def weighted_operator_norm(B: np.ndarray, lam: SeqWeight) -> float:
    """Exact induced norm of ``B`` for ``p_lam`` (a weighted sup-norm)."""
    w = lam.values[: B.shape[0]]
    return float(np.max(w * (np.abs(B) @ (1.0 / w))))


@dataclass(frozen=True)
class ContractionReport:
    measured: float
    allowance: float
    bound: float
    ingredient_max: float
    ingredient_bound: float
    entry_ratio_max: float
    chain_max: float
    operator_norm: float
    trials: int

    @property
    def ok(self) -> bool:
        return (self.measured <= self.bound + self.allowance
                and self.ingredient_max <= self.ingredient_bound
                and self.entry_ratio_max <= 1.0 + 1e-6
                and self.chain_max <= 1.0 / 128.0)


def ingredient_sum(a: FiniteSeq, families: AngularFamilies) -> float:
    """``sum_j |a_j| eps_j``."""
    eps = np.array([families.eps(j) for j in range(1, a.size + 1)])
    return float(np.sum(np.abs(a.coefficients) * eps))


def contraction_check(M: OperatorMatrix, lam: SeqWeight, families: AngularFamilies,
                      rng: np.random.Generator, trials: int = 100,
                      rel_slack: float = 1e-3) -> ContractionReport:
    """``p_lam(B a) <= p_lam(a)/128`` on random unit ``a``, with ingredients.

    Also checks ``sum |a_j| eps_j <= p_lam(a)/8``, the entry bound
    ``|M_nj| <= eps_j 2^(-n-4)`` and the chain
    ``2^(-n-4) lam(n) sum_{j != n} |a_j| eps_j <= 1/128`` for each ``n``.
    """
    from .seq_space import random_unit_sequence

    N = M.dim
    B = M.near_identity
    w = lam.values[:N]
    measured, allow, ingr, chain = 0.0, 0.0, 0.0, 0.0
    for _ in range(trials):
        a = random_unit_sequence(lam, N, rng)
        x = a.coefficients
        measured = max(measured, float(np.max(w * np.abs(B @ x))))
        allow = max(allow, float(np.max(w * (M.err @ np.abs(x)))))
        ingr = max(ingr, ingredient_sum(a, families))
        eps = np.array([families.eps(j) for j in range(1, N + 1)])
        for n in range(1, N + 1):
            s = np.sum(np.abs(x) * eps) - abs(x[n - 1]) * eps[n - 1]
            chain = max(chain, math.ldexp(1.0, -n - 4) * w[n - 1] * s)
    ratios = [abs(M.entries[n - 1, j - 1]) / offdiagonal_bound(n, j, families)
              for n in range(1, N + 1) for j in range(1, N + 1) if j != n]
    norm = weighted_operator_norm(B, lam) + weighted_operator_norm(M.err, lam)
    return ContractionReport(
        measured=measured, allowance=allow, bound=(1.0 / 128.0) * (1.0 + rel_slack),
        ingredient_max=ingr, ingredient_bound=1.0 / 8.0,
        entry_ratio_max=max(ratios) if ratios else 0.0, chain_max=chain,
        operator_norm=norm, trials=trials,
    )


# ---------------------------------------------------------------- Neumann

def neumann_terms(delta: float, p: float, tol: float, max_terms: int = 10_000) -> int:
    """Smallest ``M`` with ``delta^(M+1) p / (1 - delta) < tol``."""
    if not 0.0 <= delta < 1.0:
        raise ValueError("Neumann series needs a certified contraction delta < 1")
    if p == 0.0 or delta == 0.0:
        return 0
    for m in range(max_terms):
        if delta ** (m + 1) * p / (1.0 - delta) < tol:
            return m
    raise ValueError("tolerance not reachable within max_terms")


@dataclass(frozen=True)
class NeumannResult:
    value: FiniteSeq
    terms: int
    delta: float


def neumann_invert(B: np.ndarray, a: FiniteSeq, lam: SeqWeight, tol: float,
                   delta: Optional[float]) -> NeumannResult:
    """``A a = sum_{m=0}^{M} (-1)^m B^m a`` with ``M`` from the certified ``delta``."""
    if delta is None:
        raise ValueError("no contraction certificate supplied")
    B = np.asarray(B, dtype=complex)
    p = seminorm(a, lam)
    M = neumann_terms(delta, p, tol)
    x = a.coefficients.astype(complex)
    term = x.copy()
    total = x.copy()
    for m in range(1, M + 1):
        term = -(B @ term)
        total = total + term
    return NeumannResult(FiniteSeq(total), M + 1, delta)


def neumann_residual(M: OperatorMatrix, Aa: FiniteSeq, a: FiniteSeq, lam: SeqWeight) -> float:
    """``p_lam(phi psi (A a) - a)``."""
    return seminorm(FiniteSeq(M.entries @ Aa.coefficients) - a, lam)


@dataclass(frozen=True)
class ProjectionReport:
    idempotence: float
    image_identity: float
    zero_image: float
    trials: int

    def ok(self, tol: float) -> bool:
        return max(self.idempotence, self.image_identity, self.zero_image) < tol


def projection_coefficients(M: OperatorMatrix, b: np.ndarray, lam: SeqWeight,
                            delta: float, tol: float = 1e-13) -> np.ndarray:
    """Coefficients of ``(psi A) phi f`` for ``f = sum b_j e_j`` (``phi f = M b``)."""
    phi_f = FiniteSeq(M.entries @ b)
    return neumann_invert(M.near_identity, phi_f, lam, tol, delta).value.coefficients


def projection_check(M: OperatorMatrix, lam: SeqWeight, delta: float,
                     rng: np.random.Generator, trials: int = 20) -> ProjectionReport:
    """Idempotence of ``P = (psi A) phi`` on ``span{e_1..e_N}`` at coefficient level."""
    from .seq_space import random_unit_sequence

    N = M.dim
    idem, ident = 0.0, 0.0
    for _ in range(trials):
        b = random_unit_sequence(lam, N, rng).coefficients
        c1 = projection_coefficients(M, b, lam, delta)
        c2 = projection_coefficients(M, c1, lam, delta)
        idem = max(idem, seminorm(FiniteSeq(c2 - c1), lam))
        # b is already psi of its coefficients, so P fixes it
        ident = max(ident, seminorm(FiniteSeq(c1 - b), lam))
    zero = seminorm(FiniteSeq(projection_coefficients(M, np.zeros(N, complex), lam, delta)), lam)
    return ProjectionReport(idem, ident, zero, trials)


# ---------------------------------------------------------------- G1 x C

@dataclass(frozen=True)
class RestrictionReport:
    k: int
    constant: float
    sup_w: float
    sup_v: float
    forward_ok: bool
    reverse_ok: bool

    @property
    def ok(self) -> bool:
        return self.forward_ok and self.reverse_ok


def restriction_A_check(k: int, g: SpanElement, wk: AngularWeight, z1,
                        t_grid=None, basis: Optional[SpanBasis] = None,
                        rtol: float = 1e-12) -> RestrictionReport:
    """For ``f(z1, z2) = g(z1)``: ``p_wk(A f) <= C_k p_vk(f)`` and ``p_vk(f) <= p_wk(g)``.

    The ``|z2|`` grid always contains ``k + 1``, where ``u_k = 1/C_k``.
    """
    z1 = np.asarray(z1, dtype=complex).ravel()
    if t_grid is None:
        t_grid = [0.0, 0.5, float(k), k + 0.5, k + 1.0, k + 2.0, 10.0, 100.0, 1e4]
    t = np.union1d(np.asarray(t_grid, dtype=float), [k + 1.0])
    vals, _ = g.evaluate(z1, basis=basis)
    gw = wk.at(z1) * np.abs(vals)
    u = make_uk(k)
    vk = np.stack([u(z1, tt) for tt in t]) * gw[None, :]
    sup_w = float(gw.max())
    sup_v = float(vk.max())
    c = restriction_constant(k)
    return RestrictionReport(k, c, sup_w, sup_v,
                             forward_ok=sup_w <= c * sup_v * (1 + rtol),
                             reverse_ok=sup_v <= sup_w * (1 + rtol))


def constant_extension(g: SpanElement):
    """``gbar(z1, z2) = g(z1)``."""
    def gbar(z1, z2):
        vals, _ = g.evaluate(np.asarray(z1))
        return np.broadcast_to(vals, np.broadcast(np.asarray(z1), np.asarray(z2)).shape)
    return gbar


def product_level(base: AngularWeight, k: int) -> ProductWeight:
    return ProductWeight(base, k)
