"""The verification battery: one record per quantitative inequality.

Every record states the measured quantity, the bound it must respect, the
margin and how it was obtained:

``certified``   closed-form evaluation with an explicit truncation bound,
``arithmetic``  a pure arithmetic identity or inequality,
``sampled``     a sup/inf estimated on a finite point set.

The report is a pure function of the configuration, so two runs with the
same configuration produce byte-identical JSON.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import geometry as geo
from . import operators as ops
from . import outer
from .seq_space import (FiniteSeq, KoetheMatrix, SeqWeight, above_floor, default_matrix,
                        is_in_system, normalize_seq_weight, random_normalized_weight,
                        random_unit_sequence, seminorm, with_witnesses)
from .weights import (MinCombination, ProductWeight, floor_weight, lemma1_normalize,
                      level_ratio, make_canonical_wbar, make_wk, restriction_constant,
                      weight_transfer_sup)

log = logging.getLogger(__name__)

DEFAULT_TOLERANCES = {
    "poisson": 1e-10,
    "radial": 1e-6,
    "diagonal": 1e-6,
    "offdiagonal": 1e-6,
    "contraction": 1e-3,
    "neumann": 1e-9,
    "projection": 1e-6,
    "transfer": 1e-9,
}

# checks whose verdict rests on a quadrature or extrapolation error estimate
QUADRATURE_BACKED = ("radial", "diagonal", "offdiagonal", "neumann", "projection")


class ConfigError(ValueError):
    pass


@dataclass
class VerifyConfig:
    n_max: int = 12
    trunc_N: int = 8
    k_max: int = 12
    m_cut: int = 40
    tail_target: float = 1e-10
    g1_samples: int = 1000
    cn_samples: int = 1000
    cn_near_samples: int = 200
    psi_samples: int = 100_000
    lemma1_samples: int = 10_000
    boundary_angles: int = 20
    quad_levels: int = 6
    quad_order: int = 16
    trials: int = 100
    seq_weights: int = 5
    projection_trials: int = 20
    restriction_levels: int = 5
    restriction_samples: int = 2000
    seed: int = 1993
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    out_dir: str = "verify_out"

    def validate(self) -> None:
        counts = {f.name: getattr(self, f.name) for f in dataclasses.fields(self)
                  if f.type in ("int", int) and f.name != "seed"}
        bad = [k for k, v in counts.items() if v < 1]
        if bad:
            raise ConfigError(f"counts must be positive: {', '.join(bad)}")
        if self.trunc_N > self.n_max:
            raise ConfigError("trunc_N cannot exceed n_max")
        if self.m_cut < self.n_max:
            raise ConfigError("m_cut must be at least n_max")
        if self.quad_levels < 2:
            raise ConfigError("quad_levels must be >= 2 (two levels give the error estimate)")
        unknown = set(self.tolerances) - set(DEFAULT_TOLERANCES)
        if unknown:
            raise ConfigError(f"unknown tolerance keys: {sorted(unknown)}")
        for k, v in self.tolerances.items():
            if not 0.0 <= v < 1.0:
                raise ConfigError(f"tolerance {k}={v} must lie in [0, 1)")

    def tol(self, key: str) -> float:
        return self.tolerances.get(key, DEFAULT_TOLERANCES[key])

    def to_dict(self, include_paths: bool = True) -> dict:
        """The resolved config; the output directory is left out of reports
        and hashes because it does not influence any computed value."""
        d = dataclasses.asdict(self)
        d["tolerances"] = {k: self.tol(k) for k in sorted(DEFAULT_TOLERANCES)}
        if not include_paths:
            d.pop("out_dir")
        return d

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(include_paths=False), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    @classmethod
    def from_dict(cls, doc: dict) -> "VerifyConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(doc) - names
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(**{k: v for k, v in doc.items() if k != "tolerances"})
        cfg.tolerances = {**DEFAULT_TOLERANCES, **doc.get("tolerances", {})}
        return cfg


@dataclass
class CheckRecord:
    name: str
    anchor: str
    quantity: float
    bound: float
    passed: bool
    status: str
    detail: dict = field(default_factory=dict)

    @property
    def margin(self) -> float:
        return self.bound - self.quantity

    def to_dict(self, provenance: str) -> dict:
        return {
            "name": self.name,
            "anchor": self.anchor,
            "quantity": _num(self.quantity),
            "bound": _num(self.bound),
            "margin": _num(self.margin),
            "pass": bool(self.passed),
            "status": self.status,
            "provenance": provenance,
            "detail": {k: _num(v) for k, v in sorted(self.detail.items())},
        }


def _num(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_num(v) for v in x]
    return x


@dataclass
class VerificationReport:
    config: VerifyConfig
    records: list[CheckRecord]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def summary(self) -> dict:
        n_pass = sum(r.passed for r in self.records)
        return {"total": len(self.records), "passed": n_pass,
                "failed": len(self.records) - n_pass}

    def to_dict(self) -> dict:
        prov = self.config.digest()
        return {
            "config": self.config.to_dict(include_paths=False),
            "config_hash": prov,
            "seed": self.config.seed,
            "summary": self.summary(),
            "records": [r.to_dict(prov) for r in self.records],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------- context

class Context:
    """Objects shared by several checks, built lazily in dependency order."""

    def __init__(self, cfg: VerifyConfig):
        self.cfg = cfg
        self.families = geo.AngularFamilies(cfg.n_max)
        self.matrix = default_matrix(cfg.n_max, cfg.k_max)
        self._tables = None
        self._opmatrix = None
        self._weights = None
        self._delta = None

    def rng(self, stream: int) -> np.random.Generator:
        return np.random.default_rng([self.cfg.seed, stream])

    @property
    def seq_weights(self) -> list[SeqWeight]:
        if self._weights is None:
            rng = self.rng(1)
            self._weights = [random_normalized_weight(self.matrix, rng)
                             for _ in range(self.cfg.seq_weights)]
        return self._weights

    @property
    def lemma1_weights(self) -> list[SeqWeight]:
        """Disc values of the normalized weights produced from ``w_2`` and ``w_5``."""
        w1 = make_wk(1, self.matrix, self.families)
        out = []
        for k in (2, 5):
            k = min(k, self.matrix.k_max)
            res = lemma1_normalize(make_wk(k, self.matrix, self.families), self.families,
                                   self.matrix, w1)
            out.append(res.lam)
        return out

    @property
    def tables(self) -> ops.BoundaryTables:
        if self._tables is None:
            self._tables = ops.BoundaryTables(self.families, self.cfg.trunc_N,
                                              self.cfg.quad_levels, self.cfg.quad_order)
        return self._tables

    @property
    def opmatrix(self) -> ops.OperatorMatrix:
        if self._opmatrix is None:
            self._opmatrix = ops.build_operator_matrix(self.tables)
        return self._opmatrix


def _unreachable(cfg: VerifyConfig, key: str) -> bool:
    return key in QUADRATURE_BACKED and cfg.tol(key) <= 0.0


def _record(cfg, name, anchor, quantity, bound, ok, status, tol_key=None, **detail):
    if tol_key is not None and _unreachable(cfg, tol_key):
        return CheckRecord(name, anchor, quantity, bound, False, "tolerance unreachable", detail)
    return CheckRecord(name, anchor, float(quantity), float(bound), bool(ok), status, detail)


# ---------------------------------------------------------------- geometry

def check_geometry(ctx: Context) -> list[CheckRecord]:
    cfg, fam = ctx.cfg, ctx.families
    recs = []
    ratio = max(fam.eps(n) / geo.eps_ceiling(n) for n in range(1, cfg.n_max + 1))
    recs.append(_record(cfg, "geometry.eps_schedule", "eps_n < 2^(-n-16) n^(-6)",
                        ratio, 1.0, ratio < 1.0, "arithmetic"))
    seq = fam.anchor_sequence()
    gap = min(b - a for a, b in zip(seq, seq[1:]))
    inner = max(fam.eps(n) / geo.plateau_halfwidth(n) for n in range(1, cfg.n_max + 1))
    recs.append(_record(cfg, "geometry.anchor_order", "J_n in I_n; plateaus and shoulders disjoint",
                        inner, 1.0, gap > 0 and inner < 1.0, "arithmetic", min_anchor_gap=gap))
    dev = max(geo.sector_deviation(n) / geo.plateau_halfwidth(n) for n in range(1, cfg.n_max + 1))
    recs.append(_record(cfg, "geometry.sector_inclusion", "D_n inside the sector over I_n",
                        dev, 1.0, dev <= 1.0, "arithmetic"))
    worst = math.inf
    for n in range(1, cfg.trunc_N + 1):
        d, _ = geo.min_kernel_distance(n, fam, geo.SamplingPlan(256, cfg.seed + n))
        worst = min(worst, d * 64.0 * n * n)
    recs.append(_record(cfg, "geometry.kernel_distance",
                        "|e^{it} - z| > 1/(2^6 n^2) for t in J_n, z in C_n",
                        -worst, -1.0, worst > 1.0, "sampled",
                        scaled_min_distance=worst))
    return recs


# ---------------------------------------------------------------- sequences

def check_sequences(ctx: Context) -> list[CheckRecord]:
    cfg, mat = ctx.cfg, ctx.matrix
    recs = []
    try:
        mat.check_invariants()
        ok = True
    except ValueError:
        ok = False
    inc = float(np.max(np.diff(mat.entries, axis=1))) if mat.k_max > 1 else 0.0
    recs.append(_record(cfg, "seq.koethe_matrix", "lam_{n,k+1} <= lam_{nk}, 1/n^2 < lam_nk <= 1",
                        inc, 0.0, ok and inc <= 0.0, "arithmetic"))
    rng = ctx.rng(2)
    worst_dom, floor_ok, member_ok = 0.0, True, True
    for _ in range(cfg.seq_weights):
        k = int(rng.integers(1, mat.k_max + 1))
        mu = with_witnesses(rng.uniform(0.1, 4.0) * mat.level(k) * rng.uniform(0.5, 1.0, mat.n_max), mat)
        lam, c = normalize_seq_weight(mu, mat)
        worst_dom = max(worst_dom, float(np.max(mu.values / (c * lam.values))))
        floor_ok &= bool(np.all(above_floor(lam.values)) and np.all(lam.values <= 1.0))
        member_ok &= is_in_system(lam, mat)
    recs.append(_record(cfg, "seq.normalize", "lam_bar = min(inf_k d_k lam_k, lam_1), d_k = max(c_k, 1)",
                        worst_dom, 1.0, worst_dom <= 1.0 + 1e-15 and floor_ok and member_ok,
                        "certified", floor=floor_ok, membership=member_ok))
    return recs


# ---------------------------------------------------------------- weights

def check_weights(ctx: Context) -> list[CheckRecord]:
    cfg, fam, mat = ctx.cfg, ctx.families, ctx.matrix
    recs = []
    n_cut = cfg.n_max
    wk = [make_wk(k, mat, fam, n_cut) for k in range(1, mat.k_max + 1)]
    err = 0.0
    for k, w in enumerate(wk, start=1):
        for n in range(1, n_cut + 1):
            lo, hi = fam.plateau(n)
            err = max(err, abs(w(fam.theta(n)) - mat.value(n, k)), abs(w(lo) - mat.value(n, k)),
                      abs(w(hi) - mat.value(n, k)), abs(w(fam.shoulder(n)) - 1.0))
        err = max(err, abs(w(0.0) - 1.0), abs(w(math.pi) - 1.0))
    theta = np.linspace(0.0, math.pi, 20001)
    vals = np.stack([w(theta) for w in wk])
    mono = float(np.max(np.diff(vals, axis=0)))
    recs.append(_record(cfg, "weights.plateau_shoulder", "w_k = lam_nk on I_n, 1 at s_n, 0 and pi; decreasing in k",
                        max(err, mono), 0.0, err == 0.0 and mono <= 0.0, "certified"))

    # dominating weights constant on the discs
    rng = ctx.rng(3)
    z = geo.sample_g1(cfg.lemma1_samples, cfg.seed + 3)
    disc_pts = {n: geo.sample_disc(n, 200, cfg.seed + 100 + n) for n in range(1, n_cut + 1)}
    floor = floor_weight(fam, n_cut)
    inputs = [("w_2", wk[1]), ("w_5", wk[min(4, len(wk) - 1)])]
    inputs += [(f"canonical_{i}", make_canonical_wbar(lam, fam, n_cut))
               for i, lam in enumerate(ctx.seq_weights)]
    worst_dom, worst_top, worst_floor, const_ok, plateau_ok, member_ok = 0.0, 0.0, 0.0, True, True, True
    for _, wp in inputs:
        res = lemma1_normalize(wp, fam, mat, wk[0], n_cut)
        wb = res.weight.at(z)
        worst_dom = max(worst_dom, float(np.max(res.constant * wp.at(z) - wb)))
        worst_top = max(worst_top, float(np.max(wb)))
        worst_floor = max(worst_floor, float(np.max(floor.at(z) - wb)))
        for n, pts in disc_pts.items():
            v = res.weight.at(pts)
            const_ok &= bool(np.all(v == res.lam(n)))
        n_arr = np.arange(1, n_cut + 1, dtype=float)
        plateau_ok &= bool(np.all(res.lam.values >= 1.0 / n_arr**2))
        member_ok &= is_in_system(res.lam, mat)
    ok = worst_dom <= 0.0 and worst_top <= 1.0 and worst_floor <= 0.0 and const_ok and plateau_ok and member_ok
    recs.append(_record(cfg, "weights.normalized_dominant", "C w' <= wbar <= 1, wbar >= w'', wbar constant on D_n, lam >= 1/n^2",
                        max(worst_dom, worst_top - 1.0, worst_floor), 0.0, ok, "sampled",
                        constant_on_discs=const_ok, plateau_floor=plateau_ok, membership=member_ok,
                        inputs=len(inputs)))

    # weight transfer sup over z2
    zs = geo.sample_g1(64, cfg.seed + 4)
    t = np.concatenate([np.linspace(0.0, 12.0, 24001), np.geomspace(12.0, 1e3, 2000)])
    gap, dom = 0.0, 0.0
    for i, z1 in enumerate(zs):
        k1 = 1 + i % 5
        k2 = 1 + (i * 3 + 1) % 5
        pa, pb = ProductWeight(wk[k1 - 1], k1), ProductWeight(wk[k2 - 1], k2)
        comb = MinCombination(((1.0, pa), (float(rng.uniform(0.5, 2.0)), pb)))
        for v in (pa, comb):
            exact = weight_transfer_sup(v, z1)
            brute = float(np.max(v.of_t(z1, t)))
            # the exact sup dominates every grid value and sits within a grid step of them
            gap = max(gap, brute - exact)
            if exact - brute > 1e-3:
                gap = max(gap, exact - brute)
        dom = max(dom, weight_transfer_sup(pa, z1) / (restriction_constant(k1) * wk[k1 - 1].at(z1)))
    recs.append(_record(cfg, "weights.transfer_sup", "wbar(z1) = sup_{z2} vbar(z1, z2) <= C_k w_k(z1)",
                        max(gap, dom - 1.0), cfg.tol("transfer"),
                        gap <= cfg.tol("transfer") and dom <= 1.0, "sampled",
                        brute_force_gap=gap, domination=dom))

    # condition (M)
    v1, v2 = ProductWeight(wk[0], 1), ProductWeight(wk[1], 2)
    z1 = 0.75j
    r_i = [level_ratio(v1, v2, z1, t) for t in (1e2, 1e4, 1e6)]
    ok_i = r_i[-1] > 10.0 and all(b > a for a, b in zip(r_i, r_i[1:]))
    recs.append(_record(cfg, "weights.condition_M_unbounded_z2", "sup_m |z2^(m)| = inf: v_k/v_{k+1} unbounded",
                        -r_i[-1], -10.0, ok_i, "certified", ratios=r_i))
    v3 = ProductWeight(wk[2], 3)
    r_ii = [level_ratio(v1, v3, (1.0 - 10.0**-j) * 1j, 1.0) for j in range(1, 7)]
    ok_ii = all(b > a for a, b in zip(r_ii, r_ii[1:])) and r_ii[-1] >= 10.0 * r_ii[0]
    recs.append(_record(cfg, "weights.condition_M_boundary", "inf_m d(z1^(m)) = 0: v_k/v_k' unbounded",
                        -r_ii[-1] / r_ii[0], -10.0, ok_ii, "certified", ratios=r_ii))
    return recs


# ---------------------------------------------------------------- outer functions

def check_outer(ctx: Context) -> list[CheckRecord]:
    cfg, fam = ctx.cfg, ctx.families
    recs = []
    rng = ctx.rng(5)
    m = 1000
    z = 0.99 * np.sqrt(rng.uniform(0, 1, m)) * np.exp(2j * math.pi * rng.uniform(0, 1, m))
    full = outer.herglotz_segment(z, 0.0, outer.TWO_PI).real
    cuts = np.sort(rng.uniform(0, outer.TWO_PI, 6))
    edges = np.concatenate([[0.0], cuts, [outer.TWO_PI]])
    parts = sum(outer.herglotz_segment(z, a, b) for a, b in zip(edges, edges[1:])).real
    rel = float(max(np.max(np.abs(full / outer.TWO_PI - 1)), np.max(np.abs(parts / outer.TWO_PI - 1))))
    recs.append(_record(cfg, "outer.poisson_normalization",
                        "int (1 - |z|^2)/|e^{it} - z|^2 dt = 2 pi",
                        rel, cfg.tol("poisson"), rel <= cfg.tol("poisson"), "certified", samples=m))

    worst, worst_tail = -math.inf, 0.0
    for n in range(1, cfg.n_max + 1):
        zz = geo.sample_g1(cfg.g1_samples, cfg.seed + 10 + n)
        h = outer.exponent(n, zz, fam, cfg.m_cut, cfg.tail_target)
        worst = max(worst, float(np.max(h.value.real)))
        worst_tail = max(worst_tail, float(np.max(h.tail_bound)))
    recs.append(_record(cfg, "outer.modulus_ceiling", "|e_n(z)| <= 1 on G1",
                        worst, 0.0, worst <= 0.0, "certified", max_tail=worst_tail,
                        n_max=cfg.n_max))

    worst_margin, chain_ok, num_ok = math.inf, True, True
    for n in range(1, cfg.trunc_N + 1):
        zz = geo.sample_complement(n, cfg.cn_samples, near=cfg.cn_near_samples, seed=cfg.seed + 30 + n)
        rep = outer.modulus_bound_check(n, zz, fam, m_cut=cfg.m_cut)
        worst_margin = min(worst_margin, rep.margin)
        num_ok &= rep.numeric_ok
    recs.append(_record(cfg, "outer.cn_bound", "|e_n(z)| <= 2^(-4-n) on C_n (log domain)",
                        -worst_margin, 0.0, num_ok, "sampled", min_log_margin=worst_margin))
    ratio = 0.0
    for n in range(1, cfg.n_max + 1):
        ratio = max(ratio, outer.jensen_chain_value(n, fam) / outer.cn_bound(n))
        chain_ok &= outer.jensen_chain_value(n, fam) <= outer.cn_bound(n)
    recs.append(_record(cfg, "outer.cn_chain", "pi^-1 eps_n 2^12 n^4 + eps_n <= 2^(-4-n)",
                        ratio, 1.0, chain_ok, "arithmetic"))

    worst_rel, cauchy_ok, phase_gap = 0.0, True, 0.0
    for n in range(1, cfg.trunc_N + 1):
        pts = outer.admissible_angles(n, fam, cfg.boundary_angles, cfg.seed)
        for base, off in pts:
            rep = outer.radial_convergence_check(n, off, fam, base=base)
            worst_rel = max(worst_rel, float(np.max(rep.rel_error)))
            cauchy_ok &= bool(np.all(rep.cauchy))
            pv, tail = outer.phase_pv(n, fam, off, base)
            rl = outer.radial_limit(n, fam, off, base)
            excess = float(np.max(np.abs(pv - rl.value.imag) - (rl.err + tail)))
            phase_gap = max(phase_gap, excess)
    # both phases are sums of ~m_cut terms of size <= 30, rounding ~1e-13
    phase_floor = 1e-12
    tol = cfg.tol("radial")
    recs.append(_record(cfg, "outer.boundary_modulus", "|e_n*(e^{it})| = phi_n(t) (radial limit)",
                        worst_rel, tol, worst_rel <= tol and cauchy_ok, "certified", tol_key="radial",
                        cauchy=cauchy_ok))
    recs.append(_record(cfg, "outer.boundary_phase", "radial limit phase = conjugate-function phase",
                        phase_gap, phase_floor, phase_gap <= phase_floor, "certified"))
    return recs


# ---------------------------------------------------------------- operators

def check_operators(ctx: Context) -> list[CheckRecord]:
    cfg, fam = ctx.cfg, ctx.families
    recs = []
    M = ctx.opmatrix
    N = M.dim
    diag = float(np.max(M.diag_residual))
    diag_err = float(np.max(np.diag(M.err)))
    tol = cfg.tol("diagonal")
    recs.append(_record(cfg, "operators.diagonal_identity", "(2 eps_n)^-1 int_{J_n} e_n* chi_n = 1",
                        diag, tol, diag <= tol and diag_err <= tol, "certified", tol_key="diagonal",
                        error_estimate=diag_err))
    # entry modulus plus its error estimate, relative to eps_j 2^(-n-4)
    ratio = max((abs(M.entries[n - 1, j - 1]) + M.err[n - 1, j - 1]) / ops.offdiagonal_bound(n, j, fam)
                for n in range(1, N + 1) for j in range(1, N + 1) if j != n)
    tol = cfg.tol("offdiagonal")
    recs.append(_record(cfg, "operators.offdiagonal", "|e_j*| = eps_j 2^(-n-4) on J_n",
                        ratio, 1.0 + tol, ratio <= 1.0 + tol, "certified", tol_key="offdiagonal"))

    rng = ctx.rng(6)
    ingr = 0.0
    for lam in ctx.seq_weights:
        for _ in range(cfg.trials):
            a = random_unit_sequence(lam, cfg.n_max, rng)
            ingr = max(ingr, ops.ingredient_sum(a, fam) / seminorm(a, lam))
    recs.append(_record(cfg, "operators.ingredient", "sum |a_j| eps_j <= (1/8) p_lam(a)",
                        ingr, 0.125, ingr <= 0.125, "sampled"))

    worst, worst_norm, chain = 0.0, 0.0, 0.0
    tol = cfg.tol("contraction")
    ok = True
    for lam in ctx.seq_weights + ctx.lemma1_weights:
        lamN = SeqWeight(lam.values[:N])
        rep = ops.contraction_check(M, lamN, fam, rng, cfg.trials, tol)
        worst = max(worst, rep.measured + rep.allowance)
        worst_norm = max(worst_norm, rep.operator_norm)
        chain = max(chain, rep.chain_max)
        ok &= rep.ok
    bound = (1.0 / 128.0) * (1.0 + tol)
    recs.append(_record(cfg, "operators.contraction", "p_lam((phi psi - id) a) <= (1/128) p_lam(a)",
                        worst, bound, ok and worst <= bound, "certified",
                        operator_norm=worst_norm, chain_max=chain, N=N))
    ctx._delta = worst_norm

    # psi norm on the sample battery
    basis = _psi_basis(ctx)
    worst_ratio = 0.0
    for lam in ctx.seq_weights:
        lamN = SeqWeight(lam.values[:N])
        cands = [FiniteSeq.unit(m, N, 1.0 / lam(m)) for m in range(1, N + 1)]
        cands += [random_unit_sequence(lamN, N, rng) for _ in range(10)]
        for a in cands:
            rep = ops.psi_seminorm_check(a, lam, fam, basis)
            worst_ratio = max(worst_ratio, (rep.measured + rep.allowance) / rep.seminorm)
    recs.append(_record(cfg, "operators.psi_norm", "p_wbar(psi a) <= 3 p_lam(a)",
                        worst_ratio, 3.0, worst_ratio <= 3.0, "sampled",
                        samples=int(basis.z.size)))

    # phi continuity
    worst_phi = 0.0
    for lam in ctx.seq_weights[:2]:
        lamN = SeqWeight(lam.values[:N])
        for _ in range(3):
            b = random_unit_sequence(lamN, N, rng)
            lhs, rhs = ops.phi_continuity(ops.psi(b, fam), lam, ctx.tables, basis)
            worst_phi = max(worst_phi, lhs / rhs)
    recs.append(_record(cfg, "operators.phi_continuity",
                        "lam(n) |phi(f)_n| <= sup_z wbar(z) |f(z)|",
                        worst_phi, 1.0 + 1e-9, worst_phi <= 1.0 + 1e-9, "sampled"))

    # Neumann inversion and the projection
    tol_n = cfg.tol("neumann")
    delta = worst_norm
    resid, terms, growth = 0.0, 0, 0.0
    for lam in ctx.seq_weights:
        lamN = SeqWeight(lam.values[:N])
        for _ in range(cfg.trials // 5 or 1):
            a = random_unit_sequence(lamN, N, rng)
            res = ops.neumann_invert(M.near_identity, a, lamN, 1e-12, delta)
            resid = max(resid, ops.neumann_residual(M, res.value, a, lamN))
            terms = max(terms, res.terms)
            # p(Aa) <= p(a) / (1 - delta)
            growth = max(growth, seminorm(res.value, lamN) * (1.0 - delta) / seminorm(a, lamN))
    ok = delta < 1.0 and resid < tol_n and terms <= 6 and growth <= 1.0 + 1e-12
    recs.append(_record(cfg, "operators.neumann", "A x = sum (-1)^m B^m x inverts phi psi",
                        resid, tol_n, ok, "certified", tol_key="neumann", terms=terms, delta=delta,
                        series_growth=growth))
    tol_p = cfg.tol("projection")
    idem = 0.0
    for lam in ctx.seq_weights:
        lamN = SeqWeight(lam.values[:N])
        rep = ops.projection_check(M, lamN, delta, rng, cfg.projection_trials)
        idem = max(idem, rep.idempotence, rep.image_identity, rep.zero_image)
    recs.append(_record(cfg, "operators.projection", "(psi A) phi is a projection",
                        idem, tol_p, idem < tol_p, "certified", tol_key="projection"))
    return recs


def _psi_basis(ctx: Context) -> ops.SpanBasis:
    cfg = ctx.cfg
    N = cfg.trunc_N
    per_disc = cfg.psi_samples // (4 * N)
    pts = []
    for m in range(1, N + 1):
        pts.append(geo.sample_disc(m, per_disc, cfg.seed + 200 + m))
        ring = per_disc // 4 or 1
        pts.append(geo.sample_complement(m, ring, near=ring, seed=cfg.seed + 300 + m))
    have = sum(p.size for p in pts)
    pts.append(geo.sample_common(max(cfg.psi_samples - have, 1), cfg.seed + 400))
    z = np.concatenate(pts)
    basis = ops.span_basis(z, N, ctx.families)
    # points a hair inside each J_m, where |e_m| approaches 1
    rng = ctx.rng(8)
    for m in range(1, N + 1):
        e = ctx.families.eps(m)
        count = max(cfg.psi_samples // (50 * N), 1)
        off = rng.uniform(-0.95, 0.95, count) * e
        delta = e * 10.0 ** -rng.uniform(2.0, 6.0, count)
        basis = basis.concat(ops.span_basis_polar(delta, off, ctx.families.theta(m), N, ctx.families))
    return basis


# ---------------------------------------------------------------- G1 x C

def check_restriction(ctx: Context) -> list[CheckRecord]:
    cfg, fam, mat = ctx.cfg, ctx.families, ctx.matrix
    N = cfg.trunc_N
    z1 = geo.sample_g1(cfg.restriction_samples, cfg.seed + 500)
    basis = ops.span_basis(z1, N, fam)
    rng = ctx.rng(7)
    worst_fwd, worst_rev, ok = 0.0, 0.0, True
    for k in range(1, cfg.restriction_levels + 1):
        wk = make_wk(k, mat, fam, cfg.n_max)
        for lam in ctx.seq_weights[:3]:
            b = random_unit_sequence(SeqWeight(lam.values[:N]), N, rng)
            rep = ops.restriction_A_check(k, ops.psi(b, fam), wk, z1, basis=basis)
            worst_fwd = max(worst_fwd, rep.sup_w / (rep.constant * rep.sup_v))
            worst_rev = max(worst_rev, rep.sup_v / rep.sup_w)
            ok &= rep.ok
    return [
        _record(cfg, "restriction.forward", "p_{w_k}(A f) <= C_k p_{v_k}(f), C_k = (k+2)^((k-1)/(2k))",
                worst_fwd, 1.0 + 1e-12, ok and worst_fwd <= 1.0 + 1e-12, "sampled",
                levels=cfg.restriction_levels),
        _record(cfg, "restriction.reverse", "p_{v_k}(gbar) <= p_{w_k}(g) since 0 <= u_k <= 1",
                worst_rev, 1.0 + 1e-12, ok and worst_rev <= 1.0 + 1e-12, "sampled"),
    ]


BATTERY: list[tuple[str, Callable[[Context], list[CheckRecord]]]] = [
    ("geometry", check_geometry),
    ("sequences", check_sequences),
    ("weights", check_weights),
    ("outer", check_outer),
    ("operators", check_operators),
    ("restriction", check_restriction),
]


def run_battery(cfg: VerifyConfig, only: Optional[list[str]] = None,
                timings: Optional[dict] = None) -> VerificationReport:
    """Run every check group in dependency order and collect the records.

    Wall-clock times per group go to ``timings`` when given; they are kept
    out of the report so that it stays reproducible.
    """
    import time

    cfg.validate()
    names = [name for name, _ in BATTERY]
    if only and set(only) - set(names):
        raise ConfigError(f"unknown check groups {sorted(set(only) - set(names))}")
    ctx = Context(cfg)
    records: list[CheckRecord] = []
    for name, fn in BATTERY:
        if only and name not in only:
            continue
        log.info("running %s checks", name)
        t0 = time.perf_counter()
        records.extend(fn(ctx))
        if timings is not None:
            timings[name] = time.perf_counter() - t0
    return VerificationReport(cfg, records)


# ---------------------------------------------------------------- CSV dumps

DUMPS = ("weight", "exponent", "matrix")


def dump_rows(what: str, cfg: VerifyConfig, k: int = 1, n: int = 1,
              grid: Optional[int] = None) -> tuple[list[str], list[list[float]]]:
    """Header and rows for one of the plot dumps.

    ``weight``    w_k on a uniform theta grid of [0, pi] (default 10^4 points),
    ``exponent``  h_n on a polar grid of G1 (default 100 x 100),
    ``matrix``    the entries of phi psi with their error bounds.
    """
    cfg.validate()
    fam = geo.AngularFamilies(cfg.n_max)
    if what == "weight":
        mat = default_matrix(cfg.n_max, cfg.k_max)
        w = make_wk(k, mat, fam, cfg.n_max)
        theta = np.linspace(0.0, math.pi, grid or 10_000)
        return ["theta_rad", "value"], [[float(t), float(v)] for t, v in zip(theta, w(theta))]
    if what == "exponent":
        g = grid or 100
        # open grid: the real segments and the circles bound G1
        r = geo.R_IN + (geo.R_OUT - geo.R_IN) * (np.arange(g) + 0.5) / g
        theta = math.pi * (np.arange(g) + 0.5) / g
        rr, tt = np.meshgrid(r, theta, indexing="ij")
        h = outer.exponent(n, rr * np.exp(1j * tt), fam, cfg.m_cut, cfg.tail_target)
        rows = [[float(a), float(b), float(c.real), float(c.imag), float(d)]
                for a, b, c, d in zip(rr.ravel(), tt.ravel(), h.value.ravel(), h.tail_bound.ravel())]
        return ["r", "theta_rad", "re_h", "im_h", "tail_bound"], rows
    if what == "matrix":
        tables = ops.BoundaryTables(fam, cfg.trunc_N, cfg.quad_levels, cfg.quad_order)
        doc = ops.build_operator_matrix(tables).to_dict()
        return list(doc["columns"]), doc["entries"]
    raise ValueError(f"unknown dump {what!r}; choose from {', '.join(DUMPS)}")


def dump_csv(what: str, cfg: VerifyConfig, path, **opts) -> str:
    """Write a dump to ``path``; I/O failures name the path."""
    import csv
    from pathlib import Path

    header, rows = dump_rows(what, cfg, **opts)
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(header)
            for row in rows:
                wr.writerow([repr(float(x)) if isinstance(x, float) else x for x in row])
    except OSError as exc:
        raise OSError(f"cannot write {what} dump to {path}: {exc.strerror or exc}") from exc
    return str(path)
