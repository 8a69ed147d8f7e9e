"""Mixing/chaos criteria for shifts, hypercyclicity coverage, ergodic probes.

Density and convergence are never certified here: coverage reports and
Cauchy tests are evidence at desk scale.  Ergodic probes exploit structure
where it is exact (a backward-shift orbit of a finitely supported vector
dies in finitely many steps, and inner products along one-directional
shift orbits vanish once the support has moved past the test vector), so
dyadic Cauchy ladders up to 2^20 cost almost nothing in those cases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .core import (
    INTS,
    NAT,
    BlockTZ,
    OperatorSpec,
    PairVec,
    ParameterError,
    PolyRatio,
    Polynomial,
    PowerRatio,
    SparseVec,
    p_norm,
    vec_scale,
    vec_sub,
    weight_at,
    weight_product,
)
from .powers import _MatrixOrbit, _CesaroAccumulator, _shift_kind, _unwrap_scalar, make_orbit
from .classify import DEFAULT_SEED

__all__ = [
    "MixingVerdict",
    "ChaosVerdict",
    "CoverageReport",
    "ErgodicVerdict",
    "mixing_criterion_backward_shift",
    "chaos_criterion_shift_adjoint",
    "hypercyclicity_probe",
    "balanced_witness",
    "circle_cell_count",
    "mean_ergodic_probe",
    "weak_ergodic_probe",
]

MIXING_TOL = 1e-2
MIXING_N_CLOSED = 2**40
MIXING_N_NUMERIC = 2**20
SUMMABILITY_TERMS = 10**4
CAUCHY_REL_TOL = 1e-6


@dataclass(frozen=True)
class MixingVerdict:
    status: str  # "mixing_evidence" | "fails"
    samples: tuple[tuple[int, float], ...]  # (n, inverse weight product)
    closed_form: bool

    def to_dict(self) -> dict:
        return {"status": self.status, "samples": [list(s) for s in self.samples], "closed_form": self.closed_form}


@dataclass(frozen=True)
class ChaosVerdict:
    status: str  # "chaotic" | "mixing_only" | "neither"
    degree: int
    summability: dict | None

    def to_dict(self) -> dict:
        return {"status": self.status, "degree": self.degree, "summability": self.summability}


@dataclass(frozen=True)
class CoverageReport:
    region_half_width: float
    cell_size: float
    hits: frozenset
    coverage_fraction: float
    n_used: int
    orbit_magnitude_max: float

    def cells_per_side(self) -> int:
        return int(math.ceil(2.0 * self.region_half_width / self.cell_size))

    def to_dict(self, verbose: bool = False) -> dict:
        out = {
            "region_half_width": self.region_half_width,
            "cell_size": self.cell_size,
            "hit_count": len(self.hits),
            "coverage_fraction": self.coverage_fraction,
            "n_used": self.n_used,
            "orbit_magnitude_max": self.orbit_magnitude_max,
        }
        if verbose:
            out["hits"] = sorted([list(c) for c in self.hits])
        return out


@dataclass(frozen=True)
class ErgodicVerdict:
    mode: str  # "mean" | "weak"
    status: str  # "converged" | "diverged" | "inconclusive"
    limit_estimate: object
    final_gap: float
    gaps: tuple[tuple[int, float], ...]  # doubling gaps (M_2n vs M_n)
    parity_gaps: tuple[tuple[int, float], ...] = ()  # consecutive gaps (M_{n+1} vs M_n)

    def to_dict(self) -> dict:
        limit = self.limit_estimate
        if isinstance(limit, complex):
            limit = [limit.real, limit.imag]
        return {
            "mode": self.mode,
            "status": self.status,
            "limit_estimate": limit,
            "final_gap": self.final_gap,
            "gaps": [list(g) for g in self.gaps],
            "parity_gaps": [list(g) for g in self.parity_gaps],
        }


# ---------------------------------------------------------------------------
# mixing / chaos criteria


def _dyadic_upto(n_max: int) -> list[int]:
    out = []
    n = 1
    while n <= n_max:
        out.append(n)
        n *= 2
    return out


def mixing_criterion_backward_shift(rule, n_max: int | None = None) -> MixingVerdict:
    """Inverse partial weight products at dyadic n; evidence when they sink below 1e-2.

    PowerRatio and PolyRatio rules telescope, so the dyadic ladder extends to
    2^40 at closed-form cost; explicit weight lists are accumulated numerically
    up to 2^20.
    """
    closed = isinstance(rule, (PowerRatio, PolyRatio))
    if n_max is None:
        n_max = MIXING_N_CLOSED if closed else MIXING_N_NUMERIC
    start = max(1, 2 - rule.offset) if isinstance(rule, PowerRatio) else 1
    samples = []
    if closed:
        for n in _dyadic_upto(n_max):
            if n < start:
                samples.append((n, 1.0))
                continue
            samples.append((n, 1.0 / weight_product(rule, start, n - start + 1)))
    else:
        log_acc = 0.0
        prev = start - 1
        for n in _dyadic_upto(n_max):
            if n < start:
                samples.append((n, 1.0))
                continue
            for k in range(prev + 1, n + 1):
                log_acc += math.log(weight_at(rule, k))
            prev = n
            samples.append((n, math.exp(-log_acc)))
    tail = [v for _, v in samples[-3:]]
    decreasing = all(a > b for a, b in zip(tail, tail[1:]))
    if samples[-1][1] < MIXING_TOL and decreasing:
        status = "mixing_evidence"
    else:
        status = "fails"
    return MixingVerdict(status, tuple(samples), closed)


def chaos_criterion_shift_adjoint(p: Polynomial, side: str = "unilateral") -> ChaosVerdict:
    """Dynamics of the adjoint of the shift with weight(k)^2 = p(k+1)/p(k).

    The analytic rule is driven by deg p (the shift is a strict (deg p + 1)-
    isometry): degree >= 2 gives a chaotic adjoint, degree 1 mixing only,
    degree 0 neither.  For the unilateral case a summability witness
    sum p(1)/p(n+1) is reported with an integral tail bound.
    """
    if side not in ("unilateral", "bilateral"):
        raise ParameterError(f"side must be unilateral or bilateral, got {side!r}")
    from .isometry import shift_from_polynomial

    shift_from_polynomial(p, "forward", INTS if side == "bilateral" else NAT)
    degree = p.degree
    if degree >= 2:
        status = "chaotic"
    elif degree == 1:
        status = "mixing_only"
    else:
        status = "neither"
    summability = None
    if side == "unilateral":
        p1 = p(1.0)
        ns = np.arange(1, SUMMABILITY_TERMS + 1, dtype=float)
        terms = p1 / p(ns + 1.0)
        partial = float(math.fsum(terms.tolist()))
        if degree >= 2:
            tail, _ = integrate.quad(lambda t: p1 / p(t + 1.0), SUMMABILITY_TERMS, np.inf)
            tail = float(tail)
            converges = True
        else:
            tail = math.inf
            converges = False
        summability = {
            "partial_sum": partial,
            "terms": SUMMABILITY_TERMS,
            "tail_bound": tail,
            "converges": converges,
        }
    return ChaosVerdict(status, degree, summability)


# ---------------------------------------------------------------------------
# numerical hypercyclicity


def balanced_witness(spec, seed: int = DEFAULT_SEED) -> SparseVec:
    """Seeded unit witness for the coverage probe of a dim-4-style construction.

    For chain length 2 the pairing values n(c lam1^(n-1) + d lam2^(n-1)) + O(1)
    re-enter a fixed window infinitely often only when |c| = |d|; the seeded
    entries are rescaled to balance the two block coefficients exactly.
    """
    from .core import DiagPlusNilpotent, FiniteRange, make_vector

    if not isinstance(spec, DiagPlusNilpotent):
        raise ParameterError("balanced_witness expects the diagonal-plus-nilpotent construction")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    raw = rng.standard_normal(2 * spec.dim)
    vals = [complex(raw[2 * i], raw[2 * i + 1]) for i in range(spec.dim)]
    if spec.ell == 2:
        i1, i2 = 1, 2  # zero-based positions of e2 and e_{ell+1}
        j2 = 3  # e_{ell+2}
        c = abs(spec.lam1 - 1.0) * abs(vals[i1]) * abs(vals[0])
        d_unit = abs(spec.lam2 - 1.0) * abs(vals[i2])
        vals[j2] = vals[j2] / abs(vals[j2]) * (c / d_unit)
    vec = make_vector(FiniteRange(spec.dim), list(enumerate(vals, start=1)))
    norm = p_norm(vec, 2)
    return make_vector(FiniteRange(spec.dim), [(k, v / norm) for k, v in vec.entries.items()])


def circle_cell_count(r: float, cell: float, radius: float = 1.0) -> int:
    """Number of grid cells of the coverage region intersecting |z| = radius."""
    per_side = int(math.ceil(2.0 * r / cell))
    count = 0
    for i in range(per_side):
        x0 = -r + i * cell
        x1 = x0 + cell
        for j in range(per_side):
            y0 = -r + j * cell
            y1 = y0 + cell
            dx = 0.0 if x0 <= 0.0 <= x1 else min(abs(x0), abs(x1))
            dy = 0.0 if y0 <= 0.0 <= y1 else min(abs(y0), abs(y1))
            dmin = math.hypot(dx, dy)
            dmax = math.hypot(max(abs(x0), abs(x1)), max(abs(y0), abs(y1)))
            if dmin <= radius <= dmax:
                count += 1
    return count


def hypercyclicity_probe(
    spec: OperatorSpec, x, y, n_max: int, r: float = 40.0, cell: float = 1.0
) -> CoverageReport:
    """Grid coverage of the pairing values <T^n x, y> for n = 0..n_max.

    Values are binned into the [-r, r]^2 grid; coverage is the hit fraction.
    Evidence only: a fixed window sees a prefix of an unbounded orbit, and the
    report records the max orbit magnitude so callers can rescale r.
    """
    if n_max < 1:
        raise ParameterError("n_max must be >= 1")
    if r <= 0 or cell <= 0:
        raise ParameterError("region half-width and cell size must be positive")
    per_side = int(math.ceil(2.0 * r / cell))
    orbit = make_orbit(spec, x, n_max)
    hits: set[tuple[int, int]] = set()
    mag_max = 0.0
    if isinstance(orbit, _MatrixOrbit):
        yv = _MatrixOrbit._embed(y, orbit.matrix.shape[0], orbit.pair)

        def pairing() -> complex:
            return complex(np.vdot(yv, orbit.vals))

    else:

        def pairing() -> complex:
            return orbit.inner_with(y)

    for n in range(n_max + 1):
        if n:
            orbit.step()
        v = pairing()
        mag = abs(v)
        if mag > mag_max:
            mag_max = mag
        re, im = v.real, v.imag
        if -r <= re < r and -r <= im < r:
            hits.add((int((re + r) // cell), int((im + r) // cell)))
    fraction = len(hits) / float(per_side * per_side)
    return CoverageReport(r, cell, frozenset(hits), fraction, n_max, mag_max)


# ---------------------------------------------------------------------------
# ergodic probes


def _family_converged(gaps: list[tuple[int, float]], threshold: float) -> bool:
    if not gaps:
        return True
    final = gaps[-1][1]
    tail = [g for _, g in gaps[-3:]]
    trending = all(a >= b for a, b in zip(tail, tail[1:])) or all(g <= threshold for g in tail)
    return final <= threshold and trending


def _family_diverged(gaps: list[tuple[int, float]], threshold: float) -> bool:
    if not gaps:
        return False
    final = gaps[-1][1]
    tail = [g for _, g in gaps[-3:]]
    peak = max(g for _, g in gaps)
    return peak > 0 and min(tail) >= 0.1 * peak and final > threshold


def _cauchy_verdict(
    mode: str,
    gaps: list[tuple[int, float]],
    parity_gaps: list[tuple[int, float]],
    limit_estimate,
    limit_size: float,
) -> ErgodicVerdict:
    """Convergence needs both gap families small; either one persisting means divergence.

    The doubling family alone can alias parity oscillations (powers of two are
    all even), which is exactly what the consecutive family catches.
    """
    final = gaps[-1][1] if gaps else 0.0
    threshold = CAUCHY_REL_TOL * (1.0 + limit_size)
    if _family_converged(gaps, threshold) and _family_converged(parity_gaps, threshold):
        status = "converged"
    elif _family_diverged(gaps, threshold) or _family_diverged(parity_gaps, threshold):
        status = "diverged"
    else:
        status = "inconclusive"
    return ErgodicVerdict(mode, status, limit_estimate, final, tuple(gaps), tuple(parity_gaps))


def mean_ergodic_probe(spec: OperatorSpec, x, n_max: int = 2**14, p: float = 2.0) -> ErgodicVerdict:
    """Cauchy test on ||M_{2n} x - M_n x||_p across dyadic n <= n_max.

    Once the orbit state is exactly zero the running sum is frozen and the
    remaining dyadic means are scalar multiples of it, so the ladder finishes
    analytically.
    """
    if n_max < 8:
        raise ParameterError("n_max must be >= 8")
    dyadic = _dyadic_upto(n_max)
    checkpoints = sorted(set(dyadic) | {n + 1 for n in dyadic if n + 1 <= n_max})
    orbit = make_orbit(spec, x, n_max)
    acc = _CesaroAccumulator(orbit, n_max)
    acc.add_current()
    snapshots: dict[int, object] = {}
    stepped = 0
    frozen_sum = None
    for n in checkpoints:
        while stepped < n and not orbit.dead:
            orbit.step()
            acc.add_current()
            stepped += 1
        if orbit.dead and stepped < n:
            if frozen_sum is None:
                frozen_sum = vec_scale(float(acc.count), acc.mean_vector())
            snapshots[n] = vec_scale(1.0 / (n + 1), frozen_sum)
        else:
            snapshots[n] = acc.mean_vector()
    gaps = []
    parity_gaps = []
    for n in dyadic:
        if 2 * n in snapshots:
            gaps.append((n, p_norm(vec_sub(snapshots[2 * n], snapshots[n]), p)))
        if n + 1 in snapshots:
            parity_gaps.append((n, p_norm(vec_sub(snapshots[n + 1], snapshots[n]), p)))
    limit_norm = p_norm(snapshots[checkpoints[-1]], p)
    return _cauchy_verdict("mean", gaps, parity_gaps, limit_norm, limit_norm)


def _inner_stream_stop(spec: OperatorSpec, x, y) -> int | None:
    """Index beyond which <T^k x, y> is structurally zero, if detectable."""
    _, base = _unwrap_scalar(spec)
    margin = 0
    if isinstance(base, BlockTZ):
        _, inner_base = _unwrap_scalar(base.inner)
        kind = _shift_kind(inner_base)
        margin = 2
    else:
        kind = _shift_kind(base)
    if kind is None:
        return None

    def bounds(v):
        if isinstance(v, PairVec):
            supp = v.top.support() + v.bottom.support()
        else:
            supp = v.support()
        if not supp:
            return None
        return min(supp), max(supp)

    bx, by = bounds(x), bounds(y)
    if bx is None or by is None:
        return 0
    direction = kind[0]
    if direction > 0:
        stop = by[1] - bx[0]
    else:
        stop = bx[1] - by[0]
    return max(stop + margin, 0)


def weak_ergodic_probe(spec: OperatorSpec, x, y, n_max: int = 2**14) -> ErgodicVerdict:
    """Cauchy test on <M_n(T) x, y> across dyadic n <= n_max.

    For one-directional shifts (and their BlockTZ extensions) the pairing
    stream vanishes once the orbit support passes y, so the partial sums
    freeze and the remaining checkpoints are evaluated analytically.
    """
    if n_max < 8:
        raise ParameterError("n_max must be >= 8")
    dyadic = _dyadic_upto(n_max)
    checkpoints = sorted(set(dyadic) | {n + 1 for n in dyadic if n + 1 <= n_max})
    stop = _inner_stream_stop(spec, x, y)
    hard_stop = n_max if stop is None else min(stop, n_max)
    orbit = make_orbit(spec, x, hard_stop)
    total = complex(0.0)
    comp = complex(0.0)

    def add(value: complex) -> None:
        nonlocal total, comp
        yv = value - comp
        t = total + yv
        comp = (t - total) - yv
        total = t

    add(orbit.inner_with(y))
    mus: dict[int, complex] = {}
    stepped = 0
    for n in checkpoints:
        while stepped < n and stepped < hard_stop and not orbit.dead:
            orbit.step()
            add(orbit.inner_with(y))
            stepped += 1
        mus[n] = total / (n + 1)
    gaps = [(n, abs(mus[2 * n] - mus[n])) for n in dyadic if 2 * n in mus]
    parity_gaps = [(n, abs(mus[n + 1] - mus[n])) for n in dyadic if n + 1 in mus]
    limit = mus[checkpoints[-1]]
    return _cauchy_verdict("weak", gaps, parity_gaps, limit, abs(limit))
