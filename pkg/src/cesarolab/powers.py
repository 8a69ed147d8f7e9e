"""Iterated powers, exact power norms, Cesàro means, and the mean identity.

Orbits are driven by one of three engines chosen automatically: a dense
numpy window for infinite weighted shifts, a dense matrix loop for
finite-dimensional specs, and a generic sparse fallback.  All engines are
exact (no truncation); the window engine just stores the moving support as
a contiguous array.  Cesàro sums are Kahan-compensated so desk-scale sweeps
(N up to 1e6) do not drift above the package tolerances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    BackwardShift,
    BilateralShift,
    BlockTZ,
    Diagonal,
    DomainError,
    Explicit,
    FiniteRange,
    ForwardShift,
    NatFromOne,
    OperatorSpec,
    PairVec,
    ParameterError,
    PolyRatio,
    PowerRatio,
    ScalarMultiple,
    SparseVec,
    UnsupportedVariantError,
    apply,
    expects_pair,
    p_norm,
    spec_dim,
    spec_universe,
    to_matrix,
    weight_product,
)

__all__ = [
    "NormSeq",
    "power_apply",
    "power_norm_exact",
    "orbit_norms",
    "cesaro_apply",
    "cesaro_operator_norm",
    "cesaro_operator_norm_sweep",
    "media_residual",
    "media_residual_max",
    "block_tz_power_check",
    "largest_singular_value",
    "matrix_exponential",
    "make_orbit",
]

SHIFT_SUP_HORIZON = 10**6


@dataclass(frozen=True)
class NormSeq:
    """Sequence of (n, value) pairs recording ||T^n x|| or ||T^n||."""

    entries: tuple[tuple[int, float], ...]
    kind: str  # "vector-orbit" | "operator-norm"
    p: float

    def __post_init__(self) -> None:
        prev = -1
        for n, value in self.entries:
            if n <= prev:
                raise ParameterError("NormSeq indices must be strictly increasing")
            if not (math.isfinite(value) and value >= 0):
                raise ParameterError(f"NormSeq values must be finite and >= 0, got {value!r} at n={n}")
            prev = n

    def ns(self) -> list[int]:
        return [n for n, _ in self.entries]

    def values(self) -> list[float]:
        return [v for _, v in self.entries]

    def dyadic(self, start: int = 1) -> "NormSeq":
        """Subsequence at n = start, 2*start, 4*start, ... (keeps present entries only)."""
        wanted = set()
        n = start
        top = self.entries[-1][0] if self.entries else 0
        while n <= top:
            wanted.add(n)
            n *= 2
        kept = tuple((n, v) for n, v in self.entries if n in wanted)
        return NormSeq(kept, self.kind, self.p)


# ---------------------------------------------------------------------------
# numerical kernels


def largest_singular_value(a, tol: float = 1e-12, max_iter: int = 10_000, start=None) -> float:
    """Largest singular value by power iteration on the conjugate-transpose product.

    Deterministic all-ones start (with two fixed fallbacks if the start lies
    in the kernel), relative tolerance on the squared estimate, iteration cap.
    """
    a = np.asarray(a, dtype=complex)
    if a.size == 0:
        return 0.0
    b = a.conj().T @ a
    d = b.shape[0]
    starts = []
    if start is not None:
        starts.append(np.asarray(start, dtype=complex))
    starts.append(np.ones(d, dtype=complex))
    starts.append(np.arange(1, d + 1, dtype=complex))
    starts.append(np.array([(-1.0) ** i * (i + 1) for i in range(d)], dtype=complex))
    for v in starts:
        nv = np.linalg.norm(v)
        if nv == 0:
            continue
        v = v / nv
        est = 0.0
        for _ in range(max_iter):
            w = b @ v
            nw = np.linalg.norm(w)
            if nw == 0.0:
                est = 0.0
                break
            v_new = w / nw
            new_est = float(np.real(np.vdot(v_new, b @ v_new)))
            if abs(new_est - est) <= tol * max(new_est, 1e-300):
                v = v_new
                est = new_est
                break
            v = v_new
            est = new_est
        if est > 0.0:
            return math.sqrt(est)
    return 0.0


class SigmaMaxTracker:
    """Warm-started largest-singular-value evaluations along a matrix sweep."""

    def __init__(self, dim: int):
        self._start = np.ones(dim, dtype=complex) / math.sqrt(dim)

    def value(self, a) -> float:
        a = np.asarray(a, dtype=complex)
        b = a.conj().T @ a
        v = self._start
        est = float(np.real(np.vdot(v, b @ v)))
        for _ in range(10_000):
            w = b @ v
            nw = np.linalg.norm(w)
            if nw == 0.0:
                return largest_singular_value(a)
            v = w / nw
            new_est = float(np.real(np.vdot(v, b @ v)))
            if abs(new_est - est) <= 1e-12 * max(new_est, 1e-300):
                est = new_est
                break
            est = new_est
        self._start = v
        if est <= 0.0:
            return largest_singular_value(a)
        return math.sqrt(est)


def matrix_exponential(a, tol: float = 1e-14) -> np.ndarray:
    """exp(a) by scaling-and-squaring over a Taylor series with a tail bound."""
    a = np.asarray(a, dtype=complex)
    d = a.shape[0]
    norm1 = float(np.max(np.sum(np.abs(a), axis=0))) if a.size else 0.0
    squarings = max(0, int(math.ceil(math.log2(norm1))) + 1) if norm1 > 0.5 else 0
    b = a / (2.0**squarings)
    nb = norm1 / (2.0**squarings)
    total = np.eye(d, dtype=complex)
    term = np.eye(d, dtype=complex)
    for k in range(1, 200):
        term = term @ b / k
        total = total + term
        q = nb / (k + 1)
        if q < 1.0:
            term_norm = float(np.max(np.sum(np.abs(term), axis=0)))
            total_norm = float(np.max(np.sum(np.abs(total), axis=0)))
            if term_norm * q / (1.0 - q) <= tol * max(total_norm, 1.0):
                break
    for _ in range(squarings):
        total = total @ total
    return total


# ---------------------------------------------------------------------------
# orbit engines


def _unwrap_scalar(spec: OperatorSpec) -> tuple[complex, OperatorSpec]:
    lam = 1.0 + 0j
    while isinstance(spec, ScalarMultiple):
        lam *= spec.scalar
        spec = spec.inner
    return lam, spec


def _shift_kind(spec: OperatorSpec):
    """(direction, rule, clip_low) for infinite shifts; None otherwise."""
    if isinstance(spec, BackwardShift) and isinstance(spec.universe, NatFromOne):
        return (-1, spec.rule, True)
    if isinstance(spec, ForwardShift) and isinstance(spec.universe, NatFromOne):
        return (+1, spec.rule, False)
    if isinstance(spec, BilateralShift):
        return ((+1 if spec.forward else -1), spec.rule, False)
    return None


def _rule_table(rule, lo: int, hi: int) -> np.ndarray:
    """weight_at(rule, k) for k in [lo, hi] as a dense array (vectorized)."""
    if hi < lo:
        return np.zeros(0)
    ks = np.arange(lo, hi + 1, dtype=float)
    if isinstance(rule, PowerRatio):
        num = ks + rule.offset
        return (num / (num - 1.0)) ** rule.alpha
    if isinstance(rule, PolyRatio):
        a = rule.p(ks)
        b = rule.p(ks + 1.0)
        bad = np.nonzero(~((a > 0) & (b > 0)))[0]
        if bad.size:
            j = int(ks[bad[0]])
            raise ParameterError(f"weight polynomial not positive near index {j}")
        return np.sqrt(b / a)
    if isinstance(rule, Explicit):
        out = np.full(hi - lo + 1, rule.tail)
        for k in range(max(lo, 1), min(hi, len(rule.values)) + 1):
            out[k - lo] = rule.values[k - 1]
        return out
    raise UnsupportedVariantError(f"unknown weight rule {rule!r}")


class _WindowOrbit:
    """Dense-window engine for weighted-shift orbits of finitely supported vectors."""

    def __init__(self, direction: int, rule, clip_low: bool, scalar: complex, x: SparseVec, n_max: int):
        support = x.support()
        self.orig = np.array(support, dtype=np.int64)
        self.vals = np.array([x.entries[k] for k in support], dtype=complex)
        self.direction = direction
        self.clip_low = clip_low
        self.scalar = scalar
        self.universe = x.universe
        self.steps = 0
        lo, hi = support[0], support[-1]
        if direction > 0:
            t_lo, t_hi = lo, hi + n_max - 1
        else:
            t_lo, t_hi = lo - n_max + 1, hi
        if clip_low:
            t_lo = max(t_lo, 2)
        self._table_lo = t_lo
        self._table = _rule_table(rule, t_lo, t_hi)
        self.dead = False

    def coords(self) -> np.ndarray:
        return self.orig + self.direction * self.steps

    def step(self) -> None:
        if self.dead:
            self.steps += 1
            return
        src = self.coords()
        idx = src - self._table_lo
        if self.clip_low:
            if len(self._table) == 0:
                w = np.zeros(len(self.vals))
            else:
                alive = src >= 2
                safe = np.clip(idx, 0, len(self._table) - 1)
                w = np.where(alive, self._table[safe], 0.0)
        else:
            w = self._table[idx]
        self.vals = self.vals * w
        if self.scalar != 1:
            self.vals = self.vals * self.scalar
        self.steps += 1
        if self.clip_low and not np.any(self.vals):
            self.dead = True
            self.vals = np.zeros_like(self.vals)

    def norm(self, p: float) -> float:
        if self.dead:
            return 0.0
        mags = np.abs(self.vals)
        if p == 2:
            return float(math.sqrt(np.sum(mags * mags)))
        if p == 1:
            return float(np.sum(mags))
        return float(np.sum(mags**p) ** (1.0 / p))

    def to_sparse(self) -> SparseVec:
        entries = {}
        for c, v in zip(self.coords().tolist(), self.vals.tolist()):
            if v != 0:
                entries[int(c)] = v
        return SparseVec(self.universe, entries)

    def inner_with(self, y: SparseVec) -> complex:
        if self.dead:
            return 0j
        total = 0j
        pos = {int(c): i for i, c in enumerate(self.coords().tolist())}
        for k, w in y.entries.items():
            i = pos.get(k)
            if i is not None:
                total += self.vals[i] * w.conjugate()
        return total


class _MatrixOrbit:
    """Dense loop for finite-dimensional specs; pairs stack as [top; bottom]."""

    def __init__(self, spec: OperatorSpec, x, n_max: int):
        self.matrix = to_matrix(spec)
        self.pair = isinstance(x, PairVec)
        self.universe = spec_universe(spec)
        d = self.matrix.shape[0]
        v = np.zeros(d, dtype=complex)
        if self.pair:
            half = d // 2
            for k, val in x.top.entries.items():
                v[k - 1] = val
            for k, val in x.bottom.entries.items():
                v[half + k - 1] = val
        else:
            for k, val in x.entries.items():
                v[k - 1] = val
        self.vals = v
        self.dead = False
        self.steps = 0

    def step(self) -> None:
        self.vals = self.matrix @ self.vals
        self.steps += 1

    def norm(self, p: float) -> float:
        if self.pair and p != 2:
            raise ParameterError("pair vectors carry the Hilbert norm only (p=2)")
        mags = np.abs(self.vals)
        if p == 2:
            return float(math.sqrt(np.sum(mags * mags)))
        if p == 1:
            return float(np.sum(mags))
        return float(np.sum(mags**p) ** (1.0 / p))

    def to_sparse(self):
        if self.pair:
            half = self.matrix.shape[0] // 2
            top = {i + 1: v for i, v in enumerate(self.vals[:half].tolist()) if v != 0}
            bot = {i + 1: v for i, v in enumerate(self.vals[half:].tolist()) if v != 0}
            return PairVec(SparseVec(self.universe, top), SparseVec(self.universe, bot))
        entries = {i + 1: v for i, v in enumerate(self.vals.tolist()) if v != 0}
        return SparseVec(self.universe, entries)

    def inner_with(self, y) -> complex:
        other = _MatrixOrbit._embed(y, self.matrix.shape[0], self.pair)
        return complex(np.vdot(other, self.vals))  # vdot conjugates its first argument

    @staticmethod
    def _embed(y, d: int, pair: bool) -> np.ndarray:
        v = np.zeros(d, dtype=complex)
        if pair:
            half = d // 2
            for k, val in y.top.entries.items():
                v[k - 1] = val
            for k, val in y.bottom.entries.items():
                v[half + k - 1] = val
        else:
            for k, val in y.entries.items():
                v[k - 1] = val
        return v


class _SparseOrbit:
    """Generic fallback: repeated exact sparse application."""

    def __init__(self, spec: OperatorSpec, x, n_max: int):
        self.spec = spec
        self.state = x
        self.steps = 0
        self.dead = x.is_zero()

    def step(self) -> None:
        if not self.dead:
            self.state = apply(self.spec, self.state)
            self.dead = self.state.is_zero()
        self.steps += 1

    def norm(self, p: float) -> float:
        return p_norm(self.state, p)

    def to_sparse(self):
        return self.state

    def inner_with(self, y) -> complex:
        from .core import inner as _inner

        return _inner(self.state, y)


def make_orbit(spec: OperatorSpec, x, n_max: int):
    """Pick the fastest exact engine for T^k x, k <= n_max."""
    lam, base = _unwrap_scalar(spec)
    kind = _shift_kind(base)
    if kind is not None and isinstance(x, SparseVec) and x.entries:
        direction, rule, clip = kind
        if x.universe != spec_universe(base):
            raise DomainError("vector universe does not match operator universe")
        return _WindowOrbit(direction, rule, clip, lam, x, n_max)
    if spec_dim(spec) is not None:
        if expects_pair(spec) != isinstance(x, PairVec):
            raise DomainError("pair/plain vector mismatch for this operator")
        return _MatrixOrbit(spec, x, n_max)
    return _SparseOrbit(spec, x, n_max)


# ---------------------------------------------------------------------------
# compensated accumulators


class _KahanDense:
    def __init__(self, length: int):
        self.sum = np.zeros(length, dtype=complex)
        self.comp = np.zeros(length, dtype=complex)

    def add_at(self, idx, values) -> None:
        y = values - self.comp[idx]
        t = self.sum[idx] + y
        self.comp[idx] = (t - self.sum[idx]) - y
        self.sum[idx] = t

    def add_all(self, values) -> None:
        y = values - self.comp
        t = self.sum + y
        self.comp = (t - self.sum) - y
        self.sum = t


class _KahanSparse:
    def __init__(self):
        self.sum: dict[int, complex] = {}
        self.comp: dict[int, complex] = {}

    def add(self, entries) -> None:
        for k, v in entries.items():
            y = v - self.comp.get(k, 0j)
            s = self.sum.get(k, 0j)
            t = s + y
            self.comp[k] = (t - s) - y
            self.sum[k] = t


class _CesaroAccumulator:
    """Running sum of orbit states, engine-aware, Kahan-compensated."""

    def __init__(self, orbit, n_max: int):
        self.orbit = orbit
        if isinstance(orbit, _WindowOrbit):
            lo = int(orbit.orig[0])
            hi = int(orbit.orig[-1])
            if orbit.direction > 0:
                self.range_lo, range_hi = lo, hi + n_max
            else:
                self.range_lo, range_hi = (1 if orbit.clip_low else lo - n_max), hi
            self.acc = _KahanDense(range_hi - self.range_lo + 1)
            self.mode = "window"
        elif isinstance(orbit, _MatrixOrbit):
            self.acc = _KahanDense(orbit.matrix.shape[0])
            self.mode = "matrix"
        else:
            self.mode = "sparse"
            self.pair = isinstance(orbit.state, PairVec)
            if self.pair:
                self.acc = (_KahanSparse(), _KahanSparse())
            else:
                self.acc = _KahanSparse()
        self.count = 0

    def add_current(self) -> None:
        o = self.orbit
        if self.mode == "window":
            if not o.dead:
                idx = o.coords() - self.range_lo
                keep = idx >= 0  # clipped-out backward entries hold exact zeros
                self.acc.add_at(idx[keep], o.vals[keep])
        elif self.mode == "matrix":
            self.acc.add_all(o.vals)
        else:
            state = o.state
            if self.pair:
                self.acc[0].add(state.top.entries)
                self.acc[1].add(state.bottom.entries)
            else:
                self.acc.add(state.entries)
        self.count += 1

    def mean_vector(self):
        """Current Cesàro mean as a sparse vector (or pair)."""
        scale = 1.0 / self.count
        o = self.orbit
        if self.mode == "window":
            entries = {}
            base = self.range_lo
            nz = np.nonzero(self.acc.sum)[0]
            for i in nz.tolist():
                entries[base + i] = self.acc.sum[i] * scale
            return SparseVec(o.universe, entries)
        if self.mode == "matrix":
            vals = self.acc.sum * scale
            if o.pair:
                half = o.matrix.shape[0] // 2
                top = {i + 1: v for i, v in enumerate(vals[:half].tolist()) if v != 0}
                bot = {i + 1: v for i, v in enumerate(vals[half:].tolist()) if v != 0}
                return PairVec(SparseVec(o.universe, top), SparseVec(o.universe, bot))
            return SparseVec(o.universe, {i + 1: v for i, v in enumerate(vals.tolist()) if v != 0})
        if self.pair:
            top = {k: v * scale for k, v in self.acc[0].sum.items() if v != 0}
            bot = {k: v * scale for k, v in self.acc[1].sum.items() if v != 0}
            uni = o.state.universe
            return PairVec(SparseVec(uni, top), SparseVec(uni, bot))
        uni = o.state.universe
        return SparseVec(uni, {k: v * scale for k, v in self.acc.sum.items() if v != 0})

    def mean_norm(self, p: float) -> float:
        scale = 1.0 / self.count
        if self.mode == "window":
            mags = np.abs(self.acc.sum) * scale
            if p == 2:
                return float(math.sqrt(np.sum(mags * mags)))
            if p == 1:
                return float(np.sum(mags))
            return float(np.sum(mags**p) ** (1.0 / p))
        if self.mode == "matrix":
            mags = np.abs(self.acc.sum) * scale
            if p == 2:
                return float(math.sqrt(np.sum(mags * mags)))
            return float(np.sum(mags**p) ** (1.0 / p))
        return p_norm(self.mean_vector(), p)


# ---------------------------------------------------------------------------
# module operations


def power_apply(spec: OperatorSpec, x, n: int):
    """n-fold application T^n x; n = 0 returns x unchanged."""
    if n < 0:
        raise ParameterError("power must be >= 0")
    if n == 0:
        return x
    orbit = make_orbit(spec, x, n)
    for _ in range(n):
        if orbit.dead and not isinstance(orbit, _MatrixOrbit):
            return orbit.to_sparse()
        orbit.step()
    return orbit.to_sparse()


def _shift_sup_candidates(lowest: int, span: int) -> list[int]:
    """Start indices probed for the supremum: dense head plus dyadic tail."""
    out = list(range(lowest, lowest + 8))
    t = 8
    while t <= span:
        out.append(lowest + t)
        t *= 2
    return out


def _scan_products(rule, starts, window, monotone_shortcut: bool) -> tuple[float, int]:
    """Max weight product over candidate starts.

    With the shortcut enabled, a strictly decreasing head lets the scan jump
    to the final two (horizon) candidates only; the package's closed-form
    weight families have monotone products in the start index, so the
    supremum sits at the boundary.
    """
    best = 0.0
    best_j = starts[0] if starts else 0
    values = []
    scanned = 0
    for pos, j in enumerate(starts):
        start, count = window(j)
        try:
            prod = weight_product(rule, start, count)
        except ParameterError:
            continue
        values.append(prod)
        scanned += 1
        if prod > best:
            best = prod
            best_j = j
        if monotone_shortcut and scanned == 6 and all(a > b for a, b in zip(values, values[1:])):
            for tail_j in starts[-2:]:
                t_start, t_count = window(tail_j)
                try:
                    t_prod = weight_product(rule, t_start, t_count)
                except ParameterError:
                    continue
                if t_prod > best:
                    best = t_prod
                    best_j = tail_j
            break
    return best, best_j


def _shift_power_norm(spec, n: int) -> tuple[float, int]:
    """(sup weight product over basis starts, attaining start index)."""
    shortcut = isinstance(spec.rule, (PowerRatio, PolyRatio))
    if isinstance(spec, BackwardShift):
        if isinstance(spec.universe, FiniteRange):
            starts = list(range(n + 1, spec.universe.dim + 1))
            shortcut = False
        else:
            starts = _shift_sup_candidates(n + 1, SHIFT_SUP_HORIZON)
        window = lambda j: (j - n + 1, n)  # noqa: E731  sources j-n+1 .. j
    elif isinstance(spec, ForwardShift):
        if isinstance(spec.universe, FiniteRange):
            starts = list(range(1, spec.universe.dim - n + 1))
            shortcut = False
        else:
            starts = _shift_sup_candidates(1, SHIFT_SUP_HORIZON)
        window = lambda j: (j, n)  # noqa: E731
    elif isinstance(spec, BilateralShift):
        heads = _shift_sup_candidates(0, SHIFT_SUP_HORIZON)
        starts = sorted(set(heads + [-s for s in heads]))
        shortcut = False
        if spec.forward:
            window = lambda j: (j, n)  # noqa: E731
        else:
            window = lambda j: (j - n + 1, n)  # noqa: E731
    else:
        raise UnsupportedVariantError(f"not a shift: {spec!r}")
    return _scan_products(spec.rule, starts, window, shortcut)


def power_norm_exact(spec: OperatorSpec, n: int, p: float) -> float:
    """Exact ||T^n|| for shifts (any p), diagonals, and finite matrices (p=2).

    Shift norms are suprema of n-term weight products over basis starts,
    evaluated through telescoping closed forms at a dense head of start
    indices plus dyadic tail probes (the package's weight families attain
    the supremum at the boundary).
    """
    if n < 1:
        raise ParameterError("power must be >= 1")
    if p < 1:
        raise ParameterError(f"p must be >= 1, got {p}")
    if isinstance(spec, ScalarMultiple):
        return abs(spec.scalar) ** n * power_norm_exact(spec.inner, n, p)
    if isinstance(spec, Diagonal):
        candidates = [abs(v) for _, v in spec.overrides]
        if not (isinstance(spec.universe, FiniteRange) and len(spec.overrides) >= spec.universe.dim):
            candidates.append(abs(spec.default))
        return max(candidates) ** n
    if isinstance(spec, (BackwardShift, ForwardShift, BilateralShift)):
        value, _ = _shift_power_norm(spec, n)
        return value
    dim = spec_dim(spec)
    if dim is not None:
        if p != 2:
            raise ParameterError("operator norms of matrices are computed for p=2 only")
        a = to_matrix(spec)
        return largest_singular_value(np.linalg.matrix_power(a, n))
    raise UnsupportedVariantError(
        f"no closed-form power norm for {type(spec).__name__}; use orbit probes for lower bounds"
    )


def orbit_norms(spec: OperatorSpec, x, p: float, n_max: int) -> NormSeq:
    """(n, ||T^n x||_p) for n = 0..n_max with incremental application."""
    if n_max < 1:
        raise ParameterError("n_max must be >= 1")
    orbit = make_orbit(spec, x, n_max)
    entries = [(0, orbit.norm(p))]
    for n in range(1, n_max + 1):
        if orbit.dead:
            entries.append((n, 0.0))
            continue
        orbit.step()
        entries.append((n, orbit.norm(p)))
    return NormSeq(tuple(entries), "vector-orbit", p)


def cesaro_apply(spec: OperatorSpec, x, n: int):
    """Cesàro mean M_n(T) x = (1/(n+1)) sum_{k<=n} T^k x."""
    if n < 0:
        raise ParameterError("n must be >= 0")
    orbit = make_orbit(spec, x, n)
    acc = _CesaroAccumulator(orbit, n)
    acc.add_current()
    for _ in range(n):
        orbit.step()
        acc.add_current()
    return acc.mean_vector()


def cesaro_operator_norm(spec: OperatorSpec, n: int, lam: complex = 1.0 + 0j) -> float:
    """||M_n(lam T)|| for finite-dimensional specs (largest singular value)."""
    if abs(abs(lam) - 1.0) > 1e-12:
        raise ParameterError("lam must be unimodular")
    if spec_dim(spec) is None:
        raise UnsupportedVariantError("cesaro_operator_norm needs a finite-dimensional spec")
    sweep = cesaro_operator_norm_sweep(spec, lam, [n])
    return sweep[0][1]


def cesaro_operator_norm_sweep(spec: OperatorSpec, lam: complex, ns) -> list[tuple[int, float]]:
    """Exact ||M_n(lam T)|| at each requested n, accumulated incrementally."""
    ns = sorted(set(int(n) for n in ns))
    if not ns or ns[0] < 0:
        raise ParameterError("requested indices must be >= 0")
    a = to_matrix(spec) * lam
    d = a.shape[0]
    power = np.eye(d, dtype=complex)
    total = np.eye(d, dtype=complex)
    comp = np.zeros_like(total)
    tracker = SigmaMaxTracker(d)
    out = []
    k = 0
    for n in ns:
        while k < n:
            power = a @ power
            y = power - comp
            t = total + y
            comp = (t - total) - y
            total = t
            k += 1
        out.append((n, tracker.value(total / (n + 1))))
    return out


def media_residual(spec: OperatorSpec, x, n: int, p: float) -> float:
    """Residual of T^n x/(n+1) = M_n(T) x - (n/(n+1)) M_{n-1}(T) x."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    return media_residual_max(spec, x, n, p, from_n=n)


def media_residual_max(spec: OperatorSpec, x, n_max: int, p: float, from_n: int = 1) -> float:
    """Max residual of the mean identity over n in [from_n, n_max] (one orbit pass)."""
    if n_max < 1 or from_n < 1 or from_n > n_max:
        raise ParameterError("need 1 <= from_n <= n_max")
    from .core import vec_scale, vec_sub

    orbit = make_orbit(spec, x, n_max)
    acc = _CesaroAccumulator(orbit, n_max)
    acc.add_current()
    prev_mean = acc.mean_vector()
    worst = 0.0
    for n in range(1, n_max + 1):
        orbit.step()
        acc.add_current()
        mean = acc.mean_vector()
        if n >= from_n:
            lhs = vec_scale(1.0 / (n + 1), orbit.to_sparse())
            rhs = vec_sub(mean, vec_scale(n / (n + 1), prev_mean))
            worst = max(worst, p_norm(vec_sub(lhs, rhs), p))
        prev_mean = mean
    return worst


def block_tz_power_check(inner: OperatorSpec, x: PairVec, n: int) -> float:
    """Residual between iterated BlockTZ powers and the commuting closed form.

    The blocks of [[T, T-I],[0, T]] commute, so the n-th power is
    [[T^n, n T^{n-1}(T-I)],[0, T^n]]; both routes are evaluated on x.
    """
    if n < 1:
        raise ParameterError("n must be >= 1")
    from .core import vec_add, vec_scale, vec_sub

    iterated = power_apply(BlockTZ(inner), x, n)
    top_n = power_apply(inner, x.top, n)
    bot_prev = power_apply(inner, x.bottom, n - 1)
    bot_n = apply(inner, bot_prev)
    closed_top = vec_add(top_n, vec_scale(n, vec_sub(bot_n, bot_prev)))
    closed = PairVec(closed_top, bot_n)
    return p_norm(vec_sub(iterated, closed), 2)
