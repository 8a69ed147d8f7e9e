"""Boundedness-class probes and growth-rate analysis.

A probe is a finite computation providing evidence for an asymptotic
property, never a certificate.  Verdicts are ``bounded_up_to`` (with the
best constant seen), ``violated`` (with a replayable witness: operator
description, probe vector, index, value), or ``inconclusive``.  Divergence
is declared by a fixed dyadic protocol: checkpoints start at N = 8, and a
quantity is violated when its checkpoint maximum reaches twice the first
checkpoint value and the final checkpoint sustains at least 0.8x the max.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    NAT,
    AllIntegers,
    DomainError,
    FiniteRange,
    NatFromOne,
    OperatorSpec,
    PairVec,
    ParameterError,
    SparseVec,
    UnsupportedVariantError,
    describe,
    expects_pair,
    make_vector,
    p_norm,
    spec_dim,
    spec_universe,
    to_matrix,
)
from .powers import (
    NormSeq,
    SigmaMaxTracker,
    largest_singular_value,
    make_orbit,
    matrix_exponential,
    power_norm_exact,
)

__all__ = [
    "ClassVerdict",
    "ProbeConfig",
    "DEFAULT_SEED",
    "probe_vectors",
    "adversarial_vector",
    "acb_constant",
    "power_bounded_probe",
    "cesaro_bounded_probe",
    "uniform_kreiss_probe",
    "kreiss_resolvent_constant",
    "strong_kreiss_exp_probe",
    "growth_exponent",
    "ratio_trend",
    "lambda_grid",
]

DEFAULT_SEED = 0xCE5A70


@dataclass(frozen=True)
class ClassVerdict:
    """Outcome of a boundedness probe with parameters and witness."""

    class_name: str
    status: str  # "bounded_up_to" | "violated" | "inconclusive"
    certainty: str  # "exact" | "probe"
    n_checked: int
    best_constant: float
    witness: dict | None = None
    parameters: dict = field(default_factory=dict)

    def bounded(self) -> bool:
        return self.status == "bounded_up_to"

    def to_dict(self) -> dict:
        return {
            "class_name": self.class_name,
            "status": self.status,
            "certainty": self.certainty,
            "n_checked": self.n_checked,
            "best_constant": self.best_constant,
            "witness": self.witness,
            "parameters": self.parameters,
        }


@dataclass(frozen=True)
class ProbeConfig:
    """Desk-scale probe settings; every probe echoes the fields it used."""

    n_max: int = 1024
    lambda_samples: int = 64
    basis_probes: int = 12
    seeded_probes: int = 20
    probe_support: int = 32
    include_adversarial: bool = True
    p: float = 2.0
    tolerance: float = 1e-9
    seed: int = DEFAULT_SEED

    def __post_init__(self) -> None:
        if self.n_max < 1:
            raise ParameterError("n_max must be >= 1")
        if self.lambda_samples < 4:
            raise ParameterError("lambda_samples must be >= 4")
        if self.tolerance <= 0:
            raise ParameterError("tolerance must be > 0")
        if self.p < 1:
            raise ParameterError("p must be >= 1")

    def echo(self, **extra) -> dict:
        base = {
            "n_max": self.n_max,
            "lambda_samples": self.lambda_samples,
            "basis_probes": self.basis_probes,
            "seeded_probes": self.seeded_probes,
            "probe_support": self.probe_support,
            "include_adversarial": self.include_adversarial,
            "p": self.p,
            "tolerance": self.tolerance,
            "seed": self.seed,
        }
        base.update(extra)
        return base


# ---------------------------------------------------------------------------
# probe vector families


def adversarial_vector(n: int, p: float) -> SparseVec:
    """Unit vector n^(-1/p) (e_1 + ... + e_n) on the naturals; n must be even."""
    if n < 2 or n % 2:
        raise ParameterError(f"adversarial index must be even and >= 2, got {n}")
    coeff = complex(n ** (-1.0 / p))
    return make_vector(NAT, [(k, coeff) for k in range(1, n + 1)])


def _seeded_window(universe, rng, support: int, p: float) -> SparseVec:
    if isinstance(universe, FiniteRange):
        idx = range(1, universe.dim + 1)
    elif isinstance(universe, AllIntegers):
        half = support // 2
        idx = range(-half, support - half)
    else:
        idx = range(1, support + 1)
    raw = [(k, complex(rng.standard_normal(), rng.standard_normal())) for k in idx]
    vec = make_vector(universe, raw)
    norm = p_norm(vec, p)
    return make_vector(universe, [(k, v / norm) for k, v in vec.entries.items()])


def _basis_indices(universe, count: int) -> list[int]:
    if isinstance(universe, FiniteRange):
        return list(range(1, min(universe.dim, count) + 1))
    if isinstance(universe, AllIntegers):
        out = [0]
        k = 1
        while len(out) < count:
            out.append(k)
            if len(out) < count:
                out.append(-k)
            k += 1
        return out
    return list(range(1, count + 1))


def probe_vectors(spec: OperatorSpec, cfg: ProbeConfig) -> list[tuple[str, SparseVec | PairVec]]:
    """Deterministic labelled probe family: unit basis vectors plus seeded windows."""
    universe = spec_universe(spec)
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed))
    out: list[tuple[str, SparseVec | PairVec]] = []
    if expects_pair(spec):
        for k in _basis_indices(universe, cfg.basis_probes):
            e = make_vector(universe, [(k, 1.0)])
            z = make_vector(universe, [])
            out.append((f"pair(e[{k}];0)", PairVec(e, z)))
            out.append((f"pair(0;e[{k}])", PairVec(z, e)))
        for i in range(cfg.seeded_probes):
            top = _seeded_window(universe, rng, cfg.probe_support, 2)
            bottom = _seeded_window(universe, rng, cfg.probe_support, 2)
            pair = PairVec(top, bottom)
            norm = p_norm(pair, 2)
            pair = PairVec(*(SparseVec(universe, {k: v / norm for k, v in c.entries.items()}) for c in (top, bottom)))
            out.append((f"pair_seeded[{i}]", pair))
        return out
    for k in _basis_indices(universe, cfg.basis_probes):
        out.append((f"e[{k}]", make_vector(universe, [(k, 1.0)])))
    for i in range(cfg.seeded_probes):
        out.append((f"seeded[{i}]", _seeded_window(universe, rng, cfg.probe_support, cfg.p)))
    return out


# ---------------------------------------------------------------------------
# checkpoint / divergence protocol


def checkpoint_set(n_max: int, head: int = 64) -> list[int]:
    """Dense head 1..head plus dyadic indices up to (and including) n_max."""
    pts = set(range(1, min(head, n_max) + 1))
    k = 1
    while k <= n_max:
        pts.add(k)
        k *= 2
    pts.add(n_max)
    return sorted(pts)


def _protocol_points(values: list[tuple[int, float]], start: int = 8) -> list[tuple[int, float]]:
    if not values:
        return []
    n_last = values[-1][0]
    return [(n, v) for n, v in values if n >= start and ((n & (n - 1)) == 0 or n == n_last)]


def dyadic_divergence(values: list[tuple[int, float]], factor: float = 2.0, sustain: float = 0.8):
    """(violated, witness_n, witness_value) under the dyadic growth protocol."""
    pts = _protocol_points(values)
    firsts = [v for _, v in pts if v > 0]
    if len(pts) < 2 or not firsts:
        return False, None, None
    first = firsts[0]
    peak_n, peak = max(pts, key=lambda t: t[1])
    last = pts[-1][1]
    if peak >= factor * first and last >= sustain * peak:
        return True, peak_n, peak
    return False, None, None


# ---------------------------------------------------------------------------
# lambda-averaged Cesàro norms (batched across a unimodular grid)


def lambda_grid(samples: int) -> np.ndarray:
    """samples-th roots of unity, with 1 and -1 always present."""
    ks = np.arange(samples)
    lams = np.exp(2j * np.pi * ks / samples)
    have_minus_one = samples % 2 == 0
    extra = [] if have_minus_one else [-1.0 + 0j]
    lams[0] = 1.0 + 0j
    if extra:
        lams = np.concatenate([lams, np.array(extra)])
    return lams


def _lambda_mean_norms(spec, x, lams: np.ndarray, checkpoints: list[int], p: float):
    """||M_n(lam T) x||_p at each checkpoint for all lams at once.

    Returns array of shape (len(lams), len(checkpoints)).
    """
    n_max = checkpoints[-1]
    orbit = make_orbit(spec, x, n_max)
    nlam = len(lams)
    from .powers import _MatrixOrbit, _WindowOrbit

    if isinstance(orbit, _WindowOrbit):
        lo = int(orbit.orig[0])
        hi = int(orbit.orig[-1])
        if orbit.direction > 0:
            range_lo, range_hi = lo, hi + n_max
        else:
            range_lo, range_hi = (1 if orbit.clip_low else lo - n_max), hi
        width = range_hi - range_lo + 1
        acc = np.zeros((nlam, width), dtype=complex)
        comp = np.zeros_like(acc)

        def add_state(lam_pow):
            if orbit.dead:
                return
            idx = orbit.coords() - range_lo
            keep = idx >= 0
            contrib = lam_pow[:, None] * orbit.vals[keep][None, :]
            cols = idx[keep]
            y = contrib - comp[:, cols]
            t = acc[:, cols] + y
            comp[:, cols] = (t - acc[:, cols]) - y
            acc[:, cols] = t

        def norms(count):
            mags = np.abs(acc) / count
            if p == 2:
                return np.sqrt(np.sum(mags * mags, axis=1))
            return np.sum(mags**p, axis=1) ** (1.0 / p)

    elif isinstance(orbit, _MatrixOrbit):
        d = orbit.matrix.shape[0]
        acc = np.zeros((nlam, d), dtype=complex)
        comp = np.zeros_like(acc)

        def add_state(lam_pow):
            contrib = lam_pow[:, None] * orbit.vals[None, :]
            y = contrib - comp
            t = acc + y
            comp[:] = (t - acc) - y
            acc[:] = t

        def norms(count):
            mags = np.abs(acc) / count
            if p == 2:
                return np.sqrt(np.sum(mags * mags, axis=1))
            return np.sum(mags**p, axis=1) ** (1.0 / p)

    else:
        accs = [{} for _ in range(nlam)]

        def add_state(lam_pow):
            state = orbit.state
            items = []
            if isinstance(state, PairVec):
                items = [(("t", k), v) for k, v in state.top.entries.items()]
                items += [(("b", k), v) for k, v in state.bottom.entries.items()]
            else:
                items = list(state.entries.items())
            for i in range(nlam):
                bucket = accs[i]
                lam_k = lam_pow[i]
                for key, v in items:
                    bucket[key] = bucket.get(key, 0j) + lam_k * v

        def norms(count):
            out = np.zeros(nlam)
            for i in range(nlam):
                mags = np.abs(np.array(list(accs[i].values()) or [0.0])) / count
                if p == 2:
                    out[i] = math.sqrt(float(np.sum(mags * mags)))
                else:
                    out[i] = float(np.sum(mags**p) ** (1.0 / p))
            return out

    lam_pow = np.ones(nlam, dtype=complex)
    add_state(lam_pow)
    result = np.zeros((nlam, len(checkpoints)))
    pos = 0
    for k in range(1, n_max + 1):
        if getattr(orbit, "dead", False):
            # Frozen sums: remaining checkpoint norms just rescale by 1/(n+1).
            base = norms(1)
            while pos < len(checkpoints):
                result[:, pos] = base / (checkpoints[pos] + 1)
                pos += 1
            return result
        orbit.step()
        lam_pow = lam_pow * lams
        add_state(lam_pow)
        if pos < len(checkpoints) and checkpoints[pos] == k:
            result[:, pos] = norms(k + 1)
            pos += 1
    return result


def _matrix_lambda_cesaro_norms(spec, lams: np.ndarray, checkpoints: list[int]):
    """Exact ||M_n(lam T)|| at checkpoints for every lam (batched accumulation)."""
    a = to_matrix(spec)
    d = a.shape[0]
    nlam = len(lams)
    power = np.broadcast_to(np.eye(d, dtype=complex), (nlam, d, d)).copy()
    total = power.copy()
    comp = np.zeros_like(total)
    trackers = [SigmaMaxTracker(d) for _ in range(nlam)]
    out = np.zeros((nlam, len(checkpoints)))
    pos = 0
    if checkpoints[0] == 0:
        for i in range(nlam):
            out[i, 0] = trackers[i].value(total[i])
        pos = 1
    lam_a = lams[:, None, None] * a[None, :, :]
    for k in range(1, checkpoints[-1] + 1):
        power = lam_a @ power
        y = power - comp
        t = total + y
        comp = (t - total) - y
        total = t
        if pos < len(checkpoints) and checkpoints[pos] == k:
            for i in range(nlam):
                out[i, pos] = trackers[i].value(total[i] / (k + 1))
            pos += 1
    return out


# ---------------------------------------------------------------------------
# probes


def acb_constant(spec: OperatorSpec, cfg: ProbeConfig) -> ClassVerdict:
    """Best constant in (1/N) sum_{j<=N} ||T^j x|| over unit probes, N <= n_max."""
    best = 0.0
    best_witness = None
    violated_witness = None
    for label, x in probe_vectors(spec, cfg):
        orbit = make_orbit(spec, x, cfg.n_max)
        running = 0.0
        comp = 0.0
        checkpoints = []
        for j in range(1, cfg.n_max + 1):
            if orbit.dead:
                break
            orbit.step()
            y = orbit.norm(cfg.p) - comp
            t = running + y
            comp = (t - running) - y
            running = t
            avg = running / j
            if avg > best:
                best = avg
                best_witness = {"vector": label, "N": j, "value": avg}
            if j >= 8 and ((j & (j - 1)) == 0 or j == cfg.n_max):
                checkpoints.append((j, avg))
        hit, wn, wv = dyadic_divergence(checkpoints)
        if hit and violated_witness is None:
            violated_witness = {"spec": describe(spec), "vector": label, "N": wn, "value": wv}
    params = cfg.echo(probe="absolutely_cesaro_bounded")
    if violated_witness is not None:
        return ClassVerdict(
            "absolutely_cesaro_bounded", "violated", "probe", cfg.n_max, best, violated_witness, params
        )
    return ClassVerdict(
        "absolutely_cesaro_bounded", "bounded_up_to", "probe", cfg.n_max, best, best_witness, params
    )


def _exact_norm_values(spec, cfg) -> list[tuple[int, float]] | None:
    try:
        return [(n, power_norm_exact(spec, n, cfg.p)) for n in checkpoint_set(cfg.n_max)]
    except (UnsupportedVariantError, ParameterError):
        return None


def power_bounded_probe(spec: OperatorSpec, cfg: ProbeConfig) -> ClassVerdict:
    """sup_n ||T^n||: exact norms where closed forms exist, else orbit suprema."""
    values = _exact_norm_values(spec, cfg)
    certainty = "exact"
    witness_vec = "operator-norm"
    if values is None:
        certainty = "probe"
        probes = probe_vectors(spec, cfg)
        sup: dict[int, float] = {}
        sup_vec: dict[int, str] = {}
        for label, x in probes:
            orbit = make_orbit(spec, x, cfg.n_max)
            for n in range(1, cfg.n_max + 1):
                if orbit.dead:
                    break
                orbit.step()
                v = orbit.norm(cfg.p)
                if v > sup.get(n, -1.0):
                    sup[n] = v
                    sup_vec[n] = label
        values = sorted(sup.items())
        if not values:
            values = [(1, 0.0)]
    best_n, best = max(values, key=lambda t: t[1])
    hit, wn, wv = dyadic_divergence(values)
    params = cfg.echo(probe="power_bounded")
    if hit:
        witness = {"spec": describe(spec), "n": wn, "value": wv}
        if certainty == "probe":
            witness["vector"] = sup_vec.get(wn, witness_vec)
        return ClassVerdict("power_bounded", "violated", certainty, cfg.n_max, best, witness, params)
    return ClassVerdict(
        "power_bounded", "bounded_up_to", certainty, cfg.n_max, best, {"n": best_n, "value": best}, params
    )


def _is_nat_universe(spec) -> bool:
    return isinstance(spec_universe(spec), NatFromOne)


def cesaro_bounded_probe(spec: OperatorSpec, cfg: ProbeConfig) -> ClassVerdict:
    """sup_n ||M_n(T)||: exact for finite matrices, probe families otherwise."""
    params = cfg.echo(probe="cesaro_bounded")
    if spec_dim(spec) is not None:
        from .powers import cesaro_operator_norm_sweep

        values = cesaro_operator_norm_sweep(spec, 1.0 + 0j, list(range(1, cfg.n_max + 1)))
        best_n, best = max(values, key=lambda t: t[1])
        hit, wn, wv = dyadic_divergence(values)
        if hit:
            witness = {"spec": describe(spec), "n": wn, "value": wv}
            return ClassVerdict("cesaro_bounded", "violated", "exact", cfg.n_max, best, witness, params)
        return ClassVerdict(
            "cesaro_bounded", "bounded_up_to", "exact", cfg.n_max, best, {"n": best_n, "value": best}, params
        )

    checkpoints = checkpoint_set(cfg.n_max)
    lams = np.array([1.0 + 0j])
    best = 0.0
    best_witness = None
    violated_witness = None
    for label, x in probe_vectors(spec, cfg):
        norms = _lambda_mean_norms(spec, x, lams, checkpoints, cfg.p)[0]
        series = list(zip(checkpoints, norms.tolist()))
        n_best, v_best = max(series, key=lambda t: t[1])
        if v_best > best:
            best = v_best
            best_witness = {"vector": label, "n": n_best, "value": v_best}
        hit, wn, wv = dyadic_divergence(series)
        if hit and violated_witness is None:
            violated_witness = {"spec": describe(spec), "vector": label, "n": wn, "value": wv}
    if cfg.include_adversarial and _is_nat_universe(spec):
        from .powers import cesaro_apply

        series = []
        n = 8
        while n <= cfg.n_max:
            xn = adversarial_vector(n, cfg.p)
            value = p_norm(cesaro_apply(spec, xn, n - 1), cfg.p)
            series.append((n, value))
            if value > best:
                best = value
                best_witness = {"vector": f"adversarial[n={n}]", "n": n - 1, "value": value}
            n *= 2
        hit, wn, wv = dyadic_divergence(series)
        if hit and violated_witness is None:
            violated_witness = {
                "spec": describe(spec),
                "vector": f"adversarial[n={wn}]",
                "n": wn - 1,
                "value": wv,
            }
        params["adversarial_series"] = [[n, v] for n, v in series]
    if violated_witness is not None:
        return ClassVerdict("cesaro_bounded", "violated", "probe", cfg.n_max, best, violated_witness, params)
    return ClassVerdict("cesaro_bounded", "bounded_up_to", "probe", cfg.n_max, best, best_witness, params)


def uniform_kreiss_probe(spec: OperatorSpec, cfg: ProbeConfig) -> ClassVerdict:
    """sup over unimodular lam and n of ||M_n(lam T)|| (grid x checkpoint evidence)."""
    lams = lambda_grid(cfg.lambda_samples)
    checkpoints = checkpoint_set(cfg.n_max)
    params = cfg.echo(probe="uniformly_kreiss", lambda_grid_size=len(lams))
    if spec_dim(spec) is not None:
        table = _matrix_lambda_cesaro_norms(spec, lams, checkpoints)
        best = float(table.max())
        flat = int(np.argmax(table))
        li, ci = divmod(flat, table.shape[1])
        best_witness = {"lam": [float(lams[li].real), float(lams[li].imag)], "n": checkpoints[ci], "value": best}
        violations = []
        for i in range(len(lams)):
            series = list(zip(checkpoints, table[i].tolist()))
            hit, wn, wv = dyadic_divergence(series)
            if hit:
                violations.append((wv, i, wn))
        if violations:
            wv, i, wn = max(violations)
            witness = {
                "spec": describe(spec),
                "lam": [float(lams[i].real), float(lams[i].imag)],
                "n": wn,
                "value": wv,
            }
            return ClassVerdict("uniformly_kreiss", "violated", "exact", cfg.n_max, best, witness, params)
        return ClassVerdict(
            "uniformly_kreiss", "bounded_up_to", "exact", cfg.n_max, best, best_witness, params
        )

    best = 0.0
    best_witness = None
    violations = []
    for label, x in probe_vectors(spec, cfg):
        table = _lambda_mean_norms(spec, x, lams, checkpoints, cfg.p)
        local = float(table.max())
        if local > best:
            best = local
            flat = int(np.argmax(table))
            li, ci = divmod(flat, table.shape[1])
            best_witness = {
                "vector": label,
                "lam": [float(lams[li].real), float(lams[li].imag)],
                "n": checkpoints[ci],
                "value": local,
            }
        for i in range(len(lams)):
            series = list(zip(checkpoints, table[i].tolist()))
            hit, wn, wv = dyadic_divergence(series)
            if hit:
                violations.append((wv, i, wn, label))
    if violations:
        wv, i, wn, label = max(violations)
        witness = {
            "spec": describe(spec),
            "vector": label,
            "lam": [float(lams[i].real), float(lams[i].imag)],
            "n": wn,
            "value": wv,
        }
        return ClassVerdict("uniformly_kreiss", "violated", "probe", cfg.n_max, best, witness, params)
    return ClassVerdict("uniformly_kreiss", "bounded_up_to", "probe", cfg.n_max, best, best_witness, params)


def kreiss_resolvent_constant(
    spec: OperatorSpec, delta_grid, arg_samples: int = 16
) -> ClassVerdict:
    """sup over |lam| = 1 + delta of (|lam|-1) ||(lam I - T)^{-1}|| via direct solves."""
    deltas = sorted(float(d) for d in delta_grid)
    if not deltas or deltas[0] <= 0:
        raise ParameterError("deltas must be positive")
    if spec_dim(spec) is None:
        raise UnsupportedVariantError("kreiss_resolvent_constant needs a finite-dimensional spec")
    a = to_matrix(spec)
    d = a.shape[0]
    eye = np.eye(d, dtype=complex)
    args = np.linspace(0.0, 2.0 * np.pi, arg_samples, endpoint=False)
    if not np.any(np.isclose(args, np.pi)):
        args = np.append(args, np.pi)
    per_delta = []
    witness = None
    for delta in deltas:
        radius = 1.0 + delta
        worst = 0.0
        worst_arg = 0.0
        for theta in args:
            lam = radius * complex(math.cos(theta), math.sin(theta))
            try:
                resolvent = np.linalg.solve(lam * eye - a, eye)
            except np.linalg.LinAlgError:
                return ClassVerdict(
                    "kreiss",
                    "violated",
                    "exact",
                    len(deltas),
                    math.inf,
                    {"spec": describe(spec), "lam": [lam.real, lam.imag], "singular": True},
                    {"delta_grid": deltas, "arg_samples": int(len(args))},
                )
            value = delta * largest_singular_value(resolvent)
            if value > worst:
                worst = value
                worst_arg = float(theta)
        per_delta.append((delta, worst, worst_arg))
    best = max(v for _, v, _ in per_delta)
    params = {
        "delta_grid": deltas,
        "arg_samples": int(len(args)),
        "per_delta": [[dv, vv, av] for dv, vv, av in per_delta],
    }
    small, large = per_delta[0][1], per_delta[-1][1]
    if large > 0 and small >= 5.0 * large:
        dv, vv, av = per_delta[0]
        witness = {"spec": describe(spec), "delta": dv, "arg": av, "value": vv}
        return ClassVerdict("kreiss", "violated", "exact", len(deltas), best, witness, params)
    return ClassVerdict("kreiss", "bounded_up_to", "exact", len(deltas), best, None, params)


def strong_kreiss_exp_probe(
    spec: OperatorSpec, radii=(1.0, 2.0, 4.0, 8.0, 16.0), arg_samples: int = 16
) -> ClassVerdict:
    """sup over sampled z of ||e^{zT}|| e^{-|z|}; bounded when stable across radii."""
    radii = sorted(float(r) for r in radii)
    if not radii or radii[0] <= 0:
        raise ParameterError("radii must be positive")
    if spec_dim(spec) is None:
        raise UnsupportedVariantError("strong_kreiss_exp_probe needs a finite-dimensional spec")
    a = to_matrix(spec)
    args = np.linspace(0.0, 2.0 * np.pi, arg_samples, endpoint=False)
    per_radius = []
    for r in radii:
        worst = 0.0
        worst_arg = 0.0
        for theta in args:
            z = r * complex(math.cos(theta), math.sin(theta))
            value = largest_singular_value(matrix_exponential(z * a)) * math.exp(-abs(z))
            if value > worst:
                worst = value
                worst_arg = float(theta)
        per_radius.append((r, worst, worst_arg))
    best = max(v for _, v, _ in per_radius)
    params = {
        "radii": radii,
        "arg_samples": int(arg_samples),
        "per_radius": [[rv, vv, av] for rv, vv, av in per_radius],
    }
    first, last = per_radius[0][1], per_radius[-1][1]
    if first > 0 and last >= 2.0 * first:
        rv, vv, av = per_radius[-1]
        witness = {"spec": describe(spec), "radius": rv, "arg": av, "value": vv}
        return ClassVerdict("strongly_kreiss", "violated", "exact", len(radii), best, witness, params)
    return ClassVerdict("strongly_kreiss", "bounded_up_to", "exact", len(radii), best, None, params)


# ---------------------------------------------------------------------------
# growth analysis


def _positive_entries(seq: NormSeq) -> list[tuple[int, float]]:
    entries = [(n, v) for n, v in seq.entries if n >= 2]
    if len(entries) < 8:
        raise ParameterError("need at least 8 entries with n >= 2")
    if any(v <= 0 for _, v in entries):
        raise DomainError("growth analysis needs positive values")
    return entries


def growth_exponent(seq: NormSeq) -> float:
    """Least-squares slope of log(value) against log(n) on the top log-half."""
    entries = _positive_entries(seq)
    n_top = entries[-1][0]
    cut = math.sqrt(n_top)
    window = [(n, v) for n, v in entries if n >= cut]
    if len(window) < 2:
        window = entries[-8:]
    xs = np.log([n for n, _ in window])
    ys = np.log([v for _, v in window])
    slope, _ = np.polyfit(xs, ys, 1)
    return float(slope)


def ratio_trend(seq: NormSeq, beta: float) -> str:
    """Trend of value / n^beta across dyadic n: decreasing_to_zero | bounded | growing."""
    _positive_entries(seq)
    points = [(n, v / n**beta) for n, v in seq.entries if n >= 1 and (n & (n - 1)) == 0]
    if len(points) < 2:
        raise ParameterError("need at least two dyadic entries with n >= 1")
    first = points[0][1]
    last = points[-1][1]
    if last < 0.1 * first:
        return "decreasing_to_zero"
    if last > 2.0 * first:
        return "growing"
    return "bounded"
