"""Acceptance suite: one test per criterion, one printed pass/fail line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines alongside pytest's own verdicts.  Tolerances are pinned here, not
configurable.
"""

import cmath
import io
import math
from contextlib import redirect_stdout

import numpy as np
import pytest

from cesarolab import classify, dynamics, isometry, powers, zoo
from cesarolab.classify import ProbeConfig
from cesarolab.cli import main as cli_main
from cesarolab.core import (
    INTS,
    NAT,
    BilateralShift,
    BlockTZ,
    Diagonal,
    Explicit,
    FiniteMatrix,
    FiniteRange,
    PairVec,
    Polynomial,
    basis_vector,
    make_vector,
    p_norm,
    to_matrix,
)
from cesarolab.powers import NormSeq


def _report(num: int, label: str, check) -> None:
    try:
        check()
    except BaseException:
        print(f"criterion {num:2d}: FAIL - {label}")
        raise
    print(f"criterion {num:2d}: PASS - {label}")


def test_criterion_01_exact_power_norm_law():
    def check():
        for alpha in (0.1, 0.25, 0.4):
            spec = zoo.acb_backward_shift(2.0, alpha).spec
            for n in range(1, 10**4 + 1):
                value = powers.power_norm_exact(spec, n, 2)
                ref = (n + 1.0) ** alpha
                assert abs(value - ref) <= 1e-12 * ref

    _report(1, "power norms of the averaging backward shift equal (n+1)^alpha", check)


def test_criterion_02_acb_constant_bound():
    def check():
        spec = zoo.acb_backward_shift(2.0, 0.25).spec
        cfg = ProbeConfig(n_max=2**12, basis_probes=12, seeded_probes=200)
        verdict = classify.acb_constant(spec, cfg)
        assert verdict.bounded()
        assert verdict.best_constant <= math.sqrt(6.0)

    _report(2, "absolute-Cesaro constant stays below sqrt(6) on 200+ unit probes", check)


def test_criterion_03_non_cesaro_lower_bound():
    def check():
        spec = zoo.non_cesaro_backward_shift(2.0).spec
        c = zoo.non_cesaro_constant(2.0)
        assert c == pytest.approx(0.4309644, abs=1e-7)
        previous = 0.0
        for k in range(4, 15):
            n = 2**k
            x = zoo.adversarial_vector(n, 2.0)
            value_sq = p_norm(powers.cesaro_apply(spec, x, n - 1), 2) ** 2
            assert value_sq >= 0.9 * c * c * math.log(n / 2.0)
            assert value_sq > previous
            previous = value_sq
        # independent oracle at n = 2^8: suffix-sum formula for the mean norm
        n = 2**8
        us = np.sqrt(np.arange(1, n + 1, dtype=float))
        suffix = np.cumsum(us[::-1])[::-1]
        oracle_sq = float(np.sum(suffix**2 / np.arange(1, n + 1, dtype=float))) / n**3
        x = zoo.adversarial_vector(n, 2.0)
        value_sq = p_norm(powers.cesaro_apply(spec, x, n - 1), 2) ** 2
        assert value_sq == pytest.approx(oracle_sq, rel=1e-10)

    _report(3, "averaged adversarial orbits grow past 0.9 c^2 ln(n/2), increasing", check)


def test_criterion_04_assani_suite():
    def check():
        entry = zoo.assani()
        spec = entry.spec
        u2 = FiniteRange(2)
        for n in range(65):
            sign = (-1.0) ** n
            img = powers.power_apply(spec, basis_vector(u2, 2), n)
            assert img.entries.get(1, 0j) == complex(-sign * 2 * n)
            assert img.entries.get(2, 0j) == complex(sign)
        assert isometry.strict_order(spec, 6) == 3
        cb = classify.cesaro_bounded_probe(spec, ProbeConfig(n_max=10**4))
        assert cb.bounded() and cb.certainty == "exact"
        assert cb.best_constant <= 3.0
        me = dynamics.mean_ergodic_probe(spec, basis_vector(u2, 2), 2**14)
        assert me.status == "diverged"
        assert isometry.covariance_form(spec, basis_vector(u2, 2)) == pytest.approx(4.0, abs=1e-9)
        probe = isometry.covariance_injectivity_probe(spec)
        assert probe.status == "kernel_witness" and probe.witness == "e[1]"

    _report(4, "assani matrix: closed form, order 3, bounded averages, no mean limit", check)


def test_criterion_05_m_isometric_shift_family():
    def check():
        for coeffs in [(0.0, 1.0), (0.0, 0.0, 1.0), (1.0, 0.0, 1.0)]:
            p = Polynomial(coeffs)
            spec = isometry.shift_from_polynomial(p)
            m = p.degree + 1
            cfg = ProbeConfig(basis_probes=8, seeded_probes=0)
            report = isometry.is_m_isometry(spec, m, cfg)
            assert report.passed
            assert report.max_defect < 1e-9 * report.scale
            assert isometry.strict_order(spec, 6) == m
            assert isometry.norm_square_degree(spec, basis_vector(NAT, 1)) == p.degree

    _report(5, "polynomial-weight shifts are strict (deg p + 1)-isometries", check)


def test_criterion_06_kreiss_separation():
    def check():
        assani = zoo.assani().spec
        deltas = [2.0**-k for k in range(3, 17)]
        kr = classify.kreiss_resolvent_constant(assani, deltas)
        assert kr.status == "violated"
        values = {d: v for d, v, _ in kr.parameters["per_delta"]}
        for k in range(3, 16):
            ratio = values[2.0 ** -(k + 1)] / values[2.0**-k]
            assert 1.6 <= ratio <= 2.4
        fwd = zoo.forward_kreiss_shift(0.4).spec
        uk = classify.uniform_kreiss_probe(
            fwd, ProbeConfig(n_max=2**11, lambda_samples=64, basis_probes=0, seeded_probes=50)
        )
        assert uk.bounded()
        acb = classify.acb_constant(fwd, ProbeConfig(n_max=10**4, basis_probes=2, seeded_probes=2))
        assert acb.status == "violated"
        assert acb.best_constant > 20.0

    _report(6, "Jordan resolvent doubles per dyadic delta; the Kreiss shift separates", check)


def test_criterion_07_block_operator_instances():
    def check():
        u = BilateralShift(Explicit((), 1.0))
        tz = BlockTZ(u)
        rng = np.random.default_rng(0xCE5A70)

        def unit_pair():
            def rv():
                return make_vector(
                    INTS,
                    [(int(k), complex(*rng.standard_normal(2))) for k in rng.integers(-8, 9, size=5)],
                )

            pair = PairVec(rv(), rv())
            norm = p_norm(pair, 2)
            return PairVec(
                make_vector(INTS, [(k, v / norm) for k, v in pair.top.entries.items()]),
                make_vector(INTS, [(k, v / norm) for k, v in pair.bottom.entries.items()]),
            )

        for _ in range(20):
            x, y = unit_pair(), unit_pair()
            verdict = dynamics.weak_ergodic_probe(tz, x, y, 2**24)
            assert verdict.status == "converged"
            scaled = [n * g for n, g in verdict.gaps if n >= 64]
            if max(scaled) > 1e-12:
                assert max(scaled) <= 2.0 * min(scaled)  # the C/n fit
        assert isometry.strict_order(tz, 6) == 3
        inner = FiniteMatrix(((1.0, 1.0), (0.0, 1.0)))
        m4 = FiniteMatrix(tuple(tuple(r) for r in to_matrix(BlockTZ(inner)).tolist()))
        assert isometry.strict_order(m4, 8) == 3
        cb = classify.cesaro_bounded_probe(m4, ProbeConfig(n_max=2**12))
        assert cb.status == "violated"

    _report(7, "block operators: weakly ergodic over the bilateral shift, order 3", check)


def test_criterion_08_media_identity_over_zoo():
    def check():
        cfg = ProbeConfig(basis_probes=0, seeded_probes=100)
        for entry in zoo.all_entries():
            for label, x in classify.probe_vectors(entry.spec, cfg):
                worst = powers.media_residual_max(entry.spec, x, 64, 2)
                assert worst < 1e-11, (entry.entry_id, label, worst)

    _report(8, "mean identity residual < 1e-11 over the zoo x 100 seeded vectors", check)


def test_criterion_09_growth_trend_probes():
    def check():
        dyadics = [2**k for k in range(0, 37)]
        for alpha in (0.1, 0.25, 0.4):
            spec = zoo.acb_backward_shift(2.0, alpha).spec
            seq = NormSeq(
                tuple((n, powers.power_norm_exact(spec, n, 2)) for n in dyadics), "operator-norm", 2
            )
            assert classify.ratio_trend(seq, 1.0) == "decreasing_to_zero"
            assert classify.ratio_trend(seq, 0.5) == "decreasing_to_zero"
        fwd = zoo.forward_kreiss_shift(0.4).spec
        seq = NormSeq(tuple((n, powers.power_norm_exact(fwd, n, 2)) for n in dyadics), "operator-norm", 2)
        assert classify.ratio_trend(seq, 1.0) == "decreasing_to_zero"

    _report(9, "power norms are o(n) and o(sqrt n) on the expected families", check)


def test_criterion_10_hypercyclicity_coverage():
    def check():
        spec = zoo.diag_nilpotent_3isometry().spec
        w = dynamics.balanced_witness(spec)
        r3 = dynamics.hypercyclicity_probe(spec, w, w, 10**3)
        r4 = dynamics.hypercyclicity_probe(spec, w, w, 10**4)
        r6 = dynamics.hypercyclicity_probe(spec, w, w, 10**6)
        assert r3.hits <= r4.hits <= r6.hits  # monotone in N on the fixed grid
        assert len(r3.hits) < len(r4.hits) < len(r6.hits)
        control = Diagonal(FiniteRange(1), cmath.exp(1j))
        e1 = basis_vector(FiniteRange(1), 1)
        ctl = dynamics.hypercyclicity_probe(control, e1, e1, 10**5)
        assert len(ctl.hits) <= dynamics.circle_cell_count(40.0, 1.0, 1.0)

    _report(10, "coverage grows strictly through 1e3 < 1e4 < 1e6; control stays on circle", check)


def test_criterion_11_chaos_and_mixing_criteria():
    def check():
        chaotic = dynamics.chaos_criterion_shift_adjoint(Polynomial((0.0, 0.0, 1.0)))
        assert chaotic.status == "chaotic"
        assert chaotic.summability["converges"]
        assert chaotic.summability["tail_bound"] < 1e-3
        mixing_only = dynamics.chaos_criterion_shift_adjoint(Polynomial((0.0, 1.0)))
        assert mixing_only.status == "mixing_only"
        verdict = dynamics.mixing_criterion_backward_shift(zoo.acb_backward_shift(2.0, 0.25).spec.rule)
        assert verdict.status == "mixing_evidence"
        for n, value in verdict.samples:
            if n >= 2:
                assert abs(value - float(n) ** -0.25) <= 1e-12 * value

    _report(11, "chaos/mixing criteria fire per degree; products telescope exactly", check)


def test_criterion_12_deterministic_reports():
    def check():
        def run(argv):
            buf = io.StringIO()
            with redirect_stdout(buf):
                code = cli_main(argv)
            assert code == 0
            return buf.getvalue()

        argv = ["classify", "bshift:alpha=0.25,p=2", "--probes", "acb,pb,cb", "--json", "--seed", "0xCE5A70"]
        assert run(argv) == run(argv)
        argv = ["probe", "hc", "hyper4", "--N", "5000", "--json", "--seed", "0xCE5A70"]
        assert run(argv) == run(argv)
        argv = ["probe", "ergodic", "blocktz:bilateral", "--weak", "--x", "pair:e0|0", "--json"]
        assert run(argv) == run(argv)

    _report(12, "identical seeds produce byte-identical report documents", check)
