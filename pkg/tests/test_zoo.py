import math

import pytest

from cesarolab.core import (
    NAT,
    BackwardShift,
    FiniteMatrix,
    ParameterError,
    adjoint,
    apply,
    basis_vector,
    p_norm,
)
from cesarolab.powers import power_apply
from cesarolab.zoo import (
    RATIONALLY_INDEPENDENT,
    acb_backward_shift,
    acb_bound,
    adversarial_vector,
    all_entries,
    assani,
    block_tz,
    diag_nilpotent_3isometry,
    forward_kreiss_shift,
    get_entry,
    lambda_block,
    non_cesaro_constant,
    two_isometry_embedding,
    verify_entry,
)


def test_registry_shape():
    entries = all_entries()
    assert len(entries) >= 9
    ids = [e.entry_id for e in entries]
    assert len(ids) == len(set(ids))
    assert get_entry("assani").entry_id == "assani"
    with pytest.raises(KeyError):
        get_entry("nope")


def test_every_expected_row_names_known_probe():
    known = {
        "power_bounded",
        "cesaro_bounded",
        "absolutely_cesaro",
        "uniformly_kreiss",
        "strict_order",
        "mean_ergodic",
        "weak_ergodic",
        "mixing",
        "covariance_kernel",
        "coverage_increasing",
    }
    for entry in all_entries():
        for row in entry.expected:
            assert row.probe in known


def test_assani_closed_form_all_n():
    entry = assani()
    for n in range(65):
        sign = (-1.0) ** n
        for j, col in ((1, [sign, 0.0]), (2, [-sign * 2 * n, sign])):
            img = power_apply(entry.spec, basis_vector(entry.spec.universe, j), n)
            got = [img.entries.get(1, 0j), img.entries.get(2, 0j)]
            assert got == [complex(col[0]), complex(col[1])]


def test_lambda_block_requires_unimodular_offset_one():
    with pytest.raises(ParameterError):
        lambda_block(1.0)
    with pytest.raises(ParameterError):
        lambda_block(2.0)


def test_acb_shift_parameters():
    with pytest.raises(ParameterError):
        acb_backward_shift(2.0, 0.6)
    entry = acb_backward_shift(2.0, 0.25)
    assert isinstance(entry.spec, BackwardShift)
    assert acb_bound(2.0, 0.25) == pytest.approx(math.sqrt(6.0), rel=1e-15)


def test_forward_kreiss_adjoint_matches_acb_weights():
    fwd = forward_kreiss_shift(0.25)
    back = acb_backward_shift(2.0, 0.25)
    adj = adjoint(fwd.spec)
    for k in range(2, 12):
        a = apply(adj, basis_vector(NAT, k))
        b = apply(back.spec, basis_vector(NAT, k))
        assert a.entries.keys() == b.entries.keys()
        for idx in a.entries:
            assert a.entries[idx] == pytest.approx(b.entries[idx], rel=1e-14)


def test_non_cesaro_constant_value():
    assert non_cesaro_constant(2.0) == pytest.approx(0.4309644, abs=1e-7)


def test_adversarial_vector_contract():
    x = adversarial_vector(4, 2)
    assert x.entries == {k: pytest.approx(0.5 + 0j) for k in range(1, 5)}
    assert p_norm(adversarial_vector(64, 3), 3) == pytest.approx(1.0, abs=1e-13)
    with pytest.raises(ParameterError):
        adversarial_vector(5, 2)


def test_block_tz_generic_instantiates_from_inner():
    bounded_inner = FiniteMatrix(((0.5, 0.0), (0.0, 0.5)))
    entry = block_tz(bounded_inner)
    assert entry.expected[0].probe == "cesaro_bounded"
    assert entry.expected[0].expected == "bounded"
    growing_inner = FiniteMatrix(((1.0, 1.0), (0.0, 1.0)))
    entry = block_tz(growing_inner)
    assert entry.expected[0].expected == "violated"


def test_diag_nilpotent_parameter_errors():
    l1, l2 = RATIONALLY_INDEPENDENT
    with pytest.raises(ParameterError):
        diag_nilpotent_3isometry(4, 3, l1, l2)
    entry = diag_nilpotent_3isometry(6, 3)
    assert entry.expected[0].expected == "5"  # strict order 2*3 - 1


def test_two_isometry_embedding_defects():
    from cesarolab.isometry import defect

    entry = two_isometry_embedding()
    e1 = basis_vector(NAT, 1)
    assert defect(entry.spec, e1, 2) == pytest.approx(0.0, abs=1e-12)
    assert defect(entry.spec, e1, 1) == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("entry_id", [e.entry_id for e in all_entries()])
def test_expected_tables_pass(entry_id):
    entry = get_entry(entry_id)
    checks = verify_entry(entry)
    failures = [(c.row.probe, c.row.expected, c.actual) for c in checks if not c.passed]
    assert not failures
