import cmath
import math

import numpy as np
import pytest

from schemewalk import (
    FusionAxiomError,
    InputError,
    KreinTensor,
    build_complete_scheme,
    central_charge,
    fusion_matrices,
    fusion_power,
    fusion_ring,
    fusion_ring_from_krein,
    fusion_tree_space,
    ising_model,
    ising_ring,
    krein_parameters,
    perron_multiplicities,
    primitive_idempotents,
    quantum_dimensions,
    qutrit_encoding,
    total_quantum_dimension,
    trivial_ring,
    verify_fusion_ring,
    verlinde_check,
)
from schemewalk.fusion import anyon_model, format_multiset, require_verified

SIGMA, PSI = 1, 2


def altered_ising():
    n = ising_ring().n_tensor.copy()
    n[SIGMA, SIGMA, PSI] = 2
    return fusion_ring(("1", "σ", "ψ"), n, (0, 1, 2))


# Rings and axioms

def test_ising_rules():
    ring = ising_ring()
    assert ring.fuse("σ", "σ") == {"1": 1, "ψ": 1}
    assert ring.fuse("σ", "ψ") == {"σ": 1}
    assert ring.fuse("ψ", "ψ") == {"1": 1}

def test_label_aliases():
    ring = ising_ring()
    assert ring.index("sigma") == 1
    assert ring.index("psi") == 2
    assert ring.index("vacuum") == 0
    with pytest.raises(InputError):
        ring.index("tau")

def test_ising_ring_passes():
    report = verify_fusion_ring(ising_ring())
    assert report.passed
    assert [c.name for c in report.checks] == ["unit", "associativity", "duality", "commutativity"]

def test_trivial_ring_passes():
    assert verify_fusion_ring(trivial_ring()).passed

def test_altered_ring_fails_associativity():
    report = verify_fusion_ring(altered_ising())
    assert not report.passed
    check = report.check("associativity")
    assert not check.passed
    assert check.witness == ("σ", "σ", "ψ", "1")
    assert report.check("unit").passed
    with pytest.raises(FusionAxiomError):
        require_verified(altered_ising())

def test_duality_failure():
    n = ising_ring().n_tensor.copy()
    n[PSI, PSI, 0] = 0
    n[PSI, PSI, PSI] = 1
    report = verify_fusion_ring(fusion_ring(("1", "σ", "ψ"), n, (0, 1, 2)))
    assert not report.check("duality").passed

def test_fusion_ring_rejects_negative_entries():
    n = -np.ones((1, 1, 1), dtype=int)
    with pytest.raises(InputError):
        fusion_ring(("1",), n)

def test_fusion_ring_rejects_fractional_entries():
    with pytest.raises(InputError):
        fusion_ring(("1",), [[[0.5]]])

def test_fusion_ring_rejects_wrong_shape():
    with pytest.raises(InputError):
        fusion_ring(("1", "a"), np.ones((2, 2, 3), dtype=int))

def test_default_dual_is_read_from_tensor():
    ring = fusion_ring(("1", "σ", "ψ"), ising_ring().n_tensor)
    assert ring.dual == (0, 1, 2)


# Dimensions and products

def test_quantum_dimensions():
    d = quantum_dimensions(ising_ring())
    assert math.isclose(d[0], 1.0)
    assert abs(d[1] - math.sqrt(2)) < 1e-12
    assert math.isclose(d[2], 1.0)

def test_perron_multiplicities():
    assert perron_multiplicities(ising_ring()) == {"1": 3, "σ": 1, "ψ": 2}

def test_ising_dimensions_do_not_warn(caplog):
    quantum_dimensions(ising_ring())
    assert "degenerate" not in caplog.text

def test_reducible_ring_warns_on_degenerate_perron_root(caplog):
    # x × x = x, x × y = y, y × y = y: no duality, summed fusion matrix not irreducible
    n = np.zeros((3, 3, 3), dtype=np.int64)
    for a in range(3):
        n[0, a, a] = n[a, 0, a] = 1
    n[1, 1, 1] = 1
    n[1, 2, 2] = n[2, 1, 2] = n[2, 2, 2] = 1
    ring = fusion_ring(("1", "x", "y"), n)
    d = quantum_dimensions(ring)
    assert np.allclose(d, [1, 1, 1])
    assert "degenerate" in caplog.text

def test_total_dimension_and_central_charge():
    model = ising_model()
    assert math.isclose(total_quantum_dimension(model), 2.0)
    assert math.isclose(central_charge(model), 0.5)

def test_fusion_matrices_are_commuting():
    mats = fusion_matrices(ising_ring())
    for a in mats:
        for b in mats:
            assert np.array_equal(a @ b, b @ a)

def test_sigma_powers():
    ring = ising_ring()
    assert fusion_power(ring, "σ", 1) == {"σ": 1}
    assert fusion_power(ring, "σ", 3) == {"σ": 2}
    assert fusion_power(ring, "σ", 4) == {"1": 2, "ψ": 2}
    assert fusion_power(ring, "σ", 5) == {"σ": 4}

def test_power_needs_positive_exponent():
    with pytest.raises(InputError):
        fusion_power(ising_ring(), "σ", 0)

def test_format_multiset():
    assert format_multiset({"σ": 4}) == "4σ"
    assert format_multiset({"1": 2, "ψ": 2}) == "2·1 + 2ψ"
    assert format_multiset({"σ": 1}) == "σ"
    assert format_multiset({}) == "0"


# Fusion trees

def test_three_sigma_qubit():
    space = fusion_tree_space(ising_ring(), ["σ", "σ", "σ"], "σ")
    assert space.dimension == 2
    assert space.basis == (("1",), ("ψ",))

def test_single_sigma():
    space = fusion_tree_space(ising_ring(), ["σ"], "σ")
    assert space.dimension == 1
    assert space.basis == ((),)

def test_single_sigma_has_no_vacuum_channel():
    assert fusion_tree_space(ising_ring(), ["σ"], "1").dimension == 0

def test_six_sigma_space():
    space = fusion_tree_space(ising_ring(), ["σ"] * 6, "1")
    assert space.dimension == 4

def test_tree_dimension_matches_power():
    ring = ising_ring()
    for n in range(1, 8):
        power = fusion_power(ring, "σ", n)
        for label in ring.labels:
            assert fusion_tree_space(ring, ["σ"] * n, label).dimension == power.get(label, 0)

def test_qutrit_encoding():
    encoding = qutrit_encoding()
    assert encoding.tree_labels == (
        ("1", "σ", "1", "σ"),
        ("1", "σ", "ψ", "σ"),
        ("ψ", "σ", "1", "σ"),
    )
    assert all(tree in encoding.space.basis for tree in encoding.tree_labels)


# Modular data

def test_ising_verlinde():
    report = verlinde_check(ising_model())
    assert report.passed
    assert math.isclose(report.extras["total_quantum_dimension"], 2.0)

def test_trivial_verlinde():
    assert verlinde_check(anyon_model(trivial_ring(), [[1.0]], [1.0])).passed

def test_flipped_s_entry_fails():
    model = ising_model()
    s = model.s_matrix.copy()
    s[0, 0] = -s[0, 0]
    flipped = anyon_model(model.ring, s, model.twists, model.qdims)
    report = verlinde_check(flipped)
    assert not report.passed
    assert not report.check("verlinde").passed
    assert report.check("verlinde").witness is not None
    assert not report.check("eigenvectors").passed
    assert report.check("symmetry").passed

def test_twists_are_phases():
    twists = ising_model().twists
    assert np.allclose(np.abs(twists), 1.0)
    assert cmath.isclose(twists[1], cmath.exp(1j * math.pi / 8))

def test_anyon_model_shape_checks():
    with pytest.raises(InputError):
        anyon_model(ising_ring(), np.eye(2), [1, 1, 1])
    with pytest.raises(InputError):
        anyon_model(ising_ring(), np.eye(3), [1, 1])


# Krein parameters as fusion rules

def test_bernoulli_krein_ring():
    spectral = primitive_idempotents(build_complete_scheme(2))
    verdict = fusion_ring_from_krein(krein_parameters(spectral), spectral.multiplicities)
    assert verdict.raw.accepted
    assert verdict.rescaled.accepted
    ring = verdict.raw.ring
    assert ring.labels == ("1", "E1")
    assert ring.fuse("E1", "E1") == {"1": 1}

def test_non_integral_krein_entry_is_named():
    q = np.zeros((2, 2, 2))
    q[0, 0, 0] = q[1, 0, 1] = q[1, 1, 0] = q[0, 1, 1] = 1.0
    q[1, 1, 1] = 0.5
    verdict = fusion_ring_from_krein(KreinTensor(q=q, multiplicities=(1, 1)), (1, 1), tol=1e-6)
    assert not verdict.raw.accepted
    assert not verdict.raw.integral
    (index, value, deviation), = verdict.raw.non_integral
    assert index == (1, 1, 1)
    assert value == 0.5
    assert deviation == 0.5
    payload = verdict.to_payload()
    assert payload["raw"]["non_integral"][0]["index"] == [1, 1, 1]

def test_krein_multiplicity_count_must_match():
    q = np.zeros((2, 2, 2))
    with pytest.raises(InputError):
        fusion_ring_from_krein(KreinTensor(q=q), (1, 1, 1))
