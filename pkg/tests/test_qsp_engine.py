import itertools
import math

import numpy as np
import pytest

from qspsim import encoding as en
from qspsim import numerics as nm
from qspsim import polyapprox as pa
from qspsim import qsp_engine as qe
from qspsim.errors import ContractError, DomainError, ParseError

PLUS = np.array([1, 1]) / math.sqrt(2)


def test_signal_operator():
    np.testing.assert_allclose(qe.signal_operator(1.0), np.eye(2))
    np.testing.assert_allclose(qe.signal_operator(0.0), 1j * en.PAULI["X"])
    np.testing.assert_allclose(qe.signal_operator(0.5)[0], [0.5, 1j * math.sqrt(0.75)])
    assert nm.is_unitary(qe.signal_operator(-0.3))
    with pytest.raises(DomainError):
        qe.signal_operator(1.2)


def test_qsp_unitary_examples():
    x = 0.42
    np.testing.assert_allclose(qe.qsp_unitary([0, 0], x), qe.signal_operator(x))
    assert qe.block_value([0.3], 0.1) == pytest.approx(np.exp(0.3j))


def test_qsp_unitarity_and_pq_identity():
    rng = np.random.default_rng(0)
    phases = rng.uniform(-np.pi, np.pi, 21)
    for x in np.linspace(-1, 1, 101):
        u = qe.qsp_unitary(phases, x)
        assert nm.is_unitary(u, 1e-12)
        p = u[0, 0]
        s = math.sqrt(1 - x * x)
        # Q from the off-diagonal entry: U_01 = i Q sqrt(1-x^2)
        if s > 1e-8:
            q = u[0, 1] / (1j * s)
            assert abs(abs(p) ** 2 + (1 - x * x) * abs(q) ** 2 - 1) < 1e-12


def test_block_polynomial_parity():
    rng = np.random.default_rng(1)
    phases = rng.uniform(-np.pi, np.pi, 8)  # d = 7, odd
    x = np.linspace(-1, 1, 51)
    np.testing.assert_allclose(qe.block_value(phases, -x), -qe.block_value(phases, x), atol=1e-12)


def test_block_value_bases():
    assert qe.block_value([0.0], 0.3, "hadamard") == pytest.approx(1.0)
    x = 0.37
    assert qe.block_value([0, 0], x, "hadamard") == pytest.approx(x + 1j * math.sqrt(1 - x * x))
    rng = np.random.default_rng(2)
    for _ in range(101):
        phases = rng.uniform(-np.pi, np.pi, rng.integers(1, 12))
        x = rng.uniform(-1, 1)
        u = qe.qsp_unitary(phases, x)
        assert qe.block_value(phases, x) == pytest.approx(u[0, 0], abs=1e-13)
        assert qe.block_value(phases, x, "hadamard") == pytest.approx(PLUS @ u @ PLUS, abs=1e-13)


def test_hadamard_reading_formula():
    # <+|U|+> = Re P + i Re Q sqrt(1-x^2)
    rng = np.random.default_rng(3)
    phases = rng.uniform(-np.pi, np.pi, 6)
    for x in (-0.8, 0.1, 0.6):
        u = qe.qsp_unitary(phases, x)
        s = math.sqrt(1 - x * x)
        q = u[0, 1] / (1j * s)
        assert qe.block_value(phases, x, "hadamard") == pytest.approx(u[0, 0].real + 1j * q.real * s, abs=1e-12)


def test_phase_vector_canonical_and_text():
    pv = qe.PhaseVector([np.pi, -np.pi, 3 * np.pi / 2, 0.1])
    assert np.all(pv.phases <= np.pi) and np.all(pv.phases > -np.pi)
    np.testing.assert_allclose(pv.phases[:3], [np.pi, np.pi, -np.pi / 2])
    back = qe.PhaseVector.from_text(pv.to_text())
    assert np.array_equal(back.phases, pv.phases)
    assert pv.to_text().startswith("qsp-phases d=3 convention=Wx\n")
    with pytest.raises(ParseError):
        qe.PhaseVector.from_text("qsp-phases d=2 convention=Wx\n0.1\n")


def test_reflection_conversion_round_trip():
    pv = qe.PhaseVector([0.2, -0.4, 1.0, 0.3])
    np.testing.assert_allclose(pv.to_reflection().to_wx().phases, pv.phases, atol=1e-15)


def test_synthesis_trivial_targets():
    res = qe.synthesize_phases(pa.ChebyshevPolynomial([0, 1]), "computational", 1e-12)
    assert res.converged and res.achieved_error < 1e-14
    np.testing.assert_allclose(res.phases.phases, [0, 0], atol=1e-14)
    theta = 0.7
    res = qe.synthesize_phases(pa.ChebyshevPolynomial([np.exp(1j * theta)]), "computational", 1e-12)
    assert res.converged
    assert res.phases.phases[0] == pytest.approx(theta, abs=1e-10)


def test_synthesis_cos_hadamard():
    target = pa.jacobi_anger_cos(1.0, 1e-4)
    res = qe.synthesize_phases(target, "hadamard", 1e-3)
    assert res.converged and res.achieved_error <= 1e-3
    x = np.linspace(-1, 1, 201)
    assert np.max(np.abs(qe.block_value(res.phases, x, "hadamard") - target(x))) <= 1e-3


def test_synthesis_sin_hadamard():
    target = pa.jacobi_anger_sin(2.0, 1e-5)
    res = qe.synthesize_phases(target, "hadamard", 1e-6)
    assert res.converged
    x = np.linspace(-1, 1, 401)
    assert np.max(np.abs(qe.block_value(res.phases, x, "hadamard") - target(x))) <= 1e-6


def test_synthesis_eece_computational():
    tau = 6.0
    f = pa.named_target("eece", tau=tau)
    res = qe.synthesize_phases(f, "computational", 1e-3, degree=20, intervals=[(0.3, 0.7)], num_nodes=30)
    x = np.linspace(0.3, 0.7, 201)
    assert np.max(np.abs(qe.block_value(res.phases, x) - np.exp(-1j * tau * x))) <= max(res.achieved_error, 1e-3) + 1e-12
    assert res.converged


def test_synthesis_deterministic():
    target = pa.jacobi_anger_cos(3.0, 1e-6)
    a = qe.synthesize_phases(target, "hadamard", 1e-12, max_iter=300, seed=5)
    b = qe.synthesize_phases(target, "hadamard", 1e-12, max_iter=300, seed=5)
    assert np.array_equal(a.phases.phases, b.phases.phases)
    assert a.achieved_error == b.achieved_error


def test_synthesis_rejects_complex_target_in_hadamard():
    with pytest.raises(ContractError):
        qe.synthesize_phases(pa.ChebyshevPolynomial([0, 1j]), "hadamard", 1e-6)


def test_projector_phase():
    np.testing.assert_allclose(qe.projector_phase_matrix([0], 0.0, 1), np.eye(2))
    np.testing.assert_allclose(qe.projector_phase_matrix([0], np.pi / 2, 1), np.diag([1j, -1j]))
    refl = 2 * np.diag([1.0, 0, 1, 0]) - np.eye(4)
    np.testing.assert_allclose(refl @ refl, np.eye(4))
    with pytest.raises(ContractError):
        qe.projector_phase(np.zeros(4), 0.3)


def test_qet_examples():
    a = np.diag([0.3, -0.7])
    enc = en.dilation_encoding(a, 1.0)
    np.testing.assert_allclose(en.extract_block(qe.qet_sequence(enc, [0, 0])), a, atol=1e-12)
    out = qe.qet_sequence(enc, [0.4])
    np.testing.assert_allclose(en.extract_block(out), np.exp(0.4j) * np.eye(2), atol=1e-12)
    t2 = qe.synthesize_phases(pa.ChebyshevPolynomial([0, 0, 1]), "computational", 1e-12)
    out = qe.qet_sequence(enc, t2.phases)
    np.testing.assert_allclose(en.extract_block(out), np.diag([-0.82, -0.02]), atol=1e-10)
    assert nm.is_unitary(out.unitary, 1e-9)


def test_qet_eigen_consistency_all_diagonals():
    rng = np.random.default_rng(6)
    phases = qe.PhaseVector(rng.uniform(-np.pi, np.pi, 6))
    vals = (-0.9, -0.3, 0.2, 0.8)
    for diag in itertools.product(vals, repeat=4):
        enc = en.dilation_encoding(np.diag(diag), 1.0)
        out = qe.qet_sequence(enc, phases)
        np.testing.assert_allclose(en.extract_block(out), np.diag(qe.block_value(phases, np.array(diag))), atol=1e-9)


def test_qet_hadamard_reading():
    rng = np.random.default_rng(7)
    a = rng.normal(size=(4, 4))
    h = a + a.T
    enc = en.dilation_encoding(h, 1.1 * nm.spectral_norm(h))
    phases = qe.PhaseVector(rng.uniform(-np.pi, np.pi, 7))
    out = qe.qet_sequence(enc, phases, "hadamard")
    lam, v = nm.hermitian_eig(en.extract_block(enc))
    expected = (v * qe.block_value(phases, lam, "hadamard")) @ v.conj().T
    np.testing.assert_allclose(en.extract_block(out), expected, atol=1e-10)
    pre = en.pretransform_encoding(enc, 0.5)
    with pytest.raises(ContractError):
        qe.qet_sequence(pre, phases, "hadamard")


def test_qet_on_non_hermitian_encoding():
    # the pre-transformed encoding is not a hermitian unitary; P applies to its hermitian block
    rng = np.random.default_rng(8)
    a = rng.normal(size=(4, 4))
    h = a + a.T
    pre = en.pretransform_encoding(en.dilation_encoding(h, nm.spectral_norm(h)), 0.4)
    phases = qe.PhaseVector(rng.uniform(-np.pi, np.pi, 9))  # even degree 8
    out = qe.qet_sequence(pre, phases)
    assert nm.is_unitary(out.unitary, 1e-9)
    lam, v = nm.hermitian_eig(en.extract_block(pre))
    expected = (v * qe.block_value(phases, lam)) @ v.conj().T
    np.testing.assert_allclose(en.extract_block(out), expected, atol=1e-9)


def random_unitary(rng, n):
    q, r = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def test_qsvt_identity_and_even():
    rng = np.random.default_rng(9)
    u0 = random_unitary(rng, 2)
    a = 0.5 * u0
    dil = np.block([[a, math.sqrt(0.75) * np.eye(2)], [math.sqrt(0.75) * np.eye(2), -a.conj().T]])
    enc = en.BlockEncoding(dil, 1, 1)
    np.testing.assert_allclose(en.extract_block(qe.qsvt_sequence(enc, [0, 0], parity="odd")), a, atol=1e-12)
    t2 = qe.PhaseVector([0, 0, 0])  # T2 in the computational basis
    enc1 = en.dilation_encoding(np.diag([0.6, 0.0]), 1.0)
    out = en.extract_block(qe.qsvt_sequence(enc1, t2, parity="even"))
    assert out[0, 0] == pytest.approx(2 * 0.36 - 1)
    with pytest.raises(ContractError):
        qe.qsvt_sequence(enc1, t2, parity="odd")


def test_qsvt_magnitude_amplification():
    # A = 0.5 U0; an odd polynomial with P(0.5) = 1 recovers U0
    rng = np.random.default_rng(10)
    u0 = random_unitary(rng, 2)
    a = 0.5 * u0
    c = math.sqrt(0.75) * np.eye(2)
    enc = en.BlockEncoding(np.block([[a, c], [c, -a.conj().T]]), 1, 1)
    # T3(x) = 4x^3 - 3x with x = cos(pi/3) = 0.5 gives T3 = -1
    res = qe.synthesize_phases(pa.ChebyshevPolynomial([0, 0, 0, -1]), "computational", 1e-12)
    out = en.extract_block(qe.qsvt_sequence(enc, res.phases, parity="odd"))
    np.testing.assert_allclose(out, u0, atol=1e-9)


def test_qsvt_phase_preservation():
    rng = np.random.default_rng(11)
    phases = qe.PhaseVector(rng.uniform(-np.pi, np.pi, 6))  # odd degree, complex P
    for r, theta in [(0.3, 0.4), (0.8, -1.2), (0.55, 2.5)]:
        a = r * np.diag([np.exp(1j * theta), np.exp(-1j * theta)])
        c = math.sqrt(1 - r * r) * np.eye(2)
        enc = en.BlockEncoding(np.block([[a, c], [c, -a.conj().T]]), 1, 1)
        out = en.extract_block(qe.qsvt_sequence(enc, phases))
        p_r = qe.block_value(phases, r)
        ev = np.sort_complex(np.linalg.eigvals(out))
        np.testing.assert_allclose(ev, np.sort_complex(p_r * np.array([np.exp(1j * theta), np.exp(-1j * theta)])), atol=1e-8)
