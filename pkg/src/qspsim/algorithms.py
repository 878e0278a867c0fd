"""Hamiltonian simulation algorithms built from QSP sequences.

Every algorithm here takes already synthesized phases, builds the full
circuit unitary densely and reports its encoded block against the exact
evolution. ``PhaseRequest`` describes the synthesis problem each algorithm
needs so that callers can solve and cache phases deterministically.
"""

import hashlib
import json
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from . import numerics as nm
from . import polyapprox as pa
from .encoding import HADAMARD, BlockEncoding, PauliSum, dilation_encoding, extract_block, pretransform_encoding
from .errors import AccuracyError, ContractError, DegenerateOutcomeError, DomainError
from .qsp_engine import PhaseVector, block_value, qet_sequence, qsvt_sequence, synthesize_phases

ATOMIC_TIME_FS = 0.02418884254
RK4_SUBSTEPS = 2000
RK4_TOL = 1e-8


@dataclass
class SimulationOutcome:
    """Result of running one simulation circuit on an input state.

    Attributes:
        final_state: post-selected, renormalized system state.
        success_probability: probability of observing the signal state.
        block_operator: encoded system block realized by the circuit.
        operator_error: spectral-norm distance to the exact target.
        queries_used: number of calls to the Hamiltonian block encoding.
        step_probability: per-step success probability (Trotter chains only).
    """

    final_state: np.ndarray
    success_probability: float
    block_operator: np.ndarray
    operator_error: float
    queries_used: int
    step_probability: float = None


@dataclass
class TimeDependentSpec:
    """Piecewise-constant schedule for ``H(t)``.

    ``hamiltonian_at`` may return a PauliSum or a dense Hermitian matrix.
    """

    hamiltonian_at: object
    total_time: float
    steps: int

    def __post_init__(self):
        if int(self.steps) < 1:
            raise DomainError(f"need at least one Trotter step, got {self.steps}")
        self.steps = int(self.steps)

    @property
    def dt(self):
        return self.total_time / self.steps

    def matrix_at(self, t):
        h = self.hamiltonian_at(t)
        return h.to_matrix() if isinstance(h, PauliSum) else np.asarray(h, dtype=complex)


# ---------------------------------------------------------------- phase requests


@dataclass(frozen=True)
class PhaseRequest:
    """A phase-synthesis problem fully described by plain values.

    Targets:
        cos, sin: fixed-degree truncated Jacobi-Anger polynomials at ``tau``,
            read in the Hadamard basis, fitted on [-1, 1].
        eece: ``exp(-i tau x)`` on ``[lo, hi]`` in the computational basis; the
            even phase sequence mirrors it onto ``[-hi, -lo]``.
        sign: the sign function on ``[lo, hi]`` in the computational basis.
    """

    target: str
    tau: float
    degree: int
    lo: float = -1.0
    hi: float = 1.0
    tolerance: float = 1e-10
    seed: int = 0
    max_iter: int = None

    def key(self):
        blob = json.dumps(asdict(self), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:24]

    @property
    def basis(self):
        return "hadamard" if self.target in ("cos", "sin") else "computational"

    def target_callable(self):
        if self.target == "cos":
            return pa.truncated_cos(self.tau, self.degree)
        if self.target == "sin":
            return pa.truncated_sin(self.tau, self.degree)
        if self.target == "eece":
            tau = self.tau
            return lambda x: np.exp(-1j * tau * np.asarray(x, dtype=float))
        if self.target == "sign":
            return lambda x: np.sign(np.asarray(x, dtype=float)).astype(float)
        raise ContractError(f"unknown phase target {self.target!r}")

    def solve(self, init=None):
        """Run the synthesis; returns a SynthesisResult."""
        return synthesize_phases(
            self.target_callable(),
            basis=self.basis,
            tolerance=self.tolerance,
            degree=self.degree,
            intervals=[(self.lo, self.hi)],
            init=init,
            max_iter=self.max_iter,
            seed=self.seed,
        )


def lcu_requests(tau, d_cos, d_sin, tolerance=1e-10, seed=0):
    """Requests for the cosine and sine halves of QSP-LCU at effective time ``tau``."""
    return PhaseRequest("cos", float(tau), int(d_cos), tolerance=tolerance, seed=seed), PhaseRequest(
        "sin", float(tau), int(d_sin), tolerance=tolerance, seed=seed
    )


def eece_request(t, alpha, beta, degree, tolerance=1e-10, seed=0, max_iter=None):
    """Request for the one-shot polynomial ``exp(-i tau x)`` with ``tau = 2 t alpha / beta``."""
    return PhaseRequest("eece", 2.0 * t * alpha / beta, int(degree), (1 - beta) / 2, (1 + beta) / 2, tolerance, seed, max_iter)


def sign_request(eps, degree, tolerance=1e-10, seed=0, max_iter=None):
    """Request for the amplification polynomial: sign on ``[(1 - eps) / 2, 1]``."""
    return PhaseRequest("sign", 0.0, int(degree), (1 - eps) / 2, 1.0, tolerance, seed, max_iter)


def scalar_error(req, phases, grid_points=pa.GRID_POINTS):
    """Sup-norm error of the synthesized block value against the request's ideal function.

    The ideal is ``cos(tau x)`` / ``sin(tau x)`` for the LCU halves (on [-1, 1]),
    ``exp(-i tau x)`` on the one-shot window, and 1 on the sign window.
    """
    x = np.linspace(req.lo, req.hi, grid_points)
    v = block_value(phases, x, req.basis)
    ideal = {
        "cos": lambda: np.cos(req.tau * x),
        "sin": lambda: np.sin(req.tau * x),
        "eece": lambda: np.exp(-1j * req.tau * x),
        "sign": lambda: np.sign(x),
    }[req.target]()
    return float(np.max(np.abs(v - ideal)))


# ---------------------------------------------------------------- helpers


def _default_state(n):
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = 1.0
    return psi


def _exact(enc, t):
    return nm.matrix_exp_hermitian(extract_block(enc) * enc.scale_alpha, t)


def apply_and_postselect(enc, psi0):
    """Apply ``enc`` to ``|signal>|psi0>`` and post-select the signal state.

    Returns:
        (normalized system state, success probability).
    """
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (enc.system_dim,):
        raise ContractError(f"state of length {psi0.shape} for a {enc.system_dim}-dim system")
    out = extract_block(enc) @ psi0
    p = float(np.vdot(out, out).real)
    if p <= 1e-300:
        raise DegenerateOutcomeError("post-selection has zero probability")
    return out / math.sqrt(p), min(p, 1.0)


def _outcome(block, exact, psi0, queries, phase_free=False):
    psi = block @ psi0
    p = float(np.vdot(psi, psi).real)
    if p <= 1e-300:
        raise DegenerateOutcomeError("post-selection has zero probability")
    err = phase_removed_error(block, exact) if phase_free else nm.spectral_norm(block - exact)
    return SimulationOutcome(psi / math.sqrt(p), min(p, 1.0), block, float(err), int(queries))


def phase_removed_error(block, exact):
    """``min over phi`` of ``||block e^{i phi} - exact||``."""
    phi0 = float(np.angle(np.trace(exact.conj().T @ block)))
    f = lambda phi: nm.spectral_norm(block * np.exp(1j * phi) - exact)
    res = minimize_scalar(f, bounds=(-phi0 - 0.5, -phi0 + 0.5), method="bounded", options={"xatol": 1e-12})
    return float(min(res.fun, f(-phi0)))


# ---------------------------------------------------------------- QSP-LCU family


def lcu_encoding(enc, phases_cos, phases_sin):
    """Two-ancilla encoding of ``(P_cos(A) - i P_sin(A)) / 2`` from a Hermitian dilation.

    Each half is a Hadamard-basis QET on the dilation; a new outermost control
    qubit conjugated by Hadamards sums them with the ``-i`` weight on the sine half.
    """
    u_cos = qet_sequence(enc, phases_cos, "hadamard").unitary
    u_sin = qet_sequence(enc, phases_sin, "hadamard").unitary
    dim = u_cos.shape[0]
    zero = np.zeros((dim, dim), dtype=complex)
    select = np.block([[u_cos, zero], [zero, -1j * u_sin]])
    hl = np.kron(HADAMARD, np.eye(dim))
    return BlockEncoding(hl @ select @ hl, enc.system_qubits, enc.ancilla_qubits + 1, 0, enc.scale_alpha)


def _degree(phases):
    return phases.degree if isinstance(phases, PhaseVector) else len(phases) - 1


def qsp_lcu(enc, t, eps=None, phases_cos=None, phases_sin=None, psi0=None):
    """QSP-LCU: encodes ``exp(-iHt) / 2`` with two ancillas.

    Args:
        enc: one-ancilla Hermitian dilation of H / alpha.
        t: simulation time (phases must target ``tau = alpha t``).
        eps: optional budget; raise ContractError when the block misses
            ``exp(-iHt) / 2`` by more than ``eps / 2``.
        phases_cos, phases_sin: Hadamard-basis phases for the two halves.
        psi0: input state (defaults to the all-zero basis state).

    Returns:
        (BlockEncoding of the LCU circuit, SimulationOutcome). The outcome's
        operator_error compares the block with ``exp(-iHt) / 2``.
    """
    w = lcu_encoding(enc, phases_cos, phases_sin)
    psi0 = _default_state(enc.system_qubits) if psi0 is None else psi0
    out = _outcome(extract_block(w), 0.5 * _exact(enc, t), psi0, _degree(phases_cos) + _degree(phases_sin))
    if eps is not None and out.operator_error > eps / 2 + 1e-12:
        raise ContractError(f"LCU block error {out.operator_error:.3e} exceeds eps/2 = {eps / 2:.3e}")
    return w, out


def _reflection_diag(enc):
    return 1.0 - 2.0 * enc.signal_projector_diag()


def roaa_encoding(w):
    """Robust oblivious amplification ``A = -W R W^dagger R W`` with ``R = I - 2P``."""
    r = _reflection_diag(w)
    u = w.unitary
    a = -(u @ (r[:, None] * (u.conj().T @ (r[:, None] * u))))
    return BlockEncoding(a, w.system_qubits, w.ancilla_qubits, w.signal_state, w.scale_alpha)


def qsp_lcu_roaa(enc, t, eps=None, phases_cos=None, phases_sin=None, psi0=None):
    """QSP-LCU followed by robust oblivious amplitude amplification (three LCU calls)."""
    w, _ = qsp_lcu(enc, t, None, phases_cos, phases_sin)
    a = roaa_encoding(w)
    psi0 = _default_state(enc.system_qubits) if psi0 is None else psi0
    return _outcome(extract_block(a), _exact(enc, t), psi0, 3 * (_degree(phases_cos) + _degree(phases_sin)))


def qsp_lcu_aa(enc, t, eps=None, delta=None, phases_cos=None, phases_sin=None, phases_sign=None, psi0=None):
    """QSP-LCU followed by singular value amplification with an odd sign polynomial.

    The odd QSVT keeps the left and right singular vectors of the LCU block,
    so its eigenphases are preserved while singular values near 1/2 are
    pushed toward 1.
    """
    w, _ = qsp_lcu(enc, t, None, phases_cos, phases_sin)
    if _degree(phases_sign) % 2 != 1:
        raise ContractError("amplification needs an odd-degree phase sequence")
    amp = qsvt_sequence(w, phases_sign, parity="odd")
    psi0 = _default_state(enc.system_qubits) if psi0 is None else psi0
    queries = _degree(phases_sign) * (_degree(phases_cos) + _degree(phases_sin))
    return _outcome(extract_block(amp), _exact(enc, t), psi0, queries)


def one_shot(enc, t, eps=None, beta=None, phases_eece=None, psi0=None):
    """Coherent one-shot simulation.

    The dilation is pre-transformed to ``(I + beta H / alpha) / 2`` and a
    single computational-basis QET applies ``exp(-i tau x)`` with
    ``tau = 2 t alpha / beta``; the block equals ``exp(-i t alpha / beta) exp(-iHt)``
    up to the polynomial error. operator_error removes the global phase.
    """
    if beta is None:
        raise ContractError("one_shot requires beta")
    pre = pretransform_encoding(enc, beta)
    out_enc = qet_sequence(pre, phases_eece, "computational")
    psi0 = _default_state(enc.system_qubits) if psi0 is None else psi0
    return _outcome(extract_block(out_enc), _exact(enc, t), psi0, _degree(phases_eece), phase_free=True)


# ---------------------------------------------------------------- time dependence


@dataclass
class TrotterStepConfig:
    """Per-step settings shared by every slice of a Trotter chain."""

    alpha: float
    beta: float = None
    phases_cos: object = None
    phases_sin: object = None
    phases_eece: object = None


def _step_block(algorithm, h, dt, cfg):
    enc = dilation_encoding(h, cfg.alpha)
    psi = _default_state(enc.system_qubits)
    if algorithm == "roaa":
        out = qsp_lcu_roaa(enc, dt, None, cfg.phases_cos, cfg.phases_sin, psi)
    elif algorithm == "one_shot":
        out = one_shot(enc, dt, None, cfg.beta, cfg.phases_eece, psi)
    elif algorithm == "lcu":
        _, out = qsp_lcu(enc, dt, None, cfg.phases_cos, cfg.phases_sin, psi)
    else:
        raise ContractError(f"unknown Trotter algorithm {algorithm!r}")
    return out.block_operator, out.queries_used


def trotter_evolve(spec, algorithm, config, psi0, postselect_each_step=False):
    """Chain one simulation block per slice ``H(k dt)`` applied to ``psi0``.

    Blocks are multiplied coherently and the cumulative success probability is
    the squared norm of the chained state. With ``postselect_each_step`` the
    state is renormalized after every slice and the cumulative probability is
    the running product of per-step probabilities (a diagnostic mode).

    Returns:
        list of SimulationOutcome, one per step; ``block_operator`` is the
        chained block product and ``operator_error`` its distance to the
        ideal Trotter product (global phase removed for one_shot).
    """
    dt = spec.dt
    state = np.asarray(psi0, dtype=complex)
    chain = np.eye(state.shape[0], dtype=complex)
    ideal = np.eye(state.shape[0], dtype=complex)
    cumulative = 1.0
    outcomes = []
    for k in range(spec.steps):
        h = spec.matrix_at(k * dt)
        block, queries = _step_block(algorithm, h, dt, config)
        before = float(np.vdot(state, state).real)
        state = block @ state
        after = float(np.vdot(state, state).real)
        if after <= 1e-300:
            raise DegenerateOutcomeError(f"chain collapsed at step {k}")
        step_p = after / before
        chain = block @ chain
        ideal = nm.matrix_exp_hermitian(h, dt) @ ideal
        if postselect_each_step:
            cumulative *= step_p
            state = state / math.sqrt(after)
        else:
            cumulative = after
        err = phase_removed_error(chain, ideal) if algorithm == "one_shot" else nm.spectral_norm(chain - ideal)
        outcomes.append(
            SimulationOutcome(
                state / np.linalg.norm(state),
                min(cumulative, 1.0),
                chain.copy(),
                float(err),
                (k + 1) * queries,
                min(step_p, 1.0),
            )
        )
    return outcomes


def ideal_trotter_unitaries(spec):
    """Exact per-slice exponentials multiplied in time order; entry k covers k slices."""
    dt = spec.dt
    out = [np.eye(spec.matrix_at(0.0).shape[0], dtype=complex)]
    for k in range(spec.steps):
        out.append(nm.matrix_exp_hermitian(spec.matrix_at(k * dt), dt) @ out[-1])
    return out


def _rk4(spec, t0, t1, n):
    h = (t1 - t0) / n
    dim = spec.matrix_at(t0).shape[0]
    u = np.eye(dim, dtype=complex)
    rhs = lambda t, v: -1j * (spec.matrix_at(t) @ v)
    for i in range(n):
        t = t0 + i * h
        k1 = rhs(t, u)
        k2 = rhs(t + h / 2, u + h / 2 * k1)
        k3 = rhs(t + h / 2, u + h / 2 * k2)
        k4 = rhs(t + h, u + h * k3)
        u = u + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return u


def _polar_unitary(m):
    w, _, vh = np.linalg.svd(m)
    return w @ vh


def exact_evolution_td(spec, substeps=RK4_SUBSTEPS, checkpoints=False):
    """Solve ``i dU/dt = H(t) U`` from ``U(0) = I`` with classical RK4.

    Each slice ``[k dt, (k + 1) dt]`` is integrated with ``substeps`` steps per
    unit time and again with twice as many; a difference above 1e-8 raises
    AccuracyError. The result is projected onto the unitaries by polar
    decomposition.

    Args:
        spec: TimeDependentSpec.
        substeps: RK4 steps per unit time.
        checkpoints: return the list of unitaries at every slice boundary.
    """
    dt = spec.dt
    n = max(1, int(math.ceil(substeps * abs(dt))))
    u = np.eye(spec.matrix_at(0.0).shape[0], dtype=complex)
    out = [u]
    for k in range(spec.steps):
        coarse = _rk4(spec, k * dt, (k + 1) * dt, n)
        fine = _rk4(spec, k * dt, (k + 1) * dt, 2 * n)
        diff = float(np.max(np.abs(coarse - fine)))
        if diff > RK4_TOL:
            raise AccuracyError(f"RK4 step doubling changed slice {k} by {diff:.2e}")
        u = fine @ u
        out.append(_polar_unitary(u))
    return out if checkpoints else out[-1]


# ---------------------------------------------------------------- observables


def _num_qubits(psi):
    n = int(round(math.log2(len(psi))))
    if 2**n != len(psi):
        raise ContractError(f"state length {len(psi)} is not a power of two")
    return n


def _z_expectation(psi, site):
    psi = np.asarray(psi, dtype=complex)
    n = _num_qubits(psi)
    if not 0 <= site < n:
        raise IndexError(f"site {site} outside {n} qubits")
    probs = np.abs(psi.reshape([2] * n)) ** 2
    probs = np.moveaxis(probs, site, 0).reshape(2, -1).sum(axis=1)
    return float((probs[0] - probs[1]) / probs.sum())


def expectation_sigma_z(psi, site=0):
    """``<psi| Z_site |psi>`` with site 0 the most significant (first) qubit."""
    return _z_expectation(psi, site)


def occupation_number(psi, orbitals=(0, 2)):
    """Total occupation ``sum (1 - <Z_j>) / 2`` over the given spin orbitals."""
    return float(sum((1.0 - _z_expectation(psi, j)) / 2 for j in orbitals))


def atomic_to_fs(t):
    return np.asarray(t, dtype=float) * ATOMIC_TIME_FS
