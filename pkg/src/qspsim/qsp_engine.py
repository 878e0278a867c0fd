"""QSP sequences, phase synthesis and their matrix lifts (QET / QSVT).

Phases are stored in the Wx convention::

    U(x) = e^{i phi_0 Z} prod_k W(x) e^{i phi_k Z},  W(x) = [[x, i s], [i s, x]],  s = sqrt(1 - x^2)

The matrix sequences use reflection-type blocks ``[[A, S], [S, -A]]``. Since
``R(x) = -i e^{i pi/4 Z} W(x) e^{i pi/4 Z}``, Wx phases are converted to
reflection phases and the product is multiplied by ``i^d``; the encoded block
then equals the scalar ``block_value`` exactly.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from . import numerics as nm
from .encoding import BlockEncoding, hadamard_on_ancilla
from .errors import ContractError, DomainError, ParseError
from .polyapprox import ChebyshevPolynomial

CONVENTIONS = ("Wx", "reflection")
BASES = ("computational", "hadamard")
VALIDATION_POINTS = 201
MAX_RESTARTS = 8


def canonical_angle(phi):
    """Map angles into (-pi, pi]."""
    return np.pi - np.mod(np.pi - np.asarray(phi, dtype=float), 2 * np.pi)


@dataclass
class PhaseVector:
    phases: np.ndarray
    convention: str = "Wx"

    def __post_init__(self):
        p = np.atleast_1d(np.asarray(self.phases, dtype=float))
        if p.ndim != 1 or p.size == 0:
            raise ContractError("phase vector must be a non-empty 1-D array")
        if not np.all(np.isfinite(p)):
            raise ContractError("phases must be finite")
        if self.convention not in CONVENTIONS:
            raise ContractError(f"unknown phase convention {self.convention!r}")
        self.phases = canonical_angle(p)

    @property
    def degree(self):
        return self.phases.size - 1

    def __len__(self):
        return self.phases.size

    def to_reflection(self):
        """Equivalent reflection-convention phases (global factor i^d not included)."""
        if self.convention == "reflection":
            return self
        p = self.phases.copy()
        d = self.degree
        if d > 0:
            p[0] -= np.pi / 4
            p[-1] -= np.pi / 4
            p[1:-1] -= np.pi / 2
        return PhaseVector(p, "reflection")

    def to_wx(self):
        if self.convention == "Wx":
            return self
        p = self.phases.copy()
        if self.degree > 0:
            p[0] += np.pi / 4
            p[-1] += np.pi / 4
            p[1:-1] += np.pi / 2
        return PhaseVector(p, "Wx")

    def to_text(self):
        lines = [f"qsp-phases d={self.degree} convention={self.convention}"]
        lines += [f"{v:.17g}" for v in self.phases]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        rows = [(i + 1, ln.strip()) for i, ln in enumerate(text.splitlines())]
        rows = [(i, ln) for i, ln in rows if ln and not ln.startswith("#")]
        if not rows:
            raise ParseError("empty phase file")
        lineno, header = rows[0]
        parts = header.split()
        try:
            if parts[0] != "qsp-phases":
                raise ValueError
            fields = dict(p.split("=", 1) for p in parts[1:])
            d = int(fields["d"])
            conv = fields.get("convention", "Wx")
        except (ValueError, KeyError, IndexError):
            raise ParseError("expected 'qsp-phases d=<degree> convention=<tag>'", lineno) from None
        values = []
        for lineno, ln in rows[1:]:
            try:
                values.append(float(ln))
            except ValueError:
                raise ParseError(f"not a number: {ln!r}", lineno) from None
        if len(values) != d + 1:
            raise ParseError(f"header says d={d} but {len(values)} phases follow")
        try:
            return cls(np.array(values), conv)
        except ContractError as exc:
            raise ParseError(str(exc)) from None


@dataclass
class SynthesisResult:
    phases: PhaseVector
    achieved_error: float
    iterations: int
    converged: bool


def _as_phases(phases):
    if isinstance(phases, PhaseVector):
        return phases.to_wx().phases
    return np.atleast_1d(np.asarray(phases, dtype=float))


def _check_x(x):
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0):
        raise DomainError("signal value must satisfy |x| <= 1")
    return x


def signal_operator(x):
    """Signal rotation W(x) = [[x, i sqrt(1-x^2)], [i sqrt(1-x^2), x]]."""
    x = float(_check_x(x))
    s = math.sqrt(max(0.0, 1.0 - x * x))
    return np.array([[x, 1j * s], [1j * s, x]], dtype=complex)


def qsp_unitary(phases, x):
    """The 2x2 QSP product for a scalar signal value ``x``."""
    p = _as_phases(phases)
    w = signal_operator(x)
    u = np.diag([np.exp(1j * p[0]), np.exp(-1j * p[0])])
    for phi in p[1:]:
        u = u @ w @ np.diag([np.exp(1j * phi), np.exp(-1j * phi)])
    return u


def _basis_vector(basis):
    if basis == "computational":
        return np.array([1.0, 0.0], dtype=complex)
    if basis == "hadamard":
        return np.array([1.0, 1.0], dtype=complex) / math.sqrt(2)
    raise ContractError(f"unknown basis {basis!r}")


def _signal_stack(x):
    s = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    w = np.empty((x.size, 2, 2), dtype=complex)
    w[:, 0, 0] = x
    w[:, 1, 1] = x
    w[:, 0, 1] = 1j * s
    w[:, 1, 0] = 1j * s
    return w


# explicit 2x2 products keep results bit-identical across runs (no BLAS dispatch)
def _row_times(r, w):
    return np.stack([r[:, 0] * w[:, 0, 0] + r[:, 1] * w[:, 1, 0], r[:, 0] * w[:, 0, 1] + r[:, 1] * w[:, 1, 1]], axis=1)


def _times_col(w, c):
    return np.stack([w[:, 0, 0] * c[:, 0] + w[:, 0, 1] * c[:, 1], w[:, 1, 0] * c[:, 0] + w[:, 1, 1] * c[:, 1]], axis=1)


def _value_and_jacobian(p, x, basis, want_jac=True):
    """Block values ``v^T U v`` over nodes and their derivatives in each phase."""
    v = _basis_vector(basis)
    w = _signal_stack(x)
    d = p.size - 1
    e = np.exp(1j * p)
    diag = np.stack([e, e.conj()], axis=1)  # (d+1, 2)
    # left row vectors l_k = v^T S_0 W S_1 ... W (just before S_k)
    left = np.empty((d + 1, x.size, 2), dtype=complex)
    cur = np.broadcast_to(v, (x.size, 2)).copy()
    for k in range(d + 1):
        if k:
            cur = _row_times(cur, w)
        left[k] = cur
        cur = cur * diag[k]
    value = cur[:, 0] * v[0] + cur[:, 1] * v[1]
    if not want_jac:
        return value, None
    jac = np.empty((x.size, d + 1), dtype=complex)
    right = np.broadcast_to(v, (x.size, 2)).copy()
    dz = np.array([1j, -1j])
    for k in range(d, -1, -1):
        prod = left[k] * (diag[k] * dz) * right
        jac[:, k] = prod[:, 0] + prod[:, 1]
        right = right * diag[k]
        if k:
            right = _times_col(w, right)
    return value, jac


def block_value(phases, x, basis="computational"):
    """``<0|U|0>`` (computational) or ``<+|U|+>`` (hadamard); vectorized in ``x``."""
    p = _as_phases(phases)
    xa = _check_x(x)
    val, _ = _value_and_jacobian(p, np.atleast_1d(xa).ravel(), basis, want_jac=False)
    return val.reshape(xa.shape)[()]


def chebyshev_nodes(n, lo=-1.0, hi=1.0):
    k = np.arange(n)
    return 0.5 * (lo + hi) + 0.5 * (hi - lo) * np.cos((2 * k + 1) * np.pi / (2 * n))


def _target_function(target):
    if isinstance(target, ChebyshevPolynomial):
        return target
    if callable(target):
        return target
    raise ContractError("target must be a ChebyshevPolynomial or a callable")


def _symmetric_expand(half, d):
    """Palindromic phase vector of length d+1 from its first d//2 + 1 entries."""
    full = np.empty(d + 1)
    full[: half.size] = half
    full[d + 1 - half.size :] = half[::-1]
    return full


def _antisymmetric_expand(half, d):
    """Phase vector with phi_{d-k} = -phi_k (middle entry 0) from its first (d+1)//2 entries."""
    full = np.zeros(d + 1)
    m = half.size
    if m:
        full[:m] = half
        full[d + 1 - m :] = -half[::-1]
    return full


def _hadamard_offset(d):
    off = np.zeros(d + 1)
    if d > 0:
        off[0] = -np.pi / 4
        off[-1] = np.pi / 4
    return off


def synthesize_phases(
    target,
    basis="computational",
    tolerance=1e-8,
    degree=None,
    intervals=None,
    num_nodes=None,
    init=None,
    max_iter=None,
    seed=0,
    chunk=100,
):
    """Find Wx phases whose block value approximates ``target``.

    Trust-region least squares with an analytic Jacobian on Chebyshev nodes,
    with deterministic perturbed restarts whenever progress stalls.

    Real targets use reduced parametrizations that keep the block value real
    by construction. In the Hadamard basis the phases are symmetric ``psi``
    (initial guess ``(pi/4, 0, ..., 0, pi/4)``) fitted against
    ``Re <0|U_psi|0>``; shifting the end phases by ``-pi/4`` and ``+pi/4``
    gives a sequence whose ``<+|U|+>`` equals that real part exactly. In the
    computational basis antisymmetric phases make ``<0|U|0>`` real. Complex
    targets are fitted over the full phase vector.

    Args:
        target: ChebyshevPolynomial or vectorized callable.
        basis: 'computational' or 'hadamard' (real targets only).
        tolerance: sup-norm error accepted on nodes plus validation points.
        degree: sequence length minus one; defaults to the polynomial degree.
        intervals: sub-intervals of [-1, 1] on which to fit; defaults to [-1, 1].
        num_nodes: Chebyshev nodes per interval; defaults to ``degree + 1``.
        init: optional starting phases (warm start), Wx convention.
        max_iter: cap on function evaluations; defaults to ``10 d^2`` (at least 200).
        seed: seed for restart perturbations.
        chunk: evaluations between progress checks.

    Returns:
        SynthesisResult with the best phases found.
    """
    f = _target_function(target)
    if degree is None:
        if not isinstance(target, ChebyshevPolynomial):
            raise ContractError("degree is required for callable targets")
        degree = target.degree
    d = int(degree)
    if basis not in BASES:
        raise ContractError(f"unknown basis {basis!r}")
    intervals = intervals or [(-1.0, 1.0)]
    n_nodes = num_nodes or d + 1
    nodes = np.concatenate([chebyshev_nodes(n_nodes, lo, hi) for lo, hi in intervals])
    check = np.concatenate([nodes] + [np.linspace(lo, hi, VALIDATION_POINTS) for lo, hi in intervals])
    t_nodes = np.asarray(f(nodes), dtype=complex)
    t_check = np.asarray(f(check), dtype=complex)
    if max_iter is None:
        max_iter = max(200, 10 * d * d)

    if basis == "hadamard":
        if np.max(np.abs(t_check.imag), initial=0.0) > 0:
            raise ContractError("hadamard-basis synthesis needs a real target")
        m = d // 2 + 1
        offset = _hadamard_offset(d)
        t_real = t_nodes.real

        def to_full(q):
            return _symmetric_expand(q, d)

        def residual(q):
            return _value_and_jacobian(to_full(q), nodes, "computational", want_jac=False)[0].real - t_real

        def jacobian(q):
            j = _value_and_jacobian(to_full(q), nodes, "computational")[1].real
            red = j[:, :m].copy()
            for k in range(m):
                if d - k != k:
                    red[:, k] += j[:, d - k]
            return red

        def phases_of(q):
            return to_full(q) + offset

        starts = [np.zeros(m)]
        starts[0][0] = np.pi / 4
        if init is not None:
            w = _as_phases(init) - offset
            starts.insert(0, 0.5 * (w + w[::-1])[:m])
    elif np.max(np.abs(t_check.imag), initial=0.0) == 0:
        # antisymmetric phases force P(1) = 1; an iZ conjugation flips the sign
        m = (d + 1) // 2
        sgn = -1.0 if np.real(f(np.array([max(hi for _, hi in intervals)])))[0] < 0 else 1.0
        flip = np.zeros(d + 1)
        if sgn < 0:
            flip[0] += np.pi / 2
            flip[-1] += np.pi / 2
        t_real = sgn * t_nodes.real

        def to_full(q):
            return _antisymmetric_expand(q, d)

        def residual(q):
            return _value_and_jacobian(to_full(q), nodes, basis, want_jac=False)[0].real - t_real

        def jacobian(q):
            j = _value_and_jacobian(to_full(q), nodes, basis)[1].real
            return j[:, :m] - j[:, d : d - m : -1]

        def phases_of(q):
            return to_full(q) + flip

        tilt = np.zeros(m)
        if m:
            tilt[0] = np.pi / 4
        starts = [np.zeros(m), tilt]
        if init is not None:
            w = _as_phases(init) - flip
            starts.insert(0, 0.5 * (w - w[::-1])[:m])
    else:
        def residual(q):
            r = _value_and_jacobian(q, nodes, basis, want_jac=False)[0] - t_nodes
            return np.concatenate([r.real, r.imag])

        def jacobian(q):
            j = _value_and_jacobian(q, nodes, basis)[1]
            return np.vstack([j.real, j.imag])

        def phases_of(q):
            return q

        symmetric = np.zeros(d + 1)
        if d > 0:
            symmetric[0] = symmetric[-1] = np.pi / 4
        starts = [symmetric, np.zeros(d + 1)]
        if init is not None:
            starts.insert(0, _as_phases(init).copy())

    def error(q):
        vals = _value_and_jacobian(phases_of(q), check, basis, want_jac=False)[0]
        return float(np.max(np.abs(vals - t_check)))

    best_q = min(starts, key=error)
    best_err = error(best_q)
    rng = np.random.default_rng(seed)
    used = 0
    restarts = 0
    q = best_q.copy()
    stalled_err = best_err
    while best_err > tolerance and used < max_iter:
        budget = min(chunk, max_iter - used)
        sol = least_squares(residual, q, jac=jacobian, method="trf", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=budget)
        used += max(int(sol.nfev), 1)
        q = sol.x
        err = error(q)
        if err < best_err:
            best_q, best_err = q.copy(), err
        if best_err <= tolerance:
            break
        stalled = sol.status != 0 or err > 0.9 * stalled_err
        stalled_err = min(stalled_err, err)
        if stalled:
            if restarts >= MAX_RESTARTS:
                break
            restarts += 1
            q = best_q + rng.normal(scale=0.1, size=best_q.size)
            stalled_err = error(q)
    return SynthesisResult(PhaseVector(phases_of(best_q)), best_err, used, best_err <= tolerance)


def projector_phase(diag_projector, phi):
    """Diagonal of ``e^{i phi (2 Pi - I)}`` for a 0/1 projector diagonal."""
    proj = np.asarray(diag_projector, dtype=float)
    if not np.any(proj):
        raise ContractError("projector is empty")
    return np.where(proj > 0.5, np.exp(1j * phi), np.exp(-1j * phi))


def projector_phase_matrix(projector_indices, phi, total_qubits):
    """Dense ``e^{i phi (2 Pi - I)}`` for Pi spanned by the given basis states."""
    diag = np.zeros(2**total_qubits)
    diag[list(projector_indices)] = 1.0
    return np.diag(projector_phase(diag, phi))


def _alternating_sequence(enc, phases):
    refl = phases.to_reflection().phases
    d = phases.degree
    proj = enc.signal_projector_diag()
    u = enc.unitary
    ud = u.conj().T
    out = np.diag(projector_phase(proj, refl[0])).astype(complex)
    for k in range(1, d + 1):
        uk = u if (d - k) % 2 == 0 else ud
        out = (out @ uk) * projector_phase(proj, refl[k])[None, :]
    return (1j**d) * out


def _is_dilation(enc):
    return enc.ancilla_qubits == 1 and nm.is_hermitian(enc.unitary, 1e-10)


def qet_sequence(enc, phases, basis="computational"):
    """Apply the polynomial defined by ``phases`` to the Hermitian operator encoded by ``enc``.

    For a Hermitian signal unitary this is the plain QET product; otherwise
    the alternating U / U^dagger ordering is used, which yields the same P(A)
    for a Hermitian block A. With ``basis='hadamard'`` the result is read in
    the ``<+| . |+>`` ancilla component, which requires a one-ancilla Hermitian
    dilation; the returned encoding is Hadamard-conjugated so that its
    signal_state block holds that component.
    """
    if not isinstance(enc, BlockEncoding):
        raise ContractError("qet_sequence expects a BlockEncoding")
    phases = phases if isinstance(phases, PhaseVector) else PhaseVector(phases)
    if basis == "hadamard":
        if not _is_dilation(enc):
            raise ContractError("hadamard-basis reading requires a one-ancilla hermitian dilation")
        if enc.signal_state != 0:
            raise ContractError("hadamard-basis reading requires signal_state 0")
    elif basis != "computational":
        raise ContractError(f"unknown basis {basis!r}")
    out = BlockEncoding(_alternating_sequence(enc, phases), enc.system_qubits, enc.ancilla_qubits, enc.signal_state, enc.scale_alpha, enc.beta)
    if basis == "hadamard":
        out = hadamard_on_ancilla(out)
    return out


def qsvt_sequence(enc, phases, parity=None):
    """Singular value transformation of the block encoded by ``enc``.

    Odd-length phase vectors (even degree) give ``sum P(s)|v><v|``; even-length
    (odd degree) give ``sum P(s)|w><v|``, which for A = r U0 preserves the
    eigenphases of U0 while mapping the magnitude r to P(r).
    """
    phases = phases if isinstance(phases, PhaseVector) else PhaseVector(phases)
    if parity is not None:
        expected = "even" if phases.degree % 2 == 0 else "odd"
        if parity != expected:
            raise ContractError(f"{parity} polynomial but phase vector has degree {phases.degree}")
    return BlockEncoding(_alternating_sequence(enc, phases), enc.system_qubits, enc.ancilla_qubits, enc.signal_state, enc.scale_alpha, enc.beta)
