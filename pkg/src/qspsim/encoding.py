"""Hamiltonians as Pauli sums and their block encodings.

Qubit 0 is the most significant bit. Ancillas sit above the system register
and each new ancilla is placed outermost, so the projector onto the signal
state is a principal block of the full unitary.
"""

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from . import numerics as nm
from .errors import ContractError, DomainError, ParseError

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)

H2_DATA = "h2_sto3g_r0.5.pauli"


@dataclass
class PauliSum:
    """Weighted sum of Pauli strings on ``qubit_count`` qubits."""

    terms: list
    qubit_count: int

    def __post_init__(self):
        clean = []
        for coeff, word in self.terms:
            word = word.upper()
            if len(word) != self.qubit_count or any(ch not in PAULI for ch in word):
                raise ParseError(f"invalid Pauli string {word!r} for {self.qubit_count} qubits")
            coeff = float(coeff)
            if not math.isfinite(coeff):
                raise ParseError(f"non-finite coefficient for {word}")
            if coeff != 0.0:
                clean.append((coeff, word))
        self.terms = clean

    def __len__(self):
        return len(self.terms)

    def coefficient(self, word):
        return sum(c for c, w in self.terms if w == word)

    def to_matrix(self):
        return pauli_sum_to_matrix(self)


def pauli_string_matrix(word):
    return nm.kron_all(*(PAULI[ch] for ch in word))


def pauli_sum_to_matrix(p):
    """Dense Hermitian matrix of a PauliSum."""
    dim = 2**p.qubit_count
    m = np.zeros((dim, dim), dtype=complex)
    for coeff, word in p.terms:
        m += coeff * pauli_string_matrix(word)
    return m


def heisenberg_hamiltonian(n, g, h):
    """Open Heisenberg chain with a z field.

    Args:
        n: number of spins (>= 2).
        g: one ``(gx, gy, gz)`` triple for every bond, or a list of n-1 triples.
        h: per-site field values ``h_j`` at the time of interest.

    Returns:
        PauliSum of ``sum_j h_j Z_j + sum_j (gx X_j X_{j+1} + gy Y_j Y_{j+1} + gz Z_j Z_{j+1})``.
    """
    if n < 2:
        raise DomainError(f"Heisenberg chain needs at least 2 sites, got {n}")
    g = np.asarray(g, dtype=float)
    bonds = np.broadcast_to(g, (n - 1, 3)) if g.ndim == 1 else g
    if bonds.shape != (n - 1, 3):
        raise ContractError(f"expected {n - 1} coupling triples, got shape {g.shape}")
    h = np.broadcast_to(np.asarray(h, dtype=float), (n,))
    terms = []
    for j in range(n):
        terms.append((h[j], "I" * j + "Z" + "I" * (n - j - 1)))
    for j in range(n - 1):
        for axis, gj in zip("XYZ", bonds[j]):
            terms.append((gj, "I" * j + axis * 2 + "I" * (n - j - 2)))
    return PauliSum(terms, n)


def parse_pauli_sum(text):
    """Parse Pauli-sum text: ``<sign> <decimal> <string>`` or ``<signed-decimal> <string>``."""
    terms = []
    width = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if len(parts) == 3 and parts[0] in ("+", "-"):
                coeff = float(parts[1])
                if parts[1][0] in "+-":
                    raise ValueError
                coeff = -coeff if parts[0] == "-" else coeff
            elif len(parts) == 2:
                coeff = float(parts[0])
            else:
                raise ValueError
        except ValueError:
            raise ParseError(f"cannot parse {raw.strip()!r}", lineno) from None
        word = parts[-1].upper()
        if any(ch not in PAULI for ch in word):
            raise ParseError(f"invalid Pauli string {parts[-1]!r}", lineno)
        if width is None:
            width = len(word)
        elif len(word) != width:
            raise ParseError(f"Pauli string length {len(word)} differs from {width}", lineno)
        terms.append((coeff, word))
    if not terms:
        raise ParseError("empty Pauli sum")
    return PauliSum(terms, width)


def load_pauli_sum(path):
    return parse_pauli_sum(Path(path).read_text(encoding="utf-8"))


def load_h2():
    """The shipped H2 (STO-3G, 0.5 Angstrom) Hamiltonian."""
    return parse_pauli_sum(resources.files("qspsim.data").joinpath(H2_DATA).read_text(encoding="utf-8"))


@dataclass
class BlockEncoding:
    """Unitary whose ``<s| . |s>`` ancilla block encodes an operator on the system.

    Attributes:
        unitary: full ``2^(a+n)`` square unitary, ancillas most significant.
        system_qubits: n.
        ancilla_qubits: a.
        signal_state: ancilla basis index s of the encoded block.
        scale_alpha: alpha such that the encoded operator is H/alpha (or derived from it).
        beta: pre-transformation or rescaling parameter, if any.
    """

    unitary: np.ndarray
    system_qubits: int
    ancilla_qubits: int
    signal_state: int = 0
    scale_alpha: float = 1.0
    beta: float = None
    check: bool = True

    def __post_init__(self):
        self.unitary = np.asarray(self.unitary, dtype=complex)
        dim = 2 ** (self.system_qubits + self.ancilla_qubits)
        if self.unitary.shape != (dim, dim):
            raise ContractError(f"unitary shape {self.unitary.shape} does not match {dim}x{dim}")
        if not 0 <= self.signal_state < 2**self.ancilla_qubits:
            raise ContractError("signal_state outside the ancilla register")
        if self.check and not nm.is_unitary(self.unitary):
            dev = np.max(np.abs(self.unitary.conj().T @ self.unitary - np.eye(dim)))
            raise ContractError(f"block encoding is not unitary (deviation {dev:.3e})")

    @property
    def dim(self):
        return self.unitary.shape[0]

    @property
    def system_dim(self):
        return 2**self.system_qubits

    def signal_projector_diag(self):
        """0/1 diagonal of ``|s><s| (x) I_system``."""
        d = np.zeros(2**self.ancilla_qubits)
        d[self.signal_state] = 1.0
        return np.repeat(d, self.system_dim)


def extract_block(enc):
    """The ``<s| U |s>`` system block of a BlockEncoding."""
    a, n = 2**enc.ancilla_qubits, enc.system_dim
    return enc.unitary.reshape(a, n, a, n)[enc.signal_state, :, enc.signal_state, :].copy()


def identity_encoding(system_qubits):
    return BlockEncoding(np.eye(2**system_qubits, dtype=complex), system_qubits, 0)


def dilation_encoding(h, alpha):
    """One-ancilla unitary dilation ``[[H/a, S], [S, -H/a]]`` with ``S = sqrt(I - H^2/a^2)``."""
    h = np.asarray(h, dtype=complex)
    if not nm.is_hermitian(h):
        raise ContractError("dilation requires a hermitian matrix")
    s = nm.hermitian_sqrt_complement(h, alpha)
    a = h / alpha
    u = np.block([[a, s], [s, -a]])
    n = int(round(math.log2(h.shape[0])))
    if 2**n != h.shape[0]:
        raise ContractError(f"matrix dimension {h.shape[0]} is not a power of two")
    return BlockEncoding(u, n, 1, 0, float(alpha))


def product_encoding(enc_a, enc_b):
    """Block encoding of A B as ``(I_B (x) V_A)(V_B (x) I_A)``; B's ancillas are outermost."""
    if enc_a.system_qubits != enc_b.system_qubits:
        raise ContractError("product of encodings with different system sizes")
    n = enc_a.system_dim
    da, db = 2**enc_a.ancilla_qubits, 2**enc_b.ancilla_qubits
    vb = enc_b.unitary.reshape(db, n, db, n)
    eye_a = np.eye(da)
    vb_full = np.einsum("psqt,uv->pusqvt", vb, eye_a).reshape(db * da * n, db * da * n)
    va_full = np.kron(np.eye(db), enc_a.unitary)
    return BlockEncoding(
        va_full @ vb_full,
        enc_a.system_qubits,
        enc_a.ancilla_qubits + enc_b.ancilla_qubits,
        enc_b.signal_state * da + enc_a.signal_state,
        enc_a.scale_alpha * enc_b.scale_alpha,
    )


def rx(theta):
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def scale_encoding(enc, beta):
    """Encode beta times the operator of ``enc`` via a new ``Rx(2 arccos beta)`` ancilla."""
    if not 0 < beta <= 1:
        raise DomainError(f"beta must lie in (0, 1], got {beta}")
    return BlockEncoding(
        np.kron(rx(2 * math.acos(beta)), enc.unitary),
        enc.system_qubits,
        enc.ancilla_qubits + 1,
        enc.signal_state,
        enc.scale_alpha,
        beta,
    )


def pretransform_encoding(enc, beta):
    """Encode ``(I + beta A) / 2`` where A is the operator encoded by ``enc``.

    A Hadamard-conjugated control qubit selects between the identity and the
    beta-rescaled encoding, giving two extra ancillas in total.
    """
    if not 0 < beta < 1:
        raise DomainError(f"beta must lie in (0, 1), got {beta}")
    scaled = scale_encoding(enc, beta)
    dim = scaled.dim
    zero = np.zeros((dim, dim), dtype=complex)
    select = np.block([[np.eye(dim), zero], [zero, scaled.unitary]])
    hc = np.kron(HADAMARD, np.eye(dim))
    return BlockEncoding(
        hc @ select @ hc,
        enc.system_qubits,
        scaled.ancilla_qubits + 1,
        scaled.signal_state,
        enc.scale_alpha,
        beta,
    )


def hadamard_on_ancilla(enc, qubit=0):
    """Conjugate one ancilla qubit (0 = outermost) of ``enc`` by a Hadamard gate."""
    ops = [np.eye(2)] * enc.ancilla_qubits
    ops[qubit] = HADAMARD
    h = np.kron(nm.kron_all(*ops), np.eye(enc.system_dim))
    return BlockEncoding(h @ enc.unitary @ h, enc.system_qubits, enc.ancilla_qubits, enc.signal_state, enc.scale_alpha, enc.beta, check=False)
