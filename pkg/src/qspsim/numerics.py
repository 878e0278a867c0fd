"""Special functions, Chebyshev-basis arithmetic and dense Hermitian linear algebra.

Matrices are plain ``numpy`` complex arrays and statevectors are 1-D complex
arrays; nothing here keeps state between calls.
"""

import math

import numpy as np
from scipy import special

from .errors import ContractError, DomainError

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10
SQRT_CLAMP = 1e-12

_LAMBERT_TOL = 1e-14


def lambert_w(x):
    """Principal branch of the Lambert W function for ``x >= 0``.

    Halley iteration on ``w e^w - x`` seeded by the logarithmic asymptotic
    expansion. For very large arguments the iteration is carried out on the
    equivalent ``w + ln(w) - ln(x)`` to avoid overflow.
    """
    x = float(x)
    if math.isnan(x) or x < 0:
        raise DomainError(f"lambert_w requires x >= 0, got {x}")
    if x == 0.0:
        return 0.0
    if x < math.e:
        w = math.log1p(x)
    else:
        l1 = math.log(x)
        l2 = math.log(l1)
        w = l1 - l2 + l2 / l1
    if x > 1e250:
        lx = math.log(x)
        for _ in range(100):
            step = (w + math.log(w) - lx) / (1.0 + 1.0 / w)
            w -= step
            if abs(step) <= _LAMBERT_TOL * (1.0 + w):
                break
        return w
    for _ in range(100):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w -= step
        if abs(step) <= _LAMBERT_TOL * (1.0 + abs(w)):
            break
    return w


def bessel_j(n, x):
    """Bessel function of the first kind J_n(x) for integer order ``n >= 0``."""
    if n < 0:
        raise DomainError(f"bessel_j order must be nonnegative, got {n}")
    return special.jv(n, x)


def bessel_i(n, x):
    """Modified Bessel function of the first kind I_n(x), ``x >= 0``."""
    if n < 0:
        raise DomainError(f"bessel_i order must be nonnegative, got {n}")
    if np.any(np.asarray(x) < 0):
        raise DomainError("bessel_i requires x >= 0")
    return special.iv(n, x)


def bessel_i_scaled(n, x):
    """``exp(-x) * I_n(x)``; finite for arguments where I_n itself overflows."""
    if np.any(np.asarray(x) < 0):
        raise DomainError("bessel_i_scaled requires x >= 0")
    return special.ive(n, x)


def erf(x):
    """Error function, scalar or elementwise on arrays."""
    return special.erf(x)


def chebyshev_eval(coeffs, x):
    """Evaluate ``sum_k coeffs[k] T_k(x)`` by the Clenshaw recurrence.

    Args:
        coeffs: Chebyshev-T coefficients, lowest order first (real or complex).
        x: scalar or array of points in [-1, 1].

    Returns:
        Complex scalar or array with the shape of ``x``.
    """
    c = np.asarray(coeffs, dtype=complex)
    xa = np.asarray(x, dtype=float)
    if np.any(np.abs(xa) > 1.0):
        raise DomainError("chebyshev_eval requires |x| <= 1")
    if c.size == 0:
        return np.zeros_like(xa, dtype=complex)[()]
    b1 = np.zeros_like(xa, dtype=complex)
    b2 = np.zeros_like(xa, dtype=complex)
    for ck in c[:0:-1]:
        b1, b2 = 2.0 * xa * b1 - b2 + ck, b1
    return (xa * b1 - b2 + c[0])[()]


def chebyshev_multiply(a, b):
    """Chebyshev coefficients of the product of two Chebyshev series.

    Uses ``T_m T_n = (T_{m+n} + T_{|m-n|}) / 2``; the result has degree
    ``deg(a) + deg(b)``.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.size == 0 or b.size == 0:
        return np.zeros(0, dtype=complex)
    out = np.zeros(a.size + b.size - 1, dtype=complex)
    m = np.arange(a.size)[:, None]
    n = np.arange(b.size)[None, :]
    half = 0.5 * np.outer(a, b)
    np.add.at(out, (m + n).ravel(), half.ravel())
    np.add.at(out, np.abs(m - n).ravel(), half.ravel())
    return out


def chebyshev_antiderivative(coeffs):
    """Antiderivative in the Chebyshev basis, normalized to vanish at x = 0.

    Uses ``int T_0 = T_1``, ``int T_1 = T_2 / 4`` (plus a constant) and
    ``int T_n = (T_{n+1}/(n+1) - T_{n-1}/(n-1)) / 2`` for ``n >= 2``.
    """
    c = np.asarray(coeffs, dtype=complex)
    out = np.zeros(c.size + 1, dtype=complex)
    for n, cn in enumerate(c):
        if cn == 0:
            continue
        if n == 0:
            out[1] += cn
        elif n == 1:
            out[2] += cn / 4.0
        else:
            out[n + 1] += cn / (2.0 * (n + 1))
            out[n - 1] -= cn / (2.0 * (n - 1))
    # T_k(0) = cos(k pi / 2): 0 for odd k, (-1)^(k/2) for even k
    k = np.arange(out.size)
    t_at_zero = np.where(k % 2 == 0, (-1.0) ** (k // 2), 0.0)
    out[0] -= np.dot(out, t_at_zero)
    return out


def is_hermitian(m, tol=HERMITIAN_TOL):
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and np.max(np.abs(m - m.conj().T), initial=0.0) <= tol


def is_unitary(m, tol=UNITARY_TOL):
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0])), initial=0.0) <= tol


def _require_hermitian(m):
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ContractError(f"expected a square matrix, got shape {m.shape}")
    if not is_hermitian(m):
        dev = np.max(np.abs(m - m.conj().T))
        raise ContractError(f"matrix is not hermitian (max |M - M^dag| = {dev:.3e})")
    return m


def hermitian_eig(m):
    """Eigendecomposition of a Hermitian matrix.

    Returns:
        ``(values, vectors)`` with ascending real eigenvalues and a unitary
        matrix whose columns are the eigenvectors.
    """
    m = _require_hermitian(m)
    values, vectors = np.linalg.eigh(0.5 * (m + m.conj().T))
    return values, vectors


def matrix_exp_hermitian(h, t):
    """``exp(-i h t)`` computed from the eigendecomposition of ``h``."""
    h = _require_hermitian(h)
    if t == 0:
        return np.eye(h.shape[0], dtype=complex)
    values, vectors = hermitian_eig(h)
    return (vectors * np.exp(-1j * values * t)) @ vectors.conj().T


def hermitian_sqrt_complement(h, alpha):
    """``sqrt(I - h^2 / alpha^2)`` for Hermitian ``h`` with ``alpha >= ||h||``.

    Eigenvalues of ``I - h^2/alpha^2`` in ``[-1e-12, 0)`` are treated as
    round-off and clamped to zero; anything more negative means ``alpha`` is
    too small.
    """
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    values, vectors = hermitian_eig(h)
    inner = 1.0 - (values / alpha) ** 2
    if np.any(inner < -SQRT_CLAMP):
        norm = np.max(np.abs(values))
        raise DomainError(f"alpha={alpha} is smaller than the spectral norm {norm:.12g}")
    root = np.sqrt(np.clip(inner, 0.0, None))
    return (vectors * root) @ vectors.conj().T


def spectral_norm(m):
    return float(np.linalg.norm(np.asarray(m), 2))


def kron_all(*mats):
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def basis_state(index, num_qubits):
    """Computational basis state, qubit 0 being the most significant bit."""
    v = np.zeros(2**num_qubits, dtype=complex)
    v[index] = 1.0
    return v
