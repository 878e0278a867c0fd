"""Target polynomials in the Chebyshev basis.

Covers the truncated Jacobi-Anger expansions of cos and sin, the shifted
exponential decay, the erf-based sign approximation and the even extension of
the complex exponential (EECE) used by one-shot simulation.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import numerics as nm
from .errors import CapacityError, ContractError, DomainError, ParseError

DEGREE_CAP = 10000
GRID_POINTS = 1001


def infer_parity(coeffs, tol=0.0):
    """Return 'even', 'odd' or 'mixed' from the coefficient sparsity pattern."""
    c = np.asarray(coeffs)
    odd_zero = np.all(np.abs(c[1::2]) <= tol)
    even_zero = np.all(np.abs(c[0::2]) <= tol)
    if odd_zero:
        return "even"
    if even_zero:
        return "odd"
    return "mixed"


@dataclass
class ChebyshevPolynomial:
    """Complex polynomial stored as Chebyshev-T coefficients, lowest order first.

    Attributes:
        coeffs: complex coefficient vector.
        parity: 'even', 'odd' or 'mixed'; must agree with the zero pattern.
        domain: intervals on which the polynomial is meant to approximate its target.
    """

    coeffs: np.ndarray
    parity: str = None
    domain: list = field(default_factory=lambda: [(-1.0, 1.0)])

    def __post_init__(self):
        self.coeffs = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))
        if self.coeffs.size == 0:
            self.coeffs = np.zeros(1, dtype=complex)
        if self.parity is None:
            self.parity = infer_parity(self.coeffs)
        if self.parity not in ("even", "odd", "mixed"):
            raise ContractError(f"unknown parity tag {self.parity!r}")
        if self.parity == "even" and np.any(self.coeffs[1::2] != 0):
            raise ContractError("parity=even but odd-index coefficients are nonzero")
        if self.parity == "odd" and np.any(self.coeffs[0::2] != 0):
            raise ContractError("parity=odd but even-index coefficients are nonzero")

    @property
    def degree(self):
        return self.coeffs.size - 1

    @property
    def is_real(self):
        return bool(np.all(self.coeffs.imag == 0))

    def __call__(self, x):
        return nm.chebyshev_eval(self.coeffs, x)

    def scaled(self, factor):
        return ChebyshevPolynomial(self.coeffs * factor, self.parity, list(self.domain))

    def max_abs(self, grid_points=GRID_POINTS):
        """Largest |P(x)| on a uniform grid over [-1, 1]."""
        return float(np.max(np.abs(self(np.linspace(-1.0, 1.0, grid_points)))))

    def to_text(self):
        lines = [f"chebyshev parity={self.parity} degree={self.degree}"]
        for k, c in enumerate(self.coeffs):
            if c != 0:
                lines.append(f"{k} {c.real:.17g} {c.imag:.17g}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        rows = [ln.strip() for ln in text.splitlines()]
        numbered = [(i + 1, ln) for i, ln in enumerate(rows) if ln and not ln.startswith("#")]
        if not numbered:
            raise ParseError("empty polynomial file")
        lineno, header = numbered[0]
        parts = header.split()
        if len(parts) != 3 or parts[0] != "chebyshev":
            raise ParseError("expected 'chebyshev parity=<p> degree=<d>'", lineno)
        try:
            fields = dict(p.split("=", 1) for p in parts[1:])
            parity = fields["parity"]
            degree = int(fields["degree"])
        except (ValueError, KeyError):
            raise ParseError("malformed header", lineno) from None
        if degree < 0:
            raise ParseError("negative degree", lineno)
        coeffs = np.zeros(degree + 1, dtype=complex)
        for lineno, ln in numbered[1:]:
            p = ln.split()
            try:
                k, re_, im_ = int(p[0]), float(p[1]), float(p[2])
            except (ValueError, IndexError):
                raise ParseError("expected 'k re im'", lineno) from None
            if len(p) != 3 or not 0 <= k <= degree:
                raise ParseError(f"bad coefficient entry {ln!r}", lineno)
            coeffs[k] = complex(re_, im_)
        try:
            return cls(coeffs, parity)
        except ContractError as exc:
            raise ParseError(str(exc)) from None


@dataclass
class ApproximationReport:
    target_name: str
    epsilon_requested: float
    epsilon_measured: float
    degree: int

    @property
    def ok(self):
        return self.epsilon_measured <= self.epsilon_requested


def _check_cap(degree, cap=DEGREE_CAP):
    if degree > cap:
        raise CapacityError(f"polynomial degree {degree} exceeds cap {cap}")


def r_function(tau, eps):
    """Solution r > |tau| of ``(|tau|/r)^r = eps``, i.e. ``|tau| e^{W(ln(1/eps)/|tau|)}``."""
    if not 0 < eps < 1 / math.e:
        raise DomainError(f"epsilon must lie in (0, 1/e), got {eps}")
    if tau == 0:
        raise DomainError("r_function requires tau != 0")
    at = abs(tau)
    return at * math.exp(nm.lambert_w(math.log(1.0 / eps) / at))


def truncation_index(tau, eps):
    """Jacobi-Anger truncation index ``K = floor(r(e|tau|/2, 5 eps/4) / 2)``."""
    if not 0 < 1.25 * eps < 1 / math.e:
        raise DomainError(f"5*epsilon/4 must lie in (0, 1/e), got epsilon={eps}")
    if tau == 0:
        return 0
    return int(math.floor(0.5 * r_function(math.e * abs(tau) / 2, 1.25 * eps)))


def _cos_coeffs(tau, K):
    c = np.zeros(2 * K + 1, dtype=complex)
    c[0] = nm.bessel_j(0, tau)
    for k in range(1, K + 1):
        c[2 * k] = 2 * (-1) ** k * nm.bessel_j(2 * k, tau)
    return c


def _sin_coeffs(tau, K):
    c = np.zeros(2 * K + 2, dtype=complex)
    for k in range(K + 1):
        c[2 * k + 1] = 2 * (-1) ** k * nm.bessel_j(2 * k + 1, tau)
    return c


def jacobi_anger_cos(tau, eps, rescale=True):
    """Even polynomial within 2*eps of cos(tau x) on [-1, 1], bounded by 1.

    With ``rescale=False`` the raw truncated expansion (within eps, possibly
    exceeding 1 by up to eps) is returned instead.
    """
    K = truncation_index(tau, eps)
    _check_cap(2 * K)
    return ChebyshevPolynomial(_cos_coeffs(tau, K) / ((1 + eps) if rescale else 1.0), "even")


def jacobi_anger_sin(tau, eps, rescale=True):
    """Odd polynomial within 2*eps of sin(tau x) on [-1, 1], bounded by 1 (see jacobi_anger_cos)."""
    K = truncation_index(tau, eps)
    _check_cap(2 * K + 1)
    return ChebyshevPolynomial(_sin_coeffs(tau, K) / ((1 + eps) if rescale else 1.0), "odd")


def _normalize(poly, grid_points=4001):
    m = poly.max_abs(grid_points)
    return poly.scaled(1.0 / m) if m > 1.0 else poly


def truncated_cos(tau, degree):
    """Jacobi-Anger cos series cut at a fixed even degree, rescaled so max|P| <= 1."""
    if degree < 0 or degree % 2:
        raise ContractError(f"cos degree must be even and nonnegative, got {degree}")
    return _normalize(ChebyshevPolynomial(_cos_coeffs(tau, degree // 2), "even"))


def truncated_sin(tau, degree):
    """Jacobi-Anger sin series cut at a fixed odd degree, rescaled so max|P| <= 1."""
    if degree < 1 or degree % 2 == 0:
        raise ContractError(f"sin degree must be odd and positive, got {degree}")
    return _normalize(ChebyshevPolynomial(_sin_coeffs(tau, (degree - 1) // 2), "odd"))


def exp_decay_degree(a, eps):
    """Sufficient truncation degree for the e^{-a(x+1)} expansion."""
    return int(math.ceil(math.sqrt(2 * max(a * math.e**2, math.log(2 / eps)) * math.log(4 / eps))))


def exp_decay_coeffs(a, degree):
    """Chebyshev coefficients of e^{-a(x+1)} truncated at ``degree``.

    ``T_j(-x) = (-1)^j T_j(x)`` folds the reflected argument into the signs.
    """
    j = np.arange(degree + 1)
    c = 2.0 * nm.bessel_i_scaled(j, a) * (-1.0) ** j
    c[0] *= 0.5
    return c.astype(complex)


def exp_decay_poly(a, eps):
    """Polynomial approximation of e^{-a(x+1)} on [-1, 1] with error at most eps."""
    if not a > 0:
        raise DomainError(f"a must be positive, got {a}")
    if not 0 < eps < 1:
        raise DomainError(f"epsilon must lie in (0, 1), got {eps}")
    d = exp_decay_degree(a, eps)
    _check_cap(d)
    return ChebyshevPolynomial(exp_decay_coeffs(a, d), "mixed" if d > 0 else "even")


def sign_k(eps, delta):
    """Steepness of erf(kx) making it an eps/2 approximation to sign outside the gap."""
    return math.sqrt(2.0) / delta * math.sqrt(nm.lambert_w(8.0 / (math.pi * eps**2)))


def gamma_degree(eps, delta):
    """Odd degree sufficient for the sign approximation with error eps and gap delta."""
    if not 0 < eps < 1:
        raise DomainError(f"epsilon must lie in (0, 1), got {eps}")
    if not 0 < delta < 1:
        raise DomainError(f"delta must lie in (0, 1), got {delta}")
    w1 = nm.lambert_w(8.0 / (math.pi * eps**2))
    w2 = nm.lambert_w(512.0 / (math.e**2 * math.pi * eps**2))
    first = math.e / delta * math.sqrt(w1 * w2)
    second = math.sqrt(2.0) * nm.lambert_w(8.0 * math.sqrt(2.0) / (math.sqrt(math.pi) * delta * eps) * math.sqrt(w1))
    return 2 * int(math.ceil(max(first, second))) + 1


def sign_poly(eps, delta, cap=DEGREE_CAP):
    """Odd polynomial of degree gamma(eps, delta) approximating sign(x) for |x| >= delta/2.

    e^{-k^2 u^2} equals e^{-a(y+1)} with ``a = k^2/2`` and ``y = 2u^2 - 1``; since
    ``T_j(2u^2 - 1) = T_{2j}(u)`` the y-series maps directly onto even u-orders.
    Integrating from 0 and scaling by 2k/sqrt(pi) yields the erf(kx) approximant.
    """
    d = gamma_degree(eps, delta)
    _check_cap(d, cap)
    k = sign_k(eps, delta)
    m = (d - 1) // 2
    y_coeffs = exp_decay_coeffs(k * k / 2.0, m)
    u_coeffs = np.zeros(2 * m + 1, dtype=complex)
    u_coeffs[0::2] = y_coeffs
    p = nm.chebyshev_antiderivative(u_coeffs) * (2.0 * k / math.sqrt(math.pi))
    p = p.real.astype(complex)
    p[0::2] = 0.0
    poly = ChebyshevPolynomial(p, "odd", [(-1.0, -delta / 2), (delta / 2, 1.0)])
    return _normalize(poly)


def eece(x, tau):
    """Even extension of the complex exponential, cos(tau x) - i sin(tau x) sign(x)."""
    x = np.asarray(x, dtype=float)
    return np.cos(tau * x) - 1j * np.sin(tau * x) * np.sign(x)


def eece_poly(eps, delta, tau, cap=DEGREE_CAP):
    """Polynomial eps-approximation of the EECE for |x| >= delta/2.

    Both the real part (cos) and the imaginary part (sin times sign) are even,
    so the combined complex polynomial carries parity 'even'.
    """
    s = eps / 6.0
    pc = jacobi_anger_cos(tau, s)
    ps = jacobi_anger_sin(tau, s)
    psign = sign_poly(eps / 3.0, delta, cap)
    prod = nm.chebyshev_multiply(ps.coeffs, psign.coeffs)
    _check_cap(prod.size - 1, cap)
    n = max(pc.coeffs.size, prod.size)
    c = np.zeros(n, dtype=complex)
    c[: pc.coeffs.size] += pc.coeffs
    c[: prod.size] += -1j * prod
    c[1::2] = 0.0
    poly = ChebyshevPolynomial(c, "even", [(-1.0, -delta / 2), (delta / 2, 1.0)])
    return _normalize(poly)


_NAMED_TARGETS = {
    "cos": lambda p: (lambda x: np.cos(p["tau"] * x)),
    "sin": lambda p: (lambda x: np.sin(p["tau"] * x)),
    "sign": lambda p: np.sign,
    "exp_decay": lambda p: (lambda x: np.exp(-p["a"] * (x + 1))),
    "erf": lambda p: (lambda x: nm.erf(p["k"] * x)),
    "eece": lambda p: (lambda x: eece(x, p["tau"])),
    "exp": lambda p: (lambda x: np.exp(-1j * p["tau"] * x)),
}


def named_target(name, **params):
    """Vectorized target function looked up by name ('cos', 'sin', 'sign', ...)."""
    try:
        return _NAMED_TARGETS[name](params)
    except KeyError:
        raise DomainError(f"unknown target {name!r}") from None


def measure_error(poly, target, intervals=None, grid_points=GRID_POINTS, eps_requested=float("nan"), name=None):
    """Sup-norm distance between ``poly`` and ``target`` on uniform grids.

    Args:
        poly: ChebyshevPolynomial or coefficient vector.
        target: vectorized callable, or a ``(name, params)`` pair for named_target.
        intervals: list of ``(lo, hi)`` inside [-1, 1]; defaults to the polynomial's domain.
        grid_points: points per interval.
    """
    if not isinstance(poly, ChebyshevPolynomial):
        poly = ChebyshevPolynomial(poly)
    if isinstance(target, tuple):
        name = name or target[0]
        target = named_target(target[0], **target[1])
    if intervals is None:
        intervals = poly.domain
    if not intervals:
        raise DomainError("no intervals given")
    worst = 0.0
    for lo, hi in intervals:
        if not -1.0 <= lo < hi <= 1.0:
            raise DomainError(f"interval ({lo}, {hi}) is empty or outside [-1, 1]")
        x = np.linspace(lo, hi, grid_points)
        worst = max(worst, float(np.max(np.abs(poly(x) - target(x)))))
    return ApproximationReport(name or getattr(target, "__name__", "target"), eps_requested, worst, poly.degree)
