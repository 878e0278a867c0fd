"""Closed-form query counts for the simulation algorithms.

All counts are numbers of calls to the Hamiltonian block encoding. ``t = 0``
needs no Jacobi-Anger terms, so the r-function term is taken as zero there.
"""

import csv
import io
import math
from dataclasses import dataclass

from .errors import DomainError
from .polyapprox import gamma_degree, r_function

ALGORITHMS = ("lcu", "aa", "roaa", "os")
CSV_HEADER = ("algorithm", "t", "alpha", "beta", "epsilon", "delta", "queries")


@dataclass(frozen=True)
class ComplexityReport:
    algorithm: str
    t: float
    alpha: float
    beta: float
    epsilon: float
    delta: float
    queries: int


def _check_unit(name, v):
    if not 0 < v < 1:
        raise DomainError(f"{name} must lie in (0, 1), got {v}")


def _half_r(tau, eps):
    if tau == 0:
        return 0
    return int(math.floor(0.5 * r_function(tau, eps)))


def gamma(eps, delta):
    """Odd degree of the sign polynomial with error ``eps`` outside the gap ``delta``."""
    return gamma_degree(eps, delta)


def n_lcu(eps, t, alpha):
    """``4 floor(r(e alpha |t| / 2, 5 eps / 16) / 2) + 1``."""
    return 4 * _half_r(math.e * alpha * abs(t) / 2, 5 * eps / 16) + 1


def n_aa(eps, delta, t, alpha):
    """``gamma(delta / 2, 1 - eps) * n_lcu(eps)``."""
    _check_unit("delta", delta)
    _check_unit("epsilon", eps)
    return gamma(delta / 2, 1 - eps) * n_lcu(eps, t, alpha)


def n_roaa(eps, t, alpha):
    """Three LCU calls at the tightened error ``2 eps / 5``."""
    return 3 * n_lcu(2 * eps / 5, t, alpha)


def n_os(eps, beta, t, alpha):
    """``2 floor(r(e alpha |t| / beta, 5 eps / 24) / 2) + gamma(eps / 3, 1 - beta) + 1``."""
    _check_unit("beta", beta)
    _check_unit("epsilon", eps)
    return 2 * _half_r(math.e * alpha * abs(t) / beta, 5 * eps / 24) + gamma(eps / 3, 1 - beta) + 1


def n_os_trotter(eps, delta, t, steps, alpha, beta):
    """``L`` one-shot slices of length ``t / L`` with the budgets split as ``eps / L`` and ``delta / L``.

    The one-shot count already fixes its failure probability at twice its
    error, so ``delta`` is validated but does not change the count.
    """
    if int(steps) < 1:
        raise DomainError(f"need at least one step, got {steps}")
    _check_unit("delta", delta)
    steps = int(steps)
    return steps * n_os(eps / steps, beta, t / steps, alpha)


def report(algorithm, t, alpha, beta, eps, delta):
    if algorithm == "lcu":
        q = n_lcu(eps, t, alpha)
    elif algorithm == "aa":
        q = n_aa(eps, delta, t, alpha)
    elif algorithm == "roaa":
        q = n_roaa(eps, t, alpha)
    elif algorithm == "os":
        q = n_os(eps, beta, t, alpha)
    else:
        raise DomainError(f"unknown algorithm {algorithm!r}")
    return ComplexityReport(algorithm, float(t), float(alpha), float(beta), float(eps), float(delta), int(q))


def complexity_table(t_values, eps_values, alpha=5.0, beta=0.5, delta_factor=2.0, algorithms=ALGORITHMS):
    """Rows for every algorithm over the grid of ``t`` and ``eps``.

    ``delta = delta_factor * eps`` for every row. Rows are ordered by
    algorithm, then ``t``, then ``eps``, ascending.
    """
    t_values = sorted(float(t) for t in t_values)
    eps_values = sorted(float(e) for e in eps_values)
    if not t_values or not eps_values:
        raise DomainError("complexity table needs nonempty ranges")
    rows = []
    for algo in algorithms:
        for t in t_values:
            for eps in eps_values:
                rows.append(report(algo, t, alpha, beta, eps, delta_factor * eps))
    return rows


def to_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([r.algorithm, f"{r.t:.12g}", f"{r.alpha:.12g}", f"{r.beta:.12g}", f"{r.epsilon:.12g}", f"{r.delta:.12g}", r.queries])
    return buf.getvalue()
