import math

import numpy as np
import pytest

from qspsim import polyapprox as pa
from qspsim.errors import CapacityError, ContractError, DomainError, ParseError

GRID = np.linspace(-1, 1, 1001)


def r_oracle(tau, eps):
    # bracketed bisection on r*ln(tau/r) - ln(eps), decreasing for r > tau/e
    f = lambda r: r * math.log(tau / r) - math.log(eps)
    lo, hi = tau, tau * 2
    while f(hi) > 0:
        hi *= 2
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_r_function_examples():
    assert pa.r_function(1, math.exp(-math.e)) == pytest.approx(math.e, rel=1e-12)
    assert pa.r_function(7.5, 0.02) == pytest.approx(r_oracle(7.5, 0.02), rel=1e-12)
    assert pa.r_function(7.5, 0.02) == pytest.approx(10.78084508856877, rel=1e-12)


@pytest.mark.parametrize("tau", [0.5, 1, 5, 25, 100])
@pytest.mark.parametrize("eps", [1e-2, 1e-4, 1e-8])
def test_r_function_identity(tau, eps):
    r = pa.r_function(tau, eps)
    assert r > tau
    assert (tau / r) ** r == pytest.approx(eps, rel=1e-9)


def test_r_function_domain():
    with pytest.raises(DomainError):
        pa.r_function(1.0, 0.5)
    with pytest.raises(DomainError):
        pa.r_function(0.0, 0.01)


def test_truncation_index():
    assert pa.truncation_index(3.0, 1e-6) >= pa.truncation_index(3.0, 1e-2)
    assert pa.truncation_index(1e-9, 0.01) <= 2
    assert pa.truncation_index(0.0, 0.01) == 0
    golden = math.floor(0.5 * r_oracle(math.e * 25 / 2, 1.25 * 0.005))
    assert pa.truncation_index(25, 0.02 / 4) == golden == 19


def test_jacobi_anger_cos():
    p = pa.jacobi_anger_cos(0.0, 1e-3)
    assert p.degree == 0 and p.coeffs[0] == pytest.approx(1 / 1.001)
    for tau in (0.7, 5.25, 20.0):
        p = pa.jacobi_anger_cos(tau, 1e-3)
        assert p.parity == "even"
        assert abs(p(0.0) - 1) <= 2e-3
        assert np.max(np.abs(p(GRID))) <= 1 + 1e-9
    p = pa.jacobi_anger_cos(5.25, 1e-3)
    assert np.max(np.abs(p(GRID) - np.cos(5.25 * GRID))) < 2e-3
    assert p.degree == 2 * pa.truncation_index(5.25, 1e-3)


def test_jacobi_anger_sin():
    p = pa.jacobi_anger_sin(0.0, 1e-3)
    assert np.all(p.coeffs == 0)
    p = pa.jacobi_anger_sin(5.25, 1e-3)
    assert p.parity == "odd"
    assert np.all(p.coeffs[0::2] == 0)
    np.testing.assert_array_equal(p(-GRID), -p(GRID))
    assert np.max(np.abs(p(GRID) - np.sin(5.25 * GRID))) < 2e-3
    assert p.degree == 2 * pa.truncation_index(5.25, 1e-3) + 1
    neg = pa.jacobi_anger_sin(-2.0, 1e-4)
    assert np.max(np.abs(neg(GRID) - np.sin(-2.0 * GRID))) < 2e-4


def test_truncated_fixed_degree():
    c = pa.truncated_cos(5.25, 6)
    s = pa.truncated_sin(5.25, 5)
    assert c.degree == 6 and s.degree == 5
    assert c.max_abs() <= 1 + 1e-12 and s.max_abs() <= 1 + 1e-12
    with pytest.raises(ContractError):
        pa.truncated_cos(1.0, 5)


def test_exp_decay_poly():
    p = pa.exp_decay_poly(8.0, 1e-4)
    assert abs(p(-1.0) - 1) <= 1e-4
    assert np.max(np.abs(p(GRID) - np.exp(-8 * (GRID + 1)))) < 1e-4
    small = pa.exp_decay_poly(1e-9, 1e-6)
    assert np.max(np.abs(small(GRID) - 1)) < 1e-6
    with pytest.raises(DomainError):
        pa.exp_decay_poly(-1, 0.1)


def test_sign_poly_properties():
    p = pa.sign_poly(0.01, 0.5)
    assert p(0.0) == 0
    np.testing.assert_array_equal(p(-GRID), -p(GRID))
    assert p.parity == "odd" and p.degree == pa.gamma_degree(0.01, 0.5)
    assert p.degree % 2 == 1
    assert np.max(np.abs(p(GRID))) <= 1 + 1e-12
    outside = np.concatenate([np.linspace(-1, -0.25, 1001), np.linspace(0.25, 1, 1001)])
    assert np.max(np.abs(p(outside) - np.sign(outside))) < 0.01


def test_sign_poly_tracks_erf():
    eps, delta = 0.01, 0.5
    k = pa.sign_k(eps, delta)
    p = pa.sign_poly(eps, delta)
    # the polynomial is an eps/2-approximation of erf(kx) up to the final normalization
    assert np.max(np.abs(p(GRID) - pa.named_target("erf", k=k)(GRID))) < eps / 2


def test_sign_poly_capacity():
    with pytest.raises(CapacityError):
        pa.sign_poly(1e-3, 0.01, cap=100)


def test_eece_poly():
    p = pa.eece_poly(0.05, 0.9, 0.0)
    assert np.max(np.abs(p(GRID) - 1)) < 0.05
    beta = 0.4
    tau = 2 * 3.5 * 1.5 / beta
    assert tau == pytest.approx(26.25)
    p = pa.eece_poly(0.05, 1 - beta, tau)
    assert p.parity == "even"
    assert np.max(np.abs(p(GRID))) <= 1 + 1e-9
    x = np.linspace(0.3, 0.7, 1001)
    assert np.max(np.abs(p(x) - np.exp(-1j * tau * x))) < 0.05
    # the negative side mirrors the positive side
    np.testing.assert_allclose(p(-x), p(x), atol=1e-12)


def test_eece_error_budget_composition():
    eps, delta, tau = 0.05, 0.6, 10.0
    p = pa.eece_poly(eps, delta, tau)
    pc = pa.jacobi_anger_cos(tau, eps / 6)
    ps = pa.jacobi_anger_sin(tau, eps / 6)
    sg = pa.sign_poly(eps / 3, delta)
    x = np.linspace(delta / 2, 1, 1001)
    e_cos = np.max(np.abs(pc(x) - np.cos(tau * x)))
    e_sin = np.max(np.abs(ps(x) * sg(x) - np.sin(tau * x)))
    e_tot = np.max(np.abs(p(x) - np.exp(-1j * tau * x)))
    assert e_tot <= e_cos + e_sin + 1e-12
    assert e_tot <= eps


def test_measure_error():
    p = pa.jacobi_anger_cos(3.0, 1e-3)
    assert pa.measure_error(p, p).epsilon_measured == 0
    t1 = pa.ChebyshevPolynomial([0, 1])
    rep = pa.measure_error(t1, ("sin", {"tau": 1.0}), [(-0.1, 0.1)])
    assert rep.epsilon_measured == pytest.approx(0.1 - math.sin(0.1), rel=1e-9)
    assert rep.epsilon_measured <= 1.67e-4
    assert rep.epsilon_measured >= 0
    with pytest.raises(DomainError):
        pa.measure_error(t1, np.sin, [(0.2, 0.2)])


def test_parity_tags_match_sparsity():
    polys = [pa.jacobi_anger_cos(4, 1e-4), pa.jacobi_anger_sin(4, 1e-4), pa.sign_poly(0.1, 0.3), pa.eece_poly(0.1, 0.5, 3.0)]
    for p in polys:
        assert pa.infer_parity(p.coeffs) == p.parity
    with pytest.raises(ContractError):
        pa.ChebyshevPolynomial([1, 1], "even")


def test_text_round_trip():
    p = pa.eece_poly(0.1, 0.5, 3.0)
    q = pa.ChebyshevPolynomial.from_text(p.to_text())
    assert q.parity == p.parity
    assert np.array_equal(q.coeffs, p.coeffs)
    assert p.to_text().splitlines()[0] == f"chebyshev parity=even degree={p.degree}"


def test_text_parse_errors():
    with pytest.raises(ParseError):
        pa.ChebyshevPolynomial.from_text("")
    with pytest.raises(ParseError) as exc:
        pa.ChebyshevPolynomial.from_text("chebyshev parity=odd degree=1\n1 x 0\n")
    assert exc.value.line == 2


@pytest.mark.parametrize("tau", [0.0, 1.0, 5.25])
def test_raw_truncation_within_eps(tau):
    eps = 1e-3
    c = pa.jacobi_anger_cos(tau, eps, rescale=False)
    s = pa.jacobi_anger_sin(tau, eps, rescale=False)
    assert np.max(np.abs(c(GRID) - np.cos(tau * GRID))) <= eps
    assert np.max(np.abs(s(GRID) - np.sin(tau * GRID))) <= eps
    np.testing.assert_allclose(pa.jacobi_anger_cos(tau, eps).coeffs * (1 + eps), c.coeffs, rtol=1e-15)
