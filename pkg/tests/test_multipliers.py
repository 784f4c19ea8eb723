import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from gftlab.errors import SingularityError
from gftlab.multipliers import (MultiplierKernel, complex_monomial, delta, delta_derivative,
                                eval_multiplier, homogeneous_ft_constant, inversion_multiplier,
                                is_gft_kernel, monomial, nonlocal_gft_family)

C_REAL = np.array([-3.5, -1.0, -0.2, 0.3, 2.0, 7.0])
C_CPLX = np.array([1 + 1j, -2 + 0.5j, 0.3 - 4j, -1j])


def test_eval_examples():
    assert eval_multiplier(delta(), 5.0) == 1
    assert eval_multiplier(monomial(1), 2.0) == 2
    assert abs(eval_multiplier(complex_monomial(1, 1), 3 * np.exp(1j * np.pi / 4)) - 9) < 1e-12


def test_delta_derivative_convention():
    # int delta'(t) e^{ict} dt = -ic
    assert eval_multiplier(delta_derivative(1), 2.0) == -2j


def test_singular_multiplier_needs_floor():
    k = MultiplierKernel("real", sigma=-0.5)
    with pytest.raises(SingularityError):
        eval_multiplier(k, np.array([0.0, 1.0]))
    assert eval_multiplier(k, np.array([0.0]), floor=0.25)[0] == pytest.approx(2.0)


def test_complex_multiplier_needs_integer_winding():
    with pytest.raises(ValueError):
        MultiplierKernel("complex", sigma=1.0, p=0.5, q=0.0)


def test_inversion_multiplier_examples():
    inv = inversion_multiplier(delta("complex"), 2)
    assert np.allclose(eval_multiplier(inv, C_CPLX), np.abs(C_CPLX) ** 2)
    inv = inversion_multiplier(delta(), 2)
    assert np.allclose(eval_multiplier(inv, C_REAL), np.abs(C_REAL))
    inv = inversion_multiplier(monomial(1), 3)
    assert np.allclose(eval_multiplier(inv, C_REAL), np.sign(C_REAL) * np.abs(C_REAL))


@pytest.mark.parametrize("k,n", [
    (delta(), 2), (monomial(1), 3), (delta_derivative(2), 4),
    (nonlocal_gft_family("real", 3, 0.7), 3), (MultiplierKernel("real", 0.3, 1.1, 1, scale=2j), 5),
])
def test_composition_real(k, n):
    prod = eval_multiplier(inversion_multiplier(k, n), C_REAL) * eval_multiplier(k, C_REAL)
    assert np.allclose(prod, np.abs(C_REAL) ** (n - 1), rtol=1e-13)


@pytest.mark.parametrize("k,n", [
    (delta("complex"), 2), (complex_monomial(1, 1), 3), (complex_monomial(2, 0), 3),
    (nonlocal_gft_family("complex", 2, lam=1, mu=0), 2),
    (nonlocal_gft_family("complex", 3, rho=0.4), 3),
])
def test_composition_complex(k, n):
    prod = eval_multiplier(inversion_multiplier(k, n), C_CPLX) * eval_multiplier(k, C_CPLX)
    assert np.allclose(prod, np.abs(C_CPLX) ** (2 * (n - 1)), rtol=1e-13)


def test_gft_checks():
    assert is_gft_kernel(complex_monomial(1, 1), 3)
    assert is_gft_kernel(monomial(1), 3)
    assert not is_gft_kernel(monomial(1), 2)
    assert not is_gft_kernel(MultiplierKernel("real", 1.0, scale=1.5), 3)


@pytest.mark.parametrize("rho", [0.0, 1.0, -2.5])
def test_nonlocal_family_is_gft_and_closed(rho):
    for field, n in [("real", 3), ("real", 4), ("complex", 2), ("complex", 3)]:
        k = nonlocal_gft_family(field, n, rho)
        assert is_gft_kernel(k, n)
        c = C_REAL if field == "real" else C_CPLX
        inv = inversion_multiplier(k, n)
        assert np.allclose(np.abs(eval_multiplier(inv, c)), np.abs(eval_multiplier(k, c)))


def test_nonlocal_family_examples():
    k = nonlocal_gft_family("real", 3, 0.0)
    assert (k.sigma, k.rho) == (1.0, 0.0)
    k = nonlocal_gft_family("complex", 2, lam=1, mu=0)
    assert (k.p, k.q, k.sigma) == (1.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        nonlocal_gft_family("complex", 2, lam=0.5, mu=0.5 + 0.5)


def test_ft_constant_integrable_case_by_quadrature():
    # 2 int_0^inf t^(-1/2) cos(t) dt
    val = 2 * quad(lambda t: t ** -0.5 if t > 0 else 0.0, 0, np.inf, weight="cos", wvar=1.0)[0]
    assert abs(homogeneous_ft_constant(-0.5) - val) < 1e-7


def test_ft_constant_of_inverse_square_by_quadrature():
    # finite part of |t|^-2 <-> 2 int_0^inf (cos t - 1) / t^2 dt
    head = quad(lambda t: (math.cos(t) - 1) / t ** 2 if t else -0.5, 0, 1)[0]
    tail = quad(lambda t: t ** -2.0, 1, np.inf, weight="cos", wvar=1.0)[0] - 1.0
    assert abs(homogeneous_ft_constant(-2.0) - 2 * (head + tail)) < 1e-7


def test_locality_flag_and_polynomial_differences():
    c = np.arange(12, dtype=float)
    for m in range(4):
        k = delta_derivative(m)
        assert k.local
        vals = eval_multiplier(k, c)
        assert np.max(np.abs(np.diff(vals, m + 1))) < 1e-12 * 11.0 ** m
    assert not nonlocal_gft_family("real", 3, 0.5).local
    assert complex_monomial(1, 2).local
    assert not MultiplierKernel("real", sigma=1.0, eps=0).local


def test_json_round_trip():
    for k in [delta(), monomial(3, scale=2 - 1j), complex_monomial(2, 1),
              nonlocal_gft_family("real", 3, 0.25)]:
        assert MultiplierKernel.from_json(k.to_json()) == k


@settings(max_examples=200, deadline=None)
@given(st.floats(-3, 3), st.floats(0.05, 40), st.sampled_from([2, 3, 4, 5]), st.booleans())
def test_composition_property(rho, mag, n, neg):
    c = -mag if neg else mag
    k = nonlocal_gft_family("real", n, rho)
    prod = eval_multiplier(inversion_multiplier(k, n), c) * eval_multiplier(k, c)
    assert abs(prod - mag ** (n - 1)) <= 1e-12 * mag ** (n - 1)
