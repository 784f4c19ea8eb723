import numpy as np
import pytest

from gftlab.errors import ConstructionError, DomainError, SizeError
from gftlab.hypergroup import (MAX_NODES, DiscreteGFT, commutativity_defect, convolve,
                               delsarte_associativity_defect, discretize_gft, dual, fourier_gft,
                               from_matrix, measure, neutral_node, operator_matrix, point_mass,
                               radon_slice_gft, sphere_gft, symbol, symbol_product_defect,
                               translation_operator)
from gftlab.multipliers import monomial


@pytest.fixture(scope="module")
def fourier():
    return fourier_gft(32)


@pytest.fixture(scope="module")
def sphere():
    return sphere_gft(16)


def test_fourier_translation_is_cyclic_shift(fourier):
    f = np.random.default_rng(0).standard_normal(32)
    for y in (0, 1, 7, 31):
        # symbol conj(e(y, .)) shifts by -y in this sign convention
        assert np.max(np.abs(translation_operator(fourier, y).matvec(f) - np.roll(f, -y))) < 1e-12


def test_fourier_axioms(fourier):
    assert fourier.isometry_residual() < 1e-12
    assert commutativity_defect(fourier, 3, 11) < 1e-12
    assert delsarte_associativity_defect(fourier, 2, 5, 30) < 1e-12
    assert symbol_product_defect(fourier, 4, 9) < 1e-12
    assert neutral_node(fourier) == 0


def test_sphere_axioms(sphere):
    assert sphere.shape == (9, 9)
    assert sphere.isometry_residual() < 1e-10
    for y, z in [(0, 4), (2, 8), (5, 6)]:
        assert commutativity_defect(sphere, y, z) < 1e-5
        assert delsarte_associativity_defect(sphere, y, z, (y + z) % 9) < 1e-5
    assert neutral_node(sphere) is None


def test_radon_slice_gft():
    G = radon_slice_gft(24, 0.5, monomial(1))
    assert G.isometry_residual() < 1e-12
    assert commutativity_defect(G, 1, 5) < 1e-10
    assert discretize_gft("radon-slice", 24, spacing=0.5, kernel=monomial(1)).shape == (24, 24)


def test_dual_is_an_involution(sphere):
    for G in (sphere, fourier_gft(8)):
        D = dual(dual(G))
        assert np.array_equal(D.E, G.E) and D.dualized == G.dualized
        assert np.array_equal(D.x_weights, G.x_weights)
        assert dual(G).isometry_residual() == pytest.approx(G.isometry_residual(), abs=1e-13)


def test_symbol_measure_and_convolution(fourier):
    rng = np.random.default_rng(1)
    mu = rng.standard_normal(32) + 1j * rng.standard_normal(32)
    assert np.allclose(measure(fourier, symbol(fourier, mu)), mu)
    nu = rng.standard_normal(32)
    direct = np.array([sum(mu[i] * nu[(k - i) % 32] for i in range(32)) for k in range(32)])
    assert np.allclose(convolve(fourier, mu, nu), direct)
    # the point mass at y carries the translation symbol
    y = 5
    R = operator_matrix(translation_operator(fourier, y))
    assert np.allclose(fourier.forward(R @ fourier.inverse(np.eye(32))),
                       np.diag(symbol(fourier, point_mass(fourier, y))))


def test_forward_inverse(sphere):
    g = np.random.default_rng(2).standard_normal(9)
    assert np.allclose(sphere.forward(sphere.inverse(g)), g)


def test_from_matrix_polishes_and_rejects():
    E = fourier_gft(8).E
    G, res = from_matrix(np.ones(8), np.full(8, 0.13), E)
    assert res < 1e-12
    with pytest.raises(ConstructionError):
        from_matrix(np.ones(4), np.ones(4), np.ones((4, 4)))


def test_validation():
    with pytest.raises(DomainError):
        DiscreteGFT(np.ones(3), np.ones(2), np.ones((2, 2)))
    with pytest.raises(DomainError):
        DiscreteGFT(np.array([1.0, -1.0]), np.ones(2), np.ones((2, 2)))
    with pytest.raises(SizeError):
        DiscreteGFT(np.ones(MAX_NODES + 1), np.ones(1), np.ones((MAX_NODES + 1, 1)))
    with pytest.raises(DomainError):
        discretize_gft("torus")
    with pytest.raises(DomainError):
        translation_operator(fourier_gft(4), 4)


def test_translations_are_contractions(sphere, fourier):
    for G in (sphere, fourier, radon_slice_gft(16, 0.5)):
        res = G.isometry_residual()
        for y in range(0, G.shape[0], 3):
            norm = np.linalg.norm(operator_matrix(translation_operator(G, y)), 2)
            assert norm <= 1 + 10 * res + 1e-12
