import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import eval_gegenbauer, eval_legendre, gamma, roots_jacobi

from gftlab.errors import DomainError, SingularityError
from gftlab.sphere import (SphereFunction, apply_j_lambda, eigenvalue_table, funk_hecke_factor,
                           gft_lambda, gft_line_defect, inversion_identity_defect,
                           j_lambda_eigenvalue, random_sphere_function, richardson_at_pole)


def test_parity_mismatch_is_exact_zero():
    assert j_lambda_eigenvalue(-0.5, 3, 2, "even") == 0
    assert j_lambda_eigenvalue(0.2 + 1j, 4, 3, "odd") == 0
    tab = eigenvalue_table(-0.7, 9, 2, "odd")
    assert np.all(tab.values[::2] == 0)


def test_constant_kernel_closed_form():
    assert abs(j_lambda_eigenvalue(0.0, 0, 2, "even") - 2 / math.sqrt(math.pi)) < 1e-10


def test_frozen_gamma_ratios(oracles):
    for row in oracles["sphere_ratios"]:
        lam, n, l = row["lam"], row["n"], row["l"]
        ratio = j_lambda_eigenvalue(lam, l, n, "even") / j_lambda_eigenvalue(lam, 0, n, "even")
        assert abs(ratio - row["value"]) < 1e-8 * max(1.0, abs(row["value"])), row


def test_frozen_direct_values(oracles):
    for row in oracles["sphere_direct"]:
        parity = "even" if row["l"] % 2 == 0 else "odd"
        val = j_lambda_eigenvalue(row["lam"], row["l"], row["n"], parity)
        assert abs(val - row["value"]) < 1e-10 * max(1.0, abs(row["value"])), row


@pytest.mark.parametrize("l,n", [(0, 2), (4, 2), (6, 3), (5, 4)])
def test_subtraction_vanishes_where_unneeded(l, n):
    # unregularized integral with an algebraic-weight quadrature at Re lambda = -0.5
    lam = -0.5
    parity = "even" if l % 2 == 0 else "odd"
    a = (n - 1) / 2
    g = lambda s: eval_gegenbauer(l, a, s) / eval_gegenbauer(l, a, 1.0) * (1 - s * s) ** ((n - 2) / 2)  # noqa: E731
    half = quad(g, 0, 1, weight="alg", wvar=(lam, 0.0), epsabs=1e-14, epsrel=1e-13)[0]
    ref = 2 * half / gamma((lam + 1) / 2)
    assert abs(j_lambda_eigenvalue(lam, l, n, parity) - ref) < 1e-10


def test_funk_transform_matches_great_circle_means():
    # lambda = -1: kernel is delta(<xi, omega>), the great-circle mean
    tilt, pts = 0.7, 400
    phi = 2 * np.pi * np.arange(pts) / pts
    z = -np.sin(tilt) * np.cos(phi)          # e_3 component along the circle orthogonal to xi
    e0 = j_lambda_eigenvalue(-1.0, 0, 2, "even").real
    for l in range(0, 17, 2):
        mean = np.mean(eval_legendre(l, z))
        ratio = j_lambda_eigenvalue(-1.0, l, 2, "even").real / e0
        assert abs(mean - ratio * eval_legendre(l, math.cos(tilt))) < 1e-6


def test_gamma_pole_limit_matches_richardson():
    for l in (0, 2, 6):
        direct = j_lambda_eigenvalue(-1.0, l, 3, "even")
        extrap = richardson_at_pole(lambda z: j_lambda_eigenvalue(z, l, 3, "even"), -1.0)
        assert abs(direct - extrap) < 1e-8


def test_odd_pole_and_residue():
    with pytest.raises(SingularityError):
        j_lambda_eigenvalue(-2.0, 1, 3, "odd")
    res = j_lambda_eigenvalue(-2.0, 3, 3, "odd", at_pole="residue")
    eps = 1e-6
    near = 0.5 * ((eps) * j_lambda_eigenvalue(-2 + eps, 3, 3, "odd")
                  - eps * j_lambda_eigenvalue(-2 - eps, 3, 3, "odd"))
    assert abs(res - near) < 1e-8


def test_out_of_range_lambda():
    with pytest.raises(DomainError):
        j_lambda_eigenvalue(-3.0, 0, 2, "even")
    with pytest.raises(DomainError):
        j_lambda_eigenvalue(-3.5 + 2j, 2, 2, "even")


def test_inversion_identity():
    assert inversion_identity_defect(-0.5, 16, 2, "even") < 1e-6
    a = inversion_identity_defect(-0.8, 12, 2, "even")
    b = inversion_identity_defect(-3 + 0.8, 12, 2, "even")
    assert abs(a - b) < 1e-12
    assert inversion_identity_defect(-2.0, 16, 3, "odd") < 1e-5


@pytest.mark.parametrize("rho", [0.0, 1.0])
def test_gft_line(rho):
    assert gft_line_defect(rho, 16, 2, "even") < 1e-5
    assert gft_line_defect(rho, 15, 2, "odd") < 1e-5
    assert gft_line_defect(rho, 0, 2, "even") == 0.0


def test_zero_and_diagonality():
    L = 8
    zero = SphereFunction(2, "even", np.zeros((L + 1, 2 * L + 1)))
    assert not np.any(apply_j_lambda(zero, -0.5).coeffs)
    c = np.zeros((L + 1, 2 * L + 1), complex)
    c[4, L - 2] = 1.5 - 0.5j
    out = apply_j_lambda(SphereFunction(2, "even", c), 0.3 + 0.2j).coeffs
    mask = np.ones_like(out, bool)
    mask[4, L - 2] = False
    assert np.all(out[mask] == 0) and out[4, L - 2] != 0


def _direct_j(F, lam, xi, nodes=60):
    """Gauss-Jacobi in s = <xi, omega> (weight |s|^lam) times a trapezoid rule in azimuth."""
    x, w = roots_jacobi(nodes, 0.0, lam)
    s, w = (x + 1) / 2, w / 2 ** (lam + 1)
    xi = xi / np.linalg.norm(xi)
    e1 = np.cross(xi, [0.3, 0.1, 1.0])
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(xi, e1)
    psi = 2 * np.pi * np.arange(4 * F.L + 4) / (4 * F.L + 4)
    total = 0j
    for sign in (1.0, -1.0):
        r = np.sqrt(1 - s ** 2)[:, None]
        om = (sign * s[:, None, None] * xi + r[..., None] * (np.cos(psi)[None, :, None] * e1
                                                            + np.sin(psi)[None, :, None] * e2))
        theta = np.arccos(np.clip(om[..., 2], -1, 1))
        ph = np.arctan2(om[..., 1], om[..., 0])
        vals = F.evaluate(theta, ph).mean(axis=1) * 2 * np.pi
        kern = 1.0 if F.parity == "even" else sign
        total += kern * np.sum(w * vals)
    return total / gamma((lam + 1) / 2)


@pytest.mark.parametrize("lam,parity", [(0.3, "even"), (-0.6, "even"), (-0.4, "odd")])
def test_apply_matches_direct_quadrature(lam, parity):
    rng = np.random.default_rng(11)
    F = random_sphere_function(6, parity, rng)
    G = apply_j_lambda(F, lam)
    pts = rng.standard_normal((6, 3))
    direct = np.array([_direct_j(F, lam, p) for p in pts])
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    spectral = np.array([G.evaluate(np.arccos(p[2]), np.arctan2(p[1], p[0])) for p in pts])
    assert np.linalg.norm(spectral - direct) / np.linalg.norm(direct) < 1e-5


def test_zonal_profiles_in_higher_dimension():
    F = SphereFunction(4, "even", [1.0, 0, 0.5, 0, -0.25])
    G = apply_j_lambda(F, -1.5)
    eig = [funk_hecke_factor(4) * j_lambda_eigenvalue(-1.5, l, 4, "even") for l in (0, 2, 4)]
    assert np.allclose(G.coeffs[[0, 2, 4]], np.array([1.0, 0.5, -0.25]) * eig)


def test_plancherel_on_gft_line():
    rng = np.random.default_rng(5)
    lam = gft_lambda(0.6, 2)
    ratios = []
    for _ in range(5):
        F = random_sphere_function(12, "even", rng)
        ratios.append(apply_j_lambda(F, lam).degree_norms().sum() / F.degree_norms().sum())
    ratios = np.array(ratios)
    assert np.ptp(ratios) / ratios.mean() < 1e-4


def test_csv_export():
    text = eigenvalue_table(-0.5, 3, 2, "even").to_csv().splitlines()
    assert text[0] == "l,re,im" and len(text) == 5 and text[2] == "1,0.0,0.0"
