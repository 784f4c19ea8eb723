"""Funk-type transforms ``J_lambda`` on even and odd functions on ``S^n``.

``(J_lambda f)(xi) = int f(omega) K(<xi, omega>) d omega`` with
``K(s) = |s|^lambda / Gamma((lambda + 1) / 2)`` (even) or
``|s|^lambda sign(s) / Gamma((lambda + 1) / 2)`` (odd).  By Funk-Hecke the
transform is diagonal on spherical harmonics: degree ``l`` is multiplied by
``|S^(n-1)| * eig(lambda, l)`` where

    eig(lambda, l) = int_{-1}^{1} K(s) G_l(s) (1 - s^2)^((n-2)/2) ds

and ``G_l`` is the Gegenbauer polynomial of index ``(n-1)/2`` normalised to
``G_l(1) = 1``.

The integral is folded onto ``[0, 1]`` and evaluated with tanh-sinh
quadrature, which tolerates the ``s^lambda`` singularity at ``s = 0`` and the
``(1 - s)^((n-2)/2)`` one at ``s = 1``.  For ``-3 < Re lambda < 0`` the
leading Taylor term of the integrand at ``s = 0`` is subtracted and its
moment added back in closed form; the ``1/Gamma`` prefactor is applied as
``rgamma`` so removable poles disappear analytically.  The odd kernel keeps
a genuine simple pole at ``lambda = -2``; there the residue (the local
kernel ``delta'``) is available through ``at_pole="residue"``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import eval_gegenbauer, gegenbauer, rgamma, sph_harm_y, roots_legendre

from .errors import DegenerateError, DomainError, SingularityError

PARITIES = ("even", "odd")


def sphere_area(d: int) -> float:
    """Surface measure of the unit sphere ``S^d`` in ``R^(d+1)``."""
    return 2.0 * math.pi ** ((d + 1) / 2.0) / math.gamma((d + 1) / 2.0)


def funk_hecke_factor(n: int) -> float:
    """``|S^(n-1)|``: converts a 1-D eigenvalue integral into the operator eigenvalue on ``S^n``."""
    return sphere_area(n - 1)


def in_parity(l: int, parity: str) -> bool:
    return (l % 2 == 0) == (parity == "even")


def lowest_degree(parity: str) -> int:
    return 0 if parity == "even" else 1


@lru_cache(maxsize=None)
def _tanh_sinh(level: int = 6, t_max: float = 6.5):
    """Nodes on ``(0, 1)`` as ``(log s, log(1 - s), s, weight / (s (1 - s)))``."""
    h = 2.0 ** -level
    t = np.arange(-t_max, t_max + h / 2, h)
    u = math.pi * np.sinh(t)
    log_s = -np.logaddexp(0.0, -u)
    log_1ms = -np.logaddexp(0.0, u)
    s = np.exp(log_s)
    w = h * math.pi * np.cosh(t)
    return log_s, log_1ms, s, w


@lru_cache(maxsize=None)
def _gegenbauer_coeffs(l: int, n: int) -> np.ndarray:
    """Power-basis coefficients (ascending) of the normalised Gegenbauer polynomial."""
    alpha = (n - 1) / 2.0
    coef = gegenbauer(l, alpha).coeffs[::-1].astype(float)
    coef = coef / eval_gegenbauer(l, alpha, 1.0)
    out = np.zeros(l + 1)
    out[:len(coef)] = coef[:l + 1]
    return out


def gegenbauer_normalized(l: int, n: int, s):
    alpha = (n - 1) / 2.0
    s = np.asarray(s, dtype=float)
    return eval_gegenbauer(l, alpha, s) / eval_gegenbauer(l, alpha, 1.0)


def _weight_parts(n, log_s, log_1ms, s):
    """``(1 - s^2)^beta`` and ``((1 - s^2)^beta - 1) / s^2`` with ``beta = (n-2)/2``."""
    beta = (n - 2) / 2.0
    s2 = np.exp(2.0 * log_s)
    # log(1 - s^2); the split form cancels badly for small s
    log_e = beta * np.where(s < 0.5, np.log1p(-np.minimum(s2, 0.25)), log_1ms + np.log1p(s))
    e = np.exp(log_e)
    with np.errstate(divide="ignore", invalid="ignore"):
        em1 = np.where(s2 > 1e-280, np.expm1(log_e) / s2, -beta)
    return e, em1


def _divided_poly(coef, k, s, log_s):
    """``(G(s) - sum_{j<k} g_j s^j) / s^k`` evaluated stably on (0, 1)."""
    tail = coef[k:]
    if len(tail) == 0:
        return np.zeros_like(s)
    small = s < 0.5
    out = np.empty_like(s)
    out[small] = np.polynomial.polynomial.polyval(s[small], tail)
    big = ~small
    head = np.polynomial.polynomial.polyval(s[big], coef[:k]) if k else 0.0
    full = np.polynomial.polynomial.polyval(s[big], coef)
    out[big] = (full - head) / s[big] ** k
    return out


def _check_lambda(lam):
    if lam.real <= -3.0:
        raise DomainError("Re(lambda) <= -3 is outside the implemented continuation")


def _folded_integral(lam, l, n, parity):
    """``2 int_0^1 s^lam psi(s) ds`` after subtraction of the s = 0 Taylor term.

    Returns ``(integral, moment_coefficient, pole_offset)``: the full
    continued integral is ``integral + moment_coefficient * 2 / (lam + pole_offset)``
    (``moment_coefficient = 0`` when no subtraction is needed).
    """
    log_s, log_1ms, s, w = _tanh_sinh()
    coef = _gegenbauer_coeffs(l, n)
    e, em1 = _weight_parts(n, log_s, log_1ms, s)
    base = np.log(w) + log_s + log_1ms
    if lam.real >= 0.0:
        psi = np.polynomial.polynomial.polyval(s, coef) * e
        integrand = np.exp(lam * log_s + base) * psi
        return 2.0 * np.sum(integrand), 0.0, 1.0
    if parity == "even":
        g0 = coef[0]
        q = _divided_poly(coef, 2, s, log_s) * e + g0 * em1
        integrand = np.exp((lam + 2.0) * log_s + base) * q
        return 2.0 * np.sum(integrand), g0, 1.0
    g1 = coef[1] if len(coef) > 1 else 0.0
    q = _divided_poly(coef, 3, s, log_s) * e + g1 * em1
    integrand = np.exp((lam + 3.0) * log_s + base) * q
    return 2.0 * np.sum(integrand), g1, 2.0


def is_pole(lam, parity: str, tol: float = 1e-12) -> bool:
    """Odd kernels with the even-case Gamma normalisation blow up at ``lambda = -2``."""
    lam = complex(lam)
    return parity == "odd" and abs(lam + 2.0) <= tol


def j_lambda_eigenvalue(lam, l: int, n: int, parity: str, at_pole: str = "raise") -> complex:
    """``int_{-1}^{1} K_lambda(s) G_l(s) (1 - s^2)^((n-2)/2) ds`` (analytically continued).

    ``at_pole``: ``"raise"`` or ``"residue"`` (return ``lim (lambda + 2) eig``).
    """
    if parity not in PARITIES:
        raise ValueError(f"parity must be one of {PARITIES}")
    if n < 2:
        raise DomainError("sphere dimension must be at least 2")
    lam = complex(lam)
    if not in_parity(l, parity):
        return 0j
    _check_lambda(lam)
    pole = is_pole(lam, parity)
    if pole and at_pole != "residue":
        raise SingularityError("the odd J_lambda has a pole at lambda = -2; use at_pole='residue'")
    integral, moment, offset = _folded_integral(lam, l, n, parity)
    z = (lam + 1.0) / 2.0
    if moment == 0.0:
        return complex(rgamma(z) * integral)
    if parity == "even":
        # 2 g0 / (lam + 1) / Gamma((lam+1)/2) = g0 / Gamma((lam+3)/2)
        return complex(rgamma(z) * integral + moment * rgamma(z + 1.0))
    if pole:
        return complex(2.0 * moment * rgamma(z))
    return complex(rgamma(z) * (integral + 2.0 * moment / (lam + offset)))


@dataclass(frozen=True, eq=False)
class EigenvalueTable:
    lam: complex
    n: int
    parity: str
    values: np.ndarray
    residue: bool = False

    @property
    def L(self) -> int:
        return len(self.values) - 1

    def to_csv(self) -> str:
        rows = ["l,re,im"]
        rows += [f"{l},{float(v.real)!r},{float(v.imag)!r}" for l, v in enumerate(self.values)]
        return "\n".join(rows) + "\n"


def eigenvalue_table(lam, L: int, n: int, parity: str, at_pole: str = "raise") -> EigenvalueTable:
    lam = complex(lam)
    vals = np.array([j_lambda_eigenvalue(lam, l, n, parity, at_pole) for l in range(L + 1)])
    vals.setflags(write=False)
    return EigenvalueTable(lam, n, parity, vals, residue=is_pole(lam, parity))


def _table_for_ratios(lam, L, n, parity):
    # every in-parity degree shares the factor 1/(lam + 2) at the odd pole
    return eigenvalue_table(lam, L, n, parity, at_pole="residue").values


def inversion_identity_defect(lam, L: int, n: int, parity: str) -> float:
    """``max_l |p(l)/p(l0) - 1|`` with ``p(l) = eig(lam, l) eig(-lam-n-1, l)``."""
    lam = complex(lam)
    partner = -lam - n - 1
    p = _table_for_ratios(lam, L, n, parity) * _table_for_ratios(partner, L, n, parity)
    l0 = lowest_degree(parity)
    if abs(p[l0]) == 0:
        raise DegenerateError("p(l0) vanishes")
    ls = [l for l in range(L + 1) if in_parity(l, parity)]
    return float(max(abs(p[l] / p[l0] - 1.0) for l in ls))


def gft_lambda(rho: float, n: int) -> complex:
    return complex(-(n + 1) / 2.0, rho)


def gft_line_defect(rho: float, L: int, n: int, parity: str) -> float:
    """``max_l ||eig(l)| / |eig(l0)| - 1|`` on the line ``lambda = -(n+1)/2 + i rho``."""
    if n < 2:
        raise DomainError("n must be at least 2")
    vals = _table_for_ratios(gft_lambda(rho, n), L, n, parity)
    l0 = lowest_degree(parity)
    ref = abs(vals[l0])
    if ref == 0:
        raise DegenerateError("lowest-degree eigenvalue vanishes")
    ls = [l for l in range(L + 1) if in_parity(l, parity)]
    return float(max(abs(abs(vals[l]) / ref - 1.0) for l in ls))


def richardson_at_pole(fn, lam, step: float = 1e-4):
    """Symmetric limit ``(4 g(step/2) - g(step)) / 3`` with ``g(d) = (fn(lam+d) + fn(lam-d)) / 2``."""
    lam = complex(lam)

    def g(d):
        return 0.5 * (fn(lam + d) + fn(lam - d))

    return (4.0 * g(step / 2.0) - g(step)) / 3.0


# --- functions on the sphere --------------------------------------------------

@dataclass(frozen=True, eq=False)
class SphereFunction:
    """Spherical-harmonic coefficients of an even or odd function on ``S^n``.

    ``n = 2``: ``coeffs[l, m + L]`` multiplies the orthonormal ``Y_l^m``.
    ``n > 2``: zonal profile, ``coeffs[l]`` multiplies ``G_l(<omega, e_last>)``.
    """

    n: int
    parity: str
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if self.parity not in PARITIES:
            raise ValueError(f"parity must be one of {PARITIES}")
        L = c.shape[0] - 1
        if self.n == 2 and c.shape != (L + 1, 2 * L + 1):
            raise ValueError("S^2 coefficients must have shape (L+1, 2L+1)")
        for l in range(L + 1):
            if not in_parity(l, self.parity) and np.any(c[l] != 0):
                raise ValueError(f"degree {l} has the wrong parity for a {self.parity} function")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def L(self) -> int:
        return self.coeffs.shape[0] - 1

    def degree_norms(self) -> np.ndarray:
        """``||F_l||^2`` per degree (orthonormal basis on S^2)."""
        c = self.coeffs
        if self.n == 2:
            return np.sum(np.abs(c) ** 2, axis=1)
        # ||G_l||^2 on S^n = |S^(n-1)| int G_l^2 (1-s^2)^((n-2)/2) ds
        s, w = roots_legendre(self.L + 40)
        wt = (1 - s ** 2) ** ((self.n - 2) / 2.0)
        norms = np.array([funk_hecke_factor(self.n) * np.sum(w * wt * gegenbauer_normalized(l, self.n, s) ** 2)
                          for l in range(self.L + 1)])
        return np.abs(c) ** 2 * norms

    def evaluate(self, theta, phi=None):
        """Point values; ``theta`` is the polar angle from the last axis."""
        theta = np.asarray(theta, dtype=float)
        L = self.L
        if self.n == 2:
            phi = np.asarray(phi, dtype=float)
            out = np.zeros(np.broadcast(theta, phi).shape, complex)
            for l in range(L + 1):
                if not in_parity(l, self.parity):
                    continue
                for m in range(-l, l + 1):
                    c = self.coeffs[l, m + L]
                    if c != 0:
                        out += c * sph_harm_y(l, m, theta, phi)
            return out
        s = np.cos(theta)
        return sum(self.coeffs[l] * gegenbauer_normalized(l, self.n, s) for l in range(L + 1))


def random_sphere_function(L: int, parity: str, rng, n: int = 2) -> SphereFunction:
    shape = (L + 1, 2 * L + 1) if n == 2 else (L + 1,)
    c = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    for l in range(L + 1):
        if not in_parity(l, parity):
            c[l] = 0
        elif n == 2:
            c[l, :L - l] = 0
            c[l, L + l + 1:] = 0
    return SphereFunction(n, parity, c)


def apply_j_lambda(F: SphereFunction, lam) -> SphereFunction:
    """Multiply degree ``l`` by ``|S^(n-1)| eig(lam, l)``; parity is preserved."""
    eig = eigenvalue_table(lam, F.L, F.n, F.parity).values * funk_hecke_factor(F.n)
    shape = (-1, 1) if F.n == 2 else (-1,)
    return SphereFunction(F.n, F.parity, F.coeffs * eig.reshape(shape))
