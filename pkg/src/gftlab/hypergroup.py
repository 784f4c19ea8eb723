"""Discrete generalized Fourier transforms and the hypergroups they induce.

A :class:`DiscreteGFT` is a matrix ``E[x, chi]`` with positive node weights
on both sides.  The transform and its inverse are

    F f (chi)   = sum_x f(x) e(x, chi) w_x
    F^-1 g (x)  = sum_chi g(chi) conj(e(x, chi)) w_chi

and the generalized translation ``R^y = F^-1 diag(conj e(y, .)) F``.  Point
measures are identified with symbols by ``sigma_mu(chi) = sum_x mu(x)
conj(e(x, chi))``; convolution multiplies symbols, so ``delta_y`` has the
symbol of ``R^y``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import LinearOperator
from scipy.special import eval_legendre, roots_jacobi

from .errors import ConstructionError, DomainError, SizeError
from .multipliers import MultiplierKernel, eval_multiplier
from .sphere import j_lambda_eigenvalue, gft_lambda

MAX_NODES = 4096
SOURCES = ("fourier", "sphere", "radon-slice")


@dataclass(frozen=True, eq=False)
class DiscreteGFT:
    x_weights: np.ndarray
    chi_weights: np.ndarray
    E: np.ndarray
    tag: str = "custom"
    dualized: bool = False

    def __post_init__(self):
        wx = np.asarray(self.x_weights, dtype=float).reshape(-1)
        wc = np.asarray(self.chi_weights, dtype=float).reshape(-1)
        E = np.asarray(self.E, dtype=complex)
        if E.shape != (len(wx), len(wc)):
            raise DomainError("E must have shape (len(x_weights), len(chi_weights))")
        if max(E.shape) > MAX_NODES:
            raise SizeError(f"node count exceeds the cap of {MAX_NODES}")
        if np.any(wx <= 0) or np.any(wc <= 0):
            raise DomainError("node weights must be positive")
        for a in (wx, wc, E):
            a.setflags(write=False)
        object.__setattr__(self, "x_weights", wx)
        object.__setattr__(self, "chi_weights", wc)
        object.__setattr__(self, "E", E)

    @property
    def shape(self):
        return self.E.shape

    def forward(self, f):
        return self.E.T @ (self.x_weights[:, None] * f if np.ndim(f) == 2 else self.x_weights * f)

    def inverse(self, g):
        wg = self.chi_weights[:, None] * g if np.ndim(g) == 2 else self.chi_weights * g
        return self.E.conj() @ wg

    def scaled_matrix(self) -> np.ndarray:
        """``diag(sqrt w_chi) E^T diag(sqrt w_x)``: unitary-like iff the transform is an isometry."""
        return np.sqrt(self.chi_weights)[:, None] * self.E.T * np.sqrt(self.x_weights)[None, :]

    def isometry_residual(self) -> float:
        """Largest deviation of a singular value of the scaled matrix from 1."""
        s = np.linalg.svd(self.scaled_matrix(), compute_uv=False)
        return float(np.max(np.abs(s - 1.0)))


def _polish(wx, wc, E):
    """One diagonal rescaling of the dual weights towards unit column norms."""
    Q = np.sqrt(wc)[:, None] * E.T * np.sqrt(wx)[None, :]
    rows = np.sum(np.abs(Q) ** 2, axis=1)
    return wc / np.where(rows > 0, rows, 1.0)


def from_matrix(wx, wc, E, tag="custom", tol=1e-8, polish=True) -> tuple[DiscreteGFT, float]:
    """Wrap ``E`` and check the isometry; returns ``(G, residual)``.

    When the raw residual exceeds ``tol`` one polishing pass is applied; a
    residual still above ``1e-4`` is a construction error.
    """
    G = DiscreteGFT(wx, wc, E, tag)
    res = G.isometry_residual()
    if res > tol and polish:
        G = DiscreteGFT(wx, _polish(np.asarray(wx, float), np.asarray(wc, float),
                                    np.asarray(E, complex)), E, tag)
        res = G.isometry_residual()
    if res > 1e-4:
        raise ConstructionError(f"isometry residual {res:.3g} after polishing")
    return G, res


def fourier_gft(size: int) -> DiscreteGFT:
    """``Z_N`` with ``e(j, k) = exp(2 pi i j k / N)``, ``w_x = 1``, ``w_chi = 1/N``."""
    if size < 1:
        raise DomainError("size must be positive")
    j = np.arange(size)
    E = np.exp(2j * np.pi * np.outer(j, j) / size)
    return DiscreteGFT(np.ones(size), np.full(size, 1.0 / size), E, "fourier")


def sphere_gft(L: int, rho: float = 0.0, n: int = 2) -> DiscreteGFT:
    """Even zonal functions on ``S^2`` under ``J_lambda`` on the GFT line.

    Nodes are ``s = cos(theta) in (0, 1)`` at Gauss points in ``r = s^2``
    (exact for products of even zonal harmonics up to degree ``L``); dual
    nodes are the even degrees.  ``e(s, l) = Y_l(s) * phase_l`` with ``Y_l``
    orthonormal on the sphere and ``phase_l`` the unimodular part of the
    transform's eigenvalue.
    """
    if n != 2:
        raise DomainError("the zonal construction is implemented for S^2")
    degrees = np.arange(0, L + 1, 2)
    m = len(degrees)
    r, w = roots_jacobi(m, 0.0, -0.5)         # weight (1 - x)^0 (1 + x)^(-1/2) on [-1, 1]
    r = (r + 1.0) / 2.0
    w = w / math.sqrt(2.0)                     # now int_0^1 g(r) r^(-1/2) dr
    s = np.sqrt(r)
    wx = 2.0 * math.pi * w                     # int_S2 f = 2 pi int_0^1 f(sqrt r) r^(-1/2) dr
    lam = gft_lambda(rho, n)
    eig = np.array([j_lambda_eigenvalue(lam, int(l), n, "even") for l in degrees])
    phase = eig / np.abs(eig)
    Y = np.sqrt((2 * degrees + 1) / (4 * math.pi))[None, :] * eval_legendre(degrees[None, :], s[:, None])
    return from_matrix(wx, np.ones(m), Y * phase[None, :], f"sphere(rho={rho})")[0]


def radon_slice_gft(size: int, spacing: float = 1.0, kernel: MultiplierKernel | None = None
                    ) -> DiscreteGFT:
    """Periodic 1-D offset grid with ``e(x, c) = exp(i x c) * phase(u~(c))``."""
    kernel = MultiplierKernel("real", sigma=0.5, rho=0.0) if kernel is None else kernel
    x = (np.arange(size) - size // 2) * spacing
    c = 2 * np.pi * np.fft.fftfreq(size, d=spacing)
    val = eval_multiplier(kernel, c, floor=np.finfo(float).tiny)
    phase = np.where(np.abs(val) > 0, val / np.where(np.abs(val) > 0, np.abs(val), 1.0), 1.0)
    phase[c == 0] = 1.0
    E = np.exp(1j * np.outer(x, c)) * phase[None, :]
    return from_matrix(np.full(size, spacing), np.full(size, 1.0 / (size * spacing)), E,
                       "radon-slice")[0]


def discretize_gft(source: str, size: int = 32, **params) -> DiscreteGFT:
    if source == "fourier":
        return fourier_gft(size)
    if source == "sphere":
        return sphere_gft(params.get("L", size), params.get("rho", 0.0))
    if source == "radon-slice":
        return radon_slice_gft(size, params.get("spacing", 1.0), params.get("kernel"))
    raise DomainError(f"source must be one of {SOURCES}")


def translation_operator(G: DiscreteGFT, y: int) -> LinearOperator:
    """``R^y = F^-1 diag(conj e(y, .)) F`` as a linear operator on ``C^N``."""
    N = G.shape[0]
    if not 0 <= y < N:
        raise DomainError("y must index a node of X")
    sym = G.E[y].conj()

    def mv(f):
        g = G.forward(f)
        return G.inverse(sym[:, None] * g if np.ndim(g) == 2 else sym * g)

    return LinearOperator((N, N), matvec=mv, matmat=mv, dtype=complex)


def operator_matrix(op: LinearOperator) -> np.ndarray:
    return op.matmat(np.eye(op.shape[1], dtype=complex))


def commutativity_defect(G: DiscreteGFT, y: int, z: int) -> float:
    if y == z:
        return 0.0
    A = operator_matrix(translation_operator(G, y))
    B = operator_matrix(translation_operator(G, z))
    return float(np.linalg.norm(A @ B - B @ A, 2))


def symbol(G: DiscreteGFT, mu) -> np.ndarray:
    """``sigma_mu(chi) = sum_x mu(x) conj(e(x, chi))``."""
    return G.E.conj().T @ np.asarray(mu, dtype=complex)


def measure(G: DiscreteGFT, sigma) -> np.ndarray:
    """Inverse of :func:`symbol` on its range: ``mu(x) = w_x sum_chi sigma e(x, chi) w_chi``."""
    return G.x_weights * (G.E @ (G.chi_weights * np.asarray(sigma, dtype=complex)))


def point_mass(G: DiscreteGFT, y: int) -> np.ndarray:
    mu = np.zeros(G.shape[0], complex)
    mu[y] = 1.0
    return mu


def convolve(G: DiscreteGFT, mu, nu) -> np.ndarray:
    return measure(G, symbol(G, mu) * symbol(G, nu))


def delsarte_associativity_defect(G: DiscreteGFT, x: int, y: int, z: int) -> float:
    """``sum |((d_x * d_y) * d_z) - (d_x * (d_y * d_z))|`` over the nodes."""
    dx, dy, dz = (point_mass(G, i) for i in (x, y, z))
    left = convolve(G, convolve(G, dx, dy), dz)
    right = convolve(G, dx, convolve(G, dy, dz))
    return float(np.sum(np.abs(left - right)))


def symbol_product_defect(G: DiscreteGFT, y: int, z: int) -> float:
    """Distance of ``F R^y R^z F^-1`` from ``diag(conj e(y, .) conj e(z, .))``."""
    RyRz = operator_matrix(translation_operator(G, y)) @ operator_matrix(translation_operator(G, z))
    M = G.forward(RyRz @ G.inverse(np.eye(G.shape[1], dtype=complex)))
    target = np.diag(G.E[y].conj() * G.E[z].conj())
    return float(np.linalg.norm(M - target, 2))


def neutral_node(G: DiscreteGFT, tol: float = 1e-12):
    """Index of a node with ``e(y, .) == 1``, or ``None``."""
    hit = np.where(np.all(np.abs(G.E - 1.0) <= tol, axis=1))[0]
    return int(hit[0]) if len(hit) else None


def dual(G: DiscreteGFT) -> DiscreteGFT:
    """Swap the roles of ``X`` and ``X^``; ``e^(chi, x) = conj(e(x, chi))``."""
    return DiscreteGFT(G.chi_weights, G.x_weights, G.E.conj().T, G.tag, not G.dualized)
