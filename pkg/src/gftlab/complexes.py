"""Complexes of lines in R^n and C^n and the transforms they carry.

A line complex is ``y = u(t) x + alpha`` with ``x`` scalar, ``y, alpha`` in
``R^(n-1)`` (or ``C^(n-1)``) and ``u = (u_1, ..., u_{n-1})`` polynomial in
``t``.  The plane transform integrates ``f(x, y)`` along each line; ``J_a``
convolves the result in ``alpha`` with ``a(s, t)``.  With the unitary
transforms of :mod:`gftlab.core` the slice relation reads

    phi^(xi, t) = sqrt(2 pi) f^(-xi.u(t), xi) a~(-xi, t)

which both the forward map and the inverse below are built on.

Polynomials are stored as ascending coefficient tuples.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.interpolate import CubicSpline

from .core import GridFunction, Spectrum, dft_forward, dft_inverse, transform_axes
from .errors import (ConsistencyError, DegenerateError, DomainError, HypothesisError,
                     ShapeError)
from .multipliers import FIELDS

INFINITE = math.inf
KERNEL_FAMILIES = ("delta", "example", "power")


def _trim(coef):
    coef = list(coef)
    while len(coef) > 1 and coef[-1] == 0:
        coef.pop()
    return tuple(coef)


def _poly_add(a, b):
    m = max(len(a), len(b))
    return _trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(m)])


def _poly_deriv(c):
    return _trim([i * c[i] for i in range(1, len(c))] or [0])


@dataclass(frozen=True)
class LineComplex:
    """Lines ``y = u(t) x + alpha``; ``t`` ranges over ``window`` (real) or a disc (complex)."""

    u: tuple
    field: str = "real"
    window: tuple = (-math.inf, math.inf)
    radius: float = math.inf

    def __post_init__(self):
        if self.field not in FIELDS:
            raise ValueError(f"field must be one of {FIELDS}")
        u = tuple(_trim(c) for c in self.u)
        if not u:
            raise DomainError("a line complex needs n >= 2")
        if all(len(c) == 1 for c in u):
            raise DegenerateError("u'(t) vanishes identically; the map t -> u(t) is singular")
        lo, hi = (float(w) for w in self.window)
        if not lo < hi:
            raise DomainError("empty parameter window")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "window", (lo, hi))

    @property
    def n(self) -> int:
        return len(self.u) + 1

    @property
    def degree(self) -> int:
        return max(len(c) for c in self.u) - 1

    def u_prime(self) -> tuple:
        return tuple(_poly_deriv(c) for c in self.u)

    def evaluate(self, t) -> np.ndarray:
        """``u(t)`` with shape ``t.shape + (n - 1,)``."""
        t = np.asarray(t)
        return np.stack([np.polynomial.polynomial.polyval(t, c) for c in self.u], axis=-1)

    def phase_poly(self, xi, eta=0):
        """Ascending coefficients of ``xi . u(t) + eta`` (exact for rational input)."""
        if len(xi) != len(self.u):
            raise ShapeError(f"xi must have {len(self.u)} components")
        out = (eta,)
        for x, c in zip(xi, self.u):
            out = _poly_add(out, [x * ci for ci in c])
        return out

    def to_json(self) -> str:
        def enc(v):
            v = complex(v)
            return [v.real, v.imag] if self.field == "complex" else v.real

        return json.dumps({"field": self.field, "n": self.n,
                           "u": [[enc(ci) for ci in c] for c in self.u],
                           "window": list(self.window), "radius": self.radius})

    @classmethod
    def from_json(cls, text):
        d = json.loads(text) if isinstance(text, str) else dict(text)
        fld = d.get("field", "real")

        def dec(v):
            return complex(v[0], v[1]) if isinstance(v, (list, tuple)) else v

        u = tuple(tuple(dec(ci) for ci in c) for c in d["u"])
        if "n" in d and d["n"] != len(u) + 1:
            raise ShapeError("n does not match the number of polynomials")
        return cls(u, fld, tuple(d.get("window", (-math.inf, math.inf))),
                   float(d.get("radius", math.inf)))


def linear_complex(c, window=(-math.inf, math.inf), field="real") -> LineComplex:
    """``u_i(t) = c_i t``."""
    return LineComplex(tuple((0, ci) for ci in c), field, window)


def moment_curve(n: int, window=(-math.inf, math.inf), field="real") -> LineComplex:
    """``u(t) = (t, t^2, ..., t^(n-1))``."""
    return LineComplex(tuple((0,) * i + (1,) for i in range(1, n)), field, window)


# --- exact root counting -----------------------------------------------------

def _to_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    v = float(v)
    if not math.isfinite(v):
        raise DomainError("non-finite coefficient")
    return Fraction(v)


def _integer_poly(coef):
    """Scale rational coefficients to coprime integers (ascending order kept)."""
    fr = [_to_fraction(c) for c in coef]
    den = 1
    for f in fr:
        den = den * f.denominator // math.gcd(den, f.denominator)
    ints = [int(f * den) for f in fr]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    return _trim([v // g for v in ints] if g else ints)


def _poly_rem(a, b):
    """Remainder of ``a / b`` over Q (ascending coefficients)."""
    a = [Fraction(x) for x in a]
    db = len(b) - 1
    lead = Fraction(b[-1])
    while len(a) - 1 >= db and any(a):
        k = len(a) - 1 - db
        q = a[-1] / lead
        for i in range(len(b)):
            a[i + k] -= q * b[i]
        a.pop()
        a = list(_trim(a)) if a else [Fraction(0)]
        if len(a) - 1 < db:
            break
    return _trim(a)


def _sturm_chain(p):
    chain = [tuple(Fraction(c) for c in p), tuple(Fraction(c) for c in _poly_deriv(p))]
    while len(chain[-1]) > 1 or chain[-1][0] != 0:
        r = _poly_rem(chain[-2], chain[-1])
        if len(r) == 1 and r[0] == 0:
            break
        chain.append(tuple(-c for c in r))
        if len(r) == 1:
            break
    return chain


def _sign_at(p, x):
    if x == math.inf or x == -math.inf:
        deg = len(p) - 1
        s = 1 if p[-1] > 0 else -1
        return s if (x > 0 or deg % 2 == 0) else -s
    v = sum(c * x ** i for i, c in enumerate(p))
    return (v > 0) - (v < 0)


def _variations(chain, x):
    signs = [s for s in (_sign_at(p, x) for p in chain) if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_real_roots(coef, lo=-math.inf, hi=math.inf) -> int:
    """Distinct real roots of a nonzero polynomial in ``(lo, hi]`` by a Sturm chain."""
    p = _integer_poly(coef)
    if len(p) == 1:
        if p[0] == 0:
            raise DegenerateError("zero polynomial")
        return 0
    lo = lo if math.isinf(lo) else Fraction(lo)
    hi = hi if math.isinf(hi) else Fraction(hi)
    chain = _sturm_chain(p)
    return _variations(chain, lo) - _variations(chain, hi)


def count_complex_roots(coef) -> int:
    """Distinct complex roots: ``deg P - deg gcd(P, P')``."""
    import sympy

    t = sympy.Symbol("t")

    def rat(v):
        v = complex(v)
        return sympy.Rational(Fraction(v.real)) + sympy.I * sympy.Rational(Fraction(v.imag))

    expr = sum(rat(c) * t ** i for i, c in enumerate(coef))
    poly = sympy.Poly(expr, t, domain="QQ_I")
    if poly.is_zero:
        raise DegenerateError("zero polynomial")
    g = sympy.gcd(poly, poly.diff(t))
    return poly.degree() - g.degree()


def crofton_function(K: LineComplex, eta, xi):
    """Number of parameters ``t`` with ``eta = -xi . u(t)``; ``INFINITE`` if that holds for every ``t``."""
    xi = tuple(xi)
    if all(x == 0 for x in xi):
        raise DomainError("xi must be nonzero")
    p = K.phase_poly(xi, eta)
    if len(p) == 1:
        return INFINITE if p[0] == 0 else 0
    if K.field == "real":
        return count_real_roots(p, *K.window)
    return count_complex_roots(p)


def crofton_number(K: LineComplex, samples: int = 64, rng=None) -> int:
    """Almost-everywhere value of the complex Crofton function, by random sampling."""
    if K.field != "complex":
        raise DomainError("the Crofton number is defined for complex-field complexes")
    rng = np.random.default_rng(0) if rng is None else rng
    counts = set()
    for _ in range(samples):
        z = rng.standard_normal((K.n, 2)) @ np.array([1.0, 1j])
        counts.add(crofton_function(K, z[0], tuple(z[1:])))
    if len(counts) != 1:
        raise ConsistencyError(f"Crofton samples disagree: {sorted(counts)}")
    return counts.pop()


def omega_jacobian(K: LineComplex, xi, t):
    """``d/dt (xi . u(t))``; broadcasts ``xi[..., n-1]`` against ``t``."""
    xi = np.asarray(xi)
    t = np.asarray(t)
    up = K.u_prime()
    return sum(xi[..., i] * np.polynomial.polynomial.polyval(t, up[i]) for i in range(len(up)))


# --- kernels -----------------------------------------------------------------

@dataclass(frozen=True)
class ComplexKernel:
    """``a~(xi, t)`` in closed form.

    ``delta``: 1.  ``example``: ``|omega(xi, t)|^(e + i rho)`` with ``e = 1/2``
    (real field) or ``1`` (complex field).  ``power``: the complex-field family
    ``Cr^(-1/2) omega(xi, t) prod_p xi_p^lam_p conj(xi_p)^(-lam_p)``.
    """

    family: str = "delta"
    field: str = "real"
    rho: float = 0.0
    lambdas: tuple = ()
    crofton: int = 1
    checked: bool = True

    def __post_init__(self):
        if self.family not in KERNEL_FAMILIES:
            raise ValueError(f"kernel family must be one of {KERNEL_FAMILIES}")
        if self.family == "power" and self.field != "complex":
            raise DomainError("the power family is a complex-field kernel")
        object.__setattr__(self, "lambdas", tuple(complex(v) for v in self.lambdas))

    def __call__(self, K: LineComplex, xi, t):
        xi = np.asarray(xi)
        t = np.asarray(t)
        shape = np.broadcast_shapes(xi.shape[:-1], t.shape)
        if self.family == "delta":
            return np.ones(shape, complex)
        w = omega_jacobian(K, xi, t)
        if self.family == "example":
            e = 0.5 if self.field == "real" else 1.0
            mod = np.abs(w)
            with np.errstate(divide="ignore"):
                logm = np.log(np.where(mod > 0, mod, 1.0))
            return np.where(mod > 0, np.exp((e + 1j * self.rho) * logm), 0.0) + 0j
        if len(self.lambdas) != K.n - 1:
            raise ShapeError("one exponent per xi component is required")
        out = np.broadcast_to(w / math.sqrt(self.crofton), shape).astype(complex)
        for p, lam in enumerate(self.lambdas):
            out = out * np.exp(2j * lam * np.angle(xi[..., p]))
        return out

    def to_json(self) -> str:
        return json.dumps({"family": self.family, "field": self.field, "rho": self.rho,
                           "lambdas": [[v.real, v.imag] for v in self.lambdas],
                           "crofton": self.crofton})

    @classmethod
    def from_json(cls, text):
        d = json.loads(text) if isinstance(text, str) else dict(text)
        lams = tuple(complex(*v) if isinstance(v, (list, tuple)) else v
                     for v in d.get("lambdas", ()))
        return cls(d.get("family", "delta"), d.get("field", "real"), float(d.get("rho", 0.0)),
                   lams, int(d.get("crofton", 1)))


def _random_frequencies(K: LineComplex, count: int, rng):
    if K.field == "real":
        return rng.standard_normal(count), rng.standard_normal((count, K.n - 1))
    z = rng.standard_normal((count, K.n, 2)) @ np.array([1.0, 1j])
    return z[:, 0], z[:, 1:]


def build_example_kernel(K: LineComplex, rho: float = 0.0, *, strict: bool = True,
                         samples: int = 64, rng=None) -> ComplexKernel:
    """``a~(xi, t) = |sum_i u_i'(t) xi_i|^(1/2 + i rho)``, which needs ``Cr_K == 1``.

    With ``strict=False`` the Crofton hypothesis is not enforced; the kernel
    is then still invertible (it is nonzero almost everywhere) but need not
    be unitary.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    if strict:
        etas, xis = _random_frequencies(K, samples, rng)
        for eta, xi in zip(etas, xis):
            c = crofton_function(K, eta, tuple(xi))
            if c != 1:
                raise HypothesisError(f"Crofton function takes the value {c}, not 1")
    return ComplexKernel("example", K.field, float(rho), checked=strict)


def default_condition_samples(K: LineComplex, count: int = 256, rng=None):
    """Random ``(xi, t)`` pairs with ``t`` inside the window (clipped to [-4, 4])."""
    rng = np.random.default_rng(1) if rng is None else rng
    _, xi = _random_frequencies(K, count, rng)
    if K.field == "real":
        lo, hi = max(K.window[0], -4.0), min(K.window[1], 4.0)
        t = rng.uniform(lo, hi, count)
    else:
        t = rng.standard_normal((count, 2)) @ np.array([1.0, 1j])
    return xi, t


def gft_condition_defect(K: LineComplex, a: ComplexKernel, samples=None) -> float:
    """Largest normalised violation of the unitarity condition on ``|a~|``.

    real: ``| |a~| - Cr^(-1/2) |omega|^(1/2) | / (1 + |omega|^(1/2))`` with the
    Crofton function at ``(-xi.u(t), xi)``; complex: exponent 1 and the
    Crofton number.
    """
    xi, t = default_condition_samples(K) if samples is None else samples
    xi = np.atleast_2d(np.asarray(xi))
    t = np.atleast_1d(np.asarray(t))
    w = np.abs(omega_jacobian(K, xi, t))
    amp = np.abs(a(K, xi, t))
    if K.field == "complex":
        cr = np.full(len(t), float(crofton_number(K)))
        target, norm = w / np.sqrt(cr), 1.0 + w
    else:
        eta = -np.sum(xi * K.evaluate(t), axis=-1)
        cr = np.array([crofton_function(K, e, tuple(x)) for e, x in zip(eta, xi)], dtype=float)
        if np.any(cr == 0) or np.any(np.isinf(cr)):
            raise DegenerateError("Crofton function is zero or infinite at a sample")
        target, norm = np.sqrt(w / cr), 1.0 + np.sqrt(w)
    return float(np.max(np.abs(amp - target) / norm))


# --- plane-family data -------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PlaneFamilyFunction:
    """``phi(alpha, t)``: ``samples[j]`` lives on the alpha grid at ``t[j]``.

    The alpha grid coincides with the ``y`` part of the source grid, whose full
    geometry (``source_dims``, ...) is kept so the inverse can rebuild it.
    """

    source_dims: tuple
    source_spacing: tuple
    source_origin: tuple
    t: np.ndarray
    samples: np.ndarray
    valid: np.ndarray
    convention: str = "centered"

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        s = np.asarray(self.samples, dtype=complex)
        if t.ndim != 1 or np.any(np.diff(t) <= 0):
            raise ShapeError("t must be a strictly increasing 1-D grid")
        if s.shape != (len(t),) + tuple(self.source_dims[1:]):
            raise ShapeError("samples must have shape (len(t),) + alpha dims")
        v = np.asarray(self.valid, dtype=bool)
        for arr in (t, s, v):
            arr.setflags(write=False)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "samples", s)
        object.__setattr__(self, "valid", v)

    @property
    def alpha_spacing(self) -> tuple:
        return tuple(self.source_spacing[1:])

    @property
    def alpha_origin(self) -> tuple:
        return tuple(self.source_origin[1:])

    def with_samples(self, samples) -> "PlaneFamilyFunction":
        return PlaneFamilyFunction(self.source_dims, self.source_spacing, self.source_origin,
                                   self.t, samples, self.valid, self.convention)

    def source_grid(self) -> GridFunction:
        return GridFunction(self.source_dims, self.source_spacing, self.source_origin,
                            np.zeros(self.source_dims, complex), self.convention)

    def alpha_spectrum(self) -> np.ndarray:
        """Unitary DFT over alpha for every ``t``, shape ``(T,) + alpha dims``."""
        l = len(self.source_dims) - 1
        return transform_axes(self.samples, (1.0,) + self.alpha_spacing,
                              (0.0,) + self.alpha_origin, self.convention, range(1, l + 1))


def sinh_t_grid(count: int, t_scale: float = 0.5, v_max: float = 5.0) -> np.ndarray:
    """``t = t_scale sinh(v)`` on a uniform ``v`` grid; dense near 0, reaching far out."""
    if count < 4:
        raise DomainError("need at least four t samples")
    v = np.linspace(-v_max, v_max, count)
    return t_scale * np.sinh(v)


def _trapezoid_weights(t):
    w = np.zeros_like(t)
    d = np.diff(t)
    w[:-1] += d / 2
    w[1:] += d / 2
    return w


def _xi_mesh(grid) -> np.ndarray:
    """Frequencies dual to the ``y`` axes, shape ``alpha dims + (n - 1,)``."""
    spec = Spectrum(grid.dims, grid.spacing, grid.origin, np.zeros(grid.dims), grid.convention)
    axes = [spec.axis(i) for i in range(1, grid.ndim)]
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)


def _check_real_pipeline(K: LineComplex, grid):
    if K.field != "real":
        raise DomainError("the numerical pipeline is implemented for the real field")
    if grid.ndim != K.n or K.n not in (2, 3):
        raise ShapeError("grid dimension must equal n, with n in {2, 3}")


def forward_Ja(f: GridFunction, K: LineComplex, a: ComplexKernel | None = None,
               t=None) -> PlaneFamilyFunction:
    """``J_a f`` sampled at ``t`` (default: 256-point sinh grid clipped to the window)."""
    _check_real_pipeline(K, f)
    a = ComplexKernel() if a is None else a
    if t is None:
        t = sinh_t_grid(256)
        t = t[(t >= K.window[0]) & (t <= K.window[1])]
    t = np.asarray(t, dtype=float)
    if t.min() < K.window[0] or t.max() > K.window[1]:
        raise DomainError("t samples must lie inside the parameter window")
    l = K.n - 1
    g = transform_axes(f.samples, f.spacing, f.origin, f.convention, range(1, l + 1))
    x = f.axis(0)
    xi = _xi_mesh(f)
    uvals = K.evaluate(t)                        # (T, l)
    out = np.empty((len(t),) + f.dims[1:], complex)
    for j in range(len(t)):
        P = xi @ uvals[j]                        # alpha dims
        kern = np.exp(-1j * np.multiply.outer(x, P))
        spec = np.einsum("i...,i...->...", g, kern) * f.spacing[0]
        out[j] = spec * a(K, -xi, t[j])
    phi = transform_axes(out, (1.0,) + f.spacing[1:], (0.0,) + f.origin[1:], f.convention,
                         range(1, l + 1), inverse=True)
    half_x = max(abs(x[0]), abs(x[-1]))
    half_y = np.array([max(abs(f.axis(i)[0]), abs(f.axis(i)[-1])) for i in range(1, K.n)])
    valid = np.all(np.abs(uvals) * half_x <= half_y, axis=1)
    return PlaneFamilyFunction(f.dims, f.spacing, f.origin, t, phi, valid, f.convention)


def _interp_spectrum_eta(f: GridFunction, pad: int = 4):
    """``f^`` on a ``pad``-times finer grid in the first frequency axis, as splines in eta."""
    n0 = f.dims[0]
    big = n0 * pad
    samples = np.zeros((big,) + f.dims[1:], complex)
    start = (big - n0) // 2
    samples[start:start + n0] = f.samples
    origin = (f.origin[0] - start * f.spacing[0],) + f.origin[1:]
    padded = GridFunction((big,) + f.dims[1:], f.spacing, origin, samples, f.convention)
    spec = dft_forward(padded)
    return spec.axis(0), spec.samples


def fourier_slice_defect(f: GridFunction, K: LineComplex, a: ComplexKernel | None = None,
                         t=None, pad: int = 4) -> float:
    """``max |phi^ - sqrt(2 pi) f^(-xi.u, xi) a~(-xi, t)| / max |rhs|`` over sampled ``(xi, t)``.

    The left side comes from :func:`forward_Ja`; the right side from a
    zero-padded full DFT of ``f`` interpolated in ``eta`` with cubic splines.
    Pairs whose ``eta`` leaves the grid's frequency band are skipped.
    """
    a = ComplexKernel() if a is None else a
    phi = forward_Ja(f, K, a, t)
    lhs = phi.alpha_spectrum()
    eta_axis, fhat = _interp_spectrum_eta(f, pad)
    spline = CubicSpline(eta_axis, fhat, axis=0)
    xi = _xi_mesh(f)
    eta_max = -f.dims[0] // 2 * (2 * math.pi / (f.dims[0] * f.spacing[0]))
    eta_max = abs(eta_max)
    worst, scale = 0.0, 0.0
    idx = np.indices(f.dims[1:]).reshape(len(f.dims) - 1, -1).T
    for j, tj in enumerate(phi.t):
        eta = -(xi @ K.evaluate(tj))
        ok = np.abs(eta) <= eta_max
        if not np.any(ok):
            continue
        vals = spline(eta[ok])                  # (m,) + alpha dims, pick diagonal
        sel = idx[ok.reshape(-1)]
        picked = vals[(np.arange(len(sel)),) + tuple(sel.T)]
        rhs = math.sqrt(2 * math.pi) * picked * a(K, -xi[ok], tj)
        worst = max(worst, float(np.max(np.abs(lhs[j][ok] - rhs))))
        scale = max(scale, float(np.max(np.abs(rhs))))
    if scale == 0.0:
        return 0.0 if worst == 0.0 else math.inf
    return worst / scale


# --- inversion ---------------------------------------------------------------

def _monotone_pieces(coef, lo, hi):
    """Breakpoints of ``[lo, hi]`` at the real critical points of the polynomial."""
    d = np.polynomial.polynomial.polyder(coef)
    pts = []
    if len(d) > 1 and np.any(d[1:] != 0):
        r = np.polynomial.polynomial.polyroots(np.trim_zeros(d, "b"))
        pts = sorted(float(z.real) for z in r if abs(z.imag) < 1e-12 and lo < z.real < hi)
    return [lo] + pts + [hi]


def _roots_on_pieces(coef, targets, lo, hi, iters: int = 200, tol: float = 1e-12):
    """Roots ``t`` of ``poly(t) = target`` in ``[lo, hi]`` for each target.

    Returns a list (one entry per monotone piece) of arrays with NaN where the
    piece has no root.
    """
    pv = np.polynomial.polynomial.polyval
    edges = _monotone_pieces(coef, lo, hi)
    out = []
    for a, b in zip(edges[:-1], edges[1:]):
        pa, pb = pv(a, coef), pv(b, coef)
        inc = pb >= pa
        low, high = (pa, pb) if inc else (pb, pa)
        has = (targets >= low) & (targets <= high)
        # half-open pieces so a critical value is counted once
        if b != hi:
            has &= targets != pb
        ta = np.full(targets.shape, a)
        tb = np.full(targets.shape, b)
        for _ in range(iters):
            mid = 0.5 * (ta + tb)
            above = (pv(mid, coef) >= targets) == inc
            tb = np.where(above, mid, tb)
            ta = np.where(above, ta, mid)
            if np.max(tb - ta) <= tol * max(1.0, abs(a), abs(b)):
                break
        out.append(np.where(has, 0.5 * (ta + tb), np.nan))
    return out


@dataclass(frozen=True, eq=False)
class Reconstruction:
    """Inverse output with the frequency bookkeeping needed to judge it."""

    f: GridFunction
    missing: np.ndarray
    missing_fraction: float
    window_loss_fraction: float
    root_counts: np.ndarray


def _per_xi_roots(K, xi_vec, etas, lo, hi):
    """In-window roots of ``xi.u(t) = -eta``; returns a list of arrays over pieces."""
    coef = np.array(K.phase_poly(tuple(float(v) for v in xi_vec), 0), dtype=float)
    if len(coef) == 1:
        return None
    return _roots_on_pieces(coef, -etas, lo, hi)


def _total_roots(K, xi_vec, etas):
    """Real root count over all of R for each eta (float arithmetic, for bookkeeping)."""
    coef = np.array(K.phase_poly(tuple(float(v) for v in xi_vec), 0), dtype=float)
    span = np.max(np.abs(np.polynomial.polynomial.polyroots(coef[1:]) if len(coef) > 2 else [0.0]))
    big = 1e6 * (1.0 + span)
    pieces = _roots_on_pieces(coef, -etas, -big, big, iters=0)
    return sum((~np.isnan(p)).astype(int) for p in pieces)


def invert_Ja(phi: PlaneFamilyFunction, K: LineComplex, a: ComplexKernel | None = None
              ) -> Reconstruction:
    """Fourier-domain inverse of :func:`forward_Ja`.

    For every output frequency ``(eta, xi)`` the in-window roots ``t_r`` of
    ``xi.u(t) = -eta`` are found by bisection on monotone pieces; the slice
    relation is solved for ``f^`` at each root (cubic-spline interpolation of
    ``phi^`` in ``t``) and the values are averaged.  Frequencies without an
    in-window root are zero-filled and flagged in ``missing``.
    """
    a = ComplexKernel() if a is None else a
    grid = phi.source_grid()
    _check_real_pipeline(K, grid)
    t = phi.t
    lo, hi = float(t[0]), float(t[-1])
    spec_grid = Spectrum(grid.dims, grid.spacing, grid.origin, np.zeros(grid.dims), grid.convention)
    etas = spec_grid.axis(0)
    xi = _xi_mesh(grid)
    l = K.n - 1
    ph = phi.alpha_spectrum()
    fhat = np.zeros(grid.dims, complex)
    missing = np.zeros(grid.dims, bool)
    counts = np.zeros(grid.dims, int)
    window_loss = 0
    root2pi = math.sqrt(2 * math.pi)
    for idx in np.ndindex(*grid.dims[1:]):
        xv = xi[idx]
        pieces = _per_xi_roots(K, xv, etas, lo, hi)
        sl = (slice(None),) + idx
        if pieces is None:
            missing[sl] = True
            continue
        at = a(K, -np.broadcast_to(xv, (len(t), l)), t)
        good = np.abs(at) > 0
        F = ph[sl][good] / (root2pi * at[good])
        spline = CubicSpline(t[good], F)
        total = np.zeros(len(etas), complex)
        cnt = np.zeros(len(etas), int)
        for roots in pieces:
            ok = ~np.isnan(roots)
            if np.any(ok):
                total[ok] += spline(roots[ok])
                cnt[ok] += 1
        have = cnt > 0
        fhat[sl][have] = total[have] / cnt[have]
        missing[sl] = ~have
        counts[sl] = cnt
        if not np.all(have):
            window_loss += int(np.sum(~have & (_total_roots(K, xv, etas) > 0)))
    f = dft_inverse(spec_grid.with_samples(fhat))
    size = missing.size
    return Reconstruction(f, missing, float(missing.sum() / size), window_loss / size, counts)


def complement_error(rec: Reconstruction, reference: GridFunction) -> float:
    """Relative L2 error restricted to frequencies outside the missing set."""
    ref = dft_forward(reference).samples
    got = dft_forward(rec.f).samples
    keep = ~rec.missing
    den = np.linalg.norm(ref[keep])
    return float(np.linalg.norm((got - ref)[keep]) / den) if den > 0 else 0.0


def missing_mass_fraction(rec: Reconstruction, reference: GridFunction) -> float:
    """Share of the reference spectral energy that falls on missing frequencies."""
    ref = np.abs(dft_forward(reference).samples) ** 2
    return float(ref[rec.missing].sum() / ref.sum())


def direct_inverse(phi: PlaneFamilyFunction, K: LineComplex, a: ComplexKernel | None = None
                   ) -> GridFunction:
    """Space-domain inversion: ``f(x, y) = (2 pi)^-n int phi(alpha, t) A(y - u(t) x - alpha, t)``.

    ``A(s, t) = int |omega(xi, t)| / (Cr(-xi.u(t), xi) a~(xi, t)) exp(i <s, xi>) dxi``
    is summed directly over the frequency grid, the alpha integral is a
    Riemann sum and the t integral a trapezoid rule.  ``Cr`` counts roots in
    the window, and ``t`` with ``|xi.u(t)|`` beyond the Nyquist band of the
    ``x`` axis are dropped.  Cost is ``O(N^n * N^(n-1) * T)``: for coarse grids only.
    """
    a = ComplexKernel() if a is None else a
    grid = phi.source_grid()
    _check_real_pipeline(K, grid)
    n, l = K.n, K.n - 1
    t = phi.t
    wt = _trapezoid_weights(t)
    xi = _xi_mesh(grid).reshape(-1, l)
    dxi = math.prod(2 * math.pi / (grid.dims[i] * grid.spacing[i]) for i in range(1, n))
    dalpha = math.prod(grid.spacing[1:])
    alpha = np.stack([m.reshape(-1) for m in np.meshgrid(
        *(grid.axis(i) for i in range(1, n)), indexing="ij")], axis=-1)
    nyq = math.pi / grid.spacing[0]
    coords = np.stack([m.reshape(-1) for m in grid.mesh()], axis=-1)   # (M, n)
    x, y = coords[:, 0], coords[:, 1:]
    lo, hi = float(t[0]), float(t[-1])
    # in-window Crofton count per (xi, t)
    uv = K.evaluate(t)
    P = xi @ uv.T                                   # (Q, T)
    cr = np.zeros_like(P)
    for q in range(len(xi)):
        pieces = _per_xi_roots(K, xi[q], -P[q], lo, hi)
        if pieces is not None:
            cr[q] = sum((~np.isnan(p)).astype(float) for p in pieces)
    out = np.zeros(len(coords), complex)
    phase_a = np.exp(-1j * alpha @ xi.T)            # (A, Q)
    for j in range(len(t)):
        C = phi.samples[j].reshape(-1) @ phase_a * dalpha
        at = a(K, xi, t[j])
        w = np.abs(omega_jacobian(K, xi, t[j]))
        ok = (cr[:, j] > 0) & (np.abs(at) > 0) & (np.abs(P[:, j]) <= nyq)
        B = np.zeros(len(xi), complex)
        B[ok] = w[ok] / (cr[ok, j] * at[ok])
        s = y - np.multiply.outer(x, uv[j])          # (M, l)
        out += wt[j] * (np.exp(1j * s @ xi.T) @ (B * C)) * dxi
    out *= (2 * math.pi) ** (-n)
    return grid.with_samples(out.reshape(grid.dims))
