"""Generalized Radon transforms over hyperplanes ``x_n = a_1 x_1 + ... + a_{n-1} x_{n-1} + a_n``.

Hyperplanes are addressed by the slope vector ``a' = (a_1, ..., a_{n-1})``
and the offset ``a_n``.  For each slope the offset axis is sampled with
spacing ``h * sqrt(1 + |a'|^2)`` so that the sampling density in the normal
direction matches the source grid; vertical hyperplanes are never sampled.

All line and plane integrals are evaluated spectrally: the offset-axis
Fourier transform of the hyperplane data at slope ``a'`` is the source
spectrum along the ray ``(-a' c, c)``, which is summed directly from the
grid samples (a non-uniform DFT).  Interpolation error is therefore that of
the trigonometric interpolant of the samples.

Real field: any ``n >= 2``.  Complex field: ``C^2`` realised as ``R^4`` with
axes ``(Re x1, Im x1, Re x2, Im x2)`` and pairing ``Re(z conj(w))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import roots_legendre

from .core import GridFunction, relative_l2
from .errors import DomainError, ShapeError
from .multipliers import MultiplierKernel, delta, eval_multiplier, inversion_multiplier

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True, eq=False)
class Chart:
    """Quadrature nodes and weights over slopes ``a'``.

    ``slopes`` has shape ``(S, n-1)`` (complex dtype for the complex field);
    ``weights`` approximate ``d a'`` (Lebesgue measure on R^(n-1) or C^(n-1)).
    """

    field: str
    n: int
    slopes: np.ndarray
    weights: np.ndarray
    kind: str
    slope_max: float | None = None

    def __post_init__(self):
        slopes = np.asarray(self.slopes)
        if slopes.ndim == 1:
            slopes = slopes[:, None]
        if slopes.shape[1] != self.n - 1:
            raise ShapeError("slope vectors must have n - 1 components")
        weights = np.asarray(self.weights, dtype=float)
        if weights.shape != (slopes.shape[0],):
            raise ShapeError("one weight per slope")
        slopes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "slopes", slopes)
        object.__setattr__(self, "weights", weights)

    @property
    def size(self) -> int:
        return self.slopes.shape[0]

    @property
    def stretch(self) -> np.ndarray:
        """``sqrt(1 + |a'|^2)`` per slope."""
        return np.sqrt(1.0 + np.sum(np.abs(self.slopes) ** 2, axis=1))

    def contains(self, slopes) -> bool:
        if self.slope_max is None:
            return True
        return bool(np.all(np.abs(np.asarray(slopes)) <= self.slope_max + 1e-12))


def uniform_chart(n: int, count: int, slope_max: float = 4.0, field: str = "real") -> Chart:
    """Midpoint tensor grid on ``|a_i| <= slope_max`` (each real/imag part for C).

    Hyperplanes steeper than ``slope_max`` are missing; the reconstruction
    then lacks a wedge of frequencies around the ``x'`` directions.
    """
    step = 2.0 * slope_max / count
    axis = -slope_max + step * (np.arange(count) + 0.5)
    if field == "real":
        grids = np.meshgrid(*([axis] * (n - 1)), indexing="ij")
        slopes = np.stack([g.ravel() for g in grids], axis=1)
        weights = np.full(slopes.shape[0], step ** (n - 1))
    else:
        if n != 2:
            raise DomainError("complex charts are implemented for n = 2 only")
        re, im = np.meshgrid(axis, axis, indexing="ij")
        slopes = (re + 1j * im).ravel()[:, None]
        weights = np.full(slopes.shape[0], step ** 2)
    return Chart(field, n, slopes, weights, "uniform", slope_max)


def tangent_chart(n: int, count, field: str = "real") -> Chart:
    """Slopes of hyperplanes whose unit normals follow a sphere quadrature.

    ``n = 2``: ``a = tan(theta)`` with ``count`` midpoint angles in ``(-pi/2, pi/2)``.
    ``n = 3``: ``count = (rings, azimuths)``; Gauss-Legendre rings in the
    normal's last component times a uniform azimuth rule.
    complex ``n = 2``: the same ``(rings, azimuths)`` rule on the Riemann
    sphere of complex slopes.
    Weights include the gnomonic Jacobian so they integrate ``d a'``.
    """
    if field == "real" and n == 2:
        count = int(count)
        dtheta = math.pi / count
        theta = -math.pi / 2 + dtheta * (np.arange(count) + 0.5)
        slopes = np.tan(theta)[:, None]
        weights = dtheta / np.cos(theta) ** 2
        return Chart(field, n, slopes, weights, "tangent")
    rings, az = (count, 2 * count) if np.isscalar(count) else count
    psi = TWO_PI * (np.arange(az) + 0.5) / az
    if field == "real" and n == 3:
        z, wz = roots_legendre(2 * rings)
        keep = z > 0
        z, wz = z[keep], wz[keep]
        r = np.sqrt(1.0 - z ** 2)
        nu3 = np.repeat(z, az)
        nu1 = np.outer(r, np.cos(psi)).ravel()
        nu2 = np.outer(r, np.sin(psi)).ravel()
        slopes = np.stack([-nu1 / nu3, -nu2 / nu3], axis=1)
        weights = np.repeat(wz, az) * (TWO_PI / az) / nu3 ** 3
        return Chart(field, n, slopes, weights, "tangent")
    if field == "complex" and n == 2:
        z, wz = roots_legendre(rings)
        mod = np.sqrt((1.0 - z) / (1.0 + z))
        slopes = (np.outer(mod, np.ones(az)) * np.exp(1j * psi)[None, :]).ravel()[:, None]
        weights = np.repeat(wz / (1.0 + z) ** 2, az) * (TWO_PI / az)
        return Chart(field, n, slopes, weights, "tangent")
    raise DomainError(f"no tangent chart for field={field!r}, n={n}")


@dataclass(frozen=True, eq=False)
class HyperplaneFunction:
    """Samples ``phi(a', a_n)`` over a :class:`Chart`.

    ``samples`` has shape ``(S, M)`` (real field) or ``(S, M, M)`` (complex
    field, offset in C realised as two real axes).  Offsets for slope ``s``
    are ``(k - M // 2) * base_spacing * chart.stretch[s]``.
    """

    chart: Chart
    offset_count: int
    base_spacing: float
    samples: np.ndarray
    warning: str | None = None

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=complex)
        off_dims = 1 if self.chart.field == "real" else 2
        expect = (self.chart.size,) + (self.offset_count,) * off_dims
        if samples.shape != expect:
            raise ShapeError(f"samples have shape {samples.shape}, expected {expect}")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    @property
    def field(self) -> str:
        return self.chart.field

    @property
    def n(self) -> int:
        return self.chart.n

    @property
    def offset_spacing(self) -> np.ndarray:
        return self.base_spacing * self.chart.stretch

    def offsets(self, s: int) -> np.ndarray:
        m = self.offset_count
        return (np.arange(m) - m // 2) * self.offset_spacing[s]

    def frequencies(self, s: int) -> np.ndarray:
        m = self.offset_count
        return (np.arange(m) - m // 2) * (TWO_PI / (m * self.offset_spacing[s]))

    def with_samples(self, samples, warning=None) -> "HyperplaneFunction":
        return HyperplaneFunction(self.chart, self.offset_count, self.base_spacing,
                                  samples, warning if warning is not None else self.warning)

    def same_geometry(self, other) -> bool:
        return (self.chart is other.chart or (
            self.chart.field == other.chart.field
            and np.array_equal(self.chart.slopes, other.chart.slopes)
            and np.array_equal(self.chart.weights, other.chart.weights))
        ) and self.offset_count == other.offset_count and \
            self.base_spacing == other.base_spacing

    @property
    def measure_constant(self) -> float:
        kappa = 1 if self.field == "real" else 2
        return TWO_PI ** (-kappa * (self.n - 1))

    def inner(self, other) -> complex:
        """Quadrature of ``int phi conj(psi) da`` normalised by ``(2 pi)^(-kappa (n-1))``."""
        if not isinstance(other, HyperplaneFunction) or not self.same_geometry(other):
            raise ShapeError("inner product needs identical charts")
        axes = tuple(range(1, self.samples.ndim))
        per_slope = np.sum(self.samples * np.conj(other.samples), axis=axes)
        dim = self.samples.ndim - 1
        cell = self.offset_spacing ** dim
        return complex(self.measure_constant * np.sum(self.chart.weights * cell * per_slope))

    def norm(self) -> float:
        return math.sqrt(max(self.inner(self).real, 0.0))


# --- offset-axis DFT (fft convention: zero offset at index M // 2) -----------

def _offset_forward(samples, spacing, axes):
    """Unitary DFT along ``axes`` (exp(+i s c)); spacing per leading slope index."""
    out = np.array(samples, dtype=complex)
    for ax in axes:
        out = np.fft.ifftshift(out, axes=ax)
        out = np.fft.ifft(out, axis=ax, norm="forward")
        out = np.fft.fftshift(out, axes=ax)
    shape = (-1,) + (1,) * (out.ndim - 1)
    return out * ((spacing / math.sqrt(TWO_PI)) ** len(axes)).reshape(shape)


def _offset_inverse(spectrum, spacing, axes):
    out = np.array(spectrum, dtype=complex)
    for ax in axes:
        out = np.fft.ifftshift(out, axes=ax)
        out = np.fft.fft(out, axis=ax)
        out = np.fft.fftshift(out, axes=ax)
    m = out.shape[axes[0]]
    dc = TWO_PI / (m * spacing)
    shape = (-1,) + (1,) * (out.ndim - 1)
    return out * ((dc / math.sqrt(TWO_PI)) ** len(axes)).reshape(shape)


def _freq_axis(m, spacing):
    return (np.arange(m) - m // 2) * (TWO_PI / (m * spacing))


def default_offset_count(f: GridFunction, oversample: float = 1.0) -> int:
    """Offset samples covering the box diameter in the normal direction."""
    h = max(f.spacing)
    extent = math.sqrt(sum((n * s) ** 2 for n, s in zip(f.dims, f.spacing)))
    m = int(math.ceil(oversample * extent / h))
    return m + (m % 2)


def _group_by_stretch(chart):
    key = np.round(chart.stretch, 12)
    groups = {}
    for s, k in enumerate(key):
        groups.setdefault(k, []).append(s)
    return groups


def _check_grid(f: GridFunction, chart: Chart):
    d = f.ndim
    want = chart.n if chart.field == "real" else 2 * chart.n
    if d != want:
        raise ShapeError(f"{chart.field} chart with n={chart.n} needs a {want}-D grid")
    if not np.allclose(f.spacing, f.spacing[0], rtol=1e-12):
        raise ShapeError("hyperplane transforms need equal spacing on all axes")


# --- ray spectra --------------------------------------------------------------

def _ray_spectra_real(f: GridFunction, chart: Chart, m: int) -> np.ndarray:
    """``(2 pi)^((n-1)/2) f^(-a' c, c)`` on each slope's offset-frequency grid."""
    n = chart.n
    h = f.spacing[0]
    xs = [f.axis(i) for i in range(n)]
    vals = f.samples.reshape(-1, f.dims[-1])
    lead = f.dims[:-1]
    out = np.zeros((chart.size, m), complex)
    scale = h ** n / math.sqrt(TWO_PI)
    for stretch, members in _group_by_stretch(chart).items():
        c = _freq_axis(m, h * stretch)
        ey = np.exp(1j * np.outer(c, xs[-1]))
        t = (ey @ vals.T).reshape((m,) + lead)
        for s in members:
            acc = t
            for i in range(n - 2, -1, -1):
                e = np.exp(-1j * np.outer(c, chart.slopes[s, i] * xs[i]))
                acc = np.einsum("c...i,ci->c...", acc, e)
            out[s] = scale * acc
    return out


def _backproject_real(spec: np.ndarray, chart: Chart, f: GridFunction, m: int) -> np.ndarray:
    """Adjoint of :func:`_ray_spectra_real` with quadrature weights ``w * dc``."""
    n = chart.n
    h = f.spacing[0]
    xs = [f.axis(i) for i in range(n)]
    lead = f.dims[:-1]
    out = np.zeros(f.dims, complex).reshape(-1, f.dims[-1])
    for stretch, members in _group_by_stretch(chart).items():
        c = _freq_axis(m, h * stretch)
        dc = TWO_PI / (m * h * stretch)
        acc = np.zeros((m,) + lead, complex)
        for s in members:
            term = spec[s] * chart.weights[s] * dc
            term = term.reshape((m,) + (1,) * (n - 1))
            for i in range(n - 1):
                e = np.exp(1j * np.outer(c, chart.slopes[s, i] * xs[i]))
                shape = (m,) + (1,) * i + (len(xs[i]),) + (1,) * (n - 2 - i)
                term = term * e.reshape(shape)
            acc = acc + term
        ey = np.exp(-1j * np.outer(c, xs[-1]))
        out += acc.reshape(m, -1).T @ ey
    return out.reshape(f.dims) / math.sqrt(TWO_PI)


def _ray_spectra_complex(f: GridFunction, chart: Chart, m: int) -> np.ndarray:
    """``2 pi f^(-conj(a1) c, c)`` on each slope's 2-D offset-frequency grid."""
    h = f.spacing[0]
    x1r, x1i, x2r, x2i = (f.axis(i) for i in range(4))
    out = np.zeros((chart.size, m, m), complex)
    scale = h ** 4 / TWO_PI
    for stretch, members in _group_by_stretch(chart).items():
        c1 = _freq_axis(m, h * stretch)
        e2r = np.exp(1j * np.outer(c1, x2r))
        e2i = np.exp(1j * np.outer(c1, x2i))
        t = np.einsum("abkl,pk->abpl", f.samples, e2r)
        t = np.einsum("abpl,ql->abpq", t, e2i)
        cr, ci = np.meshgrid(c1, c1, indexing="ij")
        cc = cr + 1j * ci
        for s in members:
            xi1 = -np.conj(chart.slopes[s, 0]) * cc
            er = np.exp(1j * xi1.real[..., None] * x1r)
            ei = np.exp(1j * xi1.imag[..., None] * x1i)
            out[s] = scale * np.einsum("abpq,pqa,pqb->pq", t, er, ei)
    return out


def _backproject_complex(spec: np.ndarray, chart: Chart, f: GridFunction, m: int) -> np.ndarray:
    h = f.spacing[0]
    x1r, x1i, x2r, x2i = (f.axis(i) for i in range(4))
    out = np.zeros(f.dims, complex)
    for stretch, members in _group_by_stretch(chart).items():
        c1 = _freq_axis(m, h * stretch)
        dc = TWO_PI / (m * h * stretch)
        cr, ci = np.meshgrid(c1, c1, indexing="ij")
        cc = cr + 1j * ci
        acc = np.zeros((len(x1r), len(x1i), m, m), complex)
        for s in members:
            xi1 = -np.conj(chart.slopes[s, 0]) * cc
            er = np.exp(-1j * xi1.real[..., None] * x1r)
            ei = np.exp(-1j * xi1.imag[..., None] * x1i)
            b = spec[s] * chart.weights[s] * dc ** 2
            acc += np.einsum("pq,pqa,pqb->abpq", b, er, ei)
        e2r = np.exp(-1j * np.outer(c1, x2r))
        e2i = np.exp(-1j * np.outer(c1, x2i))
        t = np.einsum("abpq,pk->abkq", acc, e2r)
        out += np.einsum("abkq,ql->abkl", t, e2i)
    return out / TWO_PI


# --- public operations --------------------------------------------------------

Multiplier = MultiplierKernel | Callable


def _multiplier_values(u, c, floor):
    if isinstance(u, MultiplierKernel):
        return eval_multiplier(u, c, floor=floor if u.singular_at_zero else None)
    return np.asarray(u(c), dtype=complex)


def _offset_freqs(hf_spacing, m, field):
    c1 = _freq_axis(m, hf_spacing)
    if field == "real":
        return c1, TWO_PI / (m * hf_spacing)
    cr, ci = np.meshgrid(c1, c1, indexing="ij")
    return cr + 1j * ci, TWO_PI / (m * hf_spacing)


def _filter_offsets(hf: HyperplaneFunction, samples: np.ndarray, u, pad: int) -> np.ndarray:
    """Correlate each slope's offset samples with ``u`` (multiply by ``u~(-c)``).

    The samples are zero-padded ``pad``-fold first, so the offset-frequency
    grid is ``pad`` times finer; this keeps the kinks of multipliers such as
    ``|c|`` at ``c = 0`` from aliasing.  Multipliers singular at the origin
    are floored at half a (padded) frequency cell.
    """
    axes = _axes(hf.field)
    if pad is None:
        pad = 16 if hf.field == "real" else 4
    m = hf.offset_count
    big = pad * m
    lo = big // 2 - m // 2
    window = (slice(None),) + (slice(lo, lo + m),) * len(axes)
    padded = np.zeros((hf.chart.size,) + (big,) * len(axes), complex)
    padded[window] = samples
    spec = _offset_forward(padded, hf.offset_spacing, axes)
    for s in range(hf.chart.size):
        c, dc = _offset_freqs(hf.offset_spacing[s], big, hf.field)
        spec[s] *= _multiplier_values(u, -c, 0.5 * dc)
    return _offset_inverse(spec, hf.offset_spacing, axes)[window]


def _axes(field):
    return (1,) if field == "real" else (1, 2)


def offset_spectrum(phi: HyperplaneFunction) -> np.ndarray:
    """Unitary offset-axis DFT of ``phi`` for every slope."""
    return _offset_forward(phi.samples, phi.offset_spacing, _axes(phi.field))


def generalized_radon(f: GridFunction, u: Multiplier, chart: Chart,
                      offset_count: int | None = None, pad: int | None = None) -> HyperplaneFunction:
    """``(R_u f)(a) = int f(x) u(x_n - a' . x' - a_n) dx``.

    Equivalent to the hyperplane integrals correlated with ``u`` along the
    offset, i.e. offset spectrum multiplied by ``u~(-c)``.
    """
    _check_grid(f, chart)
    m = offset_count or default_offset_count(f)
    if chart.field == "real":
        spec = _ray_spectra_real(f, chart, m)
    else:
        if chart.n != 2:
            raise DomainError("complex-field transforms are implemented for n = 2 only")
        spec = _ray_spectra_complex(f, chart, m)
    hf = HyperplaneFunction(chart, m, f.spacing[0],
                            np.zeros(spec.shape, complex))
    samples = _offset_inverse(spec, hf.offset_spacing, _axes(chart.field))
    if not (isinstance(u, MultiplierKernel) and u == delta(u.field)):
        samples = _filter_offsets(hf, samples, u, pad)
    return hf.with_samples(samples)


def classical_radon(f: GridFunction, chart: Chart,
                    offset_count: int | None = None) -> HyperplaneFunction:
    """Plain hyperplane integrals ``int f(x', a'.x' + a_n) dx'``."""
    return generalized_radon(f, delta(chart.field), chart, offset_count)


def invert_generalized_radon(phi: HyperplaneFunction, u: Multiplier, target: GridFunction,
                             calibration: float = 1.0, pad: int | None = None) -> GridFunction:
    """Filtered backprojection undoing :func:`generalized_radon`.

    Filter: inversion multiplier of ``u`` (``u~^-1 |c|^(n-1)`` real,
    ``u~^-1 |c|^(2(n-1))`` complex) at ``-c``; backprojection constant
    ``(2 pi)^(-kappa (n-1))`` times ``calibration``.  ``target`` supplies the
    output grid geometry.
    """
    chart = phi.chart
    _check_grid(target, chart)
    n = chart.n
    if isinstance(u, MultiplierKernel):
        filt = inversion_multiplier(u, n)
    else:
        power = (n - 1) if chart.field == "real" else 2 * (n - 1)
        filt = lambda c: np.abs(c) ** power / np.asarray(u(c), dtype=complex)  # noqa: E731
    filtered = _filter_offsets(phi, phi.samples, filt, pad)
    spec = _offset_forward(filtered, phi.offset_spacing, _axes(chart.field))
    if chart.field == "real":
        rec = _backproject_real(spec, chart, target, phi.offset_count)
    else:
        rec = _backproject_complex(spec, chart, target, phi.offset_count)
    rec = rec * phi.measure_constant * calibration
    out = target.with_samples(rec)
    warning = phi.warning
    if chart.kind == "uniform":
        warning = (f"slopes bounded by {chart.slope_max}: frequencies with "
                   f"|xi'| > {chart.slope_max} |xi_n| are not reconstructed")
    return _Reconstruction(out, warning)


class _Reconstruction(GridFunction):
    """GridFunction carrying an optional accuracy warning."""

    def __init__(self, g: GridFunction, warning):
        super().__init__(g.dims, g.spacing, g.origin, g.samples, g.convention)
        object.__setattr__(self, "warning", warning)


def plancherel_defect(forward: Callable, f, g) -> float:
    """``|<f, g> - <F f, F g>| / (||f|| ||g||)``."""
    if not f.same_geometry(g):
        raise ShapeError("f and g must share a grid")
    ff, fg = forward(f), forward(g)
    denom = f.norm() * g.norm()
    if denom == 0:
        return 0.0
    return abs(f.inner(g) - ff.inner(fg)) / denom


def unit_gaussian(target: GridFunction, width: float | None = None) -> GridFunction:
    """Centred Gaussian of unit peak used for calibration."""
    w = width if width is not None else 0.12 * min(n * h for n, h in zip(target.dims, target.spacing))
    r2 = sum(x ** 2 for x in target.mesh())
    return target.with_samples(np.exp(-r2 / (2 * w ** 2)))


def calibrate(target: GridFunction, chart: Chart, u: Multiplier | None = None,
              offset_count: int | None = None) -> float:
    """Peak of a unit-Gaussian round trip; the reciprocal is the calibration factor."""
    u = u if u is not None else delta(chart.field)
    g = unit_gaussian(target)
    rec = invert_generalized_radon(generalized_radon(g, u, chart, offset_count), u, target)
    idx = np.unravel_index(np.argmax(np.abs(g.samples)), g.dims)
    return float(rec.samples[idx].real / g.samples[idx].real)


def round_trip_error(f: GridFunction, u: Multiplier, chart: Chart,
                     offset_count: int | None = None) -> float:
    rec = invert_generalized_radon(generalized_radon(f, u, chart, offset_count), u, f)
    return relative_l2(rec, f)
