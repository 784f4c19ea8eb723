"""Uniform box grids, the unitary DFT pair, inner products and smooth phantoms.

Conventions used by every other module:

* forward kernel ``exp(+i <x, xi>)``, inverse kernel ``exp(-i <x, xi>)``;
* unitary normalisation ``(2 pi)^(-d/2)`` on both sides, so that
  ``<f, g> = <F f, F g>`` with volume elements ``prod(spacing)`` and
  ``prod(2 pi / (dims * spacing))``;
* sample ``j`` of an axis sits at ``origin + j * spacing``.  The
  ``"centered"`` convention puts the origin of coordinates at index
  ``(N - 1) / 2`` (a sample for odd ``N``, a half-sample for even ``N``);
  the ``"fft"`` convention puts it at index ``N // 2``.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np
import scipy.fft

from .errors import DomainError, ShapeError, SizeError

MAX_SAMPLES = 1 << 26
CONVENTIONS = ("centered", "fft")


def fft_workers() -> int:
    """Thread count for FFTs, capped by the ``GFT_THREADS`` environment variable."""
    value = os.environ.get("GFT_THREADS")
    if value:
        return max(1, int(value))
    return 1


def center_index(n: int, convention: str) -> float:
    if convention == "centered":
        return (n - 1) / 2.0
    if convention == "fft":
        return float(n // 2)
    raise ValueError(f"unknown grid convention {convention!r}")


def _check_size(dims, max_samples):
    total = math.prod(dims)
    cap = MAX_SAMPLES if max_samples is None else max_samples
    if total > cap:
        raise SizeError(f"{total} samples exceed the cap of {cap}")


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Complex samples on a uniform box grid in R^d.

    ``samples`` has shape ``dims`` (row-major).  The instance is treated as
    immutable; operations always return new objects.
    """

    dims: tuple
    spacing: tuple
    origin: tuple
    samples: np.ndarray
    convention: str = "centered"

    def __post_init__(self):
        dims = tuple(int(n) for n in self.dims)
        spacing = tuple(float(h) for h in self.spacing)
        origin = tuple(float(o) for o in self.origin)
        if not (len(dims) == len(spacing) == len(origin)):
            raise ShapeError("dims, spacing and origin must have equal length")
        if any(n <= 0 for n in dims):
            raise ShapeError("sample counts must be positive")
        if any(not h > 0 for h in spacing):
            raise ShapeError("spacings must be strictly positive")
        if self.convention not in CONVENTIONS:
            raise ValueError(f"unknown grid convention {self.convention!r}")
        samples = np.asarray(self.samples, dtype=complex)
        if samples.size != math.prod(dims):
            raise ShapeError(
                f"{samples.size} samples do not fill a {dims} grid")
        samples = samples.reshape(dims)
        samples.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "spacing", spacing)
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "samples", samples)

    @classmethod
    def zeros(cls, dims, half_width, convention="centered"):
        """Grid with ``dims[i]`` samples covering ``[-half_width, half_width)``."""
        dims = tuple(int(n) for n in np.atleast_1d(dims))
        half = np.broadcast_to(np.asarray(half_width, dtype=float), (len(dims),))
        spacing = tuple(2.0 * w / n for w, n in zip(half, dims))
        origin = tuple(-center_index(n, convention) * h
                       for n, h in zip(dims, spacing))
        return cls(dims, spacing, origin, np.zeros(dims, complex), convention)

    @property
    def ndim(self) -> int:
        return len(self.dims)

    @property
    def volume_element(self) -> float:
        return math.prod(self.spacing)

    def axis(self, i: int) -> np.ndarray:
        return self.origin[i] + self.spacing[i] * np.arange(self.dims[i])

    def mesh(self):
        return np.meshgrid(*(self.axis(i) for i in range(self.ndim)), indexing="ij")

    def with_samples(self, samples) -> "GridFunction":
        return GridFunction(self.dims, self.spacing, self.origin, samples,
                            self.convention)

    def same_geometry(self, other) -> bool:
        return (self.dims == other.dims
                and np.allclose(self.spacing, other.spacing, rtol=1e-12, atol=0)
                and np.allclose(self.origin, other.origin, rtol=1e-12, atol=1e-14))

    def inner(self, other) -> complex:
        return l2_inner(self, other)

    def norm(self) -> float:
        return math.sqrt(max(l2_inner(self, self).real, 0.0))


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Unitary DFT of a :class:`GridFunction`.

    The geometry fields describe the *source* grid; the frequency grid is
    derived from them and is its exact dual.
    """

    dims: tuple
    spacing: tuple
    origin: tuple
    samples: np.ndarray
    convention: str = "centered"

    __post_init__ = GridFunction.__post_init__

    @property
    def ndim(self) -> int:
        return len(self.dims)

    @property
    def freq_spacing(self) -> tuple:
        return tuple(2.0 * math.pi / (n * h) for n, h in zip(self.dims, self.spacing))

    @property
    def freq_origin(self) -> tuple:
        return tuple(-center_index(n, self.convention) * d
                     for n, d in zip(self.dims, self.freq_spacing))

    @property
    def volume_element(self) -> float:
        return math.prod(self.freq_spacing)

    def axis(self, i: int) -> np.ndarray:
        return self.freq_origin[i] + self.freq_spacing[i] * np.arange(self.dims[i])

    def mesh(self):
        return np.meshgrid(*(self.axis(i) for i in range(self.ndim)), indexing="ij")

    def with_samples(self, samples) -> "Spectrum":
        return Spectrum(self.dims, self.spacing, self.origin, samples, self.convention)

    same_geometry = GridFunction.same_geometry

    def inner(self, other) -> complex:
        return l2_inner(self, other)

    def norm(self) -> float:
        return math.sqrt(max(l2_inner(self, self).real, 0.0))


def _axis_phases(n, h, x0, xi0, delta):
    j = np.arange(n)
    pre = np.exp(1j * j * h * xi0)
    post = np.exp(1j * (x0 * xi0 + x0 * j * delta))
    return pre, post


def transform_axes(samples, spacing, origin, convention, axes, inverse=False):
    """Unitary 1-D DFTs of ``samples`` along ``axes`` only (other axes are batch)."""
    out = np.array(samples, dtype=complex)
    for ax in axes:
        n, h = out.shape[ax], spacing[ax]
        delta = 2.0 * math.pi / (n * h)
        pre, post = _axis_phases(n, h, origin[ax], -center_index(n, convention) * delta, delta)
        shape = [1] * out.ndim
        shape[ax] = n
        if inverse:
            out = out * np.conj(post).reshape(shape)
            out = scipy.fft.fft(out, axis=ax, workers=fft_workers())
            out = out * (np.conj(pre) * delta / math.sqrt(2.0 * math.pi)).reshape(shape)
        else:
            out = out * pre.reshape(shape)
            out = scipy.fft.ifft(out, axis=ax, norm="forward", workers=fft_workers())
            out = out * (post * h / math.sqrt(2.0 * math.pi)).reshape(shape)
    return out


def dft_forward(f: GridFunction, *, max_samples=None) -> Spectrum:
    """Unitary DFT ``F(xi) = (2 pi)^(-d/2) sum_x f(x) exp(i <x, xi>) dV``."""
    _check_size(f.dims, max_samples)
    out = transform_axes(f.samples, f.spacing, f.origin, f.convention, range(f.ndim))
    return Spectrum(f.dims, f.spacing, f.origin, out, f.convention)


def dft_inverse(F: Spectrum, source: GridFunction | None = None, *,
                max_samples=None) -> GridFunction:
    """Inverse of :func:`dft_forward`; ``source`` optionally declares the expected grid."""
    _check_size(F.dims, max_samples)
    if source is not None and not F.same_geometry(source):
        raise ShapeError("spectrum does not belong to the declared source grid")
    out = transform_axes(F.samples, F.spacing, F.origin, F.convention, range(F.ndim),
                         inverse=True)
    return GridFunction(F.dims, F.spacing, F.origin, out, F.convention)


def l2_inner(f, g) -> complex:
    """Riemann sum of ``f * conj(g)`` with the grid's volume element."""
    if type(f) is not type(g) or not f.same_geometry(g):
        raise ShapeError("inner product needs identical grid geometry")
    return complex(np.vdot(g.samples, f.samples) * f.volume_element)


def relative_l2(approx, reference) -> float:
    """``||approx - reference|| / ||reference||`` on a shared grid."""
    diff = approx.with_samples(approx.samples - reference.samples)
    ref = reference.norm()
    return diff.norm() / ref if ref > 0 else diff.norm()


@dataclass(frozen=True)
class Bump:
    """One phantom component.

    ``kind="gaussian"``: ``amplitude * exp(-|x - center|^2 / (2 width^2))``.
    ``kind="bump"``: compactly supported ``amplitude * exp(1 - 1 / (1 - r^2))``
    with ``r = |x - center| / width``.
    """

    center: tuple
    width: float
    amplitude: complex = 1.0
    kind: str = "gaussian"

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(d["center"]), float(d["width"]),
                   complex(d.get("amplitude", 1.0)), d.get("kind", "gaussian"))

    def mass(self, d: int) -> complex:
        if self.kind != "gaussian":
            raise NotImplementedError("closed-form mass only for Gaussian components")
        return self.amplitude * (2.0 * math.pi * self.width ** 2) ** (d / 2.0)


def make_phantom(grid: GridFunction, components=()) -> GridFunction:
    """Superpose smooth :class:`Bump` components (or their dict form) on ``grid``."""
    comps = [c if isinstance(c, Bump) else Bump.from_dict(c) for c in components]
    coords = grid.mesh()
    lo = [grid.origin[i] - 0.5 * grid.spacing[i] for i in range(grid.ndim)]
    hi = [grid.origin[i] + (grid.dims[i] - 0.5) * grid.spacing[i] for i in range(grid.ndim)]
    out = np.zeros(grid.dims, complex)
    for c in comps:
        if len(c.center) != grid.ndim:
            raise DomainError("component dimension does not match the grid")
        if any(not (lo[i] <= c.center[i] <= hi[i]) for i in range(grid.ndim)):
            raise DomainError(f"component centred at {c.center} lies outside the box")
        r2 = sum((x - x0) ** 2 for x, x0 in zip(coords, c.center))
        if c.kind == "gaussian":
            out += c.amplitude * np.exp(-r2 / (2.0 * c.width ** 2))
        elif c.kind == "bump":
            q = r2 / c.width ** 2
            inside = q < 1.0
            vals = np.zeros_like(q)
            vals[inside] = np.exp(1.0 - 1.0 / (1.0 - q[inside]))
            out += c.amplitude * vals
        else:
            raise ValueError(f"unknown phantom component kind {c.kind!r}")
    return grid.with_samples(out)


def boundary_ratio(f: GridFunction) -> float:
    """Largest boundary sample magnitude relative to the peak magnitude."""
    a = np.abs(f.samples)
    peak = a.max()
    if peak == 0:
        return 0.0
    edge = 0.0
    for ax in range(f.ndim):
        edge = max(edge, np.take(a, 0, axis=ax).max(), np.take(a, -1, axis=ax).max())
    return edge / peak
