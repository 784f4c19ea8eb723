"""Flat binary and CSV storage for grids, spectra and transform data.

Binary layout (all little-endian)::

    magic      4 bytes  b"GFTB"
    version    u16
    kind       u8       1 grid, 2 spectrum, 3 hyperplane, 4 plane family, 5 discrete GFT
    convention u8       0 centered, 1 fft
    precision  u8       8 complex64, 16 complex128
    ndim       u8
    dims       u32 * ndim
    spacing    f64 * ndim
    origin     f64 * ndim
    extra_len  u32
    extra      JSON (utf-8), extra_len bytes
    payload    complex samples, row-major, then the auxiliary arrays listed in
               extra["arrays"] (each as float64 or complex128, row-major)

``dims``/``spacing``/``origin`` describe the sampled grid of the payload.
For non-grid kinds they hold the payload shape with unit spacing.
"""

from __future__ import annotations

import csv
import io as _io
import json
import struct

import numpy as np

from .core import CONVENTIONS, GridFunction, Spectrum
from .complexes import PlaneFamilyFunction
from .errors import ShapeError
from .hypergroup import DiscreteGFT
from .radon import Chart, HyperplaneFunction

MAGIC = b"GFTB"
VERSION = 1
KINDS = {"grid": 1, "spectrum": 2, "hyperplane": 3, "plane_family": 4, "discrete_gft": 5}
_KIND_NAMES = {v: k for k, v in KINDS.items()}
_PRECISION = {8: "<c8", 16: "<c16"}


def _pack(kind, convention, dims, spacing, origin, payload, extra=None, aux=(), precision=8):
    if precision not in _PRECISION:
        raise ValueError("precision must be 8 (complex64) or 16 (complex128)")
    extra = dict(extra or {})
    extra["arrays"] = [{"name": name, "dtype": "c16" if np.iscomplexobj(a) else "f8",
                        "shape": list(np.shape(a))} for name, a in aux]
    blob = json.dumps(extra, sort_keys=True).encode()
    nd = len(dims)
    head = struct.pack("<4sHBBBB", MAGIC, VERSION, KINDS[kind], CONVENTIONS.index(convention),
                       precision, nd)
    head += struct.pack(f"<{nd}I{nd}d{nd}d", *dims, *spacing, *origin)
    head += struct.pack("<I", len(blob)) + blob
    parts = [head, np.ascontiguousarray(payload, dtype=_PRECISION[precision]).tobytes()]
    for _, a in aux:
        dt = "<c16" if np.iscomplexobj(a) else "<f8"
        parts.append(np.ascontiguousarray(a, dtype=dt).tobytes())
    return b"".join(parts)


def _unpack(data: bytes):
    if data[:4] != MAGIC:
        raise ShapeError("not a GFTB file")
    _, version, kind, conv, precision, nd = struct.unpack_from("<4sHBBBB", data, 0)
    if version != VERSION:
        raise ShapeError(f"unsupported version {version}")
    off = 10
    vals = struct.unpack_from(f"<{nd}I{nd}d{nd}d", data, off)
    off += struct.calcsize(f"<{nd}I{nd}d{nd}d")
    dims, spacing, origin = tuple(vals[:nd]), tuple(vals[nd:2 * nd]), tuple(vals[2 * nd:])
    (elen,) = struct.unpack_from("<I", data, off)
    off += 4
    extra = json.loads(data[off:off + elen].decode())
    off += elen
    dt = np.dtype(_PRECISION[precision])
    count = int(np.prod(dims))
    payload = np.frombuffer(data, dt, count, off).astype(complex).reshape(dims)
    off += count * dt.itemsize
    aux = {}
    for spec in extra.get("arrays", []):
        adt = np.dtype("<c16" if spec["dtype"] == "c16" else "<f8")
        n = int(np.prod(spec["shape"]))
        aux[spec["name"]] = np.frombuffer(data, adt, n, off).reshape(spec["shape"]).copy()
        off += n * adt.itemsize
    return {"kind": _KIND_NAMES[kind], "convention": CONVENTIONS[conv], "precision": precision,
            "dims": dims, "spacing": spacing, "origin": origin, "extra": extra,
            "payload": payload, "aux": aux}


def to_bytes(obj, precision: int = 8) -> bytes:
    if isinstance(obj, (GridFunction, Spectrum)):
        kind = "grid" if isinstance(obj, GridFunction) else "spectrum"
        return _pack(kind, obj.convention, obj.dims, obj.spacing, obj.origin, obj.samples,
                     precision=precision)
    if isinstance(obj, HyperplaneFunction):
        c = obj.chart
        shape = obj.samples.shape
        extra = {"field": c.field, "n": c.n, "chart_kind": c.kind, "slope_max": c.slope_max,
                 "base_spacing": obj.base_spacing, "warning": obj.warning}
        aux = [("slopes", np.asarray(c.slopes)), ("weights", c.weights)]
        return _pack("hyperplane", "fft", shape, (1.0,) * len(shape), (0.0,) * len(shape),
                     obj.samples, extra, aux, precision)
    if isinstance(obj, PlaneFamilyFunction):
        shape = obj.samples.shape
        extra = {"source_dims": list(obj.source_dims), "source_spacing": list(obj.source_spacing),
                 "source_origin": list(obj.source_origin), "chart": "alpha,t"}
        aux = [("t", obj.t), ("valid", obj.valid.astype(float))]
        return _pack("plane_family", obj.convention, shape, (1.0,) * len(shape),
                     (0.0,) * len(shape), obj.samples, extra, aux, precision)
    if isinstance(obj, DiscreteGFT):
        extra = {"tag": obj.tag, "dualized": obj.dualized}
        aux = [("x_weights", obj.x_weights), ("chi_weights", obj.chi_weights)]
        return _pack("discrete_gft", "centered", obj.E.shape, (1.0, 1.0), (0.0, 0.0), obj.E,
                     extra, aux, precision)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def from_bytes(data: bytes):
    r = _unpack(data)
    kind, extra, aux = r["kind"], r["extra"], r["aux"]
    if kind == "grid":
        return GridFunction(r["dims"], r["spacing"], r["origin"], r["payload"], r["convention"])
    if kind == "spectrum":
        return Spectrum(r["dims"], r["spacing"], r["origin"], r["payload"], r["convention"])
    if kind == "hyperplane":
        chart = Chart(extra["field"], extra["n"], aux["slopes"], aux["weights"],
                      extra["chart_kind"], extra["slope_max"])
        return HyperplaneFunction(chart, r["dims"][1], extra["base_spacing"], r["payload"],
                                  extra["warning"])
    if kind == "plane_family":
        return PlaneFamilyFunction(tuple(extra["source_dims"]), tuple(extra["source_spacing"]),
                                   tuple(extra["source_origin"]), aux["t"], r["payload"],
                                   aux["valid"] > 0.5, r["convention"])
    return DiscreteGFT(aux["x_weights"], aux["chi_weights"], r["payload"], extra["tag"],
                       extra["dualized"])


def save(path, obj, precision: int = 8) -> None:
    with open(path, "wb") as fh:
        fh.write(to_bytes(obj, precision))


def load(path):
    with open(path, "rb") as fh:
        return from_bytes(fh.read())


def grid_to_csv(f) -> str:
    """One row per sample: coordinates then real and imaginary parts."""
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"x{i}" for i in range(f.ndim)] + ["re", "im"])
    coords = [m.ravel() for m in f.mesh()]
    for k, v in enumerate(f.samples.ravel()):
        w.writerow([repr(float(c[k])) for c in coords] + [repr(float(v.real)), repr(float(v.imag))])
    return buf.getvalue()
