"""Command-line experiment runner.

Every subcommand builds a JSON-style config and hands it to :func:`run`,
which writes ``metrics.json``, binary data files and SVG heatmaps into the
output directory.  The exit status is 0 iff every configured threshold
passes; threshold keys name metrics and values are upper bounds.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import io as gio
from .complexes import (ComplexKernel, LineComplex, build_example_kernel, complement_error,
                        forward_Ja, fourier_slice_defect, invert_Ja, linear_complex,
                        missing_mass_fraction, moment_curve, sinh_t_grid)
from .core import Bump, GridFunction, boundary_ratio, make_phantom, relative_l2
from .hypergroup import (commutativity_defect, delsarte_associativity_defect, discretize_gft,
                         dual, symbol_product_defect)
from .multipliers import (MultiplierKernel, complex_monomial, delta, delta_derivative, monomial,
                          nonlocal_gft_family)
from .radon import (calibrate, generalized_radon, invert_generalized_radon, plancherel_defect,
                    tangent_chart, uniform_chart)
from .sphere import (eigenvalue_table, gegenbauer_normalized, gft_line_defect,
                     inversion_identity_defect, j_lambda_eigenvalue)

SCENARIOS = ("radon", "plancherel", "sphere", "complex", "hypergroup")


class ConfigError(ValueError):
    """Invalid experiment configuration."""


class ReportError(ValueError):
    """Malformed metrics document."""


# --- parsing helpers ---------------------------------------------------------

def parse_kernel(text: str, field: str = "real", n: int = 2) -> MultiplierKernel:
    """``delta``, ``deriv:m``, ``monomial:m``, ``gft:rho``, ``cmono:p,q`` or a JSON object."""
    text = text.strip()
    if text.startswith("{"):
        return MultiplierKernel.from_json(text)
    name, _, arg = text.partition(":")
    try:
        if name == "delta":
            return delta(field)
        if name == "deriv":
            return delta_derivative(int(arg))
        if name == "monomial":
            return monomial(int(arg))
        if name == "gft":
            return nonlocal_gft_family(field, n, float(arg or 0.0))
        if name == "cmono":
            p, q = (int(v) for v in arg.split(","))
            return complex_monomial(p, q)
    except ValueError as exc:
        raise ConfigError(f"bad kernel argument in {text!r}") from exc
    raise ConfigError(f"unknown kernel {text!r}")


def parse_complex(text, window) -> LineComplex:
    """``linear:c1,c2``, ``moment:n`` or a JSON document / path."""
    if isinstance(text, dict):
        d = dict(text)
        d.setdefault("window", window)
        return LineComplex.from_json(d)
    text = str(text)
    if text.startswith("{"):
        d = json.loads(text)
        d.setdefault("window", window)
        return LineComplex.from_json(d)
    name, _, arg = text.partition(":")
    if name == "linear":
        return linear_complex(tuple(float(v) for v in arg.split(",")), window)
    if name == "moment":
        return moment_curve(int(arg or 3), window)
    path = Path(text)
    if path.exists():
        d = json.loads(path.read_text())
        d.setdefault("window", window)
        return LineComplex.from_json(d)
    raise ConfigError(f"unknown complex {text!r}")


def parse_complex_kernel(text: str, K: LineComplex) -> ComplexKernel:
    if text == "delta":
        return ComplexKernel("delta", K.field)
    if text.startswith("example"):
        _, _, rho = text.partition(":")
        return build_example_kernel(K, float(rho or 0.0), strict=False)
    if text.startswith("{"):
        return ComplexKernel.from_json(text)
    raise ConfigError(f"unknown complex kernel {text!r}")


def default_phantom(n: int, half_width: float):
    """Two smooth Gaussian bumps scaled to the box."""
    s = half_width / 4.0
    c1 = tuple(s * v for v in (1.0, 0.5, -0.4, 0.3)[:n])
    c2 = tuple(s * v for v in (-1.5, -1.0, 0.8, -0.2)[:n])
    return [{"center": c1, "width": 0.5 * s}, {"center": c2, "width": 0.35 * s, "amplitude": 0.7}]


# --- SVG ---------------------------------------------------------------------

_STOPS = ((0.0, (68, 1, 84)), (0.25, (59, 82, 139)), (0.5, (33, 145, 140)),
          (0.75, (94, 201, 98)), (1.0, (253, 231, 37)))
CANVAS = 320


def _color(v: float) -> str:
    if not math.isfinite(v):
        return "#bbbbbb"
    v = min(max(v, 0.0), 1.0)
    for (a, ca), (b, cb) in zip(_STOPS, _STOPS[1:]):
        if v <= b:
            w = (v - a) / (b - a)
            rgb = tuple(round(x + w * (y - x)) for x, y in zip(ca, cb))
            return "#%02x%02x%02x" % rgb
    return "#%02x%02x%02x" % _STOPS[-1][1]


def heatmap_svg(values, title: str = "", labels=None) -> str:
    """Deterministic SVG heatmap of a 2-D array (min-max scaled, at most 64x64 cells)."""
    a = np.atleast_2d(np.asarray(values, dtype=float))
    while a.shape[0] > 64 or a.shape[1] > 64:
        r0, r1 = (a.shape[0] + 1) // 2 * 2, (a.shape[1] + 1) // 2 * 2
        b = np.full((r0, r1), np.nan)
        b[:a.shape[0], :a.shape[1]] = a
        a = np.nanmean(b.reshape(r0 // 2, 2, r1 // 2, 2), axis=(1, 3))
    finite = a[np.isfinite(a)]
    lo, hi = (float(finite.min()), float(finite.max())) if finite.size else (0.0, 1.0)
    span = hi - lo if hi > lo else 1.0
    rows, cols = a.shape
    cw, ch = CANVAS / cols, (CANVAS - 20) / rows
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS}" height="{CANVAS}" '
           f'viewBox="0 0 {CANVAS} {CANVAS}">',
           f'<text x="4" y="14" font-family="monospace" font-size="11">{_esc(title)}</text>']
    for i in range(rows):
        for j in range(cols):
            v = a[i, j]
            fill = _color((v - lo) / span) if math.isfinite(v) else _color(float("nan"))
            out.append(f'<rect x="{j * cw:.3f}" y="{20 + i * ch:.3f}" width="{cw:.3f}" '
                       f'height="{ch:.3f}" fill="{fill}"/>')
            if labels is not None:
                out.append(f'<text x="{j * cw + 3:.3f}" y="{20 + i * ch + ch / 2:.3f}" '
                           f'font-family="monospace" font-size="9">{_esc(labels[i][j])}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _esc(s) -> str:
    return str(s).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _image(f: GridFunction) -> np.ndarray:
    """2-D view: the central slice of every axis beyond the first two."""
    a = np.abs(f.samples)
    while a.ndim > 2:
        a = a[..., a.shape[-1] // 2]
    return a


# --- scenarios ---------------------------------------------------------------

def _grid(n, size, half_width):
    return GridFunction.zeros((size,) * n, half_width)


def _phantom(cfg, n, size):
    hw = float(cfg.get("half_width", 4.0))
    comps = cfg.get("phantom", default_phantom(n, hw))
    return make_phantom(_grid(n, size, hw), comps)


def _radon_chart(cfg, n, field):
    default = [14, 28] if field == "complex" else (180 if n == 2 else [20, 40])
    slopes = cfg.get("slopes", default)
    if cfg.get("chart", "tangent") == "uniform":
        count = slopes if np.isscalar(slopes) else slopes[0]
        return uniform_chart(n, int(count), float(cfg.get("slope_max", 4.0)), field)
    return tangent_chart(n, slopes if np.isscalar(slopes) else tuple(slopes), field)


def _scenario_radon(cfg, out: Path):
    field = cfg.get("field", "real")
    n = int(cfg.get("n", 2))
    dim = n if field == "real" else 2 * n
    u = parse_kernel(cfg.get("kernel", "delta"), field, n)
    chart = _radon_chart(cfg, n, field)
    ladder = cfg.get("ladder", [cfg.get("size", 128 if dim == 2 else 48)])
    metrics, last = {"errors_by_size": {}}, None
    for size in ladder:
        f = _phantom(cfg, dim, int(size))
        phi = generalized_radon(f, u, chart, pad=cfg.get("pad"))
        rec = invert_generalized_radon(phi, u, f, pad=cfg.get("pad"))
        metrics["errors_by_size"][str(size)] = relative_l2(rec, f)
        last = (f, rec, phi)
    f, rec, phi = last
    metrics["round_trip_rel_l2"] = metrics["errors_by_size"][str(ladder[-1])]
    metrics["boundary_ratio"] = boundary_ratio(f)
    metrics["warning"] = rec.warning
    if cfg.get("calibrate", False):
        metrics["calibration_constant"] = calibrate(f, chart, u)
    gio.save(out / "phantom.gftb", f)
    gio.save(out / "reconstruction.gftb", rec)
    gio.save(out / "hyperplanes.gftb", phi)
    _write_images(out, f, rec)
    return metrics


def _scenario_plancherel(cfg, out: Path):
    n = int(cfg.get("n", 3))
    field = cfg.get("field", "real")
    u = parse_kernel(cfg.get("kernel", "monomial:1"), field, n)
    chart = _radon_chart(cfg, n, field)
    size = int(cfg.get("size", 48))
    hw = float(cfg.get("half_width", 4.0))
    rng = np.random.default_rng(int(cfg.get("seed", 0)))
    defects = []
    for _ in range(int(cfg.get("pairs", 5))):
        pair = [random_phantom(rng, n, size, hw) for _ in range(2)]
        defects.append(plancherel_defect(lambda g: generalized_radon(g, u, chart), *pair))
    return {"plancherel_defect_max": max(defects), "plancherel_defects": defects}


def random_phantom(rng, n, size, half_width, bumps=3):
    """Sum of ``bumps`` random Gaussians well inside the box."""
    comps = []
    for _ in range(bumps):
        c = tuple(rng.uniform(-0.4, 0.4, n) * half_width)
        comps.append(Bump(c, float(rng.uniform(0.1, 0.16) * half_width),
                          complex(rng.standard_normal(), rng.standard_normal())))
    return make_phantom(_grid(n, size, half_width), comps)


def funk_oracle(L: int, tilt: float = 0.7, points: int = 400) -> float:
    """Largest gap between ``J_-1`` eigenvalue ratios and direct great-circle integrals on ``S^2``.

    At ``lambda = -1`` the kernel is ``delta(<xi, omega>)``, so ``J_-1 f(xi)``
    is the mean of ``f`` over the great circle orthogonal to ``xi``.  For the
    zonal ``f = P_l(<omega, e_3>)`` and ``xi`` tilted by ``tilt`` from ``e_3``
    that mean is computed with the trapezoid rule (exact here) and compared
    with ``eig_l / eig_0 * P_l(cos tilt)``.
    """
    phi = 2 * np.pi * np.arange(points) / points
    u1 = np.array([math.cos(tilt), 0.0, -math.sin(tilt)])
    u2 = np.array([0.0, 1.0, 0.0])
    omega_z = np.outer(np.cos(phi), u1) + np.outer(np.sin(phi), u2)
    omega_z = omega_z[:, 2]
    e0 = j_lambda_eigenvalue(-1.0, 0, 2, "even").real
    worst = 0.0
    for l in range(0, L + 1, 2):
        circle = float(np.mean(gegenbauer_normalized(l, 2, omega_z)))
        eig = j_lambda_eigenvalue(-1.0, l, 2, "even").real
        predicted = eig / e0 * float(gegenbauer_normalized(l, 2, math.cos(tilt)))
        worst = max(worst, abs(circle - predicted))
    return worst


def _scenario_sphere(cfg, out: Path):
    n = int(cfg.get("n", 2))
    parity = cfg.get("parity", "even")
    L = int(cfg.get("L", 16))
    lam = complex(cfg.get("lam", -0.5))
    metrics = {"inversion_defect": inversion_identity_defect(lam, L, n, parity)}
    for rho in cfg.get("rhos", [0.0, 1.0]):
        metrics[f"gft_line_defect_rho_{rho:g}"] = gft_line_defect(float(rho), L, n, parity)
    if lam == -1 and n == 2 and parity == "even":
        metrics["funk_oracle_ratio_error"] = funk_oracle(L)
    table = eigenvalue_table(lam, L, n, parity, at_pole="residue")
    (out / "eigenvalues.csv").write_text(table.to_csv())
    vals = np.abs(table.values)
    (out / "eigenvalues.svg").write_text(heatmap_svg(vals[None, :], "|eig| by degree"))
    return metrics


def _scenario_complex(cfg, out: Path):
    window = tuple(cfg.get("t_window", (-math.inf, math.inf)))
    K = parse_complex(cfg.get("complex", "linear:1,0.5"), window)
    a = parse_complex_kernel(cfg.get("kernel", "delta"), K)
    size = int(cfg.get("size", 48))
    t = sinh_t_grid(int(cfg.get("t_samples", 256)), float(cfg.get("t_scale", 0.5)),
                    float(cfg.get("v_max", 5.0)))
    t = t[(t >= K.window[0]) & (t <= K.window[1])]
    f = _phantom(cfg, K.n, size)
    phi = forward_Ja(f, K, a, t)
    rec = invert_Ja(phi, K, a)
    metrics = {"round_trip_rel_l2": relative_l2(rec.f, f),
               "complement_rel_l2": complement_error(rec, f),
               "missing_fraction": rec.missing_fraction,
               "missing_mass_fraction": missing_mass_fraction(rec, f),
               "window_loss_fraction": rec.window_loss_fraction,
               "valid_t_fraction": float(np.mean(phi.valid))}
    if cfg.get("slice_check", False):
        metrics["slice_defect"] = fourier_slice_defect(f, K, a, t[::4])
    gio.save(out / "phantom.gftb", f)
    gio.save(out / "plane_family.gftb", phi)
    gio.save(out / "reconstruction.gftb", rec.f)
    _write_images(out, f, rec.f)
    return metrics


def _scenario_hypergroup(cfg, out: Path):
    src = cfg.get("from", "fourier")
    G = discretize_gft(src, int(cfg.get("size", 32)), L=int(cfg.get("L", 16)),
                       rho=float(cfg.get("rho", 0.0)))
    N = G.shape[0]
    probes = [(i, (3 * i + 1) % N, (5 * i + 2) % N) for i in range(min(N, 8))]
    D = dual(dual(G))
    metrics = {"isometry_residual": G.isometry_residual(),
               "commutativity_defect": max(commutativity_defect(G, x, y) for x, y, _ in probes),
               "associativity_defect": max(delsarte_associativity_defect(G, *p) for p in probes),
               "symbol_product_defect": max(symbol_product_defect(G, x, y) for x, y, _ in probes),
               "dual_involution_exact": bool(np.array_equal(D.E, G.E)
                                             and np.array_equal(D.x_weights, G.x_weights)),
               "nodes": N}
    gio.save(out / "gft.gftb", G)
    (out / "gft.svg").write_text(heatmap_svg(np.angle(G.E), f"arg e(x, chi): {G.tag}"))
    return metrics


_RUNNERS = {"radon": _scenario_radon, "plancherel": _scenario_plancherel,
            "sphere": _scenario_sphere, "complex": _scenario_complex,
            "hypergroup": _scenario_hypergroup}


def _write_images(out: Path, f: GridFunction, rec: GridFunction):
    (out / "input.svg").write_text(heatmap_svg(_image(f), "input |f|"))
    (out / "reconstruction.svg").write_text(heatmap_svg(_image(rec), "reconstruction |f|"))
    diff = rec.with_samples(rec.samples - f.samples)
    (out / "difference.svg").write_text(heatmap_svg(_image(diff), "difference"))


def validate(config: dict) -> dict:
    if not isinstance(config, dict):
        raise ConfigError("config must be a JSON object")
    scen = config.get("scenario")
    if scen not in SCENARIOS:
        raise ConfigError(f"scenario must be one of {SCENARIOS}")
    th = config.get("thresholds", {})
    if not isinstance(th, dict) or not all(isinstance(v, (int, float)) for v in th.values()):
        raise ConfigError("thresholds must map metric names to numbers")
    for size in config.get("ladder", []) + ([config["size"]] if "size" in config else []):
        if not isinstance(size, int) or size < 2 or size > 1024:
            raise ConfigError(f"resolution {size!r} outside [2, 1024]")
    return config


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def check_thresholds(metrics: dict, thresholds: dict) -> list:
    """Names of failing metrics (a missing metric fails)."""
    bad = []
    for name, bound in sorted(thresholds.items()):
        v = metrics.get(name)
        if not isinstance(v, (int, float)) or not v <= bound:
            bad.append(name)
    return bad


def run(config: dict, out_dir=None) -> tuple[dict, int]:
    """Run one scenario; returns ``(metrics, exit_status)``."""
    cfg = validate(dict(config))
    out = Path(out_dir or cfg.get("out", "gft_out"))
    out.mkdir(parents=True, exist_ok=True)
    metrics = _jsonable(_RUNNERS[cfg["scenario"]](cfg, out))
    metrics["scenario"] = cfg["scenario"]
    failing = check_thresholds(metrics, cfg.get("thresholds", {}))
    metrics["failing_thresholds"] = failing
    (out / "metrics.json").write_text(json.dumps(metrics, indent=2, sort_keys=True) + "\n")
    return metrics, (1 if failing else 0)


# --- report rendering --------------------------------------------------------

REPORT_FIELDS = {
    "radon": ["round_trip_rel_l2", "boundary_ratio", "calibration_constant"],
    "plancherel": ["plancherel_defect_max"],
    "sphere": ["inversion_defect", "gft_line_defect_rho_0", "gft_line_defect_rho_1",
               "funk_oracle_ratio_error"],
    "complex": ["round_trip_rel_l2", "complement_rel_l2", "missing_fraction",
                "missing_mass_fraction", "slice_defect"],
    "hypergroup": ["isometry_residual", "commutativity_defect", "associativity_defect",
                   "symbol_product_defect"],
}


def load_metrics(path) -> dict:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ReportError(f"{path}: {exc.msg} at line {exc.lineno}, column {exc.colno}") from exc
    if not isinstance(data, dict):
        raise ReportError(f"{path}: top level must be an object")
    return data


def report_render(metrics_path, out_dir=None) -> tuple[str, str]:
    """Render ``metrics.json`` as a one-row heatmap SVG plus a CSV table.

    Cells are scalar metrics coloured by ``log10`` magnitude; expected fields
    that are absent appear as ``n/a`` cells.  Output is byte-stable.
    """
    data = load_metrics(metrics_path)
    names = [k for k in sorted(data) if isinstance(data[k], (int, float))
             and not isinstance(data[k], bool)]
    for k in REPORT_FIELDS.get(data.get("scenario"), []):
        if k not in names:
            names.append(k)
    vals, labels = [], []
    for k in names:
        v = data.get(k)
        if isinstance(v, (int, float)) and not isinstance(v, bool):
            vals.append(math.log10(abs(v)) if v != 0 else -16.0)
            labels.append(f"{k}={v:.3g}")
        else:
            vals.append(float("nan"))
            labels.append(f"{k}=n/a")
    svg = heatmap_svg(np.array(vals)[:, None], str(data.get("scenario", "metrics")),
                      labels=[[s] for s in labels])
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["metric", "value"])
    for k in names:
        v = data.get(k)
        w.writerow([k, "n/a" if v is None else repr(v)])
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.svg").write_text(svg)
        (out / "report.csv").write_text(buf.getvalue())
    return svg, buf.getvalue()


# --- argument parsing --------------------------------------------------------

def _parse_thresholds(items):
    out = {}
    for item in items or []:
        name, _, val = item.partition("=")
        try:
            out[name] = float(val)
        except ValueError as exc:
            raise ConfigError(f"bad threshold {item!r}") from exc
    return out


def _parse_lambda(text: str) -> complex:
    parts = text.split(",")
    try:
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
        return complex(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad lambda {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gft", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", default="gft_out")
        sp.add_argument("--threshold", action="append", metavar="METRIC=MAX")
        sp.add_argument("--seed", type=int, default=0)

    ph = sub.add_parser("phantom", help="write a phantom grid")
    ph.add_argument("--n", type=int, default=2)
    ph.add_argument("--size", type=int, default=64)
    ph.add_argument("--half-width", type=float, default=4.0)
    ph.add_argument("--bump", action="append", metavar="C1,..,Cn,WIDTH[,AMP]")
    ph.add_argument("--csv", action="store_true")
    ph.add_argument("--out", default="phantom.gftb")

    r = sub.add_parser("radon", help="generalized Radon round trip")
    common(r)
    r.add_argument("--n", type=int, default=2)
    r.add_argument("--field", choices=("real", "complex"), default="real")
    r.add_argument("--size", "--grid", dest="size", type=int)
    r.add_argument("--ladder", type=int, nargs="+")
    r.add_argument("--slopes", type=int, nargs="+")
    r.add_argument("--chart", choices=("tangent", "uniform"), default="tangent")
    r.add_argument("--slope-max", type=float, default=4.0, help="half-width of a uniform chart")
    r.add_argument("--kernel", default="delta")
    r.add_argument("--half-width", type=float, default=4.0)
    r.add_argument("--pad", type=int)
    r.add_argument("--calibrate", action="store_true")
    r.add_argument("--plancherel", action="store_true", help="report the unitarity defect instead")
    r.add_argument("--pairs", type=int, default=5)

    s = sub.add_parser("sphere", help="J_lambda eigenvalue checks")
    common(s)
    s.add_argument("--n", "--sphere-n", dest="n", type=int, default=2)
    s.add_argument("--parity", choices=("even", "odd"), default="even")
    s.add_argument("--lam", "--lambda", dest="lam", type=_parse_lambda, default=-0.5,
                   help="RE or RE,IM")
    s.add_argument("--L", type=int, default=16)
    s.add_argument("--rho", type=float, nargs="+", default=[0.0, 1.0])

    c = sub.add_parser("complex", help="line-complex round trip")
    common(c)
    c.add_argument("--complex", default="linear:1,0.5")
    c.add_argument("--kernel", default="delta")
    c.add_argument("--t-window", type=float, nargs=2, default=(-math.inf, math.inf))
    c.add_argument("--t-samples", type=int, default=256)
    c.add_argument("--size", type=int, default=48)
    c.add_argument("--half-width", type=float, default=4.0)
    c.add_argument("--slice-check", action="store_true")

    h = sub.add_parser("hypergroup", help="discrete hypergroup axioms")
    common(h)
    h.add_argument("--from", dest="source", choices=("fourier", "sphere", "radon-slice"),
                   default="fourier")
    h.add_argument("--size", type=int, default=32)
    h.add_argument("--L", type=int, default=16)
    h.add_argument("--rho", type=float, default=0.0)

    rep = sub.add_parser("report", help="render metrics.json as SVG and CSV")
    rep.add_argument("metrics")
    rep.add_argument("--out", default=None)

    rn = sub.add_parser("run", help="run a JSON experiment config")
    rn.add_argument("config")
    rn.add_argument("--out", default=None)
    return p


def _config_from_args(a) -> dict:
    th = _parse_thresholds(a.threshold)
    base = {"out": a.out, "thresholds": th, "seed": a.seed}
    if a.command == "radon":
        cfg = {"scenario": "plancherel" if a.plancherel else "radon", "n": a.n,
               "field": a.field, "chart": a.chart, "kernel": a.kernel,
               "half_width": a.half_width, "pairs": a.pairs, "calibrate": a.calibrate,
               "slope_max": a.slope_max}
        if a.size:
            cfg["size"] = a.size
        if a.ladder:
            cfg["ladder"] = a.ladder
        if a.slopes:
            cfg["slopes"] = a.slopes[0] if len(a.slopes) == 1 else a.slopes
        if a.pad:
            cfg["pad"] = a.pad
    elif a.command == "sphere":
        lam = a.lam
        cfg = {"scenario": "sphere", "n": a.n, "parity": a.parity, "L": a.L,
               "lam": lam.real if lam.imag == 0 else [lam.real, lam.imag], "rhos": a.rho}
    elif a.command == "complex":
        cfg = {"scenario": "complex", "complex": a.complex, "kernel": a.kernel,
               "t_window": list(a.t_window), "t_samples": a.t_samples, "size": a.size,
               "half_width": a.half_width, "slice_check": a.slice_check}
    else:
        cfg = {"scenario": "hypergroup", "from": a.source, "size": a.size, "L": a.L,
               "rho": a.rho}
    cfg.update(base)
    return cfg


def _load_config(path) -> dict:
    cfg = json.loads(Path(path).read_text())
    if isinstance(cfg.get("lam"), list):
        cfg["lam"] = complex(*cfg["lam"])
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    a = parser.parse_args(argv)
    try:
        if a.command == "phantom":
            comps = []
            for b in a.bump or []:
                v = [float(x) for x in b.split(",")]
                if len(v) not in (a.n + 1, a.n + 2):
                    raise ConfigError(f"bump {b!r} needs {a.n} coordinates and a width")
                comps.append(Bump(tuple(v[:a.n]), v[a.n], v[a.n + 1] if len(v) > a.n + 1 else 1.0))
            f = make_phantom(_grid(a.n, a.size, a.half_width), comps)
            if a.csv:
                Path(a.out).write_text(gio.grid_to_csv(f))
            else:
                gio.save(a.out, f)
            return 0
        if a.command == "report":
            svg, table = report_render(a.metrics, a.out)
            if a.out is None:
                sys.stdout.write(table)
            return 0
        if a.command == "run":
            cfg = _load_config(a.config)
        else:
            cfg = _config_from_args(a)
            if isinstance(cfg.get("lam"), list):
                cfg["lam"] = complex(*cfg["lam"])
        validate(cfg)
    except (ConfigError, ReportError, FileNotFoundError, json.JSONDecodeError) as exc:
        parser.error(str(exc))
    metrics, status = run(cfg, a.out if a.command == "run" else None)
    for name in metrics.get("failing_thresholds", []):
        print(f"threshold failed: {name} = {metrics.get(name)}", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
