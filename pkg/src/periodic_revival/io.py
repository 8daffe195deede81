"""CSV, JSON and SVG writers for run artefacts.

Floats are written with 17 significant digits so repeated runs produce
byte-identical files.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "" if math.isnan(v) else format(float(v), ".17g")
    return str(v)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence], comments=()) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(header)
        for row in rows:
            out.writerow([_fmt(v) for v in row])
    return path


def spectrum_rows(table, residuals, root_counts):
    for n, lam in enumerate(table.values):
        rc = root_counts[n] if root_counts is not None else ""
        yield (table.bc, n, float(lam), int(table.multiplicity[n]), float(residuals[n]), rc)


SPECTRUM_HEADER = ("bc", "n", "lambda", "multiplicity", "discriminant_residual", "root_count")
ASYMPTOTICS_HEADER = ("m", "lambda_lo", "lambda_hi", "model", "resid_lo", "resid_hi",
                      "scaled_lo", "scaled_hi", "alpha1", "beta1", "alpha2", "beta2", "y_m")
WAVEFIELD_HEADER = ("x", "re_u", "im_u", "abs_u")
DECOMPOSITION_HEADER = ("x", "re_u", "im_u", "re_psi", "im_psi", "re_w", "im_w")


def write_wavefield(path, field, N: int, potential_hash: str) -> Path:
    s = field.samples
    rows = zip(field.x, s.real, s.imag, np.abs(s))
    return write_csv(path, WAVEFIELD_HEADER, rows,
                     comments=(f"t={_fmt(field.time)}", f"N={N}", f"potential={potential_hash}"))


def write_decomposition(path, dec) -> Path:
    u, p, w = dec.u.samples, dec.psi_rev.samples, dec.w.samples
    rows = zip(dec.u.x, u.real, u.imag, p.real, p.imag, w.real, w.imag)
    return write_csv(path, DECOMPOSITION_HEADER, rows)


def _cplx(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def diagnostics_dict(dec, N: int) -> dict:
    return {
        "t": {"q": dec.time.q, "r": dec.time.r},
        "candidates": [
            {"x": float(x), "jump_u": _cplx(ju), "jump_psi": _cplx(jp), "jump_w": _cplx(jw)}
            for x, (ju, jp, jw) in zip(dec.candidate_jumps, dec.jump_table)
        ],
        "ratio": dec.ratio,
        "N": N,
        "delta": dec.delta,
    }


def write_json(path, data) -> Path:
    path = Path(path)
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    return path


_COLOURS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def write_svg(path, x: np.ndarray, series: dict[str, np.ndarray], title: str = "",
              width: int = 800, height: int = 400, max_points: int = 2000) -> Path:
    """Minimal line plot: one polyline per series, shared axes, legend top-left."""
    x = np.asarray(x, dtype=float)
    stride = max(1, x.size // max_points)
    xs = x[::stride]
    ys = {k: np.asarray(v, dtype=float)[::stride] for k, v in series.items()}
    lo = min(float(v.min()) for v in ys.values())
    hi = max(float(v.max()) for v in ys.values())
    if hi - lo < 1e-12:
        lo, hi = lo - 1.0, hi + 1.0
    pad = 40

    def px(a):
        return pad + (a - xs[0]) / (xs[-1] - xs[0]) * (width - 2 * pad)

    def py(b):
        return height - pad - (b - lo) / (hi - lo) * (height - 2 * pad)

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
             f'<rect width="{width}" height="{height}" fill="white"/>',
             f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-size="14">{title}</text>']
    if lo < 0 < hi:
        parts.append(f'<line x1="{pad}" x2="{width - pad}" y1="{py(0):.2f}" y2="{py(0):.2f}" '
                     'stroke="#bbb"/>')
    for i, (name, y) in enumerate(ys.items()):
        c = _COLOURS[i % len(_COLOURS)]
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(xs, y))
        parts.append(f'<polyline fill="none" stroke="{c}" stroke-width="1" points="{pts}"/>')
        parts.append(f'<text x="{pad + 5}" y="{pad + 14 * i}" font-size="12" fill="{c}">{name}</text>')
    parts.append(f'<text x="{pad}" y="{height - 10}" font-size="11">{xs[0]:.3g}</text>')
    parts.append(f'<text x="{width - pad}" y="{height - 10}" font-size="11" text-anchor="end">'
                 f'{xs[-1]:.3g}</text>')
    parts.append(f'<text x="5" y="{py(hi):.1f}" font-size="11">{hi:.3g}</text>')
    parts.append(f'<text x="5" y="{py(lo):.1f}" font-size="11">{lo:.3g}</text>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n")
    return Path(path)
