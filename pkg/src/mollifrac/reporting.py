"""Report artifacts: canonical JSON, series CSV, static SVG plots.

Reports are deterministic for a fixed config/seed/thread budget: the JSON
is dumped with sorted keys and wall-clock metadata is segregated under the
single "meta" key, which consumers exclude when comparing runs.
"""

from __future__ import annotations

import csv
import json
import math
import time
from pathlib import Path

import numpy as np


def _jsonable(obj):
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def write_report(path: Path | str, config: dict, result: dict,
                 runtime_seconds: float) -> None:
    payload = {
        "config": config,
        "result": result,
        "meta": {
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
            "runtime_seconds": runtime_seconds,
        },
    }
    Path(path).write_text(json.dumps(payload, sort_keys=True, indent=2,
                                     default=_jsonable) + "\n")


def strip_meta(path: Path | str) -> str:
    """Canonical report text without the metadata key (determinism checks)."""
    payload = json.loads(Path(path).read_text())
    payload.pop("meta", None)
    return json.dumps(payload, sort_keys=True, indent=2)


def write_series_csv(path: Path | str, rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=[
            "epsilon", "value", "value_over_abslog", "error_estimate"])
        writer.writeheader()
        for row in rows:
            writer.writerow({k: repr(row[k]) for k in writer.fieldnames})


def _svg_polyline(points, color, width=1.5, dash=None):
    pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in points)
    dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
    return (f'<polyline fill="none" stroke="{color}" '
            f'stroke-width="{width}"{dash_attr} points="{pts}"/>')


def write_convergence_svg(path: Path | str, rows: list[dict],
                          predicted: float | None,
                          title: str = "") -> None:
    """value/|ln eps| against |ln eps| with the predicted limit as a dashed
    horizontal asymptote.  Self-contained SVG, no plotting dependency."""
    W, H, ML, MR, MT, MB = 640, 420, 70, 20, 40, 50
    xs = [abs(math.log(r["epsilon"])) for r in rows]
    ys = [r["value_over_abslog"] for r in rows]
    y_all = ys + ([predicted] if predicted else [])
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(y_all), max(y_all)
    pad = 0.1 * max(y1 - y0, 1e-12)
    y0, y1 = y0 - pad, y1 + pad
    if x1 <= x0:
        x1 = x0 + 1.0

    def sx(x):
        return ML + (x - x0) / (x1 - x0) * (W - ML - MR)

    def sy(y):
        return H - MB - (y - y0) / (y1 - y0) * (H - MT - MB)

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" '
             f'height="{H}" viewBox="0 0 {W} {H}">',
             f'<rect width="{W}" height="{H}" fill="white"/>',
             f'<text x="{W/2:.0f}" y="24" text-anchor="middle" '
             f'font-family="sans-serif" font-size="14">{title}</text>']
    # axes
    parts.append(_svg_polyline([(ML, MT), (ML, H - MB), (W - MR, H - MB)],
                               "#333", 1.0))
    for i in range(5):
        xv = x0 + i * (x1 - x0) / 4
        yv = y0 + i * (y1 - y0) / 4
        parts.append(f'<text x="{sx(xv):.0f}" y="{H - MB + 18}" '
                     f'text-anchor="middle" font-family="sans-serif" '
                     f'font-size="11">{xv:.2f}</text>')
        parts.append(f'<text x="{ML - 8}" y="{sy(yv) + 4:.0f}" '
                     f'text-anchor="end" font-family="sans-serif" '
                     f'font-size="11">{yv:.3f}</text>')
    parts.append(f'<text x="{(ML + W - MR) / 2:.0f}" y="{H - 12}" '
                 f'text-anchor="middle" font-family="sans-serif" '
                 f'font-size="12">|ln eps|</text>')
    parts.append(f'<text x="16" y="{(MT + H - MB) / 2:.0f}" '
                 f'font-family="sans-serif" font-size="12" '
                 f'transform="rotate(-90 16 {(MT + H - MB) / 2:.0f})" '
                 f'text-anchor="middle">value / |ln eps|</text>')
    if predicted is not None:
        yp = sy(predicted)
        parts.append(_svg_polyline([(ML, yp), (W - MR, yp)], "#c22", 1.2,
                                   dash="6,4"))
        parts.append(f'<text x="{W - MR - 4}" y="{yp - 6:.0f}" '
                     f'text-anchor="end" font-family="sans-serif" '
                     f'font-size="11" fill="#c22">predicted '
                     f'{predicted:.4f}</text>')
    pts = [(sx(x), sy(y)) for x, y in zip(xs, ys)]
    parts.append(_svg_polyline(pts, "#226", 1.5))
    for x, y in pts:
        parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3" fill="#226"/>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n")
