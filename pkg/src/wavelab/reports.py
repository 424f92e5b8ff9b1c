"""Report emission: CSV series tables, JSON round trips, SVG log-log plots.

Everything here is deterministic text generation; identical reports produce
byte-identical files.  Floats are written with repr so JSON and CSV reload
to exactly the values the experiment computed.
"""

from __future__ import annotations

import json
import math
import os

from .experiments import DecayReport, ExperimentError

_COLORS = ("#1f6fb2", "#c23b22", "#2e8b57", "#8a2be2", "#b8860b", "#444444")


def csv_text(report: DecayReport) -> str:
    names = list(report.series)
    lines = [",".join(["t"] + names)]
    for i, t in enumerate(report.times):
        row = [repr(float(t))] + [repr(float(report.series[n][i])) for n in names]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def json_text(report: DecayReport) -> str:
    return json.dumps(report.to_dict(), indent=2) + "\n"


def read_report(path: str) -> DecayReport:
    with open(path, "r", encoding="utf-8") as fh:
        return DecayReport.from_dict(json.load(fh))


def _log_ticks(lo: float, hi: float) -> list[int]:
    return list(range(math.ceil(lo - 1e-9), math.floor(hi + 1e-9) + 1))


def svg_text(report: DecayReport, width: int = 640, height: int = 480) -> str:
    """Self-contained log-log plot: series, fitted line, slope -1 guide."""
    ml, mr, mt, mb = 64.0, 16.0, 34.0, 46.0
    pw, ph = width - ml - mr, height - mt - mb

    ts = [float(t) for t in report.times]
    floor = 1e-16
    series = {
        name: [max(abs(float(v)), floor) for v in vals]
        for name, vals in report.series.items()
    }
    if not ts or not series:
        body = '<text x="320" y="240" text-anchor="middle">no samples</text>'
        return (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
            f'height="{height}" viewBox="0 0 {width} {height}">{body}</svg>\n'
        )

    xlo = math.log10(min(ts))
    xhi = math.log10(max(ts))
    all_vals = [v for vals in series.values() for v in vals]
    ylo = math.log10(min(all_vals))
    yhi = math.log10(max(all_vals))
    if xhi - xlo < 1e-9:
        xlo, xhi = xlo - 0.5, xhi + 0.5
    if yhi - ylo < 1e-9:
        ylo, yhi = ylo - 0.5, yhi + 0.5
    ylo -= 0.05 * (yhi - ylo)
    yhi += 0.05 * (yhi - ylo)

    def px(t: float) -> float:
        return ml + (math.log10(t) - xlo) / (xhi - xlo) * pw

    def py(v: float) -> float:
        return mt + (yhi - math.log10(max(v, floor))) / (yhi - ylo) * ph

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="monospace" font-size="12">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{ml:.1f}" y="{mt:.1f}" width="{pw:.1f}" height="{ph:.1f}" '
        'fill="none" stroke="#333"/>',
        f'<text x="{ml:.1f}" y="20" font-size="14">{report.kind} decay '
        f'(fitted exponent {report.fitted_exponent:.3f})</text>',
    ]
    for k in _log_ticks(xlo, xhi):
        x = px(10.0**k)
        parts.append(
            f'<line x1="{x:.1f}" y1="{mt:.1f}" x2="{x:.1f}" y2="{mt + ph:.1f}" '
            'stroke="#ddd"/>'
        )
        parts.append(
            f'<text x="{x:.1f}" y="{mt + ph + 16:.1f}" text-anchor="middle">1e{k}</text>'
        )
    for k in _log_ticks(ylo, yhi):
        y = py(10.0**k)
        parts.append(
            f'<line x1="{ml:.1f}" y1="{y:.1f}" x2="{ml + pw:.1f}" y2="{y:.1f}" '
            'stroke="#ddd"/>'
        )
        parts.append(
            f'<text x="{ml - 6:.1f}" y="{y + 4:.1f}" text-anchor="end">1e{k}</text>'
        )
    parts.append(
        f'<text x="{ml + pw / 2:.1f}" y="{height - 10}" text-anchor="middle">t</text>'
    )

    for i, (name, vals) in enumerate(series.items()):
        color = _COLORS[i % len(_COLORS)]
        pts = " ".join(f"{px(t):.2f},{py(v):.2f}" for t, v in zip(ts, vals))
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        ly = mt + 16 + 16 * i
        parts.append(
            f'<line x1="{ml + pw - 150:.1f}" y1="{ly - 4:.1f}" '
            f'x2="{ml + pw - 130:.1f}" y2="{ly - 4:.1f}" stroke="{color}" stroke-width="3"/>'
        )
        parts.append(f'<text x="{ml + pw - 124:.1f}" y="{ly:.1f}">{name}</text>')

    c, e = report.fitted_constant, report.fitted_exponent
    if c > 0.0 and math.isfinite(e):
        t0, t1 = min(ts), max(ts)
        parts.append(
            f'<line x1="{px(t0):.2f}" y1="{py(c * t0**e):.2f}" '
            f'x2="{px(t1):.2f}" y2="{py(c * t1**e):.2f}" '
            'stroke="#111" stroke-dasharray="6,4"/>'
        )
    first = next(iter(series.values()))
    anchor_t, anchor_v = ts[-1], max(first[-1], floor)
    g = anchor_v * anchor_t  # guide v = g / t through the last sample
    parts.append(
        f'<line x1="{px(ts[0]):.2f}" y1="{py(g / ts[0]):.2f}" '
        f'x2="{px(ts[-1]):.2f}" y2="{py(g / ts[-1]):.2f}" '
        'stroke="#999" stroke-dasharray="2,3"/>'
    )
    parts.append(
        f'<text x="{ml + 8:.1f}" y="{mt + ph - 8:.1f}" fill="#999">slope -1 guide</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit(report: DecayReport, out_dir: str, formats=("csv", "json", "svg")) -> list[str]:
    """Write the requested formats into out_dir; returns the paths written."""
    writers = {"csv": csv_text, "json": json_text, "svg": svg_text}
    bad = [f for f in formats if f not in writers]
    if bad:
        raise ExperimentError(f"unknown report formats {bad}")
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as exc:
        raise ExperimentError(f"cannot create output dir {out_dir!r}: {exc}") from exc
    paths = []
    for fmt in formats:
        path = os.path.join(out_dir, f"{report.kind}.{fmt}")
        try:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(writers[fmt](report))
        except OSError as exc:
            raise ExperimentError(f"cannot write {path!r}: {exc}") from exc
        paths.append(path)
    return paths
