"""Roofline plot data and portability tables."""

from __future__ import annotations

import csv
import math

from .model import (UNSUPPORTED, KernelIntensitySet, MeasuredRun, PortabilityInput,
                    RooflinePlatform, pp_metric)

ROOFLINE_COLUMNS = ["series", "space", "intensity", "gflops"]
PORTABILITY_COLUMNS = ["platform", "space", "epsilon_gflops", "cap_gflops", "efficiency"]


def ceiling_points(plat: RooflinePlatform, space: str, i_lo: float = 1e-3, i_hi: float = 1e3):
    """Bandwidth slope up to the knee at T_peak/B, then the flat compute roof."""
    bw = plat.bandwidth[space]
    knee = plat.t_peak / bw
    lo = min(i_lo, knee / 10)
    hi = max(i_hi, knee * 10)
    return [(lo, bw * lo), (knee, plat.t_peak), (hi, plat.t_peak)]


def roofline_rows(plat: RooflinePlatform, ints: KernelIntensitySet | None = None, runs=()):
    rows = []
    for m in plat.bandwidth:
        for i, p in ceiling_points(plat, m):
            rows.append(("ceiling", m, i, p / 1e9))
    if ints is not None:
        for run in runs:
            for m, i in ints.intensity.items():
                rows.append((f"achieved:{run.app}/{run.problem}", m, i, run.epsilon / 1e9))
    return rows


def emit_roofline_report(plat: RooflinePlatform, ints: KernelIntensitySet | None, runs,
                         path, svg_path=None) -> list:
    """Write ceiling polylines and achieved points as CSV (and optionally SVG)."""
    rows = roofline_rows(plat, ints, runs)
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(ROOFLINE_COLUMNS)
        for s, m, i, p in rows:
            wr.writerow([s, m, repr(i), repr(p)])
    if svg_path is not None:
        with open(svg_path, "w") as fh:
            fh.write(roofline_svg(plat.id, rows))
    return rows


def roofline_svg(title: str, rows, width: int = 480, height: int = 360) -> str:
    """Bare-bones log-log SVG of the rows produced by :func:`roofline_rows`."""
    pad = 50
    xs = [r[2] for r in rows if r[2] > 0]
    ys = [r[3] for r in rows if r[3] > 0]
    if not xs or not ys:
        return f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}"/>\n'
    x0, x1 = math.floor(math.log10(min(xs))), math.ceil(math.log10(max(xs)))
    y0, y1 = math.floor(math.log10(min(ys))), math.ceil(math.log10(max(ys)))
    x1, y1 = max(x1, x0 + 1), max(y1, y0 + 1)

    def px(i, p):
        x = pad + (math.log10(i) - x0) / (x1 - x0) * (width - 2 * pad)
        y = height - pad - (math.log10(p) - y0) / (y1 - y0) * (height - 2 * pad)
        return f"{x:.1f},{y:.1f}"

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'font-family="sans-serif" font-size="10">',
           f'<text x="{width / 2}" y="15" text-anchor="middle">{title}</text>',
           f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" '
           'fill="none" stroke="black"/>']
    for e in range(x0, x1 + 1):
        x = px(10.0 ** e, 10.0 ** y0).split(",")[0]
        out.append(f'<text x="{x}" y="{height - pad + 14}" text-anchor="middle">1e{e}</text>')
    for e in range(y0, y1 + 1):
        y = px(10.0 ** x0, 10.0 ** e).split(",")[1]
        out.append(f'<text x="{pad - 4}" y="{y}" text-anchor="end">1e{e}</text>')
    out.append(f'<text x="{width / 2}" y="{height - 10}" text-anchor="middle">FLOP/byte</text>')
    out.append(f'<text x="12" y="{height / 2}" transform="rotate(-90 12 {height / 2})" '
               'text-anchor="middle">GFLOP/s</text>')
    spaces = sorted({r[1] for r in rows if r[0] == "ceiling"})
    for m in spaces:
        pts = " ".join(px(i, p) for s, mm, i, p in rows if s == "ceiling" and mm == m)
        out.append(f'<polyline points="{pts}" fill="none" stroke="steelblue"/>')
    for s, m, i, p in rows:
        if s != "ceiling":
            x, y = px(i, p).split(",")
            out.append(f'<circle cx="{x}" cy="{y}" r="3" fill="crimson"><title>{s} {m}</title></circle>')
    out.append("</svg>\n")
    return "\n".join(out)


def portability_rows(entries, space: str):
    """``entries`` holds (platform, intensities, run) triples; ``run`` None marks
    an unsupported platform.  Efficiency is computed from the GFLOPS columns so
    every row can be recomputed from itself."""
    rows = []
    effs = {}
    for plat, ints, run in entries:
        if run is None:
            rows.append((plat.id, space, "", "", "unsupported"))
            effs[plat.id] = UNSUPPORTED
            continue
        cap = min(plat.t_peak, plat.bandwidth[space] * ints.intensity[space]) / 1e9
        eps = run.epsilon / 1e9
        e = eps / cap
        rows.append((plat.id, space, eps, cap, e))
        effs[plat.id] = e
    return rows, pp_metric(PortabilityInput(effs)) if effs else 0.0


def write_portability_report(path, entries, space: str = "dram") -> float:
    rows, pp = portability_rows(entries, space)
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(PORTABILITY_COLUMNS)
        for r in rows:
            wr.writerow([x if isinstance(x, str) else repr(x) for x in r])
        wr.writerow([f"pp_metric_{space}", repr(pp)])
    return pp
