"""Deterministic SVG renderings of domains, curves, and witnesses.

Fixed 1000 x 1000 canvas, fixed decimal formatting, elements emitted in a
fixed order: byte-stable output for identical inputs.
"""

from __future__ import annotations

import numpy as np

CANVAS = 1000.0
MARGIN = 0.05


def _fmt(v):
    return f"{v:.3f}"


class _Frame:
    def __init__(self, xmin, ymin, xmax, ymax):
        w = max(xmax - xmin, 1e-9)
        h = max(ymax - ymin, 1e-9)
        s = CANVAS * (1.0 - 2.0 * MARGIN) / max(w, h)
        self.s = s
        self.ox = (CANVAS - s * w) / 2.0 - s * xmin
        # SVG y axis points down
        self.oy = CANVAS - ((CANVAS - s * h) / 2.0 - s * ymin)

    def map(self, p):
        return self.ox + self.s * p[0], self.oy - self.s * p[1]


def _bbox(rings, curve_points):
    pts = [np.asarray(r, float) for r in rings if len(r)] + [
        np.asarray(c, float) for c in curve_points if len(c)
    ]
    if not pts:
        return (0.0, 0.0, 1.0, 1.0)
    allp = np.concatenate(pts)
    return (
        float(allp[:, 0].min()),
        float(allp[:, 1].min()),
        float(allp[:, 0].max()),
        float(allp[:, 1].max()),
    )


def _ring_path(frame, ring):
    parts = []
    for i, p in enumerate(ring):
        x, y = frame.map(p)
        parts.append(f"{'M' if i == 0 else 'L'} {_fmt(x)} {_fmt(y)}")
    parts.append("Z")
    return " ".join(parts)


def render_scene(domain_rings=(), curves=(), witnesses=(), stage_points=()):
    """Compose the SVG document.

    domain_rings: sequence of rings, first the outline, the rest holes; they
    share one path element with the even-odd fill rule so the domain outline
    stays a single closed path.  curves: sequences of (x, y).  witnesses and
    stage_points: (x, y) markers.
    """
    frame = _Frame(*_bbox(domain_rings, list(curves)))
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{int(CANVAS)}" height="{int(CANVAS)}" '
        f'viewBox="0 0 {int(CANVAS)} {int(CANVAS)}">',
        f'<rect width="{int(CANVAS)}" height="{int(CANVAS)}" fill="white"/>',
    ]
    if domain_rings:
        d = " ".join(_ring_path(frame, r) for r in domain_rings)
        out.append(f'<path class="outline" d="{d}" fill="none" stroke="black" stroke-width="2" fill-rule="evenodd"/>')
    for cv in curves:
        if len(cv) < 2:
            continue
        pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in (frame.map(p) for p in cv))
        out.append(f'<polyline class="curve" points="{pts}" fill="none" stroke="blue" stroke-width="1.5"/>')
    for p in stage_points:
        x, y = frame.map(p)
        out.append(f'<circle class="stage" cx="{_fmt(x)}" cy="{_fmt(y)}" r="3" fill="none" stroke="blue"/>')
    for p in witnesses:
        x, y = frame.map(p)
        out.append(f'<circle class="witness" cx="{_fmt(x)}" cy="{_fmt(y)}" r="4" fill="red"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_report(report):
    """SVG for a report dict produced by the CLI commands."""
    rings = []
    dom = report.get("domain")
    if dom:
        if "outer" in dom:
            rings = [dom["outer"]] + list(dom.get("holes", []))
        elif "disk" in dom:
            c = dom["disk"].get("center", [0.0, 0.0])
            r = dom["disk"].get("radius", 1.0)
            th = np.linspace(0.0, 2.0 * np.pi, 128, endpoint=False)
            rings = [np.column_stack([c[0] + r * np.cos(th), c[1] + r * np.sin(th)])]
    curves = [c["vertices"] for c in report.get("curves", []) if "vertices" in c]
    if "curve" in report and "vertices" in report["curve"]:
        curves.append(report["curve"]["vertices"])
    witnesses = [w for w in report.get("witness_points", [])]
    stages = []
    if "curve" in report:
        for st in report["curve"].get("stages", []):
            if "from_pos" in st:
                stages.append(st["from_pos"])
        if report["curve"].get("stages") and "to_pos" in report["curve"]["stages"][-1]:
            stages.append(report["curve"]["stages"][-1]["to_pos"])
    return render_scene(rings, curves, witnesses, stages)
