"""Canonical domains and graphs used by the test suite, docs, and CLI demos."""

from __future__ import annotations

import numpy as np

from .domain import Disk, GraphSpace, PolygonalDomain


def unit_disk():
    """Analytic unit disk; boundary distance 1 - |p| carries no polygon error."""
    return Disk((0.0, 0.0), 1.0)


def unit_disk_polygon(n=256):
    th = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    return PolygonalDomain(np.column_stack([np.cos(th), np.sin(th)]), validate=False)


def unit_square():
    return PolygonalDomain([(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])


def rectangle(width, height):
    return PolygonalDomain([(0.0, 0.0), (width, 0.0), (width, height), (0.0, height)])


def square_with_hole():
    return PolygonalDomain(
        [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)],
        holes=[[(0.4, 0.4), (0.6, 0.4), (0.6, 0.6), (0.4, 0.6)]],
    )


def l_shape():
    """Unit square minus its top-right quadrant."""
    return PolygonalDomain([(0.0, 0.0), (1.0, 0.0), (1.0, 0.5), (0.5, 0.5), (0.5, 1.0), (0.0, 1.0)])


L_SHAPE_CENTER = (0.3, 0.3)


def slit_rectangle(slit_x=1.0, slit_width=0.06, slit_bottom=0.3):
    """2 x 1 rectangle with a thin slit cut downward from the top edge."""
    hw = slit_width / 2.0
    return PolygonalDomain(
        [
            (0.0, 0.0),
            (2.0, 0.0),
            (2.0, 1.0),
            (slit_x + hw, 1.0),
            (slit_x + hw, slit_bottom),
            (slit_x - hw, slit_bottom),
            (slit_x - hw, 1.0),
            (0.0, 1.0),
        ]
    )


SLIT_CENTER = (0.5, 0.5)


def rooms_and_corridor(width=0.2):
    """Two unit rooms joined by a corridor of the given width."""
    hw = width / 2.0
    return PolygonalDomain(
        [
            (0.0, 0.0),
            (1.0, 0.0),
            (1.0, 0.5 - hw),
            (1.5, 0.5 - hw),
            (1.5, 0.0),
            (2.5, 0.0),
            (2.5, 1.0),
            (1.5, 1.0),
            (1.5, 0.5 + hw),
            (1.0, 0.5 + hw),
            (1.0, 1.0),
            (0.0, 1.0),
        ]
    )


def path_graph_space(n=5, length=1.0):
    """Path of interior vertices with one boundary vertex hanging off v0."""
    vertices = [f"v{i}" for i in range(n)] + ["b"]
    edges = [(f"v{i}", f"v{i+1}", length) for i in range(n - 1)] + [("v0", "b", length)]
    return GraphSpace(vertices, edges, boundary=["b"])


def small_graph_space():
    """5 interior vertices, two boundary anchors, an off-tree shortcut."""
    vertices = ["a", "b", "c", "d", "e", "x", "y"]
    edges = [
        ("a", "b", 1.0),
        ("b", "c", 0.8),
        ("c", "d", 1.2),
        ("d", "e", 0.5),
        ("a", "e", 2.1),
        ("b", "d", 1.7),
        ("a", "x", 0.9),
        ("e", "y", 0.6),
    ]
    return GraphSpace(vertices, edges, boundary=["x", "y"])


def random_graph_space(seed, n_min=4, n_max=12):
    """Random connected boundary-marked graph with <= n_max interior vertices."""
    rng = np.random.default_rng(seed)
    while True:
        n = int(rng.integers(n_min, n_max + 1))
        names = [f"v{i}" for i in range(n)]
        edges = []
        for i in range(1, n):
            j = int(rng.integers(0, i))
            edges.append((names[i], names[j], float(rng.uniform(0.2, 2.0))))
        extra = int(rng.integers(0, n))
        for _ in range(extra):
            i, j = rng.integers(0, n, size=2)
            if i != j:
                edges.append((names[int(i)], names[int(j)], float(rng.uniform(0.2, 2.0))))
        n_boundary = int(rng.integers(1, 3))
        boundary = []
        for k in range(n_boundary):
            anchor = names[int(rng.integers(0, n))]
            bname = f"b{k}"
            boundary.append(bname)
            edges.append((anchor, bname, float(rng.uniform(0.2, 1.0))))
        try:
            return GraphSpace(names + boundary, edges, boundary=boundary)
        except Exception:
            continue  # interior disconnected for this draw; resample
