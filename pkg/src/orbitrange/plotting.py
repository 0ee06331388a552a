"""SVG rendering of regions with separate layers for each polygon."""

from __future__ import annotations

import io

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .serial import atomic_write  # noqa: E402

LAYERS = ("outer", "inner", "ess")


def _closed(P):
    P = np.asarray(P, dtype=complex)
    return np.append(P, P[:1]) if P.size else P


def region_svg(region, title="", points=None):
    """Return SVG text drawing the outer, inner and ess-range polygons.

    Each polygon is a group with ``id`` equal to its layer name.
    """
    fig, ax = plt.subplots(figsize=(5, 5))
    styles = {
        "outer": dict(color="tab:blue", lw=1.2, label="outer"),
        "inner": dict(color="tab:orange", lw=1.0, ls="--", label="inner"),
        "ess": dict(color="tab:green", lw=1.5, marker="o", ms=3, label="ess range"),
    }
    polys = {"outer": region.outer_polygon, "inner": region.inner_polygon,
             "ess": region.ess_polygon if region.ess_polygon is not None else np.zeros(0)}
    for name in LAYERS:
        P = _closed(polys[name])
        (line,) = ax.plot(P.real, P.imag, **styles[name])
        line.set_gid(name)
    if points is not None and len(points):
        pts = np.asarray(points)
        sc = ax.scatter(pts.real, pts.imag, s=1, color="0.6", alpha=0.4)
        sc.set_gid("samples")
    ax.set_aspect("equal", adjustable="datalim")
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")
    if title:
        ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    buf = io.StringIO()
    fig.savefig(buf, format="svg")
    plt.close(fig)
    return buf.getvalue()


def write_region_svg(region, path, title="", points=None):
    atomic_write(path, region_svg(region, title, points))
