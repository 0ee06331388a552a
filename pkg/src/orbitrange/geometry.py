"""Planar convex geometry on complex-number vertex arrays.

Polygons are 1-D complex arrays of vertices in counterclockwise order.  Points
and segments are allowed as degenerate polygons (one or two vertices).
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "convex_hull", "halfplane_polygon", "polygon_support", "distance_to_polygon",
    "hausdorff", "minkowski_sum", "diameter", "convex_weights", "signed_margin",
]


def _cross(o, a, b):
    return (a.real - o.real) * (b.imag - o.imag) - (a.imag - o.imag) * (b.real - o.real)


def convex_hull(points, tol=0.0):
    """Counterclockwise hull vertices (monotone chain), dropping collinear points."""
    pts = np.unique(np.asarray(points, dtype=complex).ravel())
    if pts.size <= 1:
        return pts
    order = np.lexsort((pts.imag, pts.real))
    pts = pts[order]
    if pts.size == 2:
        return pts

    def chain(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and _cross(out[-2], out[-1], p) <= tol:
                out.pop()
            out.append(p)
        return out

    lower = chain(pts)
    upper = chain(pts[::-1])
    hull = np.array(lower[:-1] + upper[:-1], dtype=complex)
    if hull.size == 0:
        return pts[[0, -1]]
    return hull


def polygon_support(vertices, theta):
    """``max Re(exp(-1j*theta) * v)`` over the vertices; ``theta`` may be an array."""
    v = np.asarray(vertices, dtype=complex)
    theta = np.asarray(theta, dtype=float)
    rot = np.exp(-1j * theta)[..., None]
    return (rot * v).real.max(axis=-1)


def halfplane_polygon(thetas, h):
    """Intersection of the halfplanes ``Re(exp(-1j*theta_j) * z) <= h_j``.

    Vertices are the intersections of angularly consecutive boundary lines,
    which stay well conditioned for thin or zero-width regions.  When ``h``
    is a support function this is exactly the halfplane polygon; otherwise
    the hull is a (slightly larger) superset of it.  Consecutive directions
    must be less than ``pi`` apart.
    """
    thetas = np.mod(np.asarray(thetas, dtype=float), 2 * np.pi)
    h = np.asarray(h, dtype=float)
    order = np.argsort(thetas, kind="stable")
    t1, h1 = thetas[order], h[order]
    t2, h2 = np.roll(t1, -1), np.roll(h1, -1)
    gap = np.mod(t2 - t1, 2 * np.pi)
    if gap.max(initial=0.0) >= np.pi or thetas.size < 3:
        raise ValueError("directions must surround the origin with gaps below pi")
    keep = gap > 1e-15
    t1, h1, t2, h2 = t1[keep], h1[keep], t2[keep], h2[keep]
    det = np.sin(t2 - t1)
    x = (h1 * np.sin(t2) - h2 * np.sin(t1)) / det
    y = (h2 * np.cos(t1) - h1 * np.cos(t2)) / det
    return convex_hull(x + 1j * y)


def distance_to_polygon(vertices, z):
    """Euclidean distance from points ``z`` to a convex polygon (0 inside)."""
    P = np.asarray(vertices, dtype=complex)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if P.size == 0:
        return np.full(z.shape, np.inf)
    if P.size == 1:
        return np.abs(z - P[0])
    a = P
    b = np.roll(P, -1)
    if P.size == 2:
        a, b = P[:1], P[1:]
    d = b - a
    L2 = np.abs(d) ** 2
    L2 = np.where(L2 == 0, 1.0, L2)
    t = ((z[:, None] - a[None, :]) * np.conj(d)[None, :]).real / L2[None, :]
    t = np.clip(t, 0.0, 1.0)
    dist = np.abs(z[:, None] - (a[None, :] + t * d[None, :])).min(axis=1)
    if P.size >= 3:
        cross = (np.conj(d)[None, :] * (z[:, None] - a[None, :])).imag
        inside = (cross >= 0).all(axis=1)
        dist = np.where(inside, 0.0, dist)
    return dist


def signed_margin(vertices, z):
    """``min_j (h_P(phi_j) - Re(exp(-1j*phi_j) z))`` over the polygon's edge normals.

    Nonnegative iff ``z`` lies inside the polygon; for polygons with fewer
    than three vertices a dense set of normals is used.
    """
    P = np.asarray(vertices, dtype=complex)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if P.size >= 3:
        d = np.roll(P, -1) - P
        normal = -1j * d / np.abs(d)
        phi = np.angle(normal)
    else:
        phi = np.linspace(0, 2 * np.pi, 720, endpoint=False)
    h = polygon_support(P, phi)
    proj = (np.exp(-1j * phi)[None, :] * z[:, None]).real
    return (h[None, :] - proj).min(axis=1)


def hausdorff(P, Q):
    """Hausdorff distance between two convex polygons."""
    P = np.asarray(P, dtype=complex)
    Q = np.asarray(Q, dtype=complex)
    if P.size == 0 or Q.size == 0:
        return 0.0 if P.size == Q.size else np.inf
    return float(max(distance_to_polygon(Q, P).max(), distance_to_polygon(P, Q).max()))


def minkowski_sum(P, Q):
    P = np.asarray(P, dtype=complex)
    Q = np.asarray(Q, dtype=complex)
    return convex_hull((P[:, None] + Q[None, :]).ravel())


def diameter(P):
    P = np.asarray(P, dtype=complex)
    if P.size < 2:
        return 0.0
    return float(np.abs(P[:, None] - P[None, :]).max())


def convex_weights(points, z):
    """Carathéodory weights for ``z`` in the hull of ``points``.

    Returns ``(indices, weights, residual)`` with at most three indices into
    ``points``.  When ``z`` lies outside the hull the nearest hull point is
    represented and the residual is its distance to ``z``.  Hull vertices are
    fanned from the lowest-index vertex so earlier points win ties.
    """
    pts = np.asarray(points, dtype=complex)
    if pts.size == 0:
        raise ValueError("no points")
    z = complex(z)
    hull = convex_hull(pts)
    first = {}
    for k, p in enumerate(pts):
        first.setdefault(complex(p), k)
    ids = [first[complex(p)] for p in hull]
    if len(ids) == 1:
        return np.array(ids), np.array([1.0]), abs(pts[ids[0]] - z)
    if len(ids) >= 3:
        apex = min(range(len(ids)), key=lambda k: ids[k])
        ids = ids[apex:] + ids[:apex]
        a = pts[ids[0]]
        for k in range(1, len(ids) - 1):
            b, c = pts[ids[k]], pts[ids[k + 1]]
            M = np.array([[b.real - a.real, c.real - a.real],
                          [b.imag - a.imag, c.imag - a.imag]])
            if abs(np.linalg.det(M)) < 1e-300:
                continue
            u, v = np.linalg.solve(M, [z.real - a.real, z.imag - a.imag])
            if u >= -1e-12 and v >= -1e-12 and u + v <= 1 + 1e-12:
                u, v = max(u, 0.0), max(v, 0.0)
                if u + v > 1:
                    u, v = u / (u + v), v / (u + v)
                w = np.array([1 - u - v, u, v])
                r = abs(w[0] * a + w[1] * b + w[2] * c - z)
                return np.array([ids[0], ids[k], ids[k + 1]]), w, float(r)
    # outside (or degenerate hull): nearest point on a hull edge
    best = None
    m = len(ids)
    for k in range(m if m > 2 else 1):
        i, j = ids[k], ids[(k + 1) % m]
        d = pts[j] - pts[i]
        L2 = abs(d) ** 2
        t = 0.0 if L2 == 0 else min(max(((z - pts[i]) * np.conj(d)).real / L2, 0.0), 1.0)
        r = abs(pts[i] + t * d - z)
        if best is None or r < best[2] - 1e-15:
            best = (np.array([i, j]), np.array([1 - t, t]), float(r))
    return best
