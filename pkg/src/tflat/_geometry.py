"""Convex polygon arithmetic and exact cover measurement.

Everything here is generic over the scalar type: pass Fractions for exact
certificates, floats for quick checks.  Polygons are lists of (x, y)
vertices, convex, positively oriented, no repeated points.

The cover measurement works on the torus R^2 / Z^2: pieces are reduced
into the unit cell and the multiplicity function of the resulting
arrangement is integrated exactly by vertical decomposition (strips split
at every vertex and every pairwise edge crossing; within a strip the
slab boundaries are non-crossing lines, so slab areas are width times the
midpoint height difference, which is exact for linear boundaries).
"""

from __future__ import annotations

from fractions import Fraction


def shoelace(poly):
    s = 0
    n = len(poly)
    for i in range(n):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % n]
        s += x1 * y2 - x2 * y1
    return s / 2


def orient_ccw(poly):
    return poly if shoelace(poly) >= 0 else poly[::-1]


def clip_halfplane(poly, a, b, c):
    """Keep the part of poly with a*x + b*y <= c (Sutherland-Hodgman)."""
    out = []
    n = len(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        fp = a * p[0] + b * p[1] - c
        fq = a * q[0] + b * q[1] - c
        if fp <= 0:
            out.append(p)
            if fq > 0:
                t = fp / (fp - fq)
                out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
        elif fq <= 0:
            t = fp / (fp - fq)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    # drop consecutive duplicates
    dedup = [pt for i, pt in enumerate(out) if pt != out[i - 1]] if out else []
    return dedup


def clip_to_box(poly, x0, x1, y0, y1):
    for args in ((-1, 0, -x0), (1, 0, x1), (0, -1, -y0), (0, 1, y1)):
        poly = clip_halfplane(poly, *args)
        if len(poly) < 3:
            return []
    return poly


def convex_intersection_area(p, q):
    """Area of the intersection of two convex polygons."""
    poly = list(p)
    q = orient_ccw(list(q))
    n = len(q)
    for i in range(n):
        (x1, y1), (x2, y2) = q[i], q[(i + 1) % n]
        # inside is to the left of the ccw edge: (x2-x1)(y-y1)-(y2-y1)(x-x1) >= 0
        a = y2 - y1
        b = -(x2 - x1)
        c = a * x1 + b * y1
        poly = clip_halfplane(poly, a, b, c)
        if len(poly) < 3:
            return 0 * (x1 - x1)
    return abs(shoelace(poly))


def parallelepiped_polygon(offset, matrix):
    """Vertices of offset + matrix*[0,1)^2, positively oriented."""
    ox, oy = offset
    (m00, m01), (m10, m11) = matrix
    pts = [
        (ox, oy),
        (ox + m00, oy + m10),
        (ox + m00 + m01, oy + m10 + m11),
        (ox + m01, oy + m11),
    ]
    return orient_ccw(pts)


def _floor(x):
    if isinstance(x, Fraction):
        return x.numerator // x.denominator
    import math
    return math.floor(x)


def reduce_polygon_mod_unit(poly):
    """Split a polygon along the integer grid and translate every part
    into [0,1)^2.  Returns a list of convex polygons with positive area."""
    xs = [p[0] for p in poly]
    ys = [p[1] for p in poly]
    out = []
    for a in range(_floor(min(xs)), _floor(max(xs)) + 1):
        for b in range(_floor(min(ys)), _floor(max(ys)) + 1):
            part = clip_to_box(list(poly), a, a + 1, b, b + 1)
            if len(part) < 3:
                continue
            shifted = [(x - a, y - b) for x, y in part]
            if abs(shoelace(shifted)) > 0:
                out.append(orient_ccw(shifted))
    return out


def _edges(poly):
    return [(poly[i], poly[(i + 1) % len(poly)]) for i in range(len(poly))]


def _cross_section(poly, xm):
    """y-interval cut by the vertical line x = xm (xm hits no vertex)."""
    ys = []
    for (x1, y1), (x2, y2) in _edges(poly):
        if (x1 - xm) * (x2 - xm) < 0:
            t = (xm - x1) / (x2 - x1)
            ys.append(y1 + t * (y2 - y1))
    if not ys:
        return None
    return min(ys), max(ys)


def cover_measures(polys, one=Fraction(1)):
    """Multiplicity measure of an arrangement of convex polygons inside
    the unit cell.  Returns {multiplicity: measure}, including the
    uncovered measure at key 0.  Exact when vertices are Fractions.
    """
    zero = one * 0
    measures: dict[int, object] = {}
    if not polys:
        return {0: one}
    # breakpoints: cell walls, vertices, pairwise edge crossings
    xs = {zero, one}
    for poly in polys:
        for x, _ in poly:
            if zero < x < one:
                xs.add(x)
    all_edges = [e for poly in polys for e in _edges(poly)]
    spans = [(min(p[0], q[0]), max(p[0], q[0])) for p, q in all_edges]
    n = len(all_edges)
    for i in range(n):
        (x1, y1), (x2, y2) = all_edges[i]
        for j in range(i + 1, n):
            if spans[j][0] > spans[i][1] or spans[i][0] > spans[j][1]:
                continue
            (x3, y3), (x4, y4) = all_edges[j]
            d = (x2 - x1) * (y4 - y3) - (y2 - y1) * (x4 - x3)
            if d == 0:
                continue
            t = ((x3 - x1) * (y4 - y3) - (y3 - y1) * (x4 - x3)) / d
            if not (0 <= t <= 1):
                continue
            xc = x1 + t * (x2 - x1)
            # keep only crossings interior to both edges' x-ranges
            if min(x3, x4) <= xc <= max(x3, x4) and zero < xc < one:
                xs.add(xc)
    xs = sorted(xs)
    poly_spans = [(min(x for x, _ in poly), max(x for x, _ in poly))
                  for poly in polys]
    for k in range(len(xs) - 1):
        x1, x2 = xs[k], xs[k + 1]
        width = x2 - x1
        if width == 0:
            continue
        xm = (x1 + x2) / 2
        events = []
        for poly, (pxmin, pxmax) in zip(polys, poly_spans):
            if pxmin >= x2 or pxmax <= x1:
                continue
            sec = _cross_section(poly, xm)
            if sec is not None:
                lo, hi = sec
                events.append((lo, 1))
                events.append((hi, -1))
        events.sort()
        y_prev, mult = zero, 0
        for y, delta in events:
            if y > y_prev:
                measures[mult] = measures.get(mult, zero) + width * (y - y_prev)
            y_prev = max(y_prev, y)
            mult += delta
        if y_prev < one:
            measures[0] = measures.get(0, zero) + width * (one - y_prev)
    return {m: v for m, v in measures.items() if v > 0}


# ----------------------------------------------------------------------
# 1-d analogue

def reduce_interval_mod_unit(lo, hi):
    """Split [lo, hi) at integers and translate into [0,1)."""
    out = []
    a = _floor(lo)
    while a < hi:
        l = max(lo, a)
        r = min(hi, a + 1)
        if r > l:
            out.append((l - a, r - a))
        a += 1
    return out


def cover_measures_1d(intervals, one=Fraction(1)):
    zero = one * 0
    events = []
    for lo, hi in intervals:
        events.append((lo, 1))
        events.append((hi, -1))
    events.sort()
    measures: dict[int, object] = {}
    y_prev, mult = zero, 0
    for y, delta in events:
        if y > y_prev:
            measures[mult] = measures.get(mult, zero) + (y - y_prev)
        y_prev = max(y_prev, y)
        mult += delta
    if y_prev < one:
        measures[0] = measures.get(0, zero) + (one - y_prev)
    return {m: v for m, v in measures.items() if v > 0}
