"""Standalone SVG renderings of support areas and trajectories.

Drawings are deterministic: coordinates come only from the scene data
(no timestamps), formatted at fixed precision, 100 px per meter, y up.
"""

import numpy as np

SCALE = 100.0  # px per meter
PAD = 0.35     # m of padding around the drawn geometry


def _fmt(v):
    return f"{v:.3f}"


class _Canvas:
    def __init__(self):
        self.elements = []
        self.points = []

    def track(self, xy):
        for p in np.asarray(xy, dtype=float).reshape(-1, 2):
            self.points.append(p)

    def polygon(self, verts, fill, stroke, opacity="0.55"):
        verts = np.asarray(verts, dtype=float).reshape(-1, 2)
        if len(verts) < 2:
            return
        self.track(verts)
        pts = " ".join(f"{_fmt(p[0] * SCALE)},{_fmt(-p[1] * SCALE)}" for p in verts)
        self.elements.append(
            f'<polygon points="{pts}" fill="{fill}" fill-opacity="{opacity}" '
            f'stroke="{stroke}" stroke-width="1.5"/>'
        )

    def polyline(self, verts, stroke, width="1.5", dash=None):
        verts = np.asarray(verts, dtype=float).reshape(-1, 2)
        if len(verts) < 2:
            return
        self.track(verts)
        pts = " ".join(f"{_fmt(p[0] * SCALE)},{_fmt(-p[1] * SCALE)}" for p in verts)
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        self.elements.append(
            f'<polyline points="{pts}" fill="none" stroke="{stroke}" '
            f'stroke-width="{width}"{dash_attr}/>'
        )

    def dot(self, xy, color, radius=3.0):
        self.track([xy])
        self.elements.append(
            f'<circle cx="{_fmt(xy[0] * SCALE)}" cy="{_fmt(-xy[1] * SCALE)}" '
            f'r="{_fmt(radius)}" fill="{color}"/>'
        )

    def render(self, legend_lines):
        pts = np.asarray(self.points, dtype=float).reshape(-1, 2)
        if len(pts) == 0:
            pts = np.zeros((1, 2))
        lo = pts.min(axis=0) - PAD
        hi = pts.max(axis=0) + PAD
        x0, y0 = lo[0] * SCALE, -hi[1] * SCALE
        w, h = (hi[0] - lo[0]) * SCALE, (hi[1] - lo[1]) * SCALE
        legend_h = 16 * (len(legend_lines) + 1)
        texts = [
            f'<text x="{_fmt(x0 + 6)}" y="{_fmt(y0 + h + 16 * (i + 1))}" '
            f'font-family="monospace" font-size="12">{line}</text>'
            for i, line in enumerate(legend_lines)
        ]
        body = "\n".join(self.elements + texts)
        return (
            '<svg xmlns="http://www.w3.org/2000/svg" '
            f'viewBox="{_fmt(x0)} {_fmt(y0)} {_fmt(w)} {_fmt(h + legend_h)}" '
            f'width="{_fmt(w)}" height="{_fmt(h + legend_h)}">\n'
            f'<rect x="{_fmt(x0)}" y="{_fmt(y0)}" width="{_fmt(w)}" '
            f'height="{_fmt(h + legend_h)}" fill="white"/>\n'
            f"{body}\n</svg>\n"
        )


def _area_components(area, bound):
    fills = []
    if area.kind == "polygon":
        fills.append(area.polygon.vertices)
    else:
        fills.extend(p.vertices for p in area.clipped_polygons(bound))
    return [f for f in fills if len(f) >= 2]


def render_area(scene, plane, area, vertices=None, legend=()):
    """SVG of a support area in plane coordinates, with contacts and ray hits."""
    canvas = _Canvas()
    contact_xy = plane.to_plane(np.array([c.position for c in scene.points]))
    extent = max(1.0, float(np.max(np.abs(contact_xy))) * 4.0)
    for fill in _area_components(area, extent):
        canvas.polygon(fill, "#77cc77", "#227722")
    for c in scene.points:
        canvas.dot(plane.to_plane(c.position), "#333333", 2.5)
    if vertices:
        for v in vertices:
            canvas.dot(v.point_plane, "#2244cc" if v.pressure > 0 else "#cc2222", 2.0)
    com_xy = plane.to_plane(scene.com)
    canvas.dot(com_xy, "#000000", 3.5)
    lines = [f"shape: {area.kind}", "dots: contacts (gray), ray hits (+blue/-red), COM (black)"]
    lines.extend(legend)
    return canvas.render(lines)


def render_trajectory(solution, area_start, area_end, feasible, legend=()):
    """Top view of COM and ZMP paths with the endpoint pendular areas."""
    canvas = _Canvas()
    for area in (area_start, area_end):
        if area is not None:
            for fill in _area_components(area, 5.0):
                canvas.polygon(fill, "#77cc77", "#227722", opacity="0.35")
    com = solution.com_points()[:, :2]
    zmp = solution.zmp_points()[:, :2]
    canvas.polyline(com, "#117711", "2")
    canvas.polyline(zmp, "#cc2222", "2", dash="4 3")
    canvas.dot(com[0], "#117711", 3.5)
    canvas.dot(com[-1], "#117711", 3.5)
    for k, ok in enumerate(feasible):
        if not ok:
            canvas.dot(zmp[k], "#cc8800", 3.0)
    lines = ["paths: COM (green), ZMP (red dashed); orange dots: infeasible samples"]
    lines.extend(legend)
    return canvas.render(lines)
