"""Flat-file exports of line configurations: CSV of line parameters and OBJ
cylinder meshes for external viewers."""

from __future__ import annotations

import io
import math

import numpy as np

from .geometry import LineConfiguration

__all__ = ["configuration_csv", "configuration_obj"]


def configuration_csv(config: LineConfiguration) -> str:
    """One row per line: moment point and unit direction."""
    buf = io.StringIO()
    buf.write("index,point_x,point_y,point_z,dir_x,dir_y,dir_z\n")
    for k, line in enumerate(config.lines, start=1):
        w, v = line.moment_point, line.direction
        buf.write(f"{k},{w[0]:.17g},{w[1]:.17g},{w[2]:.17g},{v[0]:.17g},{v[1]:.17g},{v[2]:.17g}\n")
    return buf.getvalue()


def configuration_obj(config: LineConfiguration, radius: float, length: float, segments: int = 24) -> str:
    """Each line becomes a finite open cylinder: two rings of ``segments``
    vertices joined by quads, centered on the moment point."""
    if radius <= 0 or length <= 0 or segments < 3:
        raise ValueError("radius and length must be positive, segments >= 3")
    buf = io.StringIO()
    buf.write(f"# {config.n} cylinders, radius {radius:g}, length {length:g}\n")
    offset = 0
    for k, line in enumerate(config.lines, start=1):
        v = line.direction
        # any unit vector orthogonal to v
        helper = np.array([0.0, 0.0, 1.0]) if abs(v[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
        p = np.cross(v, helper)
        p /= np.linalg.norm(p)
        q = np.cross(v, p)
        buf.write(f"o line_{k}\n")
        for end in (-length / 2.0, length / 2.0):
            center = line.point_at(end)
            for s in range(segments):
                ang = 2.0 * math.pi * s / segments
                pt = center + radius * (math.cos(ang) * p + math.sin(ang) * q)
                buf.write(f"v {pt[0]:.9g} {pt[1]:.9g} {pt[2]:.9g}\n")
        for s in range(segments):
            s2 = (s + 1) % segments
            a = offset + 1 + s
            b = offset + 1 + s2
            c = offset + 1 + segments + s2
            d = offset + 1 + segments + s
            buf.write(f"f {a} {b} {c} {d}\n")
        offset += 2 * segments
    return buf.getvalue()
