"""Shared test utilities: seeded random geometry and the brute-force
distance oracle (nested golden-section search, independent of the
closed-form distance used by the library)."""

from __future__ import annotations

import math

import numpy as np

from skewlines.geometry import DirectedLine, LineConfiguration, PairClass, classify_pair, normalize_line

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def random_unit_vector(rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(3)
    while float(v @ v) < 1e-12:
        v = rng.standard_normal(3)
    return v / np.linalg.norm(v)


def random_line(rng: np.random.Generator, box: float = 2.0) -> DirectedLine:
    point = rng.uniform(-box, box, 3)
    return normalize_line(point, random_unit_vector(rng))


def random_skew_pair(rng: np.random.Generator, min_cross: float = 0.1) -> tuple[DirectedLine, DirectedLine]:
    while True:
        a = random_line(rng)
        b = random_line(rng)
        cn = float(np.linalg.norm(np.cross(a.direction, b.direction)))
        if cn >= min_cross and classify_pair(a, b) is PairClass.SKEW:
            return a, b


def random_skew_configuration(rng: np.random.Generator, n: int, target: float = 1.0) -> LineConfiguration:
    while True:
        lines = tuple(random_line(rng) for _ in range(n))
        ok = all(
            classify_pair(lines[i], lines[j]) is PairClass.SKEW
            and float(np.linalg.norm(np.cross(lines[i].direction, lines[j].direction))) >= 1e-3
            for i in range(n)
            for j in range(i + 1, n)
        )
        if ok:
            return LineConfiguration(lines, target)


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    m = rng.standard_normal((3, 3))
    q, r = np.linalg.qr(m)
    q = q @ np.diag(np.sign(np.diag(r)))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def random_direction_set(rng: np.random.Generator, n: int, min_cross: float = 1e-3) -> np.ndarray:
    while True:
        vs = np.array([random_unit_vector(rng) for _ in range(n)])
        crosses = np.linalg.norm(np.cross(vs[:, None, :], vs[None, :, :]), axis=2)
        crosses[np.diag_indices(n)] = 1.0
        if crosses.min() >= min_cross:
            return vs


def golden_section_min(f, lo: float, hi: float, tol: float = 1e-5) -> float:
    """Location of the minimum of a unimodal f on [lo, hi]."""
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def brute_force_distance(a: DirectedLine, b: DirectedLine, bracket: float = 1500.0) -> float:
    """min over (s, t) of ||(a.w + s a.v) - (b.w + t b.v)|| by nested
    golden-section search; no cross products, no closed form."""
    ax, ay, az = a.moment_point
    avx, avy, avz = a.direction
    bx, by, bz = b.moment_point
    bvx, bvy, bvz = b.direction

    def point_gap(s: float, t: float) -> float:
        dx = (ax + s * avx) - (bx + t * bvx)
        dy = (ay + s * avy) - (by + t * bvy)
        dz = (az + s * avz) - (bz + t * bvz)
        return math.sqrt(dx * dx + dy * dy + dz * dz)

    def best_over_s(t: float) -> float:
        s = golden_section_min(lambda s: point_gap(s, t), -bracket, bracket)
        return point_gap(s, t)

    t_best = golden_section_min(best_over_s, -bracket, bracket)
    return best_over_s(t_best)
