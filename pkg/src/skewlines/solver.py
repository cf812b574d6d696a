"""Multistart nonlinear least-squares search for configurations of directed
lines at a common pairwise distance, plus full verification of candidates.

Parametrization (4 parameters per line, rigid motions gauged away):

* line 1 is frozen to the x-axis;
* line 2 has direction (sin t, 0, cos t) in the xz-plane and moment a * e_y,
  leaving parameters (t, a);
* every further line has spherical direction angles (theta, phi) and moment
  a * p + b * q in a deterministic orthonormal frame (p, q, v).

Total dimension 4n - 6.  The residual for pair (i, j) is

    <v_i x v_j, w_i - w_j>^2 - target^2 * ||v_i x v_j||^2,

which vanishes exactly at configurations where every pair is skew at the
target distance.  A small barrier keeps iterates away from parallel
directions, where the residual degenerates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from . import spectral
from .geometry import (
    CoplanarPair,
    DirectedLine,
    LineConfiguration,
    PairClass,
    chirality,
    classify_pair,
    distance,
    pair_indices,
    reverse,
)
from .signed_graph import (
    CliqueWitness,
    SignedCompleteGraph,
    chirality_graph,
    find_mono_clique,
    switching_isomorphic,
)

__all__ = [
    "SolverOptions",
    "NoConvergence",
    "VerificationReport",
    "param_dimension",
    "residuals",
    "jacobian",
    "configuration_from_params",
    "random_start",
    "solve",
    "verify",
    "orient_first_positive",
    "direction_angle_profile",
    "configurations_equivalent",
    "dedupe_configurations",
]

# Barrier threshold on ||v_i x v_j||^2; below it the pair residual is
# degenerate, so a weighted penalty (threshold - value) is added to push
# away.  The weight puts the penalty on the scale of the pair residuals;
# with a tiny threshold and unit weight the penalty cost is negligible and
# iterates collapse a pair to parallel, "solving" only the remaining
# equations.  The values below roughly quadruple the multistart success
# rate at n in {5, 6} compared with a 1e-6 threshold.
BARRIER = 3e-2
BARRIER_WEIGHT = 10.0
_E1 = np.array([1.0, 0.0, 0.0])
_E2 = np.array([0.0, 1.0, 0.0])


class NoConvergence(RuntimeError):
    """All multistarts exhausted without a verified configuration."""

    def __init__(self, message: str, best_residual_norm: float, best_start_index: int, starts: int):
        super().__init__(message)
        self.best_residual_norm = best_residual_norm
        self.best_start_index = best_start_index
        self.starts = starts


@dataclass(frozen=True)
class SolverOptions:
    """Knobs for :func:`solve`.

    A solve succeeds when the worst pairwise deviation from the target is at
    most sqrt(residual_tol) * target_distance and every pair is skew; the
    default residual_tol of 1e-16 therefore demands deviations below 1e-8
    of the target.
    """

    n: int
    seed: int = 0
    multistarts: int = 100
    max_iterations: int = 300
    residual_tol: float = 1e-16
    step_tol: float = 1e-14
    target_distance: float = 1.0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need at least two lines to solve for")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if self.multistarts < 1 or self.max_iterations < 1:
            raise ValueError("multistarts and max_iterations must be positive")
        if not (self.residual_tol > 0 and self.step_tol > 0 and self.target_distance > 0):
            raise ValueError("tolerances and target_distance must be positive")


def param_dimension(n: int) -> int:
    """Free parameters for n lines after gauge fixing: 4n - 6."""
    if n < 2:
        raise ValueError("need n >= 2")
    return 4 * n - 6


@lru_cache(maxsize=None)
def _active_columns(n: int) -> np.ndarray:
    # 4-wide virtual slots (theta, phi, a, b) per line; line 1 contributes
    # nothing, line 2 only theta and a.
    cols = [4, 6]
    for line in range(2, n):
        cols.extend(4 * line + k for k in range(4))
    arr = np.asarray(cols)
    arr.flags.writeable = False
    return arr


@lru_cache(maxsize=None)
def _pair_arrays(n: int) -> tuple[np.ndarray, np.ndarray]:
    idx_i, idx_j = np.triu_indices(n, 1)
    idx_i.flags.writeable = False
    idx_j.flags.writeable = False
    return idx_i, idx_j


def _cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Cross product on the last axis; avoids np.cross call overhead."""
    out = np.empty(np.broadcast_shapes(a.shape, b.shape))
    a0, a1, a2 = a[..., 0], a[..., 1], a[..., 2]
    b0, b1, b2 = b[..., 0], b[..., 1], b[..., 2]
    out[..., 0] = a1 * b2 - a2 * b1
    out[..., 1] = a2 * b0 - a0 * b2
    out[..., 2] = a0 * b1 - a1 * b0
    return out


def _frame(v: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Right-handed orthonormal frame (p, q, v) built deterministically from v.

    q = normalize(v x e_y) unless v is close to +-e_y, where e_x is used
    instead.  For any v orthogonal to e_y this gives p = e_y exactly, which
    is what makes the line-2 gauge (b = 0) pin down the x-translation.
    """
    u = _E2 if v[0] * v[0] + v[2] * v[2] > 0.01 else _E1
    qt = _cross(v, u)
    q = qt / math.sqrt(float(qt @ qt))
    p = _cross(q, v)
    return p, q, u


def _lines_state(params: np.ndarray, n: int, want_jacobian: bool):
    """Directions V, moments W, and (optionally) their derivatives.

    Derivatives come padded as (n, 3, 4) blocks in (theta, phi, a, b) slot
    order; frozen slots stay zero and are dropped by the active-column map.
    """
    x = np.asarray(params, dtype=float)
    if x.shape != (param_dimension(n),):
        raise ValueError(f"expected {param_dimension(n)} parameters for n = {n}, got shape {x.shape}")
    v_all = np.zeros((n, 3))
    w_all = np.zeros((n, 3))
    v_all[0, 0] = 1.0
    t2, a2 = x[0], x[1]
    st2, ct2 = math.sin(t2), math.cos(t2)
    v_all[1, 0] = st2
    v_all[1, 2] = ct2
    w_all[1, 1] = a2
    dv = dw = None
    if want_jacobian:
        dv = np.zeros((n, 3, 4))
        dw = np.zeros((n, 3, 4))
        dv[1, 0, 0] = ct2
        dv[1, 2, 0] = -st2
        dw[1, 1, 2] = 1.0
    if n == 2:
        return v_all, w_all, dv, dw

    free = x[2:].reshape(n - 2, 4)
    theta, phi, a, b = free[:, 0], free[:, 1], free[:, 2], free[:, 3]
    st, ct = np.sin(theta), np.cos(theta)
    sp, cp = np.sin(phi), np.cos(phi)
    v = np.stack([st * cp, st * sp, ct], axis=1)
    v_all[2:] = v
    # frame: q = normalize(v x u) with u = e_y, falling back to e_x near +-e_y
    mask = (v[:, 0] ** 2 + v[:, 2] ** 2 > 0.01)[:, None]
    zero = np.zeros(n - 2)
    qt = np.where(
        mask,
        np.stack([-v[:, 2], zero, v[:, 0]], axis=1),      # v x e_y
        np.stack([zero, v[:, 2], -v[:, 1]], axis=1),      # v x e_x
    )
    nq = np.sqrt(np.einsum("kx,kx->k", qt, qt))
    q = qt / nq[:, None]
    p = _cross(q, v)
    w_all[2:] = a[:, None] * p + b[:, None] * q
    if want_jacobian:
        dv_dt = np.stack([ct * cp, ct * sp, -st], axis=1)
        dv_dp = np.stack([-st * sp, st * cp, zero], axis=1)
        dv[2:, :, 0] = dv_dt
        dv[2:, :, 1] = dv_dp
        for slot, dvk in ((0, dv_dt), (1, dv_dp)):
            dqt = np.where(
                mask,
                np.stack([-dvk[:, 2], zero, dvk[:, 0]], axis=1),
                np.stack([zero, dvk[:, 2], -dvk[:, 1]], axis=1),
            )
            dq = (dqt - q * np.einsum("kx,kx->k", q, dqt)[:, None]) / nq[:, None]
            dp = _cross(dq, v) + _cross(q, dvk)
            dw[2:, :, slot] = a[:, None] * dp + b[:, None] * dq
        dw[2:, :, 2] = p
        dw[2:, :, 3] = q
    return v_all, w_all, dv, dw


def _residuals_jacobian(params, n: int, target: float, want_jacobian: bool, with_barrier: bool = False):
    """Pair residuals and Jacobian; optionally extended with barrier rows.

    With ``with_barrier`` the returned vector gains one extra component per
    pair, max(0, BARRIER - ||v_i x v_j||^2).  Keeping the penalty in its own
    least-squares component (rather than adding it onto the pair residual)
    means the extended cost vanishes only where every pair residual is zero
    AND no pair is near-parallel; folded in, the penalty could cancel a
    negative pair residual and fabricate zeros at near-parallel geometry.
    """
    v_all, w_all, dv, dw = _lines_state(params, n, want_jacobian)
    idx_i, idx_j = _pair_arrays(n)
    c = _cross(v_all[idx_i], v_all[idx_j])
    d = w_all[idx_i] - w_all[idx_j]
    g = np.einsum("mx,mx->m", c, d)
    h = np.einsum("mx,mx->m", c, c)
    r = g * g - target * target * h
    barrier = h < BARRIER
    if with_barrier:
        r = np.concatenate([r, BARRIER_WEIGHT * np.where(barrier, BARRIER - h, 0.0)])
    if not want_jacobian:
        return r, None
    m = len(idx_i)
    jac_pad = np.zeros((2 * m if with_barrier else m, 4 * n))
    rows = np.arange(m)[:, None]
    slots = np.arange(4)[None, :]
    for side, sgn in ((idx_i, 1.0), (idx_j, -1.0)):
        other = idx_j if sgn > 0 else idx_i
        dv_side = dv[side]  # (m, 3, 4)
        if sgn > 0:
            dc = _cross(dv_side.transpose(0, 2, 1), v_all[other][:, None, :])
        else:
            dc = _cross(v_all[other][:, None, :], dv_side.transpose(0, 2, 1))
        dg = np.einsum("mkx,mx->mk", dc, d) + sgn * np.einsum("mx,mxk->mk", c, dw[side])
        dh = 2.0 * np.einsum("mx,mkx->mk", c, dc)
        dr = 2.0 * g[:, None] * dg - target * target * dh
        jac_pad[rows, 4 * side[:, None] + slots] = dr
        if with_barrier:
            dbar = np.where(barrier[:, None], -BARRIER_WEIGHT * dh, 0.0)
            jac_pad[m + rows, 4 * side[:, None] + slots] = dbar
    return r, jac_pad[:, _active_columns(n)]


def residuals(params, n: int, target: float) -> np.ndarray:
    """Residual vector over pairs in lexicographic order; zero exactly at a
    configuration with every pair skew at the target distance."""
    return _residuals_jacobian(params, n, target, False)[0]


def jacobian(params, n: int, target: float) -> np.ndarray:
    """Analytic C(n,2) x (4n-6) Jacobian of :func:`residuals`."""
    return _residuals_jacobian(params, n, target, True)[1]


def configuration_from_params(params, n: int, target: float, label: str = "") -> LineConfiguration:
    """Decode a parameter vector into a canonical :class:`LineConfiguration`."""
    v_all, w_all, _, _ = _lines_state(np.asarray(params, dtype=float), n, False)
    lines = tuple(DirectedLine(v_all[i], w_all[i]) for i in range(n))
    return LineConfiguration(lines, target, label)


def random_start(n: int, rng: np.random.Generator) -> np.ndarray:
    """Random parameter vector: directions uniform on the sphere, frame
    moment coordinates uniform in [-2, 2]."""
    x = np.empty(param_dimension(n))
    x[0] = math.acos(rng.uniform(-1.0, 1.0))
    x[1] = rng.uniform(-2.0, 2.0)
    for line in range(2, n):
        v = rng.standard_normal(3)
        while float(v @ v) < 1e-12:
            v = rng.standard_normal(3)
        v /= np.linalg.norm(v)
        base = 2 + 4 * (line - 2)
        x[base] = math.acos(max(-1.0, min(1.0, float(v[2]))))
        x[base + 1] = math.atan2(float(v[1]), float(v[0]))
        x[base + 2] = rng.uniform(-2.0, 2.0)
        x[base + 3] = rng.uniform(-2.0, 2.0)
    return x


def _levenberg_marquardt(x0: np.ndarray, n: int, opts: SolverOptions) -> tuple[np.ndarray, float, int]:
    """Damped Gauss-Newton iteration from one start.

    Damping starts at 1e-3 and is divided (multiplied) by 10 on accepted
    (rejected) steps.  Stops on residual norm < residual_tol, accepted step
    norm < step_tol, damping blow-up, chronic stagnation, or the iteration
    cap.
    """
    target = opts.target_distance
    dim = param_dimension(n)
    eye = np.eye(dim)
    x = x0.copy()
    r, jac = _residuals_jacobian(x, n, target, True, with_barrier=True)
    rnorm = float(np.linalg.norm(r))
    lam = 1e-3
    iterations = 0
    stagnant = 0
    for _ in range(opts.max_iterations):
        if rnorm < opts.residual_tol:
            break
        iterations += 1
        a = jac.T @ jac
        grad = jac.T @ r
        try:
            step = np.linalg.solve(a + lam * eye, -grad)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(a + lam * eye, -grad, rcond=None)[0]
        x_new = x + step
        r_new = _residuals_jacobian(x_new, n, target, False, with_barrier=True)[0]
        rnorm_new = float(np.linalg.norm(r_new))
        if rnorm_new < rnorm:
            stagnant = stagnant + 1 if rnorm - rnorm_new < 1e-15 * rnorm else 0
            x = x_new
            r, jac = _residuals_jacobian(x, n, target, True, with_barrier=True)
            rnorm = float(np.linalg.norm(r))
            lam = max(lam / 10.0, 1e-14)
            if float(np.linalg.norm(step)) < opts.step_tol or stagnant >= 8:
                break
        else:
            lam *= 10.0
            if lam > 1e12:
                break
    return x, rnorm, iterations


def _max_deviation(config: LineConfiguration) -> float:
    devs = [abs(distance(a, b) - config.target_distance)
            for i, j in pair_indices(config.n)
            for a, b in [(config.lines[i - 1], config.lines[j - 1])]]
    return max(devs) if devs else 0.0


def _all_skew(config: LineConfiguration) -> bool:
    return all(
        classify_pair(config.lines[i - 1], config.lines[j - 1]) is PairClass.SKEW
        for i, j in pair_indices(config.n)
    )


def solve(opts: SolverOptions) -> LineConfiguration:
    """Multistart search; returns the first start (by index) that converges
    to a verified configuration.

    Each start index draws its own generator seeded by (seed, index), so the
    outcome is independent of scheduling and bitwise reproducible.  Raises
    :class:`NoConvergence` with the best residual norm reached when every
    start fails.
    """
    success_bound = math.sqrt(opts.residual_tol) * opts.target_distance
    best = math.inf
    best_idx = -1
    for start_index in range(opts.multistarts):
        rng = np.random.default_rng([opts.seed, start_index])
        x0 = random_start(opts.n, rng)
        x, rnorm, _ = _levenberg_marquardt(x0, opts.n, opts)
        if rnorm < best:
            best = rnorm
            best_idx = start_index
        config = configuration_from_params(
            x, opts.n, opts.target_distance,
            label=f"solve(n={opts.n}, seed={opts.seed}, start={start_index})",
        )
        if _max_deviation(config) <= success_bound and _all_skew(config):
            return config
    raise NoConvergence(
        f"no convergence in {opts.multistarts} starts (best residual norm {best:.3e})",
        best, best_idx, opts.multistarts,
    )


@dataclass(frozen=True, eq=False)
class VerificationReport:
    """Everything checked about a candidate configuration.

    ``passed`` requires the worst |distance - target| within tolerance, all
    pairs skew, and no monochromatic 5-clique in the chirality graph.
    """

    n: int
    target_distance: float
    tolerance: float
    pairs: tuple[tuple[int, int], ...]
    pairwise_distances: tuple[float, ...]
    pair_classes: tuple[PairClass, ...]
    max_abs_deviation: float
    all_pairs_skew: bool
    chirality_graph: SignedCompleteGraph | None
    mono_clique_5: CliqueWitness | None
    signed_gram_signature: tuple[int, int, int] | None
    lemma_signature: tuple[int, int, int] | None
    passed: bool

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "target_distance": self.target_distance,
            "tolerance": self.tolerance,
            "pairs": [list(p) for p in self.pairs],
            "pairwise_distances": list(self.pairwise_distances),
            "pair_classes": [c.value for c in self.pair_classes],
            "max_abs_deviation": self.max_abs_deviation,
            "all_pairs_skew": self.all_pairs_skew,
            "chirality_graph": self.chirality_graph.to_json_dict() if self.chirality_graph else None,
            "mono_clique_5": self.mono_clique_5.to_json_dict() if self.mono_clique_5 else None,
            "signed_gram_signature": list(self.signed_gram_signature) if self.signed_gram_signature else None,
            "lemma_signature": list(self.lemma_signature) if self.lemma_signature else None,
            "passed": self.passed,
        }


def verify(config: LineConfiguration, tol: float) -> VerificationReport:
    """Full verification of a configuration; failures are recorded in the
    report rather than raised."""
    if not (tol > 0):
        raise ValueError("tol must be positive")
    n = config.n
    pairs = tuple(pair_indices(n))
    classes = tuple(
        classify_pair(config.lines[i - 1], config.lines[j - 1]) for i, j in pairs
    )
    dists = tuple(
        distance(config.lines[i - 1], config.lines[j - 1]) for i, j in pairs
    )
    max_dev = max((abs(d - config.target_distance) for d in dists), default=0.0)
    all_skew = all(c is PairClass.SKEW for c in classes)
    graph = mono5 = gram_sig = lemma_sig = None
    if all_skew and n >= 2:
        graph = chirality_graph(config)
        if n >= 5:
            mono5 = find_mono_clique(graph, 5)
        gram_sig = spectral.signed_gram_matrix(config).signature
        lemma_sig = spectral.cross_norm_matrix([l.direction for l in config.lines]).signature
    passed = max_dev <= tol and all_skew and mono5 is None
    return VerificationReport(
        n=n,
        target_distance=config.target_distance,
        tolerance=tol,
        pairs=pairs,
        pairwise_distances=dists,
        pair_classes=classes,
        max_abs_deviation=max_dev,
        all_pairs_skew=all_skew,
        chirality_graph=graph,
        mono_clique_5=mono5,
        signed_gram_signature=gram_sig,
        lemma_signature=lemma_sig,
        passed=passed,
    )


def orient_first_positive(config: LineConfiguration) -> LineConfiguration:
    """Reverse lines 2..n as needed so every edge {1, i} is positive.

    Idempotent; requires the pairs {1, i} to be skew.
    """
    if config.n == 1:
        return config
    first = config.lines[0]
    lines = [first]
    for i, line in enumerate(config.lines[1:], start=2):
        try:
            s = chirality(first, line)
        except CoplanarPair as exc:
            raise CoplanarPair(f"lines 1 and {i} are not skew", (1, i)) from exc
        lines.append(reverse(line) if s < 0 else line)
    return LineConfiguration(tuple(lines), config.target_distance, config.label)


def direction_angle_profile(config: LineConfiguration) -> np.ndarray:
    """Sorted multiset of pairwise unsigned direction angles; invariant under
    rigid motions, relabeling, and reorientation."""
    angles = [
        math.acos(min(1.0, abs(float(config.lines[i - 1].direction @ config.lines[j - 1].direction))))
        for i, j in pair_indices(config.n)
    ]
    return np.sort(np.asarray(angles))


def configurations_equivalent(a: LineConfiguration, b: LineConfiguration, angle_tol: float = 1e-6) -> bool:
    """Duplicate test for solver outputs: matching direction-angle profiles
    plus switching-isomorphic chirality graphs."""
    if a.n != b.n:
        return False
    if not np.allclose(direction_angle_profile(a), direction_angle_profile(b), atol=angle_tol, rtol=0.0):
        return False
    return switching_isomorphic(chirality_graph(a), chirality_graph(b)) is not None


def dedupe_configurations(configs: Sequence[LineConfiguration], angle_tol: float = 1e-6) -> list[LineConfiguration]:
    """Keep the first representative of each equivalence class."""
    distinct: list[LineConfiguration] = []
    for cfg in configs:
        if not any(configurations_equivalent(cfg, seen, angle_tol) for seen in distinct):
            distinct.append(cfg)
    return distinct
