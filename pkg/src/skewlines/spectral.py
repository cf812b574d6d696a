"""Spectral certificates for line configurations.

Covers the cross-norm matrix of a direction set and its signature, the exact
rational coefficients of the sqrt(1 - x^2) expansion that proves the
signature claim, the split 6x6 form behind the Plücker factorization, and
signed Gram matrices of line configurations.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Sequence

import numpy as np

from .geometry import CoplanarPair, LineConfiguration, PairClass, classify_pair, pair_indices, signed_gram_entry

__all__ = [
    "ParallelVectors",
    "NotSymmetric",
    "BadMultiIndex",
    "OutOfDomain",
    "SymmetricMatrixReport",
    "TaylorCoefficient",
    "LemmaCheck",
    "signature",
    "default_zero_tol",
    "matrix_report",
    "cross_norm_matrix",
    "taylor_coefficient",
    "truncated_cross_norm",
    "b_form",
    "signed_gram_matrix",
    "verify_lemma",
]

SYMMETRY_TOL = 1e-10
MIN_CROSS_NORM = 1e-9


class ParallelVectors(ValueError):
    """Two of the supplied unit vectors span the same line."""

    def __init__(self, message: str, indices: tuple[int, int] | None = None):
        super().__init__(message)
        self.indices = indices


class NotSymmetric(ValueError):
    """Matrix is not symmetric within tolerance."""


class BadMultiIndex(ValueError):
    """Multi-index (a, b, c) does not sum to 2k."""


class OutOfDomain(ValueError):
    """Argument outside the domain of the series."""


def _as_symmetric(m) -> np.ndarray:
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotSymmetric(f"expected a square matrix, got shape {a.shape}")
    asym = float(np.max(np.abs(a - a.T))) if a.size else 0.0
    if asym > SYMMETRY_TOL * max(1.0, float(np.max(np.abs(a))) if a.size else 1.0):
        raise NotSymmetric(f"matrix asymmetry {asym:.3e} exceeds tolerance")
    return a


def default_zero_tol(eigenvalues: np.ndarray) -> float:
    """Relative zero threshold: 1e-8 times the largest |eigenvalue|, floor 1."""
    scale = float(np.max(np.abs(eigenvalues))) if len(eigenvalues) else 0.0
    return 1e-8 * max(scale, 1.0)


def signature(m, zero_tol: float) -> tuple[int, int, int]:
    """Eigenvalue counts (n_pos, n_neg, n_zero) of a symmetric matrix.

    Eigenvalues within [-zero_tol, zero_tol] count as zero.
    """
    if not (zero_tol > 0):
        raise ValueError("zero_tol must be positive")
    a = _as_symmetric(m)
    eig = np.linalg.eigvalsh(a)
    n_pos = int(np.sum(eig > zero_tol))
    n_neg = int(np.sum(eig < -zero_tol))
    return (n_pos, n_neg, a.shape[0] - n_pos - n_neg)


@dataclass(frozen=True, eq=False)
class SymmetricMatrixReport:
    """A dense symmetric matrix with its eigenvalues and signature."""

    n: int
    entries: np.ndarray
    eigenvalues: np.ndarray  # sorted descending
    signature: tuple[int, int, int]
    zero_tol: float

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "entries": [[float(x) for x in row] for row in self.entries],
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "signature": list(self.signature),
            "zero_tol": self.zero_tol,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)


def matrix_report(m, zero_tol: float | None = None) -> SymmetricMatrixReport:
    """Eigen-decompose a symmetric matrix into a :class:`SymmetricMatrixReport`.

    ``zero_tol`` defaults to :func:`default_zero_tol` of the spectrum.
    """
    a = _as_symmetric(m)
    eig = np.linalg.eigvalsh(a)
    if zero_tol is None:
        zero_tol = default_zero_tol(eig)
    if not (zero_tol > 0):
        raise ValueError("zero_tol must be positive")
    n_pos = int(np.sum(eig > zero_tol))
    n_neg = int(np.sum(eig < -zero_tol))
    n = a.shape[0]
    eig_desc = eig[::-1].copy()
    return SymmetricMatrixReport(n, a, eig_desc, (n_pos, n_neg, n - n_pos - n_neg), float(zero_tol))


def _direction_array(vs) -> np.ndarray:
    arr = np.asarray(vs, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ValueError(f"expected an (n, 3) array of vectors, got shape {arr.shape}")
    norms = np.linalg.norm(arr, axis=1)
    bad = np.where(np.abs(norms - 1.0) > 1e-10)[0]
    if bad.size:
        raise ValueError(f"vector {bad[0] + 1} is not unit (norm {norms[bad[0]]:.12g})")
    return arr


def cross_norm_matrix(vs, zero_tol: float | None = None) -> SymmetricMatrixReport:
    """The matrix S with entries ||v_i x v_j|| for unit vectors v_i.

    Raises :class:`ParallelVectors` when some pair has cross norm below
    1e-9 (parallel or antiparallel directions).
    """
    arr = _direction_array(vs)
    n = arr.shape[0]
    if n < 2:
        raise ValueError("need at least two vectors")
    crosses = np.cross(arr[:, None, :], arr[None, :, :])
    s = np.linalg.norm(crosses, axis=2)
    np.fill_diagonal(s, 0.0)
    for i in range(n):
        for j in range(i + 1, n):
            if s[i, j] < MIN_CROSS_NORM:
                raise ParallelVectors(
                    f"vectors {i + 1} and {j + 1} are parallel (cross norm {s[i, j]:.3e})",
                    (i + 1, j + 1),
                )
    return matrix_report(s, zero_tol)


@dataclass(frozen=True)
class TaylorCoefficient:
    """Exact coefficient of f_abc(v) f_abc(w) in the expansion of ||v x w||."""

    k: int
    a: int
    b: int
    c: int
    value: Fraction


def taylor_coefficient(k: int, a: int, b: int, c: int) -> TaylorCoefficient:
    """The exact rational coefficient for multi-index (a, b, c) at order 2k.

    Value: binom(2k, k) / (4^k (2k-1)) * (2k)! / (a! b! c!), always positive.
    """
    if k < 1:
        raise BadMultiIndex("k must be >= 1")
    if min(a, b, c) < 0 or a + b + c != 2 * k:
        raise BadMultiIndex(f"(a, b, c) = ({a}, {b}, {c}) must be non-negative and sum to 2k = {2 * k}")
    value = Fraction(comb(2 * k, k), 4**k * (2 * k - 1)) * Fraction(
        factorial(2 * k), factorial(a) * factorial(b) * factorial(c)
    )
    return TaylorCoefficient(k, a, b, c, value)


def truncated_cross_norm(x: float, terms: int) -> float:
    """Partial sum of the sqrt(1 - x^2) expansion through order 2*terms.

    Decreases monotonically in ``terms`` and bounds sqrt(1 - x^2) from above.
    """
    if not (-1.0 <= x <= 1.0):
        raise OutOfDomain(f"x = {x} outside [-1, 1]")
    if terms < 1:
        raise OutOfDomain("need at least one term")
    x2 = x * x
    total = 1.0
    central = 1.0  # binom(2k, k) / 4^k, updated by recurrence
    power = 1.0
    for k in range(1, terms + 1):
        central *= (2 * k - 1) / (2 * k)
        power *= x2
        total -= central / (2 * k - 1) * power
    return total


def b_form() -> np.ndarray:
    """The split 6x6 symmetric form [[0, I], [I, 0]] of signature (3, 3)."""
    b = np.zeros((6, 6))
    b[:3, 3:] = np.eye(3)
    b[3:, :3] = np.eye(3)
    return b


def signed_gram_matrix(config: LineConfiguration, zero_tol: float | None = None) -> SymmetricMatrixReport:
    """The matrix with entries <v_i x v_j, w_i - w_j> for a skew configuration.

    All pairs must be skew; otherwise :class:`CoplanarPair` identifies the
    offending pair.  The entries factor through the rank-6 form
    :func:`b_form` in Plücker coordinates, so the signature never has more
    than three eigenvalues of either sign.
    """
    lines = config.lines
    n = len(lines)
    m = np.zeros((n, n))
    for i, j in pair_indices(n):
        a, b = lines[i - 1], lines[j - 1]
        if classify_pair(a, b) is not PairClass.SKEW:
            raise CoplanarPair(f"lines {i} and {j} are not skew", (i, j))
        m[i - 1, j - 1] = m[j - 1, i - 1] = signed_gram_entry(a, b)
    return matrix_report(m, zero_tol)


@dataclass(frozen=True, eq=False)
class LemmaCheck:
    """Outcome of the cross-norm signature certificate for one vector set."""

    passed: bool
    expected_signature: tuple[int, int, int]
    report: SymmetricMatrixReport
    min_abs_eigenvalue: float

    def to_json_dict(self) -> dict:
        return {
            "passed": self.passed,
            "expected_signature": list(self.expected_signature),
            "min_abs_eigenvalue": self.min_abs_eigenvalue,
            "report": self.report.to_json_dict(),
        }


def verify_lemma(vs, zero_tol: float | None = None) -> LemmaCheck:
    """Check that the cross-norm matrix of the vectors has signature (1, n-1, 0).

    The minimum |eigenvalue| is reported as a conditioning diagnostic for
    nearly parallel inputs.
    """
    report = cross_norm_matrix(vs, zero_tol)
    expected = (1, report.n - 1, 0)
    min_abs = float(np.min(np.abs(report.eigenvalues)))
    return LemmaCheck(report.signature == expected, expected, report, min_abs)
