"""Signed complete graphs: switching, balance, monochromatic-clique search,
switching isomorphism, and the built-in 7-vertex catalogue.

Vertices are labeled 1..n throughout, matching the figure conventions the
built-in graphs were transcribed from.  Edge signs live on unordered pairs;
switching a vertex subset negates every edge with exactly one endpoint in
the subset and models reversing the directions of the corresponding lines.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Iterable, Iterator, Sequence

import numpy as np

from .geometry import CoplanarPair, LineConfiguration, chirality, pair_indices

__all__ = [
    "UnknownName",
    "TooLarge",
    "GraphFormatError",
    "SignedCompleteGraph",
    "CliqueWitness",
    "SwitchingIsomorphism",
    "SubgraphEmbedding",
    "BUILTIN_NAMES",
    "chirality_graph",
    "switch",
    "is_balanced",
    "find_mono_clique",
    "mono_k_possible",
    "switching_isomorphic",
    "contains_switching_subgraph",
    "paley_17",
    "builtin",
]

ISO_MAX_VERTICES = 9
SUBGRAPH_MAX_VERTICES = 10


class UnknownName(ValueError):
    """No built-in graph under that name."""


class TooLarge(ValueError):
    """Graph exceeds the brute-force search regime."""


class GraphFormatError(ValueError):
    """Malformed signed-graph data."""


class SignedCompleteGraph:
    """Complete graph on vertices 1..n with a sign of +1 or -1 on each edge."""

    __slots__ = ("_n", "_m")

    def __init__(self, matrix):
        m = np.asarray(matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise GraphFormatError(f"sign matrix must be square, got shape {m.shape}")
        n = m.shape[0]
        if n < 1:
            raise GraphFormatError("need at least one vertex")
        m = m.astype(np.int8)
        if np.any(np.diag(m) != 0):
            raise GraphFormatError("diagonal must be zero")
        if not np.array_equal(m, m.T):
            raise GraphFormatError("sign matrix must be symmetric")
        off = m[~np.eye(n, dtype=bool)]
        if n > 1 and not np.all(np.abs(off) == 1):
            raise GraphFormatError("every edge sign must be +1 or -1")
        m = m.copy()
        m.flags.writeable = False
        self._n = n
        self._m = m

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "SignedCompleteGraph":
        """Build from (i, j, sign) triples covering every pair exactly once."""
        m = np.zeros((n, n), dtype=np.int8)
        seen = set()
        for e in edges:
            try:
                i, j, s = (int(x) for x in e)
            except (TypeError, ValueError) as exc:
                raise GraphFormatError(f"bad edge entry {e!r}") from exc
            if not (1 <= i <= n and 1 <= j <= n) or i == j:
                raise GraphFormatError(f"edge ({i}, {j}) out of range for n = {n}")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise GraphFormatError(f"duplicate edge {key}")
            if s not in (-1, 1):
                raise GraphFormatError(f"edge {key} has sign {s}, expected +1 or -1")
            seen.add(key)
            m[i - 1, j - 1] = m[j - 1, i - 1] = s
        missing = [(i, j) for i, j in pair_indices(n) if (i, j) not in seen]
        if missing:
            raise GraphFormatError(f"missing edges: {missing[:5]}{'...' if len(missing) > 5 else ''}")
        return cls(m)

    @classmethod
    def from_negative_edges(cls, n: int, negative: Iterable[tuple[int, int]]) -> "SignedCompleteGraph":
        """All edges positive except the listed pairs."""
        m = np.ones((n, n), dtype=np.int8)
        np.fill_diagonal(m, 0)
        for i, j in negative:
            m[i - 1, j - 1] = m[j - 1, i - 1] = -1
        return cls(m)

    @classmethod
    def all_positive(cls, n: int) -> "SignedCompleteGraph":
        return cls.from_negative_edges(n, [])

    @property
    def n(self) -> int:
        return self._n

    def sign(self, i: int, j: int) -> int:
        if not (1 <= i <= self._n and 1 <= j <= self._n) or i == j:
            raise ValueError(f"({i}, {j}) is not an edge of a {self._n}-vertex graph")
        return int(self._m[i - 1, j - 1])

    def sign_matrix(self) -> np.ndarray:
        """A writable copy of the n x n sign matrix (0 on the diagonal)."""
        return self._m.copy()

    def edges(self) -> Iterator[tuple[int, int, int]]:
        for i, j in pair_indices(self._n):
            yield (i, j, int(self._m[i - 1, j - 1]))

    def negated(self) -> "SignedCompleteGraph":
        return SignedCompleteGraph(-self._m)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SignedCompleteGraph):
            return NotImplemented
        return self._n == other._n and np.array_equal(self._m, other._m)

    def __repr__(self) -> str:
        neg = [(i, j) for i, j, s in self.edges() if s < 0]
        return f"SignedCompleteGraph(n={self._n}, negative_edges={neg})"

    def to_json_dict(self) -> dict:
        return {"n": self._n, "edges": [[i, j, s] for i, j, s in self.edges()]}

    @classmethod
    def from_json_dict(cls, data: dict) -> "SignedCompleteGraph":
        if not isinstance(data, dict):
            raise GraphFormatError("graph must be a JSON object")
        try:
            n = int(data["n"])
            edges = data["edges"]
        except (KeyError, TypeError, ValueError) as exc:
            raise GraphFormatError(f"bad graph: {exc}") from exc
        if not isinstance(edges, list):
            raise GraphFormatError("'edges' must be a list")
        return cls.from_edges(n, edges)


def load_graph(path) -> SignedCompleteGraph:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise GraphFormatError(f"cannot read graph {path}: {exc}") from exc
    return SignedCompleteGraph.from_json_dict(data)


def save_graph(g: SignedCompleteGraph, path) -> None:
    with open(path, "w") as fh:
        json.dump(g.to_json_dict(), fh, indent=2)
        fh.write("\n")


@dataclass(frozen=True)
class CliqueWitness:
    """A vertex set whose induced edges all carry the same sign."""

    vertices: tuple[int, ...]
    sign: int

    def to_json_dict(self) -> dict:
        return {"vertices": list(self.vertices), "sign": self.sign}


def chirality_graph(config: LineConfiguration) -> SignedCompleteGraph:
    """Signed complete graph whose edge {i, j} carries the chirality of
    lines i and j.  Every pair must be skew."""
    n = config.n
    m = np.zeros((n, n), dtype=np.int8)
    for i, j in pair_indices(n):
        try:
            s = chirality(config.lines[i - 1], config.lines[j - 1])
        except CoplanarPair as exc:
            raise CoplanarPair(f"lines {i} and {j} are not skew", (i, j)) from exc
        m[i - 1, j - 1] = m[j - 1, i - 1] = s
    return SignedCompleteGraph(m)


def _switch_vector(n: int, subset: Iterable[int]) -> np.ndarray:
    s = np.ones(n, dtype=np.int8)
    for v in subset:
        v = int(v)
        if not (1 <= v <= n):
            raise ValueError(f"vertex {v} out of range 1..{n}")
        s[v - 1] = -1
    return s


def switch(g: SignedCompleteGraph, subset: Iterable[int]) -> SignedCompleteGraph:
    """Negate every edge with exactly one endpoint in ``subset``."""
    s = _switch_vector(g.n, subset)
    return SignedCompleteGraph(g.sign_matrix() * np.outer(s, s))


def _normal_form(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Switch so vertex 1's star is all-positive; canonical in each class.

    Returns the switched matrix and the +-1 switching vector used.
    """
    s = m[0].copy()
    s[0] = 1
    return m * np.outer(s, s), s


def is_balanced(g: SignedCompleteGraph) -> bool:
    """True when some switching makes every edge positive.

    Equivalent to every triangle having positive sign product; checked by
    switching vertex 1's star positive and scanning the remaining edges.
    """
    if g.n == 1:
        return True
    m = g.sign_matrix()
    nf, _ = _normal_form(m)
    off = nf[~np.eye(g.n, dtype=bool)]
    return bool(np.all(off == 1))


def _matrix_mono_sign(sub: np.ndarray) -> int | None:
    k = sub.shape[0]
    off = sub[np.triu_indices(k, 1)]
    if np.all(off == 1):
        return 1
    if np.all(off == -1):
        return -1
    return None


def find_mono_clique(g: SignedCompleteGraph, k: int) -> CliqueWitness | None:
    """Exhaustively search all C(n, k) subsets for a monochromatic clique.

    Returns the lexicographically first witness or None.
    """
    if not (2 <= k <= g.n):
        raise ValueError(f"need 2 <= k <= n, got k = {k}, n = {g.n}")
    m = g.sign_matrix()
    for combo in combinations(range(g.n), k):
        sign = _matrix_mono_sign(m[np.ix_(combo, combo)])
        if sign is not None:
            return CliqueWitness(tuple(v + 1 for v in combo), sign)
    return None


def _matrix_balanced(sub: np.ndarray) -> bool:
    nf, _ = _normal_form(sub)
    off = nf[~np.eye(sub.shape[0], dtype=bool)]
    return bool(np.all(off == 1))


def mono_k_possible(g: SignedCompleteGraph, k: int) -> bool:
    """Could ANY reorientation of the underlying lines produce a
    monochromatic K_k?

    True iff some k-subset induces a graph that is balanced (switchable to
    all-positive) or whose negation is balanced (switchable to all-negative).
    """
    if not (2 <= k <= g.n):
        raise ValueError(f"need 2 <= k <= n, got k = {k}, n = {g.n}")
    m = g.sign_matrix()
    for combo in combinations(range(g.n), k):
        sub = m[np.ix_(combo, combo)]
        if _matrix_balanced(sub) or _matrix_balanced(-sub):
            return True
    return False


@dataclass(frozen=True)
class SwitchingIsomorphism:
    """Permutation plus switching set carrying one graph onto another.

    ``permutation[i - 1]`` is the image of vertex i; applying the permutation
    first and then switching ``switch_set`` yields the target graph.
    """

    permutation: tuple[int, ...]
    switch_set: tuple[int, ...]

    def to_json_dict(self) -> dict:
        return {"permutation": list(self.permutation), "switch_set": list(self.switch_set)}


def _permuted(m: np.ndarray, perm0: Sequence[int]) -> np.ndarray:
    out = np.empty_like(m)
    idx = np.asarray(perm0)
    out[np.ix_(idx, idx)] = m
    return out


def switching_isomorphic(g1: SignedCompleteGraph, g2: SignedCompleteGraph) -> SwitchingIsomorphism | None:
    """Search for (permutation, switching set) with switch(perm(g1), set) = g2.

    Brute force over all vertex permutations, with the switching normalized
    by making vertex 1's star all-positive on both sides.  Returns the first
    match in lexicographic permutation order, or None.
    """
    if g1.n != g2.n:
        raise ValueError(f"vertex counts differ: {g1.n} vs {g2.n}")
    n = g1.n
    if n > ISO_MAX_VERTICES:
        raise TooLarge(f"switching isomorphism is brute force; n = {n} exceeds {ISO_MAX_VERTICES}")
    m1 = g1.sign_matrix()
    m2 = g2.sign_matrix()
    nf2, s2 = _normal_form(m2)
    for perm0 in permutations(range(n)):
        pm = _permuted(m1, perm0)
        nf1, s1 = _normal_form(pm)
        if np.array_equal(nf1, nf2):
            sw = np.where(s1 * s2 < 0)[0]
            result = SwitchingIsomorphism(
                tuple(p + 1 for p in perm0), tuple(int(v) + 1 for v in sw)
            )
            assert switch(SignedCompleteGraph(pm), result.switch_set) == g2
            return result
    return None


@dataclass(frozen=True)
class SubgraphEmbedding:
    """Injective vertex mapping plus switching set embedding one graph in another.

    ``mapping[u - 1]`` is the host vertex for pattern vertex u; switching the
    pattern by ``switch_set`` makes its signs match the induced host signs.
    """

    mapping: tuple[int, ...]
    switch_set: tuple[int, ...]

    def to_json_dict(self) -> dict:
        return {"mapping": list(self.mapping), "switch_set": list(self.switch_set)}


def contains_switching_subgraph(g: SignedCompleteGraph, h: SignedCompleteGraph) -> SubgraphEmbedding | None:
    """Does ``g`` contain ``h`` up to switching, on some vertex subset?

    Exhaustive over all injective maps from h's vertices into g's, comparing
    switching normal forms.  Whether sign-pattern containment should be read
    up to switching is a modeling choice; this implements the up-to-switching
    reading.
    """
    if g.n > SUBGRAPH_MAX_VERTICES:
        raise TooLarge(f"subgraph search is brute force; host n = {g.n} exceeds {SUBGRAPH_MAX_VERTICES}")
    if h.n > g.n:
        raise ValueError(f"pattern has more vertices ({h.n}) than host ({g.n})")
    gm = g.sign_matrix()
    hm = h.sign_matrix()
    nf_h, s_h = _normal_form(hm)
    for mapping in permutations(range(g.n), h.n):
        idx = np.asarray(mapping)
        induced = gm[np.ix_(idx, idx)]
        nf_i, s_i = _normal_form(induced)
        if np.array_equal(nf_h, nf_i):
            sw = np.where(s_h * s_i < 0)[0]
            result = SubgraphEmbedding(
                tuple(int(v) + 1 for v in mapping), tuple(int(v) + 1 for v in sw)
            )
            assert np.array_equal(
                switch(h, result.switch_set).sign_matrix(), induced
            )
            return result
    return None


def paley_17() -> SignedCompleteGraph:
    """K17 signed by quadratic residues: edge {i, j} is positive iff
    (i - j) mod 17 is a nonzero square mod 17.

    Neither sign class contains a K4, witnessing that 17 vertices are not
    enough to force one.
    """
    residues = {pow(x, 2, 17) for x in range(1, 17)}
    m = np.zeros((17, 17), dtype=np.int8)
    for i, j in pair_indices(17):
        m[i - 1, j - 1] = m[j - 1, i - 1] = 1 if (i - j) % 17 in residues else -1
    return SignedCompleteGraph(m)


# Negative edge sets of the built-in graphs, transcribed from the source
# figures (solid = positive, dashed = negative).
_BUILTINS: dict[str, tuple[int, tuple[tuple[int, int], ...]]] = {
    "example1": (4, ((1, 3), (2, 4), (3, 4))),
    "blr_graph_a": (
        7,
        ((1, 2), (1, 3), (1, 4), (1, 7), (2, 3), (2, 4), (2, 6), (3, 5), (3, 6), (4, 5), (4, 7)),
    ),
    "blr_graph_b": (
        7,
        ((1, 2), (1, 3), (1, 5), (1, 6), (1, 7), (2, 3), (2, 6), (2, 7), (3, 4), (3, 5), (5, 7)),
    ),
    "blr_canonical": (7, ((2, 3), (3, 4), (4, 5), (5, 6), (6, 7))),
    "p250": (7, ((3, 4), (3, 7), (4, 5), (5, 6), (6, 7))),
}

BUILTIN_NAMES = tuple(_BUILTINS)


def builtin(name: str) -> SignedCompleteGraph:
    """One of the embedded reference graphs; see BUILTIN_NAMES."""
    try:
        n, negative = _BUILTINS[name]
    except KeyError:
        raise UnknownName(f"unknown graph {name!r}; choose from {', '.join(BUILTIN_NAMES)}") from None
    return SignedCompleteGraph.from_negative_edges(n, negative)
