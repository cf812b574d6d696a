"""Toolkit for configurations of pairwise unit-distance lines in 3-space:
directed-line geometry, spectral certificates, signed chirality graphs, and
a multistart least-squares configuration search."""

from .geometry import (
    CoplanarPair,
    DirectedLine,
    LineConfiguration,
    PairClass,
    PluckerLine,
    ZeroDirection,
    chirality,
    classify_pair,
    distance,
    load_configuration,
    normalize_line,
    plucker,
    reflect_z,
    reverse,
    save_configuration,
    signed_gram_entry,
)
from .signed_graph import (
    CliqueWitness,
    SignedCompleteGraph,
    builtin,
    chirality_graph,
    contains_switching_subgraph,
    find_mono_clique,
    is_balanced,
    mono_k_possible,
    paley_17,
    switch,
    switching_isomorphic,
)
from .solver import (
    NoConvergence,
    SolverOptions,
    VerificationReport,
    orient_first_positive,
    solve,
    verify,
)
from .spectral import (
    SymmetricMatrixReport,
    b_form,
    cross_norm_matrix,
    signature,
    signed_gram_matrix,
    taylor_coefficient,
    truncated_cross_norm,
    verify_lemma,
)

__version__ = "0.1.0"
