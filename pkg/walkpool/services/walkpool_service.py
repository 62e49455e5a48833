# walkpool/services/walkpool_service.py
"""
Attention-weighted walk profiles of enclosing subgraphs.

Per head the pipeline is:
    scores S[x, y] = Q(z_x) . K(z_y) / sqrt(F'')
    P+ = masked_softmax(S, A+)       P- = masked_softmax(S, A-)
    for tau in 2..tau_c:
        node  = [P^tau]_00 + [P^tau]_11
        link  = [P^tau]_01 + [P^tau]_10
        graph = trace(P^tau)
and the profile of one head reads
    [omega, (node+, node-, link+, link-, graph+ - graph-) for tau = 2..tau_c]
Heads are concatenated head-major. Feature groups dropped by an ablation
mask are removed from the vector, never zero-padded.
"""
import logging
from typing import List, Sequence, Tuple

import numpy as np

from ..core.autodiff import (
    Affine,
    Tensor,
    concat,
    gather,
    index_select,
    masked_softmax,
    matmul,
    mlp_forward,
    mul,
    reshape,
    scalar_mul,
    sigmoid,
    stack_scalars,
    sub,
    sum_all,
    trace,
    transpose,
)
from ..core.errors import InputError, ShapeError
from ..core.graph import Graph
from ..models import FOCAL, SubgraphVariant
from ..schemas import FEATURE_GROUPS

logger = logging.getLogger(__name__)

Groups = Sequence[str]


# ============================================================================
# Layout
# ============================================================================

def feature_layout(tau_c: int, heads: int, include: Groups = FEATURE_GROUPS) -> List[str]:
    """Column names of the profile vector, in emission order"""
    unknown = set(include) - set(FEATURE_GROUPS)
    if unknown:
        raise InputError(f"unknown feature groups: {', '.join(sorted(unknown))}")
    if not include:
        raise InputError("at least one feature group must be included")
    names = []
    for h in range(heads):
        if "omega" in include:
            names.append(f"h{h}.omega")
        for tau in range(2, tau_c + 1):
            if "node" in include:
                names += [f"h{h}.node+.{tau}", f"h{h}.node-.{tau}"]
            if "link" in include:
                names += [f"h{h}.link+.{tau}", f"h{h}.link-.{tau}"]
            if "graph" in include:
                names.append(f"h{h}.dgraph.{tau}")
    return names


def profile_length(tau_c: int, heads: int, include: Groups = FEATURE_GROUPS) -> int:
    return len(feature_layout(tau_c, heads, include))


# ============================================================================
# Attention
# ============================================================================

def score_matrix(z: Tensor, q_mlp: Sequence[Affine], k_mlp: Sequence[Affine]) -> Tensor:
    """Dense n x n matrix of Q(z_x) . K(z_y) / sqrt(F'')"""
    q = mlp_forward(q_mlp, z)
    k = mlp_forward(k_mlp, z)
    if q.shape != k.shape:
        raise ShapeError("score_matrix", q.shape, k.shape)
    return scalar_mul(matmul(q, transpose(k)), 1.0 / np.sqrt(q.shape[1]))


def edge_scores(
    z: Tensor,
    edges: np.ndarray,
    q_mlp: Sequence[Affine],
    k_mlp: Sequence[Affine],
) -> Tensor:
    """omega for each ordered pair row of ``edges``; omega[x, y] != omega[y, x] in general"""
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if edges.size and (edges.min() < 0 or edges.max() >= z.shape[0]):
        raise ShapeError("edge_scores", z.shape, edges.shape)
    return gather(score_matrix(z, q_mlp, k_mlp), edges[:, 0], edges[:, 1])


def attention_transition(adjacency: Graph, scores: Tensor) -> Tensor:
    """Row softmax of the scores over each node's neighbors; isolated rows are zero"""
    mask = adjacency.neighbor_mask()
    if scores.shape != mask.shape:
        raise ShapeError("attention_transition", scores.shape, mask.shape)
    return masked_softmax(scores, mask)


# ============================================================================
# Walk profiles
# ============================================================================

def walk_profile_features(p: Tensor, tau_c: int) -> List[Tuple[Tensor, Tensor, Tensor]]:
    """
    (node, link, graph) for tau = 2..tau_c, powers by repeated multiplication.

    P^tau_c itself is never formed: its focal entries and trace come from
    elementwise products of P^(tau_c - 1) with P.
    """
    if p.ndim != 2 or p.shape[0] != p.shape[1] or p.shape[0] < 2:
        raise ShapeError("walk_profile_features", p.shape)
    a, b = FOCAL
    out = []
    power = p
    for _ in range(2, tau_c):
        power = matmul(power, p)
        node = sum_all(gather(power, [a, b], [a, b]))
        link = sum_all(gather(power, [a, b], [b, a]))
        out.append((node, link, trace(power)))
    if tau_c >= 2:
        out.append(_last_power_features(power, p))
    return out


def _last_power_features(prev: Tensor, p: Tensor) -> Tuple[Tensor, Tensor, Tensor]:
    """(node, link, graph) of prev @ p without the matrix product"""
    a, b = FOCAL
    p_t = transpose(p)
    rows = index_select(prev, [a, b])
    node = sum_all(mul(rows, index_select(p_t, [a, b])))
    link = sum_all(mul(rows, index_select(p_t, [b, a])))
    return node, link, sum_all(mul(prev, p_t))


def wp_features(
    variant: SubgraphVariant,
    z: Tensor,
    heads: Sequence[Tuple[Sequence[Affine], Sequence[Affine]]],
    tau_c: int,
    include: Groups = FEATURE_GROUPS,
) -> Tensor:
    """
    Profile vector of one subgraph.

    The omega feature is the focal score averaged over both orientations,
    (S[0, 1] + S[1, 0]) / 2, so the vector is unchanged when the focal
    endpoints swap.
    """
    n = variant.adjacency_plus.num_nodes
    if z.shape[0] != n:
        raise ShapeError("wp_features", z.shape, (n, n))
    a, b = FOCAL
    pieces: List[Tensor] = []
    for q_mlp, k_mlp in heads:
        scores = score_matrix(z, q_mlp, k_mlp)
        if "omega" in include:
            pieces.append(scalar_mul(sum_all(gather(scores, [a, b], [b, a])), 0.5))
        plus = walk_profile_features(attention_transition(variant.adjacency_plus, scores), tau_c)
        minus = walk_profile_features(attention_transition(variant.adjacency_minus, scores), tau_c)
        for (node_p, link_p, graph_p), (node_m, link_m, graph_m) in zip(plus, minus):
            if "node" in include:
                pieces += [node_p, node_m]
            if "link" in include:
                pieces += [link_p, link_m]
            if "graph" in include:
                pieces.append(sub(graph_p, graph_m))
    return stack_scalars(pieces)


def classify(profile: Tensor, classifier: Sequence[Affine]) -> Tensor:
    """Classifier MLP on a 1-D profile, then sigmoid; returns a 0-d tensor"""
    if profile.ndim != 1:
        raise ShapeError("classify", profile.shape)
    logits = mlp_forward(classifier, reshape(profile, (1, profile.shape[0])))
    return reshape(sigmoid(logits), ())


def classify_batch(profiles: Sequence[Tensor], classifier: Sequence[Affine]) -> Tensor:
    """Stacked profiles through the classifier; returns a 1-D tensor of probabilities"""
    rows = concat([reshape(p, (1, p.shape[0])) for p in profiles], axis=0)
    return reshape(sigmoid(mlp_forward(classifier, rows)), (len(profiles),))
