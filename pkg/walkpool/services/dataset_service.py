# walkpool/services/dataset_service.py
"""
Edge-list / embedding ingestion and reproducible train/val/test splits.

Split directory layout::

    train_pos.txt train_neg.txt val_pos.txt val_neg.txt test_pos.txt test_neg.txt
    meta.txt   key=value: seed, test_ratio, val_ratio, val_basis, dataset,
               num_nodes, format_version
    nodes.txt  original node ids, one per line, in internal order

Tier files hold original node ids, one "u v" pair per line.
"""
import logging
import math
import re
from pathlib import Path
from typing import Dict, List, Set, Tuple, Union

import numpy as np

from ..core.errors import InputError, LoadError, ParseError, SamplingError, SplitValidationError
from ..core.graph import Graph, build_graph
from ..core.rng import PortableRng
from ..models import TIERS, EdgeSplit, NodeFeatures
from ..utils.keyvalue import read_key_values, write_key_values

logger = logging.getLogger(__name__)

SPLIT_FORMAT_VERSION = 1
NEGATIVE_REJECTION_FACTOR = 100
_SEED_IN_NAME = re.compile(r"seed[_-]?(\d+)", re.IGNORECASE)

PathLike = Union[str, Path]


# ============================================================================
# Edge lists
# ============================================================================

def _read_pairs(path: Path) -> List[Tuple[int, int]]:
    pairs: List[Tuple[int, int]] = []
    with path.open("r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ParseError(path, line_no, f"expected 'u v', got {line!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise ParseError(path, line_no, f"node ids must be integers, got {line!r}") from None
            if u < 0 or v < 0:
                raise ParseError(path, line_no, f"node ids must be non-negative, got {line!r}")
            if u == v:
                raise ParseError(path, line_no, f"self-loop on node {u}")
            pairs.append((u, v))
    return pairs


def load_edge_list(path: PathLike) -> Graph:
    """Read "u v" lines; ids are remapped to 0..n-1 in ascending original order"""
    path = Path(path)
    if not path.is_file():
        raise LoadError(f"edge list not found: {path}")
    pairs = _read_pairs(path)
    raw = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    original_ids, internal = np.unique(raw, return_inverse=True)
    g = build_graph(len(original_ids), internal.reshape(-1, 2), original_ids)
    logger.info("loaded %s: %d nodes, %d edges", path.name, g.num_nodes, g.edge_count)
    return g


def write_edge_list(path: PathLike, pairs: np.ndarray) -> None:
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    text = "".join(f"{u} {v}\n" for u, v in pairs.tolist())
    Path(path).write_text(text, encoding="utf-8")


# ============================================================================
# Splits
# ============================================================================

def _edge_codes(pairs: np.ndarray, n: int) -> Set[int]:
    lo = np.minimum(pairs[:, 0], pairs[:, 1])
    hi = np.maximum(pairs[:, 0], pairs[:, 1])
    return set((lo * n + hi).tolist())


def _sorted_pairs(pairs: np.ndarray) -> np.ndarray:
    if len(pairs) == 0:
        return pairs.reshape(0, 2)
    order = np.lexsort((pairs[:, 1], pairs[:, 0]))
    return pairs[order]


def sample_negatives(g: Graph, count: int, rng: PortableRng) -> np.ndarray:
    """
    Uniform non-edges of ``g`` by rejection against the edge set.

    Pairs are canonical (u < v) and pairwise distinct. Gives up after
    100 * count rejections.
    """
    n = g.num_nodes
    available = n * (n - 1) // 2 - g.edge_count
    if count > available:
        raise SamplingError(f"need {count} negatives but graph has only {available} non-edges")

    taken = _edge_codes(g.edges(), max(n, 1))
    out: List[Tuple[int, int]] = []
    rejections = 0
    budget = NEGATIVE_REJECTION_FACTOR * max(count, 1)
    while len(out) < count:
        u = rng.randbelow(n)
        v = rng.randbelow(n)
        lo, hi = (u, v) if u < v else (v, u)
        code = lo * n + hi
        if u == v or code in taken:
            rejections += 1
            if rejections > budget:
                raise SamplingError(
                    f"gave up after {rejections} rejections with {len(out)}/{count} negatives; "
                    "graph too dense"
                )
            continue
        taken.add(code)
        out.append((lo, hi))
    return np.asarray(out, dtype=np.int64).reshape(-1, 2)


def split_edges(
    g: Graph,
    test_ratio: float = 0.1,
    val_ratio: float = 0.05,
    seed: int = 0,
    val_basis: str = "train",
    dataset: str = "graph",
) -> EdgeSplit:
    """
    Uniform random partition of the edges plus equal-sized negative tiers.

    test = floor(test_ratio * |E|); validation is floor(val_ratio * remaining)
    for ``val_basis="train"`` or floor(val_ratio * |E|) for ``"all"``; the
    rest trains. The observed graph keeps only the training positives and is
    not forced to stay connected.
    """
    if not (0 <= test_ratio < 1) or not (0 <= val_ratio < 1):
        raise InputError(f"ratios must lie in [0, 1): test={test_ratio}, val={val_ratio}")
    if val_basis not in ("train", "all"):
        raise InputError(f"val_basis must be 'train' or 'all', got {val_basis!r}")
    if test_ratio + val_ratio >= 1:
        raise InputError("test_ratio + val_ratio must be < 1")

    edges = g.edges()
    m = len(edges)
    n_test = math.floor(test_ratio * m)
    n_val = math.floor(val_ratio * (m - n_test if val_basis == "train" else m))
    n_train = m - n_test - n_val
    if n_train < 0:
        raise InputError("ratios leave no training edges")

    rng = PortableRng(seed)
    perm = rng.permutation(m)
    test_pos = _sorted_pairs(edges[perm[:n_test]])
    val_pos = _sorted_pairs(edges[perm[n_test:n_test + n_val]])
    train_pos = _sorted_pairs(edges[perm[n_test + n_val:]])

    negatives = sample_negatives(g, n_test + n_val + n_train, rng)
    test_neg = _sorted_pairs(negatives[:n_test])
    val_neg = _sorted_pairs(negatives[n_test:n_test + n_val])
    train_neg = _sorted_pairs(negatives[n_test + n_val:])

    observed = build_graph(g.num_nodes, train_pos, g.original_ids)
    split = EdgeSplit(
        observed_graph=observed,
        train_pos=train_pos, train_neg=train_neg,
        val_pos=val_pos, val_neg=val_neg,
        test_pos=test_pos, test_neg=test_neg,
        seed=seed, test_ratio=test_ratio, val_ratio=val_ratio,
        val_basis=val_basis, dataset=dataset,
    )
    logger.info(
        "split %s seed=%d: train=%d val=%d test=%d (observed edges %d)",
        dataset, seed, n_train, n_val, n_test, observed.edge_count,
    )
    return split


def validate_split(split: EdgeSplit) -> None:
    """Raise ``SplitValidationError`` if any split invariant is broken"""
    n = max(split.observed_graph.num_nodes, 1)
    positive_codes: Set[int] = set()
    for tier, pos, neg in split.iter_tiers():
        if len(pos) != len(neg):
            raise SplitValidationError(
                f"tier {tier}: {len(pos)} positives but {len(neg)} negatives"
            )
        codes = _edge_codes(pos, n)
        if len(codes) != len(pos) or codes & positive_codes:
            raise SplitValidationError(f"tier {tier}: positive edges repeat across tiers")
        positive_codes |= codes

    negative_codes: Set[int] = set()
    for tier in TIERS:
        neg = split.negatives(tier)
        if len(neg) and (neg[:, 0] == neg[:, 1]).any():
            raise SplitValidationError(f"tier {tier}: negative self-pair")
        codes = _edge_codes(neg, n)
        if len(codes) != len(neg) or codes & negative_codes:
            raise SplitValidationError(f"tier {tier}: negative pairs repeat")
        overlap = codes & positive_codes
        if overlap:
            code = min(overlap)
            u, v = split.observed_graph.original_ids[[code // n, code % n]].tolist()
            raise SplitValidationError(f"tier {tier}: negative ({u}, {v}) is a positive edge")
        negative_codes |= codes

    if split.observed_graph.edge_count != len(split.train_pos):
        raise SplitValidationError(
            f"observed graph has {split.observed_graph.edge_count} edges "
            f"but {len(split.train_pos)} training positives"
        )


def save_split(split: EdgeSplit, directory: PathLike) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    ids = split.observed_graph
    for tier, pos, neg in split.iter_tiers():
        write_edge_list(directory / f"{tier}_pos.txt", ids.to_original_pairs(pos))
        write_edge_list(directory / f"{tier}_neg.txt", ids.to_original_pairs(neg))
    (directory / "nodes.txt").write_text(
        "".join(f"{o}\n" for o in ids.original_ids.tolist()), encoding="utf-8"
    )
    write_key_values(directory / "meta.txt", {
        "seed": split.seed,
        "test_ratio": repr(float(split.test_ratio)),
        "val_ratio": repr(float(split.val_ratio)),
        "val_basis": split.val_basis,
        "dataset": split.dataset,
        "num_nodes": ids.num_nodes,
        "format_version": SPLIT_FORMAT_VERSION,
    })
    logger.info("split written to %s", directory)
    return directory


def _read_nodes(path: Path) -> np.ndarray:
    ids = []
    with path.open("r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                ids.append(int(line))
            except ValueError:
                raise ParseError(path, line_no, f"expected a node id, got {line!r}") from None
    return np.asarray(ids, dtype=np.int64)


def load_split(directory: PathLike) -> EdgeSplit:
    directory = Path(directory)
    required = [f"{t}_{s}.txt" for t in TIERS for s in ("pos", "neg")] + ["meta.txt", "nodes.txt"]
    missing = [name for name in required if not (directory / name).is_file()]
    if missing:
        raise LoadError(f"split directory {directory} is missing {', '.join(missing)}")

    meta = read_key_values(directory / "meta.txt")
    try:
        seed = int(meta["seed"])
        test_ratio = float(meta["test_ratio"])
        val_ratio = float(meta["val_ratio"])
    except (KeyError, ValueError) as e:
        raise LoadError(f"{directory / 'meta.txt'}: bad or missing key ({e})") from None

    match = _SEED_IN_NAME.search(directory.name)
    if match and int(match.group(1)) != seed:
        logger.warning(
            "directory %s suggests seed %s but meta.txt says %d", directory.name, match.group(1), seed
        )

    original_ids = _read_nodes(directory / "nodes.txt")
    if "num_nodes" in meta and int(meta["num_nodes"]) != len(original_ids):
        raise SplitValidationError(
            f"meta.txt lists {meta['num_nodes']} nodes but nodes.txt has {len(original_ids)}"
        )
    id_graph = build_graph(len(original_ids), [], original_ids)

    tiers: Dict[str, np.ndarray] = {}
    for tier in TIERS:
        for side in ("pos", "neg"):
            path = directory / f"{tier}_{side}.txt"
            try:
                tiers[f"{tier}_{side}"] = id_graph.to_internal_pairs(_read_pairs(path))
            except InputError as e:
                if isinstance(e, ParseError):
                    raise
                raise SplitValidationError(f"{path}: {e}") from None

    observed = build_graph(len(original_ids), tiers["train_pos"], original_ids)
    split = EdgeSplit(
        observed_graph=observed,
        seed=seed,
        test_ratio=test_ratio,
        val_ratio=val_ratio,
        val_basis=meta.get("val_basis", "train"),
        dataset=meta.get("dataset", directory.name),
        **tiers,
    )
    validate_split(split)
    return split


# ============================================================================
# Node features
# ============================================================================

def load_embeddings(path: PathLike, g: Graph) -> NodeFeatures:
    """Lines "<node_id> <f1> ... <fD>" in original ids, aligned to ``g``'s internal ids"""
    path = Path(path)
    if not path.is_file():
        raise LoadError(f"embedding file not found: {path}")

    rows: Dict[int, List[float]] = {}
    dim = None
    with path.open("r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            try:
                node = int(parts[0])
                values = [float(x) for x in parts[1:]]
            except ValueError:
                raise ParseError(path, line_no, f"malformed embedding row {line!r}") from None
            if not values:
                raise ParseError(path, line_no, "embedding row has no values")
            if dim is None:
                dim = len(values)
            elif len(values) != dim:
                raise ParseError(path, line_no, f"ragged row: {len(values)} values, expected {dim}")
            rows[node] = values

    missing = [int(o) for o in g.original_ids if int(o) not in rows]
    if missing:
        shown = ", ".join(str(m) for m in missing[:10])
        raise InputError(f"embedding file {path.name} has no row for node {shown}")
    matrix = np.asarray([rows[int(o)] for o in g.original_ids], dtype=np.float64)
    return NodeFeatures(matrix.reshape(g.num_nodes, dim or 0))
