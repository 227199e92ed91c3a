"""Random forest classifier over gini impurity, trained from scratch.

Each tree grows on a bootstrap sample, choosing at every node the best
threshold split over a random feature subset. All randomness derives
from one seed plus the tree index, so identical inputs yield identical
forests. The module also houses the evaluation helpers (precision,
recall, F1, calibration bins), impurity-based feature importance, the
similarity-threshold rule baseline, and cross-validated grid search.
"""

from __future__ import annotations

import itertools
import math
import struct
from dataclasses import dataclass, field, replace
from typing import BinaryIO, Iterable, Sequence

import numpy as np

from .embed import EmbeddingModel, sim_ss
from .features import PairChange

_MAGIC = b"CDRF"
_FORMAT_VERSION = 1

_CRITERIA = ("gini", "entropy")
_SUBSET_MODES = ("sqrt", "log2", "all")

# Hyperparameter grid walked by grid_search when none is supplied; the
# Hyperparams defaults below are the winners of this grid, so running
# the search is optional.
DEFAULT_GRID: dict[str, tuple] = {
    "n_trees": (50, 100, 200, 300),
    "criterion": ("gini", "entropy"),
    "max_depth": (None, 5, 10, 20),
    "min_samples_split": (2, 5, 10),
    "min_samples_leaf": (1, 2, 4),
    "feature_subset": ("sqrt", "log2", "all"),
}


@dataclass(frozen=True)
class Hyperparams:
    """Forest training knobs; defaults are the tuned configuration."""

    n_trees: int = 200
    criterion: str = "gini"
    max_depth: int | None = None
    min_samples_split: int = 2
    min_samples_leaf: int = 1
    feature_subset: str = "sqrt"
    seed: int = 0

    def validate(self) -> None:
        if self.n_trees < 1:
            raise ValueError("n_trees must be at least 1")
        if self.criterion not in _CRITERIA:
            raise ValueError(f"unknown criterion: {self.criterion!r}")
        if self.max_depth is not None and self.max_depth < 1:
            raise ValueError("max_depth must be None or at least 1")
        if self.min_samples_split < 2:
            raise ValueError("min_samples_split must be at least 2")
        if self.min_samples_leaf < 1:
            raise ValueError("min_samples_leaf must be at least 1")
        if self.feature_subset not in _SUBSET_MODES:
            raise ValueError(f"unknown feature_subset: {self.feature_subset!r}")


def gini(labels: Iterable[int]) -> float:
    """Gini impurity of a 0/1 label multiset; the empty set scores 0."""
    arr = np.asarray(list(labels), dtype=np.int64)
    n = arr.size
    if n == 0:
        return 0.0
    c1 = int(np.count_nonzero(arr))
    c0 = n - c1
    p0 = c0 / n
    p1 = c1 / n
    return 1.0 - p0 * p0 - p1 * p1


def gain(parent: Iterable[int], left: Iterable[int], right: Iterable[int]) -> float:
    """Impurity reduction from splitting parent into left and right.

    Empty children contribute weight zero; callers are responsible for
    left and right actually partitioning the parent.
    """
    parent = list(parent)
    left = list(left)
    right = list(right)
    n = len(parent)
    if n == 0:
        return 0.0
    return gini(parent) - (len(left) / n) * gini(left) - (len(right) / n) * gini(right)


def _impurity_counts(c0: np.ndarray, c1: np.ndarray, criterion: str) -> np.ndarray:
    """Vectorized impurity from per-node class counts.

    Mirrors gini() arithmetic exactly so split choices recorded during
    training agree bit for bit with scalar re-evaluation.
    """
    n = c0 + c1
    p0 = c0 / n
    p1 = c1 / n
    if criterion == "gini":
        return 1.0 - p0 * p0 - p1 * p1
    ent = np.zeros_like(p0)
    for p in (p0, p1):
        nz = p > 0
        ent[nz] -= p[nz] * np.log2(p[nz])
    return ent


def _subset_size(n_features: int, mode: str) -> int:
    if mode == "sqrt":
        k = math.ceil(math.sqrt(n_features))
    elif mode == "log2":
        k = math.ceil(math.log2(n_features)) if n_features > 1 else 1
    else:
        k = n_features
    return max(1, min(k, n_features))


@dataclass
class Tree:
    """One decision tree as parallel node arrays.

    feature is -1 at leaves and a full-layout feature index otherwise;
    left/right hold child node ids (-1 at leaves); count0/count1 are the
    training class counts that reached each node.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    count0: np.ndarray
    count1: np.ndarray

    @property
    def node_count(self) -> int:
        return int(self.feature.size)

    def leaf_probability(self, node: int) -> float:
        """Positive-class probability at a node; pairs with 1-p to sum to 1."""
        n = int(self.count0[node]) + int(self.count1[node])
        return int(self.count1[node]) / n

    def equals(self, other: "Tree") -> bool:
        return (
            np.array_equal(self.feature, other.feature)
            and np.array_equal(self.threshold, other.threshold)
            and np.array_equal(self.left, other.left)
            and np.array_equal(self.right, other.right)
            and np.array_equal(self.count0, other.count0)
            and np.array_equal(self.count1, other.count1)
        )


@dataclass
class Forest:
    trees: list[Tree]
    kept_feature_mask: np.ndarray
    hyperparams: Hyperparams
    feature_names: tuple[str, ...] | None
    n_features: int
    # per-tree training trace kept only when requested; never serialized
    audit: list | None = field(default=None, repr=False)

    def equals(self, other: "Forest") -> bool:
        return (
            len(self.trees) == len(other.trees)
            and all(a.equals(b) for a, b in zip(self.trees, other.trees))
            and np.array_equal(self.kept_feature_mask, other.kept_feature_mask)
            and self.hyperparams == other.hyperparams
            and self.feature_names == other.feature_names
            and self.n_features == other.n_features
        )


def _best_split(
    Xb: np.ndarray,
    yb: np.ndarray,
    rows: np.ndarray,
    subset: Sequence[int],
    parent_imp: float,
    min_leaf: int,
    criterion: str,
) -> tuple[float, int, float] | None:
    """Best (gain, local feature, threshold) over the candidate subset.

    Thresholds are midpoints between consecutive distinct sorted values.
    Ties break toward the lowest feature index, then the lowest
    threshold; returns None when no split leaves min_leaf samples on
    both sides.
    """
    n = rows.size
    y_node = yb[rows]
    total1 = int(y_node.sum())
    best: tuple[float, int, float] | None = None
    for f in sorted(subset):
        v = Xb[rows, f]
        order = np.argsort(v, kind="stable")
        vs = v[order]
        boundaries = np.nonzero(vs[1:] != vs[:-1])[0]
        if boundaries.size == 0:
            continue
        cum1 = np.cumsum(y_node[order])
        ln = boundaries + 1
        rn = n - ln
        valid = (ln >= min_leaf) & (rn >= min_leaf)
        if not valid.any():
            continue
        l1 = cum1[boundaries]
        l0 = ln - l1
        r1 = total1 - l1
        r0 = rn - r1
        limp = _impurity_counts(l0, l1, criterion)
        rimp = _impurity_counts(r0, r1, criterion)
        gains = parent_imp - (ln / n) * limp - (rn / n) * rimp
        gains = np.where(valid, gains, -np.inf)
        b = int(np.argmax(gains))
        g = float(gains[b])
        if best is None or g > best[0]:
            th = (float(vs[boundaries[b]]) + float(vs[boundaries[b] + 1])) / 2.0
            best = (g, f, th)
    return best


def _grow_tree(
    Xk: np.ndarray,
    y: np.ndarray,
    boot: np.ndarray,
    kept_idx: np.ndarray,
    k: int,
    hp: Hyperparams,
    rng: np.random.Generator,
    collect_audit: bool,
) -> tuple[Tree, dict | None]:
    Xb = Xk[boot]
    yb = y[boot]
    n = boot.size
    n_local = Xk.shape[1]

    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    count0: list[int] = []
    count1: list[int] = []
    audit_nodes: list[dict] = []

    # iterative DFS, left child first, so deep trees cannot overflow the
    # interpreter stack; rng calls happen in visit order
    stack: list[tuple[np.ndarray, int, int, bool]] = [(np.arange(n), 0, -1, False)]
    while stack:
        rows, depth, parent, is_right = stack.pop()
        nid = len(feature)
        if parent >= 0:
            if is_right:
                right[parent] = nid
            else:
                left[parent] = nid
        c1 = int(yb[rows].sum())
        c0 = rows.size - c1
        count0.append(c0)
        count1.append(c1)

        splittable = (
            c0 > 0
            and c1 > 0
            and rows.size >= hp.min_samples_split
            and (hp.max_depth is None or depth < hp.max_depth)
        )
        best = None
        subset: np.ndarray | None = None
        if splittable:
            subset = rng.choice(n_local, size=k, replace=False)
            parent_imp = float(
                _impurity_counts(
                    np.array([float(c0)]), np.array([float(c1)]), hp.criterion
                )[0]
            )
            best = _best_split(
                Xb, yb, rows, subset.tolist(), parent_imp, hp.min_samples_leaf, hp.criterion
            )
            if best is not None and best[0] <= 0.0:
                best = None
        if best is None:
            feature.append(-1)
            threshold.append(0.0)
            left.append(-1)
            right.append(-1)
            continue

        g, local_f, th = best
        feature.append(int(kept_idx[local_f]))
        threshold.append(th)
        left.append(-1)
        right.append(-1)
        if collect_audit:
            audit_nodes.append(
                {
                    "node": nid,
                    "rows": rows.copy(),
                    "subset": np.sort(kept_idx[subset]).tolist(),
                    "feature": int(kept_idx[local_f]),
                    "threshold": th,
                    "gain": g,
                }
            )
        mask = Xb[rows, local_f] <= th
        stack.append((rows[~mask], depth + 1, nid, True))
        stack.append((rows[mask], depth + 1, nid, False))

    tree = Tree(
        feature=np.asarray(feature, dtype=np.int32),
        threshold=np.asarray(threshold, dtype=np.float64),
        left=np.asarray(left, dtype=np.int32),
        right=np.asarray(right, dtype=np.int32),
        count0=np.asarray(count0, dtype=np.int64),
        count1=np.asarray(count1, dtype=np.int64),
    )
    audit = {"bootstrap": boot.copy(), "nodes": audit_nodes} if collect_audit else None
    return tree, audit


def train_forest(
    X: np.ndarray,
    y: np.ndarray,
    hp: Hyperparams,
    *,
    feature_names: Sequence[str] | None = None,
    kept_mask: np.ndarray | None = None,
    collect_audit: bool = False,
) -> Forest:
    """Train a forest of hp.n_trees trees on X (rows) and 0/1 labels y.

    kept_mask restricts splits to a subset of columns while keeping the
    full layout for prediction; the per-node candidate count is the
    ceiling square root (or log2) of the kept column count. Tree t draws
    all its randomness from SeedSequence(hp.seed, spawn_key=(t,)):
    first the bootstrap row draw, then one feature-subset draw per
    splittable node in depth-first visit order.
    """
    hp.validate()
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64).ravel()
    if X.ndim != 2:
        raise ValueError("X must be a 2-d matrix")
    if X.shape[0] != y.size:
        raise ValueError("X and y row counts differ")
    if X.shape[0] < hp.min_samples_split:
        raise ValueError("not enough rows to split")
    classes = np.unique(y)
    if not np.all(np.isin(classes, (0, 1))):
        raise ValueError("labels must be 0 or 1")
    if classes.size < 2:
        raise ValueError("training data contains a single class")

    n_features = X.shape[1]
    if kept_mask is None:
        kept = np.ones(n_features, dtype=bool)
    else:
        kept = np.asarray(kept_mask, dtype=bool).ravel()
        if kept.size != n_features:
            raise ValueError("kept_mask length does not match feature count")
    kept_idx = np.nonzero(kept)[0]
    if kept_idx.size == 0:
        raise ValueError("kept_mask removes every feature")
    names: tuple[str, ...] | None = None
    if feature_names is not None:
        names = tuple(feature_names)
        if len(names) != n_features:
            raise ValueError("feature_names length does not match feature count")

    k = _subset_size(kept_idx.size, hp.feature_subset)
    Xk = np.ascontiguousarray(X[:, kept_idx])
    n = X.shape[0]

    trees: list[Tree] = []
    audits: list[dict] = []
    for t in range(hp.n_trees):
        rng = np.random.default_rng(np.random.SeedSequence(hp.seed, spawn_key=(t,)))
        boot = rng.integers(0, n, size=n)
        tree, audit = _grow_tree(Xk, y, boot, kept_idx, k, hp, rng, collect_audit)
        trees.append(tree)
        if audit is not None:
            audits.append(audit)

    return Forest(
        trees=trees,
        kept_feature_mask=kept,
        hyperparams=hp,
        feature_names=names,
        n_features=n_features,
        audit=audits if collect_audit else None,
    )


def _forest_probs(forest: Forest, X: np.ndarray) -> np.ndarray:
    """Mean positive leaf probability per row.

    Per-tree probabilities are sorted before summing, so the result does
    not depend on tree order.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != forest.n_features:
        raise ValueError("feature layout does not match the trained forest")
    n = X.shape[0]
    per_tree = np.empty((len(forest.trees), n), dtype=np.float64)
    for t, tree in enumerate(forest.trees):
        node = np.zeros(n, dtype=np.int64)
        while True:
            feat = tree.feature[node]
            active = np.nonzero(feat >= 0)[0]
            if active.size == 0:
                break
            rows_f = feat[active]
            goes_left = X[active, rows_f] <= tree.threshold[node[active]]
            node[active] = np.where(
                goes_left, tree.left[node[active]], tree.right[node[active]]
            )
        totals = tree.count0[node] + tree.count1[node]
        per_tree[t] = tree.count1[node] / totals
    per_tree.sort(axis=0)
    return per_tree.sum(axis=0) / len(forest.trees)


def predict(forest: Forest, x: Sequence[float]) -> tuple[float, int]:
    """Probability and label for one feature vector; label is prob >= 0.5."""
    x = np.asarray(x, dtype=np.float64).ravel()
    if x.size != forest.n_features:
        raise ValueError("feature layout does not match the trained forest")
    p = float(_forest_probs(forest, x.reshape(1, -1))[0])
    return p, int(p >= 0.5)


def predict_batch(forest: Forest, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Probabilities and labels for a feature matrix, one row per sample."""
    probs = _forest_probs(forest, X)
    return probs, (probs >= 0.5).astype(np.int64)


def feature_importance(forest: Forest) -> np.ndarray:
    """Per-feature importance, normalized to sum 1.

    Each internal node contributes its impurity decrease weighted by the
    fraction of the tree's samples that reached it; contributions are
    summed per feature across all trees before normalizing. The sample
    weighting keeps root and deep splits comparable.
    """
    totals = np.zeros(forest.n_features, dtype=np.float64)
    for tree in forest.trees:
        nq = (tree.count0 + tree.count1).astype(np.float64)
        imp = _impurity_counts(
            tree.count0.astype(np.float64),
            tree.count1.astype(np.float64),
            forest.hyperparams.criterion,
        )
        internal = np.nonzero(tree.feature >= 0)[0]
        if internal.size == 0:
            continue
        l = tree.left[internal]
        r = tree.right[internal]
        n_root = nq[0]
        decrease = (
            nq[internal] * imp[internal] - nq[l] * imp[l] - nq[r] * imp[r]
        ) / n_root
        np.add.at(totals, tree.feature[internal], decrease)
    s = totals.sum()
    if s > 0:
        totals /= s
    return totals


@dataclass(frozen=True)
class Metrics:
    tp: int
    fp: int
    tn: int
    fn: int
    precision: float
    recall: float
    f1: float

    def to_dict(self) -> dict:
        return {
            "tp": self.tp,
            "fp": self.fp,
            "tn": self.tn,
            "fn": self.fn,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
        }


def evaluate(predictions: Sequence[int], labels: Sequence[int]) -> Metrics:
    """Confusion counts plus precision/recall/F1 (0 on zero denominators)."""
    p = np.asarray(predictions, dtype=np.int64).ravel()
    l = np.asarray(labels, dtype=np.int64).ravel()
    if p.size != l.size:
        raise ValueError("predictions and labels differ in length")
    tp = int(np.sum((p == 1) & (l == 1)))
    fp = int(np.sum((p == 1) & (l == 0)))
    tn = int(np.sum((p == 0) & (l == 0)))
    fn = int(np.sum((p == 0) & (l == 1)))
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    f1 = (
        2 * precision * recall / (precision + recall)
        if precision + recall > 0
        else 0.0
    )
    return Metrics(tp=tp, fp=fp, tn=tn, fn=fn, precision=precision, recall=recall, f1=f1)


def calibration(
    probabilities: Sequence[float], labels: Sequence[int], bin_count: int
) -> list[tuple[float, float, int]]:
    """Reliability points: (mean probability, positive fraction, count) per bin.

    Bins are equal-width over [0, 1]; probability 1.0 lands in the last
    bin and empty bins are omitted.
    """
    if bin_count < 1:
        raise ValueError("bin_count must be at least 1")
    p = np.asarray(probabilities, dtype=np.float64).ravel()
    l = np.asarray(labels, dtype=np.int64).ravel()
    if p.size != l.size:
        raise ValueError("probabilities and labels differ in length")
    idx = np.minimum((p * bin_count).astype(np.int64), bin_count - 1)
    out: list[tuple[float, float, int]] = []
    for b in range(bin_count):
        mask = idx == b
        count = int(np.count_nonzero(mask))
        if count == 0:
            continue
        out.append((float(p[mask].mean()), float(l[mask].mean()), count))
    return out


def rule_baseline(
    pc: PairChange, model: EmbeddingModel, threshold: float = 0.05
) -> int:
    """Flag a pair when code similarity moved by more than the threshold.

    Compares the comment's similarity to the old code against its
    similarity to the new code; strictly greater than the threshold
    counts as outdated.
    """
    before = sim_ss(pc.s_cmt, pc.s_code, model)
    after = sim_ss(pc.s_cmt, pc.s_code_new, model)
    return int(abs(before - after) > threshold)


def _fold_indices(y: np.ndarray, folds: int, seed: int) -> list[np.ndarray]:
    """Stratified fold assignment so every fold keeps the class mix."""
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0,)))
    buckets: list[list[int]] = [[] for _ in range(folds)]
    for cls in (0, 1):
        idx = np.nonzero(y == cls)[0]
        idx = idx[rng.permutation(idx.size)]
        for pos, i in enumerate(idx):
            buckets[pos % folds].append(int(i))
    return [np.asarray(sorted(b), dtype=np.int64) for b in buckets]


def grid_search(
    X: np.ndarray,
    y: np.ndarray,
    grid: dict[str, tuple] | None = None,
    *,
    folds: int = 10,
    seed: int = 0,
    kept_mask: np.ndarray | None = None,
) -> tuple[Hyperparams, list[tuple[Hyperparams, float]]]:
    """Pick hyperparameters by mean F1 over k-fold cross-validation.

    Walks the cartesian product of the grid (DEFAULT_GRID when omitted)
    in declaration order; ties keep the earliest combination. Returns
    the winning Hyperparams and the scored list.
    """
    if grid is None:
        grid = DEFAULT_GRID
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64).ravel()
    fold_idx = _fold_indices(y, folds, seed)
    keys = list(grid.keys())
    results: list[tuple[Hyperparams, float]] = []
    best: tuple[Hyperparams, float] | None = None
    for combo in itertools.product(*(grid[k] for k in keys)):
        hp = replace(Hyperparams(seed=seed), **dict(zip(keys, combo)))
        scores = []
        for f in range(folds):
            test_rows = fold_idx[f]
            train_rows = np.concatenate(
                [fold_idx[i] for i in range(folds) if i != f]
            )
            forest = train_forest(
                X[train_rows], y[train_rows], hp, kept_mask=kept_mask
            )
            _, labels = predict_batch(forest, X[test_rows])
            scores.append(evaluate(labels, y[test_rows]).f1)
        mean_f1 = float(np.mean(scores))
        results.append((hp, mean_f1))
        if best is None or mean_f1 > best[1]:
            best = (hp, mean_f1)
    assert best is not None
    return best[0], results


_CRITERION_CODE = {name: i for i, name in enumerate(_CRITERIA)}
_SUBSET_CODE = {name: i for i, name in enumerate(_SUBSET_MODES)}


def _write_array(fh: BinaryIO, arr: np.ndarray, dtype: str) -> None:
    fh.write(arr.astype(dtype).tobytes())


def save_forest(forest: Forest, path: str) -> None:
    """Serialize a forest to a binary file.

    Layout, all little-endian: magic "CDRF", u32 version, then the
    hyperparams (u32 n_trees, u8 criterion code, u8 subset code, i32
    max_depth with -1 for unbounded, u32 min_samples_split, u32
    min_samples_leaf, i64 seed), u32 feature count, the kept mask as one
    byte per feature, a u8 names flag followed by u16-length utf-8
    names, then u32 tree count and per tree a u32 node count with the
    node arrays in order: feature i32, threshold f64, left i32, right
    i32, count0 i64, count1 i64.
    """
    hp = forest.hyperparams
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", _FORMAT_VERSION))
        fh.write(
            struct.pack(
                "<IBBiIIq",
                hp.n_trees,
                _CRITERION_CODE[hp.criterion],
                _SUBSET_CODE[hp.feature_subset],
                -1 if hp.max_depth is None else hp.max_depth,
                hp.min_samples_split,
                hp.min_samples_leaf,
                hp.seed,
            )
        )
        fh.write(struct.pack("<I", forest.n_features))
        fh.write(forest.kept_feature_mask.astype(np.uint8).tobytes())
        if forest.feature_names is None:
            fh.write(struct.pack("<B", 0))
        else:
            fh.write(struct.pack("<B", 1))
            for name in forest.feature_names:
                raw = name.encode("utf-8")
                fh.write(struct.pack("<H", len(raw)))
                fh.write(raw)
        fh.write(struct.pack("<I", len(forest.trees)))
        for tree in forest.trees:
            fh.write(struct.pack("<I", tree.node_count))
            _write_array(fh, tree.feature, "<i4")
            _write_array(fh, tree.threshold, "<f8")
            _write_array(fh, tree.left, "<i4")
            _write_array(fh, tree.right, "<i4")
            _write_array(fh, tree.count0, "<i8")
            _write_array(fh, tree.count1, "<i8")


def _read_exact(fh: BinaryIO, size: int) -> bytes:
    data = fh.read(size)
    if len(data) != size:
        raise ValueError("model file is truncated")
    return data


def _read_array(fh: BinaryIO, count: int, dtype: str) -> np.ndarray:
    raw = _read_exact(fh, count * np.dtype(dtype).itemsize)
    return np.frombuffer(raw, dtype=dtype).copy()


def load_forest(path: str) -> Forest:
    """Load a forest written by save_forest."""
    with open(path, "rb") as fh:
        if _read_exact(fh, 4) != _MAGIC:
            raise ValueError("not a forest model file")
        (version,) = struct.unpack("<I", _read_exact(fh, 4))
        if version != _FORMAT_VERSION:
            raise ValueError(f"unsupported model format version {version}")
        n_trees, crit, subset, max_depth, mss, msl, seed = struct.unpack(
            "<IBBiIIq", _read_exact(fh, struct.calcsize("<IBBiIIq"))
        )
        hp = Hyperparams(
            n_trees=n_trees,
            criterion=_CRITERIA[crit],
            max_depth=None if max_depth < 0 else max_depth,
            min_samples_split=mss,
            min_samples_leaf=msl,
            feature_subset=_SUBSET_MODES[subset],
            seed=seed,
        )
        (n_features,) = struct.unpack("<I", _read_exact(fh, 4))
        kept = np.frombuffer(_read_exact(fh, n_features), dtype=np.uint8).astype(bool)
        (has_names,) = struct.unpack("<B", _read_exact(fh, 1))
        names: tuple[str, ...] | None = None
        if has_names:
            out = []
            for _ in range(n_features):
                (ln,) = struct.unpack("<H", _read_exact(fh, 2))
                out.append(_read_exact(fh, ln).decode("utf-8"))
            names = tuple(out)
        (tree_count,) = struct.unpack("<I", _read_exact(fh, 4))
        trees = []
        for _ in range(tree_count):
            (nodes,) = struct.unpack("<I", _read_exact(fh, 4))
            trees.append(
                Tree(
                    feature=_read_array(fh, nodes, "<i4"),
                    threshold=_read_array(fh, nodes, "<f8"),
                    left=_read_array(fh, nodes, "<i4"),
                    right=_read_array(fh, nodes, "<i4"),
                    count0=_read_array(fh, nodes, "<i8"),
                    count1=_read_array(fh, nodes, "<i8"),
                )
            )
    return Forest(
        trees=trees,
        kept_feature_mask=kept,
        hyperparams=hp,
        feature_names=names,
        n_features=n_features,
    )


def dump_forest(forest: Forest, max_trees: int | None = None) -> str:
    """Human-readable rendering of the forest's trees."""
    lines = [
        "forest: trees={} criterion={} features={} kept={}".format(
            len(forest.trees),
            forest.hyperparams.criterion,
            forest.n_features,
            int(forest.kept_feature_mask.sum()),
        )
    ]
    shown = forest.trees if max_trees is None else forest.trees[:max_trees]
    for t, tree in enumerate(shown):
        lines.append(f"tree {t}: nodes={tree.node_count}")
        stack = [(0, 1)]
        while stack:
            node, depth = stack.pop()
            pad = "  " * depth
            c0 = int(tree.count0[node])
            c1 = int(tree.count1[node])
            f = int(tree.feature[node])
            if f < 0:
                p1 = tree.leaf_probability(node)
                lines.append(f"{pad}[{node}] leaf counts=({c0},{c1}) p1={p1:.6f}")
            else:
                name = (
                    forest.feature_names[f]
                    if forest.feature_names is not None
                    else f"f{f}"
                )
                th = float(tree.threshold[node])
                lines.append(
                    f"{pad}[{node}] {name} <= {th:.6g} counts=({c0},{c1})"
                )
                stack.append((int(tree.right[node]), depth + 1))
                stack.append((int(tree.left[node]), depth + 1))
    if max_trees is not None and len(forest.trees) > len(shown):
        lines.append(f"... {len(forest.trees) - len(shown)} more trees")
    return "\n".join(lines) + "\n"
