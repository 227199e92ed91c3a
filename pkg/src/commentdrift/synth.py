"""Synthetic feature records with a planted outdated-comment signal.

Generates raw (unstandardized) feature matrices in the library's 71-column
layout. Positives carry the signal in two flavors: most have elevated
relation distances, the rest keep low distances but set declaration-change
flags. A slice of negatives drifts past the 0.05 similarity threshold, so
a fixed-threshold rule misclassifies them while a trained model does not.
"""

from __future__ import annotations

import numpy as np

from .features import FEATURE_NAMES

_IDX = {name: i for i, name in enumerate(FEATURE_NAMES)}

_DECL_FLAGS = (
    "class_attributes_change",
    "method_name_change",
    "return_type_change",
    "parameter_change",
)
_REFACTORINGS = (
    "extract_method",
    "inline_method",
    "rename_method",
    "add_parameter",
    "remove_parameter",
    "inline_temp",
    "encapsulate_field",
    "introduce_assertion",
)
_COUNT_COLS = tuple(
    f"{kind}_{action}"
    for kind in (
        "if",
        "else_if",
        "for",
        "while",
        "catch",
        "try",
        "throw",
        "method_invocation",
        "variable_declaration",
    )
    for action in ("add", "delete", "update")
)
_CODE_POS = tuple(n for n in FEATURE_NAMES if n.startswith("code_pos_distance_"))
_COMMENT_POS = tuple(n for n in FEATURE_NAMES if n.startswith("comment_pos_"))
_COMMENT_FLAGS = ("comment_todo", "comment_fix", "comment_version", "comment_bug")


def _set(X: np.ndarray, rows: np.ndarray, name: str, values) -> None:
    X[rows, _IDX[name]] = values


def generate_synthetic_dataset(
    n: int = 5000, positive_rate: float = 0.168, seed: int = 0
) -> tuple[np.ndarray, np.ndarray]:
    """Feature matrix and labels with the class mix and signal described above.

    Deterministic for a given seed. Returns (X, y) with X of shape
    (n, 71) float64 and y of shape (n,) in {0, 1}.
    """
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    n_pos = int(round(n * positive_rate))
    y = np.zeros(n, dtype=np.int64)
    pos_rows = rng.choice(n, size=n_pos, replace=False)
    y[pos_rows] = 1
    neg_rows = np.nonzero(y == 0)[0]

    X = np.zeros((n, len(FEATURE_NAMES)), dtype=np.float64)
    all_rows = np.arange(n)

    # uninformative background for every record
    for name in _DECL_FLAGS:
        _set(X, all_rows, name, (rng.random(n) < 0.02).astype(float))
    _set(X, all_rows, "code_line_proportion", rng.uniform(0.5, 0.95, n))
    _set(X, all_rows, "changed_line_proportion", rng.uniform(0.05, 0.6, n))
    for name in _COUNT_COLS:
        _set(X, all_rows, name, rng.poisson(0.3, n).astype(float))
    for name in _REFACTORINGS:
        _set(X, all_rows, name, (rng.random(n) < 0.03).astype(float))
    for name in _CODE_POS:
        _set(X, all_rows, name, np.clip(np.abs(rng.normal(0.0, 0.05, n)), 0.0, 1.0))
    _set(X, all_rows, "number_of_changes", 1.0 + rng.poisson(1.0, n))
    _set(X, all_rows, "contains_return", (rng.random(n) < 0.4).astype(float))
    for name in _COMMENT_FLAGS:
        _set(X, all_rows, name, (rng.random(n) < 0.05).astype(float))
    pos_mix = rng.dirichlet(np.full(len(_COMMENT_POS), 2.0), size=n)
    for j, name in enumerate(_COMMENT_POS):
        _set(X, all_rows, name, pos_mix[:, j])

    # relation features: negatives sit near zero, except a drifty slice
    # that crosses the 0.05 threshold without any other signal
    _set(X, all_rows, "dist_comment_changed_code", np.abs(rng.normal(0.0, 0.02, n)))
    _set(X, all_rows, "dist_token_code", np.abs(rng.normal(0.0, 0.015, n)))
    _set(X, all_rows, "dist_comment_code", rng.uniform(0.0, 0.045, n))
    _set(X, all_rows, "common_token_pair_distance", np.rint(rng.normal(0.0, 0.8, n)))

    drifty = neg_rows[rng.random(neg_rows.size) < 0.10]
    _set(X, drifty, "dist_comment_code", rng.uniform(0.055, 0.12, drifty.size))

    # positives: 70% relation-driven, 30% declaration-driven
    relation_driven = rng.random(n_pos) < 0.70
    rel_rows = pos_rows[relation_driven]
    decl_rows = pos_rows[~relation_driven]

    _set(X, rel_rows, "dist_comment_changed_code", rng.uniform(0.12, 0.40, rel_rows.size))
    _set(X, rel_rows, "dist_token_code", rng.uniform(0.05, 0.25, rel_rows.size))
    _set(X, rel_rows, "dist_comment_code", rng.uniform(0.07, 0.30, rel_rows.size))
    _set(
        X,
        rel_rows,
        "common_token_pair_distance",
        (1.0 + rng.poisson(2.0, rel_rows.size)).astype(float),
    )
    for name in _DECL_FLAGS:
        _set(X, rel_rows, name, (rng.random(rel_rows.size) < 0.3).astype(float))

    # declaration-driven positives stay under the similarity threshold:
    # the rule baseline cannot see them, the decl flags can
    picked = rng.integers(0, len(_DECL_FLAGS), decl_rows.size)
    for j, name in enumerate(_DECL_FLAGS):
        forced = decl_rows[picked == j]
        _set(X, forced, name, 1.0)
        extra = decl_rows[rng.random(decl_rows.size) < 0.3]
        _set(X, extra, name, 1.0)
    _set(X, decl_rows, "number_of_changes", 2.0 + rng.poisson(2.0, decl_rows.size))

    return X, y


def rule_labels(X: np.ndarray, threshold: float = 0.05) -> np.ndarray:
    """The fixed-threshold rule applied to the similarity-drift column."""
    return (X[:, _IDX["dist_comment_code"]] > threshold).astype(np.int64)
