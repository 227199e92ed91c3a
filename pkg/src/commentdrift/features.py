"""Feature assembly: named vectors per changed pair, scaling, and filtering.

The vector layout is fixed: 53 code features, 14 comment features, 4 relation
features, in the order given by FEATURE_NAMES. Only genuinely continuous
columns (proportions, part-of-speech values, similarity distances) are
standardized; flags and counts pass through untouched.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .distill import ChangeOp, DeclChange
from .embed import EmbeddingModel, sim_ss, sim_ws
from .lexicon import POS_CATEGORIES, TokenSequence, normalize, pos_distance, pos_distribution
from .linker import CodeCommentPair
from .refactor import RefactoringFlags

# the nine statement kinds that carry add/delete/update count features
FEATURED_KINDS = (
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

_REFACTORING_NAMES = (
    "extract_method",
    "inline_method",
    "rename_method",
    "add_parameter",
    "remove_parameter",
    "inline_temp",
    "encapsulate_field",
    "introduce_assertion",
)

_DECL_NAMES = (
    "class_attributes_change",
    "method_name_change",
    "return_type_change",
    "parameter_change",
)


def _build_names() -> tuple[tuple[str, ...], frozenset[str]]:
    names: list[str] = list(_DECL_NAMES)
    continuous: set[str] = set()
    names.append("code_line_proportion")
    names.append("changed_line_proportion")
    continuous.update(("code_line_proportion", "changed_line_proportion"))
    for kind in FEATURED_KINDS:
        names.extend((f"{kind}_add", f"{kind}_delete", f"{kind}_update"))
    names.extend(_REFACTORING_NAMES)
    for cat in POS_CATEGORIES:
        name = f"code_pos_distance_{cat}"
        names.append(name)
        continuous.add(name)
    names.append("number_of_changes")
    names.append("contains_return")
    names.extend(("comment_todo", "comment_fix", "comment_version", "comment_bug"))
    for cat in POS_CATEGORIES:
        name = f"comment_pos_{cat}"
        names.append(name)
        continuous.add(name)
    relation = (
        "dist_comment_changed_code",
        "dist_token_code",
        "dist_comment_code",
        "common_token_pair_distance",
    )
    names.extend(relation)
    continuous.update(relation[:3])
    return tuple(names), frozenset(continuous)


FEATURE_NAMES, CONTINUOUS_FEATURES = _build_names()
CONTINUOUS_MASK = np.array([n in CONTINUOUS_FEATURES for n in FEATURE_NAMES])


@dataclass
class PairChange:
    """Everything known about one aligned pair across a commit."""

    old_pair: CodeCommentPair
    new_pair: CodeCommentPair
    ops: list[ChangeOp]
    decl: DeclChange
    refactorings: RefactoringFlags
    label: int
    s_cmt: TokenSequence
    s_code: TokenSequence
    s_code_new: TokenSequence
    s_smt: TokenSequence
    s_smt_new: TokenSequence
    has_return: bool = False


def changed_statement_tokens(ops: list[ChangeOp]) -> tuple[TokenSequence, TokenSequence]:
    """Normalized tokens of the old-side and new-side changed statements."""
    old_texts = [op.old_text for op in ops if op.old_text]
    new_texts = [op.new_text for op in ops if op.new_text]
    return (
        normalize(" ".join(old_texts), "code") if old_texts else (),
        normalize(" ".join(new_texts), "code") if new_texts else (),
    )


def code_features(pc: PairChange) -> dict[str, float]:
    decl = pc.decl
    out: dict[str, float] = {
        "class_attributes_change": float(decl.class_attributes_changed),
        "method_name_change": float(decl.method_name_changed),
        "return_type_change": float(decl.return_type_changed),
        "parameter_change": float(decl.parameters_changed),
    }
    code_lines = len(pc.old_pair.code_lines)
    comment_lines = pc.old_pair.comment_span[1] - pc.old_pair.comment_span[0] + 1
    pair_lines = code_lines + comment_lines
    out["code_line_proportion"] = code_lines / pair_lines if pair_lines else 0.0

    changed_lines: set[int] = set()
    for op in pc.ops:
        if op.old_span is not None:
            changed_lines.update(range(op.old_span[0], op.old_span[1] + 1))
    out["changed_line_proportion"] = len(changed_lines) / pair_lines if pair_lines else 0.0

    counts = {(kind, action): 0 for kind in FEATURED_KINDS for action in ("add", "delete", "update")}
    for op in pc.ops:
        key = (op.kind, op.action)
        if key in counts:
            counts[key] += 1
    for kind in FEATURED_KINDS:
        for action in ("add", "delete", "update"):
            out[f"{kind}_{action}"] = float(counts[(kind, action)])

    for name, value in zip(_REFACTORING_NAMES, pc.refactorings.as_tuple()):
        out[name] = float(value)

    old_dist = pos_distribution(pc.s_code)
    new_dist = pos_distribution(pc.s_code_new)
    for cat, value in zip(POS_CATEGORIES, pos_distance(old_dist, new_dist)):
        out[f"code_pos_distance_{cat}"] = float(value)

    out["number_of_changes"] = float(len(pc.ops))
    out["contains_return"] = float(pc.has_return)
    return out


def comment_features(comment: str) -> dict[str, float]:
    lowered = comment.lower()
    out: dict[str, float] = {
        "comment_todo": float("todo" in lowered),
        "comment_fix": float("fixme" in lowered or "fixed" in lowered),
        "comment_version": float("version" in lowered),
        "comment_bug": float("bug" in lowered),
    }
    dist = pos_distribution(normalize(comment, "comment"))
    for cat, value in zip(POS_CATEGORIES, dist):
        out[f"comment_pos_{cat}"] = float(value)
    return out


def relation_features(pc: PairChange, model: EmbeddingModel) -> dict[str, float]:
    cmt, code, code_new = pc.s_cmt, pc.s_code, pc.s_code_new
    d_smt = abs(sim_ss(cmt, pc.s_smt, model) - sim_ss(cmt, pc.s_smt_new, model))
    if cmt:
        d_token = sum(
            abs(sim_ws(w, code, model) - sim_ws(w, code_new, model)) for w in cmt
        ) / len(cmt)
    else:
        d_token = 0.0
    d_code = abs(sim_ss(cmt, code, model) - sim_ss(cmt, code_new, model))
    shared_old = len(set(cmt) & set(code))
    shared_new = len(set(cmt) & set(code_new))
    return {
        "dist_comment_changed_code": d_smt,
        "dist_token_code": d_token,
        "dist_comment_code": d_code,
        "common_token_pair_distance": float(shared_old - shared_new),
    }


def extract_features(pc: PairChange, model: EmbeddingModel) -> np.ndarray:
    values = code_features(pc)
    values.update(comment_features(pc.old_pair.comment_text))
    values.update(relation_features(pc, model))
    return np.array([values[name] for name in FEATURE_NAMES], dtype=np.float64)


@dataclass
class Standardizer:
    """Zero-mean unit-variance scaling of the continuous columns only."""

    means: np.ndarray = field(default_factory=lambda: np.empty(0))
    stds: np.ndarray = field(default_factory=lambda: np.empty(0))
    mask: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=bool))

    def fit(self, matrix: np.ndarray, mask: np.ndarray | None = None) -> "Standardizer":
        if matrix.shape[0] < 2:
            raise ValueError("standardize needs at least 2 rows")
        self.mask = CONTINUOUS_MASK.copy() if mask is None else np.asarray(mask, dtype=bool)
        self.means = matrix.mean(axis=0)
        self.stds = matrix.std(axis=0)  # population formula
        return self

    def transform(self, matrix: np.ndarray) -> np.ndarray:
        out = np.array(matrix, dtype=np.float64)
        for j in range(out.shape[1]):
            if not self.mask[j]:
                continue
            if self.stds[j] == 0.0:
                out[:, j] = 0.0
            else:
                out[:, j] = (out[:, j] - self.means[j]) / self.stds[j]
        return out

    def to_dict(self) -> dict:
        return {
            "means": self.means.tolist(),
            "stds": self.stds.tolist(),
            "mask": [bool(b) for b in self.mask],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Standardizer":
        return cls(
            np.asarray(data["means"], dtype=np.float64),
            np.asarray(data["stds"], dtype=np.float64),
            np.asarray(data["mask"], dtype=bool),
        )

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, sort_keys=True, separators=(",", ":"))

    @classmethod
    def load(cls, path: str) -> "Standardizer":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def filter_correlated(matrix: np.ndarray, threshold: float = 0.8) -> list[int]:
    """Indices of surviving features after greedy |Pearson r| filtering.

    For any pair at or above the threshold the later-indexed feature is
    dropped. Zero-variance columns have no defined correlation and are kept.
    """
    if matrix.shape[0] < 3:
        raise ValueError("correlation filter needs at least 3 rows")
    x = np.asarray(matrix, dtype=np.float64)
    n_features = x.shape[1]
    stds = x.std(axis=0)
    centered = x - x.mean(axis=0)
    dropped: set[int] = set()
    kept: list[int] = []
    for i in range(n_features):
        if i in dropped:
            continue
        kept.append(i)
        if stds[i] == 0.0:
            continue
        for j in range(i + 1, n_features):
            if j in dropped or stds[j] == 0.0:
                continue
            r = float(centered[:, i] @ centered[:, j]) / (x.shape[0] * stds[i] * stds[j])
            if abs(r) >= threshold:
                dropped.add(j)
    return kept


def save_matrix(
    path: str, matrix: np.ndarray, labels: np.ndarray | None = None, names: tuple[str, ...] = FEATURE_NAMES
) -> None:
    """Tab-separated text: header of names (plus label), decimal rows."""
    header = list(names) + (["label"] if labels is not None else [])
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\t".join(header) + "\n")
        for i in range(matrix.shape[0]):
            row = [repr(float(v)) for v in matrix[i]]
            if labels is not None:
                row.append(repr(float(labels[i])))
            fh.write("\t".join(row) + "\n")


def load_matrix(path: str) -> tuple[tuple[str, ...], np.ndarray, np.ndarray | None]:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        rows = [[float(v) for v in line.rstrip("\n").split("\t")] for line in fh if line.strip()]
    data = np.asarray(rows, dtype=np.float64) if rows else np.empty((0, len(header)))
    if header and header[-1] == "label":
        return tuple(header[:-1]), data[:, :-1], data[:, -1].astype(np.int64)
    return tuple(header), data, None
