"""Mining version-control history into labeled code-comment records.

Walks first-parent commit chains of a git repository, extracts aligned
code-comment pairs from each changed file, and labels every pair by
whether its comment text changed. Records serialize to JSON Lines and
round-trip losslessly, so a persisted dataset can be re-featurized
without the original repository.
"""

from __future__ import annotations

import dataclasses
import json
import os
import subprocess
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .distill import ChangeOp, DeclChange, DeclContext, decl_changes, diff
from .features import PairChange, changed_statement_tokens
from .lexicon import normalize
from .linker import (
    AlignedPair,
    CodeCommentPair,
    align_pairs,
    extract_block_pairs,
    extract_method_pairs,
)
from .parsing import ParseError, SyntaxTree, parse
from .refactor import RefactoringFlags, detect_refactorings


class RepositoryError(Exception):
    """The repository is missing, unreadable, or not git."""


@dataclass
class ScanStats:
    commits: int = 0
    merges_skipped: int = 0
    unparsable_commits: int = 0
    files_seen: int = 0
    parse_failures: int = 0


@dataclass
class CommitRecord:
    commit_id: str
    timestamp: int
    # (path, old source or None, new source or None); at least one side set
    changed_files: list[tuple[str, str | None, str | None]]


@dataclass
class DatasetRecord:
    pair_change: PairChange
    project: str
    commit_id: str
    label: int


def _git(repo_path: str, *args: str) -> str:
    proc = subprocess.run(
        ["git", "-C", repo_path, *args],
        capture_output=True,
        text=True,
        encoding="utf-8",
        errors="replace",
    )
    if proc.returncode != 0:
        raise RepositoryError(
            f"git {' '.join(args)} failed in {repo_path}: {proc.stderr.strip()}"
        )
    return proc.stdout


def _normalize_extensions(extensions: Sequence[str]) -> tuple[str, ...]:
    out = []
    for ext in extensions:
        ext = ext.strip()
        if not ext:
            continue
        out.append(ext if ext.startswith(".") else "." + ext)
    return tuple(out)


def _blob(repo_path: str, commit: str, path: str) -> str | None:
    try:
        return _git(repo_path, "show", f"{commit}:{path}")
    except RepositoryError:
        return None


def scan_history(
    repo_path: str,
    file_extension_filter: Sequence[str],
    stats: ScanStats | None = None,
    *,
    rev_range: str | None = None,
) -> Iterator[CommitRecord]:
    """Yield per-commit file revisions in chronological order.

    Follows the first-parent chain only and skips merge commits; files
    are restricted to the extension filter. A commit whose diff cannot
    be read is skipped and counted on stats.unparsable_commits.
    rev_range narrows the walk to a git rev-list range such as A..B.
    """
    if not os.path.isdir(repo_path):
        raise RepositoryError(f"not a directory: {repo_path}")
    _git(repo_path, "rev-parse", "--git-dir")
    exts = _normalize_extensions(file_extension_filter)
    log_args = ["log", "--first-parent", "--reverse", "--format=%H %ct %P"]
    if rev_range:
        log_args.append(rev_range)
    try:
        log = _git(repo_path, *log_args)
    except RepositoryError:
        if rev_range:
            raise
        return  # no commits yet: an empty repository is an empty stream

    for line in log.splitlines():
        parts = line.split()
        if not parts:
            continue
        commit_id, timestamp = parts[0], int(parts[1])
        parents = parts[2:]
        if len(parents) >= 2:
            if stats:
                stats.merges_skipped += 1
            continue
        try:
            raw = _git(
                repo_path,
                "diff-tree",
                "--no-commit-id",
                "--name-status",
                "--root",
                "-r",
                commit_id,
            )
            changed: list[tuple[str, str | None, str | None]] = []
            for entry in raw.splitlines():
                if "\t" not in entry:
                    continue
                status, path = entry.split("\t", 1)
                if exts and not any(path.endswith(e) for e in exts):
                    continue
                old_src = None
                new_src = None
                if status[0] in ("M", "T", "D") and parents:
                    old_src = _blob(repo_path, parents[0], path)
                if status[0] in ("M", "T", "A", "C"):
                    new_src = _blob(repo_path, commit_id, path)
                if old_src is None and new_src is None:
                    continue
                changed.append((path, old_src, new_src))
                if stats:
                    stats.files_seen += 1
        except RepositoryError:
            if stats:
                stats.unparsable_commits += 1
            continue
        if stats:
            stats.commits += 1
        yield CommitRecord(commit_id=commit_id, timestamp=timestamp, changed_files=changed)


def normalize_comment_text(text: str) -> str:
    """Comment text with delimiters stripped and whitespace collapsed.

    Case is preserved: wording changes count, formatting noise does not.
    """
    words: list[str] = []
    for line in text.splitlines():
        line = line.replace("/*", " ").replace("*/", " ")
        stripped = line.lstrip()
        if stripped.startswith("//"):
            stripped = stripped[2:]
        elif stripped.startswith("*"):
            stripped = stripped[1:]
        words.extend(stripped.split())
    return " ".join(words)


def label_pair(old_comment: str, new_comment: str) -> int:
    """1 when the normalized comment texts differ, else 0."""
    return int(normalize_comment_text(old_comment) != normalize_comment_text(new_comment))


def _decl_context(tree: SyntaxTree, pair: CodeCommentPair) -> DeclContext:
    method = None
    if pair.enclosing_method_signature:
        for m in tree.methods:
            if m.signature == pair.enclosing_method_signature:
                method = m
                break
    if pair.enclosing_class:
        for cls in tree.classes:
            if cls.name == pair.enclosing_class:
                return DeclContext(method=method, fields=tuple(cls.fields))
    all_fields = tuple(f for cls in tree.classes for f in cls.fields)
    return DeclContext(method=method, fields=all_fields)


def _op_in_pair(op: ChangeOp, old_lines: set[int], new_lines: set[int]) -> bool:
    if op.old_span is not None and op.old_span[0] in old_lines:
        return True
    if op.new_span is not None and op.new_span[0] in new_lines:
        return True
    return False


def _scope_has_return(tree: SyntaxTree, lines: set[int]) -> bool:
    return any(
        stmt.kind == "return" and stmt.start_line in lines
        for stmt in tree.root.iter_statements()
    )


def extract_pair_changes(
    old_source: str,
    new_source: str,
    *,
    grammar: str = "curly",
    return_feature: str = "code",
) -> list[PairChange]:
    """All two-sided aligned pairs of one file change, fully annotated.

    Unchanged pairs come back too (empty ops, label 0); callers decide
    what to keep. return_feature picks how contains_return is read:
    "code" looks for a return statement in either side's scope, "tag"
    for an @return tag in the old comment.
    """
    if return_feature not in ("code", "tag"):
        raise ValueError(f"unknown return_feature: {return_feature!r}")
    old_tree = parse(old_source, grammar)
    new_tree = parse(new_source, grammar)
    old_pairs = extract_method_pairs(old_source, old_tree) + extract_block_pairs(
        old_source, old_tree
    )
    new_pairs = extract_method_pairs(new_source, new_tree) + extract_block_pairs(
        new_source, new_tree
    )
    aligned = align_pairs(old_pairs, new_pairs)
    all_ops = diff(old_tree, new_tree)

    out: list[PairChange] = []
    for ap in aligned:
        if ap.old is None or ap.new is None:
            continue
        old_lines = {ln for ln, _ in ap.old.code_lines}
        new_lines = {ln for ln, _ in ap.new.code_lines}
        ops = [op for op in all_ops if _op_in_pair(op, old_lines, new_lines)]
        old_ctx = _decl_context(old_tree, ap.old)
        new_ctx = _decl_context(new_tree, ap.new)
        s_smt, s_smt_new = changed_statement_tokens(ops)
        if return_feature == "code":
            has_return = _scope_has_return(old_tree, old_lines) or _scope_has_return(
                new_tree, new_lines
            )
        else:
            has_return = "@return" in ap.old.comment_text
        out.append(
            PairChange(
                old_pair=ap.old,
                new_pair=ap.new,
                ops=ops,
                decl=decl_changes(old_ctx, new_ctx, ops),
                refactorings=detect_refactorings(ops, old_tree, new_tree, old_ctx, new_ctx),
                label=label_pair(ap.old.comment_text, ap.new.comment_text),
                s_cmt=normalize(ap.old.comment_text, "comment"),
                s_code=normalize(ap.old.code_text(), "code"),
                s_code_new=normalize(ap.new.code_text(), "code"),
                s_smt=s_smt,
                s_smt_new=s_smt_new,
                has_return=has_return,
            )
        )
    return out


def mine_repository(
    repo_path: str,
    file_extension_filter: Sequence[str],
    *,
    project: str | None = None,
    include_comment_only: bool = True,
    grammar: str = "curly",
    return_feature: str = "code",
    stats: ScanStats | None = None,
) -> list[DatasetRecord]:
    """Scan a repository and collect every changed code-comment pair.

    A pair is kept when its code changed; pairs whose comment changed
    without any code change are kept only under include_comment_only.
    Pairs untouched on both sides never enter the dataset. Files that
    fail to parse on either side are counted and skipped.
    """
    if project is None:
        project = os.path.basename(os.path.abspath(repo_path))
    records: list[DatasetRecord] = []
    for commit in scan_history(repo_path, file_extension_filter, stats):
        for path, old_src, new_src in commit.changed_files:
            if old_src is None or new_src is None:
                continue
            try:
                changes = extract_pair_changes(
                    old_src, new_src, grammar=grammar, return_feature=return_feature
                )
            except ParseError:
                if stats:
                    stats.parse_failures += 1
                continue
            for pc in changes:
                if not pc.ops and pc.label == 0:
                    continue
                if not pc.ops and not include_comment_only:
                    continue
                records.append(
                    DatasetRecord(
                        pair_change=pc,
                        project=project,
                        commit_id=commit.commit_id,
                        label=pc.label,
                    )
                )
    return records


def _pair_to_dict(pair: CodeCommentPair) -> dict:
    return {
        "kind": pair.kind,
        "comment_text": pair.comment_text,
        "comment_span": list(pair.comment_span),
        "code_lines": [[ln, text] for ln, text in pair.code_lines],
        "method": pair.enclosing_method_signature,
        "class": pair.enclosing_class,
    }


def _pair_from_dict(d: dict) -> CodeCommentPair:
    return CodeCommentPair(
        d["kind"],
        d["comment_text"],
        (d["comment_span"][0], d["comment_span"][1]),
        [(ln, text) for ln, text in d["code_lines"]],
        d["method"],
        d["class"],
    )


def _op_from_dict(d: dict) -> ChangeOp:
    def span(key: str) -> tuple[int, int] | None:
        value = d.get(key)
        return (value[0], value[1]) if value else None

    return ChangeOp(
        action=d["action"],
        kind=d["kind"],
        old_text=d.get("old_text"),
        new_text=d.get("new_text"),
        old_span=span("old_span"),
        new_span=span("new_span"),
    )


def record_to_dict(record: DatasetRecord) -> dict:
    pc = record.pair_change
    return {
        "project": record.project,
        "commit_id": record.commit_id,
        "label": record.label,
        "old_pair": _pair_to_dict(pc.old_pair),
        "new_pair": _pair_to_dict(pc.new_pair),
        "ops": [op.to_dict() for op in pc.ops],
        "decl": dataclasses.asdict(pc.decl),
        "refactorings": dataclasses.asdict(pc.refactorings),
        "s_cmt": list(pc.s_cmt),
        "s_code": list(pc.s_code),
        "s_code_new": list(pc.s_code_new),
        "s_smt": list(pc.s_smt),
        "s_smt_new": list(pc.s_smt_new),
        "has_return": pc.has_return,
    }


def record_from_dict(d: dict) -> DatasetRecord:
    pc = PairChange(
        old_pair=_pair_from_dict(d["old_pair"]),
        new_pair=_pair_from_dict(d["new_pair"]),
        ops=[_op_from_dict(op) for op in d["ops"]],
        decl=DeclChange(**d["decl"]),
        refactorings=RefactoringFlags(**d["refactorings"]),
        label=d["label"],
        s_cmt=tuple(d["s_cmt"]),
        s_code=tuple(d["s_code"]),
        s_code_new=tuple(d["s_code_new"]),
        s_smt=tuple(d["s_smt"]),
        s_smt_new=tuple(d["s_smt_new"]),
        has_return=d["has_return"],
    )
    return DatasetRecord(
        pair_change=pc,
        project=d["project"],
        commit_id=d["commit_id"],
        label=d["label"],
    )


def persist_dataset(records: list[DatasetRecord], path: str) -> None:
    """Write records as JSON Lines; one self-describing object per line."""
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record_to_dict(record), sort_keys=True, separators=(",", ":")))
            fh.write("\n")


def load_dataset(path: str) -> list[DatasetRecord]:
    """Read records written by persist_dataset; bad lines name their number."""
    records: list[DatasetRecord] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                records.append(record_from_dict(json.loads(line)))
            except (json.JSONDecodeError, KeyError, TypeError, IndexError) as exc:
                raise ValueError(f"{path}: malformed record on line {lineno}") from exc
    return records
