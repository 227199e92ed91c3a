"""Code-comment pair extraction and cross-revision alignment.

Method-type pairs couple a header comment with the full method body (interior
comments removed). Block-type pairs follow three heuristic rules: adjacent
comments merge into one; the scope starts at the first code line after the
comment; the scope ends at the last code line before the next comment in the
same block (comments in sub-blocks do not cut the scope short) or at the end
of the block or method. Lines claimed by a nested block pair are carved out
of any enclosing pair's scope so no two scopes overlap.
"""

from __future__ import annotations

from dataclasses import dataclass

from .distill import token_bigram_dice
from .parsing import Node, SyntaxTree

METHOD_ALIGN_THRESHOLD = 0.6
BLOCK_ALIGN_THRESHOLD = 0.5
_NAME_TIER_SCORE = 0.8


@dataclass
class CodeCommentPair:
    kind: str  # method | block
    comment_text: str
    comment_span: tuple[int, int]
    code_lines: list[tuple[int, str]]
    enclosing_method_signature: str | None = None
    enclosing_class: str | None = None

    def code_text(self) -> str:
        return "\n".join(text for _, text in self.code_lines)


@dataclass
class AlignedPair:
    old: CodeCommentPair | None
    new: CodeCommentPair | None
    match_score: float = 0.0


@dataclass
class _Run:
    """A merged run of adjacent comments sharing one owner block."""

    text: str
    start_line: int
    end_line: int
    owner: Node


def _merge_comment_runs(tree: SyntaxTree) -> list[_Run]:
    runs: list[_Run] = []
    for comment in sorted(tree.comments, key=lambda c: c.start_line):
        if comment.trailing:
            continue
        if runs:
            prev = runs[-1]
            if comment.owner is prev.owner and comment.start_line == prev.end_line + 1:
                prev.text += "\n" + comment.text
                prev.end_line = comment.end_line
                continue
        runs.append(_Run(comment.text, comment.start_line, comment.end_line, comment.owner))
    return runs


def _first_content_line(tree: SyntaxTree, after: int, limit: int) -> int | None:
    candidates = [ln for ln in tree.content_lines if after < ln <= limit]
    return min(candidates) if candidates else None


def _method_of(owner: Node, tree: SyntaxTree):
    """Deepest method declaration whose body contains the owner block."""
    best = None
    for m in tree.methods:
        node = m.node
        if node is owner or (
            node.body_open_line is not None
            and node.body_close_line is not None
            and owner.body_open_line is not None
            and node.body_open_line <= owner.body_open_line
            and owner.body_open_line <= node.body_close_line
        ):
            if best is None or node.depth > best.node.depth:
                best = m
    return best


def _class_of(line: int, tree: SyntaxTree) -> str | None:
    best = None
    for cls in tree.classes:
        node = cls.node
        if node.start_line <= line <= node.end_line:
            if best is None or node.depth > best.node.depth:
                best = cls
    return best.name if best else None


def _strip_comment_text(line_no: int, text: str, tree: SyntaxTree) -> str:
    out = text
    for comment in tree.comments:
        if not (comment.start_line <= line_no <= comment.end_line):
            continue
        if comment.start_line == line_no:
            first = comment.text.splitlines()[0] if comment.text else ""
            at = out.find(first) if first else -1
            if at >= 0:
                out = out[:at]
        elif comment.end_line == line_no:
            closer = out.find("*/")
            out = out[closer + 2 :] if closer >= 0 else ""
        else:
            out = ""
    return out.rstrip()


def _line_text(tree: SyntaxTree, line_no: int) -> str:
    if 1 <= line_no <= len(tree.source_lines):
        return _strip_comment_text(line_no, tree.source_lines[line_no - 1], tree)
    return ""


def extract_method_pairs(source: str, tree: SyntaxTree) -> list[CodeCommentPair]:
    """One pair per method that carries a header comment."""
    runs = _merge_comment_runs(tree)
    header_of = {}
    for run in runs:
        nxt = _first_content_line(tree, run.end_line, len(tree.source_lines))
        if nxt is not None:
            header_of.setdefault(nxt, run)
    pairs: list[CodeCommentPair] = []
    for method in tree.methods:
        run = header_of.get(method.header_line)
        if run is None:
            continue
        node = method.node
        body_start = node.start_line
        body_end = node.body_close_line if node.body_close_line is not None else node.end_line
        code_lines = []
        for ln in range(body_start, body_end + 1):
            if ln not in tree.content_lines:
                continue
            text = _line_text(tree, ln)
            if text.strip():
                code_lines.append((ln, text))
        pairs.append(
            CodeCommentPair(
                "method",
                run.text,
                (run.start_line, run.end_line),
                code_lines,
                method.signature,
                _class_of(method.header_line, tree) or method.class_name or None,
            )
        )
    return pairs


def extract_block_pairs(source: str, tree: SyntaxTree) -> list[CodeCommentPair]:
    """Block pairs per the three scope rules; nested scopes claim lines first."""
    runs = _merge_comment_runs(tree)
    method_starts = {m.node.start_line for m in tree.methods}
    class_starts = {c.node.start_line for c in tree.classes}

    block_runs: list[_Run] = []
    for run in runs:
        if run.owner.kind == "root":
            continue
        nxt = _first_content_line(tree, run.end_line, len(tree.source_lines))
        if nxt is None or nxt in method_starts or nxt in class_starts:
            continue  # header comment, class doc, or nothing to describe
        block_runs.append(run)

    by_owner: dict[int, list[_Run]] = {}
    for run in block_runs:
        by_owner.setdefault(id(run.owner), []).append(run)

    claimed: set[int] = set()
    pairs: list[tuple[int, CodeCommentPair]] = []
    # deepest owners first so nested pairs claim their lines before outer ones
    for run in sorted(block_runs, key=lambda r: (-r.owner.depth, r.start_line)):
        owner = run.owner
        body_end = owner.body_close_line if owner.body_close_line is not None else owner.end_line
        limit = body_end
        for sibling in by_owner[id(owner)]:
            if sibling.start_line > run.end_line:
                limit = min(limit, sibling.start_line - 1)
                break
        start = _first_content_line(tree, run.end_line, limit)
        if start is None:
            continue  # scope-less comment at the end of its block
        code_lines = []
        for ln in range(start, limit + 1):
            if ln in claimed or ln not in tree.content_lines:
                continue
            text = _line_text(tree, ln)
            if text.strip():
                code_lines.append((ln, text))
        if not code_lines:
            continue
        claimed.update(ln for ln, _ in code_lines)
        method = _method_of(owner, tree)
        pairs.append(
            (
                run.start_line,
                CodeCommentPair(
                    "block",
                    run.text,
                    (run.start_line, run.end_line),
                    code_lines,
                    method.signature if method else None,
                    _class_of(run.start_line, tree),
                ),
            )
        )
    pairs.sort(key=lambda item: item[0])
    return [p for _, p in pairs]


def _comment_similarity(a: str, b: str) -> float:
    return token_bigram_dice(" ".join(a.split()), " ".join(b.split()))


def _method_body_similarity(a: CodeCommentPair, b: CodeCommentPair) -> float:
    return token_bigram_dice(
        " ".join(a.code_text().split()), " ".join(b.code_text().split())
    )


def _sig_name(signature: str | None) -> str:
    return signature.split("(", 1)[0] if signature else ""


def align_pairs(
    old_pairs: list[CodeCommentPair],
    new_pairs: list[CodeCommentPair],
    method_threshold: float = METHOD_ALIGN_THRESHOLD,
    block_threshold: float = BLOCK_ALIGN_THRESHOLD,
) -> list[AlignedPair]:
    """Greedy one-to-one alignment of pairs across a commit.

    Methods match by signature (score 1), then bare name (score 0.8), then
    body-token Dice at or above method_threshold. Blocks match inside the
    same enclosing method by comment-text Dice at or above block_threshold.
    """
    aligned: list[AlignedPair] = []
    used_old: set[int] = set()
    used_new: set[int] = set()

    old_methods = [(i, p) for i, p in enumerate(old_pairs) if p.kind == "method"]
    new_methods = [(j, p) for j, p in enumerate(new_pairs) if p.kind == "method"]
    candidates: list[tuple[int, float, int, int]] = []
    for i, po in old_methods:
        for j, pn in new_methods:
            if po.enclosing_method_signature == pn.enclosing_method_signature:
                candidates.append((0, 1.0, i, j))
            elif _sig_name(po.enclosing_method_signature) == _sig_name(pn.enclosing_method_signature):
                candidates.append((1, _NAME_TIER_SCORE, i, j))
            else:
                score = _method_body_similarity(po, pn)
                if score >= method_threshold:
                    candidates.append((2, score, i, j))
    candidates.sort(key=lambda c: (c[0], -c[1], c[2], c[3]))
    for _, score, i, j in candidates:
        if i in used_old or j in used_new:
            continue
        used_old.add(i)
        used_new.add(j)
        aligned.append(AlignedPair(old_pairs[i], new_pairs[j], score))

    old_blocks = [(i, p) for i, p in enumerate(old_pairs) if p.kind == "block"]
    new_blocks = [(j, p) for j, p in enumerate(new_pairs) if p.kind == "block"]
    block_candidates: list[tuple[float, int, int]] = []
    for i, po in old_blocks:
        for j, pn in new_blocks:
            if (po.enclosing_class, po.enclosing_method_signature) != (
                pn.enclosing_class,
                pn.enclosing_method_signature,
            ):
                continue
            score = _comment_similarity(po.comment_text, pn.comment_text)
            if score >= block_threshold:
                block_candidates.append((score, i, j))
    block_candidates.sort(key=lambda c: (-c[0], c[1], c[2]))
    for score, i, j in block_candidates:
        if i in used_old or j in used_new:
            continue
        used_old.add(i)
        used_new.add(j)
        aligned.append(AlignedPair(old_pairs[i], new_pairs[j], score))

    for i, p in enumerate(old_pairs):
        if i not in used_old:
            aligned.append(AlignedPair(p, None, 0.0))
    for j, p in enumerate(new_pairs):
        if j not in used_new:
            aligned.append(AlignedPair(None, p, 0.0))
    return aligned
