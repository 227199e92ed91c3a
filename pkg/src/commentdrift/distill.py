"""Statement-level change distilling between two parsed trees.

Statements are matched greedily within matched parents: exact same-kind text
matches first, then same-kind pairs by descending token-bigram Dice score
(threshold configurable, default 0.6). Unmatched old statements become
deletes, unmatched new ones adds, matched pairs with differing text updates.

Op order follows the old tree: deletes and updates sit at the old statement's
pre-order index; adds are anchored into the gap just before the next matched
sibling on the old side, which keeps a deleted run adjacent to the invocation
that replaced it (the extract-method detector depends on that adjacency).
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass

from .parsing import FieldDecl, MethodDecl, Node, SyntaxTree

DEFAULT_MATCH_THRESHOLD = 0.6


@dataclass
class ChangeOp:
    action: str  # add | delete | update
    kind: str
    old_text: str | None = None
    new_text: str | None = None
    old_span: tuple[int, int] | None = None
    new_span: tuple[int, int] | None = None

    def to_dict(self) -> dict:
        out: dict = {"action": self.action, "kind": self.kind}
        if self.old_text is not None:
            out["old_text"] = self.old_text
            out["old_span"] = list(self.old_span) if self.old_span else None
        if self.new_text is not None:
            out["new_text"] = self.new_text
            out["new_span"] = list(self.new_span) if self.new_span else None
        return out


@dataclass
class DeclContext:
    """Enclosing declarations for one side of a changed pair."""

    method: MethodDecl | None = None
    fields: tuple[FieldDecl, ...] = ()


@dataclass
class DeclChange:
    method_name_changed: bool = False
    return_type_changed: bool = False
    parameters_changed: bool = False
    class_attributes_changed: bool = False


def token_bigram_dice(a: str, b: str) -> float:
    """Dice coefficient over sentinel-padded token bigrams of two texts."""

    def bigrams(text: str) -> Counter:
        toks = ["^", *text.split(), "$"]
        return Counter(zip(toks, toks[1:]))

    ba, bb = bigrams(a), bigrams(b)
    inter = sum(min(ba[k], bb[k]) for k in ba.keys() & bb.keys())
    total = sum(ba.values()) + sum(bb.values())
    return 2.0 * inter / total if total else 1.0


def _span(node: Node) -> tuple[int, int]:
    return (node.start_line, node.end_line)


def _index_statements(root: Node) -> dict[int, int]:
    return {id(node): i for i, node in enumerate(root.iter_statements())}


def _subtree_statements(node: Node) -> list[Node]:
    out = [node] if node.is_statement() else []
    out.extend(node.iter_statements())
    return out


def _min_old_index(node: Node, idx: dict[int, int]) -> float | None:
    stmts = _subtree_statements(node)
    return min(idx[id(s)] for s in stmts) if stmts else None


def _max_old_index(node: Node, idx: dict[int, int]) -> float | None:
    stmts = _subtree_statements(node)
    return max(idx[id(s)] for s in stmts) if stmts else None


def diff(
    old: SyntaxTree, new: SyntaxTree, threshold: float = DEFAULT_MATCH_THRESHOLD
) -> list[ChangeOp]:
    """Compute the ordered change script between two trees."""
    idx_old = _index_statements(old.root)
    idx_new = _index_statements(new.root)
    keyed: list[tuple[tuple, ChangeOp]] = []
    _diff_children(old.root, new.root, threshold, idx_old, idx_new, -0.5, keyed)
    keyed.sort(key=lambda item: item[0])
    return [op for _, op in keyed]


def _match_children(
    old_children: list[Node], new_children: list[Node], threshold: float
) -> list[tuple[Node, Node]]:
    """Greedy pairing of sibling nodes: exact text first, then best Dice."""
    used_old: set[int] = set()
    used_new: set[int] = set()
    pairs: list[tuple[Node, Node]] = []
    for i, o in enumerate(old_children):
        for j, n in enumerate(new_children):
            if j in used_new:
                continue
            if n.kind == o.kind and n.text == o.text:
                pairs.append((o, n))
                used_old.add(i)
                used_new.add(j)
                break
    candidates: list[tuple[float, int, int]] = []
    for i, o in enumerate(old_children):
        if i in used_old:
            continue
        for j, n in enumerate(new_children):
            if j in used_new or n.kind != o.kind:
                continue
            score = token_bigram_dice(o.text, n.text)
            if score >= threshold:
                candidates.append((score, i, j))
    candidates.sort(key=lambda c: (-c[0], c[1], c[2]))
    for score, i, j in candidates:
        if i in used_old or j in used_new:
            continue
        used_old.add(i)
        used_new.add(j)
        pairs.append((old_children[i], new_children[j]))
    return pairs


def _diff_children(
    old_parent: Node,
    new_parent: Node,
    threshold: float,
    idx_old: dict[int, int],
    idx_new: dict[int, int],
    fallback_anchor: float,
    out: list[tuple[tuple, ChangeOp]],
) -> None:
    old_children = old_parent.children
    new_children = new_parent.children
    pairs = _match_children(old_children, new_children, threshold)
    partner_of_new = {id(n): o for o, n in pairs}
    matched_old = {id(o) for o, _ in pairs}

    region_end = _max_old_index(old_parent, idx_old)
    end_anchor = region_end + 0.5 if region_end is not None else fallback_anchor

    for o, n in pairs:
        if o.is_statement() and o.text != n.text:
            out.append(
                (
                    (float(idx_old[id(o)]), 0, idx_new[id(n)]),
                    ChangeOp("update", o.kind, o.text, n.text, _span(o), _span(n)),
                )
            )
        if o.children or n.children:
            if o.is_statement():
                child_fallback = idx_old[id(o)] + 0.5
            else:
                low = _min_old_index(o, idx_old)
                child_fallback = low - 0.5 if low is not None else fallback_anchor
            _diff_children(o, n, threshold, idx_old, idx_new, child_fallback, out)

    for o in old_children:
        if id(o) in matched_old:
            continue
        for stmt in _subtree_statements(o):
            i = idx_old[id(stmt)]
            out.append(
                ((float(i), 0, i), ChangeOp("delete", stmt.kind, stmt.text, None, _span(stmt), None))
            )

    for pos, n in enumerate(new_children):
        if id(n) in partner_of_new:
            continue
        anchor = None
        for later in new_children[pos + 1 :]:
            partner = partner_of_new.get(id(later))
            if partner is None:
                continue
            low = (
                float(idx_old[id(partner)])
                if partner.is_statement()
                else _min_old_index(partner, idx_old)
            )
            if low is not None:
                anchor = low - 0.5
                break
        if anchor is None:
            anchor = end_anchor
        for stmt in _subtree_statements(n):
            out.append(
                (
                    (anchor, 1, idx_new[id(stmt)]),
                    ChangeOp("add", stmt.kind, None, stmt.text, None, _span(stmt)),
                )
            )


def count_changes(ops: list[ChangeOp]) -> int:
    return len(ops)


def decl_changes(old: DeclContext, new: DeclContext, ops: list[ChangeOp]) -> DeclChange:
    """Token-level declaration comparison for a changed pair's context.

    class_attributes_changed requires both a field-declaration difference and
    a changed field's name appearing as a token in the change script.
    """
    change = DeclChange()
    if old.method is not None and new.method is not None:
        change.method_name_changed = old.method.name != new.method.name
        change.return_type_changed = old.method.return_type != new.method.return_type
        change.parameters_changed = old.method.params != new.method.params

    old_fields = {f.name: f.decl_text for f in old.fields}
    new_fields = {f.name: f.decl_text for f in new.fields}
    changed_names = {
        name
        for name in old_fields.keys() | new_fields.keys()
        if old_fields.get(name) != new_fields.get(name)
    }
    if changed_names:
        tokens: set[str] = set()
        for op in ops:
            for text in (op.old_text, op.new_text):
                if text:
                    tokens.update(text.split())
        change.class_attributes_changed = bool(changed_names & tokens)
    return change


def ops_to_jsonl(ops: list[ChangeOp]) -> str:
    """One compact JSON object per line; used for fixture authoring."""
    return "\n".join(json.dumps(op.to_dict(), sort_keys=True, separators=(",", ":")) for op in ops)
