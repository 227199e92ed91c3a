"""Refactoring detection over a change script and the old/new file trees.

Eight detectors: extract method, inline method, rename method, add parameter,
remove parameter, inline temp, encapsulate field, introduce assertion. All
are pure functions of the ordered ops plus the full-file trees, so a pair
whose change script is empty never flags anything.
"""

from __future__ import annotations

from dataclasses import dataclass

from .distill import ChangeOp, DeclChange, DeclContext, decl_changes
from .parsing import MethodDecl, SyntaxTree, invocation_target

_ASSIGN_OPS = {"=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=", ">>>="}


@dataclass
class RefactoringFlags:
    extract_method: bool = False
    inline_method: bool = False
    rename_method: bool = False
    add_parameter: bool = False
    remove_parameter: bool = False
    inline_temp: bool = False
    encapsulate_field: bool = False
    introduce_assertion: bool = False

    def as_tuple(self) -> tuple[bool, ...]:
        return (
            self.extract_method,
            self.inline_method,
            self.rename_method,
            self.add_parameter,
            self.remove_parameter,
            self.inline_temp,
            self.encapsulate_field,
            self.introduce_assertion,
        )


def _find_method(tree: SyntaxTree, name: str, param_count: int) -> MethodDecl | None:
    for m in tree.methods:
        if m.name == name and len(m.params) == param_count:
            return m
    return None


def _any_tail_matches(texts: list[str], body: str) -> bool:
    return any(" ".join(texts[start:]) == body for start in range(len(texts)))


def _any_head_matches(texts: list[str], body: str) -> bool:
    return any(" ".join(texts[:end]) == body for end in range(len(texts), 0, -1))


def detect_extract_method(ops: list[ChangeOp], old_tree: SyntaxTree, new_tree: SyntaxTree) -> bool:
    """A deleted statement run replaced by a call to a new method with that body.

    The run is the maximal block of consecutive deletes directly before the
    added invocation; any contiguous tail of it may constitute the extracted
    fragment, so tails are tried longest-first.
    """
    for at, op in enumerate(ops):
        if op.action != "add" or op.kind != "method_invocation" or not op.new_text:
            continue
        target = invocation_target(op.new_text)
        if target is None:
            continue
        method = _find_method(new_tree, target[0], target[1])
        if method is None:
            continue
        body = method.body_token_text()
        if not body:
            continue
        before: list[str] = []
        j = at - 1
        while j >= 0 and ops[j].action == "delete":
            before.insert(0, ops[j].old_text or "")
            j -= 1
        after: list[str] = []
        j = at + 1
        while j < len(ops) and ops[j].action == "delete":
            after.append(ops[j].old_text or "")
            j += 1
        if _any_tail_matches(before, body) or _any_head_matches(after, body):
            return True
    return False


def detect_inline_method(ops: list[ChangeOp], old_tree: SyntaxTree, new_tree: SyntaxTree) -> bool:
    """Mirror of extract method: a call deleted, its body statements added."""
    for at, op in enumerate(ops):
        if op.action != "delete" or op.kind != "method_invocation" or not op.old_text:
            continue
        target = invocation_target(op.old_text)
        if target is None:
            continue
        method = _find_method(old_tree, target[0], target[1])
        if method is None:
            continue
        body = method.body_token_text()
        if not body:
            continue
        after: list[str] = []
        j = at + 1
        while j < len(ops) and ops[j].action == "add":
            after.append(ops[j].new_text or "")
            j += 1
        before: list[str] = []
        j = at - 1
        while j >= 0 and ops[j].action == "add":
            before.insert(0, ops[j].new_text or "")
            j -= 1
        if _any_head_matches(after, body) or _any_tail_matches(before, body):
            return True
    return False


def _assignment_parts(text: str) -> tuple[str, list[str]] | None:
    """Entity and expression tokens of `... e = expr`, top-level '=' only."""
    tokens = text.split()
    depth = 0
    for i, tok in enumerate(tokens):
        if tok in "([":
            depth += 1
        elif tok in ")]":
            depth -= 1
        elif depth == 0 and tok in _ASSIGN_OPS and tok == "=":
            if i >= 1 and i + 1 < len(tokens):
                return tokens[i - 1], tokens[i + 1 :]
            return None
    return None


def detect_inline_temp(ops: list[ChangeOp]) -> bool:
    """A temp's defining assignment deleted, later uses replaced by its value."""
    for i, op in enumerate(ops):
        if op.action != "delete" or op.kind not in ("assignment", "variable_declaration"):
            continue
        parts = _assignment_parts(op.old_text or "")
        if parts is None:
            continue
        entity, expr = parts
        for later in ops[i:]:
            if later.action != "update" or not later.old_text or not later.new_text:
                continue
            old_tokens = later.old_text.split()
            if entity not in old_tokens:
                continue
            substituted: list[str] = []
            for tok in old_tokens:
                substituted.extend(expr if tok == entity else [tok])
            if substituted == later.new_text.split():
                return True
    return False


def _accessors_added(field_name: str, old_tree: SyntaxTree, new_tree: SyntaxTree) -> bool:
    suffix = field_name[:1].upper() + field_name[1:]
    old_names = {m.name for m in old_tree.methods}
    new_names = {m.name for m in new_tree.methods}
    getter, setter = f"get{suffix}", f"set{suffix}"
    return getter in new_names and setter in new_names and (
        getter not in old_names or setter not in old_names
    )


def detect_simple_refactorings(
    ops: list[ChangeOp],
    old_tree: SyntaxTree,
    new_tree: SyntaxTree,
    decl: DeclChange,
    old_method: MethodDecl | None = None,
    new_method: MethodDecl | None = None,
) -> RefactoringFlags:
    """The five detectors that reduce to declaration and op-list checks."""
    flags = RefactoringFlags()
    if not ops:
        return flags

    if old_method is not None and new_method is not None:
        same_body_size = old_method.node.statement_count() == new_method.node.statement_count()
        flags.rename_method = (
            decl.method_name_changed and not decl.parameters_changed and same_body_size
        )
        if not decl.method_name_changed:
            flags.add_parameter = len(new_method.params) > len(old_method.params)
            flags.remove_parameter = len(new_method.params) < len(old_method.params)

    old_fields = {f.name: f for c in old_tree.classes for f in c.fields}
    new_fields = {f.name: f for c in new_tree.classes for f in c.fields}
    for name, old_field in old_fields.items():
        new_field = new_fields.get(name)
        if (
            new_field is not None
            and old_field.visibility == "public"
            and new_field.visibility == "private"
            and _accessors_added(name, old_tree, new_tree)
        ):
            flags.encapsulate_field = True
            break

    flags.introduce_assertion = any(
        op.action == "add" and op.new_text and op.new_text.split()[0] == "assert" for op in ops
    )
    return flags


def detect_refactorings(
    ops: list[ChangeOp],
    old_tree: SyntaxTree,
    new_tree: SyntaxTree,
    old_ctx: DeclContext,
    new_ctx: DeclContext,
) -> RefactoringFlags:
    """Run every detector for one aligned pair's change script."""
    decl = decl_changes(old_ctx, new_ctx, ops)
    flags = detect_simple_refactorings(
        ops, old_tree, new_tree, decl, old_ctx.method, new_ctx.method
    )
    if ops:
        flags.extract_method = detect_extract_method(ops, old_tree, new_tree)
        flags.inline_method = detect_inline_method(ops, old_tree, new_tree)
        flags.inline_temp = detect_inline_temp(ops)
    return flags
