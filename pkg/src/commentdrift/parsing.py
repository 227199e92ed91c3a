"""A pragmatic parser for curly-brace source (Java-flavored).

This is not a compiler front end. It recognizes exactly the structure the
rest of the pipeline needs: comments with their position and nesting, class
and method declarations with signatures and fields, and a statement tree with
a small fixed kind taxonomy. Anything it cannot name becomes kind "other"
rather than an error; only unbalanced braces abort a parse.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class ParseError(Exception):
    """Raised when the source cannot be bracketed; carries the line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


# Statement kinds the change distiller works over.
STATEMENT_KINDS = frozenset(
    {
        "if",
        "else_if",
        "for",
        "while",
        "catch",
        "try",
        "throw",
        "method_invocation",
        "variable_declaration",
        "assignment",
        "return",
        "other",
    }
)

# Structural kinds form the scaffolding; they are never counted as statements.
STRUCTURAL_KINDS = frozenset({"root", "class", "method", "else", "finally"})

_CONTROL_KEYWORDS = {"if", "else", "for", "while", "do", "switch", "try", "catch", "finally", "synchronized"}
_MODIFIERS = {
    "public",
    "private",
    "protected",
    "static",
    "final",
    "abstract",
    "synchronized",
    "native",
    "transient",
    "volatile",
    "strictfp",
    "default",
}
_TYPE_KEYWORDS = {"class", "interface", "enum"}
_NOT_A_NAME = _CONTROL_KEYWORDS | _TYPE_KEYWORDS | {"return", "throw", "new", "break", "continue", "assert", "case"}

_MULTI_OPS = (
    ">>>=",
    "<<=",
    ">>=",
    ">>>",
    "...",
    "==",
    "!=",
    "<=",
    ">=",
    "&&",
    "||",
    "++",
    "--",
    "+=",
    "-=",
    "*=",
    "/=",
    "%=",
    "&=",
    "|=",
    "^=",
    "<<",
    ">>",
    "->",
    "::",
)
_ASSIGN_OPS = {"=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=", ">>>="}


@dataclass
class Token:
    text: str
    line: int
    kind: str  # word | number | string | op


@dataclass
class CommentSpan:
    text: str
    start_line: int
    end_line: int
    trailing: bool  # code precedes the comment on its first line
    owner: "Node | None" = None

    @property
    def line_count(self) -> int:
        return self.end_line - self.start_line + 1


@dataclass
class Node:
    kind: str
    text: str
    start_line: int
    end_line: int
    depth: int
    children: list["Node"] = field(default_factory=list)
    body_open_line: int | None = None
    body_close_line: int | None = None

    def is_statement(self) -> bool:
        return self.kind in STATEMENT_KINDS

    def iter_statements(self):
        """Pre-order walk over statement nodes in this subtree."""
        for child in self.children:
            if child.is_statement():
                yield child
            yield from child.iter_statements()

    def statement_count(self) -> int:
        return sum(1 for _ in self.iter_statements())


@dataclass
class FieldDecl:
    visibility: str  # public | protected | private | package
    type_text: str
    name: str
    decl_text: str
    line: int


@dataclass
class MethodDecl:
    name: str
    return_type: str
    params: tuple[tuple[str, str], ...]  # (type text, parameter name)
    class_name: str
    node: Node
    header_line: int

    @property
    def signature(self) -> str:
        types = ", ".join(t for t, _ in self.params)
        return f"{self.name}({types})"

    def body_token_text(self) -> str:
        return " ".join(stmt.text for stmt in self.node.iter_statements())


@dataclass
class ClassDecl:
    name: str
    node: Node
    body_depth: int = 0
    fields: list[FieldDecl] = field(default_factory=list)


@dataclass
class SyntaxTree:
    root: Node
    comments: list[CommentSpan]
    methods: list[MethodDecl]
    classes: list[ClassDecl]
    source_lines: list[str]
    content_lines: frozenset[int]  # lines holding tokens beyond bare braces

    def statements(self):
        return list(self.root.iter_statements())


def tokenize(source: str) -> tuple[list[Token], list[CommentSpan], frozenset[int]]:
    """Split source into tokens and comments, tracking line numbers.

    Strings and character literals become single tokens; their content never
    leaks braces into the structure pass. Unterminated block comments run to
    end of file (lenient, mining must not die on sloppy files).
    """
    tokens: list[Token] = []
    comments: list[CommentSpan] = []
    content_lines: set[int] = set()
    i, line = 0, 1
    n = len(source)
    last_token_line = -1

    def add_token(text: str, ln: int, kind: str) -> None:
        nonlocal last_token_line
        tokens.append(Token(text, ln, kind))
        last_token_line = ln
        if text not in ("{", "}", ";"):
            content_lines.add(ln)

    while i < n:
        ch = source[i]
        if ch == "\n":
            line += 1
            i += 1
            continue
        if ch.isspace():
            i += 1
            continue
        nxt = source[i + 1] if i + 1 < n else ""
        if ch == "/" and nxt == "/":
            start = i
            while i < n and source[i] != "\n":
                i += 1
            comments.append(CommentSpan(source[start:i], line, line, trailing=last_token_line == line))
            continue
        if ch == "/" and nxt == "*":
            start, start_line = i, line
            i += 2
            while i < n and not (source[i] == "*" and i + 1 < n and source[i + 1] == "/"):
                if source[i] == "\n":
                    line += 1
                i += 1
            end = min(i + 2, n)
            comments.append(
                CommentSpan(source[start:end], start_line, line, trailing=last_token_line == start_line)
            )
            i = end
            continue
        if ch in "\"'":
            quote, start, start_line = ch, i, line
            i += 1
            while i < n and source[i] not in (quote, "\n"):
                i += 2 if source[i] == "\\" else 1
            if i < n and source[i] == quote:
                i += 1
            add_token(source[start:i], start_line, "string")
            continue
        if ch.isalpha() or ch in "_$":
            start = i
            while i < n and (source[i].isalnum() or source[i] in "_$"):
                i += 1
            add_token(source[start:i], line, "word")
            continue
        if ch.isdigit():
            start = i
            while i < n and (source[i].isalnum() or source[i] in "._"):
                i += 1
            add_token(source[start:i], line, "number")
            continue
        matched = False
        for op in _MULTI_OPS:
            if source.startswith(op, i):
                add_token(op, line, "op")
                i += len(op)
                matched = True
                break
        if not matched:
            add_token(ch, line, "op")
            i += 1
    return tokens, comments, frozenset(content_lines)


def _strip_annotations(tokens: list[Token]) -> list[Token]:
    out: list[Token] = []
    i = 0
    while i < len(tokens):
        if tokens[i].text == "@" and i + 1 < len(tokens) and tokens[i + 1].kind == "word":
            i += 2
            if i < len(tokens) and tokens[i].text == "(":
                depth = 0
                while i < len(tokens):
                    if tokens[i].text == "(":
                        depth += 1
                    elif tokens[i].text == ")":
                        depth -= 1
                        if depth == 0:
                            i += 1
                            break
                    i += 1
            continue
        out.append(tokens[i])
        i += 1
    return out


def _split_top_level(tokens: list[Token], sep: str) -> list[list[Token]]:
    groups: list[list[Token]] = [[]]
    depth = 0
    for tok in tokens:
        if tok.text in "([<":
            depth += 1
        elif tok.text in ")]>":
            depth -= 1
        if tok.text == sep and depth == 0:
            groups.append([])
        else:
            groups[-1].append(tok)
    return [g for g in groups if g]


def _looks_like_index_access(tokens: list[Token]) -> bool:
    for i, tok in enumerate(tokens):
        if tok.text == "[" and i + 1 < len(tokens) and tokens[i + 1].text != "]":
            return True
    return False


def classify_simple(tokens: list[Token]) -> str:
    """Statement kind for a run of tokens ending in ';'."""
    if not tokens:
        return "other"
    first = tokens[0].text
    if first == "return":
        return "return"
    if first == "throw":
        return "throw"
    if first in _CONTROL_KEYWORDS:
        return "other"
    if first in ("break", "continue", "package", "import", "assert", "case", "default", "goto"):
        return "other"

    assign_at = None
    depth = 0
    for i, tok in enumerate(tokens):
        if tok.text == "(":
            depth += 1
        elif tok.text == ")":
            depth -= 1
        elif depth == 0 and tok.text in _ASSIGN_OPS:
            assign_at = i
            break
    if assign_at is not None:
        pre = tokens[:assign_at]
        pre_words = [t for t in pre if t.kind == "word" and t.text not in _MODIFIERS]
        if any(t.text == "." for t in pre) or _looks_like_index_access(pre):
            return "assignment"
        return "variable_declaration" if len(pre_words) >= 2 else "assignment"
    if tokens[-1].text in ("++", "--") or first in ("++", "--"):
        return "assignment"

    if any(t.text == "(" for t in tokens):
        paren_at = next(i for i, t in enumerate(tokens) if t.text == "(")
        pre = tokens[:paren_at]
        pre_words = [t for t in pre if t.kind == "word" and t.text not in _MODIFIERS]
        if any(t.text == "." for t in pre) or len(pre_words) == 1 or first in ("this", "super", "new"):
            return "method_invocation"
        return "other"  # e.g. an abstract method signature

    plain_words = [t for t in tokens if t.kind == "word" and t.text not in _MODIFIERS]
    if len(plain_words) >= 2 and all(t.kind in ("word", "op") for t in tokens):
        return "variable_declaration"
    return "other"


def invocation_target(text: str) -> tuple[str, int] | None:
    """Name and argument count of the first call in a statement's text.

    Works over the space-joined token text stored on nodes and change ops.
    """
    tokens = text.split()
    for i, tok in enumerate(tokens):
        if tok == "(" and i > 0 and tokens[i - 1][:1].isalpha():
            name = tokens[i - 1]
            depth = 0
            args = 0
            saw_content = False
            for t in tokens[i:]:
                if t == "(":
                    depth += 1
                elif t == ")":
                    depth -= 1
                    if depth == 0:
                        break
                elif depth == 1 and t == ",":
                    args += 1
                elif depth >= 1:
                    saw_content = True
            if saw_content or args:
                args += 1
            return name, args
    return None


class _Parser:
    def __init__(self, tokens: list[Token], source_lines: list[str]):
        self.tokens = tokens
        self.i = 0
        self.source_lines = source_lines
        self.methods: list[MethodDecl] = []
        self.classes: list[ClassDecl] = []
        self.class_stack: list[ClassDecl] = []

    def _at_end(self) -> bool:
        return self.i >= len(self.tokens)

    def _peek(self) -> Token:
        return self.tokens[self.i]

    def _next(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def parse_root(self) -> Node:
        last_line = max(len(self.source_lines), 1)
        root = Node("root", "", 1, last_line, 0)
        root.body_open_line = 0
        root.body_close_line = last_line + 1
        while not self._at_end():
            if self._peek().text == "}":
                raise ParseError("stray '}'", self._peek().line)
            node = self.parse_statement(1)
            if node is not None:
                root.children.append(node)
        return root

    def parse_block(self, depth: int, open_line: int) -> list[Node]:
        nodes: list[Node] = []
        while True:
            if self._at_end():
                raise ParseError("unclosed '{'", open_line)
            if self._peek().text == "}":
                return nodes
            node = self.parse_statement(depth)
            if node is not None:
                nodes.append(node)

    def parse_statement(self, depth: int) -> Node | None:
        tok = self._peek()
        if tok.text == ";":
            self._next()
            return None
        if tok.text == "{":
            open_tok = self._next()
            children = self.parse_block(depth + 1, open_tok.line)
            close = self._next()
            node = Node("other", "{ }", open_tok.line, close.line, depth, children)
            node.body_open_line, node.body_close_line = open_tok.line, close.line
            return node

        header: list[Token] = []
        paren = 0
        while not self._at_end():
            t = self._peek()
            if t.text == "(":
                paren += 1
                header.append(self._next())
                continue
            if t.text == ")":
                paren -= 1
                header.append(self._next())
                if paren == 0 and self._control_header(header) and not self._at_end():
                    follow = self._peek().text
                    if follow not in ("{", ";", "else"):
                        child = self.parse_statement(depth + 1)
                        return self._make_container(header, [child] if child else [], depth, None, None)
                continue
            if t.text == ";" and paren == 0:
                end = self._next()
                return self._make_simple(header, depth, end.line)
            if t.text == "{":
                is_control = header[0].text in _CONTROL_KEYWORDS
                if paren > 0 or (not is_control and any(h.text in _ASSIGN_OPS for h in header)):
                    # array initializer, lambda body, or anonymous class: the
                    # braces belong to the expression, not the statement tree
                    self._consume_braces(header)
                    continue
                return self._parse_container_body(header, depth)
            if t.text == "}" and paren == 0:
                if header:  # statement missing its ';' right before a close
                    return self._make_simple(header, depth, header[-1].line)
                return None
            header.append(self._next())
            if header[0].text == "else" and len(header) == 2 and header[1].text != "if":
                self.i -= 1  # plain else with a single-statement body
                header.pop()
                child = self.parse_statement(depth + 1)
                return self._make_container(header, [child] if child else [], depth, None, None)
        if header:
            return self._make_simple(header, depth, header[-1].line)
        return None

    def _parse_container_body(self, header: list[Token], depth: int) -> Node:
        cls_decl = None
        if any(t.text in _TYPE_KEYWORDS for t in header):
            name = ""
            for i, t in enumerate(header):
                if t.text in _TYPE_KEYWORDS and i + 1 < len(header):
                    name = header[i + 1].text
                    break
            cls_decl = ClassDecl(name, None, body_depth=depth + 1)  # type: ignore[arg-type]
            self.class_stack.append(cls_decl)
        open_tok = self._next()
        try:
            children = self.parse_block(depth + 1, open_tok.line)
        finally:
            if cls_decl is not None:
                self.class_stack.pop()
        close = self._next()
        node = self._make_container(header, children, depth, open_tok.line, close.line)
        if cls_decl is not None:
            cls_decl.node = node
            self.classes.append(cls_decl)
        return node

    @staticmethod
    def _control_header(header: list[Token]) -> bool:
        if not header:
            return False
        first = header[0].text
        if first in ("if", "for", "while", "catch", "switch", "synchronized"):
            return True
        return first == "else" and len(header) > 1 and header[1].text == "if"

    def _consume_braces(self, header: list[Token]) -> None:
        depth = 0
        while not self._at_end():
            t = self._next()
            header.append(t)
            if t.text == "{":
                depth += 1
            elif t.text == "}":
                depth -= 1
                if depth == 0:
                    return

    def _make_simple(self, header: list[Token], depth: int, end_line: int) -> Node | None:
        if not header:
            return None
        kind = classify_simple(header)
        text = " ".join(t.text for t in header)
        node = Node(kind, text, header[0].line, end_line, depth)
        if (
            kind == "variable_declaration"
            and self.class_stack
            and depth == self.class_stack[-1].body_depth
        ):
            words = [t.text for t in header]
            self.class_stack[-1].fields.append(_field_from_words(words, node))
        return node

    def _make_container(
        self,
        header: list[Token],
        children: list[Node],
        depth: int,
        open_line: int | None,
        close_line: int | None,
    ) -> Node:
        stripped = _strip_annotations(header)
        text = " ".join(t.text for t in stripped) if stripped else "{ }"
        words = [t.text for t in stripped if t.kind == "word"]
        first = stripped[0].text if stripped else ""
        start_line = header[0].line if header else (open_line or 1)
        if close_line is not None:
            end_line = close_line
        else:
            end_line = children[-1].end_line if children else start_line

        kind = "other"
        is_method = False
        if any(w in _TYPE_KEYWORDS for w in words):
            kind = "class"
        elif first == "if":
            kind = "if"
        elif first == "else":
            kind = "else_if" if len(stripped) > 1 and stripped[1].text == "if" else "else"
        elif first == "for":
            kind = "for"
        elif first == "while":
            kind = "while"
        elif first == "try":
            kind = "try"
        elif first == "catch":
            kind = "catch"
        elif first == "finally":
            kind = "finally"
        elif first in ("do", "switch", "synchronized", "static"):
            kind = "other"
        elif self._looks_like_method(stripped):
            kind = "method"
            is_method = True

        node = Node(kind, text, start_line, end_line, depth, children)
        node.body_open_line, node.body_close_line = open_line, close_line

        if kind == "other" and first == "do" and not self._at_end() and self._peek().text == "while":
            tail = [self._next()]
            paren_depth = 0
            while not self._at_end():
                t = self._next()
                tail.append(t)
                if t.text == "(":
                    paren_depth += 1
                elif t.text == ")":
                    paren_depth -= 1
                elif t.text == ";" and paren_depth == 0:
                    break
            node.text += " " + " ".join(t.text for t in tail)
            node.end_line = tail[-1].line

        if is_method:
            self._record_method(stripped, node)
        return node

    @staticmethod
    def _looks_like_method(header: list[Token]) -> bool:
        if not header or header[0].text in _CONTROL_KEYWORDS:
            return False
        if any(t.text == "new" for t in header) or any(t.text in _ASSIGN_OPS for t in header):
            return False
        paren_at = next((i for i, t in enumerate(header) if t.text == "("), None)
        if paren_at is None or paren_at == 0:
            return False
        name_tok = header[paren_at - 1]
        return name_tok.kind == "word" and name_tok.text not in _NOT_A_NAME

    def _record_method(self, header: list[Token], node: Node) -> None:
        paren_at = next(i for i, t in enumerate(header) if t.text == "(")
        name = header[paren_at - 1].text
        depth_p = 0
        params_tokens: list[Token] = []
        for t in header[paren_at:]:
            if t.text == "(":
                depth_p += 1
                if depth_p == 1:
                    continue
            elif t.text == ")":
                depth_p -= 1
                if depth_p == 0:
                    break
            if depth_p >= 1:
                params_tokens.append(t)
        params: list[tuple[str, str]] = []
        for group in _split_top_level(params_tokens, ","):
            group = [t for t in group if t.text not in _MODIFIERS]
            if not group:
                continue
            pname = next((t.text for t in reversed(group) if t.kind == "word"), "")
            type_text = " ".join(t.text for t in group[:-1]) if len(group) > 1 else ""
            params.append((type_text, pname))
        ret_tokens = [
            t.text for t in header[: paren_at - 1] if t.text not in _MODIFIERS and t.text != "@"
        ]
        class_name = self.class_stack[-1].name if self.class_stack else ""
        ret = "" if (not ret_tokens and name == class_name) else " ".join(ret_tokens)
        self.methods.append(MethodDecl(name, ret, tuple(params), class_name, node, header[0].line))


def _field_from_words(words: list[str], node: Node) -> FieldDecl:
    visibility = "package"
    for w in words:
        if w in ("public", "private", "protected"):
            visibility = w
            break
    eq_at = words.index("=") if "=" in words else len(words)
    pre = [w for w in words[:eq_at] if w not in _MODIFIERS and w != ";"]
    name = next((w for w in reversed(pre) if w.isidentifier()), "")
    type_words: list[str] = []
    seen_name = False
    for w in reversed(pre):
        if not seen_name and w == name:
            seen_name = True
            continue
        type_words.append(w)
    type_words.reverse()
    return FieldDecl(visibility, " ".join(type_words), name, node.text, node.start_line)


def parse(source: str, grammar: str = "curly") -> SyntaxTree:
    """Parse source into a statement tree plus comment and declaration tables.

    Raises ParseError (with a line number) when braces do not balance;
    everything else degrades to kind "other" nodes.
    """
    if grammar != "curly":
        raise ValueError(f"unsupported grammar {grammar!r}")
    source_lines = source.splitlines()
    tokens, comments, content_lines = tokenize(source)
    parser = _Parser(tokens, source_lines)
    root = parser.parse_root()

    containers = _collect_containers(root)
    for comment in comments:
        comment.owner = _owning_container(containers, root, comment.start_line)
    return SyntaxTree(root, comments, parser.methods, parser.classes, source_lines, content_lines)


def _collect_containers(root: Node) -> list[Node]:
    out: list[Node] = []

    def walk(node: Node) -> None:
        if node.body_open_line is not None:
            out.append(node)
        for child in node.children:
            walk(child)

    walk(root)
    return out


def _owning_container(containers: list[Node], root: Node, line: int) -> Node:
    best = root
    for node in containers:
        if node is root or node.body_open_line is None or node.body_close_line is None:
            continue
        if node.body_open_line <= line <= node.body_close_line and (
            best is root
            or node.depth > best.depth
            or (node.depth == best.depth and node.body_open_line > (best.body_open_line or 0))
        ):
            best = node
    return best
