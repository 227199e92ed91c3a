import pytest

from commentdrift.parsing import ParseError, parse

SAMPLE = """public class Sample {
    private int counter = 0;
    protected String name;

    /** Doc for run. */
    public int run(int steps, String mode) {
        int total = 0;
        for (int i = 0; i < steps; i++) {
            total += step(i);
        }
        if (total > limit) {
            log.warn("high");
        } else if (total < 0) {
            total = 0;
        } else {
            log.info("ok");
        }
        while (pending()) {
            drain();
        }
        try {
            flush(total);
        } catch (IOException e) {
            throw new RuntimeException(e);
        } finally {
            close();
        }
        return total;
    }
}
"""


@pytest.fixture(scope="module")
def sample_tree():
    return parse(SAMPLE)


def test_statement_taxonomy(sample_tree):
    got = [(s.kind, s.start_line, s.end_line) for s in sample_tree.statements()]
    assert got == [
        ("variable_declaration", 2, 2),
        ("variable_declaration", 3, 3),
        ("variable_declaration", 7, 7),
        ("for", 8, 10),
        ("assignment", 9, 9),
        ("if", 11, 13),
        ("method_invocation", 12, 12),
        ("else_if", 13, 15),
        ("assignment", 14, 14),
        ("method_invocation", 16, 16),
        ("while", 18, 20),
        ("method_invocation", 19, 19),
        ("try", 21, 23),
        ("method_invocation", 22, 22),
        ("catch", 23, 25),
        ("throw", 24, 24),
        ("method_invocation", 26, 26),
        ("return", 28, 28),
    ]


def test_statement_text_is_token_join(sample_tree):
    texts = {s.kind: s.text for s in sample_tree.statements()}
    assert texts["for"] == "for ( int i = 0 ; i < steps ; i ++ )"
    assert texts["throw"] == "throw new RuntimeException ( e )"
    assert texts["return"] == "return total"


def test_method_declaration(sample_tree):
    (m,) = sample_tree.methods
    assert m.name == "run"
    assert m.return_type == "int"
    assert m.params == (("int", "steps"), ("String", "mode"))
    assert m.signature == "run(int, String)"
    assert m.header_line == 6
    assert m.class_name == "Sample"


def test_class_fields(sample_tree):
    (c,) = sample_tree.classes
    assert c.name == "Sample"
    fields = [(f.visibility, f.type_text, f.name, f.line) for f in c.fields]
    assert fields == [
        ("private", "int", "counter", 2),
        ("protected", "String", "name", 3),
    ]


def test_comment_span(sample_tree):
    (c,) = sample_tree.comments
    assert (c.start_line, c.end_line, c.trailing) == (5, 5, False)
    assert c.text == "/** Doc for run. */"


def test_trailing_comment_flagged():
    tree = parse('class A {\n    void f() {\n        x(); // note\n    }\n}\n')
    (c,) = tree.comments
    assert c.trailing is True
    assert c.text == "// note"


def test_content_lines_skip_bare_braces(sample_tree):
    cl = sample_tree.content_lines
    assert 10 not in cl  # closing brace of the for loop
    assert 4 not in cl  # blank line
    assert 5 not in cl  # comment-only line
    assert 13 in cl  # "} else if (...) {" carries tokens


def test_span_nesting(sample_tree):
    def walk(node):
        for child in node.children:
            assert node.start_line <= child.start_line
            assert child.end_line <= node.end_line
            walk(child)

    walk(sample_tree.root)


def test_unclosed_brace_raises_with_line():
    with pytest.raises(ParseError) as err:
        parse("class A {\n  void f() {\n}\n")
    assert err.value.line == 1
    assert "unclosed" in str(err.value)


def test_stray_brace_raises():
    with pytest.raises(ParseError) as err:
        parse("class A { } }")
    assert "stray" in str(err.value)


def test_empty_source_parses():
    tree = parse("")
    assert tree.statements() == []
    assert tree.methods == []
