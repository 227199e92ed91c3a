from commentdrift.linker import align_pairs, extract_block_pairs, extract_method_pairs
from commentdrift.parsing import parse

TWO_BLOCKS = """public class SernoGenerator {
    /** Sets the format type. */
    public void setSernoFormatType(String sernoFormatType) {
        //Default serno size 8 bytes(64bits)
        this.sernoFormatType = sernoFormatType;
        if (sernoFormatType == at_esn) {
            //Set serno size 4 bytes(32 bits)
            setSernoOctetSize(4);
        }
    }
}
"""


def test_two_block_pairs_and_scopes():
    tree = parse(TWO_BLOCKS)
    pairs = extract_block_pairs(TWO_BLOCKS, tree)
    assert len(pairs) == 2

    first, second = pairs
    assert first.comment_text == "//Default serno size 8 bytes(64bits)"
    assert first.comment_span == (4, 4)
    assert [ln for ln, _ in first.code_lines] == [5, 6]
    assert first.enclosing_method_signature == "setSernoFormatType(String)"
    assert first.enclosing_class == "SernoGenerator"

    assert second.comment_text == "//Set serno size 4 bytes(32 bits)"
    assert second.comment_span == (7, 7)
    assert [ln for ln, _ in second.code_lines] == [8]


def test_scopes_never_overlap():
    tree = parse(TWO_BLOCKS)
    pairs = extract_block_pairs(TWO_BLOCKS, tree)
    seen = set()
    for p in pairs:
        lines = {ln for ln, _ in p.code_lines}
        assert not lines & seen
        seen |= lines


def test_method_pair_includes_signature_line():
    tree = parse(TWO_BLOCKS)
    (pair,) = extract_method_pairs(TWO_BLOCKS, tree)
    assert pair.kind == "method"
    assert pair.comment_text == "/** Sets the format type. */"
    # signature line plus body content; interior comment lines stay out
    assert [ln for ln, _ in pair.code_lines] == [3, 5, 6, 8]
    assert pair.code_lines[0][1].lstrip().startswith("public void setSernoFormatType")


def test_adjacent_comment_lines_merge():
    source = """class A {
    void run() {
        // first part
        // still first part
        a();
        b();
        c();
        // second part
        d();
        e();
    }
}
"""
    tree = parse(source)
    pairs = extract_block_pairs(source, tree)
    assert [(p.comment_text, [ln for ln, _ in p.code_lines]) for p in pairs] == [
        ("// first part\n// still first part", [5, 6, 7]),
        ("// second part", [9, 10]),
    ]


def test_next_comment_terminates_scope():
    # covered by the merge fixture: the first scope stops at line 7
    source = """class A {
    void run() {
        // one
        a();
        // two
        b();
    }
}
"""
    tree = parse(source)
    pairs = extract_block_pairs(source, tree)
    assert [[ln for ln, _ in p.code_lines] for p in pairs] == [[4], [6]]


def test_sub_block_comment_does_not_cut_outer_scope():
    source = """class A {
    void f() {
        // outer scope comment
        a();
        if (cond) {
            // inner comment
            b();
        }
        c();
    }
}
"""
    tree = parse(source)
    pairs = extract_block_pairs(source, tree)
    by_comment = {p.comment_text: [ln for ln, _ in p.code_lines] for p in pairs}
    assert by_comment == {
        "// outer scope comment": [4, 5, 9],
        "// inner comment": [7],
    }


def test_trailing_comment_never_anchors():
    source = """class A {
    void f() {
        x(); // trailing note should not anchor
        // real comment
        y();
    }
}
"""
    tree = parse(source)
    pairs = extract_block_pairs(source, tree)
    assert len(pairs) == 1
    assert pairs[0].comment_text == "// real comment"


def test_undocumented_method_skipped():
    source = "class A {\n    void f() { x = 1; }\n}\n"
    assert extract_method_pairs(source, parse(source)) == []


def test_empty_body_method_still_pairs():
    source = "class A {\n    /** doc */\n    void f() {}\n}\n"
    (pair,) = extract_method_pairs(source, parse(source))
    assert [ln for ln, _ in pair.code_lines] == [3]


def _pairs(source):
    tree = parse(source)
    return extract_method_pairs(source, tree) + extract_block_pairs(source, tree)


def test_align_signature_tier():
    old = _pairs("class A {\n    /** doc */\n    void f(int a) { x = 1; }\n}\n")
    new = _pairs("class A {\n    /** doc new */\n    void f(int a) { x = 2; }\n}\n")
    (ap,) = align_pairs(old, new)
    assert ap.old is not None and ap.new is not None
    assert ap.match_score == 1.0


def test_align_name_tier():
    old = _pairs("class A {\n    /** doc */\n    void f(int a) { x = 1; }\n}\n")
    new = _pairs("class A {\n    /** doc */\n    void f(int a, int b) { x = 1; }\n}\n")
    (ap,) = align_pairs(old, new)
    assert ap.old is not None and ap.new is not None
    assert ap.match_score == 0.8


def test_align_body_tier_on_rename():
    old_src = """class A {
    /** doc f */
    void f(int a) { x = 1; y = 2; }
}
"""
    new_src = """class A {
    /** doc f */
    void fRenamed(int a) { x = 1; y = 2; }
}
"""
    (ap,) = align_pairs(_pairs(old_src), _pairs(new_src))
    assert ap.old is not None and ap.new is not None
    # 10 shared bigrams of 12 per side over whitespace tokens
    assert ap.match_score == 2 * 10 / 24


def test_align_block_by_comment_dice():
    old_src = """class A {
    void g() {
        // tune the widget
        w.tune();
    }
}
"""
    new_src = """class A {
    void g() {
        // tune the widget more
        w.tune();
        w.retune();
    }
}
"""
    got = align_pairs(_pairs(old_src), _pairs(new_src))
    (ap,) = got
    assert ap.old.kind == "block"
    assert ap.match_score == 2 * 4 / 11  # bigram overlap of the comment texts


def test_align_unmatched_is_one_sided():
    old = _pairs("class A {\n    /** doc */\n    void f(int a) { x = 1; }\n}\n")
    got = align_pairs(old, [])
    assert [(a.old is not None, a.new is not None, a.match_score) for a in got] == [
        (True, False, 0.0)
    ]
    got = align_pairs([], old)
    assert [(a.old is not None, a.new is not None, a.match_score) for a in got] == [
        (False, True, 0.0)
    ]


def test_align_identity_all_ones():
    pairs = _pairs(TWO_BLOCKS)
    got = align_pairs(pairs, pairs)
    assert all(ap.match_score == 1.0 for ap in got)
    assert len(got) == len(pairs)


def test_dissimilar_methods_stay_unaligned():
    old = _pairs("class A {\n    /** a */\n    void f() { alpha(); beta(); }\n}\n")
    new = _pairs("class A {\n    /** b */\n    int qq(long z) { return z; }\n}\n")
    got = align_pairs(old, new)
    assert all(ap.old is None or ap.new is None for ap in got)
    assert len(got) == 2
