import numpy as np
import pytest
from hypothesis import given, strategies as st

from commentdrift.lexicon import (
    POS_CATEGORIES,
    STOP_WORDS,
    normalize,
    porter_stem,
    pos_distance,
    pos_distribution,
    split_identifier,
    tag_token,
)


@pytest.mark.parametrize(
    "name,parts",
    [
        ("setSernoOctetSize", ["set", "Serno", "Octet", "Size"]),
        ("HTTPServer", ["HTTP", "Server"]),
        ("parseXMLDocument", ["parse", "XML", "Document"]),
        ("value", ["value"]),
        ("max_size", ["max", "size"]),
        ("md5Hash", ["md", "5", "Hash"]),
        ("token2vec", ["token", "2", "vec"]),
        ("getX", ["get", "X"]),
        ("x2y", ["x", "2", "y"]),
    ],
)
def test_split_identifier(name, parts):
    assert split_identifier(name) == parts


@given(st.from_regex(r"[A-Za-z][A-Za-z0-9]{0,20}", fullmatch=True))
def test_split_identifier_preserves_characters(name):
    # splitting only inserts boundaries, it never drops or alters characters
    assert "".join(split_identifier(name)) == name


@pytest.mark.parametrize(
    "word,stem",
    [
        # classic reference pairs for each rule step
        ("caresses", "caress"),
        ("ponies", "poni"),
        ("ties", "ti"),
        ("cats", "cat"),
        ("feed", "feed"),
        ("agreed", "agre"),
        ("plastered", "plaster"),
        ("bled", "bled"),
        ("motoring", "motor"),
        ("sing", "sing"),
        ("hopping", "hop"),
        ("falling", "fall"),
        ("hissing", "hiss"),
        ("filing", "file"),
        ("happy", "happi"),
        ("sky", "sky"),
        ("relational", "relat"),
        ("conditional", "condit"),
        ("rational", "ration"),
        ("digitizer", "digit"),
        ("operator", "oper"),
        ("decisiveness", "decis"),
        ("hopefulness", "hope"),
        ("formative", "form"),
        ("formalize", "formal"),
        ("electrical", "electr"),
        ("goodness", "good"),
        ("revival", "reviv"),
        ("allowance", "allow"),
        ("inference", "infer"),
        ("adjustable", "adjust"),
        ("defensible", "defens"),
        ("replacement", "replac"),
        ("adjustment", "adjust"),
        ("dependent", "depend"),
        ("adoption", "adopt"),
        ("activate", "activ"),
        ("effective", "effect"),
        ("rate", "rate"),
        ("cease", "ceas"),
        ("controll", "control"),
        ("roll", "roll"),
        ("generate", "gener"),
        ("generates", "gener"),
        ("generating", "gener"),
        ("general", "gener"),
    ],
)
def test_porter_stem(word, stem):
    assert porter_stem(word) == stem


def test_porter_stem_short_words_untouched():
    for word in ("a", "is", "be", "on"):
        assert porter_stem(word) == word


def test_normalize_code_splits_humps():
    assert normalize("getUserName(id)", "code") == ("get", "user", "name", "id")


def test_normalize_code_repeats_and_stops():
    got = normalize("this.sernoFormatType = sernoFormatType;", "code")
    assert got == ("serno", "format", "type", "serno", "format", "type")


def test_normalize_comment_keeps_whole_words():
    got = normalize("// Returns the user name for the id.", "comment")
    assert got == ("return", "user", "name", "id")


def test_normalize_empty():
    assert normalize("", "code") == ()
    assert normalize("", "comment") == ()


def test_normalize_rejects_unknown_origin():
    with pytest.raises(ValueError):
        normalize("x", "prose")


def test_stop_words_spare_code_verbs():
    assert "the" in STOP_WORDS
    assert "set" not in STOP_WORDS
    assert "get" not in STOP_WORDS
    assert "return" not in STOP_WORDS


@given(st.lists(st.from_regex(r"[a-z]{1,8}", fullmatch=True), max_size=8))
def test_stop_words_never_contribute_tokens(words):
    # injecting stop words anywhere leaves the normalized output unchanged
    plain = " ".join(words)
    spiked = "the " + " of ".join(words) + " and" if words else "the and"
    for origin in ("code", "comment"):
        assert normalize(spiked, origin) == normalize(plain, origin)


def test_tag_token_categories():
    assert tag_token("42") == "numeral"
    assert tag_token("return") == "verb"
    assert tag_token("quickly") == "adverb"
    assert tag_token("valu") == "noun"
    assert tag_token("comput") == "verb"
    assert tag_token("xyzzy") == "noun"  # unknown alphabetic defaults to noun
    assert tag_token("a1b") == "other"


def test_pos_distribution_sums_to_one():
    dist = pos_distribution(("valu", "comput", "42"))
    assert dist.shape == (len(POS_CATEGORIES),)
    assert abs(float(dist.sum()) - 1.0) < 1e-12
    by_cat = dict(zip(POS_CATEGORIES, dist))
    assert by_cat["noun"] == pytest.approx(1 / 3)
    assert by_cat["verb"] == pytest.approx(1 / 3)
    assert by_cat["numeral"] == pytest.approx(1 / 3)


def test_pos_distribution_empty_is_zero():
    assert not pos_distribution(()).any()


def test_pos_distance_elementwise():
    a = pos_distribution(("valu",))
    b = pos_distribution(("comput",))
    d = pos_distance(a, b)
    assert np.allclose(d, np.abs(a - b))
    with pytest.raises(ValueError):
        pos_distance(a, np.zeros(3))
