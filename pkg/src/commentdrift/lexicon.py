"""Text normalization shared by every feature extractor.

Code and comments meet in one vocabulary: identifiers are split at case humps,
underscores, and digit boundaries, everything is lowercased, English stop words
are dropped, and the survivors are Porter-stemmed. Part-of-speech tagging runs
over the stemmed tokens against a small embedded lexicon, so lexicon keys are
stored in stemmed form.
"""

from __future__ import annotations

import re
from functools import lru_cache
from importlib import resources

import numpy as np

TokenSequence = tuple[str, ...]

# Fixed category order; every distribution vector indexes into this.
POS_CATEGORIES = (
    "noun",
    "verb",
    "adjective",
    "adverb",
    "pronoun",
    "preposition",
    "conjunction",
    "determiner",
    "numeral",
    "other",
)

# Embedded English stop list (~128 words). Deliberately excludes verbs that
# carry meaning in code ("set", "get", "return").
STOP_WORDS = frozenset(
    """
    a about above after again against all am an and any are as at be because
    been before being below between both but by can cannot could did do does
    doing down during each few for from further had has have having he her
    here hers herself him himself his how i if in into is it its itself just
    me more most my myself no nor not now of off on once only or other our
    ours ourselves out over own same she should so some such than that the
    their theirs them themselves then there these they this those through to
    too under until up very was we were what when where which while who whom
    why with would you your yours yourself yourselves
    """.split()
)

_HUMP_1 = re.compile(r"([A-Z]+)([A-Z][a-z])")
_HUMP_2 = re.compile(r"([a-z])([A-Z])")
_ALPHA_DIGIT = re.compile(r"([A-Za-z])([0-9])")
_DIGIT_ALPHA = re.compile(r"([0-9])([A-Za-z])")
_NON_ALNUM = re.compile(r"[^A-Za-z0-9]+")
_CODE_RUNS = re.compile(r"[A-Za-z0-9_]+")
_COMMENT_RUNS = re.compile(r"[A-Za-z0-9]+")


def split_identifier(name: str) -> list[str]:
    """Split an identifier at case humps, underscores, and digit boundaries.

    >>> split_identifier("setSernoOctetSize")
    ['set', 'Serno', 'Octet', 'Size']
    >>> split_identifier("foo_bar2baz")
    ['foo', 'bar', '2', 'baz']

    Concatenating the parts reproduces the identifier's alphanumeric content
    (case-insensitively); nothing but separators is dropped.
    """
    s = _HUMP_1.sub(r"\1 \2", name)
    s = _HUMP_2.sub(r"\1 \2", s)
    s = _ALPHA_DIGIT.sub(r"\1 \2", s)
    s = _DIGIT_ALPHA.sub(r"\1 \2", s)
    return [p for p in _NON_ALNUM.split(s) if p]


# ---------------------------------------------------------------------------
# Porter stemmer (original 1980 algorithm). Embedded so the pipeline has no
# external language-data dependency and stems never change under our feet.
# ---------------------------------------------------------------------------

_VOWELS = "aeiou"


def _is_consonant(word: str, i: int) -> bool:
    ch = word[i]
    if ch in _VOWELS:
        return False
    if ch == "y":
        return i == 0 or not _is_consonant(word, i - 1)
    return True


def _measure(stem: str) -> int:
    """Count vowel-consonant sequences: [C](VC)^m[V]."""
    m = 0
    prev_vowel = False
    for i in range(len(stem)):
        if _is_consonant(stem, i):
            if prev_vowel:
                m += 1
            prev_vowel = False
        else:
            prev_vowel = True
    return m


def _has_vowel(stem: str) -> bool:
    return any(not _is_consonant(stem, i) for i in range(len(stem)))


def _ends_double_consonant(stem: str) -> bool:
    return (
        len(stem) >= 2
        and stem[-1] == stem[-2]
        and _is_consonant(stem, len(stem) - 1)
    )


def _ends_cvc(stem: str) -> bool:
    if len(stem) < 3:
        return False
    if not (
        _is_consonant(stem, len(stem) - 3)
        and not _is_consonant(stem, len(stem) - 2)
        and _is_consonant(stem, len(stem) - 1)
    ):
        return False
    return stem[-1] not in "wxy"


def _apply_rules(word: str, rules) -> str:
    """Apply the longest-matching rule of a step.

    Only the longest matching suffix is considered; if its condition fails the
    step rewrites nothing (the reference implementation behaves the same way).
    """
    for suffix, replacement, condition in rules:
        if word.endswith(suffix):
            stem = word[: len(word) - len(suffix)]
            if condition is None or condition(stem):
                return stem + replacement
            return word
    return word


def porter_stem(word: str) -> str:
    w = word.lower()
    if len(w) <= 2 or not w.isalpha():
        return w

    # Step 1a
    w = _apply_rules(
        w,
        (
            ("sses", "ss", None),
            ("ies", "i", None),
            ("ss", "ss", None),
            ("s", "", None),
        ),
    )

    # Step 1b
    if w.endswith("eed"):
        stem = w[:-3]
        if _measure(stem) > 0:
            w = stem + "ee"
    else:
        stripped = None
        if w.endswith("ed") and _has_vowel(w[:-2]):
            stripped = w[:-2]
        elif w.endswith("ing") and _has_vowel(w[:-3]):
            stripped = w[:-3]
        if stripped is not None:
            w = stripped
            if w.endswith(("at", "bl", "iz")):
                w += "e"
            elif _ends_double_consonant(w) and w[-1] not in "lsz":
                w = w[:-1]
            elif _measure(w) == 1 and _ends_cvc(w):
                w += "e"

    # Step 1c
    if w.endswith("y") and _has_vowel(w[:-1]):
        w = w[:-1] + "i"

    m_pos = lambda stem: _measure(stem) > 0
    m_gt1 = lambda stem: _measure(stem) > 1

    # Step 2 (rules ordered longest suffix first)
    w = _apply_rules(
        w,
        (
            ("ational", "ate", m_pos),
            ("ization", "ize", m_pos),
            ("iveness", "ive", m_pos),
            ("fulness", "ful", m_pos),
            ("ousness", "ous", m_pos),
            ("tional", "tion", m_pos),
            ("biliti", "ble", m_pos),
            ("aliti", "al", m_pos),
            ("iviti", "ive", m_pos),
            ("ation", "ate", m_pos),
            ("alism", "al", m_pos),
            ("entli", "ent", m_pos),
            ("ousli", "ous", m_pos),
            ("enci", "ence", m_pos),
            ("anci", "ance", m_pos),
            ("izer", "ize", m_pos),
            ("abli", "able", m_pos),
            ("alli", "al", m_pos),
            ("ator", "ate", m_pos),
            ("eli", "e", m_pos),
        ),
    )

    # Step 3
    w = _apply_rules(
        w,
        (
            ("icate", "ic", m_pos),
            ("ative", "", m_pos),
            ("alize", "al", m_pos),
            ("iciti", "ic", m_pos),
            ("ical", "ic", m_pos),
            ("ful", "", m_pos),
            ("ness", "", m_pos),
        ),
    )

    # Step 4
    ion_cond = lambda stem: _measure(stem) > 1 and stem[-1:] in ("s", "t")
    w = _apply_rules(
        w,
        (
            ("ement", "", m_gt1),
            ("ance", "", m_gt1),
            ("ence", "", m_gt1),
            ("able", "", m_gt1),
            ("ible", "", m_gt1),
            ("ment", "", m_gt1),
            ("ant", "", m_gt1),
            ("ent", "", m_gt1),
            ("ion", "", ion_cond),
            ("ism", "", m_gt1),
            ("ate", "", m_gt1),
            ("iti", "", m_gt1),
            ("ous", "", m_gt1),
            ("ive", "", m_gt1),
            ("ize", "", m_gt1),
            ("al", "", m_gt1),
            ("er", "", m_gt1),
            ("ic", "", m_gt1),
            ("ou", "", m_gt1),
        ),
    )

    # Step 5a
    if w.endswith("e"):
        stem = w[:-1]
        m = _measure(stem)
        if m > 1 or (m == 1 and not _ends_cvc(stem)):
            w = stem

    # Step 5b
    if _measure(w) > 1 and _ends_double_consonant(w) and w.endswith("l"):
        w = w[:-1]

    return w


# ---------------------------------------------------------------------------
# Normalization
# ---------------------------------------------------------------------------


def normalize(text: str, origin: str) -> TokenSequence:
    """Turn raw code or comment text into the shared token form.

    origin="code" splits identifier humps; origin="comment" splits only at
    whitespace/punctuation. Both lowercase, drop stop words, and stem.
    """
    if origin == "code":
        words: list[str] = []
        for run in _CODE_RUNS.findall(text):
            words.extend(split_identifier(run))
    elif origin == "comment":
        words = _COMMENT_RUNS.findall(text)
    else:
        raise ValueError(f"unknown origin {origin!r}")

    out = []
    for word in words:
        lowered = word.lower()
        if lowered in STOP_WORDS:
            continue
        out.append(porter_stem(lowered) if lowered.isalpha() else lowered)
    return tuple(out)


# ---------------------------------------------------------------------------
# Part-of-speech tagging
# ---------------------------------------------------------------------------

# Suffix fallbacks, checked in order after the lexicon misses. Tokens reaching
# the tagger are usually stems, hence the clipped forms (-li, -abl, ...).
_SUFFIX_RULES = (
    (("li", "ly"), "adverb"),
    (("ing",), "verb"),
    (("tion", "sion", "ness", "ment", "iti"), "noun"),
    (("ous", "ful", "abl", "ibl", "ive", "ic"), "adjective"),
    (("er", "or"), "noun"),
)


@lru_cache(maxsize=1)
def _default_lexicon() -> dict[str, str]:
    path = resources.files("commentdrift").joinpath("data/pos_lexicon.tsv")
    return load_pos_lexicon(path)


def load_pos_lexicon(path) -> dict[str, str]:
    """Load a word<TAB>tag lexicon file. First entry wins on duplicates."""
    table: dict[str, str] = {}
    with open(str(path), encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(f"{path}: line {line_no}: expected word<TAB>tag")
            word, tag = parts
            if tag not in POS_CATEGORIES:
                raise ValueError(f"{path}: line {line_no}: unknown tag {tag!r}")
            table.setdefault(word, tag)
    return table


def tag_token(token: str, table: dict[str, str] | None = None) -> str:
    if token.isdigit():
        return "numeral"
    if table is None:
        table = _default_lexicon()
    tag = table.get(token)
    if tag is not None:
        return tag
    if not token.isalpha():
        return "other"
    for suffixes, suffix_tag in _SUFFIX_RULES:
        if len(token) > 3 and token.endswith(suffixes):
            return suffix_tag
    return "noun"


def pos_distribution(words, table: dict[str, str] | None = None) -> np.ndarray:
    """Proportion of each POS category among the words; zeros when empty."""
    dist = np.zeros(len(POS_CATEGORIES), dtype=np.float64)
    words = tuple(words)
    if not words:
        return dist
    index = {cat: i for i, cat in enumerate(POS_CATEGORIES)}
    for word in words:
        dist[index[tag_token(word, table)]] += 1.0
    dist /= len(words)
    return dist


def pos_distance(dist_a, dist_b) -> np.ndarray:
    """Elementwise absolute difference of two POS distributions."""
    a = np.asarray(dist_a, dtype=np.float64)
    b = np.asarray(dist_b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError("distributions must have the same shape")
    return np.abs(a - b)
