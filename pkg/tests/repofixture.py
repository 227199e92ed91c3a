"""Deterministic ten-commit fixture repository.

Two Java files evolve over ten commits, producing exactly 14 labeled
records: 10 method pairs and 4 block pairs, 6 of them positive. Positives
pair a declaration change (parameter or return type) or a scope edit with a
rewritten comment; negatives change code under an untouched comment. An
eleventh held-out commit removes a parameter while leaving the header
comment stale, for end-to-end detection checks.

Commit dates and identities are pinned so repeated builds hash identically.
"""

import os
import subprocess

_ENV = {
    "GIT_AUTHOR_NAME": "Fixture Author",
    "GIT_AUTHOR_EMAIL": "fixture@example.com",
    "GIT_COMMITTER_NAME": "Fixture Author",
    "GIT_COMMITTER_EMAIL": "fixture@example.com",
}


def _calc(scale_comment, scale_params, scale_expr, area_expr, trim_comment, trim_first, trim_second):
    return f"""public class Calc {{
    private int pad;

    /** {scale_comment} */
    public int scale({scale_params}) {{
        int out = {scale_expr};
        return out;
    }}

    /** Compute the area for the stored width. */
    public int area(int height) {{
        return {area_expr};
    }}

    public int trim(int raw) {{
        // {trim_comment}
        int v = {trim_first};
        {trim_second};
        return v;
    }}
}}
"""


def _store(put_comment, put_sig, put_add, put_tail, get_sig, get_expr, compact_first, compact_second):
    tail = f"\n        {put_tail}" if put_tail else ""
    return f"""public class Store {{
    private int limit;

    /** {put_comment} */
    public {put_sig} {{
        {put_add}
        count = count + 1;{tail}
    }}

    /** Look up a record by its key. */
    public {get_sig} {{
        touch(key);
        log(key);
        return {get_expr};
    }}

    public void compact() {{
        // drop stale entries before the sweep
        {compact_first}
        {compact_second}
    }}
}}
"""


_CALC_V1 = _calc(
    "Scale the base value by the given factor.",
    "int base, int factor", "base * factor",
    "width * height",
    "clamp the raw reading to the legal window", "clampLow(raw)", "v = clampHigh(v)",
)
_CALC_V2 = _calc(
    "Scale the base value by the factor plus offset.",
    "int base, int factor, int offset", "base * factor + offset",
    "width * height",
    "clamp the raw reading to the legal window", "clampLow(raw)", "v = clampHigh(v)",
)
_CALC_V3 = _calc(
    "Scale the base value by the factor plus offset.",
    "int base, int factor, int offset", "base * factor + offset",
    "width * height + margin",
    "clamp the raw reading to the legal window", "clampLow(raw)", "v = clampHigh(v)",
)
_CALC_V4 = _calc(
    "Scale the base value by the factor plus offset.",
    "int base, int factor, int offset", "base * factor + offset",
    "width * height + margin",
    "clamp the raw reading to the legal window", "clampLow(raw)", "v = clampHigh(v) - pad",
)
_CALC_V5 = _calc(
    "Scale the base reading by the factor plus offset.",
    "int base, int factor, int offset", "base * factor + offset",
    "width * height + margin",
    "clamp the raw reading to the legal window", "clampLow(raw)", "v = clampHigh(v) - pad",
)
_CALC_V6 = _calc(
    "Scale the base reading by factor plus offset, clamped to the cap.",
    "int base, int factor, int offset, int cap", "min(base * factor + offset, cap)",
    "width * height + margin * 2",
    "clamp the raw reading to the legal window", "clampLow(raw)", "v = clampHigh(v) - pad",
)
_CALC_V7 = _calc(
    "Scale the base reading by factor plus offset, clamped to the cap.",
    "int base, int factor, int offset, int cap", "min(base * factor + offset, cap)",
    "width * height + margin * 2",
    "clamp the raw reading and drop the pad", "clampLow(raw - pad)", "v = clampHigh(v) - pad",
)
_CALC_HOLDOUT = _calc(
    "Scale the base reading by factor plus offset, clamped to the cap.",
    "int base, int factor, int cap", "min(base * factor, cap)",
    "width * height + margin * 2",
    "clamp the raw reading and drop the pad", "clampLow(raw - pad)", "v = clampHigh(v) - pad",
)

_STORE_V1 = _store(
    "Insert one record into the backing list.", "void put(Record r)",
    "items.add(r);", "",
    "Record get(String key)", "index.find(key)",
    "prune(stale);", "sweep();",
)
_STORE_V2 = _store(
    "Insert one record and report success.", "boolean put(Record r)",
    "items.add(r);", "return true;",
    "Record get(String key)", "index.lookup(key)",
    "prune(stale);", "sweep();",
)
_STORE_V3 = _store(
    "Insert one record and report success.", "boolean put(Record r)",
    "items.add(r);", "return true;",
    "Record fetch(String key)", "table.lookup(key)",
    "prune(stale);", "sweep(limit);",
)
_STORE_V4 = _store(
    "Insert one record, optionally forced, and report success.",
    "boolean put(Record r, boolean force)",
    "items.add(r, force);", "return true;",
    "Record fetch(String key)", "table.lookup(key)",
    "prune(stale, limit);", "sweep(limit);",
)
_STORE_V5 = _store(
    "Insert one record, optionally forced, and report success.",
    "boolean put(Record r, boolean force)",
    "items.add(r, force);", "return true;",
    "Record fetch(String key)", "cache.lookup(key)",
    "prune(stale, limit);", "sweep(limit);",
)
_STORE_HOLDOUT = _store(
    "Insert one record, optionally forced, and report success.",
    "boolean put(Record r, boolean force)",
    "items.add(r, force);", "return true;",
    "Record fetch(String key)", "cache.lookup(key)",
    "prune(stale, limit);", "sweep(limit + 1);",
)

# (message, iso date, {path: content}); one entry per commit
COMMITS = [
    ("add calculator", "2021-03-01T10:00:00", {"Calc.java": _CALC_V1}),
    ("scale takes an offset", "2021-03-02T10:00:00", {"Calc.java": _CALC_V2}),
    ("area accounts for margin", "2021-03-03T10:00:00", {"Calc.java": _CALC_V3}),
    ("add store, trim drops pad", "2021-03-04T10:00:00",
     {"Calc.java": _CALC_V4, "Store.java": _STORE_V1}),
    ("put reports success, faster lookup", "2021-03-05T10:00:00", {"Store.java": _STORE_V2}),
    ("reword scale comment", "2021-03-06T10:00:00", {"Calc.java": _CALC_V5}),
    ("rename get to fetch, bounded sweep", "2021-03-07T10:00:00", {"Store.java": _STORE_V3}),
    ("scale clamps to a cap", "2021-03-08T10:00:00", {"Calc.java": _CALC_V6}),
    ("forced insertion, bounded prune", "2021-03-09T10:00:00", {"Store.java": _STORE_V4}),
    ("trim rewrites, cache lookup", "2021-03-10T10:00:00",
     {"Calc.java": _CALC_V7, "Store.java": _STORE_V5}),
]

HOLDOUT = ("drop the offset parameter", "2021-03-11T10:00:00",
           {"Calc.java": _CALC_HOLDOUT, "Store.java": _STORE_HOLDOUT})

EXPECTED_RECORDS = 14
EXPECTED_POSITIVES = 6
EXPECTED_METHOD_RECORDS = 10
EXPECTED_BLOCK_RECORDS = 4
EXPECTED_PER_COMMIT = [0, 1, 1, 1, 2, 1, 2, 2, 2, 2]
PLANTED_COMMENT = "Scale the base reading by factor plus offset, clamped to the cap."
PLANTED_PATH = "Calc.java"


def _git(repo, *args, date=None):
    env = dict(os.environ, **_ENV)
    if date:
        env["GIT_AUTHOR_DATE"] = date
        env["GIT_COMMITTER_DATE"] = date
    result = subprocess.run(
        ["git", "-C", repo, *args], env=env, capture_output=True, text=True, check=True
    )
    return result.stdout.strip()


def _apply(repo, message, date, files):
    for path, content in files.items():
        with open(os.path.join(repo, path), "w", encoding="utf-8") as fh:
            fh.write(content)
    _git(repo, "add", "-A", date=date)
    _git(repo, "commit", "-q", "-m", message, date=date)


def build_repo(base_dir: str) -> str:
    """Create the ten-commit repository under base_dir and return its path."""
    repo = os.path.join(base_dir, "fixture-project")
    os.makedirs(repo)
    _git(repo, "init", "-q")
    for message, date, files in COMMITS:
        _apply(repo, message, date, files)
    return repo


def add_holdout_commit(repo: str) -> tuple[str, str]:
    """Apply the stale-comment commit; returns (previous head, new head)."""
    before = _git(repo, "rev-parse", "HEAD")
    message, date, files = HOLDOUT
    _apply(repo, message, date, files)
    return before, _git(repo, "rev-parse", "HEAD")
