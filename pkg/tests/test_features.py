import numpy as np
import pytest

from commentdrift.distill import ChangeOp, DeclChange
from commentdrift.features import (
    CONTINUOUS_FEATURES,
    CONTINUOUS_MASK,
    FEATURE_NAMES,
    PairChange,
    Standardizer,
    changed_statement_tokens,
    code_features,
    comment_features,
    extract_features,
    filter_correlated,
    load_matrix,
    relation_features,
    save_matrix,
)
from commentdrift.linker import CodeCommentPair
from commentdrift.refactor import RefactoringFlags

import embedfixture
import oracles


def test_feature_layout():
    assert len(FEATURE_NAMES) == 71
    assert FEATURE_NAMES[0] == "class_attributes_change"
    assert FEATURE_NAMES[67] == "dist_comment_changed_code"
    assert FEATURE_NAMES[68] == "dist_token_code"
    assert FEATURE_NAMES[69] == "dist_comment_code"
    assert FEATURE_NAMES[70] == "common_token_pair_distance"
    assert len(set(FEATURE_NAMES)) == 71
    assert CONTINUOUS_MASK.sum() == len(CONTINUOUS_FEATURES)
    # binary flags never get standardized
    assert "parameter_change" not in CONTINUOUS_FEATURES
    assert "dist_comment_code" in CONTINUOUS_FEATURES


def _pair_change():
    old_pair = CodeCommentPair(
        "method",
        "/** Scale the value. TODO check version 2 bug. */",
        (3, 4),
        [(5, "int f(int a) {"), (6, "total = scale(a);"), (7, "return total;")],
        "f(int)",
        "A",
    )
    new_pair = CodeCommentPair(
        "method",
        "/** Scale the value. TODO check version 2 bug. */",
        (3, 4),
        [(5, "int f(int a, int b) {"), (6, "total = scale(a, b);"), (7, "return total;")],
        "f(int, int)",
        "A",
    )
    ops = [
        ChangeOp(
            "update",
            "method_invocation",
            old_text="scale ( a )",
            new_text="scale ( a , b )",
            old_span=(6, 6),
            new_span=(6, 6),
        ),
        ChangeOp("add", "if", new_text="if ( b > 0 )", new_span=(7, 7)),
    ]
    return PairChange(
        old_pair=old_pair,
        new_pair=new_pair,
        ops=ops,
        decl=DeclChange(parameters_changed=True),
        refactorings=RefactoringFlags(add_parameter=True),
        label=1,
        s_cmt=("scale", "value"),
        s_code=("scale", "factor", "area"),
        s_code_new=("clamp", "cap", "read", "area"),
        s_smt=("scale", "factor"),
        s_smt_new=("clamp", "cap"),
        has_return=True,
    )


def test_code_features_values():
    out = code_features(_pair_change())
    assert out["parameter_change"] == 1.0
    assert out["method_name_change"] == 0.0
    assert out["return_type_change"] == 0.0
    assert out["class_attributes_change"] == 0.0
    # 3 code lines, 2 comment lines
    assert out["code_line_proportion"] == pytest.approx(3 / 5)
    # one old-side changed line (line 6)
    assert out["changed_line_proportion"] == pytest.approx(1 / 5)
    assert out["method_invocation_update"] == 1.0
    assert out["if_add"] == 1.0
    assert out["if_delete"] == 0.0
    assert out["method_invocation_delete"] == 0.0
    assert out["add_parameter"] == 1.0
    assert out["extract_method"] == 0.0
    assert out["number_of_changes"] == 2.0
    assert out["contains_return"] == 1.0


def test_code_pos_distance_columns():
    pc = _pair_change()
    out = code_features(pc)
    from commentdrift.lexicon import POS_CATEGORIES, pos_distance, pos_distribution

    want = pos_distance(pos_distribution(pc.s_code), pos_distribution(pc.s_code_new))
    for cat, value in zip(POS_CATEGORIES, want):
        assert out[f"code_pos_distance_{cat}"] == pytest.approx(float(value))


def test_comment_features_flags():
    out = comment_features("/** TODO: FIXME before VERSION 2, known bug. */")
    assert out["comment_todo"] == 1.0
    assert out["comment_fix"] == 1.0
    assert out["comment_version"] == 1.0
    assert out["comment_bug"] == 1.0
    # bare "fix" is too common to count; only fixme/fixed trip the flag
    assert comment_features("// fix the offset")["comment_fix"] == 0.0
    assert comment_features("// fixed the offset")["comment_fix"] == 1.0
    clean = comment_features("// scale the reading")
    assert clean["comment_todo"] == 0.0
    assert clean["comment_fix"] == 0.0
    assert clean["comment_version"] == 0.0
    assert clean["comment_bug"] == 0.0


def test_comment_pos_distribution_sums_to_one():
    out = comment_features("// scale the raw reading quickly")
    total = sum(v for k, v in out.items() if k.startswith("comment_pos_"))
    assert total == pytest.approx(1.0)


def test_relation_features_match_oracle(tiny_model):
    pc = _pair_change()
    out = relation_features(pc, tiny_model)
    d_smt, d_token, d_code, common = oracles.relation_distances_oracle(
        pc.s_cmt, pc.s_code, pc.s_code_new, pc.s_smt, pc.s_smt_new, embedfixture.VECTORS
    )
    assert out["dist_comment_changed_code"] == pytest.approx(d_smt, abs=1e-10)
    assert out["dist_token_code"] == pytest.approx(d_token, abs=1e-10)
    assert out["dist_comment_code"] == pytest.approx(d_code, abs=1e-10)
    assert out["common_token_pair_distance"] == common


def test_extract_features_vector_layout(tiny_model):
    pc = _pair_change()
    vec = extract_features(pc, tiny_model)
    assert vec.shape == (71,)
    merged = code_features(pc)
    merged.update(comment_features(pc.old_pair.comment_text))
    merged.update(relation_features(pc, tiny_model))
    for j, name in enumerate(FEATURE_NAMES):
        assert vec[j] == merged[name], name


def test_changed_statement_tokens():
    pc = _pair_change()
    old_tokens, new_tokens = changed_statement_tokens(pc.ops)
    assert old_tokens == ("scale",)  # "a" is a stop word
    assert new_tokens == ("scale", "b", "if", "b", "0")


def test_standardizer_mean_zero_std_one():
    rng = np.random.default_rng(5)
    X = rng.normal(3.0, 2.5, size=(40, 71))
    std = Standardizer().fit(X)
    out = std.transform(X)
    cont = np.nonzero(CONTINUOUS_MASK)[0]
    assert np.all(np.abs(out[:, cont].mean(axis=0)) < 1e-9)
    assert np.all(np.abs(out[:, cont].std(axis=0) - 1.0) < 1e-9)
    flags = np.nonzero(~CONTINUOUS_MASK)[0]
    assert np.array_equal(out[:, flags], X[:, flags])


def test_standardizer_zero_variance_column():
    X = np.ones((5, 71))
    out = Standardizer().fit(X).transform(X)
    cont = np.nonzero(CONTINUOUS_MASK)[0]
    assert np.all(out[:, cont] == 0.0)


def test_standardizer_needs_two_rows():
    with pytest.raises(ValueError):
        Standardizer().fit(np.ones((1, 71)))


def test_standardizer_roundtrip(tmp_path):
    rng = np.random.default_rng(9)
    X = rng.normal(size=(10, 71))
    std = Standardizer().fit(X)
    path = tmp_path / "standardizer.json"
    std.save(str(path))
    loaded = Standardizer.load(str(path))
    assert np.array_equal(loaded.means, std.means)
    assert np.array_equal(loaded.stds, std.stds)
    assert np.array_equal(loaded.mask, std.mask)
    assert np.array_equal(loaded.transform(X), std.transform(X))


def test_filter_correlated_drops_duplicate():
    rng = np.random.default_rng(2)
    base = rng.normal(size=(30, 3))
    X = np.column_stack([base[:, 0], base[:, 1], base[:, 0], base[:, 2]])
    kept = filter_correlated(X, threshold=0.8)
    assert kept == [0, 1, 3]


def test_filter_correlated_catches_negative_correlation():
    rng = np.random.default_rng(3)
    a = rng.normal(size=25)
    X = np.column_stack([a, -a, rng.normal(size=25)])
    kept = filter_correlated(X, threshold=0.8)
    assert kept == [0, 2]


def test_filter_correlated_keeps_zero_variance():
    rng = np.random.default_rng(4)
    X = np.column_stack([np.full(20, 7.0), rng.normal(size=20), np.zeros(20)])
    kept = filter_correlated(X, threshold=0.8)
    assert kept == [0, 1, 2]


def test_filter_correlated_matches_pearson_oracle():
    rng = np.random.default_rng(6)
    X = rng.normal(size=(25, 5))
    X[:, 3] = 0.9 * X[:, 1] + 0.1 * rng.normal(size=25)
    kept = filter_correlated(X, threshold=0.8)
    r = abs(oracles.pearson_oracle(list(X[:, 1]), list(X[:, 3])))
    if r >= 0.8:
        assert 3 not in kept
    else:
        assert 3 in kept


def test_filter_correlated_needs_three_rows():
    with pytest.raises(ValueError):
        filter_correlated(np.ones((2, 4)))


def test_matrix_roundtrip(tmp_path):
    rng = np.random.default_rng(8)
    X = rng.normal(size=(6, 71))
    y = rng.integers(0, 2, 6)
    path = tmp_path / "matrix.tsv"
    save_matrix(str(path), X, y)
    names, X2, y2 = load_matrix(str(path))
    assert names == FEATURE_NAMES
    assert np.array_equal(X, X2)  # repr roundtrips float64 exactly
    assert np.array_equal(y, y2)


def test_matrix_roundtrip_without_labels(tmp_path):
    X = np.array([[1.5, 2.25], [3.0, -0.125]])
    path = tmp_path / "m.tsv"
    save_matrix(str(path), X, names=("a", "b"))
    names, X2, y2 = load_matrix(str(path))
    assert names == ("a", "b")
    assert np.array_equal(X, X2)
    assert y2 is None
