import dataclasses

import pytest

from commentdrift.refactor import RefactoringFlags

import refactor_fixtures


@pytest.mark.parametrize(
    "name,old,new,flag,expected",
    refactor_fixtures.FIXTURES,
    ids=[f[0] for f in refactor_fixtures.FIXTURES],
)
def test_refactoring_fixture(name, old, new, flag, expected):
    flags = refactor_fixtures.run_fixture(old, new)
    assert getattr(flags, flag) is expected


def test_positive_fixtures_fire_only_their_own_flag():
    flag_names = [f.name for f in dataclasses.fields(RefactoringFlags)]
    for name, old, new, flag, expected in refactor_fixtures.FIXTURES:
        if not expected:
            continue
        flags = refactor_fixtures.run_fixture(old, new)
        fired = [n for n in flag_names if getattr(flags, n)]
        assert fired == [flag], name


def test_identical_sources_fire_nothing():
    flag_names = [f.name for f in dataclasses.fields(RefactoringFlags)]
    for name, old, new, flag, expected in refactor_fixtures.FIXTURES:
        flags = refactor_fixtures.run_fixture(old, old)
        assert not any(getattr(flags, n) for n in flag_names), name


def test_suite_covers_each_kind_both_ways():
    seen = {}
    for name, old, new, flag, expected in refactor_fixtures.FIXTURES:
        seen.setdefault(flag, set()).add(expected)
    assert len(seen) == 8
    assert all(values == {True, False} for values in seen.values())
