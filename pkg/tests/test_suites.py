"""The randomized invariant suites: registry, determinism, reporting."""

import pytest

import artifact.suites as suites_module
from artifact.suites import SUITE_NAMES, run_all_suites, run_suite
from artifact.suites import _trial_seed

EXPECTED_NAMES = (
    "multiplicativity",
    "restrictioninduction",
    "fixedsupport",
    "primesupport",
    "powerlaw",
    "regconstindex",
    "genusstability",
)


def test_registry_holds_the_seven_suites():
    assert SUITE_NAMES == EXPECTED_NAMES


@pytest.mark.parametrize("name", EXPECTED_NAMES)
def test_every_suite_passes_a_short_run(name):
    report = run_suite(name, trials=12, seed=11)
    assert report.passed
    assert report.failures == 0
    assert report.trials == 12
    assert report.failure_notes == ()
    assert report.summary() == f"{name}: 12/12 pass"


def test_identical_seed_gives_identical_report():
    first = run_suite("powerlaw", trials=6, seed=3)
    second = run_suite("powerlaw", trials=6, seed=3)
    assert first == second


def test_trial_seeds_are_distinct_across_trials_and_suites():
    seeds = {_trial_seed("powerlaw", 0, i) for i in range(50)}
    assert len(seeds) == 50
    assert _trial_seed("powerlaw", 0, 1) != _trial_seed("genusstability", 0, 1)
    assert _trial_seed("powerlaw", 0, 1) != _trial_seed("powerlaw", 1, 1)


def test_unknown_suite_lists_the_catalogue():
    with pytest.raises(ValueError, match="regconstindex"):
        run_suite("no_such_suite")


def test_nonpositive_trial_count_rejected():
    with pytest.raises(ValueError, match="trials"):
        run_suite("powerlaw", trials=0)


def test_failures_are_counted_and_notes_capped(monkeypatch):
    def broken(rng):
        raise AssertionError("forced failure")

    monkeypatch.setitem(suites_module._SUITES, "powerlaw", broken)
    report = run_suite("powerlaw", trials=8, seed=0)
    assert not report.passed
    assert report.failures == 8
    assert len(report.failure_notes) == 5
    assert "forced failure" in report.failure_notes[0]
    assert report.summary() == "powerlaw: 0/8 FAIL"


def test_run_all_covers_every_suite_in_order():
    reports = run_all_suites(trials=2, seed=5)
    assert [r.name for r in reports] == list(EXPECTED_NAMES)
    assert all(r.passed for r in reports)
