import datetime as dt

import pytest

from lsndesign.casestudy import (
    HistoryFileError,
    LaunchHistory,
    Scenario,
    decay_projection,
    deployment_curve,
    inverse_lookup,
    load_launch_history,
    max_survivability_for_count,
)
from lsndesign.orbits import TimeGrid
from scenarios import isl_scenario


@pytest.fixture(scope="module")
def scenario():
    sc = isl_scenario(size_gbps=1.0)
    return Scenario(sc["initial"], sc["cells"], sc["demands"], sc["requirements"], TimeGrid(600.0, 6),
                    sc["budget"])


def test_decay_examples():
    assert decay_projection(1000, 0.0, 4) == [(k, 1000) for k in range(5)]
    assert decay_projection(1000, 0.026, 1)[1] == (1, 974)
    assert decay_projection(1000, 0.026, 3)[3] == (3, 924)


def test_decay_strictly_decreasing():
    counts = [n for _, n in decay_projection(4408, 0.026, 10)]
    assert all(b < a for a, b in zip(counts, counts[1:]))


def test_decay_rounds_half_up():
    assert decay_projection(5, 0.5, 1)[1] == (1, 3)  # 2.5 -> 3


@pytest.mark.parametrize("args", [(10, 1.0, 2), (10, -0.1, 2), (-1, 0.1, 2), (10, 0.1, -1)])
def test_decay_bad_input(args):
    with pytest.raises(ValueError):
        decay_projection(*args)


def test_inverse_lookup_threshold_deduction():
    # r=5 needs 1500 satellites and r=6 needs 1600: 1550 supports r=5
    need = {1: 300, 2: 600, 3: 900, 4: 1200, 5: 1500, 6: 1600, 7: None}
    assert inverse_lookup(need, 1550) == 5
    assert inverse_lookup(need, 1600) == 6
    assert inverse_lookup(need, 10**6) == 6
    assert inverse_lookup(need, 299) == 0
    assert [inverse_lookup(need, n) for n in range(0, 2000, 50)] == sorted(
        inverse_lookup(need, n) for n in range(0, 2000, 50))


def test_inverse_lookup_guard():
    assert inverse_lookup(lambda r: 1, 5, r_guard=16) == 16


def test_below_coverage_gives_zero(scenario):
    assert max_survivability_for_count(0, scenario) == 0
    assert max_survivability_for_count(3, scenario) == 0
    with pytest.raises(ValueError):
        max_survivability_for_count(-1, scenario)


def test_forward_inverse_consistency(scenario):
    for r in (1, 2):
        n_r = scenario.required_satellites(r)
        assert n_r is not None
        assert max_survivability_for_count(n_r, scenario) >= r
        for n in range(0, 37):
            if max_survivability_for_count(n, scenario) >= r:
                assert n_r <= n


def test_inverse_monotone_in_n(scenario):
    values = [max_survivability_for_count(n, scenario) for n in range(0, 40, 3)]
    assert values == sorted(values)


def test_deployment_curve(scenario):
    start = dt.date(2024, 1, 1)
    counts = [10, 18, 25, 30, 36]
    hist = LaunchHistory(tuple((start + dt.timedelta(days=90 * k), n) for k, n in enumerate(counts)))
    curve = deployment_curve(hist, scenario)
    assert [(d, n) for d, n, _ in curve] == list(hist.entries)
    assert [r for _, _, r in curve] == [max_survivability_for_count(n, scenario) for n in counts]
    rs = [r for _, _, r in curve]
    assert rs == sorted(rs)


def test_single_zero_entry(scenario):
    hist = LaunchHistory(((dt.date(2020, 5, 1), 0),))
    assert deployment_curve(hist, scenario) == [(dt.date(2020, 5, 1), 0, 0)]
    with pytest.raises(ValueError):
        deployment_curve(LaunchHistory(()), scenario)


def test_history_invariants():
    d1, d2 = dt.date(2024, 1, 1), dt.date(2024, 2, 1)
    with pytest.raises(ValueError):
        LaunchHistory(((d2, 1), (d1, 2)))
    with pytest.raises(ValueError):
        LaunchHistory(((d1, 5), (d2, 4)))
    assert LaunchHistory(((d1, 5), (d2, 4)), decay=True).entries[1] == (d2, 4)
    with pytest.raises(ValueError):
        LaunchHistory(((d1, -1),))


def test_load_history(tmp_path):
    p = tmp_path / "h.csv"
    p.write_text("date,cumulative_satellites\n2024-01-01,60\n2024-03-01,120\n")
    hist = load_launch_history(p)
    assert hist.entries == ((dt.date(2024, 1, 1), 60), (dt.date(2024, 3, 1), 120))
    p.write_text("date,cumulative_satellites\n2024-01-01,60\n2024-13-01,120\n")
    with pytest.raises(HistoryFileError, match=":3:"):
        load_launch_history(p)
    p.write_text("day,count\n")
    with pytest.raises(HistoryFileError):
        load_launch_history(p)
