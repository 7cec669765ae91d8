import io
import math

import pytest

from transient_cpd import reproduce
from transient_cpd.exceptions import ConfigurationError


def test_table1_analytic_rows():
    t = reproduce.table1(reps=0)
    assert t.x == reproduce.CUSUM_THRESHOLDS
    assert [abs(v - p) <= 1 for v, p in zip(t.row("approximation"), (59, 110, 513, 1014, 5018))] == [True] * 5
    proxy = t.row("approximation (exp(-rho A) proxy)")
    assert [abs(v - p) <= 1 for v, p in zip(proxy, (60, 111, 517, 1023, 5058))] == [True] * 5
    with pytest.raises(KeyError):
        t.row("simulation")


def test_table_csv_layout():
    buf = io.StringIO()
    reproduce.table2(reps=0).to_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0].startswith("h,2.0,2.25")
    assert lines[1].startswith("approximation,126.0")


def test_small_simulated_tables_have_all_rows():
    t = reproduce.build_table(2, reps=500, seed=1)
    labels = [name for name, _ in t.rows]
    assert labels == ["approximation", "approximation (exact rho)", "simulation", "simulation std. error"]
    assert all(math.isfinite(v) and v > 0 for v in t.row("simulation"))
    with pytest.raises(ConfigurationError):
        reproduce.build_table(6)
    with pytest.raises(ConfigurationError):
        reproduce.table4(reps=0)


def test_power_series_columns():
    s = reproduce.power_series(3.0, (5,), gammas=(1.0, 2.0), reps=2000, seed=1)
    assert len(s) == 2
    L, g, emp, se, disc, diff = s[1]
    assert L == 5 and g == 2.0
    assert abs(emp - disc) < 5 * se + 0.02
    assert 0 < diff < 1
    with pytest.raises(ConfigurationError):
        reproduce.build_series("fig1")
