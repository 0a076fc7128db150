import pytest

from fatcost import dataset
from fatcost.errors import DataError, EmptySampleError

HEADER = ",".join(dataset.HEADER) + "\n"


def test_bundled_counts(table):
    assert len(table) == 30
    assert sum(r.outturn_cost is not None for r in table) == 25
    assert sum(r.overrun_pct is not None for r in table) == 19
    assert dataset.validate(table).ok


def test_bundled_ordering(table):
    keys = [(r.year, dataset.SEASONS.index(r.season)) for r in table]
    assert keys == sorted(keys)


def test_header_only_file(tmp_path):
    p = tmp_path / "empty.csv"
    p.write_text(HEADER)
    assert len(dataset.load_games_csv(p)) == 0


def test_beijing_row():
    t = dataset.loads_games_csv(HEADER + "Beijing 2008,2008,summer,China,302,10942,6.810,2\n")
    (r,) = t.records
    assert r.overrun_pct == 2 and r.outturn_cost == 6.810 and r.events == 302


def test_empty_cells_are_absent():
    t = dataset.loads_games_csv(HEADER + "X 1980,1980,winter,Y,,,,0\n")
    r = t.records[0]
    assert r.events is None and r.outturn_cost is None
    assert r.overrun_pct == 0 and r.overrun_ratio == 1.0


def test_parse_error_names_row_and_column():
    with pytest.raises(DataError, match=r"row 2, column 'events'"):
        dataset.loads_games_csv(HEADER + "X,1980,winter,Y,abc,,,\n")


def test_bad_header():
    with pytest.raises(DataError, match="header"):
        dataset.loads_games_csv("name,year\nA,2000\n")


def test_missing_file(tmp_path):
    with pytest.raises(DataError):
        dataset.load_games_csv(tmp_path / "nope.csv")


def test_duplicate_edition_is_one_error():
    text = HEADER + "A,1964,winter,X,,,,\nB,1964,winter,Y,,,,\n"
    rep = dataset.validate(dataset.loads_games_csv(text, check=False))
    assert len(rep.errors) == 1
    with pytest.raises(DataError, match="duplicate"):
        dataset.loads_games_csv(text)


def test_overrun_below_minus_100_is_one_error():
    rep = dataset.validate(dataset.loads_games_csv(HEADER + "A,1990,summer,X,,,,-150\n", check=False))
    assert len(rep.errors) == 1


def test_huge_overrun_is_a_warning():
    rep = dataset.validate(dataset.loads_games_csv(HEADER + "A,1990,summer,X,,,,1500\n", check=False))
    assert rep.ok and len(rep.warnings) == 1


@pytest.mark.parametrize("row", ["A,1800,summer,X,,,,", "A,1990,spring,X,,,,", "A,1990,summer,X,0,,,", "A,1990,summer,X,,,-1,"])
def test_invalid_values(row):
    assert not dataset.validate(dataset.loads_games_csv(HEADER + row + "\n", check=False)).ok


def test_round_trip(table, tmp_path):
    p = tmp_path / "t.csv"
    dataset.save_games_csv(table, p)
    again = dataset.load_games_csv(p)
    assert again.records == table.records


def test_overrun_ratios(table):
    s = dataset.overrun_ratios(table)
    assert len(s) == 19
    assert min(s.ratios) == pytest.approx(1.02) and s.labels[s.ratios.index(min(s.ratios))] == "Beijing 2008"
    assert max(s.ratios) == pytest.approx(8.20) and s.labels[s.ratios.index(max(s.ratios))] == "Montreal 1976"
    assert len(dataset.overrun_ratios(table, "summer")) == 8
    assert len(dataset.overrun_ratios(table, "summer")) + len(dataset.overrun_ratios(table, "winter")) == 19


def test_overrun_ratios_empty():
    t = dataset.loads_games_csv(HEADER + "A,1990,summer,X,,,1.0,\n")
    with pytest.raises(EmptySampleError):
        dataset.overrun_ratios(t)


def test_unknown_filter(table):
    with pytest.raises(DataError):
        dataset.overrun_ratios(table, "autumn")


@pytest.mark.parametrize("name, per_event, per_athlete, athlete_tol", [
    ("London 2012", 49.5, 1.4, 0.05), ("Sochi 2014", 223.4, 7.9, 0.05), ("Tokyo 1964", 1.7, 0.055, 0.0005),
])
def test_unit_costs(table, name, per_event, per_athlete, athlete_tol):
    # tolerances are half a unit of the published rounding
    u = dataset.derive_unit_costs(table).by_name()[name]
    assert u.cost_per_event == pytest.approx(per_event, abs=0.05)
    assert u.cost_per_athlete == pytest.approx(per_athlete, abs=athlete_tol)


def test_unit_costs_skip_incomplete(table):
    units = dataset.derive_unit_costs(table)
    assert len(units) == 25
    skipped = dict(units.skipped)
    assert "missing outturn_cost" in skipped["Seoul 1988"]


def test_unit_costs_are_division(table):
    for u, r in zip(dataset.derive_unit_costs(table), [r for r in table if r.outturn_cost is not None]):
        assert u.cost_per_event == r.outturn_cost * 1000 / r.events


def test_sample_csv(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text("value\n1.5\n2.0\n\n3\n")
    s = dataset.load_sample_csv(p)
    assert s.ratios == (1.5, 2.0, 3.0)
    p.write_text("value\n-1\n")
    with pytest.raises(DataError):
        dataset.load_sample_csv(p)
    p.write_text("x\n1\n")
    with pytest.raises(DataError, match="header"):
        dataset.load_sample_csv(p)


def test_overrun_sample_invariants():
    with pytest.raises(EmptySampleError):
        dataset.OverrunSample((), ())
    with pytest.raises(DataError):
        dataset.OverrunSample((1.0, 2.0), ("a",))
