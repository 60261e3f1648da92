import pytest

from diagcount import grid
from diagcount.errors import DiagcountError, GridTooLargeError
from diagcount.grid import (
    CSV_COLUMNS,
    GRID_WORK_LIMIT,
    GridPoint,
    estimate_work,
    evaluate_point,
    grid_points,
    rows_to_csv,
    verify_grid,
    witnessed_exponents,
)
from diagcount.schemas import CountMethod, CountResult, GridSpec, Verdict

SMALL = GridSpec(primes=[3], max_degree=2, max_arity=2, samples=2)


def test_witnessed_exponents():
    assert witnessed_exponents(3, 1, 16) == [2, 4]
    assert witnessed_exponents(5, 1, 16) == [2, 3, 6]
    assert witnessed_exponents(3, 2, 16) == [2, 4, 5, 10]


def test_small_grid_points():
    points = list(grid_points(SMALL))
    # exponent vectors (2,), (4,), (2, 2), (2, 4), (4, 4), two samples, three right-hand sides
    assert len(points) == 30
    assert points[0] == GridPoint(3, 1, (2,), (0,), "0")
    assert points[12] == GridPoint(3, 1, (2, 2), (0, 0), "0")
    assert {point.b for point in points} == {"0", "1", "alpha"}


def test_grid_points_are_deterministic():
    spec = GridSpec(primes=[3, 5], max_degree=2, max_arity=3, samples=3)
    assert list(grid_points(spec)) == list(grid_points(spec))
    reseeded = spec.model_copy(update={"seed": "other"})
    assert list(grid_points(reseeded)) != list(grid_points(spec))


@pytest.mark.parametrize("prime", [2, 9])
def test_grid_rejects_bad_primes(prime):
    with pytest.raises(DiagcountError, match="odd primes"):
        list(grid_points(GridSpec(primes=[prime])))


def test_default_grid_fits_the_work_limit():
    points = list(grid_points(GridSpec()))
    assert 0 < estimate_work(points) <= GRID_WORK_LIMIT


def test_evaluate_point():
    row = evaluate_point(GridPoint(3, 1, (4, 4), (0, 0), "1"))
    assert row.count == row.oracle == 24
    assert row.method == CountMethod.s2_proposition
    assert row.bound == "21"
    assert not row.attained
    assert row.verdict == Verdict.neither
    assert row.ok


def test_evaluate_single_variable_point():
    row = evaluate_point(GridPoint(3, 1, (4,), (0,), "1"))
    assert row.count == row.oracle == 4
    assert row.method == CountMethod.nonzero_theorem
    assert row.bound == "3"
    assert row.attained
    assert row.verdict == Verdict.maximal
    assert row.ok


def test_evaluate_point_records_mismatch(monkeypatch):
    def broken(eq):
        return CountResult(value=25, method=CountMethod.s2_proposition)

    monkeypatch.setattr(grid, "count_auto", broken)
    row = evaluate_point(GridPoint(3, 1, (4, 4), (0, 0), "1"))
    assert not row.ok
    assert row.verdict is None
    assert "oracle 24" in row.problems[0]


def test_verify_small_grid():
    report, rows = verify_grid(SMALL)
    assert report.points == len(rows) == 30
    assert report.mismatches == 0
    assert report.rows == []
    assert all(row.ok for row in rows)


def test_verify_grid_refuses_large_sweeps(monkeypatch):
    monkeypatch.setattr(grid, "GRID_WORK_LIMIT", 10)
    with pytest.raises(GridTooLargeError, match="--force"):
        verify_grid(SMALL)
    report, _ = verify_grid(SMALL, force=True)
    assert report.points == 30


def test_rows_to_csv():
    row = evaluate_point(GridPoint(3, 1, (2, 4), (0, 1), "alpha"))
    lines = rows_to_csv([row]).splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    fields = lines[1].split(",")
    assert fields[:4] == ["3", "1", "2", "2 4"]
    assert fields[-1] == ""


@pytest.mark.slow
def test_parallel_grid_matches_sequential():
    spec = SMALL.model_copy(update={"jobs": 2})
    _, parallel = verify_grid(spec)
    _, sequential = verify_grid(SMALL)
    assert parallel == sequential


@pytest.mark.slow
def test_default_grid_has_no_mismatches():
    report, rows = verify_grid(GridSpec())
    assert report.mismatches == 0, report.rows[:5]
    assert len(rows) == report.points


def test_verify_grid_across_primes():
    spec = GridSpec(primes=[3, 5, 7, 11], max_degree=2, max_field=121, max_arity=4, max_exponent=6, samples=2)
    report, rows = verify_grid(spec)
    assert report.mismatches == 0, report.rows[:5]
    assert {row.p for row in rows} == {3, 5, 7, 11}
    assert {row.s for row in rows} == {1, 2, 3, 4}
