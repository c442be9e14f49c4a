import datetime

import numpy as np
import pytest

from scamdyn.data import (ReportSeries, SyntheticSpec, export_series,
                          generate_synthetic, load_reports, month_str, pool)
from scamdyn.errors import (DuplicateError, GapError, GridMismatch,
                            ParseError)
from scamdyn.model import NOMINAL_PARAMS, State
from scamdyn.observe import MONTH_DAYS, month_times, simulate_observable


def write(tmp_path, text, name="reports.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


GOOD = ("month,province,reports\n"
        "2021-01,north,12\n"
        "2021-02,north,15.5\n"
        "2021-01,south,3\n"
        "2021-02,south,0\n")


class TestLoad:
    def test_basic(self, tmp_path):
        series = load_reports(write(tmp_path, GOOD))
        assert [s.label for s in series] == ["north", "south"]
        np.testing.assert_array_equal(series[0].counts, [12.0, 15.5])
        np.testing.assert_array_equal(series[1].counts, [3.0, 0.0])
        assert series[0].month_starts[0] == datetime.date(2021, 1, 1)

    def test_scale(self, tmp_path):
        series = load_reports(write(tmp_path, GOOD), scale=2.5)
        np.testing.assert_array_equal(series[0].counts, [30.0, 38.75])

    def test_unsorted_rows_accepted(self, tmp_path):
        text = ("month,province,reports\n"
                "2021-02,a,2\n"
                "2021-01,a,1\n")
        series = load_reports(write(tmp_path, text))
        np.testing.assert_array_equal(series[0].counts, [1.0, 2.0])

    def test_year_boundary_grid(self, tmp_path):
        # Jan 2021 through Mar 2025 inclusive is 51 months
        months = []
        d = datetime.date(2021, 1, 1)
        while d <= datetime.date(2025, 3, 1):
            months.append(d)
            d = (datetime.date(d.year + 1, 1, 1) if d.month == 12
                 else datetime.date(d.year, d.month + 1, 1))
        text = "month,province,reports\n" + "".join(
            f"{month_str(m)},x,{i}\n" for i, m in enumerate(months))
        series = load_reports(write(tmp_path, text))
        assert len(series[0]) == 51

    def test_bad_header(self, tmp_path):
        with pytest.raises(ParseError) as exc:
            load_reports(write(tmp_path, "date,province,reports\n"))
        assert exc.value.line_no == 1

    def test_bad_month(self, tmp_path):
        text = "month,province,reports\n2021-13,a,1\n"
        with pytest.raises(ParseError) as exc:
            load_reports(write(tmp_path, text))
        assert exc.value.line_no == 2

    def test_bad_field_count(self, tmp_path):
        text = "month,province,reports\n2021-01,a\n"
        with pytest.raises(ParseError):
            load_reports(write(tmp_path, text))

    def test_negative_count(self, tmp_path):
        text = "month,province,reports\n2021-01,a,-3\n"
        with pytest.raises(ParseError):
            load_reports(write(tmp_path, text))

    def test_duplicate(self, tmp_path):
        text = ("month,province,reports\n"
                "2021-01,a,1\n"
                "2021-01,a,2\n")
        with pytest.raises(DuplicateError) as exc:
            load_reports(write(tmp_path, text))
        assert exc.value.month == "2021-01"
        assert exc.value.province == "a"

    def test_gap(self, tmp_path):
        text = ("month,province,reports\n"
                "2021-01,a,1\n"
                "2021-03,a,2\n")
        with pytest.raises(GapError) as exc:
            load_reports(write(tmp_path, text))
        assert exc.value.month == "2021-02"


class TestSeries:
    def test_times_grid(self):
        s = ReportSeries((datetime.date(2021, 1, 1), datetime.date(2021, 2, 1),
                          datetime.date(2021, 3, 1)), np.array([1., 2., 3.]),
                         "x")
        np.testing.assert_allclose(s.times(), [0.0, MONTH_DAYS, 2 * MONTH_DAYS])

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            ReportSeries((datetime.date(2021, 1, 1),), np.array([1., 2.]), "x")


class TestPool:
    def test_sum(self, tmp_path):
        series = load_reports(write(tmp_path, GOOD))
        pooled = pool(series)
        assert pooled.label == "pooled"
        np.testing.assert_array_equal(pooled.counts, [15.0, 15.5])

    def test_order_independent(self, tmp_path):
        series = load_reports(write(tmp_path, GOOD))
        a = pool(series)
        b = pool(series[::-1])
        np.testing.assert_array_equal(a.counts, b.counts)

    def test_single(self, tmp_path):
        series = load_reports(write(tmp_path, GOOD))
        np.testing.assert_array_equal(pool([series[0]]).counts,
                                      series[0].counts)

    def test_brute_force_random(self):
        rng = np.random.default_rng(5)
        months = tuple(datetime.date(2022, m, 1) for m in range(1, 7))
        all_series = [ReportSeries(months, rng.uniform(0, 100, 6), f"p{i}")
                      for i in range(4)]
        pooled = pool(all_series)
        expected = np.zeros(6)
        for s in all_series:
            expected += s.counts
        np.testing.assert_allclose(pooled.counts, expected, rtol=1e-15)

    def test_grid_mismatch(self):
        a = ReportSeries((datetime.date(2021, 1, 1),), np.array([1.0]), "a")
        b = ReportSeries((datetime.date(2021, 2, 1),), np.array([1.0]), "b")
        with pytest.raises(GridMismatch):
            pool([a, b])

    def test_empty(self):
        with pytest.raises(ValueError):
            pool([])


class TestSynthetic:
    SPEC = SyntheticSpec(true_params=NOMINAL_PARAMS,
                         init=State(1000, 100, 0, 200, 0),
                         months=12, noise_sd=5.0, seed=3)

    def test_deterministic(self):
        a = generate_synthetic(self.SPEC)
        b = generate_synthetic(self.SPEC)
        np.testing.assert_array_equal(a.counts, b.counts)

    def test_seed_changes_noise(self):
        a = generate_synthetic(self.SPEC)
        other = SyntheticSpec(true_params=NOMINAL_PARAMS,
                              init=State(1000, 100, 0, 200, 0),
                              months=12, noise_sd=5.0, seed=4)
        b = generate_synthetic(other)
        assert np.any(a.counts != b.counts)

    def test_noise_free_matches_model(self):
        spec = SyntheticSpec(true_params=NOMINAL_PARAMS,
                             init=State(1000, 100, 0, 200, 0), months=12)
        series = generate_synthetic(spec)
        expected = simulate_observable(NOMINAL_PARAMS,
                                       State(1000, 100, 0, 200, 0),
                                       month_times(12), "prevalence")
        np.testing.assert_allclose(series.counts, expected, rtol=1e-14)

    def test_truncated_at_zero(self):
        spec = SyntheticSpec(true_params=NOMINAL_PARAMS,
                             init=State(1000, 1, 0, 1, 0),
                             months=24, noise_sd=200.0, seed=0)
        series = generate_synthetic(spec)
        assert np.all(series.counts >= 0.0)
        assert np.any(series.counts == 0.0)

    def test_month_grid(self):
        series = generate_synthetic(self.SPEC)
        assert series.month_starts[0] == datetime.date(2021, 1, 1)
        assert series.month_starts[-1] == datetime.date(2021, 12, 1)

    def test_round_trip_through_csv(self, tmp_path):
        series = generate_synthetic(self.SPEC)
        path = tmp_path / "synthetic.csv"
        export_series(series, path)
        loaded = load_reports(path)
        assert len(loaded) == 1
        assert loaded[0].month_starts == series.month_starts
        np.testing.assert_array_equal(loaded[0].counts, series.counts)

    def test_too_few_months(self):
        with pytest.raises(ValueError):
            SyntheticSpec(true_params=NOMINAL_PARAMS,
                          init=State(1, 1, 0, 1, 0), months=1)
