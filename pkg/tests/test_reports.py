"""Fitting, annulus bookkeeping, and serialization round trips."""
from __future__ import annotations

import json

import numpy as np
import pytest

from expanders.reports import (
    RESIDUAL_CSV_HEADER,
    AnnulusReport,
    ResidualReport,
    ResidualSample,
    dumps_json,
    dyadic_annuli,
    fit_loglog_slope,
    read_csv_text,
    write_csv_text,
)


class TestFitLoglogSlope:
    def test_exact_power_law_recovers_exponent(self):
        # Oracle: residuals 3.7 * h**2 on a dyadic ladder have slope exactly 2.
        h = np.array([0.1, 0.05, 0.025, 0.0125])
        slope = fit_loglog_slope(h, 3.7 * h**2)
        assert abs(slope - 2.0) < 1e-12

    def test_first_order_data(self):
        h = np.array([0.2, 0.1, 0.05])
        assert abs(fit_loglog_slope(h, 0.9 * h) - 1.0) < 1e-12

    def test_mixed_orders_fit_between(self):
        h = np.array([0.2, 0.1, 0.05, 0.025])
        slope = fit_loglog_slope(h, h**2 + 1e-3 * h)
        assert 1.0 < slope < 2.0

    def test_zero_residuals_stay_finite(self):
        # The floor keeps identically-zero ladders out of log(0).
        h = np.array([0.1, 0.05])
        assert abs(fit_loglog_slope(h, np.zeros(2))) < 1e-9

    def test_requires_two_points(self):
        with pytest.raises(ValueError):
            fit_loglog_slope(np.array([0.1]), np.array([1.0]))


class TestDyadicAnnuli:
    def test_doubling_intervals(self):
        assert dyadic_annuli(1.5, 3) == [(1.5, 3.0), (3.0, 6.0), (6.0, 12.0)]

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            dyadic_annuli(0.0, 3)
        with pytest.raises(ValueError):
            dyadic_annuli(1.0, 0)


class TestResidualReport:
    def _samples(self):
        return [
            ResidualSample("H", 0.05, 2.5e-4, 1.0e-4),
            ResidualSample("H", 0.1, 1.0e-3, 4.0e-4),
            ResidualSample("H", 0.025, 6.25e-5, 2.5e-5),
        ]

    def test_from_samples_sorts_coarsest_first(self):
        report = ResidualReport.from_samples("H", self._samples())
        assert report.resolutions == [0.1, 0.05, 0.025]
        assert report.sup_residuals == [1.0e-3, 2.5e-4, 6.25e-5]

    def test_fitted_orders_on_quadratic_data(self):
        report = ResidualReport.from_samples("H", self._samples())
        assert abs(report.fitted_order - 2.0) < 1e-12
        assert abs(report.fitted_order_l2 - 2.0) < 1e-12

    def test_needs_at_least_two_samples(self):
        with pytest.raises(ValueError):
            ResidualReport.from_samples("H", self._samples()[:1])

    def test_json_round_trip(self):
        report = ResidualReport.from_samples("H", self._samples())
        clone = ResidualReport.from_json_dict(report.to_json_dict())
        assert clone == report

    def test_validate_rejects_ragged_lists(self):
        report = ResidualReport.from_samples("H", self._samples())
        report.l2_residuals = report.l2_residuals[:-1]
        with pytest.raises(ValueError):
            report.validate()

    def test_csv_round_trip(self):
        report = ResidualReport.from_samples("H", self._samples())
        text = write_csv_text(RESIDUAL_CSV_HEADER, report.csv_rows())
        header, rows = read_csv_text(text)
        assert header == RESIDUAL_CSV_HEADER
        assert len(rows) == 3
        assert float(rows[0][1]) == 0.1
        assert float(rows[-1][2]) == 6.25e-5


class TestAnnulusReport:
    def _report(self):
        annuli = dyadic_annuli(1.0, 3)
        rows = {
            "A": [(annuli[0], 0.4, 0.2), (annuli[1], 0.2, 0.1),
                  (annuli[2], 0.1, 0.05)],
            "H": [(annuli[0], 0.9, 0.5), (annuli[1], 0.3, 0.2),
                  (annuli[2], 0.1, 0.06)],
        }
        return AnnulusReport.build(rows)

    def test_quantities_and_sups(self):
        report = self._report()
        assert report.quantities() == ["A", "H"]
        assert report.sups("A") == [0.4, 0.2, 0.1]

    def test_monotone_detection(self):
        report = self._report()
        assert report.monotone_nonincreasing("A")
        assert report.monotone_nonincreasing("H")

    def test_growth_is_flagged(self):
        annuli = dyadic_annuli(1.0, 3)
        rows = {"f": [(annuli[0], 0.1, 0.1), (annuli[1], 0.2, 0.2),
                      (annuli[2], 0.4, 0.4)]}
        report = AnnulusReport.build(rows)
        assert not report.monotone_nonincreasing("f")

    def test_slack_tolerates_flat_rows(self):
        annuli = dyadic_annuli(1.0, 2)
        rows = {"f": [(annuli[0], 0.1, 0.1), (annuli[1], 0.1 + 1e-13, 0.1)]}
        report = AnnulusReport.build(rows)
        assert report.monotone_nonincreasing("f", slack=1e-12)

    def test_fitted_decay_slope(self):
        # Oracle: sup ~ 1/r sampled at geometric midpoints fits slope -1.
        annuli = dyadic_annuli(1.0, 4)
        mids = [np.sqrt(a * b) for a, b in annuli]
        rows = {"f": [(ann, 1.0 / m, 0.5 / m) for ann, m in zip(annuli, mids)]}
        report = AnnulusReport.build(rows)
        assert abs(report.fitted_slopes["f"] + 1.0) < 1e-10

    def test_json_round_trip(self):
        report = self._report()
        clone = AnnulusReport.from_json_list(report.to_json_list())
        assert clone == report


class TestSerializationHelpers:
    def test_dumps_json_is_deterministic(self):
        payload = {"b": 1, "a": [1.5, 2.5], "c": {"y": None, "x": "s"}}
        text = dumps_json(payload)
        assert text == dumps_json(dict(reversed(list(payload.items()))))
        assert text.endswith("\n")
        assert json.loads(text) == payload

    def test_csv_floats_survive_round_trip_exactly(self):
        rows = [["a", 0.1, 1e-300], ["b", 2.0 / 3.0, 0]]
        header = ["name", "x", "y"]
        text = write_csv_text(header, rows)
        header2, rows2 = read_csv_text(text)
        assert header2 == header
        assert float(rows2[0][1]) == 0.1
        assert float(rows2[0][2]) == 1e-300
        assert float(rows2[1][1]) == 2.0 / 3.0
