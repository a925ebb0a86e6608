"""Speedup arithmetic, timing harness, and calculated-vs-measured reports."""

import numpy as np
import pytest

from spentfuel.bench import (
    CeReport,
    MeasurementRecord,
    TimeConstants,
    break_even,
    ce_compare,
    load_measurements,
    load_predictions,
    measure_times,
    speedup,
    write_ce_report,
)
from spentfuel.errors import BenchError

# Reference constants used throughout: 58 s per oracle run, 105 s training,
# 5e-4 s per surrogate call, 500 training samples.
REF = TimeConstants(t_oracle=58.0, t_train=105.0, t_eval=5e-4, n_train=500)


class TestSpeedup:
    def test_reference_point(self):
        s = speedup(5072, REF)
        assert 10.0 < s < 10.2
        assert s == pytest.approx(5072 * 58.0 / (105.0 + 5072 * 5e-4 + 500 * 58.0))

    def test_break_even_location(self):
        n_star = break_even(REF)
        assert 495.0 <= n_star <= 510.0
        assert speedup(int(np.floor(n_star)), REF) < 1.0 < speedup(int(np.ceil(n_star)) + 1, REF)

    def test_strictly_increasing_in_n(self):
        values = [speedup(n, REF) for n in (1, 10, 100, 1000, 10_000, 100_000)]
        assert np.all(np.diff(values) > 0.0)

    def test_always_below_n_over_n_train(self):
        for n in (1, 500, 5072, 10**6):
            assert speedup(n, REF) < n / REF.n_train

    def test_tracks_n_over_n_train_once_training_amortizes(self):
        # in the regime where per-call surrogate time is still negligible
        # against the training-set cost, the curve follows n / n_train
        n = 200_000
        assert speedup(n, REF) == pytest.approx(n / REF.n_train, rel=0.01)

    def test_validation(self):
        with pytest.raises(BenchError):
            speedup(0, REF)
        with pytest.raises(BenchError):
            TimeConstants(t_oracle=-1.0, t_train=1.0, t_eval=1e-4, n_train=10)
        slow = TimeConstants(t_oracle=1e-5, t_train=1.0, t_eval=1e-4, n_train=10)
        with pytest.raises(BenchError, match="break-even"):
            break_even(slow)


class TestMeasureTimes:
    def test_surrogate_beats_oracle(self, quick_model):
        constants = measure_times(quick_model, n_probe=5, seed=0)
        assert constants.t_eval < constants.t_oracle
        assert constants.t_train == quick_model.train_seconds
        assert constants.n_train == 500

    def test_timing_spread_is_bounded(self, quick_model):
        constants = measure_times(quick_model, n_probe=8, seed=1)
        assert constants.t_oracle_std / constants.t_oracle < 0.5
        # its fields plug straight into the speedup model
        assert speedup(1000, constants) > 0.0

    def test_model_without_training_time_rejected(self, quick_model):
        from dataclasses import replace

        from spentfuel.mlp import MlpModel

        bare = MlpModel(
            arch=quick_model.arch,
            weights=quick_model.weights,
            biases=quick_model.biases,
            norm_stats=quick_model.norm_stats,
        )
        with pytest.raises(BenchError, match="training time"):
            measure_times(bare, n_probe=2)


def records():
    return [
        MeasurementRecord("fa1", "r2", 15.0, 500.0),
        MeasurementRecord("fa2", "r2", 18.0, 800.0),
        MeasurementRecord("fa3", "r3", 20.0, 1000.0),
    ]


class TestCeCompare:
    def test_exact_predictions_zero_bias(self):
        preds = {"fa1": 500.0, "fa2": 800.0, "fa3": 1000.0}
        report = ce_compare(preds, records())
        assert all(ratio == pytest.approx(1.0) for _m, _p, ratio in report.records)
        assert report.group_bias_pct == {"r2": pytest.approx(0.0), "r3": pytest.approx(0.0)}
        assert report.overall_bias_pct == pytest.approx(0.0)

    def test_two_percent_high(self):
        preds = {"fa1": 510.0, "fa2": 816.0, "fa3": 1020.0}
        report = ce_compare(preds, records())
        assert report.overall_bias_pct == pytest.approx(2.0)
        assert report.group_bias_pct["r2"] == pytest.approx(2.0)

    def test_permutation_invariant(self):
        preds = {"fa1": 490.0, "fa2": 850.0, "fa3": 970.0}
        fwd = ce_compare(preds, records())
        rev = ce_compare(preds, list(reversed(records())))
        assert fwd.group_bias_pct == rev.group_bias_pct
        assert fwd.overall_bias_pct == pytest.approx(rev.overall_bias_pct)

    def test_missing_predictions_listed(self):
        with pytest.raises(BenchError, match="fa2, fa3"):
            ce_compare({"fa1": 500.0}, records())

    def test_group_bias_uses_group_means(self):
        preds = {"fa1": 550.0, "fa2": 800.0, "fa3": 900.0}  # +10%, 0%, -10%
        report = ce_compare(preds, records())
        assert report.group_bias_pct["r2"] == pytest.approx(5.0)
        assert report.group_bias_pct["r3"] == pytest.approx(-10.0)

    def test_record_validation(self):
        with pytest.raises(BenchError):
            MeasurementRecord("x", "g", -1.0, 100.0)
        with pytest.raises(BenchError):
            MeasurementRecord("x", "g", 1.0, 0.0)


class TestFiles:
    def test_roundtrip_and_report_files(self, tmp_path):
        meas = tmp_path / "meas.csv"
        meas.write_text(
            "assembly_id,group,cooling_years,decay_heat_W_per_tU\n"
            "fa1,r2,15.0,500.0\n"
            "fa2,r2,18.0,800.0\n"
        )
        pred = tmp_path / "pred.csv"
        pred.write_text("assembly_id,decay_heat_W_per_tU\nfa1,505.0\nfa2,792.0\n")
        report = ce_compare(load_predictions(pred), load_measurements(meas))
        files = write_ce_report(report, tmp_path / "ce")
        assert [f.name for f in files] == ["ce_records.csv", "ce_bias.csv"]
        body = files[0].read_text()
        assert body.startswith("# spentfuel ")
        assert "fa1,r2" in body
        bias_body = files[1].read_text().splitlines()
        assert bias_body[1] == "group,bias_pct"
        assert bias_body[-1].startswith("all,")

    def test_bad_header_rejected(self, tmp_path):
        bad = tmp_path / "meas.csv"
        bad.write_text("id,grp,years,heat\nfa1,r2,15.0,500.0\n")
        with pytest.raises(BenchError, match="header"):
            load_measurements(bad)

    def test_bad_number_rejected(self, tmp_path):
        bad = tmp_path / "meas.csv"
        bad.write_text(
            "assembly_id,group,cooling_years,decay_heat_W_per_tU\nfa1,r2,xx,500.0\n"
        )
        with pytest.raises(BenchError, match="bad number"):
            load_measurements(bad)

    def test_empty_file_rejected(self, tmp_path):
        bad = tmp_path / "empty.csv"
        bad.write_text("assembly_id,decay_heat_W_per_tU\n")
        with pytest.raises(BenchError, match="no data"):
            load_predictions(bad)
