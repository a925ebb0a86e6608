"""Assembly inputs, the reference history, and proportional rescaling."""

import numpy as np
import pytest

from spentfuel.errors import HistoryError
from spentfuel.history import (
    AssemblyInput,
    BurnupCycle,
    CoolingCycle,
    IrradiationHistory,
    build_history,
    reference_history,
    reference_input,
)


class TestAssemblyInput:
    def test_accepts_reference_values(self):
        inp = AssemblyInput(3.095, 35.72, 887.0, 310.75, 2068.0)
        assert inp.as_vector().shape == (5,)

    @pytest.mark.parametrize("field,value", [
        ("enrichment", 0.0),
        ("enrichment", -1.0),
        ("burnup", 0.0),
        ("fuel_temp", -5.0),
        ("boron", 0.0),
        ("cooling_days", 0.0),
    ])
    def test_rejects_non_positive_fields(self, field, value):
        kwargs = dict(enrichment=3.0, burnup=30.0, fuel_temp=800.0,
                      boron=300.0, cooling_days=1000.0)
        kwargs[field] = value
        with pytest.raises(ValueError):
            AssemblyInput(**kwargs)

    def test_rejects_enrichment_at_or_above_100(self):
        with pytest.raises(ValueError):
            AssemblyInput(100.0, 30.0, 800.0, 300.0, 1000.0)

    def test_vector_roundtrip(self):
        inp = AssemblyInput(4.0, 50.0, 900.0, 600.0, 150.0)
        assert AssemblyInput.from_vector(inp.as_vector()) == inp

    def test_from_vector_needs_five_values(self):
        with pytest.raises(ValueError):
            AssemblyInput.from_vector([1.0, 2.0, 3.0])


class TestReferenceHistory:
    def test_totals(self):
        hist = reference_history()
        assert hist.total_burnup == pytest.approx(35.72, abs=1e-12)
        assert hist.total_cooling_days == pytest.approx(2068.0, abs=1e-12)
        # mean of the four cycle borons {143, 459, 342, 299}
        assert hist.mean_boron == pytest.approx(1243.0 / 4.0, abs=1e-12)

    def test_first_burnup_cycle(self):
        first = reference_history().cycles[0]
        assert isinstance(first, BurnupCycle)
        assert first.burnup == 11.247
        assert first.boron == 143.0
        assert first.power == 10.9

    def test_second_cooling_cycle_duration(self):
        coolings = reference_history().cooling_cycles
        assert coolings[1].duration_days == 56.0

    def test_structure(self):
        hist = reference_history()
        assert len(hist.burnup_cycles) == 4
        assert len(hist.cooling_cycles) == 3
        assert hist.fuel_temp == 887.0

    def test_burnup_cycle_duration_follows_from_power(self):
        first = reference_history().cycles[0]
        assert first.duration_days == pytest.approx(1000.0 * 11.247 / 10.9)


class TestHistoryInvariants:
    def test_must_alternate(self):
        with pytest.raises(HistoryError, match="alternate"):
            IrradiationHistory(
                cycles=(BurnupCycle(1.0, 1.0, 1.0), BurnupCycle(1.0, 1.0, 1.0)),
                fuel_temp=800.0,
            )

    def test_must_end_with_burnup(self):
        with pytest.raises(HistoryError, match="end"):
            IrradiationHistory(
                cycles=(BurnupCycle(1.0, 1.0, 1.0), CoolingCycle(10.0)),
                fuel_temp=800.0,
            )

    def test_cycle_field_validation(self):
        with pytest.raises(HistoryError):
            BurnupCycle(burnup=-1.0, power=1.0, boron=1.0)
        with pytest.raises(HistoryError):
            CoolingCycle(duration_days=0.0)


class TestBuildHistory:
    def test_identity_scaling_reproduces_base(self):
        base = reference_history()
        scaled = build_history(base, reference_input())
        for got, want in zip(scaled.cycles, base.cycles):
            if isinstance(want, BurnupCycle):
                assert got.burnup == pytest.approx(want.burnup, rel=1e-12)
                assert got.boron == pytest.approx(want.boron, rel=1e-12)
                assert got.power == want.power
            else:
                assert got.duration_days == pytest.approx(want.duration_days, rel=1e-12)
        assert scaled.fuel_temp == base.fuel_temp

    def test_double_burnup_doubles_each_cycle(self):
        inp = reference_input()
        doubled = AssemblyInput(inp.enrichment, 71.44, inp.fuel_temp, inp.boron,
                                inp.cooling_days)
        hist = build_history(reference_history(), doubled)
        assert hist.burnup_cycles[0].burnup == pytest.approx(22.494, rel=1e-12)
        assert hist.burnup_cycles[0].power == 10.9  # powers unchanged

    def test_half_cooling_scales_each_cycle(self):
        inp = reference_input()
        halved = AssemblyInput(inp.enrichment, inp.burnup, inp.fuel_temp, inp.boron, 1034.0)
        hist = build_history(reference_history(), halved)
        durations = [c.duration_days for c in hist.cooling_cycles]
        assert durations == pytest.approx([42.5, 28.0, 963.5], rel=1e-12)

    def test_totals_match_requested_input(self):
        target = AssemblyInput(4.2, 55.0, 820.0, 640.0, 311.0)
        hist = build_history(reference_history(), target)
        assert hist.total_burnup == pytest.approx(target.burnup, rel=1e-12)
        assert hist.total_cooling_days == pytest.approx(target.cooling_days, rel=1e-12)
        assert hist.mean_boron == pytest.approx(target.boron, rel=1e-12)
        assert hist.fuel_temp == target.fuel_temp

    def test_degenerate_base_rejected(self):
        # a base whose invariants hold but with pathological totals is not
        # constructible through the public types, so exercise the guard on
        # the computed properties via a monkeypatched stand-in
        class Degenerate:
            total_burnup = 0.0
            total_cooling_days = 100.0
            mean_boron = 300.0
            cycles = ()
            fuel_temp = 800.0

        with pytest.raises(HistoryError, match="degenerate"):
            build_history(Degenerate(), reference_input())
