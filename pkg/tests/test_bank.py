"""Note frequencies, band plan, and the 120-filter bank."""

import numpy as np
import pytest

from volterrakit import (
    Band,
    BandPlan,
    SignalSpec,
    band_for_frequency,
    bank_split_recombine,
    build_note_bank,
    default_band_plan,
    default_order_policy,
    generate,
    note_frequency,
)


class TestNoteFrequency:
    def test_reference_notes(self):
        assert note_frequency(0, 0) == pytest.approx(16.35)
        assert note_frequency(9, 4) == pytest.approx(440.0, rel=1e-3)
        assert note_frequency(11, 9) == pytest.approx(15804.0, rel=1e-3)

    def test_octave_doubles(self):
        for octave in range(9):
            assert note_frequency(3, octave + 1) == pytest.approx(
                2 * note_frequency(3, octave), rel=1e-12
            )

    def test_range_validation(self):
        with pytest.raises(ValueError):
            note_frequency(12, 0)
        with pytest.raises(ValueError):
            note_frequency(0, 10)
        with pytest.raises(ValueError):
            note_frequency(-1, 3)


class TestBandPlan:
    def test_default_plan_is_ordered_and_fast_enough(self):
        plan = default_band_plan()
        assert len(plan.bands) == 5
        covered = set()
        previous_top = -1.0
        for band in plan.bands:
            assert band.f_min > previous_top  # disjoint, ascending
            assert band.sample_rate > 2 * band.f_max
            previous_top = band.f_max
            covered.update(band.octaves)
        assert covered == set(range(10))

    def test_band_for_frequency_containment_and_gaps(self):
        plan = default_band_plan()
        assert band_for_frequency(plan, 30.0) == 0
        assert band_for_frequency(plan, 100.0) == 1
        assert band_for_frequency(plan, 500.0) == 2
        # 63 Hz falls in the gap between bands 0 and 1; nearest edge wins.
        assert band_for_frequency(plan, 63.0) in (0, 1)

    def test_plan_validation(self):
        with pytest.raises(ValueError):
            BandPlan((
                Band(0.0, 100.0, (0, 1), 300.0),
                Band(50.0, 200.0, (2, 3), 700.0),  # overlaps
            ))
        with pytest.raises(ValueError):
            BandPlan((Band(0.0, 200.0, (0, 1), 300.0),))  # rate too low


class TestOrderPolicy:
    def test_orders_shrink_with_frequency(self):
        lo_order, lo_trans = default_order_policy(30.0)
        mid_order, mid_trans = default_order_policy(1000.0)
        hi_order, hi_trans = default_order_policy(8000.0)
        assert lo_order > mid_order > hi_order
        assert lo_trans < mid_trans < hi_trans
        assert lo_order <= 100  # the bank's order budget


@pytest.fixture(scope="module")
def bank():
    return build_note_bank()


class TestNoteBank:
    def test_has_120_flagged_entries(self, bank):
        assert len(bank.entries) == 120
        for entry in bank.entries:
            assert entry.filter.sample_rate == bank.plan.bands[entry.band_index].sample_rate
            assert isinstance(entry.meets_stopband_spec, bool)

    def test_entries_follow_octave_pairing(self, bank):
        for entry in bank.entries:
            assert entry.octave in bank.plan.bands[entry.band_index].octaves

    def test_single_tone_recombines_cleanly_up_to_gain(self, bank):
        """One tone leaks through many neighboring passbands (the mandated
        orders leave wide mainlobes), so the recombined sum is an inflated
        but still clean copy: large best_scale, near-zero residual."""
        tone = generate(SignalSpec("sine", (note_frequency(9, 4),), 1.0), 44100.0)
        _, fit = bank_split_recombine(bank, tone)
        assert fit.residual_power_fraction < 0.05
        assert fit.best_scale > 1.5

    def test_multisine_recombines_poorly(self, bank):
        """Overlapping 4%-wide passbands cannot reassemble a dense
        multisine; the residual stays far above a faithful split."""
        probe = generate(
            SignalSpec("multisine", (30.0, 60.0, 90.0, 120.0, 150.0), 1.2, amplitude=0.8),
            44100.0,
        )
        _, fit = bank_split_recombine(bank, probe)
        assert fit.residual_power_fraction > 0.10

    def test_gain_vector_validated(self, bank):
        tone = generate(SignalSpec("sine", (440.0,), 0.2), 44100.0)
        with pytest.raises(ValueError):
            bank_split_recombine(bank, tone, gains=np.ones(7))

    def test_rate_must_divide(self, bank):
        tone = generate(SignalSpec("sine", (440.0,), 0.2), 44000.0)
        with pytest.raises(ValueError):
            bank_split_recombine(bank, tone)
