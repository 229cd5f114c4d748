import numpy as np
import pytest

from vlsvitals.config import RunConfig
from vlsvitals.errors import ValidationError
from vlsvitals.experiments import (
    SweepSpec,
    monte_carlo,
    position_grid,
    recovery_config,
    run_sweep,
    simulate,
    track_rates,
    tracking_hit_rate,
)
from vlsvitals.dsp import estimate_vitals
from vlsvitals.metrics import VitalKind

NOISY = RunConfig().update("noise", noise_std_w=1e-13)


class TestSimulate:
    def test_seeded_noise_repeats(self):
        a, b = simulate(NOISY, seed=3), simulate(NOISY, seed=3)
        assert a == b
        assert not np.array_equal(a.samples, simulate(NOISY, seed=4).samples)


class TestSweeps:
    def test_distance_power_decreases(self):
        rows = run_sweep(SweepSpec("distance", (1.2, 0.3, 0.6), trials=2), NOISY)
        assert [r["value"] for r in rows] == [0.3, 0.6, 1.2]
        powers = [r["mean_power_w"] for r in rows]
        assert powers[0] > powers[1] > powers[2]

    def test_window_variance_non_increasing(self):
        run = NOISY.update("pipeline", confidence_threshold=0.0).update("noise", noise_std_w=0.0, snr_db=20.0)
        rows = run_sweep(SweepSpec("window_size", (512, 1024, 2048), trials=3), run)
        for key in ("breathing_variance_bpm2", "heart_variance_bpm2"):
            values = [r[key] for r in rows]
            assert all(b <= a for a, b in zip(values, values[1:]))

    def test_common_random_numbers(self):
        spec = SweepSpec("snr", (10.0, 20.0), trials=2, seed_base=5)
        assert run_sweep(spec, RunConfig()) == run_sweep(spec, RunConfig())

    def test_bad_specs(self):
        with pytest.raises(ValidationError):
            SweepSpec("colour", (1.0,))
        with pytest.raises(ValidationError):
            SweepSpec("distance", ())
        with pytest.raises(ValidationError):
            SweepSpec("position")
        with pytest.raises(ValidationError):
            run_sweep(SweepSpec("window_size", (1000.5,), trials=1))


class TestPositionGrid:
    def test_peak_at_nearest_boresight_point(self):
        spec = SweepSpec("position", trials=1, grid_x=(-0.4, 0.4, 5), grid_y=(0.2, 1.0, 3))
        rows = position_grid(spec, RunConfig())
        best = max(rows, key=lambda r: r["mean_power_w"])
        assert (best["x_m"], best["y_m"]) == (0.0, 0.2)

    def test_out_of_view_points(self):
        spec = SweepSpec("position", trials=1, grid_x=(0.5, 0.5, 1), grid_y=(0.2, 0.2, 1))
        (row,) = position_grid(spec, RunConfig())
        # atan(0.5 / 0.2) is about 68 degrees, outside the 60 degree half-angle.
        assert row["in_fov"] is False and row["mean_power_w"] == 0.0
        assert row["heart_error_pct"] is None


class TestMonteCarlo:
    def test_rates_in_range_and_reproducible(self):
        reports = monte_carlo(RunConfig(), 4, seed_base=11)
        again = monte_carlo(RunConfig(), 4, seed_base=11)
        assert [r.reference_bpm for r in reports] == [r.reference_bpm for r in again]
        for r in reports:
            assert 12.0 <= r.reference_bpm[VitalKind.BREATHING] <= 20.0
            assert 60.0 <= r.reference_bpm[VitalKind.HEART] <= 100.0


class TestTracking:
    def test_recovery_scenario_tracks(self):
        run = recovery_config()
        trace = simulate(run)
        assert len(trace) == 90000
        cfg = run.pipeline_config()
        points = track_rates(estimate_vitals(trace, cfg), run.motion(), cfg.sampling_rate, cfg.window_size)
        tol = 2 * (cfg.sampling_rate / cfg.window_size * 60)
        assert tracking_hit_rate(points, tol, VitalKind.BREATHING) >= 0.9
        assert tracking_hit_rate(points, tol, VitalKind.HEART) >= 0.9
        # Window 0 is centred at 1024 / 100 = 10.24 s on the linear ramp.
        first = {p.kind: p.scheduled_bpm for p in points if p.window == 0}
        assert first[VitalKind.BREATHING] == pytest.approx(30.0 - 18.0 * 10.24 / 900)
        assert first[VitalKind.HEART] == pytest.approx(120.0 - 50.0 * 10.24 / 900)

    def test_empty_points(self):
        with pytest.raises(ValidationError):
            tracking_hit_rate([], 1.0)
