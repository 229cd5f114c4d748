import dataclasses

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vlsvitals.config import RunConfig, config_from_text, config_to_text, load_config, save_config
from vlsvitals.dsp import PipelineConfig
from vlsvitals.errors import ConfigError, TraceIOError, ValidationError


class TestDefaults:
    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.ini"
        path.write_text("")
        assert load_config(path) == RunConfig()
        assert load_config(None) == RunConfig()

    def test_default_pipeline_matches(self):
        cfg = RunConfig().pipeline_config()
        ref = PipelineConfig()
        assert (cfg.window_size, cfg.sampling_rate, cfg.confidence_threshold) == (2048, 100.0, 10.0)
        assert cfg.breathing_band == ref.breathing_band and cfg.heart_band == ref.heart_band

    def test_default_models(self):
        run = RunConfig()
        motion = run.motion()
        assert motion.breathing_rate == 0.25 and motion.heartbeat_rate == 1.2
        assert run.channel_model().path_loss_exponent == 3.238


class TestRoundTrip:
    def test_save_load(self, tmp_path):
        run = RunConfig().update("subject", rate_schedule=((0.0, 30.0, 120.0), (900.0, 12.0, 70.0)))
        run = run.update("noise", snr_db=20.0, interference=((50.0, 1e-12),))
        run = run.update("simulation", position_x_m=0.1, position_y_m=0.5)
        path = tmp_path / "run.ini"
        save_config(run, path)
        assert load_config(path) == run
        save_config(load_config(path), tmp_path / "again.ini")
        assert path.read_bytes() == (tmp_path / "again.ini").read_bytes()

    def test_every_key_written(self):
        text = config_to_text(RunConfig())
        for section in dataclasses.fields(RunConfig):
            for f in dataclasses.fields(getattr(RunConfig(), section.name)):
                assert f"{f.name} =" in text

    @settings(max_examples=30, deadline=None)
    @given(
        st.integers(6, 13),
        st.floats(0.0, 0.9),
        st.floats(5.0, 25.0),
        st.floats(60.0, 190.0),
        st.floats(0.2, 2.0),
        st.one_of(st.none(), st.floats(-10.0, 40.0)),
        st.integers(0, 2**31),
    )
    def test_arbitrary(self, log_n, overlap, low, high, distance, snr, seed):
        run = (
            RunConfig()
            .update("pipeline", window_size=2**log_n, window_overlap=overlap, breathing_low_bpm=low, heart_high_bpm=high)
            .update("subject", rest_distance_m=distance)
            .update("noise", snr_db=snr, seed=seed)
        )
        assert config_from_text(config_to_text(run)) == run


class TestValidation:
    def test_inverted_band(self):
        with pytest.raises(ValidationError):
            config_from_text("[pipeline]\nheart_low_bpm = 200\nheart_high_bpm = 30\n")

    def test_unknown_keys_listed(self):
        with pytest.raises(ConfigError) as info:
            config_from_text("[pipeline]\nwindow = 4\n[extra]\n[noise]\nsnr = 3\n")
        message = str(info.value)
        for name in ("pipeline.window", "[extra]", "noise.snr"):
            assert name in message

    def test_non_strict_ignores_unknown(self):
        assert config_from_text("[pipeline]\nwindow = 4\n", strict=False) == RunConfig()

    @pytest.mark.parametrize(
        "text",
        [
            "[pipeline]\nwindow_size = 1000\n",
            "[pipeline]\nwindow_size = abc\n",
            "[pipeline]\nfilter = fancy\n",
            "[pipeline]\nremove_mean = maybe\n",
            "[subject]\nrate_schedule = 0:15\n",
            "[sweep]\nparameter = color\n",
            "[sweep]\ntrials = 0\n",
            "[noise]\nsnr_db = 10\nnoise_std_w = 1e-9\n",
            "[adc]\nsampling_rate = 5\n",
            "format_version = 7\n",
            "[simulation]\nposition_x_m = 0.1\n",
        ],
    )
    def test_rejects(self, text):
        with pytest.raises(ValidationError):
            config_from_text(text)

    def test_preset_filters_load_but_need_override(self):
        run = config_from_text("[pipeline]\nfilter = paper\n")
        with pytest.raises(ArithmeticError):
            run.pipeline_config()
        assert run.pipeline_config(allow_unstable=True).heart_filter.stability().verdict == "unstable"

    def test_missing_file(self, tmp_path):
        with pytest.raises(TraceIOError):
            load_config(tmp_path / "nope.ini")
