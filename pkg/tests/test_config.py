"""Tests for solver, sampler and benchmark configuration."""

import pytest
from pydantic import ValidationError

from src.core.config import BenchConfig, RowTotalSpec, SolverConfig, SynthSpec, get_config


class TestSolverConfig:
    def test_defaults(self):
        config = SolverConfig()
        assert config.tol == 1e-10
        assert config.max_iters == 1000
        assert config.method == "newton-compressed"
        assert config.init == "ones"
        assert config.is_compressed

    def test_environment_fallback(self, monkeypatch):
        monkeypatch.setenv("FASTDM_TOL", "1e-6")
        monkeypatch.setenv("FASTDM_METHOD", "fp-naive")
        config = get_config()
        assert config.tol == 1e-6
        assert config.method == "fp-naive"
        assert not config.is_compressed

    def test_explicit_value_beats_environment(self, monkeypatch):
        monkeypatch.setenv("FASTDM_MAX_ITERS", "5")
        assert SolverConfig(max_iters=50).max_iters == 50

    def test_init_alpha_implies_custom(self):
        config = SolverConfig(init_alpha="1.5, 2,0.5")
        assert config.init == "custom"
        assert config.init_alpha == [1.5, 2.0, 0.5]

    def test_caller_dict_is_not_mutated(self):
        values = {"init_alpha": [1.0, 2.0]}
        SolverConfig(**values)
        SolverConfig.model_validate(values)
        assert values == {"init_alpha": [1.0, 2.0]}

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"tol": 0.0},
            {"max_iters": 0},
            {"shards": 0},
            {"method": "gradient-descent"},
            {"init": "custom"},
            {"init_alpha": [1.0, -1.0]},
            {"init_alpha": [2.0]},
            {"alpha_floor": 10.0, "alpha_cap": 1.0},
            {"log_level": "LOUD"},
        ],
    )
    def test_rejects(self, kwargs):
        with pytest.raises(ValidationError):
            SolverConfig(**kwargs)

    def test_log_level_is_normalized(self):
        assert SolverConfig(log_level="debug").log_level == "DEBUG"


class TestRowTotalSpec:
    @pytest.mark.parametrize(
        "text,kind",
        [("10", "fixed"), ("uniform:2:9", "uniform"), ("poisson:7.5", "poisson")],
    )
    def test_parse_and_describe(self, text, kind):
        spec = RowTotalSpec.parse(text)
        assert spec.kind == kind
        assert spec.describe() == text

    @pytest.mark.parametrize("text", ["uniform:9:2", "gauss:3", "uniform:1", "-4"])
    def test_rejects(self, text):
        with pytest.raises(ValueError):
            RowTotalSpec.parse(text)


class TestSynthSpec:
    def test_string_fields(self):
        spec = SynthSpec(alpha="3,1,2", n_rows=100, row_total="poisson:4")
        assert spec.alpha == [3.0, 1.0, 2.0]
        assert spec.row_total.kind == "poisson"

    def test_int_row_total(self):
        assert SynthSpec(alpha=[1, 1], n_rows=1, row_total=5).row_total.value == 5

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"alpha": [1.0], "n_rows": 5},
            {"alpha": [1.0, 0.0], "n_rows": 5},
            {"alpha": [1.0, 1.0], "n_rows": 0},
            {"alpha": [1.0, 1.0], "n_rows": 5, "seed": -1},
            {"alpha": [1.0, 1.0], "n_rows": 5, "row_total": True},
        ],
    )
    def test_rejects(self, kwargs):
        with pytest.raises(ValidationError):
            SynthSpec(**kwargs)


class TestBenchConfig:
    def test_geometric_points(self):
        assert BenchConfig(sweep="N", start=100, stop=6400).points() == [100, 200, 400, 800, 1600, 3200, 6400]

    def test_points_stop_at_bound(self):
        assert BenchConfig(sweep="M", start=10, stop=50, factor=3).points() == [10, 30]

    def test_rounding_deduplicates(self):
        assert BenchConfig(sweep="K", start=2, stop=4, factor=1.2).points() == [2, 3, 4]

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"sweep": "N", "start": 10, "stop": 5},
            {"sweep": "N", "start": 1, "stop": 5, "factor": 1.0},
            {"sweep": "K", "start": 1, "stop": 8},
            {"sweep": "N", "start": 1, "stop": 5, "methods": ["bogus"]},
            {"sweep": "X", "start": 1, "stop": 5},
        ],
    )
    def test_rejects(self, kwargs):
        with pytest.raises(ValidationError):
            BenchConfig(**kwargs)
