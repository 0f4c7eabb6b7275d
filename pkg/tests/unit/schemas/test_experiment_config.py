"""
Experiment Config Unit Tests

테스트 대상: schemas/experiment.py
- ExperimentConfig: 기본값, 검증, fingerprint
- load_experiment_config(): TOML / JSON 파일 + override 병합
"""

import pytest

from exceptions.error_messages import ErrorMessage
from exceptions.exceptions import AppException
from schemas.cost import Metric
from schemas.experiment import Direction, ExperimentConfig, load_experiment_config
from schemas.spectra import Representation
from schemas.transport import Solver


class TestExperimentConfig:
    """ExperimentConfig 테스트"""

    def test_기본값(self):
        config = ExperimentConfig()

        assert config.dataset == "mnist"
        assert config.representations == [Representation.RAW, Representation.BISPECTRAL]
        assert config.metrics == [Metric.L1]
        assert config.solver == Solver.SINKHORN
        assert config.direction == Direction.ROTATED_TO_UNROTATED
        assert config.epsilons == [0.01]
        assert not config.baseline

    def test_epsilon_sweep(self):
        config = ExperimentConfig(epsilon=0.5, epsilon_sweep=[0.1, 0.01])

        assert config.epsilons == [0.1, 0.01]

    def test_중복_표현_제거(self):
        config = ExperimentConfig(representations=["raw", "power", "raw"])

        assert config.representations == [Representation.RAW, Representation.POWER]

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"epsilon": 0.0},
            {"epsilon_sweep": [0.1, -1.0]},
            {"representations": []},
            {"metrics": ["chebyshev"]},
            {"angular_bins": 1},
            {"unknown_field": 1},
        ],
    )
    def test_잘못된_값(self, kwargs):
        with pytest.raises(ValueError):
            ExperimentConfig(**kwargs)

    def test_fingerprint_는_출력_위치_무관(self):
        a = ExperimentConfig(output_dir="runs/a", threads=1)
        b = ExperimentConfig(output_dir="runs/b", threads=8)

        assert a.fingerprint() == b.fingerprint()
        assert a.fingerprint() != ExperimentConfig(split_seed=1).fingerprint()


class TestLoadExperimentConfig:
    """설정 파일 로드 테스트"""

    def test_toml_섹션_평탄화(self, tmp_path):
        path = tmp_path / "exp.toml"
        path.write_text(
            'dataset = "kmnist"\n'
            "[features]\n"
            "angular_bins = 12\n"
            'representations = ["bispectral"]\n'
            "[transport]\n"
            'metrics = ["L2", "cosine"]\n'
            "epsilon = 0.05\n",
            encoding="utf-8",
        )

        config = load_experiment_config(path)

        assert config.dataset == "kmnist"
        assert config.angular_bins == 12
        assert config.metrics == [Metric.L2, Metric.COSINE]
        assert config.epsilon == 0.05

    def test_json_파일과_override(self, tmp_path):
        """override 가 우선, None override 는 무시"""
        path = tmp_path / "config.json"
        path.write_text(ExperimentConfig(per_class=50).model_dump_json(), encoding="utf-8")

        config = load_experiment_config(path, {"per_class": 10, "dataset": None})

        assert config.per_class == 10
        assert config.dataset == "mnist"

    def test_파일_없음_에러(self, tmp_path):
        with pytest.raises(AppException) as exc_info:
            load_experiment_config(tmp_path / "missing.toml")

        assert exc_info.value.error == ErrorMessage.ARTIFACT_NOT_FOUND

    def test_문법_오류_에러(self, tmp_path):
        path = tmp_path / "broken.toml"
        path.write_text("dataset = \n", encoding="utf-8")

        with pytest.raises(AppException) as exc_info:
            load_experiment_config(path)

        assert exc_info.value.error == ErrorMessage.CONFIG_INVALID

    def test_검증_실패는_입력_오류(self):
        with pytest.raises(AppException) as exc_info:
            load_experiment_config(overrides={"epsilon": -0.1})

        assert exc_info.value.error == ErrorMessage.CONFIG_INVALID
        assert exc_info.value.exit_code == 1
