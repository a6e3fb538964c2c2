from pathlib import Path

import pytest
from pydantic import ValidationError

from app.config.config_model import (
    AppConfig, RuntimeSettings, ToleranceModel, apply_runtime_settings, get_config_schema, load_config_from_yaml,
    merge_config, nest_flat_keys,
)


@pytest.mark.parametrize("dim", [0, 3, 5])
def test_odd_or_small_dimension_is_rejected(dim):
    with pytest.raises(ValidationError, match="only even d >= 2"):
        AppConfig(algebra={'dim': dim})


def test_flat_keys_fan_out():
    nested = nest_flat_keys({'dim': 2, 'grid-n': 9, 'tol': 1e-3, 'window': {'sigma': 2.0}})
    assert nested['algebra'] == {'dim': 2}
    assert nested['grids']['transform']['nodes_per_axis'] == 9
    assert nested['grids']['stft']['nodes_per_axis'] == 9
    assert nested['tolerances'] == {'tol': 1e-3}
    assert nested['window'] == {'sigma': 2.0}


def test_unknown_key_is_rejected():
    with pytest.raises(ValueError, match="unknown configuration key"):
        nest_flat_keys({'dimension': 4})


def test_merge_keeps_untouched_sections():
    base = AppConfig(qmc={'seed': 3})
    merged = merge_config(base, {'dim': 2, 'grids': {'stft': {'nodes_per_axis': 8}}})
    assert merged.algebra.dim == 2
    assert merged.qmc.seed == 3
    assert merged.grids.stft.nodes_per_axis == 8
    assert merged.grids.stft.scale == base.grids.stft.scale
    assert base.algebra.dim == 4


def test_yaml_layers_on_base(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text("dim: 6\nqmc:\n  count: 2048\n", encoding="utf-8")
    config = load_config_from_yaml(str(path), AppConfig(window={'sigma': 0.5}))
    assert config.algebra.dim == 6
    assert config.qmc.count == 2048
    assert config.window.sigma == 0.5


def test_empty_yaml_gives_defaults(tmp_path):
    path = tmp_path / "empty.yaml"
    path.write_text("", encoding="utf-8")
    assert load_config_from_yaml(str(path)) == AppConfig()


def test_yaml_must_be_a_mapping(tmp_path):
    path = tmp_path / "list.yaml"
    path.write_text("- 1\n- 2\n", encoding="utf-8")
    with pytest.raises(ValueError):
        load_config_from_yaml(str(path))


def test_shipped_config_loads():
    config = load_config_from_yaml(str(Path(__file__).parents[1] / "app" / "config" / "config.yaml"))
    assert config.algebra.dim == 4


def test_million_sample_profile_layers_on_the_shipped_config():
    config_dir = Path(__file__).parents[1] / "app" / "config"
    base = load_config_from_yaml(str(config_dir / "config.yaml"))
    config = load_config_from_yaml(str(config_dir / "profiles" / "orthogonality_1e6.yaml"), base)
    assert config.qmc.count == 1_000_000
    assert config.verify.only == ["orthogonality"]
    assert config.algebra.dim == 4
    assert config.qmc.seed == base.qmc.seed


def test_extra_fields_are_forbidden():
    with pytest.raises(ValidationError):
        AppConfig(colour='blue')


def test_global_tolerance_override():
    assert ToleranceModel().get('eigen') == 1e-6
    assert ToleranceModel(tol=1e-3).get('eigen') == 1e-3


def test_runtime_settings_override(tmp_path):
    settings = RuntimeSettings(log_level="debug", output_dir=str(tmp_path), workers=3, _env_file=None)
    config = apply_runtime_settings(AppConfig(), settings)
    assert config.logging.level == "DEBUG"
    assert config.output.directory == str(tmp_path)
    assert config.runtime.workers == 3
    unchanged = AppConfig()
    assert apply_runtime_settings(unchanged, RuntimeSettings(_env_file=None)) is unchanged


def test_runtime_settings_from_environment(monkeypatch):
    monkeypatch.setenv("CSTFT_WORKERS", "2")
    assert RuntimeSettings(_env_file=None).workers == 2


def test_schema_lists_sections():
    assert {'algebra', 'grids', 'qmc', 'logging'} <= set(get_config_schema()['properties'])
