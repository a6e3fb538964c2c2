import csv
import json
import logging
import math
from logging.handlers import RotatingFileHandler

import pytest

from main import main, setup_logging


@pytest.fixture
def run_config(tmp_path):
    """Config file keeping logs and artifacts under tmp_path with small tables."""
    path = tmp_path / "run.yaml"
    path.write_text(
        "dim: 2\n"
        "output:\n"
        f"  directory: '{tmp_path}'\n"
        "  kernel_pairs: 16\n"
        "  slice:\n"
        "    radius: 1.0\n"
        "    points: 3\n"
        "logging:\n"
        f"  log_file_path: '{tmp_path / 'cstft.log'}'\n"
        "  console_output: false\n",
        encoding="utf-8",
    )
    return str(path)


def _rows(path):
    with open(path, encoding="utf-8") as handle:
        return list(csv.DictReader(handle))


def test_odd_dimension_exits_with_configuration_status(run_config, capsys):
    with pytest.raises(SystemExit) as info:
        main(["kernel-table", "--config", run_config, "--dim", "5"])
    assert info.value.code == 2
    assert "only even d >= 2" in capsys.readouterr().err


def test_missing_config_file_exits_with_configuration_status(tmp_path):
    with pytest.raises(SystemExit) as info:
        main(["kernel-table", "--config", str(tmp_path / "absent.yaml")])
    assert info.value.code == 2


def test_kernel_table_in_the_plane(run_config, tmp_path):
    out = tmp_path / "kernel.csv"
    assert main(["kernel-table", "--config", run_config, "--out", str(out)]) == 0
    rows = _rows(out)
    assert len(rows) == 16
    assert list(rows[0]) == ["x1", "x2", "y1", "y2", "closed_s", "closed_e1_2", "series_s", "series_e1_2",
                             "abs_deviation"]
    for row in rows:
        x1, x2, y1, y2 = (float(row[k]) for k in ("x1", "x2", "y1", "y2"))
        wedge = x1 * y2 - x2 * y1
        assert float(row["closed_s"]) == pytest.approx(math.cos(wedge), abs=1e-12)
        assert float(row["closed_e1_2"]) == pytest.approx(math.sin(wedge), abs=1e-12)
        assert row["series_s"] == "" and row["abs_deviation"] == ""


def test_kernel_table_series_agrees_in_four_dimensions(run_config, tmp_path):
    out = tmp_path / "kernel4.csv"
    assert main(["kernel-table", "--config", run_config, "--dim", "4", "--out", str(out)]) == 0
    rows = _rows(out)
    assert len(rows) == 16
    assert max(float(row["abs_deviation"]) for row in rows) < 1e-6


def test_transform_table_of_gaussian(run_config, tmp_path):
    out = tmp_path / "transform.csv"
    assert main(["transform", "--config", run_config, "--out", str(out), "--sign", "+"]) == 0
    rows = _rows(out)
    assert [float(row["omega1"]) for row in rows] == [-1.0, 0.0, 1.0]
    for row in rows:
        assert float(row["s_re"]) == pytest.approx(math.exp(-float(row["omega1"]) ** 2 / 2.0), abs=1e-8)
        assert abs(float(row["e1_2_re"])) < 1e-8


def test_spectrogram_json_lines(run_config, tmp_path, capsys):
    assert main(["spectrogram", "--config", run_config, "--format", "json-lines"]) == 0
    path = capsys.readouterr().out.strip()
    assert path == str(tmp_path / "output" / "spectrogram.jsonl")
    records = [json.loads(line) for line in open(path, encoding="utf-8")]
    assert len(records) == 9
    assert records[4]["modulus"] == pytest.approx(0.5, rel=1e-12)


def test_bad_signal_selector_is_a_configuration_error(run_config):
    assert main(["transform", "--config", run_config, "--signal", "sinc"]) == 2


def test_verify_selected_checks(run_config, tmp_path, capsys):
    out = tmp_path / "report.csv"
    status = main(["verify", "--config", run_config, "--out", str(out), "--only", "kernel_symmetry",
                   "kernel_reflection"])
    assert status == 0
    rows = _rows(out)
    assert [row["check_name"] for row in rows] == ["kernel_symmetry", "kernel_reflection"]
    assert "2 records, 2 assertions, 0 failed" in capsys.readouterr().out


def test_verify_unknown_prefix(run_config):
    assert main(["verify", "--config", run_config, "--only", "no_such_check"]) == 2


def test_setup_logging_sets_only_configured_component_levels(light_config):
    config = light_config.model_copy(update={
        'logging': light_config.logging.model_copy(update={'component_levels': {'app.core.signals': 'ERROR'}}),
    })
    untouched = logging.getLogger('numba').level
    setup_logging(config)
    try:
        assert logging.getLogger('app.core.signals').level == logging.ERROR
        assert logging.getLogger('numba').level == untouched
        assert any(isinstance(h, RotatingFileHandler) for h in logging.getLogger().handlers)
    finally:
        logging.getLogger('app.core.signals').setLevel(logging.NOTSET)
