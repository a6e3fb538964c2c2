import csv
import json

import pytest

from app.config.config_model import merge_config
from app.verification import (
    REPORT_COLUMNS, CheckRecord, CheckRegistry, VerificationContext, build_registry, run_checks, write_report,
)
from app.verification.records import compare, diagnostic, holds


def _passing(ctx):
    return [compare("passing", "a = a", 0.0, 1e-12, lhs=1.0, rhs=1.0)]


def _raising(ctx):
    raise RuntimeError("boom")


def test_registry_rejects_duplicates():
    registry = CheckRegistry()
    registry.add("one", _passing, "a = a")
    with pytest.raises(ValueError, match="already registered"):
        registry.add("one", _passing, "a = a")


def test_select_by_prefix():
    registry = CheckRegistry()
    for name in ("kernel_a", "kernel_b", "stft_a"):
        registry.add(name, _passing, name)
    assert [c.name for c in registry.select(["kernel"])] == ["kernel_a", "kernel_b"]
    assert [c.name for c in registry.select(["stft_a", "kernel_b"])] == ["kernel_b", "stft_a"]
    assert len(registry.select(None)) == 3


def test_full_registry_names_are_unique():
    registry = build_registry()
    assert len(set(registry.names())) == len(registry)
    assert registry.names()[0] == "kernel_series"


def test_record_helpers():
    assert compare("c", "x", 1e-3, 1e-2).status == 'pass'
    assert compare("c", "x", float("nan"), 1e-2).status == 'fail'
    assert holds("h", "x", False).failed
    info = diagnostic("d", "x", lhs=1 + 2j)
    assert info.status == 'info' and info.lhs == 1.0
    assert not info.failed


def test_exceptions_become_failed_records(light_config):
    registry = CheckRegistry()
    registry.add("broken", _raising, "never")
    registry.add("broken_diagnostic", _raising, "never", kind='diagnostic')
    registry.add("passing", _passing, "a = a")
    records = run_checks(registry, VerificationContext(light_config))
    assert [r.check_name for r in records] == ["broken", "broken_diagnostic", "passing"]
    assert records[0].failed and "RuntimeError: boom" in records[0].detail
    assert records[1].status == 'info' and not records[1].failed
    assert records[2].status == 'pass'


def test_report_is_deterministic(tmp_path):
    records = [
        CheckRecord(check_name="a", anchor="x = y", kind='assertion', lhs=0.1, rhs=0.30000000000000004,
                    error=1e-17, tolerance=1e-12, status='pass'),
        CheckRecord(check_name="b", anchor="bound", kind='diagnostic', status='info', detail="text, with comma"),
    ]
    first = write_report(records, str(tmp_path / "one" / "report.csv"))
    second = write_report(records, str(tmp_path / "two" / "report.csv"))
    content = open(first, encoding="utf-8").read()
    assert content == open(second, encoding="utf-8").read()
    rows = list(csv.reader(content.splitlines()))
    assert tuple(rows[0]) == REPORT_COLUMNS
    assert rows[1][4] == "0.30000000000000004"
    assert rows[2][3] == ""


def test_json_lines_report(tmp_path):
    record = CheckRecord(check_name="a", anchor="K₋(0, y) = 1", kind='assertion', error=0.0, tolerance=1e-12,
                         status='pass')
    path = write_report([record], str(tmp_path / "report.jsonl"), 'json-lines')
    parsed = json.loads(open(path, encoding="utf-8").read())
    assert list(parsed) == list(REPORT_COLUMNS)
    assert parsed["anchor"] == "K₋(0, y) = 1"


def test_selected_suite_passes_in_the_plane(light_config):
    config = light_config.model_copy(update={'algebra': light_config.algebra.model_copy(update={'dim': 2})})
    only = ["kernel_symmetry", "kernel_reflection", "kernel_plus", "kernel_additivity_d2", "stft_gaussian_origin"]
    records = run_checks(build_registry(), VerificationContext(config), only=only)
    assert [r.check_name for r in records] == only
    assert all(r.status == 'pass' for r in records), [(r.check_name, r.detail) for r in records]


def test_interchange_sides_are_computed_independently(light_config):
    config = merge_config(light_config, {
        'algebra': {'dim': 2},
        'grids': {'nested_outer': {'scheme': 'hermite', 'nodes_per_axis': 16, 'scale': 1.0},
                  'nested_inner': {'scheme': 'hermite', 'nodes_per_axis': 32, 'scale': 1.0}},
    })
    [record] = run_checks(build_registry(), VerificationContext(config), only=["interchange"])
    assert record.check_name == "interchange_modulated_translated"
    assert record.status == 'pass', record.detail
    assert 0.0 < record.error < 1e-3
