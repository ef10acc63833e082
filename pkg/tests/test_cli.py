"""Config parsing, validation wording, pipeline artifacts, determinism."""

import json

import numpy as np
import pytest

from levyheat.cli import ExperimentConfig, main, parse_config, run
from levyheat.errors import ConfigError, PipelineError

BASE = """\
[experiment]
name = unit-run
output = {out}
seed = 11

[kernel]
dimension = 1
near = fractional
near_param = 1.0
tail = power
tail_param = 1.0

[grid]
half_width = 64
points = 2048

[flow]
kind = linear
snapshots = 1 1.5 2.3 3.4 5.1 7.7

[initial]
kind = box
width = 2.0
"""


def write_cfg(tmp_path, body=None, **extra_sections):
    text = (body or BASE).format(out=tmp_path / "out")
    for header, lines in extra_sections.items():
        text += f"\n[{header}]\n" + "\n".join(lines) + "\n"
    path = tmp_path / "exp.cfg"
    path.write_text(text)
    return path


# ---------------------------------------------------------------------------
# parsing and validation
# ---------------------------------------------------------------------------


def test_parse_fills_typed_fields(tmp_path):
    cfg = parse_config(write_cfg(tmp_path))
    assert isinstance(cfg, ExperimentConfig)
    assert cfg.name == "unit-run"
    assert cfg.seed == 11
    assert cfg.near == "fractional" and cfg.near_param == 1.0
    assert cfg.snapshots == (1.0, 1.5, 2.3, 3.4, 5.1, 7.7)
    assert cfg.flow == "linear" and cfg.sigma == 1.0


def test_missing_file_is_config_error(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        parse_config(tmp_path / "nope.cfg")


def test_unknown_key_rejected(tmp_path):
    path = write_cfg(tmp_path)
    path.write_text(path.read_text().replace("width = 2.0", "width = 2.0\nwobble = 3"))
    with pytest.raises(ConfigError, match="unknown keys.*wobble"):
        parse_config(path)


def test_unknown_section_rejected(tmp_path):
    with pytest.raises(ConfigError, match="unknown sections"):
        parse_config(write_cfg(tmp_path, plotting=["dpi = 300"]))


def test_missing_required_section(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text("[experiment]\nname = x\n")
    with pytest.raises(ConfigError, match=r"missing required section \[kernel\]"):
        parse_config(path)


def test_kernel_range_error_surfaces_at_validation(tmp_path):
    path = write_cfg(tmp_path)
    path.write_text(path.read_text().replace("near_param = 1.0", "near_param = -1.0"))
    with pytest.raises(ConfigError, match=r"\[kernel\]"):
        parse_config(path)


def test_unordered_snapshots_rejected(tmp_path):
    path = write_cfg(tmp_path)
    path.write_text(path.read_text().replace("1 1.5 2.3 3.4 5.1 7.7", "1 0.5"))
    with pytest.raises(ConfigError, match="strictly increasing"):
        parse_config(path)


def test_sigma_key_on_linear_flow_rejected(tmp_path):
    path = write_cfg(tmp_path)
    path.write_text(path.read_text().replace("kind = linear", "kind = linear\nsigma = 2"))
    with pytest.raises(ConfigError, match="only meaningful for kind = nonlinear"):
        parse_config(path)


def test_interpolation_r_equal_one_cites_open_case(tmp_path):
    path = write_cfg(tmp_path, interpolation=["r = 1.0", "s = 2.0"])
    with pytest.raises(ConfigError, match="open case"):
        parse_config(path)


def test_interpolation_range_checked_against_kernel_order(tmp_path):
    # r = 1.2, s = 1.1 violates r < s
    path = write_cfg(tmp_path, interpolation=["r = 1.2", "s = 1.1"])
    with pytest.raises(ConfigError, match=r"1 < r < s <= 2"):
        parse_config(path)


def test_nonlinear_decay_needs_q_above_sigma_minus_one(tmp_path):
    path = write_cfg(tmp_path, decay=["norms = 2", "q = 1.0"])
    text = path.read_text().replace("kind = linear", "kind = nonlinear\nsigma = 2.0")
    path.write_text(text)
    with pytest.raises(ConfigError, match=r"sigma - 1 < q < p"):
        parse_config(path)


def test_decay_q_must_stay_below_fitted_norm(tmp_path):
    path = write_cfg(tmp_path, decay=["norms = 2", "q = 2.0"])
    with pytest.raises(ConfigError, match="q < p"):
        parse_config(path)


def test_decay_targets_must_align_with_norms(tmp_path):
    path = write_cfg(
        tmp_path, decay=["norms = 2 4", "q = 1", "targets = 0.5", "tolerance = 0.1"]
    )
    with pytest.raises(ConfigError, match="align"):
        parse_config(path)


def test_canonical_hash_ignores_output_directory(tmp_path):
    cfg_a = parse_config(write_cfg(tmp_path))
    other = tmp_path / "elsewhere"
    other.mkdir()
    cfg_b = parse_config(write_cfg(other))
    assert cfg_a.config_hash() == cfg_b.config_hash()


def test_canonical_hash_sees_the_seed(tmp_path):
    cfg = parse_config(write_cfg(tmp_path))
    from dataclasses import replace

    assert cfg.config_hash() != replace(cfg, seed=12).config_hash()


# ---------------------------------------------------------------------------
# pipeline artifacts
# ---------------------------------------------------------------------------


def test_evolve_writes_fields_norms_manifest(tmp_path):
    path = write_cfg(tmp_path)
    assert main(["evolve", "--config", str(path)]) == 0
    out = tmp_path / "out"
    fields = sorted(p.name for p in out.glob("field_*.csv"))
    assert fields == [f"field_{i:04d}.csv" for i in range(6)]
    manifest = json.loads((out / "manifest.json").read_text())
    # a heavy-tail flow on a 64-wide box reaches the boundary well above
    # the guard threshold; the manifest must say so honestly
    assert manifest["escape_guard"]["passed"] is False
    assert manifest["escape_guard"]["max_boundary_ratio"] > 1e-6
    assert manifest["tolerances"]["table_rtol"] == 1e-8
    assert set(manifest["artifacts"]) == {"norms.csv", *fields}

    header, *rows = (out / "norms.csv").read_text().splitlines()
    assert header == "t,l1,l2,linf,energy"
    assert len(rows) == 6
    # 17-significant-digit round trip
    parsed = np.loadtxt(out / "norms.csv", delimiter=",", skiprows=1)
    assert np.isfinite(parsed).all() and parsed.shape == (6, 5)


def test_escape_guard_passes_for_compact_kernel(tmp_path):
    body = BASE.replace("near = fractional\nnear_param = 1.0", "near = bounded\nnear_param = 0.7")
    body = body.replace("tail = power\ntail_param = 1.0", "tail = compact")
    path = write_cfg(tmp_path, body=body)
    assert main(["evolve", "--config", str(path)]) == 0
    manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
    assert manifest["escape_guard"]["passed"] is True
    assert manifest["escape_guard"]["max_boundary_ratio"] < 1e-6


def test_decay_fit_report_on_cauchy_flow(tmp_path):
    # wide domain so the periodic wraparound floor does not bend the fit
    body = BASE.replace("half_width = 64", "half_width = 2048").replace(
        "points = 2048", "points = 8192"
    )
    body = body.replace(
        "snapshots = 1 1.5 2.3 3.4 5.1 7.7",
        "snapshots = 1 1.4 2 2.8 3.9 5.4 7.5 10.4 14.4 20",
    )
    path = write_cfg(
        tmp_path,
        body=body,
        decay=["norms = 2", "q = 1", "targets = 0.5", "tolerance = 0.15"],
    )
    assert main(["decay-fit", "--config", str(path)]) == 0
    report = (tmp_path / "out" / "decay_fit.txt").read_text()
    assert "norm_2_within_tolerance = yes" in report, report
    assert "all_within_tolerance = yes" in report
    exponent = float(report.split("norm_2_exponent = ")[1].splitlines()[0])
    assert abs(exponent - 0.5) < 0.075, f"fitted exponent {exponent} far from 1/2"


def test_symbol_writes_closed_form_table(tmp_path):
    path = write_cfg(tmp_path)
    assert main(["symbol", "--config", str(path)]) == 0
    table = np.loadtxt(tmp_path / "out" / "table.csv", delimiter=",", skiprows=1)
    xi, m = table[:, 0], table[:, 1]
    assert np.allclose(m, np.pi * xi, rtol=1e-10), "alpha = 1 table should be pi xi"


def test_nash_check_rows_and_branches(tmp_path):
    body = BASE.replace("half_width = 64", "half_width = 256").replace(
        "points = 2048", "points = 16384"
    )
    path = write_cfg(tmp_path, body=body, nash=["d = 0.3333333333333333", "r = 1.5"])
    assert main(["nash-check", "--config", str(path)]) == 0
    rows = (tmp_path / "out" / "nash_rows.csv").read_text().splitlines()
    assert rows[0] == "sample_id,scale,ratio,branch"
    branches = {line.split(",")[3] for line in rows[1:]}
    assert branches == {"poincare", "nash"}, f"both branches expected, got {branches}"
    summary = (tmp_path / "out" / "nash.txt").read_text()
    assert "passed = yes" in summary


def test_regularity_report_verdicts(tmp_path):
    body = BASE.replace("near = fractional\nnear_param = 1.0", "near = bounded\nnear_param = 0.7")
    body = body.replace("tail = power\ntail_param = 1.0", "tail = compact")
    path = write_cfg(tmp_path, body=body, regularity=["times = 0.5 5"])
    assert main(["regularity", "--config", str(path)]) == 0
    text = (tmp_path / "out" / "regularity.txt").read_text()
    assert text.count("classification = DIVERGENT") == 2, text


def test_seed_override_changes_manifest_and_fields(tmp_path):
    body = BASE.replace("kind = box\nwidth = 2.0", "kind = random\nband = 0.25")
    path = write_cfg(tmp_path, body=body)
    assert main(["evolve", "--config", str(path), "--output", str(tmp_path / "a")]) == 0
    assert (
        main(["evolve", "--config", str(path), "--output", str(tmp_path / "b"), "--seed", "99"])
        == 0
    )
    man_a = json.loads((tmp_path / "a" / "manifest.json").read_text())
    man_b = json.loads((tmp_path / "b" / "manifest.json").read_text())
    assert man_a["seed"] == 11 and man_b["seed"] == 99
    assert man_a["config_sha256"] != man_b["config_sha256"]
    field_a = (tmp_path / "a" / "field_0000.csv").read_text()
    field_b = (tmp_path / "b" / "field_0000.csv").read_text()
    assert field_a != field_b, "different seeds must move the random datum"


def test_outputs_byte_reproducible(tmp_path):
    body = BASE.replace("kind = box\nwidth = 2.0", "kind = random\nband = 0.25")
    path = write_cfg(tmp_path, body=body)
    for sub in ("a", "b"):
        assert main(["evolve", "--config", str(path), "--output", str(tmp_path / sub)]) == 0
    for name in ("manifest.json", "norms.csv", "field_0003.csv"):
        bytes_a = (tmp_path / "a" / name).read_bytes()
        bytes_b = (tmp_path / "b" / name).read_bytes()
        assert bytes_a == bytes_b, f"{name} differs between identical runs"


def test_pipeline_failure_names_stage_and_cleans_up(tmp_path):
    # four snapshots cannot support a five-point decay fit: the analysis
    # stage fails after norms.csv was already written
    path = write_cfg(tmp_path, decay=["norms = 2", "q = 1"])
    text = path.read_text().replace("1 1.5 2.3 3.4 5.1 7.7", "1 2 3 4")
    path.write_text(text)
    cfg = parse_config(path)
    with pytest.raises(PipelineError) as err:
        run(cfg, "decay-fit")
    assert err.value.stage == "analysis"
    leftover = list((tmp_path / "out").glob("*")) if (tmp_path / "out").exists() else []
    assert leftover == [], f"partial outputs not removed: {leftover}"


def test_cli_exit_codes(tmp_path, capsys):
    bad = write_cfg(tmp_path, interpolation=["r = 1.0", "s = 2.0"])
    assert main(["decay-fit", "--config", str(bad)]) == 2
    assert "open case" in capsys.readouterr().err

    path = write_cfg(tmp_path, decay=["norms = 2", "q = 1"])
    path.write_text(path.read_text().replace("1 1.5 2.3 3.4 5.1 7.7", "1 2 3 4"))
    assert main(["decay-fit", "--config", str(path)]) == 3
    assert "stage 'analysis'" in capsys.readouterr().err


def test_verify_subcommand_passes(capsys):
    # the battery is memoized by the acceptance tests in this session,
    # so this mostly re-prints the table
    assert main(["verify"]) == 0
    out = capsys.readouterr().out
    assert "12/12 criteria passed" in out
