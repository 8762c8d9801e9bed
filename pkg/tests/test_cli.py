import io
import json
from pathlib import Path

import numpy as np
import pytest

import main
from cli import commands
from cli.commands import EXIT_NUMERICAL, EXIT_OK, EXIT_VALIDATION, run
from cli.config import RunConfig, Tolerances
from cli.exporters import companion_path, export_table
from spectral.errors import ConventionError
from spectral.models import PolyTable


def _config(data_dir, command, *graphs, **kwargs):
    return RunConfig(command=command, graphs=[str(data_dir / f"{g}.json") for g in graphs],
                     workers=1, **kwargs)


def test_solve_interval_writes_integer_spectrum(data_dir, tmp_path):
    out = tmp_path / "interval.csv"
    config = _config(data_dir, "solve", "interval", k_min=0.5, k_max=5.5, out=str(out))
    assert run(config) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == "k,multiplicity,residual"
    rows = [line.split(",") for line in lines[1:]]
    assert [float(r[0]) for r in rows] == pytest.approx([1.0, 2.0, 3.0, 4.0, 5.0], abs=1e-9)
    assert all(r[1] == "1" for r in rows)


def test_solve_report_carries_weyl_and_config(data_dir, tmp_path):
    out = tmp_path / "interval.json"
    config = _config(data_dir, "solve", "interval", k_min=0.5, k_max=5.5, out=str(out),
                     format="report")
    assert run(config) == EXIT_OK
    document = json.loads(out.read_text())
    assert document["report"]["weyl"]["count"] == 5
    assert document["config"]["tolerances"]["classify"] == Tolerances().classify


def test_identical_configs_give_identical_files(data_dir, tmp_path):
    texts = []
    for name in ("a.csv", "b.csv"):
        out = tmp_path / name
        assert run(_config(data_dir, "solve", "star3", k_max=20.0, out=str(out))) == EXIT_OK
        texts.append(out.read_bytes())
    assert texts[0] == texts[1]


def test_solve_rejects_degree_two_vertex(data_dir):
    stream = io.StringIO()
    assert run(_config(data_dir, "solve", "cycle2"), stream=stream) == EXIT_VALIDATION
    assert "Assumption violated" in stream.getvalue()


def test_missing_graph_file(tmp_path):
    config = RunConfig(command="info", graphs=[str(tmp_path / "nope.json")])
    assert run(config, stream=io.StringIO()) == EXIT_VALIDATION


def test_numerical_failure_exit_status(data_dir, monkeypatch):
    def broken(*args, **kwargs):
        raise ConventionError("scattering convention error: forced")

    monkeypatch.setattr(commands, "build_bond_scattering", broken)
    stream = io.StringIO()
    assert run(_config(data_dir, "solve", "star3"), stream=stream) == EXIT_NUMERICAL
    assert "convention" in stream.getvalue()


def test_trace_at_index(data_dir, tmp_path):
    out = tmp_path / "trace.csv"
    config = _config(data_dir, "trace", "interval", k_min=0.5, k_max=5.5, index=0, out=str(out))
    assert run(config) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0].startswith("k,1,z,")
    assert lines[2] == "edge_id,A_re,A_im,B_re,B_im,C_re,C_im,D_re,D_im"
    assert lines[3].startswith("0,0.7071067")


def test_trace_report_at_k(data_dir, tmp_path):
    out = tmp_path / "trace.json"
    config = _config(data_dir, "trace", "interval", k=2.0, out=str(out), format="report")
    assert run(config) == EXIT_OK
    report = json.loads(out.read_text())["report"]
    assert report["multiplicity"] == 1
    assert report["regularity"] == "regular"
    assert report["traces"][0]["nonvanishing"]


def test_trace_off_spectrum_is_rejected(data_dir):
    config = _config(data_dir, "trace", "interval", k=1.5)
    assert run(config, stream=io.StringIO()) == EXIT_VALIDATION


def test_verify_factor_and_expand(data_dir, tmp_path):
    out = tmp_path / "factor.json"
    assert run(_config(data_dir, "verify-factor", "mandarin3", samples=500, out=str(out))) == EXIT_OK
    report = json.loads(out.read_text())["report"]
    assert report["mandarin_deviation"] <= 1e-8

    table = tmp_path / "table.json"
    assert run(_config(data_dir, "expand", "lasso", out=str(table))) == EXIT_OK
    assert json.loads(table.read_text())["n_edges"] == 2


def test_compare_mandarin_and_flower(data_dir, tmp_path):
    out = tmp_path / "compare.json"
    config = _config(data_dir, "compare", "mandarin3", "flower3", k_max=1500.0, out=str(out),
                     lengths=(1.0, 2 ** 0.5, 3 ** 0.5))
    assert run(config) == EXIT_OK
    report = json.loads(out.read_text())["report"]
    assert 0.45 <= report["fraction"] <= 0.55


def test_density_command(data_dir, tmp_path):
    out = tmp_path / "density.json"
    config = _config(data_dir, "density", "lasso", k_max=200.0, property="loop_supported",
                     seed=3, out=str(out))
    assert run(config) == EXIT_OK
    report = json.loads(out.read_text())["report"]
    assert report["property"] == "loop_supported"
    assert report["seed"] == 3
    assert report["count"] > 0


def test_info_command(data_dir, capsys):
    assert run(_config(data_dir, "info", "cycle2")) == EXIT_OK
    report = json.loads(capsys.readouterr().out)["report"]
    assert not report["class"]["satisfies_assumption"]


def test_help_lists_default_tolerances():
    text = main.build_parser().format_help()
    for name in ("onmanifold", "singular", "classify", "nonvanishing", "support", "match"):
        assert name in text


def test_arguments_become_run_config(data_dir):
    args = main.build_parser().parse_args(
        ["solve", str(data_dir / "star3.json"), "--kmax", "12", "--lengths", "1,2,3",
         "--tol-match", "1e-9"])
    config = main.config_from_args(args)
    assert config.k_max == 12.0
    assert config.lengths == (1.0, 2.0, 3.0)
    assert config.tolerances.match == 1e-9


def test_unknown_command_is_rejected():
    with pytest.raises(ValueError):
        RunConfig(command="plot")


def test_solve_csv_includes_k_max_and_writes_companion_report(data_dir, tmp_path):
    out = tmp_path / "interval.csv"
    config = _config(data_dir, "solve", "interval", k_min=1.0, k_max=5.0, out=str(out))
    assert run(config) == EXIT_OK
    rows = [line.split(",") for line in out.read_text().splitlines()[1:]]
    assert [float(r[0]) for r in rows] == pytest.approx([2.0, 3.0, 4.0, 5.0], abs=1e-9)

    document = json.loads((tmp_path / "interval.csv.report.json").read_text())
    assert document["report"]["weyl"]["count"] == 4
    assert document["config"]["tolerances"] == Tolerances().as_dict()


def test_trace_csv_companion_echoes_tolerances(data_dir, tmp_path):
    out = tmp_path / "trace.csv"
    tolerances = Tolerances(classify=3e-7)
    config = _config(data_dir, "trace", "interval", k=2.0, out=str(out), tolerances=tolerances)
    assert run(config) == EXIT_OK
    document = json.loads(Path(companion_path(str(out))).read_text())
    assert document["report"]["regularity"] == "regular"
    assert document["config"]["tolerances"]["classify"] == 3e-7


def test_csv_to_stdout_sends_report_to_error_stream(data_dir, capsys):
    stream = io.StringIO()
    config = _config(data_dir, "solve", "interval", k_min=0.5, k_max=2.5)
    assert run(config, stream=stream) == EXIT_OK
    assert capsys.readouterr().out.startswith("k,multiplicity,residual")
    assert json.loads(stream.getvalue())["report"]["weyl"]["count"] == 2


def test_table_coefficients_use_seventeen_digits():
    table = PolyTable(n_edges=1, coefficients=np.array([1 / 3, 0.0, 0.1 + 0.2j]))
    text = export_table(table)
    assert "0.33333333333333331" in text
    assert "0.10000000000000001" in text
    assert "0.20000000000000001" in text
    assert json.loads(text)["terms"][0] == [[0], 1 / 3, 0.0]
