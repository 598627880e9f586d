import json
import subprocess
import sys

import numpy as np
import pytest

from latticedg import BoxConstraint, TabularObjective
from latticedg.bench import (
    COLUMNS,
    ExperimentConfig,
    GraphParseError,
    bundled_graph_path,
    load_graph,
    read_report,
    render_report,
    report_rows,
    run_experiment,
    write_report,
)
from latticedg.cli import main
from latticedg.rng import derive_seed, element_stream


def write(tmp_path, text, name="g.txt"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_load_one_based_with_comment(tmp_path):
    g = load_graph(write(tmp_path, "% comment\n1 2\n2 3\n"))
    assert g.vertex_count == 3
    assert sorted((i, j) for i in range(3) for j, _ in g.out_arcs[i]) == [(0, 1), (1, 0), (1, 2), (2, 1)]
    assert all(w == 1.0 for i in range(3) for _, w in g.out_arcs[i])


def test_load_zero_based_weight(tmp_path):
    g = load_graph(write(tmp_path, "0 1 2.5\n"))
    assert g.vertex_count == 2
    assert g.out_arcs[0] == [(1, 2.5)] or list(g.out_arcs[0]) == [(1, 2.5)]


def test_load_duplicates_take_max(tmp_path):
    g = load_graph(write(tmp_path, "# c\n0 1 1\n1 0 4\n0 1 2 99\n"))
    assert list(g.out_arcs[0]) == [(1, 4.0)]


@pytest.mark.parametrize("text, line", [("1 x\n", 1), ("% c\n1 2\n3\n", 3), ("1 2 -1\n", 1), ("1 2 abc\n", 1)])
def test_load_errors_name_line(tmp_path, text, line):
    with pytest.raises(GraphParseError) as info:
        load_graph(write(tmp_path, text))
    assert info.value.line_no == line
    assert f":{line}:" in str(info.value)


def test_load_missing_file(tmp_path):
    with pytest.raises(GraphParseError):
        load_graph(tmp_path / "nope.txt")


def test_self_loops_dropped(tmp_path, caplog):
    g = load_graph(write(tmp_path, "1 1\n1 2\n"))
    assert g.arc_count == 2
    assert "self-loop" in caplog.text


def test_bundled_graph():
    g = load_graph(bundled_graph_path())
    assert g.vertex_count == 50
    assert g.arc_count == 2 * 141


def test_seed_derivation():
    a = derive_seed(5, "DG", None, 0)
    assert a == derive_seed(5, "DG", None, 0)
    assert a != derive_seed(5, "DG", None, 1)
    assert derive_seed(0, "x") ^ derive_seed(7, "x") == 7
    with pytest.raises(ValueError):
        derive_seed(-1, "x")
    assert element_stream(3, 0).random() != element_stream(3, 1).random()


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(input="bundled:social50", trials=0)
    with pytest.raises(ValueError):
        ExperimentConfig(input="bundled:social50", epsilons=[0.0])
    with pytest.raises(ValueError):
        ExperimentConfig(input="bundled:social50", algorithms=["XX"])
    with pytest.raises(ValueError):
        ExperimentConfig(input="bundled:social50", base_seed=2**64)


def small_config(**kw):
    base = dict(input="synthetic:gnp:6:0.5:3", algorithms=["DG", "FastDG"], epsilons=[0.5],
                bound=20, p=0.05, trials=3, base_seed=42)
    base.update(kw)
    return ExperimentConfig(**base)


def strip_time(text):
    return [line.rsplit(",", 2)[0] + "," + line.rsplit(",", 1)[1] for line in text.splitlines()]


def test_run_experiment_count_and_determinism():
    a = run_experiment(small_config())
    b = run_experiment(small_config())
    assert len(a) == 6
    assert strip_time(render_report(a)) == strip_time(render_report(b))
    assert [r.seed for r in a] == [r.seed for r in b]
    assert len({r.seed for r in a}) == 6


def test_parallel_matches_serial():
    a = run_experiment(small_config(jobs=1))
    b = run_experiment(small_config(jobs=2))
    assert strip_time(render_report(a)) == strip_time(render_report(b))


def test_epsilon_groups():
    reports = run_experiment(small_config(algorithms=["FastDG"], epsilons=[0.5, 0.05, 0.005], trials=1))
    assert sorted(r.epsilon for r in reports) == [0.005, 0.05, 0.5]


def test_reported_objective_is_reevaluation():
    box = BoxConstraint([4])
    t = TabularObjective(box, [0, 4, 6, 4, 0])
    reports = run_experiment(small_config(input="unused", bound=4), objective=t, box=box)
    for r in reports:
        assert r.objective == t(r.solution)


def test_empty_report_is_header_only():
    assert render_report([]) == ",".join(COLUMNS) + "\n"


def test_dg_row_has_empty_epsilon():
    reports = run_experiment(small_config(algorithms=["DG"], trials=1))
    lines = render_report(reports).splitlines()
    assert lines[0] == ",".join(COLUMNS)
    assert lines[1].split(",")[1] == ""
    assert len(lines) == 2


def test_json_round_trip(tmp_path):
    reports = run_experiment(small_config())
    path = tmp_path / "out" / "r.json"
    write_report(reports, str(path), "json")
    assert read_report(path, "json") == report_rows(reports)
    assert list(json.loads(path.read_text())[0]) == COLUMNS


def test_csv_round_trip(tmp_path):
    reports = run_experiment(small_config())
    path = tmp_path / "r.csv"
    write_report(reports, str(path), "csv")
    assert read_report(path, "csv") == report_rows(reports)


def test_six_significant_digits():
    reports = run_experiment(small_config(trials=1))
    for row in report_rows(reports):
        assert row["objective"] == float(f"{row['objective']:.6g}")


def test_cli_writes_csv(tmp_path, capsys):
    out = tmp_path / "r.csv"
    code = main(["--input", "synthetic:gnp:5:0.5:1", "--algo", "SG", "--algo", "PolyDG",
                 "--eps", "0.3", "--bound", "10", "--p", "0.1", "--trials", "2", "--out", str(out)])
    assert code == 0
    rows = read_report(out)
    assert [r["algorithm"] for r in rows] == ["SG", "SG", "PolyDG", "PolyDG"]


def test_cli_is_deterministic(tmp_path):
    args = ["--input", "bundled:social50", "--bound", "50", "--trials", "2", "--format", "json"]
    outs = []
    for k in range(2):
        path = tmp_path / f"{k}.json"
        assert main(args + ["--out", str(path)]) == 0
        outs.append([{k2: v for k2, v in r.items() if k2 != "wall_time_ms"} for r in read_report(path, "json")])
    assert outs[0] == outs[1]


def test_cli_unknown_flag():
    with pytest.raises(SystemExit) as info:
        main(["--input", "bundled:social50", "--bogus"])
    assert info.value.code != 0


def test_cli_bad_input_exits_nonzero(tmp_path, capsys):
    bad = write(tmp_path, "1 x\n")
    assert main(["--input", str(bad)]) == 1
    assert ":1:" in capsys.readouterr().err


def test_cli_entry_point_subprocess(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "latticedg.cli", "--input", "synthetic:table:2:5",
                           "--bound", "3", "--algo", "DG"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == ",".join(COLUMNS)
