import json
import subprocess
import sys

import pytest

from groupwill import fixtures
from groupwill.bench import CSV_HEADER, ExperimentSpec, rows_to_csv, run_experiment


@pytest.fixture
def instance_files(tmp_path):
    edges = tmp_path / "ten.edges"
    scores = tmp_path / "ten.scores"
    edges.write_text(fixtures.edge_list_text())
    scores.write_text(fixtures.score_text())
    return str(edges), str(scores)


def spec_for(instance_files, **kw):
    edges, scores = instance_files
    base = dict(axis="k", values=(3, 5), solvers=("dgreedy",), repetitions=1,
                seed=4, graph_edges=edges, graph_scores=scores,
                base={"budget": 50})
    base.update(kw)
    return ExperimentSpec(**base)


def test_row_counting(instance_files):
    rows = run_experiment(spec_for(instance_files))
    assert len(rows) == 2
    assert [r["axis"] for r in rows] == [3, 5]
    assert all(r["samples"] == 0 for r in rows)  # dgreedy draws no samples


def test_csv_byte_identical_across_runs(instance_files):
    spec = spec_for(instance_files, solvers=("dgreedy", "cbas", "cbas-nd"),
                    repetitions=2)
    a = rows_to_csv(run_experiment(spec))
    b = rows_to_csv(run_experiment(spec))
    assert a == b
    assert a.splitlines()[0] == CSV_HEADER


def test_failures_recorded_run_continues(instance_files):
    spec = spec_for(instance_files, values=(5, 99))  # k=99 infeasible
    rows = run_experiment(spec)
    assert len(rows) == 2
    good = [r for r in rows if r["axis"] == 5][0]
    bad = [r for r in rows if r["axis"] == 99][0]
    assert good["willingness"] is not None
    assert bad["willingness"] is None and "error" in bad
    csv = rows_to_csv(rows)
    assert "99,dgreedy,0,4,,0.0,0" in csv


def test_budget_axis_consumes_samples(instance_files):
    spec = spec_for(instance_files, axis="T", values=(20, 40),
                    solvers=("cbas",), base={"k": 4})
    rows = run_experiment(spec)
    assert [r["samples"] for r in rows] == [20, 40]


def test_synthetic_source_and_output(tmp_path):
    out = tmp_path / "rows.csv"
    spec = ExperimentSpec(axis="k", values=(4,), solvers=("dgreedy",),
                          synthetic={"nodes": 40, "topology": "ba", "seed": 2},
                          output=str(out), seed=1)
    run_experiment(spec)
    text = out.read_text()
    assert text.startswith(CSV_HEADER)
    assert len(text.strip().splitlines()) == 2


def test_refit_solver_pulls_away_from_greedy_as_k_grows(tmp_path):
    # decoy-star network: greedy chases the dominant-interest center into a
    # worthless star, so its lead shrinks as the group size grows
    from groupwill import SocialGraph
    from groupwill.synth import synthetic_graph, write_instance

    base = synthetic_graph(440, topology="ba", seed=0, edges_per_node=4)
    center = base.n
    n = base.n + 41
    eta = list(base.eta) + [8.0] + [0.0] * 40
    arcs = list(base.arcs())
    for leaf in range(center + 1, n):
        arcs.append((center, leaf, 0.005))
        arcs.append((leaf, center, 0.005))
    g = SocialGraph(eta, [0.5] * n, arcs)
    edge_path, score_path = write_instance(g, str(tmp_path / "decoy"))

    spec = ExperimentSpec(
        axis="k", values=(5, 15, 30), solvers=("dgreedy", "cbas-nd"),
        repetitions=2, seed=1, graph_edges=edge_path, graph_scores=score_path,
        base={"budget": 1500, "stages": 4, "starts": 10})
    rows = run_experiment(spec)
    means: dict[tuple, list] = {}
    for r in rows:
        means.setdefault((r["axis"], r["solver"]), []).append(r["willingness"])
    ratios = []
    for k in (5, 15, 30):
        nd = sum(means[(k, "cbas-nd")]) / 2
        dg = sum(means[(k, "dgreedy")]) / 2
        ratios.append(nd / dg)
    assert ratios[0] < ratios[1] < ratios[2]


def test_spec_validation(tmp_path):
    with pytest.raises(ValueError):
        ExperimentSpec(axis="bogus", values=(1,), synthetic={"nodes": 5})
    with pytest.raises(ValueError):
        ExperimentSpec(axis="k", values=(), synthetic={"nodes": 5})
    with pytest.raises(ValueError):
        ExperimentSpec(axis="k", values=(1,))  # neither source given


def run_cli(*argv):
    return subprocess.run([sys.executable, "-m", "groupwill.cli", *argv],
                          capture_output=True, text=True, timeout=300)


def test_cli_solve_json(instance_files):
    edges, scores = instance_files
    proc = run_cli("solve", "--graph", edges, "--scores", scores, "--k", "5",
                   "--algo", "brute")
    assert proc.returncode == 0, proc.stderr
    body = json.loads(proc.stdout)
    assert body["willingness"] == pytest.approx(9.7, abs=1e-9)
    assert body["members"] == ["v3", "v4", "v5", "v6", "v7"]
    assert body["connected"] is True


def test_cli_solve_cbas_nd_deterministic(instance_files):
    edges, scores = instance_files
    args = ("solve", "--graph", edges, "--scores", scores, "--k", "5",
            "--algo", "cbas-nd", "--budget", "2000", "--seed", "5")
    a, b = run_cli(*args), run_cli(*args)
    assert a.returncode == 0
    assert a.stdout == b.stdout
    assert json.loads(a.stdout)["willingness"] == pytest.approx(9.7, abs=1e-9)


def test_cli_solve_csv_format(instance_files):
    edges, scores = instance_files
    proc = run_cli("solve", "--graph", edges, "--scores", scores, "--k", "3",
                   "--algo", "dgreedy", "--format", "csv")
    assert proc.returncode == 0
    lines = proc.stdout.strip().splitlines()
    assert lines[0] == "members,willingness,connected"
    assert len(lines) == 2


def test_cli_scenario_and_lambda(instance_files):
    edges, scores = instance_files
    proc = run_cli("solve", "--graph", edges, "--scores", scores, "--k", "3",
                   "--algo", "brute", "--scenario", '{"kind": "exhibition"}')
    assert proc.returncode == 0
    body = json.loads(proc.stdout)
    # lambda = 1 everywhere: pure interest sum of the best connected triple
    assert body["willingness"] == pytest.approx(1.3 + 0.8 + 1.3, abs=1e-9)


def test_cli_separate_groups(tmp_path):
    # two strong nodes in different components: only the relaxed problem
    # can take both
    edges = tmp_path / "two.edges"
    scores = tmp_path / "two.scores"
    edges.write_text("a b 0.1\nc d 0.1\n")
    scores.write_text("a 5\nb 0\nc 4\nd 0\n")
    proc = run_cli("solve", "--graph", str(edges), "--scores", str(scores),
                   "--k", "2", "--algo", "brute", "--scenario",
                   '{"kind": "separate_groups"}')
    assert proc.returncode == 0
    body = json.loads(proc.stdout)
    assert body["members"] == ["a", "c"]
    assert body["connected"] is False
    assert body["willingness"] == pytest.approx(9.0, abs=1e-9)


def test_cli_export_lp(instance_files, tmp_path):
    edges, scores = instance_files
    out = tmp_path / "model.lp"
    proc = run_cli("solve", "--graph", edges, "--scores", scores, "--k", "3",
                   "--algo", "dgreedy", "--export-lp", str(out))
    assert proc.returncode == 0
    text = out.read_text()
    assert text.startswith("\\ connected group selection")
    assert "Binaries" in text


def test_cli_error_exit_code(instance_files):
    edges, scores = instance_files
    proc = run_cli("solve", "--graph", edges, "--scores", scores,
                   "--k", "99", "--algo", "brute")
    assert proc.returncode == 2
    assert "error:" in proc.stderr


def test_cli_synth_and_bench(tmp_path):
    prefix = tmp_path / "toy"
    proc = run_cli("synth", "--nodes", "30", "--topology", "ba",
                   "--beta", "2.5", "--seed", "3", "--out", str(prefix))
    assert proc.returncode == 0, proc.stderr
    spec = {
        "axis": "k", "values": [3, 4], "solvers": ["dgreedy", "cbas"],
        "repetitions": 1, "seed": 0, "base": {"budget": 40},
        "graph_edges": str(prefix) + ".edges",
        "graph_scores": str(prefix) + ".scores",
        "output": str(tmp_path / "result.csv"),
    }
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(json.dumps(spec))
    proc = run_cli("bench", "--spec", str(spec_path))
    assert proc.returncode == 0, proc.stderr
    lines = (tmp_path / "result.csv").read_text().strip().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 5
