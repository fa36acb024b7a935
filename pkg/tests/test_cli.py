"""Command-line interface: exit codes, config merging, output targets,
the bootstrap/simulate/convert workflows, and the external-score protocol."""

import json
import os
import subprocess
import sys

import pytest

from caussearch.data import save_tabular
from caussearch.graph_io import to_edge_list_string
from caussearch.simulate import SemModel, simulate

from oracles import mk_graph


def run_cli(*args, env=None, stdin=None):
    full_env = dict(os.environ)
    full_env.pop("CAUSSEARCH_SEED", None)
    if env:
        full_env.update(env)
    return subprocess.run(
        [sys.executable, "-m", "caussearch", *map(str, args)],
        capture_output=True, text=True, env=full_env, input=stdin, timeout=120,
    )


@pytest.fixture()
def chain_file(tmp_path):
    dag = mk_graph("XYZ", [("X", "-->", "Y"), ("Y", "-->", "Z")])
    model = SemModel(dag=dag, coefficients={("X", "Y"): 0.9, ("Y", "Z"): 0.9},
                     noise_variances={"X": 1.0, "Y": 1.0, "Z": 1.0})
    path = tmp_path / "chain.tsv"
    save_tabular(simulate(model, n=600, seed=0), path)
    return path


@pytest.fixture()
def mixed_file(tmp_path):
    # integer-coded low-cardinality column auto-types as discrete
    path = tmp_path / "mixed.tsv"
    rows = ["x\tcolor"]
    vals = [0.5, -1.2, 0.3, 2.1, -0.7, 1.4, 0.0, -2.3, 1.1, 0.8]
    for i, v in enumerate(vals):
        rows.append(f"{v}\t{i % 2}")
    path.write_text("\n".join(rows) + "\n", encoding="utf-8")
    return path


# -- search ---------------------------------------------------------------------


def test_search_prints_edge_list(chain_file):
    r = run_cli("search", "--data", chain_file, "--algorithm", "pc")
    assert r.returncode == 0
    assert r.stdout.startswith("Graph Nodes:\nX,Y,Z\n")
    assert "X" in r.stdout and "Graph Edges:" in r.stdout


def test_search_writes_out_file(chain_file, tmp_path):
    out = tmp_path / "result.txt"
    r = run_cli("search", "--data", chain_file, "--out", out)
    assert r.returncode == 0
    assert r.stdout == ""
    assert out.read_text(encoding="utf-8").startswith("Graph Nodes:")


def test_search_format_dot(chain_file):
    r = run_cli("search", "--data", chain_file, "--format", "dot")
    assert r.returncode == 0
    assert r.stdout.startswith("digraph {")


def test_search_is_deterministic(chain_file):
    a = run_cli("search", "--data", chain_file, "--seed", 4)
    b = run_cli("search", "--data", chain_file, "--seed", 4)
    assert a.returncode == b.returncode == 0
    assert a.stdout == b.stdout


# -- exit codes -------------------------------------------------------------------


def test_missing_data_flag_is_a_config_error(tmp_path):
    r = run_cli("search")
    assert r.returncode == 2
    assert "no data file" in r.stderr


def test_bad_algorithm_choice_rejected_by_parser(chain_file):
    r = run_cli("search", "--data", chain_file, "--algorithm", "ges")
    assert r.returncode == 2


def test_out_of_range_alpha_exits_2(chain_file):
    r = run_cli("search", "--data", chain_file, "--alpha", "1.5")
    assert r.returncode == 2
    assert "alpha" in r.stderr


def test_nonexistent_data_file_exits_3(tmp_path):
    r = run_cli("search", "--data", tmp_path / "nope.tsv")
    assert r.returncode == 3
    assert "no such file" in r.stderr


def test_malformed_data_exits_3(tmp_path):
    bad = tmp_path / "bad.tsv"
    bad.write_text("a\tb\n1\t2\n3\n", encoding="utf-8")
    r = run_cli("search", "--data", bad)
    assert r.returncode == 3


def test_fisher_z_on_mixed_data_exits_4(mixed_file):
    r = run_cli("search", "--data", mixed_file, "--test", "fisher_z")
    assert r.returncode == 4
    assert "Fisher Z" in r.stderr
    assert "color" in r.stderr


def test_lavaan_of_undirected_result_exits_4(tmp_path):
    # two correlated variables give an undirected edge, which lavaan rejects
    dag = mk_graph("AB", [("A", "-->", "B")])
    model = SemModel(dag=dag, coefficients={("A", "B"): 0.9},
                     noise_variances={"A": 1.0, "B": 1.0})
    path = tmp_path / "pair.tsv"
    save_tabular(simulate(model, n=500, seed=1), path)
    out = tmp_path / "model.lav"
    r = run_cli("search", "--data", path, "--format", "lavaan", "--out", out)
    assert r.returncode == 4
    assert "not directed" in r.stderr
    assert not out.exists()  # nothing written on failure


def test_nothing_written_on_data_error(tmp_path):
    out = tmp_path / "result.txt"
    r = run_cli("search", "--data", tmp_path / "nope.tsv", "--out", out)
    assert r.returncode == 3
    assert not out.exists()


# -- config files and the seed chain ------------------------------------------------


def test_config_file_supplies_settings(chain_file, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"data": str(chain_file), "format": "dot"}))
    r = run_cli("search", "--config", cfg)
    assert r.returncode == 0
    assert r.stdout.startswith("digraph {")


def test_flags_override_config(chain_file, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"data": str(chain_file), "format": "dot"}))
    r = run_cli("search", "--config", cfg, "--format", "edges")
    assert r.returncode == 0
    assert r.stdout.startswith("Graph Nodes:")


def test_unknown_config_key_exits_2(chain_file, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"data": str(chain_file), "bogus": 1}))
    r = run_cli("search", "--config", cfg)
    assert r.returncode == 2
    assert "bogus" in r.stderr


def test_invalid_config_json_exits_2(chain_file, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text("{not json")
    r = run_cli("search", "--config", cfg, "--data", chain_file)
    assert r.returncode == 2


def test_env_seed_used_when_no_flag(tmp_path):
    args = ("simulate", "--nodes", 5, "--samples", 60,
            "--out", tmp_path / "d.tsv", "--graph-out", tmp_path / "g.txt")
    run_cli(*args, env={"CAUSSEARCH_SEED": "5"})
    first = (tmp_path / "d.tsv").read_bytes(), (tmp_path / "g.txt").read_bytes()
    run_cli(*args, env={"CAUSSEARCH_SEED": "5"})
    assert ((tmp_path / "d.tsv").read_bytes(), (tmp_path / "g.txt").read_bytes()) == first
    run_cli(*args, env={"CAUSSEARCH_SEED": "6"})
    assert (tmp_path / "d.tsv").read_bytes() != first[0]


def test_seed_flag_beats_env(tmp_path):
    args = ("simulate", "--nodes", 5, "--samples", 60, "--out", tmp_path / "d.tsv",
            "--graph-out", tmp_path / "g.txt")
    run_cli(*args, "--seed", 7, env={"CAUSSEARCH_SEED": "5"})
    with_flag = (tmp_path / "d.tsv").read_bytes()
    run_cli(*args, "--seed", 7)
    assert (tmp_path / "d.tsv").read_bytes() == with_flag


def test_bad_env_seed_exits_2(chain_file):
    r = run_cli("search", "--data", chain_file, env={"CAUSSEARCH_SEED": "pi"})
    assert r.returncode == 2
    assert "CAUSSEARCH_SEED" in r.stderr


# -- knowledge via config -------------------------------------------------------------


def test_knowledge_forbidden_pairs_honored(chain_file, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({
        "data": str(chain_file),
        "knowledge": {"forbidden": [["X", "Y"], ["Y", "X"]]},
    }))
    r = run_cli("search", "--config", cfg)
    assert r.returncode == 0
    assert "X --> Y" not in r.stdout and "Y --> X" not in r.stdout


def test_knowledge_tiers_honored(chain_file, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({
        "data": str(chain_file),
        "algorithm": "fges",
        "knowledge": {"tiers": [["X"], ["Y", "Z"]]},
    }))
    r = run_cli("search", "--config", cfg)
    assert r.returncode == 0
    assert "Y --> X" not in r.stdout and "Z --> X" not in r.stdout


def test_unknown_knowledge_variable_exits_2(chain_file, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({
        "data": str(chain_file),
        "knowledge": {"required": [["X", "W"]]},
    }))
    r = run_cli("search", "--config", cfg)
    assert r.returncode == 2
    assert "unknown variable" in r.stderr


# -- bootstrap -------------------------------------------------------------------------


def test_bootstrap_writes_table_and_consensus_dot(chain_file, tmp_path):
    table_path = tmp_path / "stable.tsv"
    dot_path = tmp_path / "consensus.dot"
    r = run_cli("bootstrap", "--data", chain_file, "--reps", 6, "--seed", 1,
                "--out", table_path, "--graph-out", dot_path)
    assert r.returncode == 0
    table = table_path.read_text(encoding="utf-8")
    assert table.startswith("pair\t")
    dot = dot_path.read_text(encoding="utf-8")
    assert dot.startswith("digraph {")
    assert 'label="' in dot


def test_bootstrap_requires_positive_reps(chain_file):
    r = run_cli("bootstrap", "--data", chain_file, "--reps", 0)
    assert r.returncode == 2
    assert "reps" in r.stderr


def test_bootstrap_is_reproducible(chain_file, tmp_path):
    out_a, out_b = tmp_path / "a.tsv", tmp_path / "b.tsv"
    dot_a, dot_b = tmp_path / "a.dot", tmp_path / "b.dot"
    run_cli("bootstrap", "--data", chain_file, "--reps", 5, "--seed", 9,
            "--out", out_a, "--graph-out", dot_a)
    run_cli("bootstrap", "--data", chain_file, "--reps", 5, "--seed", 9,
            "--out", out_b, "--graph-out", dot_b)
    assert out_a.read_bytes() == out_b.read_bytes()
    assert dot_a.read_bytes() == dot_b.read_bytes()


# -- simulate ---------------------------------------------------------------------------


def test_simulate_writes_data_and_labeled_truth(tmp_path):
    data_path = tmp_path / "sim.tsv"
    graph_path = tmp_path / "truth.txt"
    r = run_cli("simulate", "--nodes", 6, "--degree", 2, "--samples", 40,
                "--seed", 3, "--out", data_path, "--graph-out", graph_path)
    assert r.returncode == 0
    lines = data_path.read_text(encoding="utf-8").splitlines()
    assert lines[0].split("\t") == [f"X{i}" for i in range(1, 7)]
    assert len(lines) == 41
    truth = graph_path.read_text(encoding="utf-8")
    assert truth.startswith("Graph Nodes:")
    edge_lines = [ln for ln in truth.splitlines() if "-->" in ln]
    assert edge_lines and all("# " in ln for ln in edge_lines)


def test_simulate_requires_out(tmp_path):
    r = run_cli("simulate", "--nodes", 4, "--samples", 10)
    assert r.returncode == 2
    assert "--out" in r.stderr


def test_simulate_rejects_bad_sizes(tmp_path):
    r = run_cli("simulate", "--nodes", 0, "--samples", 10,
                "--out", tmp_path / "d.tsv")
    assert r.returncode == 2


# -- convert ------------------------------------------------------------------------------


@pytest.fixture()
def pag_file(tmp_path):
    g = mk_graph("ABC", [("A", "-->", "B"), ("B", "o-o", "C")])
    path = tmp_path / "graph.txt"
    path.write_text(to_edge_list_string(g), encoding="utf-8")
    return path


def test_convert_edges_to_dot(pag_file):
    r = run_cli("convert", "--input", pag_file, "--to", "dot")
    assert r.returncode == 0
    assert r.stdout.startswith("digraph {")
    assert "odot" in r.stdout


def test_convert_round_trip_identity(pag_file, tmp_path):
    mat = tmp_path / "m.txt"
    r1 = run_cli("convert", "--input", pag_file, "--to", "pcalg", "--out", mat)
    assert r1.returncode == 0
    r2 = run_cli("convert", "--input", mat, "--from", "pcalg", "--to", "edges")
    assert r2.returncode == 0
    assert r2.stdout == pag_file.read_text(encoding="utf-8")


def test_convert_lavaan_of_pag_exits_4(pag_file):
    r = run_cli("convert", "--input", pag_file, "--to", "lavaan")
    assert r.returncode == 4
    assert "not directed" in r.stderr


def test_convert_malformed_input_exits_3(tmp_path):
    path = tmp_path / "junk.txt"
    path.write_text("this is not a graph\n", encoding="utf-8")
    r = run_cli("convert", "--input", path)
    assert r.returncode == 3


def test_convert_dag_to_lavaan(tmp_path):
    g = mk_graph("XYZ", [("X", "-->", "Z"), ("Y", "-->", "Z")])
    path = tmp_path / "dag.txt"
    path.write_text(to_edge_list_string(g), encoding="utf-8")
    r = run_cli("convert", "--input", path, "--to", "lavaan")
    assert r.returncode == 0
    assert r.stdout == "Z ~ X + Y\n"


# -- external score protocol -----------------------------------------------------------


def test_external_score_protocol_round_trip(chain_file, tmp_path):
    out = tmp_path / "ext.txt"
    proc = subprocess.Popen(
        [sys.executable, "-m", "caussearch", "search", "--data", str(chain_file),
         "--algorithm", "fges", "--score", "external", "--out", str(out)],
        stdin=subprocess.PIPE, stdout=subprocess.PIPE, stderr=subprocess.PIPE,
        text=True,
    )
    try:
        queries = 0
        while True:
            line = proc.stdout.readline()
            assert line, "scorer stream ended before done message"
            msg = json.loads(line)
            if msg["type"] == "columns":
                assert msg["names"] == ["X", "Y", "Z"]
            elif msg["type"] == "local":
                queries += 1
                # flat score: every structure ties, so the search keeps nothing
                proc.stdin.write(json.dumps({"id": msg["id"], "value": 0.0}) + "\n")
                proc.stdin.flush()
            elif msg["type"] == "done":
                break
        proc.stdin.close()
        assert proc.wait(timeout=60) == 0
    finally:
        proc.kill()
    assert queries > 0
    text = out.read_text(encoding="utf-8")
    assert text.startswith("Graph Nodes:")
    assert not any("-->" in ln for ln in text.splitlines())


def test_external_score_requires_out(chain_file):
    r = run_cli("search", "--data", chain_file, "--score", "external", stdin="")
    assert r.returncode == 2
    assert "--out" in r.stderr


def test_external_score_rejects_bootstrapping(chain_file, tmp_path):
    r = run_cli("bootstrap", "--data", chain_file, "--score", "external",
                "--reps", 3, "--out", tmp_path / "t.txt", stdin="")
    assert r.returncode == 2
    assert "external score" in r.stderr
