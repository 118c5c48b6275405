"""Tests for the coupleclust command line interface.

Every subcommand is exercised through ``main(argv)`` so the tests see
exactly what a shell user would: stdout payloads, ``--out`` files with
sibling manifests, and single-line JSON errors on stderr with exit
code 1.
"""

import json

import numpy as np
import pytest

from coupleclust.cli import main


def run_cli(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def margins_file(tmp_path):
    path = tmp_path / "margins.json"
    path.write_text(json.dumps({"mu": [0.7, 0.3], "nu": [0.6, 0.4]}))
    return str(path)


@pytest.fixture
def two_triangles_file(tmp_path):
    edges = [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)]
    text = "".join(f"{i}\t{j}\t1.0\n" for i, j in edges)
    path = tmp_path / "triangles.tsv"
    path.write_text(text)
    return str(path)


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["--version"])
    assert excinfo.value.code == 0
    assert "coupleclust" in capsys.readouterr().out


def test_missing_subcommand_is_usage_error(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main([])
    assert excinfo.value.code == 2


def test_couple_stdout_embeds_manifest(capsys, margins_file):
    code, out, err = run_cli(
        capsys, ["couple", margins_file, "--kind", "indetermination"]
    )
    assert code == 0
    assert err == ""
    payload = json.loads(out)
    assert payload["kind"] == "indetermination"
    np.testing.assert_allclose(
        payload["cells"], [[0.4, 0.3], [0.2, 0.1]], atol=1e-12
    )
    manifest = payload["manifest"]
    assert manifest["command"] == "couple"
    assert manifest["output_paths"] == ["-"]
    assert isinstance(manifest["tool_version"], str)


def test_couple_independence_is_outer_product(capsys, margins_file):
    code, out, _ = run_cli(capsys, ["couple", margins_file])
    assert code == 0
    payload = json.loads(out)
    assert payload["kind"] == "independence"
    expected = np.outer([0.7, 0.3], [0.6, 0.4])
    np.testing.assert_allclose(payload["cells"], expected, atol=1e-12)


def test_couple_out_writes_payload_and_manifest(
    capsys, tmp_path, margins_file
):
    out_path = tmp_path / "joint.json"
    code, out, _ = run_cli(
        capsys, ["couple", margins_file, "--out", str(out_path)]
    )
    assert code == 0
    assert out == ""
    payload = json.loads(out_path.read_text())
    assert "manifest" not in payload
    assert payload["p"] == 2 and payload["q"] == 2
    manifest = json.loads((tmp_path / "joint.json.manifest.json").read_text())
    assert manifest["command"] == "couple"
    assert manifest["seed"] is None
    assert manifest["output_paths"] == [
        str(out_path),
        str(out_path) + ".manifest.json",
    ]


def test_monge_check_on_indetermination_coupling(
    capsys, tmp_path, margins_file
):
    joint_path = tmp_path / "joint.json"
    run_cli(
        capsys,
        [
            "couple",
            margins_file,
            "--kind",
            "indetermination",
            "--out",
            str(joint_path),
        ],
    )
    code, out, _ = run_cli(capsys, ["monge-check", str(joint_path)])
    assert code == 0
    payload = json.loads(out)
    assert payload["tol"] == 1e-10
    assert payload["structure"]["is_full_monge"] is True
    assert payload["theorems"]["additive_holds"] is True


def test_monge_check_on_independence_coupling(capsys, tmp_path, margins_file):
    joint_path = tmp_path / "joint.json"
    run_cli(capsys, ["couple", margins_file, "--out", str(joint_path)])
    code, out, _ = run_cli(capsys, ["monge-check", str(joint_path)])
    assert code == 0
    payload = json.loads(out)
    assert payload["structure"]["is_full_log_monge"] is True
    assert payload["theorems"]["multiplicative_holds"] is True


def test_condorcet_check_accepts_indetermination(
    capsys, tmp_path, margins_file
):
    joint_path = tmp_path / "joint.json"
    run_cli(
        capsys,
        [
            "couple",
            margins_file,
            "--kind",
            "indetermination",
            "--out",
            str(joint_path),
        ],
    )
    code, out, _ = run_cli(capsys, ["condorcet-check", str(joint_path)])
    assert code == 0
    payload = json.loads(out)
    assert payload["residual"] <= 1e-12
    assert payload["is_indetermination_coupling"] is True


def test_condorcet_check_rejects_independence(capsys, tmp_path, margins_file):
    joint_path = tmp_path / "joint.json"
    run_cli(capsys, ["couple", margins_file, "--out", str(joint_path)])
    code, out, _ = run_cli(capsys, ["condorcet-check", str(joint_path)])
    assert code == 0
    payload = json.loads(out)
    assert payload["residual"] == pytest.approx(0.0064, abs=1e-12)
    assert payload["is_indetermination_coupling"] is False


def test_delta_closed_form_only(capsys):
    code, out, _ = run_cli(capsys, ["delta", "2", "2", "--samples", "0"])
    assert code == 0
    payload = json.loads(out)
    assert payload["closed_form"] == pytest.approx(1.0 / 36.0, abs=1e-15)
    assert "monte_carlo" not in payload


def test_delta_with_monte_carlo(capsys):
    argv = ["delta", "3", "4", "--samples", "4000", "--seed", "7"]
    code, out, _ = run_cli(capsys, argv)
    assert code == 0
    payload = json.loads(out)
    est = payload["monte_carlo"]
    assert est["n_samples"] == 4000
    gap = abs(est["mean"] - payload["closed_form"])
    assert gap <= 5.0 * est["std_error"]
    assert payload["manifest"]["seed"] == 7


def test_gilbert_deterministic_per_seed(capsys):
    args = ["gilbert", "12", "0.5", "--seed", "3"]
    _, first, _ = run_cli(capsys, args)
    _, second, _ = run_cli(capsys, args)
    _, other, _ = run_cli(capsys, ["gilbert", "12", "0.5", "--seed", "4"])
    assert first == second
    assert first != other
    for line in first.strip().splitlines():
        i, j, w = line.split("\t")
        assert int(i) < int(j)
        assert float(w) == 1.0


def test_gilbert_weighted_edges(capsys, tmp_path):
    out_path = tmp_path / "graph.tsv"
    code, _, _ = run_cli(
        capsys,
        ["gilbert", "10", "0.8", "--max-weight", "4", "--out", str(out_path)],
    )
    assert code == 0
    weights = [
        float(line.split("\t")[2])
        for line in out_path.read_text().strip().splitlines()
    ]
    assert all(w == int(w) and 1 <= w <= 4 for w in weights)
    assert max(weights) > 1
    assert (tmp_path / "graph.tsv.manifest.json").exists()


def test_bias_hist_empirical_csv(capsys):
    argv = [
        "bias-hist",
        "8",
        "0.3",
        "--bins",
        "20",
        "--samples",
        "500",
        "--seed",
        "1",
    ]
    code, out, _ = run_cli(capsys, argv)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "bin_low,bin_high,count"
    assert len(lines) == 21
    total = sum(float(line.split(",")[2]) for line in lines[1:])
    assert total == 500.0


def test_bias_hist_difference_and_theoretical_modes(capsys):
    argv = [
        "bias-hist",
        "8",
        "0.3",
        "--which",
        "difference",
        "--bins",
        "16",
        "--samples",
        "400",
        "--seed",
        "2",
    ]
    code, out, _ = run_cli(capsys, argv)
    assert code == 0
    rows = out.strip().splitlines()[1:]
    assert len(rows) == 16
    assert sum(float(r.split(",")[2]) for r in rows) == 400.0

    argv = ["bias-hist", "8", "0.3", "--bins", "16", "--theoretical"]
    code, out, _ = run_cli(capsys, argv)
    assert code == 0
    rows = out.strip().splitlines()[1:]
    mass = sum(float(r.split(",")[2]) for r in rows)
    assert mass == pytest.approx(1.0, abs=1e-9)


def test_bias_hist_expected_2m_changes_sample_means(capsys):
    base = ["bias-hist", "10", "0.4", "--bins", "30", "--samples", "300"]
    _, realized, _ = run_cli(capsys, base + ["--seed", "5"])
    _, expected, _ = run_cli(capsys, base + ["--seed", "5", "--expected-2m"])
    assert realized != expected


def test_cluster_karate(capsys):
    code, out, _ = run_cli(capsys, ["cluster", "--karate", "--seed", "0"])
    assert code == 0
    payload = json.loads(out)
    assert len(payload["labels"]) == 34
    assert 3 <= payload["k"] <= 5
    assert payload["score"] > 0.0
    assert payload["criterion"] == "independence"
    trace = payload["trace"]
    assert all(b >= a - 1e-12 for a, b in zip(trace, trace[1:]))


def test_cluster_edge_list_recovers_triangles(capsys, two_triangles_file):
    argv = ["cluster", two_triangles_file, "--criterion", "indetermination"]
    code, out, _ = run_cli(capsys, argv)
    assert code == 0
    payload = json.loads(out)
    labels = payload["labels"]
    assert payload["k"] == 2
    assert labels[0] == labels[1] == labels[2]
    assert labels[3] == labels[4] == labels[5]
    assert labels[0] != labels[3]


def test_best_exhaustive_matches_cluster_on_triangles(
    capsys, two_triangles_file
):
    code, out, _ = run_cli(capsys, ["best-exhaustive", two_triangles_file])
    assert code == 0
    exact = json.loads(out)
    _, out, _ = run_cli(capsys, ["cluster", two_triangles_file])
    greedy = json.loads(out)
    assert exact["k"] == 2
    assert greedy["score"] == pytest.approx(exact["score"], abs=1e-12)
    assert exact["criterion"] == "independence"


def assert_single_json_error(err, name):
    lines = err.strip().splitlines()
    assert len(lines) == 1
    record = json.loads(lines[0])
    assert record["error"] == name
    assert record["message"]


def test_couple_condition_violation_reports_error(capsys, tmp_path):
    path = tmp_path / "margins.json"
    path.write_text(json.dumps({"mu": [0.9, 0.1], "nu": [0.9, 0.1]}))
    code, out, err = run_cli(
        capsys, ["couple", str(path), "--kind", "indetermination"]
    )
    assert code == 1
    assert out == ""
    assert_single_json_error(err, "ConditionHViolated")


def test_couple_incomplete_margins_file(capsys, tmp_path):
    path = tmp_path / "margins.json"
    path.write_text(json.dumps({"mu": [0.5, 0.5]}))
    code, _, err = run_cli(capsys, ["couple", str(path)])
    assert code == 1
    assert_single_json_error(err, "ValueError")


def test_missing_input_file_reports_oserror(capsys, tmp_path):
    code, _, err = run_cli(capsys, ["couple", str(tmp_path / "absent.json")])
    assert code == 1
    assert_single_json_error(err, "FileNotFoundError")


def test_cluster_rejects_both_input_and_karate(capsys, two_triangles_file):
    code, _, err = run_cli(capsys, ["cluster", two_triangles_file, "--karate"])
    assert code == 1
    assert_single_json_error(err, "ValueError")


def test_cluster_requires_some_input(capsys):
    code, _, err = run_cli(capsys, ["cluster"])
    assert code == 1
    assert_single_json_error(err, "ValueError")


def test_best_exhaustive_too_large(capsys, tmp_path):
    text = "".join(f"{i}\t{i + 1}\t1.0\n" for i in range(10))
    path = tmp_path / "chain.tsv"
    path.write_text(text)
    code, _, err = run_cli(capsys, ["best-exhaustive", str(path)])
    assert code == 1
    assert_single_json_error(err, "TooLarge")


def test_malformed_edge_list_reports_parse_error(capsys, tmp_path):
    path = tmp_path / "bad.tsv"
    path.write_text("0\t1\n")
    code, _, err = run_cli(capsys, ["cluster", str(path)])
    assert code == 1
    assert_single_json_error(err, "EdgeListParseError")
