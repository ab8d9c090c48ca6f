"""Command-line driver: verb output, exit codes, determinism, sweep grids."""

import json
import subprocess

import pytest

from specind.cli import main

EC_PATH = """\
holant
3 2
0 1
1 2
family=edge_cover
lambda=1
rho=1/2
"""

ES_K2 = """\
holant
2 1
0 1
family=even_subgraph
lambda=1/2
rho=1/2
"""

VS_PATH = """\
vertexspin
3 2
0 1
1 2
q=2
matrix * = 1 1.05 1.05 1
"""

TN_K2 = """\
tensor
2 1
0 1
q=2
tensor 0 = 1 1.02
tensor 1 = 1 0.98
"""

CUBE3 = """\
cube
n=3
coeff 0 = 0.05
coeff 1 2 = 0.04
"""


@pytest.fixture
def models(tmp_path):
    paths = {}
    for name, text in [
        ("ec_path", EC_PATH),
        ("es_k2", ES_K2),
        ("vs_path", VS_PATH),
        ("tn_k2", TN_K2),
        ("cube3", CUBE3),
    ]:
        p = tmp_path / f"{name}.model"
        p.write_text(text)
        paths[name] = str(p)
    return paths


def run_json(argv, tmp_path, name="out.json"):
    out = tmp_path / name
    rc = main(argv + ["--output", str(out)])
    blob = json.loads(out.read_text()) if out.exists() else None
    return rc, blob


def test_region_dist_example(capsys, tmp_path):
    rc, blob = run_json(
        ["region-dist", "--region", "halfplane eps=0.5", "--lambda", "1.0"], tmp_path
    )
    assert rc == 0
    assert capsys.readouterr().out == "1.0\ndelta 1.0\n"
    assert blob["report"]["results"]["delta"] == 1.0
    assert blob["report"]["results"]["exact_geometry"] is True
    assert blob["report"]["inputs"]["lambda"] == 1.0


def test_exit_codes(tmp_path, capsys):
    # unreadable model file -> parse failure
    assert main(["certify", "--model", str(tmp_path / "missing.model"),
                 "--lambda", "1"]) == 1
    assert "error:" in capsys.readouterr().err
    # bad region literal -> parse failure
    assert main(["region", "--region", "pentagon"]) == 1
    capsys.readouterr()
    # eta without a distance source -> validation failure
    assert main(["eta", "--variant", "R+"]) == 2
    assert "either --delta or --region" in capsys.readouterr().err
    # help exits cleanly; unknown verbs do not
    assert main(["--help"]) == 0
    capsys.readouterr()
    assert main(["frobnicate"]) == 1
    capsys.readouterr()


def test_pinning_cap_exit_code(tmp_path, capsys):
    n = 15
    lines = [f"{i} {i + 1}" for i in range(n - 1)]
    big = tmp_path / "big.model"
    big.write_text(
        f"holant\n{n} {n - 1}\n" + "\n".join(lines) + "\nfamily=matchings\nlambda=1\n"
    )
    assert main(["verify-si", "--model", str(big)]) == 3
    assert "exceed the cap" in capsys.readouterr().err


def test_sample_json_and_csv(models, tmp_path, capsys):
    argv = ["sample", "--model", models["ec_path"], "--steps", "6", "--seed", "3",
            "--trace"]
    rc, blob = run_json(argv, tmp_path)
    assert rc == 0
    out = capsys.readouterr().out
    assert out.startswith("final ")
    results = blob["report"]["results"]
    assert len(results["trace"]) == 6
    assert results["final"] == [int(s) for s in out.split()[1].split(",")]

    csv_out = tmp_path / "trace.csv"
    rc = main(argv + ["--format", "csv", "--output", str(csv_out)])
    assert rc == 0
    capsys.readouterr()
    lines = csv_out.read_text().splitlines()
    assert lines[0] == "step,site,old_spin,new_spin,config_hash"
    assert len(lines) == 7
    assert [int(r.split(",")[0]) for r in lines[1:]] == list(range(6))


def test_sample_deterministic_report(models, tmp_path):
    argv = ["sample", "--model", models["ec_path"], "--steps", "9", "--seed", "11"]
    _, a = run_json(argv, tmp_path, "a.json")
    _, b = run_json(argv, tmp_path, "b.json")
    assert a["report"] == b["report"]
    assert set(a) == {"meta", "report"}


def test_verify_si(models, tmp_path, capsys):
    rc, blob = run_json(["verify-si", "--model", models["ec_path"]], tmp_path)
    assert rc == 0
    out = capsys.readouterr().out
    assert out.startswith("eigmax_max ")
    assert out.strip().endswith("over 9 pinnings")
    results = blob["report"]["results"]
    assert results["pinnings_checked"] == 9
    assert results["marginal_bound"] == 0.2
    assert results["eigmax_max"] < 8 / results["marginal_bound"]
    rc, blob = run_json(
        ["verify-si", "--model", models["ec_path"], "--skip-b"], tmp_path
    )
    capsys.readouterr()
    assert "marginal_bound" not in blob["report"]["results"]


def test_certify(models, tmp_path, capsys):
    rc, blob = run_json(
        ["certify", "--model", models["ec_path"], "--lambda", "1"], tmp_path
    )
    assert rc == 0
    assert capsys.readouterr().out == "PASS\n"
    assert blob["report"]["results"]["passes"] is True


def test_roots(models, tmp_path, capsys):
    rc, blob = run_json(
        ["roots", "--beta", "0.5", "--gamma", "1", "--d", "2"], tmp_path
    )
    assert rc == 0
    assert capsys.readouterr().out == "all_negative_real true ratios_ok true\n"
    roots = blob["report"]["results"]["roots"]
    assert roots[0]["re"] == pytest.approx(-2 + 2 ** 0.5)
    # a verb with no tabular form refuses CSV output
    assert main(["roots", "--beta", "0.5", "--gamma", "1", "--d", "2",
                 "--format", "csv"]) == 2
    capsys.readouterr()


def test_region_membership(tmp_path, capsys):
    rc, blob = run_json(
        ["region", "--region", "cardioid", "--point=-1"], tmp_path
    )
    assert rc == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "cardioid"
    assert out[1] == "contains false"
    assert blob["report"]["results"]["contains"] is False
    rc, _ = run_json(["region", "--region", "cardioid", "--point", "1"], tmp_path)
    assert capsys.readouterr().out.splitlines()[1] == "contains true"
    assert main(["region", "--region", "cardioid", "--point", "zzz"]) == 1
    capsys.readouterr()


def test_eta_from_region(tmp_path, capsys):
    rc, blob = run_json(
        ["eta", "--variant", "R+", "--region", "halfplane eps=0.5",
         "--lambda", "4"], tmp_path
    )
    assert rc == 0
    assert capsys.readouterr().out == "eta 16.0\n"
    report = blob["report"]
    assert report["results"]["delta"] == 0.5
    assert any(t.startswith("distance.") for t in report["formula_tags"])
    rc, blob = run_json(["eta", "--variant", "arb", "--delta", "0.25",
                         "--b", "0.2"], tmp_path)
    assert blob["report"]["results"]["eta"] == 160
    capsys.readouterr()
    assert main(["eta", "--variant", "R+", "--delta", "0.5",
                 "--lambda-min", "1"]) == 2
    capsys.readouterr()


def test_mix_diag(models, tmp_path, capsys):
    rc, blob = run_json(
        ["mix-diag", "--model", models["es_k2"], "--horizon", "30"], tmp_path
    )
    assert rc == 0
    out = capsys.readouterr().out
    assert out.startswith("t_mix ")
    results = blob["report"]["results"]
    assert results["ergodicity"]["connected"] is True
    assert len(results["mixing"]["tv_curve"]) == 31

    csv_out = tmp_path / "tv.csv"
    rc = main(["mix-diag", "--model", models["es_k2"], "--horizon", "5",
               "--format", "csv", "--output", str(csv_out)])
    capsys.readouterr()
    lines = csv_out.read_text().splitlines()
    assert lines[0] == "step,tv"
    assert len(lines) == 7
    assert main(["mix-diag", "--model", models["es_k2"], "--horizon", "5",
                 "--empirical-samples", "100"]) == 2
    capsys.readouterr()


def test_zero_scan(models, tmp_path, capsys):
    rc, blob = run_json(
        ["zero-scan", "--model", models["ec_path"], "--region", "cardioid",
         "--samples", "60", "--seed", "1", "--pinning", "0=1"], tmp_path
    )
    assert rc == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "zero_found false"
    assert out[1].startswith("min_modulus ")
    report = blob["report"]
    assert report["results"]["zero_found"] is False
    assert any("falsify" in c for c in report["caveats"])
    assert report["inputs"]["pinning"] == "0=1"


def test_admissible(models, tmp_path, capsys):
    rc, blob = run_json(
        ["admissible", "--model", models["vs_path"], "--epsilon", "0.01"], tmp_path
    )
    assert rc == 0
    out = capsys.readouterr().out
    assert out.startswith("admissible true margin 0.15908443264081")
    assert blob["report"]["results"]["kind"] == "hom"
    assert blob["report"]["results"]["max_degree"] == 2

    rc, blob = run_json(
        ["admissible", "--model", models["tn_k2"], "--epsilon", "0.01"], tmp_path
    )
    capsys.readouterr()
    assert blob["report"]["results"]["kind"] == "tensor"
    assert blob["report"]["results"]["report"]["margin"] == pytest.approx(
        0.1890844326408115
    )
    assert main(["admissible", "--model", models["ec_path"],
                 "--epsilon", "0.01"]) == 2
    capsys.readouterr()


def test_fourier_stats(models, tmp_path, capsys):
    rc, blob = run_json(["fourier-stats", "--model", models["cube3"]], tmp_path)
    assert rc == 0
    out = capsys.readouterr().out
    assert out == "L 0.05 deg 2 condition 0.07071067811865477\n"
    assert "eta_certificate" not in blob["report"]["results"]
    rc, blob = run_json(
        ["fourier-stats", "--model", models["cube3"], "--b", "0.2"], tmp_path
    )
    capsys.readouterr()
    cert = blob["report"]["results"]["eta_certificate"]
    assert cert["eta"] == pytest.approx(41.2650635925856)
    assert any("dobrushin" in c for c in blob["report"]["caveats"])


def test_ising_transform(models, tmp_path, capsys):
    argv = ["ising-transform", "--model", models["es_k2"],
            "--samples", "200", "--seed", "5"]
    rc, blob = run_json(argv, tmp_path)
    assert rc == 0
    assert capsys.readouterr().out == "beta 3.0 lambda_ising 3.0\n"
    hist = blob["report"]["results"]["histogram"]
    assert sum(hist.values()) == 200
    assert set(hist) <= {"--", "-+", "+-", "++"}
    assert hist["++"] > 100  # the ferromagnetic state dominates

    csv_out = tmp_path / "draws.csv"
    rc = main(argv + ["--format", "csv", "--output", str(csv_out)])
    capsys.readouterr()
    lines = csv_out.read_text().splitlines()
    assert lines[0] == "v0,v1"
    assert len(lines) == 201
    assert set(lines[1].split(",")) <= {"-1", "1"}
    assert main(["ising-transform", "--model", models["ec_path"],
                 "--samples", "10", "--seed", "0"]) == 2
    capsys.readouterr()


def test_param_override(models, tmp_path, capsys):
    rc, blob = run_json(
        ["verify-si", "--model", models["ec_path"], "--param", "rho=1/4"], tmp_path
    )
    assert rc == 0
    capsys.readouterr()
    assert blob["report"]["inputs"]["param"] == ["rho=1/4"]
    assert blob["report"]["results"]["marginal_bound"] != 0.2
    assert main(["verify-si", "--model", models["vs_path"],
                 "--param", "rho=1/4"]) == 2
    capsys.readouterr()
    assert main(["verify-si", "--model", models["ec_path"],
                 "--param", "rho"]) == 1
    capsys.readouterr()


def test_sweep(models, tmp_path, capsys):
    out = tmp_path / "grid.csv"
    rc = main([
        "sweep", "--verb", "roots",
        "--vary", "beta=0.5,2.0", "--vary", "d=2,3",
        "--output", str(out),
        "--", "--gamma", "1.0",
    ])
    assert rc == 0
    capsys.readouterr()
    lines = out.read_text().splitlines()
    header = lines[0].split(",")
    assert header[:4] == ["beta", "d", "status", "message"]
    assert len(lines) == 5
    ok_rows = [l for l in lines[1:] if ",ok," in l]
    bad_rows = [l for l in lines[1:] if "error:validation" in l]
    assert len(ok_rows) == 2 and len(bad_rows) == 2
    assert all(l.startswith("2.0,") for l in bad_rows)
    # deterministic row order: cartesian product in the declared axis order
    assert [l.split(",")[0:2] for l in lines[1:]] == [
        ["0.5", "2"], ["0.5", "3"], ["2.0", "2"], ["2.0", "3"]
    ]


def test_sweep_param_axis(models, tmp_path, capsys):
    out = tmp_path / "grid.csv"
    rc = main([
        "sweep", "--verb", "verify-si",
        "--vary", "param:rho=1/2,1/4",
        "--output", str(out),
        "--", "--model", models["ec_path"], "--skip-b",
    ])
    assert rc == 0
    capsys.readouterr()
    lines = out.read_text().splitlines()
    assert lines[0].split(",")[:3] == ["param:rho", "status", "message"]
    assert len(lines) == 3
    assert lines[1].startswith("1/2,ok,")
    assert lines[2].startswith("1/4,ok,")


def test_sweep_empty_grid(capsys):
    assert main(["sweep", "--verb", "roots", "--", "--beta", "1"]) == 2
    assert "empty grid" in capsys.readouterr().err


def test_console_script_wiring():
    proc = subprocess.run(
        ["specind", "region-dist", "--region", "halfplane eps=0.5",
         "--lambda", "1.0"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("1.0\ndelta 1.0\n")
