import json
import os

import pytest

from hexsse.cli import RESULT_COLUMNS, main
from hexsse.lattice import parse_lattice
from hexsse.oracle import ring_graph


def _run_args(tmp_path, **kw):
    args = ["run", "--lx", "5", "--ly", "2", "--beta", "1.0", "--g", "0.5",
            "--isteps", "100", "--nbins", "2", "--mstep", "50",
            "--out", str(tmp_path)]
    for k, v in kw.items():
        args += [f"--{k}", str(v)]
    return args


def test_run_writes_results_and_samples(tmp_path):
    assert main(_run_args(tmp_path)) == 0
    results = (tmp_path / "results.csv").read_text().splitlines()
    assert results[0] == ",".join(RESULT_COLUMNS)
    assert len(results) == 2
    row = dict(zip(RESULT_COLUMNS, results[1].split(",")))
    assert row["g"] == "0.5" and row["nn"] == "36" and row["valid"] == "1"
    samples = (tmp_path / "samples_0.5_1.csv").read_text().splitlines()
    assert samples[0] == "sweep,re_mH,im_mH,re_psiH,im_psiH"
    assert len(samples) == 1 + 2 * 50
    assert (tmp_path / "bins.csv").exists()


def test_run_appends_rows(tmp_path):
    main(_run_args(tmp_path))
    main(_run_args(tmp_path, g=0.7))
    rows = (tmp_path / "results.csv").read_text().splitlines()
    assert len(rows) == 3


def test_run_deterministic_outputs(tmp_path):
    d1, d2 = tmp_path / "a", tmp_path / "b"
    main(_run_args(d1))
    main(_run_args(d2))
    assert (d1 / "results.csv").read_bytes() == (d2 / "results.csv").read_bytes()
    assert (d1 / "samples_0.5_1.csv").read_bytes() == (d2 / "samples_0.5_1.csv").read_bytes()


def test_run_with_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("lx = 5\nly = 2\nbeta = 1.0\ng = 0.2\nisteps = 500\nnbins = 2\nmstep = 20\n")
    code = main(["run", "--config", str(cfg), "--g", "0.9", "--out", str(tmp_path)])
    assert code == 0
    assert (tmp_path / "samples_0.9_1.csv").exists()


def test_run_config_error_exit_code(tmp_path):
    assert main(["run", "--lx", "4", "--ly", "2", "--beta", "1", "--g", "0",
                 "--out", str(tmp_path)]) == 1


def test_run_unusable_out_dir(tmp_path):
    # a path under a regular file can never become a directory
    blocker = tmp_path / "blocker"
    blocker.write_text("")
    code = main(_run_args(blocker / "sub"))
    assert code == 1


def test_run_saturated_exit_code(tmp_path):
    code = main(_run_args(tmp_path, beta=10.0, isteps=1))
    assert code == 2


def test_sweep_rows_sorted_and_complete(tmp_path):
    code = main(["sweep", "--lx", "5", "--ly", "2", "--beta", "1.0", "--g", "0",
                 "--isteps", "100", "--nbins", "2", "--mstep", "50",
                 "--g-list", "0.4,0.0,0.2", "--out", str(tmp_path)])
    assert code == 0
    rows = (tmp_path / "results.csv").read_text().splitlines()
    assert len(rows) == 4
    gs = [float(r.split(",")[0]) for r in rows[1:]]
    assert gs == sorted(gs) == [0.0, 0.2, 0.4]
    for g in ("0", "0.2", "0.4"):
        assert (tmp_path / f"samples_{g}_1.csv").exists()


def test_sweep_parallel_matches_serial(tmp_path):
    common = ["--lx", "5", "--ly", "2", "--beta", "1.0", "--g", "0",
              "--isteps", "100", "--nbins", "2", "--mstep", "50",
              "--g-list", "0.0,0.3,0.6"]
    d1, d2 = tmp_path / "serial", tmp_path / "par"
    assert main(["sweep", *common, "--out", str(d1), "--parallel", "1"]) == 0
    assert main(["sweep", *common, "--out", str(d2), "--parallel", "3"]) == 0
    assert (d1 / "results.csv").read_bytes() == (d2 / "results.csv").read_bytes()


def test_sweep_empty_g_list(tmp_path):
    assert main(["sweep", "--lx", "5", "--ly", "2", "--beta", "1", "--g", "0",
                 "--g-list", ",", "--out", str(tmp_path)]) == 1


def test_lattice_subcommand_roundtrip(tmp_path):
    out = tmp_path / "lat.json"
    svg = tmp_path / "lat.svg"
    assert main(["lattice", "--lx", "5", "--ly", "2", "--out", str(out), "--svg", str(svg)]) == 0
    lat = parse_lattice(out.read_text())
    assert lat.nn == 36
    assert svg.read_text().startswith("<svg")


def test_oracle_ed_subcommand(tmp_path):
    gpath = tmp_path / "ring6.json"
    gpath.write_text(ring_graph(6, 1, g=0.5).to_json())
    out = tmp_path / "ed.json"
    assert main(["oracle", "ed", "--graph", str(gpath), "--beta", "3.3", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["energy_density"] == pytest.approx(-0.8643305201336058, abs=1e-10)


def test_oracle_ed_capacity_exit(tmp_path):
    gpath = tmp_path / "big.json"
    gpath.write_text(json.dumps({"n": 20, "g": 0.1,
                                 "bonds": [[i, i + 1, 1.0] for i in range(19)]}))
    assert main(["oracle", "ed", "--graph", str(gpath), "--beta", "1.0"]) == 1


def test_oracle_classical_subcommand(tmp_path):
    gpath = tmp_path / "ring6.json"
    gpath.write_text(ring_graph(6, 1, annotated=True).to_json())
    out = tmp_path / "cl.json"
    assert main(["oracle", "classical", "--graph", str(gpath), "--beta", "3.3",
                 "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["ground"]["degeneracy"] == 12
    assert doc["abs_psiH"] == pytest.approx(1 / 6, abs=5e-3)


def test_oracle_ground_subcommand(tmp_path):
    out = tmp_path / "ground.json"
    assert main(["oracle", "ground", "--lx", "5", "--ly", "2", "--cap", "8",
                 "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["degeneracy"] == 2240
    assert doc["energy_per_site"] == -1.0
    assert main(["oracle", "ground", "--lx", "11", "--ly", "5"]) == 1  # width > 16
