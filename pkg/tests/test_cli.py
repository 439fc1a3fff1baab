import json
import math

import numpy as np
import pytest

from torusppc.cli import fmt, main, read_points, read_points_header
from torusppc.experiments import ExperimentConfig


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def body(text):
    return [line for line in text.splitlines() if not line.startswith("#")]


def write_points(path, values):
    path.write_text("".join(f"{float(v)!r}\n" for v in values))
    return str(path)


def test_fmt_round_trips():
    for x in (0.1, 1 / 3, 0.6180339887498949, 1e-17, 2.0):
        assert float(fmt(x)) == x
    assert fmt(3) == "3"


def test_generate_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    for p in (a, b):
        assert main(["generate", "--gen", "sequential", "--n", "8", "--seed", "7",
                     "--out", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert len(read_points(str(a))) == 8


def test_generate_header_has_seed(tmp_path):
    p = tmp_path / "x.txt"
    main(["generate", "--gen", "batch", "--M", "4", "--n", "10", "--seed", "99", "--out", str(p)])
    text = p.read_text()
    assert text.startswith("# schema_version: 1\n# command: generate\n")
    cfg = read_points_header(str(p))
    assert cfg["master_seed"] == 99 and cfg["M"] == 4 and cfg["n"] == 10


def test_generate_kronecker(capsys):
    code, out, _ = run(["generate", "--gen", "kronecker", "--c", "0.6180339887", "--x1", "0",
                        "--n", "4"], capsys)
    assert code == 0
    vals = [float(v) for v in body(out)]
    for v, e in zip(vals, [0.0, 0.6180339887, 0.2360679774, 0.8541019661]):
        assert v == pytest.approx(e, abs=1e-9)


def test_generate_two_point_walk(capsys):
    code, out, _ = run(["generate", "--gen", "walk", "--step", "two_point:0:0.5:0.5",
                        "--x1", "0", "--n", "100"], capsys)
    assert code == 0
    assert {float(v) for v in body(out)} <= {0.0, 0.5}


def test_generate_full_precision(capsys):
    _, out, _ = run(["generate", "--gen", "iid", "--n", "50", "--seed", "3"], capsys)
    from torusppc.generators import SeedSpec, gen_iid_uniform
    assert [float(v) for v in body(out)] == list(gen_iid_uniform(50, SeedSpec(3, 0)))


@pytest.mark.parametrize("argv", [
    ["generate", "--gen", "walk", "--n", "10"],            # missing step
    ["generate", "--gen", "iid"],                           # missing n
    ["generate", "--gen", "walk", "--step", "gauss", "--n", "5"],
    ["generate", "--gen", "iid", "--n", "5", "--seed", "-1"],
])
def test_generate_config_errors(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2
    assert "usage" in err


def test_generate_unknown_family(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["generate", "--gen", "sobol", "--n", "4"])
    assert exc.value.code == 2


def test_generate_runtime_error(capsys):
    code, _, _ = run(["generate", "--gen", "jittered", "--M", "4", "--n", "5"], capsys)
    assert code == 1


def test_ppc_square(tmp_path, capsys):
    f = write_points(tmp_path / "sq.txt", [0.0, 0.25, 0.5, 0.75])
    code, out, _ = run(["ppc", "--points", f, "--s", "1.1", "0.9", "--alpha", "1"], capsys)
    assert code == 0
    rows = body(out)
    assert rows[0] == "n,s,alpha,pair_count,R"
    assert rows[1:] == ["4,1.1,1.0,8,2.0", "4,0.9,1.0,0,0.0"]


def test_ppc_single_point(tmp_path, capsys):
    f = write_points(tmp_path / "one.txt", [0.3])
    assert run(["ppc", "--points", f, "--s", "1"], capsys)[0] == 1


def test_ppc_needs_input(capsys):
    assert run(["ppc", "--s", "1"], capsys)[0] == 2


def test_ppc_sequential_file(tmp_path, capsys):
    vals = []
    for seed in range(20):
        f = tmp_path / f"s{seed}.txt"
        main(["generate", "--gen", "sequential", "--n", "4096", "--seed", str(seed),
              "--out", str(f)])
        _, out, _ = run(["ppc", "--points", str(f), "--s", "0.5"], capsys)
        vals.append(float(body(out)[1].split(",")[-1]))
    assert 0.2 <= np.mean(vals) <= 0.3


def test_ppc_prefix_scan(capsys):
    code, out, _ = run(["ppc", "--gen", "kronecker", "--c", "0.6180339887498949",
                        "--prefix-scan", "16", "64", "256", "--s", "1"], capsys)
    assert code == 0
    assert [r.split(",")[0] for r in body(out)[1:]] == ["16", "64", "256"]


def test_discrepancy_examples(tmp_path, capsys):
    cases = [(np.arange(10) / 10, 0.1), ([0.4], 1.0), ([0.1, 0.6], 0.5)]
    for i, (pts, expected) in enumerate(cases):
        f = write_points(tmp_path / f"d{i}.txt", list(pts))
        code, out, _ = run(["discrepancy", "--points", f], capsys)
        assert code == 0
        assert float(body(out)[1].split(",")[1]) == pytest.approx(expected, abs=1e-12)


def test_discrepancy_empty(tmp_path, capsys):
    f = tmp_path / "empty.txt"
    f.write_text("# nothing\n")
    assert run(["discrepancy", "--points", str(f)], capsys)[0] == 1


def test_discrepancy_bad_number(tmp_path, capsys):
    f = tmp_path / "bad.txt"
    f.write_text("0.1\nabc\n")
    assert run(["discrepancy", "--points", str(f)], capsys)[0] == 1


def test_discrepancy_missing_file(tmp_path, capsys):
    assert run(["discrepancy", "--points", str(tmp_path / "nope")], capsys)[0] == 1


def coefficients(out):
    rows = body(out)[1:]
    return {int(r.split(",")[0]): float(r.split(",")[1]) for r in rows}


def test_spectral_uniform(capsys):
    code, out, _ = run(["spectral", "--step", "uniform:0:1", "--rmax", "4"], capsys)
    assert code == 0
    assert all(v <= 1e-12 for v in coefficients(out).values())


def test_spectral_two_point(capsys):
    _, out, _ = run(["spectral", "--step", "two_point:0:0.5:0.5", "--rmax", "4"], capsys)
    assert coefficients(out)[2] == pytest.approx(1.0, abs=1e-12)


def test_spectral_half_uniform(capsys):
    _, out, _ = run(["spectral", "--step", "uniform:0:0.5", "--rmax", "1"], capsys)
    assert coefficients(out) == {1: pytest.approx(2 / math.pi, abs=1e-9)}


def test_spectral_profile(tmp_path, capsys):
    prof = tmp_path / "p.csv"
    code, _, _ = run(["spectral", "--step", "uniform:0:0.5", "--profile", "1", "2",
                      "--grid", "4096", "--profile-out", str(prof)], capsys)
    assert code == 0
    rows = body(prof.read_text())
    assert rows[0] == "n,sup_dev"
    assert float(rows[1].split(",")[1]) == pytest.approx(0.5, abs=1e-12)


def test_spectral_profile_needs_density(capsys):
    code, _, err = run(["spectral", "--step", "two_point:0:0.5:0.5", "--profile", "3"], capsys)
    assert code == 1
    assert "density" in err


def test_experiment_config_file(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"generator": "batch", "M": 4, "s_values": [1.0],
                               "n_values": [256], "replicates": 5, "master_seed": 3}))
    out, summary = tmp_path / "r.json", tmp_path / "r.csv"
    code, _, _ = run(["experiment", "--config", str(cfg), "--out", str(out),
                      "--csv", str(summary)], capsys)
    assert code == 0
    doc = json.loads(out.read_text())
    rec = doc["experiments"][0]["records"][0]
    assert doc["schema_version"] == "1" and rec["master_seed"] == 3 and rec["replicates"] == 5
    assert body(summary.read_text())[0].startswith("generator,s,alpha,n,replicates,mean_R")


def test_experiment_config_round_trip(tmp_path, capsys):
    dumped = tmp_path / "d.json"
    assert run(["experiment", "--preset", "thm2i_seq_not_ppc", "--dump-config", str(dumped)],
               capsys)[0] == 0
    cfg = ExperimentConfig.from_dict(json.loads(dumped.read_text()))
    again = tmp_path / "e.json"
    run(["experiment", "--config", str(dumped), "--dump-config", str(again)], capsys)
    assert dumped.read_bytes() == again.read_bytes()
    assert cfg.master_seed == 202


@pytest.mark.parametrize("text", ["{not json", json.dumps({"s_values": [1]}),
                                  json.dumps({"generator": "batch", "s_values": [1]}),
                                  json.dumps({"generator": "iid", "s_values": [-1]})])
def test_experiment_malformed_config(tmp_path, capsys, text):
    cfg = tmp_path / "bad.json"
    cfg.write_text(text)
    assert run(["experiment", "--config", str(cfg)], capsys)[0] == 2


def test_experiment_unknown_preset(capsys):
    assert run(["experiment", "--preset", "nope"], capsys)[0] == 2


def test_experiment_check_pass(tmp_path, capsys):
    code, _, err = run(["experiment", "--preset", "thm2i_seq_not_ppc", "--check",
                        "--out", str(tmp_path / "o.json")], capsys)
    assert code == 0
    assert err.startswith("PASS")


def test_experiment_check_failure_exit_code(tmp_path, capsys, monkeypatch):
    # a band that the data cannot meet exercises the exit-3 path
    from torusppc import experiments
    real = experiments.theorem_preset

    def strict(pid):
        p = real(pid)
        return experiments.Preset(p.id, p.configs,
                                  lambda res: [experiments.BandCheck("never", False, "")])
    monkeypatch.setattr(experiments, "theorem_preset", strict)
    code, _, err = run(["experiment", "--preset", "ex_two_point", "--check",
                        "--out", str(tmp_path / "o.json")], capsys)
    assert code == 3 and "FAIL never" in err


def test_experiment_rerun_byte_identical(tmp_path, capsys, monkeypatch):
    outs = []
    for threads in ("1", "3"):
        monkeypatch.setenv("PPC_THREADS", threads)
        out, summary = tmp_path / f"o{threads}.json", tmp_path / f"o{threads}.csv"
        run(["experiment", "--preset", "ex_two_point", "--out", str(out), "--csv", str(summary)],
            capsys)
        outs.append((out.read_bytes(), summary.read_bytes()))
    assert outs[0] == outs[1]
