import json
import math

import pytest

from reldecode import cli
from reldecode.sweep import HEADER, read_csv


def write_config(tmp_path, name="m.json", **doc):
    doc.setdefault("power", 1)
    doc.setdefault("c", 1)
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_solve_from_mean(tmp_path, capsys):
    code, out, _ = run(capsys, "solve", write_config(tmp_path, durations=[1, 2], mean_tau=1.25))
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "beta=1.09861228866811"
    assert [ln.split("=")[0] for ln in lines] == ["beta", "Z", "mean_tau", "entropy", "T_info",
                                                  "E", "log_Z"]


def test_solve_at_zero_beta(tmp_path, capsys):
    code, out, _ = run(capsys, "solve", write_config(tmp_path, durations=[1, 2], beta=0))
    assert code == 0
    assert "Z=2" in out.splitlines()
    assert "T_info=inf" in out.splitlines()


@pytest.mark.parametrize("doc, expected", [
    (dict(durations=[1, 1], mean_tau=1), 3),
    (dict(durations=[1, 2], mean_tau=2.5), 3),
    (dict(durations=[1, 2]), 2),
    (dict(durations=[1, 2], beta=1, mean_tau=1.5), 2),
    (dict(durations=[], beta=1), 2),
    (dict(durations=[1, -2], beta=1), 2),
    (dict(durations=[1, 2], beta=1, c=0), 2),
])
def test_solve_exit_codes(tmp_path, capsys, doc, expected):
    code, _, err = run(capsys, "solve", write_config(tmp_path, **doc))
    assert code == expected
    assert err.startswith("error:")


def test_solve_missing_and_malformed_files(tmp_path, capsys):
    assert run(capsys, "solve", str(tmp_path / "absent.json"))[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "solve", str(bad))[0] == 2
    arr = tmp_path / "arr.json"
    arr.write_text("[1, 2]")
    assert run(capsys, "solve", str(arr))[0] == 2


def test_sweep_row_count_and_values(tmp_path, capsys):
    out = tmp_path / "s.csv"
    code, _, _ = run(capsys, "sweep", "--n", "5", "--steps", "101", "--v-max", "0.99",
                     "--output", str(out))
    assert code == 0
    text = out.read_text()
    lines = text.split("\n")
    assert len(lines) == 103 and lines[-1] == ""
    assert lines[0] == ",".join(HEADER)
    rows = read_csv(out)
    assert rows[0]["kld_simplified"] == 0.0
    assert all(not ln.endswith(",,,,,,,") for ln in lines[1:-1])


def test_sweep_value_at_point_six(tmp_path, capsys):
    out = tmp_path / "s.csv"
    run(capsys, "sweep", "--n", "5", "--v-min", "0", "--v-max", "0.6", "--steps", "3",
        "--output", str(out))
    last = read_csv(out)[-1]
    assert last["v"] == 0.6
    assert f"{last['kld_simplified']:.5g}" == "0.52189"
    assert f"{last['fisher']:.6g}" == "5.24902"


def test_sweep_multiple_n_and_scripts(tmp_path, capsys):
    out = tmp_path / "kld.csv"
    code, _, _ = run(capsys, "sweep", "--n", "5", "10", "--quantity", "kld", "--steps", "5",
                     "--output", str(out), "--emit-plot-script", "--plot")
    assert code == 0
    assert (tmp_path / "kld_n5.csv").exists() and (tmp_path / "kld_n10.csv").exists()
    script = (tmp_path / "kld.gp").read_text()
    assert "kld_n5.csv" in script and "kld_n10.csv" in script
    assert (tmp_path / "kld.png").read_bytes()[:4] == b"\x89PNG"


def test_sweep_from_config(tmp_path, capsys):
    out = tmp_path / "cfg.csv"
    cfg = write_config(tmp_path, durations=[1, 1.2], beta=1)
    assert run(capsys, "sweep", "--config", cfg, "--steps", "4", "--output", str(out))[0] == 0
    rows = read_csv(out)
    assert rows[0]["kld_closed_form"] == 0.0
    assert rows[-1]["regime"] in ("Feasible", "Infeasible", "Critical")


@pytest.mark.parametrize("args", [("--v-max", "1.0"), ("--steps", "1"),
                                  ("--v-min", "0.5", "--v-max", "0.4")])
def test_sweep_bad_grid(tmp_path, capsys, args):
    code, _, _ = run(capsys, "sweep", "--n", "5", "--output", str(tmp_path / "x.csv"), *args)
    assert code == 2


def test_sweep_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        run(capsys, "sweep", "--n", "7", "--steps", "50", "--output", str(p))
    assert a.read_bytes() == b.read_bytes()


def test_vcrit_paper(capsys):
    code, out, _ = run(capsys, "vcrit", "--n", "5", "10", "20", "40")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "n,v_crit"
    got = [float(ln.split(",")[1]) for ln in lines[1:]]
    for g, want in zip(got, (0.92366, 0.95306, 0.96818, 0.97699)):
        assert g == pytest.approx(want, abs=1e-5)


def test_vcrit_consistent(tmp_path, capsys):
    code, out, _ = run(capsys, "vcrit", "--variant", "consistent", "--config",
                       write_config(tmp_path, durations=[1, 1.2], beta=1))
    assert code == 0
    assert out.splitlines()[0] == "v_crit"
    assert float(out.splitlines()[1]) == pytest.approx(0.909343766594324, rel=1e-14)


def test_vcrit_all_rows_fail(tmp_path, capsys):
    code, out, _ = run(capsys, "vcrit", "--variant", "consistent", "--config",
                       write_config(tmp_path, durations=[1, 2], beta=0))
    assert code == 4
    assert out.splitlines() == ["v_crit", "NoCriticalVelocity"]


def test_vcrit_consistent_figure_mode(capsys):
    # ln Z = ln n >= 0 in figure mode, so no consistent crossing exists
    code, out, _ = run(capsys, "vcrit", "--variant", "consistent", "--n", "1", "5")
    assert code == 4
    assert out.splitlines() == ["n,v_crit", "1,NoCriticalVelocity", "5,NoCriticalVelocity"]


def test_vcrit_paper_from_config(tmp_path, capsys):
    code, out, _ = run(capsys, "vcrit", "--config",
                       write_config(tmp_path, durations=[1, 1.2], beta=1))
    assert code == 4
    assert out.splitlines() == ["n,v_crit", "2,OutOfDomain"]


def test_simulate_reports(tmp_path, capsys):
    cfg = write_config(tmp_path, durations=[1, 2, 3], beta=0.5)
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    for p in (a, b):
        code, _, _ = run(capsys, "simulate", cfg, "--v", "0.6", "--trials", "6", "--sigma",
                         "0.05", "--seed", "3", "--num-symbols", "200", "--output", str(p))
        assert code == 0
    assert a.read_bytes() == b.read_bytes()
    text = a.read_text()
    assert text.startswith("generator_name=numpy.random.PCG64\n")
    assert "seed_used=3\n" in text


def test_simulate_noiseless(tmp_path, capsys):
    cfg = write_config(tmp_path, durations=[1, 2], beta=1)
    code, out, _ = run(capsys, "simulate", cfg, "--v", "0.6", "--trials", "3", "--N", "100")
    assert code == 0
    lines = out.splitlines()
    assert "estimate_variance=0" in lines
    assert "estimate_mean=1.25" in lines


def test_simulate_config_jitter_default(tmp_path, capsys):
    cfg = write_config(tmp_path, durations=[1, 2], beta=1, jitter_sigma=0.05)
    _, out, _ = run(capsys, "simulate", cfg, "--v", "0.6", "--trials", "3", "--N", "100")
    assert "estimate_variance=0" not in out.splitlines()


def test_simulate_errors(tmp_path, capsys):
    cfg = write_config(tmp_path, durations=[1, 2], beta=1)
    assert run(capsys, "simulate", cfg, "--v", "0.6", "--trials", "1")[0] == 5
    assert run(capsys, "simulate", cfg, "--v", "1.5", "--trials", "3")[0] == 2


def test_audit_command(capsys):
    code, out, _ = run(capsys, "audit")
    assert code == 0
    lines = out.splitlines()
    assert [ln.split()[1] for ln in lines] == ["A1", "R1", "K1", "K2", "F1", "T1", "T2", "T3"]
    assert all(ln.split()[2] in ("PASS", "FINDING") for ln in lines)


def test_audit_malformed(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("[]")
    assert run(capsys, "audit", "--config", str(bad))[0] == 2


def test_figures(tmp_path, capsys):
    code, out, _ = run(capsys, "figures", "--outdir", str(tmp_path), "--steps", "20")
    assert code == 0
    for name in ("fig1_kld.png", "fig2_fisher.png", "fig3_free_energy.png",
                 "fig1_kld_n40.csv", "fig3_free_energy_n5.csv"):
        assert (tmp_path / name).exists()


def test_module_entry_point():
    import subprocess
    import sys

    res = subprocess.run([sys.executable, "-m", "reldecode", "vcrit", "--n", "5"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert res.stdout.splitlines()[1].startswith("5,0.92365")
