import json
import math
import subprocess
import sys

import pytest

from photomem.cli import EXIT_CHECK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK, main
from photomem.sweep import SweepResult

NORM = ["--normalized", "--kappa", "1", "--g-coll", "0.5", "--gamma-inh", "1"]


def _run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_threshold_normalized(capsys):
    code, out, _ = _run(["threshold", *NORM, "--lam", "0"], capsys)
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["lambda_crit"] == pytest.approx(1 / math.sqrt(2), rel=1e-12)
    assert data["resonant"] is True


def test_decompose(capsys):
    code, out, _ = _run(["decompose", *NORM, "--lam", "0.3", "--omega", "0.5"], capsys)
    data = json.loads(out)
    assert code == EXIT_OK
    assert data["theta1"] == pytest.approx(data["theta2"], abs=1e-12)
    assert math.tan(data["theta1"]) ** 2 == pytest.approx(data["tan2_theta_analytic"])


def test_rate_and_herald(capsys):
    code, out, _ = _run(["rate", *NORM, "--lam", "0.5"], capsys)
    assert code == EXIT_OK and json.loads(out)["rate"] > 0
    code, out, _ = _run(["herald", *NORM, "--lam", "0.5"], capsys)
    data = json.loads(out)
    assert 0 < data["heralding_efficiency"] < 1
    assert data["flux_idler"] == pytest.approx(data["flux_signal"] + data["flux_memory"], rel=1e-7)


def test_scatter_and_spectrum_csv(capsys, tmp_path):
    out_path = tmp_path / "t.csv"
    assert main(["scatter", *NORM, "--lam", "0.2", "--points", "5", "--out", str(out_path)]) == EXIT_OK
    lines = out_path.read_text().splitlines()
    assert lines[0].startswith("omega,II_re,II_im") and len(lines) == 6
    assert all(math.isfinite(float(x)) for line in lines[1:] for x in line.split(","))
    code, out, _ = _run(["spectrum", *NORM, "--lam", "0.2", "--points", "3"], capsys)
    assert code == EXIT_OK and out.splitlines()[0] == "omega,ef_idler_memory,ef_memory_vs_both,n_idler,n_memory"


def test_units_flag_scales_inputs(capsys):
    # --units ordinary multiplies quoted MHz by 2 pi; the threshold in MHz is unit-free.
    args = ["threshold", "--kappa", "150", "--lam", "0", "--g-coll", "300", "--gamma-inh", "150"]
    _, out_o, _ = _run([*args, "--units", "ordinary"], capsys)
    _, out_a, _ = _run([*args, "--units", "angular"], capsys)
    assert json.loads(out_o)["lambda_crit"] == pytest.approx(json.loads(out_a)["lambda_crit"])
    assert json.loads(out_a)["lambda_crit"] == pytest.approx(75 * math.sqrt(17))


def test_global_flags_before_subcommand(capsys):
    code, out, _ = _run([*NORM, "--lam", "0", "threshold"], capsys)
    assert code == EXIT_OK
    assert json.loads(out)["params"]["kappa"] == 1.0


def test_table1_check(capsys):
    code, out, _ = _run(["table1", "--check"], capsys)
    data = json.loads(out)
    assert code == EXIT_OK
    assert all(data["checks"].values())
    assert data["entanglement_rate_idler_memory_MHz"] == pytest.approx(30.3, rel=0.15)


def test_table1_check_failure(capsys, tmp_path):
    cfg = tmp_path / "weak.cfg"
    cfg.write_text(
        "[system]\nunits = angular\nkappa = 150 MHz\nlambda = 5 MHz\ng_coll = 0.3 GHz\ngamma_inh = 150 MHz\n"
        "[afc]\nfinesse = 3\ncomb_spacing = 1 MHz\n"
    )
    code, _, _ = _run(["table1", "--check", "--config", str(cfg)], capsys)
    assert code == EXIT_CHECK


def test_exit_codes(capsys, tmp_path):
    code, _, err = _run(["rate", "--normalized", "--kappa", "1", "--lam", "0.1"], capsys)
    assert code == EXIT_CONFIG and "missing --g-coll" in err
    code, _, err = _run(["rate", *NORM, "--lam", "0.9"], capsys)
    assert code == EXIT_NUMERIC and "threshold" in err
    bad = tmp_path / "bad.cfg"
    bad.write_text("[system]\nkappa = 150\n")
    code, _, err = _run(["threshold", "--config", str(bad)], capsys)
    assert code == EXIT_CONFIG and "bad.cfg:2" in err


def test_sweep_from_config(tmp_path, capsys):
    cfg = tmp_path / "s.cfg"
    cfg.write_text(
        "[system]\nunits = angular\nkappa = 150 MHz\nlambda = 40 MHz\ng_coll = 0.3 GHz\ngamma_inh = 150 MHz\n"
        "[afc]\nfinesse = 3\ncomb_spacing = 1 MHz\n"
        "[sweep]\nmetric = heralding\naxis1 = lambda\naxis1_min = 10 MHz\naxis1_max = 40 MHz\naxis1_points = 2\n"
        "axis2 = kappa\naxis2_min = 100 MHz\naxis2_max = 150 MHz\naxis2_points = 2\n"
    )
    out = tmp_path / "s.json"
    assert main(["sweep", "--config", str(cfg), "--out", str(out)]) == EXIT_OK
    res = SweepResult.read(out)
    assert res.values.shape == (2, 2) and res.ok().all()
    assert res.provenance["metric"] == "heralding"
    assert res.axis1 == pytest.approx((10.0, 40.0))


def test_fig2b_writes_both_curves(tmp_path):
    out = tmp_path / "f.csv"
    assert main(["fig2b", "--points", "3", "--out", str(out)]) == EXIT_OK
    assert (tmp_path / "f-rate_idler_memory.csv").exists()
    assert (tmp_path / "f-rate_memory_vs_both.csv").exists()


def test_oracle_validate(capsys):
    code, out, _ = _run(["oracle-validate", *NORM, "--lam", "0.5", "--omegas", "0"], capsys)
    assert code == EXIT_OK
    rows = out.splitlines()[1:]
    assert all(float(r.split(",")[0]) == 0.0 for r in rows)
    worst = max(float(r.split(",")[-1]) for r in rows if r.split(",")[1].startswith("|T_") and float(r.split(",")[2]) > 1e-3)
    assert worst < 0.02


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "photomem", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip()
