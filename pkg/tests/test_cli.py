import numpy as np

from knotenergy import generate, write_curve
from knotenergy.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def grab(out, key):
    for line in out.splitlines():
        if line.startswith(key + "="):
            return line.split("=", 1)[1].split()[0]
    raise KeyError(f"{key} not in output:\n{out}")


# ---------------------------------------------------------------------------
# generate / distortion / invert


def test_generate_writes_curve(tmp_path, capsys):
    path = tmp_path / "c.txt"
    code, out = run(capsys, "generate", "circle", "--n", "100", "--out", str(path))
    assert code == 0
    data = np.loadtxt(path, comments="#")
    assert data.shape == (100, 2)


def test_generate_square_has_corners(tmp_path, capsys):
    path = tmp_path / "sq.txt"
    code, _ = run(capsys, "generate", "square", "--n", "8", "--out", str(path))
    assert code == 0
    rows = np.loadtxt(path, comments="#")
    for corner in ([1, 1], [1, -1], [-1, 1], [-1, -1]):
        assert np.any(np.all(np.isclose(rows, corner), axis=1))


def test_distortion_command(tmp_path, capsys):
    path = tmp_path / "st.txt"
    run(capsys, "generate", "stadion", "--n", "1000", "--out", str(path))
    code, out = run(capsys, "distortion", str(path))
    assert code == 0
    assert abs(float(grab(out, "distortion")) - np.pi) < 1e-2


def test_invert_then_distortion(tmp_path, capsys):
    sq = tmp_path / "sq.txt"
    inv = tmp_path / "inv.txt"
    run(capsys, "generate", "square", "--n", "1000", "--out", str(sq))
    code, _ = run(capsys, "invert", str(sq), "--r", "1.0", "--out", str(inv))
    assert code == 0
    code, out = run(capsys, "distortion", str(inv))
    assert code == 0
    assert float(grab(out, "distortion")) >= np.pi / np.sqrt(2) - 1e-2


def test_invert_singular_center(tmp_path, capsys):
    sq = tmp_path / "sq.txt"
    run(capsys, "generate", "square", "--n", "16", "--out", str(sq))
    code, out = run(capsys, "invert", str(sq), "--cx", "1.0", "--cy", "1.0",
                    "--out", str(tmp_path / "x.txt"))
    assert code == 3
    assert "error=inversion-singularity" in out


def test_missing_file(capsys):
    code, out = run(capsys, "distortion", "/nonexistent/path.txt")
    assert code == 2
    assert "error=missing-file" in out


# ---------------------------------------------------------------------------
# energy


def test_energy_report_lines(tmp_path, capsys):
    path = tmp_path / "c.txt"
    run(capsys, "generate", "circle", "--n", "300", "--out", str(path))
    code, out = run(capsys, "energy", str(path), "--alpha", "2", "--p", "2")
    assert code == 0
    assert abs(float(grab(out, "value")) - 4.0) < 0.1
    assert abs(float(grab(out, "beta")) - np.pi / 2) < 1e-2
    assert int(grab(out, "terms")) > 0


def test_energy_self_intersection_exit(tmp_path, capsys):
    path = tmp_path / "bad.txt"
    path.write_text("0 0\n1 0\n0 1\n1 0\n")
    code, out = run(capsys, "energy", str(path), "--alpha", "2", "--p", "2")
    assert code == 2
    assert "error=self-intersection" in out


def test_energy_stable_at_tiny_alpha(tmp_path, capsys):
    path = tmp_path / "c.txt"
    run(capsys, "generate", "circle", "--n", "500", "--out", str(path))
    code, out = run(capsys, "energy", str(path), "--alpha", "0.01", "--stable")
    assert code == 0
    assert "warning=catastrophic-cancellation" in out
    scaled = float(grab(out, "scaled_stable"))
    assert 0.2 < scaled < 1.0  # finite, near log(pi/2)


# ---------------------------------------------------------------------------
# sweep


def test_sweep_single_row(tmp_path, capsys):
    out_csv = tmp_path / "s.csv"
    code, _ = run(capsys, "sweep", "--curves", "circle", "--n", "100",
                  "--alphas", "1.0", "--out", str(out_csv))
    assert code == 0
    lines = out_csv.read_text().splitlines()
    assert lines[0] == "alpha,curve,value,beta,n"
    assert len(lines) == 2 and lines[1].startswith("1,circle,")


def test_sweep_duplicate_ids(tmp_path, capsys):
    code, out = run(capsys, "sweep", "--curves", "circle,circle", "--n", "64",
                    "--out", str(tmp_path / "s.csv"))
    assert code == 4
    assert "error=config" in out


def test_sweep_deterministic_across_threads(tmp_path, capsys):
    a, b, c = (tmp_path / x for x in ("a.csv", "b.csv", "c.csv"))
    args = ["sweep", "--curves", "circle,stadion", "--n", "200",
            "--alphas", "0.5,1.0,2.0"]
    assert run(capsys, *args, "--out", str(a), "--threads", "1")[0] == 0
    assert run(capsys, *args, "--out", str(b), "--threads", "4")[0] == 0
    assert run(capsys, *args, "--out", str(c), "--threads", "1")[0] == 0
    assert a.read_bytes() == b.read_bytes() == c.read_bytes()


def test_sweep_small_alpha_rows_match_log_distortion(tmp_path, capsys):
    # the experiment reproduction: near alpha = 0, every curve's scaled
    # energy approaches the log of its own distortion
    out_csv = tmp_path / "repro.csv"
    code, _ = run(capsys, "sweep", "--curves", "circle,stadion,stadion-inv",
                  "--n", "1000", "--alphas", "0.05,1.0,2.0", "--out", str(out_csv))
    assert code == 0
    rows = [line.split(",") for line in out_csv.read_text().splitlines()[1:]]
    checked = 0
    for alpha, curve, value, beta, n in rows:
        if float(alpha) == 0.05:
            target = np.log(float(beta))  # distortion of the same vertex set
            assert abs(float(value) - target) / target < 0.05, curve
            checked += 1
    assert checked == 3


def test_sweep_plot_and_script(tmp_path, capsys):
    png = tmp_path / "fig.png"
    script = tmp_path / "plot.py"
    code, _ = run(capsys, "sweep", "--curves", "circle", "--n", "64",
                  "--alphas", "0.5,1.0", "--out", str(tmp_path / "s.csv"),
                  "--plot", str(png), "--plot-script", str(script))
    assert code == 0
    assert png.stat().st_size > 0
    assert "matplotlib" in script.read_text()


def test_config_file_with_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("curves = circle\nn = 64\nalphas = 1.0\nout = %s\n"
                   % (tmp_path / "from_cfg.csv"))
    code, _ = run(capsys, "sweep", "--config", str(cfg))
    assert code == 0
    assert (tmp_path / "from_cfg.csv").exists()
    # flag overrides the file
    code, _ = run(capsys, "sweep", "--config", str(cfg), "--out",
                  str(tmp_path / "override.csv"))
    assert code == 0
    assert (tmp_path / "override.csv").exists()


def test_config_rejects_unknown_keys(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("curves = circle\nbogus = 1\n")
    code, out = run(capsys, "sweep", "--config", str(cfg))
    assert code == 4


# ---------------------------------------------------------------------------
# elcheck / seminorm


def test_elcheck_passes_and_is_reproducible(capsys):
    args = ["elcheck", "--n", "200", "--trials", "3", "--seed", "11"]
    code1, out1 = run(capsys, *args)
    code2, out2 = run(capsys, *args)
    assert code1 == code2 == 0
    assert out1 == out2
    assert grab(out1, "status") == "pass"
    assert float(grab(out1, "max_rel_err")) < 1e-3


def test_elcheck_rejects_nontangential(capsys):
    code, out = run(capsys, "elcheck", "--n", "100", "--phi-mode", "identity")
    assert code == 2
    assert "error=nontangential-test-function" in out


def test_elcheck_threads_identical(capsys):
    args = ["elcheck", "--n", "200", "--trials", "2", "--seed", "5"]
    _, out1 = run(capsys, *args, "--threads", "1")
    _, out2 = run(capsys, *args, "--threads", "3")
    assert out1 == out2


def test_seminorm_command(tmp_path, capsys):
    path = tmp_path / "f.txt"
    t = np.arange(256) / 256
    np.savetxt(path, np.cos(2 * np.pi * t))
    code, out = run(capsys, "seminorm", str(path), "--beta", "0.5", "--p", "2",
                    "--bracket")
    assert code == 0
    assert float(grab(out, "gagliardo")) > 0
    assert float(grab(out, "bracket")) > 0


# ---------------------------------------------------------------------------
# round trip through files matches in-memory pipeline


def test_file_pipeline_matches_memory(tmp_path, capsys):
    from knotenergy import EnergyParams, ohara_energy
    curve = generate("stadion", 400)
    path = tmp_path / "st.txt"
    write_curve(curve, path)
    code, out = run(capsys, "energy", str(path), "--alpha", "2", "--p", "2")
    assert code == 0
    mem = ohara_energy(curve, EnergyParams(2, 2)).value
    assert f"{mem:.12g}" == grab(out, "value")
