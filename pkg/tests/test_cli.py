import subprocess
import sys

import pytest

from opsample.cli import main


def write(path, text):
    path.write_text(text)
    return str(path)


def test_run_writes_csv(tmp_path, capsys):
    conf = write(tmp_path / "c.ini", "[experiment]\nscenario = haar\nseed = 2\n")
    assert main(["run", "--config", conf, "--out-dir", str(tmp_path), "--csv", "h.csv"]) == 0
    text = (tmp_path / "h.csv").read_text()
    assert text.startswith("# haar: ")
    assert "exact=true" in text


def test_seed_flag_overrides(tmp_path):
    conf = write(tmp_path / "c.ini", "[experiment]\nscenario = haar\nseed = 2\n")
    main(["run", "--config", conf, "--out-dir", str(tmp_path / "a"), "--seed", "3"])
    assert ",3," in (tmp_path / "a" / "results.csv").read_text()


def test_missing_seed_exits_2(tmp_path, capsys):
    assert main(["run", "--scenario", "uniform", "--out-dir", str(tmp_path)]) == 2
    assert "precondition" in capsys.readouterr().err


def test_bad_config_exits_2(tmp_path):
    conf = write(tmp_path / "c.ini", "[model]\nspacing = wide\n")
    assert main(["run", "--config", conf, "--out-dir", str(tmp_path)]) == 2
    assert main(["run", "--config", str(tmp_path / "missing.ini")]) == 2


def test_separation_violation_exits_2(tmp_path):
    conf = write(
        tmp_path / "c.ini",
        "[experiment]\nscenario = irregular\nseed = 1\n[model]\ntemporal_support = 0.9\n",
    )
    assert main(["run", "--config", conf, "--out-dir", str(tmp_path)]) == 2


def test_sweep_and_empty_sweep(tmp_path):
    args = ["sweep", "--scenario", "haar", "--seed", "1", "--axis", "n_t"]
    assert main(args + ["--values", "4,8", "--out-dir", str(tmp_path / "a")]) == 0
    assert len((tmp_path / "a" / "results.csv").read_text().splitlines()) == 4
    assert main(args + ["--values", "", "--out-dir", str(tmp_path / "b")]) == 0
    assert not (tmp_path / "b").exists()
    assert main(["sweep", "--scenario", "haar", "--seed", "1", "--axis", "nodes", "--values", "1"]) == 2


def test_gen_probe_recon(tmp_path, capsys):
    conf = write(
        tmp_path / "c.ini",
        "[experiment]\nscenario = dft_multichannel\nseed = 4\n"
        "[model]\nlattice_min = -8\nlattice_max = 8\nn_t = 8\n",
    )
    d = str(tmp_path)
    assert main(["gen", "--config", conf, "--out-dir", d]) == 0
    assert main(["probe", "--config", conf, "--out-dir", d, "--model", f"{d}/model.txt"]) == 0
    assert len(list(tmp_path.glob("channel_*.txt"))) == 4
    code = main(["recon", "--config", conf, "--out-dir", d, "--outputs", f"{d}/channel_*.txt",
                 "--truth", f"{d}/model.txt", "--csv", "r.csv"])
    assert code == 0
    summary = (tmp_path / "r.csv").read_text().splitlines()[-1].split(",")
    assert summary[0] == "summary" and float(summary[2]) <= 1e-9


def test_analyze(tmp_path):
    nodes = tmp_path / "nodes.txt"
    nodes.write_text("\n".join(str(k + 0.2 * __import__("math").sin(2.7 * k)) for k in range(-64, 64)))
    code = main(["analyze", "--nodes", str(nodes), "--omega", "0.95", "--h", "10,50",
                 "--out-dir", str(tmp_path), "--svg", "fb.svg"])
    assert code == 0
    rows = dict(ln.split(",") for ln in (tmp_path / "analysis.csv").read_text().splitlines()[1:])
    assert rows["kadec_pass"] == "1"
    assert float(rows["gram_A_128"]) > 0
    assert (tmp_path / "fb.svg").exists()


def test_module_entry_point(tmp_path):
    res = subprocess.run(
        [sys.executable, "-m", "opsample", "run", "--scenario", "density", "--out-dir", str(tmp_path)],
        capture_output=True,
        text=True,
    )
    assert res.returncode == 0, res.stderr
    assert (tmp_path / "results.csv").exists()


def test_help_lists_subcommands(capsys):
    with pytest.raises(SystemExit):
        main(["--help"])
    out = capsys.readouterr().out
    for cmd in ("run", "sweep", "gen", "probe", "recon", "analyze"):
        assert cmd in out
