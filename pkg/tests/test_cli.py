"""CLI behaviour and golden CSV files.

Regenerate the golden files with ``python3 tests/test_cli.py --regen``.
"""

import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from surftrap.cli import main
from surftrap.tables import read_csv

GOLDEN = Path(__file__).parent / "golden"

CASES = {
    "potential-cut": ["--preset", "paper-fig2", "--set", "cut.n_points=40"],
    "potential-map": ["--preset", "paper-fig2", "--set", "map.nx=7", "--set", "map.nz=6"],
    "minimize": ["--preset", "paper-fig2"],
    "sweep-z0": ["--preset", "paper-fig4-sweep", "--set", "sweep.z0_count=17"],
    "tf-density": ["--preset", "paper-fig2", "--set", "condensate.n_points=25"],
    "rf-map": ["--preset", "paper-fig4-sweep", "--set", "sweep.z0_count=17"],
    "loss-curve": ["--preset", "paper-fig5-loss", "--set", "sweep.z0_count=9"],
    "ramp-profile": ["--preset", "paper-fig2", "--set", "ramp.n_points=11"],
}


def run(cmd, out, extra=()):
    return main([cmd, "--out", str(out), *CASES[cmd], *extra])


def _close(a, b, rtol=1e-9):
    if a == b:
        return True
    try:
        x, y = float(a), float(b)
    except ValueError:
        return False
    return math.isclose(x, y, rel_tol=rtol, abs_tol=1e-300)


@pytest.mark.parametrize("cmd", sorted(CASES))
def test_golden(cmd, tmp_path):
    out = tmp_path / "o.csv"
    assert run(cmd, out) == 0
    tag, meta, header, rows = read_csv(out.read_text())
    gtag, gmeta, gheader, grows = read_csv((GOLDEN / f"{cmd}.csv").read_text())
    assert (tag, header) == (gtag, gheader)
    assert set(meta) == set(gmeta)
    for k in meta:
        assert _close(meta[k], gmeta[k]), k
    assert len(rows) == len(grows)
    for r, g in zip(rows, grows):
        assert all(_close(a, b) for a, b in zip(r, g)), (r, g)


@pytest.mark.parametrize("cmd", ["sweep-z0", "loss-curve", "rf-map"])
def test_workers_do_not_change_bytes(cmd, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(cmd, a, ["--workers", "1"]) == 0
    assert run(cmd, b, ["--workers", "4"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_config_file(tmp_path):
    cfg = tmp_path / "s.ini"
    cfg.write_text("[magnet]\nz0 = -5e-6\n")
    out = tmp_path / "o.csv"
    assert main(["minimize", "--config", str(cfg), "--out", str(out)]) == 0
    _, meta, header, rows = read_csv(out.read_text())
    assert float(rows[0][0]) == -5e-6


def test_parse_error_json(tmp_path, capsys):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("[beam]\npower = lots\n")
    assert main(["minimize", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
    err = json.loads(capsys.readouterr().err.strip())
    assert err["error"] == "parse_error" and err["line"] == 2


def test_validation_error_json(tmp_path, capsys):
    assert main(["minimize", "--set", "beam.angle=30", "--out", str(tmp_path / "o")]) == 2
    err = json.loads(capsys.readouterr().err.strip())
    assert err["error"] == "validation_error"
    assert not (tmp_path / "o").exists()


def test_missing_config_file(tmp_path, capsys):
    assert main(["minimize", "--config", str(tmp_path / "nope.ini"), "--out", "-"]) == 2
    assert "error" in json.loads(capsys.readouterr().err.strip())


def test_console_script(tmp_path):
    out = tmp_path / "r.csv"
    proc = subprocess.run([sys.executable, "-m", "surftrap.cli", "ramp-profile", "--out", str(out)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert out.read_text().startswith("# surftrap-csv v1 ramp-profile\n")


def test_numpy_fallback_matches(tmp_path):
    import os
    env = dict(os.environ, SURFTRAP_DISABLE_NUMBA="1")
    out = tmp_path / "m.csv"
    cmd = [sys.executable, "-m", "surftrap.cli", "minimize", "--out", str(out), *CASES["minimize"]]
    proc = subprocess.run(cmd, capture_output=True, text=True, env=env)
    assert proc.returncode == 0, proc.stderr
    _, meta, header, rows = read_csv(out.read_text())
    _, _, gheader, grows = read_csv((GOLDEN / "minimize.csv").read_text())
    assert header == gheader
    assert all(_close(a, b, 1e-7) for a, b in zip(rows[0], grows[0]))


if __name__ == "__main__":
    if "--regen" in sys.argv:
        GOLDEN.mkdir(exist_ok=True)
        for name in CASES:
            assert run(name, GOLDEN / f"{name}.csv") == 0
            print("wrote", GOLDEN / f"{name}.csv")
