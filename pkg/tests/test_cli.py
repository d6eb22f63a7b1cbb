import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from freemaps.cli import main, run_to_string

from conftest import GROWTH_MAP, ORBIT_MAP

GOLDEN = Path(__file__).parent / "golden"

# (golden file, argv) pairs; regenerate with FREEMAPS_REGEN_GOLDEN=1
GOLDEN_CASES = [
    ("remnant_growth.json", ["remnant", "--map", GROWTH_MAP, "--format", "json"]),
    ("nielsen_growth.json", ["nielsen", "--map", GROWTH_MAP, "--power", "4", "--upto", "--no-timing", "--format", "json"]),
    ("dynamics_growth.json", ["dynamics", "--map", GROWTH_MAP, "--n-max", "4", "--l", "2", "--format", "json"]),
    ("remnant_orbit.json", ["remnant", "--map", ORBIT_MAP, "--format", "json"]),
    ("periodic_orbit.json", ["periodic", "--map", ORBIT_MAP, "--n", "3", "--list", "--census", "--certified", "1", "--format", "json"]),
]


@pytest.mark.parametrize("name,argv", GOLDEN_CASES, ids=[c[0] for c in GOLDEN_CASES])
def test_golden_json(name, argv):
    status, out = run_to_string(argv)
    assert status == 0
    path = GOLDEN / name
    if os.environ.get("FREEMAPS_REGEN_GOLDEN"):
        path.write_text(out, encoding="utf-8")
    assert json.loads(out) == json.loads(path.read_text(encoding="utf-8"))
    assert out == path.read_text(encoding="utf-8")


def test_golden_content_sanity():
    nielsen = json.loads((GOLDEN / "nielsen_growth.json").read_text())
    assert [r["N"] for r in nielsen["rows"]] == [3, 19, 93, 431]
    periodic = json.loads((GOLDEN / "periodic_orbit.json").read_text())
    assert periodic["fixed_points"] == 46 and periodic["census"] == {"1": 3, "3": 42}
    assert periodic["schema"] == "freemaps/1"


def test_nielsen_single_power_table():
    status, out = run_to_string(["nielsen", "--map", GROWTH_MAP, "--power", "3"])
    assert status == 0
    assert out.splitlines()[1].split()[:2] == ["3", "93"]


def test_periodic_census_table():
    status, out = run_to_string(["periodic", "--map", ORBIT_MAP, "--n", "3", "--census"])
    assert status == 0
    assert "total including base point: 46" in out
    assert "3: 42" in out


def test_periodic_list_csv():
    status, out = run_to_string(["periodic", "--map", ORBIT_MAP, "--n", "3", "--list", "--format", "csv"])
    lines = out.splitlines()
    assert status == 0 and lines[0] == "label,address,minimal_period,orbit"
    assert "6_3,2 4 8,3,6_3 18_3 33_3" in lines


def test_exact_density_from_cli():
    status, out = run_to_string(["density", "--predicate", "Sl=1", "--m", "2", "--p", "2", "--samples", "0", "--exact", "--format", "json"])
    assert status == 0
    assert json.loads(out)["rows"][0]["exact"] == "16/289"


def test_sampled_density_csv_file(tmp_path):
    target = tmp_path / "out.csv"
    argv = ["density", "--predicate", "remnant", "--m", "2", "--p", "3,6", "--samples", "500", "--seed", "42", "--csv", str(target)]
    status, out = run_to_string(argv)
    assert status == 0
    rows = target.read_text().splitlines()
    assert rows[0] == "m,p,predicate,samples,hits,estimate,ci_lo,ci_hi,seed" and len(rows) == 3
    assert run_to_string(argv)[1] == out


def test_threads_do_not_change_density(monkeypatch):
    argv = ["density", "--predicate", "Sl=1", "--m", "2", "--p", "6", "--samples", "2500", "--seed", "1", "--format", "csv"]
    _, serial = run_to_string(argv)
    _, flagged = run_to_string(argv + ["--threads", "2"])
    monkeypatch.setenv("NIELSEN_THREADS", "2")
    _, env = run_to_string(argv)
    assert serial == flagged == env


def test_remnant_check_status():
    assert run_to_string(["remnant", "--map", GROWTH_MAP, "--check", "Rk=4"])[0] == 0
    assert run_to_string(["remnant", "--map", GROWTH_MAP, "--check", "Rk=5"])[0] == 1
    assert run_to_string(["remnant", "--map", ORBIT_MAP, "--check", "Sl=1"])[0] == 0


def test_map_from_file(tmp_path):
    f = tmp_path / "map.txt"
    f.write_text(GROWTH_MAP + "\n")
    status, out = run_to_string(["nielsen", "--map", str(f), "--no-timing", "--format", "csv"])
    assert status == 0 and out.splitlines()[1] == "1,3,1,2,-2"


@pytest.mark.parametrize(
    "argv,status",
    [
        (["nielsen", "--map", "a->1; b->b"], 2),
        (["periodic", "--map", ORBIT_MAP, "--n", "3", "--certified", "2"], 2),
        (["nielsen", "--map", GROWTH_MAP, "--power", "5", "--length-cap", "100"], 3),
        (["periodic", "--map", ORBIT_MAP, "--n", "3", "--list", "--budget", "10"], 3),
        (["density", "--predicate", "true", "--m", "2", "--p", "4", "--exact", "--budget", "10"], 3),
        (["nielsen", "--map", "a->aA b; b->b"], 4),
        (["remnant", "--map", GROWTH_MAP, "--check", "Xk=1"], 4),
        (["density", "--predicate", "Sl=1", "--m", "2", "--p", "4"], 4),
        (["density", "--predicate", "nonsense", "--m", "2", "--p", "4", "--seed", "1"], 4),
    ],
)
def test_exit_codes(argv, status, capsys):
    assert run_to_string(argv)[0] == status
    assert "error:" in capsys.readouterr().err


def test_auto_reduce_warns(capsys):
    status, out = run_to_string(["remnant", "--map", "a->aA b; b->b", "--auto-reduce"])
    assert status == 0
    assert "warning" in capsys.readouterr().err


def test_usage_errors_exit_4():
    with pytest.raises(SystemExit) as info:
        main(["nielsen"])
    assert info.value.code == 4
    with pytest.raises(SystemExit) as info:
        main(["nielsen", "--map", GROWTH_MAP, "--power", "0"])
    assert info.value.code == 4


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "freemaps", "nielsen", "--map", GROWTH_MAP, "--power", "2", "--format", "json", "--no-timing"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["rows"][0]["N"] == 19
