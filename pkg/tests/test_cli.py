import csv
import io
import json
import math
import subprocess
import sys

import pytest

from lipradon import __version__
from lipradon.cli import main
from lipradon.construction import area_of_E
from lipradon.field import QS3


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def read_csv(text):
    meta = {}
    body = []
    for line in text.splitlines():
        if line.startswith("#"):
            k, _, v = line[2:].partition("=")
            meta[k] = v
        else:
            body.append(line)
    return meta, list(csv.reader(io.StringIO("\n".join(body))))


def test_verify_fj(capsys):
    code, out, err = run(["verify", "--suite", "fj", "--levels", "4"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["passed"] and rep["metadata"]["suite"] == "fj"
    assert set(rep["details"]) == {f"fj[j={j}]" for j in range(5)}
    assert "[PASS]" in err


def test_profile_omega0(tmp_path, capsys):
    path = tmp_path / "p.json"
    assert main(["profile", "--omega", "omega0", "--levels", "6", "--mode", "exact", "--out", str(path)]) == 0
    data = json.loads(path.read_text())
    assert data["metadata"]["mode"] == "exact" and data["metadata"]["J"] == 6
    assert QS3.from_json(data["metrics"]["integral"]["exact"]) == area_of_E(6)
    bps = data["float"]["breakpoints"]
    assert bps == pytest.approx([-t for t in reversed(bps)], abs=0)


def test_profile_generic_defaults_to_float(capsys):
    code, out, _ = run(["profile", "--omega", "12.5", "--levels", "3"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["mode"] == "float"
    assert data["metrics"]["integral"] == pytest.approx(area_of_E(3).to_float(), rel=1e-12)


def test_float_mode_at_special_is_usage_error(capsys):
    code, _, err = run(["profile", "--omega", "omega1perp", "--levels", "3", "--mode", "float"], capsys)
    assert code == 2 and "float mode" in err


def test_bad_direction_is_usage_error(capsys):
    code, _, _ = run(["profile", "--omega", "north", "--levels", "3"], capsys)
    assert code == 2


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as e:
        main(["verify", "--suite", "nope"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main(["construct", "--levels", "0"])
    assert e.value.code == 2


def test_sweep_csv(tmp_path, capsys):
    path = tmp_path / "s.csv"
    assert main(["sweep", "--grid", "72", "--levels", "4", "--out", str(path)]) == 0
    meta, rows = read_csv(path.read_text())
    assert rows[0] == ["omega_rad", "lip", "support", "sup", "integral"]
    assert len(rows) == 73
    assert meta["version"] == __version__ and meta["J"] == "4"
    assert all(math.isfinite(float(r[1])) for r in rows[1:])


def test_sweep_is_deterministic(tmp_path, monkeypatch, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["sweep", "--grid", "48", "--levels", "4", "--out", str(a)])
    monkeypatch.setenv("LIPRADON_THREADS", "2")
    main(["sweep", "--grid", "48", "--levels", "4", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_bad_thread_env(monkeypatch, capsys):
    monkeypatch.setenv("LIPRADON_THREADS", "0")
    code, _, _ = run(["sweep", "--grid", "4", "--levels", "2"], capsys)
    assert code == 2


def test_construct(capsys):
    code, out, _ = run(["construct", "--levels", "2"], capsys)
    data = json.loads(out)
    assert code == 0 and data["J"] == 2 and data["metadata"]["command"] == "construct"
    assert len(data["catalogue"]) == 7


@pytest.mark.parametrize("suite", ["Fk", "special", "claim", "bounds"])
def test_other_suites_pass(suite, capsys):
    levels = {"Fk": "4", "special": "4", "claim": "5", "bounds": "4"}[suite]
    code, out, _ = run(["verify", "--suite", suite, "--levels", levels], capsys)
    assert code == 0, out[:500]


def test_failing_suite_exits_1(monkeypatch, capsys):
    from lipradon import cli
    from lipradon.report import Report

    def broken(name, levels, seed):
        rep = Report("broken")
        rep.check(False, reason="forced")
        return rep

    monkeypatch.setattr(cli, "_run_suite", broken)
    code, out, _ = run(["verify", "--suite", "fj"], capsys)
    assert code == 1
    assert json.loads(out)["failures"] == [{"reason": "forced"}]


def test_sobolev_gagliardo_csv(capsys):
    code, out, _ = run(["sobolev", "--check", "gagliardo", "--delta-min", str(2.0**-8),
                        "--samples", "20000", "--seed", "3"], capsys)
    meta, rows = read_csv(out)
    assert code == 0
    assert rows[0] == ["delta", "value", "ci"] and len(rows) == 1 + 5
    assert meta["seed"] == "3"
    vals = [float(r[1]) for r in rows[1:]]
    assert vals == sorted(vals)


def test_sobolev_gagliardo_deterministic(capsys):
    argv = ["sobolev", "--check", "gagliardo", "--delta-min", "0.01", "--samples", "5000", "--seed", "9"]
    _, a, _ = run(argv, capsys)
    _, b, _ = run(argv, capsys)
    assert a == b


def test_sobolev_slice_and_chain(capsys):
    code, out, _ = run(["sobolev", "--check", "slice"], capsys)
    assert code == 0 and len(read_csv(out)[1]) == 4
    code, out, _ = run(["sobolev", "--check", "chain", "--levels", "3", "--grid", "72"], capsys)
    _, rows = read_csv(out)
    assert code == 0 and float(rows[1][1]) <= float(rows[1][2])
    code, _, _ = run(["sobolev", "--check", "chain", "--grid", "90"], capsys)
    assert code == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "lipradon", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and __version__ in res.stdout
