import json
import subprocess
import sys

import pytest

from fockquant.cli import main
from fockquant.experiments import EXPERIMENTS


def test_list(capsys):
    assert main(["list"]) == 0
    lines = capsys.readouterr().out.strip().split("\n")
    assert [ln.split("\t")[0] for ln in lines] == list(EXPERIMENTS)
    assert len(lines) == 11


def test_defaults(capsys):
    assert main(["defaults", "normal-approx"]) == 0
    assert json.loads(capsys.readouterr().out) == EXPERIMENTS["normal-approx"].defaults
    assert main(["defaults", "nope"]) == 2


def test_run_writes_outputs(tmp_path, capsys):
    out = tmp_path / "o"
    assert main(["run", "normal-approx", "--out", str(out)]) == 0
    assert capsys.readouterr().out.strip() == "normal-approx: PASS"
    assert sorted(p.name for p in out.iterdir()) == ["errors.png", "normal.csv", "verdict.json"]
    v = json.loads((out / "verdict.json").read_text())
    assert v["pass"] is True and v["experiment"] == "normal-approx"


def test_failing_run_exits_one(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"tol": 1e-12}))
    assert main(["run", "normal-approx", "--config", str(cfg), "--out", str(tmp_path / "o"),
                 "--no-figures"]) == 1
    assert json.loads((tmp_path / "o" / "verdict.json").read_text())["pass"] is False


@pytest.mark.parametrize("exp_id,config", [
    ("normal-approx", "{not json"),
    ("normal-approx", json.dumps({"bogus": 1})),
    ("normal-approx", json.dumps({"tol": "small"})),
    ("nope", None),
    ("hepp-sweep", json.dumps({"t": 10.0})),
])
def test_errors_exit_two_without_output(tmp_path, exp_id, config):
    args = ["run", exp_id, "--out", str(tmp_path / "o")]
    if config is not None:
        (tmp_path / "c.json").write_text(config)
        args += ["--config", str(tmp_path / "c.json")]
    assert main(args) == 2
    assert not (tmp_path / "o").exists()


def test_bad_flags_exit_two(tmp_path):
    assert main(["run", "normal-approx", "--jobs", "0", "--out", str(tmp_path / "o")]) == 2
    assert not (tmp_path / "o").exists()


def test_deterministic_bytes(tmp_path):
    for name in ("a", "b"):
        assert main(["run", "dyson-sweep", "--seed", "3", "--out", str(tmp_path / name)]) == 0
    for p in (tmp_path / "a").iterdir():
        assert p.read_bytes() == (tmp_path / "b" / p.name).read_bytes(), p.name


def test_jobs_do_not_change_results(tmp_path):
    for name, jobs in (("one", "1"), ("two", "2")):
        assert main(["run", "dyson-sweep", "--jobs", jobs, "--no-figures",
                     "--out", str(tmp_path / name)]) == 0
    for p in (tmp_path / "one").iterdir():
        assert p.read_bytes() == (tmp_path / "two" / p.name).read_bytes(), p.name


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "fockquant", "-v", "list"], capture_output=True,
                       text=True, check=True)
    assert r.stdout.startswith("algebra-verify\t")
