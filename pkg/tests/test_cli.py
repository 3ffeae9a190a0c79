import cmath
import io
import json
import random
import subprocess
import sys

import pytest

from conftest import A2
from weilzeta.cli import main
from weilzeta.lfun import synthetic_table


def run(argv):
    out = io.StringIO()
    code = main(argv, out)
    return code, out.getvalue()


@pytest.fixture
def a2file(tmp_path):
    f = tmp_path / "a2.json"
    f.write_text(json.dumps({"gram": A2}))
    return str(f)


@pytest.fixture
def eigfile(tmp_path):
    rng = random.Random(3)
    tab, _ = synthetic_table([[2, 1], [1, 10]], 4, {p: cmath.exp(2j * cmath.pi * rng.random()) for p in (3, 5, 7, 11, 13)}, 10)
    f = tmp_path / "eig.json"
    f.write_text(json.dumps(tab.to_json()))
    return f, tab


def test_fqm_info(a2file):
    code, out = run(["fqm-info", a2file])
    d = json.loads(out)
    assert code == 0
    assert (d["order"], d["level"], d["signature_mod_8"], d["anisotropic"]) == (3, 3, 2, {"3": True})


def test_fqm_info_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"gram": [[2, 1], [0, 2]]}')
    assert run(["fqm-info", str(bad)])[0] == 2
    odd = tmp_path / "odd.json"
    odd.write_text('{"gram": [[2]]}')
    assert run(["fqm-info", str(odd)])[0] == 3
    assert run(["fqm-info", str(tmp_path / "missing.json")])[0] == 2
    u = tmp_path / "u.json"
    u.write_text('{"gram": [[0, 1], [1, 0]]}')
    code, out = run(["fqm-info", str(u)])
    assert code == 0 and json.loads(out)["order"] == 1


def test_verify_weil_mult_and_determinism(a2file):
    c1, o1 = run(["verify", a2file, "--suite", "weil-mult", "--seed", "5"])
    c2, o2 = run(["verify", a2file, "--suite", "weil-mult", "--seed", "5"])
    assert c1 == 0 and o1 == o2


def test_verify_corrupted_q(a2file):
    code, out = run(["verify", a2file, "--suite", "weil-mult", "--corrupt-q"])
    d = json.loads(out)
    assert code == 1
    failed = [r for r in d["suites"]["weil-mult"] if not r["passed"]]
    assert failed and failed[0]["counterexample"]


def test_verify_unknown_suite(a2file):
    assert run(["verify", a2file, "--suite", "nope"])[0] == 2


def test_verify_zeta_factor(a2file):
    assert run(["verify", a2file, "--suite", "zeta-factor"])[0] == 0


def test_verify_theorem_57_a2(a2file):
    # the coprime check passes; the bad-prime check at 3 fails (see README)
    code, out = run(["verify", a2file, "--suite", "theorem-5-7"])
    res = {r["prime"]: r["passed"] for r in json.loads(out)["suites"]["theorem-5-7"]}
    assert res == {5: True, 3: False} and code == 1


def test_lfunction(eigfile):
    f, _ = eigfile
    code, out = run(["lfunction", str(f), "--s", "4,6,8+2i"])
    d = json.loads(out)
    assert code == 0
    assert all(v["residual"] < 1e-9 for v in d["values"])
    x = d["primes"]["5"]
    assert (x["x1"]["re"] ** 2 + x["x1"]["im"] ** 2) >= (x["x2"]["re"] ** 2 + x["x2"]["im"] ** 2) - 1e-12
    code, csv_out = run(["lfunction", str(f), "--s", "4", "--format", "csv"])
    assert code == 0 and csv_out.splitlines()[0].startswith("s_re,")


def test_lfunction_missing_prime(eigfile, tmp_path, caplog):
    _, tab = eigfile
    d = tab.to_json()
    del d["primes"]["3"]
    g = tmp_path / "no3.json"
    g.write_text(json.dumps(d))
    code, out = run(["lfunction", str(g), "--s", "4"])
    assert code == 0
    assert any("prime 3" in w for w in json.loads(out)["warnings"])


def test_lfunction_errors(eigfile, tmp_path):
    _, tab = eigfile
    d = tab.to_json()
    d["gram"] = [[2, 1], [1, 14]]
    g = tmp_path / "nsf.json"
    g.write_text(json.dumps(d))
    assert run(["lfunction", str(g), "--s", "4"])[0] == 3
    d = tab.to_json()
    d["primes"]["5"] = [1, float("nan"), 0]   # no character reproduces this
    g.write_text(json.dumps(d))
    code, out = run(["lfunction", str(g), "--s", "4"])
    assert code == 4 and "5" in json.loads(out)["degenerate"]
    assert run(["lfunction", str(g), "--s", "abc"])[0] == 2
    g.write_text("{")
    assert run(["lfunction", str(g), "--s", "4"])[0] == 2


def test_threads_value_identical(eigfile, monkeypatch):
    f, _ = eigfile
    single = run(["lfunction", str(f), "--s", "4"])[1]
    monkeypatch.setenv("WEILZETA_THREADS", "4")
    assert run(["lfunction", str(f), "--s", "4"])[1] == single


def test_console_entry_point(a2file):
    r = subprocess.run([sys.executable, "-m", "weilzeta", "fqm-info", a2file], capture_output=True, text=True)
    assert r.returncode == 0 and '"order": 3' in r.stdout
    r = subprocess.run([sys.executable, "-m", "weilzeta", "bogus"], capture_output=True, text=True)
    assert r.returncode == 2
