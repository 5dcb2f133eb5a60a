import io
import json
import math
import subprocess
import sys

import pytest

from mulcalc import cli

UNIT_CIRCLE = json.dumps({"segments": [{"kind": "arc", "center": [0, 0], "radius": 1,
                                        "theta": [-math.pi, math.pi]}]})


@pytest.fixture
def circle_file(tmp_path):
    path = tmp_path / "unit_circle.json"
    path.write_text(UNIT_CIRCLE)
    return str(path)


@pytest.fixture
def seg_file(tmp_path):
    path = tmp_path / "seg.json"
    path.write_text(json.dumps({"segments": [{"kind": "line", "from": [0, 0], "to": [1, 1]}]}))
    return str(path)


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def lines(text):
    return dict(line.split(": ", 1) for line in text.strip().splitlines())


def test_star_deriv_prints_15_digits():
    code, out, _ = run("star-deriv", "--f", "z", "--z", "2+0i")
    assert code == 0
    value = lines(out)["value"]
    assert value == "1.64872127070013+0i"
    assert complex(value.replace("i", "j")) == pytest.approx(math.exp(0.5), rel=1e-14)


def test_star_deriv_n():
    code, out, _ = run("star-deriv-n", "--f", "1/z", "--z", "1", "--n", "3")
    assert code == 0 and lines(out)["value"].startswith("0.135335283236613")


def test_complex_int_exp_inverse_circle(circle_file):
    code, out, _ = run("complex-int", "--f", "exp(1/z)", "--curve", circle_file, "--branches", "2")
    assert code == 0
    rows = lines(out)
    for n in range(-2, 3):
        value = complex(rows[f"I*[{n}]"].replace("i", "j"))
        assert abs(value - 1) <= 1e-8
    assert out.count("W: ") == 1
    assert rows["single_valued"] == "true"


def test_complex_int_inline_curve_and_offset():
    curve = json.dumps({"segments": [{"kind": "line", "from": [0, 0], "to": [0.5, 0]}]})
    code, out, _ = run("complex-int", "--f", "e", "--curve", curve, "--anchor-offset", "1", "--format", "json")
    assert code == 0
    rec = json.loads(out)
    assert rec["results"]["distinct_count"] == 2
    assert rec["results"]["W"]["re"] == pytest.approx(-1)
    assert rec["format_version"] == cli.FORMAT_VERSION


def test_verify_ftc_json(seg_file):
    code, out, _ = run("verify", "ftc", "--f", "exp(c*z)", "--param", "c=1+1i", "--curve", seg_file,
                       "--format", "json")
    assert code == 0
    rec = json.loads(out)
    assert rec["passed"] is True
    assert isinstance(rec["results"]["matched_branch"], int)
    assert set(rec["results"]["lhs"]) == {"re", "im"}


def test_json_is_deterministic(seg_file):
    argv = ("verify", "ftc", "--f", "exp(c*z)", "--param", "c=1+1i", "--curve", seg_file, "--format", "json")
    assert run(*argv)[1] == run(*argv)[1]
    other = run("verify", "ftc", "--f", "exp(c*z)", "--param", "c=1+2i", "--curve", seg_file, "--format", "json")
    assert json.loads(other[1])["inputs_digest"] != json.loads(run(*argv)[1])["inputs_digest"]


def test_verify_fail_exit_code(circle_file):
    code, out, _ = run("verify", "concat", "--f", "exp(1/z)", "--curve", circle_file, "--split", "0",
                       "--tol", "1e-30")
    assert code == 1
    assert "passed: false" in out


@pytest.mark.parametrize("kind, extra", [
    ("closed", ["--f", "z"]),
    ("concat", ["--f", "exp(1/z)", "--split", "1.0"]),
    ("product", ["--f", "z", "--g", "exp(z)"]),
    ("reverse", ["--f", "z+2"]),
    ("power", ["--f", "z", "--n", "3"]),
])
def test_verify_kinds(circle_file, kind, extra):
    code, out, _ = run("verify", kind, "--curve", circle_file, *extra)
    assert code == 0 and "passed: true" in out


def test_real_commands(seg_file):
    code, out, _ = run("line-int", "--f", "2", "--curve", seg_file, "--measure", "dx")
    assert code == 0 and lines(out)["value"] == "2"
    code, out, _ = run("double-int", "--f", "exp(x*y)", "--rect", "0,1,0,1")
    assert code == 0 and float(lines(out)["value"]) == pytest.approx(math.exp(0.25), rel=1e-12)
    assert run("verify", "ftc-line", "--f", "exp(x*y)", "--curve", seg_file)[0] == 0
    assert run("verify", "green", "--f", "1", "--g", "exp(x)", "--rect", "0,1,0,1")[0] == 0


def test_cr_check():
    code, out, _ = run("cr-check", "--f", "conj(z)", "--z", "1+1i")
    assert code == 1 and float(lines(out)["residual_classic"]) >= 1.9
    assert run("cr-check", "--f", "exp(z)", "--z", "1+0.5i", "--polar")[0] == 0


def test_dump_samples(circle_file, tmp_path):
    path = tmp_path / "s.csv"
    run("complex-int", "--f", "z", "--curve", circle_file, "--dump-samples", str(path))
    header, first, *_ = path.read_text().splitlines()
    assert header == "t,z_re,z_im,logf_re,logf_im"
    assert float(first.split(",")[4]) == pytest.approx(math.pi)


@pytest.mark.parametrize("argv", [
    ["bogus"],
    ["star-deriv", "--f", "z+"],
    ["star-deriv", "--f", "z+", "--z", "1"],
    ["star-deriv", "--f", "c*z", "--z", "1"],
    ["star-deriv", "--f", "z", "--z", "1", "--param", "cc=1"],
    ["complex-int", "--f", "z", "--curve", "missing.json"],
    ["complex-int", "--f", "z", "--curve", "{\"segments\": []}"],
    ["double-int", "--f", "1", "--rect", "0,1"],
    ["star-deriv", "--f", "z", "--z", "1", "--panels", "0"],
])
def test_usage_errors(argv):
    assert run(*argv)[0] == cli.EXIT_USAGE


def test_numerical_failures(circle_file):
    assert run("complex-int", "--f", "z-1", "--curve", circle_file)[0] == cli.EXIT_NUMERIC
    assert run("star-deriv", "--f", "z", "--z", "0")[0] == cli.EXIT_NUMERIC
    assert run("line-int", "--f", "x", "--curve", circle_file)[0] == cli.EXIT_NUMERIC


def test_verify_all_suite():
    code, out, _ = run("verify", "all", "--suite", "paper")
    assert code == 0
    assert lines(out)["failed"] == "0"


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "mulcalc", "star-deriv", "--f", "z", "--z", "2+0i"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "value: 1.64872127070013+0i" in proc.stdout
