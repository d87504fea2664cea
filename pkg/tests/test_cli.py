import json
import subprocess
import sys
from fractions import Fraction

import pytest

from padicops.cli import main
from padicops.config import ENV_VAR
from padicops.io import operator_from_obj, operator_to_json, scalar_to_text
from padicops.operators import Diagonal, FiniteMatrix, Identity, op_agree
from padicops.scalars import Padic


@pytest.fixture
def opfile(tmp_path):
    count = [0]

    def write(op, precision=None):
        count[0] += 1
        path = tmp_path / f"op{count[0]}.json"
        path.write_text(operator_to_json(op, precision))
        return str(path)

    return write


def diag(p, values):
    return Diagonal(p, {i: Padic.from_int(v, p) for i, v in enumerate(values)})


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_scale_finite_prints_plain_exponent(capsys, opfile):
    third = Padic.one(3) / Padic.from_int(3, 3)
    path = opfile(Diagonal(3, {0: third, 1: Padic.from_int(3, 3), 2: Padic.one(3)}))
    code, out, err = run(capsys, "scale", "finite", "--in", path)
    assert code == 0 and err == ""
    assert out == "p^1\n"


def test_scale_finite_global_flags_after_action(capsys, opfile):
    path = opfile(FiniteMatrix(3, {(0, 0): Padic.one(3)}))
    code, out, _ = run(capsys, "scale", "finite", "--in", path,
                       "--p", "3", "--precision", "40")
    assert code == 0 and out == "p^0\n"


def test_scale_probe_tsv(capsys, opfile):
    path = opfile(Identity(3))
    code, out, _ = run(capsys, "scale", "probe", "--in", path, "--bounds", "1,2")
    assert code == 0
    assert out == "k\tscale_exponent\n1\t0\n2\t0\n"


def test_scale_finite_needs_small_window(capsys, opfile):
    path = opfile(FiniteMatrix(3, {(10, 10): Padic.one(3)}))
    code, _, err = run(capsys, "scale", "finite", "--in", path)
    assert code == 2
    assert json.loads(err)["error"] == "ValueError"
    path = opfile(Identity(3))
    code, _, err = run(capsys, "scale", "finite", "--in", path)
    assert code == 2
    assert json.loads(err)["error"] == "PreconditionFailed"


def test_mahler_expand_and_eval(capsys, tmp_path):
    samples = tmp_path / "samples.json"
    samples.write_text(json.dumps({
        "p": 3, "precision": 40,
        "samples": [scalar_to_text(Padic.from_int(n * n, 3)) for n in range(5)],
    }))
    code, out, _ = run(capsys, "mahler", "expand", "--in", str(samples))
    assert code == 0
    obj = json.loads(out)
    assert obj["coefficients"] == ["0", "3^0*1", "3^0*2", "0", "0"]
    assert obj["tail_exponent"] is None
    fnfile = tmp_path / "fn.json"
    fnfile.write_text(out)
    code, out, _ = run(capsys, "mahler", "eval", "--in", str(fnfile), "--x", "3^0*21")
    assert code == 0
    assert out == "3^0*122\n"  # f(5) = 25


def test_calculus_certify_tsv(capsys, opfile):
    path = opfile(diag(3, [28, 27]))
    code, out, _ = run(capsys, "calculus", "certify", "--in", path, "--depth", "6")
    assert code == 0
    assert out == ("n\tnorm_exponent\n"
                   "1\t0\n2\t3\n3\t3\n4\t3\n5\t4\n6\t4\n")


def test_calculus_apply(capsys, opfile, tmp_path):
    fnfile = tmp_path / "fn.json"
    fnfile.write_text(json.dumps({
        "p": 3, "precision": 40,
        "coefficients": ["0", "3^0*1", "3^0*2"],
        "tail_exponent": None,
    }))
    path = opfile(diag(3, [2, 4]))
    code, out, _ = run(capsys, "calculus", "apply", "--in", path, "--fn", str(fnfile))
    assert code == 0
    obj = json.loads(out)
    assert obj["error_exponent"] == "inf"
    result = operator_from_obj(obj["result"])
    assert op_agree(result, diag(3, [4, 16]), 30)


def test_calculus_fz_depth_and_error(capsys, opfile):
    path = opfile(diag(3, [1, 4]))
    code, out, _ = run(capsys, "calculus", "fz", "--in", path, "--z", "3^1*1",
                       "--depth", "8")
    assert code == 0
    obj = json.loads(out)
    assert obj["error_exponent"] == "9"
    assert obj["result"]["p"] == 3


def test_calculus_teich_trace(capsys, opfile, tmp_path):
    path = opfile(diag(5, [7, 5]))
    tracefile = tmp_path / "trace.tsv"
    code, out, _ = run(capsys, "calculus", "teich-idem", "--in", path,
                       "--target", "12", "--trace", str(tracefile))
    assert code == 0
    obj = json.loads(out)
    assert obj["iterations"] >= 2
    lines = tracefile.read_text().splitlines()
    assert lines[0] == "k\tgap_exponent"
    assert len(lines) == obj["iterations"]
    e = operator_from_obj(obj["e"])
    # value 7 is a unit, value 5 and the zero default are topologically nilpotent
    want = Diagonal(5, {0: Padic.zero(5)}, Padic.one(5))
    assert op_agree(e, want, 12)


def test_calculus_teich_budget_exhaustion(capsys, opfile):
    path = opfile(diag(3, [28]))
    code, _, err = run(capsys, "calculus", "teich-idem", "--in", path, "--budget", "3")
    assert code == 3
    report = json.loads(err)
    assert report["error"] == "NoConvergence"
    assert report["iterations"] == 3


def test_idem_refine_example(capsys, opfile):
    path = opfile(diag(3, [28, 27]))
    code, out, _ = run(capsys, "idem", "refine", "--in", path)
    assert code == 0
    obj = json.loads(out)
    assert obj["distance_exponent"] == "3"
    e = operator_from_obj(obj["e"])
    assert op_agree(e, FiniteMatrix(3, {(0, 0): Padic.one(3)}), 30)


def test_idem_refine_is_deterministic(capsys, opfile):
    path = opfile(diag(3, [28, 27]))
    _, first, _ = run(capsys, "idem", "refine", "--in", path)
    _, second, _ = run(capsys, "idem", "refine", "--in", path)
    assert first == second


def test_idem_refine_precondition(capsys, opfile):
    path = opfile(diag(3, [2]))
    code, _, err = run(capsys, "idem", "refine", "--in", path)
    assert code == 2
    assert json.loads(err)["error"] == "PreconditionFailed"


def test_idem_equiv(capsys, opfile):
    e = FiniteMatrix(3, {(0, 0): Padic.one(3)})
    f = FiniteMatrix(3, {(0, 0): Padic.one(3), (0, 1): Padic.from_int(-9, 3)})
    pe, pf = opfile(e), opfile(f)
    code, out, _ = run(capsys, "idem", "equiv", "--in", pe, "--in2", pf)
    assert code == 0
    obj = json.loads(out)
    u = operator_from_obj(obj["u"])
    u_inv = operator_from_obj(obj["u_inv"])
    assert op_agree(u * e * u_inv, f, 30)


def test_idem_split(capsys, opfile):
    e = FiniteMatrix(3, {
        (0, 0): Padic.from_int(4, 3),
        (0, 1): Padic.from_fraction(Fraction(-1, 3), 3),
        (1, 0): Padic.from_int(36, 3),
        (1, 1): Padic.from_int(-3, 3),
    })
    code, out, _ = run(capsys, "idem", "split", "--in", opfile(e))
    assert code == 0
    obj = json.loads(out)
    f = operator_from_obj(obj["f"])
    g = operator_from_obj(obj["g"])
    assert op_agree(f + g, e, 30)


def test_idem_lift(capsys, opfile):
    path = opfile(Diagonal(3, {0: Padic.from_int(28, 3)}))
    code, out, _ = run(capsys, "idem", "lift", "--in", path)
    assert code == 0
    e = operator_from_obj(json.loads(out)["e"])
    assert op_agree(e * e, e, 30)


def test_idem_trivialize_transcript(capsys, opfile):
    path = opfile(FiniteMatrix(3, {(0, 0): Padic.one(3)}))
    code, out, _ = run(capsys, "idem", "trivialize", "--in", path, "--prefix", "4")
    assert code == 0
    obj = json.loads(out)
    assert obj["zero_input"] is False
    assert obj["classes"] == {"finite_rank": 0, "contractive": 0}
    assert obj["contractive_part"]["spread_depth"] == 3
    assert all(obj["contractive_part"]["sum_ring_relations_on_prefix"].values())


def test_idem_sumring(capsys, opfile):
    path = opfile(FiniteMatrix(3, {(0, 0): Padic.one(3)}))
    code, out, _ = run(capsys, "idem", "sumring", "--in", path, "--depth", "1")
    assert code == 0
    obj = json.loads(out)
    assert obj["kind"] == "finite"
    assert obj["entries"] == [[0, 0, "3^0*1"], [1, 1, "3^0*1"]]


def test_parse_failures_exit_4(capsys, tmp_path, opfile):
    code, _, err = run(capsys, "scale", "finite", "--in", str(tmp_path / "nope.json"))
    assert code == 4
    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    code, _, err = run(capsys, "scale", "finite", "--in", str(bad))
    assert code == 4
    assert json.loads(err)["error"] == "ParseError"
    # argparse problems are parse errors too
    code, _, err = run(capsys, "scale", "finite")
    assert code == 4
    code, _, err = run(capsys, "scale", "warp", "--in", opfile(Identity(3)))
    assert code == 4


def test_config_file_pickup(capsys, opfile, tmp_path, monkeypatch):
    badcfg = tmp_path / "cfg.json"
    badcfg.write_text(json.dumps({"prime": 4}))
    path = opfile(Identity(3))
    code, _, err = run(capsys, "scale", "probe", "--in", path, "--bounds", "1",
                       "--config", str(badcfg))
    assert code == 4
    monkeypatch.setenv(ENV_VAR, str(badcfg))
    code, _, _ = run(capsys, "scale", "probe", "--in", path, "--bounds", "1")
    assert code == 4
    monkeypatch.delenv(ENV_VAR)
    code, _, _ = run(capsys, "scale", "probe", "--in", path, "--bounds", "1")
    assert code == 0


def test_module_invocation_smoke(tmp_path):
    opjson = operator_to_json(Diagonal(3, {0: Padic.one(3)}))
    path = tmp_path / "op.json"
    path.write_text(opjson)
    proc = subprocess.run(
        [sys.executable, "-m", "padicops.cli", "scale", "finite", "--in", str(path)],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout == "p^0\n"
