import json
import math
import subprocess
import sys

import pytest

from sparsegof import __version__
from sparsegof.cli import build_parser, main


@pytest.fixture
def files(tmp_path):
    counts = tmp_path / "counts.txt"
    counts.write_text("# observed\n3\n1\n")
    probs = tmp_path / "probs.txt"
    probs.write_text("1/2\n1/2\n")
    uniform = tmp_path / "uniform50.txt"
    uniform.write_text("\n".join(["0.02"] * 50) + "\n")
    return {"counts": str(counts), "probs": str(probs), "uniform": str(uniform), "dir": tmp_path}


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_pvalue_example(capsys, files):
    code, out, _ = run(capsys, "pvalue", "--stat", "chi2", "--counts", files["counts"], "--probs", files["probs"])
    assert code == 0
    doc = json.loads(out)
    res = doc["result"]
    assert res["statistic"] == 1.0 and res["n"] == 4
    for key in ("x", "p_upper", "p_lower", "caps", "cap_ratios", "flags", "k_tilde", "x_max"):
        assert key in res
    assert doc["invocation"]["subcommand"] == "pvalue"
    assert doc["invocation"]["version"] == __version__
    assert doc["invocation"]["flags"]["stat"] == "chi2"


def test_pvalue_lr_and_csv(capsys, files):
    with pytest.warns(RuntimeWarning, match="mean cell count"):
        code, out, _ = run(capsys, "pvalue", "--stat", "lr", "--counts", files["counts"], "--probs",
                           files["probs"], "--format", "csv")
    assert code == 0
    head, row = out.strip().splitlines()
    assert head.startswith("kind,N,n,statistic")
    assert float(row.split(",")[3]) == pytest.approx(1.0464962875290957)


def test_pvalue_n_mismatch_is_validation_error(capsys, files):
    code, _, err = run(capsys, "pvalue", "--stat", "chi2", "--counts", files["counts"], "--probs",
                       files["probs"], "--n", "5")
    assert code == 2 and "disagrees" in err


def test_missing_file_is_validation_error(capsys, files):
    code, _, _ = run(capsys, "pvalue", "--stat", "chi2", "--counts", "/nonexistent", "--probs", files["probs"])
    assert code == 2


def test_moments_example(capsys):
    code, out, _ = run(capsys, "moments", "--order", "6", "--lambda", "1")
    assert code == 0
    res = json.loads(out)["result"]
    assert res["value"] == 41
    assert [c["scaled"] for c in res["coefficients"]] == [1, 25, 15]


def test_moments_exact_and_csv(capsys):
    code, out, _ = run(capsys, "moments", "--order", "4", "--lambda", "1/3", "--exact-rational")
    assert json.loads(out)["result"]["value"] == "2/3"
    code, out, _ = run(capsys, "moments", "--order", "4", "--lambda", "2", "--format", "csv")
    assert out.splitlines()[0] == "nu,l,numerator,denominator"


def test_moments_out_of_range(capsys):
    code, _, _ = run(capsys, "moments", "--order", "41", "--lambda", "1")
    assert code == 2


def test_exact_example(capsys, files):
    code, out, _ = run(capsys, "exact", "--n", "2", "--probs", files["probs"], "--stat", "chi2",
                       "--threshold", "2")
    assert code == 0
    res = json.loads(out)["result"]
    assert res["tail"] == 0.5 and res["outcomes"] == 3 and res["mean"] == 1


def test_exact_guard_refusal(capsys, files):
    code, _, err = run(capsys, "exact", "--n", "60", "--probs", files["uniform"], "--stat", "chi2")
    assert code == 3 and "refused" in err


def test_cumulants_poisson_and_file(capsys, files):
    code, out, _ = run(capsys, "cumulants", "--lambda", "3", "--order", "8", "--exact-rational")
    assert json.loads(out)["result"]["cumulants"] == [0, 3, 3, 3, 3, 3, 3, 3]
    moments = files["dir"] / "moments.json"
    moments.write_text("[0, 2, 2, 14, 42]")
    code, out, _ = run(capsys, "cumulants", str(moments))
    assert json.loads(out)["result"]["cumulants"] == pytest.approx([0, 2, 2, 2, 2])


def test_cumulants_need_input(capsys):
    code, _, _ = run(capsys, "cumulants")
    assert code == 2


def test_profile_kinds(capsys, files):
    code, out, _ = run(capsys, "profile", "--stat", "chi2", "--probs", files["uniform"], "--n", "250")
    assert json.loads(out)["result"]["closed_form"]["sigma_sq"] == pytest.approx(100.0)
    code, out, _ = run(capsys, "profile", "--stat", "lr", "--probs", files["uniform"], "--n", "2500")
    res = json.loads(out)["result"]
    assert res["asymptotic"]["A"] == pytest.approx(res["numeric"]["A"], rel=1e-3)


def test_diagnose_never_fails(capsys, files):
    code, out, _ = run(capsys, "diagnose", "--stat", "chi2", "--probs", files["uniform"], "--n", "100",
                       "--x", "0,1,50")
    assert code == 0
    rows = json.loads(out)["result"]
    assert rows[0]["flags"]["zone"] == "inside"
    assert rows[2]["flags"]["zone"] == "outside zone"


def test_simulate_refusals(capsys, files):
    code, _, _ = run(capsys, "simulate", "--stat", "chi2", "--probs", files["uniform"], "--n", "100",
                     "--reps", "100")
    assert code == 2
    code, _, err = run(capsys, "simulate", "--stat", "chi2", "--probs", files["uniform"], "--n", "100",
                       "--reps", "60000000", "--x", "1,2")
    assert code == 3 and "budget" in err


def test_simulate_byte_identical_across_threads(capsys, files):
    outs = []
    for threads in ("1", "3"):
        out_path = files["dir"] / f"sim{threads}.csv"
        code, _, _ = run(capsys, "simulate", "--stat", "chi2", "--probs", files["uniform"], "--n", "100",
                         "--reps", "40000", "--x", "0.5,1,1.5", "--seed", "77", "--threads", threads,
                         "--format", "csv", "--out", str(out_path))
        assert code == 0
        outs.append(out_path.read_bytes())
    assert outs[0] == outs[1]
    assert outs[0].decode().splitlines()[0] == "kind,N,n,x,p_theory,p_hat,se,wilson_lo,wilson_hi,ratio,reps,seed"


def test_simulate_json_embeds_seed(capsys, files):
    code, out, _ = run(capsys, "simulate", "--stat", "lr", "--probs", files["uniform"], "--n", "500",
                       "--reps", "2000", "--seed", "123")
    doc = json.loads(out)
    assert doc["invocation"]["seed"] == 123
    assert doc["result"]["rows"][0]["p_theory"] == pytest.approx(0.5 * math.erfc(1 / math.sqrt(2)))


def test_unknown_flag_rejected(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["moments", "--order", "4", "--lambda", "1", "--bogus"])
    assert exc.value.code == 2


@pytest.mark.parametrize("sub", ["pvalue", "profile", "moments", "cumulants", "exact", "simulate", "diagnose"])
def test_help_lists_flags_with_defaults(sub):
    parser = build_parser()
    subparser = parser._subparsers._group_actions[0].choices[sub]
    text = subparser.format_help()
    for action in subparser._actions:
        for opt in action.option_strings:
            assert opt in text
    if sub == "simulate":
        for flag in ("--reps", "--seed", "--threads", "--x", "--format", "--out"):
            assert flag in text
        assert "default: 100000" in text


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "sparsegof", "moments", "--order", "2", "--lambda", "7.3",
                           "--format", "csv"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[1] == "2,1,1,2"
