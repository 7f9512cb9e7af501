import json

import numpy as np
import pytest

from loewner_lab.cli import EXIT_CONFIG, EXIT_USAGE, Env, evaluate, main
from loewner_lab.divergence import theta
from loewner_lab.errors import ParseError
from loewner_lab.functions import affine, apply_function, power
from loewner_lab.io import field_to_json, matrix_from_json, matrix_to_json
from loewner_lab.maps import OperatorField, compression, map_to_dict
from loewner_lab.means import mean_geometric, mean_harmonic, perspective
from loewner_lab.sampling import random_field, random_spd


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_worked_example_default(capsys):
    code, out, _ = run(capsys, "paper-example")
    assert code == 0
    assert "[ 1.1945, -0.2706]" in out and "[ 1.2420, -0.3261]" in out
    assert "chain strict: yes" in out


def test_worked_example_tight_tolerance(capsys):
    code, _, err = run(capsys, "paper-example", "--tolerance", "1e-12")
    assert code == 1
    assert "mismatch" in err and "Phi(f(A))" in err


def test_worked_example_json(capsys):
    code, out, _ = run(capsys, "worked-example", "--json", "--precision", "6")
    assert code == 0
    rep = json.loads(out)
    assert rep["matches"] and rep["strict"]
    m = matrix_from_json(rep["entries"]["f(Phi(A))"]["computed"])
    assert m[0, 0] == pytest.approx(1.194478, abs=1e-6)
    fixture = matrix_from_json(rep["entries"]["Phi(f(A))"]["fixture"])
    assert fixture[1, 1] == 0.7234


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"checks": ["log_convex_def", "mean_sharp"], "dims": [2, 3], "trials": 5, "seed": 7, "function": "inverse"}))
    return path


def test_campaign_deterministic(capsys, config_file):
    code1, out1, _ = run(capsys, "campaign", "--config", str(config_file))
    code2, out2, _ = run(capsys, "campaign", "--config", str(config_file))
    assert code1 == code2 == 0
    assert out1 == out2
    lines = out1.splitlines()
    assert [json.loads(x)["checkName"] for x in lines] == ["log_convex_def", "mean_sharp"]
    _, out3, _ = run(capsys, "campaign", "--config", str(config_file), "--seed", "8")
    assert out3 != out1


def test_campaign_exit_code_counts_failures(capsys):
    code, out, _ = run(capsys, "campaign", "--checks", "log_convex_def", "--function", "power:2", "--dims", "2", "--trials", "7")
    failures = json.loads(out)["failures"]
    assert code == len(failures) > 0
    code, _, _ = run(capsys, "campaign", "--checks", "log_convex_def", "--function", "power:2", "--dims", "2,3", "--trials", "200")
    assert code == 100


@pytest.mark.parametrize(
    "content",
    ['{"checks": ["nope"]}', '{"checks": ["all"], "trials": "many"}', '{"checks": [', "[1, 2]", '{"dims": [2]}'],
)
def test_campaign_bad_config(capsys, tmp_path, content):
    path = tmp_path / "bad.json"
    path.write_text(content)
    code, out, err = run(capsys, "campaign", "--config", str(path))
    assert code == EXIT_CONFIG and out == "" and err.startswith("error:")


def test_campaign_missing_config(capsys, tmp_path):
    code, _, _ = run(capsys, "campaign", "--config", str(tmp_path / "missing.json"))
    assert code == EXIT_CONFIG


def test_classify_exit_codes(capsys):
    code, out, _ = run(capsys, "classify", "inverse", "--trials", "20", "--dims", "2")
    assert code == 0 and json.loads(out)["consistent"]
    code, out, _ = run(capsys, "classify", "power:2", "--trials", "100", "--dims", "2", "--compact")
    assert code == 2 and json.loads(out)["counterexampleFound"]
    code, _, err = run(capsys, "classify", "sqrt")
    assert code == 1 and "unknown function" in err


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as info:
        main(["campaign", "--dims", "a,b"])
    assert info.value.code == EXIT_USAGE


@pytest.fixture
def bound(tmp_path):
    rng = np.random.default_rng(0)
    X, Y, Z = random_spd(3, rng), random_spd(3, rng), random_spd(2, rng)
    F = random_field(3, 2, rng)
    G = random_field(3, 2, rng, F.weights)
    phi = compression(3, (0, 2))
    files = {}
    for name, M in {"X": X, "Y": Y, "Z": Z}.items():
        files[name] = tmp_path / f"{name}.json"
        files[name].write_text(json.dumps(matrix_to_json(M)))
    for name, fld in {"F": F, "G": G}.items():
        files[name] = tmp_path / f"{name}.json"
        files[name].write_text(json.dumps(field_to_json(fld)))
    files["M"] = tmp_path / "M.json"
    files["M"].write_text(json.dumps(map_to_dict(phi)))
    args = [f"--matrix={n}={files[n]}" for n in "XYZ"] + [f"--field={n}={files[n]}" for n in "FG"] + [f"--map=M={files['M']}"]
    return {"X": X, "Y": Y, "Z": Z, "F": F, "G": G, "M": phi}, args


def _eval(capsys, args, expr):
    code, out, err = run(capsys, "eval", expr, *args)
    assert code == 0, err
    return matrix_from_json(json.loads(out))


def test_eval_composes_like_the_library(capsys, bound):
    v, args = bound
    X, Y, Z, F, G, phi = (v[k] for k in "XYZFGM")
    cases = {
        "mean(sharp, X, Y)": mean_geometric(X, Y),
        "mean(harm, fn(power:-0.5, X), Y)": mean_harmonic(apply_function(power(-0.5), X), Y),
        "persp(affine:0.5,2, X, mean(nabla, X, Y))": perspective(affine(0.5, 2.0), X, (X + Y) / 2),
        "theta(power:-0.25, F, G)": theta(power(-0.25), F, G),
        "mean(sharp, map(M, fn(inverse, X)), Z)": mean_geometric(phi(np.linalg.inv(X)), Z),
        "fn(power:-0.5, map(M, persp(inverse, X, Y)))": apply_function(power(-0.5), phi(Y @ np.linalg.inv(X) @ Y)),
    }
    for expr, expected in cases.items():
        got = _eval(capsys, args, expr)
        np.testing.assert_allclose(got, expected, atol=1e-12 * (1 + np.max(np.abs(expected))), rtol=0, err_msg=expr)


def test_eval_precision(capsys, bound):
    _, args = bound
    code, out, _ = run(capsys, "eval", "X", "--precision", "2", *args)
    assert code == 0
    assert all(round(x, 2) == x for row in json.loads(out)["re"] for x in row)


@pytest.mark.parametrize(
    "expr, position",
    [
        ("mean(sharp, X, W)", 15),
        ("mean(sharp X, Y)", 11),
        ("mean(median, X, Y)", 5),
        ("fn(power:-0.5, X", 16),
        ("fn(sqrt, X)", 3),
        ("foo(X)", 0),
        ("X Y", 2),
        ("theta(inverse, F, X)", 18),
        ("", 0),
    ],
)
def test_eval_parse_errors(bound, expr, position):
    v, _ = bound
    env = Env({k: v[k] for k in "XYZ"}, {k: v[k] for k in "FG"}, {"M": v["M"]})
    with pytest.raises(ParseError) as info:
        evaluate(expr, env)
    assert info.value.position == position


def test_eval_runtime_errors(capsys, bound):
    _, args = bound
    code, _, err = run(capsys, "eval", "mean(sharp, X, Z)", *args)
    assert code == 1 and "error" in err
    code, _, err = run(capsys, "eval", "map(M, Z)", *args)
    assert code == 1
    code, _, err = run(capsys, "eval", "X", "--matrix", "broken")
    assert code == 1 and "NAME=FILE" in err
