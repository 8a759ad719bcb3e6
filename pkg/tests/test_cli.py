import csv
import io
import math
import subprocess
import sys

import numpy as np
import pytest

from symdisc.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def field(out, name):
    for line in out.splitlines():
        if line.startswith(name):
            return line.split()[-1]
    raise KeyError(name)


def test_bound_orthogonal(capsys):
    code, out, _ = run(capsys, "bound", "--coeffs", "0.7071,0.7071")
    assert code == 0
    assert float(field(out, "bound")) == pytest.approx(1.0, abs=1e-4)


def test_bound_theta(capsys):
    code, out, _ = run(capsys, "bound", "--theta", "0.3927")
    assert code == 0
    assert float(field(out, "bound")) == pytest.approx(0.29289, abs=1e-5)


def test_bound_coherent_two(capsys):
    code, out, _ = run(capsys, "bound", "--coherent", "--n", "2", "--alpha-sq", "0.5")
    assert code == 0
    assert float(field(out, "bound")) == pytest.approx(1 - math.exp(-1), abs=1e-14)


def test_bound_phase_of_alpha_irrelevant(capsys):
    _, a, _ = run(capsys, "bound", "--coherent", "--n", "5", "--alpha-sq", "2")
    _, b, _ = run(capsys, "bound", "--coherent", "--n", "5", "--alpha-re", "0", "--alpha-im", str(math.sqrt(2)))
    assert float(field(a, "bound")) == pytest.approx(float(field(b, "bound")), abs=1e-14)


def test_bound_degenerate_exit_2(capsys):
    code, _, err = run(capsys, "bound", "--coeffs", "1,0")
    assert code == 2
    assert "must be non-zero for all r" in err


def test_bound_requires_one_source(capsys):
    code, _, err = run(capsys, "bound")
    assert code == 2
    assert "exactly one" in err


def test_idp(capsys):
    code, out, _ = run(capsys, "idp", "--theta", str(math.pi / 8))
    assert code == 0
    assert float(field(out, "P_IDP")) == pytest.approx(1 - math.cos(math.pi / 4), abs=1e-12)
    assert float(field(out, "bound")) == pytest.approx(float(field(out, "P_IDP")), abs=1e-12)


def test_povm_coherent(capsys):
    code, out, _ = run(capsys, "povm", "--coherent", "--n", "3", "--alpha-sq", "1")
    assert code == 0
    assert float(field(out, "completeness residual")) <= 1e-9
    assert float(field(out, "zero-error residual")) <= 1e-9
    assert float(field(out, "lambda_max(E_D)")) == pytest.approx(1.0, abs=1e-9)


def test_povm_inadmissible_probs(capsys):
    code, _, _ = run(capsys, "povm", "--theta", "0.3", "--probs", "0.9,0.9")
    assert code == 2


def _sweep_rows(capsys, *extra):
    code, out, _ = run(capsys, "coherent-sweep", *extra, "--out", "-")
    assert code == 0
    return list(csv.reader(io.StringIO(out)))


def test_sweep_header_and_digits(capsys):
    rows = _sweep_rows(capsys, "--n", "3", "--alpha-sq-max", "2", "--points", "5")
    assert rows[0] == ["alpha_sq", "c2_0", "c2_1", "c2_2", "bound", "argmin"]
    assert len(rows) == 6
    for row in rows[1:]:
        values = [float(v) for v in row[:-1]]
        assert all(float(format(v, ".17g")) == v for v in values)
        assert sum(values[1:4]) == pytest.approx(1.0, abs=1e-10)


def test_sweep_two_states_closed_form(capsys):
    rows = _sweep_rows(capsys, "--n", "2", "--alpha-sq-max", "5", "--points", "101")
    x = np.array([float(r[0]) for r in rows[1:]])
    bound = np.array([float(r[3]) for r in rows[1:]])
    np.testing.assert_allclose(bound, 1 - np.exp(-2 * x), atol=1e-12)


def test_sweep_single_point_at_zero(capsys):
    rows = _sweep_rows(capsys, "--n", "4", "--alpha-sq-max", "0", "--points", "1")
    assert len(rows) == 2
    assert float(rows[1][1]) == 1.0
    assert float(rows[1][-2]) == 0.0


def test_sweep_to_file_lf_endings(tmp_path, capsys):
    path = tmp_path / "sweep.csv"
    code, out, _ = run(capsys, "coherent-sweep", "--n", "10", "--points", "1000", "--out", str(path))
    assert code == 0
    assert "bound nondecreasing: yes" in out
    data = path.read_bytes()
    assert b"\r" not in data
    assert data.count(b"\n") == 1001


def test_sweep_unwritable_exit_3(tmp_path, capsys):
    code, _, err = run(capsys, "coherent-sweep", "--n", "3", "--out", str(tmp_path / "missing" / "x.csv"))
    assert code == 3
    assert "cannot write" in err


def test_crossings_two_states(capsys):
    code, out, _ = run(capsys, "crossings", "--n", "2", "--max", "10")
    assert code == 0
    assert out.strip() == "no crossings"


def test_crossings_ten(capsys):
    code, out, _ = run(capsys, "crossings", "--n", "10", "--max", "10")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "alpha_sq,outgoing,incoming"
    assert len(lines) > 1


def test_simulate_two_state(capsys):
    code, out, _ = run(capsys, "simulate", "--theta", "0.3927", "--trials", "100000", "--seed", "7")
    assert code == 0
    assert int(field(out, "wrong conclusive")) == 0
    assert float(field(out, "empirical success")) == pytest.approx(0.293, abs=0.005)


def test_simulate_coherent_within_5_sigma(capsys):
    code, out, _ = run(capsys, "simulate", "--coherent", "--n", "10", "--alpha-sq", "4",
                       "--trials", "100000", "--seed", "7")
    assert code == 0
    assert field(out, "within 5 sigma") == "yes"


def test_simulate_byte_identical_reruns(tmp_path):
    cmd = [sys.executable, "-m", "symdisc", "simulate", "--theta", "0.5", "--trials", "20000", "--seed", "3"]
    first = subprocess.run(cmd + ["--csv", str(tmp_path / "a.csv")], capture_output=True, check=True)
    second = subprocess.run(cmd + ["--csv", str(tmp_path / "b.csv")], capture_output=True, check=True)
    assert first.stdout == second.stdout
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_convexity(capsys):
    code, out, _ = run(capsys, "convexity", "--cases", "200", "--seed", "1")
    assert code == 0
    assert float(field(out, "worst slack")) >= -1e-10


def test_unknown_command_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["nope"])
    assert exc.value.code == 2
