import io
import json
import math
from contextlib import redirect_stderr, redirect_stdout

import numpy as np
import pytest

from qbounds.cli import EXIT_INVALID, EXIT_OK, EXIT_SOLVER, main
from qbounds.errors import ValidationError
from qbounds.model import qfi_data
from qbounds.problemfile import dump_problem, load_problem, parse_angle, problem_to_dict
from qbounds.scenarios import RotationsConfig, equal_bounds_problem, rotations_problem

S2 = math.sqrt(2.0)


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(list(argv))
    return code, out.getvalue(), err.getvalue()


def parse_csv(text, delimiter=","):
    lines = text.strip().splitlines()
    header = lines[0].split(delimiter)
    return [dict(zip(header, line.split(delimiter))) for line in lines[1:]]


@pytest.fixture
def problem_file(tmp_path):
    def write(problem, name="p.json"):
        path = tmp_path / name
        dump_problem(problem, path)
        return str(path)

    return write


def test_rotations_row():
    code, out, _ = run("rotations", "--r", "0.5", "--theta", "pi/4", "--phi", "pi/4")
    assert code == EXIT_OK
    row = parse_csv(out)[0]
    assert float(row["sldcrb"]) == pytest.approx(12.0, rel=1e-12)
    assert float(row["ncrb"]) == pytest.approx(4 * (1 + S2) ** 2, rel=1e-12)
    assert float(row["hcrb"]) == pytest.approx(4 * (3 + S2), rel=1e-12)
    assert float(row["lwb"]) == pytest.approx(16.0, rel=1e-9)
    assert float(row["c_tilde"]) == pytest.approx(2 * S2 / 3, rel=1e-12)
    assert row["ncrb_method"] == "closed-form"


def test_rotations_tsv():
    code, out, _ = run("rotations", "--r", "1", "--theta", "0.3", "--phi", "0", "--format", "tsv")
    assert code == EXIT_OK
    assert "\t" in out.splitlines()[0] and "," not in out


def test_equator_reports_infinity():
    code, out, _ = run("rotations", "--r", "1", "--theta", "pi/2", "--phi", "pi/3")
    row = parse_csv(out)[0]
    assert code == EXIT_OK
    assert row["ncrb"] == "inf" and row["hcrb"] == "inf"


def test_bounds_on_file(problem_file):
    path = problem_file(equal_bounds_problem(3)[0])
    code, out, _ = run("bounds", path)
    assert code == EXIT_OK
    row = parse_csv(out)[0]
    assert float(row["ncrb"]) == pytest.approx(60.0, rel=1e-6)
    assert float(row["lwb"]) == pytest.approx(60.0, rel=1e-8)
    assert row["ncrb_method"] == "solver"


def test_weighted_bounds_shift(problem_file):
    path = problem_file(rotations_problem(RotationsConfig(0.5, 0.4, 0.9)))
    rows = [parse_csv(run("bounds", path, "--weight", str(w))[1])[0] for w in (0.5, 1.0, 1.5)]
    assert len({r["sldcrb"] for r in rows}) == 3


def test_out_file(tmp_path):
    dest = tmp_path / "o.csv"
    code, out, _ = run("rotations", "--r", "0.5", "--theta", "1", "--phi", "1", "--out", str(dest))
    assert code == EXIT_OK and out == ""
    assert dest.read_text().startswith("sldcrb,")


def test_missing_file_is_invalid_input(tmp_path):
    code, _, err = run("bounds", str(tmp_path / "nope.json"))
    assert code == EXIT_INVALID
    assert "cannot read" in err


def test_non_hermitian_entry_is_named(tmp_path, rotated_half):
    data = problem_to_dict(rotated_half)
    data["drho1"][0][1] = [9.0, 0.0]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    code, _, err = run("bounds", str(path))
    assert code == EXIT_INVALID
    assert "drho" in err


@pytest.mark.parametrize(
    "edit",
    [
        lambda d: d.pop("rho"),
        lambda d: d.update(dim=3),
        lambda d: d.update(dim="two"),
        lambda d: d.update(rho=[[1, 0], [0, 0]]),
    ],
)
def test_malformed_files(tmp_path, rotated_half, edit):
    data = problem_to_dict(rotated_half)
    edit(data)
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    assert run("bounds", str(path))[0] == EXIT_INVALID


def test_invalid_radius_and_angle():
    assert run("rotations", "--r", "1.5", "--theta", "0", "--phi", "0")[0] == EXIT_INVALID
    assert run("rotations", "--r", "0.5", "--theta", "tau", "--phi", "0")[0] == EXIT_INVALID


def test_solver_failure_exit_code(problem_file):
    # solver failures are rare on valid input, so force one
    import qbounds.cli as cli
    from qbounds.errors import ConvergenceError

    def boom(*a, **k):
        raise ConvergenceError("no convergence")

    path = problem_file(equal_bounds_problem(3)[0])
    orig = cli.hcrb_general
    cli.hcrb_general = boom
    try:
        code, _, err = run("bounds", path)
    finally:
        cli.hcrb_general = orig
    assert code == EXIT_SOLVER
    assert "no convergence" in err


def test_nagaoka_curve_through_identity(problem_file):
    # F = I at r = 1, theta = 0: curve (v1 - 1)(v2 - 1) = 1 passes through (2, 2)
    path = problem_file(rotations_problem(RotationsConfig(1.0, 0.0, 0.0)))
    code, out, _ = run("curve", path, "nagaoka", "--points", "41")
    assert code == EXIT_OK
    pts = np.array([[float(r["v1"]), float(r["v2"])] for r in parse_csv(out)])
    np.testing.assert_allclose((pts[:, 0] - 1) * (pts[:, 1] - 1), 1.0, rtol=1e-10)
    assert np.any(np.abs(pts[:, 0] - 2) < 0.3)


def test_lwur_curve_at_full_incompatibility(problem_file):
    # F = I and c_tilde = 1: the boundary passes through (2, 2)
    path = problem_file(rotations_problem(RotationsConfig(1.0, 0.0, 0.0)))
    code, out, _ = run("curve", path, "lwur", "--points", "401")
    assert code == EXIT_OK
    pts = np.array([[float(r["v1"]), float(r["v2"])] for r in parse_csv(out)])
    assert np.all(pts[:, 0] >= 1 - 1e-12)
    j = np.argmin(np.abs(pts[:, 0] - 2))
    assert pts[j, 1] == pytest.approx(2.0, abs=0.05)


def test_envelope_curves(problem_file):
    p = rotations_problem(RotationsConfig(0.5, 0.6, 0.2))
    path = problem_file(p)
    code, out, _ = run("curve", path, "ncrb-envelope", "--points", "11")
    assert code == EXIT_OK
    assert len(parse_csv(out)) == 11
    # every weighted SLD bound touches the same corner point
    code, out, _ = run("curve", path, "sld-envelope", "--points", "11")
    corner = np.diag(np.linalg.inv(qfi_data(p).qfi))
    for r in parse_csv(out):
        np.testing.assert_allclose([float(r["v1"]), float(r["v2"])], corner, rtol=1e-9)


def test_nagaoka_needs_qubit(problem_file):
    path = problem_file(equal_bounds_problem(3)[0])
    assert run("curve", path, "nagaoka")[0] == EXIT_INVALID


def test_random_problems_are_reproducible_across_workers():
    a = run("random-problems", "--dim", "2", "--count", "12", "--seed", "3")
    b = run("random-problems", "--dim", "2", "--count", "12", "--seed", "3")
    c = run("random-problems", "--dim", "2", "--count", "12", "--seed", "3", "--workers", "2")
    assert a[0] == EXIT_OK
    assert a[1] == b[1] == c[1]
    rows = parse_csv(a[1])
    assert [int(r["index"]) for r in rows] == list(range(12))
    assert all(r["status"] == "ok" for r in rows)
    assert "0 of 12 rows failed" in a[2]


def test_random_measurements_reference_rows():
    code, out, _ = run(
        "random-measurements", "--r", "0.5", "--theta", "pi/4", "--phi", "pi/4", "--count", "5", "--seed", "1"
    )
    assert code == EXIT_OK
    rows = parse_csv(out)
    assert [r["kind"] for r in rows][-2:] == ["ref_ncrb", "ref_lwb"]
    assert float(rows[-2]["precision"]) == pytest.approx(1 / (4 * (1 + S2) ** 2), rel=1e-12)
    assert float(rows[-1]["precision"]) == pytest.approx(1 / 16, rel=1e-9)
    assert all(float(r["G"]) >= -1e-9 for r in rows[:-2])


def test_random_measurements_full_rank():
    code, out, _ = run(
        "random-measurements", "--r", "1", "--theta", "0.5", "--phi", "0", "--count", "4", "--rank", "full"
    )
    assert code == EXIT_OK
    assert len(parse_csv(out)) == 6


@pytest.mark.parametrize(
    "text,value",
    [("pi/4", math.pi / 4), ("-3pi/4", -3 * math.pi / 4), ("2*pi/3", 2 * math.pi / 3), ("pi", math.pi), ("0.25", 0.25)],
)
def test_parse_angle(text, value):
    assert parse_angle(text) == pytest.approx(value, rel=1e-15)


@pytest.mark.parametrize("text", ["tau", "pi/0", "pi/", ""])
def test_parse_angle_rejects(text):
    with pytest.raises(ValidationError):
        parse_angle(text)


def test_problem_file_round_trip(tmp_path, rotated_half):
    path = tmp_path / "p.json"
    dump_problem(rotated_half, path)
    back = load_problem(path)
    np.testing.assert_array_equal(back.rho, rotated_half.rho)
    for a, b in zip(back.drho, rotated_half.drho):
        np.testing.assert_array_equal(a, b)
