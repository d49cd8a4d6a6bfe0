import json

import pytest

from qperiods.cli import EXIT_PARSE, EXIT_SINGULAR, EXIT_UNSUPPORTED, main
from qperiods.hypersurface import Hypersurface
from qperiods.matrix_rep import MatrixFamily
from qperiods.parse import parse_hamiltonian

from .conftest import CUBIC, HARMONIC_1, QUARTIC


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_homogenize(capsys):
    code, out, _ = run(capsys, "homogenize", CUBIC)
    assert code == 0
    assert out.splitlines()[0] == "f = -E*z0^3 + z0*z1^2 + 1/2*z0*z2^2 + z1^3"


def test_basis_json(capsys):
    code, out, _ = run(capsys, "basis", CUBIC, "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["d"] == 8
    assert data["basis"] == ["1", "z2", "z1", "z0", "z2^2", "z1*z2", "z1^2", "z1*z2^2"]


def test_reduce(capsys):
    code, out, _ = run(capsys, "reduce", CUBIC, "--form", "2:z0^3")
    assert code == 0
    assert out.splitlines() == ["1*Omega/f^1: -9/(54*E - 8)", "z1*z2^2*Omega/f^2: -1/(27*E^2 - 4*E)"]


def test_picard_fuchs(capsys):
    code, out, _ = run(capsys, "picard-fuchs", CUBIC)
    assert code == 0
    assert "coefficients (highest derivative first): 108*E^2 - 16*E, 216*E - 16, 15" in out


def test_trace_rows(capsys):
    code, out, _ = run(capsys, "trace", CUBIC, "--k", "2")
    lines = out.splitlines()
    assert code == 0
    assert lines[2] == "k=1: (0, 0)"
    assert lines[3] == (
        "k=2: ((135*E + 4)/(11664*E^3 - 3456*E^2 + 256*E), "
        "(1215*E^2 - 180*E + 16)/(34992*E^4 - 10368*E^3 + 768*E^2))"
    )


def test_sigma_round_trip(tmp_path, capsys):
    path = tmp_path / "z1.json"
    code, _, _ = run(capsys, "sigma", CUBIC, "--element", "z1", "--output", str(path))
    assert code == 0
    X = Hypersurface.from_hamiltonian(parse_hamiltonian(CUBIC))
    fam = MatrixFamily.from_json(X, path.read_text())
    assert fam.to_json()["schema"] == "qperiods.matrix_family/1"
    code, out2, _ = run(capsys, "sigma", CUBIC, "--element", "z1")
    assert MatrixFamily.from_json(X, out2) == fam


def test_deterministic_output(capsys):
    a = run(capsys, "trace", CUBIC, "--k", "1", "--format", "json")
    b = run(capsys, "trace", CUBIC, "--k", "1", "--format", "json")
    assert a == b


def test_wkb_and_star_checks(capsys):
    code, out, _ = run(capsys, "wkb-check", CUBIC, "--k", "2")
    assert code == 0 and out.count("agree") == 3
    code, out, _ = run(capsys, "star-check", CUBIC, "--k", "2")
    assert code == 0 and "FAIL" not in out


@pytest.mark.parametrize(
    "argv, code",
    [
        (("trace", "1/x1", "--k", "1"), EXIT_PARSE),
        (("basis", QUARTIC), EXIT_SINGULAR),
        (("trace", HARMONIC_1, "--k", "1"), EXIT_UNSUPPORTED),
        (("sigma", CUBIC, "--element", "q1"), EXIT_PARSE),
        (("reduce", CUBIC, "--form", "2z0"), EXIT_PARSE),
    ],
)
def test_exit_codes(capsys, argv, code):
    got, _, err = run(capsys, *argv)
    assert got == code
    assert err
    assert len({EXIT_PARSE, EXIT_SINGULAR, EXIT_UNSUPPORTED}) == 3
