import io
from pathlib import Path

import pytest

from conftest import FIGURE_EIGHT_CODE, TREFOIL_CODE
from reidemeister.cli import main

DATA = Path(__file__).resolve().parent.parent / "data"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


def test_validate_generic():
    code, out, _ = run("validate", DATA / "trefoil.knot")
    assert code == 0
    assert out.strip().splitlines()[-1] == "verdict=PASS"


def test_validate_not_generic():
    code, _, _ = run("validate", DATA / "cusp_model.knot")
    assert code == 1


def test_extract_trefoil():
    code, out, _ = run("extract", DATA / "trefoil.knot")
    assert code == 0
    assert out.strip() == TREFOIL_CODE


def test_extract_pd():
    code, out, _ = run("extract", DATA / "figure_eight.knot", "--format", "pd")
    assert code == 0 and out.startswith("X(") and out.count("X(") == 4


def test_extract_needs_perturb():
    code, _, err = run("extract", DATA / "cusp_model.knot")
    assert code == 1 and "--perturb" in err
    code, out, _ = run("extract", DATA / "cusp_model.knot", "--perturb", "--seed", "3")
    assert code == 0 and out.strip()


def test_perturb_cannot_fix_self_intersection():
    code, _, err = run("extract", DATA / "plane_figure_eight.knot", "--perturb")
    assert code == 1 and "NOT_EMBEDDED" in err


@pytest.mark.parametrize(
    "source,expected",
    [
        (TREFOIL_CODE, "colorings_3=9 colorings_5=5 writhe=-3 crossings=3"),
        (FIGURE_EIGHT_CODE, "colorings_3=3 colorings_5=25 writhe=0 crossings=4"),
        ("unknot", "colorings_3=3 colorings_5=5 writhe=0 crossings=0"),
    ],
)
def test_invariants_of_codes(source, expected):
    code, out, _ = run("invariants", source)
    assert code == 0 and out.strip() == expected


def test_invariants_of_knot_file_and_moduli():
    code, out, _ = run("invariants", DATA / "trefoil.knot", "--n", "3,7")
    assert code == 0 and out.strip() == "colorings_3=9 colorings_7=7 writhe=-3 crossings=3"
    code, out, _ = run("invariants", DATA / "trefoil_mirror.knot")
    assert "writhe=3" in out


def test_invariants_text_format():
    code, out, _ = run("invariants", "O1+ U1+", "--format", "text")
    assert code == 0 and len(out.splitlines()) == 4


@pytest.mark.parametrize(
    "name,events",
    [("constant_trefoil", 0), ("cusp", 1), ("tangency", 1), ("triple", 1), ("curl_then_dent", 2), ("trefoil_rotation", None)],
)
def test_trace_ok(name, events):
    code, out, _ = run("trace", DATA / f"{name}.iso")
    assert code == 0, out
    last = out.strip().splitlines()[-1]
    assert last.endswith("status=OK")
    if events is not None:
        assert last.startswith(f"events={events} ")


def test_trace_mirror_fails():
    code, _, err = run("trace", DATA / "trefoil_to_mirror.iso")
    assert code == 1 and "NOT_AN_ISOTOPY" in err


def test_render(tmp_path):
    target = tmp_path / "t.svg"
    code, _, _ = run("render", DATA / "trefoil.knot", target)
    assert code == 0 and target.read_text().count("<path ") == 3
    code, _, _ = run("render", FIGURE_EIGHT_CODE, target)
    assert code == 0 and target.read_text().count("<path ") == 4


def test_render_unwritable(tmp_path):
    code, _, err = run("render", TREFOIL_CODE, tmp_path / "missing" / "x.svg")
    assert code == 2 and "cannot write" in err


@pytest.mark.parametrize(
    "argv",
    [
        ("validate", "/nonexistent/file.knot"),
        ("invariants", "O1+ O1+"),
        ("invariants", "X(1,2,3)"),
        ("trace", DATA / "cusp.iso", "--t-grid", "0"),
        ("validate", DATA / "trefoil.knot", "--grid", "-5"),
        ("frobnicate",),
    ],
)
def test_input_errors_exit_2(argv):
    assert run(*argv)[0] == 2


def test_malformed_knot_file(tmp_path):
    bad = tmp_path / "bad.knot"
    bad.write_text("degree 1\n0 1 0\n")
    code, _, err = run("validate", bad)
    assert code == 2 and "line" in err


def test_resolution_conflict_exit_3():
    code, _, _ = run("trace", DATA / "curl_then_dent.iso", "--bisect-tol", "0.1")
    assert code == 3


def test_extract_circle_is_empty():
    code, out, _ = run("extract", DATA / "circle.knot")
    assert code == 0 and out == "\n"
    code, out, _ = run("validate", DATA / "circle.knot")
    assert "crossings=0" in out
