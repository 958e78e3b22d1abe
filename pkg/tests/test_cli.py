import csv
import io
import json
import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from kdense import cli
from kdense.bodies import Disk, Ellipse, Polygon, SupportGrid, grid_angles, smooth
from kdense.inequalities import random_body


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def read_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


# --- shape parsing ---------------------------------------------------------


def test_parse_disk_dict():
    body = cli.parse_shape('{"kind":"disk","radius":1}')
    assert isinstance(body, Disk) and body.radius == 1.0


def test_parse_ellipse_dict_and_literal():
    a = cli.parse_shape('{"kind":"ellipse","a":2,"b":1,"center":[0,0],"rotation":0}')
    b = cli.parse_shape("ellipse(2,1)")
    th = grid_angles(64)
    assert isinstance(a, Ellipse)
    assert np.allclose(a.support(th), b.support(th), atol=1e-15)


def test_polygon_role_dependent_validation():
    text = '{"kind":"polygon","vertices":[[0,0],[1,0],[0,1]]}'
    assert isinstance(cli.parse_shape(text, "G"), Polygon)
    with pytest.raises(cli.ShapeError) as exc:
        cli.parse_shape(text, "K")
    assert exc.value.field == "K"


@pytest.mark.parametrize("text, field", [
    ('{"kind":"disk","radius":-1}', "radius"),
    ('{"kind":"disk"}', "radius"),
    ('{"kind":"ellipse","a":2}', "b"),
    ('{"kind":"blob"}', "kind"),
    ('{"kind":"polygon","vertices":[[0,0],[1,0]]}', "vertices"),
    ('{"kind":"support_grid","n":3,"h":[1,1,1,1]}', "n"),
    ("ellipse(2)", "ellipse"),
    ("polygon(1,2,3)", "vertices"),
    ('{"kind": ', "G"),
])
def test_schema_errors_name_the_field(text, field):
    with pytest.raises(cli.ShapeError) as exc:
        cli.parse_shape(text, "G")
    assert exc.value.field == field


def test_parse_shape_from_file(tmp_path):
    p = tmp_path / "g.json"
    p.write_text(json.dumps({"kind": "ellipse", "a": 3, "b": 1}))
    assert cli.parse_shape(str(p)).area == pytest.approx(3 * math.pi)


def test_literals():
    assert cli.parse_shape("disk").area == pytest.approx(math.pi)
    assert cli.parse_shape("square").area == pytest.approx(4.0)
    assert cli.parse_shape("square(2)").area == pytest.approx(16.0)
    g = cli.parse_shape("support_grid(512)")
    assert isinstance(g, SupportGrid) and g.area == pytest.approx(math.pi, rel=1e-12)


@pytest.mark.parametrize("make", [
    lambda: Disk(1.5, (0.2, -0.1)),
    lambda: Ellipse(2.0, 0.7, (0.3, 0.1), 0.9),
    lambda: Polygon([(-1, -1), (2, -1), (0, 1.5)]),
    lambda: smooth(Polygon([(-1, -1), (1, -1), (1, 1), (-1, 1)]), 0.2),
    lambda: random_body(1007),
    lambda: SupportGrid(random_body(1007).h),
])
def test_round_trip(make):
    body = make()
    back = cli.parse_shape(cli.serialize(body))
    th = grid_angles(256)
    assert abs(back.area - body.area) < 1e-12
    assert np.max(np.abs(back.support(th) - body.support(th))) < 1e-12


# --- commands ----------------------------------------------------------------


def test_check_kdense_ellipse_pair(capsys):
    code, out, _ = run_cli(capsys, "check-kdense", "--g", "ellipse(2,1)", "--k", "ellipse(4,2)",
                           "--tol", "1e-3")
    assert code == 0
    rows = read_csv(out)
    assert rows[-1]["r"] == "max_variation"
    assert float(rows[-1]["relative_variation"]) < 5e-4


def test_check_kdense_square_fails(capsys):
    code, out, _ = run_cli(capsys, "check-kdense", "--g", "square", "--k", "square",
                           "--samples", "64", "--grid", "64")
    assert code == 1
    rows = read_csv(out)[:-1]
    lows = [float(r["min"]) for r in rows]
    highs = [float(r["max"]) for r in rows]
    assert min(lows) == pytest.approx(0.25, abs=1e-9)
    assert max(highs) == pytest.approx(0.5, abs=1e-9)


def test_proof_chain_disk(capsys):
    code, out, _ = run_cli(capsys, "proof-chain", "--k", "disk", "--format", "json")
    assert code == 0
    rep = json.loads(out)
    assert rep["lhs_c2"] == pytest.approx(math.pi ** 2, rel=1e-12)
    assert abs(rep["lhs_c2"] - rep["omega_term"]) < 1e-9
    assert rep["verdict"] is True


def test_proof_chain_polygon_needs_smoothing(capsys):
    code, _, err = run_cli(capsys, "proof-chain", "--k", "square")
    assert code == 2 and "smooth" in err
    code, out, _ = run_cli(capsys, "proof-chain", "--k", "square", "--smooth", "0.1")
    assert code == 1
    fields = {r["field"]: r["value"] for r in read_csv(out)}
    assert fields["verdict"] == "false"
    assert float(fields["ratio_variation"]) > 0.1


def test_verify_necessary_ellipses_pass(capsys):
    code, out, _ = run_cli(capsys, "verify-necessary", "--g", "ellipse(2,1)", "--k", "ellipse(2,1)",
                           "--samples", "64")
    assert code == 0
    names = [r["check_name"] for r in read_csv(out)]
    assert names == ["half_volume", "section_centroid", "cond2_variation", "c_estimate",
                     "ratio_variation", "max_k_distance_spread"]


def test_verify_necessary_triangle_fails(capsys):
    code, out, _ = run_cli(capsys, "verify-necessary", "--g", "disk",
                           "--k", "polygon(-1,-1,1,-1,0,2)", "--samples", "32")
    assert code == 1
    hv = {r["check_name"]: r for r in read_csv(out)}["half_volume"]
    assert float(hv["residual"]) >= 1 / 18 - 1e-6 and hv["pass"] == "false"


def test_verify_inequalities_pair_and_suite(capsys):
    code, out, _ = run_cli(capsys, "verify-inequalities", "--k", "disk", "--g", "square",
                           "--smooth", "0.1", "--grid", "1024")
    assert code == 0
    code, out, _ = run_cli(capsys, "verify-inequalities", "--seed", "2000", "--format", "json")
    assert code == 0
    checks = json.loads(out)
    assert len(checks) == 200 and all(c["pass"] for c in checks)


def test_input_errors_exit_2(capsys, tmp_path):
    code, _, err = run_cli(capsys, "check-kdense", "--g", "disk", "--k", "disk(1,5,5)")
    assert code == 2 and err.count("\n") == 1 and "K" in err
    code, _, err = run_cli(capsys, "check-kdense", "--g", str(tmp_path / "missing.json"), "--k", "disk")
    assert code == 2
    code, _, err = run_cli(capsys, "density-sweep", "--k", "disk")
    assert code == 2 and "--g" in err
    code, _, err = run_cli(capsys, "check-kdense", "--g", "disk", "--k", "disk", "--tol", "-1")
    assert code == 2 and "tol" in err


def test_density_sweep_is_deterministic(capsys, tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        code, _, _ = run_cli(capsys, "density-sweep", "--g", "ellipse(2,1)", "--k", "disk(0.5)",
                             "--r", "0.25,0.5", "--samples", "32", "--grid", "256", "--out", str(p))
        assert code == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
    rows = read_csv(paths[0].read_text())
    assert len(rows) == 64
    assert {r["r"] for r in rows} == {"0.25", "0.5"}


def test_svg_report(capsys, tmp_path):
    out = tmp_path / "report.svg"
    code, _, _ = run_cli(capsys, "report", "--g", "square", "--k", "disk", "--r", "0.5,1",
                         "--samples", "32", "--grid", "256", "--out", str(out))
    assert code == 0
    root = ET.parse(out).getroot()
    assert root.get("width") == "800" and root.get("height") == "600"
    tags = [el.tag.split("}")[-1] for el in root.iter()]
    assert tags.count("circle") == 32
    assert tags.count("polyline") == 2
    assert "href" not in out.read_text()
