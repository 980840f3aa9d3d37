import json
import math

import pytest

from cli.commands import run
from core.io_formats import dump_development, dump_octahedron
from core.octa_model import EDGE_KEYS, Octahedron3, develop
from tests.conftest import generated, infeasible_edges


@pytest.fixture
def regular_file(write_json):
    return write_json("regular.json", {"format": "octa-dev/1", "edges": {k: 1.0 for k in EDGE_KEYS}})


def output(capsys):
    return json.loads(capsys.readouterr().out)


def test_validate_ok(regular_file, capsys):
    assert run(["validate", regular_file]) == 0
    assert output(capsys)["valid"] is True


def test_validate_missing_key(write_json, capsys):
    edges = {k: 1.0 for k in EDGE_KEYS if k != "13"}
    path = write_json("bad.json", {"format": "octa-dev/1", "edges": edges})
    assert run(["validate", path]) == 2
    report = output(capsys)
    assert report["valid"] is False
    assert any("'13'" in e for e in report["errors"])


def test_validate_malformed(write_json, capsys):
    path = write_json("broken.json", '{"format": "octa-dev/1", "edges": ')
    assert run(["validate", path]) == 2
    assert "JSON" in output(capsys)["errors"][0]


def test_validate_not_utf8(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_bytes(b"\xff\xfe{}")
    assert run(["validate", str(path)]) == 2
    report = output(capsys)
    assert report["valid"] is False
    assert "UTF-8" in report["errors"][0]


def test_reconstruct_regular(regular_file, capsys):
    assert run(["reconstruct", regular_file]) == 0
    data = output(capsys)
    assert data["status"] == "unique"
    for value in data["diagonals"].values():
        assert value == pytest.approx(math.sqrt(2.0), rel=1e-10)


def test_reconstruct_generated(write_json, gen_cfg, capsys):
    oct = generated(gen_cfg.seed, 0)
    path = write_json("gen.json", dump_development(develop(oct)))
    assert run(["reconstruct", path]) == 0
    v = oct.vertices
    expected = [math.dist(v[a], v[b]) for a, b in ((0, 5), (1, 4), (2, 3))]
    got = output(capsys)["diagonals"]
    assert [got["05"], got["14"], got["23"]] == pytest.approx(expected, rel=1e-8)


def test_reconstruct_infeasible(write_json, capsys):
    path = write_json("none.json", {"format": "octa-dev/1", "edges": infeasible_edges()})
    assert run(["reconstruct", path]) == 3
    assert output(capsys)["status"] == "none"


def test_decide_scaled(regular_file, write_json, capsys):
    double = write_json("double.json", {"format": "octa-dev/1", "edges": {k: 2.0 for k in EDGE_KEYS}})
    assert run(["decide", regular_file, double]) == 0
    data = output(capsys)
    assert data["verdict"] == "equivalent"
    assert data["alpha"] == pytest.approx(64.0, rel=1e-7)


def test_decide_self(write_json, gen_cfg, capsys):
    path = write_json("p.json", dump_development(develop(generated(gen_cfg.seed, 1))))
    assert run(["decide", path, path, "--exit-on-verdict"]) == 0
    assert output(capsys)["alpha"] == pytest.approx(1.0, rel=1e-12)


def test_decide_perturbed(write_json, gen_cfg, capsys):
    dev = develop(generated(gen_cfg.seed, 2))
    a = write_json("a.json", dump_development(dev))
    edges = dev.as_dict()
    edges["01"] *= 1.01
    b = write_json("b.json", {"format": "octa-dev/1", "edges": edges})

    assert run(["decide", a, b]) == 0
    assert output(capsys)["verdict"] == "not_equivalent"
    assert run(["decide", a, b, "--exit-on-verdict"]) == 1


def test_develop_axis(write_json, axis_oct, capsys):
    path = write_json("axis.json", dump_octahedron(axis_oct))
    assert run(["develop", path]) == 0
    edges = output(capsys)["edges"]
    assert all(value == pytest.approx(math.sqrt(2.0)) for value in edges.values())


def test_develop_require_convex(write_json, axis_oct):
    v = axis_oct.vertices.copy()
    v[2] = (0.2, 0.2, 0.2)
    path = write_json("dent.json", dump_octahedron(Octahedron3(v)))
    assert run(["develop", path, "--require-convex"]) == 2
    assert run(["develop", path]) == 0


def test_generate_is_byte_stable(tmp_path):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    assert run(["generate", "--seed", "42", "-o", str(first)]) == 0
    assert run(["generate", "--seed", "42", "-o", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()
    assert json.loads(first.read_text())["format"] == "octa-geom/1"


def test_generate_development(capsys):
    assert run(["generate", "--seed", "3", "--as-development"]) == 0
    assert output(capsys)["format"] == "octa-dev/1"


def test_perturb(regular_file, capsys):
    assert run(["perturb", regular_file, "--edge", "01", "--factor", "1.5"]) == 0
    assert output(capsys)["edges"]["01"] == pytest.approx(1.5)
    assert run(["perturb", regular_file, "--edge", "01", "--factor", "3"]) == 2


def test_report(regular_file, write_json, capsys):
    assert run(["report", regular_file]) == 0
    data = output(capsys)
    assert data["group1"]["satisfied"] is True
    assert len(data["group2"]["entries"]) == 24

    r = math.sqrt(2.0)
    diag = write_json("diag.json", {"format": "octa-diag/1", "diagonals": {"05": r, "14": r, "23": r}})
    assert run(["report", regular_file, "--diagonals", diag, "--group2-variant", "displayed"]) == 0
    assert output(capsys)["group2"]["variant"] == "displayed"


def test_tolerance_overrides(regular_file, capsys):
    assert run(["reconstruct", regular_file, "--tol-rel", "2"]) == 2
    assert run(["decide", regular_file, regular_file, "--alpha-yes", "1e-3", "--alpha-no", "1e-4"]) == 2


def test_show_config(capsys):
    assert run(["--show-config"]) == 0
    assert "tolerances" in output(capsys)


def test_no_command():
    assert run([]) == 2
