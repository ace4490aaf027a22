import numpy as np
import pytest

from projconvex import domain as dm, jsonio
from projconvex.cli import dispatch
from projconvex.normalize import RepSequence

from conftest import boost


@pytest.fixture
def disk_file(tmp_path):
    path = tmp_path / "disk.json"
    jsonio.dump_file(dm.unit_disk().to_json(), path)
    return str(path)


@pytest.fixture
def squash_file(tmp_path):
    doms, terms = [], []
    for k in range(1, 9):
        doms.append(dm.ConvexDomain.ellipsoid([0.0, 0.0],
                                              np.diag([1.0, float(k * k)])))
        terms.append([np.eye(3)])
    seq = RepSequence(["a"], terms, doms)
    path = tmp_path / "squash.json"
    jsonio.dump_file(jsonio.sequence_to_dict(seq), path)
    return str(path)


def test_dist_example(disk_file, capsys):
    res = dispatch(["hilbert", "dist", "--domain", disk_file,
                    "--x", "0,0", "--y", "0.5,0"])
    assert res.exit_code == 0
    assert capsys.readouterr().out.strip() == "0.549306"


def test_validate_unbounded_exit_code(tmp_path, capsys):
    path = tmp_path / "halfplane.json"
    jsonio.dump_file({"chart": [0, 0, 1],
                      "backend": {"type": "hpoly", "normals": [[-1.0, 0.0]],
                                  "offsets": [0.0]}}, path)
    out = tmp_path / "report.json"
    res = dispatch(["domain", "validate", "--domain", str(path),
                    "--out", str(out)])
    assert res.exit_code == 1
    report = jsonio.load_file(out)
    assert report["error"]["code"] == "not-properly-convex"
    assert report["error"]["data"]["witness"] is not None


def test_sequence_csv(squash_file, tmp_path):
    out = tmp_path / "report.csv"
    res = dispatch(["normalize", "sequence", "--seq", squash_file,
                    "--out", str(out)])
    assert res.exit_code == 0
    rows = open(out).read().strip().splitlines()
    assert rows[0] == "k,d_norm,residual,maxentry"
    d_norms = [float(r.split(",")[1]) for r in rows[1:]]
    diffs = np.diff(d_norms)
    assert np.allclose(diffs, diffs[0], atol=1e-6)  # linear growth
    assert diffs[0] > 0


def test_reports_are_deterministic(disk_file, tmp_path):
    out1 = tmp_path / "a.json"
    out2 = tmp_path / "b.json"
    for out in (out1, out2):
        res = dispatch(["vinberg", "surface", "--domain", disk_file,
                        "--budget", "12", "--seed", "7", "--out", str(out)])
        assert res.exit_code == 0
    assert open(out1, "rb").read() == open(out2, "rb").read()


def test_computation_error_exit_code(disk_file, capsys):
    res = dispatch(["vinberg", "volume", "--domain", disk_file,
                    "--phi", "1,0,0.5"])
    assert res.exit_code == 1
    assert "outside-dual-cone" in capsys.readouterr().out


def test_usage_error_exit_code(capsys):
    res = dispatch(["no-such-command"])
    assert res.exit_code == 2


def test_malformed_file_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    res = dispatch(["domain", "validate", "--domain", str(bad)])
    assert res.exit_code == 2
    nan = tmp_path / "nan.json"
    nan.write_text('{"chart": [0, 0, NaN], "backend": {"type": "vpoly", '
                   '"vertices": [[0, 0], [1, 0], [0, 1]]}}')
    res = dispatch(["domain", "validate", "--domain", str(nan)])
    assert res.exit_code == 2


def test_boxcheck_command(tmp_path, capsys):
    mat = tmp_path / "m.json"
    jsonio.dump_file({"matrix": np.eye(3).tolist()}, mat)
    res = dispatch(["normalize", "boxcheck", "--matrix", str(mat), "--K", "1"])
    assert res.exit_code == 0
    assert "conclusion=True" in capsys.readouterr().out


def test_group_and_svg_paths(disk_file, tmp_path, capsys):
    mat = tmp_path / "boost.json"
    jsonio.dump_file({"matrix": boost(0.6).tolist()}, mat)
    res = dispatch(["group", "dynamics", "--domain", disk_file,
                    "--matrix", str(mat)])
    assert res.exit_code == 0
    assert "length=0.6" in capsys.readouterr().out

    gens = tmp_path / "gens.json"
    jsonio.dump_file({"generators": ["a"], "terms": [[boost(1.0).tolist()]]},
                     gens)
    svg = tmp_path / "orbit.svg"
    res = dispatch(["group", "orbit", "--domain", disk_file, "--gens",
                    str(gens), "--seed-point", "0,0", "--L", "3",
                    "--svg", str(svg)])
    assert res.exit_code == 0
    assert svg.exists() and svg.read_text().startswith("<svg")


def test_mesh_commands(tmp_path, capsys):
    mesh = tmp_path / "polyline.json"
    jsonio.dump_file({"vertices": [[-1, 2], [0, 1], [1, 2]],
                      "simplices": [[0, 1], [1, 2]]}, mesh)
    assert dispatch(["plconvex", "check", "--mesh", str(mesh)]).exit_code == 0
    assert dispatch(["plconvex", "certify", "--mesh", str(mesh)]).exit_code == 0
    assert dispatch(["plconvex", "radius", "--mesh", str(mesh)]).exit_code == 0
    assert dispatch(["plconvex", "outward", "--mesh", str(mesh),
                     "--t", "1.5"]).exit_code == 0
    out = capsys.readouterr().out
    assert "radial section: True" in out
    assert "outward=True" in out


def test_domain_dual_and_flats(tmp_path, capsys):
    sq = tmp_path / "square.json"
    jsonio.dump_file(dm.square_domain().to_json(), sq)
    out = tmp_path / "dual.json"
    res = dispatch(["domain", "dual", "--domain", str(sq), "--out", str(out)])
    assert res.exit_code == 0
    assert jsonio.load_file(out)["report"]["domain"]["backend"]["type"] == "hpoly"
    res = dispatch(["domain", "flats", "--domain", str(sq)])
    assert res.exit_code == 0
    assert "4 maximal flat pieces" in capsys.readouterr().out
