import numpy as np
import pytest

from projconvex import domain as dm
from projconvex import jsonio
from projconvex.errors import (
    DegenerateChordError,
    InputFormatError,
    InvalidInputError,
    NotOnFrontierError,
    NotProperlyConvexError,
)
from projconvex.projgeom import ProjTransform


def test_validate_disk(disk):
    cert = dm.validate(disk)
    assert abs(cert.margin - 1.0) < 1e-12
    assert abs(cert.bounding_radius - 1.0) < 1e-12


def test_validate_diamond():
    diamond = dm.ConvexDomain.from_vertices([[1, 0], [0, 1], [-1, 0], [0, -1]])
    cert = dm.validate(diamond)
    assert abs(cert.margin - 1.0) < 1e-12


def test_validate_halfplane_unbounded():
    # the unbounded data is rejected as soon as the backend needs vertices
    with pytest.raises(NotProperlyConvexError) as err:
        dom = dm.ConvexDomain.from_halfspaces([[-1.0, 0.0]], [0.0])
        dm.validate(dom)
    assert err.value.data.get("witness") is not None


def test_validate_nonconvex_vertices():
    with pytest.raises(NotProperlyConvexError):
        dm.ConvexDomain.from_vertices([[0, 0], [1, 0], [0, 1], [0.2, 0.2]])


def test_contains_examples(disk):
    assert dm.contains(disk, [0.0, 0.0]).kind == "inside"
    assert abs(dm.contains(disk, [0.0, 0.0]).margin - 1.0) < 1e-12
    assert dm.contains(disk, [1.0, 0.0]).kind == "boundary"
    out = dm.contains(disk, [2.0, 0.0])
    assert out.kind == "outside" and out.margin < 0


def test_chord_disk_diameter(disk):
    c = dm.chord(disk, [0.0, 0.0], [0.5, 0.0])
    assert np.allclose(c.x_minus, [-1, 0], atol=1e-12)
    assert np.allclose(c.x_plus, [1, 0], atol=1e-12)


def test_chord_square_diagonal(square):
    c = dm.chord(square, [0.0, 0.0], [0.5, 0.5])
    assert np.allclose(c.x_plus, [1, 1], atol=1e-12)
    assert np.allclose(c.x_minus, [-1, -1], atol=1e-12)


def test_chord_degenerate_and_outside(disk):
    with pytest.raises(DegenerateChordError):
        dm.chord(disk, [0.1, 0.1], [0.1, 0.1])
    with pytest.raises(InvalidInputError):
        dm.chord(disk, [0.0, 0.0], [3.0, 0.0])


def test_chord_classification(any_domain, rng):
    for _ in range(30):
        x = any_domain.random_interior(rng)
        y = any_domain.random_interior(rng)
        if np.linalg.norm(x - y) < 1e-9:
            continue
        c = dm.chord(any_domain, x, y)
        for endpoint in (c.x_minus, c.x_plus):
            assert abs(any_domain.backend.contains_margin(endpoint)) < 1e-8
        for t in np.linspace(0.05, 0.95, 7):
            assert any_domain.backend.contains_margin(c.point_at(t)) > -1e-12


def test_support_disk_tangent(disk):
    phi = dm.support(disk, [1.0, 0.0])
    # the tangent line x = 1, oriented into the disk
    lift = disk.chart.lift([1.0, 0.5])  # on the line
    assert abs(phi.pair(lift / np.linalg.norm(lift))) < 1e-12
    assert phi.pair(disk.chart.lift([0.0, 0.0])) > 0


def test_support_square_facet_and_vertex(square):
    phi = dm.support(square, [1.0, 0.3])
    on_line = square.chart.lift([1.0, -0.7])
    assert abs(phi.pair(on_line)) < 1e-9
    # vertex: averaged neighbors, direction (1,1)/sqrt(2)
    psi = dm.support(square, [1.0, 1.0])
    n = -(square.chart.frame.T @ psi.coeffs)
    n /= np.linalg.norm(n)
    assert np.allclose(np.abs(n), [1 / np.sqrt(2)] * 2, atol=1e-12)
    facets = dm.supporting_facets(square, [1.0, 1.0])
    assert len(facets) == 2


def test_support_requires_frontier(square):
    with pytest.raises(NotOnFrontierError):
        dm.support(square, [0.0, 0.0])


def test_support_orientation(any_domain, rng):
    b = any_domain.backend
    for _ in range(50):
        u = rng.normal(size=2)
        u /= np.linalg.norm(u)
        pt = b.support_point(u) if b.kind != "ellipsoid" else b.support_point(u)
        phi = dm.support(any_domain, pt)
        assert abs(phi.pair(any_domain.chart.lift(pt))
                   / np.linalg.norm(any_domain.chart.lift(pt))) < 1e-9
        for _ in range(20):
            p = any_domain.random_interior(rng)
            assert phi.pair(any_domain.chart.lift(p)) > 0


def test_dual_disk_self_dual(disk):
    dual = dm.dual_domain(disk)
    assert dual.backend.kind == "ellipsoid"
    assert np.allclose(dual.backend.center, [0, 0], atol=1e-12)
    assert np.allclose(dual.backend.shape_matrix, np.eye(2), atol=1e-12)


def test_dual_orthant_self_dual():
    orthant = dm.orthant_domain(2)
    dual = dm.dual_domain(orthant)
    # same chart through [1:1:1]; compare support functions
    assert dm.support_residual(orthant, dual, _circle(32)) < 1e-9


def test_dual_square_is_diamond(square):
    dual = dm.dual_domain(square)
    verts = dual.backend.vertices()
    expected = {(1, 0), (0, 1), (-1, 0), (0, -1)}
    got = {tuple(np.round(v, 9)) for v in verts}
    assert got == {(round(a, 9), round(b, 9)) for a, b in expected}


def test_double_duality_polytope(square, triangle):
    for dom in (square, triangle):
        back = dm.dual_domain(dm.dual_domain(dom)).in_chart(dom.chart)
        got = {tuple(np.round(v, 9)) for v in back.backend.vertices()}
        want = {tuple(np.round(v, 9)) for v in dom.backend.vertices()}
        assert got == want


def test_double_duality_smooth(disk, polygon24):
    dirs = _circle(64)
    for dom in (disk, polygon24):
        back = dm.dual_domain(dm.dual_domain(dom)).in_chart(dom.chart)
        assert dm.support_residual(dom, back, dirs) < 1e-6


def test_dual_equivariance(square, rng):
    dirs = _circle(32)
    for _ in range(10):
        m = rng.normal(size=(3, 3)) + 3 * np.eye(3)
        if abs(np.linalg.det(m)) < 1e-2:
            continue
        a = ProjTransform(m)
        try:
            moved = square.transform(a)
            d1 = dm.dual_domain(moved)
        except (NotProperlyConvexError, Exception):
            continue
        d2 = dm.dual_domain(square).transform(
            ProjTransform(np.linalg.inv(a.matrix).T))
        assert dm.support_residual(d1, d2.in_chart(d1.chart), dirs) < 1e-8


def test_boundary_flats(disk, triangle, square, polygon24):
    assert dm.boundary_flats(disk) == []
    assert len(dm.boundary_flats(triangle)) == 3
    assert len(dm.boundary_flats(square)) == 4
    flats = dm.boundary_flats(polygon24)
    assert len(flats) == 24
    assert all(len(f["vertices"]) == 2 for f in flats)


def test_json_round_trip(any_domain):
    data = jsonio.loads(jsonio.dumps(any_domain.to_json()))
    dom2 = jsonio.domain_from_dict(data)
    assert dom2.backend.kind == any_domain.backend.kind
    assert dm.support_residual(any_domain, dom2, _circle(16)) < 1e-12


def test_json_rejects_nonfinite():
    with pytest.raises(InputFormatError):
        jsonio.loads('{"chart": [0, 0, NaN]}')
    with pytest.raises(InputFormatError):
        jsonio.loads('{"chart": [0, 0, 1e999]}')


def test_transform_chart_equivariance(square, rng):
    # transforming and recharting preserves the projective set
    m = rng.normal(size=(3, 3)) + 3 * np.eye(3)
    a = ProjTransform(m)
    moved = square.transform(a)
    back = moved.transform(a.inverse(), chart=square.chart)
    got = {tuple(np.round(v, 8)) for v in back.backend.vertices()}
    want = {tuple(np.round(v, 8)) for v in square.backend.vertices()}
    assert got == want


def _circle(k):
    ang = 2 * np.pi * np.arange(k) / k
    return np.stack([np.cos(ang), np.sin(ang)], axis=1)
