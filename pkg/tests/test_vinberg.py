import numpy as np
import pytest

from projconvex import domain as dm, vinberg as vb
from projconvex.errors import InvalidInputError, OutsideDualConeError
from projconvex.projgeom import ProjPoint, ProjTransform

from conftest import boost, random_orthogonal


def orthant_volume(phi):
    n1 = len(phi)
    fact = 1
    for i in range(2, n1 + 1):
        fact *= i
    return 1.0 / (fact * np.prod(phi))


@pytest.mark.parametrize("n1", [2, 3, 4])
def test_orthant_closed_form(n1, rng):
    dom = dm.orthant_domain(n1 - 1)
    cone = dom.cone()
    for _ in range(20):
        phi = rng.uniform(0.3, 3.0, size=n1)
        res = vb.volume_functional(cone, phi)
        assert res.estimator == "exact" and res.error_bound == 0.0
        assert abs(res.value - orthant_volume(phi)) < 1e-12 * orthant_volume(phi)


def test_orthant_examples():
    assert abs(vb.volume_functional(dm.orthant_domain(1), [1.0, 1.0]).value
               - 0.5) < 1e-13
    assert abs(vb.volume_functional(dm.orthant_domain(2), [1.0, 2.0, 1.0]).value
               - 1.0 / 12.0) < 1e-14


def test_volume_homogeneity_exact(rng):
    dom = dm.orthant_domain(2)
    phi = rng.uniform(0.5, 2.0, size=3)
    base = vb.volume_functional(dom, phi).value
    for t in (0.5, 1.0, 2.0, 5.0):
        v = vb.volume_functional(dom, t * phi).value
        assert abs(v * t ** 3 - base) < 1e-12 * base


def test_volume_blow_up_toward_frontier():
    dom = dm.orthant_domain(1)
    phi0 = np.array([1.0, 1.0])
    psi = np.array([1.0, 0.0])  # vanishes on a frontier ray
    last = 0.0
    for t in (0.9, 0.99, 0.999, 0.9999, 0.9999999):
        v = vb.volume_functional(dom, (1 - t) * phi0 + t * psi).value
        assert v > last
        last = v
    assert last > 1e6


def test_outside_dual_cone_rejected():
    with pytest.raises(OutsideDualConeError):
        vb.volume_functional(dm.orthant_domain(1), [1.0, -0.5])
    with pytest.raises(OutsideDualConeError):
        vb.volume_functional(dm.unit_disk(), [1.0, 0.0, 0.5])


def test_quadrature_cross_check(rng):
    for dom in (dm.unit_disk(), dm.square_domain()):
        phi = np.array([0.2, -0.1, 1.0])
        exact = vb.volume_functional(dom, phi)
        mc = vb.volume_functional_quadrature(dom, phi, samples=40000, seed=11)
        assert mc.estimator == "quadrature" and mc.error_bound > 0
        assert abs(mc.value - exact.value) < 5 * mc.error_bound


def _fd_gradient(cone, phi, h=1e-6):
    n1 = len(phi)
    out = np.empty(n1)
    for i in range(n1):
        e = np.zeros(n1)
        e[i] = h
        out[i] = (vb.volume_functional(cone, phi + e).value
                  - vb.volume_functional(cone, phi - e).value) / (2 * h)
    return out


def test_gradient_against_finite_differences(rng):
    domains = [dm.orthant_domain(1), dm.orthant_domain(2), dm.unit_disk(),
               dm.square_domain(), dm.disk_polygon(16)]
    for dom in domains:
        cone = dom.cone()
        v_inf = dom.chart.infinity
        for _ in range(10):
            phi = v_inf + 0.3 * rng.normal(size=v_inf.size)
            if cone.dual_margin(phi) <= 0.05:
                continue
            g = vb.grad_volume(cone, phi)
            fd = _fd_gradient(cone, phi)
            assert np.linalg.norm(g - fd) < 1e-4 * np.linalg.norm(fd)


def test_gradient_closed_form_orthant():
    g = vb.grad_volume(dm.orthant_domain(1), [1.0, 1.0])
    assert np.allclose(g, [-0.5, -0.5], atol=1e-13)


def test_gradient_symmetry_round_cone():
    g = vb.grad_volume(dm.unit_disk(), [0.0, 0.0, 1.0])
    assert abs(g[0]) < 1e-12 and abs(g[1]) < 1e-12


def test_slice_centroid_examples():
    mu2 = vb.slice_centroid(dm.orthant_domain(1), [1.0, 1.0])
    assert np.allclose(mu2, [0.5, 0.5], atol=1e-13)
    mu3 = vb.slice_centroid(dm.orthant_domain(2), [1.0, 1.0, 1.0])
    assert np.allclose(mu3, [1 / 3] * 3, atol=1e-13)
    mu_disk = vb.slice_centroid(dm.unit_disk(), [0.0, 0.0, 2.0])
    assert abs(mu_disk[0]) < 1e-12 and abs(mu_disk[1]) < 1e-12


def test_slice_centroid_in_slice(rng):
    dom = dm.orthant_domain(2)
    cone = dom.cone()
    for _ in range(20):
        phi = rng.uniform(0.5, 2.0, size=3)
        mu = vb.slice_centroid(cone, phi)
        assert abs(phi @ mu - 1.0) < 1e-9
        assert cone.contains_vector(mu) > 0


def test_fiber_minimum_orthant():
    fm = vb.min_volume_on_fiber(dm.orthant_domain(1), [1.0, 1.0])
    assert np.allclose(fm.phi, [0.5, 0.5], atol=1e-9)
    assert abs(fm.value - 2.0) < 1e-9


def test_fiber_minimum_symmetry(rng):
    for n1 in (2, 3, 4):
        dom = dm.orthant_domain(n1 - 1)
        t = rng.uniform(0.5, 2.0)
        fm = vb.min_volume_on_fiber(dom, np.full(n1, t))
        assert np.ptp(fm.phi) < 1e-9
    fm = vb.min_volume_on_fiber(dm.unit_disk(), [0.0, 0.0, 1.0])
    assert abs(fm.phi[0]) < 1e-10 and abs(fm.phi[1]) < 1e-10


def test_fiber_minimum_rejects_outside():
    with pytest.raises(InvalidInputError):
        vb.min_volume_on_fiber(dm.orthant_domain(1), [1.0, -1.0])


def test_volume_strictly_convex_on_fibers(rng):
    dom = dm.orthant_domain(2)
    cone = dom.cone()
    q = np.array([1.0, 1.0, 1.0])
    basis = np.array([[1.0, -1.0, 0.0], [0.0, 1.0, -1.0]])
    for _ in range(30):
        phi0 = np.full(3, 1 / 3) + 0.08 * (rng.normal(size=2) @ basis)
        phi1 = np.full(3, 1 / 3) + 0.08 * (rng.normal(size=2) @ basis)
        if np.linalg.norm(phi0 - phi1) < 1e-3:
            continue
        vm = vb.volume_functional(cone, 0.5 * (phi0 + phi1)).value
        v0 = vb.volume_functional(cone, phi0).value
        v1 = vb.volume_functional(cone, phi1).value
        assert vm < 0.5 * (v0 + v1) - 1e-12


def test_gradient_parallel_at_minimum(rng):
    for dom in (dm.orthant_domain(2), dm.unit_disk()):
        cone = dom.cone()
        for _ in range(5):
            x = dom.random_interior(rng, margin=0.1)
            q = dom.chart.lift(x)
            fm = vb.min_volume_on_fiber(cone, q)
            g = vb.grad_volume(cone, fm.phi)
            cosang = abs(g @ q) / (np.linalg.norm(g) * np.linalg.norm(q))
            assert np.arccos(min(cosang, 1.0)) < 1e-6


def test_theta_examples():
    p = vb.theta(dm.orthant_domain(1), [0.5, 0.5])
    assert p.same_class(ProjPoint([1.0, 1.0]), tol=1e-12)
    p2 = vb.theta(dm.unit_disk(), [0.0, 0.0, 1.0])
    assert p2.same_class(ProjPoint([0.0, 0.0, 1.0]), tol=1e-12)


def test_theta_equivariance():
    # diagonal automorphisms of the orthant cone
    dom = dm.orthant_domain(2)
    cone = dom.cone()
    from projconvex.projgeom import DualFunctional

    a = ProjTransform(np.diag([2.0, 1.0, 0.5]))
    for phi in ([1.0, 1.0, 1.0], [0.7, 1.3, 0.9]):
        phi = np.asarray(phi)
        lhs = vb.theta(cone, a.dual_apply(DualFunctional(phi)).coeffs)
        rhs = a.apply(vb.theta(cone, phi / np.linalg.norm(phi)))
        assert lhs.same_class(rhs, tol=1e-7)
    # boosts of the round cone
    disk = dm.unit_disk()
    b = ProjTransform(boost(0.6))
    phi = np.array([0.1, -0.2, 1.0])
    lhs = vb.theta(disk, b.dual_apply(DualFunctional(phi)).coeffs)
    rhs = b.apply(vb.theta(disk, phi / np.linalg.norm(phi)))
    assert lhs.same_class(rhs, tol=1e-7)


def test_theta_inverse_round_trip(rng):
    for dom in (dm.orthant_domain(1), dm.orthant_domain(2), dm.unit_disk()):
        cone = dom.cone()
        for _ in range(25):
            x = dom.random_interior(rng)
            p = dom.chart.from_chart(x)
            phi = vb.theta_inverse(cone, p)
            assert abs(vb.volume_functional(cone, phi).value - 1.0) < 1e-6
            back = vb.theta(cone, phi)
            assert np.linalg.norm(back.coords - p.coords) < 1e-6


def test_theta_inverse_orthant_example():
    phi = vb.theta_inverse(dm.orthant_domain(1), ProjPoint([1.0, 1.0]))
    assert abs(phi[0] - phi[1]) < 1e-9


def test_characteristic_point_orthant(rng):
    dom = dm.orthant_domain(1)
    cone = dom.cone()
    cp = vb.characteristic_point(cone, np.array([1.0, 1.0]))
    assert np.allclose(cp, [1 / np.sqrt(2)] * 2, atol=1e-10)
    for _ in range(50):
        a = rng.uniform(0.1, 0.9)
        q = np.array([a, 1 - a])
        cp = vb.characteristic_point(cone, q)
        assert abs(cp[0] * cp[1] - 0.5) < 1e-8


def test_characteristic_point_equivariance(rng):
    dom = dm.orthant_domain(1)
    cone = dom.cone()
    for _ in range(10):
        s = rng.uniform(0.5, 2.0)
        a = np.diag([s, 1.0 / s])
        q = np.array([rng.uniform(0.2, 1.0), rng.uniform(0.2, 1.0)])
        lhs = vb.characteristic_point(cone, a @ q)
        rhs = a @ vb.characteristic_point(cone, q)
        rhs = rhs / np.linalg.norm(rhs) * np.linalg.norm(rhs)
        # both on the surface along the same ray
        assert np.linalg.norm(lhs / np.linalg.norm(lhs)
                              - rhs / np.linalg.norm(rhs)) < 1e-10
        assert abs(np.linalg.norm(lhs) - np.linalg.norm(rhs)) < 1e-8


def test_characteristic_surface_consistency(rng):
    for dom in (dm.orthant_domain(1), dm.unit_disk()):
        surf = vb.CharacteristicSurface(dom)
        for _ in range(10):
            q = dom.chart.lift(dom.random_interior(rng, margin=0.05))
            assert surf.consistency_gap(q) < 1e-9
            assert surf.radius(q) > 0


def test_spherical_center_round_cone(disk):
    sc = vb.spherical_center(disk)
    assert np.linalg.norm(sc.center.coords - np.array([0, 0, 1.0])) < 1e-9
    assert np.allclose(sc.rotation.matrix @ sc.center.coords,
                       disk.chart.infinity, atol=1e-9)


def test_spherical_center_orthant():
    for n1 in (2, 3, 4):
        dom = dm.orthant_domain(n1 - 1)
        sc = vb.spherical_center(dom)
        assert np.linalg.norm(sc.center.coords
                              - np.ones(n1) / np.sqrt(n1)) < 1e-8


def test_spherical_center_equivariance(rng):
    dom = dm.orthant_domain(2)
    base = vb.spherical_center(dom).center.coords
    for _ in range(8):
        q = random_orthogonal(rng, 3)
        moved = dom.transform(ProjTransform(q))
        sc = vb.spherical_center(moved)
        expect = q @ base
        diff = min(np.linalg.norm(sc.center.coords - expect),
                   np.linalg.norm(sc.center.coords + expect))
        assert diff < 1e-7
