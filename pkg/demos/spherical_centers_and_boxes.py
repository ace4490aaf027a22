"""Spherical centers, isotropic position, and the entrywise box estimate.

The spherical center is the point of the radial characteristic surface
closest to the apex; rotating it to the chart pole makes the chart centroid
zero, and rescaling the inertia axes to unit second moment puts the domain
in a certified box sandwich.  Projective maps of sandwiched boxes obey an
entrywise matrix bound.
"""

import numpy as np

from projconvex import domain as dm, group as gp, normalize as nm, vinberg as vb
from projconvex.projgeom import ProjTransform


def boost(t):
    return np.array([[np.cosh(t), 0, np.sinh(t)],
                     [0, 1, 0],
                     [np.sinh(t), 0, np.cosh(t)]])


disk = dm.unit_disk()
sc = vb.spherical_center(disk)
print("center of the round cone:", sc.center.coords, "(the pole)")

orthant = dm.orthant_domain(2)
sc2 = vb.spherical_center(orthant)
print("center of the orthant:", np.round(sc2.center.coords, 12),
      "= [1:1:1] normalized")

rng = np.random.default_rng(2)
q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
moved = orthant.transform(ProjTransform(q))
sc3 = vb.spherical_center(moved)
gap = min(np.linalg.norm(sc3.center.coords - q @ sc2.center.coords),
          np.linalg.norm(sc3.center.coords + q @ sc2.center.coords))
print(f"equivariance under a random rotation: gap {gap:.2e}")

# isotropic normalization and the sandwich
print("\nmoments of the standard triangle:")
m = nm.moments(dm.triangle_domain())
print("  centroid", m.centroid, "\n  second moment\n", m.second_moment)

iso = nm.isotropic_normalize(dm.unit_disk())
print("\nunit disk: normalizing scales", iso.scales,
      "-> radius-2 disk, sandwich K =", iso.sandwich.outer_K)
print("  (tight outer box K=2; the inscribed box allows s =",
      round(iso.sandwich.inner_scale, 6), ")")

# automorphisms of the sandwiched disk obey the entrywise bound
d_mat = iso.diag_matrix()
worst_ratio = 0.0
for t in (0.4, 0.9, 1.5):
    a = d_mat @ boost(t) @ np.linalg.inv(d_mat)
    assert gp.is_automorphism(iso.domain, ProjTransform(a)).is_automorphism
    res = nm.box_bound_check(a, iso.sandwich.outer_K)
    ratio = np.max(np.abs(a)) / abs(a[-1, -1])
    worst_ratio = max(worst_ratio, ratio)
    print(f"boost t={t}: box image inside K, entry ratio "
          f"{ratio:.3f} <= 2K = {res.bound / abs(a[-1, -1]):.1f},"
          f" conclusion holds: {res.conclusion_holds}")
print(f"largest entry ratio seen: {worst_ratio:.3f}")
