"""Tour of the Hilbert metric on three domains.

Distances are half the log of the chord cross-ratio, so the unit disk
reproduces the Klein model of the hyperbolic plane while polygons carry
normed-space-like geometries.  Writes demo_output/hilbert_geodesics.svg.
"""

import os

import numpy as np

from projconvex import domain as dm, hilbert as hb
from projconvex.projgeom import ProjPoint
from projconvex.svgfig import domain_outline, render_scene

os.makedirs("demo_output", exist_ok=True)

disk = dm.unit_disk()
print("unit disk, d((0,0),(0.5,0)) =", hb.distance(disk, [0, 0], [0.5, 0]))
print("  (equals log(3)/2 =", 0.5 * np.log(3), ")")

tri = dm.orthant_domain(2)
x = tri.chart.to_chart(ProjPoint([1.0, 1.0, 1.0]))
y = tri.chart.to_chart(ProjPoint([2.0, 1.0, 1.0]))
print("projective triangle, d([1:1:1],[2:1:1]) =", hb.distance(tri, x, y),
      "= log(2)/2 =", 0.5 * np.log(2))

# geodesic points are equally spaced in the metric, not in the chart
pts = hb.geodesic(disk, [0.0, 0.0], [0.9, 0.0], k=5)
print("\ngeodesic toward the frontier: metric gaps",
      [round(hb.distance(disk, pts[i], pts[i + 1]), 6) for i in range(5)])
print("chart gaps shrink instead:   ",
      [round(float(np.linalg.norm(pts[i + 1] - pts[i])), 4) for i in range(5)])

# projection onto a chord along the support pencil never expands distances
chordline = dm.chord(disk, [0.0, 0.0], [0.5, 0.0])
proj = hb.chord_projection(disk, chordline)
rng = np.random.default_rng(4)
worst = 0.0
for _ in range(500):
    a = disk.random_interior(rng)
    b = disk.random_interior(rng)
    pa = disk.chart.to_chart(hb.project_to_chord(proj, disk.chart.from_chart(a)))
    pb = disk.chart.to_chart(hb.project_to_chord(proj, disk.chart.from_chart(b)))
    worst = max(worst, hb.distance(disk, pa, pb) - hb.distance(disk, a, b))
print(f"\nprojection expansion over 500 pairs: max {worst:.2e} (never positive)")

# thinness of large triangles separates the disk from the simplex
for r in (0.7, 0.9, 0.99):
    t = [r * np.array([np.cos(a), np.sin(a)])
         for a in (0.0, 2 * np.pi / 3, 4 * np.pi / 3)]
    print(f"disk triangle at radius {r}: delta =",
          round(hb.thin_triangle_delta(disk, t, m=16).delta, 4))
print("  (saturates near log(1+sqrt(2)) =", round(np.log(1 + np.sqrt(2)), 4),
      "- thin triangles)")

scene = [{"type": "polygon", "points": domain_outline(disk)}]
for target in ([0.9, 0.0], [0.6, 0.6], [-0.3, 0.85]):
    g = np.array(hb.geodesic(disk, [-0.5, -0.5], target, k=12))
    scene.append({"type": "polyline", "points": g})
    scene.append({"type": "points", "points": g})
for radius in (0.5, 1.0, 1.5):
    scene.append({"type": "polygon",
                  "points": hb.metric_ball(disk, [-0.5, -0.5], radius)})
render_scene(scene, "demo_output/hilbert_geodesics.svg")
print("\nwrote demo_output/hilbert_geodesics.svg"
      " (geodesics plus three metric balls)")
