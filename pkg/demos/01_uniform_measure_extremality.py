"""The uniform measure as an energy extremizer.

Three random points on S^{d-1} span a triangle and a parallelepiped; the
expected squared area and squared volume are largest when the points are
drawn uniformly.  This script estimates both energies by Monte Carlo,
compares them with their closed forms, and then looks at the signature
property of the uniform measure: its (n-1)-fold potential is flat.
"""
from multipot import (
    area2,
    frame2,
    mc_energy_uniform,
    potential_constancy_check,
    sample_sphere,
    uniform_surrogate,
    uvt,
    vol2,
)

TUPLES = 400_000

print("=== expected squared triangle area:  3(d-1)/(4d) ===")
for d in (2, 3, 5):
    est = mc_energy_uniform(area2(), d, TUPLES, seed=d)
    target = 0.75 * (d - 1) / d
    print(f"  d={d}:  MC {est.value:.5f} +- {est.stderr:.5f}   closed form {target:.5f}")

print("\n=== expected squared parallelepiped volume:  (d-1)(d-2)/d^2 ===")
for d in (3, 4):
    est = mc_energy_uniform(vol2(), d, TUPLES, seed=10 + d)
    target = (d - 1) * (d - 2) / d**2
    print(f"  d={d}:  MC {est.value:.5f} +- {est.stderr:.5f}   closed form {target:.5f}")

print("\n=== frame energy lower bound:  E[<x,y>^2] = 1/d at the uniform measure ===")
for d in (2, 3, 4, 5, 6):
    est = mc_energy_uniform(frame2(), d, TUPLES, seed=20 + d)
    print(f"  d={d}:  MC {est.value:.5f} +- {est.stderr:.5f}   1/d = {1 / d:.5f}")

print("\n=== the potential of the uniform measure is constant ===")
sigma = uniform_surrogate(3, 20_000, seed=1)
test_points = sample_sphere(3, 50, seed=2)
for kernel, note in ((area2(), "squared area"), (uvt(), "uvt, constant 1/d^2 = 1/9")):
    report = potential_constancy_check(kernel, sigma, test_points)
    print(f"  {kernel.name:6s} ({note}): mean {report.mean:.5f}, "
          f"max deviation {report.max_deviation:.2e} "
          f"(5 stderr = {5 * report.stderr_estimate:.2e})  -> "
          f"{'constant' if report.passed else 'NOT constant'}")

print("\nA point mass, by contrast, has a visibly varying potential:")
from multipot import DiscreteMeasure, basis_vector

dirac = DiscreteMeasure.dirac(basis_vector(0, 3))
report = potential_constancy_check(uvt(), dirac, test_points)
print(f"  uvt at a point mass: max deviation {report.max_deviation:.3f} "
      f"-> {'constant' if report.passed else 'NOT constant'}")
