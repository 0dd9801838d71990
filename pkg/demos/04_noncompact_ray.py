"""An instance with an unbounded optimal set where even a Hoelderian error
bound fails.

Minimizing y*exp((x-1)/y) over the orthant {x <= 0, y >= 0} has optimal set
{(x, 0) : x <= 0}.  Along the horizontal ray (x, 1) with x -> -infinity the
distance to the optimal set stays exactly 1 while the residual decays like
exp(x), so the ratio d/||R|| blows up past any constant.
"""

import numpy as np

from ebound import norm, residual_map
from ebound.experiments import noncompact_instance, noncompact_ray_distance

prob = noncompact_instance()

print(f"{'x':>8} {'d(x, X)':>10} {'||R||':>12} {'ratio d/||R||':>15}")
for x in np.linspace(-5.0, -50.0, 10):
    point = np.array([x, 1.0])
    r = norm(residual_map(prob, point))
    d = noncompact_ray_distance(point)
    print(f"{x:8.1f} {d:10.3f} {r:12.3e} {d / r:15.3e}")

print("\nthe ratio grows without bound: no kappa, epsilon can satisfy the")
print("error bound, nor any Hoelder variant d <= kappa * ||R||^alpha")
