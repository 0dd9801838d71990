"""Assemble a composite problem F = h(A x) + <c, x> + P(x), solve it, and
certify the optimum.

The certificate freezes the two invariants of the optimal set: every optimum
has the same image A(x*) and the same gradient grad f(x*).  The proximal
residual R(x) = prox_P(x - grad f(x)) - x vanishes exactly at optima, so its
norm is the natural convergence measure.
"""

import numpy as np

from ebound import (
    CompositeSmooth,
    DenseMap,
    L1,
    LeastSquares,
    ProblemInstance,
    certify,
    norm,
    objective,
    proximal_gradient,
    r_alt,
    residual_map,
)
from ebound.solver import Fixed, lipschitz_bound

rng = np.random.default_rng(0)

# .. a small underdetermined least-squares problem with an L1 penalty ..
m, n = 6, 10
M = rng.standard_normal((m, n))
x_true = np.zeros(n)
x_true[[1, 4]] = [2.0, -1.0]
b = M @ x_true + 0.05 * rng.standard_normal(m)

smooth = CompositeSmooth(LeastSquares(b), DenseMap(M, (n,)), np.zeros(n))
prob = ProblemInstance(smooth, L1(0.3 * np.max(np.abs(M.T @ b))), np.zeros(n))

# .. proximal gradient with the safe fixed step 1/L ..
L = lipschitz_bound(prob)
trace = proximal_gradient(prob, np.zeros(n), step=Fixed(1.0 / L),
                          tol=1e-11, max_iter=50000)
print(f"solved in {len(trace.iterations) - 1} iterations, status {trace.status}")
print(f"objective at terminal point: {objective(prob, trace.terminal):.8f}")

cert = certify(prob, trace.terminal, tol=1e-9)
print(f"certified with residual norm {cert.residual_norm:.2e}")
print("invariant image  y_bar:", np.array2string(cert.y_bar, precision=4))
print("invariant grad g_bar:", np.array2string(cert.g_bar, precision=4))

# .. both residuals vanish at the optimum and grow away from it ..
for rho in (0.0, 1e-3, 1e-1):
    x = cert.x_star + rho * rng.standard_normal(n)
    print(f"rho = {rho:6.0e}:  ||R(x)|| = {norm(residual_map(prob, x)):9.3e}"
          f"   r_alt(x) = {r_alt(prob, cert, x):9.3e}")
