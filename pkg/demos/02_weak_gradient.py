# # The discrete weak gradient on one triangle
#
# A weak function is a pair {v0, vb}: a polynomial inside the triangle and an
# independent polynomial on each edge.  Its weak gradient is the RT_k field q
# with (q, w) = -(v0, div w) + <vb, w.n> for every w in RT_k.

import numpy as np

from wghelmholtz.wg import rt_basis, weak_gradient_table

P = np.array([[0.0, 0.0], [1.0, 0.2], [0.3, 0.9]])
sign = np.array([1, 1, 1])          # every local edge agrees with the global orientation

# ## Lowest order
#
# Local dofs are [v0 | vb on edge 0 | edge 1 | edge 2].  The RT0 basis is
# (1, 0), (0, 1) and the scaled position vector.

tab = weak_gradient_table(P, sign, 0)
print("RT0 Gram matrix:\n", tab.gram.round(4))

# Constants have zero weak gradient.

print("grad_d of 1:", (tab.coeffs @ np.ones(4)).round(15))

# An affine function is reproduced: project p = 2x - 3y + 1 by its centroid
# value and its edge midpoint values.

p = lambda X: 2 * X[..., 0] - 3 * X[..., 1] + 1
mids = 0.5 * (P + np.roll(P, -1, axis=0))
v = np.concatenate([[p(P.mean(axis=0))], p(mids)])
print("grad_d of 2x - 3y + 1:", (tab.coeffs @ v).round(12))

# ## First order
#
# Nine local dofs and eight RT1 functions.  Evaluate the weak gradient of a
# pair that is discontinuous between interior and edges.

tab1 = weak_gradient_table(P, sign, 1)
v1 = np.array([1.0, 0.5, -0.2, 0.0, 0.1, 0.3, 0.0, 1.0, 0.0])
coef = tab1.coeffs @ v1
basis = rt_basis(P, 1)
X = P.mean(axis=0, keepdims=True)
print("grad_d at the centroid:", np.einsum("i,qid->qd", coef, basis.evaluate(X)).round(6))
print("RT1 Gram condition number:", f"{np.linalg.cond(tab1.gram):.1f}")
