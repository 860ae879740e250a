#!/usr/bin/env python3
# # Differentiating through the pseudoinverse
#
# The learned dictionary enters the Koopman fit only through
# ``K = Psi(Y) Psi(X)^+``, so every gradient step needs the derivative of the
# Moore-Penrose pseudoinverse. Here we check the closed-form vector-Jacobian
# product against central differences, then do the same for the full loss.

import numpy as np

from kdla.koopman import kdla_loss_grad, make_dictionary
from kdla.linalg import pinv, pinv_vjp

rng = np.random.default_rng(0)

# ## A wide snapshot matrix
#
# Lifted snapshot matrices are short and wide: D observables by M snapshots.

A = rng.standard_normal((8, 40))
P = pinv(A)
print("||A A+ A - A|| =", np.linalg.norm(A @ P @ A - A))

# ## VJP against finite differences
#
# For a scalar ``s = <G, A+>`` the VJP returns ds/dA.

G = rng.standard_normal(P.shape)
analytic = pinv_vjp(A, P, G)
h = 1e-6
fd = np.zeros_like(A)
for i in range(A.shape[0]):
    for j in range(A.shape[1]):
        E = np.zeros_like(A)
        E[i, j] = h
        fd[i, j] = (np.sum(G * pinv(A + E)) - np.sum(G * pinv(A - E))) / (2 * h)
print("pinv VJP relative error:", np.linalg.norm(analytic - fd) / np.linalg.norm(fd))

# ## The full residual
#
# The KDLA loss ``||Psi(Y) - K Psi(X)||^2`` with ``K`` eliminated by the
# pseudoinverse, differentiated with respect to every network weight.

dic = make_dictionary(2, [6], 6, "tanh", seed=3)
X = rng.standard_normal((2, 40))
Y = X + 0.1 * np.sin(X)
loss, grads, K = kdla_loss_grad(dic, X, Y, rcond=0.0)
W = dic.net.arrays()[0]
g_fd = np.zeros_like(W)
for idx in np.ndindex(W.shape):
    vals = []
    for s in (h, -h):
        arrs = list(dic.net.arrays())
        arrs[0] = W.copy()
        arrs[0][idx] += s
        vals.append(kdla_loss_grad(dic.with_net(dic.net.with_arrays(arrs)), X, Y, rcond=0.0)[0])
    g_fd[idx] = (vals[0] - vals[1]) / (2 * h)
g = grads.arrays()[0]
print(f"loss {loss:.4e}, first-layer gradient relative error",
      np.linalg.norm(g - g_fd) / np.linalg.norm(g_fd))
