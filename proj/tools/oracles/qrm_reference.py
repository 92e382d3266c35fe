"""Sparse-direct reference for the regularized forward problem.

Builds the weighted least-squares operator from Kronecker products of 1-D
stencils (independent of the C++ node loops) and solves the normal
equations with a sparse LU instead of conjugate gradient.

  python3 qrm_reference.py            grid-refinement study and fixtures
"""
import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla


def d1(n, h):
    """First derivative: central inside, second-order one-sided at the ends."""
    D = sp.lil_matrix((n + 1, n + 1))
    for k in range(1, n):
        D[k, k - 1] = -1 / (2 * h)
        D[k, k + 1] = 1 / (2 * h)
    D[0, 0:3] = np.array([-3, 4, -1]) / (2 * h)
    D[n, n - 2:n + 1] = np.array([1, -4, 3]) / (2 * h)
    return D.tocsr()


def d2(n, h):
    """Second derivative: three-point stencil, shifted inward at the ends."""
    D = sp.lil_matrix((n + 1, n + 1))
    for k in range(1, n):
        D[k, k - 1:k + 2] = np.array([1, -2, 1]) / h**2
    D[0, 0:3] = np.array([1, -2, 1]) / h**2
    D[n, n - 2:n + 1] = np.array([1, -2, 1]) / h**2
    return D.tocsr()


def trapezoid(n, h):
    w = np.full(n + 1, h)
    w[0] = w[-1] = h / 2
    return w


def operator(nx, nt, T, b, beta):
    hx, ht = 1 / nx, T / nt
    Ix, It = sp.identity(nx + 1), sp.identity(nt + 1)
    Dt = sp.lil_matrix((nt + 1, nt + 1))
    for j in range(nt):
        Dt[j, j], Dt[j, j + 1] = -1 / ht, 1 / ht
    Dt[nt, nt - 1], Dt[nt, nt] = -1 / ht, 1 / ht
    R = sp.kron(Ix, Dt.tocsr()) + sp.diags(b.ravel()) @ sp.kron(d2(nx, hx), It)
    wx = np.full(nx + 1, hx)
    wx[0] = wx[-1] = 0.0
    w_res = np.outer(wx, trapezoid(nt, ht)).ravel()
    w_full = np.outer(trapezoid(nx, hx), trapezoid(nt, ht)).ravel()
    h2 = [sp.identity((nx + 1) * (nt + 1)), sp.kron(d1(nx, hx), It), sp.kron(Ix, d1(nt, ht)),
          sp.kron(d2(nx, hx), It), sp.kron(d1(nx, hx), d1(nt, ht)), sp.kron(Ix, d2(nt, ht))]
    blocks = [sp.diags(np.sqrt(w_res)) @ R] + [sp.diags(np.sqrt(beta * w_full)) @ O for O in h2]
    return sp.vstack(blocks).tocsr()


def manufactured(nx, nt, T, beta):
    x, t = np.linspace(0, 1, nx + 1), np.linspace(0, T, nt + 1)
    X, Tm = np.meshgrid(x, t, indexing="ij")
    exact = np.exp(np.pi**2 * Tm) * np.sin(np.pi * X)
    A = operator(nx, nt, T, np.ones_like(X), beta)
    F = np.zeros_like(X)
    F[:, 0] = np.sin(np.pi * x)
    free = np.zeros_like(X, bool)
    free[1:nx, 1:] = True
    idx = np.flatnonzero(free.ravel())
    Af = A[:, idx]
    w = spla.spsolve((Af.T @ Af).tocsc(), -(Af.T @ (A @ F.ravel())))
    u = F.ravel().copy()
    u[idx] += w
    u = u.reshape(X.shape)
    W = np.outer(trapezoid(nx, 1 / nx), trapezoid(nt, T / nt))
    err = np.sqrt((W * (u - exact) ** 2).sum() / (W * exact**2).sum())
    J = float(np.sum((A @ u.ravel()) ** 2))
    J_lift = float(np.sum((A @ F.ravel()) ** 2))
    return err, u, J, J_lift


if __name__ == "__main__":
    print("grid-refinement study, T = 0.1, beta = 1e-6")
    for n in (16, 32, 64, 128):
        err, *_ = manufactured(n, n, 0.1, 1e-6)
        print(f"  {n:4d} x {n:<4d} relative error {err:.10f}")
    print("fixture: 16 x 16, T = 0.1, beta = 1e-4")
    err, u, J, J_lift = manufactured(16, 16, 0.1, 1e-4)
    print(f"  relative error {err:.15g}")
    print(f"  J(min) {J:.15g}  J(F) {J_lift:.15g}")
    for i, j in ((8, 8), (8, 16), (4, 12), (12, 4)):
        print(f"  u[{i},{j}] = {u[i, j]:.15g}")
