"""Pure-numpy versions of the batched kernels (fallback backend)."""
from __future__ import annotations

import numpy as np

__all__ = ["boundary_batch", "poisson_transport", "poisson_accumulate"]


def boundary_batch(X: np.ndarray, XI: np.ndarray):
    """Phi_-+, B_-+ for a batch of unit tangents (rows of X, XI)."""
    X = np.ascontiguousarray(X, dtype=float)
    XI = np.ascontiguousarray(XI, dtype=float)
    phi_m = X[:, 0] - XI[:, 0]
    phi_p = X[:, 0] + XI[:, 0]
    Bm = (X[:, 1:] - XI[:, 1:]) / phi_m[:, None]
    Bp = (X[:, 1:] + XI[:, 1:]) / phi_p[:, None]
    return phi_m, phi_p, Bm, Bp


def poisson_transport(x: np.ndarray, F: np.ndarray, nodes: np.ndarray, sign: int):
    """Kernel values P(x, nu_j) and matrices T_j[a, b] = (A^{-1} Pi t_a)_b.

    F holds an orthonormal frame of T_x as columns, shape (n+2, n+1).
    """
    x = np.asarray(x, dtype=float)
    nodes = np.ascontiguousarray(nodes, dtype=float)
    P = 1.0 / (x[0] - nodes @ x[1:])
    xi = np.empty((nodes.shape[0], x.shape[0]))
    xi[:, 0] = sign * (P - x[0])
    xi[:, 1:] = sign * (P[:, None] * nodes - x[1:])
    # Minkowski pairing <t_a, xi_j>
    c = np.outer(xi[:, 0], F[0]) - xi[:, 1:] @ F[1:]
    proj = F[None, :, :] + xi[:, :, None] * c[:, None, :]  # (M, n+2, n+1): column a = Pi t_a
    T = np.transpose(proj[:, 1:, :], (0, 2, 1)) - proj[:, 0, :][:, :, None] * nodes[:, None, :]
    return P, np.ascontiguousarray(T)


def poisson_accumulate(kw: np.ndarray, T: np.ndarray, W: np.ndarray) -> np.ndarray:
    """sum_j kw_j (T_j^{(x) m} W_j), m = W.ndim - 1."""
    R = np.asarray(W, dtype=complex)
    m = R.ndim - 1
    for _ in range(m):
        R = np.einsum("jab,jb...->j...a", T, R)
    return np.tensordot(np.asarray(kw, dtype=complex), R, axes=(0, 0))
