"""Cyclic Jacobi eigenvalues for stacks of real symmetric matrices."""

from __future__ import annotations

import numpy as np

OFF_REL = 1e-12
MAX_SWEEPS = 100


def _off(a):
    n = a.shape[-1]
    mask = ~np.eye(n, dtype=bool)
    return np.sqrt(np.sum(np.where(mask, a, 0.0) ** 2, axis=(-2, -1)))


def jacobi_eigvalsh(a, off_rel: float = OFF_REL, max_sweeps: int = MAX_SWEEPS) -> np.ndarray:
    """Eigenvalues (ascending) of one ``(n, n)`` or a stack ``(..., n, n)``.

    Sweeps rotate every ``(p, q)`` pair in row order and stop once each
    matrix has off-diagonal Frobenius norm ``<= off_rel * ||A||_F``.
    Every matrix in the stack is rotated in lockstep; converged ones see
    rotations with ``t ~ 0`` and stay put.
    """
    a = np.array(a, dtype=float)
    single = a.ndim == 2
    if single:
        a = a[None]
    shape = a.shape
    n = shape[-1]
    a = a.reshape(-1, n, n).copy()
    target = off_rel * np.sqrt(np.sum(a**2, axis=(1, 2)))
    pairs = [(p, q) for p in range(n - 1) for q in range(p + 1, n)]
    for _ in range(max_sweeps):
        if np.all(_off(a) <= target):
            break
        for p, q in pairs:
            apq = a[:, p, q]
            active = apq != 0.0
            if not active.any():
                continue
            app, aqq = a[:, p, p], a[:, q, q]
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                theta = np.where(active, (aqq - app) / (2.0 * np.where(active, apq, 1.0)), 0.0)
                t = np.where(
                    active,
                    np.sign(theta + (theta == 0)) / (np.abs(theta) + np.sqrt(theta * theta + 1.0)),
                    0.0,
                )
            # theta**2 overflows for tiny apq; the rotation is then ~identity.
            t = np.where(np.isfinite(t), t, 0.0)
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            cc, ss = c[:, None], s[:, None]
            col_p, col_q = a[:, :, p].copy(), a[:, :, q].copy()
            a[:, :, p] = cc * col_p - ss * col_q
            a[:, :, q] = ss * col_p + cc * col_q
            row_p, row_q = a[:, p, :].copy(), a[:, q, :].copy()
            a[:, p, :] = cc * row_p - ss * row_q
            a[:, q, :] = ss * row_p + cc * row_q
            a[:, p, q] = np.where(active, 0.0, a[:, p, q])
            a[:, q, p] = a[:, p, q]
    w = np.sort(np.diagonal(a, axis1=1, axis2=2), axis=1)
    w = w.reshape(shape[:-1])
    return w[0] if single else w
