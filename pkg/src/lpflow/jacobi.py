"""Cyclic Jacobi eigensolver for complex Hermitian matrices.

Row-cyclic sweeps of 2x2 unitary rotations.  Each rotation is the product
of a diagonal phase (turning the pivot real) and a real Givens rotation, so
the iteration is the classical real Jacobi method applied in a moving
complex frame.  Convergence is unconditional; the stopping rule compares the
off-diagonal Frobenius mass with the Frobenius norm of the input.
"""

import numpy as np

from .errors import NoConvergence

__all__ = ["jacobi_eigh"]


def _off(a):
    return np.sqrt(max(np.sum(np.abs(a) ** 2) - np.sum(np.abs(np.diag(a)) ** 2), 0.0))


def jacobi_eigh(a, tol=1e-13, max_sweeps=100):
    """Eigen-decompose a Hermitian matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    a : (n, n) array_like
        Hermitian matrix; only the Hermitian part is used.
    tol : float
        Relative threshold on the off-diagonal Frobenius mass.
    max_sweeps : int
        Hard cap on the number of full sweeps.

    Returns
    -------
    w : (n,) ndarray
        Eigenvalues in ascending order.
    v : (n, n) ndarray
        Unitary matrix whose columns are the matching eigenvectors.
    """
    a = np.array(a, dtype=complex)
    a = 0.5 * (a + a.conj().T)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    if n <= 1:
        return a.real.diagonal().copy(), v
    scale = np.linalg.norm(a)
    if scale == 0.0:
        return np.zeros(n), v
    target = tol * scale
    for _sweep in range(max_sweeps):
        if _off(a) <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= 1e-300:
                    continue
                phase = apq / mag
                app = a[p, p].real
                aqq = a[q, q].real
                theta = (aqq - app) / (2.0 * mag)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # V = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                r = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ r
                a[idx, :] = r.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, idx] = v[:, idx] @ r
    else:
        if _off(a) > target:
            raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps")
    w = a.real.diagonal().copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]
