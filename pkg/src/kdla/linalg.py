"""SVD, Moore-Penrose pseudoinverse and its reverse-mode derivative, eigenvalues.

Two SVD backends are available:

``"lapack"``
    ``numpy.linalg.svd`` on a QR-compressed factor. Default; fast enough to sit
    inside training loops.
``"jacobi"``
    One-sided (Hestenes) Jacobi implemented here with a round-robin ordering so
    that each round rotates ``k/2`` disjoint column pairs at once.

The eigenvalue solver is a Householder Hessenberg reduction followed by the
Francis double-shift QR iteration.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, NumericalError

_EPS = np.finfo(float).eps


def _as_matrix(A, name="A"):
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NumericalError(f"{name} contains non-finite entries")
    return A


def _round_robin(k):
    """Pair schedule covering every (p, q), p < q, in k-1 (or k) rounds."""
    n = k + (k % 2)
    players = list(range(n))
    rounds = []
    for _ in range(n - 1):
        pairs = [(players[i], players[n - 1 - i]) for i in range(n // 2)]
        pairs = [(min(p, q), max(p, q)) for p, q in pairs if p < k and q < k]
        if pairs:
            rounds.append(np.array(pairs, dtype=int).T)
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def _jacobi_tall(B, max_sweeps=60, tol=None):
    """One-sided Jacobi SVD of a tall (m >= k) matrix. Returns U, s, V."""
    B = B.copy()
    m, k = B.shape
    V = np.eye(k)
    if tol is None:
        tol = m * _EPS
    rounds = _round_robin(k)
    off = np.inf
    for sweep in range(max_sweeps):
        off = 0.0
        for p, q in rounds:
            bp, bq = B[:, p], B[:, q]
            alpha = np.einsum("ij,ij->j", bp, bp)
            beta = np.einsum("ij,ij->j", bq, bq)
            gamma = np.einsum("ij,ij->j", bp, bq)
            scale = np.sqrt(alpha * beta)
            rel = np.zeros_like(gamma)
            nz = scale > 0
            rel[nz] = np.abs(gamma[nz]) / scale[nz]
            off = max(off, float(rel.max(initial=0.0)))
            act = rel > tol
            if not np.any(act):
                continue
            p, q = p[act], q[act]
            alpha, beta, gamma = alpha[act], beta[act], gamma[act]
            zeta = (beta - alpha) / (2.0 * gamma)
            t = np.sign(zeta) / (np.abs(zeta) + np.sqrt(1.0 + zeta * zeta))
            t[zeta == 0] = 1.0
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = c * t
            bp, bq = B[:, p].copy(), B[:, q]
            B[:, p] = c * bp - s * bq
            B[:, q] = s * bp + c * bq
            vp, vq = V[:, p].copy(), V[:, q]
            V[:, p] = c * vp - s * vq
            V[:, q] = s * vp + c * vq
        if off <= tol:
            break
    else:
        raise NumericalError(
            f"Jacobi SVD did not converge after {max_sweeps} sweeps "
            f"(largest relative column coupling {off:.3e}, tolerance {tol:.3e})"
        )
    sv = np.linalg.norm(B, axis=0)
    order = np.argsort(-sv, kind="stable")
    sv = sv[order]
    B = B[:, order]
    V = V[:, order]
    U = np.zeros_like(B)
    nz = sv > 0
    U[:, nz] = B[:, nz] / sv[nz]
    return U, sv, V


def svd(A, method="lapack"):
    """Thin SVD ``A = U @ diag(s) @ Vt`` with ``s`` in descending order.

    Parameters
    ----------
    A : (p, q) array_like
    method : {"lapack", "jacobi"}

    Returns
    -------
    U : (p, r) ndarray
    s : (r,) ndarray
    Vt : (r, q) ndarray
        with ``r = min(p, q)``. For ``method="jacobi"`` the columns of ``U``
        that belong to exactly zero singular values are zero.
    """
    A = _as_matrix(A)
    p, q = A.shape
    if p < q:
        U, s, Vt = svd(A.T, method)
        return Vt.T, s, U.T
    if min(p, q) == 0:
        return np.zeros((p, 0)), np.zeros(0), np.zeros((0, q))
    # tall from here on: compress to a q x q triangle first
    if p > q:
        Q, R = np.linalg.qr(A, mode="reduced")
    else:
        Q, R = None, A
    if method == "lapack":
        try:
            Ur, s, Vt = np.linalg.svd(R, full_matrices=False)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"LAPACK SVD failed on a {p}x{q} matrix: {exc}") from exc
    elif method == "jacobi":
        Ur, s, V = _jacobi_tall(R)
        Vt = V.T
    else:
        raise ValueError(f"unknown SVD method {method!r}")
    U = Ur if Q is None else Q @ Ur
    return U, s, Vt


def pinv(A, rcond=1e-12, method="lapack"):
    """Moore-Penrose pseudoinverse via the SVD.

    Singular values below ``rcond * s.max()`` are treated as zero.
    """
    A = _as_matrix(A)
    if rcond < 0:
        raise ValueError("rcond must be non-negative")
    p, q = A.shape
    U, s, Vt = svd(A, method)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((q, p))
    keep = s > rcond * s[0]
    inv = np.zeros_like(s)
    inv[keep] = 1.0 / s[keep]
    return (Vt.T * inv) @ U.T


def pinv_vjp(A, Aplus, upstream):
    """Vector-Jacobian product of ``A -> pinv(A)``.

    Adjoint of the first-order perturbation

        dA+ = -A+ dA A+ + (I - A+ A) dA^T A+^T A+ + A+ A+^T dA^T (I - A A+)

    applied to ``upstream`` (same shape as ``Aplus``). All three terms are kept so
    the result is valid at any (locally constant) rank. No ``max(p, q)``-square
    matrix is formed.
    """
    A = np.asarray(A, dtype=float)
    Aplus = np.asarray(Aplus, dtype=float)
    G = np.asarray(upstream, dtype=float)
    if A.ndim != 2 or Aplus.shape != A.T.shape:
        raise DimensionError(f"Aplus shape {Aplus.shape} does not match A shape {A.shape}")
    if G.shape != Aplus.shape:
        raise DimensionError(f"upstream shape {G.shape} must equal Aplus shape {Aplus.shape}")
    p, q = A.shape
    if p > q:
        # pinv(A^T) = pinv(A)^T, so work on the wide orientation
        return pinv_vjp(A.T, Aplus.T, G.T).T
    Gt = G.T  # p x q
    GtAp = Gt @ Aplus  # p x p
    term1 = -Aplus.T @ G @ Aplus.T
    term2 = (Aplus.T @ Aplus) @ (Gt - GtAp @ A)
    proj = np.eye(p) - A @ Aplus
    term3 = proj @ GtAp @ Aplus.T
    return term1 + term2 + term3


# --------------------------------------------------------------------------
# eigenvalues


def _balance(H):
    """Diagonal similarity scaling by powers of two (in place); improves eigenvalue accuracy."""
    radix = 2.0
    n = H.shape[0]
    done = False
    while not done:
        done = True
        for i in range(n):
            c = np.abs(H[:, i]).sum() - abs(H[i, i])
            r = np.abs(H[i, :]).sum() - abs(H[i, i])
            if c == 0.0 or r == 0.0:
                continue
            g = r / radix
            f = 1.0
            s = c + r
            while c < g:
                f *= radix
                c *= radix * radix
            g = r * radix
            while c > g:
                f /= radix
                c /= radix * radix
            if (c + r) / f < 0.95 * s:
                done = False
                H[i, :] /= f
                H[:, i] *= f
    return H


def hessenberg(A):
    """Upper Hessenberg form of ``A`` by Householder similarity transforms."""
    H = np.array(A, dtype=float)
    n = H.shape[0]
    for k in range(n - 2):
        x = H[k + 1 :, k].copy()
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        v = x
        v[0] += np.copysign(alpha, x[0])
        v /= np.linalg.norm(v)
        H[k + 1 :, k:] -= 2.0 * np.outer(v, v @ H[k + 1 :, k:])
        H[:, k + 1 :] -= 2.0 * np.outer(H[:, k + 1 :] @ v, v)
        H[k + 2 :, k] = 0.0
    return H


def _hqr(a, max_its=60):
    """Eigenvalues of an upper Hessenberg matrix (destroys ``a``)."""
    n = a.shape[0]
    wr = np.zeros(n)
    wi = np.zeros(n)
    anorm = np.abs(np.triu(a, -1)).sum()
    nn = n - 1
    t = 0.0
    its = 0
    total_its = 0
    x = y = w = 0.0
    while nn >= 0:
        for l in range(nn, 0, -1):
            s = abs(a[l - 1, l - 1]) + abs(a[l, l])
            if s == 0.0:
                s = anorm
            if abs(a[l, l - 1]) <= _EPS * s:
                a[l, l - 1] = 0.0
                break
        else:
            l = 0
        x = a[nn, nn]
        if l == nn:
            wr[nn] = x + t
            wi[nn] = 0.0
            nn -= 1
            its = 0
            continue
        y = a[nn - 1, nn - 1]
        w = a[nn, nn - 1] * a[nn - 1, nn]
        if l == nn - 1:
            p = 0.5 * (y - x)
            q = p * p + w
            z = np.sqrt(abs(q))
            x += t
            if q >= 0.0:
                z = p + np.copysign(z, p)
                wr[nn - 1] = wr[nn] = x + z
                if z != 0.0:
                    wr[nn] = x - w / z
                wi[nn - 1] = wi[nn] = 0.0
            else:
                wr[nn - 1] = wr[nn] = x + p
                wi[nn - 1] = z
                wi[nn] = -z
            nn -= 2
            its = 0
            continue
        if its == max_its:
            raise NumericalError(
                f"QR iteration failed to converge for eigenvalue {nn} after {its} "
                f"iterations ({total_its} in total)"
            )
        if its in (10, 20, 40):
            # exceptional shift
            t += x
            idx = np.arange(nn + 1)
            a[idx, idx] -= x
            s = abs(a[nn, nn - 1]) + abs(a[nn - 1, nn - 2])
            y = x = 0.75 * s
            w = -0.4375 * s * s
        its += 1
        total_its += 1
        for m in range(nn - 2, l - 1, -1):
            z = a[m, m]
            r = x - z
            s = y - z
            p = (r * s - w) / a[m + 1, m] + a[m, m + 1]
            q = a[m + 1, m + 1] - z - r - s
            r = a[m + 2, m + 1]
            s = abs(p) + abs(q) + abs(r)
            p /= s
            q /= s
            r /= s
            if m == l:
                break
            u = abs(a[m, m - 1]) * (abs(q) + abs(r))
            v = abs(p) * (abs(a[m - 1, m - 1]) + abs(z) + abs(a[m + 1, m + 1]))
            if u <= _EPS * v:
                break
        for i in range(m, nn - 1):
            a[i + 2, i] = 0.0
            if i != m:
                a[i + 2, i - 1] = 0.0
        for k in range(m, nn):
            if k != m:
                p = a[k, k - 1]
                q = a[k + 1, k - 1]
                r = a[k + 2, k - 1] if k + 1 != nn else 0.0
                x = abs(p) + abs(q) + abs(r)
                if x != 0.0:
                    p /= x
                    q /= x
                    r /= x
            s = np.copysign(np.sqrt(p * p + q * q + r * r), p)
            if s == 0.0:
                continue
            if k == m:
                if l != m:
                    a[k, k - 1] = -a[k, k - 1]
            else:
                a[k, k - 1] = -s * x
            p += s
            x = p / s
            y = q / s
            z = r / s
            q /= p
            r /= p
            # row transformation on columns k..nn
            if k + 1 != nn:
                pr = a[k, k : nn + 1] + q * a[k + 1, k : nn + 1] + r * a[k + 2, k : nn + 1]
                a[k + 2, k : nn + 1] -= pr * z
            else:
                pr = a[k, k : nn + 1] + q * a[k + 1, k : nn + 1]
            a[k + 1, k : nn + 1] -= pr * y
            a[k, k : nn + 1] -= pr * x
            # column transformation on rows l..min(nn, k+3)
            mmin = min(nn, k + 3)
            if k + 1 != nn:
                pc = x * a[l : mmin + 1, k] + y * a[l : mmin + 1, k + 1] + z * a[l : mmin + 1, k + 2]
                a[l : mmin + 1, k + 2] -= pc * r
            else:
                pc = x * a[l : mmin + 1, k] + y * a[l : mmin + 1, k + 1]
            a[l : mmin + 1, k + 1] -= pc * q
            a[l : mmin + 1, k] -= pc
    return wr + 1j * wi


def eigvals(A, balance=True):
    """All eigenvalues of a real square matrix, sorted by descending modulus."""
    A = _as_matrix(A)
    n, m = A.shape
    if n != m:
        raise DimensionError(f"eigenvalues need a square matrix, got {A.shape}")
    if n == 0:
        return np.zeros(0, dtype=complex)
    H = A.copy()
    if balance:
        _balance(H)
    H = hessenberg(H)
    lam = _hqr(H)
    return sort_by_modulus(lam)


def sort_by_modulus(lam):
    lam = np.asarray(lam, dtype=complex)
    order = np.lexsort((-lam.imag, -lam.real, -np.round(np.abs(lam), 12)))
    return lam[order]


def eigvecs(A, lam, iters=3):
    """Right eigenvectors for the given eigenvalues by shifted inverse iteration.

    Columns are unit 2-norm. For repeated eigenvalues the returned vectors need
    not be linearly independent.
    """
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    scale = max(np.abs(A).max(), 1.0)
    rng = np.random.default_rng(0)
    start = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    V = np.zeros((n, len(lam)), dtype=complex)
    I = np.eye(n)
    for j, mu in enumerate(lam):
        shift = mu + 1e3 * _EPS * scale * (1 + 1j)
        M = A - shift * I
        v = start / np.linalg.norm(start)
        for _ in range(iters):
            try:
                v = np.linalg.solve(M, v)
            except np.linalg.LinAlgError:
                shift = shift + 1e6 * _EPS * scale
                M = A - shift * I
                v = np.linalg.solve(M, v)
            v /= np.linalg.norm(v)
        V[:, j] = v
    return V


__all__ = ["eigvals", "eigvecs", "hessenberg", "pinv", "pinv_vjp", "sort_by_modulus", "svd"]
