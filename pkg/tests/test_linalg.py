import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kdla.errors import DimensionError, NumericalError
from kdla.linalg import eigvals, hessenberg, pinv, pinv_vjp, svd

from conftest import central_diff, random_matrix, rel_err


def penrose_residuals(A, P):
    return (
        np.linalg.norm(A @ P @ A - A),
        np.linalg.norm(P @ A @ P - P),
        np.linalg.norm((A @ P).T - A @ P),
        np.linalg.norm((P @ A).T - P @ A),
    )


@st.composite
def matrices(draw, max_dim=12):
    p = draw(st.integers(1, max_dim))
    q = draw(st.integers(1, max_dim))
    rank = draw(st.integers(0, min(p, q)))
    seed = draw(st.integers(0, 2**31 - 1))
    rng = np.random.default_rng(seed)
    if rank == 0:
        return np.zeros((p, q))
    return random_matrix(rng, p, q, rank)


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
def test_svd_reconstructs(rng, method):
    for p, q in [(7, 3), (3, 7), (5, 5), (1, 4)]:
        A = rng.standard_normal((p, q))
        U, s, Vt = svd(A, method)
        assert U.shape == (p, min(p, q)) and Vt.shape == (min(p, q), q)
        assert np.all(np.diff(s) <= 1e-12)
        np.testing.assert_allclose((U * s) @ Vt, A, atol=1e-12)
        np.testing.assert_allclose(s, np.linalg.svd(A, compute_uv=False), rtol=1e-11)


def test_jacobi_matches_lapack_pinv(rng):
    A = random_matrix(rng, 9, 14, rank=4)
    np.testing.assert_allclose(pinv(A, method="jacobi"), pinv(A), atol=1e-10)


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_penrose_conditions(A):
    P = pinv(A)
    assert P.shape == A.T.shape
    scale = max(1.0, np.linalg.norm(A)) * max(1.0, np.linalg.norm(P))
    for r in penrose_residuals(A, P):
        assert r < 1e-10 * scale


@settings(max_examples=30, deadline=None)
@given(matrices(max_dim=8))
def test_pinv_transpose_and_involution(A):
    P = pinv(A)
    np.testing.assert_allclose(pinv(A.T), P.T, atol=1e-9)
    np.testing.assert_allclose(pinv(P), A, atol=1e-8 * max(1, np.linalg.norm(A)) ** 3)


def test_pinv_small_examples():
    np.testing.assert_allclose(pinv(np.diag([2.0, 0.0])), np.diag([0.5, 0.0]))
    np.testing.assert_array_equal(pinv(np.zeros((2, 3))), np.zeros((3, 2)))
    np.testing.assert_allclose(pinv(np.array([[1.0, 1.0]])), [[0.5], [0.5]])


def test_pinv_rejects_bad_input():
    with pytest.raises(DimensionError):
        pinv(np.ones(3))
    with pytest.raises(NumericalError):
        pinv(np.array([[1.0, np.nan]]))


def _vjp_check(A, seed):
    r = np.random.default_rng(seed)
    G = r.standard_normal(A.T.shape)
    analytic = pinv_vjp(A, pinv(A), G)
    fd = central_diff(lambda B: float(np.sum(G * pinv(B))), A, h=1e-6)
    return rel_err(analytic, fd)


@pytest.mark.parametrize("shape", [(4, 9), (9, 4), (6, 6), (1, 5)])
def test_pinv_vjp_full_rank(rng, shape):
    A = rng.standard_normal(shape) + 0.5 * np.eye(*shape)
    assert _vjp_check(A, 7) < 1e-6


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 6), st.integers(2, 8), st.integers(0, 10_000))
def test_pinv_vjp_property(p, q, seed):
    r = np.random.default_rng(seed)
    # well-conditioned full-rank matrices keep the finite difference honest
    U, _ = np.linalg.qr(r.standard_normal((p, p)))
    V, _ = np.linalg.qr(r.standard_normal((q, q)))
    k = min(p, q)
    S = np.zeros((p, q))
    S[np.arange(k), np.arange(k)] = r.uniform(0.5, 2.0, k)
    assert _vjp_check(U @ S @ V.T, seed + 1) < 1e-6


def test_pinv_vjp_shape_checks(rng):
    A = rng.standard_normal((3, 5))
    with pytest.raises(DimensionError):
        pinv_vjp(A, pinv(A).T, np.ones((5, 3)))
    with pytest.raises(DimensionError):
        pinv_vjp(A, pinv(A), np.ones((3, 5)))


def test_hessenberg_is_similar(rng):
    A = rng.standard_normal((8, 8))
    H = hessenberg(A)
    assert np.allclose(np.tril(H, -2), 0)
    np.testing.assert_allclose(np.trace(H), np.trace(A), atol=1e-12)
    np.testing.assert_allclose(np.linalg.norm(H), np.linalg.norm(A), rtol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 20), st.integers(0, 10_000))
def test_eigvals_match_numpy(n, seed):
    A = np.random.default_rng(seed).standard_normal((n, n))
    ours = eigvals(A)
    ref = np.linalg.eigvals(A)
    assert len(ours) == n
    assert np.all(np.diff(np.abs(ours)) <= 1e-9)
    # every reference eigenvalue is close to one of ours
    d = np.abs(ours[:, None] - ref[None, :])
    assert d.min(axis=0).max() < 1e-8 * max(1, np.abs(ref).max())


def test_eigvals_rotation():
    th = 0.3
    R = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    lam = eigvals(R)
    np.testing.assert_allclose(np.abs(lam), 1.0, atol=1e-14)
    np.testing.assert_allclose(sorted(np.angle(lam)), [-th, th], atol=1e-14)
