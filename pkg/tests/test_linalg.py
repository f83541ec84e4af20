import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_matrix
from ringlattice.linalg import (Matrix, RankDeficientError, RingMatrix, Z_to_ring,
                               from_complex_rep, from_real_rep, gram_det, gso_pivot,
                               inverse, load_matrix, matrix_from_csv, matrix_from_json,
                               matrix_to_csv, matrix_to_json, orth_defect, pinv,
                               ring_coords_to_Z, ring_to_Z, save_matrix, to_complex, to_real,
                               volume, z_to_ring_coords)
from ringlattice.rings import O_H, OMEGA, RingId


def test_gso_identity():
    res = gso_pivot(Matrix.identity(3, "R"))
    for M in (res.Q, res.R, res.P):
        assert M.max_abs_diff(Matrix.identity(3, "R")) == 0


def test_gso_complex_orthogonal():
    G = Matrix.from_complex([[1, 0.9 + 0.1j], [0, 1]])
    q = gso_pivot(G).Q.complex()
    assert abs(np.vdot(q[:, 0], q[:, 1])) < 1e-9


@pytest.mark.parametrize("domain", ["R", "C", "H"])
def test_gso_reconstruction(domain):
    rng = np.random.default_rng(1)
    for _ in range(20):
        G = random_matrix(rng, 5, 4, domain)
        res = gso_pivot(G)
        assert (G @ res.P - res.Q @ res.R).fro() < 1e-9 * G.fro()
        R = res.R.data
        assert np.allclose(R[np.arange(4), np.arange(4), 0], 1)
        assert np.all(R[np.tril_indices(4, -1)] == 0)
        qn = res.Q.col_norms2()
        inner = np.sqrt(np.sum((res.Q.H @ res.Q).data ** 2, axis=2))
        np.fill_diagonal(inner, 0)
        assert np.all(inner <= 1e-9 * np.sqrt(np.outer(qn, qn)))
        assert math.isclose(np.prod(np.sqrt(qn)), volume(G), rel_tol=1e-8)


def test_gso_pivot_order():
    G = Matrix.from_real([[3, 0, 1], [0, 2, 0], [0, 0, 0.5]])
    res = gso_pivot(G)
    assert res.perm[0] == 2  # shortest column first


def test_rank_deficiency():
    G = Matrix.from_real([[1, 2], [2, 4]])
    with pytest.raises(RankDeficientError, match="rank_deficient at column"):
        gso_pivot(G)


def test_to_real_layout():
    assert np.array_equal(to_real(Matrix.from_complex([[1j]])).real(), [[0, -1], [1, 0]])
    assert np.array_equal(to_real(Matrix.identity(1, "H")).real(), np.eye(4))
    with pytest.raises(ValueError):
        to_real(Matrix.identity(2, "R"))


@given(st.integers(1, 4), st.integers(1, 4), st.integers(1, 4), st.integers(0, 2 ** 31))
def test_representation_homomorphism(n, m, k, seed):
    rng = np.random.default_rng(seed)
    U, V = random_matrix(rng, n, m, "H"), random_matrix(rng, m, k, "H")
    assert (to_real(U @ V) - to_real(U) @ to_real(V)).fro() < 1e-9 * (1 + U.fro() * V.fro())
    assert (to_complex(U @ V) - to_complex(U) @ to_complex(V)).fro() < 1e-9 * (
        1 + U.fro() * V.fro())
    assert (to_real(U.H) - to_real(U).H).fro() < 1e-12
    assert (to_complex(U.H) - to_complex(U).H).fro() < 1e-12
    assert (to_real(U + U) - to_real(U).scale(2)).fro() < 1e-12
    assert from_complex_rep(to_complex(U)).max_abs_diff(U) < 1e-12
    assert from_real_rep(to_real(U), "H").max_abs_diff(U) < 1e-12


def test_volume_relations():
    rng = np.random.default_rng(2)
    for _ in range(30):
        C = random_matrix(rng, 4, 3, "C")
        Cr = to_real(C).real()
        assert volume(C) ** 2 == pytest.approx(math.sqrt(np.linalg.det(Cr.T @ Cr)), rel=1e-9)
        M = random_matrix(rng, 3, 2, "H")
        Mr = to_real(M).real()
        assert volume(M) ** 8 == pytest.approx(np.linalg.det(Mr.T @ Mr), rel=1e-9)
    assert volume(Matrix.identity(4, "H")) == pytest.approx(1)


def test_orth_defect():
    assert orth_defect(Matrix.identity(3, "C")) == pytest.approx(1)
    assert orth_defect(Matrix.from_real([[1, 1], [0, 1]])) == pytest.approx(math.sqrt(2))
    q, _ = np.linalg.qr(np.random.default_rng(0).standard_normal((4, 4)) * (1 + 1j))
    assert orth_defect(Matrix.from_complex(q)) == pytest.approx(1)


def test_pinv_inverse():
    rng = np.random.default_rng(3)
    for dom in ("R", "C", "H"):
        G = random_matrix(rng, 5, 3, dom)
        assert (pinv(G) @ G).max_abs_diff(Matrix.identity(3, dom)) < 1e-10
        S = random_matrix(rng, 3, 3, dom)
        assert (inverse(S) @ S).max_abs_diff(Matrix.identity(3, dom)) < 1e-10
        assert gram_det(Matrix.identity(3, dom)) == pytest.approx(1)


def test_ring_to_Z_examples():
    E = ring_to_Z(Matrix.identity(1, "C"), RingId.E).real()
    assert np.allclose(E, [[1, -0.5], [0, math.sqrt(3) / 2]])
    assert np.array_equal(ring_to_Z(Matrix.identity(3, "C"), "G").real(), np.eye(6))
    rng = np.random.default_rng(4)
    for K in (1, 2, 3):
        G = random_matrix(rng, K, K, "H")
        assert volume(ring_to_Z(G, "H")) == pytest.approx(0.5 ** K * volume(G) ** 4, rel=1e-9)
        G = random_matrix(rng, K, K, "C")
        assert volume(ring_to_Z(G, "E")) == pytest.approx(
            (math.sqrt(3) / 2) ** K * volume(G) ** 2, rel=1e-9)


def test_Z_to_ring_examples():
    g = Z_to_ring(np.array([[1, 0], [0, 1]]), "G", 1)
    assert g[0, 0].isclose(Matrix.identity(1, "C")[0, 0]) and g[0, 1].c2 == 1
    assert Z_to_ring(np.array([[0], [1]]), "E", 1)[0, 0].isclose(OMEGA)
    assert Z_to_ring(np.array([[0], [0], [0], [1]]), "H", 1)[0, 0].isclose(O_H)
    with pytest.raises(ValueError):
        Z_to_ring(np.zeros((3, 1), dtype=int), "G", 2)


@pytest.mark.parametrize("ring", ["Z", "G", "E", "L", "H"])
def test_coordinate_round_trip(ring):
    r = RingId(ring)
    rng = np.random.default_rng(5)
    K = 3
    C = rng.integers(-9, 10, (r.props.D_r * K, 7))
    coords = z_to_ring_coords(C, r, K)
    assert np.array_equal(ring_coords_to_Z(coords, r), C)
    # values agree with the real-representation image of the Z coordinates
    G = Matrix.identity(K, r.domain)
    vals = RingMatrix(r, coords).to_matrix()
    img = ring_to_Z(G, r).real() @ C
    assert np.allclose(img, _stack(vals), atol=1e-12)


def _stack(M):
    # component blocks stacked vertically, the layout of the Z image
    D = M.domain.dim
    return np.concatenate([M.data[:, :, c] for c in range(D)], axis=0)


def test_ring_norms_preserved():
    rng = np.random.default_rng(6)
    G = random_matrix(rng, 3, 2, "H")
    T = RingMatrix("H", np.array([[[1, 1, 1, 1], [2, 0, 0, 0]], [[0, 0, 0, 0], [1, -1, 1, 1]]]))
    GT = G @ T.to_matrix()
    Gz = ring_to_Z(G, "H").real()
    C = ring_coords_to_Z(T.coords, "H")
    assert np.allclose(np.sum((Gz @ C) ** 2, axis=0), GT.col_norms2())


def test_ring_matrix_hermitian():
    T = RingMatrix("E", np.array([[[2, 1, 0, 0]]]))
    v = T.to_matrix()[0, 0]
    assert T.H.to_matrix()[0, 0].isclose(Matrix.from_complex([[complex(v.c1, -v.c2)]])[0, 0])


def test_file_round_trip(tmp_path):
    rng = np.random.default_rng(7)
    for dom in ("R", "C", "H"):
        M = Matrix(np.round(random_matrix(rng, 3, 2, dom).data * 10), dom)
        assert matrix_from_json(matrix_to_json(M)).max_abs_diff(M) == 0
        assert matrix_from_csv(matrix_to_csv(M)).max_abs_diff(M) == 0
        for ext in ("json", "csv"):
            p = str(tmp_path / f"m.{ext}")
            save_matrix(M, p)
            assert load_matrix(p).max_abs_diff(M) == 0
