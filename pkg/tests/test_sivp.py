import itertools
import json

import numpy as np
import pytest

import oracles
from conftest import random_matrix
from ringlattice.linalg import Matrix, RankDeficientError, gram_det, ring_to_Z
from ringlattice.rings import RingId
from ringlattice.sivp import (InsufficientRankError, list_sphere_decode, row_echelon, smp,
                              verify_minima_repetition)


def _cols(cand):
    return {tuple(c) for c in cand.C.T}


def test_sphere_decoder_unit_lattice():
    I2 = Matrix.identity(2, "R")
    c1 = list_sphere_decode(I2, 1.0)
    assert _cols(c1) == {(1, 0), (0, 1)} and c1.n_canonical == 2 and c1.N_c == 4
    c2 = list_sphere_decode(I2, 2.0)
    assert _cols(c2) == {(1, 0), (0, 1), (1, 1), (1, -1)}
    with pytest.raises(ValueError):
        list_sphere_decode(I2, 0.0)
    with pytest.raises(RankDeficientError):
        list_sphere_decode(Matrix.from_real([[1, 1], [1, 1]]), 1.0)


def test_sphere_decoder_complete():
    rng = np.random.default_rng(21)
    checked = 0
    while checked < 30:
        G = random_matrix(rng, 2, 2, "R")
        B = G.real()
        r2 = float(np.max(np.sum(B ** 2, axis=0)))
        # only instances whose ball provably fits inside the box
        if np.max(np.sqrt(r2) * np.linalg.norm(np.linalg.inv(B), axis=1)) > 10:
            continue
        checked += 1
        box = np.array([c for c in itertools.product(range(-10, 11), repeat=2) if any(c)])
        n2 = np.sum((box @ B.T) ** 2, axis=1)
        inside = box[n2 <= r2 * (1 + 1e-12)]
        canon = {tuple(c) if c[np.nonzero(c)[0][0]] > 0 else tuple(-c) for c in inside}
        assert _cols(list_sphere_decode(G, r2)) == canon


def test_row_echelon():
    assert row_echelon(Matrix.identity(3, "C")) == [0, 1, 2]
    C = Matrix.from_real([[1, 2, 0], [0, 0, 1]])
    assert row_echelon(C) == [0, 2]
    with pytest.raises(InsufficientRankError, match="insufficient rank"):
        row_echelon(Matrix.from_real([[1, 2], [0, 0]]))


def test_row_echelon_quaternion_rank():
    rng = np.random.default_rng(22)
    for _ in range(20):
        d = rng.integers(-2, 3, (3, 8, 4)).astype(float)
        d[:, 1] = 0.5 * d[:, 0]  # a dependent column early on
        C = Matrix(d, "H")
        try:
            idx = row_echelon(C)
        except InsufficientRankError:
            assert oracles.span_rank(list(np.transpose(d, (1, 0, 2))), "H") < 3
            continue
        sel = Matrix(d[:, idx], "H")
        assert gram_det(sel) > 0
        for pos in range(8):
            before = [i for i in idx if i < pos]
            vecs = [d[:, i] for i in before] + [d[:, pos]]
            if pos not in idx:
                assert oracles.span_rank(vecs, "H") == len(before)


@pytest.mark.parametrize("ring", ["Z", "G", "E", "L", "H"])
def test_smp_identity(ring):
    r = RingId(ring)
    res = smp(Matrix.identity(3, r.domain), r)
    assert np.allclose(res.minima, 1)
    assert np.allclose(np.abs(np.linalg.det(res.T.to_matrix().data[..., 0]))
                       if r.domain.dim == 1 else gram_det(res.T.to_matrix()), 1)


@pytest.mark.parametrize("ring,domain,K", [("G", "C", 2), ("E", "C", 2), ("G", "C", 3),
                                           ("H", "H", 2), ("L", "H", 2), ("Z", "R", 4)])
def test_smp_matches_brute_force(ring, domain, K):
    rng = np.random.default_rng(23)
    for _ in range(8):
        G = random_matrix(rng, K, K, domain)
        res = smp(G, ring)
        ref = oracles.successive_minima(G.data, ring)
        assert np.allclose(res.minima, ref, rtol=0, atol=1e-9)
        assert np.all(np.diff(res.minima) >= -1e-12)
        assert np.allclose(np.sqrt(res.G_tra.col_norms2()), res.minima)
        assert gram_det(res.T.to_matrix()) >= 1 - 1e-9


def test_repetition_examples():
    rng = np.random.default_rng(24)
    rep = verify_minima_repetition(random_matrix(rng, 2, 2, "C"), "G")
    assert rep.ok and len(rep.real_minima) == 4
    rep = verify_minima_repetition(random_matrix(rng, 1, 1, "H"), "H")
    assert rep.ok and np.allclose(rep.real_minima, rep.ring_minima[0])
    assert verify_minima_repetition(Matrix.identity(2, "H"), "L").ok


def test_smp_json():
    res = smp(Matrix.identity(2, "C"), "E")
    obj = json.loads(res.to_json())
    assert obj["ring"] == "E" and obj["minima"] == pytest.approx([1.0, 1.0], abs=1e-12)
    assert obj["N_c"] == res.N_c and len(obj["T"]) == 2


def test_smp_errors():
    with pytest.raises(ValueError):
        smp(Matrix.identity(2, "C"), "H")
    with pytest.raises(RankDeficientError):
        smp(Matrix.from_complex([[1, 1], [1, 1]]), "G")


def test_list_size_counts_both_signs():
    res = smp(Matrix.identity(2, "R"), "Z")
    # points of Z^2 with |x|^2 <= 1, origin excluded
    assert res.N_c == 4
    assert ring_to_Z(Matrix.identity(2, "R"), "Z").cols == 2
