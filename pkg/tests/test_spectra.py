import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from oracles import jacobi_eigvalsh
from topoent.errors import ClassificationError, StructureError
from topoent.model import ChainSpec, CompositeSpec, DisorderSpec, ordered_composite, sample_composite
from topoent.spectra import (
    EdgeSymmetry,
    diagonalize_composite,
    edge_mode_profiles,
    eigh,
    fit_exponential,
    mid_gap_splitting,
    splitting_scan,
    ssh_spectrum,
)

finite = st.floats(-5, 5, allow_nan=False, allow_infinity=False)


def _sym(a):
    return (a + a.T) / 2


@given(arrays(float, (9, 9), elements=finite))
@settings(max_examples=40, deadline=None)
def test_eigh_matches_jacobi(a):
    h = _sym(a)
    es = eigh(h)
    scale = max(1.0, np.linalg.norm(h))
    assert np.max(np.abs(es.energies - jacobi_eigvalsh(h))) < 1e-10 * scale


@given(arrays(float, (12, 12), elements=finite))
@settings(max_examples=40, deadline=None)
def test_residual_and_orthonormality(a):
    h = _sym(a)
    es = eigh(h)
    scale = max(1.0, np.linalg.norm(h))
    assert np.max(np.abs(h @ es.states - es.states * es.energies)) < 1e-10 * scale
    assert np.max(np.abs(es.states.T @ es.states - np.eye(12))) < 1e-10
    assert np.all(np.diff(es.energies) >= 0)


def test_sign_convention():
    rng = np.random.default_rng(0)
    es = eigh(_sym(rng.normal(size=(10, 10))))
    for k in range(10):
        col = es.states[:, k]
        assert col[np.argmax(np.abs(col))] > 0


def test_rejects_bad_input():
    with pytest.raises(StructureError):
        eigh(np.ones((3, 4)))
    with pytest.raises(StructureError):
        eigh(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_one_based_indexing():
    es = eigh(np.diag([3.0, 1.0, 2.0]))
    assert es.energy(1) == 1.0 and es.energy(3) == 3.0
    assert np.array_equal(es.state(1), [0, 1, 0])
    with pytest.raises(IndexError):
        es.energy(0)
    with pytest.raises(IndexError):
        es.state(4)


def test_degenerate_clusters_resolved_by_mirror():
    from topoent.model import mirror_operator

    ham = ordered_composite(CompositeSpec.symmetric(0.1, 1.0))
    es = diagonalize_composite(ham)
    p = mirror_operator((8, 8))
    parity = np.einsum("ik,ij,jk->k", es.states, p, es.states)
    # every column is a mirror eigenvector
    assert np.allclose(np.abs(parity), 1.0, atol=1e-10)
    tol = 1e-12 * np.linalg.norm(ham.matrix)
    start = 0
    for k in range(1, 129):
        if k == 128 or es.energies[k] - es.energies[k - 1] >= tol:
            assert np.all(np.diff(parity[start:k]) <= 1e-10)  # even before odd
            start = k


def test_cluster_subspaces_independent_of_basis_order():
    from topoent.model import mirror_operator

    h = ordered_composite(CompositeSpec.symmetric(0.1, 1.0)).matrix
    a = diagonalize_composite(ordered_composite(CompositeSpec.symmetric(0.1, 1.0)))
    perm = np.random.default_rng(1).permutation(128)
    inv = np.argsort(perm)
    p = mirror_operator((8, 8))
    b = eigh(h[np.ix_(perm, perm)], symmetry=p[np.ix_(perm, perm)])
    assert np.max(np.abs(a.energies - b.energies)) < 1e-12
    bs = b.states[inv]
    tol = 1e-12 * np.linalg.norm(h)
    start = 0
    for k in range(1, 129):
        if k == 128 or a.energies[k] - a.energies[k - 1] >= tol:
            pa = a.states[:, start:k] @ a.states[:, start:k].T
            pb = bs[:, start:k] @ bs[:, start:k].T
            assert np.max(np.abs(pa - pb)) < 1e-9
            start = k


def test_reruns_bit_identical():
    ham, _, _ = sample_composite(CompositeSpec.symmetric(0.1, 1.0), DisorderSpec(0.01), 4, 2)
    a = diagonalize_composite(ham)
    b = diagonalize_composite(ham)
    assert np.array_equal(a.energies, b.energies) and np.array_equal(a.states, b.states)


@given(st.floats(0.01, 2.0), st.floats(0.01, 2.0), st.integers(2, 8), st.integers(0, 500))
@settings(max_examples=40, deadline=None)
def test_chiral_pairing(v, w, cells, seed):
    spec = ChainSpec(cells, v, w)
    e = ssh_spectrum(spec)
    assert np.max(np.abs(e + e[::-1])) < 1e-11
    cspec = CompositeSpec(ChainSpec(cells, v, w), ChainSpec(cells, v, w), 0.0, 0.0)
    ham, _, _ = sample_composite(cspec, DisorderSpec(0.3), seed, 0)
    e = diagonalize_composite(ham).energies
    assert np.max(np.abs(e + e[::-1])) < 1e-11


def test_edge_modes_topological():
    spec = ChainSpec(4, 0.1, 1.0)
    sym, anti = edge_mode_profiles(spec)
    assert sym.symmetry_label is EdgeSymmetry.SYMMETRIC
    assert anti.symmetry_label is EdgeSymmetry.ANTISYMMETRIC
    for prof in (sym, anti):
        weight = prof.site_amplitudes ** 2
        assert weight[0] + weight[-1] > 0.98
    assert abs(sym.energy) == pytest.approx(abs(anti.energy), rel=1e-9)


def test_edge_modes_fully_dimerized():
    sym, anti = edge_mode_profiles(ChainSpec(4, 0.0, 1.0))
    assert sym.energy == 0 and anti.energy == 0
    assert np.allclose(np.abs(sym.site_amplitudes[[0, -1]]), 2**-0.5)


def test_trivial_chain_has_no_midgap_pair():
    with pytest.raises(ClassificationError):
        edge_mode_profiles(ChainSpec(4, 1.0, 0.1))


def test_splitting_zero_when_v_zero():
    assert mid_gap_splitting(ChainSpec(8, 0.0, 1.0)) == 0.0


def test_splitting_grows_with_ratio():
    splits, fit = splitting_scan(16, [0.1, 0.2, 0.3, 0.4, 0.5, 0.6])
    assert np.all(np.diff(splits) > 0)
    assert fit.rate > 0
    with pytest.raises(StructureError):
        splitting_scan(15, [0.1])


def test_fit_recovers_exponential():
    x = np.linspace(0, 1, 7)
    fit = fit_exponential(x, 2.0 * np.exp(3.0 * x))
    assert fit.prefactor == pytest.approx(2.0)
    assert fit.rate == pytest.approx(3.0)
    assert fit.r_squared == pytest.approx(1.0)
