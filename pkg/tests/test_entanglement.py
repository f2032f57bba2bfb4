import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from oracles import loop_partial_transpose, schmidt_negativity
from topoent.entanglement import (
    ComponentClass,
    DensityMatrix,
    Outcome,
    component_filter,
    component_mask,
    density_matrix,
    fidelity,
    is_maximal,
    negativity,
    partial_transpose,
    project_qubit,
    projected_negativities,
    pure_state_negativity,
)
from topoent.errors import DomainError, StructureError
from topoent.model import CompositeSpec, DisorderSpec, ordered_composite, sample_composite
from topoent.spectra import diagonalize_composite

DIMS = (8, 8)


def _bell(i0, j0, i1, j1, sign=1.0):
    psi = np.zeros(64)
    psi[i0 * 8 + j0] = 1.0
    psi[i1 * 8 + j1] = sign
    return psi / np.linalg.norm(psi)


def _rho(psi):
    return np.outer(psi, psi)


def test_bell_pair_half():
    for sign in (1.0, -1.0):
        assert abs(negativity(_rho(_bell(0, 0, 7, 7, sign)), DIMS) - 0.5) < 1e-12
    assert abs(negativity(_rho(_bell(2, 5, 4, 1)), DIMS) - 0.5) < 1e-12


def test_product_state_zero():
    a = np.random.default_rng(0).normal(size=8)
    b = np.random.default_rng(1).normal(size=8)
    psi = np.kron(a / np.linalg.norm(a), b / np.linalg.norm(b))
    assert abs(negativity(_rho(psi), DIMS)) < 1e-12


def test_maximally_entangled_8x8():
    psi = np.eye(8).ravel() / np.sqrt(8)
    assert negativity(_rho(psi), DIMS) == pytest.approx(3.5, abs=1e-12)


def test_partial_transpose_against_loops():
    rng = np.random.default_rng(5)
    m = rng.normal(size=(12, 12))
    rho = m @ m.T
    assert np.array_equal(partial_transpose(rho, "B", (3, 4)), loop_partial_transpose(rho, (3, 4)))
    with pytest.raises(StructureError):
        partial_transpose(rho, "C", (3, 4))
    with pytest.raises(StructureError):
        partial_transpose(rho, "B", (3, 3))


unit_vectors = arrays(float, 64, elements=st.floats(-1, 1, allow_nan=False)).filter(
    lambda x: np.linalg.norm(x) > 1e-3
)


@given(unit_vectors)
@settings(max_examples=60, deadline=None)
def test_side_invariance(x):
    rho = _rho(x / np.linalg.norm(x))
    assert abs(negativity(rho, DIMS, "A") - negativity(rho, DIMS, "B")) < 1e-10


def test_schmidt_oracle_1000_states():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(1000):
        psi = rng.normal(size=64)
        psi /= np.linalg.norm(psi)
        worst = max(worst, abs(negativity(_rho(psi), DIMS) - schmidt_negativity(psi, DIMS)))
    assert worst < 1e-9


def test_pure_state_closed_form():
    psi = _bell(1, 2, 3, 4)
    assert pure_state_negativity(psi, DIMS) == pytest.approx(0.5, abs=1e-14)


def test_projection_probabilities_sum_to_one():
    ham, _, _ = sample_composite(CompositeSpec.symmetric(0.1, 1.0), DisorderSpec(0.02), 3, 0)
    es = diagonalize_composite(ham)
    pe, _ = projected_negativities(es, "e", DIMS)
    pg, _ = projected_negativities(es, "g", DIMS)
    assert np.max(np.abs(pe + pg - 1)) < 1e-12
    for k in (1, 64, 128):
        a = project_qubit(es.state(k), Outcome.E)
        b = project_qubit(es.state(k), Outcome.G)
        assert abs(a.probability + b.probability - 1) < 1e-12


def test_batched_negativities_match_single_route():
    es = diagonalize_composite(ordered_composite(CompositeSpec.symmetric(0.1, 1.0)))
    for outcome in Outcome:
        probs, negs = projected_negativities(es, outcome, DIMS)
        for k in range(0, 128, 7):
            p = project_qubit(es.states[:, k], outcome)
            if p.empty:
                assert np.isnan(negs[k])
            else:
                assert negs[k] == pytest.approx(negativity(density_matrix(p)), abs=1e-10)
                assert probs[k] == pytest.approx(p.probability, abs=1e-14)


def test_null_projection():
    psi = np.zeros(128)
    psi[0] = 1.0  # |0, e, 0>
    p = project_qubit(psi, "g")
    assert p.empty and p.probability == 0
    with pytest.raises(DomainError):
        density_matrix(p)
    q = project_qubit(psi, "e")
    assert q.probability == 1.0 and negativity(density_matrix(q)) == pytest.approx(0, abs=1e-14)


def test_projection_validation():
    with pytest.raises(StructureError):
        project_qubit(np.ones(10) / np.sqrt(10), "e")
    with pytest.raises(DomainError):
        project_qubit(np.ones(128), "e")
    with pytest.raises(ValueError):
        project_qubit(np.eye(128)[0], "x")


def test_density_matrix_validation():
    with pytest.raises(DomainError):
        DensityMatrix(np.eye(64), DIMS)
    bad = np.zeros((64, 64))
    bad[0, 1] = 1.0
    bad[0, 0] = 1.0
    with pytest.raises(StructureError):
        DensityMatrix(bad, DIMS)
    neg = np.diag([1.5, -0.5] + [0.0] * 62)
    with pytest.raises(DomainError):
        DensityMatrix(neg, DIMS)


def test_fidelity():
    a = np.eye(4)[0]
    b = (np.eye(4)[0] + np.eye(4)[1]) / np.sqrt(2)
    assert fidelity(a, a) == 1.0
    assert fidelity(a, -a) == 1.0
    assert fidelity(a, b) == pytest.approx(0.5)
    with pytest.raises(StructureError):
        fidelity(a, np.ones(3))


def test_is_maximal_rounding():
    assert is_maximal(0.5) and is_maximal(0.5004) and is_maximal(0.4996)
    assert not is_maximal(0.4994) and not is_maximal(0.51)


def test_component_masks_partition():
    total = sum(component_mask(DIMS, c).astype(int) for c in ComponentClass)
    assert np.all(total == 1)
    ee = component_mask(DIMS, ComponentClass.EDGE_EDGE)
    corners = [0, 7, 56, 63]
    assert ee.sum() == 16
    assert all(ee[r, c] for r in corners for c in corners)
    assert component_mask(DIMS, "bulk-bulk")[9, 9]


@given(unit_vectors)
@settings(max_examples=30, deadline=None)
def test_filters_sum_back_to_rho(x):
    rho = _rho(x / np.linalg.norm(x))
    kept = sum(rho - component_filter(rho, c) for c in ComponentClass)
    assert np.array_equal(kept, rho) or np.max(np.abs(kept - rho)) < 1e-15


def test_zeroing_edge_edge_of_edge_bell_pair():
    rho = _rho(_bell(0, 0, 7, 7))
    filtered = component_filter(rho, ComponentClass.EDGE_EDGE)
    assert np.all(filtered == 0)
    assert np.array_equal(component_filter(rho, ComponentClass.BULK_BULK), rho)
