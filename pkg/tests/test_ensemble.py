import math

import numpy as np
import pytest

from oracles import schmidt_negativity
from topoent.ensemble import (
    EnergyWindow,
    SweepConfig,
    max_negativity_sweep,
    representative_energy,
    track_eigenindex,
    trial_width,
    uniqueness_check,
    window_mean_negativity,
    window_nonempty_probability,
)
from topoent.entanglement import project_qubit
from topoent.errors import DerivationError, DomainError
from topoent.model import CompositeSpec, DisorderSpec, sample_composite
from topoent.spectra import diagonalize_composite

TOPO = CompositeSpec.symmetric(0.1, 1.0)


def _cfg(grid=(0.0, 0.01), n=3, **kw):
    return SweepConfig(grid, n, TOPO, master_seed=kw.pop("seed", 17), **kw)


def test_config_validation():
    with pytest.raises(DomainError):
        SweepConfig((), 3)
    with pytest.raises(DomainError):
        SweepConfig((0.01, 0.0), 3)
    with pytest.raises(DomainError):
        SweepConfig((-0.1,), 3)
    with pytest.raises(DomainError):
        SweepConfig((0.0,), 0)
    assert _cfg().config_hash() == _cfg(workers=3).config_hash()
    assert _cfg().config_hash() != _cfg(seed=18).config_hash()


def test_sweep_bit_identical_and_worker_independent():
    a = max_negativity_sweep(_cfg())
    b = max_negativity_sweep(_cfg())
    c = max_negativity_sweep(_cfg(workers=2))
    assert a.rows == b.rows == c.rows
    assert a.config_hash == c.config_hash


def test_removing_a_delta_keeps_other_draws():
    full = max_negativity_sweep(_cfg((0.0, 0.005, 0.01), 2))
    part = max_negativity_sweep(_cfg((0.0, 0.01), 2))
    keep = [r for r in full.rows if r[0] != 0.005]
    assert keep == part.rows


def test_stats_recomputed_from_rows():
    rep = max_negativity_sweep(_cfg(n=4))
    for d, (n, mean, std) in rep.stats("max_negativity").items():
        vals = [r[2] for r in rep.rows if r[0] == d]
        assert n == 4
        assert mean == math.fsum(vals) / 4
        assert std == pytest.approx(np.std(vals), abs=1e-15)
    assert [e["delta"] for e in rep.summary()] == [0.0, 0.01]


def test_max_negativity_brute_force_crosscheck():
    cfg = _cfg((0.005,), 2)
    rep = max_negativity_sweep(cfg, "g")
    for delta, sample, got in rep.rows:
        ham, _, _ = sample_composite(TOPO, DisorderSpec(delta), cfg.master_seed, sample)
        es = diagonalize_composite(ham)
        best = 0.0
        for k in range(128):
            p = project_qubit(es.states[:, k], "g")
            if not p.empty:
                best = max(best, schmidt_negativity(p.state, (8, 8)))
        assert got == pytest.approx(best, abs=1e-9)


def test_ordered_topological_max_is_half():
    rep = max_negativity_sweep(_cfg((0.0,), 1))
    assert rep.rows[0][2] == pytest.approx(0.5, abs=1e-9)


def test_track_at_zero_delta_is_exact():
    rep = track_eigenindex(_cfg((0.0,), 2), 73)
    for _, _, neg, fid, logd in rep.rows:
        assert fid == pytest.approx(1.0, abs=1e-12)
        assert logd == -16.0
        assert neg == pytest.approx(rep.metadata["reference_negativity"], abs=1e-12)
    with pytest.raises(DomainError):
        track_eigenindex(_cfg((0.0,), 1), 129)


def test_representative_energy():
    assert representative_energy([1.0, 1.005, 0.5, 1.002]) == pytest.approx((1.0 + 1.002 + 1.005) / 3)
    assert representative_energy([2.0, float("nan")]) == 2.0
    # ties go to the group holding the earliest input
    assert representative_energy([3.0, 1.0]) == 3.0
    with pytest.raises(DerivationError):
        representative_energy([float("nan")])


def test_trial_width_positive_and_nondegenerate():
    w = trial_width(TOPO)
    assert 0 < w < 1e-3


def test_window_contains_is_open():
    win = EnergyWindow(1.0, -1.0, 0.5)
    assert list(win.contains([0.75, 0.875, 1.0, 1.25], "e")) == [False, True, True, False]
    assert list(win.contains([-1.0], "g")) == [True]
    assert not EnergyWindow(1.0, -1.0, 0.0).contains([1.0], "e")[0]
    with pytest.raises(DomainError):
        EnergyWindow(0.0, 0.0, -1.0)


def test_zero_width_window_never_occupied():
    rep = window_nonempty_probability(_cfg(), EnergyWindow(9.9e-4, -9.9e-4, 0.0))
    assert all(r[-1] == 0.0 for r in rep.rows)
    stats = window_mean_negativity(_cfg(), EnergyWindow(9.9e-4, -9.9e-4, 0.0))
    assert all(math.isnan(r[-1]) for r in stats.rows)


def test_wide_window_always_occupied():
    # H is block diagonal in the qubit, so each eigenstate lives in one outcome
    rep = window_nonempty_probability(_cfg(), EnergyWindow(0.0, 0.0, 100.0))
    assert all(r[2] == 64 and r[3] == 64 and r[4] == 1.0 for r in rep.rows)


def test_uniqueness_on_ordered_chain():
    # the ordered model carries many maximally entangled cross pairs
    rep = uniqueness_check(_cfg((0.0,), 1))
    assert rep.rows[0][2:] == (56, 56)
