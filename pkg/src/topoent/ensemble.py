"""Seeded Monte Carlo sweeps over hopping disorder.

Every sample is a pure function of ``(config, delta, sample index)``;
results are reduced in grid order, so reports do not depend on the
number of worker processes.
"""
from __future__ import annotations

import hashlib
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .entanglement import NULL_PROBABILITY, Outcome, fidelity, is_maximal, projected_negativities
from .errors import DerivationError, DomainError, NumericalError
from .model import CompositeSpec, DisorderMode, DisorderSpec, ordered_composite, sample_composite
from .spectra import DEGENERACY_TOL, Eigensystem, diagonalize_composite

log = logging.getLogger(__name__)

LOG_FLOOR = -16.0
CLUSTER_REL_TOL = 0.01
MID_SECTOR_LEVELS = 16


@dataclass(frozen=True)
class SweepConfig:
    delta_grid: tuple[float, ...]
    samples_per_delta: int = 100
    composite: CompositeSpec = field(default_factory=CompositeSpec)
    master_seed: int = 0
    disorder_mode: DisorderMode = DisorderMode.RELATIVE
    workers: int = 1

    def __post_init__(self):
        grid = tuple(float(d) for d in self.delta_grid)
        if not grid:
            raise DomainError("delta_grid is empty")
        if any(not math.isfinite(d) or d < 0 for d in grid):
            raise DomainError("delta_grid values must be finite and non-negative")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise DomainError("delta_grid must be strictly ascending")
        if int(self.samples_per_delta) != self.samples_per_delta or self.samples_per_delta < 1:
            raise DomainError("samples_per_delta must be a positive integer")
        if self.workers < 1:
            raise DomainError("workers must be >= 1")
        object.__setattr__(self, "delta_grid", grid)
        object.__setattr__(self, "disorder_mode", DisorderMode(self.disorder_mode))

    def as_dict(self) -> dict:
        """Everything that determines the results (worker count excluded)."""
        d = asdict(self)
        d.pop("workers")
        d["delta_grid"] = list(self.delta_grid)
        d["disorder_mode"] = self.disorder_mode.value
        return d

    def config_hash(self) -> str:
        blob = json.dumps(self.as_dict(), sort_keys=True, default=repr).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def disorder(self, delta: float) -> DisorderSpec:
        return DisorderSpec(delta, self.disorder_mode)


@dataclass(frozen=True)
class EnergyWindow:
    """Target energies for the two qubit outcomes and a common width."""

    center_e: float
    center_g: float
    width: float

    def __post_init__(self):
        if not (math.isfinite(self.center_e) and math.isfinite(self.center_g)):
            raise DomainError("window centers must be finite")
        if not math.isfinite(self.width) or self.width < 0:
            raise DomainError(f"window width must be finite and >= 0, got {self.width}")

    def center(self, outcome) -> float:
        return self.center_e if Outcome(outcome) is Outcome.E else self.center_g

    def contains(self, energies, outcome) -> np.ndarray:
        # open interval: a zero-width window is always empty
        return np.abs(np.asarray(energies) - self.center(outcome)) < self.width / 2


@dataclass
class EnsembleReport:
    """Raw per-sample rows ``(delta, sample, *values)`` plus provenance.

    Per-delta statistics are always recomputed from the rows.
    """

    experiment: str
    columns: tuple[str, ...]
    rows: list[tuple]
    master_seed: int
    config_hash: str
    metadata: dict = field(default_factory=dict)

    @property
    def header(self) -> tuple[str, ...]:
        return ("delta", "sample") + tuple(self.columns)

    @property
    def deltas(self) -> list[float]:
        seen = []
        for row in self.rows:
            if not seen or seen[-1] != row[0]:
                seen.append(row[0])
        return seen

    def column(self, name: str) -> np.ndarray:
        k = self.header.index(name)
        return np.array([row[k] for row in self.rows], dtype=float)

    def by_delta(self, name: str) -> dict[float, np.ndarray]:
        k = self.header.index(name)
        out: dict[float, list] = {}
        for row in self.rows:
            out.setdefault(row[0], []).append(row[k])
        return {d: np.array(v, dtype=float) for d, v in out.items()}

    def stats(self, name: str) -> dict[float, tuple[int, float, float]]:
        """Per-delta (count of finite values, mean, population std); nan when no values."""
        out = {}
        for d, vals in self.by_delta(name).items():
            vals = [float(x) for x in vals if math.isfinite(x)]
            n = len(vals)
            if n == 0:
                out[d] = (0, math.nan, math.nan)
                continue
            mean = math.fsum(vals) / n
            std = math.sqrt(math.fsum((x - mean) ** 2 for x in vals) / n)
            out[d] = (n, mean, std)
        return out

    def summary(self) -> list[dict]:
        per_col = {c: self.stats(c) for c in self.columns}
        rows = []
        for d in self.deltas:
            entry = {"delta": d}
            for c in self.columns:
                n, mean, std = per_col[c][d]
                entry[f"{c}_count"] = n
                entry[f"{c}_mean"] = mean
                entry[f"{c}_std"] = std
            rows.append(entry)
        return rows


# --- per-sample kernels ------------------------------------------------------
# Module-level so they can be shipped to worker processes.


def _eigensystem(cfg: SweepConfig, delta: float, sample: int) -> Eigensystem:
    ham, _, _ = sample_composite(cfg.composite, cfg.disorder(delta), cfg.master_seed, sample)
    try:
        return diagonalize_composite(ham)
    except NumericalError:
        log.error("sample failed: delta=%r sample=%d seed=%d", delta, sample, cfg.master_seed)
        raise


def _max_negativity(cfg, delta, sample, outcome):
    es = _eigensystem(cfg, delta, sample)
    _, negs = projected_negativities(es, outcome, cfg.composite.dims)
    live = negs[np.isfinite(negs)]
    return (float(live.max()) if len(live) else math.nan,)


def _track(cfg, delta, sample, args):
    index, outcome, ref_state, ref_energy = args
    es = _eigensystem(cfg, delta, sample)
    _, negs = projected_negativities(es, outcome, cfg.composite.dims)
    diff = abs(es.energy(index) - ref_energy)
    log_diff = max(math.log10(diff), LOG_FLOOR) if diff > 0 else LOG_FLOOR
    return (float(negs[index - 1]), fidelity(es.state(index), ref_state), log_diff)


def _target_energies(cfg, delta, sample, _):
    es = _eigensystem(cfg, delta, sample)
    out = []
    for outcome in Outcome:
        _, negs = projected_negativities(es, outcome, cfg.composite.dims)
        hits = [k for k, n in enumerate(negs) if math.isfinite(n) and is_maximal(n)]
        if hits:
            k = min(hits, key=lambda k: (abs(es.energies[k]), k))
            out.append(float(es.energies[k]))
        else:
            out.append(math.nan)
    return tuple(out)


def _window_members(es: Eigensystem, win: EnergyWindow, outcome, dims):
    q = Outcome(outcome).qubit_index
    s1, s2 = dims
    branches = es.states.reshape(s1, 2, s2, -1)[:, q, :, :]
    probs = np.einsum("ijk,ijk->k", branches, branches)
    return np.flatnonzero((probs >= NULL_PROBABILITY) & win.contains(es.energies, outcome))


def _window_negativity(cfg, delta, sample, win):
    es = _eigensystem(cfg, delta, sample)
    counts, pooled = [], []
    for outcome in Outcome:
        members = _window_members(es, win, outcome, cfg.composite.dims)
        counts.append(len(members))
        if len(members):
            sub = Eigensystem(es.energies[members], es.states[:, members])
            _, negs = projected_negativities(sub, outcome, cfg.composite.dims)
            pooled.extend(negs.tolist())
    mean = math.fsum(pooled) / len(pooled) if pooled else math.nan
    return (counts[0], counts[1], mean)


def _window_occupancy(cfg, delta, sample, win):
    es = _eigensystem(cfg, delta, sample)
    counts = [len(_window_members(es, win, o, cfg.composite.dims)) for o in Outcome]
    return (counts[0], counts[1], 1.0 if sum(counts) else 0.0)


def _uniqueness(cfg, delta, sample, _):
    es = _eigensystem(cfg, delta, sample)
    counts = []
    for outcome in Outcome:
        _, negs = projected_negativities(es, outcome, cfg.composite.dims)
        counts.append(sum(1 for n in negs if math.isfinite(n) and is_maximal(n)))
    return tuple(counts)


def _task(payload):
    kernel, cfg, delta, sample, args = payload
    return kernel(cfg, delta, sample, args)


def _run(cfg: SweepConfig, experiment: str, columns, kernel, args=None, metadata=None) -> EnsembleReport:
    tasks = [
        (kernel, cfg, delta, sample, args)
        for delta in cfg.delta_grid
        for sample in range(cfg.samples_per_delta)
    ]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_task, tasks, chunksize=max(1, len(tasks) // (4 * cfg.workers))))
    else:
        results = [_task(t) for t in tasks]
    rows = [(t[2], t[3]) + tuple(r) for t, r in zip(tasks, results)]
    return EnsembleReport(
        experiment, tuple(columns), rows, cfg.master_seed, cfg.config_hash(), dict(metadata or {})
    )


# --- public sweeps -----------------------------------------------------------


def max_negativity_sweep(cfg: SweepConfig, outcome="e") -> EnsembleReport:
    """Largest negativity over all eigenstates projected onto ``outcome``, per sample."""
    outcome = Outcome(outcome)
    return _run(cfg, "sweep", ("max_negativity",), _max_negativity, outcome, {"outcome": outcome.value})


def reference_eigensystem(cspec: CompositeSpec) -> Eigensystem:
    return diagonalize_composite(ordered_composite(cspec))


def track_eigenindex(cfg: SweepConfig, index: int, outcome="e") -> EnsembleReport:
    """Follow the ``index``-th (1-based) eigenstate across the disorder grid.

    Each row holds the negativity of the projected state (nan for a null
    projection), the fidelity with the ordered Hamiltonian's eigenstate of
    the same index, and log10 of the energy shift floored at -16.
    """
    outcome = Outcome(outcome)
    if not 1 <= index <= cfg.composite.dimension:
        raise DomainError(f"index {index} outside 1..{cfg.composite.dimension}")
    ref = reference_eigensystem(cfg.composite)
    args = (index, outcome, np.array(ref.state(index)), ref.energy(index))
    _, ref_negs = projected_negativities(ref, outcome, cfg.composite.dims)
    meta = {
        "index": index,
        "outcome": outcome.value,
        "reference_energy": ref.energy(index),
        "reference_negativity": float(ref_negs[index - 1]),
    }
    return _run(cfg, "track", ("negativity", "fidelity", "log10_energy_shift"), _track, args, meta)


def target_energy_report(cfg: SweepConfig) -> EnsembleReport:
    """Per sample and outcome: energy of the smallest-|E| state with N = 0.500 (nan if none)."""
    return _run(cfg, "target-energies", ("energy_e", "energy_g"), _target_energies)


def representative_energy(values, rel_tol: float = CLUSTER_REL_TOL) -> float:
    """Mean of the largest group of mutually close values.

    Values are sorted and grouped greedily: a value joins the current group
    while it lies within ``rel_tol`` (relative to the group's first value).
    Ties go to the group that contains the earliest input value.
    """
    vals = [(v, i) for i, v in enumerate(values) if math.isfinite(v)]
    if not vals:
        raise DerivationError("no finite values to choose a representative energy from")
    vals.sort()
    groups: list[list[tuple[float, int]]] = []
    for v, i in vals:
        if groups and abs(v - groups[-1][0][0]) <= rel_tol * abs(groups[-1][0][0]):
            groups[-1].append((v, i))
        else:
            groups.append([(v, i)])
    best = max(groups, key=lambda g: (len(g), -min(i for _, i in g)))
    return math.fsum(v for v, _ in best) / len(best)


def trial_width(cspec: CompositeSpec, levels: int = MID_SECTOR_LEVELS) -> float:
    """Smallest non-degenerate spacing among the central ``levels`` ordered eigenvalues."""
    ham = ordered_composite(cspec).matrix
    energies = np.linalg.eigvalsh(ham)
    mid = len(energies) // 2
    sector = energies[mid - levels // 2 : mid + levels // 2]
    gaps = np.diff(sector)
    gaps = gaps[gaps >= DEGENERACY_TOL * np.linalg.norm(ham)]
    if not len(gaps):
        raise DerivationError("central sector is fully degenerate")
    return float(gaps.min())


def derive_energy_window(cfg: SweepConfig, report: EnsembleReport | None = None) -> EnergyWindow:
    """Energy window targeting the N = 0.5 state for each qubit outcome.

    For every delta the smallest-|E| N = 0.500 energies are averaged over
    samples; the representative of those per-delta averages is the center.
    The width is the smallest level spacing in the central sector of the
    ordered spectrum. ``report`` may pass a precomputed
    ``target_energy_report``.
    """
    report = report if report is not None else target_energy_report(cfg)
    centers = []
    for col in ("energy_e", "energy_g"):
        per_delta = [mean for _, mean, _ in report.stats(col).values()]
        if not any(math.isfinite(m) for m in per_delta):
            raise DerivationError(f"no N = 0.500 state found for {col[-1]} in any sample")
        centers.append(representative_energy(per_delta))
    return EnergyWindow(centers[0], centers[1], trial_width(cfg.composite))


def window_mean_negativity(cfg: SweepConfig, win: EnergyWindow) -> EnsembleReport:
    """Negativities of all eigenstates inside the window, pooled over both outcomes.

    ``mean_negativity`` is nan for a sample whose windows are both empty,
    which keeps it out of the per-delta statistics.
    """
    return _run(
        cfg, "window-stats", ("count_e", "count_g", "mean_negativity"), _window_negativity, win, asdict(win)
    )


def window_nonempty_probability(cfg: SweepConfig, win: EnergyWindow) -> EnsembleReport:
    """Per sample: states in each outcome's window and whether either is occupied.

    The per-delta mean of ``nonempty`` is the non-empty probability.
    """
    return _run(cfg, "window-prob", ("count_e", "count_g", "nonempty"), _window_occupancy, win, asdict(win))


def uniqueness_check(cfg: SweepConfig) -> EnsembleReport:
    """Number of eigenstates with N = 0.500 for each outcome, per sample."""
    return _run(cfg, "uniqueness", ("count_e", "count_g"), _uniqueness)
