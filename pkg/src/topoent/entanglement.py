"""Qubit projection, two-chain density matrices and negativity."""
from __future__ import annotations

import enum
import functools
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, StructureError
from .spectra import Eigensystem

NULL_PROBABILITY = 1e-12
NORM_TOL = 1e-10
TRACE_TOL = 1e-12
PSD_TOL = 1e-12


class Outcome(str, enum.Enum):
    """Result of a sigma_z measurement on the qubit."""

    E = "e"
    G = "g"

    @property
    def qubit_index(self) -> int:
        return 0 if self is Outcome.E else 1


@dataclass(frozen=True, eq=False)
class ProjectedState:
    """Two-chain state left after measuring the qubit.

    ``state`` is ``None`` when the outcome has probability below
    ``NULL_PROBABILITY``; check ``empty`` before using it.
    """

    outcome: Outcome
    probability: float
    state: np.ndarray | None
    dims: tuple[int, int]

    @property
    def empty(self) -> bool:
        return self.state is None


def project_qubit(state, outcome, dims: tuple[int, int] = (8, 8)) -> ProjectedState:
    outcome = Outcome(outcome)
    psi = np.asarray(state, dtype=float)
    s1, s2 = dims
    if psi.shape != (s1 * 2 * s2,):
        raise StructureError(f"state of shape {psi.shape} does not match dims {dims}")
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > NORM_TOL:
        raise DomainError(f"input state is not normalized (norm {norm:.12f})")
    branch = psi.reshape(s1, 2, s2)[:, outcome.qubit_index, :].reshape(-1)
    prob = float(branch @ branch)
    if prob < NULL_PROBABILITY:
        return ProjectedState(outcome, prob, None, dims)
    return ProjectedState(outcome, prob, branch / np.sqrt(prob), dims)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Unit-trace positive semidefinite matrix on the two-chain space."""

    rho: np.ndarray
    dims: tuple[int, int]

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=float)
        d = self.dims[0] * self.dims[1]
        if rho.shape != (d, d):
            raise StructureError(f"rho of shape {rho.shape} does not match dims {self.dims}")
        if abs(np.trace(rho) - 1.0) > TRACE_TOL:
            raise DomainError(f"trace is {np.trace(rho)!r}, expected 1")
        if np.max(np.abs(rho - rho.T)) > TRACE_TOL:
            raise StructureError("density matrix is not symmetric")
        if np.linalg.eigvalsh(rho)[0] < -PSD_TOL:
            raise DomainError("density matrix has a negative eigenvalue")
        object.__setattr__(self, "rho", rho)


def density_matrix(p: ProjectedState) -> DensityMatrix:
    if p.empty:
        raise DomainError(f"outcome {p.outcome.value} has null probability {p.probability:.3e}")
    return DensityMatrix(np.outer(p.state, p.state), p.dims)


def _unwrap(rho, dims):
    if isinstance(rho, DensityMatrix):
        return rho.rho, rho.dims
    rho = np.asarray(rho, dtype=float)
    if dims is None:
        s = int(round(np.sqrt(rho.shape[0])))
        dims = (s, s)
    if rho.ndim != 2 or rho.shape != (dims[0] * dims[1],) * 2:
        raise StructureError(f"matrix of shape {rho.shape} does not match dims {dims}")
    return rho, dims


def partial_transpose(rho, side: str = "B", dims: tuple[int, int] | None = None) -> np.ndarray:
    """Transpose the indices of one subsystem: ((i,k),(j,l)) -> ((i,l),(j,k)) for B."""
    mat, (s1, s2) = _unwrap(rho, dims)
    t = mat.reshape(s1, s2, s1, s2)
    if side == "B":
        t = t.transpose(0, 3, 2, 1)
    elif side == "A":
        t = t.transpose(2, 1, 0, 3)
    else:
        raise StructureError(f"side must be 'A' or 'B', not {side!r}")
    return t.reshape(s1 * s2, s1 * s2)


def negativity_from_spectrum(eigenvalues) -> float:
    lam = np.asarray(eigenvalues)
    return float(np.sum(np.abs(lam) - lam) / 2)


def negativity(rho, dims: tuple[int, int] | None = None, side: str = "B") -> float:
    """Sum of |negative eigenvalues| of the partial transpose."""
    pt = partial_transpose(rho, side, dims)
    return negativity_from_spectrum(np.linalg.eigvalsh(pt))


def pure_state_negativity(state, dims: tuple[int, int]) -> float:
    """Closed form ((sum of Schmidt coefficients)^2 - 1) / 2 for a normalized pure state."""
    s = np.linalg.svd(np.asarray(state).reshape(dims), compute_uv=False)
    return float((s.sum() ** 2 - 1.0) / 2)


def fidelity(a, b) -> float:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise StructureError(f"state shapes differ: {a.shape} vs {b.shape}")
    return float(abs(np.vdot(a, b)) ** 2)


def is_maximal(n: float) -> bool:
    """N equal to 0.5 after rounding to three decimals."""
    return bool(np.round(n, 3) == 0.5)


def projected_negativities(es: Eigensystem, outcome, dims: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
    """Projection probabilities and negativities of every eigenstate for one outcome.

    Eigenstates with a null projection get ``nan``. The projected states
    are pure, so the negativity follows from their Schmidt coefficients,
    ((sum s)^2 - 1) / 2; this equals the partial-transpose route used by
    ``negativity`` and is much cheaper in sweeps.
    """
    outcome = Outcome(outcome)
    s1, s2 = dims
    branches = es.states.reshape(s1, 2, s2, -1)[:, outcome.qubit_index, :, :]
    probs = np.einsum("ijk,ijk->k", branches, branches)
    negs = np.full(len(probs), np.nan)
    live = np.flatnonzero(probs >= NULL_PROBABILITY)
    if len(live):
        psi = np.moveaxis(branches[:, :, live], -1, 0) / np.sqrt(probs[live])[:, None, None]
        sv = np.linalg.svd(psi, compute_uv=False)
        negs[live] = (sv.sum(axis=1) ** 2 - 1.0) / 2
    return probs, negs


# --- edge/bulk decomposition -----------------------------------------------


class ComponentClass(str, enum.Enum):
    EDGE_EDGE = "edge-edge"
    EDGE_BULK = "edge-bulk"
    BULK_EDGE = "bulk-edge"
    BULK_BULK = "bulk-bulk"


def _site_is_edge(sites: int) -> np.ndarray:
    edge = np.zeros(sites, dtype=bool)
    edge[[0, -1]] = True
    return edge


CLASS_ORDER = tuple(ComponentClass)


@functools.lru_cache(maxsize=8)
def entry_classes(dims: tuple[int, int]) -> np.ndarray:
    """Class code (position in ``CLASS_ORDER``) of every entry ((i,k),(j,l)).

    The chain-1 part |i><j| counts as edge when both i and j are edge
    sites (first or last site of the chain), likewise |k><l| for chain 2.
    The four classes therefore partition all entries.
    """
    s1, s2 = dims
    e1 = _site_is_edge(s1)
    e2 = _site_is_edge(s2)
    edge1 = (e1[:, None] & e1[None, :])[:, None, :, None]  # indexed (i, ., j, .)
    edge2 = (e2[:, None] & e2[None, :])[None, :, None, :]  # indexed (., k, ., l)
    # EDGE_EDGE=0, EDGE_BULK=1, BULK_EDGE=2, BULK_BULK=3
    codes = 2 * (~edge1).astype(np.int8) + (~edge2).astype(np.int8)
    codes = np.broadcast_to(codes, (s1, s2, s1, s2)).reshape(s1 * s2, s1 * s2).copy()
    codes.flags.writeable = False
    return codes


def component_mask(dims: tuple[int, int], cls) -> np.ndarray:
    """Boolean mask of the entries belonging to ``cls``."""
    return entry_classes(dims) == CLASS_ORDER.index(ComponentClass(cls))


def component_filter(rho, zero_class, dims: tuple[int, int] | None = None) -> np.ndarray:
    """Copy of ``rho`` with the entries of one class set to zero.

    The result is not renormalized, so it is generally not a state; its
    negativity is evaluated as-is.
    """
    mat, dims = _unwrap(rho, dims)
    out = mat.copy()
    out[component_mask(dims, zero_class)] = 0.0
    return out
