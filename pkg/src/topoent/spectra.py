"""Dense symmetric eigendecomposition and SSH spectrum analysis."""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import curve_fit

from .errors import ClassificationError, NumericalError, StructureError
from .model import (
    ChainSpec,
    CompositeHamiltonian,
    DisorderRealization,
    build_ssh_matrix,
    chain_reflection,
    mirror_operator,
)

log = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-12
DEGENERACY_TOL = 1e-12
RESIDUAL_TOL = 1e-10
MIDGAP_SEPARATION = 3.0


@dataclass(frozen=True, eq=False)
class Eigensystem:
    """Ascending eigenvalues with eigenvectors stored as columns.

    Reporting uses 1-based eigenstate indices; ``state(73)`` is column 72.
    """

    energies: np.ndarray
    states: np.ndarray

    def __len__(self) -> int:
        return len(self.energies)

    def energy(self, index: int) -> float:
        return float(self.energies[self._col(index)])

    def state(self, index: int) -> np.ndarray:
        return self.states[:, self._col(index)]

    def _col(self, index: int) -> int:
        if not 1 <= index <= len(self):
            raise IndexError(f"eigenstate index {index} outside 1..{len(self)}")
        return index - 1


def _clusters(energies: np.ndarray, tol: float):
    start = 0
    for k in range(1, len(energies) + 1):
        if k == len(energies) or energies[k] - energies[k - 1] >= tol:
            yield start, k
            start = k


def _fix_signs(vecs: np.ndarray) -> None:
    # largest-magnitude component positive; argmax takes the first on ties
    idx = np.argmax(np.abs(vecs), axis=0)
    signs = np.sign(vecs[idx, np.arange(vecs.shape[1])])
    signs[signs == 0] = 1.0
    vecs *= signs


def _resolve_cluster(block: np.ndarray, symmetry: np.ndarray | None) -> np.ndarray:
    if symmetry is not None:
        m = block.T @ symmetry @ block
        sym_vals, rot = np.linalg.eigh((m + m.T) / 2)
        order = np.argsort(-sym_vals, kind="stable")
        block = block @ rot[:, order]
    q, r = np.linalg.qr(block)
    # QR fixes column order; undo the arbitrary sign of R's diagonal
    return q * np.sign(np.where(np.diag(r) == 0, 1.0, np.diag(r)))


def eigh(
    h: np.ndarray,
    symmetry: np.ndarray | None = None,
    degeneracy_tol: float = DEGENERACY_TOL,
) -> Eigensystem:
    """Full eigendecomposition of a real-symmetric matrix.

    Eigenvalues whose gap is below ``degeneracy_tol * ||H||_F`` form a
    degenerate cluster. Inside a cluster the basis is made deterministic:
    if ``symmetry`` (an orthogonal matrix commuting with ``H``) is given,
    the cluster is rotated onto its eigenvectors, ordered by decreasing
    symmetry eigenvalue; the columns are then re-orthonormalized in order.
    Every column finally has its largest-magnitude component made positive.

    Raises
    ------
    StructureError
        ``h`` is not square or not symmetric within 1e-12 entrywise.
    NumericalError
        The solver failed or a residual exceeds 1e-10 * ||H||_F.
    """
    h = np.asarray(h, dtype=float)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise StructureError(f"expected a square matrix, got shape {h.shape}")
    asym = np.max(np.abs(h - h.T)) if h.size else 0.0
    if asym > SYMMETRY_TOL:
        raise StructureError(f"matrix is not symmetric (max |H - H^T| = {asym:.3e})")
    h = (h + h.T) / 2
    try:
        energies, vecs = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"symmetric eigensolver did not converge: {exc}") from exc

    order = np.argsort(energies, kind="stable")
    energies = energies[order]
    vecs = np.array(vecs[:, order])

    norm = np.linalg.norm(h)
    for lo, hi in _clusters(energies, degeneracy_tol * norm):
        if hi - lo > 1:
            vecs[:, lo:hi] = _resolve_cluster(vecs[:, lo:hi], symmetry)
    _fix_signs(vecs)

    residual = np.linalg.norm(h @ vecs - vecs * energies, axis=0).max() if len(energies) else 0.0
    if residual > RESIDUAL_TOL * max(norm, 1.0):
        raise NumericalError(f"eigenpair residual {residual:.3e} exceeds tolerance (||H||_F = {norm:.3e})")
    energies.flags.writeable = False
    vecs.flags.writeable = False
    return Eigensystem(energies, vecs)


def diagonalize_composite(ham: CompositeHamiltonian) -> Eigensystem:
    """``eigh`` with degenerate clusters resolved by the chain-swap mirror symmetry."""
    return eigh(ham.matrix, symmetry=mirror_operator(ham.dims))


# --- single-chain analysis -------------------------------------------------


class EdgeSymmetry(str, enum.Enum):
    SYMMETRIC = "symmetric"
    ANTISYMMETRIC = "antisymmetric"


@dataclass(frozen=True, eq=False)
class EdgeModeProfile:
    site_amplitudes: np.ndarray
    symmetry_label: EdgeSymmetry
    energy: float


def _ordered_chain(spec: ChainSpec) -> np.ndarray:
    return build_ssh_matrix(spec, DisorderRealization.ordered(spec))


def ssh_spectrum(spec: ChainSpec) -> np.ndarray:
    """Sorted eigenvalues of the ordered open chain."""
    return eigh(_ordered_chain(spec)).energies


def _midgap_columns(energies: np.ndarray) -> tuple[int, int]:
    by_abs = np.argsort(np.abs(energies), kind="stable")
    lo, hi = sorted(by_abs[:2])
    split = energies[hi] - energies[lo]
    # distance from the pair to the nearest other level
    others = np.delete(energies, [lo, hi])
    gap = np.min(np.abs(others[:, None] - energies[[lo, hi]][None, :])) if len(others) else np.inf
    if gap < MIDGAP_SEPARATION * split or gap == 0:
        raise ClassificationError(
            f"no isolated mid-gap pair: splitting {split:.3e}, distance to bulk {gap:.3e}"
        )
    return lo, hi


def mid_gap_splitting(spec: ChainSpec) -> float:
    """Energy difference of the two levels closest to zero."""
    energies = ssh_spectrum(spec)
    lo, hi = _midgap_columns(energies)
    return float(energies[hi] - energies[lo])


def edge_mode_profiles(spec: ChainSpec) -> tuple[EdgeModeProfile, EdgeModeProfile]:
    """The two mid-gap eigenvectors, labelled by the relative sign of their end amplitudes.

    The ordered chain is mirror symmetric, so an exactly degenerate pair
    (``v = 0``) is resolved into reflection-even and -odd combinations.
    Returned as (symmetric, antisymmetric).
    """
    es = eigh(_ordered_chain(spec), symmetry=chain_reflection(spec.sites))
    lo, hi = _midgap_columns(es.energies)
    profiles = {}
    for col in (lo, hi):
        amp = es.states[:, col]
        label = EdgeSymmetry.SYMMETRIC if amp[0] * amp[-1] > 0 else EdgeSymmetry.ANTISYMMETRIC
        profiles[label] = EdgeModeProfile(amp, label, float(es.energies[col]))
    if len(profiles) != 2:
        raise ClassificationError("mid-gap pair does not split into symmetric and antisymmetric modes")
    return profiles[EdgeSymmetry.SYMMETRIC], profiles[EdgeSymmetry.ANTISYMMETRIC]


@dataclass(frozen=True)
class ExponentialFit:
    """``splitting ~ prefactor * exp(rate * v/w)``"""

    prefactor: float
    rate: float
    r_squared: float

    def __call__(self, ratio):
        return self.prefactor * np.exp(self.rate * np.asarray(ratio))


def fit_exponential(ratios, values) -> ExponentialFit:
    """Least-squares exponential fit; R^2 is evaluated on the linear scale.

    A straight-line fit of ``log(values)`` seeds the nonlinear solve.
    """
    x = np.asarray(ratios, dtype=float)
    y = np.asarray(values, dtype=float)
    if np.any(y <= 0):
        raise ClassificationError("exponential fit needs strictly positive values")
    slope, intercept = np.polyfit(x, np.log(y), 1)
    (c, a), _ = curve_fit(
        lambda t, c, a: c * np.exp(a * t), x, y, p0=(np.exp(intercept), slope), maxfev=20000
    )
    pred = c * np.exp(a * x)
    ss_res = np.sum((y - pred) ** 2)
    ss_tot = np.sum((y - y.mean()) ** 2)
    return ExponentialFit(float(c), float(a), float(1 - ss_res / ss_tot))


def splitting_scan(sites: int, ratios, w: float = 1.0) -> tuple[np.ndarray, ExponentialFit]:
    """Mid-gap splitting of an ordered ``sites``-site chain at each v/w, plus its fit."""
    if sites % 2:
        raise StructureError("an SSH chain has an even number of sites")
    splits = np.array([mid_gap_splitting(ChainSpec(sites // 2, r * w, w)) for r in ratios])
    return splits, fit_exponential(ratios, splits)
