"""SSH chains, hopping disorder and the two-chain + qubit Hamiltonian.

Basis conventions
-----------------
A chain with ``N`` unit cells has ``S = 2N`` sites ordered
``(1,A), (1,B), (2,A), ..., (N,B)``. The composite space is
``chain1 (x) qubit (x) chain2`` with the qubit ordered ``|e>, |g>``; the
0-based composite index of ``(i, q, j)`` is ``i * 2*S2 + q * S2 + j``.
"""
from __future__ import annotations

import enum
import functools
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, StructureError

MAX_DIMENSION = 4096

#: qubit labels in basis order
QUBIT_LABELS = ("e", "g")
SIGMA_Z = np.diag([1.0, -1.0])


@dataclass(frozen=True)
class ChainSpec:
    """Nominal parameters of one open SSH chain."""

    unit_cells: int = 4
    v: float = 0.1
    w: float = 1.0

    def __post_init__(self):
        if int(self.unit_cells) != self.unit_cells or self.unit_cells < 2:
            raise DomainError(f"unit_cells must be an integer >= 2, got {self.unit_cells!r}")
        if not (np.isfinite(self.v) and np.isfinite(self.w)) or self.v < 0 or self.w < 0:
            raise DomainError(f"hoppings must be finite and non-negative, got v={self.v}, w={self.w}")

    @property
    def sites(self) -> int:
        return 2 * self.unit_cells

    @property
    def ratio(self) -> float:
        return self.v / self.w if self.w > 0 else float("inf")


class DisorderMode(str, enum.Enum):
    RELATIVE = "relative"
    ABSOLUTE = "absolute"


@dataclass(frozen=True)
class DisorderSpec:
    """Uniform bond disorder of total width ``delta``.

    In relative mode a bond with nominal value ``x`` is drawn from
    ``[x(1 - delta/2), x(1 + delta/2)]``; in absolute mode from
    ``[x - delta/2, x + delta/2]``.
    """

    delta: float = 0.0
    mode: DisorderMode = DisorderMode.RELATIVE

    def __post_init__(self):
        if not np.isfinite(self.delta) or self.delta < 0:
            raise DomainError(f"delta must be finite and non-negative, got {self.delta!r}")
        object.__setattr__(self, "mode", DisorderMode(self.mode))

    def interval(self, x: float) -> tuple[float, float]:
        if self.mode is DisorderMode.RELATIVE:
            return x * (1.0 - self.delta / 2), x * (1.0 + self.delta / 2)
        return x - self.delta / 2, x + self.delta / 2


@dataclass(frozen=True, eq=False)
class DisorderRealization:
    """Concrete per-bond hoppings of one open chain."""

    v_bonds: np.ndarray
    w_bonds: np.ndarray

    def __post_init__(self):
        v = np.array(self.v_bonds, dtype=float)
        w = np.array(self.w_bonds, dtype=float)
        if v.ndim != 1 or w.ndim != 1 or len(w) != len(v) - 1:
            raise StructureError(
                f"need N intra-cell and N-1 inter-cell bonds, got {v.shape} and {w.shape}"
            )
        v.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "v_bonds", v)
        object.__setattr__(self, "w_bonds", w)

    @classmethod
    def ordered(cls, spec: ChainSpec) -> "DisorderRealization":
        n = spec.unit_cells
        return cls(np.full(n, float(spec.v)), np.full(n - 1, float(spec.w)))

    def matches(self, spec: ChainSpec) -> bool:
        return len(self.v_bonds) == spec.unit_cells

    def hoppings(self) -> np.ndarray:
        """Off-diagonal sequence v_1, w_1, v_2, ..., v_N."""
        off = np.empty(2 * len(self.v_bonds) - 1)
        off[0::2] = self.v_bonds
        off[1::2] = self.w_bonds
        return off

    def __eq__(self, other):
        if not isinstance(other, DisorderRealization):
            return NotImplemented
        return np.array_equal(self.v_bonds, other.v_bonds) and np.array_equal(
            self.w_bonds, other.w_bonds
        )

    __hash__ = None


@dataclass(frozen=True)
class CompositeSpec:
    """Two SSH chains dispersively coupled to one qubit.

    ``xi1`` shifts the last site of chain 1 and ``xi2`` the first site of
    chain 2, with the sign set by the qubit's sigma_z.
    """

    chain1: ChainSpec = field(default_factory=ChainSpec)
    chain2: ChainSpec = field(default_factory=ChainSpec)
    xi1: float = 1e-3
    xi2: float = 1e-3

    def __post_init__(self):
        if not (np.isfinite(self.xi1) and np.isfinite(self.xi2)):
            raise DomainError("dispersive shifts must be finite")

    @classmethod
    def symmetric(cls, v: float, w: float, xi: float = 1e-3, unit_cells: int = 4) -> "CompositeSpec":
        chain = ChainSpec(unit_cells, v, w)
        return cls(chain, chain, xi, xi)

    @property
    def dims(self) -> tuple[int, int]:
        return self.chain1.sites, self.chain2.sites

    @property
    def dimension(self) -> int:
        s1, s2 = self.dims
        return s1 * 2 * s2


@dataclass(frozen=True, eq=False)
class CompositeHamiltonian:
    matrix: np.ndarray
    dims: tuple[int, int]

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def index(self, i: int, q: int, j: int) -> int:
        return composite_index(i, q, j, self.dims[1])

    def block(self, q: int) -> np.ndarray:
        """The (S1*S2)-square block of fixed qubit state ``q`` (0 = e, 1 = g)."""
        s1, s2 = self.dims
        h = self.matrix.reshape(s1, 2, s2, s1, 2, s2)
        return h[:, q, :, :, q, :].reshape(s1 * s2, s1 * s2)


def composite_index(i: int, q: int, j: int, s2: int) -> int:
    return i * 2 * s2 + q * s2 + j


def build_ssh_matrix(spec: ChainSpec, real: DisorderRealization) -> np.ndarray:
    """Tridiagonal hopping matrix of an open chain (zero diagonal)."""
    if not real.matches(spec):
        raise StructureError(
            f"realization has {len(real.v_bonds)} cells, spec has {spec.unit_cells}"
        )
    off = real.hoppings()
    return np.diag(off, 1) + np.diag(off, -1)


def sample_disorder(spec: ChainSpec, dis: DisorderSpec, stream: np.random.Generator) -> DisorderRealization:
    """Draw every bond independently and uniformly from its disorder interval.

    The intra-cell bonds are drawn first, then the inter-cell bonds, so a
    given generator state always produces the same realization.
    """
    n = spec.unit_cells
    v_lo, v_hi = dis.interval(spec.v)
    w_lo, w_hi = dis.interval(spec.w)
    v = stream.uniform(v_lo, v_hi, size=n)
    w = stream.uniform(w_lo, w_hi, size=n - 1)
    return DisorderRealization(v, w)


def build_composite(
    cspec: CompositeSpec, real1: DisorderRealization, real2: DisorderRealization
) -> CompositeHamiltonian:
    s1, s2 = cspec.dims
    if s1 * 2 * s2 > MAX_DIMENSION:
        raise DomainError(f"composite dimension {s1 * 2 * s2} exceeds {MAX_DIMENSION}")
    h1 = build_ssh_matrix(cspec.chain1, real1)
    h2 = build_ssh_matrix(cspec.chain2, real2)

    p1 = np.zeros((s1, s1))
    p1[-1, -1] = 1.0
    p2 = np.zeros((s2, s2))
    p2[0, 0] = 1.0
    i1, i2, iq = np.eye(s1), np.eye(s2), np.eye(2)

    h = np.kron(np.kron(h1, iq), i2) + np.kron(np.kron(i1, iq), h2)
    h += cspec.xi1 * np.kron(np.kron(p1, SIGMA_Z), i2)
    h += cspec.xi2 * np.kron(np.kron(i1, SIGMA_Z), p2)
    return CompositeHamiltonian(h, (s1, s2))


def ordered_composite(cspec: CompositeSpec) -> CompositeHamiltonian:
    return build_composite(
        cspec,
        DisorderRealization.ordered(cspec.chain1),
        DisorderRealization.ordered(cspec.chain2),
    )


@functools.lru_cache(maxsize=8)
def mirror_operator(dims: tuple[int, int]) -> np.ndarray | None:
    """Permutation swapping the chains while reflecting each of them.

    Maps ``|i, q, j>`` to ``|S-1-j, q, S-1-i>``. It commutes with the
    composite Hamiltonian whenever chain 2 is the mirror image of chain 1
    and ``xi1 == xi2`` (in particular for identical ordered chains).
    Returns ``None`` when the chains have different lengths.
    """
    s1, s2 = dims
    if s1 != s2:
        return None
    s = s1
    d = s * 2 * s
    perm = np.zeros((d, d))
    for i in range(s):
        for q in range(2):
            for j in range(s):
                perm[composite_index(s - 1 - j, q, s - 1 - i, s), composite_index(i, q, j, s)] = 1.0
    perm.flags.writeable = False
    return perm


def chain_reflection(sites: int) -> np.ndarray:
    return np.eye(sites)[::-1].copy()


def dispersive_shift(g: float, detuning: float) -> float:
    """Qubit-state-dependent resonator shift g**2 / detuning."""
    if detuning == 0:
        raise DomainError("dispersive approximation needs a non-zero detuning")
    return g * g / detuning


def sample_streams(master_seed: int, delta: float, sample: int) -> tuple[np.random.Generator, np.random.Generator]:
    """Independent generators for the two chains of one ensemble sample.

    Streams are keyed on the bit pattern of ``delta`` rather than its
    position in a grid, so editing the grid never changes other draws.
    """
    bits = struct.unpack("<Q", struct.pack("<d", float(delta)))[0]
    seq = np.random.SeedSequence(
        entropy=int(master_seed) & (2**64 - 1),
        spawn_key=(bits >> 32, bits & 0xFFFFFFFF, int(sample)),
    )
    a, b = seq.spawn(2)
    return np.random.default_rng(a), np.random.default_rng(b)


def sample_composite(
    cspec: CompositeSpec, dis: DisorderSpec, master_seed: int, sample: int
) -> tuple[CompositeHamiltonian, DisorderRealization, DisorderRealization]:
    r1, r2 = sample_streams(master_seed, dis.delta, sample)
    real1 = sample_disorder(cspec.chain1, dis, r1)
    real2 = sample_disorder(cspec.chain2, dis, r2)
    return build_composite(cspec, real1, real2), real1, real2
