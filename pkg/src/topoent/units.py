"""Conversion of dimensionless energies to laboratory frequencies.

Energies of the model are measured in units of the inter-cell hopping w.
``w_hz`` is that hopping expressed as an ordinary frequency, so an energy
``E`` corresponds to ``E * w_hz`` hertz.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

#: window for v/w = 0.1 used when no other is given
DEFAULT_CENTER = 9.9e-4
DEFAULT_WIDTH = 1.08e-6


@dataclass(frozen=True)
class UnitsReport:
    e_g_split_hz: float
    window_width_hz: float
    linewidth_hz: float
    addressable: bool


def units_convert(
    w_hz: float,
    q_factor: float,
    f_res: float,
    center_e: float = DEFAULT_CENTER,
    center_g: float | None = None,
    width: float = DEFAULT_WIDTH,
) -> UnitsReport:
    """Scale window energies by ``w_hz`` and compare the e/g split with the resonator linewidth.

    ``q_factor`` may be ``math.inf`` (zero linewidth).
    """
    for name, val in (("w_hz", w_hz), ("q_factor", q_factor), ("f_res", f_res)):
        if not val > 0 or math.isnan(val):
            raise DomainError(f"{name} must be positive, got {val!r}")
    if center_g is None:
        center_g = -center_e
    split = abs(center_e - center_g) * w_hz
    linewidth = f_res / q_factor
    return UnitsReport(split, width * w_hz, linewidth, split > linewidth)
