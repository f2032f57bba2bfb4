"""Command-line entry point: ``topoent <experiment> [--config FILE] [key=value ...]``."""
from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

import numpy as np

from .config import EXPERIMENTS, FORMATS, RunConfig, parse_config, parse_override
from .entanglement import (
    ComponentClass,
    Outcome,
    component_filter,
    density_matrix,
    component_mask,
    is_maximal,
    negativity,
    project_qubit,
    projected_negativities,
)
from .ensemble import (
    EnergyWindow,
    SweepConfig,
    derive_energy_window,
    max_negativity_sweep,
    target_energy_report,
    track_eigenindex,
    window_mean_negativity,
    window_nonempty_probability,
)
from .errors import ClassificationError, DerivationError, NumericalError, TopoentError
from .model import ChainSpec, CompositeSpec, DisorderSpec, sample_composite
from .output import Table, emit_report, preflight
from .spectra import diagonalize_composite, edge_mode_profiles, mid_gap_splitting, splitting_scan, ssh_spectrum
from .units import units_convert

log = logging.getLogger("topoent")

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2


def composite_spec(cfg: RunConfig) -> CompositeSpec:
    p = cfg.parameters
    chain1 = ChainSpec(p["unit_cells"], p["v"], p["w"])
    chain2 = ChainSpec(
        p["unit_cells2"] if p["unit_cells2"] is not None else p["unit_cells"],
        p["v2"] if p["v2"] is not None else p["v"],
        p["w2"] if p["w2"] is not None else p["w"],
    )
    return CompositeSpec(chain1, chain2, p["xi1"], p["xi2"])


def sweep_config(cfg: RunConfig) -> SweepConfig:
    p = cfg.parameters
    return SweepConfig(
        tuple(p["delta_grid"]), p["samples"], composite_spec(cfg), cfg.seed, p["disorder_mode"], p["workers"]
    )


def _single(cfg: RunConfig):
    p = cfg.parameters
    cspec = composite_spec(cfg)
    ham, _, _ = sample_composite(cspec, DisorderSpec(p["delta"], p["disorder_mode"]), cfg.seed, p["sample"])
    return cspec, diagonalize_composite(ham)


def _pick_state(es, cspec, cfg) -> int:
    """1-based index: the configured one, else the most entangled, most edge-localized state."""
    if cfg["index"] is not None:
        if cfg["index"] > len(es):
            raise ClassificationError(f"index {cfg['index']} exceeds dimension {len(es)}")
        return cfg["index"]
    _, negs = projected_negativities(es, cfg["outcome"], cspec.dims)
    if not np.any(np.isfinite(negs)):
        raise ClassificationError(f"no eigenstate survives projection onto {cfg['outcome']}")
    edge = np.diag(component_mask(cspec.dims, ComponentClass.EDGE_EDGE))
    s1, s2 = cspec.dims
    q = Outcome(cfg["outcome"]).qubit_index
    branch = es.states.reshape(s1, 2, s2, -1)[:, q, :, :].reshape(s1 * s2, -1)
    edge_weight = np.sum(branch[edge] ** 2, axis=0)
    best = max(
        (k for k in range(len(negs)) if math.isfinite(negs[k])),
        key=lambda k: (round(negs[k], 3), edge_weight[k], -k),
    )
    return best + 1


def _window(cfg: RunConfig, scfg: SweepConfig) -> EnergyWindow:
    p = cfg.parameters
    if p["center_e"] is not None and p["width"] is not None:
        center_g = p["center_g"] if p["center_g"] is not None else -p["center_e"]
        return EnergyWindow(p["center_e"], center_g, p["width"])
    log.info("no window configured; deriving one from the sweep")
    return derive_energy_window(scfg)


def run_spectrum(cfg):
    if cfg["system"] == "ssh":
        spec = composite_spec(cfg).chain1
        energies = ssh_spectrum(spec)
        summary = {"system": "ssh", "sites": spec.sites}
        try:
            summary["mid_gap_splitting"] = mid_gap_splitting(spec)
        except ClassificationError as exc:
            summary["mid_gap_splitting"] = None
            summary["note"] = str(exc)
        return Table(("index", "energy"), [(k + 1, e) for k, e in enumerate(energies)]), summary
    cspec, es = _single(cfg)
    pe, ne = projected_negativities(es, "e", cspec.dims)
    pg, ng = projected_negativities(es, "g", cspec.dims)
    rows = [(k + 1, es.energies[k], pe[k], pg[k], ne[k], ng[k]) for k in range(len(es))]
    maximal = {o: [k + 1 for k, n in enumerate(negs) if math.isfinite(n) and is_maximal(n)] for o, negs in (("e", ne), ("g", ng))}
    header = ("index", "energy", "prob_e", "prob_g", "negativity_e", "negativity_g")
    return Table(header, rows), {"system": "composite", "maximal_indices": maximal}


def run_edge_modes(cfg):
    spec = composite_spec(cfg).chain1
    sym, anti = edge_mode_profiles(spec)
    rows = [(n + 1, sym.site_amplitudes[n], anti.site_amplitudes[n]) for n in range(spec.sites)]
    splits, fit = splitting_scan(cfg["sites"], cfg["ratios"])
    summary = {
        "energies": {"symmetric": sym.energy, "antisymmetric": anti.energy},
        "mid_gap_splitting": mid_gap_splitting(spec),
        "scan": {"sites": cfg["sites"], "ratios": cfg["ratios"], "splittings": splits.tolist()},
        "fit": {"prefactor": fit.prefactor, "rate": fit.rate, "r_squared": fit.r_squared},
    }
    return Table(("site", "symmetric", "antisymmetric"), rows), summary


def _chosen_density(cfg):
    cspec, es = _single(cfg)
    index = _pick_state(es, cspec, cfg)
    proj = project_qubit(es.state(index), cfg["outcome"], cspec.dims)
    rho = density_matrix(proj)
    info = {
        "index": index,
        "energy": es.energy(index),
        "outcome": cfg["outcome"],
        "probability": proj.probability,
        "negativity": negativity(rho),
    }
    return rho, info


def run_density(cfg):
    return _chosen_density(cfg)


def run_components(cfg):
    rho, info = _chosen_density(cfg)
    rows = [("none", float(np.trace(rho.rho)), info["negativity"])]
    for cls in ComponentClass:
        filtered = component_filter(rho, cls)
        rows.append((cls.value, float(np.trace(filtered)), negativity(filtered, rho.dims)))
    return Table(("zeroed_class", "trace", "negativity"), rows), info


def run_sweep(cfg):
    return max_negativity_sweep(sweep_config(cfg), cfg["outcome"]), {}


def run_track(cfg):
    index = cfg["index"] if cfg["index"] is not None else 73
    return track_eigenindex(sweep_config(cfg), index, cfg["outcome"]), {}


def run_derive_window(cfg):
    scfg = sweep_config(cfg)
    report = target_energy_report(scfg)
    win = derive_energy_window(scfg, report)
    return report, {"window": {"center_e": win.center_e, "center_g": win.center_g, "width": win.width}}


def run_window_stats(cfg):
    scfg = sweep_config(cfg)
    return window_mean_negativity(scfg, _window(cfg, scfg)), {}


def run_window_prob(cfg):
    scfg = sweep_config(cfg)
    return window_nonempty_probability(scfg, _window(cfg, scfg)), {}


def run_units(cfg):
    p = cfg.parameters
    center_e = p["center_e"] if p["center_e"] is not None else 9.9e-4
    width = p["width"] if p["width"] is not None else 1.08e-6
    r = units_convert(p["w_hz"], p["q_factor"], p["f_res"], center_e, p["center_g"], width)
    header = ("e_g_split_hz", "window_width_hz", "linewidth_hz", "addressable")
    return Table(header, [(r.e_g_split_hz, r.window_width_hz, r.linewidth_hz, r.addressable)]), {}


RUNNERS = {
    "spectrum": run_spectrum,
    "edge-modes": run_edge_modes,
    "density": run_density,
    "sweep": run_sweep,
    "track": run_track,
    "derive-window": run_derive_window,
    "window-stats": run_window_stats,
    "window-prob": run_window_prob,
    "components": run_components,
    "units": run_units,
}
assert set(RUNNERS) == set(EXPERIMENTS)


def run(cfg: RunConfig) -> list[Path]:
    preflight(cfg.output)
    result, summary = RUNNERS[cfg.experiment](cfg)
    return emit_report(result, cfg, summary)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="topoent", description=__doc__)
    ap.add_argument("experiment", choices=EXPERIMENTS)
    ap.add_argument("--config", type=Path, help="key = value configuration file")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--out", dest="output", help="output path prefix")
    ap.add_argument("--format", choices=FORMATS)
    ap.add_argument("-v", "--verbose", action="store_true")
    ap.add_argument("overrides", nargs="*", metavar="key=value")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        text = args.config.read_text(encoding="utf-8") if args.config else ""
        overrides = dict(parse_override(item) for item in args.overrides)
        overrides["experiment"] = args.experiment
        for key in ("seed", "output", "format"):
            if getattr(args, key) is not None:
                overrides[key] = getattr(args, key)
        cfg = parse_config(text, overrides, source=str(args.config or "<cli>"))
        paths = run(cfg)
    except (NumericalError, DerivationError, ClassificationError) as exc:
        log.error("%s", exc)
        return EXIT_NUMERICAL
    except (TopoentError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_INVALID
    for path in paths:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
