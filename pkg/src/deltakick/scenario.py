"""Scenario configs and the figure-data pipelines behind the command line.

A scenario is a YAML mapping; lengths are given in units of the initial
cloud width dx_i unless ``length_unit: natural``. Every run computes all of
its outputs in memory first and only then writes them, together with a
``manifest.yaml`` listing each file, so a failing run leaves nothing behind.
"""
from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .design import design, harmonic_kick_strength
from .engine import apply_kick, auto_grid, make_ground_state, propagate_free
from .errors import ConfigurationError
from .io import (csv_text, distribution_csv, dump_yaml, load_yaml, locate,
                 sensitivity_csv, sweep_csv, wigner_csv)
from .observables import cooling_ratio, momentum_distribution, summarize, wigner
from .optimize import optimize_strengths, search_grid, sensitivity_map, sweep_expansion
from .units import (ExpansionProtocol, HarmonicKick, KickSequence, PhysicalScale,
                    initial_widths)

DESIGN_MODES = ("classical", "generalized", "optimized", "explicit")
OUTPUTS = ("summary", "momentum_distribution", "wigner", "sweep", "sensitivity")
FIGURES = ("fig1", "fig2", "fig4", "fig5")


@dataclass(frozen=True)
class Scenario:
    """Validated scenario in natural units."""

    scale: PhysicalScale
    expansion_time: float
    lens: str                                   # "harmonic" or "gaussian"
    widths: tuple[float, ...] = ()
    strengths: Optional[tuple[float, ...]] = None
    design_mode: str = "classical"
    outputs: tuple[str, ...] = ("summary",)
    output_dir: str = "out"
    budget: Optional[int] = None
    multistart: bool = False
    seed_drive: str = "classical"
    sweep_t_values: tuple[float, ...] = ()
    sweep_modes: tuple[str, ...] = ("classical",)
    wigner_downsample: int = 1
    wigner_x_range: float = 6.0
    wigner_p_range: float = 4.0
    sensitivity_axis: tuple[float, float, int] = (0.9, 1.1, 41)
    threads: Optional[int] = None
    raw: dict = field(default_factory=dict, compare=False, repr=False)

    def protocol(self, strengths=None) -> ExpansionProtocol:
        strengths = self.strengths if strengths is None else strengths
        if self.lens == "harmonic":
            return ExpansionProtocol(self.expansion_time, HarmonicKick(strengths[0]))
        return ExpansionProtocol(self.expansion_time,
                                 KickSequence.from_arrays(strengths, self.widths))


def _set_path(data: dict, dotted: str, value) -> None:
    keys = dotted.split(".")
    node = data
    for k in keys[:-1]:
        if not isinstance(node.setdefault(k, {}), dict):
            raise ConfigurationError(f"--set {dotted}: '{k}' is not a mapping")
        node = node[k]
    node[keys[-1]] = value


def apply_overrides(data: dict, overrides) -> dict:
    """Apply ``key.sub=value`` strings; values are parsed as YAML scalars."""
    data = copy.deepcopy(data)
    for item in overrides or ():
        if "=" not in item:
            raise ConfigurationError(f"--set expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        _set_path(data, key.strip(), load_yaml(value, f"--set {key}"))
    return data


class _Fields:
    """Field accessor that reports ``source:line: field 'a.b': message``."""

    def __init__(self, data, text, source):
        self.data, self.text, self.source = data, text, source

    def fail(self, path, message):
        line = locate(self.text, path) if self.text else None
        where = f"{self.source}:{line}" if line else self.source
        name = ".".join(str(p) for p in path)
        raise ConfigurationError(f"{where}: field '{name}': {message}")

    def get(self, path, default=None, required=False):
        node = self.data
        for key in path:
            if isinstance(node, dict) and key in node:
                node = node[key]
            elif isinstance(node, list) and isinstance(key, int) and key < len(node):
                node = node[key]
            else:
                if required:
                    self.fail(path, "is required")
                return default
        return node

    def number(self, path, default=None, required=False, positive=False, nonneg=False):
        value = self.get(path, default, required)
        if value is None:
            return None
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.fail(path, f"must be a number, got {value!r}")
        value = float(value)
        if not math.isfinite(value):
            self.fail(path, "must be finite")
        if positive and value <= 0:
            self.fail(path, f"must be > 0, got {value:g}")
        if nonneg and value < 0:
            self.fail(path, f"must be >= 0, got {value:g}")
        return value

    def choice(self, path, options, default):
        value = self.get(path, default)
        if value not in options:
            self.fail(path, f"must be one of {list(options)}, got {value!r}")
        return value


def parse_scenario(data, text: str = "", source: str = "<config>") -> Scenario:
    if not isinstance(data, dict):
        raise ConfigurationError(f"{source}: top level must be a mapping")
    f = _Fields(data, text, source)
    known = {"scale", "protocol", "design_mode", "outputs", "output_dir", "length_unit",
             "optimizer", "sweep", "wigner", "sensitivity", "threads", "figure",
             "design"}
    for key in data:
        if key not in known:
            f.fail([key], f"unknown field (expected one of {sorted(known)})")

    scale_data = f.get(["scale"], {}) or {}
    if not isinstance(scale_data, dict):
        f.fail(["scale"], "must be a mapping")
    for key in scale_data:
        if key not in ("omega0", "mass", "hbar", "boltzmann", "atom_mass_kg", "trap_frequency"):
            f.fail(["scale", key], "unknown field")
    for key in ("omega0", "mass", "hbar", "boltzmann"):
        value = f.number(["scale", key], 1.0)
        if value != 1.0:
            f.fail(["scale", key], "simulations run in natural units; must be 1 "
                   "(use atom_mass_kg / trap_frequency for SI reporting)")
    scale = PhysicalScale(
        atom_mass_kg=f.number(["scale", "atom_mass_kg"], positive=True),
        trap_frequency=f.number(["scale", "trap_frequency"], positive=True))

    unit = f.choice(["length_unit"], ("initial_width", "natural"), "initial_width")
    to_natural = initial_widths(scale)[0] if unit == "initial_width" else 1.0

    t_f = f.number(["protocol", "expansion_time"], required=True, nonneg=True)
    mode = f.choice(["design_mode"], DESIGN_MODES, "classical")
    kicks = f.get(["protocol", "kicks"])
    lens = f.choice(["protocol", "lens"], ("harmonic", "gaussian"),
                    "gaussian" if kicks else "harmonic")
    widths, strengths = (), None
    if lens == "gaussian":
        if not isinstance(kicks, list) or not kicks:
            f.fail(["protocol", "kicks"], "gaussian lens needs a non-empty list of kicks")
        widths = tuple(f.number(["protocol", "kicks", i, "width"], required=True, positive=True)
                       * to_natural for i in range(len(kicks)))
        if mode == "explicit":
            strengths = tuple(f.number(["protocol", "kicks", i, "strength"], required=True)
                              for i in range(len(kicks)))
    elif mode == "explicit":
        strengths = (f.number(["protocol", "harmonic_strength"], required=True),)
    if mode != "explicit" and t_f == 0 and lens == "gaussian":
        f.fail(["protocol", "expansion_time"], f"design mode {mode!r} needs expansion_time > 0")

    outputs = f.get(["outputs"], ["summary"])
    if isinstance(outputs, str):
        outputs = [outputs]
    if not isinstance(outputs, list):
        f.fail(["outputs"], "must be a list")
    for i, item in enumerate(outputs):
        if item not in OUTPUTS:
            f.fail(["outputs", i], f"unknown output {item!r}; choose from {list(OUTPUTS)}")

    t_values = f.get(["sweep", "t_values"], [])
    if isinstance(t_values, dict):
        start = f.number(["sweep", "t_values", "start"], required=True, positive=True)
        stop = f.number(["sweep", "t_values", "stop"], required=True, positive=True)
        step = f.number(["sweep", "t_values", "step"], required=True, positive=True)
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        t_values = tuple(round(start + i * step, 12) for i in range(count))
    elif isinstance(t_values, list):
        t_values = tuple(f.number(["sweep", "t_values", i], positive=True)
                         for i in range(len(t_values)))
    else:
        f.fail(["sweep", "t_values"], "must be a list or {start, stop, step}")
    modes = f.get(["sweep", "modes"], ["classical"])
    for i, m in enumerate(modes):
        if m not in ("classical", "optimized", "harmonic"):
            f.fail(["sweep", "modes", i], f"unknown sweep mode {m!r}")

    budget = f.get(["optimizer", "budget"])
    if budget is not None and (not isinstance(budget, int) or budget <= 0):
        f.fail(["optimizer", "budget"], "must be a positive integer")
    downsample = f.get(["wigner", "downsample"], 1)
    if not isinstance(downsample, int) or downsample < 1:
        f.fail(["wigner", "downsample"], "must be a positive integer")
    threads = f.get(["threads"])
    if threads is not None and (not isinstance(threads, int) or threads < 1):
        f.fail(["threads"], "must be a positive integer")

    return Scenario(
        scale=scale, expansion_time=t_f, lens=lens, widths=widths, strengths=strengths,
        design_mode=mode, outputs=tuple(outputs),
        output_dir=str(f.get(["output_dir"], "out")),
        budget=budget, multistart=bool(f.get(["optimizer", "multistart"], False)),
        seed_drive=f.choice(["optimizer", "seed_drive"], ("classical", "generalized"),
                            "classical"),
        sweep_t_values=t_values, sweep_modes=tuple(modes),
        wigner_downsample=downsample,
        wigner_x_range=f.number(["wigner", "x_range"], 6.0, positive=True),
        wigner_p_range=f.number(["wigner", "p_range"], 4.0, positive=True),
        sensitivity_axis=(f.number(["sensitivity", "min"], 0.9, positive=True),
                          f.number(["sensitivity", "max"], 1.1, positive=True),
                          int(f.number(["sensitivity", "points"], 41, positive=True))),
        threads=threads, raw=data)


def load_scenario(path, overrides=()) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc.strerror}") from None
    data = apply_overrides(load_yaml(text, str(path)) or {}, overrides)
    # line numbers refer to the file; overridden values fall back to the file name
    return parse_scenario(data, text, str(path))


def load_preset(name: str, overrides=()) -> Scenario:
    if name not in FIGURES:
        raise ConfigurationError(f"unknown figure {name!r}; choose from {list(FIGURES)}")
    text = resources.files("deltakick.presets").joinpath(f"{name}.yaml").read_text()
    data = apply_overrides(load_yaml(text, f"{name}.yaml"), overrides)
    return parse_scenario(data, text, f"{name}.yaml")


# ---------------------------------------------------------------- design / simulate

def resolve_strengths(sc: Scenario) -> tuple[tuple[float, ...], dict]:
    """Kick strengths for the scenario's design mode, plus design metadata."""
    t_f = sc.expansion_time
    if sc.design_mode == "explicit":
        return sc.strengths, {"design_mode": "explicit"}
    if sc.lens == "harmonic":
        if sc.design_mode == "classical":
            if t_f <= 0:
                raise ConfigurationError("classical harmonic kick needs expansion_time > 0")
            seed = (1.0 / t_f,)
        else:
            seed = (harmonic_kick_strength(t_f, sc.scale).strength,)
        widths = None
    else:
        drive = sc.seed_drive if sc.design_mode == "optimized" else sc.design_mode
        result = design(sc.widths, t_f, drive=drive, scale=sc.scale)
        seed, widths = result.strengths, sc.widths
        if sc.design_mode != "optimized":
            return seed, {"design_mode": sc.design_mode, "drive": result.rhs_value,
                          "condition_estimate": result.condition_estimate}
    if sc.design_mode != "optimized":
        return seed, {"design_mode": sc.design_mode}
    report = optimize_strengths(widths, t_f, seed, sc.budget, multistart=sc.multistart,
                                scale=sc.scale)
    return report.best_strengths, {
        "design_mode": "optimized", "seed": list(report.initial_guess),
        "seed_dp": report.initial_dp, "best_dp": report.best_dp,
        "objective_evaluations": report.objective_evaluations,
        "converged": report.converged}


def simulate(sc: Scenario, strengths):
    """Run the protocol; returns (initial, at-kick, final) states."""
    protocol = sc.protocol(strengths)
    if sc.lens == "harmonic":
        grid = auto_grid(protocol, sc.scale)
    else:
        grid = search_grid(sc.widths, sc.expansion_time, strengths, sc.scale)
    initial = make_ground_state(grid, sc.scale)
    expanded = propagate_free(initial, sc.expansion_time)
    return initial, expanded, apply_kick(expanded, protocol.kick_spec)


def summary_rows(initial, expanded, final, scale):
    s0, s1, s2 = (summarize(s, scale) for s in (initial, expanded, final))
    rows = [("dx_initial", s0.dx), ("dp_initial", s0.dp),
            ("dx_kick", s1.dx), ("dp_kick", s1.dp),
            ("dx_final", s2.dx), ("dp_final", s2.dp), ("dv_final", s2.dv),
            ("uncertainty_final", s2.uncertainty_product),
            ("dx_ratio", s1.dx / s0.dx), ("dv_ratio", s2.dv / s0.dv),
            ("cooling_ratio", cooling_ratio(s0, s2)),
            ("excess_kurtosis_final", s2.excess_kurtosis),
            ("temperature_natural_final", s2.temperature_natural)]
    if scale.has_si:
        from .units import natural_to_si_temperature
        rows.append(("temperature_kelvin_initial", natural_to_si_temperature(s0.dv, scale)))
        rows.append(("temperature_kelvin_final", natural_to_si_temperature(s2.dv, scale)))
    return rows


def _wigner_for(state, sc: Scenario, x_scale: float, dp_i: float):
    n = state.grid.num_points
    down = sc.wigner_downsample
    while n % down:
        down //= 2
    wmap = wigner(state, down)
    return wmap.crop(sc.wigner_x_range * x_scale, sc.wigner_p_range * dp_i)


def _scenario_record(sc: Scenario) -> dict:
    return {"expansion_time": sc.expansion_time, "lens": sc.lens,
            "widths": list(sc.widths), "design_mode": sc.design_mode,
            "scale": sc.scale.to_dict(), "length_unit": "natural"}


def design_config(sc: Scenario, strengths, meta) -> dict:
    """Scenario config with explicit strengths, ready for ``simulate``."""
    out = {"scale": sc.scale.to_dict(), "length_unit": "natural",
           "design_mode": "explicit", "outputs": ["summary"]}
    out["scale"] = {k: v for k, v in out["scale"].items()
                    if k in ("atom_mass_kg", "trap_frequency")}
    if not out["scale"]:
        del out["scale"]
    if sc.lens == "harmonic":
        out["protocol"] = {"expansion_time": sc.expansion_time, "lens": "harmonic",
                           "harmonic_strength": strengths[0]}
    else:
        out["protocol"] = {"expansion_time": sc.expansion_time,
                           "kicks": [{"strength": k, "width": s}
                                     for k, s in zip(strengths, sc.widths)]}
    out["design"] = {k: v for k, v in meta.items() if k != "design_mode"}
    out["design"]["source_mode"] = meta.get("design_mode")
    return out


def _run_design(sc):
    strengths, meta = resolve_strengths(sc)
    files = {"design.yaml": dump_yaml(design_config(sc, strengths, meta))}
    return files, {"strengths": list(strengths), "design": meta}


def _run_simulate(sc, wigner_only=False):
    strengths, meta = resolve_strengths(sc)
    initial, expanded, final = simulate(sc, strengths)
    files = {}
    outputs = ("wigner",) if wigner_only else sc.outputs
    if "summary" in outputs:
        files["summary.csv"] = csv_text(["quantity", "value"],
                                        summary_rows(initial, expanded, final, sc.scale))
    if "momentum_distribution" in outputs:
        files["momentum_distribution.csv"] = distribution_csv(*momentum_distribution(final))
    if "wigner" in outputs:
        dp_i = initial_widths(sc.scale)[1]
        x_scale = summarize(expanded).dx
        for name, state in (("initial", initial), ("at_kick", expanded), ("final", final)):
            files[f"wigner_{name}.csv"] = wigner_csv(_wigner_for(state, sc, x_scale, dp_i))
    return files, {"strengths": list(strengths), "design": meta}


def _sweep_curves(sc, modes=None):
    widths = sc.widths if sc.lens == "gaussian" else None
    curves = {}
    for mode in modes or sc.sweep_modes:
        curves[mode] = sweep_expansion(widths if mode != "harmonic" else None,
                                       sc.sweep_t_values, mode=mode,
                                       drive=sc.seed_drive, budget=sc.budget,
                                       n_jobs=sc.threads, scale=sc.scale)
    return curves


def _focal_record(curve):
    if curve.best is None:
        return None
    b = curve.best
    return {"t_f": b.t_f, "dv_ratio": b.dv_ratio, "dx_ratio": b.dx_ratio,
            "strengths": list(b.strengths), "interior": b.interior}


def _run_sweep(sc):
    if not sc.sweep_t_values:
        raise ConfigurationError("sweep needs sweep.t_values")
    curves = _sweep_curves(sc)
    files = {f"sweep_{mode}.csv": sweep_csv(c) for mode, c in curves.items()}
    failures = {mode: [{"t_f": p.t_f, "error": p.error} for p in c.points if not p.ok]
                for mode, c in curves.items()}
    return files, {"focal_times": {m: _focal_record(c) for m, c in curves.items()},
                   "failed_points": {m: v for m, v in failures.items() if v}}


def _run_sensitivity(sc):
    if sc.lens != "gaussian" or len(sc.widths) != 2:
        raise ConfigurationError("sensitivity maps need exactly two Gaussian kicks")
    lo, hi, n = sc.sensitivity_axis
    axis = np.linspace(lo, hi, n)
    smap = sensitivity_map(sc.widths[0], sc.widths[1], sc.expansion_time, axis, axis,
                           drive=sc.seed_drive, n_jobs=sc.threads, scale=sc.scale)
    s1, s2, v = smap.best()
    return {"sensitivity.csv": sensitivity_csv(smap)}, {
        "classical_strengths": list(smap.classical.strengths),
        "classical_point_dp_ratio": smap.at(1.0, 1.0),
        "best_grid_point": {"scale1": s1, "scale2": s2, "dp_ratio": v}}


VERBS = {
    "design": _run_design,
    "simulate": _run_simulate,
    "wigner": lambda sc: _run_simulate(sc, wigner_only=True),
    "sweep": _run_sweep,
    "sensitivity": _run_sensitivity,
}


def write_outputs(out_dir, files: dict, manifest: dict) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = dict(manifest)
    manifest["files"] = sorted(files)
    written = []
    for name in sorted(files):
        path = out / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(files[name])
        written.append(path)
    (out / "manifest.yaml").write_text(dump_yaml(manifest))
    return written + [out / "manifest.yaml"]


def run_scenario(sc: Scenario, verb: str = "simulate", out_dir=None) -> list[Path]:
    """Run one verb on a scenario and write its files plus the manifest."""
    if verb not in VERBS:
        raise ConfigurationError(f"unknown command {verb!r}")
    files, results = VERBS[verb](sc)
    manifest = {"version": __version__, "command": verb, "units": "natural",
                "scenario": _scenario_record(sc), "results": results}
    return write_outputs(out_dir or sc.output_dir, files, manifest)


# ---------------------------------------------------------------- figures

def _fig1(sc):
    """Wigner maps: ground state, free expansion, harmonic, 1, 2 and 3 Gaussian kicks."""
    t_f = sc.expansion_time
    widths = sc.widths
    dp_i = initial_widths(sc.scale)[1]
    panels = {}
    base = Scenario(scale=sc.scale, expansion_time=t_f, lens="harmonic",
                    design_mode="generalized", wigner_downsample=sc.wigner_downsample,
                    wigner_x_range=sc.wigner_x_range, wigner_p_range=sc.wigner_p_range)
    strengths, _ = resolve_strengths(base)
    initial, expanded, harmonic = simulate(base, strengths)
    grid_states = {"a_initial": initial, "b_free": expanded, "c_harmonic": harmonic}
    designs = {}
    for n, label in ((1, "d_1kick"), (2, "e_2kick"), (3, "f_3kick")):
        sub = Scenario(scale=sc.scale, expansion_time=t_f, lens="gaussian",
                       widths=widths[:n], design_mode=sc.design_mode, budget=sc.budget,
                       seed_drive=sc.seed_drive)
        k, _ = resolve_strengths(sub)
        designs[label] = list(k)
        grid_states[label] = simulate(sub, k)[2]
    x_scale = summarize(expanded).dx
    files, norms = {}, {}
    for label, state in grid_states.items():
        wmap = _wigner_for(state, sc, x_scale, dp_i)
        panels[label] = wmap
        norms[label] = wmap.normalization()
        files[f"fig1_{label}.csv"] = wigner_csv(wmap)
    return files, {"expansion_time": t_f, "strengths": designs,
                   "wigner_normalization": norms}


def focal_times(sc, modes=("classical", "optimized")):
    """Sweeps for N = 1..len(widths) and the refined optimal focal time of each."""
    curves = {}
    for n in range(1, len(sc.widths) + 1):
        sub = Scenario(scale=sc.scale, expansion_time=sc.expansion_time, lens="gaussian",
                       widths=sc.widths[:n], budget=sc.budget, seed_drive=sc.seed_drive,
                       sweep_t_values=sc.sweep_t_values, sweep_modes=tuple(modes),
                       threads=sc.threads)
        curves[n] = _sweep_curves(sub)
    return curves


def _fig2(sc):
    curves = focal_times(sc)
    harmonic = _sweep_curves(sc, ("harmonic",))["harmonic"]
    files = {"fig2_harmonic.csv": sweep_csv(harmonic)}
    rows, record = [], {}
    for n, by_mode in curves.items():
        for mode, curve in by_mode.items():
            files[f"fig2_n{n}_{mode}.csv"] = sweep_csv(curve)
            b = curve.best
            rows.append([n, mode, b.t_f, b.dx_ratio, b.dv_ratio])
            record[f"n{n}_{mode}"] = _focal_record(curve)
    files["fig2_focal_times.csv"] = csv_text(
        ["n_kicks", "mode", "t_f", "dx_ratio", "dv_ratio"], rows)
    return files, {"focal_times": record}


def _momentum_panel(sc, widths, t_f):
    if widths is None:
        sub = Scenario(scale=sc.scale, expansion_time=t_f, lens="harmonic",
                       design_mode="generalized")
    else:
        sub = Scenario(scale=sc.scale, expansion_time=t_f, lens="gaussian", widths=widths,
                       design_mode="optimized", budget=sc.budget, seed_drive=sc.seed_drive,
                       multistart=sc.multistart)
    strengths, _ = resolve_strengths(sub)
    initial, _, final = simulate(sub, strengths)
    s0, s1 = summarize(initial), summarize(final)
    return momentum_distribution(final), {
        "t_f": t_f, "strengths": list(strengths), "dp_final": s1.dp,
        "dv_ratio": s1.dv / s0.dv, "excess_kurtosis": s1.excess_kurtosis}


def _fig4(sc):
    curves = focal_times(sc, modes=("classical",))
    t_n = {n: curves[n]["classical"].best.t_f for n in curves}
    files, record = {}, {"focal_times": t_n}
    n_max = max(t_n)
    for variant in ("a", "b"):
        panels = {}
        for n in range(1, n_max + 1):
            t = t_n[1] if variant == "a" else t_n[n]
            panels[f"n{n}"] = _momentum_panel(sc, sc.widths[:n], t)
        panels["harmonic"] = _momentum_panel(sc, None, t_n[1] if variant == "a" else t_n[n_max])
        for label, ((p, density), info) in panels.items():
            files[f"fig4{variant}_{label}.csv"] = distribution_csv(p, density)
            record[f"fig4{variant}_{label}"] = info
        if variant == "b":
            dv1 = panels["n1"][1]["dv_ratio"]
            record["temperature_improvement"] = {
                f"n{n}": (dv1 / panels[f"n{n}"][1]["dv_ratio"]) ** 2
                for n in range(2, n_max + 1)}
    return files, record


def _fig5(sc):
    curves = focal_times(Scenario(scale=sc.scale, expansion_time=sc.expansion_time,
                                  lens="gaussian", widths=sc.widths[:2], budget=sc.budget,
                                  seed_drive=sc.seed_drive, sweep_t_values=sc.sweep_t_values,
                                  threads=sc.threads), modes=("classical",))
    t_2 = curves[2]["classical"].best.t_f
    lo, hi, n = sc.sensitivity_axis
    axis = np.linspace(lo, hi, n)
    smap = sensitivity_map(sc.widths[0], sc.widths[1], t_2, axis, axis,
                           drive=sc.seed_drive, n_jobs=sc.threads, scale=sc.scale)
    report = optimize_strengths(sc.widths[:2], t_2, smap.classical, sc.budget,
                                scale=sc.scale)
    dp_i = initial_widths(sc.scale)[1]
    s1, s2, v = smap.best()
    return {"fig5_sensitivity.csv": sensitivity_csv(smap)}, {
        "t_2": t_2, "classical_strengths": list(smap.classical.strengths),
        "classical_point_dp_ratio": smap.at(1.0, 1.0),
        "best_grid_point": {"scale1": s1, "scale2": s2, "dp_ratio": v},
        "optimized": {"strengths": list(report.best_strengths),
                      "scale1": report.best_strengths[0] / smap.classical.strengths[0],
                      "scale2": report.best_strengths[1] / smap.classical.strengths[1],
                      "dp_ratio": dp_i / report.best_dp}}


FIGURE_RUNNERS = {"fig1": _fig1, "fig2": _fig2, "fig4": _fig4, "fig5": _fig5}


def reproduce_figures(which: str, out_dir=None, overrides=(), threads=None) -> list[Path]:
    """Write the data behind one figure, using the bundled preset config."""
    sc = load_preset(which, overrides)
    if threads is not None:
        sc = Scenario(**{**sc.__dict__, "threads": threads})
    files, results = FIGURE_RUNNERS[which](sc)
    manifest = {"version": __version__, "command": f"reproduce {which}", "units": "natural",
                "scenario": _scenario_record(sc), "results": results}
    return write_outputs(out_dir or sc.output_dir, files, manifest)
