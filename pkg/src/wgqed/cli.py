"""Command-line front end.

Every run writes one output directory::

    <out>/config.json   resolved configuration (I/O units)
    <out>/result.json   {config, seed, results: {params}, derived, diagnostics}
    <out>/<table>.csv   plot-ready table (spectrum.csv, g2.csv, fit.csv,
                        polarization_map.csv or trace.csv)
    <out>/error.json    only when the run fails
    <out>/units.json    only with --debug-dump-units

I/O units are MHz (ordinary frequency), nW, nm, ns and degrees. They are
converted to angular SI units once, in :func:`internal_units`. Precedence of
settings is command line > JSON config file > built-in defaults.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np
from scipy import constants

from . import estimation as es
from . import master_equation as me
from . import polarization as pol
from . import synthetic as sy
from . import waveguide as wg
from .errors import ConfigError, ParseError, WgqedError
from .traces import CorrelationTrace, SpectrumTrace

MODES = ("spectrum", "g2", "fit-lorentzian", "fit-saturation", "fit-reflection", "fit-g2",
         "polarization-map", "synth")
SYNTH_MODELS = ("lorentzian", "saturation", "reflection", "g2")


@dataclass
class RunConfig:
    mode: str = "spectrum"
    input: str | None = None
    out: str = "wgqed-out"
    seed: int = 0
    beta: float = 0.143
    linewidth_mhz: float = 26.7
    pc_nw: float = 0.32
    wavelength_nm: float = 619.0
    xi: float = 0.48
    phi_deg: float = 0.0
    channel: str | None = None
    grid_min: float | None = None
    grid_max: float | None = None
    grid_points: int | None = None
    noise: str = "none"
    counts: float = 1e4
    sigma: float = 0.01
    model: str = "lorentzian"
    saturation: float = 1e-3
    center_mhz: float = 0.0
    fwhm_mhz: float = 32.1
    height: float = 100.0
    offset: float = 2.0
    rabi_mhz: float = 60.0
    g2_offset: float = 0.03
    profile: str = "lorentzian"
    debug_dump_units: bool = False

    def validate(self):
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.noise not in ("poisson", "gaussian", "none"):
            raise ConfigError(f"unknown noise model {self.noise!r}")
        if self.model not in SYNTH_MODELS:
            raise ConfigError(f"unknown synth model {self.model!r}")
        if self.grid_points is not None and self.grid_points < 1:
            raise ConfigError("grid_points must be positive")
        if self.linewidth_mhz <= 0 or self.wavelength_nm <= 0 or self.pc_nw <= 0:
            raise ConfigError("linewidth, wavelength and critical power must be positive")
        if not 0 <= self.beta <= 1:
            raise ConfigError("beta must lie in [0, 1]")
        if self.xi < 0:
            raise ConfigError("xi must be non-negative")


def internal_units(cfg: RunConfig) -> dict:
    """The one place where I/O units become internal (angular SI) units."""
    gamma_total = 2 * math.pi * cfg.linewidth_mhz * 1e6
    return {
        "gamma_total_rad_s": gamma_total,
        "linewidth_hz": cfg.linewidth_mhz * 1e6,
        "optical_frequency_hz": constants.c / (cfg.wavelength_nm * 1e-9),
        "P_c_w": cfg.pc_nw * 1e-9,
        "phi_rad": math.radians(cfg.phi_deg),
        "rabi_rad_s": 2 * math.pi * cfg.rabi_mhz * 1e6,
        "lifetime_s": 1.0 / gamma_total,
    }


# ---------------------------------------------------------------------------
# CSV I/O

def ingest_trace(path, kind: str = "spectrum", fmt: str = "csv"):
    """Read ``x,value[,sigma]`` with one header line.

    Raises
    ------
    ParseError
        Missing file, empty file, wrong column count or non-numeric cells,
        with the offending 1-based line number.
    """
    if fmt != "csv":
        raise ParseError(f"unsupported format {fmt!r}")
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {p}: {exc}") from exc
    rows = list(csv.reader(text.splitlines()))
    if not rows:
        raise ParseError("empty file", line=1)
    header = rows[0]
    ncol = len(header)
    if ncol not in (2, 3):
        raise ParseError(f"expected 2 or 3 columns, header has {ncol}", line=1)
    data = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != ncol:
            raise ParseError(f"expected {ncol} columns, found {len(row)}", line=lineno)
        try:
            data.append([float(c) for c in row])
        except ValueError as exc:
            raise ParseError(f"non-numeric cell ({exc})", line=lineno) from None
    if not data:
        raise ParseError("no data rows", line=2)
    arr = np.array(data)
    sigma = arr[:, 2] if ncol == 3 else None
    try:
        if kind == "spectrum":
            return SpectrumTrace(arr[:, 0], arr[:, 1], sigma, x_unit=header[0].strip())
        if kind == "correlation":
            return CorrelationTrace(arr[:, 0], arr[:, 1], sigma=sigma)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc
    raise ParseError(f"unknown trace kind {kind!r}")


def write_csv(path, header, columns):
    cols = [np.asarray(c) for c in columns]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in zip(*cols):
            w.writerow([repr(float(v)) for v in row])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def write_json(path, obj):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_jsonable(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# mode implementations; each returns (result dict, table name, header, columns)

def _grid(cfg, lo, hi, n):
    lo = cfg.grid_min if cfg.grid_min is not None else lo
    hi = cfg.grid_max if cfg.grid_max is not None else hi
    n = cfg.grid_points if cfg.grid_points is not None else n
    if n == 1:
        return np.array([float(lo)])
    return np.linspace(lo, hi, n)


def _derived(cfg, units, beta=None, P_c_w=None):
    beta = cfg.beta if beta is None else beta
    P_c_w = units["P_c_w"] if P_c_w is None else P_c_w
    out = {"delta_T": wg.transmission_contrast(beta)}
    if beta > 0:
        n_c = wg.critical_photon_number(beta)
        out["n_c"] = n_c
        out["eta"] = wg.coupling_efficiency_from_critical_power(
            P_c_w, n_c, units["linewidth_hz"], units["optical_frequency_hz"])
    if beta < 1:
        out["cooperativity"] = wg.cooperativity(beta)
    return out


def _sim_config(cfg):
    return me.default_config(cfg.beta, saturation=cfg.saturation)


def _sim_gamma_total(sim: me.ThreeModeConfig, beta: float) -> float:
    """Emitter total linewidth in simulation units, gamma (1 + C)."""
    return sim.gamma * (1 + wg.cooperativity(beta))


def run_spectrum(cfg, units):
    channel = cfg.channel or "transmission"
    if channel not in ("transmission", "reflection", "psb"):
        raise ConfigError(f"spectrum channel must be transmission, reflection or psb, not {channel!r}")
    grid_mhz = _grid(cfg, -5 * cfg.linewidth_mhz, 5 * cfg.linewidth_mhz, 21)
    sim = _sim_config(cfg)
    # physical detuning in units of the emitter linewidth maps onto the same
    # multiple of the simulated total linewidth
    g_sim = _sim_gamma_total(sim, cfg.beta)
    delta_sim = grid_mhz / cfg.linewidth_mhz * g_sim
    alpha = 0.0
    if channel == "reflection" and cfg.xi > 0 and cfg.beta > 0:
        alpha = me.alpha_for_reflection(sim, cfg.xi, units["phi_rad"])
    trace = me.spectrum_sweep(sim, delta_sim, channel, alpha=alpha)
    w = 2 * math.pi * grid_mhz * 1e6
    if channel == "transmission":
        analytic = wg.transmission_from_saturation(cfg.beta, cfg.saturation, w, units["gamma_total_rad_s"])
    elif channel == "reflection":
        analytic = wg.reflection(wg.ReflectionParams(cfg.xi, units["phi_rad"], units["gamma_total_rad_s"]), w)
    else:
        analytic = 1.0 / (1.0 + (2 * w / units["gamma_total_rad_s"]) ** 2)
    result = {
        "params": {},
        "channel": channel,
        "max_abs_deviation_from_analytic": float(np.max(np.abs(trace.values - analytic))),
        "simulation": {"g": sim.g, "drive_amplitude": sim.drive_amplitude,
                       "cross_coupling_scale": sim.cross_coupling_scale,
                       "kappa_eff": me.effective_cavity_linewidth(sim)},
    }
    return result, "spectrum.csv", ["detuning_mhz", "value", "analytic"], [grid_mhz, trace.values, analytic]


def run_g2(cfg, units):
    pair = (cfg.channel or "TT").upper()
    if len(pair) != 2 or any(c not in "TRP" for c in pair):
        raise ConfigError(f"g2 channel must be a pair from T, R, P (e.g. TT, PR), not {pair!r}")
    if cfg.beta <= 0:
        raise ConfigError("g2 needs beta > 0")
    tau_ns = _grid(cfg, -20.0, 20.0, 41)
    sim = _sim_config(cfg)
    alpha = 0.0
    if "R" in pair and cfg.xi > 0:
        alpha = me.alpha_for_reflection(sim, cfg.xi, units["phi_rad"])
    system = me.build_system(sim, alpha)
    scale = units["gamma_total_rad_s"] / _sim_gamma_total(sim, cfg.beta)
    tau_sim = tau_ns * 1e-9 * scale
    trace = me.g2(system, pair[0], pair[1], tau_sim)
    zero = me.g2(system, pair[0], pair[1], [0.0], check_truncation=False).values[0]
    result = {
        "params": {},
        "channel": pair,
        "g2_0": float(zero),
        "alpha": complex(alpha),
        "normalization": trace.normalization,
    }
    return result, "g2.csv", ["tau_ns", "g2"], [tau_ns, trace.values]


def _require_input(cfg):
    if not cfg.input:
        raise ConfigError(f"mode {cfg.mode} needs --in")


def _fit_table(x, data, model):
    return ["x", "data", "model"], [x, data, model]


def _fit_summary(fit: es.FitResult):
    return {
        "params": fit.params(),
        "flags": fit.flags,
        "extra": fit.extra,
        "converged": fit.converged,
    }, {"chi2_reduced": fit.chi2_reduced, "iterations": fit.iterations}


def run_fit_lorentzian(cfg, units):
    _require_input(cfg)
    tr = ingest_trace(cfg.input, "spectrum")
    fit = es.fit_lorentzian(tr, profile=cfg.profile)
    res, diag = _fit_summary(fit)
    if cfg.profile == "lorentzian":
        model = es.lorentzian(tr.x, *fit.values)
    else:
        model = es._voigt(tr.x, *fit.values)
    return res, diag, "fit.csv", *_fit_table(tr.x, tr.values, model)


def run_fit_saturation(cfg, units):
    _require_input(cfg)
    tr = ingest_trace(cfg.input, "spectrum")
    fit = es.fit_saturation(tr.x, tr.values, tr.sigma)
    res, diag = _fit_summary(fit)
    P_c_w = fit["P_c"] * 1e-9
    res["derived_from_fit"] = _derived(cfg, units, beta=fit["beta"], P_c_w=P_c_w)
    model = wg.saturation_contrast(tr.x, fit["beta"], fit["P_c"])
    return res, diag, "fit.csv", *_fit_table(tr.x, tr.values, model)


def run_fit_reflection(cfg, units):
    _require_input(cfg)
    tr = ingest_trace(cfg.input, "spectrum")
    fit = es.fit_reflection(tr)
    res, diag = _fit_summary(fit)
    res["phi_deg"] = math.degrees(fit["phi"])
    res["linewidth_mhz"] = fit["gamma"]
    model = es.reflection_model(tr.x, *fit.values)
    return res, diag, "fit.csv", *_fit_table(tr.x, tr.values, model)


def run_fit_g2(cfg, units):
    _require_input(cfg)
    tr = ingest_trace(cfg.input, "correlation")
    fit = es.fit_resonant_g2(tr)  # delays in ns, rates in 1/ns
    res, diag = _fit_summary(fit)
    Gamma = fit["Gamma"] * 1e9
    res["Gamma_per_s"] = Gamma
    res["Omega_rad_s"] = fit["Omega"] * 1e9
    res["rabi_mhz"] = fit["Omega"] * 1e3 / (2 * math.pi)
    res.update({k: v for k, v in wg.lifetime_linewidth_conversions(decay_rate=Gamma).items()})
    model = wg.resonant_g2(tr.tau, *fit.values)
    return res, diag, "fit.csv", *_fit_table(tr.tau, tr.values, model)


def run_polarization(cfg, units):
    grid = np.radians(_grid(cfg, 0.0, 180.0, 37))
    scale = cfg.counts if cfg.noise == "poisson" else 1.0
    surf = pol.polarization_map(grid, grid, scale)
    P1, P2 = np.meshgrid(np.degrees(grid), np.degrees(grid), indexing="ij")
    res = {"params": {}, "max": float(surf.max()), "min": float(surf.min())}
    return res, "polarization_map.csv", ["phi1_deg", "phi2_deg", "value"], [P1.ravel(), P2.ravel(), surf.ravel()]


def run_synth(cfg, units):
    rng = np.random.default_rng(cfg.seed)
    noise = cfg.noise
    if cfg.model == "lorentzian":
        x = _grid(cfg, -200.0, 200.0, 201)
        tr = sy.lorentzian_trace(x, cfg.center_mhz, cfg.fwhm_mhz, cfg.height, cfg.offset, rng,
                                 noise, counts=cfg.counts, sigma=cfg.sigma)
        header = ["detuning_mhz", "value", "sigma"]
        cols = [tr.x, tr.values, tr.sigma]
    elif cfg.model == "saturation":
        x = np.geomspace(cfg.grid_min or 0.01, cfg.grid_max or 30.0, cfg.grid_points or 60)
        y, s = sy.saturation_data(x, cfg.beta, cfg.pc_nw, rng, counts=cfg.counts, noise=noise, sigma=cfg.sigma)
        header = ["power_nw", "contrast", "sigma"]
        cols = [x, y, s]
    elif cfg.model == "reflection":
        x = _grid(cfg, -150.0, 150.0, 301)
        tr = sy.reflection_trace(x, cfg.xi, units["phi_rad"], cfg.linewidth_mhz, rng=rng, noise=noise,
                                 counts=cfg.counts, sigma=cfg.sigma)
        header = ["detuning_mhz", "value", "sigma"]
        cols = [tr.x, tr.values, tr.sigma]
    else:
        x = _grid(cfg, -30.0, 30.0, 301)
        tr = sy.resonant_g2_trace(x, units["gamma_total_rad_s"] * 1e-9, units["rabi_rad_s"] * 1e-9,
                                  cfg.g2_offset, rng=rng, noise=noise, sigma=cfg.sigma, counts=cfg.counts)
        header = ["tau_ns", "g2", "sigma"]
        cols = [tr.tau, tr.values, tr.sigma]
    if cols[2] is None:
        header, cols = header[:2], cols[:2]
    return {"params": {}, "model": cfg.model, "noise": noise, "points": int(np.size(cols[0]))}, \
        "trace.csv", header, cols


def run(cfg: RunConfig) -> dict:
    """Execute one run and write its output directory; returns the summary."""
    cfg.validate()
    units = internal_units(cfg)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    write_json(out / "config.json", asdict(cfg))
    if cfg.debug_dump_units:
        write_json(out / "units.json", units)
    diagnostics = {"chi2_reduced": None, "iterations": None}
    if cfg.mode.startswith("fit-"):
        runner = {"fit-lorentzian": run_fit_lorentzian, "fit-saturation": run_fit_saturation,
                  "fit-reflection": run_fit_reflection, "fit-g2": run_fit_g2}[cfg.mode]
        results, diagnostics, table, header, cols = runner(cfg, units)
    else:
        runner = {"spectrum": run_spectrum, "g2": run_g2, "polarization-map": run_polarization,
                  "synth": run_synth}[cfg.mode]
        results, table, header, cols = runner(cfg, units)
    write_csv(out / table, header, cols)
    derived = results.pop("derived_from_fit", None)
    if derived is None and cfg.mode not in ("synth", "polarization-map"):
        derived = _derived(cfg, units)
    summary = {
        "config": asdict(cfg),
        "seed": cfg.seed,
        "results": results,
        "derived": derived or {},
        "diagnostics": diagnostics,
    }
    if cfg.debug_dump_units:
        summary["units"] = units
    write_json(out / "result.json", summary)
    return summary


# ---------------------------------------------------------------------------
# argument handling

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wgqed", description=__doc__.split("\n\n")[0])
    a = p.add_argument
    a("--mode", choices=MODES)
    a("--config", help="JSON file with RunConfig fields")
    a("--in", dest="input", help="input CSV (x,value[,sigma])")
    a("--out", help="output directory")
    a("--seed", type=int)
    a("--beta", type=float)
    a("--linewidth-mhz", type=float)
    a("--pc-nw", type=float)
    a("--wavelength-nm", type=float)
    a("--xi", type=float)
    a("--phi-deg", type=float)
    a("--channel")
    a("--grid-min", type=float)
    a("--grid-max", type=float)
    a("--grid-points", type=int)
    a("--noise", choices=("poisson", "gaussian", "none"))
    a("--counts", type=float, help="counts scale for poisson noise")
    a("--sigma", type=float, help="gaussian noise level")
    a("--model", choices=SYNTH_MODELS, help="generating model for synth")
    a("--saturation", type=float, help="<n>/n_c used by simulations")
    a("--profile", choices=("lorentzian", "voigt"))
    a("--debug-dump-units", action="store_true", default=None)
    return p


def resolve_config(argv=None) -> RunConfig:
    """Merge defaults, an optional JSON file and command-line flags."""
    ns = build_parser().parse_args(argv)
    values = {}
    if ns.config:
        try:
            loaded = json.loads(Path(ns.config).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config {ns.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno) from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        known = {f.name for f in fields(RunConfig)}
        for k, v in loaded.items():
            key = k.replace("-", "_")
            key = "input" if key == "in" else key
            if key not in known:
                raise ConfigError(f"unknown config key {k!r}")
            values[key] = v
    for k, v in vars(ns).items():
        if k != "config" and v is not None:
            values[k] = v
    try:
        cfg = RunConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def main(argv=None) -> int:
    out_dir = None
    try:
        cfg = resolve_config(argv)
        out_dir = Path(cfg.out)
        summary = run(cfg)
    except WgqedError as exc:
        err = {"error": type(exc).__name__, "message": str(exc), "exit_code": exc.exit_code}
        if out_dir is not None:
            out_dir.mkdir(parents=True, exist_ok=True)
            write_json(out_dir / "error.json", err)
        print(json.dumps(err), file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        # invalid inputs rejected by the library layers
        err = {"error": "ConfigError", "message": str(exc), "exit_code": 2}
        if out_dir is not None:
            out_dir.mkdir(parents=True, exist_ok=True)
            write_json(out_dir / "error.json", err)
        print(json.dumps(err), file=sys.stderr)
        return 2
    print(json.dumps(_jsonable({"out": str(out_dir), "results": summary["results"]}), sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
