"""
Scenario files, figure presets and the scenario runner.

A scenario is a YAML mapping::

    name: qpg_design
    process:                 # see ``build_spec`` for every key
      flavor: SFG
      pump: {wavelength_nm: auto, axis: e}
      input: {wavelength_nm: 1550, axis: o}
      length_mm: 10
    grid: {count: 512, span: 6, form: sinc}
    analysis: [design, jsa, schmidt, efficiency_sweep]
    options: {}
    output_dir: out/qpg_design

Relative paths inside a scenario file are resolved against the file's directory.
"""

from __future__ import annotations

import copy
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .. import conversion, dispersion as disp, jsa as jsamod, modematch, schmidt, timeorder
from ..dispersion import Axis, Role, WaveSpec
from ..errors import ConfigError, PulseGateError
from ..spatial import read_profile
from ..spectra import write_spectral_amplitude

ANALYSES = ("design", "jsa", "schmidt", "efficiency_sweep", "modematch", "rigorous", "gvm_sweep")
PRESETS = ("fig3a", "fig3b", "fig4_qpg", "fig4_qps", "fig5_matched", "fig5_mismatched",
           "fig6_gvm", "perf_section", "appendix_rigorous")
SHIPPED = Path(__file__).parent
GVM_WINDOW_NM = (600.0, 1200.0)

_PROCESS_KEYS = {"flavor", "pump", "input", "output", "length_mm", "temperature_k", "poling_period_um",
                 "d_eff_pm_per_v", "a_eff_um2", "profiles", "pump_shape", "pump_peak_power_w",
                 "rep_rate_hz", "input_duration_fs", "effective_indices", "calibration", "materials",
                 "gvm_window_nm"}


@dataclass
class Scenario:
    name: str
    process: dict
    grid: dict = field(default_factory=lambda: {"count": 512, "span": 6.0, "form": "sinc"})
    analysis: list = field(default_factory=list)
    options: dict = field(default_factory=dict)
    output_dir: str = "out"
    base_dir: str | None = None

    def __post_init__(self):
        unknown = [a for a in self.analysis if a not in ANALYSES]
        if unknown:
            raise ConfigError(f"unknown analyses {unknown}; choose from {list(ANALYSES)}")
        extra = set(self.process) - _PROCESS_KEYS
        if extra:
            raise ConfigError(f"unknown process keys {sorted(extra)}")

    def to_dict(self) -> dict:
        return {"name": self.name, "process": copy.deepcopy(self.process), "grid": dict(self.grid),
                "analysis": list(self.analysis), "options": copy.deepcopy(self.options),
                "output_dir": self.output_dir}

    def resolve(self, path) -> Path:
        p = Path(path)
        if not p.is_absolute() and self.base_dir:
            p = Path(self.base_dir) / p
        return p


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text())
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read scenario {path}: {exc}") from None
    if not isinstance(data, dict) or "process" not in data:
        raise ConfigError(f"{path}: scenario needs at least a 'process' mapping")
    sc = Scenario(name=data.get("name", path.stem), process=data["process"],
                  grid={**{"count": 512, "span": 6.0, "form": "sinc"}, **(data.get("grid") or {})},
                  analysis=list(data.get("analysis") or []), options=dict(data.get("options") or {}),
                  output_dir=data.get("output_dir", f"out/{path.stem}"), base_dir=str(path.parent))
    _check_files(sc)
    return sc


def save_scenario(sc: Scenario, path) -> None:
    Path(path).write_text(yaml.safe_dump(sc.to_dict(), sort_keys=False))


def _check_files(sc: Scenario):
    p = sc.process
    paths = list((p.get("materials") or {}).values())
    paths += list(p.get("profiles") or [])
    if (p.get("pump_shape") or {}).get("path"):
        paths.append(p["pump_shape"]["path"])
    for f in paths:
        if not sc.resolve(f).exists():
            raise ConfigError(f"scenario {sc.name}: referenced file {f} does not exist")


# --------------------------------------------------------------------------
# Scenario -> ProcessSpec
# --------------------------------------------------------------------------

def _models(sc: Scenario, temperature: float) -> dict:
    mats = sc.process.get("materials") or {}
    out = {}
    for axis in Axis:
        key = next((k for k in mats if disp._as_enum(Axis, k) is axis), None)
        out[axis] = (disp.load_material(sc.resolve(mats[key]), temperature) if key
                     else disp.congruent_ln(axis, temperature))
    return out


def gvm_pump_wavelength(sc: Scenario) -> float:
    p = sc.process
    temperature = float(p.get("temperature_k", disp.DEFAULT_TEMPERATURE))
    by_axis = _models(sc, temperature)
    # for DFG the pump is matched to the output (the broadband partner of the pump)
    flav = disp._as_enum(disp.Flavor, p.get("flavor", "SFG"))
    ref = p["input"] if flav is disp.Flavor.SFG else p["output"]
    ref_wave = WaveSpec(float(ref["wavelength_nm"]) * 1e-9, ref.get("axis", "o"),
                        Role.INPUT if flav is disp.Flavor.SFG else Role.OUTPUT)
    lo, hi = p.get("gvm_window_nm", GVM_WINDOW_NM)
    return disp.find_gvm_pump(ref_wave, p["pump"].get("axis", "e"), by_axis, (lo * 1e-9, hi * 1e-9))


def build_spec(sc: Scenario) -> jsamod.ProcessSpec:
    """ProcessSpec from a scenario's ``process`` mapping (all values in the units named by the keys)."""
    p = sc.process
    try:
        flavor = disp._as_enum(disp.Flavor, p.get("flavor", "SFG"))
        temperature = float(p.get("temperature_k", disp.DEFAULT_TEMPERATURE))
        by_axis = _models(sc, temperature)
        lam_p = p["pump"].get("wavelength_nm", "auto")
        lam_p = gvm_pump_wavelength(sc) if lam_p == "auto" else float(lam_p) * 1e-9
        pump = WaveSpec(lam_p, p["pump"].get("axis", "e"), Role.PUMP)
        inp = p["input"]
        if inp.get("wavelength_nm", "auto") == "auto":
            # DFG input fixed by energy conservation with a given output
            lam_out = float(p["output"]["wavelength_nm"]) * 1e-9
            lam_in = 1 / (1 / lam_out + 1 / lam_p) if flavor is disp.Flavor.DFG else None
            if lam_in is None:
                raise ConfigError("input wavelength 'auto' is only defined for DFG")
        else:
            lam_in = float(inp["wavelength_nm"]) * 1e-9
        inp_w = WaveSpec(lam_in, inp.get("axis", "o"), Role.INPUT)
        out_axis = (p.get("output") or {}).get("axis", inp_w.polarization_axis)
        lam_out = disp.output_wavelength(flavor, lam_in, lam_p)
        out_w = WaveSpec(lam_out, out_axis, Role.OUTPUT)
        models = {w.role: by_axis[w.polarization_axis] for w in (pump, inp_w, out_w)}
        shape = p.get("pump_shape") or {}
        pump_shape = jsamod.PumpShape(int(shape.get("order", 0)), float(shape.get("fwhm_fs", 300)) * 1e-15,
                                      str(sc.resolve(shape["path"])) if shape.get("path") else None)
        poling = p.get("poling_period_um", "auto")
        profiles = None
        if p.get("profiles"):
            profiles = tuple(read_profile(sc.resolve(f)) for f in p["profiles"])
        idx = p.get("effective_indices")
        return jsamod.ProcessSpec(
            flavor, pump, inp_w, out_w, models,
            length=float(p.get("length_mm", 10)) * 1e-3,
            temperature=temperature,
            poling_period="auto" if poling == "auto" else float(poling) * 1e-6,
            d_eff=float(p.get("d_eff_pm_per_v", jsamod.DEFAULT_D_EFF * 1e12)) * 1e-12,
            a_eff=None if p.get("a_eff_um2", 64) is None else float(p.get("a_eff_um2", 64)) * 1e-12,
            profiles=profiles, pump_shape=pump_shape,
            pump_peak_power=float(p.get("pump_peak_power_w", 22)),
            rep_rate=float(p.get("rep_rate_hz", 76e6)),
            input_duration=float(p.get("input_duration_fs", 300)) * 1e-15,
            effective_indices=tuple(float(x) for x in idx) if idx else None,
            calibration=float(p.get("calibration", 1.0)))
    except KeyError as exc:
        raise ConfigError(f"scenario {sc.name}: process is missing key {exc}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, PulseGateError):
            raise
        raise ConfigError(f"scenario {sc.name}: bad process value ({exc})") from None


# --------------------------------------------------------------------------
# Presets
# --------------------------------------------------------------------------

def _engineered(**overrides) -> dict:
    proc = {"flavor": "SFG", "pump": {"wavelength_nm": "auto", "axis": "e"},
            "input": {"wavelength_nm": 1550.0, "axis": "o"}, "output": {"axis": "o"},
            "length_mm": 10.0, "temperature_k": disp.DEFAULT_TEMPERATURE, "poling_period_um": "auto",
            "a_eff_um2": 64.0, "pump_shape": {"order": 0, "fwhm_fs": 300.0},
            "pump_peak_power_w": 22.0, "rep_rate_hz": 76e6, "input_duration_fs": 300.0,
            "calibration": 1.0}
    proc.update(overrides)
    return proc


def _qps(order: int = 1) -> dict:
    return _engineered(flavor="DFG", input={"wavelength_nm": "auto", "axis": "o"},
                       output={"wavelength_nm": 1550.0, "axis": "o"},
                       pump_shape={"order": order, "fwhm_fs": 300.0})


def preset(name: str) -> Scenario:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {list(PRESETS)}")
    grid = {"count": 512, "span": 6.0, "form": "sinc"}
    out = f"out/{name}"
    if name == "fig3a":
        # pump off the group-velocity-matched wavelength: tilted phasematching, correlated JSA
        return Scenario(name, _engineered(pump={"wavelength_nm": 1064.0, "axis": "e"}), grid,
                        ["jsa", "schmidt", "efficiency_sweep"], {}, out)
    if name == "fig3b":
        return Scenario(name, _engineered(), grid, ["jsa", "schmidt", "efficiency_sweep"], {}, out)
    if name == "fig4_qpg":
        return Scenario(name, _engineered(pump_shape={"order": 1, "fwhm_fs": 300.0}), grid,
                        ["jsa", "schmidt"], {}, out)
    if name == "fig4_qps":
        return Scenario(name, _qps(1), grid, ["jsa", "schmidt"], {}, out)
    if name in ("fig5_matched", "fig5_mismatched"):
        ratio = 1.0 if name == "fig5_matched" else 2.0
        return Scenario(name, _engineered(), grid, ["schmidt", "modematch"],
                        {"modematch": {"duration_ratio": ratio, "orders": [0, 1, 2, 3],
                                       "sweep_ratios": [0.5, 0.75, 1.0, 1.5, 2.0, 3.0]}}, out)
    if name == "fig6_gvm":
        return Scenario(name, _engineered(), grid, ["gvm_sweep"],
                        {"gvm_sweep": {"range_nm": [500.0, 1700.0], "points": 121}}, out)
    if name == "perf_section":
        proc = _engineered(pump={"wavelength_nm": 870.0, "axis": "e"},
                           effective_indices=[2.18, 2.21, 2.32])
        return Scenario(name, proc, grid, ["design", "efficiency_sweep"], {}, out)
    return Scenario(name, _engineered(), grid, ["rigorous"],
                    {"rigorous": {"count": timeorder.DEFAULT_TIMEORDER_COUNT,
                                  "span": timeorder.DEFAULT_TIMEORDER_SPAN,
                                  "slices": timeorder.DEFAULT_SLICES, "scale_range": [0.5, 8.0]}}, out)


def shipped(name: str) -> Scenario:
    return load_scenario(SHIPPED / f"{name}.yaml")


# --------------------------------------------------------------------------
# Runner
# --------------------------------------------------------------------------

class AnalysisError(PulseGateError):
    """A module failure wrapped with the analysis and operation that raised it."""

    def __init__(self, module: str, operation: str, parameter: str, cause: Exception):
        super().__init__(f"{module}.{operation} failed ({parameter}): {type(cause).__name__}: {cause}")
        self.module, self.operation, self.parameter, self.cause = module, operation, parameter, cause


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n"


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, Path):
        return str(x)
    return str(x)


class _Run:
    def __init__(self, sc: Scenario, out: Path):
        self.sc = sc
        self.out = out
        self.files: list[Path] = []
        self._cache: dict = {}

    def write_json(self, name, obj):
        p = self.out / name
        p.write_text(_dump(obj))
        self.files.append(p)

    def add(self, paths):
        self.files.extend(paths if isinstance(paths, list) else [paths])

    def step(self, module, operation, parameter, fn, *args, **kw):
        try:
            return fn(*args, **kw)
        except AnalysisError:
            raise
        except PulseGateError as exc:
            raise AnalysisError(module, operation, parameter, exc) from exc

    @property
    def spec(self):
        if "spec" not in self._cache:
            self._cache["spec"] = self.step("jsa", "ProcessSpec", "process", build_spec, self.sc)
        return self._cache["spec"]

    @property
    def jsa(self):
        if "jsa" not in self._cache:
            g = self.sc.grid
            grids = self.step("jsa", "default_grids", f"grid.count={g['count']}", jsamod.default_grids,
                              self.spec, int(g["count"]), float(g.get("span", 6.0)))
            self._cache["jsa"] = self.step("jsa", "build_jsa", f"grid.form={g.get('form', 'sinc')}",
                                           jsamod.build_jsa, self.spec, grids, g.get("form", "sinc"))
        return self._cache["jsa"]

    @property
    def schmidt(self):
        if "schmidt" not in self._cache:
            self._cache["schmidt"] = self.step("schmidt", "schmidt_decompose", "max_modes=16",
                                               schmidt.schmidt_decompose, self.jsa)
        return self._cache["schmidt"]


def _design(run: _Run):
    spec = run.spec
    sc = run.sc
    p_req = conversion.required_pump_power(spec, run.jsa.normalization)
    kp, ki, ko = spec.inverse_group_velocities()
    lam = {r: getattr(spec, r).center_wavelength for r in ("pump", "input", "output")}
    d = {
        "scenario": sc.name,
        "flavor": spec.flavor.value,
        "pump_wavelength_nm": lam["pump"] * 1e9,
        "pump_wavelength_source": "gvm" if sc.process["pump"].get("wavelength_nm", "auto") == "auto" else "given",
        "input_wavelength_nm": lam["input"] * 1e9,
        "output_wavelength_nm": lam["output"] * 1e9,
        "group_index": {"pump": kp * 299792458.0, "input": ki * 299792458.0, "output": ko * 299792458.0},
        "poling_period_um": abs(spec.poling()) * 1e6,
        "poling_sign": int(math.copysign(1, spec.poling())),
        "poling_period_from_indices_um": _index_poling(spec),
        "indices": dict(zip(("pump", "input", "output"), spec.indices())),
        "d_eff_pm_per_v": spec.d_eff * 1e12,
        "calibration": spec.calibration,
        "a_eff_um2": spec.interaction_area() * 1e12,
        "normalization_N": run.jsa.normalization,
        "required_peak_power_w": p_req,
        "average_power_w": conversion.average_power(p_req, spec.pump_shape.fwhm_duration, spec.rep_rate),
        "theta_at_configured_power": conversion.coupling_theta(spec, run.jsa.normalization),
    }
    run.write_json("design.json", d)


def _index_poling(spec):
    """Period implied by the quoted effective indices, or None without them."""
    if spec.effective_indices is None:
        return None
    betas = [2 * math.pi * n / w.center_wavelength
             for n, w in zip(spec.effective_indices, (spec.pump, spec.input, spec.output))]
    return disp.poling_period(spec.flavor, *betas).period * 1e6


def _jsa(run: _Run):
    p = run.out / "jsa.txt"
    jsamod.write_jsa(run.jsa, p)
    s = run.out / "jsa_summary.json"
    jsamod.write_jsa_summary(run.jsa, s, run.spec)
    run.add([p, s])


def _schmidt(run: _Run):
    run.add(schmidt.export_schmidt(run.schmidt, run.out, n_modes=4))


def _efficiency(run: _Run):
    rep = run.step("conversion", "device_report", "process.pump_peak_power_w", conversion.device_report,
                   run.spec, run.jsa, run.schmidt)
    run.write_json("device_report.json", rep.to_dict())
    rows = conversion.efficiency_sweep(run.schmidt.kappas, np.linspace(0, math.pi, 181))
    p = run.out / "efficiency_sweep.csv"
    conversion.write_efficiency_sweep(rows, p)
    run.add(p)


def _modematch(run: _Run):
    opts = run.sc.options.get("modematch", {})
    ratio = float(opts.get("duration_ratio", 2.0))
    orders = tuple(int(n) for n in opts.get("orders", (0, 1, 2, 3)))
    ratios = [float(r) for r in opts.get("sweep_ratios", [0.5, 0.75, 1.0, 1.5, 2.0, 3.0])]
    spec = run.spec
    g = run.sc.grid
    gi, go = jsamod.default_grids(spec, int(g["count"]), float(g.get("span", 6.0)))
    # the input axis must also hold the widest HG test mode of the sweep
    reach = (4 + math.sqrt(2 * max(orders) + 1)) * spec.pump_shape.sigma * max(ratios + [ratio]) * 1.1
    gi = jsamod.FrequencyGrid.spanning(gi.center, max(gi.half_span(), reach), gi.count)
    j = run.step("jsa", "build_jsa", "options.modematch", jsamod.build_jsa, spec, (gi, go), g.get("form", "sinc"))
    dev = run.step("schmidt", "schmidt_decompose", "max_modes=16", schmidt.schmidt_decompose, j)
    theta = math.pi / 2 / dev.kappas[0]
    phi0 = modematch.device_acceptance(dev)
    w = np.abs(phi0.values) ** 2
    omega0 = float(np.sum(phi0.omega * w) / np.sum(w))
    sigma = modematch.rms_width(phi0) * ratio
    state = run.step("modematch", "hermite_gauss_state", f"options.modematch.duration_ratio={ratio}",
                     modematch.hermite_gauss_state, dev.input_grid, omega0, sigma, orders)
    report = modematch.modematch_report(state, dev, theta)
    run.write_json("modematch.json", {"duration_ratio": ratio, "theta": theta, "modes": report,
                                      "selectivity": modematch.selectivity(state, dev, theta, 0)})
    rows = run.step("modematch", "duration_sweep", "options.modematch.sweep_ratios",
                    modematch.duration_sweep, dev, theta, ratios, orders)
    p = run.out / "modematch_sweep.csv"
    modematch.write_duration_sweep(rows, p)
    run.add(p)


def _rigorous(run: _Run):
    opts = run.sc.options.get("rigorous", {})
    count = int(opts.get("count", timeorder.DEFAULT_TIMEORDER_COUNT))
    span = float(opts.get("span", timeorder.DEFAULT_TIMEORDER_SPAN))
    slices = int(opts.get("slices", timeorder.DEFAULT_SLICES))
    lo, hi = opts.get("scale_range", (0.5, 8.0))
    spec = run.spec
    grids = jsamod.default_grids(spec, count, span=span)
    prop = run.step("timeorder", "Propagator", f"options.rigorous.slices={slices}",
                    timeorder.Propagator, spec, grids, slices)
    scan = run.step("timeorder", "max_efficiency_scan", f"options.rigorous.scale_range=[{lo}, {hi}]",
                    timeorder.max_efficiency_scan, spec, grids, (lo, hi), slices, propagator=prop)
    gf = run.step("timeorder", "propagate", f"pump_scale={scan.best_scale}", prop.propagate, scan.best_scale)
    rig, eff = timeorder.rigorous_schmidt(gf)
    ana = schmidt.schmidt_decompose(prop.jsa)
    fid = timeorder.mode_fidelities(ana, rig, 1)[0]
    half_pi = math.pi / 2
    gf_half = prop.propagate(half_pi)
    rig_half, eff_half = timeorder.rigorous_schmidt(gf_half)
    fid_half = timeorder.mode_fidelities(ana, rig_half, 1)[0]
    p = run.out / "rigorous_curve.csv"
    timeorder.write_efficiency_curve(scan.curve, p)
    run.add(p)
    extra = {
        "grid_count": count, "grid_span": span, "integrator": prop.method,
        "analytic_kappa_sq": [float(k) ** 2 for k in ana.kappas[:4]],
        # uniform poling only realizes sinc phasematching; the Gaussian form is reported analytically
        "analytic_kappa_sq_gauss": [float(k) ** 2 for k in schmidt.schmidt_decompose(
            jsamod.build_jsa(spec, grids, "gauss")).kappas[:4]],
        "rigorous_efficiencies_at_best": [float(e) for e in eff[:4]],
        "fidelity_at_best": {"input": fid[0], "output": fid[1]},
        "efficiency_at_half_pi": float(eff_half[0]),
        "rigorous_efficiencies_at_half_pi": [float(e) for e in eff_half[:4]],
        "fidelity_at_half_pi": {"input": fid_half[0], "output": fid_half[1]},
    }
    p = run.out / "rigorous.json"
    timeorder.write_rigorous_report(p, scan, gf, extra)
    run.add(p)
    for j in range(2):
        for kind, amp in (("phi", rig.input_mode(j)), ("psi", rig.output_mode(j))):
            q = run.out / f"rigorous_{kind}_{j}.txt"
            write_spectral_amplitude(amp, q)
            run.add(q)


def _gvm_sweep(run: _Run):
    opts = run.sc.options.get("gvm_sweep", {})
    lo, hi = opts.get("range_nm", (500.0, 1700.0))
    lam = np.linspace(lo, hi, int(opts.get("points", 121))) * 1e-9
    temperature = float(run.sc.process.get("temperature_k", disp.DEFAULT_TEMPERATURE))
    models = _models(run.sc, temperature)
    omega = 2 * math.pi * 299792458.0 / lam
    vo = disp.group_velocity(models[Axis.ORDINARY], omega)
    ve = disp.group_velocity(models[Axis.EXTRAORDINARY], omega)
    p = run.out / "gvm_sweep.csv"
    with p.open("w") as fh:
        fh.write("# group-velocity-sweep v1\n")
        fh.write("wavelength_nm,v_g_ordinary_m_s,v_g_extraordinary_m_s\n")
        for row in zip(lam * 1e9, vo, ve):
            fh.write(",".join(repr(float(x)) for x in row) + "\n")
    run.add(p)


_DISPATCH = {"design": _design, "jsa": _jsa, "schmidt": _schmidt, "efficiency_sweep": _efficiency,
             "modematch": _modematch, "rigorous": _rigorous, "gvm_sweep": _gvm_sweep}


def _digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def run(sc: Scenario, output_dir=None) -> dict:
    """Execute every requested analysis; returns the manifest (also written as manifest.json)."""
    out = Path(output_dir or sc.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    r = _Run(sc, out)
    for name in sc.analysis:
        _DISPATCH[name](r)
    entries = [{"file": p.relative_to(out).as_posix(), "sha256": _digest(p)} for p in r.files]
    manifest = {"scenario": sc.name, "analysis": list(sc.analysis),
                "files": sorted(entries, key=lambda e: e["file"])}
    (out / "manifest.json").write_text(_dump(manifest))
    return manifest
