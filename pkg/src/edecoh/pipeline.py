"""Scenario orchestration: config ingestion, end-to-end runs, file emission.

A scenario is described by a JSON document (all keys optional, unknown keys
rejected):

    {
      "beam":     {"kinetic_energy_ev": 1670.0, "divergence_x_rad": 61e-6,
                   "divergence_y_rad": 120e-6, "initial_coherence_width_m": null},
      "geometry": {"slit_separation_m": 0.25, "grating_to_surface_m": 3e-3,
                   "surface_length_m": 1e-2, "grating_to_detector_m": 0.24,
                   "detector_bin_width_m": 4.8e-6, "beam_halfheight_m": 50e-6,
                   "surface_enabled": true, "surface_height_m": null,
                   "cut_fraction": 0.3333333333333333},
      "grating":  {"period_m": 1e-7, "open_fraction": 0.5},
      "material": {"resistivity_ohm_m": 0.1, "temperature_k": 300.0,
                   "fermi_wavevector_per_m": null, "label": ""},
      "model":    {"id": "none", "buhmann_variant": "regularized",
                   "howie_eta_mode": "y_over_4dx"},
      "numerics": {...},   # see DEFAULT_CONFIG
      "outputs":  {"formats": ["csv"]}
    }

``material.resistivity_ohm_m`` may be a two-element [min, max] band; the
scenario is then run at both ends, mirroring shaded uncertainty regions.
Runs are deterministic for a fixed (config, seed): byte-identical CSVs.
"""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import FitParams, LineOut, fit_lineout
from .coherence import (
    CoherenceNumerics,
    GratingSpec,
    pattern_for_height,
)
from .detimage import DetectorImage, save_image
from .errors import ConfigError, DomainError
from .models import BeamSpec, MaterialSpec, ModelId
from .trajectory import (
    NO_SURFACE_HEIGHT,
    GeometrySpec,
    find_cut_height,
    propagate_ensemble,
    sample_initial_conditions,
)

__all__ = [
    "DEFAULT_CONFIG",
    "ScenarioConfig",
    "CoherenceCurve",
    "ScenarioResult",
    "load_config",
    "run_scenario",
    "models_table",
    "synth_image",
]

CURVE_HEADER = "Y_m,L_coh_m,w_fwhm_m,d_m,gamma_ref"

DEFAULT_CONFIG: dict = {
    "beam": {
        "kinetic_energy_ev": 1670.0,
        "divergence_x_rad": 61e-6,
        "divergence_y_rad": 120e-6,
        "initial_coherence_width_m": None,
    },
    "geometry": {
        "slit_separation_m": 0.25,
        "grating_to_surface_m": 3e-3,
        "surface_length_m": 1e-2,
        "grating_to_detector_m": 0.24,
        "detector_bin_width_m": 4.8e-6,
        "beam_halfheight_m": 50e-6,
        "surface_enabled": True,
        "surface_height_m": None,   # None: bisect for cut_fraction
        "cut_fraction": 1.0 / 3.0,
    },
    "grating": {"period_m": 100e-9, "open_fraction": 0.5},
    "material": {
        "resistivity_ohm_m": 0.1,
        "temperature_k": 300.0,
        "fermi_wavevector_per_m": None,
        "label": "",
    },
    "model": {
        "id": "none",
        "buhmann_variant": "regularized",
        "howie_eta_mode": "y_over_4dx",
    },
    "numerics": {
        "seed": 12345,
        "n_trajectories": 2000,
        "integrator_steps": 10000,
        "trajectory_store": 500,
        "cut_search_steps": 2000,
        "rho_span_m": 12e-6,
        "rho_resolution": 512,
        "psi_span_m": 16e-6,
        "psi_resolution": 32768,
        "n_pure_states": 64,
        "beam_width_m": 3e-6,
        "camera_length_m": 0.24,
        "bin_gamma_mode": "mean_gamma",
        "sigma_pure_floor_m": 16e-9,
        "y_bins": 21,
        "y_min_m": 0.0,
        "y_max_m": 20e-6,
        "reference_dx_m": 600e-9,
        "fit_orders": 4,
        "fix_d": False,
    },
    "outputs": {"formats": ["csv"]},
}


def _merge_validate(defaults: dict, given: dict, path: str = "") -> dict:
    out = copy.deepcopy(defaults)
    for key, val in given.items():
        if key not in defaults:
            raise ConfigError(f"unknown config key {path + key!r}")
        if isinstance(defaults[key], dict) and isinstance(val, dict):
            out[key] = _merge_validate(defaults[key], val, path + key + ".")
        else:
            out[key] = copy.deepcopy(val)
    return out


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated scenario description; ``raw`` is the fully resolved dict."""

    raw: dict

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioConfig":
        return cls(raw=_merge_validate(DEFAULT_CONFIG, d))

    @classmethod
    def default(cls) -> "ScenarioConfig":
        return cls(raw=copy.deepcopy(DEFAULT_CONFIG))

    def replace(self, **sections) -> "ScenarioConfig":
        return ScenarioConfig.from_dict(_merge_validate(self.raw, sections))

    # -- typed views -------------------------------------------------------

    @property
    def beam(self) -> BeamSpec:
        b = self.raw["beam"]
        return BeamSpec(
            kinetic_energy=float(b["kinetic_energy_ev"]),
            divergence_x=float(b["divergence_x_rad"]),
            divergence_y=float(b["divergence_y_rad"]),
            initial_coherence_width=(
                None
                if b["initial_coherence_width_m"] is None
                else float(b["initial_coherence_width_m"])
            ),
        )

    @property
    def geometry(self) -> GeometrySpec:
        g = self.raw["geometry"]
        return GeometrySpec(
            slit_separation=float(g["slit_separation_m"]),
            grating_to_surface=float(g["grating_to_surface_m"]),
            surface_length=float(g["surface_length_m"]),
            grating_to_detector=float(g["grating_to_detector_m"]),
            detector_bin_width=float(g["detector_bin_width_m"]),
            beam_halfheight=float(g["beam_halfheight_m"]),
        )

    @property
    def grating(self) -> GratingSpec:
        g = self.raw["grating"]
        return GratingSpec(
            period=float(g["period_m"]), open_fraction=float(g["open_fraction"])
        )

    def materials(self) -> list[MaterialSpec]:
        m = self.raw["material"]
        rho = m["resistivity_ohm_m"]
        kf = m["fermi_wavevector_per_m"]
        base = dict(
            temperature=float(m["temperature_k"]),
            fermi_wavevector=None if kf is None else float(kf),
        )
        label = m["label"]
        if isinstance(rho, (list, tuple)):
            if len(rho) != 2 or not all(isinstance(v, (int, float)) for v in rho):
                raise ConfigError("resistivity band must be [min, max]")
            lo, hi = sorted(float(v) for v in rho)
            return [
                MaterialSpec(resistivity=lo, label=f"{label or 'band'} rho_min", **base),
                MaterialSpec(resistivity=hi, label=f"{label or 'band'} rho_max", **base),
            ]
        return [MaterialSpec(resistivity=float(rho), label=label, **base)]

    @property
    def model(self) -> ModelId:
        return ModelId.parse(self.raw["model"]["id"])

    @property
    def numerics(self) -> CoherenceNumerics:
        n = self.raw["numerics"]
        return CoherenceNumerics(
            rho_span=float(n["rho_span_m"]),
            rho_resolution=int(n["rho_resolution"]),
            psi_span=float(n["psi_span_m"]),
            psi_resolution=int(n["psi_resolution"]),
            n_pure_states=int(n["n_pure_states"]),
            beam_width=float(n["beam_width_m"]),
            camera_length=float(n["camera_length_m"]),
            bin_gamma_mode=str(n["bin_gamma_mode"]),
            sigma_pure_floor=float(n["sigma_pure_floor_m"]),
        )

    @property
    def seed(self) -> int:
        return int(self.raw["numerics"]["seed"])

    def sha256(self) -> str:
        blob = json.dumps(self.raw, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


def load_config(path) -> ScenarioConfig:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    return ScenarioConfig.from_dict(data)


# --------------------------------------------------------------------------
# Results
# --------------------------------------------------------------------------

@dataclass
class CoherenceCurve:
    """L_coh and fit quantities versus detector height above the surface."""

    y: np.ndarray
    l_coh: np.ndarray
    w_fwhm: np.ndarray
    d: np.ndarray
    gamma_ref: np.ndarray
    model: str
    material_label: str

    def to_csv(self, path) -> None:
        with open(path, "w", newline="\n") as fh:
            fh.write(CURVE_HEADER + "\n")
            for row in zip(self.y, self.l_coh, self.w_fwhm, self.d, self.gamma_ref):
                fh.write(",".join(f"{v:.12e}" for v in row) + "\n")


@dataclass
class ScenarioResult:
    curves: list
    config: ScenarioConfig
    surface_height: float
    transmitted_fraction: float
    artifacts: list = field(default_factory=list)


# --------------------------------------------------------------------------
# Scenario execution
# --------------------------------------------------------------------------

def _prepare_ensemble(cfg: ScenarioConfig):
    beam = cfg.beam
    geom = cfg.geometry
    g = cfg.raw["geometry"]
    n = cfg.raw["numerics"]
    surface_enabled = bool(g["surface_enabled"])
    if not surface_enabled:
        height = NO_SURFACE_HEIGHT
    elif g["surface_height_m"] is not None:
        height = float(g["surface_height_m"])
    else:
        height = find_cut_height(
            beam,
            geom,
            target_fraction=float(g["cut_fraction"]),
            n=int(n["n_trajectories"]),
            seed=cfg.seed,
            n_steps=int(n["cut_search_steps"]),
        )
    conds = sample_initial_conditions(beam, geom, int(n["n_trajectories"]), cfg.seed)
    ens = propagate_ensemble(
        conds,
        geom.with_surface_height(height),
        beam,
        image_charge=True,
        n_steps=int(n["integrator_steps"]),
        n_store=int(n["trajectory_store"]),
    )
    # Detector-height bins are measured from the surface plane; with the
    # plate parked out of the beam they stay anchored at its nominal level.
    bin_reference = height if surface_enabled else 0.0
    return ens, height, bin_reference


def _fit_init_from_geometry(cfg: ScenarioConfig, x: np.ndarray) -> FitParams:
    beam = cfg.beam
    num = cfg.numerics
    grating = cfg.grating
    d = beam.wavelength * num.camera_length / grating.period
    slit = grating.period * grating.open_fraction
    alpha = np.pi * slit / (beam.wavelength * num.camera_length)
    sigma_x = beam.wavelength * num.camera_length / (
        2.0 * np.pi * (beam.coherence_width / 2.3548)
    )
    c1 = max(sigma_x, 2.0 * float(np.median(np.diff(x))))
    return FitParams(
        amplitude=1000.0,
        alpha=alpha,
        x0=0.0,
        x1=0.0,
        d=d,
        a1=0.7,
        c1=c1,
        c2=2.0 * c1,
        bckd_amplitude=1e-9,
        x2=0.0,
        c3=float(x[-1] - x[0]) / 3.0,
        n_max=int(cfg.raw["numerics"]["fit_orders"]),
    )


def _pattern_to_lineout(pattern, cfg: ScenarioConfig, y_center: float) -> LineOut:
    n_max = int(cfg.raw["numerics"]["fit_orders"])
    d = cfg.beam.wavelength * cfg.numerics.camera_length / cfg.grating.period
    window = (n_max + 0.75) * d
    m = np.abs(pattern.x) <= window
    counts = pattern.intensity[m]
    top = counts.max()
    scale = 1000.0 / top if top > 0 else 1.0
    return LineOut(x=pattern.x[m], counts=counts * scale, y_position=y_center)


def run_scenario(cfg: ScenarioConfig, out_dir=None) -> ScenarioResult:
    """Full pipeline: trajectories, per-bin patterns, fits, curve, files.

    With a resistivity band, one curve per band edge is produced.  Output
    files (when ``out_dir`` is given): ``curve_<label>.csv`` per curve, a
    ``manifest.json`` echoing the resolved config, and optionally
    ``curve.svg``.
    """
    ens, height, bin_ref = _prepare_ensemble(cfg)
    num = cfg.numerics
    ncfg = cfg.raw["numerics"]
    beam = cfg.beam
    grating = cfg.grating
    model = cfg.model
    edges = np.linspace(
        float(ncfg["y_min_m"]), float(ncfg["y_max_m"]), int(ncfg["y_bins"]) + 1
    )
    curves = []
    for mat in cfg.materials() if model is not ModelId.NONE else [None]:
        rows = []
        init_cache = None
        for b in range(len(edges) - 1):
            pattern = pattern_for_height(
                (float(edges[b]), float(edges[b + 1])),
                ens,
                model,
                mat,
                beam,
                grating,
                num,
                reference_dx=float(ncfg["reference_dx_m"]),
                buhmann_variant=cfg.raw["model"]["buhmann_variant"],
                howie_eta_mode=cfg.raw["model"]["howie_eta_mode"],
                surface_reference=bin_ref,
            )
            if pattern is None:
                continue
            y_center = 0.5 * (float(edges[b]) + float(edges[b + 1]))
            lineout = _pattern_to_lineout(pattern, cfg, y_center)
            if init_cache is None:
                init_cache = _fit_init_from_geometry(cfg, lineout.x)
            fr = fit_lineout(
                lineout,
                init=init_cache,
                grating_period=grating.period,
                fix_d=bool(ncfg["fix_d"]),
            )
            rows.append(
                (y_center, fr.l_coh, fr.w_fwhm, fr.params.d, pattern.mean_gamma_ref)
            )
        if not rows:
            raise DomainError("no detector-height bin contained trajectories")
        arr = np.asarray(rows)
        curves.append(
            CoherenceCurve(
                y=arr[:, 0],
                l_coh=arr[:, 1],
                w_fwhm=arr[:, 2],
                d=arr[:, 3],
                gamma_ref=arr[:, 4],
                model=model.value,
                material_label=(mat.label if mat else "vacuum"),
            )
        )

    result = ScenarioResult(
        curves=curves,
        config=cfg,
        surface_height=height,
        transmitted_fraction=ens.transmitted_fraction,
    )
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for i, curve in enumerate(curves):
            suffix = f"_{i}" if len(curves) > 1 else ""
            path = out / f"curve{suffix}.csv"
            curve.to_csv(path)
            result.artifacts.append(str(path))
        manifest = {
            "config": cfg.raw,
            "config_sha256": cfg.sha256(),
            "seed": cfg.seed,
            "package_version": __version__,
            "surface_height_m": height,
            "transmitted_fraction": ens.transmitted_fraction,
            "curve_columns": CURVE_HEADER.split(","),
        }
        mpath = out / "manifest.json"
        with open(mpath, "w", newline="\n") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
        result.artifacts.append(str(mpath))
        if "svg" in cfg.raw["outputs"]["formats"]:
            from .svgout import line_plot_svg

            spath = out / "curve.svg"
            line_plot_svg(
                spath,
                curves[0].y,
                {c.material_label or c.model: c.l_coh for c in curves},
                title=f"L_coh(Y), model={model.value}",
                xlabel="Y above surface (m)",
                ylabel="L_coh (m)",
            )
            result.artifacts.append(str(spath))
    return result


# --------------------------------------------------------------------------
# Model inspection table
# --------------------------------------------------------------------------

def models_table(cfg: ScenarioConfig, y_list, dx_list, out_path=None):
    """Tabulate tau (or P) and the per-pass Gamma for every model.

    The per-pass Gamma assumes constant height over the full surface
    length.  Cells whose model cannot be evaluated (missing Fermi
    wave-vector, domain error) carry the error text instead of numbers.
    Returns the rows; optionally writes CSV.
    """
    from .models import (
        howie_probability,
        tau_buhmann,
        tau_machnikowski,
        tau_zurek,
    )

    beam = cfg.beam
    geom = cfg.geometry
    mat = cfg.materials()[0]
    t_pass = geom.surface_length / beam.speed
    rows = []
    header = ["model", "y_m", "dx_m", "tau_s_or_P", "gamma_per_pass"]
    for y in y_list:
        for dx in dx_list:
            for model in ModelId:
                try:
                    if model is ModelId.NONE:
                        tau, gamma = float("inf"), 0.0
                    elif model is ModelId.ZUREK:
                        tau = tau_zurek(y, dx, mat)
                        gamma = t_pass / tau
                    elif model is ModelId.BUHMANN:
                        tau = tau_buhmann(
                            y, dx, mat, variant=cfg.raw["model"]["buhmann_variant"]
                        )
                        gamma = t_pass / tau
                    elif model is ModelId.HOWIE:
                        tau = howie_probability(
                            y,
                            dx,
                            geom.surface_length,
                            mat,
                            beam,
                            eta_mode=cfg.raw["model"]["howie_eta_mode"],
                        )
                        gamma = tau  # P is already the per-pass exponent
                    else:
                        tau = tau_machnikowski(y, dx, mat)
                        gamma = t_pass / tau
                    rows.append([model.value, y, dx, tau, gamma])
                except Exception as exc:  # noqa: BLE001 - reported per cell
                    rows.append([model.value, y, dx, f"error: {exc}", ""])
    if out_path is not None:
        with open(out_path, "w", newline="\n") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(
                    ",".join(
                        f"{v:.12e}" if isinstance(v, float) else str(v) for v in row
                    )
                    + "\n"
                )
    return header, rows


# --------------------------------------------------------------------------
# Synthetic detector images
# --------------------------------------------------------------------------

def synth_image(
    cfg: ScenarioConfig,
    out_path,
    skew: float = 0.0,
    noise: bool = False,
    peak_counts: float = 4000.0,
    background: float = 0.0,
    pixel_size_x: float = 2.4e-6,
    pixel_size_y: float = 4.8e-6,
    n_rows: int = 64,
    fmt: str = "pgm",
) -> DetectorImage:
    """Render simulated per-height patterns into a detector image.

    Each image row takes the far-field pattern of its height bin, shifted
    by ``tan(skew) * (y_row - y_mid)`` to emulate detector skew, scaled to
    ``peak_counts``, with optional Gaussian background haze and Poisson
    noise (seeded by the config seed; fixed seed gives bit-identical
    files).
    """
    ens, height, bin_ref = _prepare_ensemble(cfg)
    ncfg = cfg.raw["numerics"]
    model = cfg.model
    mats = cfg.materials() if model is not ModelId.NONE else [None]
    mat = mats[0]
    edges = np.linspace(
        float(ncfg["y_min_m"]), float(ncfg["y_max_m"]), int(ncfg["y_bins"]) + 1
    )
    centers = 0.5 * (edges[:-1] + edges[1:])
    patterns = []
    for b in range(len(edges) - 1):
        patterns.append(
            pattern_for_height(
                (float(edges[b]), float(edges[b + 1])),
                ens,
                model,
                mat,
                cfg.beam,
                cfg.grating,
                cfg.numerics,
                reference_dx=float(ncfg["reference_dx_m"]),
                buhmann_variant=cfg.raw["model"]["buhmann_variant"],
                howie_eta_mode=cfg.raw["model"]["howie_eta_mode"],
                surface_reference=bin_ref,
            )
        )
    d = cfg.beam.wavelength * cfg.numerics.camera_length / cfg.grating.period
    half_span = (int(ncfg["fit_orders"]) + 1.5) * d
    nx = int(2 * half_span / pixel_size_x)
    x = (np.arange(nx) - nx / 2 + 0.5) * pixel_size_x
    ys = np.arange(n_rows) * pixel_size_y
    y_mid = float(np.mean(ys))
    img = np.zeros((n_rows, nx))
    rng = np.random.default_rng(cfg.seed)
    for r in range(n_rows):
        frac = ys[r] / max(ys[-1], pixel_size_y)
        b = min(int(frac * len(centers)), len(centers) - 1)
        pat = patterns[b]
        if pat is None:
            continue
        shift = np.tan(skew) * (ys[r] - y_mid)
        profile = np.interp(x - shift, pat.x, pat.intensity, left=0.0, right=0.0)
        top = profile.max()
        if top > 0:
            profile = profile / top * peak_counts
        if background > 0:
            profile = profile + background * np.exp(
                -(x**2) / (2.0 * (half_span / 2.0) ** 2)
            )
        img[r] = profile
    if noise:
        img = rng.poisson(np.maximum(img, 0.0)).astype(float)
    out = DetectorImage(
        counts=img,
        pixel_size_x=pixel_size_x,
        pixel_size_y=pixel_size_y,
        x0=float(x[0]),
        y0=0.0,
    )
    save_image(out_path, out, fmt=fmt)
    return out
