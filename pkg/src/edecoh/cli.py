"""Command-line interface.

Subcommands: simulate, models-table, fit, diffractogram, synth-image.
Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .analysis import (
    LineOut,
    build_diffractogram,
    extract_lineouts,
    fit_lineout,
)
from .detimage import load_image
from .errors import ConfigError, DomainError, EdecohError, NumericalError
from .pipeline import ScenarioConfig, load_config, models_table, run_scenario, synth_image


def _base_config(args) -> ScenarioConfig:
    cfg = load_config(args.config) if args.config else ScenarioConfig.default()
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides.setdefault("numerics", {})["seed"] = args.seed
    if getattr(args, "model", None) is not None:
        overrides.setdefault("model", {})["id"] = args.model
    if getattr(args, "format", None) is not None:
        overrides.setdefault("outputs", {})["formats"] = [args.format]
    return cfg.replace(**overrides) if overrides else cfg


def _cmd_simulate(args) -> int:
    cfg = _base_config(args)
    out = Path(args.out)
    result = run_scenario(cfg, out_dir=out)
    if args.dump_trajectories:
        from .pipeline import _prepare_ensemble

        ens, _, _ = _prepare_ensemble(cfg)
        ens.to_csv(out / "trajectories.csv")
    print(f"surface height: {result.surface_height:.6e} m")
    print(f"transmitted fraction: {result.transmitted_fraction:.4f}")
    for curve, path in zip(result.curves, result.artifacts):
        print(f"wrote {path}")
    return 0


def _cmd_models_table(args) -> int:
    cfg = _base_config(args)
    y_list = [float(v) for v in args.y.split(",")]
    dx_list = [float(v) for v in args.dx.split(",")]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "models_table.csv"
    models_table(cfg, y_list, dx_list, out_path=path)
    print(f"wrote {path}")
    return 0


def _read_lineout_csv(path) -> LineOut:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] < 2:
        raise ConfigError("line-out CSV needs columns x_m,counts")
    return LineOut(x=data[:, 0], counts=data[:, 1])


def _cmd_fit(args) -> int:
    cfg = _base_config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    period = cfg.grating.period
    if args.lineout:
        outs = [_read_lineout_csv(args.lineout)]
    else:
        image = load_image(args.image)
        outs = extract_lineouts(image, slant=args.slant, bin_height=args.bin_height)
    results = []
    for i, lo in enumerate(outs):
        fr = fit_lineout(lo, grating_period=period)
        fr.to_json(out / f"fit_{i:03d}.json")
        results.append(fr)
        print(
            f"lineout {i}: d = {fr.params.d:.4e} m, w_fwhm = {fr.w_fwhm:.4e} m, "
            f"L_coh = {fr.l_coh:.4e} m"
        )
    return 0


def _cmd_diffractogram(args) -> int:
    cfg = _base_config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    image = load_image(args.image)
    outs = extract_lineouts(image, slant=args.slant, bin_height=args.bin_height)
    fits = []
    for lo in outs:
        try:
            fits.append(fit_lineout(lo, grating_period=cfg.grating.period))
        except EdecohError:
            fits.append(None)
    dg = build_diffractogram(outs, fits)
    dg.to_csv(out / "diffractogram.csv")
    fmt = getattr(args, "format", None)
    if fmt in (None, "svg"):
        dg.to_svg(out / "diffractogram.svg")
    print(f"wrote {out / 'diffractogram.csv'} ({len(dg.y)} rows)")
    return 0


def _cmd_synth_image(args) -> int:
    cfg = _base_config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    fmt = args.format or "pgm"
    suffix = {"pgm": ".pgm", "pgm-ascii": ".pgm", "csv": ".csv"}.get(fmt)
    if suffix is None:
        raise ConfigError(f"synth-image cannot write format {fmt!r}")
    path = out / f"synth{suffix}"
    synth_image(
        cfg,
        path,
        skew=args.skew,
        noise=args.noise,
        background=args.background,
        fmt=fmt,
    )
    print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="edecoh",
        description="Electron decoherence over surfaces: simulation and analysis",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, needs_out=True):
        p.add_argument("--config", help="scenario config JSON")
        p.add_argument("--seed", type=int, help="override numerics.seed")
        p.add_argument("--model", help="override model id")
        p.add_argument("--format", choices=["csv", "json", "svg", "pgm", "pgm-ascii"])
        if needs_out:
            p.add_argument("--out", default="out", help="output directory")

    p = sub.add_parser("simulate", help="run a scenario and emit the L_coh(Y) curve")
    common(p)
    p.add_argument(
        "--dump-trajectories",
        action="store_true",
        help="also write trajectories.csv (y0_m, absorbed, detector_y_m)",
    )
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("models-table", help="tabulate tau/P and per-pass Gamma")
    common(p)
    p.add_argument("--y", default="1e-6,2e-6,5e-6", help="comma list of heights (m)")
    p.add_argument("--dx", default="1e-7,6e-7", help="comma list of separations (m)")
    p.set_defaults(func=_cmd_models_table)

    p = sub.add_parser("fit", help="fit line-outs from an image or a CSV line-out")
    common(p)
    p.add_argument("--image", help="detector image (PGM/CSV with sidecar)")
    p.add_argument("--lineout", help="CSV with columns x_m,counts")
    p.add_argument("--slant", type=float, default=0.0, help="line-out slant (rad)")
    p.add_argument("--bin-height", type=float, default=4.8e-6)
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("diffractogram", help="image to normalized diffractogram")
    common(p)
    p.add_argument("--image", required=True)
    p.add_argument("--slant", type=float, default=0.0)
    p.add_argument("--bin-height", type=float, default=4.8e-6)
    p.set_defaults(func=_cmd_diffractogram)

    p = sub.add_parser("synth-image", help="render a synthetic detector image")
    common(p)
    p.add_argument("--skew", type=float, default=0.0, help="pattern skew (rad)")
    p.add_argument("--noise", action="store_true", help="add Poisson noise")
    p.add_argument("--background", type=float, default=0.0, help="haze amplitude")
    p.set_defaults(func=_cmd_synth_image)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        if args.command == "fit" and not (args.image or args.lineout):
            raise ConfigError("fit requires --image or --lineout")
        return args.func(args)
    except (ConfigError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4
    except EdecohError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
