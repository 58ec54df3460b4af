"""Command-line front end.

Subcommands map onto the pipeline stages:

  synth      render carrier fringe pairs from an analytic phantom
  demod      recover the unwrapped phase difference from two fringe images
  cwt        sweep the multi-scale transform over a recovered phase map
  render     rasterize any stored field as a heatmap or contour CSV
  pipeline   synth -> demod -> cwt -> render in one deterministic run

Exit codes: 0 success, 2 configuration error (bad keys, bad values,
malformed overrides), 3 I/O error (missing or corrupt files), 4 numeric
failure (degenerate inputs, empty masks, transform residues).

Configuration comes from an optional ``--config FILE`` plus repeatable
``--set key=value`` overrides; every run echoes the fully resolved
configuration next to its outputs.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import config as cfgmod
from .core import ScalarField, field_from_array
from .cwt import DISPLAY_SCALES, WaveletStack, cwt_sweep
from .errors import (
    ConfigError,
    CorruptHeaderError,
    FringescaleError,
    TruncatedPayloadError,
    UnsupportedFormatError,
)
from .fieldio import atomic_write_text, read_field, read_image, write_field
from .render import RenderStyle, write_render
from .synth import make_fringes, make_phase
from .wft import RidgeResult, anchor_far_field, demodulate, relative_phase, unwrap

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_NUMERIC = 4

_IO_ERRORS = (OSError, UnsupportedFormatError, CorruptHeaderError,
              TruncatedPayloadError)


def _load_config(args: argparse.Namespace) -> cfgmod.ResolvedConfig:
    values: dict[str, object] = {}
    if args.config:
        try:
            values.update(cfgmod.parse_config_file(args.config))
        except OSError as e:
            raise ConfigError(f"cannot read config file: {e}")
    for item in args.set or ():
        key, value = cfgmod.parse_override(item)
        values[key] = value
    if args.out is not None:
        values["out.dir"] = args.out
    return cfgmod.resolve(values)


def _ensure_out(rc: cfgmod.ResolvedConfig) -> Path:
    rc.out_dir.mkdir(parents=True, exist_ok=True)
    return rc.out_dir

def _write_echo(rc: cfgmod.ResolvedConfig, out: Path) -> None:
    atomic_write_text(out / "config_echo.txt", cfgmod.echo_text(rc))


def _synth_fields(rc: cfgmod.ResolvedConfig):
    if rc.phantom is None:
        raise ConfigError("synth needs a phantom; input.* files were given")
    truth = make_phase(rc.grid, rc.phantom)
    pair = make_fringes(truth, rc.carrier, rc.noise)
    return truth, pair


def cmd_synth(args: argparse.Namespace) -> int:
    rc = _load_config(args)
    truth, pair = _synth_fields(rc)
    out = _ensure_out(rc)
    write_field(out / "reference.fgrid", pair.reference)
    write_field(out / "deformed.fgrid", pair.deformed)
    write_field(out / "phase_true.fgrid", truth.field)
    _write_echo(rc, out)
    print(f"synth: wrote reference/deformed/phase_true to {out}")
    return EXIT_OK


def _demod_phase(rc: cfgmod.ResolvedConfig, reference: ScalarField,
                 deformed: ScalarField):
    ref_ridge = demodulate(reference, rc.demod)
    dfm_ridge = demodulate(deformed, rc.demod)
    wrapped = relative_phase(dfm_ridge, ref_ridge)
    phase = unwrap(wrapped, quality=dfm_ridge.ridge_amplitude)
    if rc.anchor is not None:
        phase = anchor_far_field(phase, rc.anchor)
    return phase, wrapped


def _read_pair(rc: cfgmod.ResolvedConfig, args: argparse.Namespace):
    ref_path = getattr(args, "reference", None) or rc.input_reference
    dfm_path = getattr(args, "deformed", None) or rc.input_deformed
    if not ref_path or not dfm_path:
        raise ConfigError("demod needs --reference and --deformed images")
    return read_image(ref_path), read_image(dfm_path)


def cmd_demod(args: argparse.Namespace) -> int:
    rc = _load_config(args)
    reference, deformed = _read_pair(rc, args)
    phase, _ = _demod_phase(rc, reference, deformed)
    out = _ensure_out(rc)
    write_field(out / "phase.fgrid", phase.field)
    _write_echo(rc, out)
    print(f"demod: wrote phase.fgrid to {out}")
    return EXIT_OK


def _plane_name(index: int, alpha: float) -> str:
    return f"plane_{index:03d}_alpha{alpha:g}.fgrid"


def _write_stack(out: Path, stack: WaveletStack) -> list[str]:
    names = []
    for i, (alpha, plane) in enumerate(zip(stack.scales, stack.planes)):
        name = _plane_name(i, alpha)
        write_field(out / name, plane)
        names.append(name)
    lines = [f"planes {len(names)}",
             f"normalized {'true' if stack.normalized else 'false'}",
             f"thresholded {'true' if stack.thresholded else 'false'}"]
    lines += [f"{i} {alpha:.17g} {name}"
              for i, (alpha, name) in enumerate(zip(stack.scales, names))]
    atomic_write_text(out / "manifest.txt", "\n".join(lines) + "\n")
    return names


def cmd_cwt(args: argparse.Namespace) -> int:
    rc = _load_config(args)
    phase = read_image(args.phase)
    stack = cwt_sweep(phase, rc.cwt, threshold_mode=rc.threshold_mode)
    out = _ensure_out(rc)
    _write_stack(out, stack)
    _write_echo(rc, out)
    print(f"cwt: wrote {len(stack.planes)} planes + manifest.txt to {out}")
    return EXIT_OK


def cmd_render(args: argparse.Namespace) -> int:
    try:
        style = RenderStyle(kind=args.style, levels=args.levels)
    except ValueError as e:
        raise ConfigError(str(e))
    field = read_image(args.field)
    write_render(Path(args.out_file), field, style)
    print(f"render: wrote {args.out_file}")
    return EXIT_OK


def _display_planes(stack: WaveletStack) -> list[tuple[int, float]]:
    """Pick one plane per display scale (nearest grid scale, deduped)."""
    picks: list[tuple[int, float]] = []
    scales = np.asarray(stack.scales)
    for want in DISPLAY_SCALES:
        i = int(np.argmin(np.abs(scales - want)))
        entry = (i, float(scales[i]))
        if entry not in picks:
            picks.append(entry)
    return picks


def cmd_pipeline(args: argparse.Namespace) -> int:
    rc = _load_config(args)
    out = _ensure_out(rc)

    if rc.phantom is not None:
        truth, pair = _synth_fields(rc)
        write_field(out / "reference.fgrid", pair.reference)
        write_field(out / "deformed.fgrid", pair.deformed)
        write_field(out / "phase_true.fgrid", truth.field)
        reference, deformed = pair.reference, pair.deformed
    else:
        reference = read_image(rc.input_reference)
        deformed = read_image(rc.input_deformed)

    phase, _ = _demod_phase(rc, reference, deformed)
    write_field(out / "phase.fgrid", phase.field)

    stack = cwt_sweep(phase, rc.cwt, threshold_mode=rc.threshold_mode)
    names = _write_stack(out, stack)

    if rc.render_enabled:
        heat = RenderStyle(kind="heatmap")
        cont = RenderStyle(kind="contours", levels=rc.contour_levels)
        write_render(out / "phase.ppm", phase.field, heat)
        write_render(out / "phase_contours.csv", phase.field, cont)
        for i, alpha in _display_planes(stack):
            stem = f"plane_{i:03d}_alpha{alpha:g}"
            write_render(out / f"{stem}.ppm", stack.planes[i], heat)
            write_render(out / f"{stem}_contours.csv", stack.planes[i], cont)

    _write_echo(rc, out)
    print(f"pipeline: wrote phase.fgrid + {len(names)} planes to {out}")
    return EXIT_OK


def _add_config_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="FILE", help="key=value config file")
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override one config key (repeatable)")
    p.add_argument("--out", metavar="DIR", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fringescale",
        description="Carrier fringe synthesis, phase demodulation, and "
                    "multi-scale wavelet analysis.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="synthesize a fringe pair from a phantom")
    _add_config_args(p)
    p.set_defaults(fn=cmd_synth)

    p = sub.add_parser("demod", help="recover phase from a fringe pair")
    _add_config_args(p)
    p.add_argument("--reference", metavar="FILE", help="reference fringe image")
    p.add_argument("--deformed", metavar="FILE", help="deformed fringe image")
    p.set_defaults(fn=cmd_demod)

    p = sub.add_parser("cwt", help="multi-scale sweep over a phase map")
    _add_config_args(p)
    p.add_argument("--phase", metavar="FILE", required=True,
                   help="input field (.fgrid)")
    p.set_defaults(fn=cmd_cwt)

    p = sub.add_parser("render", help="rasterize a stored field")
    p.add_argument("--field", metavar="FILE", required=True,
                   help="input field (.fgrid or .pgm)")
    p.add_argument("--style", choices=("heatmap", "contours"),
                   default="heatmap")
    p.add_argument("--levels", type=int, default=10,
                   help="contour level count")
    p.add_argument("out_file", metavar="OUTPUT")
    p.set_defaults(fn=cmd_render)

    p = sub.add_parser("pipeline", help="synth + demod + cwt + render")
    _add_config_args(p)
    p.set_defaults(fn=cmd_pipeline)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    stage = args.command
    try:
        return args.fn(args)
    except ConfigError as e:
        print(f"fringescale {stage}: config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except _IO_ERRORS as e:
        print(f"fringescale {stage}: i/o error: {e}", file=sys.stderr)
        return EXIT_IO
    except FringescaleError as e:
        print(f"fringescale {stage}: numeric error: {e}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
