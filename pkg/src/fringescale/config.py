"""Run configuration: key=value text with full-default materialization.

A config file holds one ``key = value`` pair per line; ``#`` starts a
comment and blank lines are ignored. Unknown keys are errors, so typos
fail loudly. Every run writes back a fully resolved echo in the same
format with every default materialized (including values derived from
others, like the ridge band around the carrier frequency), which makes
any output directory reproducible from its echo alone.

The noise generator is pinned: ``noise.rng`` only accepts philox4x64
(numpy's counter-based Philox bit generator) and is echoed so output
provenance records the algorithm.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .core import CarrierSpec, GridSpec
from .cwt import CwtParams, default_scale_grid
from .errors import ConfigError, FringescaleError
from .synth import NoiseSpec, PhantomSpec, RNG_NAME
from .wft import DemodParams


def _parse_bool(s: str) -> bool:
    t = s.strip().lower()
    if t in ("true", "1", "yes", "on"):
        return True
    if t in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _parse_floats(s: str) -> tuple[float, ...]:
    s = s.strip()
    if not s:
        return ()
    return tuple(float(tok) for tok in s.split(","))


_PARSERS = {
    "str": lambda s: s.strip(),
    "int": lambda s: int(s.strip(), 0),
    "float": lambda s: float(s.strip()),
    "bool": _parse_bool,
    "floats": _parse_floats,
}

# key -> (type name, default). None defaults are derived during resolve.
SCHEMA: dict[str, tuple[str, object]] = {
    "run.label": ("str", ""),
    "out.dir": ("str", "out"),
    "grid.width": ("int", 512),
    "grid.height": ("int", 512),
    "phantom.kind": ("str", "gaussian_plume"),
    "phantom.peak": ("float", 2.0),
    "phantom.center_x": ("float", None),
    "phantom.center_y": ("float", None),
    "phantom.sigma_x": ("float", 60.0),
    "phantom.sigma_y": ("float", 60.0),
    "phantom.rib_x0": ("int", 0),
    "phantom.rib_y0": ("int", 0),
    "phantom.rib_w": ("int", 0),
    "phantom.rib_h": ("int", 0),
    "phantom.file": ("str", ""),
    "input.reference": ("str", ""),
    "input.deformed": ("str", ""),
    "carrier.fx": ("float", 0.125),
    "carrier.amplitude": ("float", 1.0),
    "noise.sigma": ("float", 0.0),
    "noise.seed": ("int", 12345),
    "noise.rng": ("str", RNG_NAME),
    "demod.window_sigma": ("float", 10.0),
    "demod.band_x_lo": ("float", None),
    "demod.band_x_hi": ("float", None),
    "demod.band_y_lo": ("float", -0.1),
    "demod.band_y_hi": ("float", 0.1),
    "demod.step": ("float", 0.005),
    "demod.anchor_x0": ("int", -1),
    "demod.anchor_y0": ("int", -1),
    "demod.anchor_w": ("int", 0),
    "demod.anchor_h": ("int", 0),
    "cwt.scales": ("floats", ()),
    "cwt.scale_min": ("float", 1.0),
    "cwt.scale_max": ("float", 100.0),
    "cwt.scale_count": ("int", 0),
    "cwt.threshold_fraction": ("float", 0.01),
    "cwt.threshold_mode": ("str", "small"),
    "cwt.normalize": ("bool", True),
    "cwt.pad": ("bool", True),
    "render.enabled": ("bool", True),
    "render.contour_levels": ("int", 10),
}


def parse_config_text(text: str, source: str = "<config>") -> dict[str, object]:
    """Parse key=value lines into a typed dict; unknown keys are errors."""
    out: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in SCHEMA:
            raise ConfigError(f"{source}:{lineno}: unknown config key {key!r}")
        type_name, _ = SCHEMA[key]
        try:
            out[key] = _PARSERS[type_name](value)
        except ValueError as e:
            raise ConfigError(f"{source}:{lineno}: bad value for {key}: {e}")
    return out


def parse_config_file(path: str | Path) -> dict[str, object]:
    return parse_config_text(Path(path).read_text(), source=str(path))


def parse_override(item: str) -> tuple[str, object]:
    """Parse one command-line ``key=value`` override."""
    if "=" not in item:
        raise ConfigError(f"override must look like key=value, got {item!r}")
    key, _, value = item.partition("=")
    key = key.strip()
    if key not in SCHEMA:
        raise ConfigError(f"unknown config key {key!r}")
    type_name, _ = SCHEMA[key]
    try:
        return key, _PARSERS[type_name](value)
    except ValueError as e:
        raise ConfigError(f"bad value for {key}: {e}")


@dataclass(frozen=True)
class ResolvedConfig:
    """Fully materialized run parameters ready for the pipeline stages."""

    label: str
    out_dir: Path
    grid: GridSpec
    phantom: PhantomSpec | None
    input_reference: Path | None
    input_deformed: Path | None
    carrier: CarrierSpec
    noise: NoiseSpec
    demod: DemodParams
    anchor: tuple[int, int, int, int] | None
    cwt: CwtParams
    threshold_mode: str
    render_enabled: bool
    contour_levels: int
    raw: dict[str, object]


def resolve(values: dict[str, object]) -> ResolvedConfig:
    """Merge user values over defaults and build the parameter bundles."""
    for key in values:
        if key not in SCHEMA:
            raise ConfigError(f"unknown config key {key!r}")
    cfg = {key: default for key, (_, default) in SCHEMA.items()}
    cfg.update(values)
    if cfg["noise.rng"] != RNG_NAME:
        raise ConfigError(
            f"noise.rng is pinned to {RNG_NAME!r}, got {cfg['noise.rng']!r}")
    try:
        grid = GridSpec(width=cfg["grid.width"], height=cfg["grid.height"])
        carrier = CarrierSpec(fx=cfg["carrier.fx"], amplitude=cfg["carrier.amplitude"])
        noise = NoiseSpec(sigma=cfg["noise.sigma"], seed=cfg["noise.seed"])

        if cfg["phantom.center_x"] is None:
            cfg["phantom.center_x"] = grid.width / 2.0
        if cfg["phantom.center_y"] is None:
            cfg["phantom.center_y"] = grid.height / 2.0
        kind = cfg["phantom.kind"]
        ref_in = cfg["input.reference"]
        def_in = cfg["input.deformed"]
        if bool(ref_in) != bool(def_in):
            raise ConfigError(
                "input.reference and input.deformed must be given together")
        phantom = None
        if not ref_in:
            phantom = PhantomSpec(
                kind=kind,
                peak=cfg["phantom.peak"],
                center=(cfg["phantom.center_x"], cfg["phantom.center_y"]),
                widths=(cfg["phantom.sigma_x"], cfg["phantom.sigma_y"]),
                rib_rect=(cfg["phantom.rib_x0"], cfg["phantom.rib_y0"],
                          cfg["phantom.rib_w"], cfg["phantom.rib_h"])
                if kind == "rib_step" else None,
                file_path=cfg["phantom.file"] or None,
            )

        if cfg["demod.band_x_lo"] is None:
            cfg["demod.band_x_lo"] = carrier.fx - 0.1
        if cfg["demod.band_x_hi"] is None:
            cfg["demod.band_x_hi"] = carrier.fx + 0.1
        demod = DemodParams(
            band_x=(cfg["demod.band_x_lo"], cfg["demod.band_x_hi"]),
            band_y=(cfg["demod.band_y_lo"], cfg["demod.band_y_hi"]),
            step=cfg["demod.step"],
            window_sigma=cfg["demod.window_sigma"],
        )
        anchor = None
        if cfg["demod.anchor_x0"] >= 0 and cfg["demod.anchor_y0"] >= 0:
            anchor = (cfg["demod.anchor_x0"], cfg["demod.anchor_y0"],
                      cfg["demod.anchor_w"], cfg["demod.anchor_h"])

        if cfg["cwt.scales"]:
            scales = tuple(cfg["cwt.scales"])
        elif cfg["cwt.scale_count"] > 0:
            import numpy as np
            scales = tuple(float(a) for a in np.geomspace(
                cfg["cwt.scale_min"], cfg["cwt.scale_max"], cfg["cwt.scale_count"]))
        else:
            scales = default_scale_grid()
        cfg["cwt.scales"] = scales
        cwt = CwtParams(
            scales=scales,
            threshold_fraction=cfg["cwt.threshold_fraction"],
            normalize=cfg["cwt.normalize"],
            pad=cfg["cwt.pad"],
        )
        if cfg["cwt.threshold_mode"] not in ("small", "near_extrema"):
            raise ConfigError(
                f"cwt.threshold_mode must be small or near_extrema, "
                f"got {cfg['cwt.threshold_mode']!r}")
        if cfg["render.contour_levels"] < 1:
            raise ConfigError("render.contour_levels must be >= 1")
    except ConfigError:
        raise
    except (FringescaleError, ValueError) as e:
        raise ConfigError(str(e))

    return ResolvedConfig(
        label=cfg["run.label"],
        out_dir=Path(cfg["out.dir"]),
        grid=grid,
        phantom=phantom,
        input_reference=Path(ref_in) if ref_in else None,
        input_deformed=Path(def_in) if def_in else None,
        carrier=carrier,
        noise=noise,
        demod=demod,
        anchor=anchor,
        cwt=cwt,
        threshold_mode=cfg["cwt.threshold_mode"],
        render_enabled=cfg["render.enabled"],
        contour_levels=cfg["render.contour_levels"],
        raw=cfg,
    )


def _format_value(type_name: str, value: object) -> str:
    if type_name == "bool":
        return "true" if value else "false"
    if type_name == "floats":
        return ",".join(repr(float(v)) for v in value)
    if type_name == "float":
        return repr(float(value))
    return str(value)


def echo_text(rc: ResolvedConfig) -> str:
    """Render the fully resolved configuration back to key=value lines."""
    lines = ["# resolved configuration (all defaults materialized)"]
    for key, (type_name, _) in SCHEMA.items():
        lines.append(f"{key} = {_format_value(type_name, rc.raw[key])}")
    return "\n".join(lines) + "\n"
