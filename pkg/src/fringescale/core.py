"""Grid, field, and phase primitives shared by every pipeline stage.

Conventions used throughout the package:

* rasters are row-major with the origin at the top-left corner, x growing
  rightward along columns and y growing downward along rows, so pixel
  (x, y) is ``values[y, x]``;
* invalid pixels always hold the value 0 exactly, which lets FFT stages
  run on the raw array, while the boolean mask travels alongside for any
  statistic that must ignore them;
* fields are immutable once constructed (arrays are copied and marked
  read-only), so every operation returns a new object.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .errors import AllMaskedError, GridMismatchError

MIN_GRID = 8
TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class GridSpec:
    """Raster dimensions in pixels."""

    width: int
    height: int

    def __post_init__(self):
        if not (isinstance(self.width, (int, np.integer))
                and isinstance(self.height, (int, np.integer))):
            raise ValueError("grid dimensions must be integers")
        if self.width < MIN_GRID or self.height < MIN_GRID:
            raise ValueError(
                f"grid must be at least {MIN_GRID}x{MIN_GRID}, "
                f"got {self.width}x{self.height}")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.height, self.width)

    @property
    def npixels(self) -> int:
        return self.width * self.height


def _frozen_array(a: np.ndarray, dtype) -> np.ndarray:
    out = np.array(a, dtype=dtype, order="C", copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class ScalarField:
    """One float64 value per pixel plus an optional validity mask.

    The mask is True where the pixel is valid. Masked-out pixels must
    hold 0 exactly; the constructor rejects anything else rather than
    silently rewriting data (apply_mask is the sanctioned zeroing path).
    """

    grid: GridSpec
    values: np.ndarray
    mask: np.ndarray | None = None

    def __post_init__(self):
        vals = _frozen_array(self.values, np.float64)
        if vals.shape != self.grid.shape:
            raise GridMismatchError(
                f"values shape {vals.shape} does not match grid {self.grid.shape}")
        if not np.isfinite(vals).all():
            raise ValueError("field values must be finite")
        object.__setattr__(self, "values", vals)
        if self.mask is not None:
            m = _frozen_array(self.mask, bool)
            if m.shape != self.grid.shape:
                raise GridMismatchError(
                    f"mask shape {m.shape} does not match grid {self.grid.shape}")
            if vals[~m].size and np.any(vals[~m] != 0.0):
                raise ValueError("masked-out pixels must hold the value 0")
            object.__setattr__(self, "mask", m)

    def valid(self) -> np.ndarray:
        """Boolean validity array (all True when there is no mask)."""
        if self.mask is None:
            return np.ones(self.grid.shape, dtype=bool)
        return self.mask

    @property
    def n_valid(self) -> int:
        return self.grid.npixels if self.mask is None else int(self.mask.sum())


def field_from_array(values: np.ndarray,
                     mask: np.ndarray | None = None) -> ScalarField:
    """Build a ScalarField deriving the grid from the array shape."""
    values = np.asarray(values)
    if values.ndim != 2:
        raise ValueError("field arrays must be 2D")
    h, w = values.shape
    return ScalarField(GridSpec(width=w, height=h), values, mask)


@dataclass(frozen=True)
class CarrierSpec:
    """Horizontal cosine carrier: I(x, y) = a * (1 + cos(2 pi fx x + phi))."""

    fx: float
    amplitude: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.fx < 0.5):
            raise ValueError(f"carrier fx must lie in (0, 0.5), got {self.fx}")
        if not (self.amplitude > 0.0 and np.isfinite(self.amplitude)):
            raise ValueError(f"carrier amplitude must be positive, got {self.amplitude}")


@dataclass(frozen=True)
class PhaseMap:
    """A phase field in radians, wrapped to (-pi, pi] or unwrapped.

    meta is a free-form string-to-string label map used to echo run
    parameters into outputs (window sigma, band, labels and so on).
    """

    field: ScalarField
    wrapped: bool
    meta: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.wrapped:
            v = self.field.values[self.field.valid()]
            if v.size and (v.min() <= -np.pi or v.max() > np.pi):
                raise ValueError("wrapped phase values must lie in (-pi, pi]")
        object.__setattr__(self, "meta", dict(self.meta))

    @property
    def grid(self) -> GridSpec:
        return self.field.grid


def wrap_phase(x):
    """Wrap angles to the half-open interval (-pi, pi].

    Accepts scalars or arrays. The formula pi - mod(pi - x, 2 pi) lands
    exactly in (-pi, pi]; a final guard repairs the one floating-point
    corner where mod returns 2 pi and the result would touch -pi.
    """
    x = np.asarray(x, dtype=np.float64)
    out = np.pi - np.mod(np.pi - x, TWO_PI)
    out = np.where(out <= -np.pi, out + TWO_PI, out)
    if out.ndim == 0:
        return float(out)
    return out


def masked_extrema(f: ScalarField) -> tuple[float, float]:
    """(min, max) over valid pixels. Raises AllMaskedError when none exist."""
    valid = f.valid()
    if not valid.any():
        raise AllMaskedError("field has no valid pixels")
    v = f.values[valid]
    return float(v.min()), float(v.max())


def apply_mask(f: ScalarField, mask: np.ndarray) -> ScalarField:
    """Return f with the extra mask ANDed in and newly invalid pixels zeroed.

    Idempotent: applying the same mask twice changes nothing.
    """
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != f.grid.shape:
        raise GridMismatchError(
            f"mask shape {mask.shape} does not match grid {f.grid.shape}")
    joint = mask & f.valid()
    values = np.where(joint, f.values, 0.0)
    return ScalarField(f.grid, values, joint)


def iter_pixels(grid: GridSpec) -> Iterator[tuple[int, int]]:
    """Row-major (y, x) pixel iterator, handy for brute-force checks."""
    for y in range(grid.height):
        for x in range(grid.width):
            yield y, x
