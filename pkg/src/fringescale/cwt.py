"""FFT-accelerated 2D continuous wavelet transform with a Mexican hat.

The transform of a phase map phi at scale alpha is

    W(x1, y1, alpha) = (1/alpha) * sum_{x,y} phi(x, y)
                       * psi((x - x1)/alpha, (y - y1)/alpha)

with the isotropic (angle-free) Mexican hat

    psi(x, y) = (2 - x^2 - y^2) * exp(-(x^2 + y^2) / 2).

psi is the negative Laplacian of the unit Gaussian, so its Fourier
transform is closed-form, real and isotropic:

    psi_hat(wx, wy) = 2 pi * (wx^2 + wy^2) * exp(-(wx^2 + wy^2) / 2)

(angular frequency convention, integral kernel exp(-i w . x)). It is
zero at the origin, peaks on the ring |w| = sqrt(2), and being real its
conjugation is the identity. The plane at scale alpha is therefore
computed as

    W = ifft2( fft2(phi) * alpha * psi_hat(2 pi alpha fx, 2 pi alpha fy) )

over the signed DFT frequency grid fx = k/width, fy = l/height. This is
a circular (periodic) convolution; for production runs on real phase
maps the input is edge-padded by 2 * alpha_max pixels and cropped after
the transform to suppress wraparound, while oracle and covariance tests
run unpadded so the periodic convention is exact.

Scales below 1 px leave psi_hat with significant energy beyond the
Nyquist frequency and trigger AliasingWarning; scales <= 0 are refused.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .core import PhaseMap, ScalarField
from .errors import (AliasingWarning, AllMaskedError, BadScaleError,
                     NumericError)

DISPLAY_SCALES = (3.0, 10.0, 50.0, 100.0)
DEFAULT_SCALE_COUNT = 32
DEFAULT_SCALE_RANGE = (1.0, 100.0)

# Largest tolerated |imag| / max|real| after the inverse transform.
IMAG_RESIDUE_LIMIT = 1e-9


def mexican_hat(x, y):
    """Isotropic Mexican hat psi(x, y) = (2 - r^2) exp(-r^2 / 2)."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    r2 = x * x + y * y
    return (2.0 - r2) * np.exp(-0.5 * r2)


def mexican_hat_spectrum(wx, wy):
    """Closed-form transform 2 pi |w|^2 exp(-|w|^2 / 2), angular frequency."""
    wx = np.asarray(wx, dtype=np.float64)
    wy = np.asarray(wy, dtype=np.float64)
    w2 = wx * wx + wy * wy
    return 2.0 * np.pi * w2 * np.exp(-0.5 * w2)


def default_scale_grid(count: int = DEFAULT_SCALE_COUNT,
                       lo: float = DEFAULT_SCALE_RANGE[0],
                       hi: float = DEFAULT_SCALE_RANGE[1],
                       include: tuple[float, ...] = DISPLAY_SCALES) -> tuple[float, ...]:
    """Log-spaced scale grid with the display scales snapped onto it.

    Each scale in ``include`` replaces its nearest log-grid neighbor, so
    the total count stays fixed and the display scales are always
    present exactly.
    """
    grid = np.geomspace(lo, hi, count)
    for d in include:
        if lo <= d <= hi:
            grid[np.argmin(np.abs(grid - d))] = d
    grid = np.unique(grid)
    return tuple(float(a) for a in grid)


def _check_scale(alpha: float) -> float:
    alpha = float(alpha)
    if not np.isfinite(alpha) or alpha <= 0.0:
        raise BadScaleError(f"scale must be positive, got {alpha}")
    if alpha < 1.0:
        warnings.warn(
            f"scale {alpha} is below 1 px; the sampled wavelet keeps "
            f"significant energy beyond Nyquist and the plane may alias",
            AliasingWarning, stacklevel=3)
    return alpha


@dataclass(frozen=True)
class CwtParams:
    """Sweep parameters: scale grid plus post-processing switches.

    threshold_fraction zeroes values smaller than that fraction of each
    plane's own peak magnitude (0 disables). pad turns the production
    edge-replication padding on; equivalence tests turn it off to keep
    the periodic convention exact.
    """

    scales: tuple[float, ...]
    threshold_fraction: float = 0.01
    normalize: bool = True
    pad: bool = True

    def __post_init__(self):
        scales = tuple(float(a) for a in self.scales)
        if not scales:
            raise BadScaleError("scale grid is empty")
        for a in scales:
            if not np.isfinite(a) or a <= 0.0:
                raise BadScaleError(f"scale must be positive, got {a}")
        if any(b <= a for a, b in zip(scales, scales[1:])):
            raise ValueError("scales must be strictly increasing")
        if not (0.0 <= self.threshold_fraction < 1.0):
            raise ValueError(
                f"threshold_fraction must lie in [0, 1), got {self.threshold_fraction}")
        object.__setattr__(self, "scales", scales)

    @classmethod
    def default(cls, **kw) -> "CwtParams":
        return cls(scales=default_scale_grid(), **kw)

    @classmethod
    def log_spaced(cls, lo: float, hi: float, count: int, **kw) -> "CwtParams":
        if count < 1 or not (0 < lo < hi):
            raise BadScaleError(
                f"log-spaced grid needs 0 < lo < hi and count >= 1, "
                f"got lo={lo} hi={hi} count={count}")
        scales = tuple(float(a) for a in np.geomspace(lo, hi, count))
        return cls(scales=scales, **kw)


@dataclass(frozen=True)
class WaveletStack:
    """Per-scale response planes sharing the input grid and mask."""

    scales: tuple[float, ...]
    planes: tuple[ScalarField, ...]
    normalized: bool = False
    thresholded: bool = False

    def __post_init__(self):
        if len(self.scales) != len(self.planes):
            raise ValueError("one plane per scale required")

    def __len__(self) -> int:
        return len(self.planes)


def _as_field(phase) -> ScalarField:
    return phase.field if isinstance(phase, PhaseMap) else phase


def _spectrum_grid(shape: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
    h, w = shape
    wy = 2.0 * np.pi * np.fft.fftfreq(h)[:, None]
    wx = 2.0 * np.pi * np.fft.fftfreq(w)[None, :]
    return wx, wy


def _plane_values(spectrum: np.ndarray, wx, wy, alpha: float) -> np.ndarray:
    mult = alpha * mexican_hat_spectrum(alpha * wx, alpha * wy)
    out = np.fft.ifft2(spectrum * mult)
    scale = np.abs(out.real).max()
    resid = np.abs(out.imag).max()
    if resid > IMAG_RESIDUE_LIMIT * max(scale, 1e-300):
        raise NumericError(
            f"imaginary residue {resid:.3e} exceeds {IMAG_RESIDUE_LIMIT:g} "
            f"of plane magnitude {scale:.3e} at scale {alpha}")
    return out.real


def cwt_plane(phase, alpha: float, *, pad: bool = False) -> ScalarField:
    """Single-scale wavelet response plane of a phase map.

    pad=False (default) keeps the exact periodic convention. pad=True
    edge-replicates by 2*alpha pixels before transforming and crops the
    result, for production use on non-periodic data.
    """
    f = _as_field(phase)
    alpha = _check_scale(alpha)
    arr = f.values
    padw = int(np.ceil(2.0 * alpha)) if pad else 0
    if padw:
        arr = np.pad(arr, padw, mode="edge")
    wx, wy = _spectrum_grid(arr.shape)
    out = _plane_values(np.fft.fft2(arr), wx, wy, alpha)
    if padw:
        out = out[padw:padw + f.grid.height, padw:padw + f.grid.width]
    if f.mask is not None:
        out = np.where(f.mask, out, 0.0)
    return ScalarField(f.grid, out, f.mask)


def cwt_sweep(phase, params: CwtParams, /, *,
              threshold_mode: str = "small") -> WaveletStack:
    """Multi-scale sweep: one plane per scale, then the enabled post steps.

    The forward FFT is computed once. With padding on, a single margin of
    2 * max(scales) pixels serves every plane so all planes crop
    identically (a one-scale sweep therefore matches cwt_plane exactly).
    Raises AllMaskedError when the phase has no valid pixels.
    """
    f = _as_field(phase)
    if not f.valid().any():
        raise AllMaskedError("cannot sweep a fully masked phase map")
    for a in params.scales:
        _check_scale(a)
    arr = f.values
    padw = int(np.ceil(2.0 * max(params.scales))) if params.pad else 0
    if padw:
        arr = np.pad(arr, padw, mode="edge")
    wx, wy = _spectrum_grid(arr.shape)
    spectrum = np.fft.fft2(arr)
    planes = []
    for alpha in params.scales:
        out = _plane_values(spectrum, wx, wy, alpha)
        if padw:
            out = out[padw:padw + f.grid.height, padw:padw + f.grid.width]
        if f.mask is not None:
            out = np.where(f.mask, out, 0.0)
        planes.append(ScalarField(f.grid, out, f.mask))
    stack = WaveletStack(params.scales, tuple(planes))
    if params.normalize:
        stack = normalize_stack(stack)
    if params.threshold_fraction > 0.0:
        stack = threshold_stack(stack, params.threshold_fraction,
                                mode=threshold_mode)
    return stack


def _plane_peak(plane: ScalarField) -> float:
    valid = plane.valid()
    if not valid.any():
        return 0.0
    return float(np.abs(plane.values[valid]).max())


def normalize_stack(stack: WaveletStack) -> WaveletStack:
    """Divide each plane by its own peak magnitude over valid pixels.

    Identically zero planes pass through unchanged, so a plane with any
    signal ends up with peak magnitude exactly 1.
    """
    if stack.normalized:
        raise ValueError("stack is already normalized")
    planes = []
    for plane in stack.planes:
        m = _plane_peak(plane)
        if m > 0.0:
            plane = ScalarField(plane.grid, plane.values / m, plane.mask)
        planes.append(plane)
    return WaveletStack(stack.scales, tuple(planes), normalized=True,
                        thresholded=stack.thresholded)


def threshold_stack(stack: WaveletStack, fraction: float,
                    mode: str = "small") -> WaveletStack:
    """Zero out plane values according to each plane's own extrema.

    mode="small" (default) zeroes values with |v| strictly below
    fraction * max|v|, keeping the boundary value itself. mode="near_extrema"
    instead zeroes values within fraction * (max - min) of either extremum,
    clipping the peaks rather than the floor; it exists for comparing the
    two readings of peak-relative clipping.
    """
    if not (0.0 <= fraction < 1.0):
        raise ValueError(f"threshold fraction must lie in [0, 1), got {fraction}")
    if mode not in ("small", "near_extrema"):
        raise ValueError(f"unknown threshold mode {mode!r}")
    planes = []
    for plane in stack.planes:
        valid = plane.valid()
        v = plane.values
        if fraction > 0.0 and valid.any():
            if mode == "small":
                m = _plane_peak(plane)
                keep = np.abs(v) >= fraction * m
            else:
                lo = float(v[valid].min())
                hi = float(v[valid].max())
                span = hi - lo
                keep = (v - lo > fraction * span) & (hi - v > fraction * span)
            plane = ScalarField(plane.grid, np.where(keep, v, 0.0), plane.mask)
        planes.append(plane)
    return WaveletStack(stack.scales, tuple(planes),
                        normalized=stack.normalized, thresholded=True)
