"""Windowed Fourier ridge demodulation and quality-guided unwrapping.

The windowed response of an image at pixel (x1, y1) and probe frequency
(u, v) cycles/px is the inner product with a Gaussian-windowed complex
exponential centered on that pixel:

    R(x1, y1) = sum_{s} img(x1 + sx, y1 + sy)
                * exp(-(sx^2 + sy^2) / (2 sigma^2))
                * exp(-i 2 pi (u sx + v sy))

The window is truncated at radius ceil(4 sigma) and pixels beyond the
image edge contribute zero, which is exactly a zero-padded linear
convolution; it is evaluated with separable FFT convolutions along rows
then columns. Because the exponential is re-referenced to the window
center, the argument of the response at the ridge equals the total local
fringe phase regardless of which frequency grid point the ridge search
picked, so subtracting reference from deformed cancels the carrier term
identically.

demodulate scans an inclusive frequency grid over [band_x] x [band_y]
and keeps, per pixel, the response with the largest magnitude (ties break
toward the smallest u, then v). Pixels closer than 3 sigma to the border
see a clipped window and are conventionally excluded from interior
statistics; interior_mask builds that selector.

unwrap is a quality-guided flood fill: starting from the highest-quality
valid pixel, neighbors are integrated in descending quality order, each
receiving its neighbor's value plus the wrapped difference. The 2 pi
multiple is tracked as an exact integer per pixel, so the output differs
from the input by exact multiples of 2 pi (up to one rounding of 2*pi*k)
and equals the input at the seed. Disconnected valid regions restart the
fill at their own best pixel.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np
from scipy import fft as sfft

from .core import GridSpec, PhaseMap, ScalarField, TWO_PI, wrap_phase
from .errors import (BadFrequencyError, BadSpecError, EmptyBandError,
                     GridMismatchError, NoValidSeedError)

WINDOW_TRUNCATION_SIGMAS = 4
INTERIOR_MARGIN_SIGMAS = 3


@dataclass(frozen=True)
class DemodParams:
    """Ridge search parameters.

    band_x and band_y are inclusive frequency intervals in cycles/px,
    scanned with the given step; both must sit inside the open Nyquist
    interval (-0.5, 0.5). window_sigma is the Gaussian window width in
    pixels. for_carrier builds the defaults for a given carrier
    frequency: band_x = fx +- 0.1, band_y = +-0.1, step 0.005,
    window_sigma 10.
    """

    band_x: tuple[float, float]
    band_y: tuple[float, float] = (-0.1, 0.1)
    step: float = 0.005
    window_sigma: float = 10.0

    def __post_init__(self):
        for name, band in (("band_x", self.band_x), ("band_y", self.band_y)):
            lo, hi = band
            if not (lo < hi):
                raise BadSpecError(f"{name} must satisfy lo < hi, got {band}")
            if lo <= -0.5 or hi >= 0.5:
                raise BadFrequencyError(
                    f"{name} must lie inside (-0.5, 0.5) cycles/px, got {band}")
            object.__setattr__(self, name, (float(lo), float(hi)))
        if not (0.0 < self.step <= min(self.band_x[1] - self.band_x[0],
                                       self.band_y[1] - self.band_y[0])):
            raise BadSpecError(
                f"step must be positive and no wider than the bands, got {self.step}")
        if not (self.window_sigma > 0.0 and np.isfinite(self.window_sigma)):
            raise BadSpecError(f"window_sigma must be positive, got {self.window_sigma}")

    @classmethod
    def for_carrier(cls, fx: float, **kw) -> "DemodParams":
        return cls(band_x=(fx - 0.1, fx + 0.1), **kw)


@dataclass(frozen=True)
class RidgeResult:
    """Per-pixel ridge of the windowed frequency scan.

    phase is wrapped to (-pi, pi] and zero at masked pixels; freq_x,
    freq_y hold the winning grid frequencies and ridge_amplitude the
    response magnitude (the quality map for unwrapping).
    """

    phase: PhaseMap
    freq_x: ScalarField
    freq_y: ScalarField
    ridge_amplitude: ScalarField


def frequency_grid(band: tuple[float, float], step: float) -> np.ndarray:
    """Inclusive frequency samples lo, lo+step, ..., hi (fp-tolerant)."""
    lo, hi = band
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    if n < 1:
        raise EmptyBandError(f"band {band} with step {step} holds no frequencies")
    return lo + step * np.arange(n)


def interior_mask(grid: GridSpec, margin_px: float) -> np.ndarray:
    """True where a pixel is at least margin_px from every image border."""
    m = int(np.ceil(margin_px))
    out = np.zeros(grid.shape, dtype=bool)
    if grid.height > 2 * m and grid.width > 2 * m:
        out[m:grid.height - m, m:grid.width - m] = True
    return out


def _window_taps(sigma: float) -> tuple[np.ndarray, np.ndarray]:
    r = int(np.ceil(WINDOW_TRUNCATION_SIGMAS * sigma))
    t = np.arange(-r, r + 1, dtype=np.float64)
    return t, np.exp(-t * t / (2.0 * sigma * sigma))


def _kernel_fft(t: np.ndarray, w: np.ndarray, freq: float, n: int) -> np.ndarray:
    """FFT of the complex window tap vector laid out circularly in n bins."""
    buf = np.zeros(n, dtype=np.complex128)
    buf[t.astype(int) % n] = w * np.exp(2j * np.pi * freq * t)
    return sfft.fft(buf)


class _SeparableScan:
    """Shared machinery: row-convolved intermediates per u, columns per v.

    Splitting the 2D zero-padded convolution into the row stage (per u)
    and column stage (per v) lets demodulate hoist the row work out of
    the inner loop over v, which is where nearly all the time goes.
    """

    def __init__(self, values: np.ndarray, sigma: float):
        self.h, self.w = values.shape
        self.t, self.w1d = _window_taps(sigma)
        r = len(self.t) // 2
        self.nx = sfft.next_fast_len(self.w + 2 * r)
        self.ny = sfft.next_fast_len(self.h + 2 * r)
        self.row_fft = sfft.fft(values, n=self.nx, axis=1)

    def rows(self, u: float) -> np.ndarray:
        """Row-convolved image for probe frequency u, padded along columns."""
        gx = _kernel_fft(self.t, self.w1d, u, self.nx)
        rows = sfft.ifft(self.row_fft * gx[None, :], axis=1)[:, :self.w]
        buf = np.zeros((self.ny, self.w), dtype=np.complex128)
        buf[:self.h] = rows
        return sfft.fft(buf, axis=0)

    def response(self, col_fft: np.ndarray, v: float) -> np.ndarray:
        gy = _kernel_fft(self.t, self.w1d, v, self.ny)
        return sfft.ifft(col_fft * gy[:, None], axis=0)[:self.h]


def _check_probe(u: float, v: float):
    if abs(u) >= 0.5 or abs(v) >= 0.5:
        raise BadFrequencyError(
            f"probe frequency ({u}, {v}) outside the open Nyquist square (+-0.5)")


def windowed_response(img: ScalarField, u: float, v: float,
                      sigma: float) -> np.ndarray:
    """Complex windowed response at every pixel for one probe frequency."""
    _check_probe(u, v)
    if not (sigma > 0.0 and np.isfinite(sigma)):
        raise BadSpecError(f"window sigma must be positive, got {sigma}")
    scan = _SeparableScan(img.values, sigma)
    return scan.response(scan.rows(u), v)


def demodulate(img: ScalarField, params: DemodParams) -> RidgeResult:
    """Exhaustive ridge scan over the frequency grid.

    Per pixel, keeps the (u, v) grid point maximizing the response
    magnitude; ties resolve to the smallest u, then v, by scanning the
    grid in ascending order with strict improvement. Masked pixels get
    phase 0; their ridge values are computed but carry no meaning.
    """
    us = frequency_grid(params.band_x, params.step)
    vs = frequency_grid(params.band_y, params.step)
    for f in (us[0], us[-1], vs[0], vs[-1]):
        if abs(f) >= 0.5:
            raise BadFrequencyError(f"band frequency {f} reaches Nyquist")
    scan = _SeparableScan(img.values, params.window_sigma)
    shape = img.grid.shape
    best_mag2 = np.full(shape, -1.0)
    best_resp = np.zeros(shape, dtype=np.complex128)
    best_u = np.zeros(shape)
    best_v = np.zeros(shape)
    for u in us:
        col_fft = scan.rows(u)
        for v in vs:
            resp = scan.response(col_fft, v)
            mag2 = resp.real * resp.real + resp.imag * resp.imag
            better = mag2 > best_mag2
            best_mag2[better] = mag2[better]
            best_resp[better] = resp[better]
            best_u[better] = u
            best_v[better] = v
    valid = img.valid()
    phase_vals = np.where(valid, wrap_phase(np.angle(best_resp)), 0.0)
    meta = {
        "window_sigma": repr(params.window_sigma),
        "band_x": f"{params.band_x[0]!r},{params.band_x[1]!r}",
        "band_y": f"{params.band_y[0]!r},{params.band_y[1]!r}",
        "step": repr(params.step),
        "interior_margin_px": str(int(np.ceil(
            INTERIOR_MARGIN_SIGMAS * params.window_sigma))),
    }
    return RidgeResult(
        phase=PhaseMap(ScalarField(img.grid, phase_vals, img.mask),
                       wrapped=True, meta=meta),
        freq_x=ScalarField(img.grid, best_u),
        freq_y=ScalarField(img.grid, best_v),
        ridge_amplitude=ScalarField(img.grid, np.sqrt(best_mag2)),
    )


def _phase_of(x) -> PhaseMap:
    return x.phase if isinstance(x, RidgeResult) else x


def relative_phase(deformed, reference) -> PhaseMap:
    """Wrapped per-pixel difference deformed - reference in (-pi, pi].

    Because both arguments carry the carrier identically, the difference
    is the wrapped deformation phase alone. Masks AND together and newly
    invalid pixels are zeroed.
    """
    d = _phase_of(deformed)
    r = _phase_of(reference)
    if d.grid != r.grid:
        raise GridMismatchError("relative_phase needs matching grids")
    valid = d.field.valid() & r.field.valid()
    diff = np.where(valid, wrap_phase(d.field.values - r.field.values), 0.0)
    mask = None if (d.field.mask is None and r.field.mask is None) else valid
    meta = dict(r.meta)
    meta.update(d.meta)
    return PhaseMap(ScalarField(d.grid, diff, mask), wrapped=True, meta=meta)


def unwrap(p: PhaseMap, quality: ScalarField | np.ndarray | None = None) -> PhaseMap:
    """Quality-guided flood-fill unwrap of a wrapped phase map.

    quality defaults to uniform (plain breadth-first order); pass the
    ridge amplitude for noise-robust paths. Masked pixels are left
    untouched. Single-threaded and deterministic: quality ties break on
    (row, col).
    """
    if not p.wrapped:
        raise ValueError("unwrap expects a wrapped phase map")
    valid = p.field.valid()
    if not valid.any():
        raise NoValidSeedError("cannot unwrap a fully masked phase map")
    if quality is None:
        q = np.zeros(p.grid.shape)
    else:
        q = quality.values if isinstance(quality, ScalarField) else np.asarray(quality)
        if q.shape != p.grid.shape:
            raise GridMismatchError("quality map shape does not match the grid")
    h, w = p.grid.shape
    vals = p.field.values
    # plain Python lists are markedly faster inside the fill loop
    vrow = vals.tolist()
    qrow = q.tolist()
    krow = [[0] * w for _ in range(h)]
    done = (~valid).tolist()
    seed_q = np.where(valid, q, -np.inf)
    pi = math.pi
    heap: list[tuple[float, int, int, int, int]] = []
    n_left = int(valid.sum())
    while n_left:
        # highest-quality unvisited pixel; flat argmax gives row-major ties
        sy, sx = divmod(int(np.argmax(seed_q)), w)
        done[sy][sx] = True
        seed_q[sy, sx] = -np.inf
        n_left -= 1
        stack = [(sy, sx)]
        while stack or heap:
            if stack:
                cy, cx = stack.pop()
            else:
                _, cy, cx, py, px = heapq.heappop(heap)
                if done[cy][cx]:
                    continue
                # integer count of 2 pi turns: wrap(d) = d - 2 pi m with
                # m = ceil((d - pi) / 2 pi), the (-pi, pi] representative
                d = vrow[cy][cx] - vrow[py][px]
                krow[cy][cx] = krow[py][px] - math.ceil((d - pi) / TWO_PI)
                done[cy][cx] = True
                seed_q[cy, cx] = -np.inf
                n_left -= 1
            for ny, nx in ((cy - 1, cx), (cy + 1, cx), (cy, cx - 1), (cy, cx + 1)):
                if 0 <= ny < h and 0 <= nx < w and not done[ny][nx]:
                    heapq.heappush(heap, (-qrow[ny][nx], ny, nx, cy, cx))
    out = vals + TWO_PI * np.array(krow, dtype=np.float64)
    out = np.where(valid, out, vals)
    return PhaseMap(ScalarField(p.grid, out, p.field.mask), wrapped=False,
                    meta=dict(p.meta))


def anchor_far_field(p: PhaseMap, rect: tuple[int, int, int, int]) -> PhaseMap:
    """Shift an unwrapped phase by the 2 pi multiple that brings the median
    over a far-field rectangle (x0, y0, w, h) nearest zero.

    Unwrapping fixes phase only up to a global 2 pi k; when the scene has
    a quiet region of known near-zero phase this pins k.
    """
    if p.wrapped:
        raise ValueError("anchor_far_field expects an unwrapped phase map")
    x0, y0, w, h = rect
    if w <= 0 or h <= 0 or x0 < 0 or y0 < 0 \
            or x0 + w > p.grid.width or y0 + h > p.grid.height:
        raise BadSpecError(f"far-field rect {rect} does not fit grid "
                           f"{p.grid.width}x{p.grid.height}")
    sel = np.zeros(p.grid.shape, dtype=bool)
    sel[y0:y0 + h, x0:x0 + w] = True
    sel &= p.field.valid()
    if not sel.any():
        raise NoValidSeedError("far-field rect holds no valid pixels")
    k = round(float(np.median(p.field.values[sel])) / TWO_PI)
    if k == 0:
        return p
    valid = p.field.valid()
    out = np.where(valid, p.field.values - TWO_PI * k, p.field.values)
    return PhaseMap(ScalarField(p.grid, out, p.field.mask), wrapped=False,
                    meta=dict(p.meta))
