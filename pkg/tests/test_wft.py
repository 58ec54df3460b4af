import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fringescale import (
    BadFrequencyError,
    BadSpecError,
    CarrierSpec,
    DemodParams,
    EmptyBandError,
    GridSpec,
    NoValidSeedError,
    PhantomSpec,
    PhaseMap,
    ScalarField,
    anchor_far_field,
    demodulate,
    field_from_array,
    interior_mask,
    make_fringes,
    make_phase,
    relative_phase,
    unwrap,
    windowed_response,
    wrap_phase,
)
from fringescale.core import TWO_PI
from fringescale.wft import frequency_grid


def brute_response(img, u, v, sigma, x1, y1):
    """Literal windowed sum centered at (x1, y1); the FFT-path oracle."""
    h, w = img.shape
    r = int(math.ceil(4 * sigma))
    acc = 0.0 + 0.0j
    for sy in range(-r, r + 1):
        for sx in range(-r, r + 1):
            x, y = x1 + sx, y1 + sy
            if 0 <= x < w and 0 <= y < h:
                acc += (img[y, x]
                        * math.exp(-(sx * sx + sy * sy) / (2.0 * sigma * sigma))
                        * np.exp(-2j * math.pi * (u * sx + v * sy)))
    return acc


class TestWindowedResponse:
    @pytest.mark.parametrize("x1,y1", [(0, 0), (3, 5), (32, 32), (63, 63),
                                       (0, 40), (63, 2)])
    def test_matches_brute_force(self, rng, x1, y1):
        img = rng.normal(size=(64, 64))
        f = field_from_array(img)
        u, v, sigma = 0.11, -0.04, 2.0
        resp = windowed_response(f, u, v, sigma)
        want = brute_response(img, u, v, sigma, x1, y1)
        assert resp[y1, x1] == pytest.approx(want, rel=1e-10, abs=1e-12)

    def test_constant_image_gives_window_mass(self):
        f = field_from_array(np.full((64, 64), 3.0))
        sigma = 2.5
        resp = windowed_response(f, 0.0, 0.0, sigma)
        r = int(math.ceil(4 * sigma))
        t = np.arange(-r, r + 1)
        w1d = np.exp(-t * t / (2 * sigma * sigma))
        # interior pixel sees the full separable window mass
        want = 3.0 * w1d.sum() ** 2
        assert resp[32, 32].real == pytest.approx(want, rel=1e-12)
        assert resp[32, 32].imag == pytest.approx(0.0, abs=1e-9)
        # corner pixel sees only the in-image quadrant
        want_corner = 3.0 * w1d[r:].sum() ** 2
        assert resp[0, 0].real == pytest.approx(want_corner, rel=1e-12)

    def test_pure_tone_phase_readout(self):
        h = w = 64
        x = np.arange(w)[None, :].astype(float)
        phi0 = 1.2
        f = field_from_array(np.broadcast_to(
            np.cos(2 * np.pi * 0.125 * x + phi0), (h, w)).copy())
        resp = windowed_response(f, 0.125, 0.0, 6.0)
        x1 = 30
        want = wrap_phase(2 * np.pi * 0.125 * x1 + phi0)
        # truncating the window at 4 sigma leaves ~1e-5 sidelobes that let a
        # sliver of the conjugate tone through; that bounds the readout
        assert np.angle(resp[20, x1]) == pytest.approx(want, abs=1e-4)

    def test_nyquist_probe_rejected(self):
        f = field_from_array(np.zeros((8, 8)))
        with pytest.raises(BadFrequencyError):
            windowed_response(f, 0.5, 0.0, 2.0)

    def test_bad_sigma_rejected(self):
        f = field_from_array(np.zeros((8, 8)))
        with pytest.raises(BadSpecError):
            windowed_response(f, 0.1, 0.0, 0.0)


class TestFrequencyGrid:
    def test_inclusive_endpoints(self):
        g = frequency_grid((0.025, 0.225), 0.005)
        assert len(g) == 41
        assert g[0] == pytest.approx(0.025)
        assert g[-1] == pytest.approx(0.225)

    def test_default_band_is_41x41(self):
        p = DemodParams.for_carrier(0.125)
        assert len(frequency_grid(p.band_x, p.step)) == 41
        assert len(frequency_grid(p.band_y, p.step)) == 41

    def test_step_not_dividing_span(self):
        g = frequency_grid((0.0, 0.1), 0.03)
        np.testing.assert_allclose(g, [0.0, 0.03, 0.06, 0.09])

    def test_empty_band(self):
        with pytest.raises(EmptyBandError):
            frequency_grid((0.2, 0.1), 0.05)


class TestDemodParams:
    def test_for_carrier_band(self):
        p = DemodParams.for_carrier(0.125)
        assert p.band_x == pytest.approx((0.025, 0.225))
        assert p.band_y == pytest.approx((-0.1, 0.1))
        assert p.step == 0.005
        assert p.window_sigma == 10.0

    def test_band_outside_nyquist(self):
        with pytest.raises(BadFrequencyError):
            DemodParams(band_x=(0.3, 0.6))

    def test_band_reversed(self):
        with pytest.raises(BadSpecError):
            DemodParams(band_x=(0.2, 0.1))

    def test_bad_step(self):
        with pytest.raises(BadSpecError):
            DemodParams(band_x=(0.1, 0.2), step=0.0)

    def test_bad_sigma(self):
        with pytest.raises(BadSpecError):
            DemodParams(band_x=(0.1, 0.2), window_sigma=-1.0)


SMALL_PARAMS = DemodParams(band_x=(0.05, 0.2), band_y=(-0.05, 0.05),
                           step=0.0125, window_sigma=5.0)


class TestDemodulate:
    def test_pure_carrier_ridge_and_phase(self):
        grid = GridSpec(64, 64)
        phase = make_phase(grid, PhantomSpec(kind="constant", peak=0.0))
        pair = make_fringes(phase, CarrierSpec(fx=0.125))
        rr = demodulate(pair.reference, SMALL_PARAMS)
        interior = interior_mask(grid, 15)
        assert (rr.freq_x.values[interior] == 0.125).all()
        assert (rr.freq_y.values[interior] == 0.0).all()
        x = np.arange(64)[None, :]
        want = wrap_phase(2 * np.pi * 0.125 * np.broadcast_to(x, (64, 64)))
        err = wrap_phase(rr.phase.field.values - want)
        assert np.abs(err[interior]).max() < 5e-3

    def test_zero_image_tiebreak_smallest_uv(self):
        f = field_from_array(np.zeros((32, 32)))
        rr = demodulate(f, SMALL_PARAMS)
        # every probe responds 0; the scan keeps the first (smallest) u, v
        assert (rr.freq_x.values == 0.05).all()
        assert (rr.freq_y.values == -0.05).all()
        assert (rr.ridge_amplitude.values == 0.0).all()

    def test_band_touching_nyquist_rejected(self):
        f = field_from_array(np.zeros((32, 32)))
        params = DemodParams(band_x=(0.4, 0.49999), band_y=(-0.1, 0.1),
                             step=0.025, window_sigma=3.0)
        rr = demodulate(f, params)  # inside Nyquist: fine
        assert rr.phase.wrapped

    def test_mask_propagates(self):
        vals = np.ones((32, 32))
        mask = np.ones((32, 32), dtype=bool)
        mask[:4] = False
        vals[:4] = 0.0
        rr = demodulate(field_from_array(vals, mask), SMALL_PARAMS)
        assert (rr.phase.field.values[:4] == 0.0).all()
        assert np.array_equal(rr.phase.field.mask, mask)

    def test_meta_echoes_params(self):
        f = field_from_array(np.zeros((32, 32)))
        rr = demodulate(f, SMALL_PARAMS)
        assert rr.phase.meta["window_sigma"] == repr(5.0)
        assert rr.phase.meta["interior_margin_px"] == "15"


class TestRelativePhase:
    def _pm(self, vals):
        return PhaseMap(field_from_array(wrap_phase(vals)), wrapped=True)

    def test_matches_per_pixel_oracle(self, rng):
        a = rng.uniform(-10, 10, size=(8, 8))
        b = rng.uniform(-10, 10, size=(8, 8))
        rel = relative_phase(self._pm(a), self._pm(b))
        for y in range(8):
            for x in range(8):
                d = wrap_phase(a[y, x]) - wrap_phase(b[y, x])
                want = d - TWO_PI * math.floor((d + math.pi) / TWO_PI)
                if want > math.pi:
                    want -= TWO_PI
                if want <= -math.pi:
                    want += TWO_PI
                assert rel.field.values[y, x] == pytest.approx(want, abs=1e-12)

    def test_carrier_cancels(self):
        x = np.broadcast_to(np.arange(16)[None, :] * 0.7, (8, 16))
        rel = relative_phase(self._pm(x + 0.5), self._pm(x))
        np.testing.assert_allclose(rel.field.values, 0.5, atol=1e-12)

    @given(st.floats(min_value=-3.0, max_value=3.0))
    def test_constant_shift_covariance(self, c):
        base = np.linspace(-2, 2, 64).reshape(8, 8)
        rel = relative_phase(self._pm(base + c), self._pm(base))
        np.testing.assert_allclose(rel.field.values, wrap_phase(c), atol=1e-9)

    def test_masks_and_together(self):
        a = np.zeros((8, 8))
        ma = np.ones((8, 8), dtype=bool)
        ma[0] = False
        mb = np.ones((8, 8), dtype=bool)
        mb[:, 0] = False
        pa = PhaseMap(field_from_array(a, ma), wrapped=True)
        pb = PhaseMap(field_from_array(a, mb), wrapped=True)
        rel = relative_phase(pa, pb)
        assert np.array_equal(rel.field.mask, ma & mb)

    def test_full_demod_cancels_carrier(self):
        # end to end on fringes with a constant deformation phase
        grid = GridSpec(48, 48)
        truth = make_phase(grid, PhantomSpec(kind="constant", peak=0.8))
        pair = make_fringes(truth, CarrierSpec(fx=0.125))
        rr = demodulate(pair.reference, SMALL_PARAMS)
        rd = demodulate(pair.deformed, SMALL_PARAMS)
        rel = relative_phase(rd, rr)
        interior = interior_mask(grid, 15)
        assert np.abs(rel.field.values[interior] - 0.8).max() < 5e-3


def plume_phase(grid, peak, sigma):
    spec = PhantomSpec(kind="gaussian_plume", peak=peak,
                       widths=(sigma, sigma))
    return make_phase(grid, spec)


class TestUnwrap:
    def test_identity_wrap_of_difference(self, rng):
        vals = rng.uniform(-np.pi, np.pi, size=(16, 16))
        p = PhaseMap(field_from_array(wrap_phase(vals)), wrapped=True)
        out = unwrap(p)
        d = wrap_phase(out.field.values - p.field.values)
        assert np.abs(d).max() < 1e-9

    def test_recovers_smooth_field_through_many_turns(self):
        grid = GridSpec(64, 64)
        truth = plume_phase(grid, 8.0, 12.0).field.values
        wrapped = PhaseMap(field_from_array(wrap_phase(truth)), wrapped=True)
        out = unwrap(wrapped).field.values
        # equal up to one global 2 pi multiple
        delta = out - truth
        assert np.ptp(delta) < 1e-9
        k = delta.flat[0] / TWO_PI
        assert k == pytest.approx(round(k), abs=1e-9)
        assert np.ptp(out) == pytest.approx(np.ptp(truth), abs=1e-9)

    def test_range_of_peak8_plume(self):
        grid = GridSpec(64, 64)
        truth = plume_phase(grid, 8.0, 12.0).field.values
        out = unwrap(PhaseMap(field_from_array(wrap_phase(truth)),
                              wrapped=True)).field.values
        assert out.max() - out.min() == pytest.approx(
            truth.max() - truth.min(), abs=1e-9)

    def test_seed_keeps_its_value(self, rng):
        vals = wrap_phase(rng.uniform(-10, 10, size=(12, 12)))
        q = rng.random((12, 12))
        p = PhaseMap(field_from_array(vals), wrapped=True)
        out = unwrap(p, quality=field_from_array(q))
        sy, sx = np.unravel_index(np.argmax(q), q.shape)
        assert out.field.values[sy, sx] == vals[sy, sx]

    def test_deterministic(self, rng):
        vals = wrap_phase(rng.uniform(-10, 10, size=(16, 16)))
        q = rng.random((16, 16))
        p = PhaseMap(field_from_array(vals), wrapped=True)
        a = unwrap(p, quality=q).field.values
        b = unwrap(p, quality=q).field.values
        assert np.array_equal(a, b)

    def test_disconnected_components(self):
        grid = GridSpec(16, 16)
        truth = plume_phase(grid, 7.0, 4.0).field.values.copy()
        mask = np.ones((16, 16), dtype=bool)
        mask[:, 8] = False          # split into left and right islands
        vals = wrap_phase(truth)
        vals[:, 8] = 0.0
        p = PhaseMap(ScalarField(grid, vals, mask), wrapped=True)
        out = unwrap(p).field.values
        d = wrap_phase(out - vals)
        assert np.abs(d[mask]).max() < 1e-9
        # each island is internally consistent up to its own 2 pi offset
        for sl in (np.s_[:, :8], np.s_[:, 9:]):
            delta = (out - truth)[sl]
            assert np.ptp(delta) < 1e-9

    def test_masked_pixels_untouched(self):
        vals = np.zeros((8, 8))
        mask = np.ones((8, 8), dtype=bool)
        mask[4, 4] = False
        p = PhaseMap(field_from_array(vals, mask), wrapped=True)
        out = unwrap(p)
        assert out.field.values[4, 4] == 0.0
        assert np.array_equal(out.field.mask, mask)

    def test_all_masked_raises(self):
        f = field_from_array(np.zeros((8, 8)), np.zeros((8, 8), dtype=bool))
        with pytest.raises(NoValidSeedError):
            unwrap(PhaseMap(f, wrapped=True))

    def test_rejects_unwrapped_input(self):
        p = PhaseMap(field_from_array(np.zeros((8, 8))), wrapped=False)
        with pytest.raises(ValueError):
            unwrap(p)

    def test_output_flagged_unwrapped(self):
        p = PhaseMap(field_from_array(np.zeros((8, 8))), wrapped=True)
        assert not unwrap(p).wrapped


class TestAnchorFarField:
    def _unwrapped(self, vals):
        return PhaseMap(field_from_array(vals), wrapped=False)

    def test_shifts_by_whole_turns(self):
        vals = np.full((16, 16), 3 * TWO_PI + 0.2)
        out = anchor_far_field(self._unwrapped(vals), (0, 0, 4, 4))
        np.testing.assert_allclose(out.field.values, 0.2, atol=1e-12)

    def test_no_shift_when_already_near_zero(self):
        vals = np.full((16, 16), 0.3)
        out = anchor_far_field(self._unwrapped(vals), (0, 0, 4, 4))
        assert out.field.values[0, 0] == 0.3

    def test_median_over_rect_only(self):
        vals = np.zeros((16, 16))
        vals[8:, :] = 5 * TWO_PI       # far from the anchor rect
        out = anchor_far_field(self._unwrapped(vals), (0, 0, 16, 4))
        np.testing.assert_allclose(out.field.values[:4], 0.0)

    def test_rect_must_fit(self):
        p = self._unwrapped(np.zeros((16, 16)))
        with pytest.raises(BadSpecError):
            anchor_far_field(p, (10, 10, 10, 10))

    def test_rect_with_no_valid_pixels(self):
        vals = np.zeros((16, 16))
        mask = np.ones((16, 16), dtype=bool)
        mask[:4, :4] = False
        p = PhaseMap(field_from_array(vals, mask), wrapped=False)
        with pytest.raises(NoValidSeedError):
            anchor_far_field(p, (0, 0, 4, 4))

    def test_rejects_wrapped(self):
        p = PhaseMap(field_from_array(np.zeros((16, 16))), wrapped=True)
        with pytest.raises(ValueError):
            anchor_far_field(p, (0, 0, 4, 4))


class TestInteriorMask:
    def test_margin_geometry(self):
        m = interior_mask(GridSpec(10, 8), 3)
        assert m.sum() == 4 * 2
        assert m[3, 3] and m[4, 6]
        assert not m[2, 5] and not m[5, 7]

    def test_margin_swallows_grid(self):
        assert not interior_mask(GridSpec(8, 8), 4).any()

    def test_fractional_margin_rounds_up(self):
        a = interior_mask(GridSpec(12, 12), 2.2)
        b = interior_mask(GridSpec(12, 12), 3)
        assert np.array_equal(a, b)
