import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from aperture_forge.waveforms import (
    AdcModel,
    AmbiguitySurface,
    BfskConfig,
    IqStream,
    LfmChirp,
    PulseShape,
    _wiener_weights,
    adc_metrics,
    ambiguity_surface,
    bfsk_modulate,
    iq_demodulate,
    lfm_ambiguity_closed_form,
    matched_filter,
    pulse_shape_ir,
    rmmse_compress,
    sample_lfm,
)


# ---------------------------------------------------------------- LFM chirp


def test_chirp_derived_quantities():
    c = LfmChirp(fc=1e9, bandwidth=10e6, duration=10e-6)
    assert c.rate == pytest.approx(1e12)
    assert c.tbp == pytest.approx(100.0)
    with pytest.raises(ValueError):
        LfmChirp(fc=1e9, bandwidth=-1.0, duration=1e-6)
    with pytest.raises(ValueError):
        LfmChirp(fc=1e9, bandwidth=1e3, duration=1e-6)  # TBP < 1


def test_sample_lfm_center_and_sweep():
    c = LfmChirp(fc=0.0, bandwidth=10e6, duration=10e-6, amplitude=2.0)
    f_s = 30.1e6  # odd sample count puts one sample exactly at t = 0
    s = sample_lfm(c, f_s)
    assert s.size == 301
    assert s[150] == pytest.approx(2.0 + 0.0j)
    # instantaneous frequency K*t sweeps -B/2 .. B/2
    phase = np.unwrap(np.angle(s))
    inst_f = np.diff(phase) / (2 * np.pi) * f_s
    assert inst_f[0] == pytest.approx(-5e6, rel=0.02)
    assert inst_f[-1] == pytest.approx(5e6, rel=0.02)


def test_sample_lfm_conjugate_symmetry():
    c = LfmChirp(fc=0.0, bandwidth=4e6, duration=5e-6)
    f_s = 20e6
    s = sample_lfm(c, f_s)
    n = s.size
    t = (np.arange(n) - (n - 1) / 2.0) / f_s
    down = np.exp(-1j * np.pi * c.rate * t ** 2)  # rate sign flip
    assert_allclose(np.conj(s), down, atol=1e-12)


def test_sample_lfm_rejects_undersampling():
    c = LfmChirp(fc=0.0, bandwidth=10e6, duration=10e-6)
    with pytest.raises(ValueError):
        sample_lfm(c, 15e6)


# ----------------------------------------------------------- matched filter


def test_matched_filter_unit_energy_peak():
    s = sample_lfm(LfmChirp(0.0, 5e6, 20e-6), 25e6)
    s = s / np.sqrt(np.sum(np.abs(s) ** 2))
    out = matched_filter(s, s)
    assert abs(out[s.size - 1]) == pytest.approx(1.0, abs=1e-12)


def test_matched_filter_delay_recovery():
    ref = sample_lfm(LfmChirp(0.0, 5e6, 10e-6), 25e6)
    sig = np.concatenate([np.zeros(17, dtype=complex), ref])
    out = matched_filter(sig, ref)
    assert np.argmax(np.abs(out)) == ref.size - 1 + 17


def test_matched_filter_compressed_width():
    b = 10e6
    f_s = 500e6
    s = sample_lfm(LfmChirp(0.0, b, 20e-6), f_s)
    out = np.abs(matched_filter(s, s)) ** 2
    half = out.max() / 2.0
    above = np.flatnonzero(out >= half)
    lo, hi = above[0], above[-1]
    # linear interpolation of the half-power crossings
    frac_lo = (out[lo] - half) / (out[lo] - out[lo - 1])
    frac_hi = (out[hi] - half) / (out[hi] - out[hi + 1])
    width = (hi + frac_hi - lo + frac_lo) / f_s
    assert width == pytest.approx(0.886 / b, rel=0.03)


def test_matched_filter_phase_invariance():
    ref = sample_lfm(LfmChirp(0.0, 2e6, 10e-6), 10e6)
    rot = ref * np.exp(1j * 1.234)
    assert_allclose(
        np.abs(matched_filter(rot, ref)), np.abs(matched_filter(ref, ref)), atol=1e-9
    )


def test_matched_filter_rejects_empty():
    with pytest.raises(ValueError):
        matched_filter(np.array([]), np.array([1.0]))


# --------------------------------------------------------- ambiguity surface


def test_ambiguity_peak_is_one():
    env = sample_lfm(LfmChirp(0.0, 1e6, 10e-6), 80e6)
    surf = ambiguity_surface(env, [0.0], [0.0], 80e6)
    assert surf.values[0, 0] == pytest.approx(1.0, abs=1e-9)


def test_ambiguity_matches_closed_form():
    chirp = LfmChirp(0.0, 1e6, 10e-6)
    f_s = 80e6
    env = np.conj(sample_lfm(chirp, f_s))  # falling sweep, the ridge the closed form describes
    delays = (np.arange(-10, 11) * 16) / f_s
    dopplers = np.linspace(-2e5, 2e5, 21)
    surf = ambiguity_surface(env, delays, dopplers, f_s)
    want = lfm_ambiguity_closed_form(
        chirp, surf.delays[:, None], surf.dopplers[None, :]
    )
    assert np.max(np.abs(surf.values - want)) < 1e-3


def test_ambiguity_volume_near_unity():
    chirp = LfmChirp(0.0, 1e6, 10e-6)
    f_s = 80e6
    env = sample_lfm(chirp, f_s)
    delays = (np.arange(-50, 51) * 16) / f_s  # covers [-T, T]
    dopplers = np.linspace(-1.5e6, 1.5e6, 301)
    surf = ambiguity_surface(env, delays, dopplers, f_s)
    assert surf.volume() == pytest.approx(1.0, abs=0.05)


def test_ambiguity_rejects_empty_grid():
    env = sample_lfm(LfmChirp(0.0, 1e6, 10e-6), 4e6)
    with pytest.raises(ValueError):
        ambiguity_surface(env, [], [0.0], 4e6)


def test_closed_form_special_points():
    chirp = LfmChirp(0.0, 2e6, 20e-6)
    assert lfm_ambiguity_closed_form(chirp, 0.0, 0.0) == pytest.approx(1.0)
    # along the ridge f_d = -K*tau the sinc argument vanishes
    tau = 5e-6
    ridge = lfm_ambiguity_closed_form(chirp, tau, -chirp.rate * tau)
    assert ridge == pytest.approx((1.0 - tau / chirp.duration) ** 2, rel=1e-12)
    assert lfm_ambiguity_closed_form(chirp, chirp.duration, 12345.0) == 0.0
    assert lfm_ambiguity_closed_form(chirp, 2 * chirp.duration, 0.0) == 0.0


# -------------------------------------------------------------- pulse shapes


def test_sinc_zero_crossings():
    ps = PulseShape("sinc", f_sy=1e6)
    t = np.arange(-10, 11) / ps.f_sy
    h = pulse_shape_ir(ps, t)
    assert h[10] == pytest.approx(1.0)
    mask = np.ones(21, dtype=bool)
    mask[10] = False
    assert np.max(np.abs(h[mask])) < 1e-12


def test_raised_cosine_beta_zero_is_sinc():
    t = np.linspace(-5e-6, 5e-6, 401)
    rc = pulse_shape_ir(PulseShape("raised-cosine", 1e6, 0.0), t)
    si = pulse_shape_ir(PulseShape("sinc", 1e6), t)
    assert_allclose(rc, si, atol=1e-15)


def test_raised_cosine_singularity_value():
    # beta = 0.2 puts the removable singularity at t = 2.5/f_sy where the
    # limit evaluates to sinc(2.5)*pi/4 = 1/10 exactly
    ps = PulseShape("raised-cosine", 1e6, 0.2)
    t0 = 1.0 / (2 * ps.beta * ps.f_sy)
    val = pulse_shape_ir(ps, np.array([t0, -t0]))
    assert_allclose(val, [0.1, 0.1], rtol=1e-12)
    # continuity against a nearby regular point
    near = pulse_shape_ir(ps, np.array([t0 * (1 + 1e-7)]))
    assert near[0] == pytest.approx(0.1, abs=1e-5)


def test_raised_cosine_zero_isi():
    ps = PulseShape("raised-cosine", 2e6, 0.35)
    n = np.concatenate([np.arange(-10, 0), np.arange(1, 11)])
    h = pulse_shape_ir(ps, n / ps.f_sy)
    assert np.max(np.abs(h)) < 1e-12


def test_rrc_convolved_is_rc():
    f_sy = 1.0
    beta = 0.3
    f_s = 8.0
    span = 64.0
    t = np.arange(-span * f_s, span * f_s + 1) / f_s
    rrc = pulse_shape_ir(PulseShape("root-raised-cosine", f_sy, beta), t)
    conv = np.convolve(rrc, rrc) / f_s
    t_conv = np.arange(conv.size) / f_s - 2 * span
    keep = np.abs(t_conv) <= 8.0
    rc = pulse_shape_ir(PulseShape("raised-cosine", f_sy, beta), t_conv[keep])
    assert np.max(np.abs(conv[keep] - rc)) < 1e-6


def test_pulse_shape_validation():
    with pytest.raises(ValueError):
        PulseShape("gaussian", 1e6)
    with pytest.raises(ValueError):
        PulseShape("sinc", 1e6, beta=1.5)
    assert PulseShape("raised-cosine", 1e6, 0.25).occupied_bandwidth == 1.25e6


# ---------------------------------------------------------------------- BFSK


def test_bfsk_msk_index():
    cfg = BfskConfig(f0=10e3, f1=10.5e3, f_sy=1e3)
    assert cfg.h == pytest.approx(0.5)


def test_bfsk_rejects_low_index():
    with pytest.raises(ValueError):
        BfskConfig(f0=10e3, f1=10.4e3, f_sy=1e3)


def test_bfsk_all_zero_bits_is_pure_tone():
    cfg = BfskConfig(f0=2e3, f1=2.5e3, f_sy=1e3)
    f_s = 50e3
    s = bfsk_modulate([0, 0, 0, 0], cfg, f_s)
    n = np.arange(s.size)
    assert_allclose(s, np.exp(1j * 2 * np.pi * cfg.f0 * n / f_s), atol=1e-9)


def test_bfsk_phase_continuity():
    cfg = BfskConfig(f0=2e3, f1=3e3, f_sy=1e3)
    f_s = 50e3
    s = bfsk_modulate([0, 1, 1, 0, 1], cfg, f_s)
    dphi = np.diff(np.unwrap(np.angle(s)))
    # per-sample increments never exceed the larger tone's step
    assert dphi.max() <= 2 * np.pi * cfg.f1 / f_s + 1e-9
    assert dphi.min() >= 2 * np.pi * cfg.f0 / f_s - 1e-9


def test_bfsk_rejects_bad_inputs():
    cfg = BfskConfig(f0=2e3, f1=3e3, f_sy=1e3)
    with pytest.raises(ValueError):
        bfsk_modulate([0, 1], cfg, 5e3)  # under Nyquist for f1
    with pytest.raises(ValueError):
        bfsk_modulate([], cfg, 50e3)
    with pytest.raises(ValueError):
        bfsk_modulate([0, 2], cfg, 50e3)


# ----------------------------------------------------------- I/Q demodulation


def _qam_passband(fc, theta, f_s, n, f_m=2e3):
    t = np.arange(n) / f_s
    m_i = np.cos(2 * np.pi * f_m * t)
    m_q = np.sin(2 * np.pi * f_m * t)
    carrier = 2 * np.pi * fc * t + theta
    return m_i * np.cos(carrier) - m_q * np.sin(carrier), m_i, m_q


def test_iq_exact_carrier_recovers_half_envelope():
    fc, theta, f_s, n = 100e3, 0.7, 1e6, 20000
    x, m_i, m_q = _qam_passband(fc, theta, f_s, n)
    out = iq_demodulate(x, fc, theta, f_s, cutoff=10e3)
    sl = slice(2000, -2000)  # clear of filter edge transients
    assert_allclose(out.m_i[sl], 0.5 * m_i[sl], atol=5e-3)
    assert_allclose(out.m_q[sl], 0.5 * m_q[sl], atol=5e-3)


def test_iq_phase_error_rotates_constellation():
    fc, theta, f_s, n = 100e3, 0.4, 1e6, 20000
    x, _, _ = _qam_passband(fc, theta, f_s, n)
    d0 = iq_demodulate(x, fc, theta, f_s, cutoff=10e3).envelope
    d1 = iq_demodulate(x, fc, theta - np.pi / 2, f_s, cutoff=10e3).envelope
    sl = slice(2000, -2000)
    rot = np.angle(np.sum(d1[sl] * np.conj(d0[sl])))
    assert abs(rot - np.pi / 2) < 1e-9


def test_iq_frequency_error_spins_constellation():
    fc, theta, f_s, n = 100e3, 0.0, 1e6, 100000
    x, _, _ = _qam_passband(fc, theta, f_s, n)
    df = 100.0
    d0 = iq_demodulate(x, fc, theta, f_s, cutoff=10e3).envelope
    d1 = iq_demodulate(x, fc - df, theta, f_s, cutoff=10e3).envelope
    sl = slice(10000, -10000)
    t = np.arange(n)[sl] / f_s
    phase = np.unwrap(np.angle(d1[sl] * np.conj(d0[sl])))
    slope = np.polyfit(t, phase, 1)[0] / (2 * np.pi)
    assert slope == pytest.approx(df, rel=0.02)


def test_iq_rejects_cutoff_at_carrier():
    with pytest.raises(ValueError):
        iq_demodulate(np.zeros(100), 10e3, 0.0, 1e6, cutoff=10e3)


def test_iq_stream_length_check():
    with pytest.raises(ValueError):
        IqStream(np.zeros(3), np.zeros(4), 1e3, 0.0)


# ---------------------------------------------------------------- ADC metrics


def test_adc_frozen_values():
    m = adc_metrics(AdcModel(bits=12, v_fs=2.0, f_s=1e6))
    assert m["snr_ideal_db"] == pytest.approx(74.0, abs=1e-9)
    assert m["lsb"] == pytest.approx(2.0 / 4096)
    assert m["n_qu"] == pytest.approx((2.0 / 4096) ** 2 / 12)
    assert m["low_bit_caveat"] is False
    assert m["enob"] is None


def test_adc_enob_inverse():
    m = adc_metrics(AdcModel(bits=12, v_fs=2.0, f_s=1e6), sndr_measured=74.0)
    assert m["enob"] == pytest.approx(12.0, abs=1e-9)


def test_adc_low_bit_caveat():
    m = adc_metrics(AdcModel(bits=1, v_fs=1.0, f_s=1e6))
    assert m["snr_ideal_db"] == pytest.approx(7.78)
    assert m["low_bit_caveat"] is True
    with pytest.raises(ValueError):
        AdcModel(bits=0, v_fs=1.0, f_s=1e6)


@given(bits=st.integers(1, 24))
def test_adc_affine_in_bits(bits):
    lo = adc_metrics(AdcModel(bits=bits, v_fs=1.0, f_s=1.0))["snr_ideal_db"]
    hi = adc_metrics(AdcModel(bits=bits + 1, v_fs=1.0, f_s=1.0))["snr_ideal_db"]
    assert hi - lo == pytest.approx(6.02, abs=1e-12)


# ----------------------------------------------------------- RMMSE compression


def test_wiener_weights_white_case_is_matched_filter():
    s = sample_lfm(LfmChirp(0.0, 5e6, 4e-6), 10e6)
    m = s.size
    rho = np.zeros(2 * m - 1)
    rho[m - 1] = 1.0  # single scatterer at the bin under test
    w = _wiener_weights(rho, s, noise_power=1.0)
    # rank-one-plus-identity covariance keeps the solve parallel to s
    cos = abs(np.vdot(w, s)) / (np.linalg.norm(w) * np.linalg.norm(s))
    assert cos == pytest.approx(1.0, abs=1e-10)


def test_rmmse_zero_input():
    s = sample_lfm(LfmChirp(0.0, 5e6, 4e-6), 10e6)
    out = rmmse_compress(np.zeros(120, dtype=complex), s)
    assert out.shape == (120 - s.size + 1,)
    assert np.all(out == 0)


def test_rmmse_white_limit_matches_filter_argmax():
    rng = np.random.default_rng(3)
    s = sample_lfm(LfmChirp(0.0, 5e6, 4e-6), 10e6)
    x = np.zeros(160, dtype=complex)
    x[60] = 1.0
    y = np.convolve(x, s) + 1e-4 * (rng.standard_normal(199) + 1j * rng.standard_normal(199))
    huge_noise = rmmse_compress(y, s, iterations=1, noise_floor=1e9)
    mf = np.lib.stride_tricks.sliding_window_view(y, s.size) @ np.conj(s)
    assert np.argmax(np.abs(huge_noise)) == np.argmax(np.abs(mf))


def test_rmmse_unmasks_weak_scatterer():
    rng = np.random.default_rng(11)
    s = sample_lfm(LfmChirp(0.0, 5e6, 4e-6), 10e6)  # 40 samples
    n_bins = 160
    x = np.zeros(n_bins, dtype=complex)
    x[60] = 1.0
    x[90] = 10 ** (-40 / 20.0)  # 40 dB below
    noise = 10 ** (-80 / 20.0)
    y = np.convolve(x, s)
    y = y + noise * (rng.standard_normal(y.size) + 1j * rng.standard_normal(y.size)) / np.sqrt(2)
    out = rmmse_compress(y, s, iterations=3)
    p = 20 * np.log10(np.abs(out) + 1e-300)
    weak = p[90]
    # residual floor measured away from both mainlobes
    mask = np.ones(n_bins, dtype=bool)
    mask[55:66] = False
    mask[85:96] = False
    assert weak - p[mask].max() >= 20.0
    assert abs(p[60]) < 1.0  # strong target amplitude preserved


def test_rmmse_validates_arguments():
    s = np.ones(8, dtype=complex)
    with pytest.raises(ValueError):
        rmmse_compress(np.ones(4, dtype=complex), s)
    with pytest.raises(ValueError):
        rmmse_compress(np.ones(40, dtype=complex), s, iterations=0)
