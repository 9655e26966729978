"""Waveform generation and receive-side processing: LFM chirps, matched
filtering, ambiguity surfaces, Nyquist pulse shaping, BFSK, I/Q
demodulation, ADC figures of merit, and iterative MMSE pulse compression.
"""

from dataclasses import dataclass

import numpy as np
from scipy import signal as _sig


@dataclass(frozen=True)
class LfmChirp:
    """Linear FM pulse: center frequency, swept bandwidth, duration, amplitude.

    The chirp rate is ``K = B/T`` and the time-bandwidth product ``B*T``
    must be at least 1 for the pulse to be meaningfully compressible.
    """

    fc: float
    bandwidth: float
    duration: float
    amplitude: float = 1.0

    def __post_init__(self):
        if self.bandwidth <= 0 or self.duration <= 0:
            raise ValueError("bandwidth and duration must be positive")
        if self.tbp < 1.0:
            raise ValueError("time-bandwidth product must be >= 1")

    @property
    def rate(self) -> float:
        return self.bandwidth / self.duration

    @property
    def tbp(self) -> float:
        return self.bandwidth * self.duration


def sample_lfm(chirp: LfmChirp, f_s: float, baseband: bool = True) -> np.ndarray:
    """Sample the chirp's complex envelope at rate ``f_s``.

    Baseband samples are A*exp(j*pi*K*t^2) on the symmetric support
    t in [-T/2, T/2]; the instantaneous frequency sweeps -B/2 to B/2.
    With ``baseband=False`` the carrier exp(j*2*pi*fc*t) is included.
    """
    b = chirp.bandwidth
    needed = 2.0 * b if baseband else 2.0 * (chirp.fc + b / 2.0)
    if f_s < needed:
        raise ValueError(f"sample rate {f_s} too low, need >= {needed}")
    n = int(round(chirp.duration * f_s))
    t = (np.arange(n) - (n - 1) / 2.0) / f_s
    phase = np.pi * chirp.rate * t ** 2
    if not baseband:
        phase = phase + 2.0 * np.pi * chirp.fc * t
    return chirp.amplitude * np.exp(1j * phase)


def matched_filter(received: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Correlate ``received`` against ``reference`` (full overlap range).

    Equivalent to convolving with the conjugated time-reversed reference.
    Zero relative delay lands at output index ``len(reference) - 1``.
    """
    received = np.asarray(received)
    reference = np.asarray(reference)
    if received.size == 0 or reference.size == 0:
        raise ValueError("matched_filter inputs must be nonempty")
    return _sig.fftconvolve(received, np.conj(reference[::-1]), mode="full")


@dataclass(frozen=True)
class AmbiguitySurface:
    """Delay/Doppler map of |chi(tau, f_d)|^2 for a unit-energy envelope."""

    delays: np.ndarray
    dopplers: np.ndarray
    values: np.ndarray
    energy: float

    def volume(self) -> float:
        """Discrete integral of the surface over the evaluated grid."""
        dtau = self.delays[1] - self.delays[0] if self.delays.size > 1 else 1.0
        dfd = self.dopplers[1] - self.dopplers[0] if self.dopplers.size > 1 else 1.0
        return float(np.sum(self.values) * dtau * dfd)


def ambiguity_surface(envelope, delays, dopplers, f_s: float) -> AmbiguitySurface:
    """Evaluate the narrowband ambiguity surface of a sampled envelope.

    chi(tau, f_d) = integral u(t) u*(t + tau) exp(j*2*pi*f_d*t) dt is
    computed by Riemann sums on the sample lattice; requested delays are
    snapped to whole samples.  The envelope is normalized to unit energy
    (sum |u|^2 / f_s = 1) so the surface peaks at exactly 1 at the origin;
    the original energy is reported on the result.
    """
    u = np.asarray(envelope, dtype=complex)
    delays = np.atleast_1d(np.asarray(delays, dtype=float))
    dopplers = np.atleast_1d(np.asarray(dopplers, dtype=float))
    if u.size == 0 or delays.size == 0 or dopplers.size == 0:
        raise ValueError("empty envelope or evaluation grid")
    dt = 1.0 / f_s
    energy = float(np.sum(np.abs(u) ** 2) * dt)
    if energy == 0.0:
        raise ValueError("zero-energy envelope")
    u = u / np.sqrt(energy)
    n = u.size
    lags = np.round(delays * f_s).astype(int)
    t = (np.arange(n) - (n - 1) / 2.0) * dt

    # products[i, :] holds u(t) u*(t + tau_i) over the overlapping support
    products = np.zeros((lags.size, n), dtype=complex)
    for i, lag in enumerate(lags):
        if abs(lag) >= n:
            continue
        if lag >= 0:
            products[i, : n - lag] = u[: n - lag] * np.conj(u[lag:])
        else:
            products[i, -lag:] = u[-lag:] * np.conj(u[: n + lag])
    kernel = np.exp(1j * 2.0 * np.pi * t[:, None] * dopplers[None, :])
    chi = dt * (products @ kernel)
    return AmbiguitySurface(
        delays=lags * dt, dopplers=dopplers, values=np.abs(chi) ** 2, energy=energy
    )


def lfm_ambiguity_closed_form(chirp: LfmChirp, tau, f_d):
    """Closed-form |chi|^2 of an LFM pulse at delay ``tau``, Doppler ``f_d``.

    ((1 - |tau|/T) * sin(x)/x)^2 with x = pi*T*(K*tau + f_d)*(1 - |tau|/T);
    zero outside |tau| > T.  Accepts scalars or arrays.  The ridge
    f_d = -K*tau corresponds to a falling frequency sweep, i.e. the
    conjugate of the rising sweep that sample_lfm produces; evaluate
    ambiguity_surface on the conjugate envelope when comparing the two.
    """
    tau = np.asarray(tau, dtype=float)
    f_d = np.asarray(f_d, dtype=float)
    t_dur = chirp.duration
    frac = 1.0 - np.abs(tau) / t_dur
    inside = frac > 0.0
    frac = np.where(inside, frac, 0.0)
    x = np.pi * t_dur * (chirp.rate * tau + f_d) * frac
    # np.sinc is sin(pi z)/(pi z), so sin(x)/x = sinc(x/pi) with the 0 limit built in
    out = (frac * np.sinc(x / np.pi)) ** 2
    return out if out.shape else float(out)


@dataclass(frozen=True)
class PulseShape:
    """Nyquist pulse family selector: sinc, raised-cosine or its root."""

    kind: str
    f_sy: float
    beta: float = 0.0

    _KINDS = ("sinc", "raised-cosine", "root-raised-cosine")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ValueError(f"kind must be one of {self._KINDS}")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError("beta must lie in [0, 1]")
        if self.f_sy <= 0:
            raise ValueError("symbol rate must be positive")

    @property
    def occupied_bandwidth(self) -> float:
        return (1.0 + self.beta) * self.f_sy


def _raised_cosine(x: np.ndarray, beta: float) -> np.ndarray:
    # sinc(x) * cos(pi*beta*x) / (1 - (2*beta*x)^2), x in symbol units
    if beta == 0.0:
        return np.sinc(x)
    den = 1.0 - (2.0 * beta * x) ** 2
    singular = np.abs(den) < 1e-10
    safe = np.where(singular, 1.0, den)
    out = np.sinc(x) * np.cos(np.pi * beta * x) / safe
    # analytic limit at x = +-1/(2*beta): sinc(1/(2*beta)) * pi/4
    out = np.where(singular, np.sinc(1.0 / (2.0 * beta)) * np.pi / 4.0, out)
    return out


def _root_raised_cosine(x: np.ndarray, beta: float) -> np.ndarray:
    if beta == 0.0:
        return np.sinc(x)
    x0 = np.abs(x) < 1e-10
    xs = np.abs(np.abs(x) - 1.0 / (4.0 * beta)) < 1e-10
    safe = np.where(x0 | xs, 0.5, x)
    num = np.sin(np.pi * safe * (1.0 - beta)) + 4.0 * beta * safe * np.cos(
        np.pi * safe * (1.0 + beta)
    )
    den = np.pi * safe * (1.0 - (4.0 * beta * safe) ** 2)
    out = num / den
    out = np.where(x0, 1.0 - beta + 4.0 * beta / np.pi, out)
    lim = (beta / np.sqrt(2.0)) * (
        (1.0 + 2.0 / np.pi) * np.sin(np.pi / (4.0 * beta))
        + (1.0 - 2.0 / np.pi) * np.cos(np.pi / (4.0 * beta))
    )
    return np.where(xs, lim, out)


def pulse_shape_ir(shape: PulseShape, t_grid) -> np.ndarray:
    """Impulse response samples of the selected Nyquist pulse on ``t_grid``.

    The sinc and raised-cosine responses have unit peak and vanish at all
    nonzero symbol instants.  The root-raised-cosine is scaled by
    sqrt(f_sy) so that convolving it with itself (Riemann sum, step dt)
    reproduces the raised cosine of the same rolloff.
    """
    x = np.asarray(t_grid, dtype=float) * shape.f_sy
    if shape.kind == "sinc":
        return np.sinc(x)
    if shape.kind == "raised-cosine":
        return _raised_cosine(x, shape.beta)
    return np.sqrt(shape.f_sy) * _root_raised_cosine(x, shape.beta)


@dataclass(frozen=True)
class BfskConfig:
    """Binary FSK tone pair and symbol rate."""

    f0: float
    f1: float
    f_sy: float

    def __post_init__(self):
        if self.f_sy <= 0:
            raise ValueError("symbol rate must be positive")
        if self.h < 0.5:
            raise ValueError(
                f"modulation index h = {self.h:.3f} < 0.5 breaks tone orthogonality"
            )

    @property
    def h(self) -> float:
        return abs(self.f1 - self.f0) / self.f_sy


def bfsk_modulate(bits, cfg: BfskConfig, f_s: float) -> np.ndarray:
    """Continuous-phase BFSK complex baseband signal.

    Each bit occupies 1/f_sy seconds at tone f0 (bit 0) or f1 (bit 1);
    phase accumulates across symbol boundaries so the trajectory never
    jumps.
    """
    if f_s <= 2.0 * max(cfg.f0, cfg.f1):
        raise ValueError("sample rate must exceed twice the larger tone")
    bits = np.asarray(bits).astype(int)
    if bits.size == 0:
        raise ValueError("empty bit sequence")
    if np.any((bits != 0) & (bits != 1)):
        raise ValueError("bits must be 0 or 1")
    n_sym = int(round(f_s / cfg.f_sy))
    if n_sym < 1:
        raise ValueError("fewer than one sample per symbol")
    inst_freq = np.where(np.repeat(bits, n_sym) == 1, cfg.f1, cfg.f0)
    # phase[n] integrates frequency over samples 0..n-1, so phase[0] = 0
    phase = 2.0 * np.pi * np.concatenate(([0.0], np.cumsum(inst_freq[:-1]))) / f_s
    return np.exp(1j * phase)


@dataclass(frozen=True)
class IqStream:
    """Demodulated in-phase/quadrature pair with its carrier bookkeeping."""

    m_i: np.ndarray
    m_q: np.ndarray
    fc: float
    theta_c: float

    def __post_init__(self):
        if len(self.m_i) != len(self.m_q):
            raise ValueError("I and Q sequences must have equal length")

    @property
    def envelope(self) -> np.ndarray:
        return self.m_i + 1j * self.m_q


def iq_demodulate(
    passband,
    fc_est: float,
    phase_est: float,
    f_s: float,
    cutoff: float,
    f_sy: float | None = None,
) -> IqStream:
    """Quadrature demodulate a real passband signal.

    Multiplies by cos/-sin local oscillators at the estimated carrier and
    lowpasses each product with a Hamming-windowed sinc FIR spanning eight
    symbol periods (eight cutoff periods when ``f_sy`` is omitted), with
    the filter's group delay compensated.  An exact carrier estimate
    recovers (0.5*m_I, 0.5*m_Q); a phase error rotates the constellation
    and a frequency error spins it.
    """
    x = np.asarray(passband, dtype=float)
    if cutoff >= fc_est:
        raise ValueError("lowpass cutoff must be below the carrier")
    if cutoff <= 0 or f_s <= 0:
        raise ValueError("cutoff and sample rate must be positive")
    span = 8.0 / (f_sy if f_sy is not None else cutoff)
    ntaps = int(round(span * f_s))
    ntaps += 1 - (ntaps % 2)  # odd length keeps the group delay integral
    taps = _sig.firwin(ntaps, cutoff, fs=f_s, window="hamming")
    t = np.arange(x.size) / f_s
    lo = 2.0 * np.pi * fc_est * t + phase_est
    i_branch = _sig.fftconvolve(x * np.cos(lo), taps, mode="same")
    q_branch = _sig.fftconvolve(x * (-np.sin(lo)), taps, mode="same")
    return IqStream(m_i=i_branch, m_q=q_branch, fc=fc_est, theta_c=phase_est)


@dataclass(frozen=True)
class AdcModel:
    """Ideal ADC description: bit depth, full-scale voltage, sample rate."""

    bits: int
    v_fs: float
    f_s: float

    def __post_init__(self):
        if self.bits < 1:
            raise ValueError("bits must be >= 1")
        if self.v_fs <= 0 or self.f_s <= 0:
            raise ValueError("v_fs and f_s must be positive")

    @property
    def lsb(self) -> float:
        return self.v_fs / 2 ** self.bits

    @property
    def n_qu(self) -> float:
        return self.lsb ** 2 / 12.0


def adc_metrics(model: AdcModel, sndr_measured: float | None = None) -> dict:
    """Ideal SNR, quantization noise, and (optionally) effective bits.

    snr_ideal follows the full-scale sinusoid rule 6.02*B + 1.76 dB; the
    rule is only approximate below 4 bits, which the ``low_bit_caveat``
    flag reports.  With a measured SNDR the effective number of bits is
    (SNDR - 1.76)/6.02.
    """
    out = {
        "snr_ideal_db": 6.02 * model.bits + 1.76,
        "lsb": model.lsb,
        "n_qu": model.n_qu,
        "low_bit_caveat": model.bits < 4,
        "enob": None,
    }
    if sndr_measured is not None:
        out["enob"] = (sndr_measured - 1.76) / 6.02
    return out


def _shifted_outer_products(waveform: np.ndarray):
    """Stack of s_k s_k^H for k = -(M-1)..(M-1), s_k the k-shifted waveform."""
    m = waveform.size
    shifts = np.zeros((2 * m - 1, m), dtype=complex)
    for idx, k in enumerate(range(-(m - 1), m)):
        if k >= 0:
            shifts[idx, k:] = waveform[: m - k]
        else:
            shifts[idx, : m + k] = waveform[-k:]
    outers = shifts[:, :, None] * np.conj(shifts[:, None, :])
    return shifts, outers


def _wiener_weights(rho_window, waveform, noise_power):
    """Single-bin MMSE weights for a power window rho(l-M+1..l+M-1).

    With the structured covariance degenerate to (near) noise-only, the
    weights collapse to a scaled matched filter.
    """
    waveform = np.asarray(waveform, dtype=complex)
    rho_window = np.asarray(rho_window, dtype=float)
    m = waveform.size
    if rho_window.size != 2 * m - 1:
        raise ValueError("rho window must have length 2*M - 1")
    _, outers = _shifted_outer_products(waveform)
    cov = np.tensordot(rho_window, outers, axes=1) + noise_power * np.eye(m)
    try:
        w = np.linalg.solve(cov, waveform)
    except np.linalg.LinAlgError:
        load = 1e-3 * np.real(np.trace(cov)) / m
        w = np.linalg.solve(cov + load * np.eye(m), waveform)
    return rho_window[m - 1] * w


def rmmse_compress(
    received,
    waveform,
    iterations: int = 3,
    noise_floor: float | None = None,
) -> np.ndarray:
    """Iterative per-bin MMSE pulse compression (adaptive sidelobe control).

    Starts from the normalized matched-filter profile, then repeatedly
    rebuilds each range bin's structured covariance from the current
    power estimates of the 2M-1 bins whose returns overlap it and applies
    the resulting MMSE weights.  The noise term defaults to 1e-6 of the
    current peak power; singular covariances fall back to diagonal
    loading at 1e-3 * trace/M.
    """
    y = np.asarray(received, dtype=complex)
    s = np.asarray(waveform, dtype=complex)
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    m = s.size
    if m >= y.size:
        raise ValueError("waveform must be shorter than the received sequence")
    n_bins = y.size - m + 1
    windows = np.lib.stride_tricks.sliding_window_view(y, m)
    s_energy = float(np.sum(np.abs(s) ** 2))
    x_hat = (windows @ np.conj(s)) / s_energy
    if not np.any(x_hat):
        return np.zeros(n_bins, dtype=complex)

    _, outers = _shifted_outer_products(s)
    outers_flat = outers.reshape(2 * m - 1, m * m)
    eye = np.eye(m)
    for _ in range(iterations):
        rho = np.abs(x_hat) ** 2
        sigma2 = noise_floor if noise_floor is not None else 1e-6 * rho.max()
        rho_pad = np.concatenate([np.zeros(m - 1), rho, np.zeros(m - 1)])
        rho_windows = np.lib.stride_tricks.sliding_window_view(rho_pad, 2 * m - 1)
        cov = (rho_windows @ outers_flat).reshape(n_bins, m, m)
        cov += sigma2 * eye
        try:
            w = np.linalg.solve(cov, np.broadcast_to(s, (n_bins, m))[..., None])
        except np.linalg.LinAlgError:
            load = 1e-3 * np.real(np.trace(cov, axis1=1, axis2=2)) / m
            cov += load[:, None, None] * eye
            w = np.linalg.solve(cov, np.broadcast_to(s, (n_bins, m))[..., None])
        w = rho[:, None] * w[..., 0]
        x_hat = np.sum(np.conj(w) * windows, axis=1)
    return x_hat
