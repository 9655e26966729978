"""Phaseless inverse problems.

Quadratic measurements y_i = |<a_i, x>|^2 come in two flavors here:
explicit sampling vectors stacked into a matrix, or diagonal unimodular
masks composed with a unitary DFT (coded diffraction, far zone).  On top
of the forward model sit a spectral initializer, amplitude-flow gradient
descent, classic error-reduction alternating projections, and a small
Fourier-ptychography acquire/recover pair.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class PhaselessProblem:
    """Sampling structure for y = |A x|^2.

    Exactly one of ``vectors`` (rows are the conjugated sampling vectors,
    so A @ x evaluates all inner products) or ``masks`` (L unimodular
    diagonals, each followed by a unitary DFT) must be given.
    """

    n: int
    vectors: np.ndarray = None
    masks: np.ndarray = None

    def __post_init__(self):
        if (self.vectors is None) == (self.masks is None):
            raise ValueError("provide exactly one of vectors or masks")
        if self.vectors is not None:
            v = np.asarray(self.vectors, dtype=complex)
            if v.ndim != 2 or v.shape[1] != self.n:
                raise ValueError("vectors must be (m, n)")
            object.__setattr__(self, "vectors", v)
        else:
            d = np.asarray(self.masks, dtype=complex)
            if d.ndim != 2 or d.shape[1] != self.n:
                raise ValueError("masks must be (L, n)")
            object.__setattr__(self, "masks", d)

    @property
    def m(self) -> int:
        return self.vectors.shape[0] if self.vectors is not None else self.masks.size


def gaussian_problem(m, n, seed) -> PhaselessProblem:
    """Standard complex Gaussian sampling vectors, unit entry variance."""
    rng = np.random.default_rng(seed)
    a = (rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))) / np.sqrt(2.0)
    return PhaselessProblem(n=n, vectors=a)


def coded_problem(n, n_masks, seed) -> PhaselessProblem:
    """Unimodular random-phase masks; statistics are not prescribed by
    the physics, uniform phases are the conventional choice."""
    rng = np.random.default_rng(seed)
    masks = np.exp(2j * np.pi * rng.random((n_masks, n)))
    return PhaselessProblem(n=n, masks=masks)


def _forward(problem, x):
    if problem.vectors is not None:
        return problem.vectors @ x
    return np.fft.fft(problem.masks * x[None, :], axis=1, norm="ortho").ravel()


def _adjoint(problem, w):
    if problem.vectors is not None:
        return problem.vectors.conj().T @ w
    blocks = np.fft.ifft(w.reshape(problem.masks.shape), axis=1, norm="ortho")
    return np.sum(np.conj(problem.masks) * blocks, axis=0)


def _op_norm_sq(problem, n_iter=30, seed=0):
    # masks followed by a unitary DFT give A^H A = L * I exactly
    if problem.masks is not None:
        return float(problem.masks.shape[0])
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(problem.n) + 1j * rng.standard_normal(problem.n)
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(n_iter):
        w = _adjoint(problem, _forward(problem, v))
        lam = np.linalg.norm(w)
        v = w / lam
    return lam


def _sign(z):
    mag = np.abs(z)
    return np.where(mag > 0.0, z / np.where(mag > 0.0, mag, 1.0), 0.0)


def pr_forward(x, problem, noise_sigma=0.0, seed=None) -> np.ndarray:
    """Phaseless measurements |A x|^2, optionally with additive noise
    (clipped at zero to keep the vector physical)."""
    x = np.asarray(x, dtype=complex)
    if x.shape != (problem.n,):
        raise ValueError("x length does not match the problem dimension")
    y = np.abs(_forward(problem, x)) ** 2
    if noise_sigma > 0.0:
        rng = np.random.default_rng(seed)
        y = np.maximum(y + noise_sigma * rng.standard_normal(y.shape), 0.0)
    return y


def phase_invariant_dist(a, b) -> float:
    """min over global phase of ||a - e^{j alpha} b|| / ||b||."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    nb = np.linalg.norm(b)
    gap = np.linalg.norm(a) ** 2 + nb ** 2 - 2.0 * np.abs(np.vdot(a, b))
    return float(np.sqrt(max(gap, 0.0)) / nb)


def spectral_init(y, problem, n_iter=100, seed=0) -> np.ndarray:
    """Leading eigenvector of (1/m) sum y_i a_i a_i^H by power iteration,
    rescaled so the initializer carries the RMS measurement energy.

    The data matrix concentrates around x x^H plus identity for random
    sampling, so its top eigenvector correlates with the signal once
    m is a modest multiple of n.
    """
    y = np.asarray(y, dtype=float)
    if y.shape != (problem.m,):
        raise ValueError("y length does not match the problem")
    if not np.any(y):
        warnings.warn("all measurements are zero; returning the zero vector")
        return np.zeros(problem.n, dtype=complex)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(problem.n) + 1j * rng.standard_normal(problem.n)
    v /= np.linalg.norm(v)
    for _ in range(n_iter):
        w = _adjoint(problem, y * _forward(problem, v)) / problem.m
        v = w / np.linalg.norm(w)
    return v * np.sqrt(np.mean(y))


@dataclass(frozen=True)
class FlowResult:
    x: np.ndarray
    objective: np.ndarray
    diverged: bool = False


def af_objective(x, y, problem) -> float:
    z = _forward(problem, x)
    with np.errstate(over="ignore"):  # inf is meaningful: divergence signal
        return float(np.mean((np.sqrt(y) - np.abs(z)) ** 2))


def af_gradient(x, y, problem) -> np.ndarray:
    """Gradient of the amplitude objective with the subgradient of |z|
    taken as 0 at z = 0.  Real and imaginary parts are the partials with
    respect to Re(x) and Im(x), which is what a finite-difference check
    sees."""
    z = _forward(problem, x)
    return (2.0 / problem.m) * _adjoint(problem, z - np.sqrt(y) * _sign(z))


def amplitude_flow(y, problem, init, steps=500, lr=None) -> FlowResult:
    """Fixed-step gradient descent on (1/m) sum (sqrt(y_i) - |<a_i,x>|)^2.

    The default step targets the local Hessian scale 2||A||^2 / m; a
    non-finite objective aborts with the iterate history intact.
    """
    y = np.asarray(y, dtype=float)
    x = np.asarray(init, dtype=complex).copy()
    if lr is None:
        lr = 0.1 / (2.0 * _op_norm_sq(problem) / problem.m)
    history = [af_objective(x, y, problem)]
    for _ in range(steps):
        x = x - lr * af_gradient(x, y, problem)
        obj = af_objective(x, y, problem)
        history.append(obj)
        if not np.isfinite(obj):
            return FlowResult(x, np.asarray(history), diverged=True)
    return FlowResult(x, np.asarray(history))


@dataclass(frozen=True)
class ErrorReductionResult:
    x: np.ndarray
    residuals: np.ndarray


def error_reduction(y, problem, init, iters=200) -> ErrorReductionResult:
    """Alternating projections between the modulus set (replace
    magnitudes by sqrt(y), keep the phase) and the range of the forward
    operator.  Both are closest-point projections, so the residual
    ||sqrt(y) - |A x||| never increases."""
    y = np.asarray(y, dtype=float)
    root_y = np.sqrt(y)
    x = np.asarray(init, dtype=complex).copy()
    if problem.vectors is not None:
        pinv = np.linalg.pinv(problem.vectors)
        project = lambda w: pinv @ w
    else:
        n_masks = problem.masks.shape[0]
        project = lambda w: _adjoint(problem, w) / n_masks
    residuals = [float(np.linalg.norm(root_y - np.abs(_forward(problem, x))))]
    for _ in range(iters):
        z = _forward(problem, x)
        x = project(root_y * _sign(z))
        residuals.append(float(np.linalg.norm(root_y - np.abs(_forward(problem, x)))))
    return ErrorReductionResult(x, np.asarray(residuals))


# ----------------------------------------------------------------------
# Fourier ptychography on a square grid.  Spectra live in natural FFT
# ordering; shifting the illumination rolls the object spectrum across a
# fixed low-pass pupil.

def _index_radius(n):
    ix = np.fft.fftfreq(n) * n
    return np.hypot(ix[:, None], ix[None, :])


def circular_pupil(n, radius_bins) -> np.ndarray:
    return _index_radius(n) <= radius_bins


def pupil_radius_bins(na, wavelength, dx, n) -> float:
    """Cutoff NA * 2 pi / lambda expressed in spectral grid cells for a
    field sampled every dx over n points."""
    return na * n * dx / wavelength


@dataclass(frozen=True)
class FpSystem:
    """Ground-truth object spectrum, pupil mask, and LED offsets (in
    spectral grid cells).  The pupil and every shifted copy must stay
    clear of the band edge so circular shifts never alias."""

    object_spectrum: np.ndarray
    pupil: np.ndarray
    offsets: np.ndarray
    min_overlap: float = 0.6

    def __post_init__(self):
        u = np.asarray(self.object_spectrum, dtype=complex)
        pup = np.asarray(self.pupil, dtype=bool)
        if u.ndim != 2 or u.shape[0] != u.shape[1] or u.shape != pup.shape:
            raise ValueError("spectrum and pupil must be square and matching")
        off = np.atleast_2d(np.asarray(self.offsets, dtype=int))
        if off.shape[1] != 2:
            raise ValueError("offsets must be (K, 2) grid shifts")
        n = u.shape[0]
        ix = np.fft.fftfreq(n) * n
        gx, gy = np.meshgrid(ix, ix, indexing="ij")
        extent = max(np.max(np.abs(gx[pup])), np.max(np.abs(gy[pup])))
        if extent + np.max(np.abs(off)) >= n / 2:
            raise ValueError("a shifted pupil reaches the band edge")
        object.__setattr__(self, "object_spectrum", u)
        object.__setattr__(self, "pupil", pup)
        object.__setattr__(self, "offsets", off)

    @property
    def n(self) -> int:
        return self.object_spectrum.shape[0]

    @property
    def n_leds(self) -> int:
        return self.offsets.shape[0]


def fp_acquire(system: FpSystem, k) -> np.ndarray:
    """Intensity under the k-th oblique plane wave: the object spectrum
    slides by the illumination frequency, the fixed pupil low-passes it."""
    shifted = np.roll(system.object_spectrum, system.offsets[k], axis=(0, 1))
    return np.abs(np.fft.ifft2(shifted * system.pupil, norm="ortho")) ** 2


def spectral_overlap(system: FpSystem) -> float:
    """Smallest nearest-neighbor overlap fraction among the shifted
    pupils (1.0 for a single LED)."""
    if system.n_leds < 2:
        return 1.0
    supports = [np.roll(system.pupil, -off, axis=(0, 1)) for off in system.offsets]
    area = np.count_nonzero(system.pupil)
    worst = 1.0
    for i, s_i in enumerate(supports):
        best = 0.0
        for j, s_j in enumerate(supports):
            if i != j:
                best = max(best, np.count_nonzero(s_i & s_j) / area)
        worst = min(worst, best)
    return worst


@dataclass(frozen=True)
class FpRecovery:
    object_estimate: np.ndarray
    spectrum: np.ndarray
    coverage: np.ndarray
    unreliable: bool = False
    info: dict = field(default_factory=dict)


def fp_recover(intensities, system: FpSystem, sweeps=50) -> FpRecovery:
    """Stitch a synthetic spectrum by alternating projections.

    Per LED: shift the working spectrum, keep the pupil passband,
    inverse transform, impose the measured magnitudes without touching
    the phase, transform back, and write the passband into place.  The
    on-axis (or first) measurement seeds the estimate.  Disjoint pupils
    cannot exchange phase information, so that geometry is only flagged,
    not repaired.
    """
    intensities = np.asarray(intensities, dtype=float)
    if intensities.shape != (system.n_leds, system.n, system.n):
        raise ValueError("need one intensity frame per LED")
    unreliable = system.n_leds > 1 and spectral_overlap(system) == 0.0

    order = np.argsort(np.hypot(*np.asarray(system.offsets, dtype=float).T))
    seed_k = order[0]
    est = np.fft.fft2(np.sqrt(intensities[seed_k]), norm="ortho")
    est = np.roll(est * system.pupil, -system.offsets[seed_k], axis=(0, 1))

    coverage = np.zeros((system.n, system.n), dtype=bool)
    for off in system.offsets:
        coverage |= np.roll(system.pupil, -off, axis=(0, 1))

    for _ in range(sweeps):
        for k in order:
            shifted = np.roll(est, system.offsets[k], axis=(0, 1))
            low = shifted * system.pupil
            img = np.fft.ifft2(low, norm="ortho")
            img = np.sqrt(intensities[k]) * _sign(img)
            corrected = np.fft.fft2(img, norm="ortho")
            shifted[system.pupil] = corrected[system.pupil]
            est = np.roll(shifted, -system.offsets[k], axis=(0, 1))

    return FpRecovery(
        object_estimate=np.fft.ifft2(est, norm="ortho"),
        spectrum=est,
        coverage=coverage,
        unreliable=unreliable,
    )
