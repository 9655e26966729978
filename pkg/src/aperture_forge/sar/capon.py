"""Adaptive (Capon) imaging from an aperture-by-frequency data matrix.

The data matrix Z holds one complex sample per (aperture position,
frequency bin).  A sample covariance is built from heavily overlapped
2-D sub-blocks, and each pixel's power estimate minimizes output power
subject to unit gain on that pixel's steering vector:

    sigma^2(x, y) = 1 / (v^H (R + alpha I)^-1 v)

Diagonal loading alpha trades adaptivity for robustness; alpha -> inf
recovers the conventional beamformer scan.
"""

from dataclasses import dataclass

import numpy as np

from ..core import C_LIGHT


@dataclass(frozen=True)
class CaponProblem:
    """Data plus steering model for one adaptive imaging run.

    z: (M, N) complex matrix, aperture positions down the rows and
        frequency bins across the columns.
    steering: callable (x, y, block_shape) -> complex vector of length
        block_shape[0] * block_shape[1], unit norm.
    loading: diagonal loading alpha >= 0.
    block_shape: covariance sub-block (P, L); default (M//4, N//4).
    """

    z: np.ndarray
    steering: object
    loading: float = 0.0
    block_shape: tuple = None

    def __post_init__(self):
        z = np.asarray(self.z, dtype=complex)
        if z.ndim != 2 or min(z.shape) < 4:
            raise ValueError("z must be 2-D with at least 4 rows and columns")
        object.__setattr__(self, "z", z)
        if self.loading < 0.0:
            raise ValueError("loading must be nonnegative")
        shape = self.block_shape
        if shape is None:
            shape = (z.shape[0] // 4, z.shape[1] // 4)
        p, l = int(shape[0]), int(shape[1])
        if p < 1 or l < 1 or p > z.shape[0] or l > z.shape[1]:
            raise ValueError("block_shape must fit inside z")
        object.__setattr__(self, "block_shape", (p, l))

    def sample_covariance(self) -> np.ndarray:
        """Mean outer product over 75%-overlapped sub-blocks of Z."""
        p, l = self.block_shape
        m, n = self.z.shape
        hop_p = max(p // 4, 1)
        hop_l = max(l // 4, 1)
        acc = np.zeros((p * l, p * l), dtype=complex)
        count = 0
        for i in range(0, m - p + 1, hop_p):
            for j in range(0, n - l + 1, hop_l):
                snap = self.z[i:i + p, j:j + l].ravel()
                acc += np.outer(snap, np.conj(snap))
                count += 1
        return acc / count


def linear_phase_steering(f_c, d_u, d_f, r_ref):
    """Steering factory for a small scene at standoff r_ref.

    Cross-range x turns into a phase ramp across aperture steps d_u
    (two-way, small-angle), downrange y into a ramp across frequency
    steps d_f.  Valid while |x| << r_ref.
    """
    if f_c <= 0 or d_u <= 0 or d_f <= 0 or r_ref <= 0:
        raise ValueError("steering parameters must be positive")

    def v(x, y, block_shape):
        p, l = block_shape
        wx = 4.0 * np.pi * f_c * d_u * x / (C_LIGHT * r_ref)
        wy = -4.0 * np.pi * d_f * y / C_LIGHT
        vec = np.exp(
            1j * (wx * np.arange(p)[:, None] + wy * np.arange(l)[None, :])
        ).ravel()
        return vec / np.sqrt(vec.size)

    return v


def _steering_matrix(problem, x_grid, y_grid):
    p, l = problem.block_shape
    cols = []
    for x in np.asarray(x_grid, dtype=float):
        for y in np.asarray(y_grid, dtype=float):
            cols.append(problem.steering(x, y, (p, l)))
    return np.stack(cols, axis=1)


def capon_image(problem: CaponProblem, x_grid, y_grid) -> np.ndarray:
    """Capon power estimate on the (x, y) pixel lattice.

    With loading == 0 the sample covariance must be full rank; a
    rank-deficient R raises with a pointer at the loading knob rather
    than returning a numerically meaningless inverse.
    """
    r_hat = problem.sample_covariance()
    dim = r_hat.shape[0]
    if problem.loading == 0.0:
        w = np.linalg.eigvalsh(r_hat)
        if w[0] <= w[-1] * 1e-10:
            raise ValueError(
                "sample covariance is rank deficient; set loading > 0"
            )
    r_inv = np.linalg.inv(r_hat + problem.loading * np.eye(dim))
    v = _steering_matrix(problem, x_grid, y_grid)
    denom = np.einsum("ip,ij,jp->p", np.conj(v), r_inv, v).real
    image = 1.0 / denom
    return image.reshape(len(x_grid), len(y_grid))


def conventional_image(problem: CaponProblem, x_grid, y_grid) -> np.ndarray:
    """Conventional beamformer scan v^H R v on the same covariance."""
    r_hat = problem.sample_covariance()
    v = _steering_matrix(problem, x_grid, y_grid)
    power = np.einsum("ip,ij,jp->p", np.conj(v), r_hat, v).real
    return power.reshape(len(x_grid), len(y_grid))


def matched_image(problem: CaponProblem, x_grid, y_grid) -> np.ndarray:
    """Full-aperture matched scan |sum Z .* conj(V)|^2 (no smoothing)."""
    m, n = problem.z.shape
    out = np.empty((len(x_grid), len(y_grid)))
    for i, x in enumerate(np.asarray(x_grid, dtype=float)):
        for j, y in enumerate(np.asarray(y_grid, dtype=float)):
            v_full = problem.steering(x, y, (m, n)).reshape(m, n)
            out[i, j] = np.abs(np.sum(problem.z * np.conj(v_full))) ** 2
    return out


def synthesize_capon_data(sources, m, n, f_c, d_u, d_f, r_ref,
                          noise_sigma=0.0, seed=None) -> np.ndarray:
    """Build an (m, n) data matrix from point sources plus noise.

    sources: iterable of (x, y, complex amplitude); the phase model is
    the same ramp pair used by linear_phase_steering, so recovered
    positions line up with the imaging grid by construction.
    """
    z = np.zeros((m, n), dtype=complex)
    rows = np.arange(m)[:, None]
    cols = np.arange(n)[None, :]
    for x, y, amp in sources:
        wx = 4.0 * np.pi * f_c * d_u * x / (C_LIGHT * r_ref)
        wy = -4.0 * np.pi * d_f * y / C_LIGHT
        z += amp * np.exp(1j * (wx * rows + wy * cols))
    if noise_sigma < 0.0:
        raise ValueError("noise_sigma must be nonnegative")
    if noise_sigma > 0.0:
        if seed is None:
            raise ValueError("seed is required when noise_sigma > 0")
        rng = np.random.default_rng(seed)
        z += noise_sigma / np.sqrt(2.0) * (
            rng.standard_normal(z.shape) + 1j * rng.standard_normal(z.shape)
        )
    return z
