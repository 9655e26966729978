"""Multiplicative speckle synthesis and local-statistics despeckling."""

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import uniform_filter


@dataclass(frozen=True)
class SpeckledImage:
    """Clean image y, unit-mean noise field zeta, and product z."""

    y: np.ndarray
    zeta: np.ndarray
    z: np.ndarray


def apply_speckle(y, sigma_mu, seed) -> SpeckledImage:
    """Multiply y by i.i.d. unit-mean noise with variance sigma_mu**2.

    The noise field is Gamma(1/sigma_mu**2, scale=sigma_mu**2): always
    positive, mean exactly 1, and for sigma_mu = 1/sqrt(looks) it is the
    usual multi-look intensity speckle.  The seed is mandatory so every
    speckled product can be regenerated.  sigma_mu = 0 returns y
    untouched with zeta = 1 everywhere.
    """
    y = np.asarray(y, dtype=float)
    if sigma_mu < 0.0:
        raise ValueError("sigma_mu must be nonnegative")
    if sigma_mu == 0.0:
        zeta = np.ones_like(y)
        return SpeckledImage(y, zeta, y.copy())
    if seed is None:
        raise ValueError("seed is required when sigma_mu > 0")
    rng = np.random.default_rng(seed)
    shape = 1.0 / sigma_mu ** 2
    zeta = rng.gamma(shape, scale=sigma_mu ** 2, size=y.shape)
    return SpeckledImage(y, zeta, y * zeta)


def lee_filter(z, sigma_mu, window=7) -> np.ndarray:
    """Adaptive local-mean despeckle.

    out = zbar + s2 / (zbar**2 * sigma_mu**2 + s2) * (z - zbar)

    with zbar and s2 the mean and variance over the sliding window
    (replicate padding at the edges).  Flat regions pull the gain toward
    zero and smooth hard; structured regions keep gain near one and pass
    detail through.  sigma_mu = 0 is an exact passthrough.
    """
    z = np.asarray(z, dtype=float)
    if window < 3 or window % 2 == 0:
        raise ValueError("window must be odd and >= 3")
    if sigma_mu < 0.0:
        raise ValueError("sigma_mu must be nonnegative")
    if sigma_mu == 0.0:
        return z.copy()
    zbar = uniform_filter(z, size=window, mode="nearest")
    z2bar = uniform_filter(z * z, size=window, mode="nearest")
    s2 = np.maximum(z2bar - zbar ** 2, 0.0)
    denom = zbar ** 2 * sigma_mu ** 2 + s2
    gain = np.where(denom > 0.0, s2 / np.where(denom > 0.0, denom, 1.0), 0.0)
    return zbar + gain * (z - zbar)
