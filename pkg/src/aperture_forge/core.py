"""Shared numerical substrate: uniform complex grids, physical constants,
direction-cosine coordinate handling, and propagating-wave field evaluation.

Sign conventions used throughout the package
--------------------------------------------
A monochromatic plane wave propagating along unit vector ``s`` is

    exp(j*2*pi*(f*t - k.x))        with k = s / lambda  (cycles/m),

i.e. the spatial phase advances as ``exp(-j*2*pi*k.x)`` and steering
compensation applies the conjugate ``exp(+j*...)``.  Discrete Fourier
transforms are unscaled forward and carry 1/N on the inverse.
"""

from dataclasses import dataclass

import numpy as np

C_LIGHT = 299792458.0
C_SOUND_DEFAULT = 1500.0
K_BOLTZMANN = 1.380649e-23

# guards tan(AZ) at the visible-space horizon
_HORIZON_EPS = 1e-12


@dataclass(frozen=True)
class Constants:
    """Physical constants bundle; immutable once built."""

    c_light: float = C_LIGHT
    c_sound: float = C_SOUND_DEFAULT
    k_boltzmann: float = K_BOLTZMANN

    def __post_init__(self):
        if self.c_sound <= 0:
            raise ValueError("c_sound must be positive")


@dataclass(frozen=True)
class Axis:
    """Uniform sample axis described by start, step and unit label."""

    start: float
    step: float
    unit: str = ""

    def __post_init__(self):
        if not (np.isfinite(self.start) and np.isfinite(self.step)):
            raise ValueError("axis start/step must be finite")
        if self.step <= 0:
            raise ValueError("axis step must be positive")

    def values(self, n: int) -> np.ndarray:
        return self.start + self.step * np.arange(n)


class ComplexGrid:
    """2-D complex samples on a uniform lattice.

    Parameters
    ----------
    data : array_like
        Complex matrix, row-major; rows run along ``axis0``.
    axis0, axis1 : Axis
        Sampling descriptions of the two dimensions.

    The sample array is frozen after construction; derived products are
    always new grids.
    """

    def __init__(self, data, axis0: Axis, axis1: Axis):
        arr = np.array(data, dtype=complex)
        if arr.ndim != 2:
            raise ValueError("ComplexGrid data must be 2-D")
        if not np.all(np.isfinite(arr)):
            raise ValueError("ComplexGrid data must be finite")
        arr.setflags(write=False)
        self.data = arr
        self.axis0 = axis0
        self.axis1 = axis1

    @property
    def shape(self):
        return self.data.shape

    def axis0_values(self) -> np.ndarray:
        return self.axis0.values(self.data.shape[0])

    def axis1_values(self) -> np.ndarray:
        return self.axis1.values(self.data.shape[1])


class Direction:
    """Pointing direction relative to array boresight (+z).

    ``theta`` is the polar angle off boresight, ``phi`` the angle in the
    aperture plane.  Sine-space coordinates follow

        u = sin(theta)*cos(phi),    v = sin(theta)*sin(phi)

    and azimuth/elevation satisfy sin(EL) = v, tan(AZ) = u/sqrt(1-u^2-v^2).
    """

    def __init__(self, theta: float, phi: float):
        if not (0.0 <= theta <= np.pi):
            raise ValueError("theta must lie in [0, pi]")
        if not (-np.pi <= phi <= np.pi):
            raise ValueError("phi must lie in [-pi, pi]")
        self.theta = float(theta)
        self.phi = float(phi)

    @classmethod
    def from_sine_space(cls, u: float, v: float) -> "Direction":
        r2 = u * u + v * v
        if r2 > 1.0 + _HORIZON_EPS:
            raise ValueError("(u, v) outside visible space: u^2 + v^2 > 1")
        theta = np.arcsin(min(np.sqrt(r2), 1.0))
        phi = np.arctan2(v, u) if r2 > 0.0 else 0.0
        return cls(theta, phi)

    @classmethod
    def from_az_el(cls, az: float, el: float) -> "Direction":
        # u = cos(EL)sin(AZ), v = sin(EL)
        return cls.from_sine_space(np.cos(el) * np.sin(az), np.sin(el))

    @property
    def u(self) -> float:
        return np.sin(self.theta) * np.cos(self.phi)

    @property
    def v(self) -> float:
        return np.sin(self.theta) * np.sin(self.phi)

    @property
    def el(self) -> float:
        return np.arcsin(np.clip(self.v, -1.0, 1.0))

    @property
    def az(self) -> float:
        w2 = max(1.0 - self.u ** 2 - self.v ** 2, _HORIZON_EPS)
        return np.arctan2(self.u, np.sqrt(w2))

    def unit_vector(self) -> np.ndarray:
        """Cartesian unit propagation vector (x, y, z)."""
        st = np.sin(self.theta)
        return np.array(
            [st * np.cos(self.phi), st * np.sin(self.phi), np.cos(self.theta)]
        )

    def __repr__(self):
        return f"Direction(theta={self.theta:.6f}, phi={self.phi:.6f})"


def convert_direction(direction: Direction, target: str) -> Direction:
    """Round-trip a direction through the named coordinate representation.

    ``target`` is one of ``"spherical"``, ``"sine_space"``, ``"az_el"``.
    The result describes the same physical direction; passing through a
    representation exercises the conversion identities, which is the point.
    """
    if target == "spherical":
        return Direction(direction.theta, direction.phi)
    if target == "sine_space":
        return Direction.from_sine_space(direction.u, direction.v)
    if target == "az_el":
        return Direction.from_az_el(direction.az, direction.el)
    raise ValueError(f"unknown coordinate system: {target!r}")


@dataclass(frozen=True)
class FieldPoint:
    """Cartesian observation or source point, meters."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        if not all(np.isfinite(c) for c in (self.x, self.y, self.z)):
            raise ValueError("coordinates must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


def distance(a: FieldPoint, b: FieldPoint) -> float:
    return float(np.linalg.norm(a.as_array() - b.as_array()))


@dataclass(frozen=True)
class WaveParams:
    """Monochromatic wave description: frequency, speed and the spatial
    frequency vector ``(kx, ky, kz)`` in cycles per meter."""

    frequency: float
    speed: float
    kx: float
    ky: float
    kz: float

    def __post_init__(self):
        if self.frequency <= 0 or self.speed <= 0:
            raise ValueError("frequency and speed must be positive")
        k_norm = np.sqrt(self.kx ** 2 + self.ky ** 2 + self.kz ** 2)
        if abs(self.speed * k_norm - self.frequency) > 1e-6 * self.frequency:
            raise ValueError("inconsistent wave: f != c*|k|")

    @classmethod
    def from_direction(
        cls, frequency: float, direction: Direction, speed: float = C_LIGHT
    ) -> "WaveParams":
        lam = speed / frequency
        s = direction.unit_vector() / lam
        return cls(frequency, speed, s[0], s[1], s[2])

    @property
    def wavelength(self) -> float:
        return self.speed / self.frequency

    @property
    def omega(self) -> float:
        return 2.0 * np.pi * self.frequency

    @property
    def k(self) -> np.ndarray:
        return np.array([self.kx, self.ky, self.kz])


def plane_wave_field(point: FieldPoint, t, wave: WaveParams, mod_phase=0.0):
    """Complex plane-wave field exp(j*2*pi*(f*t - k.x) + j*mod_phase).

    ``t`` may be scalar or array; the result is unimodular either way.
    """
    k_dot_x = wave.kx * point.x + wave.ky * point.y + wave.kz * point.z
    return np.exp(1j * (2.0 * np.pi * (wave.frequency * t - k_dot_x) + mod_phase))


def spherical_wave_field(
    point: FieldPoint, source: FieldPoint, t, wave: WaveParams, mod_phase=0.0
):
    """Spherical wavefront phase referenced to the source location.

    Returns exp(-j*(2*pi/lambda)*d) * exp(j*(2*pi*f*t + mod_phase)) where d
    is the straight-line source-to-point distance.  Coincident point and
    source leave the phase reference undefined and are rejected.
    """
    d = distance(point, source)
    if d == 0.0:
        raise ValueError("point coincides with source: phase undefined")
    spatial = np.exp(-1j * 2.0 * np.pi * d / wave.wavelength)
    return spatial * np.exp(1j * (2.0 * np.pi * wave.frequency * t + mod_phase))


def far_field_distance(aperture_d: float, frequency: float, speed: float = C_LIGHT) -> float:
    """Far-field (Fraunhofer) boundary 2*D^2/lambda for aperture size D."""
    if aperture_d <= 0 or frequency <= 0:
        raise ValueError("aperture size and frequency must be positive")
    return 2.0 * aperture_d ** 2 * frequency / speed


def wavenumber_spectrum(grid: ComplexGrid) -> ComplexGrid:
    """Space/time field to wavenumber/frequency spectrum.

    ``grid`` holds s(x, t) with axis0 = space (m) and axis1 = time (s).
    The temporal transform is a forward DFT so a wave exp(+j*2*pi*f*t)
    lands at +f; the spatial transform uses the conjugate kernel (inverse
    DFT scaled by N) so the propagation phase exp(-j*2*pi*k*x) lands at
    +k.  Axes of the result are centered via fftshift.
    """
    nx, nt = grid.shape
    spec = np.fft.fft(grid.data, axis=1)
    spec = np.fft.ifft(spec, axis=0) * nx
    spec = np.fft.fftshift(spec)
    k_step = 1.0 / (nx * grid.axis0.step)
    f_step = 1.0 / (nt * grid.axis1.step)
    return ComplexGrid(
        spec,
        Axis(-(nx // 2) * k_step, k_step, "cycles/m"),
        Axis(-(nt // 2) * f_step, f_step, "Hz"),
    )
