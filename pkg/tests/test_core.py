import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from aperture_forge.core import (
    Axis,
    ComplexGrid,
    Constants,
    Direction,
    FieldPoint,
    WaveParams,
    convert_direction,
    distance,
    far_field_distance,
    plane_wave_field,
    spherical_wave_field,
    wavenumber_spectrum,
)


def test_constants_defaults_and_immutability():
    c = Constants()
    assert c.c_light == 299792458.0
    assert c.c_sound == 1500.0
    assert c.k_boltzmann == 1.380649e-23
    with pytest.raises(Exception):
        c.c_sound = 343.0
    with pytest.raises(ValueError):
        Constants(c_sound=-1.0)


def test_axis_validation():
    with pytest.raises(ValueError):
        Axis(0.0, 0.0, "m")
    with pytest.raises(ValueError):
        Axis(np.nan, 1.0, "m")
    ax = Axis(-2.0, 0.5, "m")
    assert_allclose(ax.values(5), [-2.0, -1.5, -1.0, -0.5, 0.0])


def test_complex_grid_invariants():
    ax = Axis(0.0, 1.0)
    with pytest.raises(ValueError):
        ComplexGrid(np.zeros(4), ax, ax)  # not 2-D
    with pytest.raises(ValueError):
        ComplexGrid(np.array([[np.inf, 0.0], [0.0, 0.0]]), ax, ax)
    g = ComplexGrid(np.ones((2, 3)), ax, ax)
    assert g.shape == (2, 3)
    with pytest.raises(ValueError):
        g.data[0, 0] = 5.0  # frozen after construction


def test_direction_boresight_identity():
    d = Direction(0.0, 0.0)
    assert d.u == 0.0 and d.v == 0.0
    assert d.az == 0.0 and d.el == 0.0


def test_direction_from_sine_space_frozen_values():
    # sin^2(theta) = 0.4^2 + 0.3^2 = 0.25, tan(phi) = 0.3/0.4
    d = Direction.from_sine_space(0.4, 0.3)
    assert_allclose(np.degrees(d.theta), 30.0, atol=1e-9)
    assert_allclose(np.degrees(d.phi), 36.86989764584402, atol=1e-9)


def test_direction_zenith_el():
    d = Direction.from_az_el(0.0, np.pi / 2)
    assert_allclose(d.v, 1.0, atol=1e-12)
    assert_allclose(d.u, 0.0, atol=1e-12)


def test_direction_rejects_invisible_space():
    with pytest.raises(ValueError):
        Direction.from_sine_space(0.8, 0.7)


@given(
    theta=st.floats(0.0, np.radians(89.0)),
    phi=st.floats(-np.pi, np.pi),
)
def test_direction_round_trips(theta, phi):
    d = Direction(theta, phi)
    for target in ("spherical", "sine_space", "az_el"):
        back = convert_direction(convert_direction(d, target), "spherical")
        assert_allclose(back.unit_vector(), d.unit_vector(), atol=1e-12)
        assert abs(back.theta - d.theta) < 1e-12


def test_wave_params_consistency():
    d = Direction(np.radians(20.0), np.radians(45.0))
    w = WaveParams.from_direction(10e9, d)
    assert_allclose(w.speed * np.linalg.norm(w.k), w.frequency, rtol=1e-12)
    assert_allclose(w.wavelength, 299792458.0 / 10e9)
    with pytest.raises(ValueError):
        WaveParams(10e9, 299792458.0, 1.0, 0.0, 0.0)  # f != c|k|


def test_plane_wave_zero_phase_and_unimodularity():
    w = WaveParams.from_direction(1e9, Direction(0.3, 0.7))
    assert plane_wave_field(FieldPoint(0, 0, 0), 0.0, w) == pytest.approx(1.0 + 0.0j)
    rng = np.random.default_rng(0)
    for _ in range(20):
        p = FieldPoint(*rng.uniform(-5, 5, 3))
        val = plane_wave_field(p, rng.uniform(0, 1e-6), w, rng.uniform(-np.pi, np.pi))
        assert abs(abs(val) - 1.0) < 1e-12


def test_plane_wave_half_cycle():
    # k.x = 0.5 cycles at t = 0 gives exp(-j*pi) = -1
    w = WaveParams.from_direction(1e9, Direction(0.0, 0.0))
    lam = w.wavelength
    val = plane_wave_field(FieldPoint(0.0, 0.0, 0.5 * lam), 0.0, w)
    assert_allclose(val, -1.0 + 0.0j, atol=1e-12)


def test_spherical_wave_periodicity_and_errors():
    w = WaveParams.from_direction(1e9, Direction(0.0, 0.0))
    lam = w.wavelength
    src = FieldPoint(0.0, 0.0, 0.0)
    t = 1.23e-9
    at_lam = spherical_wave_field(FieldPoint(0.0, 0.0, lam), src, t, w)
    assert_allclose(at_lam, np.exp(1j * 2 * np.pi * w.frequency * t), atol=1e-9)
    at_half = spherical_wave_field(FieldPoint(0.0, 0.0, lam / 2), src, t, w)
    assert_allclose(at_half, -at_lam, atol=1e-9)
    with pytest.raises(ValueError):
        spherical_wave_field(src, src, 0.0, w)


def test_spherical_approaches_plane_wave_far_out():
    # fixed lateral offset, growing range: curvature phase error shrinks
    f = 1e9
    w = WaveParams.from_direction(f, Direction(0.0, 0.0))
    lam = w.wavelength
    src = FieldPoint(0.0, 0.0, 0.0)
    p = FieldPoint(lam, 0.0, 1e6 * lam)
    sph = spherical_wave_field(p, src, 0.0, w)
    pl = plane_wave_field(p, 0.0, w)
    assert abs(np.angle(sph / pl)) < 1e-5


def test_far_field_distance_frozen_values():
    assert_allclose(far_field_distance(0.102, 40e9), 2.776, atol=0.01)
    assert_allclose(far_field_distance(15.0, 1.4e9), 2101.45, atol=0.5)
    lam = 299792458.0 / 1e9
    assert_allclose(far_field_distance(lam, 1e9), 2 * lam, rtol=1e-12)
    with pytest.raises(ValueError):
        far_field_distance(-1.0, 1e9)
    with pytest.raises(ValueError):
        far_field_distance(1.0, 0.0)


@given(scale=st.floats(1.1, 5.0))
def test_far_field_distance_monotone(scale):
    base = far_field_distance(1.0, 1e9)
    assert far_field_distance(scale, 1e9) > base
    assert far_field_distance(1.0, scale * 1e9) > base


def _plane_wave_grid(k0, f0, nx, nt, dx, dt, amp=1.0):
    x = dx * np.arange(nx)
    t = dt * np.arange(nt)
    field = amp * np.exp(1j * 2 * np.pi * (f0 * t[None, :] - k0 * x[:, None]))
    return ComplexGrid(field, Axis(0.0, dx, "m"), Axis(0.0, dt, "s"))


def test_wavenumber_spectrum_single_wave():
    nx, nt, dx, dt = 32, 64, 0.01, 1e-9
    k0 = 4 / (nx * dx)  # on-grid wavenumber, cycles/m
    f0 = 10 / (nt * dt)
    spec = wavenumber_spectrum(_plane_wave_grid(k0, f0, nx, nt, dx, dt))
    power = np.abs(spec.data) ** 2
    ik, jf = np.unravel_index(np.argmax(power), power.shape)
    assert_allclose(spec.axis0_values()[ik], k0, rtol=1e-12)
    assert_allclose(spec.axis1_values()[jf], f0, rtol=1e-12)
    assert power[ik, jf] / power.sum() > 0.99


def test_wavenumber_spectrum_zero_field():
    ax = Axis(0.0, 1.0)
    g = ComplexGrid(np.zeros((8, 8)), ax, ax)
    assert np.all(wavenumber_spectrum(g).data == 0.0)


def test_wavenumber_spectrum_two_waves():
    nx, nt, dx, dt = 32, 64, 0.01, 1e-9
    g1 = _plane_wave_grid(3 / (nx * dx), 7 / (nt * dt), nx, nt, dx, dt)
    g2 = _plane_wave_grid(-5 / (nx * dx), 20 / (nt * dt), nx, nt, dx, dt, amp=0.5)
    g = ComplexGrid(g1.data + g2.data, g1.axis0, g1.axis1)
    spec = wavenumber_spectrum(g)
    power = np.abs(spec.data) ** 2
    flat = np.argsort(power, axis=None)[::-1]
    tops = [np.unravel_index(i, power.shape) for i in flat[:2]]
    kv, fv = spec.axis0_values(), spec.axis1_values()
    found = sorted((kv[i], fv[j]) for i, j in tops)
    want = sorted([(3 / (nx * dx), 7 / (nt * dt)), (-5 / (nx * dx), 20 / (nt * dt))])
    assert_allclose(found, want, rtol=1e-9)
    # brute-force DFT oracle at one of the peaks
    x = dx * np.arange(nx)
    t = dt * np.arange(nt)
    kernel = np.exp(-1j * 2 * np.pi * (want[1][1] * t[None, :] - want[1][0] * x[:, None]))
    oracle = np.sum(g.data * kernel)
    i = np.argmin(np.abs(kv - want[1][0]))
    j = np.argmin(np.abs(fv - want[1][1]))
    assert_allclose(spec.data[i, j], oracle, rtol=1e-9)


def test_distance_helper():
    assert distance(FieldPoint(0, 0, 0), FieldPoint(3, 4, 0)) == pytest.approx(5.0)
