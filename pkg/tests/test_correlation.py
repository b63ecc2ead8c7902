"""Correlation maps, transforms, traces and derived metrics."""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from triphoton.errors import (InvalidParameterError, RangeError,
                              SamplingError)
from triphoton.params import resonance_set
from triphoton.susceptibility import ComplexGrid2D, GridSpec2D
from triphoton.correlation import (CorrelationMap, ConditionalTrace,
                                   cauchy_schwarz_factor,
                                   conditional_r2_closed,
                                   default_spectral_window, diagonal_cut,
                                   oscillation_period, spectral_kernel,
                                   trace_map, triphoton_amplitude_map,
                                   visibility)


def _random_kernel(seed, n=16, dd=2e8):
    rng = np.random.default_rng(seed)
    ax = (np.arange(n) - n / 2) * dd
    vals = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return ComplexGrid2D(axis1=ax, axis2=ax, values=vals)


def _raw_values(cmap):
    scale = float(cmap.grid.provenance.split("raw_scale=")[1])
    return cmap.grid.values * scale


# ---------------------------------------------------------------------------
# spectral window and kernel
# ---------------------------------------------------------------------------

def test_default_window_covers_resonances(params):
    spec = default_spectral_window(params)
    rs = resonance_set(params)
    assert spec.min1 < min(rs.centers_d2) - 5 * rs.linewidth_d2
    assert spec.max1 > max(rs.centers_d2) + 5 * rs.linewidth_d2
    assert spec.min2 < min(rs.centers_d3) - 5 * rs.linewidth_d3
    assert spec.max2 > max(rs.centers_d3) + 5 * rs.linewidth_d3


def test_kernel_rejects_undersized_window(params, quad):
    spec = GridSpec2D(-1e8, 1e8, 32, -1e8, 1e8, 32)
    with pytest.raises(InvalidParameterError):
        spectral_kernel(spec, params, quad)


def test_kernel_metadata(kernel512):
    assert kernel512.label1 == "delta2"
    assert kernel512.label2 == "delta3"
    assert kernel512.provenance.startswith("spectral_kernel")


# ---------------------------------------------------------------------------
# transform machinery
# ---------------------------------------------------------------------------

@settings(max_examples=25)
@given(st.integers(min_value=0, max_value=10 ** 6))
def test_transform_matches_direct_sum(params, quad, seed):
    """The chirp-z path evaluates the same finite Riemann sum as the direct
    double quadrature for arbitrary kernels and delay grids."""
    kern = _random_kernel(seed)
    rng = np.random.default_rng(seed + 1)
    t0 = float(rng.uniform(0.0, 2e-9))
    tau = GridSpec2D(t0, t0 + 8e-9, 11, 0.0, 9e-9, 13)
    m_t = triphoton_amplitude_map(tau, params, quad, method="transform",
                                  kernel=kern)
    m_d = triphoton_amplitude_map(tau, params, quad, method="direct",
                                  kernel=kern)
    num = np.max(np.abs(m_t.grid.values - m_d.grid.values))
    assert num / np.max(np.abs(m_d.grid.values)) < 1e-10


def test_parseval_identity(params, quad):
    """Total |A3|^2 mass equals (2 pi)^2 times the kernel's spectral mass on
    exact discrete-transform grids."""
    n, dd = 64, 2e8
    kern = _random_kernel(7, n=n, dd=dd)
    dt = 2 * np.pi / (n * dd)
    tau_lo = -(n / 2) * dt
    tau = GridSpec2D(tau_lo, tau_lo + (n - 1) * dt, n,
                     tau_lo, tau_lo + (n - 1) * dt, n)
    cmap = triphoton_amplitude_map(tau, params, quad, method="direct",
                                   kernel=kern)
    a3 = _raw_values(cmap)
    lhs = float(np.sum(np.abs(a3) ** 2)) * dt * dt
    rhs = (2 * np.pi) ** 2 * float(np.sum(np.abs(kern.values) ** 2)) * dd * dd
    assert lhs == pytest.approx(rhs, rel=1e-10)


def test_nyquist_guard_and_required_size(params, quad):
    kern = _random_kernel(3, n=16, dd=2e8)
    tau = GridSpec2D(0.0, 40e-9, 8, 0.0, 1e-9, 8)  # 2e8 * 40e-9 >> pi
    with pytest.raises(SamplingError) as exc:
        triphoton_amplitude_map(tau, params, quad, kernel=kern)
    need = exc.value.required_size
    assert need is not None
    span = kern.axis1[-1] - kern.axis1[0]
    ax = np.linspace(kern.axis1[0], kern.axis1[-1], need)
    assert (ax[1] - ax[0]) * 40e-9 <= np.pi + 1e-9


def test_invalid_method_rejected(params, quad):
    tau = GridSpec2D(0.0, 1e-9, 4, 0.0, 1e-9, 4)
    with pytest.raises(InvalidParameterError):
        triphoton_amplitude_map(tau, params, quad, method="fft",
                                kernel=_random_kernel(0))


def test_map_is_peak_normalized(params, quad, kernel512):
    tau = GridSpec2D(0.0, 20e-9, 32, 0.0, 20e-9, 32)
    cmap = triphoton_amplitude_map(tau, params, quad, kernel=kernel512)
    assert float(np.max(np.abs(cmap.grid.values))) == pytest.approx(1.0)
    assert np.allclose(cmap.r3, np.abs(cmap.grid.values) ** 2)


def test_conditional_r2_matches_brute_force(params, quad):
    kern = _random_kernel(11, n=12, dd=1.5e8)
    tau23 = np.linspace(0.0, 10e-9, 9)
    closed = conditional_r2_closed(tau23, params, quad, kernel=kern)
    dd2 = kern.axis1[1] - kern.axis1[0]
    dd3 = kern.axis2[1] - kern.axis2[0]
    brute = np.zeros(tau23.size)
    for m, t in enumerate(tau23):
        for j in range(kern.axis2.size):
            inner = np.sum(kern.values[:, j]
                           * np.exp(1j * kern.axis1 * t)) * dd2
            brute[m] += abs(inner) ** 2 * dd3
    brute /= brute.max()
    assert np.allclose(closed.values, brute, rtol=1e-10)


# ---------------------------------------------------------------------------
# traces
# ---------------------------------------------------------------------------

def _toy_map():
    ax = np.linspace(0.0, 3e-9, 4)
    rng = np.random.default_rng(2)
    a3 = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    a3 /= np.max(np.abs(a3))
    grid = ComplexGrid2D(axis1=ax, axis2=ax, values=a3)
    return CorrelationMap(grid=grid, r3=np.abs(a3) ** 2)


def test_trace_marginals_conserve_mass():
    cmap = _toy_map()
    total = cmap.r3.sum()
    for kind in ("trace-out-S3", "trace-out-S2", "trace-out-S1"):
        tr = trace_map(cmap, kind, normalize=False)
        assert tr.values.sum() == pytest.approx(total, rel=1e-12)


def test_trace_axes_and_orientation():
    cmap = _toy_map()
    tr21 = trace_map(cmap, "trace-out-S3", normalize=False)
    assert np.array_equal(tr21.axis, cmap.tau21_axis)
    assert np.allclose(tr21.values, cmap.r3.sum(axis=1))
    tr31 = trace_map(cmap, "trace-out-S2", normalize=False)
    assert np.allclose(tr31.values, cmap.r3.sum(axis=0))


def test_trace_out_first_photon_rebins_by_difference():
    cmap = _toy_map()
    tr = trace_map(cmap, "trace-out-S1", normalize=False)
    n = cmap.r3.shape[0]
    assert tr.axis.size == 2 * n - 1
    assert tr.axis[0] == pytest.approx(cmap.tau31_axis[0]
                                       - cmap.tau21_axis[-1])
    # the central sample collects the main diagonal (tau32 = 0)
    assert tr.values[n - 1] == pytest.approx(np.trace(cmap.r3), rel=1e-12)


def test_trace_unknown_kind():
    with pytest.raises(InvalidParameterError):
        trace_map(_toy_map(), "trace-out-S4")


def test_diagonal_cut_matches_interpolation():
    cmap = _toy_map()
    c = 3e-9
    tr = diagonal_cut(cmap, c)
    for k, t21 in enumerate(tr.axis):
        expect = np.interp(c - t21, cmap.tau31_axis,
                           cmap.r3[np.flatnonzero(cmap.tau21_axis == t21)[0]])
        assert tr.values[k] == pytest.approx(expect, rel=1e-12)


def test_diagonal_cut_outside_grid():
    with pytest.raises(RangeError):
        diagonal_cut(_toy_map(), -10e-9)


def test_conditional_trace_validation():
    with pytest.raises(InvalidParameterError):
        ConditionalTrace(axis=np.array([0.0, 1.0, 3.0]),
                         values=np.zeros(3))
    with pytest.raises(InvalidParameterError):
        ConditionalTrace(axis=np.array([0.0, 1.0, 2.0]),
                         values=np.array([0.0, -1.0, 0.0]))


def test_correlation_map_validation():
    ax = np.linspace(0.0, 1e-9, 4)
    a3 = np.full((4, 4), 0.5 + 0j)
    grid = ComplexGrid2D(axis1=ax, axis2=ax, values=a3)
    with pytest.raises(InvalidParameterError):
        CorrelationMap(grid=grid, r3=np.full((4, 4), 0.5))


# ---------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------

def test_oscillation_period_on_synthetic_trace():
    t = np.linspace(0.0, 40e-9, 801)
    period = 5e-9
    tr = ConditionalTrace(axis=t,
                          values=(1.0 + np.cos(2 * np.pi * t / period)) ** 2)
    est = oscillation_period(tr)
    assert est.period == pytest.approx(period, rel=0.05)
    assert est.confidence > 0.8
    assert est.spectral_periods[0] == pytest.approx(period, rel=0.05)


def test_visibility_of_full_contrast_fringe():
    t = np.linspace(0.0, 20e-9, 401)
    tr = ConditionalTrace(axis=t,
                          values=1.0 + np.cos(2 * np.pi * t / 4e-9))
    assert visibility(tr) == pytest.approx(1.0, abs=1e-6)


def test_visibility_of_reduced_contrast_fringe():
    t = np.linspace(0.0, 20e-9, 401)
    tr = ConditionalTrace(axis=t,
                          values=1.0 + 0.5 * np.cos(2 * np.pi * t / 4e-9))
    assert visibility(tr) == pytest.approx(0.5, abs=1e-6)


@given(st.floats(min_value=1.0, max_value=1e3),
       st.floats(min_value=0.1, max_value=10.0),
       st.floats(min_value=0.1, max_value=10.0),
       st.floats(min_value=0.1, max_value=10.0))
def test_cauchy_schwarz_scaling(g3, a, b, c):
    """Doubling g3 quadruples the factor; the identity inverts exactly."""
    f1 = cauchy_schwarz_factor(g3, (a, b, c))
    f2 = cauchy_schwarz_factor(2 * g3, (a, b, c))
    assert f2 == pytest.approx(4 * f1, rel=1e-9)
    assert f1 == pytest.approx((g3 / (a * b * c)) ** 2, rel=1e-9)


def test_cauchy_schwarz_validation():
    with pytest.raises(InvalidParameterError):
        cauchy_schwarz_factor(0.0, (1.0, 1.0, 1.0))
    with pytest.raises(InvalidParameterError):
        cauchy_schwarz_factor(1.0, (1.0, -1.0, 1.0))
