import numpy as np
import pytest

from nlsblowup.grid import Field, Grid, GridError, laplacian, norm, norm_report, pairing

from conftest import random_band_limited


def test_grid_invariants_rejected():
    with pytest.raises(GridError):
        Grid(dim=1, half_width=20.0, n=130 + 1)      # odd
    with pytest.raises(GridError):
        Grid(dim=1, half_width=20.0, n=32)           # too small
    with pytest.raises(GridError):
        Grid(dim=1, half_width=8.0, n=128)           # exp(-L) over tolerance
    with pytest.raises(GridError):
        Grid(dim=3, half_width=20.0, n=128)


def test_spacing_consistency():
    g = Grid(dim=1, half_width=20.0, n=256)
    assert g.h * g.n == pytest.approx(2 * g.half_width, abs=0)
    assert np.allclose(np.diff(g.x), g.h)


def test_laplacian_trivial_cases():
    g = Grid(dim=1, half_width=20.0, n=256)
    const = np.ones(g.n, dtype=complex)
    assert g.norm_l2(g.laplacian(const)) < 1e-12
    f = np.sin(np.pi * g.x / g.half_width)
    expected = -(np.pi / g.half_width) ** 2 * f
    assert np.max(np.abs(g.laplacian(f) - expected)) < 1e-12


def test_laplacian_linearity():
    g = Grid(dim=1, half_width=20.0, n=256)
    rng = np.random.default_rng(0)
    f, h = random_band_limited(g, rng, 2)
    a, b = 1.3 - 0.2j, -0.7 + 0.9j
    lhs = g.laplacian(a * f + b * h)
    rhs = a * g.laplacian(f) + b * g.laplacian(h)
    assert g.norm_l2(lhs - rhs) < 1e-12


def test_parseval_line():
    g = Grid(dim=1, half_width=16.0, n=256)
    rng = np.random.default_rng(1)
    f = random_band_limited(g, rng)
    phys = g.norm_l2(f)
    spec = g.norm_hs(f, 0.0)
    assert abs(phys - spec) / phys < 1e-12


def test_parseval_planar():
    g = Grid(dim=2, half_width=14.0, n=64, layout="planar")
    rng = np.random.default_rng(2)
    f = random_band_limited(g, rng, band=10)
    assert abs(g.norm_l2(f) - g.norm_hs(f, 0.0)) / g.norm_l2(f) < 1e-12


def test_gaussian_l2_analytic():
    g = Grid(dim=1, half_width=16.0, n=512)
    f = np.exp(-g.x ** 2 / 2)
    assert abs(g.norm_l2(f) ** 2 - np.sqrt(np.pi)) < 1e-10


def test_moment_interpolation_gaussian():
    # || <x> f || <= || <x>^3 f ||^(1/3) || f ||^(2/3)
    g = Grid(dim=1, half_width=16.0, n=512)
    f = np.exp(-g.x ** 2 / 2)
    lhs = g.norm_moment(f, 1.0)
    rhs = g.norm_moment(f, 3.0) ** (1 / 3) * g.norm_l2(f) ** (2 / 3)
    assert lhs <= rhs + 1e-12


def test_pairing_properties():
    g = Grid(dim=1, half_width=16.0, n=256)
    rng = np.random.default_rng(3)
    f, h = random_band_limited(g, rng, 2)
    ff, hh = Field(g, f), Field(g, h)
    assert pairing(ff, ff) == pytest.approx(g.norm_l2(f) ** 2, rel=1e-13)
    assert pairing(ff, hh) == pytest.approx(pairing(hh, ff), rel=1e-12, abs=1e-14)
    assert pairing(Field(g, 1j * f), Field(g, 1j * h)) == pytest.approx(
        pairing(ff, hh), rel=1e-12, abs=1e-14)
    other = Grid(dim=1, half_width=16.0, n=128)
    with pytest.raises(GridError):
        pairing(ff, Field(other, np.zeros(other.n)))


def test_imaginary_real_pairing_vanishes(line_setup):
    g, gs, _ = line_setup
    assert abs(g.pairing(1j * gs.Q.astype(complex), gs.Q.astype(complex))) < 1e-14


def test_norm_kinds_and_rejection():
    g = Grid(dim=1, half_width=16.0, n=256)
    f = Field(g, np.zeros(g.n, dtype=complex))
    for kind in ("L2", "Hs", "moment", "Sigma"):
        assert norm(f, kind) == 0.0
    with pytest.raises(GridError):
        g.norm_hs(np.zeros(g.n), -1.0)
    with pytest.raises(GridError):
        g.norm_moment(np.zeros(g.n), -0.5)
    with pytest.raises(GridError):
        norm(f, "bogus")


def test_norm_report_triangle():
    g = Grid(dim=1, half_width=16.0, n=256)
    rng = np.random.default_rng(4)
    f, h = random_band_limited(g, rng, 2)
    rep_f = norm_report(Field(g, f), s_values=(1.0, 2.0), deltas=(1.0,))
    rep_h = norm_report(Field(g, h), s_values=(1.0, 2.0), deltas=(1.0,))
    rep_s = norm_report(Field(g, f + h), s_values=(1.0, 2.0), deltas=(1.0,))
    assert rep_s.l2 <= rep_f.l2 + rep_h.l2 + 1e-12
    for s in (1.0, 2.0):
        assert rep_s.h_s[s] <= rep_f.h_s[s] + rep_h.h_s[s] + 1e-12
        assert rep_s.sigma_s[s] >= rep_s.h_s[s]
    assert rep_f.weighted_moment[1.0] >= rep_f.l2  # <x> >= 1


def test_field_shape_mismatch():
    g = Grid(dim=1, half_width=16.0, n=256)
    with pytest.raises(GridError):
        Field(g, np.zeros(100))


def test_hs_equals_l2_at_zero_order():
    g = Grid(dim=1, half_width=16.0, n=256)
    rng = np.random.default_rng(5)
    f = Field(g, random_band_limited(g, rng))
    assert norm(f, "Hs", s=0.0) == pytest.approx(norm(f, "L2"), rel=1e-12)


# ----------------------------------------------------------------------
# radial layout
# ----------------------------------------------------------------------

def test_radial_measure_total():
    g = Grid(dim=2, half_width=14.0, n=256)
    # integral of 1 against pi |x| dx over the box is pi L^2
    assert np.sum(g.measure) == pytest.approx(np.pi * g.half_width ** 2, rel=1e-10)


def test_radial_gaussian_mass():
    g = Grid(dim=2, half_width=14.0, n=256)
    f = np.exp(-g.r2 / 2)
    # int_{R^2} exp(-r^2) = pi
    assert g.norm_l2(f) ** 2 == pytest.approx(np.pi, rel=1e-12)


def test_radial_laplacian_gaussian():
    g = Grid(dim=2, half_width=14.0, n=256)
    f = np.exp(-g.r2 / 2)
    expected = (g.r2 - 2.0) * f
    assert np.max(np.abs(g.laplacian(f) - expected)) < 1e-10


def test_radial_hankel_norms_consistent():
    g = Grid(dim=2, half_width=14.0, n=256)
    f = np.exp(-g.r2 / 2) * (1.0 + 0.3 * g.r2)
    # Plancherel through the Bessel transform
    assert g.norm_hs(f, 0.0) == pytest.approx(g.norm_l2(f), rel=1e-8)
    # H^1 via multiplier vs direct gradient quadrature
    direct = g.norm_h1(f)
    assert g.norm_hs(f, 1.0) == pytest.approx(direct, rel=1e-7)


def test_dealias_kills_high_modes():
    g = Grid(dim=1, half_width=16.0, n=256)
    m = g.m_int
    f = np.exp(2j * np.pi * 100 * np.arange(g.n) / g.n)   # mode 100 > N/3
    cleaned = g.dealias(f)
    assert g.norm_l2(cleaned) < 1e-12
    low = np.exp(2j * np.pi * 10 * np.arange(g.n) / g.n)
    assert g.norm_l2(g.dealias(low) - low) < 1e-12


def test_resample_exactness():
    g = Grid(dim=1, half_width=16.0, n=256)
    f = np.exp(-g.x ** 2 / 2 + 0.4j * g.x)
    pts = 0.37 * g.x + 1.1
    vals = g.resample(f, pts)
    exact = np.exp(-pts ** 2 / 2 + 0.4j * pts)
    assert np.max(np.abs(vals - exact)) < 1e-12
