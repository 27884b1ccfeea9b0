import numpy as np
import pytest

from nlsblowup.geometry import (BUILTIN_SURFACES, bowl, euclidean, hyperbolic,
                                laplace_beltrami_radial, quintic_bump,
                                reduce_surface)


def test_euclidean_trivial():
    red = reduce_surface(euclidean())
    r = np.linspace(0.0, 20.0, 257)
    assert np.max(np.abs(red.V(r))) < 1e-12
    assert np.max(np.abs(red.g(r) - 1.0)) < 1e-12
    assert red.admissibility["verdict"] == "bounded"


def test_hyperbolic_borderline():
    red = reduce_surface(hyperbolic())
    h = 1e-3
    g0 = red.g(np.array([0.0]))[0]
    gpp = 2.0 * (red.g(np.array([h]))[0] - 1.0) / h ** 2
    assert g0 == pytest.approx(1.0, abs=1e-12)
    assert gpp == pytest.approx(-1.0 / 3.0, abs=1e-4)
    assert red.V(np.array([0.0]))[0] == pytest.approx(1.0 / 3.0, rel=1e-10)
    assert red.g_flatness_order == 2          # fails the order-3 requirement


def test_quintic_bump_orders():
    red = reduce_surface(quintic_bump(c0=0.1, r1=1.5))
    assert red.g_flatness_order == 4
    r = np.array([1e-2, 2e-2, 5e-2])
    assert np.allclose(red.g(r) - 1.0, -0.1 * r ** 4, rtol=1e-4)
    assert np.allclose(red.V(r), 0.8 * r ** 2, rtol=1e-4)
    assert red.admissibility["verdict"] == "bounded"


def test_bowl_polynomial_growth():
    red = reduce_surface(bowl(2))
    assert red.g_flatness_order == 6
    assert red.admissibility["verdict"] == "polynomially growing"
    assert red.admissibility["g_growth_exponent"] == pytest.approx(0.75, abs=0.05)


def test_validation_rejects_bad_taylor():
    surf = quintic_bump(0.1)
    surf.psi_series = surf.psi_series.copy()
    surf.psi_series[1] = 0.3                   # inconsistent with phi
    with pytest.raises(ValueError):
        surf.validate()


def test_series_direct_handover():
    for surf in (hyperbolic(), quintic_bump(0.1)):
        red = reduce_surface(surf)
        rs = surf.r_switch
        probe = np.array([rs * (1 - 1e-3), rs * (1 + 1e-3)])
        assert abs(np.diff(red.V(probe)))[0] < 1e-7
        assert abs(np.diff(red.g(probe)))[0] < 1e-8


def test_surface_laplacian_euclidean_identity(radial_setup):
    g, gs, _ = radial_setup
    f = gs.Q.astype(complex) * (1.0 + 0.2 * g.r2) * np.exp(-0.1 * g.r2)
    flat = g.laplacian(f)
    surf = laplace_beltrami_radial(g, euclidean(), f)
    assert g.norm_l2(surf - flat) < 1e-10


def test_mass_change_of_measure(radial_setup):
    # int |u_surface|^2 phi dr equals int |u_flat|^2 r dr pointwise
    g, gs, _ = radial_setup
    surf = quintic_bump(0.1)
    red = reduce_surface(surf)
    r = np.abs(g.x)
    u = gs.Q.astype(complex)
    u_surf = red.field_factor(r) * u
    lhs = np.sum(np.abs(u_surf) ** 2 * surf.phi(r) * g.h)
    rhs = np.sum(np.abs(u) ** 2 * r * g.h)
    assert lhs == pytest.approx(rhs, rel=1e-9)


def test_radial_equation_substitution(radial_setup):
    # evolve the flat problem for the derived (V, g); the mapped field must
    # satisfy the surface equation to comparable accuracy
    from nlsblowup.dynamics import evolve
    from nlsblowup.geometry import radial_equation_check
    from nlsblowup.sources import make_profile

    g, gs, _ = radial_setup
    surf = quintic_bump(c0=0.05, r1=1.2)
    spec = make_profile("surface:quintic_bump", d=2, c0=0.05, r1=1.2)
    red = spec.meta["reduction"]
    dt = 2e-4
    res = evolve(g, "physical", gs.Q.astype(complex), (0.0, 40 * dt), dt=dt,
                 spec=spec, snapshot_times=[10 * dt, 20 * dt, 30 * dt])
    rep = radial_equation_check(g, surf, red, res.snapshots)
    assert rep["surface_residual"] < 10.0 * rep["flat_residual"] + 1e-10
    # change of measure: the two mass integrals agree pointwise-exactly
    assert rep["mass_surface"] == pytest.approx(rep["mass_flat"], rel=1e-9)


def test_builtin_registry():
    for name, ctor in BUILTIN_SURFACES.items():
        surf = ctor()
        surf.validate()
        red = reduce_surface(surf)
        assert red.g(np.array([0.0]))[0] == pytest.approx(1.0, abs=1e-10)
