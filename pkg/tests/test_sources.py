import numpy as np
import pytest

from nlsblowup.modulation import P_KEYS, trivial_path
from nlsblowup.sources import (ProblemSpec, ProfileError, eval_R, eval_Zp,
                               eval_coefficients, make_profile, project_D,
                               unsplit_R, zpq_secular_coefficients)

from conftest import random_band_limited


def _p(**kw):
    p = {k: 0.0 for k in P_KEYS}
    p.update(kw)
    return p


def _tau_path(a=20.0, b=200.0, n=901):
    return trivial_path(np.linspace(a, b, n))


def test_zp_zero(line_setup):
    g, gs, _ = line_setup
    out = eval_Zp(g, _p(), gs.Q.astype(complex))
    assert g.norm_l2(out) == 0.0


def test_zpq_expansion_exact(line_setup):
    g, gs, basis = line_setup
    rng = np.random.default_rng(21)
    for _ in range(4):
        p = {k: 0.4 * rng.normal() for k in P_KEYS}
        direct = eval_Zp(g, p, gs.Q.astype(complex))
        comb = basis.combine(zpq_secular_coefficients(p, gs))
        assert g.norm_l2(direct - comb) < 1e-8


def test_zpq_unit_directions(line_setup):
    g, gs, basis = line_setup
    out1 = eval_Zp(g, _p(p1=1.0), gs.Q.astype(complex))
    assert g.norm_l2(out1 - gs.alpha0 * basis.n["1"]) < 1e-8
    out4 = eval_Zp(g, _p(p4=1.0), gs.Q.astype(complex))
    assert g.norm_l2(out4 - gs.alpha0 * basis.n["4"]) < 1e-8


def test_zp_radial_guard(radial_setup):
    g, gs, _ = radial_setup
    with pytest.raises(ProfileError):
        eval_Zp(g, _p(p2=0.1), gs.Q.astype(complex))


def test_profile_validation():
    spec = make_profile("cubic_bump", d=1, a=0.3, v0=0.4)
    spec.validate()
    hyp = make_profile("surface:hyperbolic", d=2)
    with pytest.raises(ProfileError):
        hyp.validate()                     # hess g(0) = -1/3
    with pytest.raises(ProfileError):
        make_profile("cubic_bump", d=2)
    with pytest.raises(ProfileError):
        make_profile("no_such_profile")


def test_gauge_shift_applied():
    x = np.linspace(-10, 10, 101)
    spec = make_profile("tabulated", d=1, x=x, V=np.cos(x), g=np.ones_like(x))
    assert spec.gauge_shift == pytest.approx(1.0)
    assert abs(spec.V(np.zeros(1))[0]) < 1e-12


def test_coefficients_trivial(line_setup):
    g, gs, _ = line_setup
    path = _tau_path()
    spec = make_profile("flat", d=1)
    gp, Vp = eval_coefficients(g, spec, path, 50.0)
    assert np.max(np.abs(gp - 1.0)) == 0.0
    assert np.max(np.abs(Vp)) == 0.0


def test_coefficients_taylor_scaling(line_setup):
    # g(x) = 1 + x^4/(1+x^4): on a trivial path g_p - 1 ~ y^4 / tau^4 inside
    g, _, _ = line_setup
    spec = ProblemSpec("quartic_ratio",
                       V=lambda x: np.zeros_like(np.asarray(x, float)),
                       g=lambda x: 1.0 + np.asarray(x, float) ** 4
                       / (1.0 + np.asarray(x, float) ** 4),
                       d=1)
    path = _tau_path()
    tau = 80.0
    gp, _ = eval_coefficients(g, spec, path, tau)
    inner = np.abs(g.x) < 5.0
    expected = (g.x[inner] / tau) ** 4
    assert np.max(np.abs(gp[inner] - 1.0 - expected)) < 5.0 / tau ** 8 * 5.0 ** 8


def test_coefficient_sup_bound(line_setup):
    g, _, _ = line_setup
    spec = make_profile("cubic_bump", d=1, a=0.3, v0=0.7)
    path = _tau_path()
    tau = 40.0
    _, Vp = eval_coefficients(g, spec, path, tau)
    vsup = np.max(np.abs(spec.V(np.linspace(-30, 30, 2001))))
    t = float(path.t_at(tau))
    q4 = float(path.q_at("q4", tau))
    assert np.max(np.abs(Vp)) <= vsup * q4 ** 2 / t ** 2 + 1e-15


def test_remainder_trivial(line_setup):
    g, gs, _ = line_setup
    spec = make_profile("flat", d=1)
    path = _tau_path()
    src = eval_R(g, gs, spec, path, 50.0, np.zeros(g.n, complex))
    for arr in (src.R_NL, src.R_L, src.R_0):
        assert g.norm_l2(arr) == 0.0


def test_remainder_split_consistency(line_setup):
    g, gs, _ = line_setup
    spec = make_profile("cubic_bump", d=1, a=0.3, v0=0.4)
    path = _tau_path()
    rng = np.random.default_rng(22)
    w = 0.05 * random_band_limited(g, rng)
    src = eval_R(g, gs, spec, path, 50.0, w)
    total = src.R_NL + src.R_L + src.R_0
    assert g.norm_l2(total - unsplit_R(g, gs, spec, path, 50.0, w)) < 1e-10


def test_source_purely_imaginary(line_setup):
    g, gs, basis = line_setup
    spec = make_profile("cubic_bump", d=1, a=0.3, v0=0.4)
    path = _tau_path()
    src = eval_R(g, gs, spec, path, 30.0, np.zeros(g.n, complex))
    assert np.max(np.abs(src.R_0.real)) == 0.0
    for lab in ("2", "4", "6"):
        assert abs(g.pairing(src.R_0, basis.m[lab])) < 1e-10


def test_nonlinear_remainder_pointwise_bound(line_setup):
    g, gs, _ = line_setup
    spec = make_profile("cubic_bump", d=1, a=0.3)
    path = _tau_path()
    rng = np.random.default_rng(23)
    consts = []
    for amp in (0.01, 0.03, 0.1):
        w = amp * random_band_limited(g, rng)
        src = eval_R(g, gs, spec, path, 50.0, w)
        bound = gs.Q * np.abs(w) ** 2 + np.abs(w) ** 3 + np.abs(w) ** 4 + np.abs(w) ** 5
        mask = bound > 1e-14
        consts.append(np.max(np.abs(src.R_NL[mask]) / bound[mask]))
    assert max(consts) < 50.0              # fitted constant stays O(10)


def test_source_decay_order_three(line_setup):
    g, gs, _ = line_setup
    spec = make_profile("cubic_bump", d=1, a=0.3)
    path = _tau_path(20.0, 400.0, 1901)
    taus = np.geomspace(20.0, 200.0, 12)
    vals = np.array([g.norm_l2(eval_R(g, gs, spec, path, t,
                                      np.zeros(g.n, complex)).R_0)
                     for t in taus])
    slope = np.polyfit(np.log(taus), np.log(vals), 1)[0]
    assert slope == pytest.approx(-3.0, abs=0.1)
    scaled = vals * taus ** 3
    assert np.max(scaled) < 3.0 * np.min(scaled)


def test_projected_coefficient_cases(line_setup):
    g, gs, basis = line_setup
    path = _tau_path(20.0, 400.0, 1901)
    flat = make_profile("flat", d=1)
    pd = project_D(basis, flat, path, 50.0, np.zeros(g.n, complex), _p())
    assert max(abs(v) for v in pd.D.values()) < 1e-14
    spec = make_profile("cubic_bump", d=1, a=0.3)
    # with w = 0 and zero p the even-dual projections vanish identically
    pd = project_D(basis, spec, path, 50.0, np.zeros(g.n, complex), _p())
    for lab in ("2", "4", "6"):
        assert abs(pd.D[lab]) < 1e-14
    # an odd inhomogeneity pairs to zero against the even duals too
    for lab in ("1", "5"):
        assert abs(pd.D[lab]) < 1e-12
    # with an even quartic component the cubic moment is still killed by the
    # even duals and D_1, D_5 decay at order 4, one better than the source
    mixed = ProblemSpec(
        "cubic_quartic", d=1,
        V=lambda x: np.zeros_like(np.asarray(x, float)),
        g=lambda x: 1.0 + 0.3 * (np.asarray(x, float) ** 3
                                 + np.asarray(x, float) ** 4)
        * np.exp(-np.asarray(x, float) ** 2 / 4.0))
    taus = np.geomspace(20.0, 200.0, 10)
    for lab in ("1", "5"):
        vals = np.array([abs(project_D(basis, mixed, path, t,
                                       np.zeros(g.n, complex), _p()).D[lab])
                         for t in taus])
        slope = np.polyfit(np.log(taus), np.log(vals), 1)[0]
        assert slope == pytest.approx(-4.0, abs=0.2), \
            f"D_{lab} decay order {slope:.2f}"


def test_d_vs_D_shift(line_setup):
    g, gs, basis = line_setup
    spec = make_profile("cubic_bump", d=1, a=0.3)
    path = _tau_path()
    rng = np.random.default_rng(24)
    w = 0.02 * random_band_limited(g, rng)
    p = {k: 0.01 * rng.normal() for k in P_KEYS}
    pd = project_D(basis, spec, path, 40.0, w, p)
    zq = zpq_secular_coefficients(p, gs)
    for lab in basis.labels:
        assert pd.d_coeff[lab] - pd.D[lab] == pytest.approx(zq[lab], rel=1e-12, abs=1e-14)


def test_remainder_lipschitz_in_p(line_setup):
    # |R_p(w) - R_ptilde(w)| fitted against the stated weight stays stable
    g, gs, _ = line_setup
    spec = make_profile("quartic_bump", d=1, a=0.3, v0=0.4)
    rng = np.random.default_rng(25)
    w = 0.05 * random_band_limited(g, rng)
    tau_grid = np.linspace(20.0, 200.0, 901)
    c = 2.5
    base = {k: 0.2 * tau_grid ** -c for k in P_KEYS}
    consts = []
    for delta in (1e-3, 1e-4):
        pert = {k: v + delta * tau_grid ** -c for k, v in base.items()}
        from nlsblowup.modulation import solve_q_from_p, sup_weighted
        pa = solve_q_from_p(tau_grid, base, {k: c for k in P_KEYS})
        pb = solve_q_from_p(tau_grid, pert, {k: c for k in P_KEYS})
        tau = 60.0
        ra = eval_R(g, gs, spec, pa, tau, w)
        rb = eval_R(g, gs, spec, pb, tau, w)
        diff = np.abs((ra.R_NL + ra.R_L + ra.R_0) - (rb.R_NL + rb.R_L + rb.R_0))
        dp = max(sup_weighted(tau_grid, base[k] - pert[k], c) for k in P_KEYS)
        wt = np.exp(-np.sqrt(1 + g.r2)) + (1 + g.r2) ** 1.5 * np.abs(w) \
            * (1 + np.abs(w) ** 2) ** 2
        consts.append(np.max(diff / wt) * tau ** (c + 1.0) / dp)
    assert all(np.isfinite(c_) for c_ in consts)
    assert abs(consts[0] - consts[1]) < 0.2 * max(consts)
