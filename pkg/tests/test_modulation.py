import numpy as np
import pytest

from nlsblowup.modulation import (ModulationError, P_KEYS, compare_paths,
                                  decay_exponent, gamma_and_inverse,
                                  guaranteed_q_exponents, integral_to_inf,
                                  q_to_p, roundtrip_error, solve_q_from_p,
                                  sup_weighted, trivial_path)


def _tau(a=20.0, b=400.0, n=4001):
    return np.linspace(a, b, n)


def _zero_p(tau):
    return {k: np.zeros_like(tau) for k in P_KEYS}


C25 = {k: 2.5 for k in P_KEYS}


def test_trivial_maps():
    tau = _tau()
    path = trivial_path(tau)
    p = q_to_p(tau, path.q)
    assert max(np.max(np.abs(p[k])) for k in P_KEYS) < 1e-12
    solved = solve_q_from_p(tau, _zero_p(tau), C25)
    assert np.max(np.abs(solved.q["q4"] - 1.0)) < 1e-14
    assert np.max(np.abs(solved.t_of_tau - tau)) < 1e-10


def test_integral_tail_model():
    tau = _tau(20, 2000, 20001)
    f = tau ** -2.5
    exact = tau ** -1.5 / 1.5
    assert np.max(np.abs(integral_to_inf(tau, f, 2.5) - exact) / exact) < 1e-7


def test_closed_form_scaling_block():
    tau = _tau()
    p = _zero_p(tau)
    p["p4"] = tau ** -2.5
    path = solve_q_from_p(tau, p, C25)
    exact = np.exp(-tau ** -1.5 / 1.5)
    assert np.max(np.abs(path.q["q4"] - exact)) < 1e-7
    assert np.max(np.abs(path.q["q5"])) == 0.0


def test_forward_map_closed_form():
    tau = _tau()
    q = {"q1": np.zeros_like(tau), "q2": np.zeros_like(tau),
         "q3": np.zeros_like(tau), "q4": np.exp(-tau ** -1.5 / 1.5),
         "q5": np.zeros_like(tau)}
    p = q_to_p(tau, q)
    inner = slice(10, -10)
    assert np.max(np.abs(p["p4"][inner] - tau[inner] ** -2.5)) < 1e-8
    assert np.max(np.abs(p["p5"][inner])) < 1e-12


def test_roundtrip_random_admissible():
    tau = _tau()
    rng = np.random.default_rng(3)
    p = {k: 0.25 * rng.uniform(0.3, 1.0)
         * np.sin(0.1 * rng.uniform(0.5, 2.0) * tau + rng.uniform(0, 6))
         * tau ** -2.5 for k in P_KEYS}
    assert roundtrip_error(tau, p, C25) < 1e-6


def test_decay_class_table():
    tau = _tau(25.0, 2500.0, 14001)
    p = {k: 0.2 * tau ** -2.5 for k in P_KEYS}
    path = solve_q_from_p(tau, p, C25)
    rep = path.decay_report()
    guar = guaranteed_q_exponents(C25)
    # guaranteed exponents are sharp for q1, q2, q4r; lower bounds for q3, q5
    for key in ("q1", "q2", "q4r"):
        assert abs(rep[key] - guar[key]) <= 0.1, key
    for key in ("q3", "q5"):
        assert rep[key] >= guar[key] - 0.1, key


def test_norm_and_admissibility():
    tau = _tau()
    p = _zero_p(tau)
    p["p4"] = 3.0 * tau ** -2.5                     # sup tau^c |p| = 3 > 1
    assert sup_weighted(tau, p["p4"], 2.5) == pytest.approx(3.0)
    with pytest.raises(ModulationError):
        solve_q_from_p(tau, p, C25)
    with pytest.raises(ModulationError):
        solve_q_from_p(tau, _zero_p(tau), {k: 1.5 for k in P_KEYS})


def test_q4_positivity_guard():
    tau = _tau()
    q = {"q1": np.zeros_like(tau), "q2": np.zeros_like(tau),
         "q3": np.zeros_like(tau), "q4": np.linspace(1, -0.1, len(tau)),
         "q5": np.zeros_like(tau)}
    with pytest.raises(ModulationError):
        q_to_p(tau, q)


def test_gamma_inverse_consistency():
    tau = _tau()
    p = _zero_p(tau)
    p["p4"] = 0.5 * tau ** -2.5
    path = solve_q_from_p(tau, p, C25)
    gamma, gamma_inv = gamma_and_inverse(path)
    probes = np.linspace(tau[0], tau[-1], 257)
    assert np.max(np.abs(gamma(gamma_inv(probes)) - probes)) < 1e-9
    slope = np.gradient(path.t_of_tau, tau)
    assert np.all(slope > 0)


def test_gamma_integrable_correction():
    # q4r(t) = t^(-1.2): gamma(t) - t converges (integrable correction);
    # the leading remainder is -2 int t^(-1.2) = -10 t^(-0.2) + const
    t = np.geomspace(5.0, 5000.0, 20001)
    from scipy.interpolate import CubicSpline
    integrand = (1.0 + t ** -1.2) ** -2 - 1.0
    anti = CubicSpline(t, integrand).antiderivative()
    corr = anti(t) - anti(t[0])
    for ia, ib in ((len(t) // 2, -1), (len(t) // 4, len(t) // 2)):
        observed = corr[ib] - corr[ia]
        model = 10.0 * (t[ib] ** -0.2 - t[ia] ** -0.2)
        assert observed == pytest.approx(model, rel=0.05)


def test_lipschitz_report():
    tau = _tau()
    base = _zero_p(tau)
    base["p4"] = 0.3 * tau ** -2.5
    same = compare_paths(tau, base, {k: v.copy() for k, v in base.items()}, 2.5)
    assert same["ratio"] == 0.0
    ratios = []
    for d in (1e-3, 1e-4, 1e-5):
        pert = {k: v.copy() for k, v in base.items()}
        pert["p4"] = pert["p4"] + d * tau ** -2.5
        ratios.append(compare_paths(tau, base, pert, 2.5)["ratio"])
    assert all(np.isfinite(r) and r > 0 for r in ratios)
    assert (max(ratios) - min(ratios)) / max(ratios) < 0.1


def test_block_substitution_residual():
    # solved q substituted back into the forward relations reproduces p
    tau = _tau()
    p = _zero_p(tau)
    p["p4"] = 0.4 * tau ** -2.5
    p["p5"] = 0.2 * tau ** -2.5
    path = solve_q_from_p(tau, p, C25, tol=1e-12)
    back = q_to_p(tau, path.q)
    inner = slice(20, -20)
    for k in P_KEYS:
        assert np.max(np.abs(back[k][inner] - p[k][inner])) < 1e-8


def test_decay_exponent_regression():
    tau = _tau(10, 1000, 5001)
    assert decay_exponent(tau, tau ** -1.7) == pytest.approx(1.7, abs=1e-3)
    assert np.isnan(decay_exponent(tau, np.zeros_like(tau)))
