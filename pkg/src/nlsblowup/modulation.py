"""Parameter system linking the forcing vector p = (p1..p5) to the
modulation q = (q1..q5) and the time change gamma.

The q-system block-triangularizes: (q4r, q5) close among themselves, then
(q2, q3), then q1.  Each block is solved by iterating its Duhamel integral
formulation from tau = +infinity, realized on a finite window with a
power-law tail model whose exponent is the known decay class of the data.

All paths are sampled on a uniform tau grid; integrals use the cubic-spline
antiderivative, cumulated from the right end.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.interpolate import CubicSpline, PchipInterpolator


class ModulationError(RuntimeError):
    pass


P_KEYS = ("p1", "p2", "p3", "p4", "p5")
Q_KEYS = ("q1", "q2", "q3", "q4", "q5")


def sup_weighted(tau: np.ndarray, f: np.ndarray, c: float) -> float:
    """Weighted sup norm sup_tau tau^c |f(tau)|."""
    return float(np.max(tau ** c * np.abs(f)))


def decay_exponent(tau: np.ndarray, f: np.ndarray, decades: float = 1.0,
                   floor: float = 1e-300) -> float:
    """Log-log regression slope of |f| against tau over the last decade(s).

    Returns the measured decay rate c with |f| ~ tau^(-c); NaN when the
    series is identically negligible.
    """
    mask = tau >= tau[-1] / 10.0 ** decades
    vals = np.abs(f[mask])
    if np.max(vals) < floor:
        return float("nan")
    keep = vals > max(np.max(vals) * 1e-13, floor)
    if np.count_nonzero(keep) < 4:
        return float("nan")
    slope = np.polyfit(np.log(tau[mask][keep]), np.log(vals[keep]), 1)[0]
    return float(-slope)


# ----------------------------------------------------------------------
# improper integrals on a finite window
# ----------------------------------------------------------------------

def integral_to_inf(tau: np.ndarray, f: np.ndarray, tail_c: float) -> np.ndarray:
    """I(tau) = int_tau^inf f, with the [tau_max, inf) part modeled as a
    power law of exponent tail_c (> 1) matched to the endpoint value."""
    spline = CubicSpline(tau, f)
    anti = spline.antiderivative()
    inner = anti(tau[-1]) - anti(tau)
    if tail_c <= 1.0:
        raise ModulationError(f"tail exponent must exceed 1, got {tail_c}")
    tail = f[-1] * tau[-1] / (tail_c - 1.0)
    return inner + tail


def kernel_integral_to_inf(tau: np.ndarray, f: np.ndarray, tail_c: float) -> np.ndarray:
    """J(tau) = int_tau^inf (sigma - tau) f(sigma) dsigma with the same
    endpoint-matched power-law tail (requires tail_c > 2)."""
    if tail_c <= 2.0:
        raise ModulationError(f"kernel tail exponent must exceed 2, got {tail_c}")
    s_f = CubicSpline(tau, f)
    s_sf = CubicSpline(tau, tau * f)
    a_f = s_f.antiderivative()
    a_sf = s_sf.antiderivative()
    int_f = a_f(tau[-1]) - a_f(tau)
    int_sf = a_sf(tau[-1]) - a_sf(tau)
    T = tau[-1]
    tail = f[-1] * (T ** 2 / (tail_c - 2.0) - tau * T / (tail_c - 1.0))
    return (int_sf - tau * int_f) + tail


# ----------------------------------------------------------------------
# paths
# ----------------------------------------------------------------------

@dataclass
class ModulationPath:
    """Sampled p- and q-paths on a uniform tau grid plus the time change.

    ``t_of_tau`` samples the inverse time change (the original time as a
    function of the slow time); ``gamma`` maps it back.
    """

    tau: np.ndarray
    p: dict
    q: dict
    c_p: dict
    t_of_tau: np.ndarray | None = None
    meta: dict = dc_field(default_factory=dict)

    @property
    def q4(self) -> np.ndarray:
        return self.q["q4"]

    def q_at(self, key: str, tau: np.ndarray | float) -> np.ndarray:
        return np.interp(tau, self.tau, self.q[key])

    def p_at(self, key: str, tau: np.ndarray | float) -> np.ndarray:
        return np.interp(tau, self.tau, self.p[key])

    def t_at(self, tau: np.ndarray | float) -> np.ndarray:
        if self.t_of_tau is None:
            raise ModulationError("time change not attached; call attach_gamma")
        return np.interp(tau, self.tau, self.t_of_tau)

    def decay_report(self) -> dict:
        rep = {}
        for k in P_KEYS:
            rep[k] = decay_exponent(self.tau, self.p[k])
        rep["q1"] = decay_exponent(self.tau, self.q["q1"])
        rep["q2"] = decay_exponent(self.tau, self.q["q2"])
        rep["q3"] = decay_exponent(self.tau, self.q["q3"])
        rep["q4r"] = decay_exponent(self.tau, self.q["q4"] - 1.0)
        rep["q5"] = decay_exponent(self.tau, self.q["q5"])
        return rep


def trivial_path(tau: np.ndarray) -> ModulationPath:
    z = np.zeros_like(tau)
    p = {k: z.copy() for k in P_KEYS}
    q = {"q1": z.copy(), "q2": z.copy(), "q3": z.copy(),
         "q4": np.ones_like(tau), "q5": z.copy()}
    path = ModulationPath(tau=tau, p=p, q=q, c_p={k: 3.0 for k in P_KEYS})
    return attach_gamma(path)


def guaranteed_q_exponents(c_p: dict) -> dict:
    """Decay classes of the solved q for admissible p (lower bounds)."""
    c_q2 = min(c_p["p5"] - 2.0, c_p["p4"] - 1.0)
    return {
        "q2": c_q2,
        "q4r": c_q2,
        "q3": c_p["p3"] / 2.0,
        "q5": c_p["p5"] / 2.0,
        "q1": min(c_p["p1"] - 1.0, c_p["p3"] - 1.0),
    }


def q_to_p(tau: np.ndarray, q: dict) -> dict:
    """Forward map: evaluate the five forcing relations from a q-path.

    Derivatives with respect to tau come from the cubic-spline interpolant.
    """
    q4 = q["q4"]
    if np.any(q4 <= 0):
        raise ModulationError("q4 must stay positive")
    d = {k: CubicSpline(tau, q[k]).derivative()(tau) for k in Q_KEYS}
    q1, q2, q3, q5 = q["q1"], q["q2"], q["q3"], q["q5"]
    p4 = d["q4"] / q4 - 4.0 * q5 * q4 ** 2
    p5 = q4 ** 2 * d["q5"] + 4.0 * q4 ** 4 * q5 ** 2
    p2 = d["q2"] - 2.0 * q4 * q3 + p4 * q2
    p3 = q4 * d["q3"] + 4.0 * q4 ** 3 * q3 * q5 + 2.0 * q2 * p5
    p1 = p3 * q2 - p5 * q2 ** 2 + d["q1"] + q4 ** 2 * q3 ** 2
    return {"p1": p1, "p2": p2, "p3": p3, "p4": p4, "p5": p5}


def solve_q_from_p(tau: np.ndarray, p: dict, c_p: dict, tol: float = 1e-10,
                   max_iter: int = 200, damping: float = 0.5,
                   check_admissible: bool = True) -> ModulationPath:
    """Solve the triangular q-system by damped fixed point on the Duhamel
    integrals, block by block: (q4r, q5), then (q2, q3), then q1.

    ``c_p`` holds the decay exponents of the data (used by the tail model);
    the admissibility thresholds c(p3) = c(p5) > 2, c(p2) = c(p4) > 1,
    c(p1) > 1 are enforced.
    """
    tau0 = tau[0]
    if not (c_p["p5"] > 2 and c_p["p3"] > 2 and c_p["p4"] > 1
            and c_p["p2"] > 1 and c_p["p1"] > 1):
        raise ModulationError(f"inadmissible decay classes {c_p}")
    if check_admissible:
        for k in P_KEYS:
            nk = sup_weighted(tau, p[k], c_p[k])
            if nk > 1.0 + 1e-9:
                raise ModulationError(
                    f"||{k}||_{{c,tau0}} = {nk:.3f} > 1; shrink the data or raise tau0")

    p1, p2, p3, p4, p5 = (p[k] for k in P_KEYS)
    q4r = np.zeros_like(tau)
    q5 = np.zeros_like(tau)
    c45 = min(c_p["p4"], c_p["p5"] - 1.0)       # decay of the q4r integrand
    it45 = 0
    for it45 in range(1, max_iter + 1):
        rhs1 = p4 * (1.0 + q4r) + 4.0 * q5 * q4r * (3.0 + 3.0 * q4r + q4r ** 2)
        rhs2 = p5 / (1.0 + q4r) ** 2 - 4.0 * (1.0 + q4r) ** 2 * q5 ** 2
        # decaying Duhamel solution: q4r = -int rhs1 + 4 int (sigma-tau) rhs2
        new_q4r = -integral_to_inf(tau, rhs1, c_p["p4"]) \
            + 4.0 * kernel_integral_to_inf(tau, rhs2, c_p["p5"])
        new_q5 = -integral_to_inf(tau, rhs2, c_p["p5"])
        change = np.max(np.abs(new_q4r - q4r)) + np.max(np.abs(new_q5 - q5))
        q4r = q4r + damping * (new_q4r - q4r)
        q5 = q5 + damping * (new_q5 - q5)
        if change < tol:
            break
    else:
        raise ModulationError("scaling/conformal block did not converge; tau0 too small")
    if np.any(1.0 + q4r <= 0):
        raise ModulationError("q4 left the positive cone; tau0 too small")

    q2 = np.zeros_like(tau)
    q3 = np.zeros_like(tau)
    for it23 in range(1, max_iter + 1):
        rhs3 = p2 + 2.0 * q4r * q3 - p4 * q2
        rhs4 = -4.0 * (1.0 + q4r) ** 2 * q3 * q5 + (p3 - 2.0 * q2 * p5) / (1.0 + q4r)
        new_q2 = -integral_to_inf(tau, rhs3, c_p["p2"]) \
            + 2.0 * kernel_integral_to_inf(tau, rhs4, c_p["p3"])
        new_q3 = -integral_to_inf(tau, rhs4, c_p["p3"])
        change = np.max(np.abs(new_q2 - q2)) + np.max(np.abs(new_q3 - q3))
        q2 = q2 + damping * (new_q2 - q2)
        q3 = q3 + damping * (new_q3 - q3)
        if change < tol:
            break
    else:
        raise ModulationError("translation/Galilean block did not converge; tau0 too small")

    rhs_q1 = p1 - p3 * q2 + p5 * q2 ** 2 - (1.0 + q4r) ** 2 * q3 ** 2
    q1 = -integral_to_inf(tau, rhs_q1, max(c_p["p1"], 1.0 + 1e-6))

    q = {"q1": q1, "q2": q2, "q3": q3, "q4": 1.0 + q4r, "q5": q5}
    path = ModulationPath(tau=tau, p=dict(p), q=q, c_p=dict(c_p),
                          meta={"iters_scaling_block": it45})
    return attach_gamma(path)


def attach_gamma(path: ModulationPath) -> ModulationPath:
    """Attach the time change: t(tau) = tau0 + int_tau0^tau q4^2.

    The slope dtau/dt = q4^(-2) must stay within [1/2, 2]."""
    q4 = path.q["q4"]
    slope = q4 ** (-2)
    if np.any(slope < 0.5 - 1e-12) or np.any(slope > 2.0 + 1e-12):
        raise ModulationError("time change slope left [1/2, 2]")
    anti = CubicSpline(path.tau, q4 ** 2).antiderivative()
    path.t_of_tau = path.tau[0] + (anti(path.tau) - anti(path.tau[0]))
    if np.any(np.diff(path.t_of_tau) <= 0):
        raise ModulationError("time change lost monotonicity")
    return path


def gamma_and_inverse(path: ModulationPath):
    """Return callables (gamma, gamma_inv) built from the attached samples."""
    if path.t_of_tau is None:
        attach_gamma(path)
    gamma = PchipInterpolator(path.t_of_tau, path.tau)
    gamma_inv = PchipInterpolator(path.tau, path.t_of_tau)
    return gamma, gamma_inv


def compare_paths(tau: np.ndarray, p: dict, p_tilde: dict, c: float,
                  **solver_kw) -> dict:
    """Lipschitz report: sup tau^(c-2) (|dq4| + |dq2|) / ||p - p_tilde||_c.

    Convention: a vanishing perturbation reports ratio 0."""
    c_p = {k: c for k in P_KEYS}
    qa = solve_q_from_p(tau, p, c_p, **solver_kw)
    qb = solve_q_from_p(tau, p_tilde, c_p, **solver_kw)
    dp = max(sup_weighted(tau, p[k] - p_tilde[k], c) for k in P_KEYS)
    dq = sup_weighted(tau, np.abs(qa.q["q4"] - qb.q["q4"])
                      + np.abs(qa.q["q2"] - qb.q["q2"]), c - 2.0)
    ratio = 0.0 if dp == 0.0 else dq / dp
    return {"ratio": ratio, "dp_norm": dp, "dq_norm": dq,
            "path": qa, "path_tilde": qb}


def roundtrip_error(tau: np.ndarray, p: dict, c_p: dict, **solver_kw) -> float:
    """Relative sup error of p -> q -> p on the inner 80% of the window."""
    path = solve_q_from_p(tau, p, c_p, **solver_kw)
    p_back = q_to_p(tau, path.q)
    lo, hi = int(0.02 * len(tau)), int(0.9 * len(tau))
    scale = max(np.max(np.abs(p[k])) for k in P_KEYS)
    err = max(np.max(np.abs(p_back[k][lo:hi] - p[k][lo:hi])) for k in P_KEYS)
    return err / scale if scale > 0 else err
