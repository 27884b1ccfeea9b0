"""Construction engine: the tuning of the forcing parameters, the secular
integral, the backward non-secular solver, the outer damped iteration on the
remainder, and the plain strong-flatness mode.

The operative evolution system is, in the real-system convention of
:mod:`nlsblowup.linops`,

    (d/dtau + script_L) w  =  Z_p(w) + R_p(w) + Z_p(Q),

whose secular coefficients obey  nu1' = 2 nu4 - 2 g0 nu6 + d1,
nu2' = -2 nu3 + d2, nu3' = d3, nu4' = -2 nu5 + d4, nu5' = 2 nu6 + d5,
nu6' = d6  with d_j the projections of the right side.  The tuning chooses
p so that d2 = d3 = d4 = 0, d5 = -2 nu6 and d1 = 2 g0 nu6, leaving only the
nu6 direction alive.

Plain damped iteration replaces any compactness argument: convergence is an
empirical observation reported per run, and divergence is a reportable
outcome, never a silent one.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .grid import Grid
from .ground_state import GroundState
from .linops import SecularBasis
from .modulation import (ModulationPath, P_KEYS, integral_to_inf,
                         solve_q_from_p, sup_weighted, trivial_path)
from .sources import ProblemSpec, F_power, ell_linearized


class TuningError(RuntimeError):
    pass


# ----------------------------------------------------------------------
# vectorized slow-time path evaluation (space axis first)
# ----------------------------------------------------------------------

def coefficient_paths(grid: Grid, spec: ProblemSpec, path: ModulationPath):
    """g_p and V_p sampled as (n_space, n_tau) arrays."""
    t = path.t_of_tau
    q4 = path.q["q4"]
    q2 = path.q["q2"]
    arg = q4[None, :] * (grid.x[:, None] + q2[None, :]) / t[None, :]
    if grid.layout == "radial":
        arg = np.abs(arg)
    return spec.g(arg), (q4[None, :] / t[None, :]) ** 2 * spec.V(arg)


def zp_path(grid: Grid, p: dict, w_path: np.ndarray) -> np.ndarray:
    """Z_p applied columnwise: p entries are (n_tau,) arrays."""
    x = grid.x[:, None]
    out = -1j * (p["p1"][None, :] + p["p3"][None, :] * x
                 + p["p5"][None, :] * grid.r2[:, None]) * w_path
    needs_grad = np.any(p["p2"]) or np.any(p["p4"])
    if needs_grad:
        dw = grid.derivative(w_path)
        if np.any(p["p2"]):
            out = out + p["p2"][None, :] * dw
        if np.any(p["p4"]):
            out = out + p["p4"][None, :] * (0.5 * grid.dim * w_path + x * dw)
    return out


def remainder_paths(grid: Grid, gs: GroundState, spec: ProblemSpec,
                    path: ModulationPath, w_path: np.ndarray):
    """R_0, R_L(w), R_NL(w) columnwise; returns their sum and R_0."""
    gp, Vp = coefficient_paths(grid, spec, path)
    d = grid.dim
    Q = gs.Q[:, None]
    FQ = F_power(Q.astype(complex), d)
    lw = ell_linearized(Q, w_path, d)
    R0 = -1j * ((1.0 - gp) * FQ + Vp * Q)
    RL = -1j * ((1.0 - gp) * lw + Vp * w_path)
    RNL = 1j * gp * (F_power(Q + w_path, d) - FQ - lw)
    return RNL + RL + R0, R0


def pairings_path(basis: SecularBasis, field_path: np.ndarray) -> dict:
    """<field(tau), m_j> for every column at once."""
    mu = basis.grid.measure
    out = {}
    for lab in basis.labels:
        out[lab] = np.real((mu * np.conj(basis.m[lab])) @ field_path)
    return out


def project_M_path(basis: SecularBasis, field_path: np.ndarray) -> np.ndarray:
    coeffs = pairings_path(basis, field_path)
    out = field_path.copy()
    for lab in basis.labels:
        out -= np.outer(basis.n[lab], coeffs[lab])
    return out


def hs_norm_path(grid: Grid, w_path: np.ndarray, s: float) -> np.ndarray:
    """Column H^s norms of a (n_space, n_tau) path."""
    if grid.layout == "radial":
        rho, glw, J = grid._hankel_data()
        fhat = J @ (w_path * grid.measure[:, None])
        val = ((glw * rho * (1.0 + rho ** 2) ** s) @ np.abs(fhat) ** 2) / (2 * np.pi)
        return np.sqrt(np.maximum(val, 0.0))
    F = np.fft.fft(w_path, axis=0)
    scale = grid.h ** grid.dim / grid.size
    return np.sqrt(scale * ((1.0 + grid.xi2)[:, None] * np.abs(F) ** 2).sum(axis=0))


def moment_norm_path(grid: Grid, w_path: np.ndarray, delta: float) -> np.ndarray:
    wgt = (grid.measure * (1.0 + grid.r2) ** delta)[:, None]
    return np.sqrt((wgt * np.abs(w_path) ** 2).sum(axis=0))


def y_norm(basis: SecularBasis, tau: np.ndarray, w_path: np.ndarray,
           eps: float, delta: float) -> tuple[float, float, float]:
    """The three components of the outer-iteration norm."""
    wM = project_M_path(basis, w_path)
    a1 = float(np.max(tau ** (2.0 - eps) * hs_norm_path(basis.grid, wM, delta)))
    a2 = float(np.max(tau ** (2.0 - 2.0 * eps - delta)
                      * moment_norm_path(basis.grid, wM, delta)))
    mu = basis.grid.measure
    nu6 = np.real((mu * np.conj(basis.m["6"])) @ w_path)
    a3 = float(np.max(tau ** (3.0 - 3.0 * eps) * np.abs(nu6)))
    return a1, a2, a3


def x_norm(grid: Grid, tau: np.ndarray, path: np.ndarray, a: float, b: float,
           delta: float) -> float:
    return float(np.max(tau ** a * hs_norm_path(grid, path, delta))
                 + np.max(tau ** b * moment_norm_path(grid, path, delta)))


# ----------------------------------------------------------------------
# tuning map
# ----------------------------------------------------------------------

@dataclass
class TuningResult:
    p: dict                      # five (n_tau,) arrays
    q_path: ModulationPath
    D: dict                      # projected coefficients at the fixed point
    nu6: np.ndarray
    iterations: int
    contraction_ratios: list
    p_bound: float               # sup tau^(3-3eps) |p|
    converged: bool


def _d_paths(basis: SecularBasis, spec: ProblemSpec, q_path: ModulationPath,
             w_path: np.ndarray, p: dict) -> dict:
    grid = basis.grid
    total, _ = remainder_paths(grid, basis.gs, spec, q_path, w_path)
    total = total + zp_path(grid, p, w_path)
    return pairings_path(basis, total)


def _radial_label(basis: SecularBasis, j: str) -> list:
    return [lab for lab in basis.labels if lab.split("_")[0] == j]


def apply_psi(basis: SecularBasis, spec: ProblemSpec, tau: np.ndarray,
              w_path: np.ndarray, p: dict, eps: float = 0.1) -> dict:
    """One undamped application of the tuning map at parameter p."""
    gs = basis.gs
    a0, b0, g0 = gs.alpha0, gs.beta0, gs.gamma0
    c_p = {k: 3.0 - 3.0 * eps for k in P_KEYS}
    zeros = np.zeros_like(tau)
    q_path = solve_q_from_p(tau, p, c_p, check_admissible=False)
    D = _d_paths(basis, spec, q_path, w_path, p)
    D1 = sum(D[lab] for lab in _radial_label(basis, "1"))
    D4 = sum(D[lab] for lab in _radial_label(basis, "4"))
    D5 = sum(D[lab] for lab in _radial_label(basis, "5"))
    D6 = sum(D[lab] for lab in _radial_label(basis, "6"))
    int_D6 = integral_to_inf(tau, D6, 4.0 - 2.0 * eps)
    new_p = {
        "p5": (-D5 + 2.0 * int_D6) / (2.0 * a0),
        "p4": -D4 / a0,
        "p1": -(D1 + g0 * D5) / a0,
        "p2": zeros.copy(),
        "p3": zeros.copy(),
    }
    for j, key in (("2", "p2"), ("3", "p3")):
        labs = _radial_label(basis, j)
        if labs:
            new_p[key] = sum(D[lab] for lab in labs) / b0
    return new_p


def tune_p(basis: SecularBasis, spec: ProblemSpec, tau: np.ndarray,
           w_path: np.ndarray, eps: float = 0.1, damping: float = 0.5,
           tol: float = 1e-12, max_iter: int = 120,
           p0: dict | None = None) -> TuningResult:
    """Damped fixed point for the forcing parameters.

    Each pass re-solves the modulation from the current p (the coefficient
    fields depend on it), projects the full right side, and updates p from
    the secular-cancellation conditions.  ``p0`` warm-starts the iteration.
    """
    gs = basis.gs
    c = 3.0 - 3.0 * eps
    c_p = {k: c for k in P_KEYS}
    zeros = np.zeros_like(tau)
    p = {k: zeros.copy() for k in P_KEYS} if p0 is None \
        else {k: p0[k].copy() for k in P_KEYS}
    tail_c6 = 4.0 - 2.0 * eps

    ratios: list = []
    last_change = None
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        new_p = apply_psi(basis, spec, tau, w_path, p, eps=eps)
        change = max(np.max(np.abs(new_p[k] - p[k])) for k in P_KEYS)
        if last_change is not None and last_change > 0:
            ratios.append(change / last_change)
        last_change = change
        p = {k: p[k] + damping * (new_p[k] - p[k]) for k in P_KEYS}
        if change < tol:
            converged = True
            break
    if not converged:
        raise TuningError(
            f"tuning stalled (last change {last_change:.3e}); tau0 too small")

    q_path = solve_q_from_p(tau, p, c_p, check_admissible=False)
    D = _d_paths(basis, spec, q_path, w_path, p)
    D6 = sum(D[lab] for lab in _radial_label(basis, "6"))
    nu6 = -integral_to_inf(tau, D6, tail_c6)
    p_bound = max(sup_weighted(tau, p[k], c) for k in P_KEYS)
    return TuningResult(p=p, q_path=q_path, D=D, nu6=nu6, iterations=it,
                        contraction_ratios=ratios, p_bound=p_bound,
                        converged=converged)


# ----------------------------------------------------------------------
# secular integral
# ----------------------------------------------------------------------

@dataclass
class SecularPaths:
    tau: np.ndarray
    nu: dict                      # label -> (n_tau,) array

    def max_residual(self, skip: str = "6") -> float:
        worst = 0.0
        for lab, arr in self.nu.items():
            if lab.split("_")[0] == skip:
                continue
            worst = max(worst, float(np.max(np.abs(arr))))
        return worst


def phi1(basis: SecularBasis, tau: np.ndarray, tuning: TuningResult,
         eps: float = 0.1) -> SecularPaths:
    """Decaying solution of the secular coefficient system driven by the
    tuned projections; with exact tuning every component but nu6 vanishes."""
    gs = basis.gs
    g0 = gs.gamma0
    zq = {}
    for lab in basis.labels:
        base = lab.split("_")[0]
        comp = {k: tuning.p[k] for k in P_KEYS}
        zq[lab] = _zpq_path(gs, comp)[base]
    d = {lab: tuning.D[lab] + zq[lab] for lab in basis.labels}
    tail = 4.0 - 2.0 * eps
    nu = {}
    nu6 = -integral_to_inf(tau, d["6"], tail)
    nu["6"] = nu6
    nu5 = -integral_to_inf(tau, 2.0 * nu6 + d["5"], tail - 1.0)
    nu["5"] = nu5
    nu4 = -integral_to_inf(tau, -2.0 * nu5 + d["4"], tail - 1.0)
    nu["4"] = nu4
    for lab in _radial_label(basis, "3"):
        nu[lab] = -integral_to_inf(tau, d[lab], tail)
    for lab in _radial_label(basis, "2"):
        lab3 = lab.replace("2", "3")
        nu[lab] = -integral_to_inf(tau, -2.0 * nu[lab3] + d[lab], tail - 1.0)
    nu["1"] = -integral_to_inf(tau, 2.0 * nu4 - 2.0 * g0 * nu6 + d["1"], tail - 1.0)
    return SecularPaths(tau=tau, nu=nu)


def _zpq_path(gs: GroundState, p: dict) -> dict:
    a0, b0, g0 = gs.alpha0, gs.beta0, gs.gamma0
    return {
        "1": a0 * p["p1"] - 2.0 * a0 * g0 * p["p5"],
        "2": -b0 * p["p2"],
        "3": -b0 * p["p3"],
        "4": a0 * p["p4"],
        "5": 2.0 * a0 * p["p5"],
        "6": np.zeros_like(p["p1"]),
    }


# ----------------------------------------------------------------------
# non-secular backward solve
# ----------------------------------------------------------------------

@dataclass
class Phi2Result:
    phi: np.ndarray               # (n_space, n_tau)
    leak_max: float               # worst secular leakage removed per step
    ramp_width: float


def phi2(basis: SecularBasis, tau: np.ndarray, F_path: np.ndarray,
         p: dict, ramp_width: float = 1.0, reproject: bool = True) -> Phi2Result:
    """Integrate  d(phi)/dtau + script_L phi - P_M Z_p(phi) = chi F  backward
    from the horizon with zero data; chi shuts the source off smoothly over
    the last ``ramp_width`` of the window.

    The full linear flow advances by its exact one-step exponential; the
    small remainder (Z_p coupling and the source) advances by a Runge-Kutta
    stage sandwiched between half-steps.
    """
    from .linops import exact_linear_step

    grid = basis.grid
    gs = basis.gs
    n_tau = len(tau)
    h = tau[1] - tau[0]
    lin_half = exact_linear_step(gs, -0.5 * h)
    x = grid.x
    r2 = grid.r2
    tau_end = tau[-1]
    p_active = any(np.any(p[k]) for k in P_KEYS)

    def chi(t: float) -> float:
        s = (tau_end - t) / ramp_width
        if s >= 1.0:
            return 1.0
        if s <= 0.0:
            return 0.0
        return 0.5 * (1.0 - np.cos(np.pi * s))

    def F_at(j: int, frac: float) -> np.ndarray:
        if j + 1 >= n_tau:
            return F_path[:, j]
        return (1.0 - frac) * F_path[:, j] + frac * F_path[:, j + 1]

    def rhs(u: np.ndarray, t: float, j: int, frac: float) -> np.ndarray:
        src = chi(t) * F_at(j, frac)
        if not p_active:
            return src
        p1, p2_, p3_, p4_, p5_ = (float(np.interp(t, tau, p[k])) for k in P_KEYS)
        z = -1j * (p1 + p3_ * x + p5_ * r2) * u
        if p2_ != 0.0 or p4_ != 0.0:
            du = grid.derivative(u)
            if p2_ != 0.0:
                z = z + p2_ * du
            if p4_ != 0.0:
                z = z + p4_ * (0.5 * grid.dim * u + x * du)
        coeffs = {lab: grid.pairing(z, basis.m[lab]) for lab in basis.labels}
        z = z - basis.combine(coeffs)
        return src + z

    phi_path = np.zeros_like(F_path)
    cur = np.zeros(grid.shape, dtype=complex)
    leak_max = 0.0
    dt = -h
    for j in range(n_tau - 1, 0, -1):
        t1 = tau[j]
        u = lin_half(cur)
        tm = t1 + 0.5 * dt
        k1 = rhs(u, t1, j - 1, 1.0)
        k2 = rhs(u + 0.5 * dt * k1, tm, j - 1, 0.5)
        k3 = rhs(u + 0.5 * dt * k2, tm, j - 1, 0.5)
        k4 = rhs(u + dt * k3, t1 + dt, j - 1, 0.0)
        u = u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        cur = lin_half(u)
        if not np.all(np.isfinite(cur)):
            raise FloatingPointError(f"backward solve lost finiteness at tau={tau[j-1]:.2f}")
        if reproject:
            coeffs = pairings_path(basis, cur[:, None])
            leak = max(abs(v[0]) for v in coeffs.values())
            leak_max = max(leak_max, leak)
            for lab in basis.labels:
                cur = cur - coeffs[lab][0] * basis.n[lab]
        phi_path[:, j - 1] = cur
    return Phi2Result(phi=phi_path, leak_max=leak_max, ramp_width=ramp_width)


# ----------------------------------------------------------------------
# outer iteration
# ----------------------------------------------------------------------

@dataclass
class IterationState:
    tau: np.ndarray
    w_path: np.ndarray
    tuning: TuningResult | None
    secular: SecularPaths | None
    eps: float
    delta: float
    history: list = dc_field(default_factory=list)   # per-iteration Y triples
    diffs: list = dc_field(default_factory=list)     # Y-norm of increments
    converged: bool = False
    fixed_point_residual: float | None = None
    decay_h1: float | None = None
    decay_moment: float | None = None
    meta: dict = dc_field(default_factory=dict)


def picard_iterate(basis: SecularBasis, spec: ProblemSpec, tau0: float,
                   tau_max: float, eps: float = 0.1, delta: float = 1.6,
                   dtau: float = 0.05, max_iter: int = 25,
                   damping: float = 0.5, tol: float = 1e-8) -> IterationState:
    """Damped outer iteration w <- Phi(w) from w = 0.

    Divergence is reported through the state (converged=False plus the
    iterate history), not raised.
    """
    if not (1.0 < delta < 2.0):
        raise ValueError(f"delta must lie in (1, 2), got {delta}")
    if not (0.0 < eps < 0.25):
        raise ValueError(f"eps must lie in (0, 1/4), got {eps}")
    if not eps < 1.0 - delta / 2.0:
        raise ValueError(f"need eps < 1 - delta/2, got eps={eps}, delta={delta}")
    grid = basis.grid
    if grid.layout == "planar":
        raise NotImplementedError("outer iteration runs on the line or the radial plane")
    n_tau = int(round((tau_max - tau0) / dtau)) + 1
    tau = np.linspace(tau0, tau_max, n_tau)
    w = np.zeros((grid.size, n_tau), dtype=complex)
    state = IterationState(tau=tau, w_path=w, tuning=None, secular=None,
                           eps=eps, delta=delta)

    warm = None
    for it in range(1, max_iter + 1):
        try:
            tuning = tune_p(basis, spec, tau, w, eps=eps, p0=warm)
            warm = tuning.p
            sec = phi1(basis, tau, tuning, eps=eps)
            secular_part = np.outer(basis.n["6"], sec.nu["6"])
            total, _ = remainder_paths(grid, basis.gs, spec, tuning.q_path, w)
            wS = w - project_M_path(basis, w)
            F = total + zp_path(grid, tuning.p, wS)
            F = project_M_path(basis, F)
            res2 = phi2(basis, tau, F, tuning.p)
        except (TuningError, FloatingPointError) as exc:
            state.meta["failure"] = str(exc)
            state.converged = False
            return state
        w_new = secular_part + res2.phi
        d_y = sum(y_norm(basis, tau, w_new - w, eps, delta))
        y_tri = y_norm(basis, tau, w_new, eps, delta)
        state.history.append(y_tri)
        state.diffs.append(d_y)
        state.tuning, state.secular = tuning, sec
        state.meta.setdefault("leak", []).append(res2.leak_max)
        if not np.isfinite(d_y) or d_y > 1e6:
            state.meta["failure"] = f"outer iteration diverged at step {it}"
            state.w_path = w
            return state
        if d_y < tol:
            state.w_path = w_new
            state.converged = True
            state.fixed_point_residual = d_y
            break
        w = w + damping * (w_new - w)
        state.w_path = w
    else:
        state.fixed_point_residual = state.diffs[-1]

    from .modulation import decay_exponent
    h1 = np.array([grid.norm_h1(state.w_path[:, i]) for i in range(0, n_tau, 10)])
    mo = moment_norm_path(grid, state.w_path[:, ::10], 1.0)
    state.decay_h1 = decay_exponent(tau[::10], h1)
    state.decay_moment = decay_exponent(tau[::10], mo)
    return state


def equation_residual(basis: SecularBasis, spec: ProblemSpec,
                      state: IterationState, stride: int = 50) -> np.ndarray:
    """L2 residual of the operative remainder equation along the stored path,
    with the slow-time derivative by central differences."""
    grid = basis.grid
    tau = state.tau
    w = state.w_path
    tuning = state.tuning
    h = tau[1] - tau[0]
    total, _ = remainder_paths(grid, basis.gs, spec, tuning.q_path, w)
    zw = zp_path(grid, tuning.p, w)
    zq_coeffs = _zpq_path(basis.gs, tuning.p)
    out = []
    idx = range(1, len(tau) - 1, stride)
    for j in idx:
        dw = (w[:, j + 1] - w[:, j - 1]) / (2.0 * h)
        lhs = dw + basis.op.apply_script_L(w[:, j])
        rhs = zw[:, j] + total[:, j]
        zq = sum(zq_coeffs[lab.split("_")[0]][j] * basis.n[lab] for lab in basis.labels)
        out.append(grid.norm_l2(lhs - rhs - zq))
    return np.array(out)


# ----------------------------------------------------------------------
# strong-flatness mode
# ----------------------------------------------------------------------

def contraction_exponents(m_V: float, m_g: float, a: float, b: float) -> dict:
    """The seven powers of 1/T controlling the plain fixed point."""
    exps = {
        "nonlinear": a - 4.0,
        "inhomogeneity": m_g - 4.0,
        "potential": m_V - 2.0,
        "plain": 1.0,
        "moment_gap": a - b,
        "source_g": m_g - a - 4.0,
        "source_V": m_V - 2.0 - a,
    }
    exps["all_positive"] = bool(all(v > 0 for k, v in exps.items()
                                    if k != "all_positive"))
    return exps


@dataclass
class SimpleModeResult:
    t: np.ndarray
    h_path: np.ndarray
    e_norms: list
    contraction_ratios: list
    converged: bool
    exponents: dict


def simple_M(basis: SecularBasis, spec: ProblemSpec, T: float, T_max: float,
             a: float = 4.5, b: float = 4.2, s: float = 1.0, dt: float = 0.05,
             max_iter: int = 12, tol: float = 1e-6) -> SimpleModeResult:
    """Iterate the plain fixed point under strong flatness: no modulation,
    full space (secular growth is beaten by the source decay).

    The iterate map integrates  (d/dt + script_L) h = -i R(h)  backward from
    the horizon; the E-norm is  sup t^a ||h||_{H^s} + sup t^b || |x| h ||.
    ``tol`` is relative to the first iterate's E-norm: the late-time weights
    t^a amplify the integrator's round-off floor, so absolute increments
    below that floor are meaningless.
    """
    if spec.flat_order_V is None or spec.flat_order_g is None \
            or spec.flat_order_V < 7 or spec.flat_order_g < 9:
        raise TuningError("strong-flatness mode needs m_V >= 7 and m_g >= 9")
    exps = contraction_exponents(spec.flat_order_V, spec.flat_order_g, a, b)
    if not exps["all_positive"]:
        raise TuningError(f"exponent set not positive: {exps}")
    grid = basis.grid
    gs = basis.gs
    n_t = int(round((T_max - T) / dt)) + 1
    t = np.linspace(T, T_max, n_t)
    trivial = trivial_path(t)
    trivial.t_of_tau = t            # identity time change in this mode
    zero_p = {k: np.zeros_like(t) for k in P_KEYS}

    def iterate(h_path: np.ndarray) -> np.ndarray:
        total, _ = remainder_paths(grid, gs, spec, trivial, h_path)
        res = phi2(basis, t, total, zero_p, reproject=False)
        return res.phi

    def e_norm(h_path: np.ndarray) -> float:
        hs = hs_norm_path(grid, h_path, s)
        wgt = (grid.measure * grid.r2)[:, None]
        mom = np.sqrt((wgt * np.abs(h_path) ** 2).sum(axis=0))
        return float(np.max(t ** a * hs) + np.max(t ** b * mom))

    h_path = np.zeros((grid.size, n_t), dtype=complex)
    e_norms, ratios = [], []
    prev_diff = None
    converged = False
    for _ in range(max_iter):
        h_new = iterate(h_path)
        diff = e_norm(h_new - h_path)
        e_norms.append(e_norm(h_new))
        floor = tol * e_norms[0]
        # ratios of successive increment norms measure the contraction; once
        # the increments reach the floor the quotient is noise
        if prev_diff is not None and prev_diff > 10.0 * floor:
            ratios.append(diff / prev_diff)
            if ratios[-1] >= 1.0 and diff > 10.0 * floor:
                raise TuningError(
                    f"plain fixed point expanding (ratio {ratios[-1]:.2f}); T too small")
        prev_diff = diff
        h_path = h_new
        if diff < floor:
            converged = True
            break
    return SimpleModeResult(t=t, h_path=h_path, e_norms=e_norms,
                            contraction_ratios=ratios, converged=converged,
                            exponents=exps)
