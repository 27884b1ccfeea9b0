"""Slow-time source and coefficient terms of the remainder equation.

Conventions (matching the secular tables in :mod:`nlsblowup.linops`):

* the modulation operator acting on a profile f is

      Z_p(f) = -i (p1 + p3.y + p5 |y|^2) f + p2.grad f + p4 (d/2 + y.grad) f,

  whose action on the ground state expands exactly over the secular basis:
  Z_p(Q) = p1 a0 n1 - p3 b0 n3 - p2 b0 n2 + p4 a0 n4 + 2 p5 a0 (n5 - g0 n1);

* the inhomogeneity and potential enter through the remainder triple

      R_0      = -i [ (1 - g_p) F(Q) + V_p Q ]              (purely imaginary)
      R_L(w)   = -i [ (1 - g_p) ell(w) + V_p w ]
      R_NL(w)  = +i g_p [ F(Q + w) - F(Q) - ell(w) ]

  with F(z) = |z|^(4/d) z and ell the real-linearization of F at Q.  The sum
  reproduces the unsplit form -i [ g_p F(Q+w) - V_p (Q+w) - F(Q) - ell(w) ].
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from . import geometry
from .grid import Grid
from .ground_state import GroundState
from .linops import SecularBasis
from .modulation import ModulationPath


class ProfileError(ValueError):
    pass


@dataclass
class ProblemSpec:
    """The pair (V, g) with flatness metadata and run parameters.

    ``V`` is stored already gauge-shifted so that V(0) = 0; the shift applied
    is recorded in ``gauge_shift``.
    """

    name: str
    V: Callable
    g: Callable
    d: int
    tau0: float = 20.0
    flat_order_V: int | None = None
    flat_order_g: int | None = None
    gauge_shift: float = 0.0
    meta: dict = dc_field(default_factory=dict)

    def validate(self, tol: float = 1e-6) -> None:
        """Finite-difference checks of g(0) = 1, grad g(0) = 0, hess g(0) = 0
        and of the gauge normalization V(0) = 0."""
        z = np.zeros(1)
        if abs(self.g(z)[0] - 1.0) > tol:
            raise ProfileError(f"g(0) = {self.g(z)[0]} != 1")
        if abs(self.V(z)[0]) > tol:
            raise ProfileError(f"V(0) = {self.V(z)[0]} != 0 after gauge shift")
        h = 1e-3
        st = np.array([-2 * h, -h, 0.0, h, 2 * h])
        gv = self.g(st)
        g1 = (gv[3] - gv[1]) / (2 * h)
        g2 = (gv[3] - 2 * gv[2] + gv[1]) / h ** 2
        if abs(g1) > tol:
            raise ProfileError(f"grad g(0) = {g1:.3e} != 0")
        if abs(g2) > tol:
            raise ProfileError(f"hess g(0) = {g2:.3e} != 0")


def _shifted(V: Callable) -> tuple[Callable, float]:
    v0 = float(np.asarray(V(np.zeros(1)))[0])
    if v0 == 0.0:
        return V, 0.0
    return (lambda x: np.asarray(V(x)) - v0), v0


def make_profile(name: str, d: int = 1, tau0: float = 20.0, **params) -> ProblemSpec:
    """Built-in profile library.

    Names: ``flat``, ``cubic_bump`` (line only), ``quartic_bump``,
    ``strong_flat``, ``odd_strong`` (line only), ``surface:<surface-name>``,
    ``tabulated``.
    Bumps use Gaussian envelopes, so every derivative is bounded and the
    stated vanishing order at 0 is exact.
    """
    zero = lambda x: np.zeros_like(np.asarray(x, dtype=float))
    one = lambda x: np.ones_like(np.asarray(x, dtype=float))

    if name == "flat":
        return ProblemSpec("flat", zero, one, d, tau0,
                           flat_order_V=None, flat_order_g=None)

    if name == "cubic_bump":
        if d != 1:
            raise ProfileError("cubic_bump is a line profile (odd power)")
        a = params.get("a", 0.2)
        s2 = params.get("width", 2.0) ** 2
        v0 = params.get("v0", 0.0)
        g = lambda x: 1.0 + a * np.asarray(x, float) ** 3 * np.exp(-np.asarray(x, float) ** 2 / s2)
        V = (lambda x: v0 * np.asarray(x, float) * np.exp(-np.asarray(x, float) ** 2 / s2)) \
            if v0 else zero
        return ProblemSpec(f"cubic_bump(a={a})", V, g, d, tau0,
                           flat_order_V=(1 if v0 else None), flat_order_g=3)

    if name == "quartic_bump":
        a = params.get("a", 0.2)
        s2 = params.get("width", 2.0) ** 2
        v0 = params.get("v0", 0.0)
        g = lambda x: 1.0 - a * np.asarray(x, float) ** 4 * np.exp(-np.asarray(x, float) ** 2 / s2)
        V = (lambda x: v0 * np.asarray(x, float) ** 2 * np.exp(-np.asarray(x, float) ** 2 / s2)) \
            if v0 else zero
        return ProblemSpec(f"quartic_bump(a={a})", V, g, d, tau0,
                           flat_order_V=(2 if v0 else None), flat_order_g=4)

    if name in ("strong_flat", "odd_strong"):
        if name == "odd_strong" and d != 1:
            raise ProfileError("odd_strong is a line profile (odd powers)")
        ag = params.get("a", 0.2)
        av = params.get("v0", 0.2)
        s2 = params.get("width", 2.0) ** 2
        m_g, m_v = (10, 8) if name == "strong_flat" else (9, 7)

        def bump(m):
            # x^m exp(-x^2/s2) normalized so the peak magnitude is 1
            peak = (m * s2 / 2.0) ** (m / 2.0) * np.exp(-m / 2.0)

            def f(x):
                x = np.asarray(x, float)
                return x ** m * np.exp(-x ** 2 / s2) / peak

            return f

        bg, bv = bump(m_g), bump(m_v)
        g = lambda x: 1.0 - ag * bg(x)
        V = lambda x: av * bv(x)
        return ProblemSpec(f"{name}(a={ag})", V, g, d, tau0,
                           flat_order_V=m_v, flat_order_g=m_g)

    if name.startswith("surface:"):
        if d != 2:
            raise ProfileError("surface profiles live on the plane (d = 2)")
        sname = name.split(":", 1)[1]
        if sname not in geometry.BUILTIN_SURFACES:
            raise ProfileError(f"unknown surface {sname!r}")
        surf = geometry.BUILTIN_SURFACES[sname](**params)
        surf.validate()
        red = geometry.reduce_surface(surf)
        V, shift = _shifted(red.V)
        return ProblemSpec(name, V, red.g, d, tau0,
                           flat_order_V=red.V_flatness_order,
                           flat_order_g=red.g_flatness_order,
                           gauge_shift=shift,
                           meta={"admissibility": red.admissibility,
                                 "surface": surf.name, "reduction": red})

    if name == "tabulated":
        x = np.asarray(params["x"], dtype=float)
        Vs = CubicSpline(x, np.asarray(params["V"], dtype=float))
        gs_ = CubicSpline(x, np.asarray(params["g"], dtype=float))
        lo, hi = x[0], x[-1]
        V_raw = lambda xx: Vs(np.clip(xx, lo, hi))
        g = lambda xx: gs_(np.clip(xx, lo, hi))
        V, shift = _shifted(V_raw)
        return ProblemSpec("tabulated", V, g, d, tau0, gauge_shift=shift)

    raise ProfileError(f"unknown profile {name!r}")


# ----------------------------------------------------------------------
# pointwise nonlinearity helpers
# ----------------------------------------------------------------------

def F_power(z: np.ndarray, d: int) -> np.ndarray:
    """F(z) = |z|^(4/d) z: quintic on the line, cubic in the plane."""
    a2 = np.abs(z) ** 2
    return (a2 * z) if d == 2 else (a2 * a2 * z)


def ell_linearized(Q: np.ndarray, w: np.ndarray, d: int) -> np.ndarray:
    """Real-linearization of F at Q: (2/d+1) Q^(4/d) w + (2/d) Q^(4/d) conj(w)."""
    Qp = Q ** (4.0 / d)
    return (2.0 / d + 1.0) * Qp * w + (2.0 / d) * Qp * np.conj(w)


# ----------------------------------------------------------------------
# modulation operator
# ----------------------------------------------------------------------

def eval_Zp(grid: Grid, p: dict | np.ndarray, f: np.ndarray) -> np.ndarray:
    """Apply Z_p at fixed slow time; p holds the five scalars p1..p5.

    On the radial plane the translation/Galilean entries must vanish.
    """
    if isinstance(p, dict):
        p1, p2, p3, p4, p5 = (float(p[k]) for k in ("p1", "p2", "p3", "p4", "p5"))
    else:
        p1, p2, p3, p4, p5 = map(float, p)
    if grid.layout == "radial" and (p2 != 0.0 or p3 != 0.0):
        raise ProfileError("translation/Galilean forcing is not radial")
    x = grid.x
    out = -1j * (p1 + p3 * x + p5 * grid.r2) * f
    if p2 != 0.0:
        out = out + p2 * grid.derivative(f)
    if p4 != 0.0:
        out = out + p4 * (0.5 * grid.dim * f + grid.x_dot_grad(f))
    return out


def zpq_secular_coefficients(p: dict, gs: GroundState) -> dict:
    """Exact secular expansion of Z_p(Q) as coefficients over n_j."""
    a0, b0, g0 = gs.alpha0, gs.beta0, gs.gamma0
    return {
        "1": a0 * p["p1"] - 2.0 * a0 * g0 * p["p5"],
        "2": -b0 * p["p2"],
        "3": -b0 * p["p3"],
        "4": a0 * p["p4"],
        "5": 2.0 * a0 * p["p5"],
        "6": 0.0,
    }


# ----------------------------------------------------------------------
# slow-time coefficient fields and remainders
# ----------------------------------------------------------------------

def eval_coefficients(grid: Grid, spec: ProblemSpec, path: ModulationPath,
                      tau: float) -> tuple[np.ndarray, np.ndarray]:
    """Sampled fields g_p(tau, y) and V_p(tau, y).

    g_p = g(q4 (y + q2) / t) and V_p = (q4/t)^2 V(q4 (y + q2) / t) with
    t the original time attached to tau by the path.
    """
    t = float(path.t_at(tau))
    q4 = float(path.q_at("q4", tau))
    q2 = float(path.q_at("q2", tau))
    if grid.layout == "radial" and q2 != 0.0:
        raise ProfileError("radial runs require a translation-free path")
    arg = q4 * (grid.x + q2) / t
    if grid.layout == "radial":
        arg = np.abs(arg)
    return spec.g(arg), (q4 / t) ** 2 * spec.V(arg)


@dataclass
class SourceEval:
    """Remainder fields and projected coefficients at one slow time."""

    tau: float
    R_NL: np.ndarray
    R_L: np.ndarray
    R_0: np.ndarray
    Zp_w: np.ndarray | None = None
    D: dict | None = None
    d_coeff: dict | None = None


def eval_R(grid: Grid, gs: GroundState, spec: ProblemSpec, path: ModulationPath,
           tau: float, w: np.ndarray) -> SourceEval:
    """The remainder triple (R_NL, R_L, R_0) at slow time tau."""
    gp, Vp = eval_coefficients(grid, spec, path, tau)
    d = grid.dim
    Q = gs.Q
    FQ = F_power(Q.astype(complex), d)
    lw = ell_linearized(Q, w, d)
    R0 = -1j * ((1.0 - gp) * FQ + Vp * Q)
    RL = -1j * ((1.0 - gp) * lw + Vp * w)
    RNL = 1j * gp * (F_power(Q + w, d) - FQ - lw)
    return SourceEval(tau=tau, R_NL=RNL, R_L=RL, R_0=R0)


def unsplit_R(grid: Grid, gs: GroundState, spec: ProblemSpec, path: ModulationPath,
              tau: float, w: np.ndarray) -> np.ndarray:
    """i [ g_p F(Q+w) - V_p (Q+w) - F(Q) - ell(w) ]; must equal the split sum."""
    gp, Vp = eval_coefficients(grid, spec, path, tau)
    d = grid.dim
    Q = gs.Q
    return 1j * (gp * F_power(Q + w, d) - Vp * (Q + w)
                 - F_power(Q.astype(complex), d) - ell_linearized(Q, w, d))


def project_D(basis: SecularBasis, spec: ProblemSpec, path: ModulationPath,
              tau: float, w: np.ndarray, p_at_tau: dict) -> SourceEval:
    """Projected coefficients D_j = <R_p(w) + Z_p(w), m_j> and the shifted
    d_j obtained by adding the secular expansion of Z_p(Q)."""
    grid = basis.grid
    gs = basis.gs
    src = eval_R(grid, gs, spec, path, tau, w)
    src.Zp_w = eval_Zp(grid, p_at_tau, w)
    total = src.R_NL + src.R_L + src.R_0 + src.Zp_w
    D = {lab: grid.pairing(total, basis.m[lab]) for lab in basis.labels}
    zq = zpq_secular_coefficients(p_at_tau, gs)
    d_coeff = {lab: D[lab] + zq[lab.split("_")[0]] for lab in basis.labels}
    src.D, src.d_coeff = D, d_coeff
    return src
