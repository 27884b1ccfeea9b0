"""Standalone verification: weighted interpolation inequalities on a field
corpus, and flatness validators for problem profiles.

The first four inequalities are constant-free (pure Holder/Plancherel), so
their ratios must not exceed 1 beyond round-off; the remaining five carry an
unspecified constant, which is fitted as the corpus maximum and must be
stable under corpus doubling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Grid
from .sources import ProblemSpec


@dataclass
class InequalityReport:
    ineq_id: str
    max_ratio: float
    constant_free: bool
    fitted_constant: float | None = None


def _ratio(lhs: float, rhs: float) -> float:
    if rhs == 0.0:
        return 0.0
    return lhs / rhs


def _inequalities(grid: Grid, f: np.ndarray) -> dict:
    l2 = grid.norm_l2(f)
    if l2 == 0.0:
        return {f"inter{i}": 0.0 for i in range(1, 10)}
    m = {k: grid.norm_moment(f, k) for k in (1.0, 2.0, 3.0, 4.0, 5.0)}
    h = {k: grid.norm_hs(f, k) for k in (1.0, 2.0, 3.0, 5.0)}
    g1 = grid.gradient(f)
    lap = grid.laplacian(f)
    grad_norm = np.sqrt(sum(grid.norm_l2(gk) ** 2 for gk in g1))

    def wgrad(power: float, arr) -> float:
        wt = (1.0 + grid.r2) ** power
        if isinstance(arr, tuple):
            return float(np.sqrt(sum(np.sum(grid.measure * wt * np.abs(a) ** 2)
                                     for a in arr)))
        return float(np.sqrt(np.sum(grid.measure * wt * np.abs(arr) ** 2)))

    g2 = lap                                       # second derivative proxy: Lap f
    g4 = grid.laplacian(lap)                       # fourth: Lap^2 f
    return {
        "inter1": _ratio(m[1.0], m[3.0] ** (1 / 3) * l2 ** (2 / 3)),
        "inter2": _ratio(m[2.0], m[3.0] ** (2 / 3) * l2 ** (1 / 3)),
        "inter3": _ratio(h[1.0], h[3.0] ** (1 / 3) * l2 ** (2 / 3)),
        "inter4": _ratio(h[2.0], h[3.0] ** (2 / 3) * l2 ** (1 / 3)),
        "inter5": _ratio(wgrad(1.0, g1), m[3.0] ** (1 / 3) * l2 ** (1 / 3) * h[1.0] ** (1 / 3)),
        "inter6": _ratio(wgrad(2.0, g1), m[3.0] ** (2 / 3) * h[1.0] ** (1 / 3)),
        "inter7": _ratio(wgrad(1.0, g2), m[3.0] ** (1 / 3) * h[1.0] ** (2 / 3)),
        "inter8": _ratio(wgrad(1.0, g4), m[5.0] ** (1 / 5) * h[5.0] ** (4 / 5)),
        "inter9": _ratio(wgrad(4.0, g1), m[5.0] ** (4 / 5) * h[5.0] ** (1 / 5)),
    }


def build_corpus(grid: Grid, n_fields: int = 100, seed: int = 0,
                 Q: np.ndarray | None = None) -> list[np.ndarray]:
    """Gaussians, ground-state dilates, and random band-limited fields."""
    rng = np.random.default_rng(seed)
    corpus: list[np.ndarray] = []
    x2 = grid.r2
    n_third = n_fields // 3
    for _ in range(n_third):
        s = rng.uniform(0.5, 3.0)
        c = rng.uniform(-2.0, 2.0) if grid.layout == "line" else 0.0
        shift = (grid.x - c) ** 2 if grid.layout != "planar" else x2
        corpus.append(np.exp(-shift / (2 * s * s)) * np.exp(1j * rng.uniform(0, 2 * np.pi)))
    if Q is not None:
        for _ in range(n_third):
            lam = rng.uniform(0.5, 2.0)
            vals = grid.resample(Q.astype(complex), lam * grid.x) if grid.layout != "planar" \
                else grid.resample_axes(Q.astype(complex), lam * grid.x)
            corpus.append(lam ** (grid.dim / 2.0) * vals)
    while len(corpus) < n_fields:
        z = rng.normal(size=grid.shape) + 1j * rng.normal(size=grid.shape)
        keep = np.abs(grid.m_int) < grid.n // 8
        if grid.layout == "planar":
            z = grid.ifft(grid.fft(z) * np.outer(keep, keep))
        else:
            z = grid.ifft(grid.fft(z) * keep)
        corpus.append(z * np.exp(-x2 / 16.0))
    return corpus[:n_fields]


def verify_interpolation(grid: Grid, corpus: list[np.ndarray]) -> list[InequalityReport]:
    constant_free = {"inter1", "inter2", "inter3", "inter4"}
    worst: dict[str, float] = {f"inter{i}": 0.0 for i in range(1, 10)}
    for f in corpus:
        for key, val in _inequalities(grid, f).items():
            worst[key] = max(worst[key], val)
    out = []
    for key, val in worst.items():
        free = key in constant_free
        out.append(InequalityReport(ineq_id=key, max_ratio=val, constant_free=free,
                                    fitted_constant=None if free else val))
    return out


# ----------------------------------------------------------------------
# hypothesis validators
# ----------------------------------------------------------------------

@dataclass
class HypothesisVerdict:
    mode: str
    passed: bool
    failing_clause: str | None
    details: dict


def _vanishing_order(fn, target: int, deriv_order: int = 0) -> float:
    """Measured vanishing order of fn at 0 by log-log slope over two decades.

    ``deriv_order`` differentiates by centered stencils before fitting.
    Probes whose stencil output sits at the round-off floor of the finite
    difference are discarded; if every probe does, the function is flat
    beyond what doubles can resolve, which satisfies any finite target.
    """
    eps = np.finfo(float).eps
    xs = np.geomspace(3e-3, 0.3, 25)
    vals, noise = [], []
    for x in xs:
        h = max(x / 16.0, 1e-5)
        # derived coefficients carry O(eps/x^2) cancellation dust near 0
        # (the 1/r^2 subtraction in reduced potentials); propagate it
        # through the stencil together with plain round-off
        dust = eps * (1.0 + x ** -2)
        if deriv_order == 0:
            vals.append(abs(float(fn(np.array([x]))[0])))
            noise.append(4.0 * eps + 10.0 * dust)
        elif deriv_order == 1:
            st = fn(np.array([x - h, x + h]))
            vals.append(abs(float(st[1] - st[0]) / (2 * h)))
            noise.append((4.0 * eps + 10.0 * dust) / h)
        else:
            st = fn(np.array([x - h, x, x + h]))
            vals.append(abs(float(st[0] - 2 * st[1] + st[2]) / h ** 2))
            noise.append((8.0 * eps + 10.0 * dust) / h ** 2)
    vals = np.asarray(vals)
    noise = np.asarray(noise)
    keep = (vals > 30.0 * noise) & (vals > np.max(vals) * 1e-10)
    if np.count_nonzero(keep) < 4:
        return float(target + 10)        # flat beyond double precision
    slope = np.polyfit(np.log(xs[keep]), np.log(vals[keep]), 1)[0]
    return float(slope)


def validate_hypotheses(spec: ProblemSpec, mode: str,
                        slope_slack: float = 0.25) -> HypothesisVerdict:
    """PASS/FAIL screening of the flatness hypotheses.

    mode "thblup": g - 1 vanishes to order 3 (value, gradient and Hessian at
    0 all zero) and V to order 1 after the gauge shift.
    mode "stronger": vanishing orders m_V >= 7 for V and m_g >= 9 for g - 1.
    Orders are measured as log-log slopes of the function and of its first
    two derivative envelopes near 0.
    """
    if mode not in ("thblup", "stronger"):
        raise ValueError(f"unknown mode {mode!r}")
    g_sh = lambda x: np.asarray(spec.g(x), float) - 1.0
    details: dict = {}
    failing = None

    if abs(float(spec.g(np.zeros(1))[0]) - 1.0) > 1e-8:
        failing = "g(0) != 1"
    if failing is None and abs(float(spec.V(np.zeros(1))[0])) > 1e-8:
        failing = "V(0) != 0"

    m_g_target = 3 if mode == "thblup" else 9
    m_v_target = 1 if mode == "thblup" else 7
    for beta in (0, 1, 2):
        og = _vanishing_order(g_sh, m_g_target, beta)
        details[f"order_g_deriv{beta}"] = og
        if failing is None and og < m_g_target - beta - slope_slack:
            failing = (f"g - 1: derivative order {beta} vanishes to order "
                       f"{og:.2f} < {m_g_target - beta}")
    for beta in (0, 1):
        ov = _vanishing_order(spec.V, m_v_target, beta)
        details[f"order_V_deriv{beta}"] = ov
        if failing is None and ov < m_v_target - beta - slope_slack:
            failing = (f"V: derivative order {beta} vanishes to order "
                       f"{ov:.2f} < {m_v_target - beta}")

    xs = np.linspace(-30, 30, 601) if spec.d == 1 else np.linspace(0, 30, 601)
    details["sup_abs_V"] = float(np.max(np.abs(spec.V(xs))))
    details["sup_abs_g"] = float(np.max(np.abs(spec.g(xs))))
    if failing is None and not np.isfinite(details["sup_abs_V"] + details["sup_abs_g"]):
        failing = "V or g unbounded on the probe range"

    return HypothesisVerdict(mode=mode, passed=failing is None,
                             failing_clause=failing, details=details)
