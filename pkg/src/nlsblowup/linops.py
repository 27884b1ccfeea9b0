"""Linearization around the ground state: L, its real-system form, the
secular basis with its biorthogonal partners, projectors, and the group
generated on the two invariant sectors.

Identifying C with R^2, the matrix operator is

    script_L = [[0, L_minus], [-L_plus, 0]],

acting on (Re f, Im f); in complex notation script_L f = -i L f.  The group
written ``exp(itL)`` below is the flow of  dW/dt + script_L W = 0, which is
polynomial on the secular span and bounded on its biorthogonal complement.
The quadratic form Re<Lf, f> is conserved by that flow and is an equivalent
squared H^1 norm on the complement.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.linalg import expm, inv

from .grid import Grid
from .ground_state import GroundState


class SecularBasisError(RuntimeError):
    """Gram matrix too far from the identity; conventions are broken."""


@dataclass
class LinearizedOperator:
    """Appliers for L, L_plus, L_minus and the real-system matrix form."""

    gs: GroundState

    def __post_init__(self):
        grid = self.gs.grid
        p = self.gs.power
        self._Qp = self.gs.Q ** (p - 1.0)        # Q^(4/d)
        self._a = 2.0 / grid.dim + 1.0
        self._b = 2.0 / grid.dim
        self.grid = grid

    def apply_L(self, f: np.ndarray) -> np.ndarray:
        """L f = -Lap f + f - (2/d+1) Q^(4/d) f - (2/d) Q^(4/d) conj(f)."""
        return (-self.grid.laplacian(f) + f
                - self._a * self._Qp * f - self._b * self._Qp * np.conj(f))

    def apply_L_plus(self, f: np.ndarray) -> np.ndarray:
        return -self.grid.laplacian(f) + f - (self._a + self._b) * self._Qp * f

    def apply_L_minus(self, f: np.ndarray) -> np.ndarray:
        return -self.grid.laplacian(f) + f - self._Qp * f

    def apply_script_L(self, f: np.ndarray) -> np.ndarray:
        """Matrix form on (Re, Im): returns L_minus(Im f) - i L_plus(Re f)."""
        re = np.real(f)
        im = np.imag(f)
        return self.apply_L_minus(im.astype(complex)).real \
            - 1j * self.apply_L_plus(re.astype(complex)).real

    def m_norm_sq(self, f: np.ndarray) -> float:
        """Re <L f, f>; nonnegative on the non-secular sector."""
        return self.grid.pairing(self.apply_L(f), f)


# ----------------------------------------------------------------------
# secular basis
# ----------------------------------------------------------------------

@dataclass
class SecularBasis:
    """Biorthogonal families n_j (secular span) and m_j (its dual).

    ``labels`` lists the modes actually present: on the line all six, on the
    radial plane only the radial ones (1, 4, 5, 6); translation and Galilean
    directions have no radial representative.
    """

    gs: GroundState
    op: LinearizedOperator
    labels: list
    n: dict
    m: dict
    gram: np.ndarray
    gram_deviation_raw: float
    swept: bool
    action: dict                 # label -> list of (coeff, label): script_L n_j
    diagnostics: dict = dc_field(default_factory=dict)

    @property
    def grid(self) -> Grid:
        return self.gs.grid

    def coefficients(self, w: np.ndarray) -> dict:
        """Secular coefficients nu_j = <w, m_j>."""
        return {lab: self.grid.pairing(w, self.m[lab]) for lab in self.labels}

    def combine(self, coeffs: dict) -> np.ndarray:
        out = np.zeros(self.grid.shape, dtype=complex)
        for lab, c in coeffs.items():
            if c != 0.0:
                out = out + c * self.n[lab]
        return out

    def project(self, w: np.ndarray, which: str) -> np.ndarray:
        """P_S w (span of n_j) or P_M w = w - P_S w."""
        ps = self.combine(self.coefficients(w))
        if which == "S":
            return ps
        if which == "M":
            return w - ps
        raise ValueError(f"which must be 'S' or 'M', got {which!r}")

    def action_matrix(self) -> np.ndarray:
        """A with script_L n_k = sum_j A[k, j] n_j."""
        k = len(self.labels)
        A = np.zeros((k, k))
        pos = {lab: i for i, lab in enumerate(self.labels)}
        for lab, terms in self.action.items():
            for coeff, target in terms:
                A[pos[lab], pos[target]] = coeff
        return A

    def secular_propagator(self, t: float) -> np.ndarray:
        """Matrix sending nu(0) to nu(t) for dW/dt + script_L W = 0.

        nu_j' = -sum_k nu_k A[k, j], solved exactly (A is nilpotent).
        """
        A = self.action_matrix()
        return expm(-t * A.T)


def build_secular_basis(gs: GroundState, sweep_tol: float = 1e-8,
                        abort_tol: float = 1e-4) -> SecularBasis:
    """Construct the 2d+4 secular modes (radial subset on the radial plane).

    The Gram matrix <n_k, m_j> is checked against the identity; deviations
    above ``sweep_tol`` trigger one biorthogonalization sweep of the duals,
    deviations above ``abort_tol`` abort.
    """
    if gs.alpha0 is None:
        raise ValueError("ground state is missing normalization constants")
    grid = gs.grid
    op = LinearizedOperator(gs)
    a0, b0, g0 = gs.alpha0, gs.beta0, gs.gamma0
    Q = gs.Q.astype(complex)
    Qt = gs.Qtilde.astype(complex)
    d = grid.dim
    r2 = grid.r2
    scaling = 0.5 * d * Q + grid.x_dot_grad(Q)          # d/2 Q + x . grad Q

    n: dict = {}
    m: dict = {}
    n["1"] = -1j / a0 * Q
    n["4"] = scaling / a0
    n["5"] = -1j / a0 * (0.5 * r2 * Q + g0 * Q)
    n["6"] = Qt / a0
    m["1"] = 1j * Qt
    m["4"] = -0.5 * r2 * Q - g0 * Q
    m["5"] = 1j * scaling
    m["6"] = -Q

    radial_only = (grid.layout == "radial")
    if radial_only:
        labels = ["1", "4", "5", "6"]
    else:
        if grid.layout == "planar":
            grads = grid.gradient(Q)
            coords = grid.coords
        else:
            grads = (grid.derivative(Q),)
            coords = (grid.x,)
        for ell, (dQ, xc) in enumerate(zip(grads, coords), start=1):
            suf = "" if grid.dim == 1 else f"_{ell}"
            n[f"2{suf}"] = -dQ / b0
            n[f"3{suf}"] = 1j * xc * Q / b0
            m[f"2{suf}"] = xc * Q
            m[f"3{suf}"] = -1j * dQ
        if grid.dim == 1:
            labels = ["1", "2", "3", "4", "5", "6"]
        else:
            labels = ["1", "2_1", "2_2", "3_1", "3_2", "4", "5", "6"]

    k = len(labels)
    gram = np.array([[grid.pairing(n[lk], m[lj]) for lj in labels] for lk in labels])
    deviation = float(np.max(np.abs(gram - np.eye(k))))
    if deviation > abort_tol:
        raise SecularBasisError(f"Gram deviation {deviation:.3e} exceeds {abort_tol:.1e}")

    swept = False
    if deviation > sweep_tol:
        # one sweep: replace m_j by sum_i (G^-1)[i, j] m_i
        Ginv = inv(gram)
        new_m = {}
        for j, lj in enumerate(labels):
            acc = np.zeros(grid.shape, dtype=complex)
            for i, li in enumerate(labels):
                acc = acc + Ginv[i, j] * m[li]
            new_m[lj] = acc
        m.update(new_m)
        swept = True

    final = np.array([[grid.pairing(n[lk], m[lj]) for lj in labels] for lk in labels])

    action = {"1": [], "4": [(-2.0, "1")], "5": [(2.0, "4")],
              "6": [(-2.0, "5"), (2.0 * g0, "1")]}
    if not radial_only:
        if grid.dim == 1:
            action["2"] = []
            action["3"] = [(2.0, "2")]
        else:
            for ell in (1, 2):
                action[f"2_{ell}"] = []
                action[f"3_{ell}"] = [(2.0, f"2_{ell}")]

    return SecularBasis(gs=gs, op=op, labels=labels, n=n, m=m, gram=final,
                        gram_deviation_raw=deviation, swept=swept, action=action,
                        diagnostics={"gram_deviation_final":
                                     float(np.max(np.abs(final - np.eye(k))))})


# ----------------------------------------------------------------------
# group evolution
# ----------------------------------------------------------------------

def real_system_generator(gs: GroundState) -> np.ndarray:
    """Dense 2N x 2N generator of d(Re, Im)/dt: (-L_minus Im, L_plus Re).

    Only available on section grids (line / radial), where the dense
    Laplacian is cheap.  Splitting the conjugate-coupling potential off the
    dispersion is numerically treacherous (the pointwise blocks are
    non-normal and the composition can develop spurious exponential growth),
    so the whole linear part is exponentiated at once.
    """
    grid = gs.grid
    n = grid.n
    lap = grid.laplacian_matrix().real
    p = gs.power
    Qp = gs.Q ** (p - 1.0)
    L_plus = -lap + np.eye(n) - np.diag((4.0 / grid.dim + 1.0) * Qp)
    L_minus = -lap + np.eye(n) - np.diag(Qp)
    G = np.zeros((2 * n, 2 * n))
    G[:n, n:] = -L_minus
    G[n:, :n] = L_plus
    return G


def exact_linear_step(gs: GroundState, dt: float):
    """Exact one-step map of the full linearized flow over dt (cached).

    Returns a callable on complex fields; works for either sign of dt.
    """
    cache = gs.diagnostics.setdefault("_linear_steps", {})
    key = round(float(dt), 14)
    if key not in cache:
        from scipy.linalg import expm
        cache[key] = expm(dt * real_system_generator(gs))
    E = cache[key]
    grid = gs.grid
    n = grid.n
    radial = grid.layout == "radial"

    def step(u: np.ndarray) -> np.ndarray:
        if u.ndim == 1:
            v = np.concatenate([u.real, u.imag])
        else:
            v = np.concatenate([u.real, u.imag], axis=0)
        out = E @ v
        res = out[:n] + 1j * out[n:]
        if radial:
            # odd content on the section is unphysical; the dense operator's
            # odd sector carries spurious growth, so project it out
            res = grid.symmetrize_even(res)
        return res

    return step


def evolve_semigroup(basis: SecularBasis, f: np.ndarray, t: float,
                     direction: int = +1, dt: float = 0.05,
                     reproject_every: int = 1,
                     checkpoints: np.ndarray | None = None):
    """Apply the group to f over time t (direction -1 runs it backward).

    The secular part advances by the exact polynomial coefficient flow; the
    complement advances by the exact one-step exponential of the discrete
    generator and is re-projected to kill leakage into the secular span
    (the discrete Jordan chain is marginally split, so unprojected content
    would grow slowly).

    Returns (result, info); with ``checkpoints`` an array of times, ``info``
    carries the sampled fields and per-sample leakage.
    """
    gs = basis.gs
    grid = basis.grid
    tt = float(t) * direction
    nu0 = basis.coefficients(f)
    wM = basis.project(f, "M")

    n_steps = max(1, int(round(abs(tt) / dt)))
    step_dt = tt / n_steps
    stepper = exact_linear_step(gs, step_dt)

    want = None
    if checkpoints is not None:
        want = np.asarray(checkpoints, dtype=float) * direction
        samples = []

    leak_max = 0.0
    cur = wM.copy()
    times = step_dt * np.arange(n_steps + 1)
    for i in range(1, n_steps + 1):
        cur = stepper(cur)
        if not np.all(np.isfinite(cur)):
            raise FloatingPointError("group step produced non-finite values")
        if i % reproject_every == 0:
            coeffs = basis.coefficients(cur)
            leak = max(abs(c) for c in coeffs.values())
            leak_max = max(leak_max, leak)
            cur = cur - basis.combine(coeffs)
        if want is not None:
            hits = np.isclose(times[i], want, rtol=0, atol=0.25 * abs(step_dt))
            if hits.any():
                U = basis.secular_propagator(times[i])
                vec = np.array([nu0[lab] for lab in basis.labels])
                nu_t = U @ vec
                sec = basis.combine(dict(zip(basis.labels, nu_t)))
                samples.append((times[i] * direction, sec + cur))

    U = basis.secular_propagator(tt)
    vec = np.array([nu0[lab] for lab in basis.labels])
    nu_t = U @ vec
    secular = basis.combine(dict(zip(basis.labels, nu_t)))
    info = {"leak_max": leak_max, "n_steps": n_steps,
            "nu_final": dict(zip(basis.labels, nu_t))}
    if want is not None:
        info["samples"] = samples
    return secular + cur, info


def evolve_secular_exact(basis: SecularBasis, label: str, t: float) -> np.ndarray:
    """Closed-form group orbit of a single basis vector."""
    nu0 = {lab: 1.0 if lab == label else 0.0 for lab in basis.labels}
    U = basis.secular_propagator(t)
    vec = np.array([nu0[lab] for lab in basis.labels])
    return basis.combine(dict(zip(basis.labels, U @ vec)))
