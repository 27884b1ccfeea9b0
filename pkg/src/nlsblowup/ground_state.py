"""Ground state of Delta Q + Q^(1+4/d) = Q and its companion profile.

The solver is a renormalized (Petviashvili-type) fixed-point iteration with
the standard stabilizing exponent p/(p-1) for the power nonlinearity
p = 1 + 4/d.  The companion profile solves L_plus Qtilde = -|x|^2 Q on the
even/radial sector, where L_plus is invertible (its kernel is spanned by the
odd translations of Q).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np
import scipy.linalg as sla

from .grid import Field, Grid


class ConvergenceError(RuntimeError):
    """Iteration failed to reach tolerance (grid too small or bad seed)."""


@dataclass
class GroundState:
    grid: Grid
    Q: np.ndarray
    mass: float
    gn_constant: float
    residual_Q: float
    iterations: int
    Qtilde: np.ndarray | None = None
    residual_Qtilde: float | None = None
    alpha0: float | None = None
    beta0: float | None = None
    gamma0: float | None = None
    diagnostics: dict = dc_field(default_factory=dict)

    @property
    def power(self) -> float:
        """Nonlinearity exponent p = 1 + 4/d (5 on the line, 3 in the plane)."""
        return 1.0 + 4.0 / self.grid.dim

    def Q_field(self) -> Field:
        return Field(self.grid, self.Q, is_real=True)


def _ode_residual(grid: Grid, Q: np.ndarray, p: float) -> float:
    res = grid.laplacian(Q) - Q + np.abs(Q) ** (p - 1) * Q
    return grid.norm_l2(res)


def _inverse_helmholtz(grid: Grid):
    """Solver for (1 - Lap) u = rhs; diagonal in Fourier off the radial section."""
    if grid.layout == "radial":
        A = np.eye(grid.n) - grid.laplacian_matrix().real
        lu = sla.lu_factor(A)

        def solve(rhs: np.ndarray) -> np.ndarray:
            return sla.lu_solve(lu, rhs)

        return solve

    def solve_fft(rhs: np.ndarray) -> np.ndarray:
        return np.real(grid.ifft(grid.fft(rhs) / (1.0 + grid.xi2)))

    return solve_fft


def solve_Q(grid: Grid, seed: np.ndarray | None = None, tol: float = 1e-10,
            max_iter: int = 500) -> GroundState:
    """Compute Q by renormalized fixed-point iteration from a Gaussian seed.

    Stops when the L2 residual of Delta Q - Q + Q^p drops below ``tol``.
    Raises ConvergenceError if max_iter is exhausted.
    """
    p = 1.0 + 4.0 / grid.dim
    gamma = p / (p - 1.0)
    if seed is None:
        seed = 2.0 * np.exp(-grid.r2)
    u = np.asarray(seed, dtype=float).copy()
    solve_lin = _inverse_helmholtz(grid)

    residual = np.inf
    for it in range(1, max_iter + 1):
        residual = _ode_residual(grid, u, p)
        if residual < tol:
            break
        grads = grid.gradient(u)
        num = np.sum(grid.measure * (sum(np.abs(g) ** 2 for g in grads) + u ** 2)).real
        den = np.sum(grid.measure * u ** (p + 1)).real
        if den <= 0:
            raise ConvergenceError("iteration lost positivity of the nonlinear term")
        u = (num / den) ** gamma * np.real(solve_lin(u ** p))
        u = np.real(grid.symmetrize_even(u))
    else:
        raise ConvergenceError(
            f"ground-state iteration stalled at residual {residual:.3e} after {max_iter} steps")

    mass = grid.norm_l2(u) ** 2
    grads = grid.gradient(u)
    grad2 = np.sum(grid.measure * sum(np.abs(g) ** 2 for g in grads)).real
    lp = np.sum(grid.measure * np.abs(u) ** (p + 1)).real
    gn_constant = lp / (grad2 * mass ** (2.0 / grid.dim))
    return GroundState(grid=grid, Q=u, mass=mass, gn_constant=gn_constant,
                       residual_Q=residual, iterations=it)


def solve_Qtilde(gs: GroundState, tol: float = 1e-7) -> GroundState:
    """Solve L_plus Qtilde = -|x|^2 Q on the even sector and attach it.

    The dense operator is shifted on the odd sector, where L_plus has its
    kernel; parity decoupling then returns the even solution untouched.
    """
    grid = gs.grid
    if grid.layout == "planar":
        return _solve_Qtilde_planar(gs, tol)
    p = gs.power
    Q = gs.Q
    A = (-grid.laplacian_matrix().real + np.eye(grid.n)
         - np.diag((4.0 / grid.dim + 1.0) * Q ** (p - 1)))
    # shift anything odd out of the way; rhs is even so the solve stays even
    idx = (-np.arange(grid.n)) % grid.n
    P_even = 0.5 * (np.eye(grid.n) + np.eye(grid.n)[idx])
    rhs = -grid.r2 * Q
    sol = sla.solve(A + 2.0 * (np.eye(grid.n) - P_even), rhs)
    sol = np.real(grid.symmetrize_even(sol))

    residual = grid.norm_l2(_apply_lplus(grid, Q, p, sol) + grid.r2 * Q)
    if residual > tol:
        raise ConvergenceError(
            f"companion-profile solve residual {residual:.3e} exceeds {tol:.1e}")
    gs.Qtilde = sol
    gs.residual_Qtilde = residual
    return gs


def _solve_Qtilde_planar(gs: GroundState, tol: float) -> GroundState:
    from scipy.sparse.linalg import LinearOperator, minres

    grid = gs.grid
    p = gs.power
    Q = gs.Q
    n = grid.size

    def matvec(v):
        u = grid.symmetrize_even(v.reshape(grid.shape))
        out = _apply_lplus(grid, Q, p, u).real
        return grid.symmetrize_even(out).ravel()

    rhs = (-grid.r2 * Q).ravel()
    op = LinearOperator((n, n), matvec=matvec, dtype=float)
    sol, info = minres(op, rhs, rtol=1e-12, maxiter=3000)
    sol = np.real(grid.symmetrize_even(sol.reshape(grid.shape)))
    residual = grid.norm_l2(_apply_lplus(grid, Q, p, sol) + grid.r2 * Q)
    if info != 0 or residual > tol:
        raise ConvergenceError(f"planar companion solve failed (info={info}, res={residual:.3e})")
    gs.Qtilde = sol
    gs.residual_Qtilde = residual
    return gs


def _apply_lplus(grid: Grid, Q: np.ndarray, p: float, v: np.ndarray) -> np.ndarray:
    return -grid.laplacian(v) + v - (4.0 / grid.dim + 1.0) * Q ** (p - 1) * v


def normalization_constants(gs: GroundState) -> GroundState:
    """Fix alpha0, beta0, gamma0 from the biorthogonality conditions.

    alpha0 = -int Q Qtilde, beta0 = int Q^2 / 2, and gamma0 makes the
    companion profile orthogonal to the conformal direction.
    """
    if gs.Qtilde is None:
        raise ValueError("solve Qtilde before computing normalization constants")
    grid = gs.grid
    int_QQt = np.sum(grid.measure * gs.Q * gs.Qtilde).real
    int_x2QQt = np.sum(grid.measure * grid.r2 * gs.Q * gs.Qtilde).real
    alpha0 = -int_QQt
    beta0 = 0.5 * gs.mass
    gamma0 = -int_x2QQt / (2.0 * int_QQt)
    if alpha0 <= 0 or beta0 <= 0:
        raise ConvergenceError(
            f"normalization sign violation: alpha0={alpha0:.3e}, beta0={beta0:.3e}")
    gs.alpha0, gs.beta0, gs.gamma0 = alpha0, beta0, gamma0
    gs.diagnostics["int_QQtilde"] = int_QQt
    gs.diagnostics["int_x2Q2"] = float(np.sum(grid.measure * grid.r2 * gs.Q ** 2).real)
    gs.diagnostics["int_x2QQtilde"] = int_x2QQt
    return gs


def compute_ground_state(grid: Grid, tol_nonlinear: float = 1e-10,
                         tol_linear: float = 1e-7) -> GroundState:
    """Full pipeline: Q, Qtilde and the normalization constants."""
    gs = solve_Q(grid, tol=tol_nonlinear)
    gs = solve_Qtilde(gs, tol=tol_linear)
    return normalization_constants(gs)


def closed_form_Q_1d(x: np.ndarray) -> np.ndarray:
    """Line ground state 3^(1/4) sech^(1/2)(2x) of Q'' - Q + Q^5 = 0."""
    e = np.exp(-2.0 * np.abs(x))
    sech = 2.0 * e / (1.0 + e ** 2)
    return 3.0 ** 0.25 * np.sqrt(sech)
