"""Periodic spectral grids, complex fields, and the norms built on them.

A periodic box of half-width L stands in for the whole space: every profile
handled here decays exponentially, so tails below the truncation tolerance
justify the cutoff.  Three layouts are supported:

* ``line``    -- dimension 1 on [-L, L).
* ``radial``  -- dimension 2, radially symmetric fields stored on a 1D
  symmetric section through the origin; the quadrature carries the pi*|x|
  measure of the plane.
* ``planar``  -- dimension 2 on a full tensor grid (optional configuration,
  heavier and only needed for non-radial data).

All derivative operators are exact on the trigonometric interpolant.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Iterable

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import j0 as bessel_j0


class GridError(ValueError):
    """Invalid grid construction or mismatched grids."""


def _as_complex(values: np.ndarray) -> np.ndarray:
    arr = np.asarray(values)
    if not np.iscomplexobj(arr):
        arr = arr.astype(np.complex128)
    return arr


class Grid:
    """Spectral discretization of R^d (d in {1, 2}) on a periodic box.

    Parameters
    ----------
    dim : 1 or 2.
    half_width : box half-width L; the grid covers [-L, L) per axis.
    n : points per axis, even and >= 64.
    layout : "line", "radial" or "planar"; defaults to "line" for d=1 and
        "radial" for d=2.
    trunc_tol : tolerance the exponential tail exp(-L) must stay below.
    """

    def __init__(self, dim: int = 1, half_width: float = 20.0, n: int = 512,
                 layout: str | None = None, trunc_tol: float = 1e-6):
        if dim not in (1, 2):
            raise GridError(f"dim must be 1 or 2, got {dim}")
        if n % 2 != 0 or n < 64:
            raise GridError(f"n must be even and >= 64, got {n}")
        if np.exp(-half_width) >= trunc_tol:
            raise GridError(
                f"half_width {half_width} too small: exp(-L)={np.exp(-half_width):.2e}"
                f" >= trunc_tol {trunc_tol:.2e}")
        if layout is None:
            layout = "line" if dim == 1 else "radial"
        if dim == 1 and layout != "line":
            raise GridError("dim=1 requires layout 'line'")
        if dim == 2 and layout not in ("radial", "planar"):
            raise GridError("dim=2 requires layout 'radial' or 'planar'")

        self.dim = dim
        self.half_width = float(half_width)
        self.n = int(n)
        self.layout = layout
        self.trunc_tol = float(trunc_tol)

        L, N = self.half_width, self.n
        self.h = 2.0 * L / N
        self.x = -L + self.h * np.arange(N)
        # symmetric integer lattice scaled by pi/L
        self.m_int = np.fft.fftfreq(N, d=1.0 / N)          # integers
        self.xi = (np.pi / L) * self.m_int
        self._nyq = np.argmin(self.m_int)                  # index of m = -N/2

        if layout == "planar":
            self.shape = (N, N)
            xx, yy = np.meshgrid(self.x, self.x, indexing="ij")
            self.coords = (xx, yy)
            self.r2 = xx ** 2 + yy ** 2
            kx, ky = np.meshgrid(self.xi, self.xi, indexing="ij")
            self.xi2 = kx ** 2 + ky ** 2
            self.measure = np.full(self.shape, self.h ** 2)
        else:
            self.shape = (N,)
            self.coords = (self.x,)
            self.r2 = self.x ** 2
            self.xi2 = self.xi ** 2
            if layout == "line":
                self.measure = np.full(N, self.h)
            else:
                self.measure = np.pi * self._abs_weight()

        self.size = int(np.prod(self.shape))
        self._lap_matrix: np.ndarray | None = None
        self._prop_cache: dict[tuple, np.ndarray] = {}
        self._hankel: tuple | None = None

    # ------------------------------------------------------------------
    # construction helpers
    # ------------------------------------------------------------------
    def _abs_weight(self) -> np.ndarray:
        """Quadrature weights for the |x| measure, exact on the interpolant.

        W_m = int_{-L}^{L} |x| e^{i (pi m / L) x} dx has the closed form
        L^2 for m = 0, -4L^2/(pi m)^2 for odd m and 0 otherwise; the
        physical-space weights follow by one FFT.
        """
        L, N = self.half_width, self.n
        m = self.m_int
        W = np.zeros(N)
        W[0] = L ** 2
        odd = (np.abs(m) % 2 == 1)
        W[odd] = -4.0 * L ** 2 / (np.pi * m[odd]) ** 2
        w = np.fft.fft(W * (-1.0) ** np.abs(m)).real / N
        return w

    def same_as(self, other: "Grid") -> bool:
        return (self.dim == other.dim and self.layout == other.layout
                and self.n == other.n and self.half_width == other.half_width)

    def reflect(self, values: np.ndarray) -> np.ndarray:
        """Samples of f(-x); index map j -> (N - j) mod N per axis."""
        idx = (-np.arange(self.n)) % self.n
        if self.layout == "planar":
            return values[np.ix_(idx, idx)]
        return values[idx]

    def symmetrize_even(self, values: np.ndarray) -> np.ndarray:
        return 0.5 * (values + self.reflect(values))

    # ------------------------------------------------------------------
    # spectral calculus
    # ------------------------------------------------------------------
    def fft(self, values: np.ndarray) -> np.ndarray:
        return np.fft.fftn(values) if self.layout == "planar" else np.fft.fft(values, axis=0)

    def ifft(self, coeffs: np.ndarray) -> np.ndarray:
        return np.fft.ifftn(coeffs) if self.layout == "planar" else np.fft.ifft(coeffs, axis=0)

    def derivative(self, values: np.ndarray, order: int = 1, axis: int = 0) -> np.ndarray:
        """Spectral derivative along one axis (the only axis off planar)."""
        arr = _as_complex(values)
        if self.layout == "planar":
            shp = [1, 1]
            shp[axis] = self.n
            mult = (1j * self.xi.reshape(shp)) ** order
            return np.fft.ifftn(np.fft.fftn(arr) * mult)
        mult = (1j * self.xi) ** order
        if arr.ndim == 2:
            mult = mult[:, None]
        return np.fft.ifft(np.fft.fft(arr, axis=0) * mult, axis=0)

    def laplacian(self, values: np.ndarray) -> np.ndarray:
        """Laplacian of the interpolant; radial layout uses f'' + f'/r."""
        arr = _as_complex(values)
        if self.layout == "planar":
            return np.fft.ifftn(-self.xi2 * np.fft.fftn(arr))
        F = np.fft.fft(arr, axis=0)
        xi = self.xi if arr.ndim == 1 else self.xi[:, None]
        d2 = np.fft.ifft(-(xi ** 2) * F, axis=0)
        if self.layout == "line":
            return d2
        d1 = np.fft.ifft(1j * xi * F, axis=0)
        out = d2.copy()
        j0 = self.n // 2                     # x = 0 sits on the grid
        x = self.x if arr.ndim == 1 else self.x[:, None]
        mask = np.ones(self.n, bool)
        mask[j0] = False
        if arr.ndim == 1:
            out[mask] += d1[mask] / x[mask]
            out[j0] += d2[j0]                # lim f'/r = f''(0) for even f
        else:
            out[mask, :] += d1[mask, :] / x[mask]
            out[j0, :] += d2[j0, :]
        return out

    def gradient(self, values: np.ndarray) -> tuple[np.ndarray, ...]:
        if self.layout == "planar":
            return (self.derivative(values, axis=0), self.derivative(values, axis=1))
        return (self.derivative(values),)

    def radial_derivative(self, values: np.ndarray) -> np.ndarray:
        """d/dr on the stored section (equals d/dx on the line)."""
        return self.derivative(values)

    def x_dot_grad(self, values: np.ndarray) -> np.ndarray:
        """x . grad f; on the radial section this is r d/dr f."""
        if self.layout == "planar":
            gx, gy = self.gradient(values)
            return self.coords[0] * gx + self.coords[1] * gy
        x = self.x if np.asarray(values).ndim == 1 else self.x[:, None]
        return x * self.derivative(values)

    def dealias(self, values: np.ndarray) -> np.ndarray:
        """2/3-rule: zero Fourier modes with |m| > N/3."""
        keep = np.abs(self.m_int) <= self.n // 3
        F = self.fft(_as_complex(values))
        if self.layout == "planar":
            F *= np.outer(keep, keep)
        else:
            F *= keep if F.ndim == 1 else keep[:, None]
        return self.ifft(F)

    # ------------------------------------------------------------------
    # quadrature and norms
    # ------------------------------------------------------------------
    def integrate(self, values: np.ndarray) -> complex:
        return np.sum(self.measure * values)

    def pairing(self, f: np.ndarray, g: np.ndarray) -> float:
        """Real inner product Re int f conj(g), identifying C with R^2."""
        return float(np.real(np.sum(self.measure * f * np.conj(g))))

    def norm_l2(self, values: np.ndarray) -> float:
        return float(np.sqrt(np.sum(self.measure * np.abs(values) ** 2)))

    def norm_h1(self, values: np.ndarray) -> float:
        grads = self.gradient(values)
        g2 = sum(np.abs(g) ** 2 for g in grads)
        return float(np.sqrt(np.sum(self.measure * (np.abs(values) ** 2 + g2))))

    def norm_hs(self, values: np.ndarray, s: float) -> float:
        """Sobolev norm with multiplier (1 + |xi|^2)^(s/2).

        The radial layout computes it through a Bessel (Hankel) transform of
        the section, which realizes the planar Fourier transform of radial
        fields; Gauss-Legendre nodes in frequency keep the quadrature
        spectrally accurate.
        """
        if s < 0:
            raise GridError(f"Sobolev index must be >= 0, got {s}")
        arr = _as_complex(values)
        if self.layout == "radial":
            rho, glw, J = self._hankel_data()
            fhat = J @ (arr * self.measure)
            val = np.sum(glw * (1.0 + rho ** 2) ** s * np.abs(fhat) ** 2 * rho) / (2 * np.pi)
            return float(np.sqrt(max(val, 0.0)))
        F = self.fft(arr)
        scale = self.h ** self.dim / self.size
        return float(np.sqrt(scale * np.sum((1.0 + self.xi2) ** s * np.abs(F) ** 2)))

    def norm_moment(self, values: np.ndarray, delta: float) -> float:
        """Weighted moment || <x>^delta f ||_L2 with <x> = sqrt(1 + |x|^2)."""
        if delta < 0:
            raise GridError(f"moment exponent must be >= 0, got {delta}")
        wgt = (1.0 + self.r2) ** delta
        return float(np.sqrt(np.sum(self.measure * wgt * np.abs(values) ** 2)))

    def norm_xweighted(self, values: np.ndarray, power: float = 1.0) -> float:
        """|| |x|^power f ||_L2 (plain power weight, no +1)."""
        wgt = self.r2 ** power
        return float(np.sqrt(np.sum(self.measure * wgt * np.abs(values) ** 2)))

    def norm_sigma(self, values: np.ndarray, s: float = 1.0) -> float:
        return self.norm_hs(values, s) + self.norm_moment(values, s)

    def _hankel_data(self):
        if self._hankel is None:
            ximax = np.pi / self.h
            nodes, weights = leggauss(self.n)
            rho = 0.5 * ximax * (nodes + 1.0)
            glw = 0.5 * ximax * weights
            J = bessel_j0(np.outer(rho, np.abs(self.x)))
            self._hankel = (rho, glw, J)
        return self._hankel

    # ------------------------------------------------------------------
    # dense operators (1D layouts only)
    # ------------------------------------------------------------------
    def laplacian_matrix(self) -> np.ndarray:
        """Dense matrix of the Laplacian on the section (line/radial)."""
        if self.layout == "planar":
            raise GridError("dense Laplacian not available on planar grids")
        if self._lap_matrix is None:
            eye = np.eye(self.n, dtype=np.complex128)
            self._lap_matrix = np.ascontiguousarray(self.laplacian(eye))
        return self._lap_matrix

    def free_propagator(self, dt: float, shift: float = 0.0):
        """Return a callable applying exp(i dt (Lap - shift)) exactly.

        FFT layouts use the diagonal multiplier; the radial section uses a
        cached dense matrix exponential.
        """
        if self.layout != "radial":
            mult = np.exp(1j * dt * (-self.xi2 - shift))

            def apply_fft(u: np.ndarray) -> np.ndarray:
                F = self.fft(u)
                if F.ndim == 2 and self.layout != "planar":
                    return np.fft.ifft(mult[:, None] * F, axis=0)
                return self.ifft(mult * F)

            return apply_fft

        key = (round(float(dt), 14), round(float(shift), 14))
        if key not in self._prop_cache:
            from scipy.linalg import expm
            A = 1j * dt * (self.laplacian_matrix() - shift * np.eye(self.n))
            self._prop_cache[key] = expm(A)
        M = self._prop_cache[key]

        def apply_dense(u: np.ndarray) -> np.ndarray:
            # the section operator is only physical on even (radial) fields;
            # kill round-off odd content or it feeds spurious growth
            return self.symmetrize_even(M @ u)

        return apply_dense

    # ------------------------------------------------------------------
    # interpolation
    # ------------------------------------------------------------------
    def resample(self, values: np.ndarray, points: np.ndarray) -> np.ndarray:
        """Evaluate the trigonometric interpolant at arbitrary points (1D axes).

        Points outside [-L, L) wrap around periodically; fields must have
        tails below tolerance there for the result to be meaningful.
        """
        if self.layout == "planar":
            raise GridError("use resample_axes for planar grids")
        F = np.fft.fft(_as_complex(values), axis=0)
        E = np.exp(1j * np.outer(points + self.half_width, self.xi))
        E[:, self._nyq] = np.cos(self.xi[self._nyq] * (points + self.half_width))
        if F.ndim == 2:
            return (E @ F) / self.n
        return (E @ F) / self.n

    def resample_axes(self, values: np.ndarray, points: np.ndarray) -> np.ndarray:
        """Separable resampling of a planar field at points x points."""
        F = np.fft.fft(_as_complex(values), axis=0)
        E = np.exp(1j * np.outer(points + self.half_width, self.xi))
        E[:, self._nyq] = np.cos(self.xi[self._nyq] * (points + self.half_width))
        tmp = (E @ F) / self.n
        F2 = np.fft.fft(tmp, axis=1)
        return (F2 @ E.T) / self.n

    def __repr__(self) -> str:
        return (f"Grid(dim={self.dim}, layout={self.layout!r}, "
                f"L={self.half_width}, n={self.n})")


@dataclass
class Field:
    """Complex samples on a grid, with optional purity metadata."""

    grid: Grid
    values: np.ndarray
    is_real: bool = False
    is_imag: bool = False

    def __post_init__(self):
        self.values = _as_complex(self.values)
        if self.values.shape != self.grid.shape:
            raise GridError(
                f"field shape {self.values.shape} does not match grid {self.grid.shape}")

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy(), self.is_real, self.is_imag)

    def conj(self) -> "Field":
        return Field(self.grid, np.conj(self.values), self.is_real, self.is_imag)

    def __add__(self, other: "Field") -> "Field":
        self._check(other)
        return Field(self.grid, self.values + other.values)

    def __sub__(self, other: "Field") -> "Field":
        self._check(other)
        return Field(self.grid, self.values - other.values)

    def __mul__(self, scalar: complex) -> "Field":
        return Field(self.grid, self.values * scalar)

    __rmul__ = __mul__

    def _check(self, other: "Field") -> None:
        if not self.grid.same_as(other.grid):
            raise GridError("fields live on different grids")


@dataclass
class NormReport:
    """Norm snapshot of a field: L2, selected H^s, weighted moments, Sigma^s."""

    l2: float
    h_s: dict = dc_field(default_factory=dict)
    weighted_moment: dict = dc_field(default_factory=dict)
    sigma_s: dict = dc_field(default_factory=dict)


def laplacian(f: Field) -> Field:
    return Field(f.grid, f.grid.laplacian(f.values))


def pairing(f: Field, g: Field) -> float:
    if not f.grid.same_as(g.grid):
        raise GridError("pairing requires matching grids")
    return f.grid.pairing(f.values, g.values)


def norm(f: Field, kind: str = "L2", s: float = 1.0, delta: float = 1.0) -> float:
    """Norm dispatcher: kind in {"L2", "Hs", "moment", "Sigma"}."""
    g = f.grid
    if kind == "L2":
        return g.norm_l2(f.values)
    if kind == "Hs":
        return g.norm_hs(f.values, s)
    if kind == "moment":
        return g.norm_moment(f.values, delta)
    if kind == "Sigma":
        return g.norm_sigma(f.values, s)
    raise GridError(f"unknown norm kind {kind!r}")


def norm_report(f: Field, s_values: Iterable[float] = (1.0,),
                deltas: Iterable[float] = (1.0,)) -> NormReport:
    g = f.grid
    rep = NormReport(l2=g.norm_l2(f.values))
    for s in s_values:
        rep.h_s[s] = g.norm_hs(f.values, s)
    for d in deltas:
        rep.weighted_moment[d] = g.norm_moment(f.values, d)
    for s in s_values:
        rep.sigma_s[s] = rep.h_s[s] + g.norm_moment(f.values, s)
    return rep
