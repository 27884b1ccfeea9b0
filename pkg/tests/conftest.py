import functools

import numpy as np
import pytest

from nlsblowup.grid import Grid
from nlsblowup.ground_state import compute_ground_state
from nlsblowup.linops import build_secular_basis


@functools.lru_cache(maxsize=8)
def _cached_setup(dim: int, half_width: float, n: int, layout: str | None):
    grid = Grid(dim=dim, half_width=half_width, n=n, layout=layout)
    gs = compute_ground_state(grid)
    basis = build_secular_basis(gs)
    return grid, gs, basis


@pytest.fixture(scope="session")
def line_setup():
    """Workhorse line grid for unit tests."""
    return _cached_setup(1, 20.0, 512, None)


@pytest.fixture(scope="session")
def wide_line_setup():
    """Wide, fine line grid; boundary sawtooth of x-weighted profiles is
    below 1e-7 here, as the secular relation checks need."""
    return _cached_setup(1, 32.0, 768, None)


@pytest.fixture(scope="session")
def radial_setup():
    """Small radial-plane grid for unit tests."""
    return _cached_setup(2, 14.0, 256, None)


def random_band_limited(grid, rng, n_fields=1, band=None, width=16.0):
    """Smooth decaying complex fields built from low modes (deterministic)."""
    band = band if band is not None else grid.n // 12
    keep = np.abs(grid.m_int) < band
    out = []
    for _ in range(n_fields):
        z = rng.normal(size=grid.shape) + 1j * rng.normal(size=grid.shape)
        if grid.layout == "planar":
            z = grid.ifft(grid.fft(z) * np.outer(keep, keep))
        else:
            z = grid.ifft(grid.fft(z) * keep)
        out.append(z * np.exp(-grid.r2 / width))
    return out if n_fields > 1 else out[0]
