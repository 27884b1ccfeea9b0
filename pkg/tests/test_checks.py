import numpy as np
import pytest

from nlsblowup.checks import (build_corpus, validate_hypotheses,
                              verify_interpolation, _inequalities)
from nlsblowup.grid import Grid
from nlsblowup.sources import make_profile

CONSTANT_FREE = {"inter1", "inter2", "inter3", "inter4"}


@pytest.fixture(scope="module")
def small_grid():
    return Grid(dim=1, half_width=16.0, n=256)


def test_zero_field_convention(small_grid):
    ratios = _inequalities(small_grid, np.zeros(small_grid.n, complex))
    assert all(v == 0.0 for v in ratios.values())


def test_constant_free_ratios(small_grid, line_setup):
    _, gs, _ = line_setup
    Q = small_grid.resample(gs.grid.resample(gs.Q.astype(complex), small_grid.x),
                            small_grid.x) if False else None
    corpus = build_corpus(small_grid, 60, seed=0)
    reports = {r.ineq_id: r for r in verify_interpolation(small_grid, corpus)}
    for key in CONSTANT_FREE:
        assert reports[key].max_ratio <= 1.0 + 1e-8, key
        assert reports[key].constant_free


def test_fitted_constants_stable(small_grid):
    corpus_small = build_corpus(small_grid, 50, seed=0)
    corpus_big = build_corpus(small_grid, 100, seed=0)
    small = {r.ineq_id: r.max_ratio for r in verify_interpolation(small_grid, corpus_small)}
    big = {r.ineq_id: r.max_ratio for r in verify_interpolation(small_grid, corpus_big)}
    for key in set(small) - CONSTANT_FREE:
        assert big[key] >= small[key] - 1e-12          # corpus max only grows
        assert big[key] <= 1.2 * small[key] + 1e-12, key


def test_dilate_trend_inter3(small_grid, line_setup):
    # mass-preserving dilations trade gradient against moment content
    _, gs, _ = line_setup
    ratios = []
    for lam in (0.5, 1.0, 2.0):
        vals = small_grid.resample(
            np.interp(small_grid.x, gs.grid.x, gs.Q).astype(complex),
            lam * small_grid.x) * np.sqrt(lam)
        r = _inequalities(small_grid, vals)["inter3"]
        ratios.append(r)
        assert r <= 1.0 + 1e-8
    assert ratios[0] != pytest.approx(ratios[-1], rel=1e-3)


def test_hypothesis_validators():
    flat = make_profile("flat", d=1)
    assert validate_hypotheses(flat, "thblup").passed
    assert validate_hypotheses(flat, "stronger").passed

    hyp = make_profile("surface:hyperbolic", d=2)
    v = validate_hypotheses(hyp, "thblup")
    assert not v.passed
    assert "g - 1" in v.failing_clause

    odd = make_profile("odd_strong", d=1)
    assert validate_hypotheses(odd, "stronger").passed

    cubic = make_profile("cubic_bump", d=1, a=0.3)
    assert validate_hypotheses(cubic, "thblup").passed
    assert not validate_hypotheses(cubic, "stronger").passed

    with pytest.raises(ValueError):
        validate_hypotheses(flat, "bogus")


def test_verdict_resolution_independent():
    spec = make_profile("quartic_bump", d=1, a=0.25)
    v1 = validate_hypotheses(spec, "thblup", slope_slack=0.25)
    v2 = validate_hypotheses(spec, "thblup", slope_slack=0.10)
    assert v1.passed == v2.passed
