import math

import numpy as np
import pytest

from conftest import F_PHI_DISK_EDGE, LENS
from kdense.bodies import Disk, DomainError, Ellipse, Polygon, boundary_sample
from kdense.density import (
    StepMeasure,
    default_r_grid,
    delta,
    delta_monte_carlo,
    density_profile,
    excess_volume,
    f_phi,
    inner_reach,
    inradius,
    is_kdense,
    layer_cake,
    max_k_distance,
)


@pytest.mark.parametrize("r", [0.1, 0.25, 0.5, 1.0])
def test_delta_matches_lens_formula(disk, r):
    assert abs(delta(disk, disk, (1, 0), r, 4096) - LENS[r]) < 1e-6


def test_delta_extremes(disk, square):
    assert delta(disk, disk, (0.1, 0.0), 0.5) == pytest.approx(1.0, abs=1e-12)
    assert delta(disk, disk, (5.0, 0.0), 0.5) == 0.0
    assert delta(square, square, (0.0, 0.0), 3.0) == pytest.approx(4.0 / 36.0)


def test_delta_rejects_nonpositive_r(disk):
    with pytest.raises(DomainError):
        delta(disk, disk, (1, 0), 0.0)
    with pytest.raises(DomainError):
        delta(disk, disk, (1, 0), -1.0)


def test_square_corner_and_edge(square):
    assert delta(square, square, (1, 1), 0.5) == pytest.approx(0.25, abs=1e-14)
    assert delta(square, square, (1, 0), 0.5) == pytest.approx(0.5, abs=1e-14)


def test_monte_carlo_agrees_with_clipping(disk):
    mc = delta_monte_carlo(disk, disk, (1, 0), 0.5, samples=100_000, seed=1)
    sigma = math.sqrt(LENS[0.5] * (1 - LENS[0.5]) / 100_000)
    assert abs(mc - LENS[0.5]) < 4 * sigma
    assert mc == delta_monte_carlo(disk, disk, (1, 0), 0.5, samples=100_000, seed=1)


def test_profile_of_disk_pair_is_flat(disk):
    prof = density_profile(disk, disk, 0.5, n=64, n_poly=4096)
    assert prof.relative_variation < 1e-6
    assert prof.mean == pytest.approx(LENS[0.5], abs=1e-6)
    assert all(0 <= d <= 1 for d in prof.deltas)


def test_profile_of_square_pair(square):
    prof = density_profile(square, square, 0.5, n=16)
    assert prof.min == pytest.approx(0.25)
    assert prof.max == pytest.approx(0.5)
    assert prof.relative_variation > 0.5
    row = next(iter(prof.rows()))
    assert len(row) == 8 and row[6] == 0.5


def test_profile_of_ellipse_pair(ellipse):
    assert density_profile(ellipse, ellipse, 0.5, n=64).relative_variation < 5e-4


def test_profile_needs_enough_samples(disk):
    with pytest.raises(DomainError):
        density_profile(disk, disk, 0.5, n=4)


def test_kdense_verdicts(disk, square):
    v = is_kdense(disk, disk, [0.25, 0.5, 1.0], n=64, tol=1e-3)
    assert v.is_dense and v.max_variation < 1e-3
    v = is_kdense(square, square, [0.25, 0.5, 1.0], n=64, tol=1e-3)
    assert not v.is_dense and v.max_variation > 0.2
    assert v.is_dense == (v.max_variation <= v.tol)


def test_kdense_homothetic_ellipses():
    v = is_kdense(Ellipse(2, 1), Ellipse(4, 2), n=64, tol=1e-3)
    assert v.is_dense


def test_kdense_verdict_stable_under_refinement(disk, square):
    for G in (disk, square):
        a = is_kdense(G, G, [0.25, 0.5, 1.0], n=32)
        b = is_kdense(G, G, [0.25, 0.5, 1.0], n=64)
        assert a.is_dense == b.is_dense


def test_empty_r_grid_rejected(disk):
    with pytest.raises(DomainError):
        is_kdense(disk, disk, [])


def test_default_r_grid_uses_inradius(ellipse, square):
    assert inradius(ellipse, Ellipse(4, 2)) == pytest.approx(0.5, abs=1e-6)
    assert inradius(square, square) == pytest.approx(1.0, abs=1e-9)
    np.testing.assert_allclose(default_r_grid(square, square), [0.25, 0.5, 1.0], atol=1e-9)


def test_inner_reach(disk, square):
    assert inner_reach(disk, disk, (0.2, 0.1)) == pytest.approx(1 - math.hypot(0.2, 0.1), abs=1e-9)
    assert inner_reach(square, square, (1.0, 0.0)) == pytest.approx(0.0, abs=1e-12)


def test_max_k_distance_examples(disk, square, ellipse):
    assert max_k_distance(disk, disk, (1, 0)) == pytest.approx(2.0, abs=1e-9)
    assert max_k_distance(square, square, (1, 1)) == pytest.approx(2.0)
    assert max_k_distance(square, square, (1, 0)) == pytest.approx(2.0)
    vals = [max_k_distance(ellipse, Ellipse(4, 2), p.x) for p in boundary_sample(ellipse, 16)]
    assert max(vals) - min(vals) < 1e-6


def test_delta_monotone_in_r(disk):
    rs = [0.1, 0.2, 0.4, 0.8, 1.2, 1.6]
    vals = [delta(disk, disk, (0.3, 0.0), r) for r in rs]
    assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))


def test_delta_scaling(ellipse, triangle):
    x = np.array([2.0, 0.0])
    base = delta(ellipse, triangle, x, 0.4)
    lam = 2.5
    assert delta(ellipse.scale(lam), triangle.scale(lam), lam * x, 0.4) == pytest.approx(base, abs=1e-9)
    assert delta(ellipse.scale(lam), triangle, lam * x, lam * 0.4) == pytest.approx(base, abs=1e-9)


def test_delta_affine_covariance(ellipse, triangle):
    a = np.array([[1.3, 0.4], [-0.2, 0.8]])
    x = np.array([0.0, 1.0])
    base = delta(ellipse, triangle, x, 0.6, 4096)
    moved = delta(ellipse.linear(a), triangle.linear(a), a @ x, 0.6, 4096)
    assert moved == pytest.approx(base, abs=1e-6)


# --- f^phi and the layer-cake form -------------------------------------------------

def test_f_phi_examples(disk, ellipse):
    assert f_phi(disk, disk, (0, 0), lambda t: t) == pytest.approx(2 * math.pi / 3, abs=1e-9)
    assert f_phi(ellipse, ellipse, (0.3, 0.1), np.ones_like) == pytest.approx(ellipse.area, rel=1e-9)
    assert f_phi(disk, disk, (1, 0), lambda t: t) == pytest.approx(F_PHI_DISK_EDGE, abs=1e-9)


def test_f_phi_constant_on_disk_boundary(disk):
    vals = [f_phi(disk, disk, p.x, lambda t: t) for p in boundary_sample(disk, 5)]
    assert max(vals) - min(vals) < 1e-9


def test_f_phi_rejects_non_monotone(disk):
    with pytest.raises(DomainError):
        f_phi(disk, disk, (1, 0), lambda t: np.sin(5 * t))
    with pytest.raises(DomainError):
        f_phi(disk, disk, (1, 0), lambda t: t - 1)


@pytest.mark.parametrize("r", [0.25, 0.5, 1.0])
def test_dirac_consistency(disk, r):
    lhs = f_phi(disk, disk, (1, 0), StepMeasure.dirac(r))
    rhs = excess_volume(disk, disk, (1, 0), r, 4096)
    assert lhs == pytest.approx(rhs, rel=1e-6)
    assert rhs == pytest.approx(math.pi - math.pi * r * r * LENS[r], rel=1e-6)


@pytest.mark.parametrize("case", [
    ("disk", (1.0, 0.0)),
    ("disk", (0.2, 0.1)),
    ("square", (1.0, 0.3)),
    ("ellipse", (2.0, 0.0)),
])
def test_layer_cake_matches_f_phi(case, disk, square, ellipse):
    name, x = case
    G = {"disk": disk, "square": square, "ellipse": ellipse}[name]
    K = Ellipse(4, 2) if name == "ellipse" else G
    mu = StepMeasure(atoms=[(0.3, 1.0), (1.2, 0.5)], pieces=[(0.1, 0.9, 2.0), (1.0, 3.0, 0.25)])
    direct = f_phi(G, K, x, mu)
    cake = layer_cake(G, K, x, mu, n=4096, n_quad=48)
    assert direct == pytest.approx(cake, rel=1e-6)


def test_step_measure_validation():
    with pytest.raises(DomainError):
        StepMeasure(atoms=[(-1.0, 1.0)])
    with pytest.raises(DomainError):
        StepMeasure(pieces=[(2.0, 1.0, 1.0)])
    mu = StepMeasure(atoms=[(1.0, 2.0)], pieces=[(0.0, 2.0, 0.5)])
    np.testing.assert_allclose(mu.phi(np.array([0.5, 1.0, 1.5, 3.0])), [0.25, 0.5, 2.75, 3.0])
