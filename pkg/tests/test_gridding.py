import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import i0

from spurs import (
    KaiserBesselSpec,
    Trajectory,
    ValidationError,
    density_weights,
    grid_reconstruct,
    kb_eval,
    phantom_image,
    phantom_kspace,
    radial,
    shepp_logan,
    snr,
    spiral,
)
from spurs.gridding import kb_image_transform


class TestKbEval:
    def test_center_normalized(self):
        assert kb_eval(KaiserBesselSpec(), 0.0) == pytest.approx(1.0)

    def test_boundary_value(self):
        spec = KaiserBesselSpec(width=8.0, beta=10.0)
        assert kb_eval(spec, 4.0) == pytest.approx(1.0 / i0(10.0), rel=1e-12)

    def test_outside_support_zero(self):
        spec = KaiserBesselSpec()
        assert kb_eval(spec, 6.01) == 0.0
        assert kb_eval(spec, -7.0) == 0.0

    def test_default_beta_formula(self):
        spec = KaiserBesselSpec(width=12.0, sigma=2.0)
        expected = np.pi * np.sqrt((12.0 / 2.0) ** 2 * (2.0 - 0.5) ** 2 - 0.8)
        assert spec.beta == pytest.approx(expected, rel=1e-15)

    def test_transform_matches_quadrature(self):
        spec = KaiserBesselSpec(width=6.0, beta=8.0)
        for xi in (0.0, 0.05, 0.2, 0.6):
            numeric = quad(
                lambda t: kb_eval(spec, t) * np.cos(2 * np.pi * xi * t), -3.0, 3.0,
                limit=200,
            )[0]
            assert kb_image_transform(spec, xi) == pytest.approx(numeric, rel=1e-8, abs=1e-10)

    def test_invalid_spec(self):
        with pytest.raises(ValidationError):
            KaiserBesselSpec(width=1.0)
        with pytest.raises(ValidationError):
            KaiserBesselSpec(beta=-1.0)


class TestDensityWeights:
    def test_uniform(self):
        traj = spiral(64, 500)
        assert np.all(density_weights(traj, "uniform") == 1.0)

    def test_radial_ramp_ratio(self):
        traj = radial(64, 8, 64)
        w = density_weights(traj, "radial")
        radii = np.linalg.norm(traj.points, axis=1)
        far = np.isclose(radii, 16.0)
        near = np.isclose(radii, 8.0)
        assert w[far].mean() / w[near].mean() == pytest.approx(2.0, rel=1e-12)

    def test_mean_one(self):
        w = density_weights(radial(32, 6, 32), "radial")
        assert w.mean() == pytest.approx(1.0, rel=1e-12)

    def test_center_weight_positive(self):
        traj = radial(32, 6, 32)
        w = density_weights(traj, "radial")
        assert np.all(w > 0)

    def test_unknown_kind(self):
        with pytest.raises(ValidationError):
            density_weights(spiral(32, 100), "voronoi")


class TestGridReconstruct:
    def test_zero_samples_zero_image(self):
        traj = spiral(32, 300)
        img = grid_reconstruct(traj, np.zeros(300, complex), 32)
        assert np.all(img.pixels == 0)

    def test_flat_field_from_center_sample(self):
        traj = Trajectory(np.zeros((1, 2)), label="point")
        img = grid_reconstruct(traj, np.ones(1, complex), 32, density="uniform")
        mag = np.abs(img.pixels)
        assert (mag.max() - mag.min()) / mag.mean() <= 0.01

    def test_linearity(self):
        traj = spiral(16, 120)
        rng = np.random.default_rng(0)
        b1 = rng.standard_normal(120) + 1j * rng.standard_normal(120)
        b2 = rng.standard_normal(120) + 1j * rng.standard_normal(120)
        combo = grid_reconstruct(traj, 2.0 * b1 - 1j * b2, 16).pixels
        separate = 2.0 * grid_reconstruct(traj, b1, 16).pixels - 1j * grid_reconstruct(
            traj, b2, 16
        ).pixels
        assert np.max(np.abs(combo - separate)) <= 1e-10 * np.max(np.abs(separate))

    def test_phantom_quality_reasonable(self):
        # calibrated baseline recovers a well-sampled phantom decently
        ph = shepp_logan()
        truth = phantom_image(ph, 64)
        traj = radial(64, 100, 128)
        clean = phantom_kspace(ph, traj)
        img = grid_reconstruct(traj, clean.b, 64)
        assert snr(truth.pixels, img.pixels) > 7.0

    def test_spiral_uses_uniform_kind_by_default(self):
        traj = spiral(16, 200)
        b = np.ones(200, complex)
        auto = grid_reconstruct(traj, b, 16, density="auto").pixels
        uniform = grid_reconstruct(traj, b, 16, density="uniform").pixels
        assert np.array_equal(auto, uniform)
