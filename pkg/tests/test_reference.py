import numpy as np
import pytest

from spurs import ReconConfig, Trajectory, ValidationError, reconstruct_once, plan_offline
from spurs.kernels import bspline_eval
from spurs.reference import (
    angle_diagnostics,
    bspline_power_form,
    dense_reconstruct,
)


class TestPowerFormKernel:
    @pytest.mark.parametrize("degree", range(6))
    def test_matches_recurrence(self, degree):
        t = np.linspace(-4, 4, 163)
        assert np.max(np.abs(bspline_power_form(degree, t) - bspline_eval(degree, t))) < 1e-12


class TestDenseReconstruct:
    def test_agrees_with_pipeline_1d(self):
        rng = np.random.default_rng(0)
        traj = Trajectory(rng.uniform(-8, 8, (24, 1)))
        config = ReconConfig(n=16, degree=3, sigma=1.0, rho=1e-6)
        plan = plan_offline(traj, config)
        b = rng.standard_normal(24) + 1j * rng.standard_normal(24)
        d, _ = reconstruct_once(plan, b)
        d_ref = dense_reconstruct(traj, config, b)
        assert np.max(np.abs(d.values - d_ref)) <= 1e-8 * np.max(np.abs(d.values))

    def test_agrees_with_pipeline_oversampled(self):
        rng = np.random.default_rng(1)
        traj = Trajectory(rng.uniform(-6, 6, (30, 1)))
        config = ReconConfig(n=12, degree=2, sigma=2.0, rho=1e-5)
        plan = plan_offline(traj, config)
        b = rng.standard_normal(30) + 1j * rng.standard_normal(30)
        d, _ = reconstruct_once(plan, b)
        d_ref = dense_reconstruct(traj, config, b)
        assert np.max(np.abs(d.values - d_ref)) <= 1e-8 * np.max(np.abs(d.values))

    def test_large_regularizer_kills_output(self):
        rng = np.random.default_rng(2)
        traj = Trajectory(rng.uniform(-4, 4, (20, 1)))
        b = rng.standard_normal(20) + 0j
        small = dense_reconstruct(traj, ReconConfig(n=8, sigma=1.0, rho=1e-8), b)
        large = dense_reconstruct(traj, ReconConfig(n=8, sigma=1.0, rho=1e8), b)
        assert np.linalg.norm(large) <= 1e-6 * np.linalg.norm(small)

    def test_error_shrinks_with_degree(self):
        # a smooth in-space signal sampled densely away from the grid
        # edge: raising the kernel degree brings the kernel space closer
        # to the signal space and the reconstruction error drops
        from spurs.grid import inverse_dft

        rng = np.random.default_rng(7)
        n = 32
        band = np.arange(-n // 2, n // 2)
        gamma = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        gamma[np.abs(band) > n // 8] = 0.0
        d_true = inverse_dft(gamma)
        kappa = rng.uniform(-0.4 * n, 0.4 * n, (120, 1))
        b = np.array(
            [(gamma * np.exp(2j * np.pi * band * k[0] / n)).sum() / n for k in kappa]
        )
        traj = Trajectory(kappa)
        errors = [
            np.linalg.norm(
                dense_reconstruct(traj, ReconConfig(n=n, degree=p, sigma=1.0, rho=1e-10), b)
                - d_true
            )
            for p in (1, 3, 5)
        ]
        assert errors[2] < errors[1] < errors[0]

    def test_size_guard(self):
        traj = Trajectory(np.zeros((2100, 1)))
        with pytest.raises(ValidationError):
            dense_reconstruct(traj, ReconConfig(n=16, sigma=1.0), np.zeros(2100, complex))


class TestAngleDiagnostics:
    def test_identical_subspaces(self):
        rng = np.random.default_rng(4)
        traj = Trajectory(rng.uniform(-8, 8, (40, 1)))
        config = ReconConfig(n=8, degree=3, sigma=1.0)
        coeffs = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        diag = angle_diagnostics(traj, config, coeffs, q_equals_a=True)
        assert diag.sin_aq == pytest.approx(0.0, abs=1e-10)
        assert diag.actual <= (1e-10 * diag.signal_norm) ** 2

    def test_bound_dominates_actual(self):
        rng = np.random.default_rng(5)
        hits = 0
        for trial in range(50):
            m = int(rng.integers(24, 60))
            traj = Trajectory(rng.uniform(-4, 4, (m, 1)))
            config = ReconConfig(n=8, degree=int(rng.integers(1, 4)), sigma=1.0)
            coeffs = rng.standard_normal(8) + 1j * rng.standard_normal(8)
            diag = angle_diagnostics(traj, config, coeffs)
            assert diag.bound >= diag.actual * (1 - 1e-9)
            assert 0.0 <= diag.cos_qs <= 1.0
            assert 0.0 <= diag.sin_as <= 1.0
            assert 0.0 <= diag.sin_aq <= 1.0
            hits += 1
        assert hits == 50

    def test_angles_bounded(self):
        rng = np.random.default_rng(6)
        traj = Trajectory(rng.uniform(-8, 8, (64, 1)))
        config = ReconConfig(n=16, degree=1, sigma=1.0)
        coeffs = rng.standard_normal(16) + 1j * rng.standard_normal(16)
        diag = angle_diagnostics(traj, config, coeffs)
        assert diag.bound >= 0
        assert diag.actual >= 0
