import numpy as np
import pytest

from spinchannel import (
    ChannelConfig,
    Covariance,
    CoupledModeNetwork,
    DriftDiffusion,
    Edge,
    InstabilityError,
    Interaction,
    ReservoirConfig,
    build_network,
    default_spectrum_grid,
    evolve_covariance,
    joint_row,
    lyapunov_residual,
    noise_spectrum,
    quadrature_row,
    steady_state_covariance,
    symplectic_eigenvalues,
    trajectory_ensemble,
)
from oracles import random_hurwitz_network


def damped_mode(gamma=1.0, delta=0.0):
    return drift_of(CoupledModeNetwork(("m",), (), (gamma,), delta))


def drift_of(net):
    from spinchannel import drift_diffusion
    return drift_diffusion(net)


def tms_pair(g, gamma=1.0, delta=0.0):
    net = CoupledModeNetwork(("a", "b"), (Edge(0, 1, Interaction.TMS, g, 0.0),),
                             (gamma, gamma), delta)
    return drift_of(net)


def analytic_tms_steady_state(g, gamma):
    """Eigenmode solution of the resonant two-mode squeezing steady state:
    the (x1 -+ x2)/sqrt(2) and (p1 +- p2)/sqrt(2) modes decay at
    gamma/2 +- g, giving variances gamma / (gamma +- 2 g)."""
    v_sq = gamma / (gamma + 2 * g)
    v_anti = gamma / (gamma - 2 * g)
    var = 0.5 * (v_anti + v_sq)
    cov = 0.5 * (v_anti - v_sq)
    m = np.diag([var, var, var, var])
    m[0, 2] = m[2, 0] = cov
    m[1, 3] = m[3, 1] = -cov
    return m


class TestSteadyState:
    def test_damped_vacuum(self):
        sigma = steady_state_covariance(damped_mode(2.0, 0.7))
        assert np.allclose(sigma.matrix, np.eye(2), atol=1e-12)

    @pytest.mark.parametrize("g", [0.1, 0.3, 0.45])
    def test_tms_matches_analytic(self, g):
        sigma = steady_state_covariance(tms_pair(g))
        assert np.allclose(sigma.matrix, analytic_tms_steady_state(g, 1.0), atol=1e-10)

    def test_residual_bound_holds(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            dd = random_hurwitz_network(rng)
            sigma = steady_state_covariance(dd)
            bound = 1e-10 * max(1.0, np.max(np.abs(dd.D)))
            assert lyapunov_residual(dd, sigma) <= bound

    def test_residual_bound_at_stiff_detuning(self):
        res = ReservoirConfig(two_photon_detuning=2 * np.pi * 352e3)
        chans = [ChannelConfig(id=0, polarization="reversed"), ChannelConfig(id=1),
                 ChannelConfig(id=2)]
        dd = drift_of(build_network(chans, res))
        sigma = steady_state_covariance(dd)
        assert lyapunov_residual(dd, sigma) <= 1e-10 * max(1.0, np.max(np.abs(dd.D)))

    def test_output_physical(self):
        rng = np.random.default_rng(1)
        for _ in range(10):
            sigma = steady_state_covariance(random_hurwitz_network(rng))
            assert symplectic_eigenvalues(sigma)[-1] >= 1.0 - 1e-9

    def test_instability_error_names_eigenvalue(self):
        dd = tms_pair(0.51)
        with pytest.raises(InstabilityError) as err:
            steady_state_covariance(dd)
        assert "eigenvalue" in str(err.value)
        assert err.value.eigenvalue.real > 0


class TestEvolve:
    def test_zero_time_exact(self):
        sigma0 = Covariance.two_mode_squeezed(0.4)
        out = evolve_covariance(sigma0, tms_pair(0.2), 0.0)
        assert np.array_equal(out.matrix, sigma0.matrix)

    def test_negative_time_rejected(self):
        with pytest.raises(ValueError, match=">= 0"):
            evolve_covariance(Covariance.vacuum(1), damped_mode(), -1.0)

    def test_converges_to_steady_state(self):
        dd = tms_pair(0.3, gamma=1.0, delta=0.2)
        target = steady_state_covariance(dd)
        slowest = np.max(np.linalg.eigvals(dd.A).real)
        out = evolve_covariance(Covariance.vacuum(2), dd, 20.0 / abs(slowest))
        assert np.max(np.abs(out.matrix - target.matrix)) < 1e-6

    def test_composition(self):
        dd = tms_pair(0.25, delta=0.3)
        sigma0 = Covariance.thermal([0.5, 0.1])
        one = evolve_covariance(sigma0, dd, 0.7)
        two = evolve_covariance(one, dd, 1.1)
        direct = evolve_covariance(sigma0, dd, 1.8)
        assert np.max(np.abs(two.matrix - direct.matrix)) < 1e-9

    def test_pure_rotation_preserves_symplectic_spectrum(self):
        a = np.array([[0.0, 0.8], [-0.8, 0.0]])
        dd = DriftDiffusion(A=a, D=np.zeros((2, 2)))
        sigma0 = Covariance(np.diag([np.exp(1.0), np.exp(-1.0)]) * 1.5)
        out = evolve_covariance(sigma0, dd, 2.3)
        assert np.allclose(symplectic_eigenvalues(out), symplectic_eigenvalues(sigma0),
                           atol=1e-9)


class TestNoiseSpectrum:
    def test_single_channel_flat_at_shot_noise(self):
        dd = drift_of(build_network([ChannelConfig(id=0)], ReservoirConfig()))
        grid = default_spectrum_grid(dd, 1024)
        rows = [quadrature_row(dd.n_modes, 0, "x"), quadrature_row(dd.n_modes, 0, "p")]
        spec = noise_spectrum(dd, rows, grid, names=["x0", "p0"])
        assert np.max(np.abs(spec.db_rel_shot)) < 0.01

    def test_tms_pair_dips_below_shot_noise_near_detuning(self):
        gamma, g, delta = 1.0, 0.1, 5.0
        dd = tms_pair(g, gamma, delta)
        grid = np.linspace(delta - 10 * gamma, delta + 10 * gamma, 801)
        spec = noise_spectrum(dd, [joint_row(2, 0, 1, -1, "x")], grid)
        k = np.argmin(spec.psd[:, 0])
        assert spec.psd[k, 0] < 1.0
        assert abs(grid[k] - delta) < 2.0 * gamma

    def test_diagonal_non_negative_and_even(self):
        rng = np.random.default_rng(5)
        for _ in range(5):
            dd = random_hurwitz_network(rng)
            n = dd.A.shape[0]
            rows = np.eye(n)
            omegas = np.linspace(0.1, 5.0, 7)
            fwd = noise_spectrum(dd, rows, omegas)
            bwd = noise_spectrum(dd, rows, -omegas[::-1])
            assert np.min(fwd.psd) >= 0.0
            assert np.allclose(fwd.psd, bwd.psd[::-1], rtol=1e-10, atol=1e-12)

    def test_cross_spectrum_transposes_under_frequency_flip(self):
        rng = np.random.default_rng(6)
        dd = random_hurwitz_network(rng)
        n = dd.A.shape[0]

        def full_matrix(w):
            m = np.linalg.inv(dd.A + 1j * w * np.eye(n))
            return m @ dd.D @ m.conj().T

        for w in (0.3, 1.7):
            assert np.allclose(full_matrix(-w), full_matrix(w).T, atol=1e-12)

    def test_wiener_khinchin_consistency(self):
        # a span of only 50 half-widths leaves a ~1.3% Lorentzian tail, so
        # the 1% tolerance needs the wider grid
        rng = np.random.default_rng(7)
        for _ in range(3):
            dd = random_hurwitz_network(rng)
            sigma = steady_state_covariance(dd)
            eig = np.linalg.eigvals(dd.A)
            span = np.max(np.abs(eig.imag)) + 150.0 * np.max(np.abs(eig.real))
            grid = np.linspace(-span, span, 8193)
            rows = np.eye(dd.A.shape[0])
            spec = noise_spectrum(dd, rows, grid, detected=False)
            integral = np.trapezoid(spec.psd, grid, axis=0) / (2 * np.pi)
            assert np.allclose(integral, np.diag(sigma.matrix), rtol=0.01)

    def test_requires_hurwitz(self):
        with pytest.raises(InstabilityError):
            noise_spectrum(tms_pair(0.51), [quadrature_row(2, 0)], np.linspace(-1, 1, 5))

    def test_rejects_bad_grid(self):
        dd = damped_mode()
        with pytest.raises(ValueError, match="increasing"):
            noise_spectrum(dd, [quadrature_row(1, 0)], np.array([0.0, 0.0, 1.0]))
        with pytest.raises(ValueError, match="finite"):
            noise_spectrum(dd, [quadrature_row(1, 0)], np.array([0.0, np.nan]))

    def test_rejects_bad_rows(self):
        with pytest.raises(ValueError, match="width"):
            noise_spectrum(damped_mode(), [np.ones(4)], np.linspace(-1, 1, 5))


class TestTrajectoryEnsemble:
    def test_deterministic_and_chunk_independent(self):
        dd = tms_pair(0.2)
        kw = dict(dt=0.02, horizon=30.0, n_traj=120, seed=9)
        a = trajectory_ensemble(dd, **kw)
        b = trajectory_ensemble(dd, **kw)
        c = trajectory_ensemble(dd, chunk=17, **kw)
        assert np.array_equal(a.covariance, b.covariance)
        assert np.array_equal(a.covariance, c.covariance)
        assert np.array_equal(a.standard_errors, b.standard_errors)

    def test_seed_changes_estimate(self):
        dd = tms_pair(0.2)
        a = trajectory_ensemble(dd, 0.02, 30.0, 120, seed=1)
        b = trajectory_ensemble(dd, 0.02, 30.0, 120, seed=2)
        assert not np.array_equal(a.covariance, b.covariance)

    def test_rejects_unstable_step(self):
        dd = tms_pair(0.2, delta=3.0)
        with pytest.raises(ValueError, match="use dt <="):
            trajectory_ensemble(dd, dt=1.0, horizon=10.0, n_traj=100, seed=0)

    def test_rejects_small_ensemble(self):
        with pytest.raises(ValueError, match="100"):
            trajectory_ensemble(damped_mode(), 0.01, 10.0, 50, seed=0)

    def test_noiseless_mean_decays(self):
        a = np.array([[-0.5, 0.8], [-0.8, -0.5]])
        dd = DriftDiffusion(A=a, D=np.zeros((2, 2)))
        x0 = np.array([2.0, -1.0])
        horizon = 20.0 / 0.5
        est = trajectory_ensemble(dd, dt=0.01, horizon=horizon, n_traj=100, seed=0, x0=x0)
        assert np.linalg.norm(est.final_mean) < 1e-6 * np.linalg.norm(x0)

    def test_matches_lyapunov_within_errors(self):
        dd = tms_pair(0.15, gamma=1.0, delta=0.2)
        sigma = steady_state_covariance(dd).matrix
        rho = np.max(np.abs(np.linalg.eigvals(dd.A)))
        min_re = np.min(np.abs(np.linalg.eigvals(dd.A).real))
        est = trajectory_ensemble(dd, dt=0.01 * min_re / rho ** 2,
                                  horizon=24.0 / min_re, n_traj=400, seed=3)
        err = np.abs(est.covariance - sigma)
        assert np.all(err <= 3.0 * est.standard_errors + 1e-12)

    def test_three_channel_network_within_five_percent(self):
        res = ReservoirConfig()
        chans = [ChannelConfig(id=0, polarization="reversed"), ChannelConfig(id=1),
                 ChannelConfig(id=2)]
        dd = drift_of(build_network(chans, res))
        sigma = steady_state_covariance(dd).matrix
        rho = np.max(np.abs(np.linalg.eigvals(dd.A)))
        min_re = np.min(np.abs(np.linalg.eigvals(dd.A).real))
        est = trajectory_ensemble(dd, dt=0.01 * min_re / rho ** 2,
                                  horizon=24.0 / min_re, n_traj=300, seed=5)
        assert np.allclose(est.covariance, sigma, rtol=0.05, atol=0.05)


class TestKernelPathsAgree:
    """The jit kernels and their pure-numpy fallbacks compute the same thing."""

    def test_stepper(self):
        from spinchannel.dynamics import _philox_noise, _psd_sqrt
        from spinchannel.kernels import (_em_second_moments_numba,
                                         _em_second_moments_numpy)
        dd = tms_pair(0.2, delta=0.3)
        noise = _philox_noise(0, 0, 32, 400, 4)
        x0 = np.zeros(4)
        args = (dd.A, _psd_sqrt(dd.D), noise, 0.02, 200, x0)
        mom_a, fin_a = _em_second_moments_numba(*args)
        mom_b, fin_b = _em_second_moments_numpy(*args)
        assert np.allclose(mom_a, mom_b, rtol=1e-12, atol=1e-14)
        assert np.allclose(fin_a, fin_b, rtol=1e-12, atol=1e-14)

    def test_spectra(self):
        from spinchannel.dynamics import _psd_sqrt
        from spinchannel.kernels import (_detected_psd_numba, _detected_psd_numpy,
                                         _mode_psd_numba, _mode_psd_numpy)
        dd = tms_pair(0.2, delta=0.3)
        rows = np.vstack([quadrature_row(2, 0, "x"), joint_row(2, 0, 1, -1, "p")])
        omegas = np.linspace(-4.0, 4.0, 33)
        b = _psd_sqrt(dd.D)
        assert np.allclose(_detected_psd_numba(dd.A, b, rows, omegas),
                           _detected_psd_numpy(dd.A, b, rows, omegas), rtol=1e-10)
        assert np.allclose(_mode_psd_numba(dd.A, dd.D, rows, omegas),
                           _mode_psd_numpy(dd.A, dd.D, rows, omegas), rtol=1e-10)
