import math

import numpy as np
import pytest

from lvsync import (
    DecayFitError,
    Domain,
    Field,
    ModelParams,
    PositivityError,
    StepSizeError,
    assemble_operator,
    build_grid,
    decay_rate,
    evolve,
    random_perturbation,
)
from lvsync.dynamics import Trajectory, state_distance, write_trajectory_csv
from lvsync.linstab import ansatz_coefficients, predicted_spectrum


def grid1d(n, length=math.pi):
    return build_grid(Domain("interval", (length,), (n,)))


def sub_trajectory(traj, t0, t1):
    mask = (traj.times >= t0) & (traj.times <= t1)
    idx = np.flatnonzero(mask)
    return Trajectory(
        times=traj.times[idx] - traj.times[idx[0]],
        states=tuple(traj.states[i] for i in idx),
        params=traj.params,
        dt=traj.dt,
    )


class TestEvolve:
    def test_zero_initial_data_stays_zero(self):
        g = grid1d(40)
        params = ModelParams(a=2.0, b=0.5, c=1.0)
        zero = Field.constant(g, 0.0)
        traj = evolve(zero, zero, params, dt=1e-2, t_end=0.5, store_every=10)
        for u, v in traj.states:
            assert u.max() == 0.0 and v.max() == 0.0

    def test_steady_state_is_fixed_point(self, grid200, steady200, params_default):
        traj = evolve(steady200.u, steady200.v, params_default, dt=1e-3, t_end=10.0,
                      store_every=2000)
        final = state_distance(*traj.states[-1], steady200)
        assert final <= 1e-8

    def test_one_step_drift_bound(self, steady200, params_default):
        traj = evolve(steady200.u, steady200.v, params_default, dt=1e-3, t_end=1e-3,
                      store_every=1)
        # scheme truncation is zero at a discrete steady state; the drift is
        # solver roundoff plus the Newton residual effect
        assert state_distance(*traj.states[-1], steady200) <= 1e-9

    def test_perturbation_decays_back(self, grid200, steady200, params_default):
        u0, v0 = random_perturbation(steady200, 1e-3, seed=0)
        traj = evolve(u0, v0, params_default, dt=1e-3, t_end=12.0, store_every=400)
        assert state_distance(*traj.states[-1], steady200) <= 1e-6

    def test_negative_initial_data_rejected(self):
        g = grid1d(20)
        params = ModelParams(a=2.0, b=0.5, c=1.0)
        bad = Field(g, -0.1 * np.ones(g.size))
        with pytest.raises(ValueError, match="nonnegative"):
            evolve(bad, Field.constant(g, 0.0), params, dt=1e-3, t_end=0.1)

    def test_step_size_rule_enforced(self, steady200, params_default):
        with pytest.raises(StepSizeError, match="too large"):
            evolve(steady200.u, steady200.v, params_default, dt=0.2, t_end=1.0)

    def test_positivity_preserved_random_data(self):
        g = grid1d(60)
        params = ModelParams(a=2.0, b=0.5, c=1.0)
        rng = np.random.default_rng(3)
        for _ in range(5):
            u0 = Field(g, rng.uniform(0.0, 2.0, size=g.size))
            v0 = Field(g, rng.uniform(0.0, 2.0, size=g.size))
            traj = evolve(u0, v0, params, dt=5e-3, t_end=2.0, store_every=40)
            for u, v in traj.states:
                assert u.min() >= 0.0 and v.min() >= 0.0

    def test_store_every_and_final_time(self):
        g = grid1d(20)
        params = ModelParams(a=2.0, b=0.5, c=1.0)
        z = Field.constant(g, 0.0)
        traj = evolve(z, z, params, dt=1e-2, t_end=0.105, store_every=5)
        assert traj.times[0] == 0.0
        assert traj.times[-1] >= 0.105 - 1e-2
        assert np.allclose(np.diff(traj.times)[:-1], 5e-2, rtol=1e-12)

    def test_2d_fixed_point(self):
        from lvsync import ModelParams, solve_logistic, synchronized_state

        g = build_grid(Domain("rectangle", (1.0, 1.0), (14, 14)))
        params = ModelParams(a=25.0, b=0.5, c=1.0)
        sol = solve_logistic(g, 25.0, tol=1e-10)
        st = synchronized_state(params, sol)
        traj = evolve(st.u, st.v, params, dt=2e-4, t_end=0.2, store_every=100)
        assert state_distance(*traj.states[-1], st) <= 1e-9

    def test_trajectory_csv(self, tmp_path, grid200, steady200, params_default):
        u0, v0 = random_perturbation(steady200, 1e-3, seed=1)
        traj = evolve(u0, v0, params_default, dt=1e-3, t_end=0.05, store_every=10)
        path = tmp_path / "traj.csv"
        write_trajectory_csv(traj, steady200, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "t,norm_u_dist,norm_v_dist,total_dist"
        assert len(lines) == 1 + len(traj.states)
        row = lines[1].split(",")
        assert math.hypot(float(row[1]), float(row[2])) == pytest.approx(float(row[3]), rel=1e-12)


@pytest.fixture(scope="module")
def mode_basis(grid200, theta200, params_default):
    predicted, spectra = predicted_spectrum(
        grid200, theta200.a, theta200.theta,
        params_default.b, params_default.c, 4, tol=1e-10,
    )
    return predicted, spectra


class TestDecayRate:
    def test_principal_eigvec_perturbation_rate(
        self, grid200, theta200, steady200, params_default, mode_basis
    ):
        predicted, spectra = mode_basis
        mu1, fam = predicted[0]
        pair = spectra[fam].pairs[0]
        A, B = ansatz_coefficients(params_default.b, params_default.c, fam)
        nrm = math.hypot(A, B)
        u0 = Field(grid200, steady200.u.values + 1e-3 * (A / nrm) * pair.phi.values)
        v0 = Field(grid200, steady200.v.values + 1e-3 * (B / nrm) * pair.phi.values)
        traj = evolve(u0, v0, params_default, dt=1e-3, t_end=15.0, store_every=100)
        fit = decay_rate(traj, steady200)
        assert abs(fit.rate + mu1) / mu1 <= 0.05
        assert fit.r_squared >= 0.999
        assert fit.monotone

    def test_higher_mode_crossover(
        self, grid200, theta200, steady200, params_default, mode_basis
    ):
        predicted, spectra = mode_basis
        mu1, fam1 = predicted[0]
        mu2, fam2 = predicted[1]
        assert fam1 != fam2
        p1 = spectra[fam1].pairs[0]
        p2 = spectra[fam2].pairs[0]
        A1, B1 = ansatz_coefficients(params_default.b, params_default.c, fam1)
        A2, B2 = ansatz_coefficients(params_default.b, params_default.c, fam2)
        n1, n2 = math.hypot(A1, B1), math.hypot(A2, B2)
        u0 = Field(grid200, steady200.u.values
                   + 1e-3 * (A2 / n2) * p2.phi.values + 3e-4 * (A1 / n1) * p1.phi.values)
        v0 = Field(grid200, steady200.v.values
                   + 1e-3 * (B2 / n2) * p2.phi.values + 3e-4 * (B1 / n1) * p1.phi.values)
        traj = evolve(u0, v0, params_default, dt=1e-3, t_end=20.0, store_every=100)
        early = decay_rate(sub_trajectory(traj, 0.4, 3.0), steady200)
        late = decay_rate(sub_trajectory(traj, 12.0, 20.0), steady200)
        assert -mu2 - 0.05 <= early.rate <= -mu1 - 0.02
        assert abs(late.rate + mu1) / mu1 <= 0.10

    def test_stationary_trajectory_flagged(self, grid200, steady200, params_default):
        traj = evolve(steady200.u, steady200.v, params_default, dt=1e-3, t_end=0.2,
                      store_every=10)
        # distances sit at the rounding floor: the norm-floor guard leaves
        # too few samples and the fit refuses
        with pytest.raises(DecayFitError, match="usable samples"):
            decay_rate(traj, steady200)

    def test_too_few_samples(self, grid200, steady200, params_default):
        u0, v0 = random_perturbation(steady200, 1e-3, seed=0)
        traj = evolve(u0, v0, params_default, dt=1e-3, t_end=4e-3, store_every=1)
        with pytest.raises(DecayFitError):
            decay_rate(traj, steady200)

    def test_non_monotone_reported_but_fitted(self, grid200, steady200, params_default):
        # hand-built trajectory with a wiggle: the fit proceeds and the
        # monotone flag goes false
        ts = np.linspace(0.0, 5.0, 30)
        states = []
        for i, t in enumerate(ts):
            bump = 1.0 + (0.3 if i == 12 else 0.0)
            amp = 1e-3 * math.exp(-0.5 * t) * bump
            states.append(
                (Field(grid200, steady200.u.values + amp),
                 Field(grid200, steady200.v.values + amp))
            )
        traj = Trajectory(times=ts, states=tuple(states),
                          params=params_default, dt=float(ts[1] - ts[0]))
        fit = decay_rate(traj, steady200)
        assert not fit.monotone
        assert fit.rate == pytest.approx(-0.5, rel=0.05)

    def test_dt_refinement_consistency(self, grid200, steady200, params_default):
        u0, v0 = random_perturbation(steady200, 1e-3, seed=0)
        rates = []
        for dt in (2e-3, 1e-3):
            traj = evolve(u0, v0, params_default, dt=dt, t_end=12.0,
                          store_every=max(1, int(0.1 / dt)))
            rates.append(decay_rate(traj, steady200).rate)
        assert abs(rates[0] - rates[1]) / abs(rates[1]) < 0.01
