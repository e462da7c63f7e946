import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fhdlab.core import Field, SolitonParams, Trajectory, d1_periodic, make_grid
from fhdlab.lax import (
    LaxPair,
    build_M,
    build_N,
    reduction_check,
    zc_residual,
)
from fhdlab.profiles import translated_trajectory

P05 = SolitonParams(0.5, 1.0)


def smooth_field(n=256, length=20.0, amplitude=0.3):
    grid = make_grid(-0.5 * length, 0.5 * length, n, periodic=True)
    k = 2.0 * np.pi / length
    v = 1.0 + amplitude * np.sin(k * grid.x) + 0.1 * np.cos(3 * k * grid.x)
    return Field(grid, v)


class TestBuildM:
    def test_unit_substitution(self):
        assert np.array_equal(build_M(1.0, 1.0), [[0.0, 1.0], [-1.0, 1.0]])

    def test_quarter_entry(self):
        assert build_M(2.0, 1.0)[1, 0] == -0.25

    def test_entry_vanishes_for_large_v(self):
        assert abs(build_M(1e8, 1.0)[1, 0]) < 1e-15

    def test_rejects_nonpositive_v(self):
        with pytest.raises(ValueError):
            build_M(0.0, 1.0)

    @settings(max_examples=40, deadline=None)
    @given(
        v=st.floats(0.05, 50.0),
        lam=st.floats(0.01, 10.0),
    )
    def test_determinant_identity(self, v, lam):
        m = build_M(v, lam)
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        assert det == lam / v**2


class TestBuildN:
    def test_constant_background_entries(self):
        lam, v0 = 0.7, 1.3
        n = build_N(v0, 0.0, 0.0, lam)
        assert n[0, 0] == pytest.approx(2.0 * lam * v0, rel=1e-15)
        assert n[0, 1] == pytest.approx(-4.0 * lam * v0, rel=1e-15)
        assert n[1, 0] == pytest.approx(4.0 * lam**2 / v0, rel=1e-15)
        assert n[1, 1] == -n[0, 0]

    @settings(max_examples=40, deadline=None)
    @given(
        v=st.floats(0.05, 50.0),
        v_x=st.floats(-5.0, 5.0),
        v_xx=st.floats(-5.0, 5.0),
        lam=st.floats(0.01, 10.0),
    )
    def test_trace_free(self, v, v_x, v_xx, lam):
        n = build_N(v, v_x, v_xx, lam)
        assert n[0, 0] + n[1, 1] == 0.0

    def test_a_consistent_with_b_derivative(self):
        # A = -(B_x + B)/2 holds identically once B_x is the discrete
        # derivative of B = -4 lam v
        field = smooth_field()
        lam = 1.0
        v = field.values
        v_x = d1_periodic(v, field.grid.dx)
        n = build_N(v, v_x, d1_periodic(v_x, field.grid.dx), lam)
        b = n[0, 1]
        b_x = d1_periodic(b, field.grid.dx)
        assert np.max(np.abs(n[0, 0] + 0.5 * (b_x + b))) < 1e-12

    def test_lax_pair_wrapper(self):
        pair = LaxPair(lambda_spec=2.0)
        assert np.array_equal(pair.M(1.0), build_M(1.0, 2.0))
        assert np.array_equal(pair.N(1.0, 0.1, 0.2), build_N(1.0, 0.1, 0.2, 2.0))


@pytest.fixture(scope="module")
def exact_trajectory():
    grid = make_grid(-40.0, 40.0, 512, periodic=True)
    times = 0.05 * np.arange(17)
    return translated_trajectory(P05, grid, times)


class TestZcResidual:
    @pytest.mark.parametrize("lam", [0.5, 1.0, 2.0])
    def test_off_shell_entries_at_roundoff(self, exact_trajectory, lam):
        report = zc_residual(exact_trajectory, lam)
        for i, j in ((0, 0), (0, 1), (1, 1)):
            assert report.entry_norms[i, j] < 1e-10
            assert report.entry_norms_coarse[i, j] < 1e-10

    @pytest.mark.parametrize("lam", [0.5, 1.0, 2.0])
    def test_evolution_entry_converges(self, exact_trajectory, lam):
        report = zc_residual(exact_trajectory, lam)
        assert report.convergence_order >= 2.0
        assert report.passed

    def test_static_bump_is_not_a_solution(self):
        grid = make_grid(-20.0, 20.0, 512, periodic=True)
        v = 1.0 + 0.3 * np.exp(-(grid.x**2))
        frame = Field(grid, v)
        frozen = Trajectory(
            0.1 * np.arange(9), tuple(frame for _ in range(9))
        )
        report = zc_residual(frozen, 1.0)
        assert report.entry_norms[1, 0] > 0.1
        assert not report.convergence_order >= 1.0
        assert not report.passed

    def test_requires_three_frames(self):
        grid = make_grid(-20.0, 20.0, 64, periodic=True)
        f = Field(grid, np.ones(64))
        traj = Trajectory(np.array([0.0, 1.0]), (f, f))
        with pytest.raises(ValueError):
            zc_residual(traj, 1.0)

    def test_report_serializes(self, exact_trajectory):
        report = zc_residual(exact_trajectory, 1.0)
        payload = report.to_dict()
        assert payload["pass"] is True
        assert len(payload["entry_norms"]) == 4
        assert payload["dx"] == pytest.approx(80.0 / 512)
        assert payload["dt"] == pytest.approx(0.05)


class TestReductionCheck:
    def test_cancellation_on_smooth_field(self):
        report = reduction_check(smooth_field(), 1.0)
        assert report.passed
        assert report.max_discrepancy < 1e-10

    @pytest.mark.parametrize("lam", [0.5, 1.0, 2.0])
    def test_independent_of_spectral_parameter(self, lam):
        report = reduction_check(smooth_field(), lam)
        assert report.max_discrepancy < 1e-10

    def test_perturbed_ansatz_fails(self):
        report = reduction_check(smooth_field(), 1.0, b_offset=1.0)
        assert not report.passed
        assert report.max_discrepancy > 1e-2

    def test_rejects_nonpositive_field(self):
        grid = make_grid(-5.0, 5.0, 64, periodic=True)
        with pytest.raises(ValueError):
            reduction_check(Field(grid, np.linspace(-1.0, 1.0, 64)), 1.0)

    @settings(max_examples=25, deadline=None)
    @given(
        amplitude=st.floats(0.01, 0.6),
        lam=st.floats(0.1, 5.0),
    )
    def test_holds_for_random_smooth_fields(self, amplitude, lam):
        report = reduction_check(smooth_field(amplitude=amplitude), lam)
        assert report.max_discrepancy < 1e-10
