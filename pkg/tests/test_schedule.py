import math

import numpy as np
import pytest

from relayauction import (
    SystemParams,
    cost_function,
    min_total_power,
    optimal_schedule,
    value_of_z,
    z_of_value,
)
from relayauction.verify import oracle_schedule_cost

LN2 = math.log(2.0)

# Golden-section oracle values for z=2, lambda=1, D=8, p_max=10 (the cost is
# machine-flat within ~2e-7 of the minimizer, hence the loose duration check).
ORACLE_T_Z2 = 7.219916167800623
ORACLE_COST_Z2 = 23.9056503824653


@pytest.fixture
def params10():
    return SystemParams(d_bits_per_hz=8.0, lambda_w=1.0, p_max_w=10.0)


class TestSystemParams:
    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(d_bits_per_hz=0.0),
            dict(lambda_w=-1.0),
            dict(p_max_w=0.0),
            dict(sigma2_w=0.0),
            dict(a_r_m2=-1e-4),
            dict(alpha=0.0),
            dict(alpha=1.5),
        ],
    )
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(ValueError):
            SystemParams(**kwargs)

    def test_alpha_one_allowed(self):
        assert SystemParams(alpha=1.0).alpha == 1.0


class TestCostFunction:
    def test_rate_two_point(self, params10):
        # T = D makes the exponent 1, so the bracket is lambda + z.
        assert cost_function(8.0, 1.0, params10) == pytest.approx(16.0, rel=1e-14)

    def test_large_duration_dominated_by_delay_power(self, params10):
        g1 = cost_function(1e6, 1.0, params10)
        g2 = cost_function(2e6, 1.0, params10)
        assert g1 == pytest.approx(1e6, rel=1e-4)
        assert g2 > g1

    def test_at_log_optimal_duration(self, params10):
        got = cost_function(8.0 * LN2, 1.0, params10)
        assert got == pytest.approx(8.0 * math.e * LN2, rel=1e-14)

    def test_rejects_non_positive_inputs(self, params10):
        with pytest.raises(ValueError):
            cost_function(0.0, 1.0, params10)
        with pytest.raises(ValueError):
            cost_function(1.0, -1.0, params10)


class TestOptimalSchedule:
    def test_matched_delay_power(self, params10):
        # z == lambda puts the Lambert argument at 0, so T* = D ln2 exactly.
        sol = optimal_schedule(1.0, params10)
        assert sol.t_star_s == pytest.approx(8.0 * LN2, rel=1e-12)
        assert sol.p_star_w == pytest.approx(math.e - 1.0, rel=1e-12)
        assert sol.cost_ws == pytest.approx(8.0 * math.e * LN2, rel=1e-12)
        assert not sol.constraint_active

    def test_power_cap_branch(self, params10):
        sol = optimal_schedule(1e4, params10)
        assert sol.constraint_active
        assert sol.p_star_w == params10.p_max_w
        assert sol.t_star_s == pytest.approx(8.0 / math.log2(1.001), rel=1e-12)

    def test_against_golden_section_oracle(self, params10):
        sol = optimal_schedule(2.0, params10)
        assert sol.t_star_s == pytest.approx(ORACLE_T_Z2, rel=1e-5)
        assert sol.cost_ws == pytest.approx(ORACLE_COST_Z2, rel=1e-9)
        assert oracle_schedule_cost(2.0, params10) == pytest.approx(sol.cost_ws, rel=1e-9)

    def test_cost_recomputable_exactly(self, params10):
        for z in (1e-3, 0.5, 3.0, 50.0, 1e4):
            sol = optimal_schedule(z, params10)
            assert sol.cost_ws == sol.t_star_s * (params10.lambda_w + sol.p_star_w)

    def test_duration_respects_cap_floor(self, params10):
        for z in np.logspace(-3, 4, 40):
            sol = optimal_schedule(float(z), params10)
            t_floor = 8.0 / math.log2(1.0 + params10.p_max_w / z)
            assert sol.t_star_s >= t_floor * (1.0 - 1e-12)
            assert sol.p_star_w <= params10.p_max_w

    def test_active_flag_tracks_cap(self, params10):
        for z in np.logspace(-3, 4, 60):
            sol = optimal_schedule(float(z), params10)
            at_cap = abs(sol.p_star_w - params10.p_max_w) <= 1e-9 * params10.p_max_w
            assert sol.constraint_active == at_cap

    def test_first_order_condition_interior(self):
        # dg/dT = z*2^(D/T)*(1 - D ln2 / T) + lambda - z vanishes at interior optima.
        for lam in (0.1, 1.0, 10.0):
            params = SystemParams(lambda_w=lam, p_max_w=10.0)
            for z in np.logspace(-3, 2, 40):
                sol = optimal_schedule(float(z), params)
                if sol.constraint_active:
                    continue
                t = sol.t_star_s
                dg = z * 2.0 ** (8.0 / t) * (1.0 - 8.0 * LN2 / t) + lam - z
                assert abs(dg) <= 1e-6 * lam

    def test_rejects_non_positive_channel(self, params10):
        with pytest.raises(ValueError):
            optimal_schedule(0.0, params10)


class TestMonotonicity:
    def test_duration_strictly_increasing(self, params10):
        sols = [optimal_schedule(float(z), params10) for z in np.logspace(-3, 4, 120)]
        ts = [s.t_star_s for s in sols]
        assert all(a < b for a, b in zip(ts, ts[1:]))

    def test_power_non_decreasing(self, params10):
        sols = [optimal_schedule(float(z), params10) for z in np.logspace(-3, 4, 120)]
        ps = [s.p_star_w for s in sols]
        assert all(a <= b for a, b in zip(ps, ps[1:]))

    def test_value_strictly_increasing(self, params10):
        vs = [value_of_z(float(z), params10) for z in np.logspace(-3, 4, 120)]
        assert all(a < b for a, b in zip(vs, vs[1:]))


class TestValueInverse:
    def test_round_trip_at_one(self, params10):
        assert z_of_value(value_of_z(1.0, params10), params10) == pytest.approx(1.0, rel=1e-8)

    def test_round_trip_log_uniform(self, params10):
        rng = np.random.default_rng(23)
        for z in 10.0 ** rng.uniform(-3, 3, size=100):
            back = z_of_value(value_of_z(float(z), params10), params10)
            assert back == pytest.approx(z, rel=1e-6)

    def test_inverse_monotone(self, params10):
        us = [value_of_z(z, params10) for z in (0.5, 1.0, 5.0)]
        zs = [z_of_value(u, params10) for u in us]
        assert zs[0] < zs[1] < zs[2]

    def test_rejects_non_positive_value(self, params10):
        with pytest.raises(ValueError):
            z_of_value(0.0, params10)


class TestMinTotalPower:
    def test_rate_two_point(self, params10):
        assert min_total_power(8.0, 1.0, params10) == pytest.approx(1.0, rel=1e-14)

    def test_rate_four_point(self, params10):
        assert min_total_power(4.0, 1.0, params10) == pytest.approx(3.0, rel=1e-14)

    def test_matches_optimal_power_at_optimal_duration(self, params10):
        for z in (0.3, 1.0, 7.0):
            sol = optimal_schedule(z, params10)
            assert min_total_power(sol.t_star_s, z, params10) == pytest.approx(
                sol.p_star_w, rel=1e-9
            )

    def test_rejects_non_positive_duration(self, params10):
        with pytest.raises(ValueError):
            min_total_power(-1.0, 1.0, params10)
