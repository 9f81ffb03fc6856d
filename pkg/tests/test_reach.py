import math

import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from eftqc import (
    AlgorithmCostModel,
    ContourSeries,
    DistanceMode,
    ReachProblem,
    ScalabilityModel,
    SurfaceCodeModel,
    TrivialSuccessError,
    apply_burden_reduction,
    classify_regime,
    contour,
    lambert_w0,
    max_logical_qubits_closed_form,
    max_logical_qubits_lower_bound,
    max_logical_qubits_numeric,
    optimal_physical_qubits,
    physical_error_rate,
    regimes_grid,
    required_physical_qubits,
    satisfies_success_condition,
    success_lhs,
    success_rhs,
)


class TestLambertW:
    def test_zero(self):
        assert lambert_w0(0.0) == 0.0

    def test_at_e(self):
        assert lambert_w0(math.e) == pytest.approx(1.0, abs=1e-14)

    def test_at_one(self):
        # frozen from the fixed-point iteration w <- w + ln(x) - ln(w) run to
        # convergence (the omega constant)
        assert lambert_w0(1.0) == pytest.approx(0.5671432904097838, abs=1e-15)

    def test_residual_across_log_grid(self):
        for i in range(60):
            x = 10.0 ** (-6.0 + 21.0 * i / 59.0)
            w = lambert_w0(x)
            assert abs(w * math.exp(w) - x) <= 1e-12 * max(1.0, abs(x))

    def test_branch_point(self):
        assert lambert_w0(-math.exp(-1.0)) == pytest.approx(-1.0, abs=1e-6)

    def test_below_branch_rejected(self):
        with pytest.raises(ValueError):
            lambert_w0(-0.4)

    def test_negative_domain(self):
        for x in (-0.36, -0.3, -0.1, -0.01):
            w = lambert_w0(x)
            assert abs(w * math.exp(w) - x) <= 1e-12
            assert w >= -1.0


class TestSuccessCondition:
    def test_lhs_engineered_unit_logarithm(self):
        # A*alpha/p_C = e and beta = 0 make the logarithm exactly 1
        code = SurfaceCodeModel(A=1.0)
        cost = AlgorithmCostModel(alpha=math.e / 2.0, beta=0.0, p_C=0.5)
        assert success_lhs(cost, code, 2) == pytest.approx(4.0, rel=1e-12)

    def test_lhs_at_paper_defaults(self, default_code, default_cost):
        # frozen from a 40-digit evaluation of sqrt(720)*ln(4.12e9 * 90**0.515)
        assert success_lhs(default_cost, default_code, 90) == pytest.approx(
            656.2373208673232, rel=1e-12
        )

    def test_lhs_prefactor_shift(self, default_cost):
        code_a = SurfaceCodeModel(A=0.1)
        code_2a = SurfaceCodeModel(A=0.2)
        for q in (2, 90, 1000):
            delta = success_lhs(default_cost, code_2a, q) - success_lhs(default_cost, code_a, q)
            assert delta == pytest.approx(math.sqrt(8.0 * q) * math.log(2.0), rel=1e-9)

    def test_lhs_trivial_domain(self):
        code = SurfaceCodeModel(A=0.1)
        cost = AlgorithmCostModel(alpha=1.0, beta=0.0, p_C=0.5)  # burden 0.2
        with pytest.raises(TrivialSuccessError):
            success_lhs(cost, code, 5)

    def test_rhs_zero_at_max(self, default_code):
        model = ScalabilityModel.power_law(1e-4, 3.5)
        q_max = 1e7  # (p_th/p0)^s
        assert success_rhs(model, default_code, q_max) == pytest.approx(0.0, abs=1e-6)

    def test_rhs_at_one(self, default_code):
        model = ScalabilityModel.power_law(1e-4, 3.5)
        assert success_rhs(model, default_code, 1.0) == pytest.approx(
            math.log(100.0), rel=1e-12
        )

    def test_rhs_maximum_location_and_value(self, default_code):
        # the maximum is at Q_opt = (1/e^2)(p_th/p0)^s with value (2/(e*s))(p_th/p0)^(s/2)
        model = ScalabilityModel.power_law(1e-4, 3.5)
        q_opt = optimal_physical_qubits(model, default_code)
        best_q, best_value = None, -math.inf
        n = 20_000
        log_max = math.log(1e7)
        for i in range(n + 1):
            q = math.exp(log_max * i / n)
            value = success_rhs(model, default_code, q)
            if value > best_value:
                best_q, best_value = q, value
        assert best_q == pytest.approx(q_opt, rel=2e-3)
        predicted = (2.0 / (math.e * model.scale)) * 100.0 ** (model.scale / 2.0)
        assert best_value == pytest.approx(predicted, rel=1e-4)
        assert success_rhs(model, default_code, q_opt) == pytest.approx(predicted, rel=1e-12)

    def test_satisfies_at_reach_limit(self, default_problem):
        q_opt = optimal_physical_qubits(default_problem.scalability, default_problem.code)
        assert satisfies_success_condition(default_problem, 90, q_opt)
        assert not satisfies_success_condition(default_problem, 300, q_opt)

    def test_sentinel_eventually_satisfiable(self, default_code, default_cost):
        problem = ReachProblem(
            ScalabilityModel.power_law(1e-4, math.inf), default_code, default_cost
        )
        for q_logical in (1, 10, 100, 1000, 10_000):
            required = required_physical_qubits(problem, q_logical)
            assert required is not None
            assert satisfies_success_condition(problem, q_logical, required)


class TestReachSolvers:
    def test_closed_form_paper_defaults(self, default_problem):
        value = max_logical_qubits_closed_form(default_problem)
        assert 80 <= value <= 100
        assert value == pytest.approx(92.2576844770390, rel=1e-12)

    def test_numeric_paper_defaults(self, default_problem):
        assert max_logical_qubits_numeric(default_problem) == 92

    def test_lower_bound_paper_defaults(self, default_problem):
        bound = max_logical_qubits_lower_bound(default_problem)
        assert 0 < bound <= 90
        assert bound == pytest.approx(71.82523491933651, rel=1e-12)

    def test_burden_reduction_extends_reach(self, default_problem):
        assert max_logical_qubits_closed_form(apply_burden_reduction(default_problem, 1e5)) > 200
        around_130 = max_logical_qubits_closed_form(apply_burden_reduction(default_problem, 1e2))
        assert 115 <= around_130 <= 150

    @settings(
        deadline=None,
        derandomize=True,
        max_examples=20,
        suppress_health_check=[HealthCheck.filter_too_much],
    )
    @given(
        s=st.floats(3.0, 5.0),
        p0=st.floats(1e-5, 1e-4),
        alpha=st.floats(1e7, 1e10),
        beta=st.floats(0.4, 0.7),
        p_c=st.floats(0.05, 0.5),
    )
    def test_bound_chain_on_random_problems(self, s, p0, alpha, beta, p_c):
        problem = ReachProblem(
            ScalabilityModel.power_law(p0, s),
            SurfaceCodeModel(),
            AlgorithmCostModel(alpha=alpha, beta=beta, p_C=p_c),
        )
        closed = max_logical_qubits_closed_form(problem)
        assume(closed >= 20.0)  # integer granularity below this breaks the 5% comparison
        lower = max_logical_qubits_lower_bound(problem)
        numeric = max_logical_qubits_numeric(problem)
        assert lower <= closed <= numeric + 1
        assert closed == pytest.approx(numeric, rel=0.05)

    def test_lower_bound_tightens_with_burden(self, default_problem):
        ratios = []
        for extra in (1.0, 1e2, 1e4, 1e6):
            cost = AlgorithmCostModel(alpha=4.12e9 * extra)
            problem = ReachProblem(default_problem.scalability, default_problem.code, cost)
            ratios.append(
                max_logical_qubits_lower_bound(problem) / max_logical_qubits_closed_form(problem)
            )
        assert all(b > a for a, b in zip(ratios, ratios[1:]))
        assert all(0 < ratio < 1 for ratio in ratios)

    def test_more_scalable_reaches_further(self, default_code, default_cost):
        reach_35 = max_logical_qubits_numeric(
            ReachProblem(ScalabilityModel.power_law(1e-4, 3.5), default_code, default_cost)
        )
        reach_45 = max_logical_qubits_numeric(
            ReachProblem(ScalabilityModel.power_law(1e-4, 4.5), default_code, default_cost)
        )
        assert reach_45 > reach_35

    def test_beta_zero_numeric_tracks_q_opt(self, default_code):
        # with beta = 0 the condition is sqrt(8 q) ln(B) <= (2/s) sqrt(q_opt),
        # so the reach is q_opt (2/s)^2 / (8 ln(B)^2) up to integer granularity
        code = SurfaceCodeModel(A=1.0, p_th=0.01)
        cost = AlgorithmCostModel(alpha=1.0, beta=0.0, p_C=0.5)  # B = 2
        for s in (3.0, 3.5):
            model = ScalabilityModel.power_law(1e-4, s)
            problem = ReachProblem(model, code, cost)
            q_opt = optimal_physical_qubits(model, code)
            analytic = q_opt * (2.0 / s) ** 2 / (8.0 * math.log(2.0) ** 2)
            assert max_logical_qubits_numeric(problem) == int(analytic)

    def test_closed_form_rejects_logarithmic(self, default_code, default_cost):
        problem = ReachProblem(
            ScalabilityModel.logarithmic(0.001, 5.0), default_code, default_cost
        )
        with pytest.raises(ValueError):
            max_logical_qubits_closed_form(problem)
        # the numeric path still works
        assert max_logical_qubits_numeric(problem) >= 1

    def test_burden_invariance(self, default_problem):
        baseline = max_logical_qubits_closed_form(default_problem)
        baseline_numeric = max_logical_qubits_numeric(default_problem)
        for factor in (0.5, 2.0, 5.0):
            cost = AlgorithmCostModel(
                alpha=default_problem.cost.alpha * factor,
                beta=default_problem.cost.beta,
                p_C=default_problem.cost.p_C * factor,
            )
            problem = ReachProblem(default_problem.scalability, default_problem.code, cost)
            assert max_logical_qubits_closed_form(problem) == pytest.approx(baseline, rel=1e-9)
            assert abs(max_logical_qubits_numeric(problem) - baseline_numeric) <= 1

    def test_numeric_zero_when_infeasible(self, default_cost):
        # barely sub-threshold and barely scalable: not even one logical qubit
        problem = ReachProblem(
            ScalabilityModel.power_law(5e-3, 1.0), SurfaceCodeModel(), default_cost
        )
        assert max_logical_qubits_numeric(problem) == 0

    def test_solve_reach_packaging(self, default_problem):
        from eftqc import ReachMethod, solve_reach

        by_method = {
            method: solve_reach(default_problem, method) for method in ReachMethod
        }
        for result in by_method.values():
            assert result.q_phys_opt <= result.q_phys_max
        assert by_method[ReachMethod.LOWER_BOUND].q_logical_max == 71
        assert by_method[ReachMethod.CLOSED_FORM].q_logical_max == 92
        assert by_method[ReachMethod.NUMERIC_SEARCH].q_logical_max == 92


class TestRequiredAndContour:
    def test_monotone_over_feasible_range(self, default_problem):
        previous = 0.0
        for q_logical in range(1, 93):
            required = required_physical_qubits(default_problem, q_logical)
            assert required is not None
            assert required >= previous
            previous = required

    def test_infeasible_beyond_reach(self, default_problem):
        assert required_physical_qubits(default_problem, 93) is None
        assert required_physical_qubits(default_problem, 300) is None

    def test_trivial_success_needs_smallest_layout(self, default_code):
        # generous robustness: burden <= 1, so the d = 1 layout suffices
        cost = AlgorithmCostModel(alpha=1.0, beta=0.515, p_C=0.5)
        problem = ReachProblem(
            ScalabilityModel.power_law(1e-4, math.inf), default_code, cost
        )
        assert required_physical_qubits(problem, 1) == 8.0

    def test_contour_defaults(self, default_problem):
        series = contour(default_problem, (1, 300))
        assert isinstance(series, ContourSeries)
        assert len(series.points) == 300
        feasible = [point.q_logical for point in series.points if point.feasible]
        assert max(feasible) == 92
        # exactly one true -> false transition
        flags = [point.feasible for point in series.points]
        transitions = sum(1 for a, b in zip(flags, flags[1:]) if a != b)
        assert transitions == 1
        # infeasible points carry NaN
        assert all(math.isnan(p.q_phys_required) for p in series.points if not p.feasible)

    def test_contour_sentinel_all_feasible(self, default_code, default_cost):
        problem = ReachProblem(
            ScalabilityModel.power_law(1e-4, math.inf), default_code, default_cost
        )
        series = contour(problem, (1, 200), step=20)
        assert all(point.feasible for point in series.points)

    def test_contour_empty_when_robustness_tiny(self, default_code):
        # note: at the headline operating point (s=3.5, p0=1e-4) even
        # p_C = 1e-30 leaves small instances feasible; a modest scalability is
        # what makes the feasible set genuinely empty, confirmed here by the
        # direct condition check
        cost = AlgorithmCostModel(alpha=4.12e9, beta=0.515, p_C=1e-30)
        problem = ReachProblem(ScalabilityModel.power_law(1e-3, 2.0), default_code, cost)
        series = contour(problem, (1, 50))
        assert not any(point.feasible for point in series.points)
        q_opt = optimal_physical_qubits(problem.scalability, default_code)
        assert not satisfies_success_condition(problem, 1, q_opt)

    def test_discrete_mode_matches_direct_scan(self, default_problem):
        from eftqc import logical_error_rate, physical_qubits_for_code, tolerable_logical_error

        problem = ReachProblem(
            default_problem.scalability,
            default_problem.code,
            default_problem.cost,
            distance_mode=DistanceMode.DISCRETE_ODD,
        )
        for q_logical in (1, 10, 50):
            required = required_physical_qubits(problem, q_logical)
            assert required is not None
            # smallest odd distance satisfying the error budget, scanned directly
            expected = None
            for d in range(1, 200, 2):
                q_used = physical_qubits_for_code(d, q_logical)
                p = physical_error_rate(problem.scalability, q_used)
                if p < 1.0 and logical_error_rate(
                    problem.code, p, d
                ) <= tolerable_logical_error(problem.cost, q_logical):
                    expected = q_used
                    break
            assert required == expected

    def test_discrete_mode_satisfies_rounds_down(self, default_problem):
        problem = ReachProblem(
            default_problem.scalability,
            default_problem.code,
            default_problem.cost,
            distance_mode=DistanceMode.DISCRETE_ODD,
        )
        required = required_physical_qubits(problem, 10)
        assert satisfies_success_condition(problem, 10, required)
        # below the d = 1 layout cost nothing fits
        assert not satisfies_success_condition(problem, 10, 79.0)


class TestRegimesGrid:
    def test_shipped_default_contains_device_point(self):
        grid = regimes_grid()
        i = min(range(len(grid.s_values)), key=lambda k: abs(grid.s_values[k] - 1.75))
        j = min(range(len(grid.ratio_values)), key=lambda k: abs(grid.ratio_values[k] - 0.5))
        assert grid.s_values[i] == pytest.approx(1.75, abs=1e-9)
        assert grid.ratio_values[j] == pytest.approx(0.5, abs=1e-9)
        value = grid.q_max[i][j]
        assert value == pytest.approx(2.0**1.75, rel=1e-9)
        assert classify_regime(value) == "NISQ"

    def test_ratio_near_one_boundary(self):
        grid = regimes_grid((1.0, 5.0), (1.0 - 1e-9, 1.0 - 1e-9), (5, 1))
        for row in grid.q_max:
            assert row[0] == pytest.approx(1.0, abs=1e-6)

    def test_log_linear_in_s(self):
        grid = regimes_grid((1.0, 4.0), (0.1, 0.1), (4, 1))
        logs = [math.log(row[0]) for row in grid.q_max]
        diffs = [b - a for a, b in zip(logs, logs[1:])]
        for diff in diffs[1:]:
            assert diff == pytest.approx(diffs[0], rel=1e-9)

    def test_band_metadata(self):
        grid = regimes_grid()
        assert grid.contour_levels == (1e2, 1e4, 1e6, 1e8)

    @pytest.mark.parametrize(
        "value, label",
        [
            (10.0, "NISQ"),
            (5e3, "NISQ-EFTQC transition"),
            (1e5, "EFTQC"),
            (1e7, "EFTQC-FTQC transition"),
            (1e10, "FTQC"),
        ],
    )
    def test_classification(self, value, label):
        assert classify_regime(value) == label


class TestReachProblemValidation:
    def test_above_threshold_rejected(self, default_code, default_cost):
        from eftqc import AboveThresholdError

        with pytest.raises(AboveThresholdError):
            ReachProblem(ScalabilityModel.power_law(0.02, 3.0), default_code, default_cost)
