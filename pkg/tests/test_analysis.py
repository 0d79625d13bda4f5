import json
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from apfree.analysis import (
    IterLogSpec,
    MonotoneFn,
    element_size_bounds,
    inverse_ordering_check,
    invert_monotone,
    iterlog_product,
    probe_theorem11,
    probe_theorem13,
    reciprocal_partial_sum,
    reciprocal_sum_bounds_for_set,
    tower_threshold,
)
from apfree.bounds import theorem_lower_bound
from apfree.errors import InvalidParameterError, NumericDomainError

SQUARE = MonotoneFn(fn=lambda x: x * x, domain_min=0.0, name="x^2")
IDENTITY = MonotoneFn(fn=lambda x: x, domain_min=0.0, name="x")
HALF = MonotoneFn(fn=lambda x: x / 2.0, domain_min=0.0, name="x/2")
XLOGX = MonotoneFn(fn=lambda x: x * math.log(x), domain_min=1.0, name="x ln x")

THEOREM_K3 = MonotoneFn(
    fn=lambda x: theorem_lower_bound(x, 3).value(), domain_min=1.0, name="block bound k=3"
)


class TestInvertMonotone:
    def test_square(self):
        assert invert_monotone(SQUARE, 16.0, 1e-9) == pytest.approx(4.0, abs=1e-9)

    def test_theorem_bound_power_identity(self):
        assert invert_monotone(THEOREM_K3, 4.0, 1e-9) == pytest.approx(9.0, abs=1e-6)

    def test_x_log_x_fixed_point(self):
        assert invert_monotone(XLOGX, math.e, 1e-10) == pytest.approx(math.e, abs=1e-9)

    def test_target_at_domain_min(self):
        assert invert_monotone(XLOGX, 0.0, 1e-9) == 1.0

    def test_below_range_rejected(self):
        with pytest.raises(NumericDomainError, match="below"):
            invert_monotone(XLOGX, -1.0, 1e-9)

    def test_bad_tolerance(self):
        with pytest.raises(InvalidParameterError):
            invert_monotone(SQUARE, 4.0, 0.0)

    @settings(max_examples=60, deadline=None)
    @given(y=st.floats(min_value=0.01, max_value=1e6))
    def test_round_trip_with_slope_slack(self, y):
        tol = 1e-9
        for f in (SQUARE, IDENTITY, XLOGX):
            if y < f(f.domain_min):
                continue
            x = invert_monotone(f, y, tol)
            h = max(tol, 1e-7 * max(1.0, abs(x)))
            slope = (f(x + h) - f(max(f.domain_min, x - h))) / (2 * h)
            slack = max(abs(slope), 1.0) * tol + 1e-7
            assert y - slack <= f(x) <= y + slack


class TestInverseOrdering:
    def test_linear_triple(self):
        f = MonotoneFn(lambda x: x, 0.0)
        g = MonotoneFn(lambda x: 2 * x, 0.0)
        h = MonotoneFn(lambda x: 3 * x, 0.0)
        report = inverse_ordering_check(f, g, h, [6.0, 12.0])
        assert report.ok and report.precondition_ok
        first = report.samples[0]
        assert (first.inv_f, first.inv_g, first.inv_h) == pytest.approx(
            (6.0, 3.0, 2.0), abs=1e-8
        )

    def test_scaled_bound_copies(self):
        f = THEOREM_K3
        g = MonotoneFn(lambda x: 2 * THEOREM_K3(x), 1.0)
        h = MonotoneFn(lambda x: 4 * THEOREM_K3(x), 1.0)
        report = inverse_ordering_check(f, g, h, [8.0])
        assert report.ok

    def test_log_x_exp_triple(self):
        f = MonotoneFn(lambda x: math.log(x), 1.0)
        g = MonotoneFn(lambda x: x, 1.0)
        h = MonotoneFn(lambda x: math.exp(x), 1.0)
        report = inverse_ordering_check(f, g, h, [5.0])
        assert report.ok
        s = report.samples[0]
        assert s.inv_f == pytest.approx(math.e**5, rel=1e-6)
        assert s.inv_g == pytest.approx(5.0, abs=1e-8)
        assert s.inv_h == pytest.approx(math.log(5.0), abs=1e-8)

    def test_precondition_violation_reported_not_raised(self):
        f = MonotoneFn(lambda x: 3 * x, 0.0)  # not below g
        g = MonotoneFn(lambda x: 2 * x, 0.0)
        h = MonotoneFn(lambda x: 4 * x, 0.0)
        report = inverse_ordering_check(f, g, h, [6.0])
        assert not report.precondition_ok
        assert not report.ok
        assert "pointwise" in report.detail


class TestElementSizeBounds:
    def test_linear_densities(self):
        assert element_size_bounds(HALF, IDENTITY, 10) == pytest.approx(
            (10.0, 20.0), abs=1e-7
        )

    def test_block_bound_vs_identity(self):
        low, high = element_size_bounds(THEOREM_K3, IDENTITY, 4)
        assert low == pytest.approx(4.0, abs=1e-6)
        assert high == pytest.approx(9.0, abs=1e-6)

    def test_degenerate_equal_bounds(self):
        low, high = element_size_bounds(IDENTITY, IDENTITY, 1)
        assert low == pytest.approx(1.0, abs=1e-7)
        assert high == pytest.approx(1.0, abs=1e-7)

    def test_bad_index(self):
        with pytest.raises(InvalidParameterError):
            element_size_bounds(HALF, IDENTITY, 0)


class TestIterlogProduct:
    def test_ln_e_is_one(self):
        assert iterlog_product(math.e, IterLogSpec(1, 1.0)) == pytest.approx(math.e)

    def test_double_log(self):
        n = math.exp(math.e)
        assert iterlog_product(n, IterLogSpec(2, 1.0)) == pytest.approx(n * math.e * 1.0)

    def test_squared_outer_exponent(self):
        got = iterlog_product(1e6, IterLogSpec(1, 2.0))
        assert got == pytest.approx(190868331.97722232, rel=1e-12)

    def test_threshold_values(self):
        assert tower_threshold(1) == 1.0
        assert tower_threshold(2) == pytest.approx(math.e)
        assert tower_threshold(3) == pytest.approx(math.exp(math.e))

    def test_below_threshold_is_error_not_nan(self):
        with pytest.raises(NumericDomainError, match="threshold"):
            iterlog_product(1.0, IterLogSpec(1, 1.0))
        with pytest.raises(NumericDomainError):
            iterlog_product(math.e, IterLogSpec(2, 1.0))

    def test_noise_margin_rejected(self):
        with pytest.raises(NumericDomainError):
            iterlog_product(1.005, IterLogSpec(1, 1.0))
        iterlog_product(1.02, IterLogSpec(1, 1.0))  # just above the margin

    def test_spec_validation(self):
        with pytest.raises(InvalidParameterError):
            IterLogSpec(0, 1.0)
        with pytest.raises(InvalidParameterError):
            IterLogSpec(1, 0.5)


class TestReciprocalPartialSum:
    def test_single_term(self):
        got = reciprocal_partial_sum(IterLogSpec(1, 1.0), 5, 5)
        assert got == pytest.approx(0.12426698691192236, rel=1e-12)

    def test_matches_comparison_integral(self):
        got = reciprocal_partial_sum(IterLogSpec(1, 1.0), 1000, 10**6)
        want = math.log(math.log(10**6)) - math.log(math.log(10**3))
        assert got == pytest.approx(want, abs=0.01)

    def test_monotone_in_upper_limit(self):
        sums = [
            reciprocal_partial_sum(IterLogSpec(1, 1.5), 10, n) for n in (100, 1000, 10000)
        ]
        assert sums[0] < sums[1] < sums[2]

    def test_compensated_matches_plain_on_window(self):
        spec = IterLogSpec(1, 1.0)
        got = reciprocal_partial_sum(spec, 1000, 10999)
        plain = sum(1.0 / iterlog_product(n, spec) for n in range(1000, 11000))
        assert got == pytest.approx(plain, rel=1e-8)

    def test_divergence_style_growth(self):
        # For s=1 the windowed sums track log log growth from below.
        spec = IterLogSpec(1, 1.0)
        window = reciprocal_partial_sum(spec, 10**6, 10**7)
        integral = math.log(math.log(10**7)) - math.log(math.log(10**6))
        assert window > 0.9 * integral

    def test_convergence_style_boundedness(self):
        # For s=1.5 the tail is bounded by the comparison integral, which is
        # finite: integral of 1/(x (ln x)^1.5) = -2 (ln x)^(-1/2).
        spec = IterLogSpec(1, 1.5)
        window = reciprocal_partial_sum(spec, 10**4, 10**6)
        integral = 2 / math.sqrt(math.log(10**4)) - 2 / math.sqrt(math.log(10**6))
        assert window < integral * 1.05

    def test_domain_error_propagates(self):
        with pytest.raises(NumericDomainError):
            reciprocal_partial_sum(IterLogSpec(2, 1.0), 2, 10)

    def test_empty_range(self):
        with pytest.raises(InvalidParameterError):
            reciprocal_partial_sum(IterLogSpec(1, 1.0), 10, 9)


class TestReciprocalSumBounds:
    def test_harmonic_example(self):
        low, high = reciprocal_sum_bounds_for_set(HALF, IDENTITY, 3)
        assert low == pytest.approx(11.0 / 12.0, abs=1e-7)
        assert high == pytest.approx(11.0 / 6.0, abs=1e-7)

    def test_block_bound_low_term(self):
        low, high = reciprocal_sum_bounds_for_set(THEOREM_K3, IDENTITY, 4)
        # last low term is 1/inverse(4) = 1/9
        low3, _ = reciprocal_sum_bounds_for_set(THEOREM_K3, IDENTITY, 3)
        assert low - low3 == pytest.approx(1.0 / 9.0, abs=1e-6)
        assert low < high

    def test_single_index_interval(self):
        f = MonotoneFn(lambda x: x / 2.0, 0.0)
        h = MonotoneFn(lambda x: x, 0.0)
        low, high = reciprocal_sum_bounds_for_set(f, h, 1)
        assert low == pytest.approx(0.5, abs=1e-7)
        assert high == pytest.approx(1.0, abs=1e-7)
        assert low < high

    def test_n_below_domain(self):
        f = MonotoneFn(lambda x: x + 5.0, 0.0)
        h = MonotoneFn(lambda x: x + 6.0, 0.0)
        with pytest.raises(NumericDomainError):
            reciprocal_sum_bounds_for_set(f, h, 3)


PROBE_SCHEMA = {
    "type": "object",
    "required": ["theorem", "d", "s", "threshold_found", "samples"],
    "additionalProperties": False,
    "properties": {
        "theorem": {"enum": ["11", "13"]},
        "d": {"type": "integer", "minimum": 1},
        "s": {"type": "number", "minimum": 1},
        "threshold_found": {"type": "number"},
        "samples": {
            "type": "array",
            "items": {
                "type": "array",
                "items": {"type": "number"},
                "minItems": 2,
                "maxItems": 2,
            },
        },
    },
}


class TestProbes:
    def test_theorem11_ratio_exceeds_one_past_threshold(self):
        report = probe_theorem11(d=1)
        assert report.theorem == "11"
        past = [r for n, r in report.samples if n >= report.threshold_found]
        assert len(past) >= 21
        assert all(r > 1.0 for r in past)

    def test_theorem11_threshold_stable_under_doubling(self):
        a = probe_theorem11(d=1, confirm_samples=20)
        b = probe_theorem11(d=1, confirm_samples=40)
        assert a.threshold_found == b.threshold_found

    def test_theorem13_ratio_below_one_past_threshold(self):
        report = probe_theorem13(d=1, s=1.5)
        assert report.theorem == "13"
        assert report.s == 1.5
        past = [r for n, r in report.samples if n >= report.threshold_found]
        assert len(past) >= 21
        assert all(r < 1.0 for r in past)

    def test_theorem13_default_epsilon(self):
        # default epsilon is (s-1)/2; for s=1.5 the g-chain exponent is 1.25
        report = probe_theorem13(d=1, s=1.5)
        n, _ = report.samples[0]
        g = iterlog_product(n, IterLogSpec(1, 1.25))
        h_of_g = g / math.log(g) ** 1.5
        assert report.samples[0][1] == pytest.approx(h_of_g / n, rel=1e-12)

    def test_json_schema_round_trip(self):
        import jsonschema

        for report in (probe_theorem11(d=1), probe_theorem13(d=1, s=1.5)):
            payload = json.loads(report.to_json())
            jsonschema.validate(payload, PROBE_SCHEMA)

    def test_depth_two_probes_skip_subdomain_warmup(self):
        # Near the threshold the pushed-through argument g(n) drops below its
        # own chain's domain; the scan must skip those points, not crash.
        r13 = probe_theorem13(d=2, s=1.5)
        assert all(r < 1.0 for n, r in r13.samples if n >= r13.threshold_found)
        r11 = probe_theorem11(d=2)
        past = [r for n, r in r11.samples if n >= r11.threshold_found]
        assert len(past) >= 21
        assert all(r > 1.0 for r in past)

    def test_bad_parameters(self):
        with pytest.raises(InvalidParameterError):
            probe_theorem11(d=0)
        with pytest.raises(InvalidParameterError):
            probe_theorem13(d=1, s=1.0)
        with pytest.raises(InvalidParameterError):
            probe_theorem13(d=1, s=1.5, epsilon=0.7)


def _random_ordered_triple(rng):
    alpha = rng.uniform(0.5, 3.0)
    p = rng.uniform(0.8, 2.5)
    base = lambda x, a=alpha, q=p: a * x**q
    b1, g1 = rng.uniform(0.1, 2.0), rng.uniform(0.05, 1.0)
    b2, g2 = rng.uniform(0.1, 2.0), rng.uniform(0.05, 1.0)
    f = MonotoneFn(lambda x, fn=base: fn(x), 0.0)
    g = MonotoneFn(lambda x, fn=base, b=b1, c=g1: fn(x) + b + c * x, 0.0)
    h = MonotoneFn(
        lambda x, fn=base, b=b1 + b2, c=g1 + g2: fn(x) + b + c * x, 0.0
    )
    return f, g, h


def test_randomized_ordering_suite_small():
    # 20-triple spot check; the full 100-triple run lives in the acceptance suite.
    rng = random.Random(20260809)
    for _ in range(20):
        f, g, h = _random_ordered_triple(rng)
        y0 = h(0.0) + 0.5
        ys = [y0 + 3.0 * i for i in range(10)]
        report = inverse_ordering_check(f, g, h, ys, tol=1e-9)
        assert report.precondition_ok
        assert report.ok
