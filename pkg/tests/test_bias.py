import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from skewbench.exceptions import DomainError, ValidityError
from skewbench.models.skew import BalanceMethod, SkewSpec
from skewbench.services.bias import (
    alpha_sensitivity_sweep,
    balance,
    balance_objective,
    delta_p_closed_form,
    delta_p_numeric,
    delta_p_simplified,
    exact_precision,
    expected_precision_contaminated,
    expected_precision_contaminated_two_class,
    expected_precision_two_class,
    expected_precision_uniform,
    golden_section_minimize,
    overestimation_ratio,
    recommended_mixing,
)
from skewbench.services.skew import yeast_preset

ORACLE_GRID = [
    (alpha, p) for alpha in (0.3, 0.5, 0.7, 0.9) for p in (1 / 100, 1 / 300, 1 / 1000)
]

alphas = st.floats(min_value=0.01, max_value=0.99)
fractions = st.floats(min_value=0.001, max_value=0.999)


class TestExpectedPrecision:
    """Tests for the closed-form precision under skew."""

    def test_perfect_classifier(self):
        """Test precision 1 for alpha = 1."""
        assert expected_precision_uniform(1.0, 0.5).value == 1.0

    def test_chance_on_balanced_data(self):
        """Test precision 0.5 for alpha = 0.5 at p_tilde = 0.5."""
        assert expected_precision_uniform(0.5, 0.5).value == pytest.approx(0.5)

    def test_skewed_spot_value(self):
        """Test 0.009 / 0.108 at alpha = 0.9, p_tilde = 0.01."""
        assert expected_precision_uniform(0.9, 0.01).value == pytest.approx(0.083333, abs=1e-6)

    def test_two_class_reduces_to_uniform(self):
        """Test equal class accuracies give the uniform value."""
        assert expected_precision_two_class(0.9, 0.9, 0.01).value == pytest.approx(
            expected_precision_uniform(0.9, 0.01).value, abs=1e-12
        )

    def test_two_class_spot_value(self):
        """Test 0.8 / 1.75 at alpha_pos = 0.8, alpha_neg = 0.95, p_tilde = 0.05."""
        assert expected_precision_two_class(0.8, 0.95, 0.05).value == pytest.approx(
            0.457143, abs=1e-6
        )

    @pytest.mark.parametrize("p_tilde", [0.001, 0.3, 0.9])
    def test_two_class_perfect(self, p_tilde):
        """Test perfect class accuracies give precision 1."""
        assert expected_precision_two_class(1.0, 1.0, p_tilde).value == 1.0

    def test_noise_terms_enter(self):
        """Test positive noise raises and negative noise lowers precision."""
        base = expected_precision_uniform(0.8, 0.05).value
        assert expected_precision_uniform(0.8, 0.05, xi1=0.01).value > base
        assert expected_precision_uniform(0.8, 0.05, xi2=0.01).value < base

    @pytest.mark.parametrize("alpha,p_tilde", [(0.0, 0.1), (1.2, 0.1), (0.9, 0.0), (0.9, 1.0)])
    def test_out_of_domain(self, alpha, p_tilde):
        """Test accuracies outside (0, 1] and mixings outside (0, 1) are domain errors."""
        with pytest.raises(DomainError):
            expected_precision_uniform(alpha, p_tilde)

    @given(alpha=st.floats(min_value=0.51, max_value=0.99), a=fractions, b=fractions)
    def test_increases_with_mixing(self, alpha, a, b):
        """Test precision strictly increases in p_tilde for alpha in (0.5, 1)."""
        if abs(a - b) < 1e-6:
            return
        low, high = min(a, b), max(a, b)
        assert (
            expected_precision_uniform(alpha, low).value
            < expected_precision_uniform(alpha, high).value
        )


class TestContaminatedPrecision:
    """Tests for precision with hidden positives among the negatives."""

    def test_no_contamination(self):
        """Test q = 0 reduces to the uniform value."""
        assert expected_precision_contaminated(0.5, 0.01, 0.0).value == pytest.approx(0.01)

    def test_spot_value(self):
        """Test 0.005495 / 0.5 at alpha = 0.5, p_tilde = 0.01, q = 0.001."""
        assert expected_precision_contaminated(0.5, 0.01, 0.001).value == pytest.approx(
            0.01099, abs=1e-6
        )

    def test_validity_bound(self):
        """Test q above (1 - alpha) / alpha is a validity error."""
        with pytest.raises(ValidityError, match="contamination exceeds model range"):
            expected_precision_contaminated(0.9, 0.01, 0.2)

    def test_two_class_spot_value(self):
        """Test the two-class form at equal accuracies."""
        assert expected_precision_contaminated_two_class(0.5, 0.5, 0.01, 0.001).value == (
            pytest.approx(0.01099, abs=1e-6)
        )

    @pytest.mark.parametrize("p_tilde", [0.01, 0.5])
    def test_two_class_perfect(self, p_tilde):
        """Test perfect accuracies without contamination give precision 1."""
        assert expected_precision_contaminated_two_class(1.0, 1.0, p_tilde, 0.0).value == 1.0

    @given(alpha=alphas, p_tilde=fractions, share=st.floats(min_value=0.01, max_value=1.0))
    def test_exceeds_uniform(self, alpha, p_tilde, share):
        """Test contamination inflates precision inside the validity region."""
        q = share * min((1 - alpha) / alpha, 0.99)
        if q <= 0:
            return
        assert (
            expected_precision_contaminated(alpha, p_tilde, q).value
            > expected_precision_uniform(alpha, p_tilde).value
        )

    @given(alpha=alphas, p_tilde=fractions, share=st.floats(min_value=0, max_value=1.0))
    def test_two_class_reduces(self, alpha, p_tilde, share):
        """Test equal accuracies give the one-class contaminated value."""
        q = share * min((1 - alpha) / alpha, 0.99)
        assert expected_precision_contaminated_two_class(alpha, alpha, p_tilde, q).value == (
            pytest.approx(expected_precision_contaminated(alpha, p_tilde, q).value, abs=1e-12)
        )


class TestExactPrecision:
    """Tests for precision at the natural prevalence."""

    def test_perfect(self):
        """Test alpha = 1 gives 1."""
        assert exact_precision(1.0, 0.01).value == 1.0

    def test_chance(self):
        """Test alpha = 0.5 gives p."""
        assert exact_precision(0.5, 0.01).value == pytest.approx(0.01)

    def test_yeast_prevalence(self):
        """Test the substitution at p = 1/230."""
        p = 1 / 230
        expected = 0.9 * p / (0.9 * p + 0.1 * (1 - p))
        assert exact_precision(0.9, p).value == pytest.approx(expected, abs=1e-15)

    def test_overestimation_ratio(self):
        """Test mixing above the natural prevalence overstates precision."""
        assert overestimation_ratio(0.9, 0.1, 0.01) > 1
        assert overestimation_ratio(0.9, 0.01, 0.01) == pytest.approx(1.0)


class TestBalanceObjective:
    """Tests for the balance objective."""

    @pytest.mark.parametrize("alpha,p", [(0.5, 0.01), (0.9, 0.003)])
    def test_zero_without_contamination(self, alpha, p):
        """Test both terms coincide at delta_p = 0 and q = 0."""
        assert balance_objective(0.0, alpha, p, 0.0) == pytest.approx(0.0, abs=1e-30)

    def test_positive_with_contamination(self):
        """Test contamination perturbs the objective."""
        assert balance_objective(0.0, 0.5, 0.01, 1e-4) > 0

    def test_root_is_negated_simplified_offset(self):
        """Test the objective vanishes at -(1 - p) q / (1 - q)."""
        p, q = 0.01, 1e-4
        assert balance_objective(-(1 - p) * q / (1 - q), 0.5, p, q) <= 1e-18

    def test_out_of_range(self):
        """Test p + delta_p must stay inside (0, 1)."""
        with pytest.raises(DomainError):
            balance_objective(-0.02, 0.5, 0.01, 0.0)


class TestDeltaP:
    """Tests for the mixing offset."""

    def test_closed_form_at_half(self):
        """Test the spot value at alpha = 0.5."""
        assert delta_p_closed_form(0.5, 0.01, 1e-4) == pytest.approx(9.90099e-5, abs=1e-10)

    def test_closed_form_zero_contamination(self):
        """Test q = 0 needs no offset."""
        assert delta_p_closed_form(0.7, 0.01, 0.0) == 0

    def test_closed_form_high_accuracy(self):
        """Test the substitution with m = 0.108 at alpha = 0.9."""
        m = 0.8 * 0.01 + 0.1
        expected = m * (0.01 - 1) * 1e-4 / (m * 1e-4 + 0.9 - 1)
        value = delta_p_closed_form(0.9, 0.01, 1e-4)
        assert value == pytest.approx(expected, rel=1e-12)
        assert value == pytest.approx(1.06932e-4, abs=1e-9)

    def test_simplified(self):
        """Test (1 - p) q / (1 - q)."""
        assert delta_p_simplified(0.01, 1e-4) == pytest.approx(0.99e-4 / 0.9999, rel=1e-12)
        assert delta_p_simplified(0.3, 0.0) == 0

    def test_simplified_rejects_q_one(self):
        """Test q >= 1 is a domain error."""
        with pytest.raises(DomainError):
            delta_p_simplified(0.01, 1.0)

    @pytest.mark.parametrize("alpha,p", ORACLE_GRID)
    def test_simplified_equals_closed_form_at_half(self, alpha, p):
        """Test the alpha = 1/2 simplification."""
        q = p / 100
        assert delta_p_closed_form(0.5, p, q) == pytest.approx(delta_p_simplified(p, q), abs=1e-12)

    @pytest.mark.parametrize("alpha,p", ORACLE_GRID)
    def test_numeric_matches_closed_form(self, alpha, p):
        """Test the minimizer reaches a root whose magnitude equals the closed form."""
        q = p / 100
        result = delta_p_numeric(alpha, p, q)
        assert result.objective_value <= 1e-18
        assert result.converged
        assert result.method is BalanceMethod.NUMERIC
        closed = delta_p_closed_form(alpha, p, q)
        assert abs(result.delta_p) == pytest.approx(abs(closed), rel=1e-9)
        assert result.delta_p < 0 < closed

    def test_numeric_without_contamination(self):
        """Test the root is 0 when q = 0."""
        result = delta_p_numeric(0.5, 0.01, 0.0, tol=1e-12)
        assert abs(result.delta_p) <= 1e-12

    def test_numeric_rejects_bad_tolerance(self):
        """Test a non-positive tolerance is a domain error."""
        with pytest.raises(DomainError):
            delta_p_numeric(0.5, 0.01, 1e-4, tol=0)


class TestGoldenSection:
    """Tests for the golden-section minimizer."""

    def test_quadratic(self):
        """Test the minimum of a shifted parabola."""
        x, fx = golden_section_minimize(lambda t: (t - 0.3) ** 2, -1.0, 2.0, 1e-10)
        assert x == pytest.approx(0.3, abs=1e-9)
        assert fx == pytest.approx(0.0, abs=1e-18)

    def test_reversed_bracket(self):
        """Test the bracket ends may come in either order."""
        x, _ = golden_section_minimize(lambda t: abs(t + 1), 3.0, -4.0, 1e-9)
        assert x == pytest.approx(-1.0, abs=1e-8)


class TestBalance:
    """Tests for recommended mixing."""

    @pytest.fixture
    def spec(self) -> SkewSpec:
        return SkewSpec.from_counts(0.01, 1_000_000, 9_901)

    def test_recommended_mixing(self, spec):
        """Test p + (1 - p) q / (1 - q)."""
        expected = spec.p + (1 - spec.p) * spec.q / (1 - spec.q)
        assert recommended_mixing(spec) == pytest.approx(expected, abs=1e-15)
        assert recommended_mixing(spec) == pytest.approx(0.0100990, rel=1e-5)

    def test_no_contamination(self):
        """Test a fully known population needs no offset."""
        spec = SkewSpec.from_counts(0.01, 10_000, 100)
        assert recommended_mixing(spec) == pytest.approx(0.01)

    def test_yeast(self):
        """Test the preset goes through the same substitution."""
        spec = yeast_preset()
        assert recommended_mixing(spec) == pytest.approx(
            spec.p + (1 - spec.p) * spec.q / (1 - spec.q), abs=1e-15
        )

    def test_boundary_is_rejected(self):
        """Test a mixing that reaches 1 is a domain error."""
        spec = SkewSpec.from_counts(0.5, 1000, 0)
        with pytest.raises(DomainError):
            recommended_mixing(spec)

    def test_simplified_balance(self, spec):
        """Test the default balance uses the alpha = 1/2 form and cancels the bias."""
        result = balance(spec)
        assert result.method is BalanceMethod.SIMPLIFIED_HALF
        assert result.p_tilde_star == pytest.approx(recommended_mixing(spec))
        assert result.converged

    def test_closed_form_balance(self, spec):
        """Test balance with an explicit accuracy."""
        result = balance(spec, alpha=0.8)
        assert result.method is BalanceMethod.CLOSED_FORM
        assert result.delta_p == pytest.approx(delta_p_closed_form(0.8, spec.p, spec.q))


class TestAlphaSweep:
    """Tests for the accuracy sensitivity sweep."""

    @pytest.mark.parametrize("p", [1 / 100, 1 / 300, 1 / 1000])
    def test_variance_bounded(self, p):
        """Test |delta_p| barely moves across accuracies."""
        sweep = alpha_sensitivity_sweep(p, p / 100)
        assert len(sweep.rows) == 18
        assert all(row.valid for row in sweep.rows)
        assert sweep.abs_delta_variance <= 1e-6

    def test_zero_contamination(self):
        """Test q = 0 gives zeros everywhere."""
        sweep = alpha_sensitivity_sweep(0.01, 0.0)
        assert [row.delta_p for row in sweep.rows] == [0.0] * len(sweep.rows)

    def test_numeric_column(self):
        """Test the numeric column agrees in magnitude."""
        sweep = alpha_sensitivity_sweep(0.01, 1e-4, alpha_grid=(0.2, 0.6), with_numeric=True)
        for row in sweep.rows:
            assert math.isclose(abs(row.delta_p_numeric), abs(row.delta_p), rel_tol=1e-9)
            assert row.objective_value <= 1e-18
