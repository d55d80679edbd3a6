import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from pydantic import ValidationError

from skewbench.exceptions import DomainError
from skewbench.models.skew import SkewSpec, contamination, round_count
from skewbench.services.skew import (
    YEAST_KNOWN_INTERACTIONS,
    YEAST_PAIRS,
    all_pairs,
    derive_rng,
    q_from_counts,
    skew_spec,
    yeast_preset,
)


class TestQFromCounts:
    """Tests for the contamination of the unlabeled pool."""

    def test_partial_knowledge(self):
        """Test q = 50/950 when half of the positives are known."""
        assert q_from_counts(0.1, 1000, 50) == pytest.approx(50 / 950, abs=1e-12)

    def test_all_positives_known(self):
        """Test q is zero when every positive is known."""
        assert q_from_counts(0.1, 1000, 100) == 0

    def test_nothing_known(self):
        """Test q equals p when no positive is known."""
        assert q_from_counts(0.1, 1000, 0) == pytest.approx(0.1)

    def test_more_known_than_expected(self):
        """Test the domain error for K > pT."""
        with pytest.raises(DomainError, match="more known positives than estimated positives"):
            q_from_counts(0.1, 1000, 101)

    def test_no_unlabeled_candidates(self):
        """Test the domain error for T - K = 0."""
        with pytest.raises(DomainError):
            q_from_counts(0.5, 2, 2)

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.1])
    def test_prevalence_out_of_range(self, p):
        """Test p must lie strictly inside (0, 1)."""
        with pytest.raises(DomainError):
            q_from_counts(p, 1000, 0)

    @given(
        p=st.floats(min_value=0.001, max_value=0.5),
        T=st.integers(min_value=1000, max_value=10_000_000),
        data=st.data(),
    )
    def test_decreasing_in_known_count(self, p, T, data):
        """Test q falls as more positives become known."""
        limit = int(p * T)
        K1 = data.draw(st.integers(min_value=0, max_value=max(limit - 1, 0)))
        K2 = data.draw(st.integers(min_value=K1 + 1, max_value=max(limit, K1 + 1)))
        if K2 > p * T:
            return
        assert q_from_counts(p, T, K2) < q_from_counts(p, T, K1)

    @given(
        p=st.floats(min_value=0.001, max_value=0.5),
        T=st.integers(min_value=1000, max_value=10_000_000),
        fraction=st.floats(min_value=0, max_value=1),
    )
    def test_counts_round_trip(self, p, T, fraction):
        """Test K is recovered from (p, T, q) within 0.5."""
        K = int(fraction * p * T)
        q = q_from_counts(p, T, K)
        assert abs((p * T - q * (T - K)) - K) <= 0.5
        assert 0 <= q <= p + 1e-12


class TestSkewSpec:
    """Tests for the SkewSpec value model."""

    def test_derives_contamination(self):
        """Test q is derived when omitted."""
        spec = SkewSpec(p=0.1, T=1000, K=50)
        assert spec.q == pytest.approx(50 / 950)

    def test_mixing_defaults_to_prevalence(self):
        """Test p_tilde defaults to p."""
        assert SkewSpec(p=0.1, T=1000, K=50).p_tilde == 0.1

    def test_rejects_inconsistent_q(self):
        """Test an explicit q must match the counts."""
        with pytest.raises(ValidationError):
            SkewSpec(p=0.1, T=1000, K=50, q=0.2)

    def test_rejects_excess_known(self):
        """Test strict specs reject K above round(pT)."""
        with pytest.raises(ValidationError):
            SkewSpec(p=0.1, T=1000, K=200)

    def test_non_strict_allows_excess_known(self):
        """Test non-strict specs keep a negative contamination."""
        spec = SkewSpec(p=0.1, T=1000, K=200, strict=False)
        assert spec.q < 0

    def test_is_frozen(self):
        """Test specs are immutable."""
        spec = SkewSpec(p=0.1, T=1000, K=50)
        with pytest.raises(ValidationError):
            spec.p = 0.2

    def test_counts(self):
        """Test the expected and hidden positive counts."""
        spec = SkewSpec.from_counts(0.1, 1000, 30)
        assert spec.expected_positives == 100
        assert spec.hidden_positives == 70

    def test_with_mixing(self):
        """Test with_mixing only changes p_tilde."""
        spec = skew_spec(0.1, 1000, 50).with_mixing(0.3)
        assert spec.p_tilde == 0.3
        assert spec.q == pytest.approx(50 / 950)


class TestYeastPreset:
    """Tests for the yeast interactome constants."""

    def test_constants(self):
        """Test the preset carries the published constants."""
        spec = yeast_preset()
        assert spec.p == pytest.approx(0.004348, abs=1e-6)
        assert spec.K == 82_593
        assert spec.T == 17_203_545

    def test_contamination_follows_formula(self):
        """Test q is computed from the counts."""
        spec = yeast_preset()
        assert spec.q == pytest.approx(contamination(spec.p, spec.T, spec.K), abs=1e-15)
        assert not spec.strict

    def test_constants_exceed_estimated_positives(self, caplog):
        """Test the preset warns that K exceeds round(pT)."""
        with caplog.at_level("WARNING", logger="skewbench.services.skew"):
            spec = yeast_preset()
        assert spec.K > round_count(spec.p * spec.T)
        assert YEAST_KNOWN_INTERACTIONS == spec.K
        assert "more known interactions" in caplog.text

    def test_all_pairs(self):
        """Test the unordered pair count of n proteins."""
        assert all_pairs(4) == 6
        assert all_pairs(5866) == 17_202_045
        assert YEAST_PAIRS == 17_203_545


class TestDeriveRng:
    """Tests for named random streams."""

    def test_same_stream_same_draws(self):
        """Test a stream is reproducible."""
        a = derive_rng(1, "test", "ideal_A", "0.01").random(5)
        b = derive_rng(1, "test", "ideal_A", "0.01").random(5)
        np.testing.assert_array_equal(a, b)

    def test_streams_are_independent(self):
        """Test different names and seeds give different draws."""
        base = derive_rng(1, "train").random(5)
        assert not np.array_equal(base, derive_rng(1, "test").random(5))
        assert not np.array_equal(base, derive_rng(2, "train").random(5))
        assert not np.array_equal(derive_rng(1, "tree", 0).random(5), derive_rng(1, "tree", 1).random(5))

    def test_long_keys_with_shared_prefix(self):
        """Test keys differing only after their first eight bytes name different streams."""
        a = derive_rng(0, "test", "real_B", "0.0100990099").random(5)
        b = derive_rng(0, "test", "real_B", "0.0100991234").random(5)
        assert not np.array_equal(a, b)

    def test_string_and_integer_keys_differ(self):
        """Test a string key never aliases the integer with the same bytes."""
        assert not np.array_equal(derive_rng(0, "a").random(5), derive_rng(0, 97).random(5))
        assert not np.array_equal(derive_rng(0, "1").random(5), derive_rng(0, 1).random(5))

    def test_key_boundaries_matter(self):
        """Test splitting a key into parts changes the stream."""
        assert not np.array_equal(
            derive_rng(0, "ab").random(5), derive_rng(0, "a", "b").random(5)
        )
