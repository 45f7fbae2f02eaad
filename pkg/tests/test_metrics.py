import random

import pytest
from hypothesis import given, settings, strategies as st

from oracles import brute_distance, brute_weighted_f1
from variaforge.errors import DataError
from variaforge.metrics import (
    ScoreRecord,
    aggregate,
    aggregate_records,
    cer,
    corpus_error_rates,
    corpus_rates_from_pairs,
    format_cell,
    parse_score_line,
    wer,
    weighted_f1,
)


class TestWer:
    def test_identical(self):
        stats = wer(["a", "b"], ["a", "b"])
        assert stats.distance == 0
        assert stats.rate_percent == 0.0

    def test_three_substitutions(self):
        stats = wer(["de", "Mann", "ass", "grouss"], ["den", "Mann", "as", "grous"])
        assert stats.distance == 3
        assert stats.substitutions == 3
        assert stats.rate_percent == pytest.approx(75.0)

    def test_deletion(self):
        stats = wer(["a", "b"], ["a"])
        assert stats.deletions == 1
        assert stats.rate_percent == pytest.approx(50.0)

    def test_empty_reference(self):
        with pytest.raises(DataError, match="empty reference"):
            wer([], ["a"])


class TestCer:
    def test_hand_cases(self):
        assert cer("ass", "as") == pytest.approx(100 / 3)
        assert cer("abc", "abc") == 0.0
        assert cer("ab", "ba") == pytest.approx(100.0)

    def test_spaces_count(self):
        assert cer("a b", "ab") == pytest.approx(100 / 3)

    def test_empty_reference(self):
        with pytest.raises(DataError):
            cer("", "x")


class TestCorpus:
    def test_micro_vs_macro(self):
        pairs = [("a b", "x b"), ("c d", "c d")]
        micro = corpus_rates_from_pairs(pairs)
        assert micro.wer == pytest.approx(25.0)
        macro = corpus_rates_from_pairs(pairs, macro=True)
        assert macro.wer == pytest.approx(25.0)  # equal lengths here
        uneven = [("a", "x"), ("b c d", "b c d")]
        assert corpus_rates_from_pairs(uneven).wer == pytest.approx(25.0)
        assert corpus_rates_from_pairs(uneven, macro=True).wer == pytest.approx(50.0)

    def test_identical_files(self, tmp_path):
        ref = tmp_path / "ref.txt"
        hyp = tmp_path / "hyp.txt"
        ref.write_text("a b\nc d\n", encoding="utf-8")
        hyp.write_text("a b\nc d\n", encoding="utf-8")
        report = corpus_error_rates(ref, hyp)
        assert report.wer == 0.0
        assert report.cer == 0.0

    def test_line_count_mismatch(self, tmp_path):
        ref = tmp_path / "ref.txt"
        hyp = tmp_path / "hyp.txt"
        ref.write_text("a\nb\n", encoding="utf-8")
        hyp.write_text("a\n", encoding="utf-8")
        with pytest.raises(DataError, match="2.*1"):
            corpus_error_rates(ref, hyp)

    def test_nfc_toggle(self):
        composed = "café"
        decomposed = "café"
        assert corpus_rates_from_pairs([(composed, decomposed)]).cer > 0
        assert corpus_rates_from_pairs([(composed, decomposed)], nfc=True).cer == 0.0

    def test_drop_punct_toggle(self):
        pairs = [("a b . .", "a x . .")]
        assert corpus_rates_from_pairs(pairs).wer == pytest.approx(25.0)
        assert corpus_rates_from_pairs(pairs, drop_punct=True).wer == pytest.approx(50.0)

    def test_invariant_wer_equals_sid_over_ref(self):
        rnd = random.Random(3)
        pairs = []
        for _ in range(50):
            ref = " ".join(rnd.choice("abcd") for _ in range(rnd.randint(1, 8)))
            hyp = " ".join(rnd.choice("abcd") for _ in range(rnd.randint(0, 8)))
            pairs.append((ref, hyp))
        rep = corpus_rates_from_pairs(pairs)
        total_ops = rep.substitutions + rep.insertions + rep.deletions
        assert rep.wer == pytest.approx(100.0 * total_ops / rep.ref_token_count)


class TestWeightedF1:
    def test_hand_case(self):
        assert weighted_f1(list("AABB"), list("ABBB")) == pytest.approx(73.333333333)

    def test_perfect(self):
        assert weighted_f1(["x", "y"], ["x", "y"]) == pytest.approx(100.0)

    def test_all_wrong_single_class(self):
        assert weighted_f1(["a", "a"], ["b", "b"]) == 0.0

    def test_errors(self):
        with pytest.raises(DataError):
            weighted_f1(["a"], [])
        with pytest.raises(DataError):
            weighted_f1([], [])

    def test_fuzz_against_oracle(self):
        rnd = random.Random(17)
        for _ in range(200):
            n = rnd.randint(1, 30)
            labels = "abc"
            gold = [rnd.choice(labels) for _ in range(n)]
            pred = [rnd.choice(labels) for _ in range(n)]
            assert weighted_f1(gold, pred) == pytest.approx(
                brute_weighted_f1(gold, pred), abs=1e-9
            )

    @settings(max_examples=100)
    @given(st.lists(st.sampled_from("abcd"), min_size=1, max_size=20))
    def test_gold_vs_gold_is_100(self, gold):
        assert weighted_f1(gold, gold) == pytest.approx(100.0)


class TestAggregate:
    def test_identical_scores(self):
        assert aggregate([60.0] * 5) == (60.0, 0.0)

    def test_closed_form(self):
        mean, std = aggregate([1, 2, 3, 4, 5])
        assert mean == pytest.approx(3.0)
        assert std == pytest.approx(1.5811, abs=1e-4)

    def test_single_value_std_zero(self):
        assert aggregate([42.5]) == (42.5, 0.0)

    def test_empty_group(self):
        with pytest.raises(DataError):
            aggregate([])

    def test_format(self):
        assert format_cell(68.56, 1.05) == "68.56 ± 1.05"

    def test_permutation_invariance(self):
        records = [
            ScoreRecord("IC", "std", "std", seed, 50.0 + seed) for seed in range(1, 6)
        ]
        shuffled = list(reversed(records))
        assert aggregate_records(records) == aggregate_records(shuffled)


class TestScoreRecords:
    def test_parse_valid_line(self):
        rec = parse_score_line(
            '{"task":"IC","train_variant":"std","test_variant":"comb","seed":3,'
            '"weighted_f1":57.9,"model":"m","cell_id":"c"}',
            "x:1",
        )
        assert rec.task == "IC"
        assert rec.seed == 3

    def test_missing_field(self):
        with pytest.raises(DataError, match="missing field 'seed'"):
            parse_score_line(
                '{"task":"IC","train_variant":"std","test_variant":"std","weighted_f1":1}',
                "x:1",
            )

    def test_unknown_field(self):
        with pytest.raises(DataError, match="unknown field"):
            parse_score_line(
                '{"task":"IC","train_variant":"std","test_variant":"std","seed":1,'
                '"weighted_f1":1,"extra":2}',
                "x:1",
            )

    def test_bad_variant_and_range(self):
        with pytest.raises(DataError):
            ScoreRecord("IC", "weird", "std", 1, 50.0)
        with pytest.raises(DataError):
            ScoreRecord("IC", "std", "std", 1, 101.0)


def test_edit_counts_match_oracle_distance_on_word_level():
    rnd = random.Random(23)
    for _ in range(200):
        ref = [rnd.choice("abc") for _ in range(rnd.randint(1, 10))]
        hyp = [rnd.choice("abc") for _ in range(rnd.randint(0, 10))]
        stats = wer(ref, hyp)
        assert stats.distance == brute_distance(ref, hyp)
        assert stats.substitutions + stats.insertions + stats.deletions == stats.distance
