import json

import pytest
from hypothesis import given, strategies as st

from movoc.errors import ConfigError
from movoc.pretok import (
    DEFAULT_POLICY,
    NormalizationPolicy,
    load_policy,
    normalize,
    policy_from_json,
    pretokenize,
)


class TestNormalize:
    def test_wordspace_becomes_space(self):
        assert normalize("ሰላም፡ዓለም").text == "ሰላም ዓለም"

    def test_wordspace_kept_when_flag_off(self):
        policy = NormalizationPolicy(treat_ethiopic_wordspace_as_space=False)
        assert normalize("ሰላም፡ዓለም", policy).text == "ሰላም፡ዓለም"

    def test_whitespace_collapses(self):
        assert normalize("a  b ").text == "a b"

    def test_strip_set_removed(self):
        assert normalize("ቤት​").text == "ቤት"

    def test_tabs_and_newlines_become_single_spaces(self):
        assert normalize("a\t\nb\r\n").text == "a b"

    def test_empty_input(self):
        result = normalize("")
        assert result.text == ""
        assert result.source_offsets == ()

    def test_nfc_applied(self):
        # e + combining acute composes to a single scalar
        assert normalize("éx").text == "éx"

    def test_source_offsets_point_at_nfc_source(self):
        result = normalize("  ቤት​ቤት  ")
        assert result.text == "ቤትቤት"
        assert result.source_offsets == (2, 3, 5, 6)

    def test_collapsed_space_maps_to_first_whitespace(self):
        result = normalize("a \t b")
        assert result.text == "a b"
        assert result.source_offsets == (0, 1, 4)

    @given(st.text(max_size=60))
    def test_idempotent(self, raw):
        once = normalize(raw).text
        assert normalize(once).text == once


class TestPretokenize:
    def test_punctuation_splits_off(self):
        tokens = pretokenize(normalize("ሰላም።"))
        assert [(t.text, t.kind) for t in tokens] == [
            ("ሰላም", "word"),
            ("።", "punctuation"),
        ]

    def test_digits_classify_as_number(self):
        tokens = pretokenize(normalize("ዓመት 2015"))
        assert [(t.text, t.kind) for t in tokens] == [
            ("ዓመት", "word"),
            ("2015", "number"),
        ]

    def test_ethiopic_numerals_are_numbers(self):
        tokens = pretokenize(normalize("፲፪"))
        assert [(t.text, t.kind) for t in tokens] == [("፲፪", "number")]

    def test_empty(self):
        assert pretokenize(normalize("")) == []

    def test_each_punct_char_standalone(self):
        tokens = pretokenize(normalize("ቤት!!"))
        assert [t.text for t in tokens] == ["ቤት", "!", "!"]
        assert all(t.kind == "punctuation" for t in tokens[1:])

    def test_digits_never_merge_with_letters(self):
        tokens = pretokenize(normalize("ቤት2015ቤት"))
        assert [(t.text, t.kind) for t in tokens] == [
            ("ቤት", "word"),
            ("2015", "number"),
            ("ቤት", "word"),
        ]

    def test_foreign_script_is_other(self):
        tokens = pretokenize(normalize("ቤት ж"))
        assert [(t.text, t.kind) for t in tokens] == [("ቤት", "word"), ("ж", "other")]

    def test_spans_match_text(self):
        text = normalize("ሰላም። ዓመት 12")
        for tok in pretokenize(text):
            start, end = tok.span
            assert text.text[start:end] == tok.text

    @given(st.text(alphabet=st.characters(min_codepoint=0x1200, max_codepoint=0x1248), max_size=30))
    def test_ethiopic_letters_only_yield_words(self, raw):
        tokens = pretokenize(normalize(raw))
        assert all(t.kind == "word" for t in tokens)

    @given(st.text(max_size=60))
    def test_spans_partition_non_space_content(self, raw):
        text = normalize(raw)
        covered = []
        prev_end = -1
        for tok in pretokenize(text):
            start, end = tok.span
            assert start < end
            assert start > prev_end or prev_end == -1 or start >= prev_end
            assert prev_end <= start
            prev_end = end
            covered.extend(range(start, end))
        non_space = [i for i, ch in enumerate(text.text) if ch != " "]
        assert covered == non_space


class TestPolicyJson:
    def test_round_trip_through_file(self, tmp_path):
        doc = {
            "wordspace_as_space": False,
            "strip": ["200B", "0x200C"],
            "punct": ["21"],
        }
        path = tmp_path / "policy.json"
        path.write_text(json.dumps(doc), encoding="utf-8")
        policy = load_policy(path)
        assert policy.treat_ethiopic_wordspace_as_space is False
        assert policy.strip_set == frozenset({0x200B, 0x200C})
        assert policy.punct_set == frozenset({0x21})

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown keys"):
            policy_from_json({"stripp": []})

    def test_bad_code_point_rejected(self):
        with pytest.raises(ConfigError, match="hex code point"):
            policy_from_json({"strip": ["zz"]})

    def test_overlapping_sets_rejected(self):
        with pytest.raises(ConfigError, match="overlap"):
            policy_from_json({"strip": ["21"], "punct": ["21"]})

    def test_defaults_are_disjoint(self):
        assert not DEFAULT_POLICY.strip_set & DEFAULT_POLICY.punct_set
