import io
import random

import pytest
from hypothesis import given, strategies as st

from movoc.corpus import (
    CanonicalAnalysis,
    MorphUnit,
    SegmentedCorpus,
    SurfaceSegmentation,
    format_surface_segmentation,
    gen_inventories,
    gen_synthetic_corpus,
    merge_counts_with_gold,
    parse_hornmorpho_notation,
    parse_role_annotation,
    parse_surface_segmentation,
    project_corpus,
    project_to_surface,
    read_gold_file,
    read_plain_corpus,
    write_gold_file,
)
from movoc.errors import FormatError


class TestSurfaceSegmentation:
    def test_boundaries_must_be_interior(self):
        with pytest.raises(ValueError):
            SurfaceSegmentation("ab", (0,))
        with pytest.raises(ValueError):
            SurfaceSegmentation("ab", (2,))

    def test_boundaries_must_increase(self):
        with pytest.raises(ValueError):
            SurfaceSegmentation("abcd", (2, 2))

    def test_morphs_split(self):
        seg = SurfaceSegmentation("አልሰበሩም", (2, 5))
        assert seg.morphs() == ("አል", "ሰበሩ", "ም")


class TestParseSurfaceSegmentation:
    def test_basic_boundaries(self):
        seg = parse_surface_segmentation("አልሰበሩም\tአል|ሰበሩ|ም")
        assert seg.boundaries == (2, 5)

    def test_single_morph_unsegmented(self):
        seg = parse_surface_segmentation("ቤት\tቤት")
        assert seg.boundaries == ()

    def test_concat_mismatch_errors(self):
        with pytest.raises(FormatError, match="አልሰበሩም"):
            parse_surface_segmentation("አልሰበሩም\tአል|ሰበር|ም")

    def test_empty_morph_errors(self):
        with pytest.raises(FormatError, match="empty morph"):
            parse_surface_segmentation("ab\ta||b")

    def test_missing_tab_errors(self):
        with pytest.raises(FormatError):
            parse_surface_segmentation("ab a|b")

    def test_format_is_inverse_of_parse(self):
        for line in ("አልሰበሩም\tአል|ሰበሩ|ም", "ቤት\tቤት", "abc\ta|b|c"):
            assert format_surface_segmentation(parse_surface_segmentation(line)) == line

    @given(st.lists(st.text(alphabet="ab", min_size=1, max_size=4), min_size=1, max_size=5))
    def test_round_trip_any_morph_split(self, morphs):
        seg = SurfaceSegmentation.from_morphs(morphs)
        assert parse_surface_segmentation(format_surface_segmentation(seg)) == seg


class TestHornmorphoNotation:
    def test_prefix_stem_suffixes(self):
        analysis = parse_hornmorpho_notation("-አል- <ሰበር> ኡ- ም---", "አልሰበሩም")
        assert [(u.form, u.role) for u in analysis.units] == [
            ("አል", "prefix"),
            ("ሰበር", "stem"),
            ("ኡ", "suffix"),
            ("ም", "suffix"),
        ]

    def test_multi_morph_prefix_group_and_lone_hyphen(self):
        analysis = parse_hornmorpho_notation("የም-አ-ይ- <ሰበር> - አው-----", "የማይሰበሩ")
        assert [(u.form, u.role) for u in analysis.units] == [
            ("የም", "prefix"),
            ("አ", "prefix"),
            ("ይ", "prefix"),
            ("ሰበር", "stem"),
            ("አው", "suffix"),
        ]

    def test_bare_stem(self):
        analysis = parse_hornmorpho_notation("<ቤት>", "ቤት")
        assert [(u.form, u.role) for u in analysis.units] == [("ቤት", "stem")]

    def test_missing_stem_errors(self):
        with pytest.raises(FormatError, match="stem"):
            parse_hornmorpho_notation("አል ሰበር", "አልሰበር")

    def test_nested_brackets_error(self):
        with pytest.raises(FormatError, match="nested"):
            parse_hornmorpho_notation("<<ሰበር>>", "ሰበር")

    def test_two_stems_error(self):
        with pytest.raises(FormatError, match="more than one"):
            parse_hornmorpho_notation("<አል> <ሰበር>", "አልሰበር")


class TestRoleAnnotation:
    def test_prefix_root_suffix(self):
        analysis = parse_role_annotation(
            {
                "surface": "መምህርነት",
                "units": [
                    {"form": "መ", "role": "prefix"},
                    {"form": "ምህር", "role": "root"},
                    {"form": "ነት", "role": "suffix"},
                ],
            }
        )
        assert [(u.form, u.role) for u in analysis.units] == [
            ("መ", "prefix"),
            ("ምህር", "root"),
            ("ነት", "suffix"),
        ]

    def test_clitic_role(self):
        analysis = parse_role_annotation(
            {
                "surface": "ኣብይና",
                "units": [
                    {"form": "ኣ", "role": "prefix"},
                    {"form": "ብይ", "role": "root"},
                    {"form": "ና", "role": "clitic"},
                ],
            }
        )
        assert analysis.units[-1].role == "clitic"

    def test_infix_role(self):
        analysis = parse_role_annotation(
            {
                "surface": "ሰነበረ",
                "units": [
                    {"form": "ሰ", "role": "root"},
                    {"form": "ነበ", "role": "infix"},
                    {"form": "ረ", "role": "suffix"},
                ],
            }
        )
        assert analysis.units[1].role == "infix"

    def test_unknown_role_errors(self):
        with pytest.raises(FormatError, match="unknown role"):
            parse_role_annotation(
                {"surface": "x", "units": [{"form": "x", "role": "stem"}]}
            )

    def test_no_root_errors(self):
        with pytest.raises(FormatError, match="exactly one"):
            parse_role_annotation({"surface": "x", "units": []})

    def test_two_roots_error(self):
        with pytest.raises(FormatError, match="exactly one"):
            parse_role_annotation(
                {
                    "surface": "xy",
                    "units": [
                        {"form": "x", "role": "root"},
                        {"form": "y", "role": "root"},
                    ],
                }
            )


class TestProjectToSurface:
    def test_concatenative_analysis_projects(self):
        analysis = CanonicalAnalysis(
            "መምህርነት",
            (MorphUnit("መ", "prefix"), MorphUnit("ምህር", "root"), MorphUnit("ነት", "suffix")),
        )
        seg = project_to_surface(analysis)
        assert seg is not None
        assert seg.boundaries == (1, 4)
        assert seg.morphs() == ("መ", "ምህር", "ነት")

    def test_fusional_analysis_does_not_project(self):
        analysis = CanonicalAnalysis(
            "አልሰበሩም",
            (
                MorphUnit("አል", "prefix"),
                MorphUnit("ሰበር", "stem"),
                MorphUnit("ኡ", "suffix"),
                MorphUnit("ም", "suffix"),
            ),
        )
        assert project_to_surface(analysis) is None

    def test_bare_stem_projects_to_empty_boundaries(self):
        analysis = CanonicalAnalysis("ቤት", (MorphUnit("ቤት", "stem"),))
        seg = project_to_surface(analysis)
        assert seg is not None and seg.boundaries == ()

    def test_projection_splits_back_to_units(self):
        analysis = CanonicalAnalysis(
            "ኣብይና",
            (MorphUnit("ኣ", "prefix"), MorphUnit("ብይ", "root"), MorphUnit("ና", "clitic")),
        )
        seg = project_to_surface(analysis)
        assert seg.morphs() == tuple(u.form for u in analysis.units)

    def test_project_corpus_counts_drops(self):
        projectable = CanonicalAnalysis("ab", (MorphUnit("a", "prefix"), MorphUnit("b", "root")))
        fusional = CanonicalAnalysis("xz", (MorphUnit("x", "root"), MorphUnit("y", "suffix")))
        corpus, dropped = project_corpus([projectable, fusional, projectable])
        assert dropped == 1
        assert corpus.entries == ((SurfaceSegmentation("ab", (1,)), 2),)


class TestReadPlainCorpus:
    def test_counts_words(self):
        counts = read_plain_corpus(io.StringIO("ቤት ቤት ሰው\n"))
        assert counts.counts == {"ቤት": 2, "ሰው": 1}

    def test_empty_stream(self):
        assert read_plain_corpus(io.StringIO("")).counts == {}

    def test_counts_across_lines(self):
        counts = read_plain_corpus(io.StringIO("a b\na\n"))
        assert counts.counts == {"a": 2, "b": 1}

    def test_punctuation_not_counted(self):
        counts = read_plain_corpus(io.StringIO("ቤት።\n"))
        assert counts.counts == {"ቤት": 1}

    def test_invalid_utf8_names_line(self):
        stream = io.BytesIO("ok\n".encode() + b"\xff\xfe\n" + "later\n".encode())
        with pytest.raises(FormatError, match="line 2"):
            read_plain_corpus(stream)


class TestGoldFile:
    def test_read_skips_comments_and_blanks(self):
        data = "# gold set\n\nአልሰበሩም\tአል|ሰበሩ|ም\nቤት\tቤት\n"
        corpus = read_gold_file(io.StringIO(data))
        assert len(corpus) == 2

    def test_count_column(self):
        corpus = read_gold_file(io.StringIO("ab\ta|b\t5\n"))
        assert corpus.entries[0][1] == 5

    def test_conflicting_repeat_errors(self):
        data = "abc\ta|bc\nabc\tab|c\n"
        with pytest.raises(FormatError, match="line 2"):
            read_gold_file(io.StringIO(data))

    def test_agreeing_repeat_accumulates(self):
        corpus = read_gold_file(io.StringIO("ab\ta|b\nab\ta|b\n"))
        assert corpus.entries[0][1] == 2

    def test_write_read_round_trip(self):
        corpus = gen_synthetic_corpus(7, 50, (("a", "bb"), ("cd", "ef"), ("g",)))
        sink = io.StringIO()
        write_gold_file(corpus, sink)
        back = read_gold_file(io.StringIO(sink.getvalue()), corpus.language)
        assert back.entries == corpus.entries


class TestSyntheticCorpus:
    def test_singleton_inventories(self):
        corpus = gen_synthetic_corpus(1, 10, (("a",), ("bc",), ("d",)))
        assert corpus.entries == ((SurfaceSegmentation("abcd", (1, 3)), 10),)

    def test_deterministic(self):
        inv = gen_inventories(3, (4, 8, 4))
        assert gen_synthetic_corpus(3, 200, inv) == gen_synthetic_corpus(3, 200, inv)

    def test_zero_words(self):
        corpus = gen_synthetic_corpus(5, 0, (("a",), ("b",), ("c",)))
        assert len(corpus) == 0

    def test_empty_inventory_rejected(self):
        with pytest.raises(ValueError, match="stems"):
            gen_synthetic_corpus(5, 3, (("a",), (), ("c",)))

    def test_boundaries_valid_and_counts_aggregate(self):
        rng = random.Random(11)
        for _ in range(20):
            inv = gen_inventories(rng.randrange(10_000), (3, 6, 3))
            corpus = gen_synthetic_corpus(rng.randrange(10_000), 80, inv)
            total = sum(count for _, count in corpus.entries)
            assert total == 80
            for seg, _ in corpus.entries:
                assert len(seg.boundaries) == 2
                assert all(0 < b < len(seg.surface) for b in seg.boundaries)

    def test_inventories_deterministic_and_distinct(self):
        a = gen_inventories(42, (20, 200, 20))
        b = gen_inventories(42, (20, 200, 20))
        assert a == b
        prefixes, stems, suffixes = a
        assert len(set(prefixes)) == 20
        assert len(set(stems)) == 200
        assert len(set(suffixes)) == 20


class TestMergeCountsWithGold:
    def test_plain_words_get_empty_boundaries(self):
        counts = read_plain_corpus(io.StringIO("ab xy xy\n"))
        gold = read_gold_file(io.StringIO("ab\ta|b\n"))
        merged = merge_counts_with_gold(counts, gold)
        by_surface = {seg.surface: (seg.boundaries, count) for seg, count in merged.entries}
        assert by_surface["ab"] == ((1,), 1)
        assert by_surface["xy"] == ((), 2)

    def test_gold_only_words_keep_their_counts(self):
        counts = read_plain_corpus(io.StringIO(""))
        gold = read_gold_file(io.StringIO("ab\ta|b\t4\n"))
        merged = merge_counts_with_gold(counts, gold)
        assert merged.entries[0][1] == 4


def test_segmented_corpus_rejects_duplicates():
    seg = SurfaceSegmentation("ab", (1,))
    with pytest.raises(ValueError, match="duplicate"):
        SegmentedCorpus(((seg, 1), (seg, 2)))
