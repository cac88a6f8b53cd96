"""Embedding table, noun features, and file-format round-trip tests."""

import io

import numpy as np
import pytest

from motioncodes import (
    DatasetParseError,
    DimensionMismatchError,
    EmbeddingTable,
    FeatureRecord,
    build_features,
    embed_nouns,
    load_dataset,
    load_embeddings,
    parse_code,
    save_dataset,
    save_embeddings,
)


def small_table():
    table = EmbeddingTable(3)
    table.add("cup", [1.0, 0.0, 0.0])
    table.add("pan", [0.0, 2.0, 0.0])
    table.add("lid", [0.0, 0.0, 4.0])
    return table


class TestEmbeddingTable:
    def test_membership_is_case_insensitive(self):
        table = small_table()
        assert "CUP" in table
        assert " Pan " in table
        assert "bowl" not in table
        np.testing.assert_array_equal(table["Cup"], [1.0, 0.0, 0.0])

    def test_tokens_sorted(self):
        assert small_table().tokens() == ["cup", "lid", "pan"]

    def test_wrong_dimension_rejected(self):
        with pytest.raises(DimensionMismatchError):
            small_table().add("bowl", [1.0, 2.0])

    def test_blank_token_rejected(self):
        with pytest.raises(ValueError):
            small_table().add("   ", [1.0, 2.0, 3.0])

    def test_dimension_must_be_positive(self):
        with pytest.raises(ValueError):
            EmbeddingTable(0)


class TestEmbedNouns:
    def test_mean_of_known_tokens(self):
        vec, unknown = embed_nouns(small_table(), ["cup", "pan"])
        np.testing.assert_allclose(vec, [0.5, 1.0, 0.0])
        assert unknown == 0

    def test_unknown_tokens_counted_not_averaged(self):
        vec, unknown = embed_nouns(small_table(), ["cup", "spatula", "whisk"])
        np.testing.assert_allclose(vec, [1.0, 0.0, 0.0])
        assert unknown == 2

    def test_all_unknown_gives_zeros(self):
        vec, unknown = embed_nouns(small_table(), ["spoon"])
        np.testing.assert_array_equal(vec, np.zeros(3))
        assert unknown == 1

    def test_no_nouns_gives_zeros(self):
        vec, unknown = embed_nouns(small_table(), [])
        np.testing.assert_array_equal(vec, np.zeros(3))
        assert unknown == 0

    def test_repeated_noun_weighs_twice(self):
        vec, _ = embed_nouns(small_table(), ["cup", "cup", "pan"])
        np.testing.assert_allclose(vec, [2 / 3, 2 / 3, 0.0])


class TestFeatureRecord:
    def test_coerces_to_float_vectors(self):
        record = FeatureRecord("r0", [1, 2], [3, 4])
        assert record.rgb.dtype == float
        np.testing.assert_array_equal(record.flow, [3.0, 4.0])

    def test_modality_lengths_must_match(self):
        with pytest.raises(DimensionMismatchError):
            FeatureRecord("r0", [1.0, 2.0], [1.0, 2.0, 3.0])

    def test_features_must_be_flat(self):
        with pytest.raises(DimensionMismatchError):
            FeatureRecord("r0", [[1.0], [2.0]], [[1.0], [2.0]])


class TestBuildFeatures:
    def test_visual_only(self):
        record = FeatureRecord("r0", [1.0, 2.0], [3.0, 4.0], nouns=["cup"])
        np.testing.assert_array_equal(build_features(record, "rgb"), [1.0, 2.0])
        np.testing.assert_array_equal(build_features(record, "flow"), [3.0, 4.0])

    def test_noun_mean_appended(self):
        record = FeatureRecord("r0", [1.0, 2.0], [3.0, 4.0], nouns=["cup", "pan"])
        features = build_features(record, "rgb", small_table(), use_nouns=True)
        np.testing.assert_allclose(features, [1.0, 2.0, 0.5, 1.0, 0.0])

    def test_unknown_nouns_append_zeros(self):
        record = FeatureRecord("r0", [1.0, 2.0], [3.0, 4.0], nouns=["spoon"])
        features = build_features(record, "flow", small_table(), use_nouns=True)
        np.testing.assert_array_equal(features, [3.0, 4.0, 0.0, 0.0, 0.0])

    def test_bad_modality(self):
        record = FeatureRecord("r0", [1.0], [1.0])
        with pytest.raises(ValueError):
            build_features(record, "depth")

    def test_nouns_need_a_table(self):
        record = FeatureRecord("r0", [1.0], [1.0])
        with pytest.raises(ValueError):
            build_features(record, "rgb", None, use_nouns=True)


class TestEmbeddingFiles:
    def test_round_trip_with_header(self, tmp_path):
        path = tmp_path / "vectors.txt"
        save_embeddings(small_table(), path)
        first = path.read_text().splitlines()[0]
        assert first == "3 3"
        loaded = load_embeddings(path)
        assert loaded.dimension == 3
        assert loaded.tokens() == ["cup", "lid", "pan"]
        np.testing.assert_array_equal(loaded["pan"], [0.0, 2.0, 0.0])

    def test_round_trip_without_header(self, tmp_path):
        path = tmp_path / "vectors.txt"
        save_embeddings(small_table(), path, header=False)
        loaded = load_embeddings(path)
        assert len(loaded) == 3

    def test_round_trip_preserves_floats_exactly(self, tmp_path):
        table = EmbeddingTable(2)
        table.add("x", [1 / 3, -2.5e-17])
        path = tmp_path / "vectors.txt"
        save_embeddings(table, path)
        np.testing.assert_array_equal(load_embeddings(path)["x"], table["x"])

    def test_header_detection_skips_two_int_line(self):
        loaded = load_embeddings(io.StringIO("2 2\na 1 2\nb 3 4\n"))
        assert len(loaded) == 2
        assert loaded.dimension == 2

    def test_two_column_vector_line_is_not_a_header(self):
        # A one-dimensional table's first row also has two fields; only an
        # all-integer pair counts as a header.
        loaded = load_embeddings(io.StringIO("a 1.5\nb 2.5\n"))
        assert loaded.dimension == 1
        np.testing.assert_array_equal(loaded["a"], [1.5])

    def test_empty_source_rejected(self):
        with pytest.raises(DatasetParseError):
            load_embeddings(io.StringIO("\n\n"))

    def test_token_without_values_names_line(self):
        with pytest.raises(DatasetParseError, match="line 2"):
            load_embeddings(io.StringIO("a 1 2\nb\n"))

    def test_bad_float_names_line(self):
        with pytest.raises(DatasetParseError, match="line 1"):
            load_embeddings(io.StringIO("a 1 x\n"))

    def test_ragged_rows_rejected(self):
        with pytest.raises(DimensionMismatchError, match="line 2"):
            load_embeddings(io.StringIO("a 1 2\nb 1 2 3\n"))


class TestDatasetFiles:
    def records(self):
        return [
            FeatureRecord("r0", [1.0, 2.0], [3.0, 4.0], ["cup"],
                          parse_code("000-0-00-01-0")),
            FeatureRecord("r1", [5.0, 6.0], [7.0, 8.0], [], None),
        ]

    def test_round_trip(self, tmp_path):
        path = tmp_path / "data.jsonl"
        save_dataset(self.records(), path)
        loaded = load_dataset(path)
        assert [r.id for r in loaded] == ["r0", "r1"]
        np.testing.assert_array_equal(loaded[0].rgb, [1.0, 2.0])
        np.testing.assert_array_equal(loaded[1].flow, [7.0, 8.0])
        assert loaded[0].nouns == ["cup"]
        assert str(loaded[0].label) == "000-0-00-01-0"
        assert loaded[1].label is None

    def test_unlabeled_records_omit_code_field(self, tmp_path):
        path = tmp_path / "data.jsonl"
        save_dataset(self.records(), path)
        lines = path.read_text().splitlines()
        assert "code" in lines[0]
        assert "code" not in lines[1]

    def test_blank_lines_skipped(self):
        text = '\n{"id": "r0", "rgb": [1.0], "flow": [2.0]}\n\n'
        records = load_dataset(io.StringIO(text))
        assert len(records) == 1
        assert records[0].nouns == []

    def test_invalid_json_names_line(self):
        text = '{"id": "r0", "rgb": [1.0], "flow": [2.0]}\nnot json\n'
        with pytest.raises(DatasetParseError, match="line 2"):
            load_dataset(io.StringIO(text))

    def test_missing_field_names_line(self):
        with pytest.raises(DatasetParseError, match="line 1"):
            load_dataset(io.StringIO('{"id": "r0", "rgb": [1.0]}\n'))

    def test_bad_code_names_line(self):
        text = '{"id": "r0", "rgb": [1.0], "flow": [2.0], "code": "bad"}\n'
        with pytest.raises(DatasetParseError, match="line 1"):
            load_dataset(io.StringIO(text))

    def test_bad_nouns_rejected(self):
        text = '{"id": "r0", "rgb": [1.0], "flow": [2.0], "nouns": "cup"}\n'
        with pytest.raises(DatasetParseError):
            load_dataset(io.StringIO(text))

    def test_cross_record_dimension_checked(self):
        text = ('{"id": "r0", "rgb": [1.0], "flow": [2.0]}\n'
                '{"id": "r1", "rgb": [1.0, 2.0], "flow": [3.0, 4.0]}\n')
        with pytest.raises(DimensionMismatchError, match="line 2"):
            load_dataset(io.StringIO(text))

    def test_empty_file_gives_no_records(self):
        assert load_dataset(io.StringIO("")) == []
