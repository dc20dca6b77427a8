"""File formats: matrices, outcomes, configs, atomic writes."""

import numpy as np
import pytest

from ratiomarker.composition import StrictlyPositiveMatrix
from ratiomarker.errors import ParseError, ValidationError
from ratiomarker.tabular import (
    atomic_write_text,
    infer_outcome_kind,
    outcome_for_matrix,
    read_config,
    read_matrix,
    read_outcome_pairs,
    write_config,
    write_matrix,
    write_outcome,
)


def small_matrix():
    rng = np.random.default_rng(11)
    vals = np.exp(rng.normal(0.0, 1.0, (4, 3)))
    return StrictlyPositiveMatrix(
        vals, ["s1", "s2", "s3", "s4"], ["fa", "fb", "fc"]
    )


class TestMatrixRoundTrip:
    def test_values_and_ids_survive(self, tmp_path):
        m = small_matrix()
        path = tmp_path / "m.tsv"
        write_matrix(path, m)
        back = read_matrix(path)
        assert back.sample_ids == m.sample_ids
        assert back.feature_ids == m.feature_ids
        np.testing.assert_array_equal(back.values, m.values)

    def test_repr_floats_round_trip_exactly(self, tmp_path):
        # repr of a float parses back to the identical bits, so a write and
        # re-read must be lossless, not merely close.
        vals = np.array([[0.1, 1.0 / 3.0], [np.pi, 2.0 ** -40]])
        m = StrictlyPositiveMatrix(vals, ["a", "b"], ["x", "y"])
        path = tmp_path / "m.tsv"
        write_matrix(path, m)
        back = read_matrix(path)
        assert np.array_equal(back.values, vals)

    def test_comma_delimited_accepted(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("sample_id,x,y\ns1,1.0,2.0\ns2,3.0,4.0\n")
        m = read_matrix(path)
        assert m.feature_ids == ["x", "y"]
        np.testing.assert_array_equal(m.values, [[1.0, 2.0], [3.0, 4.0]])


class TestMatrixParseErrors:
    def test_bad_cell_reports_position(self, tmp_path):
        path = tmp_path / "m.tsv"
        path.write_text("sample_id\tx\ty\ns1\t1.0\toops\n")
        with pytest.raises(ParseError) as exc:
            read_matrix(path)
        msg = str(exc.value)
        assert "row 2" in msg
        assert "column 3" in msg

    def test_negative_cell_rejected(self, tmp_path):
        path = tmp_path / "m.tsv"
        path.write_text("sample_id\tx\ty\ns1\t1.0\t-2.0\n")
        with pytest.raises(ParseError):
            read_matrix(path)

    def test_nan_cell_rejected(self, tmp_path):
        path = tmp_path / "m.tsv"
        path.write_text("sample_id\tx\ty\ns1\tnan\t2.0\n")
        with pytest.raises(ParseError):
            read_matrix(path)

    def test_ragged_row_rejected(self, tmp_path):
        path = tmp_path / "m.tsv"
        path.write_text("sample_id\tx\ty\ns1\t1.0\n")
        with pytest.raises(ParseError):
            read_matrix(path)

    def test_single_feature_rejected(self, tmp_path):
        path = tmp_path / "m.tsv"
        path.write_text("sample_id\tx\ns1\t1.0\n")
        with pytest.raises(ParseError):
            read_matrix(path)

    def test_missing_file_is_validation_error(self, tmp_path):
        with pytest.raises(ValidationError):
            read_matrix(tmp_path / "nope.tsv")


class TestOutcomeIo:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "y.tsv"
        write_outcome(path, ["s1", "s2", "s3"], [0.0, 1.0, 1.0])
        ids, values = read_outcome_pairs(path)
        assert ids == ["s1", "s2", "s3"]
        np.testing.assert_array_equal(values, [0.0, 1.0, 1.0])

    def test_header_row_is_skipped(self, tmp_path):
        path = tmp_path / "y.tsv"
        path.write_text("sample_id\toutcome\ns1\t0\ns2\t1\n")
        ids, values = read_outcome_pairs(path)
        assert ids == ["s1", "s2"]

    def test_negative_value_rejected(self, tmp_path):
        # The file format carries abundance-like values only; negative
        # continuous outcomes must be constructed through the API.
        path = tmp_path / "y.tsv"
        path.write_text("s1\t0.5\ns2\t-1.0\n")
        with pytest.raises(ParseError):
            read_outcome_pairs(path)

    def test_nan_outcome_rejected(self, tmp_path):
        path = tmp_path / "y.tsv"
        path.write_text("s1\t0.5\ns2\tnan\n")
        with pytest.raises(ParseError):
            read_outcome_pairs(path)

    def test_kind_inference(self):
        assert infer_outcome_kind(np.array([0.0, 1.0, 0.0])) == "binary"
        assert infer_outcome_kind(np.array([0.0, 0.5])) == "continuous"

    def test_alignment_reorders_to_matrix(self):
        m = small_matrix()
        out = outcome_for_matrix(
            m, ["s4", "s2", "s1", "s3"], [1.0, 0.0, 1.0, 0.0]
        )
        # s1, s2, s3, s4 order.
        np.testing.assert_array_equal(out.values, [1.0, 0.0, 0.0, 1.0])

    def test_missing_sample_rejected(self):
        m = small_matrix()
        with pytest.raises(ValidationError):
            outcome_for_matrix(m, ["s1", "s2"], [0.0, 1.0])

    def test_extra_samples_ignored(self):
        m = small_matrix()
        out = outcome_for_matrix(
            m,
            ["s1", "s2", "s3", "s4", "s99"],
            [0.0, 1.0, 0.0, 1.0, 1.0],
        )
        assert out.n == 4


class TestConfigIo:
    def test_key_value_with_comments(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("# settings\nfolds = 5\n\nseed=3\n")
        assert read_config(path) == {"folds": "5", "seed": "3"}

    def test_round_trip(self, tmp_path):
        path = tmp_path / "run.cfg"
        write_config(path, {"alpha": "0.05", "mode": "balance"})
        assert read_config(path) == {"alpha": "0.05", "mode": "balance"}

    def test_manifest_json_config_reused(self, tmp_path):
        path = tmp_path / "manifest.json"
        path.write_text(
            '{"version": "0.1.0", "config": {"seed": 7, "mode": "slr"}}'
        )
        assert read_config(path) == {"seed": "7", "mode": "slr"}

    def test_bare_line_rejected(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("seed\n")
        with pytest.raises(ParseError):
            read_config(path)


class TestAtomicWrite:
    def test_no_temp_file_left(self, tmp_path):
        path = tmp_path / "out.txt"
        atomic_write_text(path, "hello\n")
        assert path.read_text() == "hello\n"
        assert list(tmp_path.iterdir()) == [path]

    def test_overwrites_in_place(self, tmp_path):
        path = tmp_path / "out.txt"
        atomic_write_text(path, "one\n")
        atomic_write_text(path, "two\n")
        assert path.read_text() == "two\n"
