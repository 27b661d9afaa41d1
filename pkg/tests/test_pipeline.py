"""CSV loading, cleaning, stratified splitting and class stats."""

import numpy as np
import pandas as pd
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ids1d.errors import ConfigError, DataError
from ids1d.pipeline import (
    PrepSchema,
    class_stats,
    clean,
    load_csv,
    stratified_split_indices,
)


def write_csv(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadCsv:
    def test_well_formed(self, tmp_path):
        path = write_csv(tmp_path, "a,b\n1,x\n2,y\n3,z\n")
        table = load_csv(path)
        assert len(table) == 3
        assert list(table.columns) == ["a", "b"]
        assert table["a"].dtype.kind in "if"  # numeric cells become numbers

    def test_missing_cells_become_nan(self, tmp_path):
        path = write_csv(tmp_path, "a,b\n1,\n2,y\n")
        table = load_csv(path)
        assert table["b"].isna().sum() == 1

    def test_ragged_row_names_row(self, tmp_path):
        path = write_csv(tmp_path, "a,b\n1,2\n1,2,3\n")
        with pytest.raises(DataError, match="3"):
            load_csv(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError, match="no such file"):
            load_csv(tmp_path / "nope.csv")

    def test_empty_table(self, tmp_path):
        path = write_csv(tmp_path, "a,b\n")
        with pytest.raises(DataError, match="empty"):
            load_csv(path)


class TestClean:
    def schema(self, drop=()):
        return PrepSchema(label_column="y", drop_columns=list(drop))

    def test_no_op_table_unchanged(self):
        df = pd.DataFrame({"a": [1, 2], "y": ["p", "q"]})
        out, stats = clean(df, self.schema())
        pd.testing.assert_frame_equal(out, df)
        assert stats.dropped_nan == 0 and stats.dropped_duplicates == 0

    def test_duplicates_keep_first(self):
        df = pd.DataFrame({"a": [1, 1, 2], "y": ["p", "p", "q"]})
        out, stats = clean(df, self.schema())
        assert len(out) == 2
        assert stats.dropped_duplicates == 1

    def test_nan_rows_dropped_before_dedup(self):
        df = pd.DataFrame({"a": [1, None, 1], "y": ["p", "p", "p"]})
        out, stats = clean(df, self.schema())
        assert stats.dropped_nan == 1
        assert stats.dropped_duplicates == 1
        assert len(out) == 1

    def test_drop_columns_first(self):
        # rows identical only once the dropped column is gone
        df = pd.DataFrame({"id": [1, 2], "a": [5, 5], "y": ["p", "p"]})
        out, stats = clean(df, self.schema(drop=["id"]))
        assert len(out) == 1
        assert "id" not in out.columns

    def test_unknown_column_rejected(self):
        df = pd.DataFrame({"a": [1], "y": ["p"]})
        with pytest.raises(ConfigError, match="nope"):
            clean(df, self.schema(drop=["nope"]))

    def test_idempotent(self):
        df = pd.DataFrame({
            "a": [1, 1, None, 2, 2], "y": ["p", "p", "p", "q", "q"],
        })
        once, _ = clean(df, self.schema())
        twice, _ = clean(once, PrepSchema(label_column="y"))
        pd.testing.assert_frame_equal(once, twice)

    @given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)),
                    min_size=1, max_size=30))
    @settings(max_examples=50, deadline=None)
    def test_idempotence_property(self, rows):
        df = pd.DataFrame(rows, columns=["a", "y"])
        schema = PrepSchema(label_column="y")
        once, _ = clean(df, schema)
        twice, _ = clean(once, schema)
        pd.testing.assert_frame_equal(once, twice)


class TestSplit:
    def test_balanced_two_class(self):
        labels = np.repeat([0, 1], 50)
        tr, te = stratified_split_indices(labels, 0.8, seed=0)
        assert len(tr) == 80 and len(te) == 20
        for cls in (0, 1):
            assert (labels[tr] == cls).sum() == 40
            assert (labels[te] == cls).sum() == 10

    def test_deterministic(self):
        labels = np.random.default_rng(0).integers(0, 5, 200)
        a = stratified_split_indices(labels, 0.7, seed=9)
        b = stratified_split_indices(labels, 0.7, seed=9)
        np.testing.assert_array_equal(a[0], b[0])
        np.testing.assert_array_equal(a[1], b[1])

    def test_partition(self):
        labels = np.random.default_rng(1).integers(0, 4, 137)
        tr, te = stratified_split_indices(labels, 0.8, seed=2)
        combined = np.sort(np.concatenate([tr, te]))
        np.testing.assert_array_equal(combined, np.arange(137))

    def test_imbalanced_per_class_fractions(self):
        # skewed distribution: each class's test count within 1 of 20%
        counts = {0: 500, 1: 60, 2: 11, 3: 5}
        labels = np.concatenate([np.full(n, c) for c, n in counts.items()])
        tr, te = stratified_split_indices(labels, 0.8, seed=0)
        for cls, n in counts.items():
            n_test = (labels[te] == cls).sum()
            assert abs(n_test - 0.2 * n) <= 1

    def test_singleton_class_goes_to_train(self):
        labels = np.array([0, 0, 0, 0, 1])
        with pytest.warns(UserWarning, match="assigned to train"):
            tr, te = stratified_split_indices(labels, 0.8, seed=0)
        assert 4 in tr and 4 not in te

    def test_bad_fraction(self):
        with pytest.raises(ConfigError):
            stratified_split_indices(np.array([0, 1]), 1.0, seed=0)

    @given(st.lists(st.integers(0, 3), min_size=4, max_size=100),
           st.integers(0, 1000))
    @settings(max_examples=50, deadline=None)
    def test_partition_property(self, label_list, seed):
        labels = np.array(label_list)
        import warnings
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            tr, te = stratified_split_indices(labels, 0.8, seed=seed)
        combined = np.sort(np.concatenate([tr, te]))
        np.testing.assert_array_equal(combined, np.arange(len(labels)))


class TestClassStats:
    def test_single_class(self):
        out = class_stats(np.zeros(5, dtype=int), ["only"])
        assert len(out) == 1
        assert out.iloc[0]["count"] == 5
        assert out.iloc[0]["fraction"] == 1.0

    def test_empty(self):
        out = class_stats(np.array([], dtype=int), [])
        assert len(out) == 0
        assert list(out.columns) == ["class", "count", "fraction"]

    def test_counts_sum_to_n(self):
        labels = np.random.default_rng(0).integers(0, 3, 60)
        out = class_stats(labels, ["a", "b", "c"])
        assert out["count"].sum() == 60
        assert abs(out["fraction"].sum() - 1.0) < 1e-12
