import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gof_lab import (
    DataError,
    LoadOptions,
    aggregate_evps,
    load_dataset,
    make_dataset,
    save_dataset,
)

from conftest import simulated_fit


def _write(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text)
    return path


class TestLoad:
    def test_two_rows_with_intercept_prepended(self, tmp_path):
        path = _write(tmp_path, "y,x1\n1,0.2\n0,-1.0\n")
        data = load_dataset(path)
        assert data.n == 2 and data.d == 2
        np.testing.assert_array_equal(data.X, [[1.0, 0.2], [1.0, -1.0]])
        np.testing.assert_array_equal(data.y, [1.0, 0.0])

    def test_non_binary_response(self, tmp_path):
        path = _write(tmp_path, "y,x1\n2,0.2\n")
        with pytest.raises(DataError, match="non-binary response"):
            load_dataset(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError, match="no such file"):
            load_dataset(tmp_path / "absent.csv")

    def test_non_numeric_cell_names_row(self, tmp_path):
        path = _write(tmp_path, "y,x1\n1,0.2\n0,oops\n")
        with pytest.raises(DataError, match="row 2"):
            load_dataset(path)

    def test_missing_response_column(self, tmp_path):
        path = _write(tmp_path, "resp,x1\n1,0.2\n")
        with pytest.raises(DataError, match="response column"):
            load_dataset(path)

    def test_renamed_response_column(self, tmp_path):
        path = _write(tmp_path, "outcome,x1\n1,0.5\n0,0.1\n")
        data = load_dataset(path, LoadOptions(response_column="outcome"))
        np.testing.assert_array_equal(data.y, [1.0, 0.0])

    def test_custom_delimiter(self, tmp_path):
        path = _write(tmp_path, "y;x1\n1;0.5\n0;0.1\n")
        data = load_dataset(path, LoadOptions(delimiter=";"))
        assert data.n == 2

    def test_n_less_than_d(self, tmp_path):
        path = _write(tmp_path, "y,x1,x2,x3\n1,0.1,0.2,0.3\n")
        with pytest.raises(DataError, match="n >= d"):
            load_dataset(path)

    def test_file_already_has_intercept(self, tmp_path):
        path = _write(tmp_path, "y,const,x1\n1,1,0.2\n0,1,-1.0\n")
        data = load_dataset(path, LoadOptions(add_intercept=False))
        assert data.d == 2
        np.testing.assert_array_equal(data.X[:, 0], [1.0, 1.0])

    def test_no_intercept_flag_requires_ones(self, tmp_path):
        path = _write(tmp_path, "y,x1\n1,0.2\n0,-1.0\n")
        with pytest.raises(DataError, match="not all ones"):
            load_dataset(path, LoadOptions(add_intercept=False))

    def test_ragged_row(self, tmp_path):
        path = _write(tmp_path, "y,x1\n1,0.2\n0\n")
        with pytest.raises(DataError, match="row 2"):
            load_dataset(path)

    def test_round_trip_bit_identical(self, tmp_path):
        data, _ = simulated_fit(n=500, m=50, d=5, seed=3)
        path = tmp_path / "sim.csv"
        save_dataset(data, path)
        back = load_dataset(path)
        np.testing.assert_array_equal(back.y, data.y)
        np.testing.assert_array_equal(back.X, data.X)


class TestValidation:
    def test_non_binary_rejected(self):
        with pytest.raises(DataError, match="non-binary"):
            make_dataset(np.array([0.0, 0.5]), np.ones((2, 1)))

    def test_missing_intercept_rejected(self):
        with pytest.raises(DataError, match="intercept"):
            make_dataset(np.array([0.0, 1.0]), np.array([[2.0], [1.0]]))

    def test_non_finite_rejected(self):
        X = np.array([[1.0, np.inf], [1.0, 0.0]])
        with pytest.raises(DataError, match="non-finite"):
            make_dataset(np.array([0.0, 1.0]), X)


class TestEvps:
    def test_generated_replicates(self):
        data, _ = simulated_fit(n=500, m=50, d=4, seed=5)
        out = aggregate_evps(data)
        assert out.m == 50
        assert out.replication_ratio == pytest.approx(10.0)
        assert out.trials.sum() == 500
        assert np.all(out.trials == 10)
        assert out.successes.sum() == data.y.sum()

    def test_all_rows_distinct(self, rng):
        X = np.column_stack([np.ones(20), rng.normal(size=20)])
        y = (rng.random(20) < 0.5).astype(float)
        out = aggregate_evps(make_dataset(y, X))
        assert out.m == 20
        assert out.replication_ratio == pytest.approx(1.0)

    def test_two_identical_among_three(self):
        X = np.array([[1.0, 0.5], [1.0, 0.5], [1.0, -0.3]])
        y = np.array([1.0, 0.0, 1.0])
        out = aggregate_evps(make_dataset(y, X))
        assert out.m == 2
        assert out.replication_ratio == pytest.approx(1.5)

    @given(st.permutations(list(range(9))))
    @settings(max_examples=30, deadline=None)
    def test_permutation_invariance(self, perm):
        rng = np.random.default_rng(7)
        base = rng.normal(size=(3, 2))
        X = np.column_stack([np.ones(9), np.repeat(base, 3, axis=0)])
        y = (rng.random(9) < 0.5).astype(float)
        idx = np.array(perm)
        out = aggregate_evps(make_dataset(y[idx], X[idx]))
        assert out.m == 3
        assert sorted(out.trials) == [3, 3, 3]
