import numpy as np
import pytest

from agcsc.data import (
    DataMatrix,
    SyntheticSpec,
    generate_union_of_subspaces,
    load_dense_matrix,
    load_labels,
    normalize_pixel_range,
    save_dense_matrix,
)


class TestLoadDenseMatrix:
    def test_single_cell_csv(self, tmp_path):
        path = tmp_path / "one.csv"
        path.write_text("0.5\n")
        X = load_dense_matrix(path, "csv")
        assert (X.n, X.d) == (1, 1)
        assert X.values[0, 0] == 0.5

    def test_binary_round_trip_bit_exact(self, tmp_path):
        values = np.random.default_rng(3).standard_normal((4, 3))
        path = tmp_path / "m.bin"
        save_dense_matrix(values, path, "raw-binary")
        loaded = load_dense_matrix(path, "raw-binary")
        assert loaded.values.shape == (4, 3)
        assert np.array_equal(loaded.values, values)

    def test_csv_round_trip_exact(self, tmp_path):
        values = np.random.default_rng(4).standard_normal((5, 2))
        path = tmp_path / "m.csv"
        save_dense_matrix(values, path, "csv")
        loaded = load_dense_matrix(path, "csv")
        assert np.array_equal(loaded.values, values)

    def test_face_dataset_sized_csv(self, tmp_path):
        values = np.random.default_rng(5).random((400, 1024))
        path = tmp_path / "faces.csv"
        save_dense_matrix(values, path, "csv")
        loaded = load_dense_matrix(path, "csv")
        assert (loaded.n, loaded.d) == (400, 1024)

    @pytest.mark.parametrize("shape", [(1, 1), (3, 7), (10, 2)])
    def test_never_truncates(self, tmp_path, shape):
        values = np.random.default_rng(6).standard_normal(shape)
        path = tmp_path / "m.csv"
        save_dense_matrix(values, path, "csv")
        loaded = load_dense_matrix(path, "csv")
        assert loaded.values.size == values.size

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_dense_matrix(tmp_path / "absent.csv", "csv")

    def test_ragged_rows_report_location(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1.0,2.0\n3.0\n")
        with pytest.raises(ValueError, match="row 2"):
            load_dense_matrix(path, "csv")

    def test_non_numeric_cell_reports_location(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1.0,oops\n")
        with pytest.raises(ValueError, match="row 1, column 2"):
            load_dense_matrix(path, "csv")

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(ValueError, match="no data"):
            load_dense_matrix(path, "csv")
        path.write_text("\n\n")
        with pytest.raises(ValueError, match="no data"):
            load_dense_matrix(path, "csv")

    def test_empty_binary(self, tmp_path):
        path = tmp_path / "empty.bin"
        path.write_bytes(b"")
        with pytest.raises(ValueError, match="no data"):
            load_dense_matrix(path, "raw-binary")

    def test_truncated_binary(self, tmp_path):
        values = np.ones((2, 2))
        path = tmp_path / "m.bin"
        save_dense_matrix(values, path, "raw-binary")
        path.write_bytes(path.read_bytes()[:-4])
        with pytest.raises(ValueError, match="expected"):
            load_dense_matrix(path, "raw-binary")

    def test_non_finite_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1.0,nan\n")
        with pytest.raises(ValueError, match="non-finite"):
            load_dense_matrix(path, "csv")

    def test_unknown_format(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("1\n")
        with pytest.raises(ValueError, match="format"):
            load_dense_matrix(path, "parquet")


class TestLoadLabels:
    def test_basic(self, tmp_path):
        path = tmp_path / "labels.csv"
        path.write_text("0\n1\n1\n2\n")
        assert np.array_equal(load_labels(path), [0, 1, 1, 2])

    def test_non_integer(self, tmp_path):
        path = tmp_path / "labels.csv"
        path.write_text("0\nx\n")
        with pytest.raises(ValueError, match="line 2"):
            load_labels(path)

    def test_empty(self, tmp_path):
        path = tmp_path / "labels.csv"
        path.write_text("\n")
        with pytest.raises(ValueError, match="no labels"):
            load_labels(path)


class TestNormalizePixelRange:
    def test_zero_matrix(self):
        X = DataMatrix(np.zeros((3, 4)))
        assert np.array_equal(normalize_pixel_range(X).values, np.zeros((3, 4)))

    def test_full_scale_maps_to_one(self):
        X = DataMatrix(np.array([[255.0]]))
        assert normalize_pixel_range(X).values[0, 0] == 1.0

    def test_pixel_range_maps_into_unit_interval(self):
        values = np.random.default_rng(0).uniform(0, 255, size=(6, 5))
        out = normalize_pixel_range(DataMatrix(values)).values
        assert out.min() >= 0.0 and out.max() <= 1.0
        assert out.shape == (6, 5)

    def test_entrywise_division(self):
        values = np.random.default_rng(1).uniform(0, 255, size=(4, 4))
        out = normalize_pixel_range(DataMatrix(values)).values
        assert np.array_equal(out, values / 255.0)

    def test_linearity(self):
        values = np.random.default_rng(2).standard_normal((5, 3))
        for a in (0.25, 2.0, -3.5):
            lhs = normalize_pixel_range(DataMatrix(a * values)).values
            rhs = a * normalize_pixel_range(DataMatrix(values)).values
            assert np.allclose(lhs, rhs, rtol=1e-15, atol=0.0)


class TestDataMatrix:
    def test_rejects_nan(self):
        values = np.ones((2, 2))
        values[1, 0] = np.nan
        with pytest.raises(ValueError, match="row 1, column 0"):
            DataMatrix(values)

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            DataMatrix(np.zeros((0, 3)))

    def test_read_only(self):
        X = DataMatrix(np.ones((2, 2)))
        with pytest.raises(ValueError):
            X.values[0, 0] = 2.0


class TestGenerateUnionOfSubspaces:
    def test_rank_one_single_subspace(self):
        spec = SyntheticSpec(k=1, n_per=8, d=5, r=1, sigma=0.0, seed=11)
        X, labels = generate_union_of_subspaces(spec)
        assert np.linalg.matrix_rank(X.values, tol=1e-10) == 1
        assert np.array_equal(labels, np.zeros(8, dtype=int))

    def test_noise_free_projection_residual(self):
        spec = SyntheticSpec(k=3, n_per=10, d=12, r=3, sigma=0.0, seed=4)
        X, labels = generate_union_of_subspaces(spec)
        for cls in range(spec.k):
            block = X.values[labels == cls]
            # top-r right singular space of the block captures every sample
            _, _, vt = np.linalg.svd(block, full_matrices=False)
            proj = block @ vt[: spec.r].T @ vt[: spec.r]
            assert np.abs(block - proj).max() < 1e-10
            assert np.linalg.matrix_rank(block, tol=1e-10) <= spec.r

    def test_deterministic(self):
        spec = SyntheticSpec(k=2, n_per=5, d=6, r=2, sigma=0.3, seed=9)
        X1, l1 = generate_union_of_subspaces(spec)
        X2, l2 = generate_union_of_subspaces(spec)
        assert np.array_equal(X1.values, X2.values)
        assert np.array_equal(l1, l2)

    def test_shapes_and_labels(self):
        spec = SyntheticSpec(k=4, n_per=3, d=7, r=2, sigma=0.1, seed=0)
        X, labels = generate_union_of_subspaces(spec)
        assert (X.n, X.d) == (12, 7)
        assert np.array_equal(np.unique(labels), np.arange(4))

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(k=2, n_per=3, d=4, r=4, sigma=0.0, seed=0),
            dict(k=2, n_per=3, d=4, r=0, sigma=0.0, seed=0),
            dict(k=0, n_per=3, d=4, r=2, sigma=0.0, seed=0),
            dict(k=2, n_per=0, d=4, r=2, sigma=0.0, seed=0),
            dict(k=2, n_per=3, d=4, r=2, sigma=-0.5, seed=0),
        ],
    )
    def test_invalid_specs(self, kwargs):
        with pytest.raises(ValueError):
            SyntheticSpec(**kwargs)
