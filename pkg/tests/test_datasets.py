import numpy as np
import pytest

from gspm.datasets import generate, load_csv, save_csv
from gspm.errors import InvalidArgumentError


class TestGenerate:
    def test_deterministic_given_seed(self):
        a = generate("swiss_roll", 100, seed=3)
        b = generate("swiss_roll", 100, seed=3)
        assert np.array_equal(a.samples, b.samples)

    def test_gaussians8_zero_std_on_circle(self):
        dist = generate("gaussians8", 64, seed=0, std=0.0)
        radii = np.linalg.norm(dist.samples, axis=1)
        assert np.allclose(radii, 2.0, atol=1e-12)
        angles = 2 * np.pi * np.arange(8) / 8
        centers = 2.0 * np.stack([np.cos(angles), np.sin(angles)], axis=1)
        dists = np.linalg.norm(dist.samples[:, None, :] - centers[None], axis=2).min(axis=1)
        assert np.allclose(dists, 0.0, atol=1e-12)

    def test_gaussians25_zero_std_stratified_grid(self):
        k = 3
        dist = generate("gaussians25", 25 * k, seed=1, std=0.0)
        axis = np.arange(5) - 2.0
        gx, gy = np.meshgrid(axis, axis, indexing="ij")
        grid = np.stack([gx.ravel(), gy.ravel()], axis=1)
        got = sorted(map(tuple, dist.samples))
        want = sorted(map(tuple, np.repeat(grid, k, axis=0)))
        assert got == want

    def test_component_counts_exactly_uniform(self):
        dist = generate("gaussians8", 10_000, seed=5, std=0.0)
        values, counts = np.unique(dist.samples, axis=0, return_counts=True)
        assert len(values) == 8
        assert np.all(counts == 1250)

    def test_swiss_roll_radius_range(self):
        dist = generate("swiss_roll", 10_000, seed=9, jitter=0.0)
        radii = np.linalg.norm(dist.samples, axis=1)
        # parametric curve spans radius scale/3 .. scale
        assert radii.min() == pytest.approx(2.0 / 3.0, rel=0.05)
        assert radii.max() == pytest.approx(2.0, rel=0.05)

    def test_gaussian_init_dimension_and_scale(self):
        dist = generate("gaussian_init", 20_000, seed=2, init_scale=0.5, dim=3)
        assert dist.samples.shape == (20_000, 3)
        assert dist.samples.std() == pytest.approx(0.5, rel=0.05)

    def test_unknown_dataset(self):
        with pytest.raises(InvalidArgumentError):
            generate("spiral", 10, seed=0)

    def test_nonpositive_count(self):
        with pytest.raises(InvalidArgumentError):
            generate("gaussians8", 0, seed=0)

    def test_unknown_parameter(self):
        with pytest.raises(InvalidArgumentError):
            generate("gaussians8", 10, seed=0, bogus=1.0)


class TestCsv:
    def test_small_file(self, tmp_path):
        path = tmp_path / "two.csv"
        path.write_text("0,0\n1,1\n")
        dist = load_csv(path)
        assert dist.n == 2 and dist.dim == 2
        assert np.array_equal(dist.samples, [[0.0, 0.0], [1.0, 1.0]])

    def test_header_detected(self, tmp_path):
        path = tmp_path / "h.csv"
        path.write_text("x,y\n0.5,1.5\n")
        dist = load_csv(path)
        assert dist.n == 1
        assert dist.samples[0, 1] == 1.5

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(InvalidArgumentError, match="no samples"):
            load_csv(path)

    def test_malformed_row_reports_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("0,0\n1,oops\n")
        with pytest.raises(InvalidArgumentError, match="line 2"):
            load_csv(path)

    def test_inconsistent_columns_reports_line(self, tmp_path):
        path = tmp_path / "ragged.csv"
        path.write_text("0,0\n1,2,3\n")
        with pytest.raises(InvalidArgumentError, match="line 2"):
            load_csv(path)

    def test_round_trip_exact(self, tmp_path):
        dist = generate("swiss_roll", 50, seed=4)
        path = tmp_path / "roll.csv"
        save_csv(path, dist)
        back = load_csv(path)
        # 17 significant digits reproduce doubles exactly
        assert np.array_equal(back.samples, dist.samples)
