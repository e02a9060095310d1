import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from meemi.embeddings import EmbeddingSpace
from meemi.solvers import (
    LinearMap,
    PairedData,
    apply_map,
    fit_least_squares,
    fit_procrustes,
    load_map,
    save_map,
)


def normal_equations_oracle(a, b):
    """Textbook least-squares solution, independent of the library path."""
    return np.linalg.inv(a.T @ a) @ (a.T @ b)


def random_orthogonal(dim, rng):
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    return q * np.sign(np.diag(r))


def frobenius(a):
    return float(np.sqrt((a * a).sum()))


class TestProcrustes:
    def test_identity_when_targets_equal_inputs(self):
        rng = np.random.default_rng(0)
        a = rng.standard_normal((40, 8))
        w = fit_procrustes(PairedData(a, a))
        assert w.orthogonal
        assert np.abs(w.matrix - np.eye(8)).max() <= 1e-9

    def test_recovers_random_rotation(self):
        rng = np.random.default_rng(1)
        a = rng.standard_normal((60, 10))
        r = random_orthogonal(10, rng)
        w = fit_procrustes(PairedData(a, a @ r))
        assert np.abs(w.matrix - r).max() <= 1e-6

    def test_planar_quarter_turn(self):
        a = np.array([[1.0, 0.0], [0.0, 1.0], [2.0, 3.0]])
        rotation = np.array([[0.0, 1.0], [-1.0, 0.0]])
        w = fit_procrustes(PairedData(a, a @ rotation))
        assert np.abs(w.matrix - rotation).max() <= 1e-9

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="equal dimensions"):
            fit_procrustes(PairedData(np.ones((3, 2)), np.ones((3, 4))))

    def test_non_finite_input(self):
        a = np.ones((3, 2))
        b = a.copy()
        b[0, 0] = np.nan
        with pytest.raises(ValueError, match="non-finite"):
            fit_procrustes(PairedData(a, b))

    @given(seed=st.integers(0, 10_000))
    @settings(max_examples=10)
    def test_orthogonal_and_beats_random_candidates(self, seed):
        rng = np.random.default_rng(seed)
        a = rng.standard_normal((30, 6))
        b = rng.standard_normal((30, 6))
        w = fit_procrustes(PairedData(a, b))
        assert np.abs(w.matrix.T @ w.matrix - np.eye(6)).max() <= 1e-8
        best = frobenius(a @ w.matrix - b)
        for _ in range(100):
            candidate = random_orthogonal(6, rng)
            assert best <= frobenius(a @ candidate - b) + 1e-9


class TestLeastSquares:
    def test_identity_full_rank(self):
        rng = np.random.default_rng(2)
        a = rng.standard_normal((50, 10))
        x = fit_least_squares(PairedData(a, a))
        assert not x.orthogonal
        assert np.abs(x.matrix - np.eye(10)).max() <= 1e-8

    def test_matches_normal_equations_oracle(self):
        rng = np.random.default_rng(3)
        a = rng.standard_normal((200, 20))
        b = rng.standard_normal((200, 20))
        x = fit_least_squares(PairedData(a, b))
        expected = normal_equations_oracle(a, b)
        assert frobenius(x.matrix - expected) / frobenius(expected) <= 1e-6

    def test_exact_interpolation_when_underdetermined(self):
        rng = np.random.default_rng(4)
        a = rng.standard_normal((6, 12))
        b = rng.standard_normal((6, 12))
        x = fit_least_squares(PairedData(a, b))
        assert frobenius(a @ x.matrix - b) <= 1e-8

    def test_gradient_at_optimum_vanishes(self):
        rng = np.random.default_rng(5)
        a = rng.standard_normal((80, 12))
        b = rng.standard_normal((80, 12))
        x = fit_least_squares(PairedData(a, b))
        gradient = 2.0 * a.T @ (a @ x.matrix - b)
        assert np.abs(gradient).max() <= 1e-6 * np.abs(a.T @ b).max()

    def test_rank_deficient_returns_min_norm(self):
        rng = np.random.default_rng(6)
        row = rng.standard_normal((1, 5))
        a = np.vstack([row] * 4)
        b = rng.standard_normal((4, 3))
        x = fit_least_squares(PairedData(a, b))
        # minimum-norm solution is orthogonal to the null space of A
        _, _, vt = np.linalg.svd(a)
        null_basis = vt[1:]
        assert np.abs(null_basis @ x.matrix).max() <= 1e-9

    @given(seed=st.integers(0, 10_000), scale=st.floats(0.1, 50.0))
    @settings(max_examples=25)
    def test_scale_equivariance(self, seed, scale):
        rng = np.random.default_rng(seed)
        a = rng.standard_normal((25, 5))
        b = rng.standard_normal((25, 4))
        x = fit_least_squares(PairedData(a, b)).matrix
        x_scaled = fit_least_squares(PairedData(a, scale * b)).matrix
        assert np.abs(x_scaled - scale * x).max() <= 1e-9 * max(1.0, scale)

    @given(seed=st.integers(0, 10_000))
    @settings(max_examples=25)
    def test_first_order_optimality_probe(self, seed):
        rng = np.random.default_rng(seed)
        a = rng.standard_normal((30, 6))
        b = rng.standard_normal((30, 6))
        x = fit_least_squares(PairedData(a, b)).matrix
        base = frobenius(a @ x - b)
        for _ in range(10):
            delta = 1e-4 * rng.standard_normal(x.shape)
            assert base <= frobenius(a @ (x + delta) - b) + 1e-12


class TestApplyMap:
    def space(self, seed=0, n=20, d=6):
        rng = np.random.default_rng(seed)
        return EmbeddingSpace([f"w{i}" for i in range(n)], rng.standard_normal((n, d)))

    def test_identity_map(self):
        space = self.space()
        mapped = apply_map(LinearMap(np.eye(6)), space)
        assert mapped.vocab == space.vocab
        assert np.array_equal(mapped.matrix, space.matrix)

    def test_orthogonal_preserves_norms(self):
        rng = np.random.default_rng(7)
        space = self.space(7)
        mapped = apply_map(LinearMap(random_orthogonal(6, rng), orthogonal=True), space)
        before = np.linalg.norm(space.matrix, axis=1)
        after = np.linalg.norm(mapped.matrix, axis=1)
        assert np.abs(after - before).max() <= 1e-9

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension"):
            apply_map(LinearMap(np.zeros((4, 4))), self.space())

    @given(seed=st.integers(0, 10_000))
    @settings(max_examples=25)
    def test_orthogonal_preserves_pairwise_cosines(self, seed):
        rng = np.random.default_rng(seed)
        space = self.space(seed, n=12)
        mapped = apply_map(LinearMap(random_orthogonal(6, rng), orthogonal=True), space)
        def cosines(m):
            u = m / np.linalg.norm(m, axis=1, keepdims=True)
            return u @ u.T
        assert np.abs(cosines(mapped.matrix) - cosines(space.matrix)).max() <= 1e-9


class TestLinearMapType:
    def test_orthogonal_flag_validated(self):
        with pytest.raises(ValueError, match="not orthogonal"):
            LinearMap(np.array([[1.0, 0.0], [0.0, 2.0]]), orthogonal=True)

    def test_orthogonal_must_be_square(self):
        with pytest.raises(ValueError, match="square"):
            LinearMap(np.ones((2, 3)), orthogonal=True)

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError, match="non-finite"):
            LinearMap(np.array([[np.inf]]))

    def test_paired_data_row_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            PairedData(np.ones((2, 3)), np.ones((3, 3)))

    def test_paired_data_empty(self):
        with pytest.raises(ValueError):
            PairedData(np.ones((0, 3)), np.ones((0, 3)))


class TestSerialization:
    def test_roundtrip_exact(self, tmp_path):
        rng = np.random.default_rng(8)
        original = LinearMap(rng.standard_normal((5, 3)))
        path = tmp_path / "m.map"
        save_map(original, path)
        back = load_map(path)
        assert np.array_equal(back.matrix, original.matrix)
        assert back.orthogonal is False

    def test_orthogonal_flag_survives(self, tmp_path):
        rng = np.random.default_rng(9)
        original = LinearMap(random_orthogonal(6, rng), orthogonal=True)
        path = tmp_path / "m.map"
        save_map(original, path)
        back = load_map(path)
        assert back.orthogonal is True
        assert np.array_equal(back.matrix, original.matrix)

    def test_header_format(self, tmp_path):
        path = tmp_path / "m.map"
        save_map(LinearMap(np.ones((2, 3))), path)
        assert path.read_text().splitlines()[0] == "2 3 0"

    def test_bad_header(self, tmp_path):
        path = tmp_path / "m.map"
        path.write_text("2 x 0\n1 2 3\n")
        with pytest.raises(ValueError, match="header"):
            load_map(path)

    def test_wrong_row_arity(self, tmp_path):
        path = tmp_path / "m.map"
        path.write_text("1 3 0\n1 2\n")
        with pytest.raises(ValueError, match=":2"):
            load_map(path)
