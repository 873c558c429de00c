import time

import numpy as np
import pytest

from eigenseg.energy import approx_energy
from eigenseg.imagecore import IndexedImage, Labeling, RawImage, quantize_gray
from eigenseg.oracle_small import build_small_oracle
from eigenseg.smoothness import build_smoothness

from conftest import (
    constant_graph,
    entrywise_small_matrix,
    random_labeling,
    random_scene,
)


def indexed(classes, width=None, height=1):
    class_of = np.asarray(classes, dtype=np.int64)
    width = len(class_of) if width is None else width
    counts = np.bincount(class_of)
    means = np.repeat(np.arange(len(counts), dtype=float)[:, None] * 40, 3, axis=1)
    return IndexedImage(width, height, class_of, counts, means)


def graph_for(width, height, **kwargs):
    img = RawImage(width, height, np.zeros((height, width, 3), dtype=np.uint8))
    return build_smoothness(img, **kwargs)


class TestEntries:
    def test_constant_2x2_lambda0_vanishes(self):
        oracle = build_small_oracle(indexed([0, 0, 0, 0], 2, 2), graph_for(2, 2), 0.0)
        dense = oracle.materialize_dense()
        assert np.allclose(dense, 0.0, atol=1e-15)
        assert oracle.total_weight_sum == pytest.approx(0.0, abs=1e-12)

    def test_two_colors_lambda0(self):
        oracle = build_small_oracle(indexed([0, 1]), graph_for(2, 1), 0.0)
        assert np.allclose(
            oracle.materialize_dense(), [[0.0, -1.25], [-1.25, 0.0]], atol=1e-15
        )

    def test_adjacent_same_color_with_smoothness(self):
        # -5/4 + 5/4 + 1 = 1 for two same-color adjacent pixels at lambda=1
        oracle = build_small_oracle(indexed([0, 0]), graph_for(2, 1), 1.0)
        dense = oracle.materialize_dense()
        assert dense[0, 1] == pytest.approx(1.0)
        assert dense[1, 1] == 0.0

    def test_one_pixel(self):
        oracle = build_small_oracle(indexed([0]), graph_for(1, 1), 1.0)
        assert oracle.materialize_dense().tolist() == [[0.0]]

    def test_matches_entrywise_rule(self, rng):
        raw, img = random_scene(rng, max_pixels=56)
        graph = build_smoothness(raw, mode="exponential")
        oracle = build_small_oracle(img, graph, 2.0)
        expected = entrywise_small_matrix(img, graph, 2.0)
        assert np.abs(oracle.materialize_dense() - expected).max() <= 1e-12

    def test_dense_symmetric_exactly(self, rng):
        raw, img = random_scene(rng, max_pixels=50)
        oracle = build_small_oracle(img, constant_graph(raw), 1.0)
        dense = oracle.materialize_dense()
        assert np.array_equal(dense, dense.T)

    def test_total_weight_matches_dense(self, rng):
        for lam in (0.0, 1.0, 10.0):
            raw, img = random_scene(rng, max_pixels=100)
            oracle = build_small_oracle(img, constant_graph(raw), lam)
            assert oracle.total_weight_sum == pytest.approx(
                float(oracle.materialize_dense().sum()), abs=1e-9
            )

    def test_cap_and_size_errors(self, rng):
        raw, img = random_scene(rng, max_pixels=64)
        oracle = build_small_oracle(img, constant_graph(raw), 0.0)
        with pytest.raises(ValueError):
            oracle.materialize_dense(cap=img.total - 1)
        with pytest.raises(ValueError):
            build_small_oracle(img, graph_for(img.total + 1, 1), 0.0)


class TestMatvec:
    def test_ones_on_2x2_constant(self):
        oracle = build_small_oracle(indexed([0, 0, 0, 0], 2, 2), graph_for(2, 2), 1.0)
        out = oracle.matvec(np.ones(4))
        assert np.allclose(out, 2.0, atol=1e-12)

    def test_zero_vector(self):
        oracle = build_small_oracle(indexed([0, 1]), graph_for(2, 1), 0.0)
        assert np.allclose(oracle.matvec(np.zeros(2)), 0.0)

    def test_two_pixel_swap(self, rng):
        oracle = build_small_oracle(indexed([0, 1]), graph_for(2, 1), 0.0)
        r = rng.standard_normal(2)
        out = oracle.matvec(r)
        assert out[0] == pytest.approx(-1.25 * r[1], abs=1e-12)
        assert out[1] == pytest.approx(-1.25 * r[0], abs=1e-12)

    def test_matches_dense_random(self, rng):
        for _ in range(20):
            gray = bool(rng.integers(2))
            raw, img = random_scene(rng, max_pixels=300, gray=gray)
            lam = float(rng.choice([0.0, 1.0, 10.0]))
            graph = build_smoothness(raw, mode="exponential")
            oracle = build_small_oracle(img, graph, lam)
            dense = oracle.materialize_dense()
            r = rng.standard_normal(img.total)
            err = np.abs(oracle.matvec(r) - dense @ r).max()
            assert err <= 1e-9 * (1.0 + np.abs(r).max())

    def test_linearity(self, rng):
        raw, img = random_scene(rng, max_pixels=200)
        oracle = build_small_oracle(img, constant_graph(raw), 1.0)
        r = rng.standard_normal(img.total)
        s = rng.standard_normal(img.total)
        a, b = 0.7, -2.1
        lhs = oracle.matvec(a * r + b * s)
        rhs = a * oracle.matvec(r) + b * oracle.matvec(s)
        assert np.abs(lhs - rhs).max() <= 1e-9

    def test_length_mismatch(self):
        oracle = build_small_oracle(indexed([0, 1]), graph_for(2, 1), 0.0)
        with pytest.raises(ValueError):
            oracle.matvec(np.zeros(3))

    def test_linear_time_scaling(self):
        times = []
        for side in (64, 91):  # n roughly doubles, class count fixed at 16
            rng = np.random.default_rng(1)
            g = rng.integers(0, 256, size=(side, side, 1))
            raw = RawImage(side, side, np.repeat(g, 3, axis=2).astype(np.uint8))
            img = quantize_gray(raw, 16)
            oracle = build_small_oracle(img, constant_graph(raw), 1.0)
            r = rng.standard_normal(img.total)
            for _ in range(5):
                oracle.matvec(r)
            best = min(
                _timed(oracle.matvec, r, loops=150) for _ in range(5)
            )
            times.append(best)
        assert times[1] <= 2.75 * times[0]


def _timed(fn, arg, loops):
    t0 = time.perf_counter()
    for _ in range(loops):
        fn(arg)
    return (time.perf_counter() - t0) / loops


class TestCut:
    def test_uniform_cut_is_zero(self):
        oracle = build_small_oracle(indexed([0, 0, 1, 1]), graph_for(4, 1), 1.0)
        assert oracle.cut_value(Labeling.uniform(4, True)) == pytest.approx(0.0, abs=1e-12)

    def test_two_pixel_split(self):
        oracle = build_small_oracle(indexed([0, 1]), graph_for(2, 1), 0.0)
        assert oracle.cut_value(Labeling(np.array([True, False]))) == pytest.approx(-1.25)

    def test_matches_dense_cross_sum(self, rng):
        for _ in range(15):
            raw, img = random_scene(rng, max_pixels=120)
            lam = float(rng.choice([0.0, 1.0, 10.0]))
            oracle = build_small_oracle(img, constant_graph(raw), lam)
            dense = oracle.materialize_dense()
            lab = random_labeling(rng, img.total)
            brute = float(dense[np.ix_(lab.fore, ~lab.fore)].sum())
            assert oracle.cut_value(lab) == pytest.approx(brute, abs=1e-10)

    def test_energy_cut_identity(self, rng):
        for _ in range(20):
            raw, img = random_scene(rng, max_pixels=200)
            graph = constant_graph(raw)
            lam = float(rng.choice([0.0, 1.0, 10.0]))
            oracle = build_small_oracle(img, graph, lam)
            l1 = random_labeling(rng, img.total)
            l2 = random_labeling(rng, img.total)
            d_energy = approx_energy(img, l1, graph, lam) - approx_energy(img, l2, graph, lam)
            d_cut = oracle.cut_value(l1) - oracle.cut_value(l2)
            assert abs(d_energy - d_cut) <= 1e-8

    def test_cut_flip_invariance(self, rng):
        raw, img = random_scene(rng, max_pixels=100)
        oracle = build_small_oracle(img, constant_graph(raw), 1.0)
        lab = random_labeling(rng, img.total)
        assert oracle.cut_value(lab) == pytest.approx(oracle.cut_value(lab.flipped()), abs=1e-10)
