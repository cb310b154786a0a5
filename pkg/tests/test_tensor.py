import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fst.errors import ChannelMismatch, ShapeMismatch
from fst.tensor import as_fmap, channel_stats, content_loss, gram_loss, gram_matrix

SQUARE = np.array([[[1.0, 2.0], [3.0, 4.0]]])


def _loop_stats(f):
    c, h, w = f.shape
    n = h * w
    mean = [sum(f[k, i, j] for i in range(h) for j in range(w)) / n for k in range(c)]
    cov = np.zeros((c, c))
    for a in range(c):
        for b in range(c):
            cov[a, b] = sum((f[a, i, j] - mean[a]) * (f[b, i, j] - mean[b])
                            for i in range(h) for j in range(w)) / n
    return np.array(mean), cov


def test_channel_stats_square_matches_direct_summation():
    mean, cov = _loop_stats(SQUARE)
    assert mean.tolist() == [2.5] and cov.tolist() == [[1.25]]
    s = channel_stats(SQUARE)
    np.testing.assert_allclose(s.mean, [2.5], rtol=0, atol=1e-15)
    np.testing.assert_allclose(s.cov, [[1.25]], rtol=0, atol=1e-15)


def test_channel_stats_constant_and_duplicate():
    s = channel_stats(np.full((3, 4, 5), 7.25))
    np.testing.assert_array_equal(s.mean, [7.25] * 3)
    np.testing.assert_array_equal(s.cov, np.zeros((3, 3)))

    ch = np.random.default_rng(0).standard_normal((1, 6, 5))
    s = channel_stats(np.concatenate([ch, ch]))
    assert s.cov[0, 0] == s.cov[0, 1] == s.cov[1, 1]


def test_channel_stats_matches_loop_oracle(rng):
    f = rng.standard_normal((3, 5, 4))
    mean, cov = _loop_stats(f)
    s = channel_stats(f)
    np.testing.assert_allclose(s.mean, mean, rtol=1e-12)
    np.testing.assert_allclose(s.cov, cov, rtol=1e-12, atol=1e-14)


def test_gram_matrix_examples():
    np.testing.assert_array_equal(gram_matrix(SQUARE), [[30.0]])
    np.testing.assert_array_equal(gram_matrix(np.zeros((2, 3, 3))), np.zeros((2, 2)))
    g = gram_matrix(np.concatenate([SQUARE, SQUARE]))
    assert len(set(g.ravel().tolist())) == 1


def test_content_loss_examples(rng):
    assert content_loss(SQUARE, SQUARE) == 0.0
    assert content_loss(SQUARE, np.zeros_like(SQUARE)) == 30.0
    a, b = rng.standard_normal((2, 3, 4, 4))
    assert content_loss(a, b) == content_loss(b, a)
    with pytest.raises(ShapeMismatch):
        content_loss(a, b[:, :3])


def test_gram_loss_examples(rng):
    assert gram_loss(SQUARE, SQUARE) == 0.0
    assert gram_loss(SQUARE, np.zeros_like(SQUARE)) == 900.0
    a = rng.standard_normal((3, 6, 7))
    b = rng.standard_normal((3, 4, 9))
    perm = rng.permutation(6 * 7)
    shuffled = a.reshape(3, -1)[:, perm].reshape(a.shape)
    assert gram_loss(shuffled, b) == pytest.approx(gram_loss(a, b), rel=1e-12)
    with pytest.raises(ChannelMismatch):
        gram_loss(a, b[:2])


def test_as_fmap_rejects_bad_input():
    with pytest.raises(ShapeMismatch):
        as_fmap(np.zeros((3, 3)))
    with pytest.raises(ValueError):
        as_fmap(np.array([[[np.nan]]]))


dims = st.tuples(st.integers(1, 8), st.integers(1, 32), st.integers(1, 32))


@settings(max_examples=60, deadline=None)
@given(dims=dims, seed=st.integers(0, 2**32 - 1))
def test_mean_shift_moves_mean_keeps_covariance(dims, seed):
    rng = np.random.default_rng(seed)
    f = rng.standard_normal(dims)
    shift = rng.uniform(-5, 5, dims[0])
    a, b = channel_stats(f), channel_stats(f + shift[:, None, None])
    np.testing.assert_allclose(b.mean, a.mean + shift, rtol=1e-9, atol=1e-12)
    np.testing.assert_allclose(b.cov, a.cov, rtol=1e-9, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(dims=dims, seed=st.integers(0, 2**32 - 1))
def test_gram_equals_scaled_second_moment(dims, seed):
    rng = np.random.default_rng(seed)
    f = rng.standard_normal(dims) + rng.standard_normal((dims[0], 1, 1))
    s = channel_stats(f)
    hw = dims[1] * dims[2]
    expected = hw * (s.cov + np.outer(s.mean, s.mean))
    np.testing.assert_allclose(gram_matrix(f), expected, rtol=1e-9, atol=1e-9 * np.abs(expected).max())


@settings(max_examples=40, deadline=None)
@given(dims=dims, seed=st.integers(0, 2**32 - 1))
def test_content_loss_nonnegative_zero_iff_equal(dims, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal(dims)
    b = a.copy()
    assert content_loss(a, b) == 0.0
    idx = tuple(rng.integers(0, d) for d in dims)
    b[idx] += 1e-3
    assert content_loss(a, b) > 0.0


def test_operations_are_pure(rng):
    f = rng.standard_normal((4, 9, 11))
    g = rng.standard_normal((4, 9, 11))
    snapshot = f.copy()
    s1, s2 = channel_stats(f), channel_stats(f)
    assert s1.mean.tobytes() == s2.mean.tobytes() and s1.cov.tobytes() == s2.cov.tobytes()
    assert gram_matrix(f).tobytes() == gram_matrix(f).tobytes()
    assert content_loss(f, g) == content_loss(f, g)
    np.testing.assert_array_equal(f, snapshot)
