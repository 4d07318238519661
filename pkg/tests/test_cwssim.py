import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays
from PIL import Image

from faketex import draw_table
from tabreward.cwssim import (
    DEFAULT_CONSTANTS,
    cw_ssim,
    haar_decompose,
    haar_reconstruct,
    preprocess_pair,
    resize_bilinear,
    subband_ssim,
    to_gray,
)
from tabreward.latex import parse

C1, C2 = 6.5025, 58.5225


def closed_form_ssim(mx, my, vx, vy, cov):
    return (2 * mx * my + C1) * (2 * cov + C2) / ((mx**2 + my**2 + C1) * (vx + vy + C2))


def table_render():
    src = r"{ccc} \multicolumn{3}{c}{Header} \\ a & bb & 12 \\ \multirow{2}{*}{x} & y & z \\ & 3.5 & 4 \\"
    return np.asarray(draw_table(parse(src)), dtype=np.float64)


def test_constants():
    assert DEFAULT_CONSTANTS.c1 == pytest.approx(C1, abs=1e-12)
    assert DEFAULT_CONSTANTS.c2 == pytest.approx(C2, abs=1e-12)


def test_preprocess_identity_and_constant():
    rng = np.random.default_rng(0)
    x = rng.integers(0, 256, (64, 64)).astype(float)
    a, b = preprocess_pair(x, x.copy())
    assert a.shape == b.shape == (64, 64)
    assert np.array_equal(a, b) and np.array_equal(a, x)
    white = np.full((33, 47), 255.0)
    a, b = preprocess_pair(white, np.full((20, 20), 255.0))
    assert a.shape == (32, 46)
    assert np.all(a == 255) and np.all(b == 255)


def test_preprocess_resize_then_trim():
    # 65 wide x 64 high and 64 x 64: both resized to 65 x 64, then trimmed to 64 x 64
    rng = np.random.default_rng(1)
    wide = rng.integers(0, 256, (64, 65)).astype(float)
    square = rng.integers(0, 256, (64, 64)).astype(float)
    a, b = preprocess_pair(wide, square)
    assert a.shape == b.shape == (64, 64)
    assert np.array_equal(a, wide[:, :64])
    assert np.array_equal(b, resize_bilinear(square, 64, 65)[:, :64])


def test_preprocess_rejects_empty():
    with pytest.raises(ValueError):
        preprocess_pair(np.zeros((0, 4)), np.zeros((4, 4)))


def test_grayscale_weights_and_pil_input():
    rgb = np.zeros((2, 2, 3))
    rgb[..., 0], rgb[..., 1], rgb[..., 2] = 100, 50, 200
    assert np.allclose(to_gray(rgb), 0.299 * 100 + 0.587 * 50 + 0.114 * 200)
    im = Image.fromarray(np.full((4, 6), 7, dtype=np.uint8))
    assert to_gray(im).shape == (4, 6)


def test_bilinear_upsample_values():
    arr = np.array([[0.0, 100.0]])
    out = resize_bilinear(arr, 1, 4)
    # centres at source coords -0.25, 0.25, 0.75, 1.25 -> clamped
    assert np.allclose(out, [[0.0, 25.0, 75.0, 100.0]])


def test_haar_constant_image():
    bands = haar_decompose(np.full((6, 8), 37.0))
    assert np.all(bands.cA == 37)
    for band in bands[1:]:
        assert np.all(band == 0)


@pytest.mark.parametrize("block, expected", [
    ([[255, 255], [0, 0]], (127.5, 127.5, 0, 0)),  # horizontal edge
    ([[255, 0], [255, 0]], (127.5, 0, 127.5, 0)),  # vertical edge
    ([[255, 0], [0, 255]], (127.5, 0, 0, 127.5)),  # diagonal
])
def test_haar_blocks(block, expected):
    bands = haar_decompose(np.array(block, dtype=float))
    assert tuple(float(b[0, 0]) for b in bands) == expected


def test_haar_rejects_odd():
    with pytest.raises(ValueError):
        haar_decompose(np.zeros((3, 4)))


@given(arrays(np.uint8, st.tuples(st.integers(1, 8).map(lambda n: 2 * n), st.integers(1, 8).map(lambda n: 2 * n))))
def test_haar_round_trip_exact(img):
    img = img.astype(np.float64)
    assert np.array_equal(haar_reconstruct(haar_decompose(img)), img)


def test_subband_ssim_cases():
    rng = np.random.default_rng(2)
    x = rng.normal(size=(10, 10))
    assert subband_ssim(x, x) == 1.0
    zero = np.zeros((5, 5))
    assert subband_ssim(zero, zero) == 1.0
    assert subband_ssim(zero, np.full((5, 5), 100.0)) == pytest.approx(C1 / (10000 + C1), rel=1e-12)
    assert C1 / (10000 + C1) == pytest.approx(6.498e-4, rel=1e-3)
    with pytest.raises(ValueError):
        subband_ssim(zero, np.zeros((4, 5)))


def test_subband_ssim_matches_closed_form():
    rng = np.random.default_rng(3)
    x = rng.uniform(0, 255, 50)
    y = rng.uniform(0, 255, 50)
    mx, my = sum(x) / 50, sum(y) / 50
    vx = sum((a - mx) ** 2 for a in x) / 50
    vy = sum((b - my) ** 2 for b in y) / 50
    cov = sum((a - mx) * (b - my) for a, b in zip(x, y)) / 50
    assert subband_ssim(x, y) == pytest.approx(closed_form_ssim(mx, my, vx, vy, cov), rel=1e-12)


def test_white_vs_black():
    white, black = np.full((16, 16), 255.0), np.zeros((16, 16))
    expected = (3 + C1 / (255.0**2 + C1)) / 4
    assert cw_ssim(white, black) == pytest.approx(expected, abs=1e-12)
    assert cw_ssim(white, black) == pytest.approx(0.750025, abs=1e-6)


def test_identity_and_symmetry_random():
    rng = np.random.default_rng(4)
    for _ in range(20):
        h1, w1, h2, w2 = rng.integers(2, 40, 4)
        x = rng.integers(0, 256, (h1, w1)).astype(float)
        y = rng.integers(0, 256, (h2, w2)).astype(float)
        assert abs(cw_ssim(x, x) - 1) < 1e-9
        assert abs(cw_ssim(x, y) - cw_ssim(y, x)) < 1e-12
        assert -1 < cw_ssim(x, y) <= 1


def test_monotone_degradation_on_table_render():
    img = table_render()
    fractions = [0.0, 0.01, 0.03, 0.1, 0.3]
    monotone = 0
    trials = 15
    for seed in range(trials):
        rng = np.random.default_rng(seed)
        order = rng.permutation(img.size)
        scores = []
        for f in fractions:
            noisy = img.copy().ravel()
            idx = order[: int(f * img.size)]
            noisy[idx] = 255 - noisy[idx]
            scores.append(cw_ssim(noisy.reshape(img.shape), img))
        monotone += all(a >= b for a, b in zip(scores, scores[1:]))
    assert monotone > trials // 2
