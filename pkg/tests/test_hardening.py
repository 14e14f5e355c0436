import itertools

import numpy as np
import pytest

from conftest import smooth_random
from rrdh.corpus import GrayImage, gen_secret
from rrdh.errors import CapacityError
from rrdh.hardening import (
    HardeningConfig,
    majority_aux,
    margin,
    shifted_embed_layer1,
    shifted_embed_layer2,
    shifted_extract_layer1,
    shifted_extract_layer2,
    spread_aux,
    tolerance,
)
from rrdh.rdh.auxinfo import AUX_BITS, aux_positions, read_aux
from rrdh.rdh.scheme import EmbedConfig, embed, extract


def test_spread_layout():
    assert spread_aux([1, 0, 1], 1).tolist() == [1, 0, 1]
    assert spread_aux([1, 0], 3).tolist() == [1, 0, 1, 0, 1, 0]
    with pytest.raises(CapacityError):
        spread_aux(np.zeros(66), 3, capacity=100)
    with pytest.raises(ValueError):
        spread_aux([1], 2)


def test_majority():
    assert majority_aux([1, 1, 0], 3).tolist() == [1]
    b = gen_secret(3, 66)
    for r in (1, 3, 5, 7):
        assert np.array_equal(majority_aux(spread_aux(b, r), r), b)
    with pytest.raises(ValueError):
        majority_aux([1, 0, 1, 1], 3)


def test_majority_bound_is_tight():
    b = gen_secret(3, 66)
    x = spread_aux(b, 3)
    x[[5, 66 + 5]] ^= 1
    out = majority_aux(x, 3)
    assert out[5] != b[5] and np.array_equal(np.delete(out, 5), np.delete(b, 5))


def test_config_validation():
    HardeningConfig(5, "raster", 4)
    for bad in (dict(r=0), dict(r=4), dict(T=0), dict(ordering="zigzag")):
        with pytest.raises(ValueError):
            HardeningConfig(**bad)


def test_margin_values():
    assert [tolerance(T) for T in (1, 2, 3, 4)] == [0, 1, 1, 2]
    assert margin(1) == 1 and margin(4) == 13


@pytest.mark.parametrize("T", [1, 2, 3, 4, 6])
def test_shifted_noise_bound_exhaustive(T):
    """Any |noise| <= T//2 after both layers still decodes, with fixed predictions."""
    t = T // 2
    fails = 0
    for p1 in range(40, 44):
        for gap in range(0, 4):
            p2 = p1 + gap
            for v in range(p1 - 6, p2 + 7):
                for b1, b2 in itertools.product((0, 1), repeat=2):
                    x, u1 = shifted_embed_layer1(v, p1, b1, T=T)
                    x, u2 = shifted_embed_layer2(x, p2, b2, T=T)
                    for noise in range(-t, t + 1):
                        y, c2 = shifted_extract_layer2(x + noise, p2, T=T)
                        y, c1 = shifted_extract_layer1(y, p1, T=T)
                        ok = (c1 == (b1 if u1 else None)) and (c2 == (b2 if u2 else None))
                        if noise == 0:
                            ok = ok and y == v
                        fails += not ok
    assert fails == 0


def test_shifted_displacement_bounded_by_margin():
    for T in (2, 4):
        for v in range(30, 60):
            for p1, p2 in ((44, 45), (40, 50), (45, 45)):
                x, _ = shifted_embed_layer1(v, p1, 1, T=T)
                x, _ = shifted_embed_layer2(x, p2, 1, T=T)
                assert abs(x - v) <= margin(T)


@pytest.mark.parametrize("T, n", [(2, 1), (4, 1), (3, 1)])
def test_shifted_scheme_roundtrip(T, n):
    img = smooth_random(96, 11, step=1)
    secret = gen_secret(T, 150)
    rec = embed(img, secret, EmbedConfig(n=n, T=T, N="auto"))
    got, restored = extract(rec.marked, rec.config)
    assert np.array_equal(got, secret) and restored == img


def test_shift_needs_range():
    with pytest.raises(CapacityError):
        embed(smooth_random(64, 1), gen_secret(0, 10), EmbedConfig(n=5, T=4))


def test_baseline_config_is_identical_to_default(texture):
    secret = gen_secret(9, 200)
    a = embed(texture, secret, EmbedConfig(n=3, N=2))
    b = embed(texture, secret, EmbedConfig(n=3, N=2, T=1, r=1, ordering="complexity"))
    assert a.marked == b.marked


def test_repetition_survives_aux_damage(corpus):
    img = corpus["texture-1"]
    rec = embed(img, gen_secret(9, 200), EmbedConfig(n=3, r=5))
    p = rec.marked.to_array()
    rows, cols = np.array(aux_positions(*img.shape, 5)).T
    rng = np.random.default_rng(0)
    for i in range(AUX_BITS):
        for j in rng.choice(5, 2, replace=False):
            k = j * AUX_BITS + i
            p[rows[k], cols[k]] ^= 1 << 3
    assert read_aux(GrayImage(p), 3, 5) == rec.aux
