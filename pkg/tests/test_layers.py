import pytest

from rrdh.hardening import (
    shifted_embed_layer1,
    shifted_embed_layer2,
    shifted_extract_layer1,
    shifted_extract_layer2,
)
from rrdh.rdh.layers import embed_layer1, embed_layer2, extract_layer1, extract_layer2


def brute_inverse(embed, v_marked, p, values=range(0, 40)):
    """Every (v, bit) that embeds to ``v_marked``: the DERIVED decoding oracle."""
    hits = set()
    for v in values:
        for bit in (0, 1):
            try:
                out, used = embed(v, p, bit)
            except OverflowError:
                continue
            if out == v_marked:
                hits.add((v, bit if used else None))
    return hits


def test_layer1_examples():
    assert embed_layer1(12, 11, 1) == (13, 1)
    assert embed_layer1(12, 11, 0) == (12, 1)
    assert embed_layer1(14, 11, 1) == (15, 0)
    assert embed_layer1(10, 11, 1) == (10, 0)


def test_layer2_examples():
    assert embed_layer2(10, 11, 1) == (9, 1)
    assert embed_layer2(8, 11, 0) == (7, 0)
    assert embed_layer2(12, 11, 1) == (12, 0)


def test_extract_examples():
    assert extract_layer2(9, 11) == (10, 1)
    assert extract_layer2(10, 11) == (10, 0)
    assert extract_layer2(12, 11) == (12, None)
    assert extract_layer1(13, 11) == (12, 1)
    assert extract_layer1(12, 11) == (12, 0)
    assert extract_layer1(10, 11) == (10, None)


@pytest.mark.parametrize("marked", [7, 8, 9, 10, 11, 12, 13])
def test_extract_agrees_with_brute_force(marked):
    (v1, b1), = brute_inverse(embed_layer1, marked, 11)
    assert extract_layer1(marked, 11) == (v1, b1)
    (v2, b2), = brute_inverse(embed_layer2, marked, 11)
    assert extract_layer2(marked, 11) == (v2, b2)


def test_missing_bit_consumes_nothing():
    assert embed_layer1(12, 11, None) == (12, 0)
    assert embed_layer2(10, 11, None) == (10, 0)
    assert shifted_embed_layer1(12, 11, None, T=4) == (12, 0)


def test_overflow_checked():
    with pytest.raises(OverflowError):
        embed_layer1(31, 20, vmax=31)
    with pytest.raises(OverflowError):
        embed_layer2(0, 10)
    assert embed_layer1(30, 20, vmax=31) == (31, 0)


@pytest.mark.parametrize("v, p, bit", [(v, p, b) for v in range(0, 16) for p in range(0, 16) for b in (0, 1)])
def test_shifted_t1_reduces_to_plain(v, p, bit):
    assert shifted_embed_layer1(v, p, bit, T=1) == embed_layer1(v, p, bit)
    if v > 0:
        assert shifted_embed_layer2(v, p, bit, T=1) == embed_layer2(v, p, bit)
    assert shifted_extract_layer1(v, p, T=1) == extract_layer1(v, p)
    assert shifted_extract_layer2(v, p, T=1) == extract_layer2(v, p)


def test_shifted_t4_decoding_examples():
    # bit 1 sits at d = 1 + 5 = 6 under this construction; the nearest-bin
    # decoder accepts d in [4, 8] for it and [-1, 3] for bit 0
    assert shifted_extract_layer1(11 + 5, 11, T=4)[1] == 1
    assert shifted_extract_layer1(11 + 6, 11, T=4)[1] == 1
    assert shifted_extract_layer1(11 + 2, 11, T=4)[1] == 0
    assert shifted_embed_layer1(12, 11, 1, T=4) == (17, 1)
    assert shifted_embed_layer1(14, 11, None, T=4) == (23, 0)
    assert shifted_embed_layer1(10, 11, 1, T=4) == (6, 0)
