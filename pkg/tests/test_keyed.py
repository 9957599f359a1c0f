import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skqes.keyed import (IRREDUCIBLE, LazyRandomFunction, gf_inv, gf_mul, gf_pow,
                         make_function_family, prf_standin, random_function, t_wise_family,
                         unpack_coefficients)


def test_gf256_oracles():
    # the AES field: {57}.{83} = {c1}, {53}^-1 = {ca}
    assert gf_mul(0x57, 0x83, 8) == 0xC1
    assert gf_inv(0x53, 8) == 0xCA
    assert gf_pow(3, 255, 8) == 1


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(sorted(IRREDUCIBLE)), st.data())
def test_gf_field_axioms(m, data):
    a, b, c = (data.draw(st.integers(0, 2 ** m - 1)) for _ in range(3))
    assert gf_mul(a, b, m) == gf_mul(b, a, m)
    assert gf_mul(a, b ^ c, m) == gf_mul(a, b, m) ^ gf_mul(a, c, m)
    assert gf_mul(gf_mul(a, b, m), c, m) == gf_mul(a, gf_mul(b, c, m), m)
    if a:
        assert gf_mul(a, gf_inv(a, m), m) == 1


def test_gf_inverse_of_zero_raises():
    with pytest.raises(ZeroDivisionError):
        gf_inv(0, 8)


def test_frozen_outputs():
    assert random_function(16, 16, seed=0)(12345, 678) == 30466
    assert random_function(16, 16, seed=0)(0, 0) == 12025
    assert prf_standin(128, 16, 32)(1, 2) == 2599586881
    # degree-1 polynomial 5 + 3x over GF(2^8) at x = 2
    assert unpack_coefficients(0x0305, 2, 8) == [5, 3]
    assert t_wise_family(2, 8)(0x0305, 0x02) == 3


def test_random_function_ranges_and_determinism():
    f = random_function(10, 5, seed=3)
    rng = np.random.default_rng(0)
    for _ in range(50):
        k, x = f.sample_key(rng), f.sample_input(rng)
        y = f(k, x)
        assert 0 <= y < 32 and y == f(k, x)
    other = random_function(10, 5, seed=4)
    assert any(other(7, x) != f(7, x) for x in range(16))


def test_lazy_table_caches():
    g = LazyRandomFunction(8, 8, seed=1)
    assert g(3) == g(3)
    assert list(g.table) == [3]


def test_random_function_is_roughly_uniform():
    f = random_function(12, 1, seed=0)
    ones = sum(f(0, x) for x in range(4096))
    assert 1850 < ones < 2250


def test_pairwise_independence_exact():
    # a 2-wise family over GF(2^3): for x1 != x2 every output pair is hit equally often
    h = t_wise_family(2, 3)
    counts = np.zeros((8, 8), dtype=int)
    for k in range(2 ** h.key_bits):
        counts[h(k, 1), h(k, 6)] += 1
    assert np.all(counts == 1)


def test_one_wise_family_is_constant_in_the_input():
    h = t_wise_family(1, 8)
    assert {h(0xAB, x) for x in range(256)} == {0xAB}


def test_make_function_family():
    assert make_function_family("twise", t=3, m=4).key_bits == 12
    assert make_function_family("random", q=4, s=4).input_bits == 4
    with pytest.raises(KeyError):
        make_function_family("nope")
