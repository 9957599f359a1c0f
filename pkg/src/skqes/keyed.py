"""Classical keyed function families ``f: {0,1}^p x {0,1}^q -> {0,1}^s``.

Bit strings are represented as Python ints (big-endian bit order).
"""
from __future__ import annotations

import hashlib
import hmac
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

# Irreducible polynomials over GF(2), including the leading term.
IRREDUCIBLE = {
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10000011,
    8: 0b100011011,
    16: 0b10001000000001011,
}


@dataclass(frozen=True, eq=False)
class KeyedFunctionFamily:
    name: str
    key_bits: int
    input_bits: int
    output_bits: int
    eval: Callable[[int, int], int] = field(repr=False)

    def __call__(self, key: int, x: int) -> int:
        return self.eval(key, x)

    def sample_key(self, rng: np.random.Generator) -> int:
        return _random_bits(rng, self.key_bits)

    def sample_input(self, rng: np.random.Generator) -> int:
        return _random_bits(rng, self.input_bits)


def _random_bits(rng: np.random.Generator, bits: int) -> int:
    if bits == 0:
        return 0
    nbytes = (bits + 7) // 8
    return int.from_bytes(rng.bytes(nbytes), "big") >> (8 * nbytes - bits)


def _to_bytes(value: int, bits: int) -> bytes:
    return int(value).to_bytes(max(1, (bits + 7) // 8), "big")


def _truncate(digest: bytes, bits: int) -> int:
    return int.from_bytes(digest, "big") >> (8 * len(digest) - bits) if bits else 0


def _derive(seed: int, key: int, x: int, out_bits: int) -> int:
    h = hashlib.blake2b(digest_size=max(1, (out_bits + 7) // 8), person=b"skqes-rf")
    h.update(_to_bytes(seed, 64) + _to_bytes(key, 64) + _to_bytes(x, 512))
    return _truncate(h.digest(), out_bits)


class LazyRandomFunction:
    """A single random function ``{0,1}^q -> {0,1}^s`` sampled on demand.

    Outputs are derived statelessly from ``seed`` and the input; the table only
    caches them, so concurrent first queries agree.
    """

    def __init__(self, input_bits: int, output_bits: int, seed: int, key: int = 0):
        self.input_bits = input_bits
        self.output_bits = output_bits
        self.seed = seed
        self.key = key
        self.table: dict[int, int] = {}

    def __call__(self, x: int) -> int:
        if x not in self.table:
            self.table[x] = _derive(self.seed, self.key, x, self.output_bits)
        return self.table[x]


def random_function(q: int, s: int, seed: int = 0, key_bits: int = 64) -> KeyedFunctionFamily:
    """Truly random function family: each key names an independent random function."""
    if s > 512:
        raise ValueError("output length limited to 512 bits")

    def evaluate(key: int, x: int) -> int:
        return _derive(seed, key, x, s)

    return KeyedFunctionFamily("random", key_bits, q, s, evaluate)


def prf_standin(p: int, q: int, s: int) -> KeyedFunctionFamily:
    """HMAC-SHA256 in counter mode, truncated to ``s`` bits."""

    def evaluate(key: int, x: int) -> int:
        k = _to_bytes(key, p)
        msg = _to_bytes(x, q)
        out = b""
        counter = 0
        while 8 * len(out) < s:
            out += hmac.new(k, counter.to_bytes(4, "big") + msg, hashlib.sha256).digest()
            counter += 1
        return _truncate(out[: (s + 7) // 8], s)

    return KeyedFunctionFamily("prf", p, q, s, evaluate)


# ---------------------------------------------------------------------------
# GF(2^m) polynomial families
# ---------------------------------------------------------------------------

def gf_mul(a: int, b: int, m: int) -> int:
    """Carry-less multiplication modulo the fixed irreducible of degree ``m``."""
    poly = IRREDUCIBLE[m]
    result = 0
    while b:
        if b & 1:
            result ^= a
        b >>= 1
        a <<= 1
        if a >> m:
            a ^= poly
    return result


def gf_pow(a: int, e: int, m: int) -> int:
    result = 1
    while e:
        if e & 1:
            result = gf_mul(result, a, m)
        a = gf_mul(a, a, m)
        e >>= 1
    return result


def gf_inv(a: int, m: int) -> int:
    if a == 0:
        raise ZeroDivisionError("0 has no inverse")
    return gf_pow(a, 2 ** m - 2, m)


def unpack_coefficients(key: int, t: int, m: int) -> list[int]:
    mask = (1 << m) - 1
    return [(key >> (m * i)) & mask for i in range(t)]


def t_wise_family(t: int, m: int) -> KeyedFunctionFamily:
    """Polynomials of degree < t over GF(2^m); the key packs ``t`` coefficients
    with ``c_0`` in the lowest ``m`` bits."""
    if t < 1:
        raise ValueError("t must be at least 1")
    if m not in IRREDUCIBLE:
        raise ValueError(f"no irreducible polynomial tabulated for m={m}")

    def evaluate(key: int, x: int) -> int:
        coeffs = unpack_coefficients(key, t, m)
        acc = 0
        for c in reversed(coeffs):
            acc = gf_mul(acc, x, m) ^ c
        return acc

    return KeyedFunctionFamily(f"{t}-wise", t * m, m, m, evaluate)


def make_function_family(name: str, **params) -> KeyedFunctionFamily:
    if name == "random":
        return random_function(params["q"], params["s"], params.get("seed", 0))
    if name == "prf":
        return prf_standin(params.get("p", 128), params["q"], params["s"])
    if name == "twise":
        return t_wise_family(params["t"], params["m"])
    raise KeyError(f"unknown function family {name!r}")
