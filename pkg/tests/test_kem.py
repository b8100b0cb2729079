import hashlib
import hmac as stdlib_hmac
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mpfkap import (
    KemContext,
    KemMessage,
    MpfKapError,
    ParameterError,
    ProtocolError,
    auth_tag,
    canonical_bytes,
    generate_setup,
    hmac512,
    kem_decapsulate,
    kem_encapsulate,
    kem_initiate,
    mask_stream,
)


def manual_hmac_sha3_512(key: bytes, msg: bytes) -> bytes:
    """Independent textbook HMAC over the 72-byte SHA3-512 block."""
    block = 72
    if len(key) > block:
        key = hashlib.sha3_512(key).digest()
    key = key + b"\x00" * (block - len(key))
    inner = hashlib.sha3_512(bytes(b ^ 0x36 for b in key) + msg).digest()
    return hashlib.sha3_512(bytes(b ^ 0x5C for b in key) + inner).digest()


def make_ctx(rng: random.Random) -> KemContext:
    eta0 = rng.getrandbits(512).to_bytes(64, "big")
    return KemContext(eta0, auth_tag("party-a"), auth_tag("party-b"))


class TestHmac512:
    # key 00..3f with the standard sample message; tag cross-checked
    # against the textbook construction above and stdlib hmac
    KNOWN_KEY = bytes(range(64))
    KNOWN_MSG = b"Sample message for keylen<blocklen"
    KNOWN_TAG = bytes.fromhex(
        "4efd629d6c71bf86162658f29943b1c308ce27cdfa6db0d9c3ce81763f9cbce5"
        "f7ebe9868031db1a8f8eb7b6b95e5c5e3f657a8996c86a2f6527e307f0213196"
    )

    def test_known_vector(self):
        assert hmac512(self.KNOWN_KEY, self.KNOWN_MSG) == self.KNOWN_TAG
        assert manual_hmac_sha3_512(self.KNOWN_KEY, self.KNOWN_MSG) == self.KNOWN_TAG

    def test_block_size_assumption(self):
        assert hashlib.sha3_512().block_size == 72

    @settings(max_examples=100)
    @given(st.binary(max_size=100), st.binary(max_size=200))
    def test_matches_textbook_construction(self, key, msg):
        assert hmac512(key, msg) == manual_hmac_sha3_512(key, msg)

    def test_deterministic(self):
        assert hmac512(b"k", b"m") == hmac512(b"k", b"m")

    def test_message_sensitivity(self):
        assert hmac512(b"k", b"m0") != hmac512(b"k", b"m1")

    def test_matches_stdlib(self):
        rng = random.Random(40)
        for _ in range(20):
            key = rng.getrandbits(256).to_bytes(32, "big")
            msg = rng.getrandbits(400).to_bytes(50, "big")
            assert hmac512(key, msg) == stdlib_hmac.new(key, msg, hashlib.sha3_512).digest()


class TestMaskStream:
    def test_length_zero(self):
        assert mask_stream(b"k", b"c", 0) == b""

    def test_single_block(self):
        assert mask_stream(b"k", b"ctx", 64) == hmac512(b"k", b"ctx" + b"\x00" * 8)

    def test_multi_block_structure(self):
        stream = mask_stream(b"k", b"ctx", 130)
        assert stream[:64] == hmac512(b"k", b"ctx" + (0).to_bytes(8, "big"))
        assert stream[64:128] == hmac512(b"k", b"ctx" + (1).to_bytes(8, "big"))
        assert len(stream) == 130

    def test_deterministic(self):
        assert mask_stream(b"a", b"b", 100) == mask_stream(b"a", b"b", 100)

    @settings(max_examples=50)
    @given(st.binary(min_size=1, max_size=300))
    def test_masking_is_an_involution(self, data):
        key, ctx = b"key", b"context"
        masked = bytes(
            x ^ y for x, y in zip(data, mask_stream(key, ctx, len(data)))
        )
        unmasked = bytes(
            x ^ y for x, y in zip(masked, mask_stream(key, ctx, len(data)))
        )
        assert unmasked == data

    def test_negative_length(self):
        with pytest.raises(ParameterError):
            mask_stream(b"k", b"c", -1)


class TestContextValidation:
    def test_auth_tag_size(self):
        assert len(auth_tag("anyone")) == 32
        assert auth_tag(b"x") == auth_tag("x")

    def test_eta0_size_enforced(self):
        with pytest.raises(ParameterError):
            KemContext(b"\x00" * 63, b"\x00" * 32, b"\x00" * 32)

    def test_tag_sizes_enforced(self):
        with pytest.raises(ParameterError):
            KemContext(b"\x00" * 64, b"\x00" * 31, b"\x00" * 32)

    def test_message_sizes_enforced(self):
        with pytest.raises(ProtocolError):
            KemMessage(encap=b"\x00" * 63, close_a=b"", eta_m=b"\x00" * 64)
        with pytest.raises(ProtocolError):
            KemMessage(encap=b"\x00" * 64, close_a=b"", eta_m=b"\x00" * 10)


class TestRoundTrip:
    def test_loopback_recovers_k(self):
        rng = random.Random(41)
        setup = generate_setup(3, 65537, 500, 2, rng)
        ctx = make_ctx(rng)
        state, close_b = kem_initiate(ctx, setup, random.Random(1))
        k, msg = kem_encapsulate(ctx, setup, close_b, random.Random(2))
        assert kem_decapsulate(state, msg) == k
        assert len(k) == 64

    def test_close_b_is_xor_recoverable(self):
        rng = random.Random(42)
        setup = generate_setup(3, 65537, 500, 1, rng)
        ctx = make_ctx(rng)
        state, close_b = kem_initiate(ctx, setup, random.Random(3))
        token_bytes = canonical_bytes(state.session.token_values())
        keystream = mask_stream(ctx.eta0, ctx.auth_pair, len(token_bytes))
        assert bytes(a ^ b for a, b in zip(close_b, keystream)) == token_bytes
        # the masked difference IS the keystream: nothing token-shaped on the wire
        assert bytes(a ^ b for a, b in zip(close_b, token_bytes)) == keystream

    def test_seeded_initiate_deterministic(self):
        rng = random.Random(43)
        setup = generate_setup(3, 65537, 500, 2, rng)
        ctx = make_ctx(rng)
        _, one = kem_initiate(ctx, setup, random.Random(7))
        _, two = kem_initiate(ctx, setup, random.Random(7))
        assert one == two

    def test_zero_eta_m_still_round_trips(self):
        class ZeroNonceRng(random.Random):
            def __init__(self):
                super().__init__(8)
                self.wide_draws = 0

            def getrandbits(self, n):
                # the first 512-bit draw is eta_m; force it to zero
                # (smaller draws come from randint inside token generation)
                if n == 512:
                    self.wide_draws += 1
                    if self.wide_draws == 1:
                        return 0
                return super().getrandbits(n)

        rng = random.Random(44)
        setup = generate_setup(3, 65537, 500, 1, rng)
        ctx = make_ctx(rng)
        state, close_b = kem_initiate(ctx, setup, random.Random(9))
        k, msg = kem_encapsulate(ctx, setup, close_b, ZeroNonceRng())
        assert msg.eta_m == b"\x00" * 64
        assert kem_decapsulate(state, msg) == k

    def test_wrong_close_b_length(self):
        rng = random.Random(45)
        setup = generate_setup(3, 65537, 500, 1, rng)
        ctx = make_ctx(rng)
        with pytest.raises(ProtocolError):
            kem_encapsulate(ctx, setup, b"\x00" * 10, random.Random(1))

    def test_truncated_close_a_rejected(self):
        rng = random.Random(46)
        setup = generate_setup(3, 65537, 500, 1, rng)
        ctx = make_ctx(rng)
        state, close_b = kem_initiate(ctx, setup, random.Random(1))
        k, msg = kem_encapsulate(ctx, setup, close_b, random.Random(2))
        truncated = KemMessage(msg.encap, msg.close_a[:-8], msg.eta_m)
        with pytest.raises(ProtocolError):
            kem_decapsulate(state, truncated)

    def test_tampered_close_b_breaks_agreement(self):
        rng = random.Random(47)
        setup = generate_setup(3, 65537, 500, 1, rng)
        ctx = make_ctx(rng)
        state, close_b = kem_initiate(ctx, setup, random.Random(1))
        tampered = bytearray(close_b)
        tampered[5] ^= 0x08
        try:
            k, msg = kem_encapsulate(ctx, setup, bytes(tampered), random.Random(2))
            assert kem_decapsulate(state, msg) != k
        except MpfKapError:
            pass  # strict parsing may reject the garbled token list outright

    def test_replaced_eta_m_changes_k(self):
        rng = random.Random(48)
        setup = generate_setup(3, 65537, 500, 1, rng)
        ctx = make_ctx(rng)
        state, close_b = kem_initiate(ctx, setup, random.Random(1))
        k, msg = kem_encapsulate(ctx, setup, close_b, random.Random(2))
        swapped = KemMessage(msg.encap, msg.close_a, bytes(64))
        try:
            assert kem_decapsulate(state, swapped) != k
        except MpfKapError:
            pass

    def test_nonce_binding(self):
        # changing eta_m must change both the close_a mask and the encap mask
        ctx = KemContext(bytes(64), auth_tag("a"), auth_tag("b"))
        eta1 = bytes(64)
        eta2 = b"\x01" + bytes(63)
        ctx1 = bytes(a ^ b for a, b in zip(ctx.auth_pair, eta1))
        ctx2 = bytes(a ^ b for a, b in zip(ctx.auth_pair, eta2))
        assert mask_stream(ctx.eta0, ctx1, 64) != mask_stream(ctx.eta0, ctx2, 64)
        key = b"\x42" * 64
        assert hmac512(key, ctx1) != hmac512(key, ctx2)
