"""Key encapsulation over the multi-round RDMPF key agreement.

All otherwise-public token traffic is masked with an HMAC-SHA3-512
keystream keyed by a 512-bit shared root nonce, and the encapsulated
512-bit key K is masked with an HMAC keyed by the agreed session digest.
Bob initiates (CloseB), Alice encapsulates ({Encap, CloseA, eta_m}), Bob
decapsulates.
"""

from __future__ import annotations

import hashlib
import hmac
import random
from dataclasses import dataclass

from .core import WORD_BYTES, canonical_bytes
from .errors import ParameterError, ProtocolError
from .rdmpf import RdmpfSession, RdmpfSetup, parse_token_list

NONCE_BYTES = 64  # eta_0 and eta_m are 512 bits
KEY_BYTES = 64  # encapsulated K is 512 bits
AUTH_TAG_BYTES = 32  # authA/authB are 256 bits


def hmac512(key: bytes, msg: bytes) -> bytes:
    """HMAC with SHA3-512 (64-byte tags, 72-byte block size)."""
    return hmac.new(key, msg, hashlib.sha3_512).digest()


def auth_tag(identity: bytes | str) -> bytes:
    """Derive a 256-bit public authentication tag from a party identity."""
    if isinstance(identity, str):
        identity = identity.encode()
    return hashlib.sha3_256(identity).digest()


def xor_bytes(a: bytes, b: bytes) -> bytes:
    if len(a) != len(b):
        raise ParameterError(f"xor needs equal lengths, got {len(a)} and {len(b)}")
    return bytes(x ^ y for x, y in zip(a, b))


def mask_stream(key: bytes, context: bytes, length: int) -> bytes:
    """Counter-extended HMAC keystream truncated to length bytes.

    Block i is HMAC(key, context || i) with an 8-byte big-endian counter,
    so a single 64-byte block is exactly HMAC(key, context || 0).
    """
    if length < 0:
        raise ParameterError(f"length must be non-negative, got {length}")
    out = bytearray()
    counter = 0
    while len(out) < length:
        out += hmac512(key, context + counter.to_bytes(8, "big"))
        counter += 1
    return bytes(out[:length])


@dataclass(frozen=True, slots=True)
class KemContext:
    """Root nonce (shared secret) plus the two public authentication tags."""

    eta0: bytes
    auth_a: bytes
    auth_b: bytes

    def __post_init__(self) -> None:
        if len(self.eta0) != NONCE_BYTES:
            raise ParameterError(f"eta0 must be {NONCE_BYTES} bytes, got {len(self.eta0)}")
        if len(self.auth_a) != AUTH_TAG_BYTES or len(self.auth_b) != AUTH_TAG_BYTES:
            raise ParameterError(f"auth tags must be {AUTH_TAG_BYTES} bytes each")

    @property
    def auth_pair(self) -> bytes:
        return self.auth_a + self.auth_b


@dataclass(frozen=True, slots=True)
class KemMessage:
    """The encapsulation message Alice sends to Bob."""

    encap: bytes
    close_a: bytes
    eta_m: bytes

    def __post_init__(self) -> None:
        if len(self.encap) != KEY_BYTES:
            raise ProtocolError(f"encap must be {KEY_BYTES} bytes, got {len(self.encap)}")
        if len(self.eta_m) != NONCE_BYTES:
            raise ProtocolError(f"eta_m must be {NONCE_BYTES} bytes, got {len(self.eta_m)}")


class KemResponderState:
    """Bob's retained state between initiate and decapsulate."""

    def __init__(self, ctx: KemContext, setup: RdmpfSetup, session: RdmpfSession):
        self.ctx = ctx
        self.setup = setup
        self.session = session


def _token_byte_len(setup: RdmpfSetup) -> int:
    return setup.rounds * setup.dim * setup.dim * WORD_BYTES


def _unmask_tokens(masked: bytes, key: bytes, context: bytes, setup: RdmpfSetup):
    plain = xor_bytes(masked, mask_stream(key, context, len(masked)))
    values = [
        int.from_bytes(plain[i : i + WORD_BYTES], "big")
        for i in range(0, len(plain), WORD_BYTES)
    ]
    return parse_token_list(values, setup.dim, setup.rounds, setup.params.p)


def kem_initiate(
    ctx: KemContext, setup: RdmpfSetup, rng: random.Random | None = None
) -> tuple[KemResponderState, bytes]:
    """Bob's opening move: run his rounds and send the masked token list."""
    session = RdmpfSession(setup, rng)
    session.generate_tokens()
    token_bytes = canonical_bytes(session.token_values())
    close_b = xor_bytes(
        token_bytes, mask_stream(ctx.eta0, ctx.auth_pair, len(token_bytes))
    )
    return KemResponderState(ctx, setup, session), close_b


def kem_encapsulate(
    ctx: KemContext,
    setup: RdmpfSetup,
    close_b: bytes,
    rng: random.Random | None = None,
) -> tuple[bytes, KemMessage]:
    """Alice's move: agree on the session key and encapsulate a fresh K."""
    expected = _token_byte_len(setup)
    if len(close_b) != expected:
        raise ProtocolError(f"close_b is {len(close_b)} bytes, expected {expected}")
    if rng is None:
        rng = random.SystemRandom()
    peer_tokens = _unmask_tokens(close_b, ctx.eta0, ctx.auth_pair, setup)

    session = RdmpfSession(setup, rng)
    session.generate_tokens()
    shared = session.derive(peer_tokens)

    eta_m = rng.getrandbits(8 * NONCE_BYTES).to_bytes(NONCE_BYTES, "big")
    k = rng.getrandbits(8 * KEY_BYTES).to_bytes(KEY_BYTES, "big")

    bound_context = xor_bytes(ctx.auth_pair, eta_m)
    ta_bytes = canonical_bytes(session.token_values())
    close_a = xor_bytes(ta_bytes, mask_stream(ctx.eta0, bound_context, len(ta_bytes)))
    encap = xor_bytes(k, hmac512(shared.digest, bound_context))
    return k, KemMessage(encap, close_a, eta_m)


def kem_decapsulate(state: KemResponderState, msg: KemMessage) -> bytes:
    """Bob's closing move: recover the peer tokens and unmask K."""
    setup = state.setup
    ctx = state.ctx
    expected = _token_byte_len(setup)
    if len(msg.close_a) != expected:
        raise ProtocolError(f"close_a is {len(msg.close_a)} bytes, expected {expected}")
    bound_context = xor_bytes(ctx.auth_pair, msg.eta_m)
    peer_tokens = _unmask_tokens(msg.close_a, ctx.eta0, bound_context, setup)
    shared = state.session.derive(peer_tokens)
    return xor_bytes(msg.encap, hmac512(shared.digest, bound_context))
