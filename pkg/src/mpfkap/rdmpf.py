"""Multi-round rank-deficient matrix power function (RDMPF) key agreement.

Square matrices replace the rectangular setup: a full-rank nucleus W plus
two public rank-deficient bases.  Per round, each party raises the bases
to private exponents mod p-1 (powers of a common base commute, which is
what makes the round keys agree) and exchanges the double action of the
resulting pair on W.  Round keys are concatenated row-major and hashed
with SHA3-512 into a 512-bit session key.

The whole exponent grid can be multiplied by a shared session constant
sigma without breaking agreement; sigma = 1 is the plain protocol.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from typing import Sequence

from .core import (
    FieldParams,
    Matrix,
    canonical_bytes,
    mat_pow_mod,
    matrix_values,
    mod_pow,
    rank_mod_p,
    sample_matrix,
)
from .errors import DegenerateSetupError, ParameterError, ProtocolError, RestartRequired

RESTART_CAP = 64

# Short exponent probe used when sampling bases: reject a base whose power
# cycle is trivially short (base**k comes straight back to the base).
_ORDER_PROBES = (2, 3, 5, 9, 17)

Token = Matrix


def rdmpf(xe: Matrix, w: Matrix, ye: Matrix, p: int, sigma: int = 1) -> Matrix:
    """Double action with conventional inner products in the exponents.

    Q[i][j] = prod_{k,l} w[k][l] ** (sigma * xe[i][k] * ye[l][j] mod p-1),
    everything square of the same dimension.
    """
    dim = w.rows
    for m in (xe, w, ye):
        if (m.rows, m.cols) != (dim, dim):
            raise ParameterError(
                f"all matrices must be {dim}x{dim}, got {m.rows}x{m.cols}"
            )
    if w.modulus != p:
        raise ParameterError(f"base matrix modulus {w.modulus} does not match p={p}")
    em = p - 1
    sig = sigma % em
    wr = w.to_rows()
    xr = xe.to_rows()
    ycols = [[ye.at(l, j) for l in range(dim)] for j in range(dim)]
    flat = []
    for i in range(dim):
        xi = xr[i]
        sx = [sig * v % em for v in xi]
        for j in range(dim):
            yj = ycols[j]
            acc = 1
            for k in range(dim):
                sxk = sx[k]
                wk = wr[k]
                for l in range(dim):
                    acc = acc * mod_pow(wk[l], sxk * yj[l] % em, p) % p
            flat.append(acc)
    return Matrix(dim, dim, tuple(flat), p)


@dataclass(frozen=True, slots=True)
class RdmpfSetup:
    """Shared public parameters for the multi-round protocol."""

    params: FieldParams
    w: Matrix
    base_xu: Matrix
    base_yv: Matrix
    exp_max: int
    rounds: int
    sigma: int = 1

    def __post_init__(self) -> None:
        p = self.params.p
        dim = self.w.rows
        for name, m in (("w", self.w), ("base_xu", self.base_xu), ("base_yv", self.base_yv)):
            if not m.is_square or m.rows != dim:
                raise ParameterError(f"{name} must be {dim}x{dim}")
            if m.modulus != p:
                raise ParameterError(f"{name} modulus {m.modulus} does not match p={p}")
        if rank_mod_p(self.w, p).rank != dim:
            raise ParameterError("nucleus matrix w must have full rank over Z_p")
        for name, m in (("base_xu", self.base_xu), ("base_yv", self.base_yv)):
            if rank_mod_p(m, p).rank >= dim:
                raise ParameterError(f"{name} must be rank-deficient over Z_p")
        if self.exp_max < 2:
            raise ParameterError(f"exp_max must be >= 2, got {self.exp_max}")
        if self.rounds < 1:
            raise ParameterError(f"rounds must be >= 1, got {self.rounds}")

    @property
    def dim(self) -> int:
        return self.w.rows

    def floor_warnings(self) -> list[str]:
        out = []
        if self.params.p < 2**64:
            out.append(f"p={self.params.p} is below the recommended 2^64 floor")
        if self.dim < 100:
            out.append(f"dimension {self.dim} is below the recommended order of 100")
        return out


def sample_rank_deficient_base(
    dim: int, params: FieldParams, rng: random.Random
) -> Matrix:
    """Sample a protocol base: rank-deficient over Z_p, zero-free entries.

    Two degeneracies are screened out.  Bases whose power cycle mod p-1
    is trivially short are rejected by a small multiplicative-order probe
    (a smoke check, not a proof of long order).  Bases nilpotent mod 2
    are rejected outright: p-1 is even, so their powers mod p-1 collapse
    to the zero matrix and every token degenerates to all-ones.  By
    Cayley-Hamilton, base**dim mod 2 vanishing detects exactly that.
    """
    em = params.exp_modulus
    zero_mod2 = Matrix.zeros(dim, dim, 2)
    for _ in range(4096):
        cand = sample_matrix(dim, dim, params.p, rng, mode="rank_deficient")
        if mat_pow_mod(cand, dim, 2) == zero_mod2:
            continue
        reduced = Matrix.from_rows(cand.to_rows(), em)
        if any(mat_pow_mod(cand, k, em) == reduced for k in _ORDER_PROBES):
            continue
        return cand
    raise DegenerateSetupError(
        f"no usable rank-deficient base found for dim={dim}, p={params.p}"
    )


def generate_setup(
    dim: int,
    p: int,
    exp_max: int,
    rounds: int,
    rng: random.Random,
    sigma: int = 1,
) -> RdmpfSetup:
    """Sample a complete public setup with the required rank structure."""
    params = FieldParams(p)
    while True:
        w = sample_matrix(dim, dim, p, rng, mode="unit_entries")
        if rank_mod_p(w, p).rank == dim:
            break
    base_xu = sample_rank_deficient_base(dim, params, rng)
    base_yv = sample_rank_deficient_base(dim, params, rng)
    return RdmpfSetup(params, w, base_xu, base_yv, exp_max, rounds, sigma)


@dataclass(frozen=True, slots=True)
class RdmpfRoundPrivate:
    """One round's exponent draws and the derived private matrices."""

    rand_l: int
    rand_r: int
    l: Matrix  # base_xu ** rand_l mod p-1
    r: Matrix  # base_yv ** rand_r mod p-1


def round_keygen(
    setup: RdmpfSetup,
    rng: random.Random,
    rand_l: int | None = None,
    rand_r: int | None = None,
) -> tuple[RdmpfRoundPrivate, Token]:
    """Draw one round's private pair and compute the public token.

    A token containing a zero entry restarts the round with fresh draws;
    after RESTART_CAP attempts the setup is declared degenerate.
    Explicit rand_l/rand_r replay a known transcript without restarts.
    """
    p = setup.params.p
    em = setup.params.exp_modulus
    injected = rand_l is not None or rand_r is not None
    for _ in range(RESTART_CAP):
        cur_l = rand_l if rand_l is not None else rng.randint(1, setup.exp_max)
        cur_r = rand_r if rand_r is not None else rng.randint(1, setup.exp_max)
        priv = RdmpfRoundPrivate(
            cur_l,
            cur_r,
            mat_pow_mod(setup.base_xu, cur_l, em),
            mat_pow_mod(setup.base_yv, cur_r, em),
        )
        token = rdmpf(priv.l, setup.w, priv.r, p, setup.sigma)
        if injected or not token.has_zero_entry():
            return priv, token
    raise DegenerateSetupError(f"no zero-free token after {RESTART_CAP} draws")


def round_key(priv: RdmpfRoundPrivate, peer_token: Token, setup: RdmpfSetup) -> Matrix:
    """Apply the stored round private to the peer's round token."""
    if (peer_token.rows, peer_token.cols) != (setup.dim, setup.dim):
        raise ProtocolError(
            f"peer token is {peer_token.rows}x{peer_token.cols}, expected "
            f"{setup.dim}x{setup.dim}"
        )
    if peer_token.modulus != setup.params.p:
        raise ProtocolError("peer token modulus does not match the setup prime")
    if peer_token.has_zero_entry():
        raise RestartRequired("peer round token contains a zero entry")
    return rdmpf(priv.l, peer_token, priv.r, setup.params.p, setup.sigma)


@dataclass(frozen=True, slots=True)
class SessionKey:
    """512-bit session digest; equal on both sides of an honest run."""

    digest: bytes

    def __post_init__(self) -> None:
        if len(self.digest) != 64:
            raise ParameterError(f"session key must be 64 bytes, got {len(self.digest)}")

    def hex(self) -> str:
        return self.digest.hex()


@dataclass(frozen=True, slots=True)
class SessionTranscript:
    """Flattened per-round token and key values, row-major, rounds in order."""

    token_list: tuple[int, ...]
    key_list: tuple[int, ...]


def session_digest(key_matrices: Sequence[Matrix]) -> SessionKey:
    """SHA3-512 over the canonical bytes of the concatenated key list."""
    data = canonical_bytes(matrix_values(key_matrices))
    return SessionKey(hashlib.sha3_512(data).digest())


def parse_token_list(
    values: Sequence[int], dim: int, rounds: int, p: int
) -> list[Token]:
    """Split a flat peer list back into per-round token matrices."""
    expected = rounds * dim * dim
    if len(values) != expected:
        raise ProtocolError(
            f"peer token list has {len(values)} values, expected {expected}"
        )
    if any(v < 0 or v >= p for v in values):
        raise ProtocolError("peer token value out of [0, p) range")
    out = []
    per_round = dim * dim
    for r in range(rounds):
        chunk = tuple(values[r * per_round : (r + 1) * per_round])
        out.append(Matrix(dim, dim, chunk, p))
    return out


class RdmpfSession:
    """One party's state machine: round privates, token list, derived keys.

    Usage: generate_tokens(), ship token_values() to the peer, then
    derive() on the peer's list.  Rounds inside one session are strictly
    sequential; distinct sessions are independent.
    """

    def __init__(self, setup: RdmpfSetup, rng: random.Random | None = None):
        self.setup = setup
        self._rng = rng if rng is not None else random.SystemRandom()
        self._privates: list[RdmpfRoundPrivate] = []
        self._tokens: list[Token] = []
        self._keys: list[Matrix] = []

    def generate_tokens(
        self, injected: Sequence[tuple[int, int]] | None = None
    ) -> list[Token]:
        """Run every round's keygen; injected pairs replay a transcript."""
        if injected is not None and len(injected) != self.setup.rounds:
            raise ParameterError(
                f"need {self.setup.rounds} injected exponent pairs, got {len(injected)}"
            )
        self._privates = []
        self._tokens = []
        self._keys = []
        for rnd in range(self.setup.rounds):
            if injected is not None:
                priv, token = round_keygen(self.setup, self._rng, *injected[rnd])
            else:
                priv, token = round_keygen(self.setup, self._rng)
            self._privates.append(priv)
            self._tokens.append(token)
        return list(self._tokens)

    @property
    def tokens(self) -> list[Token]:
        if not self._tokens:
            raise ProtocolError("generate_tokens must run before the exchange")
        return list(self._tokens)

    @property
    def keys(self) -> list[Matrix]:
        if not self._keys:
            raise ProtocolError("round keys are available only after derive")
        return list(self._keys)

    def token_values(self) -> list[int]:
        """Own token list, flattened for the single exchange message."""
        return matrix_values(self.tokens)

    def derive(
        self,
        peer_tokens: Sequence[Token] | Sequence[int],
        digest_source: str = "keys",
    ) -> SessionKey:
        """Parse the peer list round-by-round and consolidate the session key.

        digest_source picks what gets hashed: "keys" (round keys, the
        default and the only reading under which both parties agree) or
        "tokens_and_keys" (own tokens followed by round keys).
        """
        if not self._privates:
            raise ProtocolError("generate_tokens must run before derive")
        if peer_tokens and isinstance(peer_tokens[0], Matrix):
            mats = list(peer_tokens)
            if len(mats) != self.setup.rounds:
                raise ProtocolError(
                    f"peer sent {len(mats)} round tokens, expected {self.setup.rounds}"
                )
            for m in mats:
                if (m.rows, m.cols) != (self.setup.dim, self.setup.dim):
                    raise ProtocolError("peer round token has wrong dimensions")
        else:
            mats = parse_token_list(
                list(peer_tokens), self.setup.dim, self.setup.rounds, self.setup.params.p
            )
        self._keys = [
            round_key(priv, tok, self.setup) for priv, tok in zip(self._privates, mats)
        ]
        if digest_source == "keys":
            return session_digest(self._keys)
        if digest_source == "tokens_and_keys":
            return session_digest(self._tokens + self._keys)
        raise ParameterError(f"unknown digest_source {digest_source!r}")

    @property
    def transcript(self) -> SessionTranscript:
        if not self._keys:
            raise ProtocolError("transcript is available only after derive")
        return SessionTranscript(
            tuple(matrix_values(self._tokens)), tuple(matrix_values(self._keys))
        )
