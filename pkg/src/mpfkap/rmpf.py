"""Rectangular matrix power function (RMPF) key agreement.

Two parties share a prime p and three public m x n matrices (Base, X, Y)
with m > n and zero-free entries.  Each party scales X and Y by private
integers mod p-1 and publishes the double-sided exponential action of the
scaled pair on Base.  Applying one's own action to the peer token lands
both parties on the same key matrix, because scalar multiples of a common
matrix commute inside the exponents.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .core import FieldParams, Matrix, mat_scalar_mul_mod, mod_pow
from .errors import DegenerateSetupError, ParameterError, RestartRequired

# Redraw cap before a setup is declared unusable.
RESTART_CAP = 64

Token = Matrix


def _check_same_shape(*mats: Matrix) -> tuple[int, int]:
    rows, cols = mats[0].rows, mats[0].cols
    for m in mats[1:]:
        if (m.rows, m.cols) != (rows, cols):
            raise ParameterError(
                f"matrices must share dimensions, got {rows}x{cols} and {m.rows}x{m.cols}"
            )
    return rows, cols


def mpf_left(xe: Matrix, w: Matrix, r: int | None = None) -> Matrix:
    """Left exponential action: C[i][j] = prod_k w[k][j] ** xe[i][k] mod p.

    The product index k runs through [0, r); r defaults to the column
    count.  Exponent entries are taken mod p-1.
    """
    rows, cols = _check_same_shape(xe, w)
    p = w.modulus
    em = p - 1
    r = cols if r is None else r
    if r > min(rows, cols):
        raise ParameterError(f"index bound {r} exceeds matrix dimensions {rows}x{cols}")
    wr = w.to_rows()
    xr = xe.to_rows()
    flat = []
    for i in range(rows):
        xi = xr[i]
        for j in range(cols):
            acc = 1
            for k in range(r):
                acc = acc * mod_pow(wr[k][j], xi[k] % em, p) % p
            flat.append(acc)
    return Matrix(rows, cols, tuple(flat), p)


def mpf_right(w: Matrix, ye: Matrix, r: int | None = None) -> Matrix:
    """Right exponential action: D[i][j] = prod_l w[i][l] ** ye[l][j] mod p."""
    rows, cols = _check_same_shape(w, ye)
    p = w.modulus
    em = p - 1
    r = cols if r is None else r
    if r > min(rows, cols):
        raise ParameterError(f"index bound {r} exceeds matrix dimensions {rows}x{cols}")
    wr = w.to_rows()
    yr = ye.to_rows()
    flat = []
    for i in range(rows):
        wi = wr[i]
        for j in range(cols):
            acc = 1
            for l in range(r):
                acc = acc * mod_pow(wi[l], yr[l][j] % em, p) % p
            flat.append(acc)
    return Matrix(rows, cols, tuple(flat), p)


def mpf_double(xe: Matrix, w: Matrix, ye: Matrix, p: int, r: int | None = None) -> Matrix:
    """Double-sided action: Q[i][j] = prod_{k,l < r} w[k][l] ** (xe[i][k] * ye[l][j]).

    Exponent products are reduced mod p-1 before use.  Only the top-left
    r x r block of w is exponentiated; r defaults to the column count.
    """
    rows, cols = _check_same_shape(xe, w, ye)
    if w.modulus != p:
        raise ParameterError(f"base matrix modulus {w.modulus} does not match p={p}")
    em = p - 1
    r = cols if r is None else r
    if r > min(rows, cols):
        raise ParameterError(f"index bound {r} exceeds matrix dimensions {rows}x{cols}")
    wr = w.to_rows()
    xr = xe.to_rows()
    # column j of ye, truncated to the first r rows
    ycols = [[ye.at(l, j) for l in range(r)] for j in range(cols)]
    flat = []
    for i in range(rows):
        xi = xr[i]
        for j in range(cols):
            yj = ycols[j]
            acc = 1
            for k in range(r):
                xik = xi[k]
                wk = wr[k]
                for l in range(r):
                    acc = acc * mod_pow(wk[l], xik * yj[l] % em, p) % p
            flat.append(acc)
    return Matrix(rows, cols, tuple(flat), p)


@dataclass(frozen=True, slots=True)
class RmpfSetup:
    """Shared public parameters: p and the Base/X/Y matrices (m > n)."""

    params: FieldParams
    base: Matrix
    x: Matrix
    y: Matrix

    def __post_init__(self) -> None:
        rows, cols = _check_same_shape(self.base, self.x, self.y)
        if rows <= cols:
            raise ParameterError(f"rows must exceed cols, got {rows}x{cols}")
        p = self.params.p
        for name, m in (("base", self.base), ("x", self.x), ("y", self.y)):
            if m.modulus != p:
                raise ParameterError(f"{name} modulus {m.modulus} does not match p={p}")
            if m.has_zero_entry():
                raise ParameterError(f"{name} must have entries in [1, p-1]")

    @property
    def rows(self) -> int:
        return self.base.rows

    @property
    def cols(self) -> int:
        return self.base.cols

    def floor_warnings(self) -> list[str]:
        """Advisory warnings when parameters sit below real-life floors."""
        out = []
        if self.params.p < 2**64:
            out.append(f"p={self.params.p} is below the recommended 2^64 floor")
        if self.cols < 100:
            out.append(
                f"matrix rank bound {self.cols} is below the recommended order of 100"
            )
        return out


@dataclass(frozen=True, slots=True)
class RmpfPrivate:
    """One party's private scalars and derived exponent matrices."""

    lam: int
    omega: int
    a: Matrix  # lam * X   mod p-1
    b: Matrix  # omega * Y mod p-1


def keygen(
    setup: RmpfSetup,
    rng: random.Random,
    lam: int | None = None,
    omega: int | None = None,
) -> tuple[RmpfPrivate, Token]:
    """Draw private scalars and produce the public token.

    Explicit lam/omega values replay a known transcript and skip the
    zero-token restart loop.
    """
    p = setup.params.p
    em = setup.params.exp_modulus
    injected = lam is not None or omega is not None
    for _ in range(RESTART_CAP):
        cur_lam = lam if lam is not None else rng.randrange(1, p - 1)
        cur_omega = omega if omega is not None else rng.randrange(1, p - 1)
        priv = RmpfPrivate(
            cur_lam,
            cur_omega,
            mat_scalar_mul_mod(cur_lam, setup.x, em),
            mat_scalar_mul_mod(cur_omega, setup.y, em),
        )
        token = mpf_double(priv.a, setup.base, priv.b, p)
        if injected or not token.has_zero_entry():
            return priv, token
    raise DegenerateSetupError(f"no zero-free token after {RESTART_CAP} draws")


def derive_key(priv: RmpfPrivate, peer_token: Token, setup: RmpfSetup) -> Matrix:
    """Apply the private action to the peer token; equals the peer's key."""
    if (peer_token.rows, peer_token.cols) != (setup.rows, setup.cols):
        raise ParameterError(
            f"peer token is {peer_token.rows}x{peer_token.cols}, "
            f"expected {setup.rows}x{setup.cols}"
        )
    if peer_token.modulus != setup.params.p:
        raise ParameterError("peer token modulus does not match the setup prime")
    if peer_token.has_zero_entry():
        raise RestartRequired("peer token contains a zero entry; session must restart")
    return mpf_double(priv.a, peer_token, priv.b, setup.params.p)


class RmpfSession:
    """One party's state: setup, private draw, own token."""

    def __init__(self, setup: RmpfSetup, rng: random.Random | None = None):
        self.setup = setup
        self._rng = rng if rng is not None else random.SystemRandom()
        self._private: RmpfPrivate | None = None
        self._token: Token | None = None

    def generate_token(self, lam: int | None = None, omega: int | None = None) -> Token:
        self._private, self._token = keygen(self.setup, self._rng, lam, omega)
        return self._token

    @property
    def token(self) -> Token:
        if self._token is None:
            raise ParameterError("token not generated yet")
        return self._token

    def derive_key(self, peer_token: Token) -> Matrix:
        if self._private is None:
            raise ParameterError("generate_token must run before derive_key")
        return derive_key(self._private, peer_token, self.setup)
