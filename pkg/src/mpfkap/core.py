"""Modular integer and matrix arithmetic over Z_p and Z_{p-1}.

Everything here works on unbounded-precision Python integers.  Value
matrices live in Z_p (p prime); exponent matrices live in Z_{p-1}, the
ring where Fermat reduction keeps powers of units consistent.  The
canonical byte encoding at the bottom is the single source of truth for
every hash, HMAC, and wire payload in the package.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import ParameterError, SerializationError

DEFAULT_PRIME = 65537

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53)

# Deterministic for n < 3.3e24; extra random rounds push the error
# probability below 2^-64 for larger candidates.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_MR_RANDOM_ROUNDS = 40

_sysrand = random.SystemRandom()


def mod_pow(base: int, exp: int, m: int) -> int:
    """Square-and-multiply base**exp mod m.  0**0 is defined as 1."""
    if m < 2:
        raise ParameterError(f"modulus must be >= 2, got {m}")
    if exp < 0:
        raise ParameterError(f"exponent must be non-negative, got {exp}")
    result = 1 % m
    acc = base % m
    while exp:
        if exp & 1:
            result = result * acc % m
        acc = acc * acc % m
        exp >>= 1
    return result


def is_probable_prime(n: int) -> bool:
    """Miller-Rabin primality test with error probability below 2^-64."""
    if n < 2:
        return False
    for q in _SMALL_PRIMES:
        if n == q:
            return True
        if n % q == 0:
            return False
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1

    def witness(a: int) -> bool:
        x = mod_pow(a, d, n)
        if x in (1, n - 1):
            return False
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                return False
        return True

    for a in _MR_BASES:
        if witness(a % n):
            return False
    if n.bit_length() > 82:
        for _ in range(_MR_RANDOM_ROUNDS):
            if witness(_sysrand.randrange(2, n - 1)):
                return False
    return True


@dataclass(frozen=True, slots=True)
class FieldParams:
    """The prime p and the derived exponent modulus p-1."""

    p: int
    exp_modulus: int = field(init=False)

    def __post_init__(self) -> None:
        if self.p < 3 or not is_probable_prime(self.p):
            raise ParameterError(f"p must be an odd prime >= 3, got {self.p}")
        object.__setattr__(self, "exp_modulus", self.p - 1)


@dataclass(frozen=True, slots=True)
class Matrix:
    """Rectangular integer matrix with an attached modulus.

    Entries are stored row-major and must already be reduced into
    [0, modulus).  Instances are immutable and safe to share.
    """

    rows: int
    cols: int
    entries: tuple[int, ...]
    modulus: int

    def __post_init__(self) -> None:
        if self.rows < 1 or self.cols < 1:
            raise ParameterError(f"bad dimensions {self.rows}x{self.cols}")
        if self.modulus < 2:
            raise ParameterError(f"modulus must be >= 2, got {self.modulus}")
        if len(self.entries) != self.rows * self.cols:
            raise ParameterError(
                f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} "
                f"entries, got {len(self.entries)}"
            )
        if any(e < 0 or e >= self.modulus for e in self.entries):
            raise ParameterError("matrix entry out of [0, modulus) range")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], modulus: int) -> "Matrix":
        """Build a matrix from nested lists, reducing entries mod modulus."""
        if not rows or not rows[0]:
            raise ParameterError("matrix needs at least one row and column")
        ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise ParameterError("ragged rows")
        if modulus < 2:
            raise ParameterError(f"modulus must be >= 2, got {modulus}")
        flat = tuple(e % modulus for r in rows for e in r)
        return cls(len(rows), ncols, flat, modulus)

    @classmethod
    def identity(cls, n: int, modulus: int) -> "Matrix":
        flat = tuple(1 if i == j else 0 for i in range(n) for j in range(n))
        return cls(n, n, flat, modulus)

    @classmethod
    def zeros(cls, rows: int, cols: int, modulus: int) -> "Matrix":
        return cls(rows, cols, (0,) * (rows * cols), modulus)

    def at(self, i: int, j: int) -> int:
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def to_rows(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self) -> "Matrix":
        flat = tuple(self.at(i, j) for j in range(self.cols) for i in range(self.rows))
        return Matrix(self.cols, self.rows, flat, self.modulus)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def has_zero_entry(self) -> bool:
        return 0 in self.entries

    def __repr__(self) -> str:  # full entry dumps drown test output
        return f"Matrix({self.rows}x{self.cols} mod {self.modulus}, {list(self.entries)})"


@dataclass(frozen=True, slots=True)
class RankProfile:
    """Rank over Z_p plus the positions of exactly repeated rows."""

    rank: int
    duplicate_row_pairs: tuple[tuple[int, int], ...]


def mat_scalar_mul_mod(s: int, m: Matrix, modulus: int) -> Matrix:
    """Entry-wise s * M reduced mod modulus."""
    flat = tuple(s * e % modulus for e in m.entries)
    return Matrix(m.rows, m.cols, flat, modulus)


def mat_mul_mod(a: Matrix, b: Matrix, modulus: int) -> Matrix:
    """Conventional matrix product with entries reduced mod modulus."""
    if a.cols != b.rows:
        raise ParameterError(
            f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}"
        )
    arows = a.to_rows()
    bcols = [[b.at(k, j) for k in range(b.rows)] for j in range(b.cols)]
    flat = []
    for ar in arows:
        for bc in bcols:
            flat.append(sum(x * y for x, y in zip(ar, bc)) % modulus)
    return Matrix(a.rows, b.cols, tuple(flat), modulus)


def mat_pow_mod(m: Matrix, e: int, modulus: int) -> Matrix:
    """M**e mod modulus by square-and-multiply; e = 0 gives the identity."""
    if not m.is_square:
        raise ParameterError(f"matrix power needs a square matrix, got {m.rows}x{m.cols}")
    if e < 0:
        raise ParameterError(f"exponent must be non-negative, got {e}")
    result = Matrix.identity(m.rows, modulus)
    acc = m if m.modulus == modulus else Matrix.from_rows(m.to_rows(), modulus)
    while e:
        if e & 1:
            result = mat_mul_mod(result, acc, modulus)
        acc = mat_mul_mod(acc, acc, modulus)
        e >>= 1
    return result


def rank_mod_p(m: Matrix, p: int) -> RankProfile:
    """Gaussian elimination over the field Z_p."""
    if not is_probable_prime(p):
        raise ParameterError(f"rank is only defined over a prime modulus, got {p}")
    work = [[e % p for e in m.row(i)] for i in range(m.rows)]
    rank = 0
    for col in range(m.cols):
        pivot = next((i for i in range(rank, m.rows) if work[i][col]), None)
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        inv = mod_pow(work[rank][col], p - 2, p)
        for i in range(rank + 1, m.rows):
            if work[i][col]:
                f = work[i][col] * inv % p
                work[i] = [(x - f * y) % p for x, y in zip(work[i], work[rank])]
        rank += 1
        if rank == m.rows:
            break
    dups = tuple(
        (i, j)
        for i in range(m.rows)
        for j in range(i + 1, m.rows)
        if m.row(i) == m.row(j)
    )
    return RankProfile(rank, dups)


def sample_matrix(
    rows: int,
    cols: int,
    modulus: int,
    rng: random.Random,
    mode: str = "general",
    dependent_row: str = "duplicate",
) -> Matrix:
    """Draw a random matrix from the injected randomness source.

    Modes:
      general        uniform entries in [0, modulus)
      unit_entries   uniform entries in [1, modulus), so no zero bases
      rank_deficient sample (rows-1) x cols with unit entries, then insert
                     one dependent row at a random position: a duplicate of
                     an existing row, or (dependent_row="combination") a
                     random modular combination of two rows
    """
    if mode == "general":
        flat = tuple(rng.randrange(modulus) for _ in range(rows * cols))
        return Matrix(rows, cols, flat, modulus)
    if mode == "unit_entries":
        flat = tuple(rng.randrange(1, modulus) for _ in range(rows * cols))
        return Matrix(rows, cols, flat, modulus)
    if mode == "rank_deficient":
        if rows < 2:
            raise ParameterError("rank_deficient mode needs at least 2 rows")
        base = [[rng.randrange(1, modulus) for _ in range(cols)] for _ in range(rows - 1)]
        if dependent_row == "duplicate":
            extra = list(base[rng.randrange(rows - 1)])
        elif dependent_row == "combination":
            if rows < 3:
                raise ParameterError("combination mode needs at least 3 rows")
            i, j = rng.sample(range(rows - 1), 2)
            c1 = rng.randrange(modulus)
            c2 = rng.randrange(modulus)
            extra = [(c1 * x + c2 * y) % modulus for x, y in zip(base[i], base[j])]
        else:
            raise ParameterError(f"unknown dependent_row mode {dependent_row!r}")
        base.insert(rng.randrange(rows), extra)
        return Matrix.from_rows(base, modulus)
    raise ParameterError(f"unknown sampling mode {mode!r}")


WORD_BYTES = 8
_WORD_LIMIT = 1 << (8 * WORD_BYTES)


def canonical_bytes(values: Iterable[int]) -> bytes:
    """Encode integers as concatenated 8-byte big-endian words.

    This fixes the bit-exact input of every hash and HMAC.  Values must
    fit in 8 bytes; larger moduli still work in-process but cannot be
    serialized.
    """
    out = bytearray()
    for v in values:
        if v < 0 or v >= _WORD_LIMIT:
            raise SerializationError(f"value {v} does not fit in {WORD_BYTES} bytes")
        out += v.to_bytes(WORD_BYTES, "big")
    return bytes(out)


def matrix_values(matrices: Iterable[Matrix]) -> list[int]:
    """Flatten matrices row-major, in order, into one value list."""
    return [e for m in matrices for e in m.entries]
