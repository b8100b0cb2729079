"""Canonical wire format: frames, matrix codec, and parameter-set files.

Frames are magic "MPFX" + version + kind + 4-byte big-endian length +
payload.  Matrices travel as two 4-byte dimension counts followed by the
canonical 8-byte entry encoding, row-major; the same layout serves setup
files, token lists, and key dumps.

Parameter sets are written twice: a human-readable JSON document (the
format documented below) and a binary mirror consisting of a single
setup frame.
"""

from __future__ import annotations

import json
import random
import struct
from dataclasses import dataclass
from typing import Sequence

from .core import (
    FieldParams,
    Matrix,
    WORD_BYTES,
    canonical_bytes,
    rank_mod_p,
    sample_matrix,
)
from .errors import FrameError, ParameterError
from .rdmpf import RdmpfSetup, sample_rank_deficient_base
from .rmpf import RmpfSetup

MAGIC = b"MPFX"
VERSION = 1
HEADER_LEN = 10
MAX_PAYLOAD = 2**32 - 1

FRAME_KINDS = {
    "setup": 0x01,
    "token-list": 0x02,
    "kem-close-b": 0x03,
    "kem-encap-msg": 0x04,
    "error": 0x05,
}
_KIND_NAMES = {v: k for k, v in FRAME_KINDS.items()}

PARAMSET_FORMAT = "mpfkap-paramset"
PARAMSET_VERSION = 1

_PROTO_TAGS = {"rmpf": 1, "rdmpf": 2}
_TAG_PROTOS = {v: k for k, v in _PROTO_TAGS.items()}


def encode_frame(kind: str, payload: bytes) -> bytes:
    if kind not in FRAME_KINDS:
        raise ParameterError(f"unknown frame kind {kind!r}")
    if len(payload) > MAX_PAYLOAD:
        raise ParameterError("payload exceeds the 4-byte length field")
    return MAGIC + bytes([VERSION, FRAME_KINDS[kind]]) + struct.pack(">I", len(payload)) + payload


def decode_frame(data: bytes) -> tuple[str, bytes]:
    if len(data) < HEADER_LEN:
        raise FrameError(f"frame truncated at {len(data)} bytes")
    if data[:4] != MAGIC:
        raise FrameError("bad magic")
    if data[4] != VERSION:
        raise FrameError(f"unsupported version {data[4]}")
    kind = _KIND_NAMES.get(data[5])
    if kind is None:
        raise FrameError(f"unknown frame kind byte 0x{data[5]:02x}")
    (length,) = struct.unpack(">I", data[6:10])
    if len(data) - HEADER_LEN != length:
        raise FrameError(
            f"length field says {length} payload bytes, frame carries {len(data) - HEADER_LEN}"
        )
    return kind, data[HEADER_LEN:]


def encode_matrix(m: Matrix) -> bytes:
    return struct.pack(">II", m.rows, m.cols) + canonical_bytes(m.entries)


def decode_matrix(data: bytes, modulus: int) -> tuple[Matrix, bytes]:
    """Decode one matrix from the head of data; returns (matrix, rest)."""
    if len(data) < 8:
        raise FrameError("matrix header truncated")
    rows, cols = struct.unpack(">II", data[:8])
    if rows < 1 or cols < 1 or rows * cols > MAX_PAYLOAD // WORD_BYTES:
        raise FrameError(f"implausible matrix dimensions {rows}x{cols}")
    need = 8 + rows * cols * WORD_BYTES
    if len(data) < need:
        raise FrameError("matrix entries truncated")
    body = data[8:need]
    entries = tuple(
        int.from_bytes(body[i : i + WORD_BYTES], "big")
        for i in range(0, len(body), WORD_BYTES)
    )
    if any(e >= modulus for e in entries):
        raise FrameError("matrix entry not reduced mod the session modulus")
    return Matrix(rows, cols, entries, modulus), data[need:]


def encode_token_list(mats: Sequence[Matrix]) -> bytes:
    out = struct.pack(">I", len(mats))
    for m in mats:
        out += encode_matrix(m)
    return out


def decode_token_list(data: bytes, modulus: int) -> list[Matrix]:
    if len(data) < 4:
        raise FrameError("token list header truncated")
    (count,) = struct.unpack(">I", data[:4])
    rest = data[4:]
    mats = []
    for _ in range(count):
        m, rest = decode_matrix(rest, modulus)
        mats.append(m)
    if rest:
        raise FrameError(f"{len(rest)} trailing bytes after token list")
    return mats


@dataclass
class ParamSet:
    """Shared public parameters as they travel in files and setup frames."""

    protocol: str  # "rmpf" | "rdmpf"
    p: int
    rows: int | None = None  # rmpf
    cols: int | None = None  # rmpf
    dim: int | None = None  # rdmpf
    exp_max: int | None = None  # rdmpf
    rounds: int | None = None  # rdmpf
    sigma: int = 1  # rdmpf
    matrices: dict[str, Matrix] | None = None
    seed: int | None = None  # test mode only

    _RMPF_MATS = ("base", "x", "y")
    _RDMPF_MATS = ("w", "base_xu", "base_yv")

    def mat_names(self) -> tuple[str, ...]:
        return self._RMPF_MATS if self.protocol == "rmpf" else self._RDMPF_MATS

    def build_setup(self) -> RmpfSetup | RdmpfSetup:
        """Instantiate (and thereby validate) the owning protocol's setup."""
        params = FieldParams(self.p)
        mats = self.matrices or {}
        missing = [n for n in self.mat_names() if n not in mats]
        if missing:
            raise ParameterError(f"parameter set lacks matrices: {missing}")
        if self.protocol == "rmpf":
            return RmpfSetup(params, mats["base"], mats["x"], mats["y"])
        if self.protocol == "rdmpf":
            if self.exp_max is None or self.rounds is None:
                raise ParameterError("rdmpf parameter set needs exp_max and rounds")
            return RdmpfSetup(
                params,
                mats["w"],
                mats["base_xu"],
                mats["base_yv"],
                self.exp_max,
                self.rounds,
                self.sigma,
            )
        raise ParameterError(f"unknown protocol {self.protocol!r}")

    # --- JSON form -------------------------------------------------------

    def to_json(self) -> str:
        doc: dict = {
            "format": PARAMSET_FORMAT,
            "version": PARAMSET_VERSION,
            "protocol": self.protocol,
            "p": self.p,
        }
        if self.protocol == "rmpf":
            doc["rows"] = self.rows
            doc["cols"] = self.cols
        else:
            doc["dim"] = self.dim
            doc["exp_max"] = self.exp_max
            doc["rounds"] = self.rounds
            doc["sigma"] = self.sigma
        for name in self.mat_names():
            doc[name] = self.matrices[name].to_rows()
        if self.seed is not None:
            doc["seed"] = self.seed
        return json.dumps(doc, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ParamSet":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParameterError(f"parameter file is not valid JSON: {exc}") from exc
        if not isinstance(doc, dict) or doc.get("format") != PARAMSET_FORMAT:
            raise ParameterError("not a parameter-set document")
        if doc.get("version") != PARAMSET_VERSION:
            raise ParameterError(f"unsupported parameter-set version {doc.get('version')}")
        protocol = doc.get("protocol")
        if protocol not in _PROTO_TAGS:
            raise ParameterError(f"unknown protocol {protocol!r}")
        p = doc["p"]
        ps = cls(protocol=protocol, p=p, seed=doc.get("seed"))
        if protocol == "rmpf":
            ps.rows, ps.cols = doc["rows"], doc["cols"]
        else:
            ps.dim = doc["dim"]
            ps.exp_max = doc["exp_max"]
            ps.rounds = doc["rounds"]
            ps.sigma = doc.get("sigma", 1)
        try:
            ps.matrices = {
                name: Matrix.from_rows(doc[name], p) for name in ps.mat_names()
            }
        except KeyError as exc:
            raise ParameterError(f"parameter file lacks matrix {exc}") from exc
        return ps

    # --- binary mirror -----------------------------------------------------

    def to_frame(self) -> bytes:
        payload = bytes([_PROTO_TAGS[self.protocol]])
        payload += struct.pack(">Q", self.p)
        if self.protocol == "rmpf":
            payload += struct.pack(">II", self.rows, self.cols)
        else:
            payload += struct.pack(">IQIQ", self.dim, self.exp_max, self.rounds, self.sigma)
        if self.seed is not None:
            payload += b"\x01" + struct.pack(">Q", self.seed)
        else:
            payload += b"\x00"
        for name in self.mat_names():
            payload += encode_matrix(self.matrices[name])
        return encode_frame("setup", payload)

    @classmethod
    def from_frame(cls, data: bytes) -> "ParamSet":
        kind, payload = decode_frame(data)
        if kind != "setup":
            raise FrameError(f"expected a setup frame, got {kind}")
        try:
            proto = _TAG_PROTOS[payload[0]]
            (p,) = struct.unpack(">Q", payload[1:9])
            ps = cls(protocol=proto, p=p)
            off = 9
            if proto == "rmpf":
                ps.rows, ps.cols = struct.unpack(">II", payload[off : off + 8])
                off += 8
            else:
                ps.dim, ps.exp_max, ps.rounds, ps.sigma = struct.unpack(
                    ">IQIQ", payload[off : off + 24]
                )
                off += 24
            if payload[off] == 1:
                (ps.seed,) = struct.unpack(">Q", payload[off + 1 : off + 9])
                off += 9
            else:
                off += 1
            rest = payload[off:]
            mats = {}
            for name in ps.mat_names():
                mats[name], rest = decode_matrix(rest, p)
            if rest:
                raise FrameError(f"{len(rest)} trailing bytes after setup payload")
            ps.matrices = mats
        except (IndexError, struct.error) as exc:
            raise FrameError(f"setup payload truncated: {exc}") from exc
        return ps


def generate_paramset(
    protocol: str,
    p: int,
    rng: random.Random,
    rows: int | None = None,
    cols: int | None = None,
    dim: int | None = None,
    exp_max: int | None = None,
    rounds: int | None = None,
    sigma: int = 1,
    seed: int | None = None,
) -> ParamSet:
    """Sample public matrices for the requested protocol and validate them."""
    params = FieldParams(p)
    if protocol == "rmpf":
        if rows is None or cols is None:
            raise ParameterError("rmpf needs rows and cols")
        mats = {
            name: sample_matrix(rows, cols, p, rng, mode="unit_entries")
            for name in ParamSet._RMPF_MATS
        }
        ps = ParamSet("rmpf", p, rows=rows, cols=cols, matrices=mats, seed=seed)
    elif protocol == "rdmpf":
        if dim is None or exp_max is None or rounds is None:
            raise ParameterError("rdmpf needs dim, exp_max, and rounds")
        while True:
            w = sample_matrix(dim, dim, p, rng, mode="unit_entries")
            if rank_mod_p(w, p).rank == dim:
                break
        mats = {
            "w": w,
            "base_xu": sample_rank_deficient_base(dim, params, rng),
            "base_yv": sample_rank_deficient_base(dim, params, rng),
        }
        ps = ParamSet(
            "rdmpf",
            p,
            dim=dim,
            exp_max=exp_max,
            rounds=rounds,
            sigma=sigma,
            matrices=mats,
            seed=seed,
        )
    else:
        raise ParameterError(f"unknown protocol {protocol!r}")
    ps.build_setup()  # validate before anything gets written
    return ps


def save_paramset(ps: ParamSet, path: str) -> tuple[str, str]:
    """Write the JSON document plus its binary mirror; returns both paths."""
    json_path = path
    bin_path = path + ".bin" if not path.endswith(".json") else path[: -len(".json")] + ".bin"
    with open(json_path, "w", encoding="utf-8") as fh:
        fh.write(ps.to_json())
    with open(bin_path, "wb") as fh:
        fh.write(ps.to_frame())
    return json_path, bin_path


def load_paramset(path: str) -> ParamSet:
    """Load either form; the binary mirror is detected by its magic."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[:4] == MAGIC:
        return ParamSet.from_frame(raw)
    return ParamSet.from_json(raw.decode("utf-8"))
