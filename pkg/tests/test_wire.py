import random

import pytest

from mpfkap import FrameError, Matrix, ParameterError
from mpfkap import known_answers as ka
from mpfkap.wire import (
    MAGIC,
    ParamSet,
    decode_frame,
    decode_matrix,
    decode_token_list,
    encode_frame,
    encode_matrix,
    encode_token_list,
    generate_paramset,
    load_paramset,
    save_paramset,
)


class TestFrames:
    def test_round_trip(self):
        rng = random.Random(50)
        for _ in range(100):
            kind = rng.choice(["setup", "token-list", "kem-close-b", "kem-encap-msg", "error"])
            payload = bytes(rng.randrange(256) for _ in range(rng.randrange(200)))
            assert decode_frame(encode_frame(kind, payload)) == (kind, payload)

    def test_truncated(self):
        frame = encode_frame("token-list", b"payload")
        with pytest.raises(FrameError):
            decode_frame(frame[:-1])

    def test_header_too_short(self):
        with pytest.raises(FrameError):
            decode_frame(b"MPFX\x01")

    def test_wrong_magic(self):
        frame = bytearray(encode_frame("token-list", b"x"))
        frame[0] ^= 0xFF
        with pytest.raises(FrameError):
            decode_frame(bytes(frame))

    def test_wrong_version(self):
        frame = bytearray(encode_frame("token-list", b"x"))
        frame[4] = 9
        with pytest.raises(FrameError):
            decode_frame(bytes(frame))

    def test_unknown_kind(self):
        frame = bytearray(encode_frame("token-list", b"x"))
        frame[5] = 0x7F
        with pytest.raises(FrameError):
            decode_frame(bytes(frame))

    def test_trailing_bytes(self):
        frame = encode_frame("token-list", b"x") + b"junk"
        with pytest.raises(FrameError):
            decode_frame(frame)

    def test_unknown_kind_on_encode(self):
        with pytest.raises(ParameterError):
            encode_frame("bogus", b"")


class TestMatrixCodec:
    def test_round_trip(self):
        m = Matrix.from_rows(ka.RMPF_BASE, ka.P)
        decoded, rest = decode_matrix(encode_matrix(m), ka.P)
        assert decoded == m and rest == b""

    def test_entry_range_checked(self):
        m = Matrix.from_rows([[70000]], 2**17)
        with pytest.raises(FrameError):
            decode_matrix(encode_matrix(m), 65537)

    def test_truncation_detected(self):
        data = encode_matrix(Matrix.from_rows([[1, 2], [3, 4]], 7))
        with pytest.raises(FrameError):
            decode_matrix(data[:-3], 7)

    def test_token_list_round_trip(self):
        rng = random.Random(51)
        mats = [
            Matrix.from_rows([[rng.randrange(7) for _ in range(2)] for _ in range(2)], 7)
            for _ in range(3)
        ]
        assert decode_token_list(encode_token_list(mats), 7) == mats

    def test_token_list_trailing_rejected(self):
        data = encode_token_list([Matrix.identity(2, 7)]) + b"\x00"
        with pytest.raises(FrameError):
            decode_token_list(data, 7)


class TestParamSet:
    def test_rmpf_json_round_trip(self):
        rng = random.Random(52)
        ps = generate_paramset("rmpf", 65537, rng, rows=5, cols=3, seed=11)
        again = ParamSet.from_json(ps.to_json())
        assert again.protocol == "rmpf"
        assert again.p == 65537
        assert again.seed == 11
        assert again.matrices == ps.matrices

    def test_rdmpf_json_round_trip(self):
        rng = random.Random(53)
        ps = generate_paramset("rdmpf", 65537, rng, dim=3, exp_max=500, rounds=2, sigma=5)
        again = ParamSet.from_json(ps.to_json())
        assert (again.dim, again.exp_max, again.rounds, again.sigma) == (3, 500, 2, 5)
        assert again.matrices == ps.matrices

    def test_binary_mirror_round_trip(self):
        rng = random.Random(54)
        for kwargs in (
            dict(rows=4, cols=2),
            dict(rows=4, cols=2, seed=3),
        ):
            ps = generate_paramset("rmpf", 65537, rng, **kwargs)
            again = ParamSet.from_frame(ps.to_frame())
            assert again.matrices == ps.matrices
            assert again.seed == ps.seed
        ps = generate_paramset("rdmpf", 997, rng, dim=3, exp_max=100, rounds=1)
        again = ParamSet.from_frame(ps.to_frame())
        assert again.matrices == ps.matrices
        assert (again.dim, again.exp_max, again.rounds, again.sigma) == (3, 100, 1, 1)

    def test_save_and_sniff_both_forms(self, tmp_path):
        rng = random.Random(55)
        ps = generate_paramset("rdmpf", 65537, rng, dim=3, exp_max=500, rounds=1)
        json_path, bin_path = save_paramset(ps, str(tmp_path / "params.json"))
        from_json = load_paramset(json_path)
        from_bin = load_paramset(bin_path)
        assert from_json.matrices == from_bin.matrices == ps.matrices
        with open(bin_path, "rb") as fh:
            assert fh.read(4) == MAGIC

    def test_build_setup_validates(self):
        ps = ParamSet(protocol="rmpf", p=65537, rows=3, cols=2, matrices={})
        with pytest.raises(ParameterError):
            ps.build_setup()

    def test_bad_json_rejected(self):
        with pytest.raises(ParameterError):
            ParamSet.from_json("{not json")
        with pytest.raises(ParameterError):
            ParamSet.from_json('{"format": "something-else"}')

    def test_generate_rejects_bad_dims(self):
        rng = random.Random(56)
        with pytest.raises(ParameterError):
            generate_paramset("rmpf", 65537, rng, rows=3, cols=3)
        with pytest.raises(ParameterError):
            generate_paramset("rmpf", 65537, rng, rows=3)

    def test_known_instance_as_paramset(self):
        p = ka.P
        ps = ParamSet(
            protocol="rdmpf",
            p=p,
            dim=5,
            exp_max=ka.RDMPF_EXP_MAX,
            rounds=ka.RDMPF_ROUNDS,
            matrices={
                "w": Matrix.from_rows(ka.RDMPF_W, p),
                "base_xu": Matrix.from_rows(ka.RDMPF_BASE_XU, p),
                "base_yv": Matrix.from_rows(ka.RDMPF_BASE_YV, p),
            },
        )
        setup = ps.build_setup()
        assert setup.dim == 5
        again = ParamSet.from_frame(ps.to_frame())
        assert again.matrices == ps.matrices
