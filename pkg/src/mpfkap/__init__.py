"""Matrix-power-function key agreement toolkit.

Implements two key agreement protocols over Z_p integer matrices (a
rectangular single-shot variant and a multi-round rank-deficient
variant), a KEM wrapper built from HMAC-SHA3-512 masking, and the wire
format plus CLI that let two processes run either protocol end to end.
"""

from .core import (
    DEFAULT_PRIME,
    FieldParams,
    Matrix,
    RankProfile,
    canonical_bytes,
    is_probable_prime,
    mat_mul_mod,
    mat_pow_mod,
    mat_scalar_mul_mod,
    matrix_values,
    mod_pow,
    rank_mod_p,
    sample_matrix,
)
from .errors import (
    DegenerateSetupError,
    FrameError,
    MpfKapError,
    ParameterError,
    ProtocolError,
    RestartRequired,
    SerializationError,
    TransportError,
)
from .kem import (
    KemContext,
    KemMessage,
    KemResponderState,
    auth_tag,
    hmac512,
    kem_decapsulate,
    kem_encapsulate,
    kem_initiate,
    mask_stream,
)
from .rdmpf import (
    RdmpfRoundPrivate,
    RdmpfSession,
    RdmpfSetup,
    SessionKey,
    SessionTranscript,
    generate_setup,
    parse_token_list,
    rdmpf,
    round_key,
    round_keygen,
    session_digest,
)
from .rmpf import (
    RmpfPrivate,
    RmpfSession,
    RmpfSetup,
    derive_key,
    keygen,
    mpf_double,
    mpf_left,
    mpf_right,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_PRIME",
    "DegenerateSetupError",
    "FieldParams",
    "FrameError",
    "KemContext",
    "KemMessage",
    "KemResponderState",
    "Matrix",
    "MpfKapError",
    "ParameterError",
    "ProtocolError",
    "RankProfile",
    "RdmpfRoundPrivate",
    "RdmpfSession",
    "RdmpfSetup",
    "RestartRequired",
    "RmpfPrivate",
    "RmpfSession",
    "RmpfSetup",
    "SerializationError",
    "SessionKey",
    "SessionTranscript",
    "TransportError",
    "auth_tag",
    "canonical_bytes",
    "derive_key",
    "generate_setup",
    "hmac512",
    "is_probable_prime",
    "kem_decapsulate",
    "kem_encapsulate",
    "kem_initiate",
    "keygen",
    "mask_stream",
    "mat_mul_mod",
    "mat_pow_mod",
    "mat_scalar_mul_mod",
    "matrix_values",
    "mod_pow",
    "mpf_double",
    "mpf_left",
    "mpf_right",
    "parse_token_list",
    "rank_mod_p",
    "rdmpf",
    "round_key",
    "round_keygen",
    "sample_matrix",
    "session_digest",
]
