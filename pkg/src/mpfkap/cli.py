"""Command-line surface: setup, handshake, kem, bench, vectors.

Exit codes: 0 success, 2 parameter error, 3 protocol error, 4 transport
error.  Test mode (--test-mode) enables deterministic seeding (from the
MPFKAP_SEED environment variable or the parameter file) and accepts
injected private values for transcript replays; production runs refuse
both.
"""

from __future__ import annotations

import argparse
import os
import random
import sys

from . import bench as bench_mod
from . import known_answers
from .errors import (
    ParameterError,
    ProtocolError,
    SerializationError,
    TransportError,
)
from .kem import KemContext, KemMessage, auth_tag, kem_decapsulate, kem_encapsulate, kem_initiate
from .rdmpf import RdmpfSession, RdmpfSetup
from .rmpf import RmpfSession, RmpfSetup
from .transport import DEFAULT_TIMEOUT, open_transport
from .wire import (
    decode_token_list,
    encode_matrix,
    encode_token_list,
    generate_paramset,
    load_paramset,
    save_paramset,
)

EXIT_OK = 0
EXIT_PARAMETER = 2
EXIT_PROTOCOL = 3
EXIT_TRANSPORT = 4

SEED_ENV = "MPFKAP_SEED"

NONCE_LEN = 64
ENCAP_LEN = 64


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mpfkap",
        description="Matrix-power-function key agreement protocols and KEM",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_setup = sub.add_parser("setup", help="generate a shared parameter file")
    p_setup.add_argument("--protocol", choices=("rmpf", "rdmpf"), required=True)
    p_setup.add_argument("--p", type=int, default=known_answers.P, help="prime modulus")
    p_setup.add_argument("--rows", type=int, help="rmpf: matrix rows (must exceed cols)")
    p_setup.add_argument("--cols", type=int, help="rmpf: matrix cols")
    p_setup.add_argument("--dim", type=int, help="rdmpf: square dimension")
    p_setup.add_argument("--exp-max", type=int, default=10000, help="rdmpf: exponent ceiling")
    p_setup.add_argument("--rounds", type=int, default=1, help="rdmpf: session rounds")
    p_setup.add_argument("--sigma", type=int, default=1, help="rdmpf: shared session constant")
    p_setup.add_argument("--seed", type=int, help="embed a test-mode seed in the file")
    p_setup.add_argument("--out", required=True, help="output path (JSON; .bin mirror added)")
    p_setup.set_defaults(func=_cmd_setup)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--role", choices=("alice", "bob"), required=True)
    common.add_argument("--params", required=True, help="parameter file (JSON or binary)")
    common.add_argument(
        "--transport", required=True, help="file:DIR or tcp:HOST:PORT (bob listens)"
    )
    common.add_argument("--out", required=True, help="where to write the agreed key")
    common.add_argument("--timeout", type=float, default=DEFAULT_TIMEOUT)
    common.add_argument(
        "--test-mode", action="store_true", help="deterministic seeding, allow --inject"
    )
    common.add_argument(
        "--inject",
        action="append",
        default=[],
        metavar="NAME=VALUE",
        help="inject private values (test mode only); rmpf: lambda=, omega=; "
        "rdmpf: rand_l=v1,v2,..., rand_r=v1,v2,...",
    )

    p_hs = sub.add_parser("handshake", parents=[common], help="run one key agreement")
    p_hs.set_defaults(func=_cmd_handshake)

    p_kem = sub.add_parser("kem", parents=[common], help="run the KEM over rdmpf")
    p_kem.add_argument("--eta0", required=True, help="64-byte shared root nonce file")
    p_kem.add_argument("--auth-a", required=True, help="initiating party identity (tag = SHA3-256)")
    p_kem.add_argument("--auth-b", required=True, help="responding party identity (tag = SHA3-256)")
    p_kem.set_defaults(func=_cmd_kem)

    p_bench = sub.add_parser("bench", help="parameter-sensitivity timings")
    p_bench.add_argument("--trials", type=int, default=10)
    p_bench.add_argument(
        "--point",
        action="append",
        metavar="DIM:P:EXPMAX",
        help="grid point, repeatable (default: the standard sensitivity grid)",
    )
    p_bench.add_argument("--out", help="write CSV here (default stdout)")
    p_bench.set_defaults(func=_cmd_bench)

    p_vec = sub.add_parser("vectors", help="replay every known-answer vector")
    p_vec.set_defaults(func=_cmd_vectors)

    return parser


def _cmd_setup(args) -> int:
    rng = random.Random(args.seed) if args.seed is not None else random.SystemRandom()
    ps = generate_paramset(
        args.protocol,
        args.p,
        rng,
        rows=args.rows,
        cols=args.cols,
        dim=args.dim,
        exp_max=args.exp_max,
        rounds=args.rounds,
        sigma=args.sigma,
        seed=args.seed,
    )
    for warning in ps.build_setup().floor_warnings():
        print(f"warning: {warning}", file=sys.stderr)
    json_path, bin_path = save_paramset(ps, args.out)
    print(f"wrote {json_path} and {bin_path}")
    return EXIT_OK


def _parse_injections(args, protocol: str) -> dict:
    if args.inject and not args.test_mode:
        raise ParameterError("--inject requires --test-mode")
    out: dict = {}
    allowed = {"rmpf": ("lambda", "omega"), "rdmpf": ("rand_l", "rand_r")}[protocol]
    for item in args.inject:
        name, sep, value = item.partition("=")
        if not sep or name not in allowed:
            raise ParameterError(
                f"bad injection {item!r}; {protocol} accepts {', '.join(allowed)}"
            )
        try:
            if protocol == "rmpf":
                out[name] = int(value)
            else:
                out[name] = [int(v) for v in value.split(",")]
        except ValueError as exc:
            raise ParameterError(f"bad injection value in {item!r}") from exc
    return out


def _session_rng(args, ps) -> random.Random:
    if not args.test_mode:
        return random.SystemRandom()
    env = os.environ.get(SEED_ENV)
    if env is not None:
        try:
            seed = int(env)
        except ValueError as exc:
            raise ParameterError(f"{SEED_ENV} must be an integer, got {env!r}") from exc
    else:
        seed = ps.seed if ps.seed is not None else 0
    return random.Random(f"{seed}/{args.role}")


def _cmd_handshake(args) -> int:
    ps = load_paramset(args.params)
    setup = ps.build_setup()
    inject = _parse_injections(args, ps.protocol)
    rng = _session_rng(args, ps)
    transport = open_transport(args.transport, args.role, args.timeout)
    try:
        if isinstance(setup, RmpfSetup):
            key_bytes = _handshake_rmpf(setup, rng, transport, args.role, inject)
        else:
            key_bytes = _handshake_rdmpf(setup, rng, transport, args.role, inject)
    except ProtocolError as exc:
        _report_error(transport, exc)
        raise
    finally:
        transport.close()
    with open(args.out, "wb") as fh:
        fh.write(key_bytes)
    print(f"wrote {len(key_bytes)}-byte key to {args.out}")
    return EXIT_OK


def _handshake_rmpf(setup: RmpfSetup, rng, transport, role: str, inject: dict) -> bytes:
    session = RmpfSession(setup, rng)
    session.generate_token(inject.get("lambda"), inject.get("omega"))
    payload = encode_token_list([session.token])
    if role == "alice":
        transport.send("token-list", payload)
        peer_payload = transport.recv("token-list")
    else:
        peer_payload = transport.recv("token-list")
        transport.send("token-list", payload)
    peer_mats = decode_token_list(peer_payload, setup.params.p)
    if len(peer_mats) != 1:
        raise ProtocolError(f"expected one token matrix, peer sent {len(peer_mats)}")
    return encode_matrix(session.derive_key(peer_mats[0]))


def _handshake_rdmpf(setup: RdmpfSetup, rng, transport, role: str, inject: dict) -> bytes:
    session = RdmpfSession(setup, rng)
    injected = None
    if "rand_l" in inject or "rand_r" in inject:
        ls = inject.get("rand_l")
        rs = inject.get("rand_r")
        if ls is None or rs is None or len(ls) != len(rs):
            raise ParameterError("rdmpf injection needs matching rand_l and rand_r lists")
        injected = list(zip(ls, rs))
    session.generate_tokens(injected)
    payload = encode_token_list(session.tokens)
    if role == "alice":
        transport.send("token-list", payload)
        peer_payload = transport.recv("token-list")
    else:
        peer_payload = transport.recv("token-list")
        transport.send("token-list", payload)
    peer_mats = decode_token_list(peer_payload, setup.params.p)
    return session.derive(peer_mats).digest


def _cmd_kem(args) -> int:
    ps = load_paramset(args.params)
    if ps.protocol != "rdmpf":
        raise ParameterError("the KEM runs over rdmpf parameter sets")
    setup = ps.build_setup()
    _parse_injections(args, ps.protocol)  # validates --inject gating; kem takes none
    if args.inject:
        raise ParameterError("the kem command does not accept injected privates")
    rng = _session_rng(args, ps)
    with open(args.eta0, "rb") as fh:
        eta0 = fh.read()
    if len(eta0) != NONCE_LEN:
        raise ParameterError(f"eta0 file must hold {NONCE_LEN} bytes, got {len(eta0)}")
    ctx = KemContext(eta0, auth_tag(args.auth_a), auth_tag(args.auth_b))

    transport = open_transport(args.transport, args.role, args.timeout)
    try:
        if args.role == "bob":
            state, close_b = kem_initiate(ctx, setup, rng)
            transport.send("kem-close-b", close_b)
            payload = transport.recv("kem-encap-msg")
            k = kem_decapsulate(state, _parse_encap_payload(payload))
        else:
            close_b = transport.recv("kem-close-b")
            k, msg = kem_encapsulate(ctx, setup, close_b, rng)
            transport.send("kem-encap-msg", msg.encap + msg.eta_m + msg.close_a)
    except ProtocolError as exc:
        _report_error(transport, exc)
        raise
    finally:
        transport.close()
    with open(args.out, "wb") as fh:
        fh.write(k)
    print(f"wrote {len(k)}-byte encapsulated key to {args.out}")
    return EXIT_OK


def _parse_encap_payload(payload: bytes) -> KemMessage:
    if len(payload) < ENCAP_LEN + NONCE_LEN:
        raise ProtocolError(f"encapsulation message truncated at {len(payload)} bytes")
    return KemMessage(
        encap=payload[:ENCAP_LEN],
        eta_m=payload[ENCAP_LEN : ENCAP_LEN + NONCE_LEN],
        close_a=payload[ENCAP_LEN + NONCE_LEN :],
    )


def _report_error(transport, exc: Exception) -> None:
    try:
        transport.send("error", str(exc).encode())
    except Exception:
        pass


def _cmd_bench(args) -> int:
    if args.point:
        points = []
        for spec in args.point:
            try:
                dim, p, exp_max = (int(v) for v in spec.split(":"))
            except ValueError as exc:
                raise ParameterError(f"bad grid point {spec!r}, need DIM:P:EXPMAX") from exc
            points.append((dim, p, exp_max))
    else:
        points = list(bench_mod.TABLE_GRID)
    records = bench_mod.bench_rdmpf(points, trials=args.trials)
    baseline = bench_mod.BASELINE_POINT if bench_mod.BASELINE_POINT in points else None
    csv_text, summary = bench_mod.bench_report(records, baseline)
    print(summary)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(csv_text)
        print(f"wrote {args.out}")
    else:
        print(csv_text, end="")
    return EXIT_OK


def _cmd_vectors(args) -> int:
    results = known_answers.check_all()
    width = max(len(label) for label, _ in results)
    failures = 0
    for label, ok in results:
        print(f"{label:<{width}}  {'PASS' if ok else 'FAIL'}")
        failures += 0 if ok else 1
    print(f"{len(results) - failures}/{len(results)} vectors passed")
    return EXIT_OK if failures == 0 else EXIT_PROTOCOL


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParameterError, SerializationError) as exc:
        print(f"parameter error: {exc}", file=sys.stderr)
        return EXIT_PARAMETER
    except TransportError as exc:
        print(f"transport error: {exc}", file=sys.stderr)
        return EXIT_TRANSPORT
    except ProtocolError as exc:
        print(f"protocol error: {exc}", file=sys.stderr)
        return EXIT_PROTOCOL
    except OSError as exc:
        print(f"parameter error: {exc}", file=sys.stderr)
        return EXIT_PARAMETER


if __name__ == "__main__":
    sys.exit(main())
