"""Frame exchange between two processes: shared directory or TCP.

The file transport drops each frame into the shared directory under
"<role>.<kind>.frame" (written atomically) and polls for the peer's
file.  The TCP transport is a minimal length-prefixed exchange: bob
listens, alice connects, one peer at a time, no retries beyond the
connect deadline.
"""

from __future__ import annotations

import os
import socket
import time

from .errors import ProtocolError, TransportError
from .wire import HEADER_LEN, decode_frame, encode_frame

ROLES = ("alice", "bob")
POLL_INTERVAL = 0.02
DEFAULT_TIMEOUT = 15.0


def peer_of(role: str) -> str:
    if role not in ROLES:
        raise TransportError(f"unknown role {role!r}")
    return "bob" if role == "alice" else "alice"


class FileTransport:
    """Exchange frames through files in a shared directory."""

    def __init__(self, directory: str, role: str, timeout: float = DEFAULT_TIMEOUT):
        self.directory = directory
        self.role = role
        self.peer = peer_of(role)
        self.timeout = timeout
        if not os.path.isdir(directory):
            raise TransportError(f"transport directory {directory!r} does not exist")

    def send(self, kind: str, payload: bytes) -> None:
        final = os.path.join(self.directory, f"{self.role}.{kind}.frame")
        tmp = final + ".tmp"
        with open(tmp, "wb") as fh:
            fh.write(encode_frame(kind, payload))
        os.replace(tmp, final)

    def recv(self, kind: str) -> bytes:
        path = os.path.join(self.directory, f"{self.peer}.{kind}.frame")
        err_path = os.path.join(self.directory, f"{self.peer}.error.frame")
        deadline = time.monotonic() + self.timeout
        while not os.path.exists(path):
            if os.path.exists(err_path):
                with open(err_path, "rb") as fh:
                    return _expect_kind(fh.read(), kind)
            if time.monotonic() > deadline:
                raise TransportError(f"timed out waiting for {path}")
            time.sleep(POLL_INTERVAL)
        with open(path, "rb") as fh:
            data = fh.read()
        return _expect_kind(data, kind)

    def close(self) -> None:
        pass


class TcpTransport:
    """Length-prefixed frame exchange over one TCP connection.

    Bob binds and accepts a single peer; Alice connects, retrying until
    the deadline so start order does not matter.
    """

    def __init__(self, host: str, port: int, role: str, timeout: float = DEFAULT_TIMEOUT):
        self.role = role
        self.timeout = timeout
        self._listener: socket.socket | None = None
        self._sock: socket.socket | None = None
        if role == "bob":
            try:
                self._listener = socket.create_server((host, port))
                self._listener.settimeout(timeout)
            except OSError as exc:
                raise TransportError(f"cannot listen on {host}:{port}: {exc}") from exc
        elif role == "alice":
            deadline = time.monotonic() + timeout
            while True:
                try:
                    self._sock = socket.create_connection((host, port), timeout=timeout)
                    break
                except OSError as exc:
                    if time.monotonic() > deadline:
                        raise TransportError(
                            f"cannot connect to {host}:{port}: {exc}"
                        ) from exc
                    time.sleep(POLL_INTERVAL)
            self._sock.settimeout(timeout)
        else:
            raise TransportError(f"unknown role {role!r}")

    def _conn(self) -> socket.socket:
        if self._sock is None:
            assert self._listener is not None
            try:
                self._sock, _ = self._listener.accept()
            except socket.timeout as exc:
                raise TransportError("timed out waiting for the peer to connect") from exc
            self._sock.settimeout(self.timeout)
        return self._sock

    def send(self, kind: str, payload: bytes) -> None:
        try:
            self._conn().sendall(encode_frame(kind, payload))
        except OSError as exc:
            raise TransportError(f"send failed: {exc}") from exc

    def recv(self, kind: str) -> bytes:
        conn = self._conn()
        try:
            header = _read_exact(conn, HEADER_LEN)
            length = int.from_bytes(header[6:10], "big")
            data = header + _read_exact(conn, length)
        except socket.timeout as exc:
            raise TransportError("timed out waiting for a frame") from exc
        except OSError as exc:
            raise TransportError(f"recv failed: {exc}") from exc
        return _expect_kind(data, kind)

    def close(self) -> None:
        for s in (self._sock, self._listener):
            if s is not None:
                try:
                    s.close()
                except OSError:
                    pass
        self._sock = None
        self._listener = None


def _read_exact(conn: socket.socket, n: int) -> bytes:
    buf = b""
    while len(buf) < n:
        chunk = conn.recv(n - len(buf))
        if not chunk:
            raise TransportError("connection closed mid-frame")
        buf += chunk
    return buf


def _expect_kind(data: bytes, kind: str) -> bytes:
    got, payload = decode_frame(data)
    if got == "error":
        raise ProtocolError(f"peer reported: {payload.decode('utf-8', 'replace')}")
    if got != kind:
        raise ProtocolError(f"expected a {kind} frame, peer sent {got}")
    return payload


def open_transport(spec: str, role: str, timeout: float = DEFAULT_TIMEOUT):
    """Parse "file:DIR" or "tcp:HOST:PORT" into a transport instance."""
    if spec.startswith("file:"):
        return FileTransport(spec[len("file:") :], role, timeout)
    if spec.startswith("tcp:"):
        rest = spec[len("tcp:") :]
        host, sep, port = rest.rpartition(":")
        if not sep or not host:
            raise TransportError(f"tcp transport needs tcp:HOST:PORT, got {spec!r}")
        try:
            port_no = int(port)
        except ValueError as exc:
            raise TransportError(f"bad port in {spec!r}") from exc
        return TcpTransport(host, port_no, role, timeout)
    raise TransportError(f"unknown transport {spec!r} (use file:DIR or tcp:HOST:PORT)")
