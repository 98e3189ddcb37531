"""TCP serve/fetch over the JSON-lines wire format.

One request per connection: the client writes a single frame, the server
writes a single reply frame and closes.  The server keeps no per-client
state, so connections are handled concurrently.
"""

from __future__ import annotations

import logging
import socket
import socketserver
from typing import Sequence, Tuple

from .errors import FetchError, PirSiError, ServerRejected, WireError
from .gf import FieldParams, Message
from .gpc import GpcQuery, gpc_answer
from .grs import grs_answer
from .dbfile import read_database
from . import wire

log = logging.getLogger(__name__)

MAX_FRAME = 1 << 24


def parse_address(address) -> Tuple[str, int]:
    if isinstance(address, tuple):
        return address
    host, sep, port = str(address).rpartition(":")
    if not sep:
        raise ValueError(f"address must be host:port, got {address!r}")
    return host or "127.0.0.1", int(port)


def handle_frame(line: bytes, fp: FieldParams, db: Sequence[Message]) -> bytes:
    """Compute the reply frame for one request; never raises on bad input."""
    try:
        obj = wire.decode_frame(line)
        kind = obj["type"]
        if kind == "hello":
            return wire.encode_hello(fp, len(db))
        if kind != "query":
            return wire.encode_error(f"unexpected frame type {kind!r}")
        query = wire.query_from_obj(obj)
        if (query.fp.q, query.fp.m) != (fp.q, fp.m):
            return wire.encode_error(
                f"field mismatch: query uses q={query.fp.q}, m={query.fp.m}; database has q={fp.q}, m={fp.m}"
            )
        if query.K != len(db):
            return wire.encode_error(f"query covers K={query.K} messages, database has {len(db)}")
        answer = gpc_answer(query, db) if isinstance(query, GpcQuery) else grs_answer(query, db)
        return wire.encode_answer(answer)
    except (PirSiError, ValueError) as exc:
        return wire.encode_error(str(exc))


class _Handler(socketserver.StreamRequestHandler):
    def handle(self):
        line = self.rfile.readline(MAX_FRAME)
        if not line:
            return
        reply = handle_frame(line, self.server.fp, self.server.db)
        self.wfile.write(reply)


class PirServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, address, fp: FieldParams, db: Sequence[Message]):
        self.fp = fp
        self.db = list(db)
        super().__init__(parse_address(address), _Handler)


def make_server(db_path, address) -> PirServer:
    fp, db = read_database(db_path)
    return PirServer(address, fp, db)


def serve(db_path, address) -> None:
    """Serve the database at ``address`` until interrupted."""
    server = make_server(db_path, address)
    host, port = server.server_address[:2]
    log.info("serving %d messages over F_%d^%d on %s:%d", len(server.db), server.fp.q, server.fp.m, host, port)
    with server:
        try:
            server.serve_forever()
        except KeyboardInterrupt:
            pass


def exchange(address, frame: bytes, timeout: float = 10.0) -> dict:
    """Send one frame, return the parsed reply."""
    try:
        with socket.create_connection(parse_address(address), timeout=timeout) as sock:
            sock.sendall(frame)
            sock.shutdown(socket.SHUT_WR)
            chunks = []
            while True:
                chunk = sock.recv(65536)
                if not chunk:
                    break
                chunks.append(chunk)
    except OSError as exc:
        raise FetchError(f"connection to {address} failed: {exc}") from exc
    data = b"".join(chunks)
    if not data.endswith(b"\n"):
        raise FetchError("connection closed before a complete reply arrived")
    obj = wire.decode_frame(data)
    if obj["type"] == "error":
        raise ServerRejected(obj.get("reason", ""))
    return obj


def hello(address) -> Tuple[FieldParams, int]:
    obj = exchange(address, wire.encode_hello())
    if obj["type"] != "hello":
        raise WireError(f"expected hello reply, got {obj['type']!r}")
    return FieldParams(obj["q"], obj["m"]), obj["K"]


def fetch(address, query) -> wire.Answer:
    """Send ``query`` and return the server's answer, grouped for decoding."""
    obj = exchange(address, wire.encode_query(query))
    return wire.answer_for_query(query, wire.answer_symbols_from_obj(obj))
