"""Minimal WebSocket bridge for browser stations.

Accepts RFC 6455 upgrades and relays newline-delimited records between
each browser socket and the plain TCP telemetry endpoint, one text
frame per record in both directions. Text frames only; no extensions.
"""

import base64
import hashlib
import socket
import struct
import threading

_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"


def _handshake(sock: socket.socket) -> bool:
    data = b""
    while b"\r\n\r\n" not in data:
        chunk = sock.recv(4096)
        if not chunk:
            return False
        data += chunk
        if len(data) > 65536:
            return False
    headers = {}
    for line in data.split(b"\r\n")[1:]:
        if b":" in line:
            k, _, v = line.partition(b":")
            headers[k.strip().lower()] = v.strip()
    key = headers.get(b"sec-websocket-key")
    if key is None:
        return False
    accept = base64.b64encode(
        hashlib.sha1(key + _GUID.encode()).digest()
    ).decode()
    sock.sendall(
        (
            "HTTP/1.1 101 Switching Protocols\r\n"
            "Upgrade: websocket\r\n"
            "Connection: Upgrade\r\n"
            "Sec-WebSocket-Accept: %s\r\n\r\n" % accept
        ).encode()
    )
    return True


def encode_text_frame(payload: bytes) -> bytes:
    header = b"\x81"
    n = len(payload)
    if n < 126:
        header += bytes([n])
    elif n < 65536:
        header += b"\x7e" + struct.pack(">H", n)
    else:
        header += b"\x7f" + struct.pack(">Q", n)
    return header + payload


def _recv_exact(sock, n):
    buf = b""
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            raise OSError("socket closed")
        buf += chunk
    return buf


def read_frame(sock):
    """Returns (opcode, payload); raises OSError on close/disconnect."""
    head = _recv_exact(sock, 2)
    opcode = head[0] & 0x0F
    masked = head[1] & 0x80
    n = head[1] & 0x7F
    if n == 126:
        n = struct.unpack(">H", _recv_exact(sock, 2))[0]
    elif n == 127:
        n = struct.unpack(">Q", _recv_exact(sock, 8))[0]
    mask = _recv_exact(sock, 4) if masked else None
    payload = _recv_exact(sock, n) if n else b""
    if mask:
        payload = bytes(b ^ mask[i % 4] for i, b in enumerate(payload))
    return opcode, payload


class WebSocketBridge:
    """Bridges browser WebSocket clients onto the TCP line protocol."""

    def __init__(self, host: str, port: int, tcp_endpoint):
        self._tcp_endpoint = tcp_endpoint
        self._listen = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._listen.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._listen.bind((host, port))
        self._listen.listen(8)
        self._running = False

    @property
    def endpoint(self):
        return self._listen.getsockname()

    def start(self):
        self._running = True
        threading.Thread(target=self._accept_loop, daemon=True).start()

    def stop(self):
        self._running = False
        try:
            self._listen.close()
        except OSError:
            pass

    def _accept_loop(self):
        while self._running:
            try:
                ws_sock, _ = self._listen.accept()
            except OSError:
                return
            threading.Thread(target=self._serve, args=(ws_sock,), daemon=True).start()

    def _serve(self, ws_sock: socket.socket):
        tcp = None
        try:
            if not _handshake(ws_sock):
                return
            tcp = socket.create_connection(self._tcp_endpoint)

            def tcp_to_ws():
                try:
                    fh = tcp.makefile("rb")
                    for line in fh:
                        ws_sock.sendall(encode_text_frame(line.rstrip(b"\n")))
                except OSError:
                    pass
                finally:
                    try:
                        ws_sock.close()
                    except OSError:
                        pass

            threading.Thread(target=tcp_to_ws, daemon=True).start()
            while True:
                opcode, payload = read_frame(ws_sock)
                if opcode == 0x8:  # close
                    break
                if opcode == 0x9:  # ping -> pong
                    ws_sock.sendall(b"\x8a" + bytes([len(payload)]) + payload)
                    continue
                if opcode in (0x1, 0x2) and payload:
                    if not payload.endswith(b"\n"):
                        payload += b"\n"
                    tcp.sendall(payload)
        except OSError:
            pass
        finally:
            for s in (tcp, ws_sock):
                if s is not None:
                    try:
                        s.close()
                    except OSError:
                        pass
