"""Telemetry stream server and simulation scheduler.

One publisher (the simulation loop) fans frames out to any number of
connected stations and to the CSV log; per-connection reader threads
validate incoming commands into a single queue that the loop drains
between control ticks. Slow consumers are dropped, not waited on.
"""

import socket
import threading
import time
from collections import deque

from . import telemetry
from .sim import Simulation
from .telemetry import FrameLog, ProtocolError, decode_command, encode_frame


class _Client:
    _ids = 0

    def __init__(self, sock: socket.socket, max_pending: int):
        _Client._ids += 1
        self.id = _Client._ids
        self.sock = sock
        self.pending = deque()
        self.max_pending = max_pending
        self.lock = threading.Lock()
        self.has_data = threading.Event()
        self.alive = True
        self.in_flight = False
        self.last_seq = None

    def send(self, data: bytes) -> bool:
        """Queue bytes for the writer thread; False if the client is full."""
        with self.lock:
            if not self.alive:
                return False
            if len(self.pending) >= self.max_pending:
                return False
            self.pending.append(data)
        self.has_data.set()
        return True

    def close(self):
        with self.lock:
            self.alive = False
        self.has_data.set()
        try:
            self.sock.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        try:
            self.sock.close()
        except OSError:
            pass


class TelemetryServer:
    def __init__(self, host: str = "127.0.0.1", port: int = 0, max_pending: int = 4096):
        self._listen = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._listen.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._listen.bind((host, port))
        self._listen.listen(16)
        self._max_pending = max_pending
        self._clients: list[_Client] = []
        self._clients_lock = threading.Lock()
        self._commands = deque()  # (client, Command)
        self._commands_lock = threading.Lock()
        self._running = False
        self._accept_thread = None

    @property
    def endpoint(self):
        return self._listen.getsockname()

    def start(self):
        self._running = True
        self._accept_thread = threading.Thread(target=self._accept_loop, daemon=True)
        self._accept_thread.start()

    def stop(self):
        self._running = False
        try:
            self._listen.close()
        except OSError:
            pass
        self.flush()
        with self._clients_lock:
            clients = list(self._clients)
        for c in clients:
            self._drop(c)

    def flush(self, timeout: float = 2.0):
        """Best-effort wait for queued frames to reach the sockets."""
        deadline = time.monotonic() + timeout
        while time.monotonic() < deadline:
            with self._clients_lock:
                clients = list(self._clients)
            busy = False
            for c in clients:
                with c.lock:
                    if c.alive and (c.pending or c.in_flight):
                        busy = True
            if not busy:
                return
            time.sleep(0.001)

    def _accept_loop(self):
        while self._running:
            try:
                sock, _ = self._listen.accept()
            except OSError:
                return
            client = _Client(sock, self._max_pending)
            with self._clients_lock:
                self._clients.append(client)
            threading.Thread(target=self._writer_loop, args=(client,), daemon=True).start()
            threading.Thread(target=self._reader_loop, args=(client,), daemon=True).start()

    def _drop(self, client: _Client):
        client.close()
        with self._clients_lock:
            if client in self._clients:
                self._clients.remove(client)

    def _writer_loop(self, client: _Client):
        while True:
            client.has_data.wait()
            while True:
                with client.lock:
                    if not client.alive:
                        return
                    if not client.pending:
                        client.has_data.clear()
                        break
                    data = client.pending.popleft()
                    client.in_flight = True
                try:
                    client.sock.sendall(data)
                except OSError:
                    self._drop(client)
                    return
                finally:
                    with client.lock:
                        client.in_flight = False

    def _reader_loop(self, client: _Client):
        try:
            fh = client.sock.makefile("rb")
            for raw in fh:
                try:
                    cmd = decode_command(raw, client.last_seq)
                except ProtocolError as exc:
                    client.send(
                        ("ERR %s %s\n" % (type(exc).__name__, exc)).encode()
                    )
                    continue
                client.last_seq = cmd.seq
                with self._commands_lock:
                    self._commands.append((client, cmd))
        except OSError:
            pass
        finally:
            self._drop(client)

    def drain_commands(self):
        """All commands received so far, in arrival order."""
        with self._commands_lock:
            out = list(self._commands)
            self._commands.clear()
        return out

    def broadcast(self, data: bytes):
        with self._clients_lock:
            clients = list(self._clients)
        for c in clients:
            if not c.send(data):
                self._drop(c)  # slow consumer: disconnect, never stall

    def client_count(self) -> int:
        with self._clients_lock:
            return len(self._clients)


def run_simulation_server(
    sim: Simulation,
    server: TelemetryServer | None,
    rate_hz: float = 35.0,
    realtime: bool = False,
    log_path=None,
    duration: float | None = None,
    stop_event: threading.Event | None = None,
):
    """Drive the simulation, publishing frames every 1/rate of sim time.

    Frames are simulation-clocked; the realtime flag only throttles the
    loop to wall time for live piloting. Commands drain between ticks
    and each application is acknowledged with the tick index it took
    effect before, which makes a logged session exactly replayable.
    """
    if not 1 <= rate_hz <= 100:
        raise ValueError("rate must be in [1, 100] Hz")
    log = FrameLog(log_path) if log_path else None
    frame_index = 0

    def emit_due(s: Simulation):
        nonlocal frame_index
        while frame_index / rate_hz <= s.time + 1e-12:
            if duration is not None and frame_index / rate_hz >= duration - 1e-12:
                return
            frame = s.telemetry_frame(round(1000.0 * frame_index / rate_hz))
            data = encode_frame(frame)
            if server is not None:
                server.broadcast(data)
            if log is not None:
                log.append(frame)
            frame_index += 1

    wall_start = time.monotonic()
    try:
        emit_due(sim)  # frame at t = 0
        while True:
            if stop_event is not None and stop_event.is_set():
                break
            if duration is not None and sim.time >= duration - 1e-9:
                break
            if server is not None:
                for client, cmd in server.drain_commands():
                    sim.apply_command(cmd)
                    client.send(
                        ("OK seq=%d tick=%d\n" % (cmd.seq, sim.tick_index)).encode()
                    )
            sim.tick(substep_hook=emit_due)
            if realtime:
                lag = wall_start + sim.time - time.monotonic()
                if lag > 0:
                    time.sleep(lag)
    finally:
        if log is not None:
            log.close()
    return frame_index
