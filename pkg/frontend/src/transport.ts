/**
 * Line-oriented transport abstraction. The browser console talks to
 * the simulator's WebSocket bridge; tests plug in a TCP or fake
 * implementation. All implementations deliver complete lines.
 */

export interface LineTransport {
  send(line: string): void;
  close(): void;
  onLine: ((line: string) => void) | null;
  onOpen: (() => void) | null;
  onClose: (() => void) | null;
}

export type TransportFactory = () => LineTransport;

/** Splits an incoming byte/text stream into newline-terminated lines. */
export class LineSplitter {
  private buffer = "";

  constructor(private readonly emit: (line: string) => void) {}

  push(chunk: string): void {
    this.buffer += chunk;
    for (;;) {
      const i = this.buffer.indexOf("\n");
      if (i < 0) break;
      const line = this.buffer.slice(0, i);
      this.buffer = this.buffer.slice(i + 1);
      if (line.length > 0) this.emit(line);
    }
  }
}

/** Browser transport over the simulator's WebSocket bridge. */
export class WebSocketTransport implements LineTransport {
  onLine: ((line: string) => void) | null = null;
  onOpen: (() => void) | null = null;
  onClose: (() => void) | null = null;

  private readonly ws: WebSocket;
  private readonly splitter = new LineSplitter((l) => this.onLine?.(l));

  constructor(url: string) {
    this.ws = new WebSocket(url);
    this.ws.onopen = () => this.onOpen?.();
    this.ws.onclose = () => this.onClose?.();
    this.ws.onerror = () => this.ws.close();
    this.ws.onmessage = (ev) => {
      if (typeof ev.data === "string") this.splitter.push(ev.data);
    };
  }

  send(line: string): void {
    this.ws.send(line.endsWith("\n") ? line : line + "\n");
  }

  close(): void {
    this.ws.close();
  }
}
