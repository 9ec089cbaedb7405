/** Node TCP implementation of the line transport, used by the tests
 * to talk to the simulator without the WebSocket bridge. */

import * as net from "node:net";

import { LineSplitter, LineTransport } from "../src/transport.js";

export class TcpTransport implements LineTransport {
  onLine: ((line: string) => void) | null = null;
  onOpen: (() => void) | null = null;
  onClose: (() => void) | null = null;

  private readonly socket: net.Socket;
  private readonly splitter = new LineSplitter((l) => this.onLine?.(l));

  constructor(host: string, port: number) {
    this.socket = net.createConnection({ host, port });
    this.socket.setNoDelay(true);
    this.socket.on("connect", () => this.onOpen?.());
    this.socket.on("data", (chunk) => this.splitter.push(chunk.toString("utf-8")));
    this.socket.on("close", () => this.onClose?.());
    this.socket.on("error", () => {
      /* close follows */
    });
  }

  send(line: string): void {
    this.socket.write(line.endsWith("\n") ? line : line + "\n");
  }

  close(): void {
    this.socket.destroy();
  }
}
