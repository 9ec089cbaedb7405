/**
 * Browser entry point. The simulator endpoint comes from the page
 * query (`?ws=ws://host:port`) or defaults to the bridge on the page's
 * host at port 9501.
 */

import { StationSession } from "./session.js";
import { WebSocketTransport } from "./transport.js";
import {
  bindControls,
  drawHeadingPlot,
  renderCommandLog,
  renderConnection,
  renderFrame,
} from "./ui.js";

function endpoint(): string {
  const param = new URLSearchParams(window.location.search).get("ws");
  return param ?? `ws://${window.location.hostname || "127.0.0.1"}:9501`;
}

const session = new StationSession(() => new WebSocketTransport(endpoint()), {
  onFrame: renderFrame,
  onStateChange: renderConnection,
  onCommandLog: () => renderCommandLog(session.commandLog),
});

bindControls(session);
renderConnection(session.connectionState);

const canvas = document.getElementById("heading-plot") as HTMLCanvasElement | null;
function repaint(): void {
  if (canvas) drawHeadingPlot(canvas, session.headingHistory.toArray());
  requestAnimationFrame(repaint);
}
requestAnimationFrame(repaint);
