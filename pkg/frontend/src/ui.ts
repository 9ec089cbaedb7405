/**
 * DOM rendering for the console: scrolling heading plot, attitude and
 * depth readouts, leak/voltage indicators, thrust sliders, the engage
 * form and the command log pane. No telemetry smoothing: the plot
 * draws exactly the received samples, gaps included.
 */

import { TelemetryFrame } from "./protocol.js";
import { CommandLogEntry, ConnectionState, HeadingSample, StationSession } from "./session.js";

const PLOT_WINDOW_S = 120;

export function drawHeadingPlot(
  canvas: HTMLCanvasElement,
  history: HeadingSample[],
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx || history.length === 0) return;
  const { width: w, height: h } = canvas;
  ctx.clearRect(0, 0, w, h);

  const tEnd = history[history.length - 1].t;
  const tStart = Math.max(0, tEnd - PLOT_WINDOW_S);
  const x = (t: number) => ((t - tStart) / (tEnd - tStart || 1)) * w;
  const y = (deg: number) => h - (deg / 360) * h;

  ctx.strokeStyle = "#555";
  ctx.beginPath();
  for (let deg = 0; deg <= 360; deg += 90) {
    ctx.moveTo(0, y(deg));
    ctx.lineTo(w, y(deg));
  }
  ctx.stroke();

  // setpoint trace (stepped, absent while in manual mode)
  ctx.strokeStyle = "#d9822b";
  ctx.beginPath();
  let pen = false;
  for (const s of history) {
    if (s.t < tStart) continue;
    if (s.setpoint === null) {
      pen = false;
      continue;
    }
    if (pen) ctx.lineTo(x(s.t), y(s.setpoint));
    else ctx.moveTo(x(s.t), y(s.setpoint));
    pen = true;
  }
  ctx.stroke();

  // yaw trace; break the pen across gaps so dropouts stay visible
  ctx.strokeStyle = "#2b7bd9";
  ctx.beginPath();
  let prev: HeadingSample | null = null;
  for (const s of history) {
    if (s.t < tStart) continue;
    const gap = prev !== null && s.t - prev.t > 0.5;
    const wrap = prev !== null && Math.abs(s.yaw - prev.yaw) > 180;
    if (prev === null || gap || wrap) ctx.moveTo(x(s.t), y(s.yaw));
    else ctx.lineTo(x(s.t), y(s.yaw));
    prev = s;
  }
  ctx.stroke();
}

function setText(id: string, text: string): void {
  const el = document.getElementById(id);
  if (el) el.textContent = text;
}

export function renderFrame(frame: TelemetryFrame): void {
  setText("yaw", frame.yaw.toFixed(1));
  setText("roll", frame.roll.toFixed(1));
  setText("pitch", frame.pitch.toFixed(1));
  setText("depth", frame.depth.toFixed(2));
  setText("altitude", frame.altitude.toFixed(2));
  setText("voltage", frame.voltage.toFixed(1));
  setText("rpm", frame.rpm.join(" / "));
  const leak = document.getElementById("leak");
  if (leak) {
    const tripped = frame.leak.some((v) => v);
    leak.textContent = tripped ? "LEAK" : "dry";
    leak.className = tripped ? "alarm" : "ok";
  }
}

export function renderConnection(state: ConnectionState): void {
  const banner = document.getElementById("connection");
  if (!banner) return;
  banner.textContent = state;
  banner.className = state;
}

export function renderCommandLog(log: CommandLogEntry[]): void {
  const pane = document.getElementById("command-log");
  if (!pane) return;
  pane.textContent = log
    .map((e) => {
      const tag =
        e.status === "acked"
          ? `ok@tick ${e.tick}`
          : e.status === "sent"
            ? "..."
            : `${e.status}: ${e.error ?? ""}`;
      return `${e.seq || "-"}  ${e.line}  [${tag}]`;
    })
    .join("\n");
  pane.scrollTop = pane.scrollHeight;
}

export function bindControls(session: StationSession): void {
  const slider = document.getElementById("thrust") as HTMLInputElement | null;
  slider?.addEventListener("change", () => {
    const v = Number(slider.value) / 100;
    session.setManualThrust([v, v, v]);
  });

  const form = document.getElementById("engage-form") as HTMLFormElement | null;
  form?.addEventListener("submit", (ev) => {
    ev.preventDefault();
    const read = (name: string) =>
      Number((form.elements.namedItem(name) as HTMLInputElement).value);
    session.engage(read("setpoint"), read("kp"), read("ki"), read("kd"));
  });

  document
    .getElementById("disengage")
    ?.addEventListener("click", () => session.disengage());
}
