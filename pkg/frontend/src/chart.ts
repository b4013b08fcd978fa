// Pie-chart rendering of summary counts on a plain canvas.

import type { SummaryCounts } from "./protocol.js";

export interface Slice {
  label: string;
  count: number;
  fraction: number;
  startAngle: number;
  endAngle: number;
}

const COLORS: Record<string, string> = {
  A: "#4e79a7",
  B: "#f28e2b",
  C: "#59a14f",
  D: "#e15759",
  UNKNOWN: "#9aa0a6",
};

// Pure layout so tests can compare slices against server counts directly.
export function pieSlices(counts: SummaryCounts): Slice[] {
  const entries: Array<[string, number]> = [
    ["A", counts.A], ["B", counts.B], ["C", counts.C], ["D", counts.D],
    ["UNKNOWN", counts.UNKNOWN],
  ];
  const total = entries.reduce((acc, [, n]) => acc + n, 0);
  const slices: Slice[] = [];
  let angle = -Math.PI / 2;
  for (const [label, count] of entries) {
    if (count <= 0) continue;
    const fraction = total > 0 ? count / total : 0;
    const end = angle + fraction * 2 * Math.PI;
    slices.push({ label, count, fraction, startAngle: angle, endAngle: end });
    angle = end;
  }
  return slices;
}

export function drawPie(canvas: HTMLCanvasElement, counts: SummaryCounts): Slice[] {
  const slices = pieSlices(counts);
  const ctx = canvas.getContext("2d");
  if (!ctx) return slices;
  const cx = canvas.width / 2;
  const cy = canvas.height / 2;
  const r = Math.min(cx, cy) - 8;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.font = "14px sans-serif";
  ctx.textAlign = "center";
  ctx.textBaseline = "middle";
  for (const s of slices) {
    ctx.fillStyle = COLORS[s.label] ?? "#ccc";
    ctx.beginPath();
    ctx.moveTo(cx, cy);
    ctx.arc(cx, cy, r, s.startAngle, s.endAngle);
    ctx.closePath();
    ctx.fill();
    const mid = (s.startAngle + s.endAngle) / 2;
    const lx = cx + Math.cos(mid) * r * 0.65;
    const ly = cy + Math.sin(mid) * r * 0.65;
    ctx.fillStyle = "#fff";
    ctx.fillText(`${s.label === "UNKNOWN" ? "?" : s.label} ${s.count}`, lx, ly);
  }
  return slices;
}
