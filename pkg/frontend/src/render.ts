/** Canvas rendering: nomon clock grid or scanning grid, prompt and text.
 *
 * High-contrast, thick-bordered cells; the clock noon mark is a short red
 * tick at the top of each face.
 */

import { handAngle, handTip } from "./clock.js";
import type { LayoutCell } from "./protocol.js";
import type { ViewModel } from "./state.js";

const CELL = 92;
const PAD = 10;
const FONT = "bold 15px system-ui, sans-serif";

function cellRect(cell: LayoutCell): [number, number, number, number] {
  return [PAD + cell.c * CELL, PAD + cell.r * CELL, CELL - 8, CELL - 8];
}

function drawCellBox(
  g: CanvasRenderingContext2D, cell: LayoutCell, highlighted: boolean,
): void {
  const [x, y, w, h] = cellRect(cell);
  g.fillStyle = highlighted ? "#ffd54d" : "#ffffff";
  g.fillRect(x, y, w, h);
  g.lineWidth = 4;
  g.strokeStyle = "#111111";
  g.strokeRect(x, y, w, h);
}

function drawLabel(g: CanvasRenderingContext2D, cell: LayoutCell, dy: number): void {
  const [x, y, w] = cellRect(cell);
  g.fillStyle = "#111111";
  g.font = FONT;
  g.textAlign = "center";
  const label = cell.label === " " ? "␣" : cell.label;
  g.fillText(label.slice(0, 9), x + w / 2, y + dy);
}

function drawClock(
  g: CanvasRenderingContext2D, cell: LayoutCell, engineNow: number, vm: ViewModel,
): void {
  const [x, y, w, h] = cellRect(cell);
  const cx = x + w / 2;
  const cy = y + h / 2 + 8;
  const r = 24;
  g.lineWidth = 4;
  g.strokeStyle = "#111111";
  g.beginPath();
  g.arc(cx, cy, r, 0, 2 * Math.PI);
  g.stroke();
  // noon mark
  g.strokeStyle = "#c62828";
  g.beginPath();
  g.moveTo(cx, cy - r);
  g.lineTo(cx, cy - r + 7);
  g.stroke();
  const phase = vm.phases[cell.id];
  if (phase !== undefined && vm.periodMs) {
    const a = handAngle(engineNow, phase, vm.periodMs);
    const tip = handTip(cx, cy, r - 5, a);
    g.strokeStyle = "#111111";
    g.lineWidth = 3;
    g.beginPath();
    g.moveTo(cx, cy);
    g.lineTo(tip.x, tip.y);
    g.stroke();
  }
}

export function render(
  canvas: HTMLCanvasElement, vm: ViewModel, engineNow: number,
): void {
  const g = canvas.getContext("2d");
  if (!g || !vm.layout) return;
  canvas.width = PAD * 2 + vm.layout.cols * CELL;
  canvas.height = PAD * 2 + vm.layout.rows * CELL + 70;
  g.fillStyle = vm.flash ? "#c62828" : "#f2f2f2";
  g.fillRect(0, 0, canvas.width, canvas.height);

  for (const cell of vm.layout.cells) {
    const hl =
      vm.engine === "rcs" &&
      (vm.mode === "row_scan"
        ? cell.r === vm.highlight
        : vm.mode === "col_scan" && cell.c === vm.highlight);
    drawCellBox(g, cell, hl);
    drawLabel(g, cell, 22);
    if (vm.engine === "nomon") drawClock(g, cell, engineNow, vm);
  }

  g.fillStyle = "#111111";
  g.font = FONT;
  g.textAlign = "left";
  const base = PAD + vm.layout.rows * CELL + 24;
  if (vm.prompt) g.fillText(`prompt: ${vm.prompt}`, PAD, base);
  g.fillText(`typed:  ${vm.text}`, PAD, base + 24);
  if (vm.lastSelection) {
    g.fillText(`selected ${vm.lastSelection.target}`, PAD, base + 48);
  }
}
